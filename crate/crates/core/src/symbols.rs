//! Sparse multivariate polynomials and the two total-symbol containers.
//!
//! A [`Poly`] lives in `n` base variables `x1..xn` and `n` fiber variables
//! (`u1..un` on the W side, `xi1..xin` on the E side). Fiber exponents may be
//! negative on the E side (Laurent monomials); base exponents never are.
//!
//! A [`WSymbol`] is a total symbol `sum_{j <= m} p_j(x;u) tau^j`; an
//! [`ESymbol`] is `sum_{j <= m} p_j(x;xi)` with each `p_j` homogeneous of
//! degree `j` in the fiber variables. Both carry the same explicit truncation
//! marker as the scalar series.

use std::cmp::Ordering;
use std::collections::BTreeMap;
use std::fmt;

use num_rational::BigRational;
use thiserror::Error;

use crate::linalg::Mat;
use crate::scalars::{signed_coeff_body, tau_power, LaurentScalar, Scalar};

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum SymbolError {
    #[error("symbol has no represented terms")]
    ZeroSymbol,
    #[error("operands live over different variable counts ({left} vs {right})")]
    VariableMismatch { left: usize, right: usize },
    #[error("component {degree} contains term of fiber degree {found}")]
    NonHomogeneous { degree: i64, found: i64 },
}

/// Exponent vector of one monomial: `x` entries are always >= 0, fiber
/// entries may be negative in Laurent mode.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct Mono {
    x: Vec<i32>,
    f: Vec<i32>,
}

impl Mono {
    pub fn unit(n: usize) -> Self {
        Mono {
            x: vec![0; n],
            f: vec![0; n],
        }
    }

    pub fn new(x: Vec<i32>, f: Vec<i32>) -> Self {
        assert_eq!(x.len(), f.len(), "mismatched exponent vector lengths");
        assert!(x.iter().all(|&e| e >= 0), "negative base exponent");
        Mono { x, f }
    }

    pub fn x(&self) -> &[i32] {
        &self.x
    }

    pub fn f(&self) -> &[i32] {
        &self.f
    }

    pub fn x_degree(&self) -> i64 {
        self.x.iter().map(|&e| e as i64).sum()
    }

    pub fn fiber_degree(&self) -> i64 {
        self.f.iter().map(|&e| e as i64).sum()
    }

    fn mul(&self, rhs: &Mono) -> Mono {
        Mono {
            x: self.x.iter().zip(&rhs.x).map(|(a, b)| a + b).collect(),
            f: self.f.iter().zip(&rhs.f).map(|(a, b)| a + b).collect(),
        }
    }
}

/// Graded-lexicographic on the base exponents, then on the fiber exponents.
/// This is the canonical term order used for printing and equality.
impl Ord for Mono {
    fn cmp(&self, other: &Self) -> Ordering {
        (self.x_degree(), &self.x, self.fiber_degree(), &self.f).cmp(&(
            other.x_degree(),
            &other.x,
            other.fiber_degree(),
            &other.f,
        ))
    }
}

impl PartialOrd for Mono {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

/// Sparse polynomial in `n` base and `n` fiber variables.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Poly {
    n: usize,
    terms: BTreeMap<Mono, Scalar>,
}

impl Poly {
    pub fn zero(n: usize) -> Self {
        Poly {
            n,
            terms: BTreeMap::new(),
        }
    }

    pub fn one(n: usize) -> Self {
        Poly::constant(n, Scalar::one())
    }

    pub fn constant(n: usize, c: Scalar) -> Self {
        let mut terms = BTreeMap::new();
        if !c.is_zero() {
            terms.insert(Mono::unit(n), c);
        }
        Poly { n, terms }
    }

    /// The base variable `x{i+1}`.
    pub fn var_x(n: usize, i: usize) -> Self {
        assert!(i < n);
        let mut m = Mono::unit(n);
        m.x[i] = 1;
        Poly::from_terms(n, [(m, Scalar::one())])
    }

    /// The fiber variable `u{i+1}` / `xi{i+1}`.
    pub fn var_f(n: usize, i: usize) -> Self {
        assert!(i < n);
        let mut m = Mono::unit(n);
        m.f[i] = 1;
        Poly::from_terms(n, [(m, Scalar::one())])
    }

    pub fn from_terms<I: IntoIterator<Item = (Mono, Scalar)>>(n: usize, terms: I) -> Self {
        let mut map: BTreeMap<Mono, Scalar> = BTreeMap::new();
        for (m, c) in terms {
            assert_eq!(m.x.len(), n, "monomial arity mismatch");
            if c.is_zero() {
                continue;
            }
            let e = map.entry(m).or_insert_with(Scalar::zero);
            *e = &*e + &c;
        }
        map.retain(|_, c| !c.is_zero());
        Poly { n, terms: map }
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn terms(&self) -> &BTreeMap<Mono, Scalar> {
        &self.terms
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn is_constant(&self) -> Option<Scalar> {
        if self.terms.is_empty() {
            return Some(Scalar::zero());
        }
        if self.terms.len() == 1 {
            let (m, c) = self.terms.iter().next().unwrap();
            if *m == Mono::unit(self.n) {
                return Some(c.clone());
            }
        }
        None
    }

    pub fn add(&self, rhs: &Poly) -> Poly {
        assert_eq!(self.n, rhs.n);
        Poly::from_terms(
            self.n,
            self.terms
                .iter()
                .chain(rhs.terms.iter())
                .map(|(m, c)| (m.clone(), c.clone())),
        )
    }

    pub fn sub(&self, rhs: &Poly) -> Poly {
        self.add(&rhs.neg())
    }

    pub fn neg(&self) -> Poly {
        Poly {
            n: self.n,
            terms: self.terms.iter().map(|(m, c)| (m.clone(), -c)).collect(),
        }
    }

    pub fn scale(&self, c: &Scalar) -> Poly {
        if c.is_zero() {
            return Poly::zero(self.n);
        }
        Poly {
            n: self.n,
            terms: self.terms.iter().map(|(m, a)| (m.clone(), a * c)).collect(),
        }
    }

    pub fn mul(&self, rhs: &Poly) -> Poly {
        assert_eq!(self.n, rhs.n);
        Poly::from_terms(
            self.n,
            self.terms.iter().flat_map(|(m1, c1)| {
                rhs.terms
                    .iter()
                    .map(move |(m2, c2)| (m1.mul(m2), c1 * c2))
            }),
        )
    }

    pub fn pow(&self, k: u32) -> Poly {
        let mut acc = Poly::one(self.n);
        for _ in 0..k {
            acc = acc.mul(self);
        }
        acc
    }

    /// Iterated exact partial derivative in base variable `i`.
    pub fn derive_x(&self, i: usize, times: u32) -> Poly {
        assert!(i < self.n);
        self.derive_slot(i, times, true)
    }

    /// Iterated exact partial derivative in fiber variable `i`; Laurent
    /// exponents follow the power rule.
    pub fn derive_f(&self, i: usize, times: u32) -> Poly {
        assert!(i < self.n);
        self.derive_slot(i, times, false)
    }

    fn derive_slot(&self, i: usize, times: u32, base: bool) -> Poly {
        let mut cur = self.clone();
        for _ in 0..times {
            if cur.is_zero() {
                break;
            }
            cur = Poly::from_terms(
                self.n,
                cur.terms.iter().filter_map(|(m, c)| {
                    let e = if base { m.x[i] } else { m.f[i] };
                    if e == 0 {
                        return None;
                    }
                    let mut m2 = m.clone();
                    if base {
                        m2.x[i] -= 1;
                    } else {
                        m2.f[i] -= 1;
                    }
                    Some((m2, c.scale(&BigRational::from_integer(e.into()))))
                }),
            );
        }
        cur
    }

    /// Per-variable maxima of nonnegative fiber exponents (the ranges a
    /// Leibniz multi-index has to cover).
    pub fn max_f_degrees(&self) -> Vec<i32> {
        let mut out = vec![0; self.n];
        for m in self.terms.keys() {
            for (o, &e) in out.iter_mut().zip(&m.f) {
                *o = (*o).max(e);
            }
        }
        out
    }

    pub fn max_x_degrees(&self) -> Vec<i32> {
        let mut out = vec![0; self.n];
        for m in self.terms.keys() {
            for (o, &e) in out.iter_mut().zip(&m.x) {
                *o = (*o).max(e);
            }
        }
        out
    }

    /// Simultaneous substitution `x -> A x + b`, `u -> M u` (exact polynomial
    /// composition). `A` and `M` are `n x n`, `b` length `n`.
    pub fn substitute_linear(&self, a: &Mat, b: &[Scalar], m_fiber: &Mat) -> Poly {
        assert_eq!(a.rows(), self.n);
        assert_eq!(b.len(), self.n);
        assert_eq!(m_fiber.rows(), self.n);
        let x_imgs: Vec<Poly> = (0..self.n)
            .map(|i| {
                let mut p = Poly::constant(self.n, b[i].clone());
                for j in 0..self.n {
                    p = p.add(&Poly::var_x(self.n, j).scale(&a[(i, j)]));
                }
                p
            })
            .collect();
        let f_imgs: Vec<Poly> = (0..self.n)
            .map(|i| {
                let mut p = Poly::zero(self.n);
                for j in 0..self.n {
                    p = p.add(&Poly::var_f(self.n, j).scale(&m_fiber[(i, j)]));
                }
                p
            })
            .collect();
        let mut out = Poly::zero(self.n);
        for (mono, c) in &self.terms {
            let mut term = Poly::constant(self.n, c.clone());
            for (i, &e) in mono.x.iter().enumerate() {
                term = term.mul(&x_imgs[i].pow(e as u32));
            }
            for (i, &e) in mono.f.iter().enumerate() {
                assert!(e >= 0, "linear substitution into Laurent fiber exponent");
                term = term.mul(&f_imgs[i].pow(e as u32));
            }
            out = out.add(&term);
        }
        out
    }
}

/// Total symbol of a W-algebra section: tau-degree indexed components.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct WSymbol {
    n: usize,
    comps: BTreeMap<i64, Poly>,
    floor: Option<i64>,
}

/// Total symbol of a microdifferential section: fiber-homogeneity indexed
/// components, Laurent in the fiber variables.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ESymbol {
    n: usize,
    comps: BTreeMap<i64, Poly>,
    floor: Option<i64>,
}

macro_rules! symbol_common {
    ($ty:ident) => {
        impl $ty {
            pub fn zero(n: usize) -> Self {
                $ty {
                    n,
                    comps: BTreeMap::new(),
                    floor: None,
                }
            }

            pub fn n(&self) -> usize {
                self.n
            }

            pub fn comps(&self) -> &BTreeMap<i64, Poly> {
                &self.comps
            }

            pub fn comp(&self, degree: i64) -> Poly {
                self.comps
                    .get(&degree)
                    .cloned()
                    .unwrap_or_else(|| Poly::zero(self.n))
            }

            pub fn floor(&self) -> Option<i64> {
                self.floor
            }

            pub fn is_truncated(&self) -> bool {
                self.floor.is_some()
            }

            pub fn is_zero(&self) -> bool {
                self.comps.is_empty()
            }

            /// Top degree carrying a nonzero component; `None` for zero.
            pub fn order(&self) -> Option<i64> {
                self.comps.keys().next_back().copied()
            }

            /// Top degree and leading component.
            pub fn principal(&self) -> Result<(i64, &Poly), SymbolError> {
                let m = self.order().ok_or(SymbolError::ZeroSymbol)?;
                Ok((m, &self.comps[&m]))
            }

            pub(crate) fn degree_bound(&self) -> Option<i64> {
                match self.order() {
                    Some(m) => Some(m),
                    None => self.floor.map(|n| n - 1),
                }
            }

            fn enforce_floor(&mut self) {
                if let Some(n) = self.floor {
                    self.comps.retain(|&j, _| j >= n);
                }
            }

            pub fn truncate(&self, floor: i64) -> Self {
                let new_floor = Some(match self.floor {
                    Some(f) => f.max(floor),
                    None => floor,
                });
                let mut out = $ty {
                    n: self.n,
                    comps: self.comps.clone(),
                    floor: new_floor,
                };
                out.enforce_floor();
                out
            }

            /// Builds a symbol from `(degree, component)` pairs, merging and
            /// dropping zeros and anything below the floor.
            pub fn from_components<I: IntoIterator<Item = (i64, Poly)>>(
                n: usize,
                comps: I,
                floor: Option<i64>,
            ) -> Self {
                let mut map: BTreeMap<i64, Poly> = BTreeMap::new();
                for (j, p) in comps {
                    assert_eq!(p.n(), n, "component arity mismatch");
                    if p.is_zero() {
                        continue;
                    }
                    match map.remove(&j) {
                        Some(q) => {
                            let s = q.add(&p);
                            if !s.is_zero() {
                                map.insert(j, s);
                            }
                        }
                        None => {
                            map.insert(j, p);
                        }
                    }
                }
                let mut out = $ty {
                    n,
                    comps: map,
                    floor,
                };
                out.enforce_floor();
                out
            }

            pub fn add(&self, rhs: &Self) -> Self {
                assert_eq!(self.n, rhs.n);
                let floor = match (self.floor, rhs.floor) {
                    (Some(a), Some(b)) => Some(a.max(b)),
                    (a, b) => a.or(b),
                };
                $ty::from_components(
                    self.n,
                    self.comps
                        .iter()
                        .chain(rhs.comps.iter())
                        .map(|(&j, p)| (j, p.clone())),
                    floor,
                )
            }

            pub fn sub(&self, rhs: &Self) -> Self {
                self.add(&rhs.neg())
            }

            pub fn neg(&self) -> Self {
                $ty {
                    n: self.n,
                    comps: self.comps.iter().map(|(&j, p)| (j, p.neg())).collect(),
                    floor: self.floor,
                }
            }

            pub fn scale(&self, c: &Scalar) -> Self {
                if c.is_zero() {
                    return $ty {
                        n: self.n,
                        comps: BTreeMap::new(),
                        floor: self.floor,
                    };
                }
                $ty {
                    n: self.n,
                    comps: self.comps.iter().map(|(&j, p)| (j, p.scale(c))).collect(),
                    floor: self.floor,
                }
            }

            /// Componentwise equality at degrees >= `degree`, ignoring
            /// anything hidden below either operand's floor.
            pub fn agrees_with(&self, rhs: &Self, degree: i64) -> bool {
                if self.n != rhs.n {
                    return false;
                }
                let mut cut = degree;
                if let Some(f) = self.floor {
                    cut = cut.max(f);
                }
                if let Some(f) = rhs.floor {
                    cut = cut.max(f);
                }
                let mine = self.comps.range(cut..);
                let theirs = rhs.comps.range(cut..);
                mine.clone().count() == theirs.clone().count()
                    && mine.zip(theirs).all(|(a, b)| a == b)
            }
        }
    };
}

symbol_common!(WSymbol);
symbol_common!(ESymbol);

impl WSymbol {
    pub fn one(n: usize) -> Self {
        WSymbol::from_components(n, [(0, Poly::one(n))], None)
    }

    pub fn var_x(n: usize, i: usize) -> Self {
        WSymbol::from_components(n, [(0, Poly::var_x(n, i))], None)
    }

    pub fn var_u(n: usize, i: usize) -> Self {
        WSymbol::from_components(n, [(0, Poly::var_f(n, i))], None)
    }

    pub fn from_poly(n: usize, tau_degree: i64, p: Poly) -> Self {
        WSymbol::from_components(n, [(tau_degree, p)], None)
    }

    /// Embeds a coefficient-field element as a central symbol.
    pub fn from_laurent(n: usize, a: &LaurentScalar) -> Self {
        WSymbol::from_components(
            n,
            a.coeffs()
                .iter()
                .map(|(&j, c)| (j, Poly::constant(n, c.clone()))),
            a.floor(),
        )
    }

    /// The central scalar this symbol represents, if every component is a
    /// constant polynomial.
    pub fn to_laurent(&self) -> Option<LaurentScalar> {
        let mut terms = Vec::new();
        for (&j, p) in &self.comps {
            terms.push((j, p.is_constant()?));
        }
        Some(LaurentScalar::from_terms(terms, self.floor))
    }

    /// Multiplication by a central scalar (equals the star product with it).
    pub fn mul_laurent(&self, a: &LaurentScalar) -> Self {
        let other = WSymbol::from_laurent(self.n, a);
        let floor = {
            let mut candidates = Vec::new();
            if let (Some(f), Some(b)) = (self.floor, other.degree_bound()) {
                candidates.push(f + b);
            }
            if let (Some(f), Some(b)) = (other.floor, self.degree_bound()) {
                candidates.push(f + b);
            }
            candidates.into_iter().max()
        };
        WSymbol::from_components(
            self.n,
            self.comps.iter().flat_map(|(&j, p)| {
                a.coeffs()
                    .iter()
                    .map(move |(&k, c)| (j + k, p.scale(c)))
            }),
            floor,
        )
    }

    /// Degree shift by `tau^k`.
    pub fn shift(&self, k: i64) -> Self {
        WSymbol {
            n: self.n,
            comps: self.comps.iter().map(|(&j, p)| (j + k, p.clone())).collect(),
            floor: self.floor.map(|f| f + k),
        }
    }
}

impl ESymbol {
    pub fn one(n: usize) -> Self {
        ESymbol::from_components(n, [(0, Poly::one(n))], None)
    }

    pub fn var_x(n: usize, i: usize) -> Self {
        ESymbol::from_components(n, [(0, Poly::var_x(n, i))], None)
    }

    pub fn var_xi(n: usize, i: usize) -> Self {
        ESymbol::from_components(n, [(1, Poly::var_f(n, i))], None)
    }

    /// Distributes an arbitrary Laurent polynomial over homogeneity degrees;
    /// the result always passes [`ESymbol::homogeneity_check`].
    pub fn from_poly(p: Poly) -> Self {
        let n = p.n();
        ESymbol::from_components(
            n,
            p.terms().iter().map(|(m, c)| {
                (
                    m.fiber_degree(),
                    Poly::from_terms(n, [(m.clone(), c.clone())]),
                )
            }),
            None,
        )
    }

    /// The whole symbol as one Laurent polynomial (sum of the components).
    pub fn total_poly(&self) -> Poly {
        let mut acc = Poly::zero(self.n);
        for p in self.comps.values() {
            acc = acc.add(p);
        }
        acc
    }

    /// Verifies that every term of `comps[j]` has fiber degree `j`.
    pub fn homogeneity_check(&self) -> Result<(), SymbolError> {
        for (&j, p) in &self.comps {
            for m in p.terms().keys() {
                if m.fiber_degree() != j {
                    return Err(SymbolError::NonHomogeneous {
                        degree: j,
                        found: m.fiber_degree(),
                    });
                }
            }
        }
        Ok(())
    }
}

struct TermFormat<'a> {
    mono: &'a Mono,
    coeff: &'a Scalar,
    tau_degree: i64,
    fiber_name: &'a str,
    /// When set, the last base/fiber pair prints as `t`/`tau` (the extra
    /// factor used on the E side for the reduction to W).
    t_pair: bool,
}

impl TermFormat<'_> {
    fn render(&self) -> (bool, String) {
        let (sign, coeff_body) = signed_coeff_body(self.coeff);
        let mut factors: Vec<String> = Vec::new();
        if !coeff_body.is_empty() {
            factors.push(coeff_body);
        }
        let n = self.mono.x().len();
        for (i, &e) in self.mono.x().iter().enumerate() {
            if e == 0 {
                continue;
            }
            let name = if self.t_pair && i == n - 1 {
                "t".to_string()
            } else {
                format!("x{}", i + 1)
            };
            factors.push(if e == 1 {
                name
            } else {
                format!("{}^{}", name, e)
            });
        }
        for (i, &e) in self.mono.f().iter().enumerate() {
            if e == 0 {
                continue;
            }
            let name = if self.t_pair && i == n - 1 {
                "tau".to_string()
            } else {
                format!("{}{}", self.fiber_name, i + 1)
            };
            factors.push(if e == 1 {
                name
            } else {
                format!("{}^{}", name, e)
            });
        }
        let tau = tau_power(self.tau_degree);
        if !tau.is_empty() {
            factors.push(tau);
        }
        if factors.is_empty() {
            (sign, "1".to_string())
        } else {
            (sign, factors.join("*"))
        }
    }
}

fn fmt_symbol(
    f: &mut fmt::Formatter<'_>,
    comps: &BTreeMap<i64, Poly>,
    floor: Option<i64>,
    fiber_name: &str,
    with_tau_degree: bool,
    t_pair: bool,
) -> fmt::Result {
    let mut first = true;
    for (&j, p) in comps.iter().rev() {
        for (mono, coeff) in p.terms().iter().rev() {
            let (sign, body) = TermFormat {
                mono,
                coeff,
                tau_degree: if with_tau_degree { j } else { 0 },
                fiber_name,
                t_pair,
            }
            .render();
            if first {
                if sign {
                    write!(f, "-")?;
                }
                first = false;
            } else {
                write!(f, " {} ", if sign { "-" } else { "+" })?;
            }
            write!(f, "{}", body)?;
        }
    }
    if first {
        write!(f, "0")?;
    }
    if let Some(n) = floor {
        write!(f, " (floor: {})", n)?;
    }
    Ok(())
}

/// Renders tau-degree descending, monomials descending within a component,
/// e.g. `x1^2*u1^2 + x1*u1*tau^-1`, with a `(floor: N)` suffix when truncated.
impl fmt::Display for WSymbol {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        fmt_symbol(f, &self.comps, self.floor, "u", true, false)
    }
}

/// Renders homogeneity degree descending, e.g. `x1*xi1^2 + 2*xi1`.
impl fmt::Display for ESymbol {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        fmt_symbol(f, &self.comps, self.floor, "xi", false, false)
    }
}

impl ESymbol {
    /// Rendering for symbols on the product with a line: the last base/fiber
    /// pair prints as `t`/`tau`.
    pub fn display_with_t(&self) -> String {
        struct D<'a>(&'a ESymbol);
        impl fmt::Display for D<'_> {
            fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
                fmt_symbol(f, &self.0.comps, self.0.floor, "xi", false, true)
            }
        }
        D(self).to_string()
    }
}
