//! The star-product calculus on total symbols.
//!
//! Products follow the Leibniz-rule expansion with symbols normal-ordered
//! (base variables to the left of derivatives, `u_i <-> tau^-1 d/dx_i`):
//!
//! * W side: `sigma(P o Q) = sum_a (tau^-|a| / a!) d_u^a sigma(P) d_x^a sigma(Q)`
//! * E side: `sigma(P o Q) = sum_a (1/a!) d_xi^a sigma(P) d_x^a sigma(Q)`
//!
//! Transpositions apply the derivative sums first and flip the sign of the
//! fiber afterwards; both are involutive anti-automorphisms. The reduction
//! from E-symbols on the product with a line to W-symbols substitutes
//! `xi = tau*u` on t-independent sections. Automorphisms are words in exact
//! affine lifts and truncating inner conjugations.

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Zero};
use thiserror::Error;

use crate::linalg::Mat;
use crate::scalars::Scalar;
use crate::symbols::{ESymbol, Mono, Poly, WSymbol};

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum WcalcError {
    #[error("element is not star-invertible: {reason}")]
    NotInvertible { reason: String },
    #[error("component of degree {degree} is not Laurent-representable after substitution")]
    NonReducible { degree: i64 },
    #[error("symbol depends on the central coordinate t")]
    TDependent,
    #[error("section carries fiber variables and does not lie in the simple module")]
    FiberVariablePresent,
}

/// Odometer over multi-indices `0 <= alpha_i <= max[i]`, starting at zero.
struct MultiIndex {
    max: Vec<i32>,
    cur: Vec<i32>,
    done: bool,
}

impl MultiIndex {
    fn new(max: Vec<i32>) -> Self {
        let len = max.len();
        MultiIndex {
            max,
            cur: vec![0; len],
            done: false,
        }
    }
}

impl Iterator for MultiIndex {
    type Item = Vec<i32>;
    fn next(&mut self) -> Option<Vec<i32>> {
        if self.done {
            return None;
        }
        let out = self.cur.clone();
        let mut i = 0;
        loop {
            if i == self.cur.len() {
                self.done = true;
                break;
            }
            if self.cur[i] < self.max[i] {
                self.cur[i] += 1;
                break;
            }
            self.cur[i] = 0;
            i += 1;
        }
        Some(out)
    }
}

fn alpha_weight(alpha: &[i32]) -> i64 {
    alpha.iter().map(|&a| a as i64).sum()
}

/// Falling factorial `e (e-1) ... (e-a+1)`; the coefficient produced by `a`
/// iterated derivatives of a power `e` (negative `e` allowed).
fn falling(e: i32, a: i32) -> BigInt {
    let mut acc = BigInt::one();
    for k in 0..a {
        acc *= BigInt::from(e as i64 - k as i64);
    }
    acc
}

/// Leibniz pairing of two monomials: derivative multi-indices bounded by the
/// fiber exponents of the left factor and the base exponents of the right.
/// Yields `(alpha, combinatorial coefficient)` for every nonvanishing term.
fn leibniz_pairs(left_f: &[i32], right_x: &[i32]) -> Vec<(Vec<i32>, BigRational)> {
    let bounds: Vec<i32> = left_f
        .iter()
        .zip(right_x)
        .map(|(&g, &d)| {
            // Nonnegative fiber exponents die after g derivatives; Laurent
            // ones never do, so only the base side bounds them.
            if g >= 0 {
                g.min(d)
            } else {
                d
            }
        })
        .collect();
    let mut out = Vec::new();
    for alpha in MultiIndex::new(bounds) {
        let mut num = BigInt::one();
        let mut den = BigInt::one();
        for (i, &a) in alpha.iter().enumerate() {
            if a == 0 {
                continue;
            }
            num *= falling(left_f[i], a) * falling(right_x[i], a);
            for k in 2..=a {
                den *= BigInt::from(k as i64);
            }
        }
        if num.is_zero() {
            continue;
        }
        out.push((alpha, BigRational::new(num, den)));
    }
    out
}

fn combined_mul_floor(
    left_floor: Option<i64>,
    left_bound: Option<i64>,
    right_floor: Option<i64>,
    right_bound: Option<i64>,
) -> Option<i64> {
    let mut candidates = Vec::new();
    if let (Some(f), Some(b)) = (left_floor, right_bound) {
        candidates.push(f + b);
    }
    if let (Some(f), Some(b)) = (right_floor, left_bound) {
        candidates.push(f + b);
    }
    candidates.into_iter().max()
}

/// Star product of W-symbols, expanded term by term: the pair of monomials
/// `x^b u^g tau^j` and `x^d u^e tau^k` contributes, for every multi-index
/// `alpha <= min(g, d)`, the term
/// `(g)_alpha (d)_alpha / alpha! x^{b+d-alpha} u^{g+e-alpha} tau^{j+k-|alpha|}`.
pub fn star_w(p: &WSymbol, q: &WSymbol) -> WSymbol {
    let n = p.n();
    assert_eq!(n, q.n(), "star product across different variable counts");
    let floor = combined_mul_floor(p.floor(), p.degree_bound(), q.floor(), q.degree_bound());

    let mut acc: std::collections::BTreeMap<i64, Vec<(Mono, Scalar)>> = Default::default();
    for (&j, pj) in p.comps() {
        for (&k, qk) in q.comps() {
            for (m1, c1) in pj.terms() {
                for (m2, c2) in qk.terms() {
                    let c12 = c1 * c2;
                    for (alpha, weight) in leibniz_pairs(m1.f(), m2.x()) {
                        let w = alpha_weight(&alpha);
                        let x: Vec<i32> = (0..n)
                            .map(|i| m1.x()[i] + m2.x()[i] - alpha[i])
                            .collect();
                        let f: Vec<i32> = (0..n)
                            .map(|i| m1.f()[i] + m2.f()[i] - alpha[i])
                            .collect();
                        acc.entry(j + k - w)
                            .or_default()
                            .push((Mono::new(x, f), c12.scale(&weight)));
                    }
                }
            }
        }
    }
    WSymbol::from_components(
        n,
        acc.into_iter().map(|(d, ts)| (d, Poly::from_terms(n, ts))),
        floor,
    )
}

/// Star product of E-symbols, expanded term by term on the total symbols and
/// redistributed by fiber homogeneity. Homogeneous inputs give homogeneous
/// output: each summand drops base and fiber degree by the same `|alpha|`.
pub fn star_e(p: &ESymbol, q: &ESymbol) -> ESymbol {
    let n = p.n();
    assert_eq!(n, q.n(), "star product across different variable counts");
    let floor = combined_mul_floor(p.floor(), p.degree_bound(), q.floor(), q.degree_bound());

    let pt = p.total_poly();
    let qt = q.total_poly();
    let mut acc: Vec<(Mono, Scalar)> = Vec::new();
    for (m1, c1) in pt.terms() {
        for (m2, c2) in qt.terms() {
            let c12 = c1 * c2;
            for (alpha, weight) in leibniz_pairs(m1.f(), m2.x()) {
                let x: Vec<i32> = (0..n)
                    .map(|i| m1.x()[i] + m2.x()[i] - alpha[i])
                    .collect();
                let f: Vec<i32> = (0..n)
                    .map(|i| m1.f()[i] + m2.f()[i] - alpha[i])
                    .collect();
                acc.push((Mono::new(x, f), c12.scale(&weight)));
            }
        }
    }
    let out = ESymbol::from_poly(Poly::from_terms(n, acc));
    match floor {
        Some(f) => out.truncate(f),
        None => out,
    }
}

/// Transposition of a W-symbol:
/// `sum_a ((-tau)^-|a| / a!) [d_u^a d_x^a sigma(P)](x; u, -tau)`.
/// Anti-k-linear involutive anti-automorphism. Termwise, `x^b u^g tau^j`
/// contributes `(-1)^{j+|a|} (b)_a (g)_a / a! x^{b-a} u^{g-a} tau^{j-|a|}`
/// for every `alpha <= min(b, g)`.
pub fn transpose_w(p: &WSymbol) -> WSymbol {
    let n = p.n();
    let mut acc: std::collections::BTreeMap<i64, Vec<(Mono, Scalar)>> = Default::default();
    for (&j, pj) in p.comps() {
        for (m, c) in pj.terms() {
            for (alpha, weight) in leibniz_pairs(m.f(), m.x()) {
                let w = alpha_weight(&alpha);
                let x: Vec<i32> = (0..n).map(|i| m.x()[i] - alpha[i]).collect();
                let f: Vec<i32> = (0..n).map(|i| m.f()[i] - alpha[i]).collect();
                let mut v = c.scale(&weight);
                if (j + w).rem_euclid(2) == 1 {
                    v = -&v;
                }
                acc.entry(j - w).or_default().push((Mono::new(x, f), v));
            }
        }
    }
    // Degree j of the result only draws on degrees >= j of the input, so the
    // input floor carries over unchanged.
    WSymbol::from_components(
        n,
        acc.into_iter().map(|(d, ts)| (d, Poly::from_terms(n, ts))),
        p.floor(),
    )
}

/// Transposition of an E-symbol:
/// `sum_a ((-1)^|a| / a!) [d_xi^a d_x^a sigma(P)](x; -xi)`.
/// The fiber flip contributes `(-1)^{|gamma| - |a|}` which combines with
/// `(-1)^|a|` to the parity of the original fiber degree.
pub fn transpose_e(p: &ESymbol) -> ESymbol {
    let n = p.n();
    let pt = p.total_poly();
    let mut acc: Vec<(Mono, Scalar)> = Vec::new();
    for (m, c) in pt.terms() {
        let flip = m.fiber_degree().rem_euclid(2) == 1;
        for (alpha, weight) in leibniz_pairs(m.f(), m.x()) {
            let x: Vec<i32> = (0..n).map(|i| m.x()[i] - alpha[i]).collect();
            let f: Vec<i32> = (0..n).map(|i| m.f()[i] - alpha[i]).collect();
            let mut v = c.scale(&weight);
            if flip {
                v = -&v;
            }
            acc.push((Mono::new(x, f), v));
        }
    }
    let out = ESymbol::from_poly(Poly::from_terms(n, acc));
    match p.floor() {
        Some(f) => out.truncate(f),
        None => out,
    }
}

/// Star product correct modulo `tau^{< floor}`: each factor is truncated as
/// far as the other factor's order allows before multiplying, and the result
/// carries the floor.
pub fn star_w_mod(p: &WSymbol, q: &WSymbol, floor: i64) -> WSymbol {
    let tp = p.degree_bound().unwrap_or(0);
    let tq = q.degree_bound().unwrap_or(0);
    star_w(&p.truncate(floor - tq), &q.truncate(floor - tp)).truncate(floor)
}

pub fn commutator(p: &WSymbol, q: &WSymbol) -> WSymbol {
    star_w(p, q).sub(&star_w(q, p))
}

/// A section of the simple module supported on the zero-section: a series
/// `f(x, tau)` with no fiber variables, acted on by `x`-multiplication and
/// `tau^-1 d/dx`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct OTauElement {
    value: WSymbol,
}

impl OTauElement {
    pub fn new(value: WSymbol) -> Result<Self, WcalcError> {
        for comp in value.comps().values() {
            if comp.terms().keys().any(|m| m.f().iter().any(|&e| e != 0)) {
                return Err(WcalcError::FiberVariablePresent);
            }
        }
        Ok(OTauElement { value })
    }

    pub fn one(n: usize) -> Self {
        OTauElement {
            value: WSymbol::one(n),
        }
    }

    pub fn value(&self) -> &WSymbol {
        &self.value
    }
}

impl std::fmt::Display for OTauElement {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        self.value.fmt(f)
    }
}

/// Module action on the simple module: the monomial `x^b u^a tau^j` acts as
/// `f -> tau^{j-|a|} x^b d_x^a f`, extended linearly.
pub fn apply_otau(p: &WSymbol, f: &OTauElement) -> OTauElement {
    let n = p.n();
    let fv = f.value();
    assert_eq!(n, fv.n(), "action across different variable counts");

    // Sharper than the product-rule bound: a term x^b u^a tau^j shifts
    // degrees by j - |a|, so the acting bound is the max of those shifts.
    // Hidden parts of f move by at most that; hidden parts of p (any a >= 0)
    // land below floor(p) + top(f).
    let act_bound = p
        .comps()
        .iter()
        .flat_map(|(&j, comp)| comp.terms().keys().map(move |m| j - m.fiber_degree()))
        .max()
        .or_else(|| p.floor().map(|f0| f0 - 1));
    let floor = combined_mul_floor(p.floor(), act_bound, fv.floor(), fv.degree_bound());

    let mut acc: std::collections::BTreeMap<i64, Vec<(Mono, Scalar)>> = Default::default();
    for (&j, comp) in p.comps() {
        for (mono, c) in comp.terms() {
            let alpha = mono.f();
            let w = alpha_weight(alpha);
            for (&d, g) in fv.comps() {
                for (gm, gc) in g.terms() {
                    let mut num = BigInt::one();
                    for i in 0..n {
                        num *= falling(gm.x()[i], alpha[i]);
                        if num.is_zero() {
                            break;
                        }
                    }
                    if num.is_zero() {
                        continue;
                    }
                    let x: Vec<i32> = (0..n)
                        .map(|i| mono.x()[i] + gm.x()[i] - alpha[i])
                        .collect();
                    let v = (c * gc).scale(&BigRational::from_integer(num));
                    acc.entry(j + d - w)
                        .or_default()
                        .push((Mono::new(x, vec![0; n]), v));
                }
            }
        }
    }
    OTauElement {
        value: WSymbol::from_components(
            n,
            acc.into_iter().map(|(d, ts)| (d, Poly::from_terms(n, ts))),
            floor,
        ),
    }
}

/// Reduction of a t-independent E-symbol on the product with a line to a
/// W-symbol: the last base/fiber pair is `(t, tau)` and `xi = tau*u` is
/// substituted, sending a term of fiber degree `d` to tau-degree `d`.
pub fn e_to_w(p: &ESymbol) -> Result<WSymbol, WcalcError> {
    let n = p.n();
    assert!(n >= 2, "reduction needs the extra (t, tau) pair");
    let nw = n - 1;

    let mut acc: Vec<(i64, Poly)> = Vec::new();
    for comp in p.comps().values() {
        for (mono, c) in comp.terms() {
            if mono.x()[nw] != 0 {
                return Err(WcalcError::TDependent);
            }
            let d = mono.fiber_degree();
            if mono.f()[..nw].iter().any(|&e| e < 0) {
                return Err(WcalcError::NonReducible { degree: d });
            }
            let m = Mono::new(mono.x()[..nw].to_vec(), mono.f()[..nw].to_vec());
            acc.push((d, Poly::from_terms(nw, [(m, c.clone())])));
        }
    }
    Ok(WSymbol::from_components(nw, acc, p.floor()))
}

/// Star-inverse by central leading-term division plus a Neumann tail of
/// `depth` orders. Requires the leading component to be a nonzero constant;
/// the result carries floor `-order - depth`.
pub fn star_inverse(a: &WSymbol, depth: u32) -> Result<WSymbol, WcalcError> {
    let (m, lead) = a.principal().map_err(|_| WcalcError::NotInvertible {
        reason: "zero symbol".to_string(),
    })?;
    let c = lead
        .is_constant()
        .filter(|c| !c.is_zero())
        .ok_or_else(|| WcalcError::NotInvertible {
            reason: format!("leading component at degree {m} is not a nonzero constant"),
        })?;
    let c_inv = c.inverse().expect("nonzero scalar");
    let normalized = a.scale(&c_inv).shift(-m);
    let s = WSymbol::one(a.n()).sub(&normalized);
    if s.is_zero() && s.floor().is_none() {
        // Central monomial: exact inverse.
        return Ok(WSymbol::from_laurent(
            a.n(),
            &crate::scalars::LaurentScalar::monomial(-m, c_inv),
        ));
    }
    // The tail has order <= -1, so anything below the eventual floor can
    // never climb back above it; truncating each Neumann term keeps the
    // expansion bounded.
    let trunc = -(depth as i64);
    let mut acc = WSymbol::one(a.n());
    let mut term = WSymbol::one(a.n());
    for _ in 0..depth {
        term = star_w(&term, &s).truncate(trunc);
        acc = acc.add(&term);
        // Successive terms only have deeper floors, so an empty term ends it.
        if term.is_zero() {
            break;
        }
    }
    Ok(acc.scale(&c_inv).shift(-m).truncate(-m - depth as i64))
}

/// One step of a quantized transformation: either an exact affine lift or an
/// inner conjugation truncated to `depth` orders.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum AutStep {
    /// `x -> A x + b`, `u -> (A^T)^-1 u`; exact on symbols.
    Affine {
        a: Mat,
        b: Vec<Scalar>,
        a_inv_t: Mat,
    },
    /// `P -> g o P o g^{*-1}` (or the reverse when `inverted`); the inverse
    /// is computed once at construction.
    Inner {
        elem: WSymbol,
        elem_inv: WSymbol,
        depth: u32,
        inverted: bool,
    },
}

/// A word of primitive steps, applied left to right.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct WAutomorphism {
    n: usize,
    steps: Vec<AutStep>,
}

impl WAutomorphism {
    pub fn identity(n: usize) -> Self {
        WAutomorphism {
            n,
            steps: Vec::new(),
        }
    }

    /// The lift of the affine symplectic map `x -> A x + b`, `u -> (A^T)^-1 u`.
    pub fn affine(n: usize, a: Mat, b: Vec<Scalar>) -> Result<Self, WcalcError> {
        assert_eq!(a.rows(), n);
        assert_eq!(a.cols(), n);
        assert_eq!(b.len(), n);
        let a_inv_t = a
            .inverse()
            .ok_or_else(|| WcalcError::NotInvertible {
                reason: "affine matrix is singular".to_string(),
            })?
            .transpose();
        Ok(WAutomorphism {
            n,
            steps: vec![AutStep::Affine { a, b, a_inv_t }],
        })
    }

    /// Conjugation `Ad(g): P -> g o P o g^{*-1}`. Requires `g` to satisfy the
    /// star-invertibility invariant (nonzero constant leading component).
    pub fn inner(elem: WSymbol, depth: u32) -> Result<Self, WcalcError> {
        let n = elem.n();
        let elem_inv = star_inverse(&elem, depth)?;
        Ok(WAutomorphism {
            n,
            steps: vec![AutStep::Inner {
                elem,
                elem_inv,
                depth,
                inverted: false,
            }],
        })
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn steps(&self) -> &[AutStep] {
        &self.steps
    }

    /// The automorphism `P -> outer(inner(P))`.
    pub fn compose(outer: &Self, inner: &Self) -> Self {
        assert_eq!(outer.n, inner.n);
        let mut steps = inner.steps.clone();
        steps.extend(outer.steps.iter().cloned());
        WAutomorphism { n: outer.n, steps }
    }

    /// Exact inverse word: reversed steps, each primitive inverted.
    pub fn inverse(&self) -> Self {
        let steps = self
            .steps
            .iter()
            .rev()
            .map(|s| match s {
                AutStep::Affine { a, b, a_inv_t } => {
                    let a_inv = a_inv_t.transpose();
                    let neg_b: Vec<Scalar> = {
                        let bm = Mat::from_rows(b.iter().map(|c| vec![c.clone()]).collect());
                        let nb = a_inv.mul(&bm).neg();
                        (0..self.n).map(|i| nb[(i, 0)].clone()).collect()
                    };
                    AutStep::Affine {
                        a: a_inv,
                        b: neg_b,
                        a_inv_t: a.transpose(),
                    }
                }
                AutStep::Inner {
                    elem,
                    elem_inv,
                    depth,
                    inverted,
                } => AutStep::Inner {
                    elem: elem.clone(),
                    elem_inv: elem_inv.clone(),
                    depth: *depth,
                    inverted: !inverted,
                },
            })
            .collect();
        WAutomorphism { n: self.n, steps }
    }

    pub fn apply(&self, p: &WSymbol) -> WSymbol {
        assert_eq!(self.n, p.n(), "automorphism across different variable counts");
        self.apply_impl(p, None)
    }

    /// Like [`WAutomorphism::apply`], but sound only modulo `tau^{< floor}`:
    /// intermediates are truncated as tightly as the conjugators' orders
    /// allow, which keeps long words and deep inverses cheap.
    pub fn apply_mod(&self, p: &WSymbol, floor: i64) -> WSymbol {
        self.apply_impl(p, Some(floor))
    }

    fn apply_impl(&self, p: &WSymbol, floor: Option<i64>) -> WSymbol {
        assert_eq!(self.n, p.n(), "automorphism across different variable counts");
        let cut = |w: WSymbol, f: Option<i64>| match f {
            Some(fl) => w.truncate(fl),
            None => w,
        };
        let mut cur = cut(p.clone(), floor);
        for step in &self.steps {
            cur = match step {
                AutStep::Affine { a, b, a_inv_t } => WSymbol::from_components(
                    self.n,
                    cur.comps()
                        .iter()
                        .map(|(&j, comp)| (j, comp.substitute_linear(a, b, a_inv_t))),
                    cur.floor(),
                ),
                AutStep::Inner {
                    elem,
                    elem_inv,
                    inverted,
                    ..
                } => {
                    let (left, right) = if *inverted {
                        (elem_inv, elem)
                    } else {
                        (elem, elem_inv)
                    };
                    match floor {
                        // To know (left o cur o right) mod F, the
                        // intermediate is only needed mod F - order(right).
                        Some(f) => {
                            let mid_floor = f - right.order().unwrap_or(0);
                            let mid = star_w_mod(left, &cur, mid_floor);
                            star_w_mod(&mid, right, f)
                        }
                        None => star_w(&star_w(left, &cur), right),
                    }
                }
            };
        }
        cur
    }
}
