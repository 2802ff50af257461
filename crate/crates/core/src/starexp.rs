//! Star powers, star-exponentials, resolvents and the Laplace correspondence.
//!
//! For a symbol `P` of order at most zero, `exp(t tau P)` lives in an
//! extension of the symbol algebra by a central parameter `t`; it is
//! represented here by its t-coefficients `tau^d P^{od} / d!` up to a caller
//! supplied depth. Dually, `1/(s - P)` is the principal part
//! `sum_k P^{ok} s^{-k-1}` at `s = infinity`, and the Laplace rule
//! `s^{-d-1} <-> (t tau)^d / d!` maps one onto the other degree by degree.

use std::collections::BTreeMap;
use std::fmt;

use num_rational::BigRational;
use num_traits::One;
use thiserror::Error;

use crate::scalars::Scalar;
use crate::symbols::WSymbol;
use crate::wcalc::star_w;

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum StarExpError {
    #[error("symbol has order {order} > 0")]
    OrderTooHigh { order: i64 },
}

/// A polynomial in the central parameter `t` with W-symbol coefficients,
/// represented up to t-degree `t_depth`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct TWElement {
    n: usize,
    coeffs: BTreeMap<u32, WSymbol>,
    t_depth: u32,
}

impl TWElement {
    pub fn new(n: usize, coeffs: BTreeMap<u32, WSymbol>, t_depth: u32) -> Self {
        let mut map = BTreeMap::new();
        for (d, w) in coeffs {
            assert_eq!(w.n(), n, "coefficient arity mismatch");
            if d <= t_depth && !w.is_zero() {
                map.insert(d, w);
            }
        }
        TWElement {
            n,
            coeffs: map,
            t_depth,
        }
    }

    /// The monomorphism from the symbol algebra: a t-free element.
    pub fn iota(p: WSymbol, t_depth: u32) -> Self {
        let n = p.n();
        TWElement::new(n, BTreeMap::from([(0, p)]), t_depth)
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn t_depth(&self) -> u32 {
        self.t_depth
    }

    pub fn coeffs(&self) -> &BTreeMap<u32, WSymbol> {
        &self.coeffs
    }

    pub fn coeff(&self, d: u32) -> WSymbol {
        self.coeffs
            .get(&d)
            .cloned()
            .unwrap_or_else(|| WSymbol::zero(self.n))
    }
}

/// A principal part at `s = infinity`: `coeffs[k]` is the W-symbol
/// coefficient of `s^{-k-1}`, represented for `k <= s_depth`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct SSeries {
    n: usize,
    coeffs: BTreeMap<u32, WSymbol>,
    s_depth: u32,
}

impl SSeries {
    pub fn new(n: usize, coeffs: BTreeMap<u32, WSymbol>, s_depth: u32) -> Self {
        let mut map = BTreeMap::new();
        for (k, w) in coeffs {
            assert_eq!(w.n(), n, "coefficient arity mismatch");
            if k <= s_depth && !w.is_zero() {
                map.insert(k, w);
            }
        }
        SSeries {
            n,
            coeffs: map,
            s_depth,
        }
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn s_depth(&self) -> u32 {
        self.s_depth
    }

    pub fn coeffs(&self) -> &BTreeMap<u32, WSymbol> {
        &self.coeffs
    }

    pub fn coeff(&self, k: u32) -> WSymbol {
        self.coeffs
            .get(&k)
            .cloned()
            .unwrap_or_else(|| WSymbol::zero(self.n))
    }
}

/// `P^{ok}` with `P^{o0} = 1`, exact.
pub fn star_power(p: &WSymbol, k: u32) -> WSymbol {
    let mut acc = WSymbol::one(p.n());
    for _ in 0..k {
        acc = star_w(&acc, p);
    }
    acc
}

/// `exp(t tau P) = sum_d (t tau P)^d / d!` up to t-degree `t_depth`.
/// Each coefficient `tau^d P^{od} / d!` stays of order <= 0.
pub fn star_exp(p: &WSymbol, t_depth: u32) -> Result<TWElement, StarExpError> {
    if let Some(m) = p.order() {
        if m > 0 {
            return Err(StarExpError::OrderTooHigh { order: m });
        }
    }
    let mut coeffs = BTreeMap::new();
    let mut power = WSymbol::one(p.n());
    let mut fact = BigRational::one();
    for d in 0..=t_depth {
        if d > 0 {
            power = star_w(&power, p);
            fact *= BigRational::from_integer(d.into());
        }
        let c = power
            .shift(d as i64)
            .scale(&Scalar::from_rational(fact.recip()));
        coeffs.insert(d, c);
    }
    Ok(TWElement::new(p.n(), coeffs, t_depth))
}

/// Principal part of `1/(s - P)` at `s = infinity`: `coeffs[k] = P^{ok}`.
pub fn resolvent(p: &WSymbol, s_depth: u32) -> Result<SSeries, StarExpError> {
    if let Some(m) = p.order() {
        if m > 0 {
            return Err(StarExpError::OrderTooHigh { order: m });
        }
    }
    let mut coeffs = BTreeMap::new();
    let mut power = WSymbol::one(p.n());
    for k in 0..=s_depth {
        if k > 0 {
            power = star_w(&power, p);
        }
        coeffs.insert(k, power.clone());
    }
    Ok(SSeries::new(p.n(), coeffs, s_depth))
}

/// The Laplace correspondence `s^{-d-1} <-> (t tau)^d / d!`, degree by degree
/// on the represented window.
pub fn laplace(f: &SSeries) -> TWElement {
    let mut coeffs = BTreeMap::new();
    let mut fact = BigRational::one();
    for d in 0..=f.s_depth() {
        if d > 0 {
            fact *= BigRational::from_integer(d.into());
        }
        let c = f
            .coeff(d)
            .shift(d as i64)
            .scale(&Scalar::from_rational(fact.recip()));
        if !c.is_zero() {
            coeffs.insert(d, c);
        }
    }
    TWElement::new(f.n(), coeffs, f.s_depth())
}

/// Evaluation at `t = 0`; the retraction with `res o iota = id`.
pub fn res(f: &TWElement) -> WSymbol {
    f.coeff(0)
}

/// Splits a W-symbol coefficient into a sign and a factor body for use in a
/// parameter series term; single-monomial exact coefficients are inlined,
/// everything else is parenthesized.
fn coeff_body(c: &WSymbol) -> (bool, String) {
    let nterms: usize = c.comps().values().map(|p| p.terms().len()).sum();
    let rendered = c.to_string();
    if nterms == 1 && c.floor().is_none() {
        match rendered.strip_prefix('-') {
            Some(rest) => (true, rest.to_string()),
            None => (false, rendered),
        }
    } else {
        (false, format!("({})", rendered))
    }
}

fn fmt_param_series(
    f: &mut fmt::Formatter<'_>,
    coeffs: &BTreeMap<u32, WSymbol>,
    power_of: impl Fn(u32) -> String,
) -> fmt::Result {
    if coeffs.is_empty() {
        return write!(f, "0");
    }
    for (idx, (&d, c)) in coeffs.iter().enumerate() {
        let (sign, base) = coeff_body(c);
        let power = power_of(d);
        let body = if power.is_empty() {
            base
        } else if base == "1" {
            power
        } else {
            format!("{}*{}", base, power)
        };
        if idx == 0 {
            if sign {
                write!(f, "-")?;
            }
        } else {
            write!(f, " {} ", if sign { "-" } else { "+" })?;
        }
        write!(f, "{}", body)?;
    }
    Ok(())
}

/// Renders t-degree ascending: `1 + t + 1/2*t^2 + 1/6*t^3`.
impl fmt::Display for TWElement {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        fmt_param_series(f, &self.coeffs, |d| match d {
            0 => String::new(),
            1 => "t".to_string(),
            _ => format!("t^{}", d),
        })
    }
}

/// Renders s-exponent ascending: `s^-1 + x1*s^-2 + ...`.
impl fmt::Display for SSeries {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        fmt_param_series(f, &self.coeffs, |k| format!("s^{}", -(k as i64) - 1))
    }
}
