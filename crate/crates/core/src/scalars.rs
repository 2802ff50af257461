//! The coefficient field: Gaussian rationals and Laurent series in `tau`.
//!
//! A [`Scalar`] is an element of Q(i). A [`LaurentScalar`] is a series
//! `sum_{j <= m} a_j tau^j` with finitely many represented terms; it is either
//! exact (an element of Q(i)[tau, tau^-1]) or truncated below an explicit
//! floor, in which case all arithmetic is understood modulo `tau^{< floor}`.
//! Operations compute the tightest sound floor for their result.

use std::collections::BTreeMap;
use std::fmt;
use std::ops::{Add, Mul, Neg, Sub};

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Signed, Zero};
use thiserror::Error;

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum ScalarError {
    #[error("division by zero")]
    ZeroDivision,
    #[error("series floor {floor} does not reach degree {needed}")]
    InsufficientDepth { floor: i64, needed: i64 },
}

/// A Gaussian rational `re + im*i`, both parts arbitrary-precision rationals
/// stored in lowest terms with positive denominator.
#[derive(Debug, Clone, PartialEq, Eq, Hash, Default)]
pub struct Scalar {
    re: BigRational,
    im: BigRational,
}

impl Scalar {
    pub fn new(re: BigRational, im: BigRational) -> Self {
        Scalar { re, im }
    }

    pub fn from_int(n: i64) -> Self {
        Scalar::new(BigRational::from_integer(n.into()), BigRational::zero())
    }

    pub fn from_ratio(num: i64, den: i64) -> Self {
        assert!(den != 0, "zero denominator");
        Scalar::new(
            BigRational::new(num.into(), den.into()),
            BigRational::zero(),
        )
    }

    pub fn from_rational(re: BigRational) -> Self {
        Scalar::new(re, BigRational::zero())
    }

    /// The imaginary unit.
    pub fn i() -> Self {
        Scalar::new(BigRational::zero(), BigRational::one())
    }

    pub fn zero() -> Self {
        Scalar::default()
    }

    pub fn one() -> Self {
        Scalar::from_int(1)
    }

    pub fn re(&self) -> &BigRational {
        &self.re
    }

    pub fn im(&self) -> &BigRational {
        &self.im
    }

    pub fn is_zero(&self) -> bool {
        self.re.is_zero() && self.im.is_zero()
    }

    pub fn is_one(&self) -> bool {
        self.re.is_one() && self.im.is_zero()
    }

    pub fn is_real(&self) -> bool {
        self.im.is_zero()
    }

    /// Squared modulus `re^2 + im^2`, exact.
    pub fn abs_sq(&self) -> BigRational {
        &self.re * &self.re + &self.im * &self.im
    }

    pub fn conj(&self) -> Self {
        Scalar::new(self.re.clone(), -self.im.clone())
    }

    pub fn inverse(&self) -> Result<Self, ScalarError> {
        if self.is_zero() {
            return Err(ScalarError::ZeroDivision);
        }
        let d = self.abs_sq();
        Ok(Scalar::new(&self.re / &d, -&self.im / &d))
    }

    pub fn scale(&self, r: &BigRational) -> Self {
        Scalar::new(&self.re * r, &self.im * r)
    }
}

impl Add for &Scalar {
    type Output = Scalar;
    fn add(self, rhs: &Scalar) -> Scalar {
        Scalar::new(&self.re + &rhs.re, &self.im + &rhs.im)
    }
}

impl Sub for &Scalar {
    type Output = Scalar;
    fn sub(self, rhs: &Scalar) -> Scalar {
        Scalar::new(&self.re - &rhs.re, &self.im - &rhs.im)
    }
}

impl Mul for &Scalar {
    type Output = Scalar;
    fn mul(self, rhs: &Scalar) -> Scalar {
        Scalar::new(
            &self.re * &rhs.re - &self.im * &rhs.im,
            &self.re * &rhs.im + &self.im * &rhs.re,
        )
    }
}

impl Neg for &Scalar {
    type Output = Scalar;
    fn neg(self) -> Scalar {
        Scalar::new(-self.re.clone(), -self.im.clone())
    }
}

impl Add for Scalar {
    type Output = Scalar;
    fn add(self, rhs: Scalar) -> Scalar {
        &self + &rhs
    }
}

impl Sub for Scalar {
    type Output = Scalar;
    fn sub(self, rhs: Scalar) -> Scalar {
        &self - &rhs
    }
}

impl Mul for Scalar {
    type Output = Scalar;
    fn mul(self, rhs: Scalar) -> Scalar {
        &self * &rhs
    }
}

impl Neg for Scalar {
    type Output = Scalar;
    fn neg(self) -> Scalar {
        -&self
    }
}

/// Renders `p/q`, `r/s*i` or `p/q+r/s*i` with signs normalized and both parts
/// in lowest terms. The unit coefficients of `i` are suppressed: `i`, `-i`,
/// `1+i`, `2-1/3*i`.
impl fmt::Display for Scalar {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        fn imag_body(im: &BigRational) -> String {
            let a = im.abs();
            if a.is_one() {
                "i".to_string()
            } else {
                format!("{}*i", a)
            }
        }
        if self.im.is_zero() {
            write!(f, "{}", self.re)
        } else if self.re.is_zero() {
            let sign = if self.im.is_negative() { "-" } else { "" };
            write!(f, "{}{}", sign, imag_body(&self.im))
        } else {
            let sign = if self.im.is_negative() { "-" } else { "+" };
            write!(f, "{}{}{}", self.re, sign, imag_body(&self.im))
        }
    }
}

/// An element of the Laurent coefficient field: finitely many represented
/// terms `a_j tau^j`, exact when `floor` is `None`, otherwise understood
/// modulo `tau^{< floor}`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct LaurentScalar {
    coeffs: BTreeMap<i64, Scalar>,
    floor: Option<i64>,
}

impl LaurentScalar {
    pub fn zero() -> Self {
        LaurentScalar {
            coeffs: BTreeMap::new(),
            floor: None,
        }
    }

    pub fn one() -> Self {
        LaurentScalar::monomial(0, Scalar::one())
    }

    pub fn tau() -> Self {
        LaurentScalar::monomial(1, Scalar::one())
    }

    pub fn from_scalar(c: Scalar) -> Self {
        LaurentScalar::monomial(0, c)
    }

    pub fn monomial(degree: i64, c: Scalar) -> Self {
        let mut coeffs = BTreeMap::new();
        if !c.is_zero() {
            coeffs.insert(degree, c);
        }
        LaurentScalar {
            coeffs,
            floor: None,
        }
    }

    /// Builds a series from `(degree, coefficient)` pairs, dropping zeros and
    /// anything below the floor.
    pub fn from_terms<I: IntoIterator<Item = (i64, Scalar)>>(terms: I, floor: Option<i64>) -> Self {
        let mut coeffs: BTreeMap<i64, Scalar> = BTreeMap::new();
        for (j, c) in terms {
            if c.is_zero() {
                continue;
            }
            let entry = coeffs.entry(j).or_insert_with(Scalar::zero);
            *entry = &*entry + &c;
        }
        coeffs.retain(|_, c| !c.is_zero());
        let mut out = LaurentScalar { coeffs, floor };
        out.enforce_floor();
        out
    }

    fn enforce_floor(&mut self) {
        if let Some(n) = self.floor {
            self.coeffs.retain(|&j, _| j >= n);
        }
    }

    pub fn coeffs(&self) -> &BTreeMap<i64, Scalar> {
        &self.coeffs
    }

    pub fn floor(&self) -> Option<i64> {
        self.floor
    }

    pub fn is_truncated(&self) -> bool {
        self.floor.is_some()
    }

    /// True when no represented coefficient is nonzero. A truncated series
    /// with empty support is zero only modulo its floor.
    pub fn is_zero(&self) -> bool {
        self.coeffs.is_empty()
    }

    pub fn is_one(&self) -> bool {
        self.floor.is_none() && self.coeffs.len() == 1 && {
            let (j, c) = self.coeffs.iter().next().unwrap();
            *j == 0 && c.is_one()
        }
    }

    pub fn coeff(&self, degree: i64) -> Scalar {
        self.coeffs.get(&degree).cloned().unwrap_or_default()
    }

    /// Top represented degree with nonzero coefficient; `None` for zero.
    /// This is the order of the series in the filtration sense.
    pub fn order(&self) -> Option<i64> {
        self.coeffs.keys().next_back().copied()
    }

    /// Membership in the subring k_0 of elements of order <= 0.
    pub fn in_k0(&self) -> bool {
        self.in_k(0)
    }

    /// Membership in the filtration piece k(r) of elements of order <= r.
    pub fn in_k(&self, r: i64) -> bool {
        self.order().map_or(true, |m| m <= r)
    }

    /// Upper bound on the degree of any (represented or hidden) term:
    /// `None` means the series is exactly zero.
    fn degree_bound(&self) -> Option<i64> {
        match self.order() {
            Some(m) => Some(m),
            None => self.floor.map(|n| n - 1),
        }
    }

    /// Imposes a truncation floor, keeping the tighter of the two markers.
    pub fn truncate(&self, floor: i64) -> Self {
        let new_floor = Some(match self.floor {
            Some(f) => f.max(floor),
            None => floor,
        });
        let mut out = LaurentScalar {
            coeffs: self.coeffs.clone(),
            floor: new_floor,
        };
        out.enforce_floor();
        out
    }

    fn combined_add_floor(&self, rhs: &Self) -> Option<i64> {
        match (self.floor, rhs.floor) {
            (Some(a), Some(b)) => Some(a.max(b)),
            (Some(a), None) => Some(a),
            (None, Some(b)) => Some(b),
            (None, None) => None,
        }
    }

    fn mul_floor(&self, rhs: &Self) -> Option<i64> {
        let mut candidates = Vec::new();
        if let (Some(f), Some(b)) = (self.floor, rhs.degree_bound()) {
            candidates.push(f + b);
        }
        if let (Some(f), Some(b)) = (rhs.floor, self.degree_bound()) {
            candidates.push(f + b);
        }
        candidates.into_iter().max()
    }

    pub fn scale(&self, c: &Scalar) -> Self {
        if c.is_zero() {
            // Exact zero, but hidden low-degree terms stay hidden.
            return LaurentScalar {
                coeffs: BTreeMap::new(),
                floor: self.floor,
            };
        }
        LaurentScalar {
            coeffs: self.coeffs.iter().map(|(&j, a)| (j, a * c)).collect(),
            floor: self.floor,
        }
    }

    /// Multiplies by `tau^k`, shifting every degree (and the floor) by `k`.
    pub fn shift(&self, k: i64) -> Self {
        LaurentScalar {
            coeffs: self.coeffs.iter().map(|(&j, a)| (j + k, a.clone())).collect(),
            floor: self.floor.map(|n| n + k),
        }
    }

    /// The transposition `tau -> -tau`: negates odd-degree coefficients.
    /// An involutive ring automorphism of the field.
    pub fn transpose(&self) -> Self {
        LaurentScalar {
            coeffs: self
                .coeffs
                .iter()
                .map(|(&j, a)| (j, if j.rem_euclid(2) == 1 { -a } else { a.clone() }))
                .collect(),
            floor: self.floor,
        }
    }

    /// Inverse up to `depth` Neumann correction terms below the leading one.
    ///
    /// For an exact monomial the result is exact. Otherwise the result top
    /// degree is `-m` (`m` the order of `self`) and the result is trusted down
    /// to `min(-m, 0) - depth`, recorded in its floor.
    pub fn inverse(&self, depth: u32) -> Result<Self, ScalarError> {
        let m = self.order().ok_or(ScalarError::ZeroDivision)?;
        let lead = self.coeff(m);
        let lead_inv = lead.inverse()?;
        if self.coeffs.len() == 1 && self.floor.is_none() {
            return Ok(LaurentScalar::monomial(-m, lead_inv));
        }
        // self = lead * tau^m * (1 - s) with order(s) <= -1.
        let s = LaurentScalar {
            coeffs: self
                .coeffs
                .iter()
                .filter(|(&j, _)| j != m)
                .map(|(&j, c)| (j - m, -&(c * &lead_inv)))
                .collect(),
            floor: self.floor.map(|n| n - m),
        };
        // Enough terms that the product with self is 1 modulo tau^{< m - depth}.
        let kmax = depth as i64 + (-m).max(0);
        let mut acc = LaurentScalar::one();
        let mut term = LaurentScalar::one();
        for _ in 0..kmax {
            term = &term * &s;
            if term.is_zero() && term.floor.is_none() {
                break;
            }
            acc = &acc + &term;
        }
        let out = acc.scale(&lead_inv).shift(-m);
        Ok(out.truncate(-m - kmax))
    }

    /// Equality of all coefficients at degrees >= `degree`, ignoring anything
    /// hidden below either operand's floor.
    pub fn agrees_with(&self, rhs: &Self, degree: i64) -> bool {
        let mut cut = degree;
        if let Some(f) = self.floor {
            cut = cut.max(f);
        }
        if let Some(f) = rhs.floor {
            cut = cut.max(f);
        }
        let mine = self.coeffs.range(cut..);
        let theirs = rhs.coeffs.range(cut..);
        mine.clone().count() == theirs.clone().count() && mine.zip(theirs).all(|(a, b)| a == b)
    }

    /// Checks the factorial growth bound `|a_j|^2 <= (C^{-j} (-j)!)^2` for
    /// every represented degree `j` in `[-depth, 0]`. A diagnostic on a finite
    /// window, not a membership proof.
    pub fn growth_check(&self, c: &BigRational, depth: u32) -> Result<GrowthReport, ScalarError> {
        assert!(c.is_positive(), "growth constant must be positive");
        let needed = -(depth as i64);
        if let Some(f) = self.floor {
            if f > needed {
                return Err(ScalarError::InsufficientDepth { floor: f, needed });
            }
        }
        let mut factorial = BigRational::one();
        let mut c_pow = BigRational::one();
        for k in 0..=depth as i64 {
            if k > 0 {
                factorial *= BigRational::from_integer(BigInt::from(k));
                c_pow *= c;
            }
            let bound = &c_pow * &factorial;
            let allowed_sq = &bound * &bound;
            let abs_sq = self.coeff(-k).abs_sq();
            if abs_sq > allowed_sq {
                return Ok(GrowthReport {
                    passed: false,
                    first_failure: Some(GrowthFailure {
                        degree: -k,
                        abs_sq,
                        allowed_sq,
                    }),
                    window: needed,
                });
            }
        }
        Ok(GrowthReport {
            passed: true,
            first_failure: None,
            window: needed,
        })
    }

    /// Rational lower bound on the least admissible growth constant over the
    /// window `[-depth, 0]`, bisected `iters` times. `None` when no constant
    /// can work (the degree-0 bound `|a_0| <= 1` is constant-free).
    pub fn minimal_growth_constant(
        &self,
        depth: u32,
        iters: u32,
    ) -> Result<Option<BigRational>, ScalarError> {
        let needed = -(depth as i64);
        if let Some(f) = self.floor {
            if f > needed {
                return Err(ScalarError::InsufficientDepth { floor: f, needed });
            }
        }
        if self.coeff(0).abs_sq() > BigRational::one() {
            return Ok(None);
        }
        if (1..=depth as i64).all(|k| self.coeff(-k).is_zero()) {
            return Ok(Some(BigRational::zero()));
        }
        let admissible = |c: &BigRational| -> bool {
            self.growth_check(c, depth).map(|r| r.passed).unwrap_or(false)
        };
        let two = BigRational::from_integer(2.into());
        let mut hi = BigRational::one();
        while !admissible(&hi) {
            hi *= &two;
        }
        let mut lo = BigRational::zero();
        for _ in 0..iters {
            let mid = (&lo + &hi) / &two;
            if mid.is_positive() && admissible(&mid) {
                hi = mid;
            } else {
                lo = mid;
            }
        }
        Ok(Some(lo))
    }
}

/// Outcome of [`LaurentScalar::growth_check`]: scanning from degree 0
/// downward, `first_failure` is the first degree violating the bound.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct GrowthReport {
    pub passed: bool,
    pub first_failure: Option<GrowthFailure>,
    /// Lowest degree covered by the scan.
    pub window: i64,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct GrowthFailure {
    pub degree: i64,
    pub abs_sq: BigRational,
    pub allowed_sq: BigRational,
}

impl Add for &LaurentScalar {
    type Output = LaurentScalar;
    fn add(self, rhs: &LaurentScalar) -> LaurentScalar {
        let floor = self.combined_add_floor(rhs);
        LaurentScalar::from_terms(
            self.coeffs
                .iter()
                .chain(rhs.coeffs.iter())
                .map(|(&j, c)| (j, c.clone())),
            floor,
        )
    }
}

impl Sub for &LaurentScalar {
    type Output = LaurentScalar;
    fn sub(self, rhs: &LaurentScalar) -> LaurentScalar {
        self + &(-rhs)
    }
}

impl Neg for &LaurentScalar {
    type Output = LaurentScalar;
    fn neg(self) -> LaurentScalar {
        LaurentScalar {
            coeffs: self.coeffs.iter().map(|(&j, c)| (j, -c)).collect(),
            floor: self.floor,
        }
    }
}

impl Mul for &LaurentScalar {
    type Output = LaurentScalar;
    fn mul(self, rhs: &LaurentScalar) -> LaurentScalar {
        let floor = self.mul_floor(rhs);
        LaurentScalar::from_terms(
            self.coeffs.iter().flat_map(|(&j, a)| {
                rhs.coeffs.iter().map(move |(&k, b)| (j + k, a * b))
            }),
            floor,
        )
    }
}

impl Add for LaurentScalar {
    type Output = LaurentScalar;
    fn add(self, rhs: LaurentScalar) -> LaurentScalar {
        &self + &rhs
    }
}

impl Sub for LaurentScalar {
    type Output = LaurentScalar;
    fn sub(self, rhs: LaurentScalar) -> LaurentScalar {
        &self - &rhs
    }
}

impl Mul for LaurentScalar {
    type Output = LaurentScalar;
    fn mul(self, rhs: LaurentScalar) -> LaurentScalar {
        &self * &rhs
    }
}

impl Neg for LaurentScalar {
    type Output = LaurentScalar;
    fn neg(self) -> LaurentScalar {
        -&self
    }
}

/// Renders degree-descending, e.g. `3*tau^2 + 1 - 1/2*tau^-1`, with a
/// `(floor: N)` suffix when truncated.
impl fmt::Display for LaurentScalar {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.coeffs.is_empty() {
            write!(f, "0")?;
        } else {
            for (idx, (&j, c)) in self.coeffs.iter().rev().enumerate() {
                let (sign, body) = signed_coeff_body(c);
                if idx == 0 {
                    if sign {
                        write!(f, "-")?;
                    }
                } else {
                    write!(f, " {} ", if sign { "-" } else { "+" })?;
                }
                let tau = tau_power(j);
                match (body.is_empty(), tau.is_empty()) {
                    (true, true) => write!(f, "1")?,
                    (true, false) => write!(f, "{}", tau)?,
                    (false, true) => write!(f, "{}", body)?,
                    (false, false) => write!(f, "{}*{}", body, tau)?,
                }
            }
        }
        if let Some(n) = self.floor {
            write!(f, " (floor: {})", n)?;
        }
        Ok(())
    }
}

/// Splits a coefficient into a pulled-out sign and a factor body; an empty
/// body stands for 1. Non-real coefficients are parenthesized whole.
pub(crate) fn signed_coeff_body(c: &Scalar) -> (bool, String) {
    if c.is_real() {
        let neg = c.re().is_negative();
        let a = c.re().abs();
        if a.is_one() {
            (neg, String::new())
        } else {
            (neg, format!("{}", a))
        }
    } else if c.re().is_zero() {
        let neg = c.im().is_negative();
        let a = c.im().abs();
        if a.is_one() {
            (neg, "i".to_string())
        } else {
            (neg, format!("{}*i", a))
        }
    } else {
        (false, format!("({})", c))
    }
}

pub(crate) fn tau_power(j: i64) -> String {
    match j {
        0 => String::new(),
        1 => "tau".to_string(),
        _ => format!("tau^{}", j),
    }
}
