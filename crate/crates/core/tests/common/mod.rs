//! Deterministic random generators shared by the integration suites.

#![allow(dead_code)]

use std::collections::BTreeMap;

use num_rational::BigRational;
use rand::Rng;
use rand_chacha::ChaCha8Rng;

use wstar::cech::Nerve;
use wstar::lagrange::{symplectic_from_factors, LinearLagrangian, SpFactor, SymplecticSpace};
use wstar::linalg::Mat;
use wstar::scalars::{LaurentScalar, Scalar};
use wstar::symbols::{ESymbol, Mono, Poly, WSymbol};
use wstar::wcalc::OTauElement;

pub fn rand_rational(rng: &mut ChaCha8Rng) -> BigRational {
    BigRational::new(
        rng.gen_range(-6i64..=6).into(),
        rng.gen_range(1i64..=4).into(),
    )
}

pub fn rand_scalar(rng: &mut ChaCha8Rng) -> Scalar {
    let re = rand_rational(rng);
    let im = if rng.gen_bool(0.25) {
        rand_rational(rng)
    } else {
        BigRational::from_integer(0.into())
    };
    Scalar::new(re, im)
}

pub fn rand_nonzero_scalar(rng: &mut ChaCha8Rng) -> Scalar {
    loop {
        let s = rand_scalar(rng);
        if !s.is_zero() {
            return s;
        }
    }
}

pub fn rand_laurent(rng: &mut ChaCha8Rng, max_terms: usize) -> LaurentScalar {
    let nterms = rng.gen_range(0..=max_terms);
    LaurentScalar::from_terms(
        (0..nterms).map(|_| (rng.gen_range(-3..=3), rand_scalar(rng))),
        None,
    )
}

/// Shape limits for random symbols.
#[derive(Clone, Copy)]
pub struct SymbolShape {
    pub n: usize,
    pub max_var_deg: i32,
    pub tau_lo: i64,
    pub tau_hi: i64,
    pub max_terms: usize,
}

impl SymbolShape {
    pub fn small(n: usize) -> Self {
        SymbolShape {
            n,
            max_var_deg: 4,
            tau_lo: -3,
            tau_hi: 3,
            max_terms: 4,
        }
    }
}

pub fn rand_wsymbol(rng: &mut ChaCha8Rng, shape: SymbolShape) -> WSymbol {
    let nterms = rng.gen_range(1..=shape.max_terms);
    let mut comps: Vec<(i64, Poly)> = Vec::new();
    for _ in 0..nterms {
        let x: Vec<i32> = (0..shape.n)
            .map(|_| rng.gen_range(0..=shape.max_var_deg))
            .collect();
        let f: Vec<i32> = (0..shape.n)
            .map(|_| rng.gen_range(0..=shape.max_var_deg))
            .collect();
        let j = rng.gen_range(shape.tau_lo..=shape.tau_hi);
        comps.push((
            j,
            Poly::from_terms(shape.n, [(Mono::new(x, f), rand_scalar(rng))]),
        ));
    }
    WSymbol::from_components(shape.n, comps, None)
}

/// Random homogeneous E-symbol: every term's fiber degree matches its
/// component index by construction.
pub fn rand_esymbol(rng: &mut ChaCha8Rng, shape: SymbolShape) -> ESymbol {
    let nterms = rng.gen_range(1..=shape.max_terms);
    let mut terms: Vec<(Mono, Scalar)> = Vec::new();
    for _ in 0..nterms {
        let x: Vec<i32> = (0..shape.n)
            .map(|_| rng.gen_range(0..=shape.max_var_deg))
            .collect();
        let f: Vec<i32> = (0..shape.n)
            .map(|_| rng.gen_range(-shape.max_var_deg..=shape.max_var_deg))
            .collect();
        terms.push((Mono::new(x, f), rand_scalar(rng)));
    }
    ESymbol::from_poly(Poly::from_terms(shape.n, terms))
}

/// Random t-independent E-symbol on the product with a line (last pair is
/// `(t, tau)`), reducible to a W-symbol: nonnegative fiber exponents except
/// on the tau slot.
pub fn rand_esymbol_xc(rng: &mut ChaCha8Rng, n_base: usize, shape: SymbolShape) -> ESymbol {
    let n = n_base + 1;
    let nterms = rng.gen_range(1..=shape.max_terms);
    let mut terms: Vec<(Mono, Scalar)> = Vec::new();
    for _ in 0..nterms {
        let mut x: Vec<i32> = (0..n)
            .map(|_| rng.gen_range(0..=shape.max_var_deg))
            .collect();
        x[n - 1] = 0;
        let mut f: Vec<i32> = (0..n)
            .map(|_| rng.gen_range(0..=shape.max_var_deg))
            .collect();
        f[n - 1] = rng.gen_range(-shape.max_var_deg..=shape.max_var_deg);
        terms.push((Mono::new(x, f), rand_scalar(rng)));
    }
    ESymbol::from_poly(Poly::from_terms(n, terms))
}

pub fn rand_otau(rng: &mut ChaCha8Rng, shape: SymbolShape) -> OTauElement {
    let nterms = rng.gen_range(1..=shape.max_terms);
    let mut comps: Vec<(i64, Poly)> = Vec::new();
    for _ in 0..nterms {
        let x: Vec<i32> = (0..shape.n)
            .map(|_| rng.gen_range(0..=shape.max_var_deg))
            .collect();
        comps.push((
            rng.gen_range(shape.tau_lo..=shape.tau_hi),
            Poly::from_terms(shape.n, [(Mono::new(x, vec![0; shape.n]), rand_scalar(rng))]),
        ));
    }
    OTauElement::new(WSymbol::from_components(shape.n, comps, None)).unwrap()
}

/// Random symbol of order <= 0 (for exponentials and resolvents).
pub fn rand_order0_wsymbol(rng: &mut ChaCha8Rng, shape: SymbolShape) -> WSymbol {
    let mut shape0 = shape;
    shape0.tau_hi = 0;
    shape0.max_var_deg = shape.max_var_deg.min(2);
    rand_wsymbol(rng, shape0)
}

/// Random star-invertible section `c + (tail below degree 0)` with a single
/// low-degree variable in the tail, as used by the descent generators.
pub fn rand_invertible_section(rng: &mut ChaCha8Rng, n: usize) -> WSymbol {
    let lead = Scalar::from_int(*[1, 1, 2, -1].get(rng.gen_range(0..4)).unwrap());
    let mut w = WSymbol::from_poly(n, 0, Poly::constant(n, lead));
    let tails = rng.gen_range(1..=2);
    for _ in 0..tails {
        let var = rng.gen_range(0..n);
        let deg = rng.gen_range(1..=2);
        let poly = if rng.gen_bool(0.5) {
            Poly::var_x(n, var).pow(deg)
        } else {
            Poly::var_f(n, var).pow(deg)
        };
        let c = rand_nonzero_scalar(rng);
        w = w.add(&WSymbol::from_poly(
            n,
            -rng.gen_range(1..=2),
            poly.scale(&c),
        ));
    }
    w
}

pub fn rand_invertible_map(rng: &mut ChaCha8Rng, nerve: &Nerve, n: usize) -> BTreeMap<[usize; 2], WSymbol> {
    nerve
        .pairs()
        .iter()
        .map(|&p| (p, rand_invertible_section(rng, n)))
        .collect()
}

fn rand_symmetric(rng: &mut ChaCha8Rng, n: usize) -> Mat {
    let mut m = Mat::zeros(n, n);
    for i in 0..n {
        for j in i..n {
            let v = Scalar::from_int(rng.gen_range(-3..=3));
            m[(i, j)] = v.clone();
            m[(j, i)] = v;
        }
    }
    m
}

fn rand_invertible_mat(rng: &mut ChaCha8Rng, n: usize) -> Mat {
    loop {
        let rows: Vec<Vec<Scalar>> = (0..n)
            .map(|_| {
                (0..n)
                    .map(|_| Scalar::from_int(rng.gen_range(-2..=2)))
                    .collect()
            })
            .collect();
        let m = Mat::from_rows(rows);
        if m.inverse().is_some() {
            return m;
        }
    }
}

/// Random symplectic matrix for the standard form, as a short word of exact
/// generators.
pub fn rand_symplectic(rng: &mut ChaCha8Rng, n: usize) -> Mat {
    let len = rng.gen_range(1..=3);
    let factors: Vec<SpFactor> = (0..len)
        .map(|_| match rng.gen_range(0..3) {
            0 => SpFactor::UpperShear(rand_symmetric(rng, n)),
            1 => SpFactor::LowerShear(rand_symmetric(rng, n)),
            _ => SpFactor::Block(rand_invertible_mat(rng, n)),
        })
        .collect();
    symplectic_from_factors(n, &factors)
}

/// Random Lagrangian: the graph of a symmetric matrix over the horizontal
/// distribution, moved by a random symplectic map.
pub fn rand_lagrangian(rng: &mut ChaCha8Rng, space: &SymplecticSpace) -> LinearLagrangian {
    let n = space.n();
    let s = rand_symmetric(rng, n);
    let basis = Mat::from_fn(2 * n, n, |i, j| {
        if i < n {
            if i == j {
                Scalar::one()
            } else {
                Scalar::zero()
            }
        } else {
            s[(i - n, j)].clone()
        }
    });
    let m = rand_symplectic(rng, n);
    LinearLagrangian::new(space.clone(), m.mul(&basis)).expect("construction preserves isotropy")
}
