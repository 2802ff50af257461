//! Acceptance suite: one test per criterion, exact (zero-tolerance)
//! arithmetic throughout. Run with `cargo test --test acceptance`; each
//! criterion prints one `ACCEPTANCE <k>: PASS` line (visible with
//! `-- --nocapture`), and a failed assertion marks the criterion FAILED.

mod common;

use std::collections::BTreeMap;

use num_bigint::BigInt;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use common::*;
use wstar::cech::{
    ad_generated_descent, check_cocycle2, check_descent, check_glue, coboundary1,
    coboundary_solve, transport_glue, AbelianGroup, Cochain1, Cochain2, DescentDatum,
    GroupFactor, Nerve, SolveOutcome,
};
use wstar::lagrange::{is_lagrangian, Correspondence, SymplecticSpace};
use wstar::linalg::Mat;
use wstar::scalars::Scalar;
use wstar::starexp::{laplace, resolvent, star_exp, star_power};
use wstar::symbols::WSymbol;
use wstar::wcalc::{
    apply_otau, commutator, e_to_w, star_e, star_w, transpose_e, transpose_w, WAutomorphism,
};

fn pass(k: u32, what: &str) {
    println!("ACCEPTANCE {k}: PASS - {what}");
}

#[test]
fn criterion_01_associativity() {
    let mut rng = ChaCha8Rng::seed_from_u64(101);
    for _ in 0..1000 {
        let n = rng.gen_range(1..=3);
        let shape = SymbolShape::small(n);
        let p = rand_wsymbol(&mut rng, shape);
        let q = rand_wsymbol(&mut rng, shape);
        let r = rand_wsymbol(&mut rng, shape);
        assert_eq!(
            star_w(&star_w(&p, &q), &r),
            star_w(&p, &star_w(&q, &r)),
            "W associativity failed for p={p}, q={q}, r={r}"
        );
    }
    for _ in 0..500 {
        let n = rng.gen_range(1..=3);
        let shape = SymbolShape::small(n);
        let p = rand_esymbol(&mut rng, shape);
        let q = rand_esymbol(&mut rng, shape);
        let r = rand_esymbol(&mut rng, shape);
        let lhs = star_e(&star_e(&p, &q), &r);
        let rhs = star_e(&p, &star_e(&q, &r));
        assert_eq!(lhs, rhs, "E associativity failed for p={p}, q={q}, r={r}");
        assert!(lhs.homogeneity_check().is_ok());
    }
    pass(1, "1000 W and 500 E random triples associate exactly");
}

#[test]
fn criterion_02_heisenberg() {
    for n in 1..=4usize {
        for i in 0..n {
            for j in 0..n {
                let c = commutator(&WSymbol::var_u(n, i), &WSymbol::var_x(n, j));
                if i == j {
                    let expected = WSymbol::from_laurent(
                        n,
                        &wstar::scalars::LaurentScalar::monomial(-1, Scalar::one()),
                    );
                    assert_eq!(c, expected);
                } else {
                    assert!(c.is_zero());
                }
                assert!(commutator(&WSymbol::var_x(n, i), &WSymbol::var_x(n, j)).is_zero());
                assert!(commutator(&WSymbol::var_u(n, i), &WSymbol::var_u(n, j)).is_zero());
            }
        }
    }
    pass(2, "[u_i, x_j] = delta_ij tau^-1 for all i, j, n <= 4");
}

#[test]
fn criterion_03_anti_automorphism() {
    let mut rng = ChaCha8Rng::seed_from_u64(103);
    for _ in 0..1000 {
        let n = rng.gen_range(1..=3);
        let shape = SymbolShape::small(n);
        let p = rand_wsymbol(&mut rng, shape);
        let q = rand_wsymbol(&mut rng, shape);
        assert_eq!(transpose_w(&transpose_w(&p)), p, "W involution failed");
        assert_eq!(
            transpose_w(&star_w(&p, &q)),
            star_w(&transpose_w(&q), &transpose_w(&p)),
            "W anti-automorphism failed for p={p}, q={q}"
        );
    }
    for _ in 0..1000 {
        let n = rng.gen_range(1..=3);
        let shape = SymbolShape::small(n);
        let p = rand_esymbol(&mut rng, shape);
        let q = rand_esymbol(&mut rng, shape);
        assert_eq!(transpose_e(&transpose_e(&p)), p, "E involution failed");
        assert_eq!(
            transpose_e(&star_e(&p, &q)),
            star_e(&transpose_e(&q), &transpose_e(&p)),
            "E anti-automorphism failed for p={p}, q={q}"
        );
    }
    pass(3, "transpositions are involutive anti-automorphisms on 1000 pairs each");
}

#[test]
fn criterion_04_module_axiom() {
    let mut rng = ChaCha8Rng::seed_from_u64(104);
    for _ in 0..1000 {
        let n = rng.gen_range(1..=3);
        let shape = SymbolShape::small(n);
        let p = rand_wsymbol(&mut rng, shape);
        let q = rand_wsymbol(&mut rng, shape);
        let f = rand_otau(&mut rng, shape);
        assert_eq!(
            apply_otau(&star_w(&p, &q), &f),
            apply_otau(&p, &apply_otau(&q, &f)),
            "module axiom failed for p={p}, q={q}, f={f}"
        );
    }
    pass(4, "(P o Q) . f = P . (Q . f) on 1000 random actions");
}

#[test]
fn criterion_05_rho_homomorphism() {
    let mut rng = ChaCha8Rng::seed_from_u64(105);
    for _ in 0..500 {
        let n_base = rng.gen_range(1..=2);
        let shape = SymbolShape {
            n: n_base + 1,
            max_var_deg: 3,
            tau_lo: -3,
            tau_hi: 3,
            max_terms: 3,
        };
        let p = rand_esymbol_xc(&mut rng, n_base, shape);
        let q = rand_esymbol_xc(&mut rng, n_base, shape);
        let lhs = e_to_w(&star_e(&p, &q)).expect("products of reducible symbols reduce");
        let rhs = star_w(&e_to_w(&p).unwrap(), &e_to_w(&q).unwrap());
        assert_eq!(lhs, rhs, "rho failed for p={p}, q={q}");
    }
    pass(5, "e_to_w intertwines the E and W products on 500 pairs");
}

#[test]
fn criterion_06_principal_symbol() {
    let mut rng = ChaCha8Rng::seed_from_u64(106);
    let mut checked = 0;
    while checked < 500 {
        let n = rng.gen_range(1..=3);
        let shape = SymbolShape::small(n);
        let p = rand_wsymbol(&mut rng, shape);
        let q = rand_wsymbol(&mut rng, shape);
        let (mp, lp) = p.principal().unwrap();
        let (mq, lq) = q.principal().unwrap();
        let lead_product = lp.mul(lq);
        if lead_product.is_zero() {
            continue; // cancelling leading terms are excluded by the criterion
        }
        checked += 1;
        let prod = star_w(&p, &q);
        let (m, lead) = prod.principal().unwrap();
        assert_eq!(m, mp + mq, "order not additive for p={p}, q={q}");
        assert_eq!(*lead, lead_product, "leading term not multiplicative");
    }
    pass(6, "order and principal symbol multiply on 500 non-cancelling pairs");
}

#[test]
fn criterion_07_exponential_suite() {
    let mut rng = ChaCha8Rng::seed_from_u64(107);
    let depth = 6u32;
    for _ in 0..100 {
        let n = rng.gen_range(1..=2);
        let shape = SymbolShape {
            n,
            max_var_deg: 2,
            tau_lo: -2,
            tau_hi: 0,
            max_terms: 2,
        };
        let p = rand_order0_wsymbol(&mut rng, shape);
        let e = star_exp(&p, depth).expect("order <= 0 by construction");

        // Group law: coefficient of t^a t'^b on both sides, total degree <= depth.
        for a in 0..=depth {
            for b in 0..=(depth - a) {
                let lhs = star_w(&e.coeff(a), &e.coeff(b));
                let mut fact = num_rational::BigRational::from_integer(1.into());
                for k in 2..=a {
                    fact *= num_rational::BigRational::from_integer(k.into());
                }
                for k in 2..=b {
                    fact *= num_rational::BigRational::from_integer(k.into());
                }
                let rhs = star_power(&p, a + b)
                    .shift((a + b) as i64)
                    .scale(&Scalar::from_rational(fact.recip()));
                assert_eq!(lhs, rhs, "group law failed for {p} at ({a},{b})");
            }
        }

        // Derivative law: (d+1) c_{d+1} = tau P o c_d.
        let taup = p.shift(1);
        for d in 0..depth {
            assert_eq!(
                e.coeff(d + 1).scale(&Scalar::from_int((d + 1) as i64)),
                star_w(&taup, &e.coeff(d)),
                "derivative law failed for {p} at degree {d}"
            );
        }

        // Laplace of the resolvent is the star exponential.
        assert_eq!(
            laplace(&resolvent(&p, depth).unwrap()),
            e,
            "laplace(resolvent) != star_exp for {p}"
        );
    }
    pass(7, "group law, derivative law and Laplace correspondence at depth 6 on 100 symbols");
}

/// All Z/2-valued 2-cochains on the nerve, as exponent assignments.
fn enumerate_z2_cochains(nerve: &Nerve, group: &AbelianGroup) -> Vec<Cochain2> {
    let triples: Vec<[usize; 3]> = nerve.triples().iter().copied().collect();
    let count = 1usize << triples.len();
    (0..count)
        .map(|bits| Cochain2 {
            values: triples
                .iter()
                .enumerate()
                .map(|(i, &t)| {
                    (
                        t,
                        group
                            .element(vec![BigInt::from((bits >> i) & 1)])
                            .unwrap(),
                    )
                })
                .collect(),
        })
        .collect()
}

/// Brute-force solvability of `delta b = c` over Z/2.
fn brute_force_coboundary(nerve: &Nerve, group: &AbelianGroup, c: &Cochain2) -> bool {
    let pairs: Vec<[usize; 2]> = nerve.pairs().iter().copied().collect();
    let count = 1usize << pairs.len();
    for bits in 0..count {
        let b = Cochain1 {
            values: pairs
                .iter()
                .enumerate()
                .map(|(i, &p)| {
                    (
                        p,
                        group
                            .element(vec![BigInt::from((bits >> i) & 1)])
                            .unwrap(),
                    )
                })
                .collect(),
        };
        if &coboundary1(nerve, group, &b).unwrap() == c {
            return true;
        }
    }
    false
}

#[test]
fn criterion_08_cech_suite() {
    let mut rng = ChaCha8Rng::seed_from_u64(108);

    // delta delta = 0 on 500 random 1-cochains for each coefficient group.
    for factors in [
        vec![GroupFactor::Cyclic(2)],
        vec![GroupFactor::Cyclic(3)],
        vec![GroupFactor::Z],
    ] {
        let group = AbelianGroup::new(factors);
        for _ in 0..500 {
            let nerve = if rng.gen_bool(0.5) {
                Nerve::full_simplex(rng.gen_range(4..=5))
            } else {
                Nerve::tetrahedron_boundary()
            };
            let b = Cochain1 {
                values: nerve
                    .pairs()
                    .iter()
                    .map(|&p| {
                        (
                            p,
                            group
                                .element(vec![BigInt::from(rng.gen_range(-9i64..=9))])
                                .unwrap(),
                        )
                    })
                    .collect(),
            };
            let c = coboundary1(&nerve, &group, &b).unwrap();
            assert!(check_cocycle2(&nerve, &group, &c).unwrap().ok);
        }
    }

    // Solver completeness against brute force on all Z/2 2-cocycles,
    // nerves with at most 5 indices.
    let z2 = AbelianGroup::new(vec![GroupFactor::Cyclic(2)]);
    let nerves = vec![
        Nerve::full_simplex(4),
        Nerve::full_simplex(5),
        Nerve::tetrahedron_boundary(),
        // A non-full downward-closed nerve: two triangles sharing an edge.
        Nerve::new(
            4,
            [[0, 1], [0, 2], [1, 2], [1, 3], [2, 3]],
            [[0, 1, 2], [1, 2, 3]],
            [],
        )
        .unwrap(),
    ];
    for nerve in &nerves {
        assert!(nerve.validate().is_ok());
        for c in enumerate_z2_cochains(nerve, &z2) {
            if !check_cocycle2(nerve, &z2, &c).unwrap().ok {
                continue;
            }
            let solved = match coboundary_solve(nerve, &z2, &c).unwrap() {
                SolveOutcome::Coboundary(b) => {
                    assert_eq!(coboundary1(nerve, &z2, &b).unwrap(), c, "witness must verify");
                    true
                }
                SolveOutcome::NotCoboundary(_) => false,
            };
            assert_eq!(
                solved,
                brute_force_coboundary(nerve, &z2, &c),
                "solver disagrees with brute force"
            );
        }
    }

    // The fundamental class on the tetrahedron boundary is not a coboundary.
    let nerve = Nerve::tetrahedron_boundary();
    let mut values: BTreeMap<[usize; 3], _> = nerve
        .triples()
        .iter()
        .map(|&t| (t, z2.zero()))
        .collect();
    values.insert([0, 1, 2], z2.element(vec![BigInt::from(1)]).unwrap());
    let fundamental = Cochain2 { values };
    assert!(check_cocycle2(&nerve, &z2, &fundamental).unwrap().ok);
    assert!(matches!(
        coboundary_solve(&nerve, &z2, &fundamental).unwrap(),
        SolveOutcome::NotCoboundary(_)
    ));

    pass(8, "delta-squared, solver vs brute force, and the fundamental 2-cocycle");
}

fn perturb_descent(rng: &mut ChaCha8Rng, dd: &DescentDatum) -> DescentDatum {
    let mut a = dd.stored_a().clone();
    let faces: Vec<[usize; 3]> = a.keys().copied().collect();
    let face = faces[rng.gen_range(0..faces.len())];
    let sec = &a[&face];
    let perturbed = if rng.gen_bool(0.5) {
        // Central scaling: invisible to Ad, caught by the quad identity.
        sec.scale(&Scalar::from_int(2))
    } else {
        // Low-order distortion: caught by the triple identity.
        sec.add(&WSymbol::var_x(dd.n(), rng.gen_range(0..dd.n())).shift(-1))
    };
    a.insert(face, perturbed);
    DescentDatum::new(
        dd.nerve().clone(),
        dd.n(),
        dd.stored_f().clone(),
        a,
        dd.check_floor(),
    )
    .unwrap()
}

#[test]
fn criterion_09_descent_suite() {
    let mut rng = ChaCha8Rng::seed_from_u64(109);
    let nerve = Nerve::full_simplex(4);
    let floor = -6;
    for trial in 0..100 {
        let n = if trial % 4 == 0 { 2 } else { 1 };
        let b = rand_invertible_map(&mut rng, &nerve, n);
        let dd = ad_generated_descent(nerve.clone(), n, &b, floor, 8).unwrap();
        let report = check_descent(&dd);
        assert!(report.ok, "Ad-generated datum {trial} rejected: {report:?}");

        let bad = perturb_descent(&mut rng, &dd);
        let bad_report = check_descent(&bad);
        assert!(!bad_report.ok, "perturbation {trial} accepted");
    }

    // Abelian-central data: f = id, a = tau powers; agreement with the
    // 2-cocycle check over Z.
    let group = AbelianGroup::new(vec![GroupFactor::Z]);
    for _ in 0..30 {
        let exponents: BTreeMap<[usize; 3], i64> = nerve
            .triples()
            .iter()
            .map(|&t| (t, rng.gen_range(-3i64..=3)))
            .collect();
        let f = nerve
            .pairs()
            .iter()
            .map(|&p| (p, WAutomorphism::identity(1)))
            .collect();
        let a = exponents
            .iter()
            .map(|(&t, &e)| {
                (
                    t,
                    WSymbol::from_laurent(
                        1,
                        &wstar::scalars::LaurentScalar::monomial(e, Scalar::one()),
                    ),
                )
            })
            .collect();
        let dd = DescentDatum::new(nerve.clone(), 1, f, a, -8).unwrap();
        let c = Cochain2 {
            values: exponents
                .iter()
                .map(|(&t, &e)| (t, group.element(vec![BigInt::from(e)]).unwrap()))
                .collect(),
        };
        assert_eq!(
            check_descent(&dd).ok,
            check_cocycle2(&nerve, &group, &c).unwrap().ok,
            "central descent and cocycle check disagree"
        );
    }
    pass(9, "100 Ad-generated data pass, 100 perturbations fail, central data match cocycles");
}

#[test]
fn criterion_10_gluing_suite() {
    let mut rng = ChaCha8Rng::seed_from_u64(110);
    let nerve = Nerve::full_simplex(4);
    let floor = -6;
    for trial in 0..8 {
        let n = 1;
        let b = rand_invertible_map(&mut rng, &nerve, n);
        let dd = ad_generated_descent(nerve.clone(), n, &b, floor, 8).unwrap();

        let rank = if trial % 2 == 0 { 1 } else { 2 };
        let transports: Vec<Mat> = (0..4)
            .map(|_| loop {
                let entries: Vec<Vec<Scalar>> = (0..rank)
                    .map(|_| {
                        (0..rank)
                            .map(|_| Scalar::from_int(rng.gen_range(-2..=2)))
                            .collect()
                    })
                    .collect();
                let m = Mat::from_rows(entries);
                if m.inverse().is_some() {
                    break m;
                }
            })
            .collect();
        let gd = transport_glue(dd, &b, &transports).unwrap();
        let report = check_glue(&gd);
        assert!(report.ok, "rank-{rank} glue datum {trial} rejected: {report:?}");

        // Single-entry perturbation.
        let mut xi = gd.xi().clone();
        let entry = xi.get_mut(&[0, 1]).unwrap();
        entry[0][0] = entry[0][0].scale(&Scalar::from_int(3));
        let bad = wstar::cech::GlueDatum::new(
            gd.parent().clone(),
            gd.ranks().to_vec(),
            xi,
        )
        .unwrap();
        assert!(!check_glue(&bad).ok, "perturbed glue datum {trial} accepted");
    }
    pass(10, "rank-1 and rank-2 transport glue data pass, perturbations fail");
}

#[test]
fn criterion_11_lagrangian_suite() {
    let mut rng = ChaCha8Rng::seed_from_u64(111);

    // Helper: random correspondence between standard spaces via a signed
    // permutation identifying the product with a standard space.
    fn rand_correspondence(
        rng: &mut ChaCha8Rng,
        left: &SymplecticSpace,
        right: &SymplecticSpace,
    ) -> Correspondence {
        let (nl, nr) = (left.n(), right.n());
        let total = nl + nr;
        let std_big = SymplecticSpace::standard(total);
        let lag = rand_lagrangian(rng, &std_big);
        // Standard coords (X, U) -> product coords (x_l, u_l, x_r, -u_r).
        let map = Mat::from_fn(2 * total, 2 * total, |i, j| {
            let (row_left, row_x, idx) = if i < 2 * nl {
                (true, i < nl, i % nl.max(1))
            } else {
                (false, (i - 2 * nl) < nr, (i - 2 * nl) % nr.max(1))
            };
            let col = if row_left {
                if row_x {
                    idx
                } else {
                    total + idx
                }
            } else if row_x {
                nl + idx
            } else {
                total + nl + idx
            };
            if col != j {
                Scalar::zero()
            } else if !row_left && !row_x {
                Scalar::from_int(-1)
            } else {
                Scalar::one()
            }
        });
        Correspondence::new(left.clone(), right.clone(), map.mul(lag.basis()))
            .expect("signed permutation preserves the product form")
    }

    // 500 random compositions stay Lagrangian.
    for _ in 0..500 {
        let n3 = rng.gen_range(1..=4);
        let n2 = rng.gen_range(1..=4);
        let n1 = rng.gen_range(1..=4);
        let v3 = SymplecticSpace::standard(n3);
        let v2 = SymplecticSpace::standard(n2);
        let v1 = SymplecticSpace::standard(n1);
        let l2 = rand_correspondence(&mut rng, &v3, &v2);
        let l1 = rand_correspondence(&mut rng, &v2, &v1);
        let composed = Correspondence::compose(&l2, &l1).unwrap();
        let product = v3.product(&v1.opposite());
        let report = is_lagrangian(&product, composed.subspace().basis()).unwrap();
        assert!(report.is_lagrangian, "composition left the Lagrangian locus");
    }

    // Graph functoriality on 200 random symplectic pairs.
    for _ in 0..200 {
        let n = rng.gen_range(1..=3);
        let sp = SymplecticSpace::standard(n);
        let a = rand_symplectic(&mut rng, n);
        let b = rand_symplectic(&mut rng, n);
        let ga = Correspondence::graph(&sp, &a).unwrap();
        let gb = Correspondence::graph(&sp, &b).unwrap();
        let gba = Correspondence::graph(&sp, &b.mul(&a)).unwrap();
        assert_eq!(Correspondence::compose(&gb, &ga).unwrap(), gba);
    }

    // Identity and associativity on 200 random triples.
    for _ in 0..200 {
        let n4 = rng.gen_range(1..=2);
        let n3 = rng.gen_range(1..=2);
        let n2 = rng.gen_range(1..=2);
        let n1 = rng.gen_range(1..=2);
        let v4 = SymplecticSpace::standard(n4);
        let v3 = SymplecticSpace::standard(n3);
        let v2 = SymplecticSpace::standard(n2);
        let v1 = SymplecticSpace::standard(n1);
        let l3 = rand_correspondence(&mut rng, &v4, &v3);
        let l2 = rand_correspondence(&mut rng, &v3, &v2);
        let l1 = rand_correspondence(&mut rng, &v2, &v1);
        let left = Correspondence::compose(&Correspondence::compose(&l3, &l2).unwrap(), &l1)
            .unwrap();
        let right = Correspondence::compose(&l3, &Correspondence::compose(&l2, &l1).unwrap())
            .unwrap();
        assert_eq!(left, right, "composition not associative");

        let delta = Correspondence::identity(&v2);
        assert_eq!(Correspondence::compose(&l2, &delta).unwrap(), l2);
        assert_eq!(Correspondence::compose(&delta, &l1).unwrap(), l1);
    }
    pass(11, "500 compositions Lagrangian, 200 graph pairs functorial, identity and associativity");
}
