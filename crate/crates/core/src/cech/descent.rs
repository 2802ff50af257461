//! Descent data for algebra gluing on a cover nerve, and module gluing data.
//!
//! A descent datum carries one symbol algebra per index (all on a common
//! chart here), an automorphism `f_ij` per declared pair and an invertible
//! section `a_ijk` per declared triple, subject to
//!
//! * `f_ij f_jk = Ad(a_ijk) f_ik` on triples, and
//! * `a_ijk a_ikl = f_ij(a_jkl) a_ijl` on quads.
//!
//! Faces are stored on strictly increasing tuples; other orientations are
//! derived through the simplicial identities `f_ji = f_ij^{-1}`,
//! `a_{p,r,q} = a_{p,q,r}^{*-1}` and `a_{q,p,r} = f_{qp}(a_{p,q,r}^{*-1})`.
//! Automorphism equality is tested on the generators `x_i`, `u_i`, `tau`,
//! and every identity is verified modulo an explicit tau-floor carried by the
//! datum; reports state the floor actually reached.

use std::collections::BTreeMap;

use crate::cech::{CechError, Nerve};
use crate::linalg::Mat;
use crate::scalars::{LaurentScalar, Scalar};
use crate::symbols::WSymbol;
use crate::wcalc::{star_inverse, star_w, star_w_mod, WAutomorphism};

/// Descent datum on a nerve: per-pair automorphisms and per-triple invertible
/// sections over a common chart with `n` base variables, verified modulo
/// `tau^{< check_floor}`.
#[derive(Debug, Clone)]
pub struct DescentDatum {
    nerve: Nerve,
    n: usize,
    f: BTreeMap<[usize; 2], WAutomorphism>,
    a: BTreeMap<[usize; 3], WSymbol>,
    check_floor: i64,
}

impl DescentDatum {
    pub fn new(
        nerve: Nerve,
        n: usize,
        f: BTreeMap<[usize; 2], WAutomorphism>,
        a: BTreeMap<[usize; 3], WSymbol>,
        check_floor: i64,
    ) -> Result<Self, CechError> {
        for pair in nerve.pairs() {
            let aut = f.get(pair).ok_or(CechError::MissingValue {
                face: pair.to_vec(),
            })?;
            assert_eq!(aut.n(), n, "automorphism arity mismatch");
        }
        for triple in nerve.triples() {
            let sec = a.get(triple).ok_or(CechError::MissingValue {
                face: triple.to_vec(),
            })?;
            assert_eq!(sec.n(), n, "section arity mismatch");
            star_inverse(sec, 0).map_err(|e| CechError::NotInvertible {
                face: triple.to_vec(),
                reason: e.to_string(),
            })?;
        }
        Ok(DescentDatum {
            nerve,
            n,
            f,
            a,
            check_floor,
        })
    }

    pub fn nerve(&self) -> &Nerve {
        &self.nerve
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn check_floor(&self) -> i64 {
        self.check_floor
    }

    pub fn stored_f(&self) -> &BTreeMap<[usize; 2], WAutomorphism> {
        &self.f
    }

    pub fn stored_a(&self) -> &BTreeMap<[usize; 3], WSymbol> {
        &self.a
    }

    /// Inversion depth that keeps truncation at or below the check floor.
    fn inv_depth(&self, order: i64) -> u32 {
        ((-self.check_floor - order).max(0) + 2) as u32
    }

    /// Floor for intermediate values: a small margin below the check floor
    /// absorbs positive orders of user-supplied sections.
    fn working_floor(&self) -> i64 {
        self.check_floor - 2
    }

    /// `f` on an arbitrary ordered pair of distinct indices.
    pub fn f_oriented(&self, i: usize, j: usize) -> WAutomorphism {
        assert_ne!(i, j, "descent pairs have distinct indices");
        if i < j {
            self.f[&[i, j]].clone()
        } else {
            self.f[&[j, i]].inverse()
        }
    }

    /// `a` on an arbitrary ordered triple of distinct indices (optionally
    /// star-inverted), derived from the stored increasing representative by
    /// the simplicial identities.
    pub fn a_oriented(&self, p: usize, q: usize, r: usize, inverted: bool) -> WSymbol {
        assert!(p != q && q != r && p != r, "triple has repeated indices");
        if q > r {
            // a_{p,q,r} = a_{p,r,q}^{*-1}
            return self.a_oriented(p, r, q, !inverted);
        }
        if p > q {
            // a_{p,q,r} = f_{pq}(a_{q,p,r}^{*-1})
            let inner = self.a_oriented(q, p, r, !inverted);
            return self.f_oriented(p, q).apply_mod(&inner, self.working_floor());
        }
        let stored = &self.a[&[p, q, r]];
        if inverted {
            let m = stored.order().unwrap_or(0);
            star_inverse(stored, self.inv_depth(m)).expect("validated at construction")
        } else {
            stored.clone()
        }
    }

    /// The generator set automorphism equality is tested on.
    fn generators(&self) -> Vec<WSymbol> {
        let mut gens = Vec::new();
        for i in 0..self.n {
            gens.push(WSymbol::var_x(self.n, i));
        }
        for i in 0..self.n {
            gens.push(WSymbol::var_u(self.n, i));
        }
        gens.push(WSymbol::from_laurent(self.n, &LaurentScalar::tau()));
        gens
    }
}

/// Result of one face-level identity check.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct FaceCheck<F> {
    pub face: F,
    pub ok: bool,
    /// Floor the comparison was effective at (>= the requested floor when
    /// truncations were coarser than asked).
    pub verified_floor: i64,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct DescentReport {
    pub ok: bool,
    pub nerve_ok: bool,
    /// `f_ij f_jk = Ad(a_ijk) f_ik` on generators, per declared triple.
    pub condition1: Vec<FaceCheck<[usize; 3]>>,
    /// `a_ijk a_ikl = f_ij(a_jkl) a_ijl`, per declared quad.
    pub condition2: Vec<FaceCheck<[usize; 4]>>,
}

fn effective_floor(floor: i64, parts: &[&WSymbol]) -> i64 {
    parts
        .iter()
        .filter_map(|w| w.floor())
        .fold(floor, i64::max)
}



/// Verifies both descent conditions modulo the datum's tau-floor.
pub fn check_descent(dd: &DescentDatum) -> DescentReport {
    let floor = dd.check_floor();
    let nerve_ok = dd.nerve().validate().is_ok();
    let gens = dd.generators();

    let mut condition1 = Vec::new();
    for &[i, j, k] in dd.nerve().triples() {
        let lhs_aut = WAutomorphism::compose(&dd.f_oriented(i, j), &dd.f_oriented(j, k));
        let a_ijk = dd.a_oriented(i, j, k, false);
        let ad = WAutomorphism::inner(a_ijk.clone(), dd.inv_depth(a_ijk.order().unwrap_or(0)))
            .expect("validated at construction");
        let rhs_aut = WAutomorphism::compose(&ad, &dd.f_oriented(i, k));
        let mut ok = true;
        let mut vfloor = floor;
        for g in &gens {
            let l = lhs_aut.apply_mod(g, floor);
            let r = rhs_aut.apply_mod(g, floor);
            vfloor = vfloor.max(effective_floor(floor, &[&l, &r]));
            if !l.agrees_with(&r, floor) {
                ok = false;
                break;
            }
        }
        condition1.push(FaceCheck {
            face: [i, j, k],
            ok,
            verified_floor: vfloor,
        });
    }

    let mut condition2 = Vec::new();
    for &[i, j, k, l] in dd.nerve().quads() {
        let a_ijk = dd.a_oriented(i, j, k, false);
        let a_ikl = dd.a_oriented(i, k, l, false);
        let a_jkl = dd.a_oriented(j, k, l, false);
        let a_ijl = dd.a_oriented(i, j, l, false);
        let lhs = star_w_mod(&a_ijk, &a_ikl, floor);
        let rhs = star_w_mod(
            &dd.f_oriented(i, j).apply_mod(&a_jkl, dd.working_floor()),
            &a_ijl,
            floor,
        );
        let ok = lhs.agrees_with(&rhs, floor);
        condition2.push(FaceCheck {
            face: [i, j, k, l],
            ok,
            verified_floor: effective_floor(floor, &[&lhs, &rhs]),
        });
    }

    DescentReport {
        ok: nerve_ok
            && condition1.iter().all(|c| c.ok)
            && condition2.iter().all(|c| c.ok),
        nerve_ok,
        condition1,
        condition2,
    }
}

/// Module gluing datum over a descent datum: per-index free-module ranks and
/// per-pair transition matrices of symbols.
#[derive(Debug, Clone)]
pub struct GlueDatum {
    parent: DescentDatum,
    ranks: Vec<usize>,
    xi: BTreeMap<[usize; 2], Vec<Vec<WSymbol>>>,
}

impl GlueDatum {
    pub fn new(
        parent: DescentDatum,
        ranks: Vec<usize>,
        xi: BTreeMap<[usize; 2], Vec<Vec<WSymbol>>>,
    ) -> Result<Self, CechError> {
        assert_eq!(
            ranks.len(),
            parent.nerve().index_count(),
            "one rank per cover index"
        );
        for pair in parent.nerve().pairs() {
            let m = xi.get(pair).ok_or(CechError::MissingValue {
                face: pair.to_vec(),
            })?;
            let expected = (ranks[pair[0]], ranks[pair[1]]);
            let got = (m.len(), m.first().map_or(0, |row| row.len()));
            if got != expected || m.iter().any(|row| row.len() != expected.1) {
                return Err(CechError::RankMismatch {
                    pair: *pair,
                    expected,
                    got,
                });
            }
        }
        Ok(GlueDatum { parent, ranks, xi })
    }

    pub fn parent(&self) -> &DescentDatum {
        &self.parent
    }

    pub fn ranks(&self) -> &[usize] {
        &self.ranks
    }

    pub fn xi(&self) -> &BTreeMap<[usize; 2], Vec<Vec<WSymbol>>> {
        &self.xi
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct GlueReport {
    pub ok: bool,
    pub parent: DescentReport,
    /// Entrywise transition compatibility per declared triple.
    pub triples: Vec<FaceCheck<[usize; 3]>>,
}

/// Verifies the module gluing condition on every declared triple.
///
/// In coordinates on free modules (left action, columns indexed by the source
/// basis) the gluing identity `xi_ij(f_ji-twisted xi_jk(u)) = xi_ik(a_kji^-1 u)`
/// reads, entrywise for target row `al` and source column `ga`:
/// `sum_be f_ij(xi_jk[be][ga]) o xi_ij[al][be] = f_ik(a_kji^{*-1}) o xi_ik[al][ga]`.
pub fn check_glue(gd: &GlueDatum) -> GlueReport {
    let dd = gd.parent();
    let parent = check_descent(dd);
    let floor = dd.check_floor();

    let mut triples = Vec::new();
    for &[i, j, k] in dd.nerve().triples() {
        let xij = &gd.xi()[&[i, j]];
        let xjk = &gd.xi()[&[j, k]];
        let xik = &gd.xi()[&[i, k]];
        let f_ij = dd.f_oriented(i, j);
        let f_ik = dd.f_oriented(i, k);
        let a_kji_inv = dd.a_oriented(k, j, i, true);
        let scalar = f_ik.apply_mod(&a_kji_inv, dd.working_floor());

        let ri = gd.ranks()[i];
        let rj = gd.ranks()[j];
        let rk = gd.ranks()[k];
        let mut ok = true;
        let mut vfloor = floor;
        'entries: for al in 0..ri {
            for ga in 0..rk {
                let mut lhs = WSymbol::zero(dd.n());
                for be in 0..rj {
                    lhs = lhs.add(&star_w_mod(
                        &f_ij.apply_mod(&xjk[be][ga], dd.working_floor()),
                        &xij[al][be],
                        floor,
                    ));
                }
                let rhs = star_w_mod(&scalar, &xik[al][ga], floor);
                vfloor = vfloor.max(effective_floor(floor, &[&lhs, &rhs]));
                if !lhs.agrees_with(&rhs, floor) {
                    ok = false;
                    break 'entries;
                }
            }
        }
        triples.push(FaceCheck {
            face: [i, j, k],
            ok,
            verified_floor: vfloor,
        });
    }

    GlueReport {
        ok: parent.ok && triples.iter().all(|c| c.ok),
        parent,
        triples,
    }
}

/// Builds the descent datum generated by invertible sections `b_ij` on the
/// increasing pairs: `f_ij = Ad(b_ij)` and `a_ijk = b_ij o b_jk o b_ik^{*-1}`.
/// Satisfies both descent conditions by construction.
pub fn ad_generated_descent(
    nerve: Nerve,
    n: usize,
    b: &BTreeMap<[usize; 2], WSymbol>,
    check_floor: i64,
    depth: u32,
) -> Result<DescentDatum, CechError> {
    let mut f = BTreeMap::new();
    for pair in nerve.pairs() {
        let sec = b.get(pair).ok_or(CechError::MissingValue {
            face: pair.to_vec(),
        })?;
        f.insert(
            *pair,
            WAutomorphism::inner(sec.clone(), depth).map_err(|e| CechError::NotInvertible {
                face: pair.to_vec(),
                reason: e.to_string(),
            })?,
        );
    }
    let mut a = BTreeMap::new();
    for &[i, j, k] in nerve.triples() {
        let ik_inv =
            star_inverse(&b[&[i, k]], depth).map_err(|e| CechError::NotInvertible {
                face: vec![i, k],
                reason: e.to_string(),
            })?;
        a.insert(
            [i, j, k],
            star_w(&star_w(&b[&[i, j]], &b[&[j, k]]), &ik_inv),
        );
    }
    DescentDatum::new(nerve, n, f, a, check_floor)
}

/// Rank-`r` gluing datum over an Ad-generated parent: `xi_ij = b_ij * C_i C_j^-1`
/// for per-index constant invertible matrices `C_i`. The constant transport
/// matrices form an exact cocycle, so the gluing condition holds whenever the
/// parent is the datum generated by the same `b`.
pub fn transport_glue(
    parent: DescentDatum,
    b: &BTreeMap<[usize; 2], WSymbol>,
    transports: &[Mat],
) -> Result<GlueDatum, CechError> {
    assert_eq!(transports.len(), parent.nerve().index_count());
    let rank = transports.first().map_or(1, Mat::rows);
    let inverses: Vec<Mat> = transports
        .iter()
        .enumerate()
        .map(|(idx, c)| {
            assert_eq!((c.rows(), c.cols()), (rank, rank), "transport shape");
            c.inverse().unwrap_or_else(|| {
                panic!("transport matrix {idx} is singular");
            })
        })
        .collect();
    let mut xi = BTreeMap::new();
    for &[i, j] in parent.nerve().pairs() {
        let c = transports[i].mul(&inverses[j]);
        let sec = b.get(&[i, j]).ok_or(CechError::MissingValue {
            face: vec![i, j],
        })?;
        let matrix: Vec<Vec<WSymbol>> = (0..rank)
            .map(|al| {
                (0..rank)
                    .map(|be| sec.scale(&c[(al, be)]))
                    .collect()
            })
            .collect();
        xi.insert([i, j], matrix);
    }
    let ranks = vec![rank; parent.nerve().index_count()];
    GlueDatum::new(parent, ranks, xi)
}
