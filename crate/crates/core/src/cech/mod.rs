//! Cover-nerve combinatorics and group-valued Cech verification.
//!
//! Covers enter only through which intersections are nonempty, so a [`Nerve`]
//! is a downward-closed set of faces on abstract indices. Cochains take
//! values in a finitely presented abelian group (exponent tuples over `Z` and
//! `Z/n` factors, written additively). The coboundary solver reduces to
//! integer linear systems per group factor, solved by Smith normal form; a
//! failed solve returns the unsatisfiable transformed row as a certificate.
//!
//! Descent data for algebra-valued gluing live in [`descent`].

pub mod descent;
pub mod snf;

use std::collections::{BTreeMap, BTreeSet};
use std::fmt;

use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::Zero;
use serde::{Deserialize, Serialize};
use thiserror::Error;

pub use descent::{
    ad_generated_descent, check_descent, check_glue, transport_glue, DescentDatum, DescentReport,
    FaceCheck, GlueDatum, GlueReport,
};

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum CechError {
    #[error("face {face:?} is not strictly increasing within bounds")]
    MalformedFace { face: Vec<usize> },
    #[error("no value assigned to declared face {face:?}")]
    MissingValue { face: Vec<usize> },
    #[error("element has {got} exponents, group has {expected} factors")]
    ArityMismatch { expected: usize, got: usize },
    #[error("section on face {face:?} is not star-invertible: {reason}")]
    NotInvertible { face: Vec<usize>, reason: String },
    #[error("transition matrix on pair {pair:?} has shape {got:?}, expected {expected:?}")]
    RankMismatch {
        pair: [usize; 2],
        expected: (usize, usize),
        got: (usize, usize),
    },
}

/// Declared nonempty overlaps of a finite cover: faces are strictly
/// increasing index tuples of lengths 2, 3 and 4.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Nerve {
    index_count: usize,
    pairs: BTreeSet<[usize; 2]>,
    triples: BTreeSet<[usize; 3]>,
    quads: BTreeSet<[usize; 4]>,
}

fn strictly_increasing(face: &[usize], bound: usize) -> bool {
    face.windows(2).all(|w| w[0] < w[1]) && face.iter().all(|&i| i < bound)
}

impl Nerve {
    pub fn new(
        index_count: usize,
        pairs: impl IntoIterator<Item = [usize; 2]>,
        triples: impl IntoIterator<Item = [usize; 3]>,
        quads: impl IntoIterator<Item = [usize; 4]>,
    ) -> Result<Self, CechError> {
        let pairs: BTreeSet<[usize; 2]> = pairs.into_iter().collect();
        let triples: BTreeSet<[usize; 3]> = triples.into_iter().collect();
        let quads: BTreeSet<[usize; 4]> = quads.into_iter().collect();
        for f in &pairs {
            if !strictly_increasing(f, index_count) {
                return Err(CechError::MalformedFace { face: f.to_vec() });
            }
        }
        for f in &triples {
            if !strictly_increasing(f, index_count) {
                return Err(CechError::MalformedFace { face: f.to_vec() });
            }
        }
        for f in &quads {
            if !strictly_increasing(f, index_count) {
                return Err(CechError::MalformedFace { face: f.to_vec() });
            }
        }
        Ok(Nerve {
            index_count,
            pairs,
            triples,
            quads,
        })
    }

    /// All pairs, triples and quads on `index_count` indices.
    pub fn full_simplex(index_count: usize) -> Self {
        let mut pairs = BTreeSet::new();
        let mut triples = BTreeSet::new();
        let mut quads = BTreeSet::new();
        for i in 0..index_count {
            for j in i + 1..index_count {
                pairs.insert([i, j]);
                for k in j + 1..index_count {
                    triples.insert([i, j, k]);
                    for l in k + 1..index_count {
                        quads.insert([i, j, k, l]);
                    }
                }
            }
        }
        Nerve {
            index_count,
            pairs,
            triples,
            quads,
        }
    }

    /// All pairs and triples on four indices, no quads: the boundary of a
    /// tetrahedron, with nontrivial degree-2 cohomology.
    pub fn tetrahedron_boundary() -> Self {
        let mut nv = Nerve::full_simplex(4);
        nv.quads.clear();
        nv
    }

    pub fn index_count(&self) -> usize {
        self.index_count
    }

    pub fn pairs(&self) -> &BTreeSet<[usize; 2]> {
        &self.pairs
    }

    pub fn triples(&self) -> &BTreeSet<[usize; 3]> {
        &self.triples
    }

    pub fn quads(&self) -> &BTreeSet<[usize; 4]> {
        &self.quads
    }

    /// Downward closure: every boundary face of a declared face is declared.
    pub fn validate(&self) -> Result<(), ClosureViolation> {
        for f in &self.triples {
            for skip in 0..3 {
                let sub: Vec<usize> = (0..3).filter(|&i| i != skip).map(|i| f[i]).collect();
                if !self.pairs.contains(&[sub[0], sub[1]]) {
                    return Err(ClosureViolation {
                        face: f.to_vec(),
                        missing: sub,
                    });
                }
            }
        }
        for f in &self.quads {
            for skip in 0..4 {
                let sub: Vec<usize> = (0..4).filter(|&i| i != skip).map(|i| f[i]).collect();
                if !self.triples.contains(&[sub[0], sub[1], sub[2]]) {
                    return Err(ClosureViolation {
                        face: f.to_vec(),
                        missing: sub,
                    });
                }
            }
        }
        Ok(())
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ClosureViolation {
    pub face: Vec<usize>,
    pub missing: Vec<usize>,
}

impl fmt::Display for ClosureViolation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(
            f,
            "face {:?} declared but subface {:?} is not",
            self.face, self.missing
        )
    }
}

/// A finitely presented abelian group `Z^a x Z/n_1 x ... x Z/n_k`, written
/// additively; elements are exponent tuples with torsion entries reduced to
/// canonical representatives in `[0, n)`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct AbelianGroup {
    factors: Vec<GroupFactor>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum GroupFactor {
    Z,
    Cyclic(u64),
}

#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord)]
pub struct GroupElement(pub Vec<BigInt>);

impl AbelianGroup {
    pub fn new(factors: Vec<GroupFactor>) -> Self {
        assert!(
            factors
                .iter()
                .all(|f| !matches!(f, GroupFactor::Cyclic(0))),
            "cyclic factor needs positive modulus"
        );
        AbelianGroup { factors }
    }

    /// Parses factor specs of the form `"Z"` or `"Z/n"`.
    pub fn from_specs(specs: &[String]) -> Result<Self, String> {
        let mut factors = Vec::new();
        for s in specs {
            let t = s.trim();
            if t == "Z" {
                factors.push(GroupFactor::Z);
            } else if let Some(rest) = t.strip_prefix("Z/") {
                let n: u64 = rest
                    .parse()
                    .map_err(|_| format!("bad cyclic modulus in {t:?}"))?;
                if n == 0 {
                    return Err(format!("bad cyclic modulus in {t:?}"));
                }
                factors.push(GroupFactor::Cyclic(n));
            } else {
                return Err(format!("unknown group factor {t:?}"));
            }
        }
        Ok(AbelianGroup::new(factors))
    }

    pub fn factors(&self) -> &[GroupFactor] {
        &self.factors
    }

    pub fn rank(&self) -> usize {
        self.factors.len()
    }

    pub fn zero(&self) -> GroupElement {
        GroupElement(vec![BigInt::zero(); self.factors.len()])
    }

    pub fn element(&self, exps: Vec<BigInt>) -> Result<GroupElement, CechError> {
        if exps.len() != self.factors.len() {
            return Err(CechError::ArityMismatch {
                expected: self.factors.len(),
                got: exps.len(),
            });
        }
        Ok(self.reduce(GroupElement(exps)))
    }

    pub fn reduce(&self, e: GroupElement) -> GroupElement {
        GroupElement(
            e.0.into_iter()
                .zip(&self.factors)
                .map(|(v, f)| match f {
                    GroupFactor::Z => v,
                    GroupFactor::Cyclic(n) => v.mod_floor(&BigInt::from(*n)),
                })
                .collect(),
        )
    }

    pub fn add(&self, a: &GroupElement, b: &GroupElement) -> GroupElement {
        self.reduce(GroupElement(
            a.0.iter().zip(&b.0).map(|(x, y)| x + y).collect(),
        ))
    }

    pub fn neg(&self, a: &GroupElement) -> GroupElement {
        self.reduce(GroupElement(a.0.iter().map(|x| -x).collect()))
    }

    pub fn sub(&self, a: &GroupElement, b: &GroupElement) -> GroupElement {
        self.add(a, &self.neg(b))
    }

    pub fn is_zero(&self, a: &GroupElement) -> bool {
        a.0.iter().all(Zero::is_zero)
    }
}

/// Group-valued 1-cochain on declared pairs.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Cochain1 {
    pub values: BTreeMap<[usize; 2], GroupElement>,
}

/// Group-valued 2-cochain on declared triples.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Cochain2 {
    pub values: BTreeMap<[usize; 3], GroupElement>,
}

/// `(delta b)_{ijk} = b_{jk} - b_{ik} + b_{ij}` on every declared triple.
pub fn coboundary1(
    nerve: &Nerve,
    group: &AbelianGroup,
    b: &Cochain1,
) -> Result<Cochain2, CechError> {
    let get = |face: [usize; 2]| -> Result<&GroupElement, CechError> {
        b.values.get(&face).ok_or(CechError::MissingValue {
            face: face.to_vec(),
        })
    };
    let mut values = BTreeMap::new();
    for &[i, j, k] in nerve.triples() {
        let v = group.add(
            &group.sub(get([j, k])?, get([i, k])?),
            get([i, j])?,
        );
        values.insert([i, j, k], v);
    }
    Ok(Cochain2 { values })
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Cocycle2Report {
    pub ok: bool,
    /// First declared quad whose alternating sum is nonzero, with the sum.
    pub failure: Option<([usize; 4], GroupElement)>,
}

/// Checks `c_{jkl} - c_{ikl} + c_{ijl} - c_{ijk} = 0` on every declared quad.
pub fn check_cocycle2(
    nerve: &Nerve,
    group: &AbelianGroup,
    c: &Cochain2,
) -> Result<Cocycle2Report, CechError> {
    for face in nerve.triples() {
        if !c.values.contains_key(face) {
            return Err(CechError::MissingValue {
                face: face.to_vec(),
            });
        }
    }
    for &[i, j, k, l] in nerve.quads() {
        let g = |f: [usize; 3]| c.values.get(&f).unwrap();
        let sum = group.add(
            &group.sub(g([j, k, l]), g([i, k, l])),
            &group.sub(g([i, j, l]), g([i, j, k])),
        );
        if !group.is_zero(&sum) {
            return Ok(Cocycle2Report {
                ok: false,
                failure: Some(([i, j, k, l], sum)),
            });
        }
    }
    Ok(Cocycle2Report {
        ok: true,
        failure: None,
    })
}

/// Witness or refutation for `delta b = c`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum SolveOutcome {
    Coboundary(Cochain1),
    NotCoboundary(NotCoboundaryCert),
}

/// The failing factor and the unsatisfiable diagonalized row.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct NotCoboundaryCert {
    pub factor: usize,
    pub detail: snf::UnsolvableRow,
}

/// Solves `delta b = c` over the group presentation, one integer linear
/// system per factor (the coboundary matrix has entries -1, 0, 1 and acts
/// diagonally on the product of factors).
pub fn coboundary_solve(
    nerve: &Nerve,
    group: &AbelianGroup,
    c: &Cochain2,
) -> Result<SolveOutcome, CechError> {
    for face in nerve.triples() {
        if !c.values.contains_key(face) {
            return Err(CechError::MissingValue {
                face: face.to_vec(),
            });
        }
    }
    let pairs: Vec<[usize; 2]> = nerve.pairs().iter().copied().collect();
    let triples: Vec<[usize; 3]> = nerve.triples().iter().copied().collect();
    let col_of: BTreeMap<[usize; 2], usize> =
        pairs.iter().enumerate().map(|(c, &p)| (p, c)).collect();

    let mut a = snf::IMat::zeros(triples.len(), pairs.len());
    for (r, &[i, j, k]) in triples.iter().enumerate() {
        a.set(r, col_of[&[j, k]], BigInt::from(1));
        a.set(r, col_of[&[i, k]], BigInt::from(-1));
        a.set(r, col_of[&[i, j]], BigInt::from(1));
    }

    let mut per_pair: Vec<Vec<BigInt>> = vec![Vec::new(); pairs.len()];
    for (fi, factor) in group.factors().iter().enumerate() {
        let rhs: Vec<BigInt> = triples
            .iter()
            .map(|t| c.values[t].0[fi].clone())
            .collect();
        let modulus = match factor {
            GroupFactor::Z => None,
            GroupFactor::Cyclic(n) => Some(BigInt::from(*n)),
        };
        match snf::solve(&a, &rhs, modulus.as_ref()) {
            Ok(x) => {
                for (col, v) in x.into_iter().enumerate() {
                    per_pair[col].push(v);
                }
            }
            Err(detail) => {
                return Ok(SolveOutcome::NotCoboundary(NotCoboundaryCert {
                    factor: fi,
                    detail,
                }))
            }
        }
    }
    let values = pairs
        .into_iter()
        .zip(per_pair)
        .map(|(p, exps)| (p, group.reduce(GroupElement(exps))))
        .collect();
    Ok(SolveOutcome::Coboundary(Cochain1 { values }))
}

/// On-disk description of a nerve, coefficient group and 2-cochain:
/// `{"indices": N, "pairs": [[i,j],...], "triples": [...], "quads": [...],
///   "group": ["Z","Z/2",...], "cochain2": {"i,j,k": [e1,...]}}`.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct CechInput {
    pub indices: usize,
    #[serde(default)]
    pub pairs: Vec<[usize; 2]>,
    #[serde(default)]
    pub triples: Vec<[usize; 3]>,
    #[serde(default)]
    pub quads: Vec<[usize; 4]>,
    pub group: Vec<String>,
    #[serde(default)]
    pub cochain2: BTreeMap<String, Vec<i64>>,
}

#[derive(Debug, Error)]
pub enum CechInputError {
    #[error("malformed JSON: {0}")]
    Json(#[from] serde_json::Error),
    #[error("{0}")]
    Structure(#[from] CechError),
    #[error("bad group spec: {0}")]
    Group(String),
    #[error("bad cochain key {0:?} (expected \"i,j,k\")")]
    Key(String),
}

impl CechInput {
    pub fn parse(json: &str) -> Result<(Nerve, AbelianGroup, Cochain2), CechInputError> {
        let input: CechInput = serde_json::from_str(json)?;
        input.build()
    }

    pub fn build(&self) -> Result<(Nerve, AbelianGroup, Cochain2), CechInputError> {
        let nerve = Nerve::new(
            self.indices,
            self.pairs.iter().copied(),
            self.triples.iter().copied(),
            self.quads.iter().copied(),
        )?;
        let group = AbelianGroup::from_specs(&self.group).map_err(CechInputError::Group)?;
        let mut values = BTreeMap::new();
        for (key, exps) in &self.cochain2 {
            let parts: Vec<usize> = key
                .split(',')
                .map(|s| s.trim().parse::<usize>())
                .collect::<Result<_, _>>()
                .map_err(|_| CechInputError::Key(key.clone()))?;
            if parts.len() != 3 {
                return Err(CechInputError::Key(key.clone()));
            }
            let face = [parts[0], parts[1], parts[2]];
            if !strictly_increasing(&face, self.indices) {
                return Err(CechError::MalformedFace {
                    face: face.to_vec(),
                }
                .into());
            }
            let elem = group.element(exps.iter().map(|&e| BigInt::from(e)).collect())?;
            values.insert(face, elem);
        }
        Ok((nerve, group, Cochain2 { values }))
    }
}
