//! Linear symplectic spaces, Lagrangian subspaces and correspondence
//! composition.
//!
//! Everything is exact linear algebra over the Gaussian rationals: a
//! [`SymplecticSpace`] is a skew invertible form (with a sign tag for the
//! opposite structure), a [`LinearLagrangian`] is a canonical basis matrix of
//! a maximal isotropic subspace, and a [`Correspondence`] is a Lagrangian in
//! `V_left x V_right^a`. Composition intersects the two pullback subspaces in
//! the triple product and projects out the middle factor; linear Lagrangian
//! relations are closed under this, so the result is again a correspondence.

use thiserror::Error;

use crate::linalg::Mat;
use crate::scalars::Scalar;

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum LagrangeError {
    #[error("matrix has shape {got:?}, expected {expected:?}")]
    DimensionMismatch {
        expected: (usize, usize),
        got: (usize, usize),
    },
    #[error("form is not skew-symmetric")]
    NotSkew,
    #[error("form is degenerate")]
    Degenerate,
    #[error("subspace is not Lagrangian: {report}")]
    NotLagrangian { report: String },
    #[error("correspondences composed over different middle spaces")]
    SpaceMismatch,
}

/// A symplectic vector space of dimension `2n` with an explicit skew
/// invertible form and a sign tag distinguishing the opposite structure.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct SymplecticSpace {
    n: usize,
    form: Mat,
    sign: i8,
}

impl SymplecticSpace {
    /// Standard structure on coordinates `(x_1..x_n, u_1..u_n)`:
    /// `omega(x_i, u_j) = delta_ij`.
    pub fn standard(n: usize) -> Self {
        let mut form = Mat::zeros(2 * n, 2 * n);
        for i in 0..n {
            form[(i, n + i)] = Scalar::one();
            form[(n + i, i)] = Scalar::from_int(-1);
        }
        SymplecticSpace { n, form, sign: 1 }
    }

    pub fn new(n: usize, form: Mat, sign: i8) -> Result<Self, LagrangeError> {
        if (form.rows(), form.cols()) != (2 * n, 2 * n) {
            return Err(LagrangeError::DimensionMismatch {
                expected: (2 * n, 2 * n),
                got: (form.rows(), form.cols()),
            });
        }
        if form.transpose() != form.neg() {
            return Err(LagrangeError::NotSkew);
        }
        if form.rank() != 2 * n {
            return Err(LagrangeError::Degenerate);
        }
        Ok(SymplecticSpace { n, form, sign })
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn dim(&self) -> usize {
        2 * self.n
    }

    pub fn form(&self) -> &Mat {
        &self.form
    }

    pub fn sign(&self) -> i8 {
        self.sign
    }

    /// Same underlying space with the form negated; an involution.
    pub fn opposite(&self) -> Self {
        SymplecticSpace {
            n: self.n,
            form: self.form.neg(),
            sign: -self.sign,
        }
    }

    /// Direct sum `self (+) other`, block diagonal form.
    pub fn product(&self, other: &SymplecticSpace) -> SymplecticSpace {
        let n = self.n + other.n;
        let (da, _db) = (self.dim(), other.dim());
        let form = Mat::from_fn(2 * n, 2 * n, |i, j| {
            if i < da && j < da {
                self.form[(i, j)].clone()
            } else if i >= da && j >= da {
                other.form[(i - da, j - da)].clone()
            } else {
                Scalar::zero()
            }
        });
        SymplecticSpace { n, form, sign: 1 }
    }

    /// Whether `m` preserves the form: `m^T omega m = omega`.
    pub fn is_symplectic_map(&self, m: &Mat) -> bool {
        m.rows() == self.dim()
            && m.cols() == self.dim()
            && m.transpose().mul(&self.form).mul(m) == self.form
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct LagrangianReport {
    pub is_lagrangian: bool,
    pub rank: usize,
    /// Two generator columns with nonvanishing pairing, if any.
    pub nonzero_pairing: Option<(usize, usize, Scalar)>,
}

impl std::fmt::Display for LagrangianReport {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        if self.is_lagrangian {
            write!(f, "lagrangian of rank {}", self.rank)
        } else if let Some((a, b, ref v)) = self.nonzero_pairing {
            write!(
                f,
                "rank {} with omega(col {}, col {}) = {}",
                self.rank, a, b, v
            )
        } else {
            write!(f, "rank {} (expected full column rank)", self.rank)
        }
    }
}

/// Definitional check: `2n x n` basis of full column rank with
/// `basis^T omega basis = 0` exactly.
pub fn is_lagrangian(space: &SymplecticSpace, basis: &Mat) -> Result<LagrangianReport, LagrangeError> {
    if (basis.rows(), basis.cols()) != (space.dim(), space.n()) {
        return Err(LagrangeError::DimensionMismatch {
            expected: (space.dim(), space.n()),
            got: (basis.rows(), basis.cols()),
        });
    }
    let rank = basis.rank();
    let gram = basis.transpose().mul(space.form()).mul(basis);
    let mut pairing = None;
    'scan: for i in 0..gram.rows() {
        for j in 0..gram.cols() {
            if !gram[(i, j)].is_zero() {
                pairing = Some((i, j, gram[(i, j)].clone()));
                break 'scan;
            }
        }
    }
    Ok(LagrangianReport {
        is_lagrangian: rank == space.n() && pairing.is_none(),
        rank,
        nonzero_pairing: pairing,
    })
}

/// A Lagrangian subspace with its basis in reduced column echelon form, so
/// equality of values is equality of subspaces.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct LinearLagrangian {
    space: SymplecticSpace,
    basis: Mat,
}

impl LinearLagrangian {
    pub fn new(space: SymplecticSpace, basis: Mat) -> Result<Self, LagrangeError> {
        let report = is_lagrangian(&space, &basis)?;
        if !report.is_lagrangian {
            return Err(LagrangeError::NotLagrangian {
                report: report.to_string(),
            });
        }
        Ok(LinearLagrangian {
            space,
            basis: basis.column_span_canonical(),
        })
    }

    pub fn space(&self) -> &SymplecticSpace {
        &self.space
    }

    pub fn basis(&self) -> &Mat {
        &self.basis
    }
}

/// A Lagrangian correspondence between `left` and `right`: a Lagrangian
/// subspace of `left x right^a`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Correspondence {
    left: SymplecticSpace,
    right: SymplecticSpace,
    subspace: LinearLagrangian,
}

impl Correspondence {
    /// Builds a correspondence from a `(dim left + dim right) x (n_l + n_r)`
    /// basis of a Lagrangian in the product with the opposite right form.
    pub fn new(
        left: SymplecticSpace,
        right: SymplecticSpace,
        basis: Mat,
    ) -> Result<Self, LagrangeError> {
        let product = left.product(&right.opposite());
        let subspace = LinearLagrangian::new(product, basis)?;
        Ok(Correspondence {
            left,
            right,
            subspace,
        })
    }

    /// The graph `{(Mv, v)}` of a symplectic map `m: space -> space`.
    pub fn graph(space: &SymplecticSpace, m: &Mat) -> Result<Self, LagrangeError> {
        let d = space.dim();
        if (m.rows(), m.cols()) != (d, d) {
            return Err(LagrangeError::DimensionMismatch {
                expected: (d, d),
                got: (m.rows(), m.cols()),
            });
        }
        let basis = Mat::from_fn(2 * d, d, |i, j| {
            if i < d {
                m[(i, j)].clone()
            } else if i - d == j {
                Scalar::one()
            } else {
                Scalar::zero()
            }
        });
        Correspondence::new(space.clone(), space.clone(), basis)
    }

    /// The identity correspondence: the diagonal of `V x V^a`.
    pub fn identity(space: &SymplecticSpace) -> Self {
        Correspondence::graph(space, &Mat::identity(space.dim()))
            .expect("diagonal is Lagrangian")
    }

    pub fn left(&self) -> &SymplecticSpace {
        &self.left
    }

    pub fn right(&self) -> &SymplecticSpace {
        &self.right
    }

    pub fn subspace(&self) -> &LinearLagrangian {
        &self.subspace
    }

    /// Composition `l2 o l1: V3 <-> V1` of `l2: V3 <-> V2` with
    /// `l1: V2 <-> V1`: pairs `(v3, v1)` admitting a middle `v2` with
    /// `(v3, v2)` in `l2` and `(v2, v1)` in `l1`. Exact kernel computation in
    /// the triple product, projected and canonicalized.
    pub fn compose(l2: &Correspondence, l1: &Correspondence) -> Result<Correspondence, LagrangeError> {
        if l2.right != l1.left {
            return Err(LagrangeError::SpaceMismatch);
        }
        let d3 = l2.left.dim();
        let d2 = l1.left.dim();
        let d1 = l1.right.dim();
        let b2 = l2.subspace.basis();
        let b1 = l1.subspace.basis();
        let c2 = b2.cols();
        let c1 = b1.cols();

        // Middle components must agree: [mid(B2) | -top(B1)] (s, t)^T = 0.
        let mid2 = b2.row_slice(d3, d3 + d2);
        let top1 = b1.row_slice(0, d2);
        let constraint = mid2.hstack(&top1.neg());
        let kernel = constraint.kernel_basis();

        let s_part = kernel.row_slice(0, c2);
        let t_part = kernel.row_slice(c2, c2 + c1);
        let v3 = b2.row_slice(0, d3).mul(&s_part);
        let v1 = b1.row_slice(d2, d2 + d1).mul(&t_part);
        let stacked = Mat::from_fn(d3 + d1, kernel.cols(), |i, j| {
            if i < d3 {
                v3[(i, j)].clone()
            } else {
                v1[(i - d3, j)].clone()
            }
        });
        let canonical = stacked.column_span_canonical();
        Correspondence::new(l2.left.clone(), l1.right.clone(), canonical)
    }
}

/// Generators of the symplectic group used to build exact random symplectic
/// matrices: shears by symmetric blocks and block-diagonal changes of basis.
#[derive(Debug, Clone)]
pub enum SpFactor {
    /// `[[I, B], [0, I]]` with `B` symmetric.
    UpperShear(Mat),
    /// `[[I, 0], [C, I]]` with `C` symmetric.
    LowerShear(Mat),
    /// `[[M, 0], [0, M^-T]]` with `M` invertible.
    Block(Mat),
}

/// Multiplies out a word of symplectic generators for the standard form on a
/// `2n`-dimensional space.
pub fn symplectic_from_factors(n: usize, factors: &[SpFactor]) -> Mat {
    let emb = |top_left: &Mat, top_right: &Mat, bot_left: &Mat, bot_right: &Mat| {
        Mat::from_fn(2 * n, 2 * n, |i, j| {
            let (bi, bj) = (i >= n, j >= n);
            let (ii, jj) = (i % n, j % n);
            match (bi, bj) {
                (false, false) => top_left[(ii, jj)].clone(),
                (false, true) => top_right[(ii, jj)].clone(),
                (true, false) => bot_left[(ii, jj)].clone(),
                (true, true) => bot_right[(ii, jj)].clone(),
            }
        })
    };
    let id = Mat::identity(n);
    let zero = Mat::zeros(n, n);
    let mut acc = Mat::identity(2 * n);
    for f in factors {
        let step = match f {
            SpFactor::UpperShear(b) => {
                assert_eq!(b, &b.transpose(), "shear block must be symmetric");
                emb(&id, b, &zero, &id)
            }
            SpFactor::LowerShear(c) => {
                assert_eq!(c, &c.transpose(), "shear block must be symmetric");
                emb(&id, &zero, c, &id)
            }
            SpFactor::Block(m) => {
                let m_inv_t = m
                    .inverse()
                    .expect("block factor must be invertible")
                    .transpose();
                emb(m, &zero, &zero, &m_inv_t)
            }
        };
        acc = acc.mul(&step);
    }
    acc
}
