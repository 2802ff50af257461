//! Integer matrices and Smith normal form over arbitrary-precision integers,
//! with a solver for `A x = b` over `Z` and `Z/m`.

use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::{One, Signed, Zero};

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct IMat {
    rows: usize,
    cols: usize,
    data: Vec<BigInt>,
}

impl IMat {
    pub fn zeros(rows: usize, cols: usize) -> Self {
        IMat {
            rows,
            cols,
            data: vec![BigInt::zero(); rows * cols],
        }
    }

    pub fn identity(n: usize) -> Self {
        let mut m = IMat::zeros(n, n);
        for i in 0..n {
            m.set(i, i, BigInt::one());
        }
        m
    }

    pub fn from_rows(rows: Vec<Vec<BigInt>>) -> Self {
        let r = rows.len();
        let c = rows.first().map_or(0, |row| row.len());
        assert!(rows.iter().all(|row| row.len() == c), "ragged rows");
        IMat {
            rows: r,
            cols: c,
            data: rows.into_iter().flatten().collect(),
        }
    }

    pub fn rows(&self) -> usize {
        self.rows
    }

    pub fn cols(&self) -> usize {
        self.cols
    }

    pub fn get(&self, i: usize, j: usize) -> &BigInt {
        &self.data[i * self.cols + j]
    }

    pub fn set(&mut self, i: usize, j: usize, v: BigInt) {
        self.data[i * self.cols + j] = v;
    }

    pub fn mul_vec(&self, v: &[BigInt]) -> Vec<BigInt> {
        assert_eq!(v.len(), self.cols);
        (0..self.rows)
            .map(|i| {
                (0..self.cols)
                    .map(|j| self.get(i, j) * &v[j])
                    .sum::<BigInt>()
            })
            .collect()
    }

    pub fn mul(&self, rhs: &IMat) -> IMat {
        assert_eq!(self.cols, rhs.rows);
        let mut out = IMat::zeros(self.rows, rhs.cols);
        for i in 0..self.rows {
            for j in 0..rhs.cols {
                let mut acc = BigInt::zero();
                for k in 0..self.cols {
                    acc += self.get(i, k) * rhs.get(k, j);
                }
                out.set(i, j, acc);
            }
        }
        out
    }

    fn swap_rows(&mut self, a: usize, b: usize) {
        if a == b {
            return;
        }
        for j in 0..self.cols {
            self.data.swap(a * self.cols + j, b * self.cols + j);
        }
    }

    fn swap_cols(&mut self, a: usize, b: usize) {
        if a == b {
            return;
        }
        for i in 0..self.rows {
            self.data.swap(i * self.cols + a, i * self.cols + b);
        }
    }

    /// `row_a -= q * row_b`
    fn row_sub_mul(&mut self, a: usize, b: usize, q: &BigInt) {
        for j in 0..self.cols {
            let d = q * self.get(b, j);
            let v = self.get(a, j) - d;
            self.set(a, j, v);
        }
    }

    /// `col_a -= q * col_b`
    fn col_sub_mul(&mut self, a: usize, b: usize, q: &BigInt) {
        for i in 0..self.rows {
            let d = q * self.get(i, b);
            let v = self.get(i, a) - d;
            self.set(i, a, v);
        }
    }

    fn negate_row(&mut self, r: usize) {
        for j in 0..self.cols {
            let v = -self.get(r, j).clone();
            self.set(r, j, v);
        }
    }
}

/// `u * a * v = d` with `u`, `v` unimodular and `d` diagonal with
/// nonnegative entries in a divisibility chain.
#[derive(Debug, Clone)]
pub struct Smith {
    pub u: IMat,
    pub d: IMat,
    pub v: IMat,
}

pub fn smith_normal_form(a: &IMat) -> Smith {
    let mut d = a.clone();
    let mut u = IMat::identity(a.rows());
    let mut v = IMat::identity(a.cols());
    let bound = a.rows().min(a.cols());

    let pick = |d: &IMat, t: usize| -> Option<(usize, usize)> {
        let mut best: Option<(usize, usize)> = None;
        for i in t..d.rows() {
            for j in t..d.cols() {
                if d.get(i, j).is_zero() {
                    continue;
                }
                match best {
                    Some((bi, bj)) if d.get(bi, bj).abs() <= d.get(i, j).abs() => {}
                    _ => best = Some((i, j)),
                }
            }
        }
        best
    };

    let mut t = 0;
    while t < bound {
        let Some((pi, pj)) = pick(&d, t) else {
            break;
        };
        d.swap_rows(t, pi);
        u.swap_rows(t, pi);
        d.swap_cols(t, pj);
        v.swap_cols(t, pj);

        'reduce: loop {
            if d.get(t, t).is_negative() {
                d.negate_row(t);
                u.negate_row(t);
            }
            // Euclidean steps down the pivot column.
            for i in t + 1..d.rows() {
                if d.get(i, t).is_zero() {
                    continue;
                }
                let q = d.get(i, t).div_floor(d.get(t, t));
                d.row_sub_mul(i, t, &q);
                u.row_sub_mul(i, t, &q);
                if !d.get(i, t).is_zero() {
                    // Remainder is a strictly smaller pivot.
                    d.swap_rows(t, i);
                    u.swap_rows(t, i);
                    continue 'reduce;
                }
            }
            // Euclidean steps along the pivot row.
            for j in t + 1..d.cols() {
                if d.get(t, j).is_zero() {
                    continue;
                }
                let q = d.get(t, j).div_floor(d.get(t, t));
                d.col_sub_mul(j, t, &q);
                v.col_sub_mul(j, t, &q);
                if !d.get(t, j).is_zero() {
                    d.swap_cols(t, j);
                    v.swap_cols(t, j);
                    continue 'reduce;
                }
            }
            // Divisibility pass: fold a non-divisible entry into the pivot row.
            for i in t + 1..d.rows() {
                for j in t + 1..d.cols() {
                    if !d.get(i, j).mod_floor(d.get(t, t)).is_zero() {
                        let one = BigInt::from(-1);
                        d.row_sub_mul(t, i, &one);
                        u.row_sub_mul(t, i, &one);
                        continue 'reduce;
                    }
                }
            }
            break;
        }
        t += 1;
    }
    Smith { u, d, v }
}

/// Certificate that a transformed constraint has no solution: after reducing
/// to diagonal form, row `row` demands `divisor * y = residue` (over `Z`, or
/// modulo the stated modulus) with no integer solution.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct UnsolvableRow {
    pub row: usize,
    pub divisor: BigInt,
    pub residue: BigInt,
    pub modulus: Option<BigInt>,
}

/// Solves `a x = rhs` over `Z` (`modulus` = `None`) or over `Z/m`.
pub fn solve(
    a: &IMat,
    rhs: &[BigInt],
    modulus: Option<&BigInt>,
) -> Result<Vec<BigInt>, UnsolvableRow> {
    assert_eq!(rhs.len(), a.rows());
    if let Some(m) = modulus {
        assert!(m.is_positive(), "modulus must be positive");
    }
    let s = smith_normal_form(a);
    let c = s.u.mul_vec(rhs);
    let rank_bound = a.rows().min(a.cols());
    let mut y = vec![BigInt::zero(); a.cols()];
    for (i, ci) in c.iter().enumerate() {
        let di = if i < rank_bound {
            s.d.get(i, i).clone()
        } else {
            BigInt::zero()
        };
        let fail = |residue: BigInt| UnsolvableRow {
            row: i,
            divisor: di.clone(),
            residue,
            modulus: modulus.cloned(),
        };
        match modulus {
            None => {
                if di.is_zero() {
                    if !ci.is_zero() {
                        return Err(fail(ci.clone()));
                    }
                } else {
                    let (q, r) = ci.div_rem(&di);
                    if !r.is_zero() {
                        return Err(fail(ci.clone()));
                    }
                    y[i] = q;
                }
            }
            Some(m) => {
                let cm = ci.mod_floor(m);
                if di.is_zero() {
                    if !cm.is_zero() {
                        return Err(fail(cm));
                    }
                } else {
                    // di * y = ci (mod m) is solvable iff gcd(di, m) | ci.
                    let g = di.gcd(m);
                    if !cm.mod_floor(&g).is_zero() {
                        return Err(fail(cm));
                    }
                    let di_r = &di / &g;
                    let m_r = m / &g;
                    let ci_r = &cm / &g;
                    if m_r.is_one() {
                        y[i] = BigInt::zero();
                    } else {
                        let e = di_r.extended_gcd(&m_r);
                        let inv = e.x.mod_floor(&m_r);
                        y[i] = (ci_r * inv).mod_floor(&m_r);
                    }
                }
            }
        }
    }
    let mut x = s.v.mul_vec(&y);
    if let Some(m) = modulus {
        for e in &mut x {
            *e = e.mod_floor(m);
        }
    }
    Ok(x)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn im(rows: &[&[i64]]) -> IMat {
        IMat::from_rows(
            rows.iter()
                .map(|r| r.iter().map(|&v| BigInt::from(v)).collect())
                .collect(),
        )
    }

    fn b(v: i64) -> BigInt {
        BigInt::from(v)
    }

    /// Determinant-divisor oracle: the product `d_1 ... d_k` of the first `k`
    /// Smith entries is the gcd of all `k x k` minors.
    fn minor_gcd(a: &IMat, k: usize) -> BigInt {
        fn combos(n: usize, k: usize) -> Vec<Vec<usize>> {
            if k == 0 {
                return vec![vec![]];
            }
            let mut out = Vec::new();
            for first in 0..n {
                for mut rest in combos(n, k - 1) {
                    if rest.iter().all(|&r| r > first) {
                        let mut c = vec![first];
                        c.append(&mut rest);
                        out.push(c);
                    }
                }
            }
            out
        }
        fn det(a: &IMat, rows: &[usize], cols: &[usize]) -> BigInt {
            if rows.len() == 1 {
                return a.get(rows[0], cols[0]).clone();
            }
            let mut acc = BigInt::zero();
            for (idx, &c) in cols.iter().enumerate() {
                let sub_cols: Vec<usize> =
                    cols.iter().copied().filter(|&x| x != c).collect();
                let minor = det(a, &rows[1..], &sub_cols);
                let signed = if idx % 2 == 0 { minor } else { -minor };
                acc += a.get(rows[0], c) * signed;
            }
            acc
        }
        let mut g = BigInt::zero();
        for rows in combos(a.rows(), k) {
            for cols in combos(a.cols(), k) {
                g = g.gcd(&det(a, &rows, &cols));
            }
        }
        g
    }

    #[test]
    fn snf_diagonalizes_with_unimodular_transforms() {
        let a = im(&[&[2, 4, 4], &[-6, 6, 12], &[10, 4, 16]]);
        let s = smith_normal_form(&a);
        let prod = s.u.mul(&a).mul(&s.v);
        assert_eq!(prod, s.d);
        for i in 0..3 {
            for j in 0..3 {
                if i != j {
                    assert!(s.d.get(i, j).is_zero());
                }
            }
        }
        // Diagonal pinned by the determinant-divisor oracle.
        let mut running = BigInt::one();
        for k in 1..=3usize {
            running *= s.d.get(k - 1, k - 1);
            assert_eq!(running, minor_gcd(&a, k), "divisor {}", k);
        }
    }

    #[test]
    fn snf_divisibility_chain() {
        let a = im(&[&[6, 0], &[0, 4]]);
        let s = smith_normal_form(&a);
        let d0 = s.d.get(0, 0);
        let d1 = s.d.get(1, 1);
        assert!(d1.mod_floor(d0).is_zero(), "{} | {}", d0, d1);
        assert_eq!(d0 * d1, b(24));
    }

    #[test]
    fn solve_over_z() {
        let a = im(&[&[2, 0], &[0, 3]]);
        let x = solve(&a, &[b(4), b(9)], None).unwrap();
        assert_eq!(a.mul_vec(&x), vec![b(4), b(9)]);
        assert!(solve(&a, &[b(3), b(9)], None).is_err());
    }

    #[test]
    fn solve_underdetermined() {
        let a = im(&[&[1, 2, 3]]);
        let x = solve(&a, &[b(7)], None).unwrap();
        assert_eq!(a.mul_vec(&x), vec![b(7)]);
    }

    #[test]
    fn solve_mod_m() {
        // 2y = 1 has no solution mod 4, but 2y = 2 does.
        let a = im(&[&[2]]);
        let m = b(4);
        assert!(solve(&a, &[b(1)], Some(&m)).is_err());
        let x = solve(&a, &[b(2)], Some(&m)).unwrap();
        assert_eq!((b(2) * &x[0]).mod_floor(&m), b(2));
        // Inconsistent zero row mod 2.
        let z = im(&[&[0]]);
        assert!(solve(&z, &[b(1)], Some(&b(2))).is_err());
        assert!(solve(&z, &[b(2)], Some(&b(2))).is_ok());
    }

    #[test]
    fn solve_random_consistent_systems() {
        use rand::{Rng, SeedableRng};
        use rand_chacha::ChaCha8Rng;
        let mut rng = ChaCha8Rng::seed_from_u64(31);
        for _ in 0..60 {
            let rows = rng.gen_range(1..=4);
            let cols = rng.gen_range(1..=4);
            let a = IMat::from_rows(
                (0..rows)
                    .map(|_| (0..cols).map(|_| b(rng.gen_range(-5..=5))).collect())
                    .collect(),
            );
            let x0: Vec<BigInt> = (0..cols).map(|_| b(rng.gen_range(-4..=4))).collect();
            let rhs = a.mul_vec(&x0);
            // Over Z: constructed to be consistent, so the solver must succeed.
            let x = solve(&a, &rhs, None).unwrap();
            assert_eq!(a.mul_vec(&x), rhs);
            // Mod m: likewise.
            let m = b(rng.gen_range(2..=6));
            let xm = solve(&a, &rhs, Some(&m)).unwrap();
            let got = a.mul_vec(&xm);
            for (g, r) in got.iter().zip(&rhs) {
                assert_eq!(g.mod_floor(&m), r.mod_floor(&m));
            }
        }
    }
}
