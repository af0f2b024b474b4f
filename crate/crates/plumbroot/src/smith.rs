//! Smith normal form of integer matrices with unimodular transforms.
//!
//! For a nondegenerate square matrix `B` this computes unimodular `U`, `V`
//! and a diagonal `D = diag(d_1, …, d_s)` with `d_i | d_{i+1}`, `d_i > 0`,
//! such that `U·B·V = D`. The cokernel `Zˢ / B·Zˢ` is then identified with
//! `⊕ Z/d_i` through `y ↦ U·y`.

use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::{One, Signed, Zero};

type Matrix = Vec<Vec<BigInt>>;

/// The Smith decomposition `U·B·V = D` of a nondegenerate square matrix.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct SmithForm {
    diag: Vec<BigInt>,
    u: Matrix,
    u_inv: Matrix,
    v: Matrix,
}

fn identity(n: usize) -> Matrix {
    (0..n)
        .map(|i| (0..n).map(|j| if i == j { BigInt::one() } else { BigInt::zero() }).collect())
        .collect()
}

/// Accumulates elementary operations on `a`, `u` (row ops), `u_inv`
/// (inverse row ops as column ops) and `v` (column ops).
struct Reducer {
    a: Matrix,
    u: Matrix,
    u_inv: Matrix,
    v: Matrix,
}

impl Reducer {
    /// row_i += c · row_j.
    fn add_row(&mut self, i: usize, j: usize, c: &BigInt) {
        if c.is_zero() {
            return;
        }
        let n = self.a.len();
        for k in 0..n {
            let t = &self.a[j][k] * c;
            self.a[i][k] += t;
            let t = &self.u[j][k] * c;
            self.u[i][k] += t;
            // inverse: col_j −= c · col_i on U⁻¹
            let t = &self.u_inv[k][i] * c;
            self.u_inv[k][j] -= t;
        }
    }

    /// col_i += c · col_j.
    fn add_col(&mut self, i: usize, j: usize, c: &BigInt) {
        if c.is_zero() {
            return;
        }
        let n = self.a.len();
        for k in 0..n {
            let t = &self.a[k][j] * c;
            self.a[k][i] += t;
            let t = &self.v[k][j] * c;
            self.v[k][i] += t;
        }
    }

    fn swap_rows(&mut self, i: usize, j: usize) {
        if i == j {
            return;
        }
        self.a.swap(i, j);
        self.u.swap(i, j);
        for row in self.u_inv.iter_mut() {
            row.swap(i, j);
        }
    }

    fn swap_cols(&mut self, i: usize, j: usize) {
        if i == j {
            return;
        }
        for row in self.a.iter_mut() {
            row.swap(i, j);
        }
        for row in self.v.iter_mut() {
            row.swap(i, j);
        }
    }

    fn negate_row(&mut self, i: usize) {
        let n = self.a.len();
        for k in 0..n {
            self.a[i][k] = -&self.a[i][k];
            self.u[i][k] = -&self.u[i][k];
            self.u_inv[k][i] = -&self.u_inv[k][i];
        }
    }
}

impl SmithForm {
    /// Decomposes a nondegenerate square integer matrix.
    ///
    /// # Panics
    /// Panics if the matrix is not square or is singular; callers only pass
    /// negative-definite intersection forms.
    pub fn new(b: &[Vec<i64>]) -> Self {
        let n = b.len();
        assert!(b.iter().all(|r| r.len() == n), "matrix must be square");
        let mut r = Reducer {
            a: b.iter().map(|row| row.iter().map(|&x| BigInt::from(x)).collect()).collect(),
            u: identity(n),
            u_inv: identity(n),
            v: identity(n),
        };
        for t in 0..n {
            loop {
                // Pivot: smallest nonzero |entry| in the trailing block.
                let mut best: Option<(usize, usize)> = None;
                for i in t..n {
                    for j in t..n {
                        if !r.a[i][j].is_zero()
                            && best.map_or(true, |(bi, bj)| r.a[i][j].abs() < r.a[bi][bj].abs())
                        {
                            best = Some((i, j));
                        }
                    }
                }
                let (pi, pj) = best.expect("matrix must be nondegenerate");
                r.swap_rows(t, pi);
                r.swap_cols(t, pj);
                let mut clean = true;
                for i in t + 1..n {
                    let q = r.a[i][t].div_floor(&r.a[t][t]);
                    r.add_row(i, t, &-q);
                    clean &= r.a[i][t].is_zero();
                }
                for j in t + 1..n {
                    let q = r.a[t][j].div_floor(&r.a[t][t]);
                    r.add_col(j, t, &-q);
                    clean &= r.a[t][j].is_zero();
                }
                if !clean {
                    continue;
                }
                // Divisibility: the pivot must divide every trailing entry.
                let bad = (t + 1..n)
                    .flat_map(|i| (t + 1..n).map(move |j| (i, j)))
                    .find(|&(i, j)| !r.a[i][j].is_multiple_of(&r.a[t][t]));
                match bad {
                    Some((i, _)) => {
                        let one = BigInt::one();
                        r.add_row(t, i, &one);
                    }
                    None => break,
                }
            }
            if r.a[t][t].is_negative() {
                r.negate_row(t);
            }
        }
        let diag = (0..n).map(|i| r.a[i][i].clone()).collect();
        SmithForm {
            diag,
            u: r.u,
            u_inv: r.u_inv,
            v: r.v,
        }
    }

    /// All elementary divisors `d_1 | d_2 | … | d_s`, including units.
    pub fn diagonal(&self) -> &[BigInt] {
        &self.diag
    }

    /// The elementary divisors greater than one (the invariant factors of
    /// the cokernel).
    pub fn invariant_factors(&self) -> Vec<BigInt> {
        self.diag.iter().filter(|d| !d.is_one()).cloned().collect()
    }

    /// Order of the cokernel, `Π d_i = |det B|`.
    pub fn order(&self) -> BigInt {
        self.diag.iter().product()
    }

    /// The left transform `U`.
    pub fn u(&self) -> &[Vec<BigInt>] {
        &self.u
    }

    /// The inverse of the left transform.
    pub fn u_inv(&self) -> &[Vec<BigInt>] {
        &self.u_inv
    }

    /// The right transform `V`.
    pub fn v(&self) -> &[Vec<BigInt>] {
        &self.v
    }

    /// Smith coordinates `(U·y)_i mod d_i` of a vector `y ∈ Zˢ`, reduced to
    /// `0 ≤ c_i < d_i`.
    pub fn coordinates(&self, y: &[i64]) -> Vec<BigInt> {
        self.u
            .iter()
            .zip(&self.diag)
            .map(|(row, d)| {
                let v: BigInt = row.iter().zip(y).map(|(a, &b)| a * BigInt::from(b)).sum();
                v.mod_floor(d)
            })
            .collect()
    }

    /// A vector `y = U⁻¹·c` representing the Smith coordinates `c`.
    pub fn representative(&self, c: &[BigInt]) -> Vec<BigInt> {
        self.u_inv
            .iter()
            .map(|row| row.iter().zip(c).map(|(a, b)| a * b).sum())
            .collect()
    }

    /// Mixed-radix index of reduced Smith coordinates, least significant
    /// coordinate last.
    pub fn index_of(&self, c: &[BigInt]) -> BigInt {
        c.iter()
            .zip(&self.diag)
            .fold(BigInt::zero(), |acc, (ci, d)| acc * d + ci)
    }

    /// Inverse of [`index_of`](Self::index_of).
    pub fn coordinates_of_index(&self, index: &BigInt) -> Vec<BigInt> {
        let mut rest = index.clone();
        let mut c = vec![BigInt::zero(); self.diag.len()];
        for (i, d) in self.diag.iter().enumerate().rev() {
            let (q, r) = rest.div_mod_floor(d);
            c[i] = r;
            rest = q;
        }
        c
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn mul(a: &[Vec<BigInt>], b: &[Vec<BigInt>]) -> Matrix {
        let n = a.len();
        (0..n)
            .map(|i| (0..n).map(|j| (0..n).map(|k| &a[i][k] * &b[k][j]).sum()).collect())
            .collect()
    }

    fn big(m: &[Vec<i64>]) -> Matrix {
        m.iter().map(|r| r.iter().map(|&x| BigInt::from(x)).collect()).collect()
    }

    fn check(b: &[Vec<i64>]) -> SmithForm {
        let f = SmithForm::new(b);
        let n = b.len();
        let d = mul(&mul(f.u(), &big(b)), f.v());
        for i in 0..n {
            for j in 0..n {
                let want = if i == j { f.diag[i].clone() } else { BigInt::zero() };
                assert_eq!(d[i][j], want);
            }
        }
        assert_eq!(mul(f.u(), f.u_inv()), identity(n));
        for w in f.diag.windows(2) {
            assert!(w[1].is_multiple_of(&w[0]));
        }
        f
    }

    #[test]
    fn scalar_cases() {
        assert_eq!(check(&[vec![-1]]).order(), BigInt::from(1));
        assert_eq!(check(&[vec![-2]]).invariant_factors(), vec![BigInt::from(2)]);
    }

    #[test]
    fn cyclic_lens_chain() {
        let f = check(&[vec![-2, 1], vec![1, -3]]);
        assert_eq!(f.invariant_factors(), vec![BigInt::from(5)]);
    }

    #[test]
    fn non_cyclic_d4() {
        let f = check(&[
            vec![-2, 1, 1, 1],
            vec![1, -2, 0, 0],
            vec![1, 0, -2, 0],
            vec![1, 0, 0, -2],
        ]);
        assert_eq!(f.invariant_factors(), vec![BigInt::from(2), BigInt::from(2)]);
        for idx in 0..4 {
            let c = f.coordinates_of_index(&BigInt::from(idx));
            assert_eq!(f.index_of(&c), BigInt::from(idx));
        }
    }

    #[test]
    fn diag_needing_divisibility_fix() {
        let f = check(&[vec![2, 0], vec![0, 3]]);
        assert_eq!(f.diagonal(), &[BigInt::from(1), BigInt::from(6)]);
    }
}
