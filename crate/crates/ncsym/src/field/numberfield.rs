//! Number fields presented by a fixed rational basis.
//!
//! An element is its coordinate vector; multiplication goes through a
//! precomputed table of basis products, and the two involutions are
//! rational matrices in the same basis. Inverses are found by solving the
//! linear system `x * y = 1` against the left-multiplication matrix of `x`.

use num::rational::BigRational;
use num::{One, Zero};

/// Presentation data for a number field with two involutions.
pub struct NumberFieldData {
    /// Printable names for the basis vectors; `names[0]` must be the unit.
    pub basis_names: Vec<&'static str>,
    /// Flattened `dim * dim` table: entry `a * dim + b` lists the terms of
    /// `basis[a] * basis[b]` as `(basis index, coefficient)` pairs.
    pub mult: Vec<Vec<(usize, BigRational)>>,
    /// Involution matrices, row-major `dim * dim`; `tau[i]` sends the
    /// coordinate vector `x` to `M x`.
    pub tau: [Vec<BigRational>; 2],
    /// Coordinates of the chosen anti-invariant element for each involution.
    pub w: [Vec<BigRational>; 2],
    /// Coordinates of field generators (enough to generate over the
    /// rationals); used when iterating automorphisms.
    pub generators: Vec<Vec<BigRational>>,
    /// Rational basis of the intersection of the two fixed subfields.
    pub intersection_basis: Vec<Vec<BigRational>>,
    /// Rational basis of each fixed subfield, as coordinate vectors.
    pub subfield_basis: [Vec<Vec<BigRational>>; 2],
}

impl NumberFieldData {
    pub fn dim(&self) -> usize {
        self.basis_names.len()
    }

    pub fn zero_coords(&self) -> Vec<BigRational> {
        vec![BigRational::zero(); self.dim()]
    }

    pub fn unit_coords(&self) -> Vec<BigRational> {
        let mut c = self.zero_coords();
        c[0] = BigRational::one();
        c
    }

    pub fn basis_coords(&self, k: usize) -> Vec<BigRational> {
        let mut c = self.zero_coords();
        c[k] = BigRational::one();
        c
    }

    pub fn mul_coords(&self, x: &[BigRational], y: &[BigRational]) -> Vec<BigRational> {
        let d = self.dim();
        let mut out = self.zero_coords();
        for (a, xa) in x.iter().enumerate() {
            if xa.is_zero() {
                continue;
            }
            for (b, yb) in y.iter().enumerate() {
                if yb.is_zero() {
                    continue;
                }
                let prod = xa * yb;
                for (k, c) in &self.mult[a * d + b] {
                    out[*k] += &prod * c;
                }
            }
        }
        out
    }

    pub fn apply_matrix(&self, m: &[BigRational], x: &[BigRational]) -> Vec<BigRational> {
        let d = self.dim();
        let mut out = self.zero_coords();
        for (r, slot) in out.iter_mut().enumerate() {
            for (c, xc) in x.iter().enumerate() {
                if !xc.is_zero() {
                    *slot += &m[r * d + c] * xc;
                }
            }
        }
        out
    }

    /// Coordinates of `x^{-1}`, or `None` when `x` is zero.
    pub fn inv_coords(&self, x: &[BigRational]) -> Option<Vec<BigRational>> {
        if x.iter().all(|c| c.is_zero()) {
            return None;
        }
        let d = self.dim();
        // Column c of the system is x * basis[c].
        let mut rows = vec![vec![BigRational::zero(); d]; d];
        for c in 0..d {
            let col = self.mul_coords(x, &self.basis_coords(c));
            for (r, v) in col.into_iter().enumerate() {
                rows[r][c] = v;
            }
        }
        let mut rhs = vec![BigRational::zero(); d];
        rhs[0] = BigRational::one();
        solve_square(rows, rhs)
    }
}

/// Solve `A x = b` by Gaussian elimination over the rationals.
///
/// Returns `None` when the matrix is singular; we only feed it systems
/// that are singular exactly for invalid inputs (division by zero).
fn solve_square(mut a: Vec<Vec<BigRational>>, mut b: Vec<BigRational>) -> Option<Vec<BigRational>> {
    let n = b.len();
    for col in 0..n {
        let pivot = (col..n).find(|&r| !a[r][col].is_zero())?;
        a.swap(col, pivot);
        b.swap(col, pivot);
        let inv = a[col][col].recip();
        for v in a[col].iter_mut() {
            *v *= &inv;
        }
        b[col] *= &inv;
        for r in 0..n {
            if r == col || a[r][col].is_zero() {
                continue;
            }
            let f = std::mem::replace(&mut a[r][col], BigRational::zero());
            for c in (col + 1)..n {
                let t = &a[col][c] * &f;
                a[r][c] -= t;
            }
            let t = &b[col] * &f;
            b[r] -= t;
        }
    }
    Some(b)
}

#[cfg(test)]
mod tests {
    use super::*;
    use num::BigInt;

    fn q(n: i64) -> BigRational {
        BigRational::from(BigInt::from(n))
    }

    #[test]
    fn gaussian_solver_handles_permuted_pivots() {
        // [[0, 1], [2, 0]] x = [3, 4]  => x = [2, 3]
        let a = vec![vec![q(0), q(1)], vec![q(2), q(0)]];
        let x = solve_square(a, vec![q(3), q(4)]).unwrap();
        assert_eq!(x, vec![q(2), q(3)]);
        let singular = vec![vec![q(1), q(2)], vec![q(2), q(4)]];
        assert!(solve_square(singular, vec![q(0), q(1)]).is_none());
    }
}
