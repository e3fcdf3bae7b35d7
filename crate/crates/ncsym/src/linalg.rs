//! Dense exact linear algebra over a tower's field.
//!
//! Everything here works on plain `Vec<FieldElement>` rows with fully
//! reduced row echelon form and first-nonzero pivoting, so results are
//! deterministic functions of the input order. A small rational-matrix
//! kernel at the bottom serves probes that work over the prime field.

use crate::field::{FieldElement, FieldTower};
use num::rational::BigRational;
use num::Zero;

/// Reduce `rows` to reduced row echelon form in place.
///
/// Returns the rank and the pivot column of each of the first `rank` rows.
pub fn rref(rows: &mut [Vec<FieldElement>]) -> (usize, Vec<usize>) {
    if rows.is_empty() {
        return (0, Vec::new());
    }
    let ncols = rows[0].len();
    let mut pivots = Vec::new();
    let mut r = 0;
    for col in 0..ncols {
        let Some(src) = (r..rows.len()).find(|&k| !rows[k][col].is_zero()) else {
            continue;
        };
        rows.swap(r, src);
        let inv = rows[r][col].inv().expect("pivot is nonzero");
        for v in rows[r].iter_mut() {
            *v = &*v * &inv;
        }
        for k in 0..rows.len() {
            if k == r || rows[k][col].is_zero() {
                continue;
            }
            let f = rows[k][col].clone();
            for c in 0..ncols {
                let t = &rows[r][c] * &f;
                rows[k][c] -= &t;
            }
        }
        pivots.push(col);
        r += 1;
        if r == rows.len() {
            break;
        }
    }
    (r, pivots)
}

pub fn rank(mut rows: Vec<Vec<FieldElement>>) -> usize {
    rref(&mut rows).0
}

/// Basis of `{ x : rows * x = 0 }` for a matrix given by its rows.
///
/// One vector per free column, unit at the free column; deterministic.
pub fn kernel_basis(
    tower: &FieldTower,
    ncols: usize,
    mut rows: Vec<Vec<FieldElement>>,
) -> Vec<Vec<FieldElement>> {
    debug_assert!(rows.iter().all(|r| r.len() == ncols));
    let (rank, pivots) = rref(&mut rows);
    let mut basis = Vec::with_capacity(ncols - rank);
    for free in 0..ncols {
        if pivots.contains(&free) {
            continue;
        }
        let mut v = vec![tower.zero(); ncols];
        v[free] = tower.one();
        for (k, &p) in pivots.iter().enumerate() {
            v[p] = -&rows[k][free];
        }
        basis.push(v);
    }
    basis
}

/// Express `rhs` as a linear combination of the given columns.
///
/// Returns the coefficient vector (free coefficients zero), or `None` when
/// `rhs` is outside the column span.
pub fn solve_from_columns(
    tower: &FieldTower,
    cols: &[Vec<FieldElement>],
    rhs: &[FieldElement],
) -> Option<Vec<FieldElement>> {
    let n = cols.len();
    let m = rhs.len();
    let mut rows: Vec<Vec<FieldElement>> = (0..m)
        .map(|r| {
            let mut row: Vec<FieldElement> = cols.iter().map(|c| c[r].clone()).collect();
            row.push(rhs[r].clone());
            row
        })
        .collect();
    let (_, pivots) = rref(&mut rows);
    if pivots.contains(&n) {
        return None; // pivot in the augmented column: inconsistent
    }
    let mut x = vec![tower.zero(); n];
    for (k, &p) in pivots.iter().enumerate() {
        x[p] = rows[k][n].clone();
    }
    Some(x)
}

/// Incrementally maintained row space in reduced echelon form.
///
/// `insert` answers whether the vector enlarged the span, so fixpoint loops
/// can stop as soon as nothing new arrives.
pub struct Span {
    ncols: usize,
    rows: Vec<Vec<FieldElement>>,
    pivots: Vec<usize>,
}

impl Span {
    pub fn new(ncols: usize) -> Self {
        Span {
            ncols,
            rows: Vec::new(),
            pivots: Vec::new(),
        }
    }

    pub fn dim(&self) -> usize {
        self.rows.len()
    }

    fn reduce(&self, v: &mut [FieldElement]) {
        for (row, &p) in self.rows.iter().zip(&self.pivots) {
            if v[p].is_zero() {
                continue;
            }
            let f = v[p].clone();
            for (c, entry) in v.iter_mut().enumerate() {
                let t = &row[c] * &f;
                *entry -= &t;
            }
        }
    }

    pub fn contains(&self, v: &[FieldElement]) -> bool {
        debug_assert_eq!(v.len(), self.ncols);
        let mut v = v.to_vec();
        self.reduce(&mut v);
        v.iter().all(FieldElement::is_zero)
    }

    /// Add a vector; `true` if the dimension grew.
    pub fn insert(&mut self, v: Vec<FieldElement>) -> bool {
        debug_assert_eq!(v.len(), self.ncols);
        let mut v = v;
        self.reduce(&mut v);
        let Some(pivot) = v.iter().position(|e| !e.is_zero()) else {
            return false;
        };
        let inv = v[pivot].inv().expect("pivot is nonzero");
        for e in v.iter_mut() {
            *e = &*e * &inv;
        }
        // eliminate the new pivot from the existing rows
        for row in self.rows.iter_mut() {
            if row[pivot].is_zero() {
                continue;
            }
            let f = row[pivot].clone();
            for (c, entry) in row.iter_mut().enumerate() {
                let t = &v[c] * &f;
                *entry -= &t;
            }
        }
        let at = self.pivots.partition_point(|&p| p < pivot);
        self.rows.insert(at, v);
        self.pivots.insert(at, pivot);
        true
    }
}

/// Reduced row echelon form over the rationals, in place; returns rank and
/// pivot columns.
pub fn rat_rref(rows: &mut [Vec<BigRational>]) -> (usize, Vec<usize>) {
    if rows.is_empty() {
        return (0, Vec::new());
    }
    let ncols = rows[0].len();
    let mut pivots = Vec::new();
    let mut r = 0;
    for col in 0..ncols {
        let Some(src) = (r..rows.len()).find(|&k| !rows[k][col].is_zero()) else {
            continue;
        };
        rows.swap(r, src);
        let inv = rows[r][col].recip();
        for v in rows[r].iter_mut() {
            *v *= &inv;
        }
        for k in 0..rows.len() {
            if k == r || rows[k][col].is_zero() {
                continue;
            }
            let f = std::mem::replace(&mut rows[k][col], BigRational::zero());
            rows[k][col] = BigRational::zero();
            for c in (col + 1)..ncols {
                let t = &rows[r][c] * &f;
                rows[k][c] -= t;
            }
        }
        pivots.push(col);
        r += 1;
        if r == rows.len() {
            break;
        }
    }
    (r, pivots)
}

/// Kernel basis of a rational matrix given by rows; one vector per free
/// column.
pub fn rat_kernel(ncols: usize, mut rows: Vec<Vec<BigRational>>) -> Vec<Vec<BigRational>> {
    use num::One;
    let (_, pivots) = rat_rref(&mut rows);
    let mut basis = Vec::new();
    for free in 0..ncols {
        if pivots.contains(&free) {
            continue;
        }
        let mut v = vec![BigRational::zero(); ncols];
        v[free] = BigRational::one();
        for (k, &p) in pivots.iter().enumerate() {
            v[p] = -rows[k][free].clone();
        }
        basis.push(v);
    }
    basis
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::instances;

    #[test]
    fn rank_and_kernel_agree_on_a_rational_function_matrix() {
        let r = instances::rational_function();
        let t = r.generators()[0].clone();
        // rows: [1, t], [t, t^2] has rank 1
        let rows = vec![
            vec![r.one(), t.clone()],
            vec![t.clone(), &t * &t],
        ];
        assert_eq!(rank(rows.clone()), 1);
        let ker = kernel_basis(&r, 2, rows);
        assert_eq!(ker.len(), 1);
        // kernel vector (-t, 1)
        assert_eq!(ker[0][0], -&t);
        assert_eq!(ker[0][1], r.one());
    }

    #[test]
    fn solving_against_columns_finds_exact_coefficients() {
        let k = instances::biquadratic();
        let b = k.field_basis().unwrap();
        let c1 = vec![k.one(), b[1].clone()];
        let c2 = vec![b[2].clone(), k.zero()];
        let rhs = vec![&k.from_i64(2) + &b[2], &k.from_i64(2) * &b[1]];
        let x = solve_from_columns(&k, &[c1, c2], &rhs).unwrap();
        assert_eq!(x, vec![k.from_i64(2), k.one()]);

        let inconsistent = vec![k.zero(), k.one()];
        assert!(solve_from_columns(&k, &[vec![k.one(), k.zero()]], &inconsistent).is_none());
    }

    #[test]
    fn span_grows_only_on_independent_vectors() {
        let k = instances::biquadratic();
        let b = k.field_basis().unwrap();
        let mut span = Span::new(3);
        assert!(span.insert(vec![k.one(), b[1].clone(), k.zero()]));
        assert!(!span.insert(vec![b[1].clone(), k.from_i64(2), k.zero()])); // sqrt2 * previous
        assert!(span.insert(vec![k.zero(), k.one(), b[3].clone()]));
        assert_eq!(span.dim(), 2);
        assert!(span.contains(&[k.one(), b[1].clone(), k.zero()]));
        assert!(!span.contains(&[k.zero(), k.zero(), k.one()]));
    }

    #[test]
    fn rational_kernel_has_complementary_dimension() {
        use num::{BigInt, One};
        let q = |n: i64| BigRational::from(BigInt::from(n));
        let rows = vec![vec![q(1), q(2), q(3)], vec![q(2), q(4), q(6)]];
        let ker = rat_kernel(3, rows);
        assert_eq!(ker.len(), 2);
        for v in &ker {
            let dot = &v[0] + &(&v[1] * &q(2)) + &(&v[2] * &q(3));
            assert!(dot.is_zero());
        }
        assert!(ker[0][1].is_one() || ker[0][2].is_one());
    }
}
