//! Exact rational row reduction: canonical row spaces, membership tests,
//! and linear solves. Pivot choice is always the first nonzero column, so
//! equal subspaces produce identical bases.

use crate::ring::Rat;
use num_traits::Zero;

/// A subspace of Q^dim kept in reduced row echelon form: pivots are 1,
/// pivot columns are otherwise zero, rows ordered by pivot column.
#[derive(Debug, Clone, PartialEq)]
pub struct RowSpace {
    dim: usize,
    rows: Vec<Vec<Rat>>,
}

impl RowSpace {
    pub fn new(dim: usize) -> Self {
        RowSpace { dim, rows: Vec::new() }
    }

    pub fn ambient_dim(&self) -> usize {
        self.dim
    }

    pub fn rank(&self) -> usize {
        self.rows.len()
    }

    pub fn rows(&self) -> &[Vec<Rat>] {
        &self.rows
    }

    fn pivot_col(row: &[Rat]) -> Option<usize> {
        row.iter().position(|c| !Zero::is_zero(c))
    }

    /// Reduce `v` against the current rows, returning the remainder.
    pub fn reduce(&self, v: &[Rat]) -> Vec<Rat> {
        assert_eq!(v.len(), self.dim, "vector length mismatch");
        let mut v = v.to_vec();
        for row in &self.rows {
            let p = Self::pivot_col(row).expect("stored rows are nonzero");
            if !Zero::is_zero(&v[p]) {
                let factor = v[p].clone();
                for (vi, ri) in v.iter_mut().zip(row.iter()) {
                    *vi = &*vi - &(&factor * ri);
                }
            }
        }
        v
    }

    pub fn contains(&self, v: &[Rat]) -> bool {
        self.reduce(v).iter().all(Zero::is_zero)
    }

    /// Insert a vector; returns true when it enlarged the space.
    pub fn insert(&mut self, v: &[Rat]) -> bool {
        let mut r = self.reduce(v);
        let Some(p) = Self::pivot_col(&r) else {
            return false;
        };
        let inv = r[p].clone().recip();
        for c in r.iter_mut() {
            *c = &*c * &inv;
        }
        // Clear the new pivot column from existing rows.
        for row in self.rows.iter_mut() {
            if !Zero::is_zero(&row[p]) {
                let factor = row[p].clone();
                for (ri, ni) in row.iter_mut().zip(r.iter()) {
                    *ri = &*ri - &(&factor * ni);
                }
            }
        }
        let at = self
            .rows
            .iter()
            .position(|row| Self::pivot_col(row).unwrap() > p)
            .unwrap_or(self.rows.len());
        self.rows.insert(at, r);
        true
    }

    pub fn insert_all<'a, I: IntoIterator<Item = &'a Vec<Rat>>>(&mut self, vs: I) {
        for v in vs {
            self.insert(v);
        }
    }

    pub fn is_subspace_of(&self, other: &RowSpace) -> bool {
        self.rows.iter().all(|r| other.contains(r))
    }
}

/// Rank of an arbitrary list of rational vectors.
pub fn rank(vectors: &[Vec<Rat>], dim: usize) -> usize {
    let mut space = RowSpace::new(dim);
    for v in vectors {
        space.insert(v);
    }
    space.rank()
}

/// Solve `sum_k x_k columns[k] = target` exactly. Returns `None` when the
/// target is outside the column span; a unique solution is only guaranteed
/// for independent columns (free variables are set to zero).
pub fn solve_columns(columns: &[Vec<Rat>], target: &[Rat]) -> Option<Vec<Rat>> {
    let ncols = columns.len();
    let nrows = target.len();
    for c in columns {
        assert_eq!(c.len(), nrows, "column length mismatch");
    }
    // Gaussian elimination on the augmented matrix [columns | target].
    let mut aug: Vec<Vec<Rat>> = (0..nrows)
        .map(|i| {
            let mut row: Vec<Rat> = columns.iter().map(|c| c[i].clone()).collect();
            row.push(target[i].clone());
            row
        })
        .collect();

    let mut pivot_of_col: Vec<Option<usize>> = vec![None; ncols];
    let mut r = 0usize;
    for c in 0..ncols {
        let Some(pr) = (r..nrows).find(|&i| !Zero::is_zero(&aug[i][c])) else {
            continue;
        };
        aug.swap(r, pr);
        let inv = aug[r][c].clone().recip();
        for x in aug[r].iter_mut() {
            *x = &*x * &inv;
        }
        for i in 0..nrows {
            if i != r && !Zero::is_zero(&aug[i][c]) {
                let f = aug[i][c].clone();
                for j in 0..=ncols {
                    let delta = &f * &aug[r][j];
                    aug[i][j] = &aug[i][j] - &delta;
                }
            }
        }
        pivot_of_col[c] = Some(r);
        r += 1;
        if r == nrows {
            break;
        }
    }
    // Inconsistent if any zero-row has nonzero rhs.
    for row in aug.iter().skip(r) {
        if row[..ncols].iter().all(Zero::is_zero) && !Zero::is_zero(&row[ncols]) {
            return None;
        }
    }
    // Rows r..nrows may still be unchecked when r == nrows; handled above.
    let mut x = vec![Rat::zero(); ncols];
    for (c, pr) in pivot_of_col.iter().enumerate() {
        if let Some(pr) = pr {
            x[c] = aug[*pr][ncols].clone();
        }
    }
    Some(x)
}

/// Check whether the given vectors are linearly independent.
pub fn independent(vectors: &[Vec<Rat>], dim: usize) -> bool {
    rank(vectors, dim) == vectors.len()
}

/// Float Gaussian elimination with partial pivoting; returns `None` for a
/// numerically singular system. Used only by numeric diagnostics.
pub fn solve_f64(mut a: Vec<Vec<f64>>, mut b: Vec<f64>) -> Option<Vec<f64>> {
    let n = b.len();
    assert_eq!(a.len(), n);
    for r in 0..n {
        let (pr, pv) = (r..n)
            .map(|i| (i, a[i][r].abs()))
            .max_by(|x, y| x.1.total_cmp(&y.1))?;
        if pv < 1e-12 {
            return None;
        }
        a.swap(r, pr);
        b.swap(r, pr);
        for i in (r + 1)..n {
            let f = a[i][r] / a[r][r];
            for j in r..n {
                a[i][j] -= f * a[r][j];
            }
            b[i] -= f * b[r];
        }
    }
    let mut x = vec![0.0; n];
    for r in (0..n).rev() {
        let s: f64 = ((r + 1)..n).map(|j| a[r][j] * x[j]).sum();
        x[r] = (b[r] - s) / a[r][r];
    }
    Some(x)
}

/// Least-squares membership test: distance of `target` from the span of
/// `columns`, via normal equations. Small, well-conditioned systems only.
pub fn residual_from_span_f64(columns: &[Vec<f64>], target: &[f64]) -> f64 {
    let k = columns.len();
    if k == 0 {
        return target.iter().map(|x| x * x).sum::<f64>().sqrt();
    }
    let gram: Vec<Vec<f64>> = (0..k)
        .map(|i| {
            (0..k)
                .map(|j| columns[i].iter().zip(&columns[j]).map(|(a, b)| a * b).sum())
                .collect()
        })
        .collect();
    let rhs: Vec<f64> = (0..k)
        .map(|i| columns[i].iter().zip(target).map(|(a, b)| a * b).sum())
        .collect();
    // Tiny ridge keeps rank-deficient spans from aborting the diagnostic.
    let mut gram = gram;
    for (i, row) in gram.iter_mut().enumerate() {
        row[i] += 1e-12;
    }
    let Some(x) = solve_f64(gram, rhs) else {
        return f64::INFINITY;
    };
    let mut res = 0.0f64;
    for (r, t) in target.iter().enumerate() {
        let fit: f64 = (0..k).map(|j| columns[j][r] * x[j]).sum();
        res += (t - fit) * (t - fit);
    }
    res.sqrt()
}

/// Number of affinely independent points among `points` (each a flat
/// coordinate vector), using a float rank with the given tolerance.
pub fn affine_independent_count(points: &[Vec<f64>], tol: f64) -> usize {
    if points.is_empty() {
        return 0;
    }
    let base = &points[0];
    let mut rows: Vec<Vec<f64>> = Vec::new();
    let mut count = 1usize;
    'outer: for p in &points[1..] {
        let mut v: Vec<f64> = p.iter().zip(base).map(|(a, b)| a - b).collect();
        // Reduce against accepted rows.
        for row in &rows {
            let dot: f64 = v.iter().zip(row).map(|(a, b)| a * b).sum();
            let norm2: f64 = row.iter().map(|x| x * x).sum();
            if norm2 > 0.0 {
                let f = dot / norm2;
                for (vi, ri) in v.iter_mut().zip(row) {
                    *vi -= f * ri;
                }
            }
        }
        let norm: f64 = v.iter().map(|x| x * x).sum::<f64>().sqrt();
        if norm > tol {
            rows.push(v);
            count += 1;
            continue 'outer;
        }
    }
    count
}
