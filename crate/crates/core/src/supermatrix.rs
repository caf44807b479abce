//! Z2-graded (m|n)-block square matrices: superbracket, supertrace,
//! Berezinian, and the exponential used by flows.
//!
//! Parity is positional: rows and columns below `m` are even slots, the
//! rest odd. In the exact-rational analysis mode a homogeneous matrix may
//! carry entries anywhere and only the declared parity feeds the bracket
//! sign (the usual homogeneous-basis convention for gl(m|n)). In the
//! simulation mode entries are float-coefficient Grassmann numbers and
//! entry parities can additionally be validated against block positions.

use crate::error::{Error, Result};
use crate::grassmann::{GrassmannNumber, Parity};
use crate::ring::{rat_to_f64, Rat, Ring};

/// Float-coefficient Grassmann number, the simulation-mode entry type.
pub type Gf = GrassmannNumber<f64>;

#[derive(Debug, Clone, PartialEq)]
pub struct SuperMatrix<T> {
    m: usize,
    n: usize,
    parity: Option<Parity>,
    entries: Vec<T>,
}

impl<T: Ring> SuperMatrix<T> {
    pub fn zero(m: usize, n: usize, parity: Option<Parity>) -> Self {
        assert!(m + n > 0, "block sizes must not both be zero");
        SuperMatrix { m, n, parity, entries: vec![T::zero(); (m + n) * (m + n)] }
    }

    pub fn identity(m: usize, n: usize) -> Self {
        let mut out = Self::zero(m, n, Some(Parity::Even));
        for i in 0..(m + n) {
            out.set(i, i, T::one());
        }
        out
    }

    pub fn from_rows(m: usize, n: usize, parity: Option<Parity>, rows: Vec<Vec<T>>) -> Result<Self> {
        let size = m + n;
        if rows.len() != size || rows.iter().any(|r| r.len() != size) {
            return Err(Error::ShapeMismatch { m1: m, n1: n, m2: rows.len(), n2: 0 });
        }
        Ok(SuperMatrix { m, n, parity, entries: rows.into_iter().flatten().collect() })
    }

    /// Matrix unit `e_{ij}` (0-based indices) with its positional parity.
    pub fn unit(m: usize, n: usize, i: usize, j: usize) -> Self {
        let mut out = Self::zero(m, n, None);
        out.parity = Some(out.positional_parity(i, j));
        out.set(i, j, T::one());
        out
    }

    pub fn block_sizes(&self) -> (usize, usize) {
        (self.m, self.n)
    }

    pub fn size(&self) -> usize {
        self.m + self.n
    }

    pub fn declared_parity(&self) -> Option<Parity> {
        self.parity
    }

    pub fn with_parity(mut self, parity: Option<Parity>) -> Self {
        self.parity = parity;
        self
    }

    pub fn entry(&self, i: usize, j: usize) -> &T {
        &self.entries[i * self.size() + j]
    }

    pub fn set(&mut self, i: usize, j: usize, v: T) {
        let size = self.size();
        self.entries[i * size + j] = v;
    }

    pub fn slot_parity(&self, idx: usize) -> Parity {
        if idx < self.m {
            Parity::Even
        } else {
            Parity::Odd
        }
    }

    pub fn positional_parity(&self, i: usize, j: usize) -> Parity {
        self.slot_parity(i).plus(self.slot_parity(j))
    }

    pub fn same_shape(&self, other: &Self) -> bool {
        self.m == other.m && self.n == other.n
    }

    fn require_same_shape(&self, other: &Self) -> Result<()> {
        if !self.same_shape(other) {
            return Err(Error::ShapeMismatch { m1: self.m, n1: self.n, m2: other.m, n2: other.n });
        }
        Ok(())
    }

    pub fn add(&self, other: &Self) -> Self {
        assert!(self.same_shape(other), "shape mismatch in add");
        let parity = if self.parity == other.parity { self.parity } else { None };
        SuperMatrix {
            m: self.m,
            n: self.n,
            parity,
            entries: self.entries.iter().zip(&other.entries).map(|(a, b)| a.add(b)).collect(),
        }
    }

    pub fn sub(&self, other: &Self) -> Self {
        self.add(&other.neg())
    }

    pub fn neg(&self) -> Self {
        SuperMatrix {
            m: self.m,
            n: self.n,
            parity: self.parity,
            entries: self.entries.iter().map(|a| a.neg()).collect(),
        }
    }

    pub fn scale(&self, c: &T) -> Self {
        SuperMatrix {
            m: self.m,
            n: self.n,
            parity: self.parity,
            entries: self.entries.iter().map(|a| a.mul(c)).collect(),
        }
    }

    /// Scalar multiplication from the left; differs from `scale` when the
    /// entry ring is noncommutative (odd Grassmann factors).
    pub fn scale_left(&self, c: &T) -> Self {
        SuperMatrix {
            m: self.m,
            n: self.n,
            parity: self.parity,
            entries: self.entries.iter().map(|a| c.mul(a)).collect(),
        }
    }

    /// Matrix product; entry order is preserved so noncommutative entries
    /// (Grassmann numbers) multiply correctly.
    pub fn matmul(&self, other: &Self) -> Self {
        assert!(self.same_shape(other), "shape mismatch in matmul");
        let size = self.size();
        let parity = match (self.parity, other.parity) {
            (Some(a), Some(b)) => Some(a.plus(b)),
            _ => None,
        };
        let mut out = SuperMatrix::zero(self.m, self.n, parity);
        for i in 0..size {
            for j in 0..size {
                let mut acc = T::zero();
                for k in 0..size {
                    acc = acc.add(&self.entry(i, k).mul(other.entry(k, j)));
                }
                out.set(i, j, acc);
            }
        }
        out
    }

    pub fn is_zero(&self) -> bool {
        self.entries.iter().all(|e| e.is_zero())
    }

    /// Row-major entry vector, used to express matrices as coordinates.
    pub fn flatten(&self) -> Vec<T> {
        self.entries.clone()
    }

    /// trace(even block) - trace(odd block).
    pub fn supertrace(&self) -> T {
        let mut acc = T::zero();
        for i in 0..self.m {
            acc = acc.add(self.entry(i, i));
        }
        for i in self.m..self.size() {
            acc = acc.sub(self.entry(i, i));
        }
        acc
    }

    fn submatrix(&self, rows: &[usize], cols: &[usize]) -> Vec<Vec<T>> {
        rows.iter()
            .map(|&i| cols.iter().map(|&j| self.entry(i, j).clone()).collect())
            .collect()
    }

    /// Berezinian via the D-block Schur complement:
    /// `det(A - B D^{-1} C) * det(D)^{-1}`. Requires invertible D (for
    /// Grassmann entries: invertible body). Entries within each block are
    /// assumed to commute, which holds in both supported modes.
    pub fn berezinian(&self) -> Result<T> {
        let ev: Vec<usize> = (0..self.m).collect();
        let od: Vec<usize> = (self.m..self.size()).collect();
        let d = self.submatrix(&od, &od);
        let det_d = det(&d);
        let det_d_inv = det_d.try_inv().ok_or(Error::BerezinianUndefined)?;
        if self.n == 0 {
            return Ok(det(&self.submatrix(&ev, &ev)));
        }
        if self.m == 0 {
            return Ok(det_d_inv);
        }
        let d_inv = inverse(&d).ok_or(Error::BerezinianUndefined)?;
        let a = self.submatrix(&ev, &ev);
        let b = self.submatrix(&ev, &od);
        let c = self.submatrix(&od, &ev);
        let bd = mat_mul(&b, &d_inv);
        let bdc = mat_mul(&bd, &c);
        let schur: Vec<Vec<T>> = a
            .iter()
            .zip(&bdc)
            .map(|(ra, rb)| ra.iter().zip(rb).map(|(x, y)| x.sub(y)).collect())
            .collect();
        Ok(det(&schur).mul(&det_d_inv))
    }
}

/// AB - (-1)^{|A||B|} BA: commutator unless both operands are odd, then
/// anticommutator. Operands must be shape-compatible and homogeneous.
pub fn super_bracket<T: Ring>(a: &SuperMatrix<T>, b: &SuperMatrix<T>) -> Result<SuperMatrix<T>> {
    a.require_same_shape(b)?;
    let (pa, pb) = match (a.parity, b.parity) {
        (Some(pa), Some(pb)) => (pa, pb),
        _ => return Err(Error::MixedParity),
    };
    let ab = a.matmul(b);
    let ba = b.matmul(a);
    let out = if pa == Parity::Odd && pb == Parity::Odd {
        ab.add(&ba)
    } else {
        ab.sub(&ba)
    };
    Ok(out.with_parity(Some(pa.plus(pb))))
}

/// Alias matching the operation name used in reports.
pub fn supertrace<T: Ring>(a: &SuperMatrix<T>) -> T {
    a.supertrace()
}

fn mat_mul<T: Ring>(a: &[Vec<T>], b: &[Vec<T>]) -> Vec<Vec<T>> {
    let n = a.len();
    let p = if n == 0 { 0 } else { b[0].len() };
    let k_dim = b.len();
    (0..n)
        .map(|i| {
            (0..p)
                .map(|j| {
                    let mut acc = T::zero();
                    for k in 0..k_dim {
                        acc = acc.add(&a[i][k].mul(&b[k][j]));
                    }
                    acc
                })
                .collect()
        })
        .collect()
}

/// Division-free determinant by Laplace expansion along the first row.
/// Fine at desk scale (blocks up to 4x4); entries must commute.
pub fn det<T: Ring>(m: &[Vec<T>]) -> T {
    let n = m.len();
    match n {
        0 => T::one(),
        1 => m[0][0].clone(),
        _ => {
            let mut acc = T::zero();
            for j in 0..n {
                if m[0][j].is_zero() {
                    continue;
                }
                let minor: Vec<Vec<T>> = (1..n)
                    .map(|i| {
                        (0..n)
                            .filter(|&c| c != j)
                            .map(|c| m[i][c].clone())
                            .collect()
                    })
                    .collect();
                let term = m[0][j].mul(&det(&minor));
                acc = if j % 2 == 0 { acc.add(&term) } else { acc.sub(&term) };
            }
            acc
        }
    }
}

/// Adjugate inverse; `None` when the determinant has no inverse.
fn inverse<T: Ring>(m: &[Vec<T>]) -> Option<Vec<Vec<T>>> {
    let n = m.len();
    let det_inv = det(m).try_inv()?;
    let mut out = vec![vec![T::zero(); n]; n];
    for i in 0..n {
        for j in 0..n {
            let minor: Vec<Vec<T>> = (0..n)
                .filter(|&r| r != j)
                .map(|r| {
                    (0..n)
                        .filter(|&c| c != i)
                        .map(|c| m[r][c].clone())
                        .collect()
                })
                .collect();
            let cof = det(&minor);
            let signed = if (i + j) % 2 == 0 { cof } else { cof.neg() };
            out[i][j] = signed.mul(&det_inv);
        }
    }
    Some(out)
}

impl SuperMatrix<Rat> {
    /// Lift an exact matrix into the simulation mode: float bodies over the
    /// session's Grassmann algebra.
    pub fn to_sim(&self, gens: u32) -> SuperMatrix<Gf> {
        SuperMatrix {
            m: self.m,
            n: self.n,
            parity: self.parity,
            entries: self
                .entries
                .iter()
                .map(|r| GrassmannNumber::scalar(gens, rat_to_f64(r)))
                .collect(),
        }
    }
}

impl SuperMatrix<Gf> {
    pub fn is_finite(&self) -> bool {
        self.entries.iter().all(|e| e.is_finite())
    }

    /// Max row sum of entry coefficient norms.
    pub fn coeff_norm(&self) -> f64 {
        let size = self.size();
        (0..size)
            .map(|i| (0..size).map(|j| self.entry(i, j).coeff_norm()).sum::<f64>())
            .fold(0.0, f64::max)
    }

    pub fn scale_f64(&self, c: f64) -> Self {
        SuperMatrix {
            m: self.m,
            n: self.n,
            parity: self.parity,
            entries: self.entries.iter().map(|e| e.scale(&c)).collect(),
        }
    }

    /// Matrix exponential of `t * self` by scaling and squaring: scale so
    /// the norm is at most 0.5, truncated Taylor series of order 12, then
    /// repeated squaring. Soul terms are nilpotent and ride the same series.
    pub fn sm_exp(&self, t: f64) -> Result<Self> {
        if !self.is_finite() || !t.is_finite() {
            return Err(Error::NonFinite);
        }
        let a = self.scale_f64(t);
        let norm = a.coeff_norm();
        let mut squarings = 0u32;
        let mut scaled = a;
        if norm > 0.5 {
            squarings = (norm / 0.5).log2().ceil() as u32;
            scaled = scaled.scale_f64(0.5f64.powi(squarings as i32));
        }
        const ORDER: u32 = 12;
        let id = Self::identity_like(self);
        // Horner form: I + A(I + A/2 (I + A/3 (...)))
        let mut acc = id.clone();
        for k in (1..=ORDER).rev() {
            acc = id.add(&scaled.scale_f64(1.0 / k as f64).matmul(&acc));
        }
        for _ in 0..squarings {
            acc = acc.matmul(&acc);
        }
        let parity = match self.parity {
            Some(Parity::Even) => Some(Parity::Even),
            _ => None,
        };
        Ok(acc.with_parity(parity))
    }

    fn identity_like(proto: &Self) -> Self {
        SuperMatrix::identity(proto.m, proto.n)
    }

    /// `exp(tA) P exp(-tA)` — the drift flow acting on a group element.
    pub fn conjugate(&self, t: f64, p: &Self) -> Result<Self> {
        self.require_same_shape(p)?;
        let fwd = self.sm_exp(t)?;
        let bwd = self.sm_exp(-t)?;
        Ok(fwd.matmul(p).matmul(&bwd))
    }

    /// Body parts of all entries as a plain float matrix.
    pub fn body_matrix(&self) -> Vec<Vec<f64>> {
        let size = self.size();
        (0..size)
            .map(|i| (0..size).map(|j| self.entry(i, j).body()).collect())
            .collect()
    }

    /// Largest coefficient difference across all entries and monomials.
    pub fn max_abs_diff(&self, other: &Self) -> f64 {
        assert!(self.same_shape(other));
        let mut worst = 0.0f64;
        for (a, b) in self.entries.iter().zip(&other.entries) {
            let diff = a.minus(b);
            for (_, c) in diff.terms() {
                worst = worst.max(c.abs());
            }
        }
        worst
    }

    /// Entry parities match block positions for the declared parity.
    pub fn entry_parity_consistent(&self) -> bool {
        let Some(declared) = self.parity else {
            return false;
        };
        let size = self.size();
        for i in 0..size {
            for j in 0..size {
                let required = self.positional_parity(i, j).plus(declared);
                if !self.entry(i, j).is_homogeneous(required) {
                    return false;
                }
            }
        }
        true
    }
}

impl<T: Ring + std::fmt::Display> std::fmt::Display for SuperMatrix<T> {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        let size = self.size();
        for i in 0..size {
            write!(f, "[")?;
            for j in 0..size {
                if j > 0 {
                    write!(f, ", ")?;
                }
                write!(f, "{}", self.entry(i, j))?;
            }
            writeln!(f, "]")?;
        }
        Ok(())
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::ring::{rat, rint};
    use proptest::prelude::*;
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    fn diag(m: usize, n: usize, vals: &[i64]) -> SuperMatrix<Rat> {
        let mut out = SuperMatrix::zero(m, n, Some(Parity::Even));
        for (i, &v) in vals.iter().enumerate() {
            out.set(i, i, rint(v));
        }
        out
    }

    #[test]
    fn bracket_even_odd_is_commutator() {
        let a = diag(1, 1, &[2, 1]);
        let b = SuperMatrix::unit(1, 1, 0, 1);
        assert_eq!(b.declared_parity(), Some(Parity::Odd));
        let br = super_bracket(&a, &b).unwrap();
        assert_eq!(br, b.clone().with_parity(Some(Parity::Odd)));
    }

    #[test]
    fn bracket_odd_odd_is_anticommutator() {
        let xi1 = SuperMatrix::<Rat>::unit(1, 1, 0, 1);
        let xi2 = SuperMatrix::<Rat>::unit(1, 1, 1, 0);
        let br = super_bracket(&xi1, &xi2).unwrap();
        let id = SuperMatrix::<Rat>::identity(1, 1);
        assert_eq!(br.flatten(), id.flatten());
        assert_eq!(br.declared_parity(), Some(Parity::Even));
    }

    #[test]
    fn bracket_with_self_even_vanishes() {
        let a = diag(2, 1, &[3, -1, 2]);
        assert!(super_bracket(&a, &a).unwrap().is_zero());
    }

    #[test]
    fn bracket_rejects_mixed_and_mismatched() {
        let a = diag(1, 1, &[1, 1]).with_parity(None);
        let b = diag(1, 1, &[1, 2]);
        assert_eq!(super_bracket(&a, &b), Err(Error::MixedParity));
        let c = diag(2, 1, &[1, 1, 1]);
        assert!(matches!(super_bracket(&b, &c), Err(Error::ShapeMismatch { .. })));
    }

    #[test]
    fn supertrace_examples() {
        let id = SuperMatrix::<Rat>::identity(1, 1);
        assert_eq!(id.supertrace(), rint(0));
        let e12 = SuperMatrix::<Rat>::unit(1, 1, 0, 1);
        assert_eq!(e12.supertrace(), rint(0));
        assert_eq!(diag(1, 1, &[3, 1]).supertrace(), rint(2));
    }

    #[test]
    fn berezinian_identity_and_diag() {
        let id = SuperMatrix::<Rat>::identity(2, 1);
        assert_eq!(id.berezinian().unwrap(), rint(1));
        let d = diag(1, 1, &[5, 2]);
        assert_eq!(d.berezinian().unwrap(), rat(5, 2));
    }

    #[test]
    fn berezinian_requires_invertible_d() {
        let mut a = SuperMatrix::<Rat>::identity(1, 1);
        a.set(1, 1, rint(0));
        assert_eq!(a.berezinian(), Err(Error::BerezinianUndefined));
    }

    fn random_even_invertible(rng: &mut ChaCha8Rng, m: usize, n: usize, gens: u32) -> SuperMatrix<Gf> {
        loop {
            let mut out = SuperMatrix::zero(m, n, Some(Parity::Even));
            for i in 0..(m + n) {
                for j in 0..(m + n) {
                    let body: f64 = rng.gen_range(-1.5..1.5);
                    let c1: f64 = rng.gen_range(-0.5..0.5);
                    let c2: f64 = rng.gen_range(-0.5..0.5);
                    let even_slot = out.positional_parity(i, j) == Parity::Even;
                    let e = if even_slot {
                        // even entry: body + xi1^xi2 soul
                        GrassmannNumber::from_terms(gens, &[(&[], body), (&[1, 2], c1)]).unwrap()
                    } else {
                        // odd entry: xi1 and xi3 components
                        GrassmannNumber::from_terms(gens, &[(&[1], c1), (&[3], c2)]).unwrap()
                    };
                    out.set(i, j, e);
                }
            }
            // Keep D's body comfortably invertible.
            let d_body: Vec<Vec<f64>> = (m..m + n)
                .map(|i| (m..m + n).map(|j| out.entry(i, j).body()).collect())
                .collect();
            let det_d = det(&d_body.iter().map(|r| r.to_vec()).collect::<Vec<_>>());
            if det_d.abs() > 0.2 {
                return out;
            }
        }
    }

    #[test]
    fn berezinian_multiplicative_on_grassmann_pairs() {
        let mut rng = ChaCha8Rng::seed_from_u64(7);
        for _ in 0..25 {
            let a = random_even_invertible(&mut rng, 2, 1, 4);
            let b = random_even_invertible(&mut rng, 2, 1, 4);
            let lhs = a.matmul(&b).berezinian().unwrap();
            let rhs = a.berezinian().unwrap().times(&b.berezinian().unwrap());
            let diff = lhs.minus(&rhs);
            let worst = diff.terms().map(|(_, c)| c.abs()).fold(0.0, f64::max);
            assert!(worst < 1e-9, "berezinian not multiplicative: {worst}");
        }
    }

    #[test]
    fn exp_of_zero_is_identity() {
        let z = SuperMatrix::<Gf>::zero(1, 1, Some(Parity::Even));
        let e = z.sm_exp(1.7).unwrap();
        assert!(e.max_abs_diff(&SuperMatrix::identity(1, 1)) < 1e-15);
    }

    #[test]
    fn exp_of_nilpotent_terminates() {
        let e12 = SuperMatrix::<Rat>::unit(2, 0, 0, 1).to_sim(0);
        let e = e12.sm_exp(1.0).unwrap();
        let expected = SuperMatrix::<Rat>::identity(2, 0)
            .add(&SuperMatrix::unit(2, 0, 0, 1))
            .to_sim(0);
        assert!(e.max_abs_diff(&expected) < 1e-12);
    }

    /// Independent reference exponential on plain floats: repeated halving
    /// plus a long Taylor sum, distinct from the production code path.
    fn reference_exp(a: &[Vec<f64>]) -> Vec<Vec<f64>> {
        let n = a.len();
        let norm: f64 = a
            .iter()
            .map(|r| r.iter().map(|x| x.abs()).sum::<f64>())
            .fold(0.0, f64::max);
        let halvings = if norm > 0.25 { (norm / 0.25).log2().ceil() as u32 } else { 0 };
        let s = 0.5f64.powi(halvings as i32);
        let mut term: Vec<Vec<f64>> = (0..n)
            .map(|i| (0..n).map(|j| if i == j { 1.0 } else { 0.0 }).collect())
            .collect();
        let mut sum = term.clone();
        for k in 1..=24 {
            let mut next = vec![vec![0.0; n]; n];
            for i in 0..n {
                for j in 0..n {
                    for l in 0..n {
                        next[i][j] += term[i][l] * a[l][j] * s / k as f64;
                    }
                }
            }
            term = next;
            for i in 0..n {
                for j in 0..n {
                    sum[i][j] += term[i][j];
                }
            }
        }
        for _ in 0..halvings {
            let mut sq = vec![vec![0.0; n]; n];
            for i in 0..n {
                for j in 0..n {
                    for l in 0..n {
                        sq[i][j] += sum[i][l] * sum[l][j];
                    }
                }
            }
            sum = sq;
        }
        sum
    }

    #[test]
    fn exp_body_matches_reference() {
        let mut rng = ChaCha8Rng::seed_from_u64(11);
        for _ in 0..20 {
            let m = rng.gen_range(1..=2);
            let n = rng.gen_range(0..=2).max(if m == 0 { 1 } else { 0 });
            let size = m + n;
            let mut a = SuperMatrix::<Gf>::zero(m, n, Some(Parity::Even));
            let mut body = vec![vec![0.0; size]; size];
            for i in 0..size {
                for j in 0..size {
                    let v: f64 = rng.gen_range(-1.0..1.0);
                    body[i][j] = v;
                    a.set(i, j, GrassmannNumber::scalar(2, v));
                }
            }
            let t: f64 = rng.gen_range(-2.0..2.0);
            let got = a.sm_exp(t).unwrap().body_matrix();
            let scaled: Vec<Vec<f64>> = body
                .iter()
                .map(|r| r.iter().map(|x| x * t).collect())
                .collect();
            let want = reference_exp(&scaled);
            for i in 0..size {
                for j in 0..size {
                    assert!((got[i][j] - want[i][j]).abs() < 1e-9);
                }
            }
        }
    }

    #[test]
    fn conjugate_basics() {
        let a = diag(1, 1, &[2, 1]).to_sim(2);
        let p = diag(1, 1, &[3, 4]).to_sim(2);
        // t = 0 and commuting diagonals both leave P alone.
        assert!(a.conjugate(0.0, &p).unwrap().max_abs_diff(&p) < 1e-12);
        assert!(a.conjugate(0.8, &p).unwrap().max_abs_diff(&p) < 1e-10);
    }

    #[test]
    fn conjugate_flow_property() {
        let mut a = SuperMatrix::<Rat>::zero(2, 1, Some(Parity::Even));
        a.set(0, 1, rint(1));
        a.set(1, 0, rint(-1));
        let a = a.to_sim(2);
        let mut p = SuperMatrix::<Rat>::identity(2, 1);
        p.set(0, 1, rint(1));
        let p = p.to_sim(2);
        let inner = a.conjugate(0.4, &p).unwrap();
        let two_step = a.conjugate(0.35, &inner).unwrap();
        let one_step = a.conjugate(0.75, &p).unwrap();
        assert!(two_step.max_abs_diff(&one_step) < 1e-8);
    }

    #[test]
    fn conjugation_is_bracket_automorphism() {
        let mut rng = ChaCha8Rng::seed_from_u64(3);
        for _ in 0..10 {
            let mut randmat = |parity: Parity| {
                let mut out = SuperMatrix::<Gf>::zero(1, 1, Some(parity));
                for i in 0..2 {
                    for j in 0..2 {
                        out.set(i, j, GrassmannNumber::scalar(2, rng.gen_range(-1.0..1.0)));
                    }
                }
                out
            };
            let a = randmat(Parity::Even);
            let p = randmat(Parity::Even);
            let q = randmat(Parity::Odd);
            let t = 0.6;
            let lhs = a.conjugate(t, &super_bracket(&p, &q).unwrap()).unwrap();
            let rhs = super_bracket(
                &a.conjugate(t, &p).unwrap().with_parity(Some(Parity::Even)),
                &a.conjugate(t, &q).unwrap().with_parity(Some(Parity::Odd)),
            )
            .unwrap();
            assert!(lhs.max_abs_diff(&rhs) < 1e-8);
        }
    }

    #[test]
    fn entry_parity_validation() {
        let gens = 4;
        let mut even_ok = SuperMatrix::<Gf>::zero(1, 1, Some(Parity::Even));
        even_ok.set(0, 0, GrassmannNumber::scalar(gens, 2.0));
        even_ok.set(0, 1, GrassmannNumber::generator(gens, 1).unwrap());
        assert!(even_ok.entry_parity_consistent());

        let mut bad = even_ok.clone();
        bad.set(1, 1, GrassmannNumber::generator(gens, 2).unwrap());
        assert!(!bad.entry_parity_consistent());
    }

    /// A homogeneous element of gl(m|n): support restricted to the blocks
    /// of its parity (diagonal blocks for even, off-diagonal for odd).
    fn block_supported(m: usize, n: usize, parity: Parity, cells: &[i64]) -> SuperMatrix<Rat> {
        let size = m + n;
        let mut out = SuperMatrix::zero(m, n, Some(parity));
        for i in 0..size {
            for j in 0..size {
                if out.positional_parity(i, j) == parity {
                    out.set(i, j, rint(cells[i * size + j]));
                }
            }
        }
        out
    }

    fn arb_homogeneous_pair() -> impl Strategy<Value = (SuperMatrix<Rat>, SuperMatrix<Rat>)> {
        let entry = -3i64..=3;
        let shape = (1usize..=3, 0usize..=3).prop_filter("nonzero size", |(m, n)| m + n >= 2);
        (shape, proptest::bool::ANY, proptest::bool::ANY).prop_flat_map(move |((m, n), pa, pb)| {
            let size = m + n;
            let cells = proptest::collection::vec(entry.clone(), size * size);
            (cells.clone(), cells).prop_map(move |(ea, eb)| {
                let parity = |flag: bool| if flag { Parity::Odd } else { Parity::Even };
                (
                    block_supported(m, n, parity(pa), &ea),
                    block_supported(m, n, parity(pb), &eb),
                )
            })
        })
    }

    proptest! {
        #[test]
        fn supertrace_of_bracket_vanishes((a, b) in arb_homogeneous_pair()) {
            let br = super_bracket(&a, &b).unwrap();
            prop_assert_eq!(br.supertrace(), rint(0));
        }

        #[test]
        fn graded_antisymmetry((a, b) in arb_homogeneous_pair()) {
            let ab = super_bracket(&a, &b).unwrap();
            let ba = super_bracket(&b, &a).unwrap();
            let both_odd = a.declared_parity() == Some(Parity::Odd)
                && b.declared_parity() == Some(Parity::Odd);
            let expected = if both_odd { ba } else { ba.neg() };
            prop_assert_eq!(ab.flatten(), expected.flatten());
        }
    }

    #[test]
    fn graded_jacobi_randomized() {
        let mut rng = ChaCha8Rng::seed_from_u64(17);
        for _ in 0..200 {
            let m = rng.gen_range(1..=3);
            let n = rng.gen_range(0..=3).max(if m == 0 { 1 } else { 0 });
            let size = m + n;
            let mk = |rng: &mut ChaCha8Rng, parity: Parity| {
                let mut out = SuperMatrix::<Rat>::zero(m, n, Some(parity));
                for i in 0..size {
                    for j in 0..size {
                        if out.positional_parity(i, j) == parity {
                            out.set(i, j, rint(rng.gen_range(-3..=3)));
                        }
                    }
                }
                out
            };
            let pick = |rng: &mut ChaCha8Rng| {
                if rng.gen() {
                    Parity::Even
                } else {
                    Parity::Odd
                }
            };
            let (qa, qb, qc) = (pick(&mut rng), pick(&mut rng), pick(&mut rng));
            let a = mk(&mut rng, qa);
            let b = mk(&mut rng, qb);
            let c = mk(&mut rng, qc);
            let pa = a.declared_parity().unwrap();
            let pb = b.declared_parity().unwrap();
            let pc = c.declared_parity().unwrap();
            let sign = |p: Parity, q: Parity| if p == Parity::Odd && q == Parity::Odd { -1 } else { 1 };
            let term = |x: &SuperMatrix<Rat>, y: &SuperMatrix<Rat>, z: &SuperMatrix<Rat>, s: i64| {
                let inner = super_bracket(y, z).unwrap();
                let outer = super_bracket(x, &inner).unwrap();
                if s < 0 { outer.neg() } else { outer }
            };
            let t1 = term(&a, &b, &c, sign(pa, pc) as i64);
            let t2 = term(&b, &c, &a, sign(pb, pa) as i64);
            let t3 = term(&c, &a, &b, sign(pc, pb) as i64);
            let total = t1.add(&t2).add(&t3);
            assert!(total.is_zero(), "graded Jacobi violated");
        }
    }

    #[test]
    fn left_right_flow_commutation() {
        // (e^{tA} P) e^{sB} == e^{tA} (P e^{sB}) up to float error.
        let a = diag(1, 1, &[1, -1]).to_sim(2);
        let b = SuperMatrix::<Rat>::unit(1, 1, 0, 1).to_sim(2);
        let p = diag(1, 1, &[2, 3]).to_sim(2);
        let ea = a.sm_exp(0.7).unwrap();
        let eb = b.sm_exp(0.3).unwrap();
        let lhs = ea.matmul(&p).matmul(&eb);
        let rhs = ea.matmul(&p.matmul(&eb));
        assert!(lhs.max_abs_diff(&rhs) < 1e-10);
    }
}
