//! Finite-dimensional Lie superalgebras over exact rationals: structure
//! constants, graded-axiom verification, and graded subspace arithmetic.

use crate::error::{Error, Result};
use crate::grassmann::{Parity, ParityClass};
use crate::linalg::{independent, solve_columns, RowSpace};
use crate::ring::{rat_to_string, Rat};
use crate::supermatrix::{super_bracket, SuperMatrix};
use num_traits::{One, Zero};

/// Named homogeneous basis element.
#[derive(Debug, Clone, PartialEq)]
pub struct BasisElement {
    pub name: String,
    pub parity: Parity,
}

impl BasisElement {
    pub fn new(name: impl Into<String>, parity: Parity) -> Self {
        BasisElement { name: name.into(), parity }
    }
}

/// Optional faithful matrix realization, aligned with the basis.
#[derive(Debug, Clone, PartialEq)]
pub struct Realization {
    pub m: usize,
    pub n: usize,
    pub matrices: Vec<SuperMatrix<Rat>>,
}

/// Lie superalgebra given by a homogeneous basis and exact structure
/// constants `[e_i, e_j] = sum_k c_{ij}^k e_k`.
#[derive(Debug, Clone, PartialEq)]
pub struct LieSuperalgebra {
    name: String,
    basis: Vec<BasisElement>,
    /// table[i][j] = coefficient vector of [e_i, e_j].
    table: Vec<Vec<Vec<Rat>>>,
    realization: Option<Realization>,
}

/// Element as a coefficient vector over the algebra's basis.
#[derive(Debug, Clone, PartialEq)]
pub struct AlgebraElement {
    pub coeffs: Vec<Rat>,
}

impl AlgebraElement {
    pub fn zero(dim: usize) -> Self {
        AlgebraElement { coeffs: vec![Rat::zero(); dim] }
    }

    pub fn basis(dim: usize, index: usize) -> Self {
        let mut coeffs = vec![Rat::zero(); dim];
        coeffs[index] = Rat::one();
        AlgebraElement { coeffs }
    }

    pub fn from_ints(values: &[i64]) -> Self {
        AlgebraElement { coeffs: values.iter().map(|&v| crate::ring::rint(v)).collect() }
    }

    pub fn dim(&self) -> usize {
        self.coeffs.len()
    }

    pub fn is_zero(&self) -> bool {
        self.coeffs.iter().all(Zero::is_zero)
    }

    pub fn add(&self, other: &Self) -> Self {
        AlgebraElement {
            coeffs: self.coeffs.iter().zip(&other.coeffs).map(|(a, b)| a + b).collect(),
        }
    }

    pub fn scale(&self, c: &Rat) -> Self {
        AlgebraElement { coeffs: self.coeffs.iter().map(|a| a * c).collect() }
    }
}

/// Kind of graded-axiom violation found by `check_graded_axioms`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum ViolationKind {
    Grading,
    Antisymmetry,
    Jacobi,
}

#[derive(Debug, Clone, PartialEq)]
pub struct AxiomViolation {
    pub kind: ViolationKind,
    pub i: usize,
    pub j: usize,
    pub k: usize,
}

#[derive(Debug, Clone, PartialEq)]
pub struct AxiomReport {
    pub grading_ok: bool,
    pub antisymmetry_ok: bool,
    pub jacobi_ok: bool,
    pub violations: Vec<AxiomViolation>,
}

impl AxiomReport {
    pub fn all_ok(&self) -> bool {
        self.grading_ok && self.antisymmetry_ok && self.jacobi_ok
    }
}

/// Graded subspace kept as a pair of canonical row spaces, one per parity.
/// Vectors are full-length coefficient vectors supported on a single
/// parity's basis indices, so equality of subspaces is structural equality.
#[derive(Debug, Clone, PartialEq)]
pub struct GradedSubspace {
    even: RowSpace,
    odd: RowSpace,
}

impl GradedSubspace {
    pub fn empty(dim: usize) -> Self {
        GradedSubspace { even: RowSpace::new(dim), odd: RowSpace::new(dim) }
    }

    pub fn graded_dim(&self) -> (usize, usize) {
        (self.even.rank(), self.odd.rank())
    }

    pub fn total_dim(&self) -> usize {
        self.even.rank() + self.odd.rank()
    }

    pub fn even_rows(&self) -> &[Vec<Rat>] {
        self.even.rows()
    }

    pub fn odd_rows(&self) -> &[Vec<Rat>] {
        self.odd.rows()
    }

    /// Basis of the subspace as algebra elements (even rows first).
    pub fn basis_elements(&self) -> Vec<AlgebraElement> {
        self.even
            .rows()
            .iter()
            .chain(self.odd.rows())
            .map(|r| AlgebraElement { coeffs: r.clone() })
            .collect()
    }

    pub fn is_subspace_of(&self, other: &GradedSubspace) -> bool {
        self.even.is_subspace_of(&other.even) && self.odd.is_subspace_of(&other.odd)
    }
}

impl LieSuperalgebra {
    /// Build from sparse structure constants. Missing mirror entries
    /// `(j, i)` are filled in by graded antisymmetry; explicitly provided
    /// mirrors are kept as given (use `from_full_table` to inject faults).
    pub fn from_triplets(
        name: impl Into<String>,
        basis: Vec<BasisElement>,
        triplets: &[(usize, usize, usize, Rat)],
    ) -> Result<Self> {
        let dim = basis.len();
        let mut table = vec![vec![vec![Rat::zero(); dim]; dim]; dim];
        let mut given = vec![vec![false; dim]; dim];
        for &(i, j, k, ref c) in triplets {
            if i >= dim || j >= dim || k >= dim {
                return Err(Error::DimensionMismatch { expected: dim, got: i.max(j).max(k) + 1 });
            }
            table[i][j][k] = &table[i][j][k] + c;
            given[i][j] = true;
        }
        // Fill mirrors: c_{ji} = -(-1)^{|i||j|} c_{ij}.
        for i in 0..dim {
            for j in 0..dim {
                if given[i][j] && !given[j][i] && i != j {
                    let sign = bracket_swap_sign(basis[i].parity, basis[j].parity);
                    for k in 0..dim {
                        table[j][i][k] = table[i][j][k].clone() * &sign;
                    }
                    given[j][i] = true;
                }
            }
        }
        Ok(LieSuperalgebra { name: name.into(), basis, table, realization: None })
    }

    /// The abelian superspace translation algebra R^{m|n}: even coordinates
    /// X1..Xm, odd coordinates Th1..Thn, all brackets zero.
    pub fn abelian(m: usize, n: usize) -> Self {
        let mut basis = Vec::with_capacity(m + n);
        for i in 0..m {
            basis.push(BasisElement::new(format!("X{}", i + 1), Parity::Even));
        }
        for j in 0..n {
            basis.push(BasisElement::new(format!("Th{}", j + 1), Parity::Odd));
        }
        let dim = m + n;
        LieSuperalgebra {
            name: format!("abelian({m}|{n})"),
            basis,
            table: vec![vec![vec![Rat::zero(); dim]; dim]; dim],
            realization: None,
        }
    }

    /// Raw constructor: the table is taken exactly as given. Violations are
    /// surfaced by `check_graded_axioms`, not rejected here.
    pub fn from_full_table(
        name: impl Into<String>,
        basis: Vec<BasisElement>,
        table: Vec<Vec<Vec<Rat>>>,
    ) -> Self {
        LieSuperalgebra { name: name.into(), basis, table, realization: None }
    }

    /// Derive structure constants from a homogeneous matrix basis by solving
    /// every pairwise superbracket back into the span, exactly.
    pub fn from_matrix_basis(
        name: impl Into<String>,
        named: Vec<(String, SuperMatrix<Rat>)>,
    ) -> Result<Self> {
        let dim = named.len();
        if dim == 0 {
            return Err(Error::Precondition("empty matrix basis".into()));
        }
        let (m, n) = named[0].1.block_sizes();
        let mut basis = Vec::with_capacity(dim);
        for (nm, mat) in &named {
            if mat.block_sizes() != (m, n) {
                return Err(Error::ShapeMismatch {
                    m1: m,
                    n1: n,
                    m2: mat.block_sizes().0,
                    n2: mat.block_sizes().1,
                });
            }
            let parity = mat
                .declared_parity()
                .ok_or(Error::MixedParity)?;
            // Entries must live in the blocks of the declared parity.
            for i in 0..mat.size() {
                for j in 0..mat.size() {
                    if mat.positional_parity(i, j) != parity && !mat.entry(i, j).is_zero() {
                        return Err(Error::Parity(format!(
                            "matrix '{nm}' has support outside its {} blocks",
                            parity.as_str()
                        )));
                    }
                }
            }
            basis.push(BasisElement::new(nm.clone(), parity));
        }
        let flat: Vec<Vec<Rat>> = named.iter().map(|(_, mat)| mat.flatten()).collect();
        if !independent(&flat, (m + n) * (m + n)) {
            return Err(Error::DependentBasis);
        }
        let columns = flat;
        let mut table = vec![vec![vec![Rat::zero(); dim]; dim]; dim];
        for i in 0..dim {
            for j in 0..dim {
                let br = super_bracket(&named[i].1, &named[j].1)?;
                let target = br.flatten();
                let coords =
                    solve_columns(&columns, &target).ok_or(Error::NotClosed { i, j })?;
                table[i][j] = coords;
            }
        }
        let realization = Realization { m, n, matrices: named.into_iter().map(|(_, m)| m).collect() };
        Ok(LieSuperalgebra { name: name.into(), basis, table, realization: Some(realization) })
    }

    pub fn with_realization(mut self, realization: Realization) -> Result<Self> {
        if realization.matrices.len() != self.dim() {
            return Err(Error::DimensionMismatch {
                expected: self.dim(),
                got: realization.matrices.len(),
            });
        }
        self.realization = Some(realization);
        Ok(self)
    }

    pub fn name(&self) -> &str {
        &self.name
    }

    pub fn basis(&self) -> &[BasisElement] {
        &self.basis
    }

    pub fn dim(&self) -> usize {
        self.basis.len()
    }

    pub fn graded_dim(&self) -> (usize, usize) {
        let even = self.basis.iter().filter(|b| b.parity == Parity::Even).count();
        (even, self.basis.len() - even)
    }

    pub fn parity(&self, index: usize) -> Parity {
        self.basis[index].parity
    }

    pub fn realization(&self) -> Option<&Realization> {
        self.realization.as_ref()
    }

    pub fn basis_index(&self, name: &str) -> Option<usize> {
        self.basis.iter().position(|b| b.name == name)
    }

    pub fn structure_constant(&self, i: usize, j: usize, k: usize) -> &Rat {
        &self.table[i][j][k]
    }

    pub fn bracket_basis(&self, i: usize, j: usize) -> AlgebraElement {
        AlgebraElement { coeffs: self.table[i][j].clone() }
    }

    fn check_dim(&self, v: &AlgebraElement) -> Result<()> {
        if v.dim() != self.dim() {
            return Err(Error::DimensionMismatch { expected: self.dim(), got: v.dim() });
        }
        Ok(())
    }

    /// Bilinear extension of the structure constants.
    pub fn bracket(&self, u: &AlgebraElement, v: &AlgebraElement) -> Result<AlgebraElement> {
        self.check_dim(u)?;
        self.check_dim(v)?;
        let dim = self.dim();
        let mut out = AlgebraElement::zero(dim);
        for i in 0..dim {
            if Zero::is_zero(&u.coeffs[i]) {
                continue;
            }
            for j in 0..dim {
                if Zero::is_zero(&v.coeffs[j]) {
                    continue;
                }
                let f = &u.coeffs[i] * &v.coeffs[j];
                for k in 0..dim {
                    if !Zero::is_zero(&self.table[i][j][k]) {
                        out.coeffs[k] = &out.coeffs[k] + &(&f * &self.table[i][j][k]);
                    }
                }
            }
        }
        Ok(out)
    }

    /// Parity of an element's support; zero counts as even.
    pub fn element_parity(&self, v: &AlgebraElement) -> ParityClass {
        let mut seen: Option<Parity> = None;
        for (i, c) in v.coeffs.iter().enumerate() {
            if Zero::is_zero(c) {
                continue;
            }
            let p = self.parity(i);
            match seen {
                None => seen = Some(p),
                Some(q) if q == p => {}
                Some(_) => return ParityClass::Mixed,
            }
        }
        ParityClass::Homogeneous(seen.unwrap_or(Parity::Even))
    }

    /// Split into even-supported and odd-supported components.
    pub fn split(&self, v: &AlgebraElement) -> (Vec<Rat>, Vec<Rat>) {
        let dim = self.dim();
        let mut even = vec![Rat::zero(); dim];
        let mut odd = vec![Rat::zero(); dim];
        for i in 0..dim {
            match self.parity(i) {
                Parity::Even => even[i] = v.coeffs[i].clone(),
                Parity::Odd => odd[i] = v.coeffs[i].clone(),
            }
        }
        (even, odd)
    }

    /// Canonical graded span of a vector list; mixed vectors are split into
    /// homogeneous components first.
    pub fn subspace_span(&self, vectors: &[AlgebraElement]) -> GradedSubspace {
        let mut out = GradedSubspace::empty(self.dim());
        for v in vectors {
            self.subspace_insert(&mut out, v);
        }
        out
    }

    /// Insert one vector (split by parity); true when the space grew.
    pub fn subspace_insert(&self, space: &mut GradedSubspace, v: &AlgebraElement) -> bool {
        let (even, odd) = self.split(v);
        let mut grew = false;
        if even.iter().any(|c| !Zero::is_zero(c)) {
            grew |= space.even.insert(&even);
        }
        if odd.iter().any(|c| !Zero::is_zero(c)) {
            grew |= space.odd.insert(&odd);
        }
        grew
    }

    /// Exact membership via row reduction against the canonical bases.
    pub fn subspace_contains(&self, space: &GradedSubspace, v: &AlgebraElement) -> Result<bool> {
        self.check_dim(v)?;
        let (even, odd) = self.split(v);
        Ok(space.even.contains(&even) && space.odd.contains(&odd))
    }

    /// The whole algebra as a graded subspace.
    pub fn full_space(&self) -> GradedSubspace {
        let vs: Vec<AlgebraElement> =
            (0..self.dim()).map(|i| AlgebraElement::basis(self.dim(), i)).collect();
        self.subspace_span(&vs)
    }

    /// Names of basis elements not contained in the subspace.
    pub fn missing_basis_elements(&self, space: &GradedSubspace) -> Vec<String> {
        (0..self.dim())
            .filter(|&i| {
                !self
                    .subspace_contains(space, &AlgebraElement::basis(self.dim(), i))
                    .unwrap()
            })
            .map(|i| self.basis[i].name.clone())
            .collect()
    }

    /// Exhaustive graded-axiom check over all basis triples.
    pub fn check_graded_axioms(&self) -> AxiomReport {
        let dim = self.dim();
        let mut violations = Vec::new();
        let mut grading_ok = true;
        let mut antisymmetry_ok = true;
        let mut jacobi_ok = true;

        for i in 0..dim {
            for j in 0..dim {
                let pij = self.parity(i).plus(self.parity(j));
                for k in 0..dim {
                    if self.parity(k) != pij && !Zero::is_zero(&self.table[i][j][k]) {
                        grading_ok = false;
                        violations.push(AxiomViolation { kind: ViolationKind::Grading, i, j, k });
                    }
                }
                let sign = bracket_swap_sign(self.parity(i), self.parity(j));
                for k in 0..dim {
                    let expected = self.table[i][j][k].clone() * &sign;
                    if self.table[j][i][k] != expected {
                        antisymmetry_ok = false;
                        violations.push(AxiomViolation {
                            kind: ViolationKind::Antisymmetry,
                            i,
                            j,
                            k,
                        });
                    }
                }
            }
        }

        // Graded Jacobi:
        // (-1)^{|i||k|}[e_i,[e_j,e_k]] + (-1)^{|j||i|}[e_j,[e_k,e_i]]
        //   + (-1)^{|k||j|}[e_k,[e_i,e_j]] = 0.
        for i in 0..dim {
            for j in 0..dim {
                for k in 0..dim {
                    let ei = AlgebraElement::basis(dim, i);
                    let ej = AlgebraElement::basis(dim, j);
                    let ek = AlgebraElement::basis(dim, k);
                    let t1 = self
                        .bracket(&ei, &self.bracket(&ej, &ek).unwrap())
                        .unwrap()
                        .scale(&parity_sign(self.parity(i), self.parity(k)));
                    let t2 = self
                        .bracket(&ej, &self.bracket(&ek, &ei).unwrap())
                        .unwrap()
                        .scale(&parity_sign(self.parity(j), self.parity(i)));
                    let t3 = self
                        .bracket(&ek, &self.bracket(&ei, &ej).unwrap())
                        .unwrap()
                        .scale(&parity_sign(self.parity(k), self.parity(j)));
                    if !t1.add(&t2).add(&t3).is_zero() {
                        jacobi_ok = false;
                        violations.push(AxiomViolation { kind: ViolationKind::Jacobi, i, j, k });
                    }
                }
            }
        }

        AxiomReport { grading_ok, antisymmetry_ok, jacobi_ok, violations }
    }

    /// Express an element in terms of the realization matrices.
    pub fn realize(&self, v: &AlgebraElement) -> Result<SuperMatrix<Rat>> {
        let real = self.realization.as_ref().ok_or(Error::MissingRealization)?;
        self.check_dim(v)?;
        let mut out = SuperMatrix::zero(real.m, real.n, None);
        for (i, c) in v.coeffs.iter().enumerate() {
            if !Zero::is_zero(c) {
                out = out.add(&real.matrices[i].scale(c));
            }
        }
        let parity = match self.element_parity(v) {
            ParityClass::Homogeneous(p) => Some(p),
            ParityClass::Mixed => None,
        };
        Ok(out.with_parity(parity))
    }

    /// Solve a matrix back into basis coordinates, exactly.
    pub fn coordinates_of(&self, mat: &SuperMatrix<Rat>) -> Result<Option<AlgebraElement>> {
        let real = self.realization.as_ref().ok_or(Error::MissingRealization)?;
        let columns: Vec<Vec<Rat>> = real.matrices.iter().map(|m| m.flatten()).collect();
        Ok(solve_columns(&columns, &mat.flatten()).map(|coeffs| AlgebraElement { coeffs }))
    }

    /// Human-readable linear combination, e.g. `Y2 - 1/2 Y1`.
    pub fn format_element(&self, v: &AlgebraElement) -> String {
        let mut out = String::new();
        for (i, c) in v.coeffs.iter().enumerate() {
            if Zero::is_zero(c) {
                continue;
            }
            let name = &self.basis[i].name;
            let mag = if c < &Rat::zero() { -c.clone() } else { c.clone() };
            let mag_str = if mag == Rat::one() {
                String::new()
            } else {
                format!("{} ", rat_to_string(&mag))
            };
            if out.is_empty() {
                if c < &Rat::zero() {
                    out.push('-');
                }
            } else if c < &Rat::zero() {
                out.push_str(" - ");
            } else {
                out.push_str(" + ");
            }
            out.push_str(&mag_str);
            out.push_str(name);
        }
        if out.is_empty() {
            out.push('0');
        }
        out
    }
}

/// Sign relating [e_i, e_j] and [e_j, e_i]: -1 unless both odd, then +1.
fn bracket_swap_sign(pi: Parity, pj: Parity) -> Rat {
    if pi == Parity::Odd && pj == Parity::Odd {
        Rat::one()
    } else {
        -Rat::one()
    }
}

/// (-1)^{|p||q|} as a rational.
fn parity_sign(p: Parity, q: Parity) -> Rat {
    if p == Parity::Odd && q == Parity::Odd {
        -Rat::one()
    } else {
        Rat::one()
    }
}

/// Close a list of homogeneous matrices under the superbracket, extending
/// the span until it stabilizes. Returns a homogeneous spanning list.
pub fn matrix_bracket_closure(mats: &[SuperMatrix<Rat>]) -> Result<Vec<SuperMatrix<Rat>>> {
    let Some(first) = mats.first() else {
        return Ok(Vec::new());
    };
    let (m, n) = first.block_sizes();
    let flat_dim = (m + n) * (m + n);
    let mut span = RowSpace::new(flat_dim);
    let mut kept: Vec<SuperMatrix<Rat>> = Vec::new();
    for mat in mats {
        if mat.declared_parity().is_none() {
            return Err(Error::MixedParity);
        }
        if span.insert(&mat.flatten()) {
            kept.push(mat.clone());
        }
    }
    loop {
        let mut grew = false;
        let snapshot = kept.clone();
        for a in &snapshot {
            for b in &snapshot {
                let br = super_bracket(a, b)?;
                if !br.is_zero() && span.insert(&br.flatten()) {
                    kept.push(br);
                    grew = true;
                }
            }
        }
        if !grew {
            return Ok(kept);
        }
    }
}
