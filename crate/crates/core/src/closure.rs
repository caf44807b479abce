//! Bracket-generated subalgebra spans and the smallest ad(X)-invariant
//! subalgebra containing a given subalgebra, built by the step sequence
//! `h_i = h_{i-1} + ad^i(X)(h)` until the graded dimension stabilizes.

use crate::error::{Error, Result};
use crate::lsa::{AlgebraElement, GradedSubspace, LieSuperalgebra};
use crate::ring::Rat;
use crate::supermatrix::{super_bracket, SuperMatrix};
use num_traits::Zero;

/// The drift's action on coefficient vectors: an exact dim x dim matrix,
/// assembled from structure constants, from a realized matrix bracket, or
/// directly as a linear map on superspace coordinates.
#[derive(Debug, Clone, PartialEq)]
pub struct AdAction {
    columns: Vec<Vec<Rat>>,
    label: String,
}

impl AdAction {
    /// ad(X) for an element of the algebra itself.
    pub fn from_element(alg: &LieSuperalgebra, x: &AlgebraElement) -> Result<AdAction> {
        let dim = alg.dim();
        let mut columns = Vec::with_capacity(dim);
        for j in 0..dim {
            let img = alg.bracket(x, &AlgebraElement::basis(dim, j))?;
            columns.push(img.coeffs);
        }
        Ok(AdAction { columns, label: alg.format_element(x) })
    }

    /// ad(A) for a drift matrix acting through the realization: each basis
    /// bracket is solved back into coordinates, exactly. Fails with the
    /// offending basis element when the image leaves the algebra.
    pub fn from_matrix(alg: &LieSuperalgebra, a: &SuperMatrix<Rat>) -> Result<AdAction> {
        let real = alg.realization().ok_or(Error::MissingRealization)?;
        let dim = alg.dim();
        let mut columns = Vec::with_capacity(dim);
        for j in 0..dim {
            let br = super_bracket(a, &real.matrices[j])?;
            let coords = alg
                .coordinates_of(&br)?
                .ok_or_else(|| Error::NotInvariant { element: alg.basis()[j].name.clone() })?;
            columns.push(coords.coeffs);
        }
        Ok(AdAction { columns, label: "ad(drift matrix)".into() })
    }

    /// Direct linear action on superspace coordinates (the abelian case,
    /// where `ad(Ax)(b) = Ab`). The algebra's basis must be laid out as the
    /// matrix's slots: even coordinates first.
    pub fn from_linear_map(alg: &LieSuperalgebra, a: &SuperMatrix<Rat>) -> Result<AdAction> {
        let dim = alg.dim();
        if a.size() != dim {
            return Err(Error::DimensionMismatch { expected: dim, got: a.size() });
        }
        for i in 0..dim {
            let slot = a.slot_parity(i);
            if alg.parity(i) != slot {
                return Err(Error::Parity(format!(
                    "basis element {} has parity {}, slot expects {}",
                    alg.basis()[i].name,
                    alg.parity(i).as_str(),
                    slot.as_str()
                )));
            }
        }
        let columns = (0..dim)
            .map(|j| (0..dim).map(|i| a.entry(i, j).clone()).collect())
            .collect();
        Ok(AdAction { columns, label: "linear drift".into() })
    }

    pub fn zero(dim: usize) -> AdAction {
        AdAction { columns: vec![vec![Rat::zero(); dim]; dim], label: "0".into() }
    }

    pub fn dim(&self) -> usize {
        self.columns.len()
    }

    pub fn label(&self) -> &str {
        &self.label
    }

    pub fn apply(&self, v: &AlgebraElement) -> AlgebraElement {
        let dim = self.dim();
        let mut out = AlgebraElement::zero(dim);
        for (j, c) in v.coeffs.iter().enumerate() {
            if Zero::is_zero(c) {
                continue;
            }
            for i in 0..dim {
                if !Zero::is_zero(&self.columns[j][i]) {
                    out.coeffs[i] = &out.coeffs[i] + &(c * &self.columns[j][i]);
                }
            }
        }
        out
    }

    pub fn apply_times(&self, v: &AlgebraElement, times: usize) -> AlgebraElement {
        let mut out = v.clone();
        for _ in 0..times {
            out = self.apply(&out);
        }
        out
    }

    /// The action preserves parity (maps even to even, odd to odd).
    pub fn preserves_grading(&self, alg: &LieSuperalgebra) -> bool {
        let dim = self.dim();
        (0..dim).all(|j| {
            (0..dim).all(|i| {
                Zero::is_zero(&self.columns[j][i]) || alg.parity(i) == alg.parity(j)
            })
        })
    }
}

/// Iterated bracket `ad(x)^times (v)`; `times = 0` returns `v`.
pub fn ad_apply(
    alg: &LieSuperalgebra,
    x: &AlgebraElement,
    v: &AlgebraElement,
    times: usize,
) -> Result<AlgebraElement> {
    let mut out = v.clone();
    for _ in 0..times {
        out = alg.bracket(x, &out)?;
    }
    Ok(out)
}

/// Smallest subspace containing the generators and closed under the
/// bracket: iterate pairwise brackets of the current basis until the
/// graded dimension stabilizes.
pub fn lsa_span(alg: &LieSuperalgebra, gens: &[AlgebraElement]) -> GradedSubspace {
    let mut span = alg.subspace_span(gens);
    loop {
        let basis = span.basis_elements();
        let mut grew = false;
        for u in &basis {
            for v in &basis {
                let br = alg.bracket(u, v).expect("basis elements share the algebra");
                if !br.is_zero() && alg.subspace_insert(&mut span, &br) {
                    grew = true;
                }
            }
        }
        if !grew {
            return span;
        }
    }
}

/// One step of the hull sequence.
#[derive(Debug, Clone, PartialEq)]
pub struct HullStep {
    pub index: usize,
    /// Generators that enlarged the span at this step.
    pub added: Vec<AlgebraElement>,
    pub dim_after: (usize, usize),
}

/// Record of the hull sequence: every step and the terminating power p.
#[derive(Debug, Clone, PartialEq)]
pub struct HullTrace {
    pub steps: Vec<HullStep>,
    pub terminated_at: usize,
    /// Whether the final bracket-closure pass added anything beyond the
    /// stabilized sequence (it never should; kept as a tripwire).
    pub closure_pass_added: bool,
}

/// The smallest ad(X)-invariant subalgebra containing `h` (which must be
/// bracket-closed), with the step-by-step trace.
pub fn ad_hull(
    alg: &LieSuperalgebra,
    action: &AdAction,
    h: &GradedSubspace,
) -> Result<(GradedSubspace, HullTrace)> {
    // Precondition: h is closed under the bracket.
    let h_basis = h.basis_elements();
    for u in &h_basis {
        for v in &h_basis {
            let br = alg.bracket(u, v)?;
            if !alg.subspace_contains(h, &br)? {
                return Err(Error::Precondition(
                    "ad_hull requires a bracket-closed subspace".into(),
                ));
            }
        }
    }

    let mut current = h.clone();
    let mut trace = HullTrace {
        steps: vec![HullStep { index: 0, added: h_basis.clone(), dim_after: h.graded_dim() }],
        terminated_at: 0,
        closure_pass_added: false,
    };
    let total_dim = alg.dim();
    let mut images: Vec<AlgebraElement> = h_basis.clone();
    for i in 1..=total_dim {
        images = images.iter().map(|v| action.apply(v)).collect();
        let mut added = Vec::new();
        for v in &images {
            if !v.is_zero() && alg.subspace_insert(&mut current, v) {
                added.push(v.clone());
            }
        }
        if added.is_empty() {
            trace.terminated_at = i - 1;
            break;
        }
        trace.steps.push(HullStep { index: i, added, dim_after: current.graded_dim() });
        trace.terminated_at = i;
        if current.total_dim() == total_dim {
            // Full algebra; one more step cannot grow.
            break;
        }
    }

    // Final closure pass; the stabilized sequence is already a subalgebra,
    // so this is a consistency guard rather than a construction step.
    let closed = lsa_span(alg, &current.basis_elements());
    trace.closure_pass_added = closed.graded_dim() != current.graded_dim();
    Ok((closed, trace))
}

/// Independent construction of the same hull: the bracket closure of the
/// ad powers `0..=p_cap` applied to the generators.
pub fn ad_orbit_span(
    alg: &LieSuperalgebra,
    action: &AdAction,
    gens: &[AlgebraElement],
    p_cap: usize,
) -> GradedSubspace {
    let mut family = Vec::new();
    for g in gens {
        let mut cur = g.clone();
        for _ in 0..=p_cap {
            family.push(cur.clone());
            cur = action.apply(&cur);
        }
    }
    lsa_span(alg, &family)
}

/// Verify that brackets of the dynamics' members stay inside the hull:
/// `[c_i, c_j]` for all control pairs and `ad(X)(c_i)` for every control.
pub fn bracket_containment_check(
    alg: &LieSuperalgebra,
    action: &AdAction,
    controls: &[AlgebraElement],
    hull: &GradedSubspace,
) -> Result<bool> {
    for u in controls {
        if !alg.subspace_contains(hull, &action.apply(u))? {
            return Ok(false);
        }
        for v in controls {
            if !alg.subspace_contains(hull, &alg.bracket(u, v)?)? {
                return Ok(false);
            }
        }
    }
    Ok(true)
}

/// Drift parity guard used by the rank layer: actions must preserve the
/// grading, i.e. come from an even drift.
pub fn require_even_action(alg: &LieSuperalgebra, action: &AdAction) -> Result<()> {
    if !action.preserves_grading(alg) {
        return Err(Error::Parity("drift action does not preserve the grading".into()));
    }
    Ok(())
}
