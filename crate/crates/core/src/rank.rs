//! The decision layer: the Lie superalgebra rank condition (necessary for
//! transitivity), the super ad-rank condition (sufficient for local
//! controllability), and the extended Kalman reduction on superspace.

use crate::closure::{ad_hull, ad_orbit_span, lsa_span, require_even_action, AdAction, HullTrace};
use crate::error::{Error, Result};
use crate::grassmann::{Parity, ParityClass};
use crate::lsa::{AlgebraElement, GradedSubspace, LieSuperalgebra};
use crate::ring::Rat;
use crate::supermatrix::SuperMatrix;
use num_traits::Zero;

/// How the drift acts on the algebra.
#[derive(Debug, Clone, PartialEq)]
pub enum Drift {
    /// An element of the algebra itself; acts by ad.
    Element(AlgebraElement),
    /// A matrix acting through the realization by superbracket.
    Realized(SuperMatrix<Rat>),
    /// A linear map acting directly on superspace coordinates (the
    /// abelian/Kalman setting).
    Linear(SuperMatrix<Rat>),
}

/// A linear control system: drift plus even and odd control vectors.
#[derive(Debug, Clone, PartialEq)]
pub struct SystemSpec {
    pub name: String,
    pub algebra: LieSuperalgebra,
    pub drift: Drift,
    pub even_controls: Vec<AlgebraElement>,
    pub odd_controls: Vec<AlgebraElement>,
}

impl SystemSpec {
    pub fn new(
        name: impl Into<String>,
        algebra: LieSuperalgebra,
        drift: Drift,
        even_controls: Vec<AlgebraElement>,
        odd_controls: Vec<AlgebraElement>,
    ) -> Result<Self> {
        if even_controls.is_empty() && odd_controls.is_empty() {
            return Err(Error::Precondition("a system needs at least one control".into()));
        }
        for (i, c) in even_controls.iter().enumerate() {
            if algebra.element_parity(c) != ParityClass::Homogeneous(Parity::Even) {
                return Err(Error::Parity(format!("even control {i} is not even")));
            }
        }
        for (j, c) in odd_controls.iter().enumerate() {
            if !c.is_zero() && algebra.element_parity(c) != ParityClass::Homogeneous(Parity::Odd) {
                return Err(Error::Parity(format!("odd control {j} is not odd")));
            }
        }
        match &drift {
            Drift::Element(x) => {
                if algebra.element_parity(x) != ParityClass::Homogeneous(Parity::Even) {
                    return Err(Error::Parity("drift element must be even".into()));
                }
            }
            Drift::Realized(a) | Drift::Linear(a) => {
                if a.declared_parity() != Some(Parity::Even) {
                    return Err(Error::Parity("drift matrix must be declared even".into()));
                }
            }
        }
        Ok(SystemSpec {
            name: name.into(),
            algebra,
            drift,
            even_controls,
            odd_controls,
        })
    }

    pub fn arity(&self) -> (usize, usize) {
        (self.even_controls.len(), self.odd_controls.len())
    }

    /// All control vectors, even first.
    pub fn controls(&self) -> Vec<AlgebraElement> {
        self.even_controls.iter().chain(&self.odd_controls).cloned().collect()
    }

    /// Resolve the drift into its exact action on coefficient vectors.
    pub fn resolve_action(&self) -> Result<AdAction> {
        let action = match &self.drift {
            Drift::Element(x) => AdAction::from_element(&self.algebra, x)?,
            Drift::Realized(a) => AdAction::from_matrix(&self.algebra, a)?,
            Drift::Linear(a) => AdAction::from_linear_map(&self.algebra, a)?,
        };
        require_even_action(&self.algebra, &action)?;
        Ok(action)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Classification {
    NotTransitive,
    TransitiveNotDecided,
    LocallyControllable,
}

impl Classification {
    pub fn as_str(self) -> &'static str {
        match self {
            Classification::NotTransitive => "NotTransitive",
            Classification::TransitiveNotDecided => "TransitiveNotDecided",
            Classification::LocallyControllable => "LocallyControllable",
        }
    }

    /// Exit-code lattice used by the CLI.
    pub fn exit_code(self) -> i32 {
        match self {
            Classification::LocallyControllable => 0,
            Classification::TransitiveNotDecided => 2,
            Classification::NotTransitive => 3,
        }
    }
}

/// Outcome of the full decision pipeline.
#[derive(Debug, Clone, PartialEq)]
pub struct Verdict {
    pub system: String,
    pub lsarc_holds: bool,
    pub ad_rank_holds: bool,
    pub classification: Classification,
    pub lsarc_dim: (usize, usize),
    pub ad_rank_dim: (usize, usize),
    /// Linear span of ad powers applied to the generated subalgebra's basis
    /// instead of the raw control set. Reported for transparency: some
    /// reference computations use this family.
    pub ad_rank_dim_hull_generators: (usize, usize),
    pub ambient_dim: (usize, usize),
    pub lsarc_witnesses: Vec<String>,
    pub ad_rank_witnesses: Vec<String>,
    pub hull_trace: HullTrace,
    pub annotation: String,
}

/// Linear span (no bracket closure) of `{action^i(g)}` for the given
/// generators, powers `0..=p_cap`.
fn linear_orbit_span(
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
    alg.subspace_span(&family)
}

/// Default cap on ad powers: ambient total dimension minus one.
fn default_cap(alg: &LieSuperalgebra) -> usize {
    alg.dim().saturating_sub(1)
}

/// Lie superalgebra rank condition: the bracket closure of the control
/// vectors together with their ad orbit has full graded dimension.
pub fn lsarc(sys: &SystemSpec) -> Result<(bool, (usize, usize))> {
    let action = sys.resolve_action()?;
    let span = ad_orbit_span(&sys.algebra, &action, &sys.controls(), default_cap(&sys.algebra));
    let dim = span.graded_dim();
    Ok((dim == sys.algebra.graded_dim(), dim))
}

/// Super ad-rank condition: the plain linear span of the ad orbit of the
/// control vectors has full graded dimension.
pub fn ad_rank(sys: &SystemSpec) -> Result<(bool, (usize, usize))> {
    let action = sys.resolve_action()?;
    let span = linear_orbit_span(&sys.algebra, &action, &sys.controls(), default_cap(&sys.algebra));
    let dim = span.graded_dim();
    Ok((dim == sys.algebra.graded_dim(), dim))
}

/// Column space of the extended Kalman family `[B, AB, ..., A^{m+n-1}B]`
/// with graded bookkeeping, as a subspace of the abelian superspace.
pub fn kalman_subspace(
    a: &SuperMatrix<Rat>,
    even_cols: &[Vec<Rat>],
    odd_cols: &[Vec<Rat>],
) -> Result<(LieSuperalgebra, GradedSubspace)> {
    if a.declared_parity() != Some(Parity::Even) {
        return Err(Error::Parity("Kalman drift must be declared even".into()));
    }
    let (m, n) = a.block_sizes();
    let dim = m + n;
    let alg = LieSuperalgebra::abelian(m, n);
    let check_col = |col: &Vec<Rat>, even: bool| -> Result<AlgebraElement> {
        if col.len() != dim {
            return Err(Error::DimensionMismatch { expected: dim, got: col.len() });
        }
        let (lo, hi) = if even { (m, dim) } else { (0, m) };
        for idx in lo..hi {
            if !Zero::is_zero(&col[idx]) {
                return Err(Error::Parity(format!(
                    "{} control has support at coordinate {idx}",
                    if even { "even" } else { "odd" }
                )));
            }
        }
        Ok(AlgebraElement { coeffs: col.clone() })
    };
    let mut gens = Vec::new();
    for c in even_cols {
        gens.push(check_col(c, true)?);
    }
    for c in odd_cols {
        gens.push(check_col(c, false)?);
    }
    let action = AdAction::from_linear_map(&alg, a)?;
    let span = linear_orbit_span(&alg, &action, &gens, dim.saturating_sub(1));
    Ok((alg, span))
}

/// Extended Kalman rank condition on abelian superspace: controllable iff
/// the graded rank of the controllability family equals (m|n).
pub fn kalman_rank(
    a: &SuperMatrix<Rat>,
    even_cols: &[Vec<Rat>],
    odd_cols: &[Vec<Rat>],
) -> Result<(bool, (usize, usize))> {
    let (m, n) = a.block_sizes();
    let (_, span) = kalman_subspace(a, even_cols, odd_cols)?;
    let dim = span.graded_dim();
    Ok((dim == (m, n), dim))
}

/// Run both rank conditions and assemble the verdict, with witnesses for
/// every failed test and the hull trace attached.
pub fn decide(sys: &SystemSpec) -> Result<Verdict> {
    decide_with_cap(sys, None)
}

/// As `decide`, with an explicit cap on ad powers. With a custom cap the
/// cross-check between the hull sequence and the orbit closure is skipped,
/// since a small cap legitimately truncates the orbit.
pub fn decide_with_cap(sys: &SystemSpec, cap: Option<usize>) -> Result<Verdict> {
    let alg = &sys.algebra;
    let action = sys.resolve_action()?;
    let controls = sys.controls();

    let h = lsa_span(alg, &controls);
    let (hull, hull_trace) = ad_hull(alg, &action, &h)?;

    let p_cap = cap.unwrap_or_else(|| default_cap(alg));
    let lsarc_span = ad_orbit_span(alg, &action, &controls, p_cap);
    if cap.is_none() && lsarc_span != hull {
        return Err(Error::Internal(
            "hull sequence and ad-orbit closure disagree".into(),
        ));
    }

    let ad_rank_span = linear_orbit_span(alg, &action, &controls, p_cap);
    let hull_gen_span = linear_orbit_span(alg, &action, &h.basis_elements(), p_cap);

    let ambient = alg.graded_dim();
    let lsarc_dim = lsarc_span.graded_dim();
    let ad_rank_dim = ad_rank_span.graded_dim();
    let lsarc_holds = lsarc_dim == ambient;
    let ad_rank_holds = ad_rank_dim == ambient;
    if ad_rank_holds && !lsarc_holds {
        return Err(Error::Internal(
            "ad-rank span exceeds its own bracket closure".into(),
        ));
    }

    let classification = if ad_rank_holds {
        Classification::LocallyControllable
    } else if lsarc_holds {
        Classification::TransitiveNotDecided
    } else {
        Classification::NotTransitive
    };
    let annotation = match (lsarc_holds, ad_rank_holds) {
        (true, true) => "locally controllable by the super ad-rank condition",
        (true, false) => "transitive by LSARC but not locally controllable",
        (false, _) => "fails LSARC: not transitive",
    }
    .to_string();

    Ok(Verdict {
        system: sys.name.clone(),
        lsarc_holds,
        ad_rank_holds,
        classification,
        lsarc_dim,
        ad_rank_dim,
        ad_rank_dim_hull_generators: hull_gen_span.graded_dim(),
        ambient_dim: ambient,
        lsarc_witnesses: alg.missing_basis_elements(&lsarc_span),
        ad_rank_witnesses: alg.missing_basis_elements(&ad_rank_span),
        hull_trace,
        annotation,
    })
}

/// The ad-rank span itself, for subspace-level comparisons.
pub fn ad_rank_span(sys: &SystemSpec) -> Result<GradedSubspace> {
    let action = sys.resolve_action()?;
    Ok(linear_orbit_span(&sys.algebra, &action, &sys.controls(), default_cap(&sys.algebra)))
}

/// The LSARC span itself, for subspace-level comparisons.
pub fn lsarc_span(sys: &SystemSpec) -> Result<GradedSubspace> {
    let action = sys.resolve_action()?;
    Ok(ad_orbit_span(&sys.algebra, &action, &sys.controls(), default_cap(&sys.algebra)))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::ring::rint;

    fn sl11_realized() -> LieSuperalgebra {
        LieSuperalgebra::from_matrix_basis(
            "sl(1|1)",
            vec![
                ("Y1".into(), SuperMatrix::identity(1, 1)),
                ("Xi1".into(), SuperMatrix::unit(1, 1, 0, 1)),
                ("Xi2".into(), SuperMatrix::unit(1, 1, 1, 0)),
            ],
        )
        .unwrap()
    }

    fn diag_drift() -> SuperMatrix<Rat> {
        let mut a = SuperMatrix::zero(1, 1, Some(Parity::Even));
        a.set(0, 0, rint(2));
        a.set(1, 1, rint(1));
        a
    }

    fn sl11_system() -> SystemSpec {
        let alg = sl11_realized();
        SystemSpec::new(
            "diag-drift",
            alg,
            Drift::Realized(diag_drift()),
            vec![],
            vec![AlgebraElement::basis(3, 1), AlgebraElement::basis(3, 2)],
        )
        .unwrap()
    }

    #[test]
    fn sl11_lsarc_holds_ad_rank_fails() {
        let sys = sl11_system();
        let (lsarc_ok, lsarc_dim) = lsarc(&sys).unwrap();
        assert!(lsarc_ok);
        assert_eq!(lsarc_dim, (1, 2));
        let (adr_ok, adr_dim) = ad_rank(&sys).unwrap();
        assert!(!adr_ok);
        assert_eq!(adr_dim, (0, 2));
        let verdict = decide(&sys).unwrap();
        assert_eq!(verdict.classification, Classification::TransitiveNotDecided);
        assert_eq!(verdict.ad_rank_witnesses, vec!["Y1".to_string()]);
        assert!(verdict.annotation.contains("transitive by LSARC"));
    }

    #[test]
    fn drift_leaving_algebra_is_reported() {
        // Abelian diagonal algebra inside gl(2|0) with off-diagonal drift.
        let alg = LieSuperalgebra::from_matrix_basis(
            "diag(2)",
            vec![
                ("D1".into(), SuperMatrix::unit(2, 0, 0, 0)),
                ("D2".into(), SuperMatrix::unit(2, 0, 1, 1)),
            ],
        )
        .unwrap();
        let sys = SystemSpec::new(
            "bad-drift",
            alg,
            Drift::Realized(SuperMatrix::unit(2, 0, 0, 1)),
            vec![AlgebraElement::basis(2, 0)],
            vec![],
        )
        .unwrap();
        assert!(matches!(
            lsarc(&sys),
            Err(Error::NotInvariant { element }) if element == "D1"
        ));
    }

    #[test]
    fn kalman_classical_nilpotent() {
        let a = SuperMatrix::<Rat>::unit(2, 0, 0, 1).with_parity(Some(Parity::Even));
        let b = vec![rint(0), rint(1)];
        let (ok, rank) = kalman_rank(&a, &[b], &[]).unwrap();
        assert!(ok);
        assert_eq!(rank, (2, 0));
    }

    #[test]
    fn kalman_identity_mixed_controls() {
        let a = SuperMatrix::<Rat>::identity(1, 1);
        let b = vec![rint(1), rint(0)];
        let beta = vec![rint(0), rint(1)];
        let (ok, rank) = kalman_rank(&a, &[b], &[beta]).unwrap();
        assert!(ok);
        assert_eq!(rank, (1, 1));
    }

    #[test]
    fn kalman_zero_controls_uncontrollable() {
        let a = SuperMatrix::<Rat>::identity(2, 1);
        let zero = vec![rint(0); 3];
        let (ok, rank) = kalman_rank(&a, &[zero], &[]).unwrap();
        assert!(!ok);
        assert_eq!(rank, (0, 0));
    }

    #[test]
    fn abelian_single_direction_not_transitive() {
        let alg = LieSuperalgebra::abelian(2, 0);
        let sys = SystemSpec::new(
            "central",
            alg,
            Drift::Linear(SuperMatrix::zero(2, 0, Some(Parity::Even))),
            vec![AlgebraElement::basis(2, 0)],
            vec![],
        )
        .unwrap();
        let verdict = decide(&sys).unwrap();
        assert_eq!(verdict.classification, Classification::NotTransitive);
        assert_eq!(verdict.lsarc_dim, (1, 0));
        assert_eq!(verdict.lsarc_witnesses, vec!["X2".to_string()]);
    }

    #[test]
    fn verdict_invariant_ad_rank_implies_lsarc() {
        // Full control set: both conditions hold.
        let alg = sl11_realized();
        let sys = SystemSpec::new(
            "full",
            alg,
            Drift::Realized(diag_drift()),
            vec![AlgebraElement::basis(3, 0)],
            vec![AlgebraElement::basis(3, 1), AlgebraElement::basis(3, 2)],
        )
        .unwrap();
        let v = decide(&sys).unwrap();
        assert!(v.ad_rank_holds && v.lsarc_holds);
        assert_eq!(v.classification, Classification::LocallyControllable);
    }

    #[test]
    fn system_validation_errors() {
        let alg = sl11_realized();
        // No controls at all.
        assert!(SystemSpec::new("none", alg.clone(), Drift::Element(AlgebraElement::zero(3)), vec![], vec![]).is_err());
        // Odd control slot holding an even element.
        assert!(SystemSpec::new(
            "bad-parity",
            alg.clone(),
            Drift::Realized(diag_drift()),
            vec![],
            vec![AlgebraElement::basis(3, 0)],
        )
        .is_err());
        // Odd drift element.
        assert!(SystemSpec::new(
            "odd-drift",
            alg,
            Drift::Element(AlgebraElement::basis(3, 1)),
            vec![],
            vec![AlgebraElement::basis(3, 1)],
        )
        .is_err());
    }

    #[test]
    fn decide_is_deterministic() {
        let sys = sl11_system();
        let a = decide(&sys).unwrap();
        let b = decide(&sys).unwrap();
        assert_eq!(a, b);
    }
}
