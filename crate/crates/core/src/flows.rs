//! Matrix-level verification of the structural claims behind the rank
//! conditions, plus desk-scale trajectory simulation: drifts act by
//! conjugation, controls by right multiplication with left-invariant
//! generators (`P -> P Y`).

use crate::closure::AdAction;
use crate::error::{Error, Result};
use crate::grassmann::{GrassmannNumber, Parity};
use crate::linalg::residual_from_span_f64;
use crate::lsa::{GradedSubspace, LieSuperalgebra};
use crate::rank::{Drift, SystemSpec};
use crate::ring::Rat;
use crate::supermatrix::{super_bracket, Gf, SuperMatrix};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

/// One piecewise-constant control segment.
#[derive(Debug, Clone, PartialEq)]
pub struct Segment {
    pub duration: f64,
    pub even_inputs: Vec<f64>,
    pub odd_inputs: Vec<Gf>,
}

/// A piecewise-constant control schedule.
#[derive(Debug, Clone, PartialEq)]
pub struct ControlSchedule {
    pub segments: Vec<Segment>,
}

impl ControlSchedule {
    pub fn new(segments: Vec<Segment>) -> Result<Self> {
        for (i, seg) in segments.iter().enumerate() {
            if !(seg.duration > 0.0) || !seg.duration.is_finite() {
                return Err(Error::Precondition(format!(
                    "segment {i} duration must be positive and finite"
                )));
            }
            for (j, nu) in seg.odd_inputs.iter().enumerate() {
                if !nu.is_homogeneous(Parity::Odd) {
                    return Err(Error::Parity(format!(
                        "segment {i} odd input {j} is not odd"
                    )));
                }
            }
        }
        Ok(ControlSchedule { segments })
    }

    pub fn total_duration(&self) -> f64 {
        self.segments.iter().map(|s| s.duration).sum()
    }
}

/// Sampled group trajectory; times strictly increase from zero.
#[derive(Debug, Clone)]
pub struct Trajectory {
    pub samples: Vec<(f64, SuperMatrix<Gf>)>,
}

impl Trajectory {
    pub fn endpoint(&self) -> &SuperMatrix<Gf> {
        &self.samples.last().expect("trajectory has at least the start").1
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct AdInvarianceReport {
    pub ok: bool,
    /// Basis elements whose bracket with the drift leaves the span.
    pub witnesses: Vec<String>,
}

/// Does `ad(A)` map the realized algebra into itself? Failures are listed
/// per basis element rather than raised.
pub fn check_ad_invariance(
    a: &SuperMatrix<Rat>,
    alg: &LieSuperalgebra,
) -> Result<AdInvarianceReport> {
    let real = alg.realization().ok_or(Error::MissingRealization)?;
    let mut witnesses = Vec::new();
    for (j, mat) in real.matrices.iter().enumerate() {
        let br = super_bracket(a, mat)?;
        if alg.coordinates_of(&br)?.is_none() {
            witnesses.push(alg.basis()[j].name.clone());
        }
    }
    Ok(AdInvarianceReport { ok: witnesses.is_empty(), witnesses })
}

/// Infinitesimal and sampled-flow invariance of a hull under the drift:
/// `ad(A)(hull) ⊆ hull` exactly, and `exp(tA) V exp(-tA)` stays in the
/// realized hull span within 1e-8 for t in {±1, ±0.5}.
pub fn check_hull_flow_invariance(
    a: &SuperMatrix<Rat>,
    alg: &LieSuperalgebra,
    hull: &GradedSubspace,
) -> Result<bool> {
    // Exact infinitesimal form.
    for v in hull.basis_elements() {
        let mat = alg.realize(&v)?;
        let br = super_bracket(a, &mat)?;
        match alg.coordinates_of(&br)? {
            Some(coords) => {
                if !alg.subspace_contains(hull, &coords)? {
                    return Ok(false);
                }
            }
            None => return Ok(false),
        }
    }
    // Sampled conjugation, numerically.
    let a_sim = a.to_sim(0);
    let columns: Vec<Vec<f64>> = hull
        .basis_elements()
        .iter()
        .map(|v| {
            let mat = alg.realize(v)?.to_sim(0);
            Ok(mat.body_matrix().into_iter().flatten().collect())
        })
        .collect::<Result<_>>()?;
    for &t in &[1.0, -1.0, 0.5, -0.5] {
        for v in hull.basis_elements() {
            let mat = alg.realize(&v)?.to_sim(0);
            let moved = a_sim.conjugate(t, &mat)?;
            let flat: Vec<f64> = moved.body_matrix().into_iter().flatten().collect();
            if residual_from_span_f64(&columns, &flat) > 1e-8 {
                return Ok(false);
            }
        }
    }
    Ok(true)
}

/// The affine field `p -> A p + q` on flat coordinates.
pub fn linear_field(a: Vec<Vec<f64>>, q: Vec<f64>) -> impl Fn(&[f64]) -> Vec<f64> {
    move |p: &[f64]| {
        (0..a.len())
            .map(|i| a[i].iter().zip(p).map(|(c, x)| c * x).sum::<f64>() + q[i])
            .collect()
    }
}

/// A field normalizes the constant fields iff its bracket with every
/// constant direction is again constant; for `p -> A p + q` that bracket is
/// `A b` at every point. Checked by comparing the Jacobian-vector product
/// at two distinct sample points via central differences.
pub fn check_linear_field_normalizer<F: Fn(&[f64]) -> Vec<f64>>(
    field: F,
    dim: usize,
    directions: &[Vec<f64>],
) -> bool {
    let eps = 1e-5;
    let tol = 1e-6;
    let p1 = vec![0.3; dim];
    let p2: Vec<f64> = (0..dim).map(|i| -0.7 + 0.4 * i as f64).collect();
    let jvp = |p: &[f64], b: &[f64]| -> Vec<f64> {
        let plus: Vec<f64> = p.iter().zip(b).map(|(x, d)| x + eps * d).collect();
        let minus: Vec<f64> = p.iter().zip(b).map(|(x, d)| x - eps * d).collect();
        let fp = field(&plus);
        let fm = field(&minus);
        fp.iter().zip(&fm).map(|(a, b)| (a - b) / (2.0 * eps)).collect()
    };
    directions.iter().all(|b| {
        let j1 = jvp(&p1, b);
        let j2 = jvp(&p2, b);
        j1.iter().zip(&j2).all(|(x, y)| (x - y).abs() < tol)
    })
}

struct SimContext {
    drift: SuperMatrix<Gf>,
    controls: Vec<SuperMatrix<Gf>>,
    k: usize,
    l: usize,
}

fn sim_context(sys: &SystemSpec, gens: u32) -> Result<SimContext> {
    let drift = match &sys.drift {
        Drift::Realized(a) => a.to_sim(gens),
        Drift::Element(x) => sys.algebra.realize(x)?.to_sim(gens),
        Drift::Linear(_) => return Err(Error::MissingRealization),
    };
    let mut controls = Vec::new();
    for c in sys.even_controls.iter().chain(&sys.odd_controls) {
        controls.push(sys.algebra.realize(c)?.to_sim(gens));
    }
    Ok(SimContext { drift, controls, k: sys.even_controls.len(), l: sys.odd_controls.len() })
}

/// Right-hand side of the state equation for one segment:
/// `P' = A P - P A + P (sum_i u_i Y_i + sum_j nu_j Xi_j)`.
fn segment_generator(ctx: &SimContext, seg: &Segment) -> Result<SuperMatrix<Gf>> {
    if seg.even_inputs.len() != ctx.k || seg.odd_inputs.len() != ctx.l {
        return Err(Error::ArityMismatch {
            even: seg.even_inputs.len(),
            odd: seg.odd_inputs.len(),
            k: ctx.k,
            l: ctx.l,
        });
    }
    let (m, n) = ctx.drift.block_sizes();
    let mut u = SuperMatrix::<Gf>::zero(m, n, Some(Parity::Even));
    for (i, &ui) in seg.even_inputs.iter().enumerate() {
        u = u.add(&ctx.controls[i].scale_f64(ui));
    }
    for (j, nu) in seg.odd_inputs.iter().enumerate() {
        u = u.add(&ctx.controls[ctx.k + j].scale_left(nu));
    }
    Ok(u)
}

/// Fixed-step classical Runge-Kutta on supermatrix entries. Step count
/// keeps the step at most `duration / 64` and at most 1/64.
pub fn simulate(
    sys: &SystemSpec,
    start: &SuperMatrix<Gf>,
    sched: &ControlSchedule,
    gens: u32,
) -> Result<Trajectory> {
    let ctx = sim_context(sys, gens)?;
    if !start.is_finite() {
        return Err(Error::NonFinite);
    }
    let mut samples = vec![(0.0f64, start.clone())];
    let mut state = start.clone();
    let mut now = 0.0f64;
    for seg in &sched.segments {
        let u = segment_generator(&ctx, seg)?;
        let a = &ctx.drift;
        let rhs = |p: &SuperMatrix<Gf>| -> SuperMatrix<Gf> {
            a.matmul(p).sub(&p.matmul(a)).add(&p.matmul(&u))
        };
        let steps = (seg.duration * 64.0).ceil().max(64.0) as usize;
        let h = seg.duration / steps as f64;
        for _ in 0..steps {
            let k1 = rhs(&state);
            let k2 = rhs(&state.add(&k1.scale_f64(h / 2.0)));
            let k3 = rhs(&state.add(&k2.scale_f64(h / 2.0)));
            let k4 = rhs(&state.add(&k3.scale_f64(h)));
            let incr = k1
                .add(&k2.scale_f64(2.0))
                .add(&k3.scale_f64(2.0))
                .add(&k4)
                .scale_f64(h / 6.0);
            state = state.add(&incr);
            if !state.is_finite() {
                return Err(Error::NonFinite);
            }
            now += h;
            samples.push((now, state.clone()));
        }
    }
    Ok(Trajectory { samples })
}

/// Endpoints of seeded randomized schedules with non-negative durations.
/// Diagnostic only: verdicts always come from the rank layer.
pub fn reachable_sample(
    sys: &SystemSpec,
    start: &SuperMatrix<Gf>,
    n_schedules: usize,
    horizon: f64,
    seed: u64,
    gens: u32,
) -> Result<Vec<SuperMatrix<Gf>>> {
    let (k, l) = sys.arity();
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut out = Vec::with_capacity(n_schedules);
    for _ in 0..n_schedules {
        let segments = rng.gen_range(1..=3usize);
        let mut segs = Vec::with_capacity(segments);
        for _ in 0..segments {
            let duration = rng.gen_range(1e-3..horizon / segments as f64);
            let even_inputs = (0..k).map(|_| rng.gen_range(-1.0..1.0)).collect();
            let odd_inputs = (0..l)
                .map(|_| {
                    // Random real multiple of a single generator keeps the
                    // soul degree low and the endpoint interpretable.
                    let idx = rng.gen_range(1..=gens.max(1));
                    GrassmannNumber::generator(gens.max(1), idx)
                        .expect("index within range")
                        .scale(&rng.gen_range(-1.0..1.0))
                })
                .collect();
            segs.push(Segment { duration, even_inputs, odd_inputs });
        }
        let sched = ControlSchedule::new(segs)?;
        out.push(simulate(sys, start, &sched, gens)?.endpoint().clone());
    }
    Ok(out)
}

/// CSV export: a comment header naming (m, n, L), then a time column and
/// the body part of every entry in row-major order.
pub fn trajectory_to_csv(traj: &Trajectory, gens: u32) -> String {
    let mut out = String::new();
    if let Some((_, first)) = traj.samples.first() {
        let (m, n) = first.block_sizes();
        out.push_str(&format!("# m={m} n={n} L={gens}\n"));
        out.push_str("time");
        for i in 0..(m + n) {
            for j in 0..(m + n) {
                out.push_str(&format!(",p{}{}", i + 1, j + 1));
            }
        }
        out.push('\n');
        for (t, mat) in &traj.samples {
            out.push_str(&format!("{t:.9}"));
            for row in mat.body_matrix() {
                for v in row {
                    out.push_str(&format!(",{v:.12}"));
                }
            }
            out.push('\n');
        }
    }
    out
}

/// Convenience: the drift matrix of a system lifted to simulation mode.
pub fn drift_matrix_sim(sys: &SystemSpec, gens: u32) -> Result<SuperMatrix<Gf>> {
    Ok(sim_context(sys, gens)?.drift)
}

/// Exact infinitesimal invariance of a hull under a resolved drift action.
pub fn hull_infinitesimally_invariant(
    alg: &LieSuperalgebra,
    action: &AdAction,
    hull: &GradedSubspace,
) -> Result<bool> {
    for v in hull.basis_elements() {
        if !alg.subspace_contains(hull, &action.apply(&v))? {
            return Ok(false);
        }
    }
    Ok(true)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::lsa::AlgebraElement;
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
        SystemSpec::new(
            "diag-drift",
            sl11_realized(),
            Drift::Realized(diag_drift()),
            vec![],
            vec![AlgebraElement::basis(3, 1), AlgebraElement::basis(3, 2)],
        )
        .unwrap()
    }

    #[test]
    fn ad_invariance_of_sl11_drift() {
        let report = check_ad_invariance(&diag_drift(), &sl11_realized()).unwrap();
        assert!(report.ok, "witnesses: {:?}", report.witnesses);
    }

    #[test]
    fn ad_invariance_failure_names_witness() {
        let diag_alg = LieSuperalgebra::from_matrix_basis(
            "diag(2)",
            vec![
                ("D1".into(), SuperMatrix::unit(2, 0, 0, 0)),
                ("D2".into(), SuperMatrix::unit(2, 0, 1, 1)),
            ],
        )
        .unwrap();
        let off_diag = SuperMatrix::<Rat>::unit(2, 0, 0, 1);
        let report = check_ad_invariance(&off_diag, &diag_alg).unwrap();
        assert!(!report.ok);
        assert_eq!(report.witnesses, vec!["D1".to_string(), "D2".to_string()]);
    }

    #[test]
    fn drift_only_matches_conjugation() {
        let sys = sl11_system();
        let start = SuperMatrix::<Rat>::identity(1, 1)
            .add(&SuperMatrix::unit(1, 1, 0, 1))
            .with_parity(Some(Parity::Even))
            .to_sim(2);
        let sched = ControlSchedule::new(vec![Segment {
            duration: 1.0,
            even_inputs: vec![],
            odd_inputs: vec![Gf::zero(), Gf::zero()],
        }])
        .unwrap();
        let traj = simulate(&sys, &start, &sched, 2).unwrap();
        let expected = diag_drift().to_sim(2).conjugate(1.0, &start).unwrap();
        assert!(traj.endpoint().max_abs_diff(&expected) < 1e-6);
    }

    #[test]
    fn pure_control_matches_left_invariant_flow() {
        let alg = sl11_realized();
        let sys = SystemSpec::new(
            "control-only",
            alg,
            Drift::Realized(SuperMatrix::zero(1, 1, Some(Parity::Even))),
            vec![AlgebraElement::basis(3, 0)],
            vec![],
        )
        .unwrap();
        let start = diag_drift().to_sim(0); // diag(2,1) is a group element
        let t = 0.8;
        let sched = ControlSchedule::new(vec![Segment {
            duration: t,
            even_inputs: vec![1.0],
            odd_inputs: vec![],
        }])
        .unwrap();
        let traj = simulate(&sys, &start, &sched, 0).unwrap();
        let y1 = SuperMatrix::<Rat>::identity(1, 1).to_sim(0);
        let expected = start.matmul(&y1.sm_exp(t).unwrap());
        assert!(traj.endpoint().max_abs_diff(&expected) < 1e-6);
    }

    #[test]
    fn vanishing_duration_returns_start() {
        let sys = sl11_system();
        let start = SuperMatrix::<Rat>::identity(1, 1).to_sim(2);
        let sched = ControlSchedule::new(vec![Segment {
            duration: 1e-8,
            even_inputs: vec![],
            odd_inputs: vec![Gf::zero(), Gf::zero()],
        }])
        .unwrap();
        let traj = simulate(&sys, &start, &sched, 2).unwrap();
        assert!(traj.endpoint().max_abs_diff(&start) < 1e-6);
    }

    #[test]
    fn segment_composition_is_associative() {
        let sys = sl11_system();
        let nu = GrassmannNumber::generator(2, 1).unwrap().scale(&0.7);
        let start = SuperMatrix::<Rat>::identity(1, 1).to_sim(2);
        let seg1 = Segment { duration: 0.5, even_inputs: vec![], odd_inputs: vec![nu.clone(), Gf::zero()] };
        let seg2 = Segment { duration: 0.7, even_inputs: vec![], odd_inputs: vec![Gf::zero(), nu] };
        let joint = ControlSchedule::new(vec![seg1.clone(), seg2.clone()]).unwrap();
        let end_joint = simulate(&sys, &start, &joint, 2).unwrap().endpoint().clone();
        let mid = simulate(&sys, &start, &ControlSchedule::new(vec![seg1]).unwrap(), 2)
            .unwrap()
            .endpoint()
            .clone();
        let end_split = simulate(&sys, &mid, &ControlSchedule::new(vec![seg2]).unwrap(), 2)
            .unwrap()
            .endpoint()
            .clone();
        assert!(end_joint.max_abs_diff(&end_split) < 1e-8);
    }

    #[test]
    fn schedule_validation() {
        assert!(ControlSchedule::new(vec![Segment {
            duration: 0.0,
            even_inputs: vec![],
            odd_inputs: vec![],
        }])
        .is_err());
        let even_in_odd_slot = GrassmannNumber::scalar(2, 1.0);
        assert!(ControlSchedule::new(vec![Segment {
            duration: 1.0,
            even_inputs: vec![],
            odd_inputs: vec![even_in_odd_slot],
        }])
        .is_err());
    }

    #[test]
    fn arity_mismatch_detected() {
        let sys = sl11_system();
        let start = SuperMatrix::<Rat>::identity(1, 1).to_sim(2);
        let sched = ControlSchedule::new(vec![Segment {
            duration: 1.0,
            even_inputs: vec![1.0],
            odd_inputs: vec![],
        }])
        .unwrap();
        assert!(matches!(
            simulate(&sys, &start, &sched, 2),
            Err(Error::ArityMismatch { .. })
        ));
    }

    #[test]
    fn normalizer_check_for_linear_and_quadratic_fields() {
        // Identity map, no offset.
        let id = linear_field(vec![vec![1.0, 0.0], vec![0.0, 1.0]], vec![0.0, 0.0]);
        assert!(check_linear_field_normalizer(id, 2, &[vec![1.0, 0.0]]));
        // Nilpotent shift: bracket with e2 is the constant e1.
        let shift = linear_field(vec![vec![0.0, 1.0], vec![0.0, 0.0]], vec![0.3, -0.2]);
        assert!(check_linear_field_normalizer(shift, 2, &[vec![0.0, 1.0], vec![1.0, 0.0]]));
        // Quadratic field fails: its Jacobian depends on the base point.
        let quad = |p: &[f64]| vec![p[0] * p[0], 0.0];
        assert!(!check_linear_field_normalizer(quad, 2, &[vec![1.0, 0.0]]));
    }

    #[test]
    fn reachable_sample_edges() {
        let sys = sl11_system();
        let start = SuperMatrix::<Rat>::identity(1, 1).to_sim(2);
        assert!(reachable_sample(&sys, &start, 0, 1.0, 1, 2).unwrap().is_empty());

        // Zero drift and a zero control leave every endpoint at the start.
        let frozen = SystemSpec::new(
            "frozen",
            sl11_realized(),
            Drift::Realized(SuperMatrix::zero(1, 1, Some(Parity::Even))),
            vec![AlgebraElement::zero(3)],
            vec![],
        )
        .unwrap();
        for end in reachable_sample(&frozen, &start, 5, 1.0, 42, 2).unwrap() {
            assert!(end.max_abs_diff(&start) < 1e-9);
        }
    }

    #[test]
    fn csv_has_header_and_rows() {
        let sys = sl11_system();
        let start = SuperMatrix::<Rat>::identity(1, 1).to_sim(2);
        let sched = ControlSchedule::new(vec![Segment {
            duration: 0.1,
            even_inputs: vec![],
            odd_inputs: vec![Gf::zero(), Gf::zero()],
        }])
        .unwrap();
        let traj = simulate(&sys, &start, &sched, 2).unwrap();
        let csv = trajectory_to_csv(&traj, 2);
        let mut lines = csv.lines();
        assert_eq!(lines.next().unwrap(), "# m=1 n=1 L=2");
        assert_eq!(lines.next().unwrap(), "time,p11,p12,p21,p22");
        assert!(lines.count() >= 64);
    }
}
