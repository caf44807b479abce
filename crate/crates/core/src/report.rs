//! Rendering of verdicts: a human summary and a stable machine-readable
//! JSON block. Field order is fixed by the struct definitions, so equal
//! inputs produce byte-identical reports.

use crate::lsa::LieSuperalgebra;
use crate::rank::Verdict;
use serde::Serialize;

#[derive(Serialize)]
struct RankBlock {
    holds: bool,
    dim: [usize; 2],
    total: usize,
    witnesses: Vec<String>,
}

#[derive(Serialize)]
struct HullStepBlock {
    step: usize,
    added: Vec<String>,
    dim: [usize; 2],
}

#[derive(Serialize)]
struct HullTraceBlock {
    steps: Vec<HullStepBlock>,
    terminated_at: usize,
}

#[derive(Serialize)]
struct MachineReport {
    system: String,
    classification: String,
    exit_code: i32,
    ambient_dim: [usize; 2],
    lsarc: RankBlock,
    ad_rank: RankBlock,
    ad_rank_dim_hull_generators: [usize; 2],
    hull_trace: HullTraceBlock,
    annotation: String,
}

fn machine_struct(alg: &LieSuperalgebra, v: &Verdict) -> MachineReport {
    MachineReport {
        system: v.system.clone(),
        classification: v.classification.as_str().to_string(),
        exit_code: v.classification.exit_code(),
        ambient_dim: [v.ambient_dim.0, v.ambient_dim.1],
        lsarc: RankBlock {
            holds: v.lsarc_holds,
            dim: [v.lsarc_dim.0, v.lsarc_dim.1],
            total: v.lsarc_dim.0 + v.lsarc_dim.1,
            witnesses: v.lsarc_witnesses.clone(),
        },
        ad_rank: RankBlock {
            holds: v.ad_rank_holds,
            dim: [v.ad_rank_dim.0, v.ad_rank_dim.1],
            total: v.ad_rank_dim.0 + v.ad_rank_dim.1,
            witnesses: v.ad_rank_witnesses.clone(),
        },
        ad_rank_dim_hull_generators: [
            v.ad_rank_dim_hull_generators.0,
            v.ad_rank_dim_hull_generators.1,
        ],
        hull_trace: HullTraceBlock {
            steps: v
                .hull_trace
                .steps
                .iter()
                .map(|s| HullStepBlock {
                    step: s.index,
                    added: s.added.iter().map(|e| alg.format_element(e)).collect(),
                    dim: [s.dim_after.0, s.dim_after.1],
                })
                .collect(),
            terminated_at: v.hull_trace.terminated_at,
        },
        annotation: v.annotation.clone(),
    }
}

/// Stable JSON form of a verdict.
pub fn machine_report(alg: &LieSuperalgebra, v: &Verdict) -> String {
    serde_json::to_string_pretty(&machine_struct(alg, v)).expect("report serializes")
}

/// Human-readable verdict with the hull trace as a per-step table.
pub fn human_report(alg: &LieSuperalgebra, v: &Verdict) -> String {
    let mut out = String::new();
    out.push_str(&format!(
        "algebra {} with graded dimension ({}|{})\n",
        alg.name(),
        v.ambient_dim.0,
        v.ambient_dim.1
    ));
    out.push_str(&format!("system: {}\n\n", v.system));
    out.push_str("hull construction (h_i = h_{i-1} + ad^i(X)(h)):\n");
    for s in &v.hull_trace.steps {
        let added: Vec<String> = s.added.iter().map(|e| alg.format_element(e)).collect();
        out.push_str(&format!(
            "  step {:>2}: dim ({}|{})  added: {}\n",
            s.index,
            s.dim_after.0,
            s.dim_after.1,
            if added.is_empty() { "-".to_string() } else { added.join(", ") }
        ));
    }
    out.push_str(&format!("  terminated at p = {}\n\n", v.hull_trace.terminated_at));
    out.push_str(&format!(
        "LSARC:        {} — superalgebra span dim ({}|{}) of ({}|{})\n",
        if v.lsarc_holds { "holds" } else { "fails" },
        v.lsarc_dim.0,
        v.lsarc_dim.1,
        v.ambient_dim.0,
        v.ambient_dim.1
    ));
    if !v.lsarc_witnesses.is_empty() {
        out.push_str(&format!("  missing: {}\n", v.lsarc_witnesses.join(", ")));
    }
    out.push_str(&format!(
        "super ad-rank: {} — linear span dim ({}|{})\n",
        if v.ad_rank_holds { "holds" } else { "fails" },
        v.ad_rank_dim.0,
        v.ad_rank_dim.1
    ));
    if !v.ad_rank_witnesses.is_empty() {
        out.push_str(&format!("  missing: {}\n", v.ad_rank_witnesses.join(", ")));
    }
    out.push_str(&format!(
        "  (linear span over the generated subalgebra's basis: ({}|{}))\n",
        v.ad_rank_dim_hull_generators.0, v.ad_rank_dim_hull_generators.1
    ));
    out.push_str(&format!(
        "\nclassification: {} — {}\n",
        v.classification.as_str(),
        v.annotation
    ));
    out
}

/// Human text followed by the machine block in a fenced code section.
pub fn full_report(alg: &LieSuperalgebra, v: &Verdict) -> String {
    format!(
        "{}\n```json\n{}\n```\n",
        human_report(alg, v),
        machine_report(alg, v)
    )
}

/// All nonzero brackets `[e_i, e_j]` for i <= j, one per line.
pub fn bracket_table(alg: &LieSuperalgebra) -> String {
    let mut out = String::new();
    let dim = alg.dim();
    for i in 0..dim {
        for j in i..dim {
            let v = alg.bracket_basis(i, j);
            if !v.is_zero() {
                out.push_str(&format!(
                    "[{}, {}] = {}\n",
                    alg.basis()[i].name,
                    alg.basis()[j].name,
                    alg.format_element(&v)
                ));
            }
        }
    }
    out
}
