//! Built-in algebras and systems: each named algebra is stored twice, as a
//! structure-constant table and as a matrix realization, so the oracle
//! cross-check is permanent. Reference values that disagree with direct
//! matrix computation are kept as discrepancy records and flagged, never
//! silently corrected away.

use crate::error::{Error, Result};
use crate::grassmann::Parity;
use crate::lsa::{AlgebraElement, BasisElement, LieSuperalgebra};
use crate::rank::{decide, Classification, Drift, SystemSpec};
use crate::ring::{rat, Rat};
use crate::supermatrix::SuperMatrix;

/// What the reference material claims for a system.
#[derive(Debug, Clone, PartialEq)]
pub struct ExpectedVerdict {
    pub classification: Classification,
    pub lsarc_dim: (usize, usize),
    /// Elements the reference names as missing from the ad-rank span.
    pub ad_rank_witnesses: Vec<String>,
}

/// A reference value that direct matrix computation contradicts.
#[derive(Debug, Clone, PartialEq)]
pub struct Discrepancy {
    pub location: String,
    pub reference_value: String,
    pub computed_value: String,
    pub note: String,
}

#[derive(Debug, Clone)]
pub struct CatalogSystem {
    pub system: SystemSpec,
    pub expected: ExpectedVerdict,
}

#[derive(Debug, Clone)]
pub struct CatalogEntry {
    pub name: String,
    pub algebra: LieSuperalgebra,
    pub systems: Vec<CatalogSystem>,
    pub discrepancies: Vec<Discrepancy>,
}

fn tri(i: usize, j: usize, k: usize, num: i64, den: i64) -> (usize, usize, usize, Rat) {
    (i, j, k, rat(num, den))
}

fn unit(m: usize, n: usize, i: usize, j: usize) -> SuperMatrix<Rat> {
    SuperMatrix::unit(m, n, i, j)
}

fn even_diag(m: usize, n: usize, vals: &[(usize, Rat)]) -> SuperMatrix<Rat> {
    let mut out = SuperMatrix::zero(m, n, Some(Parity::Even));
    for (i, v) in vals {
        out.set(*i, *i, v.clone());
    }
    out
}

fn sl11() -> Result<CatalogEntry> {
    let basis = vec![
        BasisElement::new("Y1", Parity::Even),
        BasisElement::new("Xi1", Parity::Odd),
        BasisElement::new("Xi2", Parity::Odd),
    ];
    let algebra = LieSuperalgebra::from_triplets("sl(1|1)", basis, &[tri(1, 2, 0, 1, 1)])?
        .with_realization(crate::lsa::Realization {
            m: 1,
            n: 1,
            matrices: vec![
                SuperMatrix::identity(1, 1),
                unit(1, 1, 0, 1),
                unit(1, 1, 1, 0),
            ],
        })?;

    let drift = even_diag(1, 1, &[(0, rat(2, 1)), (1, rat(1, 1))]);
    let system = SystemSpec::new(
        "diag-drift",
        algebra.clone(),
        Drift::Realized(drift),
        vec![],
        vec![AlgebraElement::basis(3, 1), AlgebraElement::basis(3, 2)],
    )?;

    Ok(CatalogEntry {
        name: "sl(1|1)".into(),
        algebra,
        systems: vec![CatalogSystem {
            system,
            expected: ExpectedVerdict {
                classification: Classification::TransitiveNotDecided,
                lsarc_dim: (1, 2),
                ad_rank_witnesses: vec!["Y1".into()],
            },
        }],
        discrepancies: vec![Discrepancy {
            location: "sl(1|1)/diag-drift/ad-values".into(),
            reference_value: "ad(X)(Xi1) = Xi2, ad(X)(Xi2) = Xi1".into(),
            computed_value: "ad(X)(Xi1) = Xi1, ad(X)(Xi2) = -Xi2".into(),
            note: "spans and the verdict are unaffected".into(),
        }],
    })
}

fn sl21_algebra() -> Result<LieSuperalgebra> {
    let basis = vec![
        BasisElement::new("Y1", Parity::Even),
        BasisElement::new("Y2", Parity::Even),
        BasisElement::new("Y3", Parity::Even),
        BasisElement::new("Y4", Parity::Even),
        BasisElement::new("Xi1", Parity::Odd),
        BasisElement::new("Xi2", Parity::Odd),
        BasisElement::new("Xi3", Parity::Odd),
        BasisElement::new("Xi4", Parity::Odd),
    ];
    let triplets = [
        tri(0, 2, 2, 1, 1),   // [Y1,Y3] = Y3
        tri(0, 3, 3, -1, 1),  // [Y1,Y4] = -Y4
        tri(0, 4, 4, 1, 2),   // [Y1,Xi1] = 1/2 Xi1
        tri(0, 6, 6, -1, 2),  // [Y1,Xi3] = -1/2 Xi3
        tri(0, 5, 5, 1, 2),   // [Y1,Xi2] = 1/2 Xi2
        tri(0, 7, 7, -1, 2),  // [Y1,Xi4] = -1/2 Xi4
        tri(1, 4, 4, 1, 2),   // [Y2,Xi1] = 1/2 Xi1
        tri(1, 6, 6, 1, 2),   // [Y2,Xi3] = 1/2 Xi3
        tri(1, 5, 5, -1, 2),  // [Y2,Xi2] = -1/2 Xi2
        tri(1, 7, 7, -1, 2),  // [Y2,Xi4] = -1/2 Xi4
        tri(2, 6, 4, -1, 1),  // [Y3,Xi3] = -Xi1
        tri(2, 7, 5, 1, 1),   // [Y3,Xi4] = Xi2
        tri(3, 4, 6, -1, 1),  // [Y4,Xi1] = -Xi3
        tri(3, 5, 7, 1, 1),   // [Y4,Xi2] = Xi4
        tri(2, 3, 0, 2, 1),   // [Y3,Y4] = 2Y1
        tri(4, 5, 2, 1, 1),   // [Xi1,Xi2] = Y3
        tri(4, 7, 1, 1, 1),   // [Xi1,Xi4] = Y2 - Y1
        tri(4, 7, 0, -1, 1),
        tri(6, 5, 1, 1, 1),   // [Xi3,Xi2] = Y2 + Y1
        tri(6, 5, 0, 1, 1),
        tri(6, 7, 3, 1, 1),   // [Xi3,Xi4] = Y4
    ];
    let half = rat(1, 2);
    LieSuperalgebra::from_triplets("sl(2|1)", basis, &triplets)?.with_realization(
        crate::lsa::Realization {
            m: 2,
            n: 1,
            matrices: vec![
                even_diag(2, 1, &[(0, half.clone()), (1, -half.clone())]),
                even_diag(2, 1, &[(0, half.clone()), (1, half), (2, rat(1, 1))]),
                unit(2, 1, 0, 1),
                unit(2, 1, 1, 0),
                unit(2, 1, 2, 1),
                unit(2, 1, 0, 2),
                unit(2, 1, 2, 0),
                unit(2, 1, 1, 2),
            ],
        },
    )
}

fn sl21() -> Result<CatalogEntry> {
    let algebra = sl21_algebra()?;
    let controls_even = vec![AlgebraElement::basis(8, 1)];
    let controls_odd = vec![AlgebraElement::basis(8, 4), AlgebraElement::basis(8, 5)];

    let shift = SystemSpec::new(
        "shift-drift",
        algebra.clone(),
        Drift::Realized(unit(2, 1, 1, 0).with_parity(Some(Parity::Even))),
        controls_even.clone(),
        controls_odd.clone(),
    )?;
    let rotation_matrix = unit(2, 1, 0, 1)
        .sub(&unit(2, 1, 1, 0))
        .with_parity(Some(Parity::Even));
    let rotation = SystemSpec::new(
        "rotation-drift",
        algebra.clone(),
        Drift::Realized(rotation_matrix),
        controls_even,
        controls_odd,
    )?;

    Ok(CatalogEntry {
        name: "sl(2|1)".into(),
        algebra,
        systems: vec![
            CatalogSystem {
                system: shift,
                expected: ExpectedVerdict {
                    classification: Classification::LocallyControllable,
                    lsarc_dim: (4, 4),
                    ad_rank_witnesses: vec![],
                },
            },
            CatalogSystem {
                system: rotation,
                expected: ExpectedVerdict {
                    classification: Classification::TransitiveNotDecided,
                    lsarc_dim: (4, 4),
                    ad_rank_witnesses: vec!["Y1".into(), "Y4".into()],
                },
            },
        ],
        discrepancies: vec![
            Discrepancy {
                location: "sl(2|1)/shift-drift/ad-values".into(),
                reference_value: "ad(X)(Xi1) = Xi3".into(),
                computed_value: "ad(X)(Xi1) = -Xi3".into(),
                note: "sign only; spans unaffected".into(),
            },
            Discrepancy {
                location: "sl(2|1)/shift-drift/ad-values".into(),
                reference_value: "ad(X)(Y3) = Y1, ad^2(X)(Y3) = Y4".into(),
                computed_value: "ad(X)(Y3) = -2Y1, ad^2(X)(Y3) = -2Y4".into(),
                note: "scale and sign; the spanned directions agree".into(),
            },
            Discrepancy {
                location: "sl(2|1)/shift-drift/verdict".into(),
                reference_value: "locally controllable (linear span (4|4))".into(),
                computed_value:
                    "ad-rank span over the control set is (1|4): transitive, not decided".into(),
                note: "the reference applies ad powers to the generated subalgebra's basis \
                       (including Y3) rather than to the control set; that family's span is \
                       reported as ad_rank_dim_hull_generators"
                    .into(),
            },
            Discrepancy {
                location: "sl(2|1)/rotation-drift/ad-values".into(),
                reference_value: "ad(X)(Xi2) = Xi4, ad^2(X)(Xi2) = Xi2".into(),
                computed_value: "ad(X)(Xi2) = -Xi4, ad^2(X)(Xi2) = -Xi2".into(),
                note: "sign only; spans unaffected".into(),
            },
            Discrepancy {
                location: "sl(2|1)/rotation-drift/witnesses".into(),
                reference_value: "Y1, Y4 missing from the ad-rank span".into(),
                computed_value: "Y1, Y3, Y4 missing from the ad-rank span".into(),
                note: "the reference omits Y3; the verdict is unaffected".into(),
            },
        ],
    })
}

fn osp21() -> Result<CatalogEntry> {
    let basis = vec![
        BasisElement::new("Y1", Parity::Even),
        BasisElement::new("Y2", Parity::Even),
        BasisElement::new("Y3", Parity::Even),
        BasisElement::new("Xi1", Parity::Odd),
        BasisElement::new("Xi2", Parity::Odd),
    ];
    let triplets = [
        tri(0, 1, 1, 1, 1),   // [Y1,Y2] = Y2 (matrix oracle; see discrepancies)
        tri(0, 2, 2, -1, 1),  // [Y1,Y3] = -Y3
        tri(0, 3, 3, 1, 2),   // [Y1,Xi1] = 1/2 Xi1
        tri(0, 4, 4, -1, 2),  // [Y1,Xi2] = -1/2 Xi2
        tri(1, 4, 3, -1, 1),  // [Y2,Xi2] = -Xi1
        tri(1, 2, 0, 2, 1),   // [Y2,Y3] = 2Y1
        tri(2, 3, 4, -1, 1),  // [Y3,Xi1] = -Xi2
        tri(3, 4, 0, 1, 2),   // [Xi1,Xi2] = 1/2 Y1
        tri(3, 3, 1, 1, 2),   // [Xi1,Xi1] = 1/2 Y2
        tri(4, 4, 2, -1, 2),  // [Xi2,Xi2] = -1/2 Y3
    ];
    let half = rat(1, 2);
    let mut xi1 = SuperMatrix::zero(2, 1, Some(Parity::Odd));
    xi1.set(0, 2, half.clone());
    xi1.set(2, 1, half.clone());
    let mut xi2 = SuperMatrix::zero(2, 1, Some(Parity::Odd));
    xi2.set(1, 2, -half.clone());
    xi2.set(2, 0, half.clone());
    let algebra = LieSuperalgebra::from_triplets("osp(2|1)", basis, &triplets)?
        .with_realization(crate::lsa::Realization {
            m: 2,
            n: 1,
            matrices: vec![
                even_diag(2, 1, &[(0, half.clone()), (1, -half)]),
                unit(2, 1, 0, 1),
                unit(2, 1, 1, 0),
                xi1,
                xi2,
            ],
        })?;

    let drift = unit(2, 1, 0, 1)
        .add(&unit(2, 1, 1, 0))
        .with_parity(Some(Parity::Even));
    let system = SystemSpec::new(
        "symmetric-drift",
        algebra.clone(),
        Drift::Realized(drift),
        vec![AlgebraElement::basis(5, 1)],
        vec![AlgebraElement::basis(5, 3)],
    )?;

    Ok(CatalogEntry {
        name: "osp(2|1)".into(),
        algebra,
        systems: vec![CatalogSystem {
            system,
            expected: ExpectedVerdict {
                classification: Classification::LocallyControllable,
                lsarc_dim: (3, 2),
                ad_rank_witnesses: vec![],
            },
        }],
        discrepancies: vec![
            Discrepancy {
                location: "osp(2|1)/table".into(),
                reference_value: "[Y1,Y2] = Y1".into(),
                computed_value: "[Y1,Y2] = Y2".into(),
                note: "the printed value violates the Jacobi identity; the matrix-oracle \
                       value is stored"
                    .into(),
            },
            Discrepancy {
                location: "osp(2|1)/symmetric-drift/ad-values".into(),
                reference_value: "ad^2(X)(Y2) = Y3 - Y1".into(),
                computed_value: "ad^2(X)(Y2) = 2Y2 - 2Y3".into(),
                note: "same span increment (Y3); verdict unaffected".into(),
            },
        ],
    })
}

fn gl(m: usize, n: usize) -> Result<CatalogEntry> {
    if m + n == 0 {
        return Err(Error::Precondition("gl(0|0) is empty".into()));
    }
    let size = m + n;
    let mut named = Vec::with_capacity(size * size);
    for i in 0..size {
        for j in 0..size {
            named.push((format!("E{}{}", i + 1, j + 1), unit(m, n, i, j)));
        }
    }
    let algebra = LieSuperalgebra::from_matrix_basis(format!("gl({m}|{n})"), named)?;
    Ok(CatalogEntry {
        name: format!("gl({m}|{n})"),
        algebra,
        systems: vec![],
        discrepancies: vec![],
    })
}

fn abelian(m: usize, n: usize) -> Result<CatalogEntry> {
    if m + n == 0 {
        return Err(Error::Precondition("abelian(0|0) is empty".into()));
    }
    Ok(CatalogEntry {
        name: format!("abelian({m}|{n})"),
        algebra: LieSuperalgebra::abelian(m, n),
        systems: vec![],
        discrepancies: vec![],
    })
}

fn parse_parametric(name: &str) -> Option<(&str, usize, usize)> {
    let open = name.find('(')?;
    let close = name.strip_suffix(')')?;
    let base = &name[..open];
    let args = &close[open + 1..];
    let (ms, ns) = args.split_once('|')?;
    Some((base, ms.trim().parse().ok()?, ns.trim().parse().ok()?))
}

/// Catalog names accepted by `load`; gl and abelian take any block sizes.
pub fn names() -> Vec<&'static str> {
    vec!["sl(1|1)", "sl(2|1)", "osp(2|1)", "gl(m|n)", "abelian(m|n)"]
}

/// Load a fully validated entry: graded axioms are checked, and for
/// realized algebras the matrix oracle must reproduce the stored table.
pub fn load(name: &str) -> Result<CatalogEntry> {
    let entry = match name {
        "sl(1|1)" => sl11()?,
        "sl(2|1)" => sl21()?,
        "osp(2|1)" => osp21()?,
        other => match parse_parametric(other) {
            Some(("gl", m, n)) => gl(m, n)?,
            Some(("abelian", m, n)) => abelian(m, n)?,
            _ => return Err(Error::UnknownCatalog(other.to_string())),
        },
    };
    let axioms = entry.algebra.check_graded_axioms();
    if !axioms.all_ok() {
        return Err(Error::Internal(format!(
            "catalog entry '{name}' fails graded axioms: {} violations",
            axioms.violations.len()
        )));
    }
    if let Some(mismatch) = oracle_mismatch(&entry.algebra)? {
        return Err(Error::Internal(format!(
            "catalog entry '{name}' disagrees with its matrix oracle at {mismatch}"
        )));
    }
    Ok(entry)
}

/// First (i, j) where the stored table and the matrix-derived constants
/// disagree, if any.
fn oracle_mismatch(alg: &LieSuperalgebra) -> Result<Option<String>> {
    let Some(real) = alg.realization() else {
        return Ok(None);
    };
    let named: Vec<(String, SuperMatrix<Rat>)> = alg
        .basis()
        .iter()
        .zip(&real.matrices)
        .map(|(b, m)| (b.name.clone(), m.clone()))
        .collect();
    let derived = LieSuperalgebra::from_matrix_basis(alg.name(), named)?;
    let dim = alg.dim();
    for i in 0..dim {
        for j in 0..dim {
            if alg.bracket_basis(i, j) != derived.bracket_basis(i, j) {
                return Ok(Some(format!(
                    "[{}, {}]",
                    alg.basis()[i].name,
                    alg.basis()[j].name
                )));
            }
        }
    }
    Ok(None)
}

#[derive(Debug, Clone, PartialEq)]
pub enum ItemStatus {
    Pass,
    /// Passed against a documented discrepancy record.
    Flagged(String),
    Fail(String),
}

#[derive(Debug, Clone, PartialEq)]
pub struct ReportItem {
    pub entry: String,
    pub check: String,
    pub status: ItemStatus,
}

#[derive(Debug, Clone, Default)]
pub struct CatalogReport {
    pub items: Vec<ReportItem>,
}

impl CatalogReport {
    pub fn all_ok(&self) -> bool {
        self.items
            .iter()
            .all(|i| !matches!(i.status, ItemStatus::Fail(_)))
    }

    pub fn render(&self) -> String {
        let mut out = String::new();
        for item in &self.items {
            let line = match &item.status {
                ItemStatus::Pass => format!("[PASS] {} :: {}", item.entry, item.check),
                ItemStatus::Flagged(note) => {
                    format!("[FLAG] {} :: {} — {}", item.entry, item.check, note)
                }
                ItemStatus::Fail(msg) => {
                    format!("[FAIL] {} :: {} — {}", item.entry, item.check, msg)
                }
            };
            out.push_str(&line);
            out.push('\n');
        }
        out
    }
}

/// Validate one entry: axioms, oracle agreement, expected verdicts, and
/// surface every documented discrepancy as a flagged item.
pub fn verify_entry(entry: &CatalogEntry) -> Vec<ReportItem> {
    let mut items = Vec::new();
    let name = entry.name.clone();

    let axioms = entry.algebra.check_graded_axioms();
    items.push(ReportItem {
        entry: name.clone(),
        check: "graded-axioms".into(),
        status: if axioms.all_ok() {
            ItemStatus::Pass
        } else {
            ItemStatus::Fail(format!("{} violations", axioms.violations.len()))
        },
    });

    if entry.algebra.realization().is_some() {
        let status = match oracle_mismatch(&entry.algebra) {
            Ok(None) => ItemStatus::Pass,
            Ok(Some(at)) => {
                let documented = entry
                    .discrepancies
                    .iter()
                    .find(|d| d.location.contains("table"));
                match documented {
                    Some(d) => ItemStatus::Flagged(format!(
                        "table mismatch at {at} covered by record '{}'",
                        d.location
                    )),
                    None => ItemStatus::Fail(format!("table mismatch at {at}")),
                }
            }
            Err(e) => ItemStatus::Fail(e.to_string()),
        };
        items.push(ReportItem { entry: name.clone(), check: "matrix-oracle".into(), status });
    }

    for cs in &entry.systems {
        let check = format!("system '{}' verdict", cs.system.name);
        let status = match decide(&cs.system) {
            Err(e) => ItemStatus::Fail(e.to_string()),
            Ok(v) => {
                let classification_ok = v.classification == cs.expected.classification;
                let lsarc_ok = v.lsarc_dim == cs.expected.lsarc_dim;
                let witnesses_ok = cs
                    .expected
                    .ad_rank_witnesses
                    .iter()
                    .all(|w| v.ad_rank_witnesses.contains(w));
                if classification_ok && lsarc_ok && witnesses_ok {
                    ItemStatus::Pass
                } else {
                    let documented = entry.discrepancies.iter().find(|d| {
                        d.location.contains(&cs.system.name) && d.location.contains("verdict")
                    });
                    match documented {
                        Some(d) => ItemStatus::Flagged(format!(
                            "expected {} got {}; covered by record '{}'",
                            cs.expected.classification.as_str(),
                            v.classification.as_str(),
                            d.location
                        )),
                        None => ItemStatus::Fail(format!(
                            "expected {} (lsarc {:?}), got {} (lsarc {:?}, ad-rank witnesses {:?})",
                            cs.expected.classification.as_str(),
                            cs.expected.lsarc_dim,
                            v.classification.as_str(),
                            v.lsarc_dim,
                            v.ad_rank_witnesses
                        )),
                    }
                }
            }
        };
        items.push(ReportItem { entry: name.clone(), check, status });
    }

    for d in &entry.discrepancies {
        items.push(ReportItem {
            entry: name.clone(),
            check: format!("discrepancy record '{}'", d.location),
            status: ItemStatus::Flagged(format!(
                "reference '{}' vs computed '{}' ({})",
                d.reference_value, d.computed_value, d.note
            )),
        });
    }

    items
}

/// Verify every named entry (or just those whose name contains `only`).
pub fn verify_catalog(only: Option<&str>) -> Result<CatalogReport> {
    let all = ["sl(1|1)", "sl(2|1)", "osp(2|1)", "gl(2|2)", "abelian(2|1)"];
    let mut report = CatalogReport::default();
    for name in all {
        if let Some(filter) = only {
            if !name.contains(filter) {
                continue;
            }
        }
        let entry = load(name)?;
        report.items.extend(verify_entry(&entry));
    }
    Ok(report)
}
