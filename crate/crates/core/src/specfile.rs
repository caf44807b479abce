//! The on-disk system description: JSON with rationals encoded as
//! `[numerator, denominator]` pairs so exactness survives serialization.
//! An algebra section carries structure constants, a matrix realization,
//! or both (the second is then cross-checked against the first), and a
//! system section names the drift and the control vectors.

use crate::catalog::CatalogEntry;
use crate::error::{Error, Result};
use crate::flows::{ControlSchedule, Segment};
use crate::grassmann::{GrassmannNumber, Parity};
use crate::lsa::{AlgebraElement, BasisElement, LieSuperalgebra, Realization};
use crate::rank::{decide_with_cap, Drift, SystemSpec, Verdict};
use crate::ring::Rat;
use crate::supermatrix::SuperMatrix;
use num_bigint::BigInt;
use num_traits::{ToPrimitive, Zero};
use serde::{Deserialize, Serialize};

/// Exact rational on disk: `[numerator, denominator]`.
pub type RatPair = [i64; 2];

#[derive(Debug, Clone, Serialize, Deserialize, Default)]
pub struct Options {
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub num_generators: Option<u32>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub mode: Option<String>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub p_cap: Option<usize>,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct BasisDef {
    pub name: String,
    pub parity: String,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct MatrixDef {
    pub m: usize,
    pub n: usize,
    pub parity: String,
    /// Row-major entries, length (m+n)^2.
    pub entries: Vec<RatPair>,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct RealizationDef {
    pub m: usize,
    pub n: usize,
    pub matrices: Vec<MatrixDef>,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct AlgebraSection {
    pub name: String,
    pub basis: Vec<BasisDef>,
    /// Structure-constant triplets (i, j, k, numerator, denominator).
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub constants: Option<Vec<(usize, usize, usize, i64, i64)>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub realization: Option<RealizationDef>,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum DriftDef {
    Element(Vec<RatPair>),
    Matrix(MatrixDef),
    LinearMap(MatrixDef),
}

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(untagged)]
pub enum ControlDef {
    Coeffs(Vec<RatPair>),
    Realized(RealizedControl),
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct RealizedControl {
    pub matrix: MatrixDef,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct SystemSection {
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub name: Option<String>,
    pub drift: DriftDef,
    #[serde(default)]
    pub even_controls: Vec<ControlDef>,
    #[serde(default)]
    pub odd_controls: Vec<ControlDef>,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct SpecFile {
    #[serde(default)]
    pub options: Options,
    pub algebra: AlgebraSection,
    pub system: SystemSection,
}

/// A control schedule on disk; odd inputs are real multiples of single
/// Grassmann generators.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct ScheduleFile {
    pub segments: Vec<SegmentDef>,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct SegmentDef {
    pub duration: f64,
    #[serde(default)]
    pub even_inputs: Vec<f64>,
    #[serde(default)]
    pub odd_inputs: Vec<OddInputDef>,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct OddInputDef {
    pub coeff: f64,
    /// 1-based Grassmann generator index.
    pub generator: u32,
}

fn field_err(field: &str, message: impl Into<String>) -> Error {
    Error::SpecFile { field: field.to_string(), message: message.into() }
}

fn rat_from_pair(field: &str, pair: RatPair) -> Result<Rat> {
    if pair[1] == 0 {
        return Err(field_err(field, "denominator is zero"));
    }
    Ok(Rat::new(BigInt::from(pair[0]), BigInt::from(pair[1])))
}

fn pair_from_rat(r: &Rat) -> Result<RatPair> {
    let num = r.numer().to_i64();
    let den = r.denom().to_i64();
    match (num, den) {
        (Some(n), Some(d)) => Ok([n, d]),
        _ => Err(Error::Internal("rational too large for the file format".into())),
    }
}

fn parity_from_str(field: &str, s: &str) -> Result<Parity> {
    match s {
        "even" => Ok(Parity::Even),
        "odd" => Ok(Parity::Odd),
        other => Err(field_err(field, format!("parity must be 'even' or 'odd', got '{other}'"))),
    }
}

fn matrix_from_def(field: &str, def: &MatrixDef) -> Result<SuperMatrix<Rat>> {
    let size = def.m + def.n;
    if size == 0 {
        return Err(field_err(field, "block sizes must not both be zero"));
    }
    if def.entries.len() != size * size {
        return Err(field_err(
            field,
            format!("expected {} entries, got {}", size * size, def.entries.len()),
        ));
    }
    let parity = parity_from_str(field, &def.parity)?;
    let mut out = SuperMatrix::zero(def.m, def.n, Some(parity));
    for i in 0..size {
        for j in 0..size {
            let r = rat_from_pair(field, def.entries[i * size + j])?;
            out.set(i, j, r);
        }
    }
    Ok(out)
}

fn matrix_to_def(mat: &SuperMatrix<Rat>) -> Result<MatrixDef> {
    let (m, n) = mat.block_sizes();
    let parity = match mat.declared_parity() {
        Some(Parity::Even) => "even",
        Some(Parity::Odd) => "odd",
        None => return Err(Error::Internal("cannot serialize a mixed-parity matrix".into())),
    };
    let entries = mat.flatten().iter().map(pair_from_rat).collect::<Result<_>>()?;
    Ok(MatrixDef { m, n, parity: parity.into(), entries })
}

fn coeffs_from_pairs(field: &str, pairs: &[RatPair], dim: usize) -> Result<AlgebraElement> {
    if pairs.len() != dim {
        return Err(field_err(
            field,
            format!("coefficient vector has length {}, algebra dimension is {dim}", pairs.len()),
        ));
    }
    let coeffs = pairs
        .iter()
        .map(|&p| rat_from_pair(field, p))
        .collect::<Result<Vec<_>>>()?;
    Ok(AlgebraElement { coeffs })
}

/// A parsed and validated spec file, ready to decide or simulate.
#[derive(Debug, Clone)]
pub struct BuiltSystem {
    pub system: SystemSpec,
    pub options: Options,
}

/// Parse JSON text into the schema, with serde diagnostics surfaced.
pub fn parse_spec(json: &str) -> Result<SpecFile> {
    serde_json::from_str(json).map_err(|e| field_err("json", e.to_string()))
}

/// Build the algebra from its section, cross-checking constants against
/// the realization when both are present.
pub fn build_algebra(section: &AlgebraSection) -> Result<LieSuperalgebra> {
    let mut basis = Vec::new();
    for (i, b) in section.basis.iter().enumerate() {
        let parity = parity_from_str(&format!("algebra.basis[{i}].parity"), &b.parity)?;
        basis.push(BasisElement::new(b.name.clone(), parity));
    }
    let dim = basis.len();
    if dim == 0 {
        return Err(field_err("algebra.basis", "basis must not be empty"));
    }

    let realization = match &section.realization {
        Some(def) => {
            if def.matrices.len() != dim {
                return Err(field_err(
                    "algebra.realization.matrices",
                    format!("expected {dim} matrices, got {}", def.matrices.len()),
                ));
            }
            let mut mats = Vec::new();
            for (i, mdef) in def.matrices.iter().enumerate() {
                let field = format!("algebra.realization.matrices[{i}]");
                if (mdef.m, mdef.n) != (def.m, def.n) {
                    return Err(field_err(&field, "block sizes disagree with the realization header"));
                }
                let mat = matrix_from_def(&field, mdef)?;
                if mat.declared_parity() != Some(basis[i].parity) {
                    return Err(field_err(
                        &field,
                        format!(
                            "matrix parity {} disagrees with basis element '{}' ({})",
                            mdef.parity,
                            basis[i].name,
                            basis[i].parity.as_str()
                        ),
                    ));
                }
                mats.push(mat);
            }
            Some(Realization { m: def.m, n: def.n, matrices: mats })
        }
        None => None,
    };

    let algebra = match (&section.constants, realization) {
        (Some(triplets), real) => {
            let mut parsed = Vec::new();
            for (idx, &(i, j, k, num, den)) in triplets.iter().enumerate() {
                let field = format!("algebra.constants[{idx}]");
                if i >= dim || j >= dim || k >= dim {
                    return Err(field_err(&field, "basis index out of range"));
                }
                parsed.push((i, j, k, rat_from_pair(&field, [num, den])?));
            }
            let alg = LieSuperalgebra::from_triplets(section.name.clone(), basis, &parsed)?;
            match real {
                Some(real) => {
                    let alg = alg.with_realization(real)?;
                    cross_check_constants(&alg)?;
                    alg
                }
                None => alg,
            }
        }
        (None, Some(real)) => {
            let named: Vec<(String, SuperMatrix<Rat>)> = basis
                .iter()
                .zip(&real.matrices)
                .map(|(b, m)| (b.name.clone(), m.clone()))
                .collect();
            LieSuperalgebra::from_matrix_basis(section.name.clone(), named)?
        }
        (None, None) => {
            return Err(field_err(
                "algebra",
                "one of 'constants' or 'realization' is required",
            ));
        }
    };

    let axioms = algebra.check_graded_axioms();
    if !axioms.all_ok() {
        let v = &axioms.violations[0];
        return Err(field_err(
            "algebra.constants",
            format!(
                "graded axioms violated ({:?} at basis triple {}, {}, {}; {} total)",
                v.kind,
                v.i,
                v.j,
                v.k,
                axioms.violations.len()
            ),
        ));
    }
    Ok(algebra)
}

fn cross_check_constants(alg: &LieSuperalgebra) -> Result<()> {
    let real = alg.realization().expect("caller checked");
    let named: Vec<(String, SuperMatrix<Rat>)> = alg
        .basis()
        .iter()
        .zip(&real.matrices)
        .map(|(b, m)| (b.name.clone(), m.clone()))
        .collect();
    let derived = LieSuperalgebra::from_matrix_basis(alg.name(), named)?;
    for i in 0..alg.dim() {
        for j in 0..alg.dim() {
            if alg.bracket_basis(i, j) != derived.bracket_basis(i, j) {
                return Err(field_err(
                    "algebra.constants",
                    format!(
                        "constants disagree with the realization at [{}, {}]",
                        alg.basis()[i].name,
                        alg.basis()[j].name
                    ),
                ));
            }
        }
    }
    Ok(())
}

fn control_from_def(
    alg: &LieSuperalgebra,
    field: &str,
    def: &ControlDef,
) -> Result<AlgebraElement> {
    match def {
        ControlDef::Coeffs(pairs) => coeffs_from_pairs(field, pairs, alg.dim()),
        ControlDef::Realized(rc) => {
            let mat = matrix_from_def(field, &rc.matrix)?;
            alg.coordinates_of(&mat)?
                .ok_or_else(|| field_err(field, "matrix lies outside the realized algebra"))
        }
    }
}

/// Build the full system from a parsed file.
pub fn build_system(spec: &SpecFile) -> Result<BuiltSystem> {
    let algebra = build_algebra(&spec.algebra)?;
    let dim = algebra.dim();

    let drift = match &spec.system.drift {
        DriftDef::Element(pairs) => {
            Drift::Element(coeffs_from_pairs("system.drift.element", pairs, dim)?)
        }
        DriftDef::Matrix(def) => Drift::Realized(matrix_from_def("system.drift.matrix", def)?),
        DriftDef::LinearMap(def) => {
            Drift::Linear(matrix_from_def("system.drift.linear_map", def)?)
        }
    };

    let mut even_controls = Vec::new();
    for (i, def) in spec.system.even_controls.iter().enumerate() {
        even_controls.push(control_from_def(&algebra, &format!("system.even_controls[{i}]"), def)?);
    }
    let mut odd_controls = Vec::new();
    for (j, def) in spec.system.odd_controls.iter().enumerate() {
        odd_controls.push(control_from_def(&algebra, &format!("system.odd_controls[{j}]"), def)?);
    }

    let name = spec.system.name.clone().unwrap_or_else(|| "system".into());
    let system = SystemSpec::new(name, algebra, drift, even_controls, odd_controls)
        .map_err(|e| match e {
            Error::Parity(msg) => field_err("system", msg),
            other => other,
        })?;
    Ok(BuiltSystem { system, options: spec.options.clone() })
}

/// Parse, build, and decide in one step.
pub fn check_str(json: &str) -> Result<(BuiltSystem, Verdict)> {
    let spec = parse_spec(json)?;
    let built = build_system(&spec)?;
    let verdict = decide_with_cap(&built.system, built.options.p_cap)?;
    Ok((built, verdict))
}

/// Export a catalog system to the file format.
pub fn export_catalog_system(entry: &CatalogEntry, system_name: &str) -> Result<SpecFile> {
    let cs = entry
        .systems
        .iter()
        .find(|s| s.system.name == system_name)
        .ok_or_else(|| Error::UnknownSystem {
            entry: entry.name.clone(),
            system: system_name.to_string(),
        })?;
    let alg = &entry.algebra;
    let dim = alg.dim();

    let basis = alg
        .basis()
        .iter()
        .map(|b| BasisDef { name: b.name.clone(), parity: b.parity.as_str().into() })
        .collect();

    let mut constants = Vec::new();
    for i in 0..dim {
        for j in 0..dim {
            for k in 0..dim {
                let c = alg.structure_constant(i, j, k);
                if !Zero::is_zero(c) {
                    let pair = pair_from_rat(c)?;
                    constants.push((i, j, k, pair[0], pair[1]));
                }
            }
        }
    }

    let realization = match alg.realization() {
        Some(real) => Some(RealizationDef {
            m: real.m,
            n: real.n,
            matrices: real.matrices.iter().map(matrix_to_def).collect::<Result<_>>()?,
        }),
        None => None,
    };

    let drift = match &cs.system.drift {
        Drift::Element(x) => DriftDef::Element(
            x.coeffs.iter().map(pair_from_rat).collect::<Result<_>>()?,
        ),
        Drift::Realized(a) => DriftDef::Matrix(matrix_to_def(a)?),
        Drift::Linear(a) => DriftDef::LinearMap(matrix_to_def(a)?),
    };
    let coeff_def = |e: &AlgebraElement| -> Result<ControlDef> {
        Ok(ControlDef::Coeffs(
            e.coeffs.iter().map(pair_from_rat).collect::<Result<_>>()?,
        ))
    };

    Ok(SpecFile {
        options: Options::default(),
        algebra: AlgebraSection {
            name: alg.name().to_string(),
            basis,
            constants: Some(constants),
            realization,
        },
        system: SystemSection {
            name: Some(cs.system.name.clone()),
            drift,
            even_controls: cs
                .system
                .even_controls
                .iter()
                .map(coeff_def)
                .collect::<Result<_>>()?,
            odd_controls: cs
                .system
                .odd_controls
                .iter()
                .map(coeff_def)
                .collect::<Result<_>>()?,
        },
    })
}

/// Deterministic pretty JSON for a spec file.
pub fn spec_to_json(spec: &SpecFile) -> String {
    serde_json::to_string_pretty(spec).expect("spec serializes")
}

/// The session's Grassmann generator count: explicit option, else the
/// SUPERCONTROL_L environment variable, else 4.
pub fn effective_generators(options: &Options) -> u32 {
    if let Some(l) = options.num_generators {
        return l;
    }
    if let Ok(s) = std::env::var("SUPERCONTROL_L") {
        if let Ok(l) = s.parse() {
            return l;
        }
    }
    4
}

/// Convert a parsed schedule file into a control schedule over L generators.
pub fn build_schedule(file: &ScheduleFile, gens: u32) -> Result<ControlSchedule> {
    let mut segments = Vec::new();
    for (i, seg) in file.segments.iter().enumerate() {
        let mut odd_inputs = Vec::new();
        for (j, o) in seg.odd_inputs.iter().enumerate() {
            let g = GrassmannNumber::<f64>::generator(gens, o.generator).map_err(|_| {
                field_err(
                    &format!("segments[{i}].odd_inputs[{j}].generator"),
                    format!("generator {} out of range for L={gens}", o.generator),
                )
            })?;
            odd_inputs.push(g.scale(&o.coeff));
        }
        segments.push(Segment {
            duration: seg.duration,
            even_inputs: seg.even_inputs.clone(),
            odd_inputs,
        });
    }
    ControlSchedule::new(segments)
}

pub fn parse_schedule(json: &str) -> Result<ScheduleFile> {
    serde_json::from_str(json).map_err(|e| field_err("schedule", e.to_string()))
}
