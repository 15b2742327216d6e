//! JSON schemas for run configurations and input files, plus conversion
//! into library types with dotted-field-path diagnostics.

use std::path::Path;

use serde::{Deserialize, Serialize};

use crate::error::{CliError, CliResult};
use morlicz::orlicz::{ExponentSeq, OrliczFunction};
use morlicz::space::{TailModel, VectorSequence};
use morlicz::{
    FiniteOperator64, MatrixKernel64, MusielakFamily64, TruncationPolicy64, VectorNorm64,
    VectorSequence64,
};

/// One run configuration shared by every subcommand.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct RunConfig {
    pub family: FamilySpec,
    pub matrix: MatrixSpec,
    pub vector_norm: VectorNormSpec,
    pub truncation: TruncationSpec,
    pub solver: SolverSpec,
    pub seed: u64,
    /// Optional harness settings (margins, sampling ranges).
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub geometry: Option<GeometrySpec>,
    /// Optional operator-sampler settings for the axiom suites.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub operator: Option<OperatorSpec>,
}

/// Musielak family specification.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct FamilySpec {
    pub kind: FamilyKind,
    /// Exponent for the `constant` kind (`φ(t) = t^p` at every index).
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub p: Option<f64>,
    /// Exponent sequence for the `power` / `power_log` kinds.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub p_seq: Option<PSeqSpec>,
    /// Interpolation knots `(t, φ(t))` for the `custom` kind.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub table: Option<Vec<(f64, f64)>>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum FamilyKind {
    Power,
    PowerLog,
    Constant,
    Custom,
}

/// Exponent sequence `(p_n)`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct PSeqSpec {
    pub formula: PSeqFormula,
    /// `const`: exactly one value; `explicit`: the prefix (the final value
    /// repeats past its end); `one_plus_inv_n`: must be absent.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub values: Option<Vec<f64>>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum PSeqFormula {
    Const,
    OnePlusInvN,
    Explicit,
}

/// Matrix kernel specification.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct MatrixSpec {
    pub kind: MatrixKind,
    /// Nörlund weights (kind `norlund` only).
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub weights: Option<Vec<f64>>,
    /// Lorentz diagonal exponent `p` (kind `lorentz_diag` only).
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub p: Option<f64>,
    /// Lorentz diagonal exponent `q` (kind `lorentz_diag` only).
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub q: Option<f64>,
    /// Stored rows (kind `custom_table` only).
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub table: Option<Vec<Vec<f64>>>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum MatrixKind {
    Identity,
    Cesaro1,
    Norlund,
    Hilbert,
    LorentzDiag,
    CustomTable,
}

/// Coordinate-norm specification: `lp` is a number `≥ 1` or the string
/// `"inf"`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct VectorNormSpec {
    pub dim: usize,
    pub lp: LpSpec,
}

/// An `ℓ_p` exponent: a JSON number or the string `"inf"`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(untagged)]
pub enum LpSpec {
    Number(f64),
    Word(String),
}

/// Truncation policy specification.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct TruncationSpec {
    pub max_rows: usize,
    pub tail_tol: f64,
    pub tail_model: TailModelSpec,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum TailModelSpec {
    None,
    GeometricRatio,
    IntegralComparison,
}

/// Norm-solver settings.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SolverSpec {
    /// Relative bracket tolerance for the norm bisection.
    pub tol: f64,
}

/// Optional harness settings; absent fields use the library defaults.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize, Default)]
#[serde(deny_unknown_fields)]
pub struct GeometrySpec {
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub margin_floor: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub exploratory: Option<bool>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub max_support: Option<usize>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub max_index: Option<usize>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub amplitude: Option<f64>,
}

/// Optional operator-sampler settings for the axiom suites.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize, Default)]
#[serde(deny_unknown_fields)]
pub struct OperatorSpec {
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub rows: Option<usize>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub cols: Option<usize>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub amplitude: Option<f64>,
}

/// Sequence input file: a finite-support vector sequence.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SequenceFile {
    pub dim: usize,
    /// Optional restatement of the coordinate norm; when present it must
    /// agree with the run configuration.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub vector_norm: Option<SequenceNormSpec>,
    pub entries: Vec<SequenceEntry>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SequenceNormSpec {
    pub lp: LpSpec,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SequenceEntry {
    pub index: usize,
    pub vector: Vec<f64>,
}

/// Operator input file: a dense finite matrix.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct OperatorFile {
    pub rows: usize,
    pub cols: usize,
    pub entries: Vec<Vec<f64>>,
}

impl FamilySpec {
    /// Builds the library family, rejecting mismatched fields with a
    /// field-path diagnostic.
    pub fn build(&self) -> CliResult<MusielakFamily64> {
        let forbid = |present: bool, field: &str, kind: &str| -> CliResult<()> {
            if present {
                Err(CliError::validation(
                    format!("family.{field}"),
                    format!("not a field of the \"{kind}\" family kind"),
                ))
            } else {
                Ok(())
            }
        };
        match self.kind {
            FamilyKind::Constant => {
                forbid(self.p_seq.is_some(), "p_seq", "constant")?;
                forbid(self.table.is_some(), "table", "constant")?;
                let p = self.p.ok_or_else(|| {
                    CliError::validation("family.p", "required for the \"constant\" family kind")
                })?;
                let f = OrliczFunction::power(p)
                    .map_err(|e| CliError::validation("family.p", e.to_string()))?;
                Ok(MusielakFamily64::constant(f))
            }
            FamilyKind::Power | FamilyKind::PowerLog => {
                let kind = if self.kind == FamilyKind::Power { "power" } else { "power_log" };
                forbid(self.p.is_some(), "p", kind)?;
                forbid(self.table.is_some(), "table", kind)?;
                let p_seq = self.p_seq.as_ref().ok_or_else(|| {
                    CliError::validation(
                        "family.p_seq",
                        format!("required for the \"{kind}\" family kind"),
                    )
                })?;
                let seq = p_seq.build()?;
                let fam = if self.kind == FamilyKind::Power {
                    MusielakFamily64::power_seq(seq)
                } else {
                    MusielakFamily64::power_log_seq(seq)
                };
                fam.map_err(|e| CliError::validation("family.p_seq", e.to_string()))
            }
            FamilyKind::Custom => {
                forbid(self.p.is_some(), "p", "custom")?;
                forbid(self.p_seq.is_some(), "p_seq", "custom")?;
                let table = self.table.as_ref().ok_or_else(|| {
                    CliError::validation("family.table", "required for the \"custom\" family kind")
                })?;
                let f = OrliczFunction::from_table(table)
                    .map_err(|e| CliError::validation("family.table", e.to_string()))?;
                Ok(MusielakFamily64::constant(f))
            }
        }
    }
}

impl PSeqSpec {
    fn build(&self) -> CliResult<ExponentSeq<f64>> {
        match self.formula {
            PSeqFormula::Const => match self.values.as_deref() {
                Some([p]) => Ok(ExponentSeq::Const(*p)),
                _ => Err(CliError::validation(
                    "family.p_seq.values",
                    "the \"const\" formula takes exactly one value",
                )),
            },
            PSeqFormula::OnePlusInvN => match &self.values {
                None => Ok(ExponentSeq::OnePlusInvN),
                Some(_) => Err(CliError::validation(
                    "family.p_seq.values",
                    "the \"one_plus_inv_n\" formula takes no values",
                )),
            },
            PSeqFormula::Explicit => match self.values.as_deref() {
                Some(vs) if !vs.is_empty() => Ok(ExponentSeq::Explicit(vs.to_vec())),
                _ => Err(CliError::validation(
                    "family.p_seq.values",
                    "the \"explicit\" formula needs a nonempty value list",
                )),
            },
        }
    }
}

impl MatrixSpec {
    /// Builds the library kernel, rejecting mismatched fields with a
    /// field-path diagnostic.
    pub fn build(&self) -> CliResult<MatrixKernel64> {
        let forbid = |present: bool, field: &str, kind: &str| -> CliResult<()> {
            if present {
                Err(CliError::validation(
                    format!("matrix.{field}"),
                    format!("not a field of the \"{kind}\" matrix kind"),
                ))
            } else {
                Ok(())
            }
        };
        let kind_name = match self.kind {
            MatrixKind::Identity => "identity",
            MatrixKind::Cesaro1 => "cesaro1",
            MatrixKind::Norlund => "norlund",
            MatrixKind::Hilbert => "hilbert",
            MatrixKind::LorentzDiag => "lorentz_diag",
            MatrixKind::CustomTable => "custom_table",
        };
        if self.kind != MatrixKind::Norlund {
            forbid(self.weights.is_some(), "weights", kind_name)?;
        }
        if self.kind != MatrixKind::LorentzDiag {
            forbid(self.p.is_some(), "p", kind_name)?;
            forbid(self.q.is_some(), "q", kind_name)?;
        }
        if self.kind != MatrixKind::CustomTable {
            forbid(self.table.is_some(), "table", kind_name)?;
        }
        match self.kind {
            MatrixKind::Identity => Ok(MatrixKernel64::identity()),
            MatrixKind::Cesaro1 => Ok(MatrixKernel64::cesaro1()),
            MatrixKind::Hilbert => Ok(MatrixKernel64::hilbert()),
            MatrixKind::Norlund => {
                let w = self.weights.clone().ok_or_else(|| {
                    CliError::validation(
                        "matrix.weights",
                        "required for the \"norlund\" matrix kind",
                    )
                })?;
                MatrixKernel64::norlund(w)
                    .map_err(|e| CliError::validation("matrix.weights", e.to_string()))
            }
            MatrixKind::LorentzDiag => {
                let p = self.p.ok_or_else(|| {
                    CliError::validation("matrix.p", "required for the \"lorentz_diag\" matrix kind")
                })?;
                let q = self.q.ok_or_else(|| {
                    CliError::validation("matrix.q", "required for the \"lorentz_diag\" matrix kind")
                })?;
                MatrixKernel64::lorentz_diag(p, q)
                    .map_err(|e| CliError::validation("matrix.p", e.to_string()))
            }
            MatrixKind::CustomTable => {
                let t = self.table.clone().ok_or_else(|| {
                    CliError::validation(
                        "matrix.table",
                        "required for the \"custom_table\" matrix kind",
                    )
                })?;
                MatrixKernel64::custom_table(t)
                    .map_err(|e| CliError::validation("matrix.table", e.to_string()))
            }
        }
    }
}

impl LpSpec {
    /// Resolves to `Some(p)` for a finite exponent or `None` for `"inf"`.
    pub fn resolve(&self, field: &str) -> CliResult<Option<f64>> {
        match self {
            LpSpec::Number(p) => Ok(Some(*p)),
            LpSpec::Word(w) if w == "inf" => Ok(None),
            LpSpec::Word(w) => Err(CliError::validation(
                field,
                format!("expected a number or the string \"inf\", got \"{w}\""),
            )),
        }
    }

    fn same_norm_as(&self, other: &LpSpec) -> bool {
        match (self.resolve(""), other.resolve("")) {
            (Ok(a), Ok(b)) => a == b,
            _ => false,
        }
    }
}

impl VectorNormSpec {
    pub fn build(&self) -> CliResult<VectorNorm64> {
        let built = match self.lp.resolve("vector_norm.lp")? {
            Some(p) => VectorNorm64::lp(self.dim, p),
            None => VectorNorm64::linf(self.dim),
        };
        built.map_err(|e| CliError::validation("vector_norm", e.to_string()))
    }
}

impl TruncationSpec {
    pub fn build(&self) -> CliResult<TruncationPolicy64> {
        let model = match self.tail_model {
            TailModelSpec::None => TailModel::None,
            TailModelSpec::GeometricRatio => TailModel::GeometricRatio,
            TailModelSpec::IntegralComparison => TailModel::IntegralComparison,
        };
        TruncationPolicy64::new(self.max_rows, self.tail_tol, model)
            .map_err(|e| CliError::validation("truncation", e.to_string()))
    }
}

impl SolverSpec {
    pub fn validate(&self) -> CliResult<f64> {
        if !(self.tol > 0.0) || !(self.tol < 0.5) {
            return Err(CliError::validation(
                "solver.tol",
                format!("must lie in (0, 0.5), got {:e}", self.tol),
            ));
        }
        Ok(self.tol)
    }
}

/// Everything a command needs, converted into library types.
#[derive(Debug)]
pub struct Resolved {
    pub family: MusielakFamily64,
    pub kernel: MatrixKernel64,
    pub vector_norm: VectorNorm64,
    pub policy: TruncationPolicy64,
    pub tol: f64,
    pub seed: u64,
    pub geometry: GeometrySpec,
    pub operator: OperatorSpec,
    /// Hex digest of the canonicalized configuration.
    pub digest: String,
}

impl RunConfig {
    /// Validates every sub-spec and converts to library types.
    pub fn resolve(&self) -> CliResult<Resolved> {
        let family = self.family.build()?;
        let kernel = self.matrix.build()?;
        let vector_norm = self.vector_norm.build()?;
        let policy = self.truncation.build()?;
        let tol = self.solver.validate()?;
        let geometry = self.geometry.clone().unwrap_or_default();
        if let Some(a) = geometry.amplitude {
            if !(a > 0.0) || !a.is_finite() {
                return Err(CliError::validation(
                    "geometry.amplitude",
                    "must be positive and finite",
                ));
            }
        }
        let operator = self.operator.clone().unwrap_or_default();
        let value = serde_json::to_value(self).expect("configs serialize");
        let digest = crate::canonical::digest(&value);
        Ok(Resolved {
            family,
            kernel,
            vector_norm,
            policy,
            tol,
            seed: self.seed,
            geometry,
            operator,
            digest,
        })
    }
}

fn read_to_string(path: &Path) -> CliResult<String> {
    std::fs::read_to_string(path).map_err(|e| CliError::Parse {
        path: path.display().to_string(),
        message: e.to_string(),
    })
}

fn parse_json<T: serde::de::DeserializeOwned>(path: &Path) -> CliResult<T> {
    let text = read_to_string(path)?;
    serde_json::from_str(&text).map_err(|e| CliError::Parse {
        path: path.display().to_string(),
        message: e.to_string(),
    })
}

/// Loads and parses a run configuration.
pub fn load_config(path: &Path) -> CliResult<RunConfig> {
    parse_json(path)
}

/// Loads a sequence file and checks it against the configured norm.
pub fn load_sequence(path: &Path, spec: &VectorNormSpec) -> CliResult<VectorSequence64> {
    let file: SequenceFile = parse_json(path)?;
    let shown = path.display();
    if file.dim != spec.dim {
        return Err(CliError::validation(
            format!("{shown}: dim"),
            format!("sequence dim {} does not match vector_norm.dim {}", file.dim, spec.dim),
        ));
    }
    if let Some(norm) = &file.vector_norm {
        if !norm.lp.same_norm_as(&spec.lp) {
            return Err(CliError::validation(
                format!("{shown}: vector_norm.lp"),
                "does not match the run configuration's vector_norm.lp".to_string(),
            ));
        }
    }
    let entries = file.entries.into_iter().map(|e| (e.index, e.vector)).collect();
    VectorSequence::new(spec.dim, entries)
        .map_err(|e| CliError::validation(format!("{shown}: entries"), e.to_string()))
}

/// Loads an operator file into a dense finite operator.
pub fn load_operator(path: &Path) -> CliResult<FiniteOperator64> {
    let file: OperatorFile = parse_json(path)?;
    let shown = path.display();
    if file.entries.len() != file.rows {
        return Err(CliError::validation(
            format!("{shown}: entries"),
            format!("expected {} rows, got {}", file.rows, file.entries.len()),
        ));
    }
    for (i, row) in file.entries.iter().enumerate() {
        if row.len() != file.cols {
            return Err(CliError::validation(
                format!("{shown}: entries[{i}]"),
                format!("expected {} columns, got {}", file.cols, row.len()),
            ));
        }
    }
    FiniteOperator64::from_rows(file.entries)
        .map_err(|e| CliError::validation(format!("{shown}: entries"), e.to_string()))
}
