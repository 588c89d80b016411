//! JSON documents exchanged by the command-line tool.
//!
//! Every file is one object:
//!
//! ```json
//! { "kind": "povm", "dimension": 2, "payload": { ... }, "metadata": { ... } }
//! ```
//!
//! Complex numbers are `[re, im]` pairs and matrices are row-major nested
//! arrays. Payloads by kind:
//!
//! | kind       | payload                                      |
//! |------------|----------------------------------------------|
//! | `state`    | `{"matrix": M}`                              |
//! | `povm`     | `{"elements": [M, ...]}`                     |
//! | `fiducial` | `{"vector": [z, ...]}`                       |
//! | `phases`   | `{"angles": [{"p1", "p2", "theta"}, ...]}`   |
//! | `wigner`   | `{"values": [[W_(0,0), W_(0,1), ...], ...]}` |
//! | `report`   | [`ReportPayload`]                            |
//!
//! Decoding reports the JSON path of the first problem, e.g.
//! `payload.elements[2][1]: expected 3 entries, found 2`.

use serde::{Deserialize, Serialize};
use serde_json::Value;

use crate::linalg::{CMatrix, CVector};
use crate::povm::{MubReport, Povm, SiReport};
use crate::sic_search::Fiducial;
use crate::wh_covariant::{make_phase_vector, PhaseVector};
use crate::wh_group::{GroupContext, GroupIndex};
use crate::wigner::WignerFunction;
use crate::{Error, Result};

pub type JsonComplex = [f64; 2];
pub type JsonMatrix = Vec<Vec<JsonComplex>>;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Kind {
    State,
    Povm,
    Fiducial,
    Phases,
    Wigner,
    Report,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Metadata {
    pub seed: Option<u64>,
    pub method: Option<String>,
    pub tool_version: String,
    pub created_at: String,
}

impl Metadata {
    /// Current tool version, timestamp now.
    pub fn now(seed: Option<u64>, method: Option<&str>) -> Self {
        Self {
            seed,
            method: method.map(str::to_owned),
            tool_version: env!("CARGO_PKG_VERSION").to_owned(),
            created_at: chrono::Utc::now().to_rfc3339_opts(chrono::SecondsFormat::Secs, true),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct StatePayload {
    pub matrix: JsonMatrix,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PovmPayload {
    pub elements: Vec<JsonMatrix>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct FiducialPayload {
    pub vector: Vec<JsonComplex>,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct PhaseEntry {
    pub p1: usize,
    pub p2: usize,
    pub theta: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PhasesPayload {
    pub angles: Vec<PhaseEntry>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct WignerPayload {
    pub values: Vec<Vec<f64>>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SearchSummary {
    pub method: String,
    pub objective_value: f64,
    pub bound: f64,
    pub residual: f64,
    pub tolerance: f64,
    pub certified: bool,
    pub iterations_used: usize,
    pub restarts_used: usize,
    pub best_restart: usize,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct StateSummary {
    pub trace: f64,
    pub hermitian_deviation: f64,
    pub min_eigenvalue: f64,
    pub is_psd: bool,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct WignerSummary {
    pub sum: f64,
    pub min_value: f64,
    /// Sum of the absolute values of the negative entries.
    pub negativity: f64,
}

/// Outcome of a command. The SI certificate, when there is one, is
/// flattened into the payload so its fields sit next to `subject`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ReportPayload {
    pub subject: String,
    pub passed: bool,
    #[serde(flatten, default, skip_serializing_if = "Option::is_none")]
    pub si: Option<SiReport>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub search: Option<SearchSummary>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub mub: Option<MubReport>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub state: Option<StateSummary>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub wigner: Option<WignerSummary>,
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    pub notes: Vec<String>,
}

#[derive(Debug, Clone, PartialEq)]
pub enum Payload {
    State(StatePayload),
    Povm(PovmPayload),
    Fiducial(FiducialPayload),
    Phases(PhasesPayload),
    Wigner(WignerPayload),
    Report(Box<ReportPayload>),
}

#[derive(Debug, Clone, PartialEq)]
pub struct Document {
    pub dimension: usize,
    pub payload: Payload,
    pub metadata: Metadata,
}

#[derive(Serialize, Deserialize)]
struct RawDocument {
    kind: Kind,
    dimension: usize,
    payload: Value,
    metadata: Metadata,
}

fn decode_error(path: impl Into<String>, message: impl Into<String>) -> Error {
    Error::Decode {
        path: path.into(),
        message: message.into(),
    }
}

fn parse_json(text: &str) -> Result<Value> {
    serde_json::from_str(text)
        .map_err(|e| decode_error(format!("line {} column {}", e.line(), e.column()), e.to_string()))
}

/// Deserializes `value`, reporting failures at `prefix.<path inside value>`.
fn typed<T: serde::de::DeserializeOwned>(value: Value, prefix: &str) -> Result<T> {
    serde_path_to_error::deserialize(value).map_err(|e| {
        let inner = e.path().to_string();
        let path = match (prefix.is_empty(), inner == ".") {
            (true, true) => "document".to_owned(),
            (true, false) => inner,
            (false, true) => prefix.to_owned(),
            (false, false) => format!("{prefix}.{inner}"),
        };
        decode_error(path, e.into_inner().to_string())
    })
}

impl Document {
    pub fn kind(&self) -> Kind {
        match &self.payload {
            Payload::State(_) => Kind::State,
            Payload::Povm(_) => Kind::Povm,
            Payload::Fiducial(_) => Kind::Fiducial,
            Payload::Phases(_) => Kind::Phases,
            Payload::Wigner(_) => Kind::Wigner,
            Payload::Report(_) => Kind::Report,
        }
    }

    /// Pretty-printed JSON followed by a newline.
    pub fn encode(&self) -> String {
        let payload = match &self.payload {
            Payload::State(p) => serde_json::to_value(p),
            Payload::Povm(p) => serde_json::to_value(p),
            Payload::Fiducial(p) => serde_json::to_value(p),
            Payload::Phases(p) => serde_json::to_value(p),
            Payload::Wigner(p) => serde_json::to_value(p),
            Payload::Report(p) => serde_json::to_value(p),
        }
        .expect("payloads serialize");
        let raw = RawDocument {
            kind: self.kind(),
            dimension: self.dimension,
            payload,
            metadata: self.metadata.clone(),
        };
        let mut s = serde_json::to_string_pretty(&raw).expect("document serializes");
        s.push('\n');
        s
    }

    /// Parses and schema-checks a document, including agreement of every
    /// payload shape with `dimension`.
    pub fn decode(text: &str) -> Result<Self> {
        let raw: RawDocument = typed(parse_json(text)?, "")?;
        let d = raw.dimension;
        if d < 2 {
            return Err(decode_error("dimension", format!("must be at least 2, found {d}")));
        }
        let payload = match raw.kind {
            Kind::State => {
                let p: StatePayload = typed(raw.payload, "payload")?;
                check_matrix(&p.matrix, d, "payload.matrix")?;
                Payload::State(p)
            }
            Kind::Povm => {
                let p: PovmPayload = typed(raw.payload, "payload")?;
                if p.elements.is_empty() {
                    return Err(decode_error("payload.elements", "must not be empty"));
                }
                for (i, m) in p.elements.iter().enumerate() {
                    check_matrix(m, d, &format!("payload.elements[{i}]"))?;
                }
                Payload::Povm(p)
            }
            Kind::Fiducial => {
                let p: FiducialPayload = typed(raw.payload, "payload")?;
                check_len(p.vector.len(), d, "payload.vector")?;
                check_finite(p.vector.iter().flatten().copied(), "payload.vector")?;
                Payload::Fiducial(p)
            }
            Kind::Phases => {
                let p: PhasesPayload = typed(raw.payload, "payload")?;
                for (i, a) in p.angles.iter().enumerate() {
                    if a.p1 >= d || a.p2 >= d {
                        return Err(decode_error(
                            format!("payload.angles[{i}]"),
                            format!("index ({}, {}) out of range for dimension {d}", a.p1, a.p2),
                        ));
                    }
                    check_finite([a.theta], &format!("payload.angles[{i}].theta"))?;
                }
                Payload::Phases(p)
            }
            Kind::Wigner => {
                let p: WignerPayload = typed(raw.payload, "payload")?;
                check_len(p.values.len(), d, "payload.values")?;
                for (i, row) in p.values.iter().enumerate() {
                    let path = format!("payload.values[{i}]");
                    check_len(row.len(), d, &path)?;
                    check_finite(row.iter().copied(), &path)?;
                }
                Payload::Wigner(p)
            }
            Kind::Report => {
                let p: ReportPayload = typed(raw.payload, "payload")?;
                Payload::Report(Box::new(p))
            }
        };
        Ok(Self {
            dimension: d,
            payload,
            metadata: raw.metadata,
        })
    }

    pub fn context(&self) -> Result<GroupContext> {
        GroupContext::new(self.dimension)
    }

    fn wrong_kind(&self, wanted: Kind) -> Error {
        decode_error("kind", format!("expected {wanted:?} document, found {:?}", self.kind()).to_lowercase())
    }

    pub fn to_state(&self) -> Result<CMatrix> {
        match &self.payload {
            Payload::State(p) => Ok(matrix_from_json(&p.matrix)),
            _ => Err(self.wrong_kind(Kind::State)),
        }
    }

    pub fn to_povm(&self) -> Result<Povm> {
        match &self.payload {
            Payload::Povm(p) => Povm::new(p.elements.iter().map(matrix_from_json).collect(), &self.context()?),
            _ => Err(self.wrong_kind(Kind::Povm)),
        }
    }

    pub fn to_fiducial(&self) -> Result<Fiducial> {
        match &self.payload {
            Payload::Fiducial(p) => Fiducial::new(vector_from_json(&p.vector)),
            _ => Err(self.wrong_kind(Kind::Fiducial)),
        }
    }

    pub fn to_phases(&self) -> Result<PhaseVector> {
        match &self.payload {
            Payload::Phases(p) => {
                let angles: Vec<_> = p.angles.iter().map(|a| (GroupIndex::new(a.p1, a.p2), a.theta)).collect();
                make_phase_vector(&angles, &self.context()?)
            }
            _ => Err(self.wrong_kind(Kind::Phases)),
        }
    }

    pub fn to_wigner(&self) -> Result<WignerFunction> {
        match &self.payload {
            Payload::Wigner(p) => WignerFunction::new(p.values.iter().flatten().copied().collect(), &self.context()?),
            _ => Err(self.wrong_kind(Kind::Wigner)),
        }
    }

    pub fn from_state(rho: &CMatrix, metadata: Metadata) -> Self {
        Self {
            dimension: rho.nrows(),
            payload: Payload::State(StatePayload {
                matrix: matrix_to_json(rho),
            }),
            metadata,
        }
    }

    pub fn from_povm(povm: &Povm, metadata: Metadata) -> Self {
        Self {
            dimension: povm.dim(),
            payload: Payload::Povm(PovmPayload {
                elements: povm.elements().iter().map(matrix_to_json).collect(),
            }),
            metadata,
        }
    }

    pub fn from_fiducial(f: &Fiducial, metadata: Metadata) -> Self {
        Self {
            dimension: f.dim(),
            payload: Payload::Fiducial(FiducialPayload {
                vector: f.psi().iter().map(|z| [z.re, z.im]).collect(),
            }),
            metadata,
        }
    }

    pub fn from_phases(phi: &PhaseVector, metadata: Metadata) -> Self {
        Self {
            dimension: phi.dim(),
            payload: Payload::Phases(PhasesPayload {
                angles: phi
                    .angles()
                    .into_iter()
                    .map(|(q, theta)| PhaseEntry { p1: q.p1, p2: q.p2, theta })
                    .collect(),
            }),
            metadata,
        }
    }

    pub fn from_wigner(w: &WignerFunction, metadata: Metadata) -> Self {
        let d = w.dim();
        Self {
            dimension: d,
            payload: Payload::Wigner(WignerPayload {
                values: w.values().chunks(d).map(<[f64]>::to_vec).collect(),
            }),
            metadata,
        }
    }

    pub fn from_report(dimension: usize, report: ReportPayload, metadata: Metadata) -> Self {
        Self {
            dimension,
            payload: Payload::Report(Box::new(report)),
            metadata,
        }
    }
}

fn check_len(found: usize, expected: usize, path: &str) -> Result<()> {
    if found != expected {
        return Err(decode_error(path, format!("expected {expected} entries, found {found}")));
    }
    Ok(())
}

fn check_finite(values: impl IntoIterator<Item = f64>, path: &str) -> Result<()> {
    if values.into_iter().any(|v| !v.is_finite()) {
        return Err(decode_error(path, "non-finite number"));
    }
    Ok(())
}

fn check_matrix(m: &JsonMatrix, d: usize, path: &str) -> Result<()> {
    check_len(m.len(), d, path)?;
    for (i, row) in m.iter().enumerate() {
        let p = format!("{path}[{i}]");
        check_len(row.len(), d, &p)?;
        check_finite(row.iter().flatten().copied(), &p)?;
    }
    Ok(())
}

pub fn matrix_to_json(m: &CMatrix) -> JsonMatrix {
    (0..m.nrows())
        .map(|i| (0..m.ncols()).map(|j| [m[(i, j)].re, m[(i, j)].im]).collect())
        .collect()
}

/// Row-major nested pairs to a matrix. Rows are assumed equally long.
pub fn matrix_from_json(m: &JsonMatrix) -> CMatrix {
    let rows = m.len();
    let cols = m.first().map_or(0, Vec::len);
    CMatrix::from_fn(rows, cols, |i, j| num_complex::Complex64::new(m[i][j][0], m[i][j][1]))
}

pub fn vector_from_json(v: &[JsonComplex]) -> CVector {
    CVector::from_fn(v.len(), |i, _| num_complex::Complex64::new(v[i][0], v[i][1]))
}

/// Input format of `mub-check`: `{"dimension": d, "bases": [[vector, ...], ...]}`
/// with each vector a list of `[re, im]` pairs.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct BasesFile {
    pub dimension: usize,
    pub bases: Vec<Vec<Vec<JsonComplex>>>,
}

impl BasesFile {
    pub fn decode(text: &str) -> Result<Self> {
        let file: BasesFile = typed(parse_json(text)?, "")?;
        let d = file.dimension;
        for (b, basis) in file.bases.iter().enumerate() {
            check_len(basis.len(), d, &format!("bases[{b}]"))?;
            for (k, v) in basis.iter().enumerate() {
                let path = format!("bases[{b}][{k}]");
                check_len(v.len(), d, &path)?;
                check_finite(v.iter().flatten().copied(), &path)?;
            }
        }
        Ok(file)
    }

    pub fn to_family(&self) -> crate::povm::BasisFamily {
        crate::povm::BasisFamily {
            bases: self
                .bases
                .iter()
                .map(|basis| basis.iter().map(|v| vector_from_json(v)).collect())
                .collect(),
        }
    }
}

/// Input format of `reconstruct`: a JSON array of probabilities.
pub fn decode_probabilities(text: &str) -> Result<Vec<f64>> {
    let probs: Vec<f64> = typed(parse_json(text)?, "")?;
    check_finite(probs.iter().copied(), "probabilities")?;
    Ok(probs)
}
