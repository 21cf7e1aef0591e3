//! JSON forms of circuits and computations, plus the fixed-precision number
//! formatting used for every emitted file.
//!
//! Circuit:
//!
//! ```json
//! {"qubits": 2, "gates": [{"name": "H", "targets": [0]},
//!                         {"matrix": [[1, 0], [0, [0, 1]]], "targets": [1]}]}
//! ```
//!
//! Matrix entries are either a real number or a `[re, im]` pair.
//!
//! Computation:
//!
//! ```json
//! {"inputs": ["0", "1"], "outputs": ["0", "1"],
//!  "truth_table": {"0": "1", "1": "0"},
//!  "readout": "computational_basis"}
//! ```
//!
//! `readout` is `"computational_basis"`, `"parity"`, `{"qubits": [...]}` or
//! `{"effects": {"<label>": <matrix>, ...}}`. Inputs are basis-encoded bit
//! strings.

use std::collections::BTreeMap;

use num_complex::Complex64;
use serde::{Deserialize, Serialize};
use serde_json::Value;
use thiserror::Error;

use crate::channels::{ChannelError, Circuit, Gate, NamedGate};
use crate::densmat::{CMatrix, HermitianOperator, LinalgError};
use crate::kitaev::{basis_encoding, computational_basis_readout, parity_readout, qubit_readout, KitaevError, OverallComputation};

/// Significant digits kept in emitted numbers.
pub const SIG_DIGITS: usize = 12;

#[derive(Debug, Error)]
pub enum IoError {
    #[error(transparent)]
    Json(#[from] serde_json::Error),
    #[error(transparent)]
    Channel(#[from] ChannelError),
    #[error(transparent)]
    Kitaev(#[from] KitaevError),
    #[error(transparent)]
    Linalg(#[from] LinalgError),
    #[error("matrix rows have unequal lengths")]
    RaggedMatrix,
    #[error("unknown readout {0:?}")]
    UnknownReadout(String),
    #[error("no effect given for output {0:?}")]
    MissingEffect(String),
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(untagged)]
pub enum Entry {
    Real(f64),
    Complex([f64; 2]),
}

impl From<Entry> for Complex64 {
    fn from(e: Entry) -> Self {
        match e {
            Entry::Real(re) => Complex64::new(re, 0.0),
            Entry::Complex([re, im]) => Complex64::new(re, im),
        }
    }
}

pub type MatrixSpec = Vec<Vec<Entry>>;

pub fn matrix_from_spec(rows: &MatrixSpec) -> Result<CMatrix, IoError> {
    let n = rows.len();
    let cols = rows.first().map_or(0, Vec::len);
    if rows.iter().any(|r| r.len() != cols) {
        return Err(IoError::RaggedMatrix);
    }
    Ok(CMatrix::from_fn(n, cols, |i, j| rows[i][j].into()))
}

pub fn matrix_to_spec(m: &CMatrix) -> MatrixSpec {
    (0..m.nrows())
        .map(|i| {
            (0..m.ncols())
                .map(|j| {
                    let z = m[(i, j)];
                    if z.im == 0.0 { Entry::Real(z.re) } else { Entry::Complex([z.re, z.im]) }
                })
                .collect()
        })
        .collect()
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(untagged)]
pub enum GateSpec {
    Named { name: String, targets: Vec<usize> },
    Matrix { matrix: MatrixSpec, targets: Vec<usize> },
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CircuitSpec {
    pub qubits: usize,
    #[serde(default)]
    pub gates: Vec<GateSpec>,
}

impl CircuitSpec {
    pub fn build(&self) -> Result<Circuit, IoError> {
        let gates = self
            .gates
            .iter()
            .map(|g| match g {
                GateSpec::Named { name, targets } => Ok(Gate::named(NamedGate::parse(name)?, targets)),
                GateSpec::Matrix { matrix, targets } => Ok(Gate::matrix(matrix_from_spec(matrix)?, targets)),
            })
            .collect::<Result<Vec<_>, IoError>>()?;
        Ok(Circuit::new(self.qubits, gates)?)
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(untagged)]
pub enum ReadoutSpec {
    Named(String),
    Qubits { qubits: Vec<usize> },
    Effects { effects: BTreeMap<String, MatrixSpec> },
}

impl Default for ReadoutSpec {
    fn default() -> Self {
        Self::Named("computational_basis".into())
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ComputationSpec {
    pub inputs: Vec<String>,
    pub outputs: Vec<String>,
    pub truth_table: BTreeMap<String, String>,
    #[serde(default)]
    pub readout: ReadoutSpec,
}

impl ComputationSpec {
    pub fn build(&self, num_qubits: usize) -> Result<OverallComputation, IoError> {
        let init = basis_encoding(num_qubits, &self.inputs)?;
        let effects = match &self.readout {
            ReadoutSpec::Named(name) => match name.as_str() {
                "computational_basis" => computational_basis_readout(num_qubits, &self.outputs)?,
                "parity" => parity_readout(num_qubits, &self.outputs)?,
                other => return Err(IoError::UnknownReadout(other.to_string())),
            },
            ReadoutSpec::Qubits { qubits } => qubit_readout(num_qubits, qubits, &self.outputs)?,
            ReadoutSpec::Effects { effects } => self
                .outputs
                .iter()
                .map(|y| {
                    let spec = effects.get(y).ok_or_else(|| IoError::MissingEffect(y.clone()))?;
                    Ok(HermitianOperator::new(matrix_from_spec(spec)?)?)
                })
                .collect::<Result<Vec<_>, IoError>>()?,
        };
        Ok(OverallComputation::new(
            self.inputs.clone(),
            self.outputs.clone(),
            &self.truth_table,
            init,
            effects,
        )?)
    }
}

/// Rounds to [`SIG_DIGITS`] significant digits.
pub fn round_sig(x: f64) -> f64 {
    if !x.is_finite() || x == 0.0 {
        return x;
    }
    format!("{:.*e}", SIG_DIGITS - 1, x).parse().unwrap_or(x)
}

/// Text form of a rounded number, identical in JSON and CSV output.
pub fn format_number(x: f64) -> String {
    serde_json::to_string(&round_sig(x)).unwrap_or_else(|_| "null".into())
}

/// Rounds every float inside a JSON value.
pub fn round_json(value: Value) -> Value {
    match value {
        Value::Number(n) if n.is_f64() => {
            let x = round_sig(n.as_f64().unwrap_or(0.0));
            serde_json::Number::from_f64(x).map_or(Value::Null, Value::Number)
        }
        Value::Array(items) => Value::Array(items.into_iter().map(round_json).collect()),
        Value::Object(map) => Value::Object(map.into_iter().map(|(k, v)| (k, round_json(v))).collect()),
        other => other,
    }
}

/// Pretty JSON with rounded numbers and a trailing newline.
pub fn to_rounded_json<T: Serialize>(value: &T) -> Result<String, IoError> {
    let rounded = round_json(serde_json::to_value(value)?);
    let mut text = serde_json::to_string_pretty(&rounded)?;
    text.push('\n');
    Ok(text)
}
