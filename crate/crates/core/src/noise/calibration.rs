//! Device calibration documents.
//!
//! ```json
//! {
//!   "name": "example-5q",
//!   "qubits": [{"t1_us": 70.0, "t2_us": 60.0, "readout_p01": 0.03, "readout_p10": 0.02}],
//!   "gates": [{"name": "x", "qubits": [0], "error": 0.0008, "duration_ns": 35.0}],
//!   "default_1q": {"error": 0.001, "duration_ns": 50.0},
//!   "default_2q": {"error": 0.01, "duration_ns": 300.0}
//! }
//! ```
//!
//! Gate error rates are used directly as the depolarizing probability of
//! [`depolarizing`](super::depolarizing). `T2` values above `T1` are
//! clamped to `T1` and reported in [`DeviceNoiseModel::warnings`].

use serde::{Deserialize, Serialize};

use super::NoiseError;
use super::readout::{ReadoutError, ReadoutModel};
use crate::gate::GateKind;

const EXAMPLE_5Q: &str = include_str!("../../data/example-5q.json");

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct QubitCalibration {
    pub t1_us: f64,
    pub t2_us: f64,
    pub readout_p01: f64,
    pub readout_p10: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct GateCalibration {
    pub name: String,
    pub qubits: Vec<usize>,
    pub error: f64,
    pub duration_ns: f64,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct GateNoise {
    pub error: f64,
    pub duration_ns: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct CalibrationDoc {
    name: String,
    qubits: Vec<QubitCalibration>,
    gates: Vec<GateCalibration>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    default_1q: Option<GateNoise>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    default_2q: Option<GateNoise>,
}

/// Validated device noise description.
#[derive(Debug, Clone, PartialEq)]
pub struct DeviceNoiseModel {
    name: String,
    qubits: Vec<QubitCalibration>,
    gates: Vec<GateCalibration>,
    default_1q: Option<GateNoise>,
    default_2q: Option<GateNoise>,
    warnings: Vec<String>,
}

impl DeviceNoiseModel {
    /// Parses and validates a calibration document.
    pub fn from_json(text: &str) -> Result<Self, NoiseError> {
        let doc: CalibrationDoc =
            serde_json::from_str(text).map_err(|e| NoiseError::Schema(e.to_string()))?;
        Self::from_doc(doc)
    }

    pub fn from_path(path: impl AsRef<std::path::Path>) -> Result<Self, NoiseError> {
        let path = path.as_ref();
        let text = std::fs::read_to_string(path)
            .map_err(|e| NoiseError::Io(format!("{}: {e}", path.display())))?;
        Self::from_json(&text)
    }

    /// The bundled illustrative 5-qubit profile. Values are of realistic
    /// magnitude but do not describe any particular device.
    pub fn example_5q() -> Self {
        Self::from_json(EXAMPLE_5Q).expect("bundled profile is valid")
    }

    /// Builds a model programmatically; same validation as [`Self::from_json`].
    pub fn new(
        name: impl Into<String>,
        qubits: Vec<QubitCalibration>,
        gates: Vec<GateCalibration>,
        default_1q: Option<GateNoise>,
        default_2q: Option<GateNoise>,
    ) -> Result<Self, NoiseError> {
        Self::from_doc(CalibrationDoc {
            name: name.into(),
            qubits,
            gates,
            default_1q,
            default_2q,
        })
    }

    /// Identical qubits, no per-gate entries, defaults for every gate.
    pub fn uniform(n: usize, qubit: QubitCalibration, gate_1q: GateNoise, gate_2q: GateNoise) -> Self {
        Self::new(
            format!("uniform-{n}q"),
            vec![qubit; n],
            vec![],
            Some(gate_1q),
            Some(gate_2q),
        )
        .expect("uniform model parameters must be valid")
    }

    /// Noise-free model: zero gate errors, zero durations, perfect readout.
    pub fn ideal(n: usize) -> Self {
        let qubit = QubitCalibration {
            t1_us: 1.0,
            t2_us: 1.0,
            readout_p01: 0.0,
            readout_p10: 0.0,
        };
        let none = GateNoise { error: 0.0, duration_ns: 0.0 };
        let mut m = Self::uniform(n, qubit, none, none);
        m.name = format!("ideal-{n}q");
        m
    }

    fn from_doc(doc: CalibrationDoc) -> Result<Self, NoiseError> {
        let mut warnings = Vec::new();
        let mut qubits = doc.qubits;
        if qubits.is_empty() {
            return Err(invalid("qubits", "at least one qubit is required"));
        }
        for (i, q) in qubits.iter_mut().enumerate() {
            positive(&format!("qubits[{i}].t1_us"), q.t1_us)?;
            positive(&format!("qubits[{i}].t2_us"), q.t2_us)?;
            probability(&format!("qubits[{i}].readout_p01"), q.readout_p01)?;
            probability(&format!("qubits[{i}].readout_p10"), q.readout_p10)?;
            if q.t2_us > q.t1_us {
                warnings.push(format!(
                    "qubit {i}: t2_us {} exceeds t1_us {}; clamped to {}",
                    q.t2_us, q.t1_us, q.t1_us
                ));
                q.t2_us = q.t1_us;
            }
        }
        let n = qubits.len();
        for (i, g) in doc.gates.iter().enumerate() {
            let kind = GateKind::from_name(&g.name)
                .filter(|k| k.is_unitary())
                .ok_or_else(|| invalid(&format!("gates[{i}].name"), &format!("unknown gate {:?}", g.name)))?;
            if kind.arity() != Some(g.qubits.len()) {
                return Err(invalid(
                    &format!("gates[{i}].qubits"),
                    &format!("{} acts on {} qubit(s)", g.name, kind.arity().unwrap_or(0)),
                ));
            }
            for (j, &q) in g.qubits.iter().enumerate() {
                if q >= n || g.qubits[..j].contains(&q) {
                    return Err(invalid(&format!("gates[{i}].qubits"), &format!("bad qubit {q}")));
                }
            }
            gate_noise(&format!("gates[{i}]"), g.error, g.duration_ns)?;
        }
        for (field, d) in [("default_1q", &doc.default_1q), ("default_2q", &doc.default_2q)] {
            if let Some(d) = d {
                gate_noise(field, d.error, d.duration_ns)?;
            }
        }
        Ok(DeviceNoiseModel {
            name: doc.name,
            qubits,
            gates: doc.gates,
            default_1q: doc.default_1q,
            default_2q: doc.default_2q,
            warnings,
        })
    }

    /// Serializes back to the calibration schema (clamped values).
    pub fn to_json(&self) -> String {
        let doc = CalibrationDoc {
            name: self.name.clone(),
            qubits: self.qubits.clone(),
            gates: self.gates.clone(),
            default_1q: self.default_1q,
            default_2q: self.default_2q,
        };
        serde_json::to_string_pretty(&doc).expect("calibration serializes")
    }

    pub fn name(&self) -> &str {
        &self.name
    }

    pub fn num_qubits(&self) -> usize {
        self.qubits.len()
    }

    pub fn qubits(&self) -> &[QubitCalibration] {
        &self.qubits
    }

    pub fn gates(&self) -> &[GateCalibration] {
        &self.gates
    }

    pub fn warnings(&self) -> &[String] {
        &self.warnings
    }

    pub fn readout(&self) -> ReadoutModel {
        ReadoutModel::new(
            self.qubits
                .iter()
                .map(|q| ReadoutError {
                    p01: q.readout_p01,
                    p10: q.readout_p10,
                })
                .collect(),
        )
        .expect("validated on load")
    }

    /// Error rate and duration for `kind` on `qubits`: an exact calibration
    /// entry if present, else the arity default.
    pub fn gate_noise(&self, kind: GateKind, qubits: &[usize]) -> Result<GateNoise, NoiseError> {
        if let Some(g) = self
            .gates
            .iter()
            .find(|g| g.name == kind.name() && g.qubits == qubits)
        {
            return Ok(GateNoise {
                error: g.error,
                duration_ns: g.duration_ns,
            });
        }
        let default = match qubits.len() {
            1 => self.default_1q,
            2 => self.default_2q,
            _ => return Err(NoiseError::UnsupportedArity { gate: kind.name().into(), arity: qubits.len() }),
        };
        default.ok_or_else(|| NoiseError::Uncovered {
            gate: kind.name().into(),
            qubits: qubits.to_vec(),
        })
    }
}

/// Parses a calibration document.
pub fn load_calibration(text: &str) -> Result<DeviceNoiseModel, NoiseError> {
    DeviceNoiseModel::from_json(text)
}

fn invalid(field: &str, reason: &str) -> NoiseError {
    NoiseError::Invalid {
        field: field.to_string(),
        reason: reason.to_string(),
    }
}

fn positive(field: &str, v: f64) -> Result<(), NoiseError> {
    if v > 0.0 && v.is_finite() {
        Ok(())
    } else {
        Err(invalid(field, &format!("must be positive, got {v}")))
    }
}

fn probability(field: &str, v: f64) -> Result<(), NoiseError> {
    if (0.0..=1.0).contains(&v) {
        Ok(())
    } else {
        Err(invalid(field, &format!("probability {v} outside [0, 1]")))
    }
}

fn gate_noise(field: &str, error: f64, duration_ns: f64) -> Result<(), NoiseError> {
    probability(&format!("{field}.error"), error)?;
    if !(duration_ns >= 0.0 && duration_ns.is_finite()) {
        return Err(invalid(
            &format!("{field}.duration_ns"),
            &format!("must be non-negative, got {duration_ns}"),
        ));
    }
    Ok(())
}
