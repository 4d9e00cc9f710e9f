//! JSON files for codes and circuits.

use std::collections::HashSet;
use std::path::Path;

use serde::{Deserialize, Serialize};

use crate::clifford::{CliffordCircuit, Gate, GateKind};
use crate::codes::StabilizerCode;
use crate::error::{Error, Result};
use crate::geometry::LatticeLayout;
use crate::pauli::{PauliOperator, Phase};

pub const CODE_FILE_VERSION: u32 = 1;

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct QubitEntry {
    pub id: usize,
    pub x: f64,
    pub y: f64,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct GeneratorEntry {
    pub pauli: String,
    pub sign: String,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct CodeFile {
    pub version: u32,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub name: Option<String>,
    pub n: usize,
    pub qubits: Vec<QubitEntry>,
    pub periods: Option<[f64; 2]>,
    pub generators: Vec<GeneratorEntry>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub distance: Option<usize>,
    #[serde(default)]
    pub metadata: serde_json::Value,
}

impl CodeFile {
    pub fn from_code(code: &StabilizerCode) -> Self {
        let qubits = code
            .layout()
            .positions()
            .iter()
            .enumerate()
            .map(|(id, &(x, y))| QubitEntry { id, x, y })
            .collect();
        let generators = code
            .generators()
            .iter()
            .map(|g| GeneratorEntry {
                pauli: g.letters_string(),
                sign: if g.phase() == Phase::MINUS_ONE {
                    "-1"
                } else {
                    "+1"
                }
                .into(),
            })
            .collect();
        Self {
            version: CODE_FILE_VERSION,
            name: Some(code.name.clone()),
            n: code.num_qubits(),
            qubits,
            periods: code.layout().periods().map(|(a, b)| [a, b]),
            generators,
            distance: code.d(),
            metadata: code.metadata.clone(),
        }
    }

    /// Validate and build the code.
    pub fn into_code(self) -> Result<StabilizerCode> {
        if self.version != CODE_FILE_VERSION {
            return Err(Error::Validation(format!(
                "unsupported code file version {}",
                self.version
            )));
        }
        let n = self.n;
        if self.qubits.len() != n {
            return Err(Error::Validation(format!(
                "{} qubit entries for n = {n}",
                self.qubits.len()
            )));
        }
        let mut positions = vec![None; n];
        let mut seen = HashSet::new();
        for q in &self.qubits {
            if !seen.insert(q.id) {
                return Err(Error::Validation(format!("duplicate qubit id {}", q.id)));
            }
            if q.id >= n {
                return Err(Error::Validation(format!(
                    "qubit id {} out of range for n = {n}",
                    q.id
                )));
            }
            positions[q.id] = Some((q.x, q.y));
        }
        let positions: Vec<(f64, f64)> = positions
            .into_iter()
            .map(|p| p.expect("all ids seen"))
            .collect();
        let layout = LatticeLayout::new(positions, self.periods.map(|[a, b]| (a, b)))?;
        let mut gens = Vec::with_capacity(self.generators.len());
        for (i, g) in self.generators.iter().enumerate() {
            if g.pauli.chars().count() != n {
                return Err(Error::Validation(format!(
                    "generator {i}: Pauli string has length {}, expected {n}",
                    g.pauli.chars().count()
                )));
            }
            let p: PauliOperator = g
                .pauli
                .parse()
                .map_err(|e| Error::Validation(format!("generator {i}: {e}")))?;
            let phase = match g.sign.as_str() {
                "+1" | "+" | "1" => Phase::ONE,
                "-1" | "-" | "−1" => Phase::MINUS_ONE,
                other => {
                    return Err(Error::Validation(format!(
                        "generator {i}: sign {other:?} is not +1 or -1"
                    )))
                }
            };
            let signed = p.phase() * phase;
            gens.push(p.with_phase(signed));
        }
        let name = self.name.unwrap_or_else(|| "loaded".into());
        let mut code = StabilizerCode::new(name, gens, layout, self.distance)?;
        code.metadata = self.metadata;
        Ok(code)
    }
}

pub fn code_to_json(code: &StabilizerCode) -> Result<String> {
    Ok(serde_json::to_string_pretty(&CodeFile::from_code(code))?)
}

pub fn code_from_json(text: &str) -> Result<StabilizerCode> {
    let file: CodeFile =
        serde_json::from_str(text).map_err(|e| Error::Validation(format!("code file: {e}")))?;
    file.into_code()
}

pub fn save_code(code: &StabilizerCode, path: impl AsRef<Path>) -> Result<()> {
    std::fs::write(path, code_to_json(code)? + "\n")?;
    Ok(())
}

pub fn load_code(path: impl AsRef<Path>) -> Result<StabilizerCode> {
    code_from_json(&std::fs::read_to_string(path)?)
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct GateEntry {
    pub gate: String,
    pub qubits: Vec<usize>,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct CircuitFile {
    pub n: usize,
    pub layers: Vec<Vec<GateEntry>>,
}

pub fn circuit_to_json(circuit: &CliffordCircuit) -> Result<String> {
    let file = CircuitFile {
        n: circuit.n,
        layers: circuit
            .layers
            .iter()
            .map(|l| {
                l.iter()
                    .map(|g| GateEntry {
                        gate: g.gate.name().into(),
                        qubits: g.qubits.clone(),
                    })
                    .collect()
            })
            .collect(),
    };
    Ok(serde_json::to_string_pretty(&file)?)
}

/// Parse and validate a circuit against a layout and locality radius.
pub fn circuit_from_json(
    text: &str,
    layout: Option<&LatticeLayout>,
    radius: f64,
) -> Result<CliffordCircuit> {
    let file: CircuitFile =
        serde_json::from_str(text).map_err(|e| Error::Validation(format!("circuit file: {e}")))?;
    let layers = file
        .layers
        .into_iter()
        .map(|l| {
            l.into_iter()
                .map(|g| Gate::new(g.gate.parse::<GateKind>()?, g.qubits))
                .collect::<Result<Vec<_>>>()
        })
        .collect::<Result<Vec<_>>>()?;
    CliffordCircuit::new(file.n, layers, layout, radius)
}

pub fn load_circuit(
    path: impl AsRef<Path>,
    layout: Option<&LatticeLayout>,
    radius: f64,
) -> Result<CliffordCircuit> {
    circuit_from_json(&std::fs::read_to_string(path)?, layout, radius)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::codes::make_toric;

    #[test]
    fn toric_round_trip() {
        let c = make_toric(3).unwrap();
        let back = code_from_json(&code_to_json(&c).unwrap()).unwrap();
        assert_eq!(back, c);
    }

    #[test]
    fn anticommuting_file_names_both_generators() {
        let text = r#"{"version":1,"n":2,"qubits":[{"id":0,"x":0,"y":0},{"id":1,"x":1,"y":0}],
            "periods":null,"generators":[{"pauli":"XI","sign":"+1"},{"pauli":"ZZ","sign":"+1"}],"metadata":{}}"#;
        match code_from_json(text) {
            Err(Error::AnticommutingGenerators(0, 1)) => {}
            other => panic!("unexpected {other:?}"),
        }
    }

    #[test]
    fn duplicate_ids_are_rejected() {
        let text = r#"{"version":1,"n":2,"qubits":[{"id":0,"x":0,"y":0},{"id":0,"x":1,"y":0}],
            "periods":null,"generators":[],"metadata":{}}"#;
        assert!(matches!(code_from_json(text), Err(Error::Validation(_))));
    }
}
