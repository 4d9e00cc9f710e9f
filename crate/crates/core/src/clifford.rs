//! Clifford circuits and exact Pauli conjugation.

use std::fmt;
use std::str::FromStr;

use rand::seq::SliceRandom;
use rand::Rng;
use serde::{Deserialize, Serialize};

use crate::codes::{StabilizerCode, StabilizerState};
use crate::error::{Error, Result};
use crate::geometry::LatticeLayout;
use crate::group::GroupBasis;
use crate::pauli::{Letter, PauliOperator, Phase};

pub const DEFAULT_LOCALITY_RADIUS: f64 = 1.5;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum GateKind {
    H,
    S,
    Sdg,
    X,
    Y,
    Z,
    CX,
    CZ,
    Swap,
}

impl GateKind {
    pub const ONE_QUBIT: [GateKind; 6] = [
        GateKind::H,
        GateKind::S,
        GateKind::Sdg,
        GateKind::X,
        GateKind::Y,
        GateKind::Z,
    ];
    pub const TWO_QUBIT: [GateKind; 3] = [GateKind::CX, GateKind::CZ, GateKind::Swap];

    pub fn arity(self) -> usize {
        match self {
            GateKind::CX | GateKind::CZ | GateKind::Swap => 2,
            _ => 1,
        }
    }

    pub fn name(self) -> &'static str {
        match self {
            GateKind::H => "H",
            GateKind::S => "S",
            GateKind::Sdg => "SDG",
            GateKind::X => "X",
            GateKind::Y => "Y",
            GateKind::Z => "Z",
            GateKind::CX => "CX",
            GateKind::CZ => "CZ",
            GateKind::Swap => "SWAP",
        }
    }

    /// Images `(U X_q U†, U Z_q U†)` for each qubit the gate touches, as
    /// operators on the gate's local qubits.
    fn images(self) -> Vec<(PauliOperator, PauliOperator)> {
        let p = |s: &str| -> PauliOperator { s.parse().expect("static table") };
        match self {
            GateKind::H => vec![(p("Z"), p("X"))],
            GateKind::S => vec![(p("Y"), p("Z"))],
            GateKind::Sdg => vec![(p("-Y"), p("Z"))],
            GateKind::X => vec![(p("X"), p("-Z"))],
            GateKind::Y => vec![(p("-X"), p("-Z"))],
            GateKind::Z => vec![(p("-X"), p("Z"))],
            // qubit order (control, target)
            GateKind::CX => vec![(p("XX"), p("ZI")), (p("IX"), p("ZZ"))],
            GateKind::CZ => vec![(p("XZ"), p("ZI")), (p("ZX"), p("IZ"))],
            GateKind::Swap => vec![(p("IX"), p("IZ")), (p("XI"), p("ZI"))],
        }
    }
}

impl fmt::Display for GateKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for GateKind {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        Ok(match s.to_ascii_uppercase().as_str() {
            "H" => GateKind::H,
            "S" => GateKind::S,
            "SDG" | "S†" | "SDAG" => GateKind::Sdg,
            "X" => GateKind::X,
            "Y" => GateKind::Y,
            "Z" => GateKind::Z,
            "CX" | "CNOT" => GateKind::CX,
            "CZ" => GateKind::CZ,
            "SWAP" => GateKind::Swap,
            _ => return Err(Error::UnsupportedGate(s.to_string())),
        })
    }
}

impl Serialize for GateKind {
    fn serialize<S: serde::Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        s.serialize_str(self.name())
    }
}

impl<'de> Deserialize<'de> for GateKind {
    fn deserialize<D: serde::Deserializer<'de>>(d: D) -> std::result::Result<Self, D::Error> {
        let s = String::deserialize(d)?;
        s.parse().map_err(serde::de::Error::custom)
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct Gate {
    pub gate: GateKind,
    pub qubits: Vec<usize>,
}

impl Gate {
    pub fn new(gate: GateKind, qubits: Vec<usize>) -> Result<Self> {
        if qubits.len() != gate.arity() {
            return Err(Error::Input(format!(
                "{gate} acts on {} qubits, got {:?}",
                gate.arity(),
                qubits
            )));
        }
        if gate.arity() == 2 && qubits[0] == qubits[1] {
            return Err(Error::Input(format!("{gate} needs two distinct qubits")));
        }
        Ok(Self { gate, qubits })
    }

    /// `p ← U p U†`.
    pub fn conjugate(&self, p: &mut PauliOperator) {
        let n = p.num_qubits();
        let touched: Vec<Letter> = self.qubits.iter().map(|&q| p.letter(q)).collect();
        if touched.iter().all(|&l| l == Letter::I) {
            return;
        }
        for &q in &self.qubits {
            p.set_letter(q, Letter::I);
        }
        // p = rest · ∏_q (i^{y_q} X_q^{x_q} Z_q^{z_q}); map each factor
        let images = self.gate.images();
        let k = self.qubits.len();
        let embed = |local: &PauliOperator| -> PauliOperator {
            let mut out = PauliOperator::identity(n).with_phase(local.phase());
            for (i, &q) in self.qubits.iter().enumerate() {
                out.set_letter(q, local.letter(i));
            }
            out
        };
        let mut local = PauliOperator::identity(k);
        for (i, l) in touched.iter().enumerate() {
            let (x, z) = l.bits();
            if x {
                local.mul_assign_right(&images[i].0);
            }
            if z {
                local.mul_assign_right(&images[i].1);
            }
            if x && z {
                local.mul_assign_right(&PauliOperator::identity(k).with_phase(Phase::I));
            }
        }
        p.mul_assign_right(&embed(&local));
    }
}

/// Layers of gates on disjoint qubits. Depth counts layers that contain a
/// two-qubit gate; single-qubit layers are free.
#[derive(Clone, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct CliffordCircuit {
    pub n: usize,
    pub layers: Vec<Vec<Gate>>,
}

impl CliffordCircuit {
    pub fn identity(n: usize) -> Self {
        Self {
            n,
            layers: Vec::new(),
        }
    }

    /// Checks qubit ranges, per-layer disjointness and two-qubit locality.
    pub fn new(
        n: usize,
        layers: Vec<Vec<Gate>>,
        layout: Option<&LatticeLayout>,
        radius: f64,
    ) -> Result<Self> {
        for (li, layer) in layers.iter().enumerate() {
            let mut used = vec![false; n];
            for g in layer {
                if g.qubits.len() != g.gate.arity() {
                    return Err(Error::Validation(format!(
                        "layer {li}: {} has wrong arity",
                        g.gate
                    )));
                }
                for &q in &g.qubits {
                    if q >= n {
                        return Err(Error::Validation(format!(
                            "layer {li}: qubit {q} out of range"
                        )));
                    }
                    if used[q] {
                        return Err(Error::Validation(format!(
                            "layer {li}: qubit {q} used twice"
                        )));
                    }
                    used[q] = true;
                }
                if let (Some(layout), 2) = (layout, g.qubits.len()) {
                    let d = layout.distance(g.qubits[0], g.qubits[1]);
                    if d > radius + 1e-9 {
                        return Err(Error::Validation(format!(
                            "layer {li}: {} on {:?} spans distance {d:.3} > locality radius {radius}",
                            g.gate, g.qubits
                        )));
                    }
                }
            }
        }
        Ok(Self { n, layers })
    }

    pub fn depth(&self) -> usize {
        self.layers
            .iter()
            .filter(|l| l.iter().any(|g| g.qubits.len() == 2))
            .count()
    }

    pub fn gate_count(&self) -> usize {
        self.layers.iter().map(Vec::len).sum()
    }

    /// `U p U†` with the first layer applied first.
    pub fn conjugate(&self, p: &PauliOperator) -> PauliOperator {
        let mut out = p.clone();
        for layer in &self.layers {
            for g in layer {
                g.conjugate(&mut out);
            }
        }
        out
    }

    pub fn inverse(&self) -> CliffordCircuit {
        let layers = self
            .layers
            .iter()
            .rev()
            .map(|layer| {
                layer
                    .iter()
                    .map(|g| {
                        let gate = match g.gate {
                            GateKind::S => GateKind::Sdg,
                            GateKind::Sdg => GateKind::S,
                            other => other,
                        };
                        Gate {
                            gate,
                            qubits: g.qubits.clone(),
                        }
                    })
                    .collect()
            })
            .collect();
        CliffordCircuit { n: self.n, layers }
    }

    /// One layer of random single-qubit Cliffords on every qubit (depth 0).
    pub fn random_local(n: usize, rng: &mut impl Rng) -> Self {
        let layer = (0..n)
            .map(|q| Gate {
                gate: *GateKind::ONE_QUBIT.choose(rng).expect("nonempty"),
                qubits: vec![q],
            })
            .collect();
        Self {
            n,
            layers: vec![layer],
        }
    }

    /// `depth` layers, each a random matching of nearby pairs carrying random
    /// two-qubit gates, with random single-qubit gates on the leftover qubits.
    pub fn random_local_layers(
        layout: &LatticeLayout,
        depth: usize,
        radius: f64,
        rng: &mut impl Rng,
    ) -> Self {
        let n = layout.num_qubits();
        let neighbours: Vec<Vec<usize>> = (0..n)
            .map(|a| {
                (0..n)
                    .filter(|&b| b != a && layout.distance(a, b) <= radius + 1e-9)
                    .collect()
            })
            .collect();
        let mut layers = Vec::with_capacity(depth);
        for _ in 0..depth {
            let mut order: Vec<usize> = (0..n).collect();
            order.shuffle(rng);
            let mut used = vec![false; n];
            let mut layer = Vec::new();
            for &a in &order {
                if used[a] {
                    continue;
                }
                let free: Vec<usize> = neighbours[a]
                    .iter()
                    .copied()
                    .filter(|&b| !used[b])
                    .collect();
                if let (Some(&b), true) = (free.choose(rng), rng.gen_bool(0.8)) {
                    used[a] = true;
                    used[b] = true;
                    let gate = *GateKind::TWO_QUBIT.choose(rng).expect("nonempty");
                    layer.push(Gate {
                        gate,
                        qubits: vec![a, b],
                    });
                } else {
                    used[a] = true;
                    let gate = *GateKind::ONE_QUBIT.choose(rng).expect("nonempty");
                    layer.push(Gate {
                        gate,
                        qubits: vec![a],
                    });
                }
            }
            layers.push(layer);
        }
        Self { n, layers }
    }
}

/// Anything Pauli-valued that can be conjugated by a circuit.
pub trait Dress: Sized {
    fn dress(&self, circuit: &CliffordCircuit) -> Result<Self>;
}

fn check_n(circuit: &CliffordCircuit, n: usize) -> Result<()> {
    if circuit.n != n {
        Err(Error::LengthMismatch(circuit.n, n))
    } else {
        Ok(())
    }
}

impl Dress for PauliOperator {
    fn dress(&self, circuit: &CliffordCircuit) -> Result<Self> {
        check_n(circuit, self.num_qubits())?;
        Ok(circuit.conjugate(self))
    }
}

impl Dress for StabilizerState {
    fn dress(&self, circuit: &CliffordCircuit) -> Result<Self> {
        check_n(circuit, self.num_qubits())?;
        let rows = self
            .group()
            .rows()
            .iter()
            .map(|g| circuit.conjugate(g))
            .collect();
        Ok(StabilizerState::from_group(GroupBasis::new(
            self.num_qubits(),
            rows,
        )?))
    }
}

impl Dress for StabilizerCode {
    fn dress(&self, circuit: &CliffordCircuit) -> Result<Self> {
        check_n(circuit, self.num_qubits())?;
        let gens = self
            .generators()
            .iter()
            .map(|g| circuit.conjugate(g))
            .collect();
        let mut c = StabilizerCode::new(
            format!("{}-dressed", self.name),
            gens,
            self.layout().clone(),
            self.d(),
        )?;
        c.metadata = self.metadata.clone();
        Ok(c)
    }
}

/// Support diameter, the width measure used for dressed strings.
pub fn operator_width(layout: &LatticeLayout, p: &PauliOperator) -> f64 {
    layout.diameter(&p.support_indices())
}
