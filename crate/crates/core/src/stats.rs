//! Exact expectation values, braiding and exchange phases, symmetry checks.

use num_complex::Complex64;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::codes::{StabilizerCode, StabilizerState};
use crate::error::{Error, Result};
use crate::group::GeneratorSpan;
use crate::oracle::{self, DenseState};
use crate::pauli::{PauliOperator, Phase};
use crate::synthesis::ExchangeTriple;

/// Expectation of a Pauli on a stabilizer state: zero or a unit in `{±1, ±i}`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct Expectation(pub Option<Phase>);

impl Expectation {
    pub const ZERO: Expectation = Expectation(None);
    pub const PLUS: Expectation = Expectation(Some(Phase::ONE));
    pub const MINUS: Expectation = Expectation(Some(Phase::MINUS_ONE));

    pub fn value(self) -> Complex64 {
        self.0.map_or(Complex64::new(0.0, 0.0), Phase::to_complex)
    }

    pub fn is_zero(self) -> bool {
        self.0.is_none()
    }

    /// Real value, for Hermitian observables.
    pub fn real(self) -> f64 {
        self.value().re
    }
}

impl std::fmt::Display for Expectation {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self.0 {
            None => f.write_str("0"),
            Some(p) if p == Phase::ONE => f.write_str("+1"),
            Some(p) if p == Phase::MINUS_ONE => f.write_str("-1"),
            Some(p) => write!(f, "{p}"),
        }
    }
}

/// Reusable evaluator; builds the decomposition engine once per state.
pub struct ExpectationEngine<'a> {
    state: &'a StabilizerState,
    span: GeneratorSpan,
}

impl<'a> ExpectationEngine<'a> {
    pub fn new(state: &'a StabilizerState) -> Self {
        Self {
            state,
            span: state.group().span(),
        }
    }

    pub fn expectation(&self, p: &PauliOperator) -> Expectation {
        if p.num_qubits() != self.state.num_qubits() {
            return Expectation::ZERO;
        }
        if self
            .state
            .group()
            .rows()
            .iter()
            .any(|g| !g.commutes_unchecked(p))
        {
            return Expectation::ZERO;
        }
        // commuting but outside the group only happens for mixed states
        Expectation(self.span.express(p).relative_phase())
    }
}

pub fn pauli_expectation(state: &StabilizerState, p: &PauliOperator) -> Expectation {
    ExpectationEngine::new(state).expectation(p)
}

/// `⟨γ† · loop · γ⟩`.
pub fn braiding_phase(
    state: &StabilizerState,
    gamma_open: &PauliOperator,
    gamma_loop: &PauliOperator,
) -> Result<Expectation> {
    let mut w = gamma_open.dagger();
    w.mul_assign_right(gamma_loop);
    w.mul_assign_right(gamma_open);
    let direct = pauli_expectation(state, &w);
    let base = pauli_expectation(state, gamma_loop);
    let sign = if gamma_open.commutes_with(gamma_loop)? {
        Phase::ONE
    } else {
        Phase::MINUS_ONE
    };
    let predicted = Expectation(base.0.map(|p| p * sign));
    if predicted != direct {
        return Err(Error::Internal(format!(
            "braiding phase {direct} disagrees with commutation prediction {predicted}"
        )));
    }
    Ok(direct)
}

/// Both evaluations of `⟨M₃†M₂†M₁†M₃M₂M₁⟩`.
#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct ExchangeReport {
    pub phase: Expectation,
    /// `(−1)^(a₁₂+a₁₃+a₂₃)` from pairwise commutation.
    pub parity_phase: Phase,
    /// The full word multiplied left to right.
    pub word: PauliOperator,
}

pub fn exchange_phase(state: &StabilizerState, triple: &ExchangeTriple) -> Result<ExchangeReport> {
    let ms = [&triple.m1, &triple.m2, &triple.m3];
    let mut parity = 0;
    for i in 0..3 {
        for j in i + 1..3 {
            if !ms[i].commutes_with(ms[j])? {
                parity += 1;
            }
        }
    }
    let parity_phase = if parity % 2 == 1 {
        Phase::MINUS_ONE
    } else {
        Phase::ONE
    };
    let n = triple.m1.num_qubits();
    let mut word = PauliOperator::identity(n);
    for m in [&triple.m3, &triple.m2, &triple.m1] {
        word.mul_assign_right(&m.dagger());
    }
    for m in [&triple.m3, &triple.m2, &triple.m1] {
        word.mul_assign_right(m);
    }
    let phase = pauli_expectation(state, &word);
    if !word.is_identity_up_to_phase() || phase != Expectation(Some(parity_phase)) {
        return Err(Error::Internal(format!(
            "exchange word {word} gives {phase}, commutation parity gives {parity_phase}"
        )));
    }
    Ok(ExchangeReport {
        phase,
        parity_phase,
        word,
    })
}

/// Generators whose expectation is not `+1`, or an empty list.
pub fn verify_one_form_symmetry(
    state: &StabilizerState,
    code: &StabilizerCode,
) -> (bool, Vec<usize>) {
    let engine = ExpectationEngine::new(state);
    let violators: Vec<usize> = code
        .generators()
        .par_iter()
        .enumerate()
        .filter(|(_, g)| engine.expectation(g) != Expectation::PLUS)
        .map(|(i, _)| i)
        .collect();
    (violators.is_empty(), violators)
}

/// `⟨ψ| S_CZ S_X |ψ⟩` through the dense simulator.
pub fn czx_expectation(state: &DenseState) -> Result<Complex64> {
    oracle::czx_expectation(state)
}
