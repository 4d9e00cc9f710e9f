//! Random inputs shared by the integration tests.
#![allow(dead_code)]

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use stabgem_core::codes::ghz_layout;
use stabgem_core::{
    CliffordCircuit, Dress, Error, Letter, PauliOperator, Phase, StabilizerCode, StabilizerState,
};

pub fn rng(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

/// Each qubit carries a random letter with probability `density`; phase `+1`.
pub fn random_pauli(n: usize, density: f64, rng: &mut impl Rng) -> PauliOperator {
    let letters = [Letter::X, Letter::Y, Letter::Z];
    let mut terms = Vec::new();
    for q in 0..n {
        if rng.gen_bool(density) {
            terms.push((q, letters[rng.gen_range(0..3)]));
        }
    }
    PauliOperator::from_sparse(n, terms)
}

pub fn random_phased_pauli(n: usize, rng: &mut impl Rng) -> PauliOperator {
    random_pauli(n, 0.7, rng).with_phase(Phase::from_exponent(rng.gen_range(0..4)))
}

pub fn random_group_element(code: &StabilizerCode, rng: &mut impl Rng) -> PauliOperator {
    let mut s = PauliOperator::identity(code.num_qubits());
    for g in code.generators() {
        if rng.gen_bool(0.5) {
            s.mul_assign_right(g);
        }
    }
    s
}

/// `|0ⁿ⟩` scrambled by an all-to-all random Clifford circuit.
pub fn random_stabilizer_state(n: usize, rng: &mut impl Rng) -> Result<StabilizerState, Error> {
    let layout = ghz_layout(n);
    let circuit = CliffordCircuit::random_local_layers(&layout, 2 * n, n as f64, rng);
    StabilizerState::zero(n).dress(&circuit)
}

/// A random pure state with some of its rows dropped.
pub fn random_mixed_state(n: usize, rng: &mut impl Rng) -> Result<StabilizerState, Error> {
    let pure = random_stabilizer_state(n, rng)?;
    let rows: Vec<PauliOperator> = pure
        .group()
        .rows()
        .iter()
        .filter(|_| rng.gen_bool(0.6))
        .cloned()
        .collect();
    StabilizerState::from_generators(n, &rows)
}
