//! Exact stabilizer-formalism tools for auditing long-range entanglement.

pub mod ascent;
pub mod bits;
pub mod clifford;
pub mod codes;
pub mod entanglement;
pub mod error;
pub mod geometry;
pub mod group;
pub mod io;
pub mod logical;
pub mod oracle;
pub mod pauli;
pub mod report;
pub mod stats;
pub mod synthesis;

pub use bits::BitVec;
pub use clifford::{CliffordCircuit, Dress, Gate, GateKind};
pub use codes::{
    make_ghz_state, make_honeycomb_fermion, make_toric, symmetric_mixed_state,
    MixedStabilizerState, StabilizerCode, StabilizerState,
};
pub use entanglement::{GemCertificate, SyndromeDistribution};
pub use error::{Error, Result};
pub use geometry::{
    build_mesh, partition_into_patches, thicken, LatticeLayout, Mesh, MeshSpec, Region,
};
pub use group::{express_in_generators, subgroup_supported_in, GroupBasis, Membership};
pub use logical::MeshLogicalReport;
pub use oracle::{DenseMixed, DenseState};
pub use pauli::{commutes, multiply, Letter, PauliOperator, Phase};
pub use stats::Expectation;
pub use synthesis::{BraidingTriple, ExchangeTriple};
