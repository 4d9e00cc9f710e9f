//! Dense state-vector and density-matrix reference simulator.
//!
//! Basis index `b` stores qubit `j` in bit `j` (qubit 0 least significant).
//! Everything here is brute force on purpose: it is the independent check
//! for the GF(2) engine, not a fast path.

use nalgebra::DMatrix;
use num_complex::Complex64;
use rand::Rng;

use crate::bits::BitVec;
use crate::codes::StabilizerState;
use crate::error::{Error, Result};
use crate::group::z_subgroup_supported_in;
use crate::pauli::{Letter, PauliOperator, Phase};

pub const MAX_PURE_QUBITS: usize = 20;
pub const MAX_MATRIX_QUBITS: usize = 10;

const ZERO: Complex64 = Complex64 { re: 0.0, im: 0.0 };
const ONE: Complex64 = Complex64 { re: 1.0, im: 0.0 };

#[derive(Clone, Debug, PartialEq)]
pub struct DenseState {
    n: usize,
    amps: Vec<Complex64>,
}

fn check_size(n: usize, limit: usize) -> Result<()> {
    if n > limit {
        Err(Error::Capability(format!(
            "dense simulation limited to {limit} qubits, got {n}"
        )))
    } else {
        Ok(())
    }
}

/// Bit masks and the `i^k` prefactor of a Pauli acting on basis states.
struct PauliMasks {
    x: usize,
    z: usize,
    prefactor: Complex64,
}

fn masks(p: &PauliOperator) -> PauliMasks {
    let n = p.num_qubits();
    let (mut x, mut z, mut ny) = (0usize, 0usize, 0u8);
    for q in 0..n {
        match p.letter(q) {
            Letter::I => {}
            Letter::X => x |= 1 << q,
            Letter::Z => z |= 1 << q,
            Letter::Y => {
                x |= 1 << q;
                z |= 1 << q;
                ny += 1;
            }
        }
    }
    // Y = i·X·Z, so each Y contributes a factor i
    let prefactor = p.phase().to_complex() * Complex64::i().powu(ny as u32);
    PauliMasks { x, z, prefactor }
}

/// `P|ψ⟩` for a vector in the computational basis.
pub fn apply_pauli(p: &PauliOperator, amps: &[Complex64]) -> Vec<Complex64> {
    let m = masks(p);
    let mut out = vec![ZERO; amps.len()];
    for (b, &a) in amps.iter().enumerate() {
        if a == ZERO {
            continue;
        }
        let sign = if (b & m.z).count_ones() % 2 == 1 {
            -1.0
        } else {
            1.0
        };
        out[b ^ m.x] += a * m.prefactor * sign;
    }
    out
}

/// A basis index `b` with `(−1)^{z·b}` equal to the sign of every Z-type
/// group element, so that `⟨b|Π|b⟩ ≠ 0`.
fn z_constraint_solution(state: &StabilizerState) -> Option<usize> {
    let n = state.num_qubits();
    let zs = z_subgroup_supported_in(state.group(), &BitVec::ones(n));
    // fully reduced rows (mask, parity, pivot bit)
    let mut rows: Vec<(usize, bool, usize)> = Vec::new();
    for g in zs.rows() {
        let mut mask = g.z_bits().iter_ones().fold(0usize, |m, q| m | (1 << q));
        let mut parity = g.phase() == Phase::MINUS_ONE;
        for &(r, p, pivot) in &rows {
            if mask & pivot != 0 {
                mask ^= r;
                parity ^= p;
            }
        }
        if mask == 0 {
            if parity {
                return None;
            }
            continue;
        }
        let pivot = 1 << mask.trailing_zeros();
        for row in rows.iter_mut() {
            if row.0 & pivot != 0 {
                row.0 ^= mask;
                row.1 ^= parity;
            }
        }
        rows.push((mask, parity, pivot));
    }
    // free bits zero: each pivot bit equals its row parity
    Some(rows.iter().filter(|r| r.1).fold(0usize, |b, r| b | r.2))
}

/// `(I + P)/2 |ψ⟩`.
fn apply_half_projector(p: &PauliOperator, amps: &mut [Complex64]) {
    let pa = apply_pauli(p, amps);
    for (a, b) in amps.iter_mut().zip(pa) {
        *a = (*a + b) * 0.5;
    }
}

pub fn norm_sqr(amps: &[Complex64]) -> f64 {
    amps.iter().map(|a| a.norm_sqr()).sum()
}

pub fn inner(a: &[Complex64], b: &[Complex64]) -> Complex64 {
    a.iter().zip(b).map(|(x, y)| x.conj() * y).sum()
}

impl DenseState {
    pub fn from_amplitudes(n: usize, amps: Vec<Complex64>) -> Result<Self> {
        check_size(n, MAX_PURE_QUBITS)?;
        if amps.len() != 1 << n {
            return Err(Error::Input(format!(
                "expected {} amplitudes, got {}",
                1usize << n,
                amps.len()
            )));
        }
        let norm = norm_sqr(&amps);
        if (norm - 1.0).abs() > 1e-9 {
            return Err(Error::Input(format!(
                "state is not normalized (norm² = {norm})"
            )));
        }
        Ok(Self { n, amps })
    }

    pub fn basis(n: usize, index: usize) -> Result<Self> {
        check_size(n, MAX_PURE_QUBITS)?;
        let mut amps = vec![ZERO; 1 << n];
        amps[index] = ONE;
        Ok(Self { n, amps })
    }

    pub fn zero(n: usize) -> Result<Self> {
        Self::basis(n, 0)
    }

    /// Tensor product of single-qubit vectors; `sites[0]` is qubit 0.
    pub fn product(sites: &[[Complex64; 2]]) -> Result<Self> {
        let n = sites.len();
        check_size(n, MAX_PURE_QUBITS)?;
        let mut amps = vec![ONE];
        for (q, s) in sites.iter().enumerate() {
            let mut next = vec![ZERO; amps.len() * 2];
            for (b, a) in amps.iter().enumerate() {
                next[b] = a * s[0];
                next[b | (1 << q)] = a * s[1];
            }
            amps = next;
        }
        Self::from_amplitudes(n, amps)
    }

    /// Product of Pauli eigenstates: qubit `j` is the `signs[j]` eigenvector of `axes[j]`.
    pub fn pauli_product(axes: &[Letter], signs: &[bool]) -> Result<Self> {
        let sites: Vec<[Complex64; 2]> = axes
            .iter()
            .zip(signs)
            .map(|(&a, &plus)| eigenvector(a, plus))
            .collect::<Result<_>>()?;
        Self::product(&sites)
    }

    /// Haar-ish random state from complex Gaussians.
    pub fn random(n: usize, rng: &mut impl Rng) -> Result<Self> {
        check_size(n, MAX_PURE_QUBITS)?;
        let mut amps: Vec<Complex64> = (0..1usize << n)
            .map(|_| Complex64::new(gaussian(rng), gaussian(rng)))
            .collect();
        normalize(&mut amps);
        Ok(Self { n, amps })
    }

    /// Projects a basis vector onto the stabilized subspace. The first
    /// candidate solves the Z-type sign constraints; after that basis vectors
    /// are tried in order. Only meaningful for full-rank groups.
    pub fn from_stabilizer(state: &StabilizerState) -> Result<Self> {
        let n = state.num_qubits();
        check_size(n, MAX_PURE_QUBITS)?;
        if !state.is_pure() {
            return Err(Error::Input(
                "mixed stabilizer state has no state vector; use DenseMixed".into(),
            ));
        }
        // a surviving projection has norm at least 2^-n
        let floor = (0.5f64).powi(n as i32 + 1);
        let first = z_constraint_solution(state);
        for b in first.into_iter().chain(0..1usize << n) {
            let mut amps = vec![ZERO; 1 << n];
            amps[b] = ONE;
            for g in state.group().rows() {
                apply_half_projector(g, &mut amps);
            }
            if norm_sqr(&amps) > floor {
                normalize(&mut amps);
                return Ok(Self { n, amps });
            }
        }
        Err(Error::Internal(
            "stabilizer group annihilates every basis vector".into(),
        ))
    }

    pub fn num_qubits(&self) -> usize {
        self.n
    }

    pub fn amplitudes(&self) -> &[Complex64] {
        &self.amps
    }

    pub fn apply_word(&self, p: &PauliOperator) -> Result<Self> {
        self.check_len(p.num_qubits())?;
        Ok(Self {
            n: self.n,
            amps: apply_pauli(p, &self.amps),
        })
    }

    pub fn expectation(&self, p: &PauliOperator) -> Result<Complex64> {
        self.check_len(p.num_qubits())?;
        Ok(inner(&self.amps, &apply_pauli(p, &self.amps)))
    }

    /// `⟨self|other⟩`.
    pub fn overlap(&self, other: &DenseState) -> Result<Complex64> {
        self.check_len(other.n)?;
        Ok(inner(&self.amps, &other.amps))
    }

    /// Probability that every qubit of `region` reads 0.
    pub fn zero_probability(&self, region: &[usize]) -> f64 {
        let mask = region.iter().fold(0usize, |m, &q| m | (1 << q));
        self.amps
            .iter()
            .enumerate()
            .filter(|(b, _)| b & mask == 0)
            .map(|(_, a)| a.norm_sqr())
            .sum()
    }

    /// Postselect `region` on all-zero; returns the probability and the
    /// normalized post-measurement state (unchanged if the probability vanishes).
    pub fn project_zero(&self, region: &[usize]) -> (f64, DenseState) {
        let mask = region.iter().fold(0usize, |m, &q| m | (1 << q));
        let mut amps: Vec<Complex64> = self
            .amps
            .iter()
            .enumerate()
            .map(|(b, &a)| if b & mask == 0 { a } else { ZERO })
            .collect();
        let p = norm_sqr(&amps);
        if p > 0.0 {
            normalize(&mut amps);
            (p, DenseState { n: self.n, amps })
        } else {
            (0.0, self.clone())
        }
    }

    /// Reduced density matrix on `region`; row index bit `i` is `region[i]`.
    pub fn reduced_density(&self, region: &[usize]) -> Result<DMatrix<Complex64>> {
        check_size(region.len(), MAX_MATRIX_QUBITS)?;
        let k = region.len();
        let rest: Vec<usize> = (0..self.n).filter(|q| !region.contains(q)).collect();
        let dim = 1usize << k;
        let mut rho = DMatrix::from_element(dim, dim, ZERO);
        let compose = |r: usize, e: usize| -> usize {
            let mut b = 0usize;
            for (i, &q) in region.iter().enumerate() {
                b |= ((r >> i) & 1) << q;
            }
            for (i, &q) in rest.iter().enumerate() {
                b |= ((e >> i) & 1) << q;
            }
            b
        };
        for e in 0..1usize << rest.len() {
            let col: Vec<Complex64> = (0..dim).map(|r| self.amps[compose(r, e)]).collect();
            for i in 0..dim {
                if col[i] == ZERO {
                    continue;
                }
                for j in 0..dim {
                    rho[(i, j)] += col[i] * col[j].conj();
                }
            }
        }
        Ok(rho)
    }

    pub fn density_matrix(&self) -> Result<DMatrix<Complex64>> {
        check_size(self.n, MAX_MATRIX_QUBITS)?;
        let v = nalgebra::DVector::from_column_slice(&self.amps);
        Ok(&v * v.adjoint())
    }

    fn check_len(&self, n: usize) -> Result<()> {
        if n != self.n {
            Err(Error::LengthMismatch(n, self.n))
        } else {
            Ok(())
        }
    }
}

fn gaussian(rng: &mut impl Rng) -> f64 {
    // Box-Muller
    let u1: f64 = rng.gen_range(f64::EPSILON..1.0);
    let u2: f64 = rng.gen();
    (-2.0 * u1.ln()).sqrt() * (std::f64::consts::TAU * u2).cos()
}

/// Unit eigenvector of a single-qubit Pauli with eigenvalue `+1` (`plus`) or `−1`.
pub fn eigenvector(axis: Letter, plus: bool) -> Result<[Complex64; 2]> {
    let r = std::f64::consts::FRAC_1_SQRT_2;
    let s = if plus { 1.0 } else { -1.0 };
    match axis {
        Letter::Z if plus => Ok([ONE, ZERO]),
        Letter::Z => Ok([ZERO, ONE]),
        Letter::X => Ok([Complex64::new(r, 0.0), Complex64::new(s * r, 0.0)]),
        Letter::Y => Ok([Complex64::new(r, 0.0), Complex64::new(0.0, s * r)]),
        Letter::I => Err(Error::Input("identity has no eigenbasis".into())),
    }
}

pub fn normalize(amps: &mut [Complex64]) {
    let norm = norm_sqr(amps).sqrt();
    for a in amps.iter_mut() {
        *a /= norm;
    }
}

/// Dense view of a (possibly mixed) stabilizer state: `ρ = Π / Tr Π` with
/// `Π = ∏ (I+g)/2`. Quantities are evaluated by projecting vectors, so the
/// full matrix is only built on request.
#[derive(Clone, Debug)]
pub struct DenseMixed {
    n: usize,
    rows: Vec<PauliOperator>,
    trace: f64,
}

impl DenseMixed {
    pub fn from_stabilizer(state: &StabilizerState) -> Result<Self> {
        let n = state.num_qubits();
        check_size(n, MAX_PURE_QUBITS)?;
        Ok(Self {
            n,
            rows: state.group().rows().to_vec(),
            trace: (2f64).powi((n - state.rank()) as i32),
        })
    }

    pub fn num_qubits(&self) -> usize {
        self.n
    }

    /// `Π|ψ⟩`.
    pub fn project(&self, amps: &[Complex64]) -> Vec<Complex64> {
        let mut v = amps.to_vec();
        for g in &self.rows {
            apply_half_projector(g, &mut v);
        }
        v
    }

    /// `Tr(Π |ψ⟩⟨ψ|) = ‖Π ψ‖²`.
    pub fn projector_weight(&self, psi: &DenseState) -> f64 {
        norm_sqr(&self.project(&psi.amps))
    }

    /// `⟨ψ|ρ|ψ⟩`.
    pub fn fidelity_with_pure(&self, psi: &DenseState) -> f64 {
        self.projector_weight(psi) / self.trace
    }

    pub fn matrix(&self) -> Result<DMatrix<Complex64>> {
        check_size(self.n, MAX_MATRIX_QUBITS)?;
        let dim = 1usize << self.n;
        let mut m = DMatrix::from_element(dim, dim, ZERO);
        for b in 0..dim {
            let mut e = vec![ZERO; dim];
            e[b] = ONE;
            let col = self.project(&e);
            for (i, c) in col.into_iter().enumerate() {
                m[(i, b)] = c / self.trace;
            }
        }
        Ok(m)
    }

    /// `Tr(ρ P)` via `Σ_b ⟨b|Π P|b⟩ / Tr Π`.
    pub fn expectation(&self, p: &PauliOperator) -> Result<Complex64> {
        check_size(self.n, 14)?;
        let dim = 1usize << self.n;
        let mut acc = ZERO;
        for b in 0..dim {
            let mut e = vec![ZERO; dim];
            e[b] = ONE;
            let pe = apply_pauli(p, &e);
            let ppe = self.project(&pe);
            acc += ppe[b];
        }
        Ok(acc / self.trace)
    }

    pub fn purity(&self) -> f64 {
        1.0 / self.trace
    }

    /// `⟨0_R|ρ_R|0_R⟩ = Σ_{b : b_R = 0} ⟨b|ρ|b⟩`.
    pub fn zero_probability(&self, region: &[usize]) -> Result<f64> {
        check_size(self.n, 14)?;
        let mask = region.iter().fold(0usize, |m, &q| m | (1 << q));
        let dim = 1usize << self.n;
        let mut acc = 0.0;
        for b in (0..dim).filter(|b| b & mask == 0) {
            let mut e = vec![ZERO; dim];
            e[b] = ONE;
            acc += norm_sqr(&self.project(&e));
        }
        Ok(acc / self.trace)
    }
}

/// `⟨ψ|ρ|ψ⟩`.
pub fn fidelity(rho: &DMatrix<Complex64>, psi: &DenseState) -> f64 {
    let v = nalgebra::DVector::from_column_slice(&psi.amps);
    (v.adjoint() * rho * &v)[(0, 0)].re
}

/// `‖ρ − σ‖₁` from the eigenvalues of the Hermitian difference.
pub fn trace_distance_norm(rho: &DMatrix<Complex64>, sigma: &DMatrix<Complex64>) -> f64 {
    let diff = rho - sigma;
    let eig = nalgebra::SymmetricEigen::new(diff);
    eig.eigenvalues.iter().map(|e| e.abs()).sum()
}

/// `⟨ψ| S_CZ S_X |ψ⟩` with `S_X = ∏ X_j` and `S_CZ = ∏ CZ_{j,j+1}` around a ring.
pub fn czx_expectation(psi: &DenseState) -> Result<Complex64> {
    let n = psi.n;
    check_size(n, MAX_PURE_QUBITS)?;
    let pairs: Vec<(usize, usize)> = match n {
        0 | 1 => Vec::new(),
        2 => vec![(0, 1)],
        _ => (0..n).map(|j| (j, (j + 1) % n)).collect(),
    };
    let all = (1usize << n) - 1;
    let mut acc = ZERO;
    for (b, a) in psi.amps.iter().enumerate() {
        // S_X |b⟩ = |b̄⟩, then S_CZ contributes a sign
        let flipped = b ^ all;
        let cz = pairs
            .iter()
            .filter(|&&(i, j)| (flipped >> i) & 1 == 1 && (flipped >> j) & 1 == 1)
            .count();
        let sign = if cz % 2 == 1 { -1.0 } else { 1.0 };
        acc += psi.amps[flipped].conj() * a * sign;
    }
    Ok(acc)
}

/// Dense Pauli matrix, for small cross-checks.
pub fn pauli_matrix(p: &PauliOperator) -> Result<DMatrix<Complex64>> {
    let n = p.num_qubits();
    check_size(n, MAX_MATRIX_QUBITS)?;
    let dim = 1usize << n;
    let mut m = DMatrix::from_element(dim, dim, ZERO);
    for b in 0..dim {
        let mut e = vec![ZERO; dim];
        e[b] = ONE;
        for (i, c) in apply_pauli(p, &e).into_iter().enumerate() {
            m[(i, b)] = c;
        }
    }
    Ok(m)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::codes::make_ghz_state;

    #[test]
    fn ghz_vector() {
        let s = DenseState::from_stabilizer(&make_ghz_state(3).unwrap()).unwrap();
        let r = std::f64::consts::FRAC_1_SQRT_2;
        assert!((s.amps[0].re - r).abs() < 1e-12);
        assert!((s.amps[7].re - r).abs() < 1e-12);
        assert!(s.amps[1..7].iter().all(|a| a.norm() < 1e-12));
    }

    #[test]
    fn y_acts_as_i_x_z() {
        let y: PauliOperator = "Y".parse().unwrap();
        let out = apply_pauli(&y, &[ONE, ZERO]);
        assert_eq!(out, vec![ZERO, Complex64::i()]);
    }

    #[test]
    fn czx_on_zero_state_vanishes() {
        let z = DenseState::zero(4).unwrap();
        assert!(czx_expectation(&z).unwrap().norm() < 1e-12);
    }
}
