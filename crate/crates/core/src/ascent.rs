//! Numerical optimizers on dense states: see-saw over product states and
//! environment sweeps over brick-wall circuits.

use nalgebra::DMatrix;
use num_complex::Complex64;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::oracle::{normalize, DenseState};

const ZERO: Complex64 = Complex64 { re: 0.0, im: 0.0 };

fn gaussian(rng: &mut impl Rng) -> f64 {
    let u1: f64 = rng.gen_range(f64::EPSILON..1.0);
    let u2: f64 = rng.gen();
    (-2.0 * u1.ln()).sqrt() * (std::f64::consts::TAU * u2).cos()
}

fn random_site(rng: &mut impl Rng) -> [Complex64; 2] {
    let mut v = [
        Complex64::new(gaussian(rng), gaussian(rng)),
        Complex64::new(gaussian(rng), gaussian(rng)),
    ];
    normalize(&mut v);
    v
}

fn check_normalized(psi: &DenseState) -> Result<()> {
    let norm: f64 = psi.amplitudes().iter().map(|a| a.norm_sqr()).sum();
    if (norm - 1.0).abs() > 1e-9 {
        return Err(Error::Input(format!(
            "state is not normalized (norm² = {norm})"
        )));
    }
    Ok(())
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct AscentOptions {
    pub restarts: usize,
    pub iters: usize,
    pub tol: f64,
    pub seed: u64,
}

impl Default for AscentOptions {
    fn default() -> Self {
        Self {
            restarts: 20,
            iters: 200,
            tol: 1e-13,
            seed: 0,
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ProductAscent {
    pub overlap: f64,
    pub e0: f64,
    pub witness: Vec<[Complex64; 2]>,
    /// Final overlap of every restart, in seed order.
    pub restart_overlaps: Vec<f64>,
    pub best_restart: usize,
}

/// `Σ_{b : b_j = s} ψ_b ∏_{k≠j} conj(φ_k[b_k])` for `s = 0, 1`.
fn site_environment(amps: &[Complex64], sites: &[[Complex64; 2]], j: usize) -> [Complex64; 2] {
    let n = sites.len();
    let mut v = amps.to_vec();
    // contract from the top qubit down to j+1
    for k in (j + 1..n).rev() {
        let half = 1usize << k;
        let c = [sites[k][0].conj(), sites[k][1].conj()];
        for b in 0..half {
            v[b] = v[b] * c[0] + v[b + half] * c[1];
        }
        v.truncate(half);
    }
    // then the qubits below j, always the lowest remaining bit
    for site in &sites[..j] {
        let c = [site[0].conj(), site[1].conj()];
        let len = v.len() / 2;
        for b in 0..len {
            v[b] = v[2 * b] * c[0] + v[2 * b + 1] * c[1];
        }
        v.truncate(len);
    }
    [v[0], v[1]]
}

fn see_saw(
    amps: &[Complex64],
    n: usize,
    mut sites: Vec<[Complex64; 2]>,
    iters: usize,
    tol: f64,
) -> (f64, Vec<[Complex64; 2]>) {
    let mut last = -1.0;
    for _ in 0..iters {
        let mut overlap = 0.0;
        for j in 0..n {
            let w = site_environment(amps, &sites, j);
            let norm = (w[0].norm_sqr() + w[1].norm_sqr()).sqrt();
            if norm == 0.0 {
                continue;
            }
            sites[j] = [w[0] / norm, w[1] / norm];
            overlap = norm * norm;
        }
        if overlap - last < tol {
            last = last.max(overlap);
            break;
        }
        last = overlap;
    }
    (last, sites)
}

/// Alternating maximization of `|⟨φ₁⊗…⊗φₙ|ψ⟩|²`. Each restart uses seed `seed + r`;
/// ties go to the lowest restart index.
pub fn e0_alternating_ascent(psi: &DenseState, opts: AscentOptions) -> Result<ProductAscent> {
    check_normalized(psi)?;
    let n = psi.num_qubits();
    let amps = psi.amplitudes();
    let runs: Vec<(f64, Vec<[Complex64; 2]>)> = (0..opts.restarts.max(1))
        .into_par_iter()
        .map(|r| {
            let mut rng = ChaCha8Rng::seed_from_u64(opts.seed.wrapping_add(r as u64));
            let sites = (0..n).map(|_| random_site(&mut rng)).collect();
            see_saw(amps, n, sites, opts.iters, opts.tol)
        })
        .collect();
    let mut best = 0;
    for (i, run) in runs.iter().enumerate() {
        if run.0 > runs[best].0 + 1e-15 {
            best = i;
        }
    }
    let overlap = runs[best].0;
    Ok(ProductAscent {
        overlap,
        e0: -overlap.log2(),
        witness: runs[best].1.clone(),
        restart_overlaps: runs.iter().map(|r| r.0).collect(),
        best_restart: best,
    })
}

/// One gate of the brick-wall ansatz. For two qubits, local index bit 0 is `qubits[0]`.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct AnsatzGate {
    pub qubits: Vec<usize>,
    /// Row-major entries.
    pub matrix: Vec<Complex64>,
}

impl AnsatzGate {
    fn dim(&self) -> usize {
        1 << self.qubits.len()
    }

    fn as_matrix(&self) -> DMatrix<Complex64> {
        let d = self.dim();
        DMatrix::from_row_slice(d, d, &self.matrix)
    }

    fn set_matrix(&mut self, m: &DMatrix<Complex64>) {
        let d = self.dim();
        self.matrix = (0..d * d).map(|k| m[(k / d, k % d)]).collect();
    }

    fn local_index(&self, b: usize) -> usize {
        self.qubits
            .iter()
            .enumerate()
            .fold(0, |acc, (i, &q)| acc | (((b >> q) & 1) << i))
    }

    fn mask(&self) -> usize {
        self.qubits.iter().fold(0, |m, &q| m | (1 << q))
    }

    fn spread(&self, base: usize, local: usize) -> usize {
        self.qubits
            .iter()
            .enumerate()
            .fold(base, |acc, (i, &q)| acc | (((local >> i) & 1) << q))
    }

    /// `v ← G v`, or `G† v` when `adjoint`.
    fn apply(&self, v: &mut [Complex64], adjoint: bool) {
        let d = self.dim();
        let m = self.as_matrix();
        let mask = self.mask();
        let mut local = vec![ZERO; d];
        for base in (0..v.len()).filter(|b| b & mask == 0) {
            for (l, slot) in local.iter_mut().enumerate() {
                *slot = v[self.spread(base, l)];
            }
            for i in 0..d {
                let mut acc = ZERO;
                for (j, x) in local.iter().enumerate() {
                    let g = if adjoint { m[(j, i)].conj() } else { m[(i, j)] };
                    acc += g * x;
                }
                v[self.spread(base, i)] = acc;
            }
        }
    }

    /// `E_ji = Σ_rest conj(χ[i, rest]) φ[j, rest]`, so that `⟨χ|G|φ⟩ = Tr(G E)`.
    fn environment(&self, chi: &[Complex64], phi: &[Complex64]) -> DMatrix<Complex64> {
        let d = self.dim();
        let mut e = DMatrix::from_element(d, d, ZERO);
        for (b, x) in phi.iter().enumerate() {
            if *x == ZERO {
                continue;
            }
            let j = self.local_index(b);
            let base = b & !self.mask();
            for i in 0..d {
                e[(j, i)] += chi[self.spread(base, i)].conj() * x;
            }
        }
        e
    }
}

fn random_unitary(d: usize, rng: &mut impl Rng) -> DMatrix<Complex64> {
    let g = DMatrix::from_fn(d, d, |_, _| Complex64::new(gaussian(rng), gaussian(rng)));
    g.qr().q()
}

/// A free single-qubit layer followed by `t` brick layers over neighbouring indices.
pub fn brick_wall(n: usize, t: usize, rng: &mut impl Rng) -> Vec<AnsatzGate> {
    let mut gates = Vec::new();
    for q in 0..n {
        let mut g = AnsatzGate {
            qubits: vec![q],
            matrix: vec![ZERO; 4],
        };
        g.set_matrix(&random_unitary(2, rng));
        gates.push(g);
    }
    for layer in 0..t {
        let mut i = layer % 2;
        while i + 1 < n {
            let mut g = AnsatzGate {
                qubits: vec![i, i + 1],
                matrix: vec![ZERO; 16],
            };
            g.set_matrix(&random_unitary(4, rng));
            gates.push(g);
            i += 2;
        }
    }
    gates
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct CircuitAscent {
    pub overlap: f64,
    /// `−log₂` of the best overlap; an upper bound on the depth-`t` measure.
    pub et_upper: f64,
    pub t: usize,
    pub gates: Vec<AnsatzGate>,
    pub sweeps: usize,
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct CircuitAscentOptions {
    pub restarts: usize,
    pub sweeps: usize,
    pub tol: f64,
}

impl Default for CircuitAscentOptions {
    fn default() -> Self {
        Self {
            restarts: 8,
            sweeps: 2000,
            tol: 1e-15,
        }
    }
}

fn circuit_sweeps(
    target: &[Complex64],
    n: usize,
    mut gates: Vec<AnsatzGate>,
    opts: CircuitAscentOptions,
) -> (f64, Vec<AnsatzGate>, usize) {
    let dim = 1usize << n;
    let mut zero = vec![ZERO; dim];
    zero[0] = Complex64::new(1.0, 0.0);
    let mut last = -1.0;
    let mut done = 0;
    for sweep in 0..opts.sweeps {
        // χ_k = g_{k+1}† … g_M† |ψ⟩
        let m = gates.len();
        let mut chis = vec![target.to_vec(); m + 1];
        for k in (0..m).rev() {
            let mut v = chis[k + 1].clone();
            gates[k].apply(&mut v, true);
            chis[k] = v;
        }
        let mut phi = zero.clone();
        let mut f = ZERO;
        for k in 0..m {
            let e = gates[k].environment(&chis[k + 1], &phi);
            let svd = e.svd(true, true);
            let (u, vt) = (svd.u.expect("u"), svd.v_t.expect("v_t"));
            let g = vt.adjoint() * u.adjoint();
            gates[k].set_matrix(&g);
            f = Complex64::new(svd.singular_values.iter().sum(), 0.0);
            gates[k].apply(&mut phi, false);
        }
        let overlap = f.norm_sqr().min(1.0);
        done = sweep + 1;
        if overlap - last < opts.tol {
            last = last.max(overlap);
            break;
        }
        last = overlap;
    }
    (last, gates, done)
}

/// Maximize `|⟨ψ|U|0ⁿ⟩|²` over brick-wall circuits of depth `t`, deterministically from `seed`.
pub fn et_upper_via_circuit_ascent(
    psi: &DenseState,
    t: usize,
    seed: u64,
    opts: CircuitAscentOptions,
) -> Result<CircuitAscent> {
    check_normalized(psi)?;
    let n = psi.num_qubits();
    let target = psi.amplitudes();
    let runs: Vec<(f64, Vec<AnsatzGate>, usize)> = (0..opts.restarts.max(1))
        .into_par_iter()
        .map(|r| {
            let mut rng = ChaCha8Rng::seed_from_u64(seed.wrapping_add(r as u64));
            let gates = brick_wall(n, t, &mut rng);
            circuit_sweeps(target, n, gates, opts)
        })
        .collect();
    let mut best = 0;
    for (i, run) in runs.iter().enumerate() {
        if run.0 > runs[best].0 + 1e-15 {
            best = i;
        }
    }
    let (overlap, gates, sweeps) = runs.into_iter().nth(best).expect("one restart");
    Ok(CircuitAscent {
        overlap,
        et_upper: (-overlap.log2()).max(0.0),
        t,
        gates,
        sweeps,
    })
}

/// `U|0ⁿ⟩` for an ansatz circuit.
pub fn prepare(n: usize, gates: &[AnsatzGate]) -> Vec<Complex64> {
    let mut v = vec![ZERO; 1 << n];
    v[0] = Complex64::new(1.0, 0.0);
    for g in gates {
        g.apply(&mut v, false);
    }
    v
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::codes::make_ghz_state;

    #[test]
    fn bell_pair_overlap_is_half() {
        let psi = DenseState::from_stabilizer(&make_ghz_state(2).unwrap()).unwrap();
        let r = e0_alternating_ascent(&psi, AscentOptions::default()).unwrap();
        assert!((r.overlap - 0.5).abs() < 1e-9);
    }

    #[test]
    fn circuit_reaches_bell_pair_at_depth_one() {
        let psi = DenseState::from_stabilizer(&make_ghz_state(2).unwrap()).unwrap();
        let r = et_upper_via_circuit_ascent(&psi, 1, 3, CircuitAscentOptions::default()).unwrap();
        assert!(r.et_upper < 1e-9, "{}", r.et_upper);
        let v = prepare(2, &r.gates);
        let o: Complex64 = psi
            .amplitudes()
            .iter()
            .zip(&v)
            .map(|(a, b)| a.conj() * b)
            .sum();
        assert!((o.norm_sqr() - r.overlap).abs() < 1e-9);
    }
}
