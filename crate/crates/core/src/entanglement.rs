//! Product-state overlaps, reduced-state fidelities, decoupling and the
//! patch-counting certificates built on top of them.

use std::collections::BTreeMap;

use num_complex::Complex64;
use rand::Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::bits::BitVec;
use crate::clifford::{CliffordCircuit, Dress, Gate, GateKind, DEFAULT_LOCALITY_RADIUS};
use crate::codes::{toric_logicals, StabilizerCode, StabilizerState};
use crate::error::{Error, Result};
use crate::geometry::{centroid, partition_into_patches, Region};
use crate::group::{
    intersection, pauli_rank, subgroup_supported_in_mask, z_subgroup_supported_in, GeneratorSpan,
    GroupBasis,
};
use crate::logical::{
    distance_bruteforce, logical_basis, mesh_logicals_for_pair, EXHAUSTIVE_LIMIT,
};
use crate::oracle::{eigenvector, DenseState, MAX_PURE_QUBITS};
use crate::pauli::{Letter, PauliOperator, Phase};
use crate::stats::{braiding_phase, exchange_phase, verify_one_form_symmetry, Expectation};
use crate::synthesis::{
    build_braiding_triple, t_junction_at, toric_local_triple, BraidingOptions, BraidingTriple,
    ExchangeTriple,
};

/// Fidelity gap per patch used by every certificate.
pub const EPSILON_PRIME: f64 = 0.01;
/// Trace-distance gap with `ε²/4 = ε′`.
pub const EPSILON: f64 = 0.2;
pub const MAX_BRUTEFORCE_QUBITS: usize = 12;

/// `−m·log₂(1−ε′)`.
pub fn bound_bits(m: usize, epsilon_prime: f64) -> f64 {
    -(m as f64) * (1.0 - epsilon_prime).log2()
}

/// `Tr(ρ_a ρ_b)`; for pure states this is `|⟨a|b⟩|²`.
pub fn state_overlap(a: &StabilizerState, b: &StabilizerState) -> Result<f64> {
    let n = a.num_qubits();
    if b.num_qubits() != n {
        return Err(Error::LengthMismatch(b.num_qubits(), n));
    }
    Ok(match common_dimension(a.group(), b.group()) {
        Some(dim) => (2f64).powi(dim as i32 - n as i32),
        None => 0.0,
    })
}

/// `Tr(Π σ)` for the projector `Π` onto the `+1` space of `group`.
pub fn projector_weight(group: &GroupBasis, sigma: &StabilizerState) -> Result<f64> {
    if sigma.num_qubits() != group.num_qubits() {
        return Err(Error::LengthMismatch(
            sigma.num_qubits(),
            group.num_qubits(),
        ));
    }
    Ok(match common_dimension(group, sigma.group()) {
        Some(dim) => (2f64).powi(dim as i32 - group.rank() as i32),
        None => 0.0,
    })
}

/// Dimension of `a ∩ ±b` when the two sign assignments agree on it, else `None`.
fn common_dimension(a: &GroupBasis, b: &GroupBasis) -> Option<usize> {
    let common = intersection(a, b);
    let span = b.span();
    for p in &common {
        if span.express(p).relative_phase() != Some(Phase::ONE) {
            return None;
        }
    }
    Some(common.len())
}

/// `⟨0_R|ρ_R|0_R⟩`.
pub fn rdm_zero_fidelity(state: &StabilizerState, region: &Region) -> f64 {
    let n = state.num_qubits();
    let z = z_subgroup_supported_in(state.group(), &region.mask(n));
    if z.rows().iter().any(|g| g.phase() != Phase::ONE) {
        return 0.0;
    }
    (2f64).powi(z.rank() as i32 - region.len() as i32)
}

fn check_disjoint(patches: &[Region]) -> Result<()> {
    for i in 0..patches.len() {
        for j in i + 1..patches.len() {
            if !patches[i].is_disjoint(&patches[j]) {
                return Err(Error::Input(format!("patches {i} and {j} overlap")));
            }
        }
    }
    Ok(())
}

fn union_all(patches: &[Region]) -> Region {
    patches.iter().fold(Region::empty(), |acc, p| acc.union(p))
}

/// Exact tensor factorization test: the subgroup supported in the union has
/// the same rank as the per-patch subgroups together.
pub fn decoupling_check(state: &StabilizerState, patches: &[Region]) -> Result<bool> {
    check_disjoint(patches)?;
    let n = state.num_qubits();
    if state.is_pure() {
        return Ok(pure_decoupling(n, state.group().rows(), patches));
    }
    let union = subgroup_supported_in_mask(state.group(), &union_all(patches).mask(n)).rank();
    let parts: usize = patches
        .iter()
        .map(|p| subgroup_supported_in_mask(state.group(), &p.mask(n)).rank())
        .sum();
    Ok(union == parts)
}

/// Same test for a pure state given by any generating set. Uses
/// `dim S_A = 2|A| − rank(G|_A)`, so only generators touching a patch matter.
pub fn decoupling_check_with_generators(
    n: usize,
    gens: &[PauliOperator],
    patches: &[Region],
) -> Result<bool> {
    check_disjoint(patches)?;
    Ok(pure_decoupling(n, gens, patches))
}

fn pure_decoupling(n: usize, gens: &[PauliOperator], patches: &[Region]) -> bool {
    let union = union_all(patches);
    let parts: usize = patches
        .par_iter()
        .map(|p| restricted_rank(n, gens, &p.mask(n)))
        .sum();
    restricted_rank(n, gens, &union.mask(n)) == parts
}

fn restricted_rank(n: usize, gens: &[PauliOperator], mask: &BitVec) -> usize {
    let rows: Vec<PauliOperator> = gens
        .iter()
        .filter(|g| g.support().intersects(mask))
        .map(|g| g.restrict(mask))
        .collect();
    pauli_rank(n, &rows)
}

/// Best product of single-qubit Pauli eigenstates.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ProductOverlap {
    pub overlap: f64,
    pub e0: f64,
    pub axes: Vec<Letter>,
    /// `true` for the `+1` eigenvector.
    pub signs: Vec<bool>,
}

impl ProductOverlap {
    pub fn state(&self) -> Result<StabilizerState> {
        StabilizerState::product(&self.axes, &self.signs)
    }
}

const AXES: [Letter; 3] = [Letter::X, Letter::Y, Letter::Z];

fn axis_pattern(mut index: usize, n: usize) -> Vec<Letter> {
    (0..n)
        .map(|_| {
            let a = AXES[index % 3];
            index /= 3;
            a
        })
        .collect()
}

fn xor_rank(rows: Vec<u32>) -> usize {
    let mut basis = [0u32; 32];
    let mut rank = 0;
    for mut v in rows {
        while v != 0 {
            let top = 31 - v.leading_zeros() as usize;
            if basis[top] == 0 {
                basis[top] = v;
                rank += 1;
                break;
            }
            v ^= basis[top];
        }
    }
    rank
}

/// Maximum of `⟨P|ρ|P⟩` over all `6ⁿ` Pauli-eigenstate products `|P⟩`, and `−log₂` of it.
///
/// For an axis pattern `a` the best sign choice gives `2^(dim(G ∩ ⟨a⟩) − n)`,
/// and the dimension is `rank G` minus the rank of the bits that violate `a`.
pub fn e0_product_pauli_bruteforce(state: &StabilizerState) -> Result<ProductOverlap> {
    let n = state.num_qubits();
    if n > MAX_BRUTEFORCE_QUBITS {
        return Err(Error::Capability(format!(
            "exhaustive product search is limited to {MAX_BRUTEFORCE_QUBITS} qubits (got {n}); use the ascent optimizer"
        )));
    }
    let rows: Vec<(u32, u32)> = state
        .group()
        .rows()
        .iter()
        .map(|g| {
            let mut x = 0u32;
            let mut z = 0u32;
            for q in 0..n {
                let (bx, bz) = g.letter(q).bits();
                x |= (bx as u32) << q;
                z |= (bz as u32) << q;
            }
            (x, z)
        })
        .collect();
    let r = rows.len();
    let patterns = 3usize.pow(n as u32);
    // (rank, pattern); min over rank then pattern index keeps the reduction deterministic
    let (best_rank, best) = (0..patterns)
        .into_par_iter()
        .map(|idx| {
            let axes = axis_pattern(idx, n);
            let (mut mx, mut mz, mut my) = (0u32, 0u32, 0u32);
            for (q, a) in axes.iter().enumerate() {
                match a {
                    Letter::X => mx |= 1 << q,
                    Letter::Y => my |= 1 << q,
                    _ => mz |= 1 << q,
                }
            }
            let bad: Vec<u32> = rows
                .iter()
                .map(|&(x, z)| (x & mz) | (z & mx) | ((x ^ z) & my))
                .collect();
            (xor_rank(bad), idx)
        })
        .min()
        .expect("at least one pattern");
    let dim = r - best_rank;
    let overlap = (2f64).powi(dim as i32 - n as i32);
    let axes = axis_pattern(best, n);
    let signs = witness_signs(state, &axes)?;
    Ok(ProductOverlap {
        overlap,
        e0: -overlap.log2(),
        axes,
        signs,
    })
}

/// Signs making the product state agree with every common element.
fn witness_signs(state: &StabilizerState, axes: &[Letter]) -> Result<Vec<bool>> {
    let n = axes.len();
    // rotate each axis onto Z, then read off the Z-type subgroup
    let gates: Vec<Gate> = axes
        .iter()
        .enumerate()
        .flat_map(|(q, a)| match a {
            Letter::X => vec![Gate {
                gate: GateKind::H,
                qubits: vec![q],
            }],
            Letter::Y => vec![
                Gate {
                    gate: GateKind::Sdg,
                    qubits: vec![q],
                },
                Gate {
                    gate: GateKind::H,
                    qubits: vec![q],
                },
            ],
            _ => vec![],
        })
        .collect();
    let rows: Vec<PauliOperator> = state
        .group()
        .rows()
        .iter()
        .map(|g| {
            let mut h = g.clone();
            for gate in &gates {
                gate.conjugate(&mut h);
            }
            h
        })
        .collect();
    let rotated = GroupBasis::new(n, rows)?;
    let z = z_subgroup_supported_in(&rotated, &BitVec::ones(n));
    // Σ_{j ∈ supp} b_j = [sign = −1]
    let eqs: Vec<(u32, bool)> = z
        .rows()
        .iter()
        .map(|g| {
            let mask = g.support_indices().iter().fold(0u32, |m, &q| m | (1 << q));
            (mask, g.phase() == Phase::MINUS_ONE)
        })
        .collect();
    let bits = solve_gf2(&eqs, n)
        .ok_or_else(|| Error::Internal("sign system for the witness is inconsistent".into()))?;
    Ok((0..n).map(|q| (bits >> q) & 1 == 0).collect())
}

fn solve_gf2(eqs: &[(u32, bool)], n: usize) -> Option<u32> {
    let mut rows: Vec<(u32, bool)> = eqs.to_vec();
    let mut pivots = Vec::new();
    let mut r = 0;
    for c in 0..n {
        let Some(p) = (r..rows.len()).find(|&i| (rows[i].0 >> c) & 1 == 1) else {
            continue;
        };
        rows.swap(r, p);
        let pivot = rows[r];
        for (i, row) in rows.iter_mut().enumerate() {
            if i != r && (row.0 >> c) & 1 == 1 {
                row.0 ^= pivot.0;
                row.1 ^= pivot.1;
            }
        }
        pivots.push(c);
        r += 1;
    }
    if rows[r..].iter().any(|row| row.1) {
        return None;
    }
    Some(
        pivots
            .iter()
            .enumerate()
            .filter(|(i, _)| rows[*i].1)
            .fold(0u32, |acc, (_, &c)| acc | (1 << c)),
    )
}

const SITE_STATES: [(Letter, bool); 6] = [
    (Letter::Z, true),
    (Letter::Z, false),
    (Letter::X, true),
    (Letter::X, false),
    (Letter::Y, true),
    (Letter::Y, false),
];

fn site_vectors(k: usize) -> Vec<(Vec<Complex64>, Vec<usize>)> {
    let total = 6usize.pow(k as u32);
    (0..total)
        .map(|mut idx| {
            let mut v = vec![Complex64::new(1.0, 0.0)];
            let mut choice = Vec::with_capacity(k);
            for q in 0..k {
                let c = idx % 6;
                idx /= 6;
                choice.push(c);
                let (a, s) = SITE_STATES[c];
                let e = eigenvector(a, s).expect("non-identity axis");
                let mut next = vec![Complex64::new(0.0, 0.0); v.len() * 2];
                for (b, x) in v.iter().enumerate() {
                    next[b] = x * e[0];
                    next[b | (1 << q)] = x * e[1];
                }
                v = next;
            }
            (v, choice)
        })
        .collect()
}

/// Literal scan of `|⟨P|ψ⟩|²` over all `6ⁿ` Pauli-eigenstate products,
/// contracting the left and right halves separately.
pub fn e0_dense_pauli_scan(psi: &DenseState) -> Result<ProductOverlap> {
    let n = psi.num_qubits();
    if n > MAX_BRUTEFORCE_QUBITS {
        return Err(Error::Capability(format!(
            "dense product scan is limited to {MAX_BRUTEFORCE_QUBITS} qubits"
        )));
    }
    let nl = n / 2;
    let nr = n - nl;
    let left = site_vectors(nl);
    let right = site_vectors(nr);
    let amps = psi.amplitudes();
    let dl = 1usize << nl;
    let dr = 1usize << nr;
    // partial[pl][r] = Σ_l conj(u_pl[l]) ψ[l + r·2^nl]
    let partial: Vec<Vec<Complex64>> = left
        .par_iter()
        .map(|(u, _)| {
            (0..dr)
                .map(|r| (0..dl).map(|l| u[l].conj() * amps[l + (r << nl)]).sum())
                .collect()
        })
        .collect();
    let (best, bl, br) = partial
        .par_iter()
        .enumerate()
        .map(|(pl, row)| {
            let mut best = (-1.0f64, pl, 0usize);
            for (pr, (v, _)) in right.iter().enumerate() {
                let amp: Complex64 = row.iter().zip(v).map(|(a, b)| a * b.conj()).sum();
                let o = amp.norm_sqr();
                if o > best.0 + 1e-14 {
                    best = (o, pl, pr);
                }
            }
            best
        })
        .reduce(
            || (-1.0, usize::MAX, usize::MAX),
            |a, b| {
                if b.0 > a.0 + 1e-14 || ((b.0 - a.0).abs() <= 1e-14 && (b.1, b.2) < (a.1, a.2)) {
                    b
                } else {
                    a
                }
            },
        );
    let choice: Vec<usize> = left[bl].1.iter().chain(&right[br].1).copied().collect();
    Ok(ProductOverlap {
        overlap: best,
        e0: -best.log2(),
        axes: choice.iter().map(|&c| SITE_STATES[c].0).collect(),
        signs: choice.iter().map(|&c| SITE_STATES[c].1).collect(),
    })
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum Witness {
    Braiding(BraidingTriple),
    Exchange(ExchangeTriple),
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct CertificateProvenance {
    pub construction: String,
    pub code: String,
    pub n: usize,
    pub params: serde_json::Value,
    pub notes: Vec<String>,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct GemCertificate {
    pub t: usize,
    pub epsilon: f64,
    pub epsilon_prime: f64,
    pub m: usize,
    pub bound_bits: f64,
    /// `bound_bits·(t+1)²/n`.
    pub alpha_effective: f64,
    pub patches: Vec<Region>,
    #[serde(rename = "witnesses")]
    pub per_patch_witness: Vec<Witness>,
    pub provenance: CertificateProvenance,
}

impl GemCertificate {
    fn assemble(
        t: usize,
        n: usize,
        patches: Vec<Region>,
        witnesses: Vec<Witness>,
        provenance: CertificateProvenance,
    ) -> Self {
        let m = patches.len();
        let bits = bound_bits(m, EPSILON_PRIME);
        Self {
            t,
            epsilon: EPSILON,
            epsilon_prime: EPSILON_PRIME,
            m,
            bound_bits: bits,
            alpha_effective: bits * ((t + 1) * (t + 1)) as f64 / n as f64,
            patches,
            per_patch_witness: witnesses,
            provenance,
        }
    }
}

fn family(code: &StabilizerCode) -> Option<&str> {
    code.metadata.get("family").and_then(|f| f.as_str())
}

fn lattice_spacing(code: &StabilizerCode) -> f64 {
    code.metadata
        .get("lattice_spacing")
        .and_then(|v| v.as_f64())
        .unwrap_or(1.0)
}

/// Pairwise separation of regions, strictly greater than `min`.
fn well_separated(code: &StabilizerCode, regions: &[Region], min: f64) -> Result<()> {
    let layout = code.layout();
    let pairs: Vec<(usize, usize)> = (0..regions.len())
        .flat_map(|i| (i + 1..regions.len()).map(move |j| (i, j)))
        .collect();
    let bad = pairs
        .par_iter()
        .find_first(|&&(i, j)| layout.region_distance(&regions[i], &regions[j]) <= min);
    match bad {
        Some(&(i, j)) => Err(Error::Certificate(format!(
            "patches {i} and {j} are not separated by more than {min}"
        ))),
        None => Ok(()),
    }
}

/// Patch certificate for a toric code, optionally dressed by a Clifford circuit.
///
/// Patches have side `8(t+1)` and gap `2(t+1)` in layout coordinates. Each
/// gets a plaquette/star witness whose braiding phase is checked on the
/// dressed ground state, and the patches are checked to decouple exactly.
pub fn patch_certificate_toric(
    code: &StabilizerCode,
    t: usize,
    circuit: Option<&CliffordCircuit>,
) -> Result<GemCertificate> {
    if family(code) != Some("toric") {
        return Err(Error::Capability(
            "patch certificate needs a built-in toric code".into(),
        ));
    }
    let l = code.metadata["L"].as_u64().unwrap_or(0) as usize;
    let n = code.num_qubits();
    let layout = code.layout();
    let side = 8.0 * (t + 1) as f64;
    let gap = 2.0 * (t + 1) as f64;
    let patches = partition_into_patches(layout, side, gap);
    if patches.is_empty() {
        return Err(Error::Certificate(format!(
            "patch side {side} does not fit the layout; the partition is empty"
        )));
    }
    let spread = circuit.map_or(0.0, |c| c.depth() as f64 * DEFAULT_LOCALITY_RADIUS);
    let identity = CliffordCircuit::identity(n);
    let circ = circuit.unwrap_or(&identity);
    if circ.n != n {
        return Err(Error::LengthMismatch(circ.n, n));
    }

    // pure reference state: generators and both Z loops, then dressed
    let [zr, _, zc, _] = toric_logicals(l);
    let mut gens: Vec<PauliOperator> = code.generators().to_vec();
    gens.push(zr);
    gens.push(zc);
    let gens: Vec<PauliOperator> = gens.iter().map(|g| circ.conjugate(g)).collect();
    let span = GeneratorSpan::new(n, &gens);
    let state = StabilizerState::from_group(GroupBasis::from_generators(n, &gens));

    let witnesses: Vec<Witness> = patches
        .par_iter()
        .enumerate()
        .map(|(i, patch)| {
            let interior = Region::new(
                patch.iter().filter(|&q| {
                    spread == 0.0 || layout.distance_to_region(q, &patch.complement(n)) > spread
                }),
                "interior",
            );
            let triple = toric_local_triple(code, &interior).ok_or_else(|| {
                Error::Certificate(format!(
                    "patch {i} ({}) has no room for a witness",
                    patch.label
                ))
            })?;
            let triple = if circuit.is_some() {
                triple.dressed(circ)
            } else {
                triple
            };
            triple
                .verify(&span)
                .map_err(|e| Error::Certificate(format!("patch {i}: {e}")))?;
            let phase = braiding_phase(&state, &triple.gamma2, &triple.gamma1)?;
            if phase != Expectation::MINUS {
                return Err(Error::Certificate(format!(
                    "patch {i}: braiding phase {phase}, expected -1"
                )));
            }
            Ok(Witness::Braiding(triple))
        })
        .collect::<Result<_>>()?;

    well_separated(code, &patches, gap)?;
    if !decoupling_check_with_generators(n, &gens, &patches)? {
        return Err(Error::Certificate(
            "reduced state on the patches does not factorize".into(),
        ));
    }
    let provenance = CertificateProvenance {
        construction: "toric patch certificate".into(),
        code: code.name.clone(),
        n,
        params: serde_json::json!({
            "patch_side": side,
            "gap": gap,
            "circuit_depth": circuit.map_or(0, |c| c.depth()),
            "circuit_gates": circuit.map_or(0, |c| c.gate_count()),
        }),
        notes: vec![
            "witness: plaquette loop crossed once by a star split at a shared edge".into(),
            "decoupling verified exactly by restricted ranks".into(),
        ],
    };
    Ok(GemCertificate::assemble(
        t, n, patches, witnesses, provenance,
    ))
}

/// Mesh constants for the distance-based certificate, in layout coordinates.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct MeshConstants {
    pub square_size: f64,
    pub separation: f64,
    pub spacing: f64,
    pub d: usize,
    pub w_lattice: f64,
}

/// `a = ⌊d/(4w)⌋` and `s = 2(w+t)+1` in lattice units, scaled to coordinates.
pub fn mesh_constants(code: &StabilizerCode, t: usize) -> Result<MeshConstants> {
    let d = match code.d() {
        Some(d) => d,
        None if code.num_qubits() <= EXHAUSTIVE_LIMIT => {
            distance_bruteforce(code, None)?.ok_or(Error::NoLogicals)?
        }
        None => {
            return Err(Error::Precondition(
                "code distance is unknown and too expensive to compute".into(),
            ))
        }
    };
    let spacing = lattice_spacing(code);
    let w_lattice = (code.w() / spacing).max(1.0);
    let a = (d as f64 / (4.0 * w_lattice)).floor();
    if a < 1.0 {
        return Err(Error::Feasibility(format!(
            "distance {d} is too small for the mesh construction: square size floor(d/(4w)) = 0 with w = {w_lattice}"
        )));
    }
    let s = 2.0 * (w_lattice + t as f64) + 1.0;
    Ok(MeshConstants {
        square_size: a * spacing,
        separation: s * spacing,
        spacing,
        d,
        w_lattice,
    })
}

/// Anticommuting logical pairs to clean into the meshes. Toric codes get
/// loops translated over a coarse grid so that crossings land in many places.
fn candidate_logical_pairs(code: &StabilizerCode) -> Vec<(PauliOperator, PauliOperator)> {
    if family(code) != Some("toric") {
        return logical_basis(code);
    }
    let l = code.metadata["L"].as_u64().unwrap_or(0) as isize;
    let idx = crate::codes::ToricIndex { l: l as usize };
    let n = idx.n();
    let stride = (l / 4).max(1);
    let mut pairs = Vec::new();
    for y0 in (0..l).step_by(stride as usize) {
        for x0 in (0..l).step_by(stride as usize) {
            let z_row = PauliOperator::uniform(n, (0..l).map(|x| idx.h(x, y0)), Letter::Z);
            let x_col = PauliOperator::uniform(n, (0..l).map(|y| idx.h(x0, y)), Letter::X);
            let z_col = PauliOperator::uniform(n, (0..l).map(|y| idx.v(x0, y)), Letter::Z);
            let x_row = PauliOperator::uniform(n, (0..l).map(|x| idx.v(x, y0)), Letter::X);
            pairs.push((z_row, x_col));
            pairs.push((z_col, x_row));
        }
    }
    pairs
}

/// Certificate from braiding witnesses at the intersections of diagonally shifted mesh pairs.
pub fn theorem2_certificate(code: &StabilizerCode, t: usize) -> Result<GemCertificate> {
    if code.k() == 0 {
        return Err(Error::NoLogicals);
    }
    let c = mesh_constants(code, t)?;
    let n = code.num_qubits();
    let spec0 = crate::geometry::MeshSpec::new(c.square_size, c.separation);
    let pitch = spec0.pitch();
    let family_size = (pitch / c.separation).ceil() as usize;
    let mut pairs = Vec::new();
    for (a, b) in candidate_logical_pairs(code) {
        pairs.push((a.clone(), b.clone()));
        pairs.push((b, a));
    }
    let mut tasks = Vec::new();
    for k in 0..family_size {
        let shift = k as f64 * c.separation;
        let s1 = spec0.shifted(shift, shift);
        let s2 = s1.shifted(c.separation, c.separation);
        for (pi, (l1, l2)) in pairs.iter().enumerate() {
            tasks.push((k, pi, s1, s2, l1, l2));
        }
    }
    let state = StabilizerState::from_generators(n, code.generators())?;
    let min_sep = 2.0 * (t + 1) as f64 * c.spacing;
    let results: Vec<Result<Vec<(Region, BraidingTriple)>>> = tasks
        .par_iter()
        .map(|&(_, _, s1, s2, l1, l2)| {
            let report = mesh_logicals_for_pair(code, l1, l2, &s1, &s2)?;
            let mut found = Vec::new();
            for &qi in &report.anticommuting {
                let mut rep = report.clone();
                rep.q = report.intersection_squares[qi].clone().with_label("Q");
                let Ok(triple) = build_braiding_triple(code, &rep, BraidingOptions::default())
                else {
                    continue;
                };
                if braiding_phase(&state, &triple.gamma2, &triple.gamma1)? == Expectation::MINUS {
                    found.push((rep.q.clone(), triple));
                }
            }
            Ok(found)
        })
        .collect();
    let mut candidates = Vec::new();
    let mut failures = 0;
    for r in results {
        match r {
            Ok(found) => candidates.extend(found),
            Err(Error::Feasibility(msg)) => return Err(Error::Feasibility(msg)),
            Err(_) => failures += 1,
        }
    }
    let total = candidates.len();
    let layout = code.layout();
    let mut kept: Vec<(Region, BraidingTriple)> = Vec::new();
    for (q, triple) in candidates {
        if kept
            .iter()
            .all(|(p, _)| layout.region_distance(p, &q) > min_sep)
        {
            kept.push((q, triple));
        }
    }
    if kept.is_empty() {
        return Err(Error::Certificate(
            "no verified braiding intersection".into(),
        ));
    }
    let target = (c.d * c.d) as f64 / (c.w_lattice.powi(2) * (c.w_lattice + t as f64).powi(2));
    let (patches, witnesses): (Vec<Region>, Vec<Witness>) = kept
        .into_iter()
        .enumerate()
        .map(|(i, (q, triple))| (q.with_label(format!("Q_{i}")), Witness::Braiding(triple)))
        .unzip();
    let provenance = CertificateProvenance {
        construction: "mesh intersection certificate".into(),
        code: code.name.clone(),
        n,
        params: serde_json::json!({
            "d": c.d,
            "w": c.w_lattice,
            "lattice_spacing": c.spacing,
            "square_size": c.square_size,
            "separation": c.separation,
            "mesh_pairs": family_size,
            "candidates": total,
            "failed_reports": failures,
            "min_separation": min_sep,
            "target_ratio": target,
        }),
        notes: vec![format!(
            "achieved m = {} against d^2/(w^2 (w+t)^2) = {target}",
            patches.len()
        )],
    };
    Ok(GemCertificate::assemble(
        t, n, patches, witnesses, provenance,
    ))
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct SequentialReport {
    pub product: f64,
    /// `F_j` in the order the patches were processed.
    pub steps: Vec<f64>,
    pub order: Vec<usize>,
    pub m: usize,
}

/// Row-major order of patches by centroid.
pub fn row_major_order(
    code_layout: &crate::geometry::LatticeLayout,
    patches: &[Region],
) -> Vec<usize> {
    let mut order: Vec<usize> = (0..patches.len()).collect();
    let key = |i: usize| centroid(code_layout, &patches[i]).unwrap_or((0.0, 0.0));
    order.sort_by(|&a, &b| {
        let (xa, ya) = key(a);
        let (xb, yb) = key(b);
        ya.total_cmp(&yb).then(xa.total_cmp(&xb)).then(a.cmp(&b))
    });
    order
}

/// `∏ F_j` from projecting each patch onto `|0…0⟩` in turn.
///
/// With `require_gap`, every step must satisfy `F_j < 1 − ε′`.
pub fn sequential_projection_bound(
    state: &StabilizerState,
    patches: &[Region],
    order: &[usize],
    witnesses: &[ExchangeTriple],
    require_gap: bool,
) -> Result<SequentialReport> {
    check_disjoint(patches)?;
    if witnesses.len() != patches.len() {
        return Err(Error::Input(format!(
            "{} witnesses for {} patches",
            witnesses.len(),
            patches.len()
        )));
    }
    for (i, (w, p)) in witnesses.iter().zip(patches).enumerate() {
        if !w.support().is_subset_of(p) {
            return Err(Error::Certificate(format!("witness {i} leaves its patch")));
        }
        if exchange_phase(state, w)?.phase != Expectation::MINUS {
            return Err(Error::Certificate(format!(
                "witness {i} does not show fermionic exchange"
            )));
        }
    }
    let n = state.num_qubits();
    let mut current = state.clone();
    let mut steps = Vec::with_capacity(patches.len());
    let mut product = 1.0;
    for &j in order {
        let f = rdm_zero_fidelity(&current, &patches[j]);
        if require_gap && f >= 1.0 - EPSILON_PRIME {
            return Err(Error::Certificate(format!("patch {j}: F = {f} has no gap")));
        }
        steps.push(f);
        product *= f;
        if f == 0.0 {
            break;
        }
        let mut prob = 1.0;
        for q in patches[j].iter() {
            let (p, next) = current.postselect(&PauliOperator::single(n, q, Letter::Z))?;
            prob *= p;
            current = next.ok_or_else(|| {
                Error::Internal("zero-probability branch after positive fidelity".into())
            })?;
        }
        if (prob - f).abs() > 1e-12 {
            return Err(Error::Internal(format!(
                "projection probability {prob} differs from fidelity {f}"
            )));
        }
    }
    Ok(SequentialReport {
        product,
        steps,
        order: order.to_vec(),
        m: patches.len(),
    })
}

/// Honeycomb patches with a short T-junction inside each one, ready for
/// [`sequential_projection_bound`].
pub fn honeycomb_patch_witnesses(
    code: &StabilizerCode,
    patch_size: f64,
    gap: f64,
) -> Result<(Vec<Region>, Vec<ExchangeTriple>)> {
    let layout = code.layout();
    let patches = partition_into_patches(layout, patch_size, gap);
    if patches.is_empty() {
        return Err(Error::Certificate(format!(
            "patch side {patch_size} with gap {gap} does not fit the layout"
        )));
    }
    let mut witnesses = Vec::with_capacity(patches.len());
    for (k, p) in patches.iter().enumerate() {
        let (x0, y0) = p
            .iter()
            .map(|q| layout.position(q))
            .fold((f64::INFINITY, f64::INFINITY), |(a, b), (x, y)| {
                (a.min(x), b.min(y))
            });
        let i = x0 as isize + 1;
        let j = y0 as isize + (i + y0 as isize).rem_euclid(2);
        let w = t_junction_at(code, i, j, [1, 1, 1])?;
        if !w.support().is_subset_of(p) {
            return Err(Error::Certificate(format!(
                "patch {k} is too small to hold a junction"
            )));
        }
        witnesses.push(w);
    }
    Ok((patches, witnesses))
}

/// Pure code state: the generators plus one random commuting logical per encoded qubit.
pub fn random_code_word(code: &StabilizerCode, rng: &mut impl Rng) -> Result<StabilizerState> {
    let n = code.num_qubits();
    let mut gens = code.generators().to_vec();
    for (a, b) in logical_basis(code) {
        let mut l = match rng.gen_range(0..3) {
            0 => a,
            1 => b,
            _ => {
                let mut ab = a.clone();
                ab.mul_assign_right(&b);
                ab
            }
        };
        // a·b picks up i; keep the operator Hermitian
        if !l.is_hermitian() {
            l.set_phase(Phase::ONE);
        }
        if rng.gen_bool(0.5) {
            l.set_phase(l.phase() * Phase::MINUS_ONE);
        }
        gens.push(l);
    }
    let state = StabilizerState::from_generators(n, &gens)?;
    debug_assert!(state.is_pure());
    Ok(state)
}

/// Either a single stabilizer state or a finite ensemble of them.
#[derive(Clone, Debug)]
pub enum Sigma {
    State(StabilizerState),
    Ensemble(Vec<(f64, StabilizerState)>),
}

/// `Tr(Π_S σ)` for a symmetric `ρ`, an upper bound on `F(ρ, σ)`.
pub fn mixed_gem_syndrome_bound(
    code: &StabilizerCode,
    rho: &StabilizerState,
    sigma: &Sigma,
) -> Result<f64> {
    if !verify_one_form_symmetry(rho, code).0 {
        return Err(Error::Precondition(
            "rho is not invariant under the code's symmetry generators".into(),
        ));
    }
    let group = code.group();
    match sigma {
        Sigma::State(s) => projector_weight(&group, s),
        Sigma::Ensemble(list) => {
            let total: f64 = list.iter().map(|(p, _)| p).sum();
            if (total - 1.0).abs() > 1e-12 || list.iter().any(|(p, _)| *p < 0.0) {
                return Err(Error::Input(
                    "ensemble weights must be a probability distribution".into(),
                ));
            }
            list.iter()
                .map(|(p, s)| Ok(p * projector_weight(&group, s)?))
                .sum()
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct SyndromeDistribution {
    /// Outcome strings over the code generators (`+`/`-`) with nonzero probability.
    pub support: BTreeMap<String, f64>,
    pub all_plus_mass: f64,
}

pub const MAX_SYNDROME_SUPPORT: usize = 1 << 16;

/// Outcome distribution of measuring every code generator on `sigma`.
pub fn syndrome_distribution(
    code: &StabilizerCode,
    sigma: &StabilizerState,
) -> Result<SyndromeDistribution> {
    let gens = code.generators();
    let mut frontier: Vec<(String, f64, StabilizerState)> =
        vec![(String::new(), 1.0, sigma.clone())];
    for g in gens {
        let mut next = Vec::new();
        let minus = g.clone().with_phase(g.phase() * Phase::MINUS_ONE);
        for (label, p, s) in frontier {
            for (sym, op) in [('+', g), ('-', &minus)] {
                let (q, post) = s.postselect(op)?;
                if let Some(post) = post {
                    let mut l = label.clone();
                    l.push(sym);
                    next.push((l, p * q, post));
                }
            }
        }
        if next.len() > MAX_SYNDROME_SUPPORT {
            return Err(Error::Capability(format!(
                "syndrome support exceeds {MAX_SYNDROME_SUPPORT} outcomes"
            )));
        }
        frontier = next;
    }
    let support: BTreeMap<String, f64> = frontier.into_iter().map(|(l, p, _)| (l, p)).collect();
    let all_plus = "+".repeat(gens.len());
    let all_plus_mass = support.get(&all_plus).copied().unwrap_or(0.0);
    Ok(SyndromeDistribution {
        support,
        all_plus_mass,
    })
}

/// Random product of Pauli eigenstates.
pub fn random_product_state(n: usize, rng: &mut impl Rng) -> Result<StabilizerState> {
    let axes: Vec<Letter> = (0..n).map(|_| AXES[rng.gen_range(0..3)]).collect();
    let signs: Vec<bool> = (0..n).map(|_| rng.gen_bool(0.5)).collect();
    StabilizerState::product(&axes, &signs)
}

/// Stabilizer state dressed by a circuit.
pub fn dressed_state(
    state: &StabilizerState,
    circuit: &CliffordCircuit,
) -> Result<StabilizerState> {
    state.dress(circuit)
}

/// Number of qubits the dense oracle accepts for pure states.
pub fn oracle_limit() -> usize {
    MAX_PURE_QUBITS
}
