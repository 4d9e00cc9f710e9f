//! Acceptance suite: one line per criterion, nonzero exit if any fails.

use std::process::ExitCode;
use std::time::{Duration, Instant};

mod common;

use common::{random_group_element, random_pauli, random_stabilizer_state, rng};
use rand::Rng;

use stabgem_core::ascent::{e0_alternating_ascent, AscentOptions};
use stabgem_core::clifford::DEFAULT_LOCALITY_RADIUS;
use stabgem_core::codes::{toric_ground_state, toric_logicals, ToricIndex};
use stabgem_core::entanglement::{
    decoupling_check, decoupling_check_with_generators, e0_dense_pauli_scan,
    e0_product_pauli_bruteforce, honeycomb_patch_witnesses, mixed_gem_syndrome_bound,
    patch_certificate_toric, random_code_word, random_product_state, rdm_zero_fidelity,
    sequential_projection_bound, state_overlap, syndrome_distribution, theorem2_certificate, Sigma,
    Witness, EPSILON_PRIME,
};
use stabgem_core::geometry::box_region;
use stabgem_core::group::subgroup_supported_in_mask;
use stabgem_core::logical::{
    clean_logical, cleaning_certificate, distance_bruteforce, is_correctable,
};
use stabgem_core::oracle::DenseMixed;
use stabgem_core::stats::{braiding_phase, exchange_phase, pauli_expectation};
use stabgem_core::synthesis::{
    canonical_t_junction, t_junction_at, toric_braiding_pair, truncate_stabilizer,
};
use stabgem_core::{
    make_ghz_state, make_honeycomb_fermion, make_toric, partition_into_patches,
    symmetric_mixed_state, thicken, CliffordCircuit, DenseState, Dress, Error, Expectation, Letter,
    PauliOperator, Region, StabilizerCode, StabilizerState,
};

type Check = Result<String, String>;

macro_rules! ensure {
    ($cond:expr, $($fmt:tt)+) => {
        let holds: bool = $cond;
        if !holds {
            return Err(format!($($fmt)+));
        }
    };
}

fn ok<T, E: std::fmt::Display>(r: Result<T, E>) -> Result<T, String> {
    r.map_err(|e| e.to_string())
}

fn braiding() -> Check {
    let mut pairs = 0;
    for l in 2..=6 {
        let code = make_toric(l).map_err(|e| e.to_string())?;
        let state = ok(toric_ground_state(l))?;
        let (gamma_m, gamma_e) = toric_braiding_pair(l);
        let phase = ok(braiding_phase(&state, &gamma_m, &gamma_e))?;
        ensure!(
            phase == Expectation::MINUS,
            "L={l}: block loop gives {phase}"
        );
        pairs += 1;
        let idx = ToricIndex { l };
        let n = code.num_qubits();
        for x in 0..l as isize {
            for y in 0..l as isize {
                let e_loop = PauliOperator::uniform(n, idx.plaquette(x, y), Letter::Z);
                let m_open = PauliOperator::single(n, idx.h(x, y), Letter::X);
                let phase = ok(braiding_phase(&state, &m_open, &e_loop))?;
                ensure!(
                    phase == Expectation::MINUS,
                    "L={l} plaquette ({x},{y}): {phase}"
                );
                let m_loop = PauliOperator::uniform(n, idx.star(x, y), Letter::X);
                let e_open = PauliOperator::single(n, idx.star(x, y)[0], Letter::Z);
                let phase = ok(braiding_phase(&state, &e_open, &m_loop))?;
                ensure!(phase == Expectation::MINUS, "L={l} star ({x},{y}): {phase}");
                pairs += 2;
            }
        }
        if l <= 3 {
            // dense confirmation of the block loop
            let psi = ok(DenseState::from_stabilizer(&state))?;
            let mut w = gamma_m.dagger();
            w.mul_assign_right(&gamma_e);
            w.mul_assign_right(&gamma_m);
            let v = ok(psi.expectation(&w))?;
            ensure!(
                (v.re + 1.0).abs() < 1e-12 && v.im.abs() < 1e-12,
                "dense L={l}: {v}"
            );
        }
    }
    Ok(format!("{pairs} crossing pairs, all -1"))
}

fn exchange() -> Check {
    let mut r = rng(2);
    let mut states = 0;
    for (lx, ly) in [(4, 4), (6, 6)] {
        let code = ok(make_honeycomb_fermion(lx, ly))?;
        let triple = ok(canonical_t_junction(&code))?;
        let mut candidates = vec![ok(symmetric_mixed_state(&code))?];
        for _ in 0..5 {
            candidates.push(ok(random_code_word(&code, &mut r))?);
        }
        for s in &candidates {
            let rep = ok(exchange_phase(s, &triple))?;
            ensure!(rep.phase == Expectation::MINUS, "{lx}x{ly}: {}", rep.phase);
            states += 1;
        }
    }
    Ok(format!(
        "4x4 and 6x6 junctions give -1 on {states} symmetric states"
    ))
}

fn ghz_e0() -> Check {
    let mut worst = 0.0f64;
    for n in 4..=10 {
        let state = ok(make_ghz_state(n))?;
        let exact = ok(e0_product_pauli_bruteforce(&state))?;
        ensure!(exact.e0 == 1.0, "n={n}: brute force E0 = {}", exact.e0);
        let psi = ok(DenseState::from_stabilizer(&state))?;
        let asc = ok(e0_alternating_ascent(&psi, AscentOptions::default()))?;
        worst = worst.max((asc.e0 - 1.0).abs());
        ensure!(
            (asc.e0 - 1.0).abs() <= 1e-9,
            "n={n}: ascent E0 = {}",
            asc.e0
        );
    }
    Ok(format!("n=4..10 exact 1, ascent max error {worst:.1e}"))
}

fn toric_l2_overlap() -> Check {
    let state = ok(toric_ground_state(2))?;
    let exact = ok(e0_product_pauli_bruteforce(&state))?;
    ensure!(
        exact.overlap == 0.125 && exact.e0 == 3.0,
        "stabilizer search: {}",
        exact.overlap
    );
    let psi = ok(DenseState::from_stabilizer(&state))?;
    let scan = ok(e0_dense_pauli_scan(&psi))?;
    ensure!(
        (scan.overlap - 0.125).abs() < 1e-12,
        "dense scan: {}",
        scan.overlap
    );
    let witness = ok(DenseState::pauli_product(&exact.axes, &exact.signs))?;
    let f = ok(witness.overlap(&psi))?.norm_sqr();
    ensure!((f - 0.125).abs() < 1e-12, "witness overlap {f}");
    Ok("max over 6^8 products = 1/8 in both engines, E0 = 3".into())
}

fn honeycomb_params() -> Check {
    let sizes = [(4, 2), (6, 2), (4, 4), (4, 6), (6, 4), (6, 6), (8, 8)];
    for (lx, ly) in sizes {
        let code = ok(make_honeycomb_fermion(lx, ly))?;
        let n = code.num_qubits();
        ensure!(code.k() == 1 + n / 2, "{lx}x{ly}: k = {}", code.k());
        let d = if n <= 24 {
            ok(distance_bruteforce(&code, None))?
        } else {
            // the search returns the first weight with a logical, so Some(2) is exact
            ok(distance_bruteforce(&code, Some(2)))?
        };
        ensure!(d == Some(2), "{lx}x{ly}: d = {d:?}");
    }
    Ok(format!("{} sizes with k = 1 + n/2 and d = 2", sizes.len()))
}

fn random_correctable_region(code: &StabilizerCode, rng: &mut impl Rng) -> Region {
    let layout = code.layout();
    loop {
        let region = if rng.gen_bool(0.5) {
            let corner = (rng.gen_range(0.0..10.0), rng.gen_range(0.0..10.0));
            let size = (rng.gen_range(1.0..7.0), rng.gen_range(1.0..7.0));
            box_region(layout, corner, size, "R")
        } else {
            let k = rng.gen_range(1..12);
            Region::new((0..k).map(|_| rng.gen_range(0..code.num_qubits())), "R")
        };
        if !region.is_empty() && is_correctable(code, &region) {
            return region;
        }
    }
}

fn cleaning() -> Check {
    let code = ok(make_toric(5))?;
    let logicals = toric_logicals(5);
    let mut r = rng(6);
    let cases = 100;
    for case in 0..cases {
        let mut l = PauliOperator::identity(code.num_qubits());
        while l.is_identity_up_to_phase() {
            for b in &logicals {
                if r.gen_bool(0.5) {
                    l.mul_assign_right(b);
                }
            }
        }
        l.mul_assign_right(&random_group_element(&code, &mut r));
        if !l.is_hermitian() {
            l.set_phase(stabgem_core::Phase::ONE);
        }
        let region = random_correctable_region(&code, &mut r);
        let cleaned = ok(clean_logical(&code, &l, &region))?;
        ensure!(
            !cleaned
                .support()
                .intersects(&region.mask(code.num_qubits())),
            "case {case}: cleaned operator still touches R"
        );
        ensure!(
            cleaning_certificate(&code, &l, &cleaned).is_member(),
            "case {case}: logical class changed"
        );
    }
    Ok(format!("{cases}/{cases} cleaned, class preserved"))
}

fn truncation() -> Check {
    let codes = [ok(make_toric(5))?, ok(make_honeycomb_fermion(4, 4))?];
    let mut r = rng(7);
    let mut done = 0;
    for (ci, code) in codes.iter().enumerate() {
        let n = code.num_qubits();
        let (px, py) = code.layout().periods().unwrap_or((4.0, 4.0));
        for case in 0..100 {
            let s = random_group_element(code, &mut r);
            let corner = (r.gen_range(0.0..px), r.gen_range(0.0..py));
            let size = (r.gen_range(0.5..px * 0.6), r.gen_range(0.5..py * 0.6));
            let region = box_region(code.layout(), corner, size, "R");
            let truncated = ok(truncate_stabilizer(code, &s, &region))?;
            let plus = thicken(code.layout(), &region, code.w());
            ensure!(
                truncated.support().is_subset_of(&plus.mask(n)),
                "code {ci} case {case}: support leaves R+"
            );
            let mask = region.mask(n);
            ensure!(
                truncated.restrict(&mask).same_letters(&s.restrict(&mask)),
                "code {ci} case {case}: restriction to R changed"
            );
            ensure!(
                code.span().express(&truncated).is_member(),
                "code {ci} case {case}: truncation left the group"
            );
            done += 1;
        }
    }
    Ok(format!("{done}/200 truncations inside R+ and equal on R"))
}

fn toric_dressings(l: usize, count: usize, seed: u64) -> Result<Vec<StabilizerState>, String> {
    let code = ok(make_toric(l))?;
    let ground = ok(toric_ground_state(l))?;
    let mut r = rng(seed);
    (0..count)
        .map(|_| {
            let c = CliffordCircuit::random_local_layers(
                code.layout(),
                1,
                DEFAULT_LOCALITY_RADIUS,
                &mut r,
            );
            ok(ground.dress(&c))
        })
        .collect()
}

fn decoupling() -> Check {
    let t = 1;
    let gap = 2.0 * (t + 1) as f64;
    let code = ok(make_toric(8))?;
    let n = code.num_qubits();
    let patches = partition_into_patches(code.layout(), 4.0, gap);
    ensure!(patches.len() >= 2, "only {} patches", patches.len());
    let union = patches.iter().fold(Region::empty(), |a, p| a.union(p));
    for (i, state) in toric_dressings(8, 20, 8)?.iter().enumerate() {
        ensure!(
            ok(decoupling_check(state, &patches))?,
            "dressing {i}: patches correlated"
        );
        ensure!(
            ok(decoupling_check_with_generators(
                n,
                state.group().rows(),
                &patches
            ))?,
            "dressing {i}: generator test disagrees"
        );
        // echelon count on the full group as an independent route
        let whole = subgroup_supported_in_mask(state.group(), &union.mask(n)).rank();
        let parts: usize = patches
            .iter()
            .map(|p| subgroup_supported_in_mask(state.group(), &p.mask(n)).rank())
            .sum();
        ensure!(whole == parts, "dressing {i}: rank {whole} vs {parts}");
        let joint = rdm_zero_fidelity(state, &union);
        let product: f64 = patches
            .iter()
            .map(|p| rdm_zero_fidelity(state, p))
            .product();
        ensure!(
            joint == product,
            "dressing {i}: F(union) = {joint}, product = {product}"
        );
    }
    Ok(format!(
        "{} patches, gap > {gap}, 20/20 dressings factorize",
        patches.len()
    ))
}

fn patch_certificate_l40() -> Check {
    let code = ok(make_toric(40))?;
    let cert = ok(patch_certificate_toric(&code, 0, None))?;
    ensure!(cert.m >= 32, "m = {}", cert.m);
    let floor = -(cert.m as f64) * (1.0 - EPSILON_PRIME).log2();
    ensure!(
        cert.bound_bits >= floor - 1e-12,
        "bound {} < {floor}",
        cert.bound_bits
    );
    ensure!(
        cert.alpha_effective >= 1.4e-4,
        "alpha = {}",
        cert.alpha_effective
    );
    let state = ok(toric_ground_state(40))?;
    let span = code.span();
    for (i, w) in cert.per_patch_witness.iter().enumerate() {
        let Witness::Braiding(b) = w else {
            return Err(format!("witness {i} is not a braiding triple"));
        };
        ok(b.verify(&span))?;
        ensure!(
            ok(braiding_phase(&state, &b.gamma2, &b.gamma1))? == Expectation::MINUS,
            "witness {i} phase"
        );
    }
    Ok(format!(
        "m = {}, bound = {:.4} bits, alpha_effective = {:.3e}",
        cert.m, cert.bound_bits, cert.alpha_effective
    ))
}

fn mesh_certificate_l16() -> Check {
    let code = ok(make_toric(16))?;
    let cert = ok(theorem2_certificate(&code, 0))?;
    ensure!(cert.m >= 4, "m = {}", cert.m);
    let state = ok(toric_ground_state(16))?;
    let span = code.span();
    for (i, w) in cert.per_patch_witness.iter().enumerate() {
        let Witness::Braiding(b) = w else {
            return Err(format!("witness {i} is not a braiding triple"));
        };
        ok(b.verify(&span))?;
        ensure!(
            ok(braiding_phase(&state, &b.gamma2, &b.gamma1))? == Expectation::MINUS,
            "witness {i} phase"
        );
    }
    let honeycomb = ok(make_honeycomb_fermion(6, 6))?;
    match theorem2_certificate(&honeycomb, 0) {
        Err(Error::Feasibility(_)) => {}
        other => return Err(format!("honeycomb not rejected: {:?}", other.map(|c| c.m))),
    }
    Ok(format!(
        "{} verified intersections, honeycomb rejected",
        cert.m
    ))
}

fn gap_at_scale() -> Check {
    let code = ok(make_toric(8))?;
    let side = 16.0;
    let mut worst = 0.0f64;
    let mut windows = 0;
    for state in toric_dressings(8, 10, 11)? {
        for x in 0..8 {
            for y in 0..8 {
                let corner = (2.0 * x as f64, 2.0 * y as f64);
                let region = box_region(code.layout(), corner, (side, side), "W");
                let f = rdm_zero_fidelity(&state, &region);
                worst = worst.max(f);
                windows += 1;
                ensure!(f <= 1.0 - EPSILON_PRIME, "window at {corner:?}: F = {f}");
            }
        }
    }
    Ok(format!("{windows} windows, max F = {worst:.3e}"))
}

/// Square patches of side 3 with an arms-of-one T-junction inside each.
fn honeycomb_patches(
    code: &StabilizerCode,
) -> Result<(Vec<Region>, Vec<stabgem_core::synthesis::ExchangeTriple>), String> {
    ok(honeycomb_patch_witnesses(code, 3.0, 2.0))
}

fn sequential() -> Check {
    let mut r = rng(12);
    let mut summary = Vec::new();
    for size in [6, 12] {
        let code = ok(make_honeycomb_fermion(size, size))?;
        let state = ok(random_code_word(&code, &mut r))?;
        let (patches, witnesses) = honeycomb_patches(&code)?;
        let order = stabgem_core::entanglement::row_major_order(code.layout(), &patches);
        let rep = ok(sequential_projection_bound(
            &state, &patches, &order, &witnesses, true,
        ))?;
        let cap = (1.0 - EPSILON_PRIME).powi(rep.m as i32);
        ensure!(
            rep.product <= cap,
            "{size}x{size}: product {} > {cap}",
            rep.product
        );
        summary.push(format!(
            "{size}x{size}: m={} prod={:.4}",
            rep.m, rep.product
        ));
    }
    // dense comparison of every step on a 4x4 code word
    let code = ok(make_honeycomb_fermion(4, 4))?;
    let patches = vec![
        box_region(code.layout(), (1.0, 0.0), (3.0, 2.0), "A"),
        box_region(code.layout(), (1.0, 2.0), (3.0, 2.0), "B"),
    ];
    let witnesses = vec![
        ok(t_junction_at(&code, 2, 0, [1, 1, 1]))?,
        ok(t_junction_at(&code, 2, 2, [1, 1, 1]))?,
    ];
    let mut worst = 0.0f64;
    for _ in 0..5 {
        let state = ok(random_code_word(&code, &mut r))?;
        for order in [vec![0, 1], vec![1, 0]] {
            let rep = ok(sequential_projection_bound(
                &state, &patches, &order, &witnesses, true,
            ))?;
            let mut psi = ok(DenseState::from_stabilizer(&state))?;
            // the stabilizer run stops at the first vanishing step
            for (step, &f) in rep.steps.iter().enumerate() {
                let (p, next) = psi.project_zero(patches[order[step]].qubits());
                worst = worst.max((p - f).abs());
                ensure!((p - f).abs() <= 1e-10, "step {step}: dense {p} vs {f}");
                psi = next;
            }
        }
    }
    summary.push(format!("4x4 dense max dev {worst:.1e}"));
    Ok(summary.join(", "))
}

/// `Tr(Π_S σ)` for `|0ⁿ⟩` and 20 random product states, each checked against
/// the dense projector. Returns the `|0ⁿ⟩` value, the maximum and the worst deviation.
fn syndrome_weights(code: &StabilizerCode, r: &mut impl Rng) -> Result<(f64, f64, f64), String> {
    let n = code.num_qubits();
    let rho = ok(symmetric_mixed_state(code))?;
    let dense = ok(DenseMixed::from_stabilizer(&rho))?;
    let mut sigmas = vec![StabilizerState::zero(n)];
    for _ in 0..20 {
        sigmas.push(ok(random_product_state(n, r))?);
    }
    let (mut largest, mut worst) = (0.0f64, 0.0f64);
    for (i, s) in sigmas.iter().enumerate() {
        let exact = ok(mixed_gem_syndrome_bound(
            code,
            &rho,
            &Sigma::State(s.clone()),
        ))?;
        let reference = dense.projector_weight(&ok(DenseState::from_stabilizer(s))?);
        worst = worst.max((exact - reference).abs());
        ensure!(
            (exact - reference).abs() <= 1e-10,
            "n={n} sigma {i}: {exact} vs {reference}"
        );
        largest = largest.max(exact);
    }
    let zero = ok(mixed_gem_syndrome_bound(
        code,
        &rho,
        &Sigma::State(sigmas[0].clone()),
    ))?;
    let dist = ok(syndrome_distribution(code, &sigmas[0]))?;
    ensure!(
        (dist.all_plus_mass - zero).abs() <= 1e-12,
        "n={n}: syndrome mass disagrees"
    );
    Ok((zero, largest, worst))
}

fn mixed_bound() -> Check {
    let mut r = rng(13);
    let (mut zeros, mut maxima, mut worst) = (Vec::new(), Vec::new(), 0.0f64);
    // one geometry family (Lx x 2 strips) so that only n changes
    for lx in [4, 6, 8] {
        let code = ok(make_honeycomb_fermion(lx, 2))?;
        let (z, m, w) = syndrome_weights(&code, &mut r)?;
        zeros.push(z);
        maxima.push(m);
        worst = worst.max(w);
    }
    for v in [&zeros, &maxima] {
        ensure!(
            v.windows(2).all(|w| w[1] < w[0]),
            "not decreasing in n: {v:?}"
        );
    }
    // square torus at n = 16, checked against the oracle and reported
    let (square, _, w) = syndrome_weights(&ok(make_honeycomb_fermion(4, 4))?, &mut r)?;
    worst = worst.max(w);
    Ok(format!(
        "n=8,12,16 strips: |0> {zeros:?}, max {maxima:?}; 4x4 |0> {square}; max dev {worst:.1e}"
    ))
}

fn master_oracle() -> Check {
    let mut r = rng(14);
    let mut worst = 0.0f64;
    let total = 500;
    for case in 0..total {
        let n = r.gen_range(2..=10);
        let a = ok(random_stabilizer_state(n, &mut r))?;
        let psi = ok(DenseState::from_stabilizer(&a))?;
        let (got, want) = match case % 5 {
            0 => {
                let p = random_pauli(n, 0.6, &mut r);
                let v = pauli_expectation(&a, &p).value();
                let d = ok(psi.expectation(&p))?;
                (v.re + v.im, d.re + d.im)
            }
            1 => {
                let b = ok(random_stabilizer_state(n, &mut r))?;
                let phi = ok(DenseState::from_stabilizer(&b))?;
                (
                    ok(state_overlap(&a, &b))?,
                    ok(psi.overlap(&phi))?.norm_sqr(),
                )
            }
            2 => {
                let region = Region::new((0..n).filter(|_| r.gen_bool(0.5)), "R");
                (
                    rdm_zero_fidelity(&a, &region),
                    psi.zero_probability(region.qubits()),
                )
            }
            3 => {
                // mixed: drop some rows of the pure group
                let rows: Vec<PauliOperator> = a
                    .group()
                    .rows()
                    .iter()
                    .filter(|_| r.gen_bool(0.6))
                    .cloned()
                    .collect();
                let rho = ok(StabilizerState::from_generators(n, &rows))?;
                let dense = ok(DenseMixed::from_stabilizer(&rho))?;
                let p = random_pauli(n, 0.6, &mut r);
                let v = pauli_expectation(&rho, &p).value();
                let d = ok(dense.expectation(&p))?;
                (v.re + v.im, d.re + d.im)
            }
            _ => {
                let rows: Vec<PauliOperator> = a
                    .group()
                    .rows()
                    .iter()
                    .filter(|_| r.gen_bool(0.6))
                    .cloned()
                    .collect();
                let rho = ok(StabilizerState::from_generators(n, &rows))?;
                let dense = ok(DenseMixed::from_stabilizer(&rho))?;
                let s = ok(random_product_state(n, &mut r))?;
                let exact = ok(stabgem_core::entanglement::projector_weight(
                    rho.group(),
                    &s,
                ))?;
                (
                    exact,
                    dense.projector_weight(&ok(DenseState::from_stabilizer(&s))?),
                )
            }
        };
        worst = worst.max((got - want).abs());
        ensure!(
            (got - want).abs() < 1e-10,
            "case {case} (n={n}): {got} vs {want}"
        );
    }
    Ok(format!("{total} quantities, max deviation {worst:.1e}"))
}

struct Criterion {
    id: usize,
    name: &'static str,
    budget: Duration,
    run: fn() -> Check,
}

fn main() -> ExitCode {
    let secs = Duration::from_secs;
    let criteria = [
        Criterion {
            id: 1,
            name: "braiding phase",
            budget: secs(1),
            run: braiding,
        },
        Criterion {
            id: 2,
            name: "exchange phase",
            budget: secs(1),
            run: exchange,
        },
        Criterion {
            id: 3,
            name: "GHZ geometric measure",
            budget: secs(30),
            run: ghz_e0,
        },
        Criterion {
            id: 4,
            name: "toric L=2 product overlap",
            budget: secs(60),
            run: toric_l2_overlap,
        },
        Criterion {
            id: 5,
            name: "honeycomb parameters",
            budget: secs(1),
            run: honeycomb_params,
        },
        Criterion {
            id: 6,
            name: "cleaning suite",
            budget: secs(60),
            run: cleaning,
        },
        Criterion {
            id: 7,
            name: "truncation suite",
            budget: secs(60),
            run: truncation,
        },
        Criterion {
            id: 8,
            name: "decoupling",
            budget: secs(120),
            run: decoupling,
        },
        Criterion {
            id: 9,
            name: "patch certificate L=40",
            budget: secs(60),
            run: patch_certificate_l40,
        },
        Criterion {
            id: 10,
            name: "mesh certificate L=16",
            budget: secs(120),
            run: mesh_certificate_l16,
        },
        Criterion {
            id: 11,
            name: "fidelity gap at scale",
            budget: secs(120),
            run: gap_at_scale,
        },
        Criterion {
            id: 12,
            name: "sequential projection",
            budget: secs(120),
            run: sequential,
        },
        Criterion {
            id: 13,
            name: "mixed-state bound",
            budget: secs(120),
            run: mixed_bound,
        },
        Criterion {
            id: 14,
            name: "master oracle cross-check",
            budget: secs(300),
            run: master_oracle,
        },
    ];
    let mut failed = 0;
    for c in &criteria {
        let start = Instant::now();
        let outcome = std::panic::catch_unwind(c.run).unwrap_or_else(|_| Err("panicked".into()));
        let elapsed = start.elapsed();
        let (tag, detail) = match outcome {
            Ok(d) if elapsed <= c.budget => ("PASS", d),
            Ok(d) => ("FAIL", format!("{d}; over budget")),
            Err(e) => ("FAIL", e),
        };
        if tag == "FAIL" {
            failed += 1;
        }
        println!(
            "criterion {:>2} [{tag}] {}: {detail} ({:.2} s of {} s)",
            c.id,
            c.name,
            elapsed.as_secs_f64(),
            c.budget.as_secs()
        );
    }
    println!(
        "acceptance: {} passed, {failed} failed",
        criteria.len() - failed
    );
    if failed == 0 {
        ExitCode::SUCCESS
    } else {
        ExitCode::FAILURE
    }
}
