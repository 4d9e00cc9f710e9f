//! Command implementations. Each returns a report; nothing here prints.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde_json::{json, Value};

use stabgem_core::ascent::{
    e0_alternating_ascent, et_upper_via_circuit_ascent, AscentOptions, CircuitAscentOptions,
};
use stabgem_core::codes::{ghz_layout, make_trivial_code, toric_ground_state};
use stabgem_core::entanglement::{
    e0_dense_pauli_scan, e0_product_pauli_bruteforce, honeycomb_patch_witnesses, mesh_constants,
    mixed_gem_syndrome_bound, patch_certificate_toric, projector_weight, random_code_word,
    random_product_state, rdm_zero_fidelity, row_major_order, sequential_projection_bound,
    state_overlap, syndrome_distribution, theorem2_certificate, Sigma, EPSILON_PRIME,
};
use stabgem_core::geometry::box_region;
use stabgem_core::io::{code_to_json, load_circuit, load_code};
use stabgem_core::logical::{correctability_witness, distance_bruteforce, mesh_logicals};
use stabgem_core::oracle::{MAX_MATRIX_QUBITS, MAX_PURE_QUBITS};
use stabgem_core::stats::{braiding_phase, exchange_phase, pauli_expectation};
use stabgem_core::synthesis::{
    build_braiding_triple, canonical_t_junction, t_junction_at, toric_braiding_pair,
    BraidingOptions,
};
use stabgem_core::{
    make_ghz_state, make_honeycomb_fermion, make_toric, symmetric_mixed_state, CliffordCircuit,
    DenseMixed, DenseState, Dress, Error, Expectation, Letter, MeshSpec, PauliOperator, Region,
    Result, StabilizerCode, StabilizerState,
};

use crate::output::Report;
use crate::{AnalyzeCmd, Cli, CodeArgs, CodeCmd, Command, Family, GemCmd, MeshArgs, OracleCmd};

/// Agreement required between the exact engine and the dense simulator.
const ORACLE_TOL: f64 = 1e-10;
/// Largest `n` for the `6ⁿ·2ⁿ` dense product scan.
const DENSE_SCAN_QUBITS: usize = 8;

pub fn run(cli: &Cli) -> Result<Report> {
    let g = &cli.global;
    let mut ctx = Ctx {
        rng: ChaCha8Rng::seed_from_u64(g.seed),
        oracle: g.oracle_check,
        radius: g.locality_radius,
    };
    let (name, params, (result, cert)) = match &cli.command {
        Command::Code(c) => match c {
            CodeCmd::Build(a) => {
                let code = build_code(a)?;
                let mut report = Report::new("code build", config(a, json!({})), Value::Null);
                report.raw = Some(code_to_json(&code)?);
                report.result = code_summary(&code);
                return Ok(with_globals(report, cli));
            }
            CodeCmd::Info(a) => ("code info", config(a, json!({})), plain(code_info(a)?)),
            CodeCmd::Check {
                code,
                verify_distance,
            } => (
                "code check",
                config(code, json!({ "verify_distance": verify_distance })),
                plain(code_check(code, *verify_distance)?),
            ),
        },
        Command::Analyze(c) => match c {
            AnalyzeCmd::Distance { code, max_weight } => (
                "analyze distance",
                config(code, json!({ "max_weight": max_weight })),
                plain(distance(code, *max_weight)?),
            ),
            AnalyzeCmd::Correctable {
                code,
                region,
                box_region,
            } => (
                "analyze correctable",
                config(code, json!({ "region": region, "box": box_region })),
                plain(correctable(code, region.as_deref(), box_region.as_deref())?),
            ),
            AnalyzeCmd::Mesh { code, mesh } => (
                "analyze mesh",
                config(code, mesh_config(mesh)),
                plain(mesh_report(code, mesh)?),
            ),
            AnalyzeCmd::Braiding {
                code,
                mesh,
                mesh_args,
            } => {
                let mut extra = mesh_config(mesh_args);
                extra["mesh"] = json!(mesh);
                (
                    "analyze braiding",
                    config(code, extra),
                    ctx.braiding(code, mesh.then_some(mesh_args))?,
                )
            }
            AnalyzeCmd::Exchange {
                code,
                junction,
                arms,
            } => (
                "analyze exchange",
                config(code, json!({ "junction": junction, "arms": arms })),
                ctx.exchange(code, junction.as_deref(), arms.as_deref())?,
            ),
        },
        Command::Gem(c) => match c {
            GemCmd::E0 { code, ascent } => (
                "gem e0",
                config(code, json!({ "ascent": ascent })),
                ctx.e0(code, *ascent)?,
            ),
            GemCmd::Ascend {
                code,
                t,
                restarts,
                iters,
            } => (
                "gem ascend",
                config(
                    code,
                    json!({ "t": t, "restarts": restarts, "iters": iters }),
                ),
                ctx.ascend(code, *t, *restarts, *iters)?,
            ),
            GemCmd::Certify { code, t, circuit } => (
                "gem certify",
                config(code, json!({ "t": t, "circuit": circuit })),
                ctx.certify(code, *t, circuit.as_deref())?,
            ),
            GemCmd::Theorem2 { code, t } => (
                "gem theorem2",
                config(code, json!({ "t": t })),
                certificate(theorem2_certificate(&build_code(code)?, *t)?),
            ),
            GemCmd::Sequential {
                code,
                patch_size,
                gap,
            } => (
                "gem sequential",
                config(code, json!({ "patch_size": patch_size, "gap": gap })),
                ctx.sequential(code, *patch_size, *gap)?,
            ),
            GemCmd::MixedBound { code, samples } => (
                "gem mixed-bound",
                config(code, json!({ "samples": samples })),
                ctx.mixed_bound(code, *samples)?,
            ),
        },
        Command::Oracle(OracleCmd::Crosscheck { cases, max_n }) => (
            "oracle crosscheck",
            json!({ "cases": cases, "max_n": max_n }),
            ctx.crosscheck(*cases, *max_n)?,
        ),
    };
    let failed = result
        .get("oracle")
        .and_then(|o| o.get("agree"))
        .and_then(Value::as_bool)
        == Some(false);
    let mut report = Report::new(name, params, result);
    report.certificate = cert;
    if failed {
        report.status = 3;
    }
    Ok(with_globals(report, cli))
}

type Outcome = (Value, Option<stabgem_core::GemCertificate>);

fn plain(v: Value) -> Outcome {
    (v, None)
}

fn certificate(cert: stabgem_core::GemCertificate) -> Outcome {
    let summary = json!({
        "construction": cert.provenance.construction,
        "code": cert.provenance.code,
        "n": cert.provenance.n,
        "t": cert.t,
        "m": cert.m,
        "epsilon_prime": cert.epsilon_prime,
        "bound_bits": cert.bound_bits,
        "alpha_effective": cert.alpha_effective,
    });
    (summary, Some(cert))
}

fn with_globals(mut report: Report, cli: &Cli) -> Report {
    let g = &cli.global;
    if let Value::Object(map) = &mut report.config {
        map.insert("seed".into(), json!(g.seed));
        map.insert("oracle_check".into(), json!(g.oracle_check));
        map.insert("locality_radius".into(), json!(g.locality_radius));
    }
    report
}

fn config(a: &CodeArgs, extra: Value) -> Value {
    let mut v = json!({
        "code": a.code.map(family_name),
        "file": a.file,
        "L": a.l,
        "Lx": a.lx,
        "Ly": a.ly,
        "n": a.n,
    });
    if let (Value::Object(map), Value::Object(more)) = (&mut v, extra) {
        map.extend(more);
    }
    v
}

fn mesh_config(m: &MeshArgs) -> Value {
    json!({
        "square_size": m.square_size,
        "separation": m.separation,
        "shift": m.shift,
        "t": m.t,
    })
}

fn family_name(f: Family) -> &'static str {
    match f {
        Family::Toric => "toric",
        Family::Honeycomb => "honeycomb",
        Family::Ghz => "ghz",
        Family::Trivial => "trivial",
    }
}

fn need(v: Option<usize>, flag: &str, family: &str) -> Result<usize> {
    v.ok_or_else(|| Error::Config(format!("--{flag} is required for --code {family}")))
}

fn build_code(a: &CodeArgs) -> Result<StabilizerCode> {
    if let Some(path) = &a.file {
        return load_code(path);
    }
    match a.code {
        Some(Family::Toric) => make_toric(need(a.l, "L", "toric")?),
        Some(Family::Honeycomb) => make_honeycomb_fermion(
            need(a.lx, "Lx", "honeycomb")?,
            need(a.ly, "Ly", "honeycomb")?,
        ),
        Some(Family::Trivial) => make_trivial_code(need(a.n, "n", "trivial")?),
        Some(Family::Ghz) => Err(Error::Config(
            "ghz is a state, not a code; use it with gem e0 or gem ascend".into(),
        )),
        None => Err(Error::Config("pass --code or --file".into())),
    }
}

fn exact_len<'a, T>(v: &'a [T], len: usize, flag: &str) -> Result<&'a [T]> {
    if v.len() == len {
        Ok(v)
    } else {
        Err(Error::Config(format!(
            "{flag} takes {len} comma-separated values"
        )))
    }
}

fn code_summary(code: &StabilizerCode) -> Value {
    json!({
        "name": code.name,
        "n": code.num_qubits(),
        "k": code.k(),
        "d": code.d(),
        "w": code.w(),
        "generators": code.generators().len(),
        "rank": code.rank(),
    })
}

fn code_info(a: &CodeArgs) -> Result<Value> {
    let code = build_code(a)?;
    let mut v = code_summary(&code);
    v["metadata"] = code.metadata.clone();
    Ok(v)
}

fn code_check(a: &CodeArgs, verify_distance: bool) -> Result<Value> {
    let mut code = build_code(a)?;
    let stated = code.d();
    let mut v = code_summary(&code);
    v["valid"] = json!(true);
    if verify_distance {
        let measured = distance_bruteforce(&code, None)?;
        if stated.is_some() && stated != measured {
            return Err(Error::Validation(format!(
                "stated distance {stated:?} but exhaustive search gives {measured:?}"
            )));
        }
        code.set_distance(measured);
        v["d"] = json!(measured);
        v["distance_verified"] = json!(true);
    }
    Ok(v)
}

fn distance(a: &CodeArgs, max_weight: Option<usize>) -> Result<Value> {
    let code = build_code(a)?;
    let d = distance_bruteforce(&code, max_weight)?;
    Ok(json!({
        "n": code.num_qubits(),
        "k": code.k(),
        "d": d,
        "max_weight": max_weight,
        // `None` under a weight cap only says that no logical is that light
        "exhaustive": max_weight.is_none(),
    }))
}

fn correctable(a: &CodeArgs, ids: Option<&[usize]>, bx: Option<&[f64]>) -> Result<Value> {
    let code = build_code(a)?;
    let n = code.num_qubits();
    let region = match (ids, bx) {
        (Some(ids), _) => {
            if let Some(&q) = ids.iter().find(|&&q| q >= n) {
                return Err(Error::Input(format!("qubit {q} is outside 0..{n}")));
            }
            Region::new(ids.iter().copied(), "R")
        }
        (None, Some(b)) => {
            let b = exact_len(b, 4, "--box")?;
            box_region(code.layout(), (b[0], b[1]), (b[2], b[3]), "R")
        }
        (None, None) => return Err(Error::Config("pass --region or --box".into())),
    };
    let witness = correctability_witness(&code, &region);
    Ok(json!({
        "region": region.qubits(),
        "size": region.len(),
        "correctable": witness.is_none(),
        "witness": witness.map(|w| w.to_string()),
    }))
}

fn mesh_specs(code: &StabilizerCode, m: &MeshArgs) -> Result<(MeshSpec, MeshSpec)> {
    let (size, sep) = match (m.square_size, m.separation) {
        (Some(a), Some(s)) => (a, s),
        (a, s) => {
            let c = mesh_constants(code, m.t)?;
            (a.unwrap_or(c.square_size), s.unwrap_or(c.separation))
        }
    };
    let shift = m.shift.unwrap_or(sep);
    let spec1 = MeshSpec::new(size, sep);
    Ok((spec1, spec1.shifted(shift, shift)))
}

fn mesh_report(a: &CodeArgs, m: &MeshArgs) -> Result<Value> {
    let code = build_code(a)?;
    let (s1, s2) = mesh_specs(&code, m)?;
    let rep = mesh_logicals(&code, &s1, &s2)?;
    Ok(json!({
        "specs": [s1, s2],
        "l1": rep.l1.to_string(),
        "l2": rep.l2.to_string(),
        "mesh1_size": rep.mesh1.len(),
        "mesh2_size": rep.mesh2.len(),
        "intersection_squares": rep.intersection_squares.iter().map(|r| r.qubits()).collect::<Vec<_>>(),
        "anticommuting": rep.anticommuting,
        "Q": rep.q.qubits(),
    }))
}

fn expectation_json(e: Expectation) -> Value {
    let v = e.value();
    if v.im == 0.0 {
        json!(v.re)
    } else {
        json!(e.to_string())
    }
}

/// Dense evaluation of `⟨ψ|word|ψ⟩` next to an exact value.
fn dense_word_check(
    state: &StabilizerState,
    word: &PauliOperator,
    exact: Expectation,
) -> Result<Value> {
    let n = state.num_qubits();
    if !state.is_pure() || n > MAX_PURE_QUBITS {
        return Ok(
            json!({ "checked": false, "reason": "state too large or mixed for the dense check" }),
        );
    }
    let psi = DenseState::from_stabilizer(state)?;
    let dense = psi.expectation(word)?;
    let dev = (dense - exact.value()).norm();
    Ok(json!({
        "checked": true,
        "dense": [dense.re, dense.im],
        "deviation": dev,
        "agree": dev <= ORACLE_TOL,
    }))
}

struct Ctx {
    rng: ChaCha8Rng,
    oracle: bool,
    radius: f64,
}

impl Ctx {
    /// Toric ground state, GHZ, or a seeded random code word of any other code.
    fn state(&mut self, a: &CodeArgs) -> Result<(StabilizerState, String)> {
        match (a.code, &a.file) {
            (Some(Family::Ghz), None) => {
                Ok((make_ghz_state(need(a.n, "n", "ghz")?)?, "ghz".into()))
            }
            (Some(Family::Toric), None) => Ok((
                toric_ground_state(need(a.l, "L", "toric")?)?,
                "ground state (all logical Z = +1)".into(),
            )),
            _ => {
                let code = build_code(a)?;
                Ok((
                    random_code_word(&code, &mut self.rng)?,
                    "random code word".into(),
                ))
            }
        }
    }

    fn braiding(&mut self, a: &CodeArgs, mesh: Option<&MeshArgs>) -> Result<Outcome> {
        let code = build_code(a)?;
        let (state, label) = self.state(a)?;
        let (open, closed, source) = match mesh {
            Some(m) => {
                let (s1, s2) = mesh_specs(&code, m)?;
                let rep = mesh_logicals(&code, &s1, &s2)?;
                let triple = build_braiding_triple(&code, &rep, BraidingOptions::default())?;
                triple.verify(&code.span())?;
                (triple.gamma2, triple.gamma1, "mesh intersection")
            }
            None => match code.metadata.get("L").and_then(Value::as_u64) {
                Some(l) => {
                    let (m, e) = toric_braiding_pair(l as usize);
                    (m, e, "canonical toric pair")
                }
                None => {
                    return Err(Error::Config(
                        "canonical pair exists only for toric codes; pass --mesh".into(),
                    ))
                }
            },
        };
        let phase = braiding_phase(&state, &open, &closed)?;
        let mut v = json!({
            "state": label,
            "source": source,
            "phase": expectation_json(phase),
            "open": open.to_string(),
            "loop": closed.to_string(),
        });
        if self.oracle {
            let mut word = open.dagger();
            word.mul_assign_right(&closed);
            word.mul_assign_right(&open);
            v["oracle"] = dense_word_check(&state, &word, phase)?;
        }
        Ok(plain(v))
    }

    fn exchange(
        &mut self,
        a: &CodeArgs,
        junction: Option<&[isize]>,
        arms: Option<&[usize]>,
    ) -> Result<Outcome> {
        let code = build_code(a)?;
        let triple = match (junction, arms) {
            (None, None) => canonical_t_junction(&code)?,
            (j, l) => {
                let j = exact_len(j.unwrap_or(&[1, 1]), 2, "--junction")?;
                let l = exact_len(l.unwrap_or(&[1, 2, 2]), 3, "--arms")?;
                t_junction_at(&code, j[0], j[1], [l[0], l[1], l[2]])?
            }
        };
        let (state, label) = self.state(a)?;
        let rep = exchange_phase(&state, &triple)?;
        let mut v = json!({
            "state": label,
            "phase": expectation_json(rep.phase),
            "parity_phase": expectation_json(Expectation(Some(rep.parity_phase))),
            "m1": triple.m1.to_string(),
            "m2": triple.m2.to_string(),
            "m3": triple.m3.to_string(),
            "junction": triple.junction,
        });
        if self.oracle {
            v["oracle"] = dense_word_check(&state, &rep.word, rep.phase)?;
        }
        Ok(plain(v))
    }

    fn e0(&mut self, a: &CodeArgs, ascent: bool) -> Result<Outcome> {
        let (state, label) = self.state(a)?;
        let n = state.num_qubits();
        let best = e0_product_pauli_bruteforce(&state)?;
        let mut v = json!({
            "state": label,
            "n": n,
            "e0": best.e0,
            "overlap": best.overlap,
            "axes": best.axes.iter().map(|l| l.as_char()).collect::<String>(),
            "signs": best.signs.iter().map(|&s| if s { '+' } else { '-' }).collect::<String>(),
        });
        if ascent {
            let psi = DenseState::from_stabilizer(&state)?;
            let asc = e0_alternating_ascent(
                &psi,
                AscentOptions {
                    seed: self.rng.gen(),
                    ..AscentOptions::default()
                },
            )?;
            v["ascent"] = json!({ "e0": asc.e0, "overlap": asc.overlap });
        }
        if self.oracle {
            v["oracle"] = if n <= DENSE_SCAN_QUBITS {
                let scan = e0_dense_pauli_scan(&DenseState::from_stabilizer(&state)?)?;
                let dev = (scan.overlap - best.overlap).abs();
                json!({ "checked": true, "dense": scan.overlap, "deviation": dev, "agree": dev <= ORACLE_TOL })
            } else {
                json!({ "checked": false, "reason": format!("dense product scan limited to n <= {DENSE_SCAN_QUBITS}") })
            };
        }
        Ok(plain(v))
    }

    fn ascend(
        &mut self,
        a: &CodeArgs,
        t: Option<usize>,
        restarts: Option<usize>,
        iters: Option<usize>,
    ) -> Result<Outcome> {
        let (state, label) = self.state(a)?;
        let psi = DenseState::from_stabilizer(&state)?;
        let seed: u64 = self.rng.gen();
        let v = match t {
            None => {
                let d = AscentOptions::default();
                let opts = AscentOptions {
                    restarts: restarts.unwrap_or(d.restarts),
                    iters: iters.unwrap_or(d.iters),
                    seed,
                    ..d
                };
                let r = e0_alternating_ascent(&psi, opts)?;
                json!({
                    "state": label,
                    "method": "product ascent",
                    "e0_upper": r.e0,
                    "overlap": r.overlap,
                    "restart_overlaps": r.restart_overlaps,
                })
            }
            Some(t) => {
                let d = CircuitAscentOptions::default();
                let opts = CircuitAscentOptions {
                    restarts: restarts.unwrap_or(d.restarts),
                    sweeps: iters.unwrap_or(d.sweeps),
                    ..d
                };
                let r = et_upper_via_circuit_ascent(&psi, t, seed, opts)?;
                json!({
                    "state": label,
                    "method": "circuit ascent",
                    "t": t,
                    "et_upper": r.et_upper,
                    "overlap": r.overlap,
                    "sweeps": r.sweeps,
                })
            }
        };
        Ok(plain(v))
    }

    fn certify(
        &mut self,
        a: &CodeArgs,
        t: usize,
        circuit: Option<&std::path::Path>,
    ) -> Result<Outcome> {
        let code = build_code(a)?;
        let circuit: Option<CliffordCircuit> = circuit
            .map(|p| load_circuit(p, Some(code.layout()), self.radius))
            .transpose()?;
        if let Some(c) = &circuit {
            if c.depth() > t {
                return Err(Error::Config(format!(
                    "circuit depth {} exceeds --t {t}",
                    c.depth()
                )));
            }
        }
        Ok(certificate(patch_certificate_toric(
            &code,
            t,
            circuit.as_ref(),
        )?))
    }

    fn sequential(&mut self, a: &CodeArgs, patch_size: f64, gap: f64) -> Result<Outcome> {
        let code = build_code(a)?;
        let state = random_code_word(&code, &mut self.rng)?;
        let (patches, witnesses) = honeycomb_patch_witnesses(&code, patch_size, gap)?;
        let order = row_major_order(code.layout(), &patches);
        let rep = sequential_projection_bound(&state, &patches, &order, &witnesses, true)?;
        let cap = (1.0 - EPSILON_PRIME).powi(rep.m as i32);
        let mut v = json!({
            "state": "random code word",
            "m": rep.m,
            "order": rep.order,
            "steps": rep.steps,
            "product": rep.product,
            "cap": cap,
            "bound_holds": rep.product <= cap,
        });
        if self.oracle {
            v["oracle"] = if state.num_qubits() <= MAX_PURE_QUBITS {
                let mut psi = DenseState::from_stabilizer(&state)?;
                let mut dev = 0.0f64;
                for (&j, &f) in rep.order.iter().zip(&rep.steps) {
                    let (p, next) = psi.project_zero(patches[j].qubits());
                    dev = dev.max((p - f).abs());
                    psi = next;
                }
                json!({ "checked": true, "deviation": dev, "agree": dev <= ORACLE_TOL })
            } else {
                json!({ "checked": false, "reason": "too many qubits for the dense check" })
            };
        }
        Ok(plain(v))
    }

    fn mixed_bound(&mut self, a: &CodeArgs, samples: usize) -> Result<Outcome> {
        let code = build_code(a)?;
        let n = code.num_qubits();
        let rho = symmetric_mixed_state(&code)?;
        let mut sigmas = vec![StabilizerState::zero(n)];
        for _ in 0..samples {
            sigmas.push(random_product_state(n, &mut self.rng)?);
        }
        let bounds: Vec<f64> = sigmas
            .iter()
            .map(|s| mixed_gem_syndrome_bound(&code, &rho, &Sigma::State(s.clone())))
            .collect::<Result<_>>()?;
        let dist = syndrome_distribution(&code, &sigmas[0])?;
        let mut v = json!({
            "n": n,
            "zero_state_bound": bounds[0],
            "max_bound": bounds.iter().copied().fold(0.0, f64::max),
            "bounds": bounds,
            "zero_state_syndromes": dist.support.len(),
        });
        if self.oracle {
            v["oracle"] = match DenseMixed::from_stabilizer(&rho) {
                Ok(dense) => {
                    let mut dev = (dist.all_plus_mass - bounds[0]).abs();
                    for (s, b) in sigmas.iter().zip(&bounds) {
                        let w = dense.projector_weight(&DenseState::from_stabilizer(s)?);
                        dev = dev.max((w - b).abs());
                    }
                    json!({ "checked": true, "deviation": dev, "agree": dev <= ORACLE_TOL })
                }
                Err(Error::Capability(reason)) => json!({ "checked": false, "reason": reason }),
                Err(e) => return Err(e),
            };
        }
        Ok(plain(v))
    }

    /// Random exact quantities against the dense simulator.
    fn crosscheck(&mut self, cases: usize, max_n: usize) -> Result<Outcome> {
        if !(2..=MAX_MATRIX_QUBITS).contains(&max_n) {
            return Err(Error::Config(format!(
                "--max-n must lie in 2..={MAX_MATRIX_QUBITS}"
            )));
        }
        let r = &mut self.rng;
        let mut worst = 0.0f64;
        let mut failures = Vec::new();
        for case in 0..cases {
            let n = r.gen_range(2..=max_n);
            let a = random_state(n, r)?;
            let psi = DenseState::from_stabilizer(&a)?;
            let (kind, got, want) = match case % 5 {
                0 => {
                    let p = random_pauli(n, r);
                    let v = pauli_expectation(&a, &p).value();
                    let d = psi.expectation(&p)?;
                    ("expectation", v.re + v.im, d.re + d.im)
                }
                1 => {
                    let b = random_state(n, r)?;
                    let phi = DenseState::from_stabilizer(&b)?;
                    (
                        "overlap",
                        state_overlap(&a, &b)?,
                        psi.overlap(&phi)?.norm_sqr(),
                    )
                }
                2 => {
                    let region = Region::new((0..n).filter(|_| r.gen_bool(0.5)), "R");
                    (
                        "zero_fidelity",
                        rdm_zero_fidelity(&a, &region),
                        psi.zero_probability(region.qubits()),
                    )
                }
                3 => {
                    let rho = drop_rows(&a, r)?;
                    let dense = DenseMixed::from_stabilizer(&rho)?;
                    let p = random_pauli(n, r);
                    let v = pauli_expectation(&rho, &p).value();
                    let d = dense.expectation(&p)?;
                    ("mixed_expectation", v.re + v.im, d.re + d.im)
                }
                _ => {
                    let rho = drop_rows(&a, r)?;
                    let dense = DenseMixed::from_stabilizer(&rho)?;
                    let s = random_product_state(n, r)?;
                    (
                        "projector_weight",
                        projector_weight(rho.group(), &s)?,
                        dense.projector_weight(&DenseState::from_stabilizer(&s)?),
                    )
                }
            };
            let dev = (got - want).abs();
            worst = worst.max(dev);
            if dev > ORACLE_TOL {
                failures.push(
                    json!({ "case": case, "kind": kind, "n": n, "exact": got, "dense": want }),
                );
            }
        }
        Ok(plain(json!({
            "cases": cases,
            "max_deviation": worst,
            "failures": failures,
            "oracle": { "checked": true, "agree": failures.is_empty() },
        })))
    }
}

fn random_state(n: usize, r: &mut ChaCha8Rng) -> Result<StabilizerState> {
    let circuit = CliffordCircuit::random_local_layers(&ghz_layout(n), 2 * n, n as f64, r);
    StabilizerState::zero(n).dress(&circuit)
}

fn random_pauli(n: usize, r: &mut ChaCha8Rng) -> PauliOperator {
    let letters = [Letter::X, Letter::Y, Letter::Z];
    let mut terms = Vec::new();
    for q in 0..n {
        if r.gen_bool(0.6) {
            terms.push((q, letters[r.gen_range(0..3)]));
        }
    }
    PauliOperator::from_sparse(n, terms)
}

fn drop_rows(state: &StabilizerState, r: &mut ChaCha8Rng) -> Result<StabilizerState> {
    let rows: Vec<PauliOperator> = state
        .group()
        .rows()
        .iter()
        .filter(|_| r.gen_bool(0.6))
        .cloned()
        .collect();
    StabilizerState::from_generators(state.num_qubits(), &rows)
}
