//! Truncated stabilizers, braiding triples, honeycomb strings and exchange junctions.

use serde::{Deserialize, Serialize};

use crate::codes::{HoneycombIndex, Link, StabilizerCode, ToricIndex};
use crate::error::{Error, Result};
use crate::geometry::{centroid, thicken, LatticeLayout, Region};
use crate::group::{clear_region, GeneratorSpan, Membership};
use crate::logical::MeshLogicalReport;
use crate::pauli::{Letter, PauliOperator};

/// Product of the generators in `s`'s decomposition that touch `region`.
pub fn truncate_stabilizer(
    code: &StabilizerCode,
    s: &PauliOperator,
    region: &Region,
) -> Result<PauliOperator> {
    truncate_with(&code.span(), s, region)
}

pub fn truncate_with(
    span: &GeneratorSpan,
    s: &PauliOperator,
    region: &Region,
) -> Result<PauliOperator> {
    let indices = match span.express(s) {
        Membership::Member(i) => i,
        Membership::UpToPhase { .. } => return Err(Error::NotInGroup { up_to_sign: true }),
        Membership::NotInSpan => return Err(Error::NotInGroup { up_to_sign: false }),
    };
    let n = span.num_qubits();
    let mask = region.mask(n);
    let kept: Vec<usize> = indices
        .into_iter()
        .filter(|&i| span.generators()[i].support().intersects(&mask))
        .collect();
    Ok(span.product(&kept))
}

#[derive(Clone, Debug, Default, PartialEq, Serialize, Deserialize)]
pub struct Provenance {
    pub steps: Vec<String>,
    pub radius: f64,
    /// Half-disk orientation used for the semicircular truncation.
    pub half_plane: String,
    /// Whether the first-choice orientation (upper half) was rejected.
    pub mirrored: bool,
    pub clamped: bool,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct BraidingTriple {
    pub gamma1: PauliOperator,
    pub gamma2: PauliOperator,
    pub gamma2p: PauliOperator,
    #[serde(rename = "Q")]
    pub q: Region,
    #[serde(rename = "Qup")]
    pub qup: Region,
    #[serde(rename = "Qup_prime")]
    pub qup_prime: Region,
    pub provenance: Provenance,
}

impl BraidingTriple {
    /// Checks the three defining relations against a stabilizer group.
    pub fn verify(&self, span: &GeneratorSpan) -> Result<()> {
        let fail = |step: &str, reason: &str| Error::Construction {
            step: step.into(),
            reason: reason.into(),
        };
        if !span.express(&self.gamma1).is_member() {
            return Err(fail("verify", "gamma1 is not a stabilizer with sign +1"));
        }
        let mut loop2 = self.gamma2.clone();
        loop2.mul_assign_right(&self.gamma2p);
        if !span.express(&loop2).is_member() {
            return Err(fail("verify", "gamma2 * gamma2' is not a stabilizer"));
        }
        if self.gamma1.commutes_unchecked(&self.gamma2) {
            return Err(fail("verify", "gamma1 commutes with gamma2"));
        }
        if self.gamma1.commutes_unchecked(&self.gamma2p) {
            return Err(fail("verify", "gamma1 commutes with gamma2'"));
        }
        Ok(())
    }

    /// Conjugate every operator by a circuit (regions are kept).
    pub fn dressed(&self, circuit: &crate::clifford::CliffordCircuit) -> BraidingTriple {
        let mut t = self.clone();
        t.gamma1 = circuit.conjugate(&self.gamma1);
        t.gamma2 = circuit.conjugate(&self.gamma2);
        t.gamma2p = circuit.conjugate(&self.gamma2p);
        t.provenance
            .steps
            .push(format!("dressed by depth-{} circuit", circuit.depth()));
        t
    }
}

#[derive(Clone, Copy, Debug)]
pub struct BraidingOptions {
    /// Disk radius in units of the generator diameter `w`.
    pub radius_factor: f64,
}

impl Default for BraidingOptions {
    fn default() -> Self {
        Self { radius_factor: 3.0 }
    }
}

#[derive(Clone, Copy, Debug, PartialEq)]
enum Side {
    Up,
    Down,
    Right,
    Left,
}

impl Side {
    fn name(self) -> &'static str {
        match self {
            Side::Up => "upper",
            Side::Down => "lower",
            Side::Right => "right",
            Side::Left => "left",
        }
    }
}

/// Part of `disk` on one side of the line through `Q`'s bounding box edge, `Q` included.
fn half_disk(layout: &LatticeLayout, disk: &Region, q: &Region, side: Side) -> Region {
    let c = centroid(layout, q).expect("Q is nonempty");
    let rel = |p: usize| layout.displacement(c, layout.position(p));
    let (mut lo_x, mut hi_x, mut lo_y, mut hi_y) = (
        f64::INFINITY,
        f64::NEG_INFINITY,
        f64::INFINITY,
        f64::NEG_INFINITY,
    );
    for p in q.iter() {
        let (dx, dy) = rel(p);
        lo_x = lo_x.min(dx);
        hi_x = hi_x.max(dx);
        lo_y = lo_y.min(dy);
        hi_y = hi_y.max(dy);
    }
    let keep = |p: usize| {
        let (dx, dy) = rel(p);
        match side {
            Side::Up => dy >= lo_y - 1e-9,
            Side::Down => dy <= hi_y + 1e-9,
            Side::Right => dx >= lo_x - 1e-9,
            Side::Left => dx <= hi_x + 1e-9,
        }
    };
    Region::new(
        disk.iter().filter(|&p| keep(p)),
        format!("half-disk ({})", side.name()),
    )
}

fn odd_on(sites: &crate::bits::BitVec, region: &Region) -> bool {
    region.iter().filter(|&q| sites.get(q)).count() % 2 == 1
}

/// Build `(γ₁, γ₂, γ₂′)` around the square `Q` of a mesh report.
pub fn build_braiding_triple(
    code: &StabilizerCode,
    report: &MeshLogicalReport,
    opts: BraidingOptions,
) -> Result<BraidingTriple> {
    let layout = code.layout();
    let n = code.num_qubits();
    let w = code.w();
    let r = opts.radius_factor * w;
    let span = code.span();
    let gens = code.generators();
    let q = &report.q;
    let mut prov = Provenance {
        radius: r,
        ..Default::default()
    };
    let step_err = |step: &str, reason: String| Error::Construction {
        step: step.into(),
        reason,
    };

    // (1) clean ℓ₁ off the squares and a neighbourhood of Q
    let q_thick = thicken(layout, q, w);
    let forbidden1 = report.squares1.union(&q_thick);
    let l1p = clear_region(n, gens, &report.l1, &forbidden1.mask(n)).ok_or_else(|| {
        Error::Feasibility(
            "deformed first mesh: squares plus Q neighbourhood are not correctable".into(),
        )
    })?;
    prov.steps.push(format!(
        "cleaned l1 off {} qubits around Q",
        forbidden1.len()
    ));

    // (2) S = ℓ₁ℓ₁′ is a stabilizer; cut it down to a disk around Q
    let mut s = report.l1.clone();
    s.mul_assign_right(&l1p);
    let disk = thicken(layout, q, r).with_label("disk");
    let gamma_disk = truncate_with(&span, &s, &disk)?;
    let l2 = &report.l2;
    if !odd_on(&gamma_disk.anticommuting_sites(l2), q) {
        return Err(step_err(
            "truncate-disk",
            "truncated loop does not anticommute with l2 on Q".into(),
        ));
    }
    prov.steps.push(format!(
        "truncated S to disk of radius {r} ({} qubits)",
        disk.len()
    ));

    // (3) semicircle: keep one half of the disk so the loop meets l2 once more, away from Q
    let mut chosen = None;
    for (i, side) in [Side::Up, Side::Down, Side::Right, Side::Left]
        .into_iter()
        .enumerate()
    {
        let half = half_disk(layout, &disk, q, side);
        let g = truncate_with(&span, &gamma_disk, &half)?;
        let sites = g.anticommuting_sites(l2);
        if !odd_on(&sites, q) {
            continue;
        }
        let others = Region::new(sites.iter_ones().filter(|&p| !q.contains(p)), "Qup");
        if others.is_empty() || layout.region_distance(&others, q) <= w {
            continue;
        }
        prov.mirrored = i > 0;
        prov.half_plane = side.name().to_string();
        chosen = Some((g, others));
        break;
    }
    let (gamma1, qup_sites) = chosen.ok_or_else(|| {
        step_err(
            "semicircle",
            "no half-disk leaves a second crossing apart from Q".into(),
        )
    })?;
    prov.steps.push(format!(
        "semicircular truncation on the {} side",
        prov.half_plane
    ));

    // (4) region around the second crossing
    let d_region = thicken(layout, &qup_sites, w).difference(q).with_label("D");

    // (5) loop S₂ from cleaning ℓ₂ off D, truncated near D
    let forbidden2 = report.squares2.union(&d_region);
    let l2p = clear_region(n, gens, l2, &forbidden2.mask(n)).ok_or_else(|| {
        Error::Feasibility("deformed second mesh: squares plus D are not correctable".into())
    })?;
    let mut s2 = l2.clone();
    s2.mul_assign_right(&l2p);
    let s2t = truncate_with(&span, &s2, &thicken(layout, &d_region, r))?;
    prov.steps.push(format!(
        "built S2 from l2 cleaned off {} qubits",
        forbidden2.len()
    ));

    // (6) split S₂ at D
    let dmask = d_region.mask(n);
    let gamma2 = s2t.restrict(&dmask);
    let gamma2p = s2t.restrict(&dmask.not()).with_phase(s2t.phase());
    if gamma2.is_identity_up_to_phase() || gamma2p.is_identity_up_to_phase() {
        return Err(step_err(
            "split",
            "S2 does not reach both sides of D".into(),
        ));
    }
    prov.steps
        .push("split S2 into gamma2 on D and gamma2' elsewhere".into());

    let qup = Region::new(gamma1.anticommuting_sites(&gamma2).iter_ones(), "Qup");
    let qup_prime = Region::new(gamma1.anticommuting_sites(&gamma2p).iter_ones(), "Qup'");
    let triple = BraidingTriple {
        gamma1,
        gamma2,
        gamma2p,
        q: q.clone(),
        qup,
        qup_prime,
        provenance: prov,
    };
    triple.verify(&span)?;
    Ok(triple)
}

/// Plaquette loop and a star split into one shared edge and the rest,
/// placed at the first plaquette whose neighbourhood fits in `region`.
pub fn toric_local_triple(code: &StabilizerCode, region: &Region) -> Option<BraidingTriple> {
    let l = code.metadata.get("L")?.as_u64()? as usize;
    let idx = ToricIndex { l };
    let n = idx.n();
    for y in 0..l as isize {
        for x in 0..l as isize {
            let plaq = idx.plaquette(x, y);
            let star = idx.star(x + 1, y + 1);
            if !plaq.iter().chain(star.iter()).all(|&q| region.contains(q)) {
                continue;
            }
            let shared = idx.h(x, y + 1);
            let gamma1 = PauliOperator::uniform(n, plaq, Letter::Z);
            let gamma2 = PauliOperator::single(n, shared, Letter::X);
            let gamma2p =
                PauliOperator::uniform(n, star.into_iter().filter(|&q| q != shared), Letter::X);
            let qup = Region::new([shared], "Qup");
            let qup_prime = Region::new([idx.v(x + 1, y)], "Qup'");
            return Some(BraidingTriple {
                gamma1,
                gamma2,
                gamma2p,
                q: Region::new(plaq, "Q"),
                qup,
                qup_prime,
                provenance: Provenance {
                    steps: vec![format!(
                        "plaquette ({x},{y}) with star ({},{})",
                        x + 1,
                        y + 1
                    )],
                    radius: 0.0,
                    half_plane: String::new(),
                    mirrored: false,
                    clamped: false,
                },
            });
        }
    }
    None
}

/// Crossing pair on the toric code: a Z loop around a block of plaquettes and
/// an open X string on the dual lattice leaving the block once.
pub fn toric_braiding_pair(l: usize) -> (PauliOperator, PauliOperator) {
    let idx = ToricIndex { l };
    let n = idx.n();
    let b = (l / 2).max(1) as isize;
    let mut gamma_e = PauliOperator::identity(n);
    for y in 0..b {
        for x in 0..b {
            gamma_e.mul_assign_right(&PauliOperator::uniform(n, idx.plaquette(x, y), Letter::Z));
        }
    }
    // dual string from plaquette (b−1, 0) inside the block to plaquette (l−1, 0)
    let gamma_m = PauliOperator::uniform(n, (b..l as isize).map(|x| idx.v(x, 0)), Letter::X);
    (gamma_m, gamma_e)
}

/// Endpoints of a link sequence: vertices touched an odd number of times.
pub fn path_endpoints(links: &[Link]) -> Vec<usize> {
    let mut count = std::collections::BTreeMap::new();
    for l in links {
        *count.entry(l.a).or_insert(0usize) += 1;
        *count.entry(l.b).or_insert(0usize) += 1;
    }
    count
        .into_iter()
        .filter(|(_, c)| c % 2 == 1)
        .map(|(v, _)| v)
        .collect()
}

impl HoneycombIndex {
    pub fn link_between(&self, a: usize, b: usize) -> Option<Link> {
        let (i, j) = self.coords(a);
        let mut cands = vec![self.horizontal(i, j), self.horizontal(i - 1, j)];
        cands.extend(self.vertical(i, j));
        cands.extend(self.vertical(i, j - 1));
        cands
            .into_iter()
            .find(|l| (l.a == a && l.b == b) || (l.a == b && l.b == a))
    }

    /// Links along a vertex sequence.
    pub fn path(&self, vertices: &[usize]) -> Result<Vec<Link>> {
        vertices
            .windows(2)
            .map(|w| {
                self.link_between(w[0], w[1]).ok_or_else(|| {
                    Error::Input(format!("vertices {} and {} are not linked", w[0], w[1]))
                })
            })
            .collect()
    }
}

fn honeycomb_index(code: &StabilizerCode) -> Result<HoneycombIndex> {
    let meta = &code.metadata;
    match (
        meta.get("family").and_then(|f| f.as_str()),
        meta.get("Lx"),
        meta.get("Ly"),
    ) {
        (Some("honeycomb"), Some(lx), Some(ly)) => Ok(HoneycombIndex {
            lx: lx.as_u64().unwrap_or(0) as usize,
            ly: ly.as_u64().unwrap_or(0) as usize,
        }),
        _ => Err(Error::Input("code is not a built-in honeycomb".into())),
    }
}

/// Ordered product of two-body link operators along a connected path.
pub fn honeycomb_string(code: &StabilizerCode, path: &[Link]) -> Result<PauliOperator> {
    for (k, w) in path.windows(2).enumerate() {
        let shared = [w[0].a, w[0].b]
            .iter()
            .any(|v| *v == w[1].a || *v == w[1].b);
        if !shared {
            return Err(Error::Input(format!(
                "path is disconnected between links {k} and {}",
                k + 1
            )));
        }
    }
    let op = crate::codes::link_product(code.num_qubits(), path);
    if !code.is_logical_or_stabilizer(&op) {
        return Err(Error::Internal(
            "string operator fails to commute with the hexagons".into(),
        ));
    }
    Ok(op)
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ExchangeTriple {
    pub m1: PauliOperator,
    pub m2: PauliOperator,
    pub m3: PauliOperator,
    pub junction: usize,
    /// Far ends of the three arms (`A`, `C`, `D`) and the junction (`B`).
    pub endpoints: ExchangeRegions,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ExchangeRegions {
    #[serde(rename = "A")]
    pub a: Region,
    #[serde(rename = "B")]
    pub b: Region,
    #[serde(rename = "C")]
    pub c: Region,
    #[serde(rename = "D")]
    pub d: Region,
}

impl ExchangeTriple {
    pub fn support(&self) -> Region {
        let mut s = self.m1.support();
        s.or_assign(&self.m2.support());
        s.or_assign(&self.m3.support());
        Region::from_mask(&s, "junction support")
    }
}

/// Three strings leaving `junction` along vertex paths (each starting at the junction).
pub fn exchange_triple(
    code: &StabilizerCode,
    junction: usize,
    arms: [&[usize]; 3],
) -> Result<ExchangeTriple> {
    let idx = honeycomb_index(code)?;
    let mut seen = std::collections::HashSet::new();
    for arm in arms {
        if arm.first() != Some(&junction) || arm.len() < 2 {
            return Err(Error::Input(
                "each arm must start at the junction and contain a link".into(),
            ));
        }
        for &v in &arm[1..] {
            if !seen.insert(v) || v == junction {
                return Err(Error::Input(format!("arms overlap at vertex {v}")));
            }
        }
    }
    let ms: Vec<PauliOperator> = arms
        .iter()
        .map(|arm| honeycomb_string(code, &idx.path(arm)?))
        .collect::<Result<_>>()?;
    for i in 0..3 {
        for j in i + 1..3 {
            if ms[i].commutes_unchecked(&ms[j]) {
                return Err(Error::Construction {
                    step: "exchange".into(),
                    reason: format!("arms {} and {} commute", i + 1, j + 1),
                });
            }
        }
    }
    let end = |arm: &[usize], label: &str| Region::new([*arm.last().expect("nonempty")], label);
    Ok(ExchangeTriple {
        m1: ms[0].clone(),
        m2: ms[1].clone(),
        m3: ms[2].clone(),
        junction,
        endpoints: ExchangeRegions {
            a: end(arms[0], "A"),
            b: Region::new([junction], "B"),
            c: end(arms[1], "C"),
            d: end(arms[2], "D"),
        },
    })
}

/// T-junction at vertex `(i, j)` (even `i + j`): one arm left, two links right, two links up.
pub fn canonical_t_junction(code: &StabilizerCode) -> Result<ExchangeTriple> {
    t_junction_at(code, 1, 1, [1, 2, 2])
}

/// T-junction at `(i, j)` with even `i + j` and the given arm lengths (left, right, up).
pub fn t_junction_at(
    code: &StabilizerCode,
    i: isize,
    j: isize,
    lengths: [usize; 3],
) -> Result<ExchangeTriple> {
    let idx = honeycomb_index(code)?;
    if (i + j).rem_euclid(2) != 0 {
        return Err(Error::Input(
            "junction needs even i + j so that it has an upward link".into(),
        ));
    }
    let v = |a: isize, b: isize| idx.vertex(a, b);
    let left: Vec<usize> = (0..=lengths[0] as isize).map(|s| v(i - s, j)).collect();
    let right: Vec<usize> = (0..=lengths[1] as isize).map(|s| v(i + s, j)).collect();
    // up: one vertical link, then continue to the right
    let mut up = vec![v(i, j)];
    if lengths[2] >= 1 {
        up.push(v(i, j + 1));
    }
    for s in 1..lengths[2] as isize {
        up.push(v(i + s, j + 1));
    }
    exchange_triple(code, v(i, j), [&left, &right, &up])
}

/// `γ · g` for a stabilizer element `g`, avoiding `forbidden`.
pub fn deform_string(
    code: &StabilizerCode,
    gamma: &PauliOperator,
    forbidden: &Region,
) -> Result<PauliOperator> {
    let n = code.num_qubits();
    clear_region(n, code.generators(), gamma, &forbidden.mask(n))
        .ok_or(Error::DeformationInfeasible)
}
