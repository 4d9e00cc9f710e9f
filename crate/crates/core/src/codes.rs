//! Built-in code families and stabilizer states.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::geometry::LatticeLayout;
use crate::group::{pauli_rank, GeneratorSpan, GroupBasis};
use crate::pauli::{Letter, PauliOperator, Phase};

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct CodeParams {
    pub k: usize,
    pub d: Option<usize>,
    /// Largest support diameter among the generators.
    pub w: f64,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct StabilizerCode {
    pub name: String,
    n: usize,
    generators: Vec<PauliOperator>,
    layout: LatticeLayout,
    params: CodeParams,
    #[serde(default)]
    pub metadata: serde_json::Value,
}

impl StabilizerCode {
    /// Validates lengths and commutation, then derives `k` and `w`.
    pub fn new(
        name: impl Into<String>,
        generators: Vec<PauliOperator>,
        layout: LatticeLayout,
        d: Option<usize>,
    ) -> Result<Self> {
        let n = layout.num_qubits();
        for (i, g) in generators.iter().enumerate() {
            if g.num_qubits() != n {
                return Err(Error::Validation(format!(
                    "generator {i} has {} qubits, layout has {n}",
                    g.num_qubits()
                )));
            }
            if !g.is_hermitian() {
                return Err(Error::Validation(format!(
                    "generator {i} has an imaginary phase"
                )));
            }
        }
        for i in 0..generators.len() {
            for j in i + 1..generators.len() {
                if !generators[i].commutes_unchecked(&generators[j]) {
                    return Err(Error::AnticommutingGenerators(i, j));
                }
            }
        }
        let k = n - pauli_rank(n, &generators);
        let w = generators
            .iter()
            .map(|g| layout.diameter(&g.support_indices()))
            .fold(0.0, f64::max);
        Ok(Self {
            name: name.into(),
            n,
            generators,
            layout,
            params: CodeParams { k, d, w },
            metadata: serde_json::Value::Null,
        })
    }

    pub fn num_qubits(&self) -> usize {
        self.n
    }

    pub fn generators(&self) -> &[PauliOperator] {
        &self.generators
    }

    pub fn layout(&self) -> &LatticeLayout {
        &self.layout
    }

    pub fn params(&self) -> &CodeParams {
        &self.params
    }

    pub fn k(&self) -> usize {
        self.params.k
    }

    pub fn d(&self) -> Option<usize> {
        self.params.d
    }

    pub fn w(&self) -> f64 {
        self.params.w
    }

    pub fn rank(&self) -> usize {
        self.n - self.params.k
    }

    pub fn set_distance(&mut self, d: Option<usize>) {
        self.params.d = d;
    }

    pub fn group(&self) -> GroupBasis {
        GroupBasis::from_generators(self.n, &self.generators)
    }

    pub fn span(&self) -> GeneratorSpan {
        GeneratorSpan::new(self.n, &self.generators)
    }

    /// Does `p` commute with every generator?
    pub fn is_logical_or_stabilizer(&self, p: &PauliOperator) -> bool {
        self.generators.iter().all(|g| g.commutes_unchecked(p))
    }
}

/// Qubit ids of the toric code: horizontal edge `h(x, y)` and vertical edge `v(x, y)`.
#[derive(Clone, Copy, Debug)]
pub struct ToricIndex {
    pub l: usize,
}

impl ToricIndex {
    pub fn h(&self, x: isize, y: isize) -> usize {
        let l = self.l as isize;
        2 * (y.rem_euclid(l) * l + x.rem_euclid(l)) as usize
    }

    pub fn v(&self, x: isize, y: isize) -> usize {
        self.h(x, y) + 1
    }

    /// Edges of the X-type star on vertex `(x, y)`.
    pub fn star(&self, x: isize, y: isize) -> [usize; 4] {
        [
            self.h(x, y),
            self.h(x - 1, y),
            self.v(x, y),
            self.v(x, y - 1),
        ]
    }

    /// Edges of the Z-type plaquette with lower-left vertex `(x, y)`.
    pub fn plaquette(&self, x: isize, y: isize) -> [usize; 4] {
        [
            self.h(x, y),
            self.h(x, y + 1),
            self.v(x, y),
            self.v(x + 1, y),
        ]
    }

    pub fn n(&self) -> usize {
        2 * self.l * self.l
    }
}

/// Toric code on an `L × L` torus.
///
/// Coordinates use half-edge units: vertices sit at even points `(2x, 2y)`,
/// so horizontal edges are at `(2x+1, 2y)` and vertical edges at `(2x, 2y+1)`,
/// with periods `(2L, 2L)`. Generators are all stars followed by all plaquettes.
pub fn make_toric(l: usize) -> Result<StabilizerCode> {
    if l < 2 {
        return Err(Error::Config(format!("toric code needs L >= 2, got {l}")));
    }
    let idx = ToricIndex { l };
    let n = idx.n();
    let mut positions = vec![(0.0, 0.0); n];
    for y in 0..l {
        for x in 0..l {
            positions[idx.h(x as isize, y as isize)] = ((2 * x + 1) as f64, (2 * y) as f64);
            positions[idx.v(x as isize, y as isize)] = ((2 * x) as f64, (2 * y + 1) as f64);
        }
    }
    let period = (2 * l) as f64;
    let layout = LatticeLayout::new(positions, Some((period, period)))?;
    let mut gens = Vec::with_capacity(n);
    for y in 0..l as isize {
        for x in 0..l as isize {
            gens.push(PauliOperator::uniform(n, idx.star(x, y), Letter::X));
        }
    }
    for y in 0..l as isize {
        for x in 0..l as isize {
            gens.push(PauliOperator::uniform(n, idx.plaquette(x, y), Letter::Z));
        }
    }
    let mut code = StabilizerCode::new(format!("toric-L{l}"), gens, layout, Some(l))?;
    code.metadata = serde_json::json!({ "family": "toric", "L": l, "lattice_spacing": 2.0 });
    Ok(code)
}

/// The four noncontractible loops: `[Z row, X column on h-edges, Z column, X row on v-edges]`.
/// Pairs `(0, 1)` and `(2, 3)` anticommute; all other pairs commute.
pub fn toric_logicals(l: usize) -> [PauliOperator; 4] {
    let idx = ToricIndex { l };
    let n = idx.n();
    let li = l as isize;
    [
        PauliOperator::uniform(n, (0..li).map(|x| idx.h(x, 0)), Letter::Z),
        PauliOperator::uniform(n, (0..li).map(|y| idx.h(0, y)), Letter::X),
        PauliOperator::uniform(n, (0..li).map(|y| idx.v(0, y)), Letter::Z),
        PauliOperator::uniform(n, (0..li).map(|x| idx.v(x, 0)), Letter::X),
    ]
}

/// Ground state fixed by all toric generators and both Z loops: the equal
/// superposition of every star product applied to `|0…0⟩` (closed loops on the dual lattice).
pub fn toric_ground_state(l: usize) -> Result<StabilizerState> {
    let code = make_toric(l)?;
    let [zr, _, zc, _] = toric_logicals(l);
    let mut gens = code.generators().to_vec();
    gens.push(zr);
    gens.push(zc);
    StabilizerState::from_generators(code.num_qubits(), &gens)
}

/// Vertex and link bookkeeping for the brick-wall honeycomb.
#[derive(Clone, Copy, Debug)]
pub struct HoneycombIndex {
    pub lx: usize,
    pub ly: usize,
}

/// A two-body link: endpoints and the Pauli letter it carries.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct Link {
    pub a: usize,
    pub b: usize,
    pub letter: Letter,
}

impl HoneycombIndex {
    pub fn vertex(&self, i: isize, j: isize) -> usize {
        (j.rem_euclid(self.ly as isize) as usize) * self.lx
            + i.rem_euclid(self.lx as isize) as usize
    }

    pub fn coords(&self, q: usize) -> (isize, isize) {
        ((q % self.lx) as isize, (q / self.lx) as isize)
    }

    pub fn n(&self) -> usize {
        self.lx * self.ly
    }

    /// Horizontal link from `(i, j)` to `(i+1, j)`.
    pub fn horizontal(&self, i: isize, j: isize) -> Link {
        let letter = if (i + j).rem_euclid(2) == 0 {
            Letter::X
        } else {
            Letter::Y
        };
        Link {
            a: self.vertex(i, j),
            b: self.vertex(i + 1, j),
            letter,
        }
    }

    /// Vertical Z link from `(i, j)` to `(i, j+1)`; only exists for even `i + j`.
    pub fn vertical(&self, i: isize, j: isize) -> Option<Link> {
        ((i + j).rem_euclid(2) == 0).then(|| Link {
            a: self.vertex(i, j),
            b: self.vertex(i, j + 1),
            letter: Letter::Z,
        })
    }

    /// All links, horizontal ones first, each in row-major order.
    pub fn links(&self) -> Vec<Link> {
        let mut out = Vec::new();
        for j in 0..self.ly as isize {
            for i in 0..self.lx as isize {
                out.push(self.horizontal(i, j));
            }
        }
        for j in 0..self.ly as isize {
            for i in 0..self.lx as isize {
                out.extend(self.vertical(i, j));
            }
        }
        out
    }

    /// The six boundary links of the hexagon anchored at `(i, j)` (even `i + j`), in cyclic order.
    pub fn hexagon_links(&self, i: isize, j: isize) -> [Link; 6] {
        [
            self.horizontal(i, j),
            self.horizontal(i + 1, j),
            self.vertical(i + 2, j).expect("even anchor"),
            self.horizontal(i + 1, j + 1),
            self.horizontal(i, j + 1),
            self.vertical(i, j).expect("even anchor"),
        ]
    }

    pub fn hexagon_anchors(&self) -> Vec<(isize, isize)> {
        let mut out = Vec::new();
        for j in 0..self.ly as isize {
            for i in 0..self.lx as isize {
                if (i + j) % 2 == 0 {
                    out.push((i, j));
                }
            }
        }
        out
    }
}

impl Link {
    pub fn operator(&self, n: usize) -> PauliOperator {
        if self.a == self.b {
            return PauliOperator::identity(n);
        }
        PauliOperator::uniform(n, [self.a, self.b], self.letter)
    }
}

/// Ordered product of link operators.
pub fn link_product(n: usize, links: &[Link]) -> PauliOperator {
    let mut acc = PauliOperator::identity(n);
    for l in links {
        acc.mul_assign_right(&l.operator(n));
    }
    acc
}

/// Stabilizer of a single hexagon: the cyclic product of its six links.
pub fn hexagon_stabilizer(idx: &HoneycombIndex, i: isize, j: isize) -> PauliOperator {
    link_product(idx.n(), &idx.hexagon_links(i, j))
}

/// Fermionic honeycomb code on an `Lx × Ly` brick-wall torus (both even,
/// `Lx ≥ 4`; at `Lx = 2` a row's left and right links land on the same pair).
///
/// Vertex `(i, j)` has id `j·Lx + i` and sits at `(i, j)`. Horizontal links
/// carry X when `i + j` is even and Y otherwise; vertical Z links leave
/// vertices with even `i + j` upward. Each hexagon stabilizer equals the
/// ordered product of its six links, giving letters `Y Z X Y Z X` around it.
pub fn make_honeycomb_fermion(lx: usize, ly: usize) -> Result<StabilizerCode> {
    if lx < 4 || ly < 2 || lx % 2 == 1 || ly % 2 == 1 {
        return Err(Error::Config(format!(
            "honeycomb torus needs even Lx >= 4 and even Ly >= 2, got {lx}x{ly}"
        )));
    }
    let idx = HoneycombIndex { lx, ly };
    let n = idx.n();
    let positions = (0..n).map(|q| ((q % lx) as f64, (q / lx) as f64)).collect();
    let layout = LatticeLayout::new(positions, Some((lx as f64, ly as f64)))?;
    let gens: Vec<PauliOperator> = idx
        .hexagon_anchors()
        .into_iter()
        .map(|(i, j)| hexagon_stabilizer(&idx, i, j))
        .collect();
    let mut code = StabilizerCode::new(format!("honeycomb-{lx}x{ly}"), gens, layout, Some(2))?;
    code.metadata =
        serde_json::json!({ "family": "honeycomb", "Lx": lx, "Ly": ly, "lattice_spacing": 1.0 });
    Ok(code)
}

/// `n` qubits on a line with one Z per site: `k = 0`.
pub fn make_trivial_code(n: usize) -> Result<StabilizerCode> {
    let positions = (0..n).map(|q| (q as f64, 0.0)).collect();
    let layout = LatticeLayout::new(positions, None)?;
    let gens = (0..n)
        .map(|q| PauliOperator::single(n, q, Letter::Z))
        .collect();
    StabilizerCode::new(format!("trivial-{n}"), gens, layout, None)
}

/// Stabilizer state, pure when the group has full rank and otherwise the
/// normalized projector onto the group's joint `+1` eigenspace.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct StabilizerState {
    group: GroupBasis,
}

pub type MixedStabilizerState = StabilizerState;

impl StabilizerState {
    pub fn from_generators(n: usize, gens: &[PauliOperator]) -> Result<Self> {
        for (i, g) in gens.iter().enumerate() {
            if g.num_qubits() != n {
                return Err(Error::LengthMismatch(g.num_qubits(), n));
            }
            if !g.is_hermitian() {
                return Err(Error::Input(format!("generator {i} is not Hermitian")));
            }
        }
        for i in 0..gens.len() {
            for j in i + 1..gens.len() {
                if !gens[i].commutes_unchecked(&gens[j]) {
                    return Err(Error::AnticommutingGenerators(i, j));
                }
            }
        }
        let group = GroupBasis::from_generators(n, gens);
        let group = Self::check_consistent(n, group, gens)?;
        Ok(Self { group })
    }

    fn check_consistent(n: usize, group: GroupBasis, gens: &[PauliOperator]) -> Result<GroupBasis> {
        let span = group.span();
        for (i, g) in gens.iter().enumerate() {
            if !span.express(g).is_member() {
                return Err(Error::Input(format!(
                    "generator {i} contradicts the signs of the others; the state is empty"
                )));
            }
        }
        debug_assert_eq!(group.num_qubits(), n);
        Ok(group)
    }

    pub fn from_group(group: GroupBasis) -> Self {
        Self { group }
    }

    /// `|0…0⟩`.
    pub fn zero(n: usize) -> Self {
        let rows = (0..n)
            .map(|q| PauliOperator::single(n, q, Letter::Z))
            .collect();
        Self {
            group: GroupBasis::new(n, rows).expect("independent"),
        }
    }

    /// Product of single-qubit Pauli eigenstates: qubit `j` is the `signs[j]`
    /// eigenstate of `axes[j]`.
    pub fn product(axes: &[Letter], signs: &[bool]) -> Result<Self> {
        let n = axes.len();
        if signs.len() != n || axes.contains(&Letter::I) {
            return Err(Error::Input(
                "product state needs one non-identity axis and sign per qubit".into(),
            ));
        }
        let rows = axes
            .iter()
            .zip(signs)
            .enumerate()
            .map(|(q, (&a, &plus))| {
                PauliOperator::single(n, q, a).with_phase(if plus {
                    Phase::ONE
                } else {
                    Phase::MINUS_ONE
                })
            })
            .collect();
        Ok(Self {
            group: GroupBasis::new(n, rows)?,
        })
    }

    /// Maximally mixed state on the code space.
    pub fn maximally_mixed_code(code: &StabilizerCode) -> Result<Self> {
        Self::from_generators(code.num_qubits(), code.generators())
    }

    pub fn num_qubits(&self) -> usize {
        self.group.num_qubits()
    }

    pub fn group(&self) -> &GroupBasis {
        &self.group
    }

    pub fn rank(&self) -> usize {
        self.group.rank()
    }

    pub fn is_pure(&self) -> bool {
        self.rank() == self.num_qubits()
    }

    /// `2^(r−n)`, the prefactor in `ρ = 2^(r−n) ∏ (I+g)/2`.
    pub fn normalization(&self) -> f64 {
        (2f64).powi(self.rank() as i32 - self.num_qubits() as i32)
    }

    /// `Tr ρ² = 2^(r−n)`.
    pub fn purity(&self) -> f64 {
        self.normalization()
    }

    /// Measure the Hermitian Pauli `p` and keep the `+1` branch: returns the
    /// outcome probability and the post-measurement state (`None` if impossible).
    pub fn postselect(&self, p: &PauliOperator) -> Result<(f64, Option<StabilizerState>)> {
        let n = self.num_qubits();
        if p.num_qubits() != n {
            return Err(Error::LengthMismatch(p.num_qubits(), n));
        }
        if !p.is_hermitian() || p.is_identity_up_to_phase() {
            return Err(Error::Input(format!("cannot measure {p}")));
        }
        let rows = self.group.rows();
        match rows.iter().position(|g| !g.commutes_unchecked(p)) {
            Some(first) => {
                let pivot = rows[first].clone();
                let new_rows = rows
                    .iter()
                    .enumerate()
                    .map(|(i, g)| {
                        if i == first {
                            p.clone()
                        } else if !g.commutes_unchecked(p) {
                            let mut h = g.clone();
                            h.mul_assign_right(&pivot);
                            h
                        } else {
                            g.clone()
                        }
                    })
                    .collect();
                Ok((
                    0.5,
                    Some(Self {
                        group: GroupBasis::new(n, new_rows)?,
                    }),
                ))
            }
            None => match self.group.span().express(p).relative_phase() {
                Some(ph) if ph == Phase::ONE => Ok((1.0, Some(self.clone()))),
                Some(_) => Ok((0.0, None)),
                None => {
                    let mut new_rows = rows.to_vec();
                    new_rows.push(p.clone());
                    Ok((
                        0.5,
                        Some(Self {
                            group: GroupBasis::new(n, new_rows)?,
                        }),
                    ))
                }
            },
        }
    }
}

/// GHZ state `(|0…0⟩ + |1…1⟩)/√2` on a line of `n` qubits.
pub fn make_ghz_state(n: usize) -> Result<StabilizerState> {
    if n < 2 {
        return Err(Error::Config(format!("GHZ needs n >= 2, got {n}")));
    }
    let mut gens: Vec<PauliOperator> = (0..n - 1)
        .map(|j| PauliOperator::uniform(n, [j, j + 1], Letter::Z))
        .collect();
    gens.push(PauliOperator::uniform(n, 0..n, Letter::X));
    StabilizerState::from_generators(n, &gens)
}

pub fn ghz_layout(n: usize) -> LatticeLayout {
    LatticeLayout::new((0..n).map(|q| (q as f64, 0.0)).collect(), None).expect("finite")
}

/// Maximally mixed state on the code's symmetric subspace.
pub fn symmetric_mixed_state(code: &StabilizerCode) -> Result<MixedStabilizerState> {
    StabilizerState::maximally_mixed_code(code)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn toric_parameters() {
        for l in 2..=4 {
            let c = make_toric(l).unwrap();
            assert_eq!(c.num_qubits(), 2 * l * l);
            assert_eq!(c.k(), 2);
            assert!((c.w() - 2.0).abs() < 1e-12);
        }
    }

    #[test]
    fn toric_logicals_pair_up() {
        let ls = toric_logicals(3);
        let c = make_toric(3).unwrap();
        for l in &ls {
            assert!(c.is_logical_or_stabilizer(l));
        }
        assert!(!ls[0].commutes_unchecked(&ls[1]));
        assert!(!ls[2].commutes_unchecked(&ls[3]));
        assert!(ls[0].commutes_unchecked(&ls[3]));
        assert!(ls[1].commutes_unchecked(&ls[2]));
    }

    #[test]
    fn honeycomb_counts() {
        for (lx, ly) in [(4, 2), (6, 2), (4, 4), (6, 6)] {
            let c = make_honeycomb_fermion(lx, ly).unwrap();
            assert_eq!(c.k(), 1 + c.num_qubits() / 2, "{lx}x{ly}");
        }
        assert!(make_honeycomb_fermion(3, 4).is_err());
        assert!(make_honeycomb_fermion(2, 4).is_err());
    }

    #[test]
    fn hexagon_is_hermitian_with_expected_letters() {
        let idx = HoneycombIndex { lx: 4, ly: 4 };
        let s = hexagon_stabilizer(&idx, 0, 0);
        assert!(s.is_hermitian());
        assert_eq!(s.weight(), 6);
    }

    #[test]
    fn hexagon_product_is_plus_identity() {
        for (lx, ly) in [(4, 2), (6, 2), (4, 4), (6, 6), (8, 4)] {
            let c = make_honeycomb_fermion(lx, ly).unwrap();
            let mut acc = PauliOperator::identity(c.num_qubits());
            for g in c.generators() {
                acc.mul_assign_right(g);
            }
            assert!(acc.is_identity_up_to_phase());
            assert_eq!(acc.phase(), Phase::ONE, "{lx}x{ly}");
        }
    }

    #[test]
    fn ghz_is_pure() {
        let g = make_ghz_state(5).unwrap();
        assert!(g.is_pure());
    }
}
