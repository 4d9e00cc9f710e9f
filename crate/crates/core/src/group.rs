//! GF(2) group computations over signed Paulis.
//!
//! Everything is built on [`Echelon`], an incremental row-echelon form whose
//! pivot is always the *first* set column under a configurable
//! [`ColumnOrder`]. Ordering the columns lets one elimination answer
//! support-restricted questions: put the qubits outside a region first and
//! every row whose pivot lands inside the region is supported there.
//! Ties are broken by lowest qubit index, X column before Z column, so all
//! bases are deterministic.

use std::collections::HashMap;

use serde::{Deserialize, Serialize};

use crate::bits::BitVec;
use crate::error::{Error, Result};
use crate::geometry::Region;
use crate::pauli::{PauliOperator, Phase};

/// Priority classes of symplectic columns. Class `c` owns the X columns in
/// `x_masks[c]` and the Z columns in `z_masks[c]`.
#[derive(Clone, Debug)]
pub struct ColumnOrder {
    n: usize,
    classes: Vec<(BitVec, BitVec)>,
}

impl ColumnOrder {
    pub fn natural(n: usize) -> Self {
        Self {
            n,
            classes: vec![(BitVec::ones(n), BitVec::ones(n))],
        }
    }

    /// Qubits outside `inside` come first.
    pub fn outside_first(inside: &BitVec) -> Self {
        let outside = inside.not();
        Self {
            n: inside.len(),
            classes: vec![(outside.clone(), outside), (inside.clone(), inside.clone())],
        }
    }

    /// Qubits inside `region` come first.
    pub fn inside_first(region: &BitVec) -> Self {
        let outside = region.not();
        Self {
            n: region.len(),
            classes: vec![(region.clone(), region.clone()), (outside.clone(), outside)],
        }
    }

    pub fn from_classes(n: usize, classes: Vec<(BitVec, BitVec)>) -> Self {
        Self { n, classes }
    }

    fn width(&self) -> usize {
        2 * self.n
    }

    /// Global column key of the leading column of `p`, or `None` for identity.
    fn leading(&self, p: &PauliOperator) -> Option<usize> {
        let xw = p.x_bits().words();
        let zw = p.z_bits().words();
        for (c, (xm, zm)) in self.classes.iter().enumerate() {
            for (i, ((&x, &z), (&mx, &mz))) in xw
                .iter()
                .zip(zw)
                .zip(xm.words().iter().zip(zm.words()))
                .enumerate()
            {
                let xs = x & mx;
                let zs = z & mz;
                let any = xs | zs;
                if any != 0 {
                    let q = i * 64 + any.trailing_zeros() as usize;
                    let is_z = (xs >> (q % 64)) & 1 == 0;
                    return Some(c * self.width() + 2 * q + is_z as usize);
                }
            }
        }
        None
    }

    fn class_of(&self, key: usize) -> usize {
        key / self.width()
    }
}

#[derive(Clone, Debug)]
struct Row {
    op: PauliOperator,
    tag: BitVec,
    pivot: usize,
}

/// Incremental echelon form with optional combination tags.
#[derive(Clone, Debug)]
pub struct Echelon {
    order: ColumnOrder,
    rows: Vec<Row>,
    pivots: HashMap<usize, usize>,
    tag_len: usize,
}

impl Echelon {
    pub fn new(order: ColumnOrder, tag_len: usize) -> Self {
        Self {
            order,
            rows: Vec::new(),
            pivots: HashMap::new(),
            tag_len,
        }
    }

    pub fn rank(&self) -> usize {
        self.rows.len()
    }

    /// Reduce `op` (and its tag) against the current rows; returns the
    /// leading column of the remainder.
    fn reduce(&self, op: &mut PauliOperator, tag: &mut BitVec) -> Option<usize> {
        loop {
            let lead = self.order.leading(op)?;
            match self.pivots.get(&lead) {
                Some(&r) => {
                    let row = &self.rows[r];
                    op.mul_assign_right(&row.op);
                    if self.tag_len > 0 {
                        tag.xor_assign(&row.tag);
                    }
                }
                None => return Some(lead),
            }
        }
    }

    /// Reduce while the leading column of `op` lies in `class`.
    fn reduce_within(&self, op: &mut PauliOperator, class: usize) -> Option<usize> {
        loop {
            let lead = self.order.leading(op)?;
            if self.order.class_of(lead) != class {
                return Some(lead);
            }
            match self.pivots.get(&lead) {
                Some(&r) => op.mul_assign_right(&self.rows[r].op),
                None => return Some(lead),
            }
        }
    }

    /// Insert a vector. Returns `None` if it was added, or the reduced
    /// (identity-letter) remainder with its tag if it was dependent.
    pub fn insert(
        &mut self,
        mut op: PauliOperator,
        mut tag: BitVec,
    ) -> Option<(PauliOperator, BitVec)> {
        match self.reduce(&mut op, &mut tag) {
            Some(pivot) => {
                self.pivots.insert(pivot, self.rows.len());
                self.rows.push(Row { op, tag, pivot });
                None
            }
            None => Some((op, tag)),
        }
    }

    fn empty_tag(&self) -> BitVec {
        BitVec::zeros(self.tag_len)
    }

    fn rows_in_class(&self, class: usize) -> impl Iterator<Item = &Row> {
        self.rows
            .iter()
            .filter(move |r| self.order.class_of(r.pivot) == class)
    }
}

/// Outcome of decomposing an operator over a generator list.
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum Membership {
    /// Product of these generators (ascending index order) equals the operator exactly.
    Member(Vec<usize>),
    /// Letters match the product of these generators; the operator equals
    /// `phase` times that product.
    UpToPhase {
        indices: Vec<usize>,
        phase: Phase,
    },
    NotInSpan,
}

impl Membership {
    pub fn is_member(&self) -> bool {
        matches!(self, Membership::Member(_))
    }

    pub fn in_span(&self) -> bool {
        !matches!(self, Membership::NotInSpan)
    }

    /// Sign relative to the group: `Some(phase)` when in span.
    pub fn relative_phase(&self) -> Option<Phase> {
        match self {
            Membership::Member(_) => Some(Phase::ONE),
            Membership::UpToPhase { phase, .. } => Some(*phase),
            Membership::NotInSpan => None,
        }
    }

    pub fn indices(&self) -> Option<&[usize]> {
        match self {
            Membership::Member(i) | Membership::UpToPhase { indices: i, .. } => Some(i),
            Membership::NotInSpan => None,
        }
    }
}

/// A possibly redundant list of commuting generators with a decomposition engine.
#[derive(Clone, Debug)]
pub struct GeneratorSpan {
    n: usize,
    gens: Vec<PauliOperator>,
    echelon: Echelon,
}

impl GeneratorSpan {
    pub fn new(n: usize, gens: &[PauliOperator]) -> Self {
        let mut echelon = Echelon::new(ColumnOrder::natural(n), gens.len());
        for (i, g) in gens.iter().enumerate() {
            let tag = BitVec::from_indices(gens.len(), [i]);
            echelon.insert(g.clone(), tag);
        }
        Self {
            n,
            gens: gens.to_vec(),
            echelon,
        }
    }

    pub fn num_qubits(&self) -> usize {
        self.n
    }

    pub fn generators(&self) -> &[PauliOperator] {
        &self.gens
    }

    pub fn rank(&self) -> usize {
        self.echelon.rank()
    }

    /// Product of the listed generators in ascending index order.
    pub fn product(&self, indices: &[usize]) -> PauliOperator {
        let mut acc = PauliOperator::identity(self.n);
        for &i in indices {
            acc.mul_assign_right(&self.gens[i]);
        }
        acc
    }

    pub fn express(&self, s: &PauliOperator) -> Membership {
        if s.num_qubits() != self.n {
            return Membership::NotInSpan;
        }
        let mut op = s.clone();
        let mut tag = self.echelon.empty_tag();
        if self.echelon.reduce(&mut op, &mut tag).is_some() {
            return Membership::NotInSpan;
        }
        let indices: Vec<usize> = tag.iter_ones().collect();
        let product = self.product(&indices);
        // s = phase · product
        let mut ratio = product.dagger();
        ratio.mul_assign_right(s);
        debug_assert!(ratio.is_identity_up_to_phase());
        if ratio.phase() == Phase::ONE {
            Membership::Member(indices)
        } else {
            Membership::UpToPhase {
                indices,
                phase: ratio.phase(),
            }
        }
    }
}

/// An independent generating set of a group of commuting Paulis.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct GroupBasis {
    n: usize,
    rows: Vec<PauliOperator>,
}

impl GroupBasis {
    /// Keep the independent generators of `gens`, in order.
    pub fn from_generators(n: usize, gens: &[PauliOperator]) -> Self {
        let mut echelon = Echelon::new(ColumnOrder::natural(n), 0);
        let mut rows = Vec::new();
        for g in gens {
            if echelon.insert(g.clone(), BitVec::zeros(0)).is_none() {
                rows.push(g.clone());
            }
        }
        Self { n, rows }
    }

    /// Rows must already be independent.
    pub fn new(n: usize, rows: Vec<PauliOperator>) -> Result<Self> {
        for r in &rows {
            if r.num_qubits() != n {
                return Err(Error::LengthMismatch(r.num_qubits(), n));
            }
        }
        let b = Self::from_generators(n, &rows);
        if b.rows.len() != rows.len() {
            return Err(Error::Input("basis rows are not independent".into()));
        }
        Ok(b)
    }

    pub fn identity_group(n: usize) -> Self {
        Self {
            n,
            rows: Vec::new(),
        }
    }

    pub fn num_qubits(&self) -> usize {
        self.n
    }

    pub fn rank(&self) -> usize {
        self.rows.len()
    }

    pub fn rows(&self) -> &[PauliOperator] {
        &self.rows
    }

    pub fn span(&self) -> GeneratorSpan {
        GeneratorSpan::new(self.n, &self.rows)
    }

    pub fn is_abelian(&self) -> bool {
        self.rows
            .iter()
            .enumerate()
            .all(|(i, a)| self.rows[i + 1..].iter().all(|b| a.commutes_unchecked(b)))
    }

    /// All `2^rank` elements; intended for small groups.
    pub fn elements(&self) -> Vec<PauliOperator> {
        assert!(
            self.rank() <= 24,
            "refusing to enumerate 2^{} elements",
            self.rank()
        );
        let mut out = Vec::with_capacity(1 << self.rank());
        for mask in 0u64..(1u64 << self.rank()) {
            let mut acc = PauliOperator::identity(self.n);
            for (i, r) in self.rows.iter().enumerate() {
                if (mask >> i) & 1 == 1 {
                    acc.mul_assign_right(r);
                }
            }
            out.push(acc);
        }
        out
    }

    /// Same span (as unsigned letter sets and signs) as `other`.
    pub fn same_group(&self, other: &GroupBasis) -> bool {
        if self.rank() != other.rank() {
            return false;
        }
        let span = self.span();
        other.rows.iter().all(|r| span.express(r).is_member())
    }
}

impl Serialize for GroupBasis {
    fn serialize<S: serde::Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        self.rows().serialize(s)
    }
}

impl<'de> Deserialize<'de> for GroupBasis {
    fn deserialize<D: serde::Deserializer<'de>>(d: D) -> std::result::Result<Self, D::Error> {
        let rows = Vec::<PauliOperator>::deserialize(d)?;
        let n = rows.first().map_or(0, PauliOperator::num_qubits);
        GroupBasis::new(n, rows).map_err(serde::de::Error::custom)
    }
}

/// Decompose `s` over the rows of `basis`.
pub fn express_in_generators(basis: &GroupBasis, s: &PauliOperator) -> Membership {
    basis.span().express(s)
}

/// Basis of all group elements supported inside `mask`, with exact signs.
pub fn subgroup_supported_in_mask(basis: &GroupBasis, mask: &BitVec) -> GroupBasis {
    let mut echelon = Echelon::new(ColumnOrder::outside_first(mask), 0);
    for r in &basis.rows {
        echelon.insert(r.clone(), BitVec::zeros(0));
    }
    let rows = echelon.rows_in_class(1).map(|r| r.op.clone()).collect();
    GroupBasis { n: basis.n, rows }
}

pub fn subgroup_supported_in(basis: &GroupBasis, region: &Region) -> GroupBasis {
    subgroup_supported_in_mask(basis, &region.mask(basis.n))
}

/// Basis of the group elements that are Z-type and supported inside `mask`.
pub fn z_subgroup_supported_in(basis: &GroupBasis, mask: &BitVec) -> GroupBasis {
    let n = basis.n;
    let outside = mask.not();
    let none = BitVec::zeros(n);
    let order = ColumnOrder::from_classes(
        n,
        vec![
            (outside.clone(), outside),
            (mask.clone(), none.clone()),
            (none, mask.clone()),
        ],
    );
    let mut echelon = Echelon::new(order, 0);
    for r in &basis.rows {
        echelon.insert(r.clone(), BitVec::zeros(0));
    }
    let rows = echelon.rows_in_class(2).map(|r| r.op.clone()).collect();
    GroupBasis { n, rows }
}

/// Elements of `a` (signed as in `a`) whose letters also occur in `b`.
/// The returned list is an independent generating set of `a ∩ ±b`.
pub fn intersection(a: &GroupBasis, b: &GroupBasis) -> Vec<PauliOperator> {
    let ra = a.rank();
    let mut echelon = Echelon::new(ColumnOrder::natural(a.n), ra.max(1));
    for (i, r) in a.rows.iter().enumerate() {
        echelon.insert(r.clone(), BitVec::from_indices(ra.max(1), [i]));
    }
    let mut out = Vec::new();
    for r in &b.rows {
        if let Some((_, tag)) = echelon.insert(r.clone(), BitVec::zeros(ra.max(1))) {
            let mut acc = PauliOperator::identity(a.n);
            for i in tag.iter_ones() {
                acc.mul_assign_right(&a.rows[i]);
            }
            if !acc.is_identity_up_to_phase() {
                out.push(acc);
            }
        }
    }
    out
}

/// Multiply `op` by a group element so that it vanishes on `mask`.
/// Returns `None` when no such element exists.
pub fn clear_region(
    n: usize,
    gens: &[PauliOperator],
    op: &PauliOperator,
    mask: &BitVec,
) -> Option<PauliOperator> {
    if !op.support().intersects(mask) {
        return Some(op.clone());
    }
    let mut echelon = Echelon::new(ColumnOrder::inside_first(mask), 0);
    for g in gens.iter().filter(|g| g.support().intersects(mask)) {
        echelon.insert(g.clone(), BitVec::zeros(0));
    }
    let mut out = op.clone();
    match echelon.reduce_within(&mut out, 0) {
        Some(lead) if echelon.order.class_of(lead) == 0 => None,
        _ => {
            debug_assert_eq!(out.num_qubits(), n);
            Some(out)
        }
    }
}

/// Rank over GF(2) of a list of Paulis (letters only).
pub fn pauli_rank(n: usize, ops: &[PauliOperator]) -> usize {
    let mut echelon = Echelon::new(ColumnOrder::natural(n), 0);
    for op in ops {
        echelon.insert(op.clone(), BitVec::zeros(0));
    }
    echelon.rank()
}

/// Null space of a dense GF(2) matrix given as rows of length `ncols`.
pub fn kernel(rows: &[BitVec], ncols: usize) -> Vec<BitVec> {
    let mut m: Vec<BitVec> = rows.to_vec();
    let mut pivot_cols = Vec::new();
    let mut r = 0;
    for c in 0..ncols {
        if r == m.len() {
            break;
        }
        let Some(p) = (r..m.len()).find(|&i| m[i].get(c)) else {
            continue;
        };
        m.swap(r, p);
        let pivot = m[r].clone();
        for (i, row) in m.iter_mut().enumerate() {
            if i != r && row.get(c) {
                row.xor_assign(&pivot);
            }
        }
        pivot_cols.push(c);
        r += 1;
    }
    let mut is_pivot = vec![false; ncols];
    for &c in &pivot_cols {
        is_pivot[c] = true;
    }
    let mut out = Vec::new();
    for f in (0..ncols).filter(|&c| !is_pivot[c]) {
        let mut v = BitVec::zeros(ncols);
        v.set(f, true);
        for (i, &pc) in pivot_cols.iter().enumerate() {
            if m[i].get(f) {
                v.set(pc, true);
            }
        }
        out.push(v);
    }
    out
}

/// Basis of Paulis supported on `mask` that commute with every operator in
/// `constraints` (letters only, phase `+1`).
pub fn centralizer_in(
    n: usize,
    constraints: &[PauliOperator],
    mask: &BitVec,
) -> Vec<PauliOperator> {
    let qubits: Vec<usize> = mask.iter_ones().collect();
    let ncols = 2 * qubits.len();
    let rows: Vec<BitVec> = constraints
        .iter()
        .filter(|g| g.support().intersects(mask))
        .map(|g| {
            let mut row = BitVec::zeros(ncols);
            for (i, &q) in qubits.iter().enumerate() {
                // [p, g] ∝ x_p·z_g + z_p·x_g
                if g.z_bits().get(q) {
                    row.set(2 * i, true);
                }
                if g.x_bits().get(q) {
                    row.set(2 * i + 1, true);
                }
            }
            row
        })
        .collect();
    kernel(&rows, ncols)
        .into_iter()
        .map(|v| {
            let mut p = PauliOperator::identity(n);
            for (i, &q) in qubits.iter().enumerate() {
                let l = crate::pauli::Letter::from_bits(v.get(2 * i), v.get(2 * i + 1));
                p.set_letter(q, l);
            }
            p
        })
        .collect()
}

/// `2|R| − rank(G|_R)`: dimension of the centralizer restricted to `mask`.
pub fn centralizer_dim_in(constraints: &[PauliOperator], mask: &BitVec) -> usize {
    let n = mask.len();
    let restricted: Vec<PauliOperator> = constraints
        .iter()
        .filter(|g| g.support().intersects(mask))
        .map(|g| g.restrict(mask))
        .collect();
    2 * mask.count_ones() - pauli_rank(n, &restricted)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn p(s: &str) -> PauliOperator {
        s.parse().unwrap()
    }

    #[test]
    fn express_generator_and_product() {
        let gens = vec![p("ZZI"), p("IZZ"), p("XXX")];
        let span = GeneratorSpan::new(3, &gens);
        assert_eq!(span.express(&p("ZZI")), Membership::Member(vec![0]));
        assert_eq!(span.express(&p("ZIZ")), Membership::Member(vec![0, 1]));
        assert_eq!(
            span.express(&p("-ZIZ")),
            Membership::UpToPhase {
                indices: vec![0, 1],
                phase: Phase::MINUS_ONE
            }
        );
        assert_eq!(span.express(&p("XII")), Membership::NotInSpan);
    }

    #[test]
    fn redundant_generators_keep_rank() {
        let gens = vec![p("ZZI"), p("IZZ"), p("ZIZ")];
        assert_eq!(GroupBasis::from_generators(3, &gens).rank(), 2);
        assert_eq!(GeneratorSpan::new(3, &gens).rank(), 2);
    }

    #[test]
    fn subgroup_in_empty_region_is_trivial() {
        let b = GroupBasis::from_generators(3, &[p("ZZI"), p("IZZ"), p("XXX")]);
        assert_eq!(subgroup_supported_in_mask(&b, &BitVec::zeros(3)).rank(), 0);
        let all = subgroup_supported_in_mask(&b, &BitVec::ones(3));
        assert!(all.same_group(&b));
        let pair = subgroup_supported_in_mask(&b, &BitVec::from_indices(3, [0, 1]));
        assert_eq!(pair.rows(), &[p("ZZI")]);
    }

    #[test]
    fn intersection_tracks_signs_of_first_group() {
        let a = GroupBasis::from_generators(2, &[p("ZZ"), p("XX")]);
        let b = GroupBasis::from_generators(2, &[p("-ZZ"), p("ZI")]);
        let common = intersection(&a, &b);
        assert_eq!(common, vec![p("ZZ")]);
    }

    #[test]
    fn centralizer_of_repetition_code() {
        let gens = vec![p("ZZI"), p("IZZ")];
        let c = centralizer_in(3, &gens, &BitVec::ones(3));
        assert_eq!(c.len(), 4);
        for op in &c {
            assert!(gens.iter().all(|g| g.commutes_with(op).unwrap()));
        }
        assert_eq!(centralizer_dim_in(&gens, &BitVec::ones(3)), 4);
    }
}
