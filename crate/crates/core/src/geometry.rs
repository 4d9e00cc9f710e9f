//! Planar qubit layouts, regions, meshes and patch partitions.

use serde::{Deserialize, Deserializer, Serialize, Serializer};

use crate::bits::BitVec;
use crate::error::{Error, Result};

const EPS: f64 = 1e-9;

pub type Point = (f64, f64);

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct LatticeLayout {
    positions: Vec<Point>,
    periods: Option<(f64, f64)>,
}

impl LatticeLayout {
    pub fn new(positions: Vec<Point>, periods: Option<(f64, f64)>) -> Result<Self> {
        if let Some((px, py)) = periods {
            if !(px > 0.0 && py > 0.0) {
                return Err(Error::Config(format!(
                    "periods must be positive, got ({px}, {py})"
                )));
            }
        }
        if positions
            .iter()
            .any(|(x, y)| !x.is_finite() || !y.is_finite())
        {
            return Err(Error::Config("non-finite qubit coordinate".into()));
        }
        Ok(Self { positions, periods })
    }

    pub fn num_qubits(&self) -> usize {
        self.positions.len()
    }

    pub fn position(&self, q: usize) -> Point {
        self.positions[q]
    }

    pub fn positions(&self) -> &[Point] {
        &self.positions
    }

    pub fn periods(&self) -> Option<(f64, f64)> {
        self.periods
    }

    /// Euclidean distance, minimized over the nine nearest periodic images.
    pub fn point_distance(&self, a: Point, b: Point) -> f64 {
        let (dx, dy) = (b.0 - a.0, b.1 - a.1);
        match self.periods {
            None => dx.hypot(dy),
            Some((px, py)) => {
                let mut best = f64::INFINITY;
                for i in -1..=1 {
                    for j in -1..=1 {
                        let d = (dx + i as f64 * px).hypot(dy + j as f64 * py);
                        best = best.min(d);
                    }
                }
                best
            }
        }
    }

    pub fn distance(&self, a: usize, b: usize) -> f64 {
        self.point_distance(self.positions[a], self.positions[b])
    }

    pub fn distance_to_region(&self, q: usize, region: &Region) -> f64 {
        region
            .iter()
            .map(|r| self.distance(q, r))
            .fold(f64::INFINITY, f64::min)
    }

    /// Largest pairwise distance inside `qubits`.
    pub fn diameter(&self, qubits: &[usize]) -> f64 {
        let mut best: f64 = 0.0;
        for (i, &a) in qubits.iter().enumerate() {
            for &b in &qubits[i + 1..] {
                best = best.max(self.distance(a, b));
            }
        }
        best
    }

    /// Smallest distance between two regions (infinite if either is empty).
    pub fn region_distance(&self, a: &Region, b: &Region) -> f64 {
        let mut best = f64::INFINITY;
        for p in a.iter() {
            for q in b.iter() {
                best = best.min(self.distance(p, q));
            }
        }
        best
    }

    /// Origin and side lengths of the box the layout lives in.
    fn frame(&self) -> (Point, (f64, f64)) {
        match self.periods {
            Some(p) => ((0.0, 0.0), p),
            None => {
                let (mut x0, mut y0, mut x1, mut y1) = (
                    f64::INFINITY,
                    f64::INFINITY,
                    f64::NEG_INFINITY,
                    f64::NEG_INFINITY,
                );
                for &(x, y) in &self.positions {
                    x0 = x0.min(x);
                    y0 = y0.min(y);
                    x1 = x1.max(x);
                    y1 = y1.max(y);
                }
                if self.positions.is_empty() {
                    return ((0.0, 0.0), (0.0, 0.0));
                }
                // unit lattice spacing: a row of L sites spans L units
                ((x0, y0), (x1 - x0 + 1.0, y1 - y0 + 1.0))
            }
        }
    }

    /// Coordinate of `q` relative to `offset`, wrapped into the frame.
    fn relative(&self, q: usize, offset: Point) -> Point {
        let ((fx, fy), (wx, wy)) = self.frame();
        let (x, y) = self.positions[q];
        let (rx, ry) = (x - fx - offset.0, y - fy - offset.1);
        match self.periods {
            Some(_) => (rx.rem_euclid(wx), ry.rem_euclid(wy)),
            None => (rx, ry),
        }
    }
}

/// Sorted, duplicate-free set of qubit ids with a free-text label.
#[derive(Clone, Debug, Default, PartialEq, Eq, Hash)]
pub struct Region {
    qubits: Vec<usize>,
    pub label: String,
}

impl Region {
    pub fn new(qubits: impl IntoIterator<Item = usize>, label: impl Into<String>) -> Self {
        let mut qubits: Vec<usize> = qubits.into_iter().collect();
        qubits.sort_unstable();
        qubits.dedup();
        Self {
            qubits,
            label: label.into(),
        }
    }

    pub fn empty() -> Self {
        Self::default()
    }

    pub fn from_mask(mask: &BitVec, label: impl Into<String>) -> Self {
        Self::new(mask.iter_ones(), label)
    }

    pub fn with_label(mut self, label: impl Into<String>) -> Self {
        self.label = label.into();
        self
    }

    pub fn qubits(&self) -> &[usize] {
        &self.qubits
    }

    pub fn iter(&self) -> impl Iterator<Item = usize> + '_ {
        self.qubits.iter().copied()
    }

    pub fn len(&self) -> usize {
        self.qubits.len()
    }

    pub fn is_empty(&self) -> bool {
        self.qubits.is_empty()
    }

    pub fn contains(&self, q: usize) -> bool {
        self.qubits.binary_search(&q).is_ok()
    }

    pub fn mask(&self, n: usize) -> BitVec {
        BitVec::from_indices(n, self.qubits.iter().copied())
    }

    pub fn union(&self, other: &Region) -> Region {
        Region::new(self.iter().chain(other.iter()), self.label.clone())
    }

    pub fn intersection(&self, other: &Region) -> Region {
        Region::new(
            self.iter().filter(|&q| other.contains(q)),
            self.label.clone(),
        )
    }

    pub fn difference(&self, other: &Region) -> Region {
        Region::new(
            self.iter().filter(|&q| !other.contains(q)),
            self.label.clone(),
        )
    }

    pub fn is_subset_of(&self, other: &Region) -> bool {
        self.iter().all(|q| other.contains(q))
    }

    pub fn is_disjoint(&self, other: &Region) -> bool {
        self.iter().all(|q| !other.contains(q))
    }

    pub fn complement(&self, n: usize) -> Region {
        Region::new(
            (0..n).filter(|&q| !self.contains(q)),
            format!("complement of {}", self.label),
        )
    }
}

impl Serialize for Region {
    fn serialize<S: Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        self.qubits.serialize(s)
    }
}

impl<'de> Deserialize<'de> for Region {
    fn deserialize<D: Deserializer<'de>>(d: D) -> std::result::Result<Self, D::Error> {
        Ok(Region::new(Vec::<usize>::deserialize(d)?, ""))
    }
}

/// Square grid parameters: side `square_size`, spacing `separation`, shift `offset`.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct MeshSpec {
    pub square_size: f64,
    pub separation: f64,
    pub offset: Point,
}

impl MeshSpec {
    pub fn new(square_size: f64, separation: f64) -> Self {
        Self {
            square_size,
            separation,
            offset: (0.0, 0.0),
        }
    }

    pub fn shifted(mut self, dx: f64, dy: f64) -> Self {
        self.offset = (self.offset.0 + dx, self.offset.1 + dy);
        self
    }

    pub fn pitch(&self) -> f64 {
        self.square_size + self.separation
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Mesh {
    pub spec: MeshSpec,
    pub squares: Vec<Region>,
    pub mesh: Region,
}

impl Mesh {
    pub fn squares_union(&self) -> Region {
        self.squares
            .iter()
            .fold(Region::empty(), |acc, s| acc.union(s))
            .with_label("squares")
    }
}

/// Number of boxes of side `size` at pitch `pitch` that fit into `extent`.
fn boxes_along(extent: f64, size: f64, pitch: f64, periodic: bool) -> usize {
    if size > extent + EPS {
        return 0;
    }
    let m = if periodic {
        ((extent + EPS) / pitch).floor() as usize
    } else {
        ((extent - size + EPS) / pitch).floor() as usize + 1
    };
    m.max(1)
}

/// Assign each qubit to the half-open box grid `[o + i·pitch, o + i·pitch + size)`.
fn box_grid(
    layout: &LatticeLayout,
    size: f64,
    pitch: f64,
    offset: Point,
) -> Result<(usize, usize, Vec<Option<usize>>)> {
    let (_, (wx, wy)) = layout.frame();
    let periodic = layout.periods.is_some();
    let mx = boxes_along(wx, size, pitch, periodic);
    let my = boxes_along(wy, size, pitch, periodic);
    if mx == 0 || my == 0 {
        return Err(Error::Config(format!(
            "square of side {size} does not fit into a {wx} x {wy} layout"
        )));
    }
    let cell = |r: f64, m: usize| -> Option<usize> {
        if r < -EPS {
            return None;
        }
        let i = ((r + EPS) / pitch).floor() as usize;
        (i < m && r - i as f64 * pitch < size - EPS).then_some(i)
    };
    let owner = (0..layout.num_qubits())
        .map(|q| {
            let (rx, ry) = layout.relative(q, offset);
            match (cell(rx, mx), cell(ry, my)) {
                (Some(i), Some(j)) => Some(j * mx + i),
                _ => None,
            }
        })
        .collect();
    Ok((mx, my, owner))
}

/// Squares of side `a` at pitch `a + s` (row-major) and the mesh they leave behind.
pub fn build_mesh(layout: &LatticeLayout, spec: &MeshSpec) -> Result<Mesh> {
    if !(spec.square_size > 0.0 && spec.separation > 0.0) {
        return Err(Error::Config(
            "mesh square size and separation must be positive".into(),
        ));
    }
    let (mx, my, owner) = box_grid(layout, spec.square_size, spec.pitch(), spec.offset)?;
    let mut members = vec![Vec::new(); mx * my];
    let mut rest = Vec::new();
    for (q, o) in owner.into_iter().enumerate() {
        match o {
            Some(c) => members[c].push(q),
            None => rest.push(q),
        }
    }
    let squares = members
        .into_iter()
        .enumerate()
        .map(|(c, qs)| Region::new(qs, format!("A_{c}")))
        .collect();
    Ok(Mesh {
        spec: *spec,
        squares,
        mesh: Region::new(rest, "mesh"),
    })
}

/// Row-major packing of square patches whose mutual distance exceeds `gap`.
/// Empty patches are dropped; an empty list means nothing fits.
pub fn partition_into_patches(layout: &LatticeLayout, patch_size: f64, gap: f64) -> Vec<Region> {
    if !(patch_size > 0.0 && gap > 0.0) {
        return Vec::new();
    }
    let pitch = patch_size + gap;
    let Ok((mx, my, owner)) = box_grid(layout, patch_size, pitch, (0.0, 0.0)) else {
        return Vec::new();
    };
    let mut members = vec![Vec::new(); mx * my];
    for (q, o) in owner.into_iter().enumerate() {
        if let Some(c) = o {
            members[c].push(q);
        }
    }
    let patches: Vec<Region> = members
        .into_iter()
        .enumerate()
        .filter(|(_, qs)| !qs.is_empty())
        .map(|(c, qs)| Region::new(qs, format!("patch_{c}")))
        .collect();
    // Real-valued layouts can place points exactly `gap` apart; drop offenders greedily.
    let mut kept: Vec<Region> = Vec::new();
    for p in patches {
        if kept
            .iter()
            .all(|k| layout.region_distance(k, &p) > gap + EPS)
        {
            kept.push(p);
        }
    }
    kept
}

/// Cut `region` along a grid of half-open tiles of side `tile` anchored at
/// `anchor`; nonempty pieces come back in row-major tile order.
pub fn tile_partition(
    layout: &LatticeLayout,
    region: &Region,
    tile: f64,
    anchor: Point,
) -> Vec<Region> {
    let (_, (wx, _)) = layout.frame();
    let per_row = ((wx + EPS) / tile).ceil().max(1.0) as usize + 1;
    let mut pieces: std::collections::BTreeMap<(i64, i64), Vec<usize>> =
        std::collections::BTreeMap::new();
    for q in region.iter() {
        let (rx, ry) = layout.relative(q, anchor);
        let key = (
            ((ry + EPS) / tile).floor() as i64,
            ((rx + EPS) / tile).floor() as i64,
        );
        pieces.entry(key).or_default().push(q);
    }
    pieces
        .into_iter()
        .map(|((ty, tx), qs)| Region::new(qs, format!("tile_{}", ty * per_row as i64 + tx)))
        .collect()
}

/// `R⁺ = { j : dist(j, R) ≤ w }`.
pub fn thicken(layout: &LatticeLayout, region: &Region, w: f64) -> Region {
    if region.is_empty() {
        return Region::new([], format!("{}+", region.label));
    }
    let qs = (0..layout.num_qubits())
        .filter(|&q| region.contains(q) || layout.distance_to_region(q, region) <= w + EPS);
    Region::new(qs, format!("{}+", region.label))
}

/// Qubits whose wrapped coordinates fall in the axis-aligned half-open box.
pub fn box_region(layout: &LatticeLayout, corner: Point, size: (f64, f64), label: &str) -> Region {
    let qs = (0..layout.num_qubits()).filter(|&q| {
        let (rx, ry) = layout.relative(q, corner);
        rx >= -EPS && rx < size.0 - EPS && ry >= -EPS && ry < size.1 - EPS
    });
    Region::new(qs, label)
}

/// Qubits within Euclidean distance `radius` of a point.
pub fn disk_region(layout: &LatticeLayout, center: Point, radius: f64, label: &str) -> Region {
    let qs = (0..layout.num_qubits())
        .filter(|&q| layout.point_distance(center, layout.position(q)) <= radius + EPS);
    Region::new(qs, label)
}

/// Mean position of a region, unwrapped around its first qubit on a torus.
pub fn centroid(layout: &LatticeLayout, region: &Region) -> Option<Point> {
    let first = region.iter().next()?;
    let base = layout.position(first);
    let (mut sx, mut sy) = (0.0, 0.0);
    for q in region.iter() {
        let (dx, dy) = layout.displacement(base, layout.position(q));
        sx += dx;
        sy += dy;
    }
    let k = region.len() as f64;
    Some((base.0 + sx / k, base.1 + sy / k))
}

impl LatticeLayout {
    /// Minimal-image displacement `b − a`.
    pub fn displacement(&self, a: Point, b: Point) -> Point {
        let (mut dx, mut dy) = (b.0 - a.0, b.1 - a.1);
        if let Some((px, py)) = self.periods {
            dx -= px * (dx / px).round();
            dy -= py * (dy / py).round();
        }
        (dx, dy)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn grid(l: usize) -> LatticeLayout {
        let pos = (0..l * l)
            .map(|i| ((i % l) as f64, (i / l) as f64))
            .collect();
        LatticeLayout::new(pos, Some((l as f64, l as f64))).unwrap()
    }

    #[test]
    fn torus_distance_wraps() {
        let g = grid(10);
        assert!((g.distance(0, 9) - 1.0).abs() < 1e-12);
        assert!((g.distance(0, 99) - 2f64.sqrt()).abs() < 1e-12);
    }

    #[test]
    fn mesh_partitions_every_qubit() {
        let g = grid(12);
        let m = build_mesh(&g, &MeshSpec::new(4.0, 2.0)).unwrap();
        assert_eq!(m.squares.len(), 4);
        let covered: usize = m.squares.iter().map(Region::len).sum::<usize>() + m.mesh.len();
        assert_eq!(covered, 144);
        assert!(m.squares.iter().all(|s| s.len() == 16));
    }

    #[test]
    fn oversize_square_is_rejected() {
        assert!(build_mesh(&grid(4), &MeshSpec::new(5.0, 1.0)).is_err());
    }

    #[test]
    fn thicken_zero_is_identity() {
        let g = grid(6);
        let r = Region::new([3, 17], "r");
        assert_eq!(thicken(&g, &r, 0.0).qubits(), r.qubits());
        assert_eq!(thicken(&g, &r, 1.0).len(), 10);
    }
}
