//! Distance, correctability, cleaning and mesh-supported logical pairs.

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::bits::BitVec;
use crate::codes::StabilizerCode;
use crate::error::{Error, Result};
use crate::geometry::{build_mesh, tile_partition, Mesh, MeshSpec, Region};
use crate::group::{
    centralizer_dim_in, centralizer_in, clear_region, subgroup_supported_in_mask, ColumnOrder,
    Echelon, GroupBasis, Membership,
};
use crate::pauli::{Letter, PauliOperator, Phase};

pub const EXHAUSTIVE_LIMIT: usize = 24;

/// Smallest weight of a logical operator, searching weights `1..=max_weight`.
/// With `max_weight = None` the search is exhaustive, which needs `n ≤ 24`.
pub fn distance_bruteforce(
    code: &StabilizerCode,
    max_weight: Option<usize>,
) -> Result<Option<usize>> {
    if code.k() == 0 {
        return Err(Error::NoLogicals);
    }
    let n = code.num_qubits();
    let limit = match max_weight {
        Some(w) => w.min(n),
        None if n <= EXHAUSTIVE_LIMIT => n,
        None => {
            return Err(Error::Capability(format!(
                "exhaustive distance search needs n <= {EXHAUSTIVE_LIMIT}, got {n}; pass a weight bound"
            )))
        }
    };
    let gens = code.generators();
    let m = gens.len();
    // syndrome of each single-qubit letter against every generator
    let letters = [Letter::X, Letter::Y, Letter::Z];
    let syndromes: Vec<[BitVec; 3]> = (0..n)
        .map(|q| {
            letters.map(|l| {
                let p = PauliOperator::single(n, q, l);
                BitVec::from_indices(m, (0..m).filter(|&i| !gens[i].commutes_unchecked(&p)))
            })
        })
        .collect();
    let span = code.span();
    for w in 1..=limit {
        let found = (0..n).into_par_iter().any(|first| {
            let mut chosen = vec![first];
            search(&syndromes, &span, n, w, &mut chosen)
        });
        if found {
            return Ok(Some(w));
        }
    }
    Ok(None)
}

fn search(
    syn: &[[BitVec; 3]],
    span: &crate::group::GeneratorSpan,
    n: usize,
    w: usize,
    chosen: &mut Vec<usize>,
) -> bool {
    if chosen.len() == w {
        return letters_hit(syn, span, n, chosen);
    }
    let start = chosen.last().copied().unwrap_or(0) + 1;
    let remaining = w - chosen.len();
    for q in start..=n.saturating_sub(remaining) {
        chosen.push(q);
        if search(syn, span, n, w, chosen) {
            return true;
        }
        chosen.pop();
    }
    false
}

/// Any letter assignment on `sites` that commutes with everything yet is not a stabilizer?
fn letters_hit(
    syn: &[[BitVec; 3]],
    span: &crate::group::GeneratorSpan,
    n: usize,
    sites: &[usize],
) -> bool {
    let total = 3usize.pow(sites.len() as u32);
    for code in 0..total {
        let mut c = code;
        let mut s = BitVec::zeros(syn[0][0].len());
        let mut choice = Vec::with_capacity(sites.len());
        for &q in sites {
            let l = c % 3;
            c /= 3;
            s.xor_assign(&syn[q][l]);
            choice.push((q, [Letter::X, Letter::Y, Letter::Z][l]));
        }
        if s.is_zero() {
            let p = PauliOperator::from_sparse(n, choice);
            if !span.express(&p).in_span() {
                return true;
            }
        }
    }
    false
}

/// Every logical supported in `region` is a stabilizer: the centralizer
/// restricted to the region has the same rank as the stabilizer subgroup there.
pub fn is_correctable(code: &StabilizerCode, region: &Region) -> bool {
    is_correctable_with(code, &code.group(), region)
}

fn is_correctable_with(code: &StabilizerCode, group: &GroupBasis, region: &Region) -> bool {
    let mask = region.mask(code.num_qubits());
    centralizer_dim_in(code.generators(), &mask) == subgroup_supported_in_mask(group, &mask).rank()
}

/// A nontrivial logical supported in `region`, if any.
pub fn correctability_witness(code: &StabilizerCode, region: &Region) -> Option<PauliOperator> {
    let n = code.num_qubits();
    let span = code.span();
    centralizer_in(n, code.generators(), &region.mask(n))
        .into_iter()
        .find(|c| !span.express(c).in_span())
}

/// `l · S` for a stabilizer element `S`, chosen to vacate `region`.
pub fn clean_logical(
    code: &StabilizerCode,
    l: &PauliOperator,
    region: &Region,
) -> Result<PauliOperator> {
    if l.num_qubits() != code.num_qubits() {
        return Err(Error::LengthMismatch(l.num_qubits(), code.num_qubits()));
    }
    if !code.is_logical_or_stabilizer(l) {
        return Err(Error::Input(
            "operator does not commute with the stabilizer group".into(),
        ));
    }
    if let Some(witness) = correctability_witness(code, region) {
        return Err(Error::NotCorrectable { witness });
    }
    let n = code.num_qubits();
    clear_region(n, code.generators(), l, &region.mask(n))
        .ok_or_else(|| Error::Internal("correctable region could not be cleaned".into()))
}

/// Symplectic pairs `(ℓ₁, ℓ₂)` spanning the logical quotient.
pub fn logical_basis(code: &StabilizerCode) -> Vec<(PauliOperator, PauliOperator)> {
    let n = code.num_qubits();
    let centralizer = centralizer_in(n, code.generators(), &BitVec::ones(n));
    let mut echelon = Echelon::new(ColumnOrder::natural(n), 0);
    for g in code.generators() {
        echelon.insert(g.clone(), BitVec::zeros(0));
    }
    let mut pool: Vec<PauliOperator> = Vec::new();
    for c in centralizer {
        if echelon.insert(c.clone(), BitVec::zeros(0)).is_none() {
            pool.push(c);
        }
    }
    let mut pairs = Vec::new();
    while !pool.is_empty() {
        let a = pool.remove(0);
        let Some(bi) = pool.iter().position(|v| !v.commutes_unchecked(&a)) else {
            continue;
        };
        let b = pool.remove(bi);
        for v in pool.iter_mut() {
            if !v.commutes_unchecked(&b) {
                v.mul_assign_right(&a);
            }
            if !v.commutes_unchecked(&a) {
                v.mul_assign_right(&b);
            }
            v.set_phase(Phase::ONE);
        }
        pairs.push((a, b));
    }
    pairs
}

#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct MeshLogicalReport {
    pub l1: PauliOperator,
    pub l2: PauliOperator,
    pub mesh1: Region,
    pub mesh2: Region,
    /// Union of the correctable squares of each mesh.
    pub squares1: Region,
    pub squares2: Region,
    pub intersection_squares: Vec<Region>,
    #[serde(rename = "Q")]
    pub q: Region,
    /// Indices into `intersection_squares` whose restrictions anticommute.
    pub anticommuting: Vec<usize>,
    pub specs: (MeshSpec, MeshSpec),
}

/// Pieces of `mesh1 ∩ mesh2` cut by tiles of side `max(s₁, s₂)` anchored at the first mesh strip.
pub fn intersection_squares(code: &StabilizerCode, m1: &Mesh, m2: &Mesh) -> Vec<Region> {
    let tile = m1.spec.separation.max(m2.spec.separation);
    let anchor = (
        m1.spec.offset.0 + m1.spec.square_size,
        m1.spec.offset.1 + m1.spec.square_size,
    );
    let overlap = m1.mesh.intersection(&m2.mesh);
    tile_partition(code.layout(), &overlap, tile, anchor)
        .into_iter()
        .enumerate()
        .map(|(i, r)| r.with_label(format!("X_{i}")))
        .collect()
}

/// Clean the first symplectic logical pair into two meshes and locate `Q`.
pub fn mesh_logicals(
    code: &StabilizerCode,
    spec1: &MeshSpec,
    spec2: &MeshSpec,
) -> Result<MeshLogicalReport> {
    let pairs = logical_basis(code);
    let (l1, l2) = pairs.into_iter().next().ok_or(Error::NoLogicals)?;
    mesh_logicals_for_pair(code, &l1, &l2, spec1, spec2)
}

pub fn mesh_logicals_for_pair(
    code: &StabilizerCode,
    l1: &PauliOperator,
    l2: &PauliOperator,
    spec1: &MeshSpec,
    spec2: &MeshSpec,
) -> Result<MeshLogicalReport> {
    if code.k() == 0 {
        return Err(Error::NoLogicals);
    }
    if l1.commutes_with(l2)? {
        return Err(Error::Input("logical pair must anticommute".into()));
    }
    let m1 = build_mesh(code.layout(), spec1)?;
    let m2 = build_mesh(code.layout(), spec2)?;
    let sq1 = m1.squares_union();
    let sq2 = m2.squares_union();
    let group = code.group();
    for (name, sq) in [("first", &sq1), ("second", &sq2)] {
        if !is_correctable_with(code, &group, sq) {
            return Err(Error::Feasibility(format!(
                "squares of the {name} mesh are not correctable (square size {})",
                if name == "first" {
                    spec1.square_size
                } else {
                    spec2.square_size
                }
            )));
        }
    }
    let n = code.num_qubits();
    let l1c = clear_region(n, code.generators(), l1, &sq1.mask(n))
        .ok_or_else(|| Error::Internal("cleaning into the first mesh failed".into()))?;
    let l2c = clear_region(n, code.generators(), l2, &sq2.mask(n))
        .ok_or_else(|| Error::Internal("cleaning into the second mesh failed".into()))?;
    let squares = intersection_squares(code, &m1, &m2);
    let sites = l1c.anticommuting_sites(&l2c);
    let anticommuting: Vec<usize> = squares
        .iter()
        .enumerate()
        .filter(|(_, r)| r.iter().filter(|&q| sites.get(q)).count() % 2 == 1)
        .map(|(i, _)| i)
        .collect();
    let Some(&qi) = anticommuting.first() else {
        return Err(Error::Internal(
            "cleaned logicals anticommute but no intersection square carries the anticommutation"
                .into(),
        ));
    };
    let q = squares[qi].clone().with_label("Q");
    Ok(MeshLogicalReport {
        l1: l1c,
        l2: l2c,
        mesh1: m1.mesh,
        mesh2: m2.mesh,
        squares1: sq1,
        squares2: sq2,
        intersection_squares: squares,
        q,
        anticommuting,
        specs: (*spec1, *spec2),
    })
}

/// `l` times the group element it was multiplied by, as recovered from generators.
pub fn cleaning_certificate(
    code: &StabilizerCode,
    l: &PauliOperator,
    cleaned: &PauliOperator,
) -> Membership {
    let mut s = l.dagger();
    s.mul_assign_right(cleaned);
    code.span().express(&s)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::codes::{make_toric, make_trivial_code, toric_logicals};

    #[test]
    fn toric_distances() {
        assert_eq!(
            distance_bruteforce(&make_toric(2).unwrap(), None).unwrap(),
            Some(2)
        );
        assert_eq!(
            distance_bruteforce(&make_toric(3).unwrap(), None).unwrap(),
            Some(3)
        );
    }

    #[test]
    fn trivial_code_has_no_logicals() {
        let c = make_trivial_code(4).unwrap();
        assert!(matches!(
            distance_bruteforce(&c, None),
            Err(Error::NoLogicals)
        ));
    }

    #[test]
    fn horizontal_cycle_is_not_correctable() {
        let c = make_toric(4).unwrap();
        let row = Region::new((0..4).map(|x| 2 * x), "row");
        assert!(!is_correctable(&c, &row));
        assert!(is_correctable(&c, &Region::new([0], "q")));
    }

    #[test]
    fn logical_basis_has_k_pairs() {
        let c = make_toric(3).unwrap();
        let pairs = logical_basis(&c);
        assert_eq!(pairs.len(), 2);
        for (a, b) in &pairs {
            assert!(!a.commutes_unchecked(b));
        }
        assert!(pairs[0].0.commutes_unchecked(&pairs[1].0));
        assert!(pairs[0].0.commutes_unchecked(&pairs[1].1));
    }

    #[test]
    fn cleaning_preserves_class() {
        let c = make_toric(5).unwrap();
        let [zr, xc, ..] = toric_logicals(5);
        let square = crate::geometry::box_region(c.layout(), (0.0, 0.0), (4.0, 4.0), "sq");
        let cleaned = clean_logical(&c, &zr, &square).unwrap();
        assert!(cleaned.support().iter_ones().all(|q| !square.contains(q)));
        assert!(!cleaned.commutes_unchecked(&xc));
        assert!(cleaning_certificate(&c, &zr, &cleaned).is_member());
    }
}
