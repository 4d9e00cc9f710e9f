//! Property tests for the algebraic and geometric invariants.

mod common;

use common::{random_group_element, random_mixed_state, random_pauli, random_phased_pauli, rng};
use proptest::prelude::*;
use rand::Rng;

use stabgem_core::clifford::{operator_width, DEFAULT_LOCALITY_RADIUS};
use stabgem_core::codes::{link_product, toric_ground_state, toric_logicals, HoneycombIndex};
use stabgem_core::entanglement::{
    bound_bits, decoupling_check, random_code_word, rdm_zero_fidelity, EPSILON_PRIME,
};
use stabgem_core::geometry::{box_region, disk_region};
use stabgem_core::group::{subgroup_supported_in, GroupBasis};
use stabgem_core::logical::{clean_logical, cleaning_certificate, is_correctable};
use stabgem_core::oracle::pauli_matrix;
use stabgem_core::stats::{braiding_phase, exchange_phase, pauli_expectation};
use stabgem_core::synthesis::{canonical_t_junction, honeycomb_string, truncate_stabilizer};
use stabgem_core::{
    build_mesh, make_honeycomb_fermion, make_toric, partition_into_patches, thicken,
    CliffordCircuit, Dress, Expectation, MeshSpec, PauliOperator, Phase, Region, StabilizerCode,
};

fn random_region(n: usize, p: f64, rng: &mut impl Rng) -> Region {
    Region::new((0..n).filter(|_| rng.gen_bool(p)), "R")
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn multiply_is_associative_and_matches_matrices(n in 1usize..=6, seed: u64) {
        let mut r = rng(seed);
        let (p, q, s) = (
            random_phased_pauli(n, &mut r),
            random_phased_pauli(n, &mut r),
            random_phased_pauli(n, &mut r),
        );
        let pq = p.multiply(&q).unwrap();
        let left = pq.multiply(&s).unwrap();
        let right = p.multiply(&q.multiply(&s).unwrap()).unwrap();
        prop_assert_eq!(&left, &right);
        let dense = pauli_matrix(&p).unwrap() * pauli_matrix(&q).unwrap();
        prop_assert!((dense - pauli_matrix(&pq).unwrap()).norm() < 1e-12);
    }

    #[test]
    fn commutation_is_symmetric_and_bilinear(n in 1usize..=12, seed: u64) {
        let mut r = rng(seed);
        let (p, q, s) = (
            random_pauli(n, 0.6, &mut r),
            random_pauli(n, 0.6, &mut r),
            random_pauli(n, 0.6, &mut r),
        );
        prop_assert_eq!(p.commutes_with(&q).unwrap(), q.commutes_with(&p).unwrap());
        let qs = q.multiply(&s).unwrap();
        let expected = p.commutes_with(&q).unwrap() == p.commutes_with(&s).unwrap();
        prop_assert_eq!(p.commutes_with(&qs).unwrap(), expected);
    }

    #[test]
    fn supported_subgroup_matches_enumeration(n in 2usize..=8, seed: u64) {
        let mut r = rng(seed);
        let state = random_mixed_state(n, &mut r).unwrap();
        let region = random_region(n, 0.6, &mut r);
        let sub = subgroup_supported_in(state.group(), &region);
        let mask = region.mask(n);
        for row in sub.rows() {
            prop_assert!(row.support().is_subset_of(&mask));
        }
        let inside = state
            .group()
            .elements()
            .into_iter()
            .filter(|g| g.support().is_subset_of(&mask))
            .count();
        prop_assert_eq!(inside, 1usize << sub.rank());
        let span = state.group().span();
        for row in sub.rows() {
            prop_assert!(span.express(row).is_member());
        }
    }

    #[test]
    fn thicken_is_monotone_and_composes(seed: u64, a in 0.0f64..3.0, b in 0.0f64..3.0) {
        let code = make_toric(4).unwrap();
        let layout = code.layout();
        let n = code.num_qubits();
        let mut r = rng(seed);
        let small = random_region(n, 0.1, &mut r);
        let big = small.union(&random_region(n, 0.1, &mut r));
        prop_assert!(thicken(layout, &small, a).is_subset_of(&thicken(layout, &big, a)));
        prop_assert!(thicken(layout, &small, a).is_subset_of(&thicken(layout, &small, a + b)));
        // triangle inequality; the reverse inclusion needs a continuum
        let twice = thicken(layout, &thicken(layout, &small, a), b);
        prop_assert!(twice.is_subset_of(&thicken(layout, &small, a + b)));
    }

    #[test]
    fn mesh_squares_are_disjoint_and_small(size in 1.0f64..4.0, sep in 2.0f64..6.0, dx in 0.0f64..4.0) {
        let code = make_toric(8).unwrap();
        let spec = MeshSpec::new(size, sep).shifted(dx, dx);
        let Ok(mesh) = build_mesh(code.layout(), &spec) else { return Ok(()); };
        for (i, a) in mesh.squares.iter().enumerate() {
            prop_assert!(code.layout().diameter(a.qubits()) <= 2f64.sqrt() * size + 1e-9);
            for b in &mesh.squares[i + 1..] {
                prop_assert!(a.is_disjoint(b));
            }
        }
    }

    #[test]
    fn patch_partition_is_deterministic(size in 1.0f64..6.0, gap in 0.5f64..5.0) {
        let code = make_toric(6).unwrap();
        let first = partition_into_patches(code.layout(), size, gap);
        let second = partition_into_patches(code.layout(), size, gap);
        prop_assert_eq!(first, second);
    }

    #[test]
    fn cleaning_multiplies_by_a_group_element(l in 3usize..=4, seed: u64) {
        let code = make_toric(l).unwrap();
        let n = code.num_qubits();
        let mut r = rng(seed);
        let mut logical = toric_logicals(l)[r.gen_range(0..4)].clone();
        logical.mul_assign_right(&random_group_element(&code, &mut r));
        let region = random_region(n, 0.15, &mut r);
        if !is_correctable(&code, &region) {
            return Ok(());
        }
        let cleaned = clean_logical(&code, &logical, &region).unwrap();
        prop_assert!(!cleaned.support().intersects(&region.mask(n)));
        prop_assert!(cleaning_certificate(&code, &logical, &cleaned).is_member());
    }

    #[test]
    fn correctability_survives_shrinking(seed: u64) {
        let code = make_toric(4).unwrap();
        let n = code.num_qubits();
        let mut r = rng(seed);
        let region = random_region(n, 0.25, &mut r);
        if !is_correctable(&code, &region) {
            return Ok(());
        }
        let smaller = Region::new(region.iter().filter(|_| r.gen_bool(0.7)), "S");
        prop_assert!(is_correctable(&code, &smaller));
    }

    #[test]
    fn honeycomb_strings_multiply_link_by_link(seed: u64, steps in 1usize..10) {
        let code = make_honeycomb_fermion(6, 6).unwrap();
        let idx = HoneycombIndex { lx: 6, ly: 6 };
        let n = code.num_qubits();
        let mut r = rng(seed);
        // random walk, split in two connected halves
        let mut walk = vec![r.gen_range(0..n)];
        for _ in 0..2 * steps {
            let v = *walk.last().unwrap();
            let (i, j) = idx.coords(v);
            let nbrs: Vec<usize> = [(i - 1, j), (i + 1, j), (i, j - 1), (i, j + 1)]
                .into_iter()
                .map(|(a, b)| idx.vertex(a, b))
                .filter(|&u| idx.link_between(v, u).is_some())
                .collect();
            walk.push(nbrs[r.gen_range(0..nbrs.len())]);
        }
        let links = idx.path(&walk).unwrap();
        let (a, b) = links.split_at(steps);
        let whole = honeycomb_string(&code, &links).unwrap();
        let mut product = honeycomb_string(&code, a).unwrap();
        product.mul_assign_right(&honeycomb_string(&code, b).unwrap());
        prop_assert_eq!(&product, &whole);
        // links used twice cancel up to phase
        let mut odd: Vec<_> = Vec::new();
        for l in &links {
            if let Some(pos) = odd.iter().position(|m| m == l) {
                odd.remove(pos);
            } else {
                odd.push(*l);
            }
        }
        prop_assert!(link_product(n, &odd).same_letters(&whole));
    }

    #[test]
    fn braiding_identity_holds(n in 2usize..=10, seed: u64) {
        let mut r = rng(seed);
        let state = random_mixed_state(n, &mut r).unwrap();
        let gamma = random_pauli(n, 0.5, &mut r);
        let mut loop_op = random_pauli(n, 0.5, &mut r);
        if r.gen_bool(0.5) && state.rank() > 0 {
            loop_op = state.group().rows()[r.gen_range(0..state.rank())].clone();
        }
        let phase = braiding_phase(&state, &gamma, &loop_op).unwrap();
        let sign = if gamma.commutes_with(&loop_op).unwrap() { Phase::ONE } else { Phase::MINUS_ONE };
        let base = pauli_expectation(&state, &loop_op);
        prop_assert_eq!(phase, Expectation(base.0.map(|p| p * sign)));
    }

    #[test]
    fn dressing_preserves_expectations(seed: u64) {
        let code = make_toric(3).unwrap();
        let n = code.num_qubits();
        let mut r = rng(seed);
        let state = toric_ground_state(3).unwrap();
        let depth = r.gen_range(1..4);
        let c = CliffordCircuit::random_local_layers(code.layout(), depth, DEFAULT_LOCALITY_RADIUS, &mut r);
        let p = if r.gen_bool(0.5) { random_group_element(&code, &mut r) } else { random_pauli(n, 0.3, &mut r) };
        let before = pauli_expectation(&state, &p);
        let after = pauli_expectation(&state.dress(&c).unwrap(), &p.dress(&c).unwrap());
        prop_assert_eq!(before, after);
    }

    #[test]
    fn dressing_widens_by_at_most_the_light_cone(seed: u64, depth in 1usize..4) {
        let code = make_toric(6).unwrap();
        let mut r = rng(seed);
        let c = CliffordCircuit::random_local_layers(code.layout(), depth, DEFAULT_LOCALITY_RADIUS, &mut r);
        let center = (r.gen_range(0.0..12.0), r.gen_range(0.0..12.0));
        let disk = disk_region(code.layout(), center, 2.0, "D");
        let p = PauliOperator::from_sparse(code.num_qubits(), disk.iter().map(|q| (q, stabgem_core::Letter::Z)));
        let before = operator_width(code.layout(), &p);
        let after = operator_width(code.layout(), &c.conjugate(&p));
        prop_assert!(after <= before + 2.0 * DEFAULT_LOCALITY_RADIUS * depth as f64 + 1e-9);
    }

    #[test]
    fn zero_fidelity_is_a_probability_and_shrinks(n in 1usize..=16, seed: u64) {
        let mut r = rng(seed);
        let state = random_mixed_state(n, &mut r).unwrap();
        let a = random_region(n, 0.4, &mut r);
        let ab = a.union(&random_region(n, 0.4, &mut r));
        let fa = rdm_zero_fidelity(&state, &a);
        let fab = rdm_zero_fidelity(&state, &ab);
        prop_assert!((0.0..=1.0).contains(&fa));
        prop_assert!(fab <= fa);
    }

    #[test]
    fn bound_bits_is_monotone(m in 0usize..10_000) {
        let b = bound_bits(m, EPSILON_PRIME);
        prop_assert!(b >= 0.0);
        prop_assert!(bound_bits(m + 1, EPSILON_PRIME) >= b);
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(200))]

    #[test]
    fn truncation_stays_local_on_toric(seed: u64) {
        truncation_case(&make_toric(5).unwrap(), seed)?;
    }

    #[test]
    fn truncation_stays_local_on_honeycomb(seed: u64) {
        truncation_case(&make_honeycomb_fermion(4, 4).unwrap(), seed)?;
    }
}

fn truncation_case(code: &StabilizerCode, seed: u64) -> Result<(), TestCaseError> {
    let mut r = rng(seed);
    let n = code.num_qubits();
    let (px, py) = code.layout().periods().unwrap();
    let s = random_group_element(code, &mut r);
    let region = if r.gen_bool(0.5) {
        let corner = (r.gen_range(0.0..px), r.gen_range(0.0..py));
        box_region(
            code.layout(),
            corner,
            (r.gen_range(0.5..px), r.gen_range(0.5..py)),
            "R",
        )
    } else {
        random_region(n, 0.2, &mut r)
    };
    let t = truncate_stabilizer(code, &s, &region).unwrap();
    let plus = thicken(code.layout(), &region, code.w());
    prop_assert!(t.support().is_subset_of(&plus.mask(n)));
    let mask = region.mask(n);
    prop_assert!(t.restrict(&mask).same_letters(&s.restrict(&mask)));
    Ok(())
}

#[test]
fn exchange_is_fermionic_on_symmetric_states() {
    let code = make_honeycomb_fermion(4, 4).unwrap();
    let triple = canonical_t_junction(&code).unwrap();
    let mut r = rng(5);
    for _ in 0..20 {
        let state = random_code_word(&code, &mut r).unwrap();
        assert_eq!(
            exchange_phase(&state, &triple).unwrap().phase,
            Expectation::MINUS
        );
    }
}

#[test]
fn decoupled_patches_obey_the_product_rule() {
    let code = make_toric(6).unwrap();
    let mut r = rng(9);
    let ground = toric_ground_state(6).unwrap();
    let patches = partition_into_patches(code.layout(), 2.0, 4.0);
    assert!(patches.len() >= 2);
    let union = patches.iter().fold(Region::empty(), |a, p| a.union(p));
    for _ in 0..10 {
        let c =
            CliffordCircuit::random_local_layers(code.layout(), 1, DEFAULT_LOCALITY_RADIUS, &mut r);
        let state = ground.dress(&c).unwrap();
        if decoupling_check(&state, &patches).unwrap() {
            let product: f64 = patches
                .iter()
                .map(|p| rdm_zero_fidelity(&state, p))
                .product();
            assert_eq!(rdm_zero_fidelity(&state, &union), product);
        }
    }
}

#[test]
fn supported_subgroup_of_identity_group_is_trivial() {
    let g = GroupBasis::identity_group(4);
    assert_eq!(
        subgroup_supported_in(&g, &Region::new([0, 1], "R")).rank(),
        0
    );
}
