mod common;

use common::random_mirrored;
use proptest::prelude::*;
use qwalk_core::bounds::{lambda1_lower_for, rayleigh_quotient, test_vector_for, BOUND_TOLERANCE};
use qwalk_core::graph::{mirror_build, partition_vertices, validate_involution, Graph, Slot};
use qwalk_core::hamiltonian::{assemble_hamiltonian, Sector};
use qwalk_core::matrix::Matrix;
use qwalk_core::oracle::{eigenvalues_bisection, enumerate_involutions, enumerate_walks_dfs};
use qwalk_core::spectral::{amplitude_split, eig_symmetric, tagged_spectrum, transfer_probability};
use qwalk_core::walks::{count_walks_avoiding, well_system_residual, z_truncated};
use qwalk_core::well::DoubleWell;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

fn mirrored(seed: u64, max_n: usize) -> common::Case {
    random_mirrored(&mut ChaCha8Rng::seed_from_u64(seed), max_n, 6)
}

fn connected_graph(n: usize, mask: u64) -> Option<Graph> {
    let edges: Vec<(usize, usize)> = (0..n)
        .flat_map(|a| (a + 1..n).map(move |b| (a, b)))
        .enumerate()
        .filter(|(k, _)| mask >> k & 1 == 1)
        .map(|(_, e)| e)
        .collect();
    Graph::new(n, edges, vec![0.0; n]).ok()
}

fn symmetric_matrix(n: usize, entries: &[f64]) -> Matrix {
    let mut m = Matrix::zeros(n, n);
    let mut k = 0;
    for i in 0..n {
        for j in i..n {
            m[(i, j)] = entries[k % entries.len()];
            m[(j, i)] = m[(i, j)];
            k += 1;
        }
    }
    m
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(48))]

    #[test]
    fn mirror_build_yields_valid_involutions(seed in any::<u64>()) {
        let c = mirrored(seed, 40);
        let inv = &c.involution;
        for v in 0..inv.len() {
            prop_assert_eq!(inv.apply(inv.apply(v)), v);
        }
        prop_assert!(validate_involution(&c.graph, inv).unwrap().is_ok());
    }

    #[test]
    fn partition_is_a_disjoint_cover(seed in any::<u64>()) {
        let c = mirrored(seed, 40);
        let part = partition_vertices(&c.graph, &c.involution, c.well).unwrap();
        let mut seen = vec![0; c.graph.n()];
        for &v in part.primary.iter().chain(&part.mirror).chain(&part.fixed) {
            seen[v] += 1;
        }
        prop_assert!(seen.iter().all(|&s| s == 1));
        for (j, &v) in part.primary.iter().enumerate() {
            prop_assert_eq!(c.involution.apply(v), part.mirror[j]);
            prop_assert_eq!(part.slot(v), Slot::Primary(j));
        }
        prop_assert_eq!(part.well(), c.well);
    }

    #[test]
    fn bfs_distances_change_by_at_most_one_along_edges(seed in any::<u64>(), src in 0usize..60) {
        let c = mirrored(seed, 60);
        let dist = c.graph.bfs_distances(src % c.graph.n());
        for &(a, b) in c.graph.edges() {
            prop_assert!(dist[a].abs_diff(dist[b]) <= 1);
        }
    }

    #[test]
    fn spectrum_union_and_symmetrization(seed in any::<u64>(), q in 0.0f64..60.0) {
        let c = mirrored(seed, 30);
        let dw = DoubleWell::new(&c.graph, &c.involution, c.well, q).unwrap();
        let red = dw.reduce().unwrap();
        let full = eig_symmetric(red.hamiltonian().matrix()).unwrap();
        let tagged = tagged_spectrum(&red).unwrap();
        for (a, b) in full.values().iter().zip(tagged.values()) {
            prop_assert!((a - b).abs() < 1e-8);
        }
        // the asymmetric block is not symmetric; compare through the characteristic check H⁺ₐ x = λ x
        let sym = eig_symmetric(&red.plus_sym).unwrap();
        let bis = eigenvalues_bisection(&red.plus_sym).unwrap();
        for j in 0..sym.len() {
            prop_assert!((sym.value(j) - bis[j]).abs() < 1e-8);
            let w = sym.vector(j);
            let a = qwalk_core::hamiltonian::plus_sym_to_asym(&red.partition, &w);
            let lhs = red.plus_asym.mul_vec(&a);
            for (l, x) in lhs.iter().zip(&a) {
                prop_assert!((l - sym.value(j) * x).abs() < 1e-8 * (1.0 + q));
            }
        }
    }

    #[test]
    fn perron_vector_is_positive(seed in any::<u64>(), q in 0.0f64..60.0) {
        let c = mirrored(seed, 30);
        let dw = DoubleWell::new(&c.graph, &c.involution, c.well, q).unwrap();
        let tagged = tagged_spectrum(&dw.reduce().unwrap()).unwrap();
        prop_assert!(tagged.vector(0).iter().all(|&x| x > -1e-10));
        // the untagged solver can only separate φ₁ from φ₂ when the gap is resolvable
        let spec = eig_symmetric(assemble_hamiltonian(&dw.graph).matrix()).unwrap();
        if spec.value(0) - spec.value(1) > 1e-6 {
            prop_assert!(spec.vector(0).iter().all(|&x| x > -1e-10));
        }
    }

    #[test]
    fn lambda2_is_antisymmetric_above_gershgorin_threshold(seed in any::<u64>(), extra in 0.0f64..50.0) {
        let c = mirrored(seed, 30);
        let q = 2.0 * c.graph.max_degree() as f64 + 1.0 + extra;
        let dw = DoubleWell::new(&c.graph, &c.involution, c.well, q).unwrap();
        let spec = tagged_spectrum(&dw.reduce().unwrap()).unwrap();
        prop_assert_eq!(spec.sectors().unwrap()[0], Sector::Plus);
        prop_assert_eq!(spec.sectors().unwrap()[1], Sector::Minus);
    }

    #[test]
    fn walk_invariants(seed in any::<u64>(), t in 0.0f64..50.0) {
        let c = mirrored(seed, 30);
        let dw = DoubleWell::new(&c.graph, &c.involution, c.well, 20.0).unwrap();
        let spec = tagged_spectrum(&dw.reduce().unwrap()).unwrap();
        let (u, v) = (dw.well(), dw.partner());
        let pf = transfer_probability(&spec, u, v, t).unwrap().probability;
        let pb = transfer_probability(&spec, v, u, t).unwrap().probability;
        prop_assert!((pf - pb).abs() < 1e-12);
        prop_assert!(pf <= 1.0 + 1e-12);
        let split = amplitude_split(&spec, u, t).unwrap();
        prop_assert!((split.transfer_probability() - pf).abs() < 1e-10);
    }

    #[test]
    fn rayleigh_dominates_closed_form(seed in any::<u64>(), q in 1.0f64..200.0) {
        let c = mirrored(seed, 40);
        let dw = DoubleWell::new(&c.graph, &c.involution, c.well, q).unwrap();
        let b = lambda1_lower_for(&dw).unwrap();
        prop_assert!(b.value <= b.rayleigh + BOUND_TOLERANCE);
        // same quotient on the symmetric block with y mapped to (y_N, y_S/√2)
        let y = test_vector_for(&dw, Sector::Plus).unwrap();
        let k = dw.partition.k();
        let mapped: Vec<f64> = y.entries.iter().enumerate()
            .map(|(i, &e)| if i < k { e } else { e / std::f64::consts::SQRT_2 })
            .collect();
        let red = dw.reduce().unwrap();
        let r = rayleigh_quotient(&red.plus_sym, &mapped).unwrap();
        prop_assert!((r - b.rayleigh).abs() < 1e-9 * (1.0 + q));
    }

    #[test]
    fn test_vector_shape(seed in any::<u64>(), q in 1.5f64..100.0) {
        let c = mirrored(seed, 40);
        let dw = DoubleWell::new(&c.graph, &c.involution, c.well, q).unwrap();
        let plus = test_vector_for(&dw, Sector::Plus).unwrap();
        prop_assert_eq!(plus.entries[0], 1.0);
        prop_assert!(plus.entries.iter().all(|&e| e > 0.0));
        let minus = test_vector_for(&dw, Sector::Minus).unwrap();
        for (&v, &e) in minus.vertices.iter().zip(&minus.entries) {
            prop_assert_eq!(e == 0.0, dw.is_equidistant(v));
        }
    }

    #[test]
    fn eigensolver_matches_bisection(n in 1usize..50, entries in prop::collection::vec(-10.0f64..10.0, 1..64)) {
        let m = symmetric_matrix(n, &entries);
        let jac = eig_symmetric(&m).unwrap();
        let bis = eigenvalues_bisection(&m).unwrap();
        for (a, b) in jac.values().iter().zip(&bis) {
            prop_assert!((a - b).abs() < 1e-8, "{} vs {}", a, b);
        }
        prop_assert!(jac.orthonormality_defect() < 1e-10);
    }

    #[test]
    fn masked_counts_match_dfs(n in 1usize..=6, mask in any::<u64>(), forbid in any::<u8>(), s in 0usize..6, t in 0usize..6) {
        if let Some(g) = connected_graph(n, mask) {
            let forbidden: Vec<usize> = (0..n).filter(|i| forbid >> i & 1 == 1).collect();
            let (s, t) = (s % n, t % n);
            let dfs = enumerate_walks_dfs(&g, s, t, &forbidden, 8).unwrap();
            let masked = count_walks_avoiding(&g, s, t, &forbidden, 8).unwrap();
            let as_float: Vec<f64> = dfs.iter().map(|&c| c as f64).collect();
            prop_assert_eq!(as_float, masked.counts);
        }
    }

    #[test]
    fn z_is_monotone_and_mirror_symmetric(seed in any::<u64>(), q in 10.0f64..50.0) {
        let c = mirrored(seed, 30);
        let dw = DoubleWell::new(&c.graph, &c.involution, c.well, q).unwrap();
        let (v, vp) = (dw.well(), dw.partner());
        let lambda = q;
        let mut last = 0.0;
        for len in [5, 10, 20, 40] {
            let w = count_walks_avoiding(&dw.graph, v, vp, &[v, vp], len).unwrap();
            let z = z_truncated(&w, lambda).unwrap().value;
            prop_assert!(z >= last);
            last = z;
        }
        let a = count_walks_avoiding(&dw.graph, v, v, &[v, vp], 20).unwrap();
        let b = count_walks_avoiding(&dw.graph, vp, vp, &[v, vp], 20).unwrap();
        prop_assert_eq!(a.counts, b.counts);
        let a = count_walks_avoiding(&dw.graph, v, vp, &[v, vp], 20).unwrap();
        let b = count_walks_avoiding(&dw.graph, vp, v, &[v, vp], 20).unwrap();
        prop_assert_eq!(a.counts, b.counts);
    }

    #[test]
    fn residual_decays_geometrically(seed in any::<u64>()) {
        let c = mirrored(seed, 20);
        let m = c.graph.max_degree() as f64;
        let q = 4.0 * m + 4.0;
        let dw = DoubleWell::new(&c.graph, &c.involution, c.well, q).unwrap();
        let spec = tagged_spectrum(&dw.reduce().unwrap()).unwrap();
        let l1 = spec.value(0);
        let r = m / l1;
        let res: Vec<f64> = [10, 20, 40]
            .iter()
            .map(|&len| well_system_residual(&c.graph, &c.involution, c.well, l1, q, len).unwrap().symmetric)
            .collect();
        // the tail after L terms is at most λ r^{L+1}/(1 − r); allow eigenvalue error on top
        for (len, value) in [10, 20, 40].iter().zip(&res) {
            let tail = l1 * r.powi(*len as i32 + 1) / (1.0 - r);
            prop_assert!(*value <= tail + 1e-9 * l1, "L={} residual {} tail {}", len, value, tail);
        }
    }

    #[test]
    fn enumerated_involutions_validate(n in 1usize..=7, mask in any::<u64>()) {
        if let Some(g) = connected_graph(n, mask) {
            let found = enumerate_involutions(&g).unwrap();
            prop_assert!(found.iter().filter(|f| f.is_identity).count() == 1);
            for f in found {
                prop_assert!(validate_involution(&g, &f.involution()).unwrap().is_ok());
            }
        }
    }
}

#[test]
fn mirror_build_examples() {
    let single = Graph::new(1, [], vec![5.0]).unwrap();
    let p2 = mirror_build(&single, &[(0, 0)], 0).unwrap();
    assert_eq!(p2.graph.edges(), &[(0, 1)]);
    assert_eq!(p2.graph.potentials(), &[5.0, 5.0]);

    let edge = Graph::new(2, [(0, 1)], vec![4.0, 0.0]).unwrap();
    let p4 = mirror_build(&edge, &[(1, 1)], 0).unwrap();
    let mut edges = p4.graph.edges().to_vec();
    edges.sort();
    assert_eq!(edges, vec![(0, 1), (1, 3), (2, 3)]);

    assert!(mirror_build(&Graph::path(2).unwrap(), &[], 0).is_err());
}
