use std::collections::BTreeSet;

use nalgebra::DMatrix;
use proptest::prelude::*;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use szegedy_core::evolution::{convergence_scan, discrete_evolve, vertex_schrodinger_check};
use szegedy_core::linalg::{orthonormalize, random_unit_vector, spectral_norm, MaxModulus};
use szegedy_core::spectral::spectrum_report;
use szegedy_core::{CMatrix, CoinFamily, ErrorMetric, Graph, WalkOperators, C64};

fn connected_graph() -> impl Strategy<Value = Graph> {
    (2usize..8).prop_flat_map(|n| {
        let tree = proptest::collection::vec(any::<prop::sample::Index>(), n - 1);
        let extra = proptest::collection::vec((0..n, 0..n), 0..8);
        (Just(n), tree, extra).prop_map(|(n, tree, extra)| {
            let mut set = BTreeSet::new();
            for (v, pick) in tree.iter().enumerate() {
                set.insert((pick.index(v + 1), v + 1));
            }
            for (u, v) in extra {
                if u != v {
                    set.insert((u.min(v), u.max(v)));
                }
            }
            let edges: Vec<_> = set.into_iter().collect();
            Graph::from_edges(n, &edges).unwrap()
        })
    })
}

/// Random orthonormal families with `1 ≤ p_u ≤ deg(u)`.
fn random_coin(g: &Graph, seed: u64) -> CoinFamily {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let rows: Vec<Vec<Vec<C64>>> = (0..g.n_vertices())
        .map(|u| {
            let deg = g.degree(u);
            let p = rng.gen_range(1..=deg);
            let raw = CMatrix::from_fn(deg, p, |_, _| {
                C64::new(rng.gen_range(-1.0..1.0), rng.gen_range(-1.0..1.0))
            });
            let q = orthonormalize(&raw);
            (0..p)
                .map(|j| q.column(j).iter().copied().collect())
                .collect()
        })
        .collect();
    CoinFamily::from_rows(g, &rows).unwrap()
}

fn instance() -> impl Strategy<Value = WalkOperators> {
    (connected_graph(), any::<u64>(), any::<bool>()).prop_map(|(g, seed, grover)| {
        let coin = if grover {
            CoinFamily::grover(&g)
        } else {
            random_coin(&g, seed)
        };
        WalkOperators::with_dense(g, coin).unwrap()
    })
}

fn eye(n: usize) -> CMatrix {
    CMatrix::identity(n, n)
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(48))]

    #[test]
    fn boundary_is_coisometry(w in instance()) {
        let dn = w.dense().unwrap();
        let d = &dn.boundary;
        let n = w.n_arcs();
        prop_assert!(spectral_norm(&(d * d.adjoint() - eye(w.vertex_dim()))) < 1e-12);
        prop_assert!(spectral_norm(&(&dn.coin - (d.adjoint() * d * C64::new(2.0, 0.0) - eye(n)))) < 1e-12);
        prop_assert!(spectral_norm(&(&dn.coin * &dn.coin - eye(n))) < 1e-12);
    }

    #[test]
    fn hamiltonian_is_bounded_and_intertwines(w in instance()) {
        let dn = w.dense().unwrap();
        let h = &dn.hamiltonian;
        prop_assert!((h - h.adjoint()).max_modulus() < 1e-15);
        prop_assert!(spectral_norm(h) <= 1.0 + 1e-12);
        prop_assert!(spectral_norm(&(h * &dn.lifted - &dn.lifted * &dn.tilde_t)) < 1e-11);
        let ds = dn.boundary.adjoint();
        prop_assert!(spectral_norm(&(h * &ds - &ds * &dn.discriminant)) < 1e-11);
        prop_assert!((w.discriminant_assemble() - &dn.discriminant).max_modulus() < 1e-13);
    }

    #[test]
    fn discrete_walk_is_unitary(w in instance(), eps in 0.0f64..1.0, steps in 0usize..20, seed in any::<u64>()) {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let psi = random_unit_vector(&mut rng, w.n_arcs());
        let out = discrete_evolve(&w, &psi, eps, steps).unwrap();
        prop_assert!((out.norm() - 1.0).abs() < 1e-12);
        let dense = w.step_matrix(eps).unwrap() * &psi;
        prop_assert!((dense - w.step_apply(eps, &psi).unwrap()).max_modulus() < 1e-13);
    }

    #[test]
    fn vertex_walk_is_reproduced(w in instance(), t in 0.0f64..3.0, seed in any::<u64>()) {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let g0 = random_unit_vector(&mut rng, w.vertex_dim());
        prop_assert!(vertex_schrodinger_check(&w, &g0, t).unwrap() < 1e-10);
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(24))]

    #[test]
    fn spectrum_matches_prediction(w in instance()) {
        let r = spectrum_report(&w).unwrap();
        prop_assert!(r.multisets_match(), "unmatched {:?}", r.unmatched());
        prop_assert!(r.dimensions_add_up());
        prop_assert!(r.max_residual < 1e-8);
        prop_assert!(r.max_eigenvector_residual < 1e-9);
        prop_assert!(r.birth_eigen_residual < 1e-10);
        prop_assert!(r.pass, "{:?}", r);
        let total: usize = r.eig_h.iter().map(|c| c.multiplicity).sum();
        prop_assert_eq!(total, w.n_arcs());
        let t_total: usize = r.eig_t.iter().map(|c| c.multiplicity).sum();
        prop_assert_eq!(t_total, w.vertex_dim());
    }

    #[test]
    fn convergence_error_decreases(w in instance()) {
        let rec = convergence_scan(&w, 1.0, &[16, 32, 64, 128], ErrorMetric::OperatorNorm).unwrap();
        prop_assert!(rec.is_monotone_from(16), "{:?}", rec.errors);
        prop_assert!(rec.fitted_slope.unwrap() <= -0.8);
    }

    #[test]
    fn hamiltonian_coin_embeds_matrix(g in connected_graph(), seed in any::<u64>()) {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let n = g.n_vertices();
        let mut h = DMatrix::zeros(n, n);
        for &(u, v) in g.edges() {
            let x = rng.gen_range(0.05..3.0);
            h[(u, v)] = x;
            h[(v, u)] = x;
        }
        let coin = CoinFamily::from_hamiltonian(&g, &h).unwrap();
        let lambda = coin.lambda_max().unwrap();
        let w = WalkOperators::with_dense(g, coin).unwrap();
        let expect = CMatrix::from_fn(n, n, |r, c| C64::new(h[(r, c)] / lambda, 0.0));
        prop_assert!(spectral_norm(&(&w.dense().unwrap().discriminant - expect)) < 1e-10);
    }
}
