use std::collections::BTreeMap;

use nalgebra::SymmetricEigen;
use proptest::prelude::*;

use lapdict::graphgen::{
    assign_weights, gen_sbm, gen_watts_strogatz, implant_anomaly, laplacian, unvec_rows, vec_rows,
};
use lapdict::rng::seeded;
use lapdict::sparse::{project_simplex_type, SimplexTypeSet};

fn row_set_case() -> impl Strategy<Value = (Vec<f64>, usize)> {
    prop::collection::vec(-100.0f64..100.0, 1..16).prop_flat_map(|v| {
        let m = v.len();
        (Just(v), 0..m)
    })
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(256))]

    #[test]
    fn projection_is_feasible_and_idempotent((v, ell) in row_set_case()) {
        let p = project_simplex_type(&v, ell);
        prop_assert!(SimplexTypeSet::new(v.len(), ell).contains(&p, 1e-9));
        let pp = project_simplex_type(&p, ell);
        for (a, b) in p.iter().zip(&pp) {
            prop_assert!((a - b).abs() <= 1e-12);
        }
    }

    #[test]
    fn projection_is_no_farther_than_any_feasible_point((v, ell) in row_set_case(), seed in any::<u64>()) {
        let p = project_simplex_type(&v, ell);
        let dist = |d: &[f64]| d.iter().zip(&v).map(|(a, b)| (a - b).powi(2)).sum::<f64>();
        let mut rng = seeded(seed);
        for _ in 0..20 {
            let w: Vec<f64> = (0..v.len()).map(|_| rand::Rng::random_range(&mut rng, -100.0..100.0)).collect();
            let q = project_simplex_type(&w, ell);
            prop_assert!(dist(&p) <= dist(&q) + 1e-9);
        }
    }

    #[test]
    fn laplacians_are_valid(n in 2usize..30, modules in 1usize..5, seed in any::<u64>()) {
        let modules = modules.min(n);
        let mut rng = seeded(seed);
        let g = assign_weights(&gen_sbm(n, modules, 0.7, 0.1, &mut rng).unwrap(), &mut rng);
        let l = laplacian(&g);
        let a = l.matrix();
        prop_assert!(l.check().is_ok());
        let total: f64 = g.edges().iter().map(|e| e.weight).sum();
        prop_assert!((a.trace() - 2.0 * total).abs() <= 1e-9 * (1.0 + total));
        for i in 0..n {
            prop_assert!(a.row(i).sum().abs() <= 1e-9 * (1.0 + a[(i, i)]));
            for j in 0..n {
                prop_assert_eq!(a[(i, j)], a[(j, i)]);
                if i != j {
                    prop_assert!(a[(i, j)] <= 0.0);
                }
            }
        }
        let min = SymmetricEigen::new(a.clone()).eigenvalues.min();
        prop_assert!(min >= -1e-9 * (1.0 + a.trace()));
        prop_assert_eq!(unvec_rows(vec_rows(a).as_slice()).unwrap(), a.clone());
    }

    #[test]
    fn watts_strogatz_keeps_edge_count(half_k in 0usize..4, extra in 1usize..20, beta in 0.0f64..=1.0, seed in any::<u64>()) {
        let k = 2 * half_k;
        let n = k + extra;
        let g = gen_watts_strogatz(n, k, beta, &mut seeded(seed)).unwrap();
        prop_assert_eq!(g.edges().len(), n * k / 2);
        prop_assert!(g.edges().iter().all(|e| e.u < e.v && e.v < n));
    }

    #[test]
    fn implant_preserves_host_outside_the_subset(n in 12usize..40, a in 4usize..12, seed in any::<u64>()) {
        let mut rng = seeded(seed);
        let host = assign_weights(&gen_sbm(n, 3, 0.8, 0.1, &mut rng).unwrap(), &mut rng);
        let ws = gen_watts_strogatz(a, 2, 0.3, &mut rng).unwrap();
        let imp = implant_anomaly(&host, &ws, &mut rng).unwrap();
        let mut inside = vec![None; n];
        for (i, &s) in imp.nodes.iter().enumerate() {
            prop_assert!(inside[s].is_none());
            inside[s] = Some(i);
        }
        let key = |u: usize, v: usize| (u.min(v), u.max(v));
        let got: BTreeMap<(usize, usize), f64> = imp.graph.edges().iter().map(|e| ((e.u, e.v), e.weight)).collect();
        let mut want = BTreeMap::new();
        for e in host.edges() {
            if inside[e.u].is_none() || inside[e.v].is_none() {
                want.insert((e.u, e.v), e.weight);
            }
        }
        for e in ws.edges() {
            want.insert(key(imp.nodes[e.u], imp.nodes[e.v]), e.weight);
        }
        prop_assert_eq!(got, want);
    }
}
