mod common;

use nalgebra::DMatrix;
use proptest::prelude::*;
use rand::Rng;

use qcorr::graph::Graph;
use qcorr::planarity::{is_planar, quick_is_planar, Planarity};
use qcorr::pmfg::build_pmfg;
use qcorr::qdcca::{rho_q, QCorrMatrix};

fn random_matrix(n: usize, seed: u64) -> DMatrix<f64> {
    let mut r = common::rng(seed);
    let mut rho = DMatrix::identity(n, n);
    for i in 0..n {
        for j in i + 1..n {
            let v = r.random_range(-1.0..1.0);
            rho[(i, j)] = v;
            rho[(j, i)] = v;
        }
    }
    rho
}

fn matrix(rho: DMatrix<f64>) -> QCorrMatrix {
    let tickers = (0..rho.nrows()).map(|i| format!("T{i}")).collect();
    QCorrMatrix::new(2.0, 30, 2, tickers, rho).unwrap()
}

fn graph_strategy() -> impl Strategy<Value = Graph> {
    (1usize..11).prop_flat_map(|n| {
        let pairs = n * (n - 1) / 2;
        proptest::collection::vec(any::<bool>(), pairs).prop_map(move |keep| {
            let mut g = Graph::new(n);
            let mut k = 0;
            for i in 0..n {
                for j in i + 1..n {
                    if keep[k] {
                        g.add_edge(i, j);
                    }
                    k += 1;
                }
            }
            g
        })
    })
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(400))]

    #[test]
    fn planarity_certificates_check_out(g in graph_strategy()) {
        match is_planar(&g) {
            Planarity::Planar(emb) => {
                prop_assert!(g.n() < 3 || g.n_edges() <= 3 * g.n() - 6);
                prop_assert_eq!(common::check_embedding(&g, &emb.rotation), Ok(()));
                prop_assert!(quick_is_planar(&g));
            }
            Planarity::NonPlanar(k) => {
                prop_assert!(common::check_kuratowski(&g, &k.edges).is_ok(), "{:?}", common::check_kuratowski(&g, &k.edges));
                prop_assert!(!quick_is_planar(&g));
            }
        }
    }

    #[test]
    fn pmfg_is_maximal_planar_and_holds_the_tree(n in 3usize..30, seed in any::<u64>()) {
        let rho = random_matrix(n, seed);
        let g = build_pmfg(&matrix(rho.clone())).unwrap().graph();
        prop_assert_eq!(g.n_edges(), 3 * (n - 2));
        match is_planar(&g) {
            Planarity::Planar(emb) => prop_assert_eq!(common::check_embedding(&g, &emb.rotation), Ok(())),
            Planarity::NonPlanar(_) => prop_assert!(false, "PMFG is not planar"),
        }
        for (i, j) in common::kruskal_max(n, |i, j| rho[(i, j)]) {
            prop_assert!(g.has_edge(i, j));
        }
    }

    #[test]
    fn dcca_matches_plain_oracle(seed in any::<u64>(), s in 8usize..200, m in 1usize..4, c in -0.95f64..0.95) {
        let (x, y) = common::gaussian_pair(seed, 900, c);
        let got = rho_q(&x, &y, 2.0, s, m).unwrap();
        prop_assert!((got - common::dcca_oracle(&x, &y, s, m)).abs() < 1e-9);
    }
}

#[test]
fn pmfg_on_401_assets_has_1197_edges() {
    let g = build_pmfg(&matrix(random_matrix(401, 5))).unwrap().graph();
    assert_eq!(g.n_edges(), 1197);
    assert!(quick_is_planar(&g));
}

#[test]
fn preferential_attachment_is_moderately_heterogeneous() {
    let g = common::barabasi_albert(1000, 3, 1);
    let gamma = qcorr::pmfg::heterogeneity_index(&g).unwrap();
    assert!((0.05..=0.2).contains(&gamma), "{gamma}");
}

#[test]
fn monotone_transform_keeps_graph_and_unweighted_ranks() {
    use qcorr::portfolio::{centrality_eta, Metric, TieRule};
    let rho = random_matrix(30, 17);
    let cubed = rho.map(|v| v * v * v);
    let a = build_pmfg(&matrix(rho)).unwrap();
    let b = build_pmfg(&matrix(cubed)).unwrap();
    let edges = |p: &qcorr::pmfg::PmfgGraph| p.edges.iter().map(|e| (e.0, e.1)).collect::<Vec<_>>();
    assert_eq!(edges(&a), edges(&b));
    let (sa, sb) = (centrality_eta(&a, TieRule::Average).unwrap(), centrality_eta(&b, TieRule::Average).unwrap());
    for metric in Metric::ALL {
        assert_eq!(sa.ranks(metric, false), sb.ranks(metric, false), "{metric:?}");
    }
}
