use bohr_core::colorings::{Graph, Hypergraph};
use bohr_core::experiments::*;
use bohr_core::families::{fin2_vertices, s_square_vectors};
use bohr_core::fpgroup::FpVec;
use bohr_core::setops::VecSet;
use bohr_core::Error;
use serde_json::json;

fn set(p: u8, n: usize, vs: &[&[i64]]) -> VecSet {
    VecSet::new(p, n, vs.iter().map(|v| FpVec::from_ints(p, v).unwrap())).unwrap()
}

/// Component sizes of a graph by plain union-find.
fn component_sizes(g: &Graph) -> Vec<usize> {
    let mut parent: Vec<usize> = (0..g.n()).collect();
    fn find(parent: &mut [usize], x: usize) -> usize {
        if parent[x] != x {
            let r = find(parent, parent[x]);
            parent[x] = r;
        }
        parent[x]
    }
    for (u, v) in g.edges() {
        let (a, b) = (find(&mut parent, u), find(&mut parent, v));
        parent[a] = b;
    }
    let mut sizes = std::collections::BTreeMap::new();
    for v in 0..g.n() {
        *sizes.entry(find(&mut parent, v)).or_insert(0) += 1;
    }
    let mut out: Vec<usize> = sizes.into_values().collect();
    out.sort();
    out
}

#[test]
fn s_square_w2_matches_direct_count() {
    // 6 two-point subsets of the 2x2 window; each is joined only to its complement
    let r = exp_s_square(2).unwrap();
    assert_eq!(r.summary["chi"], 2);
    assert_eq!(r.summary["vertices"], 6);
    let cay = bohr_core::build_cayley(&fin2_vertices(2).unwrap(), &s_square_vectors(2).unwrap()).unwrap();
    assert_eq!(component_sizes(&cay.graph), vec![2, 2, 2]);
    assert_eq!(r.summary["component_histogram"], json!({ "single_edge": 3 }));
    assert!(r.passed());
    assert_eq!(r.instances.len(), 6);
}

#[test]
fn s_square_w4_has_no_other_components() {
    let r = exp_s_square(4).unwrap();
    assert_eq!(r.summary["chi"], 2);
    let hist = r.summary["component_histogram"].as_object().unwrap();
    assert!(hist.keys().all(|k| ["singleton", "single_edge", "path"].contains(&k.as_str())));
    assert_eq!(r.validator("component_trichotomy").unwrap().failures, 0);
}

#[test]
fn roundtrip_single_pair() {
    let fam = Hypergraph::new(2, [vec![1, 2]]).unwrap();
    let r = exp_ep_roundtrip(2, &FamilySpec::Custom(fam), 0).unwrap();
    assert_eq!(r.summary["hypergraph_chi"], 2);
    let a = r.instances[0]["listed"].as_array().unwrap();
    // the only proper partition is {1},{2}, giving ker psi_1 ∩ ker psi_2 = {0}
    assert_eq!(a.len(), 1);
    assert_eq!(a[0]["codim"], 2);
    assert_eq!(a[0]["annihilator"], json!([[1, 0], [0, 1]]));
    assert!(r.passed());
}

#[test]
fn roundtrip_ap3_n4_p3() {
    let r = exp_ep_roundtrip(3, &FamilySpec::Ap3 { n: 4 }, 0).unwrap();
    assert_eq!(r.summary["a_partitions"], "exhaustive");
    assert_eq!(r.summary["b_sampled_levels"], json!([]));
    assert_eq!(r.summary["a_violations"], 0);
    assert_eq!(r.summary["b_violations"], 0);
    assert!(r.passed());
}

#[test]
fn roundtrip_gallai_w3_p2() {
    let r = exp_ep_roundtrip(2, &FamilySpec::GallaiSquares { w: 3 }, 0).unwrap();
    assert_eq!(r.summary["vertices"], 9);
    assert_eq!(r.summary["edge_size_equals_p"], false);
    assert!(r.summary["a_checked"].as_u64().unwrap() > 0);
    assert!(r.passed());
}

#[test]
fn roundtrip_guards() {
    assert!(matches!(exp_ep_roundtrip(7, &FamilySpec::Ap3 { n: 4 }, 0), Err(Error::Input(_))));
    assert!(matches!(
        exp_ep_roundtrip(2, &FamilySpec::GallaiSquares { w: 4 }, 0),
        Err(Error::ResourceGuard { .. })
    ));
}

#[test]
fn lift_transfer_zero_in_s() {
    let params = LiftParams { p: 2, d: 4, n: 2, m: 4, k_max: 2, seed: 0 };
    let r = exp_lift_transfer(&params, &set(2, 2, &[&[0, 0]])).unwrap();
    assert_eq!(r.summary["lifted"], json!([[1, 1, 1, 1]]));
    assert!(r.passed());
    let r = exp_lift_transfer(&params, &set(2, 2, &[&[0, 1], &[1, 1]])).unwrap();
    assert_eq!(r.summary["lifted_size"], 0);
    assert!(r.passed());
}

#[test]
fn lift_transfer_p3_maps_into_s() {
    let s = set(3, 1, &[&[1]]);
    for seed in 0..3 {
        let params = LiftParams { p: 3, d: 3, n: 1, m: 9, k_max: 1, seed };
        let r = exp_lift_transfer(&params, &s).unwrap();
        assert!(r.summary["lifted_size"].as_u64().unwrap() > 0);
        let v = r.validator("lifted_in_e_d_and_maps_into_s").unwrap();
        assert!(v.passed && v.checked > 0);
    }
}

#[test]
fn lift_transfer_preconditions() {
    let s = set(2, 2, &[&[0, 0]]);
    let mk = |d, m| LiftParams { p: 2, d, n: 2, m, k_max: 1, seed: 0 };
    assert!(matches!(exp_lift_transfer(&mk(4, 3), &s), Err(Error::Input(_))));
    assert!(matches!(exp_lift_transfer(&mk(3, 4), &s), Err(Error::Input(_))));
    assert!(matches!(exp_lift_transfer(&mk(2, 4), &s), Err(Error::Input(_))));
}

#[test]
fn poincare_small_cases() {
    let r = exp_poincare(&PoincareParams { p: 2, n: 4, k: 1, trials: 50, seed: 1 }).unwrap();
    assert_eq!(r.summary["set_size"], 3);
    assert_eq!(r.summary["failures"], 0);
    assert!(r.passed());
    let r = exp_poincare(&PoincareParams { p: 2, n: 5, k: 2, trials: 500, seed: 2 }).unwrap();
    assert_eq!(r.summary["failures"], 0);
    assert!(matches!(
        exp_poincare(&PoincareParams { p: 2, n: 3, k: 3, trials: 1, seed: 0 }),
        Err(Error::Input(_))
    ));
    assert!(matches!(
        exp_poincare(&PoincareParams { p: 2, n: 3, k: 1, trials: 0, seed: 0 }),
        Err(Error::Input(_))
    ));
}

#[test]
fn profile_scan_examples() {
    let scan = |family, n_min, n_max| {
        exp_profile_scan(&ProfileParams { p: 2, family, n_min, n_max, k_max: 3, r_max: 8, node_budget: 100_000 })
            .unwrap()
    };
    let r = scan(ProfileFamily::Weight { d: 1 }, 2, 6);
    for inst in &r.instances {
        assert_eq!(inst["deficiency_level"], 1);
        assert_eq!(inst["chi"], 2);
    }
    let r = scan(ProfileFamily::WeightWithZero { d: 2 }, 2, 4);
    for inst in &r.instances {
        assert_eq!(inst["chi"], "infinite");
        assert_eq!(inst["deficiency_level"], json!(null));
    }
    let r = scan(ProfileFamily::Weight { d: 2 }, 2, 8);
    let levels: Vec<u64> = r.instances.iter().map(|i| i["deficiency_level"].as_u64().unwrap()).collect();
    assert!(levels.windows(2).all(|w| w[0] <= w[1]));
    assert!(matches!(
        exp_profile_scan(&ProfileParams {
            p: 2,
            family: ProfileFamily::Weight { d: 2 },
            n_min: 2,
            n_max: 13,
            k_max: 1,
            r_max: 4,
            node_budget: 10
        }),
        Err(Error::ResourceGuard { .. })
    ));
}

#[test]
fn bog_scan_examples() {
    let r = exp_bog_scan(&BogParams { p: 3, d: 3, n: 2, r: 1, covers: 10, budget: 10_000, seed: 0 }).unwrap();
    assert_eq!(r.summary["enumeration"], "exhaustive");
    assert_eq!(r.instances[0]["least_codim"], 0);
    let r = exp_bog_scan(&BogParams { p: 3, d: 3, n: 2, r: 2, covers: 200, budget: 100_000, seed: 4 }).unwrap();
    assert_eq!(r.instances.len(), 200);
    assert!(r.instances.iter().all(|i| !i["least_codim"].is_null()));
    assert!(r.passed());
    assert!(matches!(
        exp_bog_scan(&BogParams { p: 2, d: 4, n: 13, r: 2, covers: 1, budget: 1, seed: 0 }),
        Err(Error::ResourceGuard { .. })
    ));
}

#[test]
fn singleton_cells_have_empty_sumsets() {
    // r = 9 cells over a 9-element group: exhaustive would be 9^9, so covers are sampled;
    // a cover with every cell of size <= 2 can never contain a sumset of 3 distinct elements
    let r = exp_bog_scan(&BogParams { p: 3, d: 3, n: 2, r: 9, covers: 30, budget: 10_000, seed: 1 }).unwrap();
    for inst in &r.instances {
        let sizes: Vec<u64> = serde_json::from_value(inst["cell_sizes"].clone()).unwrap();
        if sizes.iter().all(|&s| s < 3) {
            assert!(inst["least_codim"].is_null());
        }
    }
}

#[test]
fn reports_are_reproducible_and_seed_sensitive() {
    let a = exp_poincare(&PoincareParams { p: 3, n: 3, k: 1, trials: 20, seed: 5 }).unwrap();
    let b = exp_poincare(&PoincareParams { p: 3, n: 3, k: 1, trials: 20, seed: 5 }).unwrap();
    assert_eq!(a.to_json_string(), b.to_json_string());
    let c = exp_poincare(&PoincareParams { p: 3, n: 3, k: 1, trials: 20, seed: 6 }).unwrap();
    assert_ne!(a.input_digest, c.input_digest);
    assert!(a.to_json_string().contains("\"schema_version\": 1"));
    assert!(!a.to_json_string().contains("wall_time_ms"));
    assert!(a.with_wall_time(3).to_json_string().contains("wall_time_ms"));
}
