use std::collections::BTreeSet;

use bohr_core::bohr::{bohr_deficiency, meets_all_subgroups_oracle};
use bohr_core::colorings::{
    build_cayley, characters_to_coloring, chromatic_number_exact, component_histogram,
    components_classify, coloring_to_avoiding_subgroup, hypergraph_chromatic, verify, CellPartition,
    Graph, Hypergraph, Target, Witness,
};
use bohr_core::families::{edge_vectors, fin_decode, fin_encode, LatticeWindow};
use bohr_core::fpgroup::{enum_codim_subgroups, gaussian_binomial, kernel_basis, FpMatrix, FpVec, Subgroup};
use bohr_core::setops::{
    delta2, delta2_brute, dfold_distinct_sumset, dfold_distinct_sumset_brute, difference_set,
    preimage_intersect, VecSet,
};
use proptest::prelude::*;

const PRIMES: [u8; 4] = [2, 3, 5, 7];

fn matrix(p: u8, rows: usize, cols: usize) -> impl Strategy<Value = FpMatrix> {
    prop::collection::vec(0..p, rows * cols).prop_map(move |e| FpMatrix::new(p, rows, cols, e).unwrap())
}

fn any_matrix() -> impl Strategy<Value = FpMatrix> {
    (prop::sample::select(PRIMES.to_vec()), 1usize..5, 1usize..6)
        .prop_flat_map(|(p, r, c)| matrix(p, r, c))
}

fn vecset(p: u8, n: usize, max: usize) -> impl Strategy<Value = VecSet> {
    let q = (p as u64).pow(n as u32);
    prop::collection::btree_set(0..q, 0..=max)
        .prop_map(move |idx| VecSet::new(p, n, idx.into_iter().map(|i| FpVec::from_index(p, n, i))).unwrap())
}

fn small_set() -> impl Strategy<Value = VecSet> {
    prop_oneof![vecset(2, 4, 10), vecset(3, 3, 10), vecset(5, 2, 10)]
}

fn graph(max_n: usize) -> impl Strategy<Value = Graph> {
    (1..=max_n).prop_flat_map(|n| {
        prop::collection::vec((0..n, 0..n), 0..=2 * n).prop_map(move |es| {
            let es: Vec<(usize, usize)> = es.into_iter().filter(|(u, v)| u != v).collect();
            Graph::from_edges(n, &es).unwrap()
        })
    })
}

/// Smallest `r` for which some assignment in `[0, r)^n` is proper.
fn brute_chi(g: &Graph) -> usize {
    let n = g.n();
    let edges = g.edges();
    (1..=n.max(1))
        .find(|&r| {
            let total = (r as u64).pow(n as u32);
            (0..total).any(|mut code| {
                let mut col = vec![0; n];
                for c in col.iter_mut() {
                    *c = (code % r as u64) as usize;
                    code /= r as u64;
                }
                edges.iter().all(|&(u, v)| col[u] != col[v])
            })
        })
        .unwrap()
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn rref_is_canonical_under_row_operations(m in any_matrix(), seed in any::<u64>()) {
        let (r1, rank1, _) = m.rref();
        // shuffle rows and add a multiple of one row to another
        let p = m.p();
        let mut rows: Vec<FpVec> = (0..m.rows()).map(|i| m.row_vec(i)).collect();
        let shift = (seed as usize) % rows.len();
        rows.rotate_left(shift);
        if rows.len() > 1 {
            let c = (seed % p as u64) as u8;
            let add = rows[1].scale(c);
            rows[0] = &rows[0] + &add;
        }
        let m2 = FpMatrix::from_rows(p, m.cols(), &rows).unwrap();
        let (r2, rank2, _) = m2.rref();
        prop_assert_eq!(rank1, rank2);
        prop_assert_eq!(r1, r2);
    }

    #[test]
    fn kernel_basis_has_the_right_size_and_is_killed(m in any_matrix()) {
        let basis = kernel_basis(&m);
        prop_assert_eq!(basis.len(), m.cols() - m.rank());
        for b in &basis {
            prop_assert!(m.apply(b).unwrap().is_zero());
        }
        let h = Subgroup::kernel_of(&m);
        prop_assert_eq!(h.dim(), basis.len());
        for b in &basis {
            prop_assert!(h.contains(b).unwrap());
        }
    }

    #[test]
    fn duality_counts(p in prop::sample::select(vec![2u8, 3]), n in 1usize..5, k in 0usize..5) {
        prop_assume!(k <= n);
        let list = enum_codim_subgroups(p, n, k).unwrap();
        prop_assert_eq!(list.len() as u128, gaussian_binomial(n, k, p));
        prop_assert_eq!(gaussian_binomial(n, k, p), gaussian_binomial(n, n - k, p));
        let uniq: BTreeSet<_> = list.iter().collect();
        prop_assert_eq!(uniq.len(), list.len());
        for h in &list {
            prop_assert_eq!(h.order().unwrap(), (p as u64).pow((n - k) as u32));
        }
    }

    #[test]
    fn delta2_inside_double_difference(a in small_set()) {
        let fast = delta2(&a);
        prop_assert_eq!(&fast, &delta2_brute(&a));
        let d = difference_set(&a, false);
        let dd = difference_set(&d, false);
        prop_assert!(fast.is_subset(&dd));
        if a.len() < 4 {
            prop_assert!(fast.is_empty());
        }
    }

    #[test]
    fn dfold_matches_brute_and_ignores_order(a in small_set(), d in 1usize..5) {
        let fast = dfold_distinct_sumset(&a, d).unwrap();
        prop_assert_eq!(&fast, &dfold_distinct_sumset_brute(&a, d).unwrap());
        let mut rev: Vec<FpVec> = a.elements().to_vec();
        rev.reverse();
        let a2 = VecSet::new(a.p(), a.dim(), rev).unwrap();
        prop_assert_eq!(&fast, &dfold_distinct_sumset(&a2, d).unwrap());
    }

    #[test]
    fn preimage_stays_inside_both_sets(
        rho in matrix(3, 2, 4),
        s in vecset(3, 2, 6),
        e in vecset(3, 4, 30),
    ) {
        let pre = preimage_intersect(&rho, &s, &e).unwrap();
        prop_assert!(pre.is_subset(&e));
        prop_assert!(pre.len() <= e.len());
        for x in &pre {
            prop_assert!(s.contains(&rho.apply(x).unwrap()));
        }
        for x in &e {
            if s.contains(&rho.apply(x).unwrap()) {
                prop_assert!(pre.contains(x));
            }
        }
    }

    #[test]
    fn deficiency_witness_and_monotonicity(s in small_set()) {
        let n = s.dim();
        let full = bohr_deficiency(&s, n).unwrap();
        if let Some(h) = full.witness() {
            prop_assert!(verify(Witness::Subgroup(h), Target::Set(&s)).unwrap().is_valid());
            prop_assert!(!s.meets(h));
        }
        // a deficient set stays deficient at every larger level it is scanned to
        if let Some(level) = full.deficient_at() {
            for k in 1..level {
                prop_assert!(meets_all_subgroups_oracle(&s, k).unwrap());
            }
            for k in level..=n {
                prop_assert!(!meets_all_subgroups_oracle(&s, k).unwrap());
            }
        }
        // shrinking the set never raises the level
        if let Some(first) = s.elements().first() {
            let smaller = VecSet::new(s.p(), n, s.elements().iter().filter(|x| *x != first).cloned()).unwrap();
            let sub = bohr_deficiency(&smaller, n).unwrap();
            match (full.deficient_at(), sub.deficient_at()) {
                (Some(a), Some(b)) => prop_assert!(b <= a),
                (Some(_), None) => prop_assert!(false, "subset became recurrent"),
                _ => {}
            }
        }
    }

    #[test]
    fn classification_ignores_vertex_names(g in graph(9), seed in any::<u64>()) {
        let n = g.n();
        let mut perm: Vec<usize> = (0..n).collect();
        let mut s = seed;
        for i in (1..n).rev() {
            s = s.wrapping_mul(6364136223846793005).wrapping_add(1442695040888963407);
            perm.swap(i, (s >> 33) as usize % (i + 1));
        }
        let h = g.permuted(&perm);
        prop_assert_eq!(
            component_histogram(&components_classify(&g)),
            component_histogram(&components_classify(&h))
        );
        prop_assert_eq!(chromatic_number_exact(&g).value(), chromatic_number_exact(&h).value());
    }

    #[test]
    fn exact_chi_matches_exhaustive(g in graph(7)) {
        let chi = chromatic_number_exact(&g);
        prop_assert_eq!(chi.value(), Some(brute_chi(&g)));
        if let bohr_core::Chromatic::Finite { coloring, .. } = &chi {
            prop_assert!(verify(Witness::Coloring(coloring), Target::Graph(&g)).unwrap().is_valid());
        }
    }

    #[test]
    fn image_never_lowers_chi(rho in matrix(2, 2, 3), r in vecset(2, 3, 4)) {
        prop_assume!(rho.rank() == 2);
        let big = build_cayley(&VecSet::everything(2, 3).unwrap(), &r).unwrap();
        let small = build_cayley(&VecSet::everything(2, 2).unwrap(), &r.image(&rho).unwrap()).unwrap();
        let inf = usize::MAX;
        let a = chromatic_number_exact(&big.graph).value().unwrap_or(inf);
        let b = chromatic_number_exact(&small.graph).value().unwrap_or(inf);
        prop_assert!(b >= a);
    }

    #[test]
    fn bridges_on_random_pair_families(
        n in 2usize..6,
        mask in any::<u32>(),
        labels in prop::collection::vec(0usize..4, 6),
    ) {
        let pairs: Vec<Vec<usize>> = (1..=n)
            .flat_map(|a| (a + 1..=n).map(move |b| vec![a, b]))
            .enumerate()
            .filter(|(i, _)| mask >> i & 1 == 1)
            .map(|(_, e)| e)
            .collect();
        let fam = Hypergraph::new(n, pairs).unwrap();
        let targets = edge_vectors(&fam, 2).unwrap();
        let part = CellPartition::from_labels(&labels[..n]);
        if verify(Witness::Partition(&part), Target::Hypergraph(&fam)).unwrap().is_valid() {
            let h = coloring_to_avoiding_subgroup(&part, &fam, 2).unwrap();
            prop_assert!(!targets.meets(&h));
            prop_assert!(h.codim() <= part.num_cells());
        }
        for k in 0..=n {
            for h in enum_codim_subgroups(2, n, k).unwrap() {
                if !targets.meets(&h) {
                    let c = characters_to_coloring(&h.annihilator_rows(), n).unwrap();
                    prop_assert!(verify(Witness::Partition(&c), Target::Hypergraph(&fam)).unwrap().is_valid());
                    prop_assert!(c.num_cells() <= 1 << k);
                }
            }
        }
        let (chi, cells) = hypergraph_chromatic(&fam).unwrap();
        prop_assert_eq!(chi, cells.num_cells().max(usize::from(n == 0)));
    }

    #[test]
    fn fin_encoding_is_a_homomorphism(w in 2usize..5, a in any::<u64>(), b in any::<u64>()) {
        let win = LatticeWindow::new(w).unwrap();
        let q = 1u64 << (w * w);
        let x = FpVec::from_index(2, w * w, a % q);
        let y = FpVec::from_index(2, w * w, b % q);
        let fx = fin_encode(&x, win).unwrap();
        let fy = fin_encode(&y, win).unwrap();
        prop_assert_eq!(fin_decode(&fx), x.clone());
        prop_assert_eq!(fin_encode(&(&x + &y), win).unwrap(), fx.symmetric_difference(&fy).unwrap());
        prop_assert_eq!(fx.len(), x.weight());
    }
}
