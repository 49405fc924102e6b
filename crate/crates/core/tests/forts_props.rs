use bootperc::forts::{blue_fort, red_coloring, BoundaryMode, RedOutcome, DEFAULT_FORT_BUDGET};
use bootperc::{
    find_min_fort, gen_greedy_fortfree_tree, gen_gw_tree, is_fort, Error, OffspringDistribution, RngSeed, RootedTree,
};
use proptest::prelude::*;

fn random_tree(seeds: &[usize]) -> RootedTree {
    let parents: Vec<Option<usize>> =
        (0..=seeds.len()).map(|v| if v == 0 { None } else { Some(seeds[v - 1] % v) }).collect();
    RootedTree::from_parents(&parents, None).unwrap()
}

proptest! {
    #[test]
    fn blue_certificates_are_forts(seeds in proptest::collection::vec(0usize..1000, 1..60), x_seed in 0usize..1000, r in 1usize..4, k in 2usize..4) {
        let t = random_tree(&seeds);
        let x = x_seed % t.vertex_count();
        match blue_fort(&t, x, r, k) {
            Ok(cert) => {
                prop_assert_eq!(cert.k, k - 1);
                prop_assert!(cert.verify(t.graph()));
                for &v in &cert.vertices {
                    prop_assert!(t.is_ancestor(x, v));
                    prop_assert!(t.depth(v) <= t.depth(x) + r);
                }
            }
            Err(Error::Precondition(_)) => {
                let level = t.level_set(x, r).len() as f64;
                let kf = k as f64;
                let limit = if x == t.root() { kf.powi(r as i32) } else { (kf - 1.0) * kf.powi(r as i32 - 1) };
                prop_assert!(level >= limit);
            }
            Err(e) => prop_assert!(false, "unexpected error {e}"),
        }
    }

    #[test]
    fn red_witnesses_are_forts(seeds in proptest::collection::vec(0usize..1000, 1..80), k in 1usize..4) {
        let t = random_tree(&seeds);
        for mode in [BoundaryMode::Open, BoundaryMode::Closed] {
            match red_coloring(&t, k, mode) {
                Ok(r) => match r.outcome {
                    RedOutcome::Fort(f) => {
                        prop_assert!(f.verify(t.graph()));
                        prop_assert!(f.vertices.contains(&t.root()));
                    }
                    RedOutcome::KarySubtree(s) => {
                        prop_assert!(t.graph().is_connected_subset(&s));
                        for &v in &s {
                            if !t.is_boundary(v) {
                                prop_assert_eq!(t.children(v).filter(|w| s.contains(w)).count(), k);
                            }
                        }
                    }
                },
                Err(Error::Inconclusive(_)) => prop_assert_eq!(t.vertex_count(), 1),
                Err(e) => prop_assert!(false, "unexpected error {e}"),
            }
        }
    }
}

#[test]
fn greedy_trees_have_no_small_interior_forts() {
    for n in 1..=8 {
        let depth = if n <= 4 { 12 } else { 10 };
        let t = gen_greedy_fortfree_tree(n, depth).unwrap();
        let interior = t.interior();
        assert_eq!(find_min_fort(t.graph(), 1, n, Some(&interior), DEFAULT_FORT_BUDGET).unwrap(), None, "N = {n}");
        // the bound is tight: a fort of size n + 1 exists once the tree is deep enough
        let f = find_min_fort(t.graph(), 1, n + 1, Some(&interior), DEFAULT_FORT_BUDGET).unwrap();
        assert_eq!(f.map(|f| f.len()), Some(n + 1), "N = {n}");
    }
}

#[test]
fn greedy_tree_red_colouring_never_finds_small_forts() {
    let t = gen_greedy_fortfree_tree(4, 12).unwrap();
    let r = red_coloring(&t, 2, BoundaryMode::Open).unwrap();
    match r.outcome {
        RedOutcome::KarySubtree(s) => assert!(s.contains(&t.root())),
        RedOutcome::Fort(f) => assert!(f.len() > 4),
    }
}

#[test]
fn gw_leaves_are_one_forts() {
    let dist = OffspringDistribution::parse("0:0.3,2:0.7").unwrap();
    for seed in 0..20 {
        let t = gen_gw_tree(&dist, 6, RngSeed(seed)).unwrap();
        for v in 0..t.vertex_count() {
            if t.child_count(v) == 0 && !t.is_boundary(v) && v != t.root() {
                assert!(is_fort(t.graph(), &[v], 1).unwrap());
            }
        }
    }
}
