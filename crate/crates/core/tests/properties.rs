mod common;

use proptest::prelude::*;
use rand::Rng;
use summit_core::model::{coverage, CoverageIndex};
use summit_core::{Cluster, Dataset, Slot};

fn slot(domain: u32) -> impl Strategy<Value = Slot> {
    prop_oneof![1 => Just(Slot::Star), 2 => (0..domain).prop_map(Slot::Concrete)]
}

fn triple() -> impl Strategy<Value = (Cluster, Cluster, Cluster)> {
    (1usize..=6).prop_flat_map(|m| {
        let c = || prop::collection::vec(slot(3), m).prop_map(Cluster::from);
        (c(), c(), c())
    })
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(10_000))]

    #[test]
    fn distance_is_a_metric((x, y, z) in triple()) {
        let dxy = x.distance(&y).unwrap();
        prop_assert_eq!(dxy, y.distance(&x).unwrap());
        prop_assert!(x.distance(&z).unwrap() <= dxy + y.distance(&z).unwrap());
        let star_free = x.slots().iter().all(|s| !s.is_star());
        prop_assert_eq!(dxy == 0, x == y && star_free);
    }

    #[test]
    fn lca_covers_both_and_is_least((x, y, z) in triple()) {
        let l = x.lca(&y).unwrap();
        prop_assert!(l.covers(&x).unwrap() && l.covers(&y).unwrap());
        // any common ancestor of x and y covers their lca
        if z.covers(&x).unwrap() && z.covers(&y).unwrap() {
            prop_assert!(z.covers(&l).unwrap());
        }
    }

    #[test]
    fn ancestor_never_gets_closer((x, y, z) in triple()) {
        // z-ancestor of x: lca(x, z) covers x
        let up = x.lca(&z).unwrap();
        prop_assert!(up.distance(&y).unwrap() >= x.distance(&y).unwrap());
    }
}

#[test]
fn coverage_is_monotone_and_exact() {
    let mut rng = common::rng(3);
    for _ in 0..200 {
        let ds = common::dataset(&mut rng, 60, 4, 3);
        let a = common::cluster(&mut rng, ds.m(), 3, 0.4);
        let b = common::cluster(&mut rng, ds.m(), 3, 0.4);
        let (ca, cb) = (coverage(&a, &ds), coverage(&b, &ds));
        assert_eq!(ca, common::naive_cover(&a, &ds));
        if a.covers(&b).unwrap() {
            assert!(cb.iter().all(|r| ca.contains(r)));
        }
    }
}

/// Replacing one cluster of a set by one of its ancestors never lowers the
/// minimum pairwise distance of the set.
#[test]
fn ancestor_replacement_keeps_min_distance() {
    let mut rng = common::rng(11);
    let min_dist = |cs: &[Cluster]| {
        let mut best = usize::MAX;
        for i in 0..cs.len() {
            for j in i + 1..cs.len() {
                best = best.min(cs[i].distance(&cs[j]).unwrap());
            }
        }
        best
    };
    for _ in 0..1000 {
        let m = rng.gen_range(1..=6);
        let count = rng.gen_range(2..=5);
        let mut cs: Vec<Cluster> = (0..count).map(|_| common::cluster(&mut rng, m, 3, 0.3)).collect();
        let before = min_dist(&cs);
        let i = rng.gen_range(0..count);
        let mut slots = cs[i].slots().to_vec();
        for s in slots.iter_mut() {
            if rng.gen_bool(0.4) {
                *s = Slot::Star;
            }
        }
        let up = Cluster::from(slots);
        assert!(up.covers(&cs[i]).unwrap());
        cs[i] = up;
        assert!(min_dist(&cs) >= before);
    }
}

#[test]
fn candidates_are_closed_under_lca_and_index_is_exact() {
    let mut rng = common::rng(5);
    for _ in 0..100 {
        let ds = common::dataset(&mut rng, 40, 4, 3);
        let l = rng.gen_range(1..=ds.n());
        let index = CoverageIndex::generate(&ds, l).unwrap();
        let top = ds.top_l(l).unwrap();
        assert!(index.id_of(&Cluster::all_star(ds.m())).is_some());
        for (id, c) in index.candidates().iter().enumerate() {
            let rows = index.rows_of(id as u32);
            assert_eq!(rows, common::naive_cover(c, &ds).as_slice());
            assert!(rows.iter().any(|r| top.contains(r)));
            for &r in rows {
                assert!(index.candidates_of_row(r).contains(&(id as u32)));
            }
        }
        let n = index.len();
        for _ in 0..50 {
            let a = index.cluster(rng.gen_range(0..n) as u32);
            let b = index.cluster(rng.gen_range(0..n) as u32);
            assert!(index.id_of(&a.lca(b).unwrap()).is_some());
        }
        let want: usize = {
            let mut set = std::collections::HashSet::new();
            for &r in top {
                for mask in 0u32..(1 << ds.m()) {
                    set.insert(Cluster::masked(&ds.row(r).codes, mask));
                }
            }
            set.len()
        };
        assert_eq!(index.len(), want);
    }
}

#[test]
fn encoding_is_deterministic() {
    let table = summit_core::fixtures::synthetic_table(summit_core::fixtures::Synthetic {
        n: 50,
        m: 3,
        domain: 4,
        seed: 8,
    });
    let a = Dataset::encode(&table, false).unwrap();
    let b = Dataset::encode(&table, false).unwrap();
    assert_eq!(a, b);
    let ia = CoverageIndex::generate(&a, 10).unwrap();
    let ib = CoverageIndex::generate(&b, 10).unwrap();
    assert_eq!(ia.candidates(), ib.candidates());
}

#[test]
fn capacity_limit_on_wide_data() {
    let table = summit_core::fixtures::synthetic_table(summit_core::fixtures::Synthetic {
        n: 5,
        m: 17,
        domain: 2,
        seed: 1,
    });
    let ds = Dataset::encode(&table, false).unwrap();
    assert!(matches!(CoverageIndex::generate(&ds, 2), Err(summit_core::Error::Capacity(_))));
}
