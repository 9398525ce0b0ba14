use rand::seq::SliceRandom;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::model::{Cluster, Code, Dataset};

/// Iteration cap for k-modes seeding.
pub const KMODES_MAX_ITERS: usize = 50;

/// Optional pre-pass feeding initial clusters to the fixed-order scan.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "lowercase")]
pub enum Seeding {
    #[default]
    None,
    /// `count` distinct top-L elements drawn uniformly.
    Random { seed: u64 },
    /// k-modes over the top-L codes, each cluster summarized by its LCA.
    Kmodes { seed: u64, iters: usize },
}

impl Seeding {
    pub fn seed(&self) -> Option<u64> {
        match *self {
            Seeding::None => None,
            Seeding::Random { seed } | Seeding::Kmodes { seed, .. } => Some(seed),
        }
    }
}

/// Initial clusters for `top` (row indices in rank order). Random seeding
/// falls back to all of `top` when `count` exceeds it.
pub fn seed_clusters(ds: &Dataset, top: &[usize], seeding: Seeding, count: usize) -> Vec<Cluster> {
    match seeding {
        Seeding::None => Vec::new(),
        Seeding::Random { seed } => {
            let mut rng = ChaCha8Rng::seed_from_u64(seed);
            let count = count.min(top.len());
            top.choose_multiple(&mut rng, count).map(|&r| ds.singleton(r)).collect()
        }
        Seeding::Kmodes { seed, iters } => {
            let points: Vec<&[Code]> = top.iter().map(|&r| &*ds.row(r).codes).collect();
            let assignment = kmodes(&points, count, seed, iters);
            let mut groups: Vec<Option<Cluster>> = vec![None; count.min(points.len())];
            for (p, &g) in points.iter().zip(&assignment) {
                let single = Cluster::singleton(p);
                groups[g] = Some(match groups[g].take() {
                    None => single,
                    Some(acc) => acc.lca_unchecked(&single),
                });
            }
            groups.into_iter().flatten().collect()
        }
    }
}

fn hamming(a: &[Code], b: &[Code]) -> usize {
    a.iter().zip(b).filter(|(x, y)| x != y).count()
}

/// Plain k-modes: Hamming assignment (lowest index on ties), per-attribute
/// mode update (smallest code on ties). Returns the group of every point.
pub(crate) fn kmodes(points: &[&[Code]], k: usize, seed: u64, iters: usize) -> Vec<usize> {
    let k = k.min(points.len());
    if k == 0 {
        return Vec::new();
    }
    let m = points[0].len();
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let init: Vec<usize> = rand::seq::index::sample(&mut rng, points.len(), k).into_vec();
    let mut modes: Vec<Vec<Code>> = init.iter().map(|&i| points[i].to_vec()).collect();
    let mut assignment = vec![usize::MAX; points.len()];

    for _ in 0..iters.max(1) {
        let mut changed = false;
        for (p, slot) in points.iter().zip(assignment.iter_mut()) {
            let g = (0..k).min_by_key(|&g| (hamming(p, &modes[g]), g)).expect("k > 0");
            if *slot != g {
                *slot = g;
                changed = true;
            }
        }
        if !changed {
            break;
        }
        for (g, mode) in modes.iter_mut().enumerate() {
            let members: Vec<&[Code]> =
                points.iter().zip(&assignment).filter(|(_, &a)| a == g).map(|(p, _)| *p).collect();
            if members.is_empty() {
                continue;
            }
            for (i, slot) in mode.iter_mut().enumerate().take(m) {
                let mut codes: Vec<Code> = members.iter().map(|p| p[i]).collect();
                codes.sort_unstable();
                let mut best = (0usize, codes[0]);
                let mut run = (0usize, codes[0]);
                for &c in &codes {
                    if c == run.1 {
                        run.0 += 1;
                    } else {
                        run = (1, c);
                    }
                    if run.0 > best.0 {
                        best = run;
                    }
                }
                *slot = best.1;
            }
        }
    }
    assignment
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::fixtures::t1;

    #[test]
    fn random_with_k_equal_l_permutes_top() {
        let ds = t1();
        let top = ds.top_l(4).unwrap();
        let seeds = seed_clusters(&ds, top, Seeding::Random { seed: 7 }, 4);
        let mut got: Vec<Cluster> = seeds.clone();
        got.sort();
        let mut want: Vec<Cluster> = top.iter().map(|&r| ds.singleton(r)).collect();
        want.sort();
        assert_eq!(got, want);
        assert_eq!(seeds, seed_clusters(&ds, top, Seeding::Random { seed: 7 }, 4));
    }

    #[test]
    fn random_falls_back_to_l() {
        let ds = t1();
        let top = ds.top_l(2).unwrap();
        assert_eq!(seed_clusters(&ds, top, Seeding::Random { seed: 1 }, 5).len(), 2);
    }

    #[test]
    fn kmodes_single_group_is_lca_fold() {
        let ds = t1();
        let top = ds.top_l(3).unwrap();
        let seeds = seed_clusters(&ds, top, Seeding::Kmodes { seed: 3, iters: KMODES_MAX_ITERS }, 1);
        assert_eq!(seeds, vec![Cluster::all_star(2)]);
        let top2 = ds.top_l(2).unwrap();
        let seeds = seed_clusters(&ds, top2, Seeding::Kmodes { seed: 3, iters: KMODES_MAX_ITERS }, 1);
        assert_eq!(seeds, vec![ds.parse_pattern(&["a1", "*"]).unwrap()]);
    }

    #[test]
    fn kmodes_is_deterministic() {
        let ds = t1();
        let top = ds.top_l(4).unwrap();
        let s = Seeding::Kmodes { seed: 11, iters: KMODES_MAX_ITERS };
        assert_eq!(seed_clusters(&ds, top, s, 2), seed_clusters(&ds, top, s, 2));
    }

    #[test]
    fn kmodes_separates_obvious_groups() {
        let a: [&[Code]; 4] = [&[0, 0, 0], &[0, 0, 1], &[5, 5, 5], &[5, 5, 4]];
        let g = kmodes(&a, 2, 42, KMODES_MAX_ITERS);
        assert_eq!(g[0], g[1]);
        assert_eq!(g[2], g[3]);
        assert_ne!(g[0], g[2]);
    }
}
