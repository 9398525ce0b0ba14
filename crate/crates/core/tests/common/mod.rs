#![allow(dead_code)]

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use summit_core::fixtures::{synthetic, Synthetic};
use summit_core::{Cluster, Dataset, Slot};

pub fn rng(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

/// Random dataset with `n` distinct rows over `m` attributes of `domain` values.
pub fn dataset(rng: &mut ChaCha8Rng, max_n: usize, max_m: usize, domain: usize) -> Dataset {
    let m = rng.gen_range(1..=max_m);
    let cap = domain.saturating_pow(m as u32).min(max_n);
    let n = rng.gen_range(1..=cap);
    synthetic(Synthetic { n, m, domain, seed: rng.gen() })
}

pub fn cluster(rng: &mut ChaCha8Rng, m: usize, domain: u32, star_p: f64) -> Cluster {
    let slots: Vec<Slot> = (0..m)
        .map(|_| if rng.gen_bool(star_p) { Slot::Star } else { Slot::Concrete(rng.gen_range(0..domain)) })
        .collect();
    Cluster::from(slots)
}

/// Covered rows by direct scan.
pub fn naive_cover(c: &Cluster, ds: &Dataset) -> Vec<usize> {
    (0..ds.n())
        .filter(|&r| {
            c.slots().iter().zip(ds.row(r).codes.iter()).all(|(s, &v)| match s {
                Slot::Star => true,
                Slot::Concrete(x) => *x == v,
            })
        })
        .collect()
}
