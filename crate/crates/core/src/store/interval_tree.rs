use crate::model::Cluster;

/// A cluster live for every `k` in `k_lo..=k_hi`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct IntervalEntry {
    pub cluster: Cluster,
    /// Creation sequence within the build's merge run.
    pub seq: u64,
    pub k_lo: usize,
    pub k_hi: usize,
}

impl IntervalEntry {
    pub fn contains(&self, k: usize) -> bool {
        self.k_lo <= k && k <= self.k_hi
    }
}

#[derive(Clone, Debug)]
struct Node {
    center: usize,
    /// Indices of entries containing `center`, ascending by `k_lo`.
    by_lo: Vec<usize>,
    /// Same entries, descending by `k_hi`.
    by_hi: Vec<usize>,
    left: Option<Box<Node>>,
    right: Option<Box<Node>>,
}

/// Static centered interval tree over integer `k` intervals.
#[derive(Clone, Debug)]
pub struct IntervalTree {
    entries: Vec<IntervalEntry>,
    root: Option<Box<Node>>,
}

impl IntervalTree {
    pub fn new(entries: Vec<IntervalEntry>) -> Self {
        let all: Vec<usize> = (0..entries.len()).collect();
        let root = build(&entries, all);
        IntervalTree { entries, root }
    }

    pub fn entries(&self) -> &[IntervalEntry] {
        &self.entries
    }

    pub fn len(&self) -> usize {
        self.entries.len()
    }

    pub fn is_empty(&self) -> bool {
        self.entries.is_empty()
    }

    /// Entries whose interval contains `k`, in creation order.
    pub fn stab(&self, k: usize) -> Vec<&IntervalEntry> {
        let mut hits = Vec::new();
        let mut node = self.root.as_deref();
        while let Some(n) = node {
            if k < n.center {
                for &i in &n.by_lo {
                    if self.entries[i].k_lo > k {
                        break;
                    }
                    hits.push(i);
                }
                node = n.left.as_deref();
            } else {
                for &i in &n.by_hi {
                    if self.entries[i].k_hi < k {
                        break;
                    }
                    hits.push(i);
                }
                node = if k > n.center { n.right.as_deref() } else { None };
            }
        }
        hits.sort_by_key(|&i| self.entries[i].seq);
        hits.into_iter().map(|i| &self.entries[i]).collect()
    }
}

fn build(entries: &[IntervalEntry], idx: Vec<usize>) -> Option<Box<Node>> {
    if idx.is_empty() {
        return None;
    }
    let mut ends: Vec<usize> = idx.iter().flat_map(|&i| [entries[i].k_lo, entries[i].k_hi]).collect();
    ends.sort_unstable();
    let center = ends[ends.len() / 2];
    let (mut here, mut left, mut right) = (Vec::new(), Vec::new(), Vec::new());
    for i in idx {
        let e = &entries[i];
        if e.k_hi < center {
            left.push(i);
        } else if e.k_lo > center {
            right.push(i);
        } else {
            here.push(i);
        }
    }
    let mut by_lo = here.clone();
    by_lo.sort_by_key(|&i| (entries[i].k_lo, entries[i].seq));
    let mut by_hi = here;
    by_hi.sort_by_key(|&i| (std::cmp::Reverse(entries[i].k_hi), entries[i].seq));
    Some(Box::new(Node {
        center,
        by_lo,
        by_hi,
        left: build(entries, left),
        right: build(entries, right),
    }))
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    fn entry(seq: u64, k_lo: usize, k_hi: usize) -> IntervalEntry {
        IntervalEntry { cluster: Cluster::singleton(&[seq as u32]), seq, k_lo, k_hi }
    }

    #[test]
    fn stab_small() {
        let t = IntervalTree::new(vec![entry(0, 3, 10), entry(1, 1, 2), entry(2, 5, 5), entry(3, 1, 10)]);
        let seqs = |k| t.stab(k).iter().map(|e| e.seq).collect::<Vec<_>>();
        assert_eq!(seqs(1), vec![1, 3]);
        assert_eq!(seqs(5), vec![0, 2, 3]);
        assert_eq!(seqs(11), Vec::<u64>::new());
        assert!(IntervalTree::new(Vec::new()).stab(3).is_empty());
    }

    proptest! {
        #[test]
        fn stab_matches_linear_scan(
            raw in prop::collection::vec((0usize..40, 0usize..40), 0..60),
            k in 0usize..45,
        ) {
            let entries: Vec<_> = raw
                .iter()
                .enumerate()
                .map(|(i, &(a, b))| entry(i as u64, a.min(b), a.max(b)))
                .collect();
            let want: Vec<u64> = entries.iter().filter(|e| e.contains(k)).map(|e| e.seq).collect();
            let tree = IntervalTree::new(entries);
            let got: Vec<u64> = tree.stab(k).iter().map(|e| e.seq).collect();
            prop_assert_eq!(got, want);
        }
    }
}
