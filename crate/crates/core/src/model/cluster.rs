use std::borrow::Borrow;
use std::fmt;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Dictionary code of one attribute value.
pub type Code = u32;

/// One attribute position of a cluster pattern.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub enum Slot {
    Concrete(Code),
    Star,
}

impl Slot {
    #[inline]
    pub fn is_star(self) -> bool {
        matches!(self, Slot::Star)
    }

    /// Whether this slot absorbs a concrete code.
    #[inline]
    pub fn matches(self, code: Code) -> bool {
        match self {
            Slot::Star => true,
            Slot::Concrete(c) => c == code,
        }
    }
}

/// A pattern over `m` attributes mixing concrete codes and wildcards.
///
/// A cluster covers every element (or cluster) that agrees with it on all of
/// its concrete slots. Clusters ordered by coverage form a semilattice whose
/// join is [`Cluster::lca`].
#[derive(Clone, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub struct Cluster {
    slots: Box<[Slot]>,
}

impl Borrow<[Slot]> for Cluster {
    fn borrow(&self) -> &[Slot] {
        &self.slots
    }
}

impl From<Vec<Slot>> for Cluster {
    fn from(slots: Vec<Slot>) -> Self {
        Cluster { slots: slots.into_boxed_slice() }
    }
}

impl Cluster {
    pub fn new(slots: impl Into<Box<[Slot]>>) -> Self {
        Cluster { slots: slots.into() }
    }

    /// Level-0 cluster matching exactly one code vector.
    pub fn singleton(codes: &[Code]) -> Self {
        Cluster { slots: codes.iter().map(|&c| Slot::Concrete(c)).collect() }
    }

    /// The trivial cluster `(*, ..., *)`.
    pub fn all_star(m: usize) -> Self {
        Cluster { slots: vec![Slot::Star; m].into_boxed_slice() }
    }

    /// Pattern obtained by starring every slot whose bit is set in `mask`.
    pub fn masked(codes: &[Code], mask: u32) -> Self {
        Cluster {
            slots: codes
                .iter()
                .enumerate()
                .map(|(i, &c)| if mask >> i & 1 == 1 { Slot::Star } else { Slot::Concrete(c) })
                .collect(),
        }
    }

    pub fn m(&self) -> usize {
        self.slots.len()
    }

    pub fn slots(&self) -> &[Slot] {
        &self.slots
    }

    /// Number of wildcard slots.
    pub fn level(&self) -> usize {
        self.slots.iter().filter(|s| s.is_star()).count()
    }

    pub fn is_all_star(&self) -> bool {
        self.slots.iter().all(|s| s.is_star())
    }

    fn check_dim(&self, other: &Cluster) -> Result<()> {
        if self.m() != other.m() {
            return Err(Error::Dimension { left: self.m(), right: other.m() });
        }
        Ok(())
    }

    /// Number of attributes where the two clusters do not share a concrete
    /// value. A slot where either side is a wildcard always counts.
    pub fn distance(&self, other: &Cluster) -> Result<usize> {
        self.check_dim(other)?;
        Ok(self.distance_unchecked(other))
    }

    pub(crate) fn distance_unchecked(&self, other: &Cluster) -> usize {
        self.slots
            .iter()
            .zip(other.slots.iter())
            .filter(|(a, b)| a.is_star() || b.is_star() || a != b)
            .count()
    }

    /// True iff every concrete slot of `self` is matched by `other`.
    pub fn covers(&self, other: &Cluster) -> Result<bool> {
        self.check_dim(other)?;
        Ok(self.covers_unchecked(other))
    }

    pub(crate) fn covers_unchecked(&self, other: &Cluster) -> bool {
        self.slots
            .iter()
            .zip(other.slots.iter())
            .all(|(a, b)| a.is_star() || a == b)
    }

    /// Whether the cluster covers the element with these codes.
    #[inline]
    pub fn covers_codes(&self, codes: &[Code]) -> bool {
        self.slots.iter().zip(codes).all(|(s, &c)| s.matches(c))
    }

    /// Least common ancestor: keeps slots where both sides hold the same
    /// concrete code, stars everything else.
    pub fn lca(&self, other: &Cluster) -> Result<Cluster> {
        self.check_dim(other)?;
        Ok(self.lca_unchecked(other))
    }

    pub(crate) fn lca_unchecked(&self, other: &Cluster) -> Cluster {
        Cluster {
            slots: self
                .slots
                .iter()
                .zip(other.slots.iter())
                .map(|(&a, &b)| match (a, b) {
                    (Slot::Concrete(x), Slot::Concrete(y)) if x == y => a,
                    _ => Slot::Star,
                })
                .collect(),
        }
    }
}

impl fmt::Debug for Cluster {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "(")?;
        for (i, s) in self.slots.iter().enumerate() {
            if i > 0 {
                write!(f, ",")?;
            }
            match s {
                Slot::Star => write!(f, "*")?,
                Slot::Concrete(c) => write!(f, "{c}")?,
            }
        }
        write!(f, ")")
    }
}
