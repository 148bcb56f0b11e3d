//! Finite sets of process ids, kept as sorted vectors.

use serde::{Deserialize, Deserializer, Serialize, Serializer};
use std::fmt;

/// A process label.
pub type ProcessId = u32;

/// A finite set of process ids. Elements are stored sorted and unique, so
/// derived equality, ordering and hashing follow the canonical encoding.
#[derive(Clone, Default, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct ProcSet(Vec<ProcessId>);

impl ProcSet {
    pub fn new() -> Self {
        ProcSet(Vec::new())
    }

    pub fn singleton(p: ProcessId) -> Self {
        ProcSet(vec![p])
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    pub fn contains(&self, p: ProcessId) -> bool {
        self.0.binary_search(&p).is_ok()
    }

    pub fn iter(&self) -> impl DoubleEndedIterator<Item = ProcessId> + ExactSizeIterator + '_ {
        self.0.iter().copied()
    }

    pub fn as_slice(&self) -> &[ProcessId] {
        &self.0
    }

    pub fn first(&self) -> Option<ProcessId> {
        self.0.first().copied()
    }

    pub fn insert(&mut self, p: ProcessId) -> bool {
        match self.0.binary_search(&p) {
            Ok(_) => false,
            Err(i) => {
                self.0.insert(i, p);
                true
            }
        }
    }

    pub fn remove(&mut self, p: ProcessId) -> bool {
        match self.0.binary_search(&p) {
            Ok(i) => {
                self.0.remove(i);
                true
            }
            Err(_) => false,
        }
    }

    pub fn with(&self, p: ProcessId) -> Self {
        let mut s = self.clone();
        s.insert(p);
        s
    }

    pub fn without(&self, p: ProcessId) -> Self {
        let mut s = self.clone();
        s.remove(p);
        s
    }

    pub fn union(&self, other: &ProcSet) -> ProcSet {
        let (a, b) = (&self.0, &other.0);
        let mut out = Vec::with_capacity(a.len() + b.len());
        let (mut i, mut j) = (0, 0);
        while i < a.len() && j < b.len() {
            match a[i].cmp(&b[j]) {
                std::cmp::Ordering::Less => {
                    out.push(a[i]);
                    i += 1;
                }
                std::cmp::Ordering::Greater => {
                    out.push(b[j]);
                    j += 1;
                }
                std::cmp::Ordering::Equal => {
                    out.push(a[i]);
                    i += 1;
                    j += 1;
                }
            }
        }
        out.extend_from_slice(&a[i..]);
        out.extend_from_slice(&b[j..]);
        ProcSet(out)
    }

    pub fn intersection(&self, other: &ProcSet) -> ProcSet {
        ProcSet(
            self.0
                .iter()
                .copied()
                .filter(|p| other.contains(*p))
                .collect(),
        )
    }

    pub fn difference(&self, other: &ProcSet) -> ProcSet {
        ProcSet(
            self.0
                .iter()
                .copied()
                .filter(|p| !other.contains(*p))
                .collect(),
        )
    }

    pub fn is_subset(&self, other: &ProcSet) -> bool {
        self.0.iter().all(|p| other.contains(*p))
    }

    pub fn is_disjoint(&self, other: &ProcSet) -> bool {
        self.0.iter().all(|p| !other.contains(*p))
    }

    /// All subsets, ordered by size and then lexicographically.
    pub fn subsets(&self) -> Vec<ProcSet> {
        let n = self.0.len();
        assert!(n < 32, "subset enumeration over {n} elements");
        let mut out: Vec<ProcSet> = (0u32..(1u32 << n))
            .map(|mask| {
                ProcSet(
                    (0..n)
                        .filter(|k| mask & (1 << k) != 0)
                        .map(|k| self.0[k])
                        .collect(),
                )
            })
            .collect();
        out.sort_by(|x, y| x.len().cmp(&y.len()).then_with(|| x.cmp(y)));
        out
    }

    /// Nonempty subsets, ordered by size and then lexicographically.
    pub fn nonempty_subsets(&self) -> Vec<ProcSet> {
        let mut all = self.subsets();
        all.remove(0);
        all
    }
}

impl FromIterator<ProcessId> for ProcSet {
    fn from_iter<I: IntoIterator<Item = ProcessId>>(iter: I) -> Self {
        let mut v: Vec<ProcessId> = iter.into_iter().collect();
        v.sort_unstable();
        v.dedup();
        ProcSet(v)
    }
}

impl<const N: usize> From<[ProcessId; N]> for ProcSet {
    fn from(a: [ProcessId; N]) -> Self {
        a.into_iter().collect()
    }
}

impl From<&[ProcessId]> for ProcSet {
    fn from(a: &[ProcessId]) -> Self {
        a.iter().copied().collect()
    }
}

impl fmt::Debug for ProcSet {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{{")?;
        for (k, p) in self.0.iter().enumerate() {
            if k > 0 {
                write!(f, ",")?;
            }
            write!(f, "{p}")?;
        }
        write!(f, "}}")
    }
}

impl fmt::Display for ProcSet {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        fmt::Debug::fmt(self, f)
    }
}

impl Serialize for ProcSet {
    fn serialize<S: Serializer>(&self, serializer: S) -> Result<S::Ok, S::Error> {
        self.0.serialize(serializer)
    }
}

impl<'de> Deserialize<'de> for ProcSet {
    fn deserialize<D: Deserializer<'de>>(deserializer: D) -> Result<Self, D::Error> {
        let v = Vec::<ProcessId>::deserialize(deserializer)?;
        Ok(v.into_iter().collect())
    }
}
