//! Round counters: finite partial maps from process ids to the number of
//! rounds each process still has to run.

use crate::error::{Error, Result};
use crate::sets::{ProcSet, ProcessId};
use serde::{Deserialize, Serialize};
use std::collections::BTreeMap;
use std::fmt;

/// A finite partial map `ProcessId -> rounds`. Absent keys are non-participants,
/// a stored 0 is a passive process.
#[derive(Clone, Default, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct RoundCounter {
    entries: BTreeMap<ProcessId, u32>,
}

/// Support, active and passive sets and total number of rounds.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct CounterSummary {
    pub supp: ProcSet,
    pub act: ProcSet,
    pub pass: ProcSet,
    pub cardinality: u64,
}

impl RoundCounter {
    pub fn new() -> Self {
        Self::default()
    }

    /// Counter with support `{0, .., values.len()-1}`.
    pub fn from_values(values: &[u32]) -> Self {
        RoundCounter {
            entries: values
                .iter()
                .enumerate()
                .map(|(i, &v)| (i as ProcessId, v))
                .collect(),
        }
    }

    pub fn from_entries<I: IntoIterator<Item = (ProcessId, u32)>>(entries: I) -> Self {
        RoundCounter {
            entries: entries.into_iter().collect(),
        }
    }

    pub fn get(&self, p: ProcessId) -> Option<u32> {
        self.entries.get(&p).copied()
    }

    pub fn entries(&self) -> impl Iterator<Item = (ProcessId, u32)> + '_ {
        self.entries.iter().map(|(&p, &v)| (p, v))
    }

    pub fn len(&self) -> usize {
        self.entries.len()
    }

    pub fn is_empty(&self) -> bool {
        self.entries.is_empty()
    }

    pub fn supp(&self) -> ProcSet {
        self.entries.keys().copied().collect()
    }

    pub fn act(&self) -> ProcSet {
        self.entries
            .iter()
            .filter(|(_, &v)| v >= 1)
            .map(|(&p, _)| p)
            .collect()
    }

    pub fn pass(&self) -> ProcSet {
        self.entries
            .iter()
            .filter(|(_, &v)| v == 0)
            .map(|(&p, _)| p)
            .collect()
    }

    pub fn cardinality(&self) -> u64 {
        self.entries.values().map(|&v| v as u64).sum()
    }

    /// Values in id order.
    pub fn values(&self) -> Vec<u32> {
        self.entries.values().copied().collect()
    }

    /// True when every value is 0 or 1.
    pub fn is_binary(&self) -> bool {
        self.entries.values().all(|&v| v <= 1)
    }

    /// Parse the comma syntax `2,x,1`: position i holds the value of process i,
    /// `x` marks an absent process. The empty string is the empty counter.
    pub fn parse(text: &str) -> Result<Self> {
        let mut entries = BTreeMap::new();
        if text.trim().is_empty() {
            return Ok(RoundCounter { entries });
        }
        let mut offset = 0;
        for (i, token) in text.split(',').enumerate() {
            let t = token.trim();
            let position = offset + (token.len() - token.trim_start().len());
            offset += token.len() + 1;
            if t == "x" || t == "X" {
                continue;
            }
            let v: u32 = t.parse().map_err(|_| Error::Parse {
                position,
                message: format!("token {i} ({t:?}) is neither a natural number nor `x`"),
            })?;
            entries.insert(i as ProcessId, v);
        }
        Ok(RoundCounter { entries })
    }

    pub fn to_json(&self) -> serde_json::Value {
        serde_json::to_value(CounterJson {
            counter: self.clone(),
        })
        .expect("counter encodes")
    }

    pub fn from_json(value: &serde_json::Value) -> Result<Self> {
        let c: CounterJson = serde_json::from_value(value.clone())
            .map_err(|e| Error::InvalidArgument(format!("counter json: {e}")))?;
        Ok(c.counter)
    }
}

#[derive(Serialize, Deserialize)]
struct CounterJson {
    counter: RoundCounter,
}

impl Serialize for RoundCounter {
    fn serialize<S: serde::Serializer>(
        &self,
        serializer: S,
    ) -> std::result::Result<S::Ok, S::Error> {
        let m: BTreeMap<String, u32> = self
            .entries
            .iter()
            .map(|(p, v)| (p.to_string(), *v))
            .collect();
        m.serialize(serializer)
    }
}

impl<'de> Deserialize<'de> for RoundCounter {
    fn deserialize<D: serde::Deserializer<'de>>(d: D) -> std::result::Result<Self, D::Error> {
        let m = BTreeMap::<String, u32>::deserialize(d)?;
        let mut entries = BTreeMap::new();
        for (k, v) in m {
            let p: ProcessId = k.parse().map_err(serde::de::Error::custom)?;
            entries.insert(p, v);
        }
        Ok(RoundCounter { entries })
    }
}

impl fmt::Display for RoundCounter {
    /// The comma syntax accepted by [`RoundCounter::parse`].
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let Some(&max) = self.entries.keys().next_back() else {
            return Ok(());
        };
        for i in 0..=max {
            if i > 0 {
                write!(f, ",")?;
            }
            match self.entries.get(&i) {
                Some(v) => write!(f, "{v}")?,
                None => write!(f, "x")?,
            }
        }
        Ok(())
    }
}

impl fmt::Debug for RoundCounter {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "({self})")
    }
}

/// A bijection of the naturals moving finitely many points.
#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct Relabeling {
    moved: BTreeMap<ProcessId, ProcessId>,
}

impl Relabeling {
    pub fn identity() -> Self {
        Self::default()
    }

    /// Build from explicit pairs `i -> π(i)`; fixed points may be listed.
    pub fn new<I: IntoIterator<Item = (ProcessId, ProcessId)>>(pairs: I) -> Result<Self> {
        let mut moved = BTreeMap::new();
        for (i, j) in pairs {
            if moved.insert(i, j).is_some_and(|old| old != j) {
                return Err(Error::InvalidArgument(format!("{i} mapped twice")));
            }
        }
        moved.retain(|i, j| i != j);
        let domain: ProcSet = moved.keys().copied().collect();
        let image: ProcSet = moved.values().copied().collect();
        if image.len() != moved.len() || domain != image {
            return Err(Error::InvalidArgument(
                "relabeling must permute its moved points".into(),
            ));
        }
        Ok(Relabeling { moved })
    }

    /// Swap two ids.
    pub fn transposition(a: ProcessId, b: ProcessId) -> Self {
        Relabeling::new([(a, b), (b, a)]).expect("transposition is a bijection")
    }

    pub fn apply(&self, i: ProcessId) -> ProcessId {
        self.moved.get(&i).copied().unwrap_or(i)
    }

    pub fn inverse(&self) -> Relabeling {
        Relabeling {
            moved: self.moved.iter().map(|(&i, &j)| (j, i)).collect(),
        }
    }

    pub fn apply_set(&self, s: &ProcSet) -> ProcSet {
        s.iter().map(|p| self.apply(p)).collect()
    }
}

pub fn analyze(r: &RoundCounter) -> CounterSummary {
    CounterSummary {
        supp: r.supp(),
        act: r.act(),
        pass: r.pass(),
        cardinality: r.cardinality(),
    }
}

/// The counter sending `a` to 1 and `b` to 0.
pub fn chi_pair(a: &ProcSet, b: &ProcSet) -> Result<RoundCounter> {
    if !a.is_disjoint(b) {
        return Err(Error::InvalidArgument(format!("{a} and {b} overlap")));
    }
    Ok(RoundCounter::from_entries(
        a.iter().map(|p| (p, 1)).chain(b.iter().map(|p| (p, 0))),
    ))
}

pub fn chi_of(r: &RoundCounter) -> RoundCounter {
    RoundCounter::from_entries(r.entries().map(|(p, v)| (p, v.min(1))))
}

pub fn delete(r: &RoundCounter, a: &ProcSet) -> RoundCounter {
    RoundCounter::from_entries(r.entries().filter(|(p, _)| !a.contains(*p)))
}

/// One round of the processes in `s`.
pub fn execute(r: &RoundCounter, s: &ProcSet) -> Result<RoundCounter> {
    if let Some(p) = s.iter().find(|&p| r.get(p).unwrap_or(0) == 0) {
        return Err(Error::Precondition(format!(
            "process {p} is not active in {r:?}"
        )));
    }
    Ok(RoundCounter::from_entries(
        r.entries()
            .map(|(p, v)| (p, if s.contains(p) { v - 1 } else { v })),
    ))
}

/// Execute `s`, then drop `a`.
pub fn reduce(r: &RoundCounter, s: &ProcSet, a: &ProcSet) -> Result<RoundCounter> {
    if !a.is_subset(&r.supp()) {
        return Err(Error::Precondition(format!(
            "{a} is not inside the support of {r:?}"
        )));
    }
    Ok(delete(&execute(r, s)?, a))
}

/// Relabel the support onto `0..k` preserving order.
pub fn canonicalize(r: &RoundCounter) -> RoundCounter {
    RoundCounter::from_values(&r.values())
}

/// The counter `i -> r(π(i))`.
pub fn relabel(r: &RoundCounter, pi: &Relabeling) -> RoundCounter {
    let inv = pi.inverse();
    RoundCounter::from_entries(r.entries().map(|(j, v)| (inv.apply(j), v)))
}
