//! Witness tables `((W_0,G_0),…,(W_t,G_t))`, their trace form, and the
//! operators acting on them: canonical form, stabilization, ghosting and
//! completion to a top simplex.

use crate::error::{Error, Result};
use crate::rounds::RoundCounter;
use crate::sets::{ProcSet, ProcessId};
use serde::{Deserialize, Serialize};
use std::collections::{BTreeMap, BTreeSet};
use std::fmt;

/// One row `(W_i, G_i)` of a witness table.
#[derive(Clone, Debug, Default, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct Layer {
    pub w: ProcSet,
    pub g: ProcSet,
}

impl Layer {
    pub fn new(w: ProcSet, g: ProcSet) -> Self {
        Layer { w, g }
    }

    /// `R_i = W_i ∪ G_i`.
    pub fn r(&self) -> ProcSet {
        self.w.union(&self.g)
    }
}

/// Strength of a valid table. Ordered: every witness table is stable, every
/// stable table is a prestructure.
#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Class {
    Prestructure,
    Stable,
    Witness,
}

/// The first condition a raw table fails.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum Condition {
    /// No rows at all.
    Empty,
    /// A later row is not contained in `W_0`.
    P1,
    /// Two ghost sets overlap.
    P2,
    /// A ghost reappears as a witness at the same or a later row.
    P3,
}

impl fmt::Display for Condition {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let s = match self {
            Condition::Empty => "empty",
            Condition::P1 => "P1",
            Condition::P2 => "P2",
            Condition::P3 => "P3",
        };
        f.write_str(s)
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Classification {
    Invalid(Condition),
    Valid(Class),
}

pub fn classify(layers: &[Layer]) -> Classification {
    let Some(first) = layers.first() else {
        return Classification::Invalid(Condition::Empty);
    };
    for l in &layers[1..] {
        if !l.w.is_subset(&first.w) || !l.g.is_subset(&first.w) {
            return Classification::Invalid(Condition::P1);
        }
    }
    for i in 0..layers.len() {
        for j in i + 1..layers.len() {
            if !layers[i].g.is_disjoint(&layers[j].g) {
                return Classification::Invalid(Condition::P2);
            }
        }
    }
    for i in 0..layers.len() {
        for l in &layers[i..] {
            if !layers[i].g.is_disjoint(&l.w) {
                return Classification::Invalid(Condition::P3);
            }
        }
    }
    let t = layers.len() - 1;
    if layers[1..].iter().all(|l| !l.w.is_empty()) {
        Classification::Valid(Class::Witness)
    } else if !layers[t].w.is_empty() {
        Classification::Valid(Class::Stable)
    } else {
        Classification::Valid(Class::Prestructure)
    }
}

/// A validated table of class at least [`Class::Prestructure`]. Equality,
/// ordering and hashing are those of the sorted row encoding.
#[derive(Clone, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct WitnessTable {
    layers: Vec<Layer>,
    class: Class,
}

impl WitnessTable {
    pub fn new(layers: Vec<Layer>) -> Result<Self> {
        match classify(&layers) {
            Classification::Valid(class) => Ok(WitnessTable { layers, class }),
            Classification::Invalid(c) => Err(Error::InvalidArgument(format!(
                "table violates {c}: {layers:?}"
            ))),
        }
    }

    pub fn from_pairs<I: IntoIterator<Item = (ProcSet, ProcSet)>>(pairs: I) -> Result<Self> {
        Self::new(pairs.into_iter().map(|(w, g)| Layer::new(w, g)).collect())
    }

    /// Shorthand for literal tables.
    pub fn from_slices(rows: &[(&[ProcessId], &[ProcessId])]) -> Result<Self> {
        Self::from_pairs(
            rows.iter()
                .map(|(w, g)| (ProcSet::from(*w), ProcSet::from(*g))),
        )
    }

    /// The table `((∅, supp))`, the empty simplex on `supp`.
    pub fn empty_on(supp: ProcSet) -> Self {
        WitnessTable {
            layers: vec![Layer::new(ProcSet::new(), supp)],
            class: Class::Witness,
        }
    }

    /// Parse the canonical JSON key.
    pub fn from_key(key: &str) -> Result<Self> {
        let rows: Vec<(ProcSet, ProcSet)> = serde_json::from_str(key)
            .map_err(|e| Error::InvalidArgument(format!("witness key {key:?}: {e}")))?;
        Self::from_pairs(rows)
    }

    /// Canonical JSON encoding, e.g. `[[[0,1],[]],[[0],[1]]]`.
    pub fn key(&self) -> String {
        serde_json::to_string(self).expect("table encodes")
    }

    pub fn layers(&self) -> &[Layer] {
        &self.layers
    }

    pub fn class(&self) -> Class {
        self.class
    }

    pub fn is_witness(&self) -> bool {
        self.class == Class::Witness
    }

    /// Index of the last row.
    pub fn t(&self) -> usize {
        self.layers.len() - 1
    }

    pub fn w(&self, i: usize) -> &ProcSet {
        &self.layers[i].w
    }

    pub fn g(&self, i: usize) -> &ProcSet {
        &self.layers[i].g
    }

    pub fn r(&self, i: usize) -> ProcSet {
        self.layers[i].r()
    }

    pub fn supp(&self) -> ProcSet {
        self.layers[0].r()
    }

    pub fn ghosts(&self) -> ProcSet {
        self.layers
            .iter()
            .fold(ProcSet::new(), |acc, l| acc.union(&l.g))
    }

    pub fn active(&self) -> ProcSet {
        self.supp().difference(&self.ghosts())
    }

    pub fn dim(&self) -> i64 {
        self.active().len() as i64 - 1
    }

    /// Rows whose `R_i` contains `p`.
    pub fn trace(&self, p: ProcessId) -> Vec<usize> {
        (0..self.layers.len())
            .filter(|&i| self.layers[i].w.contains(p) || self.layers[i].g.contains(p))
            .collect()
    }

    /// `M(p) = |Tr(p)|`.
    pub fn multiplicity(&self, p: ProcessId) -> usize {
        self.layers
            .iter()
            .filter(|l| l.w.contains(p) || l.g.contains(p))
            .count()
    }

    /// Largest row with `p ∈ W_i`.
    pub fn last(&self, p: ProcessId) -> Option<usize> {
        (0..self.layers.len())
            .rev()
            .find(|&i| self.layers[i].w.contains(p))
    }

    /// Apply `f` to every id. `f` must be injective on the support.
    pub fn map_ids(&self, f: impl Fn(ProcessId) -> ProcessId) -> WitnessTable {
        let layers = self
            .layers
            .iter()
            .map(|l| Layer::new(l.w.iter().map(&f).collect(), l.g.iter().map(&f).collect()))
            .collect();
        WitnessTable {
            layers,
            class: self.class,
        }
    }

    /// Replace row 0 ghost set. Rows beyond 0 are untouched.
    pub fn with_g0(&self, g0: ProcSet) -> Result<WitnessTable> {
        let mut layers = self.layers.clone();
        layers[0].g = g0;
        WitnessTable::new(layers)
    }
}

impl Serialize for WitnessTable {
    fn serialize<S: serde::Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        use serde::ser::SerializeSeq;
        let mut seq = s.serialize_seq(Some(self.layers.len()))?;
        for l in &self.layers {
            seq.serialize_element(&(&l.w, &l.g))?;
        }
        seq.end()
    }
}

impl<'de> Deserialize<'de> for WitnessTable {
    fn deserialize<D: serde::Deserializer<'de>>(d: D) -> std::result::Result<Self, D::Error> {
        let rows = Vec::<(ProcSet, ProcSet)>::deserialize(d)?;
        WitnessTable::from_pairs(rows).map_err(serde::de::Error::custom)
    }
}

impl fmt::Display for WitnessTable {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.key())
    }
}

impl fmt::Debug for WitnessTable {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "[")?;
        for (i, l) in self.layers.iter().enumerate() {
            if i > 0 {
                write!(f, ",")?;
            }
            write!(f, "({:?},{:?})", l.w, l.g)?;
        }
        write!(f, "]")
    }
}

/// Per-process description of a table: which processes are ghosts and the
/// rows each process occurs in.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct TraceForm {
    active: ProcSet,
    ghosts: ProcSet,
    traces: BTreeMap<ProcessId, BTreeSet<usize>>,
}

impl TraceForm {
    pub fn new(
        active: ProcSet,
        ghosts: ProcSet,
        traces: BTreeMap<ProcessId, BTreeSet<usize>>,
    ) -> Result<Self> {
        if !active.is_disjoint(&ghosts) {
            return Err(Error::InvalidArgument(format!(
                "active {active} and ghosts {ghosts} overlap"
            )));
        }
        let keys: ProcSet = traces.keys().copied().collect();
        if keys != active.union(&ghosts) {
            return Err(Error::InvalidArgument(format!(
                "traces given for {keys}, expected {}",
                active.union(&ghosts)
            )));
        }
        if let Some((p, _)) = traces.iter().find(|(_, tr)| !tr.contains(&0)) {
            return Err(Error::InvalidArgument(format!(
                "T: trace of {p} misses row 0"
            )));
        }
        Ok(TraceForm {
            active,
            ghosts,
            traces,
        })
    }

    pub fn active(&self) -> &ProcSet {
        &self.active
    }

    pub fn ghosts(&self) -> &ProcSet {
        &self.ghosts
    }

    pub fn trace(&self, p: ProcessId) -> Option<&BTreeSet<usize>> {
        self.traces.get(&p)
    }

    pub fn traces(&self) -> &BTreeMap<ProcessId, BTreeSet<usize>> {
        &self.traces
    }

    /// Largest row index in any trace.
    pub fn t(&self) -> usize {
        self.traces
            .values()
            .filter_map(|tr| tr.last().copied())
            .max()
            .unwrap_or(0)
    }

    fn top(&self, p: ProcessId) -> usize {
        *self.traces[&p].last().expect("traces contain 0")
    }

    /// Strength of the described table, read off the traces directly.
    pub fn class(&self) -> Class {
        let stable = if self.active.is_empty() {
            self.ghosts.iter().all(|p| self.traces[&p].len() == 1)
        } else {
            let a = self.active.iter().map(|p| self.top(p)).max().unwrap_or(0);
            let g = self.ghosts.iter().map(|p| self.top(p)).max().unwrap_or(0);
            a >= g
        };
        if !stable {
            return Class::Prestructure;
        }
        let t = self.t();
        let covered = (1..=t).all(|k| {
            self.active.iter().any(|p| self.traces[&p].contains(&k))
                || self.ghosts.iter().any(|p| {
                    let tr = &self.traces[&p];
                    tr.contains(&k) && self.top(p) != k
                })
        });
        if covered {
            Class::Witness
        } else {
            Class::Stable
        }
    }
}

pub fn to_trace(sigma: &WitnessTable) -> TraceForm {
    let ghosts = sigma.ghosts();
    let active = sigma.supp().difference(&ghosts);
    let traces = sigma
        .supp()
        .iter()
        .map(|p| (p, sigma.trace(p).into_iter().collect()))
        .collect();
    TraceForm {
        active,
        ghosts,
        traces,
    }
}

pub fn from_trace(tf: &TraceForm) -> Result<WitnessTable> {
    let tf = TraceForm::new(tf.active.clone(), tf.ghosts.clone(), tf.traces.clone())?;
    let t = tf.t();
    let mut layers = vec![Layer::default(); t + 1];
    for (&p, tr) in &tf.traces {
        let top = *tr.last().expect("traces contain 0");
        let ghost = tf.ghosts.contains(p);
        for &k in tr {
            if ghost && k == top {
                layers[k].g.insert(p);
            } else {
                layers[k].w.insert(p);
            }
        }
    }
    WitnessTable::new(layers)
}

/// Support, active and ghost sets, dimension and color.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct DerivedData {
    pub supp: ProcSet,
    pub active: ProcSet,
    pub ghosts: ProcSet,
    pub dim: i64,
    pub color: Option<ProcessId>,
}

pub fn derived(sigma: &WitnessTable) -> DerivedData {
    let supp = sigma.supp();
    let ghosts = sigma.ghosts();
    let active = supp.difference(&ghosts);
    let dim = active.len() as i64 - 1;
    let color = if active.len() == 1 {
        active.first()
    } else {
        None
    };
    DerivedData {
        supp,
        active,
        ghosts,
        dim,
        color,
    }
}

/// Drop empty witness rows, merging their ghost sets into the next kept row.
pub fn canonical_form(sigma: &WitnessTable) -> Result<WitnessTable> {
    if sigma.class() < Class::Stable {
        return Err(Error::Precondition(format!("{sigma:?} is not stable")));
    }
    let mut layers = vec![sigma.layers[0].clone()];
    let mut pending = ProcSet::new();
    for l in &sigma.layers[1..] {
        pending = pending.union(&l.g);
        if !l.w.is_empty() {
            layers.push(Layer::new(l.w.clone(), std::mem::take(&mut pending)));
        }
    }
    debug_assert!(pending.is_empty());
    WitnessTable::new(layers)
}

/// Turn `s` into ghosts and cut every trace after the last row that still
/// holds an active process.
pub fn stabilize(sigma: &WitnessTable, s: &ProcSet) -> Result<WitnessTable> {
    let active = sigma.active();
    if !s.is_subset(&active) {
        return Err(Error::Precondition(format!(
            "{s} is not inside the active set {active}"
        )));
    }
    let remaining = active.difference(s);
    let q = (0..=sigma.t())
        .rev()
        .find(|&i| !sigma.r(i).is_disjoint(&remaining));
    let Some(q) = q else {
        return Ok(WitnessTable::empty_on(sigma.supp()));
    };
    let tf = to_trace(sigma);
    let traces = tf
        .traces
        .iter()
        .map(|(&p, tr)| (p, tr.iter().copied().filter(|&i| i <= q).collect()))
        .collect();
    from_trace(&TraceForm::new(remaining, tf.ghosts.union(s), traces)?)
}

/// The face of `sigma` spanned by its active processes outside `s`.
pub fn ghost(sigma: &WitnessTable, s: &ProcSet) -> Result<WitnessTable> {
    if !sigma.is_witness() {
        return Err(Error::Precondition(format!(
            "{sigma:?} is not a witness structure"
        )));
    }
    canonical_form(&stabilize(sigma, s)?)
}

/// A top simplex of `P(r)` having `sigma` as a face.
pub fn complete(sigma: &WitnessTable, r: &RoundCounter) -> Result<WitnessTable> {
    if !crate::complex::is_simplex(sigma, r) {
        return Err(Error::Precondition(format!(
            "{sigma:?} is not a simplex of P{r:?}"
        )));
    }
    let ghosts = sigma.ghosts();
    let missing: Vec<(ProcessId, usize)> = ghosts
        .iter()
        .map(|p| {
            let budget = r.get(p).expect("support checked") as usize + 1;
            (p, budget - sigma.multiplicity(p))
        })
        .collect();
    let q = missing.iter().map(|&(_, m)| m).max().unwrap_or(0);
    let mut layers: Vec<Layer> = sigma
        .layers
        .iter()
        .map(|l| Layer::new(l.r(), ProcSet::new()))
        .collect();
    for i in 1..=q {
        let v = missing
            .iter()
            .filter(|&&(_, m)| m >= i)
            .map(|&(p, _)| p)
            .collect();
        layers.push(Layer::new(v, ProcSet::new()));
    }
    WitnessTable::new(layers)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn wt(rows: &[(&[ProcessId], &[ProcessId])]) -> WitnessTable {
        WitnessTable::from_slices(rows).unwrap()
    }

    fn layers(rows: &[(&[ProcessId], &[ProcessId])]) -> Vec<Layer> {
        rows.iter()
            .map(|(w, g)| Layer::new(ProcSet::from(*w), ProcSet::from(*g)))
            .collect()
    }

    #[test]
    fn classify_examples() {
        let fig = layers(&[
            (&[1, 2, 3, 4], &[5]),
            (&[], &[4]),
            (&[2], &[]),
            (&[], &[2]),
            (&[1], &[3]),
        ]);
        assert_eq!(classify(&fig), Classification::Valid(Class::Stable));
        assert_eq!(
            classify(&layers(&[(&[0], &[]), (&[0], &[])])),
            Classification::Valid(Class::Witness)
        );
        assert_eq!(
            classify(&layers(&[(&[1], &[]), (&[1], &[1])])),
            Classification::Invalid(Condition::P3)
        );
        assert_eq!(classify(&[]), Classification::Invalid(Condition::Empty));
        assert_eq!(
            classify(&layers(&[(&[1], &[]), (&[2], &[])])),
            Classification::Invalid(Condition::P1)
        );
        assert_eq!(
            classify(&layers(&[(&[1, 2], &[]), (&[1], &[2]), (&[], &[2])])),
            Classification::Invalid(Condition::P2)
        );
        assert_eq!(
            classify(&layers(&[(&[1, 2], &[]), (&[1], &[]), (&[], &[2])])),
            Classification::Valid(Class::Prestructure)
        );
    }

    #[test]
    fn trace_examples() {
        let s = wt(&[
            (&[1, 2, 3, 4], &[]),
            (&[1, 2], &[]),
            (&[3], &[4]),
            (&[3], &[1]),
        ]);
        let tf = to_trace(&s);
        assert_eq!(tf.active(), &ProcSet::from([2, 3]));
        assert_eq!(tf.ghosts(), &ProcSet::from([1, 4]));
        let tr = |p| tf.trace(p).unwrap().iter().copied().collect::<Vec<_>>();
        assert_eq!(tr(1), vec![0, 1, 3]);
        assert_eq!(tr(2), vec![0, 1]);
        assert_eq!(tr(3), vec![0, 2, 3]);
        assert_eq!(tr(4), vec![0, 2]);
        assert_eq!(from_trace(&tf).unwrap(), s);

        let e = wt(&[(&[], &[7])]);
        let tf = to_trace(&e);
        assert!(tf.active().is_empty());
        assert_eq!(
            tf.trace(7).unwrap().iter().copied().collect::<Vec<_>>(),
            vec![0]
        );
    }

    #[test]
    fn from_trace_rejects_malformed() {
        let mut traces = BTreeMap::new();
        traces.insert(0, BTreeSet::from([1]));
        assert!(TraceForm::new(ProcSet::from([0]), ProcSet::new(), traces.clone()).is_err());
        traces.insert(0, BTreeSet::from([0]));
        assert!(TraceForm::new(ProcSet::from([0]), ProcSet::from([0]), traces.clone()).is_err());
        assert!(TraceForm::new(ProcSet::from([0, 1]), ProcSet::new(), traces).is_err());
    }

    #[test]
    fn derived_examples() {
        let d = derived(&wt(&[
            (&[1, 2, 3, 4], &[]),
            (&[1, 2], &[]),
            (&[3], &[4]),
            (&[3], &[1]),
        ]));
        assert_eq!(d.supp, ProcSet::from([1, 2, 3, 4]));
        assert_eq!(d.active, ProcSet::from([2, 3]));
        assert_eq!(d.ghosts, ProcSet::from([1, 4]));
        assert_eq!(d.dim, 1);
        assert_eq!(d.color, None);
        assert_eq!(derived(&wt(&[(&[], &[0, 1])])).dim, -1);
        let d = derived(&wt(&[(&[0, 1], &[]), (&[0], &[1])]));
        assert_eq!((d.dim, d.color), (0, Some(0)));
    }

    #[test]
    fn canonical_form_examples() {
        let fig = wt(&[
            (&[1, 2, 3, 4], &[5]),
            (&[], &[4]),
            (&[2], &[]),
            (&[], &[2]),
            (&[1], &[3]),
        ]);
        assert_eq!(
            canonical_form(&fig).unwrap(),
            wt(&[(&[1, 2, 3, 4], &[5]), (&[2], &[4]), (&[1], &[2, 3])])
        );
        let w = wt(&[(&[0, 1], &[]), (&[0], &[1])]);
        assert_eq!(canonical_form(&w).unwrap(), w);
        let e = wt(&[(&[], &[7])]);
        assert_eq!(canonical_form(&e).unwrap(), e);
        let unstable = wt(&[(&[1, 2], &[]), (&[1], &[]), (&[], &[2])]);
        assert!(matches!(
            canonical_form(&unstable),
            Err(Error::Precondition(_))
        ));
    }

    #[test]
    fn stabilize_examples() {
        let fig = wt(&[
            (&[1, 2, 3, 4, 5], &[]),
            (&[1], &[]),
            (&[3, 4, 5], &[]),
            (&[2, 3], &[]),
            (&[1], &[3]),
            (&[1], &[2]),
            (&[], &[1]),
        ]);
        assert_eq!(
            stabilize(&fig, &ProcSet::new()).unwrap(),
            wt(&[(&[1, 3, 4, 5], &[2]), (&[], &[1]), (&[4, 5], &[3])])
        );
        let w = wt(&[(&[0, 1], &[]), (&[0], &[]), (&[1], &[])]);
        assert_eq!(stabilize(&w, &ProcSet::new()).unwrap(), w);
        assert_eq!(
            stabilize(&w, &ProcSet::from([0, 1])).unwrap(),
            wt(&[(&[], &[0, 1])])
        );
        assert!(matches!(
            stabilize(&w, &ProcSet::from([5])),
            Err(Error::Precondition(_))
        ));
    }

    #[test]
    fn ghost_examples() {
        let s = wt(&[
            (&[1, 2, 3, 4], &[]),
            (&[1, 2], &[]),
            (&[3], &[4]),
            (&[3], &[1]),
        ]);
        assert_eq!(
            ghost(&s, &ProcSet::from([3])).unwrap(),
            wt(&[(&[1, 2], &[3, 4]), (&[2], &[1])])
        );
        assert_eq!(ghost(&s, &ProcSet::new()).unwrap(), s);
        let e = wt(&[(&[1, 2], &[]), (&[1], &[]), (&[2], &[])]);
        assert_eq!(
            ghost(&e, &ProcSet::from([1])).unwrap(),
            wt(&[(&[1, 2], &[]), (&[2], &[1])])
        );
    }

    #[test]
    fn complete_examples() {
        let r = RoundCounter::from_values(&[1, 1]);
        let s = wt(&[(&[0, 1], &[]), (&[0], &[1])]);
        assert_eq!(
            complete(&s, &r).unwrap(),
            wt(&[(&[0, 1], &[]), (&[0, 1], &[])])
        );
        let r = RoundCounter::from_values(&[1, 0]);
        let s = wt(&[(&[1], &[0])]);
        let top = complete(&s, &r).unwrap();
        assert_eq!(top, wt(&[(&[0, 1], &[]), (&[0], &[])]));
        assert_eq!(ghost(&top, &ProcSet::from([0])).unwrap(), s);
        assert_eq!(complete(&top, &r).unwrap(), top);
        assert!(complete(&wt(&[(&[0, 1], &[])]), &RoundCounter::from_values(&[1, 1])).is_err());
    }

    #[test]
    fn key_round_trip() {
        let s = wt(&[(&[0, 1], &[]), (&[0], &[1])]);
        assert_eq!(s.key(), "[[[0,1],[]],[[0],[1]]]");
        assert_eq!(WitnessTable::from_key(&s.key()).unwrap(), s);
        assert!(WitnessTable::from_key("[[[1],[]],[[1],[1]]]").is_err());
    }
}
