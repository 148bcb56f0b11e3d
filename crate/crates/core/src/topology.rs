//! Collapsing `P(r)` to a point, an independent replay validator, and mod-2
//! homology.
//!
//! [`Collapser::collapse_pair`] removes every simplex with row-0 ghost set
//! `∅` or `{p}`. It pairs strata and recurses into the smaller complexes
//! they are isomorphic to, carrying the resulting steps back through
//! [`gamma_inverse`]:
//!
//! 1. `X_{S,A,p}` with `X_{S,A}` for `p ∉ S`, via `P(r_{S,A})` with partner `p`;
//! 2. for `p ∈ S`, `|S| ≥ 2` and `q = min(S∖{p})`: `X_{S,A∪{q}}` with
//!    `X_{S,A}` for `A ⊆ S∖{p,q}`, via `P(r_{S,A})` with partner `q`;
//! 3. `X_{p,p}` with `X_p`, via `P(r_{{p},∅})` with partner `p`.
//!
//! Inside each stage the pairs are taken in order of `|A|`. The planned
//! steps are replayed against the complex; a step that is not yet legal is
//! retried after the others, and whatever is still left over is finished by
//! a greedy search for free faces.

use crate::complex::{delta_v_inverse, Complex, ComplexCache, SimplexId};
use crate::decomposition::{gamma_inverse, StratumId};
use crate::error::{Error, Result};
use crate::rounds::{delete, reduce, RoundCounter};
use crate::sets::{ProcSet, ProcessId};
use crate::witness::WitnessTable;
use serde_json::{json, Value};
use std::collections::HashMap;
use std::sync::Arc;

/// Remove `free` together with its only coface `coface`.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct CollapseStep {
    pub free: WitnessTable,
    pub coface: WitnessTable,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum Stage {
    /// No active process: collapse the top of a simplex onto a facet.
    Base,
    /// Stage 1, `p ∉ S`.
    Outside,
    /// Stage 2, `p ∈ S`, `|S| ≥ 2`.
    Split,
    /// Stage 3, `S = {p}`.
    Own,
    /// One round of the descent to a point, for row-0 ghost set `S`.
    Descent,
}

/// One block of planned steps.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct StageRecord {
    pub stage: Stage,
    pub s: ProcSet,
    pub a: ProcSet,
    pub partner: ProcessId,
    pub planned: usize,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct CollapseSequence {
    pub steps: Vec<CollapseStep>,
    pub residual: Vec<WitnessTable>,
    pub stages: Vec<StageRecord>,
    /// Planned steps that had to wait for a later pass.
    pub deferred: usize,
    /// Steps found by the greedy search rather than the plan.
    pub greedy: usize,
}

impl CollapseSequence {
    /// `{"steps":[{"free","coface"}],"residual":[keys]}`.
    pub fn to_json(&self) -> Value {
        json!({
            "steps": self.steps.iter().map(|s| json!({
                "free": s.free.key(),
                "coface": s.coface.key(),
            })).collect::<Vec<_>>(),
            "residual": self.residual.iter().map(|t| t.key()).collect::<Vec<_>>(),
        })
    }
}

struct Segment {
    record: StageRecord,
    steps: Vec<CollapseStep>,
}

/// Removal state over a complex with live cofacet counts.
struct Replay<'a> {
    k: &'a Complex,
    alive: Vec<bool>,
    live_cofaces: Vec<usize>,
}

impl<'a> Replay<'a> {
    fn new(k: &'a Complex) -> Self {
        Replay {
            k,
            alive: vec![true; k.len()],
            live_cofaces: k.ids().map(|i| k.cofacets(i).len()).collect(),
        }
    }

    fn illegal(&self, free: SimplexId, coface: SimplexId) -> Option<&'static str> {
        if !self.alive[free] || !self.alive[coface] {
            Some("simplex already removed")
        } else if !self.k.facets(coface).contains(&free) {
            Some("not a facet of the coface")
        } else if self.live_cofaces[coface] != 0 {
            Some("coface is not maximal")
        } else if self.live_cofaces[free] != 1 {
            Some("free face has another coface")
        } else {
            None
        }
    }

    fn apply(&mut self, free: SimplexId, coface: SimplexId) {
        for id in [free, coface] {
            self.alive[id] = false;
            for &f in self.k.facets(id) {
                self.live_cofaces[f] -= 1;
            }
        }
    }
}

/// Builds collapse sequences, caching complexes and sub-results.
#[derive(Default)]
pub struct Collapser {
    cache: ComplexCache,
    pairs: HashMap<(RoundCounter, ProcessId), Arc<Vec<CollapseStep>>>,
}

impl Collapser {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn complex(&mut self, r: &RoundCounter) -> Arc<Complex> {
        self.cache.get(r)
    }

    fn pair_steps(&mut self, r: &RoundCounter, p: ProcessId) -> Result<Arc<Vec<CollapseStep>>> {
        if let Some(s) = self.pairs.get(&(r.clone(), p)) {
            return Ok(s.clone());
        }
        let seq = self.collapse_pair(r, p)?;
        let steps = Arc::new(seq.steps);
        self.pairs.insert((r.clone(), p), steps.clone());
        Ok(steps)
    }

    fn transported(
        &mut self,
        r: &RoundCounter,
        stage: Stage,
        id: StratumId,
        partner: ProcessId,
    ) -> Result<Segment> {
        let sub = reduce(r, &id.s, &id.a)?;
        let inner = self.pair_steps(&sub, partner)?;
        let steps = inner
            .iter()
            .map(|st| {
                Ok(CollapseStep {
                    free: gamma_inverse(&st.free, &id)?,
                    coface: gamma_inverse(&st.coface, &id)?,
                })
            })
            .collect::<Result<Vec<_>>>()?;
        let record = StageRecord {
            stage,
            s: id.s,
            a: id.a,
            partner,
            planned: steps.len(),
        };
        Ok(Segment { record, steps })
    }

    /// Collapse `P(r)` onto its boundary minus the interior of `B_p`.
    pub fn collapse_pair(&mut self, r: &RoundCounter, p: ProcessId) -> Result<CollapseSequence> {
        let supp = r.supp();
        if !supp.contains(p) {
            return Err(Error::Precondition(format!(
                "{p} is not in the support of {r:?}"
            )));
        }
        let k = self.cache.get(r);
        let act = r.act();
        let own = ProcSet::singleton(p);
        let mut segments = Vec::new();
        if act.is_empty() {
            let top = WitnessTable::from_pairs([(supp.clone(), ProcSet::new())])?;
            let facet = WitnessTable::from_pairs([(supp.without(p), own.clone())])?;
            let record = StageRecord {
                stage: Stage::Base,
                s: ProcSet::new(),
                a: ProcSet::new(),
                partner: p,
                planned: 1,
            };
            segments.push(Segment {
                record,
                steps: vec![CollapseStep {
                    free: facet,
                    coface: top,
                }],
            });
        } else {
            let mut outside = Vec::new();
            for s in act.nonempty_subsets() {
                if s.contains(p) {
                    continue;
                }
                for a in s.subsets() {
                    if a != s {
                        outside.push(StratumId::sa(s.clone(), a));
                    }
                }
            }
            outside.sort_by(|x, y| x.a.len().cmp(&y.a.len()).then_with(|| x.cmp(y)));
            for id in outside {
                segments.push(self.transported(r, Stage::Outside, id, p)?);
            }
            if act.contains(p) {
                let mut split = Vec::new();
                for s in act.nonempty_subsets() {
                    if !s.contains(p) || s.len() < 2 {
                        continue;
                    }
                    let q = s.without(p).first().expect("|S| ≥ 2");
                    for a in s.without(p).without(q).subsets() {
                        split.push((StratumId::sa(s.clone(), a), q));
                    }
                }
                split.sort_by(|x, y| x.0.a.len().cmp(&y.0.a.len()).then_with(|| x.cmp(y)));
                for (id, q) in split {
                    segments.push(self.transported(r, Stage::Split, id, q)?);
                }
                segments.push(self.transported(r, Stage::Own, StratumId::s(own.clone()), p)?);
            }
        }
        let targets: Vec<bool> = k
            .ids()
            .map(|i| {
                let g0 = k.simplex(i).g(0);
                g0.is_empty() || g0 == &own
            })
            .collect();
        execute_plan(&k, &targets, segments)
    }

    /// Collapse `P(r)` to a single vertex: for `x = min supp r`, collapse each
    /// `B_U ≅ P(r∖U)` with partner `x`, `U ⊊ supp∖{x}` by increasing size.
    pub fn collapse_to_point(&mut self, r: &RoundCounter) -> Result<CollapseSequence> {
        let k = self.cache.get(r);
        let supp = r.supp();
        let Some(x) = supp.first() else {
            return Ok(CollapseSequence {
                steps: Vec::new(),
                residual: k.simplices().to_vec(),
                stages: Vec::new(),
                deferred: 0,
                greedy: 0,
            });
        };
        let others = supp.without(x);
        let mut segments = Vec::new();
        for u in others.subsets() {
            if u == others {
                continue;
            }
            let inner = self.pair_steps(&delete(r, &u), x)?;
            let steps = inner
                .iter()
                .map(|st| {
                    Ok(CollapseStep {
                        free: delta_v_inverse(&st.free, &u)?,
                        coface: delta_v_inverse(&st.coface, &u)?,
                    })
                })
                .collect::<Result<Vec<_>>>()?;
            let record = StageRecord {
                stage: Stage::Descent,
                s: u,
                a: ProcSet::new(),
                partner: x,
                planned: steps.len(),
            };
            segments.push(Segment { record, steps });
        }
        let targets: Vec<bool> = k
            .ids()
            .map(|i| {
                let g0 = k.simplex(i).g(0);
                g0 != &others && g0 != &supp
            })
            .collect();
        execute_plan(&k, &targets, segments)
    }
}

fn execute_plan(k: &Complex, targets: &[bool], segments: Vec<Segment>) -> Result<CollapseSequence> {
    let mut replay = Replay::new(k);
    let mut steps = Vec::new();
    let mut pending = Vec::new();
    let mut stages = Vec::new();
    for seg in segments {
        for st in &seg.steps {
            let (Some(f), Some(c)) = (k.id_of(&st.free), k.id_of(&st.coface)) else {
                return Err(Error::CollapseStuck(format!(
                    "planned step {} / {} leaves the complex",
                    st.free, st.coface
                )));
            };
            pending.push((f, c));
        }
        stages.push(seg.record);
    }

    let mut deferred = 0;
    let mut first_pass = true;
    while !pending.is_empty() {
        let mut waiting = Vec::new();
        for (f, c) in pending {
            if targets[f] && targets[c] && replay.illegal(f, c).is_none() {
                replay.apply(f, c);
                steps.push((f, c));
            } else {
                waiting.push((f, c));
            }
        }
        if first_pass {
            deferred = waiting.len();
            first_pass = false;
        }
        let stalled = waiting.len();
        pending = waiting;
        if stalled > 0
            && !pending
                .iter()
                .any(|&(f, c)| targets[f] && targets[c] && replay.illegal(f, c).is_none())
        {
            break;
        }
    }

    let mut greedy = 0;
    let mut by_key: Vec<SimplexId> = k.ids().filter(|&i| targets[i]).collect();
    by_key.sort_by_cached_key(|&i| k.key(i));
    loop {
        let remaining = by_key.iter().any(|&i| replay.alive[i]);
        if !remaining {
            break;
        }
        let found = by_key.iter().find_map(|&f| {
            if !replay.alive[f] || replay.live_cofaces[f] != 1 {
                return None;
            }
            let c = *k.cofacets(f).iter().find(|&&c| replay.alive[c])?;
            (targets[c] && replay.illegal(f, c).is_none()).then_some((f, c))
        });
        match found {
            Some((f, c)) => {
                replay.apply(f, c);
                steps.push((f, c));
                greedy += 1;
            }
            None => {
                let left: Vec<String> = by_key
                    .iter()
                    .filter(|&&i| replay.alive[i])
                    .take(5)
                    .map(|&i| k.key(i))
                    .collect();
                return Err(Error::CollapseStuck(format!(
                    "{} of {} target simplices left after {} steps, e.g. {:?}",
                    by_key.iter().filter(|&&i| replay.alive[i]).count(),
                    by_key.len(),
                    steps.len(),
                    left
                )));
            }
        }
    }

    Ok(CollapseSequence {
        steps: steps
            .into_iter()
            .map(|(f, c)| CollapseStep {
                free: k.simplex(f).clone(),
                coface: k.simplex(c).clone(),
            })
            .collect(),
        residual: k
            .ids()
            .filter(|&i| replay.alive[i])
            .map(|i| k.simplex(i).clone())
            .collect(),
        stages,
        deferred,
        greedy,
    })
}

pub fn collapse_pair(r: &RoundCounter, p: ProcessId) -> Result<CollapseSequence> {
    Collapser::new().collapse_pair(r, p)
}

pub fn collapse_to_point(r: &RoundCounter) -> Result<CollapseSequence> {
    Collapser::new().collapse_to_point(r)
}

/// Outcome of [`validate_collapse`].
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct CollapseValidation {
    pub ok: bool,
    pub first_illegal: Option<usize>,
    pub reason: Option<String>,
}

/// Replay `seq` on `k` from scratch; every step must remove a maximal
/// coface together with its only remaining facet-coface, and the survivors
/// must be exactly `seq.residual`.
pub fn validate_collapse(k: &Complex, seq: &CollapseSequence) -> CollapseValidation {
    let fail = |i: Option<usize>, why: String| CollapseValidation {
        ok: false,
        first_illegal: i,
        reason: Some(why),
    };
    let mut replay = Replay::new(k);
    for (n, st) in seq.steps.iter().enumerate() {
        let (Some(f), Some(c)) = (k.id_of(&st.free), k.id_of(&st.coface)) else {
            return fail(Some(n), "step names a simplex outside the complex".into());
        };
        if let Some(why) = replay.illegal(f, c) {
            return fail(Some(n), why.into());
        }
        replay.apply(f, c);
    }
    let mut left: Vec<&WitnessTable> = k
        .ids()
        .filter(|&i| replay.alive[i])
        .map(|i| k.simplex(i))
        .collect();
    let mut claimed: Vec<&WitnessTable> = seq.residual.iter().collect();
    left.sort();
    claimed.sort();
    if left != claimed {
        return fail(
            None,
            format!(
                "{} simplices survive, {} claimed",
                left.len(),
                claimed.len()
            ),
        );
    }
    CollapseValidation {
        ok: true,
        first_illegal: None,
        reason: None,
    }
}

/// Whether the residual is one vertex plus the empty simplex.
pub fn is_point(seq: &CollapseSequence) -> bool {
    let mut dims: Vec<i64> = seq.residual.iter().map(|t| t.dim()).collect();
    dims.sort_unstable();
    dims == [-1, 0]
}

/// Mod-2 Betti numbers `b_0..b_n` and the Euler characteristic.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct BettiProfile {
    pub betti: Vec<u64>,
    pub euler: i64,
}

impl BettiProfile {
    /// `(1,0,…,0)`.
    pub fn is_acyclic_point(&self) -> bool {
        self.betti.first() == Some(&1) && self.betti[1..].iter().all(|&b| b == 0)
    }
}

/// Rank over GF(2) of a set of bit vectors.
fn rank_gf2(columns: Vec<Vec<u64>>) -> u64 {
    let mut basis: HashMap<usize, Vec<u64>> = HashMap::new();
    let mut rank = 0;
    for mut v in columns {
        while let Some(word) = v.iter().rposition(|&w| w != 0) {
            let lead = word * 64 + 63 - v[word].leading_zeros() as usize;
            match basis.get(&lead) {
                Some(b) => {
                    for (x, y) in v.iter_mut().zip(b) {
                        *x ^= y;
                    }
                }
                None => {
                    basis.insert(lead, v);
                    rank += 1;
                    break;
                }
            }
        }
    }
    rank
}

pub fn homology_gf2(k: &Complex) -> BettiProfile {
    homology_gf2_of(k, &vec![true; k.len()])
}

/// Homology of the subcomplex of simplices marked `alive`.
pub fn homology_gf2_of(k: &Complex, alive: &[bool]) -> BettiProfile {
    let n = k.dim();
    if n < 0 {
        return BettiProfile {
            betti: Vec::new(),
            euler: 0,
        };
    }
    let mut by_dim: Vec<Vec<SimplexId>> = vec![Vec::new(); n as usize + 1];
    let mut row_of = vec![usize::MAX; k.len()];
    for i in k.ids() {
        let d = k.dim_of(i);
        if alive[i] && d >= 0 {
            row_of[i] = by_dim[d as usize].len();
            by_dim[d as usize].push(i);
        }
    }
    let mut ranks = vec![0u64; n as usize + 2];
    for d in 1..=n as usize {
        let words = by_dim[d - 1].len().div_ceil(64).max(1);
        let columns = by_dim[d]
            .iter()
            .map(|&i| {
                let mut v = vec![0u64; words];
                for &f in k.facets(i) {
                    let r = row_of[f];
                    v[r / 64] ^= 1 << (r % 64);
                }
                v
            })
            .collect();
        ranks[d] = rank_gf2(columns);
    }
    let betti = (0..=n as usize)
        .map(|d| by_dim[d].len() as u64 - ranks[d] - ranks[d + 1])
        .collect();
    let euler = by_dim
        .iter()
        .enumerate()
        .map(|(d, c)| {
            if d % 2 == 0 {
                c.len() as i64
            } else {
                -(c.len() as i64)
            }
        })
        .sum();
    BettiProfile { betti, euler }
}
