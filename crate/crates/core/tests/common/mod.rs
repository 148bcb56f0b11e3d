//! Reference implementations used as oracles. They work from the raw
//! definitions and share no code with the library beyond its data types.
#![allow(dead_code)]

use snapcx::witness::{Layer, WitnessTable};
use snapcx::{ProcSet, ProcessId, RoundCounter};
use std::collections::{BTreeMap, BTreeSet};

/// Executions of `r`: sequences of nonempty sets of still-running processes,
/// each process appearing exactly `r(p)` times.
pub fn executions(r: &RoundCounter) -> Vec<Vec<ProcSet>> {
    fn go(left: &BTreeMap<ProcessId, u32>, prefix: &mut Vec<ProcSet>, out: &mut Vec<Vec<ProcSet>>) {
        let live: Vec<ProcessId> = left
            .iter()
            .filter(|(_, &v)| v > 0)
            .map(|(&p, _)| p)
            .collect();
        if live.is_empty() {
            out.push(prefix.clone());
            return;
        }
        for mask in 1u32..(1 << live.len()) {
            let class: ProcSet = (0..live.len())
                .filter(|k| mask >> k & 1 == 1)
                .map(|k| live[k])
                .collect();
            let mut next = left.clone();
            for p in class.iter() {
                *next.get_mut(&p).unwrap() -= 1;
            }
            prefix.push(class);
            go(&next, prefix, out);
            prefix.pop();
        }
    }
    let mut out = Vec::new();
    go(&r.entries().collect(), &mut Vec::new(), &mut out);
    out
}

/// The top simplex of an execution: `W_0 = supp r`, then the concurrency
/// classes in order, no ghosts.
pub fn execution_table(r: &RoundCounter, exec: &[ProcSet]) -> WitnessTable {
    let rows = std::iter::once(r.supp()).chain(exec.iter().cloned());
    WitnessTable::new(rows.map(|w| Layer::new(w, ProcSet::new())).collect()).unwrap()
}

/// Delannoy numbers, summed directly.
pub fn delannoy(m: u64, n: u64) -> u64 {
    fn binom(n: u64, k: u64) -> u64 {
        (0..k).fold(1, |acc, i| acc * (n - i) / (i + 1))
    }
    (0..=m.min(n))
        .map(|k| binom(m, k) * binom(n, k) * (1 << k))
        .sum()
}

/// Ordered set partitions of an `n`-set.
pub fn fubini(n: usize) -> u64 {
    let mut a = vec![1u64];
    for m in 1..=n {
        let mut s = 0;
        let mut c = 1u64;
        for k in 1..=m {
            c = c * (m - k + 1) as u64 / k as u64;
            s += c * a[m - k];
        }
        a.push(s);
    }
    a[n]
}

/// Table assembled from per-process traces: a ghost sits in the ghost set of
/// its last row and in the witness sets of its other rows; active processes
/// are witnesses everywhere.
pub fn table_from_traces(
    traces: &BTreeMap<ProcessId, (bool, BTreeSet<usize>)>,
) -> Vec<(ProcSet, ProcSet)> {
    let t = traces
        .values()
        .filter_map(|(_, tr)| tr.last().copied())
        .max()
        .unwrap_or(0);
    let mut rows = vec![(ProcSet::new(), ProcSet::new()); t + 1];
    for (&p, (is_ghost, tr)) in traces {
        let top = *tr.last().unwrap();
        for &k in tr {
            if *is_ghost && k == top {
                rows[k].1.insert(p);
            } else {
                rows[k].0.insert(p);
            }
        }
    }
    rows
}

/// Every trace assignment on `supp` with rows `≤ max_row`: each process gets
/// a ghost flag and a row set containing 0.
pub fn all_trace_assignments(
    supp: &ProcSet,
    max_row: usize,
    max_len: impl Fn(ProcessId) -> usize,
) -> Vec<BTreeMap<ProcessId, (bool, BTreeSet<usize>)>> {
    let mut out = vec![BTreeMap::new()];
    for p in supp.iter() {
        let cap = max_len(p);
        let mut options = Vec::new();
        for mask in 0u32..(1 << max_row) {
            let tr: BTreeSet<usize> = std::iter::once(0)
                .chain((1..=max_row).filter(|k| mask >> (k - 1) & 1 == 1))
                .collect();
            if tr.len() <= cap {
                options.push(tr);
            }
        }
        let mut next = Vec::new();
        for partial in &out {
            for tr in &options {
                for ghost in [false, true] {
                    let mut m = partial.clone();
                    m.insert(p, (ghost, tr.clone()));
                    next.push(m);
                }
            }
        }
        out = next;
    }
    out
}

/// All simplices of `P(r)` straight from the definition: every row after
/// row 0 holds a witness, active processes occur `r(p)+1` times and ghosts
/// at most that often.
pub fn simplices_by_definition(r: &RoundCounter) -> BTreeSet<WitnessTable> {
    let supp = r.supp();
    let max_row: usize = r.values().iter().map(|&v| v as usize).sum();
    let budget = |p: ProcessId| r.get(p).unwrap() as usize + 1;
    let mut out = BTreeSet::new();
    for traces in all_trace_assignments(&supp, max_row, budget) {
        let ok_counts = traces.iter().all(|(&p, (g, tr))| {
            if *g {
                tr.len() <= budget(p)
            } else {
                tr.len() == budget(p)
            }
        });
        if !ok_counts {
            continue;
        }
        let rows = table_from_traces(&traces);
        if rows[1..].iter().any(|(w, _)| w.is_empty()) {
            continue;
        }
        out.insert(WitnessTable::from_pairs(rows).unwrap());
    }
    out
}

/// Round counters on processes `0..len` for every value list with
/// `1 ≤ len ≤ max_len` and sum `≤ max_sum`.
pub fn counters(max_len: usize, max_sum: u32) -> Vec<RoundCounter> {
    fn go(len: usize, sum: u32, prefix: &mut Vec<u32>, out: &mut Vec<RoundCounter>) {
        if prefix.len() == len {
            out.push(RoundCounter::from_values(prefix));
            return;
        }
        for v in 0..=sum {
            prefix.push(v);
            go(len, sum - v, prefix, out);
            prefix.pop();
        }
    }
    let mut out = Vec::new();
    for len in 1..=max_len {
        go(len, max_sum, &mut Vec::new(), &mut out);
    }
    out
}

pub fn c(values: &[u32]) -> RoundCounter {
    RoundCounter::from_values(values)
}

pub fn t(rows: &[(&[ProcessId], &[ProcessId])]) -> WitnessTable {
    WitnessTable::from_slices(rows).unwrap()
}

/// Every table of class at least prestructure on `supp`, rows `≤ max_row`,
/// without trailing rows that are empty in both columns.
pub fn tables_on(supp: &ProcSet, max_row: usize) -> Vec<WitnessTable> {
    all_trace_assignments(supp, max_row, |_| usize::MAX)
        .into_iter()
        .filter_map(|tr| WitnessTable::from_pairs(table_from_traces(&tr)).ok())
        .collect()
}
