//! The complex `P(r)`: every simplex is a witness table, faces are obtained
//! by ghosting.

use crate::error::{Error, Result};
use crate::rounds::{delete, RoundCounter};
use crate::sets::{ProcSet, ProcessId};
use crate::witness::{ghost, Layer, WitnessTable};
use serde_json::{json, Value};
use std::collections::{BTreeSet, HashMap, HashSet, VecDeque};
use std::fmt::Write as _;
use std::sync::Arc;

/// Index of a simplex inside a [`Complex`].
pub type SimplexId = usize;

/// Membership in `P(r)`: a witness structure on `supp r` where every active
/// process occurs `r(p)+1` times and every ghost at most that often.
pub fn is_simplex(sigma: &WitnessTable, r: &RoundCounter) -> bool {
    if !sigma.is_witness() || sigma.supp() != r.supp() {
        return false;
    }
    let ghosts = sigma.ghosts();
    r.entries().all(|(p, v)| {
        let m = sigma.multiplicity(p);
        let budget = v as usize + 1;
        if ghosts.contains(p) {
            m <= budget
        } else {
            m == budget
        }
    })
}

/// Top simplices of `P(r)`: `W_0 = supp r` followed by every sequence of
/// nonempty sets in which `p` occurs exactly `r(p)` times.
pub fn enumerate_top(r: &RoundCounter) -> Vec<WitnessTable> {
    fn go(
        remaining: &mut Vec<(ProcessId, u32)>,
        rows: &mut Vec<ProcSet>,
        supp: &ProcSet,
        out: &mut Vec<WitnessTable>,
    ) {
        let live: ProcSet = remaining
            .iter()
            .filter(|(_, v)| *v > 0)
            .map(|(p, _)| *p)
            .collect();
        if live.is_empty() {
            let layers = std::iter::once(Layer::new(supp.clone(), ProcSet::new()))
                .chain(rows.iter().map(|w| Layer::new(w.clone(), ProcSet::new())))
                .collect();
            out.push(WitnessTable::new(layers).expect("executions are witness structures"));
            return;
        }
        for s in live.nonempty_subsets() {
            for e in remaining.iter_mut() {
                if s.contains(e.0) {
                    e.1 -= 1;
                }
            }
            rows.push(s.clone());
            go(remaining, rows, supp, out);
            rows.pop();
            for e in remaining.iter_mut() {
                if s.contains(e.0) {
                    e.1 += 1;
                }
            }
        }
    }
    let mut out = Vec::new();
    go(
        &mut r.entries().collect(),
        &mut Vec::new(),
        &r.supp(),
        &mut out,
    );
    out.sort();
    out
}

/// Simplex counts per dimension, starting with the empty simplex.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct FVector {
    pub counts: Vec<u64>,
}

impl FVector {
    /// `Σ (-1)^i f_i` over `i ≥ 0`.
    pub fn euler(&self) -> i64 {
        self.counts
            .iter()
            .skip(1)
            .enumerate()
            .map(|(i, &c)| if i % 2 == 0 { c as i64 } else { -(c as i64) })
            .sum()
    }
}

/// The full face lattice of `P(r)`. Simplices are ordered by dimension and
/// then by table, so ids are deterministic.
#[derive(Clone, Debug)]
pub struct Complex {
    counter: RoundCounter,
    simplices: Vec<WitnessTable>,
    dims: Vec<i64>,
    index: HashMap<WitnessTable, SimplexId>,
    facets: Vec<Vec<SimplexId>>,
    cofacets: Vec<Vec<SimplexId>>,
    tops: Vec<SimplexId>,
}

pub fn build(r: &RoundCounter) -> Complex {
    let mut tables: Vec<WitnessTable> = Vec::new();
    let mut index: HashMap<WitnessTable, usize> = HashMap::new();
    let mut raw_facets: Vec<Vec<usize>> = Vec::new();
    let mut queue = VecDeque::new();
    for top in enumerate_top(r) {
        index.insert(top.clone(), tables.len());
        queue.push_back(tables.len());
        tables.push(top);
        raw_facets.push(Vec::new());
    }
    while let Some(id) = queue.pop_front() {
        let sigma = tables[id].clone();
        let mut fs = Vec::new();
        for p in sigma.active().iter() {
            let face = ghost(&sigma, &ProcSet::singleton(p)).expect("ghosting an active process");
            let fid = match index.get(&face) {
                Some(&f) => f,
                None => {
                    let f = tables.len();
                    index.insert(face.clone(), f);
                    tables.push(face);
                    raw_facets.push(Vec::new());
                    queue.push_back(f);
                    f
                }
            };
            fs.push(fid);
        }
        raw_facets[id] = fs;
    }

    let mut order: Vec<usize> = (0..tables.len()).collect();
    let dims: Vec<i64> = tables.iter().map(|t| t.dim()).collect();
    order.sort_by(|&a, &b| {
        dims[a]
            .cmp(&dims[b])
            .then_with(|| tables[a].cmp(&tables[b]))
    });
    let mut new_id = vec![0; tables.len()];
    for (n, &old) in order.iter().enumerate() {
        new_id[old] = n;
    }
    let simplices: Vec<WitnessTable> = order.iter().map(|&o| tables[o].clone()).collect();
    let dims: Vec<i64> = order.iter().map(|&o| dims[o]).collect();
    let facets: Vec<Vec<SimplexId>> = order
        .iter()
        .map(|&o| {
            let mut fs: Vec<SimplexId> = raw_facets[o].iter().map(|&f| new_id[f]).collect();
            fs.sort_unstable();
            fs
        })
        .collect();
    let mut cofacets = vec![Vec::new(); simplices.len()];
    for (id, fs) in facets.iter().enumerate() {
        for &f in fs {
            cofacets[f].push(id);
        }
    }
    let index = simplices
        .iter()
        .enumerate()
        .map(|(i, s)| (s.clone(), i))
        .collect();
    let top_dim = r.len() as i64 - 1;
    let tops = (0..simplices.len())
        .filter(|&i| dims[i] == top_dim)
        .collect();
    Complex {
        counter: r.clone(),
        simplices,
        dims,
        index,
        facets,
        cofacets,
        tops,
    }
}

impl Complex {
    pub fn counter(&self) -> &RoundCounter {
        &self.counter
    }

    /// `|supp r| - 1`.
    pub fn dim(&self) -> i64 {
        self.counter.len() as i64 - 1
    }

    pub fn len(&self) -> usize {
        self.simplices.len()
    }

    pub fn is_empty(&self) -> bool {
        self.simplices.is_empty()
    }

    pub fn ids(&self) -> std::ops::Range<SimplexId> {
        0..self.simplices.len()
    }

    pub fn simplex(&self, id: SimplexId) -> &WitnessTable {
        &self.simplices[id]
    }

    pub fn simplices(&self) -> &[WitnessTable] {
        &self.simplices
    }

    pub fn dim_of(&self, id: SimplexId) -> i64 {
        self.dims[id]
    }

    pub fn id_of(&self, sigma: &WitnessTable) -> Option<SimplexId> {
        self.index.get(sigma).copied()
    }

    pub fn contains(&self, sigma: &WitnessTable) -> bool {
        self.index.contains_key(sigma)
    }

    pub fn facets(&self, id: SimplexId) -> &[SimplexId] {
        &self.facets[id]
    }

    pub fn cofacets(&self, id: SimplexId) -> &[SimplexId] {
        &self.cofacets[id]
    }

    pub fn tops(&self) -> &[SimplexId] {
        &self.tops
    }

    /// Id of the unique empty simplex.
    pub fn empty_id(&self) -> SimplexId {
        0
    }

    pub fn f_vector(&self) -> FVector {
        let mut counts = vec![0u64; (self.dim() + 2).max(1) as usize];
        for &d in &self.dims {
            counts[(d + 1) as usize] += 1;
        }
        FVector { counts }
    }

    pub fn key(&self, id: SimplexId) -> String {
        self.simplices[id].key()
    }

    /// Codimension-one simplices lying in exactly one top simplex.
    pub fn boundary_facets(&self) -> Vec<SimplexId> {
        let d = self.dim() - 1;
        self.ids()
            .filter(|&i| self.dims[i] == d && self.cofacets[i].len() == 1)
            .collect()
    }

    /// Tops sharing a facet with `top`, sorted.
    pub fn dual_neighbours(&self, top: SimplexId) -> Vec<SimplexId> {
        let mut out: Vec<SimplexId> = self.facets[top]
            .iter()
            .flat_map(|&f| self.cofacets[f].iter().copied())
            .filter(|&c| c != top)
            .collect();
        out.sort_unstable();
        out.dedup();
        out
    }

    /// Ids of the vertices of a simplex.
    pub fn vertex_ids(&self, id: SimplexId) -> Vec<SimplexId> {
        let mut out: Vec<SimplexId> = vertices(&self.simplices[id])
            .iter()
            .map(|v| self.id_of(v).expect("vertices belong to the complex"))
            .collect();
        out.sort_unstable();
        out
    }

    /// `{"counter","f_vector","tops","simplices":[{"key","dim","facets"}]}`.
    pub fn to_json(&self) -> Value {
        json!({
            "counter": serde_json::to_value(&self.counter).expect("counter encodes"),
            "f_vector": self.f_vector().counts,
            "tops": self.tops.iter().map(|&t| self.key(t)).collect::<Vec<_>>(),
            "simplices": self.ids().map(|i| json!({
                "key": self.key(i),
                "dim": self.dims[i],
                "facets": self.facets[i].iter().map(|&f| self.key(f)).collect::<Vec<_>>(),
            })).collect::<Vec<_>>(),
        })
    }

    /// Dual graph in DOT syntax; tops touching the boundary carry `boundary=true`.
    pub fn to_dot(&self) -> String {
        let boundary: HashSet<SimplexId> = self
            .boundary_facets()
            .iter()
            .flat_map(|&f| self.cofacets[f].iter().copied())
            .collect();
        let mut out = String::from("graph dual {\n");
        for &t in &self.tops {
            if boundary.contains(&t) {
                let _ = writeln!(out, "  \"{}\" [boundary=true];", self.key(t));
            } else {
                let _ = writeln!(out, "  \"{}\";", self.key(t));
            }
        }
        for &t in &self.tops {
            for n in self.dual_neighbours(t) {
                if n > t {
                    let _ = writeln!(out, "  \"{}\" -- \"{}\";", self.key(t), self.key(n));
                }
            }
        }
        out.push_str("}\n");
        out
    }
}

/// Builds complexes once per counter.
#[derive(Debug, Default)]
pub struct ComplexCache {
    built: HashMap<RoundCounter, Arc<Complex>>,
}

impl ComplexCache {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn get(&mut self, r: &RoundCounter) -> Arc<Complex> {
        self.built
            .entry(r.clone())
            .or_insert_with(|| Arc::new(build(r)))
            .clone()
    }
}

/// The vertices `Γ_{A∖{a}}(σ)`, one per active process `a`.
pub fn vertices(sigma: &WitnessTable) -> Vec<WitnessTable> {
    let active = sigma.active();
    active
        .iter()
        .map(|a| ghost(sigma, &active.without(a)).expect("ghosting active processes"))
        .collect()
}

/// `B_V`: simplices whose row-0 ghost set contains `v`.
pub fn boundary_subcomplex(k: &Complex, v: &ProcSet) -> Result<Vec<SimplexId>> {
    if !v.is_subset(&k.counter.supp()) {
        return Err(Error::Precondition(format!(
            "{v} is not inside the support"
        )));
    }
    Ok(k.ids()
        .filter(|&i| v.is_subset(k.simplex(i).g(0)))
        .collect())
}

/// Remove `v` from the row-0 ghost set.
pub fn delta_v(sigma: &WitnessTable, v: &ProcSet) -> Result<WitnessTable> {
    if !v.is_subset(sigma.g(0)) {
        return Err(Error::Precondition(format!(
            "{v} is not inside G_0 of {sigma:?}"
        )));
    }
    sigma.with_g0(sigma.g(0).difference(v))
}

/// Inverse of [`delta_v`]: add `v` to the row-0 ghost set.
pub fn delta_v_inverse(tau: &WitnessTable, v: &ProcSet) -> Result<WitnessTable> {
    if !v.is_disjoint(&tau.supp()) {
        return Err(Error::Precondition(format!(
            "{v} meets the support of {tau:?}"
        )));
    }
    tau.with_g0(tau.g(0).union(v))
}

/// Whether `ids` is closed under taking facets.
pub fn is_closed(k: &Complex, ids: &[SimplexId]) -> bool {
    let set: HashSet<SimplexId> = ids.iter().copied().collect();
    ids.iter()
        .all(|&i| k.facets(i).iter().all(|f| set.contains(f)))
}

/// Check that `δ_V` maps `B_V(P(r))` bijectively onto `P(r∖V)` and commutes
/// with facets. Returns the first offending key.
pub fn check_boundary_iso(k: &Complex, target: &Complex, v: &ProcSet) -> Result<Option<String>> {
    let slice = boundary_subcomplex(k, v)?;
    let mut seen = HashSet::new();
    for &i in &slice {
        let sigma = k.simplex(i);
        let image = delta_v(sigma, v)?;
        let Some(j) = target.id_of(&image) else {
            return Ok(Some(sigma.key()));
        };
        if !seen.insert(j) {
            return Ok(Some(sigma.key()));
        }
        let mut mapped: Vec<SimplexId> = Vec::new();
        for &f in k.facets(i) {
            match target.id_of(&delta_v(k.simplex(f), v)?) {
                Some(x) => mapped.push(x),
                None => return Ok(Some(k.key(f))),
            }
        }
        mapped.sort_unstable();
        if mapped != target.facets(j) {
            return Ok(Some(sigma.key()));
        }
    }
    if seen.len() != target.len() {
        return Ok(Some(format!(
            "image misses {} simplices",
            target.len() - seen.len()
        )));
    }
    Ok(None)
}

/// Outcome of [`structural_checks`].
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct StructuralReport {
    pub pure: bool,
    pub pseudomanifold: bool,
    pub boundary_matches: bool,
    pub strongly_connected: bool,
    pub reconstruction_injective: bool,
    /// Name of the first failing check and the key of the offending simplex.
    pub counterexample: Option<(String, String)>,
}

impl StructuralReport {
    pub fn all(&self) -> bool {
        self.pure
            && self.pseudomanifold
            && self.boundary_matches
            && self.strongly_connected
            && self.reconstruction_injective
    }
}

pub fn structural_checks(k: &Complex) -> StructuralReport {
    let n = k.dim();
    let mut counterexample: Option<(String, String)> = None;
    let mut note = |name: &str, id: Option<SimplexId>| {
        if let Some(i) = id {
            if counterexample.is_none() {
                counterexample = Some((name.to_string(), k.key(i)));
            }
            false
        } else {
            true
        }
    };

    let pure = note(
        "pure",
        k.ids()
            .find(|&i| k.dim_of(i) < n && k.cofacets(i).is_empty()),
    );
    let ridges: Vec<SimplexId> = k.ids().filter(|&i| k.dim_of(i) == n - 1).collect();
    let pseudomanifold = note(
        "pseudomanifold",
        ridges
            .iter()
            .copied()
            .find(|&i| !(1..=2).contains(&k.cofacets(i).len())),
    );
    let boundary_matches = note(
        "boundary",
        ridges
            .iter()
            .copied()
            .find(|&i| (k.cofacets(i).len() == 1) != !k.simplex(i).g(0).is_empty()),
    );

    let mut reached = HashSet::new();
    if let Some(&start) = k.tops().first() {
        let mut queue = VecDeque::from([start]);
        reached.insert(start);
        while let Some(t) = queue.pop_front() {
            for nb in k.dual_neighbours(t) {
                if reached.insert(nb) {
                    queue.push_back(nb);
                }
            }
        }
    }
    let strongly_connected = note(
        "connected",
        k.tops().iter().copied().find(|t| !reached.contains(t)),
    );

    let mut images: HashMap<Vec<SimplexId>, SimplexId> = HashMap::new();
    let reconstruction_injective = note(
        "reconstruction",
        k.ids()
            .find(|&i| images.insert(k.vertex_ids(i), i).is_some()),
    );

    StructuralReport {
        pure,
        pseudomanifold,
        boundary_matches,
        strongly_connected,
        reconstruction_injective,
        counterexample,
    }
}

/// Shape of a one-dimensional `P(m,n)`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct PathProfile {
    pub ok: bool,
    pub edges: usize,
    pub vertices: usize,
    /// Valency-one vertices found.
    pub endpoints: Vec<WitnessTable>,
    /// `(({a},{b}),({a},∅),…)` and its mirror.
    pub expected_endpoints: Vec<WitnessTable>,
}

pub fn path_profile(k: &Complex) -> Result<PathProfile> {
    if k.dim() != 1 {
        return Err(Error::Precondition(format!(
            "complex has dimension {}",
            k.dim()
        )));
    }
    let supp = k.counter().supp();
    let (a, b) = (supp.as_slice()[0], supp.as_slice()[1]);
    let endpoint = |x: ProcessId, y: ProcessId| {
        let rounds = k.counter().get(x).expect("in support") as usize;
        let mut rows = vec![Layer::new(ProcSet::singleton(x), ProcSet::singleton(y))];
        rows.extend(std::iter::repeat_n(
            Layer::new(ProcSet::singleton(x), ProcSet::new()),
            rounds,
        ));
        WitnessTable::new(rows).expect("endpoint table is valid")
    };
    let expected_endpoints = vec![endpoint(a, b), endpoint(b, a)];
    let vertex_ids: Vec<SimplexId> = k.ids().filter(|&i| k.dim_of(i) == 0).collect();
    let edges = k.tops().len();
    let mut endpoints = Vec::new();
    let mut valencies_ok = true;
    for &v in &vertex_ids {
        match k.cofacets(v).len() {
            1 => endpoints.push(k.simplex(v).clone()),
            2 => {}
            _ => valencies_ok = false,
        }
    }
    endpoints.sort();
    let mut want = expected_endpoints.clone();
    want.sort();
    let ok = valencies_ok
        && endpoints == want
        && edges + 1 == vertex_ids.len()
        && structural_checks(k).strongly_connected;
    Ok(PathProfile {
        ok,
        edges,
        vertices: vertex_ids.len(),
        endpoints,
        expected_endpoints,
    })
}

/// For `r(n) = 0`, check that `P(r)` is the cone over `P(r∖{n})` with apex the
/// vertex where only `n` is active: `n ∈ W_0` means the apex is present.
pub fn cone_check(r: &RoundCounter, n: ProcessId) -> Result<bool> {
    if r.get(n) != Some(0) {
        return Err(Error::Precondition(format!(
            "process {n} is not passive in {r:?}"
        )));
    }
    let k = build(r);
    let base = build(&delete(r, &ProcSet::singleton(n)));
    let image = |sigma: &WitnessTable| -> Option<(SimplexId, bool)> {
        if sigma.layers()[1..]
            .iter()
            .any(|l| l.w.contains(n) || l.g.contains(n))
        {
            return None;
        }
        let mut layers = sigma.layers().to_vec();
        let apex = layers[0].w.remove(n);
        if !apex && !layers[0].g.remove(n) {
            return None;
        }
        let t = WitnessTable::new(layers).ok()?;
        base.id_of(&t).map(|id| (id, apex))
    };
    let mut images = Vec::with_capacity(k.len());
    for i in k.ids() {
        match image(k.simplex(i)) {
            Some(x) => images.push(x),
            None => return Ok(false),
        }
    }
    let distinct: HashSet<(SimplexId, bool)> = images.iter().copied().collect();
    if distinct.len() != k.len() || k.len() != 2 * base.len() {
        return Ok(false);
    }
    for i in k.ids() {
        let (b, apex) = images[i];
        let mut expected: BTreeSet<(SimplexId, bool)> =
            base.facets(b).iter().map(|&f| (f, apex)).collect();
        if apex {
            expected.insert((b, false));
        }
        let actual: BTreeSet<(SimplexId, bool)> = k.facets(i).iter().map(|&f| images[f]).collect();
        if actual != expected {
            return Ok(false);
        }
    }
    Ok(true)
}

/// The three conditions describing `P(χ_{A,B})`: the rows cover `A∪B`, the
/// later rows partition `W_0 ∩ A`, and those rows are pairwise disjoint.
pub fn satisfies_chromatic_conditions(sigma: &WitnessTable, a: &ProcSet, b: &ProcSet) -> bool {
    if !sigma.is_witness() || sigma.supp() != a.union(b) {
        return false;
    }
    let later = &sigma.layers()[1..];
    let mut union = ProcSet::new();
    let mut total = 0;
    for l in later {
        union = union.union(&l.w).union(&l.g);
        total += l.w.len() + l.g.len();
    }
    union == sigma.w(0).intersection(a) && total == union.len()
}

/// Compare `P(r)` for a 0/1 counter with the structures built from ordered
/// partitions of `W_0 ∩ act r`, each block split into witnesses and ghosts.
pub fn chromatic_check(r: &RoundCounter) -> Result<bool> {
    if !r.is_binary() {
        return Err(Error::Precondition(format!("{r:?} is not 0/1-valued")));
    }
    let (a, b) = (r.act(), r.pass());
    let supp = r.supp();

    fn blocks(rest: &ProcSet, rows: &mut Vec<Layer>, first: &Layer, out: &mut Vec<WitnessTable>) {
        if rest.is_empty() {
            let layers = std::iter::once(first.clone())
                .chain(rows.iter().cloned())
                .collect();
            out.push(WitnessTable::new(layers).expect("partition rows are valid"));
            return;
        }
        for block in rest.nonempty_subsets() {
            for w in block.nonempty_subsets() {
                rows.push(Layer::new(w.clone(), block.difference(&w)));
                blocks(&rest.difference(&block), rows, first, out);
                rows.pop();
            }
        }
    }

    let mut expected = Vec::new();
    for w0 in supp.subsets() {
        let first = Layer::new(w0.clone(), supp.difference(&w0));
        blocks(&w0.intersection(&a), &mut Vec::new(), &first, &mut expected);
    }
    if !expected
        .iter()
        .all(|s| satisfies_chromatic_conditions(s, &a, &b))
    {
        return Ok(false);
    }
    let expected: HashSet<WitnessTable> = expected.into_iter().collect();
    let k = build(r);
    let actual: HashSet<WitnessTable> = k.simplices().iter().cloned().collect();
    Ok(expected == actual)
}
