//! Strata `X_{S,A,V}` of `P(r)` indexed by the first concurrency class `S`,
//! forced ghosts `A` and row-0 ghosts `V`; the isomorphisms `γ`/`ρ` onto
//! smaller complexes and the incidence laws between strata.

use crate::complex::{check_boundary_iso, delta_v, is_closed, Complex, ComplexCache, SimplexId};
use crate::counting::CountMemo;
use crate::error::{Error, Result};
use crate::report::Report;
use crate::rounds::{delete, execute, reduce, RoundCounter};
use crate::sets::ProcSet;
use crate::witness::{Layer, WitnessTable};
use serde_json::{json, Value};
use std::collections::HashSet;

/// Names the subcomplex `X_{S,A} ∩ B_V`.
#[derive(Clone, Debug, Default, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct StratumId {
    pub s: ProcSet,
    pub a: ProcSet,
    pub v: ProcSet,
}

impl StratumId {
    pub fn new(s: ProcSet, a: ProcSet, v: ProcSet) -> Self {
        StratumId { s, a, v }
    }

    /// `X_{S,A}`.
    pub fn sa(s: ProcSet, a: ProcSet) -> Self {
        StratumId {
            s,
            a,
            v: ProcSet::new(),
        }
    }

    /// `X_S`.
    pub fn s(s: ProcSet) -> Self {
        StratumId {
            s,
            a: ProcSet::new(),
            v: ProcSet::new(),
        }
    }

    fn check_shape(&self) -> Result<()> {
        if !self.a.is_subset(&self.s) {
            return Err(Error::InvalidArgument(format!(
                "A={} is not inside S={}",
                self.a, self.s
            )));
        }
        if !self.v.is_disjoint(&self.s) {
            return Err(Error::InvalidArgument(format!(
                "V={} meets S={}",
                self.v, self.s
            )));
        }
        Ok(())
    }

    /// Well-formedness against a counter: `A ⊆ S ⊆ act r`, `V ⊆ supp r`, `V ∩ S = ∅`.
    pub fn check(&self, r: &RoundCounter) -> Result<()> {
        self.check_shape()?;
        if !self.s.is_subset(&r.act()) {
            return Err(Error::InvalidArgument(format!(
                "S={} is not inside act {r:?}",
                self.s
            )));
        }
        if !self.v.is_subset(&r.supp()) {
            return Err(Error::InvalidArgument(format!(
                "V={} is not inside supp {r:?}",
                self.v
            )));
        }
        Ok(())
    }

    pub fn params(&self) -> Value {
        json!({"S": self.s, "A": self.a, "V": self.v})
    }

    /// The counter `P(r_{S,A} ∖ V)` the stratum is isomorphic to.
    pub fn target(&self, r: &RoundCounter) -> Result<RoundCounter> {
        Ok(delete(&reduce(r, &self.s, &self.a)?, &self.v))
    }
}

/// Every `(S,A,V)` with `∅ ≠ S ⊆ act r`, `A ⊆ S`, `V ⊆ supp r ∖ S`; with
/// `with_v = false` only `V = ∅`.
pub fn stratum_ids(r: &RoundCounter, with_v: bool) -> Vec<StratumId> {
    let supp = r.supp();
    let mut out = Vec::new();
    for s in r.act().nonempty_subsets() {
        let vs = if with_v {
            supp.difference(&s).subsets()
        } else {
            vec![ProcSet::new()]
        };
        for a in s.subsets() {
            for v in &vs {
                out.push(StratumId::new(s.clone(), a.clone(), v.clone()));
            }
        }
    }
    out
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Membership {
    InY,
    InZ,
    Out,
}

/// `Z_S`: `S ⊆ G_1`, or `S ⊆ G_0` for single-row tables.
pub fn in_z(sigma: &WitnessTable, s: &ProcSet) -> bool {
    if sigma.t() == 0 {
        s.is_subset(sigma.g(0))
    } else {
        s.is_subset(sigma.g(1))
    }
}

/// `Y_{S,A}`: `R_1 = S` and `A ⊆ G_1`; never a single-row table.
pub fn in_y(sigma: &WitnessTable, s: &ProcSet, a: &ProcSet) -> bool {
    sigma.t() >= 1 && &sigma.r(1) == s && a.is_subset(sigma.g(1))
}

pub fn in_x(sigma: &WitnessTable, s: &ProcSet, a: &ProcSet) -> bool {
    in_z(sigma, s) || in_y(sigma, s, a)
}

pub fn membership(sigma: &WitnessTable, id: &StratumId) -> Result<Membership> {
    id.check_shape()?;
    if !id.v.is_subset(sigma.g(0)) {
        return Ok(Membership::Out);
    }
    Ok(if in_z(sigma, &id.s) {
        Membership::InZ
    } else if in_y(sigma, &id.s, &id.a) {
        Membership::InY
    } else {
        Membership::Out
    })
}

/// The simplices of `X_{S,A,V}`.
pub fn stratum(k: &Complex, id: &StratumId) -> Result<Vec<SimplexId>> {
    id.check(k.counter())?;
    Ok(k.ids()
        .filter(|&i| membership(k.simplex(i), id).expect("shape checked") != Membership::Out)
        .collect())
}

fn table(layers: Vec<Layer>) -> Result<WitnessTable> {
    WitnessTable::new(layers)
}

/// `γ_{S,A}`: into `P(r_{S,A})`. The `Y` case folds row 1 into row 0, the
/// `Z` case moves `S` from `G_1` to `G_0`; then `A` leaves row 0.
pub fn gamma(sigma: &WitnessTable, id: &StratumId) -> Result<WitnessTable> {
    let m = membership(sigma, id)?;
    let rows = sigma.layers();
    let mut layers: Vec<Layer> = match m {
        Membership::Out => {
            return Err(Error::Precondition(format!(
                "{sigma:?} is outside the stratum {id:?}"
            )))
        }
        _ if sigma.t() == 0 => rows.to_vec(),
        Membership::InZ => {
            let mut out = vec![
                Layer::new(rows[0].w.difference(&id.s), rows[0].g.union(&id.s)),
                Layer::new(rows[1].w.clone(), rows[1].g.difference(&id.s)),
            ];
            out.extend_from_slice(&rows[2..]);
            out
        }
        Membership::InY => {
            let mut out = vec![Layer::new(
                rows[0].w.difference(&rows[1].g),
                rows[0].g.union(&rows[1].g),
            )];
            out.extend_from_slice(&rows[2..]);
            out
        }
    };
    layers[0].g = layers[0].g.difference(&id.a);
    table(layers)
}

/// `ρ_S`, the inverse of `γ_S` on `P(r↓S)`.
pub fn rho(tau: &WitnessTable, s: &ProcSet) -> Result<WitnessTable> {
    let rows = tau.layers();
    let (v0, h0) = (&rows[0].w, &rows[0].g);
    if !v0.is_disjoint(s) {
        let mut out = vec![
            Layer::new(v0.union(&h0.intersection(s)), h0.difference(s)),
            Layer::new(v0.intersection(s), h0.intersection(s)),
        ];
        out.extend_from_slice(&rows[1..]);
        return table(out);
    }
    if !s.is_subset(h0) {
        return Err(Error::Precondition(format!(
            "{s} is not inside the support of {tau:?}"
        )));
    }
    if tau.t() == 0 {
        return Ok(tau.clone());
    }
    let mut out = vec![
        Layer::new(v0.union(s), h0.difference(s)),
        Layer::new(rows[1].w.clone(), rows[1].g.union(s)),
    ];
    out.extend_from_slice(&rows[2..]);
    table(out)
}

/// Inverse of [`gamma`]: put `A` back into row 0, then apply `ρ_S`.
pub fn gamma_inverse(tau: &WitnessTable, id: &StratumId) -> Result<WitnessTable> {
    rho(&tau.with_g0(tau.g(0).union(&id.a))?, &id.s)
}

/// `δ_V ∘ γ_{S,A}`: from `X_{S,A,V}` into `P(r_{S,A} ∖ V)`.
pub fn stratum_map(sigma: &WitnessTable, id: &StratumId) -> Result<WitnessTable> {
    delta_v(&gamma(sigma, id)?, &id.v)
}

/// `X_{S,A,V}(r) ≅ P(r_{S,A} ∖ V)`: bijective, inverse to `ρ`, commuting with facets.
pub fn verify_stratum_iso(
    r: &RoundCounter,
    id: &StratumId,
    cache: &mut ComplexCache,
) -> Result<Report> {
    id.check(r)?;
    let params = json!({"counter": r.to_string(), "id": id.params()});
    let k = cache.get(r);
    let target = cache.get(&id.target(r)?);
    let slice = stratum(&k, id)?;
    if !is_closed(&k, &slice) {
        return Ok(Report::fail(
            "stratum-iso",
            params,
            "stratum is not closed under faces",
        ));
    }
    let mut images = vec![usize::MAX; k.len()];
    let mut seen = HashSet::new();
    for &i in &slice {
        let sigma = k.simplex(i);
        let tau = stratum_map(sigma, id)?;
        let Some(j) = target.id_of(&tau) else {
            return Ok(Report::fail("stratum-iso", params, sigma.key()));
        };
        let back = gamma_inverse(&tau.with_g0(tau.g(0).union(&id.v))?, id)?;
        if &back != sigma || !seen.insert(j) {
            return Ok(Report::fail("stratum-iso", params, sigma.key()));
        }
        images[i] = j;
    }
    if seen.len() != target.len() {
        return Ok(Report::fail(
            "stratum-iso",
            params,
            "map is not onto the target complex",
        ));
    }
    for &i in &slice {
        let mut mapped: Vec<SimplexId> = k.facets(i).iter().map(|&f| images[f]).collect();
        mapped.sort_unstable();
        if mapped != target.facets(images[i]) {
            return Ok(Report::fail("stratum-iso", params, k.key(i)));
        }
    }
    Ok(Report::pass("stratum-iso", params))
}

/// [`verify_stratum_iso`] over every id, folded into one report.
pub fn verify_all_strata(r: &RoundCounter, cache: &mut ComplexCache) -> Result<Report> {
    let params = json!({"counter": r.to_string()});
    for id in stratum_ids(r, true) {
        let rep = verify_stratum_iso(r, &id, cache)?;
        if !rep.ok {
            let detail = format!(
                "{}: {}",
                id.params(),
                rep.counterexample.unwrap_or_default()
            );
            return Ok(Report::fail("strata", params, detail));
        }
    }
    Ok(Report::pass("strata", params))
}

type Mask = Vec<bool>;

fn mask(k: &Complex, pred: impl Fn(&WitnessTable) -> bool) -> Mask {
    k.ids().map(|i| pred(k.simplex(i))).collect()
}

fn and(a: &Mask, b: &Mask) -> Mask {
    a.iter().zip(b).map(|(x, y)| *x && *y).collect()
}

/// First simplex where the two sets differ.
fn differ(k: &Complex, a: &Mask, b: &Mask) -> Option<String> {
    a.iter().zip(b).position(|(x, y)| x != y).map(|i| k.key(i))
}

fn subset(a: &Mask, b: &Mask) -> bool {
    a.iter().zip(b).all(|(x, y)| !*x || *y)
}

fn x_mask(k: &Complex, s: &ProcSet, a: &ProcSet) -> Mask {
    mask(k, |t| in_x(t, s, a))
}

/// Containment, pairwise and multiple intersections, the `Y`/`Z` lemma,
/// `X_{A,A} = ∪_{A⊊S} X_{S,A}`, covering by the `X_S`, and closedness.
pub fn verify_incidence(r: &RoundCounter, cache: &mut ComplexCache) -> Vec<Report> {
    let k = cache.get(r);
    let act = r.act();
    let base = json!({"counter": r.to_string()});
    let pairs: Vec<(ProcSet, ProcSet)> = act
        .nonempty_subsets()
        .into_iter()
        .flat_map(|s| s.subsets().into_iter().map(move |a| (s.clone(), a)))
        .collect();
    let x: Vec<Mask> = pairs.iter().map(|(s, a)| x_mask(&k, s, a)).collect();
    let mut reports = Vec::new();

    let mut bad = None;
    'outer: for (i, (s, a)) in pairs.iter().enumerate() {
        for (j, (t, b)) in pairs.iter().enumerate() {
            // for A = S only the sufficient direction holds
            let predicted = (s == t && b.is_subset(a)) || t.is_subset(a);
            let actual = subset(&x[i], &x[j]);
            if actual != predicted && (predicted || a != s) {
                bad = Some(format!(
                    "X_{{{s},{a}}} ⊆ X_{{{t},{b}}} expected {predicted}"
                ));
                break 'outer;
            }
        }
    }
    reports.push(Report::from_first_failure("containment", base.clone(), bad));

    let mut bad = None;
    'outer: for (i, (s, a)) in pairs.iter().enumerate() {
        for (j, (t, b)) in pairs.iter().enumerate() {
            let meet = and(&x[i], &x[j]);
            let predicted = if s == t {
                x_mask(&k, s, &a.union(b))
            } else if s.is_subset(t) {
                x_mask(&k, t, &s.union(b))
            } else if t.is_subset(s) {
                x_mask(&k, s, &t.union(a))
            } else {
                mask(&k, |w| in_z(w, &s.union(t)))
            };
            if let Some(key) = differ(&k, &meet, &predicted) {
                bad = Some(format!("X_{{{s},{a}}} ∩ X_{{{t},{b}}} at {key}"));
                break 'outer;
            }
        }
    }
    reports.push(Report::from_first_failure(
        "intersection",
        base.clone(),
        bad,
    ));

    let mut bad = None;
    'outer: for (s, a) in &pairs {
        for (t, b) in &pairs {
            let zs = mask(&k, |w| in_z(w, s));
            let zt = mask(&k, |w| in_z(w, t));
            let ysa = mask(&k, |w| in_y(w, s, a));
            let ytb = mask(&k, |w| in_y(w, t, b));
            let checks = [
                (and(&zs, &zt), mask(&k, |w| in_z(w, &s.union(t)))),
                (and(&ysa, &zt), mask(&k, |w| in_y(w, s, &a.union(t)))),
                (
                    and(&ysa, &ytb),
                    if s == t {
                        mask(&k, |w| in_y(w, s, &a.union(b)))
                    } else {
                        vec![false; k.len()]
                    },
                ),
            ];
            for (lhs, rhs) in &checks {
                if let Some(key) = differ(&k, lhs, rhs) {
                    bad = Some(format!("S={s} A={a} T={t} B={b} at {key}"));
                    break 'outer;
                }
            }
        }
    }
    reports.push(Report::from_first_failure("yz-lemma", base.clone(), bad));

    let subsets = act.nonempty_subsets();
    let mut bad = None;
    let mut families: Vec<Vec<&ProcSet>> = Vec::new();
    for s1 in &subsets {
        for s2 in &subsets {
            if s2 == s1 {
                continue;
            }
            families.push(vec![s1, s2]);
            for s3 in &subsets {
                if s3 != s1 && s3 != s2 {
                    families.push(vec![s1, s2, s3]);
                }
            }
        }
    }
    for fam in families {
        let s1 = fam[0];
        if fam[1..].iter().any(|si| s1.is_subset(si)) {
            continue;
        }
        let rest = fam[1..]
            .iter()
            .fold(ProcSet::new(), |acc, si| acc.union(si));
        let meet = fam
            .iter()
            .map(|si| x_mask(&k, si, &ProcSet::new()))
            .reduce(|acc, m| and(&acc, &m))
            .expect("families are nonempty");
        let predicted = if fam[1..].iter().all(|si| si.is_subset(s1)) {
            x_mask(&k, s1, &rest)
        } else {
            mask(&k, |w| in_z(w, &s1.union(&rest)))
        };
        if let Some(key) = differ(&k, &meet, &predicted) {
            bad = Some(format!("family {fam:?} at {key}"));
            break;
        }
    }
    reports.push(Report::from_first_failure(
        "multi-intersection",
        base.clone(),
        bad,
    ));

    let mut bad = None;
    for a in act.subsets() {
        if a == act {
            continue;
        }
        let lhs = x_mask(&k, &a, &a);
        let mut rhs = vec![false; k.len()];
        for s in act.nonempty_subsets() {
            if a.is_subset(&s) && a != s {
                for (acc, m) in rhs.iter_mut().zip(x_mask(&k, &s, &a)) {
                    *acc |= m;
                }
            }
        }
        if let Some(key) = differ(&k, &lhs, &rhs) {
            bad = Some(format!("A={a} at {key}"));
            break;
        }
    }
    reports.push(Report::from_first_failure("xaa", base.clone(), bad));

    if !act.is_empty() {
        let mut cover = vec![false; k.len()];
        for s in act.nonempty_subsets() {
            for (acc, m) in cover.iter_mut().zip(x_mask(&k, &s, &ProcSet::new())) {
                *acc |= m;
            }
        }
        let bad = cover.iter().position(|c| !c).map(|i| k.key(i));
        reports.push(Report::from_first_failure("covering", base.clone(), bad));
    }

    let mut bad = None;
    for id in stratum_ids(r, true) {
        let slice = stratum(&k, &id).expect("ids are well formed");
        if !is_closed(&k, &slice) {
            bad = Some(format!("{}", id.params()));
            break;
        }
    }
    reports.push(Report::from_first_failure("closed", base, bad));
    reports
}

/// Replays the commuting squares simplex by simplex: the inclusion square
/// for `X_{S∪A,A} ⊆ X_{A,A}`, the ghost-extension square for `B ⊆ A ⊆ S`,
/// its image form, the `B_V` square, and `B_V ≅ P(r∖V)` itself.
pub fn verify_diagrams(r: &RoundCounter, cache: &mut ComplexCache) -> Result<Vec<Report>> {
    let k = cache.get(r);
    let act = r.act();
    let supp = r.supp();
    let base = json!({"counter": r.to_string()});
    let mut reports = Vec::new();

    // X_{S∪A,A} → X_{A,A} → X_S(r∖A) agrees with ρ_S ∘ γ_{S∪A,A}
    let mut bad = None;
    'xs: for s in act.nonempty_subsets() {
        for a in act.difference(&s).subsets() {
            let sa = StratumId::sa(s.union(&a), a.clone());
            let aa = StratumId::sa(a.clone(), a.clone());
            let small = cache.get(&delete(r, &a));
            for i in stratum(&k, &sa)? {
                let sigma = k.simplex(i);
                let left = gamma(sigma, &aa)?;
                let right = rho(&gamma(sigma, &sa)?, &s)?;
                if left != right || !in_x(&left, &s, &ProcSet::new()) || !small.contains(&left) {
                    bad = Some(format!("S={s} A={a} at {}", sigma.key()));
                    break 'xs;
                }
            }
        }
    }
    reports.push(Report::from_first_failure(
        "inclusion-square",
        base.clone(),
        bad,
    ));

    // γ_{S,B} = δ_{A∖B}^{-1} ∘ γ_{S,A} on X_{S,A}, B ⊆ A ⊆ S
    let mut bad = None;
    'b1: for s in act.nonempty_subsets() {
        for a in s.subsets() {
            let id_a = StratumId::sa(s.clone(), a.clone());
            for b in a.subsets() {
                let id_b = StratumId::sa(s.clone(), b.clone());
                let extra = a.difference(&b);
                let big = cache.get(&reduce(r, &s, &b)?);
                for i in stratum(&k, &id_a)? {
                    let sigma = k.simplex(i);
                    let lhs = gamma(sigma, &id_b)?;
                    let short = gamma(sigma, &id_a)?;
                    let rhs = short.with_g0(short.g(0).union(&extra))?;
                    if lhs != rhs || !extra.is_subset(lhs.g(0)) || !big.contains(&lhs) {
                        bad = Some(format!("S={s} A={a} B={b} at {}", sigma.key()));
                        break 'b1;
                    }
                }
                let small = cache.get(&reduce(r, &s, &a)?);
                if let Some(key) = check_boundary_iso(&big, &small, &extra)? {
                    bad = Some(format!("S={s} A={a} B={b} boundary at {key}"));
                    break 'b1;
                }
            }
        }
    }
    reports.push(Report::from_first_failure(
        "ghost-square",
        base.clone(),
        bad,
    ));

    // γ_{S,A}(X_{S,A'}) = B_{A'∖A}(P(r_{S,A})) for A ⊆ A' ⊆ S
    let mut bad = None;
    'var: for s in act.nonempty_subsets() {
        for a in s.subsets() {
            let id_a = StratumId::sa(s.clone(), a.clone());
            let target = cache.get(&reduce(r, &s, &a)?);
            for a2 in s.subsets() {
                if !a.is_subset(&a2) {
                    continue;
                }
                let extra = a2.difference(&a);
                let mut image = HashSet::new();
                for i in stratum(&k, &StratumId::sa(s.clone(), a2.clone()))? {
                    image.insert(gamma(k.simplex(i), &id_a)?);
                }
                let expected: HashSet<WitnessTable> = target
                    .simplices()
                    .iter()
                    .filter(|t| extra.is_subset(t.g(0)))
                    .cloned()
                    .collect();
                if image != expected {
                    bad = Some(format!("S={s} A={a} A'={a2}"));
                    break 'var;
                }
            }
        }
    }
    reports.push(Report::from_first_failure("ghost-image", base.clone(), bad));

    // X_{S,A,V}: γ lands in B_V(r_{S,A}), δ_V lands in X_{S,A}(r∖V), and the square closes
    let mut bad = None;
    'bar: for v in supp.nonempty_subsets() {
        let without_v = cache.get(&delete(r, &v));
        for s in act.difference(&v).nonempty_subsets() {
            for a in s.subsets() {
                let id = StratumId::new(s.clone(), a.clone(), v.clone());
                let plain = StratumId::sa(s.clone(), a.clone());
                let rsa = cache.get(&reduce(r, &s, &a)?);
                let corner = cache.get(&id.target(r)?);
                let slice = stratum(&k, &id)?;
                let mut up = HashSet::new();
                let mut left = HashSet::new();
                for &i in &slice {
                    let sigma = k.simplex(i);
                    let phi = gamma(sigma, &plain)?;
                    let psi = delta_v(sigma, &v)?;
                    let ok = v.is_subset(phi.g(0))
                        && rsa.contains(&phi)
                        && without_v.contains(&psi)
                        && in_x(&psi, &s, &a)
                        && delta_v(&phi, &v)? == gamma(&psi, &plain)?
                        && corner.contains(&delta_v(&phi, &v)?);
                    if !ok || !up.insert(phi) || !left.insert(psi) {
                        bad = Some(format!("S={s} A={a} V={v} at {}", sigma.key()));
                        break 'bar;
                    }
                }
                let bv = rsa
                    .ids()
                    .filter(|&j| v.is_subset(rsa.simplex(j).g(0)))
                    .count();
                let xsa = stratum(&without_v, &plain)?.len();
                if up.len() != bv || left.len() != xsa {
                    bad = Some(format!("S={s} A={a} V={v} not onto"));
                    break 'bar;
                }
            }
        }
    }
    reports.push(Report::from_first_failure(
        "boundary-square",
        base.clone(),
        bad,
    ));

    let mut bad = None;
    for v in supp.subsets() {
        let target = cache.get(&delete(r, &v));
        if let Some(key) = check_boundary_iso(&k, &target, &v)? {
            bad = Some(format!("V={v} at {key}"));
            break;
        }
    }
    reports.push(Report::from_first_failure("boundary-iso", base, bad));
    Ok(reports)
}

/// Interior of `X_{S,A,V}` read through the isomorphism: the simplices whose
/// image in `P(r_{S,A}∖V)` has empty row-0 ghost set.
pub fn stratum_interior(k: &Complex, id: &StratumId) -> Result<Vec<SimplexId>> {
    let mut out = Vec::new();
    for i in stratum(k, id)? {
        if stratum_map(k.simplex(i), id)?.g(0).is_empty() {
            out.push(i);
        }
    }
    Ok(out)
}

/// Every single-row simplex is a face of `((pass r, act r))`; every other
/// simplex lies in the interior of exactly one `X_{S,A,V}`, namely
/// `(R_1, G_1, G_0)`; interior tops per `S` match the subset recursion.
pub fn strata_partition(k: &Complex) -> Result<Vec<Report>> {
    let r = k.counter();
    let base = json!({"counter": r.to_string()});
    let pass = r.pass();
    let mut reports = Vec::new();

    let bad = k
        .ids()
        .find(|&i| k.simplex(i).t() == 0 && !k.simplex(i).w(0).is_subset(&pass))
        .map(|i| k.key(i));
    reports.push(Report::from_first_failure(
        "passive-simplex",
        base.clone(),
        bad,
    ));

    let mut owner: Vec<Vec<StratumId>> = vec![Vec::new(); k.len()];
    let mut bad = None;
    for id in stratum_ids(r, true) {
        if id.a == id.s {
            continue;
        }
        let interior = stratum_interior(k, &id)?;
        let direct: Vec<SimplexId> = k
            .ids()
            .filter(|&i| {
                let t = k.simplex(i);
                t.t() >= 1 && t.g(0) == &id.v && t.r(1) == id.s && t.g(1) == &id.a
            })
            .collect();
        if interior != direct && bad.is_none() {
            bad = Some(format!("interior of {} differs", id.params()));
        }
        for i in interior {
            owner[i].push(id.clone());
        }
    }
    reports.push(Report::from_first_failure(
        "interior-shape",
        base.clone(),
        bad,
    ));

    let bad = k
        .ids()
        .find(|&i| {
            let t = k.simplex(i);
            if t.t() == 0 {
                !owner[i].is_empty()
            } else {
                owner[i].len() != 1
                    || owner[i][0] != StratumId::new(t.r(1), t.g(1).clone(), t.g(0).clone())
            }
        })
        .map(|i| k.key(i));
    reports.push(Report::from_first_failure("partition", base.clone(), bad));

    let mut memo = CountMemo::new();
    let mut bad = None;
    let mut total = 0;
    for s in r.act().nonempty_subsets() {
        let id = StratumId::s(s.clone());
        let tops = stratum_interior(k, &id)?
            .into_iter()
            .filter(|&i| k.dim_of(i) == k.dim())
            .count() as u64;
        total += tops;
        if tops != memo.f_top(&execute(r, &s)?.values())? {
            bad = Some(format!("S={s} has {tops} interior tops"));
        }
    }
    if !r.act().is_empty() && total != k.tops().len() as u64 {
        bad = Some(format!("{total} interior tops of {}", k.tops().len()));
    }
    reports.push(Report::from_first_failure("top-counts", base, bad));
    Ok(reports)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::complex::build;
    use crate::sets::ProcessId;

    fn wt(rows: &[(&[ProcessId], &[ProcessId])]) -> WitnessTable {
        WitnessTable::from_slices(rows).unwrap()
    }

    fn ps<const N: usize>(a: [ProcessId; N]) -> ProcSet {
        ProcSet::from(a)
    }

    fn keys(k: &Complex, ids: &[SimplexId]) -> HashSet<WitnessTable> {
        ids.iter().map(|&i| k.simplex(i).clone()).collect()
    }

    #[test]
    fn membership_examples() {
        let top = wt(&[(&[0, 1], &[]), (&[0, 1], &[])]);
        assert_eq!(
            membership(&top, &StratumId::s(ps([0, 1]))).unwrap(),
            Membership::InY
        );
        let w = wt(&[(&[0, 1], &[]), (&[1], &[0])]);
        assert_eq!(
            membership(&w, &StratumId::sa(ps([0]), ps([0]))).unwrap(),
            Membership::InZ
        );
        let e = wt(&[(&[], &[0, 1])]);
        for id in stratum_ids(&RoundCounter::from_values(&[1, 1]), false) {
            assert_eq!(membership(&e, &id).unwrap(), Membership::InZ);
        }
        assert!(membership(&e, &StratumId::sa(ps([0]), ps([1]))).is_err());
    }

    #[test]
    fn stratum_examples() {
        let k = build(&RoundCounter::from_values(&[1, 1]));
        let x0 = stratum(&k, &StratumId::s(ps([0]))).unwrap();
        let edge = wt(&[(&[0, 1], &[]), (&[0], &[]), (&[1], &[])]);
        let want: HashSet<WitnessTable> = [
            edge.clone(),
            wt(&[(&[0], &[1]), (&[0], &[])]),
            wt(&[(&[0, 1], &[]), (&[1], &[0])]),
            wt(&[(&[], &[0, 1])]),
        ]
        .into_iter()
        .collect();
        assert_eq!(keys(&k, &x0), want);
        let z = stratum(&k, &StratumId::sa(ps([0, 1]), ps([0, 1]))).unwrap();
        assert_eq!(z, vec![k.empty_id()]);
    }

    #[test]
    fn gamma_rho_examples() {
        let id = StratumId::s(ps([0, 1]));
        assert_eq!(
            gamma(&wt(&[(&[0, 1], &[]), (&[0, 1], &[])]), &id).unwrap(),
            wt(&[(&[0, 1], &[])])
        );
        assert_eq!(
            gamma(&wt(&[(&[0, 1], &[]), (&[0], &[1])]), &id).unwrap(),
            wt(&[(&[0], &[1])])
        );
        assert_eq!(
            rho(&wt(&[(&[0], &[1])]), &ps([0, 1])).unwrap(),
            wt(&[(&[0, 1], &[]), (&[0], &[1])])
        );
        let edge = wt(&[(&[0, 1], &[]), (&[0], &[]), (&[1], &[])]);
        assert!(gamma(&edge, &id).is_err());
    }

    #[test]
    fn stratum_isomorphisms() {
        let mut cache = ComplexCache::new();
        let r = RoundCounter::from_values(&[1, 1]);
        assert!(
            verify_stratum_iso(&r, &StratumId::s(ps([0, 1])), &mut cache)
                .unwrap()
                .ok
        );
        let r = RoundCounter::from_values(&[1, 0]);
        let id = StratumId::sa(ps([0]), ps([0]));
        assert!(verify_stratum_iso(&r, &id, &mut cache).unwrap().ok);
        assert_eq!(stratum(&cache.get(&r), &id).unwrap().len(), 2);
        for r in [[1, 1, 1], [2, 1, 0], [2, 0, 2]] {
            let r = RoundCounter::from_values(&r);
            assert!(verify_all_strata(&r, &mut cache).unwrap().ok, "{r:?}");
        }
    }

    #[test]
    fn incidence_examples() {
        let k = build(&RoundCounter::from_values(&[1, 1]));
        let x = |s: ProcSet, a: ProcSet| -> HashSet<SimplexId> {
            stratum(&k, &StratumId::sa(s, a))
                .unwrap()
                .into_iter()
                .collect()
        };
        let empty: HashSet<SimplexId> = [k.empty_id()].into_iter().collect();
        let meet = |a: HashSet<SimplexId>, b: HashSet<SimplexId>| -> HashSet<SimplexId> {
            a.intersection(&b).copied().collect()
        };
        assert_eq!(meet(x(ps([0]), ps([])), x(ps([1]), ps([]))), empty);
        let w = k.id_of(&wt(&[(&[0, 1], &[]), (&[1], &[0])])).unwrap();
        let m = meet(x(ps([0, 1]), ps([])), x(ps([0]), ps([])));
        assert_eq!(m, [k.empty_id(), w].into_iter().collect());
        assert_eq!(m, x(ps([0, 1]), ps([0])));
        assert_eq!(meet(x(ps([0, 1]), ps([0])), x(ps([0, 1]), ps([1]))), empty);

        let mut cache = ComplexCache::new();
        for r in [[1, 1, 0], [1, 1, 1], [2, 1, 1]] {
            let reps = verify_incidence(&RoundCounter::from_values(&r), &mut cache);
            assert!(reps.iter().all(|x| x.ok), "{reps:?}");
        }
    }

    #[test]
    fn diagram_examples() {
        let mut cache = ComplexCache::new();
        for r in [vec![1, 1], vec![1, 1, 0], vec![2, 1, 1]] {
            let reps = verify_diagrams(&RoundCounter::from_values(&r), &mut cache).unwrap();
            assert!(reps.iter().all(|x| x.ok), "{reps:?}");
        }
    }

    #[test]
    fn partition_examples() {
        let k = build(&RoundCounter::from_values(&[1, 1]));
        assert!(strata_partition(&k).unwrap().iter().all(|x| x.ok));
        let endpoint = k.id_of(&wt(&[(&[0], &[1]), (&[0], &[])])).unwrap();
        let id = StratumId::new(ps([0]), ps([]), ps([1]));
        assert_eq!(stratum_interior(&k, &id).unwrap(), vec![endpoint]);
        let w = k.id_of(&wt(&[(&[0, 1], &[]), (&[1], &[0])])).unwrap();
        assert_eq!(
            stratum_interior(&k, &StratumId::sa(ps([0, 1]), ps([0]))).unwrap(),
            vec![w]
        );

        let k = build(&RoundCounter::from_values(&[0, 0]));
        let reps = strata_partition(&k).unwrap();
        assert!(reps.iter().all(|x| x.ok));

        let k = build(&RoundCounter::from_values(&[1, 1, 1]));
        assert!(strata_partition(&k).unwrap().iter().all(|x| x.ok));
        let mut counts: Vec<usize> = RoundCounter::from_values(&[1, 1, 1])
            .act()
            .nonempty_subsets()
            .into_iter()
            .map(|s| {
                stratum_interior(&k, &StratumId::s(s))
                    .unwrap()
                    .into_iter()
                    .filter(|&i| k.dim_of(i) == 2)
                    .count()
            })
            .collect();
        counts.sort_unstable();
        assert_eq!(counts, vec![1, 1, 1, 1, 3, 3, 3]);
    }
}
