//! Acceptance criteria 1 to 11, one line each.

mod common;

use common::{c, counters, delannoy, executions, simplices_by_definition, t, tables_on};
use rand::{rngs::StdRng, Rng, SeedableRng};
use snapcx::complex::*;
use snapcx::counting::{f_dim1, f_top, series_check};
use snapcx::decomposition::{
    strata_partition, verify_all_strata, verify_diagrams, verify_incidence,
};
use snapcx::topology::{collapse_to_point, homology_gf2, is_point, validate_collapse};
use snapcx::witness::*;
use snapcx::{ProcSet, ProcessId, RoundCounter};
use std::collections::{BTreeMap, BTreeSet};
use std::panic::catch_unwind;
use std::time::Instant;

type Outcome = Result<String, String>;
type Criterion = (&'static str, fn() -> Outcome);

macro_rules! ensure {
    ($cond:expr, $($msg:tt)+) => {
        if !$cond {
            return Err(format!($($msg)+));
        }
    };
}

fn structural_corpus() -> Vec<RoundCounter> {
    let mut v = counters(3, 5);
    v.push(c(&[1, 1, 1, 1]));
    v
}

fn counting() -> Outcome {
    for m in 0..=5u32 {
        for n in 0..=5u32 {
            let f = f_dim1(m as usize, n as usize).map_err(|e| e.to_string())?;
            let brute = executions(&c(&[m, n])).len() as u64;
            ensure!(f == brute, "f({m},{n}) = {f}, enumeration gives {brute}");
            ensure!(
                f == delannoy(m as u64, n as u64),
                "f({m},{n}) = {f} is not a Delannoy number"
            );
            if m >= 1 && n >= 1 {
                let rec = f_dim1(m as usize - 1, n as usize).unwrap()
                    + f_dim1(m as usize, n as usize - 1).unwrap()
                    + f_dim1(m as usize - 1, n as usize - 1).unwrap();
                ensure!(f == rec, "f({m},{n}) breaks the recursion");
            } else {
                ensure!(f == 1, "f({m},{n}) = {f} on the boundary");
            }
        }
    }
    ensure!(
        f_dim1(2, 2).unwrap() == 13 && f_dim1(3, 3).unwrap() == 63,
        "pinned two-process values"
    );
    Ok("36 pairs m,n <= 5".into())
}

fn top_counts() -> Outcome {
    let corpus: Vec<_> = counters(4, 6);
    for r in &corpus {
        let f = f_top(&r.values()).map_err(|e| e.to_string())?;
        let tops = enumerate_top(r);
        ensure!(
            f == tops.len() as u64,
            "{r}: recursion {f}, enumerate_top {}",
            tops.len()
        );
        let oracle: BTreeSet<_> = executions(r)
            .iter()
            .map(|e| common::execution_table(r, e))
            .collect();
        ensure!(
            tops.iter().cloned().collect::<BTreeSet<_>>() == oracle,
            "{r}: tops differ from executions"
        );
    }
    for (v, want) in [
        (&[1, 1, 1][..], 13),
        (&[1, 1, 2], 31),
        (&[2, 2, 2], 409),
        (&[1, 1, 1, 1], 75),
    ] {
        let got = f_top(v).unwrap();
        ensure!(got == want, "f_top{v:?} = {got}, expected {want}");
    }
    Ok(format!("{} counters", corpus.len()))
}

fn generating_function() -> Outcome {
    let s = series_check(6).map_err(|e| e.to_string())?;
    ensure!(s.ok, "mismatch at {:?}", s.mismatch);
    Ok(format!("{} coefficients", s.compared))
}

fn chromatic() -> Outcome {
    let k = build(&c(&[1, 1, 1]));
    ensure!(
        k.f_vector().counts == [1, 12, 24, 13],
        "f-vector {:?}",
        k.f_vector().counts
    );
    ensure!(k.f_vector().euler() == 1, "euler {}", k.f_vector().euler());
    let mut n = 0;
    for len in 1..=4 {
        for mask in 0u32..(1 << len) {
            let values: Vec<u32> = (0..len).map(|i| mask >> i & 1).collect();
            let r = c(&values);
            ensure!(
                chromatic_check(&r).map_err(|e| e.to_string())?,
                "{r} is not the chromatic complex"
            );
            n += 1;
        }
    }
    Ok(format!("{n} binary counters"))
}

fn structural() -> Outcome {
    let corpus = structural_corpus();
    for r in &corpus {
        let k = build(r);
        let s = structural_checks(&k);
        ensure!(s.all(), "{r}: {:?}", s.counterexample);
        let oracle = simplices_by_definition(r);
        ensure!(
            k.simplices().iter().cloned().collect::<BTreeSet<_>>() == oracle,
            "{r}: simplex set differs"
        );
    }
    Ok(format!("{} counters", corpus.len()))
}

fn random_table(rng: &mut StdRng) -> WitnessTable {
    let procs = rng.gen_range(1..=6u32);
    let rows = rng.gen_range(0..=5usize);
    let mut traces = BTreeMap::new();
    for p in 0..procs {
        if rng.gen_bool(0.2) {
            continue;
        }
        let mut tr: BTreeSet<usize> = (1..=rows).filter(|_| rng.gen_bool(0.4)).collect();
        tr.insert(0);
        traces.insert(p as ProcessId, (rng.gen_bool(0.35), tr));
    }
    if traces.is_empty() {
        traces.insert(0, (false, BTreeSet::from([0])));
    }
    WitnessTable::from_pairs(common::table_from_traces(&traces)).unwrap()
}

/// Every calculus law on one table, for all admissible `S` and `T`.
fn laws(sigma: &WitnessTable) -> Result<usize, String> {
    let err = |what: &str| format!("{what} fails on {sigma:?}");
    let e = |x: snapcx::Error| x.to_string();
    let mut checked = 0;
    let tf = to_trace(sigma);
    ensure!(
        from_trace(&tf).map_err(e)? == *sigma,
        "{}",
        err("trace round trip")
    );
    ensure!(
        to_trace(&from_trace(&tf).map_err(e)?) == tf,
        "{}",
        err("trace form round trip")
    );
    let stable = sigma.class() >= Class::Stable;
    if stable {
        let cf = canonical_form(sigma).map_err(e)?;
        ensure!(
            canonical_form(&cf).map_err(e)? == cf,
            "{}",
            err("canonical form idempotence")
        );
    }
    let a = sigma.active();
    for s in a.subsets() {
        let st = stabilize(sigma, &s).map_err(e)?;
        for t in a.difference(&s).subsets() {
            let twice = stabilize(&st, &t).map_err(e)?;
            ensure!(
                twice == stabilize(sigma, &s.union(&t)).map_err(e)?,
                "{}",
                err("stabilization composition")
            );
            checked += 1;
        }
        if stable {
            let lhs =
                canonical_form(&stabilize(&canonical_form(sigma).map_err(e)?, &s).map_err(e)?)
                    .map_err(e)?;
            ensure!(
                lhs == canonical_form(&st).map_err(e)?,
                "{}",
                err("canonical form before stabilization")
            );
        }
        let keep = a.difference(&s);
        if let Some(q) = (0..=sigma.t())
            .rev()
            .find(|&i| !sigma.r(i).is_disjoint(&keep))
        {
            ensure!(st.t() == q, "{}", err("stabilization length"));
            let ghosting = s.union(&sigma.ghosts());
            for i in 0..=q {
                let later = (i + 1..=q).fold(ProcSet::new(), |acc, k| acc.union(&sigma.r(k)));
                let j = sigma.w(i).difference(&later).intersection(&ghosting);
                ensure!(
                    st.w(i) == &sigma.w(i).difference(&j) && st.g(i) == &sigma.g(i).union(&j),
                    "{}",
                    err("stabilized row form")
                );
            }
        }
        if sigma.is_witness() {
            let g = ghost(sigma, &s).map_err(e)?;
            for t in a.difference(&s).subsets() {
                ensure!(
                    ghost(&g, &t).map_err(e)? == ghost(sigma, &s.union(&t)).map_err(e)?,
                    "{}",
                    err("ghosting composition")
                );
            }
            if s.len() == 1 {
                let p = s.first().unwrap();
                let last_is_p = sigma.t() >= 1 && sigma.w(sigma.t()) == &s;
                for x in sigma.supp().iter() {
                    let (before, after) = (sigma.multiplicity(x), g.multiplicity(x));
                    let ok = if !last_is_p {
                        after == before
                    } else if x == p {
                        after < before
                    } else if a.contains(x) {
                        after == before
                    } else {
                        after <= before
                    };
                    ensure!(ok, "{}", err("trace cardinality under single ghosting"));
                }
            }
        }
    }
    Ok(checked)
}

fn calculus() -> Outcome {
    let mut tables = 0;
    let mut checks = 0;
    for supp in ProcSet::from([0, 1, 2]).nonempty_subsets() {
        for sigma in tables_on(&supp, 3) {
            checks += laws(&sigma)?;
            tables += 1;
        }
    }
    let mut rng = StdRng::seed_from_u64(0x5eed_ca1c);
    for _ in 0..10_000 {
        checks += laws(&random_table(&mut rng))?;
    }
    Ok(format!(
        "{tables} exhaustive tables and 10000 random ones, {checks} composition cases"
    ))
}

fn goldens() -> Outcome {
    let stable = t(&[
        (&[1, 2, 3, 4], &[5]),
        (&[], &[4]),
        (&[2], &[]),
        (&[], &[2]),
        (&[1], &[3]),
    ]);
    let got = canonical_form(&stable).map_err(|e| e.to_string())?;
    let want = t(&[(&[1, 2, 3, 4], &[5]), (&[2], &[4]), (&[1], &[2, 3])]);
    ensure!(
        got == want && got.to_string() == want.to_string(),
        "canonical form gives {got}"
    );

    let pre = t(&[
        (&[1, 2, 3, 4, 5], &[]),
        (&[1], &[]),
        (&[3, 4, 5], &[]),
        (&[2, 3], &[]),
        (&[1], &[3]),
        (&[1], &[2]),
        (&[], &[1]),
    ]);
    let got = stabilize(&pre, &ProcSet::new()).map_err(|e| e.to_string())?;
    let want = t(&[(&[1, 3, 4, 5], &[2]), (&[], &[1]), (&[4, 5], &[3])]);
    ensure!(
        got == want && got.to_string() == want.to_string(),
        "stabilization gives {got}"
    );

    let w = t(&[
        (&[1, 2, 3, 4], &[]),
        (&[1, 2], &[]),
        (&[3], &[4]),
        (&[3], &[1]),
    ]);
    let got = ghost(&w, &ProcSet::singleton(3)).map_err(|e| e.to_string())?;
    let want = t(&[(&[1, 2], &[3, 4]), (&[2], &[1])]);
    ensure!(
        got == want && got.to_string() == want.to_string(),
        "ghosting gives {got}"
    );
    ensure!(
        from_trace(&to_trace(&w)).unwrap() == w,
        "ghosting input does not round trip"
    );
    Ok("3 tables".into())
}

fn stratification() -> Outcome {
    let corpus = counters(3, 4);
    let mut cache = ComplexCache::new();
    let mut reports = 0;
    for r in &corpus {
        let mut all = vec![verify_all_strata(r, &mut cache).map_err(|e| e.to_string())?];
        all.extend(verify_incidence(r, &mut cache));
        all.extend(verify_diagrams(r, &mut cache).map_err(|e| e.to_string())?);
        all.extend(strata_partition(&cache.get(r)).map_err(|e| e.to_string())?);
        for rep in &all {
            ensure!(
                rep.ok,
                "{r}: {} {} {:?}",
                rep.check,
                rep.params,
                rep.counterexample
            );
        }
        reports += all.len();
    }
    Ok(format!("{} counters, {reports} reports", corpus.len()))
}

fn collapsibility() -> Outcome {
    let mut corpus = counters(3, 4);
    corpus.push(c(&[1, 1, 1]));
    let mut greedy = 0;
    for r in &corpus {
        let k = build(r);
        let seq = collapse_to_point(r).map_err(|e| format!("{r}: {e}"))?;
        let v = validate_collapse(&k, &seq);
        ensure!(v.ok, "{r}: step {:?} {:?}", v.first_illegal, v.reason);
        ensure!(is_point(&seq), "{r}: {} simplices left", seq.residual.len());
        ensure!(
            seq.steps.len() == (k.len() - 2) / 2,
            "{r}: {} steps for {} simplices",
            seq.steps.len(),
            k.len()
        );
        greedy += seq.greedy;
    }
    let n = collapse_to_point(&c(&[1, 1])).unwrap().steps.len();
    ensure!(n == 3, "P(1,1) takes {n} steps");
    Ok(format!(
        "{} counters, {greedy} steps found outside the plan",
        corpus.len()
    ))
}

fn homology() -> Outcome {
    let corpus = structural_corpus();
    for r in &corpus {
        let h = homology_gf2(&build(r));
        ensure!(
            h.is_acyclic_point() && h.euler == 1,
            "{r}: betti {:?} euler {}",
            h.betti,
            h.euler
        );
    }
    Ok(format!("{} counters", corpus.len()))
}

fn one_dimensional() -> Outcome {
    for m in 0..=4 {
        for n in 0..=4 {
            let p = path_profile(&build(&c(&[m, n]))).map_err(|e| e.to_string())?;
            ensure!(p.ok, "P({m},{n}): endpoints {:?}", p.endpoints);
            ensure!(
                p.edges as u64 == f_dim1(m as usize, n as usize).unwrap(),
                "P({m},{n}) has {} edges",
                p.edges
            );
        }
    }
    let mut cones = 0;
    for r in structural_corpus() {
        for z in r.pass().iter() {
            ensure!(
                cone_check(&r, z).map_err(|e| e.to_string())?,
                "{r}: not a cone over process {z}"
            );
            cones += 1;
        }
    }
    Ok(format!("25 paths, {cones} cones"))
}

fn main() {
    let criteria: [Criterion; 11] = [
        ("two-process counts", counting),
        ("top simplex counts", top_counts),
        ("generating function", generating_function),
        ("chromatic subdivision", chromatic),
        ("structural suite", structural),
        ("calculus laws", calculus),
        ("worked tables", goldens),
        ("stratification", stratification),
        ("collapsibility", collapsibility),
        ("homology", homology),
        ("one-dimensional structure", one_dimensional),
    ];
    let start = Instant::now();
    let mut failed = 0;
    for (n, (name, f)) in criteria.iter().enumerate() {
        let t0 = Instant::now();
        let outcome = catch_unwind(f).unwrap_or_else(|_| Err("panicked".into()));
        let secs = t0.elapsed().as_secs_f64();
        match outcome {
            Ok(detail) => println!("criterion {:>2} PASS  {name}: {detail} ({secs:.2}s)", n + 1),
            Err(why) => {
                failed += 1;
                println!("criterion {:>2} FAIL  {name}: {why} ({secs:.2}s)", n + 1);
            }
        }
    }
    println!(
        "acceptance: {} of 11 passed in {:.2}s",
        11 - failed,
        start.elapsed().as_secs_f64()
    );
    if failed > 0 {
        std::process::exit(1);
    }
}
