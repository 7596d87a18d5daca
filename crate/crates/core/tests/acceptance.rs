//! Acceptance suite. Prints one `[PASS]`/`[FAIL]` line per criterion; run
//! with `cargo test -p allen-metric --test acceptance -- --nocapture`.

mod common;

use std::panic::{catch_unwind, AssertUnwindSafe};
use std::time::{Duration, Instant};

use allen_metric::catalog::{algebra, AlgebraId};
use allen_metric::closure::{close, verify_closed, verify_maximality, MaximalityOptions};
use allen_metric::composition::CompositionTable;
use allen_metric::dlr::{entails_equality, horn_dlr_sat, lp_feasible, value_of, HornDlr, HornOutcome, LinearOp};
use allen_metric::dlr::{LinearPolynomial, LinearRelation, Var};
use allen_metric::instance::{IntervalId, MIsatInstance, Mode};
use allen_metric::oracle::{
    brute_force_isat, brute_force_points, derive_composition_table, end_relation_by_enumeration,
    start_relation_by_enumeration,
};
use allen_metric::point_algebra::pa_sat;
use allen_metric::relation::{BasicRelation, IntervalRelation, PointRelation};
use allen_metric::solver::{check_model, decide, explicit_points, solve, solve_with, Backend, SolveOptions, Verdict};
use allen_metric::Rational;
use common::*;
use rand::seq::IndexedRandom;
use rand::Rng;
use rayon::prelude::*;

const CATALOG_BUDGET: Duration = Duration::from_secs(1);
const CLOSURE_BUDGET: Duration = Duration::from_secs(30);
const TABLE_BUDGET: Duration = Duration::from_secs(5);
const BASICS_BUDGET: Duration = Duration::from_secs(60);
const MAXIMALITY_BUDGET: Duration = Duration::from_secs(300);
const EQUIVALENCE_BUDGET: Duration = Duration::from_secs(600);
const CONVEX_BUDGET: Duration = Duration::from_secs(120);

const MAXIMALITY_SAMPLE: usize = 200;
const MAXIMALITY_SEED: u64 = 0x5eed;
const INSTANCES_PER_ALGEBRA: u64 = 5_000;
/// Every this many equivalence instances are also run on the Horn backend.
const HORN_CROSS_CHECK_EVERY: u64 = 10;
const EXTRA_WITNESS_INSTANCES: u64 = 10_000;
const CONVEX_SYSTEMS: usize = 1_000;
const EXPLICITATION_INSTANCES: u64 = 1_000;
const PA_CASES: u64 = 10_000;
const CONVEXITY_SYSTEMS: usize = 100;
const THETAS: usize = 1_000;
const FAST_PATH_SIZES: [usize; 3] = [100, 1_000, 10_000];
const FAST_PATH_MAX_SLOPE: f64 = 2.3;

struct Outcome {
    id: u8,
    title: &'static str,
    pass: bool,
    gating: bool,
    detail: String,
}

fn criterion(
    id: u8,
    title: &'static str,
    budget: Option<Duration>,
    gating: bool,
    body: impl FnOnce() -> Result<String, String>,
) -> Outcome {
    let t0 = Instant::now();
    let result = catch_unwind(AssertUnwindSafe(body)).unwrap_or_else(|e| {
        let msg = e
            .downcast_ref::<String>()
            .cloned()
            .or_else(|| e.downcast_ref::<&str>().map(|s| s.to_string()))
            .unwrap_or_default();
        Err(format!("panicked: {msg}"))
    });
    let elapsed = t0.elapsed();
    let (mut pass, mut detail) = match result {
        Ok(d) => (true, d),
        Err(d) => (false, d),
    };
    if let Some(budget) = budget {
        if elapsed > budget {
            pass = false;
            detail.push_str(&format!("; over budget of {budget:?}"));
        }
    }
    detail.push_str(&format!(" ({:.2} s)", elapsed.as_secs_f64()));
    let tag = match (pass, gating) {
        (true, _) => "PASS",
        (false, true) => "FAIL",
        (false, false) => "FAIL (informational)",
    };
    println!("[{tag}] {id:>2} {title}: {detail}");
    Outcome {
        id,
        title,
        pass,
        gating,
        detail,
    }
}

fn check(ok: bool, detail: String) -> Result<String, String> {
    if ok {
        Ok(detail)
    } else {
        Err(detail)
    }
}

fn catalog_cardinalities() -> Result<String, String> {
    let sizes: Vec<String> = AlgebraId::ALL
        .iter()
        .map(|&id| allen_metric::catalog::generate(id).len().to_string())
        .collect();
    let ok = AlgebraId::ALL
        .iter()
        .zip(&sizes)
        .all(|(id, s)| *s == id.expected_size().to_string());
    check(ok, format!("sizes {}", sizes.join("/")))
}

fn catalog_closure() -> Result<String, String> {
    let mut bad = Vec::new();
    for id in AlgebraId::ALL {
        if let Err(v) = verify_closed(algebra(id).as_set()) {
            bad.push(format!("{id}: {v}"));
        }
    }
    check(bad.is_empty(), if bad.is_empty() { "all 8 closed".into() } else { bad.join("; ") })
}

fn table_ground_truth() -> Result<String, String> {
    let derived = derive_composition_table();
    let standard = CompositionTable::standard();
    let mut entries = 0;
    for a in BasicRelation::ALL {
        for b in BasicRelation::ALL {
            entries += usize::from(derived.entry(a, b) == standard.entry(a, b));
        }
    }
    let mut projections = 0;
    for b in BasicRelation::ALL {
        projections += usize::from(start_relation_by_enumeration(b) == b.start_relation());
        projections += usize::from(end_relation_by_enumeration(b) == b.end_relation());
    }
    check(
        entries == 169 && projections == 26,
        format!("{entries}/169 table entries, {projections}/26 projections"),
    )
}

fn meets_generates_basics() -> Result<String, String> {
    let report = close(&["{m}".parse().expect("valid")]);
    let found = BasicRelation::ALL
        .iter()
        .filter(|&&b| report.closed_set.contains(IntervalRelation::basic(b)))
        .count();
    check(found == 13, format!("{found}/13 basics in a closure of size {}", report.closed_set.len()))
}

fn maximality_sample() -> Result<String, String> {
    let mut parts = Vec::new();
    let mut ok = true;
    for id in AlgebraId::ALL {
        let report = verify_maximality(id, MaximalityOptions::sample(MAXIMALITY_SAMPLE, MAXIMALITY_SEED));
        let witnessed = report.extensions.iter().filter(|e| e.witness.is_some() && e.early_exit).count();
        ok &= report.extensions.len() == MAXIMALITY_SAMPLE && witnessed == MAXIMALITY_SAMPLE;
        parts.push(format!("{id} {witnessed}/{}", report.extensions.len()));
    }
    check(ok, parts.join(", "))
}

/// The instance drawn for `seed` in the equivalence corpus of `id`.
fn equivalence_instance(id: AlgebraId, seed: u64) -> MIsatInstance {
    let index = AlgebraId::ALL.iter().position(|&a| a == id).expect("listed") as u64;
    let mut r = rng(index << 32 | seed);
    point_instance(&mut r, id, 4, 6, 3)
}

fn solver_vs_oracle() -> Result<String, String> {
    let mut parts = Vec::new();
    let mut failures = Vec::new();
    for id in AlgebraId::ALL {
        let results: Vec<(bool, Result<(), String>)> = (0..INSTANCES_PER_ALGEBRA)
            .into_par_iter()
            .map(|seed| {
                let inst = equivalence_instance(id, seed);
                let oracle = brute_force_isat(&inst).map_err(|e| e.to_string())?.is_sat();
                let ours = decide(&inst).map_err(|e| e.to_string())?.verdict.is_sat();
                if ours != oracle {
                    return Err(format!("{id} seed {seed}: solver {ours}, oracle {oracle}"));
                }
                if seed % HORN_CROSS_CHECK_EVERY == 0 {
                    let options = SolveOptions {
                        backend: Backend::HornDlr,
                        build_model: false,
                    };
                    let horn = solve_with(&inst, options).map_err(|e| e.to_string())?.verdict.is_sat();
                    if horn != oracle {
                        return Err(format!("{id} seed {seed}: Horn backend {horn}, oracle {oracle}"));
                    }
                }
                Ok(oracle)
            })
            .map(|r| match r {
                Ok(sat) => (sat, Ok(())),
                Err(e) => (false, Err(e)),
            })
            .collect();
        let sat = results.iter().filter(|r| r.0).count();
        failures.extend(results.into_iter().filter_map(|r| r.1.err()));
        parts.push(format!("{id} {sat} sat"));
    }
    let total = INSTANCES_PER_ALGEBRA * 8;
    let head = format!("{} disagreements in {total}; {}", failures.len(), parts.join(", "));
    match failures.first() {
        None => Ok(head),
        Some(first) => Err(format!("{head}; first: {first}")),
    }
}

fn verify_sat(inst: &MIsatInstance) -> Result<bool, String> {
    let report = solve(inst).map_err(|e| e.to_string())?;
    match report.verdict {
        Verdict::Sat(m) => check_model(inst, &m).map(|_| true).map_err(|v| v.to_string()),
        Verdict::Accepted => Err("no model despite build_model".into()),
        Verdict::Unsat(_) => Ok(false),
    }
}

/// A start- or end-mode instance with general Horn DLRs over mode-side
/// endpoints.
fn metric_instance(seed: u64) -> MIsatInstance {
    let mut r = rng(0x7000_0000 | seed);
    let id = *AlgebraId::ALL.choose(&mut r).expect("nonempty");
    let mut inst = point_instance(&mut r, id, 6, 8, 2);
    let side = id.family().side();
    let vars: Vec<Var> = inst.intervals().map(|i| i.endpoint(side)).collect();
    for _ in 0..r.random_range(1..=4) {
        inst.constrain(horn_dlr(&mut r, &vars).into_dlr());
    }
    inst
}

fn witness_soundness() -> Result<String, String> {
    let corpus = AlgebraId::ALL
        .into_par_iter()
        .flat_map(|id| (0..INSTANCES_PER_ALGEBRA).into_par_iter().map(move |s| equivalence_instance(id, s)));
    let extra = (0..EXTRA_WITNESS_INSTANCES).into_par_iter().map(metric_instance);
    let results: Vec<Result<bool, String>> = corpus.chain(extra).map(|inst| verify_sat(&inst)).collect();
    let sat = results.iter().filter(|r| matches!(r, Ok(true))).count();
    let failures: Vec<&String> = results.iter().filter_map(|r| r.as_ref().err()).collect();
    let head = format!("{} failures; {sat} models checked out of {}", failures.len(), results.len());
    match failures.first() {
        None => Ok(head),
        Some(first) => Err(format!("{head}; first: {first}")),
    }
}

fn disequalities_join_convex_systems() -> Result<String, String> {
    let mut r = rng(0x8000);
    let mut systems = 0;
    let mut added = 0;
    while systems < CONVEX_SYSTEMS {
        let vars = free_vars(r.random_range(2..=6));
        let h: Vec<LinearRelation> = (0..r.random_range(1..=8)).map(|_| convex_relation(&mut r, &vars)).collect();
        if !lp_feasible(&h).map_err(|e| e.to_string())?.is_feasible() {
            continue;
        }
        systems += 1;
        let mut clauses: Vec<HornDlr> = h.iter().cloned().map(HornDlr::from).collect();
        for (i, &x) in vars.iter().enumerate() {
            for &y in &vars[i + 1..] {
                let (px, py) = (LinearPolynomial::var(x), LinearPolynomial::var(y));
                if !entails_equality(&h, &px, &py).map_err(|e| e.to_string())? {
                    clauses.push(HornDlr::from(LinearRelation::vars(x, LinearOp::Ne, y)));
                    added += 1;
                }
            }
        }
        if !horn_dlr_sat(&clauses).map_err(|e| e.to_string())?.is_sat() {
            return Err(format!("system #{systems} becomes unsatisfiable: {h:?}"));
        }
    }
    Ok(format!("{systems} systems stay satisfiable with {added} disequalities added"))
}

fn explicitation_preserves_satisfiability() -> Result<String, String> {
    let mut sat = 0;
    for seed in 0..EXPLICITATION_INSTANCES {
        let mut r = rng(0x9000_0000 | seed);
        let id = *AlgebraId::ALL.choose(&mut r).expect("nonempty");
        let inst = point_instance(&mut r, id, 5, 8, 3);
        let before = brute_force_isat(&inst).map_err(|e| e.to_string())?.is_sat();
        let after = brute_force_isat(&explicit_points(&inst)).map_err(|e| e.to_string())?.is_sat();
        if before != after {
            return Err(format!("seed {seed}: {before} before, {after} after"));
        }
        sat += usize::from(before);
    }
    Ok(format!("{EXPLICITATION_INSTANCES} instances unchanged ({sat} sat)"))
}

fn pa_sat_agreement() -> Result<String, String> {
    let mut sat = 0;
    for seed in 0..PA_CASES {
        let mut r = rng(0xa000_0000 | seed);
        let vars = r.random_range(1..=4);
        let cs = point_system(&mut r, vars, 6);
        let ours = pa_sat(&cs);
        let bottom = cs.iter().any(|c| c.rel == PointRelation::NONE);
        let brute = !bottom && brute_force_points(&cs).is_some();
        let horn: Vec<HornDlr> = cs.iter().map(|c| c.to_horn()).collect();
        let horn = horn_dlr_sat(&horn).map_err(|e| e.to_string())?.is_sat();
        if ours.is_sat() != brute || brute != horn {
            return Err(format!("seed {seed}: pa_sat {}, brute force {brute}, Horn {horn}", ours.is_sat()));
        }
        sat += usize::from(brute);
    }
    Ok(format!("{PA_CASES} systems agree ({sat} sat)"))
}

fn almost_convexity() -> Result<String, String> {
    let mut r = rng(0xb000);
    let mut systems = 0;
    let mut combinations = 0;
    while systems < CONVEXITY_SYSTEMS {
        let vars = free_vars(r.random_range(2..=5));
        let h: Vec<HornDlr> = (0..r.random_range(3..=8)).map(|_| horn_dlr(&mut r, &vars)).collect();
        let HornOutcome::Sat(w1) = horn_dlr_sat(&h).map_err(|e| e.to_string())? else {
            continue;
        };
        // Look for a second solution by pushing one coordinate away.
        let mut w2 = None;
        for _ in 0..8 {
            let x = *vars.choose(&mut r).expect("nonempty");
            let shift = Rational::from_integer(r.random_range(1..=3).into());
            let target = if r.random_bool(0.5) { value_of(&w1, x) + shift } else { value_of(&w1, x) - shift };
            let op = if target > value_of(&w1, x) { LinearOp::Ge } else { LinearOp::Le };
            let mut more = h.clone();
            more.push(HornDlr::from(LinearRelation::new(LinearPolynomial::var(x), op, LinearPolynomial::constant(target))));
            if let HornOutcome::Sat(w) = horn_dlr_sat(&more).map_err(|e| e.to_string())? {
                w2 = Some(w);
                break;
            }
        }
        let Some(w2) = w2 else { continue };
        systems += 1;
        for _ in 0..THETAS {
            let t = theta(&mut r);
            let one_minus = Rational::from_integer(1.into()) - &t;
            let point = |v: Var| &t * value_of(&w1, v) + &one_minus * value_of(&w2, v);
            if let Some(bad) = h.iter().find(|c| !c.holds(point)) {
                return Err(format!("system #{systems}: θ = {t} violates {bad}"));
            }
            combinations += 1;
        }
    }
    Ok(format!("{combinations} convex combinations over {systems} systems all satisfy their system"))
}

/// A satisfiable pure point-algebra instance with `edges` edges labelled
/// from S(pi), built around a hidden model.
fn fast_path_instance(edges: usize) -> MIsatInstance {
    let mut r = rng(0xc000 | edges as u64);
    let n = (edges / 4).max(2);
    let hidden: Vec<(i64, i64)> = (0..n)
        .map(|_| {
            let s = r.random_range(0..(4 * n as i64));
            (s, s + r.random_range(1..=4 * n as i64))
        })
        .collect();
    let members = &algebra(AlgebraId::SAfter).members;
    let mut by_basic: Vec<Vec<IntervalRelation>> = vec![Vec::new(); 13];
    for &m in members {
        for b in m.basics() {
            by_basic[b.index()].push(m);
        }
    }
    let mut inst = MIsatInstance::with_intervals(Mode::Start, n);
    for _ in 0..edges {
        let (u, v) = (r.random_range(0..n), r.random_range(0..n));
        let (a, b) = (hidden[u], hidden[v]);
        let basic = BasicRelation::between(&a.0, &a.1, &b.0, &b.1).expect("proper");
        let label = *by_basic[basic.index()].choose(&mut r).expect("algebra contains every basic");
        inst.relate(IntervalId(u as u32), label, IntervalId(v as u32));
    }
    inst
}

fn fast_path_scaling() -> Result<String, String> {
    let mut points = Vec::new();
    for &e in &FAST_PATH_SIZES {
        let inst = fast_path_instance(e);
        let mut best = f64::INFINITY;
        for _ in 0..3 {
            let t0 = Instant::now();
            let report = solve(&inst).map_err(|e| e.to_string())?;
            best = best.min(t0.elapsed().as_secs_f64());
            if report.backend != Backend::PointAlgebra || !report.verdict.is_sat() {
                return Err(format!("|E| = {e}: expected a point-algebra SAT verdict"));
            }
        }
        points.push(((e as f64).log10(), best.max(1e-9).log10(), best));
    }
    let k = points.len() as f64;
    let (mx, my) = (points.iter().map(|p| p.0).sum::<f64>() / k, points.iter().map(|p| p.1).sum::<f64>() / k);
    let num: f64 = points.iter().map(|p| (p.0 - mx) * (p.1 - my)).sum();
    let den: f64 = points.iter().map(|p| (p.0 - mx).powi(2)).sum();
    let slope = num / den;
    let times: Vec<String> = FAST_PATH_SIZES
        .iter()
        .zip(&points)
        .map(|(e, p)| format!("|E|={e} {:.4} s", p.2))
        .collect();
    check(slope <= FAST_PATH_MAX_SLOPE, format!("slope {slope:.2}; {}", times.join(", ")))
}

#[test]
fn acceptance() {
    let outcomes = [
        criterion(1, "catalog cardinalities", Some(CATALOG_BUDGET), true, catalog_cardinalities),
        criterion(2, "catalog closure", Some(CLOSURE_BUDGET), true, catalog_closure),
        criterion(3, "composition table ground truth", Some(TABLE_BUDGET), true, table_ground_truth),
        criterion(4, "closure of {m} contains every basic", Some(BASICS_BUDGET), true, meets_generates_basics),
        criterion(5, "maximality (sample mode)", Some(MAXIMALITY_BUDGET), true, maximality_sample),
        criterion(6, "solver vs oracle", Some(EQUIVALENCE_BUDGET), true, solver_vs_oracle),
        criterion(7, "witness soundness", None, true, witness_soundness),
        criterion(8, "disequalities join convex systems", Some(CONVEX_BUDGET), true, disequalities_join_convex_systems),
        criterion(9, "explicitation preserves satisfiability", None, true, explicitation_preserves_satisfiability),
        criterion(10, "point-algebra satisfiability", None, true, pa_sat_agreement),
        criterion(11, "almost-convexity sampling", None, true, almost_convexity),
        criterion(12, "point-algebra fast path scaling", None, false, fast_path_scaling),
    ];
    let failed: Vec<String> = outcomes
        .iter()
        .filter(|o| o.gating && !o.pass)
        .map(|o| format!("{} {}: {}", o.id, o.title, o.detail))
        .collect();
    assert!(failed.is_empty(), "failed criteria:\n{}", failed.join("\n"));
}

/// Full maximality: every relation outside each algebra. Release gate, not
/// run by default.
#[test]
#[ignore]
fn maximality_full() {
    for id in AlgebraId::ALL {
        let t0 = Instant::now();
        let report = verify_maximality(id, MaximalityOptions::full());
        let missing = report.counterexamples().count();
        println!(
            "{id}: {} extensions, {missing} without witness ({:.1} s)",
            report.extensions.len(),
            t0.elapsed().as_secs_f64()
        );
        assert_eq!(missing, 0, "{id}");
        assert_eq!(report.extensions.len(), report.candidates);
    }
}
