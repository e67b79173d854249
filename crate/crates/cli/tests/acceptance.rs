//! Acceptance suite: one PASS/FAIL line per criterion, non-zero exit if any
//! criterion fails. Runs as a plain binary (`harness = false`).

#[path = "../../core/tests/common/mod.rs"]
mod common;

use std::fs;
use std::process::Command;
use std::time::Instant;

use common::*;
use pvc_core::bench::gap_row;
use pvc_core::exact::exact_solve;
use pvc_core::instance::{reduce_set_cover, serialize_set_cover, Instance, SetCoverInstance};
use pvc_core::lp::{lp_solve, LinearProgram, LpStatus};
use pvc_core::pvclp::{separate, solve_lp1, solve_pvclp, FractionalSolution, SolveMode};
use pvc_core::rounding::{
    beta_sums, estimate_round_success, expected_round_cost, rounds_for, sample_round_cost,
    solve_rounded, RoundingConfig, SCALE,
};
use rand::Rng;

struct Verdict {
    pass: bool,
    detail: String,
}

fn verdict(pass: bool, detail: impl Into<String>) -> Verdict {
    Verdict {
        pass,
        detail: detail.into(),
    }
}

fn approx(a: f64, b: f64, tol: f64) -> bool {
    (a - b).abs() <= tol
}

fn clean_relaxation(inst: &Instance) -> FractionalSolution {
    let sol = solve_pvclp(inst, SolveMode::Direct).expect("relaxation solves");
    assert!(separate(inst, &sol.x, None).is_clean());
    sol
}

/// Same graph and groups with targets redrawn in `[1, max(1, W_i / 3)]`,
/// which leaves room for clean points below the threshold.
fn low_targets(inst: &Instance, seed: u64) -> Instance {
    let mut r = rng(seed ^ 0x10_7a);
    let groups = (0..inst.num_groups())
        .map(|i| {
            let hi = (inst.group_weight(i) / 3).max(1);
            (inst.group(i).edges.clone(), r.gen_range(1..=hi))
        })
        .collect();
    Instance::new(inst.costs().to_vec(), inst.edges().to_vec(), groups, false)
        .expect("lower targets keep the instance valid")
}

/// A clean point with every coordinate below the threshold, so no vertex is
/// picked deterministically: a random direction scaled by bisection until the
/// empty-set rows hold. `None` when even the cap everywhere is not enough.
fn spread_clean_point(inst: &Instance, seed: u64) -> Option<Vec<f64>> {
    let cap = pvc_core::pvclp::THRESHOLD - 1e-6;
    let mut r = rng(seed ^ 0xa11c);
    let dir: Vec<f64> = (0..inst.num_vertices())
        .map(|_| r.gen_range(0.05..1.0))
        .collect();
    let point = |lambda: f64| {
        dir.iter()
            .map(|&d| (lambda * d).min(cap))
            .collect::<Vec<_>>()
    };
    let clean = |x: &[f64]| separate(inst, x, None).is_clean();
    let (mut lo, mut hi) = (0.0, 1.0 / 0.05);
    if !clean(&point(hi)) {
        return None;
    }
    for _ in 0..60 {
        let mid = 0.5 * (lo + hi);
        if clean(&point(mid)) {
            hi = mid;
        } else {
            lo = mid;
        }
    }
    Some(point(hi))
}

fn star_gap() -> Verdict {
    let mut bad = Vec::new();
    for d in [2usize, 5, 20, 100] {
        let row = gap_row(d).expect("gap row");
        let ok =
            approx(row.lp1, 1.0 / d as f64, 1e-6) && approx(row.pvclp, 1.0, 1e-6) && row.exact == 1;
        if !ok {
            bad.push(format!(
                "D={d}: lp1={} pvclp={} exact={}",
                row.lp1, row.pvclp, row.exact
            ));
        }
    }
    verdict(
        bad.is_empty(),
        if bad.is_empty() {
            "D in {2,5,20,100}: (1/D, 1, 1)".into()
        } else {
            bad.join("; ")
        },
    )
}

fn single_round_bound(variant: Variant) -> (Verdict, Verdict) {
    const INSTANCES: u64 = 24;
    const TRIALS: u64 = 20_000;
    let (mut failures, mut worst_margin) = (Vec::new(), f64::INFINITY);
    let (mut ineq_checked, mut ineq_bad, mut ineq_min) = (0, 0, f64::INFINITY);
    let (mut groups, mut uncertain) = (0, 0);
    let (mut points, mut spread_points) = (0, 0);
    let mut instances = 0;
    for seed in 0..INSTANCES {
        let base = random_instance(200 + seed, (5, 20), (1, 5), variant);
        for inst in [low_targets(&base, seed), base] {
            instances += 1;
            let mut xs = Vec::new();
            for mode in [SolveMode::Direct, SolveMode::DeltaSearch] {
                xs.push(solve_pvclp(&inst, mode).expect("relaxation solves").x);
            }
            if let Some(x) = spread_clean_point(&inst, seed) {
                spread_points += 1;
                xs.push(x);
            }
            for (k, x) in xs.into_iter().enumerate() {
                points += 1;
                assert!(separate(&inst, &x, None).is_clean());
                let est = estimate_round_success(&inst, &x, TRIALS, seed);
                for i in 0..inst.num_groups() {
                    groups += 1;
                    uncertain += (est.successes[i] < TRIALS) as u32;
                    let margin = est.frequency[i] - (5.0 / 8.0 - est.radius[i]);
                    worst_margin = worst_margin.min(margin);
                    if margin < 0.0 {
                        failures.push(format!(
                            "seed {seed} point {k} group {i} freq {:.4}",
                            est.frequency[i]
                        ));
                    }
                }
                for v in beta_sums(&inst, &x).into_iter().flatten() {
                    ineq_checked += 1;
                    ineq_min = f64::min(ineq_min, v);
                    if v < 1.0 - 1e-6 {
                        ineq_bad += 1;
                    }
                }
            }
        }
    }
    let c2 = verdict(
        failures.is_empty(),
        format!(
            "{instances} instances, {points} clean points ({spread_points} below threshold) x {TRIALS} trials, {groups} groups ({uncertain} not always met), min(freq - (5/8 - r99)) = {worst_margin:.4}{}",
            if failures.is_empty() { String::new() } else { format!("; failures: {}", failures.join(", ")) }
        ),
    );
    let c3 = verdict(
        ineq_bad == 0,
        format!("{ineq_checked} groups with positive residual, min beta-sum = {ineq_min:.6}, violations = {ineq_bad}"),
    );
    (c2, c3)
}

fn round_cost(variant: Variant) -> Verdict {
    const TRIALS: u64 = 50_000;
    let mut notes = Vec::new();
    let mut pass = true;
    for seed in 0..5 {
        let inst = random_instance(300 + seed, (5, 20), (1, 5), variant);
        let sol = clean_relaxation(&inst);
        let cfg = RoundingConfig::with_seed(seed);
        let closed = expected_round_cost(&inst, &sol.x, &cfg);
        let sample = sample_round_cost(&inst, &sol.x, TRIALS, seed);
        let z = if sample.std_err > 0.0 {
            (sample.mean - closed).abs() / sample.std_err
        } else {
            0.0
        };
        let matches = if sample.std_err > 0.0 {
            z <= 3.0
        } else {
            approx(sample.mean, closed, 1e-9)
        };
        let bounded = closed <= SCALE * sol.objective + 1e-9;
        pass &= matches && bounded;
        notes.push(format!(
            "z={z:.2} closed/obj={:.3}",
            closed / sol.objective.max(f64::MIN_POSITIVE)
        ));
    }
    verdict(
        pass,
        format!("5 instances x {TRIALS} trials: {}", notes.join(", ")),
    )
}

fn end_to_end(variant: Variant) -> Verdict {
    const SOLVES: u64 = 200;
    let (mut first_fail, mut bound_bad, mut worst) = (0, 0, 0.0f64);
    for seed in 0..SOLVES {
        let inst = random_instance(400 + seed, (6, 18), (1, 8), variant);
        let sol = clean_relaxation(&inst);
        let cfg = RoundingConfig {
            seed,
            rounds_constant: 4,
            ..Default::default()
        };
        let out = solve_rounded(&inst, &sol, &cfg).expect("rounding succeeds within restarts");
        assert!(out.selection.is_feasible(&inst));
        first_fail += !out.first_attempt_feasible() as u32;
        let rounds = rounds_for(inst.num_groups(), 4) as f64;
        let bound = SCALE * rounds * sol.objective;
        let cost = out.selection.cost as f64;
        worst = worst.max(cost / sol.objective);
        if cost > bound + 1e-9 {
            bound_bad += 1;
        }
    }
    let rate = first_fail as f64 / SOLVES as f64;
    verdict(
        rate < 0.05 && bound_bad == 0,
        format!(
            "{SOLVES} solves: first-attempt failure rate {:.1}%, cost bound violations {bound_bad}, max cost/obj {worst:.3}",
            rate * 100.0
        ),
    )
}

/// Returns the verdict plus every cutting-plane trace seen.
fn sandwich(variant: Variant) -> (Verdict, Vec<Vec<f64>>) {
    const INSTANCES: u64 = 50;
    let mut traces = Vec::new();
    let (mut lp1_bad, mut exact_bad, mut rounded_bad, mut max_ratio) = (0, 0, 0, 0.0f64);
    let mut witness = None;
    for seed in 0..INSTANCES {
        let inst = random_instance(500 + seed, (4, 16), (1, 4), variant);
        let lp1 = solve_lp1(&inst).unwrap().objective;
        let sol = clean_relaxation(&inst);
        let opt = exact_solve(&inst, 24).unwrap().optimum;
        let rounded = solve_rounded(&inst, &sol, &RoundingConfig::with_seed(seed))
            .unwrap()
            .selection
            .cost;
        if lp1 > sol.objective + 1e-6 {
            lp1_bad += 1;
            witness.get_or_insert(format!(
                "seed {seed}: lp1 {lp1:.4} > pvclp {:.4}",
                sol.objective
            ));
        }
        exact_bad += (sol.objective > opt as f64 + 1e-6) as u32;
        rounded_bad += (opt > rounded) as u32;
        max_ratio = max_ratio.max(rounded as f64 / opt.max(1) as f64);
        traces.push(sol.trace);
    }
    let v = verdict(
        lp1_bad + exact_bad + rounded_bad == 0,
        format!(
            "{INSTANCES} instances: LP1>PVC-LP in {lp1_bad}, PVC-LP>exact in {exact_bad}, exact>rounded in {rounded_bad}; max rounded/exact = {max_ratio:.3}{}",
            witness.map(|w| format!(" (first: {w})")).unwrap_or_default()
        ),
    );
    (v, traces)
}

fn set_cover_reduction() -> Verdict {
    let mut bad = 0;
    for seed in 0..20 {
        let mut r = rng(700 + seed);
        let universe = r.gen_range(1..=6);
        let m = r.gen_range(1..=6);
        let mut sets: Vec<Vec<usize>> = (0..m)
            .map(|_| (0..universe).filter(|_| r.gen_bool(0.4)).collect())
            .collect();
        for el in 0..universe {
            if !sets.iter().any(|s| s.contains(&el)) {
                let s = r.gen_range(0..m);
                sets[s].push(el);
                sets[s].sort_unstable();
            }
        }
        let costs = (0..m).map(|_| r.gen_range(1..=5)).collect();
        let sc = SetCoverInstance::new(universe, sets, costs).unwrap();
        let got = exact_solve(&reduce_set_cover(&sc), 24).unwrap().optimum;
        bad += (got != brute_force_set_cover(&sc)) as u32;
    }
    verdict(
        bad == 0,
        format!("20 set-cover instances, mismatches = {bad}"),
    )
}

fn lp_kernel(traces: &[Vec<f64>]) -> Verdict {
    let (mut mismatches, mut infeasible) = (0, 0);
    for seed in 0..100 {
        let mut r = rng(800 + seed);
        let vars = r.gen_range(1..=4);
        let rows = r.gen_range(1..=6);
        let (c, rows) = random_lp(800 + seed, vars, rows);
        let mut lp = LinearProgram::new(c.clone());
        for row in &rows {
            lp.add_row(row.clone()).unwrap();
        }
        let got = lp_solve(&lp).unwrap();
        match vertex_enumeration(&c, &rows) {
            None => {
                infeasible += 1;
                mismatches += (got.status != LpStatus::Infeasible) as u32;
            }
            Some((want, _)) => {
                mismatches += !(got.is_optimal() && approx(got.value, want, 1e-6)) as u32
            }
        }
    }
    let non_monotone = traces
        .iter()
        .filter(|t| {
            t.windows(2)
                .any(|w| w[1] < w[0] - 1e-7 * (1.0 + w[0].abs()))
        })
        .count();
    verdict(
        mismatches == 0 && non_monotone == 0,
        format!(
            "100 LPs ({infeasible} infeasible): mismatches = {mismatches}; {} traces, non-monotone = {non_monotone}",
            traces.len()
        ),
    )
}

fn determinism() -> Verdict {
    let dir = tempfile::tempdir().unwrap();
    let p = |name: &str| dir.path().join(name).to_string_lossy().into_owned();
    let pvc = env!("CARGO_BIN_EXE_pvc");
    let run = |args: &[&str]| {
        let out = Command::new(pvc).args(args).output().expect("spawn pvc");
        assert!(
            out.status.success(),
            "pvc {args:?} failed: {}",
            String::from_utf8_lossy(&out.stderr)
        );
        out.stdout
    };
    let sc = SetCoverInstance::new(
        4,
        vec![vec![0, 1], vec![1, 2], vec![2, 3], vec![0, 3]],
        vec![2, 1, 2, 1],
    )
    .unwrap();
    fs::write(p("sc.txt"), serialize_set_cover(&sc)).unwrap();
    fs::write(p("star.pvc"), run(&["generate", "star", "-d", "7"])).unwrap();
    fs::write(
        p("rand.pvc"),
        run(&[
            "generate",
            "random",
            "--n",
            "12",
            "--m",
            "20",
            "--r",
            "3",
            "--seed",
            "9",
            "--weight-max",
            "3",
        ]),
    )
    .unwrap();
    let (star, rnd, scp) = (p("star.pvc"), p("rand.pvc"), p("sc.txt"));
    let commands: Vec<Vec<&str>> = vec![
        vec!["generate", "star", "-d", "7"],
        vec![
            "generate",
            "random",
            "--n",
            "12",
            "--m",
            "20",
            "--r",
            "3",
            "--seed",
            "9",
            "--overlap",
            "0.3",
        ],
        vec!["generate", "setcover-reduce", &scp],
        vec!["solve", &star, "--seed", "5"],
        vec!["solve", &rnd, "--seed", "5", "--cut-log"],
        vec!["solve", &rnd, "--seed", "5", "--mode", "delta", "--prune"],
        vec!["exact", &rnd],
        vec!["greedy", &rnd],
        vec!["lp1", &rnd],
        vec!["verify", &rnd, "--trials", "2000", "--seed", "3"],
        vec![
            "bench",
            "--trials",
            "4",
            "--seed",
            "11",
            "--mc-trials",
            "200",
        ],
        vec!["gap", "1", "2", "5"],
    ];
    let differing: Vec<String> = commands
        .iter()
        .filter(|args| run(args) != run(args))
        .map(|args| args.join(" "))
        .collect();
    verdict(
        differing.is_empty(),
        format!(
            "{} invocations repeated, differing = [{}]",
            commands.len(),
            differing.join("; ")
        ),
    )
}

fn timed<T>(f: impl FnOnce() -> T) -> (T, f64) {
    let t = Instant::now();
    let out = f();
    (out, t.elapsed().as_secs_f64())
}

fn report(results: &mut Vec<bool>, name: &str, v: Verdict, secs: f64) {
    let tag = if v.pass { "PASS" } else { "FAIL" };
    println!("{tag} criterion {name}: {} ({secs:.1}s)", v.detail);
    results.push(v.pass);
}

fn main() {
    let mut results = Vec::new();
    let r = &mut results;

    let (v, t) = timed(star_gap);
    report(r, "1 star gap", v, t);
    // 2 and 3 share one pass over the same clean points.
    let ((c2, c3), t) = timed(|| single_round_bound(Variant::Unweighted));
    report(r, "2 single-round 5/8 bound", c2, t);
    report(r, "3 beta-sum inequality", c3, 0.0);
    let (v, t) = timed(|| round_cost(Variant::Unweighted));
    report(r, "4 expected round cost", v, t);
    let (v, t) = timed(|| end_to_end(Variant::Unweighted));
    report(r, "5 end-to-end rounding", v, t);
    let ((v, mut traces), t) = timed(|| sandwich(Variant::Unweighted));
    report(r, "6 sandwich and ratio", v, t);
    let (v, t) = timed(set_cover_reduction);
    report(r, "7 set-cover reduction", v, t);

    let ((ext, ext_traces), ext_secs) = timed(|| {
        let (mut ext, mut traces) = (Vec::new(), Vec::new());
        for variant in [Variant::Weighted, Variant::Overlapping] {
            let (a, b) = single_round_bound(variant);
            let (s, t) = sandwich(variant);
            traces.extend(t);
            let checks = [
                ("2", a),
                ("3", b),
                ("4", round_cost(variant)),
                ("5", end_to_end(variant)),
                ("6", s),
            ];
            for (label, v) in checks {
                let tag = if v.pass { "pass" } else { "fail" };
                println!(
                    "  {} {tag} criterion {label}: {}",
                    variant.label(),
                    v.detail
                );
                ext.push((variant, label, v.pass));
            }
        }
        (ext, traces)
    });
    traces.extend(ext_traces);

    let (v, t) = timed(|| lp_kernel(&traces));
    report(r, "8 LP kernel oracle and cut monotonicity", v, t);
    let (v, t) = timed(determinism);
    report(r, "9 CLI determinism", v, t);
    let failing: Vec<String> = ext
        .iter()
        .filter(|(_, _, ok)| !ok)
        .map(|(v, l, _)| format!("{}:{l}", v.label()))
        .collect();
    let v = verdict(
        failing.is_empty(),
        format!(
            "criteria 2-6 on weighted and overlapping instances; failing = [{}]",
            failing.join(", ")
        ),
    );
    report(r, "10 weighted and overlapping extensions", v, ext_secs);

    let failed = results.iter().filter(|&&ok| !ok).count();
    println!(
        "acceptance: {} passed, {failed} failed",
        results.len() - failed
    );
    if failed > 0 {
        std::process::exit(1);
    }
}
