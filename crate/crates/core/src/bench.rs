//! Seeded experiment harness: per-instance comparison of the relaxations,
//! the rounded solution, the exact optimum and the greedy baseline, written
//! as CSV. Also the star gap table.
//!
//! All randomness derives from one master seed: row `i` takes its sizes and
//! its instance, rounding and Monte Carlo seeds from ChaCha8 stream `i` of
//! that seed, so any row can be recomputed on its own.

use std::fmt::Write as _;

use rand::{Rng, RngCore, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::exact::{exact_solve, ExactError};
use crate::greedy::greedy_solve;
use crate::instance::{generate_random, generate_star, GroupAssignment, Instance, RandomConfig};
use crate::pvclp::{solve_lp1, solve_pvclp, PvcError, SolveMode};
use crate::report::timed;
use crate::rounding::{estimate_round_success, solve_rounded, RoundingConfig};

pub const CSV_SCHEMA: &str = "# pvc-bench schema v1";

#[derive(Debug, Clone, PartialEq)]
pub struct BenchConfig {
    pub instances: usize,
    /// Inclusive ranges sampled per row.
    pub n: (usize, usize),
    pub m: (usize, usize),
    pub r: (usize, usize),
    pub cost: (u64, u64),
    pub weight: (u64, u64),
    pub overlap: f64,
    pub assignment: GroupAssignment,
    pub mode: SolveMode,
    pub rounds_constant: u32,
    /// Single-round Monte Carlo trials per row for the 5/8 check; 0 skips it.
    pub mc_trials: u64,
    /// Exact optimum is computed when `n` is at most this.
    pub exact_limit: usize,
    /// Emit per-stage wall times (breaks byte-for-byte reproducibility).
    pub timing: bool,
}

impl Default for BenchConfig {
    fn default() -> Self {
        BenchConfig {
            instances: 50,
            n: (6, 16),
            m: (6, 24),
            r: (1, 4),
            cost: (1, 10),
            weight: (1, 1),
            overlap: 0.0,
            assignment: GroupAssignment::Random,
            mode: SolveMode::Direct,
            rounds_constant: 4,
            mc_trials: 1000,
            exact_limit: crate::exact::DEFAULT_VERTEX_LIMIT,
            timing: false,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Default)]
pub struct BenchTimings {
    pub lp1_ms: f64,
    pub pvclp_ms: f64,
    pub rounding_ms: f64,
    pub exact_ms: f64,
    pub greedy_ms: f64,
}

#[derive(Debug, Clone, PartialEq)]
pub struct BenchRecord {
    pub id: usize,
    pub n: usize,
    pub m: usize,
    pub r: usize,
    pub seed: u64,
    pub lp1: Option<f64>,
    pub pvclp: Option<f64>,
    pub rounded: Option<u64>,
    pub exact: Option<u64>,
    pub greedy: Option<u64>,
    pub rounds: Option<usize>,
    pub restarts: Option<u32>,
    pub round_success_min: Option<f64>,
    /// `None` on success, otherwise the failing stage and message.
    pub failure: Option<String>,
    pub timings: BenchTimings,
}

impl BenchRecord {
    pub fn rounded_over_exact(&self) -> Option<f64> {
        ratio(self.rounded?, self.exact?)
    }

    pub fn greedy_over_exact(&self) -> Option<f64> {
        ratio(self.greedy?, self.exact?)
    }
}

fn ratio(num: u64, den: u64) -> Option<f64> {
    match (num, den) {
        (0, 0) => Some(1.0),
        (_, 0) => None,
        _ => Some(num as f64 / den as f64),
    }
}

/// Everything needed to regenerate row `id` of a bench run.
#[derive(Debug, Clone, PartialEq)]
pub struct RowSpec {
    pub instance: RandomConfig,
    pub instance_seed: u64,
    pub rounding_seed: u64,
    pub mc_seed: u64,
}

pub fn row_spec(cfg: &BenchConfig, seed: u64, id: usize) -> RowSpec {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(id as u64);
    let n = rng.gen_range(cfg.n.0.max(2)..=cfg.n.1.max(cfg.n.0).max(2));
    let r = rng.gen_range(cfg.r.0.max(1)..=cfg.r.1.max(cfg.r.0).max(1));
    let m = rng.gen_range(cfg.m.0.max(r)..=cfg.m.1.max(cfg.m.0).max(r));
    let instance = RandomConfig {
        n,
        m,
        r,
        cost: cfg.cost,
        weight: cfg.weight,
        assignment: cfg.assignment,
        overlap: cfg.overlap,
    };
    RowSpec {
        instance,
        instance_seed: rng.next_u64(),
        rounding_seed: rng.next_u64(),
        mc_seed: rng.next_u64(),
    }
}

pub fn run_row(cfg: &BenchConfig, seed: u64, id: usize) -> BenchRecord {
    let plan = row_spec(cfg, seed, id);
    let mut rec = BenchRecord {
        id,
        n: plan.instance.n,
        m: plan.instance.m,
        r: plan.instance.r,
        seed: plan.instance_seed,
        lp1: None,
        pvclp: None,
        rounded: None,
        exact: None,
        greedy: None,
        rounds: None,
        restarts: None,
        round_success_min: None,
        failure: None,
        timings: BenchTimings::default(),
    };
    let inst = match generate_random(&plan.instance, plan.instance_seed) {
        Ok(inst) => inst,
        Err(e) => {
            rec.failure = Some(format!("generate: {e}"));
            return rec;
        }
    };
    if let Err(msg) = fill_row(cfg, &plan, &inst, &mut rec) {
        rec.failure = Some(msg);
    }
    rec
}

fn fill_row(
    cfg: &BenchConfig,
    plan: &RowSpec,
    inst: &Instance,
    rec: &mut BenchRecord,
) -> Result<(), String> {
    let (lp1, ms) = timed(|| solve_lp1(inst));
    rec.timings.lp1_ms = ms;
    rec.lp1 = Some(lp1.map_err(|e| format!("lp1: {e}"))?.objective);

    let (greedy, ms) = timed(|| greedy_solve(inst));
    rec.timings.greedy_ms = ms;
    rec.greedy = Some(greedy.cost);

    if inst.num_vertices() <= cfg.exact_limit {
        let (exact, ms) = timed(|| exact_solve(inst, cfg.exact_limit));
        rec.timings.exact_ms = ms;
        rec.exact = Some(
            exact
                .map_err(|e: ExactError| format!("exact: {e}"))?
                .optimum,
        );
    }

    let (sol, ms) = timed(|| solve_pvclp(inst, cfg.mode));
    rec.timings.pvclp_ms = ms;
    let sol = sol.map_err(|e: PvcError| format!("pvclp: {e}"))?;
    rec.pvclp = Some(sol.objective);

    let rcfg = RoundingConfig {
        seed: plan.rounding_seed,
        rounds_constant: cfg.rounds_constant,
        ..Default::default()
    };
    let (out, ms) = timed(|| solve_rounded(inst, &sol, &rcfg));
    rec.timings.rounding_ms = ms;
    let out = out.map_err(|e| format!("rounding: {e}"))?;
    rec.rounded = Some(out.selection.cost);
    rec.rounds = Some(out.rounds);
    rec.restarts = Some(out.restarts);

    if cfg.mc_trials > 0 {
        rec.round_success_min =
            estimate_round_success(inst, &sol.x, cfg.mc_trials, plan.mc_seed).min_frequency();
    }
    Ok(())
}

pub fn run_bench(cfg: &BenchConfig, seed: u64) -> Vec<BenchRecord> {
    (0..cfg.instances)
        .map(|id| run_row(cfg, seed, id))
        .collect()
}

#[derive(Debug, Clone, PartialEq)]
pub struct BenchSummary {
    pub rows: usize,
    pub failed: usize,
    pub max_rounded_over_exact: Option<f64>,
    pub mean_rounded_over_exact: Option<f64>,
    pub min_round_success: Option<f64>,
}

pub fn summarize(records: &[BenchRecord]) -> BenchSummary {
    let ratios: Vec<f64> = records
        .iter()
        .filter_map(BenchRecord::rounded_over_exact)
        .collect();
    BenchSummary {
        rows: records.len(),
        failed: records.iter().filter(|r| r.failure.is_some()).count(),
        max_rounded_over_exact: ratios.iter().copied().reduce(f64::max),
        mean_rounded_over_exact: (!ratios.is_empty())
            .then(|| ratios.iter().sum::<f64>() / ratios.len() as f64),
        min_round_success: records
            .iter()
            .filter_map(|r| r.round_success_min)
            .reduce(f64::min),
    }
}

const COLUMNS: [&str; 16] = [
    "id",
    "n",
    "m",
    "r",
    "seed",
    "lp1",
    "pvclp",
    "rounded",
    "exact",
    "greedy",
    "rounds",
    "restarts",
    "round_success_min",
    "rounded_over_exact",
    "greedy_over_exact",
    "status",
];
const TIMING_COLUMNS: [&str; 5] = ["lp1_ms", "pvclp_ms", "rounding_ms", "exact_ms", "greedy_ms"];

fn opt<T: ToString>(v: Option<T>) -> String {
    v.map_or_else(String::new, |v| v.to_string())
}

fn optf(v: Option<f64>) -> String {
    v.map_or_else(String::new, |v| format!("{v:.9}"))
}

/// Schema comment, header, one row per record and, when there are rows,
/// an `# aggregate` footer comment.
pub fn to_csv(records: &[BenchRecord], with_timing: bool) -> String {
    let mut w = csv::Writer::from_writer(Vec::new());
    let mut header: Vec<&str> = COLUMNS.to_vec();
    if with_timing {
        header.extend(TIMING_COLUMNS);
    }
    w.write_record(&header).expect("write to Vec");
    for rec in records {
        let mut row = vec![
            rec.id.to_string(),
            rec.n.to_string(),
            rec.m.to_string(),
            rec.r.to_string(),
            rec.seed.to_string(),
            optf(rec.lp1),
            optf(rec.pvclp),
            opt(rec.rounded),
            opt(rec.exact),
            opt(rec.greedy),
            opt(rec.rounds),
            opt(rec.restarts),
            optf(rec.round_success_min),
            optf(rec.rounded_over_exact()),
            optf(rec.greedy_over_exact()),
            rec.failure
                .as_ref()
                .map_or_else(|| "ok".to_string(), |f| format!("failed: {f}")),
        ];
        if with_timing {
            let t = &rec.timings;
            row.extend(
                [t.lp1_ms, t.pvclp_ms, t.rounding_ms, t.exact_ms, t.greedy_ms]
                    .map(|v| format!("{v:.3}")),
            );
        }
        w.write_record(&row).expect("write to Vec");
    }
    let body =
        String::from_utf8(w.into_inner().expect("flush to Vec")).expect("csv output is UTF-8");

    let mut out = format!("{CSV_SCHEMA}\n{body}");
    if !records.is_empty() {
        let s = summarize(records);
        let _ = writeln!(
            out,
            "# aggregate rows={} failed={} max_rounded_over_exact={} mean_rounded_over_exact={} min_round_success={}",
            s.rows,
            s.failed,
            optf(s.max_rounded_over_exact),
            optf(s.mean_rounded_over_exact),
            optf(s.min_round_success),
        );
    }
    out
}

/// One row of the star gap table.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct GapRow {
    pub leaves: usize,
    pub lp1: f64,
    pub pvclp: f64,
    pub exact: u64,
}

pub fn gap_row(leaves: usize) -> Result<GapRow, PvcError> {
    let inst = generate_star(leaves);
    let lp1 = solve_lp1(&inst)?.objective;
    let pvclp = solve_pvclp(&inst, SolveMode::Direct)?.objective;
    let exact = exact_solve(&inst, inst.num_vertices())
        .expect("limit equals n")
        .optimum;
    Ok(GapRow {
        leaves,
        lp1,
        pvclp,
        exact,
    })
}

pub fn gap_table_text(rows: &[GapRow]) -> String {
    let mut out = String::from("D,lp1,pvclp,exact\n");
    for r in rows {
        let _ = writeln!(out, "{},{:.9},{:.9},{}", r.leaves, r.lp1, r.pvclp, r.exact);
    }
    out
}
