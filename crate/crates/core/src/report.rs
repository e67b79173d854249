//! End-to-end solve (relaxation then rounding) and its text report.

use std::fmt::Write as _;
use thiserror::Error;

use crate::instance::Instance;
use crate::pvclp::{solve_pvclp, FractionalSolution, PvcError, SolveMode};
use crate::rounding::{solve_rounded, RoundingConfig, RoundingError, RoundingOutcome};

#[derive(Debug, Clone, PartialEq, Error)]
pub enum SolveError {
    #[error("relaxation failed: {0}")]
    Relaxation(#[from] PvcError),
    #[error("rounding failed: {0}")]
    Rounding(#[from] RoundingError),
}

#[derive(Debug, Clone, Copy, PartialEq, Default)]
pub struct StageTimings {
    pub relaxation_ms: f64,
    pub rounding_ms: f64,
}

#[derive(Debug, Clone, PartialEq)]
pub struct SolveReport {
    pub n: usize,
    pub m: usize,
    pub r: usize,
    pub mode: SolveMode,
    pub seed: u64,
    pub rounds_constant: u32,
    pub relaxation: FractionalSolution,
    pub rounding: RoundingOutcome,
    pub feasible: bool,
    pub targets: Vec<u64>,
    pub timings: StageTimings,
}

impl SolveReport {
    pub fn lp_value(&self) -> f64 {
        self.relaxation.objective
    }

    pub fn cost(&self) -> u64 {
        self.rounding.selection.cost
    }

    /// Rounded cost over the relaxation value; infinite when the LP value is 0
    /// and the cost is not.
    pub fn ratio(&self) -> f64 {
        let cost = self.cost() as f64;
        if cost == 0.0 {
            1.0
        } else {
            cost / self.lp_value()
        }
    }

    /// Flat `key = value` block. Timings are only included on request since
    /// they differ between runs.
    pub fn to_key_value(&self, with_timing: bool) -> String {
        let mut out = String::new();
        let sel = &self.rounding.selection;
        let list = |xs: &mut dyn Iterator<Item = String>| xs.collect::<Vec<_>>().join(" ");
        let _ = writeln!(out, "vertices = {}", self.n);
        let _ = writeln!(out, "edges = {}", self.m);
        let _ = writeln!(out, "groups = {}", self.r);
        let _ = writeln!(out, "mode = {}", self.mode);
        if let Some(delta) = self.relaxation.delta {
            let _ = writeln!(out, "delta = {delta}");
        }
        let _ = writeln!(out, "lp_value = {:.9}", self.lp_value());
        let _ = writeln!(out, "lp_solves = {}", self.relaxation.lp_solves);
        let _ = writeln!(out, "cuts = {}", self.relaxation.cuts.len());
        let _ = writeln!(out, "seed = {}", self.seed);
        let _ = writeln!(out, "rounds_constant = {}", self.rounds_constant);
        let _ = writeln!(out, "rounds = {}", self.rounding.rounds);
        let _ = writeln!(out, "restarts = {}", self.rounding.restarts);
        let _ = writeln!(out, "cost = {}", sel.cost);
        let _ = writeln!(out, "feasible = {}", self.feasible);
        let _ = writeln!(out, "ratio = {:.9}", self.ratio());
        let _ = writeln!(
            out,
            "chosen = {}",
            list(&mut sel.chosen.iter().map(|v| v.to_string()))
        );
        let _ = writeln!(
            out,
            "covered = {}",
            list(&mut sel.covered.iter().map(|c| c.to_string()))
        );
        let _ = writeln!(
            out,
            "targets = {}",
            list(&mut self.targets.iter().map(|t| t.to_string()))
        );
        if let Some(p) = &self.rounding.pruned {
            let _ = writeln!(out, "pruned_cost = {}", p.cost);
            let _ = writeln!(
                out,
                "pruned_chosen = {}",
                list(&mut p.chosen.iter().map(|v| v.to_string()))
            );
        }
        if with_timing {
            let _ = writeln!(out, "relaxation_ms = {:.3}", self.timings.relaxation_ms);
            let _ = writeln!(out, "rounding_ms = {:.3}", self.timings.rounding_ms);
        }
        out
    }
}

/// Solves the relaxation in `mode`, then rounds it with `cfg`.
pub fn solve(
    inst: &Instance,
    mode: SolveMode,
    cfg: &RoundingConfig,
) -> Result<SolveReport, SolveError> {
    cfg.validate()?;
    let (relaxation, relaxation_ms) = timed(|| solve_pvclp(inst, mode));
    let relaxation = relaxation?;
    let (rounding, rounding_ms) = timed(|| solve_rounded(inst, &relaxation, cfg));
    let rounding = rounding?;
    let feasible = rounding.selection.is_feasible(inst);
    Ok(SolveReport {
        n: inst.num_vertices(),
        m: inst.num_edges(),
        r: inst.num_groups(),
        mode,
        seed: cfg.seed,
        rounds_constant: cfg.rounds_constant,
        relaxation,
        rounding,
        feasible,
        targets: inst.groups().iter().map(|g| g.target).collect(),
        timings: StageTimings {
            relaxation_ms,
            rounding_ms,
        },
    })
}

/// Runs `f` and returns its result with the elapsed wall time in
/// milliseconds (always 0 on wasm32, which has no monotonic clock in std).
pub fn timed<T>(f: impl FnOnce() -> T) -> (T, f64) {
    #[cfg(not(target_arch = "wasm32"))]
    {
        let start = std::time::Instant::now();
        let out = f();
        (out, start.elapsed().as_secs_f64() * 1e3)
    }
    #[cfg(target_arch = "wasm32")]
    {
        (f(), 0.0)
    }
}
