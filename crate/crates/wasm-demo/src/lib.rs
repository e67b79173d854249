//! Browser bindings for the partition vertex cover solver.
//!
//! Every export takes plain numbers or instance text and returns a JSON
//! string, so the page needs no generated type glue beyond `wasm-bindgen`.
//! Errors come back as `{"error": "..."}`.

use serde::Serialize;
use wasm_bindgen::prelude::*;

use pvc_core::bench::gap_row;
use pvc_core::exact::{exact_solve, DEFAULT_VERTEX_LIMIT};
use pvc_core::greedy::greedy_solve;
use pvc_core::instance::{
    generate_random, parse_instance, serialize_instance, Instance, RandomConfig,
};
use pvc_core::pvclp::{solve_lp1, solve_pvclp, SolveMode};
use pvc_core::report::solve;
use pvc_core::rounding::{
    estimate_round_success, expected_round_cost, sample_round_cost, RoundingConfig,
};

/// Star sizes offered by the gap chart.
const GAP_SIZES: [usize; 10] = [1, 2, 3, 5, 8, 10, 20, 30, 50, 100];

#[derive(Debug, Serialize, PartialEq)]
pub struct GapPoint {
    pub leaves: usize,
    pub lp1: f64,
    pub pvclp: f64,
    pub exact: u64,
}

#[derive(Debug, Serialize, PartialEq)]
pub struct SolveSummary {
    pub vertices: usize,
    pub edges: usize,
    pub groups: usize,
    pub lp1: f64,
    pub pvclp: f64,
    pub x: Vec<f64>,
    pub cuts: usize,
    pub rounded_cost: u64,
    pub rounded_chosen: Vec<usize>,
    pub rounds: usize,
    pub restarts: u32,
    pub greedy_cost: u64,
    /// Absent above the exact solver's vertex limit.
    pub exact: Option<u64>,
}

#[derive(Debug, Serialize, PartialEq)]
pub struct RoundingStats {
    pub trials: u64,
    pub frequency: Vec<f64>,
    pub radius: Vec<f64>,
    pub bound: f64,
    pub expected_cost: f64,
    pub sampled_cost: f64,
    pub sampled_std_err: f64,
    pub lp_value: f64,
}

#[derive(Serialize)]
struct ErrorBody {
    error: String,
}

fn to_json<T: Serialize>(result: Result<T, String>) -> String {
    match result {
        Ok(v) => serde_json::to_string(&v),
        Err(error) => serde_json::to_string(&ErrorBody { error }),
    }
    .expect("plain structs serialize")
}

fn load(text: &str) -> Result<Instance, String> {
    parse_instance(text.as_bytes(), false).map_err(|e| e.to_string())
}

/// Gap rows for every preset star size up to `max_leaves`.
pub fn gap_points(max_leaves: usize) -> Result<Vec<GapPoint>, String> {
    GAP_SIZES
        .iter()
        .filter(|&&d| d <= max_leaves)
        .map(|&d| {
            let row = gap_row(d).map_err(|e| e.to_string())?;
            Ok(GapPoint {
                leaves: d,
                lp1: row.lp1,
                pvclp: row.pvclp,
                exact: row.exact,
            })
        })
        .collect()
}

pub fn solve_summary(text: &str, seed: u64) -> Result<SolveSummary, String> {
    let inst = load(text)?;
    let report = solve(&inst, SolveMode::Direct, &RoundingConfig::with_seed(seed))
        .map_err(|e| e.to_string())?;
    let lp1 = solve_lp1(&inst).map_err(|e| e.to_string())?;
    Ok(SolveSummary {
        vertices: inst.num_vertices(),
        edges: inst.num_edges(),
        groups: inst.num_groups(),
        lp1: lp1.objective,
        pvclp: report.lp_value(),
        x: report.relaxation.x.clone(),
        cuts: report.relaxation.cuts.len(),
        rounded_cost: report.cost(),
        rounded_chosen: report.rounding.selection.chosen.to_vec(),
        rounds: report.rounding.rounds,
        restarts: report.rounding.restarts,
        greedy_cost: greedy_solve(&inst).cost,
        exact: exact_solve(&inst, DEFAULT_VERTEX_LIMIT)
            .ok()
            .map(|r| r.optimum),
    })
}

pub fn rounding_stats(text: &str, seed: u64, trials: u64) -> Result<RoundingStats, String> {
    let inst = load(text)?;
    let sol = solve_pvclp(&inst, SolveMode::Direct).map_err(|e| e.to_string())?;
    let est = estimate_round_success(&inst, &sol.x, trials, seed);
    let sample = sample_round_cost(&inst, &sol.x, trials, seed);
    Ok(RoundingStats {
        trials,
        frequency: est.frequency,
        radius: est.radius,
        bound: 5.0 / 8.0,
        expected_cost: expected_round_cost(&inst, &sol.x, &RoundingConfig::with_seed(seed)),
        sampled_cost: sample.mean,
        sampled_std_err: sample.std_err,
        lp_value: sol.objective,
    })
}

/// Star gap table as `[{leaves, lp1, pvclp, exact}, ...]`.
#[wasm_bindgen]
pub fn gap_table(max_leaves: u32) -> String {
    to_json(gap_points(max_leaves as usize))
}

/// Relaxations, rounded cover and baselines for an instance in text form.
#[wasm_bindgen]
pub fn solve_instance(text: &str, seed: u32) -> String {
    to_json(solve_summary(text, seed as u64))
}

/// Monte Carlo single-round success frequency per group plus round cost.
#[wasm_bindgen]
pub fn rounding_experiment(text: &str, seed: u32, trials: u32) -> String {
    to_json(rounding_stats(text, seed as u64, trials.max(1) as u64))
}

/// A seeded random instance in canonical text form, or an error line.
#[wasm_bindgen]
pub fn random_instance(n: u32, m: u32, r: u32, seed: u32) -> String {
    match generate_random(
        &RandomConfig::new(n as usize, m as usize, r as usize),
        seed as u64,
    ) {
        Ok(inst) => serialize_instance(&inst),
        Err(e) => format!("# error: {e}\n"),
    }
}
