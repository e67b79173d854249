//! Threshold rounding of a clean fractional point.
//!
//! One round takes every vertex with `x_v ≥ 1/6` and each other vertex
//! independently with probability `6·x_v`. A single round meets any fixed
//! group with probability at least 5/8, so the driver repeats it
//! `c·⌈log2(r + 1)⌉` times and returns the union.
//!
//! Randomness is ChaCha8 (`rand_chacha`), seeded with `seed_from_u64(seed)`.
//! Round `j` of attempt `a` draws from stream `(a << 32) | j`; Monte Carlo
//! trial `t` draws from stream `(1 << 63) | t`. Each non-threshold vertex
//! consumes one `f64` in vertex order, so any round can be replayed alone.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use thiserror::Error;

use crate::instance::{Instance, VertexSet};
use crate::pvclp::{self, build_kc_constraint, threshold_set, FractionalSolution};

/// Selection probability multiplier for vertices below the threshold.
pub const SCALE: f64 = 6.0;

/// Tolerance on the `Σ β x ≥ 1` precondition.
pub const PRECONDITION_TOL: f64 = 1e-6;

/// Two-sided 99% normal quantile.
const Z_99: f64 = 2.575_829_303_548_901;

const MONTE_CARLO_STREAM: u64 = 1 << 63;

#[derive(Debug, Clone, PartialEq)]
pub struct RoundingConfig {
    pub seed: u64,
    /// The `c` in `c·⌈log2(r + 1)⌉` rounds.
    pub rounds_constant: u32,
    pub threshold: f64,
    pub scale: f64,
    pub max_restarts: u32,
    /// Drop redundant vertices from the union afterwards (reported separately).
    pub prune: bool,
}

impl Default for RoundingConfig {
    fn default() -> Self {
        RoundingConfig {
            seed: 0,
            rounds_constant: 4,
            threshold: pvclp::THRESHOLD,
            scale: SCALE,
            max_restarts: 8,
            prune: false,
        }
    }
}

impl RoundingConfig {
    pub fn with_seed(seed: u64) -> Self {
        RoundingConfig {
            seed,
            ..Default::default()
        }
    }

    pub fn validate(&self) -> Result<(), RoundingError> {
        let bad = |msg: String| Err(RoundingError::BadConfig(msg));
        if !(self.threshold > 0.0 && self.threshold < 1.0) {
            return bad(format!("threshold {} outside (0, 1)", self.threshold));
        }
        if (self.scale * self.threshold - 1.0).abs() > 1e-12 {
            return bad(format!(
                "scale {} times threshold {} is not 1",
                self.scale, self.threshold
            ));
        }
        // The separation oracle and the rounding must agree on the threshold set.
        if self.threshold != pvclp::THRESHOLD {
            return bad(format!(
                "threshold {} differs from the separation threshold {}",
                self.threshold,
                pvclp::THRESHOLD
            ));
        }
        if self.rounds_constant == 0 {
            return bad("rounds constant must be positive".into());
        }
        if self.max_restarts == 0 {
            return bad("max restarts must be positive".into());
        }
        Ok(())
    }

    /// `c·⌈log2(r + 1)⌉`, at least 1.
    pub fn rounds(&self, num_groups: usize) -> usize {
        rounds_for(num_groups, self.rounds_constant)
    }
}

pub fn rounds_for(num_groups: usize, constant: u32) -> usize {
    // ⌈log2(r + 1)⌉ is the bit length of r.
    let log = (usize::BITS - num_groups.leading_zeros()) as usize;
    (constant as usize * log).max(1)
}

#[derive(Debug, Clone, PartialEq, Error)]
pub enum RoundingError {
    #[error("invalid rounding config: {0}")]
    BadConfig(String),
    #[error("fractional point is not clean: group {group} has Σβx = {value:.9} < 1")]
    Precondition { group: usize, value: f64 },
    #[error("rounding stayed infeasible after {attempts} attempts")]
    InfeasibleAfterRestarts { attempts: u32 },
}

/// An integral solution with its recomputed cost and coverage.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct VertexSelection {
    pub chosen: VertexSet,
    pub cost: u64,
    /// Covered weight per group.
    pub covered: Vec<u64>,
}

impl VertexSelection {
    pub fn new(inst: &Instance, chosen: VertexSet) -> Self {
        let cost = inst.cost_of(&chosen);
        let covered = inst.coverage(&chosen);
        VertexSelection {
            chosen,
            cost,
            covered,
        }
    }

    pub fn is_feasible(&self, inst: &Instance) -> bool {
        self.covered
            .iter()
            .zip(inst.groups())
            .all(|(&c, g)| c >= g.target)
    }

    /// Per group: does this selection meet the target?
    pub fn satisfied(&self, inst: &Instance) -> Vec<bool> {
        self.covered
            .iter()
            .zip(inst.groups())
            .map(|(&c, g)| c >= g.target)
            .collect()
    }
}

/// The RNG for round `round` of attempt `attempt`.
pub fn round_stream(seed: u64, attempt: u32, round: u32) -> ChaCha8Rng {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(((attempt as u64) << 32) | round as u64);
    rng
}

/// Picks the chosen set of one round without computing cost or coverage.
pub fn round_set<R: Rng + ?Sized>(x: &[f64], cfg: &RoundingConfig, rng: &mut R) -> VertexSet {
    let mask = x
        .iter()
        .map(|&v| {
            if pvclp::above_threshold(v) {
                true
            } else {
                rng.gen::<f64>() < cfg.scale * v
            }
        })
        .collect();
    VertexSet::from_mask(mask)
}

/// One round of threshold rounding.
pub fn round_once<R: Rng + ?Sized>(
    inst: &Instance,
    x: &[f64],
    cfg: &RoundingConfig,
    rng: &mut R,
) -> VertexSelection {
    VertexSelection::new(inst, round_set(x, cfg, rng))
}

/// `Σ_v min(1, 6·x_v)·c_v`, the exact expected cost of one round.
pub fn expected_round_cost(inst: &Instance, x: &[f64], cfg: &RoundingConfig) -> f64 {
    x.iter()
        .zip(inst.costs())
        .map(|(&v, &c)| {
            let p = if pvclp::above_threshold(v) {
                1.0
            } else {
                (cfg.scale * v).min(1.0)
            };
            p * c as f64
        })
        .sum()
}

/// `Σ_{v ∉ A} β_i(v, A)·x_v` for the threshold set `A` of `x`, per group;
/// `None` for groups that `A` already satisfies.
pub fn beta_sums(inst: &Instance, x: &[f64]) -> Vec<Option<f64>> {
    let a = threshold_set(x);
    (0..inst.num_groups())
        .map(|i| build_kc_constraint(inst, i, &a).map(|c| c.normalized_lhs(x)))
        .collect()
}

pub fn check_precondition(inst: &Instance, x: &[f64]) -> Result<(), RoundingError> {
    for (group, value) in beta_sums(inst, x).into_iter().enumerate() {
        if let Some(value) = value {
            if value < 1.0 - PRECONDITION_TOL {
                return Err(RoundingError::Precondition { group, value });
            }
        }
    }
    Ok(())
}

#[derive(Debug, Clone, PartialEq)]
pub struct RoundingOutcome {
    pub selection: VertexSelection,
    /// The selection after redundant-vertex removal, when requested.
    pub pruned: Option<VertexSelection>,
    pub rounds: usize,
    /// Attempts beyond the first.
    pub restarts: u32,
    /// Feasibility of each attempt's union, in order.
    pub attempt_feasible: Vec<bool>,
    /// Mean cost of the individual rounds in the accepted attempt.
    pub mean_round_cost: f64,
}

impl RoundingOutcome {
    pub fn first_attempt_feasible(&self) -> bool {
        self.attempt_feasible.first().copied().unwrap_or(false)
    }
}

/// Repeats threshold rounding and unions the picks, restarting on a fresh
/// substream if the union misses some group.
pub fn solve_rounded(
    inst: &Instance,
    x: &FractionalSolution,
    cfg: &RoundingConfig,
) -> Result<RoundingOutcome, RoundingError> {
    cfg.validate()?;
    check_precondition(inst, &x.x)?;
    let rounds = cfg.rounds(inst.num_groups());
    let mut attempt_feasible = Vec::new();
    for attempt in 0..cfg.max_restarts {
        let mut union = VertexSet::empty(inst.num_vertices());
        let mut round_costs = 0u64;
        for round in 0..rounds {
            let mut rng = round_stream(cfg.seed, attempt, round as u32);
            let picked = round_set(&x.x, cfg, &mut rng);
            round_costs += inst.cost_of(&picked);
            union.union_with(&picked);
        }
        let selection = VertexSelection::new(inst, union);
        let feasible = selection.is_feasible(inst);
        attempt_feasible.push(feasible);
        if feasible {
            let pruned = cfg.prune.then(|| prune(inst, &selection));
            return Ok(RoundingOutcome {
                selection,
                pruned,
                rounds,
                restarts: attempt,
                attempt_feasible,
                mean_round_cost: round_costs as f64 / rounds as f64,
            });
        }
        log::info!("rounding attempt {attempt} infeasible, restarting");
    }
    Err(RoundingError::InfeasibleAfterRestarts {
        attempts: cfg.max_restarts,
    })
}

/// Removes chosen vertices, most expensive first (ties: higher id first),
/// whenever the rest stays feasible.
pub fn prune(inst: &Instance, sel: &VertexSelection) -> VertexSelection {
    let mut order = sel.chosen.to_vec();
    order.sort_by(|&a, &b| inst.cost(b).cmp(&inst.cost(a)).then(b.cmp(&a)));
    let mut chosen = sel.chosen.clone();
    for v in order {
        chosen.remove(v);
        if !inst.is_feasible(&chosen) {
            chosen.insert(v);
        }
    }
    VertexSelection::new(inst, chosen)
}

/// Per-group single-round success frequencies.
#[derive(Debug, Clone, PartialEq)]
pub struct SuccessEstimate {
    pub trials: u64,
    pub successes: Vec<u64>,
    pub frequency: Vec<f64>,
    /// 99% normal-approximation confidence radius per group.
    pub radius: Vec<f64>,
}

impl SuccessEstimate {
    /// Does every group clear `bound − radius`?
    pub fn meets(&self, bound: f64) -> bool {
        self.frequency
            .iter()
            .zip(&self.radius)
            .all(|(f, r)| *f >= bound - r)
    }

    pub fn min_frequency(&self) -> Option<f64> {
        self.frequency.iter().copied().reduce(f64::min)
    }
}

pub fn confidence_radius_99(p: f64, trials: u64) -> f64 {
    if trials == 0 {
        return f64::INFINITY;
    }
    Z_99 * (p * (1.0 - p) / trials as f64).sqrt()
}

/// Runs `trials` independent single rounds and counts, per group, how often
/// the round alone meets the target.
pub fn estimate_round_success(
    inst: &Instance,
    x: &[f64],
    trials: u64,
    seed: u64,
) -> SuccessEstimate {
    let cfg = RoundingConfig::with_seed(seed);
    let mut successes = vec![0u64; inst.num_groups()];
    for t in 0..trials {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        rng.set_stream(MONTE_CARLO_STREAM | t);
        let sel = round_once(inst, x, &cfg, &mut rng);
        for (s, ok) in successes.iter_mut().zip(sel.satisfied(inst)) {
            *s += ok as u64;
        }
    }
    let frequency: Vec<f64> = successes
        .iter()
        .map(|&s| {
            if trials == 0 {
                0.0
            } else {
                s as f64 / trials as f64
            }
        })
        .collect();
    let radius = frequency
        .iter()
        .map(|&p| confidence_radius_99(p, trials))
        .collect();
    SuccessEstimate {
        trials,
        successes,
        frequency,
        radius,
    }
}

/// Sample mean and standard error of the single-round cost.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct CostSample {
    pub mean: f64,
    pub std_err: f64,
}

pub fn sample_round_cost(inst: &Instance, x: &[f64], trials: u64, seed: u64) -> CostSample {
    let cfg = RoundingConfig::with_seed(seed);
    let (mut sum, mut sum_sq) = (0.0, 0.0);
    for t in 0..trials {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        rng.set_stream(MONTE_CARLO_STREAM | t);
        let cost = inst.cost_of(&round_set(x, &cfg, &mut rng)) as f64;
        sum += cost;
        sum_sq += cost * cost;
    }
    let n = trials as f64;
    let mean = sum / n;
    let var = if trials > 1 {
        (sum_sq - n * mean * mean).max(0.0) / (n - 1.0)
    } else {
        0.0
    };
    CostSample {
        mean,
        std_err: (var / n).sqrt(),
    }
}
