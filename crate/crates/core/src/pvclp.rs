//! Knapsack-cover strengthened relaxation and its cutting-plane solver.
//!
//! For a suppressed vertex set `A` and a group `i`, the residual requirement
//! `k_i(A)` is what group `i` still needs once every vertex of `A` is taken,
//! and `wdeg_i(v, A)` is the weight of group-`i` edges at `v` whose other
//! endpoint lies outside `A`. The knapsack-cover row is
//!
//! ```text
//! Σ_{v ∉ A} min(k_i(A), wdeg_i(v, A)) · x_v ≥ k_i(A)
//! ```
//!
//! There is one such row per `(i, A)`; the solver only ever separates the
//! rows for `A = ∅` and for `A = {v : x_v ≥ 1/6}`, which is the family the
//! threshold rounding relies on.

use std::collections::HashSet;
use std::fmt;

use thiserror::Error;

use crate::instance::{Instance, VertexId, VertexSet};
use crate::lp::{lp_solve, LinearProgram, LpError, LpStatus, Row, EPS_FEAS};

/// Vertices at or above this LP value are taken outright by the rounding and
/// form the suppressed set used for separation.
pub const THRESHOLD: f64 = 1.0 / 6.0;

/// Membership test for the threshold set, with the feasibility tolerance
/// absorbing values that sit on the boundary up to float noise.
#[inline]
pub fn above_threshold(value: f64) -> bool {
    value >= THRESHOLD - EPS_FEAS
}

/// `A = {v : x_v ≥ 1/6}` for a fractional point.
pub fn threshold_set(x: &[f64]) -> VertexSet {
    VertexSet::from_mask(x.iter().map(|&v| above_threshold(v)).collect())
}

#[derive(Debug, Clone, PartialEq, Error)]
pub enum PvcError {
    #[error("vertex {vertex} is in the suppressed set")]
    SuppressedVertex { vertex: VertexId },
    #[error("cut limit {limit} reached without a clean point")]
    CutLimit { limit: usize },
    #[error("separation stalled on repeated cuts and the point is not clean")]
    Stalled,
    #[error("relaxation reported infeasible; the instance invariants guarantee feasibility")]
    UnexpectedInfeasible,
    #[error(transparent)]
    Lp(#[from] LpError),
}

/// `k_i(A)`: remaining weight group `i` needs after taking all of `a`.
pub fn residual(inst: &Instance, group: usize, a: &VertexSet) -> u64 {
    let g = inst.group(group);
    let covered: u64 = g
        .edges
        .iter()
        .map(|&e| inst.edge(e))
        .filter(|e| a.contains(e.u) || a.contains(e.v))
        .map(|e| e.weight)
        .sum();
    g.target.saturating_sub(covered)
}

/// `wdeg_i(v, A)`: weight of group-`i` edges at `v` with the far endpoint outside `a`.
pub fn wdeg(inst: &Instance, group: usize, v: VertexId, a: &VertexSet) -> Result<u64, PvcError> {
    if a.contains(v) {
        return Err(PvcError::SuppressedVertex { vertex: v });
    }
    Ok(wdeg_unchecked(inst, group, v, a))
}

fn wdeg_unchecked(inst: &Instance, group: usize, v: VertexId, a: &VertexSet) -> u64 {
    inst.group(group)
        .edges
        .iter()
        .map(|&e| inst.edge(e))
        .filter(|e| e.is_incident(v) && !a.contains(e.other(v)))
        .map(|e| e.weight)
        .sum()
}

/// One knapsack-cover row `Σ coeff_v x_v ≥ rhs`.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct KnapsackCoverConstraint {
    pub group: usize,
    pub suppressed: VertexSet,
    /// `(v, min(rhs, wdeg))` for every `v ∉ A` with a nonzero coefficient.
    pub coefficients: Vec<(VertexId, u64)>,
    pub rhs: u64,
}

impl KnapsackCoverConstraint {
    pub fn lhs(&self, x: &[f64]) -> f64 {
        self.coefficients
            .iter()
            .map(|&(v, c)| c as f64 * x[v])
            .sum()
    }

    pub fn is_satisfied(&self, x: &[f64], tol: f64) -> bool {
        self.lhs(x) >= self.rhs as f64 - tol
    }

    /// Normalised slack `lhs / rhs`; this is the `Σ β_i(v, A) x_v` sum.
    pub fn normalized_lhs(&self, x: &[f64]) -> f64 {
        self.lhs(x) / self.rhs as f64
    }

    pub fn to_row(&self) -> Row {
        Row::ge(
            self.coefficients
                .iter()
                .map(|&(v, c)| (v, c as f64))
                .collect(),
            self.rhs as f64,
        )
    }

    fn key(&self) -> (usize, VertexSet) {
        (self.group, self.suppressed.clone())
    }
}

/// Materialises the row for `(group, a)`, or `None` when `a` already meets
/// the group's target.
pub fn build_kc_constraint(
    inst: &Instance,
    group: usize,
    a: &VertexSet,
) -> Option<KnapsackCoverConstraint> {
    let rhs = residual(inst, group, a);
    if rhs == 0 {
        return None;
    }
    let mut coefficients = Vec::new();
    for v in 0..inst.num_vertices() {
        if a.contains(v) {
            continue;
        }
        let c = wdeg_unchecked(inst, group, v, a).min(rhs);
        if c > 0 {
            coefficients.push((v, c));
        }
    }
    Some(KnapsackCoverConstraint {
        group,
        suppressed: a.clone(),
        coefficients,
        rhs,
    })
}

#[derive(Debug, Clone, PartialEq)]
pub enum SeparationOutcome {
    Clean,
    CostCap { cost: f64, cap: f64 },
    Violated(KnapsackCoverConstraint),
}

#[derive(Debug, Clone, PartialEq)]
pub struct Separation {
    pub outcome: SeparationOutcome,
    /// Per group: does the `A = ∅` row hold at `x`? Diagnostics only.
    pub empty_set_holds: Vec<bool>,
}

impl Separation {
    pub fn is_clean(&self) -> bool {
        self.outcome == SeparationOutcome::Clean
    }
}

/// Checks the cost cap (when given), then the knapsack-cover row of every
/// group for `A = {v : x_v ≥ 1/6}`. Reports the lowest violated group.
pub fn separate(inst: &Instance, x: &[f64], cap: Option<f64>) -> Separation {
    separate_tol(inst, x, cap, EPS_FEAS)
}

fn separate_tol(inst: &Instance, x: &[f64], cap: Option<f64>, tol: f64) -> Separation {
    let empty = VertexSet::empty(inst.num_vertices());
    let empty_set_holds = (0..inst.num_groups())
        .map(|i| build_kc_constraint(inst, i, &empty).is_none_or(|c| c.is_satisfied(x, tol)))
        .collect();
    if let Some(cap) = cap {
        let cost = cost_of(inst, x);
        if cost > cap + tol * (1.0 + cap.abs()) {
            return Separation {
                outcome: SeparationOutcome::CostCap { cost, cap },
                empty_set_holds,
            };
        }
    }
    let outcome = violated_rows(inst, x, tol)
        .into_iter()
        .next()
        .map_or(SeparationOutcome::Clean, SeparationOutcome::Violated);
    Separation {
        outcome,
        empty_set_holds,
    }
}

fn violated_rows(inst: &Instance, x: &[f64], tol: f64) -> Vec<KnapsackCoverConstraint> {
    let a = threshold_set(x);
    (0..inst.num_groups())
        .filter_map(|i| build_kc_constraint(inst, i, &a))
        .filter(|c| !c.is_satisfied(x, tol))
        .collect()
}

pub fn cost_of(inst: &Instance, x: &[f64]) -> f64 {
    inst.costs()
        .iter()
        .zip(x)
        .map(|(&c, &v)| c as f64 * v)
        .sum()
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum SolveMode {
    /// Minimise cost directly inside the cutting-plane loop.
    #[default]
    Direct,
    /// Binary search an integer cost cap with a feasibility loop per probe.
    DeltaSearch,
}

impl fmt::Display for SolveMode {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            SolveMode::Direct => "direct",
            SolveMode::DeltaSearch => "delta",
        })
    }
}

/// One line of the cut log.
#[derive(Debug, Clone, PartialEq)]
pub struct CutRecord {
    pub group: usize,
    pub suppressed_size: usize,
    pub rhs: u64,
    pub lhs_at_violation: f64,
}

impl fmt::Display for CutRecord {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(
            f,
            "cut group={} |A|={} rhs={} lhs={:.9}",
            self.group, self.suppressed_size, self.rhs, self.lhs_at_violation
        )
    }
}

/// A point that passed separation, with the rows it was checked against.
#[derive(Debug, Clone, PartialEq)]
pub struct FractionalSolution {
    pub x: Vec<f64>,
    pub objective: f64,
    pub certificate: Vec<KnapsackCoverConstraint>,
    /// LP objective after each solve of the final loop (direct mode) or the
    /// accepted probe (delta mode).
    pub trace: Vec<f64>,
    pub cuts: Vec<CutRecord>,
    pub lp_solves: usize,
    /// Accepted cost cap in delta-search mode.
    pub delta: Option<u64>,
}

/// Cuts allowed per loop: 200 per group.
pub fn cut_limit(inst: &Instance) -> usize {
    200 * inst.num_groups().max(1)
}

pub fn solve_pvclp(inst: &Instance, mode: SolveMode) -> Result<FractionalSolution, PvcError> {
    match mode {
        SolveMode::Direct => {
            let objective = inst.costs().iter().map(|&c| c as f64).collect();
            cutting_plane(inst, LinearProgram::new(objective), None)?
                .ok_or(PvcError::UnexpectedInfeasible)
        }
        SolveMode::DeltaSearch => delta_search(inst),
    }
}

fn delta_search(inst: &Instance) -> Result<FractionalSolution, PvcError> {
    let n = inst.num_vertices();
    let mut probes = 0;
    let mut probe = |delta: u64| -> Result<Option<FractionalSolution>, PvcError> {
        probes += 1;
        let costs: Vec<(usize, f64)> = inst
            .costs()
            .iter()
            .enumerate()
            .map(|(v, &c)| (v, c as f64))
            .collect();
        let lp = LinearProgram::new(vec![0.0; n]).with_row(Row::le(costs, delta as f64))?;
        let found = cutting_plane(inst, lp, Some(delta as f64))?;
        log::debug!(
            "delta probe {delta}: {}",
            if found.is_some() {
                "feasible"
            } else {
                "infeasible"
            }
        );
        Ok(found.map(|mut s| {
            s.delta = Some(delta);
            s
        }))
    };

    let (mut lo, mut hi) = (0u64, inst.total_cost());
    let mut best = probe(hi)?.ok_or(PvcError::UnexpectedInfeasible)?;
    while lo < hi {
        let mid = lo + (hi - lo) / 2;
        match probe(mid)? {
            Some(sol) => {
                hi = mid;
                best = sol;
            }
            None => lo = mid + 1,
        }
    }
    log::debug!("delta search accepted {hi} after {probes} probes");
    Ok(best)
}

/// Alternates LP solves and separation until the point is clean. Returns
/// `None` when the LP becomes infeasible (only possible under a cost cap).
fn cutting_plane(
    inst: &Instance,
    mut lp: LinearProgram,
    cap: Option<f64>,
) -> Result<Option<FractionalSolution>, PvcError> {
    let limit = cut_limit(inst);
    let empty = VertexSet::empty(inst.num_vertices());
    let mut pool: HashSet<(usize, VertexSet)> = HashSet::new();
    let mut certificate = Vec::new();
    for i in 0..inst.num_groups() {
        if let Some(c) = build_kc_constraint(inst, i, &empty) {
            lp.add_row(c.to_row())?;
            pool.insert(c.key());
            certificate.push(c);
        }
    }

    let mut cuts = Vec::new();
    let mut trace = Vec::new();
    let mut lp_solves = 0;
    loop {
        let out = lp_solve(&lp)?;
        lp_solves += 1;
        if out.status == LpStatus::Infeasible {
            return Ok(None);
        }
        trace.push(out.value);
        let x = out.x;

        let violated = violated_rows(inst, &x, EPS_FEAS);
        let fresh: Vec<KnapsackCoverConstraint> = violated
            .iter()
            .filter(|c| !pool.contains(&c.key()))
            .cloned()
            .collect();
        if fresh.is_empty() {
            // Only rows the LP already holds can still read as violated here.
            let tol = if violated.is_empty() {
                EPS_FEAS
            } else {
                10.0 * EPS_FEAS
            };
            if !separate_tol(inst, &x, cap, tol).is_clean() {
                return Err(PvcError::Stalled);
            }
            let objective = cost_of(inst, &x);
            let a = threshold_set(&x);
            for i in 0..inst.num_groups() {
                if let Some(c) = build_kc_constraint(inst, i, &a) {
                    if pool.insert(c.key()) {
                        certificate.push(c);
                    }
                }
            }
            return Ok(Some(FractionalSolution {
                x,
                objective,
                certificate,
                trace,
                cuts,
                lp_solves,
                delta: None,
            }));
        }

        for c in fresh {
            if cuts.len() >= limit {
                return Err(PvcError::CutLimit { limit });
            }
            let record = CutRecord {
                group: c.group,
                suppressed_size: c.suppressed.len(),
                rhs: c.rhs,
                lhs_at_violation: c.lhs(&x),
            };
            log::debug!("{record}");
            lp.add_row(c.to_row())?;
            pool.insert(c.key());
            certificate.push(c);
            cuts.push(record);
        }
    }
}

/// Optimal solution of the natural relaxation with edge variables.
#[derive(Debug, Clone, PartialEq)]
pub struct Lp1Solution {
    pub x: Vec<f64>,
    /// Edge coverage variables, indexed by edge id.
    pub y: Vec<f64>,
    pub objective: f64,
}

/// Natural relaxation: `x_u + x_v ≥ y_e` for every edge and
/// `Σ_{e ∈ P_i} w_e y_e ≥ target_i` for every group.
pub fn solve_lp1(inst: &Instance) -> Result<Lp1Solution, PvcError> {
    let n = inst.num_vertices();
    let m = inst.num_edges();
    let mut objective: Vec<f64> = inst.costs().iter().map(|&c| c as f64).collect();
    objective.extend(std::iter::repeat_n(0.0, m));
    let mut lp = LinearProgram::new(objective);
    for (id, e) in inst.edges().iter().enumerate() {
        lp.add_row(Row::ge(vec![(e.u, 1.0), (e.v, 1.0), (n + id, -1.0)], 0.0))?;
    }
    for g in inst.groups() {
        if g.target > 0 {
            let coeffs = g
                .edges
                .iter()
                .map(|&e| (n + e, inst.edge(e).weight as f64))
                .collect();
            lp.add_row(Row::ge(coeffs, g.target as f64))?;
        }
    }
    let out = lp_solve(&lp)?;
    if out.status == LpStatus::Infeasible {
        return Err(PvcError::UnexpectedInfeasible);
    }
    let (x, y) = out.x.split_at(n);
    Ok(Lp1Solution {
        x: x.to_vec(),
        y: y.to_vec(),
        objective: out.value,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::instance::{generate_star, Edge};

    fn path() -> Instance {
        Instance::new(
            vec![1, 1, 1],
            vec![Edge::new(0, 1, 1), Edge::new(1, 2, 1)],
            vec![(vec![0, 1], 2)],
            true,
        )
        .unwrap()
    }

    #[test]
    fn residual_examples() {
        let p = path();
        assert_eq!(residual(&p, 0, &VertexSet::empty(3)), 2);
        assert_eq!(residual(&p, 0, &VertexSet::from_ids(3, [1])), 0);
        let s = generate_star(5);
        assert_eq!(residual(&s, 0, &VertexSet::from_ids(6, [3])), 0);
    }

    #[test]
    fn wdeg_examples() {
        let s = generate_star(5);
        assert_eq!(wdeg(&s, 0, 0, &VertexSet::empty(6)), Ok(5));
        assert_eq!(wdeg(&s, 0, 0, &VertexSet::from_ids(6, [1, 2])), Ok(3));
        assert_eq!(wdeg(&s, 0, 4, &VertexSet::empty(6)), Ok(1));
        assert_eq!(
            wdeg(&s, 0, 0, &VertexSet::from_ids(6, [0])),
            Err(PvcError::SuppressedVertex { vertex: 0 })
        );
    }

    #[test]
    fn kc_rows_on_star_and_path() {
        let s = generate_star(5);
        let c = build_kc_constraint(&s, 0, &VertexSet::empty(6)).unwrap();
        assert_eq!(c.rhs, 1);
        assert_eq!(c.coefficients, (0..6).map(|v| (v, 1)).collect::<Vec<_>>());

        let p = path();
        let c = build_kc_constraint(&p, 0, &VertexSet::empty(3)).unwrap();
        assert_eq!((c.coefficients, c.rhs), (vec![(0, 1), (1, 2), (2, 1)], 2));
        assert_eq!(
            build_kc_constraint(&p, 0, &VertexSet::from_ids(3, [1])),
            None
        );
    }

    #[test]
    fn separation_on_star_gap_points() {
        let s = generate_star(5);
        let mut x = vec![0.0; 6];
        x[0] = 0.2;
        assert!(separate(&s, &x, None).is_clean());
        x[0] = 0.1;
        let sep = separate(&s, &x, None);
        match sep.outcome {
            SeparationOutcome::Violated(c) => {
                assert_eq!(c.group, 0);
                assert!(c.suppressed.is_empty());
            }
            other => panic!("expected violation, got {other:?}"),
        }
        assert_eq!(sep.empty_set_holds, vec![false]);
    }

    #[test]
    fn separation_cost_cap_and_trivial_points() {
        let s = generate_star(5);
        assert!(separate(&s, &[1.0; 6], Some(6.0)).is_clean());
        assert!(matches!(
            separate(&s, &[1.0; 6], Some(5.0)).outcome,
            SeparationOutcome::CostCap { .. }
        ));
        assert!(matches!(
            separate(&s, &[0.0; 6], None).outcome,
            SeparationOutcome::Violated(_)
        ));
    }

    #[test]
    fn star_values() {
        let s = generate_star(5);
        let sol = solve_pvclp(&s, SolveMode::Direct).unwrap();
        assert!((sol.objective - 1.0).abs() < 1e-6);
        let lp1 = solve_lp1(&s).unwrap();
        assert!((lp1.objective - 0.2).abs() < 1e-6);
        let delta = solve_pvclp(&s, SolveMode::DeltaSearch).unwrap();
        assert_eq!(delta.delta, Some(1));
        assert!((delta.objective - 1.0).abs() < 1e-6);
    }

    #[test]
    fn single_edge_values() {
        let inst = Instance::new(
            vec![3, 5],
            vec![Edge::new(0, 1, 1)],
            vec![(vec![0], 1)],
            true,
        )
        .unwrap();
        let sol = solve_pvclp(&inst, SolveMode::Direct).unwrap();
        assert!((sol.objective - 3.0).abs() < 1e-6);
        assert!((sol.x[0] - 1.0).abs() < 1e-6 && sol.x[1].abs() < 1e-6);
        assert!((solve_lp1(&inst).unwrap().objective - 3.0).abs() < 1e-6);
    }

    #[test]
    fn zero_target_group_adds_no_rows() {
        let inst = Instance::new(
            vec![1, 1],
            vec![Edge::new(0, 1, 1)],
            vec![(vec![0], 0)],
            true,
        )
        .unwrap();
        let sol = solve_pvclp(&inst, SolveMode::Direct).unwrap();
        assert_eq!(sol.objective, 0.0);
        assert!(sol.certificate.is_empty());
    }
}
