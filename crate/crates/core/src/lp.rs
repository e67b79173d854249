//! Small dense LP kernel.
//!
//! Solves `min c·x` subject to `a_i·x ≥ b_i` / `a_i·x ≤ b_i` rows and the box
//! `0 ≤ x ≤ 1`, using a two-phase bounded-variable primal simplex on a dense
//! tableau with Bland's rule. Upper bounds are handled implicitly (a nonbasic
//! variable sits at 0 or at 1) so the box never turns into rows.
//!
//! Each [`lp_solve`] call starts from the slack/artificial basis, so results
//! depend only on the program, never on earlier solves.

use std::fmt;

use thiserror::Error;

/// Primal feasibility tolerance for rows and bounds.
pub const EPS_FEAS: f64 = 1e-7;
/// Optimality tolerance on objective values.
pub const EPS_OPT: f64 = 1e-6;

const PIVOT_TOL: f64 = 1e-9;
const COST_TOL: f64 = 1e-9;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Sense {
    Ge,
    Le,
}

#[derive(Debug, Clone, PartialEq)]
pub struct Row {
    /// Sparse `(variable, coefficient)` pairs.
    pub coeffs: Vec<(usize, f64)>,
    pub sense: Sense,
    pub rhs: f64,
}

impl Row {
    pub fn ge(coeffs: Vec<(usize, f64)>, rhs: f64) -> Self {
        Row {
            coeffs,
            sense: Sense::Ge,
            rhs,
        }
    }

    pub fn le(coeffs: Vec<(usize, f64)>, rhs: f64) -> Self {
        Row {
            coeffs,
            sense: Sense::Le,
            rhs,
        }
    }

    pub fn activity(&self, x: &[f64]) -> f64 {
        self.coeffs.iter().map(|&(j, a)| a * x[j]).sum()
    }

    /// Amount by which `x` violates the row (0 when satisfied).
    pub fn violation(&self, x: &[f64]) -> f64 {
        let act = self.activity(x);
        match self.sense {
            Sense::Ge => (self.rhs - act).max(0.0),
            Sense::Le => (act - self.rhs).max(0.0),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Error)]
pub enum LpError {
    #[error("row references variable {index}, but the program has {num_vars} variables")]
    InvalidIndex { index: usize, num_vars: usize },
    #[error("simplex iteration limit {limit} exceeded")]
    IterationLimit { limit: usize },
    #[error("objective is unbounded below")]
    Unbounded,
    #[error("solution violates row {row} by {violation:e}")]
    Numerical { row: usize, violation: f64 },
}

/// `min objective·x` over rows and the `[0, 1]` box. Rows are append-only.
#[derive(Debug, Clone, PartialEq)]
pub struct LinearProgram {
    objective: Vec<f64>,
    rows: Vec<Row>,
}

impl LinearProgram {
    pub fn new(objective: Vec<f64>) -> Self {
        LinearProgram {
            objective,
            rows: Vec::new(),
        }
    }

    pub fn num_vars(&self) -> usize {
        self.objective.len()
    }

    pub fn num_rows(&self) -> usize {
        self.rows.len()
    }

    pub fn objective(&self) -> &[f64] {
        &self.objective
    }

    pub fn rows(&self) -> &[Row] {
        &self.rows
    }

    pub fn add_row(&mut self, row: Row) -> Result<(), LpError> {
        let num_vars = self.num_vars();
        if let Some(&(index, _)) = row.coeffs.iter().find(|&&(j, _)| j >= num_vars) {
            return Err(LpError::InvalidIndex { index, num_vars });
        }
        self.rows.push(row);
        Ok(())
    }

    pub fn with_row(mut self, row: Row) -> Result<Self, LpError> {
        self.add_row(row)?;
        Ok(self)
    }

    pub fn objective_value(&self, x: &[f64]) -> f64 {
        self.objective.iter().zip(x).map(|(c, v)| c * v).sum()
    }

    /// Simplex iteration cap: 50 per variable plus row.
    pub fn iteration_limit(&self) -> usize {
        50 * (self.num_vars() + self.num_rows()).max(1)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum LpStatus {
    Optimal,
    Infeasible,
}

#[derive(Debug, Clone, PartialEq)]
pub struct LpOutcome {
    pub status: LpStatus,
    /// Objective at `x`; meaningless when infeasible.
    pub value: f64,
    /// Primal point clamped to `[0, 1]`; empty when infeasible.
    pub x: Vec<f64>,
    pub iterations: usize,
}

impl LpOutcome {
    pub fn is_optimal(&self) -> bool {
        self.status == LpStatus::Optimal
    }
}

#[derive(Debug, Clone, Copy, Default)]
pub struct LpOptions {
    /// Dump the tableau through `log::trace!` after every pivot.
    pub verbose: bool,
}

pub fn lp_solve(lp: &LinearProgram) -> Result<LpOutcome, LpError> {
    lp_solve_with(lp, LpOptions::default())
}

pub fn lp_solve_with(lp: &LinearProgram, opts: LpOptions) -> Result<LpOutcome, LpError> {
    let mut tab = Tableau::build(lp);
    let limit = lp.iteration_limit();
    let mut iterations = 0;

    if tab.num_artificial > 0 {
        let phase1: Vec<f64> = (0..tab.num_cols)
            .map(|j| if tab.is_artificial(j) { 1.0 } else { 0.0 })
            .collect();
        tab.run(&phase1, &mut iterations, limit, opts)?;
        let infeasibility: f64 = tab
            .basis
            .iter()
            .zip(tab.basic_values())
            .filter(|(&j, _)| tab.is_artificial(j))
            .map(|(_, v)| v)
            .sum();
        if infeasibility > EPS_FEAS {
            return Ok(LpOutcome {
                status: LpStatus::Infeasible,
                value: f64::NAN,
                x: Vec::new(),
                iterations,
            });
        }
        for j in tab.first_artificial..tab.num_cols {
            tab.upper[j] = 0.0;
        }
    }

    let mut phase2 = vec![0.0; tab.num_cols];
    phase2[..lp.num_vars()].copy_from_slice(lp.objective());
    tab.run(&phase2, &mut iterations, limit, opts)?;

    let mut x = tab.structural_values();
    for v in &mut x {
        *v = v.clamp(0.0, 1.0);
    }
    for (row, r) in lp.rows().iter().enumerate() {
        let violation = r.violation(&x);
        if violation > EPS_FEAS * (1.0 + r.rhs.abs()) {
            return Err(LpError::Numerical { row, violation });
        }
    }
    let value = lp.objective_value(&x);
    Ok(LpOutcome {
        status: LpStatus::Optimal,
        value,
        x,
        iterations,
    })
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
enum VarState {
    Basic,
    AtLower,
    AtUpper,
}

/// Dense tableau `B⁻¹[A | b]` over structural, slack and artificial columns.
struct Tableau {
    num_structural: usize,
    first_artificial: usize,
    num_artificial: usize,
    num_cols: usize,
    /// `rows × (num_cols + 1)`, last column is `B⁻¹b`.
    cells: Vec<Vec<f64>>,
    basis: Vec<usize>,
    state: Vec<VarState>,
    upper: Vec<f64>,
}

impl Tableau {
    fn build(lp: &LinearProgram) -> Self {
        let n = lp.num_vars();
        let rows = lp.num_rows();
        // Rows whose slack cannot start basic at a nonnegative value get an artificial.
        let needs_art: Vec<bool> = lp
            .rows()
            .iter()
            .map(|r| match r.sense {
                Sense::Ge => r.rhs > 0.0,
                Sense::Le => r.rhs < 0.0,
            })
            .collect();
        let num_artificial = needs_art.iter().filter(|&&b| b).count();
        let first_artificial = n + rows;
        let num_cols = first_artificial + num_artificial;

        let mut cells = vec![vec![0.0; num_cols + 1]; rows];
        let mut basis = vec![0; rows];
        let mut state = vec![VarState::AtLower; num_cols];
        let mut upper = vec![f64::INFINITY; num_cols];
        upper[..n].fill(1.0);

        let mut next_art = first_artificial;
        for (i, r) in lp.rows().iter().enumerate() {
            let slack_sign = match r.sense {
                Sense::Ge => -1.0,
                Sense::Le => 1.0,
            };
            // Scale the row so its basic column carries +1.
            let scale = if needs_art[i] {
                r.rhs.signum()
            } else {
                slack_sign
            };
            let line = &mut cells[i];
            for &(j, a) in &r.coeffs {
                line[j] += scale * a;
            }
            line[n + i] = scale * slack_sign;
            line[num_cols] = scale * r.rhs;
            if needs_art[i] {
                line[next_art] = 1.0;
                basis[i] = next_art;
                next_art += 1;
            } else {
                basis[i] = n + i;
            }
            state[basis[i]] = VarState::Basic;
        }

        Tableau {
            num_structural: n,
            first_artificial,
            num_artificial,
            num_cols,
            cells,
            basis,
            state,
            upper,
        }
    }

    #[inline]
    fn is_artificial(&self, j: usize) -> bool {
        j >= self.first_artificial
    }

    fn nonbasic_value(&self, j: usize) -> f64 {
        match self.state[j] {
            VarState::AtUpper => self.upper[j],
            _ => 0.0,
        }
    }

    /// Current values of the basic variables, row by row.
    fn basic_values(&self) -> Vec<f64> {
        let at_upper: Vec<usize> = (0..self.num_cols)
            .filter(|&j| self.state[j] == VarState::AtUpper)
            .collect();
        self.cells
            .iter()
            .map(|line| {
                let mut v = line[self.num_cols];
                for &j in &at_upper {
                    v -= line[j] * self.upper[j];
                }
                v
            })
            .collect()
    }

    fn structural_values(&self) -> Vec<f64> {
        let mut x: Vec<f64> = (0..self.num_structural)
            .map(|j| self.nonbasic_value(j))
            .collect();
        for (i, v) in self.basic_values().into_iter().enumerate() {
            if self.basis[i] < self.num_structural {
                x[self.basis[i]] = v;
            }
        }
        x
    }

    fn run(
        &mut self,
        cost: &[f64],
        iterations: &mut usize,
        limit: usize,
        opts: LpOptions,
    ) -> Result<(), LpError> {
        loop {
            if opts.verbose {
                log::trace!("simplex iteration {}\n{}", iterations, self);
            }
            let Some((enter, increase)) = self.entering(cost) else {
                return Ok(());
            };
            if *iterations >= limit {
                return Err(LpError::IterationLimit { limit });
            }
            *iterations += 1;

            let beta = self.basic_values();
            let dir = if increase { 1.0 } else { -1.0 };
            // Moving the entering variable by dir·t changes basic row i by rate_i·t.
            let mut step = self.upper[enter];
            let mut leave: Option<(usize, VarState)> = None;
            for (i, line) in self.cells.iter().enumerate() {
                let rate = -dir * line[enter];
                let bvar = self.basis[i];
                let (limit_i, bound) = if rate < -PIVOT_TOL {
                    ((beta[i] / -rate).max(0.0), VarState::AtLower)
                } else if rate > PIVOT_TOL && self.upper[bvar].is_finite() {
                    (
                        ((self.upper[bvar] - beta[i]) / rate).max(0.0),
                        VarState::AtUpper,
                    )
                } else {
                    continue;
                };
                let better = match leave {
                    None => limit_i < step,
                    Some((r, _)) => {
                        limit_i < step - PIVOT_TOL
                            || (limit_i <= step + PIVOT_TOL && bvar < self.basis[r])
                    }
                };
                if better {
                    step = limit_i;
                    leave = Some((i, bound));
                }
            }

            match leave {
                None if step.is_infinite() => return Err(LpError::Unbounded),
                None => {
                    self.state[enter] = if increase {
                        VarState::AtUpper
                    } else {
                        VarState::AtLower
                    };
                }
                Some((r, bound)) => {
                    let leaving = self.basis[r];
                    self.pivot(r, enter);
                    self.state[leaving] = bound;
                }
            }
        }
    }

    /// Bland's rule: the lowest-index nonbasic column with an improving
    /// reduced cost. Returns the column and whether it increases.
    fn entering(&self, cost: &[f64]) -> Option<(usize, bool)> {
        (0..self.num_cols).find_map(|j| {
            if self.state[j] == VarState::Basic || self.upper[j] <= 0.0 {
                return None;
            }
            let mut reduced = cost[j];
            for (i, line) in self.cells.iter().enumerate() {
                reduced -= cost[self.basis[i]] * line[j];
            }
            match self.state[j] {
                VarState::AtLower if reduced < -COST_TOL => Some((j, true)),
                VarState::AtUpper if reduced > COST_TOL => Some((j, false)),
                _ => None,
            }
        })
    }

    fn pivot(&mut self, r: usize, enter: usize) {
        let width = self.num_cols + 1;
        let p = self.cells[r][enter];
        for k in 0..width {
            self.cells[r][k] /= p;
        }
        let pivot_row = self.cells[r].clone();
        for (i, line) in self.cells.iter_mut().enumerate() {
            if i == r {
                continue;
            }
            let f = line[enter];
            if f != 0.0 {
                for k in 0..width {
                    line[k] -= f * pivot_row[k];
                }
                line[enter] = 0.0;
            }
        }
        self.basis[r] = enter;
        self.state[enter] = VarState::Basic;
    }
}

impl fmt::Display for Tableau {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let beta = self.basic_values();
        for (i, line) in self.cells.iter().enumerate() {
            write!(f, "x{:<4}= {:>10.6} |", self.basis[i], beta[i])?;
            for v in &line[..self.num_cols] {
                write!(f, " {v:>8.4}")?;
            }
            writeln!(f, " | {:>10.6}", line[self.num_cols])?;
        }
        write!(f, "at upper:")?;
        for j in (0..self.num_cols).filter(|&j| self.state[j] == VarState::AtUpper) {
            write!(f, " x{j}")?;
        }
        writeln!(f)
    }
}
