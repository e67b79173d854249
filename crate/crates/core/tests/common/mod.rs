//! Independent oracles for integration and acceptance tests.
//!
//! None of these call the solver paths they are used to check: coverage,
//! knapsack-cover coefficients and LP optima are recomputed from scratch.

#![allow(dead_code)]

use pvc_core::instance::{
    generate_random, GroupAssignment, Instance, RandomConfig, SetCoverInstance,
};
use pvc_core::lp::{Row, Sense};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

pub fn rng(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

/// Covered weight per group for the vertex bitmask `mask`.
pub fn coverage_mask(inst: &Instance, mask: u64) -> Vec<u64> {
    let hit = |v: usize| mask >> v & 1 == 1;
    inst.groups()
        .iter()
        .map(|g| {
            g.edges
                .iter()
                .map(|&e| inst.edge(e))
                .filter(|e| hit(e.u) || hit(e.v))
                .map(|e| e.weight)
                .sum()
        })
        .collect()
}

pub fn feasible_mask(inst: &Instance, mask: u64) -> bool {
    coverage_mask(inst, mask)
        .iter()
        .zip(inst.groups())
        .all(|(&c, g)| c >= g.target)
}

/// Exhaustive optimum with the lexicographically smallest sorted id list
/// among optimal sets.
pub fn brute_force_exact(inst: &Instance) -> (u64, Vec<usize>) {
    let n = inst.num_vertices();
    assert!(n <= 20, "brute force is exponential");
    let mut best: Option<(u64, Vec<usize>)> = None;
    for mask in 0..(1u64 << n) {
        if !feasible_mask(inst, mask) {
            continue;
        }
        let ids: Vec<usize> = (0..n).filter(|&v| mask >> v & 1 == 1).collect();
        let cost = ids.iter().map(|&v| inst.cost(v)).sum();
        let better = match &best {
            None => true,
            Some((b, set)) => cost < *b || (cost == *b && ids < *set),
        };
        if better {
            best = Some((cost, ids));
        }
    }
    best.expect("the full vertex set is feasible")
}

pub fn brute_force_set_cover(sc: &SetCoverInstance) -> u64 {
    let m = sc.num_sets();
    (0..(1u64 << m))
        .filter(|mask| {
            (0..sc.universe())
                .all(|el| (0..m).any(|s| mask >> s & 1 == 1 && sc.sets()[s].contains(&el)))
        })
        .map(|mask| {
            (0..m)
                .filter(|&s| mask >> s & 1 == 1)
                .map(|s| sc.costs()[s])
                .sum()
        })
        .min()
        .expect("every element is coverable")
}

/// Knapsack-cover row for group `g` and suppressed mask `a`, computed edge by
/// edge: returns (coefficient per vertex, residual). Vertices in `a` get 0.
pub fn kc_oracle(inst: &Instance, g: usize, a: u64) -> (Vec<u64>, u64) {
    let n = inst.num_vertices();
    let in_a = |v: usize| a >> v & 1 == 1;
    let group = inst.group(g);
    let covered: u64 = group
        .edges
        .iter()
        .map(|&e| inst.edge(e))
        .filter(|e| in_a(e.u) || in_a(e.v))
        .map(|e| e.weight)
        .sum();
    let k = group.target.saturating_sub(covered);
    let mut deg = vec![0u64; n];
    for &e in &group.edges {
        let e = inst.edge(e);
        if in_a(e.u) || in_a(e.v) {
            continue;
        }
        deg[e.u] += e.weight;
        deg[e.v] += e.weight;
    }
    (
        (0..n)
            .map(|v| if in_a(v) { 0 } else { deg[v].min(k) })
            .collect(),
        k,
    )
}

/// Every knapsack-cover row over all suppressed sets, as LP rows.
pub fn full_family_rows(inst: &Instance) -> Vec<Row> {
    let n = inst.num_vertices();
    assert!(n <= 14, "full family is exponential");
    let mut rows = Vec::new();
    for g in 0..inst.num_groups() {
        for a in 0..(1u64 << n) {
            let (coef, k) = kc_oracle(inst, g, a);
            if k > 0 {
                let coeffs = coef
                    .iter()
                    .enumerate()
                    .filter(|(_, &c)| c > 0)
                    .map(|(v, &c)| (v, c as f64))
                    .collect();
                rows.push(Row::ge(coeffs, k as f64));
            }
        }
    }
    rows
}

/// Minimum of `c·x` over `rows` and `0 ≤ x ≤ 1` by enumerating every basic
/// solution. `None` when infeasible.
pub fn vertex_enumeration(c: &[f64], rows: &[Row]) -> Option<(f64, Vec<f64>)> {
    let n = c.len();
    // Hyperplanes: each row at equality, then x_j = 0, then x_j = 1.
    let mut planes: Vec<(Vec<f64>, f64)> = rows
        .iter()
        .map(|r| {
            let mut a = vec![0.0; n];
            for &(j, v) in &r.coeffs {
                a[j] += v;
            }
            (a, r.rhs)
        })
        .collect();
    for j in 0..n {
        for b in [0.0, 1.0] {
            let mut a = vec![0.0; n];
            a[j] = 1.0;
            planes.push((a, b));
        }
    }
    let mut best: Option<(f64, Vec<f64>)> = None;
    for combo in combinations(planes.len(), n) {
        let a: Vec<Vec<f64>> = combo.iter().map(|&i| planes[i].0.clone()).collect();
        let b: Vec<f64> = combo.iter().map(|&i| planes[i].1).collect();
        let Some(x) = gauss_solve(a, b) else { continue };
        if !point_feasible(&x, rows, 1e-9) {
            continue;
        }
        let val: f64 = c.iter().zip(&x).map(|(a, b)| a * b).sum();
        if best.as_ref().is_none_or(|(bv, _)| val < *bv) {
            best = Some((val, x));
        }
    }
    best
}

pub fn point_feasible(x: &[f64], rows: &[Row], tol: f64) -> bool {
    x.iter().all(|&v| (-tol..=1.0 + tol).contains(&v))
        && rows.iter().all(|r| {
            let act: f64 = r.coeffs.iter().map(|&(j, v)| v * x[j]).sum();
            match r.sense {
                Sense::Ge => act >= r.rhs - tol * (1.0 + r.rhs.abs()),
                Sense::Le => act <= r.rhs + tol * (1.0 + r.rhs.abs()),
            }
        })
}

fn combinations(n: usize, k: usize) -> Vec<Vec<usize>> {
    let mut out = Vec::new();
    let mut cur = Vec::with_capacity(k);
    fn rec(start: usize, n: usize, k: usize, cur: &mut Vec<usize>, out: &mut Vec<Vec<usize>>) {
        if cur.len() == k {
            out.push(cur.clone());
            return;
        }
        for i in start..n {
            cur.push(i);
            rec(i + 1, n, k, cur, out);
            cur.pop();
        }
    }
    rec(0, n, k, &mut cur, &mut out);
    out
}

/// Gaussian elimination with partial pivoting; `None` if singular.
fn gauss_solve(mut a: Vec<Vec<f64>>, mut b: Vec<f64>) -> Option<Vec<f64>> {
    let n = b.len();
    for col in 0..n {
        let piv = (col..n).max_by(|&i, &j| a[i][col].abs().total_cmp(&a[j][col].abs()))?;
        if a[piv][col].abs() < 1e-9 {
            return None;
        }
        a.swap(col, piv);
        b.swap(col, piv);
        for row in 0..n {
            if row != col {
                let f = a[row][col] / a[col][col];
                if f != 0.0 {
                    let pivot = a[col].clone();
                    for (dst, src) in a[row].iter_mut().zip(&pivot).skip(col) {
                        *dst -= f * src;
                    }
                    b[row] -= f * b[col];
                }
            }
        }
    }
    Some((0..n).map(|i| b[i] / a[i][i]).collect())
}

/// Random LP with `vars` variables and `rows` rows, small integer data.
pub fn random_lp(seed: u64, vars: usize, rows: usize) -> (Vec<f64>, Vec<Row>) {
    let mut r = rng(seed);
    let c: Vec<f64> = (0..vars).map(|_| r.gen_range(-5i32..=5) as f64).collect();
    let p: Vec<f64> = (0..vars).map(|_| r.gen_range(0.0..1.0)).collect();
    let rows = (0..rows)
        .map(|_| {
            let coeffs: Vec<(usize, f64)> = (0..vars)
                .map(|j| (j, r.gen_range(-3i32..=3) as f64))
                .filter(|&(_, v)| v != 0.0)
                .collect();
            let act: f64 = coeffs.iter().map(|&(j, v)| v * p[j]).sum();
            let rhs = (act.round() + r.gen_range(-1i32..=1) as f64).max(-6.0);
            if r.gen_bool(0.7) {
                Row::ge(coeffs, rhs)
            } else {
                Row::le(coeffs, rhs)
            }
        })
        .collect();
    (c, rows)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Variant {
    Unweighted,
    Weighted,
    Overlapping,
}

impl Variant {
    pub fn label(self) -> &'static str {
        match self {
            Variant::Unweighted => "unweighted",
            Variant::Weighted => "weighted",
            Variant::Overlapping => "overlapping",
        }
    }
}

/// Seeded random instance with `n` in `n_range`, `r` in `r_range` and
/// between `n` and `2n` edges.
pub fn random_instance(
    seed: u64,
    n_range: (usize, usize),
    r_range: (usize, usize),
    variant: Variant,
) -> Instance {
    let mut r = rng(seed ^ 0x005e_ed0f_1a57);
    let n = r.gen_range(n_range.0..=n_range.1);
    let max_edges = n * (n - 1) / 2;
    let groups = r.gen_range(r_range.0..=r_range.1);
    let m = r
        .gen_range(n.max(groups)..=(2 * n).max(groups))
        .min(max_edges)
        .max(groups);
    let mut cfg = RandomConfig::new(n, m, groups);
    cfg.assignment = GroupAssignment::Random;
    match variant {
        Variant::Unweighted => {}
        Variant::Weighted => cfg.weight = (1, 5),
        Variant::Overlapping => cfg.overlap = 0.4,
    }
    generate_random(&cfg, r.gen()).expect("valid random config")
}
