//! Cost-effectiveness greedy baseline.
//!
//! The gain of a vertex is `Σ_i min(new weight it covers in group i,
//! residual of group i)`. Zero-cost vertices with positive gain are taken
//! first; afterwards the vertex with the largest gain per unit cost is added
//! (lowest id on ties) until every group is met. No approximation guarantee
//! is claimed.

use std::cmp::Ordering;

use crate::instance::{Instance, VertexId, VertexSet};
use crate::rounding::VertexSelection;

pub fn greedy_solve(inst: &Instance) -> VertexSelection {
    let n = inst.num_vertices();
    let mut incident = vec![Vec::new(); n];
    for (id, e) in inst.edges().iter().enumerate() {
        incident[e.u].push(id);
        incident[e.v].push(id);
    }
    let mut groups_of_edge = vec![Vec::new(); inst.num_edges()];
    for (gid, g) in inst.groups().iter().enumerate() {
        for &e in &g.edges {
            groups_of_edge[e].push(gid);
        }
    }

    let mut chosen = VertexSet::empty(n);
    let mut edge_covered = vec![false; inst.num_edges()];
    let mut covered = vec![0u64; inst.num_groups()];

    let gain = |v: VertexId, edge_covered: &[bool], covered: &[u64]| -> u64 {
        let mut fresh = vec![0u64; inst.num_groups()];
        for &e in &incident[v] {
            if !edge_covered[e] {
                for &g in &groups_of_edge[e] {
                    fresh[g] += inst.edge(e).weight;
                }
            }
        }
        fresh
            .iter()
            .zip(covered)
            .zip(inst.groups())
            .map(|((&f, &c), g)| f.min(g.target.saturating_sub(c)))
            .sum()
    };
    let take =
        |v: VertexId, chosen: &mut VertexSet, edge_covered: &mut [bool], covered: &mut [u64]| {
            chosen.insert(v);
            for &e in &incident[v] {
                if !edge_covered[e] {
                    edge_covered[e] = true;
                    for &g in &groups_of_edge[e] {
                        covered[g] += inst.edge(e).weight;
                    }
                }
            }
        };
    let done = |covered: &[u64]| {
        covered
            .iter()
            .zip(inst.groups())
            .all(|(&c, g)| c >= g.target)
    };

    for v in 0..n {
        if inst.cost(v) == 0 && gain(v, &edge_covered, &covered) > 0 {
            take(v, &mut chosen, &mut edge_covered, &mut covered);
        }
    }

    while !done(&covered) {
        let mut best: Option<(VertexId, u64)> = None;
        for v in (0..n).filter(|&v| !chosen.contains(v)) {
            let g = gain(v, &edge_covered, &covered);
            if g == 0 {
                continue;
            }
            let better = match best {
                None => true,
                // g / c_v > bg / c_b, compared exactly.
                Some((b, bg)) => {
                    (g as u128 * inst.cost(b) as u128).cmp(&(bg as u128 * inst.cost(v) as u128))
                        == Ordering::Greater
                }
            };
            if better {
                best = Some((v, g));
            }
        }
        let (v, _) = best.expect("an unmet group always has a vertex with positive gain");
        take(v, &mut chosen, &mut edge_covered, &mut covered);
    }

    VertexSelection::new(inst, chosen)
}
