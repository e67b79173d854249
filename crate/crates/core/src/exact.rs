//! Exact branch-and-bound for small instances.
//!
//! Vertices are decided one at a time, most expensive first. A branch dies
//! when its cost exceeds the incumbent or when some group can no longer reach
//! its target even if every undecided vertex were taken. Among optimal sets
//! the lexicographically smallest sorted id list wins.

use thiserror::Error;

use crate::instance::{Instance, VertexId, VertexSet};

pub const DEFAULT_VERTEX_LIMIT: usize = 24;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum ExactError {
    #[error("instance has {n} vertices, exact mode is limited to {limit}")]
    TooLarge { n: usize, limit: usize },
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ExactResult {
    pub optimum: u64,
    pub chosen: VertexSet,
    pub nodes: u64,
}

pub fn exact_solve(inst: &Instance, limit: usize) -> Result<ExactResult, ExactError> {
    let n = inst.num_vertices();
    if n > limit {
        return Err(ExactError::TooLarge { n, limit });
    }
    let mut search = Search::new(inst);
    search.descend(0, 0);
    let (optimum, ids) = search.best.expect("taking every vertex is always feasible");
    Ok(ExactResult {
        optimum,
        chosen: VertexSet::from_ids(n, ids),
        nodes: search.nodes,
    })
}

struct Search<'a> {
    inst: &'a Instance,
    order: Vec<VertexId>,
    incident: Vec<Vec<usize>>,
    groups_of_edge: Vec<Vec<usize>>,
    chosen_ends: Vec<u8>,
    excluded_ends: Vec<u8>,
    covered: Vec<u64>,
    /// Weight per group of edges that still have an endpoint not excluded.
    reachable: Vec<u64>,
    chosen: Vec<bool>,
    best: Option<(u64, Vec<VertexId>)>,
    nodes: u64,
}

impl<'a> Search<'a> {
    fn new(inst: &'a Instance) -> Self {
        let n = inst.num_vertices();
        let mut order: Vec<VertexId> = (0..n).collect();
        order.sort_by(|&a, &b| inst.cost(b).cmp(&inst.cost(a)).then(a.cmp(&b)));
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
        Search {
            inst,
            order,
            incident,
            groups_of_edge,
            chosen_ends: vec![0; inst.num_edges()],
            excluded_ends: vec![0; inst.num_edges()],
            covered: vec![0; inst.num_groups()],
            reachable: (0..inst.num_groups())
                .map(|i| inst.group_weight(i))
                .collect(),
            chosen: vec![false; n],
            best: None,
            nodes: 0,
        }
    }

    fn feasible(&self) -> bool {
        self.covered
            .iter()
            .zip(self.inst.groups())
            .all(|(&c, g)| c >= g.target)
    }

    fn reachable_ok(&self) -> bool {
        self.reachable
            .iter()
            .zip(self.inst.groups())
            .all(|(&p, g)| p >= g.target)
    }

    fn descend(&mut self, depth: usize, cost: u64) {
        self.nodes += 1;
        if let Some((best, _)) = &self.best {
            if cost > *best {
                return;
            }
        }
        if !self.reachable_ok() {
            return;
        }
        if depth == self.order.len() {
            debug_assert!(self.feasible());
            let ids: Vec<VertexId> = (0..self.chosen.len()).filter(|&v| self.chosen[v]).collect();
            let better = match &self.best {
                None => true,
                Some((b, set)) => cost < *b || (cost == *b && ids < *set),
            };
            if better {
                self.best = Some((cost, ids));
            }
            return;
        }
        let v = self.order[depth];
        if self.feasible() {
            self.exclude_branch(v, depth, cost);
            self.include_branch(v, depth, cost);
        } else {
            self.include_branch(v, depth, cost);
            self.exclude_branch(v, depth, cost);
        }
    }

    fn include_branch(&mut self, v: VertexId, depth: usize, cost: u64) {
        let c = self.inst.cost(v);
        if let Some((best, _)) = &self.best {
            if cost + c > *best {
                return;
            }
        }
        self.chosen[v] = true;
        for k in 0..self.incident[v].len() {
            let e = self.incident[v][k];
            if self.chosen_ends[e] == 0 {
                let w = self.inst.edge(e).weight;
                for &g in &self.groups_of_edge[e] {
                    self.covered[g] += w;
                }
            }
            self.chosen_ends[e] += 1;
        }
        self.descend(depth + 1, cost + c);
        for k in 0..self.incident[v].len() {
            let e = self.incident[v][k];
            self.chosen_ends[e] -= 1;
            if self.chosen_ends[e] == 0 {
                let w = self.inst.edge(e).weight;
                for &g in &self.groups_of_edge[e] {
                    self.covered[g] -= w;
                }
            }
        }
        self.chosen[v] = false;
    }

    fn exclude_branch(&mut self, v: VertexId, depth: usize, cost: u64) {
        for k in 0..self.incident[v].len() {
            let e = self.incident[v][k];
            self.excluded_ends[e] += 1;
            if self.excluded_ends[e] == 2 {
                let w = self.inst.edge(e).weight;
                for &g in &self.groups_of_edge[e] {
                    self.reachable[g] -= w;
                }
            }
        }
        self.descend(depth + 1, cost);
        for k in 0..self.incident[v].len() {
            let e = self.incident[v][k];
            if self.excluded_ends[e] == 2 {
                let w = self.inst.edge(e).weight;
                for &g in &self.groups_of_edge[e] {
                    self.reachable[g] += w;
                }
            }
            self.excluded_ends[e] -= 1;
        }
    }
}
