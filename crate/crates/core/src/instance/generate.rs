//! Instance generators: the star gap family, seeded random instances and the
//! set-cover reduction.

use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use thiserror::Error;

use super::{Edge, Instance, SetCoverInstance};

/// Star with `d` leaves: vertex 0 is the center, every cost and weight is 1,
/// and a single group holds all edges with target 1.
pub fn generate_star(d: usize) -> Instance {
    assert!(d >= 1, "star needs at least one leaf");
    let costs = vec![1; d + 1];
    let edges = (1..=d).map(|leaf| Edge::new(0, leaf, 1)).collect();
    Instance::new(costs, edges, vec![((0..d).collect(), 1)], true).expect("star instance is valid")
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum GroupAssignment {
    /// Edge `e` goes to group `e mod r`.
    RoundRobin,
    /// The first `r` edges seed one group each; the rest land uniformly.
    Random,
}

#[derive(Debug, Clone, PartialEq)]
pub struct RandomConfig {
    pub n: usize,
    pub m: usize,
    pub r: usize,
    /// Inclusive vertex cost range.
    pub cost: (u64, u64),
    /// Inclusive edge weight range; 1..=1 gives the unweighted problem.
    pub weight: (u64, u64),
    pub assignment: GroupAssignment,
    /// Probability that an edge is additionally placed in one other group.
    pub overlap: f64,
}

impl RandomConfig {
    pub fn new(n: usize, m: usize, r: usize) -> Self {
        RandomConfig {
            n,
            m,
            r,
            cost: (1, 10),
            weight: (1, 1),
            assignment: GroupAssignment::Random,
            overlap: 0.0,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Error)]
pub enum ConfigError {
    #[error("need at least 2 vertices to place an edge without self-loops, got {0}")]
    TooFewVertices(usize),
    #[error("need m >= r >= 1, got m = {m}, r = {r}")]
    GroupCount { m: usize, r: usize },
    #[error("empty {what} range {lo}..={hi}")]
    EmptyRange {
        what: &'static str,
        lo: u64,
        hi: u64,
    },
    #[error("edge weights must be positive")]
    ZeroWeight,
    #[error("overlap probability {0} is outside [0, 1]")]
    Overlap(f64),
}

/// Seeded random instance. The output depends only on `(cfg, seed)`.
pub fn generate_random(cfg: &RandomConfig, seed: u64) -> Result<Instance, ConfigError> {
    if cfg.n < 2 {
        return Err(ConfigError::TooFewVertices(cfg.n));
    }
    if cfg.r == 0 || cfg.m < cfg.r {
        return Err(ConfigError::GroupCount { m: cfg.m, r: cfg.r });
    }
    if cfg.cost.0 > cfg.cost.1 {
        return Err(ConfigError::EmptyRange {
            what: "cost",
            lo: cfg.cost.0,
            hi: cfg.cost.1,
        });
    }
    if cfg.weight.0 > cfg.weight.1 {
        return Err(ConfigError::EmptyRange {
            what: "weight",
            lo: cfg.weight.0,
            hi: cfg.weight.1,
        });
    }
    if cfg.weight.0 == 0 {
        return Err(ConfigError::ZeroWeight);
    }
    if !(0.0..=1.0).contains(&cfg.overlap) {
        return Err(ConfigError::Overlap(cfg.overlap));
    }

    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let costs: Vec<u64> = (0..cfg.n)
        .map(|_| rng.gen_range(cfg.cost.0..=cfg.cost.1))
        .collect();
    let edges: Vec<Edge> = (0..cfg.m)
        .map(|_| {
            let u = rng.gen_range(0..cfg.n);
            let mut v = rng.gen_range(0..cfg.n - 1);
            if v >= u {
                v += 1;
            }
            Edge::new(u, v, rng.gen_range(cfg.weight.0..=cfg.weight.1))
        })
        .collect();

    let mut members: Vec<Vec<usize>> = vec![Vec::new(); cfg.r];
    let mut home = vec![0usize; cfg.m];
    match cfg.assignment {
        GroupAssignment::RoundRobin => {
            for (e, h) in home.iter_mut().enumerate() {
                *h = e % cfg.r;
            }
        }
        GroupAssignment::Random => {
            let mut order: Vec<usize> = (0..cfg.m).collect();
            order.shuffle(&mut rng);
            for (pos, &e) in order.iter().enumerate() {
                home[e] = if pos < cfg.r {
                    pos
                } else {
                    rng.gen_range(0..cfg.r)
                };
            }
        }
    }
    for (e, &g) in home.iter().enumerate() {
        members[g].push(e);
    }
    if cfg.overlap > 0.0 && cfg.r > 1 {
        for (e, &g) in home.iter().enumerate() {
            if rng.gen_bool(cfg.overlap) {
                let mut extra = rng.gen_range(0..cfg.r - 1);
                if extra >= g {
                    extra += 1;
                }
                members[extra].push(e);
            }
        }
    }

    let groups = members
        .into_iter()
        .map(|list| {
            let total: u64 = list.iter().map(|&e| edges[e].weight).sum();
            let target = rng.gen_range(1..=total);
            (list, target)
        })
        .collect();
    Ok(Instance::new(costs, edges, groups, false)
        .expect("generator output satisfies the invariants"))
}

/// Finite stand-in for an unaffordable vertex: one more than the cost of
/// taking every set.
pub fn heavy_sentinel_cost(sc: &SetCoverInstance) -> u64 {
    1 + sc.costs().iter().sum::<u64>()
}

/// Builds the bipartite partition vertex cover instance of a set-cover input.
///
/// Vertices `0..m` stand for the sets and carry their costs; vertices
/// `m..m + r` stand for the elements and carry [`heavy_sentinel_cost`]. Set
/// `s` and element `u` are joined iff `u ∈ S_s`. Group `u` holds the edges at
/// element vertex `u` and needs one of them covered. Edges are numbered
/// element-major so each group is a contiguous id range.
pub fn reduce_set_cover(sc: &SetCoverInstance) -> Instance {
    let m = sc.num_sets();
    let heavy = heavy_sentinel_cost(sc);
    let mut costs = sc.costs().to_vec();
    costs.extend(std::iter::repeat_n(heavy, sc.universe()));

    let mut containing: Vec<Vec<usize>> = vec![Vec::new(); sc.universe()];
    for (sid, set) in sc.sets().iter().enumerate() {
        for &u in set {
            containing[u].push(sid);
        }
    }
    let mut edges = Vec::new();
    let mut groups = Vec::with_capacity(sc.universe());
    for (u, sets) in containing.iter().enumerate() {
        let first = edges.len();
        for &sid in sets {
            edges.push(Edge::new(sid, m + u, 1));
        }
        groups.push(((first..edges.len()).collect(), 1));
    }
    Instance::new(costs, edges, groups, true).expect("reduction output is a valid strict partition")
}
