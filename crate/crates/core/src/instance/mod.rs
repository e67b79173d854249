//! Problem data model for partition vertex cover.
//!
//! An [`Instance`] is an undirected multigraph with integer vertex costs and
//! positive integer edge weights, plus a list of edge groups. Each group asks
//! for a minimum covered weight. The unweighted problem is the special case
//! where every weight is 1 and the target is an edge count; groups may overlap
//! unless the strict partition check is requested.

mod format;
mod generate;

use std::fmt;

use thiserror::Error;

pub use format::{
    parse_instance, parse_set_cover, serialize_instance, serialize_set_cover, ParseError,
    ParseErrorKind,
};
pub use generate::{
    generate_random, generate_star, heavy_sentinel_cost, reduce_set_cover, ConfigError,
    GroupAssignment, RandomConfig,
};

pub type VertexId = usize;
pub type EdgeId = usize;

/// Why an instance (or set-cover instance) was rejected.
#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum InstanceError {
    #[error("edge {edge} references vertex {vertex}, but the instance has {n} vertices")]
    EndpointOutOfRange {
        edge: EdgeId,
        vertex: VertexId,
        n: usize,
    },
    #[error("edge {edge} is a self-loop on vertex {vertex}")]
    SelfLoop { edge: EdgeId, vertex: VertexId },
    #[error("edge {edge} has weight 0")]
    ZeroWeight { edge: EdgeId },
    #[error("group {group} has no edges")]
    EmptyGroup { group: usize },
    #[error("group {group} references edge {edge}, but the instance has {m} edges")]
    GroupEdgeOutOfRange {
        group: usize,
        edge: EdgeId,
        m: usize,
    },
    #[error("edge {edge} is listed twice in group {group}")]
    DuplicateGroupEdge { group: usize, edge: EdgeId },
    #[error("group {group} target {target} exceeds its total weight {total}")]
    TargetExceedsWeight {
        group: usize,
        target: u64,
        total: u64,
    },
    #[error("strict partition: edge {edge} belongs to groups {first} and {second}")]
    OverlappingGroups {
        edge: EdgeId,
        first: usize,
        second: usize,
    },
    #[error("strict partition: edge {edge} belongs to no group")]
    UncoveredEdge { edge: EdgeId },
    #[error("set-cover element {element} is in no set")]
    UncoverableElement { element: usize },
    #[error("set {set} contains element {element}, but the universe has {universe} elements")]
    ElementOutOfRange {
        set: usize,
        element: usize,
        universe: usize,
    },
    #[error("{what}: expected {expected} entries, got {got}")]
    LengthMismatch {
        what: &'static str,
        expected: usize,
        got: usize,
    },
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub struct Edge {
    pub u: VertexId,
    pub v: VertexId,
    pub weight: u64,
}

impl Edge {
    pub fn new(u: VertexId, v: VertexId, weight: u64) -> Self {
        Edge { u, v, weight }
    }

    #[inline]
    pub fn is_incident(&self, x: VertexId) -> bool {
        self.u == x || self.v == x
    }

    /// The endpoint opposite to `x`. `x` must be an endpoint.
    #[inline]
    pub fn other(&self, x: VertexId) -> VertexId {
        debug_assert!(self.is_incident(x));
        if self.u == x {
            self.v
        } else {
            self.u
        }
    }
}

/// One covering requirement: at least `target` weight out of `edges`.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct Group {
    /// Member edge ids, sorted ascending and free of duplicates.
    pub edges: Vec<EdgeId>,
    pub target: u64,
}

#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct Instance {
    costs: Vec<u64>,
    edges: Vec<Edge>,
    groups: Vec<Group>,
    group_weight: Vec<u64>,
}

impl Instance {
    /// Validates and builds an instance.
    ///
    /// `groups` lists each group's member edges (any order, no repeats) and
    /// its target. With `strict_partition` the groups must also be pairwise
    /// disjoint and jointly cover every edge.
    pub fn new(
        costs: Vec<u64>,
        edges: Vec<Edge>,
        groups: Vec<(Vec<EdgeId>, u64)>,
        strict_partition: bool,
    ) -> Result<Self, InstanceError> {
        let n = costs.len();
        let m = edges.len();
        for (id, e) in edges.iter().enumerate() {
            for x in [e.u, e.v] {
                if x >= n {
                    return Err(InstanceError::EndpointOutOfRange {
                        edge: id,
                        vertex: x,
                        n,
                    });
                }
            }
            if e.u == e.v {
                return Err(InstanceError::SelfLoop {
                    edge: id,
                    vertex: e.u,
                });
            }
            if e.weight == 0 {
                return Err(InstanceError::ZeroWeight { edge: id });
            }
        }

        let mut owner: Vec<Option<usize>> = vec![None; m];
        let mut built = Vec::with_capacity(groups.len());
        let mut group_weight = Vec::with_capacity(groups.len());
        for (gid, (mut members, target)) in groups.into_iter().enumerate() {
            if members.is_empty() {
                return Err(InstanceError::EmptyGroup { group: gid });
            }
            members.sort_unstable();
            for pair in members.windows(2) {
                if pair[0] == pair[1] {
                    return Err(InstanceError::DuplicateGroupEdge {
                        group: gid,
                        edge: pair[0],
                    });
                }
            }
            let mut total = 0u64;
            for &eid in &members {
                if eid >= m {
                    return Err(InstanceError::GroupEdgeOutOfRange {
                        group: gid,
                        edge: eid,
                        m,
                    });
                }
                total += edges[eid].weight;
                if strict_partition {
                    if let Some(first) = owner[eid] {
                        return Err(InstanceError::OverlappingGroups {
                            edge: eid,
                            first,
                            second: gid,
                        });
                    }
                    owner[eid] = Some(gid);
                }
            }
            if target > total {
                return Err(InstanceError::TargetExceedsWeight {
                    group: gid,
                    target,
                    total,
                });
            }
            built.push(Group {
                edges: members,
                target,
            });
            group_weight.push(total);
        }
        if strict_partition {
            if let Some(edge) = owner.iter().position(Option::is_none) {
                return Err(InstanceError::UncoveredEdge { edge });
            }
        }

        Ok(Instance {
            costs,
            edges,
            groups: built,
            group_weight,
        })
    }

    /// Checks the strict partition condition on an already valid instance.
    pub fn check_strict_partition(&self) -> Result<(), InstanceError> {
        let mut owner: Vec<Option<usize>> = vec![None; self.edges.len()];
        for (gid, g) in self.groups.iter().enumerate() {
            for &eid in &g.edges {
                if let Some(first) = owner[eid] {
                    return Err(InstanceError::OverlappingGroups {
                        edge: eid,
                        first,
                        second: gid,
                    });
                }
                owner[eid] = Some(gid);
            }
        }
        match owner.iter().position(Option::is_none) {
            Some(edge) => Err(InstanceError::UncoveredEdge { edge }),
            None => Ok(()),
        }
    }

    #[inline]
    pub fn num_vertices(&self) -> usize {
        self.costs.len()
    }

    #[inline]
    pub fn num_edges(&self) -> usize {
        self.edges.len()
    }

    #[inline]
    pub fn num_groups(&self) -> usize {
        self.groups.len()
    }

    pub fn costs(&self) -> &[u64] {
        &self.costs
    }

    #[inline]
    pub fn cost(&self, v: VertexId) -> u64 {
        self.costs[v]
    }

    pub fn total_cost(&self) -> u64 {
        self.costs.iter().sum()
    }

    pub fn edges(&self) -> &[Edge] {
        &self.edges
    }

    #[inline]
    pub fn edge(&self, e: EdgeId) -> &Edge {
        &self.edges[e]
    }

    pub fn groups(&self) -> &[Group] {
        &self.groups
    }

    #[inline]
    pub fn group(&self, i: usize) -> &Group {
        &self.groups[i]
    }

    #[inline]
    pub fn target(&self, i: usize) -> u64 {
        self.groups[i].target
    }

    /// Total weight of the edges in group `i`.
    #[inline]
    pub fn group_weight(&self, i: usize) -> u64 {
        self.group_weight[i]
    }

    /// Weight of each group's edges that have an endpoint in `chosen`.
    pub fn coverage(&self, chosen: &VertexSet) -> Vec<u64> {
        debug_assert_eq!(chosen.universe(), self.num_vertices());
        self.groups
            .iter()
            .map(|g| {
                g.edges
                    .iter()
                    .map(|&eid| &self.edges[eid])
                    .filter(|e| chosen.contains(e.u) || chosen.contains(e.v))
                    .map(|e| e.weight)
                    .sum()
            })
            .collect()
    }

    pub fn is_feasible(&self, chosen: &VertexSet) -> bool {
        self.coverage(chosen)
            .iter()
            .zip(&self.groups)
            .all(|(&c, g)| c >= g.target)
    }

    pub fn cost_of(&self, chosen: &VertexSet) -> u64 {
        chosen.iter().map(|v| self.costs[v]).sum()
    }
}

/// A subset of the vertices `0..universe`, stored as a membership mask.
#[derive(Clone, PartialEq, Eq, Hash)]
pub struct VertexSet {
    mask: Vec<bool>,
}

impl VertexSet {
    pub fn empty(universe: usize) -> Self {
        VertexSet {
            mask: vec![false; universe],
        }
    }

    pub fn full(universe: usize) -> Self {
        VertexSet {
            mask: vec![true; universe],
        }
    }

    pub fn from_ids<I: IntoIterator<Item = VertexId>>(universe: usize, ids: I) -> Self {
        let mut set = Self::empty(universe);
        for v in ids {
            set.insert(v);
        }
        set
    }

    pub fn from_mask(mask: Vec<bool>) -> Self {
        VertexSet { mask }
    }

    #[inline]
    pub fn universe(&self) -> usize {
        self.mask.len()
    }

    #[inline]
    pub fn contains(&self, v: VertexId) -> bool {
        self.mask[v]
    }

    #[inline]
    pub fn insert(&mut self, v: VertexId) {
        self.mask[v] = true;
    }

    #[inline]
    pub fn remove(&mut self, v: VertexId) {
        self.mask[v] = false;
    }

    pub fn len(&self) -> usize {
        self.mask.iter().filter(|&&b| b).count()
    }

    pub fn is_empty(&self) -> bool {
        !self.mask.iter().any(|&b| b)
    }

    /// Members in ascending order.
    pub fn iter(&self) -> impl Iterator<Item = VertexId> + '_ {
        self.mask
            .iter()
            .enumerate()
            .filter(|(_, &b)| b)
            .map(|(v, _)| v)
    }

    pub fn to_vec(&self) -> Vec<VertexId> {
        self.iter().collect()
    }

    pub fn as_mask(&self) -> &[bool] {
        &self.mask
    }

    pub fn union_with(&mut self, other: &VertexSet) {
        for (a, &b) in self.mask.iter_mut().zip(&other.mask) {
            *a |= b;
        }
    }

    pub fn is_subset(&self, other: &VertexSet) -> bool {
        self.mask.iter().zip(&other.mask).all(|(&a, &b)| !a || b)
    }
}

impl fmt::Debug for VertexSet {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_set().entries(self.iter()).finish()
    }
}

/// Weighted set cover: choose sets of minimum total cost whose union is the
/// universe `0..universe`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct SetCoverInstance {
    universe: usize,
    sets: Vec<Vec<usize>>,
    costs: Vec<u64>,
}

impl SetCoverInstance {
    pub fn new(
        universe: usize,
        sets: Vec<Vec<usize>>,
        costs: Vec<u64>,
    ) -> Result<Self, InstanceError> {
        if sets.len() != costs.len() {
            return Err(InstanceError::LengthMismatch {
                what: "set costs",
                expected: sets.len(),
                got: costs.len(),
            });
        }
        let mut hit = vec![false; universe];
        let mut sorted = Vec::with_capacity(sets.len());
        for (sid, mut s) in sets.into_iter().enumerate() {
            s.sort_unstable();
            s.dedup();
            for &x in &s {
                if x >= universe {
                    return Err(InstanceError::ElementOutOfRange {
                        set: sid,
                        element: x,
                        universe,
                    });
                }
                hit[x] = true;
            }
            sorted.push(s);
        }
        if let Some(element) = hit.iter().position(|&h| !h) {
            return Err(InstanceError::UncoverableElement { element });
        }
        Ok(SetCoverInstance {
            universe,
            sets: sorted,
            costs,
        })
    }

    /// Unit-cost instance.
    pub fn unit(universe: usize, sets: Vec<Vec<usize>>) -> Result<Self, InstanceError> {
        let costs = vec![1; sets.len()];
        Self::new(universe, sets, costs)
    }

    pub fn universe(&self) -> usize {
        self.universe
    }

    pub fn sets(&self) -> &[Vec<usize>] {
        &self.sets
    }

    pub fn costs(&self) -> &[u64] {
        &self.costs
    }

    pub fn num_sets(&self) -> usize {
        self.sets.len()
    }
}
