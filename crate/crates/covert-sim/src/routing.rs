//! Beacon-flood routing toward the base station, in two flavors:
//! density-based relay election (degree-weighted, shadow-seeking) and a
//! plain hop-gradient baseline.

use rand::Rng;
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::error::{Error, Result};
use crate::netsim::{is_isolatable, NodeGraph, NodeId};

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum RouteError {
    #[error("source node {0} never heard the beacon")]
    UnreachableSource(NodeId),
    #[error("node {0} has no relay candidates")]
    NoCandidates(NodeId),
    #[error("routing stranded at node {0}: every candidate already visited")]
    CycleDetected(NodeId),
}

/// How a node builds its relay candidate list from the beacon flood.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum CandidateMode {
    /// Only neighbors strictly closer (in hops) to the base station. BFS
    /// layering makes every such neighbor exactly one hop closer, so routes
    /// terminate in `hop(source)` steps.
    #[default]
    StrictBackward,
    /// Every neighbor the beacon reached, regardless of hop count. Routes
    /// can wander and need the visited-set guard; pockets of the graph can
    /// strand them (see [`RouteError::CycleDetected`]).
    Literal,
}

/// Result of flooding a beacon outward from the base station.
#[derive(Clone, Debug)]
pub struct BeaconState {
    bs: NodeId,
    mode: CandidateMode,
    hop: Vec<Option<u32>>,
    candidates: Vec<Vec<NodeId>>,
}

impl BeaconState {
    pub fn bs(&self) -> NodeId {
        self.bs
    }

    pub fn mode(&self) -> CandidateMode {
        self.mode
    }

    /// Hop count from the base station, `None` if the flood never arrived.
    pub fn hop(&self, id: NodeId) -> Option<u32> {
        self.hop[id]
    }

    pub fn candidates(&self, id: NodeId) -> &[NodeId] {
        &self.candidates[id]
    }

    pub fn reached(&self) -> usize {
        self.hop.iter().filter(|h| h.is_some()).count()
    }
}

/// BFS the comm graph outward from `bs`, recording hop counts and each
/// node's relay candidates under `mode`.
pub fn beacon_flood(graph: &NodeGraph, bs: NodeId, mode: CandidateMode) -> Result<BeaconState> {
    let n = graph.len();
    if bs >= n {
        return Err(Error::param(format!(
            "base station id {bs} out of range for a {n}-node graph"
        )));
    }
    let mut hop: Vec<Option<u32>> = vec![None; n];
    hop[bs] = Some(0);
    let mut queue = std::collections::VecDeque::from([bs]);
    while let Some(u) = queue.pop_front() {
        let hu = hop[u].expect("queued nodes have hops");
        for &v in graph.comm_neighbors(u) {
            if hop[v].is_none() {
                hop[v] = Some(hu + 1);
                queue.push_back(v);
            }
        }
    }
    let mut candidates = vec![Vec::new(); n];
    for u in 0..n {
        let Some(hu) = hop[u] else { continue };
        if u == bs {
            continue;
        }
        candidates[u] = graph
            .comm_neighbors(u)
            .iter()
            .copied()
            .filter(|&v| match mode {
                CandidateMode::StrictBackward => hop[v].is_some_and(|hv| hv < hu),
                CandidateMode::Literal => hop[v].is_some(),
            })
            .collect();
    }
    Ok(BeaconState {
        bs,
        mode,
        hop,
        candidates,
    })
}

/// Per-slot transmit probability of a node: `p_max / (1 + e^{−(deg − mean)})`.
/// High-degree nodes — the ones sitting deep in the network's shadow —
/// transmit more readily, capped at `p_max`. Strictly inside `(0, p_max)`
/// mathematically; in floats the cap is reached once `deg − mean ≳ 36`.
pub fn node_tx_prob(degree: usize, mean_degree: f64, p_max: f64) -> Result<f64> {
    if !(p_max > 0.0 && p_max < 1.0) {
        return Err(Error::param(format!("p_max must lie in (0, 1), got {p_max}")));
    }
    if !mean_degree.is_finite() || mean_degree < 0.0 {
        return Err(Error::param(format!(
            "mean degree must be finite and >= 0, got {mean_degree}"
        )));
    }
    Ok(p_max / (1.0 + (-(degree as f64 - mean_degree)).exp()))
}

/// Degree-weighted relay election: candidates are laid out on `(0, Σdeg]`
/// in ascending-degree order (ties by id), and `r0 = 1 − U ∈ (0, 1]` picks
/// the interval containing `r0·Σdeg`. Degree-0 candidates are only eligible
/// when every candidate has degree 0, in which case the draw is uniform.
pub fn select_relay(candidates: &[(NodeId, usize)], rng: &mut impl Rng) -> Result<NodeId> {
    if candidates.is_empty() {
        return Err(Error::param("relay election needs at least one candidate"));
    }
    let mut sorted: Vec<(NodeId, usize)> = candidates.to_vec();
    sorted.sort_unstable_by(|a, b| a.1.cmp(&b.1).then(a.0.cmp(&b.0)));
    let total: usize = sorted.iter().map(|c| c.1).sum();
    let weights: Vec<f64> = if total == 0 {
        vec![1.0; sorted.len()]
    } else {
        sorted.retain(|c| c.1 > 0);
        sorted.iter().map(|c| c.1 as f64).collect()
    };
    let span: f64 = weights.iter().sum();
    let r0 = 1.0 - rng.gen::<f64>();
    let target = r0 * span;
    let mut cum = 0.0;
    for (c, w) in sorted.iter().zip(&weights) {
        cum += w;
        if target <= cum {
            return Ok(c.0);
        }
    }
    Ok(sorted.last().expect("nonempty").0)
}

/// A route from source to base station, inclusive of both endpoints.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct RoutePath {
    pub nodes: Vec<NodeId>,
}

impl RoutePath {
    pub fn source(&self) -> NodeId {
        self.nodes[0]
    }

    pub fn destination(&self) -> NodeId {
        *self.nodes.last().expect("paths are never empty")
    }

    pub fn len(&self) -> usize {
        self.nodes.len()
    }

    pub fn is_empty(&self) -> bool {
        self.nodes.is_empty()
    }

    /// Intermediate relays — everything strictly between the endpoints.
    pub fn relays(&self) -> &[NodeId] {
        if self.nodes.len() <= 2 {
            &[]
        } else {
            &self.nodes[1..self.nodes.len() - 1]
        }
    }
}

/// Density-based routing: each hop holds a degree-weighted election among
/// its beacon candidates (minus already-visited nodes).
pub fn route_dbr(
    graph: &NodeGraph,
    beacon: &BeaconState,
    source: NodeId,
    rng: &mut impl Rng,
) -> Result<RoutePath> {
    let n = graph.len();
    if source >= n {
        return Err(Error::param(format!(
            "source id {source} out of range for a {n}-node graph"
        )));
    }
    if beacon.hop(source).is_none() {
        return Err(RouteError::UnreachableSource(source).into());
    }
    let mut visited = vec![false; n];
    let mut nodes = vec![source];
    visited[source] = true;
    let mut current = source;
    while current != beacon.bs() {
        let pool: Vec<(NodeId, usize)> = beacon
            .candidates(current)
            .iter()
            .copied()
            .filter(|&v| !visited[v])
            .map(|v| (v, graph.degree(v)))
            .collect();
        if pool.is_empty() {
            return Err(if beacon.candidates(current).is_empty() {
                RouteError::NoCandidates(current).into()
            } else {
                RouteError::CycleDetected(current).into()
            });
        }
        let next = select_relay(&pool, rng)?;
        visited[next] = true;
        nodes.push(next);
        current = next;
    }
    Ok(RoutePath { nodes })
}

/// Gradient-based baseline: each hop picks uniformly among the neighbors
/// exactly one hop closer to the base station, regardless of the beacon's
/// candidate mode. Route length is always `hop(source) + 1` nodes.
pub fn route_gbr(
    graph: &NodeGraph,
    beacon: &BeaconState,
    source: NodeId,
    rng: &mut impl Rng,
) -> Result<RoutePath> {
    let n = graph.len();
    if source >= n {
        return Err(Error::param(format!(
            "source id {source} out of range for a {n}-node graph"
        )));
    }
    if beacon.hop(source).is_none() {
        return Err(RouteError::UnreachableSource(source).into());
    }
    let mut nodes = vec![source];
    let mut current = source;
    while current != beacon.bs() {
        let hu = beacon.hop(current).expect("on-path nodes are reached");
        let backward: Vec<NodeId> = graph
            .comm_neighbors(current)
            .iter()
            .copied()
            .filter(|&v| beacon.hop(v).is_some_and(|hv| hv + 1 == hu))
            .collect();
        if backward.is_empty() {
            return Err(RouteError::NoCandidates(current).into());
        }
        current = backward[rng.gen_range(0..backward.len())];
        nodes.push(current);
    }
    Ok(RoutePath { nodes })
}

/// Fraction of a path's intermediate relays that a warden can NOT test in
/// isolation. Paths with no intermediate relays are vacuously secure (1.0).
pub fn secure_relay_ratio(
    graph: &NodeGraph,
    path: &RoutePath,
    d_link: f64,
    min_test_span: f64,
) -> Result<f64> {
    let relays = path.relays();
    if relays.is_empty() {
        return Ok(1.0);
    }
    let mut shielded = 0usize;
    for &r in relays {
        if !is_isolatable(graph, r, d_link, min_test_span)? {
            shielded += 1;
        }
    }
    Ok(shielded as f64 / relays.len() as f64)
}

/// One row per hop of a rendered route, ready for CSV export.
#[derive(Clone, Debug)]
pub struct PathHop {
    pub order: usize,
    pub node: NodeId,
    pub x: f64,
    pub y: f64,
    pub degree: usize,
    pub tx_prob: f64,
    pub isolatable: bool,
}

pub fn export_path(
    graph: &NodeGraph,
    path: &RoutePath,
    p_max: f64,
    d_link: f64,
    min_test_span: f64,
) -> Result<Vec<PathHop>> {
    let mean = graph.mean_degree();
    path.nodes
        .iter()
        .enumerate()
        .map(|(order, &node)| {
            let (x, y) = graph.position(node);
            Ok(PathHop {
                order,
                node,
                x,
                y,
                degree: graph.degree(node),
                tx_prob: node_tx_prob(graph.degree(node), mean, p_max)?,
                isolatable: is_isolatable(graph, node, d_link, min_test_span)?,
            })
        })
        .collect()
}
