//! Dense-network geometry: node placement (uniform, clustered, Poisson),
//! the two-radius graph over the placements, and the closed forms for void
//! probability, isolation radius, and shadow density.

use rand::Rng;
use rand_distr::{Distribution, Normal, Poisson};
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

pub type NodeId = usize;

/// Axis-aligned deployment region `[0, width] × [0, height]`.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct Region {
    pub width: f64,
    pub height: f64,
}

impl Region {
    pub fn new(width: f64, height: f64) -> Result<Self> {
        if !(width > 0.0) || !width.is_finite() || !(height > 0.0) || !height.is_finite() {
            return Err(Error::param(format!(
                "region sides must be finite and > 0, got {width} x {height}"
            )));
        }
        Ok(Region { width, height })
    }

    pub fn area(&self) -> f64 {
        self.width * self.height
    }

    pub fn contains(&self, p: (f64, f64)) -> bool {
        p.0.is_finite()
            && p.1.is_finite()
            && (0.0..=self.width).contains(&p.0)
            && (0.0..=self.height).contains(&p.1)
    }
}

/// One Gaussian cluster for non-uniform placement.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct ClusterSpec {
    pub center: (f64, f64),
    pub std_dev: f64,
    pub weight: f64,
}

fn dist(a: (f64, f64), b: (f64, f64)) -> f64 {
    ((a.0 - b.0).powi(2) + (a.1 - b.1).powi(2)).sqrt()
}

/// Node positions plus two overlaid unit-disk graphs: a short-range "link"
/// graph (who keeps whom from being tested in isolation) and a longer-range
/// "comm" graph (who can relay for whom). Edges are inclusive: `dist ≤ r`.
#[derive(Clone, Debug)]
pub struct NodeGraph {
    region: Region,
    positions: Vec<(f64, f64)>,
    link_radius: f64,
    comm_radius: f64,
    link_adj: Vec<Vec<NodeId>>,
    comm_adj: Vec<Vec<NodeId>>,
}

impl NodeGraph {
    pub fn from_positions(
        region: Region,
        positions: Vec<(f64, f64)>,
        link_radius: f64,
        comm_radius: f64,
    ) -> Result<Self> {
        if !(link_radius > 0.0) || !link_radius.is_finite() {
            return Err(Error::param(format!(
                "link radius must be finite and > 0, got {link_radius}"
            )));
        }
        if !comm_radius.is_finite() || comm_radius < link_radius {
            return Err(Error::param(format!(
                "comm radius must be finite and >= link radius, got {comm_radius}"
            )));
        }
        for (i, &p) in positions.iter().enumerate() {
            if !region.contains(p) {
                return Err(Error::param(format!(
                    "node {i} at ({}, {}) lies outside the {} x {} region",
                    p.0, p.1, region.width, region.height
                )));
            }
        }
        let n = positions.len();
        let mut link_adj = vec![Vec::new(); n];
        let mut comm_adj = vec![Vec::new(); n];
        for i in 0..n {
            for j in (i + 1)..n {
                let d = dist(positions[i], positions[j]);
                if d <= comm_radius {
                    comm_adj[i].push(j);
                    comm_adj[j].push(i);
                    if d <= link_radius {
                        link_adj[i].push(j);
                        link_adj[j].push(i);
                    }
                }
            }
        }
        Ok(NodeGraph {
            region,
            positions,
            link_radius,
            comm_radius,
            link_adj,
            comm_adj,
        })
    }

    pub fn len(&self) -> usize {
        self.positions.len()
    }

    pub fn is_empty(&self) -> bool {
        self.positions.is_empty()
    }

    pub fn region(&self) -> Region {
        self.region
    }

    pub fn positions(&self) -> &[(f64, f64)] {
        &self.positions
    }

    pub fn position(&self, id: NodeId) -> (f64, f64) {
        self.positions[id]
    }

    pub fn link_radius(&self) -> f64 {
        self.link_radius
    }

    pub fn comm_radius(&self) -> f64 {
        self.comm_radius
    }

    pub fn link_neighbors(&self, id: NodeId) -> &[NodeId] {
        &self.link_adj[id]
    }

    pub fn comm_neighbors(&self, id: NodeId) -> &[NodeId] {
        &self.comm_adj[id]
    }

    /// Comm-graph degree — the degree used for relay election.
    pub fn degree(&self, id: NodeId) -> usize {
        self.comm_adj[id].len()
    }

    pub fn mean_degree(&self) -> f64 {
        if self.positions.is_empty() {
            return 0.0;
        }
        let total: usize = self.comm_adj.iter().map(Vec::len).sum();
        total as f64 / self.positions.len() as f64
    }

    pub fn nearest_neighbor_distance(&self, id: NodeId) -> Option<f64> {
        let p = self.positions[id];
        self.positions
            .iter()
            .enumerate()
            .filter(|&(j, _)| j != id)
            .map(|(_, &q)| dist(p, q))
            .min_by(|a, b| a.total_cmp(b))
    }

    /// Nodes within `radius` of an arbitrary point (inclusive).
    pub fn count_within(&self, point: (f64, f64), radius: f64) -> usize {
        self.positions
            .iter()
            .filter(|&&q| dist(point, q) <= radius)
            .count()
    }

    /// Undirected edge list of the chosen overlay, each edge once (u < v).
    pub fn edges(&self, link: bool) -> Vec<(NodeId, NodeId)> {
        let adj = if link { &self.link_adj } else { &self.comm_adj };
        let mut out = Vec::new();
        for (u, nbrs) in adj.iter().enumerate() {
            for &v in nbrs {
                if u < v {
                    out.push((u, v));
                }
            }
        }
        out
    }
}

/// `n` points i.i.d. uniform over the region.
pub fn generate_uniform(region: Region, n: usize, rng: &mut impl Rng) -> Vec<(f64, f64)> {
    (0..n)
        .map(|_| {
            (
                rng.gen::<f64>() * region.width,
                rng.gen::<f64>() * region.height,
            )
        })
        .collect()
}

/// `n` points from a mixture of truncated Gaussian clusters.
///
/// Each point picks a cluster with probability proportional to its weight,
/// then rejection-samples the Gaussian until it lands inside the region.
/// A cluster so diffuse (or so far off-region) that the rejection budget
/// runs out degrades gracefully to a uniform draw — which is also the
/// correct `std_dev → ∞` limit of the truncated Gaussian itself.
pub fn generate_nonuniform(
    region: Region,
    n: usize,
    clusters: &[ClusterSpec],
    rng: &mut impl Rng,
) -> Result<Vec<(f64, f64)>> {
    if clusters.is_empty() {
        return Err(Error::param("non-uniform placement needs at least one cluster"));
    }
    for (i, c) in clusters.iter().enumerate() {
        if !region.contains(c.center) {
            return Err(Error::param(format!("cluster {i} center lies outside the region")));
        }
        if !(c.std_dev > 0.0) || !c.std_dev.is_finite() {
            return Err(Error::param(format!(
                "cluster {i} std_dev must be finite and > 0, got {}",
                c.std_dev
            )));
        }
        if !(c.weight > 0.0) || !c.weight.is_finite() {
            return Err(Error::param(format!(
                "cluster {i} weight must be finite and > 0, got {}",
                c.weight
            )));
        }
    }
    let total: f64 = clusters.iter().map(|c| c.weight).sum();
    let mut points = Vec::with_capacity(n);
    for _ in 0..n {
        let mut u = rng.gen::<f64>() * total;
        let mut chosen = &clusters[clusters.len() - 1];
        for c in clusters {
            if u < c.weight {
                chosen = c;
                break;
            }
            u -= c.weight;
        }
        let nx = Normal::new(chosen.center.0, chosen.std_dev).expect("validated std_dev");
        let ny = Normal::new(chosen.center.1, chosen.std_dev).expect("validated std_dev");
        let mut point = None;
        for _ in 0..256 {
            let p = (nx.sample(rng), ny.sample(rng));
            if region.contains(p) {
                point = Some(p);
                break;
            }
        }
        points.push(point.unwrap_or_else(|| {
            (
                rng.gen::<f64>() * region.width,
                rng.gen::<f64>() * region.height,
            )
        }));
    }
    Ok(points)
}

/// Poisson point process of intensity `lambda` (nodes per unit area): the
/// count is Poisson(λ·|A|), positions uniform given the count.
pub fn generate_ppp(region: Region, lambda: f64, rng: &mut impl Rng) -> Result<Vec<(f64, f64)>> {
    if !(lambda > 0.0) || !lambda.is_finite() {
        return Err(Error::param(format!(
            "ppp intensity must be finite and > 0, got {lambda}"
        )));
    }
    let mean = lambda * region.area();
    let count = Poisson::new(mean)
        .map_err(|e| Error::param(format!("ppp count distribution: {e}")))?
        .sample(rng) as usize;
    Ok(generate_uniform(region, count, rng))
}

/// P{no node of a PPP(λ) within distance `radius`} = exp(−πλr²).
pub fn void_probability(lambda: f64, radius: f64) -> Result<f64> {
    if !(lambda >= 0.0) || !lambda.is_finite() {
        return Err(Error::param(format!(
            "intensity must be finite and >= 0, got {lambda}"
        )));
    }
    if !(radius >= 0.0) || !radius.is_finite() {
        return Err(Error::param(format!("radius must be finite and >= 0, got {radius}")));
    }
    Ok((-std::f64::consts::PI * lambda * radius * radius).exp())
}

/// Radius `r_ε` at which a PPP(λ) disc is non-empty with probability `ε`:
/// `sqrt(ln(1/(1−ε)) / (πλ))`.
pub fn isolation_radius(lambda: f64, epsilon: f64) -> Result<f64> {
    if !(lambda > 0.0) || !lambda.is_finite() {
        return Err(Error::param(format!(
            "intensity must be finite and > 0, got {lambda}"
        )));
    }
    if !(epsilon > 0.0 && epsilon < 1.0) {
        return Err(Error::param(format!("epsilon must lie in (0, 1), got {epsilon}")));
    }
    Ok(((1.0 / (1.0 - epsilon)).ln() / (std::f64::consts::PI * lambda)).sqrt())
}

/// Density above which the expected nearest neighbor sits closer than `d`:
/// `1/(πd²)`. Above this, a warden standing at `d` almost surely has a
/// friendly node inside its test annulus.
pub fn shadow_density_threshold(d: f64) -> Result<f64> {
    if !(d > 0.0) || !d.is_finite() {
        return Err(Error::param(format!("distance must be finite and > 0, got {d}")));
    }
    Ok(1.0 / (std::f64::consts::PI * d * d))
}

/// Connected components of the link graph, largest first (ties broken by
/// smallest member id); each component lists its nodes in ascending order.
pub fn clusters(graph: &NodeGraph) -> Vec<Vec<NodeId>> {
    let n = graph.len();
    let mut seen = vec![false; n];
    let mut out: Vec<Vec<NodeId>> = Vec::new();
    for start in 0..n {
        if seen[start] {
            continue;
        }
        let mut comp = vec![start];
        seen[start] = true;
        let mut queue = std::collections::VecDeque::from([start]);
        while let Some(u) = queue.pop_front() {
            for &v in graph.link_neighbors(u) {
                if !seen[v] {
                    seen[v] = true;
                    comp.push(v);
                    queue.push_back(v);
                }
            }
        }
        comp.sort_unstable();
        out.push(comp);
    }
    out.sort_by(|a, b| b.len().cmp(&a.len()).then(a[0].cmp(&b[0])));
    out
}

/// Can a warden test `node` in isolation? True iff no other node sits
/// within `d_link` of it and the empty annulus `[0, d_link]` spans at least
/// `min_test_span`.
pub fn is_isolatable(
    graph: &NodeGraph,
    node: NodeId,
    d_link: f64,
    min_test_span: f64,
) -> Result<bool> {
    if node >= graph.len() {
        return Err(Error::param(format!(
            "node {node} out of range for a {}-node graph",
            graph.len()
        )));
    }
    if !(d_link > 0.0) || !d_link.is_finite() {
        return Err(Error::param(format!("d_link must be finite and > 0, got {d_link}")));
    }
    if !(min_test_span >= 0.0) || !min_test_span.is_finite() {
        return Err(Error::param(format!(
            "min_test_span must be finite and >= 0, got {min_test_span}"
        )));
    }
    if d_link < min_test_span {
        return Ok(false);
    }
    Ok(match graph.nearest_neighbor_distance(node) {
        Some(nearest) => nearest > d_link,
        None => true,
    })
}
