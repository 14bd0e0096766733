//! Shared oracles for the integration suites.
//!
//! Everything here recomputes reference values through routes that are
//! deliberately independent of the library internals: the normal quantile
//! comes from quadrature plus bisection (not statrs), binomial tails from
//! direct pmf summation, components from union-find, hop counts from a
//! plain queue BFS over adjacency rebuilt straight from positions.

#![allow(dead_code)] // each integration target pulls in the subset it needs

/// Standard normal CDF by Simpson's rule on the density.
///
/// `Φ(x) = ½ + ∫₀ˣ φ(u) du`; the integrand is smooth, so a fixed fine grid
/// gets us far below the tolerances any test here asks for.
pub fn normal_cdf_oracle(x: f64) -> f64 {
    if x < -40.0 {
        return 0.0;
    }
    if x > 40.0 {
        return 1.0;
    }
    let pdf = |u: f64| (-0.5 * u * u).exp() / (2.0 * std::f64::consts::PI).sqrt();
    let steps = 4000usize; // Simpson needs an even count; error ~ h⁴ ≈ 1e-13 here
    let a = 0.0;
    let b = x.abs();
    let h = (b - a) / steps as f64;
    let mut acc = pdf(a) + pdf(b);
    for i in 1..steps {
        let w = if i % 2 == 1 { 4.0 } else { 2.0 };
        acc += w * pdf(a + i as f64 * h);
    }
    let integral = acc * h / 3.0;
    if x >= 0.0 {
        0.5 + integral
    } else {
        0.5 - integral
    }
}

/// Inverse of [`normal_cdf_oracle`] by bisection on [−40, 40].
pub fn normal_quantile_oracle(p: f64) -> f64 {
    assert!(p > 0.0 && p < 1.0, "quantile oracle needs p in (0,1), got {p}");
    let (mut lo, mut hi) = (-40.0f64, 40.0f64);
    for _ in 0..200 {
        let mid = 0.5 * (lo + hi);
        if normal_cdf_oracle(mid) < p {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    0.5 * (lo + hi)
}

/// pmf of Binomial(t, ½) for k = 0..=t via the multiplicative recurrence.
pub fn binom_half_pmf(t: u32) -> Vec<f64> {
    let mut pmf = vec![0.0f64; t as usize + 1];
    // ln pmf(0) = -t·ln 2 keeps t ≈ 1000 representable; exponentiate per term.
    let ln_half = -(t as f64) * std::f64::consts::LN_2;
    let mut ln_term = ln_half;
    pmf[0] = ln_term.exp();
    for k in 0..t {
        ln_term += ((t - k) as f64).ln() - ((k + 1) as f64).ln();
        pmf[k as usize + 1] = ln_term.exp();
    }
    pmf
}

/// P{Bin(t, ½) ≤ k} by direct summation; `k < 0` is 0 by convention.
pub fn binom_half_cdf(t: u32, k: i64) -> f64 {
    if k < 0 {
        return 0.0;
    }
    let pmf = binom_half_pmf(t);
    let top = (k as usize).min(t as usize);
    pmf[..=top].iter().sum()
}

/// Largest integer threshold preserving size ≤ β: max k with cdf(k−1) ≤ β.
pub fn exact_threshold_oracle(t: u32, beta: f64) -> u32 {
    let mut threshold = 0u32;
    for k in 1..=t {
        if binom_half_cdf(t, i64::from(k) - 1) <= beta {
            threshold = k;
        } else {
            break;
        }
    }
    threshold
}

/// ½(t + √t · Φ⁻¹(β)) with the quadrature quantile.
pub fn normal_threshold_oracle(t: u32, beta: f64) -> f64 {
    0.5 * (f64::from(t) + f64::from(t).sqrt() * normal_quantile_oracle(beta))
}

/// Fewest location pairs forcing detection at level β and path-loss α:
/// smallest integer strictly above (Φ⁻¹(β)/(1 − 8/(2^α+1)²))².
pub fn required_locations_oracle(beta: f64, alpha: f64) -> u32 {
    let q = normal_quantile_oracle(beta);
    let denom = 1.0 - 8.0 / (2f64.powf(alpha) + 1.0).powi(2);
    let bound = (q / denom) * (q / denom);
    bound.floor() as u32 + 1
}

// --- graph oracles ---------------------------------------------------------

/// Inclusive-radius adjacency rebuilt straight from positions.
pub fn adjacency_oracle(positions: &[(f64, f64)], radius: f64) -> Vec<Vec<usize>> {
    let n = positions.len();
    let mut adj = vec![Vec::new(); n];
    for u in 0..n {
        for v in (u + 1)..n {
            let dx = positions[u].0 - positions[v].0;
            let dy = positions[u].1 - positions[v].1;
            if (dx * dx + dy * dy).sqrt() <= radius {
                adj[u].push(v);
                adj[v].push(u);
            }
        }
    }
    adj
}

struct UnionFind {
    parent: Vec<usize>,
}

impl UnionFind {
    fn new(n: usize) -> Self {
        Self {
            parent: (0..n).collect(),
        }
    }

    fn find(&mut self, x: usize) -> usize {
        if self.parent[x] != x {
            let root = self.find(self.parent[x]);
            self.parent[x] = root;
        }
        self.parent[x]
    }

    fn union(&mut self, a: usize, b: usize) {
        let (ra, rb) = (self.find(a), self.find(b));
        if ra != rb {
            self.parent[ra.max(rb)] = ra.min(rb);
        }
    }
}

/// Connected components by union-find, canonicalized the same way the
/// library reports them: largest first, ties by smallest member, members
/// ascending.
pub fn components_oracle(positions: &[(f64, f64)], radius: f64) -> Vec<Vec<usize>> {
    let n = positions.len();
    let mut uf = UnionFind::new(n);
    for (u, nbrs) in adjacency_oracle(positions, radius).iter().enumerate() {
        for &v in nbrs {
            uf.union(u, v);
        }
    }
    let mut by_root: std::collections::BTreeMap<usize, Vec<usize>> = std::collections::BTreeMap::new();
    for x in 0..n {
        let r = uf.find(x);
        by_root.entry(r).or_default().push(x);
    }
    let mut out: Vec<Vec<usize>> = by_root.into_values().collect();
    for comp in &mut out {
        comp.sort_unstable();
    }
    out.sort_by(|a, b| b.len().cmp(&a.len()).then(a[0].cmp(&b[0])));
    out
}

/// Hop counts from `start` by plain BFS; `None` marks unreachable nodes.
pub fn bfs_hops_oracle(positions: &[(f64, f64)], radius: f64, start: usize) -> Vec<Option<u32>> {
    let adj = adjacency_oracle(positions, radius);
    let mut hops = vec![None; positions.len()];
    hops[start] = Some(0u32);
    let mut queue = std::collections::VecDeque::from([start]);
    while let Some(u) = queue.pop_front() {
        let hu = hops[u].expect("queued nodes are reached");
        for &v in &adj[u] {
            if hops[v].is_none() {
                hops[v] = Some(hu + 1);
                queue.push_back(v);
            }
        }
    }
    hops
}

// --- small-sample statistics ------------------------------------------------

pub fn mean_oracle(xs: &[f64]) -> f64 {
    xs.iter().sum::<f64>() / xs.len() as f64
}

pub fn variance_oracle(xs: &[f64]) -> f64 {
    let m = mean_oracle(xs);
    xs.iter().map(|x| (x - m) * (x - m)).sum::<f64>() / (xs.len() as f64 - 1.0)
}

pub fn stderr_oracle(xs: &[f64]) -> f64 {
    (variance_oracle(xs) / xs.len() as f64).sqrt()
}

/// One-sided z statistic for mean(a) − mean(b) > 0 with unpooled variances.
pub fn welch_z_oracle(a: &[f64], b: &[f64]) -> f64 {
    let se = (variance_oracle(a) / a.len() as f64 + variance_oracle(b) / b.len() as f64).sqrt();
    (mean_oracle(a) - mean_oracle(b)) / se
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn quantile_oracle_matches_textbook_points() {
        assert!((normal_quantile_oracle(0.5)).abs() < 1e-9);
        assert!((normal_quantile_oracle(0.975) - 1.959964).abs() < 1e-5);
        assert!((normal_quantile_oracle(0.05) + 1.644854).abs() < 1e-5);
    }

    #[test]
    fn binomial_oracle_sums_to_one() {
        for t in [1u32, 7, 100, 999] {
            let total: f64 = binom_half_pmf(t).iter().sum();
            assert!((total - 1.0).abs() < 1e-10, "t={t}: {total}");
        }
    }

    #[test]
    fn union_find_handles_a_triangle_plus_isolate() {
        let pos = [(0.0, 0.0), (1.0, 0.0), (0.5, 0.5), (9.0, 9.0)];
        let comps = components_oracle(&pos, 1.5);
        assert_eq!(comps, vec![vec![0, 1, 2], vec![3]]);
    }
}
