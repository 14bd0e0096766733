// Shadow networks: once the node density of a Poisson field passes
// 1/(pi d^2), a warden who must get within d of a transmitter, with nobody
// else inside that disk, almost never finds such a vantage point. The
// network's own clutter becomes cover.
//
//   cargo run --example shadow_network

use covert_sim::netsim::{
    clusters, generate_ppp, is_isolatable, isolation_radius, shadow_density_threshold,
    void_probability, NodeGraph, Region,
};
use covert_sim::seed::trial_rng;

const SEEDS: u64 = 200;

fn isolatable_fraction(region: Region, lambda: f64, d_link: f64, root: u64) -> f64 {
    let mut total = 0usize;
    let mut isolated = 0usize;
    for seed in 0..SEEDS {
        let mut rng = trial_rng(root, seed);
        let nodes = generate_ppp(region, lambda, &mut rng).expect("ppp draw");
        if nodes.is_empty() {
            continue;
        }
        let graph = NodeGraph::from_positions(region, nodes, d_link, d_link).expect("graph");
        total += graph.len();
        isolated += (0..graph.len())
            .filter(|&i| is_isolatable(&graph, i, d_link, 0.0).expect("isolation check"))
            .count();
    }
    isolated as f64 / total as f64
}

fn main() -> covert_sim::Result<()> {
    let d_link = 5.0;
    let threshold = shadow_density_threshold(d_link)?;
    println!("detection-link radius d = {d_link} m");
    println!("shadow density threshold 1/(pi d^2) = {threshold:.6} nodes/m^2\n");

    println!("void probability of a d-disk vs density:");
    for factor in [0.25, 0.5, 1.0, 2.0, 4.0] {
        let lambda = factor * threshold;
        println!(
            "  lambda = {:>6.4} ({factor:>4.2}x): exp(-pi lambda d^2) = {:.3}, \
             90%-isolation radius {:>5.2} m",
            lambda,
            void_probability(lambda, d_link)?,
            isolation_radius(lambda, 0.9)?,
        );
    }

    let region = Region::new(100.0, 100.0)?;
    println!("\nmeasured isolatable fraction on {SEEDS} seeded fields (100 x 100 m):");
    for (factor, root) in [(0.5, 11u64), (1.0, 12), (2.0, 13)] {
        let lambda = factor * threshold;
        let frac = isolatable_fraction(region, lambda, d_link, root);
        println!("  lambda = {factor:.1}x threshold: {frac:.3}");
    }

    // Past the threshold the link graph also stops being dust: clusters
    // big enough to hide in appear.
    println!("\nlink-graph structure of one field per density:");
    for (factor, root) in [(0.5, 21u64), (2.0, 22), (4.0, 23)] {
        let lambda = factor * threshold;
        let mut rng = trial_rng(root, 0);
        let nodes = generate_ppp(region, lambda, &mut rng)?;
        let graph = NodeGraph::from_positions(region, nodes, d_link, d_link)?;
        let comps = clusters(&graph);
        println!(
            "  lambda = {factor:.1}x: {} nodes, {} components, largest {}",
            graph.len(),
            comps.len(),
            comps.first().map_or(0, Vec::len),
        );
    }
    Ok(())
}
