// Routing through the crowd: a source picks relays toward the base
// station weighted by neighbor count (DBR), against a uniform-gradient
// baseline (GBR). Relays sitting in dense spots cannot be isolated by the
// warden; the secure-relay ratio counts them.
//
//   cargo run --example density_routing

use covert_sim::netsim::{generate_nonuniform, generate_uniform, NodeGraph, Region};
use covert_sim::routing::{
    beacon_flood, export_path, route_dbr, route_gbr, secure_relay_ratio, CandidateMode,
};
use covert_sim::scenario::NetworkSpec;
use covert_sim::seed::trial_rng;

const D_LINK: f64 = 5.0;
const COMM: f64 = 20.0;

fn build(region: Region, field: Vec<(f64, f64)>) -> covert_sim::Result<NodeGraph> {
    // Node 0 is the base station, node 1 the covert source.
    let mut positions = vec![(0.0, region.height / 2.0), (region.width, region.height / 2.0)];
    positions.extend(field);
    NodeGraph::from_positions(region, positions, D_LINK, COMM)
}

fn main() -> covert_sim::Result<()> {
    let region = Region::new(200.0, 100.0)?;
    let mut rng = trial_rng(8, 0);
    let field = generate_uniform(region, 300, &mut rng);
    let graph = build(region, field)?;
    let beacon = beacon_flood(&graph, 0, CandidateMode::StrictBackward)?;

    println!(
        "uniform field: {} nodes, mean degree {:.1}, source at hop {:?}",
        graph.len(),
        graph.mean_degree(),
        beacon.hop(1)
    );

    let path = route_dbr(&graph, &beacon, 1, &mut rng)?;
    println!("\none DBR route (source 1 -> BS 0):");
    println!("{:>4} {:>5} {:>8} {:>8} {:>7} {:>8} {:>10}", "hop", "node", "x", "y", "deg", "p_tx", "exposed");
    for hop in export_path(&graph, &path, 0.2, D_LINK, 0.0)? {
        println!(
            "{:>4} {:>5} {:>8.1} {:>8.1} {:>7} {:>8.3} {:>10}",
            hop.order, hop.node, hop.x, hop.y, hop.degree, hop.tx_prob, hop.isolatable
        );
    }
    println!(
        "secure-relay ratio: {:.3}",
        secure_relay_ratio(&graph, &path, D_LINK, 0.0)?
    );

    // Scheme comparison over seeded deployments. Backward-only candidates
    // keep both schemes on shortest paths; the wandering (literal) rule
    // lets DBR actually chase density, at the price of stranded walks on
    // sparse graphs.
    let seeds = 200u64;
    let clusters = NetworkSpec::default_clusters();
    let mut dbr = Vec::new();
    let mut gbr = Vec::new();
    let mut wander = Vec::new();
    let mut wander_fail = 0u32;
    let mut clustered = Vec::new();
    for seed in 0..seeds {
        let mut rng = trial_rng(9, seed);
        let graph = build(region, generate_uniform(region, 300, &mut rng))?;
        let strict = beacon_flood(&graph, 0, CandidateMode::StrictBackward)?;
        if let Ok(p) = route_dbr(&graph, &strict, 1, &mut rng) {
            dbr.push(secure_relay_ratio(&graph, &p, D_LINK, 0.0)?);
        }
        if let Ok(p) = route_gbr(&graph, &strict, 1, &mut rng) {
            gbr.push(secure_relay_ratio(&graph, &p, D_LINK, 0.0)?);
        }
        let literal = beacon_flood(&graph, 0, CandidateMode::Literal)?;
        match route_dbr(&graph, &literal, 1, &mut rng) {
            Ok(p) => wander.push(secure_relay_ratio(&graph, &p, D_LINK, 0.0)?),
            Err(_) => wander_fail += 1,
        }

        let mut rng2 = trial_rng(10, seed);
        let graph = build(region, generate_nonuniform(region, 300, &clusters, &mut rng2)?)?;
        let beacon = beacon_flood(&graph, 0, CandidateMode::StrictBackward)?;
        if let Ok(p) = route_dbr(&graph, &beacon, 1, &mut rng2) {
            clustered.push(secure_relay_ratio(&graph, &p, D_LINK, 0.0)?);
        }
    }
    let mean = |v: &Vec<f64>| v.iter().sum::<f64>() / v.len() as f64;
    println!("\nmean secure-relay ratio over {seeds} seeds (n = 300):");
    println!("  dbr (backward)  {:.3}  ({} routed)", mean(&dbr), dbr.len());
    println!("  gbr             {:.3}  ({} routed)", mean(&gbr), gbr.len());
    println!(
        "  dbr (wandering) {:.3}  ({} routed, {} stranded)",
        mean(&wander),
        wander.len(),
        wander_fail
    );
    println!("  dbr, clustered  {:.3}  ({} routed)", mean(&clustered), clustered.len());
    println!("\nclustered deployments shield relays best: density is cover.");
    Ok(())
}
