// Planning the warden's walk: how many location pairs does a mobile
// listener need before the trend test catches an always-on source with
// probability 1 - beta? The closed-form answer depends only on beta and
// the path-loss exponent, because consecutive walk distances double.
//
//   cargo run --example active_warden

use covert_sim::adversary::{
    p0_db_matching_far_power, required_locations, required_locations_bound, run_campaign, WalkPlan,
};
use covert_sim::channel::ChannelParams;
use covert_sim::countermeasures::TxProcess;
use covert_sim::seed::trial_rng;
use covert_sim::trendtest::{ThresholdMethod, TrendDecision};

fn main() -> covert_sim::Result<()> {
    println!("location pairs required for 1-beta detection:");
    println!("{:>8} {:>12} {:>12}", "beta", "alpha = 3", "alpha = 4");
    for beta in [0.001, 0.01, 0.05, 0.1] {
        let t3 = required_locations(beta, 3.0)?;
        let t4 = required_locations(beta, 4.0)?;
        let b3 = required_locations_bound(beta, 3.0)?;
        println!("{beta:>8} {t3:>6} ({b3:>4.2}) {t4:>10}");
    }

    // Spot-check one cell by simulation. The planning bound assumes the
    // warden's normal-approximation cut, so use it explicitly; at t this
    // small the exact-binomial cut is too conservative to fire at all.
    let beta = 0.05;
    let t = required_locations(beta, 3.0)?;
    let plan = WalkPlan::new(t, 0.5, 0.5, 1_000)?;
    let p0_db = p0_db_matching_far_power(&plan, 3.0, 1.0)?;
    let params = ChannelParams::new(p0_db, 3.0)?;
    let trials = 2_000u64;
    let mut detections = 0u64;
    for trial in 0..trials {
        let mut rng = trial_rng(31, trial);
        let campaign = run_campaign(
            &params,
            &plan,
            &TxProcess::AlwaysOn,
            beta,
            ThresholdMethod::NormalApprox,
            &mut rng,
        )?;
        if campaign.verdict.decision == TrendDecision::DownwardTrend {
            detections += 1;
        }
    }
    println!(
        "\nsimulated at t = {t}, alpha = 3, beta = {beta}: detection rate {:.4} (want >= {:.2})",
        detections as f64 / trials as f64,
        1.0 - beta
    );

    // More averaged samples per stop sharpen each reading and with it the
    // trend; the same weak geometry goes from coin-flip to certainty.
    let plan = WalkPlan::new(50, 0.5, 2.0, 1)?;
    let params = ChannelParams::new(15.0, 3.0)?;
    println!("\nsample count vs detection (fixed weak geometry, t = 50):");
    for m in [1u32, 10, 100, 1_000] {
        let plan = WalkPlan::new(plan.t(), plan.d_spacing(), plan.d_min(), m)?;
        let mut detections = 0u64;
        for trial in 0..500 {
            let mut rng = trial_rng(32, u64::from(m) * 1_000 + trial);
            let campaign = run_campaign(
                &params,
                &plan,
                &TxProcess::AlwaysOn,
                0.05,
                ThresholdMethod::Auto,
                &mut rng,
            )?;
            if campaign.verdict.decision == TrendDecision::DownwardTrend {
                detections += 1;
            }
        }
        println!("  m = {m:>5}: rate {:.3}", detections as f64 / 500.0);
    }
    Ok(())
}
