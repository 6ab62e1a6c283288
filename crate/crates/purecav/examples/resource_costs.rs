//! What a purified pair costs: every attempted round consumes one
//! fused state (two temporary pairs), and a failed round forces a
//! restart. The expected totals follow from a restart recursion over
//! the per-stage success probabilities and are cross-checked by a
//! seeded Monte Carlo.
//!
//! Run with: `cargo run --example resource_costs`

use purecav::harness::{
    analytic_resources, estimate_resources, schedule_probabilities, ResourceConfig, RestartFrom,
};

fn main() -> purecav::Result<()> {
    let f = 0.75;
    let rounds = 4; // initialization + three pumping rounds

    let probs = schedule_probabilities(f, rounds)?;
    println!("per-stage success probabilities at f = {f}: {probs:.4?}\n");

    for restart in [RestartFrom::Init, RestartFrom::Round1] {
        let (pairs, attempted) = analytic_resources(&probs, 2.0, restart);
        println!(
            "restart-from = {restart}: expected {attempted:.3} attempted rounds, {pairs:.3} temporary pairs"
        );
    }

    println!("\nMonte Carlo cross-check (100k trials, full restart):");
    let cfg = ResourceConfig {
        f,
        rounds,
        trials: 100_000,
        seed: 7,
        restart_from: RestartFrom::Init,
        force_probability: None,
        with_fusion_cost: false,
    };
    let est = estimate_resources(&cfg)?;
    println!(
        "  pairs: {:.3} ± {:.3} (MC)  vs  {:.3} (analytic)",
        est.expected_temporary_pairs, est.confidence_half_width, est.analytic_temporary_pairs
    );
    println!(
        "  rounds attempted: {:.3} (MC)  vs  {:.3} (analytic)",
        est.expected_rounds_attempted, est.analytic_rounds_attempted
    );

    // Charging the fusion step its own no-photon odds scales every
    // round's cost by 1/p_fuse.
    let costed = estimate_resources(&ResourceConfig { with_fusion_cost: true, ..cfg })?;
    let p_fuse = (2.0 - 4.0 * f + 4.0 * f * f) / 4.0;
    println!(
        "\nwith the fusion step's success odds charged (p_fuse = {p_fuse:.4}):\n  pairs: {:.3} (MC)  vs  {:.3} (analytic)",
        costed.expected_temporary_pairs, costed.analytic_temporary_pairs
    );
    println!("\nassumption: a failed no-photon conditioning still consumes its two pairs.");
    Ok(())
}
