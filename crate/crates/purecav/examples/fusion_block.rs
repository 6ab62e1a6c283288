//! The fusion block: two atoms coupled to a common decaying cavity
//! mode. Integrating the master equation drives the cavity into
//! pointer coherent states labelled by the atoms' ±-basis parity;
//! detecting no leaked photon projects onto the vacuum and fuses two
//! channel pairs into the four-qubit resource state that the modified
//! pumping scheme consumes.
//!
//! Run with: `cargo run --example fusion_block`

use num_complex::Complex64 as C64;
use purecav::fusion::{
    analytic_steady_state, atoms_with_vacuum, condition_on_vacuum, evolve, sequential_fusion,
    LindbladModel,
};
use purecav::qcore::{identity, trace_distance, DensityOperator};
use purecav::states::fused_state_pair_basis;

fn main() -> purecav::Result<()> {
    let model = LindbladModel::with_default_truncation(1.0, 1.0)?;
    println!(
        "model: J2 = {}, kappa = {}, steady coherent amplitude |alpha| = {}, n_max = {}",
        model.j2(),
        model.kappa(),
        model.alpha_ss().norm(),
        model.n_max()
    );

    // Maximally mixed atoms + cavity vacuum, integrated to kappa*t = 20.
    let mixed = DensityOperator::new(identity(4) * C64::new(0.25, 0.0), vec![2, 2])?;
    let rho0 = atoms_with_vacuum(&mixed, &model)?;
    let evolved = evolve(&model, &rho0, 20.0, None)?;
    let closed = analytic_steady_state(&mixed, &model)?;
    println!(
        "trace distance of the evolved state to the closed-form steady state: {:.3e}",
        trace_distance(evolved.matrix(), closed.matrix())
    );

    // Conditioning on an empty cavity.
    let res = condition_on_vacuum(&closed, &model)?;
    println!(
        "no-photon probability from the mixed input: {:.6}",
        res.no_photon_probability
    );

    // Fusing two f = 0.75 channel pairs, one node after the other, at
    // increasing coupling: the conditioned state converges to the
    // ideal fused resource.
    let f = 0.75;
    let ideal = fused_state_pair_basis(f)?;
    println!("\nfusing two f = {f} pairs:");
    println!("{:<8} {:>14} {:>18}", "|alpha|", "joint P(no ph.)", "TD to ideal state");
    for &alpha in &[1.0, 2.0, 3.0, 4.0] {
        let m = LindbladModel::with_default_truncation(alpha / 2.0, 1.0)?;
        let (state, p) = sequential_fusion(f, &m)?;
        println!(
            "{alpha:<8} {p:>14.6} {:>18.3e}",
            trace_distance(state.matrix(), ideal.matrix())
        );
    }
    println!(
        "\nlarge-coupling limit of the joint probability: {:.6}",
        (2.0 - 4.0 * f + 4.0 * f * f) / 4.0
    );
    Ok(())
}
