//! Property-based invariants: randomized inputs exercise the closed
//! forms against the brute-force simulation and check structural
//! guarantees (probability bookkeeping, positivity, monotonicity).

use proptest::prelude::*;

use purecav::harness::{analytic_resources, format_sig, RestartFrom};
use purecav::physlayer::distribution_fidelity;
use purecav::purify::{
    bell_offdiagonal_max, closed_form_modified, closed_form_original, init_then_iterate, iterate,
    round_modified, round_original, Scheme,
};
use purecav::qcore::max_abs_diff;
use purecav::spinchain::round_propagator;
use purecav::states::{permanent_eigenvalues, permanent_state, rank_two_state};

proptest! {
    #![proptest_config(ProptestConfig::with_cases(24))]

    /// The two-pair closed form reproduces the brute-force round at
    /// arbitrary (channel, register) fidelities.
    #[test]
    fn original_closed_form_matches_simulation(f in 0.51f64..=0.99, fp in 0.51f64..=0.99) {
        let reg = rank_two_state(fp).unwrap();
        let r = round_original(f, &reg, 0).unwrap();
        prop_assert!((r.f_out - closed_form_original(f, fp)).abs() <= 1e-9);
    }

    /// Same for the fused-resource closed form.
    #[test]
    fn modified_closed_form_matches_simulation(f in 0.51f64..=0.99, fp in 0.51f64..=0.99) {
        let reg = rank_two_state(fp).unwrap();
        let r = round_modified(f, &reg, 0).unwrap();
        prop_assert!((r.f_out - closed_form_modified(f, fp)).abs() <= 1e-9);
    }

    /// A round is a complete measurement: the sixteen branch
    /// probabilities sum to one, the kept branches have sensible odds,
    /// and the post state stays in the rank-two family.
    #[test]
    fn round_is_a_complete_measurement(f in 0.51f64..=0.99, fp in 0.51f64..=0.99) {
        let reg = rank_two_state(fp).unwrap();
        for scheme in [Scheme::Original, Scheme::Modified] {
            let r = match scheme {
                Scheme::Original => round_original(f, &reg, 0).unwrap(),
                Scheme::Modified => round_modified(f, &reg, 0).unwrap(),
            };
            prop_assert!((r.total_probability - 1.0).abs() <= 1e-10);
            prop_assert!(r.success_probability > 0.0 && r.success_probability <= 1.0);
            prop_assert!(r.f_out > 0.5 && r.f_out <= 1.0 + 1e-12);
            prop_assert!(bell_offdiagonal_max(&r.post_state).unwrap() <= 1e-10);
        }
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    /// Repeated pumping on the operating range climbs monotonically and
    /// never overshoots unit fidelity.
    #[test]
    fn pumping_sequence_is_monotone(f in 0.55f64..=0.95) {
        for scheme in [Scheme::Original, Scheme::Modified] {
            let seq = iterate(scheme, f, 6).unwrap();
            let mut prev = f;
            for &v in &seq.values {
                prop_assert!(v >= prev - 1e-12, "{scheme} sequence dipped at f = {f}");
                prop_assert!(v <= 1.0 + 1e-12);
                prev = v;
            }
        }
    }

    /// The fused-resource map dominates the two-pair map across the
    /// operating range.
    #[test]
    fn fused_scheme_dominates(f in 0.55f64..=0.99) {
        prop_assert!(closed_form_modified(f, f) >= closed_form_original(f, f));
    }

    /// Rank-two pairs with a Bell-block coherence are physical exactly
    /// on the advertised disc, and the closed-form eigenvalues match.
    #[test]
    fn coherent_pair_positivity(f in 0.51f64..=0.99, t in 0.0f64..=1.0) {
        let bound = 0.5 * (1.0 - (2.0 * f - 1.0) * (2.0 * f - 1.0)).sqrt();
        let g = t * bound * 0.999;
        let rho = permanent_state(f, g).unwrap();
        prop_assert!(rho.min_eigenvalue() >= -1e-12);
        let (lo, hi) = permanent_eigenvalues(f, g);
        prop_assert!(lo >= -1e-12 && hi <= 1.0 + 1e-12);
        prop_assert!((lo + hi - 1.0).abs() <= 1e-12);
        if bound > 1e-6 {
            prop_assert!(permanent_state(f, bound * 1.01 + 1e-9).is_err());
        }
    }

    /// Initialization chains keep probabilities and coefficients in
    /// their physical ranges.
    #[test]
    fn initialization_chain_stays_physical(f in 0.55f64..=0.95, rounds in 0u32..4) {
        let chain = init_then_iterate(f, rounds).unwrap();
        prop_assert_eq!(chain.stage_probabilities.len(), rounds as usize + 1);
        for &p in &chain.stage_probabilities {
            prop_assert!(p > 0.0 && p <= 1.0);
        }
        for (&fv, &gv) in chain.fidelities.iter().zip(&chain.coherences) {
            prop_assert!(fv > 0.0 && fv <= 1.0 + 1e-12);
            prop_assert!(gv > 0.0, "coherence went non-positive at f = {f}");
        }
    }

    /// At a fixed gate index the round propagator does not depend on
    /// the exchange coupling: the gate time rescales it away exactly.
    /// (Different gate indices change sector phases; only the measured
    /// pump map is index-invariant, which the acceptance suite checks.)
    #[test]
    fn round_propagator_is_coupling_independent(j in 0.1f64..=5.0, n in 0u32..4) {
        let u = round_propagator(j, n);
        let base = round_propagator(1.0, n);
        prop_assert!(max_abs_diff(&u, &base) <= 1e-10);
    }

    /// Interference-based distribution keeps the pair above the
    /// purification threshold and improves with detector efficiency.
    /// (Ranges where the exponential stays representable: in the
    /// extreme-loss limit the fidelity underflows to exactly 1/2.)
    #[test]
    fn distribution_fidelity_range_and_monotonicity(
        eta1 in 0.05f64..=1.0,
        boost in 0.0f64..=0.9,
        alpha_sq in 0.0f64..=50.0,
        theta in 0.0f64..=1.5,
    ) {
        let eta2 = (eta1 + boost * (1.0 - eta1)).min(1.0);
        let f1 = distribution_fidelity(eta1, alpha_sq, theta).unwrap();
        let f2 = distribution_fidelity(eta2, alpha_sq, theta).unwrap();
        prop_assert!(f1 > 0.5 && f1 <= 1.0);
        prop_assert!(f2 >= f1 - 1e-15);
    }

    /// Restart accounting: every stage is attempted at least once, the
    /// pair count is the round count times the per-round cost, and the
    /// keep-the-register policy never costs more than a full restart.
    #[test]
    fn restart_recursion_bounds(
        probs in prop::collection::vec(0.05f64..=1.0, 1..=6),
        cost in 2.0f64..=8.0,
    ) {
        let (pairs_i, rounds_i) = analytic_resources(&probs, cost, RestartFrom::Init);
        let (pairs_r, rounds_r) = analytic_resources(&probs, cost, RestartFrom::Round1);
        prop_assert!(rounds_i >= probs.len() as f64 - 1e-12);
        prop_assert!((pairs_i / rounds_i - cost).abs() <= 1e-12 * cost);
        prop_assert!((pairs_r / rounds_r - cost).abs() <= 1e-12 * cost);
        prop_assert!(rounds_i >= rounds_r - 1e-9);
    }

    /// CSV numbers survive a parse round trip at 12 significant digits.
    #[test]
    fn csv_formatting_round_trips(x in -1e12f64..=1e12) {
        let parsed: f64 = format_sig(x).parse().unwrap();
        if x == 0.0 {
            prop_assert_eq!(parsed, 0.0);
        } else {
            prop_assert!(((parsed - x) / x).abs() <= 5e-12);
        }
    }
}
