//! Entangled-state families used by the pumping protocol.
//!
//! Three families appear throughout:
//!
//! * **Rank-two channel pairs** — Bell-diagonal two-qubit states
//!   `f·|Φ⁺⟩⟨Φ⁺| + (1−f)·|Φ⁻⟩⟨Φ⁻|`, the raw output of photonic
//!   distribution between two nodes.
//! * **Fused four-qubit resource states** — the result of fusing two
//!   channel pairs through the dissipative cavity bus. Two algebraically
//!   different but identical-valued constructions are provided: one
//!   grouped by node ([`fused_state`]) and one grouped by distributed
//!   pair ([`fused_state_pair_basis`]); their equality is a consistency
//!   check on the fusion analysis.
//! * **Register pairs** — the long-lived pair that accumulates fidelity
//!   over pumping rounds. Within the protocol it stays in the rank-two
//!   span of `{|Φ⁺⟩, |Φ⁻⟩}` with a real cross coherence
//!   ([`permanent_state`]).
//!
//! Qubit ordering for four-qubit states is `(A1, A2, B1, B2)`: both
//! qubits held at node A first, then both at node B.

use crate::qcore::{
    phi_minus, phi_plus, psi_minus, psi_plus, CMatrix, DensityOperator, Ket,
};
use crate::{Error, Result};

fn check_unit_interval(x: f64, name: &str) -> Result<()> {
    if !(0.0..=1.0).contains(&x) || !x.is_finite() {
        return Err(Error::Usage(format!("{name} = {x} must lie in [0, 1]")));
    }
    Ok(())
}

/// `|a⟩⟨b|` cross operator.
fn cross(a: &Ket, b: &Ket) -> CMatrix {
    a.vector() * b.vector().adjoint()
}

/// Rank-two Bell-diagonal pair `f·|Φ⁺⟩⟨Φ⁺| + (1−f)·|Φ⁻⟩⟨Φ⁻|`.
pub fn rank_two_state(f: f64) -> Result<DensityOperator> {
    check_unit_interval(f, "fidelity f")?;
    let mat = phi_plus().projector() * c(f) + phi_minus().projector() * c(1.0 - f);
    DensityOperator::new(mat, vec![2, 2])
}

/// Register pair `F·|Φ⁺⟩⟨Φ⁺| + (1−F)·|Φ⁻⟩⟨Φ⁻| + G(|Φ⁺⟩⟨Φ⁻| + |Φ⁻⟩⟨Φ⁺|)`.
///
/// Positivity requires `G² ≤ F(1−F)`; the constructor enforces it.
pub fn permanent_state(f: f64, g: f64) -> Result<DensityOperator> {
    check_unit_interval(f, "fidelity F")?;
    let (_, lo) = permanent_eigenvalues(f, g);
    if lo < -1e-12 {
        return Err(Error::InvalidOperator(format!(
            "register coherence G = {g} violates positivity for F = {f} \
             (needs G² ≤ F(1−F))"
        )));
    }
    let p = phi_plus();
    let m = phi_minus();
    let mat = p.projector() * c(f)
        + m.projector() * c(1.0 - f)
        + (cross(&p, &m) + cross(&m, &p)) * c(g);
    DensityOperator::new(mat, vec![2, 2])
}

/// Nonzero eigenvalues `½(1 ± √((2F−1)² + 4G²))` of [`permanent_state`],
/// returned as `(larger, smaller)`.
pub fn permanent_eigenvalues(f: f64, g: f64) -> (f64, f64) {
    let r = ((2.0 * f - 1.0).powi(2) + 4.0 * g * g).sqrt();
    (0.5 * (1.0 + r), 0.5 * (1.0 - r))
}

/// Four-qubit fused resource state on `(A1, A2, B1, B2)`, written in the
/// node grouping: Bell pairs live *within* each node,
///
/// `½(|Φ⁻Φ⁻⟩⟨Φ⁻Φ⁻| + |Ψ⁻Ψ⁻⟩⟨Ψ⁻Ψ⁻|) + c(f)(|Φ⁻Φ⁻⟩⟨Ψ⁻Ψ⁻| + h.c.)`
///
/// with `c(f) = (2f−1) / (2(1−2f+2f²))` and `f` the fidelity of the two
/// channel pairs consumed by the fusion.
pub fn fused_state(f: f64) -> Result<DensityOperator> {
    check_unit_interval(f, "fidelity f")?;
    let phimm = phi_minus().tensor(&phi_minus()); // (A1,A2) ⊗ (B1,B2)
    let psimm = psi_minus().tensor(&psi_minus());
    let coeff = (2.0 * f - 1.0) / (2.0 * (1.0 - 2.0 * f + 2.0 * f * f));
    let mat = (phimm.projector() + psimm.projector()) * c(0.5)
        + (cross(&phimm, &psimm) + cross(&psimm, &phimm)) * c(coeff);
    DensityOperator::new(mat, vec![2, 2, 2, 2])
}

/// The same fused resource state assembled in the distributed-pair
/// grouping `(A1, B1)(A2, B2)` and then reordered to `(A1, A2, B1, B2)`:
///
/// `(f²/N)·[|Φ⁺Φ⁺⟩⟨Φ⁺Φ⁺| + |Ψ⁺Ψ⁺⟩⟨Ψ⁺Ψ⁺| − (|Φ⁺Φ⁺⟩⟨Ψ⁺Ψ⁺| + h.c.)]`
/// `+ ((1−f)²/N)·[same with Φ⁻, Ψ⁻]`,  `N = 2 − 4f + 4f²`.
///
/// Equal to [`fused_state`] entrywise; kept as an independent construction
/// for cross-validation.
pub fn fused_state_pair_basis(f: f64) -> Result<DensityOperator> {
    check_unit_interval(f, "fidelity f")?;
    let norm = 2.0 - 4.0 * f + 4.0 * f * f;
    let wp = f * f / norm;
    let wm = (1.0 - f) * (1.0 - f) / norm;

    let phpp = phi_plus().tensor(&phi_plus()); // (A1,B1) ⊗ (A2,B2)
    let pspp = psi_plus().tensor(&psi_plus());
    let phmm = phi_minus().tensor(&phi_minus());
    let psmm = psi_minus().tensor(&psi_minus());

    let plus_block = phpp.projector() + pspp.projector()
        - cross(&phpp, &pspp)
        - cross(&pspp, &phpp);
    let minus_block = phmm.projector() + psmm.projector()
        - cross(&phmm, &psmm)
        - cross(&psmm, &phmm);
    let mat = plus_block * c(wp) + minus_block * c(wm);

    // (A1, B1, A2, B2) -> (A1, A2, B1, B2).
    DensityOperator::new(mat, vec![2, 2, 2, 2])?
        .permute_subsystems(&[0, 2, 1, 3])
}

/// Two independent rank-two channel pairs of fidelity `f` arranged on
/// `(A1, A2, B1, B2)`: the pairs span the channel, living on `(A1, B1)`
/// and `(A2, B2)`.
pub fn two_channel_pairs(f: f64) -> Result<DensityOperator> {
    let pair = rank_two_state(f)?;
    pair.tensor(&pair).permute_subsystems(&[0, 2, 1, 3])
}

fn c(x: f64) -> num_complex::Complex64 {
    num_complex::Complex64::new(x, 0.0)
}
