//! Three-spin XY ring interaction that realises the in-node entangling
//! gate, together with its exact spectrum and the gate/round propagators.
//!
//! Each node holds three qubits (two register/channel qubits plus one
//! pump qubit) coupled on a closed ring:
//!
//! `H(J) = (J/2) Σ_{⟨i,i+1⟩} (XᵢX_{i+1} + YᵢY_{i+1})`, indices mod 3.
//!
//! The excitation-preserving dynamics of this ring is periodic; gates are
//! extracted at times `T_n = (π/3)(n + ½)/J`. One *pumping round* lets
//! the ring run for twice that (`J·t = (2π/3)(n + ½)`), which is the
//! phase at which the measured-and-conditioned round reproduces its
//! closed-form fidelity recurrences; see `purify` for the round itself.

use nalgebra::DMatrix;
use num_complex::Complex64 as C64;

use crate::qcore::{expm_hermitian, identity, tensor_all, CMatrix};

const SITES: usize = 3;

fn pauli_x() -> CMatrix {
    DMatrix::from_row_slice(2, 2, &[
        C64::new(0.0, 0.0), C64::new(1.0, 0.0),
        C64::new(1.0, 0.0), C64::new(0.0, 0.0),
    ])
}

fn pauli_y() -> CMatrix {
    DMatrix::from_row_slice(2, 2, &[
        C64::new(0.0, 0.0), C64::new(0.0, -1.0),
        C64::new(0.0, 1.0), C64::new(0.0, 0.0),
    ])
}

fn two_site(op: &CMatrix, i: usize, j: usize) -> CMatrix {
    let id = identity(2);
    let factors: Vec<&CMatrix> = (0..SITES)
        .map(|k| if k == i || k == j { op } else { &id })
        .collect();
    tensor_all(&factors)
}

/// Ring-coupled XY Hamiltonian `(J/2) Σ (XX + YY)` on three qubits.
pub fn build_xy(j: f64) -> CMatrix {
    let x = pauli_x();
    let y = pauli_y();
    let mut h = CMatrix::zeros(8, 8);
    for i in 0..SITES {
        let nb = (i + 1) % SITES;
        h += two_site(&x, i, nb) + two_site(&y, i, nb);
    }
    h * C64::new(j / 2.0, 0.0)
}

/// Elementary gate time `T_n = (π/3)(n + ½)/J`.
pub fn gate_time(n: u32, j: f64) -> f64 {
    assert!(j > 0.0, "gate_time requires a positive coupling, got {j}");
    (std::f64::consts::PI / 3.0) * (n as f64 + 0.5) / j
}

/// Exact eigenvalues of [`build_xy`], ascending: `{−J ×4, 0 ×2, 2J ×2}`.
///
/// Obtained by mapping the ring to free fermions: the even-occupation
/// sector quantises the momenta antiperiodically (`±π/3, π`) and the odd
/// sector periodically (`0, ±2π/3`), each mode contributing `2J·cos k`.
pub fn analytic_spectrum(j: f64) -> Vec<f64> {
    vec![-j, -j, -j, -j, 0.0, 0.0, 2.0 * j, 2.0 * j]
}

/// Gate propagator `exp(−i·H(J)·T_n)` on one node's three qubits.
pub fn gate_unitary(j: f64, n: u32) -> CMatrix {
    expm_hermitian(&build_xy(j), gate_time(n, j), 1.0)
        .expect("XY generator is Hermitian by construction")
}

/// Round propagator `exp(−i·H(J)·2T_n)`: the ring runs for twice the
/// elementary gate time during one pumping round. Depends on `J` and `n`
/// only through the dimensionless phase `J·t`, so the induced round map
/// is independent of both.
pub fn round_propagator(j: f64, n: u32) -> CMatrix {
    expm_hermitian(&build_xy(j), 2.0 * gate_time(n, j), 1.0)
        .expect("XY generator is Hermitian by construction")
}

/// Both nodes' round propagators in parallel: a 64×64 unitary on the six
/// qubits `(A1, A2, P_A, B1, B2, P_B)`.
pub fn composite_gate(j: f64, n: u32) -> CMatrix {
    let u = round_propagator(j, n);
    u.kronecker(&u)
}
