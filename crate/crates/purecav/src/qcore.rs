//! Dense complex linear algebra for finite-dimensional quantum systems.
//!
//! Conventions used throughout the crate:
//!
//! * Composite spaces are built with [`tensor`] (Kronecker products); the
//!   *first* tensor factor is subsystem 0 and owns the most significant
//!   digit of a basis index. For qubits, `|b0 b1 … b{k-1}⟩` maps to the
//!   flat index `b0·2^{k-1} + … + b{k-1}`.
//! * Subsystem lists (`keep`, `on`) are strictly increasing; results keep
//!   the surviving subsystems in their original relative order.
//! * Density operators are validated on construction (hermiticity, unit
//!   trace, positivity up to a small negative tolerance); intermediate
//!   measurement branches live in [`UnnormalizedDensity`], which skips
//!   the unit-trace requirement until normalization.

use nalgebra::{DMatrix, DVector};
use num_complex::Complex64 as C64;

use crate::{Error, Result};

/// Dense complex matrix used for all operators.
pub type CMatrix = DMatrix<C64>;
/// Dense complex vector used for all state vectors.
pub type CVector = DVector<C64>;

/// Hermiticity tolerance for operator validation.
pub(crate) const TOL_HERM: f64 = 1e-10;
/// Unit-trace tolerance for density-operator validation.
pub(crate) const TOL_TRACE: f64 = 1e-10;
/// Most negative eigenvalue tolerated by the positivity check.
pub(crate) const TOL_EIG_NEG: f64 = 1e-9;
/// Probabilities below this threshold are treated as null outcomes.
pub(crate) const TOL_PROB: f64 = 1e-12;

/// Kronecker product `a ⊗ b`; `a` becomes the more significant factor.
pub fn tensor(a: &CMatrix, b: &CMatrix) -> CMatrix {
    a.kronecker(b)
}

/// Kronecker product of a whole list of factors, left to right.
pub fn tensor_all(factors: &[&CMatrix]) -> CMatrix {
    assert!(!factors.is_empty(), "tensor_all needs at least one factor");
    let mut out = factors[0].clone();
    for m in &factors[1..] {
        out = out.kronecker(m);
    }
    out
}

/// Complex identity matrix of dimension `n`.
pub fn identity(n: usize) -> CMatrix {
    CMatrix::identity(n, n)
}

/// Largest entrywise modulus of `m`.
pub fn max_abs(m: &CMatrix) -> f64 {
    m.iter().fold(0.0_f64, |acc, z| acc.max(z.norm()))
}

/// Largest entrywise modulus of `a - b`.
pub fn max_abs_diff(a: &CMatrix, b: &CMatrix) -> f64 {
    assert_eq!(a.shape(), b.shape(), "max_abs_diff: shape mismatch");
    let mut acc = 0.0_f64;
    for (x, y) in a.iter().zip(b.iter()) {
        acc = acc.max((x - y).norm());
    }
    acc
}

/// Checks `m ≈ m†` entrywise within `tol`.
pub fn is_hermitian(m: &CMatrix, tol: f64) -> bool {
    if !m.is_square() {
        return false;
    }
    let n = m.nrows();
    for r in 0..n {
        for c in r..n {
            if (m[(r, c)] - m[(c, r)].conj()).norm() > tol {
                return false;
            }
        }
    }
    true
}

/// Checks `m·m† ≈ 1` entrywise within `tol`.
pub fn is_unitary(m: &CMatrix, tol: f64) -> bool {
    if !m.is_square() {
        return false;
    }
    let prod = m * m.adjoint();
    max_abs_diff(&prod, &identity(m.nrows())) <= tol
}

/// Row-major strides for a composite space: subsystem `i` advances the
/// flat index by `strides[i]`.
pub(crate) fn strides(dims: &[usize]) -> Vec<usize> {
    let mut s = vec![1usize; dims.len()];
    for i in (0..dims.len().saturating_sub(1)).rev() {
        s[i] = s[i + 1] * dims[i + 1];
    }
    s
}

/// Writes the mixed-radix digits of `idx` over `dims` into `digits`.
pub(crate) fn decompose(mut idx: usize, dims: &[usize], digits: &mut [usize]) {
    for i in (0..dims.len()).rev() {
        digits[i] = idx % dims[i];
        idx /= dims[i];
    }
}

fn check_subsystem_list(list: &[usize], num: usize, what: &str) -> Result<()> {
    if list.is_empty() {
        return Err(Error::InvalidOperator(format!("{what}: empty subsystem list")));
    }
    for w in list.windows(2) {
        if w[0] >= w[1] {
            return Err(Error::InvalidOperator(format!(
                "{what}: subsystem list must be strictly increasing, got {list:?}"
            )));
        }
    }
    if *list.last().unwrap() >= num {
        return Err(Error::InvalidOperator(format!(
            "{what}: subsystem index {} out of range for {} subsystems",
            list.last().unwrap(),
            num
        )));
    }
    Ok(())
}

/// Normalized state vector.
#[derive(Clone, Debug)]
pub struct Ket {
    vec: CVector,
}

impl Ket {
    /// Wraps a vector that is already normalized (‖v‖ = 1 within 1e-10).
    pub fn new(vec: CVector) -> Result<Self> {
        let n = vec.norm();
        if (n - 1.0).abs() > 1e-10 {
            return Err(Error::InvalidOperator(format!(
                "ket norm is {n:.6e}, expected 1"
            )));
        }
        Ok(Self { vec })
    }

    /// Normalizes an arbitrary nonzero vector into a ket.
    pub fn normalized(vec: CVector) -> Result<Self> {
        let n = vec.norm();
        if n < 1e-300 {
            return Err(Error::InvalidOperator("cannot normalize zero vector".into()));
        }
        Ok(Self { vec: vec / C64::new(n, 0.0) })
    }

    /// Computational basis vector `|idx⟩` in dimension `dim`.
    pub fn basis(dim: usize, idx: usize) -> Self {
        assert!(idx < dim, "basis index out of range");
        let mut vec = CVector::zeros(dim);
        vec[idx] = C64::new(1.0, 0.0);
        Self { vec }
    }

    /// Multi-qubit computational basis ket; `bits[0]` is the most
    /// significant (leftmost) qubit.
    pub fn from_bits(bits: &[u8]) -> Self {
        let mut idx = 0usize;
        for &b in bits {
            assert!(b < 2, "qubit value must be 0 or 1");
            idx = idx * 2 + b as usize;
        }
        Self::basis(1 << bits.len(), idx)
    }

    /// Dimension of the underlying vector.
    pub fn dim(&self) -> usize {
        self.vec.len()
    }

    /// Borrow the amplitudes.
    pub fn vector(&self) -> &CVector {
        &self.vec
    }

    /// Tensor product of two kets.
    pub fn tensor(&self, other: &Ket) -> Ket {
        Ket { vec: self.vec.kronecker(&other.vec) }
    }

    /// Rank-one projector `|ψ⟩⟨ψ|`.
    pub fn projector(&self) -> CMatrix {
        &self.vec * self.vec.adjoint()
    }
}

/// `(|00⟩ + |11⟩)/√2`.
pub fn phi_plus() -> Ket {
    bell(1.0, 0, 3)
}

/// `(|00⟩ - |11⟩)/√2`.
pub fn phi_minus() -> Ket {
    bell(-1.0, 0, 3)
}

/// `(|01⟩ + |10⟩)/√2`.
pub fn psi_plus() -> Ket {
    bell(1.0, 1, 2)
}

/// `(|01⟩ - |10⟩)/√2`.
pub fn psi_minus() -> Ket {
    bell(-1.0, 1, 2)
}

fn bell(sign: f64, i: usize, j: usize) -> Ket {
    let s = std::f64::consts::FRAC_1_SQRT_2;
    let mut vec = CVector::zeros(4);
    vec[i] = C64::new(s, 0.0);
    vec[j] = C64::new(sign * s, 0.0);
    Ket { vec }
}

/// Overlap `⟨ψ|ρ|ψ⟩` of a matrix with a pure state.
pub fn ket_fidelity(rho: &CMatrix, ket: &Ket) -> f64 {
    assert_eq!(rho.nrows(), ket.dim(), "ket_fidelity: dimension mismatch");
    (ket.vector().adjoint() * rho * ket.vector())[(0, 0)].re
}

/// Fidelity of a two-qubit state with `(|00⟩+|11⟩)/√2`.
pub fn bell_fidelity(rho: &DensityOperator) -> Result<f64> {
    if rho.dim() != 4 {
        return Err(Error::InvalidOperator(format!(
            "bell_fidelity expects a two-qubit state, got dimension {}",
            rho.dim()
        )));
    }
    Ok(ket_fidelity(rho.matrix(), &phi_plus()))
}

/// Trace distance `½‖a − b‖₁` of two Hermitian matrices.
pub fn trace_distance(a: &CMatrix, b: &CMatrix) -> f64 {
    assert_eq!(a.shape(), b.shape(), "trace_distance: shape mismatch");
    let diff = a - b;
    debug_assert!(is_hermitian(&diff, 1e-8), "trace_distance needs Hermitian inputs");
    let eig = diff.symmetric_eigen();
    0.5 * eig.eigenvalues.iter().map(|x| x.abs()).sum::<f64>()
}

/// Unitary `exp(−i · scale · t · h)` of a Hermitian generator, computed
/// by exact eigendecomposition (no step-size error at any `t`).
pub fn expm_hermitian(h: &CMatrix, t: f64, scale: f64) -> Result<CMatrix> {
    if !is_hermitian(h, TOL_HERM * max_abs(h).max(1.0)) {
        return Err(Error::InvalidOperator(
            "expm_hermitian: generator is not Hermitian".into(),
        ));
    }
    let eig = h.clone().symmetric_eigen();
    let phases = CVector::from_iterator(
        eig.eigenvalues.len(),
        eig.eigenvalues.iter().map(|&lam| {
            let phi = -scale * t * lam;
            C64::new(phi.cos(), phi.sin())
        }),
    );
    let v = eig.eigenvectors;
    Ok(&v * CMatrix::from_diagonal(&phases) * v.adjoint())
}

/// Density operator with explicit subsystem structure.
///
/// Construction validates hermiticity, unit trace, and positivity, so a
/// value of this type is always a physical state.
#[derive(Clone, Debug)]
pub struct DensityOperator {
    mat: CMatrix,
    dims: Vec<usize>,
}

impl DensityOperator {
    /// Validates and wraps a matrix over subsystems of sizes `dims`.
    pub fn new(mat: CMatrix, dims: Vec<usize>) -> Result<Self> {
        let d: usize = dims.iter().product();
        if dims.contains(&0) {
            return Err(Error::InvalidOperator("subsystem of dimension 0".into()));
        }
        if mat.nrows() != d || mat.ncols() != d {
            return Err(Error::InvalidOperator(format!(
                "matrix is {}x{} but subsystem sizes {:?} give dimension {}",
                mat.nrows(),
                mat.ncols(),
                dims,
                d
            )));
        }
        let scale = max_abs(&mat).max(1.0);
        if !is_hermitian(&mat, TOL_HERM * scale) {
            return Err(Error::InvalidOperator("density matrix is not Hermitian".into()));
        }
        let tr = mat.trace();
        if (tr.re - 1.0).abs() > TOL_TRACE || tr.im.abs() > TOL_TRACE {
            return Err(Error::InvalidOperator(format!(
                "density matrix trace is {tr}, expected 1"
            )));
        }
        let min_eig = min_eigenvalue(&mat);
        if min_eig < -TOL_EIG_NEG {
            return Err(Error::InvalidOperator(format!(
                "density matrix has negative eigenvalue {min_eig:.3e}"
            )));
        }
        Ok(Self { mat, dims })
    }

    /// Wraps a matrix that is physical by construction (hot paths);
    /// validation still runs in debug builds.
    pub(crate) fn trusted(mat: CMatrix, dims: Vec<usize>) -> Self {
        debug_assert!({
            let d: usize = dims.iter().product();
            d == mat.nrows() && d == mat.ncols()
        });
        Self { mat, dims }
    }

    /// `|ψ⟩⟨ψ|` over the given subsystem structure.
    pub fn from_pure(ket: &Ket, dims: Vec<usize>) -> Result<Self> {
        let d: usize = dims.iter().product();
        if d != ket.dim() {
            return Err(Error::InvalidOperator(format!(
                "ket dimension {} does not match subsystem sizes {:?}",
                ket.dim(),
                dims
            )));
        }
        Ok(Self { mat: ket.projector(), dims })
    }

    /// Validates a matrix as an all-qubit state, inferring the qubit count.
    pub fn qubits(mat: CMatrix) -> Result<Self> {
        let d = mat.nrows();
        if !d.is_power_of_two() || d < 2 {
            return Err(Error::InvalidOperator(format!(
                "dimension {d} is not a power of two"
            )));
        }
        let k = d.trailing_zeros() as usize;
        Self::new(mat, vec![2; k])
    }

    /// Borrow the raw matrix.
    pub fn matrix(&self) -> &CMatrix {
        &self.mat
    }

    /// Consume into the raw matrix.
    pub fn into_matrix(self) -> CMatrix {
        self.mat
    }

    /// Subsystem dimensions, in tensor order.
    pub fn dims(&self) -> &[usize] {
        &self.dims
    }

    /// Total Hilbert-space dimension.
    pub fn dim(&self) -> usize {
        self.mat.nrows()
    }

    /// Number of subsystems.
    pub fn num_subsystems(&self) -> usize {
        self.dims.len()
    }

    /// Tensor product of two states.
    pub fn tensor(&self, other: &Self) -> Self {
        let mut dims = self.dims.clone();
        dims.extend_from_slice(&other.dims);
        Self::trusted(self.mat.kronecker(&other.mat), dims)
    }

    /// Most negative eigenvalue proxy: the smallest eigenvalue of the
    /// Hermitian part (0 ≥ value ≥ −tolerance for a valid state).
    pub fn min_eigenvalue(&self) -> f64 {
        min_eigenvalue(&self.mat)
    }

    /// Traces out every subsystem *not* listed in `keep` (strictly
    /// increasing); survivors keep their relative order.
    pub fn partial_trace(&self, keep: &[usize]) -> Result<Self> {
        check_subsystem_list(keep, self.dims.len(), "partial_trace")?;
        let (mat, dims) = partial_trace_raw(&self.mat, &self.dims, keep);
        Ok(Self::trusted(mat, dims))
    }

    /// Reorders subsystems so that new position `i` carries what was at
    /// position `perm[i]`.
    pub fn permute_subsystems(&self, perm: &[usize]) -> Result<Self> {
        let map = permutation_row_map(&self.dims, perm)?;
        let d = self.dim();
        let mut out = CMatrix::zeros(d, d);
        for c in 0..d {
            let oc = map[c];
            for r in 0..d {
                out[(r, c)] = self.mat[(map[r], oc)];
            }
        }
        let dims = perm.iter().map(|&p| self.dims[p]).collect();
        Ok(Self::trusted(out, dims))
    }

    /// Projects subsystems `on` (strictly increasing) onto `outcome` and
    /// discards them. Returns the unnormalized remainder together with
    /// the outcome probability.
    pub fn project(&self, outcome: &Ket, on: &[usize]) -> Result<(UnnormalizedDensity, f64)> {
        check_subsystem_list(on, self.dims.len(), "project")?;
        let d_on: usize = on.iter().map(|&i| self.dims[i]).product();
        if outcome.dim() != d_on {
            return Err(Error::InvalidOperator(format!(
                "outcome ket dimension {} does not match projected subsystems ({})",
                outcome.dim(),
                d_on
            )));
        }
        let st = strides(&self.dims);
        let keep: Vec<usize> = (0..self.dims.len()).filter(|i| !on.contains(i)).collect();
        let dims_rem: Vec<usize> = keep.iter().map(|&i| self.dims[i]).collect();
        let d_rem: usize = dims_rem.iter().product::<usize>().max(1);

        // Flat offsets contributed by the projected and kept subsystems.
        let off_on = subspace_offsets(&self.dims, &st, on);
        let base_rem = subspace_offsets(&self.dims, &st, &keep);

        let v = outcome.vector();
        let mut out = CMatrix::zeros(d_rem, d_rem);
        for cr in 0..d_rem {
            for rr in 0..d_rem {
                let mut acc = C64::new(0.0, 0.0);
                for ro in 0..d_on {
                    let amp_r = v[ro].conj();
                    if amp_r.norm_sqr() == 0.0 {
                        continue;
                    }
                    let row = base_rem[rr] + off_on[ro];
                    for co in 0..d_on {
                        let amp_c = v[co];
                        if amp_c.norm_sqr() == 0.0 {
                            continue;
                        }
                        acc += amp_r * self.mat[(row, base_rem[cr] + off_on[co])] * amp_c;
                    }
                }
                out[(rr, cr)] = acc;
            }
        }
        let prob = out.trace().re.max(0.0);
        let dims_out = if dims_rem.is_empty() { vec![1] } else { dims_rem };
        Ok((UnnormalizedDensity { mat: out, dims: dims_out }, prob))
    }
}

/// Flat-index offsets spanned by the listed subsystems (all other
/// subsystem digits held at zero), in mixed-radix order.
fn subspace_offsets(dims: &[usize], st: &[usize], subs: &[usize]) -> Vec<usize> {
    let sub_dims: Vec<usize> = subs.iter().map(|&i| dims[i]).collect();
    let total: usize = sub_dims.iter().product::<usize>().max(1);
    let mut digits = vec![0usize; subs.len()];
    let mut out = Vec::with_capacity(total);
    for idx in 0..total {
        decompose(idx, &sub_dims, &mut digits);
        out.push(digits.iter().zip(subs).map(|(&d, &s)| d * st[s]).sum());
    }
    out
}

/// Row relabeling for a subsystem permutation: entry `r` is the old flat
/// index that lands at new flat index `r`.
fn permutation_row_map(dims: &[usize], perm: &[usize]) -> Result<Vec<usize>> {
    let k = dims.len();
    let mut seen = vec![false; k];
    if perm.len() != k {
        return Err(Error::InvalidOperator(format!(
            "permutation length {} does not match {} subsystems",
            perm.len(),
            k
        )));
    }
    for &p in perm {
        if p >= k || seen[p] {
            return Err(Error::InvalidOperator(format!("invalid permutation {perm:?}")));
        }
        seen[p] = true;
    }
    let st = strides(dims);
    let new_dims: Vec<usize> = perm.iter().map(|&p| dims[p]).collect();
    let d: usize = dims.iter().product();
    let mut digits = vec![0usize; k];
    let mut map = Vec::with_capacity(d);
    for r in 0..d {
        decompose(r, &new_dims, &mut digits);
        map.push(digits.iter().zip(perm).map(|(&dg, &p)| dg * st[p]).sum());
    }
    Ok(map)
}

/// Partial trace on a raw matrix; `keep` must be validated by the caller.
pub(crate) fn partial_trace_raw(
    mat: &CMatrix,
    dims: &[usize],
    keep: &[usize],
) -> (CMatrix, Vec<usize>) {
    let st = strides(dims);
    let traced: Vec<usize> = (0..dims.len()).filter(|i| !keep.contains(i)).collect();
    let dims_keep: Vec<usize> = keep.iter().map(|&i| dims[i]).collect();
    let d_keep: usize = dims_keep.iter().product();
    let d_tr: usize = traced.iter().map(|&i| dims[i]).product::<usize>().max(1);

    let off_keep = subspace_offsets(dims, &st, keep);
    let off_tr = subspace_offsets(dims, &st, &traced);

    debug_assert_eq!(off_tr.len(), d_tr);
    let mut out = CMatrix::zeros(d_keep, d_keep);
    for &base in &off_tr {
        for c in 0..d_keep {
            let col = base + off_keep[c];
            for r in 0..d_keep {
                out[(r, c)] += mat[(base + off_keep[r], col)];
            }
        }
    }
    (out, dims_keep)
}

/// Positive-weight operator produced by measurement branches; it becomes
/// a [`DensityOperator`] once normalized.
#[derive(Clone, Debug)]
pub struct UnnormalizedDensity {
    /// Raw (subnormalized) matrix.
    pub mat: CMatrix,
    /// Subsystem dimensions, in tensor order.
    pub dims: Vec<usize>,
}

impl UnnormalizedDensity {
    /// Zero operator over the given subsystem structure.
    pub fn zeros(dims: Vec<usize>) -> Self {
        let d: usize = dims.iter().product();
        Self { mat: CMatrix::zeros(d, d), dims }
    }

    /// Trace of the operator (the accumulated branch weight).
    pub fn weight(&self) -> f64 {
        self.mat.trace().re
    }

    /// Adds another branch with the same subsystem structure.
    pub fn accumulate(&mut self, other: &UnnormalizedDensity) {
        assert_eq!(self.dims, other.dims, "accumulate: subsystem mismatch");
        self.mat += &other.mat;
    }

    /// Divides by the weight and validates the result as a state; fails
    /// with [`Error::NullOutcome`] when the weight is (numerically) zero.
    pub fn normalize(&self) -> Result<DensityOperator> {
        let w = self.weight();
        if w < TOL_PROB {
            return Err(Error::NullOutcome(w));
        }
        DensityOperator::new(self.mat.map(|z| z / w), self.dims.clone())
    }
}

fn min_eigenvalue(mat: &CMatrix) -> f64 {
    let herm = (mat + mat.adjoint()).map(|z| z * 0.5);
    let eig = herm.symmetric_eigen();
    eig.eigenvalues.iter().fold(f64::INFINITY, |a, &b| a.min(b))
}

#[cfg(test)]
mod tests {
    use super::*;

    fn pauli_x() -> CMatrix {
        CMatrix::from_row_slice(2, 2, &[
            C64::new(0.0, 0.0), C64::new(1.0, 0.0),
            C64::new(1.0, 0.0), C64::new(0.0, 0.0),
        ])
    }

    fn diag_state(p: &[f64]) -> CMatrix {
        CMatrix::from_diagonal(&CVector::from_iterator(
            p.len(),
            p.iter().map(|&x| C64::new(x, 0.0)),
        ))
    }

    #[test]
    fn ket_from_bits_uses_leftmost_bit_as_most_significant() {
        let k = Ket::from_bits(&[1, 0]);
        assert_eq!(k.dim(), 4);
        assert_eq!(k.vector()[2], C64::new(1.0, 0.0));
        let k = Ket::from_bits(&[0, 1, 1]);
        assert_eq!(k.vector()[3], C64::new(1.0, 0.0));
    }

    #[test]
    fn tensor_puts_first_factor_on_most_significant_digit() {
        let x = pauli_x();
        let id = identity(2);
        let xi = tensor(&x, &id);
        // X ⊗ 1 flips the first qubit: |00⟩ -> |10⟩, i.e. column 0 row 2.
        assert_eq!(xi[(2, 0)], C64::new(1.0, 0.0));
        assert_eq!(xi[(0, 2)], C64::new(1.0, 0.0));
        assert_eq!(xi[(1, 0)], C64::new(0.0, 0.0));
    }

    #[test]
    fn partial_trace_recovers_product_factors() {
        let a = diag_state(&[0.25, 0.75]);
        let b = diag_state(&[0.1, 0.2, 0.7]);
        let ab = DensityOperator::new(tensor(&a, &b), vec![2, 3]).unwrap();
        let ra = ab.partial_trace(&[0]).unwrap();
        let rb = ab.partial_trace(&[1]).unwrap();
        assert!(max_abs_diff(ra.matrix(), &a) < 1e-14);
        assert!(max_abs_diff(rb.matrix(), &b) < 1e-14);
        assert_eq!(ra.dims(), &[2]);
        assert_eq!(rb.dims(), &[3]);
    }

    #[test]
    fn partial_trace_of_bell_pair_is_maximally_mixed() {
        let rho = DensityOperator::from_pure(&phi_plus(), vec![2, 2]).unwrap();
        let red = rho.partial_trace(&[1]).unwrap();
        assert!(max_abs_diff(red.matrix(), &diag_state(&[0.5, 0.5])) < 1e-14);
    }

    #[test]
    fn permute_subsystems_moves_factors() {
        let a = diag_state(&[1.0, 0.0]);
        let b = diag_state(&[0.0, 1.0]);
        let c = diag_state(&[0.5, 0.5]);
        let abc = DensityOperator::new(tensor_all(&[&a, &b, &c]), vec![2, 2, 2]).unwrap();
        // New order (c, a, b): new position i carries old subsystem perm[i].
        let p = abc.permute_subsystems(&[2, 0, 1]).unwrap();
        assert!(max_abs_diff(p.partial_trace(&[0]).unwrap().matrix(), &c) < 1e-14);
        assert!(max_abs_diff(p.partial_trace(&[1]).unwrap().matrix(), &a) < 1e-14);
        assert!(max_abs_diff(p.partial_trace(&[2]).unwrap().matrix(), &b) < 1e-14);
    }

    #[test]
    fn permute_round_trip_is_identity() {
        let bell = DensityOperator::from_pure(&phi_plus(), vec![2, 2]).unwrap();
        let mixed = bell.tensor(&DensityOperator::new(diag_state(&[0.3, 0.7]), vec![2]).unwrap());
        let fwd = mixed.permute_subsystems(&[1, 2, 0]).unwrap();
        let back = fwd.permute_subsystems(&[2, 0, 1]).unwrap();
        assert!(max_abs_diff(back.matrix(), mixed.matrix()) < 1e-14);
    }

    #[test]
    fn permute_rejects_non_permutations() {
        let bell = DensityOperator::from_pure(&phi_plus(), vec![2, 2]).unwrap();
        assert!(bell.permute_subsystems(&[0, 0]).is_err());
        assert!(bell.permute_subsystems(&[0]).is_err());
        assert!(bell.permute_subsystems(&[0, 2]).is_err());
    }

    #[test]
    fn project_on_definite_outcome() {
        let rho = DensityOperator::from_pure(&Ket::from_bits(&[0, 1]), vec![2, 2]).unwrap();
        let (rem, p) = rho.project(&Ket::basis(2, 0), &[0]).unwrap();
        assert!((p - 1.0).abs() < 1e-14);
        let rem = rem.normalize().unwrap();
        assert!(max_abs_diff(rem.matrix(), &diag_state(&[0.0, 1.0])) < 1e-14);

        let (null, p0) = rho.project(&Ket::basis(2, 1), &[0]).unwrap();
        assert!(p0 < 1e-14);
        assert!(matches!(null.normalize(), Err(Error::NullOutcome(_))));
    }

    #[test]
    fn project_bell_pair_halves_probability() {
        let rho = DensityOperator::from_pure(&phi_plus(), vec![2, 2]).unwrap();
        let (rem, p) = rho.project(&Ket::basis(2, 0), &[1]).unwrap();
        assert!((p - 0.5).abs() < 1e-14);
        let rem = rem.normalize().unwrap();
        assert!(max_abs_diff(rem.matrix(), &diag_state(&[1.0, 0.0])) < 1e-14);
    }

    #[test]
    fn project_multiple_subsystems_at_once() {
        // |0⟩|+⟩|1⟩ projected on |0⟩|1⟩ over subsystems (0, 2).
        let plus = Ket::normalized(CVector::from_vec(vec![
            C64::new(1.0, 0.0),
            C64::new(1.0, 0.0),
        ]))
        .unwrap();
        let psi = Ket::basis(2, 0).tensor(&plus).tensor(&Ket::basis(2, 1));
        let rho = DensityOperator::from_pure(&psi, vec![2, 2, 2]).unwrap();
        let (rem, p) = rho.project(&Ket::from_bits(&[0, 1]), &[0, 2]).unwrap();
        assert!((p - 1.0).abs() < 1e-12);
        let rem = rem.normalize().unwrap();
        assert!(max_abs_diff(rem.matrix(), &plus.projector()) < 1e-12);
    }

    #[test]
    fn expm_hermitian_matches_pauli_rotation() {
        let theta = 0.7;
        let u = expm_hermitian(&pauli_x(), theta, 1.0).unwrap();
        // exp(-iθX) = cosθ·1 − i sinθ·X.
        let expect = identity(2).map(|z| z * C64::new(theta.cos(), 0.0))
            + pauli_x().map(|z| z * C64::new(0.0, -theta.sin()));
        assert!(max_abs_diff(&u, &expect) < 1e-14);
        assert!(is_unitary(&u, 1e-12));
    }

    #[test]
    fn expm_hermitian_rejects_non_hermitian_input() {
        let mut m = pauli_x();
        m[(0, 1)] = C64::new(2.0, 0.0);
        assert!(expm_hermitian(&m, 1.0, 1.0).is_err());
    }

    #[test]
    fn trace_distance_basics() {
        let a = diag_state(&[1.0, 0.0]);
        let b = diag_state(&[0.0, 1.0]);
        assert!((trace_distance(&a, &b) - 1.0).abs() < 1e-14);
        assert!(trace_distance(&a, &a) < 1e-14);
        let c = diag_state(&[0.8, 0.2]);
        assert!((trace_distance(&a, &c) - 0.2).abs() < 1e-14);
    }

    #[test]
    fn bell_fidelity_distinguishes_bell_states() {
        let p = DensityOperator::from_pure(&phi_plus(), vec![2, 2]).unwrap();
        let m = DensityOperator::from_pure(&phi_minus(), vec![2, 2]).unwrap();
        let s = DensityOperator::from_pure(&psi_plus(), vec![2, 2]).unwrap();
        assert!((bell_fidelity(&p).unwrap() - 1.0).abs() < 1e-14);
        assert!(bell_fidelity(&m).unwrap().abs() < 1e-14);
        assert!(bell_fidelity(&s).unwrap().abs() < 1e-14);
    }

    #[test]
    fn density_operator_validation_rejects_bad_inputs() {
        // Non-Hermitian.
        let mut m = diag_state(&[0.5, 0.5]);
        m[(0, 1)] = C64::new(0.3, 0.0);
        assert!(DensityOperator::new(m, vec![2]).is_err());
        // Wrong trace.
        assert!(DensityOperator::new(diag_state(&[0.7, 0.7]), vec![2]).is_err());
        // Negative eigenvalue.
        assert!(DensityOperator::new(diag_state(&[1.5, -0.5]), vec![2]).is_err());
        // Dimension mismatch.
        assert!(DensityOperator::new(diag_state(&[0.5, 0.5]), vec![3]).is_err());
    }

    #[test]
    fn unnormalized_accumulate_and_normalize() {
        let rho = DensityOperator::from_pure(&phi_plus(), vec![2, 2]).unwrap();
        let (b0, p0) = rho.project(&Ket::basis(2, 0), &[1]).unwrap();
        let (b1, p1) = rho.project(&Ket::basis(2, 1), &[1]).unwrap();
        let mut acc = UnnormalizedDensity::zeros(vec![2]);
        acc.accumulate(&b0);
        acc.accumulate(&b1);
        assert!((acc.weight() - (p0 + p1)).abs() < 1e-14);
        let total = acc.normalize().unwrap();
        assert!(max_abs_diff(total.matrix(), &diag_state(&[0.5, 0.5])) < 1e-14);
    }

    #[test]
    fn is_unitary_flags_non_unitary() {
        assert!(is_unitary(&identity(3), 1e-12));
        assert!(!is_unitary(&diag_state(&[0.5, 0.5]), 1e-12));
    }
}
