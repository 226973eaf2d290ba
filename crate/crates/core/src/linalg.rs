// Copyright 2026 DACQO Contributors
// SPDX-License-Identifier: Apache-2.0

//! Dense complex linear algebra on `2^N`-dimensional operators.
//!
//! Qubit 0 is the most significant bit of a basis index, so operator
//! matrices follow the Kronecker order `op(q0) ⊗ op(q1) ⊗ …`.

use nalgebra::{DMatrix, DVector};
use num_complex::Complex64;

use crate::error::{Error, Result};

pub type DenseOperator = DMatrix<Complex64>;

pub const ZERO: Complex64 = Complex64::new(0.0, 0.0);
pub const ONE: Complex64 = Complex64::new(1.0, 0.0);
pub const I: Complex64 = Complex64::new(0.0, 1.0);

/// Largest qubit count for which dense `2^N × 2^N` operators are built.
pub const DENSE_QUBIT_CAP: usize = 14;

pub fn check_dense_cap(n: usize, cap: usize, what: &str) -> Result<()> {
    if n > cap {
        return Err(Error::cap(format!("{what}: {n} qubits exceeds the cap of {cap}")));
    }
    Ok(())
}

pub fn identity(dim: usize) -> DenseOperator {
    DMatrix::identity(dim, dim)
}

/// Kronecker product `a ⊗ b`.
pub fn kron(a: &DenseOperator, b: &DenseOperator) -> DenseOperator {
    a.kronecker(b)
}

/// Matrix exponential by Padé scaling-and-squaring.
pub fn expm(a: &DenseOperator) -> DenseOperator {
    a.clone().exp()
}

/// `exp(−i·t·H)` for a Hermitian `H`.
pub fn evolve(h: &DenseOperator, t: f64) -> DenseOperator {
    expm(&(h * Complex64::new(0.0, -t)))
}

pub fn commutator(a: &DenseOperator, b: &DenseOperator) -> DenseOperator {
    a * b - b * a
}

/// Normalized Hilbert–Schmidt norm squared, `Tr(A†A)/d`.
pub fn hs_norm_sq(a: &DenseOperator) -> f64 {
    a.iter().map(|z| z.norm_sqr()).sum::<f64>() / a.nrows() as f64
}

/// Maximum absolute entry.
pub fn max_abs(a: &DenseOperator) -> f64 {
    a.iter().fold(0.0, |m, z| m.max(z.norm()))
}

pub fn hermiticity_error(a: &DenseOperator) -> f64 {
    max_abs(&(a - a.adjoint()))
}

/// `‖U†U − I‖∞` (entrywise maximum).
pub fn unitarity_error(u: &DenseOperator) -> f64 {
    max_abs(&(u.adjoint() * u - identity(u.nrows())))
}

/// Spectral norm (largest singular value).
pub fn operator_norm(a: &DenseOperator) -> f64 {
    a.clone().singular_values().iter().fold(0.0, |m: f64, &s| m.max(s))
}

/// Nearest unitary in Frobenius norm: `W V†` from the SVD `A = W Σ V†`.
pub fn polar_unitary(a: &DenseOperator) -> Result<DenseOperator> {
    let svd = a.clone().svd(true, true);
    match (svd.u, svd.v_t) {
        (Some(u), Some(v_t)) => Ok(u * v_t),
        _ => Err(Error::Numerical("SVD did not return singular vectors".into())),
    }
}

/// Eigenvalues and eigenvectors of a unitary.
///
/// The Hermitian and anti-Hermitian parts of a unitary commute, so a generic
/// real combination of them shares its eigenvectors with `U`. This avoids the
/// unbounded Schur iteration on matrices close to the identity.
fn normal_eigen(a: &DenseOperator) -> (DenseOperator, Vec<Complex64>) {
    let half = Complex64::new(0.5, 0.0);
    let re = (a + a.adjoint()) * half;
    let im = (a - a.adjoint()) * Complex64::new(0.0, -0.5);
    let h = &re + &im * Complex64::new(0.618_033_988_749_894_9, 0.0);
    let h = (&h + h.adjoint()) * half;
    let q = nalgebra::linalg::SymmetricEigen::new(h).eigenvectors;
    let vals = (0..q.ncols())
        .map(|i| {
            let v = q.column(i);
            (v.adjoint() * a * v)[(0, 0)]
        })
        .collect();
    (q, vals)
}

/// Eigenphases of a unitary in `(−π, π]`.
pub fn eigenphases(u: &DenseOperator) -> Vec<f64> {
    normal_eigen(u).1.iter().map(|z| z.arg()).collect()
}

/// Hermitian generator `G` with `U = exp(−iG)`, principal branch.
pub fn unitary_log(u: &DenseOperator) -> DenseOperator {
    let (q, vals) = normal_eigen(u);
    let d = DMatrix::from_diagonal(&DVector::from_iterator(
        vals.len(),
        vals.iter().map(|z| Complex64::new(-z.arg(), 0.0)),
    ));
    let g = &q * d * q.adjoint();
    (&g + g.adjoint()) * Complex64::new(0.5, 0.0)
}

/// `min_φ ‖U − e^{iφ} V‖₂` for unitaries `U`, `V`.
///
/// The spectral norm of `U − e^{iφ}V` is the largest distance between
/// `e^{iφ}` and an eigenvalue of `U V†`, so the optimum centres `φ` on the
/// smallest arc holding every eigenphase.
pub fn phase_invariant_distance(u: &DenseOperator, v: &DenseOperator) -> Result<f64> {
    if u.shape() != v.shape() {
        return Err(Error::arg("operator dimensions differ"));
    }
    let mut phases = eigenphases(&(u * v.adjoint()));
    phases.sort_by(|a, b| a.total_cmp(b));
    let n = phases.len();
    let mut largest_gap: f64 = 0.0;
    for i in 0..n {
        let next = if i + 1 < n { phases[i + 1] } else { phases[0] + std::f64::consts::TAU };
        largest_gap = largest_gap.max(next - phases[i]);
    }
    let half_arc = ((std::f64::consts::TAU - largest_gap) / 2.0).clamp(0.0, std::f64::consts::PI);
    Ok(2.0 * (half_arc / 2.0).sin())
}

/// `min_φ ‖a − e^{iφ} b‖₂` for state vectors.
pub fn state_distance(a: &[Complex64], b: &[Complex64]) -> f64 {
    let overlap: Complex64 = a.iter().zip(b).map(|(x, y)| y.conj() * x).sum();
    let phase = if overlap.norm() > 0.0 { overlap / overlap.norm() } else { ONE };
    a.iter()
        .zip(b)
        .map(|(x, y)| (x - phase * y).norm_sqr())
        .sum::<f64>()
        .sqrt()
}

/// `|⟨a|b⟩|²`.
pub fn state_fidelity(a: &[Complex64], b: &[Complex64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| x.conj() * y).sum::<Complex64>().norm_sqr()
}

/// Index bookkeeping for applying a `k`-qubit operator inside an `n`-qubit space.
#[derive(Clone, Debug)]
pub(crate) struct Embedding {
    /// Full-index bit pattern for every local index.
    pub spread: Vec<usize>,
    /// Union of the target bits.
    pub mask: usize,
}

impl Embedding {
    pub fn new(qubits: &[usize], n: usize) -> Self {
        let k = qubits.len();
        let bits: Vec<usize> = qubits.iter().map(|&q| 1usize << (n - 1 - q)).collect();
        let spread = (0..1usize << k)
            .map(|l| {
                (0..k)
                    .filter(|j| l >> (k - 1 - j) & 1 == 1)
                    .fold(0, |acc, j| acc | bits[j])
            })
            .collect();
        let mask = bits.iter().fold(0, |a, b| a | b);
        Embedding { spread, mask }
    }

    /// Local index of a full basis index.
    #[inline]
    pub fn local(&self, x: usize) -> usize {
        // spread is monotone in l, so recover l bit by bit
        let k = self.spread.len().trailing_zeros() as usize;
        let mut l = 0;
        for j in 0..k {
            if x & self.spread[1 << (k - 1 - j)] != 0 {
                l |= 1 << (k - 1 - j);
            }
        }
        l
    }
}

/// Full `2^n` matrix of a local operator acting on `qubits`.
pub fn embed(local: &DenseOperator, qubits: &[usize], n: usize) -> DenseOperator {
    let dim = 1usize << n;
    let emb = Embedding::new(qubits, n);
    let mut out = DMatrix::zeros(dim, dim);
    for col in 0..dim {
        let lc = emb.local(col);
        let base = col & !emb.mask;
        for (lr, &s) in emb.spread.iter().enumerate() {
            let v = local[(lr, lc)];
            if v != ZERO {
                out[(base | s, col)] = v;
            }
        }
    }
    out
}
