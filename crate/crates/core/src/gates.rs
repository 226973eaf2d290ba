// Copyright 2026 DACQO Contributors
// SPDX-License-Identifier: Apache-2.0

//! Native trapped-ion gates and the map from Hamiltonian coefficients to
//! gate angles.
//!
//! `GMS_k(θ, φ) = exp(−iθ/4 (cosφ S_x + sinφ S_y)²)`. Dropping the constant
//! `k` in `S_u² = k + 2Σ_{a<b} u_a u_b`, its generator per pair is
//! `θ/2 (c² XX + cs (XY + YX) + s² YY)` with `c = cosφ`, `s = sinφ`.

use std::f64::consts::FRAC_PI_2;

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::counterdiabatic::{Driving, InstantCoefficients, Schedule};
use crate::error::{Error, Result};
use crate::linalg::{DenseOperator, ONE, ZERO};
use crate::pauli::{Pauli, PauliString, PauliSum};
use crate::problem::IsingProblem;

/// Largest block for which a dense GMS matrix is built.
pub const GMS_QUBIT_CAP: usize = 10;

/// Angles below this magnitude are treated as zero when solving.
pub const ANGLE_EPSILON: f64 = 1e-14;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Axis {
    X,
    Y,
    Z,
}

impl Axis {
    pub fn pauli(self) -> Pauli {
        match self {
            Axis::X => Pauli::X,
            Axis::Y => Pauli::Y,
            Axis::Z => Pauli::Z,
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum GateKind {
    #[serde(rename = "gms")]
    Gms,
    /// Adjoint of a GMS gate, `GMS(θ, φ)†`.
    #[serde(rename = "gms_dag")]
    GmsConjugate,
    #[serde(rename = "1q")]
    SingleQubit,
}

/// A GMS block on `k ≥ 2` ions or a single-qubit rotation `exp(−iθσ/2)`.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Gate {
    pub kind: GateKind,
    pub qubits: Vec<usize>,
    pub theta: f64,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub phi: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub axis: Option<Axis>,
}

impl Gate {
    pub fn gms(qubits: Vec<usize>, theta: f64, phi: f64) -> Self {
        Gate { kind: GateKind::Gms, qubits, theta, phi: Some(phi), axis: None }
    }

    pub fn gms_dag(qubits: Vec<usize>, theta: f64, phi: f64) -> Self {
        Gate { kind: GateKind::GmsConjugate, qubits, theta, phi: Some(phi), axis: None }
    }

    pub fn rotation(qubit: usize, axis: Axis, theta: f64) -> Self {
        Gate { kind: GateKind::SingleQubit, qubits: vec![qubit], theta, phi: None, axis: Some(axis) }
    }

    pub fn is_multiqubit(&self) -> bool {
        self.kind != GateKind::SingleQubit
    }

    /// Checks the structural invariants against a circuit width.
    pub fn validate(&self, width: usize) -> Result<()> {
        let mut seen = self.qubits.clone();
        seen.sort_unstable();
        seen.dedup();
        if seen.len() != self.qubits.len() {
            return Err(Error::arg(format!("repeated qubit in gate {:?}", self.qubits)));
        }
        if let Some(&q) = self.qubits.iter().find(|&&q| q >= width) {
            return Err(Error::arg(format!("qubit {q} outside width {width}")));
        }
        if !self.theta.is_finite() {
            return Err(Error::arg("gate angle is not finite"));
        }
        match self.kind {
            GateKind::SingleQubit if self.qubits.len() != 1 || self.axis.is_none() => {
                Err(Error::arg("single-qubit gates need one qubit and an axis"))
            }
            GateKind::Gms | GateKind::GmsConjugate if self.qubits.len() < 2 || self.phi.is_none() => {
                Err(Error::arg("GMS gates need at least two qubits and a phase"))
            }
            _ => Ok(()),
        }
    }

    /// Local `2^k × 2^k` unitary in the order of `self.qubits`.
    pub fn unitary(&self) -> Result<DenseOperator> {
        let phi = self.phi.unwrap_or(0.0);
        match self.kind {
            GateKind::Gms => gms_unitary(self.qubits.len(), self.theta, phi),
            GateKind::GmsConjugate => Ok(gms_unitary(self.qubits.len(), self.theta, phi)?.adjoint()),
            GateKind::SingleQubit => {
                let axis = self.axis.ok_or_else(|| Error::arg("single-qubit gate without axis"))?;
                Ok(rotation_unitary(axis, self.theta))
            }
        }
    }
}

/// `exp(−iθσ/2)`.
pub fn rotation_unitary(axis: Axis, theta: f64) -> DenseOperator {
    let (c, s) = ((theta / 2.0).cos(), (theta / 2.0).sin());
    let m = |v: [Complex64; 4]| DenseOperator::from_row_slice(2, 2, &v);
    match axis {
        Axis::X => m([c.into(), Complex64::new(0.0, -s), Complex64::new(0.0, -s), c.into()]),
        Axis::Y => m([c.into(), (-s).into(), s.into(), c.into()]),
        Axis::Z => m([Complex64::new(c, -s), ZERO, ZERO, Complex64::new(c, s)]),
    }
}

/// Closed-form `GMS_k(θ, φ)`.
///
/// `S_x` is diagonal in the Hadamard basis with eigenvalue `k − 2|c|`, and
/// `⊗R_z(φ)` rotates `S_x` into `S_u`, which gives
/// `⟨a|GMS|b⟩ = e^{iφ(|a|−|b|)} 2^{−k} Σ_c (−1)^{|(a⊕b)∧c|} e^{−iθ(k−2|c|)²/4}`.
pub fn gms_unitary(k: usize, theta: f64, phi: f64) -> Result<DenseOperator> {
    if !(2..=GMS_QUBIT_CAP).contains(&k) {
        return Err(Error::cap(format!("GMS blocks need 2 ≤ k ≤ {GMS_QUBIT_CAP}, got {k}")));
    }
    let dim = 1usize << k;
    let diag: Vec<Complex64> = (0..dim)
        .map(|c| {
            let e = k as f64 - 2.0 * f64::from((c as u32).count_ones());
            Complex64::from_polar(1.0, -theta * e * e / 4.0)
        })
        .collect();
    let kernel: Vec<Complex64> = (0..dim)
        .map(|m| {
            let sum: Complex64 = diag
                .iter()
                .enumerate()
                .map(|(c, d)| if (m & c).count_ones() % 2 == 0 { *d } else { -*d })
                .sum();
            sum / dim as f64
        })
        .collect();
    Ok(DenseOperator::from_fn(dim, dim, |a, b| {
        let w = f64::from(a.count_ones() as i32 - b.count_ones() as i32);
        kernel[a ^ b] * Complex64::from_polar(1.0, phi * w)
    }))
}

/// `θ/4 (cosφ S_x + sinφ S_y)²` as a dense matrix.
pub fn gms_generator(k: usize, theta: f64, phi: f64) -> DenseOperator {
    let mut su = PauliSum::new();
    for q in 0..k {
        su.add(PauliString::single(k, q, Pauli::X), phi.cos());
        su.add(PauliString::single(k, q, Pauli::Y), phi.sin());
    }
    let m = su.dense(k);
    &m * &m * Complex64::new(theta / 4.0, 0.0)
}

/// Per-pair generator of `GMS_k(θ, φ)` with the constant dropped.
pub fn gms_pair_terms(qubits: &[usize], n: usize, theta: f64, phi: f64) -> PauliSum {
    let (c, s) = (phi.cos(), phi.sin());
    let mut out = PauliSum::new();
    for (i, &a) in qubits.iter().enumerate() {
        for &b in &qubits[i + 1..] {
            add_pair_terms(&mut out, n, a, b, theta * c * c / 2.0, theta * c * s / 2.0, theta * s * s / 2.0);
        }
    }
    out.pruned(0.0)
}

/// `xx·XX + xy·(XY + YX) + yy·YY` on the pair `(a, b)`.
pub fn add_pair_terms(out: &mut PauliSum, n: usize, a: usize, b: usize, xx: f64, xy: f64, yy: f64) {
    if xx != 0.0 {
        out.add(PauliString::pair(n, a, Pauli::X, b, Pauli::X), xx);
    }
    if xy != 0.0 {
        out.add(PauliString::pair(n, a, Pauli::X, b, Pauli::Y), xy);
        out.add(PauliString::pair(n, a, Pauli::Y, b, Pauli::X), xy);
    }
    if yy != 0.0 {
        out.add(PauliString::pair(n, a, Pauli::Y, b, Pauli::Y), yy);
    }
}

/// Trotter angles of one step for a homogeneous instance.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct AngleSet {
    pub theta_xx: f64,
    pub theta_xy: f64,
    pub theta_x: f64,
    pub theta_y: f64,
    pub theta_z: f64,
}

/// Coefficients of one trotter step: `exp(−iH′(t_s)Δ)` split per Pauli term.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct StepAngles {
    pub lambda: f64,
    /// Rotated-frame CD strength `β = −2λ̇α₁` (zero without CD).
    pub beta: f64,
    /// `Δ = T/n`.
    pub dt: f64,
}

impl StepAngles {
    pub fn at(problem: &IsingProblem, schedule: &Schedule, step: usize, driving: Driving) -> Result<Self> {
        let t = schedule.midpoint(step)?;
        let c = InstantCoefficients::at(problem, schedule, t)?;
        Ok(StepAngles { lambda: c.lambda, beta: c.rotated_cd_strength(driving), dt: schedule.step_duration() })
    }

    /// `(θ^{xx}, θ^{xy}) = (λJΔ, βJΔ)`.
    pub fn pair(&self, j: f64) -> (f64, f64) {
        (self.lambda * j * self.dt, self.beta * j * self.dt)
    }

    /// `(θ^x, θ^y) = (λhΔ, βhΔ)`.
    pub fn field(&self, h: f64) -> (f64, f64) {
        (self.lambda * h * self.dt, self.beta * h * self.dt)
    }

    /// `θ^z = (1 − λ)Δ`.
    pub fn theta_z(&self) -> f64 {
        (1.0 - self.lambda) * self.dt
    }
}

/// Angles of step `step ∈ [1, n]` evaluated at its midpoint.
pub fn angle_map(problem: &IsingProblem, schedule: &Schedule, step: usize) -> Result<AngleSet> {
    angle_map_with(problem, schedule, step, Driving::Counterdiabatic)
}

pub fn angle_map_with(problem: &IsingProblem, schedule: &Schedule, step: usize, driving: Driving) -> Result<AngleSet> {
    if !problem.is_homogeneous() {
        return Err(Error::arg("angle_map needs a homogeneous problem; use per-pair angles instead"));
    }
    let j = problem.couplings().values().next().copied().unwrap_or(0.0);
    let h = problem.fields()[0];
    let a = StepAngles::at(problem, schedule, step, driving)?;
    let (theta_xx, theta_xy) = a.pair(j);
    let (theta_x, theta_y) = a.field(h);
    Ok(AngleSet { theta_xx, theta_xy, theta_x, theta_y, theta_z: a.theta_z() })
}

/// One GMS call on a fixed qubit set.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct GmsOp {
    pub conjugate: bool,
    pub theta: f64,
    pub phi: f64,
}

impl GmsOp {
    pub fn gate(&self, qubits: Vec<usize>) -> Gate {
        if self.conjugate {
            Gate::gms_dag(qubits, self.theta, self.phi)
        } else {
            Gate::gms(qubits, self.theta, self.phi)
        }
    }
}

/// GMS prescription for a per-pair target `θ^{xx} XX + θ^{xy} (XY + YX)`.
///
/// Generic case: `θ cos²φ/2 = θ^{xx}` and `θ cosφ sinφ/2 = θ^{xy}`, so
/// `φ = atan(θ^{xy}/θ^{xx})`, `θ = 2(θ^{xx}² + θ^{xy}²)/θ^{xx}`, followed by
/// `GMS(θ sin²φ, π/2)†` against the `θ sin²φ/2 · YY` term.
pub fn solve_gms_angles(theta_xx: f64, theta_xy: f64) -> Vec<GmsOp> {
    let (x, y) = (theta_xx, theta_xy);
    if x.abs() < ANGLE_EPSILON && y.abs() < ANGLE_EPSILON {
        return Vec::new();
    }
    if y.abs() < ANGLE_EPSILON {
        return vec![GmsOp { conjugate: false, theta: 2.0 * x, phi: 0.0 }];
    }
    if x.abs() < ANGLE_EPSILON {
        // φ = π/4 carries XX, XY, YY equally; cancel both spurious parts
        return vec![
            GmsOp { conjugate: false, theta: 4.0 * y, phi: std::f64::consts::FRAC_PI_4 },
            GmsOp { conjugate: true, theta: 2.0 * y, phi: FRAC_PI_2 },
            GmsOp { conjugate: true, theta: 2.0 * y, phi: 0.0 },
        ];
    }
    let phi = (y / x).atan();
    let theta = 2.0 * (x * x + y * y) / x;
    vec![
        GmsOp { conjugate: false, theta, phi },
        GmsOp { conjugate: true, theta: theta * phi.sin().powi(2), phi: FRAC_PI_2 },
    ]
}

/// Sign of the `m`-th iteration (`m ≥ 1` Paulis): `+, −, −, +` repeating.
pub fn iteration_sign(m: usize) -> f64 {
    match m % 4 {
        1 | 0 => 1.0,
        _ => -1.0,
    }
}

/// Expansion of `U Z_l U†` on a `k`-ion block, built by iterated pair conjugations.
///
/// Each pair factor is `exp(−iθ/4 X_l X_m)` (the two-qubit identity
/// `Z_l → cos(θ/2) Z_l − sin(θ/2) Y_l X_m`), i.e. `U = GMS_k(θ/2, 0)` up to phase.
pub fn gms_conjugate_pauli(k: usize, theta: f64, target_qubit: usize) -> Result<PauliSum> {
    if !(2..=5).contains(&k) {
        return Err(Error::cap(format!("conjugation expansion supports 2 ≤ k ≤ 5, got {k}")));
    }
    if target_qubit >= k {
        return Err(Error::arg(format!("target qubit {target_qubit} outside block of {k}")));
    }
    let (c, s) = ((theta / 2.0).cos(), (theta / 2.0).sin());
    let mut terms = vec![(PauliString::single(k, target_qubit, Pauli::Z), ONE)];
    for m in (0..k).filter(|&m| m != target_qubit) {
        let xx = PauliString::pair(k, target_qubit, Pauli::X, m, Pauli::X);
        let mut next = Vec::with_capacity(terms.len() * 2);
        for (p, coef) in terms {
            if p.commutes_with(&xx) {
                next.push((p, coef));
            } else {
                // e^{−iαA} P e^{iαA} = cos2α P + i sin2α P·A for {A, P} = 0
                let (ph, q) = p.mul(&xx);
                next.push((p, coef * c));
                next.push((q, coef * ph * Complex64::new(0.0, s)));
            }
        }
        terms = next;
    }
    let mut out = PauliSum::new();
    for (p, coef) in terms {
        debug_assert!(coef.im.abs() < 1e-12);
        out.add(p, coef.re);
    }
    Ok(out)
}
