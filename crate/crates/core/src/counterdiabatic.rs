// Copyright 2026 DACQO Contributors
// SPDX-License-Identifier: Apache-2.0

//! Adiabatic and counterdiabatic Hamiltonians and the first-order gauge
//! potential coefficient α₁.
//!
//! Two frames appear. The computational frame holds
//! `H(t) = λ H_f + (1−λ) ΣX + λ̇ A` with `A = 2α₁(Σ h Y + Σ J (YZ + ZY))`.
//! The rotated frame conjugates every qubit by a Hadamard (`Z ↔ X`,
//! `Y → −Y`) so the problem becomes diagonal in the X basis and the driver
//! becomes `ΣZ`; the circuits are built in this frame.

use std::f64::consts::PI;

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::linalg::{self, check_dense_cap, DenseOperator, DENSE_QUBIT_CAP};
use crate::pauli::{Pauli, PauliString, PauliSum};
use crate::problem::IsingProblem;

/// Qubit cap for the commutator oracle.
pub const ORACLE_QUBIT_CAP: usize = 8;
/// Qubit cap for the reference evolution.
pub const EVOLUTION_QUBIT_CAP: usize = 10;

#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
pub enum ScheduleProfile {
    /// `λ = sin²((π/2) sin²(πt/2T))`.
    #[default]
    #[serde(rename = "sin2sin2")]
    Sin2Sin2,
    /// `λ = 3s² − 2s³`, `s = t/T`.
    #[serde(rename = "linear-smoothstep")]
    LinearSmoothstep,
}

/// Annealing schedule `λ(t)` on `[0, T]` split into `n` trotter steps.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct Schedule {
    #[serde(rename = "T")]
    total_time: f64,
    #[serde(rename = "steps")]
    trotter_steps: usize,
    #[serde(default)]
    profile: ScheduleProfile,
}

impl Schedule {
    pub fn new(total_time: f64, trotter_steps: usize, profile: ScheduleProfile) -> Result<Self> {
        if !(total_time.is_finite() && total_time > 0.0) {
            return Err(Error::arg(format!("total time must be positive, got {total_time}")));
        }
        if trotter_steps == 0 {
            return Err(Error::arg("at least one trotter step is required"));
        }
        Ok(Schedule { total_time, trotter_steps, profile })
    }

    /// Default `sin²∘sin²` profile.
    pub fn standard(total_time: f64, trotter_steps: usize) -> Result<Self> {
        Self::new(total_time, trotter_steps, ScheduleProfile::Sin2Sin2)
    }

    /// Rejects documents that bypassed [`Schedule::new`].
    pub fn validated(self) -> Result<Self> {
        Self::new(self.total_time, self.trotter_steps, self.profile)
    }

    pub fn total_time(&self) -> f64 {
        self.total_time
    }

    pub fn trotter_steps(&self) -> usize {
        self.trotter_steps
    }

    pub fn profile(&self) -> ScheduleProfile {
        self.profile
    }

    pub fn with_steps(&self, steps: usize) -> Result<Self> {
        Self::new(self.total_time, steps, self.profile)
    }

    /// `T / n`.
    pub fn step_duration(&self) -> f64 {
        self.total_time / self.trotter_steps as f64
    }

    /// Midpoint `(s − ½)T/n` of step `s ∈ [1, n]`.
    pub fn midpoint(&self, step: usize) -> Result<f64> {
        if step == 0 || step > self.trotter_steps {
            return Err(Error::arg(format!("step {step} outside [1, {}]", self.trotter_steps)));
        }
        Ok((step as f64 - 0.5) * self.step_duration())
    }

    pub fn lambda(&self, t: f64) -> f64 {
        let t = t.clamp(0.0, self.total_time);
        match self.profile {
            ScheduleProfile::Sin2Sin2 => {
                let v = PI * t / (2.0 * self.total_time);
                let u = PI / 2.0 * v.sin().powi(2);
                u.sin().powi(2)
            }
            ScheduleProfile::LinearSmoothstep => {
                let s = t / self.total_time;
                s * s * (3.0 - 2.0 * s)
            }
        }
    }

    pub fn lambda_dot(&self, t: f64) -> f64 {
        let t = t.clamp(0.0, self.total_time);
        let tt = self.total_time;
        match self.profile {
            ScheduleProfile::Sin2Sin2 => {
                let v = PI * t / (2.0 * tt);
                let u = PI / 2.0 * v.sin().powi(2);
                (2.0 * u).sin() * (PI / 2.0) * (2.0 * v).sin() * PI / (2.0 * tt)
            }
            ScheduleProfile::LinearSmoothstep => {
                let s = t / tt;
                6.0 * s * (1.0 - s) / tt
            }
        }
    }
}

/// Whether the counterdiabatic term is included.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Driving {
    #[default]
    Counterdiabatic,
    /// CD terms removed (`θ^{xy} = θ^y = 0`).
    Adiabatic,
}

/// Coefficient sums entering the closed forms of Γ₁, Γ₂.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct CouplingSums {
    pub h2: f64,
    pub h4: f64,
    /// `Σ_{i<j} J²`.
    pub j2: f64,
    /// `Σ_{i<j} J⁴`.
    pub j4: f64,
    /// `Σ_{i≠j} h_i² J_ij²` over ordered pairs.
    pub h2j2: f64,
    /// `Σ_{i<j<k} (J_ij²J_ik² + J_ij²J_jk² + J_ik²J_jk²)`.
    pub triples: f64,
}

impl CouplingSums {
    pub fn of(problem: &IsingProblem) -> Self {
        let h = problem.fields();
        let h2 = h.iter().map(|x| x * x).sum();
        let h4 = h.iter().map(|x| x.powi(4)).sum();
        let mut j2 = 0.0;
        let mut j4 = 0.0;
        let mut h2j2 = 0.0;
        let n = problem.n_qubits();
        let mut node_j2 = vec![0.0; n];
        let mut node_j4 = vec![0.0; n];
        for (&(a, b), &v) in problem.couplings() {
            let v2 = v * v;
            j2 += v2;
            j4 += v2 * v2;
            h2j2 += (h[a] * h[a] + h[b] * h[b]) * v2;
            for q in [a, b] {
                node_j2[q] += v2;
                node_j4[q] += v2 * v2;
            }
        }
        // every product of two distinct edges sharing one vertex
        let triples = node_j2.iter().zip(&node_j4).map(|(s2, s4)| (s2 * s2 - s4) / 2.0).sum();
        CouplingSums { h2, h4, j2, j4, h2j2, triples }
    }

    /// The operator `Σ h Y + Σ J (YZ + ZY)` vanishes.
    pub fn is_trivial(&self) -> bool {
        self.h2 == 0.0 && self.j2 == 0.0
    }
}

/// `Γ₁ = Tr(O₁†O₁)/2^N = 4Σh² + 8Σ_{i<j}J²`.
pub fn gamma1_closed_form(problem: &IsingProblem) -> f64 {
    let s = CouplingSums::of(problem);
    4.0 * s.h2 + 8.0 * s.j2
}

fn denominator_r(s: &CouplingSums, lambda: f64) -> f64 {
    let a = (1.0 - lambda).powi(2) * (s.h2 + 8.0 * s.j2);
    let b = lambda.powi(2) * (s.h4 + 2.0 * s.j4 + 6.0 * s.h2j2 + 6.0 * s.triples);
    a + b
}

/// `Γ₂ = Tr(O₂†O₂)/2^N = 16 R(λ)`.
pub fn gamma2_closed_form(problem: &IsingProblem, lambda: f64) -> f64 {
    16.0 * denominator_r(&CouplingSums::of(problem), lambda)
}

fn check_lambda(lambda: f64) -> Result<()> {
    if !(0.0..=1.0).contains(&lambda) {
        return Err(Error::arg(format!("λ = {lambda} outside [0, 1]")));
    }
    Ok(())
}

/// `α₁ = −Γ₁/Γ₂ = −¼(Σh² + 2Σ_{i<j}J²)/R(λ)`.
pub fn alpha1_analytic(problem: &IsingProblem, lambda: f64) -> Result<f64> {
    check_lambda(lambda)?;
    let s = CouplingSums::of(problem);
    let r = denominator_r(&s, lambda);
    if r <= f64::MIN_POSITIVE {
        return Err(Error::Singularity(format!("R(λ = {lambda}) vanishes")));
    }
    Ok(-0.25 * (s.h2 + 2.0 * s.j2) / r)
}

/// Dense diagonal `H_f` (offset excluded).
pub fn problem_hamiltonian(problem: &IsingProblem) -> Result<DenseOperator> {
    let n = problem.n_qubits();
    check_dense_cap(n, DENSE_QUBIT_CAP, "problem Hamiltonian")?;
    let dim = 1usize << n;
    let diag = nalgebra::DVector::from_fn(dim, |x, _| Complex64::new(problem.energy_of_index(x), 0.0));
    Ok(DenseOperator::from_diagonal(&diag))
}

fn sum_single(n: usize, p: Pauli) -> PauliSum {
    let mut s = PauliSum::new();
    for q in 0..n {
        s.add(PauliString::single(n, q, p), 1.0);
    }
    s
}

/// `λ H_f + (1 − λ) ΣX`.
pub fn adiabatic_hamiltonian(problem: &IsingProblem, lambda: f64) -> Result<DenseOperator> {
    check_lambda(lambda)?;
    let hf = problem_hamiltonian(problem)?;
    let drive = sum_single(problem.n_qubits(), Pauli::X).dense(problem.n_qubits());
    Ok(hf * Complex64::new(lambda, 0.0) + drive * Complex64::new(1.0 - lambda, 0.0))
}

/// `Σ h_i Y_i + Σ J_ij (Y_i Z_j + Z_i Y_j)` in the computational frame.
pub fn cd_operator(problem: &IsingProblem) -> PauliSum {
    let n = problem.n_qubits();
    let mut s = PauliSum::new();
    for (q, &h) in problem.fields().iter().enumerate() {
        if h != 0.0 {
            s.add(PauliString::single(n, q, Pauli::Y), h);
        }
    }
    for (&(a, b), &j) in problem.couplings() {
        if j != 0.0 {
            s.add(PauliString::pair(n, a, Pauli::Y, b, Pauli::Z), j);
            s.add(PauliString::pair(n, a, Pauli::Z, b, Pauli::Y), j);
        }
    }
    s
}

/// `A^{(1)} = 2α₁(λ)(Σ h Y + Σ J (YZ + ZY))`; the `λ̇` factor is left to callers.
pub fn cd_generator(problem: &IsingProblem, lambda: f64) -> Result<DenseOperator> {
    check_dense_cap(problem.n_qubits(), DENSE_QUBIT_CAP, "CD generator")?;
    let op = cd_operator(problem);
    let dim = 1usize << problem.n_qubits();
    if op.is_empty() {
        return Ok(DenseOperator::zeros(dim, dim));
    }
    let alpha = alpha1_analytic(problem, lambda)?;
    Ok(op.dense(problem.n_qubits()) * Complex64::new(2.0 * alpha, 0.0))
}

/// `Γ₁`, `Γ₂` and `α₁` from dense nested commutators.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct CommutatorNorms {
    pub gamma1: f64,
    pub gamma2: f64,
}

impl CommutatorNorms {
    pub fn alpha1(&self) -> f64 {
        -self.gamma1 / self.gamma2
    }
}

/// `O₁ = [H_ad, ∂_λ H_ad]`.
pub fn first_commutator(problem: &IsingProblem, lambda: f64) -> Result<DenseOperator> {
    check_dense_cap(problem.n_qubits(), ORACLE_QUBIT_CAP, "commutator oracle")?;
    let h = adiabatic_hamiltonian(problem, lambda)?;
    let dh = problem_hamiltonian(problem)? - sum_single(problem.n_qubits(), Pauli::X).dense(problem.n_qubits());
    Ok(linalg::commutator(&h, &dh))
}

pub fn commutator_norms(problem: &IsingProblem, lambda: f64) -> Result<CommutatorNorms> {
    let h = adiabatic_hamiltonian(problem, lambda)?;
    let o1 = first_commutator(problem, lambda)?;
    let o2 = linalg::commutator(&h, &o1);
    Ok(CommutatorNorms { gamma1: linalg::hs_norm_sq(&o1), gamma2: linalg::hs_norm_sq(&o2) })
}

/// `−‖O₁‖²/‖O₂‖²` from dense matrices.
pub fn alpha1_oracle(problem: &IsingProblem, lambda: f64) -> Result<f64> {
    let norms = commutator_norms(problem, lambda)?;
    if norms.gamma2 <= f64::MIN_POSITIVE {
        return Err(Error::Singularity(format!("‖O₂‖ vanishes at λ = {lambda}")));
    }
    Ok(norms.alpha1())
}

/// Schedule quantities at one instant.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct InstantCoefficients {
    pub lambda: f64,
    pub lambda_dot: f64,
    /// Zero when the CD operator vanishes identically.
    pub alpha1: f64,
}

impl InstantCoefficients {
    pub fn at(problem: &IsingProblem, schedule: &Schedule, t: f64) -> Result<Self> {
        if !(0.0..=schedule.total_time()).contains(&t) {
            return Err(Error::arg(format!("t = {t} outside [0, {}]", schedule.total_time())));
        }
        let lambda = schedule.lambda(t);
        let lambda_dot = schedule.lambda_dot(t);
        let alpha1 = if CouplingSums::of(problem).is_trivial() { 0.0 } else { alpha1_analytic(problem, lambda)? };
        Ok(InstantCoefficients { lambda, lambda_dot, alpha1 })
    }

    /// Coefficient `β` of `Σ h Y + Σ J (YX + XY)` in the rotated frame.
    ///
    /// Hadamard conjugation sends `Y → −Y`, so `β = −2λ̇α₁`.
    pub fn rotated_cd_strength(&self, driving: Driving) -> f64 {
        match driving {
            Driving::Counterdiabatic => -2.0 * self.lambda_dot * self.alpha1,
            Driving::Adiabatic => 0.0,
        }
    }
}

/// Rotated-frame Hamiltonian as a Pauli sum.
pub fn rotated_pauli_sum(problem: &IsingProblem, c: &InstantCoefficients, driving: Driving) -> PauliSum {
    let n = problem.n_qubits();
    let beta = c.rotated_cd_strength(driving);
    let mut s = PauliSum::new();
    for (&(a, b), &j) in problem.couplings() {
        if j == 0.0 {
            continue;
        }
        s.add(PauliString::pair(n, a, Pauli::X, b, Pauli::X), c.lambda * j);
        if beta != 0.0 {
            s.add(PauliString::pair(n, a, Pauli::Y, b, Pauli::X), beta * j);
            s.add(PauliString::pair(n, a, Pauli::X, b, Pauli::Y), beta * j);
        }
    }
    for (q, &h) in problem.fields().iter().enumerate() {
        if h != 0.0 {
            s.add(PauliString::single(n, q, Pauli::X), c.lambda * h);
            if beta != 0.0 {
                s.add(PauliString::single(n, q, Pauli::Y), beta * h);
            }
        }
        s.add(PauliString::single(n, q, Pauli::Z), 1.0 - c.lambda);
    }
    s.pruned(0.0)
}

/// `H′(t) = λ(ΣJXX + ΣhX) + (1−λ)ΣZ − 2λ̇α₁(ΣhY + ΣJ(YX + XY))`.
pub fn rotated_full_hamiltonian(problem: &IsingProblem, schedule: &Schedule, t: f64) -> Result<DenseOperator> {
    check_dense_cap(problem.n_qubits(), DENSE_QUBIT_CAP, "rotated Hamiltonian")?;
    let c = InstantCoefficients::at(problem, schedule, t)?;
    Ok(rotated_pauli_sum(problem, &c, Driving::Counterdiabatic).dense(problem.n_qubits()))
}

/// `H(t) = H_ad(λ(t)) + λ̇ A^{(1)}` in the computational frame.
pub fn full_hamiltonian(problem: &IsingProblem, schedule: &Schedule, t: f64) -> Result<DenseOperator> {
    let c = InstantCoefficients::at(problem, schedule, t)?;
    let h = adiabatic_hamiltonian(problem, c.lambda)?;
    let a = cd_operator(problem).dense(problem.n_qubits()) * Complex64::new(2.0 * c.alpha1 * c.lambda_dot, 0.0);
    Ok(h + a)
}

/// `⊗H` on `n` qubits.
pub fn hadamard_all(n: usize) -> DenseOperator {
    let s = std::f64::consts::FRAC_1_SQRT_2;
    let h = DenseOperator::from_row_slice(2, 2, &[s, s, s, -s].map(|v| Complex64::new(v, 0.0)));
    (1..n).fold(h.clone(), |acc, _| linalg::kron(&acc, &h))
}

pub fn exact_evolution(problem: &IsingProblem, schedule: &Schedule, steps: usize) -> Result<DenseOperator> {
    exact_evolution_with(problem, schedule, steps, Driving::Counterdiabatic)
}

/// `Π_k exp(−i H′(t_k) Δt)` on a midpoint grid of `steps` slices, later slices on the left.
pub fn exact_evolution_with(
    problem: &IsingProblem,
    schedule: &Schedule,
    steps: usize,
    driving: Driving,
) -> Result<DenseOperator> {
    let n = problem.n_qubits();
    check_dense_cap(n, EVOLUTION_QUBIT_CAP, "reference evolution")?;
    if steps == 0 {
        return Err(Error::arg("steps must be positive"));
    }
    let dt = schedule.total_time() / steps as f64;
    let mut u = linalg::identity(1 << n);
    for k in 0..steps {
        let t = (k as f64 + 0.5) * dt;
        let c = InstantCoefficients::at(problem, schedule, t)?;
        let h = rotated_pauli_sum(problem, &c, driving).dense(n);
        u = linalg::evolve(&h, dt) * u;
    }
    Ok(u)
}
