// Copyright 2026 DACQO Contributors
// SPDX-License-Identifier: Apache-2.0

//! State-vector execution with perturbed analog blocks and Pauli-trajectory
//! depolarizing noise.

use std::collections::BTreeMap;

use num_complex::Complex64;
use rand::distr::weighted::WeightedIndex;
use rand::distr::Distribution;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::StandardNormal;
use serde::{Deserialize, Serialize};

use crate::counterdiabatic::Schedule;
use crate::error::{Error, Result};
use crate::gates::{Gate, GateKind};
use crate::linalg::{self, DenseOperator, Embedding, ONE, ZERO};
use crate::par::{self, Execution};
use crate::pauli::Pauli;
use crate::problem::{brute_force_ground_state, spin_label, spins_of_index, GroundTruth, IsingProblem};
use crate::synthesis::{synthesize, Circuit, SynthesisOptions};

/// Largest simulated register.
pub const SIMULATION_QUBIT_CAP: usize = 14;
/// Registers at least this wide parallelize single gate applications.
const PARALLEL_GATE_QUBITS: usize = 12;

/// `2^N` amplitudes, qubit 0 most significant.
#[derive(Clone, Debug, PartialEq)]
pub struct StateVector {
    n: usize,
    amps: Vec<Complex64>,
    scratch: Vec<Complex64>,
}

impl StateVector {
    pub fn basis(n: usize, index: usize) -> Result<Self> {
        linalg::check_dense_cap(n, SIMULATION_QUBIT_CAP, "state vector")?;
        let dim = 1usize << n;
        if index >= dim {
            return Err(Error::arg(format!("basis index {index} outside dimension {dim}")));
        }
        let mut amps = vec![ZERO; dim];
        amps[index] = ONE;
        Ok(StateVector { n, amps, scratch: vec![ZERO; dim] })
    }

    /// `|1⟩^⊗N`, the ground state of the rotated driver `ΣZ`.
    pub fn all_ones(n: usize) -> Result<Self> {
        Self::basis(n, (1usize << n) - 1)
    }

    pub fn from_amplitudes(amps: Vec<Complex64>) -> Result<Self> {
        let dim = amps.len();
        if !dim.is_power_of_two() {
            return Err(Error::arg("amplitude count must be a power of two"));
        }
        let n = dim.trailing_zeros() as usize;
        linalg::check_dense_cap(n, SIMULATION_QUBIT_CAP, "state vector")?;
        Ok(StateVector { n, amps, scratch: vec![ZERO; dim] })
    }

    pub fn n_qubits(&self) -> usize {
        self.n
    }

    pub fn amplitudes(&self) -> &[Complex64] {
        &self.amps
    }

    pub fn norm_sqr(&self) -> f64 {
        self.amps.iter().map(|a| a.norm_sqr()).sum()
    }

    fn exec_for(&self, exec: Execution) -> Execution {
        if self.n >= PARALLEL_GATE_QUBITS {
            exec
        } else {
            Execution::Sequential
        }
    }

    /// Applies a local unitary on `qubits` (first qubit most significant locally).
    pub fn apply_unitary(&mut self, qubits: &[usize], u: &DenseOperator) -> Result<()> {
        if let Some(&q) = qubits.iter().find(|&&q| q >= self.n) {
            return Err(Error::arg(format!("qubit {q} outside width {}", self.n)));
        }
        if u.nrows() != 1 << qubits.len() || !u.is_square() {
            return Err(Error::arg("unitary dimension does not match the qubit count"));
        }
        self.apply_embedded(&Embedding::new(qubits, self.n), u, Execution::default());
        Ok(())
    }

    pub(crate) fn apply_embedded(&mut self, emb: &Embedding, u: &DenseOperator, exec: Execution) {
        let exec = self.exec_for(exec);
        let amps = &self.amps;
        par::fill_indexed(exec, &mut self.scratch, |x| {
            let row = emb.local(x);
            let base = x & !emb.mask;
            emb.spread.iter().enumerate().map(|(col, &s)| u[(row, col)] * amps[base | s]).sum()
        });
        std::mem::swap(&mut self.amps, &mut self.scratch);
    }

    /// Applies `gate`, or `override_unitary` on the gate's qubits when given.
    pub fn apply_gate(&mut self, gate: &Gate, override_unitary: Option<&DenseOperator>) -> Result<()> {
        gate.validate(self.n)?;
        match override_unitary {
            Some(u) => self.apply_unitary(&gate.qubits, u),
            None => self.apply_unitary(&gate.qubits, &gate.unitary()?),
        }
    }

    pub fn apply_pauli(&mut self, q: usize, p: Pauli) {
        let bit = 1usize << (self.n - 1 - q);
        match p {
            Pauli::I => {}
            Pauli::X => {
                for x in 0..self.amps.len() {
                    if x & bit == 0 {
                        self.amps.swap(x, x | bit);
                    }
                }
            }
            Pauli::Y => {
                for x in 0..self.amps.len() {
                    if x & bit == 0 {
                        let (a0, a1) = (self.amps[x], self.amps[x | bit]);
                        self.amps[x] = Complex64::new(0.0, -1.0) * a1;
                        self.amps[x | bit] = Complex64::new(0.0, 1.0) * a0;
                    }
                }
            }
            Pauli::Z => {
                for (x, a) in self.amps.iter_mut().enumerate() {
                    if x & bit != 0 {
                        *a = -*a;
                    }
                }
            }
        }
    }

    /// Measurement probabilities in the X basis; index bit 0 ↔ `|+⟩`.
    pub fn x_basis_probabilities(&self) -> Vec<f64> {
        let mut a = self.amps.clone();
        let s = std::f64::consts::FRAC_1_SQRT_2;
        for q in 0..self.n {
            let bit = 1usize << (self.n - 1 - q);
            for x in 0..a.len() {
                if x & bit == 0 {
                    let (u, v) = (a[x], a[x | bit]);
                    a[x] = (u + v) * s;
                    a[x | bit] = (u - v) * s;
                }
            }
        }
        a.iter().map(|z| z.norm_sqr()).collect()
    }
}

/// Analog perturbation and depolarizing rates.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct NoiseModel {
    /// Amplitude `c` of the additive Gaussian perturbation of GMS gates.
    #[serde(rename = "c", default)]
    pub analog_noise_amplitude: f64,
    /// Per-qubit depolarizing probability after each gate.
    #[serde(rename = "p", default)]
    pub depolarizing_rate: f64,
    /// Rate used after multi-qubit gates instead of `p`, when set.
    #[serde(rename = "p_entangling", default, skip_serializing_if = "Option::is_none")]
    pub entangling_rate: Option<f64>,
    #[serde(default)]
    pub seed: u64,
}

impl Default for NoiseModel {
    fn default() -> Self {
        NoiseModel::noiseless()
    }
}

impl NoiseModel {
    pub fn noiseless() -> Self {
        NoiseModel { analog_noise_amplitude: 0.0, depolarizing_rate: 0.0, entangling_rate: None, seed: 0 }
    }

    pub fn new(c: f64, p: f64, seed: u64) -> Result<Self> {
        NoiseModel { analog_noise_amplitude: c, depolarizing_rate: p, entangling_rate: None, seed }.validated()
    }

    /// Digital baseline whose two-qubit gates reach `fidelity` under
    /// independent depolarizing on both qubits: `(1 − p₂)² = fidelity`.
    pub fn digital_equivalent(fidelity: f64, single_qubit_rate: f64, seed: u64) -> Result<Self> {
        if !(0.0..=1.0).contains(&fidelity) {
            return Err(Error::arg("fidelity must lie in [0, 1]"));
        }
        NoiseModel {
            analog_noise_amplitude: 0.0,
            depolarizing_rate: single_qubit_rate,
            entangling_rate: Some(1.0 - fidelity.sqrt()),
            seed,
        }
        .validated()
    }

    pub fn validated(self) -> Result<Self> {
        let ok = |p: f64| (0.0..=1.0).contains(&p);
        if !(self.analog_noise_amplitude.is_finite() && self.analog_noise_amplitude >= 0.0) {
            return Err(Error::arg("noise amplitude c must be nonnegative"));
        }
        if !ok(self.depolarizing_rate) || !self.entangling_rate.is_none_or(ok) {
            return Err(Error::arg("depolarizing rates must lie in [0, 1]"));
        }
        Ok(self)
    }

    pub fn with_amplitude(mut self, c: f64) -> Self {
        self.analog_noise_amplitude = c;
        self
    }

    pub fn with_seed(mut self, seed: u64) -> Self {
        self.seed = seed;
        self
    }

    fn rate_for(&self, gate: &Gate) -> f64 {
        if gate.is_multiqubit() {
            self.entangling_rate.unwrap_or(self.depolarizing_rate)
        } else {
            self.depolarizing_rate
        }
    }

    pub fn is_noiseless(&self) -> bool {
        self.analog_noise_amplitude == 0.0 && self.depolarizing_rate == 0.0 && self.entangling_rate.unwrap_or(0.0) == 0.0
    }
}

fn splitmix64(mut z: u64) -> u64 {
    z = z.wrapping_add(0x9E37_79B9_7F4A_7C15);
    z = (z ^ (z >> 30)).wrapping_mul(0xBF58_476D_1CE4_E5B9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94D0_49BB_1331_11EB);
    z ^ (z >> 31)
}

/// Counter-based seed derivation: a stream seed for `(master, path…)`.
pub fn derive_seed(master: u64, path: &[u64]) -> u64 {
    path.iter().fold(splitmix64(master), |acc, &p| splitmix64(acc ^ splitmix64(p)))
}

const STREAM_ANALOG: u64 = 1;
const STREAM_DEPOLARIZING: u64 = 2;
const STREAM_SHOTS: u64 = 3;

/// Nearest unitary to `U + c·G`, `G` a seeded complex Gaussian matrix with
/// unit-variance entries.
pub fn perturb_analog_block(u: &DenseOperator, c: f64, seed: u64) -> Result<DenseOperator> {
    if !(c.is_finite() && c >= 0.0) {
        return Err(Error::arg("noise amplitude c must be nonnegative"));
    }
    if c == 0.0 {
        return Ok(u.clone());
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let s = std::f64::consts::FRAC_1_SQRT_2;
    let g = DenseOperator::from_fn(u.nrows(), u.ncols(), |_, _| {
        let re: f64 = rng.sample(StandardNormal);
        let im: f64 = rng.sample(StandardNormal);
        Complex64::new(re * s, im * s)
    });
    linalg::polar_unitary(&(u + g * Complex64::new(c, 0.0)))
}

/// `|Tr(U†V)|/d`.
pub fn gate_fidelity(u: &DenseOperator, v: &DenseOperator) -> Result<f64> {
    if u.shape() != v.shape() || !u.is_square() {
        return Err(Error::arg("gate fidelity needs square operators of equal dimension"));
    }
    let tr: Complex64 = u.iter().zip(v.iter()).map(|(a, b)| a.conj() * b).sum();
    Ok(tr.norm() / u.nrows() as f64)
}

/// Outcome of a trajectory ensemble.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct RunResult {
    pub success_probability: f64,
    /// Standard error of the trajectory mean.
    pub stderr: f64,
    pub trajectories: usize,
    /// Mean fidelity of the perturbed analog blocks (1 without perturbation).
    pub gms_fidelity: f64,
    /// Sampled X-basis outcomes keyed by spin label.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub shots: Option<BTreeMap<String, usize>>,
}

struct Trajectory {
    success: f64,
    fidelity_sum: f64,
    perturbed: usize,
    probabilities: Option<Vec<f64>>,
}

/// Trajectory runner.
#[derive(Clone, Debug)]
pub struct Simulator {
    pub noise: NoiseModel,
    pub trajectories: usize,
    pub shots: usize,
    pub execution: Execution,
}

impl Simulator {
    pub fn new(noise: NoiseModel, trajectories: usize) -> Self {
        Simulator { noise, trajectories, shots: 0, execution: Execution::default() }
    }

    pub fn shots(mut self, shots: usize) -> Self {
        self.shots = shots;
        self
    }

    pub fn execution(mut self, execution: Execution) -> Self {
        self.execution = execution;
        self
    }

    /// Final state of a noiseless run from `|1⟩^⊗N`.
    pub fn ideal_state(circuit: &Circuit) -> Result<StateVector> {
        let mut psi = StateVector::all_ones(circuit.width)?;
        for g in circuit.gates() {
            psi.apply_gate(g, None)?;
        }
        Ok(psi)
    }

    pub fn run(&self, circuit: &Circuit, truth: &GroundTruth) -> Result<RunResult> {
        let n = circuit.width;
        linalg::check_dense_cap(n, SIMULATION_QUBIT_CAP, "simulation")?;
        if self.trajectories == 0 {
            return Err(Error::arg("at least one trajectory is required"));
        }
        let noise = self.noise.validated()?;
        let gates: Vec<&Gate> = circuit.gates().collect();
        let unitaries = gates.iter().map(|g| g.unitary()).collect::<Result<Vec<_>>>()?;
        let embeddings: Vec<Embedding> = gates.iter().map(|g| Embedding::new(&g.qubits, n)).collect();
        let optima = truth.indices();
        let count = if noise.is_noiseless() { 1 } else { self.trajectories };
        let keep_probs = self.shots > 0;
        let inner = if count > 1 { Execution::Sequential } else { self.execution };

        let results: Vec<Result<Trajectory>> = par::map_range(self.execution, count, |t| {
            let mut psi = StateVector::all_ones(n)?;
            let mut rng = ChaCha8Rng::seed_from_u64(derive_seed(noise.seed, &[STREAM_DEPOLARIZING, t as u64]));
            let mut fidelity_sum = 0.0;
            let mut perturbed = 0;
            for (g, gate) in gates.iter().enumerate() {
                let analog = matches!(gate.kind, GateKind::Gms | GateKind::GmsConjugate);
                if analog && noise.analog_noise_amplitude > 0.0 {
                    let seed = derive_seed(noise.seed, &[STREAM_ANALOG, t as u64, g as u64]);
                    let v = perturb_analog_block(&unitaries[g], noise.analog_noise_amplitude, seed)?;
                    fidelity_sum += gate_fidelity(&unitaries[g], &v)?;
                    perturbed += 1;
                    psi.apply_embedded(&embeddings[g], &v, inner);
                } else {
                    psi.apply_embedded(&embeddings[g], &unitaries[g], inner);
                }
                let p = noise.rate_for(gate);
                if p > 0.0 {
                    for &q in &gate.qubits {
                        let r: f64 = rng.random();
                        if r < p {
                            let which = [Pauli::X, Pauli::Y, Pauli::Z][((3.0 * r / p) as usize).min(2)];
                            psi.apply_pauli(q, which);
                        }
                    }
                }
            }
            let probs = psi.x_basis_probabilities();
            let success = optima.iter().map(|&i| probs[i]).sum::<f64>().clamp(0.0, 1.0);
            Ok(Trajectory { success, fidelity_sum, perturbed, probabilities: keep_probs.then_some(probs) })
        });
        let results = results.into_iter().collect::<Result<Vec<_>>>()?;

        let m = results.len() as f64;
        let mean = results.iter().map(|r| r.success).sum::<f64>() / m;
        let stderr = if results.len() > 1 {
            let var = results.iter().map(|r| (r.success - mean).powi(2)).sum::<f64>() / (m - 1.0);
            (var / m).sqrt()
        } else {
            0.0
        };
        let perturbed: usize = results.iter().map(|r| r.perturbed).sum();
        let gms_fidelity = if perturbed > 0 { results.iter().map(|r| r.fidelity_sum).sum::<f64>() / perturbed as f64 } else { 1.0 };
        let shots = if keep_probs { Some(self.sample(&results, n)?) } else { None };
        Ok(RunResult { success_probability: mean, stderr, trajectories: results.len(), gms_fidelity, shots })
    }

    fn sample(&self, results: &[Trajectory], n: usize) -> Result<BTreeMap<String, usize>> {
        let dim = 1usize << n;
        let mut mean = vec![0.0; dim];
        for r in results {
            for (m, p) in mean.iter_mut().zip(r.probabilities.as_ref().expect("probabilities kept")) {
                *m += p / results.len() as f64;
            }
        }
        let dist = WeightedIndex::new(&mean).map_err(|e| Error::Numerical(format!("sampling weights: {e}")))?;
        let mut rng = ChaCha8Rng::seed_from_u64(derive_seed(self.noise.seed, &[STREAM_SHOTS]));
        let mut counts = BTreeMap::new();
        for _ in 0..self.shots {
            let x = dist.sample(&mut rng);
            *counts.entry(spin_label(&spins_of_index(x, n))).or_insert(0) += 1;
        }
        Ok(counts)
    }
}

/// Runs `circuit` from `|1⟩^⊗N` and scores the X-basis overlap with the optima.
pub fn run(circuit: &Circuit, truth: &GroundTruth, noise: &NoiseModel, trajectories: usize) -> Result<RunResult> {
    Simulator::new(*noise, trajectories).run(circuit, truth)
}

/// One point of a fidelity sweep.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct SweepPoint {
    pub c: f64,
    pub fidelity: f64,
    pub success_probability: f64,
    pub stderr: f64,
}

/// Success probability over a grid of analog noise amplitudes, sorted by fidelity.
///
/// Every point shares the master seed of `base`, so perturbations and
/// Pauli draws are common across the grid.
pub fn success_vs_fidelity_sweep(
    problem: &IsingProblem,
    schedule: &Schedule,
    block_size: usize,
    c_grid: &[f64],
    trajectories: usize,
    base: &NoiseModel,
) -> Result<Vec<SweepPoint>> {
    if c_grid.is_empty() {
        return Err(Error::arg("the noise grid is empty"));
    }
    let circuit = synthesize(problem, schedule, &SynthesisOptions::auto(problem, block_size))?.circuit;
    let truth = brute_force_ground_state(problem)?;
    let mut points = c_grid
        .iter()
        .map(|&c| {
            let r = run(&circuit, &truth, &base.with_amplitude(c), trajectories)?;
            Ok(SweepPoint { c, fidelity: r.gms_fidelity, success_probability: r.success_probability, stderr: r.stderr })
        })
        .collect::<Result<Vec<_>>>()?;
    points.sort_by(|a, b| a.fidelity.total_cmp(&b.fidelity));
    Ok(points)
}
