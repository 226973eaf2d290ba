// Copyright 2026 DACQO Contributors
// SPDX-License-Identifier: Apache-2.0

//! Wall-clock cost of layered circuits on a trapped-ion device.

use serde::{Deserialize, Serialize};

use crate::counterdiabatic::Schedule;
use crate::error::{Error, Result};
use crate::problem::IsingProblem;
use crate::synthesis::{synthesize, DepthReport, LayerModel, Method, SynthesisOptions};

/// Gate durations and limits of a device profile.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "HardwareDoc", into = "HardwareDoc")]
pub struct HardwareSpec {
    /// Multi-qubit (GMS) layer duration, seconds.
    pub t_multi: f64,
    /// Single-qubit layer duration, seconds.
    pub t_single: f64,
    pub coherence_time: f64,
    pub max_block: usize,
}

#[derive(Serialize, Deserialize)]
struct HardwareDoc {
    #[serde(rename = "t_M_us")]
    t_m_us: f64,
    #[serde(rename = "t_S_us")]
    t_s_us: f64,
    coherence_s: f64,
    max_block: usize,
}

impl TryFrom<HardwareDoc> for HardwareSpec {
    type Error = Error;

    fn try_from(d: HardwareDoc) -> Result<Self> {
        HardwareSpec::new(d.t_m_us * 1e-6, d.t_s_us * 1e-6, d.coherence_s, d.max_block)
    }
}

impl From<HardwareSpec> for HardwareDoc {
    fn from(s: HardwareSpec) -> Self {
        HardwareDoc { t_m_us: s.t_multi * 1e6, t_s_us: s.t_single * 1e6, coherence_s: s.coherence_time, max_block: s.max_block }
    }
}

impl Default for HardwareSpec {
    /// 930 µs GMS layers, 130 µs rotations, 1 s coherence, 4-ion blocks.
    fn default() -> Self {
        HardwareSpec { t_multi: 930e-6, t_single: 130e-6, coherence_time: 1.0, max_block: 4 }
    }
}

impl HardwareSpec {
    pub fn new(t_multi: f64, t_single: f64, coherence_time: f64, max_block: usize) -> Result<Self> {
        let positive = |v: f64| v.is_finite() && v > 0.0;
        if !(positive(t_multi) && positive(t_single) && positive(coherence_time)) {
            return Err(Error::arg("gate durations and coherence time must be positive"));
        }
        if max_block < 2 {
            return Err(Error::arg("max_block must be at least 2"));
        }
        Ok(HardwareSpec { t_multi, t_single, coherence_time, max_block })
    }

    pub fn from_json(text: &str) -> Result<Self> {
        Ok(serde_json::from_str(text)?)
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("spec serializes")
    }

    /// `t_M · multi + t_S · single`.
    pub fn runtime(&self, multiqubit_layers: f64, single_qubit_layers: f64) -> f64 {
        self.t_multi * multiqubit_layers + self.t_single * single_qubit_layers
    }

    /// Runtime of `steps` repetitions of a per-step layer model.
    pub fn model_runtime(&self, model: &LayerModel, steps: usize) -> f64 {
        self.runtime(model.multiqubit, model.single_qubit) * steps as f64
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct RuntimeReport {
    pub runtime_seconds: f64,
    pub within_coherence: bool,
    /// `R_digital / R_this`, when a digital baseline was supplied.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub enhancement_factor: Option<f64>,
}

impl RuntimeReport {
    /// Attaches the ratio against a digital baseline runtime.
    pub fn against(mut self, digital: &RuntimeReport) -> Self {
        self.enhancement_factor = (self.runtime_seconds > 0.0).then(|| digital.runtime_seconds / self.runtime_seconds);
        self
    }
}

pub fn circuit_runtime(report: &DepthReport, spec: &HardwareSpec) -> RuntimeReport {
    let runtime_seconds = spec.runtime(report.multiqubit_layers as f64, report.single_qubit_layers as f64);
    RuntimeReport { runtime_seconds, within_coherence: runtime_seconds <= spec.coherence_time, enhancement_factor: None }
}

/// Digital and digital-analog runtimes for one block size.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct Enhancement {
    pub block_size: usize,
    pub digital: RuntimeReport,
    pub daqc: RuntimeReport,
    /// `R_digital / R_daqc`.
    pub ratio: f64,
}

/// Synthesizes both paths per block size and compares their runtimes.
///
/// Block sizes beyond `spec.max_block` are allowed: the comparison explores
/// hypothetical devices.
pub fn enhancement_factor(
    problem: &IsingProblem,
    schedule: &Schedule,
    spec: &HardwareSpec,
    block_sizes: &[usize],
) -> Result<Vec<Enhancement>> {
    let digital = synthesize(problem, schedule, &SynthesisOptions::new(Method::Digital, 2))?.circuit;
    let digital = circuit_runtime(&digital.depth_report(), spec);
    block_sizes
        .iter()
        .map(|&k| {
            if !(2..=6).contains(&k) {
                return Err(Error::arg(format!("block size {k} outside [2, 6]")));
            }
            let c = synthesize(problem, schedule, &SynthesisOptions::auto(problem, k))?.circuit;
            let daqc = circuit_runtime(&c.depth_report(), spec).against(&digital);
            let ratio = daqc.enhancement_factor.unwrap_or(f64::INFINITY);
            Ok(Enhancement { block_size: k, digital, daqc, ratio })
        })
        .collect()
}
