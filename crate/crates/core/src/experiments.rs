// Copyright 2026 DACQO Contributors
// SPDX-License-Identifier: Apache-2.0

//! End-to-end studies: solving one instance, noise sweeps, runtime scaling
//! and the required-fidelity extrapolation.
//!
//! Every command returns a [`Report`] of CSV tables plus a JSON sidecar. The
//! output depends only on the configuration, so reruns are byte-identical.

use std::collections::BTreeMap;
use std::path::{Path, PathBuf};

use serde::{Deserialize, Serialize};
use serde_json::json;

use crate::counterdiabatic::{Driving, Schedule};
use crate::error::{Error, Result};
use crate::hardware::{enhancement_factor, HardwareSpec};
use crate::problem::{
    brute_force_ground_state, mis_to_ising, random_spin_glass, selection_of_spins, spin_label, Graph, InstanceClass,
    IsingProblem,
};
use crate::simulator::{derive_seed, NoiseModel, Simulator, SweepPoint};
use crate::synthesis::{synthesize, Circuit, LayerModel, Method, SynthesisOptions};

/// Where the Ising instance comes from.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case", deny_unknown_fields)]
pub enum ProblemSpec {
    /// An Ising document on disk.
    File { path: PathBuf },
    /// A graph document on disk, encoded as weighted MIS.
    GraphFile {
        path: PathBuf,
        #[serde(default)]
        penalty: Option<f64>,
    },
    /// All-to-all with shared `J` and `h`.
    Homogeneous { n: usize, j: f64, h: f64 },
    /// Complete random instance.
    SpinGlass {
        n: usize,
        #[serde(default = "default_class")]
        class: InstanceClass,
    },
    /// Random `G(n, p)` graph encoded as MIS.
    Mis {
        n: usize,
        #[serde(default = "default_edge_probability")]
        edge_probability: f64,
        #[serde(default = "default_class")]
        class: InstanceClass,
        #[serde(default)]
        penalty: Option<f64>,
    },
}

fn default_class() -> InstanceClass {
    InstanceClass::FullyNonuniform
}

fn default_edge_probability() -> f64 {
    0.3
}

impl Default for ProblemSpec {
    fn default() -> Self {
        ProblemSpec::Homogeneous { n: 4, j: -1.0, h: 0.5 }
    }
}

/// A built instance and, for MIS sources, the graph behind it.
#[derive(Clone, Debug)]
pub struct Instance {
    pub problem: IsingProblem,
    pub graph: Option<Graph>,
}

impl ProblemSpec {
    /// Size of generated instances; `None` for file sources.
    pub fn size(&self) -> Option<usize> {
        match self {
            ProblemSpec::File { .. } | ProblemSpec::GraphFile { .. } => None,
            ProblemSpec::Homogeneous { n, .. } | ProblemSpec::SpinGlass { n, .. } | ProblemSpec::Mis { n, .. } => Some(*n),
        }
    }

    /// Same source with a different size; files are returned unchanged.
    pub fn resized(&self, size: usize) -> Self {
        let mut s = self.clone();
        match &mut s {
            ProblemSpec::Homogeneous { n, .. } | ProblemSpec::SpinGlass { n, .. } | ProblemSpec::Mis { n, .. } => *n = size,
            _ => {}
        }
        s
    }

    pub fn build(&self, seed: u64) -> Result<Instance> {
        let mis = |graph: Graph, penalty: Option<f64>| {
            let problem = mis_to_ising(&graph, penalty.unwrap_or_else(|| graph.default_penalty()))?;
            Ok(Instance { problem, graph: Some(graph) })
        };
        match self {
            ProblemSpec::File { path } => {
                Ok(Instance { problem: IsingProblem::from_json(&read_file(path)?).map_err(|e| in_file(path, e))?, graph: None })
            }
            ProblemSpec::GraphFile { path, penalty } => {
                mis(Graph::from_json(&read_file(path)?).map_err(|e| in_file(path, e))?, *penalty)
            }
            ProblemSpec::Homogeneous { n, j, h } => Ok(Instance { problem: IsingProblem::homogeneous(*n, *j, *h)?, graph: None }),
            ProblemSpec::SpinGlass { n, class } => Ok(Instance { problem: random_spin_glass(*n, seed, *class)?, graph: None }),
            ProblemSpec::Mis { n, edge_probability, class, penalty } => {
                mis(Graph::random(*n, *edge_probability, seed, *class)?, *penalty)
            }
        }
    }
}

fn read_file(path: &Path) -> Result<String> {
    std::fs::read_to_string(path).map_err(|e| Error::Config(format!("{}: {e}", path.display())))
}

fn in_file(path: &Path, e: Error) -> Error {
    match e {
        Error::Config(msg) => Error::Config(format!("{}: {msg}", path.display())),
        other => other,
    }
}

/// Analog and depolarizing noise of the digital-analog run.
#[derive(Clone, Copy, Debug, Default, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct NoiseConfig {
    pub c: f64,
    pub p: f64,
    pub p_entangling: Option<f64>,
}

impl NoiseConfig {
    fn model(&self, seed: u64) -> Result<NoiseModel> {
        NoiseModel {
            analog_noise_amplitude: self.c,
            depolarizing_rate: self.p,
            entangling_rate: self.p_entangling,
            seed,
        }
        .validated()
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct SweepConfig {
    /// Instance sizes; generated sources are resized to each.
    pub sizes: Vec<usize>,
    /// Analog noise amplitudes `c`.
    pub c_grid: Vec<f64>,
    /// Two-qubit gate fidelity of the digital baseline.
    pub digital_fidelity: f64,
    /// Single-qubit depolarizing rate of the digital baseline.
    pub digital_single_qubit_rate: f64,
    /// Benchmark line written into every row.
    pub threshold: f64,
    /// Size the fitted required-fidelity curve is evaluated at.
    pub extrapolate_to: usize,
}

impl Default for SweepConfig {
    fn default() -> Self {
        SweepConfig {
            sizes: vec![4],
            c_grid: (0..=10).map(|i| f64::from(i) * 0.02).collect(),
            digital_fidelity: 0.995,
            digital_single_qubit_rate: 0.0002,
            threshold: 0.37,
            extrapolate_to: 52,
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct ScalingConfig {
    pub sizes: Vec<usize>,
    /// Trotter steps costed per run.
    pub steps: usize,
    pub block_sizes: Vec<usize>,
    pub mis_nodes: usize,
    pub mis_edge_probability: f64,
    /// Also report the programmable-XX variant.
    pub programmable_xx: bool,
}

impl Default for ScalingConfig {
    fn default() -> Self {
        ScalingConfig {
            sizes: (1..=25).map(|i| 4 * i).collect(),
            steps: 2,
            block_sizes: vec![2, 3, 4, 5, 6],
            mis_nodes: 16,
            mis_edge_probability: 0.3,
            programmable_xx: false,
        }
    }
}

#[derive(Clone, Debug, Default, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct FitConfig {
    /// `(N, required fidelity)` samples.
    pub points: Vec<(f64, f64)>,
    /// CSV with `N,required_fidelity` columns, appended to `points`.
    pub input: Option<PathBuf>,
    /// Sizes the fitted curve is evaluated at, in addition to the inputs.
    pub evaluate: Vec<f64>,
}

/// Parameters of every command; unspecified fields take their defaults.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct ExperimentConfig {
    pub problem: ProblemSpec,
    pub schedule: Schedule,
    /// Synthesis method; chosen from the instance when absent.
    pub method: Option<Method>,
    pub driving: Driving,
    pub block_size: usize,
    pub noise: NoiseConfig,
    pub trajectories: usize,
    pub shots: usize,
    /// Master seed for instance generation and noise streams.
    pub seed: u64,
    /// Hardware profile document; the default device when absent.
    pub hardware: Option<PathBuf>,
    pub sweep: SweepConfig,
    pub scaling: ScalingConfig,
    pub fit: FitConfig,
}

impl Default for ExperimentConfig {
    fn default() -> Self {
        ExperimentConfig {
            problem: ProblemSpec::default(),
            schedule: Schedule::standard(1.0, 10).expect("valid default schedule"),
            method: None,
            driving: Driving::Counterdiabatic,
            block_size: 4,
            noise: NoiseConfig::default(),
            trajectories: 256,
            shots: 1000,
            seed: 0,
            hardware: None,
            sweep: SweepConfig::default(),
            scaling: ScalingConfig::default(),
            fit: FitConfig::default(),
        }
    }
}

const SEED_INSTANCE: u64 = 11;
const SEED_NOISE: u64 = 12;
const SEED_DIGITAL: u64 = 13;

impl ExperimentConfig {
    pub fn from_json(text: &str) -> Result<Self> {
        Ok(serde_json::from_str(text)?)
    }

    /// Reads a config file; parse errors carry the path, line and column.
    pub fn load(path: &Path) -> Result<Self> {
        Self::from_json(&read_file(path)?).map_err(|e| in_file(path, e))
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("config serializes")
    }

    pub fn validated(self) -> Result<Self> {
        self.schedule.validated()?;
        if self.trajectories == 0 {
            return Err(Error::Config("trajectories must be at least 1".into()));
        }
        if !(2..=crate::synthesis::MAX_BLOCK).contains(&self.block_size) {
            return Err(Error::Config(format!("block_size {} outside [2, {}]", self.block_size, crate::synthesis::MAX_BLOCK)));
        }
        if let Some(path) = &self.hardware {
            if !path.exists() {
                return Err(Error::Config(format!("hardware profile {} does not exist", path.display())));
            }
        }
        Ok(self)
    }

    pub fn hardware_spec(&self) -> Result<HardwareSpec> {
        match &self.hardware {
            Some(path) => HardwareSpec::from_json(&read_file(path)?).map_err(|e| in_file(path, e)),
            None => Ok(HardwareSpec::default()),
        }
    }

    fn instance(&self, size: Option<usize>) -> Result<Instance> {
        let spec = size.map_or_else(|| self.problem.clone(), |n| self.problem.resized(n));
        let n = spec.size().unwrap_or(0) as u64;
        spec.build(derive_seed(self.seed, &[SEED_INSTANCE, n]))
    }

    fn options(&self, problem: &IsingProblem) -> SynthesisOptions {
        let base = match self.method {
            Some(m) => SynthesisOptions::new(m, self.block_size),
            None => SynthesisOptions::auto(problem, self.block_size),
        };
        base.driving(self.driving)
    }
}

/// One CSV document.
#[derive(Clone, Debug, PartialEq)]
pub struct Table {
    /// Appended to the output stem; `None` for the primary table.
    pub suffix: Option<&'static str>,
    pub csv: String,
}

/// Output of a command.
#[derive(Clone, Debug, PartialEq)]
pub struct Report {
    pub command: &'static str,
    pub tables: Vec<Table>,
    /// Results plus the full configuration.
    pub sidecar: serde_json::Value,
    /// Human-readable digest for the terminal.
    pub summary: String,
}

impl Report {
    fn new(command: &'static str, config: &ExperimentConfig, results: serde_json::Value) -> Self {
        Report {
            command,
            tables: Vec::new(),
            sidecar: json!({
                "command": command,
                "version": env!("CARGO_PKG_VERSION"),
                "config": config,
                "results": results,
            }),
            summary: String::new(),
        }
    }

    pub fn primary_csv(&self) -> Option<&str> {
        self.tables.iter().find(|t| t.suffix.is_none()).map(|t| t.csv.as_str())
    }

    /// Writes the tables next to `output` and the sidecar at `output.json`.
    ///
    /// Returns the paths written.
    pub fn write(&self, output: &Path) -> Result<Vec<PathBuf>> {
        let mut written = Vec::new();
        if let Some(dir) = output.parent().filter(|d| !d.as_os_str().is_empty()) {
            std::fs::create_dir_all(dir)?;
        }
        for t in &self.tables {
            let path = match t.suffix {
                None => output.to_path_buf(),
                Some(s) => sibling(output, s, "csv"),
            };
            std::fs::write(&path, &t.csv)?;
            written.push(path);
        }
        let sidecar = output.with_extension("json");
        let mut text = serde_json::to_string_pretty(&self.sidecar)?;
        text.push('\n');
        std::fs::write(&sidecar, text)?;
        written.push(sidecar);
        Ok(written)
    }
}

fn sibling(output: &Path, suffix: &str, ext: &str) -> PathBuf {
    let stem = output.file_stem().map(|s| s.to_string_lossy().into_owned()).unwrap_or_else(|| "out".into());
    output.with_file_name(format!("{stem}_{suffix}.{ext}"))
}

fn to_csv<R: Serialize>(rows: &[R]) -> Result<String> {
    let mut w = csv::Writer::from_writer(Vec::new());
    for r in rows {
        w.serialize(r)?;
    }
    let bytes = w.into_inner().map_err(|e| Error::Io(std::io::Error::other(e.to_string())))?;
    Ok(String::from_utf8(bytes).expect("csv output is utf-8"))
}

/// CSV with only a header, for empty tables.
fn header_only(columns: &[&str]) -> String {
    format!("{}\n", columns.join(","))
}

#[derive(Serialize)]
struct SampleRow {
    bitstring: String,
    count: usize,
    frequency: f64,
    energy: f64,
    optimal: bool,
}

/// Synthesizes and simulates the configured instance.
///
/// The primary table lists sampled X-basis outcomes, most frequent first.
/// With `emit_circuit`, the synthesized program is also returned.
pub fn cmd_solve(config: &ExperimentConfig) -> Result<(Report, Circuit)> {
    let config = config.clone().validated()?;
    let Instance { problem, graph } = config.instance(None)?;
    let truth = brute_force_ground_state(&problem)?;
    let synthesized = synthesize(&problem, &config.schedule, &config.options(&problem))?;
    let noise = config.noise.model(derive_seed(config.seed, &[SEED_NOISE]))?;
    let result = Simulator::new(noise, config.trajectories).shots(config.shots).run(&synthesized.circuit, &truth)?;

    let n = problem.n_qubits();
    let optimal: Vec<String> = truth.bitstrings.iter().map(|s| spin_label(s)).collect();
    let mut rows: Vec<SampleRow> = result
        .shots
        .clone()
        .unwrap_or_default()
        .into_iter()
        .map(|(label, count)| {
            let spins: Vec<i8> = label.chars().map(|c| if c == '+' { 1 } else { -1 }).collect();
            SampleRow {
                energy: problem.objective(&spins).expect("sampled labels have full width"),
                optimal: optimal.contains(&label),
                frequency: count as f64 / config.shots.max(1) as f64,
                bitstring: label,
                count,
            }
        })
        .collect();
    rows.sort_by(|a, b| b.count.cmp(&a.count).then_with(|| a.bitstring.cmp(&b.bitstring)));

    let depth = synthesized.circuit.depth_report();
    let mis = graph.as_ref().map(|g| {
        let sets: Vec<Vec<usize>> = truth
            .bitstrings
            .iter()
            .map(|s| selection_of_spins(s).iter().enumerate().filter(|(_, &x)| x).map(|(i, _)| i).collect())
            .collect();
        json!({
            "optimum_size": sets.first().map_or(0, Vec::len),
            "optimum_weight": truth.bitstrings.first().map_or(0.0, |s| g.set_weight(&selection_of_spins(s))),
            "optimal_sets": sets,
        })
    });
    let best_sampled = rows.first().map(|r| r.bitstring.clone());
    let results = json!({
        "n_qubits": n,
        "method": synthesized.circuit.method,
        "success_probability": result.success_probability,
        "stderr": result.stderr,
        "trajectories": result.trajectories,
        "gms_fidelity": result.gms_fidelity,
        "ground_energy": truth.energy + problem.offset(),
        "optimal_bitstrings": optimal,
        "best_sampled": best_sampled,
        "best_sampled_is_optimal": best_sampled.as_ref().is_some_and(|b| optimal.contains(b)),
        "depth": depth,
        "mis": mis,
    });
    let mut report = Report::new("solve", &config, results);
    report.tables.push(Table {
        suffix: None,
        csv: if rows.is_empty() {
            header_only(&["bitstring", "count", "frequency", "energy", "optimal"])
        } else {
            to_csv(&rows)?
        },
    });
    report.summary = format!(
        "N={n} method={:?} success_probability={:.6} (±{:.2e}, {} trajectories) ground_energy={} optimum={}{}",
        synthesized.circuit.method,
        result.success_probability,
        result.stderr,
        result.trajectories,
        truth.energy + problem.offset(),
        optimal.join("|"),
        mis.map(|m| format!(" mis_size={}", m["optimum_size"])).unwrap_or_default(),
    );
    Ok((report, synthesized.circuit))
}

#[derive(Clone, Debug, Serialize)]
struct SweepRow {
    #[serde(rename = "N")]
    n: usize,
    c: f64,
    fidelity: f64,
    success_probability: f64,
    stderr: f64,
    digital_baseline: f64,
    threshold_37pct: f64,
}

/// Lowest analog fidelity at which the digital-analog run still matches the
/// digital baseline, interpolated linearly between grid points.
///
/// `points` must be sorted by fidelity. `None` when even the best point
/// stays below the baseline; the lowest grid fidelity when no point does.
pub fn required_fidelity(points: &[SweepPoint], baseline: f64) -> Option<f64> {
    let last = points.last()?;
    if last.success_probability < baseline {
        return None;
    }
    for w in points.windows(2).rev() {
        let (lo, hi) = (&w[0], &w[1]);
        if lo.success_probability < baseline {
            let span = hi.success_probability - lo.success_probability;
            let t = if span > 0.0 { (baseline - lo.success_probability) / span } else { 1.0 };
            return Some(lo.fidelity + t * (hi.fidelity - lo.fidelity));
        }
    }
    Some(points[0].fidelity)
}

/// Success probability against analog-block fidelity for each size, with a
/// depolarized digital baseline.
pub fn cmd_fidelity_sweep(config: &ExperimentConfig) -> Result<Report> {
    let config = config.clone().validated()?;
    let sweep = &config.sweep;
    if sweep.sizes.is_empty() || sweep.c_grid.is_empty() {
        return Err(Error::Config("sweep sizes and c_grid must be nonempty".into()));
    }
    let mut sizes = sweep.sizes.clone();
    sizes.sort_unstable();
    sizes.dedup();

    let mut rows = Vec::new();
    let mut crossovers = Vec::new();
    let mut per_size = BTreeMap::new();
    for &size in &sizes {
        let Instance { problem, .. } = config.instance(Some(size))?;
        let n = problem.n_qubits();
        if n % config.block_size != 0 {
            return Err(Error::Config(format!("size {n} is not a multiple of the block size {}", config.block_size)));
        }
        let truth = brute_force_ground_state(&problem)?;
        let circuit = synthesize(&problem, &config.schedule, &config.options(&problem))?.circuit;
        let digital = synthesize(&problem, &config.schedule, &SynthesisOptions::new(Method::Digital, 2).driving(config.driving))?
            .circuit;
        let digital_noise = NoiseModel::digital_equivalent(
            sweep.digital_fidelity,
            sweep.digital_single_qubit_rate,
            derive_seed(config.seed, &[SEED_DIGITAL, n as u64]),
        )?;
        let baseline = Simulator::new(digital_noise, config.trajectories).run(&digital, &truth)?;

        let base = config.noise.model(derive_seed(config.seed, &[SEED_NOISE, n as u64]))?;
        let mut points = sweep
            .c_grid
            .iter()
            .map(|&c| {
                let r = Simulator::new(base.with_amplitude(c), config.trajectories).run(&circuit, &truth)?;
                Ok(SweepPoint { c, fidelity: r.gms_fidelity, success_probability: r.success_probability, stderr: r.stderr })
            })
            .collect::<Result<Vec<_>>>()?;
        points.sort_by(|a, b| a.fidelity.total_cmp(&b.fidelity).then(b.c.total_cmp(&a.c)));

        let crossing = required_fidelity(&points, baseline.success_probability);
        if let Some(f) = crossing {
            crossovers.push((n as f64, f));
        }
        per_size.insert(
            n.to_string(),
            json!({
                "digital_baseline": baseline.success_probability,
                "digital_stderr": baseline.stderr,
                "required_fidelity": crossing,
            }),
        );
        rows.extend(points.iter().map(|p| SweepRow {
            n,
            c: p.c,
            fidelity: p.fidelity,
            success_probability: p.success_probability,
            stderr: p.stderr,
            digital_baseline: baseline.success_probability,
            threshold_37pct: sweep.threshold,
        }));
    }

    let fit = if crossovers.len() >= 3 { fit_extrapolation(&crossovers).ok() } else { None };
    let extrapolated = fit.map(|f| f.evaluate(sweep.extrapolate_to as f64));
    let results = json!({
        "sizes": per_size,
        "fit": fit,
        "extrapolate_to": sweep.extrapolate_to,
        "extrapolated_required_fidelity": extrapolated,
    });
    let mut report = Report::new("fidelity-sweep", &config, results);
    report.tables.push(Table { suffix: None, csv: to_csv(&rows)? });
    report.summary = crossovers
        .iter()
        .map(|(n, f)| format!("N={n} required_fidelity={f:.4}"))
        .chain(extrapolated.map(|f| format!("extrapolated N={} required_fidelity={f:.4}", sweep.extrapolate_to)))
        .collect::<Vec<_>>()
        .join("\n");
    if report.summary.is_empty() {
        report.summary = "no fidelity crossover within the grid".into();
    }
    Ok(report)
}

#[derive(Serialize)]
struct ScalingRow {
    #[serde(rename = "N")]
    n: usize,
    runtime_digital: f64,
    runtime_daqc_homog: f64,
    runtime_daqc_inhomog: f64,
    #[serde(skip_serializing_if = "Option::is_none")]
    runtime_programmable_xx: Option<f64>,
}

#[derive(Serialize)]
struct EnhancementRow {
    class: &'static str,
    block_size: usize,
    runtime_digital: f64,
    runtime_daqc: f64,
    ratio: f64,
}

/// Analytic runtimes against size, and synthesized enhancement factors on
/// random MIS instances of each weight class.
pub fn cmd_scaling(config: &ExperimentConfig) -> Result<Report> {
    let config = config.clone().validated()?;
    let sc = &config.scaling;
    if sc.sizes.is_empty() || sc.block_sizes.is_empty() || sc.steps == 0 {
        return Err(Error::Config("scaling sizes, block_sizes and steps must be nonempty".into()));
    }
    let spec = config.hardware_spec()?;
    let k = spec.max_block;
    let mut sizes = sc.sizes.clone();
    sizes.sort_unstable();
    sizes.dedup();
    let rows = sizes
        .iter()
        .map(|&n| {
            if n < 2 {
                return Err(Error::Config(format!("scaling size {n} is below 2")));
            }
            let kk = k.min(n);
            Ok(ScalingRow {
                n,
                runtime_digital: spec.model_runtime(&LayerModel::digital(n), sc.steps),
                runtime_daqc_homog: spec.model_runtime(&LayerModel::homogeneous(n, kk), sc.steps),
                runtime_daqc_inhomog: spec.model_runtime(&LayerModel::inhomogeneous(n, kk), sc.steps),
                runtime_programmable_xx: sc
                    .programmable_xx
                    .then(|| spec.model_runtime(&LayerModel::programmable_xx(n, kk), sc.steps)),
            })
        })
        .collect::<Result<Vec<_>>>()?;

    let schedule = config.schedule.with_steps(sc.steps)?;
    let mut enh_rows = Vec::new();
    for class in InstanceClass::ALL {
        let seed = derive_seed(config.seed, &[SEED_INSTANCE, sc.mis_nodes as u64]);
        let graph = Graph::random(sc.mis_nodes, sc.mis_edge_probability, seed, class)?;
        let problem = mis_to_ising(&graph, graph.default_penalty())?;
        for e in enhancement_factor(&problem, &schedule, &spec, &sc.block_sizes)? {
            enh_rows.push(EnhancementRow {
                class: class.name(),
                block_size: e.block_size,
                runtime_digital: e.digital.runtime_seconds,
                runtime_daqc: e.daqc.runtime_seconds,
                ratio: e.ratio,
            });
        }
    }

    let last = rows.last().expect("sizes nonempty");
    let results = json!({
        "hardware": spec,
        "block_size": k,
        "steps": sc.steps,
        "largest": {
            "N": last.n,
            "runtime_digital": last.runtime_digital,
            "runtime_daqc_homog": last.runtime_daqc_homog,
            "runtime_daqc_inhomog": last.runtime_daqc_inhomog,
            "within_coherence": last.runtime_daqc_homog <= spec.coherence_time,
            "reduction": 1.0 - last.runtime_daqc_homog / last.runtime_digital,
        },
    });
    let mut report = Report::new("scaling", &config, results);
    report.summary = format!(
        "N={} steps={} digital={:.3} s daqc_homog={:.3} s daqc_inhomog={:.3} s",
        last.n, sc.steps, last.runtime_digital, last.runtime_daqc_homog, last.runtime_daqc_inhomog
    );
    report.tables.push(Table { suffix: None, csv: to_csv(&rows)? });
    report.tables.push(Table { suffix: Some("enhancement"), csv: to_csv(&enh_rows)? });
    Ok(report)
}

#[derive(Serialize)]
struct StepDepthRow {
    step: usize,
    multiqubit_layers: usize,
    single_qubit_layers: usize,
    total: usize,
    analytic_total: f64,
}

/// Synthesizes the configured instance; the table lists per-step depths.
pub fn cmd_emit_circuit(config: &ExperimentConfig) -> Result<(Report, Circuit)> {
    let config = config.clone().validated()?;
    let Instance { problem, .. } = config.instance(None)?;
    let circuit = synthesize(&problem, &config.schedule, &config.options(&problem))?.circuit;
    let rows: Vec<StepDepthRow> = (0..circuit.trotter_steps())
        .map(|s| {
            let d = circuit.step_depth(s);
            StepDepthRow {
                step: s + 1,
                multiqubit_layers: d.multiqubit_layers,
                single_qubit_layers: d.single_qubit_layers,
                total: d.total,
                analytic_total: d.analytic_total,
            }
        })
        .collect();
    let depth = circuit.depth_report();
    let gates = circuit.gates().count();
    let mut report = Report::new("emit-circuit", &config, json!({ "depth": depth, "gates": gates }));
    report.tables.push(Table { suffix: None, csv: to_csv(&rows)? });
    report.summary = format!(
        "N={} method={:?} steps={} gates={gates} layers={} ({} multi-qubit, {} single-qubit)",
        circuit.width,
        circuit.method,
        circuit.trotter_steps(),
        depth.total,
        depth.multiqubit_layers,
        depth.single_qubit_layers
    );
    Ok((report, circuit))
}

/// `f(N) = L + (K − L)·e^{−rate·N}` with `L = 1`.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct ExtrapolationFit {
    #[serde(rename = "L")]
    pub limit: f64,
    #[serde(rename = "K")]
    pub initial: f64,
    pub decay_rate: f64,
    /// Sum of squared errors at the inputs.
    pub residual: f64,
}

impl ExtrapolationFit {
    pub fn evaluate(&self, n: f64) -> f64 {
        self.limit + (self.initial - self.limit) * (-self.decay_rate * n).exp()
    }
}

/// Optimal `K` and the residual for a fixed rate.
fn profile(points: &[(f64, f64)], rate: f64) -> (f64, f64) {
    let (num, den) = points.iter().fold((0.0, 0.0), |(num, den), &(n, f)| {
        let g = (-rate * n).exp();
        (num + (f - 1.0) * g, den + g * g)
    });
    let a = if den > 0.0 { num / den } else { 0.0 };
    let sse = points.iter().map(|&(n, f)| (1.0 + a * (-rate * n).exp() - f).powi(2)).sum();
    (1.0 + a, sse)
}

/// Least-squares fit of the exponential approach to 1.
///
/// `K` has a closed form for each rate, so the search is one-dimensional: a
/// logarithmic scan, golden-section refinement, then Gauss-Newton polishing on
/// both parameters.
pub fn fit_extrapolation(points: &[(f64, f64)]) -> Result<ExtrapolationFit> {
    if points.len() < 3 {
        return Err(Error::arg("the extrapolation needs at least three points"));
    }
    if points.iter().any(|&(n, f)| !n.is_finite() || !(f > 0.0 && f <= 1.0)) {
        return Err(Error::arg("required fidelities must lie in (0, 1]"));
    }
    let n_min = points.iter().map(|p| p.0).fold(f64::INFINITY, f64::min);
    let n_max = points.iter().map(|p| p.0).fold(f64::NEG_INFINITY, f64::max);
    if n_max - n_min <= 0.0 {
        return Err(Error::Numerical("degenerate fit: every point has the same size".into()));
    }
    if points.iter().all(|p| p.1 == 1.0) {
        return Ok(ExtrapolationFit { limit: 1.0, initial: 1.0, decay_rate: 1.0 / (n_max - n_min), residual: 0.0 });
    }

    let (lo, hi) = (1e-6 / n_max, 50.0 / n_min.abs().max(1.0));
    let grid: Vec<f64> = (0..=400).map(|i| lo * (hi / lo).powf(f64::from(i) / 400.0)).collect();
    let best = (0..grid.len()).min_by(|&a, &b| profile(points, grid[a]).1.total_cmp(&profile(points, grid[b]).1)).unwrap();
    let (mut a, mut b) = (grid[best.saturating_sub(1)], grid[(best + 1).min(grid.len() - 1)]);
    let phi = (5f64.sqrt() - 1.0) / 2.0;
    for _ in 0..200 {
        let x1 = b - phi * (b - a);
        let x2 = a + phi * (b - a);
        if profile(points, x1).1 <= profile(points, x2).1 {
            b = x2;
        } else {
            a = x1;
        }
    }
    let mut rate = 0.5 * (a + b);
    let mut k = profile(points, rate).0;

    for _ in 0..50 {
        // Normal equations of the residual r_i = 1 + (K−1)e^{−rate·N_i} − f_i.
        let (mut jtj, mut jtr) = ([[0.0; 2]; 2], [0.0; 2]);
        for &(n, f) in points {
            let g = (-rate * n).exp();
            let r = 1.0 + (k - 1.0) * g - f;
            let jac = [g, -(k - 1.0) * n * g];
            for i in 0..2 {
                jtr[i] += jac[i] * r;
                for j in 0..2 {
                    jtj[i][j] += jac[i] * jac[j];
                }
            }
        }
        let det = jtj[0][0] * jtj[1][1] - jtj[0][1] * jtj[1][0];
        if det.abs() < 1e-300 {
            break;
        }
        let dk = (jtj[1][1] * jtr[0] - jtj[0][1] * jtr[1]) / det;
        let dr = (jtj[0][0] * jtr[1] - jtj[1][0] * jtr[0]) / det;
        let sse = |k: f64, rate: f64| points.iter().map(|&(n, f)| (1.0 + (k - 1.0) * (-rate * n).exp() - f).powi(2)).sum::<f64>();
        if sse(k - dk, rate - dr) > sse(k, rate) || rate - dr <= 0.0 {
            break;
        }
        k -= dk;
        rate -= dr;
        if dk.abs() < 1e-15 && dr.abs() < 1e-15 {
            break;
        }
    }
    let residual = points.iter().map(|&(n, f)| (1.0 + (k - 1.0) * (-rate * n).exp() - f).powi(2)).sum();
    if !(k.is_finite() && rate.is_finite()) {
        return Err(Error::Numerical("extrapolation fit diverged".into()));
    }
    Ok(ExtrapolationFit { limit: 1.0, initial: k, decay_rate: rate, residual })
}

#[derive(Deserialize)]
struct FitInputRow {
    #[serde(rename = "N")]
    n: f64,
    required_fidelity: f64,
}

#[derive(Serialize)]
struct FitRow {
    #[serde(rename = "N")]
    n: f64,
    observed: Option<f64>,
    fitted: f64,
}

/// Fits the required-fidelity curve and evaluates it at the requested sizes.
pub fn cmd_fit(config: &ExperimentConfig) -> Result<Report> {
    let mut points = config.fit.points.clone();
    if let Some(path) = &config.fit.input {
        let mut reader = csv::Reader::from_path(path).map_err(|e| Error::Config(format!("{}: {e}", path.display())))?;
        for row in reader.deserialize::<FitInputRow>() {
            let row = row.map_err(|e| Error::Config(format!("{}: {e}", path.display())))?;
            points.push((row.n, row.required_fidelity));
        }
    }
    let fit = fit_extrapolation(&points)?;
    let mut rows: Vec<FitRow> = points.iter().map(|&(n, f)| FitRow { n, observed: Some(f), fitted: fit.evaluate(n) }).collect();
    rows.extend(config.fit.evaluate.iter().map(|&n| FitRow { n, observed: None, fitted: fit.evaluate(n) }));
    rows.sort_by(|a, b| a.n.total_cmp(&b.n).then(b.observed.is_some().cmp(&a.observed.is_some())));
    let mut report = Report::new("fit", config, json!({ "fit": fit, "points": points }));
    report.tables.push(Table { suffix: None, csv: to_csv(&rows)? });
    report.summary = format!(
        "L={} K={:.9} decay_rate={:.9} residual={:.3e}",
        fit.limit, fit.initial, fit.decay_rate, fit.residual
    );
    Ok(report)
}
