// Copyright 2026 DACQO Contributors
// SPDX-License-Identifier: Apache-2.0

//! `dacqo`: command-line front end of the experiments module.

use std::path::{Path, PathBuf};
use std::process::ExitCode;

use anyhow::Context;
use clap::{Args, Parser, Subcommand, ValueEnum};
use dacqo::counterdiabatic::{Driving, Schedule, ScheduleProfile};
use dacqo::experiments::{self, ExperimentConfig, ProblemSpec, Report};
use dacqo::problem::InstanceClass;
use dacqo::synthesis::Method;

#[derive(Parser)]
#[command(name = "dacqo", version, about = "Digital-analog counterdiabatic optimization on trapped ions")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Synthesize and simulate one instance.
    Solve {
        #[command(flatten)]
        common: Common,
        /// Also write the synthesized circuit as JSON.
        #[arg(long, value_name = "PATH")]
        emit_circuit: Option<PathBuf>,
    },
    /// Success probability against analog-block fidelity, with a digital baseline.
    FidelitySweep {
        #[command(flatten)]
        common: Common,
        /// Instance sizes, comma separated.
        #[arg(long, value_delimiter = ',')]
        sizes: Option<Vec<usize>>,
        /// Analog noise amplitudes, comma separated.
        #[arg(long, value_delimiter = ',')]
        c_grid: Option<Vec<f64>>,
        /// Two-qubit fidelity of the digital baseline.
        #[arg(long)]
        digital_fidelity: Option<f64>,
    },
    /// Analytic runtimes against size and MIS enhancement factors.
    Scaling {
        #[command(flatten)]
        common: Common,
        /// Largest size; the grid runs over multiples of 4 up to it.
        #[arg(long)]
        max_n: Option<usize>,
        /// Trotter steps costed per run.
        #[arg(long)]
        scaling_steps: Option<usize>,
        #[arg(long, value_delimiter = ',')]
        block_sizes: Option<Vec<usize>>,
        /// Add the programmable-XX column.
        #[arg(long)]
        programmable_xx: bool,
    },
    /// Write the layered circuit of one instance.
    EmitCircuit {
        #[command(flatten)]
        common: Common,
        /// Circuit JSON destination; standard output when absent.
        #[arg(long, value_name = "PATH")]
        circuit: Option<PathBuf>,
    },
    /// Fit the required-fidelity extrapolation.
    Fit {
        #[command(flatten)]
        common: Common,
        /// Samples as N:fidelity, comma separated.
        #[arg(long, value_delimiter = ',')]
        points: Option<Vec<String>>,
        /// CSV with N,required_fidelity columns.
        #[arg(long, value_name = "PATH")]
        input: Option<PathBuf>,
        /// Sizes to evaluate the fit at, comma separated.
        #[arg(long, value_delimiter = ',')]
        evaluate: Option<Vec<f64>>,
    },
}

#[derive(Clone, Copy, ValueEnum)]
enum MethodArg {
    Auto,
    Homogeneous,
    Inhomogeneous,
    Digital,
}

#[derive(Clone, Copy, ValueEnum)]
enum ProfileArg {
    Sin2sin2,
    LinearSmoothstep,
}

#[derive(Clone, Copy, ValueEnum)]
enum ProblemKind {
    Homogeneous,
    SpinGlass,
    Mis,
}

#[derive(Clone, Copy, ValueEnum)]
enum ClassArg {
    Homogeneous,
    Mixed,
    FullyNonuniform,
}

impl From<ClassArg> for InstanceClass {
    fn from(c: ClassArg) -> Self {
        match c {
            ClassArg::Homogeneous => InstanceClass::Homogeneous,
            ClassArg::Mixed => InstanceClass::Mixed,
            ClassArg::FullyNonuniform => InstanceClass::FullyNonuniform,
        }
    }
}

/// Options shared by every command. Flags override the config file.
#[derive(Args)]
struct Common {
    /// JSON experiment configuration.
    #[arg(long, short, value_name = "PATH")]
    config: Option<PathBuf>,
    /// Primary CSV destination; a JSON sidecar is written beside it.
    #[arg(long, short, value_name = "PATH")]
    output: Option<PathBuf>,
    /// Master seed.
    #[arg(long)]
    seed: Option<u64>,
    /// Ising instance document.
    #[arg(long, value_name = "PATH", conflicts_with_all = ["graph", "kind"])]
    problem: Option<PathBuf>,
    /// Graph document, encoded as MIS.
    #[arg(long, value_name = "PATH", conflicts_with = "kind")]
    graph: Option<PathBuf>,
    /// Generated instance family.
    #[arg(long, value_enum)]
    kind: Option<ProblemKind>,
    /// Size of generated instances.
    #[arg(long, short)]
    n: Option<usize>,
    /// Weight class of generated instances.
    #[arg(long, value_enum)]
    class: Option<ClassArg>,
    /// Annealing time.
    #[arg(long = "total-time", short = 'T')]
    total_time: Option<f64>,
    /// Trotter steps.
    #[arg(long)]
    steps: Option<usize>,
    #[arg(long, value_enum)]
    profile: Option<ProfileArg>,
    #[arg(long, value_enum)]
    method: Option<MethodArg>,
    /// Drop the counterdiabatic terms.
    #[arg(long)]
    no_cd: bool,
    /// Analog block size.
    #[arg(long, short = 'k')]
    block_size: Option<usize>,
    /// Analog noise amplitude c.
    #[arg(long)]
    noise_c: Option<f64>,
    /// Per-qubit depolarizing probability.
    #[arg(long)]
    noise_p: Option<f64>,
    #[arg(long)]
    trajectories: Option<usize>,
    #[arg(long)]
    shots: Option<usize>,
    /// Hardware profile JSON.
    #[arg(long, value_name = "PATH")]
    hardware: Option<PathBuf>,
}

impl Common {
    fn config(&self) -> anyhow::Result<ExperimentConfig> {
        let mut cfg = match &self.config {
            Some(path) => ExperimentConfig::load(path)?,
            None => ExperimentConfig::default(),
        };
        if let Some(s) = self.seed {
            cfg.seed = s;
        }
        if let Some(path) = &self.problem {
            cfg.problem = ProblemSpec::File { path: path.clone() };
        }
        if let Some(path) = &self.graph {
            cfg.problem = ProblemSpec::GraphFile { path: path.clone(), penalty: None };
        }
        let class = self.class.map(InstanceClass::from);
        if let Some(kind) = self.kind {
            let n = self.n.or(cfg.problem.size()).unwrap_or(4);
            let class = class.unwrap_or(InstanceClass::FullyNonuniform);
            cfg.problem = match kind {
                ProblemKind::Homogeneous => ProblemSpec::Homogeneous { n, j: -1.0, h: 0.5 },
                ProblemKind::SpinGlass => ProblemSpec::SpinGlass { n, class },
                ProblemKind::Mis => ProblemSpec::Mis { n, edge_probability: 0.3, class, penalty: None },
            };
        } else {
            if let Some(n) = self.n {
                anyhow::ensure!(cfg.problem.size().is_some(), dacqo::Error::Config("--n applies to generated instances only".into()));
                cfg.problem = cfg.problem.resized(n);
            }
            if let Some(c) = class {
                match &mut cfg.problem {
                    ProblemSpec::SpinGlass { class, .. } | ProblemSpec::Mis { class, .. } => *class = c,
                    _ => anyhow::bail!(dacqo::Error::Config("--class applies to spin-glass and MIS instances".into())),
                }
            }
        }
        if self.total_time.is_some() || self.steps.is_some() || self.profile.is_some() {
            let profile = match self.profile {
                Some(ProfileArg::Sin2sin2) => ScheduleProfile::Sin2Sin2,
                Some(ProfileArg::LinearSmoothstep) => ScheduleProfile::LinearSmoothstep,
                None => cfg.schedule.profile(),
            };
            cfg.schedule = Schedule::new(
                self.total_time.unwrap_or(cfg.schedule.total_time()),
                self.steps.unwrap_or(cfg.schedule.trotter_steps()),
                profile,
            )
            .map_err(|e| dacqo::Error::Config(e.to_string()))?;
        }
        if let Some(m) = self.method {
            cfg.method = match m {
                MethodArg::Auto => None,
                MethodArg::Homogeneous => Some(Method::Homogeneous),
                MethodArg::Inhomogeneous => Some(Method::Inhomogeneous),
                MethodArg::Digital => Some(Method::Digital),
            };
        }
        if self.no_cd {
            cfg.driving = Driving::Adiabatic;
        }
        if let Some(k) = self.block_size {
            cfg.block_size = k;
        }
        if let Some(c) = self.noise_c {
            cfg.noise.c = c;
        }
        if let Some(p) = self.noise_p {
            cfg.noise.p = p;
        }
        if let Some(t) = self.trajectories {
            cfg.trajectories = t;
        }
        if let Some(s) = self.shots {
            cfg.shots = s;
        }
        if let Some(h) = &self.hardware {
            cfg.hardware = Some(h.clone());
        }
        Ok(cfg)
    }
}

fn parse_point(s: &str) -> anyhow::Result<(f64, f64)> {
    let (n, f) = s.split_once(':').ok_or_else(|| dacqo::Error::Config(format!("point {s:?} is not N:fidelity")))?;
    let parse = |v: &str| v.trim().parse::<f64>().map_err(|e| dacqo::Error::Config(format!("point {s:?}: {e}")));
    Ok((parse(n)?, parse(f)?))
}

fn emit(report: &Report, output: Option<&Path>) -> anyhow::Result<()> {
    match output {
        Some(path) => {
            let written = report.write(path)?;
            for p in written {
                eprintln!("wrote {}", p.display());
            }
        }
        None => {
            if let Some(csv) = report.primary_csv() {
                print!("{csv}");
            }
        }
    }
    eprintln!("{}", report.summary);
    Ok(())
}

fn execute(cli: Cli) -> anyhow::Result<()> {
    match cli.command {
        Command::Solve { common, emit_circuit } => {
            let cfg = common.config()?;
            let (report, circuit) = experiments::cmd_solve(&cfg)?;
            if let Some(path) = emit_circuit {
                std::fs::write(&path, circuit.to_json()).with_context(|| format!("writing {}", path.display()))?;
            }
            emit(&report, common.output.as_deref())
        }
        Command::FidelitySweep { common, sizes, c_grid, digital_fidelity } => {
            let mut cfg = common.config()?;
            if let Some(s) = sizes {
                cfg.sweep.sizes = s;
            }
            if let Some(c) = c_grid {
                cfg.sweep.c_grid = c;
            }
            if let Some(f) = digital_fidelity {
                cfg.sweep.digital_fidelity = f;
            }
            emit(&experiments::cmd_fidelity_sweep(&cfg)?, common.output.as_deref())
        }
        Command::Scaling { common, max_n, scaling_steps, block_sizes, programmable_xx } => {
            let mut cfg = common.config()?;
            if let Some(m) = max_n {
                cfg.scaling.sizes = (4..=m).step_by(4).collect();
                if m % 4 != 0 {
                    cfg.scaling.sizes.push(m);
                }
            }
            if let Some(s) = scaling_steps {
                cfg.scaling.steps = s;
            }
            if let Some(b) = block_sizes {
                cfg.scaling.block_sizes = b;
            }
            cfg.scaling.programmable_xx |= programmable_xx;
            emit(&experiments::cmd_scaling(&cfg)?, common.output.as_deref())
        }
        Command::EmitCircuit { common, circuit: path } => {
            let cfg = common.config()?;
            let (report, circuit) = experiments::cmd_emit_circuit(&cfg)?;
            match (path, common.output.as_deref()) {
                (Some(p), out) => {
                    std::fs::write(&p, circuit.to_json()).with_context(|| format!("writing {}", p.display()))?;
                    emit(&report, out)
                }
                // Standard output already carries the circuit.
                (None, Some(out)) => {
                    println!("{}", circuit.to_json());
                    emit(&report, Some(out))
                }
                (None, None) => {
                    println!("{}", circuit.to_json());
                    eprintln!("{}", report.summary);
                    Ok(())
                }
            }
        }
        Command::Fit { common, points, input, evaluate } => {
            let mut cfg = common.config()?;
            if let Some(p) = points {
                cfg.fit.points = p.iter().map(|s| parse_point(s)).collect::<anyhow::Result<_>>()?;
            }
            if input.is_some() {
                cfg.fit.input = input;
            }
            if let Some(e) = evaluate {
                cfg.fit.evaluate = e;
            }
            emit(&experiments::cmd_fit(&cfg)?, common.output.as_deref())
        }
    }
}

/// 2 configuration, 3 size caps, 4 numerical or synthesis failure.
fn exit_code(err: &anyhow::Error) -> u8 {
    match err.chain().find_map(|e| e.downcast_ref::<dacqo::Error>()) {
        Some(dacqo::Error::Capability(_)) => 3,
        Some(dacqo::Error::Numerical(_) | dacqo::Error::Singularity(_) | dacqo::Error::Synthesis(_)) => 4,
        _ => 2,
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match execute(cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e:#}");
            ExitCode::from(exit_code(&e))
        }
    }
}
