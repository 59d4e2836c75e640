use std::fs;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use anyhow::{bail, Context};
use clap::{Args, Parser, Subcommand, ValueEnum};

use qubo_decomp::experiment::{
    self, load_instance, run_decompose, run_per_iteration, run_probability_study, write_csv, ExperimentSpec,
    Family,
};
use qubo_decomp::generate::{generate_connected, generate_regular};
use qubo_decomp::ising::qubo_to_ising;
use qubo_decomp::qaoa::{optimize_params, report, write_histogram_csv};
use qubo_decomp::subsolver::{exact_optimum_with_limit, DEFAULT_QAOA_RESTARTS};
use qubo_decomp::{
    decompose, lift_solution, BackendChoice, CutStrategy, DecompConfig, Instance, QaoaParams, ReweightMode,
};

/// Exit code for a failed oracle check.
const EXIT_MISMATCH: u8 = 1;
const EXIT_INPUT: u8 = 2;
const EXIT_RESOURCE: u8 = 3;

#[derive(Parser)]
#[command(name = "qdecomp", version, about = "Vertex-cut decomposition of MaxCut/QUBO instances")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Write random connected k-regular graphs as edge-list files.
    Generate {
        #[arg(long)]
        n: usize,
        #[arg(long)]
        k: usize,
        #[arg(long, default_value_t = 1)]
        count: usize,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        #[arg(long)]
        out: PathBuf,
    },
    /// Decompose one instance and write its trace and reduced instance.
    Decompose {
        input: PathBuf,
        #[command(flatten)]
        decomp: DecompArgs,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Optimize single-layer angles, simulate, and sample an instance.
    Qaoa {
        input: PathBuf,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        #[arg(long, default_value_t = 20)]
        restarts: usize,
        #[arg(long, default_value_t = 500)]
        shots: usize,
        /// Use these angles instead of optimizing.
        #[arg(long, requires = "beta")]
        gamma: Option<f64>,
        #[arg(long, requires = "gamma")]
        beta: Option<f64>,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Reproduce the approximation-ratio and probability studies.
    Experiment {
        #[command(subcommand)]
        which: ExperimentCmd,
    },
    /// Check that decomposition preserves the optimum on random or given
    /// instances, and that lifted solutions attain it.
    Verify {
        /// Instance files; random graphs are used when none are given.
        inputs: Vec<PathBuf>,
        #[arg(long, default_value_t = 20)]
        count: usize,
        /// Largest random graph size.
        #[arg(long, default_value_t = 12)]
        n: usize,
        #[command(flatten)]
        decomp: DecompArgs,
    },
}

#[derive(Subcommand)]
enum ExperimentCmd {
    /// Original versus decomposed approximation ratios.
    Ar {
        #[command(flatten)]
        common: ExperimentArgs,
        /// Report the ratio after every iteration instead of a summary.
        #[arg(long)]
        per_iteration: bool,
    },
    /// Optimal-solution probabilities on decomposed instances.
    Prob {
        #[command(flatten)]
        common: ExperimentArgs,
    },
}

#[derive(Clone, Copy, ValueEnum)]
enum BackendArg {
    Exact,
    Qaoa,
}

#[derive(Clone, Copy, ValueEnum)]
enum ModeArg {
    Cutform,
    Product,
}

#[derive(Clone, Copy, ValueEnum)]
enum StrategyArg {
    GlobalMin,
    Neighborhood,
}

#[derive(Args, Clone)]
struct DecompArgs {
    /// Cuts with this many vertices or more are not used.
    #[arg(long, default_value_t = 8)]
    m_cut: usize,
    #[arg(long, default_value_t = 2)]
    min_vertices: usize,
    #[arg(long, value_enum, default_value_t = BackendArg::Exact)]
    backend: BackendArg,
    /// Defaults to cutform for graphs and product for QUBOs.
    #[arg(long, value_enum)]
    mode: Option<ModeArg>,
    #[arg(long, value_enum, default_value_t = StrategyArg::GlobalMin)]
    strategy: StrategyArg,
    /// Angle-search restarts for the qaoa backend.
    #[arg(long, default_value_t = DEFAULT_QAOA_RESTARTS)]
    qaoa_restarts: usize,
    #[arg(long)]
    max_iter: Option<usize>,
    #[arg(long, default_value_t = 0)]
    seed: u64,
}

#[derive(Args)]
struct ExperimentArgs {
    #[arg(long, default_value_t = 24)]
    n: usize,
    #[arg(long, default_value_t = 3)]
    k: usize,
    #[arg(long, default_value_t = 10)]
    count: usize,
    /// Instance files to use instead of generated graphs.
    #[arg(long, num_args = 1..)]
    inputs: Vec<PathBuf>,
    #[arg(long, default_value_t = 500)]
    shots: usize,
    /// Angle-search restarts when scoring instances.
    #[arg(long, default_value_t = experiment::DEFAULT_AR_RESTARTS)]
    restarts: usize,
    /// Backends to compare (repeatable).
    #[arg(long = "backend", value_enum, default_values_t = vec![BackendArg::Exact])]
    backends: Vec<BackendArg>,
    #[arg(long, default_value_t = 8)]
    m_cut: usize,
    #[arg(long, value_enum)]
    mode: Option<ModeArg>,
    #[arg(long, value_enum, default_value_t = StrategyArg::GlobalMin)]
    strategy: StrategyArg,
    #[arg(long, default_value_t = DEFAULT_QAOA_RESTARTS)]
    qaoa_restarts: usize,
    #[arg(long, default_value_t = 0)]
    seed: u64,
    #[arg(long)]
    out: PathBuf,
}

fn backend(b: BackendArg, restarts: usize) -> BackendChoice {
    match b {
        BackendArg::Exact => BackendChoice::exact(),
        BackendArg::Qaoa => BackendChoice::qaoa(restarts),
    }
}

fn mode(m: Option<ModeArg>) -> Option<ReweightMode> {
    m.map(|m| match m {
        ModeArg::Cutform => ReweightMode::CutForm,
        ModeArg::Product => ReweightMode::Product,
    })
}

fn strategy(s: StrategyArg) -> CutStrategy {
    match s {
        StrategyArg::GlobalMin => CutStrategy::GlobalMin,
        StrategyArg::Neighborhood => CutStrategy::MinDegreeNeighborhood,
    }
}

impl DecompArgs {
    fn config(&self) -> DecompConfig {
        DecompConfig {
            m_cut: self.m_cut,
            min_vertices: self.min_vertices,
            backend: backend(self.backend, self.qaoa_restarts),
            cut_strategy: strategy(self.strategy),
            mode: mode(self.mode),
            seed: self.seed,
            max_iterations: self.max_iter,
        }
    }
}

impl ExperimentArgs {
    fn spec(&self) -> ExperimentSpec {
        let family = if self.inputs.is_empty() {
            Family::Regular { n: self.n, k: self.k }
        } else {
            Family::Files {
                paths: self.inputs.clone(),
            }
        };
        ExperimentSpec {
            family,
            count: self.count,
            seed: self.seed,
            decomp: DecompConfig {
                m_cut: self.m_cut,
                cut_strategy: strategy(self.strategy),
                mode: mode(self.mode),
                seed: self.seed,
                ..DecompConfig::default()
            },
            backends: self.backends.iter().map(|&b| backend(b, self.qaoa_restarts)).collect(),
            restarts: self.restarts,
            shots: self.shots,
            out_dir: Some(self.out.clone()),
        }
    }
}

fn load(path: &Path) -> anyhow::Result<Instance> {
    load_instance(path).with_context(|| format!("reading {}", path.display()))
}

fn write_json<T: serde::Serialize>(path: &Path, value: &T) -> anyhow::Result<()> {
    let text = serde_json::to_string_pretty(value)?;
    fs::write(path, text).with_context(|| format!("writing {}", path.display()))
}

fn run(cli: Cli) -> anyhow::Result<u8> {
    match cli.command {
        Command::Generate { n, k, count, seed, out } => {
            if count == 0 {
                return Err(qubo_decomp::Error::InvalidInput("count must be at least 1".into()).into());
            }
            fs::create_dir_all(&out)?;
            for i in 0..count {
                let g = generate_regular(n, k, qubo_decomp::rng::stream_seed(seed, "instance", i as u64))?;
                let path = out.join(format!("reg-n{n}-k{k}-{i:04}.txt"));
                fs::write(&path, g.to_text())?;
                println!("{}", path.display());
            }
        }
        Command::Decompose { input, decomp, out } => {
            let inst = load(&input)?;
            let trace = decompose(&inst, &decomp.config())?;
            let summary = serde_json::json!({
                "n": inst.n(),
                "final_n": trace.final_n(),
                "iterations": trace.iterations.len(),
                "c_total": trace.c_total,
                "exact": trace.all_exact(),
                "error_budget": trace.error_budget(),
                "stop": trace.stop,
            });
            println!("{summary}");
            if let Some(dir) = out {
                fs::create_dir_all(&dir)?;
                fs::write(dir.join("trace.json"), trace.to_json()?)?;
                write_json(&dir.join("reduced.json"), &trace.final_instance)?;
            }
        }
        Command::Qaoa {
            input,
            seed,
            restarts,
            shots,
            gamma,
            beta,
            out,
        } => {
            let q = load(&input)?.to_qubo();
            let opt = exact_optimum_with_limit(&q, experiment::ORACLE_LIMIT)?;
            let params = match (gamma, beta) {
                (Some(g), Some(b)) => QaoaParams::p1(g, b),
                _ => optimize_params(&qubo_to_ising(&q), restarts, seed)?.params,
            };
            let rep = report(&q, &params, shots, seed, opt.value, opt.count)?;
            println!("{}", serde_json::to_string(&rep)?);
            if let Some(dir) = out {
                fs::create_dir_all(&dir)?;
                write_json(&dir.join("report.json"), &rep)?;
                write_histogram_csv(&rep, fs::File::create(dir.join("histogram.csv"))?)?;
            }
        }
        Command::Experiment { which } => match which {
            ExperimentCmd::Ar { common, per_iteration } => {
                let spec = common.spec();
                if per_iteration {
                    spec.validate()?;
                    let mut rows = Vec::new();
                    for (i, (id, inst)) in experiment::instances(&spec)?.into_iter().enumerate() {
                        let cfg = DecompConfig {
                            backend: spec.backends[0],
                            seed: qubo_decomp::rng::stream_seed(spec.seed, "decompose", i as u64),
                            ..spec.decomp.clone()
                        };
                        let seed = qubo_decomp::rng::stream_seed(spec.seed, "per-iteration", i as u64);
                        rows.extend(run_per_iteration(&id, &inst, &cfg, spec.restarts, seed)?);
                    }
                    fs::create_dir_all(&common.out)?;
                    write_csv(&common.out.join("per_iteration.csv"), rows.iter())?;
                    println!("{} rows", rows.len());
                } else {
                    let rows = run_decompose(&spec)?;
                    let failed = rows.iter().filter(|r| r.status != "ok").count();
                    println!("{} rows, {failed} failed", rows.len());
                }
            }
            ExperimentCmd::Prob { common } => {
                let rows = run_probability_study(&common.spec())?;
                let observed = rows.iter().filter(|r| r.observed).count();
                println!("{} rows, optimum observed in {observed}", rows.len());
            }
        },
        Command::Verify {
            inputs,
            count,
            n,
            decomp,
        } => {
            let seed = decomp.seed;
            let mut cfg = decomp.config();
            cfg.backend = BackendChoice::exact();
            let insts: Vec<(String, Instance)> = if inputs.is_empty() {
                if n < 2 {
                    bail!(qubo_decomp::Error::InvalidInput("--n must be at least 2".into()));
                }
                (0..count)
                    .map(|i| {
                        let s = qubo_decomp::rng::stream_seed(seed, "verify", i as u64);
                        let size = 2 + (s as usize % (n - 1));
                        let g = generate_connected(size, 0.3, 1, 5, s)?;
                        Ok((format!("random-{i:04}"), Instance::MaxCut(g)))
                    })
                    .collect::<anyhow::Result<_>>()?
            } else {
                inputs
                    .iter()
                    .map(|p| Ok((p.display().to_string(), load(p)?)))
                    .collect::<anyhow::Result<_>>()?
            };
            let mut mismatches = 0;
            for (id, inst) in &insts {
                let q = inst.to_qubo();
                let orig = exact_optimum_with_limit(&q, experiment::ORACLE_LIMIT)?.value;
                let trace = decompose(inst, &cfg)?;
                let fin = exact_optimum_with_limit(&trace.final_instance.to_qubo(), experiment::ORACLE_LIMIT)?;
                let reduced = fin.value + trace.c_total;
                let lifted = inst.evaluate_bits(lift_solution(&trace, &fin.witness)?.bits())?;
                let tol = 1e-6 * orig.abs().max(1.0);
                let budget = trace.error_budget();
                let ok = if trace.all_exact() {
                    (orig - reduced).abs() <= tol && (lifted - orig).abs() <= tol
                } else {
                    (orig - reduced).abs() <= budget + tol
                };
                if !ok {
                    mismatches += 1;
                }
                println!(
                    "{id}: n={} final_n={} optimum={orig} reduced+c={reduced} lifted={lifted} exact={} budget={budget} {}",
                    inst.n(),
                    trace.final_n(),
                    trace.all_exact(),
                    if ok { "ok" } else { "MISMATCH" }
                );
            }
            if mismatches > 0 {
                eprintln!("{mismatches} of {} instances failed", insts.len());
                return Ok(EXIT_MISMATCH);
            }
        }
    }
    Ok(0)
}

fn main() -> ExitCode {
    env_logger::init();
    let cli = Cli::parse();
    match run(cli) {
        Ok(code) => ExitCode::from(code),
        Err(e) => {
            eprintln!("error: {e:#}");
            let resource = e
                .downcast_ref::<qubo_decomp::Error>()
                .is_some_and(|e| e.is_resource());
            ExitCode::from(if resource { EXIT_RESOURCE } else { EXIT_INPUT })
        }
    }
}
