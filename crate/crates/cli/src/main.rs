//! Command-line front end: validate configs, run experiments, emit figure data.

use std::path::{Path, PathBuf};
use std::process::ExitCode;

use anyhow::{bail, Context, Result};
use clap::{Args, Parser, Subcommand};
use log::info;

use uav_vr_alloc::output::{self, write_file};
use uav_vr_alloc::sim::{self, MetricWindows, RunRecord, SweepSpec};
use uav_vr_alloc::{Algorithm, ExperimentConfig};

#[derive(Parser, Debug)]
#[command(name = "uav-vr-alloc", version, about = "UAV LTE-U resource allocation for VR users")]
struct Cli {
    /// TOML config file; defaults apply to every key it leaves out.
    #[arg(long, global = true, value_name = "PATH")]
    config: Option<PathBuf>,

    /// Override a config key after loading, e.g. `--set topology.n_uavs=3`.
    #[arg(long = "set", global = true, value_name = "KEY=VALUE")]
    overrides: Vec<String>,

    /// Worker threads for independent runs (default: all cores).
    #[arg(long, global = true)]
    jobs: Option<usize>,

    #[command(subcommand)]
    command: Command,
}

#[derive(Args, Debug, Clone)]
struct RunArgs {
    /// Master seed.
    #[arg(long)]
    seed: Option<u64>,
    /// Independent runs per cell.
    #[arg(long)]
    runs: Option<usize>,
    /// Output directory.
    #[arg(long)]
    out: Option<PathBuf>,
    /// Algorithms to run (repeatable): esn-leaky, esn, q, q-lte.
    #[arg(long = "algo", value_parser = parse_algo)]
    algos: Vec<Algorithm>,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Load and validate the configuration, then print it with defaults filled in.
    Validate,
    /// Runs at the configured UAV count; writes results.csv and summary.csv.
    Run {
        #[command(flatten)]
        args: RunArgs,
        /// Also write the per-iteration trace.
        #[arg(long)]
        trace: bool,
    },
    /// Sweep the UAV count; writes results.csv and summary.csv.
    Sweep {
        #[command(flatten)]
        args: RunArgs,
    },
    /// Write fig3.csv ... fig6.csv.
    Figures {
        #[command(flatten)]
        args: RunArgs,
        /// Comma-separated subset of figures, e.g. `--only 4` or `--only 3,6`.
        #[arg(long, value_delimiter = ',', value_parser = clap::value_parser!(u8).range(3..=6))]
        only: Vec<u8>,
    },
    /// Play a desk-scale game and check the empirical profile for an epsilon-equilibrium.
    NashCheck {
        #[command(flatten)]
        args: RunArgs,
        /// Largest regret accepted as an equilibrium.
        #[arg(long, default_value_t = 0.05)]
        tolerance: f64,
    },
}

fn parse_algo(s: &str) -> Result<Algorithm, String> {
    s.parse().map_err(|e: uav_vr_alloc::Error| e.to_string())
}

fn load(cli: &Cli) -> Result<ExperimentConfig> {
    let text = match &cli.config {
        Some(p) => std::fs::read_to_string(p).with_context(|| format!("reading {}", p.display()))?,
        None => String::new(),
    };
    Ok(ExperimentConfig::from_toml_str(&text, &cli.overrides)?)
}

fn apply(cfg: &mut ExperimentConfig, args: &RunArgs) -> Result<PathBuf> {
    if let Some(s) = args.seed {
        cfg.experiment.master_seed = s;
    }
    if let Some(r) = args.runs {
        cfg.experiment.n_runs = r;
    }
    if !args.algos.is_empty() {
        cfg.experiment.algorithms = args.algos.clone();
    }
    if let Some(o) = &args.out {
        cfg.experiment.out_dir = o.display().to_string();
    }
    cfg.validate()?;
    Ok(PathBuf::from(&cfg.experiment.out_dir))
}

fn write_runs(records: &[RunRecord], out: &Path) -> Result<()> {
    write_file(&out.join("results.csv"), |w| output::write_results_csv(records, w))?;
    write_file(&out.join("summary.csv"), |w| output::write_summary_csv(records, w))?;
    Ok(())
}

fn main() -> ExitCode {
    env_logger::Builder::from_env(env_logger::Env::new().filter_or("UAV_VR_ALLOC_LOG", "warn")).init();
    match real_main() {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e:#}");
            ExitCode::FAILURE
        }
    }
}

fn real_main() -> Result<()> {
    let cli = Cli::parse();
    if let Some(j) = cli.jobs {
        if j == 0 {
            bail!("--jobs must be at least 1");
        }
        rayon::ThreadPoolBuilder::new().num_threads(j).build_global()?;
    }
    let mut cfg = load(&cli)?;
    match &cli.command {
        Command::Validate => {
            print!("{}", cfg.to_toml_string()?);
            eprintln!("config ok");
        }
        Command::Run { args, trace } => {
            let out = apply(&mut cfg, args)?;
            let b = cfg.topology.n_uavs;
            let mut records = vec![];
            for &algo in &cfg.experiment.algorithms {
                for run in 0..cfg.experiment.n_runs {
                    let seed = sim::run_seed(cfg.experiment.master_seed, run);
                    let ep = sim::run_episode(&cfg, algo, b, seed, *trace)?;
                    if let Some(rows) = &ep.trace {
                        let single = cfg.experiment.algorithms.len() == 1 && cfg.experiment.n_runs == 1;
                        let name = if single {
                            "trace.csv".to_string()
                        } else {
                            format!("trace_{algo}_{run}.csv")
                        };
                        write_file(&out.join(name), |w| output::write_trace_csv(rows, w))?;
                    }
                    records.push(RunRecord {
                        sweep_value: b,
                        algo,
                        run,
                        seed,
                        metrics: ep.metrics,
                    });
                }
            }
            write_runs(&records, &out)?;
            info!("wrote {} runs to {}", records.len(), out.display());
        }
        Command::Sweep { args } => {
            let out = apply(&mut cfg, args)?;
            let records = sim::sweep(&cfg, &SweepSpec::from_config(&cfg))?;
            write_runs(&records, &out)?;
            info!("wrote {} runs to {}", records.len(), out.display());
        }
        Command::Figures { args, only } => {
            let out = apply(&mut cfg, args)?;
            for path in output::run_figures(&cfg, only, &out)? {
                info!("wrote {}", path.display());
            }
        }
        Command::NashCheck { args, tolerance } => {
            let out = apply(&mut cfg, args)?;
            let algo = cfg.experiment.algorithms[0];
            let seed = sim::run_seed(cfg.experiment.master_seed, 0);
            let scenario = sim::build_scenario(&cfg, algo, cfg.topology.n_uavs, seed)?;
            let mut learners = sim::build_learners(&cfg, algo, &scenario.catalogs, seed)?;
            let horizon = cfg.experiment.horizon;
            let report = sim::nash_check(
                &scenario,
                &mut learners,
                cfg.exploration.schedule(horizon),
                horizon,
                MetricWindows::from_config(&cfg),
                u128::from(cfg.game.oracle_cell_cap),
            )?;
            write_file(&out.join("utility_table.csv"), |w| report.game.write_csv(w))?;
            for (j, r) in report.regrets.iter().enumerate() {
                println!("uav {j}: regret {r:.6}");
            }
            let verdict = if report.max_regret() <= *tolerance { "is" } else { "is not" };
            println!("empirical profile {verdict} a {tolerance}-equilibrium (max regret {:.6})", report.max_regret());
        }
    }
    Ok(())
}
