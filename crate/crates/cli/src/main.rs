use clap::{Parser, Subcommand, ValueEnum};
use repcat::analysis::ExponentFamily;
use repcat::montecarlo::describe_fault;
use repcat::ExperimentKind;
use repcat_cli::*;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

#[derive(Parser)]
#[command(
    name = "repcat",
    version,
    about = "Repetition cat qubit fault-tolerance simulator"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Clone, Copy, ValueEnum)]
enum Family {
    Half,
    Quarter,
}

impl From<Family> for ExponentFamily {
    fn from(f: Family) -> Self {
        match f {
            Family::Half => ExponentFamily::Half,
            Family::Quarter => ExponentFamily::Quarter,
        }
    }
}

#[derive(clap::Args)]
struct SweepArgs {
    /// JSON sweep configuration.
    #[arg(long)]
    config: PathBuf,
    /// `key=value` override, dotted keys for nested fields; repeatable.
    #[arg(long = "set", value_name = "KEY=VALUE")]
    overrides: Vec<String>,
    #[arg(long)]
    seed: Option<u64>,
    #[arg(long)]
    max_trajectories: Option<u64>,
    #[arg(long)]
    min_failures: Option<u64>,
    /// Output prefix; `.json` and `.csv` are appended.
    #[arg(long)]
    out: Option<PathBuf>,
}

impl SweepArgs {
    fn load(&self) -> Result<ExperimentConfig, CliError> {
        let text = std::fs::read_to_string(&self.config)
            .map_err(|e| CliError::config(format!("{}: {e}", self.config.display())))?;
        let mut o = self.overrides.clone();
        if let Some(s) = self.seed {
            o.push(format!("seed={s}"));
        }
        if let Some(n) = self.max_trajectories {
            o.push(format!("stopping.max_trajectories={n}"));
        }
        if let Some(n) = self.min_failures {
            o.push(format!("stopping.min_failures={n}"));
        }
        if let Some(p) = &self.out {
            o.push(format!("out={}", serde_json::to_string(p).expect("path")));
        }
        parse_config(&text, &o)
    }
}

#[derive(Subcommand)]
enum Command {
    /// Run a sweep and write `<out>.json` and `<out>.csv`.
    Run {
        #[command(flatten)]
        sweep: SweepArgs,
        #[arg(long, env = "REPCAT_WORKERS", default_value_t = 1)]
        workers: usize,
        /// Progress on standard error.
        #[arg(long)]
        progress: bool,
    },
    /// Fit `A (p/p_th)^e(d)` to result files (`.json` records or sweep CSVs).
    Fit {
        files: Vec<PathBuf>,
        #[arg(long, value_enum, default_value = "half")]
        family: Family,
        /// Fit report (JSON).
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Memory overhead table from a fit report.
    Overhead {
        #[arg(long)]
        fit: PathBuf,
        /// Physical phase-flip probabilities.
        #[arg(long, value_delimiter = ',', required = true)]
        p: Vec<f64>,
        /// Target logical error probabilities.
        #[arg(long, value_delimiter = ',', default_value = "1e-10")]
        targets: Vec<f64>,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Exhaustive fault-set insertion up to a weight.
    Enumerate {
        #[arg(long)]
        experiment: ExperimentKind,
        #[arg(long)]
        d: usize,
        #[arg(long, default_value_t = 1)]
        max_weight: usize,
        /// Largest number of fault sets to examine.
        #[arg(long, default_value_t = 2_000_000)]
        budget: u64,
        /// Collapse seeds per fault set.
        #[arg(long, default_value_t = 4)]
        seeds: u64,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Check a configuration and the circuits it builds.
    Validate {
        #[command(flatten)]
        sweep: SweepArgs,
    },
}

fn write(path: &Path, text: &str) -> Result<(), CliError> {
    std::fs::write(path, text).map_err(|e| CliError {
        code: 1,
        message: format!("{}: {e}", path.display()),
    })
}

fn with_ext(prefix: &Path, ext: &str) -> PathBuf {
    let mut s = prefix.as_os_str().to_owned();
    s.push(".");
    s.push(ext);
    PathBuf::from(s)
}

fn run(cli: Cli) -> Result<(), CliError> {
    match cli.command {
        Command::Run {
            sweep,
            workers,
            progress,
        } => {
            let cfg = sweep.load()?;
            let record = run_sweep(&cfg, workers.max(1), progress)?;
            let table = csv(&record.estimates);
            match &cfg.out {
                Some(prefix) => {
                    write(
                        &with_ext(prefix, "json"),
                        &serde_json::to_string_pretty(&record).expect("serializable"),
                    )?;
                    write(&with_ext(prefix, "csv"), &table)?;
                }
                None => print!("{table}"),
            }
            let censored = record.estimates.iter().filter(|e| e.censored).count();
            if censored > 0 {
                eprintln!("{censored} point(s) censored");
            }
        }
        Command::Fit { files, family, out } => {
            let mut points = Vec::new();
            for f in &files {
                points.extend(read_points(f)?);
            }
            let fit = fit(&points, family.into())?;
            println!(
                "A = {:.6e}\np_th = {:.6e}\nrms = {:.4}\npoints = {}",
                fit.a, fit.p_th, fit.rms, fit.points_used
            );
            if let Some(out) = out {
                write(
                    &out,
                    &serde_json::to_string_pretty(&fit).expect("serializable"),
                )?;
            }
        }
        Command::Overhead {
            fit,
            p,
            targets,
            out,
        } => {
            let text = std::fs::read_to_string(&fit)
                .map_err(|e| CliError::config(format!("{}: {e}", fit.display())))?;
            let fit = serde_json::from_str(&text)
                .map_err(|e| CliError::config(format!("{}: {e}", fit.display())))?;
            let table = overhead_csv(&fit, &p, &targets);
            match out {
                Some(out) => write(&out, &table)?,
                None => print!("{table}"),
            }
        }
        Command::Enumerate {
            experiment,
            d,
            max_weight,
            budget,
            seeds,
            out,
        } => {
            let (prep, cfg, census) = enumerate(experiment, d, max_weight, budget, seeds)?;
            let mut text = format!(
                "examined {} failing {}\n",
                census.examined,
                census.failing.len()
            );
            for (set, ops) in &census.failing {
                let faults: Vec<String> = set
                    .iter()
                    .map(|&f| describe_fault(&prep, &cfg, f))
                    .collect();
                let ops: Vec<String> = ops.iter().map(|o| o.to_string()).collect();
                text.push_str(&format!("{} -> {}\n", faults.join(" + "), ops.join(" ")));
            }
            match out {
                Some(out) => write(&out, &text)?,
                None => print!("{text}"),
            }
        }
        Command::Validate { sweep } => {
            let cfg = sweep.load()?;
            let mut bad = 0;
            for &d in &cfg.distances {
                let exp = cfg
                    .experiment
                    .build(d)
                    .map_err(|e| CliError::config(e.to_string()))?;
                for v in exp.validate() {
                    println!("d={d}: {v}");
                    bad += 1;
                }
            }
            if bad > 0 {
                return Err(CliError::config(format!("{bad} violation(s)")));
            }
            println!("ok");
        }
    }
    Ok(())
}

fn main() -> ExitCode {
    match run(Cli::parse()) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(e.code as u8)
        }
    }
}
