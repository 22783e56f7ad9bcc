//! `spikeres` command line. Exit codes: 0 success, 1 runtime error, 2 usage error.

use std::ffi::OsString;
use std::fs;
use std::path::PathBuf;

use clap::error::ErrorKind;
use clap::{Parser, Subcommand};
use serde_json::Value;
use spikeres::fmt::g17;

use crate::error::{Result, XlabError};
use crate::experiments::{run_experiment, ScalingFit};
use crate::spec::{ExperimentKind, ExperimentSpec, RunManifest};

#[derive(Debug, Parser)]
#[command(name = "spikeres", version, about = "Spike-train reconstruction experiments")]
struct Cli {
    /// Output directory.
    #[arg(long, global = true, default_value = "runs")]
    out: PathBuf,
    #[arg(long, global = true, default_value_t = 0)]
    seed: u64,
    /// Print the run manifest as JSON on stdout.
    #[arg(long, global = true)]
    json: bool,
    /// Worker threads for parallel experiment cells.
    #[arg(long, global = true)]
    jobs: Option<usize>,
    #[command(subcommand)]
    command: Command,
}

#[derive(Debug, Subcommand)]
enum Command {
    /// Signal parameters and exact moment differences of the three families.
    Tables {
        #[arg(long, default_value_t = 0.1)]
        h: f64,
        #[arg(long, default_value_t = 0.05)]
        eta: f64,
    },
    /// Normalized Fourier differences DF/h of the three families.
    Figure1 {
        #[arg(long, default_value_t = 0.1)]
        h: f64,
        #[arg(long, default_value_t = 0.05)]
        eta: f64,
        #[arg(long, default_value_t = 1.0)]
        s_max: f64,
        #[arg(long, default_value_t = 256)]
        samples: usize,
    },
    /// Checks the Fourier-gap bound on random adversarial pairs.
    GapBound {
        #[arg(long, value_delimiter = ',', default_value = "2,3")]
        l: Vec<usize>,
        #[arg(long, default_value_t = 50)]
        trials: usize,
    },
    /// Worst-case node error against noise level on adversarial data.
    Scaling {
        #[arg(long)]
        l: usize,
        #[arg(long = "bandwidth", visible_alias = "N", default_value_t = 10.0)]
        bandwidth: f64,
        #[arg(long, value_delimiter = ',', default_value = "1e-3,1e-4,1e-5,1e-6,1e-7,1e-8,1e-9")]
        epsilons: Vec<f64>,
        #[arg(long, default_value_t = 20)]
        trials: usize,
    },
    /// Builds one maximal adversarial pair and its Fourier-gap profile.
    Adversary {
        #[arg(long, default_value_t = 2)]
        l: usize,
        #[arg(long, default_value_t = 0.01)]
        h: f64,
    },
    /// Reconstructs a signal (JSON file) from random-noise Fourier data.
    Decimate {
        #[arg(long)]
        signal: PathBuf,
        /// Decimation config JSON file.
        #[arg(long)]
        config: PathBuf,
        #[arg(long)]
        epsilon: f64,
        #[arg(long = "bandwidth", visible_alias = "N")]
        bandwidth: f64,
    },
    /// Runs an experiment spec JSON file (`--out` is ignored).
    Run { spec: PathBuf },
}

/// Entry point; `argv[0]` is the program name.
pub fn cli_main<I, T>(argv: I) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(argv) {
        Ok(cli) => cli,
        Err(e) => {
            let code = match e.kind() {
                ErrorKind::DisplayHelp | ErrorKind::DisplayVersion => 0,
                _ => 2,
            };
            let _ = e.print();
            return code;
        }
    };
    match execute(&cli) {
        Ok(()) => 0,
        Err(e) => {
            eprintln!("error: {e}");
            if e.is_usage() {
                2
            } else {
                1
            }
        }
    }
}

fn read_json(path: &PathBuf) -> Result<Value> {
    let text = fs::read_to_string(path).map_err(|e| XlabError::io(path, e))?;
    serde_json::from_str(&text).map_err(|e| XlabError::Spec(format!("{}: {e}", path.display())))
}

fn build_spec(cli: &Cli) -> Result<ExperimentSpec> {
    let spec = |kind| ExperimentSpec::new(kind, &cli.out);
    Ok(match &cli.command {
        Command::Tables { h, eta } => spec(ExperimentKind::Tables).with("h", *h).with("eta", *eta),
        Command::Figure1 { h, eta, s_max, samples } => spec(ExperimentKind::Figure1)
            .with("h", *h)
            .with("eta", *eta)
            .with("s_max", *s_max)
            .with("samples", *samples),
        Command::GapBound { l, trials } => spec(ExperimentKind::GapBound)
            .with("l", l.clone())
            .with("trials", *trials)
            .with("seed", cli.seed),
        Command::Scaling {
            l,
            bandwidth,
            epsilons,
            trials,
        } => spec(ExperimentKind::Scaling)
            .with("l", *l)
            .with("N", *bandwidth)
            .with("epsilons", epsilons.clone())
            .with("trials", *trials)
            .with("seed", cli.seed),
        Command::Adversary { l, h } => spec(ExperimentKind::AdversaryDemo)
            .with("l", *l)
            .with("h", *h)
            .with("seed", cli.seed),
        Command::Decimate {
            signal,
            config,
            epsilon,
            bandwidth,
        } => {
            let mut config = read_json(config)?;
            if let Value::Object(map) = &mut config {
                map.entry("seed").or_insert(cli.seed.into());
            }
            spec(ExperimentKind::Decimate)
                .with("signal", read_json(signal)?)
                .with("config", config)
                .with("epsilon", *epsilon)
                .with("N", *bandwidth)
        }
        Command::Run { spec } => {
            let text = fs::read_to_string(spec).map_err(|e| XlabError::io(spec, e))?;
            ExperimentSpec::from_json(&text)?
        }
    })
}

fn execute(cli: &Cli) -> Result<()> {
    let spec = build_spec(cli)?;
    let manifest = match cli.jobs {
        Some(0) => return Err(XlabError::Spec("--jobs must be >= 1".into())),
        Some(jobs) => rayon::ThreadPoolBuilder::new()
            .num_threads(jobs)
            .build()
            .map_err(|e| XlabError::Spec(e.to_string()))?
            .install(|| run_experiment(&spec))?,
        None => run_experiment(&spec)?,
    };
    if cli.json {
        println!("{}", serde_json::to_string_pretty(&manifest)?);
    } else {
        print_human(&manifest)?;
    }
    Ok(())
}

fn print_human(manifest: &RunManifest) -> Result<()> {
    for o in &manifest.outputs {
        println!("{}  {}", o.sha256, manifest.spec.output_dir.join(&o.path).display());
    }
    if manifest.spec.kind == ExperimentKind::Scaling {
        let fit = ScalingFit::from_summary(&manifest.summary)?;
        println!(
            "slope {} (95% band [{}, {}]), expected {}, failed cells {}",
            g17(fit.slope),
            g17(fit.band95_low),
            g17(fit.band95_high),
            g17(fit.expected_slope),
            fit.failed_cells
        );
    } else {
        println!("{}", serde_json::to_string(&manifest.summary)?);
    }
    Ok(())
}
