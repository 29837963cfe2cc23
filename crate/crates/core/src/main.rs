//! Command-line front end: list the model catalogue, stream samples from a
//! single chain, run multi-seed convergence experiments, or dump a posterior
//! histogram. Output is CSV; plotting is left to whatever reads it.

use std::io::Write;
use std::path::PathBuf;

use anyhow::{bail, Context, Result};
use clap::{Args, Parser, Subcommand};

use tracemc::experiment::{
    default_checkpoints, histogram, run_experiment, write_histogram_csv, write_samples,
    write_samples_csv, write_summary_csv,
};
use tracemc::models::{by_name, MODEL_NAMES};
use tracemc::scheduler::{run_inference, KernelSpec};
use tracemc::slice::SliceConfig;
use tracemc::Value;

#[derive(Parser)]
#[command(name = "tracemc", version, about = "Trace-based probabilistic programming with MH and slice sampling kernels")]
struct Cli {
    #[command(subcommand)]
    cmd: Cmd,
}

#[derive(Args)]
struct ModelArgs {
    /// Model name from `list-models`.
    #[arg(long)]
    model: String,
    /// Iris CSV path for the classifier models (falls back to $IRIS_PATH,
    /// then the bundled copy).
    #[arg(long)]
    iris: Option<PathBuf>,
    /// Initial slice window width.
    #[arg(long, default_value_t = 1.0)]
    width: f64,
}

#[derive(Subcommand)]
enum Cmd {
    /// Print the model catalogue.
    ListModels,
    /// Run one chain and emit its sample stream as CSV.
    Run {
        #[command(flatten)]
        model: ModelArgs,
        /// Kernel: mh | slice | naive-slice | mix:BETA (BETA = MH weight).
        #[arg(long)]
        kernel: String,
        /// Stop once this many trace-likelihood evaluations are spent.
        #[arg(long)]
        budget: u64,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        /// Write CSV here instead of stdout.
        #[arg(long)]
        csv: Option<PathBuf>,
    },
    /// Multi-seed convergence comparison across kernels.
    Experiment {
        #[command(flatten)]
        model: ModelArgs,
        /// Comma-separated kernel list, e.g. `mh,slice,mix:0.1`.
        #[arg(long)]
        kernels: String,
        #[arg(long)]
        budget: u64,
        /// Independent chains per kernel.
        #[arg(long, default_value_t = 20)]
        runs: u64,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        /// Output CSV path (ll_count,kernel,p25,median,p75).
        #[arg(long)]
        out: PathBuf,
        /// Comma-separated checkpoint list; default is 20 log-spaced points.
        #[arg(long)]
        checkpoints: Option<String>,
    },
    /// Histogram of the model's first predicted value under one chain.
    Posterior {
        #[command(flatten)]
        model: ModelArgs,
        #[arg(long)]
        kernel: String,
        #[arg(long)]
        budget: u64,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        #[arg(long, default_value_t = 50)]
        bins: usize,
        #[arg(long)]
        out: PathBuf,
    },
}

fn parse_kernel(s: &str, width: f64) -> Result<KernelSpec> {
    let spec: KernelSpec = s.parse()?;
    Ok(spec.with_slice_config(SliceConfig::with_width(width)))
}

fn main() -> Result<()> {
    match Cli::parse().cmd {
        Cmd::ListModels => {
            for name in MODEL_NAMES {
                println!("{name}");
            }
        }
        Cmd::Run {
            model,
            kernel,
            budget,
            seed,
            csv,
        } => {
            let m = by_name(&model.model, model.iris.as_deref())?;
            let spec = parse_kernel(&kernel, model.width)?;
            let samples = run_inference(&m.program, &spec, budget, seed)?;
            match csv {
                Some(path) => write_samples_csv(&path, &samples)?,
                None => {
                    let stdout = std::io::stdout();
                    write_samples(stdout.lock(), &samples)?;
                }
            }
        }
        Cmd::Experiment {
            model,
            kernels,
            budget,
            runs,
            seed,
            out,
            checkpoints,
        } => {
            let m = by_name(&model.model, model.iris.as_deref())?;
            let specs: Vec<KernelSpec> = kernels
                .split(',')
                .map(|k| parse_kernel(k.trim(), model.width))
                .collect::<Result<_>>()?;
            if specs.is_empty() {
                bail!("no kernels given");
            }
            let cs = match checkpoints {
                Some(list) => {
                    let parsed: Vec<u64> = list
                        .split(',')
                        .map(|c| c.trim().parse().with_context(|| format!("bad checkpoint {c:?}")))
                        .collect::<Result<_>>()?;
                    if parsed.is_empty() || parsed.windows(2).any(|w| w[0] >= w[1]) {
                        bail!("checkpoints must be strictly increasing");
                    }
                    if *parsed.last().unwrap() > budget {
                        bail!("checkpoints must not exceed the budget");
                    }
                    parsed
                }
                None => default_checkpoints(budget),
            };
            let summary = run_experiment(&m, &specs, budget, runs, seed, &cs)?;
            write_summary_csv(&out, &summary)?;
            eprintln!("wrote {}", out.display());
        }
        Cmd::Posterior {
            model,
            kernel,
            budget,
            seed,
            bins,
            out,
        } => {
            let m = by_name(&model.model, model.iris.as_deref())?;
            let spec = parse_kernel(&kernel, model.width)?;
            let samples = run_inference(&m.program, &spec, budget, seed)?;
            let name = &m.predict_names[0];
            let values: Vec<f64> = samples
                .iter()
                .map(|s| match &s.predicts[name] {
                    Value::Real(x) => *x,
                    Value::Int(k) => *k as f64,
                    Value::List(_) => panic!("posterior histograms need a scalar prediction"),
                })
                .collect();
            write_histogram_csv(&out, &histogram(&values, bins))?;
            eprintln!("wrote {}", out.display());
        }
    }
    std::io::stdout().flush().ok();
    Ok(())
}
