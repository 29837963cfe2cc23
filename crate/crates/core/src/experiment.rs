//! Multi-seed convergence experiments: budgeted chains per kernel, running
//! metrics at LL-evaluation checkpoints, cross-run quartiles, and CSV output.

use std::collections::BTreeMap;
use std::io::{self, Write};
use std::path::{Path, PathBuf};

use ordered_float::NotNan;
use rayon::prelude::*;
use thiserror::Error;

use crate::dist::Value;
use crate::error::InferenceError;
use crate::metrics::{kl_divergence, ks_from_counts, mse, percentile};
use crate::models::oracles::CdfOracle;
use crate::models::{BenchmarkModel, Metric, Oracle, Pmf};
use crate::scheduler::{run_inference_with, KernelSpec};
use crate::trace::Trace;

#[derive(Debug, Error)]
pub enum ExperimentError {
    #[error("every chain of kernel {kernel} failed; first error: {first}")]
    AllChainsFailed {
        kernel: String,
        first: InferenceError,
    },
    #[error("{path}: {source}")]
    Io {
        path: PathBuf,
        #[source]
        source: io::Error,
    },
}

/// Metric values of one chain at each checkpoint.
#[derive(Debug, Clone, PartialEq)]
pub struct ConvergenceCurve {
    pub seed: u64,
    /// (ll_count, metric) pairs; ll_count strictly increasing.
    pub points: Vec<(u64, f64)>,
}

#[derive(Debug, Clone, PartialEq)]
pub struct QuartileRow {
    pub ll_count: u64,
    pub p25: f64,
    pub median: f64,
    pub p75: f64,
}

#[derive(Debug, Clone, PartialEq)]
pub struct ExperimentSummary {
    pub kernels: Vec<(String, Vec<QuartileRow>)>,
}

/// 20 log-spaced checkpoints between budget/100 and budget.
pub fn default_checkpoints(budget: u64) -> Vec<u64> {
    let lo = (budget / 100).max(1) as f64;
    let hi = budget as f64;
    let mut out: Vec<u64> = (0..20)
        .map(|i| {
            let t = i as f64 / 19.0;
            (lo * (hi / lo).powf(t)).round() as u64
        })
        .collect();
    out.dedup();
    out
}

/// Running-average metric state over a sample stream.
enum MetricAcc<'m> {
    Ks {
        name: &'m str,
        oracle: &'m CdfOracle,
        counts: BTreeMap<NotNan<f64>, u64>,
        n: u64,
    },
    Kl {
        oracles: &'m BTreeMap<String, Pmf>,
        counts: BTreeMap<&'m str, BTreeMap<i64, u64>>,
        n: u64,
    },
    Mse {
        labels: &'m [f64],
        sums: Vec<f64>,
        n: u64,
    },
}

impl<'m> MetricAcc<'m> {
    fn new(model: &'m BenchmarkModel) -> Self {
        match model.metric {
            Metric::Ks => {
                let oracle = match model.oracle.get() {
                    Oracle::Cdf(c) => c,
                    _ => unreachable!("KS model carries a cdf oracle"),
                };
                MetricAcc::Ks {
                    name: &model.predict_names[0],
                    oracle,
                    counts: BTreeMap::new(),
                    n: 0,
                }
            }
            Metric::Kl => {
                let oracles = match model.oracle.get() {
                    Oracle::Pmf(p) => p,
                    _ => unreachable!("KL model carries pmf oracles"),
                };
                MetricAcc::Kl {
                    oracles,
                    counts: model
                        .predict_names
                        .iter()
                        .map(|n| (n.as_str(), BTreeMap::new()))
                        .collect(),
                    n: 0,
                }
            }
            Metric::Mse => {
                let labels = model
                    .mse_labels
                    .as_deref()
                    .expect("MSE model carries labels");
                MetricAcc::Mse {
                    labels,
                    sums: vec![0.0; labels.len()],
                    n: 0,
                }
            }
        }
    }

    fn push(&mut self, predicts: &BTreeMap<String, Value>) {
        match self {
            MetricAcc::Ks { name, counts, n, .. } => {
                let x = predicts[*name].expect_real();
                let key = NotNan::new(x).expect("predicted value is NaN");
                *counts.entry(key).or_insert(0) += 1;
                *n += 1;
            }
            MetricAcc::Kl { counts, n, .. } => {
                for (name, per_name) in counts.iter_mut() {
                    let v = predicts[*name].expect_int();
                    *per_name.entry(v).or_insert(0) += 1;
                }
                *n += 1;
            }
            MetricAcc::Mse { sums, n, .. } => {
                match &predicts["probs"] {
                    Value::List(ps) => {
                        for (acc, p) in sums.iter_mut().zip(ps) {
                            *acc += p.expect_real();
                        }
                    }
                    other => panic!("expected probability list, got {other:?}"),
                }
                *n += 1;
            }
        }
    }

    /// Metric over everything pushed so far. NaN when nothing has arrived.
    fn value(&self) -> f64 {
        match self {
            MetricAcc::Ks { oracle, counts, n, .. } => {
                if *n == 0 {
                    return f64::NAN;
                }
                ks_from_counts(
                    counts.iter().map(|(k, &c)| (k.into_inner(), c)),
                    *n,
                    |x| oracle.eval(x),
                )
            }
            MetricAcc::Kl { oracles, counts, n } => {
                if *n == 0 {
                    return f64::NAN;
                }
                let mut total = 0.0;
                for (name, per_name) in counts {
                    let emp: BTreeMap<i64, f64> = per_name
                        .iter()
                        .map(|(&k, &c)| (k, c as f64 / *n as f64))
                        .collect();
                    total += kl_divergence(&emp, &oracles[*name]);
                }
                total / counts.len() as f64
            }
            MetricAcc::Mse { labels, sums, n } => {
                if *n == 0 {
                    return f64::NAN;
                }
                let means: Vec<f64> = sums.iter().map(|s| s / *n as f64).collect();
                mse(&means, labels).expect("label lengths are fixed")
            }
        }
    }
}

/// One chain's convergence curve: the metric at checkpoint c is computed
/// from every sample recorded with ll_count <= c.
pub fn run_curve(
    model: &BenchmarkModel,
    spec: &KernelSpec,
    budget: u64,
    seed: u64,
    checkpoints: &[u64],
) -> Result<ConvergenceCurve, InferenceError> {
    let mut acc = MetricAcc::new(model);
    let mut points = Vec::with_capacity(checkpoints.len());
    let mut next = 0usize;
    run_inference_with(&model.program, spec, budget, seed, |ll_count, trace: &Trace| {
        while next < checkpoints.len() && ll_count > checkpoints[next] {
            points.push((checkpoints[next], acc.value()));
            next += 1;
        }
        acc.push(&trace.predicts);
    })?;
    while next < checkpoints.len() {
        points.push((checkpoints[next], acc.value()));
        next += 1;
    }
    Ok(ConvergenceCurve { seed, points })
}

/// Run `n_runs` chains per kernel (seeds base_seed..base_seed+n_runs) and
/// aggregate quartiles per checkpoint. Failed chains are reported on stderr
/// and excluded; a kernel with no surviving chain is an error.
pub fn run_experiment(
    model: &BenchmarkModel,
    specs: &[KernelSpec],
    budget: u64,
    n_runs: u64,
    base_seed: u64,
    checkpoints: &[u64],
) -> Result<ExperimentSummary, ExperimentError> {
    // force the oracle once, outside the worker threads
    let _ = model.oracle.get();
    let mut kernels = Vec::with_capacity(specs.len());
    for spec in specs {
        let results: Vec<(u64, Result<ConvergenceCurve, InferenceError>)> = (0..n_runs)
            .into_par_iter()
            .map(|i| {
                let seed = base_seed + i;
                (seed, run_curve(model, spec, budget, seed, checkpoints))
            })
            .collect();

        let mut curves = Vec::with_capacity(results.len());
        let mut first_err = None;
        for (seed, r) in results {
            match r {
                Ok(c) => curves.push(c),
                Err(e) => {
                    eprintln!(
                        "warning: kernel {} seed {seed} failed and is excluded: {e}",
                        spec.label()
                    );
                    first_err.get_or_insert(e);
                }
            }
        }
        if curves.is_empty() {
            return Err(ExperimentError::AllChainsFailed {
                kernel: spec.label(),
                first: first_err.expect("at least one failure recorded"),
            });
        }

        let rows = (0..checkpoints.len())
            .map(|ci| {
                let mut values: Vec<f64> = curves.iter().map(|c| c.points[ci].1).collect();
                values.sort_by(|a, b| a.partial_cmp(b).expect("metric values comparable"));
                QuartileRow {
                    ll_count: checkpoints[ci],
                    p25: percentile(&values, 0.25),
                    median: percentile(&values, 0.5),
                    p75: percentile(&values, 0.75),
                }
            })
            .collect();
        kernels.push((spec.label(), rows));
    }
    Ok(ExperimentSummary { kernels })
}

fn io_err(path: &Path) -> impl FnOnce(io::Error) -> ExperimentError + '_ {
    move |source| ExperimentError::Io {
        path: path.to_path_buf(),
        source,
    }
}

/// Quartile CSV: `ll_count,kernel,p25,median,p75`, one row per checkpoint
/// per kernel. Deterministic bytes for fixed inputs.
pub fn write_summary_csv(path: &Path, summary: &ExperimentSummary) -> Result<(), ExperimentError> {
    let mut out = String::from("ll_count,kernel,p25,median,p75\n");
    for (kernel, rows) in &summary.kernels {
        for r in rows {
            out.push_str(&format!(
                "{},{},{},{},{}\n",
                r.ll_count, kernel, r.p25, r.median, r.p75
            ));
        }
    }
    std::fs::write(path, out).map_err(io_err(path))
}

/// Sample-stream CSV: `ll_count,name,value`; list-valued predictions are
/// flattened to `name[i]` rows.
pub fn write_samples<W: Write>(
    mut w: W,
    records: &[crate::trace::SampleRecord],
) -> io::Result<()> {
    writeln!(w, "ll_count,name,value")?;
    for rec in records {
        for (name, value) in &rec.predicts {
            match value {
                Value::Real(x) => writeln!(w, "{},{},{}", rec.ll_count, name, x)?,
                Value::Int(k) => writeln!(w, "{},{},{}", rec.ll_count, name, k)?,
                Value::List(vs) => {
                    for (i, v) in vs.iter().enumerate() {
                        match v {
                            Value::Real(x) => {
                                writeln!(w, "{},{}[{}],{}", rec.ll_count, name, i, x)?
                            }
                            Value::Int(k) => {
                                writeln!(w, "{},{}[{}],{}", rec.ll_count, name, i, k)?
                            }
                            Value::List(_) => writeln!(w, "{},{}[{}],nested", rec.ll_count, name, i)?,
                        }
                    }
                }
            }
        }
    }
    Ok(())
}

pub fn write_samples_csv(
    path: &Path,
    records: &[crate::trace::SampleRecord],
) -> Result<(), ExperimentError> {
    let file = std::fs::File::create(path).map_err(io_err(path))?;
    write_samples(io::BufWriter::new(file), records).map_err(io_err(path))
}

/// Equal-width histogram over the observed range; masses sum to 1.
pub fn histogram(values: &[f64], bins: usize) -> Vec<(f64, f64, f64)> {
    debug_assert!(!values.is_empty() && bins >= 1);
    let lo = values.iter().cloned().fold(f64::INFINITY, f64::min);
    let hi = values.iter().cloned().fold(f64::NEG_INFINITY, f64::max);
    let width = if hi > lo { (hi - lo) / bins as f64 } else { 1.0 };
    let mut counts = vec![0u64; bins];
    for &v in values {
        let idx = (((v - lo) / width) as usize).min(bins - 1);
        counts[idx] += 1;
    }
    let n = values.len() as f64;
    counts
        .iter()
        .enumerate()
        .map(|(i, &c)| {
            (
                lo + i as f64 * width,
                lo + (i + 1) as f64 * width,
                c as f64 / n,
            )
        })
        .collect()
}

/// Histogram CSV: `bin_lo,bin_hi,mass`.
pub fn write_histogram_csv(path: &Path, bins: &[(f64, f64, f64)]) -> Result<(), ExperimentError> {
    let mut out = String::from("bin_lo,bin_hi,mass\n");
    for (lo, hi, mass) in bins {
        out.push_str(&format!("{lo},{hi},{mass}\n"));
    }
    std::fs::write(path, out).map_err(io_err(path))
}
