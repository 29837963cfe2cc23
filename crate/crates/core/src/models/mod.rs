//! Benchmark models with their oracle posteriors.
//!
//! Each entry pairs a model program with whatever ground truth is available:
//! a closed-form posterior cdf, a grid-integrated cdf, exact pmfs from
//! exhaustive enumeration, or nothing (the classifiers, which are scored by
//! training MSE instead).

pub mod constants;
pub mod iris;
pub mod oracles;

use std::collections::BTreeMap;
use std::path::Path;
use std::sync::{Arc, OnceLock};

use thiserror::Error;

use crate::dist::{Dist, Value};
use crate::trace::ModelProgram;
use constants::*;
use iris::{load_iris, DataError, IrisClass, IrisDataset};
use oracles::{grid_posterior, CdfOracle, GridSpec};
pub use oracles::Pmf;

#[derive(Debug, Error)]
pub enum ModelError {
    #[error("unknown model {0:?}; `list-models` shows the catalogue")]
    UnknownModel(String),
    #[error(transparent)]
    Data(#[from] DataError),
    #[error("oracle construction failed: {0}")]
    Oracle(#[from] oracles::OracleError),
}

/// Convergence metric a model is scored with. The oracle kind must match:
/// a cdf for KS, pmfs for KL, none for MSE.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Metric {
    Ks,
    Kl,
    Mse,
}

pub enum Oracle {
    Cdf(CdfOracle),
    Pmf(BTreeMap<String, Pmf>),
    None,
}

/// Oracle built on first use; grid integration is not free and most CLI
/// paths never need it.
pub struct LazyOracle {
    builder: Arc<dyn Fn() -> Oracle + Send + Sync>,
    cell: OnceLock<Oracle>,
}

impl LazyOracle {
    pub fn new(builder: impl Fn() -> Oracle + Send + Sync + 'static) -> Self {
        LazyOracle {
            builder: Arc::new(builder),
            cell: OnceLock::new(),
        }
    }

    pub fn get(&self) -> &Oracle {
        self.cell.get_or_init(|| (self.builder)())
    }
}

pub struct BenchmarkModel {
    pub name: &'static str,
    pub program: ModelProgram,
    pub oracle: LazyOracle,
    pub predict_names: Vec<String>,
    pub metric: Metric,
    /// One-vs-rest 0/1 labels for the MSE models.
    pub mse_labels: Option<Vec<f64>>,
}

fn std_normal() -> Dist {
    Dist::normal(0.0, 1.0).unwrap()
}

/// Prior equals posterior: a standard normal mean with no observation.
pub fn gauss_mean_easy() -> BenchmarkModel {
    BenchmarkModel {
        name: "gauss-mean-easy",
        program: ModelProgram::new(|ctx| {
            let m = ctx.sample_at("m", std_normal()).expect_real();
            ctx.predict("m", Value::Real(m));
        }),
        oracle: LazyOracle::new(|| Oracle::Cdf(CdfOracle::Closed(std_normal()))),
        predict_names: vec!["m".into()],
        metric: Metric::Ks,
        mse_labels: None,
    }
}

/// Uninformative Uniform(0, 10000) prior against 31 unit-noise observations
/// with sample mean 2; the posterior is a near-Normal spike.
pub fn gauss_mean_hard() -> BenchmarkModel {
    BenchmarkModel {
        name: "gauss-mean-hard",
        program: ModelProgram::new(|ctx| {
            let m = ctx
                .sample_at("m", Dist::uniform(HARD_PRIOR_LO, HARD_PRIOR_HI).unwrap())
                .expect_real();
            for &x in &HARD_OBSERVATIONS {
                ctx.observe_at(Dist::normal(m, HARD_OBS_STD).unwrap(), Value::Real(x));
            }
            ctx.predict("m", Value::Real(m));
        }),
        oracle: LazyOracle::new(|| {
            let spec = GridSpec {
                lo: 0.5,
                hi: 3.5,
                points: 6000,
            };
            let grid = grid_posterior(oracles::log_posterior_hard, &spec)
                .expect("hard-prior grid covers the posterior");
            Oracle::Cdf(CdfOracle::Grid(grid))
        }),
        predict_names: vec!["m".into()],
        metric: Metric::Ks,
        mse_labels: None,
    }
}

/// m ~ N(0,1); observe N(m, 1) = 5. Conjugate posterior N(2.5, var 0.5).
pub fn normal_mean_1() -> BenchmarkModel {
    BenchmarkModel {
        name: "normal-mean-1",
        program: ModelProgram::new(|ctx| {
            let m = ctx.sample_at("m", std_normal()).expect_real();
            ctx.observe_at(Dist::normal(m, 1.0).unwrap(), Value::Real(GAUSS_OBSERVATION));
            ctx.predict("m", Value::Real(m));
        }),
        oracle: LazyOracle::new(|| {
            Oracle::Cdf(CdfOracle::Closed(Dist::normal(2.5, 0.5f64.sqrt()).unwrap()))
        }),
        predict_names: vec!["m".into()],
        metric: Metric::Ks,
        mse_labels: None,
    }
}

/// m ~ N(0,1); v ~ InverseGamma(3,1); observe N(m, sqrt(v)) = 5. The model
/// states variances, so the observation noise is sqrt(v).
pub fn normal_mean_2() -> BenchmarkModel {
    BenchmarkModel {
        name: "normal-mean-2",
        program: ModelProgram::new(|ctx| {
            let m = ctx.sample_at("m", std_normal()).expect_real();
            let v = ctx
                .sample_at("v", Dist::inverse_gamma(INV_GAMMA_SHAPE, INV_GAMMA_SCALE).unwrap())
                .expect_real();
            ctx.observe_at(
                Dist::normal(m, v.sqrt()).unwrap(),
                Value::Real(GAUSS_OBSERVATION),
            );
            ctx.predict("m", Value::Real(m));
        }),
        oracle: LazyOracle::new(|| {
            let spec = GridSpec {
                lo: -8.0,
                hi: 9.0,
                points: 8000,
            };
            let grid = grid_posterior(oracles::log_posterior_normal_mean_2, &spec)
                .expect("two-variable grid covers the posterior");
            Oracle::Cdf(CdfOracle::Grid(grid))
        }),
        predict_names: vec!["m".into()],
        metric: Metric::Ks,
        mse_labels: None,
    }
}

/// The dimension-changing variant: the variance is a random variable only on
/// the m < 0 branch. Its posterior is bimodal with about 37% of the mass on
/// the heavier-tailed negative branch.
pub fn normal_mean_3() -> BenchmarkModel {
    BenchmarkModel {
        name: "normal-mean-3",
        program: ModelProgram::new(|ctx| {
            let m = ctx.sample_at("m", std_normal()).expect_real();
            let v = if m < 0.0 {
                ctx.sample_at("v", Dist::inverse_gamma(INV_GAMMA_SHAPE, INV_GAMMA_SCALE).unwrap())
                    .expect_real()
            } else {
                NM3_FIXED_VARIANCE
            };
            ctx.observe_at(
                Dist::normal(m, v.sqrt()).unwrap(),
                Value::Real(GAUSS_OBSERVATION),
            );
            ctx.predict("m", Value::Real(m));
        }),
        oracle: LazyOracle::new(|| {
            let spec = GridSpec {
                lo: -8.0,
                hi: 9.0,
                points: 8000,
            };
            let grid = grid_posterior(oracles::log_posterior_normal_mean_3, &spec)
                .expect("piecewise grid covers the posterior");
            Oracle::Cdf(CdfOracle::Grid(grid))
        }),
        predict_names: vec!["m".into()],
        metric: Metric::Ks,
        mse_labels: None,
    }
}

/// Two Poisson(4) counts, the second sampled only when the first is at most
/// 4; a Poisson observation of 6 on a count-derived rate.
pub fn branching() -> BenchmarkModel {
    BenchmarkModel {
        name: "branching",
        program: ModelProgram::new(|ctx| {
            let r = ctx
                .sample_at("pois1", Dist::poisson(BRANCHING_RATE).unwrap())
                .expect_int();
            let l = if r > 4 {
                6
            } else {
                fib(3 * r)
                    + ctx
                        .sample_at("pois2", Dist::poisson(BRANCHING_RATE).unwrap())
                        .expect_int()
            };
            ctx.observe_at(
                Dist::poisson(l as f64).unwrap(),
                Value::Int(BRANCHING_OBSERVED),
            );
            ctx.predict("pois1", Value::Int(r));
        }),
        oracle: LazyOracle::new(|| {
            let mut pmfs = BTreeMap::new();
            pmfs.insert("pois1".to_string(), oracles::branching_pmf());
            Oracle::Pmf(pmfs)
        }),
        predict_names: vec!["pois1".into()],
        metric: Metric::Kl,
        mse_labels: None,
    }
}

/// 3-state hidden Markov chain with Normal emissions over a fixed
/// observation list; predicts every hidden state.
pub fn hmm() -> BenchmarkModel {
    BenchmarkModel {
        name: "hmm",
        program: ModelProgram::new(|ctx| {
            let mut s = ctx
                .sample_at("state", Dist::categorical(HMM_INIT.to_vec()).unwrap())
                .expect_int() as usize;
            ctx.predict("state_0", Value::Int(s as i64));
            for (t, &y) in HMM_OBSERVATIONS.iter().enumerate() {
                s = ctx
                    .sample_at("state", Dist::categorical(HMM_TRANS[s].to_vec()).unwrap())
                    .expect_int() as usize;
                ctx.observe_at(
                    Dist::normal(HMM_EMIT_MEAN[s], HMM_EMIT_STD).unwrap(),
                    Value::Real(y),
                );
                ctx.predict(&format!("state_{}", t + 1), Value::Int(s as i64));
            }
        }),
        oracle: LazyOracle::new(|| Oracle::Pmf(oracles::hmm_state_marginals())),
        predict_names: (0..=HMM_OBSERVATIONS.len())
            .map(|t| format!("state_{t}"))
            .collect(),
        metric: Metric::Kl,
        mse_labels: None,
    }
}

/// Rejection-loop polar normal generator as the prior over a mean; the loop
/// length varies, so the trace dimension does too.
pub fn marsaglia() -> BenchmarkModel {
    BenchmarkModel {
        name: "marsaglia",
        program: ModelProgram::new(|ctx| {
            let prior_sd = MARSAGLIA_PRIOR_VAR.sqrt();
            let mu = loop {
                let x = ctx
                    .sample_at("x", Dist::uniform(-1.0, 1.0).unwrap())
                    .expect_real();
                let y = ctx
                    .sample_at("y", Dist::uniform(-1.0, 1.0).unwrap())
                    .expect_real();
                let s = x * x + y * y;
                if s > 0.0 && s < 1.0 {
                    break MARSAGLIA_PRIOR_MEAN + prior_sd * x * (-2.0 * s.ln() / s).sqrt();
                }
            };
            let obs_sd = MARSAGLIA_OBS_VAR.sqrt();
            for &obs in &MARSAGLIA_OBS {
                ctx.observe_at(Dist::normal(mu, obs_sd).unwrap(), Value::Real(obs));
            }
            ctx.predict("mu", Value::Real(mu));
        }),
        oracle: LazyOracle::new(|| {
            let (mean, var) = marsaglia_posterior();
            Oracle::Cdf(CdfOracle::Closed(Dist::normal(mean, var.sqrt()).unwrap()))
        }),
        predict_names: vec!["mu".into()],
        metric: Metric::Ks,
        mse_labels: None,
    }
}

fn logistic(z: f64) -> f64 {
    1.0 / (1.0 + (-z).exp())
}

/// One-vs-rest Bayesian logistic regression on the iris data: standard
/// normal priors on four weights and a bias, Bernoulli likelihood through
/// the logistic link, scored by training MSE of the running posterior-mean
/// probabilities.
pub fn logistic_regression(class: IrisClass, data: Arc<IrisDataset>) -> BenchmarkModel {
    let labels = data.binary_labels(class);
    let label_ints: Vec<i64> = labels.iter().map(|&l| l as i64).collect();
    let name: &'static str = match class {
        IrisClass::Setosa => "logistic-setosa",
        IrisClass::Versicolor => "logistic-versicolor",
        IrisClass::Virginica => "logistic-virginica",
    };
    BenchmarkModel {
        name,
        program: ModelProgram::new(move |ctx| {
            let mut w = [0.0f64; 4];
            for slot in w.iter_mut() {
                *slot = ctx.sample_at("w", std_normal()).expect_real();
            }
            let b = ctx.sample_at("b", std_normal()).expect_real();
            let mut probs = Vec::with_capacity(data.rows.len());
            for (row, &label) in data.rows.iter().zip(&label_ints) {
                let z = b + w.iter().zip(&row.features).map(|(wi, xi)| wi * xi).sum::<f64>();
                let p = logistic(z);
                ctx.observe_at(Dist::bernoulli(p).unwrap(), Value::Int(label));
                probs.push(Value::Real(p));
            }
            ctx.predict("probs", Value::List(probs));
        }),
        oracle: LazyOracle::new(|| Oracle::None),
        predict_names: vec!["probs".into()],
        metric: Metric::Mse,
        mse_labels: Some(labels),
    }
}

/// Small Bayesian feed-forward network on the iris data: layers 4-4-2-1,
/// tanh hidden activations, logistic output, standard normal priors on all
/// 33 weights and biases.
pub fn bayes_nn(class: IrisClass, data: Arc<IrisDataset>) -> BenchmarkModel {
    let labels = data.binary_labels(class);
    let label_ints: Vec<i64> = labels.iter().map(|&l| l as i64).collect();
    let name: &'static str = match class {
        IrisClass::Setosa => "nn-setosa",
        IrisClass::Versicolor => "nn-versicolor",
        IrisClass::Virginica => "nn-virginica",
    };
    BenchmarkModel {
        name,
        program: ModelProgram::new(move |ctx| {
            let mut sample_block = |base: &str, n: usize| -> Vec<f64> {
                (0..n)
                    .map(|_| ctx.sample_at(base, std_normal()).expect_real())
                    .collect()
            };
            let w1 = sample_block("w1", 16);
            let b1 = sample_block("b1", 4);
            let w2 = sample_block("w2", 8);
            let b2 = sample_block("b2", 2);
            let w3 = sample_block("w3", 2);
            let b3 = sample_block("b3", 1);

            let mut probs = Vec::with_capacity(data.rows.len());
            for (row, &label) in data.rows.iter().zip(&label_ints) {
                let mut h1 = [0.0f64; 4];
                for (o, h) in h1.iter_mut().enumerate() {
                    let z: f64 = (0..4).map(|i| w1[o * 4 + i] * row.features[i]).sum();
                    *h = (z + b1[o]).tanh();
                }
                let mut h2 = [0.0f64; 2];
                for (o, h) in h2.iter_mut().enumerate() {
                    let z: f64 = (0..4).map(|i| w2[o * 4 + i] * h1[i]).sum();
                    *h = (z + b2[o]).tanh();
                }
                let z = w3[0] * h2[0] + w3[1] * h2[1] + b3[0];
                let p = logistic(z);
                ctx.observe_at(Dist::bernoulli(p).unwrap(), Value::Int(label));
                probs.push(Value::Real(p));
            }
            ctx.predict("probs", Value::List(probs));
        }),
        oracle: LazyOracle::new(|| Oracle::None),
        predict_names: vec!["probs".into()],
        metric: Metric::Mse,
        mse_labels: Some(labels),
    }
}

pub const MODEL_NAMES: [&str; 14] = [
    "gauss-mean-easy",
    "gauss-mean-hard",
    "normal-mean-1",
    "normal-mean-2",
    "normal-mean-3",
    "branching",
    "hmm",
    "marsaglia",
    "logistic-setosa",
    "logistic-versicolor",
    "logistic-virginica",
    "nn-setosa",
    "nn-versicolor",
    "nn-virginica",
];

/// Look a model up by catalogue name. `iris_path` overrides the bundled
/// dataset for the classifier models.
pub fn by_name(name: &str, iris_path: Option<&Path>) -> Result<BenchmarkModel, ModelError> {
    let iris = |path: Option<&Path>| -> Result<Arc<IrisDataset>, ModelError> {
        Ok(Arc::new(load_iris(path)?))
    };
    Ok(match name {
        "gauss-mean-easy" => gauss_mean_easy(),
        "gauss-mean-hard" => gauss_mean_hard(),
        "normal-mean-1" => normal_mean_1(),
        "normal-mean-2" => normal_mean_2(),
        "normal-mean-3" => normal_mean_3(),
        "branching" => branching(),
        "hmm" => hmm(),
        "marsaglia" => marsaglia(),
        "logistic-setosa" => logistic_regression(IrisClass::Setosa, iris(iris_path)?),
        "logistic-versicolor" => logistic_regression(IrisClass::Versicolor, iris(iris_path)?),
        "logistic-virginica" => logistic_regression(IrisClass::Virginica, iris(iris_path)?),
        "nn-setosa" => bayes_nn(IrisClass::Setosa, iris(iris_path)?),
        "nn-versicolor" => bayes_nn(IrisClass::Versicolor, iris(iris_path)?),
        "nn-virginica" => bayes_nn(IrisClass::Virginica, iris(iris_path)?),
        other => return Err(ModelError::UnknownModel(other.to_string())),
    })
}
