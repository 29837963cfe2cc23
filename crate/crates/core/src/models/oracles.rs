//! Oracle posteriors: closed forms, grid integration for the gaussian-mean
//! family, and exhaustive enumeration for the discrete models.

use std::collections::BTreeMap;

use thiserror::Error;

use crate::dist::{Dist, Value};
use crate::models::constants::*;

pub type Pmf = BTreeMap<i64, f64>;

#[derive(Debug, Error)]
pub enum OracleError {
    #[error("grid [{lo}, {hi}] covers only {coverage:.6} of the reference mass")]
    Coverage { lo: f64, hi: f64, coverage: f64 },
}

/// Oracle cdf: either a closed-form distribution or an interpolated grid.
#[derive(Debug, Clone)]
pub enum CdfOracle {
    Closed(Dist),
    Grid(GridCdf),
}

impl CdfOracle {
    pub fn eval(&self, x: f64) -> f64 {
        match self {
            CdfOracle::Closed(d) => d.cdf(&Value::Real(x)),
            CdfOracle::Grid(g) => g.eval(x),
        }
    }
}

/// Normalized cdf tabulated on a uniform grid, linearly interpolated.
#[derive(Debug, Clone)]
pub struct GridCdf {
    lo: f64,
    step: f64,
    cdf: Vec<f64>,
}

impl GridCdf {
    pub fn eval(&self, x: f64) -> f64 {
        let t = (x - self.lo) / self.step;
        if t <= 0.0 {
            return 0.0;
        }
        let n = self.cdf.len() - 1;
        if t >= n as f64 {
            return 1.0;
        }
        let i = t.floor() as usize;
        let frac = t - i as f64;
        self.cdf[i] + frac * (self.cdf[i + 1] - self.cdf[i])
    }
}

#[derive(Debug, Clone, Copy)]
pub struct GridSpec {
    pub lo: f64,
    pub hi: f64,
    pub points: usize,
}

/// Normalize an unnormalized log-density on a uniform grid by trapezoidal
/// integration and return its cdf. Errors if the grid captures less than
/// 1 - 1e-4 of the mass a 10x wider reference grid sees.
pub fn grid_posterior(
    log_density: impl Fn(f64) -> f64,
    spec: &GridSpec,
) -> Result<GridCdf, OracleError> {
    let mass = |lo: f64, hi: f64, n: usize| -> (f64, Vec<f64>) {
        let step = (hi - lo) / n as f64;
        let logs: Vec<f64> = (0..=n).map(|i| log_density(lo + i as f64 * step)).collect();
        let peak = logs.iter().cloned().fold(f64::NEG_INFINITY, f64::max);
        let dens: Vec<f64> = logs.iter().map(|l| (l - peak).exp()).collect();
        let mut total = 0.0;
        for w in dens.windows(2) {
            total += 0.5 * (w[0] + w[1]) * step;
        }
        (total, dens)
    };

    let (inner_mass, dens) = mass(spec.lo, spec.hi, spec.points);
    let center = 0.5 * (spec.lo + spec.hi);
    let half = 5.0 * (spec.hi - spec.lo);
    let (reference_mass, _) = mass(center - half, center + half, spec.points * 10);
    let coverage = inner_mass / reference_mass;
    if coverage < 1.0 - 1e-4 {
        return Err(OracleError::Coverage {
            lo: spec.lo,
            hi: spec.hi,
            coverage,
        });
    }

    let step = (spec.hi - spec.lo) / spec.points as f64;
    let mut cdf = Vec::with_capacity(dens.len());
    cdf.push(0.0);
    let mut acc = 0.0;
    for w in dens.windows(2) {
        acc += 0.5 * (w[0] + w[1]) * step;
        cdf.push(acc);
    }
    for c in cdf.iter_mut() {
        *c /= acc;
    }
    Ok(GridCdf {
        lo: spec.lo,
        step,
        cdf,
    })
}

/// ln N(obs; m, sqrt(v)).
fn log_normal_pdf(obs: f64, mean: f64, var: f64) -> f64 {
    -0.5 * (obs - mean) * (obs - mean) / var - 0.5 * (2.0 * std::f64::consts::PI * var).ln()
}

/// ln of the InverseGamma(shape, scale) density at v.
fn log_invgamma_pdf(v: f64, shape: f64, scale: f64) -> f64 {
    use statrs::function::gamma::ln_gamma;
    shape * scale.ln() - ln_gamma(shape) - (shape + 1.0) * v.ln() - scale / v
}

/// ln of the observation density marginalized over v ~ InverseGamma:
/// trapezoidal integration on a log-spaced variance grid.
pub fn log_marginal_over_variance(obs: f64, mean: f64) -> f64 {
    const N: usize = 4000;
    let (ln_lo, ln_hi) = ((1e-8f64).ln(), (1e6f64).ln());
    let h = (ln_hi - ln_lo) / N as f64;
    // integrate f(v) dv = f(v) v dln v
    let term = |lnv: f64| -> f64 {
        let v = lnv.exp();
        log_invgamma_pdf(v, INV_GAMMA_SHAPE, INV_GAMMA_SCALE) + log_normal_pdf(obs, mean, v) + lnv
    };
    let logs: Vec<f64> = (0..=N).map(|i| term(ln_lo + i as f64 * h)).collect();
    let peak = logs.iter().cloned().fold(f64::NEG_INFINITY, f64::max);
    if peak == f64::NEG_INFINITY {
        return f64::NEG_INFINITY;
    }
    let mut acc = 0.0;
    for w in logs.windows(2) {
        acc += 0.5 * ((w[0] - peak).exp() + (w[1] - peak).exp()) * h;
    }
    peak + acc.ln()
}

/// Unnormalized log-posterior densities of the predicted mean for the
/// gaussian-mean family.
pub fn log_posterior_normal_mean_1(m: f64) -> f64 {
    log_normal_pdf(m, 0.0, 1.0) + log_normal_pdf(GAUSS_OBSERVATION, m, 1.0)
}

pub fn log_posterior_normal_mean_2(m: f64) -> f64 {
    log_normal_pdf(m, 0.0, 1.0) + log_marginal_over_variance(GAUSS_OBSERVATION, m)
}

pub fn log_posterior_normal_mean_3(m: f64) -> f64 {
    let obs = if m < 0.0 {
        log_marginal_over_variance(GAUSS_OBSERVATION, m)
    } else {
        log_normal_pdf(GAUSS_OBSERVATION, m, NM3_FIXED_VARIANCE)
    };
    log_normal_pdf(m, 0.0, 1.0) + obs
}

pub fn log_posterior_hard(m: f64) -> f64 {
    if !(HARD_PRIOR_LO..=HARD_PRIOR_HI).contains(&m) {
        return f64::NEG_INFINITY;
    }
    HARD_OBSERVATIONS
        .iter()
        .map(|&x| log_normal_pdf(x, m, HARD_OBS_STD * HARD_OBS_STD))
        .sum()
}

/// Exact posterior over the first Poisson of the branching model by
/// exhaustive enumeration over both counts, truncated where the prior cdf
/// reaches 1 - 1e-12 (beyond the required 1 - 1e-10 coverage).
pub fn branching_pmf() -> Pmf {
    let prior = Dist::poisson(BRANCHING_RATE).unwrap();
    let kmax = prior.quantile(1.0 - 1e-12).unwrap().expect_int();
    let prior_ln: Vec<f64> = (0..=kmax).map(|k| prior.log_prob(&Value::Int(k))).collect();

    let mut weights: BTreeMap<i64, f64> = BTreeMap::new();
    for r in 0..=kmax {
        let w = if r > 4 {
            let obs = Dist::poisson(6.0).unwrap();
            (prior_ln[r as usize] + obs.log_prob(&Value::Int(BRANCHING_OBSERVED))).exp()
        } else {
            let mut acc = 0.0;
            for s in 0..=kmax {
                let rate = (fib(3 * r) + s) as f64;
                let obs = Dist::poisson(rate).unwrap();
                acc += (prior_ln[r as usize]
                    + prior_ln[s as usize]
                    + obs.log_prob(&Value::Int(BRANCHING_OBSERVED)))
                .exp();
            }
            acc
        };
        weights.insert(r, w);
    }
    let z: f64 = weights.values().sum();
    weights.iter().map(|(&k, &w)| (k, w / z)).collect()
}

/// Exact per-position state marginals of the HMM by enumeration over all
/// 3^(T+1) hidden paths.
pub fn hmm_state_marginals() -> BTreeMap<String, Pmf> {
    let t_len = HMM_OBSERVATIONS.len();
    let n_states = HMM_INIT.len();
    let mut marginals = vec![vec![0.0f64; n_states]; t_len + 1];
    let mut total = 0.0;

    let n_paths = n_states.pow((t_len + 1) as u32);
    for idx in 0..n_paths {
        let mut states = Vec::with_capacity(t_len + 1);
        let mut rest = idx;
        for _ in 0..=t_len {
            states.push(rest % n_states);
            rest /= n_states;
        }
        let mut lw = HMM_INIT[states[0]].ln();
        for t in 1..=t_len {
            lw += HMM_TRANS[states[t - 1]][states[t]].ln();
            let var = HMM_EMIT_STD * HMM_EMIT_STD;
            lw += log_normal_pdf(HMM_OBSERVATIONS[t - 1], HMM_EMIT_MEAN[states[t]], var);
        }
        let w = lw.exp();
        total += w;
        for (t, &s) in states.iter().enumerate() {
            marginals[t][s] += w;
        }
    }

    let mut out = BTreeMap::new();
    for (t, row) in marginals.iter().enumerate() {
        let pmf: Pmf = row
            .iter()
            .enumerate()
            .map(|(s, &w)| (s as i64, w / total))
            .collect();
        out.insert(format!("state_{t}"), pmf);
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;
    use statrs::function::gamma::ln_gamma;

    #[test]
    fn grid_cdf_matches_closed_form_on_conjugate_model() {
        let spec = GridSpec {
            lo: -10.0,
            hi: 10.0,
            points: 20_000,
        };
        let grid = grid_posterior(log_posterior_normal_mean_1, &spec).unwrap();
        let exact = Dist::normal(2.5, 0.5f64.sqrt()).unwrap();
        let mut worst: f64 = 0.0;
        let mut x = -10.0;
        while x <= 10.0 {
            worst = worst.max((grid.eval(x) - exact.cdf(&Value::Real(x))).abs());
            x += 0.001;
        }
        assert!(worst < 1e-4, "max cdf discrepancy {worst}");
    }

    #[test]
    fn grid_posterior_reports_poor_coverage() {
        // a window far narrower than the posterior must error
        let spec = GridSpec {
            lo: 2.4,
            hi: 2.6,
            points: 100,
        };
        match grid_posterior(log_posterior_normal_mean_1, &spec) {
            Err(OracleError::Coverage { .. }) => {}
            other => panic!("expected coverage error, got {other:?}"),
        }
    }

    #[test]
    fn grid_cdf_normalized_and_monotone() {
        let spec = GridSpec {
            lo: -8.0,
            hi: 9.0,
            points: 4000,
        };
        let grid = grid_posterior(log_posterior_normal_mean_3, &spec).unwrap();
        let mut prev = -1.0;
        let mut x = -9.0;
        while x <= 10.0 {
            let c = grid.eval(x);
            assert!((0.0..=1.0).contains(&c) && c >= prev);
            prev = c;
            x += 0.01;
        }
        assert_eq!(grid.eval(-9.0), 0.0);
        assert_eq!(grid.eval(10.0), 1.0);
    }

    #[test]
    fn variance_marginal_matches_closed_form() {
        // independent route: the InverseGamma-Normal integral has the closed
        // form b^a/Gamma(a) * Gamma(a+1/2)/sqrt(2 pi) * (b + d^2/2)^-(a+1/2)
        for m in [-2.0, -0.5, 0.0, 1.5, 4.0] {
            let d2 = (GAUSS_OBSERVATION - m) * (GAUSS_OBSERVATION - m);
            let a = INV_GAMMA_SHAPE;
            let b = INV_GAMMA_SCALE;
            let closed = a * b.ln() - ln_gamma(a) + ln_gamma(a + 0.5)
                - 0.5 * (2.0 * std::f64::consts::PI).ln()
                - (a + 0.5) * (b + 0.5 * d2).ln();
            let numeric = log_marginal_over_variance(GAUSS_OBSERVATION, m);
            assert!(
                (closed - numeric).abs() < 1e-6,
                "m {m}: closed {closed} vs numeric {numeric}"
            );
        }
    }

    #[test]
    fn branching_enumeration_normalizes() {
        let pmf = branching_pmf();
        let total: f64 = pmf.values().sum();
        assert!((total - 1.0).abs() < 1e-9, "sums to {total}");
        // the two likelihood islands: small counts and the flat r > 4 region
        assert!(pmf[&1] > 0.1);
        assert!(pmf[&5] > 0.2);
        assert!(pmf[&3] < 1e-10, "deep valley at r = 3");
    }

    #[test]
    fn hmm_enumeration_normalizes() {
        let marg = hmm_state_marginals();
        assert_eq!(marg.len(), HMM_OBSERVATIONS.len() + 1);
        for (name, pmf) in &marg {
            let total: f64 = pmf.values().sum();
            assert!((total - 1.0).abs() < 1e-9, "{name} sums to {total}");
        }
        // the -5.0 observation at t = 6 pins the mean -1 state
        assert!(marg["state_6"][&0] > 0.9);
    }
}
