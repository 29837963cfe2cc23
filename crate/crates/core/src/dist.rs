//! Stochastic primitives with exact log-densities, sampling, CDFs and quantiles.
//!
//! The set is deliberately small: it is exactly what the bundled benchmark
//! models need. Special functions (regularized incomplete gamma, erf) come
//! from `statrs`; sampling of the discrete variants is done by inversion so
//! that draws, `cdf` and `quantile` agree by construction.

use rand::Rng;
use rand_distr::Distribution as _;
use statrs::function::{erf, gamma};
use thiserror::Error;

pub const LN_2PI: f64 = 1.837_877_066_409_345_3;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum DistError {
    #[error("invalid {dist} parameter: {reason}")]
    InvalidParameter { dist: &'static str, reason: String },
    #[error("quantile argument {0} outside [0, 1]")]
    QuantileRange(f64),
}

fn bad(dist: &'static str, reason: impl Into<String>) -> DistError {
    DistError::InvalidParameter {
        dist,
        reason: reason.into(),
    }
}

/// A value produced by a stochastic choice or stored by `predict`.
///
/// Continuous draws are `Real`, counts and category indices are `Int`,
/// and `List` holds composite predictions (e.g. a per-datapoint probability
/// vector) intact.
#[derive(Debug, Clone, PartialEq)]
pub enum Value {
    Real(f64),
    Int(i64),
    List(Vec<Value>),
}

impl Value {
    pub fn as_real(&self) -> Option<f64> {
        match *self {
            Value::Real(x) => Some(x),
            Value::Int(k) => Some(k as f64),
            Value::List(_) => None,
        }
    }

    pub fn as_int(&self) -> Option<i64> {
        match *self {
            Value::Int(k) => Some(k),
            _ => None,
        }
    }

    pub fn expect_real(&self) -> f64 {
        self.as_real().expect("expected a scalar value")
    }

    pub fn expect_int(&self) -> i64 {
        self.as_int().expect("expected an integer value")
    }
}

impl From<f64> for Value {
    fn from(x: f64) -> Self {
        Value::Real(x)
    }
}

impl From<i64> for Value {
    fn from(k: i64) -> Self {
        Value::Int(k)
    }
}

/// Tagged union of the supported stochastic primitives.
///
/// Parameter constraints are enforced at construction; out-of-support
/// arguments to `log_prob`/`cdf` are never an error, they score `-inf`
/// (or 0/1 for the cdf).
#[derive(Debug, Clone, PartialEq)]
pub enum Dist {
    Normal { mean: f64, std: f64 },
    Uniform { lo: f64, hi: f64 },
    Poisson { rate: f64 },
    InverseGamma { shape: f64, scale: f64 },
    Bernoulli { p: f64 },
    Categorical { probs: Vec<f64> },
}

impl Dist {
    pub fn normal(mean: f64, std: f64) -> Result<Self, DistError> {
        if !mean.is_finite() {
            return Err(bad("Normal", format!("mean must be finite, got {mean}")));
        }
        if !(std > 0.0) || !std.is_finite() {
            return Err(bad("Normal", format!("std must be positive, got {std}")));
        }
        Ok(Dist::Normal { mean, std })
    }

    pub fn uniform(lo: f64, hi: f64) -> Result<Self, DistError> {
        if !lo.is_finite() || !hi.is_finite() || !(hi > lo) {
            return Err(bad("Uniform", format!("need finite lo < hi, got [{lo}, {hi}]")));
        }
        Ok(Dist::Uniform { lo, hi })
    }

    pub fn poisson(rate: f64) -> Result<Self, DistError> {
        if !(rate > 0.0) || !rate.is_finite() {
            return Err(bad("Poisson", format!("rate must be positive, got {rate}")));
        }
        Ok(Dist::Poisson { rate })
    }

    pub fn inverse_gamma(shape: f64, scale: f64) -> Result<Self, DistError> {
        if !(shape > 0.0) || !shape.is_finite() || !(scale > 0.0) || !scale.is_finite() {
            return Err(bad(
                "InverseGamma",
                format!("shape and scale must be positive, got ({shape}, {scale})"),
            ));
        }
        Ok(Dist::InverseGamma { shape, scale })
    }

    pub fn bernoulli(p: f64) -> Result<Self, DistError> {
        if !(0.0..=1.0).contains(&p) {
            return Err(bad("Bernoulli", format!("p must be in [0,1], got {p}")));
        }
        Ok(Dist::Bernoulli { p })
    }

    pub fn categorical(probs: Vec<f64>) -> Result<Self, DistError> {
        if probs.is_empty() {
            return Err(bad("Categorical", "probability vector is empty"));
        }
        if probs.iter().any(|&p| !(0.0..=1.0).contains(&p)) {
            return Err(bad("Categorical", "probabilities must be in [0,1]"));
        }
        let sum: f64 = probs.iter().sum();
        if (sum - 1.0).abs() > 1e-9 {
            return Err(bad("Categorical", format!("probabilities sum to {sum}, not 1")));
        }
        Ok(Dist::Categorical { probs })
    }

    pub fn name(&self) -> &'static str {
        match self {
            Dist::Normal { .. } => "Normal",
            Dist::Uniform { .. } => "Uniform",
            Dist::Poisson { .. } => "Poisson",
            Dist::InverseGamma { .. } => "InverseGamma",
            Dist::Bernoulli { .. } => "Bernoulli",
            Dist::Categorical { .. } => "Categorical",
        }
    }

    pub fn is_discrete(&self) -> bool {
        matches!(
            self,
            Dist::Poisson { .. } | Dist::Bernoulli { .. } | Dist::Categorical { .. }
        )
    }

    /// Whether two distributions are the same variant, ignoring parameters.
    /// A reused trace entry is replayed when the variant matches; parameter
    /// changes only rescore the stored value.
    pub fn same_variant(&self, other: &Dist) -> bool {
        std::mem::discriminant(self) == std::mem::discriminant(other)
    }

    /// Log-density (continuous) or log-mass (discrete) at `x`.
    /// Out-of-support or wrong-kind values score `-inf`, never an error.
    pub fn log_prob(&self, x: &Value) -> f64 {
        match self {
            Dist::Normal { mean, std } => match x.as_real() {
                Some(v) if v.is_finite() => {
                    let z = (v - mean) / std;
                    -0.5 * z * z - std.ln() - 0.5 * LN_2PI
                }
                _ => f64::NEG_INFINITY,
            },
            Dist::Uniform { lo, hi } => match x.as_real() {
                Some(v) if v >= *lo && v <= *hi => -(hi - lo).ln(),
                _ => f64::NEG_INFINITY,
            },
            Dist::Poisson { rate } => match x.as_int() {
                Some(k) if k >= 0 => {
                    let kf = k as f64;
                    kf * rate.ln() - rate - gamma::ln_gamma(kf + 1.0)
                }
                _ => f64::NEG_INFINITY,
            },
            Dist::InverseGamma { shape, scale } => match x.as_real() {
                Some(v) if v > 0.0 && v.is_finite() => {
                    shape * scale.ln() - gamma::ln_gamma(*shape) - (shape + 1.0) * v.ln()
                        - scale / v
                }
                _ => f64::NEG_INFINITY,
            },
            Dist::Bernoulli { p } => match x.as_int() {
                Some(0) => (1.0 - p).ln(),
                Some(1) => p.ln(),
                _ => f64::NEG_INFINITY,
            },
            Dist::Categorical { probs } => match x.as_int() {
                Some(k) if k >= 0 && (k as usize) < probs.len() => probs[k as usize].ln(),
                _ => f64::NEG_INFINITY,
            },
        }
    }

    /// Draw a value. Deterministic given the rng state and call order.
    pub fn draw<R: Rng + ?Sized>(&self, rng: &mut R) -> Value {
        match self {
            Dist::Normal { mean, std } => {
                let z: f64 = rng.sample(rand_distr::StandardNormal);
                Value::Real(mean + std * z)
            }
            Dist::Uniform { lo, hi } => {
                let u: f64 = rng.gen();
                Value::Real(lo + u * (hi - lo))
            }
            // Inversion from the cdf: exact and cheap for the small rates
            // used by the bundled models.
            Dist::Poisson { rate } => {
                let u: f64 = rng.gen();
                let mut p = (-rate).exp();
                let mut cum = p;
                let mut k = 0i64;
                while u >= cum {
                    k += 1;
                    p *= rate / k as f64;
                    let next = cum + p;
                    if next == cum {
                        // the partial sum saturated below u; k already holds
                        // the largest representable quantile
                        break;
                    }
                    cum = next;
                }
                Value::Int(k)
            }
            Dist::InverseGamma { shape, scale } => {
                let g = rand_distr::Gamma::new(*shape, 1.0 / scale)
                    .expect("parameters validated at construction");
                let y: f64 = g.sample(rng);
                Value::Real(1.0 / y.max(f64::MIN_POSITIVE))
            }
            Dist::Bernoulli { p } => {
                let u: f64 = rng.gen();
                Value::Int((u < *p) as i64)
            }
            Dist::Categorical { probs } => {
                let u: f64 = rng.gen();
                let mut cum = 0.0;
                for (i, &p) in probs.iter().enumerate() {
                    cum += p;
                    if u < cum {
                        return Value::Int(i as i64);
                    }
                }
                Value::Int(probs.len() as i64 - 1)
            }
        }
    }

    /// Cumulative distribution function; nondecreasing, in [0, 1].
    pub fn cdf(&self, x: &Value) -> f64 {
        match self {
            Dist::Normal { mean, std } => match x.as_real() {
                Some(v) => 0.5 * erf::erfc(-(v - mean) / (std * std::f64::consts::SQRT_2)),
                None => f64::NAN,
            },
            Dist::Uniform { lo, hi } => match x.as_real() {
                Some(v) => ((v - lo) / (hi - lo)).clamp(0.0, 1.0),
                None => f64::NAN,
            },
            Dist::Poisson { rate } => {
                let k = match x {
                    Value::Int(k) => *k,
                    Value::Real(v) => v.floor() as i64,
                    Value::List(_) => return f64::NAN,
                };
                if k < 0 {
                    return 0.0;
                }
                let mut p = (-rate).exp();
                let mut cum = p;
                for j in 1..=k {
                    p *= rate / j as f64;
                    let next = cum + p;
                    if next == cum || next >= 1.0 {
                        return next.min(1.0);
                    }
                    cum = next;
                }
                cum.min(1.0)
            }
            Dist::InverseGamma { shape, scale } => match x.as_real() {
                Some(v) if v > 0.0 => gamma::gamma_ur(*shape, scale / v),
                Some(_) => 0.0,
                None => f64::NAN,
            },
            Dist::Bernoulli { p } => {
                let k = match x {
                    Value::Int(k) => *k,
                    Value::Real(v) => v.floor() as i64,
                    Value::List(_) => return f64::NAN,
                };
                match k {
                    k if k < 0 => 0.0,
                    0 => 1.0 - p,
                    _ => 1.0,
                }
            }
            Dist::Categorical { probs } => {
                let k = match x {
                    Value::Int(k) => *k,
                    Value::Real(v) => v.floor() as i64,
                    Value::List(_) => return f64::NAN,
                };
                if k < 0 {
                    return 0.0;
                }
                let end = ((k + 1) as usize).min(probs.len());
                probs[..end].iter().sum::<f64>().min(1.0)
            }
        }
    }

    /// Generalized inverse cdf. For discrete variants this is the smallest
    /// support point whose cdf reaches `p`.
    pub fn quantile(&self, p: f64) -> Result<Value, DistError> {
        if !(0.0..=1.0).contains(&p) {
            return Err(DistError::QuantileRange(p));
        }
        Ok(match self {
            Dist::Normal { mean, std } => {
                Value::Real(mean + std * std::f64::consts::SQRT_2 * erf::erf_inv(2.0 * p - 1.0))
            }
            Dist::Uniform { lo, hi } => Value::Real(lo + p * (hi - lo)),
            Dist::Poisson { rate } => {
                let mut q = (-rate).exp();
                let mut cum = q;
                let mut k = 0i64;
                while cum < p {
                    k += 1;
                    q *= rate / k as f64;
                    let next = cum + q;
                    if next == cum {
                        // saturated partial sum: k is the last support point
                        // the floating-point cdf can distinguish
                        break;
                    }
                    cum = next;
                }
                Value::Int(k)
            }
            Dist::InverseGamma { .. } => {
                if p == 0.0 {
                    return Ok(Value::Real(0.0));
                }
                if p == 1.0 {
                    return Ok(Value::Real(f64::INFINITY));
                }
                // Bisection on the cdf after bracketing by doubling.
                let mut hi = 1.0f64;
                let mut iters = 0;
                while self.cdf(&Value::Real(hi)) < p && iters < 2000 {
                    hi *= 2.0;
                    iters += 1;
                }
                let mut lo = 0.0f64;
                for _ in 0..200 {
                    let mid = 0.5 * (lo + hi);
                    if self.cdf(&Value::Real(mid)) < p {
                        lo = mid;
                    } else {
                        hi = mid;
                    }
                }
                Value::Real(0.5 * (lo + hi))
            }
            Dist::Bernoulli { p: q } => Value::Int(if p <= 1.0 - q { 0 } else { 1 }),
            Dist::Categorical { probs } => {
                let mut cum = 0.0;
                for (i, &w) in probs.iter().enumerate() {
                    cum += w;
                    if cum >= p {
                        return Ok(Value::Int(i as i64));
                    }
                }
                Value::Int(probs.len() as i64 - 1)
            }
        })
    }

    /// For a discrete distribution, the cdf interval `(cdf(v-1), cdf(v)]`
    /// that the quantile function maps onto the support point `v`.
    pub fn discrete_interval(&self, v: i64) -> (f64, f64) {
        debug_assert!(self.is_discrete());
        let lo = if v == 0 { 0.0 } else { self.cdf(&Value::Int(v - 1)) };
        (lo, self.cdf(&Value::Int(v)))
    }

    /// Map a value onto the support, coercing the kind if needed. The result
    /// is only used as the return value handed back to model code when the
    /// recorded value itself is out of support (such traces score `-inf` and
    /// are never accepted); it keeps downstream model arithmetic total.
    pub fn clamp_to_support(&self, x: &Value) -> Value {
        match self {
            Dist::Normal { mean, .. } => Value::Real(x.as_real().unwrap_or(*mean)),
            Dist::Uniform { lo, hi } => Value::Real(x.as_real().unwrap_or(*lo).clamp(*lo, *hi)),
            Dist::Poisson { .. } => {
                let k = x.as_int().unwrap_or_else(|| x.as_real().map_or(0, |v| v.floor() as i64));
                Value::Int(k.max(0))
            }
            Dist::InverseGamma { .. } => {
                let v = x.as_real().unwrap_or(f64::MIN_POSITIVE);
                Value::Real(if v > 0.0 { v } else { f64::MIN_POSITIVE })
            }
            Dist::Bernoulli { .. } => {
                let k = x.as_int().unwrap_or_else(|| x.as_real().map_or(0, |v| v.floor() as i64));
                Value::Int(k.clamp(0, 1))
            }
            Dist::Categorical { probs } => {
                let k = x.as_int().unwrap_or_else(|| x.as_real().map_or(0, |v| v.floor() as i64));
                Value::Int(k.clamp(0, probs.len() as i64 - 1))
            }
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_relative_eq;
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    fn rng(seed: u64) -> ChaCha8Rng {
        ChaCha8Rng::seed_from_u64(seed)
    }

    #[test]
    fn construction_rejects_bad_parameters() {
        assert!(Dist::normal(0.0, 0.0).is_err());
        assert!(Dist::normal(f64::NAN, 1.0).is_err());
        assert!(Dist::uniform(2.0, 2.0).is_err());
        assert!(Dist::poisson(0.0).is_err());
        assert!(Dist::inverse_gamma(-1.0, 1.0).is_err());
        assert!(Dist::bernoulli(1.5).is_err());
        assert!(Dist::categorical(vec![0.5, 0.4]).is_err());
        assert!(Dist::categorical(vec![]).is_err());
    }

    #[test]
    fn log_prob_matches_direct_formulas() {
        // standard normal at 0: -ln(2*pi)/2
        let n = Dist::normal(0.0, 1.0).unwrap();
        assert_relative_eq!(n.log_prob(&Value::Real(0.0)), -0.918_938_533_204_672_7, epsilon = 1e-12);

        // flat density on [0, 10000]
        let u = Dist::uniform(0.0, 10_000.0).unwrap();
        assert_relative_eq!(u.log_prob(&Value::Real(5.0)), -(10_000f64).ln(), epsilon = 1e-12);

        // Poisson(4) at 4, evaluated independently as ln(4^4 e^-4 / 4!)
        let pois = Dist::poisson(4.0).unwrap();
        let direct = (4f64.powi(4) * (-4f64).exp() / 24.0).ln();
        assert_relative_eq!(pois.log_prob(&Value::Int(4)), direct, epsilon = 1e-12);
        assert_relative_eq!(direct, -1.632_876, epsilon = 1e-6);

        // inverse gamma at 0.4, evaluated independently from its pdf formula
        let ig = Dist::inverse_gamma(3.0, 1.0).unwrap();
        let x: f64 = 0.4;
        let direct = (1f64.powi(3) / 2.0 * x.powf(-4.0) * (-1.0 / x).exp()).ln();
        assert_relative_eq!(ig.log_prob(&Value::Real(x)), direct, epsilon = 1e-12);
    }

    #[test]
    fn log_prob_out_of_support_is_neg_infinity() {
        assert_eq!(
            Dist::uniform(0.0, 1.0).unwrap().log_prob(&Value::Real(2.0)),
            f64::NEG_INFINITY
        );
        assert_eq!(
            Dist::poisson(4.0).unwrap().log_prob(&Value::Int(-1)),
            f64::NEG_INFINITY
        );
        assert_eq!(
            Dist::poisson(4.0).unwrap().log_prob(&Value::Real(4.0)),
            f64::NEG_INFINITY
        );
        assert_eq!(
            Dist::inverse_gamma(3.0, 1.0).unwrap().log_prob(&Value::Real(-0.5)),
            f64::NEG_INFINITY
        );
        assert_eq!(
            Dist::bernoulli(0.5).unwrap().log_prob(&Value::Int(2)),
            f64::NEG_INFINITY
        );
        assert_eq!(
            Dist::categorical(vec![1.0]).unwrap().log_prob(&Value::Int(1)),
            f64::NEG_INFINITY
        );
    }

    #[test]
    fn degenerate_draws_are_deterministic() {
        let mut r = rng(1);
        let b = Dist::bernoulli(1.0).unwrap();
        let c = Dist::categorical(vec![0.0, 1.0, 0.0]).unwrap();
        for _ in 0..100 {
            assert_eq!(b.draw(&mut r), Value::Int(1));
            assert_eq!(c.draw(&mut r), Value::Int(1));
        }
    }

    #[test]
    fn normal_draw_moments() {
        let n = Dist::normal(0.0, 1.0).unwrap();
        let mut r = rng(7);
        let xs: Vec<f64> = (0..100_000).map(|_| n.draw(&mut r).expect_real()).collect();
        let mean = xs.iter().sum::<f64>() / xs.len() as f64;
        let var = xs.iter().map(|x| (x - mean) * (x - mean)).sum::<f64>() / xs.len() as f64;
        assert!(mean.abs() < 0.02, "sample mean {mean}");
        assert!((var - 1.0).abs() < 0.05, "sample variance {var}");
    }

    #[test]
    fn cdf_quantile_examples() {
        let n = Dist::normal(0.0, 1.0).unwrap();
        assert_relative_eq!(n.cdf(&Value::Real(0.0)), 0.5, epsilon = 1e-12);

        let u = Dist::uniform(2.0, 4.0).unwrap();
        assert_eq!(u.quantile(0.25).unwrap(), Value::Real(2.5));

        // cdf of Poisson(4) through k=4 is about 0.6288; the quantile of that
        // probability must land back on 4
        let pois = Dist::poisson(4.0).unwrap();
        let c4 = pois.cdf(&Value::Int(4));
        assert_relative_eq!(c4, 0.628_837, epsilon = 1e-6);
        assert_eq!(pois.quantile(0.6288).unwrap(), Value::Int(4));
        assert_eq!(pois.quantile(c4 + 1e-9).unwrap(), Value::Int(5));

        assert!(pois.quantile(-0.1).is_err());
        assert!(pois.quantile(1.1).is_err());
    }

    /// Trapezoid integral of exp(log_prob) over [lo, hi].
    fn integrate_density(d: &Dist, lo: f64, hi: f64, n: usize) -> f64 {
        let h = (hi - lo) / n as f64;
        let f = |x: f64| d.log_prob(&Value::Real(x)).exp();
        let mut acc = 0.5 * (f(lo) + f(hi));
        for i in 1..n {
            acc += f(lo + i as f64 * h);
        }
        acc * h
    }

    #[test]
    fn continuous_densities_normalize() {
        // ranges chosen to cover at least 1 - 1e-6 of each distribution's mass
        let cases = vec![
            (Dist::normal(1.0, 2.0).unwrap(), 1.0 - 12.0, 1.0 + 12.0),
            (Dist::uniform(-3.0, 7.0).unwrap(), -3.0, 7.0),
            (Dist::inverse_gamma(3.0, 1.0).unwrap(), 1e-6, 2000.0),
        ];
        for (d, lo, hi) in cases {
            let mass = integrate_density(&d, lo, hi, 400_000);
            assert!(
                (mass - 1.0).abs() < 1e-4,
                "{} integrates to {mass}",
                d.name()
            );
        }
    }

    #[test]
    fn discrete_masses_normalize() {
        let pois = Dist::poisson(4.0).unwrap();
        // truncation point covering mass 1 - 1e-12
        let kmax = pois.quantile(1.0 - 1e-12).unwrap().expect_int();
        let total: f64 = (0..=kmax + 40)
            .map(|k| pois.log_prob(&Value::Int(k)).exp())
            .sum();
        assert!((total - 1.0).abs() < 1e-10, "poisson mass {total}");

        let cat = Dist::categorical(vec![0.2, 0.3, 0.5]).unwrap();
        let total: f64 = (0..3).map(|k| cat.log_prob(&Value::Int(k)).exp()).sum();
        assert!((total - 1.0).abs() < 1e-10);

        let b = Dist::bernoulli(0.37).unwrap();
        let total: f64 = (0..2).map(|k| b.log_prob(&Value::Int(k)).exp()).sum();
        assert!((total - 1.0).abs() < 1e-10);
    }

    #[test]
    fn cdf_quantile_round_trip_continuous() {
        let dists = vec![
            Dist::normal(-1.5, 2.5).unwrap(),
            Dist::uniform(2.0, 9.0).unwrap(),
            Dist::inverse_gamma(3.0, 1.0).unwrap(),
        ];
        let mut r = rng(42);
        for d in dists {
            for _ in 0..100 {
                let x = d.draw(&mut r).expect_real();
                let p = d.cdf(&Value::Real(x));
                let back = d.quantile(p).unwrap().expect_real();
                let tol = 1e-9 * x.abs().max(1.0);
                assert!(
                    (back - x).abs() <= tol,
                    "{}: {x} -> {p} -> {back}",
                    d.name()
                );
            }
        }
    }

    #[test]
    fn cdf_is_nondecreasing() {
        let d = Dist::inverse_gamma(3.0, 1.0).unwrap();
        let mut prev = 0.0;
        for i in 0..1000 {
            let x = 0.01 + i as f64 * 0.05;
            let c = d.cdf(&Value::Real(x));
            assert!(c >= prev && (0.0..=1.0).contains(&c));
            prev = c;
        }
    }

    /// One-sample KS check of draws against the cdf. For the discrete
    /// variants the sup is taken over support atoms, which keeps the
    /// continuous critical value conservative.
    fn draw_cdf_ks(d: &Dist, seed: u64, n: usize) -> f64 {
        let mut r = rng(seed);
        if d.is_discrete() {
            let mut counts = std::collections::BTreeMap::new();
            for _ in 0..n {
                *counts.entry(d.draw(&mut r).expect_int()).or_insert(0u64) += 1;
            }
            let mut cum = 0u64;
            let mut sup: f64 = 0.0;
            for (k, c) in counts {
                cum += c;
                let emp = cum as f64 / n as f64;
                sup = sup.max((emp - d.cdf(&Value::Int(k))).abs());
            }
            sup
        } else {
            let mut xs: Vec<f64> = (0..n).map(|_| d.draw(&mut r).expect_real()).collect();
            xs.sort_by(|a, b| a.partial_cmp(b).unwrap());
            let nf = n as f64;
            let mut sup: f64 = 0.0;
            for (i, x) in xs.iter().enumerate() {
                let f = d.cdf(&Value::Real(*x));
                sup = sup.max((f - i as f64 / nf).abs().max((f - (i + 1) as f64 / nf).abs()));
            }
            sup
        }
    }

    #[test]
    fn draws_match_cdf() {
        // critical value for alpha = 0.001 at n = 10^4
        let crit = (-(0.0005f64).ln() / 2.0).sqrt() / (10_000f64).sqrt();
        let dists = vec![
            Dist::normal(0.0, 1.0).unwrap(),
            Dist::uniform(-2.0, 3.0).unwrap(),
            Dist::inverse_gamma(3.0, 1.0).unwrap(),
            Dist::poisson(4.0).unwrap(),
            Dist::bernoulli(0.3).unwrap(),
            Dist::categorical(vec![0.1, 0.2, 0.3, 0.4]).unwrap(),
        ];
        for (i, d) in dists.iter().enumerate() {
            let ks = draw_cdf_ks(d, 100 + i as u64, 10_000);
            assert!(ks < crit, "{}: ks {ks} >= {crit}", d.name());
        }
    }

    #[test]
    fn discrete_interval_partitions_unit_segment() {
        let pois = Dist::poisson(4.0).unwrap();
        let (lo0, hi0) = pois.discrete_interval(0);
        assert_eq!(lo0, 0.0);
        assert_relative_eq!(hi0, (-4f64).exp(), epsilon = 1e-12);
        let (lo5, hi5) = pois.discrete_interval(5);
        assert_relative_eq!(hi5 - lo5, pois.log_prob(&Value::Int(5)).exp(), epsilon = 1e-12);
        assert_eq!(pois.quantile(0.5 * (lo5 + hi5)).unwrap(), Value::Int(5));
    }

    #[test]
    fn clamp_to_support_coerces() {
        let pois = Dist::poisson(4.0).unwrap();
        assert_eq!(pois.clamp_to_support(&Value::Int(-3)), Value::Int(0));
        let cat = Dist::categorical(vec![0.5, 0.5]).unwrap();
        assert_eq!(cat.clamp_to_support(&Value::Int(7)), Value::Int(1));
        let u = Dist::uniform(0.0, 1.0).unwrap();
        assert_eq!(u.clamp_to_support(&Value::Real(4.0)), Value::Real(1.0));
        let ig = Dist::inverse_gamma(3.0, 1.0).unwrap();
        assert!(ig.clamp_to_support(&Value::Real(-2.0)).expect_real() > 0.0);
    }
}
