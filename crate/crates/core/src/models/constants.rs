//! Pinned constants for the benchmark models. Everything the models and
//! their oracles share lives here so the two can never drift apart.

/// Hard-prior mean inference: prior bounds, observation noise, and the fixed
/// synthetic dataset (31 draws around 2, recentered to sample mean 2).
pub const HARD_PRIOR_LO: f64 = 0.0;
pub const HARD_PRIOR_HI: f64 = 10_000.0;
pub const HARD_OBS_STD: f64 = 1.0;
pub const HARD_OBSERVATIONS: [f64; 31] = [
    -0.352981, 0.637594, 1.453798, 0.639994,
    1.860365, 1.598982, 2.141457, 0.951959,
    3.146366, 0.511189, 2.056685, 2.14078,
    3.720924, 2.699847, 0.991516, 1.764326,
    4.682278, 2.477589, 4.08567, 2.701014,
    3.273443, 1.227403, 2.682062, 1.683714,
    2.276796, 1.474103, -0.044305, 1.102949,
    3.20723, 4.273859, 0.933398,
];

/// Gaussian-mean family: one observation at 5, unit-variance prior on the
/// mean. The two-variable variants put an InverseGamma(3, 1) prior on the
/// observation variance; the branching variant pins variance 1/3 when the
/// mean is nonnegative.
pub const GAUSS_OBSERVATION: f64 = 5.0;
pub const INV_GAMMA_SHAPE: f64 = 3.0;
pub const INV_GAMMA_SCALE: f64 = 1.0;
pub const NM3_FIXED_VARIANCE: f64 = 1.0 / 3.0;

/// Branching: two Poisson(4) counts where the second is sampled only when
/// the first is small; the observed count is 6.
pub const BRANCHING_RATE: f64 = 4.0;
pub const BRANCHING_OBSERVED: i64 = 6;

/// Fibonacci sequence starting 1, 1, 2, 3, 5, ... — the indexing keeps the
/// derived observation rate strictly positive on every trace.
pub fn fib(n: i64) -> i64 {
    let (mut a, mut b) = (1i64, 1i64);
    for _ in 0..n {
        let next = a + b;
        a = b;
        b = next;
    }
    a
}

/// Hidden Markov model: 3 states, known transition matrix, unit-variance
/// Normal emissions, and a fixed observation list short enough for exact
/// path enumeration.
pub const HMM_INIT: [f64; 3] = [1.0 / 3.0, 1.0 / 3.0, 1.0 / 3.0];
pub const HMM_TRANS: [[f64; 3]; 3] = [
    [0.10, 0.50, 0.40],
    [0.20, 0.20, 0.60],
    [0.15, 0.15, 0.70],
];
pub const HMM_EMIT_MEAN: [f64; 3] = [-1.0, 1.0, 0.0];
pub const HMM_EMIT_STD: f64 = 1.0;
pub const HMM_OBSERVATIONS: [f64; 8] = [0.9, 0.8, 0.7, 0.0, -0.025, -5.0, -2.0, -0.1];

/// Marsaglia polar normal generator used as the prior over a mean: prior
/// N(1, variance 5), two observations {9, 8} with likelihood variance 2.
/// Conjugate posterior: N(7.25, variance 5/6).
pub const MARSAGLIA_PRIOR_MEAN: f64 = 1.0;
pub const MARSAGLIA_PRIOR_VAR: f64 = 5.0;
pub const MARSAGLIA_OBS: [f64; 2] = [9.0, 8.0];
pub const MARSAGLIA_OBS_VAR: f64 = 2.0;

pub fn marsaglia_posterior() -> (f64, f64) {
    let prec = 1.0 / MARSAGLIA_PRIOR_VAR + MARSAGLIA_OBS.len() as f64 / MARSAGLIA_OBS_VAR;
    let mean = (MARSAGLIA_PRIOR_MEAN / MARSAGLIA_PRIOR_VAR
        + MARSAGLIA_OBS.iter().sum::<f64>() / MARSAGLIA_OBS_VAR)
        / prec;
    (mean, 1.0 / prec)
}
