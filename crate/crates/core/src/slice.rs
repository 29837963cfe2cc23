//! Trans-dimensional slice sampling: auxiliary-height sampling, exponential
//! step-out, shrinkage, and the dimension-jump correction applied to every
//! candidate evaluation.
//!
//! Continuous choices are sliced on their natural support. Discrete choices
//! are sliced on the unit interval through the prior's quantile function: the
//! current value `v` is represented by a uniform coordinate inside its cdf
//! cell, the interval is the whole segment [0, 1] (both ends are probed once,
//! as the interval-endpoint evaluations), and candidate coordinates map back
//! through the quantile before rescoring. Factoring the selected site's own
//! prior mass out of the score makes the coordinate's stationary law exactly
//! uniform under the prior, so the embedding is marginally exact — and
//! because candidates are drawn from the whole segment, the move crosses
//! likelihood valleys that axis-local stepping cannot.

use rand::Rng;

use crate::dist::{Dist, Value};
use crate::error::InferenceError;
use crate::trace::{run_model, transdim_correction, Address, Chain, ModelProgram, Trace};

/// Tuning knobs for one slice move.
#[derive(Debug, Clone, PartialEq)]
pub struct SliceConfig {
    /// Width of the randomly placed initial window on continuous supports.
    pub initial_width: f64,
    /// Cap on per-side doublings before the target is declared improper.
    pub max_stepout_doublings: u32,
    /// Cap on shrinkage candidates before the slice is declared degenerate.
    pub max_shrink_iters: u32,
    /// Optional width-halving pass over a symmetric window before stepping
    /// out. Off by default: it can spin on narrow two-sided slices, and the
    /// randomly placed window needs no such adjustment.
    pub pre_shrink: bool,
}

impl Default for SliceConfig {
    fn default() -> Self {
        SliceConfig {
            initial_width: 1.0,
            max_stepout_doublings: 60,
            max_shrink_iters: 1000,
            pre_shrink: false,
        }
    }
}

impl SliceConfig {
    pub fn with_width(initial_width: f64) -> Self {
        SliceConfig {
            initial_width,
            ..Default::default()
        }
    }
}

/// Bookkeeping for one kernel transition: which variable the move touched,
/// the probability of selecting it, and the uniform draws the kernel itself
/// consumed (the move's auxiliary randomness; model redraws excluded).
#[derive(Debug, Clone, PartialEq)]
pub struct KernelMove {
    pub selected: Address,
    pub selection_prob: f64,
    pub aux_randoms: Vec<f64>,
}

enum CoordMap {
    /// Identity: the coordinate is the choice's value.
    Real,
    /// The coordinate is a cdf position in [0, 1]; values go through the
    /// selected prior's quantile function.
    Quantile(Dist),
}

/// The one-dimensional function a slice move runs on: candidate coordinate in,
/// (trace, log score) out. Every score costs one trace-likelihood evaluation.
///
/// Fresh draws made while scoring (variables a candidate opens that the old
/// trace never held) are pinned in a move-local cache, so every candidate of
/// one move is scored against the same completion of the trace. Rescoring
/// dimension-crossing candidates with independent redraws per evaluation
/// biases the stationary distribution; pinning them turns each move into an
/// ordinary slice move on a fixed one-dimensional function.
pub struct SliceTarget<'a> {
    old: &'a Trace,
    prog: &'a ModelProgram,
    selected: Address,
    map: CoordMap,
    corrected: bool,
    move_cache: std::cell::RefCell<crate::trace::ChoiceDb>,
}

impl<'a> SliceTarget<'a> {
    pub fn on_support(
        old: &'a Trace,
        prog: &'a ModelProgram,
        selected: Address,
        corrected: bool,
    ) -> Self {
        SliceTarget {
            old,
            prog,
            selected,
            map: CoordMap::Real,
            corrected,
            move_cache: Default::default(),
        }
    }

    pub fn on_quantiles(
        old: &'a Trace,
        prog: &'a ModelProgram,
        selected: Address,
        prior: Dist,
        corrected: bool,
    ) -> Self {
        SliceTarget {
            old,
            prog,
            selected,
            map: CoordMap::Quantile(prior),
            corrected,
            move_cache: Default::default(),
        }
    }

    fn is_bounded(&self) -> bool {
        matches!(self.map, CoordMap::Quantile(_))
    }

    /// Log score of the current point, for the height draw. No evaluation.
    pub fn current_score(&self) -> f64 {
        match self.map {
            CoordMap::Real => self.old.total_ll,
            CoordMap::Quantile(_) => {
                self.old.total_ll - self.old.choices[&self.selected].log_prob
            }
        }
    }

    /// Re-execute the model with the selected site pinned to the coordinate's
    /// value and score the result. NaN scores collapse to `-inf` so a bad
    /// candidate can never be mistaken for one above the height.
    pub fn score(&self, coord: f64, chain: &mut Chain) -> (Trace, f64) {
        let value = match &self.map {
            CoordMap::Real => Value::Real(coord),
            CoordMap::Quantile(d) => d
                .quantile(coord.clamp(0.0, 1.0))
                .expect("clamped coordinate is a valid probability"),
        };
        let mut cache = self.move_cache.borrow_mut();
        let (trace, mut s) = scored_rerun(
            self.old,
            &value,
            &self.selected,
            self.prog,
            chain,
            self.corrected,
            Some(&mut cache),
        );
        if let CoordMap::Quantile(_) = self.map {
            if s > f64::NEG_INFINITY {
                s -= trace.choices[&self.selected].log_prob;
            }
        }
        if s.is_nan() {
            s = f64::NEG_INFINITY;
        }
        (trace, s)
    }
}

fn scored_rerun(
    old: &Trace,
    candidate: &Value,
    selected: &Address,
    prog: &ModelProgram,
    chain: &mut Chain,
    corrected: bool,
    fresh_cache: Option<&mut crate::trace::ChoiceDb>,
) -> (Trace, f64) {
    let new = crate::trace::run_model_cached(prog, &old.choices, Some((selected, candidate)), fresh_cache, chain);
    if !new.choices.contains_key(selected) {
        // the pin was never consumed; treat the candidate as unusable
        return (new, f64::NEG_INFINITY);
    }
    let mut score = new.total_ll;
    if corrected && score > f64::NEG_INFINITY {
        score += transdim_correction(old, &new, Some(selected));
    }
    (new, score)
}

/// Re-execute with `selected` pinned to `candidate` (everything else reused)
/// and return the new trace together with its dimension-corrected log
/// likelihood. Candidates outside the selected prior's support come back as
/// `-inf`, never an error. One LL-evaluation.
pub fn corrected_ll(
    old: &Trace,
    candidate: &Value,
    selected: &Address,
    prog: &ModelProgram,
    chain: &mut Chain,
) -> (Trace, f64) {
    scored_rerun(old, candidate, selected, prog, chain, true, None)
}

/// Log-space auxiliary height: `ll + ln U` with `U` uniform on (0, 1].
pub fn log_height(ll: f64, chain: &mut Chain) -> f64 {
    debug_assert!(ll > f64::NEG_INFINITY);
    ll + chain.unit_pos().ln()
}

/// Find a slice interval around `x0`.
///
/// On an unbounded (continuous) coordinate: a window of `initial_width` is
/// placed uniformly at random around `x0`, then each side's offset doubles
/// until its endpoint scores at or below the height. On the bounded quantile
/// coordinate the interval is the full unit segment; both endpoints are
/// probed once (the interval cannot grow, so their scores are informational,
/// matching the endpoint evaluations of the unbounded case).
pub fn step_out(
    tgt: &SliceTarget,
    x0: f64,
    logu: f64,
    cfg: &SliceConfig,
    chain: &mut Chain,
    mv: &mut KernelMove,
) -> Result<(f64, f64), InferenceError> {
    if tgt.is_bounded() {
        let _ = tgt.score(0.0, chain);
        let _ = tgt.score(1.0, chain);
        return Ok((0.0, 1.0));
    }

    let w = cfg.initial_width;
    let (mut off_l, mut off_r);
    if cfg.pre_shrink {
        // symmetric window, halved until both ends land inside the slice
        let mut wi = w;
        let mut halvings = 0u32;
        loop {
            let (_, sl) = tgt.score(x0 - wi, chain);
            let (_, sr) = tgt.score(x0 + wi, chain);
            if sl >= logu && sr >= logu {
                break;
            }
            halvings += 1;
            if halvings > cfg.max_stepout_doublings {
                break;
            }
            wi *= 0.5;
        }
        off_l = wi;
        off_r = wi;
    } else {
        let u = chain.unit().clamp(1e-12, 1.0 - 1e-12);
        mv.aux_randoms.push(u);
        off_l = u * w;
        off_r = (1.0 - u) * w;
    }

    let widen = |mut off: f64, sign: f64, chain: &mut Chain| -> Result<f64, InferenceError> {
        let mut doublings = 0u32;
        loop {
            let (_, s) = tgt.score(x0 + sign * off, chain);
            if s <= logu {
                return Ok(off);
            }
            doublings += 1;
            if doublings > cfg.max_stepout_doublings {
                return Err(InferenceError::WidthOverflow(cfg.max_stepout_doublings));
            }
            off *= 2.0;
        }
    };
    off_l = widen(off_l, -1.0, chain)?;
    off_r = widen(off_r, 1.0, chain)?;
    Ok((x0 - off_l, x0 + off_r))
}

/// Draw uniform candidates from the interval, shrinking the violated side
/// toward `x0`, until one scores above the height. Returns that candidate's
/// trace and coordinate.
pub fn shrink_sample(
    tgt: &SliceTarget,
    x0: f64,
    logu: f64,
    x_l: f64,
    x_r: f64,
    cfg: &SliceConfig,
    chain: &mut Chain,
    mv: &mut KernelMove,
) -> Result<(Trace, f64), InferenceError> {
    debug_assert!(x_l <= x0 && x0 <= x_r);
    let mut l = x_l;
    let mut r = x_r;
    for _ in 0..cfg.max_shrink_iters {
        let u = chain.unit();
        mv.aux_randoms.push(u);
        let x = l + u * (r - l);
        let (trace, s) = tgt.score(x, chain);
        if s > logu {
            return Ok((trace, x));
        }
        if x > x0 {
            r = x;
        } else {
            l = x;
        }
    }
    Err(InferenceError::DegenerateSlice(cfg.max_shrink_iters))
}

/// One slice transition with the dimension-jump correction.
pub fn slice_step(
    current: Trace,
    prog: &ModelProgram,
    cfg: &SliceConfig,
    chain: &mut Chain,
) -> Result<Trace, InferenceError> {
    slice_move(current, prog, cfg, chain, true).map(|(t, _)| t)
}

/// `slice_step` with the correction forced to zero. Exists to reproduce the
/// wrong posteriors an uncorrected engine infers on dimension-changing
/// models; identical to `slice_step` (same seed, same trajectory) whenever
/// the trace dimension never changes.
pub fn naive_slice_step(
    current: Trace,
    prog: &ModelProgram,
    cfg: &SliceConfig,
    chain: &mut Chain,
) -> Result<Trace, InferenceError> {
    slice_move(current, prog, cfg, chain, false).map(|(t, _)| t)
}

/// Full transition returning the move's bookkeeping alongside the new trace.
pub fn slice_move(
    current: Trace,
    prog: &ModelProgram,
    cfg: &SliceConfig,
    chain: &mut Chain,
    corrected: bool,
) -> Result<(Trace, KernelMove), InferenceError> {
    debug_assert!(current.total_ll > f64::NEG_INFINITY && current.dim() >= 1);
    let dim = current.dim();
    let k = chain.rng_mut().gen_range(0..dim);
    let addr = current.nth_address(k).clone();
    let rec = current.choices[&addr].clone();
    let mut mv = KernelMove {
        selected: addr.clone(),
        selection_prob: 1.0 / dim as f64,
        aux_randoms: Vec::new(),
    };

    if rec.dist.is_discrete() {
        let v0 = rec.value.as_int().expect("discrete record holds an integer");
        let (q_lo, q_hi) = rec.dist.discrete_interval(v0);
        let cell_u = chain.unit();
        mv.aux_randoms.push(cell_u);
        let q0 = q_lo + cell_u * (q_hi - q_lo);

        let tgt = SliceTarget::on_quantiles(&current, prog, addr, rec.dist.clone(), corrected);
        let hu = chain.unit_pos();
        mv.aux_randoms.push(hu);
        let logu = tgt.current_score() + hu.ln();

        let (q_l, q_r) = step_out(&tgt, q0, logu, cfg, chain, &mut mv)?;
        let (trace, _) = shrink_sample(&tgt, q0, logu, q_l, q_r, cfg, chain, &mut mv)?;
        Ok((trace, mv))
    } else {
        let x0 = rec.value.as_real().expect("continuous record holds a real");
        let tgt = SliceTarget::on_support(&current, prog, addr, corrected);
        let hu = chain.unit_pos();
        mv.aux_randoms.push(hu);
        let logu = tgt.current_score() + hu.ln();

        let (x_l, x_r) = step_out(&tgt, x0, logu, cfg, chain, &mut mv)?;
        let (trace, _) = shrink_sample(&tgt, x0, logu, x_l, x_r, cfg, chain, &mut mv)?;
        Ok((trace, mv))
    }
}
