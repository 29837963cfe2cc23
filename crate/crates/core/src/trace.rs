//! Execution-trace machinery: addressed choice records, model re-execution
//! with selective reuse, and the dimension-jump likelihood correction shared
//! by the kernels.

use std::collections::{BTreeMap, HashMap};
use std::fmt;
use std::sync::Arc;

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use crate::dist::{Dist, Value};
use crate::error::InferenceError;

/// Stable identity of a random choice: a model-supplied base name plus an
/// occurrence counter that resets at the start of every execution and
/// increments per repeated visit of the same base.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct Address {
    pub base: String,
    pub occurrence: u32,
}

impl Address {
    pub fn new(base: impl Into<String>, occurrence: u32) -> Self {
        Address {
            base: base.into(),
            occurrence,
        }
    }
}

impl fmt::Display for Address {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}#{}", self.base, self.occurrence)
    }
}

/// One recorded random choice: the distribution in force at this execution,
/// the value, and its log-probability under that distribution.
#[derive(Debug, Clone, PartialEq)]
pub struct ChoiceRecord {
    pub addr: Address,
    pub dist: Dist,
    pub value: Value,
    pub log_prob: f64,
}

pub type ChoiceDb = BTreeMap<Address, ChoiceRecord>;

/// One program execution: the choices the control flow touched, the summed
/// log-likelihood of conditioning statements, and the predicted values.
#[derive(Debug, Clone, PartialEq)]
pub struct Trace {
    pub choices: ChoiceDb,
    pub observes_ll: f64,
    pub predicts: BTreeMap<String, Value>,
    pub total_ll: f64,
}

impl Trace {
    /// Number of random variables in the trace (|D|).
    pub fn dim(&self) -> usize {
        self.choices.len()
    }

    pub fn nth_address(&self, k: usize) -> &Address {
        self.choices.keys().nth(k).expect("choice index in range")
    }
}

/// A sample emitted by an inference run: the cumulative LL-evaluation count
/// at the moment it was recorded, plus the trace's predicted values.
#[derive(Debug, Clone, PartialEq)]
pub struct SampleRecord {
    pub ll_count: u64,
    pub predicts: BTreeMap<String, Value>,
}

/// Per-chain execution state: one seeded rng shared by the kernels and the
/// model's fresh redraws, plus the trace-likelihood evaluation counter that
/// serves as the budget axis.
#[derive(Debug, Clone)]
pub struct Chain {
    rng: ChaCha8Rng,
    ll_evals: u64,
}

impl Chain {
    pub fn new(seed: u64) -> Self {
        Chain {
            rng: ChaCha8Rng::seed_from_u64(seed),
            ll_evals: 0,
        }
    }

    /// Monotone count of `run_model` calls on this chain.
    pub fn ll_evals(&self) -> u64 {
        self.ll_evals
    }

    pub fn rng_mut(&mut self) -> &mut ChaCha8Rng {
        &mut self.rng
    }

    /// Uniform draw on [0, 1).
    pub fn unit(&mut self) -> f64 {
        rand::Rng::gen(&mut self.rng)
    }

    /// Uniform draw on (0, 1]; safe to take the log of.
    pub fn unit_pos(&mut self) -> f64 {
        1.0 - self.unit()
    }
}

/// A model as a host function over the model-context handle. The function
/// must be deterministic given the values returned by `sample_at`.
#[derive(Clone)]
pub struct ModelProgram {
    f: Arc<dyn Fn(&mut ModelCtx) + Send + Sync>,
}

impl ModelProgram {
    pub fn new(f: impl Fn(&mut ModelCtx) + Send + Sync + 'static) -> Self {
        ModelProgram { f: Arc::new(f) }
    }
}

impl fmt::Debug for ModelProgram {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str("ModelProgram")
    }
}

/// Handle passed to model code during one execution.
pub struct ModelCtx<'a> {
    reuse: &'a ChoiceDb,
    forced: Option<(&'a Address, &'a Value)>,
    fresh_cache: Option<&'a mut ChoiceDb>,
    chain: &'a mut Chain,
    counters: HashMap<String, u32>,
    choices: ChoiceDb,
    observes_ll: f64,
    predicts: BTreeMap<String, Value>,
}

impl ModelCtx<'_> {
    /// Draw (or replay) the latent variable at `base`.
    ///
    /// Replay rules: a pinned value at this address wins; otherwise a reuse
    /// entry whose distribution variant matches is rescored under the current
    /// parameters; otherwise the value is drawn fresh from `dist`. The value
    /// handed back to the model is clamped onto the support so that model
    /// arithmetic stays total even when a pinned value scores `-inf`.
    pub fn sample_at(&mut self, base: &str, dist: Dist) -> Value {
        let occurrence = {
            let c = self.counters.entry(base.to_string()).or_insert(0);
            let occ = *c;
            *c += 1;
            occ
        };
        let addr = Address::new(base, occurrence);

        let value = if let Some((faddr, fval)) = self.forced {
            if *faddr == addr {
                (*fval).clone()
            } else {
                self.replay_or_draw(&addr, &dist)
            }
        } else {
            self.replay_or_draw(&addr, &dist)
        };

        let log_prob = dist.log_prob(&value);
        let ret = dist.clamp_to_support(&value);
        self.choices.insert(
            addr.clone(),
            ChoiceRecord {
                addr,
                dist,
                value,
                log_prob,
            },
        );
        ret
    }

    fn replay_or_draw(&mut self, addr: &Address, dist: &Dist) -> Value {
        if let Some(rec) = self.reuse.get(addr) {
            if rec.dist.same_variant(dist) {
                return rec.value.clone();
            }
        }
        // Fresh territory. A kernel move may pin its fresh draws so that
        // every candidate it scores sees the same completion of the trace.
        if let Some(cache) = self.fresh_cache.as_mut() {
            if let Some(rec) = cache.get(addr) {
                if rec.dist.same_variant(dist) {
                    return rec.value.clone();
                }
            }
            let value = dist.draw(self.chain.rng_mut());
            cache.insert(
                addr.clone(),
                ChoiceRecord {
                    addr: addr.clone(),
                    dist: dist.clone(),
                    value: value.clone(),
                    log_prob: f64::NAN, // rescored at every use
                },
            );
            value
        } else {
            dist.draw(self.chain.rng_mut())
        }
    }

    /// Condition on `observed` under `dist`. Contributes to the trace
    /// likelihood only; nothing is recorded in the choice database.
    pub fn observe_at(&mut self, dist: Dist, observed: Value) {
        self.observes_ll += dist.log_prob(&observed);
    }

    /// Record a named value on the trace; later calls with the same name in
    /// one execution overwrite.
    pub fn predict(&mut self, name: &str, value: Value) {
        self.predicts.insert(name.to_string(), value);
    }
}

/// Execute `prog` once against a reuse database, optionally pinning one
/// address to a fixed value (scored, not drawn). Consumes one LL-evaluation.
///
/// If the pinned address is never reached the returned trace simply lacks
/// it; callers that rely on the pin must check.
pub fn run_model(
    prog: &ModelProgram,
    reuse: &ChoiceDb,
    forced: Option<(&Address, &Value)>,
    chain: &mut Chain,
) -> Trace {
    run_model_cached(prog, reuse, forced, None, chain)
}

/// `run_model` with a move-local cache for fresh draws: addresses absent
/// from the reuse database take their value from the cache when present and
/// record new draws into it. A kernel move that scores several candidate
/// re-executions against one height passes the same cache to each so that
/// all candidates see one fixed completion of the missing variables rather
/// than independent redraws per evaluation.
pub fn run_model_cached(
    prog: &ModelProgram,
    reuse: &ChoiceDb,
    forced: Option<(&Address, &Value)>,
    fresh_cache: Option<&mut ChoiceDb>,
    chain: &mut Chain,
) -> Trace {
    chain.ll_evals += 1;
    let mut ctx = ModelCtx {
        reuse,
        forced,
        fresh_cache,
        chain,
        counters: HashMap::new(),
        choices: BTreeMap::new(),
        observes_ll: 0.0,
        predicts: BTreeMap::new(),
    };
    (prog.f)(&mut ctx);
    let prior_ll: f64 = ctx.choices.values().map(|c| c.log_prob).sum();
    Trace {
        total_ll: prior_ll + ctx.observes_ll,
        choices: ctx.choices,
        observes_ll: ctx.observes_ll,
        predicts: ctx.predicts,
    }
}

pub const MAX_INIT_ATTEMPTS: u32 = 10_000;

/// Forward-sample from the priors until a finite-likelihood trace appears.
pub fn init_trace(prog: &ModelProgram, chain: &mut Chain) -> Result<Trace, InferenceError> {
    for _ in 0..MAX_INIT_ATTEMPTS {
        let t = run_model(prog, &ChoiceDb::new(), None, chain);
        if t.total_ll > f64::NEG_INFINITY {
            return Ok(t);
        }
    }
    Err(InferenceError::ImpossibleModel(MAX_INIT_ATTEMPTS))
}

/// Log correction for a dimension-changing move:
/// `ln|D| + ln p_stale - ln|D'| - ln p_fresh`, where the stale set holds the
/// choices present only in `old`, the fresh set those present only in `new`,
/// and `exclude` (the kernel's selected address) is removed from both sides —
/// its forward/reverse proposal terms live in the kernels' own acceptance
/// logic.
pub fn transdim_correction(old: &Trace, new: &Trace, exclude: Option<&Address>) -> f64 {
    let excluded = |a: &Address| exclude.is_some_and(|e| e == a);
    let mut p_stale = 0.0;
    for (addr, rec) in &old.choices {
        if !new.choices.contains_key(addr) && !excluded(addr) {
            p_stale += rec.log_prob;
        }
    }
    let mut p_fresh = 0.0;
    for (addr, rec) in &new.choices {
        if !old.choices.contains_key(addr) && !excluded(addr) {
            p_fresh += rec.log_prob;
        }
    }
    (old.dim() as f64).ln() - (new.dim() as f64).ln() + p_stale - p_fresh
}
