//! Single-site Metropolis-Hastings proposing from the prior: pick one
//! recorded choice uniformly, redraw it from its recorded prior, re-run the
//! model reusing everything else, and accept with the dimension-corrected
//! ratio. One trace-likelihood evaluation per step.

use rand::Rng;

use crate::error::InferenceError;
use crate::trace::{init_trace, run_model, transdim_correction, Chain, ModelProgram, SampleRecord, Trace};

/// One MH transition. Returns the new trace on acceptance, the input trace
/// unchanged on rejection.
pub fn mh_step(current: Trace, prog: &ModelProgram, chain: &mut Chain) -> Trace {
    debug_assert!(current.total_ll > f64::NEG_INFINITY && current.dim() >= 1);
    let k = chain.rng_mut().gen_range(0..current.dim());
    let addr = current.nth_address(k).clone();
    let old_rec = current.choices[&addr].clone();

    let proposal = old_rec.dist.draw(chain.rng_mut());
    let new = run_model(prog, &current.choices, Some((&addr, &proposal)), chain);

    let new_rec = match new.choices.get(&addr) {
        Some(rec) => rec,
        // The pinned site was never reached; there is no reverse move.
        None => return current,
    };

    // log acceptance ratio: likelihood ratio, dimension-jump correction, and
    // the selected site's prior-proposal terms (forward under the new trace's
    // parameters, reverse under the old trace's).
    let log_alpha = new.total_ll - current.total_ll
        + transdim_correction(&current, &new, Some(&addr))
        + old_rec.log_prob
        - new_rec.log_prob;

    if log_alpha >= 0.0 || chain.unit().ln() < log_alpha {
        new
    } else {
        current
    }
}

/// Budgeted pure-MH chain: forward-initialize, then step until the
/// LL-evaluation counter reaches `budget`. A sample is recorded after
/// initialization and after every step, rejections included.
pub fn run_mh(
    prog: &ModelProgram,
    budget: u64,
    seed: u64,
) -> Result<Vec<SampleRecord>, InferenceError> {
    let mut chain = Chain::new(seed);
    let mut current = init_trace(prog, &mut chain)?;
    let mut samples = vec![SampleRecord {
        ll_count: chain.ll_evals(),
        predicts: current.predicts.clone(),
    }];
    while chain.ll_evals() < budget {
        current = mh_step(current, prog, &mut chain);
        samples.push(SampleRecord {
            ll_count: chain.ll_evals(),
            predicts: current.predicts.clone(),
        });
    }
    Ok(samples)
}
