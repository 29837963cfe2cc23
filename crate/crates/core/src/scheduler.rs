//! Kernel composition and budgeted inference loops. A chain runs until its
//! trace-likelihood evaluation counter reaches the budget; the step that
//! crosses the budget finishes, so every recorded sample is a complete
//! kernel transition.

use crate::error::InferenceError;
use crate::mh::mh_step;
use crate::slice::{naive_slice_step, slice_step, SliceConfig};
use crate::trace::{init_trace, Chain, ModelProgram, SampleRecord, Trace};

/// Which transition kernel a chain uses per step.
#[derive(Debug, Clone, PartialEq)]
pub enum KernelKind {
    Mh,
    Slice,
    NaiveSlice,
    /// Biased coin per step: MH with probability `mh_weight`, slice otherwise.
    Mixture { mh_weight: f64 },
}

#[derive(Debug, Clone, PartialEq)]
pub struct KernelSpec {
    pub kind: KernelKind,
    pub slice: SliceConfig,
}

impl KernelSpec {
    pub fn mh() -> Self {
        KernelSpec {
            kind: KernelKind::Mh,
            slice: SliceConfig::default(),
        }
    }

    pub fn slice() -> Self {
        KernelSpec {
            kind: KernelKind::Slice,
            slice: SliceConfig::default(),
        }
    }

    pub fn naive_slice() -> Self {
        KernelSpec {
            kind: KernelKind::NaiveSlice,
            slice: SliceConfig::default(),
        }
    }

    pub fn mixture(mh_weight: f64) -> Result<Self, InferenceError> {
        if !(0.0..=1.0).contains(&mh_weight) {
            return Err(InferenceError::InvalidKernelSpec(format!(
                "mixture weight {mh_weight} outside [0, 1]"
            )));
        }
        Ok(KernelSpec {
            kind: KernelKind::Mixture { mh_weight },
            slice: SliceConfig::default(),
        })
    }

    pub fn with_slice_config(mut self, cfg: SliceConfig) -> Self {
        self.slice = cfg;
        self
    }

    /// Label used in CSV output and CLI parsing.
    pub fn label(&self) -> String {
        match &self.kind {
            KernelKind::Mh => "mh".into(),
            KernelKind::Slice => "slice".into(),
            KernelKind::NaiveSlice => "naive-slice".into(),
            KernelKind::Mixture { mh_weight } => format!("mix:{mh_weight}"),
        }
    }
}

impl std::str::FromStr for KernelSpec {
    type Err = InferenceError;

    /// `mh`, `slice`, `naive-slice`, or `mix:BETA` with BETA the MH weight.
    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s {
            "mh" => Ok(KernelSpec::mh()),
            "slice" => Ok(KernelSpec::slice()),
            "naive-slice" => Ok(KernelSpec::naive_slice()),
            _ => match s.strip_prefix("mix:") {
                Some(beta) => {
                    let beta: f64 = beta.parse().map_err(|_| {
                        InferenceError::InvalidKernelSpec(format!("bad mixture weight in {s:?}"))
                    })?;
                    KernelSpec::mixture(beta)
                }
                None => Err(InferenceError::InvalidKernelSpec(format!(
                    "unknown kernel {s:?}; use mh, slice, naive-slice or mix:BETA"
                ))),
            },
        }
    }
}

/// The chain's LL-evaluation counter, the x-axis of every comparison.
pub fn ll_counter(chain: &Chain) -> u64 {
    chain.ll_evals()
}

/// Run one chain until `budget` LL-evaluations, streaming each recorded
/// sample (the predicts map plus the counter value at recording time) into
/// `sink`. The degenerate mixtures (weight 0 or 1) skip the coin draw so
/// they are bit-identical to the pure kernels under the same seed.
pub fn run_inference_with(
    prog: &ModelProgram,
    spec: &KernelSpec,
    budget: u64,
    seed: u64,
    mut sink: impl FnMut(u64, &Trace),
) -> Result<(), InferenceError> {
    debug_assert!(budget >= 1);
    let mut chain = Chain::new(seed);
    let mut current = init_trace(prog, &mut chain)?;
    sink(chain.ll_evals(), &current);
    while chain.ll_evals() < budget {
        current = advance(current, prog, spec, &mut chain)?;
        sink(chain.ll_evals(), &current);
    }
    Ok(())
}

fn advance(
    current: Trace,
    prog: &ModelProgram,
    spec: &KernelSpec,
    chain: &mut Chain,
) -> Result<Trace, InferenceError> {
    let use_mh = match spec.kind {
        KernelKind::Mh => true,
        KernelKind::Slice | KernelKind::NaiveSlice => false,
        KernelKind::Mixture { mh_weight } => {
            if mh_weight >= 1.0 {
                true
            } else if mh_weight <= 0.0 {
                false
            } else {
                chain.unit() < mh_weight
            }
        }
    };
    if use_mh {
        Ok(mh_step(current, prog, chain))
    } else if matches!(spec.kind, KernelKind::NaiveSlice) {
        naive_slice_step(current, prog, &spec.slice, chain)
    } else {
        slice_step(current, prog, &spec.slice, chain)
    }
}

/// Budgeted run collected into a vector.
pub fn run_inference(
    prog: &ModelProgram,
    spec: &KernelSpec,
    budget: u64,
    seed: u64,
) -> Result<Vec<SampleRecord>, InferenceError> {
    let mut out = Vec::new();
    run_inference_with(prog, spec, budget, seed, |ll_count, trace| {
        out.push(SampleRecord {
            ll_count,
            predicts: trace.predicts.clone(),
        });
    })?;
    Ok(out)
}

/// Run until exactly `n_samples` samples have been recorded, whatever the
/// evaluation cost.
pub fn run_chain_samples(
    prog: &ModelProgram,
    spec: &KernelSpec,
    n_samples: usize,
    seed: u64,
) -> Result<Vec<SampleRecord>, InferenceError> {
    debug_assert!(n_samples >= 1);
    let mut chain = Chain::new(seed);
    let mut current = init_trace(prog, &mut chain)?;
    let mut out = Vec::with_capacity(n_samples);
    out.push(SampleRecord {
        ll_count: chain.ll_evals(),
        predicts: current.predicts.clone(),
    });
    while out.len() < n_samples {
        current = advance(current, prog, spec, &mut chain)?;
        out.push(SampleRecord {
            ll_count: chain.ll_evals(),
            predicts: current.predicts.clone(),
        });
    }
    Ok(out)
}
