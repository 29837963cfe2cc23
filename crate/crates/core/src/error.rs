use thiserror::Error;

/// Failures an inference run can hit.
#[derive(Debug, Clone, PartialEq, Error)]
pub enum InferenceError {
    #[error("no finite-likelihood trace found in {0} forward-sampling attempts")]
    ImpossibleModel(u32),
    #[error("slice step-out exceeded {0} doublings; the target looks improper or flat")]
    WidthOverflow(u32),
    #[error("slice shrinkage exceeded {0} iterations; the slice is degenerate")]
    DegenerateSlice(u32),
    #[error("invalid kernel specification: {0}")]
    InvalidKernelSpec(String),
}
