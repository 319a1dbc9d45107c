//! Benchmark fixtures shared by the criterion targets.

use ctcsim_core::{DaviesParams, DensityOperator, PureState};

/// A representative noisy parameter point.
pub fn reference_params() -> DaviesParams {
    DaviesParams::new(0.25, 1.0, 1.0, 1.0, 1.5).expect("valid parameters")
}

pub fn minus_input() -> DensityOperator {
    PureState::minus().density()
}
