//! Operator layer: analysis and synthesis matrices, frame bounds,
//! minimality, biorthogonal systems, excess, projections, sweeps.

mod bounds;
mod operator;
mod subspace;
mod sweep;

pub use bounds::{
    biorthogonal, excess, frame_bounds, frame_bounds_with, is_minimal, riesz_test, BoundsReport,
    RieszVerdict,
};
pub use operator::{
    analysis_matrix, frame_operator, gram_matrix, pseudo_inverse, synthesis_matrix,
    OperatorMatrix, OperatorRole,
};
pub use subspace::{project_sequence, Subspace};
pub use sweep::{
    classify_series, growth_classify, loglog_slope, semilog_slope, truncation_sweep, BoundsField,
    Trend, TrendThresholds,
};
