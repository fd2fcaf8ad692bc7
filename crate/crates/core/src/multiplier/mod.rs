//! Frame multipliers `M f = sum_n m_n <f, psi_n> phi_n`.

mod ops;
mod spec;

pub use ops::{
    assemble_multiplier, interleave_identity_construction, invertibility_check, multiplier_matrix,
    reconstruction_duality_check, unconditionality_diagnostic, weight_shift, DualityReport,
    InterleavedSystem, Invertibility, ShiftReport, ShiftedWeights, Slot, TestVectorSeries,
    UnconditionalityReport, UnconditionalityVerdict,
};
pub use spec::{MultiplierSpec, SymbolSpec, TruncatedMultiplier};
