//! Finite-dimensional toolkit for weighted frames, weighted lower semi frames
//! and frame multipliers.
//!
//! Infinite sequences in a separable Hilbert space are handled through
//! truncations: a [`SequenceSpec`] describes a (possibly infinite) family and
//! [`build_sequence`] renders its first members inside a finite ambient
//! dimension. Everything downstream works on dense complex matrices.
//!
//! The crate is split into four layers:
//!
//! * [`seqcore`]: sequences, symbolic families, truncation and weights.
//! * [`opspace`]: analysis/synthesis operators, frame bounds, minimality,
//!   biorthogonal systems, excess, pseudo-inverses and truncation sweeps.
//! * [`reweight`]: weight synthesis (Bessel weighting, dual and reproducing
//!   pair reweighting, ...), obstruction diagnostics and the verdict pipeline.
//! * [`multiplier`]: frame multipliers, weight shifting and the interleaving
//!   identity construction.

pub mod config;
pub mod error;
pub mod linalg;
pub mod multiplier;
pub mod opspace;
pub mod reweight;
pub mod seqcore;

pub use config::RunConfig;
pub use error::{Error, Result};
pub use linalg::{CMatrix, Vector, C64};
pub use multiplier::{
    assemble_multiplier, interleave_identity_construction, invertibility_check, multiplier_matrix,
    reconstruction_duality_check, unconditionality_diagnostic, weight_shift, DualityReport,
    InterleavedSystem, Invertibility, MultiplierSpec, ShiftReport, ShiftedWeights, SymbolSpec,
    UnconditionalityReport, UnconditionalityVerdict,
};
pub use opspace::{
    analysis_matrix, biorthogonal, excess, frame_bounds, growth_classify, is_minimal,
    project_sequence, pseudo_inverse, riesz_test, synthesis_matrix, truncation_sweep,
    BoundsField, BoundsReport, OperatorMatrix, OperatorRole, RieszVerdict, Subspace, Trend,
    TrendThresholds,
};
pub use reweight::{
    bessel_weights, biorthogonal_obstruction, dual_pair_reweight, excess_characterization,
    finite_domain_lower_bound, monotone_weight_check, necessary_conditions_check,
    range_characterization_check, reproducing_pair_reweight, subsequence_lift,
    surjective_multiplier_dual, weighted_frame_verdict, Claim, ObstructionReason, WeightCertificate,
    WeightMethod, WeightedFrameVerdict,
};
pub use seqcore::{
    apply_weights, build_sequence, default_tau, normalize_tau, FamilyName, LimitMeta, Origin,
    Positivity, ScalarRule, SequenceSpec, SizeRule, SpecKind, TauWeights, VectorSequence,
    WeightSeq,
};
