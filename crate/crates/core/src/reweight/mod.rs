//! Weight synthesis and weighted-frame diagnostics.
//!
//! The constructive part builds explicit weights and pairs them with a
//! [`WeightCertificate`] checked by singular values at the current
//! truncation. The diagnostic part looks for structural obstructions across
//! a sweep of truncations; it never turns a numeric trend alone into a
//! negative answer.

mod certificate;
mod diagnostics;
mod synthesis;
mod verdict;

pub use certificate::{Claim, WeightCertificate};
pub use diagnostics::{
    biorthogonal_defect_scan, biorthogonal_obstruction, excess_characterization,
    necessary_conditions_check, range_characterization_check, subsequence_lift,
    BiorthogonalScan, NecessaryCondition, NecessaryFinding, RangeCheck,
};
pub use synthesis::{
    bessel_weights, dual_pair_reweight, finite_domain_lower_bound, monotone_weight_check,
    reproducing_pair_reweight, surjective_multiplier_dual, DualPairReweight, FiniteDomainBound,
    ReproducingPairReweight, SurjectiveDual,
};
pub use verdict::{
    weighted_frame_verdict, ObstructionReason, SeriesEvidence, VerdictEvidence, WeightMethod,
    WeightedFrameVerdict,
};
