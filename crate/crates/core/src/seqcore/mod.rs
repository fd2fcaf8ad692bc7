//! Sequences, symbolic families, truncation and weights.

mod family;
mod sequence;
mod spec;
mod weights;

pub use family::{FamilyName, ScalarRule, SizeRule};
pub use sequence::{Origin, VectorSequence};
pub use spec::{build_sequence, LimitMeta, SequenceSpec, SpecKind};
pub use weights::{apply_weights, default_tau, normalize_tau, Positivity, TauWeights, WeightSeq};
