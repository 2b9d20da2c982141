//! Coherence, Bregman inaccuracy and accuracy dominance for credence functions
//! on finite and countable opinion spaces.
//!
//! Finite spaces are decided exactly (rational arithmetic) or with a float
//! tolerance. Countable spaces are one of three symbolic families over the
//! naturals, handled by closed forms and truncation.

pub mod coherence;
pub mod credence;
pub mod dominance;
pub mod error;
pub mod families;
pub mod inaccuracy;
pub mod io;
pub mod opinion_space;
pub mod scalar;

pub use coherence::{
    check_coherence, check_countable_coherence, check_partial_measure, lambda_representation, Certificate,
    CoherenceOptions, CoherenceStatus, CoherenceVerdict, LambdaRepresentation, PartialMeasureViolation,
};
pub use credence::{Credence, CredenceRule};
pub use dominance::{
    compare, find_dominator, project_coherent, sampled_atoms, verify_pythagorean, DominanceOptions, DominanceVerdict,
    DominatorCase, DominatorReport, ProjectionResult, PythagoreanRecord, Relation,
};
pub use families::{
    partition_bound, reproduce_example, stability_report, Assertion, ExampleReport, PartitionBound, ReproduceOptions,
    StabilityFact, StabilityProperty, StabilityStatus,
};
pub use error::{CredalError, Result};
pub use inaccuracy::{
    eval_divergence, expected_inaccuracy, score, score_countable, ConvexGenerator, ExtReal, InaccuracyMeasure,
    SeriesPolicy, SeriesStatus, SeriesVerdict, Weights,
};
pub use opinion_space::{Family, OpinionSpace, ValuationMatrix, World, WorldAtom};
pub use scalar::{NumericMode, Rational, Value};
