//! Brute-force checks of the scoring theory on small enumerable instances.

pub mod ascent;
pub mod distribution;
pub mod properness;
pub mod suite;
pub mod usefulness;

pub use ascent::{gradient_ascent, AscentConfig, AscentResult};
pub use distribution::{DiscreteDistribution, Outcome};
pub use properness::{
    brute_force_argmax, check_assumption1, check_assumption1_all, check_properness, expected_gradient,
    expected_score, fixed_point_residual, gamma_s, gamma_t, Assumption1Report, PropernessReport, WeightGrid,
};
pub use suite::{
    adversarial_instance, default_suites, parse_jsonl, random_instance, run_suite, suites_with_count, summarize, write_jsonl, LabRecord,
    SuiteKind, SuiteSummary,
};
pub use usefulness::{usefulness, UsefulnessEstimator};
