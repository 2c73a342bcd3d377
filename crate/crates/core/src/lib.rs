//! Fuzzy rule interpolation: fuzzy-set primitives, sparse rule bases, ten
//! interpolation methods, conclusion analysis, a file format and a benchmark
//! harness.

pub mod analysis;
pub mod bench;
pub mod fis;
pub mod fuzzy;
pub mod methods;
pub mod par;
pub mod rulebase;

pub use fuzzy::{AlphaCut, Breakpoint, FuzzyError, FuzzySet, ReferenceMode};
pub use methods::{interpolate, Conclusion, ConclusionForm, FriError, InterpolationConfig, MethodId};
pub use rulebase::{LinguisticPartition, Observation, Rule, RuleBase};
