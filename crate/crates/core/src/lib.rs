//! Saturation analysis for stable matchings in bipartite markets.
//!
//! Given the acceptability graph of a two-sided market, decide whether every
//! stable matching leaves no vertex of a side unmatched, whatever the
//! preferences. Negative answers come with a preference instance that leaves
//! a chosen vertex unmatched in every stable matching.

pub mod compatibility;
pub mod graph;
pub mod matching;
pub mod preferences;
pub mod saturation;

pub use compatibility::{ClassSize, ClassVerdict, CompatibilityError, CompatibilityMarket, Consistency};
pub use graph::{BipartiteGraph, Component, GraphError, Side, VertexId};
pub use matching::{
    deferred_acceptance, enumerate_stable, find_blocking_pairs, is_stable, maximum_matching,
    stable_matchings, BlockingPair, Matching, MatchingError, StableSet, DEFAULT_NODE_CAP,
};
pub use preferences::{
    instance_count, InstanceCount, PreferenceError, PreferenceInstance, RankTable, RawPreferences,
    DEFAULT_INSTANCE_CAP,
};
pub use saturation::{
    adversarial_instance, check_condition1, check_condition2, completeness_verdict, component_verdict,
    perfect_verdict, saturation_verdict, vertex_report, AnalysisError, CompletenessVerdict, ComponentVerdict,
    Counterexample, SaturationVerdict, VertexConditionReport,
};
