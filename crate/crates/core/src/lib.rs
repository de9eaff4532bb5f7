//! Population monotonic allocation schemes for matching games.
//!
//! A weighted graph defines a cooperative game whose value on a coalition
//! is the weight of a maximum matching inside it. This crate decides when
//! such a game admits a population monotonic allocation scheme (PMAS),
//! builds one when it does, and explains why not when it does not:
//!
//! - [`decide_population_monotonic`] recognizes the positive case in linear
//!   time (every component is a double-star whose centers dominate their
//!   leaf edges) and returns witnesses or a certificate.
//! - [`construct_scheme`] and [`allocate`] turn witnesses into payoffs.
//! - [`verify_scheme`] checks any scheme against the definition.
//! - [`pmas_feasibility`] is an exact LP oracle for small graphs,
//!   independent of the structural results.
//!
//! All arithmetic is exact ([`Rational`]).

pub mod characterization;
pub mod error;
pub mod graph;
pub mod json;
pub mod matching;
pub mod oracle;
pub mod pmas;
pub mod rational;

pub use characterization::{
    candidate_center_pairs, decide_population_monotonic, is_dominant_pair,
    scan_forbidden_subgraphs, scan_forbidden_subgraphs_with, scan_weight_lemmas,
    scan_weight_lemmas_with, Certificate, DoubleStarWitness, Evidence, FailureReason,
    ForbiddenKind, ForbiddenSubgraph, Lemma, LemmaViolation, PmDecision, ScanLimit,
};
pub use error::{Error, Result};
pub use graph::{
    connected_components, induced_subgraph, parse_graph, Coalition, Edge, VertexId, WeightedGraph,
};
pub use matching::{
    characteristic_value, double_star_gamma, gamma_table, max_weight_matching, GammaTable, Matching,
};
pub use oracle::{
    constructor_harness, equivalence_harness, pmas_feasibility, random_weighted_graph, Feasibility,
    HarnessReport,
};
pub use pmas::{
    allocate, construct_scheme, is_core_allocation, verify_scheme, Allocation, AllocationScheme,
    PmasRule, SchemeMode, SchemeTable, SchemeViolation, VerifyReport,
};
pub use rational::Rational;
