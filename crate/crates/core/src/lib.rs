//! Statistical comparison of ontology alignment systems on a single
//! matching task.
//!
//! Alignments produced by several systems are compared pairwise against a
//! reference with McNemar's test. Each pair yields a 2×2 contingency table,
//! built either from correct discoveries only ([`Perspective::Ifp`]) or
//! also charging false positives ([`Perspective::Cfp`]). The resulting
//! p-values are corrected for family-wise error and turned into a directed
//! significance graph, a DOT rendering and a ranking.
//!
//! The [`matcher`] module produces alignments from label lists with string
//! similarity measures and an optimal assignment, so matchers built from
//! different measures can be compared the same way.

pub mod cli;
pub mod contingency;
pub mod error;
pub mod fwer;
pub mod ingest;
pub mod matcher;
pub mod mcnemar;
pub mod model;
pub mod report;
pub mod siggraph;

pub use contingency::{build_discordant_matrix, build_table_cfp, build_table_ifp, ContingencyTable, DiscordantMatrix};
pub use error::{Error, Result};
pub use model::{
    canonicalize_alignment, Alignment, ComparisonConfig, Correction, Correspondence, Mode, Perspective, Relation,
    TaskUniverse, TestKind,
};
pub use siggraph::{compare, emit_dot, rank_systems, Comparison, RankTable, SignificanceGraph};
