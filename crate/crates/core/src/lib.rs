//! Lexico-semantic atlases built from dependency-parsed corpora.
//!
//! The pipeline runs in four stages:
//!
//! 1. [`ingest`] reads CoNLL-U style files, drops function words and
//!    produces a [`DependencyTable`] plus a [`SentenceStore`].
//! 2. [`graph`] assembles, for one target unit, the graph of its primary
//!    (direct) and secondary (one intermediate) syntactic contexts, and
//!    [`clique`] enumerates the maximal cliques of that graph. Each clique
//!    is a candidate sense trend.
//! 3. [`ca`] runs correspondence analysis over the clique/context incidence
//!    matrix to place cliques and contexts on a semantic map.
//! 4. [`store`] keeps the per-language [`Atlas`] with its clique to sentence
//!    index, and [`xlink`] aligns cliques across two atlases through a
//!    bilingual dictionary.
//!
//! [`window`] keeps the older co-occurrence window model available for
//! comparison.

pub mod ca;
pub mod clique;
pub mod conllu;
pub mod error;
pub mod format;
pub mod graph;
pub mod ingest;
pub mod store;
pub mod unit;
pub mod window;
pub mod xlink;

pub use ca::{build_incidence, chi_square_row_distance, correspondence_analysis, IncidenceMatrix, SemanticMap};
pub use clique::{enumerate_cliques, sense_cliques, Clique, CliqueId, CliqueKind, CliquePolicy};
pub use error::{Error, Result};
pub use graph::{build_context_graph, primary_neighbors, secondary_neighbors, ContextGraph, GraphConfig, TableIndex};
pub use ingest::{
    filter_and_normalize, ingest, DependencyRecord, DependencyTable, IngestConfig, LexiconStats, SentenceStore,
};
pub use store::{build_atlas, load_atlas, query_word, save_atlas, sentences_for_clique, Atlas, AtlasConfig, Targets};
pub use unit::{LexicalUnit, Pos, SentenceId};
pub use xlink::{
    cross_navigate, load_dictionary, match_cliques, translate_clique, BilingualDictionary, LinkParams, SenseLink,
};
