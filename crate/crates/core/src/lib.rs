//! Source abstraction, API usage pattern mining and code recommendation.
//!
//! Pipeline: [`extractor`] turns Java-subset source into items,
//! [`transaction`] groups them per block, [`sequential`] mines frequent
//! sequences, [`repository`] persists them as XML, [`query`] answers
//! single-statement queries, [`groum`] mines graph patterns and [`eval`]
//! scores retrieval runs.

pub mod corpus;
pub mod eval;
pub mod extractor;
pub mod groum;
pub mod item;
pub mod query;
pub mod ratio;
pub mod repository;
pub mod sequential;
pub mod transaction;

pub use eval::{precision_recall, roc_points, sequence_pr, EvalError, RocPoint};
pub use extractor::{extract_items, normalize_item, Declaration, ExtractError, Extraction};
pub use groum::{build_groum, patt_explorer, Groum, GroumError, GroumPattern};
pub use item::{BlockPath, ControlKind, ControlMarker, ItemKey, ItemKind, SourceItem};
pub use query::{abstract_query, render_skeleton, search, QueryContext, QueryError, Recommendation, UserQuery};
pub use ratio::Ratio;
pub use repository::{merge_update, MergeMode, MinedRepository, RepositoryError};
pub use sequential::{adaptive_mine, mine_prefixspan, score, support, MineError, SequentialPattern};
pub use transaction::{
    build_sequence_db, build_transactions, Granularity, SequenceDatabase, SequenceRecord, TransactionRecord,
};
