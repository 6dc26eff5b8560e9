//! Constituent headedness as an explicit layer over constituency treebanks:
//! gold head induction from aligned dependencies, rule-based and learned
//! head choosers, head-driven binarization, constituency-to-dependency
//! conversion and the matching evaluation metrics.

pub mod align;
pub mod bracketed;
pub mod classifier;
pub mod conll;
pub mod convert;
pub mod eval;
pub mod heads;
pub mod induction;
pub mod label;
pub mod percolation;
pub mod synthetic;
pub mod transfer;
pub mod transform;
pub mod tree;

pub use align::{align, AlignOptions, AlignReport, AlignedSentence};
pub use bracketed::{parse_bracketed, serialize_bracketed, serialize_corpus};
pub use classifier::{HeadModel, Instance, TrainConfig};
pub use conll::{parse_conll, write_conll, DepGraph};
pub use convert::{convert, convert_corpus, HeadSource};
pub use heads::{HeadAssignment, HeadChooser};
pub use induction::{induce_heads, span_head_candidates};
pub use percolation::{load_rules, RuleTable};
pub use transform::{binarize, debinarize, normalize_punct, DelimiterConfig};
pub use tree::{ConstTree, NodeId};
