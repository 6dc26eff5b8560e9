//! Deterministic constituency-to-dependency conversion driven by a head
//! assignment.
//!
//! Every subtree collapses to the head token of its head child; the head
//! tokens of the remaining children are attached to it. The token the root
//! collapses to is attached to the artificial root with relation `root`.
//! All other relations are `_`.

use thiserror::Error;

use crate::align::AlignedSentence;
use crate::classifier::HeadModel;
use crate::conll::DepGraph;
use crate::heads::{assign_heads, HeadAssignment, HeadChooser};
use crate::induction::induce_heads;
use crate::percolation::RuleTable;
use crate::transform::{debinarize, debinarize_with_heads, has_intermediate_nodes, TransformError};
use crate::tree::{ConstTree, NodeId, NodeKind};

#[derive(Clone, Debug, Error, PartialEq, Eq)]
pub enum ConvertError {
    #[error("no head for nonterminal {0}")]
    MissingHead(NodeId),
    #[error("head index {index} out of range for node {node}")]
    HeadOutOfRange { node: NodeId, index: usize },
    #[error("tree contains intermediate (@) nodes")]
    IntermediateNodePresent,
    #[error(transparent)]
    Transform(#[from] TransformError),
    #[error("sentence {sentence}: {trees} trees but {sources} head sources")]
    SourceCountMismatch {
        sentence: usize,
        trees: usize,
        sources: usize,
    },
    #[error("sentence {sentence}: token counts differ (tree {tree}, dependencies {dep})")]
    TokenCountMismatch {
        sentence: usize,
        tree: usize,
        dep: usize,
    },
    #[error("sentence {sentence}: head induction failed at node {node} ({candidate_count} span-head candidates)")]
    InductionFailed {
        sentence: usize,
        node: NodeId,
        candidate_count: usize,
    },
    #[error("sentence {sentence}: no head assignment available")]
    NoAssignment { sentence: usize },
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct ConvertOptions {
    /// Splice `@` nodes (carrying their heads over) before converting.
    pub auto_debinarize: bool,
}

impl Default for ConvertOptions {
    fn default() -> Self {
        ConvertOptions {
            auto_debinarize: true,
        }
    }
}

pub fn convert(tree: &ConstTree, heads: &HeadAssignment) -> Result<DepGraph, ConvertError> {
    convert_with(tree, heads, ConvertOptions::default())
}

pub fn convert_with(
    tree: &ConstTree,
    heads: &HeadAssignment,
    options: ConvertOptions,
) -> Result<DepGraph, ConvertError> {
    if has_intermediate_nodes(tree) {
        if !options.auto_debinarize {
            return Err(ConvertError::IntermediateNodePresent);
        }
        let (flat, lowered) = debinarize_with_heads(tree, heads).map_err(|e| match e {
            TransformError::MissingHead(n) => ConvertError::MissingHead(n),
            other => other.into(),
        })?;
        return collapse(&flat, &lowered);
    }
    collapse(tree, heads)
}

fn collapse(tree: &ConstTree, heads: &HeadAssignment) -> Result<DepGraph, ConvertError> {
    let n = tree.token_count();
    let mut governor = vec![0usize; n];
    let mut head_token = vec![0usize; tree.len()];
    // children have larger ids than their parents
    for id in tree.node_ids().collect::<Vec<_>>().into_iter().rev() {
        head_token[id.0] = match &tree.node(id).kind {
            NodeKind::Preterminal { token, .. } => *token,
            NodeKind::Nonterminal { children } => {
                let p = heads.get(id).ok_or(ConvertError::MissingHead(id))?;
                if p == 0 || p > children.len() {
                    return Err(ConvertError::HeadOutOfRange { node: id, index: p });
                }
                let h = head_token[children[p - 1].0];
                for (j, c) in children.iter().enumerate() {
                    if j + 1 != p {
                        governor[head_token[c.0] - 1] = h;
                    }
                }
                h
            }
        };
    }
    let root = head_token[tree.root().0];
    governor[root - 1] = 0;
    let rels = (1..=n)
        .map(|i| if i == root { "root" } else { "_" }.to_string())
        .collect();
    let forms = tree.words().into_iter().map(str::to_string).collect();
    let pos = tree.tags().into_iter().map(str::to_string).collect();
    Ok(DepGraph::new(forms, pos, governor, rels).expect("collapsing a tree yields a dependency tree"))
}

/// Where the heads for a corpus conversion come from.
#[derive(Clone, Copy)]
pub enum HeadSource<'a> {
    /// Heads induced from aligned gold dependencies, one graph per tree.
    Oracle(&'a [DepGraph]),
    Rules(&'a RuleTable),
    Model(&'a HeadModel),
    /// Precomputed assignments (for example read from a sidecar file),
    /// given on the trees as they are.
    Sidecar(&'a [Option<HeadAssignment>]),
    Chooser(&'a dyn HeadChooser),
}

impl HeadSource<'_> {
    fn check_count(&self, trees: usize) -> Result<(), ConvertError> {
        let sources = match self {
            HeadSource::Oracle(d) => d.len(),
            HeadSource::Sidecar(h) => h.len(),
            _ => return Ok(()),
        };
        if sources != trees {
            return Err(ConvertError::SourceCountMismatch {
                sentence: sources.min(trees),
                trees,
                sources,
            });
        }
        Ok(())
    }

    /// Tree to convert and its heads for sentence `index`.
    pub fn heads_for(&self, index: usize, tree: &ConstTree) -> Result<(ConstTree, HeadAssignment), ConvertError> {
        let plain = || -> Result<ConstTree, ConvertError> {
            Ok(if has_intermediate_nodes(tree) {
                debinarize(tree)?
            } else {
                tree.clone()
            })
        };
        let with_chooser = |chooser: &dyn HeadChooser| -> Result<(ConstTree, HeadAssignment), ConvertError> {
            let t = plain()?;
            let h = assign_heads(chooser, &t);
            Ok((t, h))
        };
        match *self {
            HeadSource::Oracle(deps) => {
                let t = plain()?;
                let dep = &deps[index];
                let sentence = AlignedSentence::new(t, dep.clone()).map_err(|_| ConvertError::TokenCountMismatch {
                    sentence: index,
                    tree: tree.token_count(),
                    dep: dep.n(),
                })?;
                let h = induce_heads(&sentence).map_err(|f| ConvertError::InductionFailed {
                    sentence: index,
                    node: f.node,
                    candidate_count: f.candidate_count,
                })?;
                Ok((sentence.tree, h))
            }
            HeadSource::Rules(table) => with_chooser(table),
            HeadSource::Model(model) => with_chooser(model),
            HeadSource::Chooser(chooser) => with_chooser(chooser),
            HeadSource::Sidecar(assignments) => match &assignments[index] {
                Some(h) => Ok((tree.clone(), h.clone())),
                None => Err(ConvertError::NoAssignment { sentence: index }),
            },
        }
    }
}

/// Converts every tree with heads from `source`, preserving order.
pub fn convert_corpus(trees: &[ConstTree], source: HeadSource<'_>) -> Result<Vec<DepGraph>, ConvertError> {
    source.check_count(trees.len())?;
    trees
        .iter()
        .enumerate()
        .map(|(i, tree)| {
            let (t, h) = source.heads_for(i, tree)?;
            convert(&t, &h)
        })
        .collect()
}
