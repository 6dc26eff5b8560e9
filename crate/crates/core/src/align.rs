//! Pairing constituency trees with dependency graphs of the same sentence.

use std::collections::BTreeSet;

use thiserror::Error;

use crate::conll::DepGraph;
use crate::label::normalize_form;
use crate::tree::ConstTree;

/// A constituency tree and a dependency graph over the same tokens.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct AlignedSentence {
    pub tree: ConstTree,
    pub dep: DepGraph,
}

#[derive(Clone, Debug, Error, PartialEq, Eq)]
pub enum AlignError {
    #[error("{trees} trees but {deps} dependency graphs")]
    LengthMismatch { trees: usize, deps: usize },
    #[error("tree has {tree} tokens but dependency graph has {dep}")]
    TokenCountMismatch { tree: usize, dep: usize },
}

impl AlignedSentence {
    /// Pairs a tree and a graph, checking only the token count.
    pub fn new(tree: ConstTree, dep: DepGraph) -> Result<Self, AlignError> {
        if tree.token_count() != dep.n() {
            return Err(AlignError::TokenCountMismatch {
                tree: tree.token_count(),
                dep: dep.n(),
            });
        }
        Ok(AlignedSentence { tree, dep })
    }
}

#[derive(Clone, Debug, Default)]
pub struct AlignOptions {
    /// Exclude sentences whose forms differ after normalization instead of
    /// only warning about them.
    pub strict: bool,
    /// 0-based sentence indices to drop unconditionally.
    pub exclude: BTreeSet<usize>,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum ExclusionReason {
    TokenCount { tree: usize, dep: usize },
    FormMismatch { token: usize, tree_form: String, dep_form: String },
    Listed,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct FormWarning {
    pub sentence: usize,
    pub token: usize,
    pub tree_form: String,
    pub dep_form: String,
}

#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct AlignReport {
    /// Input index of every aligned sentence, parallel to the output list.
    pub kept: Vec<usize>,
    pub excluded: Vec<(usize, ExclusionReason)>,
    pub warnings: Vec<FormWarning>,
}

fn first_form_mismatch(tree: &ConstTree, dep: &DepGraph) -> Option<(usize, String, String)> {
    tree.words()
        .into_iter()
        .zip(dep.forms())
        .enumerate()
        .find(|(_, (t, d))| normalize_form(t) != normalize_form(d))
        .map(|(i, (t, d))| (i + 1, t.to_string(), d.clone()))
}

/// Pairs trees and graphs by position, keeping the pairs whose tokens line
/// up.
pub fn align(
    trees: Vec<ConstTree>,
    deps: Vec<DepGraph>,
    options: &AlignOptions,
) -> Result<(Vec<AlignedSentence>, AlignReport), AlignError> {
    if trees.len() != deps.len() {
        return Err(AlignError::LengthMismatch {
            trees: trees.len(),
            deps: deps.len(),
        });
    }
    let mut report = AlignReport::default();
    let mut aligned = Vec::new();
    for (index, (tree, dep)) in trees.into_iter().zip(deps).enumerate() {
        if options.exclude.contains(&index) {
            report.excluded.push((index, ExclusionReason::Listed));
            continue;
        }
        if tree.token_count() != dep.n() {
            report.excluded.push((
                index,
                ExclusionReason::TokenCount {
                    tree: tree.token_count(),
                    dep: dep.n(),
                },
            ));
            continue;
        }
        if let Some((token, tree_form, dep_form)) = first_form_mismatch(&tree, &dep) {
            if options.strict {
                report.excluded.push((
                    index,
                    ExclusionReason::FormMismatch {
                        token,
                        tree_form,
                        dep_form,
                    },
                ));
                continue;
            }
            report.warnings.push(FormWarning {
                sentence: index,
                token,
                tree_form,
                dep_form,
            });
        }
        report.kept.push(index);
        aligned.push(AlignedSentence { tree, dep });
    }
    Ok((aligned, report))
}

/// Reads an exclusion list: one 0-based sentence index per line, `#`
/// comments allowed.
pub fn parse_exclusion_list(text: &str) -> Result<BTreeSet<usize>, std::num::ParseIntError> {
    text.lines()
        .map(|l| l.split('#').next().unwrap_or("").trim())
        .filter(|l| !l.is_empty())
        .map(str::parse)
        .collect()
}
