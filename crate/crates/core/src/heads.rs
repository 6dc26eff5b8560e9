//! Head assignments, head choosers and the sidecar head file format.
//!
//! The sidecar format has one line per sentence holding space-separated
//! `rank:head` pairs, where `rank` is the 0-based preorder rank of a
//! nonterminal among the nonterminals of the tree and `head` is the 1-based
//! position of its head child. A line starting with `#` marks a sentence
//! without an assignment (for example one excluded by head induction).

use std::collections::BTreeMap;

use thiserror::Error;

use crate::label::normalize_label;
use crate::tree::{ConstTree, NodeId};

/// The head child of each nonterminal, as a 1-based position in its child
/// list.
#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct HeadAssignment {
    heads: BTreeMap<NodeId, usize>,
}

#[derive(Clone, Debug, Error, PartialEq, Eq)]
pub enum HeadError {
    #[error("no head for nonterminal {0}")]
    MissingHead(NodeId),
    #[error("head index {index} out of range for node {node} with {arity} children")]
    OutOfRange {
        node: NodeId,
        index: usize,
        arity: usize,
    },
    #[error("head given for node {0}, which is not a nonterminal")]
    NotNonterminal(NodeId),
}

impl HeadAssignment {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn insert(&mut self, node: NodeId, head: usize) {
        self.heads.insert(node, head);
    }

    pub fn get(&self, node: NodeId) -> Option<usize> {
        self.heads.get(&node).copied()
    }

    pub fn len(&self) -> usize {
        self.heads.len()
    }

    pub fn is_empty(&self) -> bool {
        self.heads.is_empty()
    }

    pub fn iter(&self) -> impl Iterator<Item = (NodeId, usize)> + '_ {
        self.heads.iter().map(|(&n, &h)| (n, h))
    }

    /// Head child node of `node`.
    pub fn head_child(&self, tree: &ConstTree, node: NodeId) -> Option<NodeId> {
        let index = self.get(node)?;
        tree.children(node).get(index.checked_sub(1)?).copied()
    }

    /// Checks that exactly the nonterminals of `tree` carry an in-range head.
    pub fn validate(&self, tree: &ConstTree) -> Result<(), HeadError> {
        for (node, index) in self.iter() {
            if node.0 >= tree.len() || tree.node(node).is_preterminal() {
                return Err(HeadError::NotNonterminal(node));
            }
            let arity = tree.children(node).len();
            if index == 0 || index > arity {
                return Err(HeadError::OutOfRange { node, index, arity });
            }
        }
        match tree.nonterminals().find(|&id| self.get(id).is_none()) {
            Some(missing) => Err(HeadError::MissingHead(missing)),
            None => Ok(()),
        }
    }
}

impl FromIterator<(NodeId, usize)> for HeadAssignment {
    fn from_iter<I: IntoIterator<Item = (NodeId, usize)>>(iter: I) -> Self {
        HeadAssignment {
            heads: iter.into_iter().collect(),
        }
    }
}

/// Anything that picks a head child from a local configuration.
///
/// `parent` and `children` are normalized labels; the result is a 1-based
/// index into `children`, which is never empty.
pub trait HeadChooser {
    fn choose(&self, parent: &str, children: &[&str]) -> usize;
}

/// Position-only chooser: always the first or always the last child.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum FixedChooser {
    Leftmost,
    Rightmost,
}

impl HeadChooser for FixedChooser {
    fn choose(&self, _parent: &str, children: &[&str]) -> usize {
        match self {
            FixedChooser::Leftmost => 1,
            FixedChooser::Rightmost => children.len(),
        }
    }
}

impl<T: HeadChooser + ?Sized> HeadChooser for &T {
    fn choose(&self, parent: &str, children: &[&str]) -> usize {
        (**self).choose(parent, children)
    }
}

/// Normalized parent label and child labels of a nonterminal.
pub fn configuration(tree: &ConstTree, node: NodeId) -> (&str, Vec<&str>) {
    let parent = normalize_label(tree.label(node));
    let children = tree
        .children(node)
        .iter()
        .map(|&c| normalize_label(tree.label(c)))
        .collect();
    (parent, children)
}

/// Runs `chooser` on every nonterminal of `tree`. Out-of-range answers are
/// clamped into the child list.
pub fn assign_heads<C: HeadChooser + ?Sized>(chooser: &C, tree: &ConstTree) -> HeadAssignment {
    tree.nonterminals()
        .map(|id| {
            let (parent, children) = configuration(tree, id);
            let index = chooser.choose(parent, &children).clamp(1, children.len());
            (id, index)
        })
        .collect()
}

#[derive(Clone, Debug, Error, PartialEq, Eq)]
pub enum SidecarError {
    #[error("malformed head entry '{0}'")]
    BadEntry(String),
    #[error("head entry for rank {rank}, but the tree has {count} nonterminals")]
    UnknownRank { rank: usize, count: usize },
    #[error("invalid head assignment: {0}")]
    Invalid(#[from] HeadError),
}

/// Formats one sidecar line for `heads` over `tree`.
pub fn format_sidecar_line(tree: &ConstTree, heads: &HeadAssignment) -> String {
    tree.nonterminals()
        .enumerate()
        .filter_map(|(rank, id)| heads.get(id).map(|h| format!("{rank}:{h}")))
        .collect::<Vec<_>>()
        .join(" ")
}

/// Parses one sidecar line against `tree`. Returns `None` for `#` lines.
pub fn parse_sidecar_line(
    line: &str,
    tree: &ConstTree,
) -> Result<Option<HeadAssignment>, SidecarError> {
    let line = line.trim();
    if line.starts_with('#') {
        return Ok(None);
    }
    let nonterminals: Vec<NodeId> = tree.nonterminals().collect();
    let mut heads = HeadAssignment::new();
    for entry in line.split_whitespace() {
        let (rank, head) = entry
            .split_once(':')
            .and_then(|(r, h)| Some((r.parse::<usize>().ok()?, h.parse::<usize>().ok()?)))
            .ok_or_else(|| SidecarError::BadEntry(entry.to_string()))?;
        let node = *nonterminals.get(rank).ok_or(SidecarError::UnknownRank {
            rank,
            count: nonterminals.len(),
        })?;
        heads.insert(node, head);
    }
    heads.validate(tree)?;
    Ok(Some(heads))
}

/// Splits a sidecar file into per-sentence lines. A trailing newline does
/// not start a new sentence, but blank lines inside the file do (trees
/// without nonterminals have empty lines).
pub fn sidecar_lines(text: &str) -> Vec<&str> {
    let mut lines: Vec<&str> = text.split('\n').collect();
    if lines.last() == Some(&"") {
        lines.pop();
    }
    lines
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::bracketed::parse_bracketed;

    fn fixture_a() -> ConstTree {
        parse_bracketed("(S (NP (DT the) (NN dog)) (VP (VBZ barks)))")
            .unwrap()
            .remove(0)
    }

    #[test]
    fn fixed_choosers() {
        let t = fixture_a();
        let left = assign_heads(&FixedChooser::Leftmost, &t);
        let right = assign_heads(&FixedChooser::Rightmost, &t);
        assert_eq!(format_sidecar_line(&t, &left), "0:1 1:1 2:1");
        assert_eq!(format_sidecar_line(&t, &right), "0:2 1:2 2:1");
        left.validate(&t).unwrap();
    }

    #[test]
    fn sidecar_roundtrip() {
        let t = fixture_a();
        let h = parse_sidecar_line("0:2 1:2 2:1", &t).unwrap().unwrap();
        assert_eq!(h.get(NodeId(0)), Some(2));
        assert_eq!(h.get(NodeId(1)), Some(2));
        assert_eq!(h.get(NodeId(4)), Some(1));
        assert_eq!(format_sidecar_line(&t, &h), "0:2 1:2 2:1");
        assert_eq!(parse_sidecar_line("# excluded", &t).unwrap(), None);
    }

    #[test]
    fn sidecar_errors() {
        let t = fixture_a();
        assert!(matches!(
            parse_sidecar_line("0:2 x", &t),
            Err(SidecarError::BadEntry(_))
        ));
        assert!(matches!(
            parse_sidecar_line("0:2 1:2 7:1", &t),
            Err(SidecarError::UnknownRank { rank: 7, count: 3 })
        ));
        assert!(matches!(
            parse_sidecar_line("0:2 1:2", &t),
            Err(SidecarError::Invalid(HeadError::MissingHead(_)))
        ));
        assert!(matches!(
            parse_sidecar_line("0:3 1:2 2:1", &t),
            Err(SidecarError::Invalid(HeadError::OutOfRange { .. }))
        ));
    }

    #[test]
    fn sidecar_line_splitting() {
        assert_eq!(sidecar_lines("a\n\nb\n"), ["a", "", "b"]);
        assert!(sidecar_lines("").is_empty());
    }
}
