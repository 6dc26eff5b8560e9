//! Ordered constituency trees stored as a preorder arena.

use std::fmt;

use thiserror::Error;

use crate::label::EMPTY_ELEMENT;

/// Identifier of a node inside a [`ConstTree`].
///
/// Node ids are preorder positions: the root is `NodeId(0)` and every node
/// has a larger id than its parent.
#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct NodeId(pub usize);

impl fmt::Display for NodeId {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.0)
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum NodeKind {
    Nonterminal { children: Vec<NodeId> },
    /// A POS-tagged word. `token` is the 1-based position in the sentence.
    Preterminal { word: String, token: usize },
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Node {
    pub label: String,
    pub kind: NodeKind,
}

impl Node {
    pub fn is_preterminal(&self) -> bool {
        matches!(self.kind, NodeKind::Preterminal { .. })
    }

    pub fn children(&self) -> &[NodeId] {
        match &self.kind {
            NodeKind::Nonterminal { children } => children,
            NodeKind::Preterminal { .. } => &[],
        }
    }

    pub fn word(&self) -> Option<&str> {
        match &self.kind {
            NodeKind::Preterminal { word, .. } => Some(word),
            NodeKind::Nonterminal { .. } => None,
        }
    }

    pub fn token(&self) -> Option<usize> {
        match self.kind {
            NodeKind::Preterminal { token, .. } => Some(token),
            NodeKind::Nonterminal { .. } => None,
        }
    }
}

/// Owned recursive tree shape, used to build and rewrite [`ConstTree`]s.
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum Subtree {
    Phrase { label: String, children: Vec<Subtree> },
    Leaf { tag: String, word: String },
}

impl Subtree {
    pub fn phrase(label: impl Into<String>, children: Vec<Subtree>) -> Self {
        Subtree::Phrase {
            label: label.into(),
            children,
        }
    }

    pub fn leaf(tag: impl Into<String>, word: impl Into<String>) -> Self {
        Subtree::Leaf {
            tag: tag.into(),
            word: word.into(),
        }
    }

    pub fn label(&self) -> &str {
        match self {
            Subtree::Phrase { label, .. } => label,
            Subtree::Leaf { tag, .. } => tag,
        }
    }
}

#[derive(Clone, Debug, Error, PartialEq, Eq)]
pub enum TreeError {
    #[error("nonterminal '{label}' has no children")]
    ChildlessNonterminal { label: String },
    #[error("tree contains only empty elements")]
    EmptyTree,
}

/// A rooted, ordered constituency tree.
///
/// Construction always goes through [`ConstTree::from_subtree`], which lays
/// nodes out in preorder and numbers preterminals 1..n from left to right.
/// Two trees are structurally equal iff they compare equal.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ConstTree {
    nodes: Vec<Node>,
    parents: Vec<Option<NodeId>>,
    spans: Vec<(usize, usize)>,
    n_tokens: usize,
}

impl ConstTree {
    pub fn from_subtree(subtree: Subtree) -> Result<Self, TreeError> {
        let mut tree = ConstTree {
            nodes: Vec::new(),
            parents: Vec::new(),
            spans: Vec::new(),
            n_tokens: 0,
        };
        tree.push(subtree, None)?;
        Ok(tree)
    }

    fn push(&mut self, subtree: Subtree, parent: Option<NodeId>) -> Result<NodeId, TreeError> {
        let id = NodeId(self.nodes.len());
        match subtree {
            Subtree::Leaf { tag, word } => {
                self.n_tokens += 1;
                let token = self.n_tokens;
                self.nodes.push(Node {
                    label: tag,
                    kind: NodeKind::Preterminal { word, token },
                });
                self.parents.push(parent);
                self.spans.push((token, token));
            }
            Subtree::Phrase { label, children } => {
                if children.is_empty() {
                    return Err(TreeError::ChildlessNonterminal { label });
                }
                self.nodes.push(Node {
                    label,
                    kind: NodeKind::Nonterminal {
                        children: Vec::with_capacity(children.len()),
                    },
                });
                self.parents.push(parent);
                self.spans.push((0, 0));
                let start = self.n_tokens + 1;
                let mut ids = Vec::with_capacity(children.len());
                for child in children {
                    ids.push(self.push(child, Some(id))?);
                }
                self.spans[id.0] = (start, self.n_tokens);
                if let NodeKind::Nonterminal { children } = &mut self.nodes[id.0].kind {
                    *children = ids;
                }
            }
        }
        Ok(id)
    }

    pub fn root(&self) -> NodeId {
        NodeId(0)
    }

    pub fn node(&self, id: NodeId) -> &Node {
        &self.nodes[id.0]
    }

    pub fn label(&self, id: NodeId) -> &str {
        &self.nodes[id.0].label
    }

    pub fn children(&self, id: NodeId) -> &[NodeId] {
        self.nodes[id.0].children()
    }

    pub fn parent(&self, id: NodeId) -> Option<NodeId> {
        self.parents[id.0]
    }

    /// Number of nodes (nonterminals and preterminals).
    pub fn len(&self) -> usize {
        self.nodes.len()
    }

    pub fn is_empty(&self) -> bool {
        self.nodes.is_empty()
    }

    pub fn token_count(&self) -> usize {
        self.n_tokens
    }

    /// Inclusive 1-based token interval covered by `id`.
    pub fn span(&self, id: NodeId) -> (usize, usize) {
        self.spans[id.0]
    }

    pub fn node_ids(&self) -> impl Iterator<Item = NodeId> + '_ {
        (0..self.nodes.len()).map(NodeId)
    }

    /// Nonterminal nodes in preorder.
    pub fn nonterminals(&self) -> impl Iterator<Item = NodeId> + '_ {
        self.node_ids().filter(|&id| !self.node(id).is_preterminal())
    }

    /// Preterminal nodes in token order.
    pub fn preterminals(&self) -> impl Iterator<Item = NodeId> + '_ {
        self.node_ids().filter(|&id| self.node(id).is_preterminal())
    }

    pub fn words(&self) -> Vec<&str> {
        self.preterminals()
            .filter_map(|id| self.node(id).word())
            .collect()
    }

    pub fn tags(&self) -> Vec<&str> {
        self.preterminals().map(|id| self.label(id)).collect()
    }

    /// Position of `child` in its parent's child list, 1-based.
    pub fn child_position(&self, child: NodeId) -> Option<usize> {
        let parent = self.parent(child)?;
        self.children(parent)
            .iter()
            .position(|&c| c == child)
            .map(|p| p + 1)
    }

    pub fn subtree(&self, id: NodeId) -> Subtree {
        let node = self.node(id);
        match &node.kind {
            NodeKind::Preterminal { word, .. } => Subtree::leaf(node.label.clone(), word.clone()),
            NodeKind::Nonterminal { children } => Subtree::phrase(
                node.label.clone(),
                children.iter().map(|&c| self.subtree(c)).collect(),
            ),
        }
    }

    pub fn to_subtree(&self) -> Subtree {
        self.subtree(self.root())
    }

    /// Removes `-NONE-` preterminals and any nonterminal left without
    /// children, renumbering the remaining tokens.
    pub fn strip_empties(&self) -> Result<ConstTree, TreeError> {
        fn strip(tree: &ConstTree, id: NodeId) -> Option<Subtree> {
            let node = tree.node(id);
            match &node.kind {
                NodeKind::Preterminal { word, .. } => {
                    if node.label == EMPTY_ELEMENT {
                        None
                    } else {
                        Some(Subtree::leaf(node.label.clone(), word.clone()))
                    }
                }
                NodeKind::Nonterminal { children } => {
                    let kept: Vec<Subtree> =
                        children.iter().filter_map(|&c| strip(tree, c)).collect();
                    if kept.is_empty() {
                        None
                    } else {
                        Some(Subtree::phrase(node.label.clone(), kept))
                    }
                }
            }
        }
        let stripped = strip(self, self.root()).ok_or(TreeError::EmptyTree)?;
        ConstTree::from_subtree(stripped)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::bracketed::{parse_bracketed, serialize_bracketed};

    fn tree(s: &str) -> ConstTree {
        parse_bracketed(s).unwrap().remove(0)
    }

    #[test]
    fn spans_and_parents() {
        let t = tree("(S (NP (DT the) (NN dog)) (VP (VBZ barks)))");
        assert_eq!(t.len(), 6);
        assert_eq!(t.token_count(), 3);
        let nts: Vec<_> = t.nonterminals().map(|id| t.label(id)).collect();
        assert_eq!(nts, ["S", "NP", "VP"]);
        assert_eq!(t.span(NodeId(1)), (1, 2));
        assert_eq!(t.span(NodeId(4)), (3, 3));
        assert_eq!(t.parent(NodeId(3)), Some(NodeId(1)));
        assert_eq!(t.child_position(NodeId(4)), Some(2));
        assert_eq!(t.words(), ["the", "dog", "barks"]);
    }

    #[test]
    fn strip_removes_traces_and_empty_parents() {
        let t = tree("(S (NP (-NONE- *T*)) (VP (VBZ barks)))");
        let s = t.strip_empties().unwrap();
        assert_eq!(serialize_bracketed(&s), "(S (VP (VBZ barks)))");
        assert_eq!(s.token_count(), 1);
        // original untouched
        assert_eq!(t.token_count(), 2);
    }

    #[test]
    fn strip_is_noop_without_empties() {
        let t = tree("(S (NP (DT the) (NN dog)) (VP (VBZ barks)))");
        assert_eq!(t.strip_empties().unwrap(), t);
    }

    #[test]
    fn strip_everything_is_an_error() {
        let t = tree("(S (NP (-NONE- *)))");
        assert_eq!(t.strip_empties(), Err(TreeError::EmptyTree));
    }

    #[test]
    fn childless_phrase_rejected() {
        let err = ConstTree::from_subtree(Subtree::phrase("NP", vec![])).unwrap_err();
        assert!(matches!(err, TreeError::ChildlessNonterminal { .. }));
    }
}
