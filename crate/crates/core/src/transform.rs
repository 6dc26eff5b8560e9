//! Punctuation-aware normalization, head-driven binarization and
//! debinarization.
//!
//! Both normalization and binarization only ever insert nodes whose label
//! starts with `@`; [`debinarize`] splices every such node away, which
//! makes the pipeline reversible.

use std::collections::{BTreeMap, BTreeSet};

use thiserror::Error;

use crate::heads::{HeadAssignment, HeadChooser};
use crate::label::{base_label, intermediate_label, is_intermediate, normalize_label};
use crate::tree::{ConstTree, NodeId, NodeKind, Subtree};

#[derive(Clone, Debug, Error, PartialEq, Eq)]
pub enum TransformError {
    #[error("no head for nonterminal {0}")]
    MissingHead(NodeId),
    #[error("head index {index} out of range for node {node} with {arity} children")]
    HeadOutOfRange {
        node: NodeId,
        index: usize,
        arity: usize,
    },
    #[error("root node is an intermediate (@) node")]
    RootIsIntermediate,
    #[error("head assignment does not match the debinarized tree")]
    HeadTreeMismatch,
}

/// Delimiter inventories used by [`normalize_punct`].
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct DelimiterConfig {
    /// Opening form to closing form.
    pub pair_map: BTreeMap<String, String>,
    /// Forms attached to the preceding sibling when unpaired, in addition
    /// to the closing forms of `pair_map`.
    pub unpaired_right: BTreeSet<String>,
    /// POS tags of punctuation preterminals.
    pub punct_tags: BTreeSet<String>,
}

impl Default for DelimiterConfig {
    fn default() -> Self {
        let pairs = [
            ("(", ")"),
            ("[", "]"),
            ("{", "}"),
            ("“", "”"),
            ("‘", "’"),
            ("«", "»"),
            ("``", "''"),
            ("-LRB-", "-RRB-"),
            ("-LSB-", "-RSB-"),
            ("-LCB-", "-RCB-"),
        ];
        let unpaired = [".", ",", ";", ":", "!", "?", "…"];
        let tags = [".", ",", ":", "``", "''", "-LRB-", "-RRB-", "PU"];
        DelimiterConfig {
            pair_map: pairs
                .iter()
                .map(|(l, r)| (l.to_string(), r.to_string()))
                .collect(),
            unpaired_right: unpaired.iter().map(|s| s.to_string()).collect(),
            punct_tags: tags.iter().map(|s| s.to_string()).collect(),
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
enum Delim<'a> {
    Open(&'a str),
    Close,
}

impl DelimiterConfig {
    /// `true` when no form is both an opening and a closing delimiter.
    pub fn is_consistent(&self) -> bool {
        self.pair_map.values().all(|v| !self.pair_map.contains_key(v))
    }

    pub fn is_punct_tag(&self, tag: &str) -> bool {
        self.punct_tags.contains(tag)
    }

    fn classify<'a>(&'a self, item: &Subtree) -> Option<Delim<'a>> {
        let Subtree::Leaf { tag, word } = item else {
            return None;
        };
        if !self.is_punct_tag(tag) {
            return None;
        }
        if let Some(close) = self.pair_map.get(word.as_str()) {
            Some(Delim::Open(close))
        } else if self.unpaired_right.contains(word) || self.pair_map.values().any(|v| v == word) {
            Some(Delim::Close)
        } else {
            None
        }
    }
}

fn word_of(item: &Subtree) -> Option<&str> {
    match item {
        Subtree::Leaf { word, .. } => Some(word),
        Subtree::Phrase { .. } => None,
    }
}

/// Integrates delimiters into the constituent structure.
///
/// Within every child list, a matched pair of delimiters is wrapped together
/// with everything between them into an `@`-node (unless that would cover
/// the whole list). Remaining unpaired opening delimiters are wrapped with
/// their following sibling, unpaired closing ones with their preceding
/// sibling. Token order is unchanged.
pub fn normalize_punct(tree: &ConstTree, cfg: &DelimiterConfig) -> ConstTree {
    let normalized = normalize_subtree(tree.to_subtree(), cfg);
    ConstTree::from_subtree(normalized).expect("normalization never empties a node")
}

fn normalize_subtree(subtree: Subtree, cfg: &DelimiterConfig) -> Subtree {
    match subtree {
        leaf @ Subtree::Leaf { .. } => leaf,
        Subtree::Phrase { label, children } => {
            let children = children
                .into_iter()
                .map(|c| normalize_subtree(c, cfg))
                .collect();
            let wrapper = intermediate_label(&label);
            Subtree::Phrase {
                children: group_delimiters(children, &wrapper, cfg),
                label,
            }
        }
    }
}

fn matching_close(items: &[Subtree], open_at: usize, close: &str, cfg: &DelimiterConfig) -> Option<usize> {
    let open = word_of(&items[open_at])?;
    let mut depth = 0usize;
    for (j, item) in items.iter().enumerate().skip(open_at + 1) {
        if cfg.classify(item).is_none() {
            continue;
        }
        let word = word_of(item)?;
        if word == close {
            if depth == 0 {
                return Some(j);
            }
            depth -= 1;
        } else if word == open {
            depth += 1;
        }
    }
    None
}

fn group_delimiters(items: Vec<Subtree>, wrapper: &str, cfg: &DelimiterConfig) -> Vec<Subtree> {
    let n = items.len();
    // (item, is a delimiter already matched in this list)
    let mut out: Vec<(Subtree, bool)> = Vec::with_capacity(n);
    let snapshot = items.clone();
    let mut items: Vec<Option<Subtree>> = items.into_iter().map(Some).collect();

    let mut i = 0;
    while i < n {
        if let Some(Delim::Open(close)) = cfg.classify(&snapshot[i]) {
            if let Some(j) = matching_close(&snapshot, i, close, cfg) {
                if i == 0 && j == n - 1 {
                    // a pair spanning the whole list: leave it in place
                    out.push((items[i].take().unwrap(), true));
                    let last = items[j].take().unwrap();
                    let inner: Vec<Subtree> = items[i + 1..j].iter_mut().map(|x| x.take().unwrap()).collect();
                    out.extend(group_delimiters(inner, wrapper, cfg).into_iter().map(|s| (s, false)));
                    out.push((last, true));
                    break;
                }
                let open = items[i].take().unwrap();
                let close_item = items[j].take().unwrap();
                let inner: Vec<Subtree> = items[i + 1..j].iter_mut().map(|x| x.take().unwrap()).collect();
                let mut wrapped = vec![open];
                wrapped.extend(group_delimiters(inner, wrapper, cfg));
                wrapped.push(close_item);
                out.push((Subtree::phrase(wrapper, wrapped), false));
                i = j + 1;
                continue;
            }
        }
        out.push((items[i].take().unwrap(), false));
        i += 1;
    }

    // unpaired opening delimiters join their following sibling
    let mut p = out.len();
    while p > 0 {
        p -= 1;
        let is_open = !out[p].1 && matches!(cfg.classify(&out[p].0), Some(Delim::Open(_)));
        if is_open && p + 1 < out.len() && out.len() > 2 {
            let (next, _) = out.remove(p + 1);
            let (open, _) = out.remove(p);
            out.insert(p, (Subtree::phrase(wrapper, vec![open, next]), false));
        }
    }

    // unpaired closing delimiters join their preceding sibling
    let mut p = 0;
    while p < out.len() {
        let is_close = !out[p].1 && matches!(cfg.classify(&out[p].0), Some(Delim::Close));
        if is_close && p > 0 && out.len() > 2 {
            let (close, _) = out.remove(p);
            let (prev, _) = out.remove(p - 1);
            out.insert(p - 1, (Subtree::phrase(wrapper, vec![prev, close]), false));
        } else {
            p += 1;
        }
    }

    out.into_iter().map(|(s, _)| s).collect()
}

fn is_intermediate_node(tree: &ConstTree, id: NodeId) -> bool {
    !tree.node(id).is_preterminal() && is_intermediate(tree.label(id))
}

/// Whether the tree contains any `@` nonterminal.
pub fn has_intermediate_nodes(tree: &ConstTree) -> bool {
    tree.node_ids().any(|id| is_intermediate_node(tree, id))
}

/// Preorder rank of every non-`@` node among the non-`@` nodes, which is
/// its id in the debinarized tree.
fn debinarized_ids(tree: &ConstTree) -> Vec<Option<NodeId>> {
    let mut next = 0;
    tree.node_ids()
        .map(|id| {
            if is_intermediate_node(tree, id) {
                None
            } else {
                next += 1;
                Some(NodeId(next - 1))
            }
        })
        .collect()
}

/// Splices every `@` nonterminal into its parent, bottom-up.
pub fn debinarize(tree: &ConstTree) -> Result<ConstTree, TransformError> {
    if is_intermediate_node(tree, tree.root()) {
        return Err(TransformError::RootIsIntermediate);
    }
    fn splice(tree: &ConstTree, id: NodeId, out: &mut Vec<Subtree>) {
        let node = tree.node(id);
        match &node.kind {
            NodeKind::Preterminal { word, .. } => out.push(Subtree::leaf(node.label.clone(), word.clone())),
            NodeKind::Nonterminal { children } => {
                if is_intermediate(&node.label) {
                    for &c in children {
                        splice(tree, c, out);
                    }
                } else {
                    let mut kids = Vec::with_capacity(children.len());
                    for &c in children {
                        splice(tree, c, &mut kids);
                    }
                    out.push(Subtree::phrase(node.label.clone(), kids));
                }
            }
        }
    }
    let mut out = Vec::with_capacity(1);
    splice(tree, tree.root(), &mut out);
    Ok(ConstTree::from_subtree(out.pop().unwrap()).expect("splicing keeps children"))
}

fn checked_head(tree: &ConstTree, heads: &HeadAssignment, node: NodeId) -> Result<usize, TransformError> {
    let index = heads.get(node).ok_or(TransformError::MissingHead(node))?;
    let arity = tree.children(node).len();
    if index == 0 || index > arity {
        return Err(TransformError::HeadOutOfRange { node, index, arity });
    }
    Ok(index)
}

/// Debinarizes `tree` and carries `heads` over: the head child of a
/// surviving node becomes the child reached by following head children
/// down through `@` nodes.
pub fn debinarize_with_heads(
    tree: &ConstTree,
    heads: &HeadAssignment,
) -> Result<(ConstTree, HeadAssignment), TransformError> {
    let flat = debinarize(tree)?;
    let ids = debinarized_ids(tree);
    let mut lowered = HeadAssignment::new();
    for v in tree.nonterminals() {
        let Some(flat_v) = ids[v.0] else { continue };
        let mut c = tree.children(v)[checked_head(tree, heads, v)? - 1];
        while is_intermediate_node(tree, c) {
            c = tree.children(c)[checked_head(tree, heads, c)? - 1];
        }
        let flat_c = ids[c.0].expect("non-intermediate node");
        let index = flat
            .children(flat_v)
            .iter()
            .position(|&x| x == flat_c)
            .ok_or(TransformError::HeadTreeMismatch)?
            + 1;
        lowered.insert(flat_v, index);
    }
    Ok((flat, lowered))
}

/// Carries heads given on `debinarize(tree)` onto `tree`, which may contain
/// `@` nodes from [`normalize_punct`].
///
/// A surviving node heads the child that contains its original head child,
/// and so does every `@` node on that path. Any other `@` node heads its
/// only non-punctuation child; with several non-punctuation children,
/// `chooser` decides on the configuration relabeled with the original
/// category, or else the leftmost non-punctuation child is taken.
pub fn lift_heads(
    tree: &ConstTree,
    base: &HeadAssignment,
    cfg: &DelimiterConfig,
    chooser: Option<&dyn HeadChooser>,
) -> Result<HeadAssignment, TransformError> {
    if is_intermediate_node(tree, tree.root()) {
        return Err(TransformError::RootIsIntermediate);
    }
    let flat = debinarize(tree)?;
    let ids = debinarized_ids(tree);
    let mut back = vec![NodeId(0); flat.len()];
    for (id, flat_id) in ids.iter().enumerate() {
        if let Some(f) = flat_id {
            back[f.0] = NodeId(id);
        }
    }

    let child_towards = |v: NodeId, mut target: NodeId| -> usize {
        while tree.parent(target) != Some(v) {
            target = tree.parent(target).expect("target lies below v");
        }
        tree.child_position(target).unwrap()
    };

    let mut lifted = HeadAssignment::new();
    // head target (a node in `tree`) of the nearest surviving ancestor
    let mut targets: BTreeMap<NodeId, NodeId> = BTreeMap::new();
    for v in tree.nonterminals() {
        if let Some(flat_v) = ids[v.0] {
            let index = checked_head(&flat, base, flat_v)?;
            let target = back[flat.children(flat_v)[index - 1].0];
            targets.insert(v, target);
            lifted.insert(v, child_towards(v, target));
            continue;
        }

        let mut anc = tree.parent(v).expect("root is not intermediate");
        while is_intermediate_node(tree, anc) {
            anc = tree.parent(anc).unwrap();
        }
        let target = targets[&anc];
        let (lo, hi) = tree.span(v);
        let (tlo, thi) = tree.span(target);
        if lo <= tlo && thi <= hi {
            // on the head path of the enclosing constituent
            lifted.insert(v, child_towards(v, target));
            continue;
        }

        let children = tree.children(v);
        let contentful: Vec<usize> = children
            .iter()
            .enumerate()
            .filter(|(_, &c)| !(tree.node(c).is_preterminal() && cfg.is_punct_tag(tree.label(c))))
            .map(|(i, _)| i + 1)
            .collect();
        let index = if contentful.len() == 1 {
            contentful[0]
        } else if let Some(chooser) = chooser {
            let parent = normalize_label(base_label(tree.label(v)));
            let labels: Vec<&str> = children.iter().map(|&c| normalize_label(tree.label(c))).collect();
            chooser.choose(parent, &labels).clamp(1, children.len())
        } else {
            contentful.first().copied().unwrap_or(1)
        };
        lifted.insert(v, index);
    }
    Ok(lifted)
}

/// Head-driven binarization.
///
/// Starting from the head child, siblings to its right are folded in from
/// the innermost outwards, then siblings to its left. Every fold creates an
/// `@`-labeled node except the last, which keeps the original label. Unary
/// `@` nodes in the input are collapsed.
pub fn binarize(tree: &ConstTree, heads: &HeadAssignment) -> Result<ConstTree, TransformError> {
    fn bin(tree: &ConstTree, heads: &HeadAssignment, id: NodeId) -> Result<Subtree, TransformError> {
        let node = tree.node(id);
        let children = match &node.kind {
            NodeKind::Preterminal { word, .. } => return Ok(Subtree::leaf(node.label.clone(), word.clone())),
            NodeKind::Nonterminal { children } => children,
        };
        let head = checked_head(tree, heads, id)?;
        let mut kids = children
            .iter()
            .map(|&c| bin(tree, heads, c))
            .collect::<Result<Vec<_>, _>>()?;
        if kids.len() == 1 && is_intermediate(&node.label) && id != tree.root() {
            return Ok(kids.pop().unwrap());
        }
        if kids.len() <= 2 {
            return Ok(Subtree::phrase(node.label.clone(), kids));
        }

        let k = kids.len();
        let inter = intermediate_label(&node.label);
        let mut slots: Vec<Option<Subtree>> = kids.into_iter().map(Some).collect();
        let mut spine = slots[head - 1].take().unwrap();
        let mut folds = 0;
        let total = k - 1;
        let label_for = |folds: usize| {
            if folds == total {
                node.label.clone()
            } else {
                inter.clone()
            }
        };
        for slot in slots.iter_mut().skip(head) {
            folds += 1;
            spine = Subtree::phrase(label_for(folds), vec![spine, slot.take().unwrap()]);
        }
        for slot in slots[..head - 1].iter_mut().rev() {
            folds += 1;
            spine = Subtree::phrase(label_for(folds), vec![slot.take().unwrap(), spine]);
        }
        Ok(spine)
    }
    let root = bin(tree, heads, tree.root())?;
    Ok(ConstTree::from_subtree(root).expect("binarization keeps children"))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::bracketed::{parse_bracketed, serialize_bracketed};
    use crate::heads::{assign_heads, FixedChooser};
    use crate::synthetic::{random_heads, random_tree, RandomTreeConfig};
    use proptest::prelude::*;
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    fn tree(s: &str) -> ConstTree {
        parse_bracketed(s).unwrap().remove(0)
    }

    fn heads(t: &ConstTree, pairs: &[(usize, usize)]) -> HeadAssignment {
        let h: HeadAssignment = pairs.iter().map(|&(n, h)| (NodeId(n), h)).collect();
        h.validate(t).unwrap();
        h
    }

    fn norm(s: &str) -> String {
        serialize_bracketed(&normalize_punct(&tree(s), &DelimiterConfig::default()))
    }

    #[test]
    fn wraps_matched_pairs() {
        assert_eq!(
            norm("(NP (NN fish) (-LRB- () (JJ raw) (-RRB- )))"),
            "(NP (NN fish) (@NP (-LRB- () (JJ raw) (-RRB- ))))"
        );
    }

    #[test]
    fn unpaired_right_joins_preceding() {
        assert_eq!(
            norm("(S (NP (NN dogs)) (VP (VBP bark)) (. .))"),
            "(S (NP (NN dogs)) (@S (VP (VBP bark)) (. .)))"
        );
    }

    #[test]
    fn unpaired_left_joins_following() {
        assert_eq!(
            norm("(S (NP (NN a)) (-LRB- () (NP (NN b)) (VP (VB c)))"),
            "(S (NP (NN a)) (@S (-LRB- () (NP (NN b))) (VP (VB c)))"
        );
    }

    #[test]
    fn no_vacuous_wraps() {
        let s = "(NP (-LRB- () (NN x) (-RRB- )))";
        assert_eq!(norm(s), s);
        let s = "(S (NP (NN x)) (. .))";
        assert_eq!(norm(s), s);
        let s = "(S (, ,) (NP (NN x)) (VP (VB y)))";
        assert_eq!(norm(s), s, "closing delimiter with nothing before it stays");
        let s = "(S (NP (DT the) (NN dog)) (VP (VBZ barks)))";
        assert_eq!(norm(s), s);
    }

    #[test]
    fn nested_pairs_and_inner_punctuation() {
        assert_eq!(
            norm("(S (A a) (`` ``) (B b) (-LRB- -LRB-) (C c) (-RRB- -RRB-) ('' '') (D d))"),
            "(S (A a) (@S (`` ``) (B b) (@S (-LRB- -LRB-) (C c) (-RRB- -RRB-)) ('' '')) (D d))"
        );
        assert_eq!(
            norm("(S (A a) (-LRB- () (B b) (C c) (. .) (-RRB- )) (D d))"),
            "(S (A a) (@S (-LRB- () (B b) (@S (C c) (. .)) (-RRB- ))) (D d))"
        );
    }

    #[test]
    fn default_config_is_consistent() {
        assert!(DelimiterConfig::default().is_consistent());
    }

    #[test]
    fn binarize_head_in_middle() {
        let t = tree("(X (A a) (B b) (C c) (D d))");
        let b = binarize(&t, &heads(&t, &[(0, 2)])).unwrap();
        assert_eq!(
            serialize_bracketed(&b),
            "(X (A a) (@X (@X (B b) (C c)) (D d)))"
        );
        assert_eq!(debinarize(&b).unwrap(), t);
    }

    #[test]
    fn binarize_head_last() {
        let t = tree("(X (A a) (B b) (C c))");
        let b = binarize(&t, &heads(&t, &[(0, 3)])).unwrap();
        assert_eq!(serialize_bracketed(&b), "(X (A a) (@X (B b) (C c)))");
        let b = binarize(&t, &heads(&t, &[(0, 1)])).unwrap();
        assert_eq!(serialize_bracketed(&b), "(X (@X (A a) (B b)) (C c))");
    }

    #[test]
    fn binary_nodes_unchanged() {
        let t = tree("(S (NP (DT the) (NN dog)) (VP (VBZ barks)))");
        let h = assign_heads(&FixedChooser::Leftmost, &t);
        assert_eq!(binarize(&t, &h).unwrap(), t);
    }

    #[test]
    fn binarize_requires_heads() {
        let t = tree("(X (A a) (B b) (C c))");
        assert_eq!(
            binarize(&t, &HeadAssignment::new()),
            Err(TransformError::MissingHead(NodeId(0)))
        );
    }

    #[test]
    fn unary_intermediate_collapsed() {
        let t = tree("(X (@X (A a)) (B b))");
        let h = assign_heads(&FixedChooser::Leftmost, &t);
        assert_eq!(serialize_bracketed(&binarize(&t, &h).unwrap()), "(X (A a) (B b))");
    }

    #[test]
    fn debinarize_flattens_nested() {
        let t = tree("(X (@X (@X (@X (A a) (B b)) (C c)) (D d)) (E e))");
        assert_eq!(
            serialize_bracketed(&debinarize(&t).unwrap()),
            "(X (A a) (B b) (C c) (D d) (E e))"
        );
        let plain = tree("(S (NP (NN x)) (VP (VB y)))");
        assert_eq!(debinarize(&plain).unwrap(), plain);
        assert_eq!(
            debinarize(&tree("(@X (A a) (B b))")),
            Err(TransformError::RootIsIntermediate)
        );
    }

    #[test]
    fn lowered_heads_follow_spine() {
        let t = tree("(X (A a) (B b) (C c) (D d))");
        for head in 1..=4 {
            let h = heads(&t, &[(0, head)]);
            let b = binarize(&t, &h).unwrap();
            // the head child of every fold is the one holding the seed token
            let bh = spine_heads(&b, head);
            let (flat, lowered) = debinarize_with_heads(&b, &bh).unwrap();
            assert_eq!(flat, t);
            assert_eq!(lowered, h);
        }
    }

    /// Heads on a binarized 4-ary node pointing at the child that contains
    /// token `seed`.
    fn spine_heads(b: &ConstTree, seed: usize) -> HeadAssignment {
        b.nonterminals()
            .map(|v| {
                let pos = b
                    .children(v)
                    .iter()
                    .position(|&c| {
                        let (lo, hi) = b.span(c);
                        lo <= seed && seed <= hi
                    })
                    .unwrap();
                (v, pos + 1)
            })
            .collect()
    }

    #[test]
    fn lift_heads_through_punctuation() {
        let cfg = DelimiterConfig::default();
        let t = tree("(S (NP (NN dogs)) (VP (VBP bark)) (. .))");
        let n = normalize_punct(&t, &cfg);
        let base = heads(&t, &[(0, 2), (1, 1), (3, 1)]);
        let lifted = lift_heads(&n, &base, &cfg, None).unwrap();
        lifted.validate(&n).unwrap();
        // S -> @S (2), @S -> VP (1)
        assert_eq!(lifted.get(NodeId(0)), Some(2));
        assert_eq!(lifted.get(NodeId(3)), Some(1));
        let b = binarize(&n, &lifted).unwrap();
        let (flat, lowered) = debinarize_with_heads(&b, &carry(&n, &lifted, &b)).unwrap();
        assert_eq!(flat, t);
        assert_eq!(lowered, base);
    }

    /// Heads for a binarization of `n` under `h`, recovered by span
    /// containment of each node's lexical head token.
    fn carry(n: &ConstTree, h: &HeadAssignment, b: &ConstTree) -> HeadAssignment {
        let mut head_token = vec![0; n.len()];
        for id in n.node_ids().collect::<Vec<_>>().into_iter().rev() {
            head_token[id.0] = match n.node(id).token() {
                Some(t) => t,
                None => head_token[h.head_child(n, id).unwrap().0],
            };
        }
        // every node of b has the same span as some node of n or is an @
        // fold whose head token is that of its enclosing original node
        let mut by_span = BTreeMap::new();
        for id in n.node_ids() {
            by_span.entry(n.span(id)).or_insert(head_token[id.0]);
        }
        b.nonterminals()
            .map(|v| {
                let mut anc = v;
                while !by_span.contains_key(&b.span(anc)) {
                    anc = b.parent(anc).unwrap();
                }
                let tok = by_span[&b.span(anc)];
                let pos = b
                    .children(v)
                    .iter()
                    .position(|&c| {
                        let (lo, hi) = b.span(c);
                        lo <= tok && tok <= hi
                    })
                    .unwrap();
                (v, pos + 1)
            })
            .collect()
    }

    proptest! {
        #[test]
        fn roundtrips_and_arity(seed in any::<u64>()) {
            let cfg = DelimiterConfig::default();
            let mut rng = ChaCha8Rng::seed_from_u64(seed);
            let t = random_tree(&mut rng, &RandomTreeConfig::default());
            let h = random_heads(&mut rng, &t);
            let b = binarize(&t, &h).unwrap();
            prop_assert!(b.node_ids().all(|id| b.children(id).len() <= 2));
            prop_assert_eq!(b.words(), t.words());
            prop_assert_eq!(debinarize(&b).unwrap(), t.clone());

            let n = normalize_punct(&t, &cfg);
            prop_assert_eq!(n.words(), t.words());
            prop_assert_eq!(debinarize(&n).unwrap(), t.clone());
            let hn = random_heads(&mut rng, &n);
            let bn = binarize(&n, &hn).unwrap();
            prop_assert!(bn.node_ids().all(|id| bn.children(id).len() <= 2));
            prop_assert_eq!(debinarize(&bn).unwrap(), t.clone());

            let lifted = lift_heads(&n, &h, &cfg, None).unwrap();
            prop_assert!(lifted.validate(&n).is_ok());
            let (flat, lowered) = debinarize_with_heads(&n, &lifted).unwrap();
            prop_assert_eq!(flat, t.clone());
            prop_assert_eq!(lowered, h);
        }
    }
}
