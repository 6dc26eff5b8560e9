//! Gold head children from aligned dependency structure.
//!
//! For a nonterminal `v` the span-head candidates are the tokens of
//! `yield(v)` whose governor lies outside `yield(v)` (the artificial root
//! counts as outside). When there is exactly one candidate, the head child
//! of `v` is the child whose yield contains it. A sentence in which some
//! nonterminal has zero or several candidates yields no supervision.

use crate::align::AlignedSentence;
use crate::heads::HeadAssignment;
use crate::tree::NodeId;

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct InductionFailure {
    pub node: NodeId,
    pub candidate_count: usize,
}

/// Either a complete assignment or the first (preorder) failing node.
pub type InductionResult = Result<HeadAssignment, InductionFailure>;

/// Tokens of `node`'s yield governed from outside the yield, ascending.
pub fn span_head_candidates(sentence: &AlignedSentence, node: NodeId) -> Vec<usize> {
    let (lo, hi) = sentence.tree.span(node);
    (lo..=hi)
        .filter(|&i| {
            let g = sentence.dep.head(i);
            g == 0 || g < lo || g > hi
        })
        .collect()
}

fn head_index(sentence: &AlignedSentence, node: NodeId, span_head: usize) -> usize {
    let tree = &sentence.tree;
    tree.children(node)
        .iter()
        .position(|&c| {
            let (lo, hi) = tree.span(c);
            lo <= span_head && span_head <= hi
        })
        .expect("yields of children partition the parent's yield")
        + 1
}

pub fn induce_heads(sentence: &AlignedSentence) -> InductionResult {
    let mut heads = HeadAssignment::new();
    for node in sentence.tree.nonterminals() {
        match span_head_candidates(sentence, node).as_slice() {
            [span_head] => heads.insert(node, head_index(sentence, node, *span_head)),
            other => {
                return Err(InductionFailure {
                    node,
                    candidate_count: other.len(),
                })
            }
        }
    }
    Ok(heads)
}

/// Every nonterminal whose candidate set is not a singleton, in preorder.
pub fn induction_failures(sentence: &AlignedSentence) -> Vec<InductionFailure> {
    sentence
        .tree
        .nonterminals()
        .filter_map(|node| {
            let count = span_head_candidates(sentence, node).len();
            (count != 1).then_some(InductionFailure {
                node,
                candidate_count: count,
            })
        })
        .collect()
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct InductionExclusion {
    pub sentence: usize,
    pub node: NodeId,
    pub candidate_count: usize,
}

#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct CorpusInduction {
    /// Input index and assignment of every sentence that passed.
    pub heads: Vec<(usize, HeadAssignment)>,
    pub excluded: Vec<InductionExclusion>,
}

pub fn induce_corpus(sentences: &[AlignedSentence]) -> CorpusInduction {
    let mut out = CorpusInduction::default();
    for (index, sentence) in sentences.iter().enumerate() {
        match induce_heads(sentence) {
            Ok(heads) => out.heads.push((index, heads)),
            Err(f) => out.excluded.push(InductionExclusion {
                sentence: index,
                node: f.node,
                candidate_count: f.candidate_count,
            }),
        }
    }
    out
}
