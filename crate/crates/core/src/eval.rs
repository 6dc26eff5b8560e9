//! Head accuracy, labeled bracket scores, attachment scores and treebank
//! comparison.

use std::collections::BTreeMap;

use thiserror::Error;

use crate::conll::DepGraph;
use crate::heads::HeadAssignment;
use crate::label::{is_intermediate, normalize_label};
use crate::transform::DelimiterConfig;
use crate::tree::ConstTree;

#[derive(Clone, Debug, Error, PartialEq, Eq)]
pub enum EvalError {
    #[error("corpus sizes differ: {gold} gold vs {pred} predicted sentences")]
    CorpusSizeMismatch { gold: usize, pred: usize },
    #[error("sentence {sentence}: gold and predicted assignments cover different nodes")]
    NodeSetMismatch { sentence: usize },
    #[error("sentence {sentence}: {gold} gold tokens vs {pred} predicted tokens")]
    TokenCountMismatch { sentence: usize, gold: usize, pred: usize },
    #[error("sentence {sentence}: {gold} gold tokens vs {pred} predicted tokens")]
    LengthMismatch { sentence: usize, gold: usize, pred: usize },
}

fn same_size(gold: usize, pred: usize) -> Result<(), EvalError> {
    if gold == pred {
        Ok(())
    } else {
        Err(EvalError::CorpusSizeMismatch { gold, pred })
    }
}

fn ratio(num: usize, den: usize) -> f64 {
    if den == 0 {
        f64::NAN
    } else {
        num as f64 / den as f64
    }
}

#[derive(Clone, Copy, Debug, Default, PartialEq, Eq)]
pub struct Count {
    pub correct: usize,
    pub total: usize,
}

impl Count {
    /// Fraction correct; NaN when nothing was counted.
    pub fn accuracy(&self) -> f64 {
        ratio(self.correct, self.total)
    }

    fn add(&mut self, ok: bool) {
        self.total += 1;
        self.correct += usize::from(ok);
    }
}

#[derive(Clone, Debug, Default, PartialEq)]
pub struct HeadAccuracy {
    pub overall: Count,
    /// Keyed on the normalized parent label.
    pub by_category: BTreeMap<String, Count>,
}

impl HeadAccuracy {
    pub fn accuracy(&self) -> f64 {
        self.overall.accuracy()
    }

    pub fn category(&self, label: &str) -> Option<f64> {
        self.by_category.get(label).map(Count::accuracy)
    }
}

pub fn head_accuracy(
    gold: &[HeadAssignment],
    pred: &[HeadAssignment],
    trees: &[ConstTree],
) -> Result<HeadAccuracy, EvalError> {
    same_size(gold.len(), pred.len())?;
    same_size(gold.len(), trees.len())?;
    let mut acc = HeadAccuracy::default();
    for (s, ((g, p), tree)) in gold.iter().zip(pred).zip(trees).enumerate() {
        if !g.iter().map(|(n, _)| n).eq(p.iter().map(|(n, _)| n)) {
            return Err(EvalError::NodeSetMismatch { sentence: s });
        }
        for ((node, gh), (_, ph)) in g.iter().zip(p.iter()) {
            if node.0 >= tree.len() {
                return Err(EvalError::NodeSetMismatch { sentence: s });
            }
            let ok = gh == ph;
            acc.overall.add(ok);
            acc.by_category
                .entry(normalize_label(tree.label(node)).to_string())
                .or_default()
                .add(ok);
        }
    }
    Ok(acc)
}

#[derive(Clone, Debug)]
#[derive(Default)]
pub struct BracketOptions {
    /// Score `@`-labeled brackets too.
    pub include_intermediate: bool,
    /// Legacy scoring: drop punctuation tokens before computing spans.
    pub exclude_punct: bool,
    /// Supplies the punctuation tags for `exclude_punct`.
    pub delimiters: DelimiterConfig,
}


/// Bracket scores in percent.
#[derive(Clone, Debug, Default, PartialEq)]
pub struct BracketScore {
    pub precision: f64,
    pub recall: f64,
    pub f1: f64,
    pub complete_match: f64,
    pub matched: usize,
    pub gold_brackets: usize,
    pub pred_brackets: usize,
    pub sentences: usize,
    pub complete_matches: usize,
}

fn percent(num: usize, den: usize, other_empty: bool) -> f64 {
    if den == 0 {
        if other_empty {
            100.0
        } else {
            0.0
        }
    } else {
        100.0 * num as f64 / den as f64
    }
}

type Bracket = (String, usize, usize);

/// Multiset of (normalized label, start, end) over nonterminals.
pub fn brackets(tree: &ConstTree, opts: &BracketOptions) -> BTreeMap<Bracket, usize> {
    // token index -> index among kept tokens
    let mut kept = vec![0usize; tree.token_count() + 1];
    let mut next = 0;
    for (i, tag) in tree.tags().into_iter().enumerate() {
        if !(opts.exclude_punct && opts.delimiters.is_punct_tag(tag)) {
            next += 1;
            kept[i + 1] = next;
        }
    }
    let mut out = BTreeMap::new();
    for id in tree.nonterminals() {
        let label = normalize_label(tree.label(id));
        if !opts.include_intermediate && is_intermediate(label) {
            continue;
        }
        let (lo, hi) = tree.span(id);
        let inner: Vec<usize> = (lo..=hi).map(|t| kept[t]).filter(|&k| k > 0).collect();
        let (Some(&start), Some(&end)) = (inner.first(), inner.last()) else {
            continue;
        };
        *out.entry((label.to_string(), start, end)).or_insert(0) += 1;
    }
    out
}

fn intersection(a: &BTreeMap<Bracket, usize>, b: &BTreeMap<Bracket, usize>) -> usize {
    a.iter().map(|(k, n)| (*n).min(b.get(k).copied().unwrap_or(0))).sum()
}

pub fn bracket_prf(
    gold: &[ConstTree],
    pred: &[ConstTree],
    opts: &BracketOptions,
) -> Result<BracketScore, EvalError> {
    same_size(gold.len(), pred.len())?;
    let mut score = BracketScore {
        sentences: gold.len(),
        ..BracketScore::default()
    };
    for (s, (g, p)) in gold.iter().zip(pred).enumerate() {
        if g.token_count() != p.token_count() {
            return Err(EvalError::TokenCountMismatch {
                sentence: s,
                gold: g.token_count(),
                pred: p.token_count(),
            });
        }
        let gb = brackets(g, opts);
        let pb = brackets(p, opts);
        score.matched += intersection(&gb, &pb);
        score.gold_brackets += gb.values().sum::<usize>();
        score.pred_brackets += pb.values().sum::<usize>();
        score.complete_matches += usize::from(gb == pb);
    }
    score.precision = percent(score.matched, score.pred_brackets, score.gold_brackets == 0);
    score.recall = percent(score.matched, score.gold_brackets, score.pred_brackets == 0);
    score.f1 = if score.precision + score.recall == 0.0 {
        0.0
    } else {
        2.0 * score.precision * score.recall / (score.precision + score.recall)
    };
    score.complete_match = percent(score.complete_matches, score.sentences, true);
    Ok(score)
}

/// Attachment counts; punctuation is decided by the gold POS tag.
pub fn uas_counts(
    gold: &[DepGraph],
    pred: &[DepGraph],
    exclude_punct: Option<&DelimiterConfig>,
) -> Result<Count, EvalError> {
    same_size(gold.len(), pred.len())?;
    let mut count = Count::default();
    for (s, (g, p)) in gold.iter().zip(pred).enumerate() {
        if g.n() != p.n() {
            return Err(EvalError::LengthMismatch {
                sentence: s,
                gold: g.n(),
                pred: p.n(),
            });
        }
        for i in 1..=g.n() {
            if exclude_punct.is_some_and(|d| d.is_punct_tag(g.pos(i))) {
                continue;
            }
            count.add(g.head(i) == p.head(i));
        }
    }
    Ok(count)
}

/// Micro-averaged unlabeled attachment score as a fraction, punctuation
/// included. NaN for an empty corpus.
pub fn uas(gold: &[DepGraph], pred: &[DepGraph]) -> Result<f64, EvalError> {
    uas_counts(gold, pred, None).map(|c| c.accuracy())
}

#[derive(Clone, Debug, PartialEq)]
pub struct TreebankDiff {
    /// Bracket scores with `@` brackets included, `a` as reference.
    pub brackets: BracketScore,
    /// Percent of sentence pairs that are structurally identical.
    pub identical: f64,
    /// Indices of the first divergent sentence pairs.
    pub divergent: Vec<usize>,
}

/// Compares two binarized versions of the same treebank.
pub fn treebank_diff(a: &[ConstTree], b: &[ConstTree], max_examples: usize) -> Result<TreebankDiff, EvalError> {
    let opts = BracketOptions {
        include_intermediate: true,
        ..BracketOptions::default()
    };
    let brackets = bracket_prf(a, b, &opts)?;
    let mut same = 0;
    let mut divergent = Vec::new();
    for (i, (x, y)) in a.iter().zip(b).enumerate() {
        if x == y {
            same += 1;
        } else if divergent.len() < max_examples {
            divergent.push(i);
        }
    }
    Ok(TreebankDiff {
        identical: percent(same, a.len(), true),
        brackets,
        divergent,
    })
}
