//! Random trees and a small generative grammar with a known head
//! convention, used for testing and for desk-scale experiments.

use std::collections::BTreeMap;

use rand::distributions::{Distribution, WeightedIndex};
use rand::seq::SliceRandom;
use rand::Rng;

use crate::heads::HeadAssignment;
use crate::percolation::{DefaultDirection, Direction, Rule, RuleTable};
use crate::transfer::LabelMap;
use crate::tree::{ConstTree, NodeId, Subtree};

#[derive(Clone, Debug)]
pub struct RandomTreeConfig {
    pub max_tokens: usize,
    pub max_branching: usize,
    /// Chance of a unary node above a preterminal or a phrase.
    pub unary_prob: f64,
    /// Chance that a token is punctuation.
    pub punct_prob: f64,
}

impl Default for RandomTreeConfig {
    fn default() -> Self {
        RandomTreeConfig {
            max_tokens: 12,
            max_branching: 4,
            unary_prob: 0.15,
            punct_prob: 0.15,
        }
    }
}

const RANDOM_PHRASES: [&str; 6] = ["S", "NP", "VP", "PP", "ADJP", "SBAR"];
const RANDOM_TAGS: [&str; 6] = ["NN", "NNS", "VB", "DT", "IN", "JJ"];
const RANDOM_PUNCT: [(&str, &str); 8] = [
    (",", ","),
    (".", "."),
    (":", ";"),
    ("``", "``"),
    ("''", "''"),
    ("-LRB-", "-LRB-"),
    ("-RRB-", "-RRB-"),
    ("-LRB-", "-LCB-"),
];

fn random_leaf<R: Rng + ?Sized>(rng: &mut R, cfg: &RandomTreeConfig, index: &mut usize) -> Subtree {
    *index += 1;
    if rng.gen_bool(cfg.punct_prob) {
        let (tag, word) = RANDOM_PUNCT.choose(rng).unwrap();
        Subtree::leaf(*tag, *word)
    } else {
        Subtree::leaf(*RANDOM_TAGS.choose(rng).unwrap(), format!("w{index}"))
    }
}

/// Splits `len` into `k` positive parts.
fn partition<R: Rng + ?Sized>(rng: &mut R, len: usize, k: usize) -> Vec<usize> {
    let mut cuts = rand::seq::index::sample(rng, len - 1, k - 1).into_vec();
    cuts.sort_unstable();
    let mut parts = Vec::with_capacity(k);
    let mut prev = 0;
    for c in cuts.into_iter().chain(std::iter::once(len - 1)) {
        parts.push(c + 1 - prev);
        prev = c + 1;
    }
    parts
}

fn random_phrase<R: Rng + ?Sized>(rng: &mut R, cfg: &RandomTreeConfig, len: usize, index: &mut usize) -> Subtree {
    let label = *RANDOM_PHRASES.choose(rng).unwrap();
    let children = if len == 1 {
        vec![random_leaf(rng, cfg, index)]
    } else if rng.gen_bool(cfg.unary_prob) {
        vec![random_phrase_over(rng, cfg, len, index)]
    } else {
        let k = rng.gen_range(2..=cfg.max_branching.max(2).min(len));
        partition(rng, len, k)
            .into_iter()
            .map(|part| random_constituent(rng, cfg, part, index))
            .collect()
    };
    Subtree::phrase(label, children)
}

/// A phrase of `len > 1` tokens that is not itself unary.
fn random_phrase_over<R: Rng + ?Sized>(rng: &mut R, cfg: &RandomTreeConfig, len: usize, index: &mut usize) -> Subtree {
    let no_unary = RandomTreeConfig {
        unary_prob: 0.0,
        ..cfg.clone()
    };
    let label = *RANDOM_PHRASES.choose(rng).unwrap();
    let k = rng.gen_range(2..=cfg.max_branching.max(2).min(len));
    let children = partition(rng, len, k)
        .into_iter()
        .map(|part| random_constituent(rng, &no_unary, part, index))
        .collect();
    Subtree::phrase(label, children)
}

fn random_constituent<R: Rng + ?Sized>(rng: &mut R, cfg: &RandomTreeConfig, len: usize, index: &mut usize) -> Subtree {
    if len == 1 && !rng.gen_bool(cfg.unary_prob) {
        random_leaf(rng, cfg, index)
    } else {
        random_phrase(rng, cfg, len, index)
    }
}

/// A random tree with a phrase root, 1 to `max_tokens` tokens and at most
/// `max_branching` children per node.
pub fn random_tree<R: Rng + ?Sized>(rng: &mut R, cfg: &RandomTreeConfig) -> ConstTree {
    let n = rng.gen_range(1..=cfg.max_tokens.max(1));
    let mut index = 0;
    let root = random_phrase(rng, cfg, n, &mut index);
    ConstTree::from_subtree(root).expect("generated phrases have children")
}

/// A uniformly random head child for every nonterminal.
pub fn random_heads<R: Rng + ?Sized>(rng: &mut R, tree: &ConstTree) -> HeadAssignment {
    tree.nonterminals()
        .map(|id| (id, rng.gen_range(1..=tree.children(id).len())))
        .collect()
}

/// Expansion of one phrase category: left dependents, a head, right
/// dependents.
#[derive(Clone, Debug)]
pub struct PhraseRule {
    pub heads: Vec<&'static str>,
    pub left: Vec<&'static str>,
    pub right: Vec<&'static str>,
    /// Weights for 0, 1, 2, ... left dependents.
    pub left_counts: Vec<f64>,
    pub right_counts: Vec<f64>,
    /// Whether the trigger exception may fire in this category.
    pub exceptions: bool,
}

impl PhraseRule {
    fn new(
        heads: &[&'static str],
        left: &[&'static str],
        left_counts: &[f64],
        right: &[&'static str],
        right_counts: &[f64],
    ) -> Self {
        PhraseRule {
            heads: heads.to_vec(),
            left: left.to_vec(),
            right: right.to_vec(),
            left_counts: left_counts.to_vec(),
            right_counts: right_counts.to_vec(),
            exceptions: true,
        }
    }
}

pub const PHRASE_LABELS: [&str; 10] = ["S", "SBAR", "NP", "VP", "PP", "ADJP", "ADVP", "QP", "WHNP", "PRT"];
pub const POS_TAGS: [&str; 20] = [
    "DT", "NN", "NNS", "NNP", "PRP", "VBZ", "VBD", "VB", "MD", "IN", "TO", "JJ", "JJR", "RB", "CD", "WDT", "WP", "CC",
    "RP", "POS",
];

/// A head-convention grammar over [`PHRASE_LABELS`] and [`POS_TAGS`].
///
/// Every phrase has a fixed head category. With probability
/// `exception_rate` a node instead gets the `trigger` tag inserted right
/// after its regular head, and the trigger becomes the head, so exceptions
/// are visible in the local configuration.
#[derive(Clone, Debug)]
pub struct SyntheticGrammar {
    pub rules: BTreeMap<&'static str, PhraseRule>,
    pub root: &'static str,
    pub trigger: &'static str,
    pub exception_rate: f64,
    /// Beyond this depth only POS dependents are generated; heads are
    /// always expanded.
    pub max_depth: usize,
}

fn is_phrase(label: &str) -> bool {
    PHRASE_LABELS.contains(&label)
}

impl Default for SyntheticGrammar {
    fn default() -> Self {
        let mut rules = BTreeMap::new();
        rules.insert(
            "S",
            PhraseRule::new(&["VP"], &["NP", "NP", "NP", "ADVP", "SBAR"], &[0.1, 0.8, 0.1], &["ADVP", "PP", "CC"], &[0.7, 0.3]),
        );
        rules.insert("SBAR", PhraseRule::new(&["IN", "WHNP"], &[], &[1.0], &["S"], &[0.0, 1.0]));
        rules.insert(
            "NP",
            PhraseRule::new(
                &["NN", "NNS", "NNP", "NN", "NNS", "PRP"],
                &["DT", "JJ", "JJR", "CD", "DT", "QP", "ADJP"],
                &[0.3, 0.4, 0.2, 0.1],
                &["PP", "SBAR", "PP"],
                &[0.75, 0.2, 0.05],
            ),
        );
        rules.insert(
            "VP",
            PhraseRule::new(
                &["VBZ", "VBD", "VB"],
                &["RB", "MD"],
                &[0.85, 0.15],
                &["NP", "PP", "NP", "ADVP", "S", "SBAR", "PRT", "ADJP"],
                &[0.15, 0.5, 0.3, 0.05],
            ),
        );
        rules.insert("PP", PhraseRule::new(&["IN", "IN", "TO"], &["RB"], &[0.9, 0.1], &["NP"], &[0.05, 0.95]));
        rules.insert("ADJP", PhraseRule::new(&["JJ", "JJR"], &["RB"], &[0.5, 0.5], &["PP"], &[0.8, 0.2]));
        rules.insert("ADVP", PhraseRule::new(&["RB"], &["RB"], &[0.6, 0.4], &[], &[1.0]));
        rules.insert("QP", PhraseRule::new(&["CD"], &["RB", "JJR", "IN", "DT"], &[0.3, 0.5, 0.2], &[], &[1.0]));
        rules.insert("WHNP", PhraseRule::new(&["WDT", "WP"], &[], &[1.0], &["NN", "NNS"], &[0.5, 0.5]));
        rules.insert("PRT", PhraseRule::new(&["RP"], &[], &[1.0], &[], &[1.0]));
        SyntheticGrammar {
            rules,
            root: "S",
            trigger: "POS",
            exception_rate: 0.05,
            max_depth: 5,
        }
    }
}

fn pick_count<R: Rng + ?Sized>(rng: &mut R, weights: &[f64]) -> usize {
    WeightedIndex::new(weights).map(|d| d.sample(rng)).unwrap_or(0)
}

impl SyntheticGrammar {
    /// One sentence and its gold heads.
    pub fn sentence<R: Rng + ?Sized>(&self, rng: &mut R) -> (ConstTree, HeadAssignment) {
        let mut heads_by_rank = Vec::new();
        let root = self.expand(rng, self.root, 0, &mut heads_by_rank);
        let tree = ConstTree::from_subtree(root).expect("grammar expansions have children");
        // expand() records heads in preorder, matching nonterminals().
        let heads: HeadAssignment = tree.nonterminals().zip(heads_by_rank).collect();
        (tree, heads)
    }

    pub fn corpus<R: Rng + ?Sized>(&self, rng: &mut R, n: usize) -> Vec<(ConstTree, HeadAssignment)> {
        (0..n).map(|_| self.sentence(rng)).collect()
    }

    fn expand<R: Rng + ?Sized>(&self, rng: &mut R, label: &str, depth: usize, heads: &mut Vec<usize>) -> Subtree {
        let rule = &self.rules[label];
        let deep = depth >= self.max_depth;
        let allowed = |c: &&&str| !deep || !is_phrase(c);
        let head = *rule.heads.choose(rng).unwrap();
        let pick = |deps: &[&'static str], counts: &[f64], rng: &mut R| -> Vec<&'static str> {
            let pool: Vec<&str> = deps.iter().filter(allowed).copied().collect();
            let n = pick_count(rng, counts);
            if pool.is_empty() {
                return Vec::new();
            }
            (0..n).map(|_| *pool.choose(rng).unwrap()).collect()
        };
        let left = pick(&rule.left, &rule.left_counts, rng);
        let right = pick(&rule.right, &rule.right_counts, rng);

        let mut labels: Vec<&str> = left;
        labels.push(head);
        let mut head_pos = labels.len();
        if rule.exceptions && rng.gen_bool(self.exception_rate) {
            labels.push(self.trigger);
            head_pos += 1;
        }
        labels.extend(right);

        heads.push(head_pos);
        let children = labels
            .into_iter()
            .map(|l| {
                if is_phrase(l) {
                    self.expand(rng, l, depth + 1, heads)
                } else {
                    Subtree::leaf(l, l.to_lowercase())
                }
            })
            .collect();
        Subtree::phrase(label, children)
    }

    /// A percolation table encoding the regular (exception-free) convention.
    pub fn rule_table(&self) -> RuleTable {
        let mut table = RuleTable::new(DefaultDirection::Left);
        for (label, rule) in &self.rules {
            let mut priority: Vec<String> = Vec::new();
            for h in &rule.heads {
                if !priority.iter().any(|p| p == h) {
                    priority.push(h.to_string());
                }
            }
            let direction = if rule.left_counts.len() > 1 && rule.right_counts.len() <= 1 {
                Direction::RightDis
            } else {
                Direction::LeftDis
            };
            table.add_rule(*label, Rule { direction, priority });
        }
        table
    }

    /// Makes `label` always expand to `children` with head `head` (1-based)
    /// and never fire exceptions.
    pub fn fix_category(&mut self, label: &'static str, children: &[&'static str], head: usize) {
        assert!((1..=children.len()).contains(&head));
        let rule = PhraseRule {
            heads: vec![children[head - 1]],
            left: children[..head - 1].to_vec(),
            right: children[head..].to_vec(),
            left_counts: one_hot(head - 1),
            right_counts: one_hot(children.len() - head),
            exceptions: false,
        };
        self.rules.insert(label, rule);
    }
}

fn one_hot(n: usize) -> Vec<f64> {
    let mut v = vec![0.0; n + 1];
    v[n] = 1.0;
    v
}

/// Fraction of nonterminals whose head is the exception trigger.
pub fn exception_rate(corpus: &[(ConstTree, HeadAssignment)], trigger: &str) -> f64 {
    let mut hits = 0usize;
    let mut total = 0usize;
    for (tree, heads) in corpus {
        for (id, _) in heads.iter() {
            total += 1;
            let child = heads.head_child(tree, id).unwrap();
            hits += usize::from(tree.label(child) == trigger);
        }
    }
    hits as f64 / total as f64
}

/// The label renaming used for synthetic transfer targets.
pub fn target_label(label: &str) -> String {
    label.to_lowercase()
}

/// Copy of `tree` with every label passed through [`target_label`].
pub fn rename_labels(tree: &ConstTree) -> ConstTree {
    fn go(tree: &ConstTree, id: NodeId) -> Subtree {
        let node = tree.node(id);
        match node.word() {
            Some(word) => Subtree::leaf(target_label(&node.label), word),
            None => Subtree::phrase(
                target_label(&node.label),
                tree.children(id).iter().map(|&c| go(tree, c)).collect(),
            ),
        }
    }
    ConstTree::from_subtree(go(tree, tree.root())).expect("renaming keeps structure")
}

/// φ/ψ mapping renamed labels back to the grammar's labels.
pub fn renaming_map() -> LabelMap {
    LabelMap {
        phrase_map: PHRASE_LABELS.iter().map(|l| (target_label(l), l.to_string())).collect(),
        pos_map: POS_TAGS.iter().map(|t| (target_label(t), t.to_string())).collect(),
        ..LabelMap::default()
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::heads::{assign_heads, FixedChooser};
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    #[test]
    fn random_trees_respect_limits() {
        let mut rng = ChaCha8Rng::seed_from_u64(1);
        let cfg = RandomTreeConfig::default();
        for _ in 0..500 {
            let t = random_tree(&mut rng, &cfg);
            assert!((1..=12).contains(&t.token_count()));
            assert!(t.node_ids().all(|id| t.children(id).len() <= 4));
            assert!(!t.node(t.root()).is_preterminal());
            random_heads(&mut rng, &t).validate(&t).unwrap();
        }
    }

    #[test]
    fn partitions_are_positive() {
        let mut rng = ChaCha8Rng::seed_from_u64(2);
        for len in 2..10 {
            for k in 1..=len {
                let p = partition(&mut rng, len, k);
                assert_eq!(p.len(), k);
                assert_eq!(p.iter().sum::<usize>(), len);
                assert!(p.iter().all(|&x| x > 0));
            }
        }
    }

    #[test]
    fn grammar_inventory() {
        let g = SyntheticGrammar::default();
        assert_eq!(g.rules.len(), 10);
        for rule in g.rules.values() {
            for l in rule.heads.iter().chain(&rule.left).chain(&rule.right) {
                assert!(PHRASE_LABELS.contains(l) || POS_TAGS.contains(l), "{l}");
            }
        }
    }

    #[test]
    fn sentences_have_valid_heads_and_exception_rate() {
        let g = SyntheticGrammar::default();
        let mut rng = ChaCha8Rng::seed_from_u64(3);
        let corpus = g.corpus(&mut rng, 2000);
        for (t, h) in &corpus {
            h.validate(t).unwrap();
        }
        let rate = exception_rate(&corpus, g.trigger);
        assert!((0.04..0.06).contains(&rate), "{rate}");
    }

    #[test]
    fn fixed_baselines_are_weak() {
        let g = SyntheticGrammar::default();
        let mut rng = ChaCha8Rng::seed_from_u64(4);
        let corpus = g.corpus(&mut rng, 1000);
        for chooser in [FixedChooser::Leftmost, FixedChooser::Rightmost] {
            let (mut ok, mut total) = (0, 0);
            for (t, gold) in &corpus {
                let pred = assign_heads(&chooser, t);
                for (id, h) in gold.iter() {
                    total += 1;
                    ok += usize::from(pred.get(id) == Some(h));
                }
            }
            assert!((ok as f64 / total as f64) <= 0.85, "{chooser:?}: {ok}/{total}");
        }
    }

    #[test]
    fn fixed_category() {
        let mut g = SyntheticGrammar::default();
        g.fix_category("PP", &["IN", "NP"], 2);
        let mut rng = ChaCha8Rng::seed_from_u64(5);
        for (t, h) in g.corpus(&mut rng, 200) {
            for id in t.nonterminals().filter(|&id| t.label(id) == "PP") {
                let labels: Vec<&str> = t.children(id).iter().map(|&c| t.label(c)).collect();
                assert_eq!(labels, ["IN", "NP"]);
                assert_eq!(h.get(id), Some(2));
            }
        }
    }

    #[test]
    fn renaming_roundtrips_through_map() {
        let g = SyntheticGrammar::default();
        let mut rng = ChaCha8Rng::seed_from_u64(6);
        let (t, _) = g.sentence(&mut rng);
        let r = rename_labels(&t);
        let map = renaming_map();
        for id in r.node_ids() {
            let table = if r.node(id).is_preterminal() { &map.pos_map } else { &map.phrase_map };
            assert_eq!(table[r.label(id)], t.label(id));
        }
    }

    #[test]
    fn rule_table_matches_regular_heads() {
        let g = SyntheticGrammar {
            exception_rate: 0.0,
            ..SyntheticGrammar::default()
        };
        let table = g.rule_table();
        let mut rng = ChaCha8Rng::seed_from_u64(7);
        let (mut ok, mut total) = (0, 0);
        for (t, gold) in g.corpus(&mut rng, 300) {
            let pred = table.percolate_tree(&t);
            for (id, h) in gold.iter() {
                total += 1;
                ok += usize::from(pred.get(id) == Some(h));
            }
        }
        assert!(ok as f64 / total as f64 > 0.97, "{ok}/{total}");
    }
}
