//! Applying a head chooser to another resource through fixed label maps.
//!
//! Map file lines:
//!
//! ```text
//! P TARGET SOURCE      phrase label
//! T TARGET SOURCE      POS tag
//! FALLBACK identity|unk|error
//! # comment
//! ```

use std::collections::{BTreeMap, BTreeSet};

use thiserror::Error;

use crate::align::AlignedSentence;
use crate::eval::{head_accuracy, EvalError, HeadAccuracy};
use crate::heads::{HeadAssignment, HeadChooser};
use crate::induction::{induce_corpus, InductionExclusion};
use crate::label::normalize_label;
use crate::tree::ConstTree;

/// Reserved label for unmapped labels under [`FallbackPolicy::Unk`].
pub const UNK: &str = "UNK";

#[derive(Clone, Copy, Debug, Default, PartialEq, Eq)]
pub enum FallbackPolicy {
    /// Keep the label unchanged and report it.
    #[default]
    Identity,
    Unk,
    Error,
}

#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct LabelMap {
    /// Target phrase label to source phrase label.
    pub phrase_map: BTreeMap<String, String>,
    /// Target POS tag to source POS tag.
    pub pos_map: BTreeMap<String, String>,
    pub fallback: FallbackPolicy,
}

#[derive(Clone, Debug, Error, PartialEq, Eq)]
pub enum MapError {
    #[error("line {line}: unknown line kind '{kind}'")]
    BadLineKind { line: usize, kind: String },
    #[error("line {line}: expected {expected} fields")]
    Malformed { line: usize, expected: usize },
    #[error("line {line}: conflicting entry for '{label}'")]
    DuplicateEntry { line: usize, label: String },
}

#[derive(Clone, Debug, Error, PartialEq, Eq)]
pub enum TransferError {
    #[error("no mapping for label '{0}'")]
    UnmappedLabel(String),
    #[error(transparent)]
    Eval(#[from] EvalError),
}

pub fn load_label_map(text: &str) -> Result<LabelMap, MapError> {
    let mut map = LabelMap::default();
    let mut fallback_line: Option<FallbackPolicy> = None;
    for (i, raw) in text.lines().enumerate() {
        let line = i + 1;
        let content = raw.split('#').next().unwrap_or("").trim();
        let fields: Vec<&str> = content.split_whitespace().collect();
        let Some(&kind) = fields.first() else {
            continue;
        };
        match kind {
            "P" | "T" => {
                let [_, target, source] = fields[..] else {
                    return Err(MapError::Malformed { line, expected: 3 });
                };
                let table = if kind == "P" { &mut map.phrase_map } else { &mut map.pos_map };
                match table.get(target) {
                    Some(existing) if existing != source => {
                        return Err(MapError::DuplicateEntry {
                            line,
                            label: target.to_string(),
                        })
                    }
                    _ => {
                        table.insert(target.to_string(), source.to_string());
                    }
                }
            }
            "FALLBACK" => {
                let [_, policy] = fields[..] else {
                    return Err(MapError::Malformed { line, expected: 2 });
                };
                let policy = match policy {
                    "identity" => FallbackPolicy::Identity,
                    "unk" => FallbackPolicy::Unk,
                    "error" => FallbackPolicy::Error,
                    other => {
                        return Err(MapError::BadLineKind {
                            line,
                            kind: format!("FALLBACK {other}"),
                        })
                    }
                };
                if fallback_line.is_some_and(|p| p != policy) {
                    return Err(MapError::DuplicateEntry {
                        line,
                        label: "FALLBACK".into(),
                    });
                }
                fallback_line = Some(policy);
                map.fallback = policy;
            }
            other => {
                return Err(MapError::BadLineKind {
                    line,
                    kind: other.to_string(),
                })
            }
        }
    }
    Ok(map)
}

/// How each looked-up label occurrence was resolved.
#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct Coverage {
    pub mapped: usize,
    pub identity: usize,
    pub unk: usize,
    /// Distinct normalized labels that had no entry.
    pub unmapped: BTreeSet<String>,
}

impl Coverage {
    pub fn merge(&mut self, other: &Coverage) {
        self.mapped += other.mapped;
        self.identity += other.identity;
        self.unk += other.unk;
        self.unmapped.extend(other.unmapped.iter().cloned());
    }
}

impl LabelMap {
    /// Identity maps with the default fallback.
    pub fn identity() -> Self {
        LabelMap::default()
    }

    fn lookup(&self, label: &str, is_pos: bool, cov: &mut Coverage) -> Result<String, TransferError> {
        let label = normalize_label(label);
        let table = if is_pos { &self.pos_map } else { &self.phrase_map };
        if let Some(source) = table.get(label) {
            cov.mapped += 1;
            return Ok(source.clone());
        }
        cov.unmapped.insert(label.to_string());
        match self.fallback {
            FallbackPolicy::Identity => {
                cov.identity += 1;
                Ok(label.to_string())
            }
            FallbackPolicy::Unk => {
                cov.unk += 1;
                Ok(UNK.to_string())
            }
            FallbackPolicy::Error => Err(TransferError::UnmappedLabel(label.to_string())),
        }
    }
}

/// Predicts heads for a target-resource tree by mapping every local
/// configuration into the source label space. Indices refer to the
/// original children.
pub fn transfer_predict<C: HeadChooser + ?Sized>(
    chooser: &C,
    map: &LabelMap,
    tree: &ConstTree,
) -> Result<(HeadAssignment, Coverage), TransferError> {
    let mut cov = Coverage::default();
    let mut heads = HeadAssignment::new();
    for id in tree.nonterminals() {
        let parent = map.lookup(tree.label(id), false, &mut cov)?;
        let children = tree
            .children(id)
            .iter()
            .map(|&c| map.lookup(tree.label(c), tree.node(c).is_preterminal(), &mut cov))
            .collect::<Result<Vec<_>, _>>()?;
        let refs: Vec<&str> = children.iter().map(String::as_str).collect();
        let k = refs.len();
        let h = if k == 1 { 1 } else { chooser.choose(&parent, &refs).clamp(1, k) };
        heads.insert(id, h);
    }
    Ok((heads, cov))
}

#[derive(Clone, Debug, PartialEq)]
pub struct TransferReport {
    pub accuracy: HeadAccuracy,
    pub coverage: Coverage,
    /// Target sentences without a unique induced head at some node.
    pub excluded: Vec<InductionExclusion>,
}

/// Scores transferred heads against heads induced from the target
/// resource's own dependencies.
pub fn transfer_eval<C: HeadChooser + ?Sized>(
    chooser: &C,
    map: &LabelMap,
    sentences: &[AlignedSentence],
) -> Result<TransferReport, TransferError> {
    let induced = induce_corpus(sentences);
    let mut gold = Vec::new();
    let mut pred = Vec::new();
    let mut trees = Vec::new();
    let mut coverage = Coverage::default();
    for (index, heads) in induced.heads {
        let tree = &sentences[index].tree;
        let (p, cov) = transfer_predict(chooser, map, tree)?;
        coverage.merge(&cov);
        gold.push(heads);
        pred.push(p);
        trees.push(tree.clone());
    }
    Ok(TransferReport {
        accuracy: head_accuracy(&gold, &pred, &trees)?,
        coverage,
        excluded: induced.excluded,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::bracketed::parse_bracketed;
    use crate::classifier::HeadModel;
    use crate::convert::convert;
    use crate::heads::{assign_heads, FixedChooser};
    use crate::percolation::load_rules;
    use crate::synthetic::{random_tree, RandomTreeConfig};
    use crate::tree::NodeId;
    use proptest::prelude::*;
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    fn tree(s: &str) -> ConstTree {
        parse_bracketed(s).unwrap().remove(0)
    }

    #[test]
    fn loads_map() {
        let m = load_label_map("P SENT S\nT V VBZ\nFALLBACK identity").unwrap();
        assert_eq!(m.phrase_map.get("SENT").map(String::as_str), Some("S"));
        assert_eq!(m.pos_map.get("V").map(String::as_str), Some("VBZ"));
        assert_eq!(m.fallback, FallbackPolicy::Identity);
    }

    #[test]
    fn map_errors() {
        assert_eq!(
            load_label_map("P SENT S\nP SENT VP\n"),
            Err(MapError::DuplicateEntry { line: 2, label: "SENT".into() })
        );
        assert!(load_label_map("P SENT S\nP SENT S\n").is_ok());
        assert!(matches!(load_label_map("X a b"), Err(MapError::BadLineKind { line: 1, .. })));
        assert!(matches!(load_label_map("FALLBACK maybe"), Err(MapError::BadLineKind { .. })));
        assert!(matches!(load_label_map("P a"), Err(MapError::Malformed { line: 1, .. })));
    }

    #[test]
    fn empty_map_defaults() {
        let m = load_label_map("# nothing\n\n").unwrap();
        assert!(m.phrase_map.is_empty() && m.pos_map.is_empty());
        assert_eq!(m.fallback, FallbackPolicy::Identity);
    }

    #[test]
    fn mapped_configuration_drives_choice() {
        let rules = load_rules("S left VP\nVP left VBZ\nNP right NN\n").unwrap();
        let map = load_label_map("P SENT S\nP VN VP\nP GN NP\nT V VBZ\nT N NN\nT D DT\n").unwrap();
        let t = tree("(SENT (GN (D le) (N chat)) (VN (V mange)))");
        let (h, cov) = transfer_predict(&rules, &map, &t).unwrap();
        assert_eq!(h.iter().collect::<Vec<_>>(), vec![(NodeId(0), 2), (NodeId(1), 2), (NodeId(4), 1)]);
        assert!(cov.unmapped.is_empty());
    }

    #[test]
    fn fallback_policies() {
        let t = tree("(XP (ZZ a) (YY b))");
        let mut map = LabelMap::identity();
        let (_, cov) = transfer_predict(&FixedChooser::Rightmost, &map, &t).unwrap();
        assert_eq!(cov.identity, 3);
        map.fallback = FallbackPolicy::Unk;
        let (h, cov) = transfer_predict(&HeadModel::default(), &map, &t).unwrap();
        assert_eq!(cov.unk, 3);
        assert_eq!(h.get(NodeId(0)), Some(1));
        map.fallback = FallbackPolicy::Error;
        assert_eq!(
            transfer_predict(&FixedChooser::Leftmost, &map, &t),
            Err(TransferError::UnmappedLabel("XP".into()))
        );
    }

    #[test]
    fn flipped_category_isolated() {
        // source convention: PP head-initial, NP head-final
        let rules = load_rules("PP left IN\nNP right NN\nS left VP\nVP left VB\n").unwrap();
        let target = tree("(S (np (dt the) (nn cat)) (VP (VB sat) (pp (in on) (np (dt a) (nn mat)))))");
        let map = load_label_map("P np NP\nP pp PP\nT dt DT\nT nn NN\nT in IN\n").unwrap();
        // target convention: pp headed by its object
        let (mut gold, _) = transfer_predict(&rules, &map, &target).unwrap();
        let pp = target.nonterminals().find(|&n| target.label(n) == "pp").unwrap();
        gold.insert(pp, 2);
        let s = AlignedSentence::new(target.clone(), convert(&target, &gold).unwrap()).unwrap();
        let report = transfer_eval(&rules, &map, &[s]).unwrap();
        assert_eq!(report.accuracy.category("pp"), Some(0.0));
        for (label, c) in &report.accuracy.by_category {
            if label != "pp" {
                assert_eq!(c.accuracy(), 1.0, "{label}");
            }
        }
    }

    proptest! {
        #[test]
        fn identity_transfer_equals_direct(seed in any::<u64>()) {
            let mut rng = ChaCha8Rng::seed_from_u64(seed);
            let t = random_tree(&mut rng, &RandomTreeConfig::default());
            let rules = load_rules("S right VP\nVP left VB NN\nNP rightdis NN NNS\nDEFAULT right\n").unwrap();
            let (h, _) = transfer_predict(&rules, &LabelMap::identity(), &t).unwrap();
            prop_assert_eq!(h, assign_heads(&rules, &t));
        }
    }
}
