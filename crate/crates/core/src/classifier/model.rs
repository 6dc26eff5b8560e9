use std::collections::{BTreeMap, BTreeSet};

use thiserror::Error;

use super::features::{featurize, FEATURE_TEMPLATE_VERSION};
use super::{Instance, TrainConfig};
use crate::heads::{assign_heads, HeadAssignment, HeadChooser};
use crate::tree::ConstTree;

const MAGIC: &str = "#headlayer-model";
const WEIGHTS_MARKER: &str = "#weights";

#[derive(Clone, Debug, PartialEq)]
pub struct ModelMetadata {
    pub epochs: usize,
    pub learning_rate: f64,
    pub l2: f64,
    pub seed: u64,
    pub feature_template_version: u32,
}

impl From<&TrainConfig> for ModelMetadata {
    fn from(c: &TrainConfig) -> Self {
        ModelMetadata {
            epochs: c.epochs,
            learning_rate: c.learning_rate,
            l2: c.l2,
            seed: c.seed,
            feature_template_version: FEATURE_TEMPLATE_VERSION,
        }
    }
}

impl Default for ModelMetadata {
    fn default() -> Self {
        (&TrainConfig::default()).into()
    }
}

/// Feature weights of the learned head chooser.
#[derive(Clone, Debug, Default, PartialEq)]
pub struct HeadModel {
    pub weights: BTreeMap<String, f64>,
    pub label_vocab: BTreeSet<String>,
    pub metadata: ModelMetadata,
}

#[derive(Clone, Debug, Error, PartialEq, Eq)]
pub enum ModelError {
    #[error("bad model header: {0}")]
    BadHeader(String),
    #[error("line {line}: malformed weight entry")]
    BadWeightLine { line: usize },
}

impl HeadModel {
    /// Score of `candidate` (1-based); unknown features contribute 0.
    pub fn score(&self, instance: &Instance, candidate: usize) -> f64 {
        featurize(instance, candidate)
            .iter()
            .filter_map(|f| self.weights.get(f))
            .sum()
    }

    pub fn scores(&self, instance: &Instance) -> Vec<f64> {
        (1..=instance.arity()).map(|j| self.score(instance, j)).collect()
    }

    /// Highest-scoring child, the smallest index on ties.
    pub fn predict(&self, instance: &Instance) -> usize {
        assert!(instance.arity() > 0, "instance without children");
        if instance.arity() == 1 {
            return 1;
        }
        let mut best = 1;
        let mut best_score = f64::NEG_INFINITY;
        for (j, s) in self.scores(instance).into_iter().enumerate() {
            if s > best_score {
                best = j + 1;
                best_score = s;
            }
        }
        best
    }

    pub fn predict_tree(&self, tree: &ConstTree) -> HeadAssignment {
        assign_heads(self, tree)
    }

    /// Text serialization: a metadata header, then one `feature<TAB>weight`
    /// line per nonzero weight.
    pub fn to_text(&self) -> String {
        let m = &self.metadata;
        let mut out = String::new();
        out.push_str(MAGIC);
        out.push('\n');
        out.push_str(&format!("epochs\t{}\n", m.epochs));
        out.push_str(&format!("learning_rate\t{}\n", m.learning_rate));
        out.push_str(&format!("l2\t{}\n", m.l2));
        out.push_str(&format!("seed\t{}\n", m.seed));
        out.push_str(&format!("feature_template_version\t{}\n", m.feature_template_version));
        let labels: Vec<&str> = self.label_vocab.iter().map(String::as_str).collect();
        out.push_str(&format!("labels\t{}\n", labels.join(" ")));
        out.push_str(WEIGHTS_MARKER);
        out.push('\n');
        for (feature, weight) in &self.weights {
            if *weight != 0.0 {
                out.push_str(&format!("{feature}\t{weight}\n"));
            }
        }
        out
    }

    pub fn from_text(text: &str) -> Result<Self, ModelError> {
        let mut lines = text.lines().enumerate();
        match lines.next() {
            Some((_, l)) if l.trim_end() == MAGIC => {}
            _ => return Err(ModelError::BadHeader("missing model marker".into())),
        }
        let mut header: BTreeMap<&str, &str> = BTreeMap::new();
        let mut saw_marker = false;
        for (_, line) in lines.by_ref() {
            let line = line.trim_end_matches('\r');
            if line == WEIGHTS_MARKER {
                saw_marker = true;
                break;
            }
            let (key, value) = line
                .split_once('\t')
                .ok_or_else(|| ModelError::BadHeader(format!("malformed header line '{line}'")))?;
            header.insert(key, value);
        }
        if !saw_marker {
            return Err(ModelError::BadHeader("missing weights section".into()));
        }

        fn field<T: std::str::FromStr>(header: &BTreeMap<&str, &str>, key: &str) -> Result<T, ModelError> {
            header
                .get(key)
                .ok_or_else(|| ModelError::BadHeader(format!("missing '{key}'")))?
                .parse()
                .map_err(|_| ModelError::BadHeader(format!("invalid '{key}'")))
        }
        let metadata = ModelMetadata {
            epochs: field(&header, "epochs")?,
            learning_rate: field(&header, "learning_rate")?,
            l2: field(&header, "l2")?,
            seed: field(&header, "seed")?,
            feature_template_version: field(&header, "feature_template_version")?,
        };
        if metadata.feature_template_version != FEATURE_TEMPLATE_VERSION {
            return Err(ModelError::BadHeader(format!(
                "feature template version {} is not supported",
                metadata.feature_template_version
            )));
        }
        let label_vocab = header
            .get("labels")
            .map(|l| l.split_whitespace().map(str::to_string).collect())
            .unwrap_or_default();

        let mut weights = BTreeMap::new();
        for (i, line) in lines {
            let line = line.trim_end_matches('\r');
            if line.is_empty() {
                continue;
            }
            let (feature, weight) = line
                .rsplit_once('\t')
                .and_then(|(f, w)| Some((f, w.parse::<f64>().ok()?)))
                .filter(|(f, w)| !f.is_empty() && w.is_finite())
                .ok_or(ModelError::BadWeightLine { line: i + 1 })?;
            weights.insert(feature.to_string(), weight);
        }
        Ok(HeadModel {
            weights,
            label_vocab,
            metadata,
        })
    }
}

impl HeadChooser for HeadModel {
    fn choose(&self, parent: &str, children: &[&str]) -> usize {
        self.predict(&Instance::new(parent, children, None))
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::bracketed::parse_bracketed;
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    #[test]
    fn zero_model_ties_to_first() {
        let m = HeadModel::default();
        assert_eq!(m.predict(&Instance::new("X", &["A", "B", "C"], None)), 1);
        assert_eq!(m.predict(&Instance::new("X", &["A"], None)), 1);
    }

    #[test]
    fn single_child_ignores_weights() {
        let mut m = HeadModel::default();
        m.weights.insert("C=A".into(), -5.0);
        assert_eq!(m.predict(&Instance::new("X", &["A"], None)), 1);
    }

    #[test]
    fn unseen_labels_stay_in_range() {
        let mut m = HeadModel::default();
        m.weights.insert("P=NP&C=NN".into(), 2.0);
        let t = parse_bracketed("(QQ (ZZ a) (YY b) (WW (VV c)))").unwrap().remove(0);
        let h = m.predict_tree(&t);
        h.validate(&t).unwrap();
        let spine = parse_bracketed("(A (B (C (D x))))").unwrap().remove(0);
        assert!(m.predict_tree(&spine).iter().all(|(_, i)| i == 1));
    }

    fn random_model(rng: &mut ChaCha8Rng) -> HeadModel {
        let labels = ["NP", "VP", "PP", "NN", "DT", "IN"];
        let mut m = HeadModel::default();
        for _ in 0..200 {
            let inst = Instance::new(
                labels[rng.gen_range(0..labels.len())],
                &(0..rng.gen_range(1..5)).map(|_| labels[rng.gen_range(0..labels.len())]).collect::<Vec<_>>(),
                None,
            );
            let j = rng.gen_range(1..=inst.arity());
            for f in featurize(&inst, j) {
                m.weights.insert(f, rng.gen_range(-3.0..3.0) / 7.0);
            }
        }
        m.label_vocab = labels.iter().map(|s| s.to_string()).collect();
        m
    }

    #[test]
    fn save_load_preserves_predictions() {
        let mut rng = ChaCha8Rng::seed_from_u64(7);
        let m = random_model(&mut rng);
        let loaded = HeadModel::from_text(&m.to_text()).unwrap();
        assert_eq!(loaded, m);
        let labels = ["NP", "VP", "PP", "NN", "DT", "IN", "UNSEEN"];
        for _ in 0..100 {
            let children: Vec<&str> = (0..rng.gen_range(1..6)).map(|_| labels[rng.gen_range(0..labels.len())]).collect();
            let inst = Instance::new(labels[rng.gen_range(0..labels.len())], &children, None);
            assert_eq!(loaded.predict(&inst), m.predict(&inst));
        }
    }

    #[test]
    fn corrupted_weight() {
        let text = HeadModel::default().to_text() + "C=NN\tabc\n";
        assert_eq!(HeadModel::from_text(&text), Err(ModelError::BadWeightLine { line: 9 }));
        let text = HeadModel::default().to_text() + "no-tab-here\n";
        assert!(matches!(HeadModel::from_text(&text), Err(ModelError::BadWeightLine { .. })));
    }

    #[test]
    fn header_errors() {
        assert!(matches!(HeadModel::from_text("garbage"), Err(ModelError::BadHeader(_))));
        let no_weights = HeadModel::default().to_text().replace("#weights\n", "");
        assert!(matches!(HeadModel::from_text(&no_weights), Err(ModelError::BadHeader(_))));
        let missing_seed = HeadModel::default().to_text().replace("seed\t42\n", "");
        assert!(matches!(HeadModel::from_text(&missing_seed), Err(ModelError::BadHeader(_))));
    }

    #[test]
    fn empty_weight_section_is_zero_model() {
        let m = HeadModel::from_text(&HeadModel::default().to_text()).unwrap();
        assert!(m.weights.is_empty());
        assert_eq!(m.predict(&Instance::new("X", &["A", "B"], None)), 1);
    }
}
