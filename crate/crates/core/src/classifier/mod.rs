//! Learned head chooser: a linear model scoring each child of a
//! configuration, normalized with a softmax over the children.

mod features;
mod model;
mod train;

pub use features::{featurize, FEATURE_TEMPLATE_VERSION};
pub use model::{HeadModel, ModelError, ModelMetadata};
pub use train::{instance_loss, instance_loss_gradient, train, train_with_report, TrainConfig, TrainError, TrainReport};

use crate::heads::{configuration, HeadAssignment};
use crate::tree::ConstTree;

/// One local configuration: a parent label, its ordered child labels and
/// (for training data) the 1-based position of the head child.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct Instance {
    pub parent: String,
    pub children: Vec<String>,
    pub gold: Option<usize>,
}

impl Instance {
    pub fn new(parent: impl Into<String>, children: &[&str], gold: Option<usize>) -> Self {
        Instance {
            parent: parent.into(),
            children: children.iter().map(|c| c.to_string()).collect(),
            gold,
        }
    }

    pub fn arity(&self) -> usize {
        self.children.len()
    }
}

/// One instance per nonterminal in preorder, labels normalized, gold index
/// taken from `heads`.
pub fn extract_instances(tree: &ConstTree, heads: &HeadAssignment) -> Vec<Instance> {
    tree.nonterminals()
        .map(|id| {
            let (parent, children) = configuration(tree, id);
            Instance::new(parent, &children, heads.get(id))
        })
        .collect()
}

/// Unlabeled instances for every nonterminal of `tree`.
pub fn configurations(tree: &ConstTree) -> Vec<Instance> {
    extract_instances(tree, &HeadAssignment::new())
}
