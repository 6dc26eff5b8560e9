use std::collections::{BTreeMap, BTreeSet, HashMap};

use rand::seq::SliceRandom;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use thiserror::Error;

use super::features::featurize;
use super::model::{HeadModel, ModelMetadata};
use super::Instance;

const ADAGRAD_EPS: f64 = 1e-8;

#[derive(Clone, Debug, PartialEq)]
pub struct TrainConfig {
    pub epochs: usize,
    pub learning_rate: f64,
    pub l2: f64,
    pub seed: u64,
}

impl Default for TrainConfig {
    fn default() -> Self {
        TrainConfig {
            epochs: 10,
            learning_rate: 0.1,
            l2: 1e-6,
            seed: 42,
        }
    }
}

#[derive(Clone, Debug, Error, PartialEq, Eq)]
pub enum TrainError {
    #[error("no training instances")]
    NoInstances,
    #[error("instance {0} has no gold head")]
    MissingGold(usize),
}

#[derive(Clone, Debug, Default, PartialEq)]
pub struct TrainReport {
    /// Regularized mean training loss after each epoch.
    pub train_loss: Vec<f64>,
    /// Mean dev loss after each epoch, when a dev set was given.
    pub dev_loss: Vec<f64>,
    /// 1-based epoch whose weights were kept (minimum dev loss).
    pub best_epoch: Option<usize>,
}

/// Instances with features interned to dense ids.
struct Compiled {
    cands: Vec<Vec<u32>>,
    gold: usize,
}

struct Interner {
    ids: HashMap<String, u32>,
    names: Vec<String>,
}

impl Interner {
    fn id(&mut self, f: String) -> u32 {
        if let Some(&id) = self.ids.get(&f) {
            return id;
        }
        let id = self.names.len() as u32;
        self.names.push(f.clone());
        self.ids.insert(f, id);
        id
    }
}

fn softmax(scores: &[f64]) -> Vec<f64> {
    let max = scores.iter().copied().fold(f64::NEG_INFINITY, f64::max);
    let exp: Vec<f64> = scores.iter().map(|s| (s - max).exp()).collect();
    let z: f64 = exp.iter().sum();
    exp.into_iter().map(|e| e / z).collect()
}

fn log_sum_exp(scores: &[f64]) -> f64 {
    let max = scores.iter().copied().fold(f64::NEG_INFINITY, f64::max);
    max + scores.iter().map(|s| (s - max).exp()).sum::<f64>().ln()
}

fn compiled_scores(w: &[f64], inst: &Compiled) -> Vec<f64> {
    inst.cands
        .iter()
        .map(|fs| fs.iter().map(|&f| w[f as usize]).sum())
        .collect()
}

fn compiled_loss(w: &[f64], inst: &Compiled) -> f64 {
    let s = compiled_scores(w, inst);
    log_sum_exp(&s) - s[inst.gold - 1]
}

fn objective(w: &[f64], data: &[Compiled], l2: f64) -> f64 {
    let loss: f64 = data.iter().map(|i| compiled_loss(w, i)).sum::<f64>() / data.len() as f64;
    loss + 0.5 * l2 * w.iter().map(|x| x * x).sum::<f64>()
}

fn mean_model_loss(model: &HeadModel, data: &[Instance]) -> f64 {
    data.iter().map(|i| instance_loss(model, i)).sum::<f64>() / data.len() as f64
}

fn check(instances: &[Instance]) -> Result<(), TrainError> {
    if instances.is_empty() {
        return Err(TrainError::NoInstances);
    }
    for (i, inst) in instances.iter().enumerate() {
        match inst.gold {
            Some(g) if (1..=inst.arity()).contains(&g) => {}
            _ => return Err(TrainError::MissingGold(i)),
        }
    }
    Ok(())
}

pub fn train(instances: &[Instance], config: &TrainConfig) -> Result<HeadModel, TrainError> {
    train_with_report(instances, None, config).map(|(m, _)| m)
}

/// Sequential SGD with AdaGrad step sizes over the softmax loss. With a dev
/// set, the weights of the epoch with the lowest dev loss are returned.
pub fn train_with_report(
    instances: &[Instance],
    dev: Option<&[Instance]>,
    config: &TrainConfig,
) -> Result<(HeadModel, TrainReport), TrainError> {
    check(instances)?;
    let dev = match dev {
        Some(d) if !d.is_empty() => {
            check(d)?;
            Some(d)
        }
        _ => None,
    };

    let mut interner = Interner {
        ids: HashMap::new(),
        names: Vec::new(),
    };
    let data: Vec<Compiled> = instances
        .iter()
        .map(|inst| Compiled {
            cands: (1..=inst.arity())
                .map(|j| featurize(inst, j).into_iter().map(|f| interner.id(f)).collect())
                .collect(),
            gold: inst.gold.unwrap(),
        })
        .collect();
    let label_vocab: BTreeSet<String> = instances
        .iter()
        .flat_map(|i| std::iter::once(&i.parent).chain(&i.children))
        .cloned()
        .collect();

    let dim = interner.names.len();
    let mut w = vec![0.0; dim];
    let mut g2 = vec![0.0; dim];
    let mut grad: HashMap<u32, f64> = HashMap::new();
    let mut order: Vec<usize> = (0..data.len()).collect();
    let mut rng = ChaCha8Rng::seed_from_u64(config.seed);
    let mut report = TrainReport::default();
    let mut best: Option<(f64, Vec<f64>)> = None;

    let to_model = |w: &[f64]| HeadModel {
        weights: interner
            .names
            .iter()
            .zip(w)
            .filter(|(_, &x)| x != 0.0)
            .map(|(n, &x)| (n.clone(), x))
            .collect(),
        label_vocab: label_vocab.clone(),
        metadata: ModelMetadata::from(config),
    };

    for epoch in 1..=config.epochs {
        order.shuffle(&mut rng);
        for &idx in &order {
            let inst = &data[idx];
            let p = softmax(&compiled_scores(&w, inst));
            grad.clear();
            for (j, fs) in inst.cands.iter().enumerate() {
                let coef = p[j] - if j + 1 == inst.gold { 1.0 } else { 0.0 };
                for &f in fs {
                    *grad.entry(f).or_insert(0.0) += coef;
                }
            }
            // Deterministic update order regardless of hash iteration.
            let mut touched: Vec<(u32, f64)> = grad.iter().map(|(&f, &g)| (f, g)).collect();
            touched.sort_unstable_by_key(|&(f, _)| f);
            for (f, g) in touched {
                let f = f as usize;
                let g = g + config.l2 * w[f];
                if g == 0.0 {
                    continue;
                }
                g2[f] += g * g;
                w[f] -= config.learning_rate * g / (g2[f].sqrt() + ADAGRAD_EPS);
            }
        }
        report.train_loss.push(objective(&w, &data, config.l2));
        if let Some(dev) = dev {
            let loss = mean_model_loss(&to_model(&w), dev);
            report.dev_loss.push(loss);
            if best.as_ref().is_none_or(|(b, _)| loss < *b) {
                best = Some((loss, w.clone()));
                report.best_epoch = Some(epoch);
            }
        }
    }
    let final_w = best.map(|(_, w)| w).unwrap_or(w);
    Ok((to_model(&final_w), report))
}

/// Unregularized softmax loss of one instance under `model`.
pub fn instance_loss(model: &HeadModel, instance: &Instance) -> f64 {
    let gold = instance.gold.expect("instance without gold head");
    let s = model.scores(instance);
    log_sum_exp(&s) - s[gold - 1]
}

/// Gradient of [`instance_loss`] with respect to every feature it touches.
pub fn instance_loss_gradient(model: &HeadModel, instance: &Instance) -> BTreeMap<String, f64> {
    let gold = instance.gold.expect("instance without gold head");
    let p = softmax(&model.scores(instance));
    let mut grad = BTreeMap::new();
    for j in 1..=instance.arity() {
        let coef = p[j - 1] - if j == gold { 1.0 } else { 0.0 };
        for f in featurize(instance, j) {
            *grad.entry(f).or_insert(0.0) += coef;
        }
    }
    grad
}
