use alloc::vec;
use alloc::vec::Vec;

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use super::auc::roc_auc;
use super::model::{Activation, GatModel};
use super::split::{sample_negatives, Edge, EdgeSplit};
use crate::error::{Error, Result};
use crate::graph::AttributedGraph;
use crate::linalg::Real;

#[derive(Debug, Clone, PartialEq)]
pub struct TrainConfig {
    pub learning_rate: f64,
    pub hidden_size: usize,
    pub num_layers: usize,
    pub max_epochs: usize,
    /// Epochs without a validation improvement before stopping.
    pub patience: usize,
    pub rng_seed: u64,
    pub adam_beta1: f64,
    pub adam_beta2: f64,
    pub adam_epsilon: f64,
    pub leaky_slope: f64,
    pub activation: Activation,
}

impl Default for TrainConfig {
    fn default() -> Self {
        Self {
            learning_rate: 5e-4,
            hidden_size: 512,
            num_layers: 1,
            max_epochs: 500,
            patience: 20,
            rng_seed: 42,
            adam_beta1: 0.9,
            adam_beta2: 0.999,
            adam_epsilon: 1e-8,
            leaky_slope: 0.2,
            activation: Activation::Elu,
        }
    }
}

impl TrainConfig {
    pub fn validate(&self) -> Result<()> {
        if self.learning_rate.is_nan() || self.learning_rate <= 0.0 {
            return Err(Error::param("learning_rate", "must be positive"));
        }
        if self.patience == 0 {
            return Err(Error::param("patience", "must be at least 1"));
        }
        if self.hidden_size == 0 || self.num_layers == 0 {
            return Err(Error::param("hidden_size", "hidden size and layer count must be positive"));
        }
        if !(0.0..1.0).contains(&self.adam_beta1) || !(0.0..1.0).contains(&self.adam_beta2) {
            return Err(Error::param("adam_beta", "moment coefficients must lie in [0, 1)"));
        }
        Ok(())
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct EpochRecord {
    pub epoch: usize,
    /// Loss on the epoch's batch (fresh negatives) at the parameters the
    /// epoch started from.
    pub loss: f64,
    /// Loss after the update on the supervision positives and a negative set
    /// drawn once before training, so epochs are comparable.
    pub train_loss: f64,
    /// Validation AUC after the epoch's update.
    pub val_auc: f64,
}

#[derive(Debug, Clone, PartialEq)]
pub struct TrainReport {
    pub epochs: Vec<EpochRecord>,
    pub best_epoch: usize,
    pub best_val_auc: f64,
    pub test_auc: f64,
    pub early_stopped: bool,
}

/// Adam with bias correction.
#[derive(Debug, Clone)]
pub struct Adam<T> {
    first: Vec<Vec<T>>,
    second: Vec<Vec<T>>,
    step: i32,
    lr: T,
    beta1: T,
    beta2: T,
    eps: T,
}

impl<T: Real> Adam<T> {
    pub fn new(model: &GatModel<T>, config: &TrainConfig) -> Self {
        let shapes: Vec<usize> = model.layers().iter().flat_map(|l| [l.weight.len(), l.out_dim, l.out_dim]).collect();
        Self {
            first: shapes.iter().map(|&s| vec![T::zero(); s]).collect(),
            second: shapes.iter().map(|&s| vec![T::zero(); s]).collect(),
            step: 0,
            lr: T::of(config.learning_rate),
            beta1: T::of(config.adam_beta1),
            beta2: T::of(config.adam_beta2),
            eps: T::of(config.adam_epsilon),
        }
    }

    pub fn update(&mut self, model: &mut GatModel<T>, grads: &super::model::GatGradients<T>) {
        self.step += 1;
        let c1 = T::one() - self.beta1.powi(self.step);
        let c2 = T::one() - self.beta2.powi(self.step);
        let grad_slices = grads.layers.iter().flat_map(|l| [&l.weight[..], &l.src_attention[..], &l.dst_attention[..]]);
        for (((p, g), m), v) in
            model.param_slices_mut().into_iter().zip(grad_slices).zip(&mut self.first).zip(&mut self.second)
        {
            for k in 0..p.len() {
                m[k] = self.beta1 * m[k] + (T::one() - self.beta1) * g[k];
                v[k] = self.beta2 * v[k] + (T::one() - self.beta2) * g[k] * g[k];
                let m_hat = m[k] / c1;
                let v_hat = v[k] / c2;
                p[k] -= self.lr * m_hat / (v_hat.sqrt() + self.eps);
            }
        }
    }
}

/// ROC AUC of `h_j · h_i` scores, with embeddings computed on `message_graph`.
pub fn link_prediction_auc<T: Real>(
    model: &GatModel<T>,
    message_graph: &AttributedGraph,
    positives: &[Edge],
    negatives: &[Edge],
) -> Result<f64> {
    let x = GatModel::<T>::input_features(message_graph);
    auc_with(model, message_graph, &x, positives, negatives)
}

fn auc_with<T: Real>(model: &GatModel<T>, g: &AttributedGraph, x: &[T], pos: &[Edge], neg: &[Edge]) -> Result<f64> {
    let h = model.embed(g, x)?;
    let scores: Vec<f64> = pos.iter().chain(neg).map(|&(j, i)| h.logit(j, i).as_f64()).collect();
    let labels: Vec<bool> = pos.iter().map(|_| true).chain(neg.iter().map(|_| false)).collect();
    roc_auc(&scores, &labels)
}

/// Trains a GAT on link prediction with early stopping on validation AUC and
/// returns the best-validation parameters.
///
/// Message passing uses the split's message edges during training, all
/// training edges for validation, and training plus validation edges for the
/// test AUC.
pub fn train<T: Real>(
    g: &AttributedGraph,
    split: &EdgeSplit,
    config: &TrainConfig,
) -> Result<(GatModel<T>, TrainReport)> {
    config.validate()?;
    let message_graph = g.with_edges(&split.message_edges)?;
    let train_edges = split.train_edges();
    let val_graph = g.with_edges(&train_edges)?;
    let mut observed = train_edges;
    observed.extend_from_slice(&split.val_pos);
    let test_graph = g.with_edges(&observed)?;

    let mut init_rng = ChaCha8Rng::seed_from_u64(config.rng_seed);
    let mut model = GatModel::<T>::glorot(
        g.features().dim(),
        config.hidden_size,
        config.num_layers,
        config.leaky_slope,
        config.activation,
        &mut init_rng,
    )?;
    let mut neg_rng = ChaCha8Rng::seed_from_u64(config.rng_seed);
    neg_rng.set_stream(1);

    let mut monitor_rng = ChaCha8Rng::seed_from_u64(config.rng_seed);
    monitor_rng.set_stream(2);
    let monitor_neg = sample_negatives(g, split.supervision_pos.len(), &mut monitor_rng)?;

    let x = GatModel::<T>::input_features(g);
    let mut adam = Adam::new(&model, config);
    let mut epochs = Vec::new();
    let mut best = (0usize, f64::NEG_INFINITY, model.clone());
    let mut stale = 0;
    let mut early_stopped = false;

    for epoch in 1..=config.max_epochs {
        let negatives = sample_negatives(g, split.supervision_pos.len(), &mut neg_rng)?;
        let (loss, grads) = model.loss_and_gradients_with(&message_graph, &x, &split.supervision_pos, &negatives)?;
        let loss = loss.as_f64();
        if !loss.is_finite() || grads.flat().iter().any(|v| !v.is_finite()) {
            return Err(Error::NonFiniteLoss { epoch, learning_rate: config.learning_rate });
        }
        adam.update(&mut model, &grads);
        let train_loss = model.loss_with(&message_graph, &x, &split.supervision_pos, &monitor_neg)?.as_f64();
        let val_auc = auc_with(&model, &val_graph, &x, &split.val_pos, &split.val_neg)?;
        epochs.push(EpochRecord { epoch, loss, train_loss, val_auc });
        log::debug!("epoch {epoch}: loss {loss:.6} train_loss {train_loss:.6} val_auc {val_auc:.4}");

        if val_auc > best.1 {
            best = (epoch, val_auc, model.clone());
            stale = 0;
        } else {
            stale += 1;
            if stale >= config.patience {
                early_stopped = true;
                break;
            }
        }
    }

    let (best_epoch, best_val_auc, model) = best;
    let test_auc = auc_with(&model, &test_graph, &x, &split.test_pos, &split.test_neg)?;
    Ok((model, TrainReport { epochs, best_epoch, best_val_auc, test_auc, early_stopped }))
}
