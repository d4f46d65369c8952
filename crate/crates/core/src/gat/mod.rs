//! Single-head graph attention network trained on link prediction.
//!
//! Per layer, with `p_v = U h_v`:
//!
//! ```text
//! w_ji = LeakyReLU(p_j·s + p_i·t)
//! α_ji = softmax of w over the in-edges of i
//! ĥ_i  = Σ_{j→i} α_ji p_j          (no self term; zero if i has no in-edges)
//! ```
//!
//! Layers are separated by an activation (ELU by default); the last layer is
//! linear. An edge `j→i` is predicted with `σ(h_j · h_i)` on the final
//! embeddings and trained with binary cross-entropy on balanced positive and
//! negative pairs. Gradients are derived by hand.

mod auc;
mod model;
mod split;
mod train;

pub use crate::linalg::Real;
pub use auc::roc_auc;
pub use model::{Activation, Embeddings, GatGradients, GatLayer, GatModel, PROB_EPS};
pub use split::{sample_negatives, split_edges, Edge, EdgeSplit, SplitConfig};
pub use train::{link_prediction_auc, train, Adam, EpochRecord, TrainConfig, TrainReport};
