use alloc::format;
use alloc::vec;
use alloc::vec::Vec;

use rand::Rng;

use crate::error::{Error, Result};
use crate::graph::{AttributedGraph, NodeId};
use crate::linalg::{gemm, Layout, Real};

/// Nonlinearity applied between layers (never after the last one).
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum Activation {
    #[default]
    Elu,
    Relu,
    Identity,
}

impl Activation {
    pub fn name(self) -> &'static str {
        match self {
            Activation::Elu => "elu",
            Activation::Relu => "relu",
            Activation::Identity => "identity",
        }
    }

    fn apply<T: Real>(self, x: T) -> T {
        match self {
            Activation::Elu if x <= T::zero() => x.exp() - T::one(),
            Activation::Relu if x <= T::zero() => T::zero(),
            _ => x,
        }
    }

    /// Derivative from the pre-activation value.
    fn derivative<T: Real>(self, x: T) -> T {
        match self {
            Activation::Elu if x <= T::zero() => x.exp(),
            Activation::Relu if x <= T::zero() => T::zero(),
            _ => T::one(),
        }
    }
}

impl core::str::FromStr for Activation {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s.to_ascii_lowercase().as_str() {
            "elu" => Ok(Self::Elu),
            "relu" => Ok(Self::Relu),
            "identity" | "linear" => Ok(Self::Identity),
            _ => Err(Error::param("activation", format!("unknown activation `{s}`"))),
        }
    }
}

/// One single-head attention layer: projection `U` (`out × in`, row-major)
/// and the source/target attention vectors `s`, `t`.
#[derive(Debug, Clone, PartialEq)]
pub struct GatLayer<T> {
    pub in_dim: usize,
    pub out_dim: usize,
    pub weight: Vec<T>,
    pub src_attention: Vec<T>,
    pub dst_attention: Vec<T>,
}

impl<T: Real> GatLayer<T> {
    pub fn zeros(in_dim: usize, out_dim: usize) -> Self {
        Self {
            in_dim,
            out_dim,
            weight: vec![T::zero(); in_dim * out_dim],
            src_attention: vec![T::zero(); out_dim],
            dst_attention: vec![T::zero(); out_dim],
        }
    }

    /// Uniform Glorot projection, zero attention vectors.
    pub fn glorot<R: Rng + ?Sized>(in_dim: usize, out_dim: usize, rng: &mut R) -> Self {
        let mut layer = Self::zeros(in_dim, out_dim);
        let limit = num_traits::Float::sqrt(6.0 / (in_dim + out_dim) as f64);
        for w in &mut layer.weight {
            *w = T::of(rng.random_range(-limit..limit));
        }
        layer
    }

    fn check(&self) -> Result<()> {
        if self.in_dim == 0 || self.out_dim == 0 {
            return Err(Error::Dimension("layer widths must be positive".into()));
        }
        if self.weight.len() != self.in_dim * self.out_dim
            || self.src_attention.len() != self.out_dim
            || self.dst_attention.len() != self.out_dim
        {
            return Err(Error::Dimension(format!(
                "layer {}x{} has inconsistent parameter sizes",
                self.out_dim, self.in_dim
            )));
        }
        Ok(())
    }

    fn slices(&self) -> [&[T]; 3] {
        [&self.weight, &self.src_attention, &self.dst_attention]
    }

    fn slices_mut(&mut self) -> [&mut [T]; 3] {
        [&mut self.weight, &mut self.src_attention, &mut self.dst_attention]
    }
}

/// Node embeddings, row-major `num_nodes × dim`.
#[derive(Debug, Clone, PartialEq)]
pub struct Embeddings<T> {
    pub dim: usize,
    pub data: Vec<T>,
}

impl<T: Real> Embeddings<T> {
    pub fn row(&self, v: NodeId) -> &[T] {
        &self.data[v as usize * self.dim..(v as usize + 1) * self.dim]
    }

    pub fn num_nodes(&self) -> usize {
        self.data.len() / self.dim.max(1)
    }

    /// Edge probability `σ(h_j · h_i)`.
    pub fn predict_edge(&self, j: NodeId, i: NodeId) -> T {
        sigmoid(self.logit(j, i))
    }

    /// Raw score `h_j · h_i`.
    pub fn logit(&self, j: NodeId, i: NodeId) -> T {
        dot(self.row(j), self.row(i))
    }
}

pub(crate) fn sigmoid<T: Real>(x: T) -> T {
    T::one() / (T::one() + (-x).exp())
}

fn dot<T: Real>(a: &[T], b: &[T]) -> T {
    a.iter().zip(b).fold(T::zero(), |acc, (&x, &y)| acc + x * y)
}

fn axpy<T: Real>(alpha: T, x: &[T], y: &mut [T]) {
    y.iter_mut().zip(x).for_each(|(y, &x)| *y += alpha * x);
}

/// Gradients with the same shapes as the model layers.
#[derive(Debug, Clone, PartialEq)]
pub struct GatGradients<T> {
    pub layers: Vec<GatLayer<T>>,
}

impl<T: Real> GatGradients<T> {
    /// All entries in parameter order (see [`GatModel::param`]).
    pub fn flat(&self) -> Vec<T> {
        self.layers.iter().flat_map(|l| l.slices().into_iter().flatten().copied()).collect()
    }
}

/// Clamp applied to probabilities before taking logs.
pub const PROB_EPS: f64 = 1e-7;

/// Multi-layer single-head graph attention network.
#[derive(Debug, Clone, PartialEq)]
pub struct GatModel<T> {
    layers: Vec<GatLayer<T>>,
    leaky_slope: T,
    activation: Activation,
    attention: Vec<Vec<T>>,
    cached_edges: Option<usize>,
}

/// Everything the backward pass needs from one layer.
struct LayerTrace<T> {
    proj: Vec<T>,
    logits: Vec<T>,
    attention: Vec<T>,
    output: Vec<T>,
}

struct Trace<T> {
    layers: Vec<LayerTrace<T>>,
    /// Post-activation inputs of layers 1.. (layer 0 reads the features).
    hidden_inputs: Vec<Vec<T>>,
}

impl<T: Real> GatModel<T> {
    pub fn from_layers(layers: Vec<GatLayer<T>>, leaky_slope: f64, activation: Activation) -> Result<Self> {
        if layers.is_empty() {
            return Err(Error::Dimension("a model needs at least one layer".into()));
        }
        for l in &layers {
            l.check()?;
        }
        for pair in layers.windows(2) {
            if pair[0].out_dim != pair[1].in_dim {
                return Err(Error::Dimension(format!(
                    "layer output width {} does not match next input width {}",
                    pair[0].out_dim, pair[1].in_dim
                )));
            }
        }
        Ok(Self { layers, leaky_slope: T::of(leaky_slope), activation, attention: Vec::new(), cached_edges: None })
    }

    /// `num_layers` layers of width `hidden` on top of `in_dim` inputs,
    /// Glorot-initialized.
    pub fn glorot<R: Rng + ?Sized>(
        in_dim: usize,
        hidden: usize,
        num_layers: usize,
        leaky_slope: f64,
        activation: Activation,
        rng: &mut R,
    ) -> Result<Self> {
        if num_layers == 0 || hidden == 0 || in_dim == 0 {
            return Err(Error::Dimension("layer count and widths must be positive".into()));
        }
        let layers =
            (0..num_layers).map(|l| GatLayer::glorot(if l == 0 { in_dim } else { hidden }, hidden, rng)).collect();
        Self::from_layers(layers, leaky_slope, activation)
    }

    pub fn layers(&self) -> &[GatLayer<T>] {
        &self.layers
    }

    pub fn layers_mut(&mut self) -> &mut [GatLayer<T>] {
        self.attention.clear();
        self.cached_edges = None;
        &mut self.layers
    }

    pub fn num_layers(&self) -> usize {
        self.layers.len()
    }

    pub fn in_dim(&self) -> usize {
        self.layers[0].in_dim
    }

    pub fn out_dim(&self) -> usize {
        self.layers[self.layers.len() - 1].out_dim
    }

    pub fn leaky_slope(&self) -> f64 {
        self.leaky_slope.as_f64()
    }

    pub fn activation(&self) -> Activation {
        self.activation
    }

    /// Converts the parameters to another float type; the cache is dropped.
    pub fn cast<U: Real>(&self) -> GatModel<U> {
        let conv = |v: &[T]| v.iter().map(|x| U::of(x.as_f64())).collect::<Vec<U>>();
        let layers = self
            .layers
            .iter()
            .map(|l| GatLayer {
                in_dim: l.in_dim,
                out_dim: l.out_dim,
                weight: conv(&l.weight),
                src_attention: conv(&l.src_attention),
                dst_attention: conv(&l.dst_attention),
            })
            .collect();
        GatModel {
            layers,
            leaky_slope: U::of(self.leaky_slope.as_f64()),
            activation: self.activation,
            attention: Vec::new(),
            cached_edges: None,
        }
    }

    pub fn param_count(&self) -> usize {
        self.layers.iter().map(|l| l.weight.len() + 2 * l.out_dim).sum()
    }

    fn locate(&self, mut idx: usize) -> (usize, usize, usize) {
        for (li, l) in self.layers.iter().enumerate() {
            for (si, s) in l.slices().iter().enumerate() {
                if idx < s.len() {
                    return (li, si, idx);
                }
                idx -= s.len();
            }
        }
        panic!("parameter index out of range");
    }

    /// Parameter by flat index: per layer, `U` row-major, then `s`, then `t`.
    pub fn param(&self, idx: usize) -> T {
        let (l, s, k) = self.locate(idx);
        self.layers[l].slices()[s][k]
    }

    pub fn set_param(&mut self, idx: usize, value: T) {
        let (l, s, k) = self.locate(idx);
        self.layers_mut()[l].slices_mut()[s][k] = value;
    }

    pub(crate) fn param_slices_mut(&mut self) -> Vec<&mut [T]> {
        self.attention.clear();
        self.cached_edges = None;
        self.layers.iter_mut().flat_map(|l| l.slices_mut()).collect()
    }

    /// Attention per edge id for `layer`, from the last [`Self::forward`].
    pub fn attention(&self, layer: usize) -> Option<&[T]> {
        self.attention.get(layer).map(|a| a.as_slice())
    }

    /// Errors unless the cache was filled by a forward pass on a graph with
    /// `num_edges` edges.
    pub fn cached_attention(&self, layer: usize, num_edges: usize) -> Result<&[T]> {
        let cached = self.cached_edges.ok_or(Error::EmptyAttentionCache)?;
        if cached != num_edges {
            return Err(Error::StaleAttentionCache { cached, actual: num_edges });
        }
        self.attention(layer)
            .ok_or_else(|| Error::param("layer", format!("model has {} layers, asked for {layer}", self.layers.len())))
    }

    fn check_graph(&self, g: &AttributedGraph) -> Result<()> {
        if g.features().dim() != self.in_dim() {
            return Err(Error::Dimension(format!(
                "model expects {}-dimensional features, graph has {}",
                self.in_dim(),
                g.features().dim()
            )));
        }
        Ok(())
    }

    /// Features converted to the model's float type.
    pub fn input_features(g: &AttributedGraph) -> Vec<T> {
        g.features().as_slice().iter().map(|&x| T::of(x as f64)).collect()
    }

    /// Forward pass; fills the attention cache and returns final embeddings.
    pub fn forward(&mut self, g: &AttributedGraph) -> Result<Embeddings<T>> {
        self.check_graph(g)?;
        let x = Self::input_features(g);
        let trace = self.trace(g, &x);
        self.attention = trace.layers.iter().map(|l| l.attention.clone()).collect();
        self.cached_edges = Some(g.num_edges());
        Ok(Embeddings { dim: self.out_dim(), data: trace.layers.into_iter().last().expect("non-empty").output })
    }

    /// Forward pass on pre-converted features, without touching the cache.
    pub fn embed(&self, g: &AttributedGraph, x: &[T]) -> Result<Embeddings<T>> {
        self.check_graph(g)?;
        let trace = self.trace(g, x);
        Ok(Embeddings { dim: self.out_dim(), data: trace.layers.into_iter().last().expect("non-empty").output })
    }

    fn leaky(&self, x: T) -> T {
        if x > T::zero() {
            x
        } else {
            self.leaky_slope * x
        }
    }

    fn trace(&self, g: &AttributedGraph, x: &[T]) -> Trace<T> {
        let mut layers: Vec<LayerTrace<T>> = Vec::with_capacity(self.layers.len());
        let mut hidden_inputs: Vec<Vec<T>> = Vec::with_capacity(self.layers.len().saturating_sub(1));
        for (li, layer) in self.layers.iter().enumerate() {
            let input: &[T] = if li == 0 { x } else { &hidden_inputs[li - 1] };
            let lt = self.layer_forward(layer, g, input);
            if li + 1 < self.layers.len() {
                hidden_inputs.push(lt.output.iter().map(|&v| self.activation.apply(v)).collect());
            }
            layers.push(lt);
        }
        Trace { layers, hidden_inputs }
    }

    fn layer_forward(&self, layer: &GatLayer<T>, g: &AttributedGraph, input: &[T]) -> LayerTrace<T> {
        let n = g.num_nodes();
        let out = layer.out_dim;
        let mut proj = vec![T::zero(); n * out];
        gemm(Layout::ABt, n, layer.in_dim, out, input, &layer.weight, &mut proj, false);
        let src: Vec<T> = proj.chunks_exact(out).map(|p| dot(p, &layer.src_attention)).collect();
        let dst: Vec<T> = proj.chunks_exact(out).map(|p| dot(p, &layer.dst_attention)).collect();

        let m = g.num_edges();
        let mut logits = vec![T::zero(); m];
        let mut attention = vec![T::zero(); m];
        let mut output = vec![T::zero(); n * out];
        for i in 0..n as NodeId {
            let ids = g.in_edge_ids(i);
            if ids.is_empty() {
                continue;
            }
            let mut top = T::neg_infinity();
            for (&e, &j) in ids.iter().zip(g.in_neighbors(i)) {
                logits[e] = src[j as usize] + dst[i as usize];
                top = top.max(self.leaky(logits[e]));
            }
            let mut total = T::zero();
            for &e in ids {
                let w = (self.leaky(logits[e]) - top).exp();
                attention[e] = w;
                total += w;
            }
            let row = &mut output[i as usize * out..(i as usize + 1) * out];
            for (&e, &j) in ids.iter().zip(g.in_neighbors(i)) {
                attention[e] /= total;
                axpy(attention[e], &proj[j as usize * out..(j as usize + 1) * out], row);
            }
        }
        LayerTrace { proj, logits, attention, output }
    }

    /// Binary cross-entropy over positive and negative pairs, and its
    /// gradient with respect to every parameter.
    pub fn loss_and_gradients(
        &self,
        g: &AttributedGraph,
        positives: &[(NodeId, NodeId)],
        negatives: &[(NodeId, NodeId)],
    ) -> Result<(T, GatGradients<T>)> {
        self.check_graph(g)?;
        let x = Self::input_features(g);
        self.loss_and_gradients_with(g, &x, positives, negatives)
    }

    /// Loss only, with embeddings from `embed`.
    pub(crate) fn loss_with(
        &self,
        g: &AttributedGraph,
        x: &[T],
        positives: &[(NodeId, NodeId)],
        negatives: &[(NodeId, NodeId)],
    ) -> Result<T> {
        let h = self.embed(g, x)?;
        let eps = T::of(PROB_EPS);
        let labelled = positives.iter().map(|p| (p, T::one())).chain(negatives.iter().map(|p| (p, T::zero())));
        let mut loss = T::zero();
        for (&(j, i), y) in labelled {
            g.check_node(j as usize)?;
            g.check_node(i as usize)?;
            let zc = h.predict_edge(j, i).max(eps).min(T::one() - eps);
            loss -= y * zc.ln() + (T::one() - y) * (T::one() - zc).ln();
        }
        Ok(loss)
    }

    pub(crate) fn loss_and_gradients_with(
        &self,
        g: &AttributedGraph,
        x: &[T],
        positives: &[(NodeId, NodeId)],
        negatives: &[(NodeId, NodeId)],
    ) -> Result<(T, GatGradients<T>)> {
        for &(a, b) in positives.iter().chain(negatives) {
            g.check_node(a as usize)?;
            g.check_node(b as usize)?;
        }
        let trace = self.trace(g, x);
        let last = trace.layers.last().expect("non-empty");
        let dim = self.out_dim();
        let h = &last.output;
        let eps = T::of(PROB_EPS);

        let mut loss = T::zero();
        let mut d_out = vec![T::zero(); h.len()];
        let labelled = positives.iter().map(|p| (p, T::one())).chain(negatives.iter().map(|p| (p, T::zero())));
        for (&(j, i), y) in labelled {
            let (ju, iu) = (j as usize * dim, i as usize * dim);
            let z = sigmoid(dot(&h[ju..ju + dim], &h[iu..iu + dim]));
            let zc = z.max(eps).min(T::one() - eps);
            loss -= y * zc.ln() + (T::one() - y) * (T::one() - zc).ln();
            let coef = z - y;
            for k in 0..dim {
                let (hj, hi) = (h[ju + k], h[iu + k]);
                d_out[ju + k] += coef * hi;
                d_out[iu + k] += coef * hj;
            }
        }

        let grads = self.backward(g, x, &trace, d_out);
        Ok((loss, grads))
    }

    fn backward(&self, g: &AttributedGraph, x: &[T], trace: &Trace<T>, mut d_out: Vec<T>) -> GatGradients<T> {
        let mut grads: Vec<GatLayer<T>> = self.layers.iter().map(|l| GatLayer::zeros(l.in_dim, l.out_dim)).collect();
        for li in (0..self.layers.len()).rev() {
            let input: &[T] = if li == 0 { x } else { &trace.hidden_inputs[li - 1] };
            let d_input = self.layer_backward(li, g, input, &trace.layers[li], &d_out, &mut grads[li], li > 0);
            if li > 0 {
                let pre = &trace.layers[li - 1].output;
                d_out = d_input.iter().zip(pre).map(|(&d, &p)| d * self.activation.derivative(p)).collect();
            }
        }
        GatGradients { layers: grads }
    }

    #[allow(clippy::too_many_arguments)]
    fn layer_backward(
        &self,
        li: usize,
        g: &AttributedGraph,
        input: &[T],
        lt: &LayerTrace<T>,
        d_out: &[T],
        grad: &mut GatLayer<T>,
        want_input_grad: bool,
    ) -> Vec<T> {
        let layer = &self.layers[li];
        let n = g.num_nodes();
        let out = layer.out_dim;

        let mut d_proj = vec![T::zero(); n * out];
        let mut d_src = vec![T::zero(); n];
        let mut d_dst = vec![T::zero(); n];
        let mut d_att = Vec::new();
        for i in 0..n as NodeId {
            let ids = g.in_edge_ids(i);
            if ids.is_empty() {
                continue;
            }
            let iu = i as usize;
            let d_row = &d_out[iu * out..(iu + 1) * out];
            d_att.clear();
            let mut weighted = T::zero();
            for (&e, &j) in ids.iter().zip(g.in_neighbors(i)) {
                let ju = j as usize;
                let da = dot(d_row, &lt.proj[ju * out..(ju + 1) * out]);
                d_att.push(da);
                weighted += lt.attention[e] * da;
                axpy(lt.attention[e], d_row, &mut d_proj[ju * out..(ju + 1) * out]);
            }
            for ((&e, &j), &da) in ids.iter().zip(g.in_neighbors(i)).zip(&d_att) {
                let slope = if lt.logits[e] > T::zero() { T::one() } else { self.leaky_slope };
                let d_logit = lt.attention[e] * (da - weighted) * slope;
                d_src[j as usize] += d_logit;
                d_dst[iu] += d_logit;
            }
        }
        for v in 0..n {
            let p = &lt.proj[v * out..(v + 1) * out];
            axpy(d_src[v], p, &mut grad.src_attention);
            axpy(d_dst[v], p, &mut grad.dst_attention);
            let dp = &mut d_proj[v * out..(v + 1) * out];
            axpy(d_src[v], &layer.src_attention, dp);
            axpy(d_dst[v], &layer.dst_attention, dp);
        }
        gemm(Layout::AtB, out, n, layer.in_dim, &d_proj, input, &mut grad.weight, false);
        if !want_input_grad {
            return Vec::new();
        }
        let mut d_input = vec![T::zero(); n * layer.in_dim];
        gemm(Layout::AB, n, out, layer.in_dim, &d_proj, &layer.weight, &mut d_input, false);
        d_input
    }
}
