use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use thiserror::Error;

use super::layers::{output_shape, Layer, LayerKind, Shape, Workspace};
use super::tensor::{Scalar, Tensor};

#[derive(Debug, Error, PartialEq)]
pub enum NetError {
    #[error("shape mismatch: expected {expected:?}, got {got:?}")]
    ShapeMismatch { expected: Vec<usize>, got: Vec<usize> },
    #[error("layer {index} ({kind}) does not accept input shape {input:?}")]
    BadArchitecture { index: usize, kind: &'static str, input: Shape },
    #[error("network must contain exactly one concat_aux layer when it has auxiliary inputs")]
    AuxLayer,
    #[error("network must end with linear_out")]
    NoOutputLayer,
    #[error("backward called without a cached forward pass")]
    NoForwardCache,
}

/// Architecture: input geometry plus the layer sequence.
#[derive(Debug, Clone, PartialEq)]
pub struct NetSpec {
    pub input: Shape,
    pub aux: usize,
    pub layers: Vec<LayerKind>,
}

impl NetSpec {
    /// Two conv layers of 32 filters (7 and 4 wide), each followed by
    /// max-pooling and ReLU, a dense layer of 800 leaky units and one linear
    /// unit per action.
    pub fn basic_paper(channels: usize, height: usize, width: usize, actions: usize) -> Self {
        NetSpec {
            input: Shape::Image { c: channels, h: height, w: width },
            aux: 0,
            layers: vec![
                LayerKind::Conv { out_channels: 32, kernel: 7 },
                LayerKind::MaxPool2,
                LayerKind::Relu,
                LayerKind::Conv { out_channels: 32, kernel: 4 },
                LayerKind::MaxPool2,
                LayerKind::Relu,
                LayerKind::Dense { units: 800 },
                LayerKind::LeakyRelu { slope: LEAKY_SLOPE },
                LayerKind::LinearOut { actions },
            ],
        }
    }

    /// Three conv layers of 32 filters (7, 5 and 3 wide) with pooling and
    /// ReLU, auxiliary scalars joined before 1024 leaky units.
    pub fn health_paper(channels: usize, height: usize, width: usize, aux: usize, actions: usize) -> Self {
        let mut layers = Vec::new();
        for kernel in [7, 5, 3] {
            layers.extend([LayerKind::Conv { out_channels: 32, kernel }, LayerKind::MaxPool2, LayerKind::Relu]);
        }
        if aux > 0 {
            layers.push(LayerKind::ConcatAux);
        }
        layers.extend([
            LayerKind::Dense { units: 1024 },
            LayerKind::LeakyRelu { slope: LEAKY_SLOPE },
            LayerKind::LinearOut { actions },
        ]);
        NetSpec { input: Shape::Image { c: channels, h: height, w: width }, aux, layers }
    }

    /// Small network for CPU training: conv 8@5×5, pool, conv 8@3×3, pool,
    /// dense 128 leaky, linear out.
    pub fn desk(channels: usize, height: usize, width: usize, aux: usize, actions: usize) -> Self {
        let mut layers = vec![
            LayerKind::Conv { out_channels: 8, kernel: 5 },
            LayerKind::MaxPool2,
            LayerKind::Relu,
            LayerKind::Conv { out_channels: 8, kernel: 3 },
            LayerKind::MaxPool2,
            LayerKind::Relu,
        ];
        if aux > 0 {
            layers.push(LayerKind::ConcatAux);
        }
        layers.extend([
            LayerKind::Dense { units: 128 },
            LayerKind::LeakyRelu { slope: LEAKY_SLOPE },
            LayerKind::LinearOut { actions },
        ]);
        NetSpec { input: Shape::Image { c: channels, h: height, w: width }, aux, layers }
    }
}

pub const LEAKY_SLOPE: f64 = 0.01;

#[derive(Debug, Clone)]
struct Cache<T> {
    batch: usize,
    /// `acts[i]` is the input of layer `i`; the last entry is the output.
    acts: Vec<Vec<T>>,
}

/// Feed-forward Q-network.
#[derive(Debug, Clone)]
pub struct Network<T: Scalar = f32> {
    spec: NetSpec,
    layers: Vec<Layer<T>>,
    cache: Option<Cache<T>>,
    workspaces: Vec<Workspace<T>>,
}

impl<T: Scalar> Network<T> {
    /// Builds the network with zero parameters.
    pub fn new(spec: NetSpec) -> Result<Self, NetError> {
        let aux_layers = spec.layers.iter().filter(|k| matches!(k, LayerKind::ConcatAux)).count();
        if (spec.aux > 0) != (aux_layers == 1) || aux_layers > 1 {
            return Err(NetError::AuxLayer);
        }
        if !matches!(spec.layers.last(), Some(LayerKind::LinearOut { .. })) {
            return Err(NetError::NoOutputLayer);
        }
        let mut shape = spec.input;
        let mut layers = Vec::with_capacity(spec.layers.len());
        for (index, &kind) in spec.layers.iter().enumerate() {
            let out = output_shape(kind, shape, spec.aux)
                .ok_or(NetError::BadArchitecture { index, kind: kind.name(), input: shape })?;
            layers.push(Layer::new(kind, shape, out));
            shape = out;
        }
        let workspaces = vec![Workspace::default(); layers.len()];
        Ok(Network { spec, layers, cache: None, workspaces })
    }

    /// Builds the network with uniform fan-scaled weights drawn from `seed`.
    pub fn seeded(spec: NetSpec, seed: u64) -> Result<Self, NetError> {
        let mut net = Network::new(spec)?;
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        for layer in &mut net.layers {
            layer.init_uniform(&mut rng);
        }
        Ok(net)
    }

    pub fn spec(&self) -> &NetSpec {
        &self.spec
    }

    pub fn layers(&self) -> &[Layer<T>] {
        &self.layers
    }

    pub fn layers_mut(&mut self) -> &mut [Layer<T>] {
        &mut self.layers
    }

    pub fn input_len(&self) -> usize {
        self.spec.input.len()
    }

    pub fn aux_len(&self) -> usize {
        self.spec.aux
    }

    pub fn output_len(&self) -> usize {
        self.layers.last().map_or(0, |l| l.output.len())
    }

    pub fn parameter_count(&self) -> usize {
        self.layers.iter().map(Layer::parameter_count).sum()
    }

    fn check(&self, input: &Tensor<T>, aux: Option<&Tensor<T>>) -> Result<usize, NetError> {
        let n = input.batch();
        let want = match self.spec.input {
            Shape::Image { c, h, w } => vec![n, c, h, w],
            Shape::Flat(f) => vec![n, f],
        };
        if input.shape() != want.as_slice() {
            return Err(NetError::ShapeMismatch { expected: want, got: input.shape().to_vec() });
        }
        match aux {
            None if self.spec.aux == 0 => Ok(n),
            Some(a) if self.spec.aux > 0 && a.shape() == [n, self.spec.aux] => Ok(n),
            other => Err(NetError::ShapeMismatch {
                expected: if self.spec.aux == 0 { vec![] } else { vec![n, self.spec.aux] },
                got: other.map_or(vec![], |a| a.shape().to_vec()),
            }),
        }
    }

    /// Forward pass that keeps activations for `backward`. Input shape is
    /// `[n, c, h, w]` (or `[n, f]` for flat input); aux is `[n, a]` and must be
    /// present exactly when the network has a concat_aux layer.
    pub fn forward(&mut self, input: &Tensor<T>, aux: Option<&Tensor<T>>) -> Result<Tensor<T>, NetError> {
        let n = self.check(input, aux)?;
        let aux_data = aux.map_or(Vec::new(), |a| a.data().to_vec());
        let mut acts = self.cache.take().map(|c| c.acts).unwrap_or_default();
        acts.resize_with(self.layers.len() + 1, Vec::new);
        acts[0].clear();
        acts[0].extend_from_slice(input.data());
        for (i, layer) in self.layers.iter().enumerate() {
            let (done, rest) = acts.split_at_mut(i + 1);
            layer.forward(n, &done[i], &aux_data, &mut rest[0], &mut self.workspaces[i]);
        }
        let out = Tensor::from_vec(&[n, self.output_len()], acts[self.layers.len()].clone());
        self.cache = Some(Cache { batch: n, acts });
        Ok(out)
    }

    /// Forward pass without touching the cache.
    pub fn predict(&self, input: &Tensor<T>, aux: Option<&Tensor<T>>) -> Result<Tensor<T>, NetError> {
        let n = self.check(input, aux)?;
        let aux_data = aux.map_or(&[][..], |a| a.data());
        let mut x = input.data().to_vec();
        let mut y = Vec::new();
        let mut ws = Workspace::default();
        for layer in &self.layers {
            layer.forward(n, &x, aux_data, &mut y, &mut ws);
            std::mem::swap(&mut x, &mut y);
        }
        Ok(Tensor::from_vec(&[n, self.output_len()], x))
    }

    pub fn zero_grad(&mut self) {
        self.layers.iter_mut().for_each(Layer::zero_grad);
    }

    /// Accumulates parameter gradients of the last `forward` given the loss
    /// gradient with respect to its output.
    pub fn backward(&mut self, d_out: &Tensor<T>) -> Result<(), NetError> {
        self.backward_impl(d_out, false).map(|_| ())
    }

    /// As `backward`, also returning gradients with respect to the input and
    /// the auxiliary values.
    pub fn backward_with_inputs(&mut self, d_out: &Tensor<T>) -> Result<(Tensor<T>, Option<Tensor<T>>), NetError> {
        self.backward_impl(d_out, true)
    }

    fn backward_impl(&mut self, d_out: &Tensor<T>, input_grad: bool) -> Result<(Tensor<T>, Option<Tensor<T>>), NetError> {
        let cache = self.cache.take().ok_or(NetError::NoForwardCache)?;
        let n = cache.batch;
        let want = [n, self.output_len()];
        if d_out.shape() != want {
            self.cache = Some(cache);
            return Err(NetError::ShapeMismatch { expected: want.to_vec(), got: d_out.shape().to_vec() });
        }
        let mut dy = d_out.data().to_vec();
        let mut dx = Vec::new();
        let mut daux = Vec::new();
        for i in (0..self.layers.len()).rev() {
            let need_dx = i > 0 || input_grad;
            let layer = &mut self.layers[i];
            let want_aux = matches!(layer.kind, LayerKind::ConcatAux);
            layer.backward(
                n,
                &cache.acts[i],
                &dy,
                need_dx.then_some(&mut dx),
                want_aux.then_some(&mut daux),
                &mut self.workspaces[i],
            );
            if need_dx {
                std::mem::swap(&mut dx, &mut dy);
            }
        }
        let shape = match self.spec.input {
            Shape::Image { c, h, w } => vec![n, c, h, w],
            Shape::Flat(f) => vec![n, f],
        };
        let d_input = if input_grad { Tensor::from_vec(&shape, dy) } else { Tensor::zeros(&[0]) };
        let d_aux = (self.spec.aux > 0 && input_grad).then(|| Tensor::from_vec(&[n, self.spec.aux], daux));
        self.cache = Some(cache);
        Ok((d_input, d_aux))
    }

    /// Visits every parameter buffer with its gradient buffer.
    pub fn for_each_param(&mut self, mut f: impl FnMut(&mut [T], &[T])) {
        for layer in &mut self.layers {
            if !layer.weights.is_empty() {
                f(&mut layer.weights, &layer.grad_weights);
                f(&mut layer.bias, &layer.grad_bias);
            }
        }
    }

    /// Copies parameters into a network of another scalar type.
    pub fn cast<U: Scalar>(&self) -> Network<U> {
        let mut net = Network::<U>::new(self.spec.clone()).expect("spec already validated");
        for (dst, src) in net.layers.iter_mut().zip(&self.layers) {
            dst.weights = src.weights.iter().map(|w| U::from_f64(w.to_f64())).collect();
            dst.bias = src.bias.iter().map(|w| U::from_f64(w.to_f64())).collect();
        }
        net
    }
}
