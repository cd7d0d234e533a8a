use rand::Rng;

use super::tensor::{gemm, Scalar};

/// Activation shape of one sample.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Shape {
    Image { c: usize, h: usize, w: usize },
    Flat(usize),
}

impl Shape {
    pub fn len(self) -> usize {
        match self {
            Shape::Image { c, h, w } => c * h * w,
            Shape::Flat(n) => n,
        }
    }

    pub fn is_empty(self) -> bool {
        self.len() == 0
    }
}

/// Layer description, independent of parameters.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum LayerKind {
    /// Valid padding, stride 1, square kernel.
    Conv { out_channels: usize, kernel: usize },
    /// 2×2 windows, stride 2; odd trailing rows/columns are dropped.
    MaxPool2,
    Relu,
    LeakyRelu { slope: f64 },
    Dense { units: usize },
    /// Flattens and appends the auxiliary inputs.
    ConcatAux,
    /// Dense layer with identity activation producing the Q-values.
    LinearOut { actions: usize },
}

impl LayerKind {
    pub fn tag(self) -> u8 {
        match self {
            LayerKind::Conv { .. } => 0,
            LayerKind::MaxPool2 => 1,
            LayerKind::Relu => 2,
            LayerKind::LeakyRelu { .. } => 3,
            LayerKind::Dense { .. } => 4,
            LayerKind::ConcatAux => 5,
            LayerKind::LinearOut { .. } => 6,
        }
    }

    pub fn name(self) -> &'static str {
        match self {
            LayerKind::Conv { .. } => "conv",
            LayerKind::MaxPool2 => "maxpool2",
            LayerKind::Relu => "relu",
            LayerKind::LeakyRelu { .. } => "leaky_relu",
            LayerKind::Dense { .. } => "dense",
            LayerKind::ConcatAux => "concat_aux",
            LayerKind::LinearOut { .. } => "linear_out",
        }
    }
}

/// A layer with its parameters, gradient accumulators and forward cache.
#[derive(Debug, Clone)]
pub struct Layer<T> {
    pub kind: LayerKind,
    pub input: Shape,
    pub output: Shape,
    /// Conv: `[out][in][k][k]`; dense: `[units][inputs]`.
    pub weights: Vec<T>,
    pub bias: Vec<T>,
    pub grad_weights: Vec<T>,
    pub grad_bias: Vec<T>,
}

/// Scratch buffers for one layer's forward and backward passes.
#[derive(Debug, Clone, Default)]
pub struct Workspace<T> {
    /// Max-pool argmax per output element of the last forward batch.
    argmax: Vec<u32>,
    col: Vec<T>,
    dcol: Vec<T>,
}

/// Output shape of `kind` applied to `input`, or `None` when it does not fit.
pub fn output_shape(kind: LayerKind, input: Shape, aux: usize) -> Option<Shape> {
    Some(match (kind, input) {
        (LayerKind::Conv { out_channels, kernel }, Shape::Image { h, w, .. }) => {
            if kernel == 0 || kernel > h || kernel > w || out_channels == 0 {
                return None;
            }
            Shape::Image { c: out_channels, h: h - kernel + 1, w: w - kernel + 1 }
        }
        (LayerKind::MaxPool2, Shape::Image { c, h, w }) => {
            if h < 2 || w < 2 {
                return None;
            }
            Shape::Image { c, h: h / 2, w: w / 2 }
        }
        (LayerKind::Relu | LayerKind::LeakyRelu { .. }, s) => s,
        (LayerKind::Dense { units } | LayerKind::LinearOut { actions: units }, _) if units > 0 => Shape::Flat(units),
        (LayerKind::ConcatAux, s) => Shape::Flat(s.len() + aux),
        _ => return None,
    })
}

impl<T: Scalar> Layer<T> {
    pub fn new(kind: LayerKind, input: Shape, output: Shape) -> Self {
        let (nw, nb) = match (kind, input) {
            (LayerKind::Conv { out_channels, kernel }, Shape::Image { c, .. }) => {
                (out_channels * c * kernel * kernel, out_channels)
            }
            (LayerKind::Dense { units } | LayerKind::LinearOut { actions: units }, _) => (units * input.len(), units),
            _ => (0, 0),
        };
        Layer {
            kind,
            input,
            output,
            weights: vec![T::ZERO; nw],
            bias: vec![T::ZERO; nb],
            grad_weights: vec![T::ZERO; nw],
            grad_bias: vec![T::ZERO; nb],
        }
    }

    pub fn parameter_count(&self) -> usize {
        self.weights.len() + self.bias.len()
    }

    /// Weights uniform in ±√(6 / (fan_in + fan_out)); biases zero.
    pub fn init_uniform<R: Rng>(&mut self, rng: &mut R) {
        let (fan_in, fan_out) = match (self.kind, self.input) {
            (LayerKind::Conv { out_channels, kernel }, Shape::Image { c, .. }) => {
                (c * kernel * kernel, out_channels * kernel * kernel)
            }
            (LayerKind::Dense { units } | LayerKind::LinearOut { actions: units }, input) => (input.len(), units),
            _ => return,
        };
        let limit = (6.0 / (fan_in + fan_out) as f64).sqrt();
        for w in &mut self.weights {
            *w = T::from_f64(rng.gen_range(-limit..=limit));
        }
        self.bias.iter_mut().for_each(|b| *b = T::ZERO);
    }

    pub fn zero_grad(&mut self) {
        self.grad_weights.iter_mut().for_each(|g| *g = T::ZERO);
        self.grad_bias.iter_mut().for_each(|g| *g = T::ZERO);
    }

    /// Forward pass over a batch of `n` samples laid out contiguously.
    pub fn forward(&self, n: usize, x: &[T], aux: &[T], out: &mut Vec<T>, ws: &mut Workspace<T>) {
        let in_len = self.input.len();
        let out_len = self.output.len();
        out.clear();
        out.resize(n * out_len, T::ZERO);
        match self.kind {
            LayerKind::Conv { out_channels, kernel } => {
                let Shape::Image { c, h, w } = self.input else { unreachable!() };
                let (oh, ow) = (h - kernel + 1, w - kernel + 1);
                let rows = c * kernel * kernel;
                ws.col.resize(rows * oh * ow, T::ZERO);
                for s in 0..n {
                    im2col(&x[s * in_len..(s + 1) * in_len], c, h, w, kernel, &mut ws.col);
                    let y = &mut out[s * out_len..(s + 1) * out_len];
                    for (o, plane) in y.chunks_exact_mut(oh * ow).enumerate() {
                        plane.iter_mut().for_each(|v| *v = self.bias[o]);
                    }
                    gemm(false, false, out_channels, oh * ow, rows, T::ONE, &self.weights, &ws.col, T::ONE, y);
                }
            }
            LayerKind::MaxPool2 => {
                let Shape::Image { c, h, w } = self.input else { unreachable!() };
                let (oh, ow) = (h / 2, w / 2);
                ws.argmax.resize(n * out_len, 0);
                for s in 0..n {
                    let xs = &x[s * in_len..(s + 1) * in_len];
                    for ch in 0..c {
                        for oy in 0..oh {
                            for ox in 0..ow {
                                let base = ch * h * w + 2 * oy * w + 2 * ox;
                                let mut best = base;
                                for idx in [base + 1, base + w, base + w + 1] {
                                    if xs[idx] > xs[best] {
                                        best = idx;
                                    }
                                }
                                let o = s * out_len + ch * oh * ow + oy * ow + ox;
                                out[o] = xs[best];
                                ws.argmax[o] = best as u32;
                            }
                        }
                    }
                }
            }
            LayerKind::Relu => {
                for (y, &v) in out.iter_mut().zip(x) {
                    *y = if v > T::ZERO { v } else { T::ZERO };
                }
            }
            LayerKind::LeakyRelu { slope } => {
                let slope = T::from_f64(slope);
                for (y, &v) in out.iter_mut().zip(x) {
                    *y = if v > T::ZERO { v } else { v * slope };
                }
            }
            LayerKind::Dense { units } | LayerKind::LinearOut { actions: units } => {
                for row in out.chunks_exact_mut(units) {
                    row.copy_from_slice(&self.bias);
                }
                gemm(false, true, n, units, in_len, T::ONE, x, &self.weights, T::ONE, out);
            }
            LayerKind::ConcatAux => {
                let a = out_len - in_len;
                for s in 0..n {
                    let y = &mut out[s * out_len..(s + 1) * out_len];
                    y[..in_len].copy_from_slice(&x[s * in_len..(s + 1) * in_len]);
                    y[in_len..].copy_from_slice(&aux[s * a..(s + 1) * a]);
                }
            }
        }
    }

    /// Accumulates parameter gradients and, when `dx` is given, writes the
    /// input gradient. `x` is the input of the matching forward call.
    pub fn backward(
        &mut self,
        n: usize,
        x: &[T],
        dy: &[T],
        dx: Option<&mut Vec<T>>,
        daux: Option<&mut Vec<T>>,
        ws: &mut Workspace<T>,
    ) {
        let in_len = self.input.len();
        let out_len = self.output.len();
        let mut dx = dx;
        if let Some(d) = dx.as_deref_mut() {
            d.clear();
            d.resize(n * in_len, T::ZERO);
        }
        match self.kind {
            LayerKind::Conv { out_channels, kernel } => {
                let Shape::Image { c, h, w } = self.input else { unreachable!() };
                let (oh, ow) = (h - kernel + 1, w - kernel + 1);
                let rows = c * kernel * kernel;
                ws.col.resize(rows * oh * ow, T::ZERO);
                ws.dcol.resize(rows * oh * ow, T::ZERO);
                for s in 0..n {
                    let dys = &dy[s * out_len..(s + 1) * out_len];
                    for (o, plane) in dys.chunks_exact(oh * ow).enumerate() {
                        let mut acc = T::ZERO;
                        for &v in plane {
                            acc += v;
                        }
                        self.grad_bias[o] += acc;
                    }
                    im2col(&x[s * in_len..(s + 1) * in_len], c, h, w, kernel, &mut ws.col);
                    gemm(false, true, out_channels, rows, oh * ow, T::ONE, dys, &ws.col, T::ONE, &mut self.grad_weights);
                    if let Some(d) = dx.as_deref_mut() {
                        gemm(true, false, rows, oh * ow, out_channels, T::ONE, &self.weights, dys, T::ZERO, &mut ws.dcol);
                        col2im(&ws.dcol, c, h, w, kernel, &mut d[s * in_len..(s + 1) * in_len]);
                    }
                }
            }
            LayerKind::MaxPool2 => {
                if let Some(d) = dx {
                    for s in 0..n {
                        for o in 0..out_len {
                            let idx = s * out_len + o;
                            d[s * in_len + ws.argmax[idx] as usize] += dy[idx];
                        }
                    }
                }
            }
            LayerKind::Relu => {
                if let Some(d) = dx {
                    for ((g, &v), &u) in d.iter_mut().zip(x).zip(dy) {
                        *g = if v > T::ZERO { u } else { T::ZERO };
                    }
                }
            }
            LayerKind::LeakyRelu { slope } => {
                if let Some(d) = dx {
                    let slope = T::from_f64(slope);
                    for ((g, &v), &u) in d.iter_mut().zip(x).zip(dy) {
                        *g = if v > T::ZERO { u } else { u * slope };
                    }
                }
            }
            LayerKind::Dense { units } | LayerKind::LinearOut { actions: units } => {
                for row in dy.chunks_exact(units) {
                    for (g, &v) in self.grad_bias.iter_mut().zip(row) {
                        *g += v;
                    }
                }
                gemm(true, false, units, in_len, n, T::ONE, dy, x, T::ONE, &mut self.grad_weights);
                if let Some(d) = dx {
                    gemm(false, false, n, in_len, units, T::ONE, dy, &self.weights, T::ZERO, d);
                }
            }
            LayerKind::ConcatAux => {
                let a = out_len - in_len;
                if let Some(d) = dx {
                    for s in 0..n {
                        d[s * in_len..(s + 1) * in_len].copy_from_slice(&dy[s * out_len..s * out_len + in_len]);
                    }
                }
                if let Some(da) = daux {
                    da.clear();
                    for s in 0..n {
                        da.extend_from_slice(&dy[s * out_len + in_len..(s + 1) * out_len]);
                    }
                    debug_assert_eq!(da.len(), n * a);
                }
            }
        }
    }
}

/// Unfolds one `c×h×w` image into rows `(ch, ky, kx)` by columns `(oy, ox)`.
fn im2col<T: Scalar>(x: &[T], c: usize, h: usize, w: usize, k: usize, col: &mut [T]) {
    let (oh, ow) = (h - k + 1, w - k + 1);
    let mut r = 0;
    for ch in 0..c {
        for ky in 0..k {
            for kx in 0..k {
                let dst = &mut col[r * oh * ow..(r + 1) * oh * ow];
                for oy in 0..oh {
                    let src = ch * h * w + (oy + ky) * w + kx;
                    dst[oy * ow..(oy + 1) * ow].copy_from_slice(&x[src..src + ow]);
                }
                r += 1;
            }
        }
    }
}

/// Adjoint of `im2col`: adds columns back into image positions.
fn col2im<T: Scalar>(col: &[T], c: usize, h: usize, w: usize, k: usize, x: &mut [T]) {
    let (oh, ow) = (h - k + 1, w - k + 1);
    let mut r = 0;
    for ch in 0..c {
        for ky in 0..k {
            for kx in 0..k {
                let src = &col[r * oh * ow..(r + 1) * oh * ow];
                for oy in 0..oh {
                    let dst = ch * h * w + (oy + ky) * w + kx;
                    for (d, &s) in x[dst..dst + ow].iter_mut().zip(&src[oy * ow..(oy + 1) * ow]) {
                        *d += s;
                    }
                }
                r += 1;
            }
        }
    }
}
