use super::network::{NetError, Network};
use super::optim::OptimizerState;
use super::replay::{StateInput, Transition};
use super::tensor::{Scalar, Tensor};

/// Linear ε decay between two learning steps.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct EpsilonSchedule {
    pub start: f64,
    pub end: f64,
    pub decay_start: u64,
    pub decay_end: u64,
}

impl EpsilonSchedule {
    /// `start` before `decay_start`, linear to `end` at `decay_end`, then
    /// constant.
    pub fn at(&self, step: u64) -> f64 {
        if step <= self.decay_start {
            self.start
        } else if step >= self.decay_end {
            self.end
        } else {
            let t = (step - self.decay_start) as f64 / (self.decay_end - self.decay_start) as f64;
            self.start + (self.end - self.start) * t
        }
    }
}

/// Assembles network inputs `[n, c, h, w]` and aux `[n, a]` for a batch of
/// states.
pub fn batch_inputs<T: Scalar>(net: &Network<T>, states: &[&StateInput]) -> (Tensor<T>, Option<Tensor<T>>) {
    let n = states.len();
    let mut pixels = Vec::with_capacity(n * net.input_len());
    let mut aux = Vec::with_capacity(n * net.aux_len());
    for s in states {
        s.write_pixels(&mut pixels);
        aux.extend_from_slice(&s.aux);
    }
    let shape = match net.spec().input {
        super::Shape::Image { c, h, w } => vec![n, c, h, w],
        super::Shape::Flat(f) => vec![n, f],
    };
    let pixels = Tensor::from_vec(&shape, pixels.into_iter().map(|x| T::from_f64(x as f64)).collect());
    let aux = (net.aux_len() > 0)
        .then(|| Tensor::from_vec(&[n, net.aux_len()], aux.into_iter().map(|x| T::from_f64(x as f64)).collect()));
    (pixels, aux)
}

/// Regression targets: `r` for terminal transitions, otherwise
/// `r + γ·maxₐ Q(next, a)` from the same network.
pub fn q_targets<T: Scalar>(batch: &[&Transition], net: &Network<T>, gamma: f64) -> Result<Vec<f64>, NetError> {
    assert!(!batch.is_empty(), "q_targets needs a non-empty batch");
    let live: Vec<&StateInput> = batch.iter().filter_map(|t| t.next.as_deref()).collect();
    let mut best = Vec::new();
    if !live.is_empty() {
        let (x, aux) = batch_inputs(net, &live);
        let q = net.predict(&x, aux.as_ref())?;
        let a = net.output_len();
        best = q.data().chunks_exact(a).map(|row| row.iter().map(|v| v.to_f64()).fold(f64::NEG_INFINITY, f64::max)).collect();
    }
    let mut next = best.into_iter();
    Ok(batch
        .iter()
        .map(|t| {
            let r = t.reward as f64;
            if t.terminal() {
                r
            } else {
                r + gamma * next.next().expect("one maximum per live transition")
            }
        })
        .collect())
}

/// One gradient step on the mean squared error between the taken action's
/// Q-value and its target. Returns the loss before the update.
pub fn learn_step<T: Scalar>(
    net: &mut Network<T>,
    opt: &mut OptimizerState<T>,
    batch: &[&Transition],
    gamma: f64,
) -> Result<f64, NetError> {
    let targets = q_targets(batch, net, gamma)?;
    let states: Vec<&StateInput> = batch.iter().map(|t| &*t.state).collect();
    let (x, aux) = batch_inputs(net, &states);
    let q = net.forward(&x, aux.as_ref())?;
    let (grad, loss) = td_gradient(&q, batch, &targets);
    net.zero_grad();
    net.backward(&grad)?;
    opt.step(net);
    Ok(loss)
}

/// Gradient of `(1/n) Σ (Q(sᵢ, aᵢ) − yᵢ)²` with respect to all Q outputs:
/// non-zero only at the taken actions.
pub fn td_gradient<T: Scalar>(q: &Tensor<T>, batch: &[&Transition], targets: &[f64]) -> (Tensor<T>, f64) {
    let n = batch.len();
    let a = q.shape()[1];
    let mut grad = Tensor::zeros(&[n, a]);
    let mut loss = 0.0;
    for (i, (t, &y)) in batch.iter().zip(targets).enumerate() {
        let diff = q.data()[i * a + t.action].to_f64() - y;
        loss += diff * diff / n as f64;
        grad.data_mut()[i * a + t.action] = T::from_f64(2.0 * diff / n as f64);
    }
    (grad, loss)
}

/// Index of the largest value; ties go to the lowest index.
pub fn argmax<T: Scalar>(row: &[T]) -> usize {
    let mut best = 0;
    for (i, v) in row.iter().enumerate() {
        if *v > row[best] {
            best = i;
        }
    }
    best
}
