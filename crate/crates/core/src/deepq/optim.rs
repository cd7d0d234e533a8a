use super::network::Network;
use super::tensor::Scalar;

pub const RMSPROP_DECAY: f64 = 0.95;
pub const RMSPROP_EPSILON: f64 = 1e-8;

#[derive(Debug, Clone, Copy, PartialEq)]
pub enum Optimizer {
    /// `p ← p − α·g`
    Sgd { learning_rate: f64 },
    /// `s ← ρ·s + (1−ρ)·g²; p ← p − α·g/√(s + ε)`
    RmsProp { learning_rate: f64, decay: f64, epsilon: f64 },
}

impl Optimizer {
    pub fn rmsprop(learning_rate: f64) -> Self {
        Optimizer::RmsProp { learning_rate, decay: RMSPROP_DECAY, epsilon: RMSPROP_EPSILON }
    }

    pub fn learning_rate(self) -> f64 {
        match self {
            Optimizer::Sgd { learning_rate } | Optimizer::RmsProp { learning_rate, .. } => learning_rate,
        }
    }
}

/// One update of a parameter buffer. `state` holds the RMSProp running mean
/// of squared gradients and is ignored by SGD.
pub fn optimizer_step<T: Scalar>(params: &mut [T], grads: &[T], state: &mut [T], opt: Optimizer) {
    assert_eq!(params.len(), grads.len(), "parameter and gradient lengths differ");
    match opt {
        Optimizer::Sgd { learning_rate } => {
            let lr = T::from_f64(learning_rate);
            for (p, &g) in params.iter_mut().zip(grads) {
                *p = *p - lr * g;
            }
        }
        Optimizer::RmsProp { learning_rate, decay, epsilon } => {
            assert_eq!(params.len(), state.len(), "optimizer state length differs");
            let (lr, rho, eps) = (T::from_f64(learning_rate), T::from_f64(decay), T::from_f64(epsilon));
            let keep = T::ONE - rho;
            for ((p, &g), s) in params.iter_mut().zip(grads).zip(state.iter_mut()) {
                *s = rho * *s + keep * g * g;
                *p = *p - lr * g / (*s + eps).sqrt();
            }
        }
    }
}

/// Optimizer state for every parameter buffer of a network.
#[derive(Debug, Clone)]
pub struct OptimizerState<T> {
    pub optimizer: Optimizer,
    buffers: Vec<Vec<T>>,
}

impl<T: Scalar> OptimizerState<T> {
    pub fn new(optimizer: Optimizer, net: &mut Network<T>) -> Self {
        let mut buffers = Vec::new();
        if matches!(optimizer, Optimizer::RmsProp { .. }) {
            net.for_each_param(|p, _| buffers.push(vec![T::ZERO; p.len()]));
        }
        OptimizerState { optimizer, buffers }
    }

    /// Applies the accumulated gradients of `net`.
    pub fn step(&mut self, net: &mut Network<T>) {
        let opt = self.optimizer;
        let mut i = 0;
        let buffers = &mut self.buffers;
        net.for_each_param(|p, g| {
            let state = buffers.get_mut(i).map_or(&mut [][..], |b| &mut b[..]);
            optimizer_step(p, g, state, opt);
            i += 1;
        });
    }
}
