//! Deep Q-learning from scratch: tensors, layers, replay, optimizers and
//! the training loop.

pub mod checkpoint;
mod layers;
mod network;
mod optim;
mod profiles;
mod qlearn;
mod replay;
mod tensor;
mod train;

pub use layers::{output_shape, Layer, LayerKind, Shape};
pub use network::{NetError, NetSpec, Network, LEAKY_SLOPE};
pub use tensor::{gemm, Scalar, Tensor};
pub use optim::{optimizer_step, Optimizer, OptimizerState, RMSPROP_DECAY, RMSPROP_EPSILON};
pub use qlearn::{argmax, batch_inputs, learn_step, q_targets, td_gradient, EpsilonSchedule};
pub use replay::{ReplayBuffer, StateInput, Transition};
pub use profiles::{Architecture, Experiment, Profile, DESK_REWARD_SCALE};
pub use train::{
    curve_csv, eval_episode_seed, evaluate, evaluate_policy, evaluate_random, greedy_action, input_geometry, train,
    CurvePoint, Preprocessor, ScoreStats, TrainConfig, TrainError, TrainOutcome,
};
