//! Dense feedforward networks with analytical gradients and a seeded
//! training loop.

mod loss;
mod model;
mod train;

pub use loss::{loss_and_grad, loss_value, smooth_l1, LossKind, ZERO_GUARD};
pub use model::{Activation, Gradients, MlpModel, ModelDocument, MODEL_FORMAT_VERSION};
pub use train::{
    dataset_loss, gradients, train, train_with_monitor, EpochRecord, Example, Optimizer,
    OptimizerState, Supervised, TrainConfig, TrainOutcome,
};
