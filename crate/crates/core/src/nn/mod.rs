//! GRU → flatten → dense softmax classifier with exact manual gradients.

mod checkpoint;
mod dense;
mod gradcheck;
mod gru;
mod loss;
mod model;
mod optim;
mod train;

pub use checkpoint::{Checkpoint, Tensor, CHECKPOINT_FORMAT, CHECKPOINT_VERSION};
pub use dense::{dense_backward, dense_forward, flatten, unflatten, DenseParams};
pub use gradcheck::{gradient_check, relative_error, GradCheckReport, REL_ERROR_FLOOR};
pub use gru::{gru_backward, gru_cell_forward, gru_forward, CellCache, GruParams};
pub use loss::{argmax, softmax, softmax_cross_entropy};
pub use model::{rows_to_sequences, ModelConfig, ModelParams, Parameters, Sequence, TENSOR_NAMES};
pub use optim::{adam_step, sgd_step, AdamState, OptimizerKind, TrainConfig};
pub use train::{evaluate, train, train_from, SequenceSet, TrainHistory, HISTORY_HEADER};
