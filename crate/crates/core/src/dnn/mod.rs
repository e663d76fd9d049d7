//! A small convolutional classifier trained from scratch.
//!
//! Everything runs in f64. Convolutions are lowered to matrix products
//! (im2col); batch gradients are summed over fixed-size chunks in index
//! order so training is bit-reproducible for any thread count.

mod checkpoint;
mod eval;
mod linalg;
mod net;
mod optim;
mod spec;
mod train;

pub use checkpoint::{
    decode_checkpoint, encode_checkpoint, load_checkpoint, save_checkpoint, CHECKPOINT_MAGIC,
    CHECKPOINT_VERSION,
};
pub use eval::{
    evaluate, predict, report_from_predictions, ConfusionMatrix, EvalReport, GroupAccuracy,
};
pub use net::{argmax, Grads, Network, Param, Pass};
pub use optim::Adam;
pub use spec::{LayerSpec, NetSpec, Shape};
pub use train::{train, train_with, EarlyStopping, History, HistoryRow, StopReason, TrainConfig};
