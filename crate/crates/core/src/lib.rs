//! EEG emotion classification pipeline.
//!
//! The crate is organised by pipeline stage:
//!
//! * [`dataio`]: CSV ingestion, raw-recording manifests, epoching, stratified
//!   splits and a synthetic EEG generator.
//! * [`signal`]: Butterworth band-pass design, zero-phase filtering, artifact
//!   rejection, Welch PSD, spectral/time-domain features and normalisation.
//! * [`nn`]: a GRU → flatten → dense → softmax classifier with hand-written
//!   backpropagation through time, Adam/SGD and a gradient checker.
//! * [`baselines`]: logistic regression, CART, random forest, linear SVM and
//!   gradient boosting.
//! * [`eval`]: confusion matrices, metrics, comparison tables and curves.
//! * [`pipeline`]: the configuration and glue shared by the CLI and the demo.

pub mod baselines;
pub mod dataio;
pub mod error;
pub mod eval;
pub mod nn;
pub mod pipeline;
pub mod rng;
pub mod signal;

pub use error::{Error, ErrorKind, Result};
