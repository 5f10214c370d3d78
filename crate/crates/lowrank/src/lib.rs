//! Hitting sets for low-rank matrices and tensors, sparse and low-rank
//! recovery, and rank-metric codes over finite fields.

pub mod cli;
pub mod error;
pub mod field;
pub mod hitting;
pub mod io;
pub mod linalg;
pub mod lrr;
pub mod poly;
pub mod rankcode;
pub mod sparse;
pub mod tensor;

pub use error::{Error, Result};
pub use field::{Fel, FieldCtx};
pub use hitting::{Family, Measurement, MeasurementSet};
pub use linalg::Matrix;
pub use rankcode::{build_code, build_code_simulated, MinDistance, RankMetricCode};
pub use tensor::{DenseTensor, LowRankTensor, Rank1Tensor, TensorRef};
