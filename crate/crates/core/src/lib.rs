pub mod cluster;
pub mod error;
pub mod matrix;
pub mod personality;
pub mod pipeline;
pub mod preprocess;
pub mod profiling;
pub mod report;
pub mod synthgen;
pub mod table;
pub mod validation;

pub use error::{Error, Result};
pub use matrix::Matrix;
