pub mod channel;
pub mod dataset;
pub mod detector;
pub mod error;
pub mod gfk;
pub mod grassmann;
pub mod linalg;
pub mod signal;
pub mod svm;
pub use error::{Error, Result};
