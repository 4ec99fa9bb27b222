pub mod error;
pub mod extremal;
pub mod grunsky;
pub mod linalg;
pub mod metrics;
pub mod quaddiff;
pub mod schwarzian;
pub mod series;
pub mod variation;

pub use error::{Error, ErrorKind, Result};
pub use num_complex::Complex64;
pub use series::{Domain, LaurentSeries};
