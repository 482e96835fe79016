pub mod error;
pub mod linalg;
pub mod moduli;
pub mod partition;
pub mod skew;
pub mod unitary;

pub use error::{Error, Result};
