//! Tensor-train encodings of Gaussian-type orbitals projected onto periodic
//! plane waves, and closed-form fault-tolerant cost models for preparing the
//! resulting Slater determinants in first quantization.

pub mod error;
pub mod func_encode;
pub mod gauss_pw;
pub mod orbital;
pub mod real;
pub mod resources;
pub mod tt;

pub use error::{Error, Result};
pub use num_complex::Complex64 as C64;
pub use tt::{CanonicalForm, Core, TensorTrain};
