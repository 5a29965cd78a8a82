//! Approximation-of-the-identity kernels, local maximal operators and
//! atomic local Hardy space tooling on discrete Ahlfors-regular spaces.

pub mod campaign;
pub mod decomposition;
pub mod error;
pub mod grid;
pub mod hardy;
pub mod kernels;
pub mod maximal;
pub mod quad;
pub mod rng;
pub mod space;
pub mod suites;

pub use error::{Error, Result};
