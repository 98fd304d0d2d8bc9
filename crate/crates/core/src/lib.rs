pub mod consts;
pub mod dd;
pub mod error;
pub mod generator;
pub mod harness;
pub mod hl_table;
pub mod ladder;
pub mod quadrature;
pub mod report;
pub mod zeta;

pub use dd::Dd;
pub use num_complex::Complex64;
pub use error::{Error, Result};
pub use zeta::{ZetaEngine, ZetaEngineConfig};
