//! The generating operator: base orthogonal systems on `[a, a + 2l]`, the
//! substitutions `u_p`, `v_pʳ` built from reverse iterations of the ladder,
//! and members of generated systems evaluated as a fold of single steps.
//!
//! Normalization: one step scales inner products by `2l/len_p`, so the
//! factor restoring unit norm is `∏_j √(len_{p_j}/2l)` over the path
//! entries, not a product over all levels `0..=s`.

mod base;
mod export;
mod generated;

pub use base::{legendre, legendre_all, Cosine, Legendre, OrthogonalSystem, Tabulated};
pub use export::{read_samples, write_samples, SampleHeader};
pub use generated::{enumerate_paths, GeneratedSystem, Generator};
