//! Convolutional codes derived from linear block codes.
//!
//! The crate is organised bottom-up:
//!
//! * [`galois`]: exact arithmetic in GF(p^e), subfield embeddings and basis expansion.
//! * [`matrix`]: dense matrices over a [`galois::Field`].
//! * [`blockcode`]: linear block codes, duals, exact minimum distance, structural checks.
//! * [`combinators`]: expansion, extension, puncturing, direct sum, `(u | u+v)` and product codes.
//! * [`poly`] / [`convolutional`]: polynomial matrices, the row-splitting construction,
//!   basic/reduced certification, the generalized Singleton bound and free distance.
//! * [`families`]: code families, construction pipelines and goodness reports.
//! * [`io`]: JSON encodings shared with the command-line tool.

pub mod blockcode;
pub mod combinators;
pub mod convolutional;
mod error;
pub mod families;
pub mod galois;
pub mod io;
pub mod matrix;
pub mod poly;
pub mod selftest;

pub use error::{Error, Result};

/// Enumeration limits shared by every exhaustive search in the crate.
#[derive(Debug, Clone, Copy, PartialEq, Eq, serde::Serialize, serde::Deserialize)]
pub struct Guards {
    /// Maximum number of codewords enumerated by a minimum-distance search.
    pub max_codewords: u64,
    /// Maximum number of trellis states in a free-distance search.
    pub max_states: u64,
    /// Maximum number of free-input combinations enumerated per trellis edge.
    pub max_cosets: u64,
    /// Maximum number of input sequences for the truncated free-distance search.
    pub max_truncation: u64,
    /// Maximum number of maximal minors before basicness falls back to the Smith form.
    pub max_minors: u64,
}

impl Default for Guards {
    fn default() -> Self {
        Guards {
            max_codewords: 1 << 24,
            max_states: 1 << 12,
            max_cosets: 1 << 20,
            max_truncation: 1 << 26,
            max_minors: 100_000,
        }
    }
}

/// `base^exp`, or `None` on overflow.
pub(crate) fn checked_pow(base: u64, exp: usize) -> Option<u64> {
    let exp = u32::try_from(exp).ok()?;
    base.checked_pow(exp)
}
