//! Entropy rate of hidden Markov processes whose output alphabet has one
//! ambiguous symbol (`0`) and `q − 1` unambiguous ones.
//!
//! The crate is `no_std` and only needs `alloc`. It provides
//!
//! - [`model`]: Markov sources, the noise model, word probabilities and a
//!   seeded sampler;
//! - [`engine`]: the `O(N q³)` truncated-series entropy rate `H_N` with its
//!   error bound `Bγ^{N+1}`;
//! - [`oracle`]: brute-force block entropies for cross-checking;
//! - [`estimator`]: Baum-Welch fitting from an observed string;
//! - [`gilbert`]: capacity bounds for the Gilbert burst-error channel;
//! - [`validate`]: a non-short-circuiting model check.
//!
//! ```
//! use entrate_core::{engine::entropy_rate, model::HmpModel};
//!
//! let rows = vec![
//!     vec![0.4, 0.25, 0.35],
//!     vec![0.25, 0.45, 0.3],
//!     vec![0.2, 0.55, 0.25],
//! ];
//! let model = HmpModel::from_parts(&rows, &[0.01, 0.02]).unwrap();
//! let est = entropy_rate(&model, 50).unwrap();
//! assert!((est.value - 1.520947864969815).abs() < 1e-9);
//! ```

#![no_std]

extern crate alloc;
#[cfg(test)]
extern crate std;

pub mod engine;
pub mod error;
pub mod estimator;
pub mod gilbert;
pub mod info;
pub mod linalg;
pub mod model;
pub mod oracle;
pub mod validate;

pub use engine::{entropy_rate, terms_for_accuracy, EntropyEstimate};
pub use error::{Error, Result};
pub use info::LogBase;
pub use model::{HmpModel, InitialDistribution, MarkovSource, NoiseSpec, ObservationSequence};
