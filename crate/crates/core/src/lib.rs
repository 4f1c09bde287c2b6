//! Empirical Bayes inference for sparse normal means.
//!
//! Observe `X_i = theta_i + sigma xi_i`, `i = 1..n`. The crate provides
//!
//! - [`selector`]: the penalized subset selector and hard-thresholding estimate,
//! - [`posterior`]: the exact subset posterior (cardinality law, inclusion
//!   probabilities, shrinkage mean, draws) and the product-prior variant,
//! - [`oracle`]: oracle rates and the excessive bias ratio of a known signal,
//! - [`uq`]: confidence balls and theory constants,
//! - [`experiments`]: Monte Carlo coverage and contraction studies.
//!
//! Indices are 0-based in memory and 1-based in every serialized form.
//!
//! ```
//! use sparse_eb::{posterior, selector, Observation};
//!
//! let x = Observation::new(vec![0.2, -0.5, 6.0, 0.1, 4.5], 1.0).unwrap();
//! let sel = selector::select(&x, 0.7).unwrap();
//! assert_eq!(sel.selected.one_based(), vec![3, 5]);
//!
//! let post = posterior::build(&x, 0.7).unwrap();
//! assert!(post.inclusion[2] > 0.99);
//! ```

#![forbid(unsafe_code)]

pub mod error;
pub mod exhaustive;
pub mod experiments;
pub mod io;
pub mod noise;
pub mod numeric;
pub mod oracle;
pub mod posterior;
pub mod rng;
pub mod selector;
pub mod types;
pub mod uq;

pub use error::{Error, Result};
pub use noise::{simulate, NoiseSpec};
pub use numeric::{complexity_term, log_sum_exp, order_by_magnitude};
pub use oracle::OracleReport;
pub use posterior::{PosteriorDraw, SubsetPosterior};
pub use selector::SubsetSelection;
pub use types::{IndexSet, Observation, PriorConfig, Signal};
pub use uq::{CenterMethod, ConfidenceBall, TheoryConstants};
