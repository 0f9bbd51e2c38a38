//! Lossless compression for i.i.d. integer sequences drawn from monotonic
//! distributions.
//!
//! The codecs here exploit one piece of side information: both encoder and
//! decoder know a-priori that the source probabilities are non-increasing in
//! the symbol value.  Each compressor is a two-part code: a quantized
//! monotone parameter vector is described first (on a deterministic
//! quantization grid rebuilt by the decoder from header fields), then the
//! sequence is arithmetic-coded under it.  Four codecs cover the regimes of
//! interest:
//!
//! - `SmallK`: bounded alphabets, differential grid-index parameter code;
//! - `Large`: alphabets up to O(n), counts-per-grid-point parameter code;
//! - `Fast`: infinite alphabets with fast decay — an effective alphabet of
//!   the `m` likely symbols plus one clustered TAIL symbol;
//! - `Individual`: per-sequence coding with a one-bit switch between the
//!   monotone maximum-likelihood model and a plain type code.
//!
//! The [`bounds`] module evaluates the closed-form redundancy bounds the
//! codecs are measured against, and [`lab`] provides source simulators and a
//! redundancy-measurement harness that writes CSV reports.

pub mod bitio;
pub mod bounds;
pub mod codecs;
pub mod entropy;
pub mod error;
pub mod estimators;
pub mod grids;
pub mod lab;
pub mod param_codec;

pub use error::Error;

/// Crate-wide result alias.
pub type Result<T> = std::result::Result<T, Error>;
