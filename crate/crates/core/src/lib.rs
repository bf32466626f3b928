//! Graph-based light-field coding with super-ray grouping.
//!
//! A light field is segmented into super-rays (corresponding super-pixels
//! across all sub-aperture views). Each super-ray carries a local graph whose
//! Laplacian eigenvectors define a graph Fourier transform. Super-rays with
//! similar transform coefficients are grouped so that only one
//! eigen-decomposition per group is needed at the decoder; grouped members
//! are predicted through the main super-ray's basis and corrected with a
//! transmitted residual.
//!
//! ```text
//! SLIC -> label projection -> super-rays -> coarsen / partition
//!      -> eigen-decomposition -> GFT -> quantize -> grouping
//!      -> cross-basis prediction -> residual -> entropy coding
//! ```
//!
//! This crate is `no_std` (with `alloc`). File formats, the thread pool and
//! the command-line front end live in the companion `srgc` crate.

#![no_std]
#![allow(clippy::needless_range_loop, clippy::too_many_arguments)]

extern crate alloc;
#[cfg(test)]
extern crate std;

pub mod bitstream;
pub mod codec;
pub mod entropy;
pub mod error;
pub mod grouping;
pub mod lightfield;
pub mod math;
pub mod metrics;
pub mod runtime;
pub mod scene;
pub mod segmentation;
pub mod spectral;
pub mod transform;

pub use bitstream::Bitstream;
pub use codec::{decode, decode_with, encode, encode_with, ChannelMode, CodecConfig, DecodeReport, EncodeReport, ResidualMode};
pub use error::{Error, Result};
pub use lightfield::{DisparityMap, LightField, View};
pub use runtime::{Runtime, Sequential};
