//! Encoder and decoder pipelines.
//!
//! Encoding: SLIC on the reference luma view, label projection, super-ray
//! assembly, coarsening or partitioning into coding units, one eigen-basis
//! per unit, quantized GFT coefficients, grouping of coarsened units on
//! their dequantized coefficients, prediction of grouped units through the
//! main unit's basis, residuals, entropy coding. The decoder rebuilds the
//! same units from the transmitted labels, disparities and structure,
//! regroups, and decomposes only the bases it needs.

mod decoder;
mod encoder;
mod sections;
mod units;

pub use decoder::{decode, decode_with, DecodeOutput, UnitReconstruction};
pub use encoder::{encode, encode_with, EncodeOutput, UnitTrace};
pub use units::{build_units, CodingUnit, Structure};

use alloc::format;

use crate::error::{Error, Result};

/// How residuals of grouped units are coded.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ResidualMode {
    /// Integer residuals, lossless.
    Raw,
    /// DCT of the residual quantized with `q_dct`, rounded on decode.
    Dct,
}

/// Which samples are coded.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ChannelMode {
    /// BT.709 luma only; RGB input is converted first.
    Luma,
    /// Every channel, independently, over a shared segmentation.
    All,
}

#[derive(Debug, Clone, PartialEq)]
pub struct CodecConfig {
    /// GFT coefficient quantizer step.
    pub q_gft: f64,
    /// Residual DCT quantizer step.
    pub q_dct: f64,
    /// Common dimension of coarsened coding units.
    pub n_target: usize,
    /// Largest partition part, in vertices.
    pub max_vertices: usize,
    /// Super-rays are coarsened when `q_gft >= q_switch`, else partitioned.
    pub q_switch: u32,
    /// Requested number of super-pixels in the reference view.
    pub slic_k: usize,
    pub compactness: f64,
    /// Histogram bin width of the grouping threshold search.
    pub bin_width: f64,
    /// Transmit group membership instead of letting the decoder regroup.
    pub explicit_groups: bool,
    /// Group coarsened units; off reproduces the plain per-super-ray scheme.
    pub grouping: bool,
    pub residual_mode: ResidualMode,
    pub channels: ChannelMode,
}

impl Default for CodecConfig {
    fn default() -> Self {
        CodecConfig {
            q_gft: 16.0,
            q_dct: 1.0,
            n_target: 256,
            max_vertices: 512,
            q_switch: 16,
            slic_k: 16,
            compactness: 10.0,
            bin_width: 5.0,
            explicit_groups: false,
            grouping: true,
            residual_mode: ResidualMode::Raw,
            channels: ChannelMode::Luma,
        }
    }
}

impl CodecConfig {
    pub fn validate(&self) -> Result<()> {
        for (name, v) in [
            ("q_gft", self.q_gft),
            ("q_dct", self.q_dct),
            ("compactness", self.compactness),
            ("bin_width", self.bin_width),
        ] {
            if !(v.is_finite() && v > 0.0) {
                return Err(Error::InvalidParameter(format!("{name} must be positive and finite, got {v}")));
            }
        }
        for (name, v) in [("n_target", self.n_target), ("max_vertices", self.max_vertices), ("slic_k", self.slic_k)] {
            if v == 0 || v > u32::MAX as usize {
                return Err(Error::InvalidParameter(format!("{name} must be in 1..=2^32-1, got {v}")));
            }
        }
        Ok(())
    }

    /// Whether super-rays are coarsened (rather than partitioned).
    pub fn coarsens(&self) -> bool {
        self.q_gft >= f64::from(self.q_switch)
    }
}

/// Wall time per pipeline stage in seconds (zero without a clock).
#[derive(Debug, Clone, Copy, Default, PartialEq)]
pub struct StageTimes {
    pub segmentation: f64,
    pub structure: f64,
    pub eigen: f64,
    pub transform: f64,
    pub grouping: f64,
    pub residual: f64,
    pub entropy: f64,
    pub total: f64,
}

/// Encoder statistics. Counts that depend on the channel (pairs, groups,
/// grouped units) are summed over the coded channels; ratio denominators
/// are scaled by the channel count accordingly.
#[derive(Debug, Clone, PartialEq)]
pub struct EncodeReport {
    pub channels: usize,
    pub super_rays: usize,
    /// Coding units (super-rays after partitioning).
    pub total_sr: usize,
    /// Coding units coarsened to the common dimension.
    pub coarsened: usize,
    pub pairs: u64,
    pub pairs_under_threshold: u64,
    /// Grouping threshold of the first channel.
    pub threshold: f64,
    pub one_level_groups: usize,
    pub groups: usize,
    pub grouped: usize,
    pub coarsened_ratio: f64,
    pub overall_ratio: f64,
    /// Eigen-decompositions performed by the encoder.
    pub eig_count: usize,
    pub stream_bytes: usize,
    pub bpp: f64,
    pub workers: usize,
    pub times: StageTimes,
}

#[derive(Debug, Clone, PartialEq)]
pub struct DecodeReport {
    pub channels: usize,
    pub total_sr: usize,
    pub coarsened: usize,
    pub groups: usize,
    pub grouped: usize,
    /// Coding units reconstructed with their own basis, over all channels.
    pub ungrouped: usize,
    /// Eigen-decompositions performed by the decoder.
    pub eig_count: usize,
    pub workers: usize,
    pub times: StageTimes,
}
