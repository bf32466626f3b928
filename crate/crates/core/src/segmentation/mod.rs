//! Super-pixel segmentation of the reference view, label projection to the
//! other views, and super-ray assembly.

mod projection;
mod slic;
mod superray;

pub use projection::{project_labels, project_view};
pub use slic::{slic_segment, SlicParams};
pub use superray::{assemble_super_rays, build_super_rays, SuperRay};

use alloc::vec::Vec;

use crate::error::{Error, Result};
use crate::lightfield::DisparityMap;
use crate::math::{lower_median, round_half_away};

/// Disparities are carried in 1/8-pixel steps so that encoder and decoder
/// project identically.
pub const DISPARITY_STEPS_PER_PIXEL: i32 = 8;

/// Label maps for one or more views, `labels[view][y * width + x]`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct SegmentationMap {
    pub width: usize,
    pub height: usize,
    pub label_count: usize,
    pub labels: Vec<Vec<u32>>,
}

impl SegmentationMap {
    pub fn view_count(&self) -> usize {
        self.labels.len()
    }

    pub fn reference(&self) -> &[u32] {
        &self.labels[0]
    }

    /// Pixels carrying `label` in `view`, in raster order.
    pub fn region(&self, view: usize, label: u32) -> Vec<u32> {
        self.labels[view]
            .iter()
            .enumerate()
            .filter(|(_, &l)| l == label)
            .map(|(i, _)| i as u32)
            .collect()
    }
}

/// Lower median of the disparity over a region of the reference view.
pub fn median_disparity(region: &[u32], dmap: &DisparityMap) -> Result<f64> {
    if region.is_empty() {
        return Err(Error::EmptyRegion);
    }
    let n = dmap.width() * dmap.height();
    let mut values = Vec::with_capacity(region.len());
    for &p in region {
        let p = p as usize;
        if p >= n {
            return Err(Error::DimensionMismatch { expected: n, actual: p + 1 });
        }
        values.push(f64::from(dmap.values()[p]));
    }
    Ok(lower_median(&values).expect("non-empty"))
}

/// Fixed-point disparity in 1/8-pixel units.
pub fn quantize_disparity(d: f64) -> i32 {
    round_half_away(d * f64::from(DISPARITY_STEPS_PER_PIXEL)) as i32
}

pub fn dequantize_disparity(q: i32) -> f64 {
    f64::from(q) / f64::from(DISPARITY_STEPS_PER_PIXEL)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn dmap(values: &[f32]) -> DisparityMap {
        DisparityMap::new(values.len(), 1, values.to_vec()).unwrap()
    }

    #[test]
    fn median_of_odd_count() {
        assert_eq!(median_disparity(&[0, 1, 2], &dmap(&[1.0, 9.0, 2.0])).unwrap(), 2.0);
    }

    #[test]
    fn median_of_singleton() {
        assert_eq!(median_disparity(&[0], &dmap(&[3.0])).unwrap(), 3.0);
    }

    #[test]
    fn even_count_takes_lower_median() {
        assert_eq!(median_disparity(&[0, 1, 2, 3], &dmap(&[4.0, 1.0, 3.0, 2.0])).unwrap(), 2.0);
    }

    #[test]
    fn empty_region_is_an_error() {
        assert_eq!(median_disparity(&[], &dmap(&[1.0])), Err(Error::EmptyRegion));
    }

    #[test]
    fn disparity_fixed_point() {
        assert_eq!(quantize_disparity(1.0), 8);
        assert_eq!(quantize_disparity(-0.3), -2);
        assert_eq!(dequantize_disparity(quantize_disparity(0.125)), 0.125);
    }
}
