//! Light-field data model: a grid of equally sized sub-aperture views.

use alloc::format;
use alloc::vec;
use alloc::vec::Vec;

use crate::error::{Error, Result};
use crate::math::round_half_away;

/// One sub-aperture image. `planes[c][y * width + x]`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct View {
    pub width: usize,
    pub height: usize,
    pub planes: Vec<Vec<u16>>,
}

impl View {
    pub fn new(width: usize, height: usize, planes: Vec<Vec<u16>>) -> Result<Self> {
        if planes.is_empty() {
            return Err(Error::InconsistentViews("view has no planes".into()));
        }
        for (c, p) in planes.iter().enumerate() {
            if p.len() != width * height {
                return Err(Error::InconsistentViews(format!(
                    "plane {c} has {} samples, expected {}x{}",
                    p.len(),
                    width,
                    height
                )));
            }
        }
        Ok(View { width, height, planes })
    }

    pub fn filled(width: usize, height: usize, channels: usize, value: u16) -> Self {
        View { width, height, planes: vec![vec![value; width * height]; channels] }
    }

    pub fn channels(&self) -> usize {
        self.planes.len()
    }

    #[inline]
    pub fn get(&self, channel: usize, x: usize, y: usize) -> u16 {
        self.planes[channel][y * self.width + x]
    }
}

/// 4D light field `L(u, v, s, t)`: views indexed by angular row `s` and
/// angular column `t`, stored in raster `(s, t)` order.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct LightField {
    rows: usize,
    cols: usize,
    width: usize,
    height: usize,
    bit_depth: u32,
    channels: usize,
    views: Vec<View>,
}

impl LightField {
    /// Builds a light field from views given in raster `(s, t)` order and
    /// checks every invariant (equal dims, equal channel count, sample range).
    pub fn new(rows: usize, cols: usize, bit_depth: u32, views: Vec<View>) -> Result<Self> {
        if rows == 0 || cols == 0 || views.is_empty() {
            return Err(Error::EmptyLightField);
        }
        if !matches!(bit_depth, 8 | 10 | 16) {
            return Err(Error::UnsupportedBitDepth(bit_depth));
        }
        if views.len() != rows * cols {
            return Err(Error::InconsistentViews(format!(
                "{} views supplied for a {rows}x{cols} grid",
                views.len()
            )));
        }
        let first = &views[0];
        let (width, height, channels) = (first.width, first.height, first.channels());
        if width == 0 || height == 0 {
            return Err(Error::EmptyLightField);
        }
        if channels != 1 && channels != 3 {
            return Err(Error::InconsistentViews(format!("{channels} channels (expected 1 or 3)")));
        }
        let max = max_sample_for(bit_depth);
        for (i, v) in views.iter().enumerate() {
            if v.width != width || v.height != height || v.channels() != channels {
                return Err(Error::InconsistentViews(format!(
                    "view ({}, {}) is {}x{}x{}, expected {}x{}x{}",
                    i / cols,
                    i % cols,
                    v.width,
                    v.height,
                    v.channels(),
                    width,
                    height,
                    channels
                )));
            }
            for p in &v.planes {
                if p.len() != width * height {
                    return Err(Error::InconsistentViews(format!("view {i} plane size")));
                }
                if let Some(&bad) = p.iter().find(|&&s| u32::from(s) > max) {
                    return Err(Error::SampleOutOfRange { value: bad.into(), bit_depth });
                }
            }
        }
        Ok(LightField { rows, cols, width, height, bit_depth, channels, views })
    }

    /// Angular dimensions `(S, T)`.
    pub fn angular_dims(&self) -> (usize, usize) {
        (self.rows, self.cols)
    }

    /// Spatial dimensions `(W, H)`.
    pub fn spatial_dims(&self) -> (usize, usize) {
        (self.width, self.height)
    }

    pub fn width(&self) -> usize {
        self.width
    }

    pub fn height(&self) -> usize {
        self.height
    }

    pub fn bit_depth(&self) -> u32 {
        self.bit_depth
    }

    pub fn channels(&self) -> usize {
        self.channels
    }

    pub fn max_sample(&self) -> u32 {
        max_sample_for(self.bit_depth)
    }

    pub fn view_count(&self) -> usize {
        self.views.len()
    }

    pub fn views(&self) -> &[View] {
        &self.views
    }

    pub fn view(&self, s: usize, t: usize) -> &View {
        &self.views[s * self.cols + t]
    }

    /// `(s, t)` of a raster view index.
    pub fn view_position(&self, index: usize) -> (usize, usize) {
        (index / self.cols, index % self.cols)
    }

    /// Samples per channel, `S * T * W * H`.
    pub fn samples_per_channel(&self) -> usize {
        self.views.len() * self.width * self.height
    }

    /// Single-channel light field holding plane `channel` of every view.
    pub fn channel(&self, channel: usize) -> LightField {
        let views = self
            .views
            .iter()
            .map(|v| View { width: v.width, height: v.height, planes: vec![v.planes[channel].clone()] })
            .collect();
        LightField { channels: 1, views, ..self.clone_header() }
    }

    /// Luma light field. Three-channel input is converted with BT.709
    /// weights; single-channel input is returned unchanged.
    pub fn luma(&self) -> LightField {
        if self.channels == 1 {
            return self.clone();
        }
        let views = self
            .views
            .iter()
            .map(|v| {
                let y = (0..v.width * v.height)
                    .map(|i| {
                        let r = f64::from(v.planes[0][i]);
                        let g = f64::from(v.planes[1][i]);
                        let b = f64::from(v.planes[2][i]);
                        round_half_away(0.2126 * r + 0.7152 * g + 0.0722 * b) as u16
                    })
                    .collect();
                View { width: v.width, height: v.height, planes: vec![y] }
            })
            .collect();
        LightField { channels: 1, views, ..self.clone_header() }
    }

    /// Stacks single-channel light fields (same geometry) into one.
    pub fn from_channels(channels: &[LightField]) -> Result<LightField> {
        let first = channels.first().ok_or(Error::EmptyLightField)?;
        let mut views: Vec<View> = first.views.iter().map(|v| View { planes: Vec::new(), ..v.clone() }).collect();
        for lf in channels {
            if lf.angular_dims() != first.angular_dims() || lf.spatial_dims() != first.spatial_dims() {
                return Err(Error::InconsistentViews("channel geometry differs".into()));
            }
            for (dst, src) in views.iter_mut().zip(&lf.views) {
                dst.planes.extend(src.planes.iter().cloned());
            }
        }
        LightField::new(first.rows, first.cols, first.bit_depth, views)
    }

    fn clone_header(&self) -> LightField {
        LightField {
            rows: self.rows,
            cols: self.cols,
            width: self.width,
            height: self.height,
            bit_depth: self.bit_depth,
            channels: self.channels,
            views: Vec::new(),
        }
    }
}

pub fn max_sample_for(bit_depth: u32) -> u32 {
    (1u32 << bit_depth) - 1
}

/// Horizontal disparity (pixels per unit angular step) for every pixel of
/// the reference view.
#[derive(Debug, Clone, PartialEq)]
pub struct DisparityMap {
    width: usize,
    height: usize,
    values: Vec<f32>,
}

impl DisparityMap {
    pub fn new(width: usize, height: usize, values: Vec<f32>) -> Result<Self> {
        if values.len() != width * height {
            return Err(Error::DimensionMismatch { expected: width * height, actual: values.len() });
        }
        if values.iter().any(|v| !v.is_finite()) {
            return Err(Error::invalid("disparity map contains non-finite values"));
        }
        Ok(DisparityMap { width, height, values })
    }

    pub fn constant(width: usize, height: usize, value: f32) -> Self {
        DisparityMap { width, height, values: vec![value; width * height] }
    }

    pub fn width(&self) -> usize {
        self.width
    }

    pub fn height(&self) -> usize {
        self.height
    }

    pub fn values(&self) -> &[f32] {
        &self.values
    }

    #[inline]
    pub fn at(&self, x: usize, y: usize) -> f32 {
        self.values[y * self.width + x]
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn grid(rows: usize, cols: usize, w: usize, h: usize) -> Vec<View> {
        (0..rows * cols).map(|i| View::filled(w, h, 1, i as u16)).collect()
    }

    #[test]
    fn sample_count_for_9x9_grid() {
        let lf = LightField::new(9, 9, 8, grid(9, 9, 64, 64)).unwrap();
        assert_eq!(lf.samples_per_channel(), 331_776);
    }

    #[test]
    fn rejects_mismatched_view() {
        let mut views = grid(2, 2, 8, 8);
        views[3] = View::filled(8, 7, 1, 0);
        assert!(matches!(LightField::new(2, 2, 8, views), Err(Error::InconsistentViews(_))));
    }

    #[test]
    fn rejects_out_of_range_samples() {
        let views = vec![View::filled(2, 2, 1, 1024)];
        assert_eq!(
            LightField::new(1, 1, 10, views),
            Err(Error::SampleOutOfRange { value: 1024, bit_depth: 10 })
        );
    }

    #[test]
    fn empty_grid_is_rejected() {
        assert_eq!(LightField::new(0, 3, 8, Vec::new()), Err(Error::EmptyLightField));
    }

    #[test]
    fn luma_of_gray_rgb_is_identity() {
        let v = View::new(1, 1, vec![vec![77], vec![77], vec![77]]).unwrap();
        let lf = LightField::new(1, 1, 8, vec![v]).unwrap();
        assert_eq!(lf.luma().view(0, 0).planes, vec![vec![77u16]]);
    }
}
