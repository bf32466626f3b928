use alloc::vec;
use alloc::vec::Vec;

use super::{median_disparity, SegmentationMap};
use crate::error::{Error, Result};
use crate::lightfield::DisparityMap;

/// Corresponding super-pixels across all views that share one label.
///
/// Pixels are linear indices `y * width + x`, sorted (raster order), which is
/// the canonical vectorisation of the super-ray signal.
#[derive(Debug, Clone, PartialEq)]
pub struct SuperRay {
    pub label: u32,
    pub disparity: f64,
    pub per_view_pixels: Vec<Vec<u32>>,
}

impl SuperRay {
    pub fn reference(&self) -> &[u32] {
        &self.per_view_pixels[0]
    }

    pub fn vertex_count(&self) -> usize {
        self.per_view_pixels.iter().map(Vec::len).sum()
    }

    pub fn view_count(&self) -> usize {
        self.per_view_pixels.len()
    }
}

/// One super-ray per label, each with the lower-median disparity of its
/// reference super-pixel.
pub fn build_super_rays(seg: &SegmentationMap, dmap: &DisparityMap) -> Result<Vec<SuperRay>> {
    let regions = collect_regions(seg)?;
    let disparities = regions
        .iter()
        .map(|views| median_disparity(&views[0], dmap))
        .collect::<Result<Vec<f64>>>()?;
    Ok(into_super_rays(regions, &disparities))
}

/// Like [`build_super_rays`] with per-label disparities supplied directly.
pub fn assemble_super_rays(seg: &SegmentationMap, disparities: &[f64]) -> Result<Vec<SuperRay>> {
    if disparities.len() < seg.label_count {
        return Err(Error::DimensionMismatch { expected: seg.label_count, actual: disparities.len() });
    }
    Ok(into_super_rays(collect_regions(seg)?, disparities))
}

fn into_super_rays(regions: Vec<Vec<Vec<u32>>>, disparities: &[f64]) -> Vec<SuperRay> {
    regions
        .into_iter()
        .enumerate()
        .map(|(label, per_view_pixels)| SuperRay { label: label as u32, disparity: disparities[label], per_view_pixels })
        .collect()
}

fn collect_regions(seg: &SegmentationMap) -> Result<Vec<Vec<Vec<u32>>>> {
    let views = seg.view_count();
    let mut regions = vec![vec![Vec::new(); views]; seg.label_count];
    for (v, labels) in seg.labels.iter().enumerate() {
        for (p, &l) in labels.iter().enumerate() {
            let slot = regions.get_mut(l as usize).ok_or(Error::OrphanLabel(l))?;
            slot[v].push(p as u32);
        }
    }
    for (l, r) in regions.iter().enumerate() {
        if r[0].is_empty() {
            return Err(Error::OrphanLabel(l as u32));
        }
    }
    Ok(regions)
}
