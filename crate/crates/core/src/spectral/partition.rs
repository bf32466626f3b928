use alloc::vec::Vec;

use super::ViewGeometry;
use crate::error::{Error, Result};
use crate::math::round_half_away;
use crate::segmentation::SuperRay;

/// Result of [`partition_super_ray`].
#[derive(Debug, Clone, PartialEq)]
pub struct Partition {
    /// Leaf parts in pre-order (left before right).
    pub parts: Vec<SuperRay>,
    /// Pre-order split flags: `true` = bisected, `false` = leaf.
    pub split_flags: Vec<bool>,
    /// Set when some part still exceeds the bound but cannot be split.
    pub unsplittable: bool,
}

/// Recursively bisects a super-ray until every part has at most
/// `max_vertices` vertices.
pub fn partition_super_ray(sr: &SuperRay, max_vertices: usize, geom: &ViewGeometry) -> Partition {
    let mut out = Partition { parts: Vec::new(), split_flags: Vec::new(), unsplittable: false };
    recurse(sr.clone(), max_vertices, geom, &mut out);
    out
}

fn recurse(sr: SuperRay, max_vertices: usize, geom: &ViewGeometry, out: &mut Partition) {
    if sr.vertex_count() <= max_vertices {
        out.split_flags.push(false);
        out.parts.push(sr);
        return;
    }
    match split_super_ray(&sr, geom) {
        Some((left, right)) => {
            out.split_flags.push(true);
            recurse(left, max_vertices, geom, out);
            recurse(right, max_vertices, geom, out);
        }
        None => {
            out.unsplittable = true;
            out.split_flags.push(false);
            out.parts.push(sr);
        }
    }
}

/// Rebuilds the parts described by pre-order split flags.
pub fn apply_split_flags(sr: &SuperRay, flags: &[bool], geom: &ViewGeometry) -> Result<Vec<SuperRay>> {
    let mut parts = Vec::new();
    let mut cursor = 0;
    replay(sr.clone(), flags, &mut cursor, geom, &mut parts)?;
    if cursor != flags.len() {
        return Err(Error::corrupt("structure", "trailing partition flags"));
    }
    Ok(parts)
}

fn replay(sr: SuperRay, flags: &[bool], cursor: &mut usize, geom: &ViewGeometry, parts: &mut Vec<SuperRay>) -> Result<()> {
    let flag = *flags.get(*cursor).ok_or_else(|| Error::corrupt("structure", "partition tree truncated"))?;
    *cursor += 1;
    if !flag {
        parts.push(sr);
        return Ok(());
    }
    let (left, right) =
        split_super_ray(&sr, geom).ok_or_else(|| Error::corrupt("structure", "split of an unsplittable region"))?;
    replay(left, flags, cursor, geom, parts)?;
    replay(right, flags, cursor, geom, parts)
}

#[derive(Clone, Copy)]
enum Axis {
    X,
    Y,
}

/// Bisects the reference super-pixel along the longer bounding-box axis at
/// the lower-median coordinate (`<= median` goes left; if that empties the
/// right side, `< median` is used). Pixels of the other views follow the
/// reference coordinate they project back to. `None` for a region that is a
/// single point along both axes.
pub fn split_super_ray(sr: &SuperRay, geom: &ViewGeometry) -> Option<(SuperRay, SuperRay)> {
    let w = geom.width;
    let reference = sr.reference();
    if reference.len() < 2 {
        return None;
    }
    let xs: Vec<i64> = reference.iter().map(|&p| (p as usize % w) as i64).collect();
    let ys: Vec<i64> = reference.iter().map(|&p| (p as usize / w) as i64).collect();
    let extent = |v: &[i64]| v.iter().max().unwrap() - v.iter().min().unwrap();
    let axes = if extent(&xs) >= extent(&ys) { [Axis::X, Axis::Y] } else { [Axis::Y, Axis::X] };
    for axis in axes {
        let coords = match axis {
            Axis::X => &xs,
            Axis::Y => &ys,
        };
        let mut sorted = coords.clone();
        sorted.sort_unstable();
        let median = sorted[(sorted.len() - 1) / 2];
        let (min, max) = (sorted[0], sorted[sorted.len() - 1]);
        let cut = if max > median {
            median
        } else if min < median {
            median - 1
        } else {
            continue;
        };
        return Some(cut_super_ray(sr, geom, axis, cut));
    }
    None
}

fn cut_super_ray(sr: &SuperRay, geom: &ViewGeometry, axis: Axis, cut: i64) -> (SuperRay, SuperRay) {
    let w = geom.width;
    let mut left = Vec::with_capacity(sr.view_count());
    let mut right = Vec::with_capacity(sr.view_count());
    for (v, pixels) in sr.per_view_pixels.iter().enumerate() {
        let (s, t) = geom.offset(v);
        let (mut l, mut r) = (Vec::new(), Vec::new());
        for &p in pixels {
            let (x, y) = ((p as usize % w) as f64, (p as usize / w) as f64);
            let back = match axis {
                Axis::X => round_half_away(x + sr.disparity * t as f64),
                Axis::Y => round_half_away(y + sr.disparity * s as f64),
            } as i64;
            if back <= cut {
                l.push(p);
            } else {
                r.push(p);
            }
        }
        left.push(l);
        right.push(r);
    }
    (
        SuperRay { label: sr.label, disparity: sr.disparity, per_view_pixels: left },
        SuperRay { label: sr.label, disparity: sr.disparity, per_view_pixels: right },
    )
}
