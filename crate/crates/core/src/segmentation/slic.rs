use alloc::vec;
use alloc::vec::Vec;

use super::SegmentationMap;
use crate::error::{Error, Result};
use crate::lightfield::View;
use crate::math::{round_half_away, sqrt};

/// SLIC parameters. `superpixels` is the requested label count `k`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SlicParams {
    pub superpixels: usize,
    pub compactness: f64,
    pub iterations: usize,
    /// Fragments smaller than this fraction of the mean region size are
    /// merged into a neighbouring region.
    pub min_fragment: f64,
}

impl SlicParams {
    pub fn new(superpixels: usize, compactness: f64) -> Self {
        SlicParams { superpixels, compactness, iterations: 10, min_fragment: 0.25 }
    }
}

#[derive(Clone, Copy)]
struct Center {
    x: f64,
    y: f64,
    intensity: f64,
}

/// Segments plane 0 of `view` into roughly `k` 4-connected super-pixels.
///
/// Intensities are compared on an 8-bit scale regardless of `bit_depth`.
/// Labels are numbered in raster order of their first pixel.
pub fn slic_segment(view: &View, params: &SlicParams, bit_depth: u32) -> Result<SegmentationMap> {
    let (w, h) = (view.width, view.height);
    let n = w * h;
    let k = params.superpixels;
    if k == 0 {
        return Err(Error::invalid("superpixel count must be at least 1"));
    }
    if params.compactness.is_nan() || params.compactness <= 0.0 {
        return Err(Error::invalid("compactness must be positive"));
    }
    if k > n {
        return Err(Error::TooManySuperpixels { requested: k, pixels: n });
    }
    if k == 1 {
        return Ok(SegmentationMap { width: w, height: h, label_count: 1, labels: vec![vec![0; n]] });
    }

    let scale = f64::from(1u32 << bit_depth.saturating_sub(8));
    let img: Vec<f64> = view.planes[0].iter().map(|&v| f64::from(v) / scale).collect();

    let step = sqrt(n as f64 / k as f64);
    let nx = (round_half_away(w as f64 / step) as usize).clamp(1, w);
    let ny = (round_half_away(h as f64 / step) as usize).clamp(1, h);
    let (sx, sy) = (w as f64 / nx as f64, h as f64 / ny as f64);

    let gradient = |x: usize, y: usize| -> f64 {
        let at = |x: usize, y: usize| img[y * w + x];
        let dx = at((x + 1).min(w - 1), y) - at(x.saturating_sub(1), y);
        let dy = at(x, (y + 1).min(h - 1)) - at(x, y.saturating_sub(1));
        dx * dx + dy * dy
    };

    let mut centers = Vec::with_capacity(nx * ny);
    for j in 0..ny {
        for i in 0..nx {
            let cx = (((i as f64) + 0.5) * sx) as usize;
            let cy = (((j as f64) + 0.5) * sy) as usize;
            let (cx, cy) = (cx.min(w - 1), cy.min(h - 1));
            // Move the seed to the lowest-gradient pixel of its 3x3 window.
            let (mut bx, mut by, mut bg) = (cx, cy, f64::INFINITY);
            for y in cy.saturating_sub(1)..=(cy + 1).min(h - 1) {
                for x in cx.saturating_sub(1)..=(cx + 1).min(w - 1) {
                    let g = gradient(x, y);
                    if g < bg {
                        (bx, by, bg) = (x, y, g);
                    }
                }
            }
            centers.push(Center { x: bx as f64, y: by as f64, intensity: img[by * w + bx] });
        }
    }

    let spatial_weight = (params.compactness / step) * (params.compactness / step);
    let reach = libm::ceil(step) as i64;
    let mut labels = vec![u32::MAX; n];
    let mut dist = vec![f64::INFINITY; n];
    for _ in 0..params.iterations.max(1) {
        dist.iter_mut().for_each(|d| *d = f64::INFINITY);
        for (ci, c) in centers.iter().enumerate() {
            let (cx, cy) = (c.x as i64, c.y as i64);
            let x0 = (cx - reach).max(0) as usize;
            let x1 = ((cx + reach) as usize).min(w - 1);
            let y0 = (cy - reach).max(0) as usize;
            let y1 = ((cy + reach) as usize).min(h - 1);
            for y in y0..=y1 {
                for x in x0..=x1 {
                    let p = y * w + x;
                    let dc = img[p] - c.intensity;
                    let (dx, dy) = (x as f64 - c.x, y as f64 - c.y);
                    let d = dc * dc + (dx * dx + dy * dy) * spatial_weight;
                    if d < dist[p] {
                        dist[p] = d;
                        labels[p] = ci as u32;
                    }
                }
            }
        }
        let mut acc = vec![(0.0f64, 0.0f64, 0.0f64, 0usize); centers.len()];
        for y in 0..h {
            for x in 0..w {
                let p = y * w + x;
                if labels[p] == u32::MAX {
                    continue;
                }
                let a = &mut acc[labels[p] as usize];
                a.0 += x as f64;
                a.1 += y as f64;
                a.2 += img[p];
                a.3 += 1;
            }
        }
        for (c, a) in centers.iter_mut().zip(&acc) {
            if a.3 > 0 {
                let m = a.3 as f64;
                *c = Center { x: a.0 / m, y: a.1 / m, intensity: a.2 / m };
            }
        }
    }
    // Pixels no window reached take the nearest centre.
    for p in 0..n {
        if labels[p] == u32::MAX {
            let (x, y) = ((p % w) as f64, (p / w) as f64);
            let mut best = (f64::INFINITY, 0u32);
            for (ci, c) in centers.iter().enumerate() {
                let d = (x - c.x) * (x - c.x) + (y - c.y) * (y - c.y);
                if d < best.0 {
                    best = (d, ci as u32);
                }
            }
            labels[p] = best.1;
        }
    }

    let min_size = (params.min_fragment * n as f64 / centers.len() as f64) as usize;
    let labels = enforce_connectivity(&labels, w, h, min_size);
    let label_count = labels.iter().map(|&l| l as usize + 1).max().unwrap_or(0);
    Ok(SegmentationMap { width: w, height: h, label_count, labels: vec![labels] })
}

/// Splits labels into 4-connected components, merges components smaller than
/// `min_size` into their largest neighbouring component, and renumbers in
/// raster order.
pub(crate) fn enforce_connectivity(labels: &[u32], w: usize, h: usize, min_size: usize) -> Vec<u32> {
    let n = w * h;
    let mut comp = vec![usize::MAX; n];
    let mut sizes: Vec<usize> = Vec::new();
    let mut stack = Vec::new();
    for start in 0..n {
        if comp[start] != usize::MAX {
            continue;
        }
        let id = sizes.len();
        let label = labels[start];
        let mut size = 0;
        comp[start] = id;
        stack.push(start);
        while let Some(p) = stack.pop() {
            size += 1;
            for q in neighbours4(p, w, h).into_iter().flatten() {
                if comp[q] == usize::MAX && labels[q] == label {
                    comp[q] = id;
                    stack.push(q);
                }
            }
        }
        sizes.push(size);
    }

    let count = sizes.len();
    let mut adjacency: Vec<Vec<usize>> = vec![Vec::new(); count];
    for p in 0..n {
        for q in [right_of(p, w), below(p, w, h)].into_iter().flatten() {
            let (a, b) = (comp[p], comp[q]);
            if a != b {
                adjacency[a].push(b);
                adjacency[b].push(a);
            }
        }
    }
    for list in &mut adjacency {
        list.sort_unstable();
        list.dedup();
    }

    let mut parent: Vec<usize> = (0..count).collect();
    let mut size = sizes.clone();
    fn find(parent: &mut [usize], mut x: usize) -> usize {
        while parent[x] != x {
            parent[x] = parent[parent[x]];
            x = parent[x];
        }
        x
    }
    for c in 0..count {
        if sizes[c] >= min_size {
            continue;
        }
        let root = find(&mut parent, c);
        if size[root] >= min_size {
            continue;
        }
        let mut best: Option<(usize, usize)> = None;
        for &nb in &adjacency[c] {
            let r = find(&mut parent, nb);
            if r == root {
                continue;
            }
            let better = match best {
                None => true,
                Some((bs, br)) => size[r] > bs || (size[r] == bs && r < br),
            };
            if better {
                best = Some((size[r], r));
            }
        }
        if let Some((_, r)) = best {
            parent[root] = r;
            size[r] += size[root];
        }
    }

    let mut remap = vec![u32::MAX; count];
    let mut next = 0u32;
    let mut out = vec![0u32; n];
    for p in 0..n {
        let r = find(&mut parent, comp[p]);
        if remap[r] == u32::MAX {
            remap[r] = next;
            next += 1;
        }
        out[p] = remap[r];
    }
    out
}

#[inline]
fn right_of(p: usize, w: usize) -> Option<usize> {
    (p % w + 1 < w).then_some(p + 1)
}

#[inline]
fn below(p: usize, w: usize, h: usize) -> Option<usize> {
    (p / w + 1 < h).then_some(p + w)
}

#[inline]
pub(crate) fn neighbours4(p: usize, w: usize, h: usize) -> [Option<usize>; 4] {
    let (x, y) = (p % w, p / w);
    [
        (x > 0).then(|| p - 1),
        (x + 1 < w).then(|| p + 1),
        (y > 0).then(|| p - w),
        (y + 1 < h).then(|| p + w),
    ]
}

#[cfg(test)]
mod tests {
    use super::*;

    /// Independent check: every label's pixels form one 4-connected region.
    fn regions_connected(labels: &[u32], w: usize, h: usize, count: usize) -> bool {
        for l in 0..count as u32 {
            let pixels: Vec<usize> = (0..w * h).filter(|&p| labels[p] == l).collect();
            let Some(&start) = pixels.first() else { return false };
            let mut seen = vec![false; w * h];
            let mut stack = vec![start];
            seen[start] = true;
            let mut reached = 0;
            while let Some(p) = stack.pop() {
                reached += 1;
                let (x, y) = (p % w, p / w);
                let cand = [
                    (x > 0).then(|| p - 1),
                    (x + 1 < w).then(|| p + 1),
                    (y > 0).then(|| p - w),
                    (y + 1 < h).then(|| p + w),
                ];
                for q in cand.into_iter().flatten() {
                    if !seen[q] && labels[q] == l {
                        seen[q] = true;
                        stack.push(q);
                    }
                }
            }
            if reached != pixels.len() {
                return false;
            }
        }
        true
    }

    fn noise_view(w: usize, h: usize) -> View {
        let mut state = 12345u32;
        let plane = (0..w * h)
            .map(|i| {
                state = state.wrapping_mul(1_103_515_245).wrapping_add(12345);
                let smooth = ((i % w) * 3 + (i / w) * 2) as u32;
                ((smooth + (state >> 16) % 24) % 256) as u16
            })
            .collect();
        View::new(w, h, vec![plane]).unwrap()
    }

    #[test]
    fn single_superpixel_covers_view() {
        let seg = slic_segment(&noise_view(10, 7), &SlicParams::new(1, 10.0), 8).unwrap();
        assert_eq!(seg.label_count, 1);
        assert!(seg.reference().iter().all(|&l| l == 0));
    }

    #[test]
    fn sixteen_superpixels_on_64x64() {
        let seg = slic_segment(&noise_view(64, 64), &SlicParams::new(16, 10.0), 8).unwrap();
        assert!((12..=20).contains(&seg.label_count), "got {}", seg.label_count);
        assert!(seg.reference().iter().all(|&l| (l as usize) < seg.label_count));
        assert!(regions_connected(seg.reference(), 64, 64, seg.label_count));
    }

    #[test]
    fn two_tone_boundary_is_followed() {
        let (w, h) = (32, 16);
        let plane = (0..w * h).map(|p| if p % w < w / 2 { 10 } else { 220 }).collect();
        let view = View::new(w, h, vec![plane]).unwrap();
        let seg = slic_segment(&view, &SlicParams::new(2, 1.0), 8).unwrap();
        assert_eq!(seg.label_count, 2);
        let labels = seg.reference();
        for y in 0..h {
            // first column whose label differs from column 0
            let edge = (0..w).find(|&x| labels[y * w + x] != labels[y * w]).unwrap();
            assert!(edge.abs_diff(w / 2) <= 1, "row {y} boundary at {edge}");
        }
    }

    #[test]
    fn too_many_superpixels() {
        let err = slic_segment(&noise_view(4, 4), &SlicParams::new(17, 10.0), 8).unwrap_err();
        assert_eq!(err, Error::TooManySuperpixels { requested: 17, pixels: 16 });
    }

    #[test]
    fn connectivity_pass_splits_and_merges() {
        // label 0 appears as two blobs; the single pixel of label 2 is a fragment
        let labels = [0, 0, 1, 0, 0, 0, 1, 0, 0, 2, 1, 0];
        let out = enforce_connectivity(&labels, 4, 3, 2);
        assert!(regions_connected(&out, 4, 3, 3));
        assert_eq!(out[9], out[8]);
    }
}
