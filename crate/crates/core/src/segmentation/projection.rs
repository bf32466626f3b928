use alloc::vec;
use alloc::vec::Vec;

use super::slic::neighbours4;
use super::SegmentationMap;
use crate::error::{Error, Result};
use crate::math::round_half_away;

const UNLABELED: u32 = u32::MAX;

/// Projects reference-view labels into every view of a `rows x cols` grid.
///
/// Reference pixel `(x, y)` with label disparity `d` lands on
/// `(x - d * t, y - d * s)` in view `(s, t)`, rounded half away from zero.
/// Contested pixels go to the larger disparity (ties: smaller label); holes
/// are filled by majority vote of labelled 4-neighbours, repeated until the
/// view is covered.
pub fn project_labels(
    ref_map: &SegmentationMap,
    disparities: &[f64],
    rows: usize,
    cols: usize,
) -> Result<SegmentationMap> {
    if disparities.len() < ref_map.label_count {
        return Err(Error::DimensionMismatch { expected: ref_map.label_count, actual: disparities.len() });
    }
    let mut labels = Vec::with_capacity(rows * cols);
    for s in 0..rows {
        for t in 0..cols {
            labels.push(project_view(ref_map.reference(), ref_map.width, ref_map.height, disparities, s, t));
        }
    }
    Ok(SegmentationMap { width: ref_map.width, height: ref_map.height, label_count: ref_map.label_count, labels })
}

/// Label map of view `(s, t)`; see [`project_labels`].
pub fn project_view(
    reference: &[u32],
    w: usize,
    h: usize,
    disparities: &[f64],
    s: usize,
    t: usize,
) -> Vec<u32> {
    if s == 0 && t == 0 {
        return reference.to_vec();
    }
    let n = w * h;
    let mut out = vec![UNLABELED; n];
    let mut depth = vec![f64::NEG_INFINITY; n];
    for y in 0..h {
        for x in 0..w {
            let label = reference[y * w + x];
            let d = disparities[label as usize];
            let tx = round_half_away(x as f64 - d * t as f64);
            let ty = round_half_away(y as f64 - d * s as f64);
            if tx < 0.0 || ty < 0.0 || tx >= w as f64 || ty >= h as f64 {
                continue;
            }
            let q = ty as usize * w + tx as usize;
            if out[q] == UNLABELED || d > depth[q] || (d == depth[q] && label < out[q]) {
                out[q] = label;
                depth[q] = d;
            }
        }
    }
    if out.iter().all(|&l| l == UNLABELED) {
        return reference.to_vec();
    }
    fill_holes(&mut out, w, h);
    out
}

fn fill_holes(labels: &mut [u32], w: usize, h: usize) {
    let mut holes: Vec<usize> = (0..labels.len()).filter(|&p| labels[p] == UNLABELED).collect();
    let mut votes: Vec<u32> = Vec::with_capacity(4);
    while !holes.is_empty() {
        let mut updates = Vec::new();
        for &p in &holes {
            votes.clear();
            votes.extend(neighbours4(p, w, h).into_iter().flatten().map(|q| labels[q]).filter(|&l| l != UNLABELED));
            if votes.is_empty() {
                continue;
            }
            votes.sort_unstable();
            let (mut best, mut best_count) = (votes[0], 0);
            let mut i = 0;
            while i < votes.len() {
                let j = votes[i..].iter().take_while(|&&v| v == votes[i]).count();
                if j > best_count {
                    best = votes[i];
                    best_count = j;
                }
                i += j;
            }
            updates.push((p, best));
        }
        for &(p, l) in &updates {
            labels[p] = l;
        }
        holes.retain(|&p| labels[p] == UNLABELED);
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn map(w: usize, h: usize, labels: Vec<u32>, count: usize) -> SegmentationMap {
        SegmentationMap { width: w, height: h, label_count: count, labels: vec![labels] }
    }

    #[test]
    fn zero_disparity_is_identity() {
        let reference: Vec<u32> = (0..48).map(|p| (p % 8 / 3) as u32).collect();
        let seg = project_labels(&map(8, 6, reference.clone(), 3), &[0.0; 3], 3, 3).unwrap();
        assert_eq!(seg.view_count(), 9);
        assert!(seg.labels.iter().all(|l| *l == reference));
    }

    #[test]
    fn single_label_shift_is_hole_filled() {
        let seg = project_labels(&map(5, 4, vec![0; 20], 1), &[1.0], 1, 2).unwrap();
        assert!(seg.labels[1].iter().all(|&l| l == 0));
    }

    #[test]
    fn near_label_wins_contested_pixels() {
        // Columns 0..4 label 0 at d=0, columns 4..8 label 1 at d=2.
        let (w, h) = (8, 2);
        let reference: Vec<u32> = (0..w * h).map(|p| u32::from(p % w >= 4)).collect();
        let disp = [0.0, 2.0];
        let out = project_view(&reference, w, h, &disp, 0, 1);
        // Brute-force oracle with explicit z-order per target pixel.
        for y in 0..h {
            for x in 0..w {
                let mut best: Option<(f64, u32)> = None;
                for sx in 0..w {
                    let l = reference[y * w + sx];
                    if sx as f64 - disp[l as usize] == x as f64 {
                        let cand = (disp[l as usize], l);
                        best = match best {
                            Some(b) if b.0 > cand.0 || (b.0 == cand.0 && b.1 < cand.1) => Some(b),
                            _ => Some(cand),
                        };
                    }
                }
                if let Some((_, l)) = best {
                    assert_eq!(out[y * w + x], l, "pixel ({x},{y})");
                }
            }
        }
        // columns 2 and 3 are claimed by both labels
        assert_eq!(out[2], 1);
        assert_eq!(out[3], 1);
        // trailing columns 6, 7 are holes filled from label 1
        assert_eq!(out[7], 1);
    }

    #[test]
    fn projection_is_deterministic() {
        let reference: Vec<u32> = (0..100).map(|p| ((p % 10) / 4 + 3 * ((p / 10) / 5)) as u32).collect();
        let disp = [0.5, 1.25, -0.75, 2.0, 0.0, 1.0];
        let seg = map(10, 10, reference, 6);
        let a = project_labels(&seg, &disp, 3, 3).unwrap();
        let b = project_labels(&seg, &disp, 3, 3).unwrap();
        assert_eq!(a, b);
        assert!(a.labels.iter().flatten().all(|&l| l < 6));
    }
}
