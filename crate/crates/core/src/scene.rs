//! Deterministic synthetic scenes: textured patches at constant disparity
//! over a flat background.

use alloc::vec;
use alloc::vec::Vec;

use rand_chacha::rand_core::{RngCore, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::error::{Error, Result};
use crate::lightfield::{max_sample_for, DisparityMap, LightField, View};
use crate::math::round_half_away;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum PatchShape {
    Rect,
    /// Ellipse inscribed in the patch bounding box.
    Ellipse,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Texture {
    Constant(u16),
    /// Horizontal ramp from `from` (left column) to `to` (right column).
    Gradient { from: u16, to: u16 },
    /// `base + U{0..=amplitude}` drawn in patch-local raster order.
    Noise { base: u16, amplitude: u16, seed: u64 },
}

/// A patch placed in the reference view (top-left corner `x`, `y`).
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Patch {
    pub shape: PatchShape,
    pub x: usize,
    pub y: usize,
    pub width: usize,
    pub height: usize,
    pub disparity: f64,
    pub texture: Texture,
}

#[derive(Debug, Clone, PartialEq)]
pub struct SceneSpec {
    pub rows: usize,
    pub cols: usize,
    pub width: usize,
    pub height: usize,
    pub bit_depth: u32,
    pub background: u16,
    pub seed: u64,
    pub patches: Vec<Patch>,
}

impl SceneSpec {
    pub fn new(rows: usize, cols: usize, width: usize, height: usize) -> Self {
        SceneSpec { rows, cols, width, height, bit_depth: 8, background: 0, seed: 0, patches: Vec::new() }
    }

    pub fn with_patch(mut self, patch: Patch) -> Self {
        self.patches.push(patch);
        self
    }

    /// 3x3 views of 64x64 pixels: four identical 16x16 noise patches at zero
    /// disparity on a flat background, each filling one cell of the 16-pixel
    /// grid that SLIC seeds with 16 super-pixels.
    pub fn identical_patches() -> Self {
        let mut spec = SceneSpec::new(3, 3, 64, 64);
        spec.background = 20;
        spec.seed = 7;
        for (x, y) in [(16, 0), (48, 16), (0, 32), (32, 48)] {
            spec.patches.push(Patch {
                shape: PatchShape::Rect,
                x,
                y,
                width: 16,
                height: 16,
                disparity: 0.0,
                texture: Texture::Noise { base: 190, amplitude: 20, seed: 1 },
            });
        }
        spec
    }
}

struct Tile {
    patch: Patch,
    samples: Vec<u16>,
}

impl Tile {
    fn new(patch: Patch, scene_seed: u64, max: u16) -> Self {
        let (w, h) = (patch.width, patch.height);
        let samples = match patch.texture {
            Texture::Constant(v) => vec![v.min(max); w * h],
            Texture::Gradient { from, to } => {
                let mut s = Vec::with_capacity(w * h);
                for _ in 0..h {
                    for lx in 0..w {
                        let frac = if w > 1 { lx as f64 / (w - 1) as f64 } else { 0.0 };
                        let v = f64::from(from) + (f64::from(to) - f64::from(from)) * frac;
                        s.push((round_half_away(v) as u16).min(max));
                    }
                }
                s
            }
            Texture::Noise { base, amplitude, seed } => {
                let mut rng = ChaCha8Rng::seed_from_u64(scene_seed);
                rng.set_stream(seed);
                (0..w * h)
                    .map(|_| {
                        let n = rng.next_u32() % (u32::from(amplitude) + 1);
                        (u32::from(base) + n).min(u32::from(max)) as u16
                    })
                    .collect()
            }
        };
        Tile { patch, samples }
    }

    /// Sample at reference-view coordinate, if covered.
    fn sample(&self, rx: i64, ry: i64) -> Option<u16> {
        let p = &self.patch;
        let lx = rx - p.x as i64;
        let ly = ry - p.y as i64;
        if lx < 0 || ly < 0 || lx >= p.width as i64 || ly >= p.height as i64 {
            return None;
        }
        if p.shape == PatchShape::Ellipse {
            let a = p.width as f64 / 2.0;
            let b = p.height as f64 / 2.0;
            let dx = (lx as f64 + 0.5 - a) / a;
            let dy = (ly as f64 + 0.5 - b) / b;
            if dx * dx + dy * dy > 1.0 {
                return None;
            }
        }
        Some(self.samples[ly as usize * p.width + lx as usize])
    }
}

/// Renders every view of the scene and returns the exact reference-view
/// disparity map. A patch at disparity `d` appears in view `(s, t)` shifted
/// by `(-d * t, -d * s)`; nearer patches (larger disparity) occlude farther
/// ones, ties resolved by later patches drawing on top.
pub fn synthesize_light_field(spec: &SceneSpec) -> Result<(LightField, DisparityMap)> {
    if spec.rows == 0 || spec.cols == 0 || spec.width == 0 || spec.height == 0 {
        return Err(Error::EmptyLightField);
    }
    if !matches!(spec.bit_depth, 8 | 10 | 16) {
        return Err(Error::UnsupportedBitDepth(spec.bit_depth));
    }
    let max = max_sample_for(spec.bit_depth) as u16;
    for (index, p) in spec.patches.iter().enumerate() {
        if p.width == 0
            || p.height == 0
            || p.x + p.width > spec.width
            || p.y + p.height > spec.height
            || !p.disparity.is_finite()
        {
            return Err(Error::PatchOutOfBounds { index });
        }
    }
    let mut order: Vec<usize> = (0..spec.patches.len()).collect();
    order.sort_by(|&a, &b| spec.patches[a].disparity.total_cmp(&spec.patches[b].disparity));
    let tiles: Vec<Tile> = order.iter().map(|&i| Tile::new(spec.patches[i], spec.seed, max)).collect();

    let (w, h) = (spec.width, spec.height);
    let mut views = Vec::with_capacity(spec.rows * spec.cols);
    let mut disparity = vec![0.0f32; w * h];
    for s in 0..spec.rows {
        for t in 0..spec.cols {
            let mut plane = vec![spec.background.min(max); w * h];
            for tile in &tiles {
                let d = tile.patch.disparity;
                for y in 0..h {
                    let ry = round_half_away(y as f64 + d * s as f64) as i64;
                    for x in 0..w {
                        let rx = round_half_away(x as f64 + d * t as f64) as i64;
                        if let Some(v) = tile.sample(rx, ry) {
                            plane[y * w + x] = v;
                            if s == 0 && t == 0 {
                                disparity[y * w + x] = d as f32;
                            }
                        }
                    }
                }
            }
            views.push(View { width: w, height: h, planes: vec![plane] });
        }
    }
    let lf = LightField::new(spec.rows, spec.cols, spec.bit_depth, views)?;
    Ok((lf, DisparityMap::new(w, h, disparity)?))
}
