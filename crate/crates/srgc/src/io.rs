//! On-disk formats: binary PGM/PPM views, view directories, `LFDM`
//! disparity grids and `.srgc` streams.

use std::fs;
use std::path::{Path, PathBuf};

use srgc_core::bitstream::Bitstream;
use srgc_core::lightfield::max_sample_for;
use srgc_core::{DisparityMap, LightField, View};

use crate::error::{Error, Result};

const LFDM_MAGIC: &[u8; 4] = b"LFDM";

/// File name of view `(s, t)` with the given extension.
pub fn view_file_name(s: usize, t: usize, ext: &str) -> String {
    format!("view_{s:02}_{t:02}.{ext}")
}

/// Decoded PGM (1 channel) or PPM (3 channels) image.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Pnm {
    pub bit_depth: u32,
    pub view: View,
}

fn bit_depth_for_maxval(maxval: u32) -> Option<u32> {
    match maxval {
        255 => Some(8),
        1023 => Some(10),
        65535 => Some(16),
        _ => None,
    }
}

/// Parses binary `P5`/`P6` data. Samples wider than 8 bits are big-endian.
pub fn parse_pnm(data: &[u8], path: &Path) -> Result<Pnm> {
    let bad = |detail: &str| Error::format(path, detail);
    let mut pos = 0;
    let mut fields = Vec::with_capacity(4);
    while fields.len() < 4 {
        while pos < data.len() && (data[pos].is_ascii_whitespace() || data[pos] == b'#') {
            if data[pos] == b'#' {
                while pos < data.len() && data[pos] != b'\n' {
                    pos += 1;
                }
            } else {
                pos += 1;
            }
        }
        let start = pos;
        while pos < data.len() && !data[pos].is_ascii_whitespace() {
            pos += 1;
        }
        if start == pos {
            return Err(bad("truncated header"));
        }
        fields.push(std::str::from_utf8(&data[start..pos]).map_err(|_| bad("non-ASCII header"))?);
    }
    let channels = match fields[0] {
        "P5" => 1,
        "P6" => 3,
        other => return Err(bad(&format!("unsupported magic {other:?}, expected P5 or P6"))),
    };
    let num = |s: &str| s.parse::<usize>().map_err(|_| bad(&format!("bad header number {s:?}")));
    let (width, height, maxval) = (num(fields[1])?, num(fields[2])?, num(fields[3])?);
    let bit_depth = bit_depth_for_maxval(maxval as u32).ok_or_else(|| bad(&format!("maxval {maxval} is not 255, 1023 or 65535")))?;
    // Exactly one whitespace byte separates the header from the raster.
    pos += 1;
    let bytes_per_sample = if maxval > 255 { 2 } else { 1 };
    let n = width * height;
    let raster = data.get(pos..).unwrap_or(&[]);
    if raster.len() != n * channels * bytes_per_sample {
        return Err(bad(&format!("raster has {} bytes, expected {}", raster.len(), n * channels * bytes_per_sample)));
    }
    let mut planes = vec![Vec::with_capacity(n); channels];
    for (i, chunk) in raster.chunks_exact(bytes_per_sample).enumerate() {
        let v = if bytes_per_sample == 2 { u16::from_be_bytes([chunk[0], chunk[1]]) } else { u16::from(chunk[0]) };
        if u32::from(v) > maxval as u32 {
            return Err(bad(&format!("sample {v} exceeds maxval {maxval}")));
        }
        planes[i % channels].push(v);
    }
    let view = View::new(width, height, planes).map_err(|e| bad(&e.to_string()))?;
    Ok(Pnm { bit_depth, view })
}

pub fn encode_pnm(view: &View, bit_depth: u32) -> Vec<u8> {
    let channels = view.channels();
    let maxval = max_sample_for(bit_depth);
    let magic = if channels == 1 { "P5" } else { "P6" };
    let mut out = format!("{magic}\n{} {}\n{maxval}\n", view.width, view.height).into_bytes();
    let wide = maxval > 255;
    for i in 0..view.width * view.height {
        for plane in &view.planes {
            if wide {
                out.extend_from_slice(&plane[i].to_be_bytes());
            } else {
                out.push(plane[i] as u8);
            }
        }
    }
    out
}

fn read(path: &Path) -> Result<Vec<u8>> {
    fs::read(path).map_err(|e| Error::io(path, e))
}

fn write(path: &Path, data: &[u8]) -> Result<()> {
    fs::write(path, data).map_err(|e| Error::io(path, e))
}

/// Loads `view_SS_TT.pgm|ppm` files from `dir`. The grid extent is taken
/// from the largest indices present; every position must exist.
pub fn load_light_field(dir: &Path) -> Result<LightField> {
    let mut found: Vec<(usize, usize, PathBuf)> = Vec::new();
    if let Ok(entries) = fs::read_dir(dir) {
        for entry in entries {
            let entry = entry.map_err(|e| Error::io(dir, e))?;
            let name = entry.file_name();
            if let Some((s, t)) = name.to_str().and_then(parse_view_name) {
                found.push((s, t, entry.path()));
            }
        }
    }
    if found.is_empty() {
        return Err(Error::IncompleteGrid { dir: dir.to_path_buf(), s: 0, t: 0 });
    }
    found.sort();
    let rows = found.iter().map(|f| f.0).max().unwrap_or(0) + 1;
    let cols = found.iter().map(|f| f.1).max().unwrap_or(0) + 1;
    let mut grid: Vec<Option<PathBuf>> = vec![None; rows * cols];
    for (s, t, path) in found {
        let slot = &mut grid[s * cols + t];
        if slot.is_some() {
            return Err(Error::format(&path, format!("duplicate view ({s},{t})")));
        }
        *slot = Some(path);
    }
    let mut views = Vec::with_capacity(rows * cols);
    let mut bit_depth = None;
    for (i, slot) in grid.iter().enumerate() {
        let path = slot.as_ref().ok_or(Error::IncompleteGrid { dir: dir.to_path_buf(), s: i / cols, t: i % cols })?;
        let pnm = parse_pnm(&read(path)?, path)?;
        if *bit_depth.get_or_insert(pnm.bit_depth) != pnm.bit_depth {
            return Err(Error::Codec(srgc_core::Error::InconsistentViews(format!(
                "{} has bit depth {}, expected {}",
                path.display(),
                pnm.bit_depth,
                bit_depth.unwrap_or(0)
            ))));
        }
        views.push(pnm.view);
    }
    Ok(LightField::new(rows, cols, bit_depth.unwrap_or(8), views)?)
}

fn parse_view_name(name: &str) -> Option<(usize, usize)> {
    let stem = name.strip_suffix(".pgm").or_else(|| name.strip_suffix(".ppm"))?;
    let rest = stem.strip_prefix("view_")?;
    let (s, t) = rest.split_once('_')?;
    let digits = |x: &str| x.len() >= 2 && x.bytes().all(|b| b.is_ascii_digit());
    if !digits(s) || !digits(t) {
        return None;
    }
    Some((s.parse().ok()?, t.parse().ok()?))
}

/// Writes every view as `view_SS_TT.pgm` (or `.ppm` for RGB), creating
/// `dir` if needed.
pub fn save_light_field(lf: &LightField, dir: &Path) -> Result<()> {
    if lf.view_count() == 0 {
        return Err(srgc_core::Error::EmptyLightField.into());
    }
    fs::create_dir_all(dir).map_err(|e| Error::io(dir, e))?;
    let ext = if lf.channels() == 1 { "pgm" } else { "ppm" };
    let (_, cols) = lf.angular_dims();
    for (i, view) in lf.views().iter().enumerate() {
        let path = dir.join(view_file_name(i / cols, i % cols, ext));
        write(&path, &encode_pnm(view, lf.bit_depth()))?;
    }
    Ok(())
}

/// `LFDM` disparity grid: magic, width, height, a reserved zero word (all
/// u32 little-endian), then `width * height` f32 little-endian values in
/// raster order.
pub fn encode_disparity(dmap: &DisparityMap) -> Vec<u8> {
    let mut out = Vec::with_capacity(16 + 4 * dmap.values().len());
    out.extend_from_slice(LFDM_MAGIC);
    out.extend_from_slice(&(dmap.width() as u32).to_le_bytes());
    out.extend_from_slice(&(dmap.height() as u32).to_le_bytes());
    out.extend_from_slice(&0u32.to_le_bytes());
    for v in dmap.values() {
        out.extend_from_slice(&v.to_le_bytes());
    }
    out
}

pub fn parse_disparity(data: &[u8], path: &Path) -> Result<DisparityMap> {
    if data.len() < 16 || &data[..4] != LFDM_MAGIC {
        return Err(Error::format(path, "not an LFDM disparity file"));
    }
    let word = |o: usize| u32::from_le_bytes(data[o..o + 4].try_into().expect("4 bytes")) as usize;
    let (width, height) = (word(4), word(8));
    let body = &data[16..];
    if body.len() != 4 * width * height {
        return Err(Error::format(path, format!("{} value bytes, expected {}", body.len(), 4 * width * height)));
    }
    let values = body.chunks_exact(4).map(|c| f32::from_le_bytes(c.try_into().expect("4 bytes"))).collect();
    DisparityMap::new(width, height, values).map_err(|e| Error::format(path, e.to_string()))
}

pub fn load_disparity(path: &Path) -> Result<DisparityMap> {
    parse_disparity(&read(path)?, path)
}

pub fn save_disparity(dmap: &DisparityMap, path: &Path) -> Result<()> {
    write(path, &encode_disparity(dmap))
}

pub fn load_stream(path: &Path) -> Result<Bitstream> {
    Ok(Bitstream::deserialize(&read(path)?)?)
}

pub fn save_stream(bs: &Bitstream, path: &Path) -> Result<()> {
    write(path, &bs.serialize())
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn view_names() {
        assert_eq!(view_file_name(0, 2, "pgm"), "view_00_02.pgm");
        assert_eq!(parse_view_name("view_03_11.ppm"), Some((3, 11)));
        assert_eq!(parse_view_name("view_3_11.ppm"), None);
        assert_eq!(parse_view_name("view_03_11.png"), None);
        assert_eq!(parse_view_name("gt.lfdm"), None);
    }

    #[test]
    fn pnm_header_comments_are_skipped() {
        let data = b"P5\n# made by hand\n2 1\n255\n\x07\x09";
        let pnm = parse_pnm(data, Path::new("x.pgm")).unwrap();
        assert_eq!(pnm.view.planes, vec![vec![7, 9]]);
        assert_eq!(pnm.bit_depth, 8);
    }

    #[test]
    fn ten_bit_views_use_maxval_1023() {
        let view = View::new(2, 1, vec![vec![1023, 5]]).unwrap();
        let bytes = encode_pnm(&view, 10);
        assert!(bytes.starts_with(b"P5\n2 1\n1023\n"));
        assert_eq!(parse_pnm(&bytes, Path::new("x.pgm")).unwrap(), Pnm { bit_depth: 10, view });
    }

    #[test]
    fn odd_maxval_and_short_raster_are_rejected() {
        assert!(parse_pnm(b"P5\n1 1\n100\n\x01", Path::new("a")).is_err());
        assert!(parse_pnm(b"P5\n2 2\n255\n\x01", Path::new("a")).is_err());
        assert!(parse_pnm(b"P2\n1 1\n255\n1", Path::new("a")).is_err());
    }

    #[test]
    fn disparity_roundtrip() {
        let dmap = DisparityMap::new(3, 2, vec![0.0, 1.5, -2.25, 3.0, 0.125, 9.0]).unwrap();
        let bytes = encode_disparity(&dmap);
        assert_eq!(bytes.len(), 16 + 24);
        assert_eq!(parse_disparity(&bytes, Path::new("d")).unwrap(), dmap);
        assert!(parse_disparity(&bytes[..20], Path::new("d")).is_err());
    }
}
