//! Line-oriented scene descriptions for the synthesizer.
//!
//! ```text
//! # comment
//! views 3 3                  # angular rows, cols (required)
//! size 64 64                 # width, height (required)
//! bit_depth 8                # 8, 10 or 16 (default 8)
//! background 20              # default 0
//! seed 7                     # default 0
//! patch rect x=16 y=0 w=16 h=16 disparity=0 texture=noise base=190 amplitude=20 seed=1
//! patch ellipse x=4 y=4 w=10 h=8 disparity=1.5 texture=constant value=200
//! patch rect x=0 y=40 w=20 h=10 disparity=-0.5 texture=gradient from=10 to=240
//! ```

use std::collections::BTreeMap;
use std::path::Path;

use srgc_core::scene::{Patch, PatchShape, SceneSpec, Texture};

use crate::error::{Error, Result};

pub fn load_scene(path: &Path) -> Result<SceneSpec> {
    let text = std::fs::read_to_string(path).map_err(|e| Error::Io { path: path.to_path_buf(), source: e })?;
    parse_scene(&text, path)
}

pub fn parse_scene(text: &str, path: &Path) -> Result<SceneSpec> {
    let mut views = None;
    let mut size = None;
    let mut spec = SceneSpec::new(1, 1, 1, 1);
    for (i, raw) in text.lines().enumerate() {
        let line_no = i + 1;
        let fail = |detail: String| Error::Parse { path: path.to_path_buf(), line: line_no, detail };
        let line = raw.split('#').next().unwrap_or("").trim();
        if line.is_empty() {
            continue;
        }
        let mut words = line.split_whitespace();
        let keyword = words.next().expect("non-empty line");
        let args: Vec<&str> = words.collect();
        let nums = |count: usize| -> Result<Vec<u64>> {
            if args.len() != count {
                return Err(fail(format!("`{keyword}` takes {count} value(s)")));
            }
            args.iter().map(|a| a.parse::<u64>().map_err(|_| fail(format!("bad number {a:?}")))).collect()
        };
        match keyword {
            "views" => views = Some(nums(2)?),
            "size" => size = Some(nums(2)?),
            "bit_depth" => spec.bit_depth = nums(1)?[0] as u32,
            "background" => {
                spec.background = u16::try_from(nums(1)?[0]).map_err(|_| fail("background exceeds 65535".into()))?
            }
            "seed" => spec.seed = nums(1)?[0],
            "patch" => spec.patches.push(parse_patch(&args).map_err(fail)?),
            other => return Err(fail(format!("unknown keyword {other:?}"))),
        }
    }
    let missing = |what: &str| Error::Parse { path: path.to_path_buf(), line: 0, detail: format!("missing `{what}` line") };
    let views = views.ok_or_else(|| missing("views"))?;
    let size = size.ok_or_else(|| missing("size"))?;
    spec.rows = views[0] as usize;
    spec.cols = views[1] as usize;
    spec.width = size[0] as usize;
    spec.height = size[1] as usize;
    Ok(spec)
}

fn parse_patch(args: &[&str]) -> std::result::Result<Patch, String> {
    let (shape, rest) = args.split_first().ok_or("`patch` needs a shape")?;
    let shape = match *shape {
        "rect" => PatchShape::Rect,
        "ellipse" => PatchShape::Ellipse,
        other => return Err(format!("unknown shape {other:?}, expected rect or ellipse")),
    };
    let mut kv = BTreeMap::new();
    for item in rest {
        let (k, v) = item.split_once('=').ok_or_else(|| format!("expected key=value, got {item:?}"))?;
        if kv.insert(k, v).is_some() {
            return Err(format!("duplicate key {k:?}"));
        }
    }
    let mut take = |k: &str| kv.remove(k).ok_or_else(|| format!("patch is missing `{k}`"));
    let int = |v: &str| v.parse::<u64>().map_err(|_| format!("bad number {v:?}"));
    let sample = |v: &str| v.parse::<u16>().map_err(|_| format!("bad sample value {v:?}"));
    let x = int(take("x")?)? as usize;
    let y = int(take("y")?)? as usize;
    let width = int(take("w")?)? as usize;
    let height = int(take("h")?)? as usize;
    let d = take("disparity")?;
    let disparity = d.parse::<f64>().ok().filter(|v| v.is_finite()).ok_or_else(|| format!("bad disparity {d:?}"))?;
    let texture = match take("texture")? {
        "constant" => Texture::Constant(sample(take("value")?)?),
        "gradient" => Texture::Gradient { from: sample(take("from")?)?, to: sample(take("to")?)? },
        "noise" => Texture::Noise {
            base: sample(take("base")?)?,
            amplitude: sample(take("amplitude")?)?,
            seed: int(take("seed")?)?,
        },
        other => return Err(format!("unknown texture {other:?}")),
    };
    if let Some(k) = kv.keys().next() {
        return Err(format!("unknown patch key {k:?}"));
    }
    Ok(Patch { shape, x, y, width, height, disparity, texture })
}
