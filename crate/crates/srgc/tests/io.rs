use std::fs;

use srgc::io::{load_disparity, load_light_field, save_disparity, save_light_field, view_file_name};
use srgc::Error;
use srgc_core::scene::{synthesize_light_field, SceneSpec};
use srgc_core::{LightField, View};

fn ramp_lf(rows: usize, cols: usize, w: usize, h: usize, bit_depth: u32, channels: usize) -> LightField {
    let max = (1u32 << bit_depth) - 1;
    let views = (0..rows * cols)
        .map(|v| {
            let planes = (0..channels)
                .map(|c| (0..w * h).map(|i| ((i * 37 + v * 11 + c * 101) as u32 % (max + 1)) as u16).collect())
                .collect();
            View::new(w, h, planes).unwrap()
        })
        .collect();
    LightField::new(rows, cols, bit_depth, views).unwrap()
}

#[test]
fn save_then_load_is_bit_identical() {
    for (bit_depth, channels) in [(8, 1), (10, 1), (16, 1), (8, 3), (16, 3)] {
        let dir = tempfile::tempdir().unwrap();
        let lf = ramp_lf(3, 3, 16, 16, bit_depth, channels);
        save_light_field(&lf, dir.path()).unwrap();
        assert_eq!(load_light_field(dir.path()).unwrap(), lf, "{bit_depth}-bit, {channels} channel(s)");
    }
}

#[test]
fn ten_bit_views_are_written_with_maxval_1023() {
    let dir = tempfile::tempdir().unwrap();
    save_light_field(&ramp_lf(1, 2, 4, 4, 10, 1), dir.path()).unwrap();
    let bytes = fs::read(dir.path().join("view_00_01.pgm")).unwrap();
    assert!(bytes.starts_with(b"P5\n4 4\n1023\n"));
    assert_eq!(bytes.len(), 12 + 2 * 16);
}

#[test]
fn missing_view_is_reported_by_position() {
    let dir = tempfile::tempdir().unwrap();
    save_light_field(&ramp_lf(3, 3, 8, 8, 8, 1), dir.path()).unwrap();
    fs::remove_file(dir.path().join(view_file_name(0, 2, "pgm"))).unwrap();
    let err = load_light_field(dir.path()).unwrap_err();
    assert!(matches!(err, Error::IncompleteGrid { s: 0, t: 2, .. }), "{err}");
    assert!(err.to_string().contains("incomplete grid"));
}

#[test]
fn missing_directory_is_an_incomplete_grid() {
    let err = load_light_field(std::path::Path::new("/nonexistent/srgc-views")).unwrap_err();
    assert!(err.to_string().contains("incomplete grid"));
}

#[test]
fn mismatched_view_sizes_are_inconsistent() {
    let dir = tempfile::tempdir().unwrap();
    save_light_field(&ramp_lf(1, 2, 8, 8, 8, 1), dir.path()).unwrap();
    save_light_field(&ramp_lf(1, 1, 6, 8, 8, 1), &dir.path().join("small")).unwrap();
    fs::copy(dir.path().join("small/view_00_00.pgm"), dir.path().join("view_00_01.pgm")).unwrap();
    let err = load_light_field(dir.path()).unwrap_err();
    assert!(matches!(err, Error::Codec(srgc_core::Error::InconsistentViews(_))), "{err}");
}

#[test]
fn empty_light_field_cannot_be_built() {
    assert_eq!(LightField::new(0, 3, 8, Vec::new()), Err(srgc_core::Error::EmptyLightField));
}

#[test]
fn nine_by_nine_grid_sample_count() {
    let dir = tempfile::tempdir().unwrap();
    save_light_field(&ramp_lf(9, 9, 64, 64, 8, 1), dir.path()).unwrap();
    assert_eq!(load_light_field(dir.path()).unwrap().samples_per_channel(), 331_776);
}

#[test]
fn synthesized_scene_disparity_roundtrips() {
    let (_, dmap) = synthesize_light_field(&SceneSpec::identical_patches()).unwrap();
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("gt.lfdm");
    save_disparity(&dmap, &path).unwrap();
    assert_eq!(fs::metadata(&path).unwrap().len(), 16 + 4 * 64 * 64);
    assert_eq!(load_disparity(&path).unwrap(), dmap);
}
