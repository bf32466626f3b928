use std::path::Path;
use std::process::{Command, Output};

use srgc::report::lookup;

fn srgc(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_srgc")).args(args).output().expect("binary runs")
}

fn stdout(out: &Output) -> String {
    String::from_utf8_lossy(&out.stdout).into_owned()
}

fn scene(name: &str) -> String {
    Path::new(env!("CARGO_MANIFEST_DIR")).join("../../scenes").join(name).to_string_lossy().into_owned()
}

fn p(path: &Path) -> &str {
    path.to_str().unwrap()
}

#[test]
fn synth_encode_decode_pipeline() {
    let dir = tempfile::tempdir().unwrap();
    let lf = dir.path().join("lf");
    let stream = dir.path().join("a.srgc");
    let rec = dir.path().join("rec");
    let out = srgc(&["synth", "--spec", &scene("patches.txt"), "--out", p(&lf)]);
    assert!(out.status.success(), "{out:?}");
    assert!(lf.join("gt.lfdm").exists());
    let out = srgc(&["encode", p(&lf), "--disparity", p(&lf.join("gt.lfdm")), "--q-gft", "8", "--out", p(&stream)]);
    assert!(out.status.success(), "{out:?}");
    let enc = stdout(&out);
    assert_eq!(lookup(&enc, "stream_bytes").unwrap(), std::fs::metadata(&stream).unwrap().len().to_string());
    let out = srgc(&["decode", p(&stream), "--out", p(&rec)]);
    assert!(out.status.success(), "{out:?}");
    let decoded = srgc::io::load_light_field(&rec).unwrap();
    assert_eq!(decoded.angular_dims(), (3, 3));

    let out = srgc(&["analyze", p(&stream), "--reference", p(&lf)]);
    assert!(out.status.success(), "{out:?}");
    let text = stdout(&out);
    assert!(lookup(&text, "psnr_y").unwrap().parse::<f64>().unwrap() > 30.0);
    assert!(lookup(&text, "section_residual_bytes").is_some());
}

#[test]
fn missing_input_directory_exits_with_data_error() {
    let dir = tempfile::tempdir().unwrap();
    let out = srgc(&["encode", p(&dir.path().join("missing_dir")), "--out", p(&dir.path().join("x.srgc"))]);
    assert_eq!(out.status.code(), Some(2));
    assert!(String::from_utf8_lossy(&out.stderr).contains("incomplete grid"));
}

#[test]
fn usage_errors_exit_with_one() {
    assert_eq!(srgc(&["encode", "--bogus-flag"]).status.code(), Some(1));
    assert_eq!(srgc(&["frobnicate"]).status.code(), Some(1));
    let dir = tempfile::tempdir().unwrap();
    let lf = dir.path().join("lf");
    assert!(srgc(&["synth", "--spec", &scene("patches.txt"), "--out", p(&lf)]).status.success());
    let out = srgc(&["encode", p(&lf), "--q-gft", "-3", "--out", p(&dir.path().join("x.srgc"))]);
    assert_eq!(out.status.code(), Some(1));
    assert_eq!(srgc(&["--help"]).status.code(), Some(0));
}

#[test]
fn corrupt_stream_exits_with_data_error() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("bad.srgc");
    std::fs::write(&path, b"NOPE\x01").unwrap();
    let out = srgc(&["decode", p(&path), "--out", p(&dir.path().join("rec"))]);
    assert_eq!(out.status.code(), Some(2));
    assert!(String::from_utf8_lossy(&out.stderr).contains("unsupported stream"));
}

#[test]
fn grouping_reduces_decoder_decompositions_and_threads_do_not_change_bytes() {
    let dir = tempfile::tempdir().unwrap();
    let lf = dir.path().join("lf");
    assert!(srgc(&["synth", "--spec", &scene("patches.txt"), "--out", p(&lf)]).status.success());
    let gt = lf.join("gt.lfdm");
    let encode = |name: &str, extra: &[&str]| -> Vec<u8> {
        let stream = dir.path().join(name);
        let mut args = vec!["encode", p(&lf), "--disparity", p(&gt), "--out", p(&stream)];
        args.extend_from_slice(extra);
        let out = srgc(&args);
        assert!(out.status.success(), "{out:?}");
        std::fs::read(stream).unwrap()
    };
    let decode_eig = |name: &str| -> usize {
        let rec = dir.path().join(format!("{name}.rec"));
        let stream = dir.path().join(name);
        let out = srgc(&["decode", p(&stream), "--out", p(&rec)]);
        assert!(out.status.success(), "{out:?}");
        lookup(&stdout(&out), "eig_dec").unwrap().parse().unwrap()
    };
    let one = encode("t1.srgc", &["--threads", "1"]);
    let eight = encode("t8.srgc", &["--threads", "8"]);
    assert_eq!(one, eight);
    encode("base.srgc", &["--no-grouping"]);
    assert!(decode_eig("t1.srgc") < decode_eig("base.srgc"));
}

#[test]
fn config_file_sits_between_defaults_and_flags() {
    let dir = tempfile::tempdir().unwrap();
    let lf = dir.path().join("lf");
    assert!(srgc(&["synth", "--spec", &scene("patches.txt"), "--out", p(&lf)]).status.success());
    let cfg = dir.path().join("codec.cfg");
    let stream = dir.path().join("c.srgc");
    std::fs::write(&cfg, "grouping = false\nq_gft = 32\n").unwrap();
    let run = |extra: &[&str]| -> String {
        let mut args = vec!["encode", p(&lf), "--config", p(&cfg), "--out", p(&stream)];
        args.extend_from_slice(extra);
        let out = srgc(&args);
        assert!(out.status.success(), "{out:?}");
        stdout(&out)
    };
    assert_eq!(lookup(&run(&[]), "groups"), Some("0"));
    let analyze = srgc(&["analyze", p(&stream)]);
    assert_eq!(lookup(&stdout(&analyze), "q_gft"), Some("32"));
    run(&["--q-gft", "20"]);
    let analyze = srgc(&["analyze", p(&stream)]);
    assert_eq!(lookup(&stdout(&analyze), "q_gft"), Some("20"));

    std::fs::write(&cfg, "colour = blue\n").unwrap();
    let out = srgc(&["encode", p(&lf), "--config", p(&cfg), "--out", p(&stream)]);
    assert_eq!(out.status.code(), Some(2));
}

#[test]
fn sweep_writes_one_row_per_step() {
    let dir = tempfile::tempdir().unwrap();
    let lf = dir.path().join("lf");
    assert!(srgc(&["synth", "--spec", &scene("patches.txt"), "--out", p(&lf)]).status.success());
    let csv = dir.path().join("rd.csv");
    let out = srgc(&["sweep", p(&lf), "--q", "16,32", "--report", p(&csv)]);
    assert!(out.status.success(), "{out:?}");
    let text = std::fs::read_to_string(csv).unwrap();
    let lines: Vec<&str> = text.lines().collect();
    assert_eq!(lines[0], srgc_core::metrics::CSV_HEADER);
    assert_eq!(lines.len(), 3);
    assert!(lines[1].starts_with("16,1,"));
}
