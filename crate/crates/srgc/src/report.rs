//! Line-oriented `key=value` renderings of codec reports.

use std::fmt::Write;

use srgc_core::codec::{DecodeReport, EncodeReport, StageTimes};

fn times(out: &mut String, t: &StageTimes) {
    for (k, v) in [
        ("segmentation", t.segmentation),
        ("structure", t.structure),
        ("eigen", t.eigen),
        ("transform", t.transform),
        ("grouping", t.grouping),
        ("residual", t.residual),
        ("entropy", t.entropy),
        ("total", t.total),
    ] {
        let _ = writeln!(out, "t_{k}_s={v:.6}");
    }
}

pub fn encode_report(r: &EncodeReport) -> String {
    let mut out = String::new();
    let _ = writeln!(out, "channels={}", r.channels);
    let _ = writeln!(out, "super_rays={}", r.super_rays);
    let _ = writeln!(out, "total_sr={}", r.total_sr);
    let _ = writeln!(out, "coarsened={}", r.coarsened);
    let _ = writeln!(out, "pairs={}", r.pairs);
    let _ = writeln!(out, "pairs_under_threshold={}", r.pairs_under_threshold);
    let _ = writeln!(out, "threshold={}", r.threshold);
    let _ = writeln!(out, "one_level_groups={}", r.one_level_groups);
    let _ = writeln!(out, "groups={}", r.groups);
    let _ = writeln!(out, "grouped={}", r.grouped);
    let _ = writeln!(out, "ratio_c={:.4}", r.coarsened_ratio);
    let _ = writeln!(out, "ratio_o={:.4}", r.overall_ratio);
    let _ = writeln!(out, "eig_enc={}", r.eig_count);
    let _ = writeln!(out, "stream_bytes={}", r.stream_bytes);
    let _ = writeln!(out, "bpp={:.6}", r.bpp);
    let _ = writeln!(out, "workers={}", r.workers);
    times(&mut out, &r.times);
    out
}

pub fn decode_report(r: &DecodeReport) -> String {
    let mut out = String::new();
    let _ = writeln!(out, "channels={}", r.channels);
    let _ = writeln!(out, "total_sr={}", r.total_sr);
    let _ = writeln!(out, "coarsened={}", r.coarsened);
    let _ = writeln!(out, "groups={}", r.groups);
    let _ = writeln!(out, "grouped={}", r.grouped);
    let _ = writeln!(out, "ungrouped={}", r.ungrouped);
    let _ = writeln!(out, "eig_dec={}", r.eig_count);
    let _ = writeln!(out, "workers={}", r.workers);
    times(&mut out, &r.times);
    out
}

/// Value of `key` in a `key=value` report.
pub fn lookup<'a>(report: &'a str, key: &str) -> Option<&'a str> {
    report.lines().find_map(|l| l.strip_prefix(key)?.strip_prefix('='))
}
