//! Quality and rate measures.

use alloc::format;
use alloc::string::String;
use alloc::vec::Vec;

use crate::bitstream::Bitstream;
use crate::codec::{decode_with, encode_with, CodecConfig};
use crate::error::{Error, Result};
use crate::lightfield::{DisparityMap, LightField};
use crate::math::log10;
use crate::runtime::Runtime;

/// PSNR in dB over every sample of the luma of both light fields;
/// `f64::INFINITY` when they are identical.
pub fn psnr(a: &LightField, b: &LightField) -> Result<f64> {
    if a.angular_dims() != b.angular_dims() || a.spatial_dims() != b.spatial_dims() {
        return Err(Error::DimensionMismatch { expected: a.samples_per_channel(), actual: b.samples_per_channel() });
    }
    if a.bit_depth() != b.bit_depth() {
        return Err(Error::invalid("bit depths differ"));
    }
    let (la, lb) = (a.luma(), b.luma());
    Ok(psnr_samples(
        la.views().iter().flat_map(|v| v.planes[0].iter().copied()),
        lb.views().iter().flat_map(|v| v.planes[0].iter().copied()),
        f64::from(a.max_sample()),
    ))
}

/// PSNR of two equally long sample sequences.
pub fn psnr_samples(a: impl Iterator<Item = u16>, b: impl Iterator<Item = u16>, max: f64) -> f64 {
    let mut sum = 0.0;
    let mut n = 0usize;
    for (x, y) in a.zip(b) {
        let d = f64::from(x) - f64::from(y);
        sum += d * d;
        n += 1;
    }
    if sum == 0.0 || n == 0 {
        return f64::INFINITY;
    }
    psnr_from_mse(sum / n as f64, max)
}

pub fn psnr_from_mse(mse: f64, max: f64) -> f64 {
    if mse == 0.0 {
        f64::INFINITY
    } else {
        10.0 * log10(max * max / mse)
    }
}

/// Bits per pixel over the whole light field.
pub fn bpp_for_bytes(bytes: usize, pixels: usize) -> f64 {
    8.0 * bytes as f64 / pixels as f64
}

pub fn bpp(bs: &Bitstream) -> f64 {
    bpp_for_bytes(bs.byte_len(), bs.header.samples_per_channel())
}

/// `(grouped / coarsened, grouped / total)`, each 0 for an empty denominator.
pub fn grouping_ratios(grouped: usize, coarsened: usize, total: usize) -> (f64, f64) {
    let ratio = |d: usize| if d == 0 { 0.0 } else { grouped as f64 / d as f64 };
    (ratio(coarsened), ratio(total))
}

/// One encode/decode run of a rate-distortion sweep.
#[derive(Debug, Clone, PartialEq)]
pub struct RdPoint {
    pub q_gft: f64,
    pub q_dct: f64,
    pub bpp: f64,
    pub psnr_y: f64,
    pub eig_enc: usize,
    pub eig_dec: usize,
    pub groups: usize,
    pub grouped: usize,
    pub coarsened: usize,
    pub total_sr: usize,
    pub ratio_c: f64,
    pub ratio_o: f64,
    pub t_enc_s: f64,
    pub t_dec_s: f64,
}

pub const CSV_HEADER: &str =
    "q_gft,q_dct,bpp,psnr_y,eig_enc,eig_dec,groups,grouped,coarsened,total_sr,ratio_c,ratio_o,t_enc_s,t_dec_s";

impl RdPoint {
    /// CSV row matching [`CSV_HEADER`]; infinite PSNR is written as `inf`.
    pub fn csv_row(&self) -> String {
        let psnr = if self.psnr_y.is_infinite() { String::from("inf") } else { format!("{:.4}", self.psnr_y) };
        format!(
            "{},{},{:.6},{},{},{},{},{},{},{},{:.4},{:.4},{:.6},{:.6}",
            self.q_gft,
            self.q_dct,
            self.bpp,
            psnr,
            self.eig_enc,
            self.eig_dec,
            self.groups,
            self.grouped,
            self.coarsened,
            self.total_sr,
            self.ratio_c,
            self.ratio_o,
            self.t_enc_s,
            self.t_dec_s
        )
    }
}

/// Header line plus one row per point, newline-terminated.
pub fn to_csv(points: &[RdPoint]) -> String {
    let mut out = String::from(CSV_HEADER);
    out.push('\n');
    for p in points {
        out.push_str(&p.csv_row());
        out.push('\n');
    }
    out
}

/// Encodes and decodes `lf` once per GFT step in `q_list`, in order.
pub fn rd_sweep<R: Runtime + ?Sized>(
    rt: &R,
    lf: &LightField,
    dmap: &DisparityMap,
    q_list: &[f64],
    cfg: &CodecConfig,
) -> Result<Vec<RdPoint>> {
    if q_list.is_empty() {
        return Err(Error::invalid("empty quantizer list"));
    }
    q_list
        .iter()
        .map(|&q_gft| {
            let cfg = CodecConfig { q_gft, ..cfg.clone() };
            let enc = encode_with(rt, lf, dmap, &cfg)?;
            let dec = decode_with(rt, &enc.bitstream)?;
            let r = &enc.report;
            Ok(RdPoint {
                q_gft,
                q_dct: cfg.q_dct,
                bpp: bpp(&enc.bitstream),
                psnr_y: psnr(&dec.light_field, lf)?,
                eig_enc: r.eig_count,
                eig_dec: dec.report.eig_count,
                groups: r.groups,
                grouped: r.grouped,
                coarsened: r.coarsened,
                total_sr: r.total_sr,
                ratio_c: r.coarsened_ratio,
                ratio_o: r.overall_ratio,
                t_enc_s: r.times.total,
                t_dec_s: dec.report.times.total,
            })
        })
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::lightfield::View;
    use alloc::vec;

    fn flat(bit_depth: u32, value: u16) -> LightField {
        let views = (0..4).map(|_| View::filled(5, 4, 1, value)).collect();
        LightField::new(2, 2, bit_depth, views).unwrap()
    }

    fn point(psnr_y: f64) -> RdPoint {
        RdPoint {
            q_gft: 8.0,
            q_dct: 1.0,
            bpp: 0.5,
            psnr_y,
            eig_enc: 10,
            eig_dec: 7,
            groups: 1,
            grouped: 4,
            coarsened: 10,
            total_sr: 10,
            ratio_c: 0.4,
            ratio_o: 0.4,
            t_enc_s: 0.0,
            t_dec_s: 0.0,
        }
    }

    #[test]
    fn csv_writes_inf_and_one_row_per_point() {
        let csv = to_csv(&[point(f64::INFINITY)]);
        let lines: alloc::vec::Vec<&str> = csv.lines().collect();
        assert_eq!(lines.len(), 2);
        assert_eq!(lines[0].split(',').count(), lines[1].split(',').count());
        assert_eq!(lines[1].split(',').nth(3), Some("inf"));
        assert!(point(41.25).csv_row().contains(",41.2500,"));
    }

    #[test]
    fn empty_sweep_is_rejected() {
        let lf = flat(8, 1);
        let dmap = DisparityMap::constant(5, 4, 0.0);
        assert!(rd_sweep(&crate::Sequential, &lf, &dmap, &[], &CodecConfig::default()).is_err());
    }

    fn round2(x: f64) -> f64 {
        crate::math::round_half_away(x * 100.0) / 100.0
    }

    #[test]
    fn identical_light_fields_are_infinite() {
        assert_eq!(psnr(&flat(8, 7), &flat(8, 7)).unwrap(), f64::INFINITY);
    }

    #[test]
    fn unit_error_at_eight_bits() {
        let p = psnr(&flat(8, 100), &flat(8, 101)).unwrap();
        assert!((p - 48.1308).abs() < 1e-3, "{p}");
        assert_eq!(p, psnr(&flat(8, 101), &flat(8, 100)).unwrap());
    }

    #[test]
    fn ten_bit_mse_four() {
        let p = psnr(&flat(10, 500), &flat(10, 502)).unwrap();
        assert!((p - 54.1769).abs() < 1e-3, "{p}");
    }

    #[test]
    fn mismatched_dims_are_rejected() {
        let other = LightField::new(1, 1, 8, vec![View::filled(5, 4, 1, 0)]).unwrap();
        assert!(psnr(&flat(8, 0), &other).is_err());
    }

    #[test]
    fn bpp_arithmetic() {
        assert_eq!(bpp_for_bytes(1000, 4 * 50 * 40), 1.0);
        assert_eq!(bpp_for_bytes(2000, 4 * 50 * 40), 2.0);
    }

    #[test]
    fn table_one_ratios() {
        let (c, o) = grouping_ratios(1026, 1252, 4390);
        assert_eq!((round2(c), round2(o)), (0.82, 0.23));
        assert!(c >= o);
        assert_eq!(round2(grouping_ratios(418, 853, 853).0), 0.49);
        assert_eq!(grouping_ratios(0, 10, 20), (0.0, 0.0));
    }
}
