//! Symbol layouts of the individual sections. Each section is one
//! independent arithmetic-coded payload.

use alloc::format;
use alloc::vec;
use alloc::vec::Vec;

use super::units::Structure;
use crate::entropy::{
    decode_signed, decode_unsigned, encode_signed, encode_unsigned, BinaryDecoder, BinaryEncoder, BitModel, ContextSet,
};
use crate::error::{Error, Result};

/// Coefficient context bank: 0 for the zero frequencies, then one bank per
/// octave of the remaining frequency index, capped at 7.
pub fn coefficient_bank(k: usize, zero_frequencies: usize) -> usize {
    if k < zero_frequencies {
        0
    } else {
        (1 + (k - zero_frequencies + 1).ilog2() as usize).min(7)
    }
}

/// Residual DCT context bank: octave of the coefficient index, capped at 7.
pub fn dct_bank(k: usize) -> usize {
    ((k + 1).ilog2() as usize).min(7)
}

pub const LEVEL_BANKS: usize = 8;

/// Decoder for one section that reports failures against the section name.
pub struct SectionReader<'a> {
    dec: BinaryDecoder<'a>,
    pub section: &'static str,
}

impl<'a> SectionReader<'a> {
    pub fn new(data: &'a [u8], section: &'static str) -> Result<Self> {
        let dec = BinaryDecoder::new(data).map_err(|_| Error::corrupt(section, "missing or malformed payload"))?;
        Ok(SectionReader { dec, section })
    }

    fn wrap(&self, e: Error) -> Error {
        match e {
            Error::DecodeDesync { bit_offset } => {
                Error::corrupt(self.section, format!("decode desync at bit {bit_offset}"))
            }
            other => other,
        }
    }

    pub fn bit(&mut self, model: &mut BitModel) -> Result<bool> {
        self.dec.decode(model).map_err(|e| self.wrap(e))
    }

    pub fn signed(&mut self, ctx: &mut ContextSet, bank: usize) -> Result<i64> {
        decode_signed(&mut self.dec, ctx, bank).map_err(|e| self.wrap(e))
    }

    pub fn unsigned(&mut self, ctx: &mut ContextSet, bank: usize) -> Result<u64> {
        decode_unsigned(&mut self.dec, ctx, bank).map_err(|e| self.wrap(e))
    }

    /// Unsigned value that must be below `bound`.
    pub fn index(&mut self, ctx: &mut ContextSet, bank: usize, bound: usize, what: &str) -> Result<usize> {
        let v = self.unsigned(ctx, bank)?;
        if v >= bound as u64 {
            return Err(Error::corrupt(self.section, format!("{what} {v} out of range (< {bound})")));
        }
        Ok(v as usize)
    }

    pub fn fail(&self, detail: impl Into<alloc::string::String>) -> Error {
        Error::corrupt(self.section, detail)
    }
}

/// Reference-view label map in raster order. Each label is predicted from
/// its left and upper neighbours: a flag says "same as left" (context: whether
/// left and up agree), then, when up differs from left, a flag says "same as
/// up"; otherwise the label is coded explicitly.
pub fn encode_labels(labels: &[u32], width: usize, label_count: usize) -> Result<Vec<u8>> {
    let mut enc = BinaryEncoder::new();
    let mut counts = ContextSet::new(1);
    let mut explicit = ContextSet::new(1);
    let mut eq_left = [BitModel::default(); 2];
    let mut eq_up = BitModel::default();
    encode_unsigned(&mut enc, &mut counts, 0, label_count as u64)?;
    for (p, &label) in labels.iter().enumerate() {
        let (left, up) = neighbours(labels, p, width);
        if let Some(l) = left {
            let hit = label == l;
            enc.encode(&mut eq_left[usize::from(up != Some(l))], hit);
            if hit {
                continue;
            }
        }
        if let Some(u) = up.filter(|&u| Some(u) != left) {
            let hit = label == u;
            enc.encode(&mut eq_up, hit);
            if hit {
                continue;
            }
        }
        encode_unsigned(&mut enc, &mut explicit, 0, u64::from(label))?;
    }
    Ok(enc.finish())
}

pub fn decode_labels(data: &[u8], width: usize, height: usize) -> Result<(Vec<u32>, usize)> {
    let mut r = SectionReader::new(data, "segmentation")?;
    let mut counts = ContextSet::new(1);
    let mut explicit = ContextSet::new(1);
    let mut eq_left = [BitModel::default(); 2];
    let mut eq_up = BitModel::default();
    let n = width * height;
    let label_count = r.unsigned(&mut counts, 0)?;
    if label_count == 0 || label_count > n as u64 {
        return Err(r.fail(format!("label count {label_count} for {n} pixels")));
    }
    let label_count = label_count as usize;
    let mut labels = vec![0u32; n];
    for p in 0..n {
        let (left, up) = neighbours(&labels, p, width);
        if let Some(l) = left {
            if r.bit(&mut eq_left[usize::from(up != Some(l))])? {
                labels[p] = l;
                continue;
            }
        }
        if let Some(u) = up.filter(|&u| Some(u) != left) {
            if r.bit(&mut eq_up)? {
                labels[p] = u;
                continue;
            }
        }
        labels[p] = r.index(&mut explicit, 0, label_count, "label")? as u32;
    }
    Ok((labels, label_count))
}

fn neighbours(labels: &[u32], p: usize, width: usize) -> (Option<u32>, Option<u32>) {
    let left = (p % width != 0).then(|| labels[p - 1]);
    let up = (p >= width).then(|| labels[p - width]);
    (left, up)
}

/// Per-label disparities in 1/8 px, coded as differences to the previous
/// label's value.
pub fn encode_disparities(quantized: &[i32]) -> Result<Vec<u8>> {
    let mut enc = BinaryEncoder::new();
    let mut ctx = ContextSet::new(1);
    let mut prev = 0i64;
    for &q in quantized {
        encode_signed(&mut enc, &mut ctx, 0, i64::from(q) - prev)?;
        prev = i64::from(q);
    }
    Ok(enc.finish())
}

pub fn decode_disparities(data: &[u8], count: usize) -> Result<Vec<i32>> {
    let mut r = SectionReader::new(data, "disparity")?;
    let mut ctx = ContextSet::new(1);
    let mut prev = 0i64;
    let mut out = Vec::with_capacity(count);
    for _ in 0..count {
        prev += r.signed(&mut ctx, 0)?;
        let q = i32::try_from(prev).map_err(|_| r.fail("disparity out of range"))?;
        out.push(q);
    }
    Ok(out)
}

/// Per super-ray: a partition flag, and for partitioned super-rays the flag
/// count followed by the pre-order split flags.
pub fn encode_structure(structure: &[Structure]) -> Result<Vec<u8>> {
    let mut enc = BinaryEncoder::new();
    let mut mode = BitModel::default();
    let mut split = BitModel::default();
    let mut counts = ContextSet::new(1);
    for s in structure {
        match s {
            Structure::Coarsen => enc.encode(&mut mode, false),
            Structure::Partition(flags) => {
                enc.encode(&mut mode, true);
                encode_unsigned(&mut enc, &mut counts, 0, flags.len() as u64)?;
                for &f in flags {
                    enc.encode(&mut split, f);
                }
            }
        }
    }
    Ok(enc.finish())
}

pub fn decode_structure(data: &[u8], rays: usize, max_flags: usize) -> Result<Vec<Structure>> {
    let mut r = SectionReader::new(data, "structure")?;
    let mut mode = BitModel::default();
    let mut split = BitModel::default();
    let mut counts = ContextSet::new(1);
    let mut out = Vec::with_capacity(rays);
    for _ in 0..rays {
        if !r.bit(&mut mode)? {
            out.push(Structure::Coarsen);
            continue;
        }
        let n = r.index(&mut counts, 0, max_flags + 1, "partition flag count")?;
        let flags = (0..n).map(|_| r.bit(&mut split)).collect::<Result<Vec<bool>>>()?;
        out.push(Structure::Partition(flags));
    }
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn labels_roundtrip() {
        let labels = vec![0, 0, 1, 1, 0, 2, 2, 1, 3, 3, 2, 1];
        let bytes = encode_labels(&labels, 4, 4).unwrap();
        assert_eq!(decode_labels(&bytes, 4, 3).unwrap(), (labels, 4));
    }

    #[test]
    fn out_of_range_label_count_is_corrupt() {
        let bytes = encode_labels(&[0, 1], 2, 5).unwrap();
        assert!(matches!(decode_labels(&bytes, 2, 1), Err(Error::CorruptStream { section: "segmentation", .. })));
    }

    #[test]
    fn disparities_roundtrip() {
        let q = vec![0, 8, -3, 12, 12, -40];
        assert_eq!(decode_disparities(&encode_disparities(&q).unwrap(), q.len()).unwrap(), q);
    }

    #[test]
    fn structure_roundtrip() {
        let s = vec![
            Structure::Coarsen,
            Structure::Partition(vec![true, false, true, false, false]),
            Structure::Partition(vec![false]),
        ];
        assert_eq!(decode_structure(&encode_structure(&s).unwrap(), 3, 100).unwrap(), s);
    }

    #[test]
    fn banks() {
        assert_eq!(coefficient_bank(0, 1), 0);
        assert_eq!(coefficient_bank(1, 1), 1);
        assert_eq!(coefficient_bank(2, 1), 2);
        assert_eq!(coefficient_bank(3, 1), 2);
        assert_eq!(coefficient_bank(1 << 12, 1), 7);
        assert_eq!(dct_bank(0), 0);
        assert_eq!(dct_bank(3), 2);
    }
}
