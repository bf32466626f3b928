//! Adaptive binary arithmetic coding.
//!
//! The coder is a carry-propagating range coder over 32-bit ranges with
//! 12-bit adaptive bit probabilities (shift-5 update). Integers are
//! binarised as a zero flag, a sign flag, a truncated-unary magnitude prefix
//! of up to [`UNARY_BINS`] context-coded bins, and an order-0 exp-Golomb
//! suffix coded with equiprobable bits.
//!
//! Stream layout produced by [`entropy_encode`]: LEB128 symbol count, then
//! the arithmetic-coded payload (absent for an empty sequence). The payload
//! always starts with a zero byte and is flushed with four more bytes so the
//! decoder never reads past the end.

use alloc::vec;
use alloc::vec::Vec;

use crate::error::{Error, Result};

const PROB_BITS: u32 = 12;
const PROB_ONE: u16 = 1 << PROB_BITS;
const PROB_INIT: u16 = PROB_ONE / 2;
const ADAPT_SHIFT: u32 = 5;
const TOP: u32 = 1 << 24;

/// Context-coded bins of the unary magnitude prefix.
pub const UNARY_BINS: u64 = 14;
/// Largest magnitude accepted by the binariser.
pub const MAX_MAGNITUDE: u64 = 1 << 40;

/// Adaptive probability that the next bit is 0, in units of 2^-12.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct BitModel(u16);

impl Default for BitModel {
    fn default() -> Self {
        BitModel(PROB_INIT)
    }
}

impl BitModel {
    #[inline]
    fn update(&mut self, bit: bool) {
        if bit {
            self.0 -= self.0 >> ADAPT_SHIFT;
        } else {
            self.0 += (PROB_ONE - self.0) >> ADAPT_SHIFT;
        }
    }
}

#[derive(Debug, Clone)]
pub struct BinaryEncoder {
    low: u64,
    range: u32,
    cache: u8,
    cache_size: u64,
    out: Vec<u8>,
}

impl Default for BinaryEncoder {
    fn default() -> Self {
        Self::new()
    }
}

impl BinaryEncoder {
    pub fn new() -> Self {
        BinaryEncoder { low: 0, range: u32::MAX, cache: 0, cache_size: 1, out: Vec::new() }
    }

    pub fn encode(&mut self, model: &mut BitModel, bit: bool) {
        let bound = (self.range >> PROB_BITS) * u32::from(model.0);
        if bit {
            self.low += u64::from(bound);
            self.range -= bound;
        } else {
            self.range = bound;
        }
        model.update(bit);
        self.normalize();
    }

    /// Equiprobable bit, no model.
    pub fn encode_bypass(&mut self, bit: bool) {
        self.range >>= 1;
        if bit {
            self.low += u64::from(self.range);
        }
        self.normalize();
    }

    fn normalize(&mut self) {
        while self.range < TOP {
            self.range <<= 8;
            self.shift_low();
        }
    }

    fn shift_low(&mut self) {
        if (self.low as u32) < 0xFF00_0000 || (self.low >> 32) != 0 {
            let carry = (self.low >> 32) as u8;
            let mut temp = self.cache;
            loop {
                self.out.push(temp.wrapping_add(carry));
                temp = 0xFF;
                self.cache_size -= 1;
                if self.cache_size == 0 {
                    break;
                }
            }
            self.cache = ((self.low >> 24) & 0xFF) as u8;
        }
        self.cache_size += 1;
        self.low = (self.low & 0x00FF_FFFF) << 8;
    }

    pub fn finish(mut self) -> Vec<u8> {
        for _ in 0..5 {
            self.shift_low();
        }
        self.out
    }
}

#[derive(Debug, Clone)]
pub struct BinaryDecoder<'a> {
    data: &'a [u8],
    pos: usize,
    range: u32,
    code: u32,
}

impl<'a> BinaryDecoder<'a> {
    pub fn new(data: &'a [u8]) -> Result<Self> {
        if data.len() < 5 || data[0] != 0 {
            return Err(Error::DecodeDesync { bit_offset: 0 });
        }
        let code = u32::from_be_bytes([data[1], data[2], data[3], data[4]]);
        let dec = BinaryDecoder { data, pos: 5, range: u32::MAX, code };
        Ok(dec)
    }

    pub fn bit_offset(&self) -> u64 {
        self.pos as u64 * 8
    }

    fn desync(&self) -> Error {
        Error::DecodeDesync { bit_offset: self.bit_offset() }
    }

    pub fn decode(&mut self, model: &mut BitModel) -> Result<bool> {
        let bound = (self.range >> PROB_BITS) * u32::from(model.0);
        let bit = if self.code < bound {
            self.range = bound;
            false
        } else {
            self.code -= bound;
            self.range -= bound;
            true
        };
        model.update(bit);
        self.normalize()?;
        Ok(bit)
    }

    pub fn decode_bypass(&mut self) -> Result<bool> {
        self.range >>= 1;
        let bit = self.code >= self.range;
        if bit {
            self.code -= self.range;
        }
        self.normalize()?;
        Ok(bit)
    }

    fn normalize(&mut self) -> Result<()> {
        while self.range < TOP {
            let byte = *self.data.get(self.pos).ok_or_else(|| self.desync())?;
            self.pos += 1;
            self.range <<= 8;
            self.code = (self.code << 8) | u32::from(byte);
        }
        if self.code >= self.range {
            return Err(self.desync());
        }
        Ok(())
    }
}

/// Context models for one kind of data, split into banks selected by the
/// caller (e.g. by frequency band or neighbourhood state). The sign model
/// is shared by all banks.
#[derive(Debug, Clone)]
pub struct ContextSet {
    zero: Vec<BitModel>,
    magnitude: Vec<[BitModel; UNARY_BINS as usize]>,
    sign: BitModel,
}

impl ContextSet {
    pub fn new(banks: usize) -> Self {
        let banks = banks.max(1);
        ContextSet {
            zero: vec![BitModel::default(); banks],
            magnitude: vec![[BitModel::default(); UNARY_BINS as usize]; banks],
            sign: BitModel::default(),
        }
    }

    pub fn banks(&self) -> usize {
        self.zero.len()
    }
}

fn check_magnitude(v: i64) -> Result<u64> {
    let m = v.unsigned_abs();
    if m > MAX_MAGNITUDE {
        Err(Error::SymbolOutOfRange(v))
    } else {
        Ok(m)
    }
}

fn encode_magnitude(enc: &mut BinaryEncoder, ctx: &mut ContextSet, bank: usize, m: u64) {
    // m >= 1
    let rest = m - 1;
    let models = &mut ctx.magnitude[bank];
    for i in 0..UNARY_BINS {
        let more = rest > i;
        enc.encode(&mut models[i as usize], more);
        if !more {
            return;
        }
    }
    let value = rest - UNARY_BINS + 1;
    let bits = 64 - value.leading_zeros();
    for _ in 1..bits {
        enc.encode_bypass(false);
    }
    for b in (0..bits).rev() {
        enc.encode_bypass((value >> b) & 1 == 1);
    }
}

fn decode_magnitude(dec: &mut BinaryDecoder<'_>, ctx: &mut ContextSet, bank: usize) -> Result<u64> {
    let models = &mut ctx.magnitude[bank];
    for i in 0..UNARY_BINS {
        if !dec.decode(&mut models[i as usize])? {
            return Ok(i + 1);
        }
    }
    let mut zeros = 0;
    while !dec.decode_bypass()? {
        zeros += 1;
        if zeros > 48 {
            return Err(dec.desync());
        }
    }
    let mut value = 1u64;
    for _ in 0..zeros {
        value = (value << 1) | u64::from(dec.decode_bypass()?);
    }
    let m = value - 1 + UNARY_BINS + 1;
    if m > MAX_MAGNITUDE {
        return Err(dec.desync());
    }
    Ok(m)
}

pub fn encode_signed(enc: &mut BinaryEncoder, ctx: &mut ContextSet, bank: usize, v: i64) -> Result<()> {
    let m = check_magnitude(v)?;
    enc.encode(&mut ctx.zero[bank], m != 0);
    if m != 0 {
        enc.encode(&mut ctx.sign, v < 0);
        encode_magnitude(enc, ctx, bank, m);
    }
    Ok(())
}

pub fn decode_signed(dec: &mut BinaryDecoder<'_>, ctx: &mut ContextSet, bank: usize) -> Result<i64> {
    if !dec.decode(&mut ctx.zero[bank])? {
        return Ok(0);
    }
    let negative = dec.decode(&mut ctx.sign)?;
    let m = decode_magnitude(dec, ctx, bank)? as i64;
    Ok(if negative { -m } else { m })
}

pub fn encode_unsigned(enc: &mut BinaryEncoder, ctx: &mut ContextSet, bank: usize, v: u64) -> Result<()> {
    if v > MAX_MAGNITUDE {
        return Err(Error::SymbolOutOfRange(v as i64));
    }
    enc.encode(&mut ctx.zero[bank], v != 0);
    if v != 0 {
        encode_magnitude(enc, ctx, bank, v);
    }
    Ok(())
}

pub fn decode_unsigned(dec: &mut BinaryDecoder<'_>, ctx: &mut ContextSet, bank: usize) -> Result<u64> {
    if !dec.decode(&mut ctx.zero[bank])? {
        return Ok(0);
    }
    decode_magnitude(dec, ctx, bank)
}

/// Which statistics a symbol sequence is coded with.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ContextModel {
    Labels,
    Disparities,
    StructureFlags,
    GftLevels,
    DctLevels,
    Residuals,
}

impl ContextModel {
    fn banks(self) -> usize {
        match self {
            ContextModel::GftLevels | ContextModel::DctLevels => 8,
            ContextModel::Labels => 3,
            _ => 1,
        }
    }
}

pub fn write_varint(out: &mut Vec<u8>, mut v: u64) {
    loop {
        let byte = (v & 0x7F) as u8;
        v >>= 7;
        if v == 0 {
            out.push(byte);
            return;
        }
        out.push(byte | 0x80);
    }
}

/// Reads a LEB128 value, advancing `pos`.
pub fn read_varint(data: &[u8], pos: &mut usize) -> Option<u64> {
    let mut v = 0u64;
    for shift in (0..64).step_by(7) {
        let byte = *data.get(*pos)?;
        *pos += 1;
        v |= u64::from(byte & 0x7F) << shift;
        if byte & 0x80 == 0 {
            return Some(v);
        }
    }
    None
}

/// Codes a sequence of signed integers with one adaptive context set.
pub fn entropy_encode(symbols: &[i64], model: ContextModel) -> Result<Vec<u8>> {
    let mut out = Vec::new();
    write_varint(&mut out, symbols.len() as u64);
    if symbols.is_empty() {
        return Ok(out);
    }
    let mut enc = BinaryEncoder::new();
    let mut ctx = ContextSet::new(model.banks());
    for &s in symbols {
        encode_signed(&mut enc, &mut ctx, 0, s)?;
    }
    out.extend(enc.finish());
    Ok(out)
}

pub fn entropy_decode(bytes: &[u8], model: ContextModel) -> Result<Vec<i64>> {
    let mut pos = 0;
    let count = read_varint(bytes, &mut pos).ok_or(Error::DecodeDesync { bit_offset: 0 })?;
    if count == 0 {
        return Ok(Vec::new());
    }
    let mut dec = BinaryDecoder::new(&bytes[pos..]).map_err(|_| Error::DecodeDesync { bit_offset: pos as u64 * 8 })?;
    let mut ctx = ContextSet::new(model.banks());
    let mut out = Vec::with_capacity(count.min(1 << 24) as usize);
    for _ in 0..count {
        out.push(decode_signed(&mut dec, &mut ctx, 0)?);
    }
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    #[test]
    fn empty_sequence_is_header_only() {
        let bytes = entropy_encode(&[], ContextModel::Residuals).unwrap();
        assert_eq!(bytes, vec![0]);
        assert!(entropy_decode(&bytes, ContextModel::Residuals).unwrap().is_empty());
    }

    #[test]
    fn zero_run_compresses() {
        let bytes = entropy_encode(&vec![0; 10_000], ContextModel::GftLevels).unwrap();
        assert!(bytes.len() < 200, "{} bytes", bytes.len());
        assert_eq!(entropy_decode(&bytes, ContextModel::GftLevels).unwrap(), vec![0; 10_000]);
    }

    #[test]
    fn extreme_magnitudes_roundtrip() {
        let symbols = [0, 1, -1, 14, 15, -16, 1 << 20, -(1 << 40), 1 << 40, 29, -30];
        let bytes = entropy_encode(&symbols, ContextModel::Residuals).unwrap();
        assert_eq!(entropy_decode(&bytes, ContextModel::Residuals).unwrap(), symbols);
        assert_eq!(entropy_encode(&[(1 << 40) + 1], ContextModel::Residuals), Err(Error::SymbolOutOfRange((1 << 40) + 1)));
    }

    #[test]
    fn truncation_is_detected() {
        let symbols: Vec<i64> = (0..500).map(|i| (i * 37 % 101) - 50).collect();
        let bytes = entropy_encode(&symbols, ContextModel::Residuals).unwrap();
        let cut = &bytes[..bytes.len() / 2];
        assert!(matches!(entropy_decode(cut, ContextModel::Residuals), Err(Error::DecodeDesync { .. })));
    }

    #[test]
    fn varint_roundtrip() {
        for v in [0u64, 1, 127, 128, 300, u64::MAX] {
            let mut out = Vec::new();
            write_varint(&mut out, v);
            let mut pos = 0;
            assert_eq!(read_varint(&out, &mut pos), Some(v));
            assert_eq!(pos, out.len());
        }
    }

    proptest! {
        #[test]
        fn lossless_roundtrip(symbols in proptest::collection::vec(-300i64..300, 0..2000)) {
            let bytes = entropy_encode(&symbols, ContextModel::DctLevels).unwrap();
            prop_assert_eq!(entropy_decode(&bytes, ContextModel::DctLevels).unwrap(), symbols);
        }

        #[test]
        fn mixed_unsigned_and_banks(values in proptest::collection::vec((0u64..5000, 0usize..4, any::<bool>()), 1..500)) {
            let mut enc = BinaryEncoder::new();
            let mut ctx = ContextSet::new(4);
            let mut flag = BitModel::default();
            for &(v, bank, f) in &values {
                encode_unsigned(&mut enc, &mut ctx, bank, v).unwrap();
                enc.encode(&mut flag, f);
            }
            let bytes = enc.finish();
            let mut dec = BinaryDecoder::new(&bytes).unwrap();
            let mut ctx = ContextSet::new(4);
            let mut flag = BitModel::default();
            for &(v, bank, f) in &values {
                prop_assert_eq!(decode_unsigned(&mut dec, &mut ctx, bank).unwrap(), v);
                prop_assert_eq!(dec.decode(&mut flag).unwrap(), f);
            }
        }
    }
}
