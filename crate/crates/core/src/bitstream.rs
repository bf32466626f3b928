//! `.srgc` container: fixed header followed by six tagged, length-prefixed
//! sections. All multi-byte fields are little-endian.
//!
//! ```text
//! offset size field
//!      0    4 magic "SRGC"
//!      4    1 version (1)
//!      5    1 flags: bit0 explicit groups, bit1 raw residuals, bit2 grouping on
//!      6    1 channel count
//!      7    1 bit depth
//!      8    2 angular rows S
//!     10    2 angular cols T
//!     12    2 width W
//!     14    2 height H
//!     16    8 q_gft   (f64)
//!     24    8 q_dct   (f64)
//!     32    8 histogram bin width (f64)
//!     40    4 coarsening target
//!     44    4 partition bound
//!     48    4 q_switch
//!     52      sections: tag u8, length u32, payload
//! ```

use alloc::format;
use alloc::vec::Vec;

use crate::error::{Error, Result};

pub const MAGIC: [u8; 4] = *b"SRGC";
pub const VERSION: u8 = 1;
pub const HEADER_LEN: usize = 52;

pub const FLAG_EXPLICIT_GROUPS: u8 = 1;
pub const FLAG_RAW_RESIDUALS: u8 = 1 << 1;
pub const FLAG_GROUPING: u8 = 1 << 2;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Section {
    Segmentation = 1,
    Disparity = 2,
    Structure = 3,
    Coefficients = 4,
    Groups = 5,
    Residuals = 6,
}

impl Section {
    pub const ALL: [Section; 6] = [
        Section::Segmentation,
        Section::Disparity,
        Section::Structure,
        Section::Coefficients,
        Section::Groups,
        Section::Residuals,
    ];

    pub fn name(self) -> &'static str {
        match self {
            Section::Segmentation => "segmentation",
            Section::Disparity => "disparity",
            Section::Structure => "structure",
            Section::Coefficients => "coefficient",
            Section::Groups => "group",
            Section::Residuals => "residual",
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct StreamHeader {
    pub flags: u8,
    pub channels: u8,
    pub bit_depth: u8,
    pub rows: u16,
    pub cols: u16,
    pub width: u16,
    pub height: u16,
    pub q_gft: f64,
    pub q_dct: f64,
    pub bin_width: f64,
    pub n_target: u32,
    pub max_vertices: u32,
    pub q_switch: u32,
}

impl StreamHeader {
    pub fn explicit_groups(&self) -> bool {
        self.flags & FLAG_EXPLICIT_GROUPS != 0
    }

    pub fn raw_residuals(&self) -> bool {
        self.flags & FLAG_RAW_RESIDUALS != 0
    }

    pub fn grouping(&self) -> bool {
        self.flags & FLAG_GROUPING != 0
    }

    pub fn samples_per_channel(&self) -> usize {
        usize::from(self.rows) * usize::from(self.cols) * usize::from(self.width) * usize::from(self.height)
    }
}

/// A parsed or freshly encoded stream. `sections` follow [`Section::ALL`].
#[derive(Debug, Clone, PartialEq)]
pub struct Bitstream {
    pub header: StreamHeader,
    pub sections: [Vec<u8>; 6],
}

impl Bitstream {
    pub fn section(&self, s: Section) -> &[u8] {
        &self.sections[s as usize - 1]
    }

    /// Serialized size in bytes.
    pub fn byte_len(&self) -> usize {
        HEADER_LEN + self.sections.iter().map(|s| 5 + s.len()).sum::<usize>()
    }

    pub fn bit_len(&self) -> u64 {
        self.byte_len() as u64 * 8
    }

    pub fn serialize(&self) -> Vec<u8> {
        let h = &self.header;
        let mut out = Vec::with_capacity(self.byte_len());
        out.extend_from_slice(&MAGIC);
        out.push(VERSION);
        out.push(h.flags);
        out.push(h.channels);
        out.push(h.bit_depth);
        for v in [h.rows, h.cols, h.width, h.height] {
            out.extend_from_slice(&v.to_le_bytes());
        }
        for v in [h.q_gft, h.q_dct, h.bin_width] {
            out.extend_from_slice(&v.to_le_bytes());
        }
        for v in [h.n_target, h.max_vertices, h.q_switch] {
            out.extend_from_slice(&v.to_le_bytes());
        }
        for (tag, payload) in Section::ALL.iter().zip(&self.sections) {
            out.push(*tag as u8);
            out.extend_from_slice(&(payload.len() as u32).to_le_bytes());
            out.extend_from_slice(payload);
        }
        out
    }

    pub fn deserialize(bytes: &[u8]) -> Result<Bitstream> {
        if bytes.len() < 5 || bytes[..4] != MAGIC {
            return Err(Error::UnsupportedStream("bad magic".into()));
        }
        if bytes[4] != VERSION {
            return Err(Error::UnsupportedStream(format!("version {}", bytes[4])));
        }
        if bytes.len() < HEADER_LEN {
            return Err(Error::corrupt("header", "truncated"));
        }
        let u16_at = |o: usize| u16::from_le_bytes([bytes[o], bytes[o + 1]]);
        let u32_at = |o: usize| u32::from_le_bytes(bytes[o..o + 4].try_into().expect("4 bytes"));
        let f64_at = |o: usize| f64::from_le_bytes(bytes[o..o + 8].try_into().expect("8 bytes"));
        let header = StreamHeader {
            flags: bytes[5],
            channels: bytes[6],
            bit_depth: bytes[7],
            rows: u16_at(8),
            cols: u16_at(10),
            width: u16_at(12),
            height: u16_at(14),
            q_gft: f64_at(16),
            q_dct: f64_at(24),
            bin_width: f64_at(32),
            n_target: u32_at(40),
            max_vertices: u32_at(44),
            q_switch: u32_at(48),
        };
        if header.flags & !(FLAG_EXPLICIT_GROUPS | FLAG_RAW_RESIDUALS | FLAG_GROUPING) != 0 {
            return Err(Error::UnsupportedStream(format!("unknown flags {:#04x}", header.flags)));
        }
        let mut pos = HEADER_LEN;
        let mut sections: [Vec<u8>; 6] = Default::default();
        for (i, tag) in Section::ALL.iter().enumerate() {
            let name = tag.name();
            if pos + 5 > bytes.len() {
                return Err(Error::corrupt(name, "missing section header"));
            }
            if bytes[pos] != *tag as u8 {
                return Err(Error::corrupt(name, format!("unexpected tag {}", bytes[pos])));
            }
            let len = u32_at(pos + 1) as usize;
            pos += 5;
            if bytes.len() - pos < len {
                return Err(Error::corrupt(name, format!("truncated: {} of {len} bytes", bytes.len() - pos)));
            }
            sections[i] = bytes[pos..pos + len].to_vec();
            pos += len;
        }
        if pos != bytes.len() {
            return Err(Error::corrupt("trailer", format!("{} unexpected bytes", bytes.len() - pos)));
        }
        Ok(Bitstream { header, sections })
    }
}
