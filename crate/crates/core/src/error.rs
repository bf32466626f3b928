use alloc::string::String;

pub type Result<T> = core::result::Result<T, Error>;

#[derive(Debug, Clone, PartialEq, thiserror::Error)]
#[non_exhaustive]
pub enum Error {
    #[error("empty light field")]
    EmptyLightField,
    #[error("inconsistent views: {0}")]
    InconsistentViews(String),
    #[error("unsupported bit depth {0} (expected 8, 10 or 16)")]
    UnsupportedBitDepth(u32),
    #[error("sample value {value} exceeds {bit_depth}-bit range")]
    SampleOutOfRange { value: u32, bit_depth: u32 },
    #[error("patch {index} out of bounds")]
    PatchOutOfBounds { index: usize },
    #[error("too many superpixels: requested {requested}, view has {pixels} pixels")]
    TooManySuperpixels { requested: usize, pixels: usize },
    #[error("invalid parameter: {0}")]
    InvalidParameter(String),
    #[error("empty region")]
    EmptyRegion,
    #[error("orphan label {0}: present in a view but absent from the reference view")]
    OrphanLabel(u32),
    #[error("dimension mismatch: expected {expected}, got {actual}")]
    DimensionMismatch { expected: usize, actual: usize },
    #[error("decomposition failure on {size}x{size} matrix")]
    DecompositionFailure { size: usize },
    #[error("symbol {0} outside the coder alphabet")]
    SymbolOutOfRange(i64),
    #[error("decode desync at bit offset {bit_offset}")]
    DecodeDesync { bit_offset: u64 },
    #[error("unsupported stream: {0}")]
    UnsupportedStream(String),
    #[error("corrupt stream: {section} section: {detail}")]
    CorruptStream { section: &'static str, detail: String },
}

impl Error {
    pub(crate) fn invalid(msg: impl Into<String>) -> Self {
        Error::InvalidParameter(msg.into())
    }

    pub(crate) fn corrupt(section: &'static str, detail: impl Into<String>) -> Self {
        Error::CorruptStream { section, detail: detail.into() }
    }
}
