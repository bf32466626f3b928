//! Std companion of `srgc-core`: view, disparity and stream files, scene and
//! configuration files, a thread-pool runtime and report formatting. The
//! `srgc` binary is built on top.

pub mod config_file;
pub mod error;
pub mod io;
pub mod pool;
pub mod report;
pub mod scene_file;

pub use error::{Error, Result};
pub use pool::ThreadPool;
