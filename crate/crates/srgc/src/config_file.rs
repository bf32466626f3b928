//! `key = value` codec configuration files. Keys are the [`CodecConfig`]
//! field names; blank lines and `#` comments are ignored.
//!
//! ```text
//! q_gft = 8
//! residual_mode = dct    # raw | dct
//! channels = luma        # luma | all
//! grouping = false
//! ```

use std::path::Path;

use srgc_core::codec::{ChannelMode, CodecConfig, ResidualMode};

use crate::error::{Error, Result};

pub const KEYS: [&str; 12] = [
    "q_gft",
    "q_dct",
    "n_target",
    "max_vertices",
    "q_switch",
    "slic_k",
    "compactness",
    "bin_width",
    "explicit_groups",
    "grouping",
    "residual_mode",
    "channels",
];

pub fn load_config(path: &Path, cfg: &mut CodecConfig) -> Result<()> {
    let text = std::fs::read_to_string(path).map_err(|e| Error::Io { path: path.to_path_buf(), source: e })?;
    apply_config(&text, path, cfg)
}

/// Applies every assignment in `text` on top of `cfg`.
pub fn apply_config(text: &str, path: &Path, cfg: &mut CodecConfig) -> Result<()> {
    for (i, raw) in text.lines().enumerate() {
        let line = raw.split('#').next().unwrap_or("").trim();
        if line.is_empty() {
            continue;
        }
        let fail = |detail: String| Error::Parse { path: path.to_path_buf(), line: i + 1, detail };
        let (key, value) = line.split_once('=').ok_or_else(|| fail("expected key = value".into()))?;
        set(cfg, key.trim(), value.trim()).map_err(fail)?;
    }
    Ok(())
}

/// Sets one configuration field from its textual value.
pub fn set(cfg: &mut CodecConfig, key: &str, value: &str) -> std::result::Result<(), String> {
    fn num<T: std::str::FromStr>(key: &str, v: &str) -> std::result::Result<T, String> {
        v.parse().map_err(|_| format!("bad value {v:?} for {key}"))
    }
    fn flag(key: &str, v: &str) -> std::result::Result<bool, String> {
        match v {
            "true" | "yes" | "1" => Ok(true),
            "false" | "no" | "0" => Ok(false),
            _ => Err(format!("bad value {v:?} for {key}, expected true or false")),
        }
    }
    match key {
        "q_gft" => cfg.q_gft = num(key, value)?,
        "q_dct" => cfg.q_dct = num(key, value)?,
        "n_target" => cfg.n_target = num(key, value)?,
        "max_vertices" => cfg.max_vertices = num(key, value)?,
        "q_switch" => cfg.q_switch = num(key, value)?,
        "slic_k" => cfg.slic_k = num(key, value)?,
        "compactness" => cfg.compactness = num(key, value)?,
        "bin_width" => cfg.bin_width = num(key, value)?,
        "explicit_groups" => cfg.explicit_groups = flag(key, value)?,
        "grouping" => cfg.grouping = flag(key, value)?,
        "residual_mode" => cfg.residual_mode = parse_residual_mode(value)?,
        "channels" => cfg.channels = parse_channel_mode(value)?,
        _ => return Err(format!("unknown key {key:?}; known keys: {}", KEYS.join(", "))),
    }
    Ok(())
}

pub fn parse_residual_mode(v: &str) -> std::result::Result<ResidualMode, String> {
    match v {
        "raw" => Ok(ResidualMode::Raw),
        "dct" => Ok(ResidualMode::Dct),
        _ => Err(format!("bad residual mode {v:?}, expected raw or dct")),
    }
}

pub fn parse_channel_mode(v: &str) -> std::result::Result<ChannelMode, String> {
    match v {
        "luma" => Ok(ChannelMode::Luma),
        "all" => Ok(ChannelMode::All),
        _ => Err(format!("bad channel mode {v:?}, expected luma or all")),
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn applies_assignments_in_order() {
        let mut cfg = CodecConfig::default();
        let text = "# sweep setup\nq_gft = 8\nresidual_mode = dct\n\ngrouping=false\nq_gft = 4 # later wins\n";
        apply_config(text, Path::new("c"), &mut cfg).unwrap();
        assert_eq!(cfg.q_gft, 4.0);
        assert_eq!(cfg.residual_mode, ResidualMode::Dct);
        assert!(!cfg.grouping);
        assert_eq!(cfg.n_target, CodecConfig::default().n_target);
    }

    #[test]
    fn every_key_is_settable() {
        let mut cfg = CodecConfig::default();
        let values = ["2", "3", "64", "128", "9", "20", "5.5", "2.5", "true", "false", "dct", "all"];
        for (k, v) in KEYS.iter().zip(values) {
            set(&mut cfg, k, v).unwrap();
        }
        assert_eq!(cfg.q_switch, 9);
        assert_eq!(cfg.channels, ChannelMode::All);
        assert!(cfg.explicit_groups);
    }

    #[test]
    fn unknown_keys_and_bad_values_report_the_line() {
        let mut cfg = CodecConfig::default();
        let err = apply_config("q_gft = 2\nspeed = 11\n", Path::new("c"), &mut cfg).unwrap_err();
        assert!(matches!(err, Error::Parse { line: 2, .. }));
        assert!(apply_config("q_gft = fast\n", Path::new("c"), &mut cfg).is_err());
        assert!(apply_config("grouping\n", Path::new("c"), &mut cfg).is_err());
    }
}
