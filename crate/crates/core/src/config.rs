//! Plain-text `key = value` configuration for [`PipelineConfig`].
//!
//! ```text
//! # comments start with '#'
//! t_b = 77
//! hough.min_completeness = 0.4
//! face.min_size = none
//! ```

use std::fmt::Write as _;

use crate::cascade::DetectParams;
use crate::pipeline::PipelineConfig;
use crate::{Error, Result};

fn parse_value<T: std::str::FromStr>(key: &str, value: &str) -> Result<T> {
    value
        .parse()
        .map_err(|_| Error::Config(format!("invalid value `{value}` for `{key}`")))
}

fn parse_opt(key: &str, value: &str) -> Result<Option<u32>> {
    if value.eq_ignore_ascii_case("none") {
        Ok(None)
    } else {
        parse_value(key, value).map(Some)
    }
}

fn apply_detect(d: &mut DetectParams, field: &str, key: &str, value: &str) -> Result<bool> {
    match field {
        "scale_factor" => d.scale_factor = parse_value(key, value)?,
        "step" => d.step = parse_value(key, value)?,
        "min_neighbors" => d.min_neighbors = parse_value(key, value)?,
        "min_size" => d.min_size = parse_opt(key, value)?,
        "max_size" => d.max_size = parse_opt(key, value)?,
        _ => return Ok(false),
    }
    Ok(true)
}

/// Sets one field by its configuration key. Unknown keys are rejected.
pub fn apply(cfg: &mut PipelineConfig, key: &str, value: &str) -> Result<()> {
    let (key, value) = (key.trim(), value.trim());
    let known = match key {
        "smooth_kernel_size" => {
            cfg.smooth_kernel_size = parse_value(key, value)?;
            true
        }
        "smooth_sigma_frac" => {
            cfg.smooth_sigma_frac = parse_value(key, value)?;
            true
        }
        "face_keep_frac" => {
            cfg.face_keep_frac = parse_value(key, value)?;
            true
        }
        "t_e" => {
            cfg.t_e = parse_value(key, value)?;
            true
        }
        "t_b" => {
            cfg.t_b = parse_value(key, value)?;
            true
        }
        "se_frac" => {
            cfg.se_frac = parse_value(key, value)?;
            true
        }
        "hough.r_min_frac" => {
            cfg.hough.r_min_frac = parse_value(key, value)?;
            true
        }
        "hough.r_max_frac" => {
            cfg.hough.r_max_frac = parse_value(key, value)?;
            true
        }
        "hough.min_completeness" => {
            cfg.hough.min_completeness = parse_value(key, value)?;
            true
        }
        _ => match key.split_once('.') {
            Some(("face", field)) => apply_detect(&mut cfg.face_detect, field, key, value)?,
            Some(("eye", field)) => apply_detect(&mut cfg.eye_detect, field, key, value)?,
            _ => false,
        },
    };
    if known {
        Ok(())
    } else {
        Err(Error::Config(format!("unknown key `{key}`")))
    }
}

/// Applies every `key = value` line of `text` on top of `base` and
/// validates the result.
pub fn parse_config(text: &str, base: PipelineConfig) -> Result<PipelineConfig> {
    let mut cfg = base;
    for (i, raw) in text.lines().enumerate() {
        let line = raw.split('#').next().unwrap_or("").trim();
        if line.is_empty() {
            continue;
        }
        let (k, v) = line.split_once('=').ok_or_else(|| Error::Parse {
            what: "config",
            line: i + 1,
            reason: format!("expected `key = value`, got `{line}`"),
        })?;
        apply(&mut cfg, k, v).map_err(|e| Error::Parse {
            what: "config",
            line: i + 1,
            reason: e.to_string(),
        })?;
    }
    cfg.validate()?;
    Ok(cfg)
}

fn fmt_opt(v: Option<u32>) -> String {
    v.map_or_else(|| "none".to_string(), |v| v.to_string())
}

/// Every key with its current value, one `key = value` per line, in a
/// fixed order.
pub fn to_text(cfg: &PipelineConfig) -> String {
    let mut s = String::new();
    let _ = writeln!(s, "smooth_kernel_size = {}", cfg.smooth_kernel_size);
    let _ = writeln!(s, "smooth_sigma_frac = {}", cfg.smooth_sigma_frac);
    let _ = writeln!(s, "face_keep_frac = {}", cfg.face_keep_frac);
    let _ = writeln!(s, "t_e = {}", cfg.t_e);
    let _ = writeln!(s, "t_b = {}", cfg.t_b);
    let _ = writeln!(s, "se_frac = {}", cfg.se_frac);
    let _ = writeln!(s, "hough.r_min_frac = {}", cfg.hough.r_min_frac);
    let _ = writeln!(s, "hough.r_max_frac = {}", cfg.hough.r_max_frac);
    let _ = writeln!(s, "hough.min_completeness = {}", cfg.hough.min_completeness);
    for (name, d) in [("face", &cfg.face_detect), ("eye", &cfg.eye_detect)] {
        let _ = writeln!(s, "{name}.scale_factor = {}", d.scale_factor);
        let _ = writeln!(s, "{name}.step = {}", d.step);
        let _ = writeln!(s, "{name}.min_neighbors = {}", d.min_neighbors);
        let _ = writeln!(s, "{name}.min_size = {}", fmt_opt(d.min_size));
        let _ = writeln!(s, "{name}.max_size = {}", fmt_opt(d.max_size));
    }
    s
}
