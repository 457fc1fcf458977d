//! Theorem-suite presets. Every default lives in the versioned JSON files
//! under `presets/`, embedded at compile time so the binary is
//! self-contained; `theorem_suite` only parses and (for the abcd tags)
//! resolves phase-derived exponents at evaluation time.

use serde::Deserialize;

use super::ExperimentSpec;
use crate::error::{Error, Result};

#[derive(Deserialize)]
struct PresetFile {
    full: ExperimentSpec,
    smoke: ExperimentSpec,
}

const PRESETS: &[(&str, &str)] = &[
    ("thm2_1", include_str!("../../presets/thm2_1.json")),
    ("thm3_1", include_str!("../../presets/thm3_1.json")),
    ("thm3_2", include_str!("../../presets/thm3_2.json")),
    ("thm4_1", include_str!("../../presets/thm4_1.json")),
    ("thm4_2", include_str!("../../presets/thm4_2.json")),
    ("thm4_3", include_str!("../../presets/thm4_3.json")),
    ("thm4_4", include_str!("../../presets/thm4_4.json")),
    ("thm5_1", include_str!("../../presets/thm5_1.json")),
    ("thm5_2", include_str!("../../presets/thm5_2.json")),
];

pub fn available_tags() -> Vec<&'static str> {
    PRESETS.iter().map(|(t, _)| *t).collect()
}

/// Accepts `thm2_1`, `thm2.1`, `Thm2.1`, `2.1`, ...
pub fn normalize_tag(tag: &str) -> String {
    let mut t = tag.trim().to_lowercase().replace(['.', '-'], "_");
    if !t.starts_with("thm") {
        t = format!("thm{t}");
    }
    t
}

pub fn theorem_suite(tag: &str, smoke: bool) -> Result<ExperimentSpec> {
    let key = normalize_tag(tag);
    let (_, text) = PRESETS
        .iter()
        .find(|(t, _)| *t == key)
        .ok_or_else(|| Error::UnknownTheorem(tag.into()))?;
    let file: PresetFile = serde_json::from_str(text)
        .map_err(|e| Error::Config(format!("preset {key}: {e}")))?;
    let spec = if smoke { file.smoke } else { file.full };
    spec.validate()?;
    Ok(spec)
}
