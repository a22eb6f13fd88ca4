//! Shared reader/writer for the line-oriented document format used by model
//! and profile files.
//!
//! A document is either a sequence of JSON objects, one per line (the first
//! non-blank, non-comment line is the header, every following line is a
//! layer record), or a single JSON object whose header fields sit next to a
//! `layers` array. Lines starting with `#` are comments.

use serde::de::DeserializeOwned;
use serde::{Deserialize, Serialize};

use crate::error::{parse_err, Result};

pub(crate) struct Document<H, R> {
    pub header: H,
    /// Records paired with the 1-based source line they came from.
    pub records: Vec<(usize, R)>,
}

#[derive(Deserialize)]
struct Whole<H, R> {
    #[serde(flatten)]
    header: H,
    layers: Vec<R>,
}

pub(crate) fn read<H, R>(text: &str) -> Result<Document<H, R>>
where
    H: DeserializeOwned,
    R: DeserializeOwned,
{
    if let Ok(serde_json::Value::Object(map)) = serde_json::from_str::<serde_json::Value>(text) {
        if map.contains_key("layers") {
            let whole: Whole<H, R> =
                serde_json::from_str(text).map_err(|e| parse_err(e.line(), e.to_string()))?;
            // Object form has no per-record lines; report the record ordinal instead.
            let records = whole.layers.into_iter().enumerate().map(|(k, r)| (k + 1, r)).collect();
            return Ok(Document { header: whole.header, records });
        }
    }

    let mut header = None;
    let mut records = Vec::new();
    for (idx, raw) in text.lines().enumerate() {
        let line = idx + 1;
        let trimmed = raw.trim();
        if trimmed.is_empty() || trimmed.starts_with('#') {
            continue;
        }
        if header.is_none() {
            header = Some(serde_json::from_str::<H>(trimmed).map_err(|e| parse_err(line, e.to_string()))?);
        } else {
            let record = serde_json::from_str::<R>(trimmed).map_err(|e| parse_err(line, e.to_string()))?;
            records.push((line, record));
        }
    }
    let header = header.ok_or_else(|| parse_err(1, "document is empty; expected a header record"))?;
    Ok(Document { header, records })
}

pub(crate) fn write<H: Serialize, R: Serialize>(header: &H, records: &[R]) -> Result<String> {
    let mut out = serde_json::to_string(header)?;
    out.push('\n');
    for r in records {
        out.push_str(&serde_json::to_string(r)?);
        out.push('\n');
    }
    Ok(out)
}
