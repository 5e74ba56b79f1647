//! Versioned JSON model archives.
//!
//! Layout (compact JSON, UTF-8):
//!
//! ```text
//! {"format_version":1,"checksum":"<sha256 hex of payload text>","payload":{"model_kind":"afs-df-cascade","model":{…}}}
//! ```
//!
//! The checksum covers the exact bytes of the `payload` value as written.
//! Floats are written in shortest round-trip form and parsed exactly, so a
//! loaded model predicts bit-identically to the saved one.

use std::fs;
use std::path::Path;

use serde::{Deserialize, Serialize};
use serde_json::value::RawValue;
use sha2::{Digest, Sha256};

use crate::cascade::CascadeModel;
use crate::error::{Error, Result};

pub const FORMAT_VERSION: u32 = 1;
pub const MODEL_KIND: &str = "afs-df-cascade";

#[derive(Serialize, Deserialize)]
struct Payload {
    model_kind: String,
    model: CascadeModel,
}

#[derive(Serialize)]
struct ArchiveOut<'a> {
    format_version: u32,
    checksum: String,
    payload: &'a RawValue,
}

#[derive(Deserialize)]
struct ArchiveIn {
    checksum: String,
    payload: Box<RawValue>,
}

#[derive(Deserialize)]
struct VersionProbe {
    format_version: u32,
}

fn sha256_hex(text: &str) -> String {
    hex::encode(Sha256::digest(text.as_bytes()))
}

fn malformed(e: serde_json::Error) -> Error {
    Error::MalformedArchive(e.to_string())
}

pub fn to_archive_string(model: &CascadeModel) -> Result<String> {
    let payload = Payload {
        model_kind: MODEL_KIND.to_owned(),
        model: model.clone(),
    };
    let payload_text = serde_json::to_string(&payload).map_err(malformed)?;
    let raw = RawValue::from_string(payload_text).map_err(malformed)?;
    let doc = ArchiveOut {
        format_version: FORMAT_VERSION,
        checksum: sha256_hex(raw.get()),
        payload: &raw,
    };
    let mut text = serde_json::to_string(&doc).map_err(malformed)?;
    text.push('\n');
    Ok(text)
}

pub fn from_archive_str(text: &str) -> Result<CascadeModel> {
    let probe: VersionProbe = serde_json::from_str(text).map_err(|e| {
        if e.is_eof() {
            Error::Integrity(format!("document truncated ({e})"))
        } else {
            malformed(e)
        }
    })?;
    if probe.format_version != FORMAT_VERSION {
        return Err(Error::VersionMismatch {
            expected: FORMAT_VERSION,
            found: probe.format_version,
        });
    }
    let doc: ArchiveIn = serde_json::from_str(text).map_err(malformed)?;
    let actual = sha256_hex(doc.payload.get());
    if actual != doc.checksum {
        return Err(Error::Integrity(format!(
            "checksum mismatch (stored {}, computed {actual})",
            doc.checksum
        )));
    }
    let payload: Payload = serde_json::from_str(doc.payload.get()).map_err(malformed)?;
    if payload.model_kind != MODEL_KIND {
        return Err(Error::MalformedArchive(format!(
            "unknown model kind '{}'",
            payload.model_kind
        )));
    }
    Ok(payload.model)
}

pub fn save_model(model: &CascadeModel, path: impl AsRef<Path>) -> Result<()> {
    let path = path.as_ref();
    let text = to_archive_string(model)?;
    fs::write(path, text).map_err(|source| Error::Io {
        path: path.to_path_buf(),
        source,
    })
}

pub fn load_model(path: impl AsRef<Path>) -> Result<CascadeModel> {
    let path = path.as_ref();
    let text = fs::read_to_string(path).map_err(|source| Error::Io {
        path: path.to_path_buf(),
        source,
    })?;
    from_archive_str(&text)
}
