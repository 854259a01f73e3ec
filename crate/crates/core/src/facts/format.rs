//! The JSON fact-file format.
//!
//! ```json
//! {
//!   "version": "2.1",
//!   "metadata": { "num_methods": 120, "lines_of_code": 4000 },
//!   "classes": [ { "id": "org.a.Foo", "modules": { "package": "org.a", "plugin": "core" } } ],
//!   "invocations": [ { "from": "org.a.Foo", "to": "org.a.Bar", "count": 3 } ]
//! }
//! ```
//!
//! Unknown fields are rejected unless [`LoadOptions::lenient`] is set.

use std::collections::{BTreeMap, HashSet};
use std::io::Read;
use std::path::Path;

use serde::{Deserialize, Serialize};

use super::{SnapshotMetadata, SnapshotParts, SystemSnapshot};
use crate::error::{Error, Result};

#[derive(Debug, Clone, Copy, Default)]
pub struct LoadOptions {
    /// Ignore unknown fields instead of rejecting them.
    pub lenient: bool,
}

#[derive(Serialize, Deserialize)]
struct RawFacts {
    version: String,
    #[serde(default, skip_serializing_if = "RawMetadata::is_empty")]
    metadata: RawMetadata,
    classes: Vec<RawClass>,
    invocations: Vec<RawInvocation>,
}

#[derive(Default, Serialize, Deserialize)]
struct RawMetadata {
    #[serde(default, skip_serializing_if = "Option::is_none")]
    num_methods: Option<u64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    lines_of_code: Option<u64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    generator: Option<String>,
}

impl RawMetadata {
    fn is_empty(&self) -> bool {
        self.num_methods.is_none() && self.lines_of_code.is_none() && self.generator.is_none()
    }
}

#[derive(Serialize, Deserialize)]
struct RawClass {
    id: String,
    modules: BTreeMap<String, String>,
}

#[derive(Serialize, Deserialize)]
struct RawInvocation {
    from: String,
    to: String,
    count: u64,
}

fn parse_error(err: serde_json::Error) -> Error {
    Error::Parse {
        line: err.line(),
        column: err.column(),
        message: err.to_string(),
    }
}

/// Parses and validates one fact file.
pub fn load_snapshot_str(text: &str, options: LoadOptions) -> Result<SystemSnapshot> {
    let mut ignored = Vec::new();
    let mut de = serde_json::Deserializer::from_str(text);
    let raw: RawFacts = serde_ignored::deserialize(&mut de, |path| ignored.push(path.to_string()))
        .map_err(parse_error)?;
    de.end().map_err(parse_error)?;
    if !options.lenient {
        if let Some(path) = ignored.into_iter().next() {
            return Err(Error::UnknownField { path });
        }
    }
    from_raw(raw)
}

/// Reads a fact file from a byte stream. The stream must be UTF-8.
pub fn load_snapshot<R: Read>(mut source: R, options: LoadOptions) -> Result<SystemSnapshot> {
    let mut bytes = Vec::new();
    source.read_to_end(&mut bytes).map_err(|e| Error::Io {
        path: "<input>".into(),
        source: e,
    })?;
    let text = std::str::from_utf8(&bytes).map_err(|e| {
        let prefix = &bytes[..e.valid_up_to()];
        let line = prefix.iter().filter(|&&b| b == b'\n').count() + 1;
        let column = prefix.iter().rev().take_while(|&&b| b != b'\n').count() + 1;
        Error::Parse {
            line,
            column,
            message: "input is not valid UTF-8".into(),
        }
    })?;
    load_snapshot_str(text, options)
}

pub fn load_snapshot_path(path: &Path, options: LoadOptions) -> Result<SystemSnapshot> {
    let file = std::fs::File::open(path).map_err(|e| Error::Io {
        path: path.to_owned(),
        source: e,
    })?;
    load_snapshot(std::io::BufReader::new(file), options)
}

fn from_raw(raw: RawFacts) -> Result<SystemSnapshot> {
    let mut parts = SnapshotParts::new(SnapshotMetadata {
        version_label: raw.version,
        num_methods: raw.metadata.num_methods,
        lines_of_code: raw.metadata.lines_of_code,
        generator: raw.metadata.generator,
    });

    for (pos, class) in raw.classes.into_iter().enumerate() {
        if class.id.is_empty() {
            return Err(Error::Validation(format!("classes[{pos}]: empty class id")));
        }
        if parts.classes.contains_key(&class.id) {
            return Err(Error::Validation(format!(
                "classes[{pos}]: duplicate class id `{}`",
                class.id
            )));
        }
        parts.classes.insert(class.id, class.modules);
    }

    let declared: HashSet<&str> = parts.classes.keys().map(String::as_str).collect();
    let mut invocations = Vec::with_capacity(raw.invocations.len());
    for (pos, inv) in raw.invocations.into_iter().enumerate() {
        for (field, id) in [("from", &inv.from), ("to", &inv.to)] {
            if !declared.contains(id.as_str()) {
                return Err(Error::ReferentialIntegrity {
                    id: id.clone(),
                    context: format!("invocations[{pos}].{field}"),
                });
            }
        }
        if inv.count == 0 {
            return Err(Error::Validation(format!(
                "invocations[{pos}].count: count must be at least 1"
            )));
        }
        invocations.push(inv);
    }
    for inv in invocations {
        parts.add_invocation(inv.from, inv.to, inv.count);
    }
    parts.build()
}

/// Canonical serialization: classes and invocations sorted, metadata
/// omitted when absent. Reloading the output yields an equal snapshot.
pub fn write_snapshot(snapshot: &SystemSnapshot) -> String {
    let meta = snapshot.metadata();
    let raw = RawFacts {
        version: meta.version_label.clone(),
        metadata: RawMetadata {
            num_methods: meta.num_methods,
            lines_of_code: meta.lines_of_code,
            generator: meta.generator.clone(),
        },
        classes: snapshot
            .classes()
            .iter()
            .enumerate()
            .map(|(idx, id)| RawClass {
                id: id.as_str().to_owned(),
                modules: snapshot
                    .schemes()
                    .iter()
                    .map(|s| {
                        (
                            s.name().to_owned(),
                            s.module_name(s.module_of(idx)).to_owned(),
                        )
                    })
                    .collect(),
            })
            .collect(),
        invocations: snapshot
            .invocations()
            .iter()
            .map(|e| RawInvocation {
                from: snapshot.class(e.from).as_str().to_owned(),
                to: snapshot.class(e.to).as_str().to_owned(),
                count: e.count,
            })
            .collect(),
    };
    let mut out = serde_json::to_string_pretty(&raw).expect("fact model is always serializable");
    out.push('\n');
    out
}
