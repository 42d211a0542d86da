//! File-backed traces.
//!
//! Two formats:
//!
//! * `keys` — UTF-8 text, one token per line; empty lines and lines starting
//!   with `#` are skipped. Tokens are mapped to keys through a
//!   collision-checked interning table (FNV-1a 64); a detected collision is
//!   a hard error, never silent aliasing.
//! * `blocks` — CSV lines `start_byte_offset,length_bytes`, each expanded to
//!   `ceil(length / page_size)` consecutive page keys starting at
//!   `floor(start / page_size)`.

use std::collections::HashMap;
use std::fmt;
use std::fs::File;
use std::io::{BufRead, BufReader};
use std::path::Path;

use thiserror::Error;

use super::WorkloadSource;
use crate::Key;

pub const DEFAULT_PAGE_SIZE: u32 = 4096;

#[derive(Clone, Copy, PartialEq, Eq, Debug)]
pub enum TraceFormat {
    Keys,
    Blocks,
}

impl fmt::Display for TraceFormat {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            TraceFormat::Keys => "keys",
            TraceFormat::Blocks => "blocks",
        })
    }
}

impl std::str::FromStr for TraceFormat {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s {
            "keys" => Ok(TraceFormat::Keys),
            "blocks" => Ok(TraceFormat::Blocks),
            other => Err(format!("unknown trace format {other:?} (expected keys|blocks)")),
        }
    }
}

#[derive(Error, Debug)]
pub enum TraceError {
    #[error("{path}:{line}: {message}")]
    Parse {
        path: String,
        line: usize,
        message: String,
    },
    #[error("{path}:{line}: token {token:?} collides with {existing:?} under key interning")]
    KeyCollision {
        path: String,
        line: usize,
        token: String,
        existing: String,
    },
    #[error("cannot read trace {path}: {source}")]
    Io {
        path: String,
        #[source]
        source: std::io::Error,
    },
}

fn fnv1a_64(bytes: &[u8]) -> u64 {
    let mut hash = 0xcbf2_9ce4_8422_2325u64;
    for &byte in bytes {
        hash ^= byte as u64;
        hash = hash.wrapping_mul(0x0000_0100_0000_01b3);
    }
    hash
}

/// Maps string tokens onto 64-bit keys, refusing to alias two tokens.
#[derive(Default, Debug)]
pub struct KeyInterner {
    known: HashMap<u64, Box<str>>,
}

impl KeyInterner {
    pub fn new() -> Self {
        Self::default()
    }

    /// Returns the token's key, or the token it collides with.
    pub fn intern(&mut self, token: &str) -> Result<Key, String> {
        let hashed = fnv1a_64(token.as_bytes());
        match self.known.entry(hashed) {
            std::collections::hash_map::Entry::Occupied(entry) => {
                if entry.get().as_ref() == token {
                    Ok(Key(hashed))
                } else {
                    Err(entry.get().to_string())
                }
            }
            std::collections::hash_map::Entry::Vacant(entry) => {
                entry.insert(token.into());
                Ok(Key(hashed))
            }
        }
    }
}

/// Loads a whole trace into memory as a key sequence.
pub fn load_trace(
    path: &Path,
    format: TraceFormat,
    page_size: u32,
) -> Result<Vec<Key>, TraceError> {
    assert!(page_size > 0, "page size must be positive");
    let display = path.display().to_string();
    let file = File::open(path).map_err(|source| TraceError::Io {
        path: display.clone(),
        source,
    })?;
    let reader = BufReader::new(file);

    let mut keys = Vec::new();
    let mut interner = KeyInterner::new();
    for (index, line) in reader.lines().enumerate() {
        let line_no = index + 1;
        let line = line.map_err(|source| TraceError::Io {
            path: display.clone(),
            source,
        })?;
        let trimmed = line.trim();
        if trimmed.is_empty() || trimmed.starts_with('#') {
            continue;
        }
        match format {
            TraceFormat::Keys => {
                if trimmed.split_whitespace().nth(1).is_some() {
                    return Err(TraceError::Parse {
                        path: display,
                        line: line_no,
                        message: format!("expected one token per line, got {trimmed:?}"),
                    });
                }
                let key = interner.intern(trimmed).map_err(|existing| {
                    TraceError::KeyCollision {
                        path: display.clone(),
                        line: line_no,
                        token: trimmed.to_string(),
                        existing,
                    }
                })?;
                keys.push(key);
            }
            TraceFormat::Blocks => {
                let mut fields = trimmed.split(',');
                let (start, length) = match (fields.next(), fields.next(), fields.next()) {
                    (Some(start), Some(length), None) => (start.trim(), length.trim()),
                    _ => {
                        return Err(TraceError::Parse {
                            path: display,
                            line: line_no,
                            message: format!(
                                "expected start_byte_offset,length_bytes, got {trimmed:?}"
                            ),
                        })
                    }
                };
                let parse = |field: &str, name: &str| {
                    field.parse::<u64>().map_err(|e| TraceError::Parse {
                        path: display.clone(),
                        line: line_no,
                        message: format!("bad {name} {field:?}: {e}"),
                    })
                };
                let start = parse(start, "start offset")?;
                let length = parse(length, "length")?;
                let page = page_size as u64;
                let first = start / page;
                let pages = length.div_ceil(page);
                keys.extend((first..first + pages).map(Key));
            }
        }
    }
    Ok(keys)
}

/// Replays a loaded trace as a workload source.
#[derive(Clone, Debug)]
pub struct TraceReplay {
    keys: Vec<Key>,
    cursor: usize,
}

impl TraceReplay {
    pub fn new(keys: Vec<Key>) -> Self {
        TraceReplay { keys, cursor: 0 }
    }

    pub fn remaining(&self) -> usize {
        self.keys.len() - self.cursor
    }
}

impl WorkloadSource for TraceReplay {
    fn next_key(&mut self) -> Option<Key> {
        let key = self.keys.get(self.cursor).copied();
        self.cursor += key.is_some() as usize;
        key
    }
}
