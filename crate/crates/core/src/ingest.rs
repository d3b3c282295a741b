//! Corpus ingestion: byte decoding with a declared per-file encoding.
//!
//! The default is Latin-1, which accepts any byte sequence. Files declared
//! UTF-8 may contain invalid sequences; those byte runs are skipped and
//! counted instead of aborting the scan.

use std::fs;
use std::io;
use std::path::Path;
use std::str::FromStr;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum TextEncoding {
    /// ISO-8859-1; every byte decodes, so scans never lose data.
    #[default]
    Latin1,
    /// UTF-8 with invalid sequences skipped (and counted).
    Utf8,
}

impl FromStr for TextEncoding {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s.to_ascii_lowercase().as_str() {
            "latin1" | "latin-1" | "iso-8859-1" | "iso8859-1" => Ok(TextEncoding::Latin1),
            "utf8" | "utf-8" => Ok(TextEncoding::Utf8),
            other => Err(format!("unknown encoding {other:?} (expected latin1 or utf8)")),
        }
    }
}

impl std::fmt::Display for TextEncoding {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            TextEncoding::Latin1 => f.write_str("latin1"),
            TextEncoding::Utf8 => f.write_str("utf8"),
        }
    }
}

/// Decoding diagnostics for one scan.
#[derive(Debug, Clone, Copy, Default, PartialEq, Eq)]
pub struct DecodeStats {
    /// Maximal runs of undecodable bytes that were skipped.
    pub skipped_runs: u64,
    pub skipped_bytes: u64,
}

impl DecodeStats {
    pub fn absorb(&mut self, other: DecodeStats) {
        self.skipped_runs += other.skipped_runs;
        self.skipped_bytes += other.skipped_bytes;
    }
}

pub fn decode_bytes(bytes: &[u8], encoding: TextEncoding) -> (String, DecodeStats) {
    match encoding {
        TextEncoding::Latin1 => {
            let text = bytes.iter().map(|&b| b as char).collect();
            (text, DecodeStats::default())
        }
        TextEncoding::Utf8 => decode_utf8_skipping(bytes),
    }
}

fn decode_utf8_skipping(mut bytes: &[u8]) -> (String, DecodeStats) {
    let mut text = String::with_capacity(bytes.len());
    let mut stats = DecodeStats::default();
    let mut previous_was_skip = false;
    while !bytes.is_empty() {
        match std::str::from_utf8(bytes) {
            Ok(valid) => {
                text.push_str(valid);
                break;
            }
            Err(err) => {
                let valid_up_to = err.valid_up_to();
                // SAFETY-free: from_utf8 already validated this prefix.
                text.push_str(std::str::from_utf8(&bytes[..valid_up_to]).unwrap());
                let skip = err.error_len().unwrap_or(bytes.len() - valid_up_to).max(1);
                stats.skipped_bytes += skip as u64;
                // adjacent invalid sequences count as one skipped run
                if valid_up_to > 0 || !previous_was_skip {
                    stats.skipped_runs += 1;
                }
                previous_was_skip = true;
                bytes = &bytes[valid_up_to + skip..];
            }
        }
    }
    (text, stats)
}

pub fn read_text_file(path: &Path, encoding: TextEncoding) -> io::Result<(String, DecodeStats)> {
    let bytes = fs::read(path)?;
    Ok(decode_bytes(&bytes, encoding))
}
