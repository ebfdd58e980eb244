//! Line-oriented trace files: UTF-8, LF line endings, ASCII decimal fields.
//!
//! Each record is `time,content_id` or `time,content_id,size_bytes`; a file
//! uses one of the two shapes throughout. Lines starting with `#` and blank
//! lines are ignored on load. Saving writes records only, so save∘load is
//! the identity on streams and load∘save is the identity on files.

use std::fs;
use std::io::Write;
use std::path::Path;

use crate::kernel::{ChunkId, Request};
use crate::workload::RequestStream;

#[derive(Debug, thiserror::Error)]
pub enum TraceError {
    #[error("line {line}: {reason}")]
    Malformed { line: usize, reason: String },
    #[error("line {line}: time went backwards")]
    NonMonotoneTime { line: usize },
    #[error(transparent)]
    Io(#[from] std::io::Error),
}

fn malformed(line: usize, reason: impl Into<String>) -> TraceError {
    TraceError::Malformed { line, reason: reason.into() }
}

/// Parses trace text. Entry point for untrusted input.
pub fn parse_trace(text: &str) -> Result<RequestStream, TraceError> {
    let mut requests = Vec::new();
    let mut sizes: Vec<u64> = Vec::new();
    let mut with_sizes: Option<bool> = None;
    let mut last_time: Option<u64> = None;

    for (idx, raw) in text.lines().enumerate() {
        let line_no = idx + 1;
        let line = raw.trim();
        if line.is_empty() || line.starts_with('#') {
            continue;
        }
        let mut fields = line.split(',');
        let time = fields
            .next()
            .ok_or_else(|| malformed(line_no, "missing time field"))?
            .trim()
            .parse::<u64>()
            .map_err(|e| malformed(line_no, format!("bad time: {e}")))?;
        let id = fields
            .next()
            .ok_or_else(|| malformed(line_no, "missing content id"))?
            .trim()
            .parse::<u64>()
            .map_err(|e| malformed(line_no, format!("bad content id: {e}")))?;
        let size = match fields.next() {
            Some(f) => Some(
                f.trim()
                    .parse::<u64>()
                    .map_err(|e| malformed(line_no, format!("bad size: {e}")))?,
            ),
            None => None,
        };
        if fields.next().is_some() {
            return Err(malformed(line_no, "too many fields"));
        }
        match (with_sizes, size.is_some()) {
            (None, has) => with_sizes = Some(has),
            (Some(expected), has) if expected != has => {
                return Err(malformed(line_no, "mixed records with and without sizes"));
            }
            _ => {}
        }
        if let Some(prev) = last_time {
            if time < prev {
                return Err(TraceError::NonMonotoneTime { line: line_no });
            }
        }
        last_time = Some(time);
        requests.push(Request { chunk: ChunkId(id), virtual_time: time });
        if let Some(s) = size {
            sizes.push(s);
        }
    }
    let sizes = if with_sizes == Some(true) { Some(sizes) } else { None };
    Ok(RequestStream::with_sizes(requests, sizes))
}

/// Canonical text form of a stream.
pub fn format_trace(stream: &RequestStream) -> String {
    let mut out = String::new();
    match stream.sizes() {
        Some(sizes) => {
            for (req, size) in stream.requests().iter().zip(sizes) {
                out.push_str(&format!("{},{},{}\n", req.virtual_time, req.chunk.0, size));
            }
        }
        None => {
            for req in stream.requests() {
                out.push_str(&format!("{},{}\n", req.virtual_time, req.chunk.0));
            }
        }
    }
    out
}

pub fn load_trace(path: impl AsRef<Path>) -> Result<RequestStream, TraceError> {
    let text = fs::read_to_string(path)?;
    parse_trace(&text)
}

pub fn save_trace(stream: &RequestStream, path: impl AsRef<Path>) -> Result<(), TraceError> {
    let mut file = fs::File::create(path)?;
    file.write_all(format_trace(stream).as_bytes())?;
    Ok(())
}
