use std::io::{Read, Write};
use std::path::Path;

use super::{create, io_err, open, IoError, Location};
use crate::model::ClassLabel;

/// Parses `0`/`1` tokens, one per line. Blank lines are ignored.
pub fn parse_labels(text: &str) -> Result<Vec<ClassLabel>, IoError> {
    let mut labels = Vec::new();
    for (i, line) in text.lines().enumerate() {
        match line.trim() {
            "" => {}
            "0" => labels.push(ClassLabel::Wood),
            "1" => labels.push(ClassLabel::Leaf),
            other => {
                return Err(IoError::parse(
                    Location::Line(i + 1),
                    format!("label `{other}` is neither 0 (wood) nor 1 (leaf)"),
                ))
            }
        }
    }
    Ok(labels)
}

pub fn read_labels(path: &Path) -> Result<Vec<ClassLabel>, IoError> {
    let mut text = String::new();
    open(path)?.read_to_string(&mut text).map_err(io_err(path))?;
    parse_labels(&text)
}

pub fn write_labels(labels: &[ClassLabel], path: &Path) -> Result<(), IoError> {
    let mut buf = Vec::with_capacity(labels.len() * 2);
    for (index, label) in labels.iter().enumerate() {
        match label {
            ClassLabel::Wood => buf.extend_from_slice(b"0\n"),
            ClassLabel::Leaf => buf.extend_from_slice(b"1\n"),
            ClassLabel::Unassigned => return Err(IoError::Unassigned { index }),
        }
    }
    let mut out = create(path)?;
    out.write_all(&buf).and_then(|_| out.flush()).map_err(io_err(path))
}
