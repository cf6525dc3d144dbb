use std::io::Write;

use super::{IoError, Location};
use crate::model::Point;

pub(super) fn parse(bytes: &[u8]) -> Result<Vec<Point>, IoError> {
    let text = std::str::from_utf8(bytes).map_err(|e| IoError::parse(Location::Byte(e.valid_up_to()), "not UTF-8 text"))?;
    let mut points = Vec::new();
    for (i, line) in text.lines().enumerate() {
        let line_no = i + 1;
        let line = line.trim();
        if line.is_empty() || line.starts_with('#') {
            continue;
        }
        let mut values = [0.0f64; 4];
        let mut fields = line.split_whitespace();
        for (k, slot) in values.iter_mut().enumerate() {
            let field = fields
                .next()
                .ok_or_else(|| IoError::parse(Location::Line(line_no), format!("expected 4 fields, found {k}")))?;
            *slot = field
                .parse()
                .map_err(|_| IoError::parse(Location::Line(line_no), format!("`{field}` is not a number")))?;
        }
        if fields.next().is_some() {
            return Err(IoError::parse(Location::Line(line_no), "more than 4 fields"));
        }
        if values.iter().any(|v| !v.is_finite()) {
            return Err(IoError::NonFinite { record: points.len() });
        }
        points.push(Point::new(values[0], values[1], values[2], values[3]));
    }
    Ok(points)
}

pub(super) fn write(points: impl Iterator<Item = Point>, out: &mut impl Write) -> std::io::Result<()> {
    for p in points {
        writeln!(out, "{:.6} {:.6} {:.6} {}", p.x, p.y, p.z, p.intensity)?;
    }
    Ok(())
}
