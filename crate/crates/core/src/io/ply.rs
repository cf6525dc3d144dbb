use std::io::Write;

use super::{IoError, Location};
use crate::model::Point;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
enum Encoding {
    Ascii,
    LittleEndian,
    BigEndian,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
enum Scalar {
    I8,
    U8,
    I16,
    U16,
    I32,
    U32,
    F32,
    F64,
}

impl Scalar {
    fn parse(name: &str) -> Option<Self> {
        Some(match name {
            "char" | "int8" => Scalar::I8,
            "uchar" | "uint8" => Scalar::U8,
            "short" | "int16" => Scalar::I16,
            "ushort" | "uint16" => Scalar::U16,
            "int" | "int32" => Scalar::I32,
            "uint" | "uint32" => Scalar::U32,
            "float" | "float32" => Scalar::F32,
            "double" | "float64" => Scalar::F64,
            _ => return None,
        })
    }

    fn size(self) -> usize {
        match self {
            Scalar::I8 | Scalar::U8 => 1,
            Scalar::I16 | Scalar::U16 => 2,
            Scalar::I32 | Scalar::U32 | Scalar::F32 => 4,
            Scalar::F64 => 8,
        }
    }

    fn decode(self, raw: &[u8], encoding: Encoding) -> f64 {
        macro_rules! num {
            ($t:ty, $n:expr) => {{
                let mut b = [0u8; $n];
                b.copy_from_slice(&raw[..$n]);
                (if encoding == Encoding::BigEndian {
                    <$t>::from_be_bytes(b)
                } else {
                    <$t>::from_le_bytes(b)
                }) as f64
            }};
        }
        match self {
            Scalar::I8 => num!(i8, 1),
            Scalar::U8 => num!(u8, 1),
            Scalar::I16 => num!(i16, 2),
            Scalar::U16 => num!(u16, 2),
            Scalar::I32 => num!(i32, 4),
            Scalar::U32 => num!(u32, 4),
            Scalar::F32 => num!(f32, 4),
            Scalar::F64 => num!(f64, 8),
        }
    }
}

#[derive(Debug, Clone)]
enum Property {
    Scalar { name: String, ty: Scalar },
    List { count: Scalar, item: Scalar },
}

#[derive(Debug, Clone)]
struct Element {
    name: String,
    count: usize,
    properties: Vec<Property>,
}

#[derive(Debug)]
struct Header {
    encoding: Encoding,
    elements: Vec<Element>,
    body_offset: usize,
    body_line: usize,
}

fn parse_header(bytes: &[u8]) -> Result<Header, IoError> {
    let mut offset = 0;
    let mut line_no = 0;
    let mut encoding = None;
    let mut elements: Vec<Element> = Vec::new();
    loop {
        let rest = &bytes[offset..];
        let end = rest
            .iter()
            .position(|&b| b == b'\n')
            .ok_or_else(|| IoError::parse(Location::Byte(offset), "PLY header has no end_header line"))?;
        line_no += 1;
        let at = Location::Line(line_no);
        let line = std::str::from_utf8(&rest[..end])
            .map_err(|_| IoError::parse(at, "header is not ASCII"))?
            .trim();
        offset += end + 1;
        let mut words = line.split_whitespace();
        let keyword = words.next().unwrap_or("");
        if line_no == 1 {
            if line != "ply" {
                return Err(IoError::parse(at, "missing `ply` magic"));
            }
            continue;
        }
        match keyword {
            "" | "comment" | "obj_info" => {}
            "format" => {
                encoding = Some(match words.next() {
                    Some("ascii") => Encoding::Ascii,
                    Some("binary_little_endian") => Encoding::LittleEndian,
                    Some("binary_big_endian") => Encoding::BigEndian,
                    other => return Err(IoError::parse(at, format!("unknown PLY format {other:?}"))),
                });
            }
            "element" => {
                let (Some(name), Some(count)) = (words.next(), words.next()) else {
                    return Err(IoError::parse(at, "malformed element line"));
                };
                let count = count
                    .parse()
                    .map_err(|_| IoError::parse(at, format!("bad element count `{count}`")))?;
                elements.push(Element {
                    name: name.to_string(),
                    count,
                    properties: Vec::new(),
                });
            }
            "property" => {
                let element = elements
                    .last_mut()
                    .ok_or_else(|| IoError::parse(at, "property before any element"))?;
                let parts: Vec<&str> = words.collect();
                let scalar = |s: &str| Scalar::parse(s).ok_or_else(|| IoError::parse(at, format!("unknown type `{s}`")));
                let property = match parts.as_slice() {
                    ["list", count, item, _name] => Property::List {
                        count: scalar(count)?,
                        item: scalar(item)?,
                    },
                    [ty, name] => Property::Scalar {
                        name: name.to_string(),
                        ty: scalar(ty)?,
                    },
                    _ => return Err(IoError::parse(at, "malformed property line")),
                };
                element.properties.push(property);
            }
            "end_header" => break,
            other => return Err(IoError::parse(at, format!("unexpected header keyword `{other}`"))),
        }
    }
    let encoding = encoding.ok_or_else(|| IoError::parse(Location::Line(line_no), "PLY header has no format line"))?;
    Ok(Header {
        encoding,
        elements,
        body_offset: offset,
        body_line: line_no,
    })
}

/// Reads selected scalar columns of the `vertex` element. Each entry of
/// `wanted` lists accepted names for one column.
fn vertex_columns(bytes: &[u8], wanted: &[&[&str]]) -> Result<Vec<Vec<f64>>, IoError> {
    let header = parse_header(bytes)?;
    let vertex_pos = header
        .elements
        .iter()
        .position(|e| e.name == "vertex")
        .ok_or_else(|| IoError::MissingProperty("vertex".into()))?;
    let vertex = &header.elements[vertex_pos];
    let mut column_of = Vec::with_capacity(wanted.len());
    for aliases in wanted {
        let pos = vertex
            .properties
            .iter()
            .position(|p| matches!(p, Property::Scalar { name, .. } if aliases.contains(&name.as_str())))
            .ok_or_else(|| IoError::MissingProperty(aliases[0].to_string()))?;
        column_of.push(pos);
    }
    let mut columns = vec![Vec::with_capacity(vertex.count); wanted.len()];
    let mut record = vec![0.0; vertex.properties.len()];
    let mut body = Body::new(bytes, &header);
    for (e, element) in header.elements.iter().enumerate() {
        for _ in 0..element.count {
            if e == vertex_pos {
                for (slot, p) in record.iter_mut().zip(&element.properties) {
                    *slot = match p {
                        Property::Scalar { ty, .. } => body.scalar(*ty)?,
                        Property::List { count, item } => {
                            body.skip_list(*count, *item)?;
                            0.0
                        }
                    };
                }
                for (col, &pos) in columns.iter_mut().zip(&column_of) {
                    col.push(record[pos]);
                }
            } else {
                for p in &element.properties {
                    match p {
                        Property::Scalar { ty, .. } => {
                            body.scalar(*ty)?;
                        }
                        Property::List { count, item } => body.skip_list(*count, *item)?,
                    }
                }
            }
        }
        if e == vertex_pos {
            break;
        }
    }
    Ok(columns)
}

struct Body<'a> {
    bytes: &'a [u8],
    encoding: Encoding,
    offset: usize,
    line: usize,
    tokens: Vec<&'a str>,
    next_token: usize,
}

impl<'a> Body<'a> {
    fn new(bytes: &'a [u8], header: &Header) -> Self {
        Self {
            bytes,
            encoding: header.encoding,
            offset: header.body_offset,
            line: header.body_line,
            tokens: Vec::new(),
            next_token: 0,
        }
    }

    fn token(&mut self) -> Result<&'a str, IoError> {
        while self.next_token == self.tokens.len() {
            if self.offset >= self.bytes.len() {
                return Err(IoError::parse(Location::Line(self.line + 1), "unexpected end of PLY data"));
            }
            let rest = &self.bytes[self.offset..];
            let end = rest.iter().position(|&b| b == b'\n').unwrap_or(rest.len());
            self.offset += (end + 1).min(rest.len());
            self.line += 1;
            let text = std::str::from_utf8(&rest[..end])
                .map_err(|_| IoError::parse(Location::Line(self.line), "not ASCII"))?;
            self.tokens = text.split_whitespace().collect();
            self.next_token = 0;
        }
        self.next_token += 1;
        Ok(self.tokens[self.next_token - 1])
    }

    fn scalar(&mut self, ty: Scalar) -> Result<f64, IoError> {
        if self.encoding == Encoding::Ascii {
            let tok = self.token()?;
            return tok
                .parse()
                .map_err(|_| IoError::parse(Location::Line(self.line), format!("`{tok}` is not a number")));
        }
        let n = ty.size();
        let raw = self
            .bytes
            .get(self.offset..self.offset + n)
            .ok_or_else(|| IoError::parse(Location::Byte(self.offset), "unexpected end of PLY data"))?;
        self.offset += n;
        Ok(ty.decode(raw, self.encoding))
    }

    fn skip_list(&mut self, count: Scalar, item: Scalar) -> Result<(), IoError> {
        let n = self.scalar(count)?;
        if !(n >= 0.0) {
            return Err(IoError::parse(self.location(), "negative list length"));
        }
        for _ in 0..n as usize {
            self.scalar(item)?;
        }
        Ok(())
    }

    fn location(&self) -> Location {
        match self.encoding {
            Encoding::Ascii => Location::Line(self.line),
            _ => Location::Byte(self.offset),
        }
    }
}

pub(super) fn parse(bytes: &[u8]) -> Result<Vec<Point>, IoError> {
    let cols = vertex_columns(bytes, &[&["x"], &["y"], &["z"], &["intensity", "scalar_intensity"]])?;
    let n = cols[0].len();
    let mut points = Vec::with_capacity(n);
    for i in 0..n {
        let p = Point::new(cols[0][i], cols[1][i], cols[2][i], cols[3][i]);
        if !p.is_finite() {
            return Err(IoError::NonFinite { record: i });
        }
        points.push(p);
    }
    Ok(points)
}

pub(super) fn parse_colors(bytes: &[u8]) -> Result<Vec<[u8; 3]>, IoError> {
    let cols = vertex_columns(bytes, &[&["red"], &["green"], &["blue"]])?;
    Ok((0..cols[0].len())
        .map(|i| [cols[0][i] as u8, cols[1][i] as u8, cols[2][i] as u8])
        .collect())
}

/// Coordinates and intensity are stored as doubles so binary output is exact.
pub(super) fn write(
    points: impl Iterator<Item = Point>,
    count: usize,
    colors: Option<&[[u8; 3]]>,
    binary: bool,
    out: &mut impl Write,
) -> std::io::Result<()> {
    writeln!(out, "ply")?;
    writeln!(out, "format {} 1.0", if binary { "binary_little_endian" } else { "ascii" })?;
    writeln!(out, "element vertex {count}")?;
    for name in ["x", "y", "z", "intensity"] {
        writeln!(out, "property double {name}")?;
    }
    if colors.is_some() {
        for name in ["red", "green", "blue"] {
            writeln!(out, "property uchar {name}")?;
        }
    }
    writeln!(out, "end_header")?;
    for (i, p) in points.enumerate() {
        let rgb = colors.map(|c| c[i]);
        if binary {
            for v in [p.x, p.y, p.z, p.intensity] {
                out.write_all(&v.to_le_bytes())?;
            }
            if let Some(rgb) = rgb {
                out.write_all(&rgb)?;
            }
        } else {
            write!(out, "{} {} {} {}", p.x, p.y, p.z, p.intensity)?;
            if let Some([r, g, b]) = rgb {
                write!(out, " {r} {g} {b}")?;
            }
            writeln!(out)?;
        }
    }
    Ok(())
}
