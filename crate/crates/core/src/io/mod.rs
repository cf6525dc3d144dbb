//! Point cloud and label file readers and writers.
//!
//! Supported cloud formats:
//!
//! * XYZI text: one `x y z intensity` record per line, whitespace separated.
//!   Lines starting with `#` and blank lines are skipped.
//! * PLY (ascii, binary little or big endian on read; ascii or binary little
//!   endian on write). The `vertex` element must carry `x`, `y`, `z` and an
//!   `intensity` or `scalar_intensity` scalar of any numeric type.
//!
//! Label files hold one `0` (wood) or `1` (leaf) per line.
//!
//! Readers center points on the scanner position; writers restore the
//! original frame.

mod labels;
mod ply;
mod text;

use std::fmt;
use std::fs::File;
use std::io::{BufReader, BufWriter, Read, Write};
use std::path::{Path, PathBuf};
use std::str::FromStr;

use thiserror::Error;

use crate::model::{ClassLabel, CloudError, LabeledCloud, Point};

pub use labels::{parse_labels, read_labels, write_labels};

pub const WOOD_RGB: [u8; 3] = [139, 69, 19];
pub const LEAF_RGB: [u8; 3] = [34, 139, 34];

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum CloudFileFormat {
    XyziText,
    PlyAscii,
    PlyBinaryLittleEndian,
}

impl CloudFileFormat {
    pub fn is_ply(self) -> bool {
        !matches!(self, CloudFileFormat::XyziText)
    }
}

impl FromStr for CloudFileFormat {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s.to_ascii_lowercase().as_str() {
            "xyzi" | "txt" | "xyz" => Ok(CloudFileFormat::XyziText),
            "ply" | "ply-ascii" => Ok(CloudFileFormat::PlyAscii),
            "ply-binary" | "ply-le" => Ok(CloudFileFormat::PlyBinaryLittleEndian),
            other => Err(format!("unknown format `{other}` (expected xyzi, ply-ascii or ply-binary)")),
        }
    }
}

impl fmt::Display for CloudFileFormat {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            CloudFileFormat::XyziText => "xyzi",
            CloudFileFormat::PlyAscii => "ply-ascii",
            CloudFileFormat::PlyBinaryLittleEndian => "ply-binary",
        })
    }
}

/// Where in a file a parse error happened.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Location {
    Line(usize),
    Byte(usize),
}

impl fmt::Display for Location {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Location::Line(l) => write!(f, "line {l}"),
            Location::Byte(b) => write!(f, "byte {b}"),
        }
    }
}

#[derive(Debug, Error)]
pub enum IoError {
    #[error("{path}: {source}")]
    Io {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },
    #[error("{at}: {message}")]
    Parse { at: Location, message: String },
    #[error("PLY vertex element has no `{0}` property")]
    MissingProperty(String),
    #[error("record {record} has a non-finite value")]
    NonFinite { record: usize },
    #[error("point {index} is unassigned; only wood/leaf can be written")]
    Unassigned { index: usize },
    #[error("{0} cannot carry colors; use a PLY format")]
    UnsupportedFormat(CloudFileFormat),
    #[error(transparent)]
    Cloud(#[from] CloudError),
}

impl IoError {
    fn parse(at: Location, message: impl Into<String>) -> Self {
        IoError::Parse {
            at,
            message: message.into(),
        }
    }
}

fn open(path: &Path) -> Result<BufReader<File>, IoError> {
    File::open(path).map(BufReader::new).map_err(|source| IoError::Io {
        path: path.to_path_buf(),
        source,
    })
}

fn create(path: &Path) -> Result<BufWriter<File>, IoError> {
    File::create(path).map(BufWriter::new).map_err(|source| IoError::Io {
        path: path.to_path_buf(),
        source,
    })
}

fn io_err(path: &Path) -> impl FnOnce(std::io::Error) -> IoError + '_ {
    move |source| IoError::Io {
        path: path.to_path_buf(),
        source,
    }
}

/// Parses points from memory. PLY input may use any of the three encodings.
pub fn parse_points(bytes: &[u8], format: CloudFileFormat) -> Result<Vec<Point>, IoError> {
    match format {
        CloudFileFormat::XyziText => text::parse(bytes),
        _ => ply::parse(bytes),
    }
}

/// Reads a cloud and centers it on `scanner_position`. Labels start out
/// `Unassigned`.
pub fn read_cloud(path: &Path, format: CloudFileFormat, scanner_position: [f64; 3]) -> Result<LabeledCloud, IoError> {
    let mut bytes = Vec::new();
    open(path)?.read_to_end(&mut bytes).map_err(io_err(path))?;
    let points = parse_points(&bytes, format)?;
    Ok(LabeledCloud::from_world(points, scanner_position)?)
}

/// Serializes points in the cloud's original frame.
pub fn encode_cloud(cloud: &LabeledCloud, format: CloudFileFormat, out: &mut impl Write) -> std::io::Result<()> {
    let points = (0..cloud.len()).map(|i| cloud.world_point(i));
    match format {
        CloudFileFormat::XyziText => text::write(points, out),
        CloudFileFormat::PlyAscii => ply::write(points, cloud.len(), None, false, out),
        CloudFileFormat::PlyBinaryLittleEndian => ply::write(points, cloud.len(), None, true, out),
    }
}

pub fn write_cloud(cloud: &LabeledCloud, path: &Path, format: CloudFileFormat) -> Result<(), IoError> {
    let mut out = create(path)?;
    encode_cloud(cloud, format, &mut out)
        .and_then(|_| out.flush())
        .map_err(io_err(path))
}

pub fn label_color(label: ClassLabel) -> Option<[u8; 3]> {
    match label {
        ClassLabel::Wood => Some(WOOD_RGB),
        ClassLabel::Leaf => Some(LEAF_RGB),
        ClassLabel::Unassigned => None,
    }
}

/// Writes a PLY with per-point brown (wood) or green (leaf) color.
pub fn write_cloud_colored(cloud: &LabeledCloud, path: &Path, format: CloudFileFormat) -> Result<(), IoError> {
    if !format.is_ply() {
        return Err(IoError::UnsupportedFormat(format));
    }
    let colors = cloud
        .labels()
        .iter()
        .enumerate()
        .map(|(index, &l)| label_color(l).ok_or(IoError::Unassigned { index }))
        .collect::<Result<Vec<_>, _>>()?;
    let mut out = create(path)?;
    let points = (0..cloud.len()).map(|i| cloud.world_point(i));
    let binary = format == CloudFileFormat::PlyBinaryLittleEndian;
    ply::write(points, cloud.len(), Some(&colors), binary, &mut out)
        .and_then(|_| out.flush())
        .map_err(io_err(path))
}

/// Reads the RGB triples of a PLY written by [`write_cloud_colored`].
pub fn read_colors(path: &Path) -> Result<Vec<[u8; 3]>, IoError> {
    let mut bytes = Vec::new();
    open(path)?.read_to_end(&mut bytes).map_err(io_err(path))?;
    ply::parse_colors(&bytes)
}
