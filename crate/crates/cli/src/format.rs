//! JSON instance files. Every coordinate and matrix entry is a rational
//! string (`"3"`, `"-7/2"`), never a JSON number.

use std::fs;
use std::path::Path;

use plopen::generators::GenSpec;
use plopen::linalg::{format_rational, parse_rational, Matrix, ParseRationalError, Vector};
use plopen::PLMap;
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::exit;

pub const FORMAT_VERSION: u32 = 1;

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct InstanceFile {
    pub format_version: u32,
    pub ambient_dim: usize,
    pub vertices: Vec<Vec<String>>,
    pub cells: Vec<Vec<usize>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub vertex_images: Option<Vec<Vec<String>>>,
    /// Alternative to `vertex_images`: one affine piece per cell.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub pieces: Option<Vec<PieceEntry>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub metadata: Option<Metadata>,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct PieceEntry {
    pub matrix: Vec<Vec<String>>,
    pub offset: Vec<String>,
}

#[derive(Debug, Clone, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Metadata {
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub gen_spec: Option<GenSpec>,
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    pub labels: Vec<String>,
}

#[derive(Debug, Error)]
pub enum FormatError {
    #[error("cannot read {path}: {source}")]
    Io {
        path: String,
        source: std::io::Error,
    },
    #[error("malformed instance at line {line}, column {column}: {message}")]
    Syntax {
        line: usize,
        column: usize,
        message: String,
    },
    #[error("malformed instance at {location}: {source}")]
    Rational {
        location: String,
        source: ParseRationalError,
    },
    #[error("unsupported format_version {0}, expected {FORMAT_VERSION}")]
    Version(u32),
    #[error("malformed instance: exactly one of vertex_images and pieces must be present")]
    MapSource,
    #[error("invalid instance: {}", .0.join("; "))]
    Invalid(Vec<String>),
}

impl FormatError {
    pub fn exit_code(&self) -> i32 {
        match self {
            FormatError::Invalid(_) => exit::INVALID,
            _ => exit::MALFORMED,
        }
    }
}

fn parse_vector(raw: &[String], location: &str) -> Result<Vector, FormatError> {
    raw.iter()
        .enumerate()
        .map(|(i, s)| {
            parse_rational(s).map_err(|source| FormatError::Rational {
                location: format!("{location}[{i}]"),
                source,
            })
        })
        .collect()
}

fn parse_rows(raw: &[Vec<String>], location: &str) -> Result<Vec<Vector>, FormatError> {
    raw.iter()
        .enumerate()
        .map(|(i, row)| parse_vector(row, &format!("{location}[{i}]")))
        .collect()
}

fn show_vector(v: &[plopen::Rational]) -> Vec<String> {
    v.iter().map(format_rational).collect()
}

impl InstanceFile {
    pub fn parse(text: &str) -> Result<Self, FormatError> {
        let file: InstanceFile = serde_json::from_str(text).map_err(|e| FormatError::Syntax {
            line: e.line(),
            column: e.column(),
            message: e.to_string(),
        })?;
        if file.format_version != FORMAT_VERSION {
            return Err(FormatError::Version(file.format_version));
        }
        if file.vertex_images.is_some() == file.pieces.is_some() {
            return Err(FormatError::MapSource);
        }
        Ok(file)
    }

    /// Reads and parses `path`, returning the raw bytes for digesting.
    pub fn read(path: &Path) -> Result<(Self, Vec<u8>), FormatError> {
        let bytes = fs::read(path).map_err(|source| FormatError::Io {
            path: path.display().to_string(),
            source,
        })?;
        let text = String::from_utf8_lossy(&bytes);
        Ok((Self::parse(&text)?, bytes))
    }

    /// Pretty JSON with a trailing newline; the canonical byte form.
    pub fn to_json(&self) -> String {
        let mut s = serde_json::to_string_pretty(self).expect("plain data serializes");
        s.push('\n');
        s
    }

    /// Vertex-image form of `f`.
    pub fn from_map(f: &PLMap, metadata: Option<Metadata>) -> Self {
        InstanceFile {
            format_version: FORMAT_VERSION,
            ambient_dim: f.dim(),
            vertices: f.domain().vertices().iter().map(|v| show_vector(v)).collect(),
            cells: f.domain().cells().iter().map(|c| c.vertices().to_vec()).collect(),
            vertex_images: Some(f.images().iter().map(|v| show_vector(v)).collect()),
            pieces: None,
            metadata,
        }
    }

    /// Validates the complex and the map, reporting every violation found.
    pub fn to_map(&self) -> Result<PLMap, FormatError> {
        let n = self.ambient_dim;
        let vertices = parse_rows(&self.vertices, "vertices")?;
        match (&self.vertex_images, &self.pieces) {
            (Some(images), None) => {
                let images = parse_rows(images, "vertex_images")?;
                let domain = plopen::SimplicialComplex::validate(n, vertices, self.cells.clone())
                    .map_err(|vs| FormatError::Invalid(vs.iter().map(|v| v.to_string()).collect()))?;
                PLMap::build(domain, images).map_err(|e| FormatError::Invalid(vec![e.to_string()]))
            }
            (None, Some(entries)) => {
                let mut pieces = Vec::with_capacity(entries.len());
                let mut problems = Vec::new();
                for (c, p) in entries.iter().enumerate() {
                    let rows = parse_rows(&p.matrix, &format!("pieces[{c}].matrix"))?;
                    let offset = parse_vector(&p.offset, &format!("pieces[{c}].offset"))?;
                    if rows.len() != n || rows.iter().any(|r| r.len() != n) || offset.len() != n {
                        problems.push(format!(
                            "piece of cell {c}: expected {n}x{n} matrix and length-{n} offset"
                        ));
                        continue;
                    }
                    pieces.push((Matrix::from_rows(rows), offset));
                }
                if !problems.is_empty() {
                    return Err(FormatError::Invalid(problems));
                }
                PLMap::from_pieces(n, vertices, self.cells.clone(), pieces)
                    .map_err(|vs| FormatError::Invalid(vs.iter().map(|v| v.to_string()).collect()))
            }
            _ => Err(FormatError::MapSource),
        }
    }
}
