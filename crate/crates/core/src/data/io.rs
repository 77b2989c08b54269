//! Diagram files and dataset manifests.
//!
//! CSV diagrams hold rows `birth,death[,multiplicity]` with an optional
//! header line; `#` starts a comment. JSON diagrams look like
//! `{"points": [{"birth": 0.0, "death": 2.0, "mult": 1}]}` with `mult`
//! defaulting to 1.

use std::fmt::Write as _;
use std::fs;
use std::path::{Path, PathBuf};
use std::str::FromStr;

use serde::{Deserialize, Serialize};
use sha2::{Digest, Sha256};
use thiserror::Error;

use crate::diagram::{DiagramError, DiagramPoint, PersistenceDiagram};

#[derive(Debug, Error)]
pub enum IoError {
    #[error("line {line}: {message}")]
    Parse { line: usize, message: String },
    #[error("{path}: {source}")]
    File { path: PathBuf, source: std::io::Error },
    #[error("{path}: {source}")]
    InFile { path: PathBuf, source: Box<IoError> },
    #[error("unknown diagram format '{0}' (expected csv or json)")]
    UnknownFormat(String),
    #[error("manifest: {0}")]
    Manifest(String),
}

impl IoError {
    fn at(line: usize, message: impl Into<String>) -> Self {
        IoError::Parse { line, message: message.into() }
    }

    fn in_file(self, path: &Path) -> Self {
        IoError::InFile { path: path.to_path_buf(), source: Box::new(self) }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Format {
    Csv,
    Json,
}

impl Format {
    /// Guesses the format from a file extension, defaulting to CSV.
    pub fn from_path(path: &Path) -> Self {
        match path.extension().and_then(|e| e.to_str()) {
            Some(e) if e.eq_ignore_ascii_case("json") => Format::Json,
            _ => Format::Csv,
        }
    }
}

impl FromStr for Format {
    type Err = IoError;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s.to_ascii_lowercase().as_str() {
            "csv" => Ok(Format::Csv),
            "json" => Ok(Format::Json),
            _ => Err(IoError::UnknownFormat(s.to_string())),
        }
    }
}

#[derive(Debug, Serialize, Deserialize)]
struct JsonPoint {
    birth: f64,
    death: f64,
    #[serde(default = "one")]
    mult: u32,
}

fn one() -> u32 {
    1
}

#[derive(Debug, Serialize, Deserialize)]
struct JsonDiagram {
    points: Vec<JsonPoint>,
}

fn point_error(line: usize, e: DiagramError) -> IoError {
    let message = match e {
        DiagramError::NotAboveDiagonal { birth, death, .. } => {
            format!("birth {birth} must be below death {death}")
        }
        DiagramError::NonFinite { .. } => "non-finite coordinate".to_string(),
        DiagramError::ZeroMultiplicity { .. } => "multiplicity must be at least 1".to_string(),
        other => other.to_string(),
    };
    IoError::at(line, message)
}

fn parse_csv(text: &str) -> Result<PersistenceDiagram, IoError> {
    let mut reader = csv::ReaderBuilder::new()
        .has_headers(false)
        .flexible(true)
        .comment(Some(b'#'))
        .trim(csv::Trim::All)
        .from_reader(text.as_bytes());
    let mut points = Vec::new();
    let mut first = true;
    for record in reader.records() {
        let record = record.map_err(|e| {
            let line = e.position().map_or(0, |p| p.line() as usize);
            IoError::at(line, e.to_string())
        })?;
        let line = record.position().map_or(0, |p| p.line() as usize);
        if record.iter().all(|f| f.is_empty()) {
            continue;
        }
        let is_first = std::mem::take(&mut first);
        if record.len() < 2 || record.len() > 3 {
            return Err(IoError::at(line, format!("expected 2 or 3 fields, found {}", record.len())));
        }
        let birth = record[0].parse::<f64>();
        if is_first && birth.is_err() && record[0].chars().any(|c| c.is_ascii_alphabetic()) {
            // header row
            continue;
        }
        let birth = birth.map_err(|_| IoError::at(line, format!("invalid birth '{}'", &record[0])))?;
        let death = record[1]
            .parse::<f64>()
            .map_err(|_| IoError::at(line, format!("invalid death '{}'", &record[1])))?;
        let mult = match record.get(2) {
            None | Some("") => 1,
            Some(m) => m
                .parse::<u32>()
                .map_err(|_| IoError::at(line, format!("invalid multiplicity '{m}'")))?,
        };
        points.push(DiagramPoint::new(birth, death, mult).map_err(|e| point_error(line, e))?);
    }
    Ok(PersistenceDiagram::from_points(points))
}

fn parse_json(text: &str) -> Result<PersistenceDiagram, IoError> {
    let doc: JsonDiagram = serde_json::from_str(text).map_err(|e| IoError::at(e.line(), e.to_string()))?;
    let points = doc
        .points
        .iter()
        .enumerate()
        .map(|(i, p)| {
            DiagramPoint::new(p.birth, p.death, p.mult).map_err(|e| match point_error(0, e) {
                IoError::Parse { message, .. } => IoError::Manifest(format!("point {i}: {message}")),
                other => other,
            })
        })
        .collect::<Result<Vec<_>, _>>()?;
    Ok(PersistenceDiagram::from_points(points))
}

/// Parses a diagram; duplicates merge and canonical ordering applies.
pub fn parse_diagram(text: &str, format: Format) -> Result<PersistenceDiagram, IoError> {
    match format {
        Format::Csv => parse_csv(text),
        Format::Json => parse_json(text),
    }
}

pub fn serialize_diagram(d: &PersistenceDiagram, format: Format) -> String {
    match format {
        Format::Csv => {
            let mut s = String::from("birth,death,multiplicity\n");
            for p in d.points() {
                let _ = writeln!(s, "{},{},{}", p.birth(), p.death(), p.multiplicity());
            }
            s
        }
        Format::Json => {
            let doc = JsonDiagram {
                points: d
                    .points()
                    .iter()
                    .map(|p| JsonPoint { birth: p.birth(), death: p.death(), mult: p.multiplicity() })
                    .collect(),
            };
            serde_json::to_string(&doc).expect("diagram serializes")
        }
    }
}

/// Hex SHA-256 of the canonical CSV serialization.
pub fn diagram_sha256(d: &PersistenceDiagram) -> String {
    let digest = Sha256::digest(serialize_diagram(d, Format::Csv).as_bytes());
    digest.iter().fold(String::with_capacity(64), |mut s, b| {
        let _ = write!(s, "{b:02x}");
        s
    })
}

pub fn read_diagram(path: &Path) -> Result<PersistenceDiagram, IoError> {
    let text = fs::read_to_string(path).map_err(|source| IoError::File { path: path.to_path_buf(), source })?;
    parse_diagram(&text, Format::from_path(path)).map_err(|e| e.in_file(path))
}

pub fn write_diagram(path: &Path, d: &PersistenceDiagram) -> Result<(), IoError> {
    fs::write(path, serialize_diagram(d, Format::from_path(path)))
        .map_err(|source| IoError::File { path: path.to_path_buf(), source })
}

/// One manifest row: a diagram file and its target (number or label).
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ManifestEntry {
    pub diagram: PathBuf,
    pub target: serde_json::Value,
}

/// Reads a manifest (a JSON list of entries). Relative diagram paths are
/// resolved against the manifest's directory.
pub fn read_manifest(path: &Path) -> Result<Vec<ManifestEntry>, IoError> {
    let text = fs::read_to_string(path).map_err(|source| IoError::File { path: path.to_path_buf(), source })?;
    let mut entries: Vec<ManifestEntry> =
        serde_json::from_str(&text).map_err(|e| IoError::at(e.line(), e.to_string()).in_file(path))?;
    let base = path.parent().unwrap_or_else(|| Path::new("."));
    for e in &mut entries {
        if e.diagram.is_relative() {
            e.diagram = base.join(&e.diagram);
        }
    }
    Ok(entries)
}

pub fn write_manifest(path: &Path, entries: &[ManifestEntry]) -> Result<(), IoError> {
    let text = serde_json::to_string_pretty(entries).map_err(|e| IoError::Manifest(e.to_string()))?;
    fs::write(path, text).map_err(|source| IoError::File { path: path.to_path_buf(), source })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn csv_examples() {
        let d = parse_diagram("0,2,1\n", Format::Csv).unwrap();
        assert_eq!(d, PersistenceDiagram::from_pairs([(0.0, 2.0)]).unwrap());
        let d = parse_diagram("0,2,1\n0,2,2\n", Format::Csv).unwrap();
        assert_eq!(d.points()[0].multiplicity(), 3);
        assert_eq!(d.len(), 1);
        match parse_diagram("2,0,1\n", Format::Csv) {
            Err(IoError::Parse { line: 1, .. }) => {}
            other => panic!("unexpected {other:?}"),
        }
    }

    #[test]
    fn csv_header_comments_and_defaults() {
        let text = "birth,death,multiplicity\n# comment\n0, 1\n\n0.5,3,2\n";
        let d = parse_diagram(text, Format::Csv).unwrap();
        assert_eq!(d.atom_count(), 3);
    }

    #[test]
    fn csv_errors_carry_line_numbers() {
        let cases = [
            ("0,1\nx,2\n", 2),
            ("0,1\n1,2\n0,1,0\n", 3),
            ("0,1,1,1\n", 1),
            ("0,nan\n", 1),
            ("0\n", 1),
        ];
        for (text, want) in cases {
            match parse_diagram(text, Format::Csv) {
                Err(IoError::Parse { line, .. }) => assert_eq!(line, want, "{text:?}"),
                other => panic!("{text:?}: {other:?}"),
            }
        }
    }

    #[test]
    fn json_parsing() {
        let d = parse_diagram(r#"{"points":[{"birth":0,"death":2},{"birth":0,"death":2,"mult":2}]}"#, Format::Json)
            .unwrap();
        assert_eq!(d.points()[0].multiplicity(), 3);
        assert!(parse_diagram(r#"{"points":[{"birth":3,"death":2}]}"#, Format::Json).is_err());
        assert!(matches!(parse_diagram("{\n\"points\": [1,", Format::Json), Err(IoError::Parse { line: 2, .. })));
    }

    #[test]
    fn empty_inputs() {
        assert!(parse_diagram("", Format::Csv).unwrap().is_empty());
        assert!(parse_diagram(r#"{"points":[]}"#, Format::Json).unwrap().is_empty());
    }

    #[test]
    fn digest_is_stable_under_reordering() {
        let a = PersistenceDiagram::from_pairs([(0.0, 2.0), (1.0, 3.0)]).unwrap();
        let b = PersistenceDiagram::from_pairs([(1.0, 3.0), (0.0, 2.0)]).unwrap();
        assert_eq!(diagram_sha256(&a), diagram_sha256(&b));
        assert_eq!(diagram_sha256(&a).len(), 64);
    }
}
