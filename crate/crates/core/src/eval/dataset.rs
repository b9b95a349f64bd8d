use std::path::{Path, PathBuf};

use super::{GroundTruth, Point2};
use crate::cascade::CascadeModel;
use crate::image::{load_pgm, GrayImage};
use crate::pipeline::{RegionInput, RegionsManifest};
use crate::{Error, Result};

/// Parses a BioID `.eye` file: `#` comment lines, then one line holding
/// four integers `LX LY RX RY`.
pub fn parse_eye_file(text: &str) -> Result<GroundTruth> {
    let mut found: Option<(usize, [i64; 4])> = None;
    for (i, raw) in text.lines().enumerate() {
        let line = raw.trim();
        if line.is_empty() || line.starts_with('#') {
            continue;
        }
        let err = |reason: String| Error::Parse {
            what: "eye file",
            line: i + 1,
            reason,
        };
        if found.is_some() {
            return Err(err("more than one coordinate line".into()));
        }
        let fields: Vec<&str> = line.split_whitespace().collect();
        if fields.len() != 4 {
            return Err(err(format!("expected 4 fields, found {}", fields.len())));
        }
        let mut v = [0i64; 4];
        for (slot, f) in v.iter_mut().zip(&fields) {
            *slot = f.parse().map_err(|_| err(format!("`{f}` is not an integer")))?;
        }
        found = Some((i + 1, v));
    }
    let (line, v) = found.ok_or(Error::Parse {
        what: "eye file",
        line: text.lines().count().max(1),
        reason: "no coordinate line".into(),
    })?;
    GroundTruth::new(Point2::new(v[0] as f64, v[1] as f64), Point2::new(v[2] as f64, v[3] as f64)).map_err(|e| {
        Error::Parse {
            what: "eye file",
            line,
            reason: e.to_string(),
        }
    })
}

/// Writes the BioID layout; `lx, ly` is the eye on the image's right.
pub fn format_eye_file(lx: i64, ly: i64, rx: i64, ry: i64) -> String {
    format!("#LX\tLY\tRX\tRY\n{lx}\t{ly}\t{rx}\t{ry}\n")
}

/// One frame with its ground truth.
#[derive(Debug, Clone, PartialEq)]
pub struct Sample {
    /// File name of the image, used as the sort key and manifest key.
    pub name: String,
    pub image: PathBuf,
    pub truth: GroundTruth,
}

impl Sample {
    pub fn load_image(&self) -> Result<GrayImage> {
        let bytes = std::fs::read(&self.image).map_err(|e| Error::io(&self.image, e))?;
        load_pgm(&bytes)
    }
}

/// The frames of a dataset directory, sorted by file name.
#[derive(Debug, Clone, Default, PartialEq)]
pub struct DatasetIndex {
    pub samples: Vec<Sample>,
}

impl DatasetIndex {
    /// Every `*.pgm` in `dir` with a sibling `.eye` file. Images without
    /// ground truth are ignored; unparsable `.eye` files are errors.
    pub fn scan(dir: &Path) -> Result<Self> {
        let entries = std::fs::read_dir(dir).map_err(|e| Error::io(dir, e))?;
        let mut samples = Vec::new();
        for entry in entries {
            let path = entry.map_err(|e| Error::io(dir, e))?.path();
            if path.extension().and_then(|e| e.to_str()) != Some("pgm") {
                continue;
            }
            let eye = path.with_extension("eye");
            if !eye.is_file() {
                continue;
            }
            let text = std::fs::read_to_string(&eye).map_err(|e| Error::io(&eye, e))?;
            let truth = parse_eye_file(&text).map_err(|e| Error::Config(format!("{}: {e}", eye.display())))?;
            let name = path.file_name().unwrap().to_string_lossy().into_owned();
            samples.push(Sample { name, image: path, truth });
        }
        samples.sort_by(|a, b| a.name.cmp(&b.name));
        Ok(DatasetIndex { samples })
    }

    pub fn len(&self) -> usize {
        self.samples.len()
    }

    pub fn is_empty(&self) -> bool {
        self.samples.is_empty()
    }

    pub fn subset(&self, indices: &[usize]) -> DatasetIndex {
        DatasetIndex {
            samples: indices.iter().map(|&i| self.samples[i].clone()).collect(),
        }
    }
}

/// Where a dataset's eye regions come from.
#[derive(Debug, Clone)]
pub enum RegionSpec {
    Cascades { face: CascadeModel, eye: CascadeModel },
    Manifest(RegionsManifest),
}

impl RegionSpec {
    pub fn input_for(&self, name: &str) -> Result<RegionInput<'_>> {
        match self {
            RegionSpec::Cascades { face, eye } => Ok(RegionInput::Cascades { face, eye }),
            RegionSpec::Manifest(m) => m
                .get(name)
                .map(|&(l, r)| RegionInput::Provided(l, r))
                .ok_or_else(|| Error::Config(format!("no regions listed for `{name}`"))),
        }
    }
}
