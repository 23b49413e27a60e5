use std::collections::HashSet;
use std::fs::File;
use std::io::{BufRead, BufReader};
use std::path::Path;

use crate::{Error, Result};

/// Word pairs with human similarity or relatedness scores.
#[derive(Clone, Debug, PartialEq)]
pub struct SimilarityDataset {
    pub name: String,
    pub pairs: Vec<(String, String, f64)>,
}

impl SimilarityDataset {
    pub fn new(name: impl Into<String>, pairs: Vec<(String, String, f64)>) -> Result<Self> {
        let mut seen = HashSet::new();
        for (a, b, score) in &pairs {
            if !score.is_finite() {
                return Err(Error::InvalidConfig(format!("non-finite score for ({}, {})", a, b)));
            }
            let key = if a <= b { (a, b) } else { (b, a) };
            if !seen.insert(key) {
                return Err(Error::DuplicatePair(a.clone(), b.clone()));
            }
        }
        Ok(SimilarityDataset {
            name: name.into(),
            pairs,
        })
    }

    /// Parse `word1, word2, score` rows separated by tabs or commas.
    ///
    /// A first row whose third field is not a number is taken as a header.
    /// Blank lines and lines starting with `#` are ignored; extra columns
    /// after the score are ignored.
    pub fn parse<R: BufRead>(name: impl Into<String>, reader: R) -> Result<Self> {
        let mut pairs = Vec::new();
        let mut first = true;
        for (i, line) in reader.lines().enumerate() {
            let lineno = i + 1;
            let line = line.map_err(|e| Error::parse(lineno, e.to_string()))?;
            let line = line.trim_start_matches('\u{feff}').trim_end_matches('\r');
            if line.trim().is_empty() || line.starts_with('#') {
                continue;
            }
            let fields: Vec<&str> = if line.contains('\t') {
                line.split('\t').collect()
            } else {
                line.split(',').collect()
            };
            let is_first = std::mem::replace(&mut first, false);
            if fields.len() < 3 {
                return Err(Error::parse(lineno, "expected word1, word2, score"));
            }
            let (a, b) = (fields[0].trim(), fields[1].trim());
            let score = match fields[2].trim().parse::<f64>() {
                Ok(s) if s.is_finite() => s,
                _ if is_first => continue,
                _ => return Err(Error::parse(lineno, format!("invalid score `{}`", fields[2].trim()))),
            };
            if a.is_empty() || b.is_empty() {
                return Err(Error::parse(lineno, "empty word"));
            }
            pairs.push((a.to_owned(), b.to_owned(), score));
        }
        Self::new(name, pairs)
    }

    /// Load a file; the dataset is named after the file stem.
    pub fn load(path: impl AsRef<Path>) -> Result<Self> {
        let path = path.as_ref();
        let file = File::open(path).map_err(|e| Error::io(path, e))?;
        let name = path
            .file_stem()
            .map(|s| s.to_string_lossy().into_owned())
            .unwrap_or_else(|| path.display().to_string());
        Self::parse(name, BufReader::new(file))
    }

    pub fn len(&self) -> usize {
        self.pairs.len()
    }

    pub fn is_empty(&self) -> bool {
        self.pairs.is_empty()
    }
}
