//! Size statistics of already-compressed corpora.
//!
//! This module never compresses anything; it measures the byte sizes of
//! files a lossless codec produced elsewhere, either by scanning a
//! directory tree or by loading a `filename,bytes` manifest.

use std::path::Path;

use serde::{Deserialize, Serialize};
use walkdir::WalkDir;

use crate::{Error, Result};

/// Where a [`SizeStats`] came from.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum StatsSource {
    Directory,
    Manifest,
}

/// Aggregate byte statistics over a matched file set.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SizeStats {
    pub file_count: u64,
    pub mean_bytes: f64,
    pub total_bytes: u64,
    pub extension_filter: Vec<String>,
    pub source: StatsSource,
    /// Unreadable entries skipped during a scan.
    pub skipped_unreadable: u64,
    /// Duplicate filenames seen in a manifest (both occurrences counted).
    pub duplicate_warnings: u64,
}

/// Scan options; the defaults skip hidden files and do not follow
/// symlinks.
#[derive(Debug, Clone, Copy)]
pub struct ScanOptions {
    pub include_hidden: bool,
    pub follow_symlinks: bool,
}

impl Default for ScanOptions {
    fn default() -> Self {
        Self { include_hidden: false, follow_symlinks: false }
    }
}

fn is_hidden(name: &str) -> bool {
    name.starts_with('.')
}

/// Recursively sums the sizes of files whose names end with one of the
/// suffixes (case-insensitive; an empty list matches everything).
pub fn scan_dataset(path: &Path, extensions: &[String], opts: ScanOptions) -> Result<SizeStats> {
    if !path.exists() {
        return Err(Error::Io {
            path: path.to_path_buf(),
            source: std::io::Error::new(std::io::ErrorKind::NotFound, "path does not exist"),
        });
    }
    let suffixes: Vec<String> = extensions
        .iter()
        .map(|e| {
            let e = e.to_ascii_lowercase();
            if e.starts_with('.') { e } else { format!(".{e}") }
        })
        .collect();
    let mut total: u64 = 0;
    let mut count: u64 = 0;
    let mut skipped: u64 = 0;
    let walker = WalkDir::new(path).follow_links(opts.follow_symlinks);
    for entry in walker {
        let entry = match entry {
            Ok(e) => e,
            Err(_) => {
                skipped += 1;
                continue;
            }
        };
        let name = entry.file_name().to_string_lossy();
        if !opts.include_hidden && is_hidden(&name) && entry.depth() > 0 {
            continue;
        }
        if !entry.file_type().is_file() {
            continue;
        }
        let lower = name.to_ascii_lowercase();
        if !suffixes.is_empty() && !suffixes.iter().any(|s| lower.ends_with(s.as_str())) {
            continue;
        }
        match entry.metadata() {
            Ok(meta) => {
                total += meta.len();
                count += 1;
            }
            Err(_) => skipped += 1,
        }
    }
    if count == 0 {
        return Err(Error::NoFilesMatched {
            path: path.to_path_buf(),
            suffixes,
        });
    }
    Ok(SizeStats {
        file_count: count,
        mean_bytes: total as f64 / count as f64,
        total_bytes: total,
        extension_filter: suffixes,
        source: StatsSource::Directory,
        skipped_unreadable: skipped,
        duplicate_warnings: 0,
    })
}

/// Loads a `filename,bytes` CSV manifest. Malformed rows error with their
/// line number; duplicate filenames are counted as warnings but both rows
/// contribute.
pub fn load_manifest(path: &Path) -> Result<SizeStats> {
    let mut reader = csv::ReaderBuilder::new()
        .has_headers(true)
        .trim(csv::Trim::All)
        .from_path(path)
        .map_err(|e| Error::Io {
            path: path.to_path_buf(),
            source: std::io::Error::other(e),
        })?;
    {
        let headers = reader.headers().map_err(|e| Error::Manifest {
            path: path.to_path_buf(),
            line: 1,
            message: e.to_string(),
        })?;
        if headers.len() < 2 || headers.get(0) != Some("filename") || headers.get(1) != Some("bytes")
        {
            return Err(Error::Manifest {
                path: path.to_path_buf(),
                line: 1,
                message: format!("expected header \"filename,bytes\", got {headers:?}"),
            });
        }
    }
    let mut seen = std::collections::HashSet::new();
    let mut total: u64 = 0;
    let mut count: u64 = 0;
    let mut duplicates: u64 = 0;
    for (i, record) in reader.records().enumerate() {
        let line = i as u64 + 2; // 1-based, after the header
        let record = record.map_err(|e| Error::Manifest {
            path: path.to_path_buf(),
            line,
            message: e.to_string(),
        })?;
        let name = record.get(0).unwrap_or_default().to_string();
        let bytes_field = record.get(1).ok_or_else(|| Error::Manifest {
            path: path.to_path_buf(),
            line,
            message: "missing bytes column".into(),
        })?;
        let bytes: i64 = bytes_field.parse().map_err(|_| Error::Manifest {
            path: path.to_path_buf(),
            line,
            message: format!("bytes field {bytes_field:?} is not an integer"),
        })?;
        if bytes <= 0 {
            return Err(Error::Manifest {
                path: path.to_path_buf(),
                line,
                message: format!("bytes must be positive, got {bytes}"),
            });
        }
        if !seen.insert(name) {
            duplicates += 1;
        }
        total += bytes as u64;
        count += 1;
    }
    if count == 0 {
        return Err(Error::NoFilesMatched {
            path: path.to_path_buf(),
            suffixes: vec![],
        });
    }
    Ok(SizeStats {
        file_count: count,
        mean_bytes: total as f64 / count as f64,
        total_bytes: total,
        extension_filter: vec![],
        source: StatsSource::Manifest,
        skipped_unreadable: 0,
        duplicate_warnings: duplicates,
    })
}
