//! Append-only JSONL store of named fuzzy hashes.

use std::fs::{self, OpenOptions};
use std::io::{self, Write};
use std::path::Path;
use std::time::{SystemTime, UNIX_EPOCH};

use serde::{Deserialize, Serialize};
use tah_core::{decode_hash_with, FuzzyHash, ProjectionParams};

use crate::exit::{CliResult, Failure, CORRUPT_DB, DUPLICATE_ID, IO};

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct CorpusEntry {
    pub id: String,
    pub hash: String,
    pub added_at: u64,
}

pub struct Loaded {
    pub entry: CorpusEntry,
    pub hash: FuzzyHash,
}

/// Reads every record; a missing file is an empty corpus.
pub fn load(db: &Path, params: &ProjectionParams) -> CliResult<Vec<Loaded>> {
    let text = match fs::read_to_string(db) {
        Ok(t) => t,
        Err(e) if e.kind() == io::ErrorKind::NotFound => return Ok(Vec::new()),
        Err(e) => return Err(Failure::new(IO, e).context(db.display())),
    };
    let mut out = Vec::new();
    for (idx, line) in text.lines().enumerate() {
        if line.trim().is_empty() {
            continue;
        }
        let corrupt = |msg: String| {
            Failure::msg(
                CORRUPT_DB,
                format!("{} line {}: {msg}", db.display(), idx + 1),
            )
        };
        let entry: CorpusEntry = serde_json::from_str(line).map_err(|e| corrupt(e.to_string()))?;
        let hash = decode_hash_with(&entry.hash, params).map_err(|e| corrupt(e.to_string()))?;
        out.push(Loaded { entry, hash });
    }
    Ok(out)
}

pub fn add(db: &Path, id: &str, hash: &FuzzyHash, params: &ProjectionParams) -> CliResult<()> {
    if load(db, params)?.iter().any(|l| l.entry.id == id) {
        return Err(Failure::msg(
            DUPLICATE_ID,
            format!("id `{id}` already present in {}", db.display()),
        ));
    }
    let entry = CorpusEntry {
        id: id.to_string(),
        hash: tah_core::encode_hash(hash),
        added_at: SystemTime::now()
            .duration_since(UNIX_EPOCH)
            .map(|d| d.as_secs())
            .unwrap_or(0),
    };
    let mut line = serde_json::to_string(&entry).expect("entry serializes");
    line.push('\n');
    let mut file = OpenOptions::new()
        .create(true)
        .append(true)
        .open(db)
        .map_err(|e| Failure::new(IO, e).context(db.display()))?;
    file.write_all(line.as_bytes())
        .map_err(|e| Failure::new(IO, e).context(db.display()))
}

/// Entries scoring at least `threshold`, best first, ties by id.
pub fn scan(
    entries: &[Loaded],
    query: &FuzzyHash,
    threshold: f64,
) -> CliResult<Vec<(f64, String)>> {
    let mut hits = Vec::new();
    for l in entries {
        let s = tah_core::hash_similarity(query, &l.hash)?.value();
        if s >= threshold {
            hits.push((s, l.entry.id.clone()));
        }
    }
    hits.sort_by(|a, b| b.0.total_cmp(&a.0).then_with(|| a.1.cmp(&b.1)));
    Ok(hits)
}
