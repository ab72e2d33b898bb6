//! Append-only JSON-lines cache. Every finished record is appended as one
//! line; a resumed run reads the file back and skips keys it already has.

use std::collections::HashMap;
use std::fs::{File, OpenOptions};
use std::io::{self, BufRead, BufReader, Write};
use std::path::{Path, PathBuf};
use std::sync::Mutex;

use serde_json::{Map, Value};

use extremal_core::explorer::{RowStore, SweepRow};
use extremal_core::{Interval, PNorm};

use crate::record::{row_from_record, row_record, ResultRecord};

pub struct Cache {
    path: PathBuf,
    known: HashMap<String, ResultRecord>,
    writer: Mutex<File>,
}

impl Cache {
    pub fn open(path: &Path) -> io::Result<Self> {
        let mut known = HashMap::new();
        if path.exists() {
            for line in BufReader::new(File::open(path)?).lines() {
                let line = line?;
                // a torn last line from a crash is skipped, not fatal
                if let Ok(rec) = serde_json::from_str::<ResultRecord>(&line) {
                    known.insert(rec.key(), rec);
                }
            }
        }
        let writer = OpenOptions::new().create(true).append(true).open(path)?;
        Ok(Self {
            path: path.to_path_buf(),
            known,
            writer: Mutex::new(writer),
        })
    }

    pub fn path(&self) -> &Path {
        &self.path
    }

    pub fn get(&self, key: &str) -> Option<&ResultRecord> {
        self.known.get(key)
    }

    pub fn append(&self, rec: &ResultRecord) -> io::Result<()> {
        let line = serde_json::to_string(rec).map_err(io::Error::other)?;
        let mut w = self.writer.lock().expect("cache writer poisoned");
        writeln!(w, "{line}")?;
        w.flush()
    }
}

/// Adapts a cache to the explorer's row store for one sweep.
pub struct CacheRows<'a> {
    pub cache: Option<&'a Cache>,
    pub resume: bool,
    pub command: &'a str,
    pub interval: Interval,
    pub tol: f64,
    pub extra: Map<String, Value>,
    /// Rows in completion order, for output.
    pub fresh: Mutex<Vec<ResultRecord>>,
}

impl CacheRows<'_> {
    fn record_for(&self, row: &SweepRow) -> ResultRecord {
        row_record(self.command, row, &self.interval, self.tol, &self.extra)
    }
}

impl RowStore for CacheRows<'_> {
    fn lookup(&self, n: usize, p: PNorm) -> Option<SweepRow> {
        if !self.resume {
            return None;
        }
        let probe = self.record_for(&SweepRow {
            n,
            p,
            roots: Vec::new(),
            d_star_star: 0.0,
            c_star: 0.0,
            c_canonical: 0.0,
            ratio: 0.0,
            method: extremal_core::extremal::Method::ClosedForm,
            restarts: 0,
            converged: true,
            suspect: false,
            error: None,
        });
        self.cache?.get(&probe.key()).and_then(row_from_record)
    }

    fn record(&self, row: &SweepRow) {
        let rec = self.record_for(row);
        if let Some(cache) = self.cache {
            if let Err(e) = cache.append(&rec) {
                eprintln!("warning: cannot write cache {}: {e}", cache.path().display());
            }
        }
        self.fresh.lock().expect("rows poisoned").push(rec);
    }
}
