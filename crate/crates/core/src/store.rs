//! On-disk event store between ingestion and graph building.
//!
//! A store is a directory holding one JSON-lines file per activity
//! (`acg.jsonl`, `avg.jsonl`, `mtg.jsonl`, `cag.jsonl`) and the ingest
//! statistics (`stats.json`). Each line is one serialized [`ActivityEvent`].

use std::fs::{self, File};
use std::io::{self, BufRead, BufReader, BufWriter, Write};
use std::path::{Path, PathBuf};

use thiserror::Error;

use crate::ingest::{Activity, ActivityEvent, IngestStats};

pub const STATS_FILE: &str = "stats.json";

#[derive(Debug, Error)]
pub enum StoreError {
    #[error("{path}: {source}")]
    Io {
        path: PathBuf,
        #[source]
        source: io::Error,
    },
    #[error("{path}:{line}: {message}")]
    Parse {
        path: PathBuf,
        line: u64,
        message: String,
    },
    #[error("{path}:{line}: event activity {found} in the {expected} file")]
    MixedActivity {
        path: PathBuf,
        line: u64,
        expected: Activity,
        found: Activity,
    },
}

fn io_err(path: &Path) -> impl FnOnce(io::Error) -> StoreError + '_ {
    move |source| StoreError::Io {
        path: path.to_owned(),
        source,
    }
}

/// File holding the events of one activity.
pub fn events_path(dir: &Path, activity: Activity) -> PathBuf {
    dir.join(format!("{}.jsonl", activity.tag()))
}

/// Streaming writer that routes events to their activity file.
pub struct EventStoreWriter {
    dir: PathBuf,
    files: Vec<BufWriter<File>>,
}

impl EventStoreWriter {
    pub fn create(dir: &Path) -> Result<Self, StoreError> {
        fs::create_dir_all(dir).map_err(io_err(dir))?;
        let files = Activity::ALL
            .iter()
            .map(|a| {
                let path = events_path(dir, *a);
                File::create(&path).map(BufWriter::new).map_err(io_err(&path))
            })
            .collect::<Result<_, _>>()?;
        Ok(EventStoreWriter {
            dir: dir.to_owned(),
            files,
        })
    }

    pub fn push(&mut self, event: &ActivityEvent) -> io::Result<()> {
        let idx = Activity::ALL
            .iter()
            .position(|a| *a == event.activity)
            .expect("activity is one of ALL");
        let out = &mut self.files[idx];
        serde_json::to_writer(&mut *out, event)?;
        out.write_all(b"\n")
    }

    /// Flushes the event files and writes the statistics.
    pub fn finish(mut self, stats: &IngestStats) -> Result<(), StoreError> {
        for (file, activity) in self.files.iter_mut().zip(Activity::ALL) {
            file.flush()
                .map_err(io_err(&events_path(&self.dir, activity)))?;
        }
        let path = self.dir.join(STATS_FILE);
        fs::write(&path, stats.to_json()).map_err(io_err(&path))
    }
}

/// Writes a whole event list and its stats.
pub fn write_store(
    dir: &Path,
    events: &[ActivityEvent],
    stats: &IngestStats,
) -> Result<(), StoreError> {
    let mut writer = EventStoreWriter::create(dir)?;
    for event in events {
        writer.push(event).map_err(io_err(dir))?;
    }
    writer.finish(stats)
}

pub fn read_stats(dir: &Path) -> Result<IngestStats, StoreError> {
    let path = dir.join(STATS_FILE);
    let text = fs::read_to_string(&path).map_err(io_err(&path))?;
    serde_json::from_str(&text).map_err(|e| StoreError::Parse {
        path,
        line: e.line() as u64,
        message: e.to_string(),
    })
}

/// Iterates the events of one activity in stored order.
pub fn read_events(
    dir: &Path,
    activity: Activity,
) -> Result<impl Iterator<Item = Result<ActivityEvent, StoreError>>, StoreError> {
    let path = events_path(dir, activity);
    let file = File::open(&path).map_err(io_err(&path))?;
    let lines = BufReader::new(file).lines();
    Ok(lines.enumerate().filter_map(move |(i, line)| {
        let line_no = i as u64 + 1;
        let line = match line {
            Ok(l) => l,
            Err(e) => return Some(Err(io_err(&path)(e))),
        };
        if line.trim().is_empty() {
            return None;
        }
        Some(match serde_json::from_str::<ActivityEvent>(&line) {
            Ok(e) if e.activity != activity => Err(StoreError::MixedActivity {
                path: path.clone(),
                line: line_no,
                expected: activity,
                found: e.activity,
            }),
            Ok(e) => Ok(e),
            Err(e) => Err(StoreError::Parse {
                path: path.clone(),
                line: line_no,
                message: e.to_string(),
            }),
        })
    }))
}
