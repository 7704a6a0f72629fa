//! Persistence for episode records: CSV and JSON files that round-trip
//! losslessly, plus the canonical CSV form used to compare runs.

use crate::episode::EpisodeRecord;
use crate::matrix::sort_canonical;
use std::fmt::Write as _;
use std::fs;
use std::path::Path;
use std::str::FromStr;
use thiserror::Error;

/// On-disk format for tournament results.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum OutputFormat {
    #[default]
    Csv,
    Json,
}

impl OutputFormat {
    pub fn extension(self) -> &'static str {
        match self {
            OutputFormat::Csv => "csv",
            OutputFormat::Json => "json",
        }
    }

    /// Infer the format from a file name; anything but `.json` reads
    /// as CSV.
    pub fn from_path(path: &Path) -> OutputFormat {
        match path.extension().and_then(|e| e.to_str()) {
            Some(ext) if ext.eq_ignore_ascii_case("json") => OutputFormat::Json,
            _ => OutputFormat::Csv,
        }
    }
}

impl FromStr for OutputFormat {
    type Err = PersistError;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s {
            "csv" => Ok(OutputFormat::Csv),
            "json" => Ok(OutputFormat::Json),
            other => Err(PersistError::UnknownFormat(other.to_string())),
        }
    }
}

#[derive(Debug, Error)]
pub enum PersistError {
    #[error("unknown results format {0:?} (expected csv or json)")]
    UnknownFormat(String),
    #[error("io error on {path}: {source}")]
    Io {
        path: String,
        source: std::io::Error,
    },
    #[error("csv error on {path}: {source}")]
    Csv { path: String, source: csv::Error },
    #[error("json error on {path}: {source}")]
    Json {
        path: String,
        source: serde_json::Error,
    },
}

fn io_err(path: &Path, source: std::io::Error) -> PersistError {
    PersistError::Io {
        path: path.display().to_string(),
        source,
    }
}

fn csv_err(path: &Path, source: csv::Error) -> PersistError {
    PersistError::Csv {
        path: path.display().to_string(),
        source,
    }
}

/// Write records to `path` in the given format. CSV gets the header
/// `agent,game,level,seed,win,score,ticks,fm_calls,wall_ms` even when
/// there are no records; JSON gets an array.
pub fn write_results(
    records: &[EpisodeRecord],
    path: &Path,
    format: OutputFormat,
) -> Result<(), PersistError> {
    match format {
        OutputFormat::Csv => {
            let mut writer = csv::Writer::from_path(path).map_err(|e| csv_err(path, e))?;
            if records.is_empty() {
                // Headers are normally emitted with the first row; an
                // empty result file still needs them to round-trip.
                writer
                    .write_record([
                        "agent", "game", "level", "seed", "win", "score", "ticks", "fm_calls",
                        "wall_ms",
                    ])
                    .map_err(|e| csv_err(path, e))?;
            }
            for record in records {
                writer.serialize(record).map_err(|e| csv_err(path, e))?;
            }
            writer.flush().map_err(|e| io_err(path, e))?;
        }
        OutputFormat::Json => {
            let text = serde_json::to_string_pretty(records).map_err(|e| PersistError::Json {
                path: path.display().to_string(),
                source: e,
            })?;
            fs::write(path, text + "\n").map_err(|e| io_err(path, e))?;
        }
    }
    Ok(())
}

/// Read records from `path`, inferring the format from its extension.
pub fn read_results(path: &Path) -> Result<Vec<EpisodeRecord>, PersistError> {
    match OutputFormat::from_path(path) {
        OutputFormat::Csv => {
            let mut reader = csv::Reader::from_path(path).map_err(|e| csv_err(path, e))?;
            let mut out = Vec::new();
            for row in reader.deserialize() {
                out.push(row.map_err(|e| csv_err(path, e))?);
            }
            Ok(out)
        }
        OutputFormat::Json => {
            let text = fs::read_to_string(path).map_err(|e| io_err(path, e))?;
            serde_json::from_str(&text).map_err(|e| PersistError::Json {
                path: path.display().to_string(),
                source: e,
            })
        }
    }
}

/// The canonical textual form of a result set: records sorted
/// canonically and printed without the wall-clock column, so the same
/// tournament produces byte-identical text no matter the thread count
/// or machine speed. Floats print in shortest round-trip form.
pub fn canonical_csv(records: &[EpisodeRecord]) -> String {
    let mut sorted = records.to_vec();
    sort_canonical(&mut sorted);
    let mut out = String::with_capacity(64 * (sorted.len() + 1));
    out.push_str("agent,game,level,seed,win,score,ticks,fm_calls\n");
    for r in &sorted {
        writeln!(
            out,
            "{},{},{},{},{},{},{},{}",
            r.agent, r.game, r.level, r.seed, r.win, r.score, r.ticks, r.fm_calls
        )
        .expect("writing to a String cannot fail");
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;

    fn sample() -> Vec<EpisodeRecord> {
        vec![
            EpisodeRecord {
                agent: "vanilla".into(),
                game: "d-escape".into(),
                level: 1,
                seed: 42,
                win: 1,
                score: -3.5,
                ticks: 17,
                fm_calls: 15_300,
                wall_ms: 12,
            },
            EpisodeRecord {
                agent: "mcts".into(),
                game: "s-zombies".into(),
                level: 0,
                seed: 7,
                win: 0,
                score: 128.0,
                ticks: 220,
                fm_calls: 198_000,
                wall_ms: 90,
            },
        ]
    }

    #[test]
    fn csv_round_trip_is_lossless_and_keeps_the_column_order() {
        let dir = tempfile::tempdir().unwrap();
        let path = dir.path().join("results.csv");
        let records = sample();
        write_results(&records, &path, OutputFormat::Csv).unwrap();

        let text = fs::read_to_string(&path).unwrap();
        let header = text.lines().next().unwrap();
        assert_eq!(
            header,
            "agent,game,level,seed,win,score,ticks,fm_calls,wall_ms"
        );
        assert!(text.contains("-3.5"), "fractional score mangled: {text}");

        let back = read_results(&path).unwrap();
        assert_eq!(back, records);
        assert_eq!(back[0].score.to_bits(), (-3.5f64).to_bits());
    }

    #[test]
    fn json_round_trip_is_lossless() {
        let dir = tempfile::tempdir().unwrap();
        let path = dir.path().join("results.json");
        let records = sample();
        write_results(&records, &path, OutputFormat::Json).unwrap();
        let back = read_results(&path).unwrap();
        assert_eq!(back, records);
    }

    #[test]
    fn empty_runs_write_a_header_only_csv_that_reads_back_empty() {
        let dir = tempfile::tempdir().unwrap();
        let path = dir.path().join("empty.csv");
        write_results(&[], &path, OutputFormat::Csv).unwrap();
        let text = fs::read_to_string(&path).unwrap();
        assert_eq!(
            text.trim_end(),
            "agent,game,level,seed,win,score,ticks,fm_calls,wall_ms"
        );
        assert!(read_results(&path).unwrap().is_empty());
    }

    #[test]
    fn canonical_csv_sorts_and_drops_wall_clock() {
        let mut records = sample();
        let a = canonical_csv(&records);
        records.reverse();
        records[0].wall_ms = 999_999;
        let b = canonical_csv(&records);
        assert_eq!(a, b);
        assert!(!a.contains("wall"), "canonical text leaked wall_ms: {a}");
        let mut lines = a.lines();
        assert_eq!(lines.next(), Some("agent,game,level,seed,win,score,ticks,fm_calls"));
        assert_eq!(lines.next(), Some("mcts,s-zombies,0,7,0,128,220,198000"));
        assert_eq!(lines.next(), Some("vanilla,d-escape,1,42,1,-3.5,17,15300"));
        assert_eq!(lines.next(), None);
    }

    #[test]
    fn format_inference_follows_the_extension() {
        assert_eq!(
            OutputFormat::from_path(Path::new("x/results.json")),
            OutputFormat::Json
        );
        assert_eq!(
            OutputFormat::from_path(Path::new("x/results.csv")),
            OutputFormat::Csv
        );
        assert_eq!(
            OutputFormat::from_path(Path::new("bare")),
            OutputFormat::Csv
        );
        assert_eq!("json".parse::<OutputFormat>().unwrap(), OutputFormat::Json);
        assert!("yaml".parse::<OutputFormat>().is_err());
    }
}
