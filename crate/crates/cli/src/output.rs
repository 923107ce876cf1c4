//! Artifact writers. CSV files open with a `#` comment line recording the
//! run parameters (read them back with `csv::ReaderBuilder::comment`).

use std::fs::{self, File};
use std::io::{self, BufWriter, Write};
use std::path::{Path, PathBuf};

use serde::Serialize;

use crate::config::RunConfig;

pub fn ensure_dir(dir: &Path) -> io::Result<()> {
    fs::create_dir_all(dir)
}

pub fn artifact(cfg: &RunConfig, name: &str) -> io::Result<PathBuf> {
    ensure_dir(&cfg.out)?;
    Ok(cfg.out.join(name))
}

pub fn write_json<T: Serialize>(path: &Path, value: &T) -> io::Result<()> {
    let mut w = BufWriter::new(File::create(path)?);
    serde_json::to_writer_pretty(&mut w, value)?;
    w.write_all(b"\n")?;
    w.flush()
}

/// One JSON object per line.
pub fn write_jsonl<T: Serialize>(path: &Path, rows: impl IntoIterator<Item = T>) -> io::Result<()> {
    let mut w = BufWriter::new(File::create(path)?);
    for row in rows {
        serde_json::to_writer(&mut w, &row)?;
        w.write_all(b"\n")?;
    }
    w.flush()
}

fn header_comment(cfg: &RunConfig) -> String {
    let params = serde_json::Value::Object(cfg.params());
    format!("# {params}\n")
}

pub fn write_csv<R: Serialize>(
    path: &Path,
    cfg: &RunConfig,
    rows: impl IntoIterator<Item = R>,
) -> io::Result<()> {
    let mut file = BufWriter::new(File::create(path)?);
    file.write_all(header_comment(cfg).as_bytes())?;
    let mut w = csv::Writer::from_writer(file);
    for row in rows {
        w.serialize(row)?;
    }
    w.flush()
}

#[cfg(test)]
mod tests {
    use super::*;

    #[derive(Serialize, serde::Deserialize, PartialEq, Debug)]
    struct Row {
        theta: f64,
        value: f64,
    }

    #[test]
    fn csv_round_trip_skips_header_comment() {
        let dir = tempfile::tempdir().unwrap();
        let path = dir.path().join("t.csv");
        let cfg = RunConfig::default();
        let rows = vec![Row { theta: 0.0, value: 1.5 }, Row { theta: 0.1, value: -2.0 }];
        write_csv(&path, &cfg, rows.iter()).unwrap();
        let text = fs::read_to_string(&path).unwrap();
        assert!(text.starts_with("# {"));
        assert!(text.contains("\"seed\":"));
        let mut rdr = csv::ReaderBuilder::new().comment(Some(b'#')).from_path(&path).unwrap();
        let back: Vec<Row> = rdr.deserialize().map(|r| r.unwrap()).collect();
        assert_eq!(back, rows);
    }
}
