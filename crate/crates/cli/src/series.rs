//! Curve output: one CSV file per series with a `#` metadata prelude, or a
//! single versioned JSON document.

use std::collections::BTreeMap;
use std::fs;
use std::io::Write;
use std::path::PathBuf;

use serde::{Deserialize, Serialize};

use crate::config::{Format, RunConfig};
use crate::error::{CliError, CliResult};

pub const SCHEMA_VERSION: u32 = 1;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CurveSeries {
    pub name: String,
    pub abscissa_label: String,
    pub ordinate_label: String,
    pub points: Vec<(f64, f64)>,
    pub metadata: BTreeMap<String, String>,
}

impl CurveSeries {
    /// Rejects non-finite values and abscissae that do not strictly increase.
    pub fn new(
        name: impl Into<String>,
        abscissa_label: &str,
        ordinate_label: &str,
        points: Vec<(f64, f64)>,
        metadata: BTreeMap<String, String>,
    ) -> CliResult<Self> {
        let name = name.into();
        if let Some((x, y)) = points
            .iter()
            .find(|(x, y)| !x.is_finite() || !y.is_finite())
        {
            return Err(CliError::Usage(format!(
                "series {name}: non-finite point ({x}, {y})"
            )));
        }
        if let Some(w) = points.windows(2).find(|w| w[1].0 <= w[0].0) {
            return Err(CliError::Usage(format!(
                "series {name}: abscissa not increasing at {} -> {}",
                w[0].0, w[1].0
            )));
        }
        Ok(Self {
            name,
            abscissa_label: abscissa_label.to_string(),
            ordinate_label: ordinate_label.to_string(),
            points,
            metadata,
        })
    }

    pub fn ordinates(&self) -> Vec<f64> {
        self.points.iter().map(|p| p.1).collect()
    }

    /// RFC 4180 body preceded by `# key: value` lines.
    pub fn to_csv(&self) -> String {
        let mut out = String::new();
        out.push_str(&format!("# name: {}\n", self.name));
        for (k, v) in &self.metadata {
            out.push_str(&format!("# {k}: {v}\n"));
        }
        let mut w = csv::Writer::from_writer(Vec::new());
        w.write_record([&self.abscissa_label, &self.ordinate_label])
            .expect("in-memory write");
        for (x, y) in &self.points {
            w.write_record([x.to_string(), y.to_string()])
                .expect("in-memory write");
        }
        let body = w.into_inner().expect("in-memory flush");
        out.push_str(&String::from_utf8(body).expect("csv output is utf-8"));
        out
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SeriesDocument {
    pub schema_version: u32,
    pub command: String,
    pub series: Vec<CurveSeries>,
}

impl SeriesDocument {
    pub fn new(command: &str, series: Vec<CurveSeries>) -> Self {
        Self {
            schema_version: SCHEMA_VERSION,
            command: command.to_string(),
            series,
        }
    }
}

pub fn to_json<T: Serialize>(value: &T) -> String {
    serde_json::to_string_pretty(value).expect("values are finite and keys are strings") + "\n"
}

fn file_stem(name: &str) -> String {
    name.chars()
        .map(|c| {
            if c.is_ascii_alphanumeric() || "-_.".contains(c) {
                c
            } else {
                '_'
            }
        })
        .collect()
}

/// Writes `series` in the configured format. With `--out`, files go into that
/// directory and their paths are returned; otherwise everything goes to stdout.
pub fn emit(cfg: &RunConfig, series: Vec<CurveSeries>) -> CliResult<Vec<PathBuf>> {
    let command = cfg.command.name();
    match (&cfg.out, cfg.format) {
        (None, Format::Csv) => {
            let mut stdout = std::io::stdout().lock();
            for (i, s) in series.iter().enumerate() {
                if i > 0 {
                    writeln!(stdout)?;
                }
                stdout.write_all(s.to_csv().as_bytes())?;
            }
            Ok(Vec::new())
        }
        (None, Format::Json) => {
            print!("{}", to_json(&SeriesDocument::new(command, series)));
            Ok(Vec::new())
        }
        (Some(dir), Format::Csv) => {
            fs::create_dir_all(dir)?;
            series
                .iter()
                .map(|s| {
                    let path = dir.join(format!("{}.csv", file_stem(&s.name)));
                    fs::write(&path, s.to_csv())?;
                    Ok(path)
                })
                .collect()
        }
        (Some(dir), Format::Json) => {
            fs::create_dir_all(dir)?;
            let path = dir.join(format!("{command}.json"));
            fs::write(&path, to_json(&SeriesDocument::new(command, series)))?;
            Ok(vec![path])
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn meta() -> BTreeMap<String, String> {
        BTreeMap::from([("m".to_string(), "1".to_string())])
    }

    #[test]
    fn rejects_unordered_or_non_finite_points() {
        assert!(CurveSeries::new("a", "x", "y", vec![(0.0, 1.0), (0.0, 2.0)], meta()).is_err());
        assert!(CurveSeries::new("a", "x", "y", vec![(0.0, f64::NAN)], meta()).is_err());
        assert!(CurveSeries::new("a", "x", "y", vec![(0.0, 1.0), (1.0, 2.0)], meta()).is_ok());
    }

    #[test]
    fn csv_layout() {
        let s =
            CurveSeries::new("fig", "x,1", "y", vec![(0.5, 0.1), (1.0, 1e-20)], meta()).unwrap();
        let text = s.to_csv();
        let lines: Vec<&str> = text.lines().collect();
        assert_eq!(
            lines,
            vec![
                "# name: fig",
                "# m: 1",
                "\"x,1\",y",
                "0.5,0.1",
                "1,0.00000000000000000001"
            ]
        );
        let body: String = text
            .lines()
            .filter(|l| !l.starts_with('#'))
            .collect::<Vec<_>>()
            .join("\n");
        let mut reader = csv::Reader::from_reader(body.as_bytes());
        let rows: Vec<(f64, f64)> = reader.deserialize().map(|r| r.unwrap()).collect();
        assert_eq!(rows, s.points);
    }

    #[test]
    fn json_round_trip() {
        let s = CurveSeries::new("fig", "x", "y", vec![(0.5, 0.1), (1.0, 0.3)], meta()).unwrap();
        let doc = SeriesDocument::new("fig1", vec![s]);
        let text = to_json(&doc);
        let value: serde_json::Value = serde_json::from_str(&text).unwrap();
        assert_eq!(value["schema_version"], 1);
        let back: SeriesDocument = serde_json::from_str(&text).unwrap();
        assert_eq!(back, doc);
    }
}
