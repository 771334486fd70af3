use std::fs;
use std::io::Write;
use std::path::{Path, PathBuf};

use crate::config::{Format, Measure};
use crate::error::CliError;
use crate::svg::{log_log_chart, Series};
use crate::sweep::{series, summary, Row, SweepResult};

pub const CSV_HEADER: &str = "gamma,state,measure,value";

pub fn csv_string(rows: &[Row]) -> String {
    let mut out = String::with_capacity(64 * (rows.len() + 1));
    out.push_str(CSV_HEADER);
    out.push('\n');
    for r in rows {
        out.push_str(&format!(
            "{:.16e},{},{},{:.16e}\n",
            r.gamma, r.state, r.measure, r.value
        ));
    }
    out
}

fn write_file(path: &Path, contents: &[u8]) -> Result<(), CliError> {
    let wrap = |source| CliError::Write {
        path: path.to_path_buf(),
        source,
    };
    let mut f = fs::File::create(path).map_err(wrap)?;
    f.write_all(contents).map_err(wrap)
}

fn chart_for(result: &SweepResult, m: Measure) -> String {
    let data: Vec<Series> = series(&result.rows, m)
        .into_iter()
        .map(|(label, pts)| Series {
            label,
            points: pts.into_iter().map(|(g, v)| (g, m.penalty(v))).collect(),
        })
        .collect();
    let title = format!("{} vs {} rate", m.penalty_label(), result.metadata.error);
    log_log_chart(&title, "gamma", m.penalty_label(), &data)
}

/// Writes the requested formats into `dir` and returns the paths written.
pub fn write_outputs(result: &SweepResult, formats: &[Format], dir: &Path) -> Result<Vec<PathBuf>, CliError> {
    fs::create_dir_all(dir).map_err(|source| CliError::Write {
        path: dir.to_path_buf(),
        source,
    })?;
    let mut written = Vec::new();
    for f in formats {
        match f {
            Format::Csv => {
                let path = dir.join("sweep.csv");
                write_file(&path, csv_string(&result.rows).as_bytes())?;
                written.push(path);
            }
            Format::Json => {
                let path = dir.join("sweep.json");
                let json = serde_json::to_string_pretty(&summary(result)).expect("summary serializes");
                write_file(&path, json.as_bytes())?;
                written.push(path);
            }
            Format::Svg => {
                for &m in &result.metadata.measures {
                    let path = dir.join(format!("sweep_{m}.svg"));
                    write_file(&path, chart_for(result, m).as_bytes())?;
                    written.push(path);
                }
            }
        }
    }
    Ok(written)
}
