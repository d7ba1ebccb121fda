use std::collections::BTreeMap;
use std::fmt::Write as _;
use std::path::{Path, PathBuf};

use super::protocol::{EvalResult, Setting};
use crate::votemodel::ModelConfig;
use crate::{Error, Result};

pub const CSV_HEADER: &str = "model,setting,split,votes,accuracy";

/// Paths written by [`write_report`].
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ReportFiles {
    pub csv: PathBuf,
    pub table: PathBuf,
    pub json: PathBuf,
}

/// Canonical order: preset models first, then by name, setting and split.
pub fn sort_results(results: &mut [EvalResult]) {
    results.sort_by(|a, b| {
        (
            ModelConfig::report_rank(&a.model),
            &a.model,
            a.setting,
            &a.split,
        )
            .cmp(&(
                ModelConfig::report_rank(&b.model),
                &b.model,
                b.setting,
                &b.split,
            ))
    });
}

fn csv_field(s: &str) -> String {
    if s.contains([',', '"', '\n']) {
        format!("\"{}\"", s.replace('"', "\"\""))
    } else {
        s.to_string()
    }
}

pub fn render_csv(results: &[EvalResult]) -> String {
    let mut sorted = results.to_vec();
    sort_results(&mut sorted);
    let mut out = format!("{CSV_HEADER}\n");
    for r in &sorted {
        let _ = writeln!(
            out,
            "{},{},{},{},{:.4}",
            csv_field(&r.model),
            r.setting.as_str(),
            csv_field(&r.split),
            r.votes,
            r.accuracy
        );
    }
    out
}

/// Models as rows, `setting/split` as columns, accuracies in percent.
pub fn render_table(results: &[EvalResult]) -> String {
    let mut sorted = results.to_vec();
    sort_results(&mut sorted);
    let mut columns: Vec<(Setting, String)> = sorted
        .iter()
        .map(|r| (r.setting, r.split.clone()))
        .collect();
    columns.sort();
    columns.dedup();
    let mut rows: Vec<String> = Vec::new();
    let mut cells: BTreeMap<(String, Setting, String), f64> = BTreeMap::new();
    for r in &sorted {
        if !rows.contains(&r.model) {
            rows.push(r.model.clone());
        }
        cells.insert((r.model.clone(), r.setting, r.split.clone()), r.accuracy);
    }
    let headers: Vec<String> = columns
        .iter()
        .map(|(s, split)| format!("{}/{split}", s.as_str()))
        .collect();
    let name_width = rows.iter().map(String::len).chain([5]).max().unwrap_or(5);
    let widths: Vec<usize> = headers.iter().map(|h| h.len().max(6)).collect();
    let mut out = format!("{:<name_width$}", "model");
    for (h, w) in headers.iter().zip(&widths) {
        let _ = write!(out, "  {h:>w$}");
    }
    out.push('\n');
    for model in &rows {
        let _ = write!(out, "{model:<name_width$}");
        for ((setting, split), w) in columns.iter().zip(&widths) {
            let cell = cells
                .get(&(model.clone(), *setting, split.clone()))
                .map_or("-".to_string(), |a| format!("{:.2}", 100.0 * a));
            let _ = write!(out, "  {cell:>w$}");
        }
        out.push('\n');
    }
    out
}

pub fn render_json(results: &[EvalResult]) -> Result<String> {
    let mut sorted = results.to_vec();
    sort_results(&mut sorted);
    Ok(serde_json::to_string_pretty(&sorted)? + "\n")
}

/// Writes `<stem>.csv`, `<stem>.txt` and `<stem>.json` into `dir`.
pub fn write_report(results: &[EvalResult], dir: &Path, stem: &str) -> Result<ReportFiles> {
    if results.is_empty() {
        log::warn!("no evaluation results; writing header-only report");
    }
    std::fs::create_dir_all(dir).map_err(|e| Error::io(dir, e))?;
    let files = ReportFiles {
        csv: dir.join(format!("{stem}.csv")),
        table: dir.join(format!("{stem}.txt")),
        json: dir.join(format!("{stem}.json")),
    };
    for (path, body) in [
        (&files.csv, render_csv(results)),
        (&files.table, render_table(results)),
        (&files.json, render_json(results)?),
    ] {
        std::fs::write(path, body).map_err(|e| Error::io(path, e))?;
    }
    Ok(files)
}

/// Reads back a JSON results blob.
pub fn read_results(path: &Path) -> Result<Vec<EvalResult>> {
    let text = std::fs::read_to_string(path).map_err(|e| Error::io(path, e))?;
    Ok(serde_json::from_str(&text)?)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn r(model: &str, split: &str, acc: f64) -> EvalResult {
        EvalResult {
            model: model.into(),
            setting: Setting::OutOfSession,
            split: split.into(),
            votes: 10,
            accuracy: acc,
        }
    }

    #[test]
    fn two_by_two_grid() {
        let results = vec![
            r("MWE", "b", 0.5),
            r("Guess Yes", "a", 0.61066),
            r("MWE", "a", 0.7),
            r("Guess Yes", "b", 0.6),
        ];
        let csv = render_csv(&results);
        assert_eq!(
            csv,
            "model,setting,split,votes,accuracy\n\
             Guess Yes,out_of_session,a,10,0.6107\n\
             Guess Yes,out_of_session,b,10,0.6000\n\
             MWE,out_of_session,a,10,0.7000\n\
             MWE,out_of_session,b,10,0.5000\n"
        );
        let table = render_table(&results);
        let lines: Vec<&str> = table.lines().collect();
        assert_eq!(lines.len(), 3);
        assert!(lines[1].starts_with("Guess Yes") && lines[1].contains("61.07"));
    }

    #[test]
    fn empty_results_give_header_only() {
        assert_eq!(render_csv(&[]), format!("{CSV_HEADER}\n"));
        assert_eq!(render_table(&[]).lines().count(), 1);
    }

    #[test]
    fn output_is_order_independent() {
        let a = vec![r("CNN", "x", 0.1), r("MWE", "x", 0.2)];
        let b = vec![r("MWE", "x", 0.2), r("CNN", "x", 0.1)];
        assert_eq!(render_csv(&a), render_csv(&b));
        assert_eq!(render_json(&a).unwrap(), render_json(&b).unwrap());
    }
}
