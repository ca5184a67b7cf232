use std::collections::BTreeMap;
use std::path::Path;

use serde_json::{json, Map, Value};

use crate::error::{Error, Result};
use crate::metrics::MetricResult;

/// On-disk layout for a metrics report.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum ReportFormat {
    Json,
    Csv,
}

impl std::str::FromStr for ReportFormat {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "json" => Ok(ReportFormat::Json),
            "csv" => Ok(ReportFormat::Csv),
            other => Err(Error::Config(format!(
                "unknown report format `{other}`, expected `json` or `csv`"
            ))),
        }
    }
}

/// Renders results as a JSON object keyed by metric name:
/// `{"auc_roc": {"mean": ..., "n_excluded": ..., "normalized": ...,
/// "per_sample": [...]}, ...}`. Keys are sorted, so equal results give
/// byte-identical output.
pub fn render_json(results: &BTreeMap<String, MetricResult>) -> String {
    let mut root = Map::new();
    for (name, r) in results {
        root.insert(
            name.clone(),
            json!({
                "mean": r.mean,
                "n_excluded": r.n_excluded,
                "normalized": r.normalized,
                "per_sample": r.per_sample,
            }),
        );
    }
    let mut text = serde_json::to_string_pretty(&Value::Object(root)).expect("plain values");
    text.push('\n');
    text
}

/// Renders results as CSV: a header, one `sample` row per retained score
/// (indexed by its position among retained scores), then `mean` and
/// `n_excluded` summary rows per metric.
pub fn render_csv(results: &BTreeMap<String, MetricResult>) -> String {
    let mut out = String::from("metric,row_type,index,value\r\n");
    for (name, r) in results {
        let name = csv_field(name);
        for (i, score) in r.per_sample.iter().enumerate() {
            out.push_str(&format!("{name},sample,{i},{}\r\n", fmt(*score)));
        }
        out.push_str(&format!("{name},mean,,{}\r\n", fmt(r.mean)));
        out.push_str(&format!("{name},n_excluded,,{}\r\n", r.n_excluded));
    }
    out
}

fn fmt(v: f64) -> String {
    // shortest representation that parses back to the same f64
    format!("{v:?}")
}

fn csv_field(s: &str) -> String {
    if s.contains([',', '"', '\n', '\r']) {
        format!("\"{}\"", s.replace('"', "\"\""))
    } else {
        s.to_string()
    }
}

/// Writes a report in the chosen format.
pub fn write_report(
    results: &BTreeMap<String, MetricResult>,
    path: impl AsRef<Path>,
    format: ReportFormat,
) -> Result<()> {
    let path = path.as_ref();
    let text = match format {
        ReportFormat::Json => render_json(results),
        ReportFormat::Csv => render_csv(results),
    };
    std::fs::write(path, text).map_err(|e| Error::io(path, e))
}

#[cfg(test)]
mod tests {
    use super::*;

    fn sample_results() -> BTreeMap<String, MetricResult> {
        let mut results = BTreeMap::new();
        results.insert(
            "auc_roc".to_string(),
            MetricResult {
                metric_name: "auc_roc".into(),
                per_sample: vec![1.0, 0.5],
                mean: 0.75,
                n_excluded: 1,
                normalized: false,
            },
        );
        results.insert(
            "mae".to_string(),
            MetricResult {
                metric_name: "mae".into(),
                per_sample: vec![0.25, 0.15, 0.2],
                mean: 0.2,
                n_excluded: 0,
                normalized: false,
            },
        );
        results
    }

    #[test]
    fn json_report_shape() {
        let text = render_json(&sample_results());
        let value: serde_json::Value = serde_json::from_str(&text).unwrap();
        assert_eq!(value["auc_roc"]["mean"], 0.75);
        assert_eq!(value["auc_roc"]["n_excluded"], 1);
        assert_eq!(value["auc_roc"]["normalized"], false);
        assert_eq!(value["mae"]["per_sample"].as_array().unwrap().len(), 3);
        // deterministic output
        assert_eq!(text, render_json(&sample_results()));
    }

    #[test]
    fn csv_report_parses_back() {
        let text = render_csv(&sample_results());
        let mut lines = text.lines();
        assert_eq!(lines.next(), Some("metric,row_type,index,value"));
        let mut means = BTreeMap::new();
        let mut sample_rows = 0;
        for line in lines {
            let fields: Vec<&str> = line.split(',').collect();
            assert_eq!(fields.len(), 4, "{line}");
            match fields[1] {
                "sample" => sample_rows += 1,
                "mean" => {
                    means.insert(fields[0].to_string(), fields[3].parse::<f64>().unwrap());
                }
                "n_excluded" => {
                    fields[3].parse::<usize>().unwrap();
                }
                other => panic!("unexpected row type {other}"),
            }
        }
        assert_eq!(sample_rows, 5);
        assert_eq!(means["auc_roc"], 0.75);
        assert_eq!(means["mae"], 0.2);
    }

    #[test]
    fn empty_results_render_valid_documents() {
        let empty = BTreeMap::new();
        assert_eq!(render_json(&empty), "{}\n");
        assert_eq!(render_csv(&empty), "metric,row_type,index,value\r\n");
    }

    #[test]
    fn csv_quotes_awkward_names() {
        assert_eq!(csv_field("plain"), "plain");
        assert_eq!(csv_field("a,b"), "\"a,b\"");
        assert_eq!(csv_field("say \"hi\""), "\"say \"\"hi\"\"\"");
    }

    #[test]
    fn files_written() {
        let dir = tempfile::tempdir().unwrap();
        let results = sample_results();
        let json_path = dir.path().join("report.json");
        let csv_path = dir.path().join("report.csv");
        write_report(&results, &json_path, ReportFormat::Json).unwrap();
        write_report(&results, &csv_path, ReportFormat::Csv).unwrap();
        assert!(std::fs::read_to_string(&json_path)
            .unwrap()
            .contains("\"auc_roc\""));
        assert!(std::fs::read_to_string(&csv_path)
            .unwrap()
            .starts_with("metric,"));
    }
}
