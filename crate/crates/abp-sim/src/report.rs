//! Tabular experiment output: one row per (configuration point, metric),
//! serializable as CSV (the interchange contract) or JSON.

use serde::{Deserialize, Serialize};
use std::io::Write;

/// A single result row. `params` echoes the configuration point as a compact
/// `key=value;key=value` string so every row is self-describing and
/// regenerable from `(config, seed)`.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct ReportRow {
    pub params: String,
    pub metric: String,
    pub value: f64,
    pub trials: u64,
    pub seed: u64,
}

/// All rows produced by one experiment run.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct MetricReport {
    pub experiment: String,
    pub rows: Vec<ReportRow>,
}

impl MetricReport {
    pub fn new(experiment: impl Into<String>) -> Self {
        Self {
            experiment: experiment.into(),
            rows: Vec::new(),
        }
    }

    pub fn push(
        &mut self,
        params: impl Into<String>,
        metric: impl Into<String>,
        value: f64,
        trials: u64,
        seed: u64,
    ) {
        self.rows.push(ReportRow {
            params: params.into(),
            metric: metric.into(),
            value,
            trials,
            seed,
        });
    }

    /// First row whose params contain `params_fragment` and whose metric
    /// matches exactly. Convenience for assertions.
    pub fn value(&self, params_fragment: &str, metric: &str) -> Option<f64> {
        self.rows
            .iter()
            .find(|r| r.metric == metric && r.params.contains(params_fragment))
            .map(|r| r.value)
    }

    /// UTF-8 CSV with a header row; `.` is the decimal separator by virtue
    /// of standard float formatting.
    pub fn write_csv<W: Write>(&self, writer: W) -> csv::Result<()> {
        let mut w = csv::Writer::from_writer(writer);
        w.write_record(["experiment", "params", "metric", "value", "trials", "seed"])?;
        for row in &self.rows {
            w.write_record([
                self.experiment.as_str(),
                row.params.as_str(),
                row.metric.as_str(),
                &format!("{}", row.value),
                &row.trials.to_string(),
                &row.seed.to_string(),
            ])?;
        }
        w.flush()?;
        Ok(())
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("report is always serializable")
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn csv_has_header_and_rows() {
        let mut r = MetricReport::new("demo");
        r.push("n=8;snr_db=0", "mse", 0.125, 100, 7);
        let mut buf = Vec::new();
        r.write_csv(&mut buf).unwrap();
        let text = String::from_utf8(buf).unwrap();
        let mut lines = text.lines();
        assert_eq!(
            lines.next().unwrap(),
            "experiment,params,metric,value,trials,seed"
        );
        assert_eq!(lines.next().unwrap(), "demo,n=8;snr_db=0,mse,0.125,100,7");
    }

    #[test]
    fn lookup_by_fragment() {
        let mut r = MetricReport::new("demo");
        r.push("n=8;snr_db=0", "mse", 1.0, 1, 0);
        r.push("n=16;snr_db=0", "mse", 2.0, 1, 0);
        assert_eq!(r.value("n=16", "mse"), Some(2.0));
        assert_eq!(r.value("n=32", "mse"), None);
    }
}
