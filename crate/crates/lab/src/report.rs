use std::collections::BTreeMap;
use std::path::{Path, PathBuf};

use serde::{Deserialize, Serialize};
use serde_json::Value;

use crate::config::ResolvedConfig;
use crate::error::Result;
use crate::svg::Chart;

/// One asserted comparison. `anchor` names the property being checked.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Flag {
    pub name: String,
    pub pass: bool,
    pub measured: f64,
    pub bound: f64,
    /// `"<="`, `">="` or `"=="` with the tolerance in `bound`.
    pub relation: String,
    pub anchor: String,
}

impl Flag {
    pub fn at_most(name: &str, measured: f64, bound: f64, anchor: &str) -> Self {
        Self::new(name, measured <= bound, measured, bound, "<=", anchor)
    }

    pub fn at_least(name: &str, measured: f64, bound: f64, anchor: &str) -> Self {
        Self::new(name, measured >= bound, measured, bound, ">=", anchor)
    }

    /// `|measured − target| ≤ tol`; `bound` records the target.
    pub fn near(name: &str, measured: f64, target: f64, tol: f64, anchor: &str) -> Self {
        Self::new(name, (measured - target).abs() <= tol, measured, target, &format!("== (±{tol:e})"), anchor)
    }

    fn new(name: &str, pass: bool, measured: f64, bound: f64, relation: &str, anchor: &str) -> Self {
        Self {
            name: name.into(),
            pass,
            measured,
            bound,
            relation: relation.into(),
            anchor: anchor.into(),
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Report {
    pub tool: String,
    pub version: String,
    pub config: ResolvedConfig,
    pub metrics: BTreeMap<String, Value>,
    pub flags: Vec<Flag>,
    pub wall_clock_seconds: f64,
}

impl Report {
    pub fn all_pass(&self) -> bool {
        self.flags.iter().all(|f| f.pass)
    }

    /// JSON with the timing field zeroed; equal configs give equal bytes.
    pub fn canonical_json(&self) -> Result<String> {
        let mut copy = self.clone();
        copy.wall_clock_seconds = 0.0;
        Ok(serde_json::to_string_pretty(&copy)?)
    }
}

/// Everything an experiment produces.
#[derive(Debug)]
pub struct RunOutput {
    pub report: Report,
    /// Per-trial rows for the optional CSV, all with the same keys.
    pub rows: Vec<BTreeMap<String, String>>,
    pub chart: Option<Chart>,
}

impl RunOutput {
    /// Writes `<name>.json` and, if enabled, `.csv` and `.svg` into `dir`.
    pub fn write(&self, dir: &Path, csv: bool, svg: bool) -> Result<Vec<PathBuf>> {
        std::fs::create_dir_all(dir)?;
        let stem = self.report.config.experiment.name();
        let mut written = Vec::new();
        let json = dir.join(format!("{stem}.json"));
        std::fs::write(&json, serde_json::to_string_pretty(&self.report)?)?;
        written.push(json);
        if csv && !self.rows.is_empty() {
            let path = dir.join(format!("{stem}.csv"));
            let mut w = csv::Writer::from_path(&path)?;
            w.write_record(self.rows[0].keys())?;
            for row in &self.rows {
                w.write_record(row.values())?;
            }
            w.flush()?;
            written.push(path);
        }
        if let (true, Some(chart)) = (svg, &self.chart) {
            let path = dir.join(format!("{stem}.svg"));
            std::fs::write(&path, chart.render())?;
            written.push(path);
        }
        Ok(written)
    }
}
