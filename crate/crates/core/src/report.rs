//! CSV / JSON report emission.
//!
//! The data section of a report is a pure function of (seed, samples,
//! parameters): floats are written in shortest round-trip form and rows are
//! emitted in deterministic order, so same-seed runs are byte-identical
//! regardless of worker count.

use crate::params::CaseTag;
use crate::Result;
use serde::{Deserialize, Serialize};
use std::path::Path;

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct ReportRow {
    pub family: String,
    #[serde(rename = "case")]
    pub case_tag: Option<CaseTag>,
    pub n: Option<usize>,
    pub r: Option<f64>,
    pub p: Option<f64>,
    pub t: Option<f64>,
    pub statistic: String,
    pub point: f64,
    pub ci_low: Option<f64>,
    pub ci_high: Option<f64>,
    pub target: Option<f64>,
    pub pass: bool,
}

impl ReportRow {
    fn csv_line(&self) -> String {
        fn opt<T: std::fmt::Display>(v: &Option<T>) -> String {
            v.as_ref().map(|x| x.to_string()).unwrap_or_default()
        }
        format!(
            "{},{},{},{},{},{},{},{},{},{},{},{}",
            self.family,
            self.case_tag.map(|c| c.name()).unwrap_or(""),
            opt(&self.n),
            opt(&self.r),
            opt(&self.p),
            opt(&self.t),
            self.statistic.replace(',', ";"),
            self.point,
            opt(&self.ci_low),
            opt(&self.ci_high),
            opt(&self.target),
            self.pass
        )
    }
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct Report {
    pub seed: u64,
    pub samples: usize,
    pub rows: Vec<ReportRow>,
}

impl Report {
    pub fn new(seed: u64, samples: usize) -> Self {
        Self { seed, samples, rows: Vec::new() }
    }

    pub fn all_pass(&self) -> bool {
        self.rows.iter().all(|r| r.pass)
    }

    pub fn failures(&self) -> impl Iterator<Item = &ReportRow> {
        self.rows.iter().filter(|r| !r.pass)
    }

    pub fn csv_string(&self) -> String {
        let mut out = String::new();
        out.push_str(&format!("# seed={} samples={}\n", self.seed, self.samples));
        out.push_str("family,case,n,r,p,t,statistic,point,ci_low,ci_high,target,pass\n");
        for row in &self.rows {
            out.push_str(&row.csv_line());
            out.push('\n');
        }
        out
    }

    pub fn write_csv(&self, path: &Path) -> Result<()> {
        if let Some(dir) = path.parent() {
            if !dir.as_os_str().is_empty() {
                std::fs::create_dir_all(dir)?;
            }
        }
        std::fs::write(path, self.csv_string())?;
        Ok(())
    }

    pub fn write_json(&self, path: &Path) -> Result<()> {
        if let Some(dir) = path.parent() {
            if !dir.as_os_str().is_empty() {
                std::fs::create_dir_all(dir)?;
            }
        }
        std::fs::write(path, serde_json::to_string_pretty(self)?)?;
        Ok(())
    }
}

/// Convenience builder for rows keyed by a parameter point.
pub fn row(family: &str, statistic: String, point: f64, pass: bool) -> ReportRow {
    ReportRow {
        family: family.to_string(),
        case_tag: None,
        n: None,
        r: None,
        p: None,
        t: None,
        statistic,
        point,
        ci_low: None,
        ci_high: None,
        target: None,
        pass,
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn csv_shape() {
        let mut rep = Report::new(7, 100);
        rep.rows.push(ReportRow {
            family: "demo".into(),
            case_tag: Some(CaseTag::III),
            n: Some(100),
            r: Some(0.1),
            p: Some(1.2),
            t: Some(2.0),
            statistic: "coverage, upper".into(),
            point: 0.25,
            ci_low: Some(0.2),
            ci_high: Some(0.3),
            target: Some(0.27),
            pass: true,
        });
        let csv = rep.csv_string();
        let mut lines = csv.lines();
        assert_eq!(lines.next().unwrap(), "# seed=7 samples=100");
        assert_eq!(
            lines.next().unwrap(),
            "family,case,n,r,p,t,statistic,point,ci_low,ci_high,target,pass"
        );
        assert_eq!(
            lines.next().unwrap(),
            "demo,III,100,0.1,1.2,2,coverage; upper,0.25,0.2,0.3,0.27,true"
        );
    }
}
