//! Verification report rows: analytic value vs Monte Carlo estimate per
//! rectangle, with fixed CSV columns
//! `model,cone,rect_kind,x,y,analytic,estimate,stderr,pass`.
//!
//! Findings (values where the published table disagrees with both the
//! normalization identity and the Monte Carlo evidence) are carried as
//! ordinary rows with a `finding:` prefix in the rect_kind column, so the
//! schema stays uniform across CSV and JSON.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct ReportRow {
    pub model: String,
    pub cone: String,
    pub rect_kind: String,
    pub x: f64,
    pub y: f64,
    pub analytic: f64,
    pub estimate: f64,
    pub stderr: f64,
    pub pass: bool,
}

impl ReportRow {
    pub fn is_finding(&self) -> bool {
        self.rect_kind.starts_with("finding:")
    }

    fn sort_key(&self) -> (String, String, String, u64, u64) {
        (
            self.model.clone(),
            self.cone.clone(),
            self.rect_kind.clone(),
            self.x.to_bits(),
            self.y.to_bits(),
        )
    }
}

#[derive(Clone, Debug, Default, Serialize, Deserialize)]
pub struct Report {
    pub rows: Vec<ReportRow>,
}

pub const CSV_HEADER: &str = "model,cone,rect_kind,x,y,analytic,estimate,stderr,pass";

impl Report {
    pub fn push(&mut self, row: ReportRow) {
        self.rows.push(row);
    }

    pub fn extend(&mut self, other: Report) {
        self.rows.extend(other.rows);
    }

    /// Stable ordering so identical runs produce identical bytes.
    pub fn sort(&mut self) {
        self.rows.sort_by_key(|r| r.sort_key());
    }

    pub fn all_pass(&self) -> bool {
        self.rows.iter().all(|r| r.pass)
    }

    pub fn failures(&self) -> impl Iterator<Item = &ReportRow> {
        self.rows.iter().filter(|r| !r.pass)
    }

    pub fn to_csv(&self) -> String {
        let mut out = String::from(CSV_HEADER);
        out.push('\n');
        for r in &self.rows {
            out.push_str(&format!(
                "{},{},{},{},{},{},{},{},{}\n",
                r.model, r.cone, r.rect_kind, r.x, r.y, r.analytic, r.estimate, r.stderr, r.pass
            ));
        }
        out
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("report serialization cannot fail")
    }

    pub fn from_csv(text: &str) -> Result<Report> {
        let mut rows = Vec::new();
        let mut lines = text.lines();
        match lines.next() {
            Some(h) if h.trim() == CSV_HEADER => {}
            other => {
                return Err(Error::InvalidInput(format!(
                    "bad report header: {other:?}"
                )))
            }
        }
        for (lineno, line) in lines.enumerate() {
            if line.trim().is_empty() {
                continue;
            }
            let parts: Vec<&str> = line.split(',').collect();
            if parts.len() != 9 {
                return Err(Error::InvalidInput(format!(
                    "report line {} has {} fields",
                    lineno + 2,
                    parts.len()
                )));
            }
            let parse_f = |s: &str| -> Result<f64> {
                s.parse::<f64>()
                    .map_err(|e| Error::InvalidInput(format!("bad float '{s}': {e}")))
            };
            rows.push(ReportRow {
                model: parts[0].to_string(),
                cone: parts[1].to_string(),
                rect_kind: parts[2].to_string(),
                x: parse_f(parts[3])?,
                y: parse_f(parts[4])?,
                analytic: parse_f(parts[5])?,
                estimate: parse_f(parts[6])?,
                stderr: parse_f(parts[7])?,
                pass: parts[8].trim() == "true",
            });
        }
        Ok(Report { rows })
    }

    pub fn from_json(text: &str) -> Result<Report> {
        serde_json::from_str(text)
            .map_err(|e| Error::InvalidInput(format!("bad JSON report: {e}")))
    }

    /// Parse either format, keyed on the first byte.
    pub fn parse(text: &str) -> Result<Report> {
        if text.trim_start().starts_with('{') {
            Report::from_json(text)
        } else {
            Report::from_csv(text)
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn sample_report() -> Report {
        let mut rep = Report::default();
        rep.push(ReportRow {
            model: "ex51".into(),
            cone: "upper".into(),
            rect_kind: "upper_rect".into(),
            x: 2.0,
            y: 1.0,
            analytic: 0.5,
            estimate: 0.497,
            stderr: 0.02,
            pass: true,
        });
        rep.push(ReportRow {
            model: "ex51".into(),
            cone: "upper".into(),
            rect_kind: "finding:atom_theta_half".into(),
            x: 0.49,
            y: 0.51,
            analytic: 1.0,
            estimate: 0.268,
            stderr: 0.0,
            pass: false,
        });
        rep
    }

    #[test]
    fn csv_round_trip() {
        let mut rep = sample_report();
        rep.sort();
        let text = rep.to_csv();
        let back = Report::parse(&text).unwrap();
        assert_eq!(back.rows.len(), 2);
        assert!(!back.all_pass());
        assert_eq!(back.failures().count(), 1);
        assert!(back.rows.iter().any(|r| r.is_finding()));
    }

    #[test]
    fn json_round_trip() {
        let rep = sample_report();
        let text = rep.to_json();
        let back = Report::parse(&text).unwrap();
        assert_eq!(back.rows.len(), rep.rows.len());
    }

    #[test]
    fn deterministic_bytes_after_sort() {
        let mut a = sample_report();
        let mut b = sample_report();
        b.rows.reverse();
        a.sort();
        b.sort();
        assert_eq!(a.to_csv(), b.to_csv());
    }
}
