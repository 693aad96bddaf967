//! CSV and JSON emission.

use std::fmt::Write as _;
use std::path::{Path, PathBuf};

use serde::Serialize;

use crate::error::{Error, Result};

use super::landscape::LandscapeReport;
use super::ser::SerReport;
use super::single::SingleTrace;

/// `%g`-style formatting with six significant digits.
pub fn format_sig6(v: f64) -> String {
    if v == 0.0 {
        return "0".into();
    }
    if !v.is_finite() {
        return v.to_string();
    }
    let sci = format!("{v:.5e}");
    let (mantissa, exp) = sci.split_once('e').expect("scientific format has an exponent");
    let exp: i32 = exp.parse().expect("exponent is an integer");
    let trim = |s: &str| -> String {
        if s.contains('.') {
            s.trim_end_matches('0').trim_end_matches('.').to_string()
        } else {
            s.to_string()
        }
    };
    if !(-4..6).contains(&exp) {
        let sign = if exp < 0 { '-' } else { '+' };
        format!("{}e{sign}{:02}", trim(mantissa), exp.abs())
    } else {
        let decimals = (5 - exp).max(0) as usize;
        trim(&format!("{v:.decimals$}"))
    }
}

pub trait Report: Serialize {
    fn csv(&self) -> String;

    fn json(&self) -> Result<String> {
        serde_json::to_string_pretty(self).map_err(|e| Error::Serde(e.to_string()))
    }
}

impl Report for SerReport {
    fn csv(&self) -> String {
        let mut out = String::from("detector,snr_db,trials,errors,ser,ci95\n");
        for c in &self.cells {
            let _ = writeln!(
                out,
                "{},{},{},{},{},{}",
                c.detector,
                format_sig6(c.snr_db),
                c.trials,
                c.errors,
                format_sig6(c.ser),
                format_sig6(c.ci95)
            );
        }
        out
    }
}

impl Report for LandscapeReport {
    fn csv(&self) -> String {
        let mut out = String::from("variant,gamma_max,beta_max,expected_cost\n");
        let r = self.axis.len();
        for l in &self.variants {
            for (i, &g) in self.axis.iter().enumerate() {
                for (j, &b) in self.axis.iter().enumerate() {
                    let _ = writeln!(
                        out,
                        "{},{},{},{}",
                        l.variant.name(),
                        format_sig6(g),
                        format_sig6(b),
                        format_sig6(l.values[i * r + j])
                    );
                }
            }
        }
        out
    }
}

impl Report for SingleTrace {
    fn csv(&self) -> String {
        let mut out = String::from("detector,energy,symbol_errors\n");
        for c in &self.classical {
            let _ = writeln!(out, "{},{},{}", c.detector, format_sig6(c.energy), c.symbol_errors);
        }
        for v in &self.variants {
            let _ = writeln!(out, "{},{},{}", v.variant.name(), format_sig6(v.energy), v.symbol_errors);
        }
        out
    }
}

fn write(path: &Path, text: &str) -> Result<()> {
    std::fs::write(path, text).map_err(|e| Error::io(path, e))
}

/// Writes `<dir>/<stem>.csv` and `<dir>/<stem>.json`, creating `dir`.
pub fn emit_report<R: Report>(report: &R, dir: &Path, stem: &str) -> Result<(PathBuf, PathBuf)> {
    std::fs::create_dir_all(dir).map_err(|e| Error::io(dir, e))?;
    let csv = dir.join(format!("{stem}.csv"));
    let json = dir.join(format!("{stem}.json"));
    write(&csv, &report.csv())?;
    write(&json, &report.json()?)?;
    Ok((csv, json))
}
