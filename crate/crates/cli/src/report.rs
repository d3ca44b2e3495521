//! Verification run reports.

use std::io::Write;

use serde::Serialize;

use crate::checks::CheckResult;
use crate::error::CliResult;
use crate::scenario::{Format, SCHEMA_VERSION};

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct RunReport {
    pub schema_version: u32,
    pub seed: u64,
    pub tolerance_scale: f64,
    pub checks: Vec<CheckResult>,
}

impl RunReport {
    pub fn passed(&self) -> bool {
        self.checks.iter().all(|c| c.passed)
    }

    pub fn write<W: Write>(&self, format: Format, mut out: W) -> CliResult<()> {
        match format {
            Format::Json => {
                serde_json::to_writer_pretty(&mut out, self).map_err(std::io::Error::from)?;
                out.write_all(b"\n")?;
            }
            Format::Csv => {
                let mut w = csv::Writer::from_writer(out);
                w.write_record([
                    "check",
                    "leg",
                    "max_deviation",
                    "tolerance",
                    "samples",
                    "passed",
                ])?;
                for c in &self.checks {
                    for l in &c.legs {
                        w.write_record([
                            c.name.clone(),
                            l.name.clone(),
                            format!("{:.16e}", l.max_deviation),
                            format!("{:.16e}", l.tolerance),
                            l.samples.to_string(),
                            l.passed.to_string(),
                        ])?;
                    }
                }
                w.flush()?;
            }
        }
        Ok(())
    }

    /// Human-readable summary.
    pub fn write_text<W: Write>(&self, mut out: W) -> CliResult<()> {
        for c in &self.checks {
            writeln!(
                out,
                "{} {} ({:.0} ms)",
                if c.passed { "PASS" } else { "FAIL" },
                c.name,
                c.elapsed_ms
            )?;
            for l in &c.legs {
                writeln!(
                    out,
                    "    {} {:<55} max {:.3e}  tol {:.1e}  n={}",
                    if l.passed { "ok  " } else { "FAIL" },
                    l.name,
                    l.max_deviation,
                    l.tolerance,
                    l.samples
                )?;
            }
            for n in &c.notes {
                writeln!(out, "    note: {n}")?;
            }
        }
        let failed = self.checks.iter().filter(|c| !c.passed).count();
        writeln!(
            out,
            "{} of {} checks passed",
            self.checks.len() - failed,
            self.checks.len()
        )?;
        Ok(())
    }
}

pub fn new_report(seed: u64, tolerance_scale: f64, checks: Vec<CheckResult>) -> RunReport {
    RunReport {
        schema_version: SCHEMA_VERSION,
        seed,
        tolerance_scale,
        checks,
    }
}
