//! The loop-phase table: one row per (loop, charge).

use std::f64::consts::PI;
use std::io::Write;

use serde_json::json;

use prepot::aharonov::ab_phase_report;
use prepot::{ChargeSystem, Path};

use crate::error::CliResult;
use crate::grid::fmt_f64;
use crate::scenario::{Format, SCHEMA_VERSION};

pub const LOOP_COLUMNS: [&str; 10] = [
    "loop",
    "charge",
    "status",
    "re_delta_s",
    "im_delta_s",
    "winding",
    "delta_s_over_2pi_i_q",
    "residual",
    "samples",
    "message",
];

#[derive(Debug, Clone, PartialEq)]
pub struct LoopRow {
    pub name: String,
    pub charge: usize,
    pub outcome: Result<LoopValues, String>,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct LoopValues {
    pub delta_s: [f64; 2],
    pub winding: i64,
    pub ratio: f64,
    pub residual: f64,
    pub samples: usize,
    pub ok: bool,
}

impl LoopRow {
    pub fn status(&self) -> &'static str {
        match &self.outcome {
            Ok(v) if v.ok => "OK",
            Ok(_) => "FAIL",
            Err(_) => "ERROR",
        }
    }
}

pub fn loop_table(system: &ChargeSystem, loops: &[(String, Path)]) -> Vec<LoopRow> {
    let mut rows = Vec::new();
    for (name, path) in loops {
        for (i, ch) in system.charges().iter().enumerate() {
            let outcome = ab_phase_report(ch, path)
                .map(|r| LoopValues {
                    delta_s: [r.delta_s.re, r.delta_s.im],
                    winding: r.winding,
                    ratio: r.delta_s.im / (2.0 * PI * ch.q),
                    residual: r.residual,
                    samples: r.samples_used,
                    ok: r.ok(),
                })
                .map_err(|e| e.to_string());
            rows.push(LoopRow {
                name: name.clone(),
                charge: i,
                outcome,
            });
        }
    }
    rows
}

pub fn write_loop_rows<W: Write>(rows: &[LoopRow], format: Format, mut out: W) -> CliResult<()> {
    match format {
        Format::Csv => {
            let mut w = csv::Writer::from_writer(out);
            w.write_record(LOOP_COLUMNS)?;
            for r in rows {
                let mut rec = vec![r.name.clone(), r.charge.to_string(), r.status().to_string()];
                match &r.outcome {
                    Ok(v) => {
                        rec.extend([
                            fmt_f64(v.delta_s[0]),
                            fmt_f64(v.delta_s[1]),
                            v.winding.to_string(),
                            fmt_f64(v.ratio),
                            fmt_f64(v.residual),
                            v.samples.to_string(),
                            String::new(),
                        ]);
                    }
                    Err(msg) => {
                        rec.extend(std::iter::repeat_n(String::new(), 6));
                        rec.push(msg.clone());
                    }
                }
                w.write_record(&rec)?;
            }
            w.flush()?;
        }
        Format::Json => {
            for r in rows {
                let rec = match &r.outcome {
                    Ok(v) => json!({
                        "schema_version": SCHEMA_VERSION,
                        "loop": r.name, "charge": r.charge, "status": r.status(),
                        "re_delta_s": v.delta_s[0], "im_delta_s": v.delta_s[1],
                        "winding": v.winding, "delta_s_over_2pi_i_q": v.ratio,
                        "residual": v.residual, "samples": v.samples, "message": null,
                    }),
                    Err(msg) => json!({
                        "schema_version": SCHEMA_VERSION,
                        "loop": r.name, "charge": r.charge, "status": r.status(),
                        "re_delta_s": null, "im_delta_s": null, "winding": null,
                        "delta_s_over_2pi_i_q": null, "residual": null, "samples": null,
                        "message": msg,
                    }),
                };
                serde_json::to_writer(&mut out, &rec).map_err(std::io::Error::from)?;
                out.write_all(b"\n")?;
            }
            out.flush()?;
        }
    }
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;
    use prepot::{Charge, FourVector};

    #[test]
    fn three_loops_and_an_error() {
        let sys = ChargeSystem::single(Charge::at_rest(2.0, [0.0; 3]).unwrap());
        let c = FourVector::new(0.0, 0.0, 0.0, 1.0);
        let loops = vec![
            ("a".to_string(), Path::circle(c, 1.0, 1, 32).unwrap()),
            (
                "b".to_string(),
                Path::circle(FourVector::new(0.0, 4.0, 0.0, 1.0), 1.0, 1, 32).unwrap(),
            ),
            ("c".to_string(), Path::circle(c, 0.5, -2, 32).unwrap()),
            (
                "through".to_string(),
                Path::new(
                    vec![
                        FourVector::new(0.0, 1.0, 0.0, 1.0),
                        c,
                        FourVector::new(0.0, 0.0, 1.0, 1.0),
                    ],
                    true,
                )
                .unwrap(),
            ),
        ];
        let rows = loop_table(&sys, &loops);
        let ratios: Vec<f64> = rows[..3]
            .iter()
            .map(|r| r.outcome.as_ref().unwrap().ratio)
            .collect();
        assert!((ratios[0] + 1.0).abs() < 1e-12);
        assert!(ratios[1].abs() < 1e-12);
        assert!((ratios[2] - 2.0).abs() < 1e-12);
        assert_eq!(rows[3].status(), "ERROR");

        let mut buf = Vec::new();
        write_loop_rows(&rows, Format::Csv, &mut buf).unwrap();
        let text = String::from_utf8(buf).unwrap();
        assert_eq!(text.lines().count(), 5);
        assert!(text.lines().nth(4).unwrap().starts_with("through,0,ERROR,"));
    }

    #[test]
    fn empty_table_has_header_only() {
        let sys = ChargeSystem::single(Charge::at_rest(1.0, [0.0; 3]).unwrap());
        let mut buf = Vec::new();
        write_loop_rows(&loop_table(&sys, &[]), Format::Csv, &mut buf).unwrap();
        assert_eq!(
            String::from_utf8(buf).unwrap(),
            LOOP_COLUMNS.join(",") + "\n"
        );
    }
}
