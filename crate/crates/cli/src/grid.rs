//! Field-grid evaluation and export.

use std::io::Write;

use rayon::prelude::*;
use serde_json::{json, Value};

use prepot::faraday::evaluate_point;
use prepot::field::StencilOptions;
use prepot::{ChargeSystem, Error, FourVector};

use crate::error::CliResult;
use crate::scenario::{Format, SCHEMA_VERSION};

pub const GRID_COLUMNS: [&str; 17] = [
    "t",
    "x",
    "y",
    "z",
    "masked",
    "mask_reason",
    "re_s",
    "im_s",
    "e1",
    "e2",
    "e3",
    "b1",
    "b2",
    "b3",
    "wave_residual",
    "laplacian_residual",
    "stencil_scale",
];

/// One grid cell. `values` is `None` for masked cells.
#[derive(Debug, Clone, PartialEq)]
pub struct GridRow {
    pub point: FourVector,
    pub values: Option<CellValues>,
    pub mask_reason: Option<&'static str>,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct CellValues {
    pub s: [f64; 2],
    pub e: [f64; 3],
    pub b: [f64; 3],
    pub wave_residual: f64,
    pub laplacian_residual: f64,
    pub stencil_scale: f64,
}

/// Short sentinel for the reason a cell could not be evaluated.
pub fn mask_reason(err: &Error) -> &'static str {
    match err.root() {
        Error::SingularAxis | Error::SingularStencil { .. } => "singular-axis",
        Error::ObserverOnWorldLine => "on-world-line",
        Error::NoRetardedIntersection(_) => "no-retarded-intersection",
        Error::StepTooLarge { .. } => "step-too-large",
        _ => "evaluation-error",
    }
}

pub fn evaluate_cell(system: &ChargeSystem, x: &FourVector, opts: &StencilOptions) -> GridRow {
    let result = prepot::ScalarField::length_scale(system, x)
        .and_then(|scale| evaluate_point(system, x, opts).map(|p| (p, scale)));
    match result {
        Ok((p, scale)) => GridRow {
            point: *x,
            values: Some(CellValues {
                s: [p.s.re, p.s.im],
                e: p.field.e(),
                b: p.field.b(),
                wave_residual: p.wave_residual.norm(),
                laplacian_residual: p.laplacian.norm(),
                stencil_scale: scale,
            }),
            mask_reason: None,
        },
        Err(e) => GridRow {
            point: *x,
            values: None,
            mask_reason: Some(mask_reason(&e)),
        },
    }
}

/// Evaluates every point in parallel; rows come back in input order.
pub fn evaluate_grid(
    system: &ChargeSystem,
    points: &[FourVector],
    opts: &StencilOptions,
) -> Vec<GridRow> {
    points
        .par_iter()
        .map(|x| evaluate_cell(system, x, opts))
        .collect()
}

pub fn masked_count(rows: &[GridRow]) -> usize {
    rows.iter().filter(|r| r.values.is_none()).count()
}

/// 17 significant digits, round-trip safe.
pub fn fmt_f64(v: f64) -> String {
    format!("{v:.16e}")
}

pub fn write_rows<W: Write>(rows: &[GridRow], format: Format, out: W) -> CliResult<()> {
    match format {
        Format::Csv => write_csv(rows, out),
        Format::Json => write_json(rows, out),
    }
}

fn write_csv<W: Write>(rows: &[GridRow], out: W) -> CliResult<()> {
    let mut w = csv::Writer::from_writer(out);
    w.write_record(GRID_COLUMNS)?;
    for row in rows {
        let p = row.point;
        let mut rec: Vec<String> = [p.x0, p.x1, p.x2, p.x3]
            .iter()
            .map(|v| fmt_f64(*v))
            .collect();
        rec.push(if row.values.is_some() { "0" } else { "1" }.into());
        rec.push(row.mask_reason.unwrap_or("").into());
        match &row.values {
            Some(v) => {
                let nums = v.s.iter().chain(&v.e).chain(&v.b).chain([
                    &v.wave_residual,
                    &v.laplacian_residual,
                    &v.stencil_scale,
                ]);
                rec.extend(nums.map(|x| fmt_f64(*x)));
            }
            None => rec.extend(std::iter::repeat_n(String::new(), GRID_COLUMNS.len() - 6)),
        }
        w.write_record(&rec)?;
    }
    w.flush()?;
    Ok(())
}

fn num(v: f64) -> Value {
    // serde_json writes the shortest round-trip representation
    json!(v)
}

fn write_json<W: Write>(rows: &[GridRow], mut out: W) -> CliResult<()> {
    for row in rows {
        let p = row.point;
        let mut obj = serde_json::Map::new();
        obj.insert("schema_version".into(), json!(SCHEMA_VERSION));
        for (k, v) in ["t", "x", "y", "z"].iter().zip([p.x0, p.x1, p.x2, p.x3]) {
            obj.insert((*k).into(), num(v));
        }
        obj.insert("masked".into(), json!(row.values.is_none()));
        obj.insert("mask_reason".into(), json!(row.mask_reason));
        let values: Vec<Option<f64>> = match &row.values {
            Some(v) => {
                v.s.iter()
                    .chain(&v.e)
                    .chain(&v.b)
                    .chain([&v.wave_residual, &v.laplacian_residual, &v.stencil_scale])
                    .map(|x| Some(*x))
                    .collect()
            }
            None => vec![None; GRID_COLUMNS.len() - 6],
        };
        for (k, v) in GRID_COLUMNS[6..].iter().zip(values) {
            obj.insert((*k).into(), v.map_or(Value::Null, num));
        }
        serde_json::to_writer(&mut out, &Value::Object(obj)).map_err(std::io::Error::from)?;
        out.write_all(b"\n")?;
    }
    out.flush()?;
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;
    use prepot::Charge;

    fn system() -> ChargeSystem {
        ChargeSystem::single(Charge::at_rest(1.0, [0.0; 3]).unwrap())
    }

    #[test]
    fn axis_cells_are_masked_not_dropped() {
        let pts = vec![
            FourVector::new(0.0, 0.0, 0.0, 1.0),
            FourVector::new(0.0, 1.0, 0.0, 0.0),
        ];
        let rows = evaluate_grid(&system(), &pts, &StencilOptions::default());
        assert_eq!(rows.len(), 2);
        assert_eq!(rows[0].mask_reason, Some("singular-axis"));
        assert!(rows[1].values.is_some());
        assert_eq!(masked_count(&rows), 1);

        let mut buf = Vec::new();
        write_rows(&rows, Format::Csv, &mut buf).unwrap();
        let text = String::from_utf8(buf).unwrap();
        let lines: Vec<&str> = text.lines().collect();
        assert_eq!(lines.len(), 3);
        assert_eq!(lines[0], GRID_COLUMNS.join(","));
        assert!(lines[1].contains(",1,singular-axis,"));
        assert_eq!(lines[2].split(',').count(), GRID_COLUMNS.len());
    }

    #[test]
    fn json_records_carry_schema_version() {
        let pts = vec![
            FourVector::new(0.0, 0.0, 0.0, 0.0),
            FourVector::new(0.0, 2.0, 0.0, 0.0),
        ];
        let rows = evaluate_grid(&system(), &pts, &StencilOptions::default());
        let mut buf = Vec::new();
        write_rows(&rows, Format::Json, &mut buf).unwrap();
        let recs: Vec<Value> = String::from_utf8(buf)
            .unwrap()
            .lines()
            .map(|l| serde_json::from_str(l).unwrap())
            .collect();
        assert_eq!(recs.len(), 2);
        assert_eq!(recs[0]["schema_version"], 1);
        assert_eq!(recs[0]["mask_reason"], "on-world-line");
        assert!(recs[0]["e1"].is_null());
        assert!((recs[1]["e1"].as_f64().unwrap() - 0.25).abs() < 1e-9);
    }

    #[test]
    fn float_format_round_trips() {
        for v in [0.1, -1.0 / 3.0, 6.02214076e23, 5e-324] {
            assert_eq!(fmt_f64(v).parse::<f64>().unwrap(), v);
        }
    }
}
