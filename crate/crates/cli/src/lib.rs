//! Library side of the `prepot` command: scenario parsing, grid export,
//! verification families and loop-phase tables.

pub mod checks;
pub mod error;
pub mod grid;
pub mod loops;
pub mod report;
pub mod scenario;

use std::fs::File;
use std::io::{self, BufWriter, Write};
use std::path::{Path as FsPath, PathBuf};

use serde_json::json;

use prepot::algebra::{
    alpha, conjugation_c, rho, rho_bar, sigma, validate_relations, ComplexMatrix4,
};

use crate::checks::{run_check, CheckContext, CHECK_NAMES};
use crate::error::{CliError, CliResult, EXIT_OK, EXIT_RUNTIME, EXIT_VERIFY_FAILED};
use crate::report::{new_report, RunReport};
use crate::scenario::{Format, Scenario, DEFAULT_SEED};

/// Output settings after merging flags over the scenario's `output` block.
#[derive(Debug, Clone, Default)]
pub struct OutputChoice {
    pub format: Option<Format>,
    pub path: Option<PathBuf>,
}

impl OutputChoice {
    pub fn resolve(&self, scenario: Option<&Scenario>) -> (Format, Option<PathBuf>) {
        let spec = scenario.and_then(|s| s.output.as_ref());
        let format = self
            .format
            .or_else(|| spec.and_then(|o| o.format))
            .unwrap_or(Format::Csv);
        let path = self
            .path
            .clone()
            .or_else(|| spec.and_then(|o| o.path.as_ref().map(PathBuf::from)));
        (format, path)
    }
}

fn with_output<F>(path: Option<&FsPath>, f: F) -> CliResult<()>
where
    F: FnOnce(&mut dyn Write) -> CliResult<()>,
{
    match path {
        Some(p) => {
            let mut w = BufWriter::new(File::create(p)?);
            f(&mut w)?;
            w.flush()?;
        }
        None => {
            let stdout = io::stdout();
            let mut lock = stdout.lock();
            f(&mut lock)?;
        }
    }
    Ok(())
}

/// Evaluates the scenario grid and writes the dataset. Returns `(rows, masked)`.
pub fn cmd_field_grid(scenario: &Scenario, output: &OutputChoice) -> CliResult<(usize, usize)> {
    let grid = scenario
        .grid
        .as_ref()
        .ok_or_else(|| CliError::config("grid", "field-grid needs a `grid` block"))?;
    let system = scenario.system()?;
    let opts = scenario.stencil_options()?;
    let rows = grid::evaluate_grid(&system, &grid.points(), &opts);
    let (format, path) = output.resolve(Some(scenario));
    with_output(path.as_deref(), |w| grid::write_rows(&rows, format, w))?;
    Ok((rows.len(), grid::masked_count(&rows)))
}

/// Requested names in order, duplicates dropped; all families when empty.
pub fn resolve_checks(requested: &[String]) -> CliResult<Vec<&'static str>> {
    if requested.is_empty() {
        return Ok(CHECK_NAMES.to_vec());
    }
    let mut out: Vec<&'static str> = Vec::new();
    for name in requested {
        let known = CHECK_NAMES
            .iter()
            .find(|k| **k == name.as_str())
            .ok_or_else(|| CliError::UnknownCheck(name.clone()))?;
        if !out.contains(known) {
            out.push(known);
        }
    }
    Ok(out)
}

pub fn cmd_verify(
    requested: &[String],
    scenario: Option<&Scenario>,
    seed: Option<u64>,
    tolerance_scale: f64,
) -> CliResult<RunReport> {
    if !(tolerance_scale > 0.0 && tolerance_scale.is_finite()) {
        return Err(CliError::config(
            "--tolerance-scale",
            "must be positive and finite",
        ));
    }
    let names = if requested.is_empty() {
        resolve_checks(scenario.map(|s| s.checks.as_slice()).unwrap_or(&[]))?
    } else {
        resolve_checks(requested)?
    };
    let seed = seed
        .or_else(|| scenario.map(Scenario::seed))
        .unwrap_or(DEFAULT_SEED);
    let mut ctx = CheckContext::new(seed);
    ctx.tolerance_scale = tolerance_scale;
    if let Some(s) = scenario {
        ctx.loops = s
            .loops
            .iter()
            .map(|l| {
                Ok((
                    l.name().to_string(),
                    l.build()
                        .map_err(|e| CliError::config("loops", e.to_string()))?,
                ))
            })
            .collect::<CliResult<_>>()?;
        ctx.loop_charge = s.system()?.charges().first().cloned();
    }
    let results = names
        .into_iter()
        .map(|n| run_check(n, &ctx).expect("name resolved"))
        .collect();
    Ok(new_report(seed, tolerance_scale, results))
}

/// Writes the loop table and returns the exit status it implies.
pub fn cmd_loop_phase(scenario: &Scenario, output: &OutputChoice) -> CliResult<i32> {
    let system = scenario.system()?;
    let loops = scenario
        .loops
        .iter()
        .map(|l| {
            Ok((
                l.name().to_string(),
                l.build()
                    .map_err(|e| CliError::config("loops", e.to_string()))?,
            ))
        })
        .collect::<CliResult<Vec<_>>>()?;
    let rows = loops::loop_table(&system, &loops);
    let (format, path) = output.resolve(Some(scenario));
    with_output(path.as_deref(), |w| {
        loops::write_loop_rows(&rows, format, w)
    })?;
    Ok(if rows.iter().any(|r| r.status() == "ERROR") {
        EXIT_RUNTIME
    } else if rows.iter().any(|r| r.status() == "FAIL") {
        EXIT_VERIFY_FAILED
    } else {
        EXIT_OK
    })
}

fn matrices() -> Vec<(String, ComplexMatrix4)> {
    let mut out = Vec::new();
    for j in 1..=3 {
        out.push((format!("rho{j}"), rho(j).expect("axis")));
        out.push((format!("rhobar{j}"), rho_bar(j).expect("axis")));
        out.push((format!("sigma{j}"), sigma(j).expect("axis")));
        out.push((format!("alpha{j}"), alpha(j).expect("axis")));
    }
    out.push(("C".into(), conjugation_c()));
    out
}

/// Generator matrices (CSV: one entry per row) or matrices plus relation
/// report (JSON).
pub fn cmd_relations_dump(output: &OutputChoice) -> CliResult<()> {
    let (format, path) = output.resolve(None);
    with_output(path.as_deref(), |w| match format {
        Format::Csv => {
            let mut cw = csv::Writer::from_writer(w);
            cw.write_record(["matrix", "row", "col", "re", "im"])?;
            for (name, m) in matrices() {
                for r in 0..4 {
                    for c in 0..4 {
                        let z = m.0[r][c];
                        cw.write_record([
                            name.clone(),
                            r.to_string(),
                            c.to_string(),
                            z.re.to_string(),
                            z.im.to_string(),
                        ])?;
                    }
                }
            }
            cw.flush()?;
            Ok(())
        }
        Format::Json => {
            let mats: serde_json::Map<String, serde_json::Value> = matrices()
                .into_iter()
                .map(|(name, m)| {
                    let rows: Vec<Vec<[f64; 2]>> =
                        m.0.iter()
                            .map(|r| r.iter().map(|z| [z.re, z.im]).collect())
                            .collect();
                    (name, json!(rows))
                })
                .collect();
            let rel: Vec<_> = validate_relations()
                .families
                .iter()
                .map(|f| {
                    json!({
                        "name": f.name, "relation": f.relation, "checks": f.checks,
                        "stated_sign": f.stated_sign, "max_deviation": f.max_deviation,
                        "max_deviation_flipped": f.max_deviation_flipped,
                        "validated_sign": f.validated_sign, "tolerance": f.tolerance,
                        "holds": f.holds(),
                    })
                })
                .collect();
            let doc = json!({"schema_version": scenario::SCHEMA_VERSION, "matrices": mats, "relations": rel});
            serde_json::to_writer_pretty(&mut *w, &doc).map_err(io::Error::from)?;
            w.write_all(b"\n")?;
            Ok(())
        }
    })
}
