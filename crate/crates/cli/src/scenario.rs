//! Scenario files: JSON, schema version 1.

use std::path::Path as FsPath;

use serde::{Deserialize, Serialize};

use prepot::field::{StencilOptions, StencilOrder};
use prepot::{Charge, ChargeSystem, FourVector, Path, WorldLine, WorldSample};

use crate::error::{CliError, CliResult};

pub const SCHEMA_VERSION: u32 = 1;
pub const DEFAULT_SEED: u64 = 20_240_917;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Scenario {
    pub version: u32,
    #[serde(default)]
    pub name: Option<String>,
    #[serde(default)]
    pub seed: Option<u64>,
    pub charges: Vec<ChargeSpec>,
    #[serde(default)]
    pub grid: Option<GridSpec>,
    #[serde(default)]
    pub loops: Vec<LoopSpec>,
    #[serde(default)]
    pub checks: Vec<String>,
    #[serde(default)]
    pub output: Option<OutputSpec>,
    #[serde(default)]
    pub stencil: Option<StencilSpec>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ChargeSpec {
    pub q: f64,
    pub line: LineSpec,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "kebab-case", deny_unknown_fields)]
pub enum LineSpec {
    Rest {
        position: [f64; 3],
    },
    /// Straight line through `event` with three-velocity `velocity`.
    Uniform {
        event: [f64; 4],
        velocity: [f64; 3],
    },
    Sampled {
        samples: Vec<SampleSpec>,
    },
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SampleSpec {
    pub tau: f64,
    pub event: [f64; 4],
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct GridSpec {
    pub time: f64,
    pub origin: [f64; 3],
    pub axes: Vec<AxisSpec>,
}

/// Points `origin + k / (resolution - 1) * extent * direction`, `k = 0..resolution`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct AxisSpec {
    pub direction: [f64; 3],
    pub extent: f64,
    pub resolution: usize,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "kebab-case", deny_unknown_fields)]
pub enum LoopSpec {
    Circle {
        name: String,
        center: [f64; 4],
        radius: f64,
        #[serde(default = "one")]
        turns: i32,
        #[serde(default = "default_samples")]
        samples_per_turn: usize,
    },
    Ellipse {
        name: String,
        center: [f64; 4],
        a: f64,
        b: f64,
        #[serde(default)]
        tilt: f64,
        #[serde(default = "one")]
        turns: i32,
        #[serde(default = "default_samples")]
        samples_per_turn: usize,
    },
    /// Closed polygon through the listed events.
    Polyline { name: String, points: Vec<[f64; 4]> },
}

fn one() -> i32 {
    1
}

fn default_samples() -> usize {
    64
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize, clap::ValueEnum)]
#[serde(rename_all = "lowercase")]
pub enum Format {
    Csv,
    Json,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct OutputSpec {
    #[serde(default)]
    pub format: Option<Format>,
    #[serde(default)]
    pub path: Option<String>,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct StencilSpec {
    #[serde(default = "sixth")]
    pub order: u8,
    #[serde(default = "default_step")]
    pub step_factor: f64,
}

fn sixth() -> u8 {
    6
}

fn default_step() -> f64 {
    prepot::field::DEFAULT_STEP_FACTOR
}

impl LoopSpec {
    pub fn name(&self) -> &str {
        match self {
            LoopSpec::Circle { name, .. }
            | LoopSpec::Ellipse { name, .. }
            | LoopSpec::Polyline { name, .. } => name,
        }
    }

    pub fn build(&self) -> prepot::Result<Path> {
        match self {
            LoopSpec::Circle {
                center,
                radius,
                turns,
                samples_per_turn,
                ..
            } => Path::circle(
                FourVector::from_array(*center),
                *radius,
                *turns,
                *samples_per_turn,
            ),
            LoopSpec::Ellipse {
                center,
                a,
                b,
                tilt,
                turns,
                samples_per_turn,
                ..
            } => Path::ellipse(
                FourVector::from_array(*center),
                *a,
                *b,
                *tilt,
                *turns,
                *samples_per_turn,
            ),
            LoopSpec::Polyline { points, .. } => Path::new(
                points.iter().copied().map(FourVector::from_array).collect(),
                true,
            ),
        }
    }
}

impl GridSpec {
    pub fn len(&self) -> usize {
        self.axes.iter().map(|a| a.resolution).product()
    }

    pub fn is_empty(&self) -> bool {
        self.axes.is_empty() || self.len() == 0
    }

    /// Grid events in row-major order (last axis fastest).
    pub fn points(&self) -> Vec<FourVector> {
        let n = self.len();
        (0..n)
            .map(|mut flat| {
                let mut r = self.origin;
                for axis in self.axes.iter().rev() {
                    let k = flat % axis.resolution;
                    flat /= axis.resolution;
                    let s = k as f64 / (axis.resolution - 1) as f64 * axis.extent;
                    for (c, d) in r.iter_mut().zip(axis.direction) {
                        *c += s * d;
                    }
                }
                FourVector::event(self.time, r)
            })
            .collect()
    }
}

impl Scenario {
    pub fn from_json(text: &str) -> CliResult<Self> {
        let de = &mut serde_json::Deserializer::from_str(text);
        let scenario: Scenario = serde_path_to_error::deserialize(de).map_err(|e| {
            let path = e.path().to_string();
            let inner = e.into_inner();
            CliError::config(
                if path == "." {
                    "scenario".to_string()
                } else {
                    path
                },
                format!("{inner} (line {}, column {})", inner.line(), inner.column()),
            )
        })?;
        scenario.validate()?;
        Ok(scenario)
    }

    pub fn load(path: &FsPath) -> CliResult<Self> {
        let text = std::fs::read_to_string(path).map_err(|source| CliError::Read {
            path: path.to_path_buf(),
            source,
        })?;
        Self::from_json(&text).map_err(|e| match e {
            CliError::Config { path: p, message } => {
                CliError::config(format!("{}: {p}", path.display()), message)
            }
            other => other,
        })
    }

    fn validate(&self) -> CliResult<()> {
        if self.version != SCHEMA_VERSION {
            return Err(CliError::config(
                "version",
                format!(
                    "unsupported schema version {}, expected {SCHEMA_VERSION}",
                    self.version
                ),
            ));
        }
        self.system()?;
        if let Some(grid) = &self.grid {
            if grid.axes.is_empty() {
                return Err(CliError::config(
                    "grid.axes",
                    "empty grid: at least one swept axis is required",
                ));
            }
            if grid.axes.len() > 3 {
                return Err(CliError::config("grid.axes", "at most three swept axes"));
            }
            for (i, axis) in grid.axes.iter().enumerate() {
                if axis.resolution < 2 {
                    return Err(CliError::config(
                        format!("grid.axes[{i}].resolution"),
                        format!(
                            "a swept axis needs resolution >= 2, got {}",
                            axis.resolution
                        ),
                    ));
                }
                if !axis.extent.is_finite() || axis.direction.iter().any(|d| !d.is_finite()) {
                    return Err(CliError::config(
                        format!("grid.axes[{i}]"),
                        "non-finite axis",
                    ));
                }
            }
            if !grid.time.is_finite() || grid.origin.iter().any(|c| !c.is_finite()) {
                return Err(CliError::config("grid", "non-finite origin or time"));
            }
        }
        for (i, l) in self.loops.iter().enumerate() {
            l.build()
                .map_err(|e| CliError::config(format!("loops[{i}]"), e.to_string()))?;
        }
        for (i, c) in self.checks.iter().enumerate() {
            if !crate::checks::CHECK_NAMES.contains(&c.as_str()) {
                return Err(CliError::config(
                    format!("checks[{i}]"),
                    format!("unknown check `{c}`"),
                ));
            }
        }
        self.stencil_options()?;
        Ok(())
    }

    pub fn system(&self) -> CliResult<ChargeSystem> {
        let charges = self
            .charges
            .iter()
            .enumerate()
            .map(|(i, c)| {
                c.build()
                    .map_err(|e| CliError::config(format!("charges[{i}]"), e.to_string()))
            })
            .collect::<CliResult<Vec<_>>>()?;
        ChargeSystem::new(charges).map_err(|e| CliError::config("charges", e.to_string()))
    }

    pub fn seed(&self) -> u64 {
        self.seed.unwrap_or(DEFAULT_SEED)
    }

    pub fn stencil_options(&self) -> CliResult<StencilOptions> {
        let Some(s) = self.stencil else {
            return Ok(StencilOptions::default());
        };
        let order = match s.order {
            2 => StencilOrder::Second,
            4 => StencilOrder::Fourth,
            6 => StencilOrder::Sixth,
            o => {
                return Err(CliError::config(
                    "stencil.order",
                    format!("order must be 2, 4 or 6, got {o}"),
                ))
            }
        };
        if !(s.step_factor > 0.0 && s.step_factor < 1.0) {
            return Err(CliError::config(
                "stencil.step_factor",
                "step factor must lie in (0, 1)",
            ));
        }
        Ok(StencilOptions {
            order,
            step_factor: s.step_factor,
        })
    }
}

impl ChargeSpec {
    pub fn build(&self) -> prepot::Result<Charge> {
        let line = match &self.line {
            LineSpec::Rest { position } => WorldLine::rest(*position),
            LineSpec::Uniform { event, velocity } => {
                WorldLine::uniform_from_velocity(FourVector::from_array(*event), *velocity)?
            }
            LineSpec::Sampled { samples } => WorldLine::sampled(
                samples
                    .iter()
                    .map(|s| WorldSample {
                        tau: s.tau,
                        event: FourVector::from_array(s.event),
                    })
                    .collect(),
            )?,
        };
        Charge::new(self.q, line)
    }
}
