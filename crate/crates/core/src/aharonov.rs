//! Loop increments of the pre-potential and their integer winding numbers.
//!
//! Around a closed loop `Delta S = 2 pi i q w`, where `w` is the winding of
//! the projected retarded curve `(a1, -a2)` about the origin. The winding is
//! counted here by signed crossings of the positive first half-axis, without
//! taking any logarithm, so it serves as an independent check of the
//! logarithmic sum.

use std::f64::consts::{FRAC_PI_2, PI};

use num_complex::Complex64;

use crate::error::{Error, Result};
use crate::prepotential::{delta_s_along_path, Charge, Path, MAX_REFINEMENT_DEPTH};
use crate::spacetime::FourVector;

/// Residual tolerance per unit charge for a loop increment to count as quantized.
pub const LOOP_PHASE_TOL: f64 = 1e-8;

fn projected(charge: &Charge, p: &FourVector, index: usize) -> Result<(FourVector, [f64; 2])> {
    let a = charge.retarded(p)?.a;
    let scale = a.x0.abs().max(a.x3.abs());
    if a.x1.hypot(a.x2) <= 1e-12 * scale {
        return Err(Error::PathThroughSingularAxis { index });
    }
    Ok((*p, [a.x1, -a.x2]))
}

fn crossing(p: [f64; 2], q: [f64; 2]) -> i64 {
    // signed crossing of the half-line X > 0, Y = 0
    let up = p[1] < 0.0 && q[1] >= 0.0;
    let down = p[1] >= 0.0 && q[1] < 0.0;
    if !(up || down) {
        return 0;
    }
    let x = p[0] + (q[0] - p[0]) * (-p[1]) / (q[1] - p[1]);
    match (x > 0.0, up) {
        (true, true) => 1,
        (true, false) => -1,
        _ => 0,
    }
}

fn turning(p: [f64; 2], q: [f64; 2]) -> f64 {
    let cross = p[0] * q[1] - p[1] * q[0];
    let dot = p[0] * q[0] + p[1] * q[1];
    cross.atan2(dot).abs()
}

/// Winding number of the projected retarded curve of `charge` around a
/// closed `path`, counting crossings; segments whose projection turns by a
/// quarter turn or more are bisected in spacetime first.
pub fn winding_number(charge: &Charge, path: &Path) -> Result<i64> {
    if !path.is_closed() {
        return Err(Error::InvalidPath("winding needs a closed path".into()));
    }
    let pts = path.points();
    let proj = pts
        .iter()
        .enumerate()
        .map(|(i, p)| projected(charge, p, i))
        .collect::<Result<Vec<_>>>()?;
    let n = pts.len();
    let mut w = 0;
    for seg in 0..n {
        let mut stack = vec![(proj[seg], proj[(seg + 1) % n], 0u32)];
        while let Some(((x0, p0), (x1, p1), depth)) = stack.pop() {
            if turning(p0, p1) < FRAC_PI_2 {
                w += crossing(p0, p1);
                continue;
            }
            if depth >= MAX_REFINEMENT_DEPTH {
                return Err(Error::RefinementLimitExceeded { segment: seg });
            }
            let mid = projected(charge, &((x0 + x1) * 0.5), seg)?;
            stack.push((mid, (x1, p1), depth + 1));
            stack.push(((x0, p0), mid, depth + 1));
        }
    }
    Ok(w)
}

/// Loop increment compared with its quantized value.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct LoopPhaseReport {
    pub delta_s: Complex64,
    pub winding: i64,
    /// `|Delta S - 2 pi i q w|`.
    pub residual: f64,
    pub samples_used: usize,
    pub tolerance: f64,
}

impl LoopPhaseReport {
    pub fn expected(&self, q: f64) -> Complex64 {
        Complex64::new(0.0, 2.0 * PI * q * self.winding as f64)
    }

    pub fn ok(&self) -> bool {
        self.residual <= self.tolerance
    }
}

pub fn ab_phase_report(charge: &Charge, path: &Path) -> Result<LoopPhaseReport> {
    let inc = delta_s_along_path(charge, path)?;
    let winding = winding_number(charge, path)?;
    let expected = Complex64::new(0.0, 2.0 * PI * charge.q * winding as f64);
    Ok(LoopPhaseReport {
        delta_s: inc.delta_s,
        winding,
        residual: (inc.delta_s - expected).norm(),
        samples_used: inc.samples_used,
        tolerance: LOOP_PHASE_TOL * charge.q.abs(),
    })
}

/// Difference of the increments along two open paths with shared endpoints,
/// together with the winding of the loop they enclose.
pub fn path_difference(charge: &Charge, first: &Path, second: &Path) -> Result<(Complex64, i64)> {
    let d1 = delta_s_along_path(charge, first)?.delta_s;
    let d2 = delta_s_along_path(charge, second)?.delta_s;
    let w = winding_number(charge, &first.loop_with(second)?)?;
    Ok((d1 - d2, w))
}
