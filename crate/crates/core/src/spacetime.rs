//! Minkowski kinematics: four-vectors with signature (+,-,-,-), the
//! fundamental boost, world-lines and the retarded null-vector solver.
//!
//! Units have c = 1 throughout; `x0` is the time coordinate.

use std::ops::{Add, Index, Mul, Neg, Sub};

use crate::error::{Error, Result};

/// Tolerance on `u.u = 1` for uniform world-lines.
pub const VELOCITY_NORM_TOL: f64 = 1e-12;

/// A real four-vector `(x0, x1, x2, x3)`.
#[derive(Debug, Clone, Copy, PartialEq, Default)]
pub struct FourVector {
    pub x0: f64,
    pub x1: f64,
    pub x2: f64,
    pub x3: f64,
}

impl FourVector {
    pub const fn new(x0: f64, x1: f64, x2: f64, x3: f64) -> Self {
        Self { x0, x1, x2, x3 }
    }

    pub const fn from_array(c: [f64; 4]) -> Self {
        Self::new(c[0], c[1], c[2], c[3])
    }

    /// Event at time `t` and spatial position `r`.
    pub const fn event(t: f64, r: [f64; 3]) -> Self {
        Self::new(t, r[0], r[1], r[2])
    }

    pub const fn to_array(self) -> [f64; 4] {
        [self.x0, self.x1, self.x2, self.x3]
    }

    pub const fn spatial(&self) -> [f64; 3] {
        [self.x1, self.x2, self.x3]
    }

    pub fn spatial_norm(&self) -> f64 {
        (self.x1 * self.x1 + self.x2 * self.x2 + self.x3 * self.x3).sqrt()
    }

    pub fn dot(&self, other: &FourVector) -> f64 {
        minkowski_dot(self, other)
    }

    /// Index-lowered components `eta_{mu nu} x^nu`.
    pub fn lowered(&self) -> [f64; 4] {
        [self.x0, -self.x1, -self.x2, -self.x3]
    }

    pub fn is_finite(&self) -> bool {
        self.to_array().iter().all(|c| c.is_finite())
    }

    /// Unit future-pointing four-velocity for a three-velocity `v` with |v| < 1.
    pub fn four_velocity(v: [f64; 3]) -> Result<FourVector> {
        let v2 = v[0] * v[0] + v[1] * v[1] + v[2] * v[2];
        if !(v2 < 1.0) {
            return Err(Error::InvalidWorldLine(format!(
                "speed {} is not below light speed",
                v2.sqrt()
            )));
        }
        let gamma = 1.0 / (1.0 - v2).sqrt();
        Ok(FourVector::new(
            gamma,
            gamma * v[0],
            gamma * v[1],
            gamma * v[2],
        ))
    }

    /// Three-velocity `u/u0` of a four-velocity.
    pub fn three_velocity(&self) -> [f64; 3] {
        [self.x1 / self.x0, self.x2 / self.x0, self.x3 / self.x0]
    }
}

impl Index<usize> for FourVector {
    type Output = f64;

    fn index(&self, i: usize) -> &f64 {
        match i {
            0 => &self.x0,
            1 => &self.x1,
            2 => &self.x2,
            3 => &self.x3,
            _ => panic!("four-vector index {i} out of range"),
        }
    }
}

impl Add for FourVector {
    type Output = FourVector;
    fn add(self, o: FourVector) -> FourVector {
        FourVector::new(
            self.x0 + o.x0,
            self.x1 + o.x1,
            self.x2 + o.x2,
            self.x3 + o.x3,
        )
    }
}

impl Sub for FourVector {
    type Output = FourVector;
    fn sub(self, o: FourVector) -> FourVector {
        FourVector::new(
            self.x0 - o.x0,
            self.x1 - o.x1,
            self.x2 - o.x2,
            self.x3 - o.x3,
        )
    }
}

impl Mul<f64> for FourVector {
    type Output = FourVector;
    fn mul(self, s: f64) -> FourVector {
        FourVector::new(self.x0 * s, self.x1 * s, self.x2 * s, self.x3 * s)
    }
}

impl Neg for FourVector {
    type Output = FourVector;
    fn neg(self) -> FourVector {
        self * -1.0
    }
}

/// `a0 b0 - a1 b1 - a2 b2 - a3 b3`.
pub fn minkowski_dot(a: &FourVector, b: &FourVector) -> f64 {
    a.x0 * b.x0 - a.x1 * b.x1 - a.x2 * b.x2 - a.x3 * b.x3
}

/// A real 4x4 matrix acting on contravariant components.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct LorentzMatrix(pub [[f64; 4]; 4]);

impl LorentzMatrix {
    pub fn identity() -> Self {
        let mut m = [[0.0; 4]; 4];
        for (i, row) in m.iter_mut().enumerate() {
            row[i] = 1.0;
        }
        LorentzMatrix(m)
    }

    pub fn apply(&self, v: &FourVector) -> FourVector {
        let c = v.to_array();
        let mut out = [0.0; 4];
        for (o, row) in out.iter_mut().zip(self.0.iter()) {
            *o = row.iter().zip(c.iter()).map(|(m, x)| m * x).sum();
        }
        FourVector::from_array(out)
    }

    pub fn matmul(&self, other: &LorentzMatrix) -> LorentzMatrix {
        let mut m = [[0.0; 4]; 4];
        for (i, row) in m.iter_mut().enumerate() {
            for (j, e) in row.iter_mut().enumerate() {
                *e = (0..4).map(|k| self.0[i][k] * other.0[k][j]).sum();
            }
        }
        LorentzMatrix(m)
    }

    pub fn determinant(&self) -> f64 {
        // Gaussian elimination with partial pivoting.
        let mut m = self.0;
        let mut det = 1.0;
        for col in 0..4 {
            let pivot = (col..4)
                .max_by(|&a, &b| m[a][col].abs().total_cmp(&m[b][col].abs()))
                .unwrap_or(col);
            if m[pivot][col] == 0.0 {
                return 0.0;
            }
            if pivot != col {
                m.swap(pivot, col);
                det = -det;
            }
            det *= m[col][col];
            for row in col + 1..4 {
                let f = m[row][col] / m[col][col];
                for k in col..4 {
                    m[row][k] -= f * m[col][k];
                }
            }
        }
        det
    }
}

pub(crate) fn check_axis(j: usize) -> Result<()> {
    if (1..=3).contains(&j) {
        Ok(())
    } else {
        Err(Error::AxisOutOfRange(j))
    }
}

/// Hyperbolic boost of rapidity `psi` mixing `x0` with `xj`.
pub fn fundamental_boost(j: usize, psi: f64) -> Result<LorentzMatrix> {
    check_axis(j)?;
    let mut m = LorentzMatrix::identity();
    let (ch, sh) = (psi.cosh(), psi.sinh());
    m.0[0][0] = ch;
    m.0[j][j] = ch;
    m.0[0][j] = sh;
    m.0[j][0] = sh;
    Ok(m)
}

/// One tabulated point of a sampled trajectory.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct WorldSample {
    pub tau: f64,
    pub event: FourVector,
}

/// Piecewise-uniform trajectory through validated samples.
#[derive(Debug, Clone, PartialEq)]
pub struct SampledTrajectory {
    samples: Vec<WorldSample>,
}

impl SampledTrajectory {
    /// Requires at least two samples, strictly increasing `tau` and `x0`,
    /// and timelike separation between neighbours.
    pub fn new(samples: Vec<WorldSample>) -> Result<Self> {
        if samples.len() < 2 {
            return Err(Error::InvalidWorldLine(
                "sampled world-line needs at least two samples".into(),
            ));
        }
        if samples
            .iter()
            .any(|s| !s.tau.is_finite() || !s.event.is_finite())
        {
            return Err(Error::InvalidWorldLine("non-finite sample".into()));
        }
        for (k, w) in samples.windows(2).enumerate() {
            let d = w[1].event - w[0].event;
            if !(w[1].tau > w[0].tau) || !(d.x0 > 0.0) {
                return Err(Error::InvalidWorldLine(format!(
                    "samples {k} and {} are not strictly increasing",
                    k + 1
                )));
            }
            if !(d.dot(&d) > 0.0) {
                return Err(Error::InvalidWorldLine(format!(
                    "samples {k} and {} are not timelike separated",
                    k + 1
                )));
            }
        }
        Ok(Self { samples })
    }

    pub fn samples(&self) -> &[WorldSample] {
        &self.samples
    }

    fn segment_velocity(&self, k: usize) -> FourVector {
        let d = self.samples[k + 1].event - self.samples[k].event;
        d * (1.0 / d.dot(&d).sqrt())
    }
}

/// Trajectory of a point charge.
#[derive(Debug, Clone, PartialEq)]
pub enum WorldLine {
    /// At rest at a fixed spatial position.
    Rest { position: [f64; 3] },
    /// Straight line `reference_event + velocity_u * tau`, `u.u = 1`.
    Uniform {
        reference_event: FourVector,
        velocity_u: FourVector,
    },
    /// Linear interpolation between samples.
    Sampled(SampledTrajectory),
}

impl WorldLine {
    pub fn rest(position: [f64; 3]) -> Self {
        WorldLine::Rest { position }
    }

    pub fn uniform(reference_event: FourVector, velocity_u: FourVector) -> Result<Self> {
        let line = WorldLine::Uniform {
            reference_event,
            velocity_u,
        };
        line.validate()?;
        Ok(line)
    }

    /// Uniform motion with three-velocity `v`, passing through `reference_event` at tau = 0.
    pub fn uniform_from_velocity(reference_event: FourVector, v: [f64; 3]) -> Result<Self> {
        Self::uniform(reference_event, FourVector::four_velocity(v)?)
    }

    pub fn sampled(samples: Vec<WorldSample>) -> Result<Self> {
        Ok(WorldLine::Sampled(SampledTrajectory::new(samples)?))
    }

    pub fn validate(&self) -> Result<()> {
        match self {
            WorldLine::Rest { position } => {
                if position.iter().all(|c| c.is_finite()) {
                    Ok(())
                } else {
                    Err(Error::InvalidWorldLine("non-finite rest position".into()))
                }
            }
            WorldLine::Uniform {
                reference_event,
                velocity_u,
            } => {
                if !reference_event.is_finite() || !velocity_u.is_finite() {
                    return Err(Error::InvalidWorldLine("non-finite uniform line".into()));
                }
                let norm = velocity_u.dot(velocity_u);
                if (norm - 1.0).abs() > VELOCITY_NORM_TOL || velocity_u.x0 <= 0.0 {
                    return Err(Error::InvalidWorldLine(format!(
                        "four-velocity must be future-pointing with u.u = 1, got u.u = {norm}"
                    )));
                }
                Ok(())
            }
            WorldLine::Sampled(_) => Ok(()),
        }
    }

    /// Charge event at parameter `tau`, if `tau` lies in the line's domain.
    pub fn event_at(&self, tau: f64) -> Option<FourVector> {
        match self {
            WorldLine::Rest { position } => Some(FourVector::event(tau, *position)),
            WorldLine::Uniform {
                reference_event,
                velocity_u,
            } => Some(*reference_event + *velocity_u * tau),
            WorldLine::Sampled(traj) => {
                let s = traj.samples();
                if tau < s[0].tau || tau > s[s.len() - 1].tau {
                    return None;
                }
                let k = s.partition_point(|w| w.tau <= tau).clamp(1, s.len() - 1) - 1;
                let f = (tau - s[k].tau) / (s[k + 1].tau - s[k].tau);
                Some(s[k].event + (s[k + 1].event - s[k].event) * f)
            }
        }
    }
}

/// The null separation from the retarded charge event to the observer.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct RetardedSolution {
    pub tau_retarded: f64,
    pub a: FourVector,
    /// Unit four-velocity of the charge at the retarded event.
    pub velocity: FourVector,
}

impl RetardedSolution {
    /// `|a.a| / a0^2`.
    pub fn null_residual(&self) -> f64 {
        self.a.dot(&self.a).abs() / (self.a.x0 * self.a.x0)
    }
}

/// `g = (x0 - e0) - |x - e|`: positive inside the past cone of `observer`.
fn cone_gap(observer: &FourVector, event: &FourVector) -> f64 {
    let d = *observer - *event;
    d.x0 - d.spatial_norm()
}

/// Solves for the intersection of the observer's past light cone with `line`.
pub fn retarded_null_vector(line: &WorldLine, observer: &FourVector) -> Result<RetardedSolution> {
    match line {
        WorldLine::Rest { position } => {
            let d = [
                observer.x1 - position[0],
                observer.x2 - position[1],
                observer.x3 - position[2],
            ];
            let r = (d[0] * d[0] + d[1] * d[1] + d[2] * d[2]).sqrt();
            if r == 0.0 {
                return Err(Error::ObserverOnWorldLine);
            }
            Ok(RetardedSolution {
                tau_retarded: observer.x0 - r,
                a: FourVector::new(r, d[0], d[1], d[2]),
                velocity: FourVector::new(1.0, 0.0, 0.0, 0.0),
            })
        }
        WorldLine::Uniform {
            reference_event,
            velocity_u,
        } => {
            line.validate()?;
            let d = *observer - *reference_event;
            let (tau, a) = uniform_retarded(d, *velocity_u)?;
            Ok(RetardedSolution {
                tau_retarded: tau,
                a,
                velocity: *velocity_u,
            })
        }
        WorldLine::Sampled(traj) => sampled_retarded(traj, observer),
    }
}

/// Past-cone root of `(d - u s)^2 = 0` with `u` timelike; returns `(s, d - u s)`.
fn uniform_retarded(d: FourVector, u: FourVector) -> Result<(f64, FourVector)> {
    let uu = u.dot(&u);
    let du = d.dot(&u);
    let dd = d.dot(&d);
    let disc = (du * du - uu * dd).max(0.0);
    let root = disc.sqrt();
    if root == 0.0 {
        return Err(Error::ObserverOnWorldLine);
    }
    // smaller root of uu s^2 - 2 du s + dd = 0, written to avoid cancellation
    let s = if du > 0.0 {
        dd / (du + root)
    } else {
        (du - root) / uu
    };
    Ok((s, d - u * s))
}

fn sampled_retarded(traj: &SampledTrajectory, observer: &FourVector) -> Result<RetardedSolution> {
    let s = traj.samples();
    let n = s.len();
    let gap = |k: usize| cone_gap(observer, &s[k].event);
    if gap(0) < 0.0 {
        return Err(Error::NoRetardedIntersection(
            "observer's past light cone does not reach the first sample".into(),
        ));
    }
    if gap(n - 1) > 0.0 {
        return Err(Error::NoRetardedIntersection(
            "retarded event lies after the last sample".into(),
        ));
    }
    // g is decreasing along a timelike line: bisect on node indices
    let (mut lo, mut hi) = (0usize, n - 1);
    while hi - lo > 1 {
        let mid = (lo + hi) / 2;
        if gap(mid) >= 0.0 {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    let k = lo;
    let delta = s[k + 1].event - s[k].event;
    let d = *observer - s[k].event;
    let (mut frac, _) = uniform_retarded(d, delta)?;
    frac = frac.clamp(0.0, 1.0);
    // Newton polish on g(frac)
    for _ in 0..3 {
        let a = d - delta * frac;
        let r = a.spatial_norm();
        if r == 0.0 {
            break;
        }
        let g = a.x0 - r;
        let dg = -delta.x0 + (a.x1 * delta.x1 + a.x2 * delta.x2 + a.x3 * delta.x3) / r;
        if g.abs() <= 1e-12 * a.x0.abs() || dg == 0.0 {
            break;
        }
        frac = (frac - g / dg).clamp(0.0, 1.0);
    }
    let a = d - delta * frac;
    if a.spatial_norm() == 0.0 {
        return Err(Error::ObserverOnWorldLine);
    }
    Ok(RetardedSolution {
        tau_retarded: s[k].tau + frac * (s[k + 1].tau - s[k].tau),
        a,
        velocity: traj.segment_velocity(k),
    })
}

/// Generic retarded-time solver for any trajectory `tau -> event` whose cone
/// gap changes sign on `[lo, hi]`: bisection to bracket, then Newton polish.
pub fn solve_retarded_time<F>(
    trajectory: F,
    observer: &FourVector,
    lo: f64,
    hi: f64,
) -> Result<(f64, FourVector)>
where
    F: Fn(f64) -> FourVector,
{
    let gap = |tau: f64| cone_gap(observer, &trajectory(tau));
    let (mut lo, mut hi) = (lo, hi);
    let (g_lo, g_hi) = (gap(lo), gap(hi));
    if g_lo < 0.0 || g_hi > 0.0 {
        return Err(Error::NoRetardedIntersection(format!(
            "bracket [{lo}, {hi}] does not straddle the past light cone"
        )));
    }
    let scale = lo.abs().max(hi.abs()).max(1.0);
    for _ in 0..200 {
        if hi - lo <= 1e-9 * scale {
            break;
        }
        let mid = 0.5 * (lo + hi);
        if gap(mid) >= 0.0 {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    let mut tau = 0.5 * (lo + hi);
    for _ in 0..8 {
        let a = *observer - trajectory(tau);
        let g = a.x0 - a.spatial_norm();
        if g.abs() <= 1e-12 * a.x0.abs() {
            break;
        }
        let h = 1e-7 * scale;
        let dg = (gap(tau + h) - gap(tau - h)) / (2.0 * h);
        if dg == 0.0 || !dg.is_finite() {
            break;
        }
        let next = tau - g / dg;
        if !next.is_finite() {
            break;
        }
        tau = next;
    }
    let a = *observer - trajectory(tau);
    if a.spatial_norm() == 0.0 {
        return Err(Error::ObserverOnWorldLine);
    }
    Ok((tau, a))
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_relative_eq;

    #[test]
    fn metric_examples() {
        let e0 = FourVector::new(1.0, 0.0, 0.0, 0.0);
        assert_eq!(minkowski_dot(&e0, &e0), 1.0);
        let n = FourVector::new(1.0, 1.0, 0.0, 0.0);
        assert_eq!(minkowski_dot(&n, &n), 0.0);
        let a = FourVector::new(2.0, 1.0, 1.0, 1.0);
        let b = FourVector::new(1.0, 2.0, 0.0, 0.0);
        assert_eq!(minkowski_dot(&a, &b), 0.0);
    }

    #[test]
    fn boost_examples() {
        assert_eq!(
            fundamental_boost(3, 0.0).unwrap(),
            LorentzMatrix::identity()
        );
        let psi = 0.7;
        let v = fundamental_boost(1, psi)
            .unwrap()
            .apply(&FourVector::new(1.0, 0.0, 0.0, 0.0));
        assert_eq!(v, FourVector::new(psi.cosh(), psi.sinh(), 0.0, 0.0));
        assert_relative_eq!(
            fundamental_boost(2, -1.3).unwrap().determinant(),
            1.0,
            epsilon = 1e-12
        );
        assert_eq!(fundamental_boost(0, 1.0), Err(Error::AxisOutOfRange(0)));
        assert_eq!(fundamental_boost(4, 1.0), Err(Error::AxisOutOfRange(4)));
    }

    #[test]
    fn rest_retarded_vector() {
        let line = WorldLine::rest([0.0; 3]);
        let sol = retarded_null_vector(&line, &FourVector::new(5.0, 3.0, 0.0, 4.0)).unwrap();
        assert_eq!(sol.a, FourVector::new(5.0, 3.0, 0.0, 4.0));
        assert_eq!(sol.tau_retarded, 0.0);
        assert_eq!(
            retarded_null_vector(&line, &FourVector::new(2.0, 0.0, 0.0, 0.0)),
            Err(Error::ObserverOnWorldLine)
        );
    }

    #[test]
    fn uniform_retarded_vector_is_null_and_past() {
        let line =
            WorldLine::uniform_from_velocity(FourVector::new(0.0, 0.1, -0.2, 0.3), [0.6, 0.0, 0.3])
                .unwrap();
        let obs = FourVector::new(1.5, 2.0, 1.0, -0.5);
        let sol = retarded_null_vector(&line, &obs).unwrap();
        assert!(sol.a.x0 > 0.0);
        assert!(sol.null_residual() < 1e-14);
        let ev = line.event_at(sol.tau_retarded).unwrap();
        assert_relative_eq!((obs - ev).x1, sol.a.x1, epsilon = 1e-12);
    }

    #[test]
    fn uniform_rejects_bad_velocity() {
        let e = FourVector::default();
        assert!(WorldLine::uniform(e, FourVector::new(1.0, 0.5, 0.0, 0.0)).is_err());
        assert!(WorldLine::uniform_from_velocity(e, [1.0, 0.0, 0.0]).is_err());
        assert!(WorldLine::uniform(e, FourVector::new(-1.0, 0.0, 0.0, 0.0)).is_err());
    }

    #[test]
    fn observer_on_uniform_line() {
        let line =
            WorldLine::uniform_from_velocity(FourVector::default(), [0.5, 0.0, 0.0]).unwrap();
        let on = line.event_at(2.0).unwrap();
        assert_eq!(
            retarded_null_vector(&line, &on),
            Err(Error::ObserverOnWorldLine)
        );
    }

    fn straight_samples(v: [f64; 3], taus: &[f64]) -> Vec<WorldSample> {
        let u = FourVector::four_velocity(v).unwrap();
        taus.iter()
            .map(|&tau| WorldSample {
                tau,
                event: u * tau,
            })
            .collect()
    }

    #[test]
    fn sampled_straight_line_matches_uniform() {
        let v = [0.2, -0.4, 0.1];
        let taus: Vec<f64> = (-40..=10).map(|k| k as f64 * 0.5).collect();
        let sampled = WorldLine::sampled(straight_samples(v, &taus)).unwrap();
        let uniform = WorldLine::uniform_from_velocity(FourVector::default(), v).unwrap();
        for obs in [
            FourVector::new(0.0, 1.0, 2.0, 3.0),
            FourVector::new(1.3, -2.0, 0.5, 0.1),
            FourVector::new(-2.0, 0.3, 0.3, -4.0),
        ] {
            let a = retarded_null_vector(&sampled, &obs).unwrap();
            let b = retarded_null_vector(&uniform, &obs).unwrap();
            assert_relative_eq!(a.tau_retarded, b.tau_retarded, epsilon = 1e-12);
            for i in 0..4 {
                assert_relative_eq!(a.a[i], b.a[i], epsilon = 1e-12);
            }
        }
    }

    #[test]
    fn sampled_out_of_range() {
        let line = WorldLine::sampled(straight_samples([0.1, 0.0, 0.0], &[0.0, 1.0, 2.0])).unwrap();
        // too early: past cone misses every sample
        let early = FourVector::new(-5.0, 0.0, 0.0, 1.0);
        assert!(matches!(
            retarded_null_vector(&line, &early),
            Err(Error::NoRetardedIntersection(_))
        ));
        // too late: retarded event beyond the table
        let late = FourVector::new(50.0, 0.0, 0.0, 1.0);
        assert!(matches!(
            retarded_null_vector(&line, &late),
            Err(Error::NoRetardedIntersection(_))
        ));
    }

    #[test]
    fn sampled_validation() {
        assert!(WorldLine::sampled(straight_samples([0.0; 3], &[0.0])).is_err());
        assert!(WorldLine::sampled(straight_samples([0.0; 3], &[1.0, 0.0])).is_err());
        let spacelike = vec![
            WorldSample {
                tau: 0.0,
                event: FourVector::new(0.0, 0.0, 0.0, 0.0),
            },
            WorldSample {
                tau: 1.0,
                event: FourVector::new(1.0, 2.0, 0.0, 0.0),
            },
        ];
        assert!(WorldLine::sampled(spacelike).is_err());
    }

    #[test]
    fn generic_solver_on_rest_line() {
        let line = WorldLine::rest([0.5, 0.0, -0.5]);
        let obs = FourVector::new(3.0, 1.0, 2.0, 0.0);
        let closed = retarded_null_vector(&line, &obs).unwrap();
        let (tau, a) =
            solve_retarded_time(|t| line.event_at(t).unwrap(), &obs, -100.0, 3.0).unwrap();
        assert_relative_eq!(tau, closed.tau_retarded, max_relative = 1e-10);
        assert_relative_eq!(a.x0, closed.a.x0, max_relative = 1e-10);
    }
}
