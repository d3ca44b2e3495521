//! The dimensionless invariant zeta of a null vector, the complex
//! pre-potential `S = q ln zeta` of point charges, its gradient, the complex
//! four-potential, and branch-tracked increments of `S` along paths.
//!
//! `S` is multi-valued. Every quantity that needs differences of `S` is built
//! from principal logarithms of zeta *ratios*, which are branch independent
//! for nearby points; the multi-valuedness only reappears when such
//! increments are accumulated along a path.

use std::f64::consts::{FRAC_PI_2, PI};

use num_complex::Complex64;

use crate::algebra::{conjugation_c, ComplexMatrix4, ComplexVector4};
use crate::error::{Error, Result};
use crate::spacetime::{retarded_null_vector, FourVector, RetardedSolution, WorldLine};

/// Relative tolerance on `|a.a|` for a vector to count as null.
pub const NULL_TOL: f64 = 1e-10;

/// Points with `(a1)^2 + (a2)^2 < SINGULAR_AXIS_FLOOR * ((a0)^2 + (a3)^2)` are rejected.
pub const SINGULAR_AXIS_FLOOR: f64 = 1e-24;

/// First-difference step as a fraction of the local length scale.
pub const GRADIENT_STEP_FACTOR: f64 = 1e-5;

/// Normalization of `A = k C_mu^lambda d_lambda S`.
///
/// With `k = 1/2` the potential fed through `F_j = 2 d^nu (rho^j)^mu_nu A_mu`
/// gives the same field as the second-derivative route, and that formula
/// needs no rescaling for ordinary real potentials.
pub const COMPLEX_POTENTIAL_SCALE: f64 = 0.5;

/// Bisection depth limit when refining a path segment.
pub const MAX_REFINEMENT_DEPTH: u32 = 24;

const I: Complex64 = Complex64::new(0.0, 1.0);

/// The complex invariant `zeta = (a1 - i a2) / (a0 + a3) = (a0 - a3) / (a1 + i a2)`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Zeta {
    pub value: Complex64,
}

impl Zeta {
    /// Both quotient forms, each `None` when its denominator is zero.
    pub fn both_forms(a: &ComplexVector4) -> (Option<Complex64>, Option<Complex64>) {
        let first_den = a[0] + a[3];
        let second_den = a[1] + I * a[2];
        let first = (first_den.norm() > 0.0).then(|| (a[1] - I * a[2]) / first_den);
        let second = (second_den.norm() > 0.0).then(|| (a[0] - a[3]) / second_den);
        (first, second)
    }

    pub fn ln(&self) -> Complex64 {
        self.value.ln()
    }
}

pub fn complexify(a: &FourVector) -> ComplexVector4 {
    a.to_array().map(|c| Complex64::new(c, 0.0))
}

/// Zeta of a (possibly complex) null vector.
pub fn zeta_of_complex(a: &ComplexVector4) -> Result<Zeta> {
    let norm2: f64 = a.iter().map(|z| z.norm_sqr()).sum();
    let dot = a[0] * a[0] - a[1] * a[1] - a[2] * a[2] - a[3] * a[3];
    if dot.norm() > NULL_TOL * norm2 {
        return Err(Error::NotNull {
            residual: dot.norm(),
        });
    }
    let transverse = a[1].norm_sqr() + a[2].norm_sqr();
    let longitudinal = a[0].norm_sqr() + a[3].norm_sqr();
    if norm2 == 0.0 || transverse < SINGULAR_AXIS_FLOOR * longitudinal {
        return Err(Error::SingularAxis);
    }
    let first_den = a[0] + a[3];
    let second_den = a[1] + I * a[2];
    let value = if first_den.norm() >= second_den.norm() {
        (a[1] - I * a[2]) / first_den
    } else {
        (a[0] - a[3]) / second_den
    };
    if value.norm() == 0.0 || !value.is_finite() {
        return Err(Error::SingularAxis);
    }
    Ok(Zeta { value })
}

/// Zeta of a real null vector.
pub fn zeta_of(a: &FourVector) -> Result<Zeta> {
    zeta_of_complex(&complexify(a))
}

/// A value of the multi-valued pre-potential.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PrePotentialValue {
    pub value: Complex64,
    /// Number of `2 pi i q` steps away from the principal branch.
    pub branch_index: i64,
}

impl PrePotentialValue {
    pub fn principal(value: Complex64) -> Self {
        Self {
            value,
            branch_index: 0,
        }
    }

    /// The principal-branch representative for a single charge `q`.
    pub fn principal_value(&self, q: f64) -> Complex64 {
        self.value - I * (2.0 * PI * q * self.branch_index as f64)
    }
}

/// A point charge moving along a world-line.
#[derive(Debug, Clone, PartialEq)]
pub struct Charge {
    pub q: f64,
    pub line: WorldLine,
}

impl Charge {
    pub fn new(q: f64, line: WorldLine) -> Result<Self> {
        if !q.is_finite() || q == 0.0 {
            return Err(Error::InvalidCharge(format!(
                "charge must be finite and nonzero, got {q}"
            )));
        }
        line.validate()?;
        Ok(Self { q, line })
    }

    pub fn at_rest(q: f64, position: [f64; 3]) -> Result<Self> {
        Self::new(q, WorldLine::rest(position))
    }

    pub fn retarded(&self, x: &FourVector) -> Result<RetardedSolution> {
        retarded_null_vector(&self.line, x)
    }

    /// Zeta at the observer together with the retarded solution it came from.
    pub fn zeta_at(&self, x: &FourVector) -> Result<(Zeta, RetardedSolution)> {
        let sol = self.retarded(x)?;
        Ok((zeta_of(&sol.a)?, sol))
    }

    /// Local length scale for difference stencils: the smaller of the
    /// retarded distance `|a|` and the distance `sqrt(a1^2 + a2^2)` from the
    /// singular axis, shrunk by the Doppler factor `1 - n.v` (with `n` the
    /// retarded direction) when the charge moves towards the observer.
    pub fn length_scale(&self, x: &FourVector) -> Result<f64> {
        let sol = self.retarded(x)?;
        let a = sol.a;
        let r = a.spatial_norm();
        let doppler = a.dot(&sol.velocity) / (sol.velocity.x0 * r);
        Ok(r.min(a.x1.hypot(a.x2)) * doppler.min(1.0))
    }

    /// `S(to) - S(from)` for nearby points, via `q Ln(zeta(to) / zeta(from))`.
    pub fn short_increment(&self, from: &FourVector, to: &FourVector) -> Result<Complex64> {
        let (z0, _) = self.zeta_at(from)?;
        let (z1, _) = self.zeta_at(to)?;
        ratio_log(z1.value / z0.value).map(|l| l * self.q)
    }
}

/// Principal log of a zeta ratio, refused when the ratio is not close to the
/// positive real axis.
pub(crate) fn ratio_log(ratio: Complex64) -> Result<Complex64> {
    let l = ratio.ln();
    if l.im.abs() >= FRAC_PI_2 {
        return Err(Error::StepTooLarge { arg: l.im.abs() });
    }
    Ok(l)
}

/// A discrete set of charges whose pre-potentials add.
#[derive(Debug, Clone, PartialEq)]
pub struct ChargeSystem {
    charges: Vec<Charge>,
}

impl ChargeSystem {
    pub fn new(charges: Vec<Charge>) -> Result<Self> {
        if charges.is_empty() {
            return Err(Error::EmptySystem);
        }
        Ok(Self { charges })
    }

    pub fn single(charge: Charge) -> Self {
        Self {
            charges: vec![charge],
        }
    }

    pub fn charges(&self) -> &[Charge] {
        &self.charges
    }

    pub fn total_charge(&self) -> f64 {
        self.charges.iter().map(|c| c.q).sum()
    }

    pub(crate) fn try_each<T>(&self, mut f: impl FnMut(&Charge) -> Result<T>) -> Result<Vec<T>> {
        self.charges
            .iter()
            .enumerate()
            .map(|(index, c)| {
                f(c).map_err(|e| Error::Charge {
                    index,
                    source: Box::new(e),
                })
            })
            .collect()
    }
}

/// `S(x) = q ln zeta` on the principal branch.
pub fn prepotential_point(charge: &Charge, x: &FourVector) -> Result<PrePotentialValue> {
    let (zeta, _) = charge.zeta_at(x)?;
    Ok(PrePotentialValue::principal(zeta.ln() * charge.q))
}

/// Sum of principal-branch point pre-potentials.
pub fn prepotential_system(system: &ChargeSystem, x: &FourVector) -> Result<PrePotentialValue> {
    let parts = system.try_each(|c| prepotential_point(c, x))?;
    Ok(PrePotentialValue::principal(
        parts.iter().map(|p| p.value).sum(),
    ))
}

/// Covariant gradient `d_mu S`, in closed form for any world-line.
///
/// Differentiating `a.a = 0` gives `d_mu tau = a_mu / (a.u)`, hence
/// `d_mu a^nu = delta_mu^nu - u^nu a_mu / (a.u)`; `d_mu S` then follows from
/// whichever quotient form of zeta is better conditioned. Sampled lines use
/// the velocity of the segment holding the retarded event.
pub fn gradient_s(charge: &Charge, x: &FourVector) -> Result<ComplexVector4> {
    let (_, sol) = charge.zeta_at(x)?;
    let (a, u) = (sol.a.to_array(), sol.velocity.to_array());
    let lowered = sol.a.lowered();
    let au = sol.a.dot(&sol.velocity);
    if !(au > 0.0) {
        return Err(Error::DegenerateDenominator(au));
    }
    let da =
        |mu: usize, nu: usize| -> f64 { f64::from(u8::from(mu == nu)) - u[nu] * lowered[mu] / au };
    let first_den = a[0] + a[3];
    let second_den = Complex64::new(a[1], a[2]);
    let mut grad = [Complex64::new(0.0, 0.0); 4];
    for (mu, g) in grad.iter_mut().enumerate() {
        let dlog = if first_den.abs() >= second_den.norm() {
            // ln(a1 - i a2) - ln(a0 + a3)
            Complex64::new(da(mu, 1), -da(mu, 2)) / Complex64::new(a[1], -a[2])
                - (da(mu, 0) + da(mu, 3)) / first_den
        } else {
            // ln(a0 - a3) - ln(a1 + i a2)
            (da(mu, 0) - da(mu, 3)) / (a[0] - a[3])
                - Complex64::new(da(mu, 1), da(mu, 2)) / second_den
        };
        *g = dlog * charge.q;
    }
    Ok(grad)
}

/// Branch-safe central-difference gradient, valid for any world-line.
pub fn gradient_s_finite_difference(charge: &Charge, x: &FourVector) -> Result<ComplexVector4> {
    let h = GRADIENT_STEP_FACTOR * charge.length_scale(x)?;
    let mut grad = [Complex64::new(0.0, 0.0); 4];
    for (mu, g) in grad.iter_mut().enumerate() {
        let mut e = [0.0; 4];
        e[mu] = h;
        let step = FourVector::from_array(e);
        *g = charge.short_increment(&(*x - step), &(*x + step))? / (2.0 * h);
    }
    Ok(grad)
}

/// The conjugation with both indices in covariant/contravariant position
/// `C_mu^lambda = eta_{mu alpha} C^alpha_beta eta^{beta lambda}`.
pub fn conjugation_c_lowered() -> ComplexMatrix4 {
    let c = conjugation_c();
    let eta = [1.0, -1.0, -1.0, -1.0];
    let mut out = c;
    for mu in 0..4 {
        for lam in 0..4 {
            out.0[mu][lam] = c.0[mu][lam] * (eta[mu] * eta[lam]);
        }
    }
    out
}

/// Complex four-potential `A_mu = k C_mu^lambda d_lambda S` with
/// `k = COMPLEX_POTENTIAL_SCALE`.
pub fn potential_a(charge: &Charge, x: &FourVector) -> Result<ComplexVector4> {
    let grad = gradient_s(charge, x)?;
    Ok(potential_from_gradient(&grad))
}

pub fn potential_from_gradient(grad: &ComplexVector4) -> ComplexVector4 {
    conjugation_c_lowered()
        .apply(grad)
        .map(|z| z * COMPLEX_POTENTIAL_SCALE)
}

/// Potential of a whole system (sum over charges).
pub fn potential_a_system(system: &ChargeSystem, x: &FourVector) -> Result<ComplexVector4> {
    let parts = system.try_each(|c| potential_a(c, x))?;
    let mut out = [Complex64::new(0.0, 0.0); 4];
    for p in parts {
        for (o, v) in out.iter_mut().zip(p) {
            *o += v;
        }
    }
    Ok(out)
}

/// An ordered sequence of events, optionally closed back onto the first.
#[derive(Debug, Clone, PartialEq)]
pub struct Path {
    points: Vec<FourVector>,
    closed: bool,
}

impl Path {
    pub fn new(points: Vec<FourVector>, closed: bool) -> Result<Self> {
        let min = if closed { 3 } else { 2 };
        if points.len() < min {
            return Err(Error::InvalidPath(format!(
                "{} path needs at least {min} samples, got {}",
                if closed { "closed" } else { "open" },
                points.len()
            )));
        }
        if points.iter().any(|p| !p.is_finite()) {
            return Err(Error::InvalidPath("non-finite sample".into()));
        }
        let n = points.len();
        let segments = if closed { n } else { n - 1 };
        for k in 0..segments {
            if points[k] == points[(k + 1) % n] {
                return Err(Error::InvalidPath(format!(
                    "samples {k} and {} coincide",
                    (k + 1) % n
                )));
            }
        }
        Ok(Self { points, closed })
    }

    /// Closed loop `center + R (cos phi, sin phi, 0)` at fixed time, with
    /// `phi` running through `turns` full turns (negative = clockwise).
    pub fn circle(
        center: FourVector,
        radius: f64,
        turns: i32,
        samples_per_turn: usize,
    ) -> Result<Self> {
        Self::ellipse(center, radius, radius, 0.0, turns, samples_per_turn)
    }

    /// Closed ellipse in the x1-x2 plane with semi-axes `a`, `b` rotated by `tilt`.
    pub fn ellipse(
        center: FourVector,
        a: f64,
        b: f64,
        tilt: f64,
        turns: i32,
        samples_per_turn: usize,
    ) -> Result<Self> {
        if turns == 0 {
            return Err(Error::InvalidPath("loop needs a nonzero turn count".into()));
        }
        let n = samples_per_turn.max(3) * turns.unsigned_abs() as usize;
        let (ct, st) = (tilt.cos(), tilt.sin());
        let points = (0..n)
            .map(|k| {
                let phi = 2.0 * PI * turns as f64 * k as f64 / n as f64;
                let (u, v) = (a * phi.cos(), b * phi.sin());
                center + FourVector::new(0.0, ct * u - st * v, st * u + ct * v, 0.0)
            })
            .collect();
        Self::new(points, true)
    }

    pub fn points(&self) -> &[FourVector] {
        &self.points
    }

    pub fn is_closed(&self) -> bool {
        self.closed
    }

    pub fn start(&self) -> FourVector {
        self.points[0]
    }

    /// Final event; the start for closed paths.
    pub fn end(&self) -> FourVector {
        if self.closed {
            self.points[0]
        } else {
            self.points[self.points.len() - 1]
        }
    }

    pub fn reversed(&self) -> Path {
        let mut points = self.points.clone();
        if self.closed {
            points[1..].reverse();
        } else {
            points.reverse();
        }
        Path {
            points,
            closed: self.closed,
        }
    }

    /// Open path `self` followed by `next`; `next` must start where `self` ends.
    pub fn concat(&self, next: &Path) -> Result<Path> {
        if self.closed || next.closed {
            return Err(Error::InvalidPath(
                "only open paths can be concatenated".into(),
            ));
        }
        if self.end() != next.start() {
            return Err(Error::InvalidPath("paths do not share an endpoint".into()));
        }
        let mut points = self.points.clone();
        points.extend_from_slice(&next.points[1..]);
        Path::new(points, false)
    }

    /// Closed loop `self` then `other` traversed backwards; both must share endpoints.
    pub fn loop_with(&self, other: &Path) -> Result<Path> {
        if self.closed || other.closed {
            return Err(Error::InvalidPath("only open paths form a loop".into()));
        }
        if self.start() != other.start() || self.end() != other.end() {
            return Err(Error::InvalidPath(
                "paths do not share both endpoints".into(),
            ));
        }
        let mut points = self.points.clone();
        let back = other.reversed();
        points.extend_from_slice(&back.points[1..back.points.len() - 1]);
        Path::new(points, true)
    }

    pub(crate) fn segments(&self) -> usize {
        if self.closed {
            self.points.len()
        } else {
            self.points.len() - 1
        }
    }
}

/// Branch-tracked increment of `S` along a path.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PathIncrement {
    pub delta_s: Complex64,
    /// Zeta evaluations, including refinement midpoints.
    pub samples_used: usize,
}

/// `sum_k q Ln(zeta_{k+1} / zeta_k)` along the path (closing segment
/// included for closed paths), bisecting any segment whose zeta ratio has
/// `|arg| >= pi/2`.
pub fn delta_s_along_path(charge: &Charge, path: &Path) -> Result<PathIncrement> {
    let zeta_at = |p: &FourVector, index: usize| -> Result<Complex64> {
        match charge.zeta_at(p) {
            Ok((z, _)) => Ok(z.value),
            Err(Error::SingularAxis) => Err(Error::PathThroughSingularAxis { index }),
            Err(e) => Err(e),
        }
    };
    let pts = path.points();
    let zetas = pts
        .iter()
        .enumerate()
        .map(|(i, p)| zeta_at(p, i))
        .collect::<Result<Vec<_>>>()?;
    let mut samples_used = pts.len();
    let mut total = Complex64::new(0.0, 0.0);
    let n = pts.len();

    for seg in 0..path.segments() {
        let (i, j) = (seg, (seg + 1) % n);
        let mut stack = vec![(pts[i], zetas[i], pts[j], zetas[j], 0u32)];
        while let Some((p0, z0, p1, z1, depth)) = stack.pop() {
            let l = (z1 / z0).ln();
            if l.im.abs() < FRAC_PI_2 {
                total += l;
                continue;
            }
            if depth >= MAX_REFINEMENT_DEPTH {
                return Err(Error::RefinementLimitExceeded { segment: seg });
            }
            let mid = (p0 + p1) * 0.5;
            let zm = zeta_at(&mid, seg)?;
            samples_used += 1;
            // pushed in reverse so the first half is summed first
            stack.push((mid, zm, p1, z1, depth + 1));
            stack.push((p0, z0, mid, zm, depth + 1));
        }
    }
    Ok(PathIncrement {
        delta_s: total * charge.q,
        samples_used,
    })
}

/// Continues `S` from its principal value at the path start to the path end.
pub fn continue_along_path(charge: &Charge, path: &Path) -> Result<PrePotentialValue> {
    let start = prepotential_point(charge, &path.start())?;
    let inc = delta_s_along_path(charge, path)?;
    let value = start.value + inc.delta_s;
    let end_principal = prepotential_point(charge, &path.end())?.value;
    let turns = (value.im - end_principal.im) / (2.0 * PI * charge.q);
    Ok(PrePotentialValue {
        value,
        branch_index: turns.round() as i64,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::spacetime::WorldSample;
    use approx::assert_relative_eq;

    fn c(re: f64, im: f64) -> Complex64 {
        Complex64::new(re, im)
    }

    #[test]
    fn zeta_examples() {
        let z = zeta_of(&FourVector::new(1.0, 1.0, 0.0, 0.0)).unwrap();
        assert_eq!(z.value, c(1.0, 0.0));
        let a = FourVector::new(2f64.sqrt(), 1.0, 1.0, 0.0);
        let z = zeta_of(&a).unwrap();
        let expect = c(1.0, -1.0) / 2f64.sqrt();
        assert!((z.value - expect).norm() < 1e-15);
        let (f1, f2) = Zeta::both_forms(&complexify(&a));
        assert!((f1.unwrap() - f2.unwrap()).norm() < 1e-15);
    }

    #[test]
    fn zeta_errors() {
        assert_eq!(
            zeta_of(&FourVector::new(1.0, 0.0, 0.0, 1.0)),
            Err(Error::SingularAxis)
        );
        assert_eq!(
            zeta_of(&FourVector::new(1.0, 0.0, 0.0, -1.0)),
            Err(Error::SingularAxis)
        );
        assert!(matches!(
            zeta_of(&FourVector::new(1.0, 0.5, 0.0, 0.0)),
            Err(Error::NotNull { .. })
        ));
    }

    #[test]
    fn rest_charge_values() {
        let q = 1.7;
        let ch = Charge::at_rest(q, [0.0; 3]).unwrap();
        let s = prepotential_point(&ch, &FourVector::new(3.0, 2.5, 0.0, 0.0)).unwrap();
        assert_eq!(s.value, c(0.0, 0.0));
        let s = prepotential_point(&ch, &FourVector::new(0.0, 0.0, 2.0, 0.0)).unwrap();
        assert!((s.value - c(0.0, -PI * q / 2.0)).norm() < 1e-15);
        let x = FourVector::new(0.4, 0.3, -1.2, 0.8);
        let r = x.spatial_norm();
        let expect = (c(x.x1, -x.x2) / (r + x.x3)).ln() * q;
        let got = prepotential_point(&ch, &x).unwrap().value;
        assert!((got - expect).norm() < 1e-15);
    }

    #[test]
    fn invalid_charges() {
        assert!(Charge::at_rest(0.0, [0.0; 3]).is_err());
        assert!(Charge::at_rest(f64::NAN, [0.0; 3]).is_err());
        assert_eq!(ChargeSystem::new(vec![]), Err(Error::EmptySystem));
    }

    #[test]
    fn system_superposition() {
        let x = FourVector::new(0.0, 1.5, 0.2, 0.1);
        let a = Charge::at_rest(1.0, [0.0, 0.5, 0.0]).unwrap();
        let b = Charge::at_rest(1.0, [0.0, -0.5, 0.0]).unwrap();
        let single = prepotential_system(&ChargeSystem::single(a.clone()), &x).unwrap();
        assert_eq!(single, prepotential_point(&a, &x).unwrap());
        let pair = prepotential_system(&ChargeSystem::new(vec![a.clone(), b.clone()]).unwrap(), &x)
            .unwrap();
        let sum =
            prepotential_point(&a, &x).unwrap().value + prepotential_point(&b, &x).unwrap().value;
        assert_eq!(pair.value, sum);
        let neutral = ChargeSystem::new(vec![
            Charge::at_rest(2.0, [0.1, 0.2, 0.3]).unwrap(),
            Charge::at_rest(-2.0, [0.1, 0.2, 0.3]).unwrap(),
        ])
        .unwrap();
        assert_eq!(
            prepotential_system(&neutral, &x).unwrap().value,
            c(0.0, 0.0)
        );
    }

    #[test]
    fn system_error_carries_index() {
        let sys = ChargeSystem::new(vec![
            Charge::at_rest(1.0, [5.0, 5.0, 5.0]).unwrap(),
            Charge::at_rest(1.0, [0.0, 0.0, 0.0]).unwrap(),
        ])
        .unwrap();
        let err = prepotential_system(&sys, &FourVector::new(0.0, 0.0, 0.0, 1.0)).unwrap_err();
        assert!(matches!(err, Error::Charge { index: 1, .. }));
        assert_eq!(err.root(), &Error::SingularAxis);
    }

    #[test]
    fn rest_gradient_closed_form() {
        let q = 0.8;
        let ch = Charge::at_rest(q, [0.0; 3]).unwrap();
        let x = FourVector::new(0.0, 0.6, -0.9, 1.1);
        let g = gradient_s(&ch, &x).unwrap();
        let r = x.spatial_norm();
        assert_eq!(g[0], c(0.0, 0.0));
        assert_relative_eq!(g[3].re, -q / r, max_relative = 1e-15);
        let rho2 = x.x1 * x.x1 + x.x2 * x.x2;
        assert_relative_eq!(g[1].re, q / rho2 * x.x1 * x.x3 / r, max_relative = 1e-15);
        assert_relative_eq!(g[1].im, q / rho2 * x.x2, max_relative = 1e-15);
        let fd = gradient_s_finite_difference(&ch, &x).unwrap();
        for mu in 0..4 {
            assert!(
                (fd[mu] - g[mu]).norm() <= 1e-8 * g.iter().map(|z| z.norm()).fold(0.0, f64::max)
            );
        }
    }

    #[test]
    fn moving_gradient_matches_differences() {
        let samples: Vec<WorldSample> = (0..6)
            .map(|k| {
                let t = k as f64 - 5.0;
                WorldSample {
                    tau: t,
                    event: FourVector::new(1.2 * t, 0.1 * t * t / 10.0, 0.3 * t, -0.2),
                }
            })
            .collect();
        let lines = [
            WorldLine::uniform_from_velocity(
                FourVector::new(0.5, 0.1, 0.2, -0.3),
                [0.6, -0.2, 0.5],
            )
            .unwrap(),
            WorldLine::sampled(samples).unwrap(),
        ];
        for line in lines {
            let ch = Charge::new(-1.3, line).unwrap();
            for x in [
                FourVector::new(1.0, 1.3, -0.4, 0.8),
                FourVector::new(0.2, -0.9, 1.1, -1.5),
            ] {
                let g = gradient_s(&ch, &x).unwrap();
                let fd = gradient_s_finite_difference(&ch, &x).unwrap();
                let scale = g.iter().map(|z| z.norm()).fold(0.0, f64::max);
                for mu in 0..4 {
                    assert!(
                        (fd[mu] - g[mu]).norm() <= 1e-8 * scale,
                        "{mu}: {} vs {}",
                        fd[mu],
                        g[mu]
                    );
                }
            }
        }
    }

    #[test]
    fn potential_is_scaled_conjugate_gradient() {
        let ch = Charge::at_rest(1.0, [0.0; 3]).unwrap();
        let x = FourVector::new(0.0, 1.0, 0.5, -0.3);
        let g = gradient_s(&ch, &x).unwrap();
        let a = potential_a(&ch, &x).unwrap();
        // C_mu^lambda has entries (0,3) = (3,0) = -1, (1,2) = i, (2,1) = -i
        let expect = [-g[3], I * g[2], -I * g[1], -g[0]].map(|z| z * COMPLEX_POTENTIAL_SCALE);
        for k in 0..4 {
            assert!((a[k] - expect[k]).norm() < 1e-15);
        }
        // the conjugation is an involution: C(C dS) = dS
        let back = conjugation_c_lowered().apply(&a.map(|z| z / COMPLEX_POTENTIAL_SCALE));
        for k in 0..4 {
            assert!((back[k] - g[k]).norm() < 1e-15);
        }
    }

    #[test]
    fn potential_finite_on_grid() {
        let ch = Charge::at_rest(1.0, [0.0; 3]).unwrap();
        for i in -3..=3 {
            for j in -3..=3 {
                for k in -3..=3 {
                    if i == 0 && j == 0 {
                        continue;
                    }
                    let x = FourVector::new(0.0, i as f64 * 0.4, j as f64 * 0.4, k as f64 * 0.4);
                    let a = potential_a(&ch, &x).unwrap();
                    assert!(a.iter().all(|z| z.is_finite()));
                }
            }
        }
    }

    #[test]
    fn circle_winds_minus_one() {
        let q = 1.3;
        let ch = Charge::at_rest(q, [0.0; 3]).unwrap();
        let loop_ = Path::circle(FourVector::new(0.0, 0.0, 0.0, 0.7), 1.0, 1, 32).unwrap();
        let inc = delta_s_along_path(&ch, &loop_).unwrap();
        assert!((inc.delta_s - c(0.0, -2.0 * PI * q)).norm() < 1e-12);
        let twice = Path::circle(FourVector::new(0.0, 0.0, 0.0, -0.4), 2.0, 2, 32).unwrap();
        let inc = delta_s_along_path(&ch, &twice).unwrap();
        assert!((inc.delta_s - c(0.0, -4.0 * PI * q)).norm() < 1e-12);
    }

    #[test]
    fn loop_away_from_axis_is_trivial() {
        let ch = Charge::at_rest(1.0, [0.0; 3]).unwrap();
        let loop_ = Path::circle(FourVector::new(0.0, 3.0, 0.0, 0.0), 1.0, 1, 16).unwrap();
        assert!(delta_s_along_path(&ch, &loop_).unwrap().delta_s.norm() < 1e-10);
    }

    #[test]
    fn coarse_loop_is_refined() {
        let ch = Charge::at_rest(1.0, [0.0; 3]).unwrap();
        // a triangle around the axis: each edge spans 120 degrees
        let loop_ = Path::circle(FourVector::default(), 1.0, 1, 3).unwrap();
        let inc = delta_s_along_path(&ch, &loop_).unwrap();
        assert!(inc.samples_used > 3);
        assert!((inc.delta_s - c(0.0, -2.0 * PI)).norm() < 1e-12);
    }

    #[test]
    fn path_through_axis() {
        let ch = Charge::at_rest(1.0, [0.0; 3]).unwrap();
        let p = Path::new(
            vec![
                FourVector::new(0.0, 1.0, 0.0, 0.5),
                FourVector::new(0.0, 0.0, 0.0, 0.5),
                FourVector::new(0.0, -1.0, 0.0, 0.5),
            ],
            false,
        )
        .unwrap();
        assert_eq!(
            delta_s_along_path(&ch, &p),
            Err(Error::PathThroughSingularAxis { index: 1 })
        );
        // a segment crossing the axis between samples
        let p = Path::new(
            vec![
                FourVector::new(0.0, 1.0, 0.0, 0.5),
                FourVector::new(0.0, -1.0, 0.0, 0.5),
            ],
            false,
        )
        .unwrap();
        assert!(matches!(
            delta_s_along_path(&ch, &p),
            Err(Error::PathThroughSingularAxis { .. })
        ));
    }

    #[test]
    fn path_validation() {
        let p = FourVector::new(0.0, 1.0, 0.0, 0.0);
        assert!(Path::new(vec![p, p * 2.0], true).is_err());
        assert!(Path::new(vec![p, p], false).is_err());
        assert!(Path::new(vec![p], false).is_err());
        assert!(Path::circle(FourVector::default(), 1.0, 0, 8).is_err());
    }

    #[test]
    fn branch_tracked_end_value() {
        let ch = Charge::at_rest(1.0, [0.0; 3]).unwrap();
        let loop_ = Path::circle(FourVector::new(0.0, 0.0, 0.0, 0.2), 1.5, 3, 24).unwrap();
        let v = continue_along_path(&ch, &loop_).unwrap();
        assert_eq!(v.branch_index, -3);
        let p = prepotential_point(&ch, &loop_.start()).unwrap().value;
        assert!((v.principal_value(1.0) - p).norm() < 1e-12);
    }
}
