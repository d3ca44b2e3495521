//! Scalar and covector fields on spacetime, and central-difference stencils
//! for their derivatives.
//!
//! Scalar stencils only ever ask a field for *increments* relative to the
//! stencil centre, so multi-valued fields such as the pre-potential can supply
//! branch-safe differences.

use num_complex::Complex64;

use crate::algebra::ComplexVector4;
use crate::error::{Error, Result};
use crate::prepotential::{potential_a_system, prepotential_system, Charge, ChargeSystem};
use crate::spacetime::FourVector;

/// Default step as a fraction of the local length scale, near the
/// truncation/rounding balance of the sixth-order stencil.
pub const DEFAULT_STEP_FACTOR: f64 = 1e-2;

const ZERO: Complex64 = Complex64::new(0.0, 0.0);

/// A complex scalar field, possibly multi-valued.
pub trait ScalarField: Sync {
    fn value(&self, x: &FourVector) -> Result<Complex64>;

    /// `S(to) - S(from)` for nearby points.
    fn increment(&self, from: &FourVector, to: &FourVector) -> Result<Complex64> {
        Ok(self.value(to)? - self.value(from)?)
    }

    /// Length over which the field varies appreciably near `x`.
    fn length_scale(&self, _x: &FourVector) -> Result<f64> {
        Ok(1.0)
    }

    fn singular_set(&self) -> String {
        "none".into()
    }
}

/// A complex covector field `A_mu(x)`.
pub trait CovectorField: Sync {
    fn value(&self, x: &FourVector) -> Result<ComplexVector4>;

    fn length_scale(&self, _x: &FourVector) -> Result<f64> {
        Ok(1.0)
    }
}

/// A field that is the same everywhere.
#[derive(Debug, Clone, Copy)]
pub struct ConstantField(pub Complex64);

impl ScalarField for ConstantField {
    fn value(&self, _x: &FourVector) -> Result<Complex64> {
        Ok(self.0)
    }
}

/// A constant covector.
#[derive(Debug, Clone, Copy)]
pub struct ConstantCovector(pub ComplexVector4);

impl CovectorField for ConstantCovector {
    fn value(&self, _x: &FourVector) -> Result<ComplexVector4> {
        Ok(self.0)
    }
}

/// Wraps a closure as a single-valued field with a fixed length scale.
pub struct FnField<F> {
    pub f: F,
    pub scale: f64,
}

impl<F> ScalarField for FnField<F>
where
    F: Fn(&FourVector) -> Result<Complex64> + Sync,
{
    fn value(&self, x: &FourVector) -> Result<Complex64> {
        (self.f)(x)
    }

    fn length_scale(&self, _x: &FourVector) -> Result<f64> {
        Ok(self.scale)
    }
}

/// Wraps a closure as a covector field with a fixed length scale.
pub struct FnCovector<F> {
    pub f: F,
    pub scale: f64,
}

impl<F> CovectorField for FnCovector<F>
where
    F: Fn(&FourVector) -> Result<ComplexVector4> + Sync,
{
    fn value(&self, x: &FourVector) -> Result<ComplexVector4> {
        (self.f)(x)
    }

    fn length_scale(&self, _x: &FourVector) -> Result<f64> {
        Ok(self.scale)
    }
}

fn system_length_scale(system: &ChargeSystem, x: &FourVector) -> Result<f64> {
    let scales = system.try_each(|c| c.length_scale(x))?;
    Ok(scales.into_iter().fold(f64::INFINITY, f64::min))
}

impl ScalarField for ChargeSystem {
    fn value(&self, x: &FourVector) -> Result<Complex64> {
        Ok(prepotential_system(self, x)?.value)
    }

    fn increment(&self, from: &FourVector, to: &FourVector) -> Result<Complex64> {
        let parts = self.try_each(|c| c.short_increment(from, to))?;
        Ok(parts.into_iter().sum())
    }

    fn length_scale(&self, x: &FourVector) -> Result<f64> {
        system_length_scale(self, x)
    }

    fn singular_set(&self) -> String {
        "observers whose retarded vector has a1 = a2 = 0, for each charge".into()
    }
}

impl ScalarField for Charge {
    fn value(&self, x: &FourVector) -> Result<Complex64> {
        let (z, _) = self.zeta_at(x)?;
        Ok(z.ln() * self.q)
    }

    fn increment(&self, from: &FourVector, to: &FourVector) -> Result<Complex64> {
        self.short_increment(from, to)
    }

    fn length_scale(&self, x: &FourVector) -> Result<f64> {
        Charge::length_scale(self, x)
    }

    fn singular_set(&self) -> String {
        "observers whose retarded vector has a1 = a2 = 0".into()
    }
}

/// The complex four-potential `A = k C dS` of a charge system as a field.
#[derive(Debug, Clone)]
pub struct PotentialField<'a>(pub &'a ChargeSystem);

impl CovectorField for PotentialField<'_> {
    fn value(&self, x: &FourVector) -> Result<ComplexVector4> {
        potential_a_system(self.0, x)
    }

    fn length_scale(&self, x: &FourVector) -> Result<f64> {
        system_length_scale(self.0, x)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum StencilOrder {
    Second,
    Fourth,
    Sixth,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct StencilOptions {
    pub order: StencilOrder,
    /// Step as a fraction of the field's local length scale.
    pub step_factor: f64,
}

impl Default for StencilOptions {
    fn default() -> Self {
        Self {
            order: StencilOrder::Sixth,
            step_factor: DEFAULT_STEP_FACTOR,
        }
    }
}

impl StencilOptions {
    pub fn second_order(step_factor: f64) -> Self {
        Self {
            order: StencilOrder::Second,
            step_factor,
        }
    }
}

/// Symmetric matrix of second partials `S_{,mu nu}`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Hessian(pub [[Complex64; 4]; 4]);

impl Hessian {
    pub fn get(&self, mu: usize, nu: usize) -> Complex64 {
        self.0[mu][nu]
    }

    /// `S_{,00} - S_{,11} - S_{,22} - S_{,33}`.
    pub fn d_alembertian(&self) -> Complex64 {
        self.0[0][0] - self.0[1][1] - self.0[2][2] - self.0[3][3]
    }

    /// `S_{,11} + S_{,22} + S_{,33}`.
    pub fn laplacian(&self) -> Complex64 {
        self.0[1][1] + self.0[2][2] + self.0[3][3]
    }
}

fn offset(x: &FourVector, d: [f64; 4]) -> FourVector {
    *x + FourVector::from_array(d)
}

fn stencil_error(e: Error, d: [f64; 4]) -> Error {
    match e.root() {
        Error::SingularAxis | Error::ObserverOnWorldLine | Error::NoRetardedIntersection(_) => {
            Error::SingularStencil { offset: d }
        }
        _ => e,
    }
}

fn step_for(scale: f64, opts: &StencilOptions) -> Result<f64> {
    let h = opts.step_factor * scale;
    if !(h > 0.0) || !h.is_finite() {
        return Err(Error::SingularStencil { offset: [0.0; 4] });
    }
    Ok(h)
}

/// Second partials by central differences of field increments about `x`.
///
/// Mixed partials come from rings of four diagonal points,
/// `D_k = f(k,k) - f(k,-k) - f(-k,k) + f(-k,-k)`, combined by Richardson
/// extrapolation: `D_1 / 4h^2` (second order), `(16 D_1 - D_2) / 48h^2`
/// (fourth), `(270 D_1 - 27 D_2 + 2 D_3) / 720h^2` (sixth). Axis partials use
/// the matching 3-, 5- and 7-point formulas.
pub fn hessian(field: &dyn ScalarField, x: &FourVector, opts: &StencilOptions) -> Result<Hessian> {
    let scale = field
        .length_scale(x)
        .map_err(|e| stencil_error(e, [0.0; 4]))?;
    let h = step_for(scale, opts)?;
    let inc = |d: [f64; 4]| -> Result<Complex64> {
        field
            .increment(x, &offset(x, d))
            .map_err(|e| stencil_error(e, d))
    };
    let axis = |mu: usize, s: f64| {
        let mut d = [0.0; 4];
        d[mu] = s * h;
        d
    };
    let diag = |mu: usize, nu: usize, s: f64, t: f64| {
        let mut d = [0.0; 4];
        d[mu] = s * h;
        d[nu] += t * h;
        d
    };
    let mut out = [[ZERO; 4]; 4];
    for mu in 0..4 {
        out[mu][mu] = match opts.order {
            StencilOrder::Second => (inc(axis(mu, 1.0))? + inc(axis(mu, -1.0))?) / (h * h),
            StencilOrder::Fourth => {
                let near = inc(axis(mu, 1.0))? + inc(axis(mu, -1.0))?;
                let far = inc(axis(mu, 2.0))? + inc(axis(mu, -2.0))?;
                (near * 16.0 - far) / (12.0 * h * h)
            }
            StencilOrder::Sixth => {
                let l =
                    |k: f64| -> Result<Complex64> { Ok(inc(axis(mu, k))? + inc(axis(mu, -k))?) };
                (l(1.0)? * 270.0 - l(2.0)? * 27.0 + l(3.0)? * 2.0) / (180.0 * h * h)
            }
        };
    }
    for mu in 0..4 {
        for nu in mu + 1..4 {
            let ring =
                |k: f64| -> Result<Complex64> {
                    Ok(inc(diag(mu, nu, k, k))?
                        - inc(diag(mu, nu, k, -k))?
                        - inc(diag(mu, nu, -k, k))?
                        + inc(diag(mu, nu, -k, -k))?)
                };
            let v = match opts.order {
                StencilOrder::Second => ring(1.0)? / (4.0 * h * h),
                StencilOrder::Fourth => (ring(1.0)? * 16.0 - ring(2.0)?) / (48.0 * h * h),
                StencilOrder::Sixth => {
                    (ring(1.0)? * 270.0 - ring(2.0)? * 27.0 + ring(3.0)? * 2.0) / (720.0 * h * h)
                }
            };
            out[mu][nu] = v;
            out[nu][mu] = v;
        }
    }
    Ok(Hessian(out))
}

/// `J[nu][mu] = d_nu A_mu` by central differences.
pub fn covector_jacobian(
    field: &dyn CovectorField,
    x: &FourVector,
    opts: &StencilOptions,
) -> Result<[[Complex64; 4]; 4]> {
    let scale = field
        .length_scale(x)
        .map_err(|e| stencil_error(e, [0.0; 4]))?;
    let h = step_for(scale, opts)?;
    let at = |nu: usize, s: f64| -> Result<ComplexVector4> {
        let mut d = [0.0; 4];
        d[nu] = s * h;
        field.value(&offset(x, d)).map_err(|e| stencil_error(e, d))
    };
    let mut out = [[ZERO; 4]; 4];
    for (nu, row) in out.iter_mut().enumerate() {
        let (p1, m1) = (at(nu, 1.0)?, at(nu, -1.0)?);
        match opts.order {
            StencilOrder::Second => {
                for mu in 0..4 {
                    row[mu] = (p1[mu] - m1[mu]) / (2.0 * h);
                }
            }
            StencilOrder::Fourth => {
                let (p2, m2) = (at(nu, 2.0)?, at(nu, -2.0)?);
                for mu in 0..4 {
                    row[mu] = ((p1[mu] - m1[mu]) * 8.0 - (p2[mu] - m2[mu])) / (12.0 * h);
                }
            }
            StencilOrder::Sixth => {
                let (p2, m2) = (at(nu, 2.0)?, at(nu, -2.0)?);
                let (p3, m3) = (at(nu, 3.0)?, at(nu, -3.0)?);
                for mu in 0..4 {
                    row[mu] = ((p1[mu] - m1[mu]) * 45.0 - (p2[mu] - m2[mu]) * 9.0
                        + (p3[mu] - m3[mu]))
                        / (60.0 * h);
                }
            }
        }
    }
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn poly(x: &FourVector) -> Result<Complex64> {
        // S = t^2 - 2 x y + 3 z^2 + i (x t + y^2)
        Ok(Complex64::new(
            x.x0 * x.x0 - 2.0 * x.x1 * x.x2 + 3.0 * x.x3 * x.x3,
            x.x1 * x.x0 + x.x2 * x.x2,
        ))
    }

    #[test]
    fn sixth_order_is_exact_on_degree_six() {
        // S = t^6 + x^3 y^3 + i z^4 t^2
        let f = FnField {
            f: |x: &FourVector| {
                Ok(Complex64::new(
                    x.x0.powi(6) + x.x1.powi(3) * x.x2.powi(3),
                    x.x3.powi(4) * x.x0 * x.x0,
                ))
            },
            scale: 1.0,
        };
        let x = FourVector::new(0.7, -0.4, 0.9, 0.5);
        let h = hessian(&f, &x, &StencilOptions::default()).unwrap();
        let (t, a, b, z) = (x.x0, x.x1, x.x2, x.x3);
        let expect = [
            (0, 0, Complex64::new(30.0 * t.powi(4), 2.0 * z.powi(4))),
            (1, 2, Complex64::new(9.0 * a * a * b * b, 0.0)),
            (1, 1, Complex64::new(6.0 * a * b.powi(3), 0.0)),
            (0, 3, Complex64::new(0.0, 8.0 * z.powi(3) * t)),
            (3, 3, Complex64::new(0.0, 12.0 * z * z * t * t)),
        ];
        for (mu, nu, v) in expect {
            assert!(
                (h.get(mu, nu) - v).norm() < 1e-9,
                "{mu}{nu}: {} vs {v}",
                h.get(mu, nu)
            );
        }
    }

    #[test]
    fn hessian_of_quadratic_is_exact() {
        let f = FnField {
            f: poly,
            scale: 1.0,
        };
        let x = FourVector::new(0.3, -1.0, 2.0, 0.5);
        for opts in [
            StencilOptions::default(),
            StencilOptions::second_order(1e-2),
        ] {
            let h = hessian(&f, &x, &opts).unwrap();
            let expect = [
                [2.0, 0.0, 0.0, 0.0],
                [0.0, 0.0, -2.0, 0.0],
                [0.0, -2.0, 0.0, 0.0],
                [0.0, 0.0, 0.0, 6.0],
            ];
            for mu in 0..4 {
                for nu in 0..4 {
                    assert!((h.get(mu, nu).re - expect[mu][nu]).abs() < 1e-6);
                }
            }
            assert!((h.get(0, 1).im - 1.0).abs() < 1e-6);
            assert!((h.get(2, 2).im - 2.0).abs() < 1e-6);
        }
    }

    #[test]
    fn constant_field_has_zero_hessian() {
        let h = hessian(
            &ConstantField(Complex64::new(2.0, -1.0)),
            &FourVector::default(),
            &StencilOptions::default(),
        )
        .unwrap();
        assert_eq!(h.d_alembertian(), ZERO);
        assert_eq!(h.laplacian(), ZERO);
    }

    #[test]
    fn jacobian_of_linear_covector() {
        let f = FnCovector {
            f: |x: &FourVector| {
                Ok([
                    Complex64::new(x.x1, 0.0),
                    Complex64::new(0.0, 2.0 * x.x0),
                    Complex64::new(x.x3 * 3.0, 0.0),
                    Complex64::new(0.0, 0.0),
                ])
            },
            scale: 1.0,
        };
        let j = covector_jacobian(
            &f,
            &FourVector::new(1.0, 2.0, 3.0, 4.0),
            &StencilOptions::default(),
        )
        .unwrap();
        assert!((j[1][0].re - 1.0).abs() < 1e-10);
        assert!((j[0][1].im - 2.0).abs() < 1e-10);
        assert!((j[3][2].re - 3.0).abs() < 1e-10);
        assert!(j[2][2].norm() < 1e-12);
    }

    #[test]
    fn singular_stencil_reported() {
        let ch = Charge::at_rest(1.0, [0.0; 3]).unwrap();
        // close enough to the axis that the step overlaps nothing singular,
        // but the centre itself is on the axis
        let err = hessian(
            &ch,
            &FourVector::new(0.0, 0.0, 0.0, 1.0),
            &StencilOptions::default(),
        )
        .unwrap_err();
        assert!(matches!(err, Error::SingularStencil { .. }));
    }
}
