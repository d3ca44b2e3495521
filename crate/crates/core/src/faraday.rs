//! The complex Faraday vector `F = E + iB`: from second derivatives of the
//! pre-potential, from a complex four-potential, and in closed form for a
//! uniformly moving charge. Also the classical oracles, the wave-equation and
//! Laplacian residuals, and the covariance check for the split of the field
//! tensor into its two complex halves.

use num_complex::Complex64;

use crate::algebra::{alpha, lambda_boost, rho, upsilon, upsilon_bar, ComplexMatrix4};
use crate::error::{Error, Result};
use crate::field::{
    covector_jacobian, hessian, CovectorField, Hessian, ScalarField, StencilOptions,
};
use crate::prepotential::{Charge, ChargeSystem, NULL_TOL};
use crate::spacetime::{FourVector, WorldLine, VELOCITY_NORM_TOL};

/// Overall sign of `F_j = s d_nu (alpha_j)^nu_lambda d^lambda S`, fixed by
/// the static Coulomb field.
pub const CONTRACTION_SIGN: f64 = -1.0;

/// Factor `k` in `F_j = k q a_mu (rho^j)^mu_nu u^nu / (a.u)^3` with `a_mu`
/// index-lowered; fixed by the static Coulomb field.
pub const UNIFORM_FORMULA_SCALE: f64 = -2.0;

/// Floor on `a.u / |a|` below which the uniform-motion formula is refused.
pub const DEGENERATE_FLOOR: f64 = 1e-12;

const ETA: [f64; 4] = [1.0, -1.0, -1.0, -1.0];
const ZERO: Complex64 = Complex64::new(0.0, 0.0);

/// Complex three-vector `E + iB`.
#[derive(Debug, Clone, Copy, PartialEq, Default)]
pub struct FaradayVector(pub [Complex64; 3]);

impl FaradayVector {
    pub fn new(f1: Complex64, f2: Complex64, f3: Complex64) -> Self {
        Self([f1, f2, f3])
    }

    pub fn from_e_b(e: [f64; 3], b: [f64; 3]) -> Self {
        Self([0, 1, 2].map(|k| Complex64::new(e[k], b[k])))
    }

    pub fn e(&self) -> [f64; 3] {
        self.0.map(|z| z.re)
    }

    pub fn b(&self) -> [f64; 3] {
        self.0.map(|z| z.im)
    }

    pub fn norm(&self) -> f64 {
        self.0.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt()
    }

    pub fn sub(&self, other: &FaradayVector) -> FaradayVector {
        FaradayVector([0, 1, 2].map(|k| self.0[k] - other.0[k]))
    }

    pub fn scale(&self, s: Complex64) -> FaradayVector {
        FaradayVector(self.0.map(|z| z * s))
    }

    pub fn add(&self, other: &FaradayVector) -> FaradayVector {
        FaradayVector([0, 1, 2].map(|k| self.0[k] + other.0[k]))
    }

    /// `|self - reference| / |reference|`.
    pub fn relative_deviation(&self, reference: &FaradayVector) -> f64 {
        self.sub(reference).norm() / reference.norm()
    }

    pub fn is_finite(&self) -> bool {
        self.0.iter().all(|z| z.is_finite())
    }
}

/// `sum_j F_j rho^j`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ComplexFaradayTensor(pub ComplexMatrix4);

impl ComplexFaradayTensor {
    pub fn from_vector(f: &FaradayVector) -> Self {
        let mut m = ComplexMatrix4::zero();
        for j in 1..=3 {
            m = m + rho(j).expect("valid axis") * f.0[j - 1];
        }
        Self(m)
    }

    /// The conjugate half `sum_j conj(F_j) conj(rho^j)`.
    pub fn conjugate_half(&self) -> ComplexMatrix4 {
        self.0.conj()
    }

    /// The real mixed field tensor `F^beta_alpha`, sum of both halves.
    pub fn field_tensor(&self) -> ComplexMatrix4 {
        self.0 + self.conjugate_half()
    }
}

/// `F_j` from the second partials of `S` through the alpha-matrix contraction.
///
/// Component form:
/// `F_1 = S,13 + i S,02`, `F_2 = S,23 - i S,01`,
/// `F_3 = (S,33 - S,00 - S,11 - S,22) / 2`.
pub fn faraday_from_hessian(h: &Hessian) -> FaradayVector {
    let mut f = [ZERO; 3];
    for (j, fj) in f.iter_mut().enumerate() {
        let a = alpha(j + 1).expect("valid axis");
        let mut sum = ZERO;
        for nu in 0..4 {
            for lam in 0..4 {
                sum += a.0[nu][lam] * ETA[lam] * h.get(nu, lam);
            }
        }
        *fj = sum * CONTRACTION_SIGN;
    }
    FaradayVector(f)
}

/// Third component in the form `(S,00 - S,11 - S,22 + S,33) / 2`. It agrees
/// with [`faraday_from_hessian`] only where `S,00 = 0`, i.e. for static sources.
pub fn f3_static_form(h: &Hessian) -> Complex64 {
    (h.get(0, 0) - h.get(1, 1) - h.get(2, 2) + h.get(3, 3)) * 0.5
}

/// Faraday vector of a (possibly multi-valued) scalar pre-potential field.
pub fn faraday_from_s(
    field: &dyn ScalarField,
    x: &FourVector,
    opts: &StencilOptions,
) -> Result<FaradayVector> {
    Ok(faraday_from_hessian(&hessian(field, x, opts)?))
}

/// `F_j = 2 d^nu (rho^j)^mu_nu A_mu` for a complex covariant potential.
pub fn faraday_from_a(
    field: &dyn CovectorField,
    x: &FourVector,
    opts: &StencilOptions,
) -> Result<FaradayVector> {
    let jac = covector_jacobian(field, x, opts)?;
    let mut f = [ZERO; 3];
    for (j, fj) in f.iter_mut().enumerate() {
        let r = rho(j + 1).expect("valid axis");
        let mut sum = ZERO;
        for mu in 0..4 {
            for nu in 0..4 {
                sum += r.0[mu][nu] * ETA[nu] * jac[nu][mu];
            }
        }
        *fj = sum * 2.0;
    }
    Ok(FaradayVector(f))
}

/// Closed-form field of a charge in uniform motion,
/// `F_j = k q a_mu (rho^j)^mu_nu u^nu / (a.u)^3`.
pub fn faraday_uniform(q: f64, a: &FourVector, u: &FourVector) -> Result<FaradayVector> {
    let aa = a.dot(a);
    let scale2: f64 = a.to_array().iter().map(|c| c * c).sum();
    if aa.abs() > NULL_TOL * scale2 {
        return Err(Error::NotNull { residual: aa.abs() });
    }
    let uu = u.dot(u);
    if (uu - 1.0).abs() > VELOCITY_NORM_TOL || u.x0 <= 0.0 {
        return Err(Error::InvalidWorldLine(format!(
            "four-velocity must be future-pointing with u.u = 1, got {uu}"
        )));
    }
    let au = a.dot(u);
    if !(au > DEGENERATE_FLOOR * scale2.sqrt()) {
        return Err(Error::DegenerateDenominator(au));
    }
    let lowered = a.lowered();
    let uc = u.to_array();
    let mut f = [ZERO; 3];
    for (j, fj) in f.iter_mut().enumerate() {
        let r = rho(j + 1).expect("valid axis");
        let mut sum = ZERO;
        for mu in 0..4 {
            for nu in 0..4 {
                sum += r.0[mu][nu] * (lowered[mu] * uc[nu]);
            }
        }
        *fj = sum * (UNIFORM_FORMULA_SCALE * q / (au * au * au));
    }
    Ok(FaradayVector(f))
}

/// [`faraday_uniform`] at observer `x` using the charge's retarded velocity.
pub fn faraday_uniform_for(charge: &Charge, x: &FourVector) -> Result<FaradayVector> {
    let sol = charge.retarded(x)?;
    faraday_uniform(charge.q, &sol.a, &sol.velocity)
}

/// Electrostatic field `q r / |r|^3`, `B = 0`.
pub fn coulomb_oracle(q: f64, r: [f64; 3]) -> Result<FaradayVector> {
    boosted_coulomb_oracle(q, [0.0; 3], r)
}

/// Field of a charge in uniform motion with velocity `v`, written with the
/// separation `r` from the charge's *present* position:
/// `E = q (1 - v^2) r / (r^2 - |v x r|^2)^{3/2}`, `B = v x E`.
pub fn boosted_coulomb_oracle(q: f64, v: [f64; 3], r: [f64; 3]) -> Result<FaradayVector> {
    let r2 = r[0] * r[0] + r[1] * r[1] + r[2] * r[2];
    if r2 == 0.0 {
        return Err(Error::ObserverOnWorldLine);
    }
    let v2 = v[0] * v[0] + v[1] * v[1] + v[2] * v[2];
    let vxr = cross(v, r);
    let d = r2 - (vxr[0] * vxr[0] + vxr[1] * vxr[1] + vxr[2] * vxr[2]);
    let k = q * (1.0 - v2) / (d * d.sqrt());
    let e = r.map(|c| c * k);
    Ok(FaradayVector::from_e_b(e, cross(v, e)))
}

/// [`boosted_coulomb_oracle`] for a uniform or resting charge observed at `x`.
pub fn boosted_coulomb_for(charge: &Charge, x: &FourVector) -> Result<FaradayVector> {
    let (v, present) = match &charge.line {
        WorldLine::Rest { position } => ([0.0; 3], *position),
        WorldLine::Uniform {
            reference_event,
            velocity_u,
        } => {
            let tau = (x.x0 - reference_event.x0) / velocity_u.x0;
            let ev = *reference_event + *velocity_u * tau;
            (velocity_u.three_velocity(), ev.spatial())
        }
        WorldLine::Sampled(_) => {
            return Err(Error::InvalidWorldLine(
                "present-position oracle needs a rest or uniform line".into(),
            ))
        }
    };
    let r = [x.x1 - present[0], x.x2 - present[1], x.x3 - present[2]];
    boosted_coulomb_oracle(charge.q, v, r)
}

fn cross(a: [f64; 3], b: [f64; 3]) -> [f64; 3] {
    [
        a[1] * b[2] - a[2] * b[1],
        a[2] * b[0] - a[0] * b[2],
        a[0] * b[1] - a[1] * b[0],
    ]
}

/// `S,00 - S,11 - S,22 - S,33` by the stencil.
pub fn wave_residual(
    field: &dyn ScalarField,
    x: &FourVector,
    opts: &StencilOptions,
) -> Result<Complex64> {
    Ok(hessian(field, x, opts)?.d_alembertian())
}

/// `S,11 + S,22 + S,33` by the stencil.
pub fn vacuum_maxwell_residual(
    field: &dyn ScalarField,
    x: &FourVector,
    opts: &StencilOptions,
) -> Result<Complex64> {
    Ok(hessian(field, x, opts)?.laplacian())
}

/// Everything the grid export needs at one point, from a single stencil.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PointEvaluation {
    pub s: Complex64,
    pub field: FaradayVector,
    pub wave_residual: Complex64,
    pub laplacian: Complex64,
}

pub fn evaluate_point(
    system: &ChargeSystem,
    x: &FourVector,
    opts: &StencilOptions,
) -> Result<PointEvaluation> {
    let s = ScalarField::value(system, x)?;
    let h = hessian(system, x, opts)?;
    Ok(PointEvaluation {
        s,
        field: faraday_from_hessian(&h),
        wave_residual: h.d_alembertian(),
        laplacian: h.laplacian(),
    })
}

/// Both sides of the covariance identity under the boost `Lambda^j(psi)`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct CovarianceReport {
    /// `Lambda^-1 (F + conj F) Lambda`.
    pub full: ComplexMatrix4,
    /// `Upsilon^-1 F Upsilon + conj(Upsilon)^-1 conj(F) conj(Upsilon)`.
    pub split: ComplexMatrix4,
    pub max_deviation: f64,
}

/// Transforms the field tensor with the full boost and each half with its
/// own half boost, and compares entrywise.
pub fn claim1_covariance_check(f: &FaradayVector, j: usize, psi: f64) -> Result<CovarianceReport> {
    let tensor = ComplexFaradayTensor::from_vector(f);
    let lam = lambda_boost(j, psi)?;
    let lam_inv = lambda_boost(j, -psi)?;
    let up = upsilon(j, psi)?;
    let up_inv = upsilon(j, -psi)?;
    let upb = upsilon_bar(j, psi)?;
    let upb_inv = upsilon_bar(j, -psi)?;
    let full = lam_inv * tensor.field_tensor() * lam;
    let split = up_inv * tensor.0 * up + upb_inv * tensor.conjugate_half() * upb;
    Ok(CovarianceReport {
        full,
        split,
        max_deviation: full.max_abs_diff(&split),
    })
}
