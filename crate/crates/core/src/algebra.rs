//! Complex 4x4 algebra of the Majorana-Oppenheimer matrices.
//!
//! Matrices are indexed `[row][column]` = `(M)^mu_nu` with `mu` the row.
//! The boost generators `rho^j` and rotation generators `sigma^j = i rho^j`
//! generate the half representation whose group elements are
//! `Upsilon^j(psi) = exp(rho^j psi)`; together with the complex conjugate
//! half they reproduce the real boosts: `Lambda^j = Upsilon^j * conj(Upsilon^j)`.

use std::fmt;
use std::ops::{Add, Index, IndexMut, Mul, Neg, Sub};

use num_complex::Complex64;

use crate::error::Result;
use crate::spacetime::{check_axis, LorentzMatrix};

/// Entrywise tolerance for the exact-constant relations.
pub const RELATION_TOL: f64 = 1e-14;

const ZERO: Complex64 = Complex64::new(0.0, 0.0);
const ONE: Complex64 = Complex64::new(1.0, 0.0);
const HALF: Complex64 = Complex64::new(0.5, 0.0);
const I_HALF: Complex64 = Complex64::new(0.0, 0.5);

/// A complex 4x4 matrix.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ComplexMatrix4(pub [[Complex64; 4]; 4]);

/// A complex four-component column.
pub type ComplexVector4 = [Complex64; 4];

impl ComplexMatrix4 {
    pub fn zero() -> Self {
        ComplexMatrix4([[ZERO; 4]; 4])
    }

    pub fn identity() -> Self {
        let mut m = Self::zero();
        for i in 0..4 {
            m.0[i][i] = ONE;
        }
        m
    }

    pub fn from_real(m: &LorentzMatrix) -> Self {
        let mut out = Self::zero();
        for i in 0..4 {
            for j in 0..4 {
                out.0[i][j] = Complex64::new(m.0[i][j], 0.0);
            }
        }
        out
    }

    pub fn conj(&self) -> Self {
        self.map(|z| z.conj())
    }

    pub fn transpose(&self) -> Self {
        let mut out = Self::zero();
        for i in 0..4 {
            for j in 0..4 {
                out.0[i][j] = self.0[j][i];
            }
        }
        out
    }

    pub fn map(&self, f: impl Fn(Complex64) -> Complex64) -> Self {
        let mut out = *self;
        for row in out.0.iter_mut() {
            for e in row.iter_mut() {
                *e = f(*e);
            }
        }
        out
    }

    pub fn scale(&self, s: Complex64) -> Self {
        self.map(|z| z * s)
    }

    pub fn apply(&self, v: &ComplexVector4) -> ComplexVector4 {
        let mut out = [ZERO; 4];
        for (o, row) in out.iter_mut().zip(self.0.iter()) {
            *o = row.iter().zip(v.iter()).map(|(m, x)| m * x).sum();
        }
        out
    }

    pub fn max_abs(&self) -> f64 {
        self.0
            .iter()
            .flatten()
            .map(|z| z.norm())
            .fold(0.0, f64::max)
    }

    pub fn max_abs_diff(&self, other: &ComplexMatrix4) -> f64 {
        (*self - *other).max_abs()
    }

    pub fn is_finite(&self) -> bool {
        self.0.iter().flatten().all(|z| z.is_finite())
    }

    /// Real part, when the imaginary part vanishes to `tol`.
    pub fn to_real(&self, tol: f64) -> Option<LorentzMatrix> {
        let mut out = [[0.0; 4]; 4];
        for i in 0..4 {
            for j in 0..4 {
                let z = self.0[i][j];
                if z.im.abs() > tol {
                    return None;
                }
                out[i][j] = z.re;
            }
        }
        Some(LorentzMatrix(out))
    }
}

impl Index<(usize, usize)> for ComplexMatrix4 {
    type Output = Complex64;
    fn index(&self, (r, c): (usize, usize)) -> &Complex64 {
        &self.0[r][c]
    }
}

impl IndexMut<(usize, usize)> for ComplexMatrix4 {
    fn index_mut(&mut self, (r, c): (usize, usize)) -> &mut Complex64 {
        &mut self.0[r][c]
    }
}

impl Add for ComplexMatrix4 {
    type Output = ComplexMatrix4;
    fn add(self, o: ComplexMatrix4) -> ComplexMatrix4 {
        let mut out = self;
        for i in 0..4 {
            for j in 0..4 {
                out.0[i][j] += o.0[i][j];
            }
        }
        out
    }
}

impl Sub for ComplexMatrix4 {
    type Output = ComplexMatrix4;
    fn sub(self, o: ComplexMatrix4) -> ComplexMatrix4 {
        let mut out = self;
        for i in 0..4 {
            for j in 0..4 {
                out.0[i][j] -= o.0[i][j];
            }
        }
        out
    }
}

impl Neg for ComplexMatrix4 {
    type Output = ComplexMatrix4;
    fn neg(self) -> ComplexMatrix4 {
        self.map(|z| -z)
    }
}

impl Mul for ComplexMatrix4 {
    type Output = ComplexMatrix4;
    fn mul(self, o: ComplexMatrix4) -> ComplexMatrix4 {
        let mut out = ComplexMatrix4::zero();
        for i in 0..4 {
            for j in 0..4 {
                out.0[i][j] = (0..4).map(|k| self.0[i][k] * o.0[k][j]).sum();
            }
        }
        out
    }
}

impl Mul<Complex64> for ComplexMatrix4 {
    type Output = ComplexMatrix4;
    fn mul(self, s: Complex64) -> ComplexMatrix4 {
        self.scale(s)
    }
}

impl Mul<f64> for ComplexMatrix4 {
    type Output = ComplexMatrix4;
    fn mul(self, s: f64) -> ComplexMatrix4 {
        self.scale(Complex64::new(s, 0.0))
    }
}

impl fmt::Display for ComplexMatrix4 {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for row in &self.0 {
            let cells: Vec<String> = row
                .iter()
                .map(|z| format!("{:+.3}{:+.3}i", z.re, z.im))
                .collect();
            writeln!(f, "[{}]", cells.join(", "))?;
        }
        Ok(())
    }
}

pub fn commutator(a: &ComplexMatrix4, b: &ComplexMatrix4) -> ComplexMatrix4 {
    *a * *b - *b * *a
}

pub fn anticommutator(a: &ComplexMatrix4, b: &ComplexMatrix4) -> ComplexMatrix4 {
    *a * *b + *b * *a
}

/// Levi-Civita symbol on 1-based indices, `eps(1,2,3) = +1`.
pub fn levi_civita(j: usize, k: usize, l: usize) -> f64 {
    match (j, k, l) {
        (1, 2, 3) | (2, 3, 1) | (3, 1, 2) => 1.0,
        (3, 2, 1) | (1, 3, 2) | (2, 1, 3) => -1.0,
        _ => 0.0,
    }
}

fn from_entries(entries: &[((usize, usize), Complex64)]) -> ComplexMatrix4 {
    let mut m = ComplexMatrix4::zero();
    for &((r, c), z) in entries {
        m.0[r][c] = z;
    }
    m
}

/// Boost generator `rho^j`, including the overall factor 1/2.
pub fn rho(j: usize) -> Result<ComplexMatrix4> {
    check_axis(j)?;
    Ok(match j {
        1 => from_entries(&[
            ((0, 1), HALF),
            ((1, 0), HALF),
            ((2, 3), -I_HALF),
            ((3, 2), I_HALF),
        ]),
        2 => from_entries(&[
            ((0, 2), HALF),
            ((1, 3), I_HALF),
            ((2, 0), HALF),
            ((3, 1), -I_HALF),
        ]),
        _ => from_entries(&[
            ((0, 3), HALF),
            ((1, 2), -I_HALF),
            ((2, 1), I_HALF),
            ((3, 0), HALF),
        ]),
    })
}

/// Complex conjugate generator `conj(rho^j)`.
pub fn rho_bar(j: usize) -> Result<ComplexMatrix4> {
    Ok(rho(j)?.conj())
}

/// Rotation generator `sigma^j = i rho^j`.
pub fn sigma(j: usize) -> Result<ComplexMatrix4> {
    Ok(rho(j)?.scale(Complex64::i()))
}

/// Conjugate-half rotation generator `conj(sigma^j) = -i conj(rho^j)`.
pub fn sigma_bar(j: usize) -> Result<ComplexMatrix4> {
    Ok(sigma(j)?.conj())
}

/// The conjugation `C = 2 conj(rho^3)`, an involution commuting with every `rho^j`.
pub fn conjugation_c() -> ComplexMatrix4 {
    rho_bar(3).expect("axis 3 is valid") * 2.0
}

/// `alpha_j = rho^j C`.
pub fn alpha(j: usize) -> Result<ComplexMatrix4> {
    Ok(rho(j)? * conjugation_c())
}

/// Half boost `exp(rho^j psi) = cosh(psi/2) I + sinh(psi/2) 2 rho^j`,
/// closed form because `(2 rho^j)^2 = I`.
pub fn upsilon(j: usize, psi: f64) -> Result<ComplexMatrix4> {
    let r = rho(j)?;
    let half = 0.5 * psi;
    Ok(ComplexMatrix4::identity() * half.cosh() + r * (2.0 * half.sinh()))
}

/// Conjugate half boost `exp(conj(rho^j) psi)`.
pub fn upsilon_bar(j: usize, psi: f64) -> Result<ComplexMatrix4> {
    Ok(upsilon(j, psi)?.conj())
}

/// Half rotation `exp(sigma^j theta) = cos(theta/2) I + sin(theta/2) 2 sigma^j`,
/// since `(2 sigma^j)^2 = -I`.
pub fn half_rotation(j: usize, theta: f64) -> Result<ComplexMatrix4> {
    let s = sigma(j)?;
    let half = 0.5 * theta;
    Ok(ComplexMatrix4::identity() * half.cos() + s * (2.0 * half.sin()))
}

/// Full boost `exp((rho^j + conj(rho^j)) psi)`.
///
/// The generator `K = rho^j + conj(rho^j)` satisfies `K^3 = K`, so
/// `exp(K psi) = I + sinh(psi) K + (cosh(psi) - 1) K^2`.
pub fn lambda_boost(j: usize, psi: f64) -> Result<ComplexMatrix4> {
    let k = rho(j)? + rho_bar(j)?;
    let k2 = k * k;
    Ok(ComplexMatrix4::identity() + k * psi.sinh() + k2 * (psi.cosh() - 1.0))
}

/// Outcome of one family of algebraic relations.
#[derive(Debug, Clone, PartialEq)]
pub struct RelationFamily {
    pub name: &'static str,
    pub relation: &'static str,
    /// Number of index combinations checked.
    pub checks: usize,
    /// Sign stated in the relation (`None` for sign-free identities).
    pub stated_sign: Option<i8>,
    /// Max entry deviation with the stated sign.
    pub max_deviation: f64,
    /// Max entry deviation with the sign flipped.
    pub max_deviation_flipped: Option<f64>,
    /// The sign that actually holds, if either does.
    pub validated_sign: Option<i8>,
    pub tolerance: f64,
}

impl RelationFamily {
    pub fn holds(&self) -> bool {
        self.max_deviation <= self.tolerance
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct RelationReport {
    pub families: Vec<RelationFamily>,
}

impl RelationReport {
    pub fn all_hold(&self) -> bool {
        self.families.iter().all(RelationFamily::holds)
    }

    pub fn family(&self, name: &str) -> Option<&RelationFamily> {
        self.families.iter().find(|f| f.name == name)
    }

    pub fn max_deviation(&self) -> f64 {
        self.families
            .iter()
            .map(|f| f.max_deviation)
            .fold(0.0, f64::max)
    }
}

type Gen = fn(usize) -> Result<ComplexMatrix4>;

fn all(g: Gen) -> [ComplexMatrix4; 3] {
    [g(1).unwrap(), g(2).unwrap(), g(3).unwrap()]
}

/// `[A^j, B^k] = sign * eps^{jk}_l C^l` over all nine (j, k).
fn signed_commutator_family(
    name: &'static str,
    relation: &'static str,
    a: Gen,
    b: Gen,
    c: Gen,
    stated: i8,
) -> RelationFamily {
    let (a, b, c) = (all(a), all(b), all(c));
    let mut dev = [0.0f64; 2];
    for j in 1..=3 {
        for k in 1..=3 {
            let lhs = commutator(&a[j - 1], &b[k - 1]);
            let mut rhs = ComplexMatrix4::zero();
            for l in 1..=3 {
                rhs = rhs + c[l - 1] * levi_civita(j, k, l);
            }
            for (d, s) in dev.iter_mut().zip([stated as f64, -(stated as f64)]) {
                *d = d.max(lhs.max_abs_diff(&(rhs * s)));
            }
        }
    }
    let validated = if dev[0] <= RELATION_TOL {
        Some(stated)
    } else if dev[1] <= RELATION_TOL {
        Some(-stated)
    } else {
        None
    };
    RelationFamily {
        name,
        relation,
        checks: 9,
        stated_sign: Some(stated),
        max_deviation: dev[0],
        max_deviation_flipped: Some(dev[1]),
        validated_sign: validated,
        tolerance: RELATION_TOL,
    }
}

fn plain_family(
    name: &'static str,
    relation: &'static str,
    checks: usize,
    max_deviation: f64,
) -> RelationFamily {
    RelationFamily {
        name,
        relation,
        checks,
        stated_sign: None,
        max_deviation,
        max_deviation_flipped: None,
        validated_sign: None,
        tolerance: RELATION_TOL,
    }
}

/// `{A^j, A^l} = (delta_jl / 2) I` over all nine pairs.
fn anticommutator_family(name: &'static str, relation: &'static str, a: Gen) -> RelationFamily {
    let a = all(a);
    let mut dev = 0.0f64;
    for j in 0..3 {
        for l in 0..3 {
            let expect = if j == l {
                ComplexMatrix4::identity() * 0.5
            } else {
                ComplexMatrix4::zero()
            };
            dev = dev.max(anticommutator(&a[j], &a[l]).max_abs_diff(&expect));
        }
    }
    plain_family(name, relation, 9, dev)
}

/// Checks every commutation, anti-commutation and conjugation identity of the
/// generator algebra and reports the max entry deviation per family.
pub fn validate_relations() -> RelationReport {
    let r = all(rho);
    let rb = all(rho_bar);
    let c = conjugation_c();

    let mut kbar = 0.0f64;
    for a in &rb {
        for b in &r {
            kbar = kbar.max(commutator(a, b).max_abs());
        }
    }
    let c_commutes = r
        .iter()
        .map(|m| commutator(&c, m).max_abs())
        .fold(0.0, f64::max);

    RelationReport {
        families: vec![
            signed_commutator_family(
                "sigma-sigma",
                "[sigma^j, sigma^k] = -eps^{jk}_l sigma^l",
                sigma,
                sigma,
                sigma,
                -1,
            ),
            signed_commutator_family(
                "rho-rho",
                "[rho^j, rho^k] = eps^{jk}_l sigma^l",
                rho,
                rho,
                sigma,
                1,
            ),
            signed_commutator_family(
                "sigma-rho",
                "[sigma^j, rho^k] = eps^{jk}_l rho^l",
                sigma,
                rho,
                rho,
                1,
            ),
            signed_commutator_family(
                "rhobar-rhobar",
                "[conj(rho^j), conj(rho^k)] = eps^{jk}_l conj(sigma^l)",
                rho_bar,
                rho_bar,
                sigma_bar,
                1,
            ),
            plain_family("rhobar-rho", "[conj(rho^j), rho^l] = 0", 9, kbar),
            anticommutator_family(
                "rho-anticommutator",
                "{rho^j, rho^l} = (delta^{jl}/2) I",
                rho,
            ),
            anticommutator_family(
                "rhobar-anticommutator",
                "{conj(rho^j), conj(rho^l)} = (delta^{jl}/2) I",
                rho_bar,
            ),
            anticommutator_family(
                "alpha-anticommutator",
                "{alpha_j, alpha_l} = (delta_{jl}/2) I",
                alpha,
            ),
            plain_family(
                "c-squared",
                "C C = I",
                1,
                (c * c).max_abs_diff(&ComplexMatrix4::identity()),
            ),
            plain_family("c-rho", "[C, rho^j] = 0", 3, c_commutes),
        ],
    }
}
