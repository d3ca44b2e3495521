//! Named verification families. Each returns a [`CheckResult`] made of one
//! or more legs with a measured deviation and a tolerance.

use std::f64::consts::PI;
use std::time::Instant;

use num_complex::Complex64;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::Serialize;

use prepot::aharonov::{ab_phase_report, winding_number};
use prepot::algebra::{lambda_boost, upsilon, upsilon_bar, validate_relations};
use prepot::faraday::{
    boosted_coulomb_for, claim1_covariance_check, coulomb_oracle, faraday_from_a,
    faraday_from_hessian, faraday_uniform_for, FaradayVector,
};
use prepot::field::{hessian, PotentialField, StencilOptions, StencilOrder};
use prepot::prepotential::{complexify, delta_s_along_path, zeta_of, zeta_of_complex};
use prepot::{Charge, ChargeSystem, FourVector, Path, WorldLine};

pub const CHECK_NAMES: &[&str] = &[
    "matrix-relations",
    "boost-decomposition",
    "zeta-invariance",
    "claim1-covariance",
    "rest-charge-field",
    "uniform-motion-triangle",
    "wave-residual",
    "vacuum-maxwell",
    "route-equivalence",
    "loop-phase",
];

pub const BOOST_RAPIDITIES: [f64; 6] = [-2.0, -1.0, -0.25, 0.25, 1.0, 2.0];
pub const ZETA_RAPIDITIES: [f64; 5] = [-2.0, -0.75, 0.25, 1.0, 2.0];
pub const ZETA_SAMPLES: usize = 1000;
pub const COVARIANCE_SAMPLES: usize = 100;
pub const SHELL_SAMPLES: usize = 200;
pub const TRIANGLE_SPEEDS: [f64; 3] = [0.1, 0.5, 0.9];
pub const TRIANGLE_SAMPLES: usize = 50;
pub const RESIDUAL_SAMPLES: usize = 50;
pub const ROUTE_SAMPLES: usize = 100;
pub const RANDOM_LOOPS: usize = 50;
/// Second-order step factors `h, h/2, h/4` for the convergence-order leg.
pub const CONVERGENCE_STEPS: [f64; 3] = [4e-2, 2e-2, 1e-2];

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Leg {
    pub name: String,
    pub max_deviation: f64,
    pub tolerance: f64,
    pub samples: usize,
    pub passed: bool,
}

impl Leg {
    pub fn new(
        name: impl Into<String>,
        max_deviation: f64,
        tolerance: f64,
        samples: usize,
    ) -> Self {
        Self {
            name: name.into(),
            max_deviation,
            tolerance,
            samples,
            // NaN deviations fail
            passed: max_deviation <= tolerance,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct CheckResult {
    pub name: String,
    pub passed: bool,
    pub legs: Vec<Leg>,
    pub notes: Vec<String>,
    pub elapsed_ms: f64,
}

impl CheckResult {
    fn new(name: &str, legs: Vec<Leg>, notes: Vec<String>) -> Self {
        Self {
            name: name.into(),
            passed: !legs.is_empty() && legs.iter().all(|l| l.passed),
            legs,
            notes,
            elapsed_ms: 0.0,
        }
    }

    /// The leg with the largest deviation-to-tolerance ratio.
    pub fn worst(&self) -> Option<&Leg> {
        self.legs.iter().max_by(|a, b| {
            let ra = a.max_deviation / a.tolerance;
            let rb = b.max_deviation / b.tolerance;
            ra.partial_cmp(&rb).unwrap_or(std::cmp::Ordering::Greater)
        })
    }
}

/// Inputs shared by all families.
#[derive(Debug, Clone)]
pub struct CheckContext {
    pub seed: u64,
    pub tolerance_scale: f64,
    /// Loops for `loop-phase`; built-in loops when empty.
    pub loops: Vec<(String, Path)>,
    /// Charge used by `loop-phase`; a unit charge at rest at the origin when `None`.
    pub loop_charge: Option<Charge>,
}

impl CheckContext {
    pub fn new(seed: u64) -> Self {
        Self {
            seed,
            tolerance_scale: 1.0,
            loops: Vec::new(),
            loop_charge: None,
        }
    }

    fn tol(&self, t: f64) -> f64 {
        t * self.tolerance_scale
    }

    /// Independent stream per family so adding a family never shifts another's samples.
    fn rng(&self, family: &str) -> ChaCha8Rng {
        let salt = family.bytes().fold(0xcbf2_9ce4_8422_2325u64, |h, b| {
            (h ^ b as u64).wrapping_mul(0x100_0000_01b3)
        });
        ChaCha8Rng::seed_from_u64(self.seed ^ salt)
    }
}

pub fn run_check(name: &str, ctx: &CheckContext) -> Option<CheckResult> {
    let start = Instant::now();
    let mut result = match name {
        "matrix-relations" => matrix_relations(ctx),
        "boost-decomposition" => boost_decomposition(ctx),
        "zeta-invariance" => zeta_invariance(ctx),
        "claim1-covariance" => claim1_covariance(ctx),
        "rest-charge-field" => rest_charge_field(ctx),
        "uniform-motion-triangle" => uniform_motion_triangle(ctx),
        "wave-residual" => wave_residual(ctx),
        "vacuum-maxwell" => vacuum_maxwell(ctx),
        "route-equivalence" => route_equivalence(ctx),
        "loop-phase" => loop_phase(ctx),
        _ => return None,
    };
    result.elapsed_ms = start.elapsed().as_secs_f64() * 1e3;
    Some(result)
}

fn unit_vector(rng: &mut ChaCha8Rng, max_abs_cos: f64) -> [f64; 3] {
    let cos_t: f64 = rng.random_range(-max_abs_cos..max_abs_cos);
    let phi: f64 = rng.random_range(0.0..2.0 * PI);
    let sin_t = (1.0 - cos_t * cos_t).sqrt();
    [sin_t * phi.cos(), sin_t * phi.sin(), cos_t]
}

/// Random future null vector at least ~8 degrees off the singular axis.
pub fn random_null_vector(rng: &mut ChaCha8Rng) -> FourVector {
    let r: f64 = rng.random_range(0.1..10.0);
    let n = unit_vector(rng, 0.99);
    FourVector::new(r, r * n[0], r * n[1], r * n[2])
}

pub fn random_faraday(rng: &mut ChaCha8Rng) -> FaradayVector {
    let mut c = || Complex64::new(rng.random_range(-5.0..5.0), rng.random_range(-5.0..5.0));
    FaradayVector::new(c(), c(), c())
}

pub fn matrix_relations(ctx: &CheckContext) -> CheckResult {
    let report = validate_relations();
    let mut notes = Vec::new();
    let legs = report
        .families
        .iter()
        .map(|f| {
            if !f.holds() {
                if let (Some(flipped), Some(sign)) = (f.max_deviation_flipped, f.validated_sign) {
                    notes.push(format!(
                        "{}: stated relation `{}` deviates by {:.3e}; with the opposite sign ({sign:+}) it holds to {flipped:.3e}",
                        f.name, f.relation, f.max_deviation
                    ));
                }
            }
            Leg::new(f.name, f.max_deviation, ctx.tol(f.tolerance), f.checks)
        })
        .collect();
    CheckResult::new("matrix-relations", legs, notes)
}

pub fn boost_decomposition(ctx: &CheckContext) -> CheckResult {
    let mut dev = 0.0f64;
    let mut n = 0;
    for j in 1..=3 {
        for psi in BOOST_RAPIDITIES {
            let lam = lambda_boost(j, psi).expect("axis");
            let prod = upsilon(j, psi).expect("axis") * upsilon_bar(j, psi).expect("axis");
            dev = dev.max(lam.max_abs_diff(&prod));
            n += 1;
        }
    }
    CheckResult::new(
        "boost-decomposition",
        vec![Leg::new(
            "lambda = upsilon * conj(upsilon)",
            dev,
            ctx.tol(1e-12),
            n,
        )],
        vec![],
    )
}

pub fn zeta_invariance(ctx: &CheckContext) -> CheckResult {
    let mut rng = ctx.rng("zeta-invariance");
    let mut dev = 0.0f64;
    let mut n = 0;
    let mut failures = 0;
    for _ in 0..ZETA_SAMPLES {
        let a = random_null_vector(&mut rng);
        let z = zeta_of(&a).expect("sampled off the axis").value;
        for j in 1..=3 {
            for psi in ZETA_RAPIDITIES {
                let moved = upsilon(j, psi).expect("axis").apply(&complexify(&a));
                match zeta_of_complex(&moved) {
                    Ok(z2) => dev = dev.max((z2.value - z).norm()),
                    Err(_) => failures += 1,
                }
                n += 1;
            }
        }
    }
    let mut legs = vec![Leg::new("|zeta' - zeta|", dev, ctx.tol(1e-10), n)];
    if failures > 0 {
        legs.push(Leg::new("evaluation failures", failures as f64, 0.0, n));
    }
    CheckResult::new("zeta-invariance", legs, vec![])
}

pub fn claim1_covariance(ctx: &CheckContext) -> CheckResult {
    let mut rng = ctx.rng("claim1-covariance");
    let mut dev = 0.0f64;
    let mut n = 0;
    for _ in 0..COVARIANCE_SAMPLES {
        let f = random_faraday(&mut rng);
        for j in 1..=3 {
            let psi = rng.random_range(-2.0..2.0);
            dev = dev.max(
                claim1_covariance_check(&f, j, psi)
                    .expect("axis")
                    .max_deviation,
            );
            n += 1;
        }
    }
    CheckResult::new(
        "claim1-covariance",
        vec![Leg::new("full vs split transform", dev, ctx.tol(1e-12), n)],
        vec![],
    )
}

pub fn rest_charge_field(ctx: &CheckContext) -> CheckResult {
    let mut rng = ctx.rng("rest-charge-field");
    let opts = StencilOptions::default();
    let (mut e_dev, mut b_dev) = (0.0f64, 0.0f64);
    let mut failures = 0;
    for _ in 0..SHELL_SAMPLES {
        // unit charges: the B bound is absolute
        let q = if rng.random_bool(0.5) { 1.0 } else { -1.0 };
        let ch = Charge::at_rest(q, [0.0; 3]).expect("valid charge");
        let r: f64 = rng.random_range(0.5..4.0);
        let n = unit_vector(&mut rng, 0.95);
        let x = FourVector::new(rng.random_range(-1.0..1.0), r * n[0], r * n[1], r * n[2]);
        let oracle = coulomb_oracle(q, x.spatial()).expect("off source");
        match hessian(&ch, &x, &opts) {
            Ok(h) => {
                let f = faraday_from_hessian(&h);
                let e_err = f
                    .e()
                    .iter()
                    .zip(oracle.e())
                    .map(|(a, b)| (a - b).powi(2))
                    .sum::<f64>()
                    .sqrt();
                let e_norm = oracle.e().iter().map(|v| v * v).sum::<f64>().sqrt();
                e_dev = e_dev.max(e_err / e_norm);
                b_dev = b_dev.max(f.b().iter().map(|v| v.abs()).fold(0.0, f64::max));
            }
            Err(_) => failures += 1,
        }
    }
    let mut legs = vec![
        Leg::new("E relative", e_dev, ctx.tol(1e-6), SHELL_SAMPLES),
        Leg::new("B absolute", b_dev, ctx.tol(1e-8), SHELL_SAMPLES),
    ];
    if failures > 0 {
        legs.push(Leg::new(
            "evaluation failures",
            failures as f64,
            0.0,
            SHELL_SAMPLES,
        ));
    }
    CheckResult::new("rest-charge-field", legs, vec![])
}

/// A charge through the origin at `t = 0` with velocity `v` and an observer
/// at `t = 0` whose retarded vector keeps clear of the singular axis.
fn moving_sample(rng: &mut ChaCha8Rng, speed: f64) -> (Charge, FourVector) {
    let dir = unit_vector(rng, 1.0);
    let v = dir.map(|d| d * speed);
    let line = WorldLine::uniform_from_velocity(FourVector::default(), v).expect("subluminal");
    let q = rng.random_range(0.2..3.0);
    let ch = Charge::new(q, line).expect("valid charge");
    loop {
        let r: f64 = rng.random_range(0.5..4.0);
        let n = unit_vector(rng, 1.0);
        let x = FourVector::new(0.0, r * n[0], r * n[1], r * n[2]);
        if let Ok(sol) = ch.retarded(&x) {
            if sol.a.x1.hypot(sol.a.x2) > 0.2 * sol.a.spatial_norm() {
                return (ch, x);
            }
        }
    }
}

pub fn uniform_motion_triangle(ctx: &CheckContext) -> CheckResult {
    let mut rng = ctx.rng("uniform-motion-triangle");
    let opts = StencilOptions::default();
    let mut legs = Vec::new();
    let mut notes = Vec::new();
    for speed in TRIANGLE_SPEEDS {
        let (mut s_f, mut s_o, mut f_o) = (0.0f64, 0.0f64, 0.0f64);
        let mut failures = 0;
        for _ in 0..TRIANGLE_SAMPLES {
            let (ch, x) = moving_sample(&mut rng, speed);
            let oracle = boosted_coulomb_for(&ch, &x).expect("off source");
            let formula = faraday_uniform_for(&ch, &x).expect("retarded branch");
            match hessian(&ch, &x, &opts) {
                Ok(h) => {
                    let from_s = faraday_from_hessian(&h);
                    s_f = s_f.max(from_s.relative_deviation(&formula));
                    s_o = s_o.max(from_s.relative_deviation(&oracle));
                }
                Err(_) => failures += 1,
            }
            f_o = f_o.max(formula.relative_deviation(&oracle));
        }
        legs.push(Leg::new(
            format!("v={speed}: S-route vs closed form"),
            s_f,
            ctx.tol(1e-4),
            TRIANGLE_SAMPLES,
        ));
        legs.push(Leg::new(
            format!("v={speed}: S-route vs oracle"),
            s_o,
            ctx.tol(1e-4),
            TRIANGLE_SAMPLES,
        ));
        legs.push(Leg::new(
            format!("v={speed}: closed form vs oracle"),
            f_o,
            ctx.tol(1e-10),
            TRIANGLE_SAMPLES,
        ));
        if failures > 0 {
            notes.push(format!("v={speed}: {failures} stencil failures"));
            legs.push(Leg::new(
                format!("v={speed}: evaluation failures"),
                failures as f64,
                0.0,
                TRIANGLE_SAMPLES,
            ));
        }
    }
    CheckResult::new("uniform-motion-triangle", legs, notes)
}

/// Max of `|residual| / (|q| / |a|^2)` over sampled points, where `which`
/// picks the residual from the Hessian.
fn scaled_residual<F>(
    samples: &[(Charge, FourVector)],
    opts: &StencilOptions,
    which: F,
) -> (f64, usize)
where
    F: Fn(&prepot::Hessian) -> Complex64,
{
    let mut dev = 0.0f64;
    let mut failures = 0;
    for (ch, x) in samples {
        let scale = ch
            .retarded(x)
            .map(|s| ch.q.abs() / s.a.spatial_norm().powi(2));
        match (hessian(ch, x, opts), scale) {
            (Ok(h), Ok(scale)) => dev = dev.max(which(&h).norm() / scale),
            _ => failures += 1,
        }
    }
    (dev, failures)
}

type Samples = Vec<(Charge, FourVector)>;

fn residual_samples(ctx: &CheckContext, family: &str) -> (Samples, Samples) {
    let mut rng = ctx.rng(family);
    let rest = (0..RESIDUAL_SAMPLES)
        .map(|_| moving_sample(&mut rng, 0.0))
        .collect();
    let moving = (0..RESIDUAL_SAMPLES)
        .map(|_| moving_sample(&mut rng, 0.5))
        .collect();
    (rest, moving)
}

/// Observed orders `log2(e(h) / e(h/2))` for the second-order stencil.
pub fn convergence_orders<F>(ch: &Charge, x: &FourVector, which: F) -> [f64; 2]
where
    F: Fn(&prepot::Hessian) -> Complex64,
{
    let e = CONVERGENCE_STEPS.map(|s| {
        let opts = StencilOptions {
            order: StencilOrder::Second,
            step_factor: s,
        };
        hessian(ch, x, &opts)
            .map(|h| which(&h).norm())
            .unwrap_or(f64::NAN)
    });
    [(e[0] / e[1]).log2(), (e[1] / e[2]).log2()]
}

fn order_legs(
    ctx: &CheckContext,
    label: &str,
    which: fn(&prepot::Hessian) -> Complex64,
) -> Vec<Leg> {
    let rest = Charge::at_rest(1.0, [0.0; 3]).expect("valid charge");
    let moving = Charge::new(
        1.0,
        WorldLine::uniform_from_velocity(FourVector::default(), [0.3, -0.2, 0.35])
            .expect("subluminal"),
    )
    .expect("valid charge");
    let x = FourVector::new(0.0, 0.9, 0.6, 0.7);
    [("rest", rest), ("uniform", moving)]
        .into_iter()
        .map(|(name, ch)| {
            let orders = convergence_orders(&ch, &x, which);
            let dev = orders.iter().map(|o| (o - 2.0).abs()).fold(0.0, f64::max);
            Leg::new(
                format!(
                    "{name}: {label} order - 2 (orders {:.3}, {:.3})",
                    orders[0], orders[1]
                ),
                dev,
                ctx.tol(0.2),
                3,
            )
        })
        .collect()
}

pub fn wave_residual(ctx: &CheckContext) -> CheckResult {
    let opts = StencilOptions::default();
    let (rest, moving) = residual_samples(ctx, "wave-residual");
    let mut legs = Vec::new();
    for (name, samples) in [("rest", &rest), ("uniform v=0.5", &moving)] {
        let (dev, failures) = scaled_residual(samples, &opts, |h| h.d_alembertian());
        legs.push(Leg::new(
            format!("{name}: |box S| a^2/q"),
            dev,
            ctx.tol(1e-5),
            samples.len(),
        ));
        if failures > 0 {
            legs.push(Leg::new(
                format!("{name}: evaluation failures"),
                failures as f64,
                0.0,
                samples.len(),
            ));
        }
    }
    legs.extend(order_legs(ctx, "box S", |h| h.d_alembertian()));
    CheckResult::new("wave-residual", legs, vec![])
}

pub fn vacuum_maxwell(ctx: &CheckContext) -> CheckResult {
    let opts = StencilOptions::default();
    let (rest, moving) = residual_samples(ctx, "vacuum-maxwell");
    let mut legs = Vec::new();
    let mut notes = Vec::new();
    for (name, samples) in [("rest", &rest), ("uniform v=0.5", &moving)] {
        let (dev, failures) = scaled_residual(samples, &opts, |h| h.laplacian());
        legs.push(Leg::new(
            format!("{name}: |lap S| a^2/q"),
            dev,
            ctx.tol(1e-5),
            samples.len(),
        ));
        if failures > 0 {
            legs.push(Leg::new(
                format!("{name}: evaluation failures"),
                failures as f64,
                0.0,
                samples.len(),
            ));
        }
    }
    // superposition of resting charges
    let mut rng = ctx.rng("vacuum-maxwell/superposition");
    let sys = ChargeSystem::new(vec![
        Charge::at_rest(1.0, [0.0; 3]).expect("valid"),
        Charge::at_rest(-0.5, [0.4, -0.3, 0.2]).expect("valid"),
        Charge::at_rest(2.0, [-0.6, 0.1, -0.5]).expect("valid"),
    ])
    .expect("non-empty");
    let (mut dev, mut n) = (0.0f64, 0);
    while n < RESIDUAL_SAMPLES {
        let r: f64 = rng.random_range(1.5..4.0);
        let u = unit_vector(&mut rng, 0.9);
        let x = FourVector::new(0.0, r * u[0], r * u[1], r * u[2]);
        if let Ok(h) = hessian(&sys, &x, &opts) {
            dev = dev.max(h.laplacian().norm() * r * r / 3.5);
            n += 1;
        }
    }
    legs.push(Leg::new(
        "rest superposition: |lap S| r^2/sum|q|",
        dev,
        ctx.tol(1e-5),
        n,
    ));
    // what the moving-charge Laplacian equals instead
    let (d, _) = scaled_residual(&moving, &opts, |h| h.laplacian() - h.get(0, 0));
    notes.push(format!(
        "uniform motion: lap S - S,00 stays at {d:.2e} (scaled), so lap S = S,00 != 0 while box S = 0"
    ));
    CheckResult::new("vacuum-maxwell", legs, notes)
}

pub fn route_equivalence(ctx: &CheckContext) -> CheckResult {
    let mut rng = ctx.rng("route-equivalence");
    let opts = StencilOptions::default();
    let (mut dev, mut n, mut failures) = (0.0f64, 0, 0);
    while n < ROUTE_SAMPLES {
        let speed = [0.0, 0.3, 0.7][n % 3];
        let (ch, x) = moving_sample(&mut rng, speed);
        let sys = ChargeSystem::single(ch);
        let from_s = hessian(&sys, &x, &opts).map(|h| faraday_from_hessian(&h));
        let from_a = faraday_from_a(&PotentialField(&sys), &x, &opts);
        match (from_s, from_a) {
            (Ok(s), Ok(a)) => dev = dev.max(a.relative_deviation(&s)),
            _ => failures += 1,
        }
        n += 1;
    }
    let mut legs = vec![Leg::new(
        "S-route vs A-route (relative)",
        dev,
        ctx.tol(1e-8),
        n,
    )];
    if failures > 0 {
        legs.push(Leg::new("evaluation failures", failures as f64, 0.0, n));
    }
    CheckResult::new("route-equivalence", legs, vec![])
}

/// Circles centred on the axis for `turns = -2..=2` (a displaced circle for 0).
pub fn builtin_loops() -> Vec<(String, Path)> {
    let center = FourVector::new(0.0, 0.0, 0.0, 0.5);
    let mut loops = Vec::new();
    for turns in [-2, -1, 1, 2] {
        loops.push((
            format!("circle turns={turns}"),
            Path::circle(center, 1.0, turns, 48).expect("valid loop"),
        ));
    }
    loops.push((
        "displaced circle".into(),
        Path::circle(FourVector::new(0.0, 3.0, 0.0, 0.5), 1.0, 1, 48).expect("valid loop"),
    ));
    loops
}

/// Random star-shaped polygon; about half of them enclose the axis.
pub fn random_loop(rng: &mut ChaCha8Rng) -> Path {
    let turns: i32 = [-2, -1, 1, 2][rng.random_range(0..4)];
    let radius: f64 = rng.random_range(0.5..2.0);
    let (cx, cy) = (
        rng.random_range(-1.5..1.5) * radius,
        rng.random_range(-1.5..1.5) * radius,
    );
    let h: f64 = [-1.0, 0.3, 2.0][rng.random_range(0..3)];
    let bumps: Vec<f64> = (0..3).map(|_| rng.random_range(-0.15..0.15)).collect();
    let n = 16 + rng.random_range(0..40);
    let total = n * turns.unsigned_abs() as usize;
    let pts = (0..total)
        .map(|k| {
            let phi = 2.0 * PI * turns as f64 * k as f64 / total as f64;
            let w: f64 = bumps
                .iter()
                .enumerate()
                .map(|(m, b)| b * ((m + 2) as f64 * phi).sin())
                .sum();
            let r = radius * (1.0 + w);
            FourVector::new(0.0, cx + r * phi.cos(), cy + r * phi.sin(), h)
        })
        .collect();
    Path::new(pts, true).expect("distinct samples")
}

pub fn loop_phase(ctx: &CheckContext) -> CheckResult {
    let charge = ctx
        .loop_charge
        .clone()
        .unwrap_or_else(|| Charge::at_rest(1.0, [0.0; 3]).expect("valid charge"));
    let loops = if ctx.loops.is_empty() {
        builtin_loops()
    } else {
        ctx.loops.clone()
    };
    let mut legs = Vec::new();
    let mut notes = Vec::new();
    let (mut dev, mut errors) = (0.0f64, 0);
    for (name, path) in &loops {
        match ab_phase_report(&charge, path) {
            Ok(r) => {
                dev = dev.max(r.residual / charge.q.abs());
                notes.push(format!(
                    "{name}: dS/(2 pi i q) = {:.12}, winding {}",
                    r.delta_s.im / (2.0 * PI * charge.q),
                    r.winding
                ));
            }
            Err(e) => {
                errors += 1;
                notes.push(format!("{name}: ERROR {e}"));
            }
        }
    }
    legs.push(Leg::new(
        "|dS - 2 pi i q w| / |q|",
        dev,
        ctx.tol(1e-8),
        loops.len(),
    ));
    if errors > 0 {
        legs.push(Leg::new("loop errors", errors as f64, 0.0, loops.len()));
    }

    let mut rng = ctx.rng("loop-phase");
    let (mut mismatches, mut tried, mut rdev) = (0, 0, 0.0f64);
    while tried < RANDOM_LOOPS {
        let path = random_loop(&mut rng);
        let (Ok(inc), Ok(w)) = (
            delta_s_along_path(&charge, &path),
            winding_number(&charge, &path),
        ) else {
            continue;
        };
        tried += 1;
        let unwrapped = (inc.delta_s.im / (2.0 * PI * charge.q)).round() as i64;
        if unwrapped != w {
            mismatches += 1;
        }
        let expected = Complex64::new(0.0, 2.0 * PI * charge.q * w as f64);
        rdev = rdev.max((inc.delta_s - expected).norm() / charge.q.abs());
    }
    legs.push(Leg::new(
        "random loops: oracle vs unwrapped mismatches",
        mismatches as f64,
        0.0,
        tried,
    ));
    legs.push(Leg::new(
        "random loops: |dS - 2 pi i q w| / |q|",
        rdev,
        ctx.tol(1e-8),
        tried,
    ));
    CheckResult::new("loop-phase", legs, notes)
}
