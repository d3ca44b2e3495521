//! Python bindings (`import pyprepot`).

use num_complex::Complex64;
use pyo3::create_exception;
use pyo3::exceptions::PyValueError;
use pyo3::prelude::*;
use pyo3::types::PyDict;

use prepot::faraday::evaluate_point;
use prepot::field::{PotentialField, StencilOrder};
use prepot::prepotential::{
    continue_along_path, gradient_s, potential_a_system, prepotential_system,
};
use prepot::spacetime::fundamental_boost;
use prepot::{
    ab_phase_report, faraday_from_a, faraday_from_s, validate_relations, winding_number,
    FourVector, StencilOptions, WorldSample,
};

create_exception!(pyprepot, PrePotentialError, PyValueError);

fn err(e: prepot::Error) -> PyErr {
    PrePotentialError::new_err(e.to_string())
}

fn stencil(order: u8, step_factor: Option<f64>) -> Result<StencilOptions, String> {
    let order = match order {
        2 => StencilOrder::Second,
        4 => StencilOrder::Fourth,
        6 => StencilOrder::Sixth,
        o => return Err(format!("stencil order must be 2, 4 or 6, got {o}")),
    };
    let mut opts = StencilOptions {
        order,
        ..StencilOptions::default()
    };
    if let Some(f) = step_factor {
        if !(f.is_finite() && f > 0.0) {
            return Err(format!("step_factor must be positive, got {f}"));
        }
        opts.step_factor = f;
    }
    Ok(opts)
}

fn fv(x: [f64; 4]) -> FourVector {
    FourVector::from_array(x)
}

/// Faraday vector `F = E + iB`.
#[pyclass(name = "FaradayVector", frozen, skip_from_py_object)]
#[derive(Clone)]
struct PyFaraday {
    inner: prepot::FaradayVector,
}

#[pymethods]
impl PyFaraday {
    #[getter]
    fn components(&self) -> [Complex64; 3] {
        self.inner.0
    }

    #[getter]
    fn e(&self) -> [f64; 3] {
        self.inner.e()
    }

    #[getter]
    fn b(&self) -> [f64; 3] {
        self.inner.b()
    }

    fn norm(&self) -> f64 {
        self.inner.norm()
    }

    fn __repr__(&self) -> String {
        format!(
            "FaradayVector(E={:?}, B={:?})",
            self.inner.e(),
            self.inner.b()
        )
    }
}

/// A point charge on a rest, uniform or sampled world-line.
#[pyclass(name = "Charge", frozen, from_py_object)]
#[derive(Clone)]
struct PyCharge {
    inner: prepot::Charge,
}

#[pymethods]
impl PyCharge {
    #[staticmethod]
    fn rest(q: f64, position: [f64; 3]) -> PyResult<Self> {
        let inner = prepot::Charge::at_rest(q, position).map_err(err)?;
        Ok(Self { inner })
    }

    /// Uniform motion through `event` with three-velocity `velocity` (|v| < 1).
    #[staticmethod]
    fn uniform(q: f64, event: [f64; 4], velocity: [f64; 3]) -> PyResult<Self> {
        let line = prepot::WorldLine::uniform_from_velocity(fv(event), velocity).map_err(err)?;
        let inner = prepot::Charge::new(q, line).map_err(err)?;
        Ok(Self { inner })
    }

    /// `samples` is a list of `(tau, [t, x, y, z])`.
    #[staticmethod]
    fn sampled(q: f64, samples: Vec<(f64, [f64; 4])>) -> PyResult<Self> {
        let samples = samples
            .into_iter()
            .map(|(tau, e)| WorldSample { tau, event: fv(e) })
            .collect();
        let line = prepot::WorldLine::sampled(samples).map_err(err)?;
        let inner = prepot::Charge::new(q, line).map_err(err)?;
        Ok(Self { inner })
    }

    #[getter]
    fn q(&self) -> f64 {
        self.inner.q
    }

    /// Retarded null vector `a = x - x(tau_r)`.
    fn retarded(&self, x: [f64; 4]) -> PyResult<[f64; 4]> {
        Ok(self.inner.retarded(&fv(x)).map_err(err)?.a.to_array())
    }

    fn zeta(&self, x: [f64; 4]) -> PyResult<Complex64> {
        Ok(self.inner.zeta_at(&fv(x)).map_err(err)?.0.value)
    }

    fn prepotential(&self, x: [f64; 4]) -> PyResult<Complex64> {
        Ok(
            prepot::prepotential::prepotential_point(&self.inner, &fv(x))
                .map_err(err)?
                .value,
        )
    }

    fn gradient(&self, x: [f64; 4]) -> PyResult<[Complex64; 4]> {
        gradient_s(&self.inner, &fv(x)).map_err(err)
    }

    /// Closed-form field for a rest or uniformly moving charge.
    fn faraday_closed_form(&self, x: [f64; 4]) -> PyResult<PyFaraday> {
        let inner = prepot::faraday::faraday_uniform_for(&self.inner, &fv(x)).map_err(err)?;
        Ok(PyFaraday { inner })
    }

    fn __repr__(&self) -> String {
        format!("Charge(q={}, line={:?})", self.inner.q, self.inner.line)
    }
}

/// Superposition of point charges.
#[pyclass(name = "ChargeSystem", frozen, skip_from_py_object)]
struct PySystem {
    inner: prepot::ChargeSystem,
}

#[pymethods]
impl PySystem {
    #[new]
    fn new(charges: Vec<PyCharge>) -> PyResult<Self> {
        let charges = charges.into_iter().map(|c| c.inner).collect();
        let inner = prepot::ChargeSystem::new(charges).map_err(err)?;
        Ok(Self { inner })
    }

    fn __len__(&self) -> usize {
        self.inner.charges().len()
    }

    fn prepotential(&self, x: [f64; 4]) -> PyResult<Complex64> {
        Ok(prepotential_system(&self.inner, &fv(x)).map_err(err)?.value)
    }

    fn potential(&self, x: [f64; 4]) -> PyResult<[Complex64; 4]> {
        potential_a_system(&self.inner, &fv(x)).map_err(err)
    }

    /// Field from second derivatives of S.
    #[pyo3(signature = (x, order = 6, step_factor = None))]
    fn faraday(&self, x: [f64; 4], order: u8, step_factor: Option<f64>) -> PyResult<PyFaraday> {
        let opts = stencil(order, step_factor).map_err(PyValueError::new_err)?;
        let inner = faraday_from_s(&self.inner, &fv(x), &opts).map_err(err)?;
        Ok(PyFaraday { inner })
    }

    /// Field from the complex potential `A`.
    #[pyo3(signature = (x, order = 6, step_factor = None))]
    fn faraday_from_potential(
        &self,
        x: [f64; 4],
        order: u8,
        step_factor: Option<f64>,
    ) -> PyResult<PyFaraday> {
        let opts = stencil(order, step_factor).map_err(PyValueError::new_err)?;
        let inner = faraday_from_a(&PotentialField(&self.inner), &fv(x), &opts).map_err(err)?;
        Ok(PyFaraday { inner })
    }

    /// S, field and residuals from one stencil, as a dict.
    #[pyo3(signature = (x, order = 6, step_factor = None))]
    fn evaluate<'py>(
        &self,
        py: Python<'py>,
        x: [f64; 4],
        order: u8,
        step_factor: Option<f64>,
    ) -> PyResult<Bound<'py, PyDict>> {
        let opts = stencil(order, step_factor).map_err(PyValueError::new_err)?;
        let p = evaluate_point(&self.inner, &fv(x), &opts).map_err(err)?;
        let d = PyDict::new(py);
        d.set_item("s", p.s)?;
        d.set_item("e", p.field.e())?;
        d.set_item("b", p.field.b())?;
        d.set_item("wave_residual", p.wave_residual)?;
        d.set_item("laplacian", p.laplacian)?;
        Ok(d)
    }
}

/// A polyline of events, open or closed.
#[pyclass(name = "Path", frozen, skip_from_py_object)]
struct PyPath {
    inner: prepot::Path,
}

#[pymethods]
impl PyPath {
    #[new]
    #[pyo3(signature = (points, closed = true))]
    fn new(points: Vec<[f64; 4]>, closed: bool) -> PyResult<Self> {
        let inner = prepot::Path::new(points.into_iter().map(fv).collect(), closed).map_err(err)?;
        Ok(Self { inner })
    }

    #[staticmethod]
    #[pyo3(signature = (center, radius, turns = 1, samples_per_turn = 256))]
    fn circle(
        center: [f64; 4],
        radius: f64,
        turns: i32,
        samples_per_turn: usize,
    ) -> PyResult<Self> {
        let inner =
            prepot::Path::circle(fv(center), radius, turns, samples_per_turn).map_err(err)?;
        Ok(Self { inner })
    }

    fn __len__(&self) -> usize {
        self.inner.points().len()
    }

    #[getter]
    fn closed(&self) -> bool {
        self.inner.is_closed()
    }
}

/// Increment of S around a closed path.
#[pyclass(name = "LoopPhase", frozen, get_all, skip_from_py_object)]
struct PyLoopPhase {
    delta_s: Complex64,
    winding: i64,
    residual: f64,
    samples_used: usize,
    ok: bool,
}

#[pymethods]
impl PyLoopPhase {
    fn __repr__(&self) -> String {
        format!(
            "LoopPhase(delta_s={}, winding={}, residual={:e})",
            self.delta_s, self.winding, self.residual
        )
    }
}

#[pyfunction(name = "winding_number")]
fn py_winding_number(charge: &PyCharge, path: &PyPath) -> PyResult<i64> {
    winding_number(&charge.inner, &path.inner).map_err(err)
}

#[pyfunction]
fn loop_phase(charge: &PyCharge, path: &PyPath) -> PyResult<PyLoopPhase> {
    let r = ab_phase_report(&charge.inner, &path.inner).map_err(err)?;
    Ok(PyLoopPhase {
        delta_s: r.delta_s,
        winding: r.winding,
        residual: r.residual,
        samples_used: r.samples_used,
        ok: r.ok(),
    })
}

/// S at the end of `path`, continued from the principal branch at its start.
#[pyfunction]
fn continue_along(charge: &PyCharge, path: &PyPath) -> PyResult<(Complex64, i64)> {
    let v = continue_along_path(&charge.inner, &path.inner).map_err(err)?;
    Ok((v.value, v.branch_index))
}

/// Real boost along axis `j` (1..=3) with rapidity `psi`, as rows.
#[pyfunction]
fn boost(j: usize, psi: f64) -> PyResult<[[f64; 4]; 4]> {
    Ok(fundamental_boost(j, psi).map_err(err)?.0)
}

/// Relation families of the generator algebra as a list of dicts.
#[pyfunction]
fn relations(py: Python<'_>) -> PyResult<Vec<Bound<'_, PyDict>>> {
    validate_relations()
        .families
        .iter()
        .map(|f| {
            let d = PyDict::new(py);
            d.set_item("name", f.name)?;
            d.set_item("relation", f.relation)?;
            d.set_item("checks", f.checks)?;
            d.set_item("max_deviation", f.max_deviation)?;
            d.set_item("max_deviation_flipped", f.max_deviation_flipped)?;
            d.set_item("holds", f.holds())?;
            Ok(d)
        })
        .collect()
}

#[pymodule]
fn pyprepot(m: &Bound<'_, PyModule>) -> PyResult<()> {
    m.add("PrePotentialError", m.py().get_type::<PrePotentialError>())?;
    m.add_class::<PyCharge>()?;
    m.add_class::<PySystem>()?;
    m.add_class::<PyPath>()?;
    m.add_class::<PyFaraday>()?;
    m.add_class::<PyLoopPhase>()?;
    m.add_function(wrap_pyfunction!(py_winding_number, m)?)?;
    m.add_function(wrap_pyfunction!(loop_phase, m)?)?;
    m.add_function(wrap_pyfunction!(continue_along, m)?)?;
    m.add_function(wrap_pyfunction!(boost, m)?)?;
    m.add_function(wrap_pyfunction!(relations, m)?)?;
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn stencil_orders() {
        assert_eq!(stencil(2, None).unwrap().order, StencilOrder::Second);
        assert_eq!(stencil(6, Some(0.02)).unwrap().step_factor, 0.02);
        assert!(stencil(3, None).is_err());
        assert!(stencil(4, Some(-1.0)).is_err());
    }
}
