//! Python bindings for `concave-lcm`.

use pyo3::exceptions::PyValueError;
use pyo3::prelude::*;
use pyo3::types::PyDict;

use concave_lcm::pwl::{build_ecdf, lcm_of_step};
use concave_lcm::sim::{self, SimConfig};
use concave_lcm::statistics::{self, StatisticResult};
use concave_lcm::stream::DEFAULT_SEED;
use concave_lcm::{NormIndex, SampledPath, StreamToken};

fn err(e: impl std::fmt::Display) -> PyErr {
    PyValueError::new_err(e.to_string())
}

/// Accepts a float, or a string such as "2" or "inf".
fn norm_index(p: &Bound<'_, PyAny>) -> PyResult<NormIndex> {
    if let Ok(v) = p.extract::<f64>() {
        return NormIndex::new(v).map_err(err);
    }
    let s: String = p.extract()?;
    s.parse().map_err(err)
}

#[pyclass(name = "ConcaveCdf", module = "concave_lcm", frozen, skip_from_py_object)]
#[derive(Clone)]
struct PyConcaveCdf {
    inner: concave_lcm::ConcaveCdf,
}

#[pymethods]
impl PyConcaveCdf {
    #[staticmethod]
    fn uniform() -> Self {
        Self { inner: concave_lcm::ConcaveCdf::Uniform }
    }

    #[staticmethod]
    fn power(gamma: f64) -> PyResult<Self> {
        Ok(Self { inner: concave_lcm::ConcaveCdf::power(gamma).map_err(err)? })
    }

    /// Piecewise-affine CDF through `knots`, a list of `(x, y)` pairs.
    #[staticmethod]
    fn piecewise(knots: Vec<(f64, f64)>) -> PyResult<Self> {
        Ok(Self { inner: concave_lcm::ConcaveCdf::piecewise(&knots).map_err(err)? })
    }

    #[staticmethod]
    fn from_json(text: &str) -> PyResult<Self> {
        Ok(Self { inner: serde_json::from_str(text).map_err(err)? })
    }

    fn to_json(&self) -> String {
        serde_json::to_string(&self.inner).expect("cdf serializes")
    }

    #[getter]
    fn x_bar(&self) -> f64 {
        self.inner.x_bar()
    }

    fn evaluate(&self, x: f64) -> f64 {
        self.inner.evaluate(x)
    }

    fn quantile(&self, u: f64) -> f64 {
        self.inner.quantile(u)
    }

    #[pyo3(signature = (count, seed = DEFAULT_SEED, stream = 0))]
    fn sample(&self, count: usize, seed: u64, stream: u64) -> Vec<f64> {
        self.inner.sample(count, StreamToken::new(seed, stream))
    }

    fn pit_transform(&self, samples: Vec<f64>) -> Vec<f64> {
        self.inner.pit_transform(&samples)
    }

    /// Maximal affine intervals as `(a, b, d, h)` tuples.
    fn intervals(&self) -> Vec<(f64, f64, f64, f64)> {
        self.inner
            .extract_intervals()
            .intervals()
            .iter()
            .map(|k| (k.a, k.b, k.d, k.h))
            .collect()
    }

    fn __repr__(&self) -> String {
        format!("ConcaveCdf({})", self.to_json())
    }
}

/// Jumps `(x, F_n(x))` of the empirical CDF.
#[pyfunction]
fn ecdf(samples: Vec<f64>) -> PyResult<Vec<(f64, f64)>> {
    Ok(build_ecdf(&samples).map_err(err)?.jumps().collect())
}

/// Knots of the least concave majorant of the empirical CDF on `[0, 1]`.
#[pyfunction]
fn lcm(samples: Vec<f64>) -> PyResult<Vec<(f64, f64)>> {
    let f = build_ecdf(&samples).map_err(err)?;
    Ok(lcm_of_step(&f).knots().collect())
}

fn value(r: concave_lcm::Result<StatisticResult>) -> PyResult<f64> {
    r.map(|s| s.value).map_err(err)
}

#[pyfunction]
fn s_statistic(samples: Vec<f64>, p: &Bound<'_, PyAny>) -> PyResult<f64> {
    value(statistics::s_statistic(&samples, norm_index(p)?))
}

#[pyfunction]
fn r_statistic(samples: Vec<f64>, p: &Bound<'_, PyAny>, weight: &PyConcaveCdf) -> PyResult<f64> {
    value(statistics::r_statistic(&samples, norm_index(p)?, &weight.inner))
}

#[pyfunction]
fn t_statistic(samples: Vec<f64>, p: &Bound<'_, PyAny>) -> PyResult<f64> {
    value(statistics::t_statistic(&samples, norm_index(p)?))
}

/// `||M theta - theta||_p` for the linear interpolant of `values` on `grid`.
#[pyfunction]
fn d_norm(grid: Vec<f64>, values: Vec<f64>, p: &Bound<'_, PyAny>) -> PyResult<f64> {
    let path = SampledPath::new(grid, values).map_err(err)?;
    sim::d_norm(&path, norm_index(p)?).map_err(err)
}

#[pyfunction]
#[pyo3(signature = (grid, seed = DEFAULT_SEED, stream = 0))]
fn sample_wiener(grid: Vec<f64>, seed: u64, stream: u64) -> PyResult<Vec<f64>> {
    let w = sim::sample_wiener(grid, StreamToken::new(seed, stream)).map_err(err)?;
    Ok(w.into_parts().1)
}

#[pyfunction]
#[pyo3(signature = (p, grid_size = 16384, seed = DEFAULT_SEED, stream = 0))]
fn limit_draw_uniform(py: Python<'_>, p: &Bound<'_, PyAny>, grid_size: usize, seed: u64, stream: u64) -> PyResult<f64> {
    let p = norm_index(p)?;
    let config = SimConfig { grid_size, replications: 1, master_seed: seed };
    py.detach(|| sim::limit_draw_uniform(&config, p, StreamToken::new(seed, stream)))
        .map_err(err)
}

#[pyfunction]
#[pyo3(signature = (cdf, p, grid_size = 16384, seed = DEFAULT_SEED, stream = 0))]
fn limit_draw_general(
    py: Python<'_>,
    cdf: &PyConcaveCdf,
    p: &Bound<'_, PyAny>,
    grid_size: usize,
    seed: u64,
    stream: u64,
) -> PyResult<f64> {
    let p = norm_index(p)?;
    let iv = cdf.inner.extract_intervals();
    py.detach(|| sim::limit_draw_general(&iv, p, grid_size, StreamToken::new(seed, stream)))
        .map_err(err)
}

#[pyfunction]
#[pyo3(signature = (cdf, p, grid_size = 4096, seed = DEFAULT_SEED, stream = 0))]
fn verify_prop1<'py>(
    py: Python<'py>,
    cdf: &PyConcaveCdf,
    p: &Bound<'py, PyAny>,
    grid_size: usize,
    seed: u64,
    stream: u64,
) -> PyResult<Bound<'py, PyDict>> {
    let c = sim::verify_prop1_coupling(&cdf.inner, norm_index(p)?, grid_size, StreamToken::new(seed, stream))
        .map_err(err)?;
    let d = PyDict::new(py);
    d.set_item("lhs", c.lhs)?;
    d.set_item("rhs", c.rhs)?;
    d.set_item("gap", c.gap)?;
    d.set_item("holds", c.holds())?;
    Ok(d)
}

#[pyfunction]
#[pyo3(signature = (cdf, p, grid_size = 4096, seed = DEFAULT_SEED, stream = 0))]
fn verify_thm1<'py>(
    py: Python<'py>,
    cdf: &PyConcaveCdf,
    p: &Bound<'py, PyAny>,
    grid_size: usize,
    seed: u64,
    stream: u64,
) -> PyResult<Bound<'py, PyDict>> {
    let iv = cdf.inner.extract_intervals();
    let c = sim::verify_thm1_coupling(&iv, norm_index(p)?, grid_size, StreamToken::new(seed, stream))
        .map_err(err)?;
    let d = PyDict::new(py);
    d.set_item("lhs", c.lhs)?;
    d.set_item("rhs", c.rhs)?;
    d.set_item("violation", c.violation)?;
    d.set_item("hull_violations", c.hull_violations)?;
    d.set_item("max_hull_excess", c.max_hull_excess)?;
    Ok(d)
}

/// Upper-tail quantiles as `(alpha, q, se)` tuples.
#[pyfunction]
fn estimate_quantiles(draws: Vec<f64>, alphas: Vec<f64>) -> PyResult<Vec<(f64, f64, f64)>> {
    Ok(sim::estimate_quantiles(&draws, &alphas)
        .map_err(err)?
        .into_iter()
        .map(|e| (e.alpha, e.q, e.se))
        .collect())
}

/// Simulated critical-value table for the uniform law, as JSON.
#[pyfunction]
#[pyo3(signature = (ps, alphas, grid_size = 16384, replications = 200_000, seed = DEFAULT_SEED))]
fn build_critical_table(
    py: Python<'_>,
    ps: Vec<Bound<'_, PyAny>>,
    alphas: Vec<f64>,
    grid_size: usize,
    replications: usize,
    seed: u64,
) -> PyResult<String> {
    let ps = ps.iter().map(norm_index).collect::<PyResult<Vec<_>>>()?;
    let config = SimConfig { grid_size, replications, master_seed: seed };
    let table = py
        .detach(|| sim::build_critical_table(&config, &alphas, &ps))
        .map_err(err)?;
    Ok(table.to_json())
}

/// The two-point transform example, as JSON.
#[pyfunction]
fn counterexample() -> String {
    serde_json::to_string_pretty(&statistics::counterexample()).expect("report serializes")
}

#[pymodule]
#[pyo3(name = "concave_lcm")]
fn concave_lcm_py(m: &Bound<'_, PyModule>) -> PyResult<()> {
    m.add_class::<PyConcaveCdf>()?;
    m.add("DEFAULT_SEED", DEFAULT_SEED)?;
    m.add_function(wrap_pyfunction!(ecdf, m)?)?;
    m.add_function(wrap_pyfunction!(lcm, m)?)?;
    m.add_function(wrap_pyfunction!(s_statistic, m)?)?;
    m.add_function(wrap_pyfunction!(r_statistic, m)?)?;
    m.add_function(wrap_pyfunction!(t_statistic, m)?)?;
    m.add_function(wrap_pyfunction!(d_norm, m)?)?;
    m.add_function(wrap_pyfunction!(sample_wiener, m)?)?;
    m.add_function(wrap_pyfunction!(limit_draw_uniform, m)?)?;
    m.add_function(wrap_pyfunction!(limit_draw_general, m)?)?;
    m.add_function(wrap_pyfunction!(verify_prop1, m)?)?;
    m.add_function(wrap_pyfunction!(verify_thm1, m)?)?;
    m.add_function(wrap_pyfunction!(estimate_quantiles, m)?)?;
    m.add_function(wrap_pyfunction!(build_critical_table, m)?)?;
    m.add_function(wrap_pyfunction!(counterexample, m)?)?;
    Ok(())
}
