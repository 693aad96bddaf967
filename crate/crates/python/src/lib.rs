//! Python bindings for the `qmimo` library.
//!
//! Structured results (trial records, reports) cross the boundary as JSON and
//! are returned as plain dicts.

use pyo3::exceptions::PyValueError;
use pyo3::prelude::*;
use pyo3::types::PyDict;

use qmimo::bench::{run_landscape, run_ser_experiment, run_single, ExperimentConfig};
use qmimo::hubo::{build_cost_hamiltonian, gray_map_bits_to_pam, gray_unmap_pam_to_bits, scale_hamiltonian, QubitLayout};
use qmimo::mimo::generate_instance_with;
use qmimo::qaoa::{linear_ramp, run_variant, soft_bits, FlatParams, Variant, VariantConfig};
use qmimo::{ml_detect, mmse_detect, zf_detect, ConstellationSpec, NoiseParams, PauliHamiltonian, RngStream};

fn err(e: impl std::fmt::Display) -> PyErr {
    PyValueError::new_err(e.to_string())
}

fn to_py_dict<'py, T: serde::Serialize>(py: Python<'py>, value: &T) -> PyResult<Bound<'py, PyDict>> {
    let text = serde_json::to_string(value).map_err(err)?;
    let obj = py.import("json")?.call_method1("loads", (text,))?;
    Ok(obj.cast_into::<PyDict>()?)
}

/// Diagonal Pauli-Z Hamiltonian with a constant offset.
#[pyclass(name = "Hamiltonian", module = "qmimo", frozen)]
struct PyHamiltonian {
    inner: PauliHamiltonian,
}

#[pymethods]
impl PyHamiltonian {
    #[new]
    #[pyo3(signature = (n_qubits, terms, offset=0.0))]
    fn new(n_qubits: usize, terms: Vec<(f64, Vec<usize>)>, offset: f64) -> PyResult<Self> {
        Ok(Self { inner: PauliHamiltonian::from_terms(n_qubits, terms, offset).map_err(err)? })
    }

    #[staticmethod]
    fn from_text(text: &str) -> PyResult<Self> {
        Ok(Self { inner: text.parse().map_err(err)? })
    }

    #[getter]
    fn n_qubits(&self) -> usize {
        self.inner.n_qubits()
    }

    #[getter]
    fn offset(&self) -> f64 {
        self.inner.offset()
    }

    #[getter]
    fn terms(&self) -> Vec<(f64, Vec<usize>)> {
        self.inner.terms().iter().map(|t| (t.coefficient, t.support.clone())).collect()
    }

    /// Energy of a bit list (qubit 0 first), offset included.
    fn energy(&self, bits: Vec<u8>) -> PyResult<f64> {
        qmimo::hubo::evaluate_energy(&self.inner, &bits).map_err(err)
    }

    /// Energies of all basis states, offset excluded.
    fn diagonal(&self) -> PyResult<Vec<f64>> {
        self.inner.diagonal().map_err(err)
    }

    /// `(scaled, alpha)` with the largest coefficient magnitude equal to 1.
    fn scaled(&self) -> PyResult<(Self, f64)> {
        let (h, alpha) = scale_hamiltonian(&self.inner).map_err(err)?;
        Ok((Self { inner: h }, alpha))
    }

    fn __len__(&self) -> usize {
        self.inner.len()
    }

    fn __str__(&self) -> String {
        self.inner.to_string()
    }

    fn __repr__(&self) -> String {
        format!("Hamiltonian(n_qubits={}, terms={}, offset={})", self.inner.n_qubits(), self.inner.len(), self.inner.offset())
    }
}

/// One random channel use.
#[pyclass(name = "Instance", module = "qmimo", frozen)]
struct PyInstance {
    inner: qmimo::mimo::DetectionInstance,
    stream: RngStream,
}

fn rows(m: &nalgebra::DMatrix<f64>) -> Vec<Vec<f64>> {
    m.row_iter().map(|r| r.iter().copied().collect()).collect()
}

#[pymethods]
impl PyInstance {
    #[new]
    #[pyo3(signature = (nt, snr_db, seed, stream=0, nr=None, modulation=16))]
    fn new(nt: usize, snr_db: f64, seed: u64, stream: u64, nr: Option<usize>, modulation: usize) -> PyResult<Self> {
        let spec = ConstellationSpec::new(modulation).map_err(err)?;
        let rng = RngStream::new(seed, stream);
        let inner =
            generate_instance_with(&spec, nt, nr.unwrap_or(nt), snr_db, Default::default(), &rng).map_err(err)?;
        Ok(Self { inner, stream: rng })
    }

    #[getter]
    fn g(&self) -> Vec<Vec<f64>> {
        rows(&self.inner.g)
    }

    #[getter]
    fn c(&self) -> Vec<f64> {
        self.inner.c.iter().copied().collect()
    }

    #[getter]
    fn s_true(&self) -> Vec<f64> {
        self.inner.s_true().iter().copied().collect()
    }

    #[getter]
    fn sigma2(&self) -> f64 {
        self.inner.sigma2
    }

    #[getter]
    fn checksum(&self) -> u64 {
        self.inner.checksum()
    }

    /// `sᵀGs − 2cᵀs`.
    fn objective(&self, s: Vec<f64>) -> PyResult<f64> {
        qmimo::mimo::objective_f(&self.inner.g, &self.inner.c, &nalgebra::DVector::from_vec(s)).map_err(err)
    }

    /// Exhaustive ML estimate `(s_hat, energy)`.
    fn ml(&self) -> PyResult<(Vec<f64>, f64)> {
        let sol = ml_detect(&self.inner).map_err(err)?;
        Ok((sol.s_hat.iter().copied().collect(), sol.energy))
    }

    fn zf(&self) -> PyResult<Vec<f64>> {
        Ok(zf_detect(&self.inner).map_err(err)?.iter().copied().collect())
    }

    fn mmse(&self) -> PyResult<Vec<f64>> {
        Ok(mmse_detect(&self.inner).map_err(err)?.iter().copied().collect())
    }

    fn cost_hamiltonian(&self) -> PyResult<PyHamiltonian> {
        let layout = QubitLayout::for_antennas(self.inner.nt, &self.inner.spec).map_err(err)?;
        let h = build_cost_hamiltonian(&self.inner.g, &self.inner.c, &self.inner.spec, &layout).map_err(err)?;
        Ok(PyHamiltonian { inner: h })
    }

    /// Runs one QAOA variant (`qaoa`, `ws-rx`, `ws-ws`, `lr-qaoa`,
    /// `wslr-rx`, `wslr-w`) and returns its trial record.
    #[pyo3(signature = (variant, p=5, shots=1024, deltas=None, temperature=0.2, flat_grid=9, noise=false))]
    #[allow(clippy::too_many_arguments)]
    fn run_variant<'py>(
        &self,
        py: Python<'py>,
        variant: &str,
        p: usize,
        shots: usize,
        deltas: Option<Vec<f64>>,
        temperature: f64,
        flat_grid: usize,
        noise: bool,
    ) -> PyResult<Bound<'py, PyDict>> {
        let v = Variant::from_key(variant).ok_or_else(|| err(format!("unknown variant {variant:?}")))?;
        let mut cfg = VariantConfig::new(v);
        cfg.p = p;
        cfg.shots = shots;
        if let Some(d) = deltas {
            cfg.deltas = d;
        }
        cfg.temperature = temperature;
        cfg.flat = FlatParams::Grid { resolution: flat_grid, max: 3.0 };
        cfg.noise = noise.then(NoiseParams::eagle_r3);
        let rec = py.detach(|| run_variant(&self.inner, &cfg, &self.stream)).map_err(err)?;
        to_py_dict(py, &rec)
    }
}

#[pyfunction]
fn gray_map(bits: Vec<u8>) -> PyResult<i32> {
    gray_map_bits_to_pam(&bits).map_err(err)
}

#[pyfunction]
fn gray_unmap(level: i32, w: usize) -> PyResult<Vec<u32>> {
    let bits = gray_unmap_pam_to_bits(level, w).map_err(err)?;
    Ok(bits.into_iter().map(u32::from).collect())
}

/// Per-qubit warm-start probabilities.
#[pyfunction]
#[pyo3(name = "soft_bits")]
fn py_soft_bits(r_star: Vec<f64>, temperature: f64, w: usize) -> PyResult<Vec<f64>> {
    soft_bits(&r_star, temperature, w).map_err(err)
}

/// `(gammas, betas)` of the linear ramp.
#[pyfunction]
#[pyo3(name = "linear_ramp")]
fn py_linear_ramp(p: usize, delta: f64) -> PyResult<(Vec<f64>, Vec<f64>)> {
    let s = linear_ramp(p, delta).map_err(err)?;
    Ok((s.gammas, s.betas))
}

fn parse_config(toml_text: &str) -> PyResult<ExperimentConfig> {
    ExperimentConfig::from_toml_str(toml_text).map_err(err)
}

/// SER sweep from a TOML configuration; returns the report as a dict.
#[pyfunction]
#[pyo3(name = "run_ser", signature = (config_toml=""))]
fn py_run_ser<'py>(py: Python<'py>, config_toml: &str) -> PyResult<Bound<'py, PyDict>> {
    let cfg = parse_config(config_toml)?;
    let report = py.detach(|| run_ser_experiment(&cfg, None)).map_err(err)?;
    to_py_dict(py, &report)
}

#[pyfunction]
#[pyo3(name = "run_landscape", signature = (config_toml=""))]
fn py_run_landscape<'py>(py: Python<'py>, config_toml: &str) -> PyResult<Bound<'py, PyDict>> {
    let cfg = parse_config(config_toml)?;
    let report = py.detach(|| run_landscape(&cfg)).map_err(err)?;
    to_py_dict(py, &report)
}

#[pyfunction]
#[pyo3(name = "run_single", signature = (config_toml=""))]
fn py_run_single<'py>(py: Python<'py>, config_toml: &str) -> PyResult<Bound<'py, PyDict>> {
    let cfg = parse_config(config_toml)?;
    let trace = py.detach(|| run_single(&cfg)).map_err(err)?;
    to_py_dict(py, &trace)
}

#[pymodule]
#[pyo3(name = "qmimo")]
fn qmimo_module(m: &Bound<'_, PyModule>) -> PyResult<()> {
    m.add_class::<PyHamiltonian>()?;
    m.add_class::<PyInstance>()?;
    m.add_function(wrap_pyfunction!(gray_map, m)?)?;
    m.add_function(wrap_pyfunction!(gray_unmap, m)?)?;
    m.add_function(wrap_pyfunction!(py_soft_bits, m)?)?;
    m.add_function(wrap_pyfunction!(py_linear_ramp, m)?)?;
    m.add_function(wrap_pyfunction!(py_run_ser, m)?)?;
    m.add_function(wrap_pyfunction!(py_run_landscape, m)?)?;
    m.add_function(wrap_pyfunction!(py_run_single, m)?)?;
    Ok(())
}
