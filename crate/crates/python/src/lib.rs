//! Python bindings for the `mdofdm` simulator.
//!
//! Complex values cross the boundary as Python `complex`, matrices as lists of
//! rows, bits as lists of ints, and result records as dicts keyed like the CSV
//! columns.

use mdofdm::channel::{generate_channel as core_generate_channel, ChannelConfig};
use mdofdm::harness::{self, HarnessError, RunOutputs};
use mdofdm::metrics::{self, LinkConfig, MetricsError, PowerModel, Scheme};
use mdofdm::numerics::{self, ComplexMatrix};
use mdofdm::transceiver::{self, SelectionMap};
use mdofdm::Complex64;
use pyo3::exceptions::{PyRuntimeError, PyValueError};
use pyo3::prelude::*;
use pyo3::types::PyDict;

type Matrix = Vec<Vec<Complex64>>;

fn value_err(e: impl std::fmt::Display) -> PyErr {
    PyValueError::new_err(e.to_string())
}

fn harness_err(e: HarnessError) -> PyErr {
    if e.exit_code() == 2 {
        value_err(e)
    } else {
        PyRuntimeError::new_err(e.to_string())
    }
}

fn parse_scheme(s: &str) -> PyResult<Scheme> {
    s.parse().map_err(value_err)
}

fn to_matrix(rows: Matrix) -> PyResult<ComplexMatrix> {
    let n = rows.len();
    let m = rows.first().map_or(0, Vec::len);
    if rows.iter().any(|r| r.len() != m) {
        return Err(PyValueError::new_err("matrix rows differ in length"));
    }
    ComplexMatrix::from_row_major(n, m, rows.into_iter().flatten().collect()).map_err(value_err)
}

fn from_matrix(m: &ComplexMatrix) -> Matrix {
    m.entries().chunks(m.cols()).map(<[_]>::to_vec).collect()
}

/// Gray-labelled square QAM with unit average energy.
#[pyclass(module = "mdofdm_py", frozen)]
struct QamConstellation(numerics::QamConstellation);

#[pymethods]
impl QamConstellation {
    #[new]
    fn new(order: usize) -> PyResult<Self> {
        numerics::QamConstellation::new(order).map(Self).map_err(value_err)
    }

    #[getter]
    fn order(&self) -> usize {
        self.0.order()
    }

    #[getter]
    fn bits_per_symbol(&self) -> usize {
        self.0.bits_per_symbol()
    }

    fn points(&self) -> Vec<Complex64> {
        self.0.points().to_vec()
    }

    fn modulate(&self, bits: Vec<u8>) -> PyResult<Vec<Complex64>> {
        self.0.modulate(&bits).map_err(value_err)
    }

    fn demodulate(&self, symbols: Vec<Complex64>) -> Vec<u32> {
        self.0.demodulate(&symbols).into_iter().map(u32::from).collect()
    }

    fn __repr__(&self) -> String {
        format!("QamConstellation({})", self.0.order())
    }
}

/// Deterministic random stream addressed by a seed and a label path.
#[pyclass(module = "mdofdm_py")]
struct RandomStream(numerics::RandomStream);

#[pymethods]
impl RandomStream {
    #[new]
    #[pyo3(signature = (seed, labels = Vec::new()))]
    fn new(seed: u64, labels: Vec<u64>) -> Self {
        Self(numerics::RandomStream::new(seed, &labels))
    }

    fn fork(&self, label: u64) -> Self {
        Self(self.0.fork(label))
    }

    fn complex_gaussian(&mut self, n: usize) -> Vec<Complex64> {
        numerics::sample_complex_gaussian(&mut self.0, n).into_inner()
    }

    fn bits(&mut self, n: usize) -> Vec<u32> {
        self.0.bits(n).into_iter().map(u32::from).collect()
    }

    fn __repr__(&self) -> String {
        format!("RandomStream(seed={}, labels={:?})", self.0.seed(), self.0.labels())
    }
}

/// Run configuration; build with `SimConfig()`, `from_toml` or `load`.
#[pyclass(module = "mdofdm_py")]
struct SimConfig(harness::SimConfig);

#[pymethods]
impl SimConfig {
    #[new]
    fn new() -> Self {
        Self(harness::SimConfig::default())
    }

    #[staticmethod]
    fn from_toml(text: &str) -> PyResult<Self> {
        harness::SimConfig::from_document(text).map(Self).map_err(value_err)
    }

    #[staticmethod]
    fn load(path: std::path::PathBuf) -> PyResult<Self> {
        harness::load_config(path).map(Self).map_err(value_err)
    }

    fn to_toml(&self) -> String {
        self.0.to_document()
    }

    fn validate(&self) -> PyResult<()> {
        self.0.validate().map_err(value_err)
    }

    #[getter]
    fn get_seed(&self) -> u64 {
        self.0.seed
    }

    #[setter]
    fn set_seed(&mut self, seed: u64) {
        self.0.seed = seed;
    }

    #[getter]
    fn get_snr_grid_db(&self) -> Vec<f64> {
        self.0.snr_grid_db.clone()
    }

    #[setter]
    fn set_snr_grid_db(&mut self, grid: Vec<f64>) {
        self.0.snr_grid_db = grid;
    }

    #[getter]
    fn get_n_symbols_per_point(&self) -> usize {
        self.0.n_symbols_per_point
    }

    #[setter]
    fn set_n_symbols_per_point(&mut self, n: usize) {
        self.0.n_symbols_per_point = n;
    }

    #[getter]
    fn get_papr_n_symbols(&self) -> usize {
        self.0.papr_n_symbols
    }

    #[setter]
    fn set_papr_n_symbols(&mut self, n: usize) {
        self.0.papr_n_symbols = n;
    }

    fn __repr__(&self) -> String {
        format!("SimConfig.from_toml({:?})", self.0.to_document())
    }
}

#[pyfunction]
fn unitary_dft(samples: Vec<Complex64>) -> Vec<Complex64> {
    numerics::unitary_dft(&samples)
}

#[pyfunction]
fn unitary_idft(spectrum: Vec<Complex64>) -> Vec<Complex64> {
    numerics::unitary_idft(&spectrum)
}

#[pyfunction]
fn cholesky_lower(r: Matrix) -> PyResult<Matrix> {
    numerics::cholesky_lower(&to_matrix(r)?).map(|l| from_matrix(&l)).map_err(value_err)
}

#[pyfunction]
fn solve_hermitian(a: Matrix, b: Matrix) -> PyResult<Matrix> {
    numerics::solve_hermitian(&to_matrix(a)?, &to_matrix(b)?)
        .map(|x| from_matrix(&x))
        .map_err(value_err)
}

/// One channel draw: a list of `n_rx × n_tx` matrices, one per subcarrier.
#[pyfunction]
#[pyo3(signature = (n_tx, n_rx, n_sc, stream, rho_tx = 0.0, rho_rx = 0.0))]
fn generate_channel(
    n_tx: usize,
    n_rx: usize,
    n_sc: usize,
    stream: &mut RandomStream,
    rho_tx: f64,
    rho_rx: f64,
) -> PyResult<Vec<Matrix>> {
    let cfg = ChannelConfig {
        n_tx,
        n_rx,
        n_sc,
        rho_tx,
        rho_rx,
    };
    let h = core_generate_channel(&cfg, &mut stream.0).map_err(value_err)?;
    Ok(h.per_subcarrier.iter().map(from_matrix).collect())
}

#[pyfunction]
fn select_antenna(h: Matrix) -> PyResult<usize> {
    Ok(transceiver::select_antenna(&to_matrix(h)?))
}

#[pyfunction]
fn mmse_equalize(h: Matrix, y: Vec<Complex64>, noise_var: f64) -> PyResult<Vec<Complex64>> {
    transceiver::mmse_equalize(&to_matrix(h)?, &y, noise_var)
        .map(|s| s.into_inner())
        .map_err(value_err)
}

#[pyfunction]
fn md_equalize(h: Complex64, y: Complex64) -> Complex64 {
    transceiver::md_equalize(h, y)
}

/// One-hot MD transmit grid (`n_tx` rows, one per antenna).
#[pyfunction]
fn md_build_tx(symbols: Vec<Complex64>, selection: Vec<usize>, n_tx: usize) -> PyResult<Matrix> {
    transceiver::md_build_tx(&symbols, &SelectionMap(selection), n_tx)
        .map(|f| from_matrix(f.grid()))
        .map_err(value_err)
}

/// Oversampled time-domain samples for each row (antenna) of `grid`.
#[pyfunction]
#[pyo3(signature = (grid, oversampling = 4))]
fn synthesize_waveform(grid: Matrix, oversampling: usize) -> PyResult<Matrix> {
    let grid = to_matrix(grid)?;
    let frame = transceiver::mmse_build_tx(&grid, grid.rows(), grid.cols()).map_err(value_err)?;
    transceiver::synthesize_waveform(&frame, oversampling)
        .map(|w| w.per_antenna)
        .map_err(value_err)
}

/// Returns `(linear, db)`.
#[pyfunction]
fn compute_papr(samples: Vec<Complex64>) -> PyResult<(f64, f64)> {
    metrics::compute_papr(&samples).map(|p| (p.linear, p.db)).map_err(value_err)
}

#[pyfunction]
fn estimate_ccdf(samples_db: Vec<f64>, thresholds_db: Vec<f64>) -> PyResult<Vec<f64>> {
    metrics::estimate_ccdf(&samples_db, &thresholds_db)
        .map(|c| c.probabilities)
        .map_err(value_err)
}

#[pyfunction]
#[pyo3(signature = (scheme, n_tx, n_rx_rf, n_sc, p_rf_mw = None, p_mmse_proc_mw = None, p_sel_proc_mw = None))]
fn total_power(
    scheme: &str,
    n_tx: usize,
    n_rx_rf: usize,
    n_sc: usize,
    p_rf_mw: Option<f64>,
    p_mmse_proc_mw: Option<f64>,
    p_sel_proc_mw: Option<f64>,
) -> PyResult<f64> {
    let d = PowerModel::default();
    let model = PowerModel {
        p_rf_mw: p_rf_mw.unwrap_or(d.p_rf_mw),
        p_mmse_proc_mw: p_mmse_proc_mw.unwrap_or(d.p_mmse_proc_mw),
        p_sel_proc_mw: p_sel_proc_mw.unwrap_or(d.p_sel_proc_mw),
    };
    model.validate().map_err(value_err)?;
    Ok(metrics::total_power(parse_scheme(scheme)?, &model, n_tx, n_rx_rf, n_sc))
}

#[pyfunction]
fn energy_efficiency(se_eff: f64, bandwidth_hz: f64, p_total_mw: f64) -> PyResult<f64> {
    metrics::energy_efficiency(se_eff, bandwidth_hz, p_total_mw).map_err(value_err)
}

#[pyfunction]
fn q_function(x: f64) -> f64 {
    metrics::q_function(x)
}

#[pyfunction]
fn analytic_rayleigh_qpsk_ber(snr_db: f64) -> f64 {
    metrics::analytic_rayleigh_qpsk_ber(snr_db)
}

#[pyfunction]
#[pyo3(signature = (snr_db, branches = 4))]
fn analytic_selection_ber(snr_db: f64, branches: usize) -> f64 {
    metrics::analytic_selection_ber(snr_db, branches)
}

fn ber_dict<'py>(py: Python<'py>, p: &metrics::BerPoint) -> PyResult<Bound<'py, PyDict>> {
    let d = PyDict::new(py);
    d.set_item("scheme", p.scheme.as_str())?;
    d.set_item("snr_db", p.snr_db)?;
    d.set_item("bits_sent", p.bits_sent)?;
    d.set_item("bit_errors", p.bit_errors)?;
    d.set_item("ber", p.ber)?;
    Ok(d)
}

/// BER at one SNR over the reference link for `scheme`, with optional
/// antenna and modulation overrides.
#[pyfunction]
#[pyo3(signature = (scheme, snr_db, n_symbols, seed = 42, n_tx = None, n_rx = None, modulation_order = None))]
#[allow(clippy::too_many_arguments)]
fn run_ber_point<'py>(
    py: Python<'py>,
    scheme: &str,
    snr_db: f64,
    n_symbols: usize,
    seed: u64,
    n_tx: Option<usize>,
    n_rx: Option<usize>,
    modulation_order: Option<usize>,
) -> PyResult<Bound<'py, PyDict>> {
    let scheme = parse_scheme(scheme)?;
    let mut link = LinkConfig::reference(scheme);
    link.n_tx = n_tx.unwrap_or(link.n_tx);
    link.n_rx = n_rx.unwrap_or(if scheme == Scheme::Mmse { link.n_tx } else { 1 });
    link.modulation_order = modulation_order.unwrap_or(link.modulation_order);
    let stream = numerics::RandomStream::new(seed, &[]);
    let point = py
        .detach(|| metrics::run_ber_point(scheme, &link, snr_db, n_symbols, &stream))
        .map_err(|e: MetricsError| value_err(e))?;
    ber_dict(py, &point)
}

#[pyfunction]
#[pyo3(signature = (config, workers = None))]
fn run_ber_sweep<'py>(py: Python<'py>, config: &SimConfig, workers: Option<usize>) -> PyResult<Vec<Bound<'py, PyDict>>> {
    let cfg = config.0.clone();
    let points = py.detach(|| harness::run_ber_sweep(&cfg, workers)).map_err(harness_err)?;
    points.iter().map(|p| ber_dict(py, p)).collect()
}

#[pyfunction]
#[pyo3(signature = (config, workers = None))]
fn run_ee_sweep<'py>(py: Python<'py>, config: &SimConfig, workers: Option<usize>) -> PyResult<Vec<Bound<'py, PyDict>>> {
    let cfg = config.0.clone();
    let records = py.detach(|| harness::run_ee_sweep(&cfg, workers)).map_err(harness_err)?;
    records
        .iter()
        .map(|r| {
            let d = PyDict::new(py);
            d.set_item("scheme", r.scheme.as_str())?;
            d.set_item("snr_db", r.snr_db)?;
            d.set_item("ber", r.ber)?;
            d.set_item("se_ideal_bps_hz", r.se_ideal)?;
            d.set_item("se_eff_bps_hz", r.se_eff)?;
            d.set_item("p_total_mw", r.p_total_mw)?;
            d.set_item("bandwidth_hz", r.bandwidth_hz)?;
            d.set_item("ee_bits_per_joule", r.ee_bits_per_joule)?;
            Ok(d)
        })
        .collect()
}

/// CCDF per scheme: `{scheme: (thresholds_db, probabilities)}`.
#[pyfunction]
#[pyo3(signature = (config, workers = None))]
fn run_papr<'py>(py: Python<'py>, config: &SimConfig, workers: Option<usize>) -> PyResult<Bound<'py, PyDict>> {
    let cfg = config.0.clone();
    let curves = py.detach(|| harness::run_papr(&cfg, workers)).map_err(harness_err)?;
    let d = PyDict::new(py);
    for (scheme, c) in curves {
        d.set_item(scheme.as_str(), (c.thresholds_db, c.probabilities))?;
    }
    Ok(d)
}

/// Runs every sweep and writes the CSVs and manifest into `out_dir`.
/// Returns the written file names mapped to their checksums.
#[pyfunction]
#[pyo3(signature = (config, out_dir, workers = None, plot_script = false))]
fn run_all(
    py: Python<'_>,
    config: &SimConfig,
    out_dir: std::path::PathBuf,
    workers: Option<usize>,
    plot_script: bool,
) -> PyResult<Vec<(String, String)>> {
    let cfg = config.0.clone();
    let manifest = py
        .detach(|| {
            let ber = harness::run_ber_sweep(&cfg, workers)?;
            let outputs = RunOutputs {
                ee: Some(harness::ee_from_ber(&cfg, &ber)?),
                ber: Some(ber),
                papr: Some(harness::run_papr(&cfg, workers)?),
            };
            harness::write_outputs(&out_dir, &cfg, &outputs, plot_script)
        })
        .map_err(harness_err)?;
    Ok(manifest.checksums.into_iter().collect())
}

#[pymodule]
fn mdofdm_py(m: &Bound<'_, PyModule>) -> PyResult<()> {
    m.add_class::<QamConstellation>()?;
    m.add_class::<RandomStream>()?;
    m.add_class::<SimConfig>()?;
    m.add_function(wrap_pyfunction!(unitary_dft, m)?)?;
    m.add_function(wrap_pyfunction!(unitary_idft, m)?)?;
    m.add_function(wrap_pyfunction!(cholesky_lower, m)?)?;
    m.add_function(wrap_pyfunction!(solve_hermitian, m)?)?;
    m.add_function(wrap_pyfunction!(generate_channel, m)?)?;
    m.add_function(wrap_pyfunction!(select_antenna, m)?)?;
    m.add_function(wrap_pyfunction!(mmse_equalize, m)?)?;
    m.add_function(wrap_pyfunction!(md_equalize, m)?)?;
    m.add_function(wrap_pyfunction!(md_build_tx, m)?)?;
    m.add_function(wrap_pyfunction!(synthesize_waveform, m)?)?;
    m.add_function(wrap_pyfunction!(compute_papr, m)?)?;
    m.add_function(wrap_pyfunction!(estimate_ccdf, m)?)?;
    m.add_function(wrap_pyfunction!(total_power, m)?)?;
    m.add_function(wrap_pyfunction!(energy_efficiency, m)?)?;
    m.add_function(wrap_pyfunction!(q_function, m)?)?;
    m.add_function(wrap_pyfunction!(analytic_rayleigh_qpsk_ber, m)?)?;
    m.add_function(wrap_pyfunction!(analytic_selection_ber, m)?)?;
    m.add_function(wrap_pyfunction!(run_ber_point, m)?)?;
    m.add_function(wrap_pyfunction!(run_ber_sweep, m)?)?;
    m.add_function(wrap_pyfunction!(run_ee_sweep, m)?)?;
    m.add_function(wrap_pyfunction!(run_papr, m)?)?;
    m.add_function(wrap_pyfunction!(run_all, m)?)?;
    m.add("__version__", env!("CARGO_PKG_VERSION"))?;
    Ok(())
}
