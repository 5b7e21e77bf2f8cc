//! C ABI for `ncgeom`.
//!
//! Every fallible function returns an [`NcgStatus`]; on failure the message
//! is kept per thread and can be fetched with [`ncg_last_error_message`].
//! Covariance matrices and sweep tables cross the boundary as opaque
//! handles that must be released with the matching `*_free` function.
//! Enumerated inputs are passed as `int32_t` and validated; the accepted
//! values are the `Ncg*` enum constants in the header.

use std::cell::RefCell;
use std::ffi::{c_char, CStr, CString};
use std::panic::{catch_unwind, AssertUnwindSafe};
use std::path::Path;
use std::ptr;

use ncgeom::gaussian::{
    classify, nu_minus, nu_prime_minus, numeric_nu_pair, symplectic_spectrum, toy_covariance,
    CovarianceMatrix, StateClass, ToyPoint,
};
use ncgeom::infogeo::regularizer;
use ncgeom::numerics::DenseMatrix;
use ncgeom::output::{emit_table, TableFormat};
use ncgeom::phase_space::{nc_form, ppt_form, NCParams};
use ncgeom::volume::{
    integrate_region, linear_grid, sweep, Density, IntegralEstimate, IntegrationOptions, Method,
    MetricBackend, RegionKind, RegionSpec, SweepFixed, SweepParam, SweepTable,
};
use ncgeom::Error;

/// Result code of every fallible call.
#[repr(C)]
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum NcgStatus {
    Ok = 0,
    /// A required pointer argument was null.
    NullPointer = 1,
    /// Arguments outside the mathematical domain (θη ≥ 1, R ≥ 1, κ ≤ 0, ...).
    Domain = 2,
    Dimension = 3,
    /// Degenerate or non-finite numerics.
    Numerical = 4,
    Io = 5,
    /// Output buffer too small.
    Buffer = 6,
    /// An unexpected internal failure.
    Panic = 7,
}

#[repr(C)]
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum NcgStateClass {
    Unphysical = 0,
    Separable = 1,
    Entangled = 2,
}

#[repr(C)]
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum NcgRegion {
    PositiveDisk = 0,
    Quantum = 1,
    Separable = 2,
    Entangled = 3,
}

#[repr(C)]
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum NcgBackend {
    PaperClosedForm = 0,
    NumericFisher = 1,
}

#[repr(C)]
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum NcgDensity {
    Det = 0,
    SqrtDet = 1,
}

#[repr(C)]
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum NcgMethod {
    MonteCarloPolar = 0,
    MonteCarloCartesian = 1,
    GaussLegendrePolar = 2,
}

#[repr(C)]
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum NcgParam {
    Kappa = 0,
    Theta = 1,
    Eta = 2,
}

#[repr(C)]
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum NcgFormat {
    Csv = 0,
    Json = 1,
}

/// Integration settings; enum fields take `NcgBackend`, `NcgDensity` and
/// `NcgMethod` values.
#[repr(C)]
#[derive(Debug, Clone, Copy)]
pub struct NcgIntegrationOptions {
    pub backend: i32,
    pub density: i32,
    pub method: i32,
    pub budget: usize,
    pub seed: u64,
    pub tol: f64,
}

#[repr(C)]
#[derive(Debug, Clone, Copy, Default)]
pub struct NcgEstimate {
    pub value: f64,
    pub std_error: f64,
    pub evals: usize,
    pub accepted: usize,
}

#[repr(C)]
#[derive(Debug, Clone, Copy, Default)]
pub struct NcgSweepRow {
    pub param: f64,
    pub quantum: NcgEstimate,
    pub separable: NcgEstimate,
    pub entangled: NcgEstimate,
    /// NaN when the separable volume is zero.
    pub ratio: f64,
    pub ratio_std_error: f64,
}

/// Opaque covariance matrix handle.
pub struct NcgCovariance(CovarianceMatrix);

/// Opaque sweep table handle.
pub struct NcgSweepTable(SweepTable);

thread_local! {
    static LAST_ERROR: RefCell<Option<CString>> = const { RefCell::new(None) };
}

struct Failure(NcgStatus, String);

impl From<Error> for Failure {
    fn from(e: Error) -> Self {
        let status = match e {
            Error::Domain(_) | Error::StepTooLarge { .. } | Error::Index(_) => NcgStatus::Domain,
            Error::Dimension(_) => NcgStatus::Dimension,
            Error::Io(_) => NcgStatus::Io,
            Error::NotSymmetric(_)
            | Error::NonFinite
            | Error::Numerical(_)
            | Error::InvalidSpectrum { .. } => NcgStatus::Numerical,
        };
        Failure(status, e.to_string())
    }
}

fn fail(status: NcgStatus, msg: impl Into<String>) -> Failure {
    Failure(status, msg.into())
}

fn set_last_error(msg: String) {
    let c = CString::new(msg.replace('\0', " ")).expect("interior nul removed");
    LAST_ERROR.with(|e| *e.borrow_mut() = Some(c));
}

fn guard(f: impl FnOnce() -> Result<(), Failure>) -> NcgStatus {
    match catch_unwind(AssertUnwindSafe(f)) {
        Ok(Ok(())) => {
            LAST_ERROR.with(|e| *e.borrow_mut() = None);
            NcgStatus::Ok
        }
        Ok(Err(Failure(status, msg))) => {
            set_last_error(msg);
            status
        }
        Err(_) => {
            set_last_error("internal panic".into());
            NcgStatus::Panic
        }
    }
}

fn out_ref<'a, T>(p: *mut T, name: &str) -> Result<&'a mut T, Failure> {
    // SAFETY: caller guarantees a non-null pointer is valid for writes.
    unsafe { p.as_mut() }.ok_or_else(|| fail(NcgStatus::NullPointer, format!("{name} is null")))
}

fn in_ref<'a, T>(p: *const T, name: &str) -> Result<&'a T, Failure> {
    // SAFETY: caller guarantees a non-null pointer refers to a live value.
    unsafe { p.as_ref() }.ok_or_else(|| fail(NcgStatus::NullPointer, format!("{name} is null")))
}

fn enum_arg<T: Copy>(value: i32, table: &[T], name: &str) -> Result<T, Failure> {
    usize::try_from(value)
        .ok()
        .and_then(|i| table.get(i).copied())
        .ok_or_else(|| fail(NcgStatus::Domain, format!("invalid {name} value {value}")))
}

fn options(o: &NcgIntegrationOptions) -> Result<IntegrationOptions, Failure> {
    Ok(IntegrationOptions {
        backend: enum_arg(
            o.backend,
            &[MetricBackend::PaperClosedForm, MetricBackend::NumericFisher],
            "backend",
        )?,
        density: enum_arg(o.density, &[Density::Det, Density::SqrtDet], "density")?,
        method: enum_arg(
            o.method,
            &[
                Method::MonteCarloPolar,
                Method::MonteCarloCartesian,
                Method::GaussLegendrePolar,
            ],
            "method",
        )?,
        budget: o.budget,
        seed: o.seed,
        tol: o.tol,
    })
}

fn estimate(e: &IntegralEstimate) -> NcgEstimate {
    NcgEstimate {
        value: e.value,
        std_error: e.std_error,
        evals: e.evals,
        accepted: e.accepted,
    }
}

/// Copies the calling thread's last error message, NUL-terminated, into
/// `buf` (truncated to `len` bytes) and returns the full message length
/// including the terminator; 0 when there is no error.
///
/// # Safety
/// `buf` must be null or valid for `len` bytes of writes.
#[no_mangle]
pub unsafe extern "C" fn ncg_last_error_message(buf: *mut c_char, len: usize) -> usize {
    LAST_ERROR.with(|e| match e.borrow().as_ref() {
        None => 0,
        Some(msg) => {
            let bytes = msg.as_bytes_with_nul();
            if !buf.is_null() && len > 0 {
                let n = bytes.len().min(len);
                // SAFETY: buf valid for len >= n bytes.
                unsafe {
                    ptr::copy_nonoverlapping(bytes.as_ptr().cast(), buf, n);
                    *buf.add(n - 1) = 0;
                }
            }
            bytes.len()
        }
    })
}

/// Library version as a static NUL-terminated string.
#[no_mangle]
pub extern "C" fn ncg_version() -> *const c_char {
    concat!(env!("CARGO_PKG_VERSION"), "\0").as_ptr().cast()
}

/// Default integration settings (numeric metric, `Δ_g` density, stratified
/// Monte Carlo, 40000 evaluations, seed 0).
#[no_mangle]
pub extern "C" fn ncg_integration_options_default() -> NcgIntegrationOptions {
    let d = IntegrationOptions::default();
    NcgIntegrationOptions {
        backend: NcgBackend::NumericFisher as i32,
        density: NcgDensity::Det as i32,
        method: NcgMethod::MonteCarloPolar as i32,
        budget: d.budget,
        seed: d.seed,
        tol: d.tol,
    }
}

/// Toy covariance `Σ(m, n)` (8×8) for the given deformation.
///
/// # Safety
/// `out` must be valid for writes.
#[no_mangle]
pub unsafe extern "C" fn ncg_covariance_toy(
    m: f64,
    n: f64,
    theta: f64,
    eta: f64,
    out: *mut *mut NcgCovariance,
) -> NcgStatus {
    guard(|| {
        let out = out_ref(out, "out")?;
        let p = ToyPoint::new(m, n, NCParams::new(theta, eta)?)?;
        *out = Box::into_raw(Box::new(NcgCovariance(toy_covariance(&p)?)));
        Ok(())
    })
}

/// Covariance matrix from `dim × dim` row-major entries; must be symmetric
/// positive definite.
///
/// # Safety
/// `entries` must be valid for `dim * dim` reads and `out` for writes.
#[no_mangle]
pub unsafe extern "C" fn ncg_covariance_from_row_major(
    entries: *const f64,
    dim: usize,
    out: *mut *mut NcgCovariance,
) -> NcgStatus {
    guard(|| {
        let out = out_ref(out, "out")?;
        let first = in_ref(entries, "entries")?;
        let len = dim
            .checked_mul(dim)
            .filter(|&l| l > 0)
            .ok_or_else(|| fail(NcgStatus::Dimension, "dimension must be positive"))?;
        // SAFETY: caller guarantees dim*dim readable entries.
        let slice = unsafe { std::slice::from_raw_parts(first as *const f64, len) };
        let m = DenseMatrix::from_row_slice(dim, dim, slice)?;
        *out = Box::into_raw(Box::new(NcgCovariance(CovarianceMatrix::new(m)?)));
        Ok(())
    })
}

/// Matrix dimension, 0 for a null handle.
///
/// # Safety
/// `cov` must be null or a live handle.
#[no_mangle]
pub unsafe extern "C" fn ncg_covariance_dim(cov: *const NcgCovariance) -> usize {
    // SAFETY: per contract.
    unsafe { cov.as_ref() }.map_or(0, |c| c.0.dim())
}

/// Copies the row-major entries into `buf` (needs `dim * dim` slots).
///
/// # Safety
/// `cov` must be a live handle and `buf` valid for `len` writes.
#[no_mangle]
pub unsafe extern "C" fn ncg_covariance_entries(
    cov: *const NcgCovariance,
    buf: *mut f64,
    len: usize,
) -> NcgStatus {
    guard(|| {
        let cov = in_ref(cov, "cov")?;
        let first = out_ref(buf, "buf")?;
        let entries = cov.0.matrix().to_row_major();
        if len < entries.len() {
            return Err(fail(
                NcgStatus::Buffer,
                format!("buffer holds {len} values, need {}", entries.len()),
            ));
        }
        // SAFETY: buf valid for len >= entries.len() writes.
        let dst = unsafe { std::slice::from_raw_parts_mut(first as *mut f64, entries.len()) };
        dst.copy_from_slice(&entries);
        Ok(())
    })
}

/// Releases a covariance handle; null is ignored.
///
/// # Safety
/// `cov` must be null or a handle not yet freed.
#[no_mangle]
pub unsafe extern "C" fn ncg_covariance_free(cov: *mut NcgCovariance) {
    if !cov.is_null() {
        // SAFETY: handle came from Box::into_raw.
        drop(unsafe { Box::from_raw(cov) });
    }
}

/// Symplectic spectrum (ascending, 4 values) of an 8×8 covariance relative
/// to `Ω(θ, η)`, or to its partial transpose when `partial_transpose` is
/// nonzero.
///
/// # Safety
/// `cov` must be a live handle, `buf` valid for `len` writes, `count` for
/// one write.
#[no_mangle]
pub unsafe extern "C" fn ncg_symplectic_spectrum(
    cov: *const NcgCovariance,
    theta: f64,
    eta: f64,
    partial_transpose: i32,
    buf: *mut f64,
    len: usize,
    count: *mut usize,
) -> NcgStatus {
    guard(|| {
        let cov = in_ref(cov, "cov")?;
        let count = out_ref(count, "count")?;
        let first = out_ref(buf, "buf")?;
        let omega = nc_form(NCParams::new(theta, eta)?);
        let omega = if partial_transpose != 0 {
            ppt_form(&omega)
        } else {
            omega
        };
        let spec = symplectic_spectrum(&cov.0, &omega)?;
        *count = spec.values.len();
        if len < spec.values.len() {
            return Err(fail(
                NcgStatus::Buffer,
                format!("buffer holds {len} values, need {}", spec.values.len()),
            ));
        }
        // SAFETY: buf valid for len >= values.len() writes.
        let dst = unsafe { std::slice::from_raw_parts_mut(first as *mut f64, spec.values.len()) };
        dst.copy_from_slice(&spec.values);
        Ok(())
    })
}

/// Numeric smallest symplectic eigenvalues `(ν₋, ν′₋)` of the toy state.
///
/// # Safety
/// `nu` and `nu_prime` must be valid for writes.
#[no_mangle]
pub unsafe extern "C" fn ncg_numeric_nu_pair(
    m: f64,
    n: f64,
    theta: f64,
    eta: f64,
    nu: *mut f64,
    nu_prime: *mut f64,
) -> NcgStatus {
    guard(|| {
        let nu = out_ref(nu, "nu")?;
        let nu_prime = out_ref(nu_prime, "nu_prime")?;
        let (a, b) = numeric_nu_pair(&ToyPoint::new(m, n, NCParams::new(theta, eta)?)?)?;
        *nu = a;
        *nu_prime = b;
        Ok(())
    })
}

/// Closed-form `ν₋` (`ω₋` branch).
///
/// # Safety
/// `out` must be valid for writes.
#[no_mangle]
pub unsafe extern "C" fn ncg_nu_minus(
    m: f64,
    n: f64,
    theta: f64,
    eta: f64,
    out: *mut f64,
) -> NcgStatus {
    guard(|| {
        let out = out_ref(out, "out")?;
        *out = nu_minus(&ToyPoint::new(m, n, NCParams::new(theta, eta)?)?)?;
        Ok(())
    })
}

/// Closed-form `ν′₋` (`ω₊` branch).
///
/// # Safety
/// `out` must be valid for writes.
#[no_mangle]
pub unsafe extern "C" fn ncg_nu_prime_minus(
    m: f64,
    n: f64,
    theta: f64,
    eta: f64,
    out: *mut f64,
) -> NcgStatus {
    guard(|| {
        let out = out_ref(out, "out")?;
        *out = nu_prime_minus(&ToyPoint::new(m, n, NCParams::new(theta, eta)?)?)?;
        Ok(())
    })
}

/// Classifies the toy state at `(m, n)`; writes an `NcgStateClass`.
///
/// # Safety
/// `out` must be valid for writes.
#[no_mangle]
pub unsafe extern "C" fn ncg_classify(
    m: f64,
    n: f64,
    theta: f64,
    eta: f64,
    tol: f64,
    out: *mut NcgStateClass,
) -> NcgStatus {
    guard(|| {
        let out = out_ref(out, "out")?;
        let class = classify(&ToyPoint::new(m, n, NCParams::new(theta, eta)?)?, tol)?;
        *out = match class {
            StateClass::Unphysical => NcgStateClass::Unphysical,
            StateClass::Separable => NcgStateClass::Separable,
            StateClass::Entangled => NcgStateClass::Entangled,
        };
        Ok(())
    })
}

/// `exp(-Tr[adj Σ]/κ) · ln(1 + (det Σ)^exponent)`.
///
/// # Safety
/// `cov` must be a live handle and `out` valid for writes.
#[no_mangle]
pub unsafe extern "C" fn ncg_regularizer(
    cov: *const NcgCovariance,
    kappa: f64,
    exponent: u32,
    out: *mut f64,
) -> NcgStatus {
    guard(|| {
        let cov = in_ref(cov, "cov")?;
        let out = out_ref(out, "out")?;
        *out = regularizer(&cov.0, kappa, exponent)?;
        Ok(())
    })
}

/// Regularized volume of one region (`NcgRegion`).
///
/// # Safety
/// `opts` must be valid for reads and `out` for writes.
#[no_mangle]
pub unsafe extern "C" fn ncg_integrate_region(
    region: i32,
    theta: f64,
    eta: f64,
    kappa: f64,
    opts: *const NcgIntegrationOptions,
    out: *mut NcgEstimate,
) -> NcgStatus {
    guard(|| {
        let opts = options(in_ref(opts, "opts")?)?;
        let out = out_ref(out, "out")?;
        let kind = enum_arg(
            region,
            &[
                RegionKind::PositiveDisk,
                RegionKind::Quantum,
                RegionKind::Separable,
                RegionKind::Entangled,
            ],
            "region",
        )?;
        let spec = RegionSpec {
            kind,
            nc: NCParams::new(theta, eta)?,
        };
        *out = estimate(&integrate_region(spec, kappa, &opts)?);
        Ok(())
    })
}

/// Sweeps `param` (`NcgParam`) over `steps` evenly spaced values from
/// `from` to `to`, holding the other two of `(theta, eta, kappa)` fixed.
///
/// # Safety
/// `opts` must be valid for reads and `out` for writes.
#[no_mangle]
pub unsafe extern "C" fn ncg_sweep_run(
    param: i32,
    from: f64,
    to: f64,
    steps: usize,
    theta: f64,
    eta: f64,
    kappa: f64,
    opts: *const NcgIntegrationOptions,
    out: *mut *mut NcgSweepTable,
) -> NcgStatus {
    guard(|| {
        let opts = options(in_ref(opts, "opts")?)?;
        let out = out_ref(out, "out")?;
        let param = enum_arg(
            param,
            &[SweepParam::Kappa, SweepParam::Theta, SweepParam::Eta],
            "param",
        )?;
        let grid = linear_grid(from, to, steps)?;
        let table = sweep(param, &grid, SweepFixed { theta, eta, kappa }, &opts)?;
        *out = Box::into_raw(Box::new(NcgSweepTable(table)));
        Ok(())
    })
}

/// Number of rows, 0 for a null handle.
///
/// # Safety
/// `table` must be null or a live handle.
#[no_mangle]
pub unsafe extern "C" fn ncg_sweep_row_count(table: *const NcgSweepTable) -> usize {
    // SAFETY: per contract.
    unsafe { table.as_ref() }.map_or(0, |t| t.0.rows.len())
}

/// Copies row `index`.
///
/// # Safety
/// `table` must be a live handle and `out` valid for writes.
#[no_mangle]
pub unsafe extern "C" fn ncg_sweep_row(
    table: *const NcgSweepTable,
    index: usize,
    out: *mut NcgSweepRow,
) -> NcgStatus {
    guard(|| {
        let table = in_ref(table, "table")?;
        let out = out_ref(out, "out")?;
        let r = table.0.rows.get(index).ok_or_else(|| {
            fail(
                NcgStatus::Domain,
                format!("row {index} out of range ({} rows)", table.0.rows.len()),
            )
        })?;
        *out = NcgSweepRow {
            param: r.param,
            quantum: estimate(&r.quantum),
            separable: estimate(&r.separable),
            entangled: estimate(&r.entangled),
            ratio: r.ratio,
            ratio_std_error: r.ratio_std_error,
        };
        Ok(())
    })
}

/// Writes the table to `path` as CSV or JSON (`NcgFormat`).
///
/// # Safety
/// `table` must be a live handle and `path` a NUL-terminated UTF-8 string.
#[no_mangle]
pub unsafe extern "C" fn ncg_sweep_write(
    table: *const NcgSweepTable,
    path: *const c_char,
    format: i32,
) -> NcgStatus {
    guard(|| {
        let table = in_ref(table, "table")?;
        in_ref(path, "path")?;
        // SAFETY: non-null and NUL-terminated per contract.
        let path = unsafe { CStr::from_ptr(path) }
            .to_str()
            .map_err(|_| fail(NcgStatus::Domain, "path is not valid UTF-8"))?;
        let format = enum_arg(format, &[TableFormat::Csv, TableFormat::Json], "format")?;
        emit_table(&table.0, format, Path::new(path))?;
        Ok(())
    })
}

/// Releases a sweep table; null is ignored.
///
/// # Safety
/// `table` must be null or a handle not yet freed.
#[no_mangle]
pub unsafe extern "C" fn ncg_sweep_free(table: *mut NcgSweepTable) {
    if !table.is_null() {
        // SAFETY: handle came from Box::into_raw.
        drop(unsafe { Box::from_raw(table) });
    }
}
