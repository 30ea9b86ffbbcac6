//! C ABI for `ghz-entangle`.
//!
//! Every fallible function returns a [`GhzStatus`] and writes its result
//! through an out-pointer. On failure the message is available from
//! [`ghz_last_error`] on the same thread until the next failing call.
//! Density matrices are opaque [`GhzDensityMatrix`] handles released with
//! [`ghz_density_free`]; strings returned by the library are released with
//! [`ghz_string_free`].

use std::cell::RefCell;
use std::ffi::{c_char, CString};
use std::panic::{catch_unwind, AssertUnwindSafe};
use std::ptr;

use ghz_entangle::linalg::{
    fidelity_with_pure, project_renormalize, von_neumann_entropy, Bipartition, DensityMatrix,
    LogBase,
};
use ghz_entangle::measures::measure_report;
use ghz_entangle::report::{
    emit, emit_reproduction, reproduce_paper, run_report, EpsilonSpec, OutputFormat, RunConfig,
};
use ghz_entangle::separability::{ppt_check, purity_threshold};
use ghz_entangle::states::{
    ghz_state, pseudo_pure, singlet_form_basis, werner, x_of, PhaseConvention, PseudoPureParams,
};
use ghz_entangle::{Error, Verdict};

#[repr(C)]
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum GhzStatus {
    Ok = 0,
    NullPointer = 1,
    InvalidArgument = 2,
    CapExceeded = 3,
    DimensionMismatch = 4,
    Numerical = 5,
    Io = 6,
    Panic = 7,
}

pub const GHZ_PHASE_PAPER: u32 = 0;
pub const GHZ_PHASE_PLUS: u32 = 1;

pub const GHZ_FORMAT_TABLE: u32 = 0;
pub const GHZ_FORMAT_CSV: u32 = 1;
pub const GHZ_FORMAT_JSON: u32 = 2;

pub const GHZ_VERDICT_SEPARABLE: i32 = 0;
pub const GHZ_VERDICT_NONSEPARABLE: i32 = 1;
pub const GHZ_VERDICT_UNDECIDED: i32 = 2;

/// Opaque density matrix.
pub struct GhzDensityMatrix {
    inner: DensityMatrix,
}

/// Closed-form measures for one `(n, epsilon)` point. Entanglement values are
/// in units of the requested logarithm base.
#[repr(C)]
#[derive(Debug, Clone, Copy, Default)]
pub struct GhzMeasureReport {
    pub n: usize,
    pub epsilon: f64,
    pub x: f64,
    pub lambda: f64,
    pub fidelity: f64,
    pub threshold: f64,
    /// One of the `GHZ_VERDICT_*` constants.
    pub verdict: i32,
    pub e_ls: f64,
    pub e_eq10: f64,
    /// Zero when `n` is odd, in which case `e_bipartite_avg` is meaningless.
    pub has_bipartite_avg: i32,
    pub e_bipartite_avg: f64,
    pub e_teleport: f64,
    pub e_opnorm: f64,
    pub log_base: f64,
}

thread_local! {
    static LAST_ERROR: RefCell<Option<CString>> = const { RefCell::new(None) };
}

fn set_last_error(msg: String) {
    let c = CString::new(msg.replace('\0', " ")).unwrap_or_default();
    LAST_ERROR.with(|e| *e.borrow_mut() = Some(c));
}

fn status_of(e: &Error) -> GhzStatus {
    match e {
        Error::CapExceeded { .. } => GhzStatus::CapExceeded,
        Error::DimensionMismatch { .. } | Error::NotARegister(_) => GhzStatus::DimensionMismatch,
        Error::NotHermitian { .. }
        | Error::NotUnitTrace { .. }
        | Error::NotPositive { .. }
        | Error::NotNormalized { .. }
        | Error::NotOrthonormal { .. }
        | Error::ZeroProbability { .. }
        | Error::ZeroVector => GhzStatus::Numerical,
        _ => GhzStatus::InvalidArgument,
    }
}

struct Failure(GhzStatus, String);

impl From<Error> for Failure {
    fn from(e: Error) -> Self {
        Failure(status_of(&e), e.to_string())
    }
}

fn null(what: &str) -> Failure {
    Failure(GhzStatus::NullPointer, format!("{what} is null"))
}

fn invalid(msg: String) -> Failure {
    Failure(GhzStatus::InvalidArgument, msg)
}

fn guard(f: impl FnOnce() -> Result<(), Failure>) -> GhzStatus {
    match catch_unwind(AssertUnwindSafe(f)) {
        Ok(Ok(())) => GhzStatus::Ok,
        Ok(Err(Failure(status, msg))) => {
            set_last_error(msg);
            status
        }
        Err(payload) => {
            let msg = payload
                .downcast_ref::<&str>()
                .map(|s| s.to_string())
                .or_else(|| payload.downcast_ref::<String>().cloned())
                .unwrap_or_else(|| "unknown panic".to_string());
            set_last_error(format!("panic: {msg}"));
            GhzStatus::Panic
        }
    }
}

unsafe fn write_out<T>(out: *mut T, value: T) -> Result<(), Failure> {
    if out.is_null() {
        return Err(null("output pointer"));
    }
    out.write(value);
    Ok(())
}

unsafe fn handle<'a>(m: *const GhzDensityMatrix) -> Result<&'a DensityMatrix, Failure> {
    m.as_ref()
        .map(|h| &h.inner)
        .ok_or_else(|| null("matrix handle"))
}

fn convention(code: u32) -> Result<PhaseConvention, Failure> {
    match code {
        GHZ_PHASE_PAPER => Ok(PhaseConvention::PaperIN1),
        GHZ_PHASE_PLUS => Ok(PhaseConvention::Plus),
        other => Err(invalid(format!("unknown phase convention {other}"))),
    }
}

fn boxed(inner: DensityMatrix) -> *mut GhzDensityMatrix {
    Box::into_raw(Box::new(GhzDensityMatrix { inner }))
}

fn into_c_string(s: String) -> Result<*mut c_char, Failure> {
    CString::new(s)
        .map(CString::into_raw)
        .map_err(|e| invalid(e.to_string()))
}

/// Message of the last failed call on this thread, or null. The pointer stays
/// valid until the next failing call on the same thread.
#[no_mangle]
pub extern "C" fn ghz_last_error() -> *const c_char {
    LAST_ERROR.with(|e| e.borrow().as_ref().map_or(ptr::null(), |c| c.as_ptr()))
}

/// Dense `n`-qubit pseudo-pure GHZ state with purity `epsilon`.
///
/// # Safety
/// `out` must be null or valid for writes.
#[no_mangle]
pub unsafe extern "C" fn ghz_density_pseudo_pure(
    n: usize,
    epsilon: f64,
    phase: u32,
    out: *mut *mut GhzDensityMatrix,
) -> GhzStatus {
    guard(|| {
        if out.is_null() {
            return Err(null("output pointer"));
        }
        let params = PseudoPureParams::new(n, epsilon, convention(phase)?)?;
        write_out(out, boxed(pseudo_pure(&params)?))
    })
}

/// Two-qubit Werner state with singlet weight `x`.
///
/// # Safety
/// `out` must be null or valid for writes.
#[no_mangle]
pub unsafe extern "C" fn ghz_density_werner(x: f64, out: *mut *mut GhzDensityMatrix) -> GhzStatus {
    guard(|| {
        if out.is_null() {
            return Err(null("output pointer"));
        }
        write_out(out, boxed(werner(x)?))
    })
}

/// Releases a handle. Null is ignored.
///
/// # Safety
/// `m` must be null or a handle from this library not yet freed.
#[no_mangle]
pub unsafe extern "C" fn ghz_density_free(m: *mut GhzDensityMatrix) {
    if !m.is_null() {
        drop(Box::from_raw(m));
    }
}

/// # Safety
/// `m` must be a live handle; `out` must be valid for writes.
#[no_mangle]
pub unsafe extern "C" fn ghz_density_dim(m: *const GhzDensityMatrix, out: *mut usize) -> GhzStatus {
    guard(|| write_out(out, handle(m)?.dim()))
}

/// Entry `(row, col)` as real and imaginary parts.
///
/// # Safety
/// `m` must be a live handle; `re` and `im` must be valid for writes.
#[no_mangle]
pub unsafe extern "C" fn ghz_density_entry(
    m: *const GhzDensityMatrix,
    row: usize,
    col: usize,
    re: *mut f64,
    im: *mut f64,
) -> GhzStatus {
    guard(|| {
        let rho = handle(m)?;
        if re.is_null() || im.is_null() {
            return Err(null("output pointer"));
        }
        let dim = rho.dim();
        if row >= dim || col >= dim {
            return Err(invalid(format!(
                "entry ({row}, {col}) outside a {dim}x{dim} matrix"
            )));
        }
        let z = rho.matrix()[(row, col)];
        write_out(re, z.re)?;
        write_out(im, z.im)
    })
}

/// `<GHZ| rho |GHZ>` with the GHZ state on as many qubits as `m` has.
///
/// # Safety
/// `m` must be a live handle; `out` must be valid for writes.
#[no_mangle]
pub unsafe extern "C" fn ghz_density_fidelity_with_ghz(
    m: *const GhzDensityMatrix,
    phase: u32,
    out: *mut f64,
) -> GhzStatus {
    guard(|| {
        let rho = handle(m)?;
        let psi = ghz_state(rho.qubit_count()?, convention(phase)?)?.to_pure_state()?;
        write_out(out, fidelity_with_pure(rho, &psi)?)
    })
}

/// Smallest eigenvalue of the partial transpose over the qubits in
/// `part_a[0..len]`.
///
/// # Safety
/// `m` must be a live handle, `part_a` valid for `len` reads, `out` valid for writes.
#[no_mangle]
pub unsafe extern "C" fn ghz_density_ppt_min_eigenvalue(
    m: *const GhzDensityMatrix,
    part_a: *const usize,
    len: usize,
    out: *mut f64,
) -> GhzStatus {
    guard(|| {
        let rho = handle(m)?;
        if part_a.is_null() && len > 0 {
            return Err(null("part_a"));
        }
        let part = if len == 0 {
            &[][..]
        } else {
            std::slice::from_raw_parts(part_a, len)
        };
        let b = Bipartition::new(rho.qubit_count()?, part)?;
        write_out(out, ppt_check(rho, &b)?.witness)
    })
}

/// Renormalized projection of `m` onto the four-vector singlet-form subspace.
/// The result is a 4x4 handle.
///
/// # Safety
/// `m` must be a live handle; `out` must be valid for writes.
#[no_mangle]
pub unsafe extern "C" fn ghz_density_project_singlet_form(
    m: *const GhzDensityMatrix,
    phase: u32,
    out: *mut *mut GhzDensityMatrix,
) -> GhzStatus {
    guard(|| {
        let rho = handle(m)?;
        if out.is_null() {
            return Err(null("output pointer"));
        }
        let basis = singlet_form_basis(rho.qubit_count()?, convention(phase)?)?;
        write_out(out, boxed(project_renormalize(rho, &basis.vectors)?))
    })
}

/// Von Neumann entropy in logarithm base `base`.
///
/// # Safety
/// `m` must be a live handle; `out` must be valid for writes.
#[no_mangle]
pub unsafe extern "C" fn ghz_density_entropy(
    m: *const GhzDensityMatrix,
    base: f64,
    out: *mut f64,
) -> GhzStatus {
    guard(|| {
        let rho = handle(m)?;
        write_out(out, von_neumann_entropy(rho, LogBase::new(base)?)?)
    })
}

/// Purity above which the `n`-qubit pseudo-pure state is nonseparable.
/// Returns NaN for `n < 2`.
#[no_mangle]
pub extern "C" fn ghz_purity_threshold(n: usize) -> f64 {
    if n < 2 {
        return f64::NAN;
    }
    purity_threshold(n)
}

/// Werner weight of the projected `n`-qubit pseudo-pure state.
///
/// # Safety
/// `out` must be valid for writes.
#[no_mangle]
pub unsafe extern "C" fn ghz_x_of(n: usize, epsilon: f64, out: *mut f64) -> GhzStatus {
    guard(|| {
        PseudoPureParams::new(n, epsilon, PhaseConvention::PaperIN1)?;
        write_out(out, x_of(n, epsilon))
    })
}

/// # Safety
/// `out` must be valid for writes.
#[no_mangle]
pub unsafe extern "C" fn ghz_measure_report(
    n: usize,
    epsilon: f64,
    base: f64,
    out: *mut GhzMeasureReport,
) -> GhzStatus {
    guard(|| {
        let r = measure_report(n, epsilon, LogBase::new(base)?)?;
        let verdict = match r.verdict {
            Verdict::Separable => GHZ_VERDICT_SEPARABLE,
            Verdict::Nonseparable => GHZ_VERDICT_NONSEPARABLE,
            Verdict::Undecided => GHZ_VERDICT_UNDECIDED,
        };
        write_out(
            out,
            GhzMeasureReport {
                n: r.n,
                epsilon: r.epsilon,
                x: r.x,
                lambda: r.lambda,
                fidelity: r.fidelity,
                threshold: r.threshold,
                verdict,
                e_ls: r.e_ls,
                e_eq10: r.e_eq10,
                has_bipartite_avg: r.e_bipartite_avg.is_some() as i32,
                e_bipartite_avg: r.e_bipartite_avg.unwrap_or(f64::NAN),
                e_teleport: r.e_teleport,
                e_opnorm: r.e_opnorm,
                log_base: r.log_base,
            },
        )
    })
}

/// Renders the sweep `n_min..=n_max` by `eps_start:eps_stop:eps_step` in the
/// given `GHZ_FORMAT_*`. A zero `eps_step` selects the single point
/// `eps_start`. Release `*out` with [`ghz_string_free`].
///
/// # Safety
/// `out` must be valid for writes.
#[no_mangle]
pub unsafe extern "C" fn ghz_report_string(
    n_min: usize,
    n_max: usize,
    eps_start: f64,
    eps_stop: f64,
    eps_step: f64,
    base: f64,
    format: u32,
    out: *mut *mut c_char,
) -> GhzStatus {
    guard(|| {
        if out.is_null() {
            return Err(null("output pointer"));
        }
        if n_min > n_max {
            return Err(invalid(format!("empty qubit range {n_min}..={n_max}")));
        }
        let format = match format {
            GHZ_FORMAT_TABLE => OutputFormat::Table,
            GHZ_FORMAT_CSV => OutputFormat::Csv,
            GHZ_FORMAT_JSON => OutputFormat::Json,
            other => return Err(invalid(format!("unknown output format {other}"))),
        };
        let spec = if eps_step == 0.0 {
            format!("{eps_start}")
        } else {
            format!("{eps_start}:{eps_stop}:{eps_step}")
        };
        let config = RunConfig {
            ns: (n_min..=n_max).collect(),
            epsilon: spec.parse::<EpsilonSpec>()?,
            log_base: LogBase::new(base)?,
            format,
            ..RunConfig::default()
        };
        let reports = run_report(&config)?;
        let mut buf = Vec::new();
        emit(&reports, config.format, config.precision, &mut buf)
            .map_err(|e| Failure(GhzStatus::Io, e.to_string()))?;
        let text = String::from_utf8(buf).map_err(|e| Failure(GhzStatus::Io, e.to_string()))?;
        write_out(out, into_c_string(text)?)
    })
}

/// Runs the four-ion reproduction check. Writes 1 or 0 to `all_passed` and,
/// when `text` is not null, the rendered table (release with
/// [`ghz_string_free`]).
///
/// # Safety
/// `all_passed` must be valid for writes; `text` must be null or valid for writes.
#[no_mangle]
pub unsafe extern "C" fn ghz_reproduce_paper(
    base: f64,
    all_passed: *mut i32,
    text: *mut *mut c_char,
) -> GhzStatus {
    guard(|| {
        if all_passed.is_null() {
            return Err(null("all_passed"));
        }
        let repro = reproduce_paper(LogBase::new(base)?)?;
        if !text.is_null() {
            let mut buf = Vec::new();
            emit_reproduction(&repro, &mut buf)
                .map_err(|e| Failure(GhzStatus::Io, e.to_string()))?;
            let s = String::from_utf8(buf).map_err(|e| Failure(GhzStatus::Io, e.to_string()))?;
            write_out(text, into_c_string(s)?)?;
        }
        write_out(all_passed, repro.all_passed() as i32)
    })
}

/// Releases a string returned by this library. Null is ignored.
///
/// # Safety
/// `s` must be null or a string from this library not yet freed.
#[no_mangle]
pub unsafe extern "C" fn ghz_string_free(s: *mut c_char) {
    if !s.is_null() {
        drop(CString::from_raw(s));
    }
}
