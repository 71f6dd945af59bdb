//! C ABI for `varlearn`.
//!
//! Conventions:
//! * Every fallible function returns a [`VlStatus`]; on failure a message is
//!   available from [`vl_last_error`] on the same thread.
//! * Objects are opaque handles created by `vl_*_new`-style functions and
//!   released with the matching `vl_*_free`.
//! * Arrays are passed as pointer plus length; output buffers are caller-owned
//!   and their required size is documented per function.
//! * Panics never cross the boundary; they surface as `VL_STATUS_PANIC`.

use std::cell::RefCell;
use std::ffi::{c_char, CStr, CString};
use std::panic::{catch_unwind, AssertUnwindSafe};

use varlearn::dynamics;
use varlearn::npl::{self, NplSchedule, ToyUgSpec};
use varlearn::stability::{self, Classification, RestPointReport};
use varlearn::{AdvantageMatrix, Error, PopulationState, StateKind, StochasticSchedule};

#[repr(C)]
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum VlStatus {
    Ok = 0,
    NullPointer = 1,
    InvalidArgument = 2,
    DimensionMismatch = 3,
    ImproperMatrix = 4,
    InvalidMatrix = 5,
    BufferTooSmall = 6,
    IndexOutOfRange = 7,
    Panic = 8,
}

#[repr(C)]
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum VlStateKind {
    Vertex = 0,
    Boundary = 1,
    Interior = 2,
}

#[repr(C)]
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum VlClassification {
    AsymptoticallyStable = 0,
    Unstable = 1,
    Inconclusive = 2,
}

/// Scalar summary of one rest point.
#[repr(C)]
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct VlRestPointInfo {
    pub kind: VlStateKind,
    pub classification: VlClassification,
    pub residual: f64,
    pub largest_modulus: f64,
}

/// Opaque advantage matrix.
pub struct VlMatrix(AdvantageMatrix);

/// Opaque list of rest points.
pub struct VlRestPoints(Vec<RestPointReport>);

thread_local! {
    static LAST_ERROR: RefCell<CString> = RefCell::new(CString::default());
}

fn set_error(msg: String) {
    let c = CString::new(msg.replace('\0', " ")).expect("interior NULs removed");
    LAST_ERROR.with(|e| *e.borrow_mut() = c);
}

struct Failure(VlStatus, String);

impl From<Error> for Failure {
    fn from(e: Error) -> Self {
        let status = match e {
            Error::DimensionMismatch { .. } => VlStatus::DimensionMismatch,
            Error::Improper { .. } => VlStatus::ImproperMatrix,
            Error::InvalidMatrix(_)
            | Error::MatrixFile(_)
            | Error::NotSquare { .. }
            | Error::BadShape { .. }
            | Error::RegionSum { .. }
            | Error::RegionKey(_) => VlStatus::InvalidMatrix,
            Error::IndexOutOfRange { .. } => VlStatus::IndexOutOfRange,
            _ => VlStatus::InvalidArgument,
        };
        Failure(status, e.to_string())
    }
}

type FfiResult = Result<(), Failure>;

fn guard(f: impl FnOnce() -> FfiResult) -> VlStatus {
    match catch_unwind(AssertUnwindSafe(f)) {
        Ok(Ok(())) => {
            set_error(String::new());
            VlStatus::Ok
        }
        Ok(Err(Failure(status, msg))) => {
            set_error(msg);
            status
        }
        Err(_) => {
            set_error("internal panic".into());
            VlStatus::Panic
        }
    }
}

fn null(what: &str) -> Failure {
    Failure(VlStatus::NullPointer, format!("`{what}` is NULL"))
}

fn too_small(need: usize, have: usize) -> Failure {
    Failure(
        VlStatus::BufferTooSmall,
        format!("output buffer holds {have} values, {need} needed"),
    )
}

unsafe fn slice<'a>(p: *const f64, len: usize, what: &str) -> Result<&'a [f64], Failure> {
    if len == 0 {
        return Ok(&[]);
    }
    if p.is_null() {
        return Err(null(what));
    }
    Ok(std::slice::from_raw_parts(p, len))
}

unsafe fn out_slice<'a>(
    p: *mut f64,
    len: usize,
    need: usize,
    what: &str,
) -> Result<&'a mut [f64], Failure> {
    if len < need {
        return Err(too_small(need, len));
    }
    if need == 0 {
        return Ok(&mut []);
    }
    if p.is_null() {
        return Err(null(what));
    }
    Ok(std::slice::from_raw_parts_mut(p, len))
}

unsafe fn matrix<'a>(m: *const VlMatrix) -> Result<&'a AdvantageMatrix, Failure> {
    m.as_ref().map(|m| &m.0).ok_or_else(|| null("matrix"))
}

unsafe fn state(p: *const f64, n: usize) -> Result<PopulationState, Failure> {
    Ok(PopulationState::new(slice(p, n, "p")?.to_vec())?)
}

unsafe fn store<T>(out: *mut *mut T, value: T) -> FfiResult {
    if out.is_null() {
        return Err(null("out"));
    }
    *out = Box::into_raw(Box::new(value));
    Ok(())
}

/// Message for the last failed call on this thread; empty after a success.
/// Valid until the next `vl_*` call on the same thread.
#[no_mangle]
pub extern "C" fn vl_last_error() -> *const c_char {
    LAST_ERROR.with(|e| e.borrow().as_ptr())
}

/// Library version as a static NUL-terminated string.
#[no_mangle]
pub extern "C" fn vl_version() -> *const c_char {
    concat!(env!("CARGO_PKG_VERSION"), "\0").as_ptr().cast()
}

/// Builds a validated matrix from `n * n` row-major entries.
///
/// # Safety
/// `entries` must point to `n * n` doubles; `out` must be writable.
#[no_mangle]
pub unsafe extern "C" fn vl_matrix_new(
    entries: *const f64,
    n: usize,
    out: *mut *mut VlMatrix,
) -> VlStatus {
    guard(|| {
        let len = n
            .checked_mul(n)
            .ok_or_else(|| Failure(VlStatus::InvalidArgument, format!("n = {n} overflows")))?;
        let flat = slice(entries, len, "entries")?;
        let rows = flat.chunks(n.max(1)).map(<[f64]>::to_vec).collect();
        store(out, VlMatrix(AdvantageMatrix::new(rows)?))
    })
}

/// Two grammars: `a1` is G1's advantage over G2, `a2` the converse.
///
/// # Safety
/// `out` must be writable.
#[no_mangle]
pub unsafe extern "C" fn vl_matrix_two_grammar(a1: f64, a2: f64, out: *mut *mut VlMatrix) -> VlStatus {
    guard(|| store(out, VlMatrix(AdvantageMatrix::two_grammar(a1, a2)?)))
}

/// # Safety
/// `out` must be writable.
#[no_mangle]
pub unsafe extern "C" fn vl_matrix_babelian(n: usize, a: f64, out: *mut *mut VlMatrix) -> VlStatus {
    guard(|| store(out, VlMatrix(AdvantageMatrix::babelian(n, a)?)))
}

/// # Safety
/// `out` must be writable.
#[no_mangle]
pub unsafe extern "C" fn vl_matrix_symmetric(
    a: f64,
    b: f64,
    c: f64,
    out: *mut *mut VlMatrix,
) -> VlStatus {
    guard(|| store(out, VlMatrix(AdvantageMatrix::symmetric(a, b, c)?)))
}

/// # Safety
/// `out` must be writable.
#[no_mangle]
pub unsafe extern "C" fn vl_matrix_quasi_babelian(a: f64, b: f64, out: *mut *mut VlMatrix) -> VlStatus {
    guard(|| store(out, VlMatrix(AdvantageMatrix::quasi_babelian(a, b)?)))
}

/// Parses the JSON matrix format (`entries` or `regions`).
///
/// # Safety
/// `json` must be a NUL-terminated string; `out` must be writable.
#[no_mangle]
pub unsafe extern "C" fn vl_matrix_from_json(json: *const c_char, out: *mut *mut VlMatrix) -> VlStatus {
    guard(|| {
        if json.is_null() {
            return Err(null("json"));
        }
        let text = CStr::from_ptr(json)
            .to_str()
            .map_err(|e| Failure(VlStatus::InvalidArgument, e.to_string()))?;
        store(out, VlMatrix(AdvantageMatrix::from_json_str(text)?))
    })
}

/// # Safety
/// `m` must be NULL or a handle from a `vl_matrix_*` constructor, freed once.
#[no_mangle]
pub unsafe extern "C" fn vl_matrix_free(m: *mut VlMatrix) {
    if !m.is_null() {
        drop(Box::from_raw(m));
    }
}

/// Number of grammars, or 0 for NULL.
///
/// # Safety
/// `m` must be NULL or a live handle.
#[no_mangle]
pub unsafe extern "C" fn vl_matrix_dim(m: *const VlMatrix) -> usize {
    m.as_ref().map_or(0, |m| m.0.n())
}

/// Copies the `n * n` row-major entries into `out`.
///
/// # Safety
/// `m` must be a live handle; `out` must hold `out_len` doubles.
#[no_mangle]
pub unsafe extern "C" fn vl_matrix_entries(m: *const VlMatrix, out: *mut f64, out_len: usize) -> VlStatus {
    guard(|| {
        let m = matrix(m)?;
        let rows = m.rows();
        let dst = out_slice(out, out_len, m.n() * m.n(), "out")?;
        for (d, v) in dst.iter_mut().zip(rows.iter().flatten()) {
            *d = *v;
        }
        Ok(())
    })
}

/// Whether every off-diagonal entry is positive.
///
/// # Safety
/// `m` must be a live handle; `proper` must be writable.
#[no_mangle]
pub unsafe extern "C" fn vl_matrix_is_proper(m: *const VlMatrix, proper: *mut bool) -> VlStatus {
    guard(|| {
        let m = matrix(m)?;
        *proper.as_mut().ok_or_else(|| null("proper"))? = m.is_proper();
        Ok(())
    })
}

/// Penalty probabilities `c` at population `p` (both length `n`).
///
/// # Safety
/// `m` must be a live handle; `p` and `out` must hold `n` doubles.
#[no_mangle]
pub unsafe extern "C" fn vl_penalties(
    m: *const VlMatrix,
    p: *const f64,
    n: usize,
    out: *mut f64,
) -> VlStatus {
    guard(|| {
        let c = matrix(m)?.penalties(&state(p, n)?)?;
        out_slice(out, n, n, "out")?.copy_from_slice(&c.0);
        Ok(())
    })
}

/// One step of the reliable-learner map.
///
/// # Safety
/// `m` must be a live handle; `p` and `out` must hold `n` doubles.
#[no_mangle]
pub unsafe extern "C" fn vl_reliable_map(
    m: *const VlMatrix,
    p: *const f64,
    n: usize,
    out: *mut f64,
) -> VlStatus {
    guard(|| {
        let next = dynamics::reliable_map(matrix(m)?, &state(p, n)?)?;
        out_slice(out, n, n, "out")?.copy_from_slice(next.as_slice());
        Ok(())
    })
}

/// Deterministic trajectory; writes `(generations + 1) * n` values, generation-major.
///
/// # Safety
/// `m` must be a live handle; `p0` must hold `n` doubles and `out` `out_len`.
#[no_mangle]
pub unsafe extern "C" fn vl_trajectory(
    m: *const VlMatrix,
    p0: *const f64,
    n: usize,
    generations: usize,
    out: *mut f64,
    out_len: usize,
) -> VlStatus {
    guard(|| {
        let need = (generations + 1) * n;
        let dst = out_slice(out, out_len, need, "out")?;
        let a = matrix(m)?;
        let p = state(p0, n)?;
        let states = if generations == 0 {
            vec![p]
        } else {
            dynamics::trajectory(a, &p, generations)?.states
        };
        for (chunk, s) in dst.chunks_mut(n).zip(&states) {
            chunk.copy_from_slice(s.as_slice());
        }
        Ok(())
    })
}

/// Stochastic generations of LRP learner ensembles; output layout as [`vl_trajectory`].
///
/// # Safety
/// `m` must be a live handle; `p0` must hold `n` doubles and `out` `out_len`.
#[no_mangle]
pub unsafe extern "C" fn vl_generational_simulation(
    m: *const VlMatrix,
    p0: *const f64,
    n: usize,
    generations: usize,
    gamma: f64,
    tokens: u64,
    learners: usize,
    seed: u64,
    out: *mut f64,
    out_len: usize,
) -> VlStatus {
    guard(|| {
        let dst = out_slice(out, out_len, (generations + 1) * n, "out")?;
        let schedule = StochasticSchedule {
            gamma,
            tokens,
            learners,
            seed,
        };
        let traj = dynamics::generational_simulation(matrix(m)?, &state(p0, n)?, generations, &schedule)?;
        for (chunk, s) in dst.chunks_mut(n).zip(&traj.states) {
            chunk.copy_from_slice(s.as_slice());
        }
        Ok(())
    })
}

/// Final grammar probabilities of one LRP learner exposed to `tokens` inputs from `p`.
///
/// # Safety
/// `m` must be a live handle; `p` and `out` must hold `n` doubles.
#[no_mangle]
pub unsafe extern "C" fn vl_lrp_learner(
    m: *const VlMatrix,
    p: *const f64,
    n: usize,
    gamma: f64,
    tokens: u64,
    seed: u64,
    out: *mut f64,
) -> VlStatus {
    guard(|| {
        let s = dynamics::simulate_lrp_learner(matrix(m)?, &state(p, n)?, gamma, tokens, seed)?;
        out_slice(out, n, n, "out")?.copy_from_slice(&s.pi);
        Ok(())
    })
}

/// Chart-Jacobian eigenvalue moduli at `p`, descending; writes `n - 1` values.
///
/// # Safety
/// `m` must be a live handle; `p` must hold `n` doubles and `out` `n - 1`.
#[no_mangle]
pub unsafe extern "C" fn vl_eigen_moduli(
    m: *const VlMatrix,
    p: *const f64,
    n: usize,
    out: *mut f64,
) -> VlStatus {
    guard(|| {
        let j = stability::chart_jacobian(matrix(m)?, &state(p, n)?, stability::DEFAULT_STEP)?;
        let moduli = stability::eigen_moduli(&j)?;
        out_slice(out, moduli.len(), moduli.len(), "out")?.copy_from_slice(&moduli);
        Ok(())
    })
}

/// Locates and classifies all rest points; vertices come first.
///
/// # Safety
/// `m` must be a live handle; `out` must be writable.
#[no_mangle]
pub unsafe extern "C" fn vl_rest_points_find(
    m: *const VlMatrix,
    tol: f64,
    out: *mut *mut VlRestPoints,
) -> VlStatus {
    guard(|| {
        let reports = stability::find_rest_points(matrix(m)?, tol)?;
        store(out, VlRestPoints(reports))
    })
}

/// # Safety
/// `r` must be NULL or a live handle.
#[no_mangle]
pub unsafe extern "C" fn vl_rest_points_count(r: *const VlRestPoints) -> usize {
    r.as_ref().map_or(0, |r| r.0.len())
}

unsafe fn rest_point<'a>(r: *const VlRestPoints, index: usize) -> Result<&'a RestPointReport, Failure> {
    let list = &r.as_ref().ok_or_else(|| null("rest_points"))?.0;
    list.get(index).ok_or_else(|| {
        Failure(
            VlStatus::IndexOutOfRange,
            format!("index {index} out of range for {} rest points", list.len()),
        )
    })
}

/// Copies the location of rest point `index` (length = number of grammars).
///
/// # Safety
/// `r` must be a live handle; `out` must hold `out_len` doubles.
#[no_mangle]
pub unsafe extern "C" fn vl_rest_points_location(
    r: *const VlRestPoints,
    index: usize,
    out: *mut f64,
    out_len: usize,
) -> VlStatus {
    guard(|| {
        let loc = rest_point(r, index)?.location.as_slice();
        out_slice(out, out_len, loc.len(), "out")?[..loc.len()].copy_from_slice(loc);
        Ok(())
    })
}

/// # Safety
/// `r` must be a live handle; `info` must be writable.
#[no_mangle]
pub unsafe extern "C" fn vl_rest_points_info(
    r: *const VlRestPoints,
    index: usize,
    info: *mut VlRestPointInfo,
) -> VlStatus {
    guard(|| {
        let rp = rest_point(r, index)?;
        let info = info.as_mut().ok_or_else(|| null("info"))?;
        *info = VlRestPointInfo {
            kind: match rp.kind {
                StateKind::Vertex => VlStateKind::Vertex,
                StateKind::Boundary => VlStateKind::Boundary,
                StateKind::Interior => VlStateKind::Interior,
            },
            classification: match rp.classification {
                Classification::AsymptoticallyStable => VlClassification::AsymptoticallyStable,
                Classification::Unstable => VlClassification::Unstable,
                Classification::Inconclusive => VlClassification::Inconclusive,
            },
            residual: rp.residual,
            largest_modulus: rp.largest_modulus(),
        };
        Ok(())
    })
}

/// # Safety
/// `r` must be NULL or a handle from [`vl_rest_points_find`], freed once.
#[no_mangle]
pub unsafe extern "C" fn vl_rest_points_free(r: *mut VlRestPoints) {
    if !r.is_null() {
        drop(Box::from_raw(r));
    }
}

/// Quasi-Babelian orbit sweep. Writes `3 * count` limit coordinates and the
/// bifurcation estimate (NaN when no grid point reaches the first vertex).
///
/// # Safety
/// `rho` must hold `count` doubles, `start` 3, `limits` `limits_len`;
/// `estimate` must be writable.
#[no_mangle]
pub unsafe extern "C" fn vl_bifurcation_sweep(
    a: f64,
    rho: *const f64,
    count: usize,
    burn_in: usize,
    start: *const f64,
    limits: *mut f64,
    limits_len: usize,
    estimate: *mut f64,
) -> VlStatus {
    guard(|| {
        let grid = slice(rho, count, "rho")?;
        let start = state(start, 3)?;
        let dst = out_slice(limits, limits_len, 3 * count, "limits")?;
        let est = estimate.as_mut().ok_or_else(|| null("estimate"))?;
        let diagram = stability::bifurcation_sweep(a, grid, burn_in, &start)?;
        for (chunk, p) in dst.chunks_mut(3).zip(&diagram.points) {
            chunk.copy_from_slice(p.limit.as_slice());
        }
        *est = diagram.bifurcation_estimate.unwrap_or(f64::NAN);
        Ok(())
    })
}

/// Penalties `(G11, G10, G01, G00)` of the built-in two-parameter grammar space.
///
/// # Safety
/// `out` must hold 4 doubles.
#[no_mangle]
pub unsafe extern "C" fn vl_npl_penalties(x1: f64, x2: f64, out: *mut f64) -> VlStatus {
    guard(|| {
        let c = npl::npl_penalties(&ToyUgSpec::toy_ug(), &[x1, x2])?;
        out_slice(out, 4, 4, "out")?.copy_from_slice(&c);
        Ok(())
    })
}

/// Population parameter probabilities over NPL generations on the built-in
/// grammar space; writes `2 * (generations + 1)` values, generation-major.
///
/// # Safety
/// `x0` must hold 2 doubles and `out` `out_len`.
#[no_mangle]
pub unsafe extern "C" fn vl_npl_generations(
    x0: *const f64,
    generations: usize,
    gamma: f64,
    tokens: u64,
    learners: usize,
    seed: u64,
    out: *mut f64,
    out_len: usize,
) -> VlStatus {
    guard(|| {
        let x0 = slice(x0, 2, "x0")?;
        let dst = out_slice(out, out_len, 2 * (generations + 1), "out")?;
        let schedule = NplSchedule {
            gamma,
            tokens,
            learners,
            seed,
        };
        let states = npl::npl_generations(&ToyUgSpec::toy_ug(), x0, generations, &schedule)?;
        for (chunk, x) in dst.chunks_mut(2).zip(&states) {
            chunk.copy_from_slice(x);
        }
        Ok(())
    })
}
