//! C ABI for covdesign.
//!
//! Objects cross the boundary as opaque handles that the caller owns and
//! releases with the matching `*_free`. Every fallible call returns a
//! [`CovStatus`]; on failure the message is available from
//! [`cov_last_error`] on the same thread until the next failing call.
//! Output pointers are written only on success. Panics never unwind into C.

use std::cell::RefCell;
use std::ffi::{c_char, CStr, CString};
use std::panic::{catch_unwind, AssertUnwindSafe};
use std::ptr;

use covdesign::design::{search_design, CoverageReport, DesignSpec, PackingTable, SearchOptions};
use covdesign::eval::{
    blind_eval, BenchmarkFunction, DesignGenerator, DesignMethod, FunctionKind, OracleConfig,
};
use covdesign::pcf::{target_profile, Family, PcfParams};
use covdesign::spectral::{psd_from_params, SpectralGrid};
use covdesign::synthesis::{
    min_pairwise_distance, synthesize, PointSet, Schedule, SynthesisConfig,
};
use covdesign::Error;

pub const COV_FAMILY_PDS: u32 = 0;
pub const COV_FAMILY_SFSD: u32 = 1;
pub const COV_FAMILY_PROPOSED: u32 = 2;

pub const COV_METHOD_RANDOM: u32 = 0;
pub const COV_METHOD_LHS: u32 = 1;
pub const COV_METHOD_SOBOL: u32 = 2;
pub const COV_METHOD_PDS_DART: u32 = 3;
pub const COV_METHOD_SFSD: u32 = 4;
pub const COV_METHOD_PROPOSED: u32 = 5;

pub const COV_SCHEDULE_ALR: u32 = 0;
pub const COV_SCHEDULE_CLR: u32 = 1;

pub const COV_FUNCTION_ALPINE1: u32 = 0;
pub const COV_FUNCTION_ACKLEY: u32 = 1;

#[repr(C)]
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum CovStatus {
    Ok = 0,
    InvalidArgument = 1,
    Infeasible = 2,
    PartialDesign = 3,
    Numerical = 4,
    Io = 5,
    Panic = 6,
}

/// PCF parameters; `family` is one of the `COV_FAMILY_*` constants.
#[repr(C)]
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct CovPcfParams {
    pub family: u32,
    pub r_min: f64,
    pub r_1: f64,
    pub p0: f64,
    pub a: f64,
    pub b: f64,
    pub c: f64,
    pub phase: f64,
}

/// Result of a coverage search.
pub struct CovReport(CoverageReport);

/// `n` points in `[0, 1]^d`, row-major.
pub struct CovPointSet(PointSet);

thread_local! {
    static LAST_ERROR: RefCell<Option<CString>> = const { RefCell::new(None) };
}

fn set_error(msg: String) {
    let c = CString::new(msg.replace('\0', " ")).expect("interior NULs were replaced");
    LAST_ERROR.with(|e| *e.borrow_mut() = Some(c));
}

fn status_of(e: &Error) -> CovStatus {
    match e.root() {
        Error::InvalidArgument(_) | Error::Parse { .. } => CovStatus::InvalidArgument,
        Error::InfeasibleDesign(_) => CovStatus::Infeasible,
        Error::PartialDesign { .. } => CovStatus::PartialDesign,
        Error::Numerical(_) => CovStatus::Numerical,
        _ => CovStatus::Io,
    }
}

fn invalid(msg: &str) -> Error {
    Error::InvalidArgument(msg.to_string())
}

/// Runs `f`, converting errors and panics into a status and a stored message.
fn guard(f: impl FnOnce() -> covdesign::Result<()>) -> CovStatus {
    match catch_unwind(AssertUnwindSafe(f)) {
        Ok(Ok(())) => CovStatus::Ok,
        Ok(Err(e)) => {
            set_error(e.to_string());
            status_of(&e)
        }
        Err(payload) => {
            let msg = payload
                .downcast_ref::<&str>()
                .map(|s| s.to_string())
                .or_else(|| payload.downcast_ref::<String>().cloned())
                .unwrap_or_else(|| "unknown panic".into());
            set_error(format!("internal panic: {msg}"));
            CovStatus::Panic
        }
    }
}

unsafe fn out_ref<'a, T>(p: *mut T) -> covdesign::Result<&'a mut T> {
    p.as_mut().ok_or_else(|| invalid("output pointer is null"))
}

unsafe fn in_ref<'a, T>(p: *const T) -> covdesign::Result<&'a T> {
    p.as_ref().ok_or_else(|| invalid("handle is null"))
}

unsafe fn in_slice<'a>(p: *const f64, len: usize) -> covdesign::Result<&'a [f64]> {
    if len == 0 {
        return Ok(&[]);
    }
    if p.is_null() {
        return Err(invalid("array pointer is null"));
    }
    Ok(std::slice::from_raw_parts(p, len))
}

fn family(code: u32) -> covdesign::Result<Family> {
    match code {
        COV_FAMILY_PDS => Ok(Family::Pds),
        COV_FAMILY_SFSD => Ok(Family::Sfsd),
        COV_FAMILY_PROPOSED => Ok(Family::Proposed),
        other => Err(Error::InvalidArgument(format!(
            "unknown family code {other}"
        ))),
    }
}

fn family_code(f: Family) -> u32 {
    match f {
        Family::Pds => COV_FAMILY_PDS,
        Family::Sfsd => COV_FAMILY_SFSD,
        Family::Proposed => COV_FAMILY_PROPOSED,
    }
}

fn method(code: u32) -> covdesign::Result<DesignMethod> {
    Ok(match code {
        COV_METHOD_RANDOM => DesignMethod::Random,
        COV_METHOD_LHS => DesignMethod::Lhs,
        COV_METHOD_SOBOL => DesignMethod::Sobol,
        COV_METHOD_PDS_DART => DesignMethod::PdsDart,
        COV_METHOD_SFSD => DesignMethod::Sfsd,
        COV_METHOD_PROPOSED => DesignMethod::Proposed,
        other => {
            return Err(Error::InvalidArgument(format!(
                "unknown method code {other}"
            )))
        }
    })
}

fn schedule(code: u32) -> covdesign::Result<Schedule> {
    match code {
        COV_SCHEDULE_ALR => Ok(Schedule::Alr),
        COV_SCHEDULE_CLR => Ok(Schedule::Clr),
        other => Err(Error::InvalidArgument(format!(
            "unknown schedule code {other}"
        ))),
    }
}

fn function(code: u32) -> covdesign::Result<FunctionKind> {
    match code {
        COV_FUNCTION_ALPINE1 => Ok(FunctionKind::Alpine1),
        COV_FUNCTION_ACKLEY => Ok(FunctionKind::Ackley),
        other => Err(Error::InvalidArgument(format!(
            "unknown function code {other}"
        ))),
    }
}

impl From<&PcfParams> for CovPcfParams {
    fn from(p: &PcfParams) -> Self {
        Self {
            family: family_code(p.family),
            r_min: p.r_min,
            r_1: p.r_1,
            p0: p.p0,
            a: p.a,
            b: p.b,
            c: p.c,
            phase: p.d_phase,
        }
    }
}

impl CovPcfParams {
    fn to_params(self) -> covdesign::Result<PcfParams> {
        let p = PcfParams {
            family: family(self.family)?,
            r_min: self.r_min,
            r_1: self.r_1,
            p0: self.p0,
            a: self.a,
            b: self.b,
            c: self.c,
            d_phase: self.phase,
        };
        p.validate()?;
        Ok(p)
    }
}

/// Library version, a static NUL-terminated string.
#[no_mangle]
pub extern "C" fn cov_version() -> *const c_char {
    static VERSION: &CStr =
        match CStr::from_bytes_with_nul(concat!(env!("CARGO_PKG_VERSION"), "\0").as_bytes()) {
            Ok(v) => v,
            Err(_) => panic!("version contains a NUL"),
        };
    VERSION.as_ptr()
}

/// Message of the last failure on this thread, or NULL. Valid until the next
/// failing call on the same thread.
#[no_mangle]
pub extern "C" fn cov_last_error() -> *const c_char {
    LAST_ERROR.with(|e| e.borrow().as_ref().map_or(ptr::null(), |c| c.as_ptr()))
}

/// Largest realizable coverage radius for `family` at `(n, d)`. `p0` may be
/// NULL with `p0_len == 0` to search the default peak grid.
///
/// # Safety
/// `p0` must point to `p0_len` doubles; `out` must be a valid pointer.
#[no_mangle]
pub unsafe extern "C" fn cov_design_search(
    n: usize,
    d: usize,
    family_code: u32,
    p0: *const f64,
    p0_len: usize,
    out: *mut *mut CovReport,
) -> CovStatus {
    guard(|| {
        let out = out_ref(out)?;
        let spec = DesignSpec::new(n, d)?;
        let mut opts = SearchOptions::default();
        let grid = in_slice(p0, p0_len)?;
        if !grid.is_empty() {
            opts.p0_grid = grid.to_vec();
        }
        let report = search_design(
            &spec,
            family(family_code)?,
            &opts,
            &PackingTable::standard(),
        )?;
        *out = Box::into_raw(Box::new(CovReport(report)));
        Ok(())
    })
}

/// Relative radius of `report`, NaN for a NULL handle.
///
/// # Safety
/// `report` must be NULL or a live handle.
#[no_mangle]
pub unsafe extern "C" fn cov_report_rho(report: *const CovReport) -> f64 {
    report.as_ref().map_or(f64::NAN, |r| r.0.rho)
}

/// # Safety
/// `report` must be a live handle and `out` a valid pointer.
#[no_mangle]
pub unsafe extern "C" fn cov_report_params(
    report: *const CovReport,
    out: *mut CovPcfParams,
) -> CovStatus {
    guard(|| {
        let r = in_ref(report)?;
        *out_ref(out)? = CovPcfParams::from(&r.0.params);
        Ok(())
    })
}

/// # Safety
/// `report` must be NULL or a handle not yet freed.
#[no_mangle]
pub unsafe extern "C" fn cov_report_free(report: *mut CovReport) {
    if !report.is_null() {
        drop(Box::from_raw(report));
    }
}

/// Writes `P(k)` at `m_k` evenly spaced angular wavenumbers in
/// `[k_min, k_max]` to `out`.
///
/// # Safety
/// `params` must be valid and `out` must hold `m_k` doubles.
#[no_mangle]
pub unsafe extern "C" fn cov_pcf_to_psd(
    params: *const CovPcfParams,
    n: usize,
    d: usize,
    k_min: f64,
    k_max: f64,
    m_k: usize,
    out: *mut f64,
) -> CovStatus {
    guard(|| {
        let p = in_ref(params)?.to_params()?;
        let grid = SpectralGrid::new(k_min, k_max, m_k)?;
        if out.is_null() {
            return Err(invalid("output array is null"));
        }
        let psd = psd_from_params(&p, n, d, &grid)?;
        std::slice::from_raw_parts_mut(out, m_k).copy_from_slice(psd.values());
        Ok(())
    })
}

/// Generates a design with one of the `COV_METHOD_*` methods. Synthesized
/// methods run the coverage search first.
///
/// # Safety
/// `out` must be a valid pointer.
#[no_mangle]
pub unsafe extern "C" fn cov_generate(
    method_code: u32,
    n: usize,
    d: usize,
    seed: u64,
    out: *mut *mut CovPointSet,
) -> CovStatus {
    guard(|| {
        let out = out_ref(out)?;
        let spec = DesignSpec::new(n, d)?;
        let g = DesignGenerator::new(method(method_code)?, spec, &SearchOptions::default())?;
        *out = Box::into_raw(Box::new(CovPointSet(g.generate(seed)?)));
        Ok(())
    })
}

/// Synthesizes points matching the PCF of `report` with `t_max` iterations.
/// `final_objective` may be NULL.
///
/// # Safety
/// `report` must be a live handle, `out` a valid pointer.
#[no_mangle]
pub unsafe extern "C" fn cov_synthesize(
    report: *const CovReport,
    seed: u64,
    t_max: usize,
    schedule_code: u32,
    out: *mut *mut CovPointSet,
    final_objective: *mut f64,
) -> CovStatus {
    guard(|| {
        let r = &in_ref(report)?.0;
        let out = out_ref(out)?;
        let spec = r.spec()?;
        let grid = covdesign::design::default_radial_grid(&spec);
        let target = target_profile(&r.params, &grid)?;
        let mut cfg = SynthesisConfig::new(&spec, grid, schedule(schedule_code)?, seed);
        cfg.t_max = t_max;
        let (points, trace) = synthesize(&target, &spec, &cfg)?;
        if let Some(f) = final_objective.as_mut() {
            *f = trace.final_objective();
        }
        *out = Box::into_raw(Box::new(CovPointSet(points)));
        Ok(())
    })
}

/// Copies `n * d` row-major coordinates into a new point set.
///
/// # Safety
/// `coords` must point to `n * d` doubles; `out` must be a valid pointer.
#[no_mangle]
pub unsafe extern "C" fn cov_pointset_new(
    coords: *const f64,
    n: usize,
    d: usize,
    out: *mut *mut CovPointSet,
) -> CovStatus {
    guard(|| {
        let out = out_ref(out)?;
        let len = n.checked_mul(d).ok_or_else(|| invalid("n * d overflows"))?;
        let points = PointSet::new(d, in_slice(coords, len)?.to_vec())?;
        *out = Box::into_raw(Box::new(CovPointSet(points)));
        Ok(())
    })
}

/// Number of points, 0 for a NULL handle.
///
/// # Safety
/// `points` must be NULL or a live handle.
#[no_mangle]
pub unsafe extern "C" fn cov_pointset_n(points: *const CovPointSet) -> usize {
    points.as_ref().map_or(0, |p| p.0.n())
}

/// Dimension, 0 for a NULL handle.
///
/// # Safety
/// `points` must be NULL or a live handle.
#[no_mangle]
pub unsafe extern "C" fn cov_pointset_d(points: *const CovPointSet) -> usize {
    points.as_ref().map_or(0, |p| p.0.d())
}

/// Row-major coordinates, owned by the handle and valid until it is freed.
///
/// # Safety
/// `points` must be NULL or a live handle.
#[no_mangle]
pub unsafe extern "C" fn cov_pointset_coords(points: *const CovPointSet) -> *const f64 {
    points
        .as_ref()
        .map_or(ptr::null(), |p| p.0.coords().as_ptr())
}

/// # Safety
/// `points` must be a live handle and `out` a valid pointer.
#[no_mangle]
pub unsafe extern "C" fn cov_min_distance(points: *const CovPointSet, out: *mut f64) -> CovStatus {
    guard(|| {
        let p = in_ref(points)?;
        *out_ref(out)? = min_pairwise_distance(&p.0)?;
        Ok(())
    })
}

/// # Safety
/// `points` must be NULL or a handle not yet freed.
#[no_mangle]
pub unsafe extern "C" fn cov_pointset_free(points: *mut CovPointSet) {
    if !points.is_null() {
        drop(Box::from_raw(points));
    }
}

/// Blind-exploration recovery MSE with the default KNN oracle over `trials`
/// designs seeded `seed, seed + 1, ...`.
///
/// # Safety
/// `mse_mean` and `mse_std` must be valid pointers.
#[no_mangle]
pub unsafe extern "C" fn cov_blind_eval(
    method_code: u32,
    function_code: u32,
    n: usize,
    d: usize,
    trials: usize,
    seed: u64,
    mse_mean: *mut f64,
    mse_std: *mut f64,
) -> CovStatus {
    guard(|| {
        let (mean, std) = (out_ref(mse_mean)?, out_ref(mse_std)?);
        let spec = DesignSpec::new(n, d)?;
        let f = BenchmarkFunction::new(function(function_code)?, d)?;
        let g = DesignGenerator::new(method(method_code)?, spec, &SearchOptions::default())?;
        let r = blind_eval(&g, &f, trials, seed, &OracleConfig::default())?;
        *mean = r.mse_mean;
        *std = r.mse_std;
        Ok(())
    })
}
