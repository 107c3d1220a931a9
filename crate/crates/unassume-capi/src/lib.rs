//! C ABI for the unassume analyzer: run an analysis from file paths and
//! read back the JSON report through an opaque handle.
//!
//! All strings are NUL-terminated UTF-8. Pointers returned by accessors
//! stay valid until the owning report handle is freed. Every function is
//! safe to call from any thread; the per-thread last-error message is
//! updated by calls that return an error code.

use std::cell::RefCell;
use std::ffi::{c_char, CStr, CString};
use std::path::PathBuf;
use unassume::cli::{analyze_files, AnalyzeError, Options};
use unassume::solver::{DomainKind, Mode, Strategy};

/// Status codes returned by the API.
#[repr(C)]
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum UnassumeStatus {
    /// Success.
    Ok = 0,
    /// A file could not be read or written.
    IoError = 1,
    /// The program or witness failed to parse.
    ParseError = 2,
    /// Invalid mode/domain/strategy combination or argument value.
    ConfigError = 3,
    /// A required pointer argument was NULL or not valid UTF-8.
    InvalidArgument = 4,
}

/// Opaque analysis result handle.
pub struct UnassumeReport {
    json: CString,
    property_verified: bool,
    witness_validated: bool,
}

thread_local! {
    static LAST_ERROR: RefCell<CString> = RefCell::new(CString::default());
}

fn set_error(msg: &str) {
    let c = CString::new(msg.replace('\0', " ")).unwrap_or_default();
    LAST_ERROR.with(|e| *e.borrow_mut() = c);
}

/// The last error message recorded on this thread, or an empty string.
/// The pointer stays valid until the next failing call on this thread.
#[no_mangle]
pub extern "C" fn unassume_last_error() -> *const c_char {
    LAST_ERROR.with(|e| e.borrow().as_ptr())
}

unsafe fn arg_str<'a>(p: *const c_char, name: &str) -> Result<&'a str, UnassumeStatus> {
    if p.is_null() {
        set_error(&format!("{name} must not be NULL"));
        return Err(UnassumeStatus::InvalidArgument);
    }
    CStr::from_ptr(p).to_str().map_err(|_| {
        set_error(&format!("{name} is not valid UTF-8"));
        UnassumeStatus::InvalidArgument
    })
}

unsafe fn opt_str<'a>(p: *const c_char, name: &str) -> Result<Option<&'a str>, UnassumeStatus> {
    if p.is_null() {
        Ok(None)
    } else {
        arg_str(p, name).map(Some)
    }
}

fn parse_mode(s: Option<&str>) -> Result<Option<Mode>, UnassumeStatus> {
    match s {
        None | Some("") => Ok(None),
        Some("none") => Ok(Some(Mode::None)),
        Some("total-init") => Ok(Some(Mode::TotalInit)),
        Some("partial-init") => Ok(Some(Mode::PartialInit)),
        Some("unassume") => Ok(Some(Mode::Unassume)),
        Some(other) => {
            set_error(&format!("unknown mode `{other}`"));
            Err(UnassumeStatus::ConfigError)
        }
    }
}

fn parse_domain(s: Option<&str>) -> Result<DomainKind, UnassumeStatus> {
    match s {
        None | Some("") | Some("interval") => Ok(DomainKind::Interval),
        Some("octagon") => Ok(DomainKind::Octagon),
        Some(other) => {
            set_error(&format!("unknown domain `{other}`"));
            Err(UnassumeStatus::ConfigError)
        }
    }
}

fn parse_strategy(s: Option<&str>) -> Result<Option<Strategy>, UnassumeStatus> {
    match s {
        None | Some("") => Ok(None),
        Some("propagating") => Ok(Some(Strategy::Propagating)),
        Some("naive") => Ok(Some(Strategy::Naive)),
        Some("dual-narrowing") => Ok(Some(Strategy::DualNarrowing)),
        Some(other) => {
            set_error(&format!("unknown strategy `{other}`"));
            Err(UnassumeStatus::ConfigError)
        }
    }
}

/// Analyze `program_path` (optionally guided by `witness_path`) and
/// store a new report handle in `*out`. `mode`, `domain` and `strategy`
/// accept the same values as the command-line flags; NULL or "" picks
/// the default. On error `*out` is left untouched and the message is
/// available via `unassume_last_error`.
///
/// # Safety
/// Pointer arguments must be NULL or point to NUL-terminated strings;
/// `out` must point to writable memory for one pointer.
#[no_mangle]
pub unsafe extern "C" fn unassume_analyze(
    program_path: *const c_char,
    witness_path: *const c_char,
    mode: *const c_char,
    domain: *const c_char,
    strategy: *const c_char,
    out: *mut *mut UnassumeReport,
) -> UnassumeStatus {
    if out.is_null() {
        set_error("out must not be NULL");
        return UnassumeStatus::InvalidArgument;
    }
    let opts = (|| {
        Ok(Options {
            program: PathBuf::from(arg_str(program_path, "program_path")?),
            witness: opt_str(witness_path, "witness_path")?.map(PathBuf::from),
            mode: parse_mode(opt_str(mode, "mode")?)?,
            domain: parse_domain(opt_str(domain, "domain")?)?,
            strategy: parse_strategy(opt_str(strategy, "strategy")?)?,
        })
    })();
    let opts = match opts {
        Ok(o) => o,
        Err(status) => return status,
    };
    match analyze_files(&opts) {
        Ok(report) => {
            let json = match serde_json_string(&report) {
                Ok(j) => j,
                Err(status) => return status,
            };
            let handle = Box::new(UnassumeReport {
                json,
                property_verified: report.property == "verified",
                witness_validated: report.witness_verdict == "validated",
            });
            *out = Box::into_raw(handle);
            UnassumeStatus::Ok
        }
        Err(e) => {
            set_error(&e.to_string());
            match e {
                AnalyzeError::Io(_) => UnassumeStatus::IoError,
                AnalyzeError::Parse(_) => UnassumeStatus::ParseError,
                AnalyzeError::Config(_) => UnassumeStatus::ConfigError,
            }
        }
    }
}

fn serde_json_string(report: &unassume::validator::Report) -> Result<CString, UnassumeStatus> {
    let json = serde_json::to_string_pretty(report).map_err(|e| {
        set_error(&format!("report serialization failed: {e}"));
        UnassumeStatus::ConfigError
    })?;
    CString::new(json).map_err(|_| {
        set_error("report contained an interior NUL");
        UnassumeStatus::ConfigError
    })
}

/// The report as a JSON document; valid until the handle is freed.
///
/// # Safety
/// `report` must be a live handle from `unassume_analyze`.
#[no_mangle]
pub unsafe extern "C" fn unassume_report_json(report: *const UnassumeReport) -> *const c_char {
    if report.is_null() {
        return std::ptr::null();
    }
    (*report).json.as_ptr()
}

/// 1 if the safety property was verified, 0 otherwise.
///
/// # Safety
/// `report` must be a live handle from `unassume_analyze`.
#[no_mangle]
pub unsafe extern "C" fn unassume_report_property_verified(report: *const UnassumeReport) -> i32 {
    if report.is_null() {
        return 0;
    }
    (*report).property_verified as i32
}

/// 1 if the witness was validated, 0 otherwise.
///
/// # Safety
/// `report` must be a live handle from `unassume_analyze`.
#[no_mangle]
pub unsafe extern "C" fn unassume_report_witness_validated(report: *const UnassumeReport) -> i32 {
    if report.is_null() {
        return 0;
    }
    (*report).witness_validated as i32
}

/// Free a report handle. NULL is ignored.
///
/// # Safety
/// `report` must be NULL or a handle from `unassume_analyze`, freed at
/// most once.
#[no_mangle]
pub unsafe extern "C" fn unassume_report_free(report: *mut UnassumeReport) {
    if !report.is_null() {
        drop(Box::from_raw(report));
    }
}
