//! C interface to descente. Workspaces are opaque handles; every call
//! returns a [`DescenteStatus`] and reports through out-parameters. Strings
//! handed out by the library are freed with [`descente_string_free`]. The
//! message of the last failing call on the current thread is available from
//! [`descente_last_error`].

use std::cell::RefCell;
use std::ffi::{c_char, c_int, CStr, CString};
use std::panic::{catch_unwind, AssertUnwindSafe};
use std::ptr;

use descente::cli::commands;
use descente::cli::{error_exit_code, Check, Report, Verdict, Workspace};
use descente::Error;

/// Outcome of a call. The first four values agree with the command line
/// exit codes.
#[repr(C)]
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum DescenteStatus {
    /// the call succeeded and, for judgments, the verdict is positive
    Ok = 0,
    /// the verdict is negative, or the input failed validation
    Negative = 1,
    /// malformed input, unknown entity or bad argument
    Usage = 2,
    /// the enumeration bound was exceeded
    BoundExceeded = 3,
    /// a null pointer or invalid UTF-8 was passed
    InvalidArgument = 4,
    /// the library panicked; the handle involved should be freed
    Internal = 5,
}

/// A loaded, validated workspace.
pub struct DescenteWorkspace {
    inner: Workspace,
}

thread_local! {
    static LAST_ERROR: RefCell<Option<CString>> = const { RefCell::new(None) };
}

fn set_error(msg: impl Into<String>) {
    let msg = msg.into().replace('\0', " ");
    LAST_ERROR.with(|e| *e.borrow_mut() = CString::new(msg).ok());
}

fn clear_error() {
    LAST_ERROR.with(|e| *e.borrow_mut() = None);
}

fn status_of(e: &Error) -> DescenteStatus {
    match error_exit_code(e) {
        1 => DescenteStatus::Negative,
        3 => DescenteStatus::BoundExceeded,
        _ => DescenteStatus::Usage,
    }
}

fn guarded<F: FnOnce() -> DescenteStatus>(f: F) -> DescenteStatus {
    clear_error();
    match catch_unwind(AssertUnwindSafe(f)) {
        Ok(s) => s,
        Err(_) => {
            set_error("internal error");
            DescenteStatus::Internal
        }
    }
}

unsafe fn str_arg<'a>(p: *const c_char, what: &str) -> Result<&'a str, DescenteStatus> {
    if p.is_null() {
        set_error(format!("{what} is null"));
        return Err(DescenteStatus::InvalidArgument);
    }
    CStr::from_ptr(p).to_str().map_err(|_| {
        set_error(format!("{what} is not UTF-8"));
        DescenteStatus::InvalidArgument
    })
}

fn into_c_string(s: String) -> *mut c_char {
    CString::new(s.replace('\0', " "))
        .expect("nul bytes removed")
        .into_raw()
}

/// Loads and validates workspace files.
///
/// # Safety
/// `paths` points to `count` valid NUL-terminated strings; `out` is a valid
/// pointer. On success `*out` receives a handle to free with
/// [`descente_workspace_free`].
#[no_mangle]
pub unsafe extern "C" fn descente_workspace_load(
    paths: *const *const c_char,
    count: usize,
    out: *mut *mut DescenteWorkspace,
) -> DescenteStatus {
    guarded(|| {
        if out.is_null() || (paths.is_null() && count > 0) {
            set_error("null argument");
            return DescenteStatus::InvalidArgument;
        }
        let mut files = Vec::with_capacity(count);
        for i in 0..count {
            match str_arg(*paths.add(i), "path") {
                Ok(s) => files.push(s.to_string()),
                Err(s) => return s,
            }
        }
        match Workspace::load(&files) {
            Ok(ws) => {
                *out = Box::into_raw(Box::new(DescenteWorkspace { inner: ws }));
                DescenteStatus::Ok
            }
            Err(e) => {
                set_error(e.to_string());
                status_of(&e)
            }
        }
    })
}

/// Parses and validates one workspace document held in memory.
///
/// # Safety
/// `text` is a NUL-terminated string and `out` a valid pointer.
#[no_mangle]
pub unsafe extern "C" fn descente_workspace_from_json(
    text: *const c_char,
    out: *mut *mut DescenteWorkspace,
) -> DescenteStatus {
    guarded(|| {
        if out.is_null() {
            set_error("out is null");
            return DescenteStatus::InvalidArgument;
        }
        let text = match str_arg(text, "text") {
            Ok(t) => t,
            Err(s) => return s,
        };
        let mut ws = Workspace::default();
        match ws.add_text(text, "<memory>") {
            Ok(()) => {
                *out = Box::into_raw(Box::new(DescenteWorkspace { inner: ws }));
                DescenteStatus::Ok
            }
            Err(e) => {
                set_error(e.to_string());
                status_of(&e)
            }
        }
    })
}

/// Frees a workspace. Null is ignored.
///
/// # Safety
/// `ws` was returned by this library and is not used afterwards.
#[no_mangle]
pub unsafe extern "C" fn descente_workspace_free(ws: *mut DescenteWorkspace) {
    if !ws.is_null() {
        drop(Box::from_raw(ws));
    }
}

/// Number of sites, pseudofunctors and maps in a workspace.
///
/// # Safety
/// `ws` is a live handle; each out pointer is valid or null.
#[no_mangle]
pub unsafe extern "C" fn descente_workspace_counts(
    ws: *const DescenteWorkspace,
    sites: *mut usize,
    pseudofunctors: *mut usize,
    maps: *mut usize,
) -> DescenteStatus {
    guarded(|| {
        let Some(ws) = ws.as_ref() else {
            set_error("workspace is null");
            return DescenteStatus::InvalidArgument;
        };
        for (p, n) in [
            (sites, ws.inner.sites.len()),
            (pseudofunctors, ws.inner.pseudofunctors.len()),
            (maps, ws.inner.maps.len()),
        ] {
            if !p.is_null() {
                *p = n;
            }
        }
        DescenteStatus::Ok
    })
}

/// Decides a judgment on a named entity. `judgment` is one of `prestack`,
/// `stack`, `fibrant` (on a pseudofunctor) or `local-fib`, `lwe` (on a map).
/// The JSON report is stored in `*report` when `report` is not null, also
/// for negative verdicts.
///
/// # Safety
/// `ws` is a live handle, `judgment` and `name` are NUL-terminated strings and
/// `report` is valid or null.
#[no_mangle]
pub unsafe extern "C" fn descente_check(
    ws: *const DescenteWorkspace,
    judgment: *const c_char,
    name: *const c_char,
    report: *mut *mut c_char,
) -> DescenteStatus {
    guarded(|| {
        let Some(ws) = ws.as_ref() else {
            set_error("workspace is null");
            return DescenteStatus::InvalidArgument;
        };
        let (judgment, name) = match (str_arg(judgment, "judgment"), str_arg(name, "name")) {
            (Ok(j), Ok(n)) => (j, n.to_string()),
            (Err(s), _) | (_, Err(s)) => return s,
        };
        let what = match judgment {
            "prestack" => Check::Prestack { pseudofunctor: name },
            "stack" => Check::Stack { pseudofunctor: name },
            "fibrant" => Check::Fibrant { pseudofunctor: name },
            "local-fib" => Check::LocalFib { map: name },
            "lwe" => Check::Lwe { map: name },
            other => {
                set_error(format!("unknown judgment `{other}`"));
                return DescenteStatus::Usage;
            }
        };
        match commands::check(&ws.inner, &what) {
            Ok(r) => deliver(r, report),
            Err(e) => {
                set_error(e.to_string());
                status_of(&e)
            }
        }
    })
}

unsafe fn deliver(r: Report, out: *mut *mut c_char) -> DescenteStatus {
    if !out.is_null() {
        *out = into_c_string(r.to_json());
    }
    match r.verdict {
        Verdict::Positive => DescenteStatus::Ok,
        Verdict::Negative => DescenteStatus::Negative,
    }
}

/// Runs a command line in process. `argv` excludes the program name. The
/// printed output (stdout, then stderr) is stored in `*output` when `output`
/// is not null. Returns the exit code.
///
/// # Safety
/// `argv` points to `argc` NUL-terminated strings; `output` is valid or null.
#[no_mangle]
pub unsafe extern "C" fn descente_run(argv: *const *const c_char, argc: usize, output: *mut *mut c_char) -> c_int {
    clear_error();
    let result = catch_unwind(AssertUnwindSafe(|| {
        if argv.is_null() && argc > 0 {
            set_error("argv is null");
            return DescenteStatus::InvalidArgument as c_int;
        }
        let mut args = vec!["descente".to_string()];
        for i in 0..argc {
            match str_arg(*argv.add(i), "argument") {
                Ok(s) => args.push(s.to_string()),
                Err(s) => return s as c_int,
            }
        }
        let (mut out, mut err) = (Vec::new(), Vec::new());
        let code = descente::cli::run(args, &mut out, &mut err);
        out.extend_from_slice(&err);
        if !output.is_null() {
            *output = into_c_string(String::from_utf8_lossy(&out).into_owned());
        }
        code
    }));
    result.unwrap_or_else(|_| {
        set_error("internal error");
        DescenteStatus::Internal as c_int
    })
}

/// Frees a string returned by this library. Null is ignored.
///
/// # Safety
/// `s` was returned by this library and is not used afterwards.
#[no_mangle]
pub unsafe extern "C" fn descente_string_free(s: *mut c_char) {
    if !s.is_null() {
        drop(CString::from_raw(s));
    }
}

/// Message of the last failing call on this thread, or null. Valid until the
/// next call into the library on the same thread.
#[no_mangle]
pub extern "C" fn descente_last_error() -> *const c_char {
    LAST_ERROR.with(|e| e.borrow().as_ref().map_or(ptr::null(), |s| s.as_ptr()))
}

/// Library version as a static NUL-terminated string.
#[no_mangle]
pub extern "C" fn descente_version() -> *const c_char {
    concat!(env!("CARGO_PKG_VERSION"), "\0").as_ptr().cast()
}
