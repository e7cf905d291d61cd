use std::ffi::{CStr, CString};
use std::path::{Path, PathBuf};
use std::process::Command;
use std::ptr;

use descente_ffi::*;

fn data(file: &str) -> CString {
    let p = Path::new(env!("CARGO_MANIFEST_DIR"))
        .join("../core/data")
        .join(format!("{file}.json"));
    CString::new(p.to_str().unwrap()).unwrap()
}

fn load(file: &str) -> *mut DescenteWorkspace {
    let path = data(file);
    let paths = [path.as_ptr()];
    let mut ws = ptr::null_mut();
    let status = unsafe { descente_workspace_load(paths.as_ptr(), 1, &mut ws) };
    assert_eq!(status, DescenteStatus::Ok);
    assert!(!ws.is_null());
    ws
}

fn last_error() -> String {
    let p = descente_last_error();
    assert!(!p.is_null());
    unsafe { CStr::from_ptr(p) }.to_string_lossy().into_owned()
}

#[test]
fn load_count_and_free() {
    let ws = load("site-pt");
    let (mut s, mut p, mut m) = (0usize, 0usize, 0usize);
    assert_eq!(
        unsafe { descente_workspace_counts(ws, &mut s, &mut p, &mut m) },
        DescenteStatus::Ok
    );
    assert_eq!((s, p, m), (1, 15, 15));
    unsafe { descente_workspace_free(ws) };
    unsafe { descente_workspace_free(ptr::null_mut()) };
}

#[test]
fn checks_return_reports_and_status() {
    let ws = load("site-2");
    let mut report = ptr::null_mut();
    let (stack, one) = (CString::new("stack").unwrap(), CString::new("ONE").unwrap());
    let status = unsafe { descente_check(ws, stack.as_ptr(), one.as_ptr(), &mut report) };
    assert_eq!(status, DescenteStatus::Ok);
    let json: serde_json::Value = serde_json::from_str(unsafe { CStr::from_ptr(report) }.to_str().unwrap()).unwrap();
    assert_eq!(json["verdict"], "positive");
    unsafe { descente_string_free(report) };

    let (prestack, pair) = (CString::new("prestack").unwrap(), CString::new("PSH-PAIR").unwrap());
    let status = unsafe { descente_check(ws, prestack.as_ptr(), pair.as_ptr(), ptr::null_mut()) };
    assert_eq!(status, DescenteStatus::Negative);

    let (lf, bd) = (
        CString::new("local-fib").unwrap(),
        CString::new("boundary(PSH-PAIR)").unwrap(),
    );
    let mut report = ptr::null_mut();
    let status = unsafe { descente_check(ws, lf.as_ptr(), bd.as_ptr(), &mut report) };
    assert_eq!(status, DescenteStatus::Negative);
    let json: serde_json::Value = serde_json::from_str(unsafe { CStr::from_ptr(report) }.to_str().unwrap()).unwrap();
    assert!(json["witness"].is_object());
    unsafe { descente_string_free(report) };

    let nope = CString::new("NOPE").unwrap();
    let status = unsafe { descente_check(ws, stack.as_ptr(), nope.as_ptr(), ptr::null_mut()) };
    assert_eq!(status, DescenteStatus::Usage);
    assert!(last_error().contains("NOPE"));
    let bad = CString::new("sheaf").unwrap();
    let status = unsafe { descente_check(ws, bad.as_ptr(), one.as_ptr(), ptr::null_mut()) };
    assert_eq!(status, DescenteStatus::Usage);
    unsafe { descente_workspace_free(ws) };
}

#[test]
fn null_and_malformed_arguments() {
    let mut ws = ptr::null_mut();
    assert_eq!(
        unsafe { descente_workspace_from_json(ptr::null(), &mut ws) },
        DescenteStatus::InvalidArgument
    );
    let broken = CString::new("{ \"site\": ").unwrap();
    assert_eq!(
        unsafe { descente_workspace_from_json(broken.as_ptr(), &mut ws) },
        DescenteStatus::Usage
    );
    assert!(last_error().contains("<memory>:1:"));
    assert!(ws.is_null());
    let s = CString::new("stack").unwrap();
    assert_eq!(
        unsafe { descente_check(ptr::null(), s.as_ptr(), s.as_ptr(), ptr::null_mut()) },
        DescenteStatus::InvalidArgument
    );
}

#[test]
fn in_memory_document_loads() {
    let text = std::fs::read_to_string(data("site-pt").to_str().unwrap()).unwrap();
    let text = CString::new(text).unwrap();
    let mut ws = ptr::null_mut();
    assert_eq!(
        unsafe { descente_workspace_from_json(text.as_ptr(), &mut ws) },
        DescenteStatus::Ok
    );
    unsafe { descente_workspace_free(ws) };
}

#[test]
fn run_matches_the_command_line() {
    let path = data("site-2");
    let args: Vec<CString> = ["--workspace", path.to_str().unwrap(), "check", "prestack", "PSH-PAIR"]
        .iter()
        .map(|s| CString::new(*s).unwrap())
        .collect();
    let argv: Vec<*const std::ffi::c_char> = args.iter().map(|a| a.as_ptr()).collect();
    let mut out = ptr::null_mut();
    let code = unsafe { descente_run(argv.as_ptr(), argv.len(), &mut out) };
    assert_eq!(code, 1);
    let text = unsafe { CStr::from_ptr(out) }.to_string_lossy().into_owned();
    assert!(text.starts_with("check prestack: negative"), "{text}");
    unsafe { descente_string_free(out) };
    let bogus = CString::new("frobnicate").unwrap();
    assert_eq!(
        unsafe { descente_run([bogus.as_ptr()].as_ptr(), 1, ptr::null_mut()) },
        2
    );
}

#[test]
fn version_is_the_crate_version() {
    let v = unsafe { CStr::from_ptr(descente_version()) };
    assert_eq!(v.to_str().unwrap(), env!("CARGO_PKG_VERSION"));
}

fn header() -> PathBuf {
    Path::new(env!("CARGO_MANIFEST_DIR")).join("include/descente.h")
}

#[test]
fn header_declares_the_interface() {
    let h = std::fs::read_to_string(header()).unwrap();
    for sym in [
        "typedef struct DescenteWorkspace DescenteWorkspace;",
        "DESCENTE_STATUS_BOUND_EXCEEDED = 3",
        "descente_workspace_load(",
        "descente_workspace_from_json(",
        "descente_workspace_free(",
        "descente_workspace_counts(",
        "descente_check(",
        "descente_run(",
        "descente_string_free(",
        "descente_last_error(",
        "descente_version(",
    ] {
        assert!(h.contains(sym), "missing {sym}");
    }
}

#[test]
fn header_compiles_as_c_and_cpp() {
    let Some(cc) = ["cc", "clang", "gcc"]
        .into_iter()
        .find(|c| Command::new(c).arg("--version").output().is_ok())
    else {
        eprintln!("no C compiler found; header compile check not run");
        return;
    };
    for lang in ["c", "c++"] {
        let out = Command::new(cc)
            .args(["-fsyntax-only", "-Wall", "-Werror", "-x", lang])
            .arg(header())
            .output()
            .unwrap();
        assert!(out.status.success(), "{lang}: {}", String::from_utf8_lossy(&out.stderr));
    }
}
