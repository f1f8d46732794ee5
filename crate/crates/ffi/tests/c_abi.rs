//! Exercises the exported functions through raw pointers, and compiles a
//! small C program against the generated header.

use std::ffi::{CStr, CString};
use std::path::{Path, PathBuf};
use std::process::Command;
use std::ptr;

use cdzero_ffi::*;

fn parse(level: u32, text: &str) -> Result<*mut CdzElement, CdzStatus> {
    let c = CString::new(text).unwrap();
    let mut out = ptr::null_mut();
    match unsafe { cdz_element_parse(level, c.as_ptr(), &mut out) } {
        CdzStatus::Ok => Ok(out),
        s => Err(s),
    }
}

fn text(e: *const CdzElement) -> String {
    let mut s = ptr::null_mut();
    assert_eq!(unsafe { cdz_element_to_string(e, &mut s) }, CdzStatus::Ok);
    let t = unsafe { CStr::from_ptr(s) }.to_str().unwrap().to_string();
    unsafe { cdz_string_free(s) };
    t
}

fn last_error() -> String {
    unsafe { CStr::from_ptr(cdz_last_error_message()) }.to_str().unwrap().to_string()
}

#[test]
fn worked_example_through_the_abi() {
    let a = parse(4, "e1 + e10").unwrap();
    let x = parse(4, "-e4 + e15").unwrap();
    let mut p = ptr::null_mut();
    assert_eq!(unsafe { cdz_multiply(a, x, &mut p) }, CdzStatus::Ok);
    assert_eq!(text(p), "0");

    let mut dim = 0usize;
    assert_eq!(unsafe { cdz_annihilator_dim(a, &mut dim) }, CdzStatus::Ok);
    assert_eq!(dim, 4);

    let mut json = ptr::null_mut();
    assert_eq!(unsafe { cdz_spectrum_json(a, 1e-8, &mut json) }, CdzStatus::Ok);
    let v: serde_json::Value = serde_json::from_str(unsafe { CStr::from_ptr(json) }.to_str().unwrap()).unwrap();
    unsafe { cdz_string_free(json) };
    assert_eq!(v["schema_version"], 1);
    assert_eq!(v["contains_one"], true);
    let lambdas: Vec<f64> = serde_json::from_value(v["lambdas"].clone()).unwrap();
    assert_eq!(lambdas.len(), 3);
    assert!((lambdas[2] - 2.0).abs() < 1e-10);

    unsafe {
        cdz_element_free(a);
        cdz_element_free(x);
        cdz_element_free(p);
    }
}

#[test]
fn unary_operations() {
    let a = parse(4, "2 + e1 + e10").unwrap();
    let run = |f: unsafe extern "C" fn(*const CdzElement, *mut *mut CdzElement) -> CdzStatus| {
        let mut out = ptr::null_mut();
        assert_eq!(unsafe { f(a, &mut out) }, CdzStatus::Ok);
        let t = text(out);
        unsafe { cdz_element_free(out) };
        t
    };
    assert_eq!(run(cdz_conjugate), parse_text(4, "2 - e1 - e10"));
    assert_eq!(run(cdz_hat), parse_text(4, "e2 + 2 e8 + e9"));
    assert_eq!(run(cdz_tilde), parse_text(4, "-e2 + e9 + 2 e8"));
    unsafe { cdz_element_free(a) };
}

fn parse_text(level: u32, s: &str) -> String {
    let e = parse(level, s).unwrap();
    let t = text(e);
    unsafe { cdz_element_free(e) };
    t
}

#[test]
fn errors_carry_status_and_message() {
    assert_eq!(parse(3, "e1 +").unwrap_err(), CdzStatus::Parse);
    assert!(last_error().contains("parse"));
    assert_eq!(parse(3, "e8").unwrap_err(), CdzStatus::Level);

    let a = parse(3, "e1").unwrap();
    let b = parse(4, "e1").unwrap();
    let mut out = ptr::null_mut();
    assert_eq!(unsafe { cdz_multiply(a, b, &mut out) }, CdzStatus::Level);
    assert!(out.is_null());

    let c = parse(3, "1 + e1").unwrap();
    let mut json = ptr::null_mut();
    assert_eq!(unsafe { cdz_spectrum_json(c, 1e-8, &mut json) }, CdzStatus::Precondition);
    assert!(last_error().contains("doubly pure"));

    assert_eq!(unsafe { cdz_multiply(ptr::null(), b, &mut out) }, CdzStatus::NullPointer);
    assert_eq!(unsafe { cdz_tilde(a, ptr::null_mut()) }, CdzStatus::NullPointer);
    let bad = [0xffu8, 0];
    let mut e = ptr::null_mut();
    assert_eq!(unsafe { cdz_element_parse(3, bad.as_ptr().cast(), &mut e) }, CdzStatus::InvalidUtf8);
    unsafe {
        cdz_element_free(a);
        cdz_element_free(b);
        cdz_element_free(c);
        cdz_element_free(ptr::null_mut());
        cdz_string_free(ptr::null_mut());
    }
    assert_eq!(unsafe { cdz_element_level(ptr::null()) }, 0);
}

fn manifest_dir() -> PathBuf {
    PathBuf::from(env!("CARGO_MANIFEST_DIR"))
}

/// The static library sits in the profile directory, one level above the
/// test executable's `deps/`.
fn static_lib() -> Option<PathBuf> {
    let exe = std::env::current_exe().ok()?;
    let lib = exe.parent()?.parent()?.join("libcdzero_ffi.a");
    lib.exists().then_some(lib)
}

fn have(tool: &str) -> bool {
    Command::new(tool).arg("--version").output().is_ok()
}

#[test]
fn header_compiles_as_c_and_cpp() {
    let header = manifest_dir().join("include/cdzero.h");
    assert!(header.exists());
    for (tool, lang) in [("cc", "c"), ("c++", "c++")] {
        if !have(tool) {
            eprintln!("skipping {lang} header check: {tool} not found");
            continue;
        }
        let status =
            Command::new(tool).args(["-fsyntax-only", "-Wall", "-Werror", "-x", lang]).arg(&header).status().unwrap();
        assert!(status.success(), "{lang} compile of header failed");
    }
}

const C_PROGRAM: &str = r#"
#include <stdio.h>
#include <string.h>
#include "cdzero.h"

int main(void) {
    CdzElement *a = NULL, *x = NULL, *p = NULL;
    if (cdz_element_parse(4, "e1 + e10", &a) != CDZ_STATUS_OK) return 10;
    if (cdz_element_parse(4, "-e4 + e15", &x) != CDZ_STATUS_OK) return 11;
    if (cdz_multiply(a, x, &p) != CDZ_STATUS_OK) return 12;
    char *s = NULL;
    if (cdz_element_to_string(p, &s) != CDZ_STATUS_OK) return 13;
    int zero = strcmp(s, "0") == 0;
    cdz_string_free(s);
    size_t dim = 0;
    if (cdz_annihilator_dim(a, &dim) != CDZ_STATUS_OK) return 14;
    CdzElement *bad = NULL;
    if (cdz_element_parse(3, "e9", &bad) != CDZ_STATUS_LEVEL) return 15;
    printf("%d %zu %s\n", zero, dim, cdz_last_error_message());
    cdz_element_free(a);
    cdz_element_free(x);
    cdz_element_free(p);
    return 0;
}
"#;

fn link_and_run(lib: &Path) {
    let dir = std::env::temp_dir().join(format!("cdzero-ffi-{}", std::process::id()));
    std::fs::create_dir_all(&dir).unwrap();
    let src = dir.join("smoke.c");
    let exe = dir.join("smoke");
    std::fs::write(&src, C_PROGRAM).unwrap();
    let status = Command::new("cc")
        .arg(&src)
        .arg("-I")
        .arg(manifest_dir().join("include"))
        .arg(lib)
        .args(["-lpthread", "-ldl", "-lm", "-o"])
        .arg(&exe)
        .status()
        .unwrap();
    assert!(status.success(), "linking the C smoke test failed");
    let out = Command::new(&exe).output().unwrap();
    assert!(out.status.success(), "smoke test exited with {:?}", out.status.code());
    let stdout = String::from_utf8_lossy(&out.stdout);
    assert!(stdout.starts_with("1 4 "), "{stdout}");
    assert!(stdout.contains("e9"), "{stdout}");
    std::fs::remove_dir_all(&dir).unwrap();
}

#[test]
fn c_program_links_against_the_static_library() {
    match (have("cc"), static_lib()) {
        (true, Some(lib)) => link_and_run(&lib),
        (false, _) => eprintln!("skipping: cc not found"),
        (_, None) => eprintln!("skipping: static library not built alongside tests"),
    }
}
