//! Compiles and runs a small C program against the generated header and
//! the static library. Skipped when no C compiler is on the PATH.

use std::path::PathBuf;
use std::process::Command;

const PROGRAM: &str = r#"
#include <stdio.h>
#include "defectchain.h"

int main(void) {
    DcCategory *cat = NULL;
    DcOperator *op = NULL;
    DcSpectrum *spec = NULL;
    size_t n = 0, deg = 0;
    double e0;
    if (dc_category_derive(1, &cat) != DC_STATUS_OK) return 1;
    if (dc_defect_chain_new(cat, 7, DC_BOUNDARY_FIXED_STAR, &op) != DC_STATUS_OK) return 2;
    if (dc_diagonalize_dense(op, &spec) != DC_STATUS_OK) return 3;
    if (dc_spectrum_len(spec, &n) != DC_STATUS_OK || n != 8) return 4;
    if (dc_spectrum_copy(spec, &e0, 1) != DC_STATUS_INVALID_ARGUMENT) return 5;
    if (dc_last_error_message() == NULL) return 6;
    if (dc_spectrum_ground_degeneracy(spec, &deg) != DC_STATUS_OK || deg != 1) return 7;
    if (dc_category_vec_zp(6, NULL) != DC_STATUS_NULL_POINTER) return 8;
    printf("ok %zu\n", n);
    dc_spectrum_free(spec);
    dc_operator_free(op);
    dc_category_free(cat);
    return 0;
}
"#;

fn compiler() -> Option<String> {
    ["cc", "gcc", "clang"]
        .into_iter()
        .find(|c| Command::new(c).arg("--version").output().is_ok_and(|o| o.status.success()))
        .map(String::from)
}

#[test]
fn c_program_links_and_runs() {
    let Some(cc) = compiler() else {
        eprintln!("no C compiler found; skipping");
        return;
    };
    let include = PathBuf::from(env!("CARGO_MANIFEST_DIR")).join("include");
    // target/<profile>/deps/<test binary> -> target/<profile>
    let exe = std::env::current_exe().unwrap();
    let profile_dir = exe.parent().unwrap().parent().unwrap();
    // test builds only produce the rlib, so build the static library here
    let mut build = Command::new(env!("CARGO"));
    build.args(["build", "-p", "defectchain-ffi", "--lib"]);
    if profile_dir.file_name().is_some_and(|n| n == "release") {
        build.arg("--release");
    }
    assert!(build.status().unwrap().success(), "building the static library failed");
    let lib = profile_dir.join("libdefectchain_ffi.a");
    let dir = tempfile::tempdir().unwrap();
    let src = dir.path().join("main.c");
    let bin = dir.path().join("main");
    std::fs::write(&src, PROGRAM).unwrap();
    let status = Command::new(&cc)
        .args(["-std=c99", "-Wall", "-Werror", "-I"])
        .arg(&include)
        .arg(&src)
        .arg(&lib)
        .args(["-lpthread", "-ldl", "-lm", "-o"])
        .arg(&bin)
        .status()
        .unwrap();
    assert!(status.success(), "C compilation failed");
    let out = Command::new(&bin).output().unwrap();
    assert!(out.status.success(), "C program exited with {:?}", out.status.code());
    assert_eq!(String::from_utf8_lossy(&out.stdout).trim(), "ok 8");
}
