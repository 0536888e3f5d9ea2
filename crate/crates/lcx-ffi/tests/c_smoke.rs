//! Compiles and runs a small C program against the generated header and the
//! static library, proving the ABI is usable from plain C.

use std::path::PathBuf;
use std::process::Command;

const C_PROGRAM: &str = r#"
#include <stdio.h>
#include <stdlib.h>
#include "lcx.h"

int main(void) {
    LcxGrid *grid = NULL;
    if (lcx_grid_new_1d(-2.0, 2.0, 41, 2, &grid) != LCX_STATUS_OK) return 1;

    LcxFunction *f = NULL;
    if (lcx_gallery_sample("abs_1d", grid, &f) != LCX_STATUS_OK) return 2;

    double modulus = 0.0;
    if (lcx_lipschitz_modulus(f, &modulus) != LCX_STATUS_OK) return 3;
    if (modulus < 0.999999 || modulus > 1.000001) return 4;

    LcxFunction *env = NULL;
    if (lcx_upper_envelope(f, 1.0, &env) != LCX_STATUS_OK) return 5;
    double fv[41], ev[41];
    if (lcx_function_values(f, fv, 41) != LCX_STATUS_OK) return 6;
    if (lcx_function_values(env, ev, 41) != LCX_STATUS_OK) return 7;
    for (int i = 0; i < 41; i++) {
        double d = fv[i] - ev[i];
        if (d < -1e-12 || d > 1e-12) return 8;
    }

    /* error path: invalid norm must report usage + a message */
    LcxGrid *bad = NULL;
    if (lcx_grid_new_1d(0.0, 1.0, 5, 9, &bad) != LCX_STATUS_USAGE) return 9;
    if (lcx_last_error_message() == NULL) return 10;

    lcx_function_free(env);
    lcx_function_free(f);
    lcx_grid_free(grid);
    printf("c smoke ok: modulus=%f\n", modulus);
    return 0;
}
"#;

fn target_debug_dir() -> PathBuf {
    if let Ok(dir) = std::env::var("CARGO_TARGET_DIR") {
        return PathBuf::from(dir).join("debug");
    }
    PathBuf::from(env!("CARGO_MANIFEST_DIR")).join("../../target/debug")
}

#[test]
fn c_program_links_and_runs() {
    let manifest = PathBuf::from(env!("CARGO_MANIFEST_DIR"));
    let include_dir = manifest.join("include");
    let lib = target_debug_dir().join("liblcx_ffi.a");

    // `cargo test` does not refresh the staticlib artifact; build it here so
    // the link below always sees the current symbols.
    let cargo = std::env::var("CARGO").unwrap_or_else(|_| "cargo".into());
    let build = Command::new(cargo)
        .args(["build", "-p", "lcx-ffi"])
        .current_dir(&manifest)
        .output()
        .expect("cargo not runnable");
    assert!(
        build.status.success(),
        "staticlib build failed:\n{}",
        String::from_utf8_lossy(&build.stderr)
    );
    assert!(include_dir.join("lcx.h").exists(), "header not generated");
    assert!(lib.exists(), "static library not built at {}", lib.display());

    let work = std::env::temp_dir().join(format!("lcx_c_smoke_{}", std::process::id()));
    std::fs::create_dir_all(&work).unwrap();
    let c_path = work.join("smoke.c");
    let bin_path = work.join("smoke");
    std::fs::write(&c_path, C_PROGRAM).unwrap();

    let compile = Command::new("cc")
        .arg(&c_path)
        .arg("-I")
        .arg(&include_dir)
        .arg(lib)
        .args(["-lpthread", "-ldl", "-lm"])
        .arg("-o")
        .arg(&bin_path)
        .output()
        .expect("cc not available");
    assert!(
        compile.status.success(),
        "compile failed:\n{}",
        String::from_utf8_lossy(&compile.stderr)
    );

    let run = Command::new(&bin_path).output().unwrap();
    assert!(
        run.status.success(),
        "smoke binary exited {:?}: {}",
        run.status.code(),
        String::from_utf8_lossy(&run.stdout)
    );
    assert!(String::from_utf8_lossy(&run.stdout).contains("c smoke ok"));

    let _ = std::fs::remove_dir_all(&work);
}
