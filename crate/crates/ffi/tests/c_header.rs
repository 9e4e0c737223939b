//! Compiles a C program against the generated header and static library.

use std::path::PathBuf;
use std::process::Command;

const PROGRAM: &str = r#"
#include <math.h>
#include <stdio.h>
#include "stochord.h"

int main(void) {
    StochordModel *m[4];
    double p[4][3] = {{4.03, 3, 2.005}, {4.17, 3, 2.095}, {4.8, 3, 2.5}, {3.4, 3, 1.6}};
    for (int i = 0; i < 4; i++)
        if (stochord_wg_exponential_new(p[i][0], p[i][1], p[i][2], &m[i]) != STOCHORD_STATUS_OK) return 1;
    StochordSystem *x, *y;
    const StochordModel *xs[2] = {m[0], m[1]}, *ys[2] = {m[2], m[3]};
    if (stochord_system_new(xs, 2, STOCHORD_STRUCTURE_SERIES, &x) != STOCHORD_STATUS_OK) return 2;
    if (stochord_system_new(ys, 2, STOCHORD_STRUCTURE_SERIES, &y) != STOCHORD_STATUS_OK) return 3;
    StochordVerdict v;
    if (stochord_certify(STOCHORD_ORDER_HR, y, x, NULL, &v) != STOCHORD_STATUS_OK || !v.holds) return 4;
    StochordModel *bad;
    if (stochord_gm_new(0, 1, 1, &bad) != STOCHORD_STATUS_INVALID_PARAMETER) return 5;
    printf("holds=%d margin=%g error=%s\n", v.holds, v.margin, stochord_last_error_message());
    for (int i = 0; i < 4; i++) stochord_model_free(m[i]);
    stochord_system_free(x);
    stochord_system_free(y);
    return 0;
}
"#;

#[test]
fn header_compiles_and_links() {
    let manifest = PathBuf::from(env!("CARGO_MANIFEST_DIR"));
    let header_dir = manifest.join("include");
    assert!(header_dir.join("stochord.h").exists());
    // target/<profile>/deps/<this test> -> target/<profile>
    let profile_dir = std::env::current_exe()
        .unwrap()
        .parent()
        .unwrap()
        .parent()
        .unwrap()
        .to_path_buf();
    let lib = profile_dir.join("libstochord_ffi.a");
    if Command::new("cc").arg("--version").output().is_err() {
        eprintln!("skipping: no C compiler");
        return;
    }
    // `cargo test` links the rlib only; build the staticlib explicitly.
    let mut build = Command::new(env!("CARGO"));
    build
        .args(["build", "-p", "stochord-ffi", "--lib"])
        .current_dir(&manifest);
    if profile_dir.file_name().is_some_and(|n| n == "release") {
        build.arg("--release");
    }
    assert!(build.status().unwrap().success());
    assert!(lib.exists(), "{} missing", lib.display());
    let dir = tempfile::tempdir().unwrap();
    let src = dir.path().join("main.c");
    let exe = dir.path().join("main");
    std::fs::write(&src, PROGRAM).unwrap();
    let status = Command::new("cc")
        .arg("-std=c99")
        .arg("-Wall")
        .arg("-Werror")
        .arg("-I")
        .arg(&header_dir)
        .arg(&src)
        .arg(&lib)
        .args(["-lpthread", "-ldl", "-lm", "-o"])
        .arg(&exe)
        .status()
        .unwrap();
    assert!(status.success());
    let out = Command::new(&exe).output().unwrap();
    assert!(out.status.success(), "exit {:?}", out.status.code());
    let text = String::from_utf8_lossy(&out.stdout);
    assert!(
        text.starts_with("holds=1") && text.contains("alpha"),
        "{text}"
    );
}
