//! Compiles a small C program against the generated header and the static
//! library, then runs it.

use std::path::PathBuf;
use std::process::Command;

const SOURCE: &str = r#"
#include <math.h>
#include <stdio.h>
#include "ncgeom.h"

int main(void) {
    NcgCovariance *cov = NULL;
    if (ncg_covariance_toy(0.6, 0.0, 0.0, 0.0, &cov) != NCG_STATUS_OK) return 10;
    if (ncg_covariance_dim(cov) != 8) return 11;
    double spec[4];
    size_t count = 0;
    if (ncg_symplectic_spectrum(cov, 0.0, 0.0, 0, spec, 4, &count) != NCG_STATUS_OK) return 12;
    ncg_covariance_free(cov);

    NcgStateClass cls;
    if (ncg_classify(0.0, 0.0, 0.0, 0.0, 1e-9, &cls) != NCG_STATUS_OK) return 13;
    if (cls != NCG_STATE_CLASS_SEPARABLE) return 14;

    double nu;
    if (ncg_nu_minus(2.0, 0.0, 0.0, 0.0, &nu) != NCG_STATUS_DOMAIN) return 15;
    char msg[128];
    if (ncg_last_error_message(msg, sizeof msg) == 0) return 16;

    NcgIntegrationOptions opts = ncg_integration_options_default();
    opts.backend = NCG_BACKEND_PAPER_CLOSED_FORM;
    opts.method = NCG_METHOD_GAUSS_LEGENDRE_POLAR;
    NcgEstimate est;
    if (ncg_integrate_region(NCG_REGION_POSITIVE_DISK, 0.0, 0.0, 4.0, &opts, &est) != NCG_STATUS_OK) return 17;
    if (fabs(est.value - 1.9526811) > 1e-6) return 18;
    printf("%s %.7f\n", ncg_version(), est.value);
    return 0;
}
"#;

fn target_dir() -> PathBuf {
    // tests run from <target>/<profile>/deps/
    let exe = std::env::current_exe().unwrap();
    exe.parent().unwrap().parent().unwrap().to_path_buf()
}

#[test]
fn c_program_links_and_runs() {
    let cc = std::env::var("CC").unwrap_or_else(|_| "cc".into());
    if Command::new(&cc).arg("--version").output().is_err() {
        eprintln!("skipping: no C compiler ({cc})");
        return;
    }
    let lib = target_dir().join("libncgeom_ffi.a");
    if !lib.exists() {
        eprintln!("skipping: {} not built", lib.display());
        return;
    }
    let include = PathBuf::from(env!("CARGO_MANIFEST_DIR")).join("include");
    let dir = tempfile::tempdir().unwrap();
    let src = dir.path().join("main.c");
    let bin = dir.path().join("main");
    std::fs::write(&src, SOURCE).unwrap();
    let status = Command::new(&cc)
        .arg("-std=c99")
        .arg("-Wall")
        .arg("-Werror")
        .arg("-I")
        .arg(&include)
        .arg(&src)
        .arg(&lib)
        .args(["-lpthread", "-ldl", "-lm", "-o"])
        .arg(&bin)
        .status()
        .unwrap();
    assert!(status.success(), "C compilation failed");
    let out = Command::new(&bin).output().unwrap();
    assert!(out.status.success(), "exit {:?}", out.status.code());
    let stdout = String::from_utf8(out.stdout).unwrap();
    assert!(stdout.ends_with("1.9526811\n"), "{stdout}");
}
