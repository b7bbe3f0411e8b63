//! Compiles and runs a real C program against the generated header and the
//! cdylib, proving the published ABI actually links.

use std::path::PathBuf;
use std::process::Command;

const C_PROGRAM: &str = r#"
#include <math.h>
#include <stdio.h>
#include <string.h>
#include "perron.h"

int main(void) {
  double entries[27];
  memset(entries, 0, sizeof entries);
  entries[(0 * 3 + 1) * 3 + 1] = 1.0;
  entries[(0 * 3 + 2) * 3 + 2] = 2.0;
  entries[(1 * 3 + 0) * 3 + 0] = 3.0;
  entries[(2 * 3 + 0) * 3 + 0] = 4.0;

  PerronTensor *tensor = NULL;
  if (perron_tensor_create(3, 3, entries, 27, &tensor) != PERRON_STATUS_OK) {
    fprintf(stderr, "create failed: %s\n", perron_last_error_message());
    return 1;
  }

  PerronHomotopyOptions opts = perron_homotopy_options_default();
  PerronReport *report = NULL;
  if (perron_solve_homotopy(tensor, &opts, &report) != PERRON_STATUS_OK) {
    fprintf(stderr, "solve failed: %s\n", perron_last_error_message());
    return 1;
  }
  if (perron_report_termination(report) != PERRON_TERMINATION_CONVERGED) {
    fprintf(stderr, "did not converge\n");
    return 1;
  }
  double lambda = perron_report_lambda(report);
  if (fabs(lambda - sqrt(11.0)) > 1e-9) {
    fprintf(stderr, "lambda %.15f != sqrt(11)\n", lambda);
    return 1;
  }
  double x[3];
  if (perron_report_eigenvector(report, x, 3) != PERRON_STATUS_OK) {
    fprintf(stderr, "eigenvector copy failed\n");
    return 1;
  }
  if (x[0] <= 0.0 || x[1] <= 0.0 || x[2] <= 0.0) {
    fprintf(stderr, "eigenvector not positive\n");
    return 1;
  }
  printf("lambda = %.12f\n", lambda);
  perron_report_free(report);
  perron_tensor_free(tensor);
  return 0;
}
"#;

fn target_debug_dir() -> PathBuf {
    // test binaries live in target/<profile>/deps
    let exe = std::env::current_exe().unwrap();
    exe.parent().unwrap().parent().unwrap().to_path_buf()
}

#[test]
fn c_program_links_and_runs() {
    let cc = ["cc", "gcc", "clang"]
        .iter()
        .find(|c| Command::new(c).arg("--version").output().is_ok())
        .expect("a C compiler is required for the ABI smoke test");

    let target_dir = target_debug_dir();
    let lib = target_dir.join("libperron_ffi.so");
    assert!(
        lib.exists(),
        "cdylib not found at {}; build perron-ffi first",
        lib.display()
    );

    let include_dir = PathBuf::from(env!("CARGO_MANIFEST_DIR")).join("include");
    let work = std::env::temp_dir().join(format!("perron-c-smoke-{}", std::process::id()));
    std::fs::create_dir_all(&work).unwrap();
    let src = work.join("smoke.c");
    let bin = work.join("smoke");
    std::fs::write(&src, C_PROGRAM).unwrap();

    let compile = Command::new(cc)
        .arg(&src)
        .arg("-I")
        .arg(&include_dir)
        .arg("-L")
        .arg(&target_dir)
        .arg("-lperron_ffi")
        .arg("-lm")
        .arg(format!("-Wl,-rpath,{}", target_dir.display()))
        .arg("-o")
        .arg(&bin)
        .output()
        .expect("compiler should run");
    assert!(
        compile.status.success(),
        "compile failed:\n{}",
        String::from_utf8_lossy(&compile.stderr)
    );

    let run = Command::new(&bin).output().expect("smoke binary should run");
    assert!(
        run.status.success(),
        "smoke binary failed:\nstdout: {}\nstderr: {}",
        String::from_utf8_lossy(&run.stdout),
        String::from_utf8_lossy(&run.stderr)
    );
    let stdout = String::from_utf8_lossy(&run.stdout);
    assert!(stdout.contains("lambda = 3.3166247903"), "{stdout}");
}
