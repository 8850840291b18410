//! Compiles `tests/c/smoke.c` against the generated header and the static
//! library, then runs it. Skipped when no C compiler is on the path.

use std::path::{Path, PathBuf};
use std::process::Command;

fn static_lib() -> Option<PathBuf> {
    // tests/<name>-<hash> lives in target/<profile>/deps
    let exe = std::env::current_exe().ok()?;
    let profile_dir = exe.parent()?.parent()?;
    let lib = profile_dir.join("libtwisted_fourier_ffi.a");
    lib.exists().then_some(lib)
}

#[test]
fn c_program_links_against_the_header() {
    let manifest = Path::new(env!("CARGO_MANIFEST_DIR"));
    let header_dir = manifest.join("include");
    assert!(header_dir.join("twisted_fourier.h").exists(), "header not generated");
    let Some(lib) = static_lib() else {
        eprintln!("skipped: static library not found next to the test binary");
        return;
    };
    let out = std::env::temp_dir().join(format!("tf_smoke_{}", std::process::id()));
    let compiled = Command::new("cc")
        .arg("-std=c99")
        .arg("-Wall")
        .arg("-Werror")
        .arg("-I")
        .arg(&header_dir)
        .arg(manifest.join("tests/c/smoke.c"))
        .arg(&lib)
        .args(["-lm", "-lpthread", "-ldl", "-o"])
        .arg(&out)
        .status();
    match compiled {
        Err(_) => eprintln!("skipped: no C compiler"),
        Ok(status) => {
            assert!(status.success(), "C smoke program failed to compile");
            let run = Command::new(&out).output().expect("run smoke binary");
            let _ = std::fs::remove_file(&out);
            assert!(run.status.success(), "smoke exit {:?}: {}", run.status.code(), String::from_utf8_lossy(&run.stderr));
            assert_eq!(String::from_utf8_lossy(&run.stdout).trim(), "ok");
        }
    }
}
