use std::path::{Path, PathBuf};
use std::process::{Command, Output};

fn bin() -> Command {
    Command::new(env!("CARGO_BIN_EXE_twisted-fourier"))
}

fn shipped(name: &str) -> PathBuf {
    Path::new(env!("CARGO_MANIFEST_DIR")).join("configs").join(name)
}

fn write(dir: &Path, text: &str) -> PathBuf {
    let p = dir.join("cfg.toml");
    std::fs::write(&p, text).unwrap();
    p
}

fn run(args: &[&std::ffi::OsStr]) -> Output {
    bin().args(args).output().unwrap()
}

#[test]
fn passing_run_exits_zero_and_writes_reports() {
    let dir = tempfile::tempdir().unwrap();
    let mut cfg = std::fs::read_to_string(shipped("fejer_z.toml")).unwrap();
    cfg.push_str("\n[output]\njson = \"out/report.json\"\ncsv = \"table.csv\"\n");
    std::fs::create_dir(dir.path().join("out")).unwrap();
    let p = write(dir.path(), &cfg);
    let out = run(&["run".as_ref(), p.as_os_str()]);
    assert_eq!(out.status.code(), Some(0), "{}", String::from_utf8_lossy(&out.stderr));
    let parsed = twisted_fourier::cli::config::ExperimentConfig::parse(&cfg).unwrap();
    let json = std::fs::read_to_string(dir.path().join(parsed.output.json.unwrap())).unwrap();
    let v: serde_json::Value = serde_json::from_str(&json).unwrap();
    assert_eq!(v["pass"], true);
    assert_eq!(v["experiment"], "fejer");
    let csv = std::fs::read_to_string(dir.path().join(parsed.output.csv.unwrap())).unwrap();
    assert!(csv.starts_with("label,l1_error,closed_form"));
}

#[test]
fn violated_invariant_exits_two() {
    let out = run(&["validate".as_ref(), shipped("validate_perturbed.toml").as_os_str()]);
    assert_eq!(out.status.code(), Some(2));
}

#[test]
fn configuration_errors_exit_one() {
    let dir = tempfile::tempdir().unwrap();
    for text in [
        "experiment = \"norms\"\n[system]\npreset = \"matrix-line\"\n",
        "experiment = \"warp-drive\"\nseed = 1\n",
        "experiment = \"norms\"\nseed = 1\nunknown_key = 3\n",
        "experiment = \"abel-poisson\"\nseed = 1\n[system]\npreset = \"psl\"\n",
        "experiment = \"norms\"\nseed = 1\n[system]\npreset = \"nope\"\n",
        "experiment = \"validate\"\nseed = 1\n[system]\nalgebra = [2, 1]\ngroup = { family = \"lattice\", dim = 1 }\naction = { kind = \"permutations\", generators = [[1, 0]] }\n",
    ] {
        let p = write(dir.path(), text);
        let out = run(&["run".as_ref(), p.as_os_str()]);
        assert_eq!(out.status.code(), Some(1), "{text}");
        assert!(!out.stderr.is_empty());
    }
    let out = run(&["run".as_ref(), dir.path().join("missing.toml").as_os_str()]);
    assert_eq!(out.status.code(), Some(1));
}

#[test]
fn seed_flag_supplies_and_overrides_the_seed() {
    let dir = tempfile::tempdir().unwrap();
    let p = write(dir.path(), "experiment = \"validate\"\n[system]\npreset = \"rotation-algebra\"\n[params]\nvalidation_cap = 200\n");
    let out = run(&["--seed".as_ref(), "7".as_ref(), "run".as_ref(), p.as_os_str()]);
    assert_eq!(out.status.code(), Some(0));
    let v: serde_json::Value = serde_json::from_slice(&out.stdout).unwrap();
    assert_eq!(v["seed"], 7);
    let again = run(&["run".as_ref(), p.as_os_str(), "--seed".as_ref(), "7".as_ref()]);
    assert_eq!(again.stdout, out.stdout);
}

#[test]
fn presets_are_listed_and_shown() {
    let out = run(&["presets".as_ref(), "list".as_ref()]);
    assert_eq!(out.status.code(), Some(0));
    let text = String::from_utf8(out.stdout).unwrap();
    for (name, _) in twisted_fourier::cli::config::PRESETS {
        assert!(text.contains(name));
    }
    let shown = run(&["presets".as_ref(), "show".as_ref(), "psl".as_ref()]);
    let body = String::from_utf8(shown.stdout).unwrap();
    let cfg = twisted_fourier::cli::config::ExperimentConfig::parse(&format!("experiment = \"validate\"\nseed = 1\n{body}"))
        .unwrap();
    assert_eq!(cfg.system().unwrap().group, twisted_fourier::Group::ModularGroup);
    assert_eq!(run(&["presets".as_ref(), "show".as_ref(), "nope".as_ref()]).status.code(), Some(1));
}
