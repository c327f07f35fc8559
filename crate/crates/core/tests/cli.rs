mod common;

use std::path::Path;
use std::process::Command;

use geologic::category::{validate_category, validate_topology, LoadedSite};
use geologic::cli::run;
use geologic::frame::FrameSpec;
use geologic::semantics::{is_model, Interpretation};
use geologic::syntax::parse_theory;
use proptest::prelude::*;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde_json::Value;

use common::{corpus_dir, frame_paths, site_paths, theory_paths, Gen};

fn argv(args: &[&str]) -> Vec<String> {
    std::iter::once("geologic").chain(args.iter().copied()).map(String::from).collect()
}

fn json(args: &[&str]) -> Value {
    let mut full = args.to_vec();
    full.extend(["--format", "json"]);
    let out = run(&argv(&full));
    assert_eq!(out.code, 0, "{args:?}: {}", out.stderr);
    serde_json::from_str(&out.stdout).unwrap()
}

fn path(p: &Path) -> String {
    p.to_string_lossy().into_owned()
}

#[test]
fn reports_carry_tool_version_and_config() {
    let f = path(&corpus_dir().join("theories/serial.thy"));
    let v = json(&["check", &f]);
    assert_eq!(v["tool"], "geologic");
    assert_eq!(v["version"], env!("CARGO_PKG_VERSION"));
    assert_eq!(v["config"]["command"]["subcommand"], "check");
    assert!(v["config"]["ceiling"].is_string());
}

#[test]
fn emitted_models_load_back() {
    for p in theory_paths() {
        let f = path(&p);
        let t = parse_theory(&std::fs::read_to_string(&p).unwrap()).unwrap();
        let v = json(&["models", &f, "--max-size", "2"]);
        let models = v["models"].as_array().unwrap();
        assert_eq!(v["count"].as_u64().unwrap() as usize, models.len());
        for m in models {
            let m: Interpretation = serde_json::from_value(m.clone()).unwrap();
            m.validate(&t.signature).unwrap();
            assert!(is_model(&m, &t), "{f}");
        }
    }
}

#[test]
fn emitted_string_sites_load_back() {
    for p in site_paths() {
        let f = path(&p);
        for bound in ["0", "1", "2"] {
            let v = json(&["string-site", &f, "--bound", bound]);
            let site = LoadedSite::from_json_str(&v.to_string()).unwrap();
            assert!(validate_category(&site.category).is_empty(), "{f}");
            assert!(validate_topology(&site.category, &site.topology).is_empty(), "{f}");
            assert_eq!(site.category.num_objects(), v["pi"]["objects"].as_object().unwrap().len());
        }
    }
}

#[test]
fn emitted_frames_load_back() {
    for p in frame_paths() {
        let f = path(&p);
        let fix = json(&["frame", &f, "--op", "nn-fixpoints"]);
        FrameSpec::from_json_str(&fix.to_string()).unwrap().build_boolean().unwrap();
        let cover = json(&["frame", &f, "--op", "barr-cover"]);
        for c in cover["components"].as_array().unwrap() {
            FrameSpec::from_json_str(&c.to_string()).unwrap().build_boolean().unwrap();
        }
        let out = run(&argv(&["stone", &f, "--format", "json"]));
        if out.code == 0 {
            let v: Value = serde_json::from_str(&out.stdout).unwrap();
            FrameSpec::from_json_str(&v["opens"].to_string()).unwrap().build_boolean().unwrap();
        }
    }
}

#[test]
fn sat_reads_an_emitted_model() {
    let f = path(&corpus_dir().join("theories/serial.thy"));
    let v = json(&["models", &f, "--max-size", "2"]);
    let dir = Path::new(env!("CARGO_TARGET_TMPDIR")).join("cli");
    std::fs::create_dir_all(&dir).unwrap();
    let model = dir.join("serial_model.json");
    std::fs::write(&model, v["models"][1].to_string()).unwrap();
    let out = json(&["sat", &f, "--sequent", "[x:X] top |- exists y:X. R(x, y)", "--model", &path(&model)]);
    assert_eq!(out["satisfied"], true);
}

#[test]
fn usage_errors_and_help() {
    assert_eq!(run(&argv(&[])).code, 1);
    assert_eq!(run(&argv(&["frobnicate"])).code, 1);
    assert_eq!(run(&argv(&["prove", "missing.thy", "--sequent", "[] |- top"])).code, 1);
    let help = run(&argv(&["--help"]));
    assert_eq!(help.code, 0);
    assert!(help.stdout.contains("Usage"));
    let f = path(&corpus_dir().join("theories/serial.thy"));
    let bad = run(&argv(&["prove", &f, "--sequent", "[x:X] |- Nope(x)"]));
    assert_eq!(bad.code, 1);
    assert!(bad.stderr.starts_with("error:"));
}

#[test]
fn ceiling_comes_from_the_environment() {
    let bin = env!("CARGO_BIN_EXE_geologic");
    let f = path(&corpus_dir().join("theories/serial.thy"));
    let capped = Command::new(bin).args(["models", &f, "--max-size", "3"]).env("GEOLOGIC_CEILING", "10").output().unwrap();
    assert_eq!(capped.status.code(), Some(1));
    let junk = Command::new(bin).args(["models", &f]).env("GEOLOGIC_CEILING", "lots").output().unwrap();
    assert_eq!(junk.status.code(), Some(1));
    let fine = Command::new(bin).args(["models", &f, "--max-size", "1"]).env_remove("GEOLOGIC_CEILING").output().unwrap();
    assert_eq!(fine.status.code(), Some(0));
}

#[test]
fn corpus_never_raises_an_alarm() {
    for p in theory_paths() {
        let f = path(&p);
        let t = parse_theory(&std::fs::read_to_string(&p).unwrap()).unwrap();
        for a in &t.axioms {
            let s = a.to_string();
            assert_ne!(run(&argv(&["complete", &f, "--sequent", &s, "--max-size", "2"])).code, 2, "{f}: {s}");
            assert_ne!(run(&argv(&["barr", &f, "--sequent", &s])).code, 2, "{f}: {s}");
        }
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(48))]

    #[test]
    fn repeated_runs_are_byte_identical(seed in any::<u64>(), classical in any::<bool>()) {
        let paths = theory_paths();
        let p = &paths[(seed % paths.len() as u64) as usize];
        let t = parse_theory(&std::fs::read_to_string(p).unwrap()).unwrap();
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let mut g = Gen::new(&t.signature, &mut rng, false);
        let ctx = g.context(2);
        let s = g.sequent(&ctx, 2).to_string();
        let f = path(p);
        let mut args = vec!["prove", f.as_str(), "--sequent", s.as_str(), "--node-limit", "3000", "--format", "json"];
        if classical {
            args.push("--classical");
        }
        let a = run(&argv(&args));
        let b = run(&argv(&args));
        prop_assert_eq!(a.code, 0, "{}", a.stderr);
        prop_assert_eq!(&a.stdout, &b.stdout);
        let complete = ["complete", f.as_str(), "--sequent", s.as_str(), "--max-size", "2", "--node-limit", "3000", "--format", "json"];
        prop_assert_eq!(run(&argv(&complete)).stdout, run(&argv(&complete)).stdout);
    }
}
