use std::path::Path;
use std::process::Command;

use planar_hodograph::cplx;
use planar_hodograph_cli::figure::{emit_figure, Figure, Marker};
use planar_hodograph_cli::output::{CURVES, FIGURE, POINTS, REPORT};
use planar_hodograph_cli::{bundled, report, ScenarioConfig, SCENARIOS};

const IDENTITY: &str = include_str!("../scenarios/halfdisk-identity.toml");

fn bin() -> Command {
    Command::new(env!("CARGO_BIN_EXE_hodograph"))
}

fn with(key: &str, replacement: &str) -> String {
    let line = IDENTITY.lines().find(|l| l.starts_with(key)).expect("key present");
    IDENTITY.replace(line, replacement)
}

#[test]
fn bundled_scenarios_parse() {
    for (name, _) in SCENARIOS {
        assert_eq!(bundled(name).unwrap().name, name);
    }
    assert!(bundled("nope").is_none());
}

#[test]
fn unknown_keys_are_rejected() {
    let text = IDENTITY.replace("levels = 10", "levels = 10\nlevles = 3");
    let e = ScenarioConfig::parse(&text).unwrap_err().to_string();
    assert!(e.contains("levles"), "{e}");
}

#[test]
fn out_of_range_values_are_rejected() {
    for (key, line, needle) in [
        ("charges", "charges = 2", "solver.charges"),
        ("collocation", "collocation = 100", "solver.collocation"),
        ("offset", "offset = -1.0", "solver.offset"),
        ("levels", "levels = 0", "hodograph.levels"),
        ("boundary_samples", "boundary_samples = 3", "critical.boundary_samples"),
        ("rectangle", "rectangle = \"big\"", "hodograph.rectangle"),
        ("rectangle", "rectangle = [0.5, -1.0]", "hodograph.rectangle b"),
    ] {
        let e = ScenarioConfig::parse(&with(key, line)).unwrap_err().to_string();
        assert!(e.contains(needle), "{line}: {e}");
    }
}

#[test]
fn fixed_rectangle_parses() {
    let cfg = ScenarioConfig::parse(&with("rectangle", "rectangle = [0.5, 0.25]")).unwrap();
    assert_eq!(cfg.rectangle(), Some((0.5, 0.25)));
}

#[test]
fn figure_layers_match_contents() {
    let square = vec![cplx(0.0, 0.0), cplx(1.0, 0.0), cplx(1.0, 1.0), cplx(0.0, 1.0)];
    let empty = emit_figure(&Figure {
        boundary: Some(square.clone()),
        ..Default::default()
    });
    assert_eq!(empty.matches("<circle").count(), 0);
    assert_eq!(empty.matches("class=\"boundary\"").count(), 1);
    assert!(!empty.contains("id=\"warnings\""));

    let level = vec![vec![cplx(0.1, 0.5), cplx(0.9, 0.5)]];
    let fig = Figure {
        boundary: Some(square),
        levels: vec![level; 5],
        markers: vec![
            Marker { point: cplx(0.5, 0.5), kind: "u" },
            Marker { point: cplx(0.5, 0.0), kind: "boundary" },
        ],
        ..Default::default()
    };
    let svg = emit_figure(&fig);
    assert_eq!(svg.matches("<circle").count(), 2);
    assert_eq!(svg.matches("class=\"level\"").count(), 5);
    assert!(svg.contains("viewBox=\"0 0 1000 1000\""));
    assert_eq!(svg, emit_figure(&fig));

    let missing = emit_figure(&Figure {
        warnings: vec!["domain boundary unavailable".into()],
        ..Default::default()
    });
    assert!(missing.contains("id=\"warnings\""));
    assert!(missing.contains("domain boundary unavailable"));
}

#[test]
fn run_writes_valid_outputs() {
    let dir = tempfile::tempdir().unwrap();
    let out = bin()
        .args(["run", "scenarios/halfdisk-identity.toml", "--out"])
        .arg(dir.path())
        .current_dir(env!("CARGO_MANIFEST_DIR"))
        .output()
        .unwrap();
    assert_eq!(out.status.code(), Some(0), "{}", String::from_utf8_lossy(&out.stderr));
    for f in [REPORT, POINTS, CURVES, FIGURE] {
        assert!(dir.path().join(f).is_file(), "{f} missing");
    }
    let text = std::fs::read_to_string(dir.path().join(REPORT)).unwrap();
    let value: serde_json::Value = serde_json::from_str(&text).unwrap();
    report::validate(&value).unwrap();
    assert_eq!(value["status"]["exit_code"], 0);
    assert_eq!(value["critical"]["ledger"]["conclusive"], true);
    let points = std::fs::read_to_string(dir.path().join(POINTS)).unwrap();
    assert!(points.starts_with("x,y,multiplicity,set"));
}

#[test]
fn verify_prints_checks() {
    let out = bin()
        .args(["verify", "scenarios/halfdisk-identity.toml"])
        .current_dir(env!("CARGO_MANIFEST_DIR"))
        .output()
        .unwrap();
    assert_eq!(out.status.code(), Some(0), "{}", String::from_utf8_lossy(&out.stderr));
    let stdout = String::from_utf8_lossy(&out.stdout);
    assert!(stdout.lines().any(|l| l.starts_with("PASS")));
    assert!(!stdout.lines().any(|l| l.starts_with("FAIL")));
}

#[test]
fn missing_config_is_a_config_error() {
    let out = bin().args(["run", "does/not/exist.toml"]).output().unwrap();
    assert_eq!(out.status.code(), Some(1));
    assert!(String::from_utf8_lossy(&out.stderr).contains("stage config"));
}

#[test]
fn bad_worker_count_is_rejected() {
    let out = bin()
        .env("HODOGRAPH_WORKERS", "zero")
        .args(["verify", "scenarios/halfdisk-identity.toml"])
        .current_dir(env!("CARGO_MANIFEST_DIR"))
        .output()
        .unwrap();
    assert_eq!(out.status.code(), Some(1));
}

#[test]
fn hard_error_names_the_stage() {
    // u = x is not odd across the flat edge, so the reflection step fails
    let dir = tempfile::tempdir().unwrap();
    let cfg = dir.path().join("bad.toml");
    let text = IDENTITY.replace("[u]\nkind = \"closed\"\nname = \"y\"", "[u]\nkind = \"closed\"\nname = \"x\"");
    assert_ne!(text, IDENTITY);
    std::fs::write(&cfg, text).unwrap();
    let out = bin()
        .arg("run")
        .arg(&cfg)
        .arg("--out")
        .arg(dir.path().join("out"))
        .output()
        .unwrap();
    assert_eq!(out.status.code(), Some(1));
    let stderr = String::from_utf8_lossy(&out.stderr);
    assert!(stderr.contains("ledger"), "{stderr}");
    let report: serde_json::Value =
        serde_json::from_str(&std::fs::read_to_string(Path::new(&dir.path().join("out")).join(REPORT)).unwrap()).unwrap();
    assert_eq!(report["status"]["error"]["stage"], "ledger");
}
