use std::fs;
use std::path::{Path, PathBuf};
use std::process::{Command, Output};

use serde_json::Value;
use warpmcf::{load_config, load_state, OUTPUT_DIR_ENV};

const MINIMAL_TORUS: &str = "name = minimal\nbase = flat-torus\nwarp = one\ngrid.resolution = 16\ninitial = sinusoid\ninitial.amplitude = 0.8\ntime.horizon = 0.2\n";

struct Workspace {
    dir: tempfile::TempDir,
}

impl Workspace {
    fn new() -> Self {
        Workspace { dir: tempfile::tempdir().unwrap() }
    }

    fn config(&self, file: &str, text: &str) -> PathBuf {
        let p = self.dir.path().join(file);
        fs::write(&p, text).unwrap();
        p
    }

    fn out(&self) -> PathBuf {
        self.dir.path().join("out")
    }

    fn run(&self, args: &[&str]) -> Output {
        Command::new(env!("CARGO_BIN_EXE_warpmcf")).args(args).env(OUTPUT_DIR_ENV, self.out()).output().unwrap()
    }

    fn report(&self, name: &str) -> Value {
        serde_json::from_slice(&fs::read(self.out().join(name).join("report.json")).unwrap()).unwrap()
    }
}

fn code(o: &Output) -> i32 {
    o.status.code().unwrap()
}

fn path_str(p: &Path) -> &str {
    p.to_str().unwrap()
}

#[test]
fn flow_writes_report_series_and_snapshots() {
    let ws = Workspace::new();
    let cfg = ws.config("torus.conf", MINIMAL_TORUS);
    let o = ws.run(&["flow", path_str(&cfg)]);
    assert_eq!(code(&o), 0, "{}", String::from_utf8_lossy(&o.stderr));
    let run = ws.out().join("minimal");
    let report = ws.report("minimal");
    assert_eq!(report["status"], "pass");
    assert!(report["flow"]["constants"]["pinching_excess"].is_number());
    assert_eq!(report["config"]["run"]["settings"]["scheme"], "euler");
    for m in report["flow"]["monitors"].as_array().unwrap() {
        assert_eq!(m["verdict"], "pass");
        let key = m["id"].as_str().unwrap();
        assert!(run.join("series").join(format!("{key}.csv")).exists());
    }
    // default cadence T/50 gives 51 samples
    assert_eq!(fs::read_dir(run.join("snapshots")).unwrap().count(), 51);
    let last = load_state(&run.join("snapshots/state_0050.json")).unwrap();
    assert_eq!(last.t(), 0.2);
}

#[test]
fn mis_scaled_bound_is_a_genuine_violation() {
    let ws = Workspace::new();
    let text = MINIMAL_TORUS.replace("time.horizon = 0.2", "time.horizon = 1\nmonitors = gradient\nfixture.nu-shift = -1");
    let o = ws.run(&["flow", path_str(&ws.config("shifted.conf", &text))]);
    assert_eq!(code(&o), 2);
    let m = &ws.report("minimal")["flow"]["monitors"][0];
    assert_eq!(m["verdict"], "genuine");
    assert!(m["refined_worst_margin"].as_f64().unwrap() < 0.0);
}

#[test]
fn unstable_step_is_a_blow_up() {
    let ws = Workspace::new();
    // a kink excites the grid modes, which an oversized explicit step amplifies
    let text = "name = minimal\nbase = flat-torus\nwarp = one\ngrid.resolution = 16\ninitial = lipschitz-cone\ninitial.slope = 1\ninitial.center = 3, 3\ntime.horizon = 4\ntime.cadence = 4\ndt = fixed\ndt.value = 0.2\noutput.snapshots = false\n";
    let o = ws.run(&["flow", path_str(&ws.config("unstable.conf", text))]);
    assert_eq!(code(&o), 3);
    let r = ws.report("minimal");
    assert!(r["flow"]["blow_up"]["node"].is_number());
    assert_eq!(r["flow"]["stop"]["reason"], "blow-up");
}

#[test]
fn config_errors_exit_four_and_name_fields() {
    let ws = Workspace::new();
    let text = "base = hyperbolic-polar\nwarp = cosh-r\ngrid.resolution = 32\ninitial = constant\ninitial.value = 0\ntime.horizon = -1\n";
    let o = ws.run(&["flow", path_str(&ws.config("bad.conf", text))]);
    assert_eq!(code(&o), 4);
    let err = String::from_utf8_lossy(&o.stderr);
    assert!(err.contains("grid.radius") && err.contains("time.horizon"), "{err}");
    assert!(!ws.out().exists());
    let o = ws.run(&["counterexample", path_str(&ws.config("flow.conf", MINIMAL_TORUS))]);
    assert_eq!(code(&o), 4);
}

#[test]
fn counterexample_routed_to_profile_curves() {
    let ws = Workspace::new();
    let text = "name = tilted\nscenario = tilted-disc\ntime.horizon = 0.05\ncounterflow.nodes = 64\n";
    let cfg = ws.config("tilted.conf", text);
    for sub in ["flow", "counterexample"] {
        let o = ws.run(&[sub, path_str(&cfg)]);
        assert_eq!(code(&o), 0, "{}", String::from_utf8_lossy(&o.stderr));
        assert!(String::from_utf8_lossy(&o.stdout).contains("geodesic graph failed"));
        let r = ws.report("tilted");
        assert_eq!(r["counterexample"]["geodesic_verdict"], "geodesic graph failed");
        assert_eq!(r["counterexample"]["report"]["label"], "in the spirit of");
        let csv = fs::read_to_string(ws.out().join("tilted/series/counterflow.csv")).unwrap();
        assert!(csv.starts_with("t,sup_v_eq,sup_v_geo,"));
        warpmcf::load_curve(&ws.out().join("tilted/snapshots/curve_final.json")).unwrap();
    }
}

#[test]
fn verify_emits_conformance_json() {
    let ws = Workspace::new();
    let o = ws.run(&["verify"]);
    assert_eq!(code(&o), 0);
    let r: Value = serde_json::from_slice(&o.stdout).unwrap();
    assert_eq!(r["passed"], true);
    assert!(r["checks"].as_array().unwrap().len() >= 5);
    assert!(!ws.out().exists(), "verify must not run a scenario");
}

#[test]
fn sweep_runs_one_scenario_per_value() {
    let ws = Workspace::new();
    let cfg = ws.config("torus.conf", &format!("{MINIMAL_TORUS}output.snapshots = false\n"));
    let o = ws.run(&["sweep", path_str(&cfg), "--param", "initial.amplitude=0.2,0.4"]);
    assert_eq!(code(&o), 0, "{}", String::from_utf8_lossy(&o.stderr));
    for v in ["0.2", "0.4"] {
        let r = ws.report(&format!("minimal.initial.amplitude={v}"));
        assert_eq!(r["config"]["run"]["initial"]["amplitude"].as_f64().unwrap().to_string(), v);
    }
    let o = ws.run(&["sweep", path_str(&cfg), "--param", "grid.resolution=32,8"]);
    assert_eq!(code(&o), 4);
}

#[test]
fn identical_config_gives_identical_artifacts() {
    let ws = Workspace::new();
    let text = format!("{MINIMAL_TORUS}initial.perturbation = 0.05\nseed = 11\n");
    let cfg = ws.config("seeded.conf", &text);
    let collect = || {
        let mut files: Vec<(PathBuf, Vec<u8>)> = Vec::new();
        for sub in ["", "series", "snapshots"] {
            let d = ws.out().join("minimal").join(sub);
            for e in fs::read_dir(&d).unwrap() {
                let p = e.unwrap().path();
                if p.is_file() {
                    files.push((p.clone(), fs::read(&p).unwrap()));
                }
            }
        }
        files.sort();
        files
    };
    assert_eq!(code(&ws.run(&["flow", path_str(&cfg)])), 0);
    let first = collect();
    assert_eq!(code(&ws.run(&["flow", path_str(&cfg)])), 0);
    assert_eq!(first, collect());
    let other = ws.config("reseeded.conf", &text.replace("seed = 11", "seed = 12"));
    assert_eq!(code(&ws.run(&["flow", path_str(&other)])), 0);
    assert_ne!(first, collect());
}

#[test]
fn restart_from_midpoint_snapshot() {
    let ws = Workspace::new();
    let text = format!("{MINIMAL_TORUS}dt = fixed\ndt.value = 0.001\ntime.cadence = 0.1\n");
    let cfg = ws.config("fixed.conf", &text);
    assert_eq!(code(&ws.run(&["flow", path_str(&cfg)])), 0);
    let snaps = ws.out().join("minimal/snapshots");
    let full = load_state(&snaps.join("state_0002.json")).unwrap();
    let mid = ws.dir.path().join("mid.json");
    fs::copy(snaps.join("state_0001.json"), &mid).unwrap();
    let o = ws.run(&["flow", path_str(&cfg), "--restart", path_str(&mid)]);
    assert_eq!(code(&o), 0, "{}", String::from_utf8_lossy(&o.stderr));
    assert_eq!(ws.report("minimal")["flow"]["restarted_at"], 0.1);
    let restarted = load_state(&snaps.join("state_0001.json")).unwrap();
    assert_eq!(restarted.t(), full.t());
    let bits = |u: &[f64]| u.iter().map(|x| x.to_bits()).collect::<Vec<_>>();
    assert_eq!(bits(restarted.u()), bits(full.u()));
    // a snapshot of another grid is refused
    let o = ws.run(&["flow", path_str(&cfg), "--set", "grid.resolution=32", "--restart", path_str(&mid)]);
    assert_eq!(code(&o), 4);
}

#[test]
fn shipped_configs_parse() {
    let dir = Path::new(env!("CARGO_MANIFEST_DIR")).join("../../configs");
    let mut count = 0;
    for e in fs::read_dir(&dir).unwrap() {
        let p = e.unwrap().path();
        if p.extension().and_then(|x| x.to_str()) == Some("conf") {
            load_config(&p, &[]).unwrap_or_else(|e| panic!("{}: {e}", p.display()));
            count += 1;
        }
    }
    assert!(count >= 6);
}
