use std::path::{Path, PathBuf};
use std::process::{Command, Output};

use carpe_core::sim::Occlusion;
use carpe_core::ScenarioConfig;

fn carpe(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_carpe")).args(args).output().unwrap()
}

struct TempDir(PathBuf);

impl TempDir {
    fn new(tag: &str) -> Self {
        let p = std::env::temp_dir().join(format!("carpe-cli-{tag}-{}", std::process::id()));
        let _ = std::fs::remove_dir_all(&p);
        std::fs::create_dir_all(&p).unwrap();
        Self(p)
    }

    fn path(&self, name: &str) -> String {
        self.0.join(name).to_string_lossy().into_owned()
    }
}

impl Drop for TempDir {
    fn drop(&mut self) {
        let _ = std::fs::remove_dir_all(&self.0);
    }
}

fn small_config(dir: &TempDir) -> String {
    let mut c = ScenarioConfig::lab_default(5);
    c.num_frames = 900;
    c.feature_dim = 32;
    c.occlusion_events = vec![
        Occlusion { person_index: 0, start_frame: 200, duration_frames: 30 },
        Occlusion { person_index: 0, start_frame: 500, duration_frames: 45 },
    ];
    c.appearance_changes.clear();
    let path = dir.path("scenario.toml");
    std::fs::write(&path, toml::to_string(&c).unwrap()).unwrap();
    path
}

fn code(o: &Output) -> i32 {
    o.status.code().unwrap()
}

#[test]
fn full_pipeline_from_config_files() {
    let t = TempDir::new("pipeline");
    let scenario = small_config(&t);
    let engine = t.path("engine.toml");
    std::fs::write(&engine, "feature_dim = 32\nblacklist_stable_frames = 15\n").unwrap();

    let o = carpe(&["simulate", "--config", &scenario, "--out", &t.path("s.jsonl")]);
    assert_eq!(code(&o), 0, "{}", String::from_utf8_lossy(&o.stderr));
    let o = carpe(&["run", "--stream", &t.path("s.jsonl"), "--engine", &engine, "--out", &t.path("run")]);
    assert_eq!(code(&o), 0, "{}", String::from_utf8_lossy(&o.stderr));

    let decisions = std::fs::read_to_string(t.path("run/decisions.csv")).unwrap();
    assert_eq!(decisions.lines().count(), 901);
    let metrics = std::fs::read_to_string(t.path("run/metrics.jsonl")).unwrap();
    let m: serde_json::Value = serde_json::from_str(metrics.lines().next().unwrap()).unwrap();
    assert_eq!(m["reid_count"], 2);
    assert_eq!(m["misid_count"], 0);

    let o = carpe(&["compare-damping", "--stream", &t.path("s.jsonl"), "--out", &t.path("trace.csv")]);
    assert_eq!(code(&o), 0);
    let trace = std::fs::read_to_string(t.path("trace.csv")).unwrap();
    assert!(trace.starts_with("frame_index,damped_kind,damped_distance,damped_mu_d"));
    assert_eq!(trace.lines().count(), 901);

    assert_eq!(
        code(&carpe(&["report", "--metrics", &t.path("run/metrics.jsonl"), "--out", &t.path("rep")])),
        0
    );
    for f in [
        "report.csv",
        "summary.txt",
        "tracking_length.svg",
        "reid_delay.svg",
        "mot_errors.svg",
        "reid_count.svg",
    ] {
        assert!(Path::new(&t.path("rep")).join(f).exists(), "{f}");
    }
}

#[test]
fn seed_flag_overrides_config() {
    let t = TempDir::new("seed");
    let scenario = small_config(&t);
    carpe(&["simulate", "--config", &scenario, "--seed", "77", "--out", &t.path("a.jsonl")]);
    let header = std::fs::read_to_string(t.path("a.jsonl")).unwrap();
    let h: serde_json::Value = serde_json::from_str(header.lines().next().unwrap()).unwrap();
    assert_eq!(h["seed"], 77);
    assert_eq!(h["config"]["seed"], 77);
}

#[test]
fn exit_codes() {
    let t = TempDir::new("codes");
    // I/O
    assert_eq!(code(&carpe(&["run", "--stream", &t.path("missing.jsonl"), "--out", &t.path("x")])), 2);
    // validation: bad config, bad stream, bad binding, empty report, usage
    let bad = t.path("bad.toml");
    std::fs::write(&bad, "num_frames = 0\n").unwrap();
    assert_eq!(code(&carpe(&["simulate", "--config", &bad, "--out", &t.path("s.jsonl")])), 1);

    let scenario = small_config(&t);
    carpe(&["simulate", "--config", &scenario, "--out", &t.path("s.jsonl")]);
    let mut bytes = std::fs::read(t.path("s.jsonl")).unwrap();
    bytes.truncate(bytes.len() - 3);
    std::fs::write(t.path("cut.jsonl"), &bytes).unwrap();
    let o = carpe(&["run", "--stream", &t.path("cut.jsonl"), "--out", &t.path("x")]);
    assert_eq!(code(&o), 1);
    assert!(String::from_utf8_lossy(&o.stderr).contains("line"));

    assert_eq!(
        code(&carpe(&["run", "--stream", &t.path("s.jsonl"), "--person", "9", "--out", &t.path("x")])),
        1
    );
    std::fs::write(t.path("empty.jsonl"), "").unwrap();
    assert_eq!(code(&carpe(&["report", "--metrics", &t.path("empty.jsonl"), "--out", &t.path("r")])), 1);
    assert_eq!(code(&carpe(&["frobnicate"])), 1);
    assert_eq!(code(&carpe(&["--help"])), 0);
}
