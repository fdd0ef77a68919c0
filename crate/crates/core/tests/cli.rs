use std::fs;
use std::path::{Path, PathBuf};
use std::process::{Command, Output};

fn scenario(name: &str) -> PathBuf {
    Path::new(env!("CARGO_MANIFEST_DIR")).join("../../scenarios").join(name)
}

fn rsskit(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_rsskit")).args(args).output().unwrap()
}

fn code(o: &Output) -> i32 {
    o.status.code().unwrap()
}

fn text(b: &[u8]) -> String {
    String::from_utf8_lossy(b).into_owned()
}

#[test]
fn simulate_exit_codes() {
    let o = rsskit(&["simulate", scenario("faulty_follower.toml").to_str().unwrap()]);
    assert_eq!(code(&o), 4);
    let err = text(&o.stderr);
    assert!(err.contains("first monitor failure: record 2"), "{err}");
    assert!(err.contains("failed clause: proper.a1"), "{err}");
    assert!(err.contains("first collision: record 6"), "{err}");
    assert!(text(&o.stdout).starts_with("t,x1,v1,a1,x2,v2,a2,mode,monitor_ok,monitor_id,invariant_J,collided\n"));

    for name in ["conservative.toml", "opposite_rho1.toml", "opposite_rho6.toml"] {
        let o = rsskit(&["simulate", scenario(name).to_str().unwrap()]);
        assert_eq!(code(&o), 0, "{name}: {}", text(&o.stderr));
    }
}

#[test]
fn invalid_scenario_reports_file_and_line() {
    let dir = tempfile::tempdir().unwrap();
    let src = fs::read_to_string(scenario("conservative.toml")).unwrap();
    let bad = src.replace("rho = 1", "rho = 0");
    assert_ne!(bad, src);
    let path = dir.path().join("rho0.toml");
    fs::write(&path, bad).unwrap();
    let o = rsskit(&["simulate", path.to_str().unwrap()]);
    assert_eq!(code(&o), 1);
    let err = text(&o.stderr);
    assert!(err.contains("rho0.toml:") && err.contains("rho > 0"), "{err}");
}

#[test]
fn monitor_reproduces_simulated_trace() {
    let dir = tempfile::tempdir().unwrap();
    let sc = scenario("faulty_follower.toml");
    let csv = dir.path().join("faulty.csv");
    rsskit(&["simulate", sc.to_str().unwrap(), "-o", csv.to_str().unwrap()]);

    let o = rsskit(&["monitor", csv.to_str().unwrap(), "--scenario", sc.to_str().unwrap()]);
    assert_eq!(code(&o), 4);
    let out = text(&o.stdout);
    assert!(out.contains("first monitor failure: 2 (proper.a1)"), "{out}");
    assert!(out.contains("recorded columns: reproduced"), "{out}");

    // same parameters given as flags
    let o = rsskit(&["monitor", csv.to_str().unwrap()]);
    assert!(text(&o.stdout).contains("recorded columns: reproduced"));

    // an edited verdict column is detected
    let edited: String = fs::read_to_string(&csv)
        .unwrap()
        .lines()
        .enumerate()
        .map(|(i, l)| if i == 3 { l.replacen(",false,proper.a1,", ",true,,", 1) } else { l.to_string() } + "\n")
        .collect();
    fs::write(&csv, edited).unwrap();
    let o = rsskit(&["monitor", csv.to_str().unwrap()]);
    assert!(
        text(&o.stdout).contains("differ from recomputation at record 2"),
        "{}",
        text(&o.stdout)
    );
}

#[test]
fn monitor_flags_modeling_flaw() {
    // cars already overlapping, yet every recorded control choice is allowed
    let dir = tempfile::tempdir().unwrap();
    let csv = dir.path().join("flaw.csv");
    fs::write(
        &csv,
        "t,x1,v1,a1,x2,v2,a2,mode,monitor_ok,monitor_id,invariant_J,collided\n\
         0,5,0,-4,4,0,-8,proper,true,,false,true\n",
    )
    .unwrap();
    let o = rsskit(&["monitor", csv.to_str().unwrap()]);
    assert_eq!(code(&o), 6, "{}", text(&o.stdout));
}

#[test]
fn optimality_and_print_model() {
    let o = rsskit(&["optimality", "--v1", "10", "--v2", "10"]);
    assert_eq!(code(&o), 0);
    let out = text(&o.stdout);
    assert!(out.contains("safe distance 22.75"), "{out}");
    assert!(out.contains("collision"), "{out}");

    let o = rsskit(&["optimality", "--mode", "opposite", "--v1", "10", "--v2", "-10"]);
    assert_eq!(code(&o), 0, "{}", text(&o.stdout));
    assert!(text(&o.stdout).contains("safe distance 58"));

    let o = rsskit(&["print-model", "--mode", "opposite"]);
    assert_eq!(code(&o), 0);
    let out = text(&o.stdout);
    assert!(out.contains("aMinBrake") && out.contains("proper.a2"), "{out}");
}

#[test]
fn compile_writes_runnable_module() {
    let dir = tempfile::tempdir().unwrap();
    let hp = dir.path().join("p.hp");
    fs::write(&hp, "y := x * 2; {{?y > 3; z := 1} ++ {?!(y > 3); z := 0}}").unwrap();
    let py = dir.path().join("p.py");
    let o = rsskit(&["compile", hp.to_str().unwrap(), "-o", py.to_str().unwrap()]);
    assert_eq!(code(&o), 0, "{}", text(&o.stderr));
    let module = fs::read_to_string(&py).unwrap();
    assert!(
        module.contains("def step(state)") && module.contains("def main()"),
        "{module}"
    );

    fs::write(&hp, "x := *").unwrap();
    let o = rsskit(&["compile", hp.to_str().unwrap()]);
    assert_eq!(code(&o), 1);

    fs::write(&hp, "x := (").unwrap();
    let o = rsskit(&["compile", hp.to_str().unwrap()]);
    assert_eq!(code(&o), 1);
    assert!(text(&o.stderr).contains("p.hp:"), "{}", text(&o.stderr));
}

#[test]
fn scenario_with_program_controller() {
    let dir = tempfile::tempdir().unwrap();
    fs::write(
        dir.path().join("brake.hp"),
        "{{?v1 > 0; a1 := -aMinBrake} ++ {?!(v1 > 0); a1 := 0}}; a2 := 0",
    )
    .unwrap();
    let src = fs::read_to_string(scenario("conservative.toml"))
        .unwrap()
        .replace("\"rss-conservative\"", "\"brake.hp\"");
    let path = dir.path().join("brake.toml");
    fs::write(&path, src).unwrap();
    let o = rsskit(&["simulate", path.to_str().unwrap()]);
    assert_eq!(code(&o), 0, "{}", text(&o.stderr));
}
