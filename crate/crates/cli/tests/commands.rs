use std::path::Path;
use std::process::{Command, Output};

use fracburgers_cli::io::{parse_table, read_first_slice};
use fracburgers_cli::{parse_scenario, run, sweep};

const BIN: &str = env!("CARGO_BIN_EXE_fracburgers");

const FRONT: &str = "\
name = front
equation = be
alpha = 0.2
grid.x0 = -8
grid.dx = 0.05
grid.n = 321
initial = tanh_front
initial.phi1 = 0
initial.phi2 = 1
t_end = 0.5
dt = 0.002
snapshots = 5
outputs = fields, invariants, residuals
";

fn cli(dir: &Path, args: &[&str]) -> Output {
    Command::new(BIN)
        .arg("--out-dir")
        .arg(dir)
        .args(args)
        .output()
        .unwrap()
}

fn write(dir: &Path, name: &str, text: &str) -> String {
    let p = dir.join(name);
    std::fs::write(&p, text).unwrap();
    p.to_str().unwrap().to_string()
}

#[test]
fn run_writes_tables_summary_and_report() {
    let dir = tempfile::tempdir().unwrap();
    let scn = write(dir.path(), "front.scn", FRONT);
    let out = cli(dir.path(), &["run", &scn]);
    assert!(out.status.success(), "{}", String::from_utf8_lossy(&out.stderr));
    let report: serde_json::Value = serde_json::from_slice(&out.stdout).unwrap();
    assert_eq!(report["name"], "front");
    assert!(report["wall_clock_ms"].is_u64());
    assert!(report.get("comparison").is_none());
    assert!(report["residuals"]["fbenn"].as_f64().unwrap() < 1e-2);

    let table = std::fs::read_to_string(dir.path().join("front.csv")).unwrap();
    let slices = parse_table(&table).unwrap();
    assert_eq!(slices.len(), 6);
    assert_eq!(slices[5].t(), 0.5);
    assert!(table.starts_with("x,t,phi\n"));

    let summary: serde_json::Value =
        serde_json::from_str(&std::fs::read_to_string(dir.path().join("front.summary.json")).unwrap()).unwrap();
    assert!(summary.get("wall_clock_ms").is_none());
    assert_eq!(summary["conservation"]["mass"].as_array().unwrap().len(), 6);
}

#[test]
fn quiet_run_prints_nothing() {
    let dir = tempfile::tempdir().unwrap();
    let scn = write(dir.path(), "front.scn", FRONT);
    let out = cli(dir.path(), &["--quiet", "run", &scn]);
    assert!(out.status.success());
    assert!(out.stdout.is_empty());
}

#[test]
fn repeated_runs_are_byte_identical() {
    let dir = tempfile::tempdir().unwrap();
    let scn = write(dir.path(), "front.scn", FRONT);
    let (a, b) = (dir.path().join("a"), dir.path().join("b"));
    assert!(cli(&a, &["run", &scn]).status.success());
    assert!(cli(&b, &["run", &scn]).status.success());
    for f in ["front.csv", "front.summary.json"] {
        assert_eq!(std::fs::read(a.join(f)).unwrap(), std::fs::read(b.join(f)).unwrap(), "{f}");
    }
}

#[test]
fn invalid_configurations_exit_two_and_name_the_key() {
    let dir = tempfile::tempdir().unwrap();
    let cases = [
        (FRONT.replace("dt = 0.002", "dt = 0.01"), "`dt`"),
        (FRONT.replace("equation = be", "equation = fbenn\np = 1.5"), "`p`"),
        (format!("{FRONT}colour = red\n"), "`colour`"),
        (FRONT.replace("alpha = 0.2\n", ""), "`alpha`"),
        (
            FRONT
                .replace("equation = be", "equation = diffusion")
                .replace("initial = tanh_front\ninitial.phi1 = 0\ninitial.phi2 = 1", "initial = gaussian\ninitial.width = 1\ninitial.amplitude = 1")
                + "pipeline = both\n",
            "`pipeline`",
        ),
    ];
    for (i, (text, key)) in cases.iter().enumerate() {
        let scn = write(dir.path(), &format!("bad{i}.scn"), text);
        let out = cli(dir.path(), &["run", &scn]);
        let err = String::from_utf8_lossy(&out.stderr);
        assert_eq!(out.status.code(), Some(2), "case {i}: {err}");
        assert!(err.contains(key), "case {i}: {err}");
    }
}

#[test]
fn blow_up_exits_three() {
    let dir = tempfile::tempdir().unwrap();
    // Anti-diffusive start: a huge, sharp pulse driven by the nonlocal term.
    let text = "equation = nde\nalpha = 1e-6\ngrid.x0 = -1\ngrid.dx = 0.01\ngrid.n = 201\n\
                initial = gaussian\ninitial.width = 0.02\ninitial.amplitude = 1e6\nt_end = 1\ndt = 0.02\n";
    let scn = write(dir.path(), "blow.scn", text);
    let out = cli(dir.path(), &["run", &scn]);
    assert_eq!(out.status.code(), Some(3), "{}", String::from_utf8_lossy(&out.stderr));
}

#[test]
fn missing_scenario_file_is_an_io_error() {
    let dir = tempfile::tempdir().unwrap();
    let out = cli(dir.path(), &["run", "/nonexistent/x.scn"]);
    assert_eq!(out.status.code(), Some(1));
}

#[test]
fn field_tables_read_back_exactly() {
    let dir = tempfile::tempdir().unwrap();
    let s = parse_scenario(FRONT).unwrap();
    let report = run(&s, dir.path()).unwrap();
    let back = parse_table(&std::fs::read_to_string(dir.path().join("front.csv")).unwrap()).unwrap();
    assert_eq!(back.last().unwrap(), &report.field);

    // Restart from the written table; the grid comes from the file.
    let restart =
        "name = again\nequation = be\nalpha = 0.2\ninitial = file\ninitial.path = front.csv\nt_end = 0.1\ndt = 0.002\n";
    let scn = write(dir.path(), "again.scn", restart);
    let s2 = fracburgers_cli::parse_scenario_file(Path::new(&scn)).unwrap();
    let r2 = run(&s2, dir.path()).unwrap();
    assert_eq!(r2.summary.grid, s.grid.unwrap());
    assert_eq!(read_first_slice(&dir.path().join("again.csv")).unwrap().values(), back[0].values());
}

#[test]
fn singleton_sweep_is_a_run() {
    let dir = tempfile::tempdir().unwrap();
    let text = FRONT.replace("equation = be", "equation = fbenn\np = 0.5").replace("name = front", "name = s");
    let s = parse_scenario(&text).unwrap();
    let single = run(&s, &dir.path().join("run")).unwrap();
    let sw = sweep(&s, &[0.5], &dir.path().join("sweep")).unwrap();
    assert_eq!(sw.runs.len(), 1);
    assert!(sw.continuity.is_empty());
    assert_eq!(sw.runs[0].field, single.field);
    let a = std::fs::read(dir.path().join("run/s.csv")).unwrap();
    let b = std::fs::read(dir.path().join("sweep/s.p0.5.csv")).unwrap();
    assert_eq!(a, b);
}

#[test]
fn sweep_over_orders() {
    let dir = tempfile::tempdir().unwrap();
    let text = FRONT.replace("equation = be", "equation = fbenn\np = 1");
    let scn = write(dir.path(), "sw.scn", &text);
    let out = cli(dir.path(), &["sweep", &scn, "--p", "0,0.25,0.5,0.75,1"]);
    assert!(out.status.success(), "{}", String::from_utf8_lossy(&out.stderr));
    let report: serde_json::Value = serde_json::from_slice(&out.stdout).unwrap();
    let cont = report["continuity"].as_array().unwrap();
    assert_eq!(cont.len(), 4);
    for c in cont {
        assert!(c["linf"].as_f64().unwrap().is_finite());
        assert!(c["linf_mod_const"].as_f64().unwrap() <= c["linf"].as_f64().unwrap());
    }
    assert!(dir.path().join("front.p0.25.csv").exists());

    let out = cli(dir.path(), &["sweep", &scn, "--p", "0.5,2"]);
    assert_eq!(out.status.code(), Some(2));
    let be = write(dir.path(), "be.scn", FRONT);
    let out = cli(dir.path(), &["sweep", &be, "--p", "0.5"]);
    assert_eq!(out.status.code(), Some(2));
    assert!(String::from_utf8_lossy(&out.stderr).contains("`equation`"));
}
