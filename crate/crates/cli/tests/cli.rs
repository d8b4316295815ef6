use std::path::{Path, PathBuf};
use std::process::{Command, Output};

use serde_json::Value;
use tempfile::TempDir;

use smallcube::complex::TwoComplex;
use smallcube::dehn::gamma_of;
use smallcube::ycomplex::{build_y_from_parts, default_betas, y_generators, YConfig};

fn bin() -> Command {
    let mut c = Command::new(env!("CARGO_BIN_EXE_smallcube"));
    c.env_remove("SMALLCUBE_WORD_CAP").env_remove("SMALLCUBE_MEDIAN_CAP");
    c
}

fn run(args: &[&str]) -> Output {
    bin().args(args).output().expect("binary runs")
}

fn code(o: &Output) -> i32 {
    o.status.code().expect("exited normally")
}

fn stdout_json(o: &Output) -> Value {
    serde_json::from_slice(&o.stdout).unwrap_or_else(|e| {
        panic!("stdout not JSON ({e}): {}", String::from_utf8_lossy(&o.stdout))
    })
}

fn read_json(p: &Path) -> Value {
    serde_json::from_str(&std::fs::read_to_string(p).unwrap()).unwrap()
}

struct Fixture {
    dir: TempDir,
    y1: PathBuf,
}

fn y1() -> Fixture {
    let dir = TempDir::new().unwrap();
    let y1 = dir.path().join("y1.json");
    let o = run(&["gen", "--levels", "1", "--m", "12", "--seed", "3", "-o", y1.to_str().unwrap()]);
    assert_eq!(code(&o), 0, "{}", String::from_utf8_lossy(&o.stderr));
    Fixture { dir, y1 }
}

fn p(path: &Path) -> &str {
    path.to_str().unwrap()
}

#[test]
fn gen_then_verify_passes() {
    let dir = TempDir::new().unwrap();
    let y2 = dir.path().join("y2.json");
    let report = dir.path().join("report.json");
    assert_eq!(code(&run(&["gen", "--levels", "2", "--m", "12", "--seed", "7", "-o", p(&y2)])), 0);
    let o = run(&["verify", p(&y2), "--report", p(&report)]);
    assert_eq!(code(&o), 0, "{}", String::from_utf8_lossy(&o.stderr));
    let r = read_json(&report);
    assert_eq!(r["pass"], true);
    assert_eq!(r["claims"].as_array().unwrap().len(), 8);
}

#[test]
fn verify_on_y1_writes_to_stdout() {
    let f = y1();
    let o = run(&["verify", p(&f.y1)]);
    assert_eq!(code(&o), 0);
    assert_eq!(stdout_json(&o)["pass"], true);
}

#[test]
fn duplicated_beta_exits_2() {
    let dir = TempDir::new().unwrap();
    let cfg = YConfig::new(1, 12, 3);
    let table = y_generators(1);
    let ans: Vec<_> = (0..=1).map(|n| cfg.presentation(n).unwrap()).collect();
    let mut betas = default_betas(&cfg, &table).unwrap();
    let first = betas[0][0][0].clone();
    for row in betas[0].iter_mut() {
        for b in row.iter_mut() {
            *b = first.clone();
        }
    }
    let bad = dir.path().join("bad.json");
    std::fs::write(&bad, build_y_from_parts(&cfg, &ans, &betas).unwrap().to_json()).unwrap();
    let o = run(&["verify", p(&bad)]);
    assert_eq!(code(&o), 2, "{}", String::from_utf8_lossy(&o.stderr));
    assert_eq!(stdout_json(&o)["pass"], false);
}

#[test]
fn duplicated_cell_fails_pieces_and_verify() {
    let f = y1();
    let mut v = read_json(&f.y1);
    let cells = v["cells"].as_array_mut().unwrap();
    let c = cells.last().unwrap().clone();
    cells.push(c);
    let bad = f.dir.path().join("dup.json");
    std::fs::write(&bad, serde_json::to_string(&v).unwrap()).unwrap();
    assert_eq!(code(&run(&["pieces", p(&bad)])), 2);
    assert_eq!(code(&run(&["verify", p(&bad)])), 2);
    // Dehn's algorithm refuses a presentation that is not C'(1/6)
    assert_eq!(code(&run(&["reduce", p(&bad), "--word", "t1"])), 2);
}

#[test]
fn pieces_report() {
    let f = y1();
    let out = f.dir.path().join("pieces.json");
    let o = run(&["pieces", p(&f.y1), "-o", p(&out)]);
    assert_eq!(code(&o), 0);
    let r = read_json(&out);
    assert_eq!(r["pass"], true);
    assert_eq!(r["cells"].as_array().unwrap().len(), 8);
    // a weaker λ still passes, a tiny one fails
    assert_eq!(code(&run(&["pieces", p(&f.y1), "--lambda", "1/4"])), 0);
    assert_eq!(code(&run(&["pieces", p(&f.y1), "--lambda", "1/100"])), 2);
    assert_eq!(code(&run(&["pieces", p(&f.y1), "--lambda", "sixth"])), 1);
}

#[test]
fn reduce_c_cell_boundary_to_empty() {
    let f = y1();
    let c = TwoComplex::from_json(&std::fs::read_to_string(&f.y1).unwrap()).unwrap();
    let g = c.generators.render(gamma_of(&c, 1, 1).unwrap().letters());
    let word = format!("t1 x11 T1 {g}");
    let o = run(&["reduce", p(&f.y1), "--word", &word]);
    assert_eq!(code(&o), 0, "{}", String::from_utf8_lossy(&o.stderr));
    let r = stdout_json(&o);
    assert_eq!(r["reduced"], "");
    assert_eq!(r["trivial"], true);
    assert_eq!(r["steps"], 1);

    let o = run(&["reduce", p(&f.y1), "--word", "t1 x11 T1"]);
    assert_eq!(code(&o), 0);
    assert_eq!(stdout_json(&o)["trivial"], false);
    assert_eq!(code(&run(&["reduce", p(&f.y1), "--word", "nosuch"])), 1);
}

#[test]
fn verify_generation_on_y1() {
    let f = y1();
    let o = run(&["verify-generation", p(&f.y1), "--levels", "1"]);
    assert_eq!(code(&o), 0);
    let r = stdout_json(&o);
    assert_eq!(r["pass"], true);
    for c in r["checks"].as_array().unwrap() {
        assert_eq!(c["steps"], 1);
    }
    let o = bin()
        .args(["verify-generation", p(&f.y1), "--levels", "1"])
        .env("SMALLCUBE_WORD_CAP", "3")
        .output()
        .unwrap();
    assert_eq!(code(&o), 1);
}

#[test]
fn cubulate_complex_and_wallspace() {
    let f = y1();
    let out = f.dir.path().join("dual.json");
    let dot = f.dir.path().join("dual.dot");
    let o = run(&["cubulate", p(&f.y1), "--out", p(&out), "--dot", p(&dot)]);
    assert_eq!(code(&o), 0, "{}", String::from_utf8_lossy(&o.stderr));
    let r = read_json(&out);
    assert_eq!(r["source"], "complex");
    assert_eq!(r["degrees"]["bounded"], true);
    assert!(std::fs::read_to_string(&dot).unwrap().starts_with("graph dual {"));

    let ws = f.dir.path().join("ws.json");
    std::fs::write(&ws, r#"{"points":4,"walls":[[[0,1],[2,3]],[[0,2],[1,3]]]}"#).unwrap();
    let o = run(&["cubulate", p(&ws)]);
    assert_eq!(code(&o), 0);
    let r = stdout_json(&o);
    assert_eq!(r["source"], "wallspace");
    assert_eq!(r["dual"]["dimension"], 2);
    assert_eq!(r["dual"]["vertices"].as_array().unwrap().len(), 4);
    assert_eq!(r["median"], true);

    let o = bin()
        .args(["cubulate", p(&ws)])
        .env("SMALLCUBE_MEDIAN_CAP", "2")
        .output()
        .unwrap();
    assert_eq!(code(&o), 0);
    assert_eq!(stdout_json(&o)["median"], Value::Null);

    std::fs::write(&ws, r#"{"points":2,"walls":[[[0],[0,1]]]}"#).unwrap();
    assert_eq!(code(&run(&["cubulate", p(&ws)])), 1);
}

#[test]
fn stats_on_y1() {
    let f = y1();
    let o = run(&["stats", p(&f.y1)]);
    assert_eq!(code(&o), 0);
    let r = stdout_json(&o);
    assert_eq!(r["vertices"], 2);
    assert_eq!(r["a_cells"], 4);
    assert_eq!(r["c_cells"], 4);
    assert_eq!(r["construction"]["seed"], 3);
}

#[test]
fn manifest_records_digests() {
    let f = y1();
    let m = f.dir.path().join("manifest.json");
    let report = f.dir.path().join("r.json");
    let o = run(&["--manifest", p(&m), "verify", p(&f.y1), "--report", p(&report)]);
    assert_eq!(code(&o), 0);
    let v = read_json(&m);
    assert_eq!(v["exit_code"], 0);
    assert_eq!(v["config"]["command"]["verify"]["report"], p(&report));
    assert_eq!(v["inputs"][0]["sha256"].as_str().unwrap().len(), 64);
    assert_eq!(v["outputs"].as_array().unwrap().len(), 1);
}

#[test]
fn outputs_are_deterministic() {
    let dir = TempDir::new().unwrap();
    let mut digests = Vec::new();
    for (k, jobs) in ["1", "2"].iter().enumerate() {
        let y = dir.path().join(format!("y{k}.json"));
        let r = dir.path().join(format!("r{k}.json"));
        let d = dir.path().join(format!("d{k}.json"));
        assert_eq!(code(&run(&["--jobs", jobs, "gen", "--levels", "2", "--m", "13", "--seed", "4", "-o", p(&y)])), 0);
        assert_eq!(code(&run(&["--jobs", jobs, "verify", p(&y), "--report", p(&r)])), 0);
        assert_eq!(code(&run(&["--jobs", jobs, "cubulate", p(&y), "--out", p(&d)])), 0);
        digests.push(
            [y, r, d]
                .iter()
                .map(|f| std::fs::read(f).unwrap())
                .collect::<Vec<_>>(),
        );
    }
    assert_eq!(digests[0], digests[1]);
}

#[test]
fn usage_errors_exit_1() {
    // seeds are mandatory
    assert_eq!(code(&run(&["gen", "--levels", "1", "--m", "12"])), 1);
    assert_eq!(code(&run(&["frobnicate"])), 1);
    assert_eq!(code(&run(&["--help"])), 0);
    assert_eq!(code(&run(&["gen", "--levels", "1", "--m", "11", "--seed", "1"])), 1);
    assert_eq!(code(&run(&["stats", "/nonexistent/file.json"])), 1);
    assert_eq!(code(&run(&["--jobs", "0", "stats", "/nonexistent"])), 1);
}
