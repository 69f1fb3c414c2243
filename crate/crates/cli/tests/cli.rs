use std::fs;
use std::path::{Path, PathBuf};
use std::process::{Command, Output};

use tempfile::TempDir;

const FIXTURES: &str = concat!(env!("CARGO_MANIFEST_DIR"), "/../core/tests/fixtures");

fn pathlab(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_pathlab"))
        .args(args)
        .env_remove("PATHLAB_THREADS")
        .output()
        .unwrap()
}

fn stdout(o: &Output) -> String {
    String::from_utf8_lossy(&o.stdout).into_owned()
}

fn write_map(dir: &Path, name: &str, rows: &[&str]) -> PathBuf {
    let path = dir.join(name);
    let text = format!(
        "type octile\nheight {}\nwidth {}\nmap\n{}\n",
        rows.len(),
        rows[0].len(),
        rows.join("\n")
    );
    fs::write(&path, text).unwrap();
    path
}

fn open3(dir: &Path) -> String {
    write_map(dir, "open3.map", &["...", "...", "..."]).to_string_lossy().into_owned()
}

fn line<'a>(text: &'a str, key: &str) -> &'a str {
    text.lines()
        .find_map(|l| l.strip_prefix(key).map(str::trim))
        .unwrap_or_else(|| panic!("no `{key}` line in:\n{text}"))
}

#[test]
fn embed_single_cell_map_has_no_dimensions() {
    let dir = TempDir::new().unwrap();
    let map = write_map(dir.path(), "one.map", &["."]);
    let out = dir.path().join("one.emb");
    let o = pathlab(&["embed", "--map", map.to_str().unwrap(), "--out", out.to_str().unwrap()]);
    assert!(o.status.success(), "{o:?}");
    assert!(stdout(&o).contains("0 dimensions"));
    assert_eq!(fs::read_to_string(out).unwrap(), "FASTMAP-EMBED v1\nnodes 1 dims 0\n\n");
}

#[test]
fn embed_open_grid_prints_span() {
    let dir = TempDir::new().unwrap();
    let map = open3(dir.path());
    let out = dir.path().join("e.txt");
    let o = pathlab(&[
        "embed", "--map", &map, "--kmax", "1", "--neighborhood", "four", "--out", out.to_str().unwrap(),
    ]);
    assert!(o.status.success(), "{o:?}");
    assert!(line(&stdout(&o), "dim 1:").starts_with("d_ab 4.000000"));
    let text = fs::read_to_string(out).unwrap();
    assert!(text.starts_with("FASTMAP-EMBED v1\nnodes 9 dims 1\nspan "));
}

#[test]
fn solve_trivial_and_corner_queries() {
    let dir = TempDir::new().unwrap();
    let map = open3(dir.path());
    let o = pathlab(&["solve", "--map", &map, "--start", "1,1", "--goal", "1,1"]);
    assert!(o.status.success());
    let s = stdout(&o);
    assert_eq!((line(&s, "cost"), line(&s, "length")), ("0", "1"));

    let zero = pathlab(&["solve", "--map", &map, "--neighborhood", "four", "--start", "0,0", "--goal", "2,2"]);
    assert!(zero.status.success());
    let zs = stdout(&zero);
    assert_eq!(line(&zs, "cost"), "4");
    assert_eq!(line(&zs, "path").split(' ').count(), 5);

    let fm = pathlab(&[
        "solve", "--map", &map, "--neighborhood", "four", "--start", "0,0", "--goal", "2,2", "--heuristic", "FM(3)",
    ]);
    assert!(fm.status.success());
    let fs_ = stdout(&fm);
    assert_eq!(line(&fs_, "cost"), "4");
    let (ez, ef): (usize, usize) = (line(&zs, "expanded").parse().unwrap(), line(&fs_, "expanded").parse().unwrap());
    eprintln!("expansions: ZERO {ez}, FM(3) {ef}");
}

#[test]
fn solve_with_saved_artifacts() {
    let dir = TempDir::new().unwrap();
    let map = write_map(dir.path(), "r.map", &["......", ".@@@@.", "......", ".@....", "......"]);
    let map = map.to_str().unwrap();
    let emb = dir.path().join("r.emb");
    let piv = dir.path().join("r.piv");
    assert!(pathlab(&["embed", "--map", map, "--kmax", "4", "--out", emb.to_str().unwrap()]).status.success());
    let p = pathlab(&["pivots", "--map", map, "--pivots", "3", "--out", piv.to_str().unwrap()]);
    assert!(p.status.success());
    assert!(fs::read_to_string(&piv).unwrap().starts_with("DIFFH v1\nnodes 25 pivots 3\n"));

    let base = pathlab(&["solve", "--map", map, "--start", "0,0", "--goal", "5,4", "--heuristic", "OCT"]);
    let o = pathlab(&[
        "solve", "--map", map, "--start", "0,0", "--goal", "5,4", "--heuristic", "MAX(FM(4),DH(3))",
        "--embedding", emb.to_str().unwrap(), "--pivot-table", piv.to_str().unwrap(),
    ]);
    assert!(o.status.success(), "{o:?}");
    assert_eq!(line(&stdout(&o), "cost"), line(&stdout(&base), "cost"));

    let too_many = pathlab(&[
        "solve", "--map", map, "--start", "0,0", "--goal", "5,4", "--heuristic", "DH(5)",
        "--pivot-table", piv.to_str().unwrap(),
    ]);
    assert_eq!(too_many.status.code(), Some(1));
}

#[test]
fn solve_exit_codes() {
    let dir = TempDir::new().unwrap();
    let split = write_map(dir.path(), "split.map", &["..@..", "..@.."]);
    let split = split.to_str().unwrap();
    let o = pathlab(&["solve", "--map", split, "--start", "0,0", "--goal", "4,1"]);
    assert_eq!(o.status.code(), Some(3));
    assert_eq!(line(&stdout(&o), "cost"), "inf");

    let blocked = pathlab(&["solve", "--map", split, "--start", "2,0", "--goal", "4,1"]);
    assert_eq!(blocked.status.code(), Some(1));
    assert!(String::from_utf8_lossy(&blocked.stderr).contains("blocked"));

    let outside = pathlab(&["solve", "--map", split, "--start", "9,9", "--goal", "4,1"]);
    assert_eq!(outside.status.code(), Some(1));

    let missing = pathlab(&["solve", "--map", "/nonexistent.map", "--start", "0,0", "--goal", "0,0"]);
    assert_eq!(missing.status.code(), Some(1));

    let man = pathlab(&["solve", "--map", split, "--start", "0,0", "--goal", "1,1", "--heuristic", "MAN"]);
    assert_eq!(man.status.code(), Some(1));
}

#[test]
fn solve_rejects_artifacts_for_another_map() {
    let dir = TempDir::new().unwrap();
    let small = open3(dir.path());
    let big = write_map(dir.path(), "big.map", &["....", "....", "...."]);
    let emb = dir.path().join("s.emb");
    assert!(pathlab(&["embed", "--map", &small, "--kmax", "2", "--out", emb.to_str().unwrap()]).status.success());
    let o = pathlab(&[
        "solve", "--map", big.to_str().unwrap(), "--start", "0,0", "--goal", "3,2", "--heuristic", "FM(2)",
        "--embedding", emb.to_str().unwrap(),
    ]);
    assert_eq!(o.status.code(), Some(1));
    assert!(String::from_utf8_lossy(&o.stderr).contains("different map"));
}

#[test]
fn bad_heuristic_spec_is_a_usage_error() {
    let dir = TempDir::new().unwrap();
    let map = open3(dir.path());
    let o = pathlab(&["solve", "--map", &map, "--start", "0,0", "--goal", "1,1", "--heuristic", "FM(x)"]);
    assert!(!o.status.success());
    assert_ne!(o.status.code(), Some(3));
}

#[test]
fn bench_single_instance_to_stdout() {
    let dir = TempDir::new().unwrap();
    let map = open3(dir.path());
    let o = pathlab(&["bench", "--map", &map, "--instances", "1"]);
    assert!(o.status.success(), "{o:?}");
    let csv = stdout(&o);
    assert_eq!(csv.lines().count(), 2);
    assert!(csv.starts_with("instance,start_x,start_y,goal_x,goal_y,cost,FM(10)_expanded,"));
    assert!(String::from_utf8_lossy(&o.stderr).contains("swamp cells: blocked"));
}

#[test]
fn bench_writes_reports_and_is_deterministic() {
    let dir = TempDir::new().unwrap();
    let a = write_map(dir.path(), "a.map", &["........", ".@@@@@@.", "........", "@@@@@@..", "........"]);
    let b = open3(dir.path());
    let run = |out: &Path, threads: &str| {
        Command::new(env!("CARGO_BIN_EXE_pathlab"))
            .args([
                "bench", "--map", a.to_str().unwrap(), "--map", &b, "--instances", "25", "--seed", "5",
                "--heuristic", "OCT", "--heuristic", "FM(2)", "--heuristic", "MAX(FM(1),DH(1))", "--sweep", "1..2",
                "--out", out.to_str().unwrap(),
            ])
            .env("PATHLAB_THREADS", threads)
            .output()
            .unwrap()
    };
    let (o1, o2) = (dir.path().join("r1"), dir.path().join("r2"));
    assert!(run(&o1, "1").status.success());
    assert!(run(&o2, "2").status.success());
    for f in ["a.csv", "a-sweep.csv", "a-summary.txt", "open3.csv"] {
        assert!(o1.join(f).exists(), "{f}");
    }
    assert_eq!(fs::read(o1.join("a.csv")).unwrap(), fs::read(o2.join("a.csv")).unwrap());
    let header = fs::read_to_string(o1.join("a.csv")).unwrap();
    assert!(header.starts_with("instance,start_x,start_y,goal_x,goal_y,cost,OCT_expanded,FM(2)_expanded,FM(1)+DH(1)_expanded\n"));
    assert!(fs::read_to_string(o1.join("a-sweep.csv")).unwrap().starts_with("k,fm_median"));
}

#[test]
fn bench_rejects_bad_thread_setting() {
    let dir = TempDir::new().unwrap();
    let map = open3(dir.path());
    let o = Command::new(env!("CARGO_BIN_EXE_pathlab"))
        .args(["bench", "--map", &map, "--instances", "1"])
        .env("PATHLAB_THREADS", "zero")
        .output()
        .unwrap();
    assert_eq!(o.status.code(), Some(1));
}

#[test]
fn validate_fixture_scenario() {
    let map = format!("{FIXTURES}/arena.map");
    let scen = format!("{FIXTURES}/arena.map.scen");
    let o = pathlab(&["validate-scen", "--map", &map, "--scen", &scen]);
    assert!(o.status.success(), "{o:?}");
    assert!(stdout(&o).contains("7 entries, 0 issues"));

    let dir = TempDir::new().unwrap();
    let bad = dir.path().join("bad.scen");
    let text = fs::read_to_string(&scen).unwrap().replacen("13.41421356", "12.0", 1);
    fs::write(&bad, text).unwrap();
    let o = pathlab(&["validate-scen", "--map", &map, "--scen", bad.to_str().unwrap()]);
    assert_eq!(o.status.code(), Some(1));
    assert!(stdout(&o).contains("entry 0: recorded cost 12"));
}
