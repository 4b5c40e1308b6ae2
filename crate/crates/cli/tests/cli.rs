use std::path::{Path, PathBuf};
use std::process::{Command, Output};

fn flatfold(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_flatfold")).args(args).env_remove("FLATFOLD_ATLAS_DIR").output().unwrap()
}

fn stdout(o: &Output) -> String {
    String::from_utf8(o.stdout.clone()).unwrap()
}

fn atlas_dir() -> PathBuf {
    Path::new(env!("CARGO_MANIFEST_DIR")).join("../core/atlas")
}

fn group_file(name: &str) -> String {
    atlas_dir().join("groups").join(format!("{name}.grp")).display().to_string()
}

fn scratch_dir(tag: &str) -> PathBuf {
    let d = std::env::temp_dir().join(format!("flatfold-cli-{tag}-{}", std::process::id()));
    let _ = std::fs::remove_dir_all(&d);
    d
}

fn copy_dir(from: &Path, to: &Path) {
    std::fs::create_dir_all(to).unwrap();
    for entry in std::fs::read_dir(from).unwrap() {
        let entry = entry.unwrap();
        if entry.file_type().unwrap().is_dir() {
            copy_dir(&entry.path(), &to.join(entry.file_name()));
        } else {
            std::fs::copy(entry.path(), to.join(entry.file_name())).unwrap();
        }
    }
}

#[test]
fn invariants_of_the_hantzsche_wendt_group() {
    let o = flatfold(&["invariants", &group_file("O3_6")]);
    assert_eq!(o.status.code(), Some(0));
    let text = stdout(&o);
    for line in ["betti: 0", "torsion: 4,4", "holonomy: C2^2", "calabi.structure: C1", "calabi.j_betti: 0"] {
        assert!(text.lines().any(|l| l == line), "missing {line:?} in\n{text}");
    }
}

#[test]
fn torus_betti_number_is_the_dimension() {
    let text = stdout(&flatfold(&["invariants", &group_file("O3_1")]));
    assert!(text.lines().any(|l| l == "betti: 3"));
}

#[test]
fn identify_worked_example() {
    for arg in ["example3".to_string(), group_file("example3")] {
        let o = flatfold(&["identify", &arg]);
        assert_eq!(o.status.code(), Some(0));
        assert_eq!(stdout(&o).trim(), "N4_23");
    }
}

#[test]
fn glnz_class_counts() {
    let o = flatfold(&["classify-glnz", "2"]);
    assert_eq!(o.status.code(), Some(0));
    let text = stdout(&o);
    assert!(text.starts_with("n = 2: 40 finite-order elements"), "{text}");
    assert!(text.contains("7 inverse-pair classes"));
    assert_eq!(text.lines().filter(|l| l.starts_with("class ")).count(), 7);
    assert!(stdout(&flatfold(&["classify-glnz", "1"])).contains("2 inverse-pair classes"));
    assert_eq!(flatfold(&["classify-glnz", "4"]).status.code(), Some(2));
}

#[test]
fn builders_report_the_total_space() {
    let o = flatfold(&["build-circle", "T2", "0 0 | 0 -1 1 0", "4"]);
    assert_eq!(o.status.code(), Some(0));
    assert!(stdout(&o).lines().any(|l| l == "identified: O3_4"));
    let o = flatfold(&["build-interval", "T2", "1/2 0 | 1 0 0 -1", "0 1/2 | -1 0 0 1", "2"]);
    assert_eq!(o.status.code(), Some(0));
    assert!(stdout(&o).lines().any(|l| l == "identified: O3_6"));
}

#[test]
fn exit_codes() {
    // a reflection datum with a fixed point is a hard failure
    let o = flatfold(&["build-interval", "T2", "0 0 | -1 0 0 -1", "1/2 0 | 1 0 0 -1", "2"]);
    assert_eq!(o.status.code(), Some(1));
    assert_eq!(flatfold(&["build-circle", "T2", "0 0 | 2 0 0 1", "2"]).status.code(), Some(2));
    assert_eq!(flatfold(&["invariants", "/nonexistent/group.grp"]).status.code(), Some(2));
    let bad = scratch_dir("bad");
    std::fs::create_dir_all(&bad).unwrap();
    let file = bad.join("bad.grp");
    std::fs::write(&file, "dim 2\ngen 1 0 | 1 0\n").unwrap();
    let o = flatfold(&["invariants", file.to_str().unwrap()]);
    std::fs::remove_dir_all(&bad).unwrap();
    assert_eq!(o.status.code(), Some(2));
    assert_eq!(flatfold(&["no-such-command"]).status.code(), Some(2));
}

#[test]
fn verify_tables_passes_and_counts_rows() {
    let o = flatfold(&["verify-tables", "6", "7"]);
    assert_eq!(o.status.code(), Some(0));
    let text = stdout(&o);
    assert!(text.contains("rows: 14 checked (7 circle, 7 interval), 14 passed, 0 failed"), "{text}");
    assert!(text.contains("unknown: T07 r6 ~ r7 (N3_4, N3_4)"));
    let o = flatfold(&["verify-tables", "--base", "circle", "--no-equivalence"]);
    assert_eq!(o.status.code(), Some(0));
    assert!(stdout(&o).contains("four-dimensional rows: 98 circle, 0 interval"));
}

#[test]
fn strict_mode_fails_on_unknowns() {
    assert_eq!(flatfold(&["verify-tables", "7"]).status.code(), Some(0));
    assert_eq!(flatfold(&["--strict", "verify-tables", "7"]).status.code(), Some(1));
    assert_eq!(flatfold(&["--strict", "verify-tables", "6"]).status.code(), Some(0));
}

#[test]
fn output_is_deterministic() {
    for format in ["text", "tsv", "markdown"] {
        let a = flatfold(&["--format", format, "verify-tables", "6", "7", "23"]);
        let b = flatfold(&["--format", format, "--jobs", "1", "verify-tables", "6", "7", "23"]);
        assert_eq!(a.status.code(), Some(0));
        assert_eq!(a.stdout, b.stdout, "{format}");
    }
}

#[test]
fn emit_tables() {
    let text = stdout(&flatfold(&["emit-tables", "9"]));
    assert!(text.contains("| 1 | N3_3 | K2 | D1 |"), "{text}");
    assert!(text.contains("| K2, K2 | ok |"));
    let text = stdout(&flatfold(&["emit-tables", "22"]));
    assert!(text.contains("O3_4, O3_4"), "{text}");
    let out = scratch_dir("emit");
    let o = flatfold(&["--format", "tsv", "emit-tables", "23", "--out", out.to_str().unwrap()]);
    let written = std::fs::read_to_string(out.join("table-23.tsv"));
    std::fs::remove_dir_all(&out).unwrap();
    assert_eq!(o.status.code(), Some(0));
    assert_eq!(written.unwrap().lines().filter(|l| !l.is_empty()).count(), 3);
}

#[test]
fn atlas_directory_from_the_environment() {
    let dir = scratch_dir("atlas");
    copy_dir(&atlas_dir(), &dir);
    let run = |args: &[&str]| Command::new(env!("CARGO_BIN_EXE_flatfold")).args(args).env("FLATFOLD_ATLAS_DIR", &dir).output().unwrap();
    let good = run(&["verify-tables", "9"]);
    let table = dir.join("tables/table-09.tsv");
    let text = std::fs::read_to_string(&table).unwrap();
    std::fs::write(&table, text.replace("D1", "D2")).unwrap();
    let tampered = run(&["verify-tables", "9"]);
    std::fs::remove_dir_all(&dir).unwrap();
    assert_eq!(good.status.code(), Some(0));
    assert_eq!(tampered.status.code(), Some(2));
    assert!(String::from_utf8_lossy(&tampered.stderr).contains("checksum"));
    let missing = Command::new(env!("CARGO_BIN_EXE_flatfold"))
        .args(["verify-tables", "9"])
        .env("FLATFOLD_ATLAS_DIR", "/nonexistent/atlas")
        .output()
        .unwrap();
    assert_eq!(missing.status.code(), Some(2));
}
