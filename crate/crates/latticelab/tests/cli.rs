//! End-to-end checks of the binary: exit codes, output routing, and the
//! documented error classes (1 = parse, 2 = domain).

use std::path::PathBuf;
use std::process::{Command, Output};

fn run(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_latticelab"))
        .args(args)
        .env_remove("LATTICELAB_THREADS")
        .output()
        .expect("binary runs")
}

fn stdout(out: &Output) -> String {
    String::from_utf8(out.stdout.clone()).expect("utf8 stdout")
}

fn stderr(out: &Output) -> String {
    String::from_utf8(out.stderr.clone()).expect("utf8 stderr")
}

fn temp_path(name: &str) -> PathBuf {
    let mut p = std::env::temp_dir();
    p.push(format!("latticelab-test-{}-{name}", std::process::id()));
    p
}

#[test]
fn help_and_version_exit_zero() {
    let help = run(&["--help"]);
    assert_eq!(help.status.code(), Some(0));
    assert!(stdout(&help).contains("latticelab"));
    assert!(stdout(&help).contains("complexity"));

    let version = run(&["--version"]);
    assert_eq!(version.status.code(), Some(0));
    assert!(stdout(&version).contains("latticelab"));
}

#[test]
fn flag_errors_exit_one() {
    let missing = run(&["complexity", "--region", "2x2"]);
    assert_eq!(missing.status.code(), Some(1));
    assert!(stderr(&missing).contains("--config"));

    let unknown = run(&["catalog", "--bogus"]);
    assert_eq!(unknown.status.code(), Some(1));

    let bad_value = run(&[
        "table", "--config", "constant", "--n-max", "two", "--k-max", "2",
    ]);
    assert_eq!(bad_value.status.code(), Some(1));
}

#[test]
fn spec_errors_exit_one_and_name_the_problem() {
    let unknown = run(&["complexity", "--config", "nosuch", "--region", "2x2"]);
    assert_eq!(unknown.status.code(), Some(1));
    assert!(stderr(&unknown).contains("nosuch"));

    let bad_box = run(&[
        "complexity",
        "--config",
        "constant",
        "--region",
        "2x2",
        "--box",
        "16",
    ]);
    assert_eq!(bad_box.status.code(), Some(1));
    assert!(stderr(&bad_box).contains("16"));

    let no_box = run(&[
        "table", "--config", "section2", "--n-max", "2", "--k-max", "2",
    ]);
    assert_eq!(no_box.status.code(), Some(1));
    assert!(stderr(&no_box).contains("--box"));

    let csv = run(&[
        "complexity",
        "--config",
        "constant",
        "--region",
        "2x2",
        "--format",
        "csv",
    ]);
    assert_eq!(csv.status.code(), Some(1));
    assert!(stderr(&csv).contains("json"));
}

#[test]
fn domain_errors_exit_two_and_name_the_bound() {
    let small_k = run(&[
        "dichotomy",
        "--config",
        "stripes:p=2",
        "--n1",
        "2",
        "--k1",
        "1",
        "--m",
        "2",
        "--k",
        "10",
    ]);
    assert_eq!(small_k.status.code(), Some(2));
    assert!(stderr(&small_k).contains("needs k > 14*m*n1*k1 = 56"));

    let huge = run(&[
        "complexity",
        "--config",
        "stripes:p=2",
        "--region",
        "2x2",
        "--box",
        "100000x100000",
    ]);
    assert_eq!(huge.status.code(), Some(2));
    assert!(stderr(&huge).contains("exceeds the enumeration guard"));

    // A huge region must refuse cleanly too, not abort while materializing.
    let huge_region = run(&[
        "complexity",
        "--config",
        "stripes:p=2",
        "--region",
        "100000x100000",
        "--box",
        "2x1",
    ]);
    assert_eq!(huge_region.status.code(), Some(2));
    assert!(stderr(&huge_region).contains("exceeds the enumeration guard"));
}

#[test]
fn threads_flag_and_env_are_validated() {
    let zero = run(&["--threads", "0", "catalog"]);
    assert_eq!(zero.status.code(), Some(1));

    let bad_env = Command::new(env!("CARGO_BIN_EXE_latticelab"))
        .args(["catalog"])
        .env("LATTICELAB_THREADS", "soon")
        .output()
        .expect("binary runs");
    assert_eq!(bad_env.status.code(), Some(1));

    let good_env = Command::new(env!("CARGO_BIN_EXE_latticelab"))
        .args(["catalog"])
        .env("LATTICELAB_THREADS", "2")
        .output()
        .expect("binary runs");
    assert_eq!(good_env.status.code(), Some(0));
}

#[test]
fn output_flag_writes_the_file_instead_of_stdout() {
    let on_stdout = run(&[
        "table",
        "--config",
        "stripes:p=2",
        "--n-max",
        "3",
        "--k-max",
        "3",
        "--format",
        "csv",
    ]);
    assert_eq!(on_stdout.status.code(), Some(0));

    let path = temp_path("table.csv");
    let to_file = run(&[
        "table",
        "--config",
        "stripes:p=2",
        "--n-max",
        "3",
        "--k-max",
        "3",
        "--format",
        "csv",
        "--output",
        path.to_str().unwrap(),
    ]);
    assert_eq!(to_file.status.code(), Some(0));
    assert!(stdout(&to_file).is_empty());
    let written = std::fs::read_to_string(&path).expect("output file");
    assert_eq!(written, stdout(&on_stdout));
    std::fs::remove_file(&path).ok();
}

#[test]
fn grid_files_load_and_missing_files_are_parse_errors() {
    let path = temp_path("pattern.txt");
    std::fs::write(&path, "alphabet: a,b\nabab\nbaba\nabab\n").unwrap();
    let spec = format!("grid:file={}", path.display());
    let out = run(&[
        "complexity",
        "--config",
        &spec,
        "--region",
        "2x2",
        "--box",
        "0:2,0:1",
    ]);
    assert_eq!(out.status.code(), Some(0), "stderr: {}", stderr(&out));
    assert!(stdout(&out).contains("\"count\""));
    std::fs::remove_file(&path).ok();

    let missing = run(&[
        "complexity",
        "--config",
        "grid:file=/nonexistent/pattern.txt",
        "--region",
        "2x2",
        "--box",
        "2x2",
    ]);
    assert_eq!(missing.status.code(), Some(1));
}

#[test]
fn every_subcommand_produces_output() {
    let cases: &[&[&str]] = &[
        &["complexity", "--config", "checkerboard", "--region", "2x2"],
        &[
            "table",
            "--config",
            "checkerboard",
            "--n-max",
            "2",
            "--k-max",
            "2",
        ],
        &[
            "nivat",
            "--config",
            "checkerboard",
            "--n-max",
            "3",
            "--k-max",
            "3",
        ],
        &[
            "entropy",
            "--config",
            "stripes:p=2",
            "--dir",
            "1,0",
            "--t",
            "1",
            "--s",
            "4,8",
        ],
        &[
            "balanced",
            "--config",
            "stripes:p=2",
            "--n1",
            "2",
            "--k1",
            "1",
            "--dir",
            "0,1",
            "--box",
            "8x8",
        ],
        &["generated", "--config", "checkerboard", "--region", "2x2"],
        &[
            "generated",
            "--config",
            "checkerboard",
            "--region",
            "2x2",
            "--point",
            "1,1",
        ],
        &[
            "extend",
            "--region",
            "3x3",
            "--template",
            "2x2",
            "--dir",
            "1,0",
            "--steps",
            "2",
        ],
        &[
            "dichotomy",
            "--config",
            "stripes:p=2",
            "--n1",
            "2",
            "--k1",
            "1",
            "--m",
            "2",
            "--k",
            "60",
        ],
        &[
            "expansive",
            "--config",
            "stripes:p=2",
            "--dir",
            "0,1",
            "--radius",
            "3/2",
            "--window",
            "-2:2,-2:2",
        ],
        &["catalog"],
    ];
    for args in cases {
        let out = run(args);
        assert_eq!(
            out.status.code(),
            Some(0),
            "{:?} failed: {}",
            args,
            stderr(&out)
        );
        let text = stdout(&out);
        assert!(
            text.ends_with('\n'),
            "{args:?} output lacks trailing newline"
        );
        assert!(!text.trim().is_empty(), "{args:?} produced no output");
    }
}

#[test]
fn nivat_csv_lists_low_complexity_rectangles() {
    let out = run(&[
        "nivat",
        "--config",
        "stripes:p=2",
        "--n-max",
        "2",
        "--k-max",
        "2",
        "--format",
        "csv",
    ]);
    assert_eq!(out.status.code(), Some(0));
    let text = stdout(&out);
    let mut lines = text.lines();
    assert_eq!(lines.next(), Some("n,k,count"));
    // P(2,1) = 2 <= 2 and P(2,2) = 2 <= 4; P(1,1) = 2 > 1 is excluded.
    assert!(text.contains("2,1,2"));
    assert!(text.contains("2,2,2"));
    assert!(!text.contains("1,1,2"));
}
