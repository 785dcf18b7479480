use std::path::PathBuf;
use std::process::{Command, Output};

fn sitecalc(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_sitecalc"))
        .args(args)
        .current_dir(env!("CARGO_MANIFEST_DIR"))
        .output()
        .expect("binary runs")
}

fn stdout(out: &Output) -> String {
    String::from_utf8(out.stdout.clone()).unwrap()
}

fn golden(name: &str) -> String {
    let path: PathBuf = [env!("CARGO_MANIFEST_DIR"), "tests", "golden", name].iter().collect();
    std::fs::read_to_string(path).unwrap()
}

fn assert_golden(args: &[&str], name: &str) {
    let out = sitecalc(args);
    assert_eq!(out.status.code(), Some(0), "{}", String::from_utf8_lossy(&out.stderr));
    assert_eq!(stdout(&out), golden(name), "sitecalc {}", args.join(" "));
}

#[test]
fn epis_match_golden() {
    assert_golden(&["epis", "builtin:walking-arrow"], "epis_walking_arrow.txt");
    assert_golden(&["--format", "structured", "epis", "builtin:walking-arrow"], "epis_walking_arrow.structured");
}

#[test]
fn coherent_topology_matches_golden() {
    assert_golden(&["topology", "--coverage", "coherent", "builtin:skeleton:2"], "topology_coherent_skeleton_2.txt");
    assert_golden(
        &["--format", "structured", "topology", "--coverage", "coherent", "builtin:skeleton:2"],
        "topology_coherent_skeleton_2.structured",
    );
}

#[test]
fn check_paper_matches_golden() {
    assert_golden(&["check-paper", "--all", "builtin:skeleton:2"], "check_paper_skeleton_2.txt");
    assert_golden(
        &["--format", "structured", "check-paper", "--all", "builtin:skeleton:2"],
        "check_paper_skeleton_2.structured",
    );
}

#[test]
fn check_paper_output_does_not_depend_on_jobs() {
    let one = stdout(&sitecalc(&["check-paper", "--jobs", "1", "builtin:skeleton:2"]));
    let four = stdout(&sitecalc(&["check-paper", "--jobs", "4", "builtin:skeleton:2"]));
    assert_eq!(one, four);
}

#[test]
fn check_paper_selects_suites() {
    let out = sitecalc(&["check-paper", "--prop", "category-laws", "builtin:skeleton:2"]);
    assert_eq!(out.status.code(), Some(0));
    let text = stdout(&out);
    assert!(text.starts_with("PASS category-laws"), "{text}");
    assert_eq!(text.lines().count(), 2);
    let list = stdout(&sitecalc(&["check-paper", "--list", "builtin:skeleton:2"]));
    assert_eq!(list.lines().count(), 18);
}

#[test]
fn exit_codes_follow_the_verdict() {
    let data = "tests/data/arrow_pshf.fincat";
    let q = sitecalc(&["sheaf", "--presheaf", "Q", "--topology", "K", data]);
    assert_eq!(q.status.code(), Some(0));
    let p = sitecalc(&["sheaf", "--presheaf", "P", "--topology", "K", data]);
    assert_eq!(p.status.code(), Some(1));
    assert!(stdout(&p).contains("not a sheaf"));
    assert_eq!(sitecalc(&["predicates", "builtin:skeleton:1"]).status.code(), Some(1));
    assert_eq!(sitecalc(&["predicates", "builtin:skeleton:2"]).status.code(), Some(0));
    assert_eq!(sitecalc(&["validate", "tests/data/arrow.fincat"]).status.code(), Some(0));
}

#[test]
fn errors_exit_with_two() {
    for args in [
        vec!["validate", "tests/data/missing.fincat"],
        vec!["validate", "builtin:nothing"],
        vec!["sheaf", "--presheaf", "Z", "tests/data/arrow_pshf.fincat"],
        vec!["no-such-command"],
        vec!["topology", "builtin:skeleton:2"],
    ] {
        let out = sitecalc(&args);
        assert_eq!(out.status.code(), Some(2), "{args:?}");
        assert!(!out.stderr.is_empty());
    }
}

#[test]
fn emit_round_trips_through_validate() {
    let text = stdout(&sitecalc(&["emit", "builtin:skeleton:2"]));
    let dir = std::env::temp_dir().join(format!("sitecalc-cli-{}", std::process::id()));
    std::fs::create_dir_all(&dir).unwrap();
    let path = dir.join("skeleton.fincat");
    std::fs::write(&path, &text).unwrap();
    let out = sitecalc(&["emit", path.to_str().unwrap()]);
    assert_eq!(stdout(&out), text);
    std::fs::remove_dir_all(dir).unwrap();
}

#[test]
fn transport_accepts_the_skeleton_inclusion() {
    use sitecalc::workbench::doc::emit_functor;
    use sitecalc::workbench::generators::{skeleton_inclusion, standard_sets};

    let dir = std::env::temp_dir().join(format!("sitecalc-transport-{}", std::process::id()));
    std::fs::create_dir_all(&dir).unwrap();
    let run = |n: usize| {
        let path = dir.join(format!("inclusion_{n}.functor"));
        std::fs::write(&path, emit_functor(&skeleton_inclusion(n, &standard_sets()).unwrap())).unwrap();
        let source = format!("builtin:skeleton:{n}");
        sitecalc(&["transport", "--functor", path.to_str().unwrap(), "--max-carrier", "2", &source, "builtin:finset-full"])
    };
    let two = run(2);
    assert_eq!(two.status.code(), Some(0), "{}{}", stdout(&two), String::from_utf8_lossy(&two.stderr));
    let one = run(1);
    assert_eq!(one.status.code(), Some(1), "{}", stdout(&one));
    std::fs::remove_dir_all(dir).unwrap();
}
