use std::path::{Path, PathBuf};
use std::process::Command;

use munj_cli::{alpha_eq_file, parse_str, EXIT_ERROR, EXIT_OK, EXIT_REJECTED};

fn corpus_dir() -> PathBuf {
    PathBuf::from(env!("CARGO_MANIFEST_DIR")).join("corpus")
}

fn corpus_path(name: &str) -> String {
    corpus_dir().join(name).display().to_string()
}

fn all_files() -> Vec<PathBuf> {
    let mut v: Vec<PathBuf> = std::fs::read_dir(corpus_dir())
        .unwrap()
        .map(|e| e.unwrap().path())
        .filter(|p| p.extension().is_some_and(|e| e == "mnj"))
        .collect();
    v.sort();
    v
}

fn run(args: &[&str]) -> (i32, String, String) {
    let mut out = Vec::new();
    let mut err = Vec::new();
    let code = munj_cli::run(std::iter::once("munj").chain(args.iter().copied()), &mut out, &mut err);
    (code, String::from_utf8(out).unwrap(), String::from_utf8(err).unwrap())
}

fn stem(p: &Path) -> String {
    p.file_stem().unwrap().to_string_lossy().into_owned()
}

#[test]
fn printed_files_parse_back_to_the_same_declarations() {
    let mut n = 0;
    for path in all_files() {
        let src = std::fs::read_to_string(&path).unwrap();
        let Ok(file) = parse_str(&src) else { continue };
        let printed = file.to_string();
        let again = parse_str(&printed).unwrap_or_else(|e| panic!("{}: reprint does not parse: {e}\n{printed}", path.display()));
        assert!(alpha_eq_file(&file, &again), "{}: round trip changed the file\n{printed}", path.display());
        n += 1;
    }
    assert!(n >= 10, "only {n} files parsed");
}

#[test]
fn positive_corpus_checks() {
    for path in all_files().iter().filter(|p| !stem(p).starts_with("bad_")) {
        let p = path.display().to_string();
        let (code, out, err) = run(&["check", &p]);
        assert_eq!(code, EXIT_OK, "{p}\n{out}{err}");
        let admitted = out.lines().filter(|l| l.starts_with("admitted ")).count();
        assert!(out.ends_with(&format!("admitted={admitted}\n")), "{p}\n{out}");
    }
}

#[test]
fn each_error_class_has_its_exit_code_and_message() {
    let cases = [
        ("bad_arity.mnj", EXIT_REJECTED, "arity mismatch"),
        ("bad_csu.mnj", EXIT_REJECTED, "branches miss the unifier"),
        ("bad_fuel.mnj", EXIT_ERROR, "fuel exhausted"),
        ("bad_muwrap_raw.mnj", EXIT_REJECTED, "no measure strictly decreases"),
        ("bad_nonmono.mnj", EXIT_REJECTED, "occurs negatively"),
        ("bad_parse.mnj", EXIT_ERROR, "expected a term"),
        ("bad_proof.mnj", EXIT_REJECTED, "expected p (s 0), found p 0"),
        ("bad_recursive.mnj", EXIT_REJECTED, "neither x nor a subterm"),
        ("bad_rule.mnj", EXIT_REJECTED, "unbound name `y`"),
        ("bad_type.mnj", EXIT_REJECTED, "type mismatch"),
        ("bad_unbound.mnj", EXIT_REJECTED, "unbound hypothesis `h`"),
    ];
    let listed: Vec<&str> = cases.iter().map(|c| c.0).collect();
    for path in all_files() {
        let name = path.file_name().unwrap().to_string_lossy().into_owned();
        if name.starts_with("bad_") && name != "bad_loop.mnj" {
            assert!(listed.contains(&name.as_str()), "{name} has no expectation");
        }
    }
    for (file, code, msg) in cases {
        let (c, out, err) = run(&["check", &corpus_path(file)]);
        assert_eq!(c, code, "{file}\n{out}{err}");
        assert!(err.contains(msg), "{file}: stderr lacks `{msg}`:\n{err}");
        assert!(out.contains("RESULT fail"), "{file}\n{out}");
    }
}

#[test]
fn parse_errors_point_at_the_offending_token() {
    let (_, _, err) = run(&["check", &corpus_path("bad_parse.mnj")]);
    // `rewrite ~> 0` on line 6, with `~>` in column 9.
    assert!(err.contains("bad_parse.mnj:6:9: error:"), "{err}");
    let e = parse_str("sort nat\nconst 0 : nat\nrewrite ~> r\n").unwrap_err();
    assert_eq!((e.pos.line, e.pos.col), (3, 9));
}

#[test]
fn looping_proofs_stop_on_fuel() {
    let f = corpus_path("bad_loop.mnj");
    let (c, out, _) = run(&["check", &f]);
    assert_eq!(c, EXIT_OK, "{out}");
    let (c, _, err) = run(&["normalize", &f, "--theorem", "omega"]);
    assert_eq!(c, EXIT_ERROR);
    assert!(err.contains("fuel exhausted"), "{err}");
    let (c, _, err) = run(&["normalize", &corpus_path("recursor.mnj"), "--theorem", "rec_two", "--fuel", "10"]);
    assert_eq!(c, EXIT_ERROR, "{err}");
}

#[test]
fn normalize_reports_steps_and_the_normal_form() {
    let (c, out, _) = run(&["normalize", &corpus_path("nat.mnj"), "--theorem", "beta_detour", "--trace", "--debug-subject-reduction"]);
    assert_eq!(c, EXIT_OK);
    let lines: Vec<&str> = out.lines().collect();
    assert_eq!(lines[0], "step 1: imp-beta at root (size 6)");
    assert!(lines.contains(&"NORMAL pair h unit"), "{out}");
    assert!(lines.contains(&"STEPS 2"), "{out}");
    let (c, _, err) = run(&["normalize", &corpus_path("nat.mnj"), "--theorem", "nope"]);
    assert_eq!(c, EXIT_ERROR);
    assert!(err.contains("no theorem named `nope`"));
}

#[test]
fn trust_report_lists_every_assumption() {
    let (c, out, _) = run(&["admit", &corpus_path("noncon.mnj"), "--trust-report"]);
    assert_eq!(c, EXIT_OK);
    let start = out.find("TRUST BEGIN").expect("report");
    let end = out.find("TRUST END").expect("report end");
    let body: Vec<&str> = out[start..end].lines().skip(1).collect();
    assert_eq!(
        body,
        [
            "  admitted-recursive-definition a",
            "  assumed-coherent a rule: a (0 * x) ~> b x",
            "  assumed-confluent",
            "  assumed-terminating"
        ]
    );
    let (_, out, _) = run(&["check", &corpus_path("bad_loop.mnj"), "--trust-report"]);
    assert!(out.contains("  unchecked-atom-rule a ~> a => bot"), "{out}");
}

#[test]
fn several_files_are_checked_together() {
    let files = ["nat.mnj", "red.mnj", "equality.mnj"].map(corpus_path);
    let mut args = vec!["check"];
    args.extend(files.iter().map(|s| s.as_str()));
    let (c, out, _) = run(&args);
    assert_eq!(c, EXIT_OK);
    assert!(out.ends_with("RESULT ok theorems=18 admitted=1\n"), "{out}");
    let bad = corpus_path("bad_proof.mnj");
    args.push(&bad);
    let (c, out, _) = run(&args);
    assert_eq!(c, EXIT_REJECTED);
    assert!(out.ends_with("RESULT fail theorems=18 admitted=1 failed=1\n"), "{out}");
}

#[test]
fn subst_needs_a_single_unifier_in_the_constructor_fragment() {
    let head = "sort nat\nconst 0 : nat\nconst s : nat -> nat\nconst + : nat -> nat -> nat\nrewrite 0 + y ~> y\npred p : nat -> o\n";
    let src = format!("{head}theorem t (x y : nat) (h : x + y = 0) (k : p 0) : p y\nproof\n  subst h in k\nend\n");
    let e = parse_str(&src).unwrap_err();
    assert!(e.msg.contains("constructor fragment"), "{}", e.msg);
    assert_eq!(e.pos.line, 9);
    // No `in` is only allowed when there is nothing to prove.
    let src = format!("{head}theorem t (x : nat) (h : s x = 0) : p x\nproof\n  subst h\nend\n");
    assert!(parse_str(&src).is_ok());
    let src = format!("{head}theorem t (x : nat) (h : s x = s 0) : p x\nproof\n  subst h\nend\n");
    assert!(parse_str(&src).unwrap_err().msg.contains("needs `in`"));
}

#[test]
fn usage_errors_and_help() {
    let (c, _, err) = run(&["check"]);
    assert_eq!(c, EXIT_ERROR, "{err}");
    let (c, _, _) = run(&["frobnicate"]);
    assert_eq!(c, EXIT_ERROR);
    let (c, out, _) = run(&["--help"]);
    assert_eq!(c, EXIT_OK);
    assert!(out.contains("normalize"));
    let (c, _, err) = run(&["check", "/nonexistent/file.mnj"]);
    assert_eq!(c, EXIT_ERROR);
    assert!(err.contains("/nonexistent/file.mnj: error:"), "{err}");
}

#[test]
fn the_binary_exits_with_the_driver_code() {
    let bin = env!("CARGO_BIN_EXE_munj");
    let ok = Command::new(bin).args(["check", &corpus_path("nat.mnj")]).output().unwrap();
    assert_eq!(ok.status.code(), Some(EXIT_OK));
    let bad = Command::new(bin).args(["check", &corpus_path("bad_proof.mnj")]).output().unwrap();
    assert_eq!(bad.status.code(), Some(EXIT_REJECTED));
    // Deep terms from a long rewrite chain must not overflow the stack.
    let fuel = Command::new(bin).args(["check", &corpus_path("bad_fuel.mnj")]).output().unwrap();
    assert_eq!(fuel.status.code(), Some(EXIT_ERROR), "{}", String::from_utf8_lossy(&fuel.stderr));
}
