use std::path::PathBuf;
use std::process::{Command, Output};

use tempfile::TempDir;

fn castcalc(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_castcalc"))
        .args(args)
        .env_remove("GG_COLOR")
        .output()
        .expect("binary runs")
}

fn code(o: &Output) -> i32 {
    o.status.code().expect("exited normally")
}

fn stdout(o: &Output) -> String {
    String::from_utf8_lossy(&o.stdout).into_owned()
}

struct Files(TempDir);

impl Files {
    fn new() -> Files {
        Files(tempfile::tempdir().unwrap())
    }

    fn put(&self, name: &str, text: &str) -> String {
        let p: PathBuf = self.0.path().join(name);
        std::fs::write(&p, text).unwrap();
        p.to_string_lossy().into_owned()
    }
}

#[test]
fn typecheck_exit_codes() {
    let f = Files::new();
    let ok = f.put("ok.gg", "(lam (x : Nat) x)");
    let o = castcalc(&["typecheck", &ok]);
    assert_eq!(code(&o), 0);
    assert_eq!(stdout(&o).trim(), "(-> Nat Nat)");

    let bad = f.put("bad.gg", "((lam (x : Nat) x)\n  true)");
    let o = castcalc(&["typecheck", &bad]);
    assert_eq!(code(&o), 1);
    assert!(String::from_utf8_lossy(&o.stderr).contains("type error"));

    let unparsable = f.put("syntax.gg", "(lam (x : Nat) y)");
    assert_eq!(code(&castcalc(&["typecheck", &unparsable])), 3);
    assert_eq!(code(&castcalc(&["typecheck", "/nonexistent/file.gg"])), 3);
}

#[test]
fn usage_errors_exit_three() {
    assert_eq!(code(&castcalc(&[])), 3);
    assert_eq!(code(&castcalc(&["frobnicate"])), 3);
    assert_eq!(code(&castcalc(&["fuzz", "--pairs", "many"])), 3);
    assert_eq!(code(&castcalc(&["--help"])), 0);
}

#[test]
fn run_reports_outcomes() {
    let f = Files::new();
    let collide = f.put("collide.gg", "(proj Fun (inj Nat (nat 2)))");
    let o = castcalc(&["run", &collide]);
    assert_eq!(code(&o), 0);
    assert_eq!(stdout(&o).trim(), "blame after 1 step");

    let beta = f.put("beta.gg", "((lam (x : Nat) x) (nat 1))");
    let o = castcalc(&["run", &beta, "--trace"]);
    assert_eq!(code(&o), 0);
    let out = stdout(&o);
    let (first, trace) = out.split_once('\n').unwrap();
    assert_eq!(first, "value (nat 1) after 1 step");
    let trace: serde_json::Value = serde_json::from_str(trace).unwrap();
    assert_eq!(trace.as_array().unwrap().len(), 1);

    let omega = f.put(
        "omega.gg",
        "((lam (x : *) ((proj Fun x) x)) (inj Fun (lam (x : *) ((proj Fun x) x))))",
    );
    let o = castcalc(&["run", &omega, "--fuel", "25"]);
    assert_eq!(code(&o), 0);
    assert_eq!(stdout(&o).trim(), "timeout after 25 steps");
}

#[test]
fn cast_compiles_or_refuses() {
    let f = Files::new();
    let id = f.put("id.gg", "(lam (x : Nat) x)");
    let o = castcalc(&["cast", &id, "--from", "(-> Nat Nat)", "--to", "*"]);
    assert_eq!(code(&o), 0);
    assert_eq!(
        stdout(&o).trim(),
        "(inj Fun (lam (x0 : *) (inj Nat ((lam (x1 : Nat) x1) (proj Nat x0)))))"
    );
    let n = f.put("n.gg", "(nat 3)");
    assert_eq!(
        code(&castcalc(&["cast", &n, "--from", "Nat", "--to", "Bool"])),
        1
    );
    assert_eq!(
        code(&castcalc(&["cast", &n, "--from", "Bool", "--to", "*"])),
        1
    );
    assert_eq!(
        code(&castcalc(&["cast", &n, "--from", "Nat", "--to", "Str"])),
        3
    );
}

#[test]
fn prec_finds_derivations() {
    let f = Files::new();
    let less = f.put("less.gg", "(inj Nat (nat 4))");
    let more = f.put("more.gg", "(nat 4)");
    let o = castcalc(&["prec", &less, &more]);
    assert_eq!(code(&o), 0);
    let d: serde_json::Value = serde_json::from_str(&stdout(&o)).unwrap();
    assert_eq!(d["rule"], "inj-L");
    assert_eq!(d["premises"][0]["rule"], "lit");

    let o = castcalc(&["prec", &more, &less]);
    assert_eq!(code(&o), 1);
    assert_eq!(stdout(&o).trim(), "not derivable");
}

#[test]
fn semapprox_three_values() {
    let f = Files::new();
    let blame = f.put("blame.gg", "(blame Nat)");
    let four = f.put("four.gg", "(nat 4)");
    let run = |args: &[&str]| {
        let o = castcalc(args);
        (code(&o), stdout(&o).trim().to_string())
    };
    assert_eq!(
        run(&["semapprox", &four, &four, "--dir", "le", "-k", "3"]),
        (0, "Holds".into())
    );
    assert_eq!(
        run(&["semapprox", &blame, &four, "--dir", "le", "-k", "3"]),
        (1, "Fails".into())
    );
    assert_eq!(
        run(&["semapprox", &blame, &four, "--dir", "ge", "-k", "0"]),
        (0, "Holds".into())
    );
    let (c, _) = run(&[
        "semapprox",
        &four,
        &four,
        "--dir",
        "le",
        "-k",
        "9",
        "--fuel",
        "3",
    ]);
    assert_eq!(c, 3);
    let (c, _) = run(&["semapprox", &four, &four, "--dir", "sideways", "-k", "1"]);
    assert_eq!(c, 3);
}

#[test]
fn fuzz_exit_codes_and_report() {
    let dir = tempfile::tempdir().unwrap();
    let json = dir.path().join("report.json");
    let o = castcalc(&[
        "fuzz",
        "--seed",
        "1",
        "--pairs",
        "100",
        "--json",
        json.to_str().unwrap(),
    ]);
    assert_eq!(code(&o), 0, "{}", stdout(&o));
    assert!(stdout(&o).contains("violation: 0"));
    let report: serde_json::Value =
        serde_json::from_str(&std::fs::read_to_string(&json).unwrap()).unwrap();
    assert_eq!(report["totals"]["violation"], 0);
    assert_eq!(report["pairs"], 100);

    let o = castcalc(&["fuzz", "--seed", "1", "--pairs", "20", "--adversarial"]);
    assert_eq!(code(&o), 2);
    assert!(stdout(&o).contains("violation #0"));
}

#[test]
fn color_is_opt_in() {
    let f = Files::new();
    let collide = f.put("c.gg", "(proj Bool (inj Nat (nat 2)))");
    let plain = castcalc(&["run", &collide]);
    assert!(!stdout(&plain).contains('\x1b'));
    let colored = Command::new(env!("CARGO_BIN_EXE_castcalc"))
        .args(["run", &collide])
        .env("GG_COLOR", "1")
        .output()
        .unwrap();
    assert!(stdout(&colored).contains("\x1b[31mblame"));
}
