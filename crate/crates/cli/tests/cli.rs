use std::io::Write;
use std::process::{Command, Output, Stdio};

fn isotrope(args: &[&str], session: Option<&str>) -> Output {
    let mut cmd = Command::new(env!("CARGO_BIN_EXE_isotrope"));
    cmd.env_remove("ISOTROPE_CAP");
    if session.is_some() {
        cmd.args(["--session", "-"]);
    }
    cmd.args(args).stdin(Stdio::piped()).stdout(Stdio::piped()).stderr(Stdio::piped());
    let mut child = cmd.spawn().expect("binary runs");
    let mut stdin = child.stdin.take().unwrap();
    stdin.write_all(session.unwrap_or("").as_bytes()).unwrap();
    drop(stdin);
    child.wait_with_output().unwrap()
}

fn stdout(o: &Output) -> String {
    String::from_utf8(o.stdout.clone()).unwrap()
}

fn stderr(o: &Output) -> String {
    String::from_utf8(o.stderr.clone()).unwrap()
}

const SESSION: &str = "param a, b;\nlet D = a*X dX + (2*a*Y + X^2) dY;\nlet S = X dX + 2*Y dY;\nlet m = [X, Y + X^2];\n";

#[test]
fn check_lf_reports_the_minimal_polynomial() {
    let o = isotrope(&["check-lf", "D"], Some(SESSION));
    assert_eq!(o.status.code(), Some(0), "{}", stderr(&o));
    assert!(stdout(&o).contains("minimal polynomial: T^3 - 5*a*T^2 + 8*a^2*T - 4*a^3"));
}

#[test]
fn cap_exceeded_exits_with_three() {
    let o = isotrope(&["check-lf", "X^2 dX", "--cap", "16"], None);
    assert_eq!(o.status.code(), Some(3));
    assert!(stderr(&o).contains("did not stabilize within 16"));
}

#[test]
fn cap_can_come_from_the_environment() {
    let o = Command::new(env!("CARGO_BIN_EXE_isotrope"))
        .args(["check-lf", "X^2 dX"])
        .env("ISOTROPE_CAP", "5")
        .output()
        .unwrap();
    assert_eq!(o.status.code(), Some(3));
    assert!(stderr(&o).contains("within 5 steps"));
}

#[test]
fn parse_errors_exit_with_two_and_a_position() {
    let o = isotrope(&["exp", "D"], Some("param a;\nlet D = X dX +"));
    assert_eq!(o.status.code(), Some(2));
    assert!(stderr(&o).contains("<stdin>:2:14"), "{}", stderr(&o));
    let o = isotrope(&["no-such-command"], None);
    assert_eq!(o.status.code(), Some(2));
}

#[test]
fn isotropy_check_exit_codes() {
    let o = isotrope(&["isotropy-check", "m", "S"], Some(SESSION));
    assert_eq!(o.status.code(), Some(0));
    assert_eq!(stdout(&o).trim(), "commutes");
    let o = isotrope(&["isotropy-check", "[Y, X]", "S"], Some(SESSION));
    assert_eq!(o.status.code(), Some(1));
}

#[test]
fn swap_commutes_with_the_resonant_exponential_only() {
    let s = "param l;\nexp E[l];\nresonate E[l] = 1;\nlet D = l*X dX;\n";
    let o = isotrope(&["exp", "D"], Some(s));
    assert_eq!(stdout(&o).trim(), "[X, Y]");
    let o = isotrope(&["isotropy-check", "[Y, X]", "D", "--exp"], Some(s));
    assert_eq!(o.status.code(), Some(0));
    let o = isotrope(&["isotropy-check", "[Y, X]", "D"], Some(s));
    assert_eq!(o.status.code(), Some(1));
}

#[test]
fn exp_flow_jordan_bracket_conjugate() {
    let o = isotrope(&["exp", "(X^3 - 1) dY"], None);
    assert_eq!(stdout(&o).trim(), "[X, X^3 + Y - 1]");
    let o = isotrope(&["flow", "X dX + 2*Y dY", "-t", "s"], None);
    assert_eq!(stdout(&o).trim(), "[E[s]*X, E[s]^2*Y]");
    let o = isotrope(&["jordan", "X dX + (X + Y) dY"], None);
    assert_eq!(stdout(&o), "semisimple: X dX + Y dY\nnilpotent: X dY\n");
    let o = isotrope(&["bracket", "dX", "X dY"], None);
    assert_eq!(stdout(&o).trim(), "1 dY");
    let o = isotrope(&["conjugate", "affine(0, 1, 1, 0; 0, 0)", "X dY"], None);
    assert_eq!(stdout(&o).trim(), "Y dX");
}

#[test]
fn classify_names_the_normal_form() {
    let o = isotrope(&["classify", "D"], Some(SESSION));
    let out = stdout(&o);
    assert!(out.contains("normal form: type3 a = a, m = 2"), "{out}");
    assert!(out.contains("neither nilpotent nor semisimple"), "{out}");
}

#[test]
fn isotropy_family_describes_and_instantiates() {
    let o = isotrope(
        &["isotropy-family", "--form", "type1", "--params", "f=X^3 - X", "--instance", "alpha=-1, p=X^2"],
        None,
    );
    assert_eq!(o.status.code(), Some(0), "{}", stderr(&o));
    let out = stdout(&o);
    assert!(out.contains("alpha^2 = 1"), "{out}");
    assert!(out.contains("instance: [-X, X^2 - Y]"), "{out}");
    let o = isotrope(
        &["isotropy-family", "--form", "diagonal", "--params", "a=1, b=2", "--member", "[X, Y + X^2]"],
        None,
    );
    assert_eq!(o.status.code(), Some(0));
    assert!(stdout(&o).contains("rho(Y): {(0, 1), (2, 0)}"));
    let o = isotrope(&["isotropy-family", "--form", "type3", "--params", "a=1"], None);
    assert_eq!(o.status.code(), Some(2));
}

#[test]
fn stated_type3_family_is_flagged() {
    let o = isotrope(&["isotropy-family", "--form", "type3", "--params", "a=1, m=2", "--stated"], None);
    let out = stdout(&o);
    assert!(out.contains("[alpha^2*X, alpha*Y + beta*X^2]"), "{out}");
    assert!(out.contains("differ"), "{out}");
}

#[test]
fn affine_symmetries_and_resonances() {
    let o = isotrope(&["affine-symmetries", "--poly", "(X - 1)^3"], None);
    assert_eq!(stdout(&o).trim(), "center = 1; beta = center*(1 - alpha); gamma = alpha^3; alpha free");
    let o = isotrope(&["diag-resonances", "1", "3"], None);
    assert_eq!(stdout(&o), "rho(X): {(1, 0)}\nrho(Y): {(0, 1), (3, 0)}\n");
}

#[test]
fn verify_json_is_reproducible() {
    let args = ["verify", "--suite", "iso-type2", "--seed", "5", "--samples", "6", "--json"];
    let a = stdout(&isotrope(&args, None));
    let b = stdout(&isotrope(&args, None));
    let strip = |s: &str| s.split("\"ms\"").next().unwrap().to_string();
    assert_eq!(strip(&a), strip(&b));
    assert!(a.starts_with("{\"suite\":\"iso-type2\",\"seed\":5,\"samples\":6,\"failures\":[]"), "{a}");
    let o = isotrope(&["verify", "--suite", "nope"], None);
    assert_eq!(o.status.code(), Some(2));
}
