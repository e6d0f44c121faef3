use std::path::PathBuf;
use std::process::{Command, Output};

fn scenario(name: &str) -> String {
    PathBuf::from(env!("CARGO_MANIFEST_DIR"))
        .join("../../scenarios")
        .join(name)
        .to_string_lossy()
        .into_owned()
}

fn run(args: &[&str]) -> Output {
    run_env(args, &[])
}

fn run_env(args: &[&str], env: &[(&str, &str)]) -> Output {
    let mut cmd = Command::new(env!("CARGO_BIN_EXE_supertwist"));
    cmd.args(args).env_remove("SUPERTWIST_MAX_EXPR_LEN");
    for (k, v) in env {
        cmd.env(k, v);
    }
    cmd.output().unwrap()
}

fn stdout(o: &Output) -> String {
    String::from_utf8(o.stdout.clone()).unwrap()
}

fn stderr(o: &Output) -> String {
    String::from_utf8(o.stderr.clone()).unwrap()
}

fn compute(file: &str, tensor: &str, args: &str) -> (i32, String) {
    let o = run(&[
        "compute",
        "--scenario",
        &scenario(file),
        "--tensor",
        tensor,
        "--args",
        args,
    ]);
    (o.status.code().unwrap(), stdout(&o).trim_end().to_string())
}

#[test]
fn compute_examples() {
    assert_eq!(
        compute("warped2d.scn", "ricci", "dx,dx"),
        (0, "-h_xx/h".into())
    );
    assert_eq!(
        compute("twisted_even.scn", "connection", "dx,dy"),
        (0, "(h_x/h) d_y".into())
    );
    assert_eq!(compute("flat.scn", "w2", "dx,dy,dx,dy"), (0, "0".into()));
}

#[test]
fn compute_classical_warped_values() {
    assert_eq!(
        compute("warped2d.scn", "connection", "dy,dy"),
        (0, "(-h*h_x) d_x".into())
    );
    assert_eq!(
        compute("warped2d.scn", "curvature", "dx,dy,dy"),
        (0, "(-h*h_xx) d_x".into())
    );
    assert_eq!(
        compute("warped2d.scn", "laplacian", "f(x)"),
        (0, "(f_x*h_x + f_xx*h)/h".into())
    );
    assert_eq!(
        compute("warped2d.scn", "hessian", "h,dy,dy"),
        (0, "h*h_x^2".into())
    );
    assert_eq!(
        compute("warped2d.scn", "divergence", "dx"),
        (0, "h_x/h".into())
    );
    assert_eq!(
        compute("flat.scn", "gradient", "x^2"),
        (0, "(2*x) d_x".into())
    );
}

#[test]
fn function_arguments_may_contain_commas() {
    let (code, out) = compute("twisted_even.scn", "hessian", "h(x,y),dx,dx");
    assert_eq!(code, 0);
    assert_eq!(out, compute("twisted_even.scn", "hessian", "h,dx,dx").1);
}

#[test]
fn compute_rejects_bad_input() {
    assert_eq!(compute("flat.scn", "ricci", "dx").0, 2);
    assert_eq!(compute("flat.scn", "ricci", "dx,dq").0, 2);
    assert_eq!(compute("flat.scn", "torsion", "dx,dy").0, 2);
    assert_eq!(compute("flat.scn", "laplacian", "q").0, 2);
    let o = run(&[
        "compute",
        "--scenario",
        &scenario("degenerate.scn"),
        "--tensor",
        "k",
        "--args",
        "dx,dx,dx",
    ]);
    assert_eq!(o.status.code(), Some(2));
    assert!(stderr(&o).contains("m-n-1"));
}

#[test]
fn compute_json() {
    let o = run(&[
        "compute",
        "--scenario",
        &scenario("warped2d.scn"),
        "--tensor",
        "ricci",
        "--args",
        "dy,dy",
        "--format",
        "json",
    ]);
    assert_eq!(o.status.code(), Some(0));
    let v: serde_json::Value = serde_json::from_slice(&o.stdout).unwrap();
    assert_eq!(v["value"], "-h*h_xx");
    assert_eq!(v["tensor"], "ricci");
    assert_eq!(v["args"], serde_json::json!(["dy", "dy"]));
}

#[test]
fn verify_flat_passes() {
    let o = run(&["verify", "--scenario", &scenario("flat.scn")]);
    assert_eq!(o.status.code(), Some(0));
    let out = stdout(&o);
    assert!(
        out.contains("summary: 22 passed, 0 failed, 0 reported"),
        "{out}"
    );
    let o = run(&[
        "verify",
        "--scenario",
        &scenario("flat.scn"),
        "--fail-on",
        "any-claim",
    ]);
    assert_eq!(o.status.code(), Some(0));
}

#[test]
fn report_tier_failure_respects_policy() {
    let args = [
        "verify",
        "--scenario",
        &scenario("super12.scn"),
        "--claims",
        "T3.4.3",
    ];
    let o = run(&args);
    assert_eq!(o.status.code(), Some(0));
    let mut strict = args.to_vec();
    strict.extend(["--fail-on", "any-claim"]);
    let o = run(&strict);
    assert_eq!(o.status.code(), Some(1));
    let out = stdout(&o);
    assert!(out.contains("T3.4.3"));
    assert!(out.contains("residual: "), "{out}");
}

#[test]
fn must_pass_failure_exits_one() {
    let o = run(&["verify", "--scenario", &scenario("super12.scn")]);
    assert_eq!(o.status.code(), Some(1));
    assert!(stdout(&o).contains("FAIL"));
}

#[test]
fn input_errors_exit_two() {
    let o = run(&["verify", "--scenario", &scenario("bad_twist.scn")]);
    assert_eq!(o.status.code(), Some(2));
    let err = stderr(&o);
    assert!(err.contains("line 17"), "{err}");
    assert!(err.contains("even"), "{err}");

    let o = run(&["verify", "--scenario", &scenario("single_odd.scn")]);
    assert_eq!(o.status.code(), Some(2));

    let o = run(&["verify", "--scenario", &scenario("missing.scn")]);
    assert_eq!(o.status.code(), Some(2));

    let o = run(&[
        "verify",
        "--scenario",
        &scenario("flat.scn"),
        "--claims",
        "T9",
    ]);
    assert_eq!(o.status.code(), Some(2));

    let o = run(&[
        "verify",
        "--scenario",
        &scenario("flat.scn"),
        "--format",
        "xml",
    ]);
    assert_eq!(o.status.code(), Some(2));

    let o = run_env(
        &["verify", "--scenario", &scenario("flat.scn")],
        &[("SUPERTWIST_MAX_EXPR_LEN", "lots")],
    );
    assert_eq!(o.status.code(), Some(2));
}

#[test]
fn json_report_schema_and_determinism() {
    let args = [
        "verify",
        "--scenario",
        &scenario("twisted_even.scn"),
        "--format",
        "json",
    ];
    let a = run(&args);
    let b = run(&args);
    assert_eq!(a.stdout, b.stdout);
    let v: serde_json::Value = serde_json::from_slice(&a.stdout).unwrap();
    assert_eq!(v["scenario"], "twisted_even.scn");
    let claims = v["claims"].as_array().unwrap();
    assert_eq!(claims.len(), 22);
    assert_eq!(claims[0]["id"], "L3.1.1");
    assert_eq!(claims[0]["tier"], "MUST-PASS");
    let case = &claims[0]["cases"][0];
    assert_eq!(case["frames"], serde_json::json!(["dx", "dx"]));
    assert_eq!(case["residual"], "0");
    assert_eq!(case["pass"], true);
    assert_eq!(v["summary"]["failed"], 0);
    assert_eq!(v["summary"]["reported"], 3);
}

#[test]
fn text_residuals_are_cut() {
    let args = [
        "verify",
        "--scenario",
        &scenario("super12.scn"),
        "--claims",
        "T3.4.5",
    ];
    let o = run_env(&args, &[("SUPERTWIST_MAX_EXPR_LEN", "20")]);
    let out = stdout(&o);
    assert!(out.contains('…'));
    assert!(out.contains("--format json"));
    let o = run_env(&args, &[("SUPERTWIST_MAX_EXPR_LEN", "0")]);
    assert!(!stdout(&o).contains('…'));
    let o = run(&args);
    let out = stdout(&o);
    for line in out.lines().filter(|l| l.contains("residual: ")) {
        let r = line.split("residual: ").nth(1).unwrap();
        assert!(r.chars().count() <= 201);
    }
}
