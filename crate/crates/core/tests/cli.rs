use std::path::PathBuf;
use std::process::Command;

use locopt::cli::run;

fn data(name: &str) -> String {
    PathBuf::from(env!("CARGO_MANIFEST_DIR"))
        .join("data")
        .join(name)
        .to_string_lossy()
        .into_owned()
}

fn invoke(args: &[&str]) -> (i32, String, String) {
    let mut out = Vec::new();
    let mut err = Vec::new();
    let argv = std::iter::once("locopt").chain(args.iter().copied());
    let code = run(argv, &mut out, &mut err);
    (
        code,
        String::from_utf8(out).unwrap(),
        String::from_utf8(err).unwrap(),
    )
}

fn field(out: &str, name: &str) -> String {
    out.lines()
        .find_map(|l| l.strip_prefix(name).filter(|r| r.starts_with(' ')))
        .map(|r| r.trim().to_string())
        .unwrap_or_else(|| panic!("no field {name} in\n{out}"))
}

#[test]
fn exact_on_line_instance() {
    let (code, out, _) = invoke(&["solve-pmpdc", &data("L.txt"), "--solver", "exact"]);
    assert_eq!(code, 0);
    assert_eq!(field(&out, "objective"), "2");
    assert_eq!(field(&out, "open"), "1 3");
}

#[test]
fn every_pmpdc_solver_agrees_on_line_instance() {
    for solver in ["exact", "grasp", "lagrangian", "bigm"] {
        let (code, out, _) = invoke(&["solve-pmpdc", &data("L.txt"), "--solver", solver]);
        assert_eq!(code, 0, "{solver}");
        assert_eq!(field(&out, "objective"), "2", "{solver}");
    }
}

#[test]
fn feascheck_tight_instance() {
    let (code, out, _) = invoke(&["feascheck", &data("L-tight.txt")]);
    assert_eq!(code, 2);
    assert_eq!(field(&out, "p_min"), "4");
    let (code, _, _) = invoke(&["feascheck", &data("L-tight.txt"), "--p", "4"]);
    assert_eq!(code, 0);
}

#[test]
fn infeasible_solves_exit_two() {
    for solver in ["exact", "grasp", "bigm", "lagrangian"] {
        let (code, out, _) = invoke(&["solve-pmpdc", &data("L-tight.txt"), "--solver", solver]);
        assert_eq!(code, 2, "{solver}");
        assert!(
            field(&out, "witness").contains("4 sites"),
            "{solver}: {out}"
        );
    }
}

#[test]
fn committee_q() {
    let (code, out, _) = invoke(&["solve-committee", &data("Q.txt"), "--k", "1"]);
    assert_eq!(code, 0);
    assert_eq!(field(&out, "objective"), "2");
    let (_, out, _) = invoke(&["solve-committee", &data("Q.txt"), "--rule", "minisum"]);
    assert_eq!(field(&out, "committee"), "100");
    assert_eq!(field(&out, "objective"), "3");
    let (_, out, _) = invoke(&["solve-committee", &data("Q.txt"), "--k", "2", "--heuristic"]);
    assert_eq!(field(&out, "objective"), "3");
}

#[test]
fn sensors_and_field_csv() {
    let dir = tempfile::tempdir().unwrap();
    let field_path = dir.path().join("field.csv");
    let (code, out, err) = invoke(&[
        "solve-sensors",
        &data("blade.txt"),
        "--criterion",
        "max-area",
        "--resolution",
        "0.05",
        "--field",
        field_path.to_str().unwrap(),
    ]);
    assert_eq!(code, 0, "{err}");
    let area: f64 = field(&out, "objective").parse().unwrap();
    assert!(area > 0.0 && area <= 1.5 + 1e-12);
    let csv = std::fs::read_to_string(field_path).unwrap();
    assert!(csv.starts_with("x,y,eccentricity\n"));
    assert_eq!(csv.lines().count(), 1 + 61 * 21);
}

#[test]
fn input_errors_exit_four() {
    assert_eq!(invoke(&["--no-such-flag"]).0, 4);
    assert_eq!(invoke(&["solve-pmpdc"]).0, 4);
    assert_eq!(invoke(&["solve-pmpdc", "/nonexistent/file"]).0, 4);
    assert_eq!(invoke(&["solve-pmpdc", &data("Q.txt")]).0, 4);
    let (code, _, err) = invoke(&["solve-pmpdc", &data("L.txt"), "--p", "9"]);
    assert_eq!(code, 4);
    assert!(err.starts_with("error:"));
}

#[test]
fn budget_exit_three() {
    let (code, _, err) = invoke(&["solve-pmpdc", &data("L.txt"), "--budget", "2"]);
    assert_eq!(code, 3, "{err}");
}

#[test]
fn gen_round_trips_through_solver() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("g.txt");
    let p = path.to_str().unwrap();
    let (code, _, _) = invoke(&[
        "gen",
        "pmpdc",
        "--n",
        "9",
        "--p",
        "3",
        "--quantile",
        "1",
        "--seed",
        "4",
        "--out",
        p,
    ]);
    assert_eq!(code, 0);
    let (code, out, _) = invoke(&["solve-pmpdc", p, "--format", "csv"]);
    assert_eq!(code, 0);
    assert!(out.starts_with("solver,p,status,objective,open,assignment\nexact,3,feasible,"));
}

#[test]
fn bench_outputs_and_summary() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = dir.path().join("cfg.json");
    std::fs::write(
        &cfg,
        r#"{"seed": 9, "pmpdc": {"instances": 3, "n": [6, 8]}, "committee": {"profiles": 2}, "solvers": ["exact", "grasp", "committee-exact"]}"#,
    )
    .unwrap();
    let summary = dir.path().join("summary.json");
    let args = [
        "bench",
        "--config",
        cfg.to_str().unwrap(),
        "--format",
        "csv",
        "--summary",
        summary.to_str().unwrap(),
    ];
    let (code, out, err) = invoke(&args);
    assert_eq!(code, 0, "{err}");
    assert!(out.starts_with("instance,solver,status,value,reference,gap,wall_ms,seed,detail\n"));
    assert_eq!(out.lines().count(), 1 + 3 * 2 + 2 * 3);
    let json: serde_json::Value =
        serde_json::from_str(&std::fs::read_to_string(&summary).unwrap()).unwrap();
    assert_eq!(json["config"]["seed"], 9);
    assert_eq!(json["per_solver"]["exact"]["runs"], 3);
    assert_eq!(invoke(&args).1, out);
}

#[test]
fn binary_output_is_repeatable() {
    let bin = env!("CARGO_BIN_EXE_locopt");
    let once = || {
        Command::new(bin)
            .args(["bench", "--selftest", "--seed", "3"])
            .output()
            .unwrap()
    };
    let (a, b) = (once(), once());
    assert_eq!(a.status.code(), Some(0));
    assert_eq!(a.stdout, b.stdout);
    let (code, ..) = invoke(&["bench", "--selftest", "--seed", "3"]);
    assert_eq!(code, 0);
}
