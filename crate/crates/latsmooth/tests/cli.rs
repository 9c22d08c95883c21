use std::path::PathBuf;
use std::process::Command;

use latsmooth::cli::run;
use serde_json::Value;
use tempfile::TempDir;

struct Run {
    code: i32,
    out: String,
    err: String,
}

fn latsmooth(args: &[&str]) -> Run {
    let (mut out, mut err) = (Vec::new(), Vec::new());
    let code = run(std::iter::once("latsmooth").chain(args.iter().copied()), &mut out, &mut err);
    Run { code, out: String::from_utf8(out).unwrap(), err: String::from_utf8(err).unwrap() }
}

fn json(r: &Run) -> Value {
    assert_eq!(r.code, 0, "stderr: {}", r.err);
    let body = r.out.lines().next().expect("report line");
    serde_json::from_str(body).unwrap()
}

struct Files {
    dir: TempDir,
}

impl Files {
    fn new() -> Self {
        Files { dir: tempfile::tempdir().unwrap() }
    }

    fn basis(&self, name: &str, text: &str) -> String {
        let p: PathBuf = self.dir.path().join(name);
        std::fs::write(&p, text).unwrap();
        p.to_str().unwrap().to_owned()
    }
}

#[test]
fn eta_of_the_integers() {
    let f = Files::new();
    let z1 = f.basis("z1.txt", "1\n1\n");
    let v = json(&latsmooth(&["eta", "--basis", &z1, "--eps", "0.0864348", "--rtol", "1e-6"]));
    let eta = v["eta"].as_f64().unwrap();
    assert!((eta - 1.0).abs() < 1e-4, "{eta}");
    for key in ["eps", "bracket_lo", "bracket_hi", "rtol", "log_slope", "iterations"] {
        assert!(v.get(key).is_some(), "missing {key}");
    }
}

#[test]
fn overlap_in_one_dimension() {
    let f = Files::new();
    let z1 = f.basis("z1.txt", "1\n1\n");
    let v = json(&latsmooth(&["overlap", "--basis", &z1, "--r", "0.75", "--trials", "1000000", "--seed", "7"]));
    let (mean, hw) = (v["mean"].as_f64().unwrap(), v["halfwidth"].as_f64().unwrap());
    assert!((mean - 2.0 / 3.0).abs() <= hw * 3.29 / 1.96, "{mean} ± {hw}");
    assert_eq!(v["trials"], 1_000_000);
    assert_eq!(v["seed"], 7);
}

#[test]
fn decide_det_prints_verdict_last() {
    let f = Files::new();
    let z1 = f.basis("z1.txt", "# the integers\n1\n1\n");
    let r = latsmooth(&["decide-det", "--basis", &z1, "--epsY", "0.05", "--epsN", "0.13"]);
    assert_eq!(r.out.lines().last(), Some("YES"));
    let v = json(&r);
    assert_eq!(v["verdict"], "YES");
    assert!((v["sum_u"].as_f64().unwrap() - 0.0864).abs() < 1e-3);

    // 2Z has the dense dual (1/2)Z.
    let two_z = f.basis("two.txt", "1\n2\n");
    let r = latsmooth(&["decide-det", "--basis", &two_z, "--epsY", "0.05", "--epsN", "0.13"]);
    assert_eq!(r.out.lines().last(), Some("NO"));
}

#[test]
fn out_of_domain_flags_name_the_flag() {
    let f = Files::new();
    let z2 = f.basis("z2.txt", "2\n1 0\n0 1\n");
    let cases: &[(&[&str], &str)] = &[
        (&["eta", "--basis", &z2, "--eps", "1.5"], "--eps"),
        (&["eta", "--basis", &z2, "--eps", "0.1", "--rtol", "0"], "--rtol"),
        (&["rho", "--basis", &z2, "--s", "-1"], "--s"),
        (&["rho", "--basis", &z2, "--s", "1", "--tol", "0"], "--tol"),
        (&["decide-det", "--basis", &z2, "--epsY", "0.2", "--epsN", "0.1"], "--epsY"),
        (&["decide-bdd", "--basis", &z2, "--epsY", "0.01", "--epsN", "0.4", "--alpha", "0.4"], "--epsY"),
        (&["decide-bdd", "--basis", &z2, "--epsY", "0.001", "--epsN", "0.4", "--alpha", "2"], "--alpha"),
        (&["ggg", "--basis", &z2, "--trials", "0"], "--trials"),
        (&["ggg", "--basis", &z2, "--prover", "bdd", "--alpha", "0.3"], "--eps"),
        (&["voronoi", "--basis", &z2, "--s", "0"], "--s"),
        (&["overlap", "--basis", &z2, "--mode", "sandwich", "--r", "1", "--delta", "0.3"], "--delta"),
        (&["overlap", "--basis", &z2], "--r"),
        (&["overlap", "--basis", &z2, "--mode", "radii", "--eps", "0"], "--eps"),
        (&["commit", "--basis", &z2, "--bit", "2"], "--bit"),
        (&["commit", "--mode", "amplify-plan", "--p", "0.3", "--q", "1.2", "--target", "0.1"], "--q"),
        (&["commit", "--mode", "binding"], "--basis"),
        (&["commit", "--basis", &z2, "--mode", "szk-run", "--plan", "twice:2"], "--plan"),
        (&["coam", "--basis", &z2, "--epsY", "0.05", "--epsN", "0.13", "--alpha", "0"], "--alpha"),
        (
            &["coam", "--basis", &z2, "--epsY", "0.05", "--epsN", "0.13", "--mode", "gs", "--inflate", "0.5"],
            "--inflate",
        ),
        (&["coam", "--basis", &z2, "--epsY", "0.05", "--epsN", "0.13", "--mode", "gs", "--gamma", "2"], "--gamma"),
        (&["--workers", "0", "lambda1", "--basis", &z2], "--workers"),
        (&["ggg", "--basis", &z2, "--seed", "0xzz"], "--seed"),
        (&["eta", "--basis", &z2, "--eps", "abc"], "--eps"),
    ];
    for (args, flag) in cases {
        let r = latsmooth(args);
        assert_eq!(r.code, 1, "{args:?}: {}", r.err);
        assert!(r.err.contains(flag), "{args:?}: {}", r.err);
        assert!(r.out.is_empty(), "{args:?} produced output");
    }
}

#[test]
fn validation_precedes_reading_the_basis() {
    let r = latsmooth(&["eta", "--basis", "/nonexistent/basis.txt", "--eps", "7"]);
    assert_eq!(r.code, 1);
    assert!(r.err.contains("--eps"), "{}", r.err);
}

#[test]
fn bad_basis_files_are_usage_errors() {
    let f = Files::new();
    for (name, text) in [("empty", ""), ("ragged", "2\n1 0\n1\n"), ("singular", "2\n1 0\n0 0\n"), ("word", "1\nx\n")] {
        let p = f.basis(name, text);
        let r = latsmooth(&["lambda1", "--basis", &p]);
        assert_eq!(r.code, 1, "{name}: {}", r.err);
        assert!(r.err.contains("--basis"), "{name}: {}", r.err);
    }
    let r = latsmooth(&["lambda1", "--basis", "/nonexistent/basis.txt"]);
    assert_eq!(r.code, 1);
}

#[test]
fn help_and_version_exit_zero() {
    for args in [&["--help"][..], &["--version"], &["eta", "--help"]] {
        let r = latsmooth(args);
        assert_eq!(r.code, 0, "{args:?}");
        assert!(!r.out.is_empty());
    }
    let help = latsmooth(&["--help"]).out;
    assert!(help.contains("LATSMOOTH_BUDGET"));
    let eta = latsmooth(&["eta", "--help"]).out;
    assert!(eta.contains("[default: 0.000001]"), "{eta}");
    assert_eq!(latsmooth(&[]).code, 1);
    assert_eq!(latsmooth(&["frobnicate"]).code, 1);
}

#[test]
fn budget_comes_from_the_environment() {
    let f = Files::new();
    let z4 = f.basis("z4.txt", "4\n1 0 0 0\n0 1 0 0\n0 0 1 0\n0 0 0 1\n");
    let bin = env!("CARGO_BIN_EXE_latsmooth");
    let with = |budget: Option<&str>| {
        let mut c = Command::new(bin);
        c.args(["lambda1", "--basis", &z4]);
        match budget {
            Some(b) => c.env("LATSMOOTH_BUDGET", b),
            None => c.env_remove("LATSMOOTH_BUDGET"),
        };
        c.output().unwrap()
    };
    let ok = with(None);
    assert_eq!(ok.status.code(), Some(0));
    let tight = with(Some("3"));
    assert_eq!(tight.status.code(), Some(2));
    assert!(String::from_utf8_lossy(&tight.stderr).contains("budget"));
    let bad = with(Some("lots"));
    assert_eq!(bad.status.code(), Some(1));
    assert!(String::from_utf8_lossy(&bad.stderr).contains("LATSMOOTH_BUDGET"));
}

#[test]
fn amplification_failure_is_a_computation_error() {
    let r = latsmooth(&["commit", "--mode", "amplify-plan", "--p", "0.8", "--q", "0.4", "--target", "0.01"]);
    assert_eq!(r.code, 2, "{}", r.err);
}

#[test]
fn reports_do_not_depend_on_worker_count() {
    let f = Files::new();
    let b = f.basis("b.txt", "3\n1 0.3 0\n0 0.9 0.2\n0.1 0 1.2\n");
    let runs: &[&[&str]] = &[
        &["voronoi", "--basis", &b, "--mode", "sandwich", "--trials", "30000", "--seed", "5"],
        &["ggg", "--basis", &b, "--trials", "30000", "--seed", "0x2a", "--format", "csv"],
        &["overlap", "--basis", &b, "--r", "0.4", "--trials", "30000"],
        &["commit", "--basis", &b, "--mode", "binding", "--trials", "10000"],
    ];
    for args in runs {
        let one = latsmooth(&[&["--workers", "1"], *args].concat());
        assert_eq!(one.code, 0, "{}", one.err);
        for w in ["2", "4"] {
            let many = latsmooth(&[&["--workers", w], *args].concat());
            assert_eq!(one.out, many.out, "{args:?} with {w} workers");
        }
    }
}

#[test]
fn csv_schemas() {
    let f = Files::new();
    let z2 = f.basis("z2.txt", "2\n1 0\n0 1\n");
    let r = latsmooth(&["voronoi", "--basis", &z2, "--mode", "sandwich", "--trials", "1000", "--format", "csv"]);
    assert_eq!(r.code, 0);
    let mut lines = r.out.lines();
    assert_eq!(
        lines.next(),
        Some("s,lower,middle_mean,middle_halfwidth,middle_trials,middle_seed,upper,satisfied,status")
    );
    assert_eq!(lines.count(), 1);

    let r = latsmooth(&["szk-sim", "--basis", &z2, "--seed", "3", "--format", "csv"]);
    let lines: Vec<_> = r.out.lines().collect();
    assert_eq!(lines[0], "index,role,type,payload");
    assert_eq!(lines.len(), 3);
    assert!(lines[1].starts_with("0,verifier,point,"));
    assert!(lines[2].starts_with("1,prover,point,"));

    let r = latsmooth(&["coam", "--basis", &z2, "--epsY", "0.05", "--epsN", "0.13", "--format", "csv"]);
    let lines: Vec<_> = r.out.lines().collect();
    assert_eq!(lines[0], "i,count,weight");
    assert_eq!(lines[1].split(',').nth(1), Some("4"));
}

#[test]
fn json_schemas() {
    let f = Files::new();
    let z2 = f.basis("z2.txt", "2\n1 0\n0 1\n");
    let v = json(&latsmooth(&["rho", "--basis", &z2, "--s", "1"]));
    assert!((v["value"].as_f64().unwrap() - 0.18034).abs() < 1e-4);
    assert!(v["tail_bound"].as_f64().unwrap() <= 1e-10);

    let v = json(&latsmooth(&["lambda1", "--basis", &z2]));
    assert_eq!(v["lambda1"], 1.0);

    let v = json(&latsmooth(&["ggg", "--basis", &z2, "--mode", "transcript", "--seed", "9"]));
    assert!(v["outcome"] == "accept" || v["outcome"] == "reject");
    assert_eq!(v["rows"].as_array().unwrap().len(), 2);

    let v = json(&latsmooth(&["commit", "--mode", "amplify-plan", "--p", "0.3", "--q", "0.4", "--target", "0.01"]));
    assert!(v["final_p"].as_f64().unwrap() <= 0.01 && v["final_q"].as_f64().unwrap() <= 0.01);
    assert_eq!(v["rows"].as_array().unwrap().len() as u64, v["steps"].as_u64().unwrap());

    let v = json(&latsmooth(&["overlap", "--basis", &z2, "--mode", "radii", "--eps", "0.2"]));
    assert!(v["r_eps"].as_f64().unwrap() < v["r_upper"].as_f64().unwrap());
}

#[test]
fn coam_verdict_maps_acceptance_to_no() {
    let f = Files::new();
    // Z² at scale 1 has ρ(Z²∖0) ≈ 0.18 > 0.13: a NO instance.
    let z2 = f.basis("z2.txt", "2\n1 0\n0 1\n");
    let r = latsmooth(&["coam", "--basis", &z2, "--mode", "verdict", "--epsY", "0.05", "--epsN", "0.13"]);
    assert_eq!(r.out.lines().last(), Some("NO"));
    assert_eq!(json(&r)["outcome"], "accept");
    // Scaled down by 4 the dual is sparse: a YES instance, and the shells are empty.
    let small = f.basis("small.txt", "2\n0.25 0\n0 0.25\n");
    let r = latsmooth(&["coam", "--basis", &small, "--mode", "verdict", "--epsY", "0.05", "--epsN", "0.13"]);
    assert_eq!(r.out.lines().last(), Some("YES"));
}

#[test]
fn output_file_receives_the_report() {
    let f = Files::new();
    let z1 = f.basis("z1.txt", "1\n1\n");
    let target = f.dir.path().join("report.json");
    let r = latsmooth(&[
        "decide-det",
        "--basis",
        &z1,
        "--epsY",
        "0.05",
        "--epsN",
        "0.13",
        "--output",
        target.to_str().unwrap(),
    ]);
    assert_eq!(r.code, 0);
    assert_eq!(r.out, "YES\n");
    let v: Value = serde_json::from_str(&std::fs::read_to_string(&target).unwrap()).unwrap();
    assert_eq!(v["verdict"], "YES");

    let r = latsmooth(&["lambda1", "--basis", &z1, "--output", "/nonexistent/dir/report.json"]);
    assert_eq!(r.code, 2);
}
