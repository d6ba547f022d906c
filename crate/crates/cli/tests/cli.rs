use std::fs;
use std::path::Path;
use std::process::{Command, Output};
use std::time::Instant;

fn dicke(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_dicke"))
        .args(args)
        .env_remove("DICKE_CACHE_DIR")
        .output()
        .expect("binary runs")
}

fn stderr(out: &Output) -> String {
    String::from_utf8_lossy(&out.stderr).into_owned()
}

fn stdout(out: &Output) -> String {
    String::from_utf8_lossy(&out.stdout).into_owned()
}

fn summary_value(text: &str, key: &str) -> f64 {
    text.lines()
        .find_map(|l| l.strip_prefix(&format!("{key}=")))
        .unwrap_or_else(|| panic!("no {key} in {text}"))
        .parse()
        .unwrap()
}

#[test]
fn sector_without_lambda_is_a_usage_error() {
    let out = dicke(&["sector", "--n", "1000"]);
    assert_eq!(out.status.code(), Some(2));
    let err = stderr(&out);
    assert!(
        err.contains("--lambda") && err.contains("Usage: dicke sector"),
        "{err}"
    );
}

#[test]
fn sector_writes_curve_in_units_of_j() {
    let out = dicke(&[
        "sector",
        "--j-fraction",
        "0.5",
        "--lambda",
        "1.5",
        "--n",
        "100000",
        "--e-min",
        "-2",
        "--e-max",
        "1",
        "--e-step",
        "0.5",
    ]);
    assert_eq!(out.status.code(), Some(0), "{}", stderr(&out));
    let csv = stdout(&out);
    let mut lines = csv.lines();
    assert_eq!(lines.next(), Some("E_over_j,rho,jz_over_j,jx_plus_over_j,beta"));
    let first: Vec<&str> = lines.next().unwrap().split(',').collect();
    assert_eq!(first[0], "-4");
    // E/j > 1 is the plateau 2j
    let last: Vec<&str> = csv.lines().last().unwrap().split(',').collect();
    assert_eq!(last[0], "2");
    assert_eq!(last[1].parse::<f64>().unwrap(), 100_000.0);
}

#[test]
fn subcritical_sector_has_no_order_parameter() {
    let out = dicke(&[
        "sector",
        "--lambda",
        "0.4",
        "--j-fraction",
        "0.1",
        "--n",
        "1000",
        "--e-min",
        "-0.5",
        "--e-max",
        "0.5",
        "--e-step",
        "0.01",
    ]);
    assert_eq!(out.status.code(), Some(0));
    for line in stdout(&out).lines().skip(1) {
        assert_eq!(line.split(',').nth(3), Some("0"), "{line}");
    }
}

#[test]
fn invalid_parameters_exit_2() {
    for args in [
        &["micro", "--lambda", "-1"][..],
        &["micro", "--e-step", "0"],
        &["canonical", "--beta-min", "0"],
        &["sector", "--lambda", "1.5", "--omega", "2"],
        &["diag", "--bins", "0"],
    ] {
        let out = dicke(args);
        assert_eq!(out.status.code(), Some(2), "{args:?}: {}", stderr(&out));
    }
}

#[test]
fn numerical_failure_exits_3() {
    // no thermal transition means no reference energy for the precursors
    let out = dicke(&["scaling", "--lambda", "0.4", "--ladder", "1000,2000,4000"]);
    assert_eq!(out.status.code(), Some(3), "{}", stderr(&out));
    assert!(stderr(&out).contains("no thermal phase transition"));
}

#[test]
fn compare_reports_critical_point() {
    let out = dicke(&["compare", "--e-min", "-1", "--e-max", "0.5", "--e-step", "0.05"]);
    assert_eq!(out.status.code(), Some(0), "{}", stderr(&out));
    let err = stderr(&out);
    assert!((summary_value(&err, "beta_c") - 0.223144).abs() < 1e-6);
    assert!((summary_value(&err, "e_c_per_atom") + 0.0556).abs() < 1e-4);
    assert!(summary_value(&err, "max_jx_deviation") < 0.01);
    let csv = stdout(&out);
    assert!(csv.starts_with(
        "E_per_N,beta_micro,beta_canonical,jz_micro,jz_canonical,jx_micro_plus,jx_laplace_eps\n"
    ));
    for line in csv.lines().skip(1) {
        let cells: Vec<&str> = line.split(',').collect();
        let e: f64 = cells[0].parse().unwrap();
        // E/N > 0 is out of canonical reach
        if e > 0.0 {
            assert_eq!(&cells[2], &"nan");
            assert_ne!(&cells[3], &"nan");
        } else if e < -0.01 {
            assert_ne!(&cells[2], &"nan");
        }
    }
}

#[test]
fn compare_below_critical_coupling() {
    let out = dicke(&[
        "compare", "--lambda", "0.4", "--e-min", "-0.4", "--e-max", "-0.1", "--e-step", "0.05",
    ]);
    assert_eq!(out.status.code(), Some(0));
    assert!(stderr(&out).contains("no thermal phase transition"));
}

#[test]
fn laplace_and_canonical_curves() {
    let betas = ["--beta-min", "0.1", "--beta-max", "1", "--beta-step", "0.1"];
    for cmd in ["laplace", "canonical"] {
        let mut args = vec![cmd, "--n", "1000"];
        args.extend(betas);
        let out = dicke(&args);
        assert_eq!(out.status.code(), Some(0), "{}", stderr(&out));
        let csv = stdout(&out);
        assert_eq!(csv.lines().count(), 11);
        assert!(csv.lines().nth(1).unwrap().ends_with(cmd));
    }
}

#[test]
fn config_file_with_flag_override() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = dir.path().join("run.cfg");
    fs::write(
        &cfg,
        "# recipe\nlambda = 0.4\nn = 1000\ne_min=-0.5\ne-max = -0.3\ne-step=0.1\n",
    )
    .unwrap();
    let cfg = cfg.to_str().unwrap();
    let from_file = stdout(&dicke(&["micro", "--config", cfg]));
    let direct = stdout(&dicke(&[
        "micro", "--lambda", "0.4", "--n", "1000", "--e-min", "-0.5", "--e-max", "-0.3", "--e-step", "0.1",
    ]));
    assert_eq!(from_file, direct);
    let overridden = stdout(&dicke(&["micro", "--config", cfg, "--lambda", "1.5"]));
    let expected = stdout(&dicke(&[
        "micro", "--lambda", "1.5", "--n", "1000", "--e-min", "-0.5", "--e-max", "-0.3", "--e-step", "0.1",
    ]));
    assert_eq!(overridden, expected);
    assert_ne!(overridden, direct);

    fs::write(dir.path().join("bad.cfg"), "lambda 0.4\n").unwrap();
    let bad = dicke(&["micro", "--config", dir.path().join("bad.cfg").to_str().unwrap()]);
    assert_eq!(bad.status.code(), Some(2));
    assert_eq!(
        dicke(&["micro", "--config", "/nonexistent/run.cfg"])
            .status
            .code(),
        Some(2)
    );
}

#[test]
fn outputs_are_byte_identical_across_runs() {
    let dir = tempfile::tempdir().unwrap();
    let run = |name: &str, threads: &str| {
        let path = dir.path().join(name);
        let out = dicke(&[
            "micro",
            "--n",
            "10000",
            "--e-min",
            "-2",
            "--e-max",
            "0.5",
            "--e-step",
            "0.05",
            "--threads",
            threads,
            "--output",
            path.to_str().unwrap(),
        ]);
        assert_eq!(out.status.code(), Some(0));
        fs::read(path).unwrap()
    };
    let a = run("a.csv", "1");
    assert_eq!(a, run("b.csv", "1"));
    assert_eq!(a, run("c.csv", "4"));
}

#[test]
fn unwritable_output_is_a_config_error() {
    let out = dicke(&["laplace", "--output", "/nonexistent/dir/out.csv"]);
    assert_eq!(out.status.code(), Some(2));
}

fn run_diag(cache: &Path) -> (Output, f64) {
    let start = Instant::now();
    let out = Command::new(env!("CARGO_BIN_EXE_dicke"))
        .args([
            "diag",
            "--n",
            "10",
            "--n-max",
            "100",
            "--epsilon",
            "1e-6",
            "--bins",
            "0.05",
        ])
        .env("DICKE_CACHE_DIR", cache)
        .output()
        .unwrap();
    (out, start.elapsed().as_secs_f64())
}

#[test]
fn diag_second_run_hits_cache() {
    let dir = tempfile::tempdir().unwrap();
    let (first, t_first) = run_diag(dir.path());
    assert_eq!(first.status.code(), Some(0), "{}", stderr(&first));
    assert!(stderr(&first).contains("cached: false"));
    let (second, t_second) = run_diag(dir.path());
    assert!(stderr(&second).contains("cached: true"));
    assert_eq!(first.stdout, second.stdout);
    assert!(t_first > 10.0 * t_second, "{t_first} vs {t_second}");
    let csv = stdout(&first);
    assert!(csv.starts_with("e_per_n_bin_center,jz_per_n,jx_plus_per_n,jx_minus_per_n,count_weighted\n"));
    // ε ≠ 0 splits the ground bin into two ±J_x branches
    let ground: Vec<f64> = csv
        .lines()
        .nth(1)
        .unwrap()
        .split(',')
        .map(|c| c.parse().unwrap())
        .collect();
    assert!(ground[2] > 0.4 && ground[3] < -0.4);
}

#[test]
fn scaling_jz_exponent() {
    let out = dicke(&["scaling", "--observable", "jz"]);
    assert_eq!(out.status.code(), Some(0), "{}", stderr(&out));
    let alpha = summary_value(&stderr(&out), "alpha");
    assert!((alpha - 0.47).abs() <= 0.1, "alpha = {alpha}");
    assert!(summary_value(&stderr(&out), "stderr") >= 0.0);
    assert_eq!(stdout(&out).lines().count(), 6);
}
