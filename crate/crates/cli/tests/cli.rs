use std::fs;
use std::path::Path;
use std::process::{Command, Output};

use resonator::bench::{brute_force_oracle, Instance, DEFAULT_ORACLE_CAP};

fn resonator(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_resonator"))
        .args(args)
        .env_remove("RESONATOR_PRESETS")
        .env_remove("RUST_LOG")
        .output()
        .expect("binary runs")
}

fn code(o: &Output) -> i32 {
    o.status.code().expect("exited normally")
}

fn stdout(o: &Output) -> String {
    String::from_utf8(o.stdout.clone()).unwrap()
}

fn stderr(o: &Output) -> String {
    String::from_utf8(o.stderr.clone()).unwrap()
}

fn field(out: &str, key: &str) -> String {
    out.lines()
        .find_map(|l| l.strip_prefix(key))
        .unwrap_or_else(|| panic!("no {key} line in {out}"))
        .trim()
        .to_owned()
}

fn indices(s: &str) -> Vec<usize> {
    s.split_whitespace().map(|t| t.parse().unwrap()).collect()
}

fn csv_rows(path: &Path) -> Vec<csv::StringRecord> {
    let mut r = csv::Reader::from_path(path).unwrap();
    assert_eq!(
        r.headers().unwrap().iter().collect::<Vec<_>>().join(","),
        "variant,F,M,D,search_space,trials,accuracy,ci_low,ci_high,mean_iterations,sigma,flip_rate,activation_threshold,convergence_threshold,max_iters,preset_exact"
    );
    r.records().map(Result::unwrap).collect()
}

#[test]
fn factorize_small_instance_matches_oracle() {
    let o = resonator(&[
        "factorize",
        "--variant",
        "brn",
        "-F",
        "2",
        "-M",
        "4",
        "-D",
        "256",
        "--seed",
        "7",
    ]);
    assert_eq!(code(&o), 0, "{}", stderr(&o));
    let out = stdout(&o);
    let decoded = indices(&field(&out, "decoded"));
    assert_eq!(decoded.len(), 2);
    assert_eq!(field(&out, "correct"), "true");

    let inst = Instance::generate(7, 2, 4, 256).unwrap();
    let oracle = brute_force_oracle(&inst.product, &inst.books, DEFAULT_ORACLE_CAP).unwrap();
    assert_eq!(decoded, oracle.indices);
    assert_eq!(indices(&field(&out, "truth")), inst.truth);
}

#[test]
fn factorize_rejects_out_of_range_flip_rate() {
    let o = resonator(&[
        "factorize",
        "--variant",
        "acf",
        "--flip-rate",
        "1.5",
        "-F",
        "2",
        "-M",
        "4",
        "-D",
        "256",
    ]);
    assert_eq!(code(&o), 2);
    let err = stderr(&o);
    assert!(err.contains("flip-rate"), "{err}");
    assert!(err.contains("Usage:"), "{err}");
}

#[test]
fn zero_sigma_imf_decodes_like_brn() {
    for seed in ["1", "7", "12"] {
        let common = [
            "-F",
            "2",
            "-M",
            "8",
            "-D",
            "256",
            "--seed",
            seed,
            "--activation-threshold",
            "0",
        ];
        let brn = resonator(&[&["factorize", "--variant", "brn"][..], &common].concat());
        let imf = resonator(
            &[
                &["factorize", "--variant", "imf", "--sigma", "0"][..],
                &common,
            ]
            .concat(),
        );
        assert_eq!(code(&brn), code(&imf));
        let (b, i) = (stdout(&brn), stdout(&imf));
        assert_eq!(field(&b, "decoded"), field(&i, "decoded"));
        assert_eq!(field(&b, "iterations"), field(&i, "iterations"));
    }
}

#[test]
fn invalid_flags_exit_with_usage_status() {
    assert_eq!(code(&resonator(&["factorize", "--no-such-flag"])), 2);
    assert_eq!(code(&resonator(&["factorize", "--variant", "xyz"])), 2);
    assert_eq!(
        code(&resonator(&[
            "factorize",
            "--variant",
            "brn",
            "-F",
            "2",
            "-D",
            "64"
        ])),
        2
    );
    assert_eq!(
        code(&resonator(&[
            "factorize",
            "--variant",
            "brn",
            "-M",
            "4",
            "-D",
            "64"
        ])),
        2
    );
    let o = resonator(&[
        "factorize",
        "--variant",
        "imf",
        "-F",
        "2",
        "-M",
        "4",
        "-D",
        "64",
        "--sigma=-1",
    ]);
    assert_eq!(code(&o), 2);
    assert!(stderr(&o).contains("sigma"));
}

#[test]
fn help_is_available_per_subcommand() {
    for sub in ["factorize", "sweep", "capacity", "oracle-check", "presets"] {
        let o = resonator(&[sub, "--help"]);
        assert_eq!(code(&o), 0);
        assert!(stdout(&o).contains("Usage: resonator"), "{sub}");
    }
}

#[test]
fn sweep_writes_one_row_per_size() {
    let dir = tempfile::tempdir().unwrap();
    let out = dir.path().join("brn.csv");
    let o = resonator(&[
        "sweep",
        "--variant",
        "brn",
        "-F",
        "2",
        "-D",
        "256",
        "--sizes",
        "16,64",
        "--trials",
        "20",
        "-o",
        out.to_str().unwrap(),
    ]);
    assert_eq!(code(&o), 0, "{}", stderr(&o));
    let rows = csv_rows(&out);
    assert_eq!(rows.len(), 2);
    assert_eq!(&rows[0][4], "16");
    assert_eq!(&rows[1][4], "64");
    assert_eq!(&rows[0][5], "20");
    // Unused parameters stay empty; nothing came from the preset table.
    assert_eq!(&rows[0][10], "");
    assert_eq!(&rows[0][15], "n/a");
    // One progress line per size on stderr, nothing on stdout.
    assert_eq!(
        stderr(&o)
            .lines()
            .filter(|l| l.starts_with("[brn]"))
            .count(),
        2
    );
    assert!(o.stdout.is_empty());
}

#[test]
fn paper_presets_fill_three_factor_hyperparameters() {
    let dir = tempfile::tempdir().unwrap();
    for (variant, param_col, param, t) in
        [("acf", 11, "0.1", "0.01"), ("imf", 10, "0.007", "0.001")]
    {
        let out = dir.path().join(format!("{variant}.csv"));
        let o = resonator(&[
            "sweep",
            "--variant",
            variant,
            "-F",
            "3",
            "--sizes",
            "10648",
            "--trials",
            "1",
            "--preset",
            "paper",
            "--max-iters",
            "5",
            "-o",
            out.to_str().unwrap(),
        ]);
        assert_eq!(code(&o), 0, "{}", stderr(&o));
        let rows = csv_rows(&out);
        assert_eq!(&rows[0][2], "22");
        assert_eq!(&rows[0][3], "1500");
        assert_eq!(&rows[0][param_col], param);
        assert_eq!(&rows[0][12], t);
        assert_eq!(&rows[0][15], "true");
    }
}

#[test]
fn sweep_output_is_byte_identical_across_runs_and_threads() {
    let dir = tempfile::tempdir().unwrap();
    let mut outputs = Vec::new();
    for (i, threads) in ["1", "3", "1"].iter().enumerate() {
        let out = dir.path().join(format!("run{i}.json"));
        let o = resonator(&[
            "sweep",
            "--variant",
            "imf",
            "-F",
            "2",
            "-D",
            "256",
            "--sigma",
            "0.01",
            "--activation-threshold",
            "0",
            "--sizes",
            "36,100",
            "--trials",
            "12",
            "--seed",
            "99",
            "--parallelism",
            threads,
            "-o",
            out.to_str().unwrap(),
        ]);
        assert_eq!(code(&o), 0, "{}", stderr(&o));
        outputs.push(fs::read(&out).unwrap());
    }
    assert_eq!(outputs[0], outputs[1]);
    assert_eq!(outputs[0], outputs[2]);
    let json: serde_json::Value = serde_json::from_slice(&outputs[0]).unwrap();
    assert_eq!(json["rows"].as_array().unwrap().len(), 2);
    assert!(json["config"].get("parallelism").is_none());
}

#[test]
fn report_replaces_old_file_without_leftovers() {
    let dir = tempfile::tempdir().unwrap();
    let out = dir.path().join("report.csv");
    fs::write(&out, "old contents").unwrap();
    let args = |sizes: &str| {
        vec![
            "sweep".to_owned(),
            "--variant".into(),
            "brn".into(),
            "-F".into(),
            "2".into(),
            "-D".into(),
            "128".into(),
            "--sizes".into(),
            sizes.into(),
            "--trials".into(),
            "3".into(),
            "-o".into(),
            out.to_str().unwrap().into(),
        ]
    };
    // A failing run (M = 1) must leave the previous report untouched.
    let bad = resonator(&args("1").iter().map(String::as_str).collect::<Vec<_>>());
    assert_eq!(code(&bad), 2);
    assert_eq!(fs::read_to_string(&out).unwrap(), "old contents");

    let good = resonator(&args("16").iter().map(String::as_str).collect::<Vec<_>>());
    assert_eq!(code(&good), 0);
    assert_eq!(csv_rows(&out).len(), 1);
    let entries: Vec<_> = fs::read_dir(dir.path()).unwrap().collect();
    assert_eq!(entries.len(), 1, "temporary files left behind");
}

#[test]
fn unwritable_output_is_a_runtime_failure() {
    let dir = tempfile::tempdir().unwrap();
    let out = dir.path().join("missing").join("r.csv");
    let o = resonator(&[
        "sweep",
        "--variant",
        "brn",
        "-F",
        "2",
        "-D",
        "64",
        "--sizes",
        "16",
        "--trials",
        "2",
        "-o",
        out.to_str().unwrap(),
    ]);
    assert_eq!(code(&o), 1);
    assert!(stderr(&o).contains("r.csv"));
}

#[test]
fn flags_override_config_file() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = dir.path().join("sweep.json");
    fs::write(
        &cfg,
        r#"{"variant": "acf", "F": 2, "D": 200, "flip_rate": 0.05, "activation_threshold": 0.0,
            "search_space_sizes": [16, 25], "trials": 7, "seed": 3}"#,
    )
    .unwrap();
    let out = dir.path().join("r.csv");
    let o = resonator(&[
        "sweep",
        "--config",
        cfg.to_str().unwrap(),
        "--trials",
        "4",
        "--flip-rate",
        "0.02",
        "-o",
        out.to_str().unwrap(),
    ]);
    assert_eq!(code(&o), 0, "{}", stderr(&o));
    let rows = csv_rows(&out);
    assert_eq!(rows.len(), 2);
    assert_eq!(&rows[0][0], "acf");
    assert_eq!(&rows[0][3], "200");
    assert_eq!(&rows[0][5], "4");
    assert_eq!(&rows[0][11], "0.02");

    fs::write(&cfg, r#"{"variant": "brn", "F": 2, "bogus": 1}"#).unwrap();
    let o = resonator(&["sweep", "--config", cfg.to_str().unwrap(), "--sizes", "16"]);
    assert_eq!(code(&o), 2);
    assert!(stderr(&o).contains("bogus"));

    let o = resonator(&[
        "sweep",
        "--config",
        dir.path().join("nope.json").to_str().unwrap(),
    ]);
    assert_eq!(code(&o), 1);
}

#[test]
fn missing_hyperparameter_is_named() {
    let o = resonator(&[
        "sweep",
        "--variant",
        "acf",
        "-F",
        "2",
        "-D",
        "64",
        "--sizes",
        "16",
        "--preset",
        "none",
        "--activation-threshold",
        "0",
    ]);
    assert_eq!(code(&o), 2);
    assert!(stderr(&o).contains("flip_rate"), "{}", stderr(&o));
}

#[test]
fn capacity_prints_largest_passing_size() {
    let o = resonator(&[
        "capacity",
        "--variant",
        "brn",
        "-F",
        "2",
        "-D",
        "256",
        "--sizes",
        "16,64",
        "--trials",
        "10",
    ]);
    assert_eq!(code(&o), 0, "{}", stderr(&o));
    assert!(
        stdout(&o).ends_with("operational_capacity 64\n"),
        "{}",
        stdout(&o)
    );
}

#[test]
fn oracle_check_examples() {
    let o = resonator(&[
        "oracle-check",
        "--variant",
        "brn",
        "-F",
        "2",
        "-M",
        "4",
        "-D",
        "256",
        "--trials",
        "50",
    ]);
    assert_eq!(code(&o), 0, "{}", stderr(&o));
    assert!(stdout(&o).contains("(100.00%)"));

    let o = resonator(&[
        "oracle-check",
        "--variant",
        "brn",
        "-F",
        "4",
        "-M",
        "100",
        "-D",
        "256",
    ]);
    assert_eq!(code(&o), 2);
    assert!(stderr(&o).contains("1000000"), "{}", stderr(&o));

    let o = resonator(&[
        "oracle-check",
        "--variant",
        "brn",
        "-F",
        "2",
        "-M",
        "4",
        "-D",
        "256",
        "--trials",
        "0",
    ]);
    assert_eq!(code(&o), 2);
}

#[test]
fn presets_need_no_arguments() {
    let o = resonator(&["presets"]);
    assert_eq!(code(&o), 0);
    let out = stdout(&o);
    assert_eq!(out.lines().count(), 49);
    assert!(out
        .lines()
        .any(|l| l == "3,10648,1500,0.1,0.01,0.007,0.001"));

    let o = resonator(&[
        "presets",
        "-F",
        "2",
        "--search-space",
        "5e6",
        "--variant",
        "acf",
    ]);
    assert_eq!(code(&o), 0);
    assert!(stdout(&o).contains("acf,2,5000000,4639716,1000,,0.1,0,false"));

    let o = resonator(&["presets", "-F", "7", "--search-space", "100"]);
    assert_eq!(code(&o), 2);
}

#[test]
fn preset_path_from_environment() {
    let dir = tempfile::tempdir().unwrap();
    let table = dir.path().join("presets.txt");
    fs::write(
        &table,
        "factors=2 search_space=16 dim=64 flip_rate=0.2 acf_threshold=0.05 sigma=0.01 imf_threshold=0.02\n",
    )
    .unwrap();
    let o = Command::new(env!("CARGO_BIN_EXE_resonator"))
        .args(["presets"])
        .env("RESONATOR_PRESETS", &table)
        .output()
        .unwrap();
    assert_eq!(code(&o), 0);
    assert_eq!(stdout(&o).lines().count(), 2);

    fs::write(&table, "factors=two\n").unwrap();
    let o = Command::new(env!("CARGO_BIN_EXE_resonator"))
        .args(["presets"])
        .env("RESONATOR_PRESETS", &table)
        .output()
        .unwrap();
    assert_eq!(code(&o), 2);
}
