use std::process::{Command, Output};

fn run(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_sinclp"))
        .args(args)
        .output()
        .expect("binary runs")
}

fn stdout(out: &Output) -> String {
    String::from_utf8(out.stdout.clone()).expect("utf-8 output")
}

fn field(text: &str, key: &str) -> f64 {
    text.lines()
        .find_map(|l| {
            let mut it = l.split_whitespace();
            (it.next() == Some(key)).then(|| it.next().unwrap().parse().unwrap())
        })
        .unwrap_or_else(|| panic!("no field {key} in {text}"))
}

#[test]
fn integral_text() {
    let out = run(&["integral", "--p", "1"]);
    assert_eq!(out.status.code(), Some(0));
    let text = stdout(&out);
    assert!((field(&text, "value") - 1.0).abs() < 1e-5);
    assert!(field(&text, "total_error") < 1e-10);
}

#[test]
fn integral_json_is_one_document() {
    let out = run(&["integral", "--p", "2", "--format", "json"]);
    assert_eq!(out.status.code(), Some(0));
    let v: serde_json::Value = serde_json::from_str(&stdout(&out)).unwrap();
    let obj = v.as_object().unwrap();
    let keys: Vec<&str> = obj.keys().map(String::as_str).collect();
    assert_eq!(
        keys,
        [
            "p",
            "value",
            "quad_error",
            "tail_bound",
            "cutoff",
            "total_error"
        ]
    );
    let value = obj["value"].as_f64().unwrap();
    assert!((value - 2.0 / 3.0).abs() <= obj["total_error"].as_f64().unwrap() + 1e-12);
}

#[test]
fn integral_below_domain_is_usage_error() {
    let out = run(&["integral", "--p", "0.5"]);
    assert_eq!(out.status.code(), Some(2));
    assert!(out.stdout.is_empty());
    assert!(!out.stderr.is_empty());
}

#[test]
fn bounds_at_one_three_four() {
    let one = stdout(&run(&["bounds", "--p", "1"]));
    assert!((field(&one, "integral") - 1.0).abs() < 1e-5);
    assert!((field(&one, "improved_bound") - 1.0).abs() < 1e-5);

    let three = stdout(&run(&["bounds", "--p", "3"]));
    assert!((field(&three, "integral") - 0.55).abs() < 1e-5);
    assert!((field(&three, "c_p") - 1.001624).abs() < 1e-5);
    assert!(field(&three, "margin_ball") > 0.0);

    let out = run(&["bounds", "--p", "4", "--format", "json"]);
    let v: serde_json::Value = serde_json::from_slice(&out.stdout).unwrap();
    assert!((v["integral"].as_f64().unwrap() - 151.0 / 315.0).abs() < 1e-11);
    assert_eq!(v["ball_bound"].as_f64().unwrap(), 0.5);
    assert!(v["margin_improved"].as_f64().unwrap() > 0.0);
}

#[test]
fn p0_text_and_json() {
    let text = stdout(&run(&["p0"]));
    assert!((field(&text, "p0") - 1.8414).abs() < 5e-5);
    let v: serde_json::Value =
        serde_json::from_slice(&run(&["p0", "--format", "json"]).stdout).unwrap();
    assert!(v["residual"].as_f64().unwrap().abs() <= 1e-12);
    assert!((v["p0"].as_f64().unwrap() - 1.8414).abs() < 5e-5);
}

#[test]
fn table_rows_and_csv_header() {
    let text = stdout(&run(&["table", "--grid", "1:5:1"]));
    assert_eq!(text.lines().count(), 6);

    let csv = stdout(&run(&["table", "--grid", "1:2:0.5", "--format", "csv"]));
    let mut lines = csv.lines();
    assert_eq!(
        lines.next(),
        Some("p,integral,total_error,ball_bound,c_p,improved_bound,margin_ball,margin_improved,asymptotic_ratio")
    );
    let rows: Vec<&str> = lines.collect();
    assert_eq!(rows.len(), 3);
    assert!(rows.iter().all(|r| r.split(',').count() == 9));
}

#[test]
fn table_reversed_grid_is_usage_error() {
    assert_eq!(run(&["table", "--grid", "5:1:1"]).status.code(), Some(2));
}

#[test]
fn bspline_values() {
    let cases = [
        (["--n", "3", "--x", "0"], "2/3"),
        (["--n", "4", "--x", "0"], "115/192"),
        (["--n", "2", "--x", "1/2"], "1/2"),
        (["--n", "3", "--x", "7"], "0/1"),
        (["--n", "3", "--x", "-1"], "1/6"),
    ];
    for (args, expected) in cases {
        let mut full = vec!["bspline"];
        full.extend(args);
        let out = run(&full);
        assert_eq!(out.status.code(), Some(0), "{full:?}");
        let text = stdout(&out);
        let value = text
            .lines()
            .find_map(|l| l.strip_prefix("value"))
            .map(str::trim)
            .unwrap();
        assert_eq!(value, expected, "{full:?}");
    }
}

#[test]
fn verify_small_grid_and_bad_grid() {
    let out = run(&["verify", "--grid", "1:1:1"]);
    assert_eq!(out.status.code(), Some(0));
    assert!(stdout(&out).trim_end().ends_with("PASS"));
    assert_eq!(run(&["verify", "--grid", "x"]).status.code(), Some(2));
}

#[test]
fn asymptote_rows() {
    let text = stdout(&run(&["asymptote", "--n-max", "8"]));
    let ps: Vec<&str> = text
        .lines()
        .skip(1)
        .map(|l| l.split_whitespace().next().unwrap())
        .collect();
    assert_eq!(ps, ["1", "2", "4", "8"]);
    assert_eq!(run(&["asymptote", "--n-max", "0"]).status.code(), Some(2));
}

#[test]
fn unknown_subcommand_is_usage_error() {
    assert_eq!(run(&["frobnicate"]).status.code(), Some(2));
}

#[test]
fn output_is_deterministic() {
    for args in [
        &["table", "--grid", "1:3:0.25", "--format", "json"][..],
        &["bounds", "--p", "2.5", "--format", "csv"][..],
    ] {
        assert_eq!(run(args).stdout, run(args).stdout);
    }
}
