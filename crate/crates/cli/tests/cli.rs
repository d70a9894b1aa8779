use std::process::{Command, Output};

fn nbwht(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_nbwht"))
        .args(args)
        .output()
        .expect("binary runs")
}

fn stdout(o: &Output) -> String {
    String::from_utf8(o.stdout.clone()).unwrap()
}

#[test]
fn count_text_and_csv() {
    let o = nbwht(&["count", "--q", "8", "--mask", "03"]);
    assert!(o.status.success());
    assert_eq!(stdout(&o), "additions=2 negations=1\n");

    let o = nbwht(&["count", "--q", "8", "--mask", "0x22", "--format", "csv"]);
    assert_eq!(
        stdout(&o),
        "q,mask,weight,additions,negations\n8,22,2,8,6\n"
    );
}

#[test]
fn table2_has_every_weight() {
    let o = nbwht(&["table2", "--format", "csv"]);
    assert!(o.status.success());
    let text = stdout(&o);
    let mut lines = text.lines();
    assert_eq!(
        lines.next().unwrap(),
        "q_prime,approx_additions,approx_negations,exact_additions,exact_negations"
    );
    let rows: Vec<&str> = lines.collect();
    assert_eq!(rows.len(), 26);
    assert!(rows[25].starts_with("64,384,192,384,192"));
}

#[test]
fn table1_lists_exact_fractions() {
    let o = nbwht(&["table1", "--format", "csv"]);
    let text = stdout(&o);
    assert!(text.starts_with("section,q_prime,"));
    assert!(text.contains("10/3"));
    assert!(text.contains("7/2"));
}

#[test]
fn fig3_is_decreasing() {
    let o = nbwht(&["fig3", "--format", "csv"]);
    let text = stdout(&o);
    let ratios: Vec<f64> = text
        .lines()
        .skip(1)
        .map(|l| l.rsplit(',').next().unwrap().parse().unwrap())
        .collect();
    assert_eq!(ratios.len(), 13);
    assert!(ratios.windows(2).all(|w| w[1] < w[0]));
}

#[test]
fn validate_passes_and_writes_file() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("v.csv");
    let o = nbwht(&[
        "validate",
        "--q",
        "64",
        "--q-prime",
        "8",
        "--trials",
        "5000",
        "--seed",
        "3",
        "--format",
        "csv",
        "--out",
        path.to_str().unwrap(),
    ]);
    assert!(o.status.success());
    assert!(o.stdout.is_empty());
    let text = std::fs::read_to_string(&path).unwrap();
    assert!(text.contains(",sampled,5000,3,"));
    assert!(text.trim_end().ends_with(",pass"));

    let o = nbwht(&["validate", "--q", "8", "--q-prime", "3"]);
    assert!(o.status.success());
    assert!(stdout(&o).contains("exhaustive"));
}

#[test]
fn conv_check_passes() {
    let o = nbwht(&["conv-check", "--q", "16", "--trials", "20"]);
    assert!(o.status.success());
    assert!(stdout(&o).contains("pass"));
}

#[test]
fn cost_lists_models() {
    let o = nbwht(&["cost", "--q", "64", "--q-prime", "64", "--format", "csv"]);
    let text = stdout(&o);
    assert!(text.starts_with("model,multiplications,additions,negations\n"));
    assert!(text.contains("wh_forward_dense,"));
}

#[test]
fn bad_input_exits_with_usage_status() {
    for args in [
        &["count", "--q", "6", "--mask", "1"][..],
        &["count", "--q", "8", "--mask", "zz"],
        &["count", "--q", "8", "--mask", "100"],
        &["validate", "--q", "8", "--q-prime", "9"],
        &["frobnicate"],
    ] {
        let o = nbwht(args);
        assert_eq!(o.status.code(), Some(2), "{args:?}");
        assert!(!o.stderr.is_empty());
    }
}
