use std::fs;
use std::process::{Command, Output};

fn domino(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_domino")).args(args).output().unwrap()
}

fn stdout(output: &Output) -> String {
    String::from_utf8(output.stdout.clone()).unwrap()
}

fn tmp(name: &str) -> String {
    let dir = std::env::temp_dir().join("domino-cli-tests");
    fs::create_dir_all(&dir).unwrap();
    dir.join(name).to_str().unwrap().to_string()
}

#[test]
fn sector_dimensions() {
    let out = domino(&["sector", "--n", "6", "--topology", "open", "--end-terms", "right"]);
    assert!(out.status.success());
    assert_eq!(stdout(&out).trim(), "dim=6");

    let out = domino(&["sector", "--n", "6", "--topology", "ring-full"]);
    assert!(out.status.success());
    assert_eq!(stdout(&out).trim(), "dim=30");

    let out = domino(&[
        "sector", "--n", "6", "--topology", "open", "--end-terms", "none", "--seed", "dddddd",
    ]);
    assert!(out.status.success());
    assert_eq!(stdout(&out).trim(), "dim=1");
}

#[test]
fn sector_listing_format() {
    let path = tmp("listing.txt");
    let out = domino(&["sector", "--n", "4", "--out", &path]);
    assert!(out.status.success());
    let text = fs::read_to_string(&path).unwrap();
    let lines: Vec<&str> = text.lines().collect();
    assert_eq!(lines[0], "n=4 dim=4 topology=open endterms=right");
    assert_eq!(&lines[1..], ["uddd", "uudd", "uuud", "uuuu"]);
}

#[test]
fn sector_seed_length_mismatch_is_config_error() {
    let out = domino(&["sector", "--n", "6", "--seed", "ud"]);
    assert_eq!(out.status.code(), Some(1));
}

#[test]
fn evolve_initial_polarization_and_bounds() {
    let out = domino(&["evolve", "--n", "8", "--beta", "1", "--tmax", "40", "--samples", "81"]);
    assert!(out.status.success());
    let text = stdout(&out);
    let mut lines = text.lines();
    assert_eq!(lines.next().unwrap(), "t,M,F,p1,p2,p3,p4,p5,p6,p7,p8");
    for (k, line) in lines.enumerate() {
        let m: f64 = line.split(',').nth(1).unwrap().parse().unwrap();
        if k == 0 {
            assert_eq!(m, -6.0); // n=8 with one flipped spin: 1 - 7
        }
        assert!(m.abs() <= 8.0 + 1e-12);
    }
}

#[test]
fn compare_summary_and_zero_initial_difference() {
    let prefix = tmp("cmp");
    let out = domino(&["compare", "--n-list", "4,6,8", "--samples", "11", "--out", &prefix]);
    assert!(out.status.success());
    let summary = fs::read_to_string(format!("{prefix}_summary.csv")).unwrap();
    assert_eq!(summary.lines().count(), 4); // header + one row per n
    for n in [4, 6, 8] {
        let table = fs::read_to_string(format!("{prefix}_n{n}.csv")).unwrap();
        let first_row = table.lines().nth(1).unwrap();
        let cols: Vec<&str> = first_row.split(',').collect();
        assert_eq!(cols[4].parse::<f64>().unwrap(), 0.0, "delta_full at t=0");
        assert_eq!(cols[5].parse::<f64>().unwrap(), 0.0, "delta_bond at t=0");
    }
}

#[test]
fn semiclassical_row_counts_and_trend() {
    let out = domino(&["semiclassical", "--d-list", "50"]);
    assert!(out.status.success());
    assert_eq!(stdout(&out).lines().count(), 2);

    let out = domino(&["semiclassical", "--d-list", "50,100,200"]);
    assert!(out.status.success());
    let text = stdout(&out);
    let errors: Vec<f64> = text
        .lines()
        .skip(1)
        .map(|l| l.split(',').nth(1).unwrap().parse().unwrap())
        .collect();
    assert_eq!(errors.len(), 3);
    assert!(errors.windows(2).all(|w| w[1] <= w[0]), "non-increasing: {errors:?}");
}

#[test]
fn malformed_d_list_is_usage_error() {
    let out = domino(&["semiclassical", "--d-list", "50,abc"]);
    assert_eq!(out.status.code(), Some(1));
    let err = String::from_utf8(out.stderr).unwrap();
    assert!(err.contains("--d-list"), "mentions the offending flag: {err}");
}

#[test]
fn verify_passes_small_and_refuses_large() {
    let out = domino(&["verify", "--n", "8"]);
    assert_eq!(out.status.code(), Some(0));
    let text = stdout(&out);
    assert!(text.contains("projection: pass"));
    assert!(text.contains("reachability: pass"));
    assert!(text.contains("dynamics: pass"));

    let out = domino(&["verify", "--n", "16"]);
    assert_eq!(out.status.code(), Some(2));
}

#[test]
fn config_file_fills_gaps_and_flags_win() {
    let path = tmp("config.json");
    fs::write(&path, r#"{"n": 6, "topology": "ring-full"}"#).unwrap();
    let out = domino(&["sector", "--config", &path]);
    assert!(out.status.success());
    assert_eq!(stdout(&out).trim(), "dim=30");

    // the explicit flag overrides the file
    let out = domino(&["sector", "--config", &path, "--topology", "open", "--end-terms", "right"]);
    assert!(out.status.success());
    assert_eq!(stdout(&out).trim(), "dim=6");
}

#[test]
fn unknown_config_key_is_config_error() {
    let path = tmp("bad_config.json");
    fs::write(&path, r#"{"sites": 6}"#).unwrap();
    let out = domino(&["sector", "--config", &path]);
    assert_eq!(out.status.code(), Some(1));
}

#[test]
fn sector_cap_is_resource_guard() {
    let out = domino(&["sector", "--n", "10", "--topology", "ring-full", "--cap", "10"]);
    assert_eq!(out.status.code(), Some(2));
}
