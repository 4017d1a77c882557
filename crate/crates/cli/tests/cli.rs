use std::fs;
use std::path::PathBuf;
use std::process::{Command, Output};

fn twostar(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_twostar")).args(args).output().expect("binary runs")
}

fn stdout(out: &Output) -> String {
    assert!(out.status.success(), "stderr: {}", String::from_utf8_lossy(&out.stderr));
    String::from_utf8(out.stdout.clone()).unwrap()
}

fn scratch(name: &str) -> PathBuf {
    let dir = PathBuf::from(env!("CARGO_TARGET_TMPDIR")).join(name);
    let _ = fs::remove_dir_all(&dir);
    fs::create_dir_all(&dir).unwrap();
    dir
}

fn json(text: &str) -> serde_json::Value {
    serde_json::from_str(text).expect("valid JSON")
}

fn data_rows(text: &str) -> Vec<&str> {
    text.lines().filter(|l| !l.starts_with('#')).skip(1).collect()
}

#[test]
fn sample_writes_requested_rows_deterministically() {
    let dir = scratch("sample");
    let paths = [dir.join("a.csv"), dir.join("b.csv")];
    for p in &paths {
        let out = twostar(&[
            "sample", "--n", "100", "--theta1", "0", "--theta2", "0.25", "--samples", "10", "--burnin", "200",
            "--seed", "1", "--out", p.to_str().unwrap(),
        ]);
        stdout(&out);
    }
    let a = fs::read(&paths[0]).unwrap();
    assert_eq!(a, fs::read(&paths[1]).unwrap());
    let text = String::from_utf8(a).unwrap();
    assert!(!text.contains('\r'));
    assert!(text.lines().any(|l| l == "index,edges,two_stars,s1,s2"));
    assert_eq!(data_rows(&text).len(), 10);
}

#[test]
fn sample_rejects_nonpositive_theta2() {
    let out = twostar(&["sample", "--n", "10", "--theta1", "0", "--theta2", "0", "--samples", "1"]);
    assert_eq!(out.status.code(), Some(2));
    assert!(!out.stderr.is_empty());
}

#[test]
fn sample_accepts_negative_theta1_and_glauber() {
    let out = twostar(&[
        "sample", "--n", "6", "--theta1", "-0.3", "--theta2", "0.2", "--samples", "5", "--burnin", "10", "--sampler",
        "glauber", "--gap", "2",
    ]);
    assert_eq!(data_rows(&stdout(&out)).len(), 5);
}

#[test]
fn predict_at_zero_field() {
    let v = json(&stdout(&twostar(&["predict", "--theta1", "0", "--theta2", "0.25"])));
    for key in [
        "theta1", "theta2", "domain", "m", "mu", "tau1", "tau2", "eta1", "eta2", "a1", "a2", "a3", "a4", "p_plus",
        "p_minus", "stability",
    ] {
        assert!(v.get(key).is_some(), "missing {key}");
    }
    assert_eq!(v["domain"], "Theta11");
    assert_eq!(v["tau1"].as_f64(), Some(4.0));
    assert!((v["tau2"].as_f64().unwrap() - 4.0 / 3.0).abs() < 1e-15);
}

#[test]
fn predict_fails_at_critical_point() {
    let out = twostar(&["predict", "--theta1", "0", "--theta2", "0.5"]);
    assert_eq!(out.status.code(), Some(1));
}

#[test]
fn exact_partition_function() {
    let v = json(&stdout(&twostar(&["exact", "--n", "3", "--beta1", "0", "--beta2", "1"])));
    let z = 1.0 + 3.0 * 0.5f64.exp() + 3.0 * 1.5f64.exp() + 3.0f64.exp();
    assert!((v["z"].as_f64().unwrap() - z).abs() < 1e-12 * z);
    assert_eq!(v["edge_pmf"].as_array().unwrap().len(), 4);
    assert!(!twostar(&["exact", "--n", "7", "--beta1", "0", "--beta2", "1"]).status.success());
}

#[test]
fn laplace_table() {
    let text = stdout(&twostar(&["laplace"]));
    let mut lines = text.lines();
    assert_eq!(lines.next(), Some("l,n,integral,prediction,ratio"));
    assert_eq!(lines.count(), 15);
    let text = stdout(&twostar(&["laplace", "--a1", "0.5", "--a3", "0", "--l", "1", "--n", "100,1000"]));
    for row in data_rows(&text) {
        assert!(row.ends_with(','), "zero prediction leaves ratio empty: {row}");
    }
}

#[test]
fn estimate_round_trip_and_degenerate_input() {
    let dir = scratch("estimate");
    let good = dir.join("good.csv");
    stdout(&twostar(&[
        "sample", "--n", "30", "--theta1", "0.2", "--theta2", "0.3", "--samples", "50", "--burnin", "50", "--out",
        good.to_str().unwrap(),
    ]));
    let v = json(&stdout(&twostar(&["estimate", "--in", good.to_str().unwrap()])));
    for key in [
        "theta2_hat", "theta1_hat", "n_draws", "n_degenerate", "frac_positive", "s1_mean", "s1_absmean", "s2_mean",
        "ks_pos", "ks_neg",
    ] {
        assert!(v.get(key).is_some(), "missing {key}");
    }
    assert_eq!(v["n_draws"], 50);

    let bad = dir.join("bad.csv");
    // empty and complete graphs on 4 vertices
    fs::write(&bad, "index,edges,two_stars,s1,s2\n0,0,0,-1.0,0.0\n1,6,12,1.0,0.0\n").unwrap();
    let out = twostar(&["estimate", "--in", bad.to_str().unwrap()]);
    assert!(!out.status.success());
}

fn experiment(dir: &std::path::Path, extra: &[&str]) {
    let mut args = vec!["experiment", "--out-dir", dir.to_str().unwrap()];
    args.extend_from_slice(extra);
    stdout(&twostar(&args));
}

fn histogram_total(text: &str) -> (usize, usize) {
    let rows = data_rows(text);
    let total = rows.iter().map(|r| r.rsplit(',').next().unwrap().parse::<usize>().unwrap()).sum();
    (rows.len(), total)
}

#[test]
fn domain1_preset_bundle() {
    let dir = scratch("domain1");
    experiment(&dir, &["--preset", "domain1", "--samples", "300", "--burnin", "100"]);
    let hist = fs::read_to_string(dir.join("histogram.csv")).unwrap();
    assert!(hist.starts_with("# experiment {"));
    assert!(hist.lines().nth(1) == Some("bin_left,bin_right,count"));
    assert_eq!(histogram_total(&hist), (50, 300));
    let qq = fs::read_to_string(dir.join("qq.csv")).unwrap();
    assert_eq!(data_rows(&qq).len(), 300);
    let est = json(&fs::read_to_string(dir.join("estimate.json")).unwrap());
    assert_eq!(est["config"]["preset"], "domain1");
    assert_eq!(est["config"]["samples"], 300);
    assert_eq!(est["n_draws"], 300);
    assert!(!dir.join("histogram_pos.csv").exists());
}

#[test]
fn domain2_preset_splits_branches_evenly() {
    let dir = scratch("domain2");
    experiment(&dir, &["--preset", "domain2", "--samples", "1000", "--burnin", "100", "--seed", "7"]);
    let (rows, total) = histogram_total(&fs::read_to_string(dir.join("histogram.csv")).unwrap());
    assert_eq!((rows, total), (80, 1000));
    let (pos_rows, pos) = histogram_total(&fs::read_to_string(dir.join("histogram_pos.csv")).unwrap());
    let (neg_rows, neg) = histogram_total(&fs::read_to_string(dir.join("histogram_neg.csv")).unwrap());
    assert_eq!((pos_rows, neg_rows), (50, 50));
    assert_eq!(pos + neg, 1000);
    for count in [pos, neg] {
        assert!((count as f64 / 1000.0 - 0.5).abs() <= 0.05, "branch count {count}");
    }
    assert!(dir.join("qq_pos.csv").exists() && dir.join("qq_neg.csv").exists());
    let est = json(&fs::read_to_string(dir.join("estimate.json")).unwrap());
    assert_eq!(est["symmetric"], true);
    assert!(est["positive"]["count"].as_u64().unwrap() > 0);
}

#[test]
fn experiment_without_preset_needs_model_flags() {
    let dir = scratch("nopreset");
    let out = twostar(&["experiment", "--out-dir", dir.to_str().unwrap(), "--n", "10"]);
    assert_eq!(out.status.code(), Some(2));
}
