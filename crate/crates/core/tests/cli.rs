use std::path::Path;
use std::process::{Command, Output};

fn ncgeom(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_ncgeom"))
        .args(args)
        .output()
        .expect("binary runs")
}

fn stdout(o: &Output) -> String {
    String::from_utf8(o.stdout.clone()).unwrap()
}

fn stderr(o: &Output) -> String {
    String::from_utf8(o.stderr.clone()).unwrap()
}

/// y coordinates of each polyline, in drawing order.
fn polylines(svg: &str) -> Vec<(String, Vec<(f64, f64)>)> {
    let doc = roxmltree::Document::parse(svg).expect("well-formed SVG");
    doc.descendants()
        .filter(|n| n.has_tag_name("polyline"))
        .map(|n| {
            let pts = n
                .attribute("points")
                .unwrap()
                .split_whitespace()
                .map(|p| {
                    let (x, y) = p.split_once(',').unwrap();
                    (x.parse().unwrap(), y.parse().unwrap())
                })
                .collect();
            (n.attribute("data-series").unwrap().to_string(), pts)
        })
        .collect()
}

#[test]
fn classify_origin_is_separable() {
    let o = ncgeom(&[
        "classify", "--m", "0", "--n", "0", "--theta", "0", "--eta", "0",
    ]);
    assert_eq!(o.status.code(), Some(0));
    assert_eq!(stdout(&o), "Separable\n");
}

#[test]
fn classify_deformed_state_is_entangled() {
    let o = ncgeom(&[
        "classify", "--m", "0.9", "--n", "0", "--theta", "0.9", "--eta", "0", "--format", "json",
    ]);
    assert_eq!(o.status.code(), Some(0), "{}", stderr(&o));
    let v: serde_json::Value = serde_json::from_str(&stdout(&o)).unwrap();
    assert!(v["class"].is_string());
    assert!(v["nu_minus"].as_f64().unwrap() >= 1.0 - 1e-9);
}

#[test]
fn exit_codes() {
    let usage = ncgeom(&["classify", "--mm", "0"]);
    assert_eq!(usage.status.code(), Some(2));
    assert!(stderr(&usage).contains("Usage"));
    let bad_number = ncgeom(&["volume", "--kappa", "two"]);
    assert_eq!(bad_number.status.code(), Some(2));
    let domain = ncgeom(&["volume", "--kappa", "0"]);
    assert_eq!(domain.status.code(), Some(1));
    assert_eq!(stderr(&domain).lines().count(), 1);
    let outside = ncgeom(&["spectrum", "--m", "1", "--n", "0"]);
    assert_eq!(outside.status.code(), Some(1));
    let help = ncgeom(&["--help"]);
    assert_eq!(help.status.code(), Some(0));
}

#[test]
fn spectrum_and_metric_print() {
    let o = ncgeom(&["spectrum", "--m", "0.5", "--n", "0", "--format", "json"]);
    assert_eq!(o.status.code(), Some(0));
    let v: serde_json::Value = serde_json::from_str(&stdout(&o)).unwrap();
    assert_eq!(v["spectrum"].as_array().unwrap().len(), 4);
    let spec: Vec<f64> = v["spectrum"]
        .as_array()
        .unwrap()
        .iter()
        .map(|x| x.as_f64().unwrap())
        .collect();
    assert!(spec.windows(2).all(|w| w[0] <= w[1]));
    assert_eq!(v["nu_minus"].as_f64().unwrap(), spec[0]);
    // commutative partial transpose: ν′₋ = 1 + R
    assert!((v["nu_prime_minus"].as_f64().unwrap() - 1.5).abs() < 1e-10);

    for backend in ["paper", "numeric"] {
        let o = ncgeom(&["metric", "--m", "0.3", "--n", "0.2", "--backend", backend]);
        assert_eq!(o.status.code(), Some(0));
        assert!(stdout(&o).contains("det g"));
    }
}

#[test]
fn volume_reports_value_and_error() {
    let o = ncgeom(&[
        "volume",
        "--region",
        "positive-disk",
        "--kappa",
        "4",
        "--backend",
        "paper",
        "--density",
        "det",
    ]);
    assert_eq!(o.status.code(), Some(0));
    let out = stdout(&o);
    let value: f64 = out.split_whitespace().next().unwrap().parse().unwrap();
    assert!((value - 1.9526811).abs() < 1e-6, "{out}");
    assert!(out.contains("+-"));

    let o = ncgeom(&[
        "volume",
        "--region",
        "entangled",
        "--theta",
        "0",
        "--eta",
        "0",
    ]);
    assert_eq!(o.status.code(), Some(0));
    assert!(stderr(&o).contains("no evaluation point"));
}

#[test]
fn theta_sweep_writes_csv_and_plot() {
    let dir = tempfile::tempdir().unwrap();
    let csv = dir.path().join("ratio.csv");
    let svg = dir.path().join("ratio.svg");
    let o = ncgeom(&[
        "sweep",
        "--param",
        "theta",
        "--from",
        "0.1",
        "--to",
        "1.0",
        "--steps",
        "10",
        "--eta",
        "0",
        "--kappa",
        "4",
        "--out",
        csv.to_str().unwrap(),
        "--plot",
        svg.to_str().unwrap(),
    ]);
    assert_eq!(o.status.code(), Some(0), "{}", stderr(&o));
    let text = std::fs::read_to_string(&csv).unwrap();
    let rows = ncgeom::output::read_table_csv(&text).unwrap();
    assert_eq!(rows.len(), 10);
    let ratios: Vec<f64> = rows.iter().map(|r| r.ratio.unwrap()).collect();
    for (w, r) in ratios.windows(2).zip(rows.windows(2)) {
        let band = 2.0
            * r[0]
                .std_error_ratio
                .unwrap()
                .hypot(r[1].std_error_ratio.unwrap());
        assert!(w[1] >= w[0] - band, "{ratios:?}");
    }
    let lines = polylines(&std::fs::read_to_string(&svg).unwrap());
    assert_eq!(lines.len(), 1);
    assert_eq!(lines[0].0, "ratio");
    assert_eq!(lines[0].1.len(), 10);
}

#[test]
fn kappa_plot_rises_left_to_right() {
    let dir = tempfile::tempdir().unwrap();
    let svg = dir.path().join("kappa.svg");
    let o = ncgeom(&[
        "sweep",
        "--param",
        "kappa",
        "--from",
        "0.5",
        "--to",
        "4",
        "--steps",
        "8",
        "--method",
        "gauss-legendre",
        "--plot",
        svg.to_str().unwrap(),
    ]);
    assert_eq!(o.status.code(), Some(0), "{}", stderr(&o));
    // table went to stdout
    assert_eq!(stdout(&o).lines().count(), 9);
    let lines = polylines(&std::fs::read_to_string(&svg).unwrap());
    let quantum = &lines.iter().find(|l| l.0 == "gamma_quantum").unwrap().1;
    // SVG y grows downward
    assert!(quantum
        .windows(2)
        .all(|w| w[1].1 <= w[0].1 && w[1].0 > w[0].0));
}

#[test]
fn json_table_round_trips() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("t.json");
    let o = ncgeom(&[
        "sweep",
        "--param",
        "eta",
        "--from",
        "0.5",
        "--to",
        "1.0",
        "--steps",
        "3",
        "--budget",
        "10000",
        "--format",
        "json",
        "--out",
        path.to_str().unwrap(),
    ]);
    assert_eq!(o.status.code(), Some(0), "{}", stderr(&o));
    let text = std::fs::read_to_string(&path).unwrap();
    let rows = ncgeom::output::read_table_json(&text).unwrap();
    assert_eq!(rows.len(), 3);
    assert_eq!(rows[2].param, 1.0);
}

#[test]
fn unwritable_output_is_a_runtime_error() {
    let o = ncgeom(&[
        "sweep",
        "--param",
        "kappa",
        "--steps",
        "2",
        "--budget",
        "10000",
        "--out",
        "/nonexistent-dir/table.csv",
    ]);
    assert_eq!(o.status.code(), Some(1));
}

#[test]
fn config_file_supplies_defaults() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = dir.path().join("run.toml");
    std::fs::write(
        &cfg,
        "region = \"positive-disk\"\nkappa = 4.0\nbackend = \"paper\"\ndensity = \"det\"\n",
    )
    .unwrap();
    let o = ncgeom(&["volume", "--config", cfg.to_str().unwrap()]);
    assert_eq!(o.status.code(), Some(0), "{}", stderr(&o));
    assert!(stdout(&o).starts_with("1.95268"));
    let o = ncgeom(&["volume", "--config", cfg.to_str().unwrap(), "--kappa", "2"]);
    assert!(stdout(&o).starts_with("0.43698"));
}

#[test]
fn figures_and_report() {
    let dir = tempfile::tempdir().unwrap();
    let out = dir.path().join("figs");
    let o = ncgeom(&[
        "figures",
        "--out",
        out.to_str().unwrap(),
        "--budget",
        "10000",
    ]);
    assert_eq!(o.status.code(), Some(0), "{}", stderr(&o));
    for f in ncgeom::cli::FIGURE_FILES {
        let p = out.join(f);
        assert!(Path::new(&p).exists(), "{f}");
        if f.ends_with(".svg") {
            polylines(&std::fs::read_to_string(&p).unwrap());
        }
    }
    let report = dir.path().join("report.txt");
    let o = ncgeom(&["report", "--grid", "31", "--out", report.to_str().unwrap()]);
    assert_eq!(o.status.code(), Some(0));
    let text = std::fs::read_to_string(&report).unwrap();
    assert!(text.contains("matching density"));
}
