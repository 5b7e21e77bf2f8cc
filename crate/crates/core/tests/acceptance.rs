//! Acceptance criteria. Each test prints one `PASS`/`FAIL` line and then
//! asserts, so a failing criterion stays visible in the test summary.

use std::time::{Duration, Instant};

use nalgebra::DMatrix;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use ncgeom::cli::run_with;
use ncgeom::gaussian::{
    classify, symplectic_spectrum, toy_covariance, CovarianceMatrix, StateClass, ToyPoint,
    CLASSIFY_TOL,
};
use ncgeom::infogeo::{
    fisher_metric_numeric, regularizer, toy_adjugate_trace, toy_regularizer_closed, FnFamily,
    PushedFamily, DEFAULT_STEP, TOY_REGULARIZER_EXPONENT,
};
use ncgeom::numerics::{adjugate, eig_symmetric, DenseMatrix};
use ncgeom::phase_space::{
    bopp_shift, commutative_form, darboux_conjugate, nc_form, Direction, NCParams,
};
use ncgeom::volume::{
    entangled_volume, integrate_region, linear_grid, sweep, Column, IntegrationOptions, Method,
    RegionKind, RegionSpec, SweepFixed, SweepParam, Trend,
};

fn verdict(n: u32, name: &str, pass: bool, detail: &str) {
    println!(
        "criterion {n} [{name}]: {} - {detail}",
        if pass { "PASS" } else { "FAIL" }
    );
    assert!(pass, "criterion {n} [{name}] failed: {detail}");
}

fn cli(args: &[&str]) -> (i32, String, String) {
    let argv: Vec<String> = std::iter::once("ncgeom")
        .chain(args.iter().copied())
        .map(String::from)
        .collect();
    let (mut out, mut err) = (Vec::new(), Vec::new());
    let code = run_with(&argv, &mut out, &mut err);
    (
        code,
        String::from_utf8(out).unwrap(),
        String::from_utf8(err).unwrap(),
    )
}

fn disk_grid(k: usize) -> Vec<(f64, f64)> {
    let h = 2.0 / (k - 1) as f64;
    let mut pts = Vec::new();
    for i in 0..k {
        for j in 0..k {
            let (m, n) = (-1.0 + h * i as f64, -1.0 + h * j as f64);
            if m.hypot(n) < 1.0 {
                pts.push((m, n));
            }
        }
    }
    pts
}

fn random_disk_point(rng: &mut ChaCha8Rng) -> (f64, f64) {
    loop {
        let (m, n): (f64, f64) = (rng.gen_range(-1.0..1.0), rng.gen_range(-1.0..1.0));
        if m.hypot(n) < 1.0 {
            return (m, n);
        }
    }
}

fn random_nc(rng: &mut ChaCha8Rng) -> NCParams {
    loop {
        let (t, e): (f64, f64) = (rng.gen_range(-1.5..1.5), rng.gen_range(-1.5..1.5));
        if t * e < 0.95 {
            return NCParams::new(t, e).unwrap();
        }
    }
}

const ANCHOR: f64 = 1.95268;

#[test]
fn criterion_1_anchor_integral() {
    let start = Instant::now();
    let mut values = Vec::new();
    for density in ["det", "sqrt-det"] {
        let (code, out, err) = cli(&[
            "volume",
            "--region",
            "positive-disk",
            "--kappa",
            "2",
            "--backend",
            "paper",
            "--density",
            density,
        ]);
        assert_eq!(code, 0, "{err}");
        let value: f64 = out.split_whitespace().next().unwrap().parse().unwrap();
        values.push((density, value, (value - ANCHOR).abs() / ANCHOR));
    }
    let elapsed = start.elapsed();
    let matching = values.iter().find(|v| v.2 <= 5e-3);
    let detail = values
        .iter()
        .map(|(d, v, r)| format!("{d} {v:.6} ({:.2}% off)", 100.0 * r))
        .collect::<Vec<_>>()
        .join(", ");
    let pass = matching.is_some() && elapsed < Duration::from_secs(30);
    verdict(
        1,
        "anchor integral at kappa=2",
        pass,
        &format!(
            "reference {ANCHOR}: {detail}; {:.1}s",
            elapsed.as_secs_f64()
        ),
    );
}

#[test]
fn criterion_2_darboux_spectrum_invariance() {
    let start = Instant::now();
    let mut rng = ChaCha8Rng::seed_from_u64(2);
    let j = commutative_form(2, 2).unwrap();
    let mut worst = 0.0f64;
    for _ in 0..200 {
        let (m, n) = random_disk_point(&mut rng);
        let nc = random_nc(&mut rng);
        let sigma = toy_covariance(&ToyPoint::new(m, n, nc).unwrap()).unwrap();
        let s = bopp_shift(nc).unwrap();
        let pulled = darboux_conjugate(&sigma, &s, Direction::Pull).unwrap();
        let a = symplectic_spectrum(&sigma, &nc_form(nc)).unwrap();
        let b = symplectic_spectrum(&pulled, &j).unwrap();
        worst = worst.max(a.max_abs_diff(&b));
    }
    let elapsed = start.elapsed();
    verdict(
        2,
        "spectrum invariance under Darboux pull-back",
        worst <= 1e-9 && elapsed < Duration::from_secs(5),
        &format!(
            "200 samples, max deviation {worst:.2e}; {:.2}s",
            elapsed.as_secs_f64()
        ),
    );
}

#[test]
fn criterion_3_closed_form_audit() {
    let (code, out, err) = cli(&["report", "--format", "json"]);
    assert_eq!(code, 0, "{err}");
    let v: serde_json::Value = serde_json::from_str(&out).unwrap();
    let spectra = v["spectra"].as_array().unwrap();
    let settings: Vec<(f64, f64)> = spectra
        .iter()
        .map(|s| (s["theta"].as_f64().unwrap(), s["eta"].as_f64().unwrap()))
        .collect();
    let expected = [(0.0, 0.0), (0.5, 0.0), (0.0, 0.5), (0.3, 0.3)];
    let mut ok = settings == expected && v["grid"] == 101;
    let mut worst = 0.0f64;
    let mut failing = Vec::new();
    for s in spectra {
        let printed = &s["printed"];
        let exact = printed["exact"].as_bool().unwrap();
        let dev_nu = printed["nu"]["value"].as_f64();
        let dev_prime = printed["nu_prime"]["value"].as_f64();
        // either exact, or the deviation and its location are listed
        ok &= exact
            || (dev_nu.is_some() && dev_prime.is_some() && printed["convention"] == "printed");
        worst = worst
            .max(dev_nu.unwrap_or(f64::INFINITY))
            .max(dev_prime.unwrap_or(f64::INFINITY));
        if !exact {
            failing.push(format!("({}, {})", s["theta"], s["eta"]));
        }
    }
    ok &= v["metric"]["entry_abs"]["value"].is_number();
    let (code, text, _) = cli(&["report"]);
    ok &= code == 0 && text.contains("max |dnu_-|") && text.contains("max entrywise");
    verdict(
        3,
        "closed-form audit report",
        ok,
        &format!(
            "report written; printed convention fails at (theta, eta) = {}; max |closed - numeric| {worst:.3e}",
            failing.join(" ")
        ),
    );
}

#[test]
fn criterion_4_commutative_limit() {
    let nc = NCParams::new(1e-12, 1e-12).unwrap();
    let opts = IntegrationOptions {
        method: Method::MonteCarloPolar,
        ..IntegrationOptions::figures()
    };
    let e = entangled_volume(nc, 4.0, &opts).unwrap();
    let vol_ok = e.value.abs() <= 2.0 * e.std_error || e.value == 0.0;
    let mut entangled = 0;
    let mut checked = 0;
    for (m, n) in disk_grid(200) {
        checked += 1;
        if classify(&ToyPoint::new(m, n, nc).unwrap(), CLASSIFY_TOL).unwrap()
            == StateClass::Entangled
        {
            entangled += 1;
        }
    }
    verdict(
        4,
        "commutative limit",
        vol_ok && entangled == 0,
        &format!(
            "entangled volume {:.3e} +- {:.1e}; {entangled} entangled of {checked} grid points",
            e.value, e.std_error
        ),
    );
}

#[test]
fn criterion_5_eigenvalues_and_adjugate_trace() {
    let sigma = toy_covariance(&ToyPoint::new(0.6, 0.0, NCParams::COMMUTATIVE).unwrap()).unwrap();
    let ev = eig_symmetric(sigma.matrix()).unwrap();
    let expected = [0.8, 0.8, 0.8, 0.8, 3.2, 3.2, 3.2, 3.2];
    let eig_err = ev
        .iter()
        .zip(expected)
        .map(|(a, b)| (a - b).abs())
        .fold(0.0, f64::max);
    let mut tau_err = 0.0f64;
    for (m, n) in disk_grid(101) {
        let s = toy_covariance(&ToyPoint::new(m, n, NCParams::COMMUTATIVE).unwrap()).unwrap();
        let numeric = adjugate(s.matrix()).unwrap().matrix.trace();
        let closed = toy_adjugate_trace(m, n).unwrap();
        tau_err = tau_err.max((numeric - closed).abs() / closed.abs());
    }
    verdict(
        5,
        "eigenvalue multiplicity and adjugate trace",
        eig_err <= 1e-10 && tau_err <= 1e-10,
        &format!("eigenvalue error {eig_err:.2e}; max relative trace error {tau_err:.2e}"),
    );
}

#[test]
fn criterion_6_monotone_trends() {
    let start = Instant::now();
    let opts = IntegrationOptions::figures();
    let mut notes = Vec::new();
    let mut pass = true;

    let kappas: Vec<f64> = (1..=8).map(|k| 0.5 * k as f64).collect();
    let disk: Vec<f64> = kappas
        .iter()
        .map(|&k| {
            let region = RegionSpec {
                kind: RegionKind::PositiveDisk,
                nc: NCParams::COMMUTATIVE,
            };
            integrate_region(region, k, &opts).unwrap().value
        })
        .collect();
    let kappa_ok = disk.windows(2).all(|w| w[1] > w[0]);
    pass &= kappa_ok;
    notes.push(format!("kappa volume strictly increasing: {kappa_ok}"));

    let grid = linear_grid(0.1, 1.0, 10).unwrap();
    for (param, fixed) in [
        (
            SweepParam::Theta,
            SweepFixed {
                theta: 0.0,
                eta: 0.0,
                kappa: 4.0,
            },
        ),
        (
            SweepParam::Eta,
            SweepFixed {
                theta: 0.0,
                eta: 0.0,
                kappa: 4.0,
            },
        ),
    ] {
        let table = sweep(param, &grid, fixed, &opts).unwrap();
        let trend = table.trend(Column::Ratio);
        let rises = trend.iter().filter(|t| **t == Trend::Increase).count();
        let flats = trend.iter().filter(|t| **t == Trend::Flat).count();
        let ok = !trend.contains(&Trend::Decrease);
        pass &= ok;
        notes.push(format!(
            "{} ratio: {rises} increases, {flats} flat, non-decreasing: {ok}",
            param.name()
        ));
    }
    let elapsed = start.elapsed();
    pass &= elapsed < Duration::from_secs(300);
    notes.push(format!("{:.1}s", elapsed.as_secs_f64()));
    verdict(6, "monotone sweep trends", pass, &notes.join("; "));
}

fn random_matrix(rng: &mut ChaCha8Rng, scale: f64) -> DMatrix<f64> {
    DMatrix::from_fn(8, 8, |_, _| scale * rng.gen_range(-1.0..1.0))
}

#[test]
fn criterion_7_fisher_darboux_invariance() {
    let mut rng = ChaCha8Rng::seed_from_u64(7);
    let mut worst = 0.0f64;
    for _ in 0..50 {
        let a0 = random_matrix(&mut rng, 0.5);
        let a1 = random_matrix(&mut rng, 0.3);
        let a2 = random_matrix(&mut rng, 0.3);
        let family = FnFamily::new(2, move |p: &[f64]| {
            let a = &a0 + &a1 * p[0] + &a2 * p[1];
            let s = &a * a.transpose() + DMatrix::identity(8, 8) * 0.5;
            CovarianceMatrix::new(DenseMatrix::from_nalgebra(s)?)
        });
        let map = bopp_shift(random_nc(&mut rng)).unwrap();
        let pushed = PushedFamily {
            inner: &family,
            map: &map,
        };
        let point = [rng.gen_range(-0.5..0.5), rng.gen_range(-0.5..0.5)];
        let g = fisher_metric_numeric(&family, &point, DEFAULT_STEP).unwrap();
        let h = fisher_metric_numeric(&pushed, &point, DEFAULT_STEP).unwrap();
        worst = worst.max(g.max_abs_diff(&h));
    }
    verdict(
        7,
        "Fisher metric invariance under Darboux maps",
        worst <= 1e-6,
        &format!("50 families, max entrywise deviation {worst:.2e}"),
    );
}

#[test]
fn criterion_8_regularizer_identity() {
    let mut worst = 0.0f64;
    let mut nonzero = 0;
    for kappa in [2.0, 4.0] {
        for (m, n) in disk_grid(101) {
            let sigma =
                toy_covariance(&ToyPoint::new(m, n, NCParams::COMMUTATIVE).unwrap()).unwrap();
            let generic = regularizer(&sigma, kappa, TOY_REGULARIZER_EXPONENT).unwrap();
            let closed = toy_regularizer_closed(m, n, kappa).unwrap();
            if generic == 0.0 && closed == 0.0 {
                continue;
            }
            nonzero += 1;
            worst = worst.max((generic - closed).abs() / closed.abs());
        }
    }
    verdict(
        8,
        "generic regularizer equals closed form",
        worst <= 1e-10,
        &format!("{nonzero} nonzero grid values, max relative deviation {worst:.2e}"),
    );
}

#[test]
fn criterion_9_deterministic_output() {
    let dir = tempfile::tempdir().unwrap();
    let mut files = Vec::new();
    for (run, ext, format) in [
        (0, "csv", "csv"),
        (1, "csv", "csv"),
        (2, "json", "json"),
        (3, "json", "json"),
    ] {
        let path = dir.path().join(format!("run{run}.{ext}"));
        let (code, _, err) = cli(&[
            "sweep",
            "--param",
            "theta",
            "--from",
            "0.2",
            "--to",
            "1.0",
            "--steps",
            "5",
            "--kappa",
            "4",
            "--method",
            "mc-polar",
            "--budget",
            "20000",
            "--seed",
            "11",
            "--format",
            format,
            "--out",
            path.to_str().unwrap(),
        ]);
        assert_eq!(code, 0, "{err}");
        files.push(std::fs::read(&path).unwrap());
    }
    let same = files[0] == files[1] && files[2] == files[3];
    verdict(
        9,
        "byte-identical sweeps for a fixed seed",
        same && !files[0].is_empty(),
        &format!(
            "csv {} bytes, json {} bytes, identical: {same}",
            files[0].len(),
            files[2].len()
        ),
    );
}
