//! Audit of the closed-form toy expressions against the numeric routes.
//!
//! Covers the symplectic eigenvalue formulas (both `ω±` sign assignments),
//! the closed-form metric and its determinant, the covariance eigenvalues
//! and adjugate trace, and the regularized disk volume at the reference
//! value `1.95268`.

use std::fmt::Write as _;

use rayon::prelude::*;
use serde::Serialize;

use crate::error::{Error, Result};
use crate::gaussian::{closed_form_nu, numeric_nu_pair, toy_covariance, OmegaBranch, ToyPoint};
use crate::infogeo::{metric_det_paper, toy_adjugate_trace, toy_metric_numeric, toy_metric_paper};
use crate::numerics::{adjugate, eig_symmetric};
use crate::phase_space::NCParams;
use crate::volume::{
    integrate_region, Density, IntegrationOptions, Method, MetricBackend, RegionKind, RegionSpec,
};

/// Reference value of the regularized disk volume.
pub const ANCHOR_VALUE: f64 = 1.95268;
/// `κ` at which the reference value is quoted.
pub const ANCHOR_KAPPA: f64 = 2.0;
/// Relative tolerance for reproducing the reference value.
pub const ANCHOR_REL_TOL: f64 = 5e-3;
/// Absolute tolerance below which a closed form counts as exact.
pub const EXACT_TOL: f64 = 1e-8;

/// `(θ, η)` settings audited by default.
pub const DEFAULT_SETTINGS: [(f64, f64); 4] = [(0.0, 0.0), (0.5, 0.0), (0.0, 0.5), (0.3, 0.3)];

#[derive(Debug, Clone, PartialEq)]
pub struct ReportOptions {
    /// Points per axis of the grid on `[-1, 1]²`; points with `R ≥ 1` are skipped.
    pub grid: usize,
    pub settings: Vec<(f64, f64)>,
    /// `κ` values scanned when looking for the reference volume.
    pub kappa_scan: Vec<f64>,
    pub budget: usize,
}

impl Default for ReportOptions {
    fn default() -> Self {
        ReportOptions {
            grid: 101,
            settings: DEFAULT_SETTINGS.to_vec(),
            kappa_scan: vec![0.5, 1.0, 2.0, 4.0],
            budget: 40_000,
        }
    }
}

/// Largest deviation over the grid and where it occurred.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct MaxDeviation {
    pub value: f64,
    pub m: f64,
    pub n: f64,
}

impl MaxDeviation {
    fn none() -> Self {
        MaxDeviation {
            value: 0.0,
            m: f64::NAN,
            n: f64::NAN,
        }
    }

    fn merge(self, other: MaxDeviation) -> Self {
        if other.value > self.value || (other.value.is_nan() && !self.value.is_nan()) {
            other
        } else {
            self
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum Convention {
    /// `ν₋` from `ω₋`, `ν′₋` from `ω₊`.
    Printed,
    /// `ν₋` from `ω₊`, `ν′₋` from `ω₋`.
    Swapped,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ConventionAudit {
    pub convention: Convention,
    pub nu: MaxDeviation,
    pub nu_prime: MaxDeviation,
    /// Grid points where a closed-form radicand went negative.
    pub failed_points: usize,
    pub exact: bool,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct SpectrumAudit {
    pub theta: f64,
    pub eta: f64,
    pub points: usize,
    pub printed: ConventionAudit,
    pub swapped: ConventionAudit,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct MetricAudit {
    pub points: usize,
    /// Max entrywise `|closed − numeric|` of the metric tensor.
    pub entry_abs: MaxDeviation,
    /// Same, relative to `max(1, |numeric entry|)`.
    pub entry_rel: MaxDeviation,
    /// Max relative deviation of the closed-form determinant.
    pub det_rel: MaxDeviation,
    /// Points where the closed-form tensor has a negative eigenvalue.
    pub indefinite_points: usize,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct AnchorValue {
    pub kappa: f64,
    pub density: Density,
    pub value: f64,
    pub std_error: f64,
    pub rel_deviation: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct AnchorAudit {
    pub reference: f64,
    pub reference_kappa: f64,
    pub rel_tol: f64,
    /// Both densities at the reference `κ`.
    pub at_reference: Vec<AnchorValue>,
    /// Density reproducing the reference at the reference `κ`, if any.
    pub matching_density: Option<Density>,
    /// Every scanned `(κ, density)`.
    pub scan: Vec<AnchorValue>,
    /// Closest scanned value.
    pub best: AnchorValue,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct EigenAudit {
    /// Numeric eigenvalues of `Σ(0.6, 0)`, ascending.
    pub sample_eigenvalues: Vec<f64>,
    /// Max relative deviation from `(b/2)(1 ± R)` over the grid.
    pub half_b_rel: MaxDeviation,
    /// Max relative deviation from `(2/b)(1 ± R)` over the grid.
    pub two_over_b_rel: MaxDeviation,
    /// Max relative deviation of `Tr[adj Σ]` from `(1-R²)³b⁷/16`.
    pub adjugate_trace_rel: MaxDeviation,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct DiscrepancyReport {
    pub grid: usize,
    pub spectra: Vec<SpectrumAudit>,
    pub metric: MetricAudit,
    pub eigen: EigenAudit,
    pub anchor: AnchorAudit,
}

fn disk_grid(k: usize) -> Vec<(f64, f64)> {
    let h = 2.0 / (k - 1) as f64;
    let axis: Vec<f64> = (0..k).map(|i| -1.0 + h * i as f64).collect();
    let mut pts = Vec::new();
    for &m in &axis {
        for &n in &axis {
            if m.hypot(n) < 1.0 {
                pts.push((m, n));
            }
        }
    }
    pts
}

fn max_over(
    pts: &[(f64, f64)],
    f: impl Fn(f64, f64) -> Result<f64> + Sync,
) -> Result<MaxDeviation> {
    let devs = pts
        .par_iter()
        .map(|&(m, n)| {
            Ok(MaxDeviation {
                value: f(m, n)?,
                m,
                n,
            })
        })
        .collect::<Result<Vec<_>>>()?;
    Ok(devs
        .into_iter()
        .fold(MaxDeviation::none(), MaxDeviation::merge))
}

fn rel(a: f64, b: f64) -> f64 {
    (a - b).abs() / b.abs().max(f64::MIN_POSITIVE)
}

fn audit_spectra(theta: f64, eta: f64, pts: &[(f64, f64)]) -> Result<SpectrumAudit> {
    let nc = NCParams::new(theta, eta)?;
    struct Row {
        m: f64,
        n: f64,
        nu: f64,
        nu_prime: f64,
        plus: Option<f64>,
        minus: Option<f64>,
    }
    let rows = pts
        .par_iter()
        .map(|&(m, n)| {
            let p = ToyPoint::new(m, n, nc)?;
            let (nu, nu_prime) = numeric_nu_pair(&p)?;
            Ok(Row {
                m,
                n,
                nu,
                nu_prime,
                plus: closed_form_nu(&p, OmegaBranch::Plus).ok(),
                minus: closed_form_nu(&p, OmegaBranch::Minus).ok(),
            })
        })
        .collect::<Result<Vec<_>>>()?;
    let audit = |convention: Convention| {
        let mut nu_dev = MaxDeviation::none();
        let mut nu_prime_dev = MaxDeviation::none();
        let mut failed = 0;
        for r in &rows {
            let (for_nu, for_prime) = match convention {
                Convention::Printed => (r.minus, r.plus),
                Convention::Swapped => (r.plus, r.minus),
            };
            match (for_nu, for_prime) {
                (Some(a), Some(b)) => {
                    let at = |value| MaxDeviation {
                        value,
                        m: r.m,
                        n: r.n,
                    };
                    nu_dev = nu_dev.merge(at((a - r.nu).abs()));
                    nu_prime_dev = nu_prime_dev.merge(at((b - r.nu_prime).abs()));
                }
                _ => failed += 1,
            }
        }
        ConventionAudit {
            convention,
            exact: failed == 0 && nu_dev.value <= EXACT_TOL && nu_prime_dev.value <= EXACT_TOL,
            nu: nu_dev,
            nu_prime: nu_prime_dev,
            failed_points: failed,
        }
    };
    Ok(SpectrumAudit {
        theta,
        eta,
        points: rows.len(),
        printed: audit(Convention::Printed),
        swapped: audit(Convention::Swapped),
    })
}

fn audit_metric(pts: &[(f64, f64)]) -> Result<MetricAudit> {
    let pts: Vec<(f64, f64)> = pts
        .iter()
        .copied()
        .filter(|&(m, n)| m.hypot(n) > 0.0)
        .collect();
    struct Row {
        m: f64,
        n: f64,
        abs: f64,
        rel: f64,
        det_rel: f64,
        indefinite: bool,
    }
    let rows = pts
        .par_iter()
        .map(|&(m, n)| {
            let closed = toy_metric_paper(m, n)?;
            let numeric = toy_metric_numeric(m, n)?;
            let mut abs = 0.0f64;
            let mut rel_dev = 0.0f64;
            for i in 0..2 {
                for j in 0..2 {
                    let d = (closed.get(i, j) - numeric.get(i, j)).abs();
                    abs = abs.max(d);
                    rel_dev = rel_dev.max(d / numeric.get(i, j).abs().max(1.0));
                }
            }
            Ok(Row {
                m,
                n,
                abs,
                rel: rel_dev,
                det_rel: rel(metric_det_paper(m, n)?, numeric.determinant()),
                indefinite: closed.min_eigenvalue() < 0.0,
            })
        })
        .collect::<Result<Vec<_>>>()?;
    let max_by = |f: fn(&Row) -> f64| {
        rows.iter()
            .map(|r| MaxDeviation {
                value: f(r),
                m: r.m,
                n: r.n,
            })
            .fold(MaxDeviation::none(), MaxDeviation::merge)
    };
    Ok(MetricAudit {
        points: rows.len(),
        entry_abs: max_by(|r| r.abs),
        entry_rel: max_by(|r| r.rel),
        det_rel: max_by(|r| r.det_rel),
        indefinite_points: rows.iter().filter(|r| r.indefinite).count(),
    })
}

fn audit_eigen(pts: &[(f64, f64)]) -> Result<EigenAudit> {
    let sample = toy_covariance(&ToyPoint::new(0.6, 0.0, NCParams::COMMUTATIVE)?)?;
    let sample_eigenvalues = eig_symmetric(sample.matrix())?;
    let eig_dev = |half_b: bool| {
        max_over(pts, move |m, n| {
            let p = ToyPoint::new(m, n, NCParams::COMMUTATIVE)?;
            let (r, b) = (p.radius(), p.scale());
            let c = if half_b { 0.5 * b } else { 2.0 / b };
            let ev = eig_symmetric(toy_covariance(&p)?.matrix())?;
            let expected = [c * (1.0 - r), c * (1.0 + r)];
            Ok(ev
                .iter()
                .enumerate()
                .map(|(k, &v)| rel(v, expected[k / 4]))
                .fold(0.0, f64::max))
        })
    };
    let adjugate_trace_rel = max_over(pts, |m, n| {
        let sigma = toy_covariance(&ToyPoint::new(m, n, NCParams::COMMUTATIVE)?)?;
        Ok(rel(
            adjugate(sigma.matrix())?.matrix.trace(),
            toy_adjugate_trace(m, n)?,
        ))
    })?;
    Ok(EigenAudit {
        sample_eigenvalues,
        half_b_rel: eig_dev(true)?,
        two_over_b_rel: eig_dev(false)?,
        adjugate_trace_rel,
    })
}

fn anchor_value(kappa: f64, density: Density, budget: usize) -> Result<AnchorValue> {
    let opts = IntegrationOptions {
        backend: MetricBackend::PaperClosedForm,
        density,
        method: Method::GaussLegendrePolar,
        budget,
        ..IntegrationOptions::default()
    };
    let region = RegionSpec {
        kind: RegionKind::PositiveDisk,
        nc: NCParams::COMMUTATIVE,
    };
    let est = integrate_region(region, kappa, &opts)?;
    Ok(AnchorValue {
        kappa,
        density,
        value: est.value,
        std_error: est.std_error,
        rel_deviation: rel(est.value, ANCHOR_VALUE),
    })
}

fn audit_anchor(opts: &ReportOptions) -> Result<AnchorAudit> {
    let densities = [Density::Det, Density::SqrtDet];
    let at_reference = densities
        .iter()
        .map(|&d| anchor_value(ANCHOR_KAPPA, d, opts.budget))
        .collect::<Result<Vec<_>>>()?;
    let matching_density = at_reference
        .iter()
        .filter(|a| a.rel_deviation <= ANCHOR_REL_TOL)
        .min_by(|a, b| a.rel_deviation.total_cmp(&b.rel_deviation))
        .map(|a| a.density);
    let mut scan = Vec::new();
    for &kappa in &opts.kappa_scan {
        for &d in &densities {
            scan.push(anchor_value(kappa, d, opts.budget)?);
        }
    }
    let best = scan
        .iter()
        .chain(&at_reference)
        .min_by(|a, b| a.rel_deviation.total_cmp(&b.rel_deviation))
        .cloned()
        .expect("at least the reference values");
    Ok(AnchorAudit {
        reference: ANCHOR_VALUE,
        reference_kappa: ANCHOR_KAPPA,
        rel_tol: ANCHOR_REL_TOL,
        at_reference,
        matching_density,
        scan,
        best,
    })
}

/// Runs every audit.
pub fn discrepancy_report(opts: &ReportOptions) -> Result<DiscrepancyReport> {
    if opts.grid < 3 {
        return Err(Error::domain(
            "report grid needs at least 3 points per axis",
        ));
    }
    let pts = disk_grid(opts.grid);
    let spectra = opts
        .settings
        .iter()
        .map(|&(t, e)| audit_spectra(t, e, &pts))
        .collect::<Result<Vec<_>>>()?;
    Ok(DiscrepancyReport {
        grid: opts.grid,
        spectra,
        metric: audit_metric(&pts)?,
        eigen: audit_eigen(&pts)?,
        anchor: audit_anchor(opts)?,
    })
}

fn density_name(d: Density) -> &'static str {
    match d {
        Density::Det => "det",
        Density::SqrtDet => "sqrt-det",
    }
}

fn at(d: &MaxDeviation) -> String {
    format!("{:.3e} at (m, n) = ({:.2}, {:.2})", d.value, d.m, d.n)
}

impl DiscrepancyReport {
    pub fn to_json(&self) -> Result<String> {
        serde_json::to_string_pretty(self).map_err(|e| Error::Io(e.to_string()))
    }

    pub fn render_text(&self) -> String {
        let mut s = String::new();
        let w = &mut s;
        let _ = writeln!(
            w,
            "closed-form discrepancy report ({0}x{0} grid on the unit disk)",
            self.grid
        );
        let _ = writeln!(w, "\nsymplectic eigenvalues: closed form vs numeric");
        for a in &self.spectra {
            let _ = writeln!(
                w,
                "  theta = {}, eta = {} ({} points)",
                a.theta, a.eta, a.points
            );
            for c in [&a.printed, &a.swapped] {
                let name = match c.convention {
                    Convention::Printed => "nu_- <- omega_-, nu'_- <- omega_+",
                    Convention::Swapped => "nu_- <- omega_+, nu'_- <- omega_-",
                };
                let _ = writeln!(
                    w,
                    "    {name}: {}; max |dnu_-| {}; max |dnu'_-| {}; negative radicands at {} points",
                    if c.exact { "exact" } else { "FAILS" },
                    at(&c.nu),
                    at(&c.nu_prime),
                    c.failed_points
                );
            }
        }
        let m = &self.metric;
        let _ = writeln!(
            w,
            "\nmetric: closed form g0 + b vs numeric Fisher ({} points, origin skipped)",
            m.points
        );
        let _ = writeln!(
            w,
            "  max entrywise |closed - numeric|: {}",
            at(&m.entry_abs)
        );
        let _ = writeln!(
            w,
            "  max entrywise relative deviation: {}",
            at(&m.entry_rel)
        );
        let _ = writeln!(
            w,
            "  closed-form determinant, max relative deviation: {}",
            at(&m.det_rel)
        );
        let _ = writeln!(
            w,
            "  closed-form tensor indefinite at {} points",
            m.indefinite_points
        );
        let e = &self.eigen;
        let _ = writeln!(w, "\ncovariance eigenvalues");
        let ev: Vec<String> = e
            .sample_eigenvalues
            .iter()
            .map(|v| format!("{v:.12}"))
            .collect();
        let _ = writeln!(w, "  Sigma(0.6, 0): [{}]", ev.join(", "));
        let _ = writeln!(
            w,
            "  vs (b/2)(1 +- R): max relative deviation {}",
            at(&e.half_b_rel)
        );
        let _ = writeln!(
            w,
            "  vs (2/b)(1 +- R): max relative deviation {}",
            at(&e.two_over_b_rel)
        );
        let _ = writeln!(
            w,
            "  Tr adj Sigma vs (1-R^2)^3 b^7/16: max relative deviation {}",
            at(&e.adjugate_trace_rel)
        );
        let a = &self.anchor;
        let _ = writeln!(
            w,
            "\nregularized disk volume vs reference {} at kappa = {} (tolerance {}%)",
            a.reference,
            a.reference_kappa,
            100.0 * a.rel_tol
        );
        for v in &a.at_reference {
            let _ = writeln!(
                w,
                "  {:<8} {:.9} +- {:.1e} (deviation {:.3}%)",
                density_name(v.density),
                v.value,
                v.std_error,
                100.0 * v.rel_deviation
            );
        }
        let _ = match a.matching_density {
            Some(d) => writeln!(w, "  matching density: {}", density_name(d)),
            None => writeln!(w, "  matching density: none"),
        };
        let _ = writeln!(w, "  scan:");
        for v in &a.scan {
            let _ = writeln!(
                w,
                "    kappa = {:<4} {:<8} {:.9} (deviation {:.4}%)",
                v.kappa,
                density_name(v.density),
                v.value,
                100.0 * v.rel_deviation
            );
        }
        let _ = writeln!(
            w,
            "  closest: kappa = {}, density {} ({:.4}%)",
            a.best.kappa,
            density_name(a.best.density),
            100.0 * a.best.rel_deviation
        );
        s
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn small() -> ReportOptions {
        ReportOptions {
            grid: 21,
            kappa_scan: vec![2.0, 4.0],
            budget: 10_000,
            ..Default::default()
        }
    }

    #[test]
    fn grid_stays_inside_disk() {
        let pts = disk_grid(11);
        assert!(pts.iter().all(|&(m, n)| m.hypot(n) < 1.0));
        assert!(pts.contains(&(0.0, 0.0)));
    }

    #[test]
    fn report_content() {
        let r = discrepancy_report(&small()).unwrap();
        assert_eq!(r.spectra.len(), 4);
        // commutative setting: printed assignment of nu_- holds only on part of the disk
        let c = &r.spectra[0];
        assert!(!c.printed.exact);
        assert!(r.metric.det_rel.value < 1e-4, "{:?}", r.metric.det_rel);
        assert!(r.metric.entry_rel.value > 1e-2);
        assert!(r.eigen.half_b_rel.value < 1e-10);
        assert!(r.eigen.two_over_b_rel.value > 0.1);
        assert!(r.eigen.adjugate_trace_rel.value < 1e-10);
        let best = &r.anchor.best;
        assert_eq!((best.kappa, best.density), (4.0, Density::Det));
        assert!(best.rel_deviation < 1e-5);
        let text = r.render_text();
        assert!(text.contains("matching density"));
        assert!(r.to_json().unwrap().contains("\"at_reference\""));
    }
}
