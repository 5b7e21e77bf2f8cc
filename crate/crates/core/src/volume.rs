//! Regularized volumes of the toy parameter regions.
//!
//! The volume of a region `Θ ⊆ {m² + n² < 1}` is `∫_Θ Υ(Σ) D dm dn` with
//! `D = Δ_g` or `√Δ_g`. Integrands are only evaluated for `R ≤ 1 - 1e-9`;
//! the regularizer has underflowed to zero long before that radius.
//!
//! Three samplers share one evaluation pipeline: stratified Monte Carlo in
//! polar coordinates, plain Monte Carlo with rejection from the square, and
//! tensor Gauss-Legendre in polar coordinates. Point evaluations run in
//! parallel and are reduced in a fixed pairwise order, so a given
//! `(method, budget, seed)` always produces bit-identical results.

use std::f64::consts::PI;
use std::num::NonZeroUsize;

use gauss_quad::GaussLegendre;
use nalgebra::DMatrix;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::gaussian::{
    class_from_spectra, spectrum_with_inverse, toy_covariance, StateClass, ToyPoint, CLASSIFY_TOL,
};
use crate::infogeo::{
    metric_det_paper, regularizer, toy_metric_numeric, toy_regularizer_closed,
    TOY_REGULARIZER_EXPONENT,
};
use crate::numerics::pairwise_sum;
use crate::phase_space::{nc_form, ppt_form, NCParams};

/// Integrands are evaluated only for `R` up to this radius.
pub const MAX_RADIUS: f64 = 1.0 - 1e-9;

/// Smallest accepted evaluation budget.
pub const MIN_BUDGET: usize = 10_000;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum RegionKind {
    PositiveDisk,
    Quantum,
    Separable,
    Entangled,
}

impl RegionKind {
    fn contains(self, class: StateClass) -> bool {
        match self {
            RegionKind::PositiveDisk => true,
            RegionKind::Quantum => class != StateClass::Unphysical,
            RegionKind::Separable => class == StateClass::Separable,
            RegionKind::Entangled => class == StateClass::Entangled,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct RegionSpec {
    pub kind: RegionKind,
    pub nc: NCParams,
}

/// Source of the metric density.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum MetricBackend {
    /// Closed-form determinant `16/(1-R²)³[1+(2-R)²]` and closed-form regularizer.
    PaperClosedForm,
    /// Determinant of the finite-difference Fisher metric and the generic
    /// adjugate-based regularizer.
    NumericFisher,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Density {
    Det,
    SqrtDet,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Method {
    /// Stratified Monte Carlo over `(r, φ)`, two samples per stratum.
    MonteCarloPolar,
    /// Uniform samples on `[-1, 1]²`, rejected outside the disk.
    MonteCarloCartesian,
    /// Tensor Gauss-Legendre in `(r, φ)`; error is the difference to the
    /// half-resolution rule.
    GaussLegendrePolar,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct IntegrationOptions {
    pub backend: MetricBackend,
    pub density: Density,
    pub method: Method,
    pub budget: usize,
    pub seed: u64,
    /// Tolerance on the `ν ≥ 1` thresholds.
    pub tol: f64,
}

impl Default for IntegrationOptions {
    fn default() -> Self {
        IntegrationOptions {
            backend: MetricBackend::NumericFisher,
            density: Density::Det,
            method: Method::MonteCarloPolar,
            budget: 40_000,
            seed: 0,
            tol: CLASSIFY_TOL,
        }
    }
}

impl IntegrationOptions {
    /// Settings used to regenerate the published figures: closed-form metric,
    /// `Δ_g` density, Gauss-Legendre quadrature.
    pub fn figures() -> Self {
        IntegrationOptions {
            backend: MetricBackend::PaperClosedForm,
            density: Density::Det,
            method: Method::GaussLegendrePolar,
            budget: 40_000,
            ..Default::default()
        }
    }

    fn validate(&self) -> Result<()> {
        if self.budget < MIN_BUDGET {
            return Err(Error::domain(format!(
                "budget must be at least {MIN_BUDGET}, got {}",
                self.budget
            )));
        }
        if !(self.tol >= 0.0) || !self.tol.is_finite() {
            return Err(Error::domain("tolerance must be a non-negative number"));
        }
        Ok(())
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct IntegralEstimate {
    pub value: f64,
    pub std_error: f64,
    /// Integrand evaluations spent.
    pub evals: usize,
    pub method: Method,
    /// Evaluation points that fell inside the region.
    pub accepted: usize,
}

impl IntegralEstimate {
    /// True when no evaluation point landed in the region; the value is then 0.
    pub fn is_zero_measure(&self) -> bool {
        self.accepted == 0
    }

    /// `√(σ₁² + σ₂²)`.
    pub fn combined_error(&self, other: &IntegralEstimate) -> f64 {
        self.std_error.hypot(other.std_error)
    }
}

/// Estimates for all regions from one shared set of evaluation points.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct RegionVolumes {
    pub positive: IntegralEstimate,
    pub quantum: IntegralEstimate,
    pub separable: IntegralEstimate,
    /// Sum over points classified entangled, hence `≥ 0` exactly and equal to
    /// `quantum - separable` up to rounding.
    pub entangled: IntegralEstimate,
}

impl RegionVolumes {
    pub fn get(&self, kind: RegionKind) -> IntegralEstimate {
        match kind {
            RegionKind::PositiveDisk => self.positive,
            RegionKind::Quantum => self.quantum,
            RegionKind::Separable => self.separable,
            RegionKind::Entangled => self.entangled,
        }
    }
}

/// How weighted samples combine into a value and an error.
enum Layout {
    /// Consecutive pairs share a stratum.
    StratifiedPairs,
    /// Independent identically distributed samples.
    Plain,
    /// The first `coarse` points are the half-resolution rule.
    Refinement { coarse: usize },
}

struct SampleSet {
    points: Vec<[f64; 2]>,
    weights: Vec<f64>,
    layout: Layout,
}

fn stratified_polar(budget: usize, seed: u64) -> SampleSet {
    let strata = budget / 2;
    let n_r = (strata as f64).sqrt().ceil() as usize;
    let n_phi = strata / n_r;
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let area = MAX_RADIUS * 2.0 * PI / (n_r * n_phi) as f64;
    let mut points = Vec::with_capacity(2 * n_r * n_phi);
    let mut weights = Vec::with_capacity(points.capacity());
    for i in 0..n_r {
        for j in 0..n_phi {
            for _ in 0..2 {
                let r = MAX_RADIUS * (i as f64 + rng.gen::<f64>()) / n_r as f64;
                let phi = 2.0 * PI * (j as f64 + rng.gen::<f64>()) / n_phi as f64;
                points.push([r * phi.cos(), r * phi.sin()]);
                weights.push(0.5 * area * r);
            }
        }
    }
    SampleSet {
        points,
        weights,
        layout: Layout::StratifiedPairs,
    }
}

fn cartesian_rejection(budget: usize, seed: u64) -> SampleSet {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let w = 4.0 / budget as f64;
    let mut points = Vec::with_capacity(budget);
    let mut weights = Vec::with_capacity(budget);
    for _ in 0..budget {
        let m = 2.0 * rng.gen::<f64>() - 1.0;
        let n = 2.0 * rng.gen::<f64>() - 1.0;
        points.push([m, n]);
        weights.push(if m.hypot(n) <= MAX_RADIUS { w } else { 0.0 });
    }
    SampleSet {
        points,
        weights,
        layout: Layout::Plain,
    }
}

fn legendre_rule(order: usize, a: f64, b: f64) -> Vec<(f64, f64)> {
    let rule = GaussLegendre::new(NonZeroUsize::new(order).expect("order >= 1"));
    let (half, mid) = (0.5 * (b - a), 0.5 * (a + b));
    rule.as_node_weight_pairs()
        .iter()
        .map(|&(x, w)| (mid + half * x, half * w))
        .collect()
}

fn polar_tensor(order: usize, points: &mut Vec<[f64; 2]>, weights: &mut Vec<f64>) {
    let radial = legendre_rule(order, 0.0, MAX_RADIUS);
    let angular = legendre_rule(order, 0.0, 2.0 * PI);
    for &(r, wr) in &radial {
        for &(phi, wp) in &angular {
            points.push([r * phi.cos(), r * phi.sin()]);
            weights.push(wr * wp * r);
        }
    }
}

fn gauss_legendre_polar(budget: usize) -> SampleSet {
    // fine rule N×N plus coarse rule (N/2)×(N/2) within the budget
    let order = ((budget as f64 / 1.25).sqrt().floor() as usize).max(2);
    let coarse = (order / 2).max(1);
    let mut points = Vec::new();
    let mut weights = Vec::new();
    polar_tensor(coarse, &mut points, &mut weights);
    let coarse_len = points.len();
    polar_tensor(order, &mut points, &mut weights);
    SampleSet {
        points,
        weights,
        layout: Layout::Refinement { coarse: coarse_len },
    }
}

fn sample_set(method: Method, budget: usize, seed: u64) -> SampleSet {
    match method {
        Method::MonteCarloPolar => stratified_polar(budget, seed),
        Method::MonteCarloCartesian => cartesian_rejection(budget, seed),
        Method::GaussLegendrePolar => gauss_legendre_polar(budget),
    }
}

/// Value and standard error from weighted terms `w_i f_i`.
fn combine(terms: &[f64], layout: &Layout) -> (f64, f64) {
    match *layout {
        Layout::StratifiedPairs => {
            let value = pairwise_sum(terms);
            let sq: Vec<f64> = terms.chunks(2).map(|p| (p[0] - p[1]).powi(2)).collect();
            (value, pairwise_sum(&sq).sqrt())
        }
        Layout::Plain => {
            let n = terms.len() as f64;
            let value = pairwise_sum(terms);
            // terms are g_i / n; the estimate is mean(g) with variance var(g)/n
            let mean = value / n;
            let sq: Vec<f64> = terms.iter().map(|t| (t - mean).powi(2)).collect();
            let var_g = n * n * pairwise_sum(&sq) / (n - 1.0);
            (value, (var_g / n).sqrt())
        }
        Layout::Refinement { coarse } => {
            let c = pairwise_sum(&terms[..coarse]);
            let f = pairwise_sum(&terms[coarse..]);
            (f, (f - c).abs())
        }
    }
}

/// Evaluates `Υ·D` and the state class at one `(m, n)`.
struct PointEvaluator {
    nc: NCParams,
    kappa: f64,
    backend: MetricBackend,
    density: Density,
    tol: f64,
    /// `(Ω⁻¹, Ω′⁻¹)` when classes are needed.
    inverses: Option<(DMatrix<f64>, DMatrix<f64>)>,
}

#[derive(Debug, Clone, Copy)]
struct PointValue {
    integrand: f64,
    class: StateClass,
    inside: bool,
}

impl PointEvaluator {
    fn new(nc: NCParams, kappa: f64, opts: &IntegrationOptions, classify: bool) -> Result<Self> {
        if !(kappa > 0.0) || !kappa.is_finite() {
            return Err(Error::domain(format!(
                "kappa must be positive, got {kappa}"
            )));
        }
        let inverses = if classify {
            let omega = nc_form(nc);
            Some((
                omega.inverse()?.into_nalgebra(),
                ppt_form(&omega).inverse()?.into_nalgebra(),
            ))
        } else {
            None
        };
        Ok(PointEvaluator {
            nc,
            kappa,
            backend: opts.backend,
            density: opts.density,
            tol: opts.tol,
            inverses,
        })
    }

    fn eval(&self, [m, n]: [f64; 2]) -> Result<PointValue> {
        if m.hypot(n) > MAX_RADIUS {
            return Ok(PointValue {
                integrand: 0.0,
                class: StateClass::Unphysical,
                inside: false,
            });
        }
        let point = ToyPoint::new(m, n, self.nc)?;
        let sigma = toy_covariance(&point)?;
        let (upsilon, det) = match self.backend {
            MetricBackend::PaperClosedForm => (
                toy_regularizer_closed(m, n, self.kappa)?,
                metric_det_paper(m, n)?,
            ),
            MetricBackend::NumericFisher => (
                regularizer(&sigma, self.kappa, TOY_REGULARIZER_EXPONENT)?,
                toy_metric_numeric(m, n)?.determinant(),
            ),
        };
        let density = match self.density {
            Density::Det => det,
            Density::SqrtDet => det.max(0.0).sqrt(),
        };
        let integrand = if upsilon == 0.0 {
            0.0
        } else {
            upsilon * density
        };
        let class = match &self.inverses {
            Some((inv, inv_prime)) => {
                let nu = spectrum_with_inverse(&sigma, inv).min();
                let nu_prime = spectrum_with_inverse(&sigma, inv_prime).min();
                class_from_spectra(nu, nu_prime, self.tol)
            }
            None => StateClass::Separable,
        };
        Ok(PointValue {
            integrand,
            class,
            inside: true,
        })
    }
}

fn evaluate_all(eval: &PointEvaluator, samples: &SampleSet) -> Result<Vec<PointValue>> {
    samples.points.par_iter().map(|&p| eval.eval(p)).collect()
}

fn estimate(
    kind: RegionKind,
    values: &[PointValue],
    samples: &SampleSet,
    method: Method,
) -> IntegralEstimate {
    let mut accepted = 0;
    let terms: Vec<f64> = values
        .iter()
        .zip(&samples.weights)
        .map(|(v, &w)| {
            if v.inside && w > 0.0 && kind.contains(v.class) {
                accepted += 1;
                w * v.integrand
            } else {
                0.0
            }
        })
        .collect();
    let (value, std_error) = if accepted == 0 {
        (0.0, 0.0)
    } else {
        combine(&terms, &samples.layout)
    };
    IntegralEstimate {
        value,
        std_error,
        evals: values.len(),
        method,
        accepted,
    }
}

/// `∫_region Υ·D dm dn`.
pub fn integrate_region(
    region: RegionSpec,
    kappa: f64,
    opts: &IntegrationOptions,
) -> Result<IntegralEstimate> {
    opts.validate()?;
    let classify = region.kind != RegionKind::PositiveDisk;
    let eval = PointEvaluator::new(region.nc, kappa, opts, classify)?;
    let samples = sample_set(opts.method, opts.budget, opts.seed);
    let values = evaluate_all(&eval, &samples)?;
    Ok(estimate(region.kind, &values, &samples, opts.method))
}

/// All region volumes from one shared set of evaluation points.
pub fn region_volumes(
    nc: NCParams,
    kappa: f64,
    opts: &IntegrationOptions,
) -> Result<RegionVolumes> {
    opts.validate()?;
    let eval = PointEvaluator::new(nc, kappa, opts, true)?;
    let samples = sample_set(opts.method, opts.budget, opts.seed);
    let values = evaluate_all(&eval, &samples)?;
    let est = |kind| estimate(kind, &values, &samples, opts.method);
    Ok(RegionVolumes {
        positive: est(RegionKind::PositiveDisk),
        quantum: est(RegionKind::Quantum),
        separable: est(RegionKind::Separable),
        entangled: est(RegionKind::Entangled),
    })
}

/// `Γ_quantum − Γ_separable`, computed on common evaluation points so the
/// result is nonnegative.
pub fn entangled_volume(
    nc: NCParams,
    kappa: f64,
    opts: &IntegrationOptions,
) -> Result<IntegralEstimate> {
    integrate_region(
        RegionSpec {
            kind: RegionKind::Entangled,
            nc,
        },
        kappa,
        opts,
    )
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum SweepParam {
    Kappa,
    Theta,
    Eta,
}

impl SweepParam {
    pub fn name(self) -> &'static str {
        match self {
            SweepParam::Kappa => "kappa",
            SweepParam::Theta => "theta",
            SweepParam::Eta => "eta",
        }
    }
}

impl std::str::FromStr for SweepParam {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "kappa" => Ok(SweepParam::Kappa),
            "theta" => Ok(SweepParam::Theta),
            "eta" => Ok(SweepParam::Eta),
            other => Err(Error::domain(format!("unknown sweep parameter {other:?}"))),
        }
    }
}

/// Values of the parameters not being swept.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SweepFixed {
    pub theta: f64,
    pub eta: f64,
    pub kappa: f64,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SweepRow {
    pub param: f64,
    pub quantum: IntegralEstimate,
    pub separable: IntegralEstimate,
    pub entangled: IntegralEstimate,
    /// `Γ_entangled / Γ_separable`; NaN when the separable volume is zero.
    pub ratio: f64,
    pub ratio_std_error: f64,
}

impl SweepRow {
    fn new(param: f64, v: &RegionVolumes) -> Self {
        let (e, s) = (v.entangled, v.separable);
        let (ratio, ratio_std_error) = if s.value > 0.0 {
            let r = e.value / s.value;
            let rel_s = s.std_error / s.value;
            let err = if e.value > 0.0 {
                r * ((e.std_error / e.value).powi(2) + rel_s.powi(2)).sqrt()
            } else {
                e.std_error / s.value
            };
            (r, err)
        } else {
            (f64::NAN, f64::NAN)
        };
        SweepRow {
            param,
            quantum: v.quantum,
            separable: v.separable,
            entangled: v.entangled,
            ratio,
            ratio_std_error,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Column {
    Quantum,
    Separable,
    Entangled,
    Ratio,
}

impl Column {
    pub fn name(self) -> &'static str {
        match self {
            Column::Quantum => "gamma_quantum",
            Column::Separable => "gamma_separable",
            Column::Entangled => "gamma_entangled",
            Column::Ratio => "ratio",
        }
    }
}

/// Change between consecutive grid values, judged against two combined
/// standard errors.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Trend {
    Increase,
    /// Within two combined standard errors of the predecessor.
    Flat,
    Decrease,
}

#[derive(Debug, Clone, PartialEq)]
pub struct SweepTable {
    pub parameter: SweepParam,
    pub rows: Vec<SweepRow>,
}

impl SweepTable {
    pub fn column(&self, col: Column) -> Vec<(f64, f64)> {
        self.rows
            .iter()
            .map(|r| match col {
                Column::Quantum => (r.quantum.value, r.quantum.std_error),
                Column::Separable => (r.separable.value, r.separable.std_error),
                Column::Entangled => (r.entangled.value, r.entangled.std_error),
                Column::Ratio => (r.ratio, r.ratio_std_error),
            })
            .collect()
    }

    /// One entry per consecutive pair of rows.
    pub fn trend(&self, col: Column) -> Vec<Trend> {
        self.column(col)
            .windows(2)
            .map(|w| {
                let (a, ea) = w[0];
                let (b, eb) = w[1];
                let band = 2.0 * ea.hypot(eb);
                if b - a > band {
                    Trend::Increase
                } else if a - b > band {
                    Trend::Decrease
                } else {
                    Trend::Flat
                }
            })
            .collect()
    }
}

/// `steps` evenly spaced values from `from` to `to` inclusive.
pub fn linear_grid(from: f64, to: f64, steps: usize) -> Result<Vec<f64>> {
    if steps == 0 {
        return Err(Error::domain("grid needs at least one step"));
    }
    if !from.is_finite() || !to.is_finite() {
        return Err(Error::domain("grid bounds must be finite"));
    }
    if steps == 1 {
        return Ok(vec![from]);
    }
    if !(to > from) {
        return Err(Error::domain(
            "grid must be strictly increasing (need to > from)",
        ));
    }
    let h = (to - from) / (steps - 1) as f64;
    Ok((0..steps)
        .map(|k| {
            if k + 1 == steps {
                to
            } else {
                from + h * k as f64
            }
        })
        .collect())
}

/// Volumes and entangled/separable ratio along a one-parameter grid. Every
/// grid value reuses the same evaluation points (same seed).
pub fn sweep(
    parameter: SweepParam,
    grid: &[f64],
    fixed: SweepFixed,
    opts: &IntegrationOptions,
) -> Result<SweepTable> {
    if grid.is_empty() {
        return Err(Error::domain("sweep grid is empty"));
    }
    if grid.iter().any(|x| !x.is_finite()) || grid.windows(2).any(|w| !(w[1] > w[0])) {
        return Err(Error::domain(
            "sweep grid must be finite and strictly increasing",
        ));
    }
    let settings: Vec<(NCParams, f64)> = grid
        .iter()
        .map(|&x| {
            let (theta, eta, kappa) = match parameter {
                SweepParam::Kappa => (fixed.theta, fixed.eta, x),
                SweepParam::Theta => (x, fixed.eta, fixed.kappa),
                SweepParam::Eta => (fixed.theta, x, fixed.kappa),
            };
            if !(kappa > 0.0) {
                return Err(Error::domain(format!(
                    "kappa must be positive, got {kappa}"
                )));
            }
            Ok((NCParams::new(theta, eta)?, kappa))
        })
        .collect::<Result<_>>()?;
    let rows = grid
        .iter()
        .zip(settings)
        .map(|(&x, (nc, kappa))| Ok(SweepRow::new(x, &region_volumes(nc, kappa, opts)?)))
        .collect::<Result<Vec<_>>>()?;
    Ok(SweepTable { parameter, rows })
}
