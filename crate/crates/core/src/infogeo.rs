//! Fisher-Rao metric of Gaussian covariance families and the regularizer
//! used to make the volume integrals finite.
//!
//! For a zero-mean Gaussian family `θ ↦ Σ(θ)` the Fisher information is
//! `g_{μν} = ½ Tr[Σ⁻¹ ∂_μΣ Σ⁻¹ ∂_νΣ]`. The numeric path differentiates the
//! family by central differences; the toy family also has closed forms that
//! are kept for auditing.

use nalgebra::DMatrix;

use crate::error::{Error, Result};
use crate::gaussian::{toy_covariance, toy_scale, CovarianceMatrix, ToyPoint};
use crate::numerics::{self, DenseMatrix};
use crate::phase_space::{darboux_conjugate, DarbouxMap, Direction, NCParams};

/// Relative finite-difference step: `h_μ = DEFAULT_STEP · max(1, |θ_μ|)`.
pub const DEFAULT_STEP: f64 = 1e-5;

/// Exponent of `det Σ` inside the regularizer for the two-parameter toy family.
pub const TOY_REGULARIZER_EXPONENT: u32 = 2;

/// Symmetric Fisher-Rao metric at one parameter point.
#[derive(Debug, Clone, PartialEq)]
pub struct MetricTensor {
    entries: DenseMatrix,
}

impl MetricTensor {
    /// Symmetrizes its input.
    pub fn new(entries: DenseMatrix) -> Result<Self> {
        if !entries.is_square() {
            return Err(Error::Dimension("metric must be square".into()));
        }
        Ok(MetricTensor {
            entries: entries.symmetrized(),
        })
    }

    pub fn dim(&self) -> usize {
        self.entries.rows()
    }

    pub fn get(&self, mu: usize, nu: usize) -> f64 {
        self.entries.get(mu, nu)
    }

    pub fn entries(&self) -> &DenseMatrix {
        &self.entries
    }

    pub fn determinant(&self) -> f64 {
        numerics::determinant(&self.entries).expect("square by construction")
    }

    pub fn min_eigenvalue(&self) -> f64 {
        numerics::eig_symmetric(&self.entries).expect("symmetric by construction")[0]
    }

    pub fn max_abs_diff(&self, other: &MetricTensor) -> f64 {
        self.entries.max_abs_diff(&other.entries)
    }
}

/// A smooth map from parameter vectors to covariance matrices.
pub trait CovarianceFamily: Sync {
    fn param_dim(&self) -> usize;

    /// Must be deterministic; an `Err` marks the point as outside the domain.
    fn evaluate(&self, point: &[f64]) -> Result<CovarianceMatrix>;
}

/// Adapts a closure into a [`CovarianceFamily`].
pub struct FnFamily<F> {
    dim: usize,
    f: F,
}

impl<F> FnFamily<F>
where
    F: Fn(&[f64]) -> Result<CovarianceMatrix> + Sync,
{
    pub fn new(dim: usize, f: F) -> Self {
        FnFamily { dim, f }
    }
}

impl<F> CovarianceFamily for FnFamily<F>
where
    F: Fn(&[f64]) -> Result<CovarianceMatrix> + Sync,
{
    fn param_dim(&self) -> usize {
        self.dim
    }

    fn evaluate(&self, point: &[f64]) -> Result<CovarianceMatrix> {
        (self.f)(point)
    }
}

/// The toy family `(m, n) ↦ Σ(m, n)`.
#[derive(Debug, Clone, Copy, Default)]
pub struct ToyFamily;

impl CovarianceFamily for ToyFamily {
    fn param_dim(&self) -> usize {
        2
    }

    fn evaluate(&self, point: &[f64]) -> Result<CovarianceMatrix> {
        if point.len() != 2 {
            return Err(Error::Dimension("toy family takes (m, n)".into()));
        }
        toy_covariance(&ToyPoint::new(point[0], point[1], NCParams::COMMUTATIVE)?)
    }
}

/// A family pushed through a Darboux map: `θ ↦ S Σ(θ) Sᵀ`.
pub struct PushedFamily<'a, F: ?Sized> {
    pub inner: &'a F,
    pub map: &'a DarbouxMap,
}

impl<F: CovarianceFamily + ?Sized> CovarianceFamily for PushedFamily<'_, F> {
    fn param_dim(&self) -> usize {
        self.inner.param_dim()
    }

    fn evaluate(&self, point: &[f64]) -> Result<CovarianceMatrix> {
        darboux_conjugate(&self.inner.evaluate(point)?, self.map, Direction::Push)
    }
}

fn shifted(point: &[f64], mu: usize, delta: f64) -> Vec<f64> {
    let mut p = point.to_vec();
    p[mu] += delta;
    p
}

/// Central difference of the family along coordinate `mu`.
fn central_derivative<F: CovarianceFamily + ?Sized>(
    family: &F,
    point: &[f64],
    mu: usize,
    h: f64,
) -> Result<DMatrix<f64>> {
    let eval = |delta: f64| family.evaluate(&shifted(point, mu, delta));
    match (eval(h), eval(-h)) {
        (Ok(plus), Ok(minus)) => {
            Ok((plus.matrix().as_nalgebra() - minus.matrix().as_nalgebra()) / (2.0 * h))
        }
        _ => {
            // halve until both sides evaluate, to tell the caller what would work
            let mut trial = h;
            for _ in 0..64 {
                trial *= 0.5;
                if eval(trial).is_ok() && eval(-trial).is_ok() {
                    return Err(Error::StepTooLarge { suggested: trial });
                }
            }
            Err(Error::StepTooLarge { suggested: 0.0 })
        }
    }
}

fn fisher_from_derivatives(inv: &DMatrix<f64>, derivs: &[DMatrix<f64>]) -> Result<MetricTensor> {
    let k = derivs.len();
    let products: Vec<DMatrix<f64>> = derivs.iter().map(|d| inv * d).collect();
    let mut g = DMatrix::zeros(k, k);
    for mu in 0..k {
        for nu in mu..k {
            // ½ Tr[A_μ A_ν] without forming the product
            let tr = products[mu].component_mul(&products[nu].transpose()).sum();
            g[(mu, nu)] = 0.5 * tr;
            g[(nu, mu)] = 0.5 * tr;
        }
    }
    MetricTensor::new(DenseMatrix::from_nalgebra(g)?)
}

/// Per-coordinate steps `step · max(1, |θ_μ|)`.
fn steps(point: &[f64], step: f64) -> Vec<f64> {
    point.iter().map(|x| step * x.abs().max(1.0)).collect()
}

fn check_point<F: CovarianceFamily + ?Sized>(family: &F, point: &[f64], step: f64) -> Result<()> {
    if point.len() != family.param_dim() {
        return Err(Error::Dimension(format!(
            "family has {} parameters, point has {}",
            family.param_dim(),
            point.len()
        )));
    }
    if !(step > 0.0) || !step.is_finite() {
        return Err(Error::domain("finite-difference step must be positive"));
    }
    Ok(())
}

/// Fisher-Rao metric from central differences.
///
/// `step` is relative: coordinate `μ` uses `h = step · max(1, |θ_μ|)`. If a
/// perturbed point leaves the family's domain the error carries the largest
/// halved step that stays inside.
pub fn fisher_metric_numeric<F: CovarianceFamily + ?Sized>(
    family: &F,
    point: &[f64],
    step: f64,
) -> Result<MetricTensor> {
    check_point(family, point, step)?;
    let sigma = family.evaluate(point)?;
    let derivs = steps(point, step)
        .into_iter()
        .enumerate()
        .map(|(mu, h)| central_derivative(family, point, mu, h))
        .collect::<Result<Vec<_>>>()?;
    fisher_from_derivatives(sigma.inverse().as_nalgebra(), &derivs)
}

/// Richardson-extrapolated metric from steps `step` and `step/2`.
pub fn fisher_metric_richardson<F: CovarianceFamily + ?Sized>(
    family: &F,
    point: &[f64],
    step: f64,
) -> Result<MetricTensor> {
    check_point(family, point, step)?;
    let sigma = family.evaluate(point)?;
    let derivs = steps(point, step)
        .into_iter()
        .enumerate()
        .map(|(mu, h)| {
            let coarse = central_derivative(family, point, mu, h)?;
            let fine = central_derivative(family, point, mu, 0.5 * h)?;
            Ok((fine * 4.0 - coarse) / 3.0)
        })
        .collect::<Result<Vec<_>>>()?;
    fisher_from_derivatives(sigma.inverse().as_nalgebra(), &derivs)
}

/// Below this radius the toy metric is evaluated on the circle of this
/// radius; the density is continuous at the origin.
const TOY_ORIGIN_RADIUS: f64 = 1e-8;

/// Numeric Fisher metric of the toy family at `(m, n)`.
///
/// The family depends on `R = |(m, n)|` through `b`, which has a kink at the
/// origin, so the step is capped at `R/4` and points closer than `1e-8` to
/// the origin are moved out to that radius.
pub fn toy_metric_numeric(m: f64, n: f64) -> Result<MetricTensor> {
    let r = m.hypot(n);
    let (m, n, r) = if r < TOY_ORIGIN_RADIUS {
        if r == 0.0 {
            (TOY_ORIGIN_RADIUS, 0.0, TOY_ORIGIN_RADIUS)
        } else {
            let s = TOY_ORIGIN_RADIUS / r;
            (m * s, n * s, TOY_ORIGIN_RADIUS)
        }
    } else {
        (m, n, r)
    };
    let step = DEFAULT_STEP.min(0.25 * r).min(0.25 * (1.0 - r));
    fisher_metric_numeric(&ToyFamily, &[m, n], step)
}

/// `(g⁰, b)` from the printed closed forms; `g = g⁰ + b`.
pub fn toy_metric_paper_parts(m: f64, n: f64) -> Result<(MetricTensor, MetricTensor)> {
    let r2 = m * m + n * n;
    let r = r2.sqrt();
    if !(r < 1.0) {
        return Err(Error::domain("outside positivity disk"));
    }
    if r2 == 0.0 {
        return Err(Error::Numerical(
            "closed-form b_{μν} is singular at R = 0; use the numeric metric".into(),
        ));
    }
    let q = (1.0 - r2).powi(2);
    let g0 = DenseMatrix::from_row_slice(
        2,
        2,
        &[
            4.0 * (1.0 - m * m + n * n) / q,
            8.0 * m * n / q,
            8.0 * m * n / q,
            4.0 * (1.0 + m * m - n * n) / q,
        ],
    )?;
    let den = r2 * (r2 - 1.0) * (r + 1.0);
    let b = DenseMatrix::from_row_slice(
        2,
        2,
        &[
            16.0 * n * n / den,
            16.0 * m * n / den,
            16.0 * m * n / den,
            16.0 * m * m / den,
        ],
    )?;
    Ok((MetricTensor::new(g0)?, MetricTensor::new(b)?))
}

/// Printed closed-form toy metric `[g⁰_{μν} + b_{μν}]`.
pub fn toy_metric_paper(m: f64, n: f64) -> Result<MetricTensor> {
    let (g0, b) = toy_metric_paper_parts(m, n)?;
    let sum = g0.entries.as_nalgebra() + b.entries.as_nalgebra();
    MetricTensor::new(DenseMatrix::from_nalgebra(sum)?)
}

/// Closed-form metric determinant `Δ_g = 16/(1-R²)³ · [1 + (2-R)²]`.
pub fn metric_det_paper(m: f64, n: f64) -> Result<f64> {
    let r = m.hypot(n);
    if !(r < 1.0) {
        return Err(Error::domain("outside positivity disk"));
    }
    Ok(16.0 / (1.0 - r * r).powi(3) * (1.0 + (2.0 - r).powi(2)))
}

/// `Υ(Σ) = exp(-Tr[adj Σ]/κ) · ln(1 + (det Σ)^exponent)`.
pub fn regularizer(sigma: &CovarianceMatrix, kappa: f64, exponent: u32) -> Result<f64> {
    if !(kappa > 0.0) || !kappa.is_finite() {
        return Err(Error::domain(format!(
            "kappa must be positive, got {kappa}"
        )));
    }
    if exponent == 0 {
        return Err(Error::domain("regularizer exponent must be at least 1"));
    }
    let adj = numerics::adjugate(sigma.matrix())?;
    let tau = adj.matrix.trace();
    let det = sigma.determinant();
    Ok((-tau / kappa).exp() * det.powi(exponent as i32).ln_1p())
}

/// `Tr[adj Σ] = (1-R²)³ b⁷ / 16` for the toy family.
pub fn toy_adjugate_trace(m: f64, n: f64) -> Result<f64> {
    let r = m.hypot(n);
    if !(r < 1.0) {
        return Err(Error::domain("outside positivity disk"));
    }
    Ok((1.0 - r * r).powi(3) * toy_scale(r).powi(7) / 16.0)
}

/// Closed-form toy regularizer `e^{-τ/κ} ln[1 + b²τ²(1-R²)²/2⁸]`.
pub fn toy_regularizer_closed(m: f64, n: f64, kappa: f64) -> Result<f64> {
    if !(kappa > 0.0) || !kappa.is_finite() {
        return Err(Error::domain(format!(
            "kappa must be positive, got {kappa}"
        )));
    }
    let tau = toy_adjugate_trace(m, n)?;
    let r = m.hypot(n);
    let b = toy_scale(r);
    let arg = (b * tau * (1.0 - r * r)).powi(2) / 256.0;
    Ok((-tau / kappa).exp() * arg.ln_1p())
}
