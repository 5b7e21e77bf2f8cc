//! Gaussian covariance matrices, symplectic spectra and the separability
//! classifier for the two-mode-per-party toy family.

use nalgebra::DMatrix;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::numerics::{self, DenseMatrix};
use crate::phase_space::{nc_form, ppt_form, NCParams, SymplecticForm};

/// Default tolerance on the `ν ≥ 1` thresholds.
pub const CLASSIFY_TOL: f64 = 1e-9;

/// Closed-form vs numeric disagreement above which the numeric value wins.
pub const CLOSED_FORM_TOL: f64 = 1e-6;

/// Radicands in `[-RADICAND_CLAMP, 0)` are treated as zero.
pub const RADICAND_CLAMP: f64 = 1e-12;

/// Real parts of `Ω⁻¹Σ` eigenvalues allowed relative to the spectral scale.
const REAL_PART_TOL: f64 = 1e-8;

/// Symmetric positive-definite covariance matrix of a Gaussian state.
#[derive(Debug, Clone, PartialEq)]
pub struct CovarianceMatrix {
    matrix: DenseMatrix,
}

impl CovarianceMatrix {
    /// Validates symmetry (relative `1e-12`) and positive definiteness. The
    /// stored matrix is the symmetrized input.
    pub fn new(matrix: DenseMatrix) -> Result<Self> {
        if !matrix.is_square() {
            return Err(Error::Dimension(format!(
                "covariance must be square, got {}x{}",
                matrix.rows(),
                matrix.cols()
            )));
        }
        let asym = matrix.asymmetry();
        if asym > numerics::SYMMETRY_TOL {
            return Err(Error::NotSymmetric(asym));
        }
        let matrix = matrix.symmetrized();
        if matrix.as_nalgebra().clone().cholesky().is_none() {
            return Err(Error::Numerical(
                "covariance is not positive definite".into(),
            ));
        }
        Ok(CovarianceMatrix { matrix })
    }

    pub fn matrix(&self) -> &DenseMatrix {
        &self.matrix
    }

    pub fn dim(&self) -> usize {
        self.matrix.rows()
    }

    pub fn determinant(&self) -> f64 {
        numerics::determinant(&self.matrix).expect("square by construction")
    }

    pub fn inverse(&self) -> DenseMatrix {
        let inv = self
            .matrix
            .as_nalgebra()
            .clone()
            .cholesky()
            .expect("positive definite by construction")
            .inverse();
        DenseMatrix::from_trusted(inv)
    }
}

/// A point `(m, n)` of the toy covariance family together with the
/// noncommutativity parameters.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ToyPoint {
    pub m: f64,
    pub n: f64,
    pub nc: NCParams,
}

impl ToyPoint {
    pub fn new(m: f64, n: f64, nc: NCParams) -> Result<Self> {
        if !m.is_finite() || !n.is_finite() {
            return Err(Error::domain("m and n must be finite"));
        }
        let p = ToyPoint { m, n, nc };
        if p.radius() >= 1.0 {
            return Err(Error::domain(format!(
                "(m, n) = ({m}, {n}) is outside positivity disk (R = {})",
                p.radius()
            )));
        }
        Ok(p)
    }

    /// `R = √(m² + n²)`.
    pub fn radius(&self) -> f64 {
        self.m.hypot(self.n)
    }

    /// Scale `b = (1+R)/(1-R)`.
    pub fn scale(&self) -> f64 {
        toy_scale(self.radius())
    }
}

pub(crate) fn toy_scale(r: f64) -> f64 {
    (1.0 + r) / (1.0 - r)
}

/// `Σ = (b/2)[[I₄, γᵀ], [γ, I₄]]` with `γ = [[nI₂, mσ_z], [mσ_z, -nI₂]]`.
pub fn toy_covariance(p: &ToyPoint) -> Result<CovarianceMatrix> {
    let r = p.radius();
    if !(r < 1.0) {
        return Err(Error::domain("outside positivity disk"));
    }
    let half_b = 0.5 * toy_scale(r);
    let (m, n) = (p.m, p.n);
    #[rustfmt::skip]
    let gamma = DMatrix::from_row_slice(4, 4, &[
        n,   0.0, m,   0.0,
        0.0, n,   0.0, -m,
        m,   0.0, -n,  0.0,
        0.0, -m,  0.0, -n,
    ]);
    let mut s = DMatrix::identity(8, 8);
    s.view_mut((4, 0), (4, 4)).copy_from(&gamma);
    s.view_mut((0, 4), (4, 4)).copy_from(&gamma.transpose());
    CovarianceMatrix::new(DenseMatrix::from_trusted(s * half_b))
}

/// Positive symplectic eigenvalues, ascending, one per mode.
#[derive(Debug, Clone, PartialEq)]
pub struct SymplecticSpectrum {
    pub values: Vec<f64>,
}

impl SymplecticSpectrum {
    pub fn min(&self) -> f64 {
        self.values[0]
    }

    pub fn max_abs_diff(&self, other: &SymplecticSpectrum) -> f64 {
        assert_eq!(self.values.len(), other.values.len());
        self.values
            .iter()
            .zip(&other.values)
            .fold(0.0_f64, |acc, (a, b)| acc.max((a - b).abs()))
    }
}

fn check_dims(sigma: &CovarianceMatrix, omega: &SymplecticForm) -> Result<()> {
    if sigma.dim() != omega.split().dim() {
        return Err(Error::Dimension(format!(
            "covariance is {0}x{0}, form is {1}x{1}",
            sigma.dim(),
            omega.split().dim()
        )));
    }
    Ok(())
}

/// Symplectic spectrum of `Σ` relative to `Ω`: the `ν > 0` with `±iν/2`
/// eigenvalues of `Ω⁻¹Σ`.
///
/// Computed in real arithmetic: with `Σ = LLᵀ`, `K = LᵀΩ⁻¹L` is similar to
/// `Ω⁻¹Σ` and antisymmetric, so the singular values of `2K` are the `ν`,
/// each twice. Taking singular values rather than eigenvalues of `KᵀK`
/// keeps the absolute error near `ε·ν_max` instead of `ε·ν_max²/ν_min`.
pub fn symplectic_spectrum(
    sigma: &CovarianceMatrix,
    omega: &SymplecticForm,
) -> Result<SymplecticSpectrum> {
    check_dims(sigma, omega)?;
    let inv = omega.inverse()?;
    Ok(spectrum_with_inverse(sigma, inv.as_nalgebra()))
}

/// Same as [`symplectic_spectrum`] with a precomputed `Ω⁻¹`.
pub(crate) fn spectrum_with_inverse(
    sigma: &CovarianceMatrix,
    omega_inv: &DMatrix<f64>,
) -> SymplecticSpectrum {
    let l = sigma
        .matrix
        .as_nalgebra()
        .clone()
        .cholesky()
        .expect("positive definite by construction")
        .unpack();
    let k = l.transpose() * omega_inv * &l;
    // exact antisymmetrization: 2K
    let k = &k - k.transpose();
    let mut sv: Vec<f64> = k.singular_values().iter().copied().collect();
    sv.sort_by(f64::total_cmp);
    let values = sv.chunks(2).map(|pair| 0.5 * (pair[0] + pair[1])).collect();
    SymplecticSpectrum { values }
}

/// Symplectic spectrum from a general complex eigensolve of `2Ω⁻¹Σ`.
///
/// Independent of [`symplectic_spectrum`]; reports eigenvalues whose real
/// part is not negligible (relative `1e-8`) as an invalid spectrum.
pub fn symplectic_spectrum_general(
    sigma: &CovarianceMatrix,
    omega: &SymplecticForm,
) -> Result<SymplecticSpectrum> {
    check_dims(sigma, omega)?;
    let inv = omega.inverse()?;
    let a = inv.mul(&sigma.matrix)?;
    let a = DenseMatrix::from_trusted(a.into_nalgebra() * 2.0);
    let ev = numerics::spectrum_real_general(&a)?;
    let scale = ev.iter().fold(0.0_f64, |acc, z| acc.max(z.norm()));
    for z in &ev {
        if z.re.abs() > REAL_PART_TOL * scale.max(1.0) {
            return Err(Error::InvalidSpectrum { re: z.re, im: z.im });
        }
    }
    let mut values: Vec<f64> = ev.iter().filter(|z| z.im > 0.0).map(|z| z.im).collect();
    if values.len() != ev.len() / 2 {
        return Err(Error::Numerical(
            "eigenvalues of 2Ω⁻¹Σ are not in ± pairs".into(),
        ));
    }
    values.sort_by(f64::total_cmp);
    Ok(SymplecticSpectrum { values })
}

/// Numeric `(ν₋, ν′₋)` of the toy covariance at `p`.
pub fn numeric_nu_pair(p: &ToyPoint) -> Result<(f64, f64)> {
    let sigma = toy_covariance(p)?;
    let omega = nc_form(p.nc);
    let nu = symplectic_spectrum(&sigma, &omega)?.min();
    let nu_prime = symplectic_spectrum(&sigma, &ppt_form(&omega))?.min();
    Ok((nu, nu_prime))
}

/// Which branch of the closed-form `ω±` is used.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum OmegaBranch {
    Minus,
    Plus,
}

/// Closed-form `ω±(m, n, θ, η)` exactly as printed, upper sign for `Plus`.
pub fn omega_branch(p: &ToyPoint, branch: OmegaBranch) -> f64 {
    let s = match branch {
        OmegaBranch::Plus => 1.0,
        OmegaBranch::Minus => -1.0,
    };
    let (m, n, t, e) = (p.m, p.n, p.nc.theta(), p.nc.eta());
    2.0 * (1.0 + s * e * e)
        + (1.0 - s * n * n) * (e * e + t * t)
        + s * 2.0 * (1.0 + e * t) * m * m
        + n * (1.0 - s) * (e * e - t * t)
        + 2.0 * m * (1.0 + s) * (e + t)
}

/// `b/((1-ηθ)√2)·√(ω - √(ω² - 4(1-ηθ)²(1-R²)²))` for the chosen branch.
pub fn closed_form_nu(p: &ToyPoint, branch: OmegaBranch) -> Result<f64> {
    let r = p.radius();
    if !(r < 1.0) {
        return Err(Error::domain("outside positivity disk"));
    }
    let dq = p.nc.deformation();
    let w = omega_branch(p, branch);
    let c = 2.0 * dq * (1.0 - r * r);
    let inner = clamp_radicand(w * w - c * c, "inner")?;
    let outer = clamp_radicand(w - inner.sqrt(), "outer")?;
    Ok(p.scale() / (dq * std::f64::consts::SQRT_2) * outer.sqrt())
}

fn clamp_radicand(x: f64, which: &str) -> Result<f64> {
    if x >= 0.0 {
        Ok(x)
    } else if x >= -RADICAND_CLAMP {
        Ok(0.0)
    } else {
        Err(Error::Numerical(format!("negative {which} radicand {x:e}")))
    }
}

/// Closed-form smallest noncommutative symplectic eigenvalue (`ω₋` branch).
pub fn nu_minus(p: &ToyPoint) -> Result<f64> {
    closed_form_nu(p, OmegaBranch::Minus)
}

/// Closed-form smallest symplectic eigenvalue after partial transposition
/// (`ω₊` branch).
pub fn nu_prime_minus(p: &ToyPoint) -> Result<f64> {
    closed_form_nu(p, OmegaBranch::Plus)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum StateClass {
    Unphysical,
    Separable,
    Entangled,
}

impl std::fmt::Display for StateClass {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        let s = match self {
            StateClass::Unphysical => "Unphysical",
            StateClass::Separable => "Separable",
            StateClass::Entangled => "Entangled",
        };
        f.write_str(s)
    }
}

/// Class from `(ν₋, ν′₋)`. The ordering makes separable states a subset of
/// the physical ones.
pub fn class_from_spectra(nu: f64, nu_prime: f64, tol: f64) -> StateClass {
    if nu < 1.0 - tol {
        StateClass::Unphysical
    } else if nu_prime >= 1.0 - tol {
        StateClass::Separable
    } else {
        StateClass::Entangled
    }
}

/// Disagreement between the closed forms and the eigensolver at one point.
#[derive(Debug, Clone, PartialEq)]
pub struct SpectrumDiscrepancy {
    /// Closed-form values, `None` where the closed form was not evaluable.
    pub closed_nu: Option<f64>,
    pub closed_nu_prime: Option<f64>,
    pub numeric_nu: f64,
    pub numeric_nu_prime: f64,
}

#[derive(Debug, Clone, PartialEq)]
pub struct Classification {
    pub class: StateClass,
    /// Values the class was decided from.
    pub nu: f64,
    pub nu_prime: f64,
    /// Set when a closed form was off by more than [`CLOSED_FORM_TOL`] (or
    /// failed); the numeric values were used.
    pub discrepancy: Option<SpectrumDiscrepancy>,
}

/// Classification with the closed-form cross-check attached.
pub fn classify_detailed(p: &ToyPoint, tol: f64) -> Result<Classification> {
    let (num_nu, num_nu_prime) = numeric_nu_pair(p)?;
    let closed_nu = nu_minus(p).ok();
    let closed_nu_prime = nu_prime_minus(p).ok();
    let agrees = |closed: Option<f64>, numeric: f64| {
        closed.is_some_and(|c| (c - numeric).abs() <= CLOSED_FORM_TOL)
    };
    let discrepancy = if agrees(closed_nu, num_nu) && agrees(closed_nu_prime, num_nu_prime) {
        None
    } else {
        Some(SpectrumDiscrepancy {
            closed_nu,
            closed_nu_prime,
            numeric_nu: num_nu,
            numeric_nu_prime: num_nu_prime,
        })
    };
    // agreeing closed forms are within tolerance of the numeric values
    // anyway, so the numeric pair is used in both cases
    Ok(Classification {
        class: class_from_spectra(num_nu, num_nu_prime, tol),
        nu: num_nu,
        nu_prime: num_nu_prime,
        discrepancy,
    })
}

/// Unphysical / separable / entangled.
pub fn classify(p: &ToyPoint, tol: f64) -> Result<StateClass> {
    let (nu, nu_prime) = numeric_nu_pair(p)?;
    Ok(class_from_spectra(nu, nu_prime, tol))
}

/// Position of the upper-triangle entry `(μ, ν)` (1-based, `μ ≤ ν ≤ 2n`) in
/// the flattened parameter vector of a `2n×2n` covariance.
pub fn flatten_index(mu: usize, nu: usize, n: usize) -> Result<usize> {
    let dim = 2 * n;
    if mu < 1 || mu > nu || nu > dim {
        return Err(Error::Index(format!(
            "need 1 <= mu <= nu <= {dim}, got mu = {mu}, nu = {nu}"
        )));
    }
    let skipped: usize = (0..mu - 1).map(|r| dim - r).sum();
    Ok(skipped + nu - mu + 1)
}

/// Inverse of [`flatten_index`].
pub fn unflatten_index(l: usize, n: usize) -> Result<(usize, usize)> {
    let dim = 2 * n;
    let total = n * (2 * n + 1);
    if l < 1 || l > total {
        return Err(Error::Index(format!("flat index {l} outside 1..={total}")));
    }
    let mut start = 1;
    for mu in 1..=dim {
        let row_len = dim - mu + 1;
        if l < start + row_len {
            return Ok((mu, mu + (l - start)));
        }
        start += row_len;
    }
    unreachable!("range checked above")
}
