//! Symplectic structures on the bipartite phase space.
//!
//! Coordinates are ordered party by party, and within a party as
//! `(x_1..x_k, p_1..p_k)`. The commutative form is `J = Diag[J^A, J^B]` with
//! `J^K = [[0, I], [-I, 0]]`; the noncommutative form adds an antisymmetric
//! position block scaled by θ and a momentum block scaled by η.

use nalgebra::DMatrix;

use crate::error::{Error, Result};
use crate::gaussian::CovarianceMatrix;
use crate::numerics::{self, DenseMatrix};

/// Absolute determinant below which a form or map is treated as singular.
pub const SINGULAR_DET: f64 = 1e-12;

/// Mode counts of the two parties.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct BlockSplit {
    pub n_a: usize,
    pub n_b: usize,
}

impl BlockSplit {
    pub fn new(n_a: usize, n_b: usize) -> Result<Self> {
        if n_a == 0 || n_b == 0 {
            return Err(Error::domain("each party needs at least one mode"));
        }
        Ok(BlockSplit { n_a, n_b })
    }

    /// The two-modes-per-party layout of the toy model.
    pub const TOY: BlockSplit = BlockSplit { n_a: 2, n_b: 2 };

    /// Number of modes `n`.
    pub fn modes(&self) -> usize {
        self.n_a + self.n_b
    }

    /// Phase-space dimension `2n`.
    pub fn dim(&self) -> usize {
        2 * self.modes()
    }

    /// Row offset of party B.
    fn b_offset(&self) -> usize {
        2 * self.n_a
    }
}

/// Noncommutativity parameters: θ for positions, η for momenta.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct NCParams {
    theta: f64,
    eta: f64,
}

impl NCParams {
    pub const COMMUTATIVE: NCParams = NCParams {
        theta: 0.0,
        eta: 0.0,
    };

    pub fn new(theta: f64, eta: f64) -> Result<Self> {
        if !theta.is_finite() || !eta.is_finite() {
            return Err(Error::domain("theta and eta must be finite"));
        }
        if theta * eta >= 1.0 {
            return Err(Error::domain(format!(
                "theta*eta = {} must be below 1",
                theta * eta
            )));
        }
        Ok(NCParams { theta, eta })
    }

    pub fn theta(&self) -> f64 {
        self.theta
    }

    pub fn eta(&self) -> f64 {
        self.eta
    }

    /// `1 - ηθ`, positive by construction.
    pub fn deformation(&self) -> f64 {
        1.0 - self.eta * self.theta
    }
}

/// A real antisymmetric nonsingular `2n×2n` matrix, block-diagonal in the parties.
#[derive(Debug, Clone, PartialEq)]
pub struct SymplecticForm {
    matrix: DenseMatrix,
    split: BlockSplit,
}

impl SymplecticForm {
    /// Validates a user-supplied form (for instance one assembled from custom
    /// per-party blocks).
    pub fn new(matrix: DenseMatrix, split: BlockSplit) -> Result<Self> {
        let dim = split.dim();
        if matrix.rows() != dim || matrix.cols() != dim {
            return Err(Error::Dimension(format!(
                "form must be {dim}x{dim} for split ({}, {})",
                split.n_a, split.n_b
            )));
        }
        for i in 0..dim {
            for j in 0..dim {
                if matrix.get(i, j) != -matrix.get(j, i) {
                    return Err(Error::domain("symplectic form must be antisymmetric"));
                }
                let cross = (i < split.b_offset()) != (j < split.b_offset());
                if cross && matrix.get(i, j) != 0.0 {
                    return Err(Error::domain(
                        "symplectic form must not couple the two parties",
                    ));
                }
            }
        }
        let det = numerics::determinant(&matrix)?;
        if det.abs() <= SINGULAR_DET {
            return Err(Error::Numerical(format!(
                "symplectic form is singular (det {det:e})"
            )));
        }
        Ok(SymplecticForm { matrix, split })
    }

    pub fn matrix(&self) -> &DenseMatrix {
        &self.matrix
    }

    pub fn split(&self) -> BlockSplit {
        self.split
    }

    pub fn inverse(&self) -> Result<DenseMatrix> {
        numerics::inverse(&self.matrix)
    }
}

/// Per-party `[[pos, I], [-I, mom]]` block with antisymmetric `pos`, `mom`.
fn party_block(k: usize, pos: f64, mom: f64) -> DMatrix<f64> {
    let mut m = DMatrix::zeros(2 * k, 2 * k);
    for r in 0..k {
        m[(r, k + r)] = 1.0;
        m[(k + r, r)] = -1.0;
    }
    // ε on consecutive pairs of coordinates within a party
    for r in (0..k.saturating_sub(1)).step_by(2) {
        m[(r, r + 1)] = pos;
        m[(r + 1, r)] = -pos;
        m[(k + r, k + r + 1)] = mom;
        m[(k + r + 1, k + r)] = -mom;
    }
    m
}

fn block_diag(a: &DMatrix<f64>, b: &DMatrix<f64>) -> DMatrix<f64> {
    let (na, nb) = (a.nrows(), b.nrows());
    let mut m = DMatrix::zeros(na + nb, na + nb);
    m.view_mut((0, 0), (na, na)).copy_from(a);
    m.view_mut((na, na), (nb, nb)).copy_from(b);
    m
}

/// The standard form `J = Diag[J^A, J^B]`.
pub fn commutative_form(n_a: usize, n_b: usize) -> Result<SymplecticForm> {
    let split = BlockSplit::new(n_a, n_b)?;
    let m = block_diag(&party_block(n_a, 0.0, 0.0), &party_block(n_b, 0.0, 0.0));
    Ok(SymplecticForm {
        matrix: DenseMatrix::from_trusted(m),
        split,
    })
}

/// The toy-model noncommutative form `Ω(θ, η)` with two modes per party.
pub fn nc_form(p: NCParams) -> SymplecticForm {
    let k = party_block(2, p.theta, p.eta);
    SymplecticForm {
        matrix: DenseMatrix::from_trusted(block_diag(&k, &k)),
        split: BlockSplit::TOY,
    }
}

/// Form after partial transposition of party B: `Ω′ = Diag[Ω^A, -Ω^B]`.
pub fn ppt_form(omega: &SymplecticForm) -> SymplecticForm {
    let off = omega.split.b_offset();
    let mut m = omega.matrix.as_nalgebra().clone();
    let dim = m.nrows();
    m.view_mut((off, off), (dim - off, dim - off)).neg_mut();
    SymplecticForm {
        matrix: DenseMatrix::from_trusted(m),
        split: omega.split,
    }
}

/// Invertible block-diagonal map `S` with `Ω = S J Sᵀ`.
#[derive(Debug, Clone, PartialEq)]
pub struct DarbouxMap {
    matrix: DenseMatrix,
    split: BlockSplit,
}

impl DarbouxMap {
    pub fn new(matrix: DenseMatrix, split: BlockSplit) -> Result<Self> {
        let dim = split.dim();
        if matrix.rows() != dim || matrix.cols() != dim {
            return Err(Error::Dimension(format!("Darboux map must be {dim}x{dim}")));
        }
        let off = split.b_offset();
        for i in 0..dim {
            for j in 0..dim {
                if (i < off) != (j < off) && matrix.get(i, j) != 0.0 {
                    return Err(Error::domain("Darboux map must be block-diagonal"));
                }
            }
        }
        let det = numerics::determinant(&matrix)?;
        if det.abs() <= SINGULAR_DET {
            return Err(Error::Numerical(format!(
                "Darboux map is singular (det {det:e})"
            )));
        }
        Ok(DarbouxMap { matrix, split })
    }

    pub fn matrix(&self) -> &DenseMatrix {
        &self.matrix
    }

    pub fn split(&self) -> BlockSplit {
        self.split
    }

    /// `S J Sᵀ`, the form this map produces from the standard one.
    pub fn image_form(&self) -> DenseMatrix {
        let s = self.matrix.as_nalgebra();
        let j = commutative_form(self.split.n_a, self.split.n_b)
            .expect("split already validated")
            .matrix
            .into_nalgebra();
        DenseMatrix::from_trusted(s * j * s.transpose())
    }
}

/// Scale factors `(λ, μ)` of the Bopp shift, split symmetrically so that
/// `λμ = (1 + √(1−ηθ))/2` and `λ = μ`.
pub fn bopp_scales(p: NCParams) -> (f64, f64) {
    let product = 0.5 * (1.0 + p.deformation().sqrt());
    let lambda = product.sqrt();
    (lambda, lambda)
}

/// Bopp-shift Darboux map for the toy model.
///
/// Per party: `[[λI₂, -(θ/2λ)ε], [(η/2μ)ε, μI₂]]` with `ε = [[0,1],[-1,0]]`.
pub fn bopp_shift(p: NCParams) -> Result<DarbouxMap> {
    if p.theta * p.eta >= 1.0 {
        return Err(Error::domain("Darboux map undefined for theta*eta >= 1"));
    }
    let (lambda, mu) = bopp_scales(p);
    let mut k = DMatrix::zeros(4, 4);
    for r in 0..2 {
        k[(r, r)] = lambda;
        k[(2 + r, 2 + r)] = mu;
    }
    let upper = -p.theta / (2.0 * lambda);
    let lower = p.eta / (2.0 * mu);
    k[(0, 3)] = upper;
    k[(1, 2)] = -upper;
    k[(2, 1)] = lower;
    k[(3, 0)] = -lower;
    DarbouxMap::new(
        DenseMatrix::from_trusted(block_diag(&k, &k)),
        BlockSplit::TOY,
    )
}

/// Direction of a covariance transformation under a Darboux map.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Direction {
    /// Commutative to noncommutative: `S Σ̃ Sᵀ`.
    Push,
    /// Noncommutative to commutative: `S⁻¹ Σ S⁻ᵀ`.
    Pull,
}

pub fn darboux_conjugate(
    sigma: &CovarianceMatrix,
    s: &DarbouxMap,
    direction: Direction,
) -> Result<CovarianceMatrix> {
    let dim = sigma.dim();
    if dim != s.split.dim() {
        return Err(Error::Dimension(format!(
            "covariance is {dim}x{dim} but Darboux map is {0}x{0}",
            s.split.dim()
        )));
    }
    let t = match direction {
        Direction::Push => s.matrix.as_nalgebra().clone(),
        Direction::Pull => numerics::inverse(&s.matrix)?.into_nalgebra(),
    };
    let out = &t * sigma.matrix().as_nalgebra() * t.transpose();
    let out = DenseMatrix::from_nalgebra(out)?.symmetrized();
    CovarianceMatrix::new(out).map_err(|e| match e {
        Error::Numerical(msg) => Error::Numerical(format!("conjugated covariance: {msg}")),
        other => other,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::gaussian::{toy_covariance, ToyPoint};
    use proptest::prelude::*;

    #[test]
    fn commutative_form_basics() {
        let j = commutative_form(1, 1).unwrap();
        let expect = DenseMatrix::from_row_slice(
            4,
            4,
            &[
                0.0, 1.0, 0.0, 0.0, //
                -1.0, 0.0, 0.0, 0.0, //
                0.0, 0.0, 0.0, 1.0, //
                0.0, 0.0, -1.0, 0.0,
            ],
        )
        .unwrap();
        assert_eq!(j.matrix(), &expect);

        for (a, b) in [(1, 1), (2, 2), (1, 3), (3, 2)] {
            let j = commutative_form(a, b).unwrap();
            let jm = j.matrix().as_nalgebra();
            let sq = jm * jm;
            let n = jm.nrows();
            assert!((sq + DMatrix::<f64>::identity(n, n)).amax() == 0.0);
            assert!((numerics::determinant(j.matrix()).unwrap() - 1.0).abs() < 1e-14);
        }
        assert!(commutative_form(0, 2).is_err());
    }

    #[test]
    fn nc_form_limits_and_blocks() {
        let omega = nc_form(NCParams::COMMUTATIVE);
        assert_eq!(omega.matrix(), commutative_form(2, 2).unwrap().matrix());

        let omega = nc_form(NCParams::new(0.5, 0.0).unwrap());
        let m = omega.matrix();
        assert_eq!((m.get(0, 1), m.get(1, 0)), (0.5, -0.5));
        assert_eq!((m.get(2, 3), m.get(3, 2)), (0.0, 0.0));
        assert_eq!((m.get(4, 5), m.get(5, 4)), (0.5, -0.5));
    }

    #[test]
    fn nc_form_determinant() {
        // det Ω = ((1-ηθ)²)² from expanding the 8x8 block structure
        for &(t, e) in &[
            (0.0, 0.0),
            (0.3, 0.2),
            (0.9, -0.5),
            (-0.7, 0.4),
            (0.95, 1.0),
        ] {
            let p = NCParams::new(t, e).unwrap();
            let omega = nc_form(p);
            let det = numerics::determinant(omega.matrix()).unwrap();
            let expect = (1.0 - e * t).powi(4);
            assert!((det - expect).abs() < 1e-12, "det {det} vs {expect}");
            let om = omega.matrix().as_nalgebra();
            assert_eq!((om + om.transpose()).amax(), 0.0);
            SymplecticForm::new(omega.matrix().clone(), BlockSplit::TOY).unwrap();
        }
    }

    #[test]
    fn ppt_form_is_involution() {
        let omega = nc_form(NCParams::new(0.3, 0.2).unwrap());
        let prime = ppt_form(&omega);
        assert_eq!(
            (prime.matrix().get(4, 5), prime.matrix().get(5, 4)),
            (-0.3, 0.3)
        );
        assert_eq!(prime.matrix().get(0, 1), 0.3);
        assert_eq!(ppt_form(&prime), omega);

        let j = commutative_form(2, 2).unwrap();
        let jp = ppt_form(&j);
        assert_eq!(jp.matrix().get(4, 6), -1.0);
        assert_eq!(jp.matrix().get(0, 2), 1.0);
        SymplecticForm::new(jp.matrix().clone(), jp.split()).unwrap();
    }

    #[test]
    fn user_forms_are_validated() {
        let bad = DenseMatrix::identity(8);
        assert!(SymplecticForm::new(bad, BlockSplit::TOY).is_err());
        let mut coupled = commutative_form(2, 2)
            .unwrap()
            .matrix()
            .as_nalgebra()
            .clone();
        coupled[(0, 5)] = 0.1;
        coupled[(5, 0)] = -0.1;
        assert!(SymplecticForm::new(DenseMatrix::from_trusted(coupled), BlockSplit::TOY).is_err());
    }

    #[test]
    fn bopp_shift_identity_and_scale() {
        let s = bopp_shift(NCParams::COMMUTATIVE).unwrap();
        assert_eq!(s.matrix(), &DenseMatrix::identity(8));

        let (l, m) = bopp_scales(NCParams::new(0.5, 0.5).unwrap());
        assert!((l * m - 0.5 * (1.0 + 0.75f64.sqrt())).abs() < 1e-15);
        assert!((l * m - 0.9330127018922193).abs() < 1e-12);

        assert!(NCParams::new(2.0, 0.5).is_err());
    }

    #[test]
    fn bopp_shift_reproduces_form_on_grid() {
        for i in 0..10 {
            for j in 0..10 {
                let (t, e) = (0.1 * i as f64, 0.1 * j as f64);
                let p = NCParams::new(t, e).unwrap();
                let s = bopp_shift(p).unwrap();
                let err = s.image_form().max_abs_diff(nc_form(p).matrix());
                assert!(err <= 1e-12, "({t},{e}) err {err}");
            }
        }
    }

    #[test]
    fn conjugation_round_trip() {
        let sigma =
            toy_covariance(&ToyPoint::new(0.3, -0.2, NCParams::COMMUTATIVE).unwrap()).unwrap();
        let id = DarbouxMap::new(DenseMatrix::identity(8), BlockSplit::TOY).unwrap();
        let same = darboux_conjugate(&sigma, &id, Direction::Push).unwrap();
        assert!(same.matrix().max_abs_diff(sigma.matrix()) == 0.0);

        let s = bopp_shift(NCParams::new(0.5, 0.5).unwrap()).unwrap();
        let pushed = darboux_conjugate(&sigma, &s, Direction::Push).unwrap();
        let back = darboux_conjugate(&pushed, &s, Direction::Pull).unwrap();
        assert!(back.matrix().max_abs_diff(sigma.matrix()) < 1e-12);

        // ½ I pushes to ½ S Sᵀ
        let half = CovarianceMatrix::new(
            DenseMatrix::from_nalgebra(DMatrix::identity(8, 8) * 0.5).unwrap(),
        )
        .unwrap();
        let pushed = darboux_conjugate(&half, &s, Direction::Push).unwrap();
        let sm = s.matrix().as_nalgebra();
        let expect = DenseMatrix::from_nalgebra(sm * sm.transpose() * 0.5).unwrap();
        assert!(pushed.matrix().max_abs_diff(&expect) < 1e-15);
    }

    #[test]
    fn conjugation_dimension_mismatch() {
        let small = CovarianceMatrix::new(DenseMatrix::identity(4)).unwrap();
        let s = bopp_shift(NCParams::COMMUTATIVE).unwrap();
        assert!(matches!(
            darboux_conjugate(&small, &s, Direction::Push),
            Err(Error::Dimension(_))
        ));
    }

    proptest! {
        #[test]
        fn ppt_preserves_validity(t in -0.95f64..0.95, e in -0.95f64..0.95) {
            let omega = nc_form(NCParams::new(t, e).unwrap());
            let prime = ppt_form(&omega);
            prop_assert!(SymplecticForm::new(prime.matrix().clone(), prime.split()).is_ok());
            prop_assert_eq!(ppt_form(&prime), omega);
        }

        #[test]
        fn conjugation_preserves_positivity(
            m in -0.7f64..0.7, n in -0.7f64..0.7, t in -0.9f64..0.9, e in -0.9f64..0.9,
            pull in any::<bool>(),
        ) {
            prop_assume!(m * m + n * n < 0.95);
            let sigma = toy_covariance(&ToyPoint::new(m, n, NCParams::COMMUTATIVE).unwrap()).unwrap();
            let s = bopp_shift(NCParams::new(t, e).unwrap()).unwrap();
            let dir = if pull { Direction::Pull } else { Direction::Push };
            let out = darboux_conjugate(&sigma, &s, dir).unwrap();
            let ev = numerics::eig_symmetric(out.matrix()).unwrap();
            prop_assert!(ev[0] > 0.0);
        }
    }
}
