//! Finite-dimensional Clifford-algebra representations.
//!
//! A representation is a pair of Hermitian matrices α⁰, α¹ (optionally a
//! third, α²) satisfying
//!
//! ```text
//! (α⁰)² = (α¹)² = 1,   α⁰α¹ + α¹α⁰ = 0,
//! ```
//!
//! with α², when present, squaring to 1 and anticommuting with both. The
//! whole artifact is representation-independent: every physical quantity
//! built downstream must be invariant under `αⁱ ↦ S αⁱ S†` for unitary `S`,
//! and the helpers here (Haar-random unitaries, conjugation, residual
//! reports) are what the test suites use to exercise that symmetry.
//!
//! The default dimension is 2 (the Pauli triple), but all code paths accept
//! any even dimension supplied by the user.

use std::collections::BTreeMap;
use std::path::Path;

use nalgebra::DMatrix;
use num_complex::Complex64;
use rand::Rng;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rand_distr::StandardNormal;

use crate::error::{Error, Result};
use crate::matrix::{
    anticommutator, cplx, expect_square, hermiticity_residual, identity_residual, max_abs,
    parse_matrix, real, unitarity_residual, CMatrix, ONE,
};

/// Default tolerance for exact algebraic identities in binary64 arithmetic:
/// the identities hold analytically, so any residual is pure roundoff.
pub const DEFAULT_TOL: f64 = 1e-12;

/// A d-dimensional representation of the 1+1D Clifford algebra.
#[derive(Debug, Clone)]
pub struct CliffordRep {
    pub dim: usize,
    pub alpha0: CMatrix,
    pub alpha1: CMatrix,
    /// Third mutually anticommuting element, needed by the λ = 2 coin family.
    pub alpha2: Option<CMatrix>,
    pub label: String,
}

impl CliffordRep {
    pub fn new(
        alpha0: CMatrix,
        alpha1: CMatrix,
        alpha2: Option<CMatrix>,
        label: impl Into<String>,
    ) -> Result<Self> {
        let dim = alpha0.nrows();
        if dim == 0 || !dim.is_multiple_of(2) {
            return Err(Error::InvalidParams(format!(
                "representation dimension must be a positive even integer, got {dim}"
            )));
        }
        expect_square(&alpha0, dim, "alpha0")?;
        expect_square(&alpha1, dim, "alpha1")?;
        if let Some(a2) = &alpha2 {
            expect_square(a2, dim, "alpha2")?;
        }
        Ok(Self {
            dim,
            alpha0,
            alpha1,
            alpha2,
            label: label.into(),
        })
    }

    /// The element `α^λ` used by the Wilson coin family.
    pub fn alpha_lambda(&self, lambda: usize) -> Result<&CMatrix> {
        match lambda {
            0 => Ok(&self.alpha0),
            2 => self.alpha2.as_ref().ok_or(Error::MissingAlpha2),
            other => Err(Error::InvalidParams(format!(
                "lambda must be 0 or 2, got {other}"
            ))),
        }
    }

    /// Conjugate every element by a unitary: `αⁱ ↦ S αⁱ S†`.
    pub fn conjugate(&self, s: &CMatrix) -> Result<CliffordRep> {
        expect_square(s, self.dim, "conjugating matrix")?;
        let residual = unitarity_residual(s);
        if residual > DEFAULT_TOL {
            return Err(Error::NotUnitary {
                residual,
                tol: DEFAULT_TOL,
            });
        }
        let sd = s.adjoint();
        let conj = |m: &CMatrix| s * m * &sd;
        CliffordRep::new(
            conj(&self.alpha0),
            conj(&self.alpha1),
            self.alpha2.as_ref().map(conj),
            format!("{} (conjugated)", self.label),
        )
    }
}

/// The default d = 2 representation built from the three Pauli matrices:
/// α⁰ = σ₁, α¹ = σ₃, α² = σ₂.
pub fn pauli_representation() -> CliffordRep {
    let sigma1 = DMatrix::from_row_slice(2, 2, &[Complex64::ZERO, ONE, ONE, Complex64::ZERO]);
    let sigma2 = DMatrix::from_row_slice(
        2,
        2,
        &[
            Complex64::ZERO,
            cplx(0.0, -1.0),
            cplx(0.0, 1.0),
            Complex64::ZERO,
        ],
    );
    let sigma3 = DMatrix::from_row_slice(2, 2, &[ONE, Complex64::ZERO, Complex64::ZERO, -ONE]);
    CliffordRep::new(sigma1, sigma3, Some(sigma2), "pauli").expect("pauli triple is well-formed")
}

/// Residuals of every defining identity of a representation.
#[derive(Debug, Clone)]
pub struct AlgebraReport {
    pub residuals: BTreeMap<String, f64>,
    pub tolerance: f64,
    pub pass: bool,
}

impl AlgebraReport {
    pub fn worst(&self) -> f64 {
        self.residuals.values().fold(0.0_f64, |a, &b| a.max(b))
    }
}

/// Check squares, anticommutators and Hermiticity of all elements.
pub fn verify_algebra(rep: &CliffordRep, tol: f64) -> AlgebraReport {
    let mut residuals = BTreeMap::new();
    let mut elems: Vec<(&str, &CMatrix)> = vec![("alpha0", &rep.alpha0), ("alpha1", &rep.alpha1)];
    if let Some(a2) = &rep.alpha2 {
        elems.push(("alpha2", a2));
    }

    for (name, m) in &elems {
        residuals.insert(format!("{name}_hermitian"), hermiticity_residual(m));
        residuals.insert(
            format!("{name}_squares_to_identity"),
            identity_residual(&(*m * *m)),
        );
    }
    for i in 0..elems.len() {
        for j in (i + 1)..elems.len() {
            let (ni, mi) = elems[i];
            let (nj, mj) = elems[j];
            residuals.insert(
                format!("anticommutator_{ni}_{nj}"),
                max_abs(&anticommutator(mi, mj)),
            );
        }
    }

    let pass = residuals.values().all(|&r| r <= tol);
    AlgebraReport {
        residuals,
        tolerance: tol,
        pass,
    }
}

/// Haar-distributed `d × d` unitary, reproducible from the seed.
///
/// Sampled by QR-orthonormalizing a complex Ginibre matrix and fixing the
/// phases with the signs of the R diagonal, which makes the distribution
/// exactly Haar rather than merely orthonormal.
pub fn random_unitary(d: usize, seed: u64) -> CMatrix {
    assert!(d >= 1, "dimension must be positive");
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let ginibre = CMatrix::from_fn(d, d, |_, _| {
        let re: f64 = rng.sample(StandardNormal);
        let im: f64 = rng.sample(StandardNormal);
        cplx(re, im)
    });
    let qr = ginibre.qr();
    let r_diag: Vec<Complex64> = (0..d).map(|i| qr.r()[(i, i)]).collect();
    let mut q = qr.q();
    for (j, rjj) in r_diag.iter().enumerate() {
        let phase = if rjj.norm() > 0.0 {
            rjj / rjj.norm()
        } else {
            ONE
        };
        for i in 0..d {
            q[(i, j)] *= phase;
        }
    }
    q
}

/// Γ operators of a representation together with the modified-metric check.
#[derive(Debug, Clone)]
pub struct GammaOperators {
    pub gamma0: CMatrix,
    pub gamma1: CMatrix,
    /// Max residual of `{Γ^a, Γ^b} = 2 η̃^{ab}` over all index pairs,
    /// with the modified Minkowski metric `η̃ = diag(1/μ², -1)`.
    pub metric_residual: f64,
}

/// Build Γ⁰ = α⁰/μ and Γ¹ = α⁰α¹ and verify the modified Clifford algebra.
///
/// The mass-dependent normalization μ deforms the metric: the time-time
/// entry becomes 1/μ², which is the discrete-level price of unitarity.
pub fn gamma_operators(rep: &CliffordRep, mu: f64) -> Result<GammaOperators> {
    if mu <= 0.0 || !mu.is_finite() {
        return Err(Error::InvalidParams(format!(
            "normalization mu must be positive and finite, got {mu}"
        )));
    }
    let report = verify_algebra(rep, DEFAULT_TOL);
    if !report.pass {
        return Err(Error::InvalidRepresentation {
            residual: report.worst(),
            tol: DEFAULT_TOL,
        });
    }

    let gamma0 = &rep.alpha0 * real(1.0 / mu);
    let gamma1 = &rep.alpha0 * &rep.alpha1;
    let d = rep.dim;
    let id = CMatrix::identity(d, d);

    let metric = [[1.0 / (mu * mu), 0.0], [0.0, -1.0]];
    let gammas = [&gamma0, &gamma1];
    let mut worst = 0.0_f64;
    for a in 0..2 {
        for b in 0..2 {
            let lhs = anticommutator(gammas[a], gammas[b]);
            let rhs = &id * real(2.0 * metric[a][b]);
            worst = worst.max(max_abs(&(lhs - rhs)));
        }
    }

    Ok(GammaOperators {
        gamma0,
        gamma1,
        metric_residual: worst,
    })
}

/// Load a representation from a plain-text file.
///
/// The file holds two or three square matrix blocks (α⁰, α¹ and optionally
/// α²) separated by blank lines; each block has one row per line with
/// whitespace-separated `re+imi` entries. Lines starting with `#` are
/// comments.
pub fn load_representation(path: impl AsRef<Path>) -> Result<CliffordRep> {
    let text = std::fs::read_to_string(&path)?;
    let mut blocks: Vec<Vec<&str>> = Vec::new();
    let mut current: Vec<&str> = Vec::new();
    for line in text.lines() {
        let trimmed = line.trim();
        if trimmed.is_empty() {
            if !current.is_empty() {
                blocks.push(std::mem::take(&mut current));
            }
        } else if !trimmed.starts_with('#') {
            current.push(trimmed);
        }
    }
    if !current.is_empty() {
        blocks.push(current);
    }

    if blocks.len() != 2 && blocks.len() != 3 {
        return Err(Error::Parse {
            line: text.lines().count(),
            msg: format!(
                "representation file must hold 2 or 3 matrix blocks, found {}",
                blocks.len()
            ),
        });
    }

    let mut matrices = Vec::new();
    for (idx, block) in blocks.iter().enumerate() {
        let m = parse_matrix(block).map_err(|msg| Error::Parse {
            line: idx + 1,
            msg: format!("matrix block {}: {msg}", idx + 1),
        })?;
        matrices.push(m);
    }
    let alpha2 = if matrices.len() == 3 {
        Some(matrices.pop().unwrap())
    } else {
        None
    };
    let alpha1 = matrices.pop().unwrap();
    let alpha0 = matrices.pop().unwrap();
    let label = path.as_ref().display().to_string();
    CliffordRep::new(alpha0, alpha1, alpha2, label)
}
