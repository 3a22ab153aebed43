//! Coin operators of the walk and their unitarity constraints.
//!
//! The one-step evolution is assembled from three *jump* coins,
//! `U = W₋₁ T₁⁻¹ + W₁ T₁ + W₀`. Unitarity is easier to state on the
//! *transport* coins
//!
//! ```text
//! B = W₁ - W₋₁,   V = W₁ + W₋₁,   M = W₋₁ + W₀ + W₁,
//! ```
//!
//! where it reduces to five identities: V†V = B†B, B†V = V†B,
//! 2V†V = V†M + M†V, B†M = M†B and M†M = 1. Two coin families satisfy all
//! of them for every Wilson parameter r:
//!
//! - **massive Q = 0**: `M = μ(1 - iεm α⁰)`, `B = μ α¹`, `V = μ`, with
//!   `μ = 1/√(1 + ε²m²)`;
//! - **Wilson-λ**: same `M`, `V = ν(1 + i ε^ρ r α^λ)` and `B = η α¹` with
//!   the normalizations ν, η fixed by the constraints (λ ∈ {0, 2}; λ = 1 is
//!   ruled out because B†V = V†B would fail).
//!
//! The Hamiltonian blocks derived from the coins — A⁰, A¹ and the Wilson
//! block multiplying the discrete Laplacian — close a Clifford algebra up to
//! the scalar factors μ and η, which is what makes the squared scheme act on
//! scalar sequences.

use std::collections::BTreeMap;

use crate::clifford::{verify_algebra, CliffordRep, DEFAULT_TOL};
use crate::error::{Error, Result};
use crate::matrix::{
    anticommutator, hermiticity_residual, identity_residual, max_abs, max_abs_diff, real, CMatrix,
    I,
};

/// Index of the Wilson direction α^λ. λ = 1 is excluded by unitarity.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Lambda {
    Zero,
    Two,
}

impl Lambda {
    pub fn index(self) -> usize {
        match self {
            Lambda::Zero => 0,
            Lambda::Two => 2,
        }
    }

    pub fn try_from_index(idx: usize) -> Result<Self> {
        match idx {
            0 => Ok(Lambda::Zero),
            2 => Ok(Lambda::Two),
            1 => Err(Error::InvalidParams(
                "lambda = 1 violates the unitarity constraint B†V = V†B".into(),
            )),
            other => Err(Error::InvalidParams(format!(
                "lambda must be 0 or 2, got {other}"
            ))),
        }
    }
}

/// Which coin family to build.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Variant {
    /// Hermitian V, no Wilson term.
    MassiveQ0,
    /// Wilson-λ family with the ε^ρ-scaled Wilson term.
    WilsonLambda,
}

/// Every scalar knob of the scheme.
///
/// `epsilon` is the time step; under the ballistic scaling it equals the
/// lattice spacing, so it also sets the Brillouin zone [-π/ε, π/ε].
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ModelParams {
    pub epsilon: f64,
    pub mass: f64,
    pub wilson_r: f64,
    pub rho: f64,
    pub lambda: Lambda,
    pub variant: Variant,
}

impl ModelParams {
    pub fn massive_q0(epsilon: f64, mass: f64) -> Self {
        Self {
            epsilon,
            mass,
            wilson_r: 0.0,
            rho: 0.6,
            lambda: Lambda::Zero,
            variant: Variant::MassiveQ0,
        }
    }

    pub fn wilson(epsilon: f64, mass: f64, wilson_r: f64, rho: f64, lambda: Lambda) -> Self {
        Self {
            epsilon,
            mass,
            wilson_r,
            rho,
            lambda,
            variant: Variant::WilsonLambda,
        }
    }

    pub fn validate(&self) -> Result<()> {
        if self.epsilon <= 0.0 || !self.epsilon.is_finite() {
            return Err(Error::InvalidParams(format!(
                "epsilon must be positive, got {}",
                self.epsilon
            )));
        }
        if self.mass < 0.0 || !self.mass.is_finite() {
            return Err(Error::InvalidParams(format!(
                "mass must be nonnegative, got {}",
                self.mass
            )));
        }
        if !self.wilson_r.is_finite() {
            return Err(Error::InvalidParams("wilson_r must be finite".into()));
        }
        if self.variant == Variant::WilsonLambda && (self.rho <= 0.0 || !self.rho.is_finite()) {
            return Err(Error::InvalidParams(format!(
                "rho must be positive so the normalizations reach 1 in the continuum limit, got {}",
                self.rho
            )));
        }
        Ok(())
    }

    /// Non-fatal criteria violations, propagated into reports.
    pub fn warnings(&self) -> Vec<String> {
        let mut w = Vec::new();
        if self.variant == Variant::WilsonLambda {
            if self.rho >= 1.0 {
                w.push(format!(
                    "doubling criterion violated (rho = {} >= 1): the raising amplitude vanishes with epsilon",
                    self.rho
                ));
            } else if self.rho <= 0.5 {
                w.push(format!(
                    "convergence criterion violated (rho = {} <= 0.5): the initial slope converges slower than LGT",
                    self.rho
                ));
            }
        }
        w
    }

    /// Edge of the Brillouin zone, π/ε.
    pub fn bz_edge(&self) -> f64 {
        std::f64::consts::PI / self.epsilon
    }
}

/// The three scalar normalization factors of a coin family.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Normalizations {
    /// μ = 1/√(1 + ε²m²), fixed by M†M = 1.
    pub mu: f64,
    /// ν, fixed by 2V†V = V†M + M†V. Can be negative or zero for large
    /// ε^{1+ρ} m r; unitarity holds regardless.
    pub nu: f64,
    /// η = ν √(1 + (ε^ρ r)²), fixed by V†V = B†B.
    pub eta: f64,
}

impl Normalizations {
    pub fn compute(params: &ModelParams) -> Result<Self> {
        params.validate()?;
        let em = params.epsilon * params.mass;
        let mu = 1.0 / (1.0 + em * em).sqrt();
        match params.variant {
            Variant::MassiveQ0 => Ok(Self {
                mu,
                nu: mu,
                eta: mu,
            }),
            Variant::WilsonLambda => {
                let er = params.epsilon.powf(params.rho) * params.wilson_r;
                let denom = 1.0 + er * er;
                let nu = match params.lambda {
                    Lambda::Zero => {
                        let cross =
                            params.epsilon.powf(1.0 + params.rho) * params.mass * params.wilson_r;
                        mu * (1.0 - cross) / denom
                    }
                    Lambda::Two => mu / denom,
                };
                let eta = nu * denom.sqrt();
                Ok(Self { mu, nu, eta })
            }
        }
    }
}

/// Shorthand used by downstream spectral code.
pub fn normalization_factors(params: &ModelParams) -> Result<Normalizations> {
    Normalizations::compute(params)
}

/// A complete set of coins: transport and jump forms plus the normalization
/// factors they were built with.
#[derive(Debug, Clone)]
pub struct CoinSet {
    pub params: ModelParams,
    pub rep: CliffordRep,
    pub b: CMatrix,
    pub v: CMatrix,
    pub m: CMatrix,
    pub w_minus: CMatrix,
    pub w_zero: CMatrix,
    pub w_plus: CMatrix,
    pub norms: Normalizations,
}

impl CoinSet {
    /// Assemble from transport coins; jump coins follow from
    /// W±1 = (V ± B)/2 and W₀ = M - V.
    pub fn from_transport(
        rep: CliffordRep,
        params: ModelParams,
        b: CMatrix,
        v: CMatrix,
        m: CMatrix,
        norms: Normalizations,
    ) -> Self {
        let half = real(0.5);
        let w_minus = (&v - &b) * half;
        let w_plus = (&v + &b) * half;
        let w_zero = &m - &v;
        Self {
            params,
            rep,
            b,
            v,
            m,
            w_minus,
            w_zero,
            w_plus,
            norms,
        }
    }

    /// Assemble from jump coins; transport coins follow from
    /// B = W₁ - W₋₁, V = W₁ + W₋₁, M = V + W₀.
    pub fn from_jump(
        rep: CliffordRep,
        params: ModelParams,
        w_minus: CMatrix,
        w_zero: CMatrix,
        w_plus: CMatrix,
        norms: Normalizations,
    ) -> Self {
        let b = &w_plus - &w_minus;
        let v = &w_plus + &w_minus;
        let m = &v + &w_zero;
        Self {
            params,
            rep,
            b,
            v,
            m,
            w_minus,
            w_zero,
            w_plus,
            norms,
        }
    }

    pub fn dim(&self) -> usize {
        self.rep.dim
    }
}

/// Build the coin set of the requested family on the given representation.
///
/// The representation must pass the algebra check; for λ = 2 it must carry
/// an α².
pub fn build_coins(rep: &CliffordRep, params: &ModelParams) -> Result<CoinSet> {
    params.validate()?;
    let report = verify_algebra(rep, DEFAULT_TOL);
    if !report.pass {
        return Err(Error::InvalidRepresentation {
            residual: report.worst(),
            tol: DEFAULT_TOL,
        });
    }

    let d = rep.dim;
    let id = CMatrix::identity(d, d);
    let norms = Normalizations::compute(params)?;
    let em = params.epsilon * params.mass;

    // M = μ(1 - iεm α⁰) in both families.
    let m = (&id - &rep.alpha0 * (I * real(em))) * real(norms.mu);

    let (b, v) = match params.variant {
        Variant::MassiveQ0 => {
            let b = &rep.alpha1 * real(norms.mu);
            let v = &id * real(norms.mu);
            (b, v)
        }
        Variant::WilsonLambda => {
            let alpha_l = rep.alpha_lambda(params.lambda.index())?;
            let er = params.epsilon.powf(params.rho) * params.wilson_r;
            let v = (&id + alpha_l * (I * real(er))) * real(norms.nu);
            let b = &rep.alpha1 * real(norms.eta);
            (b, v)
        }
    };

    Ok(CoinSet::from_transport(
        rep.clone(),
        *params,
        b,
        v,
        m,
        norms,
    ))
}

/// Residuals of all nine unitarity identities.
#[derive(Debug, Clone)]
pub struct ConstraintReport {
    pub residuals: BTreeMap<String, f64>,
    pub tolerance: f64,
    pub pass: bool,
}

impl ConstraintReport {
    pub fn worst(&self) -> f64 {
        self.residuals.values().fold(0.0_f64, |a, &b| a.max(b))
    }

    /// Line-oriented text format `constraint_name residual pass`, one line
    /// per constraint, for CI diffing.
    pub fn to_lines(&self) -> String {
        let mut out = String::new();
        for (name, r) in &self.residuals {
            let ok = *r <= self.tolerance;
            out.push_str(&format!("{name} {r:e} {ok}\n"));
        }
        out
    }
}

/// Verify every unitarity identity of a coin set.
///
/// Nine residuals are reported: the three jump-level identities from
/// U†U = 1, the five transport-level identities, and (as one entry) the
/// worst of the three mirrored jump identities from UU† = 1.
pub fn check_unitarity(coins: &CoinSet, tol: f64) -> ConstraintReport {
    let d = coins.dim();
    let id = CMatrix::identity(d, d);
    let wm = &coins.w_minus;
    let w0 = &coins.w_zero;
    let wp = &coins.w_plus;
    let b = &coins.b;
    let v = &coins.v;
    let m = &coins.m;

    let mut residuals = BTreeMap::new();

    // Jump level, from U†U = 1.
    residuals.insert(
        "jump_sum_to_identity".into(),
        max_abs(&(wm.adjoint() * wm + wp.adjoint() * wp + w0.adjoint() * w0 - &id)),
    );
    residuals.insert(
        "jump_adjacent_overlap".into(),
        max_abs(&(wm.adjoint() * w0 + w0.adjoint() * wp)),
    );
    residuals.insert(
        "jump_opposite_overlap".into(),
        max_abs(&(wm.adjoint() * wp)),
    );

    // Transport level.
    residuals.insert(
        "transport_VV_eq_BB".into(),
        max_abs_diff(&(v.adjoint() * v), &(b.adjoint() * b)),
    );
    residuals.insert(
        "transport_BV_exchange".into(),
        max_abs_diff(&(b.adjoint() * v), &(v.adjoint() * b)),
    );
    residuals.insert(
        "transport_VV_VM_balance".into(),
        max_abs(&(v.adjoint() * v * real(2.0) - v.adjoint() * m - m.adjoint() * v)),
    );
    residuals.insert(
        "transport_BM_exchange".into(),
        max_abs_diff(&(b.adjoint() * m), &(m.adjoint() * b)),
    );
    residuals.insert(
        "transport_M_unitary".into(),
        identity_residual(&(m.adjoint() * m)),
    );

    // Mirrored jump identities from UU† = 1, folded into one entry.
    let mirror = [
        max_abs(&(wm * wm.adjoint() + wp * wp.adjoint() + w0 * w0.adjoint() - &id)),
        max_abs(&(w0 * wm.adjoint() + wp * w0.adjoint())),
        max_abs(&(wp * wm.adjoint())),
    ];
    residuals.insert(
        "uu_dagger_side".into(),
        mirror.iter().fold(0.0_f64, |a, &b| a.max(b)),
    );

    let pass = residuals.values().all(|&r| r <= tol);
    ConstraintReport {
        residuals,
        tolerance: tol,
        pass,
    }
}

/// The coin blocks of the two-step Hamiltonian
/// `H = A¹(-i D₁) + wilson (-L) + εm A⁰`.
#[derive(Debug, Clone)]
pub struct HamiltonianBlocks {
    /// A⁰ = μ α⁰, the mass block.
    pub a0: CMatrix,
    /// A¹ = (B + B†)/2 = η α¹, the transport block.
    pub a1: CMatrix,
    /// Full coefficient of (-L): (r/2)·Q = (ν ε^ρ r / 2) α^λ. Zero for the
    /// massive Q = 0 family.
    pub wilson: CMatrix,
}

/// Derive the Hamiltonian blocks from a coin set and cross-check the two
/// equivalent constructions.
///
/// The blocks are stored in closed form (μα⁰, νε^ρ(r/2)α^λ) so that m = 0
/// and r = 0 are non-singular; the quotient forms i(M - M†)/(2εm) and
/// -i(V - V†)/4 serve as cross-checks. A mismatch signals a coin set that
/// was tampered with or built inconsistently.
pub fn hamiltonian_blocks(coins: &CoinSet) -> Result<HamiltonianBlocks> {
    const CHECK_TOL: f64 = 1e-12;
    let d = coins.dim();
    let rep = &coins.rep;
    let p = &coins.params;

    let a1 = (&coins.b + coins.b.adjoint()) * real(0.5);

    let a0 = &rep.alpha0 * real(coins.norms.mu);
    let em = p.epsilon * p.mass;
    if em != 0.0 {
        let quotient = (&coins.m - coins.m.adjoint()) * (I * real(0.5 / em));
        let residual = max_abs_diff(&a0, &quotient);
        if residual > CHECK_TOL {
            return Err(Error::CrossCheckFailed {
                name: "a0 closed form vs i(M - M†)/(2εm)",
                residual,
            });
        }
    }

    let wilson = match p.variant {
        Variant::MassiveQ0 => CMatrix::zeros(d, d),
        Variant::WilsonLambda => {
            let alpha_l = rep.alpha_lambda(p.lambda.index())?;
            alpha_l * real(0.5 * coins.norms.nu * p.epsilon.powf(p.rho) * p.wilson_r)
        }
    };
    // (r/2)·Q with Q = -(i/r)(V - V†)/2 telescopes to -i(V - V†)/4, which is
    // well defined even at r = 0.
    let quotient = (&coins.v - coins.v.adjoint()) * (I * real(-0.25));
    let residual = max_abs_diff(&wilson, &quotient);
    if residual > CHECK_TOL {
        return Err(Error::CrossCheckFailed {
            name: "wilson block closed form vs -i(V - V†)/4",
            residual,
        });
    }

    Ok(HamiltonianBlocks { a0, a1, wilson })
}

impl HamiltonianBlocks {
    /// Residuals of the emergent block algebra:
    /// (A⁰)² = μ²·1, (A¹)² = η²·1, {A⁰, A¹} = 0 and {wilson, A¹} = 0.
    pub fn algebra_residuals(&self, norms: &Normalizations) -> BTreeMap<String, f64> {
        let d = self.a0.nrows();
        let id = CMatrix::identity(d, d);
        let mut out = BTreeMap::new();
        out.insert(
            "a0_squared_minus_mu2".into(),
            max_abs(&(&self.a0 * &self.a0 - &id * real(norms.mu * norms.mu))),
        );
        out.insert(
            "a1_squared_minus_eta2".into(),
            max_abs(&(&self.a1 * &self.a1 - &id * real(norms.eta * norms.eta))),
        );
        out.insert(
            "anticommutator_a0_a1".into(),
            max_abs(&anticommutator(&self.a0, &self.a1)),
        );
        out.insert(
            "anticommutator_wilson_a1".into(),
            max_abs(&anticommutator(&self.wilson, &self.a1)),
        );
        out.insert("a0_hermitian".into(), hermiticity_residual(&self.a0));
        out.insert("a1_hermitian".into(), hermiticity_residual(&self.a1));
        out.insert(
            "wilson_hermitian".into(),
            hermiticity_residual(&self.wilson),
        );
        out
    }
}
