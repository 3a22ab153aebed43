//! Walk operator, local Hamiltonian and momentum-space symbol on a periodic
//! N-site lattice.
//!
//! Conventions, fixed once and used everywhere:
//!
//! - the shift acts as `(T₁Ψ)_p = Ψ_{p-1}`, so `T₁ → e^{-ikε}` on plane
//!   waves `Ψ_p = e^{ik p ε}`;
//! - the symmetric difference `-i D₁ = -i(T₁⁻¹ - T₁)/2 → sin(kε)` and the
//!   discrete Laplacian `-L = 2 - T₁⁻¹ - T₁ → 2(1 - cos(kε))`;
//! - boundaries are periodic, which preserves exact translation invariance;
//!   the only effect is that momenta quantize to `k_q = 2πq/(Nε)`.
//!
//! The walk operator is stored as its three coin blocks plus the site
//! count, never as a dense matrix, so application is O(N) and ultralocality
//! holds by construction: a site's output depends on its two neighbors and
//! itself, and amplitudes outside that stencil stay exactly zero. A dense
//! materialization exists purely as a test oracle for small lattices.

use num_complex::Complex64;

use crate::coins::CoinSet;
use crate::error::{Error, Result};
use crate::matrix::{hermiticity_residual, max_abs_diff, real, CMatrix, I};
use crate::spectral::squared_dispersion_of_coins;

/// Spinor-valued wavefunction on N periodic sites.
#[derive(Debug, Clone, PartialEq)]
pub struct LatticeState {
    pub sites: usize,
    pub dim: usize,
    pub step_index: i64,
    pub amps: Vec<Complex64>,
}

impl LatticeState {
    pub fn zeros(sites: usize, dim: usize) -> Self {
        Self {
            sites,
            dim,
            step_index: 0,
            amps: vec![Complex64::ZERO; sites * dim],
        }
    }

    /// State concentrated on one site with the given spinor.
    pub fn delta(sites: usize, dim: usize, site: usize, spinor: &[Complex64]) -> Result<Self> {
        if spinor.len() != dim {
            return Err(Error::DimensionMismatch(format!(
                "spinor has {} components, lattice carries {dim}",
                spinor.len()
            )));
        }
        if site >= sites {
            return Err(Error::InvalidParams(format!(
                "site {site} outside lattice of {sites} sites"
            )));
        }
        let mut st = Self::zeros(sites, dim);
        for (c, &a) in spinor.iter().enumerate() {
            st.amps[site * dim + c] = a;
        }
        Ok(st)
    }

    #[inline]
    pub fn amp(&self, site: usize, comp: usize) -> Complex64 {
        self.amps[site * self.dim + comp]
    }

    #[inline]
    pub fn amp_mut(&mut self, site: usize, comp: usize) -> &mut Complex64 {
        &mut self.amps[site * self.dim + comp]
    }

    pub fn norm_squared(&self) -> f64 {
        self.amps.iter().map(|c| c.norm_sqr()).sum()
    }

    pub fn norm(&self) -> f64 {
        self.norm_squared().sqrt()
    }

    pub fn normalize(&mut self) -> Result<()> {
        let n = self.norm();
        if n == 0.0 {
            return Err(Error::ZeroState);
        }
        let inv = real(1.0 / n);
        for a in &mut self.amps {
            *a *= inv;
        }
        Ok(())
    }

    /// Cyclic shift by one site toward larger p: out_p = in_{p-1}.
    pub fn shifted(&self) -> Self {
        let mut out = self.clone();
        for p in 0..self.sites {
            let src = (p + self.sites - 1) % self.sites;
            for c in 0..self.dim {
                out.amps[p * self.dim + c] = self.amps[src * self.dim + c];
            }
        }
        out
    }

    pub fn max_abs_diff(&self, other: &Self) -> f64 {
        self.amps
            .iter()
            .zip(other.amps.iter())
            .fold(0.0_f64, |acc, (a, b)| acc.max((a - b).norm()))
    }
}

/// The unitary one-step evolution `U = W₋₁ T₁⁻¹ + W₁ T₁ + W₀`.
#[derive(Debug, Clone)]
pub struct WalkOperator {
    pub sites: usize,
    pub coins: CoinSet,
}

/// Build the walk operator; at least 3 sites are required so the
/// one-site band does not overlap itself around the ring.
pub fn build_walk_operator(coins: &CoinSet, sites: usize) -> Result<WalkOperator> {
    if sites < 3 {
        return Err(Error::LatticeTooSmall(sites));
    }
    Ok(WalkOperator {
        sites,
        coins: coins.clone(),
    })
}

impl WalkOperator {
    fn check_state(&self, psi: &LatticeState) -> Result<()> {
        if psi.sites != self.sites || psi.dim != self.coins.dim() {
            return Err(Error::DimensionMismatch(format!(
                "state is {}x{}, operator acts on {}x{}",
                psi.sites,
                psi.dim,
                self.sites,
                self.coins.dim()
            )));
        }
        Ok(())
    }

    /// `Ψ'_p = W₋₁ Ψ_{p+1} + W₁ Ψ_{p-1} + W₀ Ψ_p` with periodic wraparound.
    pub fn apply(&self, psi: &LatticeState) -> Result<LatticeState> {
        self.check_state(psi)?;
        let out = self.stencil(
            psi,
            &self.coins.w_minus,
            &self.coins.w_plus,
            &self.coins.w_zero,
        );
        Ok(LatticeState {
            step_index: psi.step_index + 1,
            ..out
        })
    }

    /// `U† = W₋₁† T₁ + W₁† T₁⁻¹ + W₀†`.
    pub fn apply_adjoint(&self, psi: &LatticeState) -> Result<LatticeState> {
        self.check_state(psi)?;
        let out = self.stencil(
            psi,
            &self.coins.w_plus.adjoint(),
            &self.coins.w_minus.adjoint(),
            &self.coins.w_zero.adjoint(),
        );
        Ok(LatticeState {
            step_index: psi.step_index - 1,
            ..out
        })
    }

    /// out_p = up·ψ_{p+1} + down·ψ_{p-1} + diag·ψ_p
    fn stencil(
        &self,
        psi: &LatticeState,
        up: &CMatrix,
        down: &CMatrix,
        diag: &CMatrix,
    ) -> LatticeState {
        let n = self.sites;
        let d = self.coins.dim();
        let mut out = LatticeState::zeros(n, d);
        for p in 0..n {
            let fwd = if p + 1 == n { 0 } else { p + 1 };
            let bwd = if p == 0 { n - 1 } else { p - 1 };
            for i in 0..d {
                let mut acc = Complex64::ZERO;
                for j in 0..d {
                    acc += up[(i, j)] * psi.amp(fwd, j)
                        + down[(i, j)] * psi.amp(bwd, j)
                        + diag[(i, j)] * psi.amp(p, j);
                }
                out.amps[p * d + i] = acc;
            }
        }
        out
    }

    /// Dense N·d × N·d materialization, a test oracle for small lattices.
    pub fn to_dense(&self) -> Result<CMatrix> {
        if self.sites > 64 {
            return Err(Error::DenseTooLarge(self.sites));
        }
        dense_banded(
            self.sites,
            &self.coins.w_minus,
            &self.coins.w_plus,
            &self.coins.w_zero,
        )
    }
}

fn dense_banded(n: usize, up: &CMatrix, down: &CMatrix, diag: &CMatrix) -> Result<CMatrix> {
    let d = up.nrows();
    let mut dense = CMatrix::zeros(n * d, n * d);
    for p in 0..n {
        let fwd = (p + 1) % n;
        let bwd = (p + n - 1) % n;
        for i in 0..d {
            for j in 0..d {
                dense[(p * d + i, fwd * d + j)] += up[(i, j)];
                dense[(p * d + i, bwd * d + j)] += down[(i, j)];
                dense[(p * d + i, p * d + j)] += diag[(i, j)];
            }
        }
    }
    Ok(dense)
}

/// The ultralocal two-step Hamiltonian `H = (i/2)(U - U†)`, stored as its
/// three coin blocks (coefficients of Ψ_{p+1}, Ψ_{p-1}, Ψ_p).
#[derive(Debug, Clone)]
pub struct LocalHamiltonian {
    pub sites: usize,
    pub up: CMatrix,
    pub down: CMatrix,
    pub diag: CMatrix,
}

/// Assemble the local Hamiltonian through its two equivalent constructions
/// and verify that they agree entrywise.
///
/// Construction (i) reads the blocks off `(i/2)(U - U†)`; construction (ii)
/// assembles `A¹(-i D₁) + wilson (-L) + εm A⁰` from the coin blocks. A
/// mismatch above 1e-12 is an error, as is a non-Hermitian result.
pub fn local_hamiltonian(walk: &WalkOperator) -> Result<LocalHamiltonian> {
    const TOL: f64 = 1e-12;
    let coins = &walk.coins;
    let half_i = I * real(0.5);

    // (i) from the walk: coefficients of T₁⁻¹, T₁ and the diagonal.
    let up = (&coins.w_minus - coins.w_plus.adjoint()) * half_i;
    let down = (&coins.w_plus - coins.w_minus.adjoint()) * half_i;
    let diag = (&coins.w_zero - coins.w_zero.adjoint()) * half_i;

    // (ii) from the Hamiltonian blocks.
    let blocks = crate::coins::hamiltonian_blocks(coins)?;
    let em = coins.params.epsilon * coins.params.mass;
    let up_blocks = &blocks.a1 * (-half_i) - &blocks.wilson;
    let down_blocks = &blocks.a1 * half_i - &blocks.wilson;
    let diag_blocks = &blocks.wilson * real(2.0) + &blocks.a0 * real(em);

    for (name, lhs, rhs) in [
        ("hamiltonian up block", &up, &up_blocks),
        ("hamiltonian down block", &down, &down_blocks),
        ("hamiltonian diagonal block", &diag, &diag_blocks),
    ] {
        let residual = max_abs_diff(lhs, rhs);
        if residual > TOL {
            return Err(Error::CrossCheckFailed { name, residual });
        }
    }

    let h = LocalHamiltonian {
        sites: walk.sites,
        up,
        down,
        diag,
    };
    let herm = h.hermiticity_residual();
    if herm > TOL {
        return Err(Error::CrossCheckFailed {
            name: "hamiltonian hermiticity",
            residual: herm,
        });
    }
    Ok(h)
}

impl LocalHamiltonian {
    /// Band-level Hermiticity: down = up† and a Hermitian diagonal.
    pub fn hermiticity_residual(&self) -> f64 {
        max_abs_diff(&self.down, &self.up.adjoint()).max(hermiticity_residual(&self.diag))
    }

    pub fn apply(&self, psi: &LatticeState) -> Result<LatticeState> {
        if psi.sites != self.sites || psi.dim != self.up.nrows() {
            return Err(Error::DimensionMismatch(
                "state does not match hamiltonian".into(),
            ));
        }
        let n = self.sites;
        let d = self.up.nrows();
        let mut out = LatticeState::zeros(n, d);
        out.step_index = psi.step_index;
        for p in 0..n {
            let fwd = (p + 1) % n;
            let bwd = (p + n - 1) % n;
            for i in 0..d {
                let mut acc = Complex64::ZERO;
                for j in 0..d {
                    acc += self.up[(i, j)] * psi.amp(fwd, j)
                        + self.down[(i, j)] * psi.amp(bwd, j)
                        + self.diag[(i, j)] * psi.amp(p, j);
                }
                out.amps[p * d + i] = acc;
            }
        }
        Ok(out)
    }

    /// Dense oracle, for small lattices only.
    pub fn to_dense(&self) -> Result<CMatrix> {
        if self.sites > 64 {
            return Err(Error::DenseTooLarge(self.sites));
        }
        dense_banded(self.sites, &self.up, &self.down, &self.diag)
    }
}

/// Momentum-space symbol of the Hamiltonian density `h = H/ε`:
///
/// ```text
/// h̃(k) = η sin(kε)/ε · α¹ + μ m · α⁰ + ν ε^ρ (r/ε)(1 - cos kε) · α^λ
/// ```
///
/// (the Wilson term is absent for the massive Q = 0 family). Hermitian for
/// every k in the Brillouin zone.
pub fn momentum_symbol(coins: &CoinSet, k: f64) -> Result<CMatrix> {
    let p = &coins.params;
    let edge = p.bz_edge();
    if k.is_nan() || k.abs() > edge * (1.0 + 1e-12) {
        return Err(Error::OutsideBrillouinZone { k, edge });
    }
    let rep = &coins.rep;
    let x = k * p.epsilon;
    let transport = coins.norms.eta * x.sin() / p.epsilon;
    let mass = coins.norms.mu * p.mass;
    let mut h = &rep.alpha1 * real(transport) + &rep.alpha0 * real(mass);
    if coins.params.variant == crate::coins::Variant::WilsonLambda {
        let alpha_l = rep.alpha_lambda(p.lambda.index())?;
        let wilson =
            coins.norms.nu * p.epsilon.powf(p.rho) * (p.wilson_r / p.epsilon) * (1.0 - x.cos());
        h += alpha_l * real(wilson);
    }
    Ok(h)
}

/// Eigenvalues (ascending) and matching eigenvector columns of h̃(k).
pub fn symbol_eigen(coins: &CoinSet, k: f64) -> Result<(Vec<f64>, CMatrix)> {
    let h = momentum_symbol(coins, k)?;
    let eig = h.symmetric_eigen();
    let d = eig.eigenvalues.len();
    let mut order: Vec<usize> = (0..d).collect();
    order.sort_by(|&a, &b| eig.eigenvalues[a].total_cmp(&eig.eigenvalues[b]));
    let values: Vec<f64> = order.iter().map(|&i| eig.eigenvalues[i]).collect();
    let vectors = CMatrix::from_fn(d, d, |i, j| eig.eigenvectors[(i, order[j])]);
    Ok((values, vectors))
}

/// Max over the grid of `‖h̃(k)² - F(k)·1‖`: the numerical form of the
/// squaring identity that makes the scheme a valid Klein-Gordon
/// discretization.
pub fn symbol_square_residual(coins: &CoinSet, k_grid: &[f64]) -> Result<f64> {
    let d = coins.dim();
    let id = CMatrix::identity(d, d);
    let mut worst = 0.0_f64;
    for &k in k_grid {
        let h = momentum_symbol(coins, k)?;
        let f = squared_dispersion_of_coins(coins, k)?;
        let residual = max_abs_diff(&(&h * &h), &(&id * real(f)));
        worst = worst.max(residual);
    }
    Ok(worst)
}
