//! State evolution, wave packets and physical observables.
//!
//! Two equivalent dynamics are provided:
//!
//! - the one-step walk `Ψ_{j+1} = U Ψ_j`;
//! - the two-step scheme `i(Ψ_{j+1} - Ψ_{j-1})/2 = H Ψ_j` with the
//!   ultralocal Hamiltonian `H = (i/2)(U - U†)`, i.e. the recursion
//!   `Ψ_{j+1} = Ψ_{j-1} + (U - U†) Ψ_j`, which needs both Ψ₀ and Ψ₁.
//!
//! Seeding the two-step scheme with `Ψ₁ = U Ψ₀` reproduces the one-step
//! trajectory identically; other seedings are supported but carry no claim
//! of physical equivalence. Because the walk is ultralocal, support grows
//! by exactly one site per step — amplitudes outside the light cone are
//! exactly zero, not merely small — and every mean-position slope is bounded
//! by one site per step.

use num_complex::Complex64;

use crate::coins::CoinSet;
use crate::error::{Error, Result};
use crate::lattice::{symbol_eigen, LatticeState, WalkOperator};
use crate::matrix::cplx;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Scheme {
    OneStep,
    TwoStep,
}

/// An ordered sequence of states, one per time step.
#[derive(Debug, Clone)]
pub struct Trajectory {
    pub states: Vec<LatticeState>,
    pub params: crate::coins::ModelParams,
    pub scheme: Scheme,
}

impl Trajectory {
    pub fn steps(&self) -> usize {
        self.states.len().saturating_sub(1)
    }

    /// CSV snapshot export: `step,site,re(c0..),im(c0..),prob` per row.
    pub fn to_csv(&self) -> String {
        let dim = self.states.first().map_or(0, |s| s.dim);
        let mut out = String::from("step,site");
        for c in 0..dim {
            out.push_str(&format!(",re_c{c}"));
        }
        for c in 0..dim {
            out.push_str(&format!(",im_c{c}"));
        }
        out.push_str(",prob\n");
        for state in &self.states {
            for p in 0..state.sites {
                out.push_str(&format!("{},{}", state.step_index, p));
                for c in 0..dim {
                    out.push_str(&format!(",{}", state.amp(p, c).re));
                }
                for c in 0..dim {
                    out.push_str(&format!(",{}", state.amp(p, c).im));
                }
                let prob: f64 = (0..dim).map(|c| state.amp(p, c).norm_sqr()).sum();
                out.push_str(&format!(",{prob}\n"));
            }
        }
        out
    }
}

/// Repeated application of the one-step walk: `steps + 1` states.
pub fn evolve_one_step(
    walk: &WalkOperator,
    psi0: &LatticeState,
    steps: usize,
) -> Result<Trajectory> {
    let mut states = Vec::with_capacity(steps + 1);
    states.push(psi0.clone());
    for _ in 0..steps {
        let next = walk.apply(states.last().unwrap())?;
        states.push(next);
    }
    Ok(Trajectory {
        states,
        params: walk.coins.params,
        scheme: Scheme::OneStep,
    })
}

/// The centered-time recursion `Ψ_{j+1} = Ψ_{j-1} + (U - U†) Ψ_j`.
///
/// Takes both initial conditions. `steps = 0` returns just `[Ψ₀]`; for
/// `steps >= 1` the second state is `Ψ₁` and the recursion fills the rest.
pub fn evolve_two_step(
    walk: &WalkOperator,
    psi0: &LatticeState,
    psi1: &LatticeState,
    steps: usize,
) -> Result<Trajectory> {
    if psi0.sites != psi1.sites || psi0.dim != psi1.dim {
        return Err(Error::DimensionMismatch(
            "two-step initial conditions have different shapes".into(),
        ));
    }
    let mut states = Vec::with_capacity(steps + 1);
    states.push(psi0.clone());
    if steps >= 1 {
        let mut psi1 = psi1.clone();
        psi1.step_index = psi0.step_index + 1;
        states.push(psi1);
    }
    for j in 1..steps {
        let current = &states[j];
        let previous = &states[j - 1];
        let u_cur = walk.apply(current)?;
        let ud_cur = walk.apply_adjoint(current)?;
        let mut next = previous.clone();
        next.step_index = psi0.step_index + j as i64 + 1;
        for idx in 0..next.amps.len() {
            next.amps[idx] += u_cur.amps[idx] - ud_cur.amps[idx];
        }
        states.push(next);
    }
    Ok(Trajectory {
        states,
        params: walk.coins.params,
        scheme: Scheme::TwoStep,
    })
}

/// Eigenbranch of the momentum-space symbol.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Branch {
    /// The nonnegative eigenvalue of h̃(k).
    Plus,
    /// The nonpositive eigenvalue.
    Minus,
}

/// A Gaussian superposition of plane-wave eigenstates.
#[derive(Debug, Clone, Copy)]
pub struct WavePacket {
    /// Central momentum k₀, strictly inside the Brillouin zone.
    pub center_k: f64,
    /// Standard deviation of the Gaussian momentum weight.
    pub width: f64,
    pub branch: Branch,
    /// Site on which the packet envelope is centered.
    pub center_site: usize,
}

/// Synthesize a packet on the lattice momenta `k_q = 2πq/(Nε)`.
///
/// Each momentum contributes its Gaussian weight times the chosen
/// eigenvector of h̃(k_q); the state is normalized at the end. When the two
/// branches are degenerate (massless case at k = 0) the eigenvector is
/// taken by continuity from k → 0⁺.
pub fn make_wave_packet(
    coins: &CoinSet,
    sites: usize,
    packet: &WavePacket,
) -> Result<LatticeState> {
    let params = &coins.params;
    let edge = params.bz_edge();
    if packet.width <= 0.0 || packet.width.is_nan() {
        return Err(Error::InvalidParams(format!(
            "packet width must be positive, got {}",
            packet.width
        )));
    }
    if packet.center_k.abs() >= edge {
        return Err(Error::InvalidParams(format!(
            "packet momentum {} must lie strictly inside the zone (edge {edge})",
            packet.center_k
        )));
    }
    if packet.center_site >= sites {
        return Err(Error::InvalidParams(format!(
            "center site {} outside lattice of {sites} sites",
            packet.center_site
        )));
    }

    let d = coins.dim();
    let mut state = LatticeState::zeros(sites, d);
    let two_pi_over_ne = 2.0 * std::f64::consts::PI / (sites as f64 * params.epsilon);
    let zone_width = 2.0 * edge;

    for q in 0..sites {
        let signed = if q < sites.div_ceil(2) {
            q as i64
        } else {
            q as i64 - sites as i64
        };
        let k = signed as f64 * two_pi_over_ne;

        // Periodic momentum distance to the packet center.
        let mut dk = k - packet.center_k;
        dk -= zone_width * (dk / zone_width).round();
        let weight = (-dk * dk / (4.0 * packet.width * packet.width)).exp();
        if weight < 1e-14 {
            continue;
        }

        let (values, vectors) = symbol_eigen(coins, k)?;
        let scale = values.last().unwrap().abs().max(1.0);
        let degenerate = values.last().unwrap() - values[0] < 1e-12 * scale;
        let col = match packet.branch {
            Branch::Plus => d - 1,
            Branch::Minus => 0,
        };
        let spinor: Vec<Complex64> = if degenerate {
            // Resolve the flat direction by continuity toward k → 0⁺.
            let probe = if k < edge * (1.0 - 1e-9) {
                k + 1e-7 * edge
            } else {
                k - 1e-7 * edge
            };
            let (_, vs) = symbol_eigen(coins, probe)?;
            (0..d).map(|i| vs[(i, col)]).collect()
        } else {
            (0..d).map(|i| vectors[(i, col)]).collect()
        };

        for p in 0..sites {
            let x = (p as f64 - packet.center_site as f64) * params.epsilon;
            let phase = cplx(0.0, k * x).exp();
            for (c, &s) in spinor.iter().enumerate() {
                *state.amp_mut(p, c) += s * phase * cplx(weight, 0.0);
            }
        }
    }

    state.normalize()?;
    Ok(state)
}

/// Norm, position distribution and its first two moments.
#[derive(Debug, Clone)]
pub struct Observables {
    pub norm: f64,
    /// `p_site = Σ_c |Ψ_{site,c}|² / ‖Ψ‖²`.
    pub distribution: Vec<f64>,
    pub mean_position: f64,
    pub std_position: f64,
}

pub fn observables(state: &LatticeState) -> Result<Observables> {
    let norm_sq = state.norm_squared();
    if norm_sq == 0.0 {
        return Err(Error::ZeroState);
    }
    let mut distribution = Vec::with_capacity(state.sites);
    for p in 0..state.sites {
        let w: f64 = (0..state.dim).map(|c| state.amp(p, c).norm_sqr()).sum();
        distribution.push(w / norm_sq);
    }
    let mean: f64 = distribution
        .iter()
        .enumerate()
        .map(|(p, w)| p as f64 * w)
        .sum();
    let second: f64 = distribution
        .iter()
        .enumerate()
        .map(|(p, w)| (p as f64) * (p as f64) * w)
        .sum();
    let var = (second - mean * mean).max(0.0);
    Ok(Observables {
        norm: norm_sq.sqrt(),
        distribution,
        mean_position: mean,
        std_position: var.sqrt(),
    })
}

/// Largest cyclic distance from `center` at which the position probability
/// exceeds `tol`.
pub fn support_radius(state: &LatticeState, center: usize, tol: f64) -> Result<usize> {
    let obs = observables(state)?;
    let n = state.sites;
    let mut radius = 0;
    for (p, &w) in obs.distribution.iter().enumerate() {
        if w > tol {
            let d = (p as i64 - center as i64).unsigned_abs() as usize;
            radius = radius.max(d.min(n - d));
        }
    }
    Ok(radius)
}

/// Least-squares slope of the mean position (sites) against the step index.
///
/// With the ballistic scaling the slope is directly the group velocity in
/// units of the light speed, so `|v| <= 1` for every packet that does not
/// wrap around the lattice.
pub fn group_velocity_estimate(trajectory: &Trajectory) -> Result<f64> {
    let n = trajectory.states.len();
    if n < 11 {
        return Err(Error::TooFewSteps {
            need: 10,
            got: n.saturating_sub(1),
        });
    }
    let mut xs = Vec::with_capacity(n);
    let mut ys = Vec::with_capacity(n);
    for (j, state) in trajectory.states.iter().enumerate() {
        xs.push(j as f64);
        ys.push(observables(state)?.mean_position);
    }
    let m = n as f64;
    let mx = xs.iter().sum::<f64>() / m;
    let my = ys.iter().sum::<f64>() / m;
    let sxx: f64 = xs.iter().map(|x| (x - mx) * (x - mx)).sum();
    let sxy: f64 = xs
        .iter()
        .zip(ys.iter())
        .map(|(x, y)| (x - mx) * (y - my))
        .sum();
    Ok(sxy / sxx)
}
