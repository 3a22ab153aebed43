//! Dispersion relations, fermion-doubling diagnostics and convergence
//! studies for the four models compared throughout the crate.
//!
//! For each model M the dispersion enters through a scalar function F:
//!
//! ```text
//! Dirac    F(k) = k² + m²
//! naive    F(k) = sin²(kε)/ε² + m²
//! LGT      F(k) = sin²(kε)/ε² + [m + (r/ε)(1 - cos kε)]²
//! DQW,λ=0  F(k) = η² sin²(kε)/ε² + [μm + ν ε^ρ (r/ε)(1 - cos kε)]²
//! DQW,λ=2  F(k) = η² sin²(kε)/ε² + (μm)² + [ν ε^ρ (r/ε)(1 - cos kε)]²
//! ```
//!
//! The continuous-time models have frequencies ω± = ±√F; the discrete-time
//! walk instead satisfies `sin²(ωε)/ε² = F(k)`, which recovers ±√F at low
//! frequency. What is plotted and compared across models is the *gapless
//! frequency* `f(k) = √(F(k) - F(0))`: its zeros inside the Brillouin zone
//! count the propagating modes, so spurious zeros at the zone edges are
//! exactly the fermion-doubling problem. The Wilson term raises the edge
//! value by the *raising amplitude*, `(ν r ε^{ρ-1})²` for the walk, which
//! stays bounded away from zero when ρ < 1 — that is the doubling-avoidance
//! criterion.

use crate::coins::{CoinSet, Lambda, ModelParams, Normalizations, Variant};
use crate::error::{Error, Result};

/// Which dispersion model a quantity refers to.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ModelTag {
    /// Continuum Dirac fermions.
    Dirac,
    /// Space discretized with the symmetric difference, time continuous.
    Naive,
    /// Naive plus the standard Wilson term, time continuous.
    Lgt,
    /// The unitary walk with the ε^ρ-scaled Wilson term.
    Dqw(Lambda),
}

impl std::fmt::Display for ModelTag {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            ModelTag::Dirac => write!(f, "dirac"),
            ModelTag::Naive => write!(f, "naive"),
            ModelTag::Lgt => write!(f, "lgt"),
            ModelTag::Dqw(_) => write!(f, "dqw"),
        }
    }
}

/// Symmetric momentum grid over the closed Brillouin zone [-π/ε, π/ε].
///
/// With odd `n` the grid contains k = 0 and both edges exactly.
pub fn brillouin_grid(params: &ModelParams, n: usize) -> Vec<f64> {
    assert!(n >= 3, "grid needs at least 3 points");
    let edge = params.bz_edge();
    let half = (n / 2) as f64;
    (0..n).map(|i| (i as f64 - half) / half * edge).collect()
}

fn check_zone(params: &ModelParams, k: f64) -> Result<()> {
    let edge = params.bz_edge();
    if !k.is_nan() && k.abs() <= edge * (1.0 + 1e-12) {
        Ok(())
    } else {
        Err(Error::OutsideBrillouinZone { k, edge })
    }
}

fn wilson_params(params: &ModelParams, lambda: Lambda) -> ModelParams {
    ModelParams {
        lambda,
        variant: Variant::WilsonLambda,
        ..*params
    }
}

fn dqw_f(norms: &Normalizations, params: &ModelParams, lambda: Lambda, k: f64) -> f64 {
    let x = k * params.epsilon;
    let transport = norms.eta * x.sin() / params.epsilon;
    let mass = norms.mu * params.mass;
    let wilson = norms.nu
        * params.epsilon.powf(params.rho)
        * (params.wilson_r / params.epsilon)
        * (1.0 - x.cos());
    match lambda {
        Lambda::Zero => transport * transport + (mass + wilson) * (mass + wilson),
        Lambda::Two => transport * transport + mass * mass + wilson * wilson,
    }
}

/// The dispersion function F of a model at momentum k.
///
/// Lattice models require k in the Brillouin zone; the continuum Dirac model
/// accepts any k. For `Dqw` the λ of the tag overrides `params.lambda`.
pub fn squared_dispersion(model: ModelTag, params: &ModelParams, k: f64) -> Result<f64> {
    params.validate()?;
    let eps = params.epsilon;
    let m = params.mass;
    match model {
        ModelTag::Dirac => Ok(k * k + m * m),
        ModelTag::Naive => {
            check_zone(params, k)?;
            let s = (k * eps).sin() / eps;
            Ok(s * s + m * m)
        }
        ModelTag::Lgt => {
            check_zone(params, k)?;
            let s = (k * eps).sin() / eps;
            let w = m + (params.wilson_r / eps) * (1.0 - (k * eps).cos());
            Ok(s * s + w * w)
        }
        ModelTag::Dqw(lambda) => {
            check_zone(params, k)?;
            let p = wilson_params(params, lambda);
            let norms = Normalizations::compute(&p)?;
            Ok(dqw_f(&norms, &p, lambda, k))
        }
    }
}

/// F evaluated directly from a built coin set (covers the massive Q = 0
/// family, for which the Wilson term is absent).
pub fn squared_dispersion_of_coins(coins: &CoinSet, k: f64) -> Result<f64> {
    let p = &coins.params;
    check_zone(p, k)?;
    match p.variant {
        Variant::MassiveQ0 => {
            let x = k * p.epsilon;
            let s = coins.norms.eta * x.sin() / p.epsilon;
            let mass = coins.norms.mu * p.mass;
            Ok(s * s + mass * mass)
        }
        Variant::WilsonLambda => Ok(dqw_f(&coins.norms, p, p.lambda, k)),
    }
}

/// Central (k = 0) gap of a model: m² for the continuous-time models,
/// (μm)² for the walk. Equals `squared_dispersion(model, params, 0)`
/// exactly.
pub fn central_gap(model: ModelTag, params: &ModelParams) -> Result<f64> {
    params.validate()?;
    match model {
        ModelTag::Dirac | ModelTag::Naive | ModelTag::Lgt => Ok(params.mass * params.mass),
        ModelTag::Dqw(lambda) => {
            let p = wilson_params(params, lambda);
            let norms = Normalizations::compute(&p)?;
            let mass = norms.mu * p.mass;
            Ok(mass * mass)
        }
    }
}

/// Gapless frequency `f(k) = √(F(k) - F(0))`, the quantity plotted to
/// compare models.
///
/// Evaluated in closed form where one exists (|k| for Dirac, |sin kε|/ε for
/// naive). For parameter corners where the band dips below its central
/// value (possible when ν r < 0) the difference is clamped at zero.
pub fn gapless_frequency(model: ModelTag, params: &ModelParams, k: f64) -> Result<f64> {
    match model {
        ModelTag::Dirac => Ok(k.abs()),
        ModelTag::Naive => {
            check_zone(params, k)?;
            Ok((k * params.epsilon).sin().abs() / params.epsilon)
        }
        _ => {
            let f = squared_dispersion(model, params, k)?;
            let gap = central_gap(model, params)?;
            let d = f - gap;
            Ok(if d <= 0.0 { 0.0 } else { d.sqrt() })
        }
    }
}

/// Real frequency pair (ω₊, ω₋) of a discrete-time model, if it exists.
///
/// - `Dqw`: solves `sin²(ωε)/ε² = F(k)` on the principal branch. For a
///   valid coin family `ε²F ≤ 1` always holds (the scheme is unitary), so
///   this cannot fail; the check is kept as a guard for hand-made inputs.
/// - `Naive`: solves `sin²(ωε) = sin²(kε) + ε²m²`, which exists only while
///   `ε²m² ≤ cos²(kε)` — the same relation that produces temporal doublers.
/// - Continuous-time models (`Dirac`, `Lgt`) have ω± = ±√F directly and are
///   not accepted here.
pub fn frequency_solutions(model: ModelTag, params: &ModelParams, k: f64) -> Result<(f64, f64)> {
    params.validate()?;
    check_zone(params, k)?;
    let eps = params.epsilon;
    let value = match model {
        ModelTag::Dqw(_) => eps * eps * squared_dispersion(model, params, k)?,
        ModelTag::Naive => {
            let s = (k * eps).sin();
            s * s + eps * eps * params.mass * params.mass
        }
        _ => {
            return Err(Error::InvalidParams(format!(
                "{model} is a continuous-time model; its frequencies are just ±√F"
            )))
        }
    };
    if value > 1.0 + 1e-12 {
        return Err(Error::NoRealFrequency { k, value });
    }
    let omega = value.min(1.0).sqrt().asin() / eps;
    Ok((omega, -omega))
}

/// Low- and high-frequency solution pairs of the naive spacetime
/// discretization at momentum k.
#[derive(Debug, Clone, Copy)]
pub struct TemporalDoublers {
    /// Low-frequency pair ±ω, approaching the continuum branch.
    pub omega: (f64, f64),
    /// Spurious high-frequency pair Ω± = ±(π/ε - ω).
    pub capital_omega: (f64, f64),
}

/// Solve `sin²(ωε) = sin²(kε) + ε²m²` for both frequency pairs.
///
/// Real solutions exist iff `ε²m² ≤ cos²(kε)`. The frequencies are computed
/// from this defining relation on the principal arcsin branch rather than
/// from any half-angle closed form.
pub fn temporal_doubler_frequencies(params: &ModelParams, k: f64) -> Result<TemporalDoublers> {
    params.validate()?;
    check_zone(params, k)?;
    let eps = params.epsilon;
    let em2 = eps * eps * params.mass * params.mass;
    let c = (k * eps).cos();
    if em2 > c * c {
        return Err(Error::NoRealFrequency {
            k,
            value: (k * eps).sin().powi(2) + em2,
        });
    }
    let s2 = ((k * eps).sin().powi(2) + em2).min(1.0);
    let omega = s2.sqrt().asin() / eps;
    let high = std::f64::consts::PI / eps - omega;
    Ok(TemporalDoublers {
        omega: (omega, -omega),
        capital_omega: (high, -high),
    })
}

/// A sampled gapless-frequency curve over the closed Brillouin zone.
#[derive(Debug, Clone)]
pub struct DispersionCurve {
    pub model: ModelTag,
    pub params: ModelParams,
    pub k_grid: Vec<f64>,
    /// F(k) per grid point.
    pub dispersion: Vec<f64>,
    /// f(k) = √(F(k) - central gap) per grid point.
    pub gapless: Vec<f64>,
    pub central_gap: f64,
}

impl DispersionCurve {
    /// Sample the model on an odd-sized symmetric grid.
    pub fn compute(model: ModelTag, params: &ModelParams, grid_points: usize) -> Result<Self> {
        if grid_points < 3 || grid_points.is_multiple_of(2) {
            return Err(Error::InvalidParams(format!(
                "grid_points must be odd and at least 3, got {grid_points}"
            )));
        }
        let k_grid = brillouin_grid(params, grid_points);
        let mut dispersion = Vec::with_capacity(grid_points);
        let mut gapless = Vec::with_capacity(grid_points);
        for &k in &k_grid {
            dispersion.push(squared_dispersion(model, params, k)?);
            gapless.push(gapless_frequency(model, params, k)?);
        }
        Ok(Self {
            model,
            params: *params,
            k_grid,
            dispersion,
            gapless,
            central_gap: central_gap(model, params)?,
        })
    }

    /// CSV serialization: a two-line parameter header, then `k,F,f` rows.
    pub fn to_csv(&self) -> String {
        let p = &self.params;
        let mut out = String::from("model,epsilon,m,r,rho,lambda\n");
        out.push_str(&format!(
            "{},{},{},{},{},{}\n",
            self.model,
            p.epsilon,
            p.mass,
            p.wilson_r,
            p.rho,
            p.lambda.index()
        ));
        out.push_str("k,F,f\n");
        for i in 0..self.k_grid.len() {
            out.push_str(&format!(
                "{},{},{}\n",
                self.k_grid[i], self.dispersion[i], self.gapless[i]
            ));
        }
        out
    }
}

/// Zero structure of a gapless-frequency curve.
#[derive(Debug, Clone)]
pub struct DoublingReport {
    pub model: ModelTag,
    pub params: ModelParams,
    /// Cluster centers (in k) where f dips below the zero threshold.
    pub zeros: Vec<f64>,
    pub zero_count: usize,
    /// f at the Brillouin-zone edge +π/ε.
    pub edge_value: f64,
    /// (ν r ε^{ρ-1})² for the walk, (r/ε)² for LGT, 0 otherwise.
    pub raising_amplitude: f64,
    /// True iff the unique zero sits at k = 0.
    pub doubling_avoided: bool,
    pub warnings: Vec<String>,
}

/// Locate the zeros of f over the closed zone and report the doubling
/// verdict.
///
/// Zero detection is scale-aware: a grid point counts as a zero candidate
/// when `f < 10⁻⁶·(π/ε)`, and candidates within 3 grid cells merge into one
/// cluster.
pub fn doubling_report(
    model: ModelTag,
    params: &ModelParams,
    grid_points: usize,
) -> Result<DoublingReport> {
    if grid_points < 101 || grid_points.is_multiple_of(2) {
        return Err(Error::InvalidParams(format!(
            "doubling grid must be odd and at least 101 points, got {grid_points}"
        )));
    }
    let curve = DispersionCurve::compute(model, params, grid_points)?;
    let threshold = 1e-6 * params.bz_edge();

    let mut zeros = Vec::new();
    let mut cluster: Option<(usize, f64, f64)> = None; // (last index, best f, best k)
    for (i, (&k, &f)) in curve.k_grid.iter().zip(curve.gapless.iter()).enumerate() {
        if f < threshold {
            match cluster {
                Some((last, best_f, best_k)) if i - last <= 3 => {
                    cluster = Some(if f < best_f {
                        (i, f, k)
                    } else {
                        (i, best_f, best_k)
                    });
                }
                Some((_, _, best_k)) => {
                    zeros.push(best_k);
                    cluster = Some((i, f, k));
                }
                None => cluster = Some((i, f, k)),
            }
        }
    }
    if let Some((_, _, best_k)) = cluster {
        zeros.push(best_k);
    }

    let cell = curve.k_grid[1] - curve.k_grid[0];
    let doubling_avoided = zeros.len() == 1 && zeros[0].abs() <= cell;

    let raising_amplitude = match model {
        ModelTag::Dqw(lambda) => {
            let p = wilson_params(params, lambda);
            let norms = Normalizations::compute(&p)?;
            let amp = norms.nu * p.wilson_r * p.epsilon.powf(p.rho - 1.0);
            amp * amp
        }
        ModelTag::Lgt => {
            let amp = params.wilson_r / params.epsilon;
            amp * amp
        }
        ModelTag::Dirac | ModelTag::Naive => 0.0,
    };

    Ok(DoublingReport {
        model,
        params: *params,
        zero_count: zeros.len(),
        zeros,
        edge_value: *curve.gapless.last().unwrap(),
        raising_amplitude,
        doubling_avoided,
        warnings: params.warnings(),
    })
}

/// Fitted versus predicted small-k slope of f².
#[derive(Debug, Clone)]
pub struct SlopeReport {
    pub model: ModelTag,
    pub params: ModelParams,
    /// Least-squares coefficient of k² in f²(k) over the fit window.
    pub fitted_slope: f64,
    /// Closed-form prediction: 1 - ½r²ε^{2ρ} for the walk, 1 + εmr for
    /// LGT, 1 for the continuum and naive models.
    pub predicted_slope: f64,
    pub fit_window: (f64, f64),
    pub relative_error: f64,
}

/// Number of fit points in the slope window.
const SLOPE_FIT_POINTS: usize = 20;
/// Upper end of the fit window in absolute momentum. Fixed in k (not in
/// kε) so the window shrinks relative to the zone as ε decreases and the
/// fit bias decays as ε²; capped at a tenth of the zone for coarse
/// lattices.
const SLOPE_FIT_KMAX: f64 = 0.5;

fn slope_window(params: &ModelParams) -> f64 {
    SLOPE_FIT_KMAX.min(0.1 * params.bz_edge())
}

fn fit_slope_through_origin(model: ModelTag, params: &ModelParams, k_hi: f64) -> Result<f64> {
    let mut num = 0.0;
    let mut den = 0.0;
    for i in 1..=SLOPE_FIT_POINTS {
        let k = k_hi * i as f64 / SLOPE_FIT_POINTS as f64;
        let f = gapless_frequency(model, params, k)?;
        let x = k * k;
        num += x * (f * f);
        den += x * x;
    }
    if den == 0.0 {
        return Err(Error::DegenerateFit("empty slope window".into()));
    }
    Ok(num / den)
}

/// Fit the initial slope of f² and compare with the model's prediction.
pub fn initial_slope(model: ModelTag, params: &ModelParams) -> Result<SlopeReport> {
    params.validate()?;
    let k_hi = slope_window(params);
    let fitted_slope = fit_slope_through_origin(model, params, k_hi)?;
    let predicted_slope = match model {
        ModelTag::Dirac | ModelTag::Naive => 1.0,
        ModelTag::Lgt => 1.0 + params.epsilon * params.mass * params.wilson_r,
        ModelTag::Dqw(_) => {
            1.0 - 0.5 * params.wilson_r * params.wilson_r * params.epsilon.powf(2.0 * params.rho)
        }
    };
    let relative_error = (fitted_slope - predicted_slope).abs() / predicted_slope.abs();
    Ok(SlopeReport {
        model,
        params: *params,
        fitted_slope,
        predicted_slope,
        fit_window: (0.0, k_hi),
        relative_error,
    })
}

/// Max residual of the LGT small-k expansion through quartic order.
///
/// Compares f² against the exact polynomial through k⁴,
/// `(1 + amr)k² + (¼a²r² - a²/3 - a³mr/12)k⁴`, so the remainder is O(k⁶);
/// the a² part of the quartic coefficient is the usual truncated expansion,
/// and the a³ cross term must be kept for the O(k⁶) scaling to hold at
/// nonzero mass.
pub fn lgt_quartic_residual(params: &ModelParams, k_max: f64) -> Result<f64> {
    params.validate()?;
    let a = params.epsilon;
    let edge = params.bz_edge();
    if k_max.is_nan() || k_max <= 0.0 || k_max > 0.2 * edge {
        return Err(Error::InvalidParams(format!(
            "k_max must satisfy 0 < k_max <= 0.2·π/a, got {k_max} (edge {edge})"
        )));
    }
    let m = params.mass;
    let r = params.wilson_r;
    let c2 = 1.0 + a * m * r;
    let c4 = 0.25 * a * a * r * r - a * a / 3.0 - a * a * a * m * r / 12.0;
    let n = 200;
    let mut worst = 0.0_f64;
    for i in 1..=n {
        let k = k_max * i as f64 / n as f64;
        let f = gapless_frequency(ModelTag::Lgt, params, k)?;
        let poly = c2 * k * k + c4 * k.powi(4);
        worst = worst.max((f * f - poly).abs());
    }
    Ok(worst)
}

/// One row of a convergence study.
#[derive(Debug, Clone)]
pub struct ConvergenceRow {
    pub epsilon: f64,
    pub fitted_slope: f64,
    pub predicted_slope: f64,
    /// |1 - fitted|, the error against the continuum (Dirac) slope.
    pub error_vs_continuum: f64,
    /// |fitted - predicted| / predicted.
    pub relative_error: f64,
    /// |slope(λ=0) - slope(λ=2)| — the crossed-term cancellation — for the
    /// walk; absent for other models.
    pub lambda_gap: Option<f64>,
}

/// Slope-convergence study across an ε sweep.
#[derive(Debug, Clone)]
pub struct ConvergenceStudy {
    pub model: ModelTag,
    pub rows: Vec<ConvergenceRow>,
    /// Least-squares order of |1 - fitted| against ε on log-log axes.
    pub fitted_order: f64,
    /// True when the continuum error decreases strictly along the sweep.
    pub monotone: bool,
}

/// Fit slopes across decreasing ε and measure the convergence order.
///
/// The expected orders are 2ρ for the walk and 1 for LGT. A non-monotone
/// error sequence is reported through the `monotone` flag rather than
/// silently accepted.
pub fn convergence_study(
    model: ModelTag,
    base_params: &ModelParams,
    epsilons: &[f64],
) -> Result<ConvergenceStudy> {
    if epsilons.len() < 3 {
        return Err(Error::InvalidParams(format!(
            "need at least 3 epsilon values, got {}",
            epsilons.len()
        )));
    }
    if !epsilons.windows(2).all(|w| w[1] < w[0]) {
        return Err(Error::InvalidParams(
            "epsilon sweep must be strictly decreasing".into(),
        ));
    }

    let mut rows = Vec::with_capacity(epsilons.len());
    for &eps in epsilons {
        let params = ModelParams {
            epsilon: eps,
            ..*base_params
        };
        let report = initial_slope(model, &params)?;
        let lambda_gap = match model {
            ModelTag::Dqw(_) => {
                let s0 = initial_slope(ModelTag::Dqw(Lambda::Zero), &params)?.fitted_slope;
                let s2 = initial_slope(ModelTag::Dqw(Lambda::Two), &params)?.fitted_slope;
                Some((s0 - s2).abs())
            }
            _ => None,
        };
        rows.push(ConvergenceRow {
            epsilon: eps,
            fitted_slope: report.fitted_slope,
            predicted_slope: report.predicted_slope,
            error_vs_continuum: (1.0 - report.fitted_slope).abs(),
            relative_error: report.relative_error,
            lambda_gap,
        });
    }

    let xs: Vec<f64> = rows.iter().map(|r| r.epsilon.ln()).collect();
    let ys: Vec<f64> = rows
        .iter()
        .map(|r| {
            if r.error_vs_continuum > 0.0 {
                Ok(r.error_vs_continuum.ln())
            } else {
                Err(Error::DegenerateFit(
                    "zero continuum error in convergence fit".into(),
                ))
            }
        })
        .collect::<Result<_>>()?;
    let n = xs.len() as f64;
    let mx = xs.iter().sum::<f64>() / n;
    let my = ys.iter().sum::<f64>() / n;
    let sxx: f64 = xs.iter().map(|x| (x - mx) * (x - mx)).sum();
    let sxy: f64 = xs
        .iter()
        .zip(ys.iter())
        .map(|(x, y)| (x - mx) * (y - my))
        .sum();
    if sxx == 0.0 {
        return Err(Error::DegenerateFit("epsilon values coincide".into()));
    }
    let fitted_order = sxy / sxx;
    let monotone = rows
        .windows(2)
        .all(|w| w[1].error_vs_continuum < w[0].error_vs_continuum);

    Ok(ConvergenceStudy {
        model,
        rows,
        fitted_order,
        monotone,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    fn figure_params() -> ModelParams {
        ModelParams::wilson(0.1, 1.0, 1.0, 0.6, Lambda::Zero)
    }

    #[test]
    fn dqw_f_vanishing_transport_at_zero() {
        let p = figure_params();
        let f0 = squared_dispersion(ModelTag::Dqw(Lambda::Zero), &p, 0.0).unwrap();
        let norms = Normalizations::compute(&p).unwrap();
        assert_eq!(f0, (norms.mu * p.mass) * (norms.mu * p.mass));
    }

    #[test]
    fn lgt_edge_frozen_values() {
        let p = figure_params();
        let edge = p.bz_edge();
        let f = squared_dispersion(ModelTag::Lgt, &p, edge).unwrap();
        assert!((f - 441.0).abs() <= 1e-9);
        let g = gapless_frequency(ModelTag::Lgt, &p, edge).unwrap();
        assert!((g - 440.0_f64.sqrt()).abs() <= 1e-9);
        assert!((g - 20.97617696340303).abs() <= 1e-9);
    }

    #[test]
    fn dqw_edge_frozen_values() {
        let p = figure_params();
        let edge = p.bz_edge();
        let f = squared_dispersion(ModelTag::Dqw(Lambda::Zero), &p, edge).unwrap();
        assert!((f - 31.126126001367833).abs() <= 1e-9, "{f}");
        let g = gapless_frequency(ModelTag::Dqw(Lambda::Zero), &p, edge).unwrap();
        assert!((g - 5.48962903951322).abs() <= 1e-9, "{g}");
    }

    #[test]
    fn lambda_two_has_no_crossed_term() {
        // dF/dm at the zone edge as m → 0: the λ = 0 square carries the
        // mass-Wilson cross term, the λ = 2 square does not.
        let edge = std::f64::consts::PI / 0.1;
        let dm = 1e-6;
        let df_dm = |lambda: Lambda| {
            let at = |m: f64| {
                let p = ModelParams::wilson(0.1, m, 1.0, 0.6, lambda);
                squared_dispersion(ModelTag::Dqw(lambda), &p, edge).unwrap()
            };
            (at(dm) - at(0.0)) / dm
        };
        assert!(df_dm(Lambda::Two).abs() <= 1e-5, "{}", df_dm(Lambda::Two));
        assert!(df_dm(Lambda::Zero).abs() > 1.0, "{}", df_dm(Lambda::Zero));
    }

    #[test]
    fn central_gap_values() {
        let p = ModelParams::wilson(0.1, 4.0, 1.0, 0.6, Lambda::Zero);
        assert_eq!(central_gap(ModelTag::Dirac, &p).unwrap(), 16.0);
        let p1 = figure_params();
        let gap = central_gap(ModelTag::Dqw(Lambda::Zero), &p1).unwrap();
        assert!((gap - 1.0 / 1.01).abs() <= 1e-14);
        let p0 = ModelParams::wilson(0.1, 0.0, 1.0, 0.6, Lambda::Zero);
        for model in [
            ModelTag::Dirac,
            ModelTag::Naive,
            ModelTag::Lgt,
            ModelTag::Dqw(Lambda::Zero),
        ] {
            assert_eq!(central_gap(model, &p0).unwrap(), 0.0);
        }
    }

    #[test]
    fn central_gap_equals_f_at_zero_bitwise() {
        let p = figure_params();
        for model in [
            ModelTag::Dirac,
            ModelTag::Naive,
            ModelTag::Lgt,
            ModelTag::Dqw(Lambda::Zero),
            ModelTag::Dqw(Lambda::Two),
        ] {
            let gap = central_gap(model, &p).unwrap();
            let f0 = squared_dispersion(model, &p, 0.0).unwrap();
            assert_eq!(gap, f0, "{model}");
        }
    }

    #[test]
    fn out_of_zone_rejected_for_lattice_models() {
        let p = figure_params();
        let k = 1.5 * p.bz_edge();
        assert!(squared_dispersion(ModelTag::Naive, &p, k).is_err());
        assert!(squared_dispersion(ModelTag::Lgt, &p, k).is_err());
        assert!(squared_dispersion(ModelTag::Dqw(Lambda::Zero), &p, k).is_err());
        // The continuum model has no zone.
        assert!(squared_dispersion(ModelTag::Dirac, &p, k).is_ok());
    }

    #[test]
    fn frequencies_at_rest_massless() {
        let p = ModelParams::wilson(0.1, 0.0, 1.0, 0.6, Lambda::Zero);
        let (wp, wm) = frequency_solutions(ModelTag::Dqw(Lambda::Zero), &p, 0.0).unwrap();
        assert_eq!((wp, wm), (0.0, -0.0));
    }

    #[test]
    fn dqw_frequency_at_rest_frozen_value() {
        let (wp, _) =
            frequency_solutions(ModelTag::Dqw(Lambda::Zero), &figure_params(), 0.0).unwrap();
        assert!((wp - 0.9966865249116204).abs() <= 1e-12, "{wp}");
        // √F(0) = μm differs at O(ε²).
        let sqrt_f = (1.0_f64 / 1.01).sqrt();
        assert!((wp - sqrt_f).abs() < 3e-3);
        assert!(wp > sqrt_f);
    }

    #[test]
    fn naive_scheme_loses_real_frequencies_at_large_mass() {
        let p = ModelParams::wilson(1.0, 2.0, 1.0, 0.6, Lambda::Zero);
        assert!(matches!(
            frequency_solutions(ModelTag::Naive, &p, 0.0),
            Err(Error::NoRealFrequency { .. })
        ));
    }

    #[test]
    fn continuous_time_models_not_accepted() {
        let p = figure_params();
        assert!(frequency_solutions(ModelTag::Lgt, &p, 0.0).is_err());
        assert!(frequency_solutions(ModelTag::Dirac, &p, 0.0).is_err());
    }

    #[test]
    fn frequency_round_trip() {
        let p = figure_params();
        for k in brillouin_grid(&p, 101) {
            let (wp, _) = frequency_solutions(ModelTag::Dqw(Lambda::Zero), &p, k).unwrap();
            let lhs = (wp * p.epsilon).sin().powi(2) / (p.epsilon * p.epsilon);
            let f = squared_dispersion(ModelTag::Dqw(Lambda::Zero), &p, k).unwrap();
            assert!((lhs - f).abs() <= 1e-12, "k = {k}");
        }
    }

    #[test]
    fn temporal_doublers_massless_at_rest() {
        let p = ModelParams::wilson(0.1, 0.0, 1.0, 0.6, Lambda::Zero);
        let td = temporal_doubler_frequencies(&p, 0.0).unwrap();
        assert_eq!(td.omega.0, 0.0);
        assert!((td.capital_omega.0 - std::f64::consts::PI / 0.1).abs() <= 1e-12);
        assert!((td.capital_omega.1 + std::f64::consts::PI / 0.1).abs() <= 1e-12);
    }

    #[test]
    fn temporal_doublers_frozen_values() {
        let td = temporal_doubler_frequencies(&figure_params(), 0.0).unwrap();
        assert!(
            (td.omega.0 - 1.0016742116155979).abs() <= 1e-12,
            "{}",
            td.omega.0
        );
        assert!((td.capital_omega.0 - 30.414252324282334).abs() <= 1e-12);
    }

    #[test]
    fn temporal_doublers_vanish_at_half_zone() {
        let p = figure_params();
        let k = p.bz_edge() / 2.0;
        assert!(matches!(
            temporal_doubler_frequencies(&p, k),
            Err(Error::NoRealFrequency { .. })
        ));
    }

    #[test]
    fn temporal_doublers_satisfy_defining_relation() {
        let p = figure_params();
        for k in brillouin_grid(&p, 101) {
            let em2 = (p.epsilon * p.mass).powi(2);
            let c2 = (k * p.epsilon).cos().powi(2);
            match temporal_doubler_frequencies(&p, k) {
                Ok(td) => {
                    assert!(em2 <= c2);
                    let lhs = (td.omega.0 * p.epsilon).sin().powi(2);
                    let rhs = (k * p.epsilon).sin().powi(2) + em2;
                    assert!((lhs - rhs).abs() <= 1e-12);
                    // The high-frequency pair solves the same relation.
                    let lhs_high = (td.capital_omega.0 * p.epsilon).sin().powi(2);
                    assert!((lhs_high - rhs).abs() <= 1e-12);
                }
                Err(Error::NoRealFrequency { .. }) => assert!(em2 > c2),
                Err(e) => panic!("unexpected error {e}"),
            }
        }
    }

    #[test]
    fn naive_model_shows_three_zeros() {
        let report = doubling_report(ModelTag::Naive, &figure_params(), 1001).unwrap();
        assert_eq!(report.zero_count, 3);
        assert!(!report.doubling_avoided);
        let edge = figure_params().bz_edge();
        assert!((report.zeros[0] + edge).abs() <= 1e-9);
        assert!(report.zeros[1].abs() <= 1e-9);
        assert!((report.zeros[2] - edge).abs() <= 1e-9);
    }

    #[test]
    fn lgt_and_dqw_avoid_doubling_at_figure_params() {
        let p = figure_params();
        let lgt = doubling_report(ModelTag::Lgt, &p, 1001).unwrap();
        assert_eq!(lgt.zero_count, 1);
        assert!(lgt.doubling_avoided);
        assert!((lgt.edge_value - 440.0_f64.sqrt()).abs() <= 1e-9);
        assert!((lgt.raising_amplitude - 100.0).abs() <= 1e-9);

        let dqw = doubling_report(ModelTag::Dqw(Lambda::Zero), &p, 1001).unwrap();
        assert_eq!(dqw.zero_count, 1);
        assert!(dqw.doubling_avoided);
        assert!(dqw.warnings.is_empty());
    }

    #[test]
    fn dirac_has_single_zero() {
        let report = doubling_report(ModelTag::Dirac, &figure_params(), 1001).unwrap();
        assert_eq!(report.zero_count, 1);
        assert!(report.doubling_avoided);
        assert_eq!(report.raising_amplitude, 0.0);
    }

    #[test]
    fn raising_amplitude_decays_only_beyond_rho_one() {
        let sweep = [0.1, 0.01, 0.001];
        let amp = |rho: f64, eps: f64| {
            let p = ModelParams::wilson(eps, 1.0, 1.0, rho, Lambda::Zero);
            doubling_report(ModelTag::Dqw(Lambda::Zero), &p, 101)
                .unwrap()
                .raising_amplitude
        };
        let good: Vec<f64> = sweep.iter().map(|&e| amp(0.6, e)).collect();
        assert!(good.windows(2).all(|w| w[1] > w[0]));
        assert!(good.iter().all(|&a| a >= good[0]));

        let bad: Vec<f64> = sweep.iter().map(|&e| amp(1.2, e)).collect();
        assert!(bad.windows(2).all(|w| w[1] < w[0]));
        let p = ModelParams::wilson(0.1, 1.0, 1.0, 1.2, Lambda::Zero);
        let report = doubling_report(ModelTag::Dqw(Lambda::Zero), &p, 101).unwrap();
        assert!(report
            .warnings
            .iter()
            .any(|w| w.contains("doubling criterion violated")));
    }

    #[test]
    fn doubling_grid_preconditions() {
        let p = figure_params();
        assert!(doubling_report(ModelTag::Naive, &p, 100).is_err());
        assert!(doubling_report(ModelTag::Naive, &p, 99).is_err());
    }

    #[test]
    fn dirac_slope_is_exactly_one() {
        let report = initial_slope(ModelTag::Dirac, &figure_params()).unwrap();
        assert_eq!(report.fitted_slope, 1.0);
        assert_eq!(report.predicted_slope, 1.0);
    }

    #[test]
    fn dqw_predicted_slope_frozen_value() {
        let report = initial_slope(ModelTag::Dqw(Lambda::Zero), &figure_params()).unwrap();
        assert!((report.predicted_slope - 0.9684521327759903).abs() <= 1e-14);
        assert!(report.relative_error < 0.07);
    }

    #[test]
    fn lgt_predicted_slope_from_formula() {
        let p = ModelParams::wilson(1.0, 0.1, 1.0, 0.6, Lambda::Zero);
        let report = initial_slope(ModelTag::Lgt, &p).unwrap();
        assert!((report.predicted_slope - 1.1).abs() <= 1e-14);
        // Coarse lattice: the window caps at a tenth of the zone.
        assert!(report.fit_window.1 <= 0.1 * p.bz_edge() + 1e-15);
        assert!(report.relative_error < 0.01);
    }

    #[test]
    fn fit_window_stays_inside_zone_fraction() {
        for eps in [1.0, 0.1, 0.01, 0.003] {
            let p = ModelParams::wilson(eps, 1.0, 1.0, 0.6, Lambda::Zero);
            let report = initial_slope(ModelTag::Lgt, &p).unwrap();
            assert!(report.fit_window.1 <= 0.1 * p.bz_edge() + 1e-15);
        }
    }

    #[test]
    fn quartic_check_free_case_matches_sine_expansion() {
        // r = 0, m = 0: the polynomial reduces to k² - a²k⁴/3 and the
        // residual is the k⁶ tail of sin², (2/45)a⁴k⁶.
        let p = ModelParams::wilson(1.0, 0.0, 0.0, 0.6, Lambda::Zero);
        let k_max = 0.1;
        let residual = lgt_quartic_residual(&p, k_max).unwrap();
        let expected = 2.0 / 45.0 * k_max.powi(6);
        assert!(
            (residual - expected).abs() <= 0.01 * expected,
            "{residual} vs {expected}"
        );
    }

    #[test]
    fn quartic_residual_scales_as_k6() {
        let p = ModelParams::wilson(1.0, 0.1, 1.0, 0.6, Lambda::Zero);
        let r1 = lgt_quartic_residual(&p, 0.1).unwrap();
        let r2 = lgt_quartic_residual(&p, 0.05).unwrap();
        let ratio = r1 / r2;
        assert!((48.0..=80.0).contains(&ratio), "ratio {ratio}");
    }

    #[test]
    fn quartic_residual_shrinks_with_spacing() {
        let coarse =
            lgt_quartic_residual(&ModelParams::wilson(1.0, 0.1, 1.0, 0.6, Lambda::Zero), 0.1)
                .unwrap();
        let fine =
            lgt_quartic_residual(&ModelParams::wilson(0.1, 0.1, 1.0, 0.6, Lambda::Zero), 0.1)
                .unwrap();
        assert!(fine < coarse * 1e-2);
    }

    #[test]
    fn convergence_orders_match_predictions() {
        let sweep = [0.1, 0.03, 0.01];
        let dqw = convergence_study(ModelTag::Dqw(Lambda::Zero), &figure_params(), &sweep).unwrap();
        assert!(dqw.monotone);
        assert!(
            (1.0..=1.4).contains(&dqw.fitted_order),
            "{}",
            dqw.fitted_order
        );

        let lgt = convergence_study(ModelTag::Lgt, &figure_params(), &sweep).unwrap();
        assert!(lgt.monotone);
        assert!(
            (0.9..=1.1).contains(&lgt.fitted_order),
            "{}",
            lgt.fitted_order
        );
    }

    #[test]
    fn rho_above_half_beats_lgt_below_half_loses() {
        let sweep = [0.1, 0.03, 0.01, 0.003];
        let err = |model: ModelTag, rho: f64| -> Vec<f64> {
            let p = ModelParams::wilson(0.1, 1.0, 1.0, rho, Lambda::Zero);
            convergence_study(model, &p, &sweep)
                .unwrap()
                .rows
                .iter()
                .map(|r| r.error_vs_continuum)
                .collect()
        };
        let fast = err(ModelTag::Dqw(Lambda::Zero), 0.6);
        let slow = err(ModelTag::Dqw(Lambda::Zero), 0.4);
        let lgt = err(ModelTag::Lgt, 0.6);
        for i in 0..sweep.len() {
            if sweep[i] <= 0.01 {
                assert!(fast[i] < lgt[i], "eps = {}", sweep[i]);
                assert!(lgt[i] < slow[i], "eps = {}", sweep[i]);
            }
        }
    }

    #[test]
    fn convergence_preconditions() {
        let p = figure_params();
        assert!(convergence_study(ModelTag::Lgt, &p, &[0.1, 0.03]).is_err());
        assert!(convergence_study(ModelTag::Lgt, &p, &[0.01, 0.03, 0.1]).is_err());
    }

    #[test]
    fn curve_rejects_even_grid() {
        assert!(DispersionCurve::compute(ModelTag::Dirac, &figure_params(), 100).is_err());
    }

    #[test]
    fn curve_csv_shape() {
        let curve =
            DispersionCurve::compute(ModelTag::Dqw(Lambda::Zero), &figure_params(), 101).unwrap();
        let csv = curve.to_csv();
        let lines: Vec<&str> = csv.lines().collect();
        assert_eq!(lines.len(), 3 + 101);
        assert_eq!(lines[0], "model,epsilon,m,r,rho,lambda");
        assert_eq!(lines[1], "dqw,0.1,1,1,0.6,0");
        assert_eq!(lines[2], "k,F,f");
        // Center row is k = 0 with f = 0.
        let mid: Vec<&str> = lines[3 + 50].split(',').collect();
        assert_eq!(mid[0], "0");
        assert_eq!(mid[2], "0");
    }

    proptest! {
        #![proptest_config(ProptestConfig::with_cases(64))]

        /// In-built unitarity at the dispersion level: the defining relation
        /// sin²(ωε) = ε²F(k) always has real solutions for the walk.
        #[test]
        fn dqw_dispersion_never_exceeds_unitarity_bound(
            eps in 0.01_f64..1.0,
            m in 0.0_f64..2.0,
            r in -2.0_f64..2.0,
            rho in 0.1_f64..1.5,
            frac in -1.0_f64..1.0,
            lambda_two in proptest::bool::ANY,
        ) {
            let lambda = if lambda_two { Lambda::Two } else { Lambda::Zero };
            let p = ModelParams::wilson(eps, m, r, rho, lambda);
            let k = frac * p.bz_edge();
            let f = squared_dispersion(ModelTag::Dqw(lambda), &p, k).unwrap();
            prop_assert!(eps * eps * f <= 1.0 + 1e-12);
        }

        /// F is even in k for every model.
        #[test]
        fn dispersion_even_in_k(
            frac in 0.0_f64..1.0,
            m in 0.0_f64..2.0,
            r in -2.0_f64..2.0,
        ) {
            let p = ModelParams::wilson(0.1, m, r, 0.6, Lambda::Zero);
            let k = frac * p.bz_edge();
            for model in [ModelTag::Dirac, ModelTag::Naive, ModelTag::Lgt, ModelTag::Dqw(Lambda::Zero), ModelTag::Dqw(Lambda::Two)] {
                let plus = squared_dispersion(model, &p, k).unwrap();
                let minus = squared_dispersion(model, &p, -k).unwrap();
                prop_assert!((plus - minus).abs() <= 1e-12 * plus.abs().max(1.0));
            }
        }
    }
}
