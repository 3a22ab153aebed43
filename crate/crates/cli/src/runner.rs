//! Experiment dispatch and output writing.
//!
//! Every experiment writes its data files plus a `manifest.txt` listing each
//! output with the parameters it was produced from, so every emitted number
//! can be re-derived through the library API. Runs are deterministic:
//! identical configurations produce byte-identical outputs.

use std::fmt::Write as _;
use std::path::Path;

use dirac_walk::clifford::{
    gamma_operators, load_representation, pauli_representation, random_unitary, CliffordRep,
};
use dirac_walk::coins::{build_coins, check_unitarity, hamiltonian_blocks, ModelParams};
use dirac_walk::dynamics::{
    evolve_one_step, group_velocity_estimate, make_wave_packet, observables, Branch, WavePacket,
};
use dirac_walk::lattice::{build_walk_operator, LatticeState};
use dirac_walk::matrix::identity_residual;
use dirac_walk::spectral::{
    convergence_study, doubling_report, frequency_solutions, initial_slope, DispersionCurve,
    ModelTag,
};
use dirac_walk::{Error, Result};
use num_complex::Complex64;

use crate::config::{Experiment, InitialState, RepSource, RunConfig};

/// Outcome of a successful dispatch.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Outcome {
    Success,
    /// A constraint check ran to completion and found violations.
    CheckFailed,
}

struct OutputSink {
    dir: std::path::PathBuf,
    manifest: Vec<(String, String)>,
}

impl OutputSink {
    fn new(dir: &Path) -> Result<Self> {
        std::fs::create_dir_all(dir)?;
        Ok(Self {
            dir: dir.to_path_buf(),
            manifest: Vec::new(),
        })
    }

    fn write(&mut self, name: &str, contents: &str, provenance: &str) -> Result<()> {
        std::fs::write(self.dir.join(name), contents)?;
        self.manifest
            .push((name.to_string(), provenance.to_string()));
        Ok(())
    }

    fn finish(mut self, experiment: Experiment) -> Result<()> {
        let mut text = String::from("# dirac-walk output manifest\n");
        let _ = writeln!(text, "# experiment: {}", experiment.name());
        for (name, provenance) in &self.manifest {
            let _ = writeln!(text, "file={name} {provenance}");
        }
        self.manifest.clear();
        std::fs::write(self.dir.join("manifest.txt"), text)?;
        Ok(())
    }
}

fn params_provenance(params: &ModelParams) -> String {
    let variant = match params.variant {
        dirac_walk::coins::Variant::WilsonLambda => "wilson",
        dirac_walk::coins::Variant::MassiveQ0 => "massive-q0",
    };
    format!(
        "epsilon={} m={} r={} rho={} lambda={} variant={variant}",
        params.epsilon,
        params.mass,
        params.wilson_r,
        params.rho,
        params.lambda.index()
    )
}

fn build_rep(config: &RunConfig) -> Result<CliffordRep> {
    match &config.rep_source {
        RepSource::Pauli => Ok(pauli_representation()),
        RepSource::File(path) => load_representation(path),
        RepSource::RandomConjugated(seed) => {
            let pauli = pauli_representation();
            pauli.conjugate(&random_unitary(pauli.dim, *seed))
        }
    }
}

/// Dispatch the configured experiment. The caller maps the outcome and any
/// error onto the exit-code contract.
pub fn run(config: &RunConfig) -> Result<Outcome> {
    let experiment = config.experiment.ok_or_else(|| Error::Parse {
        line: 0,
        msg: "experiment missing: set `experiment = ...` in the config or use a named subcommand"
            .into(),
    })?;
    match experiment {
        Experiment::Check => run_check(config),
        Experiment::Evolve => run_evolve(config),
        Experiment::Dispersion => run_dispersion(config),
        Experiment::Doubling => run_doubling(config),
        Experiment::Slope => run_slope(config),
        Experiment::Sweep => run_sweep(config),
        Experiment::Figure1 => run_figure(config, Experiment::Figure1, config.params),
        Experiment::FigureSupplemental => {
            // Supplemental-figure parameters: a = 1, m = 0.1, r = 1.
            let params = ModelParams {
                epsilon: 1.0,
                mass: 0.1,
                wilson_r: 1.0,
                ..config.params
            };
            run_figure(config, Experiment::FigureSupplemental, params)
        }
    }
}

fn run_check(config: &RunConfig) -> Result<Outcome> {
    let rep = build_rep(config)?;
    let coins = build_coins(&rep, &config.params)?;
    let tol = config.tolerance;
    let mut lines = String::new();
    let mut all_pass = true;

    let unitarity = check_unitarity(&coins, tol);
    all_pass &= unitarity.pass;
    lines.push_str(&unitarity.to_lines());

    let blocks = hamiltonian_blocks(&coins)?;
    for (name, residual) in blocks.algebra_residuals(&coins.norms) {
        let ok = residual <= tol;
        all_pass &= ok;
        let _ = writeln!(lines, "{name} {residual:e} {ok}");
    }

    let gamma = gamma_operators(&rep, coins.norms.mu)?;
    let ok = gamma.metric_residual <= tol;
    all_pass &= ok;
    let _ = writeln!(
        lines,
        "gamma_modified_metric {:e} {ok}",
        gamma.metric_residual
    );

    let walk = build_walk_operator(&coins, 32)?;
    let dense = walk.to_dense()?;
    for (name, residual) in [
        (
            "walk_UdU_identity",
            identity_residual(&(dense.adjoint() * &dense)),
        ),
        (
            "walk_UUd_identity",
            identity_residual(&(&dense * dense.adjoint())),
        ),
    ] {
        let ok = residual <= tol;
        all_pass &= ok;
        let _ = writeln!(lines, "{name} {residual:e} {ok}");
    }

    print!("{lines}");
    for warning in config.params.warnings() {
        println!("warning: {warning}");
    }

    let mut sink = OutputSink::new(&config.out_dir)?;
    let mut report = lines;
    for warning in config.params.warnings() {
        let _ = writeln!(report, "# warning: {warning}");
    }
    sink.write("report.txt", &report, &params_provenance(&config.params))?;
    sink.finish(Experiment::Check)?;

    if all_pass {
        println!("check: all residuals within {tol:e}");
        Ok(Outcome::Success)
    } else {
        println!("check: FAILED at tolerance {tol:e}");
        Ok(Outcome::CheckFailed)
    }
}

fn run_evolve(config: &RunConfig) -> Result<Outcome> {
    let rep = build_rep(config)?;
    let coins = build_coins(&rep, &config.params)?;
    let walk = build_walk_operator(&coins, config.sites)?;
    let center_site = config.sites / 2;

    let psi0 = match config.initial {
        InitialState::Delta => {
            let mut spinor = vec![Complex64::ZERO; coins.dim()];
            spinor[0] = Complex64::new(1.0, 0.0);
            LatticeState::delta(config.sites, coins.dim(), center_site, &spinor)?
        }
        InitialState::Packet => {
            let edge = config.params.bz_edge();
            let spacing =
                2.0 * std::f64::consts::PI / (config.sites as f64 * config.params.epsilon);
            let packet = WavePacket {
                center_k: config.packet_center_k.unwrap_or(edge / 2.0),
                width: config.packet_width_momenta * spacing,
                branch: if config.branch_plus {
                    Branch::Plus
                } else {
                    Branch::Minus
                },
                center_site,
            };
            make_wave_packet(&coins, config.sites, &packet)?
        }
    };

    let trajectory = evolve_one_step(&walk, &psi0, config.steps)?;
    let last = trajectory.states.last().unwrap();
    let obs = observables(last)?;
    println!(
        "evolved {} steps on {} sites: norm {:.12}, mean position {:.4}, spread {:.4}",
        config.steps, config.sites, obs.norm, obs.mean_position, obs.std_position
    );
    if config.steps >= 10 {
        let v = group_velocity_estimate(&trajectory)?;
        println!("group velocity estimate: {v:.6} (light cone bound 1)");
    }

    let mut sink = OutputSink::new(&config.out_dir)?;
    let provenance = format!(
        "{} sites={} steps={}",
        params_provenance(&config.params),
        config.sites,
        config.steps
    );
    sink.write("trajectory.csv", &trajectory.to_csv(), &provenance)?;
    sink.finish(Experiment::Evolve)?;
    Ok(Outcome::Success)
}

fn run_dispersion(config: &RunConfig) -> Result<Outcome> {
    let curve = DispersionCurve::compute(config.model, &config.params, config.grid_points)?;

    if config.require_frequencies {
        match config.model {
            ModelTag::Naive | ModelTag::Dqw(_) => {
                for &k in &curve.k_grid {
                    frequency_solutions(config.model, &config.params, k)?;
                }
                println!("frequency relation solvable across the whole zone");
            }
            _ => {
                return Err(Error::InvalidParams(
                    "require_frequencies applies to the discrete-time models (naive, dqw)".into(),
                ))
            }
        }
    }

    let name = format!("{}.csv", config.model);
    let mut sink = OutputSink::new(&config.out_dir)?;
    let provenance = format!(
        "model={} {} grid_points={}",
        config.model,
        params_provenance(&config.params),
        config.grid_points
    );
    sink.write(&name, &curve.to_csv(), &provenance)?;
    sink.finish(Experiment::Dispersion)?;
    println!("wrote {name} ({} points)", config.grid_points);
    Ok(Outcome::Success)
}

fn run_doubling(config: &RunConfig) -> Result<Outcome> {
    let epsilons = if config.epsilons.is_empty() {
        vec![config.params.epsilon]
    } else {
        config.epsilons.clone()
    };

    let mut csv =
        String::from("model,epsilon,zero_count,edge_value,raising_amplitude,doubling_avoided\n");
    let mut warned = std::collections::BTreeSet::new();
    for &epsilon in &epsilons {
        let params = ModelParams {
            epsilon,
            ..config.params
        };
        let report = doubling_report(config.model, &params, config.grid_points)?;
        let _ = writeln!(
            csv,
            "{},{},{},{},{},{}",
            config.model,
            epsilon,
            report.zero_count,
            report.edge_value,
            report.raising_amplitude,
            report.doubling_avoided
        );
        for warning in report.warnings {
            warned.insert(warning);
        }
    }
    for warning in &warned {
        println!("warning: {warning}");
    }
    print!("{csv}");

    let mut sink = OutputSink::new(&config.out_dir)?;
    let provenance = format!(
        "model={} {} grid_points={}",
        config.model,
        params_provenance(&config.params),
        config.grid_points
    );
    sink.write("doubling.csv", &csv, &provenance)?;
    sink.finish(Experiment::Doubling)?;
    Ok(Outcome::Success)
}

fn run_slope(config: &RunConfig) -> Result<Outcome> {
    let report = initial_slope(config.model, &config.params)?;
    let mut csv = String::from(
        "model,epsilon,m,r,rho,lambda,fitted_slope,predicted_slope,relative_error,window_hi\n",
    );
    let p = &config.params;
    let _ = writeln!(
        csv,
        "{},{},{},{},{},{},{},{},{},{}",
        config.model,
        p.epsilon,
        p.mass,
        p.wilson_r,
        p.rho,
        p.lambda.index(),
        report.fitted_slope,
        report.predicted_slope,
        report.relative_error,
        report.fit_window.1
    );
    print!("{csv}");

    let mut sink = OutputSink::new(&config.out_dir)?;
    let provenance = format!("model={} {}", config.model, params_provenance(p));
    sink.write("slope.csv", &csv, &provenance)?;
    sink.finish(Experiment::Slope)?;
    Ok(Outcome::Success)
}

fn run_sweep(config: &RunConfig) -> Result<Outcome> {
    let epsilons = if config.epsilons.is_empty() {
        vec![0.1, 0.03, 0.01, 0.003]
    } else {
        config.epsilons.clone()
    };
    let models = [
        ModelTag::Dqw(dirac_walk::coins::Lambda::Zero),
        ModelTag::Dqw(dirac_walk::coins::Lambda::Two),
        ModelTag::Lgt,
    ];

    let mut csv = String::from(
        "model,lambda,epsilon,fitted_slope,predicted_slope,error_vs_continuum,relative_error,lambda_gap\n",
    );
    let mut summary = String::from("model,lambda,order,monotone\n");
    for model in models {
        let study = convergence_study(model, &config.params, &epsilons)?;
        let lambda_label = match model {
            ModelTag::Dqw(l) => l.index().to_string(),
            _ => "-".to_string(),
        };
        for row in &study.rows {
            let gap = row
                .lambda_gap
                .map(|g| g.to_string())
                .unwrap_or_else(|| "-".to_string());
            let _ = writeln!(
                csv,
                "{},{},{},{},{},{},{},{}",
                model,
                lambda_label,
                row.epsilon,
                row.fitted_slope,
                row.predicted_slope,
                row.error_vs_continuum,
                row.relative_error,
                gap
            );
        }
        let _ = writeln!(
            summary,
            "{},{},{},{}",
            model, lambda_label, study.fitted_order, study.monotone
        );
    }
    print!("{summary}");

    let mut sink = OutputSink::new(&config.out_dir)?;
    let provenance = format!(
        "{} epsilons={}",
        params_provenance(&config.params),
        epsilons
            .iter()
            .map(|e| e.to_string())
            .collect::<Vec<_>>()
            .join(",")
    );
    sink.write("convergence.csv", &csv, &provenance)?;
    sink.write("orders.csv", &summary, &provenance)?;
    sink.finish(Experiment::Sweep)?;
    Ok(Outcome::Success)
}

fn run_figure(config: &RunConfig, experiment: Experiment, params: ModelParams) -> Result<Outcome> {
    let lambda = params.lambda;
    let models = [
        ModelTag::Dirac,
        ModelTag::Naive,
        ModelTag::Lgt,
        ModelTag::Dqw(lambda),
    ];

    let mut sink = OutputSink::new(&config.out_dir)?;
    let mut curves = Vec::new();
    for model in models {
        let curve = DispersionCurve::compute(model, &params, config.grid_points)?;
        let name = format!("{model}.csv");
        let provenance = format!(
            "model={model} {} grid_points={}",
            params_provenance(&params),
            config.grid_points
        );
        sink.write(&name, &curve.to_csv(), &provenance)?;
        curves.push(curve);
    }

    let mut combined = String::from("k,dirac,naive,lgt,dqw\n");
    for i in 0..curves[0].k_grid.len() {
        let _ = writeln!(
            combined,
            "{},{},{},{},{}",
            curves[0].k_grid[i],
            curves[0].gapless[i],
            curves[1].gapless[i],
            curves[2].gapless[i],
            curves[3].gapless[i]
        );
    }
    let provenance = format!(
        "{} grid_points={}",
        params_provenance(&params),
        config.grid_points
    );
    sink.write("combined.csv", &combined, &provenance)?;
    sink.write("plot.py", PLOT_SCRIPT, &provenance)?;
    sink.finish(experiment)?;
    println!(
        "wrote dirac.csv, naive.csv, lgt.csv, dqw.csv, combined.csv to {}",
        config.out_dir.display()
    );
    Ok(Outcome::Success)
}

/// Companion plotting script for the figure experiments. The data files are
/// self-contained; this is offered for convenience and never executed here.
const PLOT_SCRIPT: &str = r#"#!/usr/bin/env python3
"""Plot the gapless-frequency curves written next to this script."""
import csv
import sys
from pathlib import Path

import matplotlib.pyplot as plt

here = Path(sys.argv[1]) if len(sys.argv) > 1 else Path(__file__).parent
rows = list(csv.DictReader((here / "combined.csv").open()))
k = [float(r["k"]) for r in rows]
colors = {"dirac": "tab:blue", "naive": "goldenrod", "lgt": "tab:green", "dqw": "tab:red"}
for model, color in colors.items():
    plt.plot(k, [float(r[model]) for r in rows], color=color, label=model)
plt.xlabel("k")
plt.ylabel("f(k)")
plt.legend()
plt.tight_layout()
plt.savefig(here / "gapless_frequencies.png", dpi=160)
print(f"wrote {here / 'gapless_frequencies.png'}")
"#;
