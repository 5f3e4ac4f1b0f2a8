//! Executes a parsed configuration: each emitter produces one CSV artifact,
//! `run_all` produces the full set plus the config echo.

use std::fs;
use std::path::Path;

use avwave::dfa::{classify_boundary_case, describing_transfer, SpeedBounds};
use avwave::freq::{log_grid, transfer_sweep};
use avwave::platoon::{propagate_spectrum, PropagatedSpectra};
use avwave::sim::simulate_platoon;
use avwave::wave::wave_speed_series;

use crate::config::ExperimentConfig;
use crate::output;
use crate::CliError;

fn numerical(e: impl std::fmt::Display) -> CliError {
    CliError::Numerical(e.to_string())
}

pub fn ensure_out_dir(out: &Path) -> Result<(), CliError> {
    fs::create_dir_all(out).map_err(|e| CliError::Io(format!("{}: {e}", out.display())))
}

pub fn emit_config_echo(cfg: &ExperimentConfig, out: &Path) -> Result<(), CliError> {
    output::write_atomic(&out.join("config.cfg"), &cfg.serialize())
}

pub fn emit_freq_response(cfg: &ExperimentConfig, out: &Path) -> Result<(), CliError> {
    let gains = cfg.controller.build()?.linearize();
    let grid = log_grid(cfg.omega_min, cfg.omega_max, cfg.omega_points);
    let rows = transfer_sweep(&gains, &grid).map_err(numerical)?;
    output::write_atomic(&out.join("freq_response.csv"), &output::freq_response_csv(&rows))
}

fn propagate(cfg: &ExperimentConfig) -> Result<PropagatedSpectra<f64>, CliError> {
    let platoon = cfg.platoon()?;
    let input = cfg.components()?;
    propagate_spectrum(&platoon, &input).map_err(numerical)
}

pub fn emit_spectra(cfg: &ExperimentConfig, out: &Path) -> Result<(), CliError> {
    let prop = propagate(cfg)?;
    if prop.superposition_approximation() {
        eprintln!(
            "warning: speed bounds were active while propagating several components; \
             per-component superposition is an approximation"
        );
    }
    output::write_atomic(&out.join("spectra.csv"), &output::spectra_csv(&prop))
}

pub fn emit_wave(cfg: &ExperimentConfig, out: &Path) -> Result<(), CliError> {
    let platoon = cfg.platoon()?;
    let input = cfg.components()?;
    let prop = propagate_spectrum(&platoon, &input).map_err(numerical)?;
    let pairs = cfg
        .wave_pairs
        .clone()
        .unwrap_or_else(|| (1..=platoon.n_followers()).collect());
    let grid = cfg.wave_time_grid();
    let samples = wave_speed_series(&platoon, &prop, &pairs, &grid).map_err(numerical)?;
    output::write_atomic(&out.join("wave_speed.csv"), &output::wave_csv(&samples))
}

pub fn emit_trajectory(cfg: &ExperimentConfig, out: &Path) -> Result<(), CliError> {
    let platoon = cfg.platoon()?;
    let input = cfg.components()?;
    let sim = cfg.sim_config()?;
    let traj = simulate_platoon(&platoon, &input, &sim).map_err(numerical)?;
    let mut buf = Vec::new();
    traj.write_csv(&mut buf)
        .map_err(|e| CliError::Io(e.to_string()))?;
    let text = String::from_utf8(buf).expect("csv is ascii");
    output::write_atomic(&out.join("trajectory.csv"), &text)
}

pub fn emit_dfa(cfg: &ExperimentConfig, out: &Path) -> Result<(), CliError> {
    let eq = cfg.equilibrium()?;
    let bounds = SpeedBounds::from_equilibrium(&eq);
    let v_bound = eq.v_e().min(eq.v_free() - eq.v_e());
    let gains = cfg.controller.build()?.linearize();
    let mut rows = Vec::new();
    for &ratio in &cfg.dfa_ratios {
        for comp in &cfg.input {
            let omega = comp.frequency_rad_per_s;
            let linear =
                avwave::freq::transfer_at_continued(&gains, omega).map_err(numerical)?;
            let amp = ratio * v_bound;
            let case = classify_boundary_case(&linear, amp, &bounds);
            let nl = describing_transfer(&linear, amp, &bounds).map_err(numerical)?;
            rows.push(output::DfaRow {
                amplitude_ratio: ratio,
                omega,
                input_speed_amplitude: amp,
                case,
                magnitude: nl.magnitude,
                phase: nl.phase,
                response_time: nl.response_time,
            });
        }
    }
    output::write_atomic(&out.join("dfa.csv"), &output::dfa_csv(&rows))
}

/// Full artifact set for one configuration: frequency response, propagated
/// spectra, wave series, trajectory, the describing-function table when
/// bounds are enabled, and the sweep table when a sweep is configured.
pub fn run_all(cfg: &ExperimentConfig, out: &Path, workers: Option<usize>) -> Result<(), CliError> {
    ensure_out_dir(out)?;
    emit_config_echo(cfg, out)?;
    emit_freq_response(cfg, out)?;
    emit_spectra(cfg, out)?;
    emit_wave(cfg, out)?;
    emit_trajectory(cfg, out)?;
    if cfg.bounds_enabled {
        emit_dfa(cfg, out)?;
    }
    if cfg.sweep.is_some() {
        crate::sweep::run_sweep(cfg, out, workers)?;
    }
    Ok(())
}
