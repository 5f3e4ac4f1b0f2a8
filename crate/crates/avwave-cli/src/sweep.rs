//! Parameter sweep harness: evaluates the grid (in parallel when asked to),
//! sorts rows by grid index, and writes a single long-format CSV in one shot.

use std::fmt::Write as _;
use std::path::Path;

use rayon::prelude::*;

use avwave::freq::{log_grid, transfer_sweep};
use avwave::model::Equilibrium;
use avwave::platoon::{propagate_spectrum, OscComponent, PlatoonSpec, VehicleModel};
use avwave::sim::format_sig9;
use avwave::wave::wave_speed_series;

use crate::config::{apply_parameter, ExperimentConfig, SweepSection, SweepTarget};
use crate::output::{flags_str, write_atomic};
use crate::CliError;

fn numerical(e: impl std::fmt::Display) -> CliError {
    CliError::Numerical(e.to_string())
}

/// One grid point: indices fix the output order, values fix the controller.
struct GridPoint {
    order: usize,
    value1: f64,
    value2: Option<f64>,
}

fn grid_points(sweep: &SweepSection) -> Vec<GridPoint> {
    let mut points = Vec::new();
    let mut order = 0;
    for &value1 in &sweep.values {
        if sweep.parameter2.is_some() {
            for &value2 in &sweep.values2 {
                points.push(GridPoint {
                    order,
                    value1,
                    value2: Some(value2),
                });
                order += 1;
            }
        } else {
            points.push(GridPoint {
                order,
                value1,
                value2: None,
            });
            order += 1;
        }
    }
    points
}

fn point_rows(
    cfg: &ExperimentConfig,
    sweep: &SweepSection,
    point: &GridPoint,
) -> Result<String, CliError> {
    let mut params = apply_parameter(&cfg.controller, &sweep.parameter, point.value1)?;
    if let (Some(p2), Some(v2)) = (&sweep.parameter2, point.value2) {
        params = apply_parameter(&params, p2, v2)?;
    }
    let spec = params.build()?;
    let mut s = String::new();
    let prefix = {
        let mut p = format_sig9(point.value1);
        if let Some(v2) = point.value2 {
            let _ = write!(p, ",{}", format_sig9(v2));
        }
        p
    };
    match sweep.target {
        SweepTarget::FrequencyResponse => {
            let grid = log_grid(cfg.omega_min, cfg.omega_max, cfg.omega_points);
            let rows = transfer_sweep(&spec.linearize(), &grid).map_err(numerical)?;
            for fr in rows {
                let _ = writeln!(
                    s,
                    "{prefix},{},{},{},{}",
                    format_sig9(fr.omega),
                    format_sig9(fr.magnitude),
                    format_sig9(fr.phase),
                    format_sig9(fr.response_time),
                );
            }
        }
        SweepTarget::WaveSeries => {
            let eq = Equilibrium::new(cfg.v_e_mps, cfg.v_free_mps)
                .map_err(|e| CliError::Config(e.to_string()))?;
            let platoon = PlatoonSpec::new(
                vec![VehicleModel::Controller(spec)],
                eq,
                cfg.bounds_enabled,
            )
            .map_err(|e| CliError::Config(e.to_string()))?;
            let speed_amp = cfg.input[0].speed_amplitude_mps;
            for &omega in &sweep.wave_frequencies {
                let input = vec![OscComponent::from_speed_amplitude(speed_amp, omega, 0.0)
                    .map_err(|e| CliError::Config(e.to_string()))?];
                let prop = propagate_spectrum(&platoon, &input).map_err(numerical)?;
                let period = 2.0 * std::f64::consts::PI / omega;
                let n = cfg.wave.time_points;
                let step = 2.0 * period / (n - 1) as f64;
                let grid: Vec<f64> = (0..n).map(|k| step * k as f64).collect();
                let samples =
                    wave_speed_series(&platoon, &prop, &[1], &grid).map_err(numerical)?;
                for w in samples {
                    let _ = writeln!(
                        s,
                        "{prefix},{},{},{},{},{},{}",
                        format_sig9(omega),
                        format_sig9(w.emission_time),
                        format_sig9(w.travel_time),
                        format_sig9(w.shifted_distance),
                        format_sig9(w.speed),
                        flags_str(&w),
                    );
                }
            }
        }
    }
    Ok(s)
}

/// Runs the sweep and writes `sweep.csv`. Grid points evaluate concurrently;
/// rows are emitted in grid order regardless of scheduling, so the output
/// bytes are identical for any worker count.
pub fn run_sweep(
    cfg: &ExperimentConfig,
    out: &Path,
    workers: Option<usize>,
) -> Result<(), CliError> {
    let sweep = cfg
        .sweep
        .as_ref()
        .ok_or_else(|| CliError::Config("sweep requires a [sweep] section".into()))?;

    let mut header = sweep.parameter.clone();
    if let Some(p2) = &sweep.parameter2 {
        header.push(',');
        header.push_str(p2);
    }
    match sweep.target {
        SweepTarget::FrequencyResponse => {
            header.push_str(",omega,magnitude,phase,response_time\n");
        }
        SweepTarget::WaveSeries => {
            header.push_str(",omega,emission_time,travel_time,shifted_distance,speed,flags\n");
        }
    }

    let points = grid_points(sweep);
    let compute = || {
        points
            .par_iter()
            .map(|point| point_rows(cfg, sweep, point).map(|rows| (point.order, rows)))
            .collect::<Result<Vec<_>, CliError>>()
    };
    let mut chunks = match workers {
        Some(n) => rayon::ThreadPoolBuilder::new()
            .num_threads(n)
            .build()
            .map_err(|e| CliError::Config(format!("workers: {e}")))?
            .install(compute),
        None => compute(),
    }?;
    chunks.sort_by_key(|(order, _)| *order);

    let mut csv = header;
    for (_, rows) in chunks {
        csv.push_str(&rows);
    }
    crate::run::ensure_out_dir(out)?;
    write_atomic(&out.join("sweep.csv"), &csv)
}
