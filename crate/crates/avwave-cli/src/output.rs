//! CSV assembly and all-or-nothing file writes.

use std::fmt::Write as _;
use std::fs;
use std::path::Path;

use avwave::dfa::BoundaryCase;
use avwave::freq::FrequencyResponse;
use avwave::platoon::PropagatedSpectra;
use avwave::sim::format_sig9;
use avwave::wave::WaveSample;

use crate::CliError;

/// Writes via a temp file and rename so a failed run never leaves a partial
/// artifact behind.
pub fn write_atomic(path: &Path, contents: &str) -> Result<(), CliError> {
    let tmp = path.with_extension("tmp");
    fs::write(&tmp, contents).map_err(|e| CliError::Io(format!("{}: {e}", tmp.display())))?;
    fs::rename(&tmp, path).map_err(|e| CliError::Io(format!("{}: {e}", path.display())))?;
    Ok(())
}

pub fn freq_response_csv(rows: &[FrequencyResponse<f64>]) -> String {
    let mut s = String::from("omega,magnitude,phase,response_time\n");
    for fr in rows {
        let _ = writeln!(
            s,
            "{},{},{},{}",
            format_sig9(fr.omega),
            format_sig9(fr.magnitude),
            format_sig9(fr.phase),
            format_sig9(fr.response_time),
        );
    }
    s
}

pub fn flags_str(sample: &WaveSample<f64>) -> String {
    let mut tokens = Vec::new();
    if sample.flags.traditional {
        tokens.push("traditional".to_string());
    }
    if sample.flags.dfa_approximate {
        tokens.push("dfa-approx".to_string());
    }
    if sample.neglected_fraction > 0.0 {
        tokens.push(format!("neglected={}", format_sig9(sample.neglected_fraction)));
    }
    tokens.join("|")
}

pub fn wave_csv(samples: &[WaveSample<f64>]) -> String {
    let mut s = String::from("pair,emission_time,travel_time,shifted_distance,speed,flags\n");
    for w in samples {
        let _ = writeln!(
            s,
            "{},{},{},{},{},{}",
            w.pair,
            format_sig9(w.emission_time),
            format_sig9(w.travel_time),
            format_sig9(w.shifted_distance),
            format_sig9(w.speed),
            flags_str(w),
        );
    }
    s
}

pub fn spectra_csv(prop: &PropagatedSpectra<f64>) -> String {
    let mut s = String::from("vehicle,component,omega,amplitude,phase\n");
    for vs in prop.vehicles() {
        for (m, c) in vs.components.iter().enumerate() {
            let _ = writeln!(
                s,
                "{},{},{},{},{}",
                vs.vehicle,
                m,
                format_sig9(c.omega),
                format_sig9(c.amplitude),
                format_sig9(c.phase),
            );
        }
    }
    s
}

pub fn case_str(case: BoundaryCase) -> &'static str {
    match case {
        BoundaryCase::Inactive => "inactive",
        BoundaryCase::UpperActive => "upper-active",
        BoundaryCase::LowerActive => "lower-active",
        BoundaryCase::BothActive => "both-active",
    }
}

pub struct DfaRow {
    pub amplitude_ratio: f64,
    pub omega: f64,
    pub input_speed_amplitude: f64,
    pub case: BoundaryCase,
    pub magnitude: f64,
    pub phase: f64,
    pub response_time: f64,
}

pub fn dfa_csv(rows: &[DfaRow]) -> String {
    let mut s = String::from(
        "amplitude_ratio,omega,input_speed_amplitude,case,magnitude,phase,response_time\n",
    );
    for r in rows {
        let _ = writeln!(
            s,
            "{},{},{},{},{},{},{}",
            format_sig9(r.amplitude_ratio),
            format_sig9(r.omega),
            format_sig9(r.input_speed_amplitude),
            case_str(r.case),
            format_sig9(r.magnitude),
            format_sig9(r.phase),
            format_sig9(r.response_time),
        );
    }
    s
}
