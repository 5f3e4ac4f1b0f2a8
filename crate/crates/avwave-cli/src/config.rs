//! Flat key-value experiment configuration: `[section]` headers, `key = value`
//! lines, comma-separated lists, unit suffixes in key names. Parse errors
//! carry line numbers.

use std::collections::BTreeMap;
use std::fmt::Write as _;

use avwave::model::{ControllerSpec, Equilibrium};
use avwave::platoon::{OscComponent, PlatoonSpec, VehicleModel};
use avwave::sim::SimConfig;

use crate::CliError;

/// One parsed `key = value` with its source line (1-based).
#[derive(Debug, Clone)]
struct Entry {
    key: String,
    value: String,
    line: usize,
}

#[derive(Debug, Clone, Default)]
struct Section {
    name: String,
    line: usize,
    entries: Vec<Entry>,
}

fn config_err(line: usize, msg: impl std::fmt::Display) -> CliError {
    CliError::Config(format!("line {line}: {msg}"))
}

fn parse_sections(text: &str) -> Result<Vec<Section>, CliError> {
    let mut sections: Vec<Section> = Vec::new();
    for (idx, raw) in text.lines().enumerate() {
        let line = idx + 1;
        let content = match raw.find('#') {
            Some(pos) => &raw[..pos],
            None => raw,
        };
        let content = content.trim();
        if content.is_empty() {
            continue;
        }
        if let Some(name) = content.strip_prefix('[') {
            let Some(name) = name.strip_suffix(']') else {
                return Err(config_err(line, "unterminated section header"));
            };
            sections.push(Section {
                name: name.trim().to_string(),
                line,
                entries: Vec::new(),
            });
            continue;
        }
        let Some((key, value)) = content.split_once('=') else {
            return Err(config_err(line, "expected `key = value` or `[section]`"));
        };
        let Some(section) = sections.last_mut() else {
            return Err(config_err(line, "key outside of any [section]"));
        };
        let key = key.trim().to_string();
        if section.entries.iter().any(|e| e.key == key) {
            return Err(config_err(line, format!("duplicate key `{key}`")));
        }
        section.entries.push(Entry {
            key,
            value: value.trim().to_string(),
            line,
        });
    }
    Ok(sections)
}

/// Typed view over one section; tracks which keys were consumed so unknown
/// keys can be reported with their line.
struct SectionReader<'a> {
    section: &'a Section,
    used: Vec<bool>,
}

impl<'a> SectionReader<'a> {
    fn new(section: &'a Section) -> Self {
        Self {
            used: vec![false; section.entries.len()],
            section,
        }
    }

    fn raw(&mut self, key: &str) -> Option<(&'a str, usize)> {
        for (i, e) in self.section.entries.iter().enumerate() {
            if e.key == key {
                self.used[i] = true;
                return Some((&e.value, e.line));
            }
        }
        None
    }

    fn f64(&mut self, key: &str) -> Result<Option<f64>, CliError> {
        match self.raw(key) {
            None => Ok(None),
            Some((v, line)) => v
                .parse::<f64>()
                .map(Some)
                .map_err(|_| config_err(line, format!("`{key}`: invalid number `{v}`"))),
        }
    }

    fn usize(&mut self, key: &str) -> Result<Option<usize>, CliError> {
        match self.raw(key) {
            None => Ok(None),
            Some((v, line)) => v
                .parse::<usize>()
                .map(Some)
                .map_err(|_| config_err(line, format!("`{key}`: invalid integer `{v}`"))),
        }
    }

    fn u32(&mut self, key: &str) -> Result<Option<u32>, CliError> {
        match self.raw(key) {
            None => Ok(None),
            Some((v, line)) => v
                .parse::<u32>()
                .map(Some)
                .map_err(|_| config_err(line, format!("`{key}`: invalid integer `{v}`"))),
        }
    }

    fn bool(&mut self, key: &str) -> Result<Option<bool>, CliError> {
        match self.raw(key) {
            None => Ok(None),
            Some(("true", _)) => Ok(Some(true)),
            Some(("false", _)) => Ok(Some(false)),
            Some((v, line)) => Err(config_err(
                line,
                format!("`{key}`: expected true/false, got `{v}`"),
            )),
        }
    }

    fn f64_list(&mut self, key: &str) -> Result<Option<Vec<f64>>, CliError> {
        match self.raw(key) {
            None => Ok(None),
            Some((v, line)) => v
                .split(',')
                .map(|item| {
                    item.trim().parse::<f64>().map_err(|_| {
                        config_err(line, format!("`{key}`: invalid number `{}`", item.trim()))
                    })
                })
                .collect::<Result<Vec<_>, _>>()
                .map(Some),
        }
    }

    fn usize_list(&mut self, key: &str) -> Result<Option<Vec<usize>>, CliError> {
        match self.raw(key) {
            None => Ok(None),
            Some((v, line)) => v
                .split(',')
                .map(|item| {
                    item.trim().parse::<usize>().map_err(|_| {
                        config_err(line, format!("`{key}`: invalid integer `{}`", item.trim()))
                    })
                })
                .collect::<Result<Vec<_>, _>>()
                .map(Some),
        }
    }

    fn string(&mut self, key: &str) -> Option<String> {
        self.raw(key).map(|(v, _)| v.to_string())
    }

    fn finish(self) -> Result<(), CliError> {
        for (i, e) in self.section.entries.iter().enumerate() {
            if !self.used[i] {
                return Err(config_err(
                    e.line,
                    format!("unknown key `{}` in [{}]", e.key, self.section.name),
                ));
            }
        }
        Ok(())
    }
}

/// Controller parameter bundle prior to validation.
#[derive(Debug, Clone, Copy)]
pub struct ControllerParams {
    pub k_s: f64,
    pub k_v: f64,
    pub tau_s: f64,
    pub phi_s: f64,
    pub s_0_m: f64,
}

impl Default for ControllerParams {
    fn default() -> Self {
        Self {
            k_s: 1.0,
            k_v: 1.0,
            tau_s: 1.2,
            phi_s: 0.1,
            s_0_m: 2.0,
        }
    }
}

impl ControllerParams {
    pub fn build(&self) -> Result<ControllerSpec<f64>, CliError> {
        ControllerSpec::new(self.k_s, self.k_v, self.tau_s, self.phi_s, self.s_0_m)
            .map_err(|e| CliError::Config(format!("controller: {e}")))
    }
}

/// Per-vehicle override: adjusted controller or a shift model.
#[derive(Debug, Clone, Copy)]
pub enum VehicleOverride {
    Controller(ControllerParams),
    Newell { displacement_s: f64, s_0_m: f64 },
}

#[derive(Debug, Clone, PartialEq, Eq, Copy)]
pub enum SweepTarget {
    FrequencyResponse,
    WaveSeries,
}

#[derive(Debug, Clone)]
pub struct SweepSection {
    pub parameter: String,
    pub values: Vec<f64>,
    pub parameter2: Option<String>,
    pub values2: Vec<f64>,
    pub target: SweepTarget,
    pub wave_frequencies: Vec<f64>,
}

#[derive(Debug, Clone, Copy)]
pub struct WaveSection {
    pub t_start_s: f64,
    pub t_end_s: Option<f64>,
    pub time_points: usize,
}

#[derive(Debug, Clone)]
pub struct InputComponentSpec {
    pub speed_amplitude_mps: f64,
    pub frequency_rad_per_s: f64,
    pub phase_rad: f64,
}

/// Fully parsed experiment configuration.
#[derive(Debug, Clone)]
pub struct ExperimentConfig {
    pub controller: ControllerParams,
    pub overrides: BTreeMap<usize, VehicleOverride>,
    pub v_e_mps: f64,
    pub v_free_mps: f64,
    pub n_vehicles: usize,
    pub bounds_enabled: bool,
    pub input: Vec<InputComponentSpec>,
    pub omega_min: f64,
    pub omega_max: f64,
    pub omega_points: usize,
    pub dt_s: f64,
    pub warmup_periods: u32,
    pub measure_periods: u32,
    pub wave: WaveSection,
    pub wave_pairs: Option<Vec<usize>>,
    pub dfa_ratios: Vec<f64>,
    pub sweep: Option<SweepSection>,
}

impl Default for ExperimentConfig {
    fn default() -> Self {
        Self {
            controller: ControllerParams::default(),
            overrides: BTreeMap::new(),
            v_e_mps: 15.0,
            v_free_mps: 30.0,
            n_vehicles: 1,
            bounds_enabled: false,
            input: vec![InputComponentSpec {
                speed_amplitude_mps: 15.0,
                frequency_rad_per_s: 0.16 * std::f64::consts::PI,
                phase_rad: 0.0,
            }],
            omega_min: 1e-3,
            omega_max: 1e2,
            omega_points: 2000,
            dt_s: 0.005,
            warmup_periods: 10,
            measure_periods: 4,
            wave: WaveSection {
                t_start_s: 0.0,
                t_end_s: None,
                time_points: 201,
            },
            wave_pairs: None,
            dfa_ratios: vec![0.8, 0.9, 1.0],
            sweep: None,
        }
    }
}

impl ExperimentConfig {
    pub fn parse(text: &str) -> Result<Self, CliError> {
        let sections = parse_sections(text)?;
        let mut cfg = ExperimentConfig::default();
        for section in &sections {
            let mut r = SectionReader::new(section);
            match section.name.as_str() {
                "controller" => {
                    read_controller(&mut r, &mut cfg.controller)?;
                }
                "equilibrium" => {
                    if let Some(v) = r.f64("v_e_mps")? {
                        cfg.v_e_mps = v;
                    }
                    if let Some(v) = r.f64("v_free_mps")? {
                        cfg.v_free_mps = v;
                    }
                }
                "platoon" => {
                    if let Some(v) = r.usize("n_vehicles")? {
                        cfg.n_vehicles = v;
                    }
                    if let Some(v) = r.bool("bounds_enabled")? {
                        cfg.bounds_enabled = v;
                    }
                }
                "input" => {
                    let amps = r
                        .f64_list("speed_amplitudes_mps")?
                        .ok_or_else(|| {
                            config_err(section.line, "[input] requires speed_amplitudes_mps")
                        })?;
                    let freqs = r
                        .f64_list("frequencies_rad_per_s")?
                        .ok_or_else(|| {
                            config_err(section.line, "[input] requires frequencies_rad_per_s")
                        })?;
                    let phases = r
                        .f64_list("phases_rad")?
                        .unwrap_or_else(|| vec![0.0; amps.len()]);
                    if freqs.len() != amps.len() || phases.len() != amps.len() {
                        return Err(config_err(
                            section.line,
                            "input lists must have equal lengths",
                        ));
                    }
                    cfg.input = amps
                        .iter()
                        .zip(&freqs)
                        .zip(&phases)
                        .map(|((&a, &f), &p)| InputComponentSpec {
                            speed_amplitude_mps: a,
                            frequency_rad_per_s: f,
                            phase_rad: p,
                        })
                        .collect();
                }
                "freq" => {
                    if let Some(v) = r.f64("omega_min_rad_per_s")? {
                        cfg.omega_min = v;
                    }
                    if let Some(v) = r.f64("omega_max_rad_per_s")? {
                        cfg.omega_max = v;
                    }
                    if let Some(v) = r.usize("omega_points")? {
                        cfg.omega_points = v;
                    }
                }
                "sim" => {
                    if let Some(v) = r.f64("dt_s")? {
                        cfg.dt_s = v;
                    }
                    if let Some(v) = r.u32("warmup_periods")? {
                        cfg.warmup_periods = v;
                    }
                    if let Some(v) = r.u32("measure_periods")? {
                        cfg.measure_periods = v;
                    }
                }
                "wave" => {
                    if let Some(v) = r.usize_list("pairs")? {
                        cfg.wave_pairs = Some(v);
                    }
                    if let Some(v) = r.f64("t_start_s")? {
                        cfg.wave.t_start_s = v;
                    }
                    if let Some(v) = r.f64("t_end_s")? {
                        cfg.wave.t_end_s = Some(v);
                    }
                    if let Some(v) = r.usize("time_points")? {
                        cfg.wave.time_points = v;
                    }
                }
                "dfa" => {
                    if let Some(v) = r.f64_list("amplitude_ratios")? {
                        cfg.dfa_ratios = v;
                    }
                }
                "sweep" => {
                    let parameter = r.string("parameter").ok_or_else(|| {
                        config_err(section.line, "[sweep] requires `parameter`")
                    })?;
                    let values = r.f64_list("values")?.ok_or_else(|| {
                        config_err(section.line, "[sweep] requires `values`")
                    })?;
                    let parameter2 = r.string("parameter2");
                    let values2 = r.f64_list("values2")?.unwrap_or_default();
                    let target = match r.string("target").as_deref() {
                        None | Some("frequency-response") => SweepTarget::FrequencyResponse,
                        Some("wave-series") => SweepTarget::WaveSeries,
                        Some(other) => {
                            return Err(config_err(
                                section.line,
                                format!("unknown sweep target `{other}`"),
                            ))
                        }
                    };
                    let wave_frequencies = r
                        .f64_list("wave_frequencies_rad_per_s")?
                        .unwrap_or_else(default_wave_sweep_frequencies);
                    cfg.sweep = Some(SweepSection {
                        parameter,
                        values,
                        parameter2,
                        values2,
                        target,
                        wave_frequencies,
                    });
                }
                name if name.starts_with("vehicle.") => {
                    let idx: usize = name["vehicle.".len()..].parse().map_err(|_| {
                        config_err(section.line, format!("bad vehicle index in [{name}]"))
                    })?;
                    if idx == 0 {
                        return Err(config_err(
                            section.line,
                            "vehicle indices start at 1 (0 is the leader)",
                        ));
                    }
                    let ov = read_vehicle_override(&mut r, &cfg.controller, section.line)?;
                    cfg.overrides.insert(idx, ov);
                }
                other => {
                    return Err(config_err(section.line, format!("unknown section [{other}]")));
                }
            }
            r.finish()?;
        }
        cfg.validate()?;
        Ok(cfg)
    }

    fn validate(&self) -> Result<(), CliError> {
        self.controller.build()?;
        self.equilibrium()?;
        if self.n_vehicles == 0 {
            return Err(CliError::Config("platoon: n_vehicles must be >= 1".into()));
        }
        for &idx in self.overrides.keys() {
            if idx > self.n_vehicles {
                return Err(CliError::Config(format!(
                    "vehicle.{idx} exceeds n_vehicles = {}",
                    self.n_vehicles
                )));
            }
        }
        if self.input.is_empty() {
            return Err(CliError::Config("input: at least one component".into()));
        }
        self.components()?;
        if !(self.omega_min > 0.0 && self.omega_max > self.omega_min) || self.omega_points < 2 {
            return Err(CliError::Config("freq: invalid omega grid".into()));
        }
        self.sim_config()?;
        if self.wave.time_points < 2 {
            return Err(CliError::Config("wave: time_points must be >= 2".into()));
        }
        if let Some(sweep) = &self.sweep {
            validate_sweep_parameter(&sweep.parameter)?;
            if sweep.values.is_empty() {
                return Err(CliError::Config("sweep: `values` must be nonempty".into()));
            }
            if let Some(p2) = &sweep.parameter2 {
                validate_sweep_parameter(p2)?;
                if sweep.values2.is_empty() {
                    return Err(CliError::Config(
                        "sweep: `values2` required with `parameter2`".into(),
                    ));
                }
            }
            let grid = sweep.values.len()
                * sweep.values2.len().max(1)
                * match sweep.target {
                    SweepTarget::FrequencyResponse => self.omega_points,
                    SweepTarget::WaveSeries => {
                        sweep.wave_frequencies.len() * self.wave.time_points
                    }
                };
            if grid > 1_000_000 {
                return Err(CliError::Config(format!(
                    "sweep: grid of {grid} points exceeds the 1e6 limit"
                )));
            }
        }
        Ok(())
    }

    pub fn equilibrium(&self) -> Result<Equilibrium<f64>, CliError> {
        Equilibrium::new(self.v_e_mps, self.v_free_mps)
            .map_err(|e| CliError::Config(format!("equilibrium: {e}")))
    }

    pub fn components(&self) -> Result<Vec<OscComponent<f64>>, CliError> {
        self.input
            .iter()
            .map(|c| {
                OscComponent::from_speed_amplitude(
                    c.speed_amplitude_mps,
                    c.frequency_rad_per_s,
                    c.phase_rad,
                )
                .map_err(|e| CliError::Config(format!("input: {e}")))
            })
            .collect()
    }

    pub fn sim_config(&self) -> Result<SimConfig<f64>, CliError> {
        SimConfig::new(self.dt_s, self.warmup_periods, self.measure_periods)
            .map_err(|e| CliError::Config(format!("sim: {e}")))
    }

    /// Builds the vehicle string with per-vehicle overrides applied.
    pub fn platoon(&self) -> Result<PlatoonSpec<f64>, CliError> {
        let shared = self.controller.build()?;
        let mut vehicles = Vec::with_capacity(self.n_vehicles);
        for i in 1..=self.n_vehicles {
            let model = match self.overrides.get(&i) {
                None => VehicleModel::Controller(shared),
                Some(VehicleOverride::Controller(p)) => VehicleModel::Controller(
                    p.build()
                        .map_err(|e| CliError::Config(format!("vehicle.{i}: {e}")))?,
                ),
                Some(VehicleOverride::Newell {
                    displacement_s,
                    s_0_m,
                }) => VehicleModel::Newell {
                    displacement: *displacement_s,
                    s_0: *s_0_m,
                },
            };
            vehicles.push(model);
        }
        PlatoonSpec::new(vehicles, self.equilibrium()?, self.bounds_enabled)
            .map_err(|e| CliError::Config(format!("platoon: {e}")))
    }

    /// Slowest input period; the default wave window spans two of them.
    pub fn slowest_period(&self) -> f64 {
        let omega_min = self
            .input
            .iter()
            .map(|c| c.frequency_rad_per_s)
            .fold(f64::INFINITY, f64::min);
        2.0 * std::f64::consts::PI / omega_min
    }

    pub fn wave_time_grid(&self) -> Vec<f64> {
        let t_end = self.wave.t_end_s.unwrap_or(2.0 * self.slowest_period());
        let n = self.wave.time_points;
        let step = (t_end - self.wave.t_start_s) / (n - 1) as f64;
        (0..n).map(|k| self.wave.t_start_s + step * k as f64).collect()
    }

    /// Deterministic round-trip serialization (the config echo).
    pub fn serialize(&self) -> String {
        let mut s = String::new();
        let _ = writeln!(s, "[controller]");
        write_controller(&mut s, &self.controller);
        for (idx, ov) in &self.overrides {
            let _ = writeln!(s, "\n[vehicle.{idx}]");
            match ov {
                VehicleOverride::Controller(p) => {
                    let _ = writeln!(s, "model = controller");
                    write_controller(&mut s, p);
                }
                VehicleOverride::Newell {
                    displacement_s,
                    s_0_m,
                } => {
                    let _ = writeln!(s, "model = newell");
                    let _ = writeln!(s, "displacement_s = {displacement_s}");
                    let _ = writeln!(s, "s_0_m = {s_0_m}");
                }
            }
        }
        let _ = writeln!(s, "\n[equilibrium]");
        let _ = writeln!(s, "v_e_mps = {}", self.v_e_mps);
        let _ = writeln!(s, "v_free_mps = {}", self.v_free_mps);
        let _ = writeln!(s, "\n[platoon]");
        let _ = writeln!(s, "n_vehicles = {}", self.n_vehicles);
        let _ = writeln!(s, "bounds_enabled = {}", self.bounds_enabled);
        let _ = writeln!(s, "\n[input]");
        let _ = writeln!(
            s,
            "speed_amplitudes_mps = {}",
            join(self.input.iter().map(|c| c.speed_amplitude_mps))
        );
        let _ = writeln!(
            s,
            "frequencies_rad_per_s = {}",
            join(self.input.iter().map(|c| c.frequency_rad_per_s))
        );
        let _ = writeln!(
            s,
            "phases_rad = {}",
            join(self.input.iter().map(|c| c.phase_rad))
        );
        let _ = writeln!(s, "\n[freq]");
        let _ = writeln!(s, "omega_min_rad_per_s = {}", self.omega_min);
        let _ = writeln!(s, "omega_max_rad_per_s = {}", self.omega_max);
        let _ = writeln!(s, "omega_points = {}", self.omega_points);
        let _ = writeln!(s, "\n[sim]");
        let _ = writeln!(s, "dt_s = {}", self.dt_s);
        let _ = writeln!(s, "warmup_periods = {}", self.warmup_periods);
        let _ = writeln!(s, "measure_periods = {}", self.measure_periods);
        let _ = writeln!(s, "\n[wave]");
        if let Some(pairs) = &self.wave_pairs {
            let _ = writeln!(s, "pairs = {}", join(pairs.iter().copied()));
        }
        let _ = writeln!(s, "t_start_s = {}", self.wave.t_start_s);
        if let Some(t_end) = self.wave.t_end_s {
            let _ = writeln!(s, "t_end_s = {t_end}");
        }
        let _ = writeln!(s, "time_points = {}", self.wave.time_points);
        let _ = writeln!(s, "\n[dfa]");
        let _ = writeln!(
            s,
            "amplitude_ratios = {}",
            join(self.dfa_ratios.iter().copied())
        );
        if let Some(sweep) = &self.sweep {
            let _ = writeln!(s, "\n[sweep]");
            let _ = writeln!(s, "parameter = {}", sweep.parameter);
            let _ = writeln!(s, "values = {}", join(sweep.values.iter().copied()));
            if let Some(p2) = &sweep.parameter2 {
                let _ = writeln!(s, "parameter2 = {p2}");
                let _ = writeln!(s, "values2 = {}", join(sweep.values2.iter().copied()));
            }
            let _ = writeln!(
                s,
                "target = {}",
                match sweep.target {
                    SweepTarget::FrequencyResponse => "frequency-response",
                    SweepTarget::WaveSeries => "wave-series",
                }
            );
            let _ = writeln!(
                s,
                "wave_frequencies_rad_per_s = {}",
                join(sweep.wave_frequencies.iter().copied())
            );
        }
        s
    }
}

pub fn default_wave_sweep_frequencies() -> Vec<f64> {
    // f = 0.02, 0.05, 0.08 Hz
    vec![
        0.04 * std::f64::consts::PI,
        0.1 * std::f64::consts::PI,
        0.16 * std::f64::consts::PI,
    ]
}

fn validate_sweep_parameter(name: &str) -> Result<(), CliError> {
    match name {
        "k_s" | "k_v" | "tau_s" | "phi_s" => Ok(()),
        other => Err(CliError::Config(format!(
            "sweep: unknown parameter `{other}` (expected k_s, k_v, tau_s or phi_s)"
        ))),
    }
}

/// Applies a swept parameter value onto a controller parameter set.
pub fn apply_parameter(
    base: &ControllerParams,
    name: &str,
    value: f64,
) -> Result<ControllerParams, CliError> {
    let mut p = *base;
    match name {
        "k_s" => p.k_s = value,
        "k_v" => p.k_v = value,
        "tau_s" => p.tau_s = value,
        "phi_s" => p.phi_s = value,
        other => {
            return Err(CliError::Config(format!(
                "sweep: unknown parameter `{other}`"
            )))
        }
    }
    Ok(p)
}

fn read_controller(
    r: &mut SectionReader<'_>,
    params: &mut ControllerParams,
) -> Result<(), CliError> {
    if let Some(v) = r.f64("k_s")? {
        params.k_s = v;
    }
    if let Some(v) = r.f64("k_v")? {
        params.k_v = v;
    }
    if let Some(v) = r.f64("tau_s")? {
        params.tau_s = v;
    }
    if let Some(v) = r.f64("phi_s")? {
        params.phi_s = v;
    }
    if let Some(v) = r.f64("s_0_m")? {
        params.s_0_m = v;
    }
    Ok(())
}

fn read_vehicle_override(
    r: &mut SectionReader<'_>,
    shared: &ControllerParams,
    line: usize,
) -> Result<VehicleOverride, CliError> {
    match r.string("model").as_deref() {
        Some("newell") => {
            let displacement_s = r.f64("displacement_s")?.ok_or_else(|| {
                config_err(line, "newell vehicle requires `displacement_s`")
            })?;
            let s_0_m = r.f64("s_0_m")?.unwrap_or(shared.s_0_m);
            Ok(VehicleOverride::Newell {
                displacement_s,
                s_0_m,
            })
        }
        None | Some("controller") => {
            let mut p = *shared;
            read_controller(r, &mut p)?;
            Ok(VehicleOverride::Controller(p))
        }
        Some(other) => Err(config_err(line, format!("unknown vehicle model `{other}`"))),
    }
}

fn write_controller(s: &mut String, p: &ControllerParams) {
    let _ = writeln!(s, "k_s = {}", p.k_s);
    let _ = writeln!(s, "k_v = {}", p.k_v);
    let _ = writeln!(s, "tau_s = {}", p.tau_s);
    let _ = writeln!(s, "phi_s = {}", p.phi_s);
    let _ = writeln!(s, "s_0_m = {}", p.s_0_m);
}

fn join<T: std::fmt::Display>(items: impl Iterator<Item = T>) -> String {
    items
        .map(|v| v.to_string())
        .collect::<Vec<_>>()
        .join(",")
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn parses_minimal_config() {
        let cfg = ExperimentConfig::parse(
            "[input]\nspeed_amplitudes_mps = 15\nfrequencies_rad_per_s = 0.5\n",
        )
        .unwrap();
        assert_eq!(cfg.input.len(), 1);
        assert_eq!(cfg.n_vehicles, 1);
    }

    #[test]
    fn errors_carry_line_numbers() {
        let err = ExperimentConfig::parse("[controller]\nk_s = 1\nk_s = oops\n").unwrap_err();
        let msg = format!("{err}");
        assert!(msg.contains("line 3"), "{msg}");

        let err =
            ExperimentConfig::parse("[controller]\nk_s = 1\nbogus_key = 2\n").unwrap_err();
        assert!(format!("{err}").contains("line 3"));

        let err = ExperimentConfig::parse("key_without_section = 1\n").unwrap_err();
        assert!(format!("{err}").contains("line 1"));
    }

    #[test]
    fn round_trips_through_serialize() {
        let mut cfg = ExperimentConfig {
            n_vehicles: 5,
            bounds_enabled: true,
            v_e_mps: 10.0,
            v_free_mps: 20.0,
            ..ExperimentConfig::default()
        };
        cfg.overrides.insert(
            2,
            VehicleOverride::Newell {
                displacement_s: 1.2,
                s_0_m: 2.0,
            },
        );
        cfg.sweep = Some(SweepSection {
            parameter: "k_s".into(),
            values: vec![0.2, 0.6, 1.0, 1.4],
            parameter2: None,
            values2: vec![],
            target: SweepTarget::FrequencyResponse,
            wave_frequencies: default_wave_sweep_frequencies(),
        });
        let text = cfg.serialize();
        let reparsed = ExperimentConfig::parse(&text).unwrap();
        assert_eq!(text, reparsed.serialize());
    }

    #[test]
    fn vehicle_override_inherits_shared_params() {
        let cfg = ExperimentConfig::parse(
            "[controller]\nk_s = 0.7\n[platoon]\nn_vehicles = 3\n[vehicle.2]\nk_v = 0.3\n[input]\nspeed_amplitudes_mps = 1\nfrequencies_rad_per_s = 0.5\n",
        )
        .unwrap();
        let platoon = cfg.platoon().unwrap();
        match platoon.vehicles()[1] {
            avwave::platoon::VehicleModel::Controller(spec) => {
                assert_eq!(spec.k_s(), 0.7);
                assert_eq!(spec.k_v(), 0.3);
            }
            _ => panic!("expected controller"),
        }
    }

    #[test]
    fn sweep_grid_guard() {
        let text = "[freq]\nomega_points = 600000\n[input]\nspeed_amplitudes_mps = 1\nfrequencies_rad_per_s = 0.5\n[sweep]\nparameter = k_s\nvalues = 0.2,0.6,1.0\n";
        let err = ExperimentConfig::parse(text).unwrap_err();
        assert!(format!("{err}").contains("1e6"));
    }
}
