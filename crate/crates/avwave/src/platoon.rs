//! Propagation of oscillation spectra through vehicle strings and closed-form
//! trajectory synthesis.
//!
//! Each stage multiplies the component amplitude by its own transfer magnitude
//! and adds its own phase shift. With speed bounds enabled a stage's transfer
//! is the describing function evaluated at that stage's input speed amplitude
//! (first-harmonic balance); compounding spectra are then propagated
//! per-component, which is an approximation flagged on the output.

use thiserror::Error;

use crate::dfa::{self, BoundaryCase, DfaError, SpeedBounds};
use crate::freq::{self, FreqError, FrequencyResponse};
use crate::model::{ControllerSpec, Equilibrium};
use crate::scalar::Scalar;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum StageError {
    #[error(transparent)]
    Freq(#[from] FreqError),
    #[error(transparent)]
    Dfa(#[from] DfaError),
}

#[derive(Debug, Clone, PartialEq, Error)]
pub enum PlatoonError {
    #[error("platoon must contain at least one follower")]
    EmptyPlatoon,
    #[error("input spectrum must contain at least one component")]
    EmptySpectrum,
    #[error("oscillation components must have distinct frequencies (omega={0})")]
    DuplicateFrequency(f64),
    #[error("invalid oscillation component: {0}")]
    InvalidComponent(&'static str),
    #[error("stage {vehicle}: {source}")]
    Stage { vehicle: usize, source: StageError },
    #[error("invalid crossover inputs: {0}")]
    CrossoverInputs(&'static str),
    #[error("no crossover: the other component's gain does not exceed the dominant one")]
    NoCrossover,
}

/// One sinusoidal component of the leader's position oscillation:
/// `amplitude * sin(omega * t + phase0)`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct OscComponent<T> {
    amplitude: T,
    omega: T,
    phase0: T,
}

impl<T: Scalar> OscComponent<T> {
    pub fn new(amplitude: T, omega: T, phase0: T) -> Result<Self, PlatoonError> {
        if amplitude < T::zero() || !amplitude.is_finite() {
            return Err(PlatoonError::InvalidComponent("amplitude must be >= 0"));
        }
        if omega <= T::zero() || !omega.is_finite() {
            return Err(PlatoonError::InvalidComponent("omega must be > 0"));
        }
        if !phase0.is_finite() {
            return Err(PlatoonError::InvalidComponent("phase must be finite"));
        }
        Ok(Self {
            amplitude,
            omega,
            phase0,
        })
    }

    /// Builds a component from the speed-oscillation amplitude: the position
    /// amplitude is `speed_amplitude / omega`.
    pub fn from_speed_amplitude(
        speed_amplitude: T,
        omega: T,
        phase0: T,
    ) -> Result<Self, PlatoonError> {
        if omega <= T::zero() || !omega.is_finite() {
            return Err(PlatoonError::InvalidComponent("omega must be > 0"));
        }
        Self::new(speed_amplitude / omega, omega, phase0)
    }

    pub fn amplitude(&self) -> T {
        self.amplitude
    }

    pub fn omega(&self) -> T {
        self.omega
    }

    pub fn phase0(&self) -> T {
        self.phase0
    }

    pub fn speed_amplitude(&self) -> T {
        self.amplitude * self.omega
    }
}

/// Longitudinal model of one follower in the string.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum VehicleModel<T> {
    /// Third-order feedback controller, linearized internally.
    Controller(ControllerSpec<T>),
    /// Pure time-and-space shift of the predecessor's trajectory: unit-gain
    /// transfer with phase `-omega * displacement`.
    Newell { displacement: T, s_0: T },
}

impl<T: Scalar> VehicleModel<T> {
    /// Equilibrium spacing to the predecessor at common speed `v_e`.
    pub fn equilibrium_spacing(&self, v_e: T) -> T {
        match self {
            VehicleModel::Controller(spec) => v_e * spec.tau() + spec.s_0(),
            VehicleModel::Newell { displacement, s_0 } => v_e * *displacement + *s_0,
        }
    }

    /// Linear transfer of this stage at `omega` (phase continued from the
    /// low-frequency limit).
    pub fn stage_transfer(&self, omega: T) -> Result<FrequencyResponse<T>, FreqError> {
        match self {
            VehicleModel::Controller(spec) => {
                freq::transfer_at_continued(&spec.linearize(), omega)
            }
            VehicleModel::Newell { displacement, .. } => {
                freq::newell_transfer(*displacement, omega)
            }
        }
    }
}

/// Ordered vehicle string: index 0 is the (virtual) leader, vehicles `1..=N`
/// are the listed followers. All vehicles share the equilibrium state.
#[derive(Debug, Clone, PartialEq)]
pub struct PlatoonSpec<T> {
    vehicles: Vec<VehicleModel<T>>,
    equilibrium: Equilibrium<T>,
    bounds_enabled: bool,
}

impl<T: Scalar> PlatoonSpec<T> {
    pub fn new(
        vehicles: Vec<VehicleModel<T>>,
        equilibrium: Equilibrium<T>,
        bounds_enabled: bool,
    ) -> Result<Self, PlatoonError> {
        if vehicles.is_empty() {
            return Err(PlatoonError::EmptyPlatoon);
        }
        Ok(Self {
            vehicles,
            equilibrium,
            bounds_enabled,
        })
    }

    /// String of `n` identical controller-driven followers.
    pub fn homogeneous(
        spec: ControllerSpec<T>,
        n: usize,
        equilibrium: Equilibrium<T>,
        bounds_enabled: bool,
    ) -> Result<Self, PlatoonError> {
        Self::new(
            vec![VehicleModel::Controller(spec); n],
            equilibrium,
            bounds_enabled,
        )
    }

    pub fn vehicles(&self) -> &[VehicleModel<T>] {
        &self.vehicles
    }

    /// Number of followers (`N`); vehicle indices run `0..=N`.
    pub fn n_followers(&self) -> usize {
        self.vehicles.len()
    }

    pub fn equilibrium(&self) -> &Equilibrium<T> {
        &self.equilibrium
    }

    pub fn bounds_enabled(&self) -> bool {
        self.bounds_enabled
    }

    pub fn speed_bounds(&self) -> SpeedBounds<T> {
        SpeedBounds::from_equilibrium(&self.equilibrium)
    }

    /// Equilibrium spacing of pair `i` (between vehicles `i-1` and `i`),
    /// `i` in `1..=N`.
    pub fn spacing(&self, pair: usize) -> T {
        assert!(
            (1..=self.n_followers()).contains(&pair),
            "pair index {pair} out of range"
        );
        self.vehicles[pair - 1].equilibrium_spacing(self.equilibrium.v_e())
    }
}

/// One component of a vehicle's oscillation spectrum: amplitude and phase
/// accumulated through all upstream stages.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SpectrumComponent<T> {
    pub omega: T,
    pub amplitude: T,
    pub phase: T,
}

/// Oscillation spectrum of one vehicle in the string.
#[derive(Debug, Clone, PartialEq)]
pub struct VehicleSpectrum<T> {
    pub vehicle: usize,
    pub components: Vec<SpectrumComponent<T>>,
}

/// Result of propagating an input spectrum through the string: per-vehicle
/// spectra plus the per-stage transfers actually used (needed by the wave
/// formulas).
#[derive(Debug, Clone, PartialEq)]
pub struct PropagatedSpectra<T> {
    vehicles: Vec<VehicleSpectrum<T>>,
    stage_transfers: Vec<Vec<FrequencyResponse<T>>>,
    stage_clipped: Vec<Vec<bool>>,
}

impl<T: Scalar> PropagatedSpectra<T> {
    /// Spectra for vehicles `0..=N`; index 0 is the input spectrum.
    pub fn vehicles(&self) -> &[VehicleSpectrum<T>] {
        &self.vehicles
    }

    pub fn vehicle(&self, i: usize) -> &VehicleSpectrum<T> {
        &self.vehicles[i]
    }

    pub fn n_components(&self) -> usize {
        self.vehicles[0].components.len()
    }

    /// Transfer used by stage `pair` (1-based) for component `m`.
    pub fn stage_transfer(&self, pair: usize, m: usize) -> &FrequencyResponse<T> {
        &self.stage_transfers[pair - 1][m]
    }

    /// Whether any bound was active at stage `pair` for component `m`.
    pub fn stage_clipped(&self, pair: usize, m: usize) -> bool {
        self.stage_clipped[pair - 1][m]
    }

    pub fn any_clipped(&self) -> bool {
        self.stage_clipped.iter().flatten().any(|&c| c)
    }

    /// True when clipping occurred while propagating more than one component:
    /// per-component superposition is then only an approximation.
    pub fn superposition_approximation(&self) -> bool {
        self.any_clipped() && self.n_components() > 1
    }
}

/// Propagates the leader's oscillation spectrum through every stage.
///
/// Component `m` at vehicle `i` has amplitude `A_m * prod_{h<=i} |G_h|` and
/// phase `phase0_m + sum_{h<=i} angle(G_h)`; with bounds enabled each stage's
/// transfer is its describing function at that stage's input speed amplitude.
pub fn propagate_spectrum<T: Scalar>(
    platoon: &PlatoonSpec<T>,
    input: &[OscComponent<T>],
) -> Result<PropagatedSpectra<T>, PlatoonError> {
    if input.is_empty() {
        return Err(PlatoonError::EmptySpectrum);
    }
    for (m, a) in input.iter().enumerate() {
        if input[..m].iter().any(|b| b.omega == a.omega) {
            return Err(PlatoonError::DuplicateFrequency(
                a.omega.to_f64().unwrap_or(f64::NAN),
            ));
        }
    }

    let bounds = platoon.speed_bounds();
    let mut vehicles = Vec::with_capacity(platoon.n_followers() + 1);
    vehicles.push(VehicleSpectrum {
        vehicle: 0,
        components: input
            .iter()
            .map(|c| SpectrumComponent {
                omega: c.omega(),
                amplitude: c.amplitude(),
                phase: c.phase0(),
            })
            .collect(),
    });

    let mut stage_transfers = Vec::with_capacity(platoon.n_followers());
    let mut stage_clipped = Vec::with_capacity(platoon.n_followers());
    for (idx, model) in platoon.vehicles().iter().enumerate() {
        let pair = idx + 1;
        let upstream = vehicles.last().unwrap().components.clone();
        let mut components = Vec::with_capacity(upstream.len());
        let mut transfers = Vec::with_capacity(upstream.len());
        let mut clipped = Vec::with_capacity(upstream.len());
        for comp in &upstream {
            let linear = model.stage_transfer(comp.omega).map_err(|e| {
                PlatoonError::Stage {
                    vehicle: pair,
                    source: e.into(),
                }
            })?;
            let speed_amp = comp.amplitude * comp.omega;
            let (stage, was_clipped) = if platoon.bounds_enabled() && speed_amp > T::zero() {
                let case = dfa::classify_boundary_case(&linear, speed_amp, &bounds);
                let nl = dfa::describing_transfer(&linear, speed_amp, &bounds).map_err(|e| {
                    PlatoonError::Stage {
                        vehicle: pair,
                        source: e.into(),
                    }
                })?;
                (nl, case != BoundaryCase::Inactive)
            } else {
                (linear, false)
            };
            components.push(SpectrumComponent {
                omega: comp.omega,
                amplitude: comp.amplitude * stage.magnitude,
                phase: comp.phase + stage.phase,
            });
            transfers.push(stage);
            clipped.push(was_clipped);
        }
        vehicles.push(VehicleSpectrum {
            vehicle: pair,
            components,
        });
        stage_transfers.push(transfers);
        stage_clipped.push(clipped);
    }

    Ok(PropagatedSpectra {
        vehicles,
        stage_transfers,
        stage_clipped,
    })
}

/// Closed-form position of vehicle `i` at time `t`:
/// `p0_origin - sum_{h<=i} s_e_h + v_e t + sum_m A~ sin(omega_m t + phase~)`.
pub fn analytic_position<T: Scalar>(
    platoon: &PlatoonSpec<T>,
    spectra: &PropagatedSpectra<T>,
    i: usize,
    t: T,
    p0_origin: T,
) -> T {
    assert!(i <= platoon.n_followers(), "vehicle index {i} out of range");
    let mut pos = p0_origin + platoon.equilibrium().v_e() * t;
    for pair in 1..=i {
        pos = pos - platoon.spacing(pair);
    }
    for c in &spectra.vehicle(i).components {
        pos = pos + c.amplitude * (c.omega * t + c.phase).sin();
    }
    pos
}

/// Exact time derivative of [`analytic_position`]:
/// `v_e + sum_m A~ omega_m cos(omega_m t + phase~)`.
pub fn analytic_speed<T: Scalar>(
    platoon: &PlatoonSpec<T>,
    spectra: &PropagatedSpectra<T>,
    i: usize,
    t: T,
) -> T {
    assert!(i <= platoon.n_followers(), "vehicle index {i} out of range");
    let mut v = platoon.equilibrium().v_e();
    for c in &spectra.vehicle(i).components {
        v = v + c.amplitude * c.omega * (c.omega * t + c.phase).cos();
    }
    v
}

/// Index of the component with maximal cumulative amplitude at this vehicle;
/// exact ties break toward the lower frequency.
pub fn predominant_component<T: Scalar>(spectrum: &VehicleSpectrum<T>) -> usize {
    assert!(!spectrum.components.is_empty(), "spectrum must be nonempty");
    let mut best = 0;
    for (m, c) in spectrum.components.iter().enumerate().skip(1) {
        let b = &spectrum.components[best];
        if c.amplitude > b.amplitude || (c.amplitude == b.amplitude && c.omega < b.omega) {
            best = m;
        }
    }
    best
}

/// Smallest vehicle count `i >= 1` at which the other component's cumulative
/// amplitude strictly exceeds the dominant one's:
/// `a_other * g_other^i > a_dominant * g_dominant^i`.
///
/// Computed from the log ratio and then verified by direct evaluation to
/// absorb floating-point edge cases.
pub fn crossover_index<T: Scalar>(
    a_dominant: T,
    a_other: T,
    g_dominant: T,
    g_other: T,
) -> Result<u32, PlatoonError> {
    if a_other <= T::zero() || a_dominant < a_other || !a_dominant.is_finite() {
        return Err(PlatoonError::CrossoverInputs(
            "amplitudes must satisfy a_dominant >= a_other > 0",
        ));
    }
    if g_dominant <= T::zero() || !g_other.is_finite() {
        return Err(PlatoonError::CrossoverInputs("gains must be positive"));
    }
    if g_other <= g_dominant {
        return Err(PlatoonError::NoCrossover);
    }
    let x = (a_dominant / a_other).ln() / (g_other / g_dominant).ln();
    let base = x.floor().to_i64().unwrap_or(0).max(0) + 1;
    let flips = |i: i64| {
        i32::try_from(i).is_ok_and(|i| {
            a_other * g_other.powi(i) > a_dominant * g_dominant.powi(i)
        })
    };
    for candidate in [base - 1, base, base + 1] {
        if candidate >= 1 && flips(candidate) {
            return Ok(candidate as u32);
        }
    }
    // Verification out of powi range; trust the log estimate.
    Ok(base.max(1) as u32)
}
