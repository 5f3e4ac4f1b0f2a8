//! Wave travel times, shifted distances, and time-varying wave speeds
//! between consecutive vehicles and across whole platoons.
//!
//! A wave emitted by the platoon leader at time `t` reaches vehicle `i-1`
//! after the accumulated upstream travel time; the accumulated phase delay
//! cancels the trajectory's accumulated phase shift, so every pair's shifted
//! distance oscillates as `sin(omega t + phase0)` with the leader's own
//! initial phase. Positive wave speed means the wave propagates upstream
//! against traffic.

use thiserror::Error;

use crate::freq::FrequencyResponse;
use crate::platoon::{predominant_component, PlatoonSpec, PropagatedSpectra};
use crate::scalar::Scalar;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum WaveError {
    #[error("stage phase {phase} is non-negative (acausal: follower would lead)")]
    AcausalStage { phase: f64 },
    #[error("speed bounds active; exact aggregation requires the linear regime")]
    BoundsActive,
    #[error("pair {pair} out of range 1..={n}")]
    PairOutOfRange { pair: usize, n: usize },
    #[error("pair range is empty")]
    EmptyRange,
    #[error("pair {pair}: {source}")]
    AtPair { pair: usize, source: Box<WaveError> },
}

impl WaveError {
    fn at_pair(pair: usize, source: WaveError) -> Self {
        WaveError::AtPair {
            pair,
            source: Box::new(source),
        }
    }
}

/// Qualifiers attached to a wave sample.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub struct WaveFlags {
    /// Sample taken at a traditional measurement instant (maximum
    /// acceleration/deceleration deviation, `omega t + phase0 = pi/2 + k pi`).
    pub traditional: bool,
    /// The stage transfer is a describing function (speed bounds were active).
    pub dfa_approximate: bool,
}

/// One wave passage between vehicles `pair-1` and `pair`.
///
/// `speed * travel_time = shifted_distance` by construction. For compounding
/// spectra the sample uses the predominant component at vehicle `pair-1`;
/// `neglected_fraction` reports the amplitude share of the other components.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct WaveSample<T> {
    pub pair: usize,
    pub emission_time: T,
    pub travel_time: T,
    pub shifted_distance: T,
    pub speed: T,
    pub flags: WaveFlags,
    pub neglected_fraction: T,
}

/// Wave aggregated over a contiguous pair range.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct AggregateWave<T> {
    pub total_travel_time: T,
    pub total_shifted_distance: T,
    pub average_speed: T,
}

/// Per-pair propagation delay `-angle(G)/omega` of one stage.
pub fn pair_wave_travel_time<T: Scalar>(
    stage_transfer: &FrequencyResponse<T>,
) -> Result<T, WaveError> {
    if stage_transfer.phase < T::zero() {
        Ok(-stage_transfer.phase / stage_transfer.omega)
    } else {
        Err(WaveError::AcausalStage {
            phase: stage_transfer.phase.to_f64().unwrap_or(f64::NAN),
        })
    }
}

/// Everything needed to evaluate one pair's wave at any emission time.
struct StageWave<T> {
    travel_time: T,
    mean_distance: T,
    osc_coeff: T,
    omega: T,
    phase0: T,
    dfa_approximate: bool,
    neglected_fraction: T,
}

impl<T: Scalar> StageWave<T> {
    fn shifted_distance(&self, t: T) -> T {
        self.mean_distance + self.osc_coeff * (self.omega * t + self.phase0).sin()
    }
}

fn stage_wave<T: Scalar>(
    platoon: &PlatoonSpec<T>,
    spectra: &PropagatedSpectra<T>,
    pair: usize,
) -> Result<StageWave<T>, WaveError> {
    let n = platoon.n_followers();
    if !(1..=n).contains(&pair) {
        return Err(WaveError::PairOutOfRange { pair, n });
    }
    let upstream = spectra.vehicle(pair - 1);
    let p = predominant_component(upstream);
    let stage = spectra.stage_transfer(pair, p);
    let travel_time =
        pair_wave_travel_time(stage).map_err(|e| WaveError::at_pair(pair, e))?;
    let amp_upstream = upstream.components[p].amplitude;

    let total: T = upstream
        .components
        .iter()
        .fold(T::zero(), |acc, c| acc + c.amplitude);
    let neglected_fraction = if upstream.components.len() > 1 && total > T::zero() {
        (total - amp_upstream) / total
    } else {
        T::zero()
    };

    Ok(StageWave {
        travel_time,
        mean_distance: platoon.spacing(pair) - platoon.equilibrium().v_e() * travel_time,
        osc_coeff: amp_upstream * (T::one() - stage.magnitude),
        omega: stage.omega,
        phase0: spectra.vehicle(0).components[p].phase,
        dfa_approximate: spectra.stage_clipped(pair, p),
        neglected_fraction,
    })
}

/// Shifted distance `h` of pair `pair` for a wave emitted by the leader at
/// `emission_time`:
/// `s_e - v_e dt + A~ (1 - |G|) sin(omega t + phase0)`.
pub fn pair_shifted_distance<T: Scalar>(
    platoon: &PlatoonSpec<T>,
    spectra: &PropagatedSpectra<T>,
    pair: usize,
    emission_time: T,
) -> Result<T, WaveError> {
    Ok(stage_wave(platoon, spectra, pair)?.shifted_distance(emission_time))
}

/// Wave speed of pair `pair` at the given emission time: `h / dt`.
pub fn pair_wave_speed<T: Scalar>(
    platoon: &PlatoonSpec<T>,
    spectra: &PropagatedSpectra<T>,
    pair: usize,
    emission_time: T,
) -> Result<T, WaveError> {
    let sw = stage_wave(platoon, spectra, pair)?;
    Ok(sw.shifted_distance(emission_time) / sw.travel_time)
}

/// Builds the full [`WaveSample`] for one pair and emission time.
pub fn pair_wave_sample<T: Scalar>(
    platoon: &PlatoonSpec<T>,
    spectra: &PropagatedSpectra<T>,
    pair: usize,
    emission_time: T,
) -> Result<WaveSample<T>, WaveError> {
    let sw = stage_wave(platoon, spectra, pair)?;
    Ok(sample_from(&sw, pair, emission_time, false))
}

fn sample_from<T: Scalar>(
    sw: &StageWave<T>,
    pair: usize,
    t: T,
    traditional: bool,
) -> WaveSample<T> {
    let h = sw.shifted_distance(t);
    WaveSample {
        pair,
        emission_time: t,
        travel_time: sw.travel_time,
        shifted_distance: h,
        speed: h / sw.travel_time,
        flags: WaveFlags {
            traditional,
            dfa_approximate: sw.dfa_approximate,
        },
        neglected_fraction: sw.neglected_fraction,
    }
}

/// Sums travel times and shifted distances over a contiguous pair range.
///
/// Valid only in the linear regime: ranges containing a clipped stage are
/// rejected, because the summation telescopes per-stage amplitudes of one
/// frequency component.
pub fn platoon_aggregate_wave<T: Scalar>(
    platoon: &PlatoonSpec<T>,
    spectra: &PropagatedSpectra<T>,
    pairs: std::ops::RangeInclusive<usize>,
    emission_time: T,
) -> Result<AggregateWave<T>, WaveError> {
    let (start, end) = (*pairs.start(), *pairs.end());
    if start > end {
        return Err(WaveError::EmptyRange);
    }
    let n = platoon.n_followers();
    for pair in [start, end] {
        if !(1..=n).contains(&pair) {
            return Err(WaveError::PairOutOfRange { pair, n });
        }
    }
    let m = spectra.n_components();
    for pair in start..=end {
        for comp in 0..m {
            if spectra.stage_clipped(pair, comp) {
                return Err(WaveError::at_pair(pair, WaveError::BoundsActive));
            }
        }
    }

    // Single frequency: the predominant component entering the range.
    let p = predominant_component(spectra.vehicle(start - 1));
    let omega = spectra.vehicle(0).components[p].omega;
    let phase0 = spectra.vehicle(0).components[p].phase;

    let mut total_travel_time = T::zero();
    let mut spacing_sum = T::zero();
    for pair in start..=end {
        let stage = spectra.stage_transfer(pair, p);
        total_travel_time = total_travel_time
            + pair_wave_travel_time(stage).map_err(|e| WaveError::at_pair(pair, e))?;
        spacing_sum = spacing_sum + platoon.spacing(pair);
    }
    // Per-pair oscillation amplitudes telescope to the end-to-end drop.
    let osc = (spectra.vehicle(start - 1).components[p].amplitude
        - spectra.vehicle(end).components[p].amplitude)
        * (omega * emission_time + phase0).sin();
    let total_shifted_distance =
        spacing_sum - platoon.equilibrium().v_e() * total_travel_time + osc;
    Ok(AggregateWave {
        total_travel_time,
        total_shifted_distance,
        average_speed: total_shifted_distance / total_travel_time,
    })
}

/// Dense table of wave samples for the requested pairs over a sorted time
/// grid, plus the traditional-measurement instants (flagged) that fall
/// inside the grid span.
pub fn wave_speed_series<T: Scalar>(
    platoon: &PlatoonSpec<T>,
    spectra: &PropagatedSpectra<T>,
    pairs: &[usize],
    time_grid: &[T],
) -> Result<Vec<WaveSample<T>>, WaveError> {
    assert!(
        time_grid.windows(2).all(|w| w[0] <= w[1]),
        "time grid must be sorted"
    );
    let mut out = Vec::new();
    for &pair in pairs {
        let sw = stage_wave(platoon, spectra, pair)?;
        let mut rows: Vec<WaveSample<T>> = time_grid
            .iter()
            .map(|&t| sample_from(&sw, pair, t, false))
            .collect();
        if let (Some(&t0), Some(&t1)) = (time_grid.first(), time_grid.last()) {
            // omega t + phase0 = pi/2 + k pi inside [t0, t1]
            let half_pi = T::PI() * T::of(0.5);
            let k0 = ((sw.omega * t0 + sw.phase0 - half_pi) / T::PI()).ceil();
            let mut k = k0;
            loop {
                let t = (half_pi + T::PI() * k - sw.phase0) / sw.omega;
                if t > t1 {
                    break;
                }
                if t >= t0 {
                    rows.push(sample_from(&sw, pair, t, true));
                }
                k = k + T::one();
            }
        }
        rows.sort_by(|a, b| {
            a.emission_time
                .partial_cmp(&b.emission_time)
                .unwrap()
                .then(a.flags.traditional.cmp(&b.flags.traditional))
        });
        out.extend(rows);
    }
    Ok(out)
}
