//! Frequency-domain analysis of traffic wave propagation through platoons of
//! automated vehicles, paired with a time-domain simulation oracle.
//!
//! The library answers a single family of questions: given a longitudinal
//! car-following controller and an oscillating lead vehicle, how do the
//! oscillation and the resulting traffic wave travel down a vehicle string?
//!
//! * [`model`] — the car-following controller, its equilibrium, and its
//!   linearized feedback gains.
//! * [`freq`] — the complex transfer function between consecutive vehicles,
//!   its magnitude/phase descriptors, and string-stability scans.
//! * [`dfa`] — describing-function (first-harmonic) transfer when the
//!   follower's speed deviation saturates at the physical speed limits.
//! * [`platoon`] — propagation of oscillation spectra through homogeneous or
//!   heterogeneous strings, and closed-form trajectory synthesis.
//! * [`wave`] — per-pair and aggregate wave travel times, shifted distances,
//!   and time-varying wave speeds.
//! * [`sim`] — an independent fixed-step ODE simulator used as the oracle for
//!   everything above, plus empirical gain/phase/wave estimators.
//!
//! All numeric code is generic over the scalar type (see [`scalar::Scalar`]);
//! the `*64` aliases below pin the common `f64` instantiations.

pub mod dfa;
pub mod freq;
pub mod model;
pub mod platoon;
pub mod scalar;
pub mod sim;
pub mod wave;

pub use scalar::Scalar;

/// `f64` instantiations of the core types.
pub type ControllerSpec64 = model::ControllerSpec<f64>;
pub type LinearGains64 = model::LinearGains<f64>;
pub type Equilibrium64 = model::Equilibrium<f64>;
pub type FrequencyResponse64 = freq::FrequencyResponse<f64>;
pub type SpeedBounds64 = dfa::SpeedBounds<f64>;
pub type OscComponent64 = platoon::OscComponent<f64>;
pub type PlatoonSpec64 = platoon::PlatoonSpec<f64>;
pub type VehicleModel64 = platoon::VehicleModel<f64>;
pub type PropagatedSpectra64 = platoon::PropagatedSpectra<f64>;
pub type WaveSample64 = wave::WaveSample<f64>;
pub type SimConfig64 = sim::SimConfig<f64>;
pub type Trajectory64 = sim::Trajectory<f64>;
