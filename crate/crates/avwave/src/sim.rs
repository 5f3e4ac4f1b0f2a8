//! Independent time-domain oracle: fixed-step integration of the third-order
//! vehicle dynamics with speed clipping, plus empirical estimators for gains,
//! phases, and wave measurements.
//!
//! The leader follows its closed-form oscillatory trajectory (it is never
//! integrated); followers integrate `p' = v`, `v' = a`,
//! `a' = (u - a)/phi` with the classic fourth-order Runge-Kutta scheme.
//! Runs are fixed-step and bit-reproducible for a given configuration.

use std::io::{self, Write};

use thiserror::Error;

use crate::platoon::{OscComponent, PlatoonSpec, VehicleModel};
use crate::scalar::Scalar;
use crate::wave::{WaveFlags, WaveSample};

/// Acceleration magnitude treated as numerical blow-up (m/s^2).
const BLOWUP_ACCEL: f64 = 1e3;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum SimError {
    #[error("invalid sim config: {0}")]
    InvalidConfig(&'static str),
    #[error("integration step {dt} exceeds the stability bound {max_dt}")]
    StepTooLarge { dt: f64, max_dt: f64 },
    #[error("numerical blow-up at vehicle {vehicle}, t={time}: |a|={accel}")]
    Blowup {
        vehicle: usize,
        time: f64,
        accel: f64,
    },
    #[error("leader speed oscillation ({speed_amplitude} m/s) exceeds the bound {limit} m/s")]
    LeaderExceedsBounds { speed_amplitude: f64, limit: f64 },
    #[error("measurement window invalid: {0}")]
    Window(&'static str),
    #[error("no oscillation extrema found (amplitude below noise floor)")]
    NoExtrema,
    #[error("pair {pair} out of range 1..={n}")]
    PairOutOfRange { pair: usize, n: usize },
}

/// Fixed-step integration scheme.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum IntegratorKind {
    #[default]
    RungeKutta4,
}

/// Integration step and measurement window sizes.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SimConfig<T> {
    dt: T,
    warmup_periods: u32,
    measure_periods: u32,
    integrator: IntegratorKind,
}

impl<T: Scalar> SimConfig<T> {
    pub fn new(dt: T, warmup_periods: u32, measure_periods: u32) -> Result<Self, SimError> {
        if dt <= T::zero() || !dt.is_finite() {
            return Err(SimError::InvalidConfig("dt must be positive"));
        }
        if warmup_periods < 5 {
            return Err(SimError::InvalidConfig("warmup_periods must be >= 5"));
        }
        if measure_periods < 2 {
            return Err(SimError::InvalidConfig("measure_periods must be >= 2"));
        }
        Ok(Self {
            dt,
            warmup_periods,
            measure_periods,
            integrator: IntegratorKind::RungeKutta4,
        })
    }

    pub fn dt(&self) -> T {
        self.dt
    }

    pub fn warmup_periods(&self) -> u32 {
        self.warmup_periods
    }

    pub fn measure_periods(&self) -> u32 {
        self.measure_periods
    }

    pub fn integrator(&self) -> IntegratorKind {
        self.integrator
    }
}

impl<T: Scalar> Default for SimConfig<T> {
    /// `dt = 5 ms`, 10 warmup periods, 4 measurement periods.
    fn default() -> Self {
        Self {
            dt: T::of(0.005),
            warmup_periods: 10,
            measure_periods: 4,
            integrator: IntegratorKind::RungeKutta4,
        }
    }
}

/// Sampled state series of one vehicle.
#[derive(Debug, Clone, PartialEq)]
pub struct VehicleTrack<T> {
    pub position: Vec<T>,
    pub speed: Vec<T>,
    pub acceleration: Vec<T>,
}

/// Uniformly sampled trajectories of all vehicles (index 0 is the leader).
#[derive(Debug, Clone, PartialEq)]
pub struct Trajectory<T> {
    times: Vec<T>,
    tracks: Vec<VehicleTrack<T>>,
}

impl<T: Scalar> Trajectory<T> {
    /// Wraps externally produced series (e.g. closed-form trajectories) so
    /// the empirical estimators can run on them. Times must be uniform.
    pub fn from_series(times: Vec<T>, tracks: Vec<VehicleTrack<T>>) -> Result<Self, SimError> {
        if times.len() < 2 {
            return Err(SimError::InvalidConfig("need at least two samples"));
        }
        let dt = times[1] - times[0];
        if dt <= T::zero() || dt.is_nan() {
            return Err(SimError::InvalidConfig("times must be increasing"));
        }
        for w in times.windows(2) {
            if ((w[1] - w[0]) - dt).abs() > T::of(1e-9) * dt {
                return Err(SimError::InvalidConfig("times must be uniformly spaced"));
            }
        }
        if tracks.is_empty() {
            return Err(SimError::InvalidConfig("need at least one vehicle"));
        }
        for tr in &tracks {
            if tr.position.len() != times.len()
                || tr.speed.len() != times.len()
                || tr.acceleration.len() != times.len()
            {
                return Err(SimError::InvalidConfig("track length mismatch"));
            }
        }
        Ok(Self { times, tracks })
    }

    pub fn times(&self) -> &[T] {
        &self.times
    }

    pub fn n_vehicles(&self) -> usize {
        self.tracks.len()
    }

    pub fn track(&self, vehicle: usize) -> &VehicleTrack<T> {
        &self.tracks[vehicle]
    }

    pub fn dt(&self) -> T {
        self.times[1] - self.times[0]
    }

    /// Writes `t,vehicle,position,speed,acceleration` rows (time-major) with
    /// fixed 9-significant-digit formatting.
    pub fn write_csv<W: Write>(&self, mut w: W) -> io::Result<()> {
        writeln!(w, "t,vehicle,position,speed,acceleration")?;
        for (k, &t) in self.times.iter().enumerate() {
            for (veh, tr) in self.tracks.iter().enumerate() {
                writeln!(
                    w,
                    "{},{},{},{},{}",
                    format_sig9(t),
                    veh,
                    format_sig9(tr.position[k]),
                    format_sig9(tr.speed[k]),
                    format_sig9(tr.acceleration[k]),
                )?;
            }
        }
        Ok(())
    }
}

/// Fixed 9-significant-digit scientific formatting shared by all CSV output.
pub fn format_sig9<T: Scalar>(x: T) -> String {
    format!("{:.8e}", x.to_f64().unwrap_or(f64::NAN))
}

struct LeaderModel<T> {
    v_e: T,
    components: Vec<(T, T, T)>, // (amplitude, omega, phase0)
}

impl<T: Scalar> LeaderModel<T> {
    fn position(&self, t: T) -> T {
        let mut p = self.v_e * t;
        for &(a, w, ph) in &self.components {
            p = p + a * (w * t + ph).sin();
        }
        p
    }

    fn speed(&self, t: T) -> T {
        let mut v = self.v_e;
        for &(a, w, ph) in &self.components {
            v = v + a * w * (w * t + ph).cos();
        }
        v
    }

    fn accel(&self, t: T) -> T {
        let mut acc = T::zero();
        for &(a, w, ph) in &self.components {
            acc = acc - a * w * w * (w * t + ph).sin();
        }
        acc
    }
}

#[derive(Clone, Copy)]
enum Slot<T> {
    /// Offset of the vehicle's (p, v, a) triplet in the integrated state,
    /// plus its feedback gains and equilibrium spacing.
    Integrated {
        off: usize,
        f_p: T,
        f_self: T,
        f_lead: T,
        phi: T,
        s_e: T,
    },
    /// Trajectory is a pure shift of the predecessor's; not integrated.
    Shifted,
}

struct Engine<'a, T: Scalar> {
    platoon: &'a PlatoonSpec<T>,
    leader: LeaderModel<T>,
    dt: T,
    slots: Vec<Slot<T>>,
    times: Vec<T>,
    tracks: Vec<VehicleTrack<T>>,
}

fn hermite<T: Scalar>(y0: T, y1: T, d0: T, d1: T, u: T) -> T {
    // d0, d1 are derivatives already scaled by the interval length
    let u2 = u * u;
    let u3 = u2 * u;
    let two = T::of(2.0);
    let three = T::of(3.0);
    y0 * (two * u3 - three * u2 + T::one())
        + d0 * (u3 - two * u2 + u)
        + y1 * (three * u2 - two * u3)
        + d1 * (u3 - u2)
}

impl<T: Scalar> Engine<'_, T> {
    /// Recorded (position, speed) of an integrated vehicle at a past time,
    /// via cubic Hermite interpolation; before t = 0 the platoon moved at
    /// equilibrium.
    fn recorded_pv(&self, vehicle: usize, t: T) -> (T, T) {
        let tr = &self.tracks[vehicle];
        let v_e = self.platoon.equilibrium().v_e();
        if t <= T::zero() {
            return (tr.position[0] + v_e * t, v_e);
        }
        let last = self.times.len() - 1;
        let idx = (t / self.dt).floor().to_usize().unwrap_or(0).min(last - 1);
        let u = (t - self.times[idx]) / self.dt;
        let p = hermite(
            tr.position[idx],
            tr.position[idx + 1],
            tr.speed[idx] * self.dt,
            tr.speed[idx + 1] * self.dt,
            u,
        );
        let v = hermite(
            tr.speed[idx],
            tr.speed[idx + 1],
            tr.acceleration[idx] * self.dt,
            tr.acceleration[idx + 1] * self.dt,
            u,
        );
        (p, v)
    }

    fn recorded_accel(&self, vehicle: usize, t: T) -> T {
        let tr = &self.tracks[vehicle];
        if t <= T::zero() {
            return T::zero();
        }
        let last = self.times.len() - 1;
        let idx = (t / self.dt).floor().to_usize().unwrap_or(0).min(last - 1);
        let u = (t - self.times[idx]) / self.dt;
        tr.acceleration[idx] * (T::one() - u) + tr.acceleration[idx + 1] * u
    }

    /// (position, speed) of a shift-model vehicle: its predecessor delayed by
    /// the displacement and dropped by the standstill spacing.
    fn shifted_pv(&self, vehicle: usize, t: T) -> (T, T) {
        let VehicleModel::Newell { displacement, s_0 } = self.platoon.vehicles()[vehicle - 1]
        else {
            unreachable!("shifted_pv called on an integrated vehicle");
        };
        let (p, v) = self.upstream_pv(vehicle - 1, t - displacement, None);
        (p - s_0, v)
    }

    /// Leader state; before t = 0 the oscillation has not started and the
    /// leader cruised on its nominal trajectory.
    fn leader_pv(&self, t: T) -> (T, T) {
        if t >= T::zero() {
            (self.leader.position(t), self.leader.speed(t))
        } else {
            (self.leader.v_e * t, self.leader.v_e)
        }
    }

    fn leader_accel(&self, t: T) -> T {
        if t >= T::zero() {
            self.leader.accel(t)
        } else {
            T::zero()
        }
    }

    /// (position, speed) of vehicle `j` at time `t`. `state` carries the
    /// in-flight integrator stage for integrated vehicles; `None` forces the
    /// recorded history (used for delayed lookups, which always point far
    /// enough into the past).
    fn upstream_pv(&self, j: usize, t: T, state: Option<&[T]>) -> (T, T) {
        if j == 0 {
            return self.leader_pv(t);
        }
        match self.slots[j - 1] {
            Slot::Integrated { off, .. } => match state {
                Some(s) => (s[off], s[off + 1]),
                None => self.recorded_pv(j, t),
            },
            Slot::Shifted => self.shifted_pv(j, t),
        }
    }

    /// Feedback dynamics. The commanded acceleration is the exact linear form
    /// of the controller around the equilibrium, which stays defined even if
    /// an extreme oscillation drives the spacing through zero (the model has
    /// no collision mechanics).
    fn deriv(&self, t: T, state: &[T], out: &mut [T]) {
        let v_e = self.platoon.equilibrium().v_e();
        for (idx, slot) in self.slots.iter().enumerate() {
            let vehicle = idx + 1;
            let Slot::Integrated {
                off,
                f_p,
                f_self,
                f_lead,
                phi,
                s_e,
            } = *slot
            else {
                continue;
            };
            let (p_lead, v_lead) = self.upstream_pv(vehicle - 1, t, Some(state));
            let p = state[off];
            let v = state[off + 1];
            let a = state[off + 2];
            let u = f_p * (p_lead - p - s_e) + f_lead * (v_lead - v_e) - f_self * (v - v_e);
            out[off] = v;
            out[off + 1] = a;
            out[off + 2] = (u - a) / phi;
        }
    }

    fn record(&mut self, t: T, state: &[T]) {
        self.times.push(t);
        self.tracks[0].position.push(self.leader.position(t));
        self.tracks[0].speed.push(self.leader.speed(t));
        self.tracks[0].acceleration.push(self.leader.accel(t));
        for idx in 0..self.platoon.n_followers() {
            let vehicle = idx + 1;
            let (p, v, a) = match self.slots[idx] {
                Slot::Integrated { off, .. } => (state[off], state[off + 1], state[off + 2]),
                Slot::Shifted => {
                    let VehicleModel::Newell { displacement, .. } =
                        self.platoon.vehicles()[idx]
                    else {
                        unreachable!()
                    };
                    let (p, v) = self.shifted_pv(vehicle, t);
                    let a = if vehicle - 1 == 0 {
                        self.leader_accel(t - displacement)
                    } else {
                        self.recorded_accel(vehicle - 1, t - displacement)
                    };
                    (p, v, a)
                }
            };
            self.tracks[vehicle].position.push(p);
            self.tracks[vehicle].speed.push(v);
            self.tracks[vehicle].acceleration.push(a);
        }
    }
}

/// Integrates the platoon under the given leader oscillation.
///
/// The platoon starts on the equilibrium manifold (nominal spacings, common
/// speed, zero acceleration) with the leader's nominal position at the
/// origin. With bounds enabled, follower speeds are clamped to
/// `[0, v_free]` after each step and the acceleration is zeroed in the
/// violating direction while clamped.
pub fn simulate_platoon<T: Scalar>(
    platoon: &PlatoonSpec<T>,
    input: &[OscComponent<T>],
    config: &SimConfig<T>,
) -> Result<Trajectory<T>, SimError> {
    if input.is_empty() {
        return Err(SimError::InvalidConfig("input spectrum is empty"));
    }
    let eq = platoon.equilibrium();

    // Step-size bound: a twentieth of the fastest lag or oscillation period.
    let mut lag_min = T::infinity();
    for model in platoon.vehicles() {
        let lag = match model {
            VehicleModel::Controller(spec) => spec.phi(),
            VehicleModel::Newell { displacement, .. } => *displacement,
        };
        lag_min = lag_min.min(lag);
    }
    let omega_max = input
        .iter()
        .map(|c| c.omega())
        .fold(T::zero(), |a, b| a.max(b));
    let omega_min = input
        .iter()
        .map(|c| c.omega())
        .fold(T::infinity(), |a, b| a.min(b));
    let two_pi = T::of(2.0) * T::PI();
    let max_dt = lag_min.min(two_pi / omega_max) / T::of(20.0);
    if config.dt > max_dt * (T::one() + T::of(1e-12)) {
        return Err(SimError::StepTooLarge {
            dt: config.dt.to_f64().unwrap_or(f64::NAN),
            max_dt: max_dt.to_f64().unwrap_or(f64::NAN),
        });
    }

    if platoon.bounds_enabled() {
        let total_speed_amp = input
            .iter()
            .fold(T::zero(), |acc, c| acc + c.speed_amplitude());
        let limit = eq.v_e().min(eq.v_free() - eq.v_e());
        if total_speed_amp > limit * (T::one() + T::of(1e-9)) {
            return Err(SimError::LeaderExceedsBounds {
                speed_amplitude: total_speed_amp.to_f64().unwrap_or(f64::NAN),
                limit: limit.to_f64().unwrap_or(f64::NAN),
            });
        }
    }

    let leader = LeaderModel {
        v_e: eq.v_e(),
        components: input
            .iter()
            .map(|c| (c.amplitude(), c.omega(), c.phase0()))
            .collect(),
    };

    // Initial integrated state on the equilibrium manifold.
    let n = platoon.n_followers();
    let mut slots = Vec::with_capacity(n);
    let mut state = Vec::new();
    let mut nominal = T::zero();
    for model in platoon.vehicles() {
        let s_e = model.equilibrium_spacing(eq.v_e());
        nominal = nominal - s_e;
        match model {
            VehicleModel::Controller(spec) => {
                let gains = spec.linearize();
                slots.push(Slot::Integrated {
                    off: state.len(),
                    f_p: gains.f_p(),
                    f_self: gains.f_self(),
                    f_lead: gains.f_lead(),
                    phi: gains.phi(),
                    s_e,
                });
                state.extend_from_slice(&[nominal, eq.v_e(), T::zero()]);
            }
            VehicleModel::Newell { .. } => slots.push(Slot::Shifted),
        }
    }

    let t_slow = two_pi / omega_min;
    let total_time =
        t_slow * T::from_u32(config.warmup_periods + config.measure_periods).unwrap();
    let n_steps = (total_time / config.dt).ceil().to_usize().ok_or(
        SimError::InvalidConfig("simulation span too long for the step size"),
    )?;

    let mut engine = Engine {
        platoon,
        leader,
        dt: config.dt,
        slots,
        times: Vec::with_capacity(n_steps + 1),
        tracks: vec![
            VehicleTrack {
                position: Vec::with_capacity(n_steps + 1),
                speed: Vec::with_capacity(n_steps + 1),
                acceleration: Vec::with_capacity(n_steps + 1),
            };
            n + 1
        ],
    };
    engine.record(T::zero(), &state);

    let IntegratorKind::RungeKutta4 = config.integrator;
    let dim = state.len();
    let mut k1 = vec![T::zero(); dim];
    let mut k2 = vec![T::zero(); dim];
    let mut k3 = vec![T::zero(); dim];
    let mut k4 = vec![T::zero(); dim];
    let mut stage = vec![T::zero(); dim];
    let half = T::of(0.5);
    let sixth = T::of(1.0 / 6.0);
    let two = T::of(2.0);

    for step in 0..n_steps {
        let t = config.dt * T::from_usize(step).unwrap();
        let t_mid = t + config.dt * half;
        let t_next = config.dt * T::from_usize(step + 1).unwrap();

        engine.deriv(t, &state, &mut k1);
        for i in 0..dim {
            stage[i] = state[i] + k1[i] * config.dt * half;
        }
        engine.deriv(t_mid, &stage, &mut k2);
        for i in 0..dim {
            stage[i] = state[i] + k2[i] * config.dt * half;
        }
        engine.deriv(t_mid, &stage, &mut k3);
        for i in 0..dim {
            stage[i] = state[i] + k3[i] * config.dt;
        }
        engine.deriv(t_next, &stage, &mut k4);
        for i in 0..dim {
            state[i] =
                state[i] + (k1[i] + two * k2[i] + two * k3[i] + k4[i]) * config.dt * sixth;
        }

        // State projection onto the admissible speed range.
        if platoon.bounds_enabled() {
            for slot in &engine.slots {
                let Slot::Integrated { off, .. } = *slot else { continue };
                if state[off + 1] < T::zero() {
                    state[off + 1] = T::zero();
                    state[off + 2] = state[off + 2].max(T::zero());
                } else if state[off + 1] > eq.v_free() {
                    state[off + 1] = eq.v_free();
                    state[off + 2] = state[off + 2].min(T::zero());
                }
            }
        }

        for (idx, slot) in engine.slots.iter().enumerate() {
            let Slot::Integrated { off, .. } = *slot else { continue };
            let a = state[off + 2];
            if !a.is_finite() || a.abs() > T::of(BLOWUP_ACCEL) {
                return Err(SimError::Blowup {
                    vehicle: idx + 1,
                    time: t_next.to_f64().unwrap_or(f64::NAN),
                    accel: a.abs().to_f64().unwrap_or(f64::NAN),
                });
            }
        }

        engine.record(t_next, &state);
    }

    Ok(Trajectory {
        times: engine.times,
        tracks: engine.tracks,
    })
}

/// Amplitude and phase of the best-fit sinusoid `amp * sin(omega t + phase)`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct HarmonicFit<T> {
    pub amplitude: T,
    pub phase: T,
}

/// Least-squares projection of the series onto `sin(omega t)`, `cos(omega t)`
/// and a constant, over the last `window_periods` full periods of the series.
/// The window must lie entirely past `earliest_start` (end of warmup).
pub fn fit_first_harmonic<T: Scalar>(
    times: &[T],
    values: &[T],
    omega: T,
    window_periods: u32,
    earliest_start: T,
) -> Result<HarmonicFit<T>, SimError> {
    if omega <= T::zero() || omega.is_nan() {
        return Err(SimError::Window("omega must be positive"));
    }
    if window_periods == 0 {
        return Err(SimError::Window("window must span at least one period"));
    }
    if times.len() != values.len() || times.is_empty() {
        return Err(SimError::Window("series is empty or mismatched"));
    }
    let period = T::of(2.0) * T::PI() / omega;
    let t_end = *times.last().unwrap();
    let span = period * T::from_u32(window_periods).unwrap();
    let t_start = t_end - span;
    let slack = period * T::of(1e-9);
    if t_start < *times.first().unwrap() - slack {
        return Err(SimError::Window("window longer than the series"));
    }
    if t_start < earliest_start - slack {
        return Err(SimError::Window("window overlaps the warmup region"));
    }

    // Normal equations for [sin, cos, 1].
    let mut m = [[T::zero(); 3]; 3];
    let mut rhs = [T::zero(); 3];
    let mut count = 0usize;
    for (&t, &y) in times.iter().zip(values) {
        if t < t_start - slack {
            continue;
        }
        count += 1;
        let s = (omega * t).sin();
        let c = (omega * t).cos();
        let basis = [s, c, T::one()];
        for i in 0..3 {
            for j in 0..3 {
                m[i][j] = m[i][j] + basis[i] * basis[j];
            }
            rhs[i] = rhs[i] + basis[i] * y;
        }
    }
    if count < 8 {
        return Err(SimError::Window("too few samples in the window"));
    }

    // Gaussian elimination with partial pivoting on the 3x3 system.
    let mut a = [[T::zero(); 4]; 3];
    for i in 0..3 {
        a[i][..3].copy_from_slice(&m[i]);
        a[i][3] = rhs[i];
    }
    for col in 0..3 {
        let piv = (col..3)
            .max_by(|&i, &j| a[i][col].abs().partial_cmp(&a[j][col].abs()).unwrap())
            .unwrap();
        a.swap(col, piv);
        if a[col][col] == T::zero() {
            return Err(SimError::Window("degenerate projection system"));
        }
        for row in (col + 1)..3 {
            let f = a[row][col] / a[col][col];
            let (pivot_rows, rest) = a.split_at_mut(row);
            let pivot = pivot_rows[col];
            for (x, &p) in rest[0][col..].iter_mut().zip(&pivot[col..]) {
                *x = *x - f * p;
            }
        }
    }
    let mut coef = [T::zero(); 3];
    for i in (0..3).rev() {
        let mut acc = a[i][3];
        for j in (i + 1)..3 {
            acc = acc - a[i][j] * coef[j];
        }
        coef[i] = acc / a[i][i];
    }

    Ok(HarmonicFit {
        amplitude: coef[0].hypot(coef[1]),
        phase: coef[1].atan2(coef[0]),
    })
}

/// Wraps the phase difference into `(-pi, pi]`.
pub fn wrap_phase<T: Scalar>(phase: T) -> T {
    let two_pi = T::of(2.0) * T::PI();
    let mut p = phase.rem_euclid(&two_pi);
    if p > T::PI() {
        p = p - two_pi;
    }
    p
}

struct Extremum<T> {
    time: T,
    polarity: bool,
}

/// Strict local extrema of a series past `earliest_start`, refined by
/// parabolic interpolation. The noise floor rejects sub-nanoscale wiggles.
fn acceleration_extrema<T: Scalar>(times: &[T], accel: &[T], earliest_start: T) -> Vec<Extremum<T>> {
    let dt = times[1] - times[0];
    let floor = T::of(1e-9);
    let mut out = Vec::new();
    for k in 1..accel.len() - 1 {
        if times[k] < earliest_start {
            continue;
        }
        let (y0, y1, y2) = (accel[k - 1], accel[k], accel[k + 1]);
        if (y1 - y0) * (y2 - y1) < T::zero() && y1.abs() > floor {
            let denom = y0 - T::of(2.0) * y1 + y2;
            let delta = if denom == T::zero() {
                T::zero()
            } else {
                T::of(0.5) * (y0 - y2) / denom
            };
            out.push(Extremum {
                time: times[k] + delta * dt,
                polarity: y1 > T::zero(),
            });
        }
    }
    out
}

/// Interpolated position at time `t` using cubic Hermite with the recorded
/// speeds as derivatives.
fn position_at<T: Scalar>(track: &VehicleTrack<T>, times: &[T], t: T) -> T {
    let dt = times[1] - times[0];
    let last = times.len() - 1;
    let idx = ((t - times[0]) / dt)
        .floor()
        .to_usize()
        .unwrap_or(0)
        .min(last - 1);
    let u = (t - times[idx]) / dt;
    hermite(
        track.position[idx],
        track.position[idx + 1],
        track.speed[idx] * dt,
        track.speed[idx + 1] * dt,
        u,
    )
}

/// Traditional wave measurement on a simulated (or closed-form) trajectory.
///
/// Locates the instants of maximum speed change (acceleration extrema) of
/// vehicle `pair-1`, pairs each with the follower's next extremum of the same
/// polarity, and reads travel time, shifted distance, and speed off the
/// paired points.
pub fn empirical_wave_estimate<T: Scalar>(
    traj: &Trajectory<T>,
    pair: usize,
    earliest_start: T,
) -> Result<Vec<WaveSample<T>>, SimError> {
    let n = traj.n_vehicles() - 1;
    if !(1..=n).contains(&pair) {
        return Err(SimError::PairOutOfRange { pair, n });
    }
    let times = traj.times();
    let lead = traj.track(pair - 1);
    let foll = traj.track(pair);
    let lead_ex = acceleration_extrema(times, &lead.acceleration, earliest_start);
    let foll_ex = acceleration_extrema(times, &foll.acceleration, earliest_start);
    if lead_ex.is_empty() || foll_ex.is_empty() {
        return Err(SimError::NoExtrema);
    }

    let mut samples = Vec::new();
    for (i, le) in lead_ex.iter().enumerate() {
        // Travel must complete before the leader's next same-polarity
        // extremum (one full oscillation period).
        let horizon = lead_ex[i + 1..]
            .iter()
            .find(|e| e.polarity == le.polarity)
            .map(|e| e.time);
        let matched = foll_ex.iter().find(|fe| {
            fe.polarity == le.polarity
                && fe.time > le.time
                && horizon.is_none_or(|h| fe.time < h)
        });
        let Some(fe) = matched else { continue };
        let travel_time = fe.time - le.time;
        let h = position_at(lead, times, le.time) - position_at(foll, times, fe.time);
        samples.push(WaveSample {
            pair,
            emission_time: le.time,
            travel_time,
            shifted_distance: h,
            speed: h / travel_time,
            flags: WaveFlags {
                traditional: true,
                dfa_approximate: false,
            },
            neglected_fraction: T::zero(),
        });
    }
    if samples.is_empty() {
        return Err(SimError::NoExtrema);
    }
    Ok(samples)
}
