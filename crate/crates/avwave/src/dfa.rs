//! Describing-function (first-harmonic) transfer for a linear stage whose
//! output speed deviation saturates at the physical speed limits.
//!
//! The clipped steady-state waveform is known exactly, so the first-harmonic
//! coefficients are computed by numerical quadrature segmented at the
//! analytically known clipping angles. The gain and phase come from those
//! Fourier projections alone.

use thiserror::Error;

use crate::freq::FrequencyResponse;
use crate::model::Equilibrium;
use crate::scalar::Scalar;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum DfaError {
    #[error("input amplitude must be positive (got {0})")]
    NonPositiveAmplitude(f64),
    #[error("speed bounds must satisfy lower < 0 < upper (got [{lower}, {upper}])")]
    InvalidBounds { lower: f64, upper: f64 },
    #[error("quadrature failed to converge (residual {residual} over [{a}, {b}])")]
    QuadratureNonConvergence { a: f64, b: f64, residual: f64 },
}

/// Admissible range of the speed deviation: `[-v_e, v_free - v_e]`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SpeedBounds<T> {
    lower: T,
    upper: T,
}

impl<T: Scalar> SpeedBounds<T> {
    pub fn new(lower: T, upper: T) -> Result<Self, DfaError> {
        if lower < T::zero() && T::zero() < upper && lower.is_finite() && upper.is_finite() {
            Ok(Self { lower, upper })
        } else {
            Err(DfaError::InvalidBounds {
                lower: lower.to_f64().unwrap_or(f64::NAN),
                upper: upper.to_f64().unwrap_or(f64::NAN),
            })
        }
    }

    /// Bounds induced by the physical speed range `[0, v_free]` around the
    /// equilibrium speed.
    pub fn from_equilibrium(eq: &Equilibrium<T>) -> Self {
        Self {
            lower: -eq.v_e(),
            upper: eq.v_free() - eq.v_e(),
        }
    }

    /// Symmetric bounds `[-limit, limit]`.
    pub fn symmetric(limit: T) -> Result<Self, DfaError> {
        Self::new(-limit, limit)
    }

    pub fn lower(&self) -> T {
        self.lower
    }

    pub fn upper(&self) -> T {
        self.upper
    }
}

/// Which speed bounds the unclipped stage output would violate.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum BoundaryCase {
    Inactive,
    UpperActive,
    LowerActive,
    BothActive,
}

/// Classifies by comparing the unclipped output amplitude `|G| * A` against
/// the two thresholds.
pub fn classify_boundary_case<T: Scalar>(
    linear: &FrequencyResponse<T>,
    input_amplitude: T,
    bounds: &SpeedBounds<T>,
) -> BoundaryCase {
    assert!(input_amplitude > T::zero(), "input amplitude must be > 0");
    let a_out = linear.magnitude * input_amplitude;
    let up = bounds.upper;
    let down = -bounds.lower;
    if a_out <= up.min(down) {
        BoundaryCase::Inactive
    } else if a_out > up.max(down) {
        BoundaryCase::BothActive
    } else if a_out > up {
        BoundaryCase::UpperActive
    } else {
        BoundaryCase::LowerActive
    }
}

/// A `2 pi`-periodic waveform in phase angle, with optionally known kink
/// locations so quadrature can split at them.
pub trait Waveform<T> {
    fn eval(&self, theta: T) -> T;

    /// Non-smooth points within `[0, 2 pi)`, if known.
    fn breakpoints(&self) -> Vec<T> {
        Vec::new()
    }
}

impl<T, F: Fn(T) -> T> Waveform<T> for F {
    fn eval(&self, theta: T) -> T {
        self(theta)
    }
}

/// Steady-state clipped stage output for leader input `A * sin(theta)`:
/// `clamp(|G| * A * sin(theta + angle(G)), lower, upper)`.
#[derive(Debug, Clone, Copy)]
pub struct ClippedWave<T> {
    output_amplitude: T,
    phase: T,
    lower: T,
    upper: T,
}

impl<T: Scalar> ClippedWave<T> {
    pub fn output_amplitude(&self) -> T {
        self.output_amplitude
    }
}

impl<T: Scalar> Waveform<T> for ClippedWave<T> {
    fn eval(&self, theta: T) -> T {
        let raw = self.output_amplitude * (theta + self.phase).sin();
        raw.max(self.lower).min(self.upper)
    }

    fn breakpoints(&self) -> Vec<T> {
        let two_pi = T::of(2.0) * T::PI();
        let mut pts = Vec::new();
        for bound in [self.lower, self.upper] {
            let ratio = bound / self.output_amplitude;
            if ratio.abs() < T::one() {
                let x = ratio.asin();
                for angle in [x, T::PI() - x] {
                    let theta = (angle - self.phase).rem_euclid(&two_pi);
                    pts.push(theta);
                }
            }
        }
        pts
    }
}

/// Builds the clipped output waveform for the given stage and input.
pub fn clipped_output<T: Scalar>(
    linear: &FrequencyResponse<T>,
    input_amplitude: T,
    bounds: &SpeedBounds<T>,
) -> ClippedWave<T> {
    assert!(input_amplitude > T::zero(), "input amplitude must be > 0");
    ClippedWave {
        output_amplitude: linear.magnitude * input_amplitude,
        phase: linear.phase,
        lower: bounds.lower,
        upper: bounds.upper,
    }
}

/// First-harmonic Fourier coefficients of a periodic waveform:
/// `O(theta) ~ y11 sin(theta) + y12 cos(theta)`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct FirstHarmonic<T> {
    pub y11: T,
    pub y12: T,
}

impl<T: Scalar> FirstHarmonic<T> {
    pub fn amplitude(&self) -> T {
        self.y11.hypot(self.y12)
    }

    pub fn phase(&self) -> T {
        self.y12.atan2(self.y11)
    }
}

/// Projects the waveform onto `sin(theta)` and `cos(theta)` over one full
/// period starting at `reference_phase`. The result is independent of the
/// starting point; it only anchors the quadrature window.
pub fn first_harmonic<T: Scalar, W: Waveform<T> + ?Sized>(
    wave: &W,
    reference_phase: T,
) -> Result<FirstHarmonic<T>, DfaError> {
    let two_pi = T::of(2.0) * T::PI();
    let end = reference_phase + two_pi;

    // Map breakpoints into the integration window and sort them.
    let mut cuts = vec![reference_phase, end];
    for bp in wave.breakpoints() {
        let mut x = bp + two_pi * ((reference_phase - bp) / two_pi).ceil();
        if x < reference_phase {
            x = x + two_pi;
        }
        if x > reference_phase && x < end {
            cuts.push(x);
        }
    }
    cuts.sort_by(|a, b| a.partial_cmp(b).unwrap());
    cuts.dedup_by(|a, b| (*a - *b).abs() < T::of(1e-14));

    // Scale for the absolute tolerance: the waveform's own magnitude.
    let mut scale = T::zero();
    let probe = T::of(2.0 * std::f64::consts::PI / 64.0);
    for k in 0..64 {
        scale = scale.max(wave.eval(reference_phase + probe * T::from_i32(k).unwrap()).abs());
    }
    let tol_total = (scale + T::min_positive_value()) * T::epsilon() * T::of(1e3);

    let mut y11 = T::zero();
    let mut y12 = T::zero();
    for seg in cuts.windows(2) {
        // Pull the endpoints off the breakpoints by a sliver so jump
        // discontinuities at segment boundaries are never sampled.
        let nudge = (seg[1] - seg[0]) * T::epsilon() * T::of(8.0);
        let (a, b) = (seg[0] + nudge, seg[1] - nudge);
        let tol = tol_total * (b - a) / two_pi;
        y11 = y11 + adaptive_simpson(&|th: T| wave.eval(th) * th.sin(), a, b, tol)?;
        y12 = y12 + adaptive_simpson(&|th: T| wave.eval(th) * th.cos(), a, b, tol)?;
    }
    Ok(FirstHarmonic {
        y11: y11 / T::PI(),
        y12: y12 / T::PI(),
    })
}

/// First-harmonic transfer of the clipped stage, measured against the leader
/// input sinusoid. When no bound is active this is the linear transfer,
/// returned unchanged.
pub fn describing_transfer<T: Scalar>(
    linear: &FrequencyResponse<T>,
    input_amplitude: T,
    bounds: &SpeedBounds<T>,
) -> Result<FrequencyResponse<T>, DfaError> {
    if input_amplitude <= T::zero() || !input_amplitude.is_finite() {
        return Err(DfaError::NonPositiveAmplitude(
            input_amplitude.to_f64().unwrap_or(f64::NAN),
        ));
    }
    if classify_boundary_case(linear, input_amplitude, bounds) == BoundaryCase::Inactive {
        return Ok(*linear);
    }
    let wave = clipped_output(linear, input_amplitude, bounds);
    let fh = first_harmonic(&wave, T::zero())?;
    let magnitude = fh.amplitude() / input_amplitude;
    // Keep the phase on the same branch as the linear stage (the projection
    // returns a principal value, the stage phase may be continued).
    let raw = fh.phase();
    let two_pi = T::of(2.0) * T::PI();
    let phase = raw + two_pi * ((linear.phase - raw) / two_pi).round();
    Ok(FrequencyResponse::from_polar(linear.omega, magnitude, phase))
}

/// Adaptive Simpson quadrature with Richardson acceptance.
fn adaptive_simpson<T: Scalar>(
    f: &impl Fn(T) -> T,
    a: T,
    b: T,
    tol: T,
) -> Result<T, DfaError> {
    let half = T::of(0.5);
    let m = (a + b) * half;
    let fa = f(a);
    let fm = f(m);
    let fb = f(b);
    let whole = simpson(fa, fm, fb, b - a);
    return recurse(f, a, m, b, fa, fm, fb, whole, tol, 48);

    fn simpson<T: Scalar>(fa: T, fm: T, fb: T, h: T) -> T {
        (fa + T::of(4.0) * fm + fb) * h / T::of(6.0)
    }

    #[allow(clippy::too_many_arguments)]
    fn recurse<T: Scalar>(
        f: &impl Fn(T) -> T,
        a: T,
        m: T,
        b: T,
        fa: T,
        fm: T,
        fb: T,
        whole: T,
        tol: T,
        depth: u32,
    ) -> Result<T, DfaError> {
        let half = T::of(0.5);
        let lm = (a + m) * half;
        let rm = (m + b) * half;
        let flm = f(lm);
        let frm = f(rm);
        let left = simpson(fa, flm, fm, m - a);
        let right = simpson(fm, frm, fb, b - m);
        let delta = left + right - whole;
        if delta.abs() <= T::of(15.0) * tol {
            return Ok(left + right + delta / T::of(15.0));
        }
        if depth == 0 {
            return Err(DfaError::QuadratureNonConvergence {
                a: a.to_f64().unwrap_or(f64::NAN),
                b: b.to_f64().unwrap_or(f64::NAN),
                residual: delta.abs().to_f64().unwrap_or(f64::NAN),
            });
        }
        let tol_half = tol * half;
        let l = recurse(f, a, lm, m, fa, flm, fm, left, tol_half, depth - 1)?;
        let r = recurse(f, m, rm, b, fm, frm, fb, right, tol_half, depth - 1)?;
        Ok(l + r)
    }
}
