//! Complex transfer function between consecutive vehicles and its scalar
//! descriptors (magnitude, phase, response time).
//!
//! Magnitude and phase always come from direct complex evaluation of the
//! rational transfer function; printed closed forms are relegated to tests.

use num_complex::Complex;
use thiserror::Error;

use crate::model::LinearGains;
use crate::scalar::Scalar;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum FreqError {
    #[error("frequency must be positive (got {0})")]
    NonPositiveFrequency(f64),
    #[error("displacement must be positive (got {0})")]
    NonPositiveDisplacement(f64),
    #[error("transfer function singular at omega={0} (undamped resonance)")]
    Singularity(f64),
}

/// Complex transfer value at one frequency with derived scalar descriptors.
///
/// `phase` is the principal value for single-point queries and the
/// continuously continued angle along sweeps; `response_time = -phase/omega`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct FrequencyResponse<T> {
    pub omega: T,
    pub value: Complex<T>,
    pub magnitude: T,
    pub phase: T,
    pub response_time: T,
}

impl<T: Scalar> FrequencyResponse<T> {
    /// Builds a response from a complex value; phase is the principal value.
    pub fn from_value(omega: T, value: Complex<T>) -> Self {
        let magnitude = value.norm();
        let phase = value.arg();
        Self {
            omega,
            value,
            magnitude,
            phase,
            response_time: -phase / omega,
        }
    }

    /// Builds a response from polar data; `phase` may lie outside the
    /// principal branch (continued phase).
    pub fn from_polar(omega: T, magnitude: T, phase: T) -> Self {
        Self {
            omega,
            value: Complex::from_polar(magnitude, phase),
            magnitude,
            phase,
            response_time: -phase / omega,
        }
    }

    /// Copy of `self` with the phase shifted onto another branch; magnitude
    /// and complex value are unchanged.
    fn with_phase(mut self, phase: T) -> Self {
        self.phase = phase;
        self.response_time = -phase / self.omega;
        self
    }
}

fn check_omega<T: Scalar>(omega: T) -> Result<(), FreqError> {
    if omega > T::zero() && omega.is_finite() {
        Ok(())
    } else {
        Err(FreqError::NonPositiveFrequency(
            omega.to_f64().unwrap_or(f64::NAN),
        ))
    }
}

fn numerator<T: Scalar>(gains: &LinearGains<T>, omega: T) -> Complex<T> {
    Complex::new(gains.f_p(), omega * gains.f_lead())
}

fn denominator<T: Scalar>(gains: &LinearGains<T>, omega: T) -> Complex<T> {
    Complex::new(
        gains.f_p() - omega * omega,
        omega * gains.f_self() - gains.phi() * omega * omega * omega,
    )
}

/// Transfer between consecutive vehicles at angular frequency `omega`:
/// `(f_p + j w f_lead) / ((f_p - w^2) + j (w f_self - phi w^3))`.
///
/// The phase is the principal value in `(-pi, pi]`; see
/// [`transfer_at_continued`] for the branch continued from the `omega -> 0`
/// limit.
pub fn transfer_at<T: Scalar>(
    gains: &LinearGains<T>,
    omega: T,
) -> Result<FrequencyResponse<T>, FreqError> {
    check_omega(omega)?;
    let num = numerator(gains, omega);
    let den = denominator(gains, omega);
    if den.re == T::zero() && den.im == T::zero() {
        return Err(FreqError::Singularity(omega.to_f64().unwrap_or(f64::NAN)));
    }
    Ok(FrequencyResponse::from_value(omega, num / den))
}

/// Phase of the transfer function continued continuously from its
/// `omega -> 0` limit of zero.
///
/// The numerator stays in the closed right half-plane, so its principal
/// argument is already continuous. The denominator crosses the negative real
/// axis exactly once, at `omega^2 = f_self/phi`, and only when
/// `f_self > phi * f_p`; past that point the principal argument must be
/// lifted by `2 pi`.
fn continued_phase<T: Scalar>(gains: &LinearGains<T>, omega: T) -> T {
    let num = numerator(gains, omega);
    let den = denominator(gains, omega);
    let mut den_arg = den.arg();
    let omega_star_sq = gains.f_self() / gains.phi();
    if gains.f_p() < omega_star_sq && omega * omega > omega_star_sq {
        den_arg = den_arg + T::of(2.0) * T::PI();
    }
    num.arg() - den_arg
}

/// Like [`transfer_at`] but with the phase continued from the low-frequency
/// limit, so response times stay positive and smooth across the whole band.
pub fn transfer_at_continued<T: Scalar>(
    gains: &LinearGains<T>,
    omega: T,
) -> Result<FrequencyResponse<T>, FreqError> {
    let fr = transfer_at(gains, omega)?;
    Ok(fr.with_phase(continued_phase(gains, omega)))
}

/// Unit-modulus transfer of a pure time shift: phase `-omega * displacement`,
/// magnitude exactly one. The phase is continued (not wrapped), so the
/// response time equals `displacement` at every frequency.
pub fn newell_transfer<T: Scalar>(
    displacement: T,
    omega: T,
) -> Result<FrequencyResponse<T>, FreqError> {
    check_omega(omega)?;
    if displacement <= T::zero() || !displacement.is_finite() {
        return Err(FreqError::NonPositiveDisplacement(
            displacement.to_f64().unwrap_or(f64::NAN),
        ));
    }
    let phase = -omega * displacement;
    Ok(FrequencyResponse {
        omega,
        value: Complex::from_polar(T::one(), phase),
        magnitude: T::one(),
        phase,
        response_time: displacement,
    })
}

/// Evaluates the transfer over a sorted grid with continuously continued
/// phases. Adjacent phase samples never jump by more than `pi` on grids fine
/// enough to resolve the response (the continuation is exact per point, not
/// sequential).
pub fn transfer_sweep<T: Scalar>(
    gains: &LinearGains<T>,
    omega_grid: &[T],
) -> Result<Vec<FrequencyResponse<T>>, FreqError> {
    omega_grid
        .iter()
        .map(|&w| transfer_at_continued(gains, w))
        .collect()
}

/// Maximum transfer magnitude over the grid and the frequency attaining it.
/// A supremum `<= 1` over a sufficiently wide band indicates linear string
/// stability.
pub fn string_stability_margin<T: Scalar>(
    gains: &LinearGains<T>,
    omega_grid: &[T],
) -> Result<(T, T), FreqError> {
    assert!(!omega_grid.is_empty(), "frequency grid must be nonempty");
    assert!(
        omega_grid.windows(2).all(|w| w[0] < w[1]),
        "frequency grid must be strictly increasing"
    );
    let mut best_mag = T::neg_infinity();
    let mut best_omega = omega_grid[0];
    for &w in omega_grid {
        let fr = transfer_at(gains, w)?;
        if fr.magnitude > best_mag {
            best_mag = fr.magnitude;
            best_omega = w;
        }
    }
    Ok((best_mag, best_omega))
}

/// Logarithmically spaced frequency grid with `n >= 2` points.
pub fn log_grid<T: Scalar>(omega_min: T, omega_max: T, n: usize) -> Vec<T> {
    assert!(n >= 2 && omega_min > T::zero() && omega_max > omega_min);
    let lo = omega_min.ln();
    let hi = omega_max.ln();
    let step = (hi - lo) / T::from_usize(n - 1).unwrap();
    (0..n)
        .map(|i| (lo + step * T::from_usize(i).unwrap()).exp())
        .collect()
}

/// Default scan band for stability checks: 2000 log-spaced points over
/// `[1e-3, 1e2]` rad/s, wide enough for all third-order responses of
/// interest.
pub fn default_stability_grid<T: Scalar>() -> Vec<T> {
    log_grid(T::of(1e-3), T::of(1e2), 2000)
}
