//! Car-following controller, equilibrium state, and linearized feedback gains.
//!
//! The concrete controller commands an acceleration proportional to the
//! spacing surplus over the desired gap and to the speed difference with the
//! leader; the command is realized through a first-order actuation lag. The
//! controller is linear, so its linearization is exact and independent of the
//! operating point.

use thiserror::Error;

use crate::scalar::Scalar;

/// Validation and precondition failures for the controller layer.
#[derive(Debug, Clone, PartialEq, Error)]
pub enum ModelError {
    #[error("{name} must be {requirement} (got {value})")]
    InvalidParameter {
        name: &'static str,
        requirement: &'static str,
        value: f64,
    },
    #[error("equilibrium must satisfy 0 < v_e < v_free (got v_e={v_e}, v_free={v_free})")]
    InvalidEquilibrium { v_e: f64, v_free: f64 },
    #[error("speed must be non-negative (got {0})")]
    NegativeSpeed(f64),
    #[error("spacing must be positive (got {0})")]
    NonPositiveSpacing(f64),
}

fn require<T: Scalar>(
    ok: bool,
    name: &'static str,
    requirement: &'static str,
    value: T,
) -> Result<(), ModelError> {
    if ok && value.is_finite() {
        Ok(())
    } else {
        Err(ModelError::InvalidParameter {
            name,
            requirement,
            value: value.to_f64().unwrap_or(f64::NAN),
        })
    }
}

/// Third-order linear feedback car-following controller.
///
/// Parameters: spacing gain `k_s` (1/s²), speed-deviation gain `k_v` (1/s),
/// desired time gap `tau` (s), actuation time-lag `phi` (s), and standstill
/// spacing `s_0` (m).
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ControllerSpec<T> {
    k_s: T,
    k_v: T,
    tau: T,
    phi: T,
    s_0: T,
}

impl<T: Scalar> ControllerSpec<T> {
    pub fn new(k_s: T, k_v: T, tau: T, phi: T, s_0: T) -> Result<Self, ModelError> {
        require(k_s > T::zero(), "k_s", "> 0", k_s)?;
        require(k_v >= T::zero(), "k_v", ">= 0", k_v)?;
        require(tau > T::zero(), "tau", "> 0", tau)?;
        require(phi > T::zero(), "phi", "> 0", phi)?;
        require(s_0 >= T::zero(), "s_0", ">= 0", s_0)?;
        Ok(Self {
            k_s,
            k_v,
            tau,
            phi,
            s_0,
        })
    }

    pub fn k_s(&self) -> T {
        self.k_s
    }

    pub fn k_v(&self) -> T {
        self.k_v
    }

    pub fn tau(&self) -> T {
        self.tau
    }

    pub fn phi(&self) -> T {
        self.phi
    }

    pub fn s_0(&self) -> T {
        self.s_0
    }

    /// Spacing at which the controller commands zero acceleration at common
    /// speed `v_e`: `v_e * tau + s_0`.
    pub fn equilibrium_spacing(&self, v_e: T) -> Result<T, ModelError> {
        if v_e < T::zero() || !v_e.is_finite() {
            return Err(ModelError::NegativeSpeed(v_e.to_f64().unwrap_or(f64::NAN)));
        }
        Ok(v_e * self.tau + self.s_0)
    }

    /// Commanded acceleration for the given spacing and speeds:
    /// `k_s * (spacing - tau * v_self - s_0) + k_v * (v_lead - v_self)`.
    pub fn desired_accel(&self, spacing: T, v_self: T, v_lead: T) -> Result<T, ModelError> {
        if spacing <= T::zero() || !spacing.is_finite() {
            return Err(ModelError::NonPositiveSpacing(
                spacing.to_f64().unwrap_or(f64::NAN),
            ));
        }
        Ok(self.k_s * (spacing - self.tau * v_self - self.s_0) + self.k_v * (v_lead - v_self))
    }

    /// Feedback gains of the controller around any equilibrium point. The
    /// controller is linear, so this is exact everywhere.
    pub fn linearize(&self) -> LinearGains<T> {
        LinearGains {
            f_p: self.k_s,
            f_self: self.k_v + self.k_s * self.tau,
            f_lead: self.k_v,
            phi: self.phi,
        }
    }
}

impl<T: Scalar> Default for ControllerSpec<T> {
    /// Default gains: `k_s = 1`, `k_v = 1`, `tau = 1.2 s`, `phi = 0.1 s`,
    /// `s_0 = 2 m`.
    fn default() -> Self {
        Self {
            k_s: T::one(),
            k_v: T::one(),
            tau: T::of(1.2),
            phi: T::of(0.1),
            s_0: T::of(2.0),
        }
    }
}

/// Linearized feedback gains, stored as positive magnitudes.
///
/// The closed loop between consecutive vehicles has characteristic polynomial
/// `phi s^3 + s^2 + f_self s + f_p` and forcing numerator `f_p + f_lead s`.
/// This is the extension point for user-supplied linearizations of other
/// controllers.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct LinearGains<T> {
    f_p: T,
    f_self: T,
    f_lead: T,
    phi: T,
}

impl<T: Scalar> LinearGains<T> {
    pub fn new(f_p: T, f_self: T, f_lead: T, phi: T) -> Result<Self, ModelError> {
        require(f_p > T::zero(), "f_p", "> 0", f_p)?;
        require(f_self >= T::zero(), "f_self", ">= 0", f_self)?;
        require(f_lead >= T::zero(), "f_lead", ">= 0", f_lead)?;
        require(phi > T::zero(), "phi", "> 0", phi)?;
        Ok(Self {
            f_p,
            f_self,
            f_lead,
            phi,
        })
    }

    pub fn f_p(&self) -> T {
        self.f_p
    }

    pub fn f_self(&self) -> T {
        self.f_self
    }

    pub fn f_lead(&self) -> T {
        self.f_lead
    }

    pub fn phi(&self) -> T {
        self.phi
    }

    /// Low-frequency limit of the per-vehicle response time,
    /// `(f_self - f_lead) / f_p`; equals `tau` for the concrete controller.
    pub fn dc_response_time(&self) -> T {
        (self.f_self - self.f_lead) / self.f_p
    }
}

/// Shared equilibrium state of a platoon: cruising speed and free-flow limit.
///
/// The equilibrium spacing is per-vehicle (it depends on each controller's
/// `tau` and `s_0`); use [`ControllerSpec::equilibrium_spacing`] or
/// [`Equilibrium::spacing_for`].
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Equilibrium<T> {
    v_e: T,
    v_free: T,
}

impl<T: Scalar> Equilibrium<T> {
    pub fn new(v_e: T, v_free: T) -> Result<Self, ModelError> {
        if !(T::zero() < v_e && v_e < v_free) || !v_free.is_finite() {
            return Err(ModelError::InvalidEquilibrium {
                v_e: v_e.to_f64().unwrap_or(f64::NAN),
                v_free: v_free.to_f64().unwrap_or(f64::NAN),
            });
        }
        Ok(Self { v_e, v_free })
    }

    pub fn v_e(&self) -> T {
        self.v_e
    }

    pub fn v_free(&self) -> T {
        self.v_free
    }

    pub fn spacing_for(&self, spec: &ControllerSpec<T>) -> T {
        // v_e > 0 by construction, so the spacing call cannot fail.
        spec.equilibrium_spacing(self.v_e)
            .expect("equilibrium speed is positive")
    }
}

impl<T: Scalar> Default for Equilibrium<T> {
    /// Default experiment equilibrium: `v_e = 15 m/s`, `v_free = 30 m/s`.
    fn default() -> Self {
        Self {
            v_e: T::of(15.0),
            v_free: T::of(30.0),
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn spec(k_s: f64, k_v: f64, tau: f64, phi: f64, s_0: f64) -> ControllerSpec<f64> {
        ControllerSpec::new(k_s, k_v, tau, phi, s_0).unwrap()
    }

    #[test]
    fn equilibrium_spacing_examples() {
        let s = spec(1.0, 1.0, 1.2, 0.1, 2.0);
        assert_eq!(s.equilibrium_spacing(15.0).unwrap(), 20.0);
        assert_eq!(s.equilibrium_spacing(0.0).unwrap(), 2.0);
        let s44 = spec(1.0, 1.0, 0.5, 0.1, 2.0);
        assert_eq!(s44.equilibrium_spacing(10.0).unwrap(), 7.0);
        assert!(matches!(
            s.equilibrium_spacing(-1.0),
            Err(ModelError::NegativeSpeed(_))
        ));
    }

    #[test]
    fn desired_accel_examples() {
        let s = spec(1.0, 1.0, 1.2, 0.1, 2.0);
        // equilibrium fixed point
        assert_eq!(s.desired_accel(20.0, 15.0, 15.0).unwrap(), 0.0);
        // 2 m spacing surplus
        assert_eq!(s.desired_accel(22.0, 15.0, 15.0).unwrap(), 2.0);
        // 1 m/s speed deficit
        assert_eq!(s.desired_accel(20.0, 15.0, 16.0).unwrap(), 1.0);
        assert!(matches!(
            s.desired_accel(0.0, 15.0, 15.0),
            Err(ModelError::NonPositiveSpacing(_))
        ));
    }

    #[test]
    fn desired_accel_zero_on_equilibrium_manifold() {
        let s = spec(0.7, 0.3, 0.9, 0.2, 1.5);
        for k in 0..50 {
            let v_e = 0.5 * k as f64;
            let sp = s.equilibrium_spacing(v_e).unwrap();
            assert!(s.desired_accel(sp, v_e, v_e).unwrap().abs() < 1e-13);
        }
    }

    #[test]
    fn linearize_examples() {
        let g = spec(1.0, 1.0, 1.2, 0.1, 2.0).linearize();
        assert_eq!(
            (g.f_p(), g.f_self(), g.f_lead(), g.phi()),
            (1.0, 2.2, 1.0, 0.1)
        );
        let g = spec(1.0, 0.0, 1.0, 0.1, 2.0).linearize();
        assert_eq!(
            (g.f_p(), g.f_self(), g.f_lead(), g.phi()),
            (1.0, 1.0, 0.0, 0.1)
        );
        let g = spec(0.2, 1.0, 1.2, 0.1, 2.0).linearize();
        assert!((g.f_self() - 1.24).abs() < 1e-15);
        assert_eq!((g.f_p(), g.f_lead(), g.phi()), (0.2, 1.0, 0.1));
        assert!((g.dc_response_time() - 1.2).abs() < 1e-15);
    }

    #[test]
    fn linearization_reproduces_controller_exactly() {
        // f_p*(spacing - s_e) + f_lead*(v_lead - v_e) - f_self*(v_self - v_e)
        // must equal desired_accel for the linear controller.
        let s = spec(0.8, 0.4, 1.1, 0.15, 2.5);
        let g = s.linearize();
        let mut x = 0.123_f64;
        let mut next = move || {
            // small deterministic LCG, plenty for coverage here
            x = (x * 9301.0 + 49297.0) % 233280.0;
            x / 233280.0
        };
        for _ in 0..200 {
            let v_e = 1.0 + 29.0 * next();
            let s_e = s.equilibrium_spacing(v_e).unwrap();
            let spacing = 0.1 + 60.0 * next();
            let v_self = 40.0 * next();
            let v_lead = 40.0 * next();
            let direct = s.desired_accel(spacing, v_self, v_lead).unwrap();
            let linear = g.f_p() * (spacing - s_e) + g.f_lead() * (v_lead - v_e)
                - g.f_self() * (v_self - v_e);
            assert!(
                (direct - linear).abs() <= 1e-12 * (1.0 + direct.abs()),
                "direct={direct} linear={linear}"
            );
        }
    }

    #[test]
    fn invalid_parameters_rejected() {
        assert!(ControllerSpec::new(0.0, 1.0, 1.2, 0.1, 2.0).is_err());
        assert!(ControllerSpec::new(1.0, -0.1, 1.2, 0.1, 2.0).is_err());
        assert!(ControllerSpec::new(1.0, 1.0, 0.0, 0.1, 2.0).is_err());
        assert!(ControllerSpec::new(1.0, 1.0, 1.2, 0.0, 2.0).is_err());
        assert!(ControllerSpec::new(1.0, 1.0, 1.2, 0.1, -1.0).is_err());
        assert!(ControllerSpec::new(f64::NAN, 1.0, 1.2, 0.1, 2.0).is_err());
        assert!(LinearGains::new(0.0, 1.0, 1.0, 0.1).is_err());
        assert!(Equilibrium::new(0.0, 30.0).is_err());
        assert!(Equilibrium::new(30.0, 30.0).is_err());
        assert!(Equilibrium::<f64>::new(15.0, f64::INFINITY).is_err());
    }

    #[test]
    fn generic_over_f32() {
        let s = ControllerSpec::<f32>::default();
        assert!((s.equilibrium_spacing(15.0).unwrap() - 20.0).abs() < 1e-5);
    }
}
