//! Desingularizing reparametrisations `φ` of function values.

use alloc::sync::Arc;
use core::fmt;
#[allow(unused_imports)] // inherent float methods shadow it when std is linked
use num_traits::Float;

use crate::error::{Error, Result};

pub type RealFn = Arc<dyn Fn(f64) -> f64 + Send + Sync>;

/// `φ(τ) = τ^(1−α)` with `α ∈ [0,1)`, or an arbitrary pair `(φ, φ′)`.
#[derive(Clone)]
pub enum DesingularizerSpec {
    Power { exponent: f64 },
    Custom { phi: RealFn, dphi: RealFn },
}

impl fmt::Debug for DesingularizerSpec {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Self::Power { exponent } => write!(f, "Power({exponent})"),
            Self::Custom { .. } => write!(f, "Custom"),
        }
    }
}

impl DesingularizerSpec {
    pub fn power(exponent: f64) -> Result<Self> {
        if !(0.0..1.0).contains(&exponent) {
            return Err(Error::InvalidParameter(alloc::format!(
                "KL exponent must lie in [0,1), got {exponent}"
            )));
        }
        Ok(Self::Power { exponent })
    }

    /// `φ(τ) = √τ`.
    pub fn sqrt() -> Self {
        Self::Power { exponent: 0.5 }
    }

    /// `φ(τ) = τ`.
    pub fn identity() -> Self {
        Self::Power { exponent: 0.0 }
    }

    /// General pair; checks `φ(0) = 0` and `φ′ > 0` on a few test points.
    pub fn custom(
        phi: impl Fn(f64) -> f64 + Send + Sync + 'static,
        dphi: impl Fn(f64) -> f64 + Send + Sync + 'static,
    ) -> Result<Self> {
        if phi(0.0).abs() > 1e-12 {
            return Err(Error::InvalidParameter("desingularizer needs phi(0) = 0".into()));
        }
        let mut t = 1.0;
        for _ in 0..20 {
            if !(dphi(t) > 0.0) {
                return Err(Error::InvalidParameter(alloc::format!(
                    "desingularizer derivative is not positive at {t}"
                )));
            }
            t *= 0.25;
        }
        Ok(Self::Custom {
            phi: Arc::new(phi),
            dphi: Arc::new(dphi),
        })
    }

    pub fn exponent(&self) -> Option<f64> {
        match self {
            Self::Power { exponent } => Some(*exponent),
            Self::Custom { .. } => None,
        }
    }

    pub fn value(&self, tau: f64) -> f64 {
        match self {
            Self::Power { exponent } => {
                if tau <= 0.0 {
                    0.0
                } else {
                    tau.powf(1.0 - exponent)
                }
            }
            Self::Custom { phi, .. } => phi(tau),
        }
    }

    pub fn derivative(&self, tau: f64) -> f64 {
        match self {
            Self::Power { exponent } => {
                if *exponent == 0.0 {
                    1.0
                } else {
                    (1.0 - exponent) * tau.powf(-exponent)
                }
            }
            Self::Custom { dphi, .. } => dphi(tau),
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn power_form() {
        let s = DesingularizerSpec::sqrt();
        assert_eq!(s.value(0.0), 0.0);
        assert_eq!(s.value(4.0), 2.0);
        assert!((s.derivative(4.0) - 0.25).abs() < 1e-15);
        assert_eq!(DesingularizerSpec::identity().derivative(1e-9), 1.0);
        assert!(DesingularizerSpec::power(1.0).is_err());
        assert!(DesingularizerSpec::power(-0.1).is_err());
    }

    #[test]
    fn custom_checks() {
        assert!(DesingularizerSpec::custom(|t| t + 1.0, |_| 1.0).is_err());
        assert!(DesingularizerSpec::custom(|t| -t, |_| -1.0).is_err());
        let c = DesingularizerSpec::custom(|t| 2.0 * t, |_| 2.0).unwrap();
        assert_eq!(c.value(3.0), 6.0);
        assert_eq!(c.exponent(), None);
    }
}
