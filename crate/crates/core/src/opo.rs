//! Below-threshold OPO squeezing spectrum.
//!
//! Variances are linear and in shot-noise units: vacuum is 1, squeezing is
//! below 1. Frequencies are in Hz, powers in W, lengths in m.

use thiserror::Error;

use crate::units::SPEED_OF_LIGHT;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum OpoError {
    #[error("invalid {field}: {value} ({constraint})")]
    InvalidParameter {
        field: &'static str,
        value: f64,
        constraint: &'static str,
    },
    #[error("escape efficiency undefined for T + L = 0")]
    ZeroCavityLoss,
    #[error("pump ratio x = {x} is above threshold; the below-threshold model does not apply")]
    AboveThreshold { x: f64 },
    #[error("antisqueezing diverges at threshold with zero sideband frequency (squeezed variance {squeezed})")]
    AntisqueezingDivergence { squeezed: f64 },
    #[error("invalid quadrature pair: squeezed {squeezed}, antisqueezed {antisqueezed} (need 0 < R- <= 1 <= R+)")]
    InvalidPair { squeezed: f64, antisqueezed: f64 },
}

pub(crate) fn fraction(field: &'static str, value: f64) -> Result<f64, OpoError> {
    if (0.0..=1.0).contains(&value) {
        Ok(value)
    } else {
        Err(OpoError::InvalidParameter {
            field,
            value,
            constraint: "must lie in [0, 1]",
        })
    }
}

/// Squeezed and antisqueezed quadrature variances, linear shot-noise units.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct QuadraturePair {
    pub squeezed: f64,
    pub antisqueezed: f64,
}

impl QuadraturePair {
    pub fn new(squeezed: f64, antisqueezed: f64) -> Result<Self, OpoError> {
        if squeezed > 0.0 && squeezed <= 1.0 && antisqueezed >= 1.0 && antisqueezed.is_finite() {
            Ok(Self {
                squeezed,
                antisqueezed,
            })
        } else {
            Err(OpoError::InvalidPair {
                squeezed,
                antisqueezed,
            })
        }
    }

    pub fn vacuum() -> Self {
        Self {
            squeezed: 1.0,
            antisqueezed: 1.0,
        }
    }

    pub fn from_db(squeezing_db: f64, antisqueezing_db: f64) -> Result<Self, OpoError> {
        Self::new(
            crate::units::db_to_linear(squeezing_db),
            crate::units::db_to_linear(antisqueezing_db),
        )
    }

    pub fn squeezing_db(&self) -> f64 {
        10.0 * self.squeezed.log10()
    }

    pub fn antisqueezing_db(&self) -> f64 {
        10.0 * self.antisqueezed.log10()
    }

    /// Product R₋·R₊; 1 for a pure squeezed state.
    pub fn purity_product(&self) -> f64 {
        self.squeezed * self.antisqueezed
    }
}

/// Everything the squeezing spectrum depends on.
#[derive(Debug, Clone, PartialEq)]
pub struct OpoParams {
    /// Detector quantum efficiency η.
    pub quantum_efficiency: f64,
    /// Homodyne visibility ξ; enters squared.
    pub visibility: f64,
    /// Propagation efficiency ζ from cavity to detector.
    pub propagation_efficiency: f64,
    /// Explicit escape efficiency ρ; derived from T and L when `None`.
    pub escape_efficiency: Option<f64>,
    pub coupler_transmission: f64,
    pub round_trip_loss: f64,
    /// Round-trip length l (m).
    pub round_trip_length: f64,
    /// Threshold pump power (W).
    pub threshold_power: f64,
    /// Sideband (analysis) frequency f (Hz).
    pub sideband_frequency: f64,
    /// Cavity bandwidth γ (Hz) overriding c(T+L)/l.
    pub bandwidth_override: Option<f64>,
}

impl OpoParams {
    pub fn validate(&self) -> Result<(), OpoError> {
        fraction("quantum_efficiency", self.quantum_efficiency)?;
        fraction("visibility", self.visibility)?;
        fraction("propagation_efficiency", self.propagation_efficiency)?;
        if let Some(rho) = self.escape_efficiency {
            fraction("escape_efficiency", rho)?;
        }
        fraction("coupler_transmission", self.coupler_transmission)?;
        fraction("round_trip_loss", self.round_trip_loss)?;
        let positive = [
            ("round_trip_length", self.round_trip_length),
            ("threshold_power", self.threshold_power),
        ];
        for (field, value) in positive {
            if !(value > 0.0 && value.is_finite()) {
                return Err(OpoError::InvalidParameter {
                    field,
                    value,
                    constraint: "must be > 0",
                });
            }
        }
        if !(self.sideband_frequency >= 0.0) {
            return Err(OpoError::InvalidParameter {
                field: "sideband_frequency",
                value: self.sideband_frequency,
                constraint: "must be >= 0",
            });
        }
        if let Some(g) = self.bandwidth_override {
            if !(g > 0.0) {
                return Err(OpoError::InvalidParameter {
                    field: "bandwidth_override",
                    value: g,
                    constraint: "must be > 0",
                });
            }
        }
        Ok(())
    }

    pub fn escape(&self) -> Result<f64, OpoError> {
        match self.escape_efficiency {
            Some(rho) => Ok(rho),
            None => escape_efficiency(self.coupler_transmission, self.round_trip_loss),
        }
    }

    pub fn effective_efficiency(&self) -> Result<f64, OpoError> {
        Ok(effective_efficiency(
            self.quantum_efficiency,
            self.visibility,
            self.propagation_efficiency,
            self.escape()?,
        ))
    }

    /// γ: the override when present, otherwise c(T+L)/l.
    pub fn bandwidth(&self) -> f64 {
        self.bandwidth_override.unwrap_or_else(|| {
            cavity_bandwidth(
                self.coupler_transmission,
                self.round_trip_loss,
                self.round_trip_length,
            )
        })
    }

    /// Ω = f/γ, a plain frequency ratio.
    pub fn normalized_frequency(&self) -> f64 {
        self.sideband_frequency / self.bandwidth()
    }

    pub fn spectrum_at(&self, pump_power: f64) -> Result<QuadraturePair, OpoError> {
        self.validate()?;
        squeezing_spectrum(
            self.effective_efficiency()?,
            pump_ratio(pump_power, self.threshold_power)?,
            self.normalized_frequency(),
        )
    }
}

/// ρ = T/(T+L).
pub fn escape_efficiency(transmission: f64, loss: f64) -> Result<f64, OpoError> {
    if transmission < 0.0 || loss < 0.0 {
        return Err(OpoError::InvalidParameter {
            field: "coupler_transmission/round_trip_loss",
            value: transmission.min(loss),
            constraint: "must be >= 0",
        });
    }
    let total = transmission + loss;
    if total == 0.0 {
        return Err(OpoError::ZeroCavityLoss);
    }
    Ok(transmission / total)
}

/// γ = c(T+L)/l in Hz.
pub fn cavity_bandwidth(transmission: f64, loss: f64, round_trip_length: f64) -> f64 {
    SPEED_OF_LIGHT * (transmission + loss) / round_trip_length
}

/// x = √(P/P_th).
pub fn pump_ratio(pump_power: f64, threshold_power: f64) -> Result<f64, OpoError> {
    if !(pump_power >= 0.0) {
        return Err(OpoError::InvalidParameter {
            field: "pump_power",
            value: pump_power,
            constraint: "must be >= 0",
        });
    }
    if !(threshold_power > 0.0) {
        return Err(OpoError::InvalidParameter {
            field: "threshold_power",
            value: threshold_power,
            constraint: "must be > 0",
        });
    }
    Ok((pump_power / threshold_power).sqrt())
}

/// C_eff = η ξ² ζ ρ.
pub fn effective_efficiency(quantum: f64, visibility: f64, propagation: f64, escape: f64) -> f64 {
    quantum * visibility * visibility * propagation * escape
}

/// R∓ = 1 ∓ C_eff · 4x / ((1 ± x)² + 4Ω²).
pub fn squeezing_spectrum(c_eff: f64, x: f64, omega: f64) -> Result<QuadraturePair, OpoError> {
    fraction("c_eff", c_eff)?;
    if !(x >= 0.0) {
        return Err(OpoError::InvalidParameter {
            field: "x",
            value: x,
            constraint: "must be >= 0",
        });
    }
    if !omega.is_finite() || omega < 0.0 {
        return Err(OpoError::InvalidParameter {
            field: "omega",
            value: omega,
            constraint: "must be finite and >= 0",
        });
    }
    if x > 1.0 {
        return Err(OpoError::AboveThreshold { x });
    }
    let four_omega_sq = 4.0 * omega * omega;
    let squeezed = 1.0 - c_eff * 4.0 * x / ((1.0 + x).powi(2) + four_omega_sq);
    let anti_den = (1.0 - x).powi(2) + four_omega_sq;
    if anti_den == 0.0 {
        return Err(OpoError::AntisqueezingDivergence { squeezed });
    }
    Ok(QuadraturePair {
        squeezed,
        antisqueezed: 1.0 + c_eff * 4.0 * x / anti_den,
    })
}

/// Homodyne variance at local-oscillator phase θ (radians), with θ = 0 on the
/// squeezed quadrature.
pub fn homodyne_trace(pair: &QuadraturePair, theta: f64) -> f64 {
    let (s, c) = theta.sin_cos();
    pair.squeezed * c * c + pair.antisqueezed * s * s
}
