//! Physical constants and decibel conversions.

use thiserror::Error;

/// Speed of light in vacuum (m/s).
pub const SPEED_OF_LIGHT: f64 = 299_792_458.0;

#[derive(Debug, Clone, Copy, PartialEq, Error)]
#[error("cannot express {0} in dB: value must be > 0")]
pub struct NonPositiveLinear(pub f64);

/// 10^(dB/10).
pub fn db_to_linear(db: f64) -> f64 {
    10f64.powf(db / 10.0)
}

/// 10·log10(linear).
pub fn linear_to_db(linear: f64) -> Result<f64, NonPositiveLinear> {
    if linear > 0.0 {
        Ok(10.0 * linear.log10())
    } else {
        Err(NonPositiveLinear(linear))
    }
}
