//! Least-squares fit of (C_eff, P_th) to squeezing-versus-pump-power data.
//!
//! Residuals are taken in dB on each quadrature that a data point reports.
//! The search is a fixed coarse grid followed by simplex refinement in
//! (C_eff, ln P_th), so results are reproducible bit for bit.

use thiserror::Error;

use crate::opo::squeezing_spectrum;
use crate::simplex::{self, SimplexOptions};

const GRID_C_STEPS: usize = 20;
const GRID_P_STEPS: usize = 40;
/// Upper end of the threshold search range, as a multiple of the largest pump power.
const MAX_THRESHOLD_FACTOR: f64 = 100.0;
const BOUNDARY_REL: f64 = 1e-6;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum FitError {
    #[error("need at least 2 data points, got {0}")]
    TooFewPoints(usize),
    #[error("all pump powers are equal; threshold is not identifiable")]
    DegeneratePowers,
    #[error("data point {index}: {reason}")]
    InvalidPoint { index: usize, reason: String },
    #[error("invalid fixed parameter {field}: {value}")]
    InvalidFixed { field: &'static str, value: f64 },
}

/// One measured point. Either quadrature may be missing.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct FitPoint {
    /// Pump power (W).
    pub pump_power: f64,
    pub squeezing_db: Option<f64>,
    pub antisqueezing_db: Option<f64>,
    pub weight: f64,
}

impl FitPoint {
    pub fn new(pump_power: f64, squeezing_db: f64, antisqueezing_db: f64) -> Self {
        Self {
            pump_power,
            squeezing_db: Some(squeezing_db),
            antisqueezing_db: Some(antisqueezing_db),
            weight: 1.0,
        }
    }

    pub fn squeezed_only(pump_power: f64, squeezing_db: f64) -> Self {
        Self {
            pump_power,
            squeezing_db: Some(squeezing_db),
            antisqueezing_db: None,
            weight: 1.0,
        }
    }
}

/// Quantities held fixed during a fit.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct FitFixed {
    /// Sideband frequency f (Hz).
    pub sideband_frequency: f64,
    /// Cavity bandwidth γ (Hz).
    pub bandwidth: f64,
}

impl FitFixed {
    pub fn omega(&self) -> f64 {
        self.sideband_frequency / self.bandwidth
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct OpoFit {
    pub c_eff: f64,
    /// Fitted threshold power (W).
    pub threshold_power: f64,
    /// Weighted RMS residual over all fitted quadrature values (dB).
    pub rms_residual_db: f64,
    /// The optimum touches the search box; the parameters are poorly constrained.
    pub on_boundary: bool,
    pub converged: bool,
    pub evaluations: usize,
}

struct Problem<'a> {
    data: &'a [FitPoint],
    omega: f64,
    threshold_min: f64,
    threshold_max: f64,
}

impl Problem<'_> {
    /// Weighted sum of squared dB residuals; infinite outside the search box.
    fn cost(&self, c_eff: f64, threshold: f64) -> f64 {
        if !(0.0..=1.0).contains(&c_eff)
            || !(self.threshold_min..=self.threshold_max).contains(&threshold)
        {
            return f64::INFINITY;
        }
        let mut total = 0.0;
        for p in self.data {
            let x = (p.pump_power / threshold).sqrt();
            let pair = match squeezing_spectrum(c_eff, x, self.omega) {
                Ok(pair) => pair,
                Err(_) => return f64::INFINITY,
            };
            if let Some(s) = p.squeezing_db {
                total += p.weight * (10.0 * pair.squeezed.log10() - s).powi(2);
            }
            if let Some(a) = p.antisqueezing_db {
                total += p.weight * (10.0 * pair.antisqueezed.log10() - a).powi(2);
            }
        }
        if total.is_nan() {
            f64::INFINITY
        } else {
            total
        }
    }
}

fn validate(data: &[FitPoint], fixed: &FitFixed) -> Result<(), FitError> {
    if data.len() < 2 {
        return Err(FitError::TooFewPoints(data.len()));
    }
    if !(fixed.sideband_frequency >= 0.0 && fixed.sideband_frequency.is_finite()) {
        return Err(FitError::InvalidFixed {
            field: "sideband_frequency",
            value: fixed.sideband_frequency,
        });
    }
    if !(fixed.bandwidth > 0.0 && fixed.bandwidth.is_finite()) {
        return Err(FitError::InvalidFixed {
            field: "bandwidth",
            value: fixed.bandwidth,
        });
    }
    for (index, p) in data.iter().enumerate() {
        let bad = |reason: &str| FitError::InvalidPoint {
            index,
            reason: reason.to_string(),
        };
        if !(p.pump_power > 0.0 && p.pump_power.is_finite()) {
            return Err(bad("pump power must be > 0"));
        }
        if !(p.weight >= 0.0 && p.weight.is_finite()) {
            return Err(bad("weight must be finite and >= 0"));
        }
        if p.squeezing_db.is_none() && p.antisqueezing_db.is_none() {
            return Err(bad("no quadrature value"));
        }
        if p.squeezing_db.is_some_and(|v| !v.is_finite())
            || p.antisqueezing_db.is_some_and(|v| !v.is_finite())
        {
            return Err(bad("non-finite dB value"));
        }
    }
    let first = data[0].pump_power;
    if data.iter().all(|p| p.pump_power == first) {
        return Err(FitError::DegeneratePowers);
    }
    Ok(())
}

/// Fits C_eff and P_th with f and γ held fixed.
pub fn fit_opo_curve(data: &[FitPoint], fixed: FitFixed) -> Result<OpoFit, FitError> {
    validate(data, &fixed)?;
    let max_power = data.iter().map(|p| p.pump_power).fold(0.0, f64::max);
    let problem = Problem {
        data,
        omega: fixed.omega(),
        // Strictly above the largest power so every point stays below threshold.
        threshold_min: max_power * (1.0 + 1e-9),
        threshold_max: MAX_THRESHOLD_FACTOR * max_power,
    };

    let (ln_lo, ln_hi) = (problem.threshold_min.ln(), problem.threshold_max.ln());
    let mut seed = (1.0, problem.threshold_max);
    let mut seed_cost = f64::INFINITY;
    for i in 1..=GRID_C_STEPS {
        let c = i as f64 / GRID_C_STEPS as f64;
        for j in 0..GRID_P_STEPS {
            let t = (j as f64 + 0.5) / GRID_P_STEPS as f64;
            let p_th = (ln_lo + t * (ln_hi - ln_lo)).exp();
            let cost = problem.cost(c, p_th);
            if cost < seed_cost {
                seed_cost = cost;
                seed = (c, p_th);
            }
        }
    }

    let start = [seed.0, seed.1.ln()];
    let step = [
        -0.5 / GRID_C_STEPS as f64,
        0.5 * (ln_hi - ln_lo) / GRID_P_STEPS as f64,
    ];
    let result = simplex::minimize(
        |v| problem.cost(v[0], v[1].exp()),
        &start,
        &step,
        SimplexOptions::default(),
    );

    let c_eff = result.x[0];
    let threshold_power = result.x[1].exp();
    let count: f64 = data
        .iter()
        .map(|p| {
            p.weight * (p.squeezing_db.is_some() as u8 + p.antisqueezing_db.is_some() as u8) as f64
        })
        .sum();
    let rms_residual_db = if count > 0.0 {
        (result.value / count).sqrt()
    } else {
        0.0
    };
    let on_boundary = c_eff <= BOUNDARY_REL
        || c_eff >= 1.0 - BOUNDARY_REL
        || threshold_power <= problem.threshold_min * (1.0 + BOUNDARY_REL)
        || threshold_power >= problem.threshold_max * (1.0 - BOUNDARY_REL);

    Ok(OpoFit {
        c_eff,
        threshold_power,
        rms_residual_db,
        on_boundary,
        converged: result.converged,
        evaluations: result.evaluations,
    })
}

/// Forward model evaluated at the fitted parameters, returning (R₋ dB, R₊ dB).
pub fn fitted_curve(fit: &OpoFit, fixed: FitFixed, pump_power: f64) -> Option<(f64, f64)> {
    let x = (pump_power / fit.threshold_power).sqrt();
    squeezing_spectrum(fit.c_eff, x, fixed.omega())
        .ok()
        .map(|p| (p.squeezing_db(), p.antisqueezing_db()))
}
