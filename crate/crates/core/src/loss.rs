//! Loss chains and measurement correction.
//!
//! A loss of power transmission η maps a quadrature variance V (shot-noise
//! units) to ηV + (1 − η). Correction runs that map backwards, after first
//! removing electronic (dark) noise from the measured variance.

use std::fmt;

use thiserror::Error;

use crate::opo::QuadraturePair;
use crate::units::db_to_linear;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum LossError {
    #[error("stage {name:?}: transmission {value} must lie in (0, 1]")]
    InvalidTransmission { name: String, value: f64 },
    #[error("variance {variance} must be > 0")]
    InvalidVariance { variance: f64 },
    #[error("nonphysical correction: variance {variance} <= 1 - eta = {floor}")]
    Nonphysical { variance: f64, floor: f64 },
    #[error("measured variance {variance} does not exceed dark-noise variance {dark}")]
    BelowDark { variance: f64, dark: f64 },
    #[error("dark-noise clearance {0} dB must be >= 0")]
    InvalidClearance(f64),
    #[error("{tier}, {quadrature}: {source}")]
    Pipeline {
        tier: Tier,
        quadrature: Quadrature,
        #[source]
        source: Box<LossError>,
    },
    #[error("invalid record: {0}")]
    InvalidRecord(String),
}

/// How a stage's value enters the chain product.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum StageKind {
    /// Power transmission, used as is.
    Transmission,
    /// Mode-overlap visibility ξ, used as ξ².
    Visibility,
}

#[derive(Debug, Clone, PartialEq)]
pub struct LossStage {
    pub name: String,
    pub value: f64,
    pub kind: StageKind,
}

impl LossStage {
    pub fn transmission(name: impl Into<String>, value: f64) -> Result<Self, LossError> {
        Self::with_kind(name, value, StageKind::Transmission)
    }

    pub fn visibility(name: impl Into<String>, value: f64) -> Result<Self, LossError> {
        Self::with_kind(name, value, StageKind::Visibility)
    }

    pub fn with_kind(
        name: impl Into<String>,
        value: f64,
        kind: StageKind,
    ) -> Result<Self, LossError> {
        let name = name.into();
        if !(value > 0.0 && value <= 1.0) {
            return Err(LossError::InvalidTransmission { name, value });
        }
        Ok(Self { name, value, kind })
    }

    /// Power efficiency contributed by this stage.
    pub fn efficiency(&self) -> f64 {
        match self.kind {
            StageKind::Transmission => self.value,
            StageKind::Visibility => self.value * self.value,
        }
    }
}

/// Ordered loss stages plus an optional dark-noise clearance (dB below shot noise).
#[derive(Debug, Clone, PartialEq, Default)]
pub struct LossChain {
    pub stages: Vec<LossStage>,
    pub dark_clearance_db: Option<f64>,
}

impl LossChain {
    pub fn new(stages: Vec<LossStage>) -> Self {
        Self {
            stages,
            dark_clearance_db: None,
        }
    }

    pub fn with_dark_clearance(mut self, clearance_db: f64) -> Result<Self, LossError> {
        if !(clearance_db >= 0.0) {
            return Err(LossError::InvalidClearance(clearance_db));
        }
        self.dark_clearance_db = Some(clearance_db);
        Ok(self)
    }

    pub fn push(&mut self, stage: LossStage) {
        self.stages.push(stage);
    }

    pub fn stage_mut(&mut self, name: &str) -> Option<&mut LossStage> {
        self.stages.iter_mut().find(|s| s.name == name)
    }

    pub fn efficiency(&self) -> f64 {
        chain_efficiency(self)
    }
}

/// Product of stage efficiencies; 1 for an empty chain.
pub fn chain_efficiency(chain: &LossChain) -> f64 {
    chain.stages.iter().map(LossStage::efficiency).product()
}

/// ηV + (1 − η).
pub fn apply_loss(variance: f64, eta: f64) -> f64 {
    eta * variance + (1.0 - eta)
}

/// (V − (1 − η))/η, the inverse of [`apply_loss`].
pub fn unapply_loss(variance: f64, eta: f64) -> Result<f64, LossError> {
    if !(variance > 0.0) {
        return Err(LossError::InvalidVariance { variance });
    }
    let floor = 1.0 - eta;
    if variance <= floor {
        return Err(LossError::Nonphysical { variance, floor });
    }
    Ok((variance - floor) / eta)
}

/// Removes electronic noise sitting `clearance_db` below shot noise and
/// renormalizes to the dark-subtracted shot noise.
pub fn dark_noise_correct(measured: f64, clearance_db: f64) -> Result<f64, LossError> {
    if !(clearance_db >= 0.0) {
        return Err(LossError::InvalidClearance(clearance_db));
    }
    if clearance_db.is_infinite() {
        return Ok(measured);
    }
    let dark = db_to_linear(-clearance_db);
    if measured <= dark {
        return Err(LossError::BelowDark {
            variance: measured,
            dark,
        });
    }
    Ok((measured - dark) / (1.0 - dark))
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Tier {
    /// Detection: dark noise, quantum efficiency, visibility, optics.
    Detection,
    /// Source: fiber splice and first-reflection losses.
    Source,
    /// Fiber-to-cavity mode coupling.
    Coupling,
}

impl fmt::Display for Tier {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Tier::Detection => "tier 1 (detection)",
            Tier::Source => "tier 2 (source)",
            Tier::Coupling => "tier 3 (coupling)",
        })
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Quadrature {
    Squeezed,
    Antisqueezed,
}

impl fmt::Display for Quadrature {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Quadrature::Squeezed => "squeezed quadrature",
            Quadrature::Antisqueezed => "antisqueezed quadrature",
        })
    }
}

/// A measured squeezing result as reported by the homodyne detector.
#[derive(Debug, Clone, PartialEq)]
pub struct MeasurementRecord {
    pub setup: String,
    pub squeezing_db: f64,
    pub antisqueezing_db: f64,
    pub visibility: f64,
    /// Hz
    pub sideband_frequency: f64,
    /// W
    pub pump_power: f64,
}

impl MeasurementRecord {
    pub fn validate(&self) -> Result<(), LossError> {
        if !(self.squeezing_db <= 0.0 && self.antisqueezing_db >= 0.0) {
            return Err(LossError::InvalidRecord(format!(
                "{}: need squeezing_db <= 0 <= antisqueezing_db, got {} / {}",
                self.setup, self.squeezing_db, self.antisqueezing_db
            )));
        }
        if !(self.visibility > 0.0 && self.visibility <= 1.0) {
            return Err(LossError::InvalidRecord(format!(
                "{}: visibility {} must lie in (0, 1]",
                self.setup, self.visibility
            )));
        }
        Ok(())
    }

    pub fn measured(&self) -> QuadraturePair {
        QuadraturePair {
            squeezed: db_to_linear(self.squeezing_db),
            antisqueezed: db_to_linear(self.antisqueezing_db),
        }
    }

    /// Detection chain for this record: the record's visibility (as ξ²)
    /// followed by `base` stages, keeping `base`'s dark-noise clearance.
    pub fn detection_chain(&self, base: &LossChain) -> Result<LossChain, LossError> {
        let mut stages = vec![LossStage::visibility("visibility", self.visibility)?];
        stages.extend(base.stages.iter().cloned());
        Ok(LossChain {
            stages,
            dark_clearance_db: base.dark_clearance_db,
        })
    }
}

/// Corrected quadratures after each successive tier.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct CorrectionTiers {
    pub detection: QuadraturePair,
    pub source: QuadraturePair,
    pub coupling: QuadraturePair,
}

impl CorrectionTiers {
    pub fn tier(&self, tier: Tier) -> &QuadraturePair {
        match tier {
            Tier::Detection => &self.detection,
            Tier::Source => &self.source,
            Tier::Coupling => &self.coupling,
        }
    }
}

fn correct_one(variance: f64, chain: &LossChain, dark: bool) -> Result<f64, LossError> {
    let mut v = variance;
    if dark {
        if let Some(clearance) = chain.dark_clearance_db {
            v = dark_noise_correct(v, clearance)?;
        }
    }
    unapply_loss(v, chain_efficiency(chain))
}

/// Undoes detection, source and coupling losses in that order. Dark noise
/// (carried by the detection chain) is removed before any efficiency, and
/// both quadratures go through the same map.
pub fn correction_pipeline(
    record: &MeasurementRecord,
    detection: &LossChain,
    source: &LossChain,
    coupling: &LossChain,
) -> Result<CorrectionTiers, LossError> {
    record.validate()?;
    let measured = record.measured();
    let run = |quadrature: Quadrature, v0: f64| -> Result<[f64; 3], LossError> {
        let wrap = |tier| {
            move |e| LossError::Pipeline {
                tier,
                quadrature,
                source: Box::new(e),
            }
        };
        let v1 = correct_one(v0, detection, true).map_err(wrap(Tier::Detection))?;
        let v2 = correct_one(v1, source, false).map_err(wrap(Tier::Source))?;
        let v3 = correct_one(v2, coupling, false).map_err(wrap(Tier::Coupling))?;
        Ok([v1, v2, v3])
    };
    let s = run(Quadrature::Squeezed, measured.squeezed)?;
    let a = run(Quadrature::Antisqueezed, measured.antisqueezed)?;
    let pair = |i: usize| QuadraturePair {
        squeezed: s[i],
        antisqueezed: a[i],
    };
    Ok(CorrectionTiers {
        detection: pair(0),
        source: pair(1),
        coupling: pair(2),
    })
}
