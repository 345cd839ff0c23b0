//! Built-in reference dataset for the three fiber-coupled squeezers
//! (standard fiber, photonic-crystal fiber, tapered fiber) and the published
//! values the toolkit is checked against.

use crate::loss::{LossChain, LossStage, MeasurementRecord};
use crate::opo::OpoParams;

/// Identifier of the built-in dataset.
pub const DATASET_ID: &str = "paper-2017-fiber-opo";

pub const WAVELENGTH: f64 = 1.064e-6;
pub const MIRROR_CURVATURE: f64 = 5e-3;

pub const DETECTOR_QUANTUM_EFFICIENCY: f64 = 0.92;
pub const FIBER_EXIT_TRANSMISSION: f64 = 0.96;
pub const HOMODYNE_OPTICS_TRANSMISSION: f64 = 0.98;
pub const DARK_CLEARANCE_DB: f64 = 8.0;
/// Absolute uncertainty on the crystal-reflection transmission.
pub const CRYSTAL_REFLECTION_UNCERTAINTY: f64 = 0.02;

/// Published (squeezing, antisqueezing) in dB.
pub type DbPair = (f64, f64);

#[derive(Debug, Clone, PartialEq)]
pub struct PublishedTiers {
    pub detection: DbPair,
    /// Absent where the source correction is trivial.
    pub source: Option<DbPair>,
    pub coupling: DbPair,
}

#[derive(Debug, Clone, PartialEq)]
pub struct SetupData {
    pub record: MeasurementRecord,
    /// Cavity waist set by the fiber mode (m).
    pub cavity_waist: f64,
    /// Measured fiber-to-cavity coupling from the transmission peak areas.
    pub measured_coupling: f64,
    /// Detection stages without visibility; see [`MeasurementRecord::detection_chain`].
    pub detection_base: LossChain,
    pub source: LossChain,
    pub coupling: LossChain,
    pub published: PublishedTiers,
}

impl SetupData {
    pub fn detection_chain(&self) -> LossChain {
        self.record
            .detection_chain(&self.detection_base)
            .expect("reference visibility is valid")
    }
}

fn stage(name: &str, value: f64) -> LossStage {
    LossStage::transmission(name, value).expect("reference stage is valid")
}

fn detection_base() -> LossChain {
    LossChain::new(vec![
        stage("quantum_efficiency", DETECTOR_QUANTUM_EFFICIENCY),
        stage("fiber_exit", FIBER_EXIT_TRANSMISSION),
        stage("homodyne_optics", HOMODYNE_OPTICS_TRANSMISSION),
    ])
    .with_dark_clearance(DARK_CLEARANCE_DB)
    .expect("reference clearance is valid")
}

fn record(
    setup: &str,
    s: f64,
    a: f64,
    visibility: f64,
    f_mhz: f64,
    p_mw: f64,
) -> MeasurementRecord {
    MeasurementRecord {
        setup: setup.into(),
        squeezing_db: s,
        antisqueezing_db: a,
        visibility,
        sideband_frequency: f_mhz * 1e6,
        pump_power: p_mw * 1e-3,
    }
}

/// Measured values, loss figures and published corrections for SF, PCF and TF.
pub fn fiber_setups() -> Vec<SetupData> {
    vec![
        SetupData {
            record: record("SF", -0.56, 1.05, 0.96, 3.0, 70.0),
            cavity_waist: 3.1e-6,
            measured_coupling: 0.60,
            detection_base: detection_base(),
            source: LossChain::new(vec![stage("crystal_reflection", 1.0)]),
            coupling: LossChain::new(vec![stage("cavity_coupling", 0.60)]),
            published: PublishedTiers {
                detection: (-0.85, 1.5),
                source: None,
                coupling: (-1.6, 2.25),
            },
        },
        SetupData {
            record: record("PCF", -0.90, 1.8, 0.92, 3.0, 100.0),
            cavity_waist: 7.5e-6,
            measured_coupling: 0.88,
            detection_base: detection_base(),
            source: LossChain::new(vec![stage("crystal_reflection", 0.88)]),
            coupling: LossChain::new(vec![stage("cavity_coupling", 0.78)]),
            published: PublishedTiers {
                detection: (-1.6, 2.6),
                source: Some((-1.8, 2.9)),
                coupling: (-2.5, 3.5),
            },
        },
        SetupData {
            record: record("TF", -1.0, 3.5, 0.98, 5.0, 15.0),
            cavity_waist: 6.5e-6,
            measured_coupling: 0.89,
            detection_base: detection_base(),
            source: LossChain::new(vec![
                stage("splice", 0.88),
                stage("crystal_reflection", 0.60),
            ]),
            coupling: LossChain::new(vec![stage("cavity_coupling", 0.79)]),
            published: PublishedTiers {
                detection: (-1.5, 4.4),
                source: Some((-3.5, 6.4)),
                coupling: (-5.3, 7.2),
            },
        },
    ]
}

/// Tapered-fiber OPO parameters with the worked-example inputs.
/// The coupler transmission is 0.85 as used numerically in the model check.
pub fn tapered_fiber_opo() -> OpoParams {
    OpoParams {
        quantum_efficiency: DETECTOR_QUANTUM_EFFICIENCY,
        visibility: 0.98,
        propagation_efficiency: 0.39,
        escape_efficiency: None,
        coupler_transmission: 0.85,
        round_trip_loss: 0.01,
        round_trip_length: 5e-3,
        threshold_power: 0.090,
        sideband_frequency: 5e6,
        bandwidth_override: None,
    }
}

/// Pump power of the worked example (W).
pub const TAPERED_FIBER_PUMP: f64 = 0.015;
/// Published worked-example result (dB).
pub const TAPERED_FIBER_MODEL_DB: DbPair = (-1.4, 4.0);

/// Parameters of the squeezing-versus-power fits.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PowerFitReference {
    pub setup: &'static str,
    pub c_eff: f64,
    /// Hz
    pub bandwidth: f64,
    /// Hz
    pub sideband_frequency: f64,
    /// W
    pub threshold_power: f64,
    /// Measured point checked against the fit: (W, squeezing dB).
    pub point: (f64, f64),
}

pub fn power_fits() -> [PowerFitReference; 2] {
    [
        PowerFitReference {
            setup: "SF",
            c_eff: 0.2,
            bandwidth: 800e6,
            sideband_frequency: 3e6,
            threshold_power: 1.2,
            point: (0.070, -0.56),
        },
        PowerFitReference {
            setup: "PCF",
            c_eff: 0.2,
            bandwidth: 800e6,
            sideband_frequency: 3e6,
            threshold_power: 0.38,
            point: (0.100, -0.90),
        },
    ]
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn dataset_is_well_formed() {
        let setups = fiber_setups();
        assert_eq!(setups.len(), 3);
        for s in &setups {
            s.record.validate().unwrap();
            assert_eq!(s.detection_chain().stages.len(), 4);
        }
        tapered_fiber_opo().validate().unwrap();
    }
}
