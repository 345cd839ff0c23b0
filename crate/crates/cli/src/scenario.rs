//! Scenario file (JSON). Every dimensional key carries its unit as a suffix
//! (`_mm`, `_um`, `_nm`, `_mw`, `_mhz`, `_db`, `_rad`); unknown keys are
//! rejected.

use std::path::Path;

use serde::Deserialize;
use sha2::{Digest, Sha256};
use sqzkit_core::loss::{LossChain, LossStage, MeasurementRecord};
use sqzkit_core::network::{Gate, Homodyne, NetworkScenario};
use sqzkit_core::opo::{OpoParams, QuadraturePair};
use sqzkit_core::optics::DEFAULT_CRYSTAL_INDEX;
use sqzkit_core::reference::{self, DATASET_ID};

use crate::error::CliError;

#[derive(Debug, Clone, Deserialize, PartialEq)]
#[serde(deny_unknown_fields)]
pub struct Scenario {
    pub title: Option<String>,
    pub cavity: Option<CavitySection>,
    pub opo: Option<OpoSection>,
    pub losses: Option<LossesSection>,
    pub network: Option<NetworkSection>,
    pub fit: Option<FitSection>,
}

/// Quantities held fixed by the `fit` command.
#[derive(Debug, Clone, Deserialize, PartialEq)]
#[serde(deny_unknown_fields)]
pub struct FitSection {
    pub sideband_frequency_mhz: f64,
    pub bandwidth_mhz: f64,
    /// Powers at which to sample the fitted curve; defaults to the data powers.
    pub curve_powers_mw: Option<Vec<f64>>,
}

#[derive(Debug, Clone, Deserialize, PartialEq)]
#[serde(deny_unknown_fields)]
pub struct CavitySection {
    pub mirror_curvature_mm: f64,
    pub wavelength_nm: f64,
    /// Actual cavity length; when absent the length is solved per fiber.
    pub cavity_length_mm: Option<f64>,
    /// Crystal refractive index used for the useful interaction length.
    pub crystal_index: Option<f64>,
    pub fibers: Vec<FiberSpec>,
}

impl CavitySection {
    pub fn crystal_index(&self) -> f64 {
        self.crystal_index.unwrap_or(DEFAULT_CRYSTAL_INDEX)
    }
}

#[derive(Debug, Clone, Deserialize, PartialEq)]
#[serde(deny_unknown_fields)]
pub struct FiberSpec {
    pub name: String,
    pub waist_um: f64,
    pub overlap_discount: Option<f64>,
}

#[derive(Debug, Clone, Deserialize, PartialEq)]
#[serde(deny_unknown_fields)]
pub struct OpoSection {
    pub quantum_efficiency: f64,
    pub visibility: f64,
    pub propagation_efficiency: f64,
    pub escape_efficiency: Option<f64>,
    pub coupler_transmission: f64,
    pub round_trip_loss: f64,
    pub round_trip_length_mm: f64,
    pub threshold_power_mw: f64,
    pub sideband_frequency_mhz: f64,
    pub bandwidth_mhz: Option<f64>,
    pub pump_powers_mw: Vec<f64>,
    pub trace_angles_deg: Option<Vec<f64>>,
    pub trace_pump_power_mw: Option<f64>,
}

impl OpoSection {
    pub fn params(&self) -> Result<OpoParams, CliError> {
        let params = OpoParams {
            quantum_efficiency: self.quantum_efficiency,
            visibility: self.visibility,
            propagation_efficiency: self.propagation_efficiency,
            escape_efficiency: self.escape_efficiency,
            coupler_transmission: self.coupler_transmission,
            round_trip_loss: self.round_trip_loss,
            round_trip_length: self.round_trip_length_mm * 1e-3,
            threshold_power: self.threshold_power_mw * 1e-3,
            sideband_frequency: self.sideband_frequency_mhz * 1e6,
            bandwidth_override: self.bandwidth_mhz.map(|g| g * 1e6),
        };
        params
            .validate()
            .map_err(|e| CliError::input(format!("opo: {e}")))?;
        params
            .escape()
            .map_err(|e| CliError::input(format!("opo: {e}")))?;
        Ok(params)
    }
}

#[derive(Debug, Clone, Deserialize, PartialEq)]
#[serde(deny_unknown_fields)]
pub struct LossesSection {
    /// Use a built-in dataset instead of explicit setups.
    pub dataset: Option<String>,
    pub dark_clearance_db: Option<f64>,
    #[serde(default)]
    pub setups: Vec<SetupSpec>,
}

#[derive(Debug, Clone, Deserialize, PartialEq)]
#[serde(deny_unknown_fields)]
pub struct SetupSpec {
    pub setup: String,
    pub squeezing_db: f64,
    pub antisqueezing_db: f64,
    pub visibility: f64,
    pub sideband_frequency_mhz: f64,
    pub pump_power_mw: f64,
    /// Detection stages other than visibility, which comes from the record.
    pub detection: Vec<StageSpec>,
    pub source: Vec<StageSpec>,
    pub coupling: Vec<StageSpec>,
}

#[derive(Debug, Clone, Deserialize, PartialEq)]
#[serde(deny_unknown_fields)]
pub struct StageSpec {
    pub name: String,
    pub transmission: f64,
}

/// Record plus the three chains fed to the correction pipeline.
#[derive(Debug, Clone, PartialEq)]
pub struct CorrectionInput {
    pub record: MeasurementRecord,
    pub detection: LossChain,
    pub source: LossChain,
    pub coupling: LossChain,
}

fn chain(stages: &[StageSpec]) -> Result<LossChain, CliError> {
    stages
        .iter()
        .map(|s| LossStage::transmission(s.name.clone(), s.transmission).map_err(CliError::input))
        .collect::<Result<Vec<_>, _>>()
        .map(LossChain::new)
}

impl LossesSection {
    pub fn inputs(&self) -> Result<Vec<CorrectionInput>, CliError> {
        if let Some(id) = &self.dataset {
            if !self.setups.is_empty() || self.dark_clearance_db.is_some() {
                return Err(CliError::input(
                    "losses: `dataset` cannot be combined with explicit setups",
                ));
            }
            return builtin_dataset(id);
        }
        if self.setups.is_empty() {
            return Err(CliError::input(
                "losses: need `dataset` or at least one setup",
            ));
        }
        self.setups
            .iter()
            .map(|s| {
                let record = MeasurementRecord {
                    setup: s.setup.clone(),
                    squeezing_db: s.squeezing_db,
                    antisqueezing_db: s.antisqueezing_db,
                    visibility: s.visibility,
                    sideband_frequency: s.sideband_frequency_mhz * 1e6,
                    pump_power: s.pump_power_mw * 1e-3,
                };
                record.validate().map_err(CliError::input)?;
                let mut base = chain(&s.detection)?;
                if let Some(c) = self.dark_clearance_db {
                    base = base.with_dark_clearance(c).map_err(CliError::input)?;
                }
                Ok(CorrectionInput {
                    detection: record.detection_chain(&base).map_err(CliError::input)?,
                    source: chain(&s.source)?,
                    coupling: chain(&s.coupling)?,
                    record,
                })
            })
            .collect()
    }
}

pub fn builtin_dataset(id: &str) -> Result<Vec<CorrectionInput>, CliError> {
    if id != DATASET_ID {
        return Err(CliError::input(format!(
            "unknown dataset {id:?} (available: {DATASET_ID})"
        )));
    }
    Ok(reference::fiber_setups()
        .into_iter()
        .map(|s| CorrectionInput {
            detection: s.detection_chain(),
            source: s.source,
            coupling: s.coupling,
            record: s.record,
        })
        .collect())
}

#[derive(Debug, Clone, Deserialize, PartialEq)]
#[serde(deny_unknown_fields)]
pub struct SqueezerSpec {
    pub squeezed_variance: Option<f64>,
    pub antisqueezed_variance: Option<f64>,
    pub squeezing_db: Option<f64>,
    pub antisqueezing_db: Option<f64>,
}

impl SqueezerSpec {
    fn pair(&self) -> Result<QuadraturePair, CliError> {
        let pair = match (
            self.squeezed_variance,
            self.antisqueezed_variance,
            self.squeezing_db,
            self.antisqueezing_db,
        ) {
            (Some(s), Some(a), None, None) => QuadraturePair::new(s, a),
            (None, None, Some(s), Some(a)) => QuadraturePair::from_db(s, a),
            _ => {
                return Err(CliError::input(
                    "squeezer: give either squeezed_variance + antisqueezed_variance or squeezing_db + antisqueezing_db",
                ))
            }
        };
        pair.map_err(|e| CliError::input(format!("squeezer: {e}")))
    }
}

#[derive(Debug, Clone, Copy, Deserialize, PartialEq)]
#[serde(tag = "type", rename_all = "snake_case", deny_unknown_fields)]
pub enum GateSpec {
    Beamsplitter {
        i: usize,
        j: usize,
        transmittance: f64,
        phase_rad: f64,
    },
    PhaseShift {
        mode: usize,
        phase_rad: f64,
    },
    Loss {
        mode: usize,
        efficiency: f64,
    },
}

impl From<GateSpec> for Gate {
    fn from(g: GateSpec) -> Self {
        match g {
            GateSpec::Beamsplitter {
                i,
                j,
                transmittance,
                phase_rad,
            } => Gate::BeamSplitter {
                i,
                j,
                transmittance,
                phase: phase_rad,
            },
            GateSpec::PhaseShift { mode, phase_rad } => Gate::PhaseShift {
                mode,
                phase: phase_rad,
            },
            GateSpec::Loss { mode, efficiency } => Gate::Loss { mode, efficiency },
        }
    }
}

#[derive(Debug, Clone, Copy, Deserialize, PartialEq)]
#[serde(deny_unknown_fields)]
pub struct MeasurementSpec {
    pub mode: usize,
    pub angle_rad: f64,
}

#[derive(Debug, Clone, Copy, Deserialize, PartialEq, Eq)]
#[serde(rename_all = "snake_case")]
pub enum Preset {
    EprPair,
    BinaryTree,
}

#[derive(Debug, Clone, Deserialize, PartialEq)]
#[serde(deny_unknown_fields)]
pub struct NetworkSection {
    /// With a preset, a single squeezer is replicated on every mode.
    pub preset: Option<Preset>,
    pub squeezers: Vec<SqueezerSpec>,
    pub gates: Option<Vec<GateSpec>>,
    pub measurements: Option<Vec<MeasurementSpec>>,
}

impl NetworkSection {
    pub fn scenario(&self) -> Result<NetworkScenario, CliError> {
        let pairs = self
            .squeezers
            .iter()
            .map(SqueezerSpec::pair)
            .collect::<Result<Vec<_>, _>>()?;
        if pairs.is_empty() {
            return Err(CliError::input("network: need at least one squeezer"));
        }
        let mut scenario = match self.preset {
            Some(preset) => {
                if pairs.len() != 1 || self.gates.is_some() {
                    return Err(CliError::input(
                        "network: a preset takes exactly one squeezer and no explicit gates",
                    ));
                }
                match preset {
                    Preset::EprPair => NetworkScenario::epr_pair(pairs[0]),
                    Preset::BinaryTree => NetworkScenario::binary_tree(pairs[0]),
                }
            }
            None => NetworkScenario {
                squeezers: pairs,
                gates: self
                    .gates
                    .as_deref()
                    .unwrap_or_default()
                    .iter()
                    .map(|&g| g.into())
                    .collect(),
                measurements: Vec::new(),
            },
        };
        if let Some(ms) = &self.measurements {
            scenario.measurements = ms
                .iter()
                .map(|m| Homodyne {
                    mode: m.mode,
                    angle: m.angle_rad,
                })
                .collect();
        } else if self.preset.is_none() {
            scenario.measurements = (0..scenario.squeezers.len())
                .map(|mode| Homodyne { mode, angle: 0.0 })
                .collect();
        }
        let n = scenario.squeezers.len();
        if let Some(m) = scenario.measurements.iter().find(|m| m.mode >= n) {
            return Err(CliError::input(format!(
                "network: measurement mode {} out of range for {n} modes",
                m.mode
            )));
        }
        Ok(scenario)
    }
}

/// Parsed scenario with the SHA-256 of its source bytes.
#[derive(Debug, Clone)]
pub struct LoadedScenario {
    pub scenario: Scenario,
    pub digest: String,
}

pub fn parse(text: &str) -> Result<LoadedScenario, CliError> {
    let scenario: Scenario =
        serde_json::from_str(text).map_err(|e| CliError::input(format!("scenario: {e}")))?;
    let digest = Sha256::digest(text.as_bytes())
        .iter()
        .map(|b| format!("{b:02x}"))
        .collect();
    Ok(LoadedScenario { scenario, digest })
}

pub fn load(path: &Path) -> Result<LoadedScenario, CliError> {
    let text = std::fs::read_to_string(path).map_err(|source| CliError::Io {
        path: path.display().to_string(),
        source,
    })?;
    parse(&text)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn unknown_keys_are_rejected() {
        let err =
            parse(r#"{"cavity": {"mirror_curvature": 5, "wavelength_nm": 1064, "fibers": []}}"#)
                .unwrap_err();
        assert!(err.to_string().contains("mirror_curvature"), "{err}");
        assert!(parse(r#"{"extra": 1}"#).is_err());
    }

    #[test]
    fn missing_unit_keys_are_errors() {
        let err = parse(r#"{"cavity": {"wavelength_nm": 1064, "fibers": []}}"#).unwrap_err();
        assert!(err.to_string().contains("mirror_curvature_mm"), "{err}");
    }

    #[test]
    fn gate_specs_parse() {
        let s = parse(
            r#"{"network": {"squeezers": [{"squeezed_variance": 0.5, "antisqueezed_variance": 2.0},
                                         {"squeezing_db": -3.0103, "antisqueezing_db": 3.0103}],
                            "gates": [{"type": "phase_shift", "mode": 1, "phase_rad": 1.5707963267948966},
                                      {"type": "beamsplitter", "i": 0, "j": 1, "transmittance": 0.5, "phase_rad": 0}]}}"#,
        )
        .unwrap();
        let net = s.scenario.network.unwrap().scenario().unwrap();
        assert_eq!(net.gates.len(), 2);
        assert_eq!(net.measurements.len(), 2);
        assert!(parse(
            r#"{"network": {"squeezers": [], "gates": [{"type": "loss", "mode": 0, "eta": 0.5}]}}"#
        )
        .is_err());
    }

    #[test]
    fn squeezer_needs_one_complete_form() {
        let s = parse(
            r#"{"network": {"squeezers": [{"squeezed_variance": 0.5, "squeezing_db": -3}]}}"#,
        )
        .unwrap();
        assert!(s.scenario.network.unwrap().scenario().is_err());
    }

    #[test]
    fn dataset_reference_loads() {
        let s = parse(r#"{"losses": {"dataset": "paper-2017-fiber-opo"}}"#).unwrap();
        assert_eq!(s.scenario.losses.unwrap().inputs().unwrap().len(), 3);
        let s = parse(r#"{"losses": {"dataset": "nope"}}"#).unwrap();
        assert!(s.scenario.losses.unwrap().inputs().is_err());
    }

    #[test]
    fn digest_is_stable() {
        let a = parse("{}").unwrap();
        let b = parse("{}").unwrap();
        assert_eq!(a.digest, b.digest);
        assert_eq!(a.digest.len(), 64);
    }
}
