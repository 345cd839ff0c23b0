//! Modeling and data reduction for fiber-coupled OPO squeezed-light sources.
//!
//! - [`optics`]: Gaussian beams, near-hemispherical cavity eigenmodes and
//!   fiber-to-cavity mode overlap.
//! - [`opo`]: below-threshold squeezing spectrum and its efficiency
//!   decomposition; [`fit`] fits it to squeezing-versus-power data.
//! - [`loss`]: loss chains, dark-noise and loss correction of measured
//!   quadrature variances.
//! - [`network`]: covariance-matrix simulation of squeezers, beam splitters,
//!   phase shifts and losses, with homodyne and Duan readouts.
//! - [`reference`]: built-in measured dataset for the three fiber setups.
//!
//! Variances are linear and in shot-noise units throughout (vacuum = 1).

// `!(x > 0.0)` is used on purpose so that NaN fails validation.
#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod fit;
pub mod loss;
pub mod network;
pub mod opo;
pub mod optics;
pub mod reference;
pub mod simplex;
pub mod units;

pub use fit::{fit_opo_curve, FitError, FitFixed, FitPoint, OpoFit};
pub use loss::{
    apply_loss, chain_efficiency, correction_pipeline, dark_noise_correct, unapply_loss,
    CorrectionTiers, LossChain, LossError, LossStage, MeasurementRecord, StageKind, Tier,
};
pub use network::{
    run_scenario, Gate, GaussianState, Homodyne, NetworkError, NetworkOutput, NetworkScenario,
};
pub use opo::{
    cavity_bandwidth, effective_efficiency, escape_efficiency, homodyne_trace, pump_ratio,
    squeezing_spectrum, OpoError, OpoParams, QuadraturePair,
};
pub use optics::{
    beam_radius_at, cavity_length_for_waist, confocal_crystal_length, gaussian_overlap,
    hemispherical_waist, paraxial_figure_of_merit, rayleigh_range, CavityGeometry,
    CavityLengthSolution, FiberMode, GaussianBeam, OpticsError,
};
pub use units::{db_to_linear, linear_to_db};
