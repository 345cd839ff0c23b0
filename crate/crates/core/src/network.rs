//! Covariance-matrix simulation of small Gaussian networks of squeezers.
//!
//! Units: shot noise. The vacuum covariance is the identity, so a quadrature
//! variance of 0.5 is 3 dB of squeezing. Quadratures are interleaved as
//! (x₁, p₁, x₂, p₂, …). A passive element acting on a mode annihilation
//! operator as a → (a_r + i a_i)·a maps (x, p) through the rotation-scaling
//! block [[a_r, −a_i], [a_i, a_r]].

use std::f64::consts::FRAC_PI_2;

use nalgebra::{DMatrix, DVector, Matrix2, Matrix4, SymmetricEigen};
use thiserror::Error;

use crate::opo::QuadraturePair;

/// Tolerance on symplectic eigenvalues when checking physicality.
pub const PHYSICALITY_TOL: f64 = 1e-9;
/// Duan sum for separable states is at least this value.
pub const DUAN_SEPARABLE_BOUND: f64 = 4.0;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum NetworkError {
    #[error("mode {mode} out of range for a {count}-mode state")]
    ModeOutOfRange { mode: usize, count: usize },
    #[error("two-mode operation needs distinct modes, got {0} twice")]
    SameMode(usize),
    #[error("invalid {field}: {value} ({constraint})")]
    InvalidParameter {
        field: &'static str,
        value: f64,
        constraint: &'static str,
    },
    #[error("covariance is not a physical state: {0}")]
    Unphysical(String),
    #[error("gate {index}: {source}")]
    Gate {
        index: usize,
        #[source]
        source: Box<NetworkError>,
    },
    #[error("network needs at least one squeezer")]
    Empty,
}

fn unit_interval(field: &'static str, value: f64) -> Result<(), NetworkError> {
    if (0.0..=1.0).contains(&value) {
        Ok(())
    } else {
        Err(NetworkError::InvalidParameter {
            field,
            value,
            constraint: "must lie in [0, 1]",
        })
    }
}

/// Canonical antisymmetric form ⊕ [[0, 1], [−1, 0]] for `modes` modes.
pub fn symplectic_form(modes: usize) -> DMatrix<f64> {
    let mut omega = DMatrix::zeros(2 * modes, 2 * modes);
    for k in 0..modes {
        omega[(2 * k, 2 * k + 1)] = 1.0;
        omega[(2 * k + 1, 2 * k)] = -1.0;
    }
    omega
}

/// Phase rotation a → e^{iφ} a.
pub fn phase_shift_matrix(phi: f64) -> Matrix2<f64> {
    let (s, c) = phi.sin_cos();
    Matrix2::new(c, -s, s, c)
}

/// Beam splitter on modes (i, j):
/// a_i → √t a_i + √(1−t) e^{iφ} a_j,  a_j → −√(1−t) e^{−iφ} a_i + √t a_j.
pub fn beamsplitter_matrix(transmittance: f64, phase: f64) -> Matrix4<f64> {
    let tau = transmittance.sqrt();
    let r = (1.0 - transmittance).max(0.0).sqrt();
    let (s, c) = phase.sin_cos();
    let mut m = Matrix4::zeros();
    m.fixed_view_mut::<2, 2>(0, 0)
        .copy_from(&(Matrix2::identity() * tau));
    m.fixed_view_mut::<2, 2>(2, 2)
        .copy_from(&(Matrix2::identity() * tau));
    m.fixed_view_mut::<2, 2>(0, 2)
        .copy_from(&(Matrix2::new(c, -s, s, c) * r));
    // −e^{−iφ}
    m.fixed_view_mut::<2, 2>(2, 0)
        .copy_from(&(Matrix2::new(-c, -s, s, -c) * r));
    m
}

#[derive(Debug, Clone, PartialEq)]
pub struct GaussianState {
    covariance: DMatrix<f64>,
    mean: DVector<f64>,
}

impl GaussianState {
    /// N-mode vacuum.
    pub fn vacuum(modes: usize) -> Self {
        assert!(modes >= 1, "a state needs at least one mode");
        Self {
            covariance: DMatrix::identity(2 * modes, 2 * modes),
            mean: DVector::zeros(2 * modes),
        }
    }

    /// Single-mode squeezed vacuum with x-variance R₋ and p-variance R₊.
    pub fn squeezed_vacuum(squeezed: f64, antisqueezed: f64) -> Result<Self, NetworkError> {
        if !(squeezed > 0.0 && squeezed <= 1.0 && antisqueezed >= 1.0 && antisqueezed.is_finite()) {
            return Err(NetworkError::InvalidParameter {
                field: "squeezed/antisqueezed variance",
                value: squeezed,
                constraint: "need 0 < R- <= 1 <= R+",
            });
        }
        Ok(Self {
            covariance: DMatrix::from_diagonal(&DVector::from_vec(vec![squeezed, antisqueezed])),
            mean: DVector::zeros(2),
        })
    }

    pub fn from_pair(pair: &QuadraturePair) -> Result<Self, NetworkError> {
        Self::squeezed_vacuum(pair.squeezed, pair.antisqueezed)
    }

    /// Validates symmetry, positive definiteness and the uncertainty principle.
    pub fn from_covariance(covariance: DMatrix<f64>) -> Result<Self, NetworkError> {
        let n = covariance.nrows();
        if n == 0 || !n.is_multiple_of(2) || covariance.ncols() != n {
            return Err(NetworkError::Unphysical(format!(
                "covariance must be 2N x 2N, got {}x{}",
                n,
                covariance.ncols()
            )));
        }
        let scale = covariance.amax().max(1.0);
        if (&covariance - covariance.transpose()).amax() > 1e-12 * scale {
            return Err(NetworkError::Unphysical(
                "covariance is not symmetric".into(),
            ));
        }
        let state = Self {
            mean: DVector::zeros(n),
            covariance,
        };
        let min_eig = SymmetricEigen::new(state.covariance.clone())
            .eigenvalues
            .min();
        if !(min_eig > 0.0) {
            return Err(NetworkError::Unphysical(format!(
                "covariance is not positive definite (smallest eigenvalue {min_eig})"
            )));
        }
        let nu = state.symplectic_eigenvalues()[0];
        if nu < 1.0 - PHYSICALITY_TOL {
            return Err(NetworkError::Unphysical(format!(
                "smallest symplectic eigenvalue {nu} < 1"
            )));
        }
        Ok(state)
    }

    pub fn with_mean(mut self, mean: DVector<f64>) -> Result<Self, NetworkError> {
        if mean.len() != self.mean.len() {
            return Err(NetworkError::InvalidParameter {
                field: "mean length",
                value: mean.len() as f64,
                constraint: "must equal 2N",
            });
        }
        self.mean = mean;
        Ok(self)
    }

    /// Tensor product of independent states, modes in order.
    pub fn product(states: &[GaussianState]) -> Result<Self, NetworkError> {
        if states.is_empty() {
            return Err(NetworkError::Empty);
        }
        let dim: usize = states.iter().map(|s| s.covariance.nrows()).sum();
        let mut covariance = DMatrix::zeros(dim, dim);
        let mut mean = DVector::zeros(dim);
        let mut offset = 0;
        for s in states {
            let k = s.covariance.nrows();
            covariance
                .view_mut((offset, offset), (k, k))
                .copy_from(&s.covariance);
            mean.rows_mut(offset, k).copy_from(&s.mean);
            offset += k;
        }
        Ok(Self { covariance, mean })
    }

    pub fn mode_count(&self) -> usize {
        self.covariance.nrows() / 2
    }

    pub fn covariance(&self) -> &DMatrix<f64> {
        &self.covariance
    }

    pub fn mean(&self) -> &DVector<f64> {
        &self.mean
    }

    fn check_mode(&self, mode: usize) -> Result<(), NetworkError> {
        if mode < self.mode_count() {
            Ok(())
        } else {
            Err(NetworkError::ModeOutOfRange {
                mode,
                count: self.mode_count(),
            })
        }
    }

    fn check_pair(&self, i: usize, j: usize) -> Result<(), NetworkError> {
        self.check_mode(i)?;
        self.check_mode(j)?;
        if i == j {
            return Err(NetworkError::SameMode(i));
        }
        Ok(())
    }

    /// Symplectic eigenvalues in ascending order; all ≥ 1 for a physical
    /// state and all equal to 1 for a pure one.
    pub fn symplectic_eigenvalues(&self) -> Vec<f64> {
        let n = self.mode_count();
        let omega = symplectic_form(n);
        // With Σ = L Lᵀ, K = Lᵀ Ω L is antisymmetric and similar to ΩΣ, so the
        // eigenvalues of KᵀK are ν², each appearing twice. Only eigenvalues are
        // taken from the symmetric solver.
        let Some(chol) = self.covariance.clone().cholesky() else {
            return vec![0.0; n];
        };
        let l = chol.l();
        let k = l.transpose() * omega * &l;
        let inner = k.transpose() * &k;
        let inner = (&inner + inner.transpose()) * 0.5;
        let mut squares: Vec<f64> = SymmetricEigen::new(inner)
            .eigenvalues
            .iter()
            .copied()
            .collect();
        squares.sort_by(f64::total_cmp);
        squares.chunks(2).map(|c| c[0].max(0.0).sqrt()).collect()
    }

    pub fn is_physical(&self) -> bool {
        self.symplectic_eigenvalues()
            .first()
            .is_some_and(|&nu| nu >= 1.0 - PHYSICALITY_TOL)
    }

    /// Conjugates by a symplectic block acting on `modes` (in order).
    fn apply_block(&self, block: &DMatrix<f64>, modes: &[usize]) -> Self {
        let dim = self.covariance.nrows();
        let mut s = DMatrix::identity(dim, dim);
        for (bi, &mi) in modes.iter().enumerate() {
            for (bj, &mj) in modes.iter().enumerate() {
                for a in 0..2 {
                    for b in 0..2 {
                        s[(2 * mi + a, 2 * mj + b)] = block[(2 * bi + a, 2 * bj + b)];
                    }
                }
            }
        }
        Self {
            covariance: &s * &self.covariance * s.transpose(),
            mean: &s * &self.mean,
        }
    }

    pub fn apply_beamsplitter(
        &self,
        i: usize,
        j: usize,
        transmittance: f64,
        phase: f64,
    ) -> Result<Self, NetworkError> {
        self.check_pair(i, j)?;
        unit_interval("transmittance", transmittance)?;
        let block = beamsplitter_matrix(transmittance, phase);
        Ok(self.apply_block(&DMatrix::from_column_slice(4, 4, block.as_slice()), &[i, j]))
    }

    pub fn apply_phase_shift(&self, mode: usize, phi: f64) -> Result<Self, NetworkError> {
        self.check_mode(mode)?;
        let block = phase_shift_matrix(phi);
        Ok(self.apply_block(&DMatrix::from_column_slice(2, 2, block.as_slice()), &[mode]))
    }

    /// Pure loss of power transmission η on one mode: Σ → XΣX + (1−η)·I_mode
    /// with X = √η on the mode.
    pub fn apply_loss_channel(&self, mode: usize, eta: f64) -> Result<Self, NetworkError> {
        self.check_mode(mode)?;
        unit_interval("efficiency", eta)?;
        let root = eta.sqrt();
        let mut covariance = self.covariance.clone();
        let mut mean = self.mean.clone();
        for q in [2 * mode, 2 * mode + 1] {
            covariance.row_mut(q).scale_mut(root);
            covariance.column_mut(q).scale_mut(root);
            covariance[(q, q)] += 1.0 - eta;
            mean[q] *= root;
        }
        Ok(Self { covariance, mean })
    }

    /// Variance of cosθ·x + sinθ·p on `mode`.
    pub fn homodyne_variance(&self, mode: usize, theta: f64) -> Result<f64, NetworkError> {
        self.check_mode(mode)?;
        let (s, c) = theta.sin_cos();
        let (x, p) = (2 * mode, 2 * mode + 1);
        let cov = &self.covariance;
        Ok(c * c * cov[(x, x)] + 2.0 * s * c * cov[(x, p)] + s * s * cov[(p, p)])
    }

    /// Δ²(x_i − x_j) + Δ²(p_i + p_j). Values below 4 witness entanglement.
    pub fn duan_value(&self, i: usize, j: usize) -> Result<f64, NetworkError> {
        self.check_pair(i, j)?;
        let cov = &self.covariance;
        let (xi, pi, xj, pj) = (2 * i, 2 * i + 1, 2 * j, 2 * j + 1);
        let x_minus = cov[(xi, xi)] + cov[(xj, xj)] - 2.0 * cov[(xi, xj)];
        let p_plus = cov[(pi, pi)] + cov[(pj, pj)] + 2.0 * cov[(pi, pj)];
        Ok(x_minus + p_plus)
    }

    /// Duan value minimized over a local phase rotation ψ of mode `j`;
    /// returns (value, ψ).
    ///
    /// The Duan sum with mode j rotated by ψ has the form A + B cos ψ + C sin ψ,
    /// so the minimum is A − √(B² + C²).
    pub fn optimal_duan_value(&self, i: usize, j: usize) -> Result<(f64, f64), NetworkError> {
        self.check_pair(i, j)?;
        let a = self.apply_phase_shift(j, 0.0)?.duan_value(i, j)?;
        let at_half_pi = self.apply_phase_shift(j, FRAC_PI_2)?.duan_value(i, j)?;
        let at_pi = self
            .apply_phase_shift(j, std::f64::consts::PI)?
            .duan_value(i, j)?;
        let offset = 0.5 * (a + at_pi);
        let b = a - offset;
        let c = at_half_pi - offset;
        let amp = b.hypot(c);
        let psi = if amp > 0.0 { (-c).atan2(-b) } else { 0.0 };
        Ok((offset - amp, psi))
    }
}

/// An element of a network, applied in order.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum Gate {
    BeamSplitter {
        i: usize,
        j: usize,
        transmittance: f64,
        phase: f64,
    },
    PhaseShift {
        mode: usize,
        phase: f64,
    },
    Loss {
        mode: usize,
        efficiency: f64,
    },
}

impl Gate {
    pub fn apply(&self, state: &GaussianState) -> Result<GaussianState, NetworkError> {
        match *self {
            Gate::BeamSplitter {
                i,
                j,
                transmittance,
                phase,
            } => state.apply_beamsplitter(i, j, transmittance, phase),
            Gate::PhaseShift { mode, phase } => state.apply_phase_shift(mode, phase),
            Gate::Loss { mode, efficiency } => state.apply_loss_channel(mode, efficiency),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Homodyne {
    pub mode: usize,
    /// LO phase (rad); 0 reads the x quadrature.
    pub angle: f64,
}

/// Squeezers (one per mode), gates, then homodyne readouts.
#[derive(Debug, Clone, PartialEq, Default)]
pub struct NetworkScenario {
    pub squeezers: Vec<QuadraturePair>,
    pub gates: Vec<Gate>,
    pub measurements: Vec<Homodyne>,
}

impl NetworkScenario {
    /// Two squeezers with a 90° relative phase combined on a balanced beam
    /// splitter.
    pub fn epr_pair(squeezer: QuadraturePair) -> Self {
        Self {
            squeezers: vec![squeezer; 2],
            gates: vec![
                Gate::PhaseShift {
                    mode: 1,
                    phase: FRAC_PI_2,
                },
                Gate::BeamSplitter {
                    i: 0,
                    j: 1,
                    transmittance: 0.5,
                    phase: 0.0,
                },
            ],
            measurements: (0..2).map(|mode| Homodyne { mode, angle: 0.0 }).collect(),
        }
    }

    /// Four squeezers joined by three balanced beam splitters in a binary
    /// tree: (0,1) and (2,3) first, then (1,2). Odd squeezers are rotated by
    /// 90°, and mode 2 by another 90° before the second layer.
    pub fn binary_tree(squeezer: QuadraturePair) -> Self {
        let bs = |i, j| Gate::BeamSplitter {
            i,
            j,
            transmittance: 0.5,
            phase: 0.0,
        };
        let rot = |mode| Gate::PhaseShift {
            mode,
            phase: FRAC_PI_2,
        };
        Self {
            squeezers: vec![squeezer; 4],
            gates: vec![rot(1), rot(3), bs(0, 1), bs(2, 3), rot(2), bs(1, 2)],
            measurements: (0..4).map(|mode| Homodyne { mode, angle: 0.0 }).collect(),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct DuanEntry {
    pub i: usize,
    pub j: usize,
    pub value: f64,
    /// Minimum over a local phase on mode j.
    pub optimal_value: f64,
}

impl DuanEntry {
    pub fn entangled(&self) -> bool {
        self.value < DUAN_SEPARABLE_BOUND
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct NetworkOutput {
    pub state: GaussianState,
    pub homodyne: Vec<(Homodyne, f64)>,
    pub duan: Vec<DuanEntry>,
}

pub fn run_scenario(scenario: &NetworkScenario) -> Result<NetworkOutput, NetworkError> {
    let inputs = scenario
        .squeezers
        .iter()
        .map(GaussianState::from_pair)
        .collect::<Result<Vec<_>, _>>()?;
    let mut state = GaussianState::product(&inputs)?;
    for (index, gate) in scenario.gates.iter().enumerate() {
        state = gate.apply(&state).map_err(|e| NetworkError::Gate {
            index,
            source: Box::new(e),
        })?;
    }
    let homodyne = scenario
        .measurements
        .iter()
        .map(|m| Ok((*m, state.homodyne_variance(m.mode, m.angle)?)))
        .collect::<Result<Vec<_>, NetworkError>>()?;
    let n = state.mode_count();
    let mut duan = Vec::with_capacity(n * (n.saturating_sub(1)) / 2);
    for i in 0..n {
        for j in i + 1..n {
            duan.push(DuanEntry {
                i,
                j,
                value: state.duan_value(i, j)?,
                optimal_value: state.optimal_duan_value(i, j)?.0,
            });
        }
    }
    Ok(NetworkOutput {
        state,
        homodyne,
        duan,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_relative_eq;
    use std::f64::consts::{FRAC_PI_4, PI};

    fn pair(s: f64, a: f64) -> QuadraturePair {
        QuadraturePair::new(s, a).unwrap()
    }

    #[test]
    fn vacuum_basics() {
        let v = GaussianState::vacuum(1);
        assert_eq!(v.covariance(), &DMatrix::<f64>::identity(2, 2));
        assert_eq!(v.homodyne_variance(0, 0.7).unwrap(), 1.0);
        assert_eq!(GaussianState::vacuum(2).duan_value(0, 1).unwrap(), 4.0);
    }

    #[test]
    fn squeezed_vacuum_eigenvalues() {
        assert_eq!(
            GaussianState::squeezed_vacuum(1.0, 1.0).unwrap(),
            GaussianState::vacuum(1)
        );
        let pure = GaussianState::squeezed_vacuum(0.5, 2.0).unwrap();
        assert_relative_eq!(pure.symplectic_eigenvalues()[0], 1.0, max_relative = 1e-12);
        let mixed = GaussianState::squeezed_vacuum(0.71955, 2.58829).unwrap();
        assert_relative_eq!(
            mixed.symplectic_eigenvalues()[0],
            1.36470,
            max_relative = 1e-4
        );
        assert!(GaussianState::squeezed_vacuum(1.2, 2.0).is_err());
    }

    #[test]
    fn phase_shift_examples() {
        let s = GaussianState::squeezed_vacuum(0.5, 2.0).unwrap();
        assert_eq!(s.apply_phase_shift(0, 0.0).unwrap(), s);
        let swapped = s.apply_phase_shift(0, PI / 2.0).unwrap();
        assert_relative_eq!(swapped.covariance()[(0, 0)], 2.0, max_relative = 1e-12);
        assert_relative_eq!(swapped.covariance()[(1, 1)], 0.5, max_relative = 1e-12);
        let quarter = s.apply_phase_shift(0, FRAC_PI_4).unwrap();
        assert_relative_eq!(
            quarter.homodyne_variance(0, 0.0).unwrap(),
            1.25,
            max_relative = 1e-12
        );
    }

    #[test]
    fn beamsplitter_limits() {
        let s = GaussianState::product(&[
            GaussianState::squeezed_vacuum(0.5, 2.0).unwrap(),
            GaussianState::squeezed_vacuum(0.8, 1.5).unwrap(),
        ])
        .unwrap();
        let same = s.apply_beamsplitter(0, 1, 1.0, 0.3).unwrap();
        assert!((same.covariance() - s.covariance()).amax() < 1e-15);
        let swapped = s.apply_beamsplitter(0, 1, 0.0, 0.0).unwrap();
        assert_relative_eq!(swapped.covariance()[(0, 0)], 0.8, max_relative = 1e-12);
        assert_relative_eq!(swapped.covariance()[(2, 2)], 0.5, max_relative = 1e-12);
        assert!(matches!(
            s.apply_beamsplitter(0, 0, 0.5, 0.0),
            Err(NetworkError::SameMode(0))
        ));
        assert!(matches!(
            s.apply_beamsplitter(0, 2, 0.5, 0.0),
            Err(NetworkError::ModeOutOfRange { mode: 2, count: 2 })
        ));
        assert!(s.apply_beamsplitter(0, 1, 1.5, 0.0).is_err());
    }

    #[test]
    fn epr_pair_values() {
        let out = run_scenario(&NetworkScenario::epr_pair(pair(0.5, 2.0))).unwrap();
        let cov = out.state.covariance();
        let x_minus = cov[(0, 0)] + cov[(2, 2)] - 2.0 * cov[(0, 2)];
        assert_relative_eq!(x_minus, 1.0, max_relative = 1e-12);
        assert_relative_eq!(out.homodyne[0].1, 1.25, max_relative = 1e-12);
        assert_relative_eq!(out.duan[0].value, 2.0, max_relative = 1e-12);

        let lossy = out
            .state
            .apply_loss_channel(0, 0.5)
            .and_then(|s| s.apply_loss_channel(1, 0.5))
            .unwrap();
        assert_relative_eq!(lossy.duan_value(0, 1).unwrap(), 3.0, max_relative = 1e-12);
    }

    #[test]
    fn loss_channel_examples() {
        let s = GaussianState::squeezed_vacuum(1e-9, 1e9).unwrap();
        let out = s.apply_loss_channel(0, 0.5).unwrap();
        let db = 10.0 * out.homodyne_variance(0, 0.0).unwrap().log10();
        assert!((db + 3.0103).abs() < 1e-3);
        assert_eq!(s.apply_loss_channel(0, 1.0).unwrap(), s);
        let single = GaussianState::squeezed_vacuum(0.3, 4.0)
            .unwrap()
            .apply_loss_channel(0, 0.7)
            .unwrap();
        assert_relative_eq!(
            single.covariance()[(0, 0)],
            crate::loss::apply_loss(0.3, 0.7),
            max_relative = 1e-15
        );
        assert_relative_eq!(
            single.covariance()[(1, 1)],
            crate::loss::apply_loss(4.0, 0.7),
            max_relative = 1e-15
        );
    }

    #[test]
    fn homodyne_matches_trace() {
        let p = pair(0.5, 2.0);
        let s = GaussianState::from_pair(&p).unwrap();
        for k in 0..16 {
            let theta = k as f64 * PI / 8.0;
            assert_relative_eq!(
                s.homodyne_variance(0, theta).unwrap(),
                crate::opo::homodyne_trace(&p, theta),
                max_relative = 1e-14
            );
        }
    }

    #[test]
    fn optimal_duan_recovers_misaligned_phase() {
        let out = run_scenario(&NetworkScenario::epr_pair(pair(0.5, 2.0))).unwrap();
        let rotated = out.state.apply_phase_shift(1, 0.9).unwrap();
        assert!(rotated.duan_value(0, 1).unwrap() > 2.0 + 1e-3);
        let (best, _) = rotated.optimal_duan_value(0, 1).unwrap();
        assert_relative_eq!(best, 2.0, max_relative = 1e-12);
    }

    #[test]
    fn from_covariance_rejects_unphysical() {
        let bad = DMatrix::from_diagonal(&DVector::from_vec(vec![0.5, 0.5]));
        assert!(matches!(
            GaussianState::from_covariance(bad),
            Err(NetworkError::Unphysical(_))
        ));
        let asym = DMatrix::from_row_slice(2, 2, &[1.0, 0.1, 0.0, 1.0]);
        assert!(GaussianState::from_covariance(asym).is_err());
        let ok = DMatrix::from_diagonal(&DVector::from_vec(vec![0.5, 3.0]));
        assert!(GaussianState::from_covariance(ok).is_ok());
    }

    #[test]
    fn gate_errors_carry_index() {
        let mut sc = NetworkScenario::epr_pair(pair(0.5, 2.0));
        sc.gates.push(Gate::Loss {
            mode: 7,
            efficiency: 0.5,
        });
        assert!(matches!(
            run_scenario(&sc),
            Err(NetworkError::Gate { index: 2, .. })
        ));
    }

    #[test]
    fn means_follow_gates() {
        let s = GaussianState::vacuum(1)
            .with_mean(DVector::from_vec(vec![2.0, 0.0]))
            .unwrap();
        let r = s.apply_phase_shift(0, PI / 2.0).unwrap();
        assert_relative_eq!(r.mean()[1], 2.0, max_relative = 1e-12);
        let l = s.apply_loss_channel(0, 0.25).unwrap();
        assert_relative_eq!(l.mean()[0], 1.0, max_relative = 1e-12);
    }
}
