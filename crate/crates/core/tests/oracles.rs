//! Checks against independent computations: numerical quadrature, brute-force
//! scans and a complex-unitary description of passive networks.

use std::f64::consts::{FRAC_PI_2, PI};

use approx::assert_relative_eq;
use nalgebra::{Complex, DMatrix};
use sqzkit_core::network::{run_scenario, Gate, GaussianState, NetworkScenario};
use sqzkit_core::optics::{
    beam_radius_at, cavity_length_for_waist, gaussian_overlap, hemispherical_waist, CavityGeometry,
    GaussianBeam,
};
use sqzkit_core::QuadraturePair;

const LAMBDA: f64 = 1.064e-6;

/// |∫ E_a E_b* dA|² / (∫|E_a|² ∫|E_b|²) by composite Simpson in r.
fn numeric_overlap(wa: f64, wb: f64, ra: f64, rb: f64, lambda: f64) -> f64 {
    let k = 2.0 * PI / lambda;
    let inv = |r: f64| if r.is_infinite() { 0.0 } else { 1.0 / r };
    let curv = 0.5 * k * (inv(ra) - inv(rb));
    let r_max = 10.0 * wa.max(wb);
    let n = 20_000;
    let h = r_max / n as f64;
    let mut acc = Complex::new(0.0, 0.0);
    for i in 0..=n {
        let r = i as f64 * h;
        let weight = if i == 0 || i == n {
            1.0
        } else if i % 2 == 1 {
            4.0
        } else {
            2.0
        };
        let amp = (-r * r / (wa * wa) - r * r / (wb * wb)).exp();
        let phase = Complex::new(0.0, -curv * r * r).exp();
        acc += phase * (weight * amp * 2.0 * PI * r);
    }
    acc *= h / 3.0;
    let norm = |w: f64| PI * w * w / 2.0;
    acc.norm_sqr() / (norm(wa) * norm(wb))
}

#[test]
fn overlap_matches_quadrature() {
    let cases = [
        (3.1e-6, 6.2e-6, f64::INFINITY, f64::INFINITY),
        (5e-6, 5e-6, 2e-4, f64::INFINITY),
        (7.5e-6, 6.5e-6, 1e-3, -5e-4),
        (3.1e-6, 4.0e-6, f64::INFINITY, 3e-5),
    ];
    for (wa, wb, ra, rb) in cases {
        let a = GaussianBeam::new(wa, LAMBDA).unwrap();
        let b = GaussianBeam::new(wb, LAMBDA).unwrap();
        let closed = gaussian_overlap(&a, &b, ra, rb).unwrap();
        let numeric = numeric_overlap(wa, wb, ra, rb, LAMBDA);
        assert_relative_eq!(closed, numeric, max_relative = 1e-8);
    }
}

#[test]
fn curved_versus_flat_equal_waists() {
    // Equal spots, one front curved: η = 1/(1 + (π w²/(2λR))²).
    let w = 5e-6;
    let r = 2e-4;
    let beam = GaussianBeam::new(w, LAMBDA).unwrap();
    let closed = gaussian_overlap(&beam, &beam, r, f64::INFINITY).unwrap();
    let u = PI * w * w / (2.0 * LAMBDA * r);
    assert_relative_eq!(closed, 1.0 / (1.0 + u * u), max_relative = 1e-12);
    assert_relative_eq!(
        closed,
        numeric_overlap(w, w, r, f64::INFINITY, LAMBDA),
        max_relative = 1e-8
    );
}

#[test]
fn length_inversion_matches_scan() {
    let rc = 5e-3;
    for waist in [3.1e-6, 7.5e-6, 6.5e-6] {
        let solved = cavity_length_for_waist(waist, rc, LAMBDA)
            .unwrap()
            .primary();
        // 1 nm scan over the last 20 µm before Rc.
        let mut best = (f64::INFINITY, 0.0);
        for step in 1..=20_000 {
            let d = rc - step as f64 * 1e-9;
            let cav = CavityGeometry::plano_concave(rc, d).unwrap();
            let err = (hemispherical_waist(&cav, LAMBDA).unwrap() - waist).abs();
            if err < best.0 {
                best = (err, d);
            }
        }
        assert!(
            (best.1 - solved).abs() <= 1e-9,
            "waist {waist}: scan {} vs {solved}",
            best.1
        );
    }
}

#[test]
fn mirror_spot_from_scanned_length() {
    let rc = 5e-3;
    let beam = GaussianBeam::new(3.1e-6, LAMBDA).unwrap();
    let d = (1..=20_000)
        .map(|s| rc - s as f64 * 1e-9)
        .min_by(|a, b| {
            let w = |d: f64| {
                (hemispherical_waist(&CavityGeometry::plano_concave(rc, d).unwrap(), LAMBDA)
                    .unwrap()
                    - 3.1e-6)
                    .abs()
            };
            w(*a).total_cmp(&w(*b))
        })
        .unwrap();
    let spot = beam_radius_at(&beam, d);
    assert!((spot - 546e-6).abs() < 1e-6, "spot {spot}");
}

/// Symplectic matrix (interleaved ordering) of a passive network with mode
/// unitary `u`, a' = U a.
fn symplectic_from_unitary(u: &DMatrix<Complex<f64>>) -> DMatrix<f64> {
    let n = u.nrows();
    let mut s = DMatrix::zeros(2 * n, 2 * n);
    for k in 0..n {
        for l in 0..n {
            let c = u[(k, l)];
            s[(2 * k, 2 * l)] = c.re;
            s[(2 * k, 2 * l + 1)] = -c.im;
            s[(2 * k + 1, 2 * l)] = c.im;
            s[(2 * k + 1, 2 * l + 1)] = c.re;
        }
    }
    s
}

fn unitary_of(gates: &[Gate], n: usize) -> DMatrix<Complex<f64>> {
    let mut u = DMatrix::<Complex<f64>>::identity(n, n);
    for g in gates {
        let mut m = DMatrix::<Complex<f64>>::identity(n, n);
        match *g {
            Gate::PhaseShift { mode, phase } => m[(mode, mode)] = Complex::from_polar(1.0, phase),
            Gate::BeamSplitter {
                i,
                j,
                transmittance,
                phase,
            } => {
                let t = Complex::new(transmittance.sqrt(), 0.0);
                let r = (1.0 - transmittance).sqrt();
                m[(i, i)] = t;
                m[(j, j)] = t;
                m[(i, j)] = Complex::from_polar(r, phase);
                m[(j, i)] = -Complex::from_polar(r, -phase);
            }
            Gate::Loss { .. } => panic!("oracle handles passive gates only"),
        }
        u = m * u;
    }
    u
}

fn initial_covariance(squeezers: &[QuadraturePair]) -> DMatrix<f64> {
    let n = squeezers.len();
    let mut c = DMatrix::zeros(2 * n, 2 * n);
    for (k, p) in squeezers.iter().enumerate() {
        c[(2 * k, 2 * k)] = p.squeezed;
        c[(2 * k + 1, 2 * k + 1)] = p.antisqueezed;
    }
    c
}

fn oracle_covariance(scenario: &NetworkScenario) -> DMatrix<f64> {
    let n = scenario.squeezers.len();
    let s = symplectic_from_unitary(&unitary_of(&scenario.gates, n));
    &s * initial_covariance(&scenario.squeezers) * s.transpose()
}

fn duan_from(c: &DMatrix<f64>, i: usize, j: usize) -> f64 {
    let (xi, pi, xj, pj) = (2 * i, 2 * i + 1, 2 * j, 2 * j + 1);
    c[(xi, xi)] + c[(xj, xj)] - 2.0 * c[(xi, xj)] + c[(pi, pi)] + c[(pj, pj)] + 2.0 * c[(pi, pj)]
}

#[test]
fn epr_pair_matches_unitary_oracle() {
    let sq = QuadraturePair::new(0.5, 2.0).unwrap();
    let scenario = NetworkScenario::epr_pair(sq);
    let expected = oracle_covariance(&scenario);
    let out = run_scenario(&scenario).unwrap();
    assert!((out.state.covariance() - &expected).amax() < 1e-12);
    let var_x_minus = expected[(0, 0)] + expected[(2, 2)] - 2.0 * expected[(0, 2)];
    assert_relative_eq!(var_x_minus, 1.0, max_relative = 1e-12);
    assert_relative_eq!(duan_from(&expected, 0, 1), 2.0, max_relative = 1e-12);
    assert_relative_eq!(expected[(0, 0)], 1.25, max_relative = 1e-12);

    // Each output through η = 0.5: Σ → ηΣ + (1 − η)I on the whole two-mode state.
    let lossy_oracle = &expected * 0.5 + DMatrix::identity(4, 4) * 0.5;
    assert_relative_eq!(duan_from(&lossy_oracle, 0, 1), 3.0, max_relative = 1e-12);
    let lossy = out
        .state
        .apply_loss_channel(0, 0.5)
        .unwrap()
        .apply_loss_channel(1, 0.5)
        .unwrap();
    assert!((lossy.covariance() - &lossy_oracle).amax() < 1e-12);
}

#[test]
fn binary_tree_matches_unitary_oracle() {
    let sq = QuadraturePair::new(0.5, 2.0).unwrap();
    let scenario = NetworkScenario::binary_tree(sq);
    let expected = oracle_covariance(&scenario);
    let out = run_scenario(&scenario).unwrap();
    assert!((out.state.covariance() - &expected).amax() < 1e-12);
    assert_eq!(out.duan.len(), 6);
    let mut entangled = 0;
    for e in &out.duan {
        assert_relative_eq!(
            e.value,
            duan_from(&expected, e.i, e.j),
            max_relative = 1e-12
        );
        entangled += e.entangled() as usize;
    }
    assert!(entangled >= 1);
    for (m, v) in &out.homodyne {
        assert_relative_eq!(*v, expected[(2 * m.mode, 2 * m.mode)], max_relative = 1e-12);
    }
}

#[test]
fn beamsplitter_composition_matches_matrix_product() {
    let a = GaussianState::squeezed_vacuum(0.4, 3.0).unwrap();
    let b = GaussianState::squeezed_vacuum(0.7, 1.6).unwrap();
    let state = GaussianState::product(&[a, b]).unwrap();
    let gates = [
        Gate::BeamSplitter {
            i: 0,
            j: 1,
            transmittance: 0.3,
            phase: 0.4,
        },
        Gate::BeamSplitter {
            i: 0,
            j: 1,
            transmittance: 0.8,
            phase: -1.1,
        },
    ];
    let mut sim = state.clone();
    for g in &gates {
        sim = g.apply(&sim).unwrap();
    }
    let s = symplectic_from_unitary(&unitary_of(&gates, 2));
    let expected = &s * state.covariance() * s.transpose();
    assert!((sim.covariance() - expected).amax() < 1e-12);
}

#[test]
fn quadrature_swap_under_quarter_turn() {
    let scenario = NetworkScenario {
        squeezers: vec![QuadraturePair::new(0.3, 4.0).unwrap()],
        gates: vec![Gate::PhaseShift {
            mode: 0,
            phase: FRAC_PI_2,
        }],
        measurements: vec![],
    };
    assert!(
        (run_scenario(&scenario).unwrap().state.covariance() - oracle_covariance(&scenario)).amax()
            < 1e-12
    );
}
