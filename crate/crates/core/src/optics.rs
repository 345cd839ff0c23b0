//! Paraxial Gaussian-beam optics for a plano-concave (near-hemispherical) cavity.
//!
//! All lengths are in meters. The flat mirror of the cavity is the fiber end
//! face, so the cavity eigenmode has its waist on the flat mirror and the
//! fiber mode is matched there.

use std::f64::consts::PI;

use thiserror::Error;

/// Refractive index of KTP at 1064 nm used when a crystal index is not given.
pub const DEFAULT_CRYSTAL_INDEX: f64 = 1.83;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum OpticsError {
    #[error("invalid {field}: {value} ({constraint})")]
    InvalidParameter {
        field: &'static str,
        value: f64,
        constraint: &'static str,
    },
    #[error(
        "unstable cavity: length {cavity_length} m must satisfy 0 < d < Rc = {mirror_curvature} m"
    )]
    Unstable {
        cavity_length: f64,
        mirror_curvature: f64,
    },
    #[error(
        "waist {waist} m is unreachable with Rc = {mirror_curvature} m: needs Rayleigh range {rayleigh_range} m <= Rc/2"
    )]
    WaistUnreachable {
        waist: f64,
        mirror_curvature: f64,
        rayleigh_range: f64,
    },
    #[error("beams have different wavelengths ({a} m vs {b} m)")]
    WavelengthMismatch { a: f64, b: f64 },
}

fn check(
    field: &'static str,
    value: f64,
    ok: bool,
    constraint: &'static str,
) -> Result<(), OpticsError> {
    if ok && value.is_finite() {
        Ok(())
    } else {
        Err(OpticsError::InvalidParameter {
            field,
            value,
            constraint,
        })
    }
}

/// A paraxial TEM00 mode.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct GaussianBeam {
    /// 1/e² intensity radius at the waist (m).
    pub waist_radius: f64,
    /// Vacuum wavelength (m).
    pub wavelength: f64,
    pub refractive_index: f64,
    /// Axial position of the waist (m).
    pub waist_position: f64,
}

impl GaussianBeam {
    pub fn new(waist_radius: f64, wavelength: f64) -> Result<Self, OpticsError> {
        Self::with_index(waist_radius, wavelength, 1.0)
    }

    pub fn with_index(
        waist_radius: f64,
        wavelength: f64,
        refractive_index: f64,
    ) -> Result<Self, OpticsError> {
        check(
            "waist_radius",
            waist_radius,
            waist_radius > 0.0,
            "must be > 0",
        )?;
        check("wavelength", wavelength, wavelength > 0.0, "must be > 0")?;
        check(
            "refractive_index",
            refractive_index,
            refractive_index >= 1.0,
            "must be >= 1",
        )?;
        Ok(Self {
            waist_radius,
            wavelength,
            refractive_index,
            waist_position: 0.0,
        })
    }

    pub fn at_position(mut self, waist_position: f64) -> Self {
        self.waist_position = waist_position;
        self
    }

    /// Wavelength inside the medium.
    pub fn medium_wavelength(&self) -> f64 {
        self.wavelength / self.refractive_index
    }
}

/// Plano-concave resonator. The flat mirror sits at z = 0.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct CavityGeometry {
    /// Radius of curvature of the concave mirror (m).
    pub mirror_curvature: f64,
    /// Flat-to-curved mirror distance (m).
    pub cavity_length: f64,
    /// Output coupler power transmission T.
    pub coupler_transmission: f64,
    /// Round-trip loss L, excluding the coupler.
    pub round_trip_loss: f64,
    /// Round-trip optical path l used for the cavity bandwidth (m).
    pub round_trip_length: f64,
}

impl CavityGeometry {
    pub fn new(
        mirror_curvature: f64,
        cavity_length: f64,
        coupler_transmission: f64,
        round_trip_loss: f64,
        round_trip_length: f64,
    ) -> Result<Self, OpticsError> {
        check(
            "mirror_curvature",
            mirror_curvature,
            mirror_curvature > 0.0,
            "must be > 0",
        )?;
        check(
            "coupler_transmission",
            coupler_transmission,
            coupler_transmission > 0.0 && coupler_transmission <= 1.0,
            "must lie in (0, 1]",
        )?;
        check(
            "round_trip_loss",
            round_trip_loss,
            (0.0..1.0).contains(&round_trip_loss),
            "must lie in [0, 1)",
        )?;
        check(
            "coupler_transmission + round_trip_loss",
            coupler_transmission + round_trip_loss,
            coupler_transmission + round_trip_loss <= 1.0,
            "must be <= 1",
        )?;
        check(
            "round_trip_length",
            round_trip_length,
            round_trip_length > 0.0,
            "must be > 0",
        )?;
        if !(cavity_length > 0.0 && cavity_length < mirror_curvature) {
            return Err(OpticsError::Unstable {
                cavity_length,
                mirror_curvature,
            });
        }
        Ok(Self {
            mirror_curvature,
            cavity_length,
            coupler_transmission,
            round_trip_loss,
            round_trip_length,
        })
    }

    /// Lossless-geometry shorthand: T = 1, L = 0, l = 2d.
    pub fn plano_concave(mirror_curvature: f64, cavity_length: f64) -> Result<Self, OpticsError> {
        Self::new(
            mirror_curvature,
            cavity_length,
            1.0,
            0.0,
            2.0 * cavity_length,
        )
    }
}

/// z_R = π w0² n / λ.
pub fn rayleigh_range(beam: &GaussianBeam) -> f64 {
    PI * beam.waist_radius * beam.waist_radius / beam.medium_wavelength()
}

/// Useful nonlinear interaction length, taken as the confocal parameter b = 2 z_R
/// evaluated with the crystal index carried by `beam`.
pub fn confocal_crystal_length(beam: &GaussianBeam) -> f64 {
    2.0 * rayleigh_range(beam)
}

/// Waist on the flat mirror of the cavity eigenmode:
/// w0² = (λ/π)·√(d(Rc − d)).
pub fn hemispherical_waist(cavity: &CavityGeometry, wavelength: f64) -> Result<f64, OpticsError> {
    check("wavelength", wavelength, wavelength > 0.0, "must be > 0")?;
    let d = cavity.cavity_length;
    let rc = cavity.mirror_curvature;
    if !(d > 0.0 && d < rc) {
        return Err(OpticsError::Unstable {
            cavity_length: d,
            mirror_curvature: rc,
        });
    }
    // d(Rc - d) written to avoid cancellation when d is within nanometers of Rc.
    let product = d * (rc - d);
    Ok((wavelength / PI * product.sqrt()).sqrt())
}

/// Both cavity lengths that produce a given flat-mirror waist.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct CavityLengthSolution {
    /// Root closest to Rc (almost-hemispherical branch).
    pub near_hemispherical: f64,
    /// Root closest to zero (near-planar branch).
    pub near_planar: f64,
}

impl CavityLengthSolution {
    pub fn primary(&self) -> f64 {
        self.near_hemispherical
    }
}

/// Inverts [`hemispherical_waist`]: d = [Rc ± √(Rc² − 4 z_R²)]/2 with z_R = π w0²/λ.
pub fn cavity_length_for_waist(
    target_waist: f64,
    mirror_curvature: f64,
    wavelength: f64,
) -> Result<CavityLengthSolution, OpticsError> {
    check(
        "target_waist",
        target_waist,
        target_waist > 0.0,
        "must be > 0",
    )?;
    check(
        "mirror_curvature",
        mirror_curvature,
        mirror_curvature > 0.0,
        "must be > 0",
    )?;
    check("wavelength", wavelength, wavelength > 0.0, "must be > 0")?;
    let z_r = PI * target_waist * target_waist / wavelength;
    let disc = mirror_curvature * mirror_curvature - 4.0 * z_r * z_r;
    if disc < 0.0 {
        return Err(OpticsError::WaistUnreachable {
            waist: target_waist,
            mirror_curvature,
            rayleigh_range: z_r,
        });
    }
    let root = disc.sqrt();
    let near_hemispherical = 0.5 * (mirror_curvature + root);
    // Product of roots is z_R²; dividing avoids cancellation on the small root.
    let near_planar = if near_hemispherical > 0.0 {
        z_r * z_r / near_hemispherical
    } else {
        0.0
    };
    Ok(CavityLengthSolution {
        near_hemispherical,
        near_planar,
    })
}

/// w(z) = w0 √(1 + ((z − z0)/z_R)²).
pub fn beam_radius_at(beam: &GaussianBeam, z: f64) -> f64 {
    let u = (z - beam.waist_position) / rayleigh_range(beam);
    beam.waist_radius * (1.0 + u * u).sqrt()
}

/// Wavefront radius of curvature at z; infinite at the waist.
pub fn wavefront_curvature_at(beam: &GaussianBeam, z: f64) -> f64 {
    let dz = z - beam.waist_position;
    if dz == 0.0 {
        return f64::INFINITY;
    }
    let z_r = rayleigh_range(beam);
    dz * (1.0 + (z_r / dz).powi(2))
}

/// Spot size on the curved mirror divided by its curvature radius.
/// Larger values mean the paraxial description is less trustworthy.
pub fn paraxial_figure_of_merit(cavity: &CavityGeometry, beam: &GaussianBeam) -> f64 {
    beam_radius_at(beam, cavity.cavity_length) / cavity.mirror_curvature
}

/// Power coupling between two co-axial Gaussian beams compared at a common
/// plane, with spot sizes `w` and wavefront curvatures `R` (use
/// `f64::INFINITY` for a flat front):
///
/// η = 4 / [ (w_a/w_b + w_b/w_a)² + (π w_a w_b / λ)² (1/R_a − 1/R_b)² ]
///
/// where λ is the wavelength in the medium.
pub fn gaussian_overlap(
    beam_a: &GaussianBeam,
    beam_b: &GaussianBeam,
    curvature_a: f64,
    curvature_b: f64,
) -> Result<f64, OpticsError> {
    let la = beam_a.medium_wavelength();
    let lb = beam_b.medium_wavelength();
    if ((la - lb) / la).abs() > 1e-12 {
        return Err(OpticsError::WavelengthMismatch { a: la, b: lb });
    }
    let (wa, wb) = (beam_a.waist_radius, beam_b.waist_radius);
    let ratio = wa / wb + wb / wa;
    let inv = |r: f64| if r.is_infinite() { 0.0 } else { 1.0 / r };
    let phase = PI * wa * wb / la * (inv(curvature_a) - inv(curvature_b));
    Ok((4.0 / (ratio * ratio + phase * phase)).min(1.0))
}

/// A fiber mode modeled as a Gaussian at the flat mirror, with a scalar
/// discount for non-Gaussian mode content (1.0 means perfectly Gaussian).
#[derive(Debug, Clone, PartialEq)]
pub struct FiberMode {
    pub name: String,
    pub beam: GaussianBeam,
    pub overlap_discount: f64,
}

impl FiberMode {
    pub fn new(name: impl Into<String>, beam: GaussianBeam) -> Self {
        Self {
            name: name.into(),
            beam,
            overlap_discount: 1.0,
        }
    }

    pub fn with_discount(mut self, overlap_discount: f64) -> Result<Self, OpticsError> {
        check(
            "overlap_discount",
            overlap_discount,
            (0.0..=1.0).contains(&overlap_discount),
            "must lie in [0, 1]",
        )?;
        self.overlap_discount = overlap_discount;
        Ok(self)
    }

    /// Predicted power coupling into the cavity eigenmode at the flat mirror.
    /// Both fronts are flat there.
    pub fn coupling_to(&self, cavity_mode: &GaussianBeam) -> Result<f64, OpticsError> {
        Ok(self.overlap_discount
            * gaussian_overlap(&self.beam, cavity_mode, f64::INFINITY, f64::INFINITY)?)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_relative_eq;

    const LAMBDA: f64 = 1.064e-6;
    const RC: f64 = 5e-3;

    #[test]
    fn rayleigh_range_values() {
        let sf = GaussianBeam::new(3.1e-6, LAMBDA).unwrap();
        assert_relative_eq!(rayleigh_range(&sf), 28.3747e-6, max_relative = 1e-4);
        let pcf = GaussianBeam::new(7.5e-6, LAMBDA).unwrap();
        assert_relative_eq!(rayleigh_range(&pcf), 166.085e-6, max_relative = 1e-4);
        let doubled = GaussianBeam::new(6.2e-6, LAMBDA).unwrap();
        assert_relative_eq!(
            rayleigh_range(&doubled),
            4.0 * rayleigh_range(&sf),
            max_relative = 1e-12
        );
    }

    #[test]
    fn confocal_length_values() {
        let kt = GaussianBeam::with_index(3.1e-6, LAMBDA, DEFAULT_CRYSTAL_INDEX).unwrap();
        assert_relative_eq!(
            confocal_crystal_length(&kt),
            103.851e-6,
            max_relative = 1e-4
        );
        let air = GaussianBeam::new(3.1e-6, LAMBDA).unwrap();
        assert_relative_eq!(
            confocal_crystal_length(&air),
            56.7494e-6,
            max_relative = 1e-4
        );
        // Waist chosen so that z_R = 1 m.
        let w = (LAMBDA / PI).sqrt();
        let unit = GaussianBeam::new(w, LAMBDA).unwrap();
        assert_relative_eq!(confocal_crystal_length(&unit), 2.0, max_relative = 1e-12);
    }

    #[test]
    fn hemispherical_waist_values() {
        let half = CavityGeometry::plano_concave(RC, RC / 2.0).unwrap();
        assert_relative_eq!(
            hemispherical_waist(&half, LAMBDA).unwrap(),
            29.0982e-6,
            max_relative = 1e-5
        );
        let edge = CavityGeometry::plano_concave(RC, RC - 1e-9).unwrap();
        assert_relative_eq!(
            hemispherical_waist(&edge, LAMBDA).unwrap(),
            0.870237e-6,
            max_relative = 1e-4
        );
    }

    #[test]
    fn unstable_geometry_is_rejected() {
        assert!(matches!(
            CavityGeometry::plano_concave(RC, RC),
            Err(OpticsError::Unstable { .. })
        ));
        let mut c = CavityGeometry::plano_concave(RC, 1e-3).unwrap();
        c.cavity_length = 6e-3;
        assert!(matches!(
            hemispherical_waist(&c, LAMBDA),
            Err(OpticsError::Unstable { .. })
        ));
    }

    #[test]
    fn cavity_length_values() {
        let sf = cavity_length_for_waist(3.1e-6, RC, LAMBDA).unwrap();
        assert_relative_eq!(sf.primary(), 4.999839e-3, max_relative = 1e-7);
        assert_relative_eq!(RC - sf.primary(), 161.03e-9, max_relative = 1e-3);
        let pcf = cavity_length_for_waist(7.5e-6, RC, LAMBDA).unwrap();
        assert_relative_eq!(pcf.primary(), 4.994477e-3, max_relative = 1e-6);
        assert!(pcf.near_planar < pcf.near_hemispherical);
    }

    #[test]
    fn maximum_waist_has_double_root() {
        // z_R = Rc/2
        let w = (RC / 2.0 * LAMBDA / PI).sqrt();
        let s = cavity_length_for_waist(w, RC, LAMBDA).unwrap();
        assert_relative_eq!(s.near_hemispherical, RC / 2.0, max_relative = 1e-6);
        assert_relative_eq!(s.near_planar, RC / 2.0, max_relative = 1e-6);
        assert!(matches!(
            cavity_length_for_waist(w * 1.01, RC, LAMBDA),
            Err(OpticsError::WaistUnreachable { .. })
        ));
    }

    #[test]
    fn beam_radius_values() {
        let sf = GaussianBeam::new(3.1e-6, LAMBDA).unwrap();
        assert_eq!(beam_radius_at(&sf, 0.0), 3.1e-6);
        let z_r = rayleigh_range(&sf);
        assert_relative_eq!(
            beam_radius_at(&sf, z_r),
            3.1e-6 * 2f64.sqrt(),
            max_relative = 1e-12
        );
        let d = cavity_length_for_waist(3.1e-6, RC, LAMBDA)
            .unwrap()
            .primary();
        assert_relative_eq!(beam_radius_at(&sf, d), 546.25e-6, max_relative = 1e-4);
    }

    #[test]
    fn figure_of_merit_values() {
        let sf = GaussianBeam::new(3.1e-6, LAMBDA).unwrap();
        let d = cavity_length_for_waist(3.1e-6, RC, LAMBDA)
            .unwrap()
            .primary();
        let cav = CavityGeometry::plano_concave(RC, d).unwrap();
        assert_relative_eq!(
            paraxial_figure_of_merit(&cav, &sf),
            0.10925,
            max_relative = 1e-4
        );

        let pcf = GaussianBeam::new(7.5e-6, LAMBDA).unwrap();
        let d = cavity_length_for_waist(7.5e-6, RC, LAMBDA)
            .unwrap()
            .primary();
        let cav = CavityGeometry::plano_concave(RC, d).unwrap();
        assert_relative_eq!(beam_radius_at(&pcf, d), 225.66e-6, max_relative = 1e-4);
        assert_relative_eq!(
            paraxial_figure_of_merit(&cav, &pcf),
            0.045133,
            max_relative = 1e-4
        );
    }

    #[test]
    fn overlap_flat_values() {
        let a = GaussianBeam::new(3.1e-6, LAMBDA).unwrap();
        let b = GaussianBeam::new(6.2e-6, LAMBDA).unwrap();
        let inf = f64::INFINITY;
        assert_eq!(gaussian_overlap(&a, &a, inf, inf).unwrap(), 1.0);
        assert_relative_eq!(
            gaussian_overlap(&a, &b, inf, inf).unwrap(),
            0.64,
            max_relative = 1e-12
        );
    }

    #[test]
    fn overlap_rejects_mixed_wavelengths() {
        let a = GaussianBeam::new(3.1e-6, LAMBDA).unwrap();
        let b = GaussianBeam::new(3.1e-6, 0.532e-6).unwrap();
        assert!(gaussian_overlap(&a, &b, f64::INFINITY, f64::INFINITY).is_err());
    }

    #[test]
    fn fiber_discount_scales_coupling() {
        let fiber = FiberMode::new("PCF", GaussianBeam::new(7.5e-6, LAMBDA).unwrap())
            .with_discount(0.9)
            .unwrap();
        let cav = GaussianBeam::new(7.5e-6, LAMBDA).unwrap();
        assert_relative_eq!(fiber.coupling_to(&cav).unwrap(), 0.9);
        assert!(FiberMode::new("x", cav).with_discount(1.5).is_err());
    }

    #[test]
    fn invalid_beams_are_rejected() {
        assert!(GaussianBeam::new(0.0, LAMBDA).is_err());
        assert!(GaussianBeam::new(1e-6, -1.0).is_err());
        assert!(GaussianBeam::with_index(1e-6, LAMBDA, 0.5).is_err());
        assert!(CavityGeometry::new(RC, 1e-3, 0.9, 0.2, 1e-2).is_err());
    }
}
