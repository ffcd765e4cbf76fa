//! Pointwise algebra of sphere inversions acting on second-order surface data.
//!
//! All inversions are centered at the origin `O`, the apex of the cone. A
//! [`SurfaceJet`] carries a point, a unit normal and the two principal
//! curvatures at that point. Curvatures follow the shape-operator convention
//! `-dN`: a sphere of radius `R` with the normal pointing to its center has
//! principal curvatures `+1/R`.
//!
//! Under the inversion `p -> r^2 p / |p|^2` the normal and the curvatures
//! transform as
//!
//! ```text
//! N^   = N - 2 <N,p> p / |p|^2
//! l^_i = (l_i |p|^2 + 2 <N,p>) / r^2
//! ```
//!
//! and the mean curvature follows by averaging.

use nalgebra::{Unit, Vector3};
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// A point or displacement in R^3.
pub type Vec3 = Vector3<f64>;

/// A unit vector in R^3.
pub type UnitVec3 = Unit<Vector3<f64>>;

/// Points closer than this to the origin are treated as the origin.
pub const ORIGIN_EPS: f64 = 1e-300;

/// Builds a unit vector, rejecting zero or non-finite input.
pub fn unit(v: Vec3) -> Option<UnitVec3> {
    let n = v.norm();
    if n.is_finite() && n > 0.0 {
        Some(Unit::new_unchecked(v / n))
    } else {
        None
    }
}

/// Second-order surface data at a point.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SurfaceJet {
    p: Vec3,
    n: UnitVec3,
    lambda1: f64,
    lambda2: f64,
    h: f64,
}

impl SurfaceJet {
    pub fn new(p: Vec3, n: UnitVec3, lambda1: f64, lambda2: f64) -> Self {
        Self {
            p,
            n,
            lambda1,
            lambda2,
            h: 0.5 * (lambda1 + lambda2),
        }
    }

    /// Jet with equal principal curvatures.
    pub fn umbilic(p: Vec3, n: UnitVec3, h: f64) -> Self {
        Self::new(p, n, h, h)
    }

    /// Jet of the sphere with the given center and radius at `p`, normal
    /// pointing to the center (positive curvature).
    pub fn on_sphere_inward(center: Vec3, radius: f64, p: Vec3) -> Option<Self> {
        let n = unit(center - p)?;
        Some(Self::umbilic(p, n, 1.0 / radius))
    }

    pub fn p(&self) -> Vec3 {
        self.p
    }

    pub fn n(&self) -> UnitVec3 {
        self.n
    }

    pub fn lambda1(&self) -> f64 {
        self.lambda1
    }

    pub fn lambda2(&self) -> f64 {
        self.lambda2
    }

    pub fn h(&self) -> f64 {
        self.h
    }

    /// Same jet with the opposite normal; curvatures change sign.
    pub fn flipped(&self) -> Self {
        Self::new(self.p, -self.n, -self.lambda1, -self.lambda2)
    }
}

/// The sphere of radius `r` centered at the origin.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct InversionSphere {
    radius: f64,
}

impl InversionSphere {
    pub fn new(radius: f64) -> Result<Self> {
        if radius.is_finite() && radius > 0.0 {
            Ok(Self { radius })
        } else {
            Err(Error::InvalidRadius(radius))
        }
    }

    pub fn radius(&self) -> f64 {
        self.radius
    }
}

fn check_not_origin(p: &Vec3) -> Result<f64> {
    let n2 = p.norm_squared();
    if n2 <= ORIGIN_EPS || !n2.is_finite() {
        Err(Error::PointAtOrigin)
    } else {
        Ok(n2)
    }
}

/// Inversion `p -> r^2 p / |p|^2`.
pub fn invert_point(p: Vec3, s: InversionSphere) -> Result<Vec3> {
    let n2 = check_not_origin(&p)?;
    Ok(p * (s.radius * s.radius / n2))
}

/// Gauss map of the inverted surface at the image of `j.p()`.
///
/// The result does not depend on the inversion radius.
pub fn invert_normal(j: &SurfaceJet, _s: InversionSphere) -> Result<UnitVec3> {
    let n2 = check_not_origin(&j.p)?;
    let n = j.n.into_inner();
    let reflected = n - j.p * (2.0 * n.dot(&j.p) / n2);
    // Householder reflection of a unit vector; renormalize against drift.
    Ok(Unit::new_normalize(reflected))
}

/// Full jet of the inverted surface.
pub fn invert_jet(j: &SurfaceJet, s: InversionSphere) -> Result<SurfaceJet> {
    let n2 = check_not_origin(&j.p)?;
    let r2 = s.radius * s.radius;
    let f2 = 2.0 * support_function(j);
    let p = j.p * (r2 / n2);
    let n = invert_normal(j, s)?;
    let l1 = (j.lambda1 * n2 + f2) / r2;
    let l2 = (j.lambda2 * n2 + f2) / r2;
    Ok(SurfaceJet::new(p, n, l1, l2))
}

/// Support function `<N(p), p>`.
pub fn support_function(j: &SurfaceJet) -> f64 {
    j.n.dot(&j.p)
}

/// `|p|^2 H + 2 <N,p> - H r^2`.
///
/// Vanishes identically on constant-mean-curvature data that is invariant
/// under the inversion *with its orientation carried along*, e.g. spheres
/// orthogonal to `S_r` and planes through the origin. The sphere `S_r`
/// itself is invariant only as a set: inversion fixes it pointwise but
/// flips the normal, and the residual there is `-2` at `r = 1`.
pub fn inversion_invariance_residual(j: &SurfaceJet, s: InversionSphere) -> Result<f64> {
    let n2 = check_not_origin(&j.p)?;
    Ok(n2 * j.h + 2.0 * support_function(j) - j.h * s.radius * s.radius)
}

/// Image of the jet under the homothety of ratio `ratio` about the origin.
pub fn homothety_jet(j: &SurfaceJet, ratio: f64) -> Result<SurfaceJet> {
    if !(ratio.is_finite() && ratio > 0.0) {
        return Err(Error::InvalidRatio(ratio));
    }
    Ok(SurfaceJet::new(
        j.p * ratio,
        j.n,
        j.lambda1 / ratio,
        j.lambda2 / ratio,
    ))
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_relative_eq;
    use std::f64::consts::FRAC_1_SQRT_2;

    fn s(r: f64) -> InversionSphere {
        InversionSphere::new(r).unwrap()
    }

    fn jet(p: [f64; 3], n: [f64; 3], l1: f64, l2: f64) -> SurfaceJet {
        SurfaceJet::new(Vec3::from(p), unit(Vec3::from(n)).unwrap(), l1, l2)
    }

    #[test]
    fn invert_point_examples() {
        assert_relative_eq!(
            invert_point(Vec3::new(2.0, 0.0, 0.0), s(1.0)).unwrap(),
            Vec3::new(0.5, 0.0, 0.0)
        );
        assert_relative_eq!(
            invert_point(Vec3::new(0.0, 0.0, 1.0), s(1.0)).unwrap(),
            Vec3::new(0.0, 0.0, 1.0)
        );
        assert_relative_eq!(
            invert_point(Vec3::new(0.0, 3.0, 4.0), s(5.0)).unwrap(),
            Vec3::new(0.0, 3.0, 4.0),
            epsilon = 1e-15
        );
        assert_eq!(
            invert_point(Vec3::zeros(), s(1.0)),
            Err(Error::PointAtOrigin)
        );
    }

    #[test]
    fn inversion_sphere_rejects_bad_radius() {
        assert!(InversionSphere::new(0.0).is_err());
        assert!(InversionSphere::new(-1.0).is_err());
        assert!(InversionSphere::new(f64::NAN).is_err());
    }

    #[test]
    fn invert_normal_examples() {
        let j = jet([1.0, 0.0, 0.0], [1.0, 0.0, 0.0], 0.0, 0.0);
        assert_relative_eq!(
            invert_normal(&j, s(1.0)).unwrap().into_inner(),
            Vec3::new(-1.0, 0.0, 0.0)
        );
        let j = jet([0.0, 0.0, 1.0], [1.0, 0.0, 0.0], 0.0, 0.0);
        assert_relative_eq!(
            invert_normal(&j, s(1.0)).unwrap().into_inner(),
            Vec3::new(1.0, 0.0, 0.0)
        );
        // N - 2<N,p>p/|p|^2 with <N,p> = sqrt2, p/|p|^2 = (0,0,1/2).
        let j = jet([0.0, 0.0, 2.0], [0.0, FRAC_1_SQRT_2, FRAC_1_SQRT_2], 0.0, 0.0);
        let n = invert_normal(&j, s(3.0)).unwrap();
        assert_relative_eq!(
            n.into_inner(),
            Vec3::new(0.0, FRAC_1_SQRT_2, -FRAC_1_SQRT_2),
            epsilon = 1e-15
        );
        // independent of the radius
        assert_eq!(n, invert_normal(&j, s(0.1)).unwrap());
    }

    #[test]
    fn invert_jet_examples() {
        // unit sphere, inward normal: image is the same sphere, outward normal
        let j = jet([0.0, 0.0, 1.0], [0.0, 0.0, -1.0], 1.0, 1.0);
        let k = invert_jet(&j, s(1.0)).unwrap();
        assert_relative_eq!(k.p(), Vec3::new(0.0, 0.0, 1.0));
        assert_relative_eq!(k.n().into_inner(), Vec3::new(0.0, 0.0, 1.0));
        assert_eq!((k.lambda1(), k.lambda2(), k.h()), (-1.0, -1.0, -1.0));

        // plane through the origin maps to itself
        let j = jet([0.3, -2.0, 0.0], [0.0, 0.0, 1.0], 0.0, 0.0);
        let k = invert_jet(&j, s(1.7)).unwrap();
        assert_eq!((k.lambda1(), k.lambda2(), k.h()), (0.0, 0.0, 0.0));

        // sphere through O maps to a plane
        let j = jet([0.0, 0.0, 2.0], [0.0, 0.0, -1.0], 1.0, 1.0);
        let k = invert_jet(&j, s(1.0)).unwrap();
        assert_eq!(k.h(), 0.0);
        assert!(invert_jet(&jet([0.0; 3], [0.0, 0.0, 1.0], 1.0, 1.0), s(1.0)).is_err());
    }

    #[test]
    fn invert_jet_mean_is_exact_average() {
        let j = jet([0.1, 0.7, -0.4], [0.3, 0.1, 0.9], 0.37, -2.9);
        let k = invert_jet(&j, s(0.83)).unwrap();
        assert_eq!(k.h(), 0.5 * (k.lambda1() + k.lambda2()));
    }

    #[test]
    fn support_function_examples() {
        assert_eq!(support_function(&jet([0.0, 0.0, 1.0], [0.0, 0.0, -1.0], 0.0, 0.0)), -1.0);
        assert_eq!(support_function(&jet([1.0, 0.0, 0.0], [0.0, 1.0, 0.0], 0.0, 0.0)), 0.0);
        assert_relative_eq!(
            support_function(&jet([0.0, 0.0, 2.0], [0.0, 1.0, 1.0], 0.0, 0.0)),
            2.0_f64.sqrt(),
            epsilon = 1e-15
        );
    }

    #[test]
    fn residual_examples() {
        let plane = jet([0.4, 1.1, 0.0], [0.0, 0.0, -1.0], 0.0, 0.0);
        assert_eq!(inversion_invariance_residual(&plane, s(2.3)).unwrap(), 0.0);

        // sphere centered (0,0,sqrt2), radius 1: orthogonal to S_1
        let c = Vec3::new(0.0, 0.0, 2.0_f64.sqrt());
        for k in 0..50 {
            let t = k as f64 * 0.37;
            let u = 0.9 * (k as f64 * 0.11).sin();
            let dir = Vec3::new(t.cos() * u.cos(), t.sin() * u.cos(), u.sin());
            let j = SurfaceJet::on_sphere_inward(c, 1.0, c + dir).unwrap();
            assert!(inversion_invariance_residual(&j, s(1.0)).unwrap().abs() < 1e-12);
        }

        // S_1 with inward normal: set-wise invariant, oriented residual -2
        let j = jet([0.0, 0.0, 1.0], [0.0, 0.0, -1.0], 1.0, 1.0);
        assert_relative_eq!(inversion_invariance_residual(&j, s(1.0)).unwrap(), -2.0);
    }

    #[test]
    fn homothety_examples() {
        let j = jet([0.0, 0.0, 1.0], [0.0, 0.0, -1.0], 1.0, 1.0);
        let k = homothety_jet(&j, 2.0).unwrap();
        assert_eq!((k.lambda1(), k.h()), (0.5, 0.5));
        assert_eq!(k.p(), Vec3::new(0.0, 0.0, 2.0));
        assert_eq!(homothety_jet(&j, 1.0).unwrap(), j);
        let plane = jet([1.0, 2.0, 3.0], [0.0, 0.0, 1.0], 0.0, 0.0);
        assert_eq!(homothety_jet(&plane, 7.5).unwrap().h(), 0.0);
        assert_eq!(homothety_jet(&j, 0.0), Err(Error::InvalidRatio(0.0)));
        assert!(homothety_jet(&j, -1.0).is_err());
    }
}
