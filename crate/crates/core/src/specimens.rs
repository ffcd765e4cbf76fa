//! Hand-built surfaces that exercise the diagnostics beyond the cap family.

use std::f64::consts::PI;

use crate::cone::{inward_cone_normal, CircularCone, Cone};
use crate::domain::SphericalDomain;
use crate::error::Result;
use crate::field::{PolarGrid, RadialGraphField};
use crate::geom::Vec3;
use crate::mesh::{polar_mesh, surface_of_revolution, TriangleMesh};

/// Surface of revolution in the cone of half-angle `phi` whose meridian
/// folds back: it runs out to `0.6 phi` at distance 1, turns back to
/// `0.3 phi` while climbing to 1.3, then runs out to the wall at 1.2.
/// Rays with polar angle in `(0.3 phi, 0.6 phi)` meet it three times.
pub fn folded_revolution(phi: f64, n_theta: usize, n_meridian: usize) -> Result<TriangleMesh> {
    let n = n_meridian.max(10);
    let meridian: Vec<(f64, f64)> = (0..=n)
        .map(|k| {
            let a = k as f64 / n as f64;
            if a < 0.4 {
                (0.6 * phi * a / 0.4, 1.0)
            } else if a < 0.6 {
                let b = (a - 0.4) / 0.2;
                (0.6 * phi - 0.3 * phi * b, 1.0 + 0.3 * b)
            } else {
                let b = (a - 0.6) / 0.4;
                (0.3 * phi + 0.7 * phi * b, 1.3 - 0.1 * b)
            }
        })
        .collect();
    surface_of_revolution(&meridian, n_theta)
}

/// Radial graph over the cap of half-angle `phi` with a deep inward dimple
/// near the boundary at azimuth 0.
pub fn dimpled_field(phi: f64, n: usize) -> Result<RadialGraphField> {
    let grid = PolarGrid::new(SphericalDomain::cap(phi), n, n)?;
    RadialGraphField::from_fn(grid, |theta, s| {
        let dt = theta.sin().atan2(theta.cos());
        let ds = (s - 0.8 * phi) / (0.12 * phi);
        1.0 - 0.4 * (-(ds * ds) - (dt / 0.35).powi(2)).exp()
    })
}

/// Spherical cap sitting on the wall of the cone of half-angle `phi`: the
/// part inside the cone of the sphere of radius `radius` centered `depth`
/// inside the wall from the wall point at distance `distance` on the
/// meridian `y = 0`, `x > 0`. Its boundary lies in the half-cone `x > 0`
/// and it is symmetric about the plane `y = 0`.
///
/// The mesh is a polar grid about the deepest point, wound with the normal
/// toward the sphere's center.
pub fn wall_drop(phi: f64, distance: f64, radius: f64, depth: f64, n_theta: usize, n_s: usize) -> Result<TriangleMesh> {
    let cone = CircularCone::new(phi)?;
    let w0 = cone.wall_point(distance, 0.0);
    let a = inward_cone_normal(w0, &Cone::Circular(cone))?.into_inner();
    let center = w0 + a * depth;
    let e1 = Vec3::new(phi.sin(), 0.0, phi.cos());
    let e2 = a.cross(&e1);
    let at = |theta: f64, sigma: f64| {
        center + (a * sigma.cos() + (e1 * theta.cos() + e2 * theta.sin()) * sigma.sin()) * radius
    };
    let gap = |p: Vec3| p.xy().norm().atan2(p.z) - phi;
    let sigma_max = |theta: f64| {
        let (mut lo, mut hi) = (0.0, PI);
        for _ in 0..200 {
            let mid = 0.5 * (lo + hi);
            if gap(at(theta, mid)) < 0.0 {
                lo = mid;
            } else {
                hi = mid;
            }
        }
        0.5 * (lo + hi)
    };
    let thetas: Vec<f64> = (0..n_theta).map(|j| 2.0 * PI * j as f64 / n_theta as f64).collect();
    let smax: Vec<f64> = thetas.iter().map(|&t| sigma_max(t)).collect();
    polar_mesh(n_theta, n_s, |i, j| {
        if i == 0 {
            at(0.0, 0.0)
        } else {
            at(thetas[j], smax[j] * i as f64 / n_s as f64)
        }
    })
}

/// Rotation of a mesh by `beta` about the cone axis.
pub fn rotate_about_axis(mesh: &TriangleMesh, beta: f64) -> Result<TriangleMesh> {
    let (s, c) = beta.sin_cos();
    mesh.map_vertices(|v| Vec3::new(c * v.x - s * v.y, s * v.x + c * v.y, v.z))
}
