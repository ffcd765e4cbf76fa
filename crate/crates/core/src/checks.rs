//! Invariant suites run on a mesh: the inversion formula against the
//! discrete curvature of the inverted mesh, and the inversion-invariance
//! residual.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::geom::{inversion_invariance_residual, invert_jet, InversionSphere};
use crate::mesh::{discrete_jets, fitted_sphere_jets, invert_mesh, TriangleMesh};

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "camelCase")]
pub struct InversionCheck {
    pub radius: f64,
    pub vertices: usize,
    /// Largest `|H^ - H^_disc| / max(|H^|, 1 / extent)` over compared vertices,
    /// `extent` being the largest vertex distance of the image.
    pub max_relative_error: f64,
    pub mean_relative_error: f64,
}

/// Compares the mean curvature predicted by the inversion formula with the
/// discrete mean curvature of the inverted mesh.
///
/// Source jets come from [`fitted_sphere_jets`], which are exact on sphere
/// and plane meshes. Interior vertices of both meshes are compared.
pub fn inversion_check(mesh: &TriangleMesh, radius: f64) -> Result<InversionCheck> {
    let s = InversionSphere::new(radius)?;
    let image = invert_mesh(mesh, s)?;
    let source = fitted_sphere_jets(mesh);
    let disc = discrete_jets(&image);
    let floor = 1.0 / image.max_radius();
    let mut errs = Vec::new();
    for (j, d) in source.iter().zip(&disc.jets) {
        if let (Some(j), Some(d)) = (j, d) {
            let h = invert_jet(j, s)?.h();
            // the image winding normal is opposite to the inverted normal
            errs.push((h + d.h()).abs() / h.abs().max(floor));
        }
    }
    if errs.is_empty() {
        return Err(Error::InvalidMesh("no interior vertices to compare".into()));
    }
    Ok(InversionCheck {
        radius,
        vertices: errs.len(),
        max_relative_error: errs.iter().copied().fold(0.0, f64::max),
        mean_relative_error: errs.iter().sum::<f64>() / errs.len() as f64,
    })
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "camelCase")]
pub struct ResidualCheck {
    pub radius: f64,
    pub vertices: usize,
    pub max_abs_residual: f64,
}

/// `max |p|^2 H + 2<N, p> - H r^2` over interior vertices, with jets from
/// [`fitted_sphere_jets`].
pub fn residual_check(mesh: &TriangleMesh, radius: f64) -> Result<ResidualCheck> {
    let s = InversionSphere::new(radius)?;
    let mut max = 0.0f64;
    let mut count = 0;
    for j in fitted_sphere_jets(mesh).iter().flatten() {
        max = max.max(inversion_invariance_residual(j, s)?.abs());
        count += 1;
    }
    if count == 0 {
        return Err(Error::InvalidMesh("no interior vertices to test".into()));
    }
    Ok(ResidualCheck {
        radius,
        vertices: count,
        max_abs_residual: max,
    })
}
