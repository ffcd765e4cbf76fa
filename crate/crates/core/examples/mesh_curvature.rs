//! Discrete mean curvature on meshed caps, with the cotangent estimator and
//! the fitted-sphere estimator side by side.

use capcone::cone::{construct_cap, CircularCone};
use capcone::mesh::{discrete_jets, fitted_sphere_jets, mesh_spherical_cap};

fn main() -> capcone::Result<()> {
    let cone = CircularCone::new(0.6)?;
    for gamma in [1.2, 1.8, 2.6] {
        let cap = construct_cap(&cone, gamma, 1.0)?;
        let mesh = mesh_spherical_cap(&cap, 48, 24)?;
        let cot = discrete_jets(&mesh);
        let fit = fitted_sphere_jets(&mesh);
        let err = |h: f64| (h - cap.mean_curvature).abs() / cap.mean_curvature.abs();
        let max_cot = cot.jets.iter().flatten().map(|j| err(j.h())).fold(0.0, f64::max);
        let max_fit = fit.iter().flatten().map(|j| err(j.h())).fold(0.0, f64::max);
        println!(
            "gamma {gamma:.2}: H = {:+.5}, cotangent max rel err {max_cot:.2e}, fitted {max_fit:.2e}, {} obtuse-dominated",
            cap.mean_curvature,
            cot.quality.obtuse_dominated.len()
        );
    }
    Ok(())
}
