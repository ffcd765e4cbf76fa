//! Minimizes the capillary energy at fixed volume, checks the equilibrium and
//! writes the field, mesh and history.

use std::f64::consts::PI;

use capcone::cone::{construct_cap, CircularCone, Cone};
use capcone::io::{write_field_csv, write_history_csv, write_obj, RunManifest};
use capcone::mesh::mesh_radial_graph;
use capcone::solver::{solve_with_history, verify_equilibrium, SolverConfig};

fn main() -> capcone::Result<()> {
    let phi = PI / 6.0;
    let gamma = 0.75 * PI;
    let cone = Cone::circular(phi)?;
    let volume = 2.0 * PI * (1.0 - phi.cos()) / 3.0;
    let config = SolverConfig::new(gamma, volume, 64, 64);
    let (result, history) = solve_with_history(&config, &cone, None)?;
    println!(
        "{} iterations, energy {:.10}, H {:.5} (spread {:.2e})",
        result.iterations, result.energy, result.mean_curvature, result.h_spread
    );
    let report = verify_equilibrium(&result, &cone, gamma)?;
    println!(
        "contact angle error {:.3} deg, sign agrees {}",
        report.contact_angle_error.to_degrees(),
        report.sign_agrees
    );

    // the cap through the same boundary has the same shape up to scale
    let cap = construct_cap(&CircularCone::new(phi)?, gamma, 1.0)?;
    let d = result.field.rho()[result.field.grid().node_count() - 1];
    println!("cap H at that boundary distance {:.5}", cap.mean_curvature / d);

    let dir = std::env::temp_dir();
    let manifest = RunManifest::new("solve example").param("config", config);
    write_field_csv(&dir.join("drop.csv"), &result.field, &manifest)?;
    write_history_csv(&dir.join("drop_history.csv"), &history, &manifest)?;
    write_obj(&dir.join("drop.obj"), &mesh_radial_graph(&result.field, &cone)?, &manifest)?;
    println!("wrote drop.csv, drop_history.csv, drop.obj to {}", dir.display());
    Ok(())
}
