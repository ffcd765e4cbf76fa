//! Builds the spherical cap for one configuration, measures its contact angle
//! around the boundary and writes it as OBJ.

use std::path::Path;

use capcone::cone::{construct_cap, CircularCone};
use capcone::io::{write_obj, RunManifest};
use capcone::mesh::mesh_spherical_cap;

fn main() -> capcone::Result<()> {
    let phi = 35f64.to_radians();
    let gamma = 120f64.to_radians();
    let cap = construct_cap(&CircularCone::new(phi)?, gamma, 1.0)?;
    println!("{}", serde_json::to_string_pretty(&cap).unwrap());

    let worst = (0..16)
        .map(|k| cap.measured_contact_angle(k as f64 * std::f64::consts::TAU / 16.0))
        .collect::<capcone::Result<Vec<_>>>()?
        .into_iter()
        .map(|a| (a - gamma).abs())
        .fold(0.0, f64::max);
    println!("contact angle error {worst:.2e}");

    let mesh = mesh_spherical_cap(&cap, 48, 24)?;
    let out = std::env::temp_dir().join("cap.obj");
    let manifest = RunManifest::new("construct_cap example")
        .param("phi", phi)
        .param("gamma", gamma)
        .output(Path::new(&out));
    write_obj(&out, &mesh, &manifest)?;
    println!("wrote {}", out.display());
    Ok(())
}
