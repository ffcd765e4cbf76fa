//! Curvature of the inverted surface against H over a range of inversion
//! radii, for a concave cap.

use capcone::cone::{construct_cap, CircularCone};
use capcone::mesh::mesh_spherical_cap;
use capcone::reflect::boundedness_check;

fn main() -> capcone::Result<()> {
    let cap = construct_cap(&CircularCone::new(0.7)?, 2.5, 1.0)?;
    let mesh = mesh_spherical_cap(&cap, 48, 24)?;
    let r0 = mesh.max_radius();
    println!("H = {:.5}, r0 = {r0:.4}", cap.mean_curvature);
    for k in (2..=10).step_by(2) {
        let r = r0 * k as f64 / 10.0;
        let rep = boundedness_check(&mesh, cap.mean_curvature, r)?;
        println!(
            "r = {r:.3}: {:>5} points, max(H^ - H) = {:+.4}, pass {}",
            rep.tested,
            rep.max_excess,
            rep.passes(1e-9)
        );
    }
    Ok(())
}
