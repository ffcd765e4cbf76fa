//! Finds the vertical symmetry plane of a drop sitting on the cone wall, then
//! rotates the drop and finds the plane again.

use capcone::reflect::{planar_symmetry_detect, SymmetryOptions};
use capcone::specimens::{rotate_about_axis, wall_drop};

fn main() -> capcone::Result<()> {
    let mesh = wall_drop(0.5, 1.0, 0.25, 0.1, 48, 24)?;
    let opts = SymmetryOptions::default();
    for beta in [0.0, 0.4, 1.3] {
        let rep = planar_symmetry_detect(&rotate_about_axis(&mesh, beta)?, &opts);
        println!(
            "rotated by {beta:.1}: found {}, plane t = {:.9}, deviation {:.2e}",
            rep.found,
            rep.plane.unwrap_or(f64::NAN),
            rep.deviation
        );
    }
    Ok(())
}
