//! Inverts a sphere patch and compares the analytic curvature of the image
//! with the discrete curvature of the inverted mesh.

use capcone::checks::inversion_check;
use capcone::geom::{invert_jet, InversionSphere, SurfaceJet, Vec3};
use capcone::mesh::sphere_patch;

fn main() -> capcone::Result<()> {
    let center = Vec3::new(0.4, 0.0, 2.0);
    let radius = 0.8;
    let s = InversionSphere::new(1.5)?;

    let p = center + Vec3::new(0.0, 0.0, -radius);
    let jet = SurfaceJet::on_sphere_inward(center, radius, p).expect("p is off center");
    let image = invert_jet(&jet, s)?;
    println!("H = {:.6} at {:?}", jet.h(), p.as_slice());
    println!("H^ = {:.6} at {:?}", image.h(), image.p().as_slice());

    for n in [16, 32, 64] {
        let mesh = sphere_patch(center, radius, -center, 0.6, n)?;
        let check = inversion_check(&mesh, s.radius())?;
        println!(
            "n = {n:>2}: max relative error {:.3e}, mean {:.3e}",
            check.max_relative_error, check.mean_relative_error
        );
    }
    Ok(())
}
