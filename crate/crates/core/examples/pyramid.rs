//! A drop in a square pyramid. At gamma = pi/2 the sphere about the apex
//! meets every face orthogonally and is the exact answer; at other angles the
//! edges of the pyramid pull the contact line away from gamma.

use capcone::cone::{Cone, GeneralCone};
use capcone::geom::Vec3;
use capcone::mesh::mesh_radial_graph;
use capcone::reflect::{spherical_sweep, SweepOptions};
use capcone::solver::{solve, SolverConfig};

fn main() -> capcone::Result<()> {
    let (s, c) = 0.5f64.sin_cos();
    let boundary = [(1.0, 1.0), (-1.0, 1.0), (-1.0, -1.0), (1.0, -1.0)]
        .iter()
        .map(|&(x, y)| Vec3::new(x * s / 2f64.sqrt(), y * s / 2f64.sqrt(), c).normalize())
        .collect();
    let cone = Cone::General(GeneralCone::new(boundary, Vec3::z())?);
    for gamma in [std::f64::consts::FRAC_PI_2, 2.3] {
        let result = solve(&SolverConfig::new(gamma, 0.5, 48, 32), &cone, None)?;
        let rho = result.field.rho();
        let (lo, hi) = rho.iter().fold((f64::MAX, f64::MIN), |(l, h), r| (l.min(*r), h.max(*r)));
        println!(
            "gamma {gamma:.3}: {} iterations, H {:.4}, radius spread {:.2e}, max contact angle error {:.2} deg",
            result.iterations,
            result.mean_curvature,
            (hi - lo) / hi,
            result.contact_angle_error.to_degrees()
        );
        let mesh = mesh_radial_graph(&result.field, &cone)?;
        let rep = spherical_sweep(&mesh, &cone, &SweepOptions::default())?;
        println!("  sweep: {:?}, r1 {:.2e}", rep.terminal, rep.r1);
    }
    Ok(())
}
