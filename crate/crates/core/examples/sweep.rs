//! Reflection sweep of a concave cap (reaches the apex) and of a folded
//! surface of revolution (stalls at a touching point).

use capcone::cone::{construct_cap, CircularCone, Cone};
use capcone::mesh::mesh_spherical_cap;
use capcone::reflect::{spherical_sweep, touching_consistent, SweepOptions};
use capcone::specimens::folded_revolution;

fn main() -> capcone::Result<()> {
    let phi = 0.5;
    let cone = CircularCone::new(phi)?;
    let cap = mesh_spherical_cap(&construct_cap(&cone, 2.4, 1.0)?, 48, 24)?;
    let opts = SweepOptions::default();
    let rep = spherical_sweep(&cap, &Cone::Circular(cone), &opts)?;
    println!("cap: {:?}, r0 {:.4}, r1 {:.3e}", rep.terminal, rep.r0, rep.r1);

    let folded = folded_revolution(phi, 48, 60)?;
    let opts = SweepOptions {
        require_radial_graph: false,
        ..opts
    };
    let rep = spherical_sweep(&folded, &Cone::Circular(cone), &opts)?;
    println!("folded: {:?}, r0 {:.4}, r1 {:.4}", rep.terminal, rep.r0, rep.r1);
    if let Some(t) = rep.touching {
        println!("  touching {:?} at {:?}", t.class, t.p0.as_slice());
        println!("  consistent: {}", touching_consistent(&rep, &folded, &opts));
    }
    Ok(())
}
