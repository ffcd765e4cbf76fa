//! Reflection sweep, boundedness and symmetry on caps and hand-built specimens.

use std::f64::consts::{FRAC_PI_2, FRAC_PI_6};

use capcone::cone::{construct_cap, CircularCone, Cone};
use capcone::mesh::{is_radial_graph, mesh_radial_graph, mesh_spherical_cap};
use capcone::reflect::{
    boundedness_check, planar_symmetry_detect, spherical_sweep, spherical_sweep_profile, touching_consistent,
    SweepOptions, SymmetryOptions, Terminal,
};
use capcone::specimens::{dimpled_field, folded_revolution, rotate_about_axis, wall_drop};

fn cone(phi: f64) -> Cone {
    Cone::circular(phi).unwrap()
}

#[test]
fn concave_cap_sweep_reaches_the_apex() {
    let c = CircularCone::new(FRAC_PI_6).unwrap();
    let cap = construct_cap(&c, 2.5, 1.0).unwrap();
    let mesh = mesh_spherical_cap(&cap, 48, 24).unwrap();
    let opts = SweepOptions::default();
    let rep = spherical_sweep(&mesh, &Cone::Circular(c), &opts).unwrap();
    assert_eq!(rep.terminal, Terminal::ReachedZero);
    assert!(rep.touching.is_none());
    assert!(touching_consistent(&rep, &mesh, &opts));
    let profile = spherical_sweep_profile(&mesh, &Cone::Circular(c), &opts).unwrap();
    assert!(profile.is_monotone());
}

#[test]
fn folded_surface_stalls_with_a_consistent_touching_point() {
    let phi = FRAC_PI_6;
    let mesh = folded_revolution(phi, 48, 60).unwrap();
    assert!(!is_radial_graph(&mesh).radial);
    let strict = SweepOptions::default();
    assert!(spherical_sweep(&mesh, &cone(phi), &strict).is_err());
    let opts = SweepOptions {
        require_radial_graph: false,
        ..strict
    };
    let rep = spherical_sweep(&mesh, &cone(phi), &opts).unwrap();
    assert_eq!(rep.terminal, Terminal::Stalled);
    assert!(rep.r1 > 0.0 && rep.r1 < rep.r0);
    assert!(rep.touching.is_some());
    assert!(touching_consistent(&rep, &mesh, &opts));
}

// inversion keeps rays, so a radial graph never blocks its own reflection
#[test]
fn dimpled_graph_still_reaches_the_apex() {
    let phi = FRAC_PI_6;
    let field = dimpled_field(phi, 48).unwrap();
    let mesh = mesh_radial_graph(&field, &cone(phi)).unwrap();
    assert!(is_radial_graph(&mesh).radial);
    let opts = SweepOptions::default();
    let rep = spherical_sweep(&mesh, &cone(phi), &opts).unwrap();
    assert_eq!(rep.terminal, Terminal::ReachedZero);
    assert!(touching_consistent(&rep, &mesh, &opts));
}

#[test]
fn boundedness_holds_on_concave_caps_and_rejects_positive_h() {
    let c = CircularCone::new(0.8).unwrap();
    let cap = construct_cap(&c, 2.6, 1.0).unwrap();
    assert!(cap.mean_curvature < 0.0);
    let mesh = mesh_spherical_cap(&cap, 48, 24).unwrap();
    for k in 1..=10 {
        let r = mesh.max_radius() * k as f64 / 10.0;
        assert!(boundedness_check(&mesh, cap.mean_curvature, r).unwrap().passes(1e-9));
    }
    assert!(boundedness_check(&mesh, 0.5, 1.0).is_err());
}

#[test]
fn wall_drop_is_symmetric_and_rotates_with_the_mesh() {
    let mesh = wall_drop(0.5, 1.2, 0.3, 0.12, 40, 20).unwrap();
    let opts = SymmetryOptions::default();
    let rep = planar_symmetry_detect(&mesh, &opts);
    assert!(rep.found);
    assert!(rep.half_cone);
    let t = rep.plane.unwrap();
    assert!((t - FRAC_PI_2).abs() < 1e-9 || t.abs() < 1e-9 || (t - std::f64::consts::PI).abs() < 1e-9);
    let rot = planar_symmetry_detect(&rotate_about_axis(&mesh, 0.7).unwrap(), &opts);
    assert!(rot.found);
}

#[test]
fn cap_is_symmetric_about_every_plane() {
    let cap = construct_cap(&CircularCone::new(FRAC_PI_6).unwrap(), 2.0, 1.0).unwrap();
    let mesh = mesh_spherical_cap(&cap, 32, 16).unwrap();
    let rep = planar_symmetry_detect(&mesh, &SymmetryOptions::default());
    assert!(rep.found);
    assert!(!rep.half_cone);
}
