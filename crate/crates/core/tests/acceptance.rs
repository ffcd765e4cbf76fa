//! Acceptance criteria, one PASS/FAIL line each.
//!
//! Runs without the libtest harness so every line prints. Criterion 6 is
//! stated for a flat interface at gamma = (pi + phi)/2, where no plane can
//! meet a circular cone; it is run as stated and listed in `KNOWN_FAILURES`.
//! The same benchmark at the flat angle gamma = pi/2 + phi is reported as 6b.

use std::f64::consts::{FRAC_PI_2, FRAC_PI_6, PI};
use std::time::Instant;

use capcone::cone::{
    classification_threshold, classify_configuration, construct_cap, sign_of_h, CapCase, CircularCone, Cone, HSign,
};
use capcone::domain::SphericalDomain;
use capcone::field::{drop_measures, PolarGrid, RadialGraphField};
use capcone::geom::{inversion_invariance_residual, invert_jet, unit, InversionSphere, SurfaceJet, Vec3};
use capcone::mesh::{
    discrete_jets, invert_mesh, is_radial_graph, mesh_radial_graph, mesh_spherical_cap, plane_patch, sphere_patch,
    TriangleMesh,
};
use capcone::reflect::{
    boundedness_check, planar_symmetry_detect, spherical_sweep, SweepOptions, SymmetryOptions, Terminal,
};
use capcone::solver::{capillary_energy, energy_gradient, solve_with_history, HistoryRow, SolverConfig, SolverResult};
use capcone::specimens::{rotate_about_axis, wall_drop};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

const KNOWN_FAILURES: &[&str] = &["6"];

struct Outcome {
    pass: bool,
    detail: String,
}

fn outcome(pass: bool, detail: String) -> Outcome {
    Outcome { pass, detail }
}

fn rel(a: f64, b: f64) -> f64 {
    (a - b).abs() / b.abs().max(f64::MIN_POSITIVE)
}

fn random_unit(rng: &mut ChaCha8Rng) -> Vec3 {
    loop {
        let v = Vec3::new(rng.gen_range(-1.0..1.0), rng.gen_range(-1.0..1.0), rng.gen_range(-1.0..1.0));
        let n = v.norm();
        if n > 0.1 && n < 1.0 {
            return v / n;
        }
    }
}

/// Max over interior vertices of `|H^ - H^_disc| / max(|H^|, 1 / extent)`,
/// with analytic source jets.
fn inversion_error(mesh: &TriangleMesh, jet: impl Fn(Vec3) -> SurfaceJet, s: InversionSphere) -> f64 {
    let image = invert_mesh(mesh, s).unwrap();
    let disc = discrete_jets(&image);
    let floor = 1.0 / image.max_radius();
    let mut worst: f64 = 0.0;
    for (p, d) in mesh.vertices().iter().zip(&disc.jets) {
        if let Some(d) = d {
            let h = invert_jet(&jet(*p), s).unwrap().h();
            worst = worst.max((h + d.h()).abs() / h.abs().max(floor));
        }
    }
    worst
}

fn criterion_1() -> Outcome {
    let t = Instant::now();
    let mut rng = ChaCha8Rng::seed_from_u64(1);
    let mut worst: f64 = 0.0;
    let mut worst_ratio: f64 = 0.0;
    for k in 0..10 {
        let s = InversionSphere::new(rng.gen_range(0.5..2.0)).unwrap();
        let (coarse, fine) = if k < 7 {
            // sphere not through the origin
            let radius = rng.gen_range(0.3..1.0);
            let center = random_unit(&mut rng) * rng.gen_range(radius + 0.6..radius + 2.5);
            let axis = -center + random_unit(&mut rng) * 0.3 * center.norm();
            let w = rng.gen_range(0.3..0.7);
            let jet = move |p: Vec3| SurfaceJet::on_sphere_inward(center, radius, p).unwrap();
            let m32 = sphere_patch(center, radius, axis, w, 32).unwrap();
            let m64 = sphere_patch(center, radius, axis, w, 64).unwrap();
            (inversion_error(&m32, jet, s), inversion_error(&m64, jet, s))
        } else {
            let normal = unit(random_unit(&mut rng)).unwrap();
            let point = normal.into_inner() * rng.gen_range(0.5..2.0) + random_unit(&mut rng) * 0.2;
            let w = rng.gen_range(0.3..0.8);
            let jet = move |p: Vec3| SurfaceJet::new(p, normal, 0.0, 0.0);
            let m32 = plane_patch(point, normal.into_inner(), w, 32).unwrap();
            let m64 = plane_patch(point, normal.into_inner(), w, 64).unwrap();
            (inversion_error(&m32, jet, s), inversion_error(&m64, jet, s))
        };
        worst = worst.max(fine);
        worst_ratio = worst_ratio.max(fine / coarse);
    }
    let secs = t.elapsed().as_secs_f64();
    outcome(
        worst < 0.05 && worst_ratio <= 0.65 && secs < 10.0,
        format!("max relative error {worst:.2e} at 64, worst refinement ratio {worst_ratio:.3}, {secs:.2} s"),
    )
}

fn criterion_2() -> Outcome {
    let mut rng = ChaCha8Rng::seed_from_u64(2);
    let mut ortho: f64 = 0.0;
    for _ in 0..10 {
        let r: f64 = rng.gen_range(0.5..2.0);
        let big_r: f64 = rng.gen_range(0.2..2.0);
        let center = random_unit(&mut rng) * (r * r + big_r * big_r).sqrt();
        let s = InversionSphere::new(r).unwrap();
        for _ in 0..50 {
            let p = center + random_unit(&mut rng) * big_r;
            let j = SurfaceJet::on_sphere_inward(center, big_r, p).unwrap();
            ortho = ortho.max(inversion_invariance_residual(&j, s).unwrap().abs());
            ortho = ortho.max(inversion_invariance_residual(&j.flipped(), s).unwrap().abs());
        }
    }
    let mut plane: f64 = 0.0;
    let s = InversionSphere::new(1.3).unwrap();
    for axis in 0..3 {
        let mut n = Vec3::zeros();
        n[axis] = 1.0;
        let n = unit(n).unwrap();
        for _ in 0..50 {
            let mut p = random_unit(&mut rng) * rng.gen_range(0.1..3.0);
            p[axis] = 0.0;
            plane = plane.max(inversion_invariance_residual(&SurfaceJet::new(p, n, 0.0, 0.0), s).unwrap().abs());
        }
    }
    // a sphere at twice the orthogonal distance
    let center = Vec3::new(0.0, 0.0, 2.0 * 2f64.sqrt());
    let s = InversionSphere::new(1.0).unwrap();
    let mut off: f64 = 0.0;
    for _ in 0..50 {
        let p = center + random_unit(&mut rng);
        let j = SurfaceJet::on_sphere_inward(center, 1.0, p).unwrap();
        off = off.max(inversion_invariance_residual(&j, s).unwrap().abs());
    }
    outcome(
        ortho < 1e-10 && plane == 0.0 && off > 0.1,
        format!("orthogonal max {ortho:.2e}, planes through O max {plane:e}, non-orthogonal max {off:.3}"),
    )
}

fn criterion_3() -> Outcome {
    let n = 50;
    let mut seen_cases = Vec::new();
    let mut seen_signs = Vec::new();
    let mut contradictions = 0;
    let mut flagged_interior = 0;
    for i in 0..n {
        for j in 0..n {
            let gamma = PI * (i as f64 + 0.5) / n as f64;
            let phi = FRAC_PI_2 * (j as f64 + 0.5) / n as f64;
            let case = classify_configuration(gamma, phi).unwrap();
            let sign = sign_of_h(gamma, phi).unwrap();
            let expected = if gamma > FRAC_PI_2 + phi {
                CapCase::ConcaveA
            } else if gamma >= FRAC_PI_2 - phi {
                CapCase::ConvexB
            } else {
                CapCase::TwoCapsC
            };
            let sign_ok = match case {
                CapCase::ConcaveA => sign == HSign::Negative,
                CapCase::ConvexB | CapCase::TwoCapsC => sign == HSign::Positive,
                CapCase::FlatD => sign == HSign::Zero,
            };
            // the constructed cap carries the sign too
            let cap = construct_cap(&CircularCone::new(phi).unwrap(), gamma, 1.0).unwrap();
            let cap_ok = match sign {
                HSign::Positive => cap.mean_curvature > 0.0,
                HSign::Negative => cap.mean_curvature < 0.0,
                HSign::Zero => cap.mean_curvature == 0.0,
            };
            if case != expected || !sign_ok || !cap_ok {
                contradictions += 1;
            }
            if classification_threshold(gamma, phi).is_some() {
                flagged_interior += 1;
            }
            if !seen_cases.contains(&case) {
                seen_cases.push(case);
            }
            if !seen_signs.contains(&sign) {
                seen_signs.push(sign);
            }
        }
    }
    // boundary rows
    let mut boundary_ok = true;
    for j in 0..n {
        let phi = FRAC_PI_2 * (j as f64 + 0.5) / n as f64;
        let flat = FRAC_PI_2 + phi;
        boundary_ok &= classify_configuration(flat, phi).unwrap() == CapCase::FlatD;
        boundary_ok &= sign_of_h(flat, phi).unwrap() == HSign::Zero;
        boundary_ok &= classification_threshold(flat, phi).is_some();
        boundary_ok &= classification_threshold(FRAC_PI_2 - phi, phi).is_some();
        boundary_ok &= classify_configuration(FRAC_PI_2 - phi, phi).unwrap() == CapCase::ConvexB;
    }
    seen_cases.push(CapCase::FlatD);
    seen_signs.push(HSign::Zero);
    let all = [CapCase::ConcaveA, CapCase::ConvexB, CapCase::TwoCapsC, CapCase::FlatD]
        .iter()
        .all(|c| seen_cases.contains(c))
        && [HSign::Positive, HSign::Zero, HSign::Negative].iter().all(|s| seen_signs.contains(s));
    outcome(
        contradictions == 0 && flagged_interior == 0 && boundary_ok && all,
        format!("{contradictions} contradictions, {flagged_interior} interior points flagged, boundary rows ok: {boundary_ok}"),
    )
}

fn criterion_4() -> Outcome {
    let mut rng = ChaCha8Rng::seed_from_u64(4);
    let mut angle_err: f64 = 0.0;
    let mut equiv: f64 = 0.0;
    for _ in 0..20 {
        let phi = rng.gen_range(0.1..1.4);
        let gamma = rng.gen_range((FRAC_PI_2 - phi)..PI - 0.05);
        let cone = CircularCone::new(phi).unwrap();
        let d = rng.gen_range(0.2..3.0);
        let cap = construct_cap(&cone, gamma, d).unwrap();
        for k in 0..8 {
            let theta = 2.0 * PI * k as f64 / 8.0;
            angle_err = angle_err.max((cap.measured_contact_angle(theta).unwrap() - gamma).abs());
        }
        let ratio = rng.gen_range(0.1..10.0);
        let big = construct_cap(&cone, gamma, d * ratio).unwrap();
        equiv = equiv.max(rel(big.mean_curvature * ratio, cap.mean_curvature));
        for k in 0..8 {
            let s = phi * k as f64 / 8.0;
            equiv = equiv.max(rel(big.radial_distance(s), ratio * cap.radial_distance(s)));
        }
    }
    outcome(
        angle_err < 1e-9 && equiv < 1e-12,
        format!("max contact-angle error {angle_err:.2e}, max homothety mismatch {equiv:.2e}"),
    )
}

fn unit_cap_volume(phi: f64) -> f64 {
    2.0 * PI * (1.0 - phi.cos()) / 3.0
}

struct Run {
    label: &'static str,
    result: SolverResult,
    history: Vec<HistoryRow>,
    cone: Cone,
    seconds: f64,
}

fn run_solver(label: &'static str, phi: f64, gamma: f64, n_theta: usize, n_s: usize) -> Option<Run> {
    let cone = Cone::circular(phi).unwrap();
    let config = SolverConfig::new(gamma, unit_cap_volume(phi), n_theta, n_s);
    let pool = rayon::ThreadPoolBuilder::new().num_threads(1).build().unwrap();
    let t = Instant::now();
    let out = pool.install(|| solve_with_history(&config, &cone, None));
    let seconds = t.elapsed().as_secs_f64();
    match out {
        Ok((result, history)) => Some(Run {
            label,
            result,
            history,
            cone,
            seconds,
        }),
        Err(e) => {
            println!("    {label}: solver error: {e}");
            None
        }
    }
}

fn criterion_5(run: Option<&Run>) -> Outcome {
    let Some(run) = run else {
        return outcome(false, "solver failed".into());
    };
    let rho = run.result.field.rho();
    let mean = rho.iter().sum::<f64>() / rho.len() as f64;
    let linf = rho.iter().map(|r| rel(*r, mean)).fold(0.0, f64::max);
    let r = &run.result;
    let spread = r.h_spread / r.mean_curvature.abs();
    outcome(
        linf < 0.01 && r.contact_angle_error.to_degrees() < 1.0 && spread < 0.02 && run.seconds < 300.0,
        format!(
            "L-inf {linf:.2e}, contact angle error {:.3} deg, hSpread/H {spread:.2e}, {:.2} s, {} iterations",
            r.contact_angle_error.to_degrees(),
            run.seconds,
            r.iterations
        ),
    )
}

/// `|H| < 1e-3` and L-inf distance to the planar field of the same volume.
fn flat_check(run: Option<&Run>) -> Outcome {
    let Some(run) = run else {
        return outcome(false, "solver failed".into());
    };
    let grid = run.result.field.grid().clone();
    let plane = RadialGraphField::from_fn(grid, |_, s| 1.0 / s.cos()).unwrap();
    let h = (drop_measures(&run.result.field).volume / drop_measures(&plane).volume).cbrt();
    let plane = plane.scaled(h).unwrap();
    let linf = run
        .result
        .field
        .rho()
        .iter()
        .zip(plane.rho())
        .map(|(a, b)| rel(*a, *b))
        .fold(0.0, f64::max);
    let hm = run.result.mean_curvature;
    outcome(
        hm.abs() < 1e-3 && linf < 0.01,
        format!("gamma {:.6}, H {hm:.3e}, L-inf to planar field {linf:.2e}", run.result_gamma()),
    )
}

impl Run {
    fn result_gamma(&self) -> f64 {
        match self.label {
            "flat-literal" => (PI + FRAC_PI_6) / 2.0,
            "flat" => FRAC_PI_2 + FRAC_PI_6,
            _ => f64::NAN,
        }
    }
}

fn sweep_ok(mesh: &TriangleMesh, cone: &Cone) -> (bool, f64, f64) {
    let graph = is_radial_graph(mesh).radial;
    match spherical_sweep(mesh, cone, &SweepOptions::default()) {
        Ok(rep) => (
            graph && rep.terminal == Terminal::ReachedZero && rep.r1 < 1e-6 * rep.r0,
            rep.r1,
            rep.r0,
        ),
        Err(_) => (false, f64::NAN, f64::NAN),
    }
}

/// Non-positive-H caps over a few cones and angles, with their cone and H.
fn concave_caps() -> Vec<(TriangleMesh, Cone, f64)> {
    let mut out = Vec::new();
    for phi in [0.3, FRAC_PI_6, 0.8, 1.1] {
        let cone = CircularCone::new(phi).unwrap();
        for gamma in [FRAC_PI_2 + phi, FRAC_PI_2 + phi + 0.2, 2.8, 3.0] {
            if gamma >= PI {
                continue;
            }
            let cap = construct_cap(&cone, gamma, 1.0).unwrap();
            if cap.mean_curvature <= 0.0 {
                let mesh = mesh_spherical_cap(&cap, 48, 24).unwrap();
                out.push((mesh, Cone::Circular(cone), cap.mean_curvature));
            }
        }
    }
    out
}

fn criterion_7(runs: &[&Run]) -> Outcome {
    let mut failures = Vec::new();
    let mut count = 0;
    for run in runs {
        let mesh = mesh_radial_graph(&run.result.field, &run.cone).unwrap();
        let (ok, r1, r0) = sweep_ok(&mesh, &run.cone);
        count += 1;
        if !ok {
            failures.push(format!("{} (r1 {r1:e}, r0 {r0})", run.label));
        }
    }
    for (k, (mesh, cone, _)) in concave_caps().iter().enumerate() {
        let (ok, r1, r0) = sweep_ok(mesh, cone);
        count += 1;
        if !ok {
            failures.push(format!("cap {k} (r1 {r1:e}, r0 {r0})"));
        }
    }
    outcome(
        failures.is_empty(),
        format!("{count} specimens, failures: [{}]", failures.join(", ")),
    )
}

fn criterion_8(runs: &[&Run]) -> Outcome {
    let mut specimens: Vec<(String, TriangleMesh, f64)> = Vec::new();
    for run in runs {
        if run.result.mean_curvature <= 0.0 {
            let mesh = mesh_radial_graph(&run.result.field, &run.cone).unwrap();
            specimens.push((run.label.to_string(), mesh, run.result.mean_curvature));
        }
    }
    for (k, (mesh, _, h)) in concave_caps().into_iter().enumerate() {
        specimens.push((format!("cap {k}"), mesh, h));
    }
    let mut worst = f64::NEG_INFINITY;
    let mut tested = 0;
    for (_, mesh, h) in &specimens {
        // the sweep reaches zero on these, so [r1, r0] = (0, r0]
        let r0 = mesh.max_radius();
        for k in 1..=32 {
            let r = r0 * k as f64 / 32.0;
            let rep = boundedness_check(mesh, *h, r).unwrap();
            worst = worst.max(rep.max_excess);
            tested += rep.tested;
        }
    }
    outcome(
        worst <= 1e-6 && !specimens.is_empty(),
        format!("{} specimens, {tested} point tests, max excess {worst:.3e}", specimens.len()),
    )
}

fn criterion_9() -> Outcome {
    let mesh = wall_drop(FRAC_PI_6, 1.0, 0.25, 0.1, 48, 24).unwrap();
    let r0 = mesh.max_radius();
    let opts = SymmetryOptions {
        rel_tol: 1e-8,
        ..SymmetryOptions::default()
    };
    let rep = planar_symmetry_detect(&mesh, &opts);
    let mut shift_err: f64 = 0.0;
    let t0 = rep.plane.unwrap_or(f64::NAN);
    for beta in [0.3, 1.1, 2.0, 2.9] {
        let rot = planar_symmetry_detect(&rotate_about_axis(&mesh, beta).unwrap(), &opts);
        let t = rot.plane.unwrap_or(f64::NAN);
        let d = (t - t0 - beta).rem_euclid(PI);
        shift_err = shift_err.max(d.min(PI - d));
    }
    outcome(
        rep.found && rep.deviation < 1e-8 * r0 && shift_err < 1e-9,
        format!(
            "plane t = {t0:.12}, deviation {:.2e} (r0 {r0:.3}), rotation shift error {shift_err:.2e}",
            rep.deviation
        ),
    )
}

fn criterion_10(runs: &[&Run]) -> Outcome {
    let mut rng = ChaCha8Rng::seed_from_u64(10);
    let mut worst: f64 = 0.0;
    for _ in 0..20 {
        let phi = rng.gen_range(0.2..1.2);
        let gamma = rng.gen_range(0.3..3.0);
        let grid = PolarGrid::new(SphericalDomain::cap(phi), 12, 10).unwrap();
        let (a, b, c) = (rng.gen_range(-0.2..0.2), rng.gen_range(-0.2..0.2), rng.gen_range(0.5..2.0));
        let field = RadialGraphField::from_fn(grid, |t, s| c * (1.0 + a * s * t.cos() + b * s * s)).unwrap();
        let g = energy_gradient(&field, gamma);
        let dir: Vec<f64> = (0..g.len()).map(|_| rng.gen_range(-1.0..1.0)).collect();
        let eps = 1e-6;
        let plus: Vec<f64> = field.rho().iter().zip(&dir).map(|(r, d)| r + eps * d).collect();
        let minus: Vec<f64> = field.rho().iter().zip(&dir).map(|(r, d)| r - eps * d).collect();
        let fd = (capillary_energy(&field.with_rho(plus).unwrap(), gamma)
            - capillary_energy(&field.with_rho(minus).unwrap(), gamma))
            / (2.0 * eps);
        let an: f64 = g.iter().zip(&dir).map(|(g, d)| g * d).sum();
        worst = worst.max(rel(fd, an));
    }
    let mut monotone = true;
    for run in runs {
        for w in run.history.windows(2) {
            monotone &= w[1].energy <= w[0].energy;
        }
    }
    outcome(
        worst < 1e-5 && monotone,
        format!("max relative gradient mismatch {worst:.2e}, energy monotone in {} runs: {monotone}", runs.len()),
    )
}

fn main() {
    let t = Instant::now();
    let mut lines: Vec<(String, Outcome)> = vec![
        ("1".into(), criterion_1()),
        ("2".into(), criterion_2()),
        ("3".into(), criterion_3()),
        ("4".into(), criterion_4()),
    ];

    let bench = run_solver("orthogonal", FRAC_PI_6, FRAC_PI_2, 64, 64);
    let literal = run_solver("flat-literal", FRAC_PI_6, (PI + FRAC_PI_6) / 2.0, 128, 64);
    let flat = run_solver("flat", FRAC_PI_6, FRAC_PI_2 + FRAC_PI_6, 128, 64);
    let concave = run_solver("concave", FRAC_PI_6, 3.0 * PI / 4.0, 64, 64);
    let runs: Vec<&Run> = [&bench, &literal, &flat, &concave].into_iter().flatten().collect();

    lines.push(("5".into(), criterion_5(bench.as_ref())));
    lines.push(("6".into(), flat_check(literal.as_ref())));
    lines.push(("6b".into(), flat_check(flat.as_ref())));
    lines.push(("7".into(), criterion_7(&runs)));
    lines.push(("8".into(), criterion_8(&runs)));
    lines.push(("9".into(), criterion_9()));
    lines.push(("10".into(), criterion_10(&runs)));

    let mut unexpected = 0;
    for (id, o) in &lines {
        let status = if o.pass { "PASS" } else { "FAIL" };
        let known = !o.pass && KNOWN_FAILURES.contains(&id.as_str());
        if !o.pass && !known {
            unexpected += 1;
        }
        let note = if known { " (known failure, see README)" } else { "" };
        println!("criterion {id}: {status}{note} - {}", o.detail);
    }
    println!("acceptance finished in {:.1} s", t.elapsed().as_secs_f64());
    if unexpected > 0 {
        println!("{unexpected} unexpected failure(s)");
        std::process::exit(1);
    }
}
