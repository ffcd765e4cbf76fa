//! Reflection diagnostics: the sweep by spheres centered at the apex, the
//! support-function and boundedness checks, and detection of a vertical
//! symmetry plane.
//!
//! The sweep reflects the part of `S = S u T` outside the sphere of radius `r`
//! through that sphere and compares it ray by ray with the part inside. Along
//! a ray from the apex the drop is a union of intervals, read off from the
//! facing of the surface at each crossing (normals point into the drop).

use std::f64::consts::PI;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::cone::Cone;
use crate::error::{Error, Result};
use crate::geom::{unit, SurfaceJet, Vec3};
use crate::mesh::{discrete_jets, is_radial_graph, HitKind, RayCaster, TriangleMesh};

/// Contact classes of the first touching point of the sweep.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum TouchClass {
    /// Interior point of `S`, strictly inside the sphere.
    T1,
    /// Interior point of `S` on the sphere.
    T2,
    /// Boundary point of `S`, strictly inside the sphere.
    T3,
    /// Boundary point of `S` on the sphere.
    T4,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum Terminal {
    ReachedZero,
    Stalled,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Touching {
    pub class: TouchClass,
    /// Point of the original surface touched by the reflection.
    pub p0: Vec3,
    /// Point whose reflection touches `p0`.
    pub q0: Vec3,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "camelCase")]
pub struct SweepReport {
    pub r0: f64,
    pub r1: f64,
    pub terminal: Terminal,
    pub touching: Option<Touching>,
    pub min_residual: f64,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "camelCase")]
pub struct SweepOptions {
    /// Polar cell centers per direction of the ray sample over the domain.
    pub ray_samples: usize,
    /// Uniform radius samples in `(0, r0]` before bisection.
    pub radius_samples: usize,
    /// Relative bracket width at which bisection stops.
    pub rel_width: f64,
    /// Relative tolerance (of `r0`) for `|p0| = r1`.
    pub contact_tol: f64,
    /// Reject meshes that are not radial graphs.
    pub require_radial_graph: bool,
}

impl Default for SweepOptions {
    fn default() -> Self {
        Self {
            ray_samples: 48,
            radius_samples: 64,
            rel_width: 1e-6,
            contact_tol: 1e-6,
            require_radial_graph: true,
        }
    }
}

/// Pass/fail and clearance at every sampled radius, largest first.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "camelCase")]
pub struct SweepProfile {
    pub radii: Vec<f64>,
    pub passed: Vec<bool>,
    pub clearance: Vec<f64>,
}

impl SweepProfile {
    /// Whether the passing radii form an interval `[r1, r0]`.
    pub fn is_monotone(&self) -> bool {
        match self.passed.iter().position(|p| !p) {
            None => true,
            Some(k) => self.passed[k..].iter().all(|p| !p),
        }
    }
}

/// A ray with the surface crossings on it and the drop intervals they bound.
struct Probe {
    u: Vec3,
    /// Parameters of surface points along the ray, increasing.
    hits: Vec<f64>,
    /// Closed intervals of the drop; a lower end of `0` is the apex.
    omega: Vec<(f64, f64)>,
    /// Distance to the boundary of `S` for rays on the wall (wetted segment).
    wetted: Option<f64>,
}

impl Probe {
    fn new(u: Vec3, caster: &RayCaster, wetted: Option<f64>) -> Self {
        let hits = caster.hits(&u);
        // status before the first crossing: inside iff the first decisive
        // crossing leaves through the back of the surface
        let mut inside = hits
            .iter()
            .find(|h| h.kind != HitKind::Touch)
            .is_some_and(|h| h.kind == HitKind::ToBackSide);
        let mut omega = Vec::new();
        let mut start = if inside { Some(0.0) } else { None };
        for h in &hits {
            match h.kind {
                HitKind::Touch => {}
                HitKind::ToNormalSide => {
                    if !inside {
                        start = Some(h.t);
                        inside = true;
                    }
                }
                HitKind::ToBackSide => {
                    if inside {
                        omega.push((start.take().unwrap_or(0.0), h.t));
                        inside = false;
                    }
                }
            }
        }
        if let Some(a) = start {
            omega.push((a, f64::INFINITY));
        }
        Self {
            u,
            hits: hits.iter().map(|h| h.t).collect(),
            omega,
            wetted,
        }
    }

    /// Clearance of the reflected point `x` inside the drop and the surface
    /// parameter bounding it: positive inside, negative outside.
    fn omega_clearance(&self, x: f64, upto: f64) -> (f64, f64) {
        let mut best = (f64::NEG_INFINITY, f64::NAN);
        for &(a, b) in &self.omega {
            let lower = if a > 0.0 { x - a } else { f64::INFINITY };
            let upper = b - upto;
            let c = lower.min(upper);
            let bound = if lower <= upper { a } else { b };
            if c > best.0 {
                best = (c, bound);
            }
        }
        if self.omega.is_empty() {
            // no drop on this ray: distance to the nearest surface point
            let nearest = self
                .hits
                .iter()
                .copied()
                .min_by(|p, q| (p - x).abs().total_cmp(&(q - x).abs()));
            if let Some(t) = nearest {
                return (-(t - x).abs(), t);
            }
        }
        best
    }

    /// Smallest clearance on this ray at radius `r`, with the contact pair
    /// `(p0, q0)` parameters.
    fn check(&self, r: f64) -> Option<(f64, f64, f64)> {
        let r2 = r * r;
        let mut worst: Option<(f64, f64, f64)> = None;
        let mut take = |c: f64, p: f64, q: f64| {
            if worst.is_none_or(|w| c < w.0) {
                worst = Some((c, p, q));
            }
        };
        let below = self.hits.iter().copied().filter(|&t| t < r).fold(None, |m: Option<f64>, t| {
            Some(m.map_or(t, |m| m.max(t)))
        });
        for &t in self.hits.iter().filter(|&&t| t > r) {
            let x = r2 / t;
            if let Some(b) = below {
                take(x - b, b, t);
            }
            let (c, bound) = self.omega_clearance(x, x);
            if c.is_finite() {
                take(c, bound, t);
            }
        }
        if let Some(w) = self.wetted {
            if w > r {
                // reflected wetted segment [r^2/w, r) must stay in the drop
                let x = r2 / w;
                let (c, bound) = self.omega_clearance(x, r);
                if c.is_finite() {
                    take(c, bound, w);
                }
            }
        }
        worst
    }
}

struct Sweep {
    probes: Vec<Probe>,
    r0: f64,
}

impl Sweep {
    /// Smallest clearance over all rays and the ray where it occurs.
    fn evaluate(&self, r: f64) -> (f64, Option<(usize, f64, f64)>) {
        let per: Vec<Option<(f64, f64, f64)>> = self.probes.par_iter().map(|p| p.check(r)).collect();
        let mut best = (f64::INFINITY, None);
        for (k, c) in per.into_iter().enumerate() {
            if let Some((c, p, q)) = c {
                if c < best.0 {
                    best = (c, Some((k, p, q)));
                }
            }
        }
        best
    }

    fn passes(&self, clearance: f64) -> bool {
        clearance >= -1e-12 * self.r0
    }
}

fn check_boundary_on_cone(mesh: &TriangleMesh, cone: &Cone) -> Result<()> {
    for lp in mesh.boundary_loops() {
        for &k in lp {
            if !cone.on_wall(&mesh.vertices()[k]) {
                return Err(Error::BoundaryOffCone(k));
            }
        }
    }
    Ok(())
}

fn build_sweep(mesh: &TriangleMesh, cone: &Cone, opts: &SweepOptions) -> Result<Sweep> {
    if opts.require_radial_graph {
        let check = is_radial_graph(mesh);
        if !check.radial {
            return Err(Error::NotRadialGraph {
                witness: check.witness.unwrap_or_default(),
                hits: check.hits,
            });
        }
    }
    check_boundary_on_cone(mesh, cone)?;
    let caster = RayCaster::new(mesh);
    let domain = cone.domain();
    let n = opts.ray_samples.max(1);
    let mut dirs: Vec<(Vec3, Option<f64>)> = Vec::new();
    for j in 0..n {
        let theta = 2.0 * PI * (j as f64 + 0.5) / n as f64;
        let smax = domain.boundary_angle(theta);
        for i in 0..n {
            dirs.push((domain.direction(theta, smax * (i as f64 + 0.5) / n as f64), None));
        }
    }
    for f in 0..mesh.faces().len() {
        if let Some(u) = unit(mesh.face_centroid(f)) {
            dirs.push((u.into_inner(), None));
        }
    }
    for lp in mesh.boundary_loops() {
        for &k in lp {
            let b = mesh.vertices()[k];
            dirs.push((b.normalize(), Some(b.norm())));
        }
    }
    let probes = dirs
        .into_par_iter()
        .map(|(u, w)| Probe::new(u, &caster, w))
        .collect();
    Ok(Sweep {
        probes,
        r0: mesh.max_radius(),
    })
}

fn radius_grid(r0: f64, samples: usize) -> Vec<f64> {
    let m = samples.max(1);
    let mut radii: Vec<f64> = (0..m).map(|k| r0 * (m - k) as f64 / m as f64).collect();
    let mut r = r0 / m as f64;
    while r > 1e-7 * r0 {
        r *= 0.5;
        radii.push(r.max(1e-7 * r0));
    }
    radii
}

fn boundary_distance(mesh: &TriangleMesh, p: &Vec3) -> (f64, f64) {
    let v = mesh.vertices();
    let mut dist = f64::INFINITY;
    let mut longest: f64 = 0.0;
    for (a, b) in mesh.boundary_edges() {
        let (pa, pb) = (v[a], v[b]);
        let e = pb - pa;
        longest = longest.max(e.norm());
        let t = ((p - pa).dot(&e) / e.norm_squared()).clamp(0.0, 1.0);
        dist = dist.min((pa + e * t - p).norm());
    }
    (dist, longest)
}

/// Sampled pass/fail profile of the two reflection conditions.
pub fn spherical_sweep_profile(mesh: &TriangleMesh, cone: &Cone, opts: &SweepOptions) -> Result<SweepProfile> {
    let sweep = build_sweep(mesh, cone, opts)?;
    let radii = radius_grid(sweep.r0, opts.radius_samples);
    let clearance: Vec<f64> = radii.iter().map(|&r| sweep.evaluate(r).0).collect();
    let passed = clearance.iter().map(|&c| sweep.passes(c)).collect();
    Ok(SweepProfile {
        radii,
        passed,
        clearance,
    })
}

/// Decreases the reflection radius from `r0 = max |p|` while the reflected
/// outer part stays beyond the inner part along every ray and inside the
/// drop; reports where this stops and how the first contact looks.
pub fn spherical_sweep(mesh: &TriangleMesh, cone: &Cone, opts: &SweepOptions) -> Result<SweepReport> {
    let sweep = build_sweep(mesh, cone, opts)?;
    let r0 = sweep.r0;
    let radii = radius_grid(r0, opts.radius_samples);
    let mut min_residual = f64::INFINITY;
    let mut last_pass = r0;
    let mut first_fail = None;
    for &r in &radii {
        let (c, _) = sweep.evaluate(r);
        if sweep.passes(c) {
            if r < r0 {
                min_residual = min_residual.min(c);
            }
            last_pass = r;
        } else {
            first_fail = Some(r);
            break;
        }
    }
    let Some(mut lo) = first_fail else {
        return Ok(SweepReport {
            r0,
            r1: 0.0,
            terminal: Terminal::ReachedZero,
            touching: None,
            min_residual: if min_residual.is_finite() { min_residual } else { 0.0 },
        });
    };
    let mut hi = last_pass;
    while hi - lo > opts.rel_width * hi {
        let mid = 0.5 * (lo + hi);
        let (c, _) = sweep.evaluate(mid);
        if sweep.passes(c) {
            min_residual = min_residual.min(c);
            hi = mid;
        } else {
            lo = mid;
        }
    }
    let r1 = hi;
    let (_, contact) = sweep.evaluate(lo);
    let (ray, tp, tq) = contact.expect("failing radius has a contact");
    let u = sweep.probes[ray].u;
    let p0 = u * tp;
    let q0 = u * tq;
    let on_sphere = (p0.norm() - r1).abs() <= opts.contact_tol * r0;
    let (bd, longest) = boundary_distance(mesh, &p0);
    let on_boundary = bd <= longest;
    let class = match (on_boundary, on_sphere) {
        (false, false) => TouchClass::T1,
        (false, true) => TouchClass::T2,
        (true, false) => TouchClass::T3,
        (true, true) => TouchClass::T4,
    };
    Ok(SweepReport {
        r0,
        r1,
        terminal: Terminal::Stalled,
        touching: Some(Touching { class, p0, q0 }),
        min_residual: if min_residual.is_finite() { min_residual } else { 0.0 },
    })
}

/// Whether the touching point of a report satisfies the conditions of its class.
pub fn touching_consistent(report: &SweepReport, mesh: &TriangleMesh, opts: &SweepOptions) -> bool {
    match (&report.terminal, &report.touching) {
        (Terminal::ReachedZero, None) => report.r1 == 0.0,
        (Terminal::Stalled, Some(t)) => {
            let on_sphere = (t.p0.norm() - report.r1).abs() <= opts.contact_tol * report.r0;
            let (bd, longest) = boundary_distance(mesh, &t.p0);
            let on_boundary = bd <= longest;
            let inside = t.p0.norm() <= report.r1 + opts.contact_tol * report.r0;
            inside
                && report.r1 > 0.0
                && report.r1 <= report.r0
                && match t.class {
                    TouchClass::T1 => !on_boundary && !on_sphere,
                    TouchClass::T2 => !on_boundary && on_sphere,
                    TouchClass::T3 => on_boundary && !on_sphere,
                    TouchClass::T4 => on_boundary && on_sphere,
                }
        }
        _ => false,
    }
}

/// Area-weighted winding normals at every vertex, boundary included.
pub fn vertex_normals(mesh: &TriangleMesh) -> Vec<Vec3> {
    let mut n = vec![Vec3::zeros(); mesh.vertices().len()];
    for (f, face) in mesh.faces().iter().enumerate() {
        let fnormal = mesh.face_normal(f);
        for &k in face {
            n[k] += fnormal;
        }
    }
    n.into_iter()
        .map(|v| v.try_normalize(0.0).unwrap_or_default())
        .collect()
}

/// Whether the support function `<N, p>` is negative at every interior
/// vertex outside the sphere of radius `r`.
pub fn support_sign_check(mesh: &TriangleMesh, r: f64) -> bool {
    discrete_jets(mesh)
        .jets
        .iter()
        .flatten()
        .filter(|j| j.p().norm() > r)
        .all(|j| j.n().dot(&j.p()) < 0.0)
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "camelCase")]
pub struct BoundednessReport {
    pub r: f64,
    pub mean_curvature: f64,
    /// `max(H^ - H)` over the tested points; `-inf` when none qualify.
    pub max_excess: f64,
    pub tested: usize,
}

impl BoundednessReport {
    pub fn passes(&self, tol: f64) -> bool {
        self.max_excess <= tol
    }
}

fn boundedness_over(points: impl Iterator<Item = (Vec3, Vec3)>, h: f64, r: f64) -> Result<BoundednessReport> {
    if h > 0.0 {
        return Err(Error::PositiveMeanCurvature(h));
    }
    if !(r.is_finite() && r > 0.0) {
        return Err(Error::InvalidRadius(r));
    }
    let mut max_excess = f64::NEG_INFINITY;
    let mut tested = 0;
    for (q, n) in points {
        let f = n.dot(&q);
        if q.norm() >= r && f < 0.0 {
            let hh = (q.norm_squared() * h + 2.0 * f) / (r * r);
            max_excess = max_excess.max(hh - h);
            tested += 1;
        }
    }
    Ok(BoundednessReport {
        r,
        mean_curvature: h,
        max_excess,
        tested,
    })
}

/// Evaluates `H^ = (|q|^2 H + 2 <N,q>) / r^2` at the mesh vertices with
/// `|q| >= r` and `<N,q> < 0` and reports the largest `H^ - H`.
pub fn boundedness_check(mesh: &TriangleMesh, h: f64, r: f64) -> Result<BoundednessReport> {
    let normals = vertex_normals(mesh);
    boundedness_over(mesh.vertices().iter().copied().zip(normals), h, r)
}

/// [`boundedness_check`] on given jets (their own normals, the given `H`).
pub fn boundedness_check_jets(jets: &[SurfaceJet], h: f64, r: f64) -> Result<BoundednessReport> {
    boundedness_over(jets.iter().map(|j| (j.p(), j.n().into_inner())), h, r)
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SymmetryReport {
    pub found: bool,
    pub plane: Option<f64>,
    pub deviation: f64,
    /// Whether `dS` lies in an open half-cone, the setting in which a
    /// vertical symmetry plane is expected.
    #[serde(skip)]
    pub half_cone: bool,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "camelCase")]
pub struct SymmetryOptions {
    pub scan_samples: usize,
    /// Offset of the scan grid in `t`.
    pub offset: f64,
    /// Tolerance relative to the largest vertex distance.
    pub rel_tol: f64,
}

impl Default for SymmetryOptions {
    fn default() -> Self {
        Self {
            scan_samples: 180,
            offset: 0.0,
            rel_tol: 1e-6,
        }
    }
}

/// Point-to-mesh distance with a uniform grid over the faces.
pub struct MeshDistance<'a> {
    mesh: &'a TriangleMesh,
    lo: Vec3,
    cell: f64,
    dims: [usize; 3],
    buckets: Vec<Vec<u32>>,
}

impl<'a> MeshDistance<'a> {
    pub fn new(mesh: &'a TriangleMesh) -> Self {
        let v = mesh.vertices();
        let mut lo = Vec3::repeat(f64::INFINITY);
        let mut hi = Vec3::repeat(f64::NEG_INFINITY);
        for p in v {
            lo = lo.inf(p);
            hi = hi.sup(p);
        }
        let ext = hi - lo;
        let target = (mesh.faces().len() as f64).max(1.0);
        let vol = ext.iter().map(|e| e.max(1e-12 * ext.max())).product::<f64>();
        let cell = (vol / target).cbrt().max(1e-12 * ext.max().max(1e-300));
        let dims = [0, 1, 2].map(|k| ((ext[k] / cell).floor() as usize + 1).min(256));
        let mut buckets = vec![Vec::new(); dims[0] * dims[1] * dims[2]];
        let mut this = Self {
            mesh,
            lo,
            cell,
            dims,
            buckets: Vec::new(),
        };
        for (fi, f) in mesh.faces().iter().enumerate() {
            let mut flo = Vec3::repeat(f64::INFINITY);
            let mut fhi = Vec3::repeat(f64::NEG_INFINITY);
            for &k in f {
                flo = flo.inf(&v[k]);
                fhi = fhi.sup(&v[k]);
            }
            let a = this.cell_of(&flo);
            let b = this.cell_of(&fhi);
            for x in a[0]..=b[0] {
                for y in a[1]..=b[1] {
                    for z in a[2]..=b[2] {
                        buckets[this.flat([x, y, z])].push(fi as u32);
                    }
                }
            }
        }
        this.buckets = buckets;
        this
    }

    fn cell_of(&self, p: &Vec3) -> [usize; 3] {
        [0, 1, 2].map(|k| {
            let c = ((p[k] - self.lo[k]) / self.cell).floor();
            (c.max(0.0) as usize).min(self.dims[k] - 1)
        })
    }

    fn flat(&self, c: [usize; 3]) -> usize {
        (c[0] * self.dims[1] + c[1]) * self.dims[2] + c[2]
    }

    /// Distance from `p` to the closest point of the mesh.
    pub fn distance(&self, p: &Vec3) -> f64 {
        let c = self.cell_of(p);
        // distance from p to the grid box, so shell bounds stay valid outside
        let outside = {
            let mut d2 = 0.0;
            for k in 0..3 {
                let lo = self.lo[k];
                let hi = self.lo[k] + self.cell * self.dims[k] as f64;
                let e = (lo - p[k]).max(0.0).max(p[k] - hi);
                d2 += e * e;
            }
            d2.sqrt()
        };
        let maxr = *self.dims.iter().max().expect("3 dims");
        let mut best = f64::INFINITY;
        for ring in 0..=maxr {
            let r = ring as isize;
            for dx in -r..=r {
                for dy in -r..=r {
                    for dz in -r..=r {
                        if dx.abs().max(dy.abs()).max(dz.abs()) != r {
                            continue;
                        }
                        let q = [c[0] as isize + dx, c[1] as isize + dy, c[2] as isize + dz];
                        if (0..3).any(|k| q[k] < 0 || q[k] >= self.dims[k] as isize) {
                            continue;
                        }
                        let idx = self.flat([q[0] as usize, q[1] as usize, q[2] as usize]);
                        for &fi in &self.buckets[idx] {
                            let [a, b, cc] = self.mesh.faces()[fi as usize];
                            let v = self.mesh.vertices();
                            best = best.min(point_triangle_distance(p, &v[a], &v[b], &v[cc]));
                        }
                    }
                }
            }
            // every unvisited cell is at least `ring * cell` away
            if best <= outside + ring as f64 * self.cell {
                break;
            }
        }
        best
    }
}

/// Euclidean distance from `p` to the triangle `abc`.
pub fn point_triangle_distance(p: &Vec3, a: &Vec3, b: &Vec3, c: &Vec3) -> f64 {
    let ab = b - a;
    let ac = c - a;
    let ap = p - a;
    let d1 = ab.dot(&ap);
    let d2 = ac.dot(&ap);
    if d1 <= 0.0 && d2 <= 0.0 {
        return ap.norm();
    }
    let bp = p - b;
    let d3 = ab.dot(&bp);
    let d4 = ac.dot(&bp);
    if d3 >= 0.0 && d4 <= d3 {
        return bp.norm();
    }
    let vc = d1 * d4 - d3 * d2;
    if vc <= 0.0 && d1 >= 0.0 && d3 <= 0.0 {
        let v = d1 / (d1 - d3);
        return (a + ab * v - p).norm();
    }
    let cp = p - c;
    let d5 = ab.dot(&cp);
    let d6 = ac.dot(&cp);
    if d6 >= 0.0 && d5 <= d6 {
        return cp.norm();
    }
    let vb = d5 * d2 - d1 * d6;
    if vb <= 0.0 && d2 >= 0.0 && d6 <= 0.0 {
        let w = d2 / (d2 - d6);
        return (a + ac * w - p).norm();
    }
    let va = d3 * d6 - d5 * d4;
    if va <= 0.0 && (d4 - d3) >= 0.0 && (d5 - d6) >= 0.0 {
        let w = (d4 - d3) / ((d4 - d3) + (d5 - d6));
        return (b + (c - b) * w - p).norm();
    }
    let denom = 1.0 / (va + vb + vc);
    let v = vb * denom;
    let w = vc * denom;
    (a + ab * v + ac * w - p).norm()
}

/// Reflection through the vertical plane `Q(t): cos(t) x + sin(t) y = 0`.
pub fn reflect_q(p: &Vec3, t: f64) -> Vec3 {
    let n = Vec3::new(t.cos(), t.sin(), 0.0);
    p - n * (2.0 * p.dot(&n))
}

/// Largest distance from a reflected vertex to the mesh.
pub fn reflection_deviation(mesh: &TriangleMesh, dist: &MeshDistance, t: f64) -> f64 {
    deviation_over(mesh.vertices(), dist, t)
}

fn deviation_over(points: &[Vec3], dist: &MeshDistance, t: f64) -> f64 {
    let d: Vec<f64> = points
        .par_iter()
        .map(|v| dist.distance(&reflect_q(v, t)))
        .collect();
    d.into_iter().fold(0.0, f64::max)
}

/// Whether the boundary of the mesh lies in an open half-cone `<p, a> > 0`
/// for some horizontal unit `a`.
pub fn boundary_in_half_cone(mesh: &TriangleMesh) -> bool {
    let mut az: Vec<f64> = mesh
        .boundary_loops()
        .iter()
        .flatten()
        .map(|&k| {
            let v = mesh.vertices()[k];
            v.y.atan2(v.x)
        })
        .collect();
    if az.is_empty() {
        return false;
    }
    az.sort_by(f64::total_cmp);
    let mut gap = az[0] + 2.0 * PI - az[az.len() - 1];
    for w in az.windows(2) {
        gap = gap.max(w[1] - w[0]);
    }
    gap > PI
}

/// Scans the vertical planes `Q(t)`, `t` in `[0, pi)`, for a reflection
/// symmetry of the mesh and refines the best one by golden-section search.
pub fn planar_symmetry_detect(mesh: &TriangleMesh, opts: &SymmetryOptions) -> SymmetryReport {
    let dist = MeshDistance::new(mesh);
    let m = opts.scan_samples.max(4);
    let step = PI / m as f64;
    let dev = |t: f64| reflection_deviation(mesh, &dist, t);
    // the coarse scan only has to find the basin: a vertex subsample will do
    let stride = (mesh.vertices().len() / 256).max(1);
    let sample: Vec<Vec3> = mesh.vertices().iter().step_by(stride).copied().collect();
    let mut best = (f64::INFINITY, 0.0);
    for k in 0..m {
        let t = opts.offset + step * k as f64;
        let d = deviation_over(&sample, &dist, t);
        if d < best.0 {
            best = (d, t);
        }
    }
    let g = 0.5 * (5f64.sqrt() - 1.0);
    let (mut a, mut b) = (best.1 - step, best.1 + step);
    let mut c = b - g * (b - a);
    let mut d = a + g * (b - a);
    let (mut fc, mut fd) = (dev(c), dev(d));
    while b - a > 1e-12 {
        if fc < fd {
            b = d;
            d = c;
            fd = fc;
            c = b - g * (b - a);
            fc = dev(c);
        } else {
            a = c;
            c = d;
            fc = fd;
            d = a + g * (b - a);
            fd = dev(d);
        }
    }
    let mut candidates = [(dev(best.1), best.1), (fc, c), (fd, d)];
    candidates.sort_by(|x, y| x.0.total_cmp(&y.0));
    let (deviation, t) = candidates[0];
    let t = t.rem_euclid(PI);
    let tol = opts.rel_tol * mesh.max_radius();
    SymmetryReport {
        found: deviation <= tol,
        plane: Some(t),
        deviation,
        half_cone: boundary_in_half_cone(mesh),
    }
}
