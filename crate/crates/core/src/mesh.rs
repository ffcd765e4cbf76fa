//! Triangle meshes: construction from caps and radial graphs, discrete
//! curvature, inversion, and ray casting from the apex.
//!
//! Face winding encodes the surface normal: for a face `[a, b, c]` the normal
//! is `(b - a) x (c - a)`, and meshes built here wind it toward the drop.

use std::collections::HashMap;
use std::f64::consts::PI;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::cone::{CapCase, CapConfiguration, Cone};
use crate::domain::{frame_about, SphericalDomain};
use crate::error::{Error, Result};
use crate::field::{PolarGrid, RadialGraphField};
use crate::geom::{invert_point, unit, InversionSphere, SurfaceJet, UnitVec3, Vec3};

/// Vertices closer than this to the origin are rejected.
pub const MIN_VERTEX_RADIUS: f64 = 1e-12;

/// Barycentric thickening of ray-triangle tests.
pub const RAY_EPS: f64 = 1e-12;

/// Oriented triangle mesh with boundary.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TriangleMesh {
    vertices: Vec<Vec3>,
    faces: Vec<[usize; 3]>,
    #[serde(skip)]
    boundary_loops: Vec<Vec<usize>>,
}

impl TriangleMesh {
    /// Validates indices, face areas, orientation and manifoldness, and
    /// derives the boundary loops.
    pub fn new(vertices: Vec<Vec3>, faces: Vec<[usize; 3]>) -> Result<Self> {
        let nv = vertices.len();
        for (i, v) in vertices.iter().enumerate() {
            if !v.iter().all(|x| x.is_finite()) {
                return Err(Error::InvalidMesh(format!("vertex {i} is not finite")));
            }
            if v.norm() < MIN_VERTEX_RADIUS {
                return Err(Error::VertexAtOrigin(i));
            }
        }
        let mut directed: HashMap<(usize, usize), usize> = HashMap::with_capacity(faces.len() * 3);
        for (fi, f) in faces.iter().enumerate() {
            if f.iter().any(|&k| k >= nv) {
                return Err(Error::InvalidMesh(format!("face {fi} has an index out of range")));
            }
            if f[0] == f[1] || f[1] == f[2] || f[0] == f[2] {
                return Err(Error::InvalidMesh(format!("face {fi} repeats a vertex")));
            }
            let (a, b, c) = (vertices[f[0]], vertices[f[1]], vertices[f[2]]);
            let e1 = b - a;
            let e2 = c - a;
            if e1.cross(&e2).norm() <= 1e-14 * e1.norm() * e2.norm() {
                return Err(Error::InvalidMesh(format!("face {fi} is degenerate")));
            }
            for k in 0..3 {
                let edge = (f[k], f[(k + 1) % 3]);
                if directed.insert(edge, fi).is_some() {
                    return Err(Error::InvalidMesh(format!(
                        "edge {}-{} is used twice in the same direction (inconsistent orientation or non-manifold)",
                        edge.0, edge.1
                    )));
                }
            }
        }
        let mut next: HashMap<usize, usize> = HashMap::new();
        for &(a, b) in directed.keys() {
            if !directed.contains_key(&(b, a)) && next.insert(b, a).is_some() {
                return Err(Error::InvalidMesh(format!(
                    "vertex {b} has more than one outgoing boundary edge"
                )));
            }
        }
        // Trace loops following the boundary against the face winding, i.e.
        // with the surface on the left when viewed from the normal side.
        let mut starts: Vec<usize> = next.keys().copied().collect();
        starts.sort_unstable();
        let mut seen = vec![false; nv];
        let mut boundary_loops = Vec::new();
        for s in starts {
            if seen[s] {
                continue;
            }
            let mut lp = vec![s];
            seen[s] = true;
            let mut cur = next[&s];
            while cur != s {
                if seen[cur] {
                    return Err(Error::InvalidMesh("boundary is not a set of simple loops".into()));
                }
                seen[cur] = true;
                lp.push(cur);
                cur = *next
                    .get(&cur)
                    .ok_or_else(|| Error::InvalidMesh("open boundary chain".into()))?;
            }
            boundary_loops.push(lp);
        }
        Ok(Self {
            vertices,
            faces,
            boundary_loops,
        })
    }

    pub fn vertices(&self) -> &[Vec3] {
        &self.vertices
    }

    pub fn faces(&self) -> &[[usize; 3]] {
        &self.faces
    }

    pub fn boundary_loops(&self) -> &[Vec<usize>] {
        &self.boundary_loops
    }

    pub fn boundary_flags(&self) -> Vec<bool> {
        let mut flags = vec![false; self.vertices.len()];
        for lp in &self.boundary_loops {
            for &k in lp {
                flags[k] = true;
            }
        }
        flags
    }

    /// Unnormalized winding normal of a face (twice its area in length).
    pub fn face_normal(&self, f: usize) -> Vec3 {
        let [a, b, c] = self.faces[f];
        let (pa, pb, pc) = (self.vertices[a], self.vertices[b], self.vertices[c]);
        (pb - pa).cross(&(pc - pa))
    }

    pub fn face_centroid(&self, f: usize) -> Vec3 {
        let [a, b, c] = self.faces[f];
        (self.vertices[a] + self.vertices[b] + self.vertices[c]) / 3.0
    }

    pub fn area(&self) -> f64 {
        (0..self.faces.len()).map(|f| 0.5 * self.face_normal(f).norm()).sum()
    }

    /// Largest vertex distance from the origin.
    pub fn max_radius(&self) -> f64 {
        self.vertices.iter().map(|v| v.norm()).fold(0.0, f64::max)
    }

    pub fn min_radius(&self) -> f64 {
        self.vertices.iter().map(|v| v.norm()).fold(f64::INFINITY, f64::min)
    }

    /// Same connectivity with every vertex mapped by `f`.
    pub fn map_vertices(&self, f: impl Fn(&Vec3) -> Vec3) -> Result<Self> {
        Self::new(self.vertices.iter().map(f).collect(), self.faces.clone())
    }

    /// Same surface with the opposite winding.
    pub fn reversed(&self) -> Self {
        let faces = self.faces.iter().map(|f| [f[0], f[2], f[1]]).collect();
        Self::new(self.vertices.clone(), faces).expect("reversal keeps validity")
    }

    /// Boundary edges as vertex pairs.
    pub fn boundary_edges(&self) -> Vec<(usize, usize)> {
        self.boundary_loops
            .iter()
            .flat_map(|lp| (0..lp.len()).map(move |i| (lp[i], lp[(i + 1) % lp.len()])))
            .collect()
    }
}

fn check_resolution(n_theta: usize, n_s: usize) -> Result<()> {
    if n_theta < 3 || n_s < 3 {
        Err(Error::InvalidResolution(n_theta, n_s))
    } else {
        Ok(())
    }
}

/// Triangulates the free surface of a cap configuration on a polar grid,
/// winding the normal into the drop.
pub fn mesh_spherical_cap(config: &CapConfiguration, n_theta: usize, n_s: usize) -> Result<TriangleMesh> {
    check_resolution(n_theta, n_s)?;
    let grid = PolarGrid::new(SphericalDomain::cap(config.phi), n_theta, n_s)?;
    let rho = (0..grid.node_count())
        .map(|k| config.radial_distance(grid.coords(k).1))
        .collect();
    let field = RadialGraphField::new(grid, rho)?;
    let mesh = field_mesh(&field)?;
    Ok(if config.case == CapCase::TwoCapsC {
        mesh.reversed()
    } else {
        mesh
    })
}

fn field_mesh(field: &RadialGraphField) -> Result<TriangleMesh> {
    TriangleMesh::new(field.points(), field.grid().faces())
}

/// Mesh of the radial graph of `field`. The field's domain must be the
/// cone's domain.
pub fn mesh_radial_graph(field: &RadialGraphField, cone: &Cone) -> Result<TriangleMesh> {
    if field.grid().domain() != &cone.domain() {
        return Err(Error::InvalidConfig(
            "field grid is not over the cone's domain".into(),
        ));
    }
    field_mesh(field)
}

/// Triangles of an `n x n` quad grid. With `radial` the diagonals point away
/// from the grid center instead of all running the same way.
fn grid_faces(n: usize, index: impl Fn(usize, usize) -> usize, outward: bool, radial: bool) -> Vec<[usize; 3]> {
    let mut faces = Vec::with_capacity(2 * n * n);
    let mid = n as f64 / 2.0;
    for i in 0..n {
        for j in 0..n {
            let v00 = index(i, j);
            let v10 = index(i + 1, j);
            let v11 = index(i + 1, j + 1);
            let v01 = index(i, j + 1);
            let main = !radial || (i as f64 + 0.5 - mid) * (j as f64 + 0.5 - mid) > 0.0;
            let tris = if main {
                [[v00, v10, v11], [v00, v11, v01]]
            } else {
                [[v00, v10, v01], [v10, v11, v01]]
            };
            for t in tris {
                faces.push(if outward { t } else { [t[0], t[2], t[1]] });
            }
        }
    }
    faces
}

/// Patch of the sphere `|p - center| = radius` about the direction `axis`,
/// gridded in the gnomonic chart `[-w, w]^2` with `n x n` quads and wound with
/// the normal toward the center.
pub fn sphere_patch(center: Vec3, radius: f64, axis: Vec3, half_width: f64, n: usize) -> Result<TriangleMesh> {
    check_resolution(n, n)?;
    let axis = unit(axis).ok_or_else(|| Error::InvalidMesh("zero patch axis".into()))?;
    let (e1, e2) = frame_about(&axis);
    let m = n + 1;
    let mut vertices = Vec::with_capacity(m * m);
    for i in 0..m {
        for j in 0..m {
            let a = -half_width + 2.0 * half_width * i as f64 / n as f64;
            let b = -half_width + 2.0 * half_width * j as f64 / n as f64;
            let d = (axis.into_inner() + e1.into_inner() * a + e2.into_inner() * b).normalize();
            vertices.push(center + d * radius);
        }
    }
    TriangleMesh::new(vertices, grid_faces(n, |i, j| i * m + j, false, false))
}

/// Square patch of the plane through `point` with unit normal `normal`,
/// side `2 * half_width`, wound with the given normal.
pub fn plane_patch(point: Vec3, normal: Vec3, half_width: f64, n: usize) -> Result<TriangleMesh> {
    check_resolution(n, n)?;
    let nrm = unit(normal).ok_or_else(|| Error::InvalidMesh("zero plane normal".into()))?;
    let (e1, e2) = frame_about(&nrm);
    let m = n + 1;
    let mut vertices = Vec::with_capacity(m * m);
    for i in 0..m {
        for j in 0..m {
            let a = -half_width + 2.0 * half_width * i as f64 / n as f64;
            let b = -half_width + 2.0 * half_width * j as f64 / n as f64;
            vertices.push(point + e1.into_inner() * a + e2.into_inner() * b);
        }
    }
    TriangleMesh::new(vertices, grid_faces(n, |i, j| i * m + j, true, false))
}

/// Closed cube-sphere mesh with `n x n` quads per cube face, wound with the
/// normal toward the center.
pub fn closed_sphere(center: Vec3, radius: f64, n: usize) -> Result<TriangleMesh> {
    check_resolution(n, n)?;
    let mut index: HashMap<[usize; 3], usize> = HashMap::new();
    let mut vertices = Vec::new();
    let mut faces = Vec::new();
    let half = n as f64 / 2.0;
    for a in 0..3 {
        for side in [0, n] {
            let (b, c) = if side == n {
                ((a + 1) % 3, (a + 2) % 3)
            } else {
                ((a + 2) % 3, (a + 1) % 3)
            };
            let mut id = |u: usize, v: usize| {
                let mut key = [0; 3];
                key[a] = side;
                key[b] = u;
                key[c] = v;
                *index.entry(key).or_insert_with(|| {
                    let g = Vec3::new(key[0] as f64 - half, key[1] as f64 - half, key[2] as f64 - half);
                    vertices.push(center + g.normalize() * radius);
                    vertices.len() - 1
                })
            };
            let mut ids = vec![vec![0; n + 1]; n + 1];
            for (u, row) in ids.iter_mut().enumerate() {
                for (v, slot) in row.iter_mut().enumerate() {
                    *slot = id(u, v);
                }
            }
            faces.extend(grid_faces(n, |u, v| ids[u][v], false, true));
        }
    }
    TriangleMesh::new(vertices, faces)
}

/// Mesh with the node layout and winding of a [`PolarGrid`]: node 0 is
/// `point(0, 0)`, node `(i, j)` for ring `i = 1..=n_s` is `point(i, j)`.
pub fn polar_mesh(n_theta: usize, n_s: usize, point: impl Fn(usize, usize) -> Vec3) -> Result<TriangleMesh> {
    check_resolution(n_theta, n_s)?;
    let mut vertices = vec![point(0, 0)];
    for i in 1..=n_s {
        for j in 0..n_theta {
            vertices.push(point(i, j));
        }
    }
    let grid = PolarGrid::new(SphericalDomain::cap(1.0), n_theta, n_s)?;
    TriangleMesh::new(vertices, grid.faces())
}

/// Surface of revolution about `+z` through the meridian points `(s, t)`
/// (polar angle, distance from the origin), starting at the pole `s = 0`.
pub fn surface_of_revolution(meridian: &[(f64, f64)], n_theta: usize) -> Result<TriangleMesh> {
    if meridian.len() < 4 || meridian[0].0 != 0.0 {
        return Err(Error::InvalidMesh(
            "meridian needs at least 4 points and must start on the axis".into(),
        ));
    }
    let domain = SphericalDomain::cap(1.0);
    polar_mesh(n_theta, meridian.len() - 1, |i, j| {
        let (s, t) = meridian[i];
        domain.direction(2.0 * PI * j as f64 / n_theta as f64, s) * t
    })
}

/// Per-vertex discrete jets and a report of poorly shaped one-rings.
#[derive(Debug, Clone, PartialEq)]
pub struct DiscreteJets {
    /// `None` on boundary vertices.
    pub jets: Vec<Option<SurfaceJet>>,
    pub quality: JetQuality,
}

#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "camelCase")]
pub struct JetQuality {
    /// Interior vertices where obtuse triangles carry more than half the
    /// one-ring area.
    pub obtuse_dominated: Vec<usize>,
    /// Interior vertices where the principal curvatures fell back to umbilic.
    pub umbilic_fallback: usize,
}

/// Discrete normal, mean curvature and principal curvatures at interior
/// vertices.
///
/// The mean-curvature vector is the cotangent Laplacian of the position with
/// mixed Voronoi areas; `H` is half its component along the area-weighted
/// winding normal. The Gaussian curvature is the angle defect over the mixed
/// area.
pub fn discrete_jets(mesh: &TriangleMesh) -> DiscreteJets {
    let nv = mesh.vertices.len();
    let mut lap = vec![Vec3::zeros(); nv];
    let mut normal = vec![Vec3::zeros(); nv];
    let mut mixed = vec![0.0; nv];
    let mut angle_sum = vec![0.0; nv];
    let mut ring_area = vec![0.0; nv];
    let mut obtuse_area = vec![0.0; nv];
    let v = &mesh.vertices;
    for f in &mesh.faces {
        let p = [v[f[0]], v[f[1]], v[f[2]]];
        let fnormal = (p[1] - p[0]).cross(&(p[2] - p[0]));
        let area = 0.5 * fnormal.norm();
        let mut cot = [0.0; 3];
        let mut ang = [0.0; 3];
        for k in 0..3 {
            let a = p[(k + 1) % 3] - p[k];
            let b = p[(k + 2) % 3] - p[k];
            let cr = a.cross(&b).norm();
            let dt = a.dot(&b);
            cot[k] = dt / cr;
            ang[k] = cr.atan2(dt);
        }
        let obtuse = ang.iter().position(|&x| x > 0.5 * PI);
        for k in 0..3 {
            let i = f[k];
            let j = f[(k + 1) % 3];
            let l = f[(k + 2) % 3];
            // edge (i, j) is opposite vertex l, edge (i, l) opposite vertex j
            let wij = cot[(k + 2) % 3];
            let wil = cot[(k + 1) % 3];
            lap[i] += (v[j] - v[i]) * wij + (v[l] - v[i]) * wil;
            normal[i] += fnormal;
            angle_sum[i] += ang[k];
            ring_area[i] += area;
            mixed[i] += match obtuse {
                None => 0.125 * ((v[j] - v[i]).norm_squared() * wij + (v[l] - v[i]).norm_squared() * wil),
                Some(o) if o == k => 0.5 * area,
                Some(_) => 0.25 * area,
            };
            if obtuse.is_some() {
                obtuse_area[i] += area;
            }
        }
    }
    let boundary = mesh.boundary_flags();
    let mut quality = JetQuality::default();
    let jets = (0..nv)
        .map(|i| {
            if boundary[i] || mixed[i] <= 0.0 {
                return None;
            }
            if obtuse_area[i] > 0.5 * ring_area[i] {
                quality.obtuse_dominated.push(i);
            }
            let n: UnitVec3 = unit(normal[i])?;
            let hvec = lap[i] / (2.0 * mixed[i]);
            let h = 0.5 * hvec.dot(&n);
            let k = (2.0 * PI - angle_sum[i]) / mixed[i];
            let disc = h * h - k;
            Some(if disc > 0.0 {
                let r = disc.sqrt();
                SurfaceJet::new(v[i], n, h + r, h - r)
            } else {
                quality.umbilic_fallback += 1;
                SurfaceJet::umbilic(v[i], n, h)
            })
        })
        .collect();
    DiscreteJets { jets, quality }
}

/// Umbilic jets from an algebraic sphere fitted to each interior vertex and
/// its one-ring. Normals are the fitted ones, oriented like the winding
/// normal.
///
/// The fit `a |x|^2 + b.x + c = 0` is a least-squares null vector, so planes
/// come out with `a = 0`. Exact on meshes whose vertices lie on one sphere or
/// plane; on other surfaces `H` is a one-ring average.
pub fn fitted_sphere_jets(mesh: &TriangleMesh) -> Vec<Option<SurfaceJet>> {
    let nv = mesh.vertices.len();
    let v = &mesh.vertices;
    let mut ring: Vec<Vec<usize>> = vec![Vec::new(); nv];
    let mut normal = vec![Vec3::zeros(); nv];
    for f in &mesh.faces {
        let fnormal = (v[f[1]] - v[f[0]]).cross(&(v[f[2]] - v[f[0]]));
        for k in 0..3 {
            normal[f[k]] += fnormal;
            for d in [1, 2] {
                let o = f[(k + d) % 3];
                if !ring[f[k]].contains(&o) {
                    ring[f[k]].push(o);
                }
            }
        }
    }
    let boundary = mesh.boundary_flags();
    (0..nv)
        .map(|i| {
            if boundary[i] || ring[i].len() < 4 {
                return None;
            }
            let n = unit(normal[i])?;
            let scale = ring[i].iter().map(|&j| (v[j] - v[i]).norm()).sum::<f64>() / ring[i].len() as f64;
            // rows [|x|^2, x, y, z, 1] in coordinates centered at the vertex
            let rows: Vec<[f64; 5]> = std::iter::once(i)
                .chain(ring[i].iter().copied())
                .map(|j| {
                    let x = (v[j] - v[i]) / scale;
                    [x.norm_squared(), x.x, x.y, x.z, 1.0]
                })
                .collect();
            let m = nalgebra::DMatrix::from_fn(rows.len(), 5, |r, c| rows[r][c]);
            let ata = m.transpose() * &m;
            let eig = nalgebra::SymmetricEigen::new(ata);
            let k = eig.eigenvalues.imin();
            let coef = eig.eigenvectors.column(k);
            // gradient of the fitted function at the vertex (x = 0)
            let grad = Vec3::new(coef[1], coef[2], coef[3]);
            let g = grad.norm();
            if g == 0.0 {
                return None;
            }
            // mean curvature of the level set w.r.t. grad / |grad| is -2a / |grad|
            let h = -2.0 * coef[0] / g / scale;
            let (nf, h) = if grad.dot(&n) < 0.0 { (-grad / g, -h) } else { (grad / g, h) };
            Some(SurfaceJet::umbilic(v[i], unit(nf)?, h))
        })
        .collect()
}

/// Vertex-wise inversion keeping the face order.
///
/// Inversion reverses orientation, so the winding normal of the image is the
/// opposite of the inverted Gauss map `N^` carried by [`crate::geom::invert_jet`].
pub fn invert_mesh(mesh: &TriangleMesh, s: InversionSphere) -> Result<TriangleMesh> {
    if let Some(i) = mesh.vertices.iter().position(|v| v.norm() < MIN_VERTEX_RADIUS) {
        return Err(Error::VertexAtOrigin(i));
    }
    let vertices = mesh
        .vertices
        .iter()
        .map(|p| invert_point(*p, s))
        .collect::<Result<Vec<_>>>()?;
    TriangleMesh::new(vertices, mesh.faces.clone())
}

/// How a ray from the origin meets the surface at one parameter value.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum HitKind {
    /// Passes to the side the winding normal points to.
    ToNormalSide,
    /// Passes to the other side.
    ToBackSide,
    /// Grazes a fold: faces of both facings meet at the same point.
    Touch,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct RayHit {
    /// Distance from the origin along the unit direction.
    pub t: f64,
    pub kind: HitKind,
    pub face: usize,
}

struct Chart {
    m: Vec3,
    e1: Vec3,
    e2: Vec3,
    lo: [f64; 2],
    cell: [f64; 2],
    dims: [usize; 2],
    buckets: Vec<Vec<u32>>,
}

impl Chart {
    fn project(&self, p: &Vec3) -> [f64; 2] {
        let q = p / p.dot(&self.m);
        [q.dot(&self.e1), q.dot(&self.e2)]
    }

    fn bucket(&self, c: [f64; 2]) -> Option<(usize, usize)> {
        let x = ((c[0] - self.lo[0]) / self.cell[0]).floor();
        let y = ((c[1] - self.lo[1]) / self.cell[1]).floor();
        if x < 0.0 || y < 0.0 || x >= self.dims[0] as f64 || y >= self.dims[1] as f64 {
            None
        } else {
            Some((x as usize, y as usize))
        }
    }
}

/// Casts rays from the origin against a mesh.
///
/// Faces are bucketed in the gnomonic chart about the mean vertex direction,
/// where rays from the origin become points; meshes that do not fit in a
/// hemisphere about that direction are tested face by face.
pub struct RayCaster<'a> {
    mesh: &'a TriangleMesh,
    chart: Option<Chart>,
}

impl<'a> RayCaster<'a> {
    pub fn new(mesh: &'a TriangleMesh) -> Self {
        Self {
            mesh,
            chart: Self::build_chart(mesh),
        }
    }

    fn build_chart(mesh: &TriangleMesh) -> Option<Chart> {
        let sum: Vec3 = mesh.vertices.iter().map(|v| v.normalize()).sum();
        let m = unit(sum)?;
        if mesh.vertices.iter().any(|v| v.normalize().dot(&m) < 0.05) {
            return None;
        }
        let (e1, e2) = frame_about(&m);
        let mut chart = Chart {
            m: m.into_inner(),
            e1: e1.into_inner(),
            e2: e2.into_inner(),
            lo: [0.0; 2],
            cell: [1.0; 2],
            dims: [1, 1],
            buckets: Vec::new(),
        };
        let proj: Vec<[f64; 2]> = mesh.vertices.iter().map(|v| chart.project(v)).collect();
        let mut lo = [f64::INFINITY; 2];
        let mut hi = [f64::NEG_INFINITY; 2];
        for c in &proj {
            for k in 0..2 {
                lo[k] = lo[k].min(c[k]);
                hi[k] = hi[k].max(c[k]);
            }
        }
        let pad = 1e-9 * (hi[0] - lo[0]).max(hi[1] - lo[1]).max(1e-300);
        let side = ((mesh.faces.len() as f64).sqrt().ceil() as usize).clamp(1, 1024);
        for k in 0..2 {
            lo[k] -= pad;
            hi[k] += pad;
            chart.cell[k] = (hi[k] - lo[k]) / side as f64;
        }
        chart.lo = lo;
        chart.dims = [side, side];
        chart.buckets = vec![Vec::new(); side * side];
        for (fi, f) in mesh.faces.iter().enumerate() {
            let mut flo = [f64::INFINITY; 2];
            let mut fhi = [f64::NEG_INFINITY; 2];
            for &k in f {
                for d in 0..2 {
                    flo[d] = flo[d].min(proj[k][d]);
                    fhi[d] = fhi[d].max(proj[k][d]);
                }
            }
            let (x0, y0) = chart
                .bucket([flo[0] - pad, flo[1] - pad])
                .unwrap_or((0, 0));
            let (x1, y1) = chart
                .bucket([fhi[0] + pad, fhi[1] + pad])
                .unwrap_or((side - 1, side - 1));
            for x in x0..=x1 {
                for y in y0..=y1 {
                    chart.buckets[x * side + y].push(fi as u32);
                }
            }
        }
        Some(chart)
    }

    fn intersect(&self, fi: usize, u: &Vec3) -> Option<RayHit> {
        let [a, b, c] = self.mesh.faces[fi];
        let v = &self.mesh.vertices;
        let e1 = v[b] - v[a];
        let e2 = v[c] - v[a];
        let pvec = u.cross(&e2);
        let det = e1.dot(&pvec);
        if det.abs() < 1e-300 {
            return None;
        }
        let inv = 1.0 / det;
        let tvec = -v[a];
        let bu = tvec.dot(&pvec) * inv;
        if !(-RAY_EPS..=1.0 + RAY_EPS).contains(&bu) {
            return None;
        }
        let qvec = tvec.cross(&e1);
        let bv = u.dot(&qvec) * inv;
        if bv < -RAY_EPS || bu + bv > 1.0 + RAY_EPS {
            return None;
        }
        let t = e2.dot(&qvec) * inv;
        if t <= 0.0 {
            return None;
        }
        let facing = e1.cross(&e2).dot(u);
        Some(RayHit {
            t,
            kind: if facing > 0.0 {
                HitKind::ToNormalSide
            } else {
                HitKind::ToBackSide
            },
            face: fi,
        })
    }

    /// Raw face hits along the unit direction `u`, sorted by distance.
    pub fn raw_hits(&self, u: &Vec3) -> Vec<RayHit> {
        let mut hits: Vec<RayHit> = match &self.chart {
            Some(ch) => {
                if u.dot(&ch.m) <= 0.0 {
                    return Vec::new();
                }
                match ch.bucket(ch.project(u)) {
                    None => Vec::new(),
                    Some((x, y)) => ch.buckets[x * ch.dims[1] + y]
                        .iter()
                        .filter_map(|&fi| self.intersect(fi as usize, u))
                        .collect(),
                }
            }
            None => (0..self.mesh.faces.len())
                .filter_map(|fi| self.intersect(fi, u))
                .collect(),
        };
        hits.sort_by(|a, b| a.t.total_cmp(&b.t).then(a.face.cmp(&b.face)));
        hits
    }

    /// Hits with coincident parameters merged: equal facings count once,
    /// mixed facings become a [`HitKind::Touch`].
    pub fn hits(&self, u: &Vec3) -> Vec<RayHit> {
        let raw = self.raw_hits(u);
        let mut merged: Vec<RayHit> = Vec::with_capacity(raw.len());
        let mut last_t = f64::NEG_INFINITY;
        for h in raw {
            match merged.last_mut() {
                Some(m) if h.t - last_t <= 1e-9 * h.t => {
                    if m.kind != h.kind {
                        m.kind = HitKind::Touch;
                    }
                }
                _ => merged.push(h),
            }
            last_t = h.t;
        }
        merged
    }
}

/// Outcome of the radial-graph test.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "camelCase")]
pub struct RadialGraphCheck {
    pub radial: bool,
    /// A direction meeting the mesh at least twice.
    pub witness: Option<Vec3>,
    pub hits: usize,
    pub rays: usize,
}

/// Directions on which [`is_radial_graph`] casts rays: the face barycenters,
/// three interior points per face, and a Fibonacci sample of the sphere.
pub fn probe_directions(mesh: &TriangleMesh) -> Vec<Vec3> {
    let v = &mesh.vertices;
    let mut dirs = Vec::with_capacity(4 * mesh.faces.len() + 2048);
    for f in &mesh.faces {
        let (a, b, c) = (v[f[0]], v[f[1]], v[f[2]]);
        dirs.push(((a + b + c) / 3.0).normalize());
        dirs.push((a * 0.6 + b * 0.2 + c * 0.2).normalize());
        dirs.push((a * 0.2 + b * 0.6 + c * 0.2).normalize());
        dirs.push((a * 0.2 + b * 0.2 + c * 0.6).normalize());
    }
    let n = 2048;
    let golden = PI * (3.0 - 5f64.sqrt());
    for k in 0..n {
        let z = 1.0 - 2.0 * (k as f64 + 0.5) / n as f64;
        let r = (1.0 - z * z).sqrt();
        let t = golden * k as f64;
        dirs.push(Vec3::new(r * t.cos(), r * t.sin(), z));
    }
    dirs
}

/// Whether every probed ray from the origin meets the mesh at most once.
pub fn is_radial_graph(mesh: &TriangleMesh) -> RadialGraphCheck {
    let caster = RayCaster::new(mesh);
    let dirs = probe_directions(mesh);
    let counts: Vec<usize> = dirs.par_iter().map(|u| caster.hits(u).len()).collect();
    let worst = counts.iter().position(|&c| c >= 2);
    RadialGraphCheck {
        radial: worst.is_none(),
        witness: worst.map(|k| dirs[k]),
        hits: worst.map_or(counts.iter().copied().max().unwrap_or(0), |k| counts[k]),
        rays: dirs.len(),
    }
}
