//! Radial graphs over a spherical domain and the measures of the drop they
//! bound.
//!
//! A [`PolarGrid`] samples the domain `D` in geodesic polar coordinates about
//! its center: node 0 is the pole, and ring `i = 1..=n_s` at azimuth index
//! `j` sits at `s = s_max(theta_j) * i / n_s`, so ring `n_s` lies on the
//! boundary rays. Node `(i, j)` has index `1 + (i - 1) * n_theta + j`.
//!
//! The triangulation splits every quad along the same diagonal and winds the
//! faces so that their normals point toward the apex side, which is the
//! drop side for a graph that wets the apex.

use std::f64::consts::PI;

use serde::{Deserialize, Serialize};

use crate::cone::{contact_angle, inward_cone_normal, Cone};
use crate::domain::SphericalDomain;
use crate::error::{Error, Result};
use crate::geom::{unit, Vec3};

/// Geodesic polar grid over a spherical domain.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PolarGrid {
    domain: SphericalDomain,
    n_theta: usize,
    n_s: usize,
    s_max: Vec<f64>,
}

/// A grid cell: the pole triangle or a quad between two rings.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Cell {
    pub corners: [usize; 4],
    pub len: usize,
    /// Solid angle of the cell.
    pub area: f64,
}

impl Cell {
    pub fn corners(&self) -> &[usize] {
        &self.corners[..self.len]
    }
}

impl PolarGrid {
    pub fn new(domain: SphericalDomain, n_theta: usize, n_s: usize) -> Result<Self> {
        if n_theta < 3 || n_s < 3 {
            return Err(Error::InvalidResolution(n_theta, n_s));
        }
        let s_max = (0..n_theta)
            .map(|j| domain.boundary_angle(2.0 * PI * j as f64 / n_theta as f64))
            .collect();
        Ok(Self {
            domain,
            n_theta,
            n_s,
            s_max,
        })
    }

    pub fn domain(&self) -> &SphericalDomain {
        &self.domain
    }

    pub fn n_theta(&self) -> usize {
        self.n_theta
    }

    pub fn n_s(&self) -> usize {
        self.n_s
    }

    pub fn node_count(&self) -> usize {
        1 + self.n_theta * self.n_s
    }

    pub fn d_theta(&self) -> f64 {
        2.0 * PI / self.n_theta as f64
    }

    /// Node index of ring `i >= 1`, azimuth `j` (taken mod `n_theta`).
    pub fn index(&self, i: usize, j: usize) -> usize {
        debug_assert!(i >= 1 && i <= self.n_s);
        1 + (i - 1) * self.n_theta + j % self.n_theta
    }

    /// `(ring, azimuth)` of a node; the pole is ring 0.
    pub fn ring_of(&self, node: usize) -> (usize, usize) {
        if node == 0 {
            (0, 0)
        } else {
            (1 + (node - 1) / self.n_theta, (node - 1) % self.n_theta)
        }
    }

    /// Polar coordinates `(theta, s)` of a node.
    pub fn coords(&self, node: usize) -> (f64, f64) {
        let (i, j) = self.ring_of(node);
        if i == 0 {
            return (0.0, 0.0);
        }
        (
            self.d_theta() * j as f64,
            self.s_max[j] * i as f64 / self.n_s as f64,
        )
    }

    /// Unit direction of the ray through a node.
    pub fn direction(&self, node: usize) -> Vec3 {
        let (t, s) = self.coords(node);
        self.domain.direction(t, s)
    }

    pub fn is_boundary(&self, node: usize) -> bool {
        self.ring_of(node).0 == self.n_s
    }

    /// Boundary nodes in azimuth order.
    pub fn boundary_nodes(&self) -> Vec<usize> {
        (0..self.n_theta).map(|j| self.index(self.n_s, j)).collect()
    }

    /// Triangles of the grid, wound with normals toward the apex side.
    pub fn faces(&self) -> Vec<[usize; 3]> {
        let nt = self.n_theta;
        let mut faces = Vec::with_capacity(nt * (2 * self.n_s - 1));
        for j in 0..nt {
            faces.push([0, self.index(1, j + 1), self.index(1, j)]);
        }
        for i in 1..self.n_s {
            for j in 0..nt {
                let a = self.index(i, j);
                let b = self.index(i, j + 1);
                let c = self.index(i + 1, j + 1);
                let d = self.index(i + 1, j);
                faces.push([a, b, c]);
                faces.push([a, c, d]);
            }
        }
        faces
    }

    /// Solid angle of `{theta_j <= theta <= theta_j+1, s <= k/n_s * s_max(theta)}`
    /// with `s_max` interpolated linearly in `theta`.
    fn sector(&self, j: usize, k: usize) -> f64 {
        self.band(j, k as f64 / self.n_s as f64, 0.0, 1.0)
    }

    /// Solid angle of `{s <= f * s_max(theta)}` over the fraction `[u0, u1]`
    /// of sector `j`.
    fn band(&self, j: usize, f: f64, u0: f64, u1: f64) -> f64 {
        let dt = self.d_theta();
        let a = f * self.s_max[j];
        let b = f * (self.s_max[(j + 1) % self.n_theta] - self.s_max[j]);
        // mean of cos(a + b u) over u in [u0, u1]
        let half = 0.5 * b * (u1 - u0);
        let sinc = if half.abs() < 1e-8 {
            1.0 - half * half / 6.0
        } else {
            half.sin() / half
        };
        dt * (u1 - u0) * (1.0 - (a + 0.5 * b * (u0 + u1)).cos() * sinc)
    }

    /// Cells with their solid angles; they tile the gridded domain.
    pub fn cells(&self) -> Vec<Cell> {
        let nt = self.n_theta;
        let mut cells = Vec::with_capacity(nt * self.n_s);
        for j in 0..nt {
            cells.push(Cell {
                corners: [0, self.index(1, j), self.index(1, j + 1), 0],
                len: 3,
                area: self.sector(j, 1),
            });
        }
        for i in 1..self.n_s {
            for j in 0..nt {
                cells.push(Cell {
                    corners: [
                        self.index(i, j),
                        self.index(i, j + 1),
                        self.index(i + 1, j + 1),
                        self.index(i + 1, j),
                    ],
                    len: 4,
                    area: self.sector(j, i + 1) - self.sector(j, i),
                });
            }
        }
        cells
    }

    /// Solid angle of the gridded domain.
    pub fn solid_angle(&self) -> f64 {
        (0..self.n_theta).map(|j| self.sector(j, self.n_s)).sum()
    }

    /// Solid angle of the dual cell of each node: half-way to the
    /// neighbouring rings and azimuths. The dual cells tile the gridded domain.
    pub fn node_weights(&self) -> Vec<f64> {
        let (nt, ns) = (self.n_theta, self.n_s as f64);
        let mut w = vec![0.0; self.node_count()];
        w[0] = (0..nt).map(|j| self.band(j, 0.5 / ns, 0.0, 1.0)).sum();
        for i in 1..=self.n_s {
            let lo = (i as f64 - 0.5) / ns;
            let hi = ((i as f64 + 0.5) / ns).min(1.0);
            for j in 0..nt {
                let left = (j + nt - 1) % nt;
                let part = |jj: usize, u0: f64, u1: f64| self.band(jj, hi, u0, u1) - self.band(jj, lo, u0, u1);
                w[self.index(i, j)] = part(j, 0.0, 0.5) + part(left, 0.5, 1.0);
            }
        }
        w
    }

    /// Geodesic length of the boundary segment from azimuth `j` to `j + 1`.
    pub fn boundary_arc(&self, j: usize) -> f64 {
        let dt = self.d_theta();
        self.domain
            .boundary_arc(dt * j as f64, dt * (j + 1) as f64)
    }
}

/// Positive radius function over a polar grid.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RadialGraphField {
    grid: PolarGrid,
    rho: Vec<f64>,
}

impl RadialGraphField {
    pub fn new(grid: PolarGrid, rho: Vec<f64>) -> Result<Self> {
        if rho.len() != grid.node_count() {
            return Err(Error::InvalidConfig(format!(
                "field has {} values for {} nodes",
                rho.len(),
                grid.node_count()
            )));
        }
        if let Some((node, &value)) = rho
            .iter()
            .enumerate()
            .find(|(_, r)| !(r.is_finite() && **r > 0.0))
        {
            return Err(Error::NonPositiveRadius { node, value });
        }
        Ok(Self { grid, rho })
    }

    pub fn constant(grid: PolarGrid, value: f64) -> Result<Self> {
        let n = grid.node_count();
        Self::new(grid, vec![value; n])
    }

    /// Samples `f(theta, s)` at the nodes.
    pub fn from_fn(grid: PolarGrid, f: impl Fn(f64, f64) -> f64) -> Result<Self> {
        let rho = (0..grid.node_count())
            .map(|k| {
                let (t, s) = grid.coords(k);
                f(t, s)
            })
            .collect();
        Self::new(grid, rho)
    }

    pub fn grid(&self) -> &PolarGrid {
        &self.grid
    }

    pub fn rho(&self) -> &[f64] {
        &self.rho
    }

    pub fn into_rho(self) -> Vec<f64> {
        self.rho
    }

    pub fn with_rho(&self, rho: Vec<f64>) -> Result<Self> {
        Self::new(self.grid.clone(), rho)
    }

    pub fn scaled(&self, ratio: f64) -> Result<Self> {
        if !(ratio.is_finite() && ratio > 0.0) {
            return Err(Error::InvalidRatio(ratio));
        }
        self.with_rho(self.rho.iter().map(|r| r * ratio).collect())
    }

    pub fn point(&self, node: usize) -> Vec3 {
        self.grid.direction(node) * self.rho[node]
    }

    pub fn points(&self) -> Vec<Vec3> {
        (0..self.grid.node_count()).map(|k| self.point(k)).collect()
    }
}

/// Area of `S`, area of the wetted region `T` and volume of the drop.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "camelCase")]
pub struct DropMeasures {
    pub area: f64,
    pub wetted_area: f64,
    pub volume: f64,
}

/// Derivatives of the three measures with respect to the nodal radii.
#[derive(Debug, Clone, PartialEq)]
pub struct MeasureGradients {
    pub area: Vec<f64>,
    pub wetted_area: Vec<f64>,
    pub volume: Vec<f64>,
}

/// Edge `rho_b u_b - rho_a u_a`, arranged so that its rounding error is
/// relative to the edge rather than to the radii.
fn edge(rho: &[f64], dirs: &[Vec3], a: usize, b: usize) -> Vec3 {
    dirs[b] * (rho[b] - rho[a]) + (dirs[b] - dirs[a]) * rho[a]
}

/// Compensated sum.
fn fsum(values: impl Iterator<Item = f64>) -> f64 {
    let (mut sum, mut comp) = (0.0f64, 0.0f64);
    for v in values {
        let t = sum + v;
        comp += if sum.abs() >= v.abs() { (sum - t) + v } else { (v - t) + sum };
        sum = t;
    }
    sum + comp
}

/// Area, wetted area and volume of the drop bounded by the graph of `field`
/// and the cone over its domain.
pub fn drop_measures(field: &RadialGraphField) -> DropMeasures {
    let grid = &field.grid;
    let rho = &field.rho;
    let dirs: Vec<Vec3> = (0..grid.node_count()).map(|k| grid.direction(k)).collect();
    let area = fsum(grid.faces().iter().map(|&[a, b, c]| {
        0.5 * edge(rho, &dirs, a, b).cross(&edge(rho, &dirs, a, c)).norm()
    }));
    let volume = fsum(grid.node_weights().iter().zip(rho).map(|(w, r)| w * r.powi(3))) / 3.0;
    let b = grid.boundary_nodes();
    let n = b.len();
    let wetted_area = 0.5
        * fsum((0..n).map(|j| {
            let (ra, rb) = (rho[b[j]], rho[b[(j + 1) % n]]);
            grid.boundary_arc(j) * 0.5 * (ra * ra + rb * rb)
        }));
    DropMeasures {
        area,
        wetted_area,
        volume,
    }
}

/// Exact derivatives of [`drop_measures`] with respect to each `rho_k`.
pub fn measure_gradients(field: &RadialGraphField) -> MeasureGradients {
    let grid = &field.grid;
    let rho = &field.rho;
    let n = grid.node_count();
    let dirs: Vec<Vec3> = (0..n).map(|k| grid.direction(k)).collect();
    let pts: Vec<Vec3> = (0..n).map(|k| dirs[k] * rho[k]).collect();

    let mut da = vec![0.0; n];
    for f in grid.faces() {
        let [a, b, c] = f;
        let normal = (pts[b] - pts[a]).cross(&(pts[c] - pts[a]));
        let Some(nh) = unit(normal) else { continue };
        let corners = [(a, b, c), (b, c, a), (c, a, b)];
        for (x, y, z) in corners {
            // gradient of the triangle area w.r.t. vertex x
            let g = nh.cross(&(pts[z] - pts[y])) * 0.5;
            da[x] += g.dot(&dirs[x]);
        }
    }

    let mut dv = vec![0.0; n];
    for (k, w) in grid.node_weights().into_iter().enumerate() {
        dv[k] = w * rho[k] * rho[k];
    }

    let mut dw = vec![0.0; n];
    let b = grid.boundary_nodes();
    let nb = b.len();
    for j in 0..nb {
        let arc = grid.boundary_arc(j);
        let (ka, kb) = (b[j], b[(j + 1) % nb]);
        dw[ka] += 0.5 * arc * rho[ka];
        dw[kb] += 0.5 * arc * rho[kb];
    }

    MeasureGradients {
        area: da,
        wetted_area: dw,
        volume: dv,
    }
}

/// Contact angle at each boundary node, from the discrete surface normal and
/// the inward cone normal.
///
/// The meridional tangent is the second-order one-sided difference along the
/// last three rings, the boundary tangent the central difference along the
/// boundary. The surface normal is oriented like the grid faces.
pub fn boundary_contact_angles(field: &RadialGraphField, cone: &Cone) -> Result<Vec<f64>> {
    let grid = &field.grid;
    let ns = grid.n_s();
    let nt = grid.n_theta();
    (0..nt)
        .map(|j| {
            let p0 = field.point(grid.index(ns, j));
            let p1 = field.point(grid.index(ns - 1, j));
            let p2 = field.point(grid.index(ns - 2, j));
            let meridian = p0 * 3.0 - p1 * 4.0 + p2;
            let along = field.point(grid.index(ns, j + 1)) - field.point(grid.index(ns, j + nt - 1));
            let n = unit(along.cross(&meridian)).ok_or(Error::InvalidMesh(format!(
                "degenerate boundary frame at azimuth {j}"
            )))?;
            let nc = inward_cone_normal(p0, cone)?;
            Ok(contact_angle(&n, &nc))
        })
        .collect()
}
