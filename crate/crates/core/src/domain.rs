//! Spherical domains `D` on the unit sphere, parametrized in geodesic polar
//! coordinates `(theta, s)` about a center direction.
//!
//! `s` is the angle from the center and `theta` the azimuth measured in the
//! frame `(e1, e2)`. For a circular cone the center is `+z`, `e1 = +x`,
//! `e2 = +y`, so `theta` is the usual azimuth. Polygonal domains are stored in
//! the gnomonic chart about the center, where great-circle arcs are straight
//! segments; the domain must be star-shaped with respect to its center.

use std::f64::consts::PI;

use nalgebra::{Unit, Vector2};
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::geom::{unit, UnitVec3, Vec3};

/// Angular tolerance for "on the boundary" direction tests.
pub const DIRECTION_TOL: f64 = 1e-9;

/// Position of a direction relative to a spherical domain.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum RayClass {
    Inside,
    OnBoundary,
    Outside,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
enum Shape {
    Cap { radius: f64 },
    /// Gnomonic coordinates of the vertices, counter-clockwise.
    Polygon { chart: Vec<[f64; 2]> },
}

/// A spherical domain with a polar parametrization.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SphericalDomain {
    center: UnitVec3,
    e1: UnitVec3,
    e2: UnitVec3,
    shape: Shape,
}

impl SphericalDomain {
    /// Spherical cap of angular radius `phi` about `+z`.
    pub fn cap(phi: f64) -> Self {
        Self {
            center: Vec3::z_axis(),
            e1: Vec3::x_axis(),
            e2: Vec3::y_axis(),
            shape: Shape::Cap { radius: phi },
        }
    }

    /// Geodesic polygon through `vertices` (unit vectors), star-shaped with
    /// respect to `center`. Vertex order may be either orientation.
    pub fn polygon(vertices: &[UnitVec3], center: UnitVec3) -> Result<Self> {
        if vertices.len() < 3 {
            return Err(Error::InvalidCone(format!(
                "boundary needs at least 3 points, got {}",
                vertices.len()
            )));
        }
        let (e1, e2) = frame_about(&center);
        let mut chart = Vec::with_capacity(vertices.len());
        for (i, v) in vertices.iter().enumerate() {
            let c = v.dot(&center);
            if c <= 1e-9 {
                return Err(Error::InvalidCone(format!(
                    "boundary point {i} is not in the open hemisphere about the center"
                )));
            }
            chart.push([v.dot(&e1) / c, v.dot(&e2) / c]);
        }
        // Star-shaped about the center: every edge seen with the same turning sign,
        // total turning one full revolution.
        let n = chart.len();
        let mut total = 0.0;
        let mut sign = 0.0;
        for i in 0..n {
            let a = chart[i];
            let b = chart[(i + 1) % n];
            let cross = a[0] * b[1] - a[1] * b[0];
            if cross.abs() < 1e-14 {
                return Err(Error::InvalidCone(format!(
                    "edge {i} is radial as seen from the center"
                )));
            }
            if sign == 0.0 {
                sign = cross.signum();
            } else if cross.signum() != sign {
                return Err(Error::InvalidCone(
                    "boundary is not star-shaped about the center (or not simple)".into(),
                ));
            }
            total += cross.atan2(a[0] * b[0] + a[1] * b[1]);
        }
        if (total.abs() - 2.0 * PI).abs() > 1e-6 {
            return Err(Error::InvalidCone(
                "boundary does not wind once around the center".into(),
            ));
        }
        if sign < 0.0 {
            chart.reverse();
        }
        Ok(Self {
            center,
            e1,
            e2,
            shape: Shape::Polygon { chart },
        })
    }

    pub fn center(&self) -> UnitVec3 {
        self.center
    }

    pub fn frame(&self) -> (UnitVec3, UnitVec3) {
        (self.e1, self.e2)
    }

    /// Angular radius of a cap domain.
    pub fn cap_radius(&self) -> Option<f64> {
        match self.shape {
            Shape::Cap { radius } => Some(radius),
            Shape::Polygon { .. } => None,
        }
    }

    /// Direction at polar coordinates `(theta, s)`.
    pub fn direction(&self, theta: f64, s: f64) -> Vec3 {
        let (st, ct) = theta.sin_cos();
        let (ss, cs) = s.sin_cos();
        self.center.into_inner() * cs + (self.e1.into_inner() * ct + self.e2.into_inner() * st) * ss
    }

    /// Polar coordinates `(theta in [0, 2pi), s in [0, pi])` of a direction.
    pub fn polar(&self, u: &Vec3) -> (f64, f64) {
        let x = u.dot(&self.e1);
        let y = u.dot(&self.e2);
        let z = u.dot(&self.center);
        let mut theta = y.atan2(x);
        if theta < 0.0 {
            theta += 2.0 * PI;
        }
        (theta, x.hypot(y).atan2(z))
    }

    /// Boundary angle `s_max(theta)` along the meridian at azimuth `theta`.
    pub fn boundary_angle(&self, theta: f64) -> f64 {
        match &self.shape {
            Shape::Cap { radius } => *radius,
            Shape::Polygon { chart } => {
                let d = Vector2::new(theta.cos(), theta.sin());
                let n = chart.len();
                let mut best = f64::INFINITY;
                for i in 0..n {
                    let a = Vector2::from(chart[i]);
                    let b = Vector2::from(chart[(i + 1) % n]);
                    let e = b - a;
                    // solve t d = a + u e
                    let det = d.x * (-e.y) - d.y * (-e.x);
                    if det.abs() < 1e-300 {
                        continue;
                    }
                    let t = (a.x * (-e.y) - a.y * (-e.x)) / det;
                    let u = (d.x * a.y - d.y * a.x) / det;
                    if t > 0.0 && (-1e-12..=1.0 + 1e-12).contains(&u) {
                        best = best.min(t);
                    }
                }
                best.atan()
            }
        }
    }

    /// Geodesic length of the boundary between azimuths `t0 < t1` as traced
    /// by the grid: exact for caps, the great-circle chord for polygons.
    pub fn boundary_arc(&self, t0: f64, t1: f64) -> f64 {
        match &self.shape {
            Shape::Cap { radius } => radius.sin() * (t1 - t0).abs(),
            Shape::Polygon { .. } => {
                let a = self.direction(t0, self.boundary_angle(t0));
                let b = self.direction(t1, self.boundary_angle(t1));
                a.cross(&b).norm().atan2(a.dot(&b))
            }
        }
    }

    /// Classifies a unit direction.
    pub fn classify(&self, u: &Vec3) -> RayClass {
        let Some(u) = unit(*u) else {
            return RayClass::Outside;
        };
        let (theta, s) = self.polar(&u);
        match &self.shape {
            Shape::Cap { radius } => classify_gap(s - radius),
            Shape::Polygon { chart } => {
                if u.dot(&self.center) <= 0.0 {
                    return RayClass::Outside;
                }
                // Distance to the nearest edge plane, in angle.
                let n = chart.len();
                let mut dist = f64::INFINITY;
                for i in 0..n {
                    let a = self.lift(chart[i]);
                    let b = self.lift(chart[(i + 1) % n]);
                    let normal = a.cross(&b).normalize();
                    let off = normal.dot(&u).asin().abs();
                    // only count edges whose wedge contains u
                    let inside_wedge =
                        a.cross(&u).dot(&normal) >= -1e-12 && u.cross(&b).dot(&normal) >= -1e-12;
                    let d = if inside_wedge {
                        off
                    } else {
                        let da = a.cross(&u).norm().atan2(a.dot(&u));
                        let db = b.cross(&u).norm().atan2(b.dot(&u));
                        da.min(db)
                    };
                    dist = dist.min(d);
                }
                if dist <= DIRECTION_TOL {
                    RayClass::OnBoundary
                } else if s < self.boundary_angle(theta) {
                    RayClass::Inside
                } else {
                    RayClass::Outside
                }
            }
        }
    }

    /// Unit vertices of a polygonal boundary, counter-clockwise about the center.
    pub fn polygon_vertices(&self) -> Option<Vec<Vec3>> {
        match &self.shape {
            Shape::Cap { .. } => None,
            Shape::Polygon { chart } => Some(chart.iter().map(|c| self.lift(*c)).collect()),
        }
    }

    fn lift(&self, c: [f64; 2]) -> Vec3 {
        (self.center.into_inner() + self.e1.into_inner() * c[0] + self.e2.into_inner() * c[1])
            .normalize()
    }
}

fn classify_gap(gap: f64) -> RayClass {
    if gap.abs() <= DIRECTION_TOL {
        RayClass::OnBoundary
    } else if gap < 0.0 {
        RayClass::Inside
    } else {
        RayClass::Outside
    }
}

/// Right-handed orthonormal frame `(e1, e2)` with `e1 x e2 = c`.
pub fn frame_about(c: &UnitVec3) -> (UnitVec3, UnitVec3) {
    let helper = if c.x.abs() < 0.9 {
        Vec3::x()
    } else {
        Vec3::y()
    };
    let e1 = Unit::new_normalize(helper - c.into_inner() * helper.dot(c));
    let e2 = Unit::new_normalize(c.cross(&e1));
    (e1, e2)
}
