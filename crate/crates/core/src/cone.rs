//! Solid cones with apex at the origin, contact angles, and the spherical-cap
//! capillary configurations of a circular cone.
//!
//! A drop `Omega` in the cone is bounded by its free surface `S` and the wetted
//! part `T` of the cone wall. The normal `N` of `S` points into `Omega`, the
//! cone normal `N_C` points into the solid cone, and the contact angle is
//! `cos(gamma) = <N, N_C>` along the boundary curve.
//!
//! In a circular cone of half-angle `phi` every sphere centered on the axis
//! meets the wall at a constant angle. With `z0` the height of the center and
//! `R` the radius, a cap whose normal points to the center has
//! `cos(gamma) = z0 sin(phi) / R`; the plane perpendicular to the axis meets
//! the wall at `gamma = pi/2 + phi`.

use std::f64::consts::{FRAC_PI_2, PI};

use nalgebra::Unit;
use serde::{Deserialize, Serialize};

use crate::domain::{RayClass, SphericalDomain};
use crate::error::{Error, Result};
use crate::geom::{unit, SurfaceJet, UnitVec3, Vec3};

/// Tolerance for threshold comparisons between angles, in radians.
pub const ANGLE_TOL: f64 = 1e-9;

/// Relative distance tolerance for "point lies on the cone wall".
pub const ON_CONE_TOL: f64 = 1e-9;

/// Circular cone about `+z` with half-angle `phi` in `(0, pi/2)`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct CircularCone {
    half_angle: f64,
}

impl CircularCone {
    pub fn new(half_angle: f64) -> Result<Self> {
        if half_angle.is_finite() && half_angle > 0.0 && half_angle < FRAC_PI_2 {
            Ok(Self { half_angle })
        } else {
            Err(Error::InvalidCone(format!(
                "half-angle must lie in (0, pi/2), got {half_angle}"
            )))
        }
    }

    pub fn half_angle(&self) -> f64 {
        self.half_angle
    }

    /// Point on the wall at distance `d` from the apex and azimuth `theta`.
    pub fn wall_point(&self, d: f64, theta: f64) -> Vec3 {
        let (sp, cp) = self.half_angle.sin_cos();
        Vec3::new(d * sp * theta.cos(), d * sp * theta.sin(), d * cp)
    }
}

/// Cone over a geodesic polygon `Gamma` on the unit sphere.
///
/// The wall consists of the planar sectors `O, Gamma_i, Gamma_i+1`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct GeneralCone {
    boundary: Vec<UnitVec3>,
    interior: UnitVec3,
    #[serde(skip)]
    domain: Option<SphericalDomain>,
}

impl GeneralCone {
    /// `boundary` must be unit vectors forming a polygon that is star-shaped
    /// with respect to `interior`, all within the open hemisphere about it.
    pub fn new(boundary: Vec<Vec3>, interior: Vec3) -> Result<Self> {
        let interior =
            unit(interior).ok_or_else(|| Error::InvalidCone("zero interior marker".into()))?;
        let mut pts = Vec::with_capacity(boundary.len());
        for (i, b) in boundary.iter().enumerate() {
            if (b.norm() - 1.0).abs() > 1e-12 {
                return Err(Error::InvalidCone(format!("boundary point {i} is not unit")));
            }
            pts.push(Unit::new_unchecked(*b));
        }
        let domain = SphericalDomain::polygon(&pts, interior)?;
        // keep the boundary in the domain's counter-clockwise order
        let ordered = domain
            .polygon_vertices()
            .expect("polygon domain")
            .into_iter()
            .map(Unit::new_unchecked)
            .collect();
        Ok(Self {
            boundary: ordered,
            interior,
            domain: Some(domain),
        })
    }

    pub fn boundary(&self) -> &[UnitVec3] {
        &self.boundary
    }

    pub fn interior(&self) -> UnitVec3 {
        self.interior
    }

    fn face_normal(&self, i: usize) -> Vec3 {
        let a = self.boundary[i];
        let b = self.boundary[(i + 1) % self.boundary.len()];
        let n = a.cross(&b).normalize();
        if n.dot(&self.interior) < 0.0 {
            -n
        } else {
            n
        }
    }

    fn domain(&self) -> SphericalDomain {
        match &self.domain {
            Some(d) => d.clone(),
            None => SphericalDomain::polygon(&self.boundary, self.interior)
                .expect("validated at construction"),
        }
    }
}

/// A cone with apex at the origin.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub enum Cone {
    Circular(CircularCone),
    General(GeneralCone),
}

impl From<CircularCone> for Cone {
    fn from(c: CircularCone) -> Self {
        Cone::Circular(c)
    }
}

impl From<GeneralCone> for Cone {
    fn from(c: GeneralCone) -> Self {
        Cone::General(c)
    }
}

impl Cone {
    pub fn circular(half_angle: f64) -> Result<Self> {
        Ok(Cone::Circular(CircularCone::new(half_angle)?))
    }

    /// The spherical domain `D` with its polar parametrization.
    pub fn domain(&self) -> SphericalDomain {
        match self {
            Cone::Circular(c) => SphericalDomain::cap(c.half_angle),
            Cone::General(g) => g.domain(),
        }
    }

    pub fn as_circular(&self) -> Option<&CircularCone> {
        match self {
            Cone::Circular(c) => Some(c),
            Cone::General(_) => None,
        }
    }

    /// Relative distance of `p` from the wall, `dist / |p|`.
    pub fn wall_gap(&self, p: &Vec3) -> f64 {
        let r = p.norm();
        match self {
            Cone::Circular(c) => {
                let angle = p.xy().norm().atan2(p.z);
                (angle - c.half_angle).sin().abs()
            }
            Cone::General(g) => {
                let u = p / r;
                (0..g.boundary.len())
                    .map(|i| wedge_gap(g, i, &u))
                    .fold(f64::INFINITY, f64::min)
            }
        }
    }

    /// Whether `p` lies on the wall within [`ON_CONE_TOL`].
    pub fn on_wall(&self, p: &Vec3) -> bool {
        p.norm() > 0.0 && self.wall_gap(p) <= ON_CONE_TOL
    }
}

/// Angular gap between direction `u` and the sector `O, Gamma_i, Gamma_i+1`.
fn wedge_gap(g: &GeneralCone, i: usize, u: &Vec3) -> f64 {
    let a = g.boundary[i].into_inner();
    let b = g.boundary[(i + 1) % g.boundary.len()].into_inner();
    let n = a.cross(&b).normalize();
    let inside = a.cross(u).dot(&n) >= 0.0 && u.cross(&b).dot(&n) >= 0.0;
    if inside {
        n.dot(u).abs()
    } else {
        let da = (u - a).norm();
        let db = (u - b).norm();
        da.min(db)
    }
}

/// Unit normal of the wall at `p`, pointing into the solid cone.
///
/// On a crease of a polygonal cone the two adjacent sector normals are averaged.
pub fn inward_cone_normal(p: Vec3, cone: &Cone) -> Result<UnitVec3> {
    if p.norm() == 0.0 || !p.iter().all(|x| x.is_finite()) {
        return Err(Error::PointAtOrigin);
    }
    if !cone.on_wall(&p) {
        return Err(Error::NotOnCone(p));
    }
    match cone {
        Cone::Circular(c) => {
            let (sp, cp) = c.half_angle.sin_cos();
            let radial = p.xy();
            let rn = radial.norm();
            let (cx, sx) = if rn > 0.0 {
                (radial.x / rn, radial.y / rn)
            } else {
                (1.0, 0.0)
            };
            Ok(Unit::new_normalize(Vec3::new(-cp * cx, -cp * sx, sp)))
        }
        Cone::General(g) => {
            let u = p.normalize();
            let n = g.boundary.len();
            let gaps: Vec<f64> = (0..n).map(|i| wedge_gap(g, i, &u)).collect();
            let best = (0..n)
                .min_by(|&a, &b| gaps[a].total_cmp(&gaps[b]))
                .expect("non-empty boundary");
            let mut normal = g.face_normal(best);
            // crease: adjacent sector equally close
            for j in [(best + n - 1) % n, (best + 1) % n] {
                if gaps[j] <= ON_CONE_TOL {
                    normal += g.face_normal(j);
                }
            }
            Ok(Unit::new_normalize(normal))
        }
    }
}

/// `arccos <n_surface, n_cone>` in `[0, pi]`, evaluated with `atan2` for
/// accuracy near `0` and `pi`.
pub fn contact_angle(n_surface: &UnitVec3, n_cone: &UnitVec3) -> f64 {
    n_surface
        .cross(n_cone)
        .norm()
        .atan2(n_surface.dot(n_cone))
}

/// Classifies a direction with respect to the cone's spherical domain.
pub fn ray_through(u: &Vec3, cone: &Cone) -> RayClass {
    cone.domain().classify(u)
}

/// The configurations of spherical caps and discs in a circular cone.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum CapCase {
    /// `gamma > pi/2 + phi`: concave interface.
    ConcaveA,
    /// `pi/2 - phi <= gamma < pi/2 + phi`: convex interface.
    ConvexB,
    /// `gamma < pi/2 - phi`: two spherical caps.
    TwoCapsC,
    /// `gamma = pi/2 + phi`: flat interface.
    FlatD,
}

/// Sign of the mean curvature with respect to the normal pointing into the drop.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum HSign {
    Positive,
    Zero,
    Negative,
}

/// Which classification threshold an angle pair sits on, if any.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Threshold {
    /// `gamma = pi/2 - phi` (hemispherical cap through the apex).
    Hemisphere,
    /// `gamma = pi/2 + phi` (flat interface).
    Flat,
}

fn check_angles(gamma: f64, phi: f64) -> Result<()> {
    if !(phi.is_finite() && phi > 0.0 && phi < FRAC_PI_2) {
        return Err(Error::InvalidAngle(format!("phi = {phi} not in (0, pi/2)")));
    }
    if !(gamma.is_finite() && (0.0..=PI).contains(&gamma)) {
        return Err(Error::InvalidAngle(format!("gamma = {gamma} not in [0, pi]")));
    }
    Ok(())
}

/// Case of the spherical-cap configuration for contact angle `gamma` in a
/// circular cone of half-angle `phi`.
pub fn classify_configuration(gamma: f64, phi: f64) -> Result<CapCase> {
    check_angles(gamma, phi)?;
    let flat = FRAC_PI_2 + phi;
    let hemi = FRAC_PI_2 - phi;
    Ok(if (gamma - flat).abs() <= ANGLE_TOL {
        CapCase::FlatD
    } else if gamma > flat {
        CapCase::ConcaveA
    } else if gamma >= hemi - ANGLE_TOL {
        CapCase::ConvexB
    } else {
        CapCase::TwoCapsC
    })
}

/// Sign of `H` of the capillary cap with contact angle `gamma`.
///
/// The umbilical capillary surface is a plane exactly when
/// `gamma = pi/2 + phi`; it bulges away from the apex (H > 0) below that
/// angle and toward it (H < 0) above.
pub fn sign_of_h(gamma: f64, phi: f64) -> Result<HSign> {
    check_angles(gamma, phi)?;
    let flat = FRAC_PI_2 + phi;
    Ok(if (gamma - flat).abs() <= ANGLE_TOL {
        HSign::Zero
    } else if gamma < flat {
        HSign::Positive
    } else {
        HSign::Negative
    })
}

/// Threshold an angle pair lies on, within [`ANGLE_TOL`].
pub fn classification_threshold(gamma: f64, phi: f64) -> Option<Threshold> {
    if (gamma - (FRAC_PI_2 + phi)).abs() <= ANGLE_TOL {
        Some(Threshold::Flat)
    } else if (gamma - (FRAC_PI_2 - phi)).abs() <= ANGLE_TOL {
        Some(Threshold::Hemisphere)
    } else {
        None
    }
}

/// The free surface of a cap configuration.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "camelCase")]
pub enum CapSurface {
    /// Sphere centered at `(0, 0, z_offset)`.
    #[serde(rename_all = "camelCase")]
    Sphere { z_offset: f64, radius: f64 },
    /// Plane `z = height`.
    Plane { height: f64 },
}

/// A spherical cap or planar disc meeting a circular cone at angle `gamma`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "camelCase")]
pub struct CapConfiguration {
    pub phi: f64,
    pub gamma: f64,
    pub case: CapCase,
    pub surface: CapSurface,
    /// Mean curvature with respect to the normal pointing into the drop.
    pub mean_curvature: f64,
    /// Distance from the apex to the boundary circle of the returned cap.
    pub boundary_distance: f64,
    /// For two-cap configurations, the boundary distance of the far cap.
    pub other_cap_distance: Option<f64>,
}

/// Which sheet of the sphere meets the boundary ray, and how the normal points.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
enum Sheet {
    /// Apex inside the sphere, normal to the center.
    Convex,
    /// Apex outside, near sheet, normal to the center (drop beyond the cap).
    NearInward,
    /// Apex outside, near sheet, normal away from the center.
    NearOutward,
}

impl CapConfiguration {
    pub fn cone(&self) -> CircularCone {
        CircularCone { half_angle: self.phi }
    }

    /// Whether the drop lies on the apex side of the free surface.
    pub fn wets_apex(&self) -> bool {
        self.case != CapCase::TwoCapsC
    }

    /// Distance from the apex to the surface along the ray at polar angle `s`
    /// (the sheet the returned cap belongs to), for `0 <= s <= phi`.
    pub fn radial_distance(&self, s: f64) -> f64 {
        match self.surface {
            CapSurface::Plane { height } => height / s.cos(),
            CapSurface::Sphere { z_offset, radius } => {
                let (ss, cs) = s.sin_cos();
                let disc = (radius * radius - z_offset * z_offset * ss * ss).max(0.0).sqrt();
                if self.case == CapCase::ConvexB {
                    z_offset * cs + disc
                } else {
                    z_offset * cs - disc
                }
            }
        }
    }

    /// Unit normal at a surface point, pointing into the drop.
    pub fn normal_at(&self, p: &Vec3) -> UnitVec3 {
        match self.surface {
            CapSurface::Plane { .. } => -Vec3::z_axis(),
            CapSurface::Sphere { z_offset, .. } => {
                let to_center = Unit::new_normalize(Vec3::new(0.0, 0.0, z_offset) - p);
                if self.case == CapCase::ConcaveA {
                    -to_center
                } else {
                    to_center
                }
            }
        }
    }

    /// Analytic jet at the surface point along direction `u`.
    pub fn jet_along(&self, u: &Vec3) -> SurfaceJet {
        let u = u.normalize();
        let s = u.xy().norm().atan2(u.z);
        let p = u * self.radial_distance(s);
        SurfaceJet::umbilic(p, self.normal_at(&p), self.mean_curvature)
    }

    /// Boundary point at azimuth `theta`.
    pub fn boundary_point(&self, theta: f64) -> Vec3 {
        self.cone().wall_point(self.boundary_distance, theta)
    }

    /// Contact angle measured at the boundary point of azimuth `theta`.
    pub fn measured_contact_angle(&self, theta: f64) -> Result<f64> {
        let b = self.boundary_point(theta);
        let nc = inward_cone_normal(b, &Cone::Circular(self.cone()))?;
        Ok(contact_angle(&self.normal_at(&b), &nc))
    }
}

fn sheet_angle(cone: &Cone, b: &Vec3, z0: f64, sheet: Sheet) -> f64 {
    let c = Vec3::new(0.0, 0.0, z0);
    let to_center = Unit::new_normalize(c - b);
    let n = match sheet {
        Sheet::Convex | Sheet::NearInward => to_center,
        Sheet::NearOutward => -to_center,
    };
    let nc = inward_cone_normal(*b, cone).expect("boundary point on the wall");
    contact_angle(&n, &nc)
}

/// Bisection for `angle(z) = target` on `[lo, hi]` with `angle` monotone and
/// the target bracketed; iterates until the interval stops shrinking.
fn bisect(mut lo: f64, mut hi: f64, target: f64, angle: impl Fn(f64) -> f64) -> f64 {
    let increasing = angle(hi) > angle(lo);
    for _ in 0..400 {
        let mid = 0.5 * (lo + hi);
        if mid <= lo || mid >= hi {
            break;
        }
        let above = angle(mid) > target;
        if above == increasing {
            hi = mid;
        } else {
            lo = mid;
        }
    }
    0.5 * (lo + hi)
}

/// Axis-offset bracket used by [`construct_cap`] for a case, and the sheet.
///
/// Exposed for the monotonicity check of the root find.
pub fn cap_bracket(phi: f64, gamma: f64, d: f64, case: CapCase) -> Option<(f64, f64)> {
    let cone = Cone::Circular(CircularCone { half_angle: phi });
    let b = CircularCone { half_angle: phi }.wall_point(d, 0.0);
    let cp = phi.cos();
    let tangent = d / cp;
    let grow = |start: f64, step: f64, sheet: Sheet, done: &dyn Fn(f64) -> bool| {
        let mut z = start + step;
        let mut k = step;
        for _ in 0..2000 {
            if done(sheet_angle(&cone, &b, z, sheet)) {
                return Some(z);
            }
            k *= 2.0;
            z = start + k;
        }
        None
    };
    match case {
        CapCase::ConvexB => {
            let hi = d / (2.0 * cp);
            let lo = grow(hi, -d, Sheet::Convex, &|a| a > gamma)?;
            Some((lo, hi))
        }
        CapCase::TwoCapsC => {
            let hi = grow(tangent, d, Sheet::NearInward, &|a| a > gamma)?;
            Some((tangent, hi))
        }
        CapCase::ConcaveA => {
            let hi = grow(tangent, d, Sheet::NearOutward, &|a| a < gamma)?;
            Some((tangent, hi))
        }
        CapCase::FlatD => None,
    }
}

/// Sampled contact angle of the sphere through the boundary circle with
/// center height `z0`, on the sheet used for `case`.
pub fn sampled_cap_angle(phi: f64, d: f64, z0: f64, case: CapCase) -> f64 {
    let cone = Cone::Circular(CircularCone { half_angle: phi });
    let b = CircularCone { half_angle: phi }.wall_point(d, 0.0);
    let sheet = match case {
        CapCase::ConvexB | CapCase::FlatD => Sheet::Convex,
        CapCase::TwoCapsC => Sheet::NearInward,
        CapCase::ConcaveA => Sheet::NearOutward,
    };
    sheet_angle(&cone, &b, z0, sheet)
}

/// The sphere or plane meeting `cone` at angle `gamma` along the circle at
/// distance `boundary_distance` from the apex.
///
/// For two-cap configurations the cap nearer the apex is returned and the
/// far cap's boundary distance is recorded in `other_cap_distance`.
pub fn construct_cap(
    cone: &CircularCone,
    gamma: f64,
    boundary_distance: f64,
) -> Result<CapConfiguration> {
    let phi = cone.half_angle;
    CircularCone::new(phi)?;
    if gamma == 0.0 {
        return Err(Error::DegenerateTangency);
    }
    let case = classify_configuration(gamma, phi)?;
    let d = boundary_distance;
    if !(d.is_finite() && d > 0.0) {
        return Err(Error::InvalidConfig(format!(
            "boundary distance must be positive, got {d}"
        )));
    }
    let b = cone.wall_point(d, 0.0);
    if case == CapCase::FlatD {
        return Ok(CapConfiguration {
            phi,
            gamma,
            case,
            surface: CapSurface::Plane { height: b.z },
            mean_curvature: 0.0,
            boundary_distance: d,
            other_cap_distance: None,
        });
    }
    let (lo, hi) = cap_bracket(phi, gamma, d, case)
        .ok_or_else(|| Error::InvalidAngle(format!("no bracket for gamma = {gamma}")))?;
    let z0 = bisect(lo, hi, gamma, |z| sampled_cap_angle(phi, d, z, case));
    let radius = (Vec3::new(0.0, 0.0, z0) - b).norm();
    let (mean_curvature, other_cap_distance) = match case {
        CapCase::ConvexB => (1.0 / radius, None),
        CapCase::TwoCapsC => (1.0 / radius, Some((z0 * z0 - radius * radius) / d)),
        CapCase::ConcaveA => (-1.0 / radius, None),
        CapCase::FlatD => unreachable!(),
    };
    Ok(CapConfiguration {
        phi,
        gamma,
        case,
        surface: CapSurface::Sphere {
            z_offset: z0,
            radius,
        },
        mean_curvature,
        boundary_distance: d,
        other_cap_distance,
    })
}
