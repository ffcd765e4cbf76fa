//! Capillary radial graphs by minimizing the capillary energy at fixed
//! volume.
//!
//! The energy of a drop with free surface `S` and wetted region `T` is
//! `E = |S| + cos(gamma) |T|`, with `gamma` the angle between the normals
//! pointing into the liquid. Critical points at fixed volume have constant
//! mean curvature and meet the cone at angle `gamma`.
//!
//! The unknowns are the nodal radii of a [`RadialGraphField`]. Volume is
//! homogeneous of degree 3 in them, so every trial point is projected back
//! onto the constraint exactly by a homothety. Search directions come from
//! L-BFGS applied to the volume-projected gradient in the metric of the
//! nodal areas `w_k rho_k^2`, which removes the pole-to-rim scale disparity
//! of the polar grid.

use std::collections::VecDeque;

use nalgebra::DMatrix;
use nalgebra_sparse::factorization::CscCholesky;
use nalgebra_sparse::{CooMatrix, CscMatrix};
use serde::{Deserialize, Serialize};

use crate::cone::{classify_configuration, sign_of_h, CapCase, Cone, HSign};
use crate::error::{Error, Result};
use crate::field::{boundary_contact_angles, drop_measures, measure_gradients, PolarGrid, RadialGraphField};
use crate::mesh::{discrete_jets, mesh_radial_graph};

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "camelCase")]
pub struct StepControl {
    /// Armijo sufficient-decrease constant.
    pub armijo: f64,
    /// Step reduction factor per backtrack.
    pub shrink: f64,
    pub max_backtracks: usize,
    /// Number of L-BFGS correction pairs.
    pub memory: usize,
}

impl Default for StepControl {
    fn default() -> Self {
        Self {
            armijo: 1e-4,
            shrink: 0.5,
            max_backtracks: 60,
            memory: 12,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "camelCase")]
pub struct SolverConfig {
    pub gamma: f64,
    pub target_volume: f64,
    pub n_theta: usize,
    pub n_s: usize,
    pub max_iterations: usize,
    /// Tolerance on `sqrt(sum_k g_k^2 / m_k)`, with `g` the volume-projected
    /// energy gradient and `m_k` the nodal areas of the graph. The norm is
    /// scale invariant; rounding of the energy puts its floor near `1e-7`
    /// on a 64x64 grid.
    pub grad_tolerance: f64,
    pub step_control: StepControl,
}

impl SolverConfig {
    pub fn new(gamma: f64, target_volume: f64, n_theta: usize, n_s: usize) -> Self {
        Self {
            gamma,
            target_volume,
            n_theta,
            n_s,
            max_iterations: 20_000,
            grad_tolerance: 1e-8,
            step_control: StepControl::default(),
        }
    }

    fn validate(&self) -> Result<()> {
        if !(self.gamma > 0.0 && self.gamma < std::f64::consts::PI) {
            return Err(Error::InvalidConfig(format!("gamma = {} not in (0, pi)", self.gamma)));
        }
        if !(self.target_volume.is_finite() && self.target_volume > 0.0) {
            return Err(Error::InvalidConfig(format!(
                "target volume must be positive, got {}",
                self.target_volume
            )));
        }
        if !(self.grad_tolerance > 0.0) {
            return Err(Error::InvalidConfig("gradient tolerance must be positive".into()));
        }
        let sc = &self.step_control;
        if !(sc.armijo > 0.0 && sc.armijo < 1.0 && sc.shrink > 0.0 && sc.shrink < 1.0) {
            return Err(Error::InvalidConfig("step control constants must lie in (0, 1)".into()));
        }
        Ok(())
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "camelCase")]
pub struct SolverResult {
    pub field: RadialGraphField,
    pub energy: f64,
    /// Area-weighted mean of the discrete mean curvature over interior vertices.
    pub mean_curvature: f64,
    /// `max - min` of the discrete mean curvature over interior vertices.
    pub h_spread: f64,
    /// Largest deviation of the measured boundary contact angle from `gamma`.
    pub contact_angle_error: f64,
    pub iterations: usize,
    pub converged: bool,
}

/// One row of the convergence history.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "camelCase")]
pub struct HistoryRow {
    pub iteration: usize,
    pub energy: f64,
    pub grad_norm: f64,
    pub h_mean: f64,
    pub h_spread: f64,
}

/// `|S| + cos(gamma) |T|` of the drop bounded by the graph of `field`.
pub fn capillary_energy(field: &RadialGraphField, gamma: f64) -> f64 {
    let m = drop_measures(field);
    m.area + gamma.cos() * m.wetted_area
}

/// Exact gradient of [`capillary_energy`] with respect to the nodal radii.
pub fn energy_gradient(field: &RadialGraphField, gamma: f64) -> Vec<f64> {
    let g = measure_gradients(field);
    let c = gamma.cos();
    g.area
        .iter()
        .zip(&g.wetted_area)
        .map(|(a, w)| a + c * w)
        .collect()
}

/// Lagrange multiplier of the volume constraint, `<dV, P dE> / <dV, P dV>` in
/// the nodal-area metric. At a discrete equilibrium it approximates `2H`.
pub fn lagrange_multiplier(field: &RadialGraphField, gamma: f64) -> f64 {
    let g = energy_gradient(field, gamma);
    let gv = measure_gradients(field).volume;
    let m = metric(field);
    multiplier(&g, &gv, &m)
}

fn metric(field: &RadialGraphField) -> Vec<f64> {
    field
        .grid()
        .node_weights()
        .iter()
        .zip(field.rho())
        .map(|(w, r)| w * r * r)
        .collect()
}

fn multiplier(g: &[f64], gv: &[f64], m: &[f64]) -> f64 {
    let num: f64 = gv.iter().zip(g).zip(m).map(|((v, e), m)| v * e / m).sum();
    let den: f64 = gv.iter().zip(m).map(|(v, m)| v * v / m).sum();
    num / den
}

/// Discrete mean-curvature statistics `(area-weighted mean, max - min)` over
/// interior vertices of the graph.
pub fn curvature_stats(field: &RadialGraphField) -> Result<(f64, f64)> {
    let mesh = crate::mesh::TriangleMesh::new(field.points(), field.grid().faces())?;
    let jets = discrete_jets(&mesh);
    let mut weight = vec![0.0; mesh.vertices().len()];
    for f in 0..mesh.faces().len() {
        let a = mesh.face_normal(f).norm() / 6.0;
        for &k in &mesh.faces()[f] {
            weight[k] += a;
        }
    }
    let (mut sum, mut wsum) = (0.0, 0.0);
    let (mut lo, mut hi) = (f64::INFINITY, f64::NEG_INFINITY);
    for (k, j) in jets.jets.iter().enumerate() {
        if let Some(j) = j {
            sum += weight[k] * j.h();
            wsum += weight[k];
            lo = lo.min(j.h());
            hi = hi.max(j.h());
        }
    }
    Ok((sum / wsum, hi - lo))
}

/// The field scaled by a homothety to the target volume.
fn project_volume(rho: &[f64], grid: &PolarGrid, target: f64) -> Result<RadialGraphField> {
    let f = RadialGraphField::new(grid.clone(), rho.to_vec())?;
    let v = drop_measures(&f).volume;
    if (v - target).abs() <= 1e-14 * target {
        return Ok(f);
    }
    f.scaled((target / v).cbrt())
}

fn dot(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| x * y).sum()
}

/// `K + M` on the unit-radius graph: the cotangent stiffness of the grid
/// directions plus the nodal areas. It models the second variation of the
/// area in the radii up to the scale of the drop.
struct Preconditioner {
    chol: CscCholesky<f64>,
}

impl Preconditioner {
    fn new(grid: &PolarGrid) -> Result<Self> {
        let n = grid.node_count();
        let dirs: Vec<_> = (0..n).map(|k| grid.direction(k)).collect();
        let mut diag = grid.node_weights();
        let mut coo = CooMatrix::new(n, n);
        for [a, b, c] in grid.faces() {
            for (x, y, z) in [(a, b, c), (b, c, a), (c, a, b)] {
                let (u, v) = (dirs[y] - dirs[x], dirs[z] - dirs[x]);
                let cot = u.dot(&v) / u.cross(&v).norm();
                let w = 0.5 * cot.max(0.0);
                coo.push(y, z, -w);
                coo.push(z, y, -w);
                diag[y] += w;
                diag[z] += w;
            }
        }
        for (k, d) in diag.into_iter().enumerate() {
            coo.push(k, k, d);
        }
        let chol = CscCholesky::factor(&CscMatrix::from(&coo))
            .map_err(|e| Error::InvalidConfig(format!("preconditioner factorization failed: {e}")))?;
        Ok(Self { chol })
    }

    fn apply(&self, v: &[f64]) -> Vec<f64> {
        let b = DMatrix::from_column_slice(v.len(), 1, v);
        self.chol.solve(&b).as_slice().to_vec()
    }
}

struct State {
    field: RadialGraphField,
    energy: f64,
    /// Gradient with its volume component removed in the nodal-area metric.
    pg: Vec<f64>,
    gv: Vec<f64>,
    grad_norm: f64,
}

fn state(field: RadialGraphField, gamma: f64) -> State {
    let energy = capillary_energy(&field, gamma);
    let g = energy_gradient(&field, gamma);
    let gv = measure_gradients(&field).volume;
    let m = metric(&field);
    let lambda = multiplier(&g, &gv, &m);
    let pg: Vec<f64> = g.iter().zip(&gv).map(|(e, v)| e - lambda * v).collect();
    let grad_norm = pg.iter().zip(&m).map(|(g, m)| g * g / m).sum::<f64>().sqrt();
    State {
        field,
        energy,
        pg,
        gv,
        grad_norm,
    }
}

type Pairs = VecDeque<(Vec<f64>, Vec<f64>, f64)>;

/// L-BFGS direction with the scaled preconditioner as initial inverse
/// Hessian, made tangent to the volume constraint.
fn direction(st: &State, memory: &Pairs, pre: &Preconditioner, scale2: f64) -> Vec<f64> {
    let n = st.pg.len();
    let mut q = st.pg.clone();
    let mut alpha = Vec::with_capacity(memory.len());
    for (s, y, rho) in memory.iter().rev() {
        let a = rho * dot(s, &q);
        for k in 0..n {
            q[k] -= a * y[k];
        }
        alpha.push(a);
    }
    let gamma0 = match memory.back() {
        Some((s, y, _)) => dot(s, y) / dot(y, &pre.apply(y)),
        None => 1.0 / scale2,
    };
    let mut r: Vec<f64> = pre.apply(&q).into_iter().map(|x| gamma0 * x).collect();
    for ((s, y, rho), a) in memory.iter().zip(alpha.iter().rev()) {
        let b = rho * dot(y, &r);
        for k in 0..n {
            r[k] += s[k] * (a - b);
        }
    }
    // remove the first-order volume change
    let pgv = pre.apply(&st.gv);
    let c = dot(&st.gv, &r) / dot(&st.gv, &pgv);
    r.iter().zip(&pgv).map(|(r, p)| -(r - c * p)).collect()
}

fn finish(st: &State, gamma: f64, cone: &Cone, iterations: usize, converged: bool) -> Result<SolverResult> {
    let (mean_curvature, h_spread) = curvature_stats(&st.field)?;
    let angles = boundary_contact_angles(&st.field, cone)?;
    let contact_angle_error = angles.iter().map(|a| (a - gamma).abs()).fold(0.0, f64::max);
    Ok(SolverResult {
        field: st.field.clone(),
        energy: st.energy,
        mean_curvature,
        h_spread,
        contact_angle_error,
        iterations,
        converged,
    })
}

/// Solves with the default initial field (the radius-constant graph of the
/// target volume).
pub fn solve(config: &SolverConfig, cone: &Cone, initial: Option<RadialGraphField>) -> Result<SolverResult> {
    solve_with_history(config, cone, initial).map(|(r, _)| r)
}

/// [`solve`], also returning the per-iteration history.
pub fn solve_with_history(
    config: &SolverConfig,
    cone: &Cone,
    initial: Option<RadialGraphField>,
) -> Result<(SolverResult, Vec<HistoryRow>)> {
    config.validate()?;
    if let Some(c) = cone.as_circular() {
        if classify_configuration(config.gamma, c.half_angle())? == CapCase::TwoCapsC {
            return Err(Error::DegenerateField(format!(
                "gamma = {} < pi/2 - phi: the equilibrium is not a graph wetting the apex",
                config.gamma
            )));
        }
    }
    let grid = PolarGrid::new(cone.domain(), config.n_theta, config.n_s)?;
    let initial = match initial {
        Some(f) => {
            if f.grid() != &grid {
                return Err(Error::InvalidConfig(
                    "initial field grid does not match the configuration".into(),
                ));
            }
            f
        }
        None => {
            let r = (3.0 * config.target_volume / grid.solid_angle()).cbrt();
            RadialGraphField::constant(grid.clone(), r)?
        }
    };
    mesh_radial_graph(&initial, cone)?;
    let scale = (3.0 * config.target_volume / grid.solid_angle()).cbrt();
    let gamma = config.gamma;
    let sc = config.step_control;

    let pre = Preconditioner::new(&grid)?;
    let scale2 = scale * scale;
    let mut st = state(project_volume(initial.rho(), &grid, config.target_volume)?, gamma);
    let mut memory = Pairs::new();
    let mut history = Vec::new();
    let mut iterations = 0;
    let record = |st: &State, it: usize, history: &mut Vec<HistoryRow>| -> Result<()> {
        let (h_mean, h_spread) = curvature_stats(&st.field)?;
        history.push(HistoryRow {
            iteration: it,
            energy: st.energy,
            grad_norm: st.grad_norm,
            h_mean,
            h_spread,
        });
        Ok(())
    };
    record(&st, 0, &mut history)?;
    while st.grad_norm > config.grad_tolerance && iterations < config.max_iterations {
        let mut d = direction(&st, &memory, &pre, scale2);
        let mut slope = dot(&st.pg, &d);
        if !(slope < 0.0) {
            memory.clear();
            d = direction(&st, &memory, &pre, scale2);
            slope = dot(&st.pg, &d);
        }
        let m = drop_measures(&st.field);
        let noise = 64.0 * f64::EPSILON * (m.area + gamma.cos().abs() * m.wetted_area);
        let mut step = 1.0;
        let mut accepted = None;
        for _ in 0..sc.max_backtracks {
            let trial: Vec<f64> = st.field.rho().iter().zip(&d).map(|(r, d)| r + step * d).collect();
            if trial.iter().all(|&r| r > 0.0) {
                let f = project_volume(&trial, &grid, config.target_volume)?;
                let e = capillary_energy(&f, gamma);
                if e <= st.energy + sc.armijo * step * slope {
                    accepted = Some(state(f, gamma));
                    break;
                }
                // below the rounding of the energy the decrease cannot be
                // resolved; require no increase and a smaller gradient
                if e <= st.energy && st.energy - e <= noise {
                    let cand = state(f, gamma);
                    if cand.grad_norm < st.grad_norm {
                        accepted = Some(cand);
                        break;
                    }
                }
            }
            step *= sc.shrink;
        }
        let Some(new) = accepted else {
            if memory.is_empty() {
                break;
            }
            memory.clear();
            continue;
        };
        iterations += 1;
        let min_rho = new.field.rho().iter().copied().fold(f64::INFINITY, f64::min);
        if min_rho < 1e-9 * scale {
            return Err(Error::DegenerateField(format!(
                "radius {min_rho:e} fell below 1e-9 of the drop scale"
            )));
        }
        let s: Vec<f64> = new.field.rho().iter().zip(st.field.rho()).map(|(a, b)| a - b).collect();
        let y: Vec<f64> = new.pg.iter().zip(&st.pg).map(|(a, b)| a - b).collect();
        let sy = dot(&s, &y);
        if sy > 0.0 {
            memory.push_back((s, y, 1.0 / sy));
            if memory.len() > sc.memory {
                memory.pop_front();
            }
        }
        st = new;
        record(&st, iterations, &mut history)?;
    }
    let converged = st.grad_norm <= config.grad_tolerance;
    let result = finish(&st, gamma, cone, iterations, converged)?;
    if converged {
        Ok((result, history))
    } else {
        Err(Error::NonConvergence {
            iterations,
            grad_norm: st.grad_norm,
            best: Box::new(result),
        })
    }
}

/// Equilibrium diagnostics of a solver result.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "camelCase")]
pub struct EquilibriumReport {
    pub mean_curvature: f64,
    pub h_spread: f64,
    /// `h_spread / |H|`.
    pub relative_h_spread: f64,
    pub contact_angle_error: f64,
    pub expected_sign: HSign,
    pub measured_sign: HSign,
    pub sign_agrees: bool,
}

/// Mean curvatures below this, in units of the inverse drop scale, count as
/// zero. The discrete flat interface carries `|H|` of about `2e-3` on a
/// 64x64 grid.
pub const ZERO_H_TOL: f64 = 5e-3;

/// Constancy of `H`, constancy of the contact angle, and agreement of the
/// sign of `H` with the angle.
pub fn verify_equilibrium(result: &SolverResult, cone: &Cone, gamma: f64) -> Result<EquilibriumReport> {
    let phi = cone
        .as_circular()
        .map(|c| c.half_angle())
        .ok_or_else(|| Error::InvalidCone("sign prediction needs a circular cone".into()))?;
    let (h, spread) = curvature_stats(&result.field)?;
    let angles = boundary_contact_angles(&result.field, cone)?;
    let contact_angle_error = angles.iter().map(|a| (a - gamma).abs()).fold(0.0, f64::max);
    let grid = result.field.grid();
    let scale = (3.0 * drop_measures(&result.field).volume / grid.solid_angle()).cbrt();
    let measured_sign = if (h * scale).abs() < ZERO_H_TOL {
        HSign::Zero
    } else if h > 0.0 {
        HSign::Positive
    } else {
        HSign::Negative
    };
    let expected_sign = sign_of_h(gamma, phi)?;
    Ok(EquilibriumReport {
        mean_curvature: h,
        h_spread: spread,
        relative_h_spread: spread / h.abs(),
        contact_angle_error,
        expected_sign,
        measured_sign,
        sign_agrees: expected_sign == measured_sign,
    })
}
