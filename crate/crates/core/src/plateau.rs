//! Discrete area in the Berger metric, its gradient, the mean-curvature
//! residual and a fixed-boundary minimizer.

use std::fmt;

use crate::berger::{hopf_direction, hopf_project_raw, BergerParams};
use crate::error::{GeomError, Result};
use crate::geodesics::SegmentData;
use crate::linalg::mat4_transpose;
use crate::linalg::{add4, dot3, dot4, norm4, normalize4, scale4, sub3, sub4, Vec3, Vec4};
use crate::mesh::{repair_needles, TriMesh};
use crate::surfaces::{helicoid_surface_distance, HelicoidSpec};

#[cfg(feature = "parallel")]
use rayon::prelude::*;

/// Area of one triangle with the metric frozen at the normalized
/// barycenter, and optionally its gradient with respect to the corners.
pub fn triangle_area(params: &BergerParams, x: [&Vec4; 3], want_grad: bool) -> (f64, [Vec4; 3]) {
    let zero = [[0.0; 4]; 3];
    let m = scale4(1.0 / 3.0, &add4(&add4(x[0], x[1]), x[2]));
    let nm = norm4(&m);
    let b = scale4(1.0 / nm, &m);
    let u = hopf_direction(&b);
    let s = 4.0 / params.kappa();
    let c = s * (params.eta() - 1.0);
    let e1 = sub4(x[1], x[0]);
    let e2 = sub4(x[2], x[0]);
    let (a1, a2) = (dot4(&e1, &u), dot4(&e2, &u));
    let g11 = s * dot4(&e1, &e1) + c * a1 * a1;
    let g22 = s * dot4(&e2, &e2) + c * a2 * a2;
    let g12 = s * dot4(&e1, &e2) + c * a1 * a2;
    let det = g11 * g22 - g12 * g12;
    if !(det > 0.0) {
        return (0.0, zero);
    }
    let area = 0.5 * det.sqrt();
    if !want_grad {
        return (area, zero);
    }
    let w1 = g22 * a1 - g12 * a2;
    let w2 = g11 * a2 - g12 * a1;
    let mut d1 = [0.0; 4];
    let mut d2 = [0.0; 4];
    let mut du = [0.0; 4];
    for k in 0..4 {
        d1[k] = 2.0 * (s * (g22 * e1[k] - g12 * e2[k]) + c * w1 * u[k]);
        d2[k] = 2.0 * (s * (g11 * e2[k] - g12 * e1[k]) + c * w2 * u[k]);
        du[k] = 2.0 * c * (w1 * e1[k] + w2 * e2[k]);
    }
    // u = V b and Vᵀ = −V
    let db = scale4(-1.0, &hopf_direction(&du));
    let dm = scale4(1.0 / nm, &sub4(&db, &scale4(dot4(&b, &db), &b)));
    let k = 1.0 / (8.0 * area);
    let mut g = [[0.0; 4]; 3];
    for i in 0..4 {
        let share = dm[i] / 3.0;
        g[0][i] = k * (-d1[i] - d2[i] + share);
        g[1][i] = k * (d1[i] + share);
        g[2][i] = k * (d2[i] + share);
    }
    (area, g)
}

fn per_face(params: &BergerParams, mesh: &TriMesh, want_grad: bool) -> Vec<(f64, [Vec4; 3])> {
    let eval = |f: &[usize; 3]| {
        triangle_area(params, [&mesh.vertices[f[0]], &mesh.vertices[f[1]], &mesh.vertices[f[2]]], want_grad)
    };
    #[cfg(feature = "parallel")]
    {
        mesh.faces.par_iter().map(eval).collect()
    }
    #[cfg(not(feature = "parallel"))]
    {
        mesh.faces.iter().map(eval).collect()
    }
}

pub fn discrete_area(params: &BergerParams, mesh: &TriMesh) -> f64 {
    per_face(params, mesh, false).iter().map(|r| r.0).sum()
}

/// Total area, ambient gradient per vertex and lumped vertex masses
/// (a third of the incident areas). Accumulation order is fixed.
#[derive(Clone, Debug)]
pub struct AreaGradient {
    pub area: f64,
    pub grad: Vec<Vec4>,
    pub mass: Vec<f64>,
}

pub fn area_gradient(params: &BergerParams, mesh: &TriMesh) -> AreaGradient {
    let faces = per_face(params, mesh, true);
    let n = mesh.vertices.len();
    let mut grad = vec![[0.0; 4]; n];
    let mut mass = vec![0.0; n];
    let mut area = 0.0;
    for (f, (a, g)) in mesh.faces.iter().zip(&faces) {
        area += a;
        for k in 0..3 {
            grad[f[k]] = add4(&grad[f[k]], &g[k]);
            mass[f[k]] += a / 3.0;
        }
    }
    AreaGradient { area, grad, mass }
}

/// Frame components `dA(E_k)` of the gradient at vertex `i`.
fn frame_covector(params: &BergerParams, p: &Vec4, g: &Vec4) -> Vec3 {
    let e = params.frame_raw(p);
    [dot4(g, &e[0]), dot4(g, &e[1]), dot4(g, &e[2])]
}

/// Unit g-normals per vertex in frame components, from the area-weighted
/// sum of incident face normals.
pub fn vertex_normals(params: &BergerParams, mesh: &TriMesh) -> Vec<Vec3> {
    let mut acc = vec![[0.0; 3]; mesh.vertices.len()];
    for f in &mesh.faces {
        for k in 0..3 {
            let p = &mesh.vertices[f[k]];
            let e1 = params.frame_coords(p, &sub4(&mesh.vertices[f[(k + 1) % 3]], p));
            let e2 = params.frame_coords(p, &sub4(&mesh.vertices[f[(k + 2) % 3]], p));
            let n = crate::linalg::cross3(&e1, &e2);
            acc[f[k]] = crate::linalg::add3(&acc[f[k]], &n);
        }
    }
    acc.iter().map(crate::linalg::normalize3).collect()
}

/// Discrete mean-curvature norm per vertex: the normal component of the
/// area gradient in `g`, over the vertex mass. Pinned vertices get 0.
pub fn mean_curvature_residual(params: &BergerParams, mesh: &TriMesh) -> Vec<f64> {
    let ag = area_gradient(params, mesh);
    residual_from(params, mesh, &ag)
}

/// Full g-norm of the gradient restricted to `T_pS³` over the vertex mass,
/// including the tangential part that only moves vertices along the surface.
pub fn full_gradient_residual(params: &BergerParams, mesh: &TriMesh) -> Vec<f64> {
    let ag = area_gradient(params, mesh);
    (0..mesh.vertices.len())
        .map(|i| {
            if mesh.is_pinned(i) || ag.mass[i] <= 0.0 {
                0.0
            } else {
                let w = frame_covector(params, &mesh.vertices[i], &ag.grad[i]);
                dot3(&w, &w).sqrt() / ag.mass[i]
            }
        })
        .collect()
}

fn residual_from(params: &BergerParams, mesh: &TriMesh, ag: &AreaGradient) -> Vec<f64> {
    let normals = vertex_normals(params, mesh);
    (0..mesh.vertices.len())
        .map(|i| {
            if mesh.is_pinned(i) || ag.mass[i] <= 0.0 {
                0.0
            } else {
                let w = frame_covector(params, &mesh.vertices[i], &ag.grad[i]);
                dot3(&w, &normals[i]).abs() / ag.mass[i]
            }
        })
        .collect()
}

pub fn max_residual(r: &[f64]) -> f64 {
    r.iter().copied().fold(0.0, f64::max)
}

#[derive(Clone, Copy, Debug)]
pub struct SolveConfig {
    pub tol: f64,
    pub max_iter: usize,
    /// Stop when the relative area decrease stays below this for
    /// `stall_window` consecutive steps.
    pub stall_rel: f64,
    pub stall_window: usize,
    pub memory: usize,
    pub max_aspect: f64,
    pub check_graph: bool,
}

impl Default for SolveConfig {
    fn default() -> Self {
        Self {
            tol: 1e-3,
            max_iter: 100_000,
            stall_rel: 1e-12,
            stall_window: 200,
            memory: 12,
            max_aspect: 1e3,
            check_graph: false,
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum StopReason {
    Converged,
    IterationCap,
    Stalled,
    LineSearchFailed,
}

impl StopReason {
    pub fn as_str(&self) -> &'static str {
        match self {
            StopReason::Converged => "converged",
            StopReason::IterationCap => "iteration_cap",
            StopReason::Stalled => "stalled",
            StopReason::LineSearchFailed => "line_search_failed",
        }
    }
}

#[derive(Clone, Copy, Debug)]
pub struct SolveReport {
    pub iterations: usize,
    pub area: f64,
    pub max_residual: f64,
    pub converged: bool,
    pub graphical: Option<bool>,
    pub stop: StopReason,
    pub flips: usize,
}

impl fmt::Display for SolveReport {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let graph = match self.graphical {
            Some(true) => "true",
            Some(false) => "false",
            None => "na",
        };
        write!(
            f,
            "iterations={} area={} max_residual={} converged={} graphical={} stop={} flips={}",
            self.iterations,
            crate::io::fmt17(self.area),
            crate::io::fmt17(self.max_residual),
            self.converged,
            graph,
            self.stop.as_str(),
            self.flips
        )
    }
}

/// Free vertices and their mass-weighted frame coordinates.
/// Free vertices move along their g-normals only; tangential motion just
/// reparametrizes the surface and lets triangles collapse.
struct Layout {
    free: Vec<usize>,
    scale: Vec<f64>,
    normals: Vec<Vec3>,
}

impl Layout {
    fn new(params: &BergerParams, mesh: &TriMesh, mass: &[f64]) -> Self {
        let free: Vec<usize> = (0..mesh.vertices.len()).filter(|&i| !mesh.is_pinned(i)).collect();
        let mean = free.iter().map(|&i| mass[i]).sum::<f64>() / free.len().max(1) as f64;
        let scale = free.iter().map(|&i| mass[i].max(1e-3 * mean).sqrt()).collect();
        let mut l = Self { free, scale, normals: Vec::new() };
        l.update_normals(params, mesh);
        l
    }

    fn update_normals(&mut self, params: &BergerParams, mesh: &TriMesh) {
        let all = vertex_normals(params, mesh);
        self.normals = self.free.iter().map(|&i| all[i]).collect();
    }

    fn project(&self, v: &mut [f64]) {
        for (k, n) in self.normals.iter().enumerate() {
            let c = v[3 * k] * n[0] + v[3 * k + 1] * n[1] + v[3 * k + 2] * n[2];
            for j in 0..3 {
                v[3 * k + j] = c * n[j];
            }
        }
    }

    /// Normal part of the gradient in the coordinates
    /// `z = √m · (frame components)`.
    fn gradient(&self, params: &BergerParams, mesh: &TriMesh, ag: &AreaGradient) -> Vec<f64> {
        let mut out = Vec::with_capacity(3 * self.free.len());
        for (k, &i) in self.free.iter().enumerate() {
            let w = frame_covector(params, &mesh.vertices[i], &ag.grad[i]);
            out.extend(w.iter().map(|v| v / self.scale[k]));
        }
        self.project(&mut out);
        out
    }

    fn retract(&self, params: &BergerParams, base: &[Vec4], out: &mut [Vec4], step: &[f64], t: f64) {
        for (k, &i) in self.free.iter().enumerate() {
            let e = params.frame_raw(&base[i]);
            let mut p = base[i];
            for j in 0..3 {
                let c = t * step[3 * k + j] / self.scale[k];
                p = add4(&p, &scale4(c, &e[j]));
            }
            out[i] = normalize4(&p);
        }
    }
}

/// Shortest incident edge per vertex.
fn local_edge(mesh: &TriMesh) -> Vec<f64> {
    let mut out = vec![f64::INFINITY; mesh.vertices.len()];
    for f in &mesh.faces {
        for k in 0..3 {
            let (a, b) = (f[k], f[(k + 1) % 3]);
            let l = crate::linalg::dist4(&mesh.vertices[a], &mesh.vertices[b]);
            out[a] = out[a].min(l);
            out[b] = out[b].min(l);
        }
    }
    out
}

/// Largest step keeping every vertex within a fraction of its shortest edge.
fn step_cap(params: &BergerParams, mesh: &TriMesh, layout: &Layout, d: &[f64]) -> f64 {
    let edges = local_edge(mesh);
    let mut cap = f64::INFINITY;
    for (k, &i) in layout.free.iter().enumerate() {
        let e = params.frame_raw(&mesh.vertices[i]);
        let mut v = [0.0; 4];
        for j in 0..3 {
            v = add4(&v, &scale4(d[3 * k + j] / layout.scale[k], &e[j]));
        }
        let len = norm4(&v);
        if len > 0.0 {
            cap = cap.min(0.25 * edges[i] / len);
        }
    }
    cap
}

fn dot(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| x * y).sum()
}

/// Minimizes area with pinned boundary by limited-memory BFGS in the left-
/// invariant frame coordinates, preconditioned by vertex masses, with
/// Armijo backtracking and radial retraction.
pub fn minimize_area(params: &BergerParams, mesh: &TriMesh, cfg: &SolveConfig) -> (TriMesh, SolveReport) {
    let mut mesh = mesh.clone();
    let flips = repair_needles(&mut mesh, cfg.max_aspect);
    let mut ag = area_gradient(params, &mesh);
    let mut layout = Layout::new(params, &mesh, &ag.mass);
    let mut g = layout.gradient(params, &mesh, &ag);
    let mut res = max_residual(&residual_from(params, &mesh, &ag));
    let mut hist: Vec<(Vec<f64>, Vec<f64>, f64)> = Vec::new();
    let mut trial = mesh.vertices.clone();
    let mut step_len = 1.0;
    let mut stall = 0;
    let mut stop = StopReason::IterationCap;
    let mut iter = 0;
    let refresh = 500;
    while iter < cfg.max_iter {
        if res < cfg.tol {
            stop = StopReason::Converged;
            break;
        }
        iter += 1;
        // two-loop recursion
        let mut q = g.clone();
        let mut alphas = Vec::with_capacity(hist.len());
        for (s, y, rho) in hist.iter().rev() {
            let a = rho * dot(s, &q);
            for (qi, yi) in q.iter_mut().zip(y) {
                *qi -= a * yi;
            }
            alphas.push(a);
        }
        let gamma = hist.last().map_or(step_len, |(s, y, _)| dot(s, y) / dot(y, y));
        for v in q.iter_mut() {
            *v *= gamma;
        }
        for ((s, y, rho), a) in hist.iter().zip(alphas.iter().rev()) {
            let b = rho * dot(y, &q);
            for (qi, si) in q.iter_mut().zip(s) {
                *qi += (a - b) * si;
            }
        }
        let mut d: Vec<f64> = q.iter().map(|v| -v).collect();
        layout.project(&mut d);
        let mut slope = dot(&g, &d);
        if !(slope < 0.0) {
            hist.clear();
            d = g.iter().map(|v| -v * step_len).collect();
            slope = dot(&g, &d);
        }
        // backtracking
        let mut t = step_cap(params, &mesh, &layout, &d).min(1.0);
        let mut accepted = None;
        for _ in 0..40 {
            layout.retract(params, &mesh.vertices, &mut trial, &d, t);
            std::mem::swap(&mut mesh.vertices, &mut trial);
            let a_new = discrete_area(params, &mesh);
            std::mem::swap(&mut mesh.vertices, &mut trial);
            if a_new <= ag.area + 1e-4 * t * slope {
                accepted = Some(a_new);
                break;
            }
            t *= 0.5;
        }
        let Some(a_new) = accepted else {
            if hist.is_empty() {
                stop = StopReason::LineSearchFailed;
                break;
            }
            hist.clear();
            continue;
        };
        let old_area = ag.area;
        std::mem::swap(&mut mesh.vertices, &mut trial);
        ag = area_gradient(params, &mesh);
        res = max_residual(&residual_from(params, &mesh, &ag));
        if iter % refresh == 0 {
            layout = Layout::new(params, &mesh, &ag.mass);
            hist.clear();
            g = layout.gradient(params, &mesh, &ag);
            continue;
        }
        layout.update_normals(params, &mesh);
        let g_new = layout.gradient(params, &mesh, &ag);
        let s: Vec<f64> = d.iter().map(|v| v * t).collect();
        let y: Vec<f64> = g_new.iter().zip(&g).map(|(a, b)| a - b).collect();
        let sy = dot(&s, &y);
        if sy > 1e-300 {
            if hist.len() == cfg.memory {
                hist.remove(0);
            }
            hist.push((s, y, 1.0 / sy));
        }
        step_len = t;
        g = g_new;
        let rel = (old_area - a_new) / old_area.max(1e-300);
        if rel < cfg.stall_rel {
            stall += 1;
            if stall >= cfg.stall_window {
                stop = StopReason::Stalled;
                break;
            }
        } else {
            stall = 0;
        }
    }
    if res < cfg.tol {
        stop = StopReason::Converged;
    }
    let graphical = cfg.check_graph.then(|| graphicality(params, &mesh).graphical);
    let report = SolveReport {
        iterations: iter,
        area: ag.area,
        max_residual: res,
        converged: stop == StopReason::Converged,
        graphical,
        stop,
        flips,
    };
    (mesh, report)
}

#[derive(Clone, Copy, Debug)]
pub struct GraphReport {
    pub graphical: bool,
    pub positive: usize,
    pub negative: usize,
    /// Faces with an edge on a vertical boundary curve, which project to
    /// segments.
    pub vertical_skipped: usize,
}

fn curve_is_vertical(params: &BergerParams, c: &crate::geodesics::GreatCircle) -> bool {
    let a = hopf_project_raw(params, &c.p);
    let b = hopf_project_raw(params, &c.q);
    let d = sub3(&a, &b);
    dot3(&d, &d).sqrt() < 1e-9
}

/// Injectivity of the Hopf projection on faces, judged by a consistent
/// orientation of all projected triangles.
pub fn graphicality(params: &BergerParams, mesh: &TriMesh) -> GraphReport {
    let vertical: Vec<bool> = mesh.curves.iter().map(|c| curve_is_vertical(params, c)).collect();
    let on_vertical = |i: usize| mesh.boundary[i].is_some_and(|t| vertical[t.curve]);
    let (mut pos, mut neg, mut skip) = (0, 0, 0);
    for f in &mesh.faces {
        if f.iter().filter(|&&i| on_vertical(i)).count() >= 2 {
            skip += 1;
            continue;
        }
        let p = f.map(|i| hopf_project_raw(params, &mesh.vertices[i]));
        let n = crate::linalg::cross3(&sub3(&p[1], &p[0]), &sub3(&p[2], &p[0]));
        let o = dot3(&n, &p[0]);
        if o > 0.0 {
            pos += 1;
        } else {
            neg += 1;
        }
    }
    GraphReport { graphical: pos == 0 || neg == 0, positive: pos, negative: neg, vertical_skipped: skip }
}

/// Vertex distance below which an annulus counts as the helicoid.
pub const HELICOIDAL_TOL: f64 = 1e-2;

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Branch {
    Helicoidal,
    NonHelicoidal,
}

#[derive(Clone, Copy, Debug)]
pub struct BranchReport {
    pub branch: Branch,
    pub ell: f64,
    pub phi: f64,
    /// Largest chordal distance from a vertex to the fitted helicoid.
    pub distance: f64,
}

/// Compares an annulus bounded by the pair with segment data `seg` against
/// helicoids near the one spanned by the pair, fitting `(ℓ, φ)` by least
/// squares over a vertex subsample.
pub fn classify_annulus(params: &BergerParams, mesh: &TriMesh, seg: &SegmentData) -> Result<BranchReport> {
    let to_normal = mat4_transpose(seg.normalizing_isometry(params).matrix());
    let local = mesh.transformed(&to_normal);
    let stride = (local.vertices.len() / 200).max(1);
    let sample: Vec<&Vec4> = local.vertices.iter().step_by(stride).collect();
    let max_ell = params.vertical_length();
    let mut best: Option<(f64, HelicoidSpec)> = None;
    for a in -4..=4 {
        for b in -4..=4 {
            let ell = seg.ell * (1.0 + 0.025 * a as f64);
            if !(0.0..max_ell).contains(&ell) || (seg.ell == 0.0 && a != 0) {
                continue;
            }
            let spec = HelicoidSpec::new(*params, ell, seg.phi + 0.025 * b as f64, seg.sign)?;
            let ss: f64 = sample.iter().map(|p| helicoid_surface_distance(&spec, p, (0.0, 1.0)).powi(2)).sum();
            if best.as_ref().is_none_or(|(v, _)| ss < *v) {
                best = Some((ss, spec));
            }
        }
    }
    let (_, spec) = best.ok_or_else(|| GeomError::Degenerate("no admissible helicoid".into()))?;
    let distance = local.vertices.iter().map(|p| helicoid_surface_distance(&spec, p, (0.0, 1.0))).fold(0.0, f64::max);
    let branch = if distance < HELICOIDAL_TOL { Branch::Helicoidal } else { Branch::NonHelicoidal };
    Ok(BranchReport { branch, ell: spec.ell, phi: spec.phi, distance })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::geodesics::GreatCircle;
    use crate::mesh::{cap_mesh, grid_mesh, helicoid_mesh, umbrella_mesh};
    use crate::sampling::{random_point, random_tangent, rng};
    use crate::surfaces::{FcSpec, HelicoidSpec};
    use std::f64::consts::PI;

    fn h1() -> BergerParams {
        BergerParams::from_mean_curvature(1.0).unwrap()
    }

    #[test]
    fn degenerate_triangle_has_zero_area() {
        let p = h1();
        let a = [1.0, 0.0, 0.0, 0.0];
        assert_eq!(triangle_area(&p, [&a, &a, &[0.0, 1.0, 0.0, 0.0]], true).0, 0.0);
    }

    #[test]
    fn round_scaling() {
        let p = BergerParams::new(2.0, 2f64.sqrt() / 2.0).unwrap();
        assert!(p.is_round());
        let a = normalize4(&[1.0, 0.01, 0.0, 0.0]);
        let b = normalize4(&[1.0, 0.0, 0.01, 0.0]);
        let c = [1.0, 0.0, 0.0, 0.0];
        let (e1, e2) = (sub4(&a, &c), sub4(&b, &c));
        let eu = 0.5 * (dot4(&e1, &e1) * dot4(&e2, &e2) - dot4(&e1, &e2).powi(2)).sqrt();
        let area = triangle_area(&p, [&c, &a, &b], false).0;
        assert!((area / eu - 2.0).abs() < 1e-12);
    }

    #[test]
    fn gradient_matches_finite_differences() {
        let p = BergerParams::new(3.0, 1.3).unwrap();
        let spec = HelicoidSpec::new(p, 1.1, 0.7, 1.0).unwrap();
        let mut m = helicoid_mesh(&spec, 12, 6);
        let mut r = rng(11);
        for i in 0..m.vertices.len() {
            let t = random_tangent(&mut r, &m.vertex(i));
            m.vertices[i] = normalize4(&add4(&m.vertices[i], &scale4(0.01, t.vec())));
        }
        let ag = area_gradient(&p, &m);
        for _ in 0..10 {
            let dirs: Vec<Vec4> = (0..m.vertices.len()).map(|i| *random_tangent(&mut r, &m.vertex(i)).vec()).collect();
            let h = 1e-6;
            let shifted = |s: f64| {
                let mut mm = m.clone();
                for (v, d) in mm.vertices.iter_mut().zip(&dirs) {
                    *v = add4(v, &scale4(s, d));
                }
                discrete_area(&p, &mm)
            };
            let fd = (shifted(h) - shifted(-h)) / (2.0 * h);
            let an: f64 = ag.grad.iter().zip(&dirs).map(|(g, d)| dot4(g, d)).sum();
            assert!(((fd - an) / an.abs().max(1e-12)).abs() < 1e-6, "{fd} vs {an}");
        }
    }

    #[test]
    fn isometry_invariance() {
        let p = h1();
        let m = helicoid_mesh(&HelicoidSpec::new(p, 0.8, 1.0, 1.0).unwrap(), 10, 5);
        let g = random_point(&mut rng(3));
        let l = crate::isometry::left_translation_matrix(g.coords());
        let a0 = discrete_area(&p, &m);
        let a1 = discrete_area(&p, &m.transformed(&l));
        assert!(((a0 - a1) / a0).abs() < 1e-12);
    }

    #[test]
    fn helicoid_and_umbrella_residuals_small() {
        let p = h1();
        let spec = FcSpec::new(1.0, 1.0).unwrap().as_helicoid(1.0).unwrap();
        let r = max_residual(&mean_curvature_residual(&p, &helicoid_mesh(&spec, 128, 64)));
        assert!(r < 1e-3, "helicoid residual {r}");
        let r = max_residual(&mean_curvature_residual(&p, &umbrella_mesh(128, 64)));
        assert!(r < 1e-3, "umbrella residual {r}");
        let round = BergerParams::round();
        let cap = cap_mesh([0.0, 1.0, 0.0, 0.0], GreatCircle::new([0.0, 0.0, 1.0, 0.0], [0.0, 0.0, 0.0, 1.0]), 64, 32);
        let r = max_residual(&mean_curvature_residual(&round, &cap));
        assert!(r < 1e-3, "great sphere residual {r}");
    }

    #[test]
    fn solver_recovers_helicoid() {
        let p = h1();
        let spec = FcSpec::new(1.0, 1.0).unwrap().as_helicoid(1.0).unwrap();
        let exact = helicoid_mesh(&spec, 32, 12);
        let mut noisy = exact.clone();
        let mut r = rng(5);
        for i in 0..noisy.vertices.len() {
            if !noisy.is_pinned(i) {
                let t = random_tangent(&mut r, &noisy.vertex(i));
                noisy.vertices[i] = normalize4(&add4(&noisy.vertices[i], &scale4(1e-2, t.vec())));
            }
        }
        let a_noisy = discrete_area(&p, &noisy);
        let (out, rep) = minimize_area(&p, &noisy, &SolveConfig::default());
        assert!(rep.converged, "{rep}");
        assert!(rep.area <= a_noisy);
        for i in 0..out.vertices.len() {
            if exact.is_pinned(i) {
                assert_eq!(out.vertices[i], exact.vertices[i]);
            }
            let d = crate::surfaces::helicoid_surface_distance(&spec, &out.vertices[i], (0.0, 1.0));
            assert!(d < 1e-2, "vertex {i} is {d} off the helicoid");
        }
    }

    #[test]
    fn report_line() {
        let rep = SolveReport {
            iterations: 3,
            area: 1.5,
            max_residual: 1e-4,
            converged: true,
            graphical: None,
            stop: StopReason::Converged,
            flips: 0,
        };
        let s = rep.to_string();
        assert!(!s.contains('\n'));
        assert!(s.starts_with("iterations=3 area=1.5000000000000000e0"));
    }

    #[test]
    fn flat_grid_is_graphical() {
        let p = h1();
        let m = grid_mesh(|x, y| normalize4(&[1.0, 0.0, x, y]), (0.0, 0.3), (0.0, 0.3), 5, 5, false);
        assert!(graphicality(&p, &m).graphical);
        let _ = PI;
    }

    #[test]
    fn branch_classification() {
        use crate::geodesics::{connecting_vertical_segment, HorizontalGeodesic};
        use crate::isometry::check_isometry;
        use crate::mesh::helicoid_mesh;
        let p = BergerParams::new(3.0, 0.8).unwrap();
        let spec = HelicoidSpec::new(p, 0.7, 1.1, -1.0).unwrap();
        let base = helicoid_mesh(&spec, 48, 12);
        // move the whole configuration by a left translation
        let g = normalize4(&[0.6, -0.3, 0.5, 0.55]);
        let iso = check_isometry(&p, &crate::isometry::left_translation_matrix(&g)).unwrap();
        let mesh = base.transformed(iso.matrix());
        let h = |y: f64| {
            let q = *crate::surfaces::helicoid_point(&spec, 0.0, y).unwrap().coords();
            let q1 = *crate::surfaces::helicoid_point(&spec, 1e-3, y).unwrap().coords();
            let c = p.frame_coords(&q, &sub4(&q1, &q));
            HorizontalGeodesic::new(p, crate::berger::S3Point::normalized(iso.apply_raw(&q)), c[1].atan2(c[0]), 1.0)
        };
        let seg = connecting_vertical_segment(&p, &h(0.0), &h(1.0)).unwrap();
        let r = classify_annulus(&p, &mesh, &seg).unwrap();
        assert_eq!(r.branch, Branch::Helicoidal, "{r:?}");
        let mut bent = mesh.clone();
        let normals = vertex_normals(&p, &bent);
        for (k, n) in normals.iter().enumerate() {
            if bent.is_pinned(k) {
                continue;
            }
            let v = bent.vertices[k];
            let d = p.from_frame_coords(&v, n);
            bent.vertices[k] = normalize4(&add4(&v, &scale4(0.05, &d)));
        }
        let r = classify_annulus(&p, &bent, &seg).unwrap();
        assert_eq!(r.branch, Branch::NonHelicoidal, "{r:?}");
    }
}
