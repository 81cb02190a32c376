//! Triangle meshes on S³ with boundary vertices pinned to great circles.

use std::collections::HashMap;
use std::f64::consts::PI;
use std::fmt::Write as _;

use crate::berger::{hopf_project_raw, BergerParams, S3Point};
use crate::error::{GeomError, Result};
use crate::geodesics::GreatCircle;
use crate::io::fmt17;
use crate::linalg::{add4, dist4, dot4, norm4, normalize4, scale4, sub4, Vec4};
use crate::polygon::{Edge, GeodesicPolygon};
use crate::surfaces::{helicoid_raw, HelicoidSpec};

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Topology {
    Disk,
    Annulus,
    Other,
}

impl Topology {
    fn name(&self) -> &'static str {
        match self {
            Topology::Disk => "disk",
            Topology::Annulus => "annulus",
            Topology::Other => "other",
        }
    }

    fn parse(s: &str) -> Option<Self> {
        match s {
            "disk" => Some(Topology::Disk),
            "annulus" => Some(Topology::Annulus),
            "other" => Some(Topology::Other),
            _ => None,
        }
    }
}

/// A pinned vertex: it sits at angle `param` on boundary curve `curve`.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct BoundaryTag {
    pub curve: usize,
    pub param: f64,
}

/// Row-major `(i, j)` layout of a structured mesh: vertex `j * nx + i`.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct GridInfo {
    pub nx: usize,
    pub ny: usize,
    pub periodic_x: bool,
}

#[derive(Clone, Debug)]
pub struct TriMesh {
    pub vertices: Vec<Vec4>,
    pub faces: Vec<[usize; 3]>,
    pub boundary: Vec<Option<BoundaryTag>>,
    pub curves: Vec<GreatCircle>,
    pub topology: Topology,
    pub grid: Option<GridInfo>,
}

pub const BOUNDARY_TOL: f64 = 1e-8;

impl TriMesh {
    pub fn vertex(&self, i: usize) -> S3Point {
        S3Point::normalized(self.vertices[i])
    }

    pub fn is_pinned(&self, i: usize) -> bool {
        self.boundary[i].is_some()
    }

    /// Checks unit vertices, index ranges and that pinned vertices lie on
    /// their curves.
    pub fn validate(&self) -> Result<()> {
        if self.boundary.len() != self.vertices.len() {
            return Err(GeomError::Degenerate("boundary table length differs from vertex count".into()));
        }
        for (i, v) in self.vertices.iter().enumerate() {
            let n = dot4(v, v);
            if (n - 1.0).abs() > 1e-9 {
                return Err(GeomError::Degenerate(format!("vertex {i} not unit (|v|^2 = {n})")));
            }
        }
        for (k, f) in self.faces.iter().enumerate() {
            if f.iter().any(|&i| i >= self.vertices.len()) || f[0] == f[1] || f[1] == f[2] || f[0] == f[2] {
                return Err(GeomError::Degenerate(format!("face {k} has bad indices {f:?}")));
            }
        }
        for (i, tag) in self.boundary.iter().enumerate() {
            if let Some(t) = tag {
                let c = self
                    .curves
                    .get(t.curve)
                    .ok_or_else(|| GeomError::Degenerate(format!("vertex {i} refers to missing curve {}", t.curve)))?;
                let d = dist4(&c.eval(t.param), &self.vertices[i]);
                if d > BOUNDARY_TOL {
                    return Err(GeomError::Degenerate(format!("vertex {i} is {d:e} off its curve")));
                }
            }
        }
        Ok(())
    }

    /// Directed edges with a single incident face, as `(from, to)`.
    pub fn boundary_edges(&self) -> Vec<(usize, usize)> {
        let mut count: HashMap<(usize, usize), i32> = HashMap::new();
        for f in &self.faces {
            for k in 0..3 {
                let (a, b) = (f[k], f[(k + 1) % 3]);
                *count.entry((a.min(b), a.max(b))).or_default() += 1;
            }
        }
        let mut out = Vec::new();
        for f in &self.faces {
            for k in 0..3 {
                let (a, b) = (f[k], f[(k + 1) % 3]);
                if count[&(a.min(b), a.max(b))] == 1 {
                    out.push((a, b));
                }
            }
        }
        out
    }

    /// Boundary edges chained into closed vertex loops.
    pub fn boundary_loops(&self) -> Vec<Vec<usize>> {
        let edges = self.boundary_edges();
        let mut next: HashMap<usize, usize> = edges.iter().copied().collect();
        let mut loops = Vec::new();
        let mut starts: Vec<usize> = edges.iter().map(|e| e.0).collect();
        starts.sort_unstable();
        for s in starts {
            if !next.contains_key(&s) {
                continue;
            }
            let mut lp = vec![s];
            let mut cur = next.remove(&s).unwrap();
            while cur != s {
                lp.push(cur);
                match next.remove(&cur) {
                    Some(n) => cur = n,
                    None => break,
                }
            }
            loops.push(lp);
        }
        loops
    }

    /// Euler characteristic `V − E + F`.
    pub fn euler_characteristic(&self) -> i64 {
        let mut edges = std::collections::HashSet::new();
        for f in &self.faces {
            for k in 0..3 {
                let (a, b) = (f[k], f[(k + 1) % 3]);
                edges.insert((a.min(b), a.max(b)));
            }
        }
        self.vertices.len() as i64 - edges.len() as i64 + self.faces.len() as i64
    }

    /// Applies a linear map to all vertices and curves.
    pub fn transformed(&self, m: &crate::linalg::Mat4) -> TriMesh {
        let mut out = self.clone();
        for v in &mut out.vertices {
            *v = crate::linalg::mat4_vec(m, v);
        }
        for (i, c) in out.curves.iter_mut().enumerate() {
            let nc = c.transformed(m);
            // keep parameters valid: map every tag through the new frame
            for (v, tag) in out.vertices.iter().zip(out.boundary.iter_mut()) {
                if let Some(t) = tag {
                    if t.curve == i {
                        t.param = nc.param_of(v);
                    }
                }
            }
            *c = nc;
        }
        out
    }
}

/// Structured mesh over `[x0,x1] × [y0,y1]` with `nx × ny` vertices (or `nx`
/// distinct columns when periodic in x).
pub fn grid_mesh(
    f: impl Fn(f64, f64) -> Vec4,
    (x0, x1): (f64, f64),
    (y0, y1): (f64, f64),
    nx: usize,
    ny: usize,
    periodic_x: bool,
) -> TriMesh {
    let dx = if periodic_x { (x1 - x0) / nx as f64 } else { (x1 - x0) / (nx - 1) as f64 };
    let dy = (y1 - y0) / (ny - 1) as f64;
    let mut vertices = Vec::with_capacity(nx * ny);
    for j in 0..ny {
        for i in 0..nx {
            vertices.push(normalize4(&f(x0 + i as f64 * dx, y0 + j as f64 * dy)));
        }
    }
    let cols = if periodic_x { nx } else { nx - 1 };
    let mut faces = Vec::with_capacity(2 * cols * (ny - 1));
    for j in 0..ny - 1 {
        for i in 0..cols {
            let i1 = (i + 1) % nx;
            let (a, b, c, d) = (j * nx + i, j * nx + i1, (j + 1) * nx + i1, (j + 1) * nx + i);
            faces.push([a, b, c]);
            faces.push([a, c, d]);
        }
    }
    TriMesh {
        boundary: vec![None; vertices.len()],
        vertices,
        faces,
        curves: Vec::new(),
        topology: if periodic_x { Topology::Annulus } else { Topology::Disk },
        grid: Some(GridInfo { nx, ny, periodic_x }),
    }
}

/// The circle of a helicoid row `y`, with angle `√κx/2`.
fn helicoid_row_circle(spec: &HelicoidSpec, y: f64) -> GreatCircle {
    let x90 = PI / spec.params.kappa().sqrt();
    GreatCircle::new(*helicoid_raw(spec, 0.0, y).coords(), *helicoid_raw(spec, x90, y).coords())
}

/// One period of the helicoid annulus, `x ∈ [0, 4π/√κ)`, `y ∈ [0, 1]`, with
/// the rows `y = 0, 1` pinned to curves 0 and 1.
pub fn helicoid_mesh(spec: &HelicoidSpec, nx: usize, ny: usize) -> TriMesh {
    let period = spec.params.horizontal_length();
    let mut m = grid_mesh(|x, y| *helicoid_raw(spec, x, y).coords(), (0.0, period), (0.0, 1.0), nx, ny, true);
    m.curves = vec![helicoid_row_circle(spec, 0.0), helicoid_row_circle(spec, 1.0)];
    for (row, curve) in [(0, 0), (ny - 1, 1)] {
        for i in 0..nx {
            let v = row * nx + i;
            let param = m.curves[curve].param_of(&m.vertices[v]);
            m.boundary[v] = Some(BoundaryTag { curve, param });
        }
    }
    m
}

/// Hemisphere of the great 2-sphere through `pole` and the great circle
/// `rim`, as a polar grid with `n_theta` points per ring and `n_r` rings.
pub fn cap_mesh(pole: Vec4, rim: GreatCircle, n_theta: usize, n_r: usize) -> TriMesh {
    let mut vertices = vec![pole];
    for r in 1..=n_r {
        let rho = PI / 2.0 * r as f64 / n_r as f64;
        for k in 0..n_theta {
            let t = 2.0 * PI * k as f64 / n_theta as f64;
            vertices.push(normalize4(&add4(&scale4(rho.cos(), &pole), &scale4(rho.sin(), &rim.eval(t)))));
        }
    }
    let ring = |r: usize, k: usize| 1 + (r - 1) * n_theta + k % n_theta;
    let mut faces = Vec::new();
    for k in 0..n_theta {
        faces.push([0, ring(1, k), ring(1, k + 1)]);
    }
    for r in 1..n_r {
        for k in 0..n_theta {
            let (a, b, c, d) = (ring(r, k), ring(r + 1, k), ring(r + 1, k + 1), ring(r, k + 1));
            faces.push([a, b, c]);
            faces.push([a, c, d]);
        }
    }
    let mut boundary = vec![None; vertices.len()];
    for k in 0..n_theta {
        let v = ring(n_r, k);
        boundary[v] = Some(BoundaryTag { curve: 0, param: rim.param_of(&vertices[v]) });
    }
    TriMesh { vertices, faces, boundary, curves: vec![rim], topology: Topology::Disk, grid: None }
}

/// The horizontal umbrella bounded by the horizontal geodesic through
/// `(1,0)` with field `E1`: the hemisphere `{b = 0, d ≥ 0}`.
pub fn umbrella_mesh(n_theta: usize, n_r: usize) -> TriMesh {
    cap_mesh([0.0, 0.0, 0.0, 1.0], GreatCircle::new([1.0, 0.0, 0.0, 0.0], [0.0, 0.0, 1.0, 0.0]), n_theta, n_r)
}

/// Transfinite (Coons) interpolation of `Γ_λ` over the unit square, with
/// sides `γ1` (bottom), `γ4` (right), `γ3` (top) and `γ2` (left). Curves are
/// stored in the order `γ1, γ2, γ3, γ4`.
pub fn coons_disk(poly: &GeodesicPolygon, n: usize) -> TriMesh {
    let side = |e: Edge, s: f64| {
        let (a, b) = poly.domain(e);
        *poly.eval(e, a + s * (b - a)).coords()
    };
    let bottom = |u| side(Edge::Gamma1, u);
    let right = |v| side(Edge::Gamma4, v);
    let top = |u| side(Edge::Gamma3, u);
    let left = |v| side(Edge::Gamma2, v);
    let (c00, c10, c11, c01) = (bottom(0.0), bottom(1.0), top(1.0), top(0.0));
    let f = |u: f64, v: f64| {
        let mut p = [0.0; 4];
        for k in 0..4 {
            p[k] = (1.0 - v) * bottom(u)[k] + v * top(u)[k] + (1.0 - u) * left(v)[k] + u * right(v)[k]
                - ((1.0 - u) * (1.0 - v) * c00[k] + u * (1.0 - v) * c10[k] + u * v * c11[k] + (1.0 - u) * v * c01[k]);
        }
        p
    };
    let mut m = grid_mesh(f, (0.0, 1.0), (0.0, 1.0), n, n, false);
    m.curves = [Edge::Gamma1, Edge::Gamma2, Edge::Gamma3, Edge::Gamma4].iter().map(|&e| poly.circle(e).0).collect();
    let tag = |m: &mut TriMesh, v: usize, curve: usize| {
        let param = m.curves[curve].param_of(&m.vertices[v]);
        m.boundary[v] = Some(BoundaryTag { curve, param });
    };
    for i in 0..n {
        tag(&mut m, i, 0);
        tag(&mut m, (n - 1) * n + i, 2);
    }
    for j in 1..n - 1 {
        tag(&mut m, j * n, 1);
        tag(&mut m, j * n + n - 1, 3);
    }
    // exact boundary positions
    for v in 0..m.vertices.len() {
        if let Some(t) = m.boundary[v] {
            m.vertices[v] = m.curves[t.curve].eval(t.param);
        }
    }
    m
}

/// Longest edge squared over twice the area, in R⁴ chords.
pub fn aspect_ratio(m: &TriMesh, f: &[usize; 3]) -> f64 {
    let [a, b, c] = f.map(|i| m.vertices[i]);
    let (e1, e2) = (sub4(&b, &a), sub4(&c, &a));
    let e3 = sub4(&c, &b);
    let g = dot4(&e1, &e1) * dot4(&e2, &e2) - dot4(&e1, &e2).powi(2);
    let area2 = g.max(0.0).sqrt();
    let longest = dot4(&e1, &e1).max(dot4(&e2, &e2)).max(dot4(&e3, &e3));
    if area2 == 0.0 {
        f64::INFINITY
    } else {
        longest / area2
    }
}

/// Flips the longest interior edge of needle triangles (aspect above
/// `max_aspect`) when that lowers the worst aspect of the pair. Returns the
/// number of flips.
pub fn repair_needles(m: &mut TriMesh, max_aspect: f64) -> usize {
    let mut flips = 0;
    for _ in 0..m.faces.len() {
        let mut edge_faces: HashMap<(usize, usize), Vec<usize>> = HashMap::new();
        for (k, f) in m.faces.iter().enumerate() {
            for e in 0..3 {
                let (a, b) = (f[e], f[(e + 1) % 3]);
                edge_faces.entry((a.min(b), a.max(b))).or_default().push(k);
            }
        }
        let mut changed = false;
        for k in 0..m.faces.len() {
            let f = m.faces[k];
            if aspect_ratio(m, &f) <= max_aspect {
                continue;
            }
            let e = (0..3)
                .max_by(|&x, &y| {
                    let lx = dist4(&m.vertices[f[x]], &m.vertices[f[(x + 1) % 3]]);
                    let ly = dist4(&m.vertices[f[y]], &m.vertices[f[(y + 1) % 3]]);
                    lx.total_cmp(&ly)
                })
                .unwrap();
            let (a, b, c) = (f[e], f[(e + 1) % 3], f[(e + 2) % 3]);
            let Some(adj) = edge_faces.get(&(a.min(b), a.max(b))) else { continue };
            if adj.len() != 2 {
                continue;
            }
            let other = if adj[0] == k { adj[1] } else { adj[0] };
            let g = m.faces[other];
            let d = *g.iter().find(|&&v| v != a && v != b).unwrap();
            let (n1, n2) = ([c, a, d], [c, d, b]);
            let before = aspect_ratio(m, &f).max(aspect_ratio(m, &g));
            let after = aspect_ratio(m, &n1).max(aspect_ratio(m, &n2));
            if after < before {
                m.faces[k] = n1;
                m.faces[other] = n2;
                flips += 1;
                changed = true;
                break;
            }
        }
        if !changed {
            break;
        }
    }
    if flips > 0 {
        m.grid = None;
    }
    flips
}

/// Plain-text `.s3mesh` serialization.
pub fn write_s3mesh(m: &TriMesh) -> String {
    let nb = m.boundary.iter().filter(|b| b.is_some()).count();
    let mut out = String::new();
    let _ = writeln!(out, "s3mesh 1");
    let _ = writeln!(out, "topology {}", m.topology.name());
    if let Some(g) = m.grid {
        let _ = writeln!(out, "grid {} {} {}", g.nx, g.ny, u8::from(g.periodic_x));
    }
    let _ = writeln!(out, "counts {} {} {} {}", m.vertices.len(), m.faces.len(), nb, m.curves.len());
    for c in &m.curves {
        let vals: Vec<String> = c.p.iter().chain(c.q.iter()).map(|v| fmt17(*v)).collect();
        let _ = writeln!(out, "c {}", vals.join(" "));
    }
    for v in &m.vertices {
        let vals: Vec<String> = v.iter().map(|x| fmt17(*x)).collect();
        let _ = writeln!(out, "v {}", vals.join(" "));
    }
    for f in &m.faces {
        let _ = writeln!(out, "f {} {} {}", f[0], f[1], f[2]);
    }
    for (i, b) in m.boundary.iter().enumerate() {
        if let Some(t) = b {
            let _ = writeln!(out, "b {} {} {}", i, t.curve, fmt17(t.param));
        }
    }
    out
}

fn parse_err(line: usize, msg: impl Into<String>) -> GeomError {
    GeomError::Parse { line, msg: msg.into() }
}

fn nums<T: std::str::FromStr>(it: std::str::SplitWhitespace<'_>, n: usize, line: usize) -> Result<Vec<T>> {
    let v: Vec<T> =
        it.map(|s| s.parse::<T>().map_err(|_| parse_err(line, format!("bad number {s:?}")))).collect::<Result<_>>()?;
    if v.len() != n {
        return Err(parse_err(line, format!("expected {n} fields, found {}", v.len())));
    }
    Ok(v)
}

pub fn read_s3mesh(text: &str) -> Result<TriMesh> {
    let mut m = TriMesh {
        vertices: Vec::new(),
        faces: Vec::new(),
        boundary: Vec::new(),
        curves: Vec::new(),
        topology: Topology::Other,
        grid: None,
    };
    let mut counts: Option<Vec<usize>> = None;
    let mut tags = Vec::new();
    for (k, raw) in text.lines().enumerate() {
        let ln = k + 1;
        let line = raw.trim();
        if line.is_empty() || line.starts_with('#') {
            continue;
        }
        let mut it = line.split_whitespace();
        let key = it.next().unwrap();
        match key {
            "s3mesh" => {}
            "topology" => {
                let t = it.next().ok_or_else(|| parse_err(ln, "missing topology"))?;
                m.topology = Topology::parse(t).ok_or_else(|| parse_err(ln, format!("unknown topology {t:?}")))?;
            }
            "grid" => {
                let g: Vec<usize> = nums(it, 3, ln)?;
                m.grid = Some(GridInfo { nx: g[0], ny: g[1], periodic_x: g[2] != 0 });
            }
            "counts" => counts = Some(nums(it, 4, ln)?),
            "c" => {
                let v: Vec<f64> = nums(it, 8, ln)?;
                let c = GreatCircle::from_orthonormal([v[0], v[1], v[2], v[3]], [v[4], v[5], v[6], v[7]], 1e-9)
                    .ok_or_else(|| parse_err(ln, "curve frame is not orthonormal"))?;
                m.curves.push(c);
            }
            "v" => {
                let v: Vec<f64> = nums(it, 4, ln)?;
                let p = [v[0], v[1], v[2], v[3]];
                if ((norm4(&p)) - 1.0).abs() > 1e-9 {
                    return Err(parse_err(ln, "vertex not on the unit sphere"));
                }
                m.vertices.push(normalize4(&p));
            }
            "f" => {
                let v: Vec<usize> = nums(it, 3, ln)?;
                m.faces.push([v[0], v[1], v[2]]);
            }
            "b" => {
                let parts: Vec<&str> = it.collect();
                if parts.len() != 3 {
                    return Err(parse_err(ln, "boundary line needs vertex, curve, param"));
                }
                let vid: usize = parts[0].parse().map_err(|_| parse_err(ln, "bad vertex id"))?;
                let cid: usize = parts[1].parse().map_err(|_| parse_err(ln, "bad curve id"))?;
                let param: f64 = parts[2].parse().map_err(|_| parse_err(ln, "bad parameter"))?;
                tags.push((vid, BoundaryTag { curve: cid, param }));
            }
            other => return Err(parse_err(ln, format!("unknown record {other:?}"))),
        }
    }
    let counts = counts.ok_or_else(|| parse_err(0, "missing counts line"))?;
    let got = [m.vertices.len(), m.faces.len(), tags.len(), m.curves.len()];
    if counts != got {
        return Err(parse_err(0, format!("counts {counts:?} do not match contents {got:?}")));
    }
    m.boundary = vec![None; m.vertices.len()];
    for (vid, t) in tags {
        if vid >= m.vertices.len() {
            return Err(parse_err(0, format!("boundary vertex {vid} out of range")));
        }
        m.boundary[vid] = Some(t);
    }
    m.validate()?;
    Ok(m)
}

/// Which R³ image to write to OBJ.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Projection {
    Hopf,
    /// From the pole `(-1, 0)`.
    Stereographic,
}

pub fn project(v: &Vec4, params: &BergerParams, proj: Projection) -> crate::linalg::Vec3 {
    match proj {
        Projection::Hopf => hopf_project_raw(params, v),
        Projection::Stereographic => {
            let s = 1.0 / (1.0 + v[0]).max(1e-12);
            [v[1] * s, v[2] * s, v[3] * s]
        }
    }
}

/// OBJ of an R³ projection, for viewing only.
pub fn write_obj(m: &TriMesh, params: &BergerParams, proj: Projection) -> String {
    let mut out = String::new();
    let _ = writeln!(
        out,
        "# {} projection, {} vertices",
        if proj == Projection::Hopf { "hopf" } else { "stereographic" },
        m.vertices.len()
    );
    for v in &m.vertices {
        let p = project(v, params, proj);
        let _ = writeln!(out, "v {} {} {}", fmt17(p[0]), fmt17(p[1]), fmt17(p[2]));
    }
    for f in &m.faces {
        let _ = writeln!(out, "f {} {} {}", f[0] + 1, f[1] + 1, f[2] + 1);
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::polygon::build_polygon;

    fn spec() -> HelicoidSpec {
        let p = BergerParams::from_mean_curvature(1.0).unwrap();
        HelicoidSpec::new(p, 1.0, 2.0, -1.0).unwrap()
    }

    #[test]
    fn helicoid_mesh_topology() {
        let m = helicoid_mesh(&spec(), 16, 5);
        m.validate().unwrap();
        assert_eq!(m.euler_characteristic(), 0);
        let loops = m.boundary_loops();
        assert_eq!(loops.len(), 2);
        assert!(loops.iter().all(|l| l.len() == 16));
    }

    #[test]
    fn coons_disk_boundary() {
        let p = BergerParams::from_mean_curvature(1.0).unwrap();
        let poly = build_polygon(&p, PI / (4.0 * 3f64.sqrt())).unwrap();
        let m = coons_disk(&poly, 9);
        m.validate().unwrap();
        assert_eq!(m.euler_characteristic(), 1);
        let loops = m.boundary_loops();
        assert_eq!(loops.len(), 1);
        assert_eq!(loops[0].len(), 32);
        assert_eq!(m.boundary.iter().filter(|b| b.is_some()).count(), 32);
    }

    #[test]
    fn umbrella_is_disk() {
        let m = umbrella_mesh(12, 4);
        m.validate().unwrap();
        assert_eq!(m.euler_characteristic(), 1);
        assert!(m.vertices.iter().all(|v| v[1].abs() < 1e-15 && v[3] >= 0.0));
    }

    #[test]
    fn s3mesh_round_trip() {
        let m = helicoid_mesh(&spec(), 8, 3);
        let text = write_s3mesh(&m);
        let back = read_s3mesh(&text).unwrap();
        assert_eq!(back.vertices, m.vertices);
        assert_eq!(back.faces, m.faces);
        assert_eq!(back.boundary, m.boundary);
        assert_eq!(back.grid, m.grid);
        assert_eq!(back.topology, Topology::Annulus);
        assert_eq!(write_s3mesh(&back), text);
    }

    #[test]
    fn s3mesh_rejects_bad_input() {
        let m = helicoid_mesh(&spec(), 8, 3);
        let text = write_s3mesh(&m);
        assert!(matches!(read_s3mesh(&text.replace("counts 24", "counts 25")), Err(GeomError::Parse { .. })));
        assert!(read_s3mesh("s3mesh 1\nv 1 1 0 0\n").is_err());
        assert!(read_s3mesh("bogus\n").is_err());
    }

    #[test]
    fn obj_counts() {
        let m = umbrella_mesh(6, 2);
        let p = BergerParams::new(3.0, 1.0).unwrap();
        let obj = write_obj(&m, &p, Projection::Hopf);
        assert_eq!(obj.lines().filter(|l| l.starts_with("v ")).count(), m.vertices.len());
        assert_eq!(obj.lines().filter(|l| l.starts_with("f ")).count(), m.faces.len());
    }

    #[test]
    fn needle_flip() {
        let a = [1.0, 0.0, 0.0, 0.0];
        let b = normalize4(&[1.0, 1e-3, 0.0, 0.0]);
        let c = normalize4(&add4(&normalize4(&add4(&a, &b)), &[0.0, 0.0, 1e-9, 0.0]));
        let d = normalize4(&[1.0, 5e-4, -1e-3, 0.0]);
        let mut m = TriMesh {
            vertices: vec![a, b, c, d],
            faces: vec![[0, 1, 2], [1, 0, 3]],
            boundary: vec![None; 4],
            curves: vec![],
            topology: Topology::Disk,
            grid: None,
        };
        assert!(aspect_ratio(&m, &m.faces[0]) > 1e3);
        assert_eq!(repair_needles(&mut m, 1e3), 1);
        assert!(m.faces.iter().all(|f| aspect_ratio(&m, f) < 1e3));
    }
}
