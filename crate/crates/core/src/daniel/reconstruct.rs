use crate::error::{GeomError, Result};
use crate::h2r::{h2_distance, lorentz_cross, lorentz_dot, normalize_h2, space_norm, tangent_part, H2RPoint};
use crate::io::fmt17;
use crate::linalg::{cross3, dot3, mat3_inverse, normalize3, Mat3, Vec3};

use super::data::{Lattice, NodeData, SisterData};
use super::map_indices;

/// A vector of R^{2,1}×R: Minkowski part then height.
pub type Vec21 = [f64; 4];

fn horiz(v: &Vec21) -> Vec3 {
    [v[0], v[1], v[2]]
}

/// `⟨u,v⟩` on R^{2,1}×R.
pub fn product_dot(u: &Vec21, v: &Vec21) -> f64 {
    lorentz_dot(&horiz(u), &horiz(v)) + u[3] * v[3]
}

fn lin(terms: &[(f64, &Vec21)]) -> Vec21 {
    let mut out = [0.0; 4];
    for (c, v) in terms {
        for k in 0..4 {
            out[k] += c * v[k];
        }
    }
    out
}

/// Position and adapted frame `(∂x, ∂y, N)` at one node.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct SisterSample {
    pub point: H2RPoint,
    pub frame: [Vec21; 2],
    pub normal: Vec21,
}

impl SisterSample {
    fn pos(&self) -> Vec21 {
        [self.point.h2[0], self.point.h2[1], self.point.h2[2], self.point.height]
    }

    fn vectors(&self) -> [Vec21; 3] {
        [self.frame[0], self.frame[1], self.normal]
    }

    fn from_parts(pos: &Vec21, v: &[Vec21; 3]) -> Self {
        Self { point: H2RPoint { h2: horiz(pos), height: pos[3] }, frame: [v[0], v[1]], normal: v[2] }
    }

    /// Distance in H²×R between the positions of two samples.
    pub fn distance(&self, other: &SisterSample) -> f64 {
        h2_distance(&self.point.h2, &other.point.h2).hypot(self.point.height - other.point.height)
    }

    /// Gram matrix of `(∂x, ∂y)`.
    pub fn gram(&self) -> [f64; 3] {
        let [a, b] = &self.frame;
        [product_dot(a, a), product_dot(a, b), product_dot(b, b)]
    }
}

/// Start of the reconstruction: the node where the frame is placed, its
/// image point and the rotation about the vertical fixing the frame.
#[derive(Clone, Copy, Debug)]
pub struct Seed {
    pub node: (usize, usize),
    pub point: H2RPoint,
    pub rotation: f64,
}

impl Seed {
    pub fn at(node: (usize, usize)) -> Self {
        Self { node, point: H2RPoint::origin(), rotation: 0.0 }
    }
}

/// Reconstructed sister on the even sublattice of the data lattice.
#[derive(Clone, Debug)]
pub struct SisterGrid {
    pub lattice: Lattice,
    pub samples: Vec<SisterSample>,
    /// Largest distance between the results of the two integration orders.
    pub path_residual: f64,
    /// Largest Gram defect removed by the per-step frame correction.
    pub metric_residual: f64,
    /// Largest deviation of the vertical component of the normal from `ν`.
    pub nu_residual: f64,
    /// Largest deviation of the vertical field's tangent part from `T̃`.
    pub tvec_residual: f64,
}

/// Path residual above which a reconstruction is flagged as incompatible.
pub const INTEGRABILITY_TOL: f64 = 1e-2;

impl SisterGrid {
    pub fn sample(&self, i: usize, j: usize) -> &SisterSample {
        &self.samples[self.lattice.index(i, j)]
    }

    pub fn row(&self, j: usize) -> Vec<SisterSample> {
        (0..self.lattice.nx).map(|i| *self.sample(i, j)).collect()
    }

    pub fn column(&self, i: usize) -> Vec<SisterSample> {
        (0..self.lattice.ny).map(|j| *self.sample(i, j)).collect()
    }

    pub fn to_h2rmesh(&self) -> String {
        let pts: Vec<H2RPoint> = self.samples.iter().map(|s| s.point).collect();
        write_h2rmesh(&pts, &super::grid_faces(self.lattice.nx, self.lattice.ny))
    }

    pub fn is_compatible(&self) -> bool {
        self.path_residual < INTEGRABILITY_TOL
    }

    /// `i,j,x0,x1,x2,height` per sample.
    pub fn to_csv(&self) -> String {
        let mut out = String::from("i,j,x0,x1,x2,height\n");
        for j in 0..self.lattice.ny {
            for i in 0..self.lattice.nx {
                let p = &self.sample(i, j).point;
                out.push_str(&format!(
                    "{i},{j},{},{},{},{}\n",
                    fmt17(p.h2[0]),
                    fmt17(p.h2[1]),
                    fmt17(p.h2[2]),
                    fmt17(p.height)
                ));
            }
        }
        out
    }
}

/// Plain-text mesh of points in H²×R: a `h2rmesh 1` header, `counts nv nf`,
/// then `v x0 x1 x2 height` and `f i j k` lines with 0-based indices.
pub fn write_h2rmesh(points: &[H2RPoint], faces: &[[usize; 3]]) -> String {
    let mut out = format!("h2rmesh 1\ncounts {} {}\n", points.len(), faces.len());
    for p in points {
        out.push_str(&format!("v {} {} {} {}\n", fmt17(p.h2[0]), fmt17(p.h2[1]), fmt17(p.h2[2]), fmt17(p.height)));
    }
    for f in faces {
        out.push_str(&format!("f {} {} {}\n", f[0], f[1], f[2]));
    }
    out
}

pub fn read_h2rmesh(text: &str) -> Result<(Vec<H2RPoint>, Vec<[usize; 3]>)> {
    let err = |line: usize, msg: &str| GeomError::Parse { line, msg: msg.to_string() };
    let mut lines = text.lines().enumerate().filter(|(_, l)| !l.trim().is_empty());
    match lines.next() {
        Some((_, l)) if l.trim() == "h2rmesh 1" => {}
        Some((n, _)) => return Err(err(n + 1, "expected header 'h2rmesh 1'")),
        None => return Err(err(1, "empty input")),
    }
    let (n, counts) = lines.next().ok_or_else(|| err(2, "missing counts"))?;
    let c: Vec<usize> = counts
        .split_whitespace()
        .skip(1)
        .map(|t| t.parse().map_err(|_| err(n + 1, "bad count")))
        .collect::<Result<_>>()?;
    if !counts.starts_with("counts") || c.len() != 2 {
        return Err(err(n + 1, "expected 'counts nv nf'"));
    }
    let mut points = Vec::with_capacity(c[0]);
    let mut faces = Vec::with_capacity(c[1]);
    for (n, l) in lines {
        let mut t = l.split_whitespace();
        match t.next() {
            Some("v") => {
                let v: Vec<f64> = t.map(|x| x.parse().map_err(|_| err(n + 1, "bad number"))).collect::<Result<_>>()?;
                if v.len() != 4 {
                    return Err(err(n + 1, "vertex needs 4 values"));
                }
                points.push(H2RPoint::new([v[0], v[1], v[2]], v[3]).map_err(|e| err(n + 1, &e.to_string()))?);
            }
            Some("f") => {
                let v: Vec<usize> = t.map(|x| x.parse().map_err(|_| err(n + 1, "bad index"))).collect::<Result<_>>()?;
                if v.len() != 3 || v.iter().any(|&k| k >= c[0]) {
                    return Err(err(n + 1, "face needs 3 valid indices"));
                }
                faces.push([v[0], v[1], v[2]]);
            }
            _ => return Err(err(n + 1, "unknown record")),
        }
    }
    if points.len() != c[0] || faces.len() != c[1] {
        return Err(err(0, "record counts do not match header"));
    }
    Ok((points, faces))
}

/// The structure equations along direction `a`: derivatives of position and
/// of `(∂x, ∂y, N)`.
fn rhs(node: &NodeData, a: usize, pos: &Vec21, v: &[Vec21; 3], second: &[[f64; 2]; 2]) -> (Vec21, [Vec21; 3]) {
    let p = [pos[0], pos[1], pos[2], 0.0];
    let fa = horiz(&v[a]);
    let g = &node.christoffel;
    let mut dv = [[0.0; 4]; 3];
    for b in 0..2 {
        let ext = lorentz_dot(&fa, &horiz(&v[b]));
        dv[b] = lin(&[(g[0][a][b], &v[0]), (g[1][a][b], &v[1]), (second[a][b], &v[2]), (ext, &p)]);
    }
    let ext = lorentz_dot(&fa, &horiz(&v[2]));
    dv[2] = lin(&[(-node.shape[0][a], &v[0]), (-node.shape[1][a], &v[1]), (ext, &p)]);
    (v[a], dv)
}

fn advance(pos: &Vec21, v: &[Vec21; 3], k: &(Vec21, [Vec21; 3]), h: f64) -> (Vec21, [Vec21; 3]) {
    let mut out = *v;
    for (o, d) in out.iter_mut().zip(&k.1) {
        *o = lin(&[(1.0, o), (h, d)]);
    }
    (lin(&[(1.0, pos), (h, &k.0)]), out)
}

/// Target Gram matrix of `(∂x, ∂y, N)`.
fn target_gram(node: &NodeData) -> Mat3 {
    let [e, f, g] = node.metric;
    [[e, f, 0.0], [f, g, 0.0], [0.0, 0.0, 1.0]]
}

/// Projects onto the hyperboloid and its tangent space, then applies the
/// first-order symmetric correction of the frame towards the target Gram
/// matrix. Returns the Gram defect before correction.
fn correct(pos: &mut Vec21, v: &mut [Vec21; 3], node: &NodeData) -> f64 {
    let p = normalize_h2(&horiz(pos));
    pos[..3].copy_from_slice(&p);
    for w in v.iter_mut() {
        let t = tangent_part(&p, &horiz(w));
        w[..3].copy_from_slice(&t);
    }
    let target = target_gram(node);
    let mut gram = [[0.0; 3]; 3];
    let mut defect = 0.0f64;
    for a in 0..3 {
        for b in 0..3 {
            gram[a][b] = product_dot(&v[a], &v[b]);
            defect = defect.max((gram[a][b] - target[a][b]).abs());
        }
    }
    if let Some(inv) = mat3_inverse(&gram) {
        let mut c = [[0.0; 3]; 3];
        for a in 0..3 {
            for b in 0..3 {
                let mut s = 0.0;
                for k in 0..3 {
                    s += inv[a][k] * (target[k][b] - gram[k][b]);
                }
                c[a][b] = 0.5 * s + if a == b { 1.0 } else { 0.0 };
            }
        }
        let old = *v;
        for b in 0..3 {
            v[b] = lin(&[(c[0][b], &old[0]), (c[1][b], &old[1]), (c[2][b], &old[2])]);
        }
    }
    defect
}

struct Integrator<'a> {
    data: &'a SisterData,
    second: Vec<[[f64; 2]; 2]>,
}

impl Integrator<'_> {
    fn node(&self, i: usize, j: usize) -> (&NodeData, &[[f64; 2]; 2]) {
        let k = self.data.lattice.index(i, j);
        (&self.data.nodes[k], &self.second[k])
    }

    /// One classical fourth-order step of two lattice spacings in direction
    /// `a` (sign `s`), from node `(i, j)`; the intermediate node supplies the
    /// midpoint data.
    fn step(&self, sample: &SisterSample, (i, j): (usize, usize), a: usize, s: isize) -> (SisterSample, f64) {
        let at = |m: isize| -> (usize, usize) {
            if a == 0 {
                ((i as isize + m * s) as usize, j)
            } else {
                (i, (j as isize + m * s) as usize)
            }
        };
        let h = 2.0 * self.data.lattice.step(a) * s as f64;
        let (n0, s0) = self.node(at(0).0, at(0).1);
        let (n1, s1) = self.node(at(1).0, at(1).1);
        let (n2, s2) = self.node(at(2).0, at(2).1);
        let pos = sample.pos();
        let v = sample.vectors();
        let k1 = rhs(n0, a, &pos, &v, s0);
        let (p2, v2) = advance(&pos, &v, &k1, 0.5 * h);
        let k2 = rhs(n1, a, &p2, &v2, s1);
        let (p3, v3) = advance(&pos, &v, &k2, 0.5 * h);
        let k3 = rhs(n1, a, &p3, &v3, s1);
        let (p4, v4) = advance(&pos, &v, &k3, h);
        let k4 = rhs(n2, a, &p4, &v4, s2);
        let mut np = pos;
        let mut nv = v;
        for k in 0..4 {
            np[k] += h / 6.0 * (k1.0[k] + 2.0 * k2.0[k] + 2.0 * k3.0[k] + k4.0[k]);
            for b in 0..3 {
                nv[b][k] += h / 6.0 * (k1.1[b][k] + 2.0 * k2.1[b][k] + 2.0 * k3.1[b][k] + k4.1[b][k]);
            }
        }
        let defect = correct(&mut np, &mut nv, n2);
        (SisterSample::from_parts(&np, &nv), defect)
    }

    /// Integrates along direction `a` through `start` over the whole line,
    /// returning samples at even offsets indexed by output position.
    fn line(&self, start: &SisterSample, node: (usize, usize), a: usize) -> (Vec<SisterSample>, f64) {
        let lat = &self.data.lattice;
        let n = if a == 0 { lat.nx } else { lat.ny };
        let k0 = if a == 0 { node.0 } else { node.1 };
        let mut out = vec![*start; n.div_ceil(2)];
        let mut defect = 0.0f64;
        for s in [1isize, -1] {
            let mut cur = *start;
            let mut k = k0;
            loop {
                let next = k as isize + 2 * s;
                if next < 0 || next >= n as isize {
                    break;
                }
                let at = if a == 0 { (k, node.1) } else { (node.0, k) };
                let (nxt, d) = self.step(&cur, at, a, s);
                defect = defect.max(d);
                cur = nxt;
                k = next as usize;
                out[k / 2] = cur;
            }
        }
        (out, defect)
    }

    /// Spine along `first`, then every line in the other direction.
    fn sweep(&self, seed: &SisterSample, node: (usize, usize), first: usize) -> (Vec<SisterSample>, f64) {
        let lat = &self.data.lattice;
        let (mx, my) = (lat.nx.div_ceil(2), lat.ny.div_ceil(2));
        let (spine, d0) = self.line(seed, node, first);
        let other = 1 - first;
        let lines = map_indices(spine.len(), |k| {
            let at = if first == 0 { (2 * k, node.1) } else { (node.0, 2 * k) };
            self.line(&spine[k], at, other)
        });
        let mut samples = vec![*seed; mx * my];
        let mut defect = d0;
        for (k, (line, d)) in lines.into_iter().enumerate() {
            defect = defect.max(d);
            for (m, s) in line.into_iter().enumerate() {
                let (i, j) = if first == 0 { (k, m) } else { (m, k) };
                samples[j * mx + i] = s;
            }
        }
        (samples, defect)
    }
}

/// Frame at the seed node reproducing the metric, `ν` and `T̃` there.
pub fn seed_frame(node: &NodeData, seed: &Seed) -> Result<SisterSample> {
    let [e, f, g] = node.metric;
    let det = e * g - f * f;
    if !(e > 0.0 && det > 0.0) {
        return Err(GeomError::Degenerate(format!("degenerate metric at seed node {:?}", seed.node)));
    }
    let (se, sd) = (e.sqrt(), (det / e).sqrt());
    let t = node.tvec;
    let w = normalize3(&[t[0] * se + t[1] * f / se, t[1] * sd, node.nu]);
    let k = (0..3).min_by(|&a, &b| w[a].abs().total_cmp(&w[b].abs())).unwrap_or(0);
    let mut axis = [0.0; 3];
    axis[k] = 1.0;
    let r1 = normalize3(&[axis[0] - w[0] * w[k], axis[1] - w[1] * w[k], axis[2] - w[2] * w[k]]);
    let r2 = cross3(&w, &r1);
    let (c, s) = (seed.rotation.cos(), seed.rotation.sin());
    let q1 = [c * r1[0] + s * r2[0], c * r1[1] + s * r2[1], c * r1[2] + s * r2[2]];
    let q2 = [-s * r1[0] + c * r2[0], -s * r1[1] + c * r2[1], -s * r1[2] + c * r2[2]];
    debug_assert!((dot3(&cross3(&q1, &q2), &w) - 1.0).abs() < 1e-9);

    let p = seed.point.h2;
    let a = {
        let t = tangent_part(&p, &[0.0, 1.0, 0.0]);
        let t = if space_norm(&t) < 1e-8 { tangent_part(&p, &[0.0, 0.0, 1.0]) } else { t };
        let n = space_norm(&t);
        [t[0] / n, t[1] / n, t[2] / n]
    };
    let b = lorentz_cross(&p, &a);
    let b = {
        let n = space_norm(&b);
        [b[0] / n, b[1] / n, b[2] / n]
    };
    let ambient = |k: usize| -> Vec21 {
        [q1[k] * a[0] + q2[k] * b[0], q1[k] * a[1] + q2[k] * b[1], q1[k] * a[2] + q2[k] * b[2], w[k]]
    };
    let (e1, e2, nrm) = (ambient(0), ambient(1), ambient(2));
    let f1 = lin(&[(se, &e1)]);
    let f2 = lin(&[(f / se, &e1), (sd, &e2)]);
    Ok(SisterSample { point: seed.point, frame: [f1, f2], normal: nrm })
}

/// Integrates the structure equations of the sister from `seed`, along a
/// spine in `y` then along rows, and again in the other order for the path
/// residual. The data lattice must have odd dimensions and the seed node
/// even indices; samples are returned on the even sublattice.
pub fn reconstruct_sister(data: &SisterData, seed: &Seed) -> Result<SisterGrid> {
    let lat = data.lattice;
    if lat.nx.is_multiple_of(2) || lat.ny.is_multiple_of(2) {
        return Err(GeomError::InvalidParameter(format!("lattice {}x{} must have odd dimensions", lat.nx, lat.ny)));
    }
    let (i0, j0) = seed.node;
    if i0 >= lat.nx || j0 >= lat.ny || i0 % 2 == 1 || j0 % 2 == 1 {
        return Err(GeomError::InvalidParameter(format!("seed node {:?} is not an even lattice node", seed.node)));
    }
    let start = seed_frame(data.node(i0, j0), seed)?;
    let integ = Integrator { data, second: data.nodes.iter().map(|n| n.second_form()).collect() };
    let (samples, d1) = integ.sweep(&start, seed.node, 1);
    let (alt, d2) = integ.sweep(&start, seed.node, 0);
    let path_residual = samples.iter().zip(&alt).map(|(a, b)| a.distance(b)).fold(0.0, f64::max);

    let out = Lattice {
        x0: lat.x0,
        y0: lat.y0,
        dx: 2.0 * lat.dx,
        dy: 2.0 * lat.dy,
        nx: lat.nx.div_ceil(2),
        ny: lat.ny.div_ceil(2),
    };
    let mut nu_residual = 0.0f64;
    let mut tvec_residual = 0.0f64;
    for j in 0..out.ny {
        for i in 0..out.nx {
            let s = &samples[out.index(i, j)];
            let node = data.node(2 * i, 2 * j);
            nu_residual = nu_residual.max((s.normal[3] - node.nu).abs());
            let t = node.tvec;
            let g = node.metric_matrix();
            for b in 0..2 {
                let want = g[b][0] * t[0] + g[b][1] * t[1];
                tvec_residual = tvec_residual.max((s.frame[b][3] - want).abs());
            }
        }
    }
    Ok(SisterGrid { lattice: out, samples, path_residual, metric_residual: d1.max(d2), nu_residual, tvec_residual })
}

/// Positions of a run of samples on the hyperboloid.
pub fn h2_points(samples: &[SisterSample]) -> Vec<Vec3> {
    samples.iter().map(|s| s.point.h2).collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::daniel::{sister_data, surface_data};
    use crate::h2r::geodesic_curvature_h2;
    use crate::surfaces::{fc_raw, k_neck, t_half, FcSpec};

    fn fc_grid(c: f64, n: usize, seed_point: H2RPoint, rotation: f64) -> SisterGrid {
        let spec = FcSpec::new(1.0, c).unwrap();
        let a = spec.axis_x();
        let lat = Lattice::spanning((a - 0.8, a + 0.8), (0.0, 2.0 * t_half(1.0, c)), n, 2 * n - 1).unwrap();
        let data = surface_data(&spec.params, &|x, y| *fc_raw(&spec, x, y).coords(), &lat).unwrap();
        let sis = sister_data(1.0, &data).unwrap();
        reconstruct_sister(&sis, &Seed { node: ((n - 1) / 2, 0), point: seed_point, rotation }).unwrap()
    }

    #[test]
    fn axis_image_is_a_circle_of_the_neck_curvature() {
        let g = fc_grid(0.5, 33, H2RPoint::origin(), 0.0);
        let axis = g.column((g.lattice.nx - 1) / 2);
        let k = geodesic_curvature_h2(&h2_points(&axis), false).unwrap();
        let want = k_neck(1.0, 0.5);
        assert!(k.iter().all(|v| (v.abs() - want).abs() < 1e-3), "{:?}", &k[..3]);
        assert!(g.nu_residual < 1e-6 && g.tvec_residual < 1e-6);
        assert!(axis[0].distance(axis.last().unwrap()) < 1e-3);
    }

    #[test]
    fn path_residual_is_fourth_order() {
        let r1 = fc_grid(0.5, 17, H2RPoint::origin(), 0.0).path_residual;
        let r2 = fc_grid(0.5, 33, H2RPoint::origin(), 0.0).path_residual;
        assert!(r1 / r2 > 12.0, "{r1} {r2}");
    }

    #[test]
    fn seed_frame_reproduces_data() {
        let spec = FcSpec::new(1.2, 0.3).unwrap();
        let lat = Lattice::spanning((0.3, 1.1), (0.0, 0.5), 5, 5).unwrap();
        let data = surface_data(&spec.params, &|x, y| *fc_raw(&spec, x, y).coords(), &lat).unwrap();
        let sis = sister_data(1.2, &data).unwrap();
        let node = sis.node(2, 2);
        let s =
            seed_frame(node, &Seed { node: (2, 2), point: H2RPoint::polar(0.4, 1.0, -0.3), rotation: 0.9 }).unwrap();
        let g = s.gram();
        for k in 0..3 {
            assert!((g[k] - node.metric[k]).abs() < 1e-12);
        }
        assert!((s.normal[3] - node.nu).abs() < 1e-12);
        assert!(product_dot(&s.normal, &s.frame[0]).abs() < 1e-12);
        let m = node.metric_matrix();
        for b in 0..2 {
            let want = m[b][0] * node.tvec[0] + m[b][1] * node.tvec[1];
            assert!((s.frame[b][3] - want).abs() < 1e-12);
        }
    }

    #[test]
    fn seed_isometry_moves_the_whole_grid() {
        let a = fc_grid(1.0, 9, H2RPoint::origin(), 0.0);
        let b = fc_grid(1.0, 9, H2RPoint::polar(0.7, 1.1, 2.0), 0.4);
        // pairwise distances are preserved
        for (p, q) in [((0, 0), (4, 8)), ((1, 3), (3, 7)), ((2, 0), (2, 5))] {
            let da = a.sample(p.0, p.1).distance(a.sample(q.0, q.1));
            let db = b.sample(p.0, p.1).distance(b.sample(q.0, q.1));
            assert!((da - db).abs() < 1e-9, "{da} {db}");
        }
    }

    #[test]
    fn h2rmesh_round_trip() {
        let g = fc_grid(1.0, 9, H2RPoint::polar(0.3, 0.2, 1.0), 0.0);
        let (pts, faces) = read_h2rmesh(&g.to_h2rmesh()).unwrap();
        assert_eq!(faces.len(), 2 * 4 * 8);
        for (p, s) in pts.iter().zip(&g.samples) {
            assert_eq!(*p, s.point);
        }
        assert!(read_h2rmesh("h2rmesh 1\ncounts 1 0\nv 1 0 0\n").is_err());
    }

    #[test]
    fn rejects_even_lattice() {
        let spec = FcSpec::new(1.0, 0.5).unwrap();
        let lat = Lattice::spanning((0.3, 1.1), (0.0, 0.5), 6, 5).unwrap();
        let data = surface_data(&spec.params, &|x, y| *fc_raw(&spec, x, y).coords(), &lat).unwrap();
        let sis = sister_data(1.0, &data).unwrap();
        assert!(reconstruct_sister(&sis, &Seed::at((0, 0))).is_err());
    }
}
