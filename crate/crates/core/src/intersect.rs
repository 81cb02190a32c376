//! Face-pair self-intersection detection for meshes on S³.

use std::collections::{HashMap, HashSet};

use crate::linalg::{cross3, dist4, dot3, dot4, norm3, normalize4, scale4, sub3, sub4, Vec3, Vec4};
use crate::mesh::TriMesh;

#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct IntersectionReport {
    pub pairs: Vec<(usize, usize)>,
}

impl IntersectionReport {
    pub fn is_none(&self) -> bool {
        self.pairs.is_empty()
    }
}

/// Finds pairs of non-adjacent faces whose radial projections onto S³
/// intersect. Candidates come from a uniform hash over R⁴; each candidate
/// pair is mapped by gnomonic projection to a 3-dimensional chart, where the
/// spherical triangles become flat.
pub fn self_intersection_test(mesh: &TriMesh) -> IntersectionReport {
    let v = &mesh.vertices;
    let mut cell = 0.0f64;
    for f in &mesh.faces {
        for k in 0..3 {
            cell = cell.max(dist4(&v[f[k]], &v[f[(k + 1) % 3]]));
        }
    }
    if cell == 0.0 {
        return IntersectionReport::default();
    }
    let key = |x: f64| (x / cell).floor() as i64;

    let mut grid: HashMap<[i64; 4], Vec<usize>> = HashMap::new();
    for (fi, f) in mesh.faces.iter().enumerate() {
        let mut lo = [i64::MAX; 4];
        let mut hi = [i64::MIN; 4];
        for &i in f {
            for d in 0..4 {
                lo[d] = lo[d].min(key(v[i][d]));
                hi[d] = hi[d].max(key(v[i][d]));
            }
        }
        for a in lo[0]..=hi[0] {
            for b in lo[1]..=hi[1] {
                for c in lo[2]..=hi[2] {
                    for d in lo[3]..=hi[3] {
                        grid.entry([a, b, c, d]).or_default().push(fi);
                    }
                }
            }
        }
    }

    let mut seen = HashSet::new();
    let mut pairs = Vec::new();
    for bucket in grid.values() {
        for (x, &i) in bucket.iter().enumerate() {
            for &j in &bucket[x + 1..] {
                let (i, j) = (i.min(j), i.max(j));
                let (fi, fj) = (&mesh.faces[i], &mesh.faces[j]);
                if fi.iter().any(|a| fj.contains(a)) || !seen.insert((i, j)) {
                    continue;
                }
                let a = [v[fi[0]], v[fi[1]], v[fi[2]]];
                let b = [v[fj[0]], v[fj[1]], v[fj[2]]];
                if spherical_triangles_intersect(&a, &b) {
                    pairs.push((i, j));
                }
            }
        }
    }
    pairs.sort_unstable();
    IntersectionReport { pairs }
}

/// Face-pair intersections of a triangle mesh in R³, skipping faces that
/// share a vertex.
pub fn self_intersection_test_3d(vertices: &[Vec3], faces: &[[usize; 3]]) -> IntersectionReport {
    let mut cell = 0.0f64;
    for f in faces {
        for k in 0..3 {
            cell = cell.max(norm3(&sub3(&vertices[f[k]], &vertices[f[(k + 1) % 3]])));
        }
    }
    if cell == 0.0 {
        return IntersectionReport::default();
    }
    let key = |x: f64| (x / cell).floor() as i64;
    let mut grid: HashMap<[i64; 3], Vec<usize>> = HashMap::new();
    for (fi, f) in faces.iter().enumerate() {
        let mut lo = [i64::MAX; 3];
        let mut hi = [i64::MIN; 3];
        for &i in f {
            for d in 0..3 {
                lo[d] = lo[d].min(key(vertices[i][d]));
                hi[d] = hi[d].max(key(vertices[i][d]));
            }
        }
        for a in lo[0]..=hi[0] {
            for b in lo[1]..=hi[1] {
                for c in lo[2]..=hi[2] {
                    grid.entry([a, b, c]).or_default().push(fi);
                }
            }
        }
    }
    let mut seen = HashSet::new();
    let mut pairs = Vec::new();
    for bucket in grid.values() {
        for (x, &i) in bucket.iter().enumerate() {
            for &j in &bucket[x + 1..] {
                let (i, j) = (i.min(j), i.max(j));
                let (fi, fj) = (&faces[i], &faces[j]);
                if fi.iter().any(|a| fj.contains(a)) || !seen.insert((i, j)) {
                    continue;
                }
                let a = [vertices[fi[0]], vertices[fi[1]], vertices[fi[2]]];
                let b = [vertices[fj[0]], vertices[fj[1]], vertices[fj[2]]];
                if triangles_intersect_3d(&a, &b) {
                    pairs.push((i, j));
                }
            }
        }
    }
    pairs.sort_unstable();
    IntersectionReport { pairs }
}

pub fn triangles_intersect_3d(a: &[Vec3; 3], b: &[Vec3; 3]) -> bool {
    (0..3).any(|k| segment_hits_triangle(&a[k], &a[(k + 1) % 3], b))
        || (0..3).any(|k| segment_hits_triangle(&b[k], &b[(k + 1) % 3], a))
}

fn spherical_triangles_intersect(a: &[Vec4; 3], b: &[Vec4; 3]) -> bool {
    let mut c = [0.0; 4];
    for p in a.iter().chain(b) {
        for d in 0..4 {
            c[d] += p[d];
        }
    }
    let c = normalize4(&c);
    if a.iter().chain(b).any(|p| dot4(p, &c) <= 1e-3) {
        return false;
    }
    let basis = complement_basis(&c);
    let chart = |p: &Vec4| -> Vec3 {
        let s = 1.0 / dot4(p, &c);
        [s * dot4(p, &basis[0]), s * dot4(p, &basis[1]), s * dot4(p, &basis[2])]
    };
    let ta = [chart(&a[0]), chart(&a[1]), chart(&a[2])];
    let tb = [chart(&b[0]), chart(&b[1]), chart(&b[2])];
    triangles_intersect_3d(&ta, &tb)
}

fn complement_basis(c: &Vec4) -> [Vec4; 3] {
    let mut out: Vec<Vec4> = Vec::with_capacity(3);
    for e in 0..4 {
        let mut w = [0.0; 4];
        w[e] = 1.0;
        let mut w = sub4(&w, &scale4(dot4(&w, c), c));
        for u in &out {
            w = sub4(&w, &scale4(dot4(&w, u), u));
        }
        let n = dot4(&w, &w).sqrt();
        if n > 0.3 {
            out.push(scale4(1.0 / n, &w));
        }
        if out.len() == 3 {
            break;
        }
    }
    [out[0], out[1], out[2]]
}

fn segment_hits_triangle(p: &Vec3, q: &Vec3, t: &[Vec3; 3]) -> bool {
    let dir = sub3(q, p);
    let e1 = sub3(&t[1], &t[0]);
    let e2 = sub3(&t[2], &t[0]);
    let h = cross3(&dir, &e2);
    let det = dot3(&e1, &h);
    let scale = dot3(&dir, &dir).sqrt() * dot3(&e1, &e1).sqrt() * dot3(&e2, &e2).sqrt();
    if det.abs() <= 1e-14 * scale {
        return false;
    }
    let inv = 1.0 / det;
    let s = sub3(p, &t[0]);
    let u = inv * dot3(&s, &h);
    if !(0.0..=1.0).contains(&u) {
        return false;
    }
    let qv = cross3(&s, &e1);
    let w = inv * dot3(&dir, &qv);
    if w < 0.0 || u + w > 1.0 {
        return false;
    }
    (0.0..=1.0).contains(&(inv * dot3(&e2, &qv)))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::berger::BergerParams;
    use crate::mesh::{grid_mesh, helicoid_mesh};
    use crate::surfaces::HelicoidSpec;
    use std::f64::consts::PI;

    fn params() -> BergerParams {
        BergerParams::new(4.0, 0.5).unwrap()
    }

    #[test]
    fn embedded_helicoid_has_none() {
        let p = params();
        let spec = HelicoidSpec::new(p, 2.0 * p.tau() * PI / p.kappa(), 1.0, -1.0).unwrap();
        let r = self_intersection_test(&helicoid_mesh(&spec, 96, 24));
        assert!(r.is_none(), "{:?}", &r.pairs[..r.pairs.len().min(5)]);
    }

    #[test]
    fn long_helicoid_intersects() {
        let p = params();
        let spec = HelicoidSpec::new(p, 6.0 * p.tau() * PI / p.kappa(), 1.0, -1.0).unwrap();
        let r = self_intersection_test(&helicoid_mesh(&spec, 96, 48));
        assert!(!r.is_none());
    }

    #[test]
    fn antipodal_patches_are_disjoint() {
        let patch = |pole: Vec4| move |x: f64, y: f64| normalize4(&[pole[0], 0.05 * x, 0.05 * y, pole[3]]);
        let mut a = grid_mesh(patch([1.0, 0.0, 0.0, 0.0]), (-1.0, 1.0), (-1.0, 1.0), 8, 8, false);
        let b = grid_mesh(patch([-1.0, 0.0, 0.0, 0.0]), (-1.0, 1.0), (-1.0, 1.0), 8, 8, false);
        let off = a.vertices.len();
        a.vertices.extend(b.vertices);
        a.boundary.extend(b.boundary);
        a.faces.extend(b.faces.iter().map(|f| [f[0] + off, f[1] + off, f[2] + off]));
        assert!(self_intersection_test(&a).is_none());
    }
}
