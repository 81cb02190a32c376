use crate::berger::BergerParams;
use crate::connection::{connection_table, covariant_frame, ConnectionTable};
use crate::error::{GeomError, Result};
use crate::linalg::{cross3, dot3, normalize3, Vec3, Vec4};
use crate::mesh::TriMesh;

use super::map_indices;

/// Regular parameter lattice; node `(i, j)` sits at `(x0 + i dx, y0 + j dy)`
/// with flat index `j nx + i`.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct Lattice {
    pub x0: f64,
    pub y0: f64,
    pub dx: f64,
    pub dy: f64,
    pub nx: usize,
    pub ny: usize,
}

impl Lattice {
    /// `nx × ny` nodes spanning `[x0,x1] × [y0,y1]`.
    pub fn spanning((x0, x1): (f64, f64), (y0, y1): (f64, f64), nx: usize, ny: usize) -> Result<Self> {
        if nx < 3 || ny < 3 {
            return Err(GeomError::InvalidParameter(format!("lattice {nx}x{ny} is too small")));
        }
        Ok(Self { x0, y0, dx: (x1 - x0) / (nx - 1) as f64, dy: (y1 - y0) / (ny - 1) as f64, nx, ny })
    }

    pub fn len(&self) -> usize {
        self.nx * self.ny
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }

    pub fn index(&self, i: usize, j: usize) -> usize {
        j * self.nx + i
    }

    pub fn coords(&self, i: usize, j: usize) -> (f64, f64) {
        (self.x0 + i as f64 * self.dx, self.y0 + j as f64 * self.dy)
    }

    pub fn step(&self, dir: usize) -> f64 {
        if dir == 0 {
            self.dx
        } else {
            self.dy
        }
    }
}

/// First-order data at one node. Matrices are in the coordinate basis
/// `(∂x, ∂y)`; `shape[k][i]` is the `∂k`-component of `S(∂i)` and
/// `christoffel[k][i][j]` is `Γ^k_ij`.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct NodeData {
    pub metric: [f64; 3],
    pub shape: [[f64; 2]; 2],
    pub nu: f64,
    pub tvec: [f64; 2],
    pub christoffel: [[[f64; 2]; 2]; 2],
}

impl NodeData {
    pub fn metric_matrix(&self) -> [[f64; 2]; 2] {
        let [e, f, g] = self.metric;
        [[e, f], [f, g]]
    }

    pub fn metric_inverse(&self) -> [[f64; 2]; 2] {
        let [e, f, g] = self.metric;
        crate::linalg::sym2_inverse(e, f, g)
    }

    pub fn area_element(&self) -> f64 {
        let [e, f, g] = self.metric;
        (e * g - f * f).sqrt()
    }

    /// Rotation by `+π/2` in the oriented tangent plane.
    pub fn rotation(&self) -> [[f64; 2]; 2] {
        let [e, f, g] = self.metric;
        let w = self.area_element();
        [[-f / w, -g / w], [e / w, f / w]]
    }

    /// Second fundamental form `I·S`.
    pub fn second_form(&self) -> [[f64; 2]; 2] {
        mat2_mul(&self.metric_matrix(), &self.shape)
    }

    pub fn mean_curvature(&self) -> f64 {
        0.5 * (self.shape[0][0] + self.shape[1][1])
    }

    /// `|T|² + ν²`, which is 1 for the decomposition of a unit field.
    pub fn vertical_norm2(&self) -> f64 {
        let t = self.tvec;
        let g = self.metric_matrix();
        let tt = t[0] * (g[0][0] * t[0] + g[0][1] * t[1]) + t[1] * (g[1][0] * t[0] + g[1][1] * t[1]);
        tt + self.nu * self.nu
    }
}

pub(crate) fn mat2_mul(a: &[[f64; 2]; 2], b: &[[f64; 2]; 2]) -> [[f64; 2]; 2] {
    let mut c = [[0.0; 2]; 2];
    for i in 0..2 {
        for j in 0..2 {
            c[i][j] = a[i][0] * b[0][j] + a[i][1] * b[1][j];
        }
    }
    c
}

pub(crate) fn mat2_vec(a: &[[f64; 2]; 2], v: &[f64; 2]) -> [f64; 2] {
    [a[0][0] * v[0] + a[0][1] * v[1], a[1][0] * v[0] + a[1][1] * v[1]]
}

/// Data of a minimal immersion into a Berger sphere.
#[derive(Clone, Debug)]
pub struct SurfaceData {
    pub params: BergerParams,
    pub lattice: Lattice,
    pub nodes: Vec<NodeData>,
}

impl SurfaceData {
    pub fn node(&self, i: usize, j: usize) -> &NodeData {
        &self.nodes[self.lattice.index(i, j)]
    }

    /// Largest deviation of `|T|² + ν²` from 1.
    pub fn vertical_defect(&self) -> f64 {
        self.nodes.iter().map(|n| (n.vertical_norm2() - 1.0).abs()).fold(0.0, f64::max)
    }
}

/// Central-difference step for analytic parametrizations.
pub const ANALYTIC_STEP: f64 = 1e-3;

fn d4<T: Copy>(h: f64, f: impl Fn(f64) -> T, add: impl Fn(&[(f64, T)]) -> T) -> T {
    let s = 1.0 / (12.0 * h);
    add(&[(-s, f(2.0 * h)), (8.0 * s, f(h)), (-8.0 * s, f(-h)), (s, f(-2.0 * h))])
}

fn comb4(terms: &[(f64, Vec4)]) -> Vec4 {
    let mut out = [0.0; 4];
    for (c, v) in terms {
        for k in 0..4 {
            out[k] += c * v[k];
        }
    }
    out
}

fn comb3(terms: &[(f64, Vec3)]) -> Vec3 {
    let mut out = [0.0; 3];
    for (c, v) in terms {
        for k in 0..3 {
            out[k] += c * v[k];
        }
    }
    out
}

fn shift(dir: usize, x: f64, y: f64, t: f64) -> (f64, f64) {
    if dir == 0 {
        (x + t, y)
    } else {
        (x, y + t)
    }
}

/// Extracts the first-order data of an analytic parametrization, with all
/// derivatives taken by fourth-order central differences.
pub fn surface_data(
    params: &BergerParams,
    surface: &(impl Fn(f64, f64) -> Vec4 + Sync),
    lattice: &Lattice,
) -> Result<SurfaceData> {
    let table = connection_table(params);
    let h = ANALYTIC_STEP;
    let tangent = |dir: usize, x: f64, y: f64| -> Vec4 {
        d4(
            h,
            |t| {
                let (u, v) = shift(dir, x, y, t);
                surface(u, v)
            },
            comb4,
        )
    };
    let tangent_coords =
        |dir: usize, x: f64, y: f64| -> Vec3 { params.frame_coords(&surface(x, y), &tangent(dir, x, y)) };
    let normal = |x: f64, y: f64| -> Vec3 { normalize3(&cross3(&tangent_coords(0, x, y), &tangent_coords(1, x, y))) };
    let nodes = map_indices(lattice.len(), |k| {
        let (i, j) = (k % lattice.nx, k / lattice.nx);
        let (x, y) = lattice.coords(i, j);
        let u = [tangent_coords(0, x, y), tangent_coords(1, x, y)];
        let mut dq = [[[0.0; 3]; 2]; 2];
        let mut dn = [[0.0; 3]; 2];
        for a in 0..2 {
            for b in 0..2 {
                dq[a][b] = d4(
                    h,
                    |t| {
                        let (s, r) = shift(a, x, y, t);
                        tangent_coords(b, s, r)
                    },
                    comb3,
                );
            }
            dn[a] = d4(
                h,
                |t| {
                    let (s, r) = shift(a, x, y, t);
                    normal(s, r)
                },
                comb3,
            );
        }
        assemble(&table, u, dq, dn).map_err(|e| at_node(e, i, j, x, y))
    });
    let nodes = nodes.into_iter().collect::<Result<Vec<_>>>()?;
    Ok(SurfaceData { params: *params, lattice: *lattice, nodes })
}

/// `B(q, v)`: frame coordinates of `v` at `q`, extended bilinearly off the
/// sphere. For a curve `p(t)` on S³ with tangent field `v(t)`,
/// `d/dt B(p, v) = B(p', v) + B(p, v')`.
fn frame_bilinear(params: &BergerParams, q: &Vec4, v: &Vec4) -> Vec3 {
    let (a, b, c, d) = (q[0], q[1], q[2], q[3]);
    let s = 2.0 / params.kappa().sqrt();
    let t = 4.0 * params.tau() / params.kappa();
    let dot = |w: [f64; 4]| v[0] * w[0] + v[1] * w[1] + v[2] * w[2] + v[3] * w[3];
    [s * dot([-c, -d, a, b]), s * dot([-d, c, -b, a]), t * dot([-b, a, d, -c])]
}

/// Second-order lattice stencil for the first (`order = 1`) or second
/// derivative at position `k` of a line of `n` values.
fn stencil(order: usize, k: usize, n: usize, h: f64) -> Vec<(usize, f64)> {
    match order {
        1 if k == 0 => vec![(0, -1.5 / h), (1, 2.0 / h), (2, -0.5 / h)],
        1 if k == n - 1 => vec![(n - 1, 1.5 / h), (n - 2, -2.0 / h), (n - 3, 0.5 / h)],
        1 => vec![(k + 1, 0.5 / h), (k - 1, -0.5 / h)],
        _ => {
            let h2 = h * h;
            if k == 0 {
                vec![(0, 2.0 / h2), (1, -5.0 / h2), (2, 4.0 / h2), (3, -1.0 / h2)]
            } else if k == n - 1 {
                vec![(n - 1, 2.0 / h2), (n - 2, -5.0 / h2), (n - 3, 4.0 / h2), (n - 4, -1.0 / h2)]
            } else {
                vec![(k + 1, 1.0 / h2), (k, -2.0 / h2), (k - 1, 1.0 / h2)]
            }
        }
    }
}

/// Extracts the data of a structured mesh whose vertex `j nx + i` sits at
/// lattice node `(i, j)`, from second-order lattice stencils for the first
/// and second derivatives of the vertex positions.
pub fn surface_data_mesh(params: &BergerParams, mesh: &TriMesh, lattice: &Lattice) -> Result<SurfaceData> {
    let grid = mesh.grid.ok_or_else(|| GeomError::InvalidParameter("mesh has no grid structure".into()))?;
    if grid.nx != lattice.nx || grid.ny != lattice.ny || grid.periodic_x || lattice.nx < 4 || lattice.ny < 4 {
        return Err(GeomError::InvalidParameter(format!(
            "grid {}x{} does not match lattice {}x{}",
            grid.nx, grid.ny, lattice.nx, lattice.ny
        )));
    }
    let table = connection_table(params);
    let (nx, ny) = (lattice.nx, lattice.ny);
    let pos = |i: usize, j: usize| &mesh.vertices[lattice.index(i, j)];
    // ∂x^ox ∂y^oy of the positions
    let deriv = |i: usize, j: usize, ox: usize, oy: usize| -> Vec4 {
        let sx = if ox == 0 { vec![(i, 1.0)] } else { stencil(ox, i, nx, lattice.dx) };
        let sy = if oy == 0 { vec![(j, 1.0)] } else { stencil(oy, j, ny, lattice.dy) };
        let mut out = [0.0; 4];
        for &(a, ca) in &sx {
            for &(b, cb) in &sy {
                let p = pos(a, b);
                for k in 0..4 {
                    out[k] += ca * cb * p[k];
                }
            }
        }
        out
    };
    let nodes = map_indices(lattice.len(), |k| {
        let (i, j) = (k % nx, k / nx);
        let p = pos(i, j);
        let f = [deriv(i, j, 1, 0), deriv(i, j, 0, 1)];
        let fxy = deriv(i, j, 1, 1);
        let second = [[deriv(i, j, 2, 0), fxy], [fxy, deriv(i, j, 0, 2)]];
        let u = [frame_bilinear(params, p, &f[0]), frame_bilinear(params, p, &f[1])];
        let mut dq = [[[0.0; 3]; 2]; 2];
        for a in 0..2 {
            for b in 0..2 {
                dq[a][b] = crate::linalg::add3(
                    &frame_bilinear(params, p, &second[a][b]),
                    &frame_bilinear(params, &f[a], &f[b]),
                );
            }
        }
        let w = cross3(&u[0], &u[1]);
        let wn = dot3(&w, &w).sqrt();
        let n = [w[0] / wn, w[1] / wn, w[2] / wn];
        let mut dn = [[0.0; 3]; 2];
        for a in 0..2 {
            let dw = crate::linalg::add3(&cross3(&dq[a][0], &u[1]), &cross3(&u[0], &dq[a][1]));
            let r = dot3(&n, &dw);
            dn[a] = [(dw[0] - r * n[0]) / wn, (dw[1] - r * n[1]) / wn, (dw[2] - r * n[2]) / wn];
        }
        let (x, y) = lattice.coords(i, j);
        assemble(&table, u, dq, dn).map_err(|e| at_node(e, i, j, x, y))
    });
    let nodes = nodes.into_iter().collect::<Result<Vec<_>>>()?;
    Ok(SurfaceData { params: *params, lattice: *lattice, nodes })
}

fn at_node(e: GeomError, i: usize, j: usize, x: f64, y: f64) -> GeomError {
    match e {
        GeomError::Degenerate(msg) => GeomError::Degenerate(format!("{msg} at node ({i}, {j}) = ({x}, {y})")),
        other => other,
    }
}

/// Node data from tangent frame coordinates `u`, their partial derivatives
/// `dq[a][b] = ∂_a u_b` and the derivatives `dn[a]` of the unit normal.
fn assemble(table: &ConnectionTable, u: [Vec3; 2], dq: [[Vec3; 2]; 2], dn: [Vec3; 2]) -> Result<NodeData> {
    let metric = [dot3(&u[0], &u[0]), dot3(&u[0], &u[1]), dot3(&u[1], &u[1])];
    let det = metric[0] * metric[2] - metric[1] * metric[1];
    if !(det > 1e-12 * (metric[0] * metric[2]).max(1e-300)) {
        return Err(GeomError::Degenerate(format!("degenerate metric EG-F^2 = {det:e}")));
    }
    let inv = crate::linalg::sym2_inverse(metric[0], metric[1], metric[2]);
    let n = normalize3(&cross3(&u[0], &u[1]));

    let mut christoffel = [[[0.0; 2]; 2]; 2];
    for a in 0..2 {
        for b in 0..2 {
            let cov = crate::linalg::add3(&dq[a][b], &covariant_frame(table, &u[a], &u[b]));
            let low = [dot3(&cov, &u[0]), dot3(&cov, &u[1])];
            for k in 0..2 {
                christoffel[k][a][b] = inv[k][0] * low[0] + inv[k][1] * low[1];
            }
        }
    }
    for k in 0..2 {
        let s = 0.5 * (christoffel[k][0][1] + christoffel[k][1][0]);
        christoffel[k][0][1] = s;
        christoffel[k][1][0] = s;
    }

    // II_ab = -g(∇_a N, f_b)
    let mut second = [[0.0; 2]; 2];
    for a in 0..2 {
        let cov = crate::linalg::add3(&dn[a], &covariant_frame(table, &u[a], &n));
        for b in 0..2 {
            second[a][b] = -dot3(&cov, &u[b]);
        }
    }
    let off = 0.5 * (second[0][1] + second[1][0]);
    second[0][1] = off;
    second[1][0] = off;
    let shape = mat2_mul(&inv, &second);

    let vert = [u[0][2], u[1][2]];
    Ok(NodeData { metric, shape, nu: n[2], tvec: mat2_vec(&inv, &vert), christoffel })
}

/// Orientation conventions of the sister map: `S̃ = j·JS + H` and
/// `T̃ = t·J T` in coordinates, with `J` the rotation of the tangent plane
/// oriented by `(∂x, ∂y, N)`. The default is the only combination whose
/// reconstruction reproduces `ν` and `T̃`.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct SisterConvention {
    pub j_sign: f64,
    pub t_sign: f64,
}

impl Default for SisterConvention {
    fn default() -> Self {
        Self { j_sign: 1.0, t_sign: 1.0 }
    }
}

/// Data of the constant mean curvature sister in H²×R.
#[derive(Clone, Debug)]
pub struct SisterData {
    pub h: f64,
    pub convention: SisterConvention,
    pub lattice: Lattice,
    pub nodes: Vec<NodeData>,
}

impl SisterData {
    pub fn node(&self, i: usize, j: usize) -> &NodeData {
        &self.nodes[self.lattice.index(i, j)]
    }

    /// Largest deviation of the mean curvature from `H`.
    pub fn mean_curvature_defect(&self) -> f64 {
        self.nodes.iter().map(|n| (n.mean_curvature() - self.h).abs()).fold(0.0, f64::max)
    }
}

/// `S̃ = J S + H·id` with `J` the rotation of the oriented tangent plane.
pub fn sister_shape(node: &NodeData, h: f64, j_sign: f64) -> [[f64; 2]; 2] {
    let js = mat2_mul(&node.rotation(), &node.shape);
    let mut s = [[j_sign * js[0][0], j_sign * js[0][1]], [j_sign * js[1][0], j_sign * js[1][1]]];
    s[0][0] += h;
    s[1][1] += h;
    s
}

pub fn sister_data(h: f64, data: &SurfaceData) -> Result<SisterData> {
    sister_data_with(h, data, SisterConvention::default())
}

pub fn sister_data_with(h: f64, data: &SurfaceData, convention: SisterConvention) -> Result<SisterData> {
    let expect = BergerParams::from_mean_curvature(h)?;
    let p = &data.params;
    if (p.kappa() - expect.kappa()).abs() > 1e-12 * expect.kappa() || (p.tau() - expect.tau()).abs() > 1e-12 * h {
        return Err(GeomError::InvalidParameter(format!(
            "surface lives in S3({}, {}), expected S3({}, {}) for H = {h}",
            p.kappa(),
            p.tau(),
            expect.kappa(),
            expect.tau()
        )));
    }
    let nodes = data
        .nodes
        .iter()
        .map(|n| {
            let t = mat2_vec(&n.rotation(), &n.tvec);
            NodeData {
                shape: sister_shape(n, h, convention.j_sign),
                tvec: [convention.t_sign * t[0], convention.t_sign * t[1]],
                ..*n
            }
        })
        .collect();
    Ok(SisterData { h, convention, lattice: data.lattice, nodes })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::surfaces::{fc_raw, fc_shape_operator, FcSpec};

    fn fc_data(h: f64, c: f64, n: usize) -> (FcSpec, SurfaceData) {
        let spec = FcSpec::new(h, c).unwrap();
        let a = spec.axis_x();
        let lat = Lattice::spanning((a - 0.5, a + 0.5), (0.0, 1.0), n, n).unwrap();
        let data = surface_data(&spec.params, &|x, y| *fc_raw(&spec, x, y).coords(), &lat).unwrap();
        (spec, data)
    }

    #[test]
    fn fc_axis_normal_is_horizontal_and_shape_matches() {
        for c in [1.0, 0.5, 0.0] {
            let (spec, data) = fc_data(1.0, c, 11);
            let want = fc_shape_operator(&spec, 0.0);
            for j in 0..11 {
                let n = data.node(5, j);
                assert!(n.nu.abs() < 1e-8, "nu {}", n.nu);
                for a in 0..2 {
                    for b in 0..2 {
                        assert!((n.shape[a][b] - want[a][b]).abs() < 1e-5, "c={c} {:?} vs {want:?}", n.shape);
                    }
                }
            }
        }
    }

    #[test]
    fn minimal_with_unit_vertical_decomposition() {
        let (_, data) = fc_data(1.3, 0.7, 9);
        assert!(data.vertical_defect() < 1e-6);
        for n in &data.nodes {
            assert!(n.mean_curvature().abs() < 1e-6);
        }
    }

    #[test]
    fn sister_has_mean_curvature_h_and_same_nu() {
        let (_, data) = fc_data(1.0, 0.5, 9);
        let sis = sister_data(1.0, &data).unwrap();
        assert!(sis.mean_curvature_defect() < 1e-6);
        for (a, b) in data.nodes.iter().zip(&sis.nodes) {
            assert_eq!(a.nu, b.nu);
            assert_eq!(a.metric, b.metric);
        }
        assert!(sister_data(2.0, &data).is_err());
    }

    #[test]
    fn sister_shape_is_algebraic() {
        use rand::{Rng, SeedableRng};
        let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(7);
        for _ in 0..100 {
            let (e, g) = (rng.gen_range(0.5..2.0), rng.gen_range(0.5..2.0));
            let f = rng.gen_range(-0.4..0.4);
            let second = [[rng.gen_range(-1.0..1.0), 0.0], [0.0, rng.gen_range(-1.0..1.0)]];
            let mut second = second;
            second[0][1] = rng.gen_range(-1.0..1.0);
            second[1][0] = second[0][1];
            let inv = crate::linalg::sym2_inverse(e, f, g);
            let node = NodeData {
                metric: [e, f, g],
                shape: mat2_mul(&inv, &second),
                nu: 0.0,
                tvec: [0.0; 2],
                christoffel: [[[0.0; 2]; 2]; 2],
            };
            let h = rng.gen_range(0.6..2.0);
            let st = sister_shape(&node, h, 1.0);
            let js = mat2_mul(&node.rotation(), &node.shape);
            for a in 0..2 {
                for b in 0..2 {
                    let want = js[a][b] + if a == b { h } else { 0.0 };
                    assert!((st[a][b] - want).abs() < 1e-15);
                }
            }
            assert!((0.5 * (st[0][0] + st[1][1]) - h).abs() < 1e-12);
            // J² = −1
            let j2 = mat2_mul(&node.rotation(), &node.rotation());
            assert!((j2[0][0] + 1.0).abs() < 1e-12 && j2[0][1].abs() < 1e-12);
        }
    }

    #[test]
    fn mesh_data_matches_analytic_at_second_order() {
        let spec = FcSpec::new(1.0, 0.5).unwrap();
        let a = spec.axis_x();
        let f = |x: f64, y: f64| *fc_raw(&spec, x, y).coords();
        let mut errs = Vec::new();
        for n in [17usize, 33] {
            let lat = Lattice::spanning((a - 0.5, a + 0.5), (0.0, 1.0), n, n).unwrap();
            let mesh = crate::mesh::grid_mesh(f, (a - 0.5, a + 0.5), (0.0, 1.0), n, n, false);
            let dm = surface_data_mesh(&spec.params, &mesh, &lat).unwrap();
            let da = surface_data(&spec.params, &f, &lat).unwrap();
            let mut e = 0.0f64;
            for (x, y) in dm.nodes.iter().zip(&da.nodes) {
                for r in 0..2 {
                    for c in 0..2 {
                        e = e.max((x.shape[r][c] - y.shape[r][c]).abs());
                        for k in 0..2 {
                            e = e.max((x.christoffel[k][r][c] - y.christoffel[k][r][c]).abs());
                        }
                    }
                }
                e = e.max((x.nu - y.nu).abs());
            }
            errs.push(e);
        }
        assert!(errs[0] / errs[1] > 3.5, "{errs:?}");
    }
}
