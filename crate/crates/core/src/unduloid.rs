//! The non-vertical annuli bounded by `h1 = f^c(·,0)` and `h2^α = f^c(·,α)`:
//! the reflected `Γ_λ` annulus at `α₀` and its continuation in `α`.

use std::f64::consts::PI;

use crate::berger::{BergerParams, S3Point};
use crate::daniel::{
    hypotheses_and_axis, reconstruct_sister, seed_frame, sister_data, surface_data_mesh, AxisReport, BoundarySpec,
    GridLine, Lattice, PeriodSource, Seed, SisterGrid, SisterSample,
};
use crate::error::{GeomError, Result};
use crate::geodesics::{connecting_vertical_segment, HorizontalGeodesic, SegmentData};
use crate::h2r::lorentz_dot;
use crate::isometry::AmbientIsometry;
use crate::linalg::{dist4, mat4_mul, mat4_transpose, mat4_vec, sub4, Mat4};
use crate::mesh::{BoundaryTag, GridInfo, Topology, TriMesh};
use crate::plateau::{classify_annulus, minimize_area, Branch, SolveConfig, SolveReport};
use crate::polygon::{build_polygon, Edge, GeodesicPolygon};
use crate::surfaces::{alpha0, HelicoidSpec};

/// Tolerance on the match between the polygon pair and the `f^c` pair.
pub const NORMAL_FORM_TOL: f64 = 1e-8;

/// `λ(c) = cπ/(√κ(c+1))`.
pub fn lambda_of(params: &BergerParams, c: f64) -> f64 {
    c * PI / (params.kappa().sqrt() * (c + 1.0))
}

fn block_rotation(a: f64, b: f64) -> Mat4 {
    let (sa, ca) = a.sin_cos();
    let (sb, cb) = b.sin_cos();
    [[ca, -sa, 0.0, 0.0], [sa, ca, 0.0, 0.0], [0.0, 0.0, cb, -sb], [0.0, 0.0, sb, cb]]
}

/// The polygon `Γ_λ(c)` together with the helicoid screw motion carrying
/// `h1` to `h2^α`.
#[derive(Clone, Debug)]
pub struct AnnulusFamily {
    pub h: f64,
    pub c: f64,
    pub params: BergerParams,
    pub poly: GeodesicPolygon,
    pub alpha0: f64,
    helicoid: HelicoidSpec,
    frame: AmbientIsometry,
}

impl AnnulusFamily {
    pub fn new(h: f64, c: f64) -> Result<Self> {
        if !(c > 0.0 && c <= 1.0) {
            return Err(GeomError::OutOfDomain { name: "c", value: c, domain: "(0, 1]".into() });
        }
        let params = BergerParams::from_mean_curvature(h)?;
        let poly = build_polygon(&params, lambda_of(&params, c))?;
        let seg = connecting_vertical_segment(&params, &poly.h1(), &poly.h2())?;
        let a0 = alpha0(h, c);
        let dl = (seg.ell - c * a0).abs();
        let dphi = (seg.phi - PI).abs();
        if dl > NORMAL_FORM_TOL || dphi > NORMAL_FORM_TOL {
            return Err(GeomError::InvalidParameter(format!(
                "polygon pair does not match f^c: ell off by {dl:e}, phi off by {dphi:e}"
            )));
        }
        Ok(Self {
            h,
            c,
            params,
            poly,
            alpha0: a0,
            helicoid: HelicoidSpec::from_segment(params, &seg)?,
            frame: seg.normalizing_isometry(&params),
        })
    }

    /// Screw motion `f^c(x, y) ↦ f^c(x, y + tα₀)` in the polygon's frame.
    pub fn screw(&self, t: f64) -> Mat4 {
        let s = &self.helicoid;
        let w = self.params.kappa() / (4.0 * self.params.tau());
        let a = s.sign * w * s.ell * t;
        let r = block_rotation(a, s.phi * t + a);
        let n = self.frame.matrix();
        mat4_mul(n, &mat4_mul(&r, &mat4_transpose(n)))
    }

    pub fn h1(&self) -> HorizontalGeodesic {
        self.poly.h1()
    }

    /// `h2^α`, the image of `h1` under the screw by `α/α₀`.
    pub fn h2(&self, alpha: f64) -> HorizontalGeodesic {
        let m = self.screw(alpha / self.alpha0);
        let h1 = self.h1();
        let p = *h1.base.coords();
        let q = *h1.eval(1e-3).coords();
        let (mp, mq) = (mat4_vec(&m, &p), mat4_vec(&m, &q));
        let f = self.params.frame_coords(&mp, &sub4(&mq, &mp));
        HorizontalGeodesic::new(self.params, S3Point::normalized(mp), f[1].atan2(f[0]), 1.0)
    }

    pub fn segment(&self, alpha: f64) -> Result<SegmentData> {
        connecting_vertical_segment(&self.params, &self.h1(), &self.h2(alpha))
    }
}

/// Assembles the eight reflected copies of a solved `Γ_λ` disk into a
/// periodic grid annulus with `4(n−1)` columns along `h1` and `2n−1` rows
/// from `h1` (curve 0) to `h2` (curve 1).
pub fn reflected_annulus(poly: &GeodesicPolygon, disk: &TriMesh) -> Result<TriMesh> {
    let n = match disk.grid {
        Some(GridInfo { nx, ny, periodic_x: false }) if nx == ny && nx >= 3 => nx,
        _ => return Err(GeomError::InvalidParameter("expected a square non-periodic grid disk".into())),
    };
    let s2 = *poly.reflection_across(Edge::Gamma2).matrix();
    let s4 = *poly.reflection_across(Edge::Gamma4).matrix();
    let rho = *poly.reflection_across(Edge::Gamma3).matrix();
    let s42 = mat4_mul(&s4, &s2);
    let copies = [crate::linalg::mat4_identity(), s4, s42, mat4_mul(&s42, &s4)];
    let e = n - 1;
    let (nx, ny) = (4 * e, 2 * e + 1);
    let at = |ci: usize, cj: usize| -> [f64; 4] {
        let k = (ci / e).min(3);
        let i = if k.is_multiple_of(2) { ci - k * e } else { (k + 1) * e - ci };
        let (j, mirror) = if cj <= e { (cj, false) } else { (2 * e - cj, true) };
        let v = mat4_vec(&copies[k], &disk.vertices[j * n + i]);
        if mirror {
            mat4_vec(&rho, &v)
        } else {
            v
        }
    };
    let gap = (0..ny).map(|j| dist4(&at(nx, j), &at(0, j))).fold(0.0, f64::max);
    if gap > 1e-8 {
        return Err(GeomError::InvalidParameter(format!("reflected copies do not close up (gap {gap:e})")));
    }
    let mut m = crate::mesh::grid_mesh(|_, _| [1.0, 0.0, 0.0, 0.0], (0.0, 1.0), (0.0, 1.0), nx, ny, true);
    for j in 0..ny {
        for i in 0..nx {
            m.vertices[j * nx + i] = at(i, j);
        }
    }
    m.curves = vec![poly.h1().great_circle(), poly.h2().great_circle()];
    retag(&mut m);
    m.topology = Topology::Annulus;
    Ok(m)
}

fn retag(m: &mut TriMesh) {
    let g = m.grid.expect("grid");
    for (row, curve) in [(0, 0), (g.ny - 1, 1)] {
        for i in 0..g.nx {
            let v = row * g.nx + i;
            m.vertices[v] = m.curves[curve].eval(m.curves[curve].param_of(&m.vertices[v]));
            let param = m.curves[curve].param_of(&m.vertices[v]);
            m.boundary[v] = Some(BoundaryTag { curve, param });
        }
    }
}

/// Cuts a periodic grid annulus open along column 0, repeating that column
/// at the end.
pub fn unwrap_annulus(m: &TriMesh) -> Result<TriMesh> {
    let g = match m.grid {
        Some(g) if g.periodic_x => g,
        _ => return Err(GeomError::InvalidParameter("expected a periodic grid".into())),
    };
    let nx = g.nx + 1;
    let mut out = crate::mesh::grid_mesh(|_, _| [1.0, 0.0, 0.0, 0.0], (0.0, 1.0), (0.0, 1.0), nx, g.ny, false);
    for j in 0..g.ny {
        for i in 0..nx {
            let src = j * g.nx + i % g.nx;
            out.vertices[j * nx + i] = m.vertices[src];
            out.boundary[j * nx + i] = m.boundary[src];
        }
    }
    out.curves = m.curves.clone();
    out.topology = Topology::Disk;
    Ok(out)
}

/// Moves row `j` of the annulus by the screw `t·j/(ny−1)`, so that the `h2`
/// row advances by `t` while `h1` stays fixed.
pub fn advance_h2(family: &AnnulusFamily, m: &TriMesh, t: f64) -> TriMesh {
    let g = m.grid.expect("grid annulus");
    let mut out = m.clone();
    for j in 0..g.ny {
        let s = family.screw(t * j as f64 / (g.ny - 1) as f64);
        for i in 0..g.nx {
            let v = j * g.nx + i;
            out.vertices[v] = mat4_vec(&s, &m.vertices[v]);
        }
    }
    out.curves[1] = m.curves[1].transformed(&family.screw(t));
    retag(&mut out);
    out
}

fn sub_grid(strip: &TriMesh, i0: usize, j0: usize, n: usize) -> TriMesh {
    let g = strip.grid.expect("grid");
    let mut out = crate::mesh::grid_mesh(|_, _| [1.0, 0.0, 0.0, 0.0], (0.0, 1.0), (0.0, 1.0), n, n, false);
    for j in 0..n {
        for i in 0..n {
            out.vertices[j * n + i] = strip.vertices[(j0 + j) * g.nx + i0 + i];
        }
    }
    out
}

/// Rotation of the seed frame at `node` that aligns the tangent along
/// coordinate `dir` with that of `target`.
fn aligning_seed(
    node: &crate::daniel::NodeData,
    at: (usize, usize),
    target: &SisterSample,
    dir: usize,
) -> Result<Seed> {
    let probe = |rotation: f64| seed_frame(node, &Seed { node: at, point: target.point, rotation });
    let (a, b) = (probe(0.0)?.frame[dir], probe(PI / 2.0)?.frame[dir]);
    let t = target.frame[dir];
    let dot = |u: &[f64; 4], v: &[f64; 4]| lorentz_dot(&[u[0], u[1], u[2]], &[v[0], v[1], v[2]]);
    Ok(Seed { node: at, point: target.point, rotation: dot(&t, &b).atan2(dot(&t, &a)) })
}

/// Sister of the annulus cut open along one seam. The eight reflected
/// patches are integrated separately, since the reflected parametrization
/// is only continuous across the mirror lines, and each patch is seeded
/// from its neighbour along the shared curve.
pub fn annulus_sister(family: &AnnulusFamily, m: &TriMesh) -> Result<SisterGrid> {
    let strip = unwrap_annulus(m)?;
    let g = strip.grid.expect("grid");
    let n = g.ny.div_ceil(2);
    if (g.nx - 1) % (n - 1) != 0 || (g.nx - 1) / (n - 1) != 4 || n % 2 == 0 {
        return Err(GeomError::InvalidParameter(format!("{}x{} is not a strip of 4x2 odd patches", g.nx, g.ny)));
    }
    let half = (n - 1) / 2;
    let lat = Lattice::spanning((0.0, 1.0), (0.0, 1.0), n, n)?;
    let out_lat = Lattice::spanning((0.0, 4.0), (0.0, 2.0), 4 * half + 1, 2 * half + 1)?;
    let mut samples: Vec<Option<SisterSample>> = vec![None; out_lat.len()];
    let (mut path, mut metric, mut nu, mut tv, mut seam) = (0.0f64, 0.0f64, 0.0f64, 0.0f64, 0.0f64);
    for pj in 0..2 {
        for pi in 0..4 {
            let patch = sub_grid(&strip, pi * (n - 1), pj * (n - 1), n);
            let data = surface_data_mesh(&family.params, &patch, &lat)?;
            let sis = sister_data(family.h, &data)?;
            let seed = match (pi, pj) {
                (0, 0) => Seed::at((0, 0)),
                (_, 0) => {
                    let t = samples[out_lat.index(pi * half, 0)].expect("left neighbour");
                    aligning_seed(sis.node(0, 0), (0, 0), &t, 1)?
                }
                _ => {
                    let t = samples[out_lat.index(pi * half, half)].expect("lower neighbour");
                    aligning_seed(sis.node(0, 0), (0, 0), &t, 0)?
                }
            };
            let r = reconstruct_sister(&sis, &seed)?;
            path = path.max(r.path_residual);
            metric = metric.max(r.metric_residual);
            nu = nu.max(r.nu_residual);
            tv = tv.max(r.tvec_residual);
            for j in 0..=half {
                for i in 0..=half {
                    let k = out_lat.index(pi * half + i, pj * half + j);
                    let s = *r.sample(i, j);
                    match samples[k] {
                        Some(prev) => seam = seam.max(prev.distance(&s)),
                        None => samples[k] = Some(s),
                    }
                }
            }
        }
    }
    Ok(SisterGrid {
        lattice: out_lat,
        samples: samples.into_iter().map(|s| s.expect("covered")).collect(),
        path_residual: path.max(seam),
        metric_residual: metric,
        nu_residual: nu,
        tvec_residual: tv,
    })
}

#[derive(Clone, Debug)]
pub struct SweepRow {
    pub alpha: f64,
    pub solve: SolveReport,
    pub branch: Branch,
    pub helicoid_distance: f64,
    pub axis: AxisReport,
    pub period_residual: f64,
    pub path_residual: f64,
    pub nonvertical: bool,
}

impl SweepRow {
    pub const CSV_HEADER: &'static str =
        "alpha,area,max_residual,converged,branch,helicoid_distance,axis_slope,axis_class,delta,shift,period_residual,path_residual,nonvertical";

    pub fn csv_line(&self) -> String {
        use crate::io::fmt17;
        format!(
            "{},{},{},{},{},{},{},{:?},{},{},{},{},{}",
            fmt17(self.alpha),
            fmt17(self.solve.area),
            fmt17(self.solve.max_residual),
            self.solve.converged,
            match self.branch {
                Branch::Helicoidal => "helicoidal",
                Branch::NonHelicoidal => "non_helicoidal",
            },
            fmt17(self.helicoid_distance),
            fmt17(self.axis.alpha),
            self.axis.class,
            fmt17(self.axis.delta),
            fmt17(self.axis.shift),
            fmt17(self.period_residual),
            fmt17(self.path_residual),
            self.nonvertical,
        )
    }
}

pub fn diagnose(family: &AnnulusFamily, alpha: f64, m: &TriMesh, solve: SolveReport) -> Result<SweepRow> {
    let grid = annulus_sister(family, m)?;
    let last = grid.lattice.ny - 1;
    let d = hypotheses_and_axis(
        &grid,
        &BoundarySpec {
            mirrors: vec![GridLine::Row(0), GridLine::Row(last)],
            boundary: vec![GridLine::Row(0), GridLine::Row(last)],
            period: PeriodSource::Shift { di: grid.lattice.nx - 1, dj: 0 },
            closure_tol: 1e-6,
            check_embedding: false,
        },
    );
    let b = classify_annulus(&family.params, m, &family.segment(alpha)?)?;
    Ok(SweepRow {
        alpha,
        solve,
        branch: b.branch,
        helicoid_distance: b.distance,
        axis: d.axis,
        period_residual: d.period_residual,
        path_residual: grid.path_residual,
        nonvertical: d.h2_holds,
    })
}

/// Solves the `Γ_λ` disk on an `n × n` grid, reflects it to the annulus at
/// `α₀` and continues outward to each requested `α`. Rows come back in the
/// order of `alphas`.
pub fn sweep(family: &AnnulusFamily, alphas: &[f64], n: usize, cfg: &SolveConfig) -> Result<Vec<SweepRow>> {
    let (lo, hi) = crate::surfaces::alpha_interval(family.h, family.c);
    if let Some(&a) = alphas.iter().find(|&&a| !(a > lo && a < hi)) {
        return Err(GeomError::OutOfDomain { name: "alpha", value: a, domain: format!("({lo}, {hi})") });
    }
    let (disk, _) = minimize_area(&family.params, &crate::mesh::coons_disk(&family.poly, n), cfg);
    let (base, rep) = minimize_area(&family.params, &reflected_annulus(&family.poly, &disk)?, cfg);
    let mut order: Vec<usize> = (0..alphas.len()).collect();
    order.sort_by(|&a, &b| alphas[a].partial_cmp(&alphas[b]).unwrap());
    let split = order.partition_point(|&k| alphas[k] < family.alpha0);
    let mut rows: Vec<Option<SweepRow>> = vec![None; alphas.len()];
    let below: Vec<usize> = order[..split].iter().rev().cloned().collect();
    let above: Vec<usize> = order[split..].to_vec();
    for branch in [below, above] {
        let (mut mesh, mut prev, mut report) = (base.clone(), family.alpha0, rep);
        for k in branch {
            let a = alphas[k];
            if a != prev {
                let seed = advance_h2(family, &mesh, (a - prev) / family.alpha0);
                (mesh, report) = minimize_area(&family.params, &seed, cfg);
                prev = a;
            }
            rows[k] = Some(diagnose(family, a, &mesh, report)?);
        }
    }
    Ok(rows.into_iter().map(|r| r.expect("every alpha visited")).collect())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::mesh::coons_disk;

    #[test]
    fn family_screw_reaches_h2() {
        let f = AnnulusFamily::new(1.0, 0.5).unwrap();
        let h2 = f.h2(f.alpha0);
        let want = f.poly.h2().great_circle();
        for k in 0..20 {
            assert!(want.distance(h2.eval(0.3 * k as f64).coords()) < 1e-12);
        }
        let seg = f.segment(0.8 * f.alpha0).unwrap();
        assert!((seg.ell - 0.8 * f.c * f.alpha0).abs() < 1e-9, "{}", seg.ell);
    }

    #[test]
    fn annulus_grid_closes_and_is_bounded_by_h1_h2() {
        let f = AnnulusFamily::new(1.0, 0.5).unwrap();
        let disk = coons_disk(&f.poly, 9);
        let a = reflected_annulus(&f.poly, &disk).unwrap();
        a.validate().unwrap();
        assert_eq!(a.faces.len(), 8 * disk.faces.len());
        assert_eq!(a.euler_characteristic(), 0);
        let moved = advance_h2(&f, &a, 0.1);
        let h2 = f.h2(1.1 * f.alpha0).great_circle();
        let g = moved.grid.unwrap();
        for i in 0..g.nx {
            assert!(h2.distance(&moved.vertices[(g.ny - 1) * g.nx + i]) < 1e-12);
            assert_eq!(moved.vertices[i], a.vertices[i]);
        }
    }

    #[test]
    fn sweep_at_alpha0_has_horizontal_axis() {
        let f = AnnulusFamily::new(1.0, 1.0).unwrap();
        let cfg = SolveConfig { tol: 1e-5, ..Default::default() };
        let rows = sweep(&f, &[f.alpha0], 17, &cfg).unwrap();
        let r = &rows[0];
        assert!(r.solve.converged);
        assert_eq!(r.branch, Branch::NonHelicoidal);
        assert!((r.axis.alpha - PI / 2.0).abs() < 0.05, "{:?}", r.axis);
        assert!(r.path_residual < 1e-2);
        assert!(sweep(&f, &[2.5 * f.alpha0], 9, &cfg).is_err());
    }
}
