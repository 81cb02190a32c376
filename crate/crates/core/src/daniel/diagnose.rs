use std::f64::consts::FRAC_PI_2;

use crate::h2r::{lorentz_cross, lorentz_dot, normalize_h2, space_norm, H2RIsometry, H2RPoint, VerticalPlane};
use crate::intersect::{self_intersection_test_3d, IntersectionReport};
use crate::linalg::{mat3_inverse, sym3_eigen, Mat3, Vec3};

use super::grid_faces;
use super::reconstruct::{product_dot, SisterGrid, SisterSample, Vec21};

/// Half-width of the bands around `0` and `π/2` for axis classification.
pub const SLOPE_BAND: f64 = 0.05;

/// A row (`y` fixed) or column (`x` fixed) of the sample lattice.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum GridLine {
    Row(usize),
    Column(usize),
}

impl GridLine {
    pub fn samples(&self, grid: &SisterGrid) -> Vec<SisterSample> {
        match *self {
            GridLine::Row(j) => grid.row(j),
            GridLine::Column(i) => grid.column(i),
        }
    }

    /// Index of the frame vector tangent to the line.
    fn along(&self) -> usize {
        match self {
            GridLine::Row(_) => 0,
            GridLine::Column(_) => 1,
        }
    }

    fn contains(&self, i: usize, j: usize) -> bool {
        match *self {
            GridLine::Row(r) => j == r,
            GridLine::Column(c) => i == c,
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub enum MirrorPlane {
    /// `Γ×R` with `Γ = {⟨x, m⟩ = 0}`, `m` spacelike unit.
    Vertical {
        normal: Vec3,
    },
    Horizontal {
        height: f64,
    },
}

impl MirrorPlane {
    pub fn reflection(&self) -> H2RIsometry {
        match *self {
            MirrorPlane::Horizontal { height } => H2RIsometry::horizontal_reflection(height),
            MirrorPlane::Vertical { normal } => {
                let mut a = [[0.0; 3]; 3];
                let mj = [-normal[0], normal[1], normal[2]];
                for i in 0..3 {
                    for k in 0..3 {
                        a[i][k] = if i == k { 1.0 } else { 0.0 } - 2.0 * normal[i] * mj[k];
                    }
                }
                H2RIsometry { lorentz: a, height_sign: 1.0, height_shift: 0.0 }
            }
        }
    }

    /// The plane as a [`VerticalPlane`] through the point of `Γ` nearest to
    /// `near`.
    pub fn vertical_plane(&self, near: &Vec3) -> Option<VerticalPlane> {
        let MirrorPlane::Vertical { normal: m } = *self else { return None };
        let s = lorentz_dot(near, &m);
        let q = normalize_h2(&[near[0] - s * m[0], near[1] - s * m[1], near[2] - s * m[2]]);
        let d = lorentz_cross(&q, &m);
        let n = space_norm(&d);
        Some(VerticalPlane { point: q, dir: [d[0] / n, d[1] / n, d[2] / n] })
    }
}

/// Best mirror plane of a curve on the sister and how well the curve fits
/// the definition of a mirror curve.
#[derive(Clone, Copy, Debug)]
pub struct MirrorFit {
    pub plane: MirrorPlane,
    /// Largest distance from a sample to the plane.
    pub deviation: f64,
    /// Largest `1 − |⟨η, n⟩|` for the unit conormal `η` and plane normal `n`.
    pub conormal_deviation: f64,
}

fn vertical_fit(pts: &[H2RPoint]) -> (Vec3, f64) {
    let mut m = [[0.0; 3]; 3];
    for p in pts {
        for a in 0..3 {
            for b in 0..3 {
                m[a][b] += p.h2[a] * p.h2[b];
            }
        }
    }
    let (_, vecs) = sym3_eigen(&m);
    let e = vecs[0];
    let n = [-e[0], e[1], e[2]];
    let len = space_norm(&n);
    if len < 1e-12 {
        return (n, f64::INFINITY);
    }
    let n = [n[0] / len, n[1] / len, n[2] / len];
    let dev = pts.iter().map(|p| lorentz_dot(&p.h2, &n).abs().asinh()).fold(0.0, f64::max);
    (n, dev)
}

/// Fits both plane types to the samples of `line` and keeps the closer one.
pub fn fit_mirror(grid: &SisterGrid, line: GridLine) -> MirrorFit {
    let samples = line.samples(grid);
    fit_mirror_samples(&samples, line.along())
}

/// As [`fit_mirror`] for an explicit run of samples whose frame vector
/// `along` is tangent to the curve.
pub fn fit_mirror_samples(samples: &[SisterSample], along: usize) -> MirrorFit {
    let pts: Vec<H2RPoint> = samples.iter().map(|s| s.point).collect();
    let spread = pts.iter().map(|p| crate::h2r::h2_distance(&p.h2, &pts[0].h2)).fold(0.0, f64::max);
    let (normal, vdev) = if spread < 1e-6 {
        // a vertical segment lies in many planes; take the one normal to the conormal
        let mut m = [0.0; 3];
        for s in samples {
            let eta = conormal(s, along);
            let t = crate::h2r::tangent_part(&pts[0].h2, &[eta[0], eta[1], eta[2]]);
            for k in 0..3 {
                m[k] += t[k];
            }
        }
        let len = space_norm(&m);
        let m = [m[0] / len, m[1] / len, m[2] / len];
        let dev = pts.iter().map(|p| lorentz_dot(&p.h2, &m).abs().asinh()).fold(0.0, f64::max);
        (m, dev)
    } else {
        vertical_fit(&pts)
    };
    let mean = pts.iter().map(|p| p.height).sum::<f64>() / pts.len() as f64;
    let hdev = pts.iter().map(|p| (p.height - mean).abs()).fold(0.0, f64::max);
    let plane = if vdev <= hdev { MirrorPlane::Vertical { normal } } else { MirrorPlane::Horizontal { height: mean } };
    let conormal_deviation = samples
        .iter()
        .map(|s| {
            let eta = conormal(s, along);
            let c = match plane {
                MirrorPlane::Vertical { normal } => product_dot(&eta, &[normal[0], normal[1], normal[2], 0.0]),
                MirrorPlane::Horizontal { .. } => eta[3],
            };
            1.0 - c.abs()
        })
        .fold(0.0, f64::max);
    MirrorFit { plane, deviation: vdev.min(hdev), conormal_deviation }
}

/// Unit tangent vector orthogonal to frame vector `along`.
fn conormal(s: &SisterSample, along: usize) -> Vec21 {
    let t = s.frame[along];
    let o = s.frame[1 - along];
    let c = product_dot(&o, &t) / product_dot(&t, &t);
    let mut eta = [0.0; 4];
    for k in 0..4 {
        eta[k] = o[k] - c * t[k];
    }
    let n = product_dot(&eta, &eta).sqrt();
    eta.map(|x| x / n)
}

/// Least-squares isometry carrying each sample of `from` with its frame to
/// the matching sample of `to`, and the largest position mismatch.
pub fn fit_isometry(from: &[SisterSample], to: &[SisterSample]) -> (H2RIsometry, f64) {
    let mut mmt = [[0.0; 3]; 3];
    let mut pmt = [[0.0; 3]; 3];
    let mut sign = 0.0;
    for (a, b) in from.iter().zip(to) {
        let ca = columns(a);
        let cb = columns(b);
        for c in 0..4 {
            for r in 0..3 {
                for k in 0..3 {
                    mmt[r][k] += ca[c][r] * ca[c][k];
                    pmt[r][k] += cb[c][r] * ca[c][k];
                }
            }
        }
        for (u, v) in a.frame.iter().chain([&a.normal]).zip(b.frame.iter().chain([&b.normal])) {
            sign += u[3] * v[3];
        }
    }
    let inv = mat3_inverse(&mmt).unwrap_or([[0.0; 3]; 3]);
    let mut lorentz: Mat3 = [[0.0; 3]; 3];
    for r in 0..3 {
        for k in 0..3 {
            lorentz[r][k] = (0..3).map(|m| pmt[r][m] * inv[m][k]).sum();
        }
    }
    let height_sign = if sign < 0.0 { -1.0 } else { 1.0 };
    let n = from.len().max(1) as f64;
    let height_shift = from.iter().zip(to).map(|(a, b)| b.point.height - height_sign * a.point.height).sum::<f64>() / n;
    let iso = H2RIsometry { lorentz, height_sign, height_shift };
    let residual = from
        .iter()
        .zip(to)
        .map(|(a, b)| {
            let p = iso.apply(&a.point);
            crate::h2r::h2_distance(&p.h2, &b.point.h2).hypot(p.height - b.point.height)
        })
        .fold(0.0, f64::max);
    (iso, residual)
}

fn columns(s: &SisterSample) -> [Vec3; 4] {
    let h = |v: &Vec21| [v[0], v[1], v[2]];
    [s.point.h2, h(&s.frame[0]), h(&s.frame[1]), h(&s.normal)]
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum AxisClass {
    Vertical,
    Horizontal,
    Tilted,
    Undetermined,
}

/// Axis of a periodicity isometry: horizontal translation length `delta`,
/// vertical shift and slope `α = atan2(δ, |shift|)` against the vertical.
#[derive(Clone, Copy, Debug)]
pub struct AxisReport {
    pub delta: f64,
    pub shift: f64,
    pub alpha: f64,
    pub class: AxisClass,
}

pub fn axis_of(iso: &H2RIsometry) -> AxisReport {
    let a = &iso.lorentz;
    let det = crate::linalg::mat3_det(a);
    let trace = a[0][0] + a[1][1] + a[2][2];
    let delta = if trace > 3.0 { ((trace - 1.0) / 2.0).acosh() } else { 0.0 };
    let shift = if iso.height_sign > 0.0 { iso.height_shift } else { 0.0 };
    let alpha = delta.atan2(shift.abs());
    let class = if iso.height_sign < 0.0 || det < 0.0 || (delta < 1e-9 && shift.abs() < 1e-9) {
        AxisClass::Undetermined
    } else if alpha < SLOPE_BAND {
        AxisClass::Vertical
    } else if (alpha - FRAC_PI_2).abs() < SLOPE_BAND {
        AxisClass::Horizontal
    } else {
        AxisClass::Tilted
    };
    AxisReport { delta, shift, alpha, class }
}

/// How the periodicity isometry is obtained.
#[derive(Clone, Debug)]
pub enum PeriodSource {
    /// Samples `(di, dj)` lattice steps apart are images of each other.
    Shift { di: usize, dj: usize },
    /// `(R_k ∘ … ∘ R_1)^power` for the mirror reflections of `lines`.
    Reflections { lines: Vec<GridLine>, power: u32 },
}

/// Boundary description for [`hypotheses_and_axis`].
#[derive(Clone, Debug)]
pub struct BoundarySpec {
    /// Lines whose sisters should be mirror curves.
    pub mirrors: Vec<GridLine>,
    /// Sister curves of the boundary geodesics `h1, h2` present in the grid.
    pub boundary: Vec<GridLine>,
    pub period: PeriodSource,
    /// Displacement below which a boundary curve counts as closed.
    pub closure_tol: f64,
    /// Run the self-intersection surrogate on the mesh extended by the
    /// mirror reflections.
    pub check_embedding: bool,
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub enum PlaneRelation {
    Disjoint,
    Intersecting,
    Coincident,
    NotVertical,
}

/// Two vertical planes with unit normals `m1, m2`.
pub fn plane_relation(a: &MirrorPlane, b: &MirrorPlane, tol: f64) -> PlaneRelation {
    match (a, b) {
        (MirrorPlane::Vertical { normal: m1 }, MirrorPlane::Vertical { normal: m2 }) => {
            let c = lorentz_dot(m1, m2).abs();
            let parallel = (0..3).all(|k| (m1[k] - m2[k]).abs() < tol) || (0..3).all(|k| (m1[k] + m2[k]).abs() < tol);
            if parallel {
                PlaneRelation::Coincident
            } else if c < 1.0 - tol {
                PlaneRelation::Intersecting
            } else {
                PlaneRelation::Disjoint
            }
        }
        _ => PlaneRelation::NotVertical,
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum PeriodCase {
    /// Boundary curves displaced by the period.
    A,
    /// Boundary curves closed.
    B,
}

#[derive(Clone, Debug)]
pub struct H1Report {
    pub displacements: Vec<f64>,
    pub case: PeriodCase,
    pub relation: Option<PlaneRelation>,
    pub holds: bool,
}

#[derive(Clone, Debug)]
pub struct Diagnostics {
    pub mirrors: Vec<MirrorFit>,
    pub period: H2RIsometry,
    pub period_residual: f64,
    pub axis: AxisReport,
    pub h1: H1Report,
    pub h2_holds: bool,
    pub h3: Option<IntersectionReport>,
}

pub fn hypotheses_and_axis(grid: &SisterGrid, spec: &BoundarySpec) -> Diagnostics {
    let mirrors: Vec<MirrorFit> = spec.mirrors.iter().map(|&l| fit_mirror(grid, l)).collect();
    let (period, period_residual) = match &spec.period {
        PeriodSource::Shift { di, dj } => {
            let lat = &grid.lattice;
            let mut from = Vec::new();
            let mut to = Vec::new();
            for j in 0..lat.ny.saturating_sub(*dj) {
                for i in 0..lat.nx.saturating_sub(*di) {
                    from.push(*grid.sample(i, j));
                    to.push(*grid.sample(i + di, j + dj));
                }
            }
            fit_isometry(&from, &to)
        }
        PeriodSource::Reflections { lines, power } => {
            let mut step = H2RIsometry::identity();
            for &l in lines {
                step = fit_mirror(grid, l).plane.reflection().compose(&step);
            }
            let mut iso = H2RIsometry::identity();
            for _ in 0..*power {
                iso = step.compose(&iso);
            }
            (iso, 0.0)
        }
    };
    let axis = axis_of(&period);

    let boundary: Vec<MirrorFit> = spec.boundary.iter().map(|&l| fit_mirror(grid, l)).collect();
    let displacements: Vec<f64> = spec
        .boundary
        .iter()
        .map(|l| {
            let s = l.samples(grid)[0];
            let p = period.apply(&s.point);
            crate::h2r::h2_distance(&p.h2, &s.point.h2).hypot(p.height - s.point.height)
        })
        .collect();
    let case = if displacements.iter().all(|&d| d < spec.closure_tol) && !displacements.is_empty() {
        PeriodCase::B
    } else {
        PeriodCase::A
    };
    let relation = (boundary.len() >= 2).then(|| plane_relation(&boundary[0].plane, &boundary[1].plane, 1e-6));
    let holds = match case {
        PeriodCase::A => true,
        PeriodCase::B => relation == Some(PlaneRelation::Disjoint),
    };
    let h1 = H1Report { displacements, case, relation, holds };
    let h2_holds = axis.class != AxisClass::Vertical && axis.class != AxisClass::Undetermined;
    let h3 = spec.check_embedding.then(|| extended_intersections(grid, &spec.mirrors, &mirrors));
    Diagnostics { mirrors, period, period_residual, axis, h1, h2_holds, h3 }
}

/// Poincaré disk × R chart.
fn chart(p: &H2RPoint) -> Vec3 {
    let s = 1.0 / (1.0 + p.h2[0]);
    [p.h2[1] * s, p.h2[2] * s, p.height]
}

/// Triangulates the sample grid and its reflections in each mirror plane,
/// welding every copy to the original along the mirror line, and runs the
/// face-pair test in a chart.
fn extended_intersections(grid: &SisterGrid, lines: &[GridLine], fits: &[MirrorFit]) -> IntersectionReport {
    let lat = &grid.lattice;
    let mut verts: Vec<Vec3> = grid.samples.iter().map(|s| chart(&s.point)).collect();
    let base_faces = grid_faces(lat.nx, lat.ny);
    let mut faces = base_faces.clone();
    for (line, fit) in lines.iter().zip(fits) {
        let iso = fit.plane.reflection();
        let mut map = vec![0usize; grid.samples.len()];
        for j in 0..lat.ny {
            for i in 0..lat.nx {
                let k = lat.index(i, j);
                map[k] = if line.contains(i, j) {
                    k
                } else {
                    verts.push(chart(&iso.apply(&grid.samples[k].point)));
                    verts.len() - 1
                };
            }
        }
        faces.extend(base_faces.iter().map(|f| [map[f[0]], map[f[2]], map[f[1]]]));
    }
    self_intersection_test_3d(&verts, &faces)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::daniel::{reconstruct_sister, sister_data, surface_data, Lattice, Seed};
    use crate::surfaces::{fc_raw, t_half, FcSpec};
    use std::f64::consts::PI;

    fn fc_period_grid(c: f64, seed: H2RPoint, rotation: f64) -> SisterGrid {
        let spec = FcSpec::new(1.0, c).unwrap();
        let (a, w) = (spec.axis_x(), PI / spec.params.kappa().sqrt());
        let n = 33;
        let lat = Lattice::spanning((a - w, a + w), (0.0, t_half(1.0, c)), n, n).unwrap();
        let data = surface_data(&spec.params, &|x, y| *fc_raw(&spec, x, y).coords(), &lat).unwrap();
        reconstruct_sister(&sister_data(1.0, &data).unwrap(), &Seed { node: ((n - 1) / 2, 0), point: seed, rotation })
            .unwrap()
    }

    fn fc_spec(g: &SisterGrid) -> BoundarySpec {
        let (m, top) = (g.lattice.nx, g.lattice.ny - 1);
        BoundarySpec {
            mirrors: vec![GridLine::Row(0), GridLine::Row(top), GridLine::Column((m - 1) / 2)],
            boundary: vec![GridLine::Row(0), GridLine::Row(top)],
            period: PeriodSource::Shift { di: m - 1, dj: 0 },
            closure_tol: 1e-6,
            check_embedding: false,
        }
    }

    #[test]
    fn vertical_unduloid_branch() {
        for c in [1.0, 0.5] {
            let g = fc_period_grid(c, H2RPoint::origin(), 0.0);
            let d = hypotheses_and_axis(&g, &fc_spec(&g));
            assert_eq!(d.axis.class, AxisClass::Vertical);
            assert!(d.axis.alpha < 1e-4);
            assert!(!d.h2_holds);
            assert!(d.period_residual < 1e-4);
            assert!(matches!(d.mirrors[0].plane, MirrorPlane::Vertical { .. }));
            assert!(matches!(d.mirrors[2].plane, MirrorPlane::Horizontal { .. }));
            for f in &d.mirrors {
                assert!(f.deviation < 1e-4 && f.conormal_deviation < 1e-4, "{f:?}");
            }
        }
    }

    #[test]
    fn slope_invariant_under_seed_isometry() {
        let a = fc_period_grid(0.5, H2RPoint::origin(), 0.0);
        let b = fc_period_grid(0.5, H2RPoint::polar(1.3, 0.2, -4.0), 2.0);
        let da = hypotheses_and_axis(&a, &fc_spec(&a));
        let db = hypotheses_and_axis(&b, &fc_spec(&b));
        assert!((da.axis.alpha - db.axis.alpha).abs() < 1e-6);
        assert!((da.axis.shift.abs() - db.axis.shift.abs()).abs() < 1e-6);
        assert_eq!(da.axis.class, db.axis.class);
    }

    #[test]
    fn coincident_closed_planes_fail_h1() {
        let lattice = Lattice { x0: 0.0, y0: 0.0, dx: 0.5, dy: 0.5, nx: 3, ny: 3 };
        let mut samples = Vec::new();
        for j in 0..3 {
            for i in 0..3 {
                let s = 0.5 * i as f64;
                samples.push(SisterSample {
                    point: H2RPoint { h2: [s.cosh(), s.sinh(), 0.0], height: 0.5 * j as f64 },
                    frame: [[s.sinh(), s.cosh(), 0.0, 0.0], [0.0, 0.0, 0.0, 1.0]],
                    normal: [0.0, 0.0, 1.0, 0.0],
                });
            }
        }
        let grid = SisterGrid {
            lattice,
            samples,
            path_residual: 0.0,
            metric_residual: 0.0,
            nu_residual: 0.0,
            tvec_residual: 0.0,
        };
        let d = hypotheses_and_axis(
            &grid,
            &BoundarySpec {
                mirrors: vec![],
                boundary: vec![GridLine::Row(0), GridLine::Row(2)],
                period: PeriodSource::Shift { di: 0, dj: 0 },
                closure_tol: 1e-9,
                check_embedding: false,
            },
        );
        assert_eq!(d.h1.case, PeriodCase::B);
        assert_eq!(d.h1.relation, Some(PlaneRelation::Coincident));
        assert!(!d.h1.holds);
        assert_eq!(d.axis.class, AxisClass::Undetermined);
    }

    #[test]
    fn axis_of_translations() {
        use crate::h2r::{translation_along, H2RGeodesic};
        for alpha in [0.3, 1.0, FRAC_PI_2] {
            let g = H2RGeodesic::new(H2RPoint::polar(0.5, 0.3, 1.0), alpha, [0.0, 1.0, 0.0]).unwrap_or_else(|_| {
                let p = H2RPoint::polar(0.5, 0.3, 1.0);
                let u = crate::h2r::tangent_part(&p.h2, &[0.0, 1.0, 0.0]);
                let n = space_norm(&u);
                H2RGeodesic::new(p, alpha, [u[0] / n, u[1] / n, u[2] / n]).unwrap()
            });
            let r = axis_of(&translation_along(&g, 2.0));
            assert!((r.alpha - alpha).abs() < 1e-9, "{} vs {alpha}", r.alpha);
        }
    }
}
