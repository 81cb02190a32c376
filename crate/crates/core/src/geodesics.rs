//! Vertical (Hopf fibre) and horizontal geodesics, disjointness testing and
//! the vertical segment joining two horizontal geodesics.

use std::f64::consts::{PI, TAU};

use crate::berger::{hopf_project_raw, quat_mul_raw, BergerParams, S3Point};
use crate::error::{GeomError, Result};
use crate::isometry::{check_isometry, left_translation_matrix, AmbientIsometry};
use crate::linalg::{axpy4, cross3, dist4, dot3, dot4, mat4_mul, norm3, normalize4, scale3, scale4, sub3, Mat4, Vec4};

/// `v(s) = (e^{iκs/4τ} z, e^{-iκs/4τ} w)`, the unit-speed fibre through `p`.
pub fn vertical_geodesic(params: &BergerParams, p: &S3Point, s: f64) -> S3Point {
    S3Point::normalized(vertical_raw(params, p.coords(), s))
}

pub(crate) fn vertical_raw(params: &BergerParams, p: &Vec4, s: f64) -> Vec4 {
    let sigma = params.kappa() / (4.0 * params.tau()) * s;
    let (sn, cs) = sigma.sin_cos();
    let [a, b, c, d] = *p;
    [cs * a - sn * b, sn * a + cs * b, cs * c + sn * d, -sn * c + cs * d]
}

/// `h(t) = cos(√κt/2) p + (2/√κ) sin(√κt/2) F_φ(p)`.
pub fn horizontal_geodesic(params: &BergerParams, p: &S3Point, phi: f64, t: f64) -> S3Point {
    S3Point::normalized(horizontal_raw(params, p.coords(), phi, t))
}

pub(crate) fn horizontal_raw(params: &BergerParams, p: &Vec4, phi: f64, t: f64) -> Vec4 {
    let u = horizontal_unit(p, phi);
    let theta = params.kappa().sqrt() / 2.0 * t;
    axpy4(&scale4(theta.cos(), p), theta.sin(), &u)
}

/// Unit R⁴ direction of `F_φ` at `p`: `cos φ · p j + sin φ · p k`.
pub(crate) fn horizontal_unit(p: &Vec4, phi: f64) -> Vec4 {
    let pj = quat_mul_raw(p, &[0.0, 0.0, 1.0, 0.0]);
    let pk = quat_mul_raw(p, &[0.0, 0.0, 0.0, 1.0]);
    axpy4(&scale4(phi.cos(), &pj), phi.sin(), &pk)
}

/// A great circle `θ ↦ p cos θ + q sin θ` of S³ with `(p, q)` orthonormal.
/// Horizontal and vertical geodesics are both great circles.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct GreatCircle {
    pub p: Vec4,
    pub q: Vec4,
}

impl GreatCircle {
    pub fn new(p: Vec4, q: Vec4) -> Self {
        let p = normalize4(&p);
        let q = normalize4(&axpy4(&q, -dot4(&q, &p), &p));
        Self { p, q }
    }

    /// Accepts an already orthonormal pair unchanged.
    pub fn from_orthonormal(p: Vec4, q: Vec4, tol: f64) -> Option<Self> {
        let ok = (dot4(&p, &p) - 1.0).abs() < tol && (dot4(&q, &q) - 1.0).abs() < tol && dot4(&p, &q).abs() < tol;
        ok.then_some(Self { p, q })
    }

    pub fn eval(&self, theta: f64) -> Vec4 {
        axpy4(&scale4(theta.cos(), &self.p), theta.sin(), &self.q)
    }

    /// Angle of the closest point on the circle.
    pub fn param_of(&self, x: &Vec4) -> f64 {
        dot4(x, &self.q).atan2(dot4(x, &self.p))
    }

    /// Chordal distance from `x` to the circle.
    pub fn distance(&self, x: &Vec4) -> f64 {
        dist4(x, &self.eval(self.param_of(x)))
    }

    /// True when both circles are the same set (orientation ignored).
    pub fn same_set(&self, other: &GreatCircle, tol: f64) -> bool {
        self.distance(&other.p) < tol && self.distance(&other.q) < tol
    }

    pub fn transformed(&self, m: &Mat4) -> Self {
        let p = crate::linalg::mat4_vec(m, &self.p);
        let q = crate::linalg::mat4_vec(m, &self.q);
        Self::new(p, q)
    }
}

#[derive(Clone, Copy, Debug)]
pub struct VerticalGeodesic {
    pub params: BergerParams,
    pub base: S3Point,
}

impl VerticalGeodesic {
    pub fn eval(&self, s: f64) -> S3Point {
        vertical_geodesic(&self.params, &self.base, s)
    }

    pub fn great_circle(&self) -> GreatCircle {
        let xi = self.params.frame_raw(self.base.coords())[2];
        GreatCircle::new(*self.base.coords(), scale4(self.params.tau().signum(), &xi))
    }
}

/// Horizontal geodesic through `base` with field `F_φ`, traversed in the
/// direction `orient ∈ {+1, -1}`.
#[derive(Clone, Copy, Debug)]
pub struct HorizontalGeodesic {
    pub params: BergerParams,
    pub base: S3Point,
    pub phi: f64,
    pub orient: f64,
}

impl HorizontalGeodesic {
    pub fn new(params: BergerParams, base: S3Point, phi: f64, orient: f64) -> Self {
        Self { params, base, phi, orient: if orient < 0.0 { -1.0 } else { 1.0 } }
    }

    pub fn eval(&self, t: f64) -> S3Point {
        horizontal_geodesic(&self.params, &self.base, self.phi, self.orient * t)
    }

    /// Angle of the tangent field including orientation, in [0, 2π).
    pub fn field_angle(&self) -> f64 {
        let a = if self.orient < 0.0 { self.phi + PI } else { self.phi };
        a.rem_euclid(TAU)
    }

    pub fn great_circle(&self) -> GreatCircle {
        GreatCircle::new(*self.base.coords(), horizontal_unit(self.base.coords(), self.field_angle()))
    }

    /// Curve parameter of a point lying on the geodesic.
    pub fn param_of(&self, x: &Vec4) -> f64 {
        self.great_circle().param_of(x) * 2.0 / self.params.kappa().sqrt()
    }
}

/// Outcome of a disjointness test.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Linkage {
    Linked,
    NotLinked,
    Indeterminate,
}

#[derive(Clone, Copy, Debug)]
pub struct LinkReport {
    pub status: Linkage,
    pub min_distance: f64,
}

/// Chordal separation above which two curves count as disjoint.
pub const LINK_THRESHOLD: f64 = 1e-6;
/// Separation below which two curves count as intersecting.
pub const INTERSECT_THRESHOLD: f64 = 1e-8;
/// Smallest accepted grid size per curve.
pub const MIN_LINK_SAMPLES: usize = 64;

/// Disjointness of two horizontal geodesics by coarse-to-fine minimization
/// of the chordal distance over both parameter circles. Linked here means
/// disjoint.
pub fn are_linked(h1: &HorizontalGeodesic, h2: &HorizontalGeodesic, samples: usize) -> LinkReport {
    let n = samples.max(MIN_LINK_SAMPLES);
    let c1 = h1.great_circle();
    let c2 = h2.great_circle();
    let dist = |a: f64, b: f64| dist4(&c1.eval(a), &c2.eval(b));

    let step = TAU / n as f64;
    let mut grid = vec![0.0; n * n];
    for i in 0..n {
        for j in 0..n {
            grid[i * n + j] = dist(i as f64 * step, j as f64 * step);
        }
    }
    // local minima of the periodic grid seed the refinement
    let mut seeds: Vec<(f64, usize, usize)> = Vec::new();
    for i in 0..n {
        for j in 0..n {
            let d = grid[i * n + j];
            let mut is_min = true;
            'nb: for di in [n - 1, 0, 1] {
                for dj in [n - 1, 0, 1] {
                    if (di, dj) == (0, 0) {
                        continue;
                    }
                    if grid[((i + di) % n) * n + (j + dj) % n] < d {
                        is_min = false;
                        break 'nb;
                    }
                }
            }
            if is_min {
                seeds.push((d, i, j));
            }
        }
    }
    seeds.sort_by(|a, b| a.0.total_cmp(&b.0));
    seeds.truncate(8);

    let mut best = f64::INFINITY;
    for &(d0, i, j) in &seeds {
        let (mut a, mut b) = (i as f64 * step, j as f64 * step);
        let mut width = step;
        let mut d = d0;
        for _ in 0..40 {
            let m = 8;
            let h = 2.0 * width / m as f64;
            let (mut ba, mut bb) = (a, b);
            for u in 0..=m {
                for v in 0..=m {
                    let aa = a - width + u as f64 * h;
                    let bbv = b - width + v as f64 * h;
                    let dd = dist(aa, bbv);
                    if dd < d {
                        d = dd;
                        ba = aa;
                        bb = bbv;
                    }
                }
            }
            a = ba;
            b = bb;
            width = h;
            if width < 1e-14 {
                break;
            }
        }
        best = best.min(d);
    }
    let status = if best > LINK_THRESHOLD {
        Linkage::Linked
    } else if best < INTERSECT_THRESHOLD {
        Linkage::NotLinked
    } else {
        Linkage::Indeterminate
    };
    LinkReport { status, min_distance: best }
}

/// Normal form of a pair of horizontal geodesics: after the isometry
/// [`SegmentData::normalizing_isometry`] the first curve is `h(t)` through
/// `(1,0)` with field `E1`, and the second passes through `v(sign·ℓ)` with
/// field `F_φ`.
#[derive(Clone, Copy, Debug)]
pub struct SegmentData {
    pub ell: f64,
    pub phi: f64,
    pub sign: f64,
    /// Start of the vertical segment, on the first curve.
    pub anchor: S3Point,
    /// End of the vertical segment, on the second curve.
    pub end: S3Point,
    /// Field angle of the first curve.
    pub phi1: f64,
}

/// `(z, w) ↦ (z, e^{iθ} w)`: rotation about the fibre through `(1, 0)`.
pub fn vertical_rotation_matrix(theta: f64) -> Mat4 {
    let (s, c) = theta.sin_cos();
    [[1.0, 0.0, 0.0, 0.0], [0.0, 1.0, 0.0, 0.0], [0.0, 0.0, c, -s], [0.0, 0.0, s, c]]
}

impl SegmentData {
    /// Isometry mapping the normal-form picture to the actual curves:
    /// `L_anchor ∘ R_{φ1}`.
    pub fn normalizing_isometry(&self, params: &BergerParams) -> AmbientIsometry {
        let m = mat4_mul(&left_translation_matrix(self.anchor.coords()), &vertical_rotation_matrix(self.phi1));
        check_isometry(params, &m).expect("left translation and fibre rotation are isometries")
    }
}

/// Finds the shortest vertical segment joining two horizontal geodesics.
/// `ℓ` is the shorter fibre arc, so `ℓ ≤ 2|τ|π/κ`; `φ` is the relative field
/// angle. Intersecting but distinct curves are rejected.
pub fn connecting_vertical_segment(
    params: &BergerParams,
    h1: &HorizontalGeodesic,
    h2: &HorizontalGeodesic,
) -> Result<SegmentData> {
    let c1 = h1.great_circle();
    let c2 = h2.great_circle();
    let proj = |c: &GreatCircle| {
        let at = |th: f64| hopf_project_raw(params, &c.eval(th));
        let b = scale3(0.5, &sub3(&at(0.0), &at(PI / 2.0)));
        let cc = scale3(0.5, &sub3(&at(PI / 4.0), &at(3.0 * PI / 4.0)));
        (b, cc)
    };
    let (b1, cc1) = proj(&c1);
    let (b2, cc2) = proj(&c2);
    let n1 = cross3(&b1, &cc1);
    let n2 = cross3(&b2, &cc2);
    let mut x = cross3(&n1, &n2);
    if norm3(&x) < 1e-12 * norm3(&n1) * norm3(&n2) {
        x = b1;
    }
    let phi1 = h1.field_angle();
    let phi = (h2.field_angle() - phi1).rem_euclid(TAU);
    let period_factor = 4.0 * params.tau() / params.kappa();

    let mut best: Option<(f64, Vec4, Vec4)> = None;
    for dir in [1.0, -1.0] {
        let xd = scale3(dir, &x);
        let th1 = dot3(&xd, &cc1).atan2(dot3(&xd, &b1)) / 2.0;
        let th2 = dot3(&xd, &cc2).atan2(dot3(&xd, &b2)) / 2.0;
        let q1 = c1.eval(th1);
        let q2 = c2.eval(th2);
        // q2 = q1 · e^{iσ} on a common fibre
        let inv = [q1[0], -q1[1], -q1[2], -q1[3]];
        let r = quat_mul_raw(&inv, &q2);
        let sigma0 = r[1].atan2(r[0]);
        for (shift, end) in [(0.0, q2), (PI, scale4(-1.0, &q2))] {
            let sigma = (sigma0 + shift + PI).rem_euclid(TAU) - PI;
            let s = period_factor * sigma;
            if best.as_ref().is_none_or(|(bs, _, _)| s.abs() < bs.abs() - 1e-15) {
                best = Some((s, q1, end));
            }
        }
    }
    let (s, q1, q2) = best.expect("two candidates");
    let ell = s.abs();
    let sign = if s < 0.0 { -1.0 } else { 1.0 };
    let scale = params.vertical_length();
    if ell < 1e-9 * scale {
        let same = phi.min(TAU - phi) < 1e-9 || (phi - PI).abs() < 1e-9;
        if !same {
            return Err(GeomError::IntersectingGeodesics);
        }
        let phi = if phi.min(TAU - phi) < 1e-9 { 0.0 } else { PI };
        return Ok(SegmentData {
            ell: 0.0,
            phi,
            sign: 1.0,
            anchor: S3Point::normalized(q1),
            end: S3Point::normalized(q2),
            phi1,
        });
    }
    Ok(SegmentData { ell, phi, sign, anchor: S3Point::normalized(q1), end: S3Point::normalized(q2), phi1 })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::sampling::{random_point, rng};

    fn params() -> BergerParams {
        BergerParams::new(3.0, 1.0).unwrap()
    }

    #[test]
    fn closure_lengths() {
        let p = params();
        let mut r = rng(2);
        for _ in 0..20 {
            let q = random_point(&mut r);
            let v = vertical_geodesic(&p, &q, p.vertical_length());
            assert!(dist4(v.coords(), q.coords()) < 1e-10);
            let h = horizontal_geodesic(&p, &q, 0.7, p.horizontal_length());
            assert!(dist4(h.coords(), q.coords()) < 1e-10);
            assert!(dist4(vertical_geodesic(&p, &q, 0.0).coords(), q.coords()) < 1e-15);
        }
    }

    #[test]
    fn horizontal_through_identity() {
        let p = params();
        let t = 0.37;
        let h = horizontal_geodesic(&p, &S3Point::identity(), 0.0, t);
        let a = 3f64.sqrt() * t / 2.0;
        assert!(dist4(h.coords(), &[a.cos(), 0.0, a.sin(), 0.0]) < 1e-15);
    }

    #[test]
    fn vertical_tangent_is_xi() {
        let p = params();
        let q = random_point(&mut rng(4));
        let s = 0.8;
        let h = 1e-5;
        let d = scale4(
            0.5 / h,
            &crate::linalg::sub4(vertical_geodesic(&p, &q, s + h).coords(), vertical_geodesic(&p, &q, s - h).coords()),
        );
        let xi = p.frame_raw(vertical_geodesic(&p, &q, s).coords())[2];
        assert!(dist4(&d, &xi) < 1e-6);
    }

    #[test]
    fn self_pair_is_not_linked_and_has_zero_segment() {
        let p = params();
        let h = HorizontalGeodesic::new(p, random_point(&mut rng(8)), 1.1, 1.0);
        assert_eq!(are_linked(&h, &h, 64).status, Linkage::NotLinked);
        let seg = connecting_vertical_segment(&p, &h, &h).unwrap();
        assert_eq!(seg.ell, 0.0);
        assert_eq!(seg.phi, 0.0);
    }

    #[test]
    fn intersecting_pair_rejected() {
        let p = params();
        let base = random_point(&mut rng(9));
        let h1 = HorizontalGeodesic::new(p, base, 0.0, 1.0);
        let h2 = HorizontalGeodesic::new(p, base, 1.0, 1.0);
        assert!(matches!(connecting_vertical_segment(&p, &h1, &h2), Err(GeomError::IntersectingGeodesics)));
    }
}
