//! H²×R in the hyperboloid model: points, slope geodesics, translations,
//! vertical planes and the geometry of hyperbolic circles.

use std::f64::consts::PI;

use crate::error::{GeomError, Result};
use crate::io::fmt17;
use crate::linalg::{add3, cross3, mat3_mul, mat3_vec, scale3, sub3, Mat3, Vec3};

/// `⟨x,y⟩ = −x0 y0 + x1 y1 + x2 y2`.
#[inline]
pub fn lorentz_dot(x: &Vec3, y: &Vec3) -> f64 {
    -x[0] * y[0] + x[1] * y[1] + x[2] * y[2]
}

/// `J(x × y)`, Lorentz-orthogonal to both arguments.
pub fn lorentz_cross(x: &Vec3, y: &Vec3) -> Vec3 {
    let c = cross3(x, y);
    [-c[0], c[1], c[2]]
}

/// Projects `v` to the tangent plane of the hyperboloid at `x`.
pub fn tangent_part(x: &Vec3, v: &Vec3) -> Vec3 {
    add3(v, &scale3(lorentz_dot(v, x), x))
}

/// Lorentz norm of a spacelike vector.
pub fn space_norm(v: &Vec3) -> f64 {
    lorentz_dot(v, v).max(0.0).sqrt()
}

/// Hyperbolic distance between two hyperboloid points.
pub fn h2_distance(x: &Vec3, y: &Vec3) -> f64 {
    (-lorentz_dot(x, y)).max(1.0).acosh()
}

pub const HYPERBOLOID_TOL: f64 = 1e-10;

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct H2RPoint {
    pub h2: Vec3,
    pub height: f64,
}

impl H2RPoint {
    pub fn new(h2: Vec3, height: f64) -> Result<Self> {
        let n = lorentz_dot(&h2, &h2);
        if (n + 1.0).abs() > HYPERBOLOID_TOL || h2[0] <= 0.0 {
            return Err(GeomError::InvalidParameter(format!("not on the upper hyperboloid: <x,x> = {n}")));
        }
        Ok(Self { h2, height })
    }

    /// Rescales onto the upper sheet.
    pub fn normalized(h2: Vec3, height: f64) -> Self {
        Self { h2: normalize_h2(&h2), height }
    }

    pub fn origin() -> Self {
        Self { h2: [1.0, 0.0, 0.0], height: 0.0 }
    }

    /// Point at hyperbolic polar coordinates `(r, θ)` about the origin.
    pub fn polar(r: f64, theta: f64, height: f64) -> Self {
        Self { h2: [r.cosh(), r.sinh() * theta.cos(), r.sinh() * theta.sin()], height }
    }
}

pub fn normalize_h2(x: &Vec3) -> Vec3 {
    let n = (-lorentz_dot(x, x)).sqrt();
    let s = if x[0] < 0.0 { -1.0 / n } else { 1.0 / n };
    scale3(s, x)
}

/// Unit-speed geodesic with slope `α` against the vertical.
#[derive(Clone, Copy, Debug)]
pub struct H2RGeodesic {
    pub start: H2RPoint,
    pub alpha: f64,
    /// Unit tangent of the H² projection at `start`.
    pub dir: Vec3,
}

impl H2RGeodesic {
    pub fn new(start: H2RPoint, alpha: f64, dir: Vec3) -> Result<Self> {
        if !(0.0..=PI / 2.0 + 1e-12).contains(&alpha) {
            return Err(GeomError::OutOfDomain { name: "alpha", value: alpha, domain: "[0, pi/2]".into() });
        }
        let t = tangent_part(&start.h2, &dir);
        let n = space_norm(&t);
        if n < 1e-14 {
            return Err(GeomError::Degenerate("zero horizontal direction".into()));
        }
        Ok(Self { start, alpha, dir: scale3(1.0 / n, &t) })
    }

    pub fn eval(&self, s: f64) -> H2RPoint {
        h2r_geodesic(self, s)
    }

    pub fn plane(&self) -> VerticalPlane {
        VerticalPlane { point: self.start.h2, dir: self.dir }
    }
}

pub fn h2r_geodesic(g: &H2RGeodesic, s: f64) -> H2RPoint {
    let d = s * g.alpha.sin();
    let x = add3(&scale3(d.cosh(), &g.start.h2), &scale3(d.sinh(), &g.dir));
    H2RPoint::normalized(x, g.start.height + s * g.alpha.cos())
}

/// An isometry `(x, h) ↦ (A x, σ h + t)` with `A` in O⁺(2,1).
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct H2RIsometry {
    pub lorentz: Mat3,
    pub height_sign: f64,
    pub height_shift: f64,
}

const I3: Mat3 = [[1.0, 0.0, 0.0], [0.0, 1.0, 0.0], [0.0, 0.0, 1.0]];

impl H2RIsometry {
    pub fn identity() -> Self {
        Self { lorentz: I3, height_sign: 1.0, height_shift: 0.0 }
    }

    pub fn apply(&self, p: &H2RPoint) -> H2RPoint {
        H2RPoint::normalized(mat3_vec(&self.lorentz, &p.h2), self.height_sign * p.height + self.height_shift)
    }

    /// Pushes a tangent vector `(v, dh)`.
    pub fn push(&self, v: &Vec3, dh: f64) -> (Vec3, f64) {
        (mat3_vec(&self.lorentz, v), self.height_sign * dh)
    }

    /// `self ∘ other`.
    pub fn compose(&self, other: &H2RIsometry) -> H2RIsometry {
        H2RIsometry {
            lorentz: mat3_mul(&self.lorentz, &other.lorentz),
            height_sign: self.height_sign * other.height_sign,
            height_shift: self.height_sign * other.height_shift + self.height_shift,
        }
    }

    pub fn inverse(&self) -> H2RIsometry {
        // A⁻¹ = J Aᵀ J for Lorentz matrices
        let a = &self.lorentz;
        let j = [-1.0, 1.0, 1.0];
        let mut inv = [[0.0; 3]; 3];
        for i in 0..3 {
            for k in 0..3 {
                inv[i][k] = j[i] * a[k][i] * j[k];
            }
        }
        H2RIsometry { lorentz: inv, height_sign: self.height_sign, height_shift: -self.height_sign * self.height_shift }
    }

    pub fn max_diff(&self, other: &H2RIsometry) -> f64 {
        let mut m = (self.height_shift - other.height_shift).abs().max((self.height_sign - other.height_sign).abs());
        for i in 0..3 {
            for k in 0..3 {
                m = m.max((self.lorentz[i][k] - other.lorentz[i][k]).abs());
            }
        }
        m
    }

    /// Reflection in the horizontal plane at height `h0`.
    pub fn horizontal_reflection(h0: f64) -> Self {
        Self { lorentz: I3, height_sign: -1.0, height_shift: 2.0 * h0 }
    }

    /// Reflection in a vertical plane `Γ×R`.
    pub fn vertical_reflection(plane: &VerticalPlane) -> Self {
        let m = plane.normal();
        let mut a = I3;
        let mj = [-m[0], m[1], m[2]];
        for i in 0..3 {
            for k in 0..3 {
                a[i][k] -= 2.0 * m[i] * mj[k];
            }
        }
        Self { lorentz: a, height_sign: 1.0, height_shift: 0.0 }
    }
}

/// Lorentz boost translating distance `d` along the geodesic through `p`
/// with unit direction `u`.
pub fn boost(p: &Vec3, u: &Vec3, d: f64) -> Mat3 {
    let (sh, ch) = (d.sinh(), d.cosh());
    let mut m = [[0.0; 3]; 3];
    for k in 0..3 {
        let mut e = [0.0; 3];
        e[k] = 1.0;
        let a = -lorentz_dot(&e, p);
        let b = lorentz_dot(&e, u);
        let rest = sub3(&sub3(&e, &scale3(a, p)), &scale3(b, u));
        let img = add3(&add3(&scale3(a * ch + b * sh, p), &scale3(a * sh + b * ch, u)), &rest);
        for i in 0..3 {
            m[i][k] = img[i];
        }
    }
    m
}

/// `Φ_s(p, h) = (ψ_{s sin α}(p), h + s cos α)`.
pub fn translation_along(g: &H2RGeodesic, s: f64) -> H2RIsometry {
    H2RIsometry {
        lorentz: boost(&g.start.h2, &g.dir, s * g.alpha.sin()),
        height_sign: 1.0,
        height_shift: s * g.alpha.cos(),
    }
}

/// True when two geodesics induce the same translations up to `tol`
/// (compared at unit parameter).
pub fn generate_same_translations(g1: &H2RGeodesic, g2: &H2RGeodesic, tol: f64) -> bool {
    translation_along(g1, 1.0).max_diff(&translation_along(g2, 1.0)) < tol
}

/// The vertical plane `Γ×R` over the H² geodesic through `point` with
/// direction `dir`.
#[derive(Clone, Copy, Debug)]
pub struct VerticalPlane {
    pub point: Vec3,
    pub dir: Vec3,
}

impl VerticalPlane {
    /// Spacelike unit normal `m` with `Γ = {⟨x, m⟩ = 0}`.
    pub fn normal(&self) -> Vec3 {
        let m = lorentz_cross(&self.point, &self.dir);
        scale3(1.0 / space_norm(&m), &m)
    }

    /// The two ideal endpoints as null vectors with `x0 = 1`.
    pub fn ideal_endpoints(&self) -> (Vec3, Vec3) {
        let a = add3(&self.point, &self.dir);
        let b = sub3(&self.point, &self.dir);
        (scale3(1.0 / a[0], &a), scale3(1.0 / b[0], &b))
    }

    /// Hyperbolic distance from an H² point to `Γ`.
    pub fn distance(&self, x: &Vec3) -> f64 {
        lorentz_dot(x, &self.normal()).abs().asinh()
    }
}

/// Geodesic curvature of a sampled planar curve on the hyperboloid, from
/// 5-point centered differences in the sample index. Open curves yield
/// values for samples `2..n-2`; closed curves for all samples.
pub fn geodesic_curvature_h2(pts: &[Vec3], closed: bool) -> Result<Vec<f64>> {
    let n = pts.len();
    if n < 5 {
        return Err(GeomError::Degenerate(format!("{n} samples, need at least 5")));
    }
    let at = |i: isize| -> &Vec3 { &pts[i.rem_euclid(n as isize) as usize] };
    let range: Vec<isize> = if closed { (0..n as isize).collect() } else { (2..n as isize - 2).collect() };
    let mut out = Vec::with_capacity(range.len());
    for i in range {
        let (m2, m1, p1, p2) = (at(i - 2), at(i - 1), at(i + 1), at(i + 2));
        let x = at(i);
        let mut d1 = [0.0; 3];
        let mut d2 = [0.0; 3];
        for k in 0..3 {
            d1[k] = (m2[k] - 8.0 * m1[k] + 8.0 * p1[k] - p2[k]) / 12.0;
            d2[k] = (-m2[k] + 16.0 * m1[k] - 30.0 * x[k] + 16.0 * p1[k] - p2[k]) / 12.0;
        }
        let d1 = tangent_part(x, &d1);
        let speed2 = lorentz_dot(&d1, &d1);
        if !(speed2 > 1e-28) {
            return Err(GeomError::Degenerate(format!("repeated sample at index {i}")));
        }
        let nrm = scale3(1.0 / speed2.sqrt(), &lorentz_cross(x, &d1));
        out.push(lorentz_dot(&d2, &nrm) / speed2);
    }
    Ok(out)
}

/// Sum of hyperbolic distances between consecutive samples.
pub fn polyline_length_h2(pts: &[Vec3], closed: bool) -> f64 {
    let mut l: f64 = pts.windows(2).map(|w| h2_distance(&w[0], &w[1])).sum();
    if closed && pts.len() > 1 {
        l += h2_distance(&pts[pts.len() - 1], &pts[0]);
    }
    l
}

#[derive(Clone, Copy, Debug)]
pub struct CircleGeometry {
    pub radius: f64,
    pub length: f64,
    pub area: f64,
}

/// Radius `acoth k`, circumference `2π sinh R` and area `2π(cosh R − 1)` of
/// the hyperbolic circle of curvature `k > 1`.
pub fn circle_geometry(k: f64) -> Result<CircleGeometry> {
    if !(k > 1.0) || !k.is_finite() {
        return Err(GeomError::OutOfDomain { name: "k", value: k, domain: "(1, inf)".into() });
    }
    let s = ((k - 1.0) * (k + 1.0)).sqrt();
    let radius = 0.5 * ((k + 1.0) / (k - 1.0)).ln();
    Ok(CircleGeometry { radius, length: 2.0 * PI / s, area: 2.0 * PI * (k / s - 1.0) })
}

/// CSV with columns `x0,x1,x2,height`.
pub fn h2r_csv(pts: &[H2RPoint]) -> String {
    let mut out = String::from("x0,x1,x2,height\n");
    for p in pts {
        let row = [p.h2[0], p.h2[1], p.h2[2], p.height];
        out.push_str(&row.iter().map(|v| fmt17(*v)).collect::<Vec<_>>().join(","));
        out.push('\n');
    }
    out
}
