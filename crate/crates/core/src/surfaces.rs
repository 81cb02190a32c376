//! Closed-form minimal surfaces: spherical helicoids, the neck-size family
//! `f^c`, the Lawson helicoids `f^n`, and the scalar data of their sisters.

use std::f64::consts::{PI, TAU};

use crate::berger::{BergerParams, S3Point};
use crate::error::{GeomError, Result};
use crate::geodesics::SegmentData;
use crate::io::fmt17;

/// Parameters of the helicoid
/// `f(x,y) = (cos(√κx/2) e^{±iκℓy/4τ}, sin(√κx/2) e^{i(φ ± κℓ/4τ)y})`.
#[derive(Clone, Copy, Debug)]
pub struct HelicoidSpec {
    pub params: BergerParams,
    pub ell: f64,
    pub phi: f64,
    pub sign: f64,
}

impl HelicoidSpec {
    /// Validates the pitch and normalizes the angle; `ℓ = 0` forces `φ = π`.
    pub fn new(params: BergerParams, ell: f64, phi: f64, sign: f64) -> Result<Self> {
        let max = params.vertical_length();
        if !(0.0..max).contains(&ell) {
            return Err(GeomError::OutOfDomain { name: "ell", value: ell, domain: format!("[0, {max})") });
        }
        if !phi.is_finite() {
            return Err(GeomError::InvalidParameter(format!("phi = {phi}")));
        }
        let phi = if ell == 0.0 { PI } else { phi.rem_euclid(TAU) };
        Ok(Self { params, ell, phi, sign: if sign < 0.0 { -1.0 } else { 1.0 } })
    }

    /// The helicoid spanned by a pair in normal form.
    pub fn from_segment(params: BergerParams, seg: &SegmentData) -> Result<Self> {
        Self::new(params, seg.ell, seg.phi, seg.sign)
    }

    /// The umbrella bounded by the horizontal geodesic through `(1,0)`.
    pub fn umbrella(params: BergerParams) -> Self {
        Self { params, ell: 0.0, phi: PI, sign: 1.0 }
    }

    pub fn is_umbrella(&self) -> bool {
        self.ell == 0.0
    }
}

pub fn helicoid_point(spec: &HelicoidSpec, x: f64, y: f64) -> Result<S3Point> {
    let sk = spec.params.kappa().sqrt();
    if spec.is_umbrella() && !(x > 0.0 && x < PI / sk) {
        return Err(GeomError::OutOfDomain { name: "x", value: x, domain: format!("(0, {})", PI / sk) });
    }
    if !(-1e-12..=1.0 + 1e-12).contains(&y) {
        return Err(GeomError::OutOfDomain { name: "y", value: y, domain: "[0, 1]".into() });
    }
    Ok(helicoid_raw(spec, x, y))
}

pub fn helicoid_raw(spec: &HelicoidSpec, x: f64, y: f64) -> S3Point {
    let p = &spec.params;
    let a = p.kappa().sqrt() * x / 2.0;
    let s = spec.sign * p.kappa() / (4.0 * p.tau()) * spec.ell * y;
    let b = spec.phi * y + s;
    S3Point::normalized([a.cos() * s.cos(), a.cos() * s.sin(), a.sin() * b.cos(), a.sin() * b.sin()])
}

/// Chordal distance from `p` to the helicoid surface over one x-period and
/// `y ∈ [y0, y1]`: coarse search followed by Gauss-Newton.
pub fn helicoid_surface_distance(spec: &HelicoidSpec, p: &crate::linalg::Vec4, (y0, y1): (f64, f64)) -> f64 {
    let period = spec.params.horizontal_length();
    let f = |x: f64, y: f64| *helicoid_raw(spec, x, y).coords();
    let d2 = |x: f64, y: f64| {
        let q = f(x, y);
        (0..4).map(|k| (q[k] - p[k]).powi(2)).sum::<f64>()
    };
    let (nx, ny) = (96, 24);
    let (mut bx, mut by, mut best) = (0.0, y0, f64::INFINITY);
    for i in 0..nx {
        for j in 0..=ny {
            let (x, y) = (period * i as f64 / nx as f64, y0 + (y1 - y0) * j as f64 / ny as f64);
            let d = d2(x, y);
            if d < best {
                (bx, by, best) = (x, y, d);
            }
        }
    }
    let h = 1e-6;
    for _ in 0..30 {
        let q = f(bx, by);
        let fx = f(bx + h, by);
        let fy = f(bx, by + h);
        let mut jx = [0.0; 4];
        let mut jy = [0.0; 4];
        let mut r = [0.0; 4];
        for k in 0..4 {
            jx[k] = (fx[k] - q[k]) / h;
            jy[k] = (fy[k] - q[k]) / h;
            r[k] = q[k] - p[k];
        }
        let dot = |a: &[f64; 4], b: &[f64; 4]| (0..4).map(|k| a[k] * b[k]).sum::<f64>();
        let (a, b, c) = (dot(&jx, &jx), dot(&jx, &jy), dot(&jy, &jy));
        let det = a * c - b * b;
        if det.abs() < 1e-300 {
            break;
        }
        let (gx, gy) = (dot(&jx, &r), dot(&jy, &r));
        let dx = (c * gx - b * gy) / det;
        let dy = (a * gy - b * gx) / det;
        let (nx, ny) = (bx - dx, (by - dy).clamp(y0, y1));
        let d = d2(nx, ny);
        if d >= best {
            break;
        }
        (bx, by, best) = (nx, ny, d);
    }
    best.sqrt()
}

/// Embeddedness on one period, following the interval `ℓ ∈ (0, 4τπ/κ]`
/// with the umbrella `ℓ = 0` included.
pub fn helicoid_is_embedded(spec: &HelicoidSpec) -> bool {
    let bound = spec.params.vertical_length() / 2.0;
    spec.ell <= bound * (1.0 + 1e-12)
}

/// The family `f^c` in `S³(4H²−1, H)`.
#[derive(Clone, Copy, Debug)]
pub struct FcSpec {
    pub h: f64,
    pub c: f64,
    pub params: BergerParams,
}

impl FcSpec {
    pub fn new(h: f64, c: f64) -> Result<Self> {
        if !(h > 0.5) || !h.is_finite() {
            return Err(GeomError::OutOfDomain { name: "H", value: h, domain: "(1/2, inf)".into() });
        }
        if !(0.0..=1.0).contains(&c) {
            return Err(GeomError::OutOfDomain { name: "c", value: c, domain: "[0, 1]".into() });
        }
        Ok(Self { h, c, params: BergerParams::from_mean_curvature(h)? })
    }

    /// The vertical axis `x = π/√κ`.
    pub fn axis_x(&self) -> f64 {
        PI / self.params.kappa().sqrt()
    }

    /// `f^c(·, y)` as a helicoid over `y ∈ [0, 1]` for `y` up to `span`.
    pub fn as_helicoid(&self, span: f64) -> Result<HelicoidSpec> {
        let w = self.params.kappa() / (4.0 * self.params.tau());
        HelicoidSpec::new(self.params, self.c * span, (self.c + 1.0) * w * span, -1.0)
    }
}

/// `f^c(x,y) = (cos(√κx/2) e^{-icκy/4τ}, sin(√κx/2) e^{iκy/4τ})`. For
/// `c = 0` the meridians through `x ≡ 0 mod 2π/√κ` collapse and are excluded.
pub fn fc_point(spec: &FcSpec, x: f64, y: f64) -> Result<S3Point> {
    if spec.c == 0.0 {
        let period = 2.0 * PI / spec.params.kappa().sqrt();
        let r = x.rem_euclid(period);
        if r < 1e-12 * period || period - r < 1e-12 * period {
            return Err(GeomError::OutOfDomain {
                name: "x",
                value: x,
                domain: format!("R minus multiples of {period}"),
            });
        }
    }
    Ok(fc_raw(spec, x, y))
}

pub fn fc_raw(spec: &FcSpec, x: f64, y: f64) -> S3Point {
    let p = &spec.params;
    let a = p.kappa().sqrt() * x / 2.0;
    let w = p.kappa() / (4.0 * p.tau()) * y;
    let s = -spec.c * w;
    S3Point::normalized([a.cos() * s.cos(), a.cos() * s.sin(), a.sin() * w.cos(), a.sin() * w.sin()])
}

/// Shape operator of `f^c` on its axis in the basis `(∂x, ∂y)`:
/// `[[0, m], [m, 0]]` with `m = (c−1)κ/(4τ) + τ`.
pub fn fc_shape_operator(spec: &FcSpec, _y: f64) -> [[f64; 2]; 2] {
    let p = &spec.params;
    let m = (spec.c - 1.0) * p.kappa() / (4.0 * p.tau()) + p.tau();
    [[0.0, m], [m, 0.0]]
}

/// `k = 2H + (c−1)(4H²−1)/(4H)`, the curvature of the sister neck.
pub fn k_neck(h: f64, c: f64) -> f64 {
    2.0 * h + (c - 1.0) * (4.0 * h * h - 1.0) / (4.0 * h)
}

/// `T = π/√(k²−1)`.
pub fn t_half(h: f64, c: f64) -> f64 {
    let k = k_neck(h, c);
    PI / ((k - 1.0) * (k + 1.0)).sqrt()
}

/// `𝒯(c) = (c+1)(4H²−1)/(4H) · π/√(k²−1)`, the angle between the boundary
/// fields of the half unduloid.
pub fn tcal(h: f64, c: f64) -> f64 {
    let k = k_neck(h, c);
    (c + 1.0) * (4.0 * h * h - 1.0) / (4.0 * h) / ((k - 1.0) * (k + 1.0)).sqrt() * PI
}

/// `α₀ = 4Hπ/((c+1)(4H²−1))`.
pub fn alpha0(h: f64, c: f64) -> f64 {
    4.0 * h * PI / ((c + 1.0) * (4.0 * h * h - 1.0))
}

/// The open interval `(0, 2α₀)` of boundary offsets.
pub fn alpha_interval(h: f64, c: f64) -> (f64, f64) {
    (0.0, 2.0 * alpha0(h, c))
}

#[derive(Clone, Copy, Debug)]
pub struct SisterProfile {
    pub h: f64,
    pub k_neck: f64,
    pub t_half: f64,
    pub alpha0: f64,
}

impl SisterProfile {
    /// `𝒯` at fixed `H`.
    pub fn tcal(&self, c: f64) -> f64 {
        tcal(self.h, c)
    }
}

pub fn sister_profile(spec: &FcSpec) -> SisterProfile {
    SisterProfile {
        h: spec.h,
        k_neck: k_neck(spec.h, spec.c),
        t_half: t_half(spec.h, spec.c),
        alpha0: alpha0(spec.h, spec.c),
    }
}

/// `f^n(x,y) = (cos x e^{-iny}, sin x e^{i(2π−n)y})` in the round sphere.
pub fn lawson_point(n: f64, x: f64, y: f64) -> S3Point {
    let (s1, s2) = (-n * y, (TAU - n) * y);
    S3Point::normalized([x.cos() * s1.cos(), x.cos() * s1.sin(), x.sin() * s2.cos(), x.sin() * s2.sin()])
}

/// The helicoid carrying `f^n`: `f^n(x, y) = f(x, 2y)`.
pub fn lawson_helicoid(n: f64) -> Result<HelicoidSpec> {
    HelicoidSpec::new(BergerParams::round(), n / 2.0, PI, -1.0)
}

/// `Φ_θ(z,w) = (cos(θ/2) z − sin(θ/2) w, sin(θ/2) z + cos(θ/2) w)`.
pub fn s3_flow(theta: f64, p: &S3Point) -> S3Point {
    S3Point::normalized(crate::linalg::mat4_vec(&s3_flow_matrix(theta), p.coords()))
}

pub fn s3_flow_matrix(theta: f64) -> crate::linalg::Mat4 {
    let (s, c) = (theta / 2.0).sin_cos();
    [[c, 0.0, -s, 0.0], [0.0, c, 0.0, -s], [s, 0.0, c, 0.0], [0.0, s, 0.0, c]]
}

/// CSV with columns `H,c,k_neck,T_half,Tcal,alpha0` over the product grid.
pub fn tables_csv(hs: &[f64], cs: &[f64]) -> Result<String> {
    let mut out = String::from("H,c,k_neck,T_half,Tcal,alpha0\n");
    for &h in hs {
        for &c in cs {
            let spec = FcSpec::new(h, c)?;
            let pr = sister_profile(&spec);
            let row = [h, c, pr.k_neck, pr.t_half, pr.tcal(c), pr.alpha0];
            out.push_str(&row.iter().map(|v| fmt17(*v)).collect::<Vec<_>>().join(","));
            out.push('\n');
        }
    }
    Ok(out)
}
