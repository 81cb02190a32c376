//! The Berger sphere S³(κ,τ): unit quaternions with the squashed metric, its
//! left-invariant orthonormal frame and the Hopf fibration onto S²(κ).
//!
//! Points are stored as 4-vectors `(a, b, c, d)` and identified with the
//! quaternion `a + b i + c j + d k` and the complex pair
//! `(z, w) = (a + i b, c + i d)`.
//!
//! Sign conventions: the frame is `E1 = (√κ/2) p·j`, `E2 = (√κ/2) p·k`,
//! `ξ = (κ/4τ) p·i`. With these signs the differential of the Hopf map
//! sends `(E1, E2)` to a positively oriented orthonormal pair of S²(κ) and
//! kills `ξ`; this is checked in the test-suite rather than assumed.

use num_complex::Complex64;

use crate::error::{GeomError, Result};
use crate::linalg::{axpy4, dot4, norm4, scale4, Vec3, Vec4};

/// Tolerance on |p|² - 1 accepted by [`S3Point::new`].
pub const UNIT_TOL: f64 = 1e-9;

/// The pair (κ, τ) selecting the ambient Berger metric.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct BergerParams {
    kappa: f64,
    tau: f64,
    eta: f64,
}

impl BergerParams {
    pub fn new(kappa: f64, tau: f64) -> Result<Self> {
        if !(kappa > 0.0) || !kappa.is_finite() {
            return Err(GeomError::InvalidParameter(format!("kappa must be positive, got {kappa}")));
        }
        if tau == 0.0 || !tau.is_finite() {
            return Err(GeomError::InvalidParameter(format!("tau must be nonzero, got {tau}")));
        }
        Ok(Self { kappa, tau, eta: 4.0 * tau * tau / kappa })
    }

    /// The Berger sphere S³(4H²-1, H) hosting the minimal sisters of
    /// constant mean curvature H surfaces in H²×R.
    pub fn from_mean_curvature(h: f64) -> Result<Self> {
        if !(h > 0.5) {
            return Err(GeomError::InvalidParameter(format!("mean curvature must exceed 1/2, got {h}")));
        }
        Self::new(4.0 * h * h - 1.0, h)
    }

    /// The round unit sphere, κ = 4, τ = 1.
    pub fn round() -> Self {
        Self::new(4.0, 1.0).expect("valid")
    }

    pub fn kappa(&self) -> f64 {
        self.kappa
    }

    pub fn tau(&self) -> f64 {
        self.tau
    }

    pub fn eta(&self) -> f64 {
        self.eta
    }

    /// True when κ = 4τ² (up to round-off), i.e. the metric is round.
    pub fn is_round(&self) -> bool {
        (self.kappa - 4.0 * self.tau * self.tau).abs() <= 1e-12 * self.kappa
    }

    /// Length of a vertical geodesic (Hopf fibre): 8|τ|π/κ.
    pub fn vertical_length(&self) -> f64 {
        8.0 * self.tau.abs() * std::f64::consts::PI / self.kappa
    }

    /// Length of a horizontal geodesic: 4π/√κ.
    pub fn horizontal_length(&self) -> f64 {
        4.0 * std::f64::consts::PI / self.kappa.sqrt()
    }

    /// The metric as a bilinear form on R⁴ anchored at `base`.
    #[inline]
    pub fn metric_raw(&self, base: &Vec4, x: &Vec4, y: &Vec4) -> f64 {
        let v = hopf_direction(base);
        (4.0 / self.kappa) * (dot4(x, y) + (self.eta - 1.0) * dot4(x, &v) * dot4(y, &v))
    }

    /// Raw frame vectors `[E1, E2, ξ]` at `p`.
    #[inline]
    pub fn frame_raw(&self, p: &Vec4) -> [Vec4; 3] {
        let [a, b, c, d] = *p;
        let s = self.kappa.sqrt() / 2.0;
        let t = self.kappa / (4.0 * self.tau);
        [[-s * c, -s * d, s * a, s * b], [-s * d, s * c, -s * b, s * a], [-t * b, t * a, t * d, -t * c]]
    }

    /// Components `g(v, E_i)` of a vector in the orthonormal frame at `p`.
    #[inline]
    pub fn frame_coords(&self, p: &Vec4, v: &Vec4) -> Vec3 {
        let f = self.frame_raw(p);
        [self.metric_raw(p, v, &f[0]), self.metric_raw(p, v, &f[1]), self.metric_raw(p, v, &f[2])]
    }

    /// Inverse of [`Self::frame_coords`]: `Σ c_i E_i(p)`.
    #[inline]
    pub fn from_frame_coords(&self, p: &Vec4, c: &Vec3) -> Vec4 {
        let f = self.frame_raw(p);
        let mut v = scale4(c[0], &f[0]);
        v = axpy4(&v, c[1], &f[1]);
        axpy4(&v, c[2], &f[2])
    }
}

/// The fixed field `V(a,b,c,d) = (-b, a, d, -c)`.
#[inline]
pub fn hopf_direction(p: &Vec4) -> Vec4 {
    [-p[1], p[0], p[3], -p[2]]
}

/// A point of the unit 3-sphere.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct S3Point {
    coords: Vec4,
}

impl S3Point {
    /// Validates |p|² = 1 within [`UNIT_TOL`] and renormalizes.
    pub fn new(coords: Vec4) -> Result<Self> {
        let n2 = dot4(&coords, &coords);
        if (n2 - 1.0).abs() > UNIT_TOL || !n2.is_finite() {
            return Err(GeomError::NotUnit(n2));
        }
        Ok(Self::normalized(coords))
    }

    /// Projects a nonzero vector radially onto the sphere.
    pub fn normalized(coords: Vec4) -> Self {
        let n = norm4(&coords);
        Self { coords: scale4(1.0 / n, &coords) }
    }

    pub fn from_complex(z: Complex64, w: Complex64) -> Result<Self> {
        Self::new([z.re, z.im, w.re, w.im])
    }

    pub fn identity() -> Self {
        Self { coords: [1.0, 0.0, 0.0, 0.0] }
    }

    pub fn coords(&self) -> &Vec4 {
        &self.coords
    }

    pub fn z(&self) -> Complex64 {
        Complex64::new(self.coords[0], self.coords[1])
    }

    pub fn w(&self) -> Complex64 {
        Complex64::new(self.coords[2], self.coords[3])
    }

    /// Quaternion inverse `(z̄, -w)`.
    pub fn inverse(&self) -> Self {
        let [a, b, c, d] = self.coords;
        Self { coords: [a, -b, -c, -d] }
    }
}

/// Hamilton product of raw quaternions.
#[inline]
pub fn quat_mul_raw(p: &Vec4, q: &Vec4) -> Vec4 {
    let [a1, b1, c1, d1] = *p;
    let [a2, b2, c2, d2] = *q;
    [
        a1 * a2 - b1 * b2 - c1 * c2 - d1 * d2,
        a1 * b2 + b1 * a2 + c1 * d2 - d1 * c2,
        a1 * c2 - b1 * d2 + c1 * a2 + d1 * b2,
        a1 * d2 + b1 * c2 - c1 * b2 + d1 * a2,
    ]
}

/// Group product on S³, renormalized against round-off.
pub fn quat_mul(p: &S3Point, q: &S3Point) -> S3Point {
    S3Point::normalized(quat_mul_raw(&p.coords, &q.coords))
}

/// A vector tangent to S³ at a base point.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct S3Tangent {
    base: S3Point,
    vec: Vec4,
}

impl S3Tangent {
    pub fn new(base: S3Point, vec: Vec4) -> Result<Self> {
        let ip = dot4(&vec, base.coords());
        if ip.abs() > UNIT_TOL * (1.0 + norm4(&vec)) {
            return Err(GeomError::NotTangent(ip));
        }
        Ok(Self { base, vec })
    }

    /// Projects `vec` onto the tangent space at `base`.
    pub fn projected(base: S3Point, vec: Vec4) -> Self {
        let ip = dot4(&vec, base.coords());
        Self { base, vec: axpy4(&vec, -ip, base.coords()) }
    }

    pub fn base(&self) -> &S3Point {
        &self.base
    }

    pub fn vec(&self) -> &Vec4 {
        &self.vec
    }
}

/// The orthonormal frame `{E1, E2, ξ}` at one point.
#[derive(Clone, Copy, Debug)]
pub struct FrameAtPoint {
    pub e1: S3Tangent,
    pub e2: S3Tangent,
    pub xi: S3Tangent,
}

/// g_{κ,τ}(x, y); both tangents must share a base point.
pub fn metric_eval(params: &BergerParams, x: &S3Tangent, y: &S3Tangent) -> Result<f64> {
    if x.base != y.base {
        return Err(GeomError::BaseMismatch);
    }
    Ok(params.metric_raw(x.base.coords(), &x.vec, &y.vec))
}

pub fn frame_at(params: &BergerParams, p: &S3Point) -> FrameAtPoint {
    let [e1, e2, xi] = params.frame_raw(p.coords());
    FrameAtPoint {
        e1: S3Tangent { base: *p, vec: e1 },
        e2: S3Tangent { base: *p, vec: e2 },
        xi: S3Tangent { base: *p, vec: xi },
    }
}

/// Hopf projection onto the sphere of radius 1/√κ in R³:
/// `(1/√κ)(-2izw, |z|² - |w|²)` with C ≅ R².
#[inline]
pub fn hopf_project_raw(params: &BergerParams, p: &Vec4) -> Vec3 {
    let [a, b, c, d] = *p;
    let s = 1.0 / params.kappa().sqrt();
    // zw = (ac - bd) + i(ad + bc); -2i·zw = 2(ad + bc) - 2i(ac - bd)
    [s * 2.0 * (a * d + b * c), -s * 2.0 * (a * c - b * d), s * (a * a + b * b - c * c - d * d)]
}

pub fn hopf_project(params: &BergerParams, p: &S3Point) -> Vec3 {
    hopf_project_raw(params, p.coords())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::linalg::dist4;
    use crate::sampling::random_point;
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    #[test]
    fn rejects_bad_params() {
        assert!(BergerParams::new(0.0, 1.0).is_err());
        assert!(BergerParams::new(-1.0, 1.0).is_err());
        assert!(BergerParams::new(3.0, 0.0).is_err());
        assert!(BergerParams::from_mean_curvature(0.5).is_err());
        let p = BergerParams::new(3.0, 1.0).unwrap();
        assert_eq!(p.eta(), 4.0 / 3.0);
    }

    #[test]
    fn quaternion_relations() {
        let i = S3Point::new([0.0, 1.0, 0.0, 0.0]).unwrap();
        let j = S3Point::new([0.0, 0.0, 1.0, 0.0]).unwrap();
        let k = quat_mul(&i, &j);
        assert!(dist4(k.coords(), &[0.0, 0.0, 0.0, 1.0]) < 1e-15);
        let ijk = quat_mul(&k, &k);
        assert!(dist4(ijk.coords(), &[-1.0, 0.0, 0.0, 0.0]) < 1e-15);
    }

    #[test]
    fn complex_pair_product_and_inverse() {
        let mut rng = ChaCha8Rng::seed_from_u64(7);
        for _ in 0..100 {
            let p = random_point(&mut rng);
            let q = random_point(&mut rng);
            let pq = quat_mul(&p, &q);
            let (z1, w1, z2, w2) = (p.z(), p.w(), q.z(), q.w());
            let z = z1 * z2 - w1 * w2.conj();
            let w = z1 * w2 + w1 * z2.conj();
            assert!((pq.z() - z).norm() < 1e-14);
            assert!((pq.w() - w).norm() < 1e-14);
            let e = quat_mul(&p, &p.inverse());
            assert!(dist4(e.coords(), S3Point::identity().coords()) < 1e-14);
            let one = quat_mul(&S3Point::identity(), &p);
            assert!(dist4(one.coords(), p.coords()) < 1e-15);
        }
    }

    #[test]
    fn metric_examples() {
        let params = BergerParams::new(3.0, 1.0).unwrap();
        let mut rng = ChaCha8Rng::seed_from_u64(11);
        let p = random_point(&mut rng);
        let v = S3Tangent::new(p, hopf_direction(p.coords())).unwrap();
        let g = metric_eval(&params, &v, &v).unwrap();
        assert!((g - 16.0 / 9.0).abs() < 1e-14);

        let round = BergerParams::new(4.0 * 0.7 * 0.7, 0.7).unwrap();
        let x = S3Tangent::projected(p, [0.3, -1.0, 0.2, 0.5]);
        let y = S3Tangent::projected(p, [1.0, 0.1, -0.7, 0.4]);
        let lhs = metric_eval(&round, &x, &y).unwrap();
        let rhs = 4.0 / round.kappa() * dot4(x.vec(), y.vec());
        assert!((lhs - rhs).abs() < 1e-13);

        let q = random_point(&mut rng);
        let z = S3Tangent::projected(q, [1.0, 0.0, 0.0, 0.0]);
        assert_eq!(metric_eval(&params, &x, &z), Err(GeomError::BaseMismatch));
    }

    #[test]
    fn frame_at_identity() {
        let params = BergerParams::new(3.0, 0.8).unwrap();
        let f = frame_at(&params, &S3Point::identity());
        let s = 3.0f64.sqrt() / 2.0;
        assert!(dist4(f.e1.vec(), &[0.0, 0.0, s, 0.0]) < 1e-15);
        assert!(dist4(f.e2.vec(), &[0.0, 0.0, 0.0, s]) < 1e-15);
        assert!(dist4(f.xi.vec(), &[0.0, 3.0 / 3.2, 0.0, 0.0]) < 1e-15);
    }

    #[test]
    fn hopf_of_identity() {
        let params = BergerParams::new(2.0, 0.3).unwrap();
        let x = hopf_project(&params, &S3Point::identity());
        assert!((x[2] - 1.0 / 2f64.sqrt()).abs() < 1e-15);
        assert!(x[0].abs() < 1e-15 && x[1].abs() < 1e-15);
    }

    #[test]
    fn rejects_non_unit_and_non_tangent() {
        assert!(matches!(S3Point::new([1.0, 0.1, 0.0, 0.0]), Err(GeomError::NotUnit(_))));
        let p = S3Point::identity();
        assert!(matches!(S3Tangent::new(p, [1.0, 0.0, 0.0, 0.0]), Err(GeomError::NotTangent(_))));
    }
}
