//! The geodesic quadrilateral `Γ_λ` bounding the fundamental piece of the
//! helicoidal annulus, and the reflections that extend it.

use std::f64::consts::PI;

use crate::berger::{quat_mul_raw, BergerParams, S3Point};
use crate::error::{GeomError, Result};
use crate::geodesics::{GreatCircle, HorizontalGeodesic};
use crate::isometry::{check_isometry, circle_reflection_matrix, left_translation_matrix, AmbientIsometry};
use crate::linalg::{mat4_mul, mat4_transpose, Mat4, Vec4};

/// One of the four edges of `Γ_λ`.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Edge {
    Gamma1,
    Gamma2,
    Gamma3,
    Gamma4,
}

/// An edge traversed along the loop, as a great-circle arc from
/// `theta_start` to `theta_end`.
#[derive(Clone, Copy, Debug)]
pub struct ChainArc {
    pub edge: Edge,
    pub circle: GreatCircle,
    pub theta_start: f64,
    pub theta_end: f64,
}

impl ChainArc {
    pub fn eval(&self, s: f64) -> Vec4 {
        self.circle.eval(self.theta_start + s * (self.theta_end - self.theta_start))
    }
}

#[derive(Clone, Copy, Debug)]
pub struct GeodesicPolygon {
    pub params: BergerParams,
    pub lambda: f64,
}

/// Builds `Γ_λ` for `0 ≤ λ ≤ π/(2√κ)`.
pub fn build_polygon(params: &BergerParams, lambda: f64) -> Result<GeodesicPolygon> {
    let max = PI / (2.0 * params.kappa().sqrt());
    if !(0.0..=max * (1.0 + 1e-12)).contains(&lambda) {
        return Err(GeomError::OutOfDomain { name: "lambda", value: lambda, domain: format!("[0, {max}]") });
    }
    Ok(GeodesicPolygon { params: *params, lambda: lambda.min(max) })
}

const ONE: Vec4 = [1.0, 0.0, 0.0, 0.0];
const I: Vec4 = [0.0, 1.0, 0.0, 0.0];
const J: Vec4 = [0.0, 0.0, 1.0, 0.0];
const K: Vec4 = [0.0, 0.0, 0.0, 1.0];

impl GeodesicPolygon {
    fn sk(&self) -> f64 {
        self.params.kappa().sqrt()
    }

    /// Parameter domain `[0, end]` of an edge.
    pub fn domain(&self, edge: Edge) -> (f64, f64) {
        let end = match edge {
            Edge::Gamma1 => PI / self.sk(),
            Edge::Gamma2 => self.lambda,
            Edge::Gamma3 => 2.0 * self.params.tau() * PI / self.params.kappa(),
            Edge::Gamma4 => PI / self.sk() - self.lambda,
        };
        (0.0, end)
    }

    /// Supporting great circle of an edge and the circle angle per unit of
    /// curve parameter.
    pub fn circle(&self, edge: Edge) -> (GreatCircle, f64) {
        match edge {
            Edge::Gamma1 => (GreatCircle::new(ONE, J), self.sk() / 2.0),
            Edge::Gamma2 => (GreatCircle::new(ONE, K), self.sk() / 2.0),
            Edge::Gamma3 => {
                let g = self.corner();
                (GreatCircle::new(g, quat_mul_raw(&g, &I)), self.params.kappa() / (4.0 * self.params.tau()))
            }
            Edge::Gamma4 => (GreatCircle::new(J, I), self.sk() / 2.0),
        }
    }

    pub fn eval(&self, edge: Edge, t: f64) -> S3Point {
        let (c, rate) = self.circle(edge);
        S3Point::normalized(c.eval(rate * t))
    }

    /// `γ2(λ)`, the start of the vertical edge.
    pub fn corner(&self) -> Vec4 {
        let a = self.sk() * self.lambda / 2.0;
        [a.cos(), 0.0, 0.0, a.sin()]
    }

    /// The closed loop `γ1, γ4, γ3 reversed, γ2 reversed`.
    pub fn chain(&self) -> [ChainArc; 4] {
        let arc = |edge: Edge, rev: bool| {
            let (c, rate) = self.circle(edge);
            let (a, b) = self.domain(edge);
            let (s, e) = if rev { (b, a) } else { (a, b) };
            ChainArc { edge, circle: c, theta_start: rate * s, theta_end: rate * e }
        };
        [arc(Edge::Gamma1, false), arc(Edge::Gamma4, false), arc(Edge::Gamma3, true), arc(Edge::Gamma2, true)]
    }

    /// Largest gap between consecutive arc endpoints of the loop.
    pub fn closure_defect(&self) -> f64 {
        let ch = self.chain();
        (0..4).map(|i| crate::linalg::dist4(&ch[i].eval(1.0), &ch[(i + 1) % 4].eval(0.0))).fold(0.0, f64::max)
    }

    /// `h1(t) = (cos(√κt/2), sin(√κt/2))`.
    pub fn h1(&self) -> HorizontalGeodesic {
        HorizontalGeodesic::new(self.params, S3Point::identity(), 0.0, 1.0)
    }

    /// `h2(t) = ρ(h1(t))`, through `γ2(2λ)` with field `-E1`.
    pub fn h2(&self) -> HorizontalGeodesic {
        let a = self.sk() * self.lambda;
        let base = S3Point::normalized([a.cos(), 0.0, 0.0, a.sin()]);
        HorizontalGeodesic::new(self.params, base, PI, 1.0)
    }

    /// Geodesic reflection fixing the great circle of a horizontal edge.
    pub fn reflection_across(&self, edge: Edge) -> AmbientIsometry {
        match edge {
            Edge::Gamma3 => reflection_across_gamma3(&self.params, self.lambda),
            _ => {
                let c = self.circle(edge).0;
                isometry(&self.params, &circle_reflection_matrix(&c.p, &c.q))
            }
        }
    }
}

fn isometry(params: &BergerParams, m: &Mat4) -> AmbientIsometry {
    check_isometry(params, m).expect("reflection across a geodesic is an isometry")
}

/// `ρ = L_g ∘ ρ0 ∘ L_g⁻¹` with `g = γ2(λ)` and `ρ0(z, w) = (z, -w)`:
/// the geodesic reflection across the vertical edge `γ3`.
pub fn reflection_across_gamma3(params: &BergerParams, lambda: f64) -> AmbientIsometry {
    let a = params.kappa().sqrt() * lambda / 2.0;
    let l = left_translation_matrix(&[a.cos(), 0.0, 0.0, a.sin()]);
    let rho0 = [[1.0, 0.0, 0.0, 0.0], [0.0, 1.0, 0.0, 0.0], [0.0, 0.0, -1.0, 0.0], [0.0, 0.0, 0.0, -1.0]];
    isometry(params, &mat4_mul(&mat4_mul(&l, &rho0), &mat4_transpose(&l)))
}
