//! Seeded random sampling on S³ for reproducible property suites.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::berger::{S3Point, S3Tangent};
use crate::linalg::{norm4, Vec4};

pub fn rng(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

fn gaussian4<R: Rng>(rng: &mut R) -> Vec4 {
    // Box-Muller, two pairs
    let mut out = [0.0; 4];
    for k in 0..2 {
        let u1: f64 = rng.gen_range(f64::MIN_POSITIVE..1.0);
        let u2: f64 = rng.gen_range(0.0..1.0);
        let r = (-2.0 * u1.ln()).sqrt();
        let t = std::f64::consts::TAU * u2;
        out[2 * k] = r * t.cos();
        out[2 * k + 1] = r * t.sin();
    }
    out
}

/// Uniformly distributed point of S³.
pub fn random_point<R: Rng>(rng: &mut R) -> S3Point {
    loop {
        let g = gaussian4(rng);
        if norm4(&g) > 1e-6 {
            return S3Point::normalized(g);
        }
    }
}

/// Gaussian tangent vector at `p` (Euclidean scale ~1).
pub fn random_tangent<R: Rng>(rng: &mut R, p: &S3Point) -> S3Tangent {
    S3Tangent::projected(*p, gaussian4(rng))
}
