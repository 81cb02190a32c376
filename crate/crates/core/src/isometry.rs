//! Ambient isometries of S³(κ,τ) as 4×4 orthogonal matrices.
//!
//! For κ ≠ 4τ² the isometry group is `{A ∈ O(4) : AV = ±VA}`; for the round
//! metric it is all of O(4). Every isometry used by the crate goes through
//! [`check_isometry`].

use crate::berger::{quat_mul_raw, BergerParams, S3Point, S3Tangent};
use crate::linalg::{dot4, mat4_identity, mat4_max_diff, mat4_mul, mat4_transpose, mat4_vec, Mat4, Vec4};

/// Tolerance on orthogonality and on the commutation relation with V.
pub const ISOMETRY_TOL: f64 = 1e-9;

/// The matrix of the field `V(a,b,c,d) = (-b, a, d, -c)`.
pub const V_MATRIX: Mat4 = [[0.0, -1.0, 0.0, 0.0], [1.0, 0.0, 0.0, 0.0], [0.0, 0.0, 0.0, 1.0], [0.0, 0.0, -1.0, 0.0]];

/// How an isometry interacts with V.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Commutation {
    /// `AV = VA`: preserves the Hopf field.
    Commutes,
    /// `AV = -VA`: reverses the Hopf field.
    Anticommutes,
    /// Neither; only possible for the round metric.
    Neither,
}

impl Commutation {
    /// `+1`, `-1`, or `0` for [`Commutation::Neither`].
    pub fn sign(&self) -> i8 {
        match self {
            Commutation::Commutes => 1,
            Commutation::Anticommutes => -1,
            Commutation::Neither => 0,
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub enum IsometryRejection {
    NotOrthogonal { defect: f64 },
    BreaksHopfField { commute_defect: f64, anticommute_defect: f64 },
}

impl std::fmt::Display for IsometryRejection {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            Self::NotOrthogonal { defect } => write!(f, "matrix is not orthogonal (defect {defect:e})"),
            Self::BreaksHopfField { commute_defect, anticommute_defect } => write!(
                f,
                "matrix neither commutes nor anticommutes with V (defects {commute_defect:e}, {anticommute_defect:e})"
            ),
        }
    }
}

impl std::error::Error for IsometryRejection {}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct AmbientIsometry {
    matrix: Mat4,
    commutation: Commutation,
}

fn commutation_defects(a: &Mat4) -> (f64, f64) {
    let av = mat4_mul(a, &V_MATRIX);
    let va = mat4_mul(&V_MATRIX, a);
    let mut plus: f64 = 0.0;
    let mut minus: f64 = 0.0;
    for i in 0..4 {
        for j in 0..4 {
            plus = plus.max((av[i][j] - va[i][j]).abs());
            minus = minus.max((av[i][j] + va[i][j]).abs());
        }
    }
    (plus, minus)
}

/// Accepts `a` iff it is orthogonal and, unless the metric is round,
/// commutes or anticommutes with V.
pub fn check_isometry(params: &BergerParams, a: &Mat4) -> Result<AmbientIsometry, IsometryRejection> {
    let ata = mat4_mul(&mat4_transpose(a), a);
    let defect = mat4_max_diff(&ata, &mat4_identity());
    if !(defect <= ISOMETRY_TOL) {
        return Err(IsometryRejection::NotOrthogonal { defect });
    }
    let (plus, minus) = commutation_defects(a);
    let commutation = if plus <= ISOMETRY_TOL {
        Commutation::Commutes
    } else if minus <= ISOMETRY_TOL {
        Commutation::Anticommutes
    } else if params.is_round() {
        Commutation::Neither
    } else {
        return Err(IsometryRejection::BreaksHopfField { commute_defect: plus, anticommute_defect: minus });
    };
    Ok(AmbientIsometry { matrix: *a, commutation })
}

/// Matrix of the left translation `q ↦ p q`.
pub fn left_translation_matrix(p: &Vec4) -> Mat4 {
    let mut m = [[0.0; 4]; 4];
    for k in 0..4 {
        let mut e = [0.0; 4];
        e[k] = 1.0;
        let col = quat_mul_raw(p, &e);
        for i in 0..4 {
            m[i][k] = col[i];
        }
    }
    m
}

/// Matrix of the reflection fixing the great circle through the
/// orthonormal pair `(p, q)` pointwise and negating its orthogonal plane.
pub fn circle_reflection_matrix(p: &Vec4, q: &Vec4) -> Mat4 {
    let mut m = [[0.0; 4]; 4];
    for i in 0..4 {
        for j in 0..4 {
            m[i][j] = 2.0 * (p[i] * p[j] + q[i] * q[j]) - if i == j { 1.0 } else { 0.0 };
        }
    }
    m
}

impl AmbientIsometry {
    pub fn left_translation(params: &BergerParams, p: &S3Point) -> Result<Self, IsometryRejection> {
        check_isometry(params, &left_translation_matrix(p.coords()))
    }

    pub fn identity() -> Self {
        Self { matrix: mat4_identity(), commutation: Commutation::Commutes }
    }

    pub fn matrix(&self) -> &Mat4 {
        &self.matrix
    }

    pub fn commutation(&self) -> Commutation {
        self.commutation
    }

    pub fn apply_raw(&self, v: &Vec4) -> Vec4 {
        mat4_vec(&self.matrix, v)
    }

    pub fn apply(&self, p: &S3Point) -> S3Point {
        S3Point::normalized(self.apply_raw(p.coords()))
    }

    /// Push-forward of a tangent vector.
    pub fn push(&self, v: &S3Tangent) -> S3Tangent {
        S3Tangent::projected(self.apply(v.base()), self.apply_raw(v.vec()))
    }

    /// `self ∘ other`.
    pub fn compose(&self, other: &AmbientIsometry) -> AmbientIsometry {
        let commutation = match (self.commutation, other.commutation) {
            (Commutation::Neither, _) | (_, Commutation::Neither) => Commutation::Neither,
            (a, b) if a == b => Commutation::Commutes,
            _ => Commutation::Anticommutes,
        };
        AmbientIsometry { matrix: mat4_mul(&self.matrix, &other.matrix), commutation }
    }

    pub fn inverse(&self) -> AmbientIsometry {
        AmbientIsometry { matrix: mat4_transpose(&self.matrix), commutation: self.commutation }
    }

    /// Largest displacement `|A p - p|` over the given points.
    pub fn max_displacement<'a>(&self, pts: impl IntoIterator<Item = &'a Vec4>) -> f64 {
        pts.into_iter()
            .map(|p| {
                let q = self.apply_raw(p);
                let d = [q[0] - p[0], q[1] - p[1], q[2] - p[2], q[3] - p[3]];
                dot4(&d, &d).sqrt()
            })
            .fold(0.0, f64::max)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::berger::metric_eval;
    use crate::sampling::{random_point, random_tangent, rng};

    #[test]
    fn left_translations_commute_with_v() {
        let params = BergerParams::new(3.0, 1.0).unwrap();
        let mut r = rng(1);
        for _ in 0..50 {
            let p = random_point(&mut r);
            let iso = AmbientIsometry::left_translation(&params, &p).unwrap();
            assert_eq!(iso.commutation(), Commutation::Commutes);
        }
    }

    #[test]
    fn flip_w_is_accepted() {
        let params = BergerParams::new(3.0, 1.0).unwrap();
        let m = [[1.0, 0.0, 0.0, 0.0], [0.0, 1.0, 0.0, 0.0], [0.0, 0.0, -1.0, 0.0], [0.0, 0.0, 0.0, -1.0]];
        let iso = check_isometry(&params, &m).unwrap();
        assert_eq!(iso.commutation().sign(), 1);
    }

    #[test]
    fn tilted_rotation_is_rejected_unless_round() {
        let t = std::f64::consts::PI / 7.0;
        let (c, s) = (t.cos(), t.sin());
        let m = [[c, 0.0, -s, 0.0], [0.0, 1.0, 0.0, 0.0], [s, 0.0, c, 0.0], [0.0, 0.0, 0.0, 1.0]];
        let squashed = BergerParams::new(3.0, 1.0).unwrap();
        assert!(matches!(check_isometry(&squashed, &m), Err(IsometryRejection::BreaksHopfField { .. })));
        let round = BergerParams::round();
        assert_eq!(check_isometry(&round, &m).unwrap().commutation(), Commutation::Neither);
    }

    #[test]
    fn non_orthogonal_rejected() {
        let mut m = mat4_identity();
        m[0][0] = 1.1;
        assert!(matches!(check_isometry(&BergerParams::round(), &m), Err(IsometryRejection::NotOrthogonal { .. })));
    }

    #[test]
    fn horizontal_circle_reflection_anticommutes() {
        let params = BergerParams::new(3.0, 1.0).unwrap();
        let m = circle_reflection_matrix(&[1.0, 0.0, 0.0, 0.0], &[0.0, 0.0, 1.0, 0.0]);
        let iso = check_isometry(&params, &m).unwrap();
        assert_eq!(iso.commutation(), Commutation::Anticommutes);
    }

    #[test]
    fn accepted_isometries_preserve_metric() {
        let params = BergerParams::new(1.7, -0.4).unwrap();
        let mut r = rng(3);
        for _ in 0..100 {
            let p = random_point(&mut r);
            let a = AmbientIsometry::left_translation(&params, &p).unwrap();
            let flip = check_isometry(&params, &circle_reflection_matrix(&[1.0, 0.0, 0.0, 0.0], &[0.0, 0.0, 0.0, 1.0]))
                .unwrap();
            let iso = flip.compose(&a);
            let q = random_point(&mut r);
            let x = random_tangent(&mut r, &q);
            let y = random_tangent(&mut r, &q);
            let before = metric_eval(&params, &x, &y).unwrap();
            let after = metric_eval(&params, &iso.push(&x), &iso.push(&y)).unwrap();
            assert!((before - after).abs() < 1e-10 * (1.0 + before.abs()));
        }
    }
}
