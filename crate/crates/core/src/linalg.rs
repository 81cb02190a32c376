//! Small fixed-size vector and matrix helpers used throughout the crate.

pub type Vec3 = [f64; 3];
pub type Vec4 = [f64; 4];
pub type Mat3 = [[f64; 3]; 3];
pub type Mat4 = [[f64; 4]; 4];

#[inline]
pub fn dot4(a: &Vec4, b: &Vec4) -> f64 {
    a[0] * b[0] + a[1] * b[1] + a[2] * b[2] + a[3] * b[3]
}

#[inline]
pub fn add4(a: &Vec4, b: &Vec4) -> Vec4 {
    [a[0] + b[0], a[1] + b[1], a[2] + b[2], a[3] + b[3]]
}

#[inline]
pub fn sub4(a: &Vec4, b: &Vec4) -> Vec4 {
    [a[0] - b[0], a[1] - b[1], a[2] - b[2], a[3] - b[3]]
}

#[inline]
pub fn scale4(s: f64, a: &Vec4) -> Vec4 {
    [s * a[0], s * a[1], s * a[2], s * a[3]]
}

/// `a + s * b`
#[inline]
pub fn axpy4(a: &Vec4, s: f64, b: &Vec4) -> Vec4 {
    [a[0] + s * b[0], a[1] + s * b[1], a[2] + s * b[2], a[3] + s * b[3]]
}

#[inline]
pub fn norm4(a: &Vec4) -> f64 {
    dot4(a, a).sqrt()
}

#[inline]
pub fn normalize4(a: &Vec4) -> Vec4 {
    scale4(1.0 / norm4(a), a)
}

#[inline]
pub fn dist4(a: &Vec4, b: &Vec4) -> f64 {
    norm4(&sub4(a, b))
}

/// Removes the component of `v` along the unit vector `p`.
#[inline]
pub fn reject4(v: &Vec4, p: &Vec4) -> Vec4 {
    axpy4(v, -dot4(v, p), p)
}

pub fn mat4_vec(m: &Mat4, v: &Vec4) -> Vec4 {
    let mut out = [0.0; 4];
    for (i, row) in m.iter().enumerate() {
        out[i] = dot4(row, v);
    }
    out
}

pub fn mat4_mul(a: &Mat4, b: &Mat4) -> Mat4 {
    let mut out = [[0.0; 4]; 4];
    for i in 0..4 {
        for j in 0..4 {
            out[i][j] = (0..4).map(|k| a[i][k] * b[k][j]).sum();
        }
    }
    out
}

pub fn mat4_transpose(a: &Mat4) -> Mat4 {
    let mut out = [[0.0; 4]; 4];
    for i in 0..4 {
        for j in 0..4 {
            out[i][j] = a[j][i];
        }
    }
    out
}

pub fn mat4_identity() -> Mat4 {
    let mut out = [[0.0; 4]; 4];
    for (i, row) in out.iter_mut().enumerate() {
        row[i] = 1.0;
    }
    out
}

/// Largest absolute entry of `a - b`.
pub fn mat4_max_diff(a: &Mat4, b: &Mat4) -> f64 {
    let mut m: f64 = 0.0;
    for i in 0..4 {
        for j in 0..4 {
            m = m.max((a[i][j] - b[i][j]).abs());
        }
    }
    m
}

#[inline]
pub fn dot3(a: &Vec3, b: &Vec3) -> f64 {
    a[0] * b[0] + a[1] * b[1] + a[2] * b[2]
}

#[inline]
pub fn sub3(a: &Vec3, b: &Vec3) -> Vec3 {
    [a[0] - b[0], a[1] - b[1], a[2] - b[2]]
}

#[inline]
pub fn add3(a: &Vec3, b: &Vec3) -> Vec3 {
    [a[0] + b[0], a[1] + b[1], a[2] + b[2]]
}

#[inline]
pub fn scale3(s: f64, a: &Vec3) -> Vec3 {
    [s * a[0], s * a[1], s * a[2]]
}

#[inline]
pub fn cross3(a: &Vec3, b: &Vec3) -> Vec3 {
    [a[1] * b[2] - a[2] * b[1], a[2] * b[0] - a[0] * b[2], a[0] * b[1] - a[1] * b[0]]
}

#[inline]
pub fn norm3(a: &Vec3) -> f64 {
    dot3(a, a).sqrt()
}

pub fn normalize3(a: &Vec3) -> Vec3 {
    scale3(1.0 / norm3(a), a)
}

pub fn mat3_vec(m: &Mat3, v: &Vec3) -> Vec3 {
    [dot3(&m[0], v), dot3(&m[1], v), dot3(&m[2], v)]
}

pub fn mat3_mul(a: &Mat3, b: &Mat3) -> Mat3 {
    let mut out = [[0.0; 3]; 3];
    for i in 0..3 {
        for j in 0..3 {
            out[i][j] = (0..3).map(|k| a[i][k] * b[k][j]).sum();
        }
    }
    out
}

pub fn mat3_transpose(a: &Mat3) -> Mat3 {
    let mut out = [[0.0; 3]; 3];
    for i in 0..3 {
        for j in 0..3 {
            out[i][j] = a[j][i];
        }
    }
    out
}

pub fn mat3_det(m: &Mat3) -> f64 {
    dot3(&m[0], &cross3(&m[1], &m[2]))
}

pub fn mat3_inverse(m: &Mat3) -> Option<Mat3> {
    let det = mat3_det(m);
    if det.abs() < 1e-300 {
        return None;
    }
    let c0 = cross3(&m[1], &m[2]);
    let c1 = cross3(&m[2], &m[0]);
    let c2 = cross3(&m[0], &m[1]);
    // columns of the inverse are the cofactor rows
    let mut inv = [[0.0; 3]; 3];
    for i in 0..3 {
        inv[i][0] = c0[i] / det;
        inv[i][1] = c1[i] / det;
        inv[i][2] = c2[i] / det;
    }
    Some(inv)
}

/// Eigen-decomposition of a symmetric 3x3 matrix by cyclic Jacobi sweeps.
/// Returns eigenvalues in ascending order with matching unit eigenvectors.
pub fn sym3_eigen(m: &Mat3) -> ([f64; 3], [Vec3; 3]) {
    let mut a = *m;
    let mut v = [[1.0, 0.0, 0.0], [0.0, 1.0, 0.0], [0.0, 0.0, 1.0]];
    for _ in 0..64 {
        let off = a[0][1].abs() + a[0][2].abs() + a[1][2].abs();
        if off < 1e-300 {
            break;
        }
        for (p, q) in [(0usize, 1usize), (0, 2), (1, 2)] {
            if a[p][q].abs() < 1e-300 {
                continue;
            }
            let theta = (a[q][q] - a[p][p]) / (2.0 * a[p][q]);
            let t = theta.signum() / (theta.abs() + (theta * theta + 1.0).sqrt());
            let t = if theta == 0.0 { 1.0 } else { t };
            let c = 1.0 / (t * t + 1.0).sqrt();
            let s = t * c;
            for k in 0..3 {
                let akp = a[k][p];
                let akq = a[k][q];
                a[k][p] = c * akp - s * akq;
                a[k][q] = s * akp + c * akq;
            }
            for k in 0..3 {
                let apk = a[p][k];
                let aqk = a[q][k];
                a[p][k] = c * apk - s * aqk;
                a[q][k] = s * apk + c * aqk;
            }
            for row in v.iter_mut() {
                let vp = row[p];
                let vq = row[q];
                row[p] = c * vp - s * vq;
                row[q] = s * vp + c * vq;
            }
        }
    }
    let mut idx = [0usize, 1, 2];
    idx.sort_by(|&i, &j| a[i][i].total_cmp(&a[j][j]));
    let vals = [a[idx[0]][idx[0]], a[idx[1]][idx[1]], a[idx[2]][idx[2]]];
    let vecs = [
        [v[0][idx[0]], v[1][idx[0]], v[2][idx[0]]],
        [v[0][idx[1]], v[1][idx[1]], v[2][idx[1]]],
        [v[0][idx[2]], v[1][idx[2]], v[2][idx[2]]],
    ];
    (vals, vecs)
}

/// Inverse of a symmetric positive 2x2 matrix `[[a, b], [b, c]]`.
pub fn sym2_inverse(a: f64, b: f64, c: f64) -> [[f64; 2]; 2] {
    let det = a * c - b * b;
    [[c / det, -b / det], [-b / det, a / det]]
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn jacobi_recovers_known_spectrum() {
        let m = [[2.0, 1.0, 0.0], [1.0, 2.0, 0.0], [0.0, 0.0, 5.0]];
        let (vals, vecs) = sym3_eigen(&m);
        assert!((vals[0] - 1.0).abs() < 1e-12);
        assert!((vals[1] - 3.0).abs() < 1e-12);
        assert!((vals[2] - 5.0).abs() < 1e-12);
        for (lam, v) in vals.iter().zip(vecs.iter()) {
            let mv = mat3_vec(&m, v);
            for k in 0..3 {
                assert!((mv[k] - lam * v[k]).abs() < 1e-12);
            }
        }
    }

    #[test]
    fn mat3_inverse_roundtrip() {
        let m = [[1.0, 2.0, 0.5], [0.0, 1.0, 3.0], [4.0, 0.0, 1.0]];
        let inv = mat3_inverse(&m).unwrap();
        let id = mat3_mul(&m, &inv);
        for i in 0..3 {
            for j in 0..3 {
                let e = if i == j { 1.0 } else { 0.0 };
                assert!((id[i][j] - e).abs() < 1e-12);
            }
        }
    }
}
