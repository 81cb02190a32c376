//! Levi-Civita connection of S³(κ,τ) in the frame {E1, E2, ξ}.
//!
//! [`connection_table`] is the closed form; [`christoffel_fd`] recomputes the
//! same coefficients from the Koszul formula with finite-difference
//! derivatives of the metric and of the frame fields, and serves as an
//! independent check.

use crate::berger::{BergerParams, S3Point};
use crate::linalg::{axpy4, normalize4, scale4, sub4, Vec4};

/// `table[i][j][k] = g(∇_{E_i} E_j, E_k)` with `E_3 = ξ`.
pub type ConnectionTable = [[[f64; 3]; 3]; 3];

/// Default central-difference step.
pub const DEFAULT_FD_STEP: f64 = 1e-4;

/// Closed-form connection coefficients (constant in the left-invariant frame).
pub fn connection_table(params: &BergerParams) -> ConnectionTable {
    let tau = params.tau();
    let rot = params.kappa() / (2.0 * tau) - tau;
    let mut t = [[[0.0; 3]; 3]; 3];
    // ∇_{E1}E2 = τξ, ∇_{E1}ξ = -τE2
    t[0][1][2] = tau;
    t[0][2][1] = -tau;
    // ∇_{E2}E1 = -τξ, ∇_{E2}ξ = τE1
    t[1][0][2] = -tau;
    t[1][2][0] = tau;
    // ∇_ξE1 = (κ/2τ - τ)E2, ∇_ξE2 = -(κ/2τ - τ)E1
    t[2][0][1] = rot;
    t[2][1][0] = -rot;
    t
}

/// `∇_X Y` for frame-coordinate vectors, using the closed-form table.
pub fn covariant_frame(table: &ConnectionTable, x: &[f64; 3], y: &[f64; 3]) -> [f64; 3] {
    let mut out = [0.0; 3];
    for i in 0..3 {
        for j in 0..3 {
            let c = x[i] * y[j];
            if c == 0.0 {
                continue;
            }
            for k in 0..3 {
                out[k] += c * table[i][j][k];
            }
        }
    }
    out
}

fn curve_point(p: &Vec4, v: &Vec4, t: f64) -> Vec4 {
    normalize4(&axpy4(p, t, v))
}

/// Connection coefficients from the Koszul formula in the orthonormal frame,
/// with all derivatives taken by central differences along the curves
/// `t ↦ normalize(p + t·E_i)`.
pub fn christoffel_fd(params: &BergerParams, p: &S3Point, step: f64) -> ConnectionTable {
    let p = p.coords();
    let frame = params.frame_raw(p);
    let h = step;

    // derivative of the frame field j along E_i at p
    let dfield = |i: usize, j: usize| -> Vec4 {
        let plus = params.frame_raw(&curve_point(p, &frame[i], h))[j];
        let minus = params.frame_raw(&curve_point(p, &frame[i], -h))[j];
        scale4(0.5 / h, &sub4(&plus, &minus))
    };
    // derivative of g(E_j, E_k) along E_i
    let dmetric = |i: usize, j: usize, k: usize| -> f64 {
        let gp = |q: &Vec4| {
            let f = params.frame_raw(q);
            params.metric_raw(q, &f[j], &f[k])
        };
        (gp(&curve_point(p, &frame[i], h)) - gp(&curve_point(p, &frame[i], -h))) / (2.0 * h)
    };
    let mut deriv = [[[0.0; 4]; 3]; 3];
    for (i, row) in deriv.iter_mut().enumerate() {
        for (j, d) in row.iter_mut().enumerate() {
            *d = dfield(i, j);
        }
    }
    let bracket = |i: usize, j: usize| -> Vec4 { sub4(&deriv[i][j], &deriv[j][i]) };
    let g = |x: &Vec4, y: &Vec4| params.metric_raw(p, x, y);

    let mut t = [[[0.0; 3]; 3]; 3];
    for i in 0..3 {
        for j in 0..3 {
            for k in 0..3 {
                t[i][j][k] = 0.5
                    * (dmetric(i, j, k) + dmetric(j, k, i) - dmetric(k, i, j) + g(&bracket(i, j), &frame[k])
                        - g(&bracket(j, k), &frame[i])
                        + g(&bracket(k, i), &frame[j]));
            }
        }
    }
    t
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::sampling::{random_point, rng};

    #[test]
    fn fd_matches_table_on_named_entries() {
        let params = BergerParams::new(3.0, 1.0).unwrap();
        let mut r = rng(5);
        let p = random_point(&mut r);
        let fd = christoffel_fd(&params, &p, DEFAULT_FD_STEP);
        // ∇_{E1}E2 = τξ
        assert!((fd[0][1][2] - 1.0).abs() < 1e-6);
        // ∇_ξ ξ = 0
        for k in 0..3 {
            assert!(fd[2][2][k].abs() < 1e-6);
        }
        // ∇_ξ E1 = (κ/2τ - τ) E2
        assert!((fd[2][0][1] - 0.5).abs() < 1e-6);
    }

    #[test]
    fn table_is_metric_compatible() {
        // g(∇_X E_j, E_k) + g(E_j, ∇_X E_k) = 0 for an orthonormal frame
        let t = connection_table(&BergerParams::new(2.3, -0.6).unwrap());
        for i in 0..3 {
            for j in 0..3 {
                for k in 0..3 {
                    assert!((t[i][j][k] + t[i][k][j]).abs() < 1e-15);
                }
            }
        }
    }
}
