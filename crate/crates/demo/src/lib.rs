//! WebAssembly bindings for the static page in `www/`.

use std::f64::consts::PI;

use berger::daniel::{h2_points, reconstruct_sister, sister_data, surface_data, Lattice, Seed};
use berger::h2r::geodesic_curvature_h2;
use berger::mesh::{helicoid_mesh, project, Projection, TriMesh};
use berger::surfaces::{alpha0, fc_raw, k_neck, t_half, tcal, FcSpec};
use wasm_bindgen::prelude::*;

/// `[k_neck, T_half, Tcal, alpha0]` for the sister pair `(H, c)`.
#[wasm_bindgen]
pub fn constants(h: f64, c: f64) -> Result<Vec<f64>, String> {
    FcSpec::new(h, c).map_err(|e| e.to_string())?;
    Ok(vec![k_neck(h, c), t_half(h, c), tcal(h, c), alpha0(h, c)])
}

fn fc_mesh(h: f64, c: f64, nx: usize, ny: usize) -> Result<(FcSpec, TriMesh), String> {
    if nx < 2 || ny < 2 {
        return Err("grid needs at least 2x2 vertices".into());
    }
    let spec = FcSpec::new(h, c).map_err(|e| e.to_string())?;
    let hel = spec.as_helicoid(2.0 * t_half(h, c)).map_err(|e| e.to_string())?;
    Ok((spec, helicoid_mesh(&hel, nx, ny)))
}

/// Stereographic image of one period of `f^c`, as `x y z` triples.
#[wasm_bindgen]
pub fn surface_vertices(h: f64, c: f64, nx: usize, ny: usize) -> Result<Vec<f64>, String> {
    let (spec, m) = fc_mesh(h, c, nx, ny)?;
    Ok(m.vertices.iter().flat_map(|v| project(v, &spec.params, Projection::Stereographic)).collect())
}

/// Triangles of [`surface_vertices`] as index triples.
#[wasm_bindgen]
pub fn surface_faces(h: f64, c: f64, nx: usize, ny: usize) -> Result<Vec<u32>, String> {
    let (_, m) = fc_mesh(h, c, nx, ny)?;
    Ok(m.faces.iter().flat_map(|f| f.map(|i| i as u32)).collect())
}

#[wasm_bindgen]
pub struct Neck {
    points: Vec<f64>,
    curvature: f64,
    expected: f64,
}

#[wasm_bindgen]
impl Neck {
    /// Poincaré-disk coordinates of the neck, as `u v` pairs.
    pub fn points(&self) -> Vec<f64> {
        self.points.clone()
    }

    /// Mean geodesic curvature of the reconstructed neck.
    pub fn curvature(&self) -> f64 {
        self.curvature
    }

    pub fn expected(&self) -> f64 {
        self.expected
    }
}

/// Reconstructs the sister of `f^c` over one period and returns its neck.
#[wasm_bindgen]
pub fn sister_neck(h: f64, c: f64, n: usize) -> Result<Neck, String> {
    if !(5..=257).contains(&n) {
        return Err("n must lie in 5..=257".into());
    }
    let spec = FcSpec::new(h, c).map_err(|e| e.to_string())?;
    let a = spec.axis_x();
    let w = 0.44 * PI / spec.params.kappa().sqrt();
    let ny = 4 * (n / 2) + 1;
    let lat =
        Lattice::spanning((a - w, a + w), (0.0, 2.0 * t_half(h, c)), 2 * (n / 2) + 1, ny).map_err(|e| e.to_string())?;
    let data = surface_data(&spec.params, &|x, y| *fc_raw(&spec, x, y).coords(), &lat).map_err(|e| e.to_string())?;
    let sis = sister_data(h, &data).map_err(|e| e.to_string())?;
    let g = reconstruct_sister(&sis, &Seed::at((n / 2, 0))).map_err(|e| e.to_string())?;
    let axis = h2_points(&g.column((g.lattice.nx - 1) / 2));
    let ks = geodesic_curvature_h2(&axis, false).map_err(|e| e.to_string())?;
    let points = axis.iter().flat_map(|x| [x[1] / (1.0 + x[0]), x[2] / (1.0 + x[0])]).collect();
    Ok(Neck { points, curvature: ks.iter().map(|k| k.abs()).sum::<f64>() / ks.len() as f64, expected: k_neck(h, c) })
}
