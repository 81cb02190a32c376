//! Extension of a mesh by an isometry fixing one of its boundary curves.

use crate::error::{GeomError, Result};
use crate::geodesics::GreatCircle;
use crate::isometry::AmbientIsometry;
use crate::linalg::dist4;
use crate::mesh::{BoundaryTag, Topology, TriMesh, BOUNDARY_TOL};

/// Tolerance for the glue curve being fixed and for vertices lying on it.
pub const GLUE_TOL: f64 = 1e-9;

/// Welds `mesh` to its image under `iso` along boundary curve `glue`. The
/// copy has reversed winding so the result is consistently oriented. Curves
/// of the copy that coincide with existing curves are shared; pinned
/// vertices that end up interior are released.
pub fn extend_by_reflection(mesh: &TriMesh, iso: &AmbientIsometry, glue: usize) -> Result<TriMesh> {
    let circle =
        *mesh.curves.get(glue).ok_or_else(|| GeomError::InvalidParameter(format!("no boundary curve {glue}")))?;
    let samples: Vec<_> = (0..16).map(|k| circle.eval(k as f64 * std::f64::consts::TAU / 16.0)).collect();
    let moved = iso.max_displacement(samples.iter());
    if moved > GLUE_TOL {
        return Err(GeomError::GlueNotFixed(moved));
    }

    let n = mesh.vertices.len();
    let on_glue: Vec<bool> =
        (0..n).map(|i| mesh.is_pinned(i) && circle.distance(&mesh.vertices[i]) < GLUE_TOL).collect();
    if !on_glue.iter().any(|&b| b) {
        return Err(GeomError::Degenerate(format!("no mesh vertex lies on curve {glue}")));
    }

    // curves: originals, then images not already present
    let mut curves: Vec<GreatCircle> = mesh.curves.clone();
    let mut curve_map = Vec::with_capacity(mesh.curves.len());
    for c in &mesh.curves {
        let img = c.transformed(iso.matrix());
        match curves.iter().position(|e| e.same_set(&img, 1e-9)) {
            Some(k) => curve_map.push(k),
            None => {
                curves.push(img);
                curve_map.push(curves.len() - 1);
            }
        }
    }

    let mut index = vec![0usize; n];
    let mut vertices = mesh.vertices.clone();
    let mut tags: Vec<Option<usize>> = mesh.boundary.iter().map(|b| b.map(|t| t.curve)).collect();
    for i in 0..n {
        if on_glue[i] {
            index[i] = i;
        } else {
            index[i] = vertices.len();
            vertices.push(iso.apply_raw(&mesh.vertices[i]));
            tags.push(mesh.boundary[i].map(|t| curve_map[t.curve]));
        }
    }
    let mut faces = mesh.faces.clone();
    faces.extend(mesh.faces.iter().map(|f| [index[f[0]], index[f[2]], index[f[1]]]));

    let mut out = TriMesh {
        boundary: vec![None; vertices.len()],
        vertices,
        faces,
        curves,
        topology: Topology::Other,
        grid: None,
    };
    let mut on_boundary = vec![false; out.vertices.len()];
    for (a, b) in out.boundary_edges() {
        on_boundary[a] = true;
        on_boundary[b] = true;
    }
    for i in 0..out.vertices.len() {
        let Some(hint) = tags[i] else { continue };
        if !on_boundary[i] {
            continue;
        }
        let v = out.vertices[i];
        let pick = |k: usize| out.curves[k].distance(&v) < BOUNDARY_TOL;
        let curve = if hint != glue && pick(hint) {
            Some(hint)
        } else {
            (0..out.curves.len()).filter(|&k| k != glue).find(|&k| pick(k)).or_else(|| pick(glue).then_some(glue))
        };
        if let Some(k) = curve {
            out.boundary[i] = Some(BoundaryTag { curve: k, param: out.curves[k].param_of(&v) });
        }
    }
    out.topology = match (out.euler_characteristic(), out.boundary_loops().len()) {
        (1, 1) => Topology::Disk,
        (0, 2) => Topology::Annulus,
        _ => Topology::Other,
    };
    Ok(out)
}

/// Largest distance from the vertices of `a` to the nearest vertex of `b`.
pub fn vertex_set_distance(a: &TriMesh, b: &TriMesh) -> f64 {
    a.vertices.iter().map(|v| b.vertices.iter().map(|w| dist4(v, w)).fold(f64::INFINITY, f64::min)).fold(0.0, f64::max)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::berger::BergerParams;
    use crate::mesh::coons_disk;
    use crate::plateau::{mean_curvature_residual, minimize_area, SolveConfig};
    use crate::polygon::{build_polygon, Edge};
    use std::f64::consts::PI;

    fn setup() -> (BergerParams, crate::polygon::GeodesicPolygon, TriMesh) {
        let p = BergerParams::from_mean_curvature(1.0).unwrap();
        let poly = build_polygon(&p, PI / (4.0 * 3f64.sqrt())).unwrap();
        let (m, _) = minimize_area(&p, &coons_disk(&poly, 9), &SolveConfig::default());
        (p, poly, m)
    }

    #[test]
    fn rejects_isometry_moving_glue() {
        let (_, poly, m) = setup();
        let e = extend_by_reflection(&m, &poly.reflection_across(Edge::Gamma4), 1);
        assert!(matches!(e, Err(GeomError::GlueNotFixed(_))));
    }

    #[test]
    fn residual_preserved_on_copy() {
        let (p, poly, m) = setup();
        let ext = extend_by_reflection(&m, &poly.reflection_across(Edge::Gamma2), 1).unwrap();
        assert_eq!(ext.topology, Topology::Disk);
        ext.validate().unwrap();
        let r0 = mean_curvature_residual(&p, &m);
        let r1 = mean_curvature_residual(&p, &ext);
        let mut copy_index = m.vertices.len();
        for i in 0..m.vertices.len() {
            if m.boundary[i].is_some_and(|t| t.curve == 1)
                || (m.is_pinned(i) && m.curves[1].distance(&m.vertices[i]) < 1e-9)
            {
                continue;
            }
            if !m.is_pinned(i) {
                assert!((r0[i] - r1[copy_index]).abs() < 1e-12);
            }
            copy_index += 1;
        }
    }

    #[test]
    fn reflecting_twice_returns_original_set() {
        let (_, poly, m) = setup();
        let iso = poly.reflection_across(Edge::Gamma2);
        let img = m.transformed(iso.matrix()).transformed(iso.matrix());
        assert!(vertex_set_distance(&img, &m) < 1e-12);
    }

    #[test]
    fn three_reflections_bound_h1_and_h2() {
        let (p, poly, m) = setup();
        let a = extend_by_reflection(&m, &poly.reflection_across(Edge::Gamma2), 1).unwrap();
        let b = extend_by_reflection(&a, &poly.reflection_across(Edge::Gamma4), 3).unwrap();
        let c = extend_by_reflection(&b, &poly.reflection_across(Edge::Gamma3), 2).unwrap();
        assert_eq!(b.topology, Topology::Annulus);
        assert_eq!(c.topology, Topology::Annulus);
        c.validate().unwrap();
        assert_eq!(c.faces.len(), 8 * m.faces.len());
        let (c1, c2) = (poly.h1().great_circle(), poly.h2().great_circle());
        let loops = c.boundary_loops();
        let on = |l: &Vec<usize>, g: &GreatCircle| l.iter().all(|&i| g.distance(&c.vertices[i]) < 1e-12);
        assert!((on(&loops[0], &c1) && on(&loops[1], &c2)) || (on(&loops[0], &c2) && on(&loops[1], &c1)));
        // each loop winds once: the angles along it cover 2π exactly once
        for l in &loops {
            let g = if on(l, &c1) { c1 } else { c2 };
            let mut total = 0.0;
            for k in 0..l.len() {
                let a = g.param_of(&c.vertices[l[k]]);
                let b = g.param_of(&c.vertices[l[(k + 1) % l.len()]]);
                total += (b - a + PI).rem_euclid(2.0 * PI) - PI;
            }
            assert!((total.abs() - 2.0 * PI).abs() < 1e-9);
        }
        let _ = p;
    }
}
