use std::f64::consts::PI;

use berger_demo::*;

#[test]
fn constants_at_h1() {
    let v = constants(1.0, 1.0).unwrap();
    assert_eq!(v[0], 2.0);
    assert!((v[1] - PI / 3f64.sqrt()).abs() < 1e-15);
    assert!((v[3] - 2.0 * PI / 3.0).abs() < 1e-15);
    assert!(constants(0.4, 1.0).is_err());
}

#[test]
fn surface_buffers_match() {
    let v = surface_vertices(1.0, 0.5, 12, 6).unwrap();
    let f = surface_faces(1.0, 0.5, 12, 6).unwrap();
    assert_eq!(v.len(), 3 * 72);
    assert_eq!(f.len() % 3, 0);
    assert!(f.iter().all(|&i| (i as usize) < 72));
    assert!(v.iter().all(|x| x.is_finite()));
}

#[test]
fn neck_closes_with_expected_curvature() {
    let neck = sister_neck(1.0, 0.5, 33).unwrap();
    assert!((neck.curvature() - neck.expected()).abs() < 1e-3);
    let p = neck.points();
    let (first, last) = ((p[0], p[1]), (p[p.len() - 2], p[p.len() - 1]));
    assert!((first.0 - last.0).hypot(first.1 - last.1) < 1e-3);
    assert!(p.chunks(2).all(|q| q[0].hypot(q[1]) < 1.0));
    assert!(sister_neck(1.0, 0.5, 3).is_err());
}
