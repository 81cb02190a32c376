use berger::berger::{quat_mul_raw, BergerParams, S3Point};
use berger::connection::{christoffel_fd, connection_table, DEFAULT_FD_STEP};
use berger::daniel::*;
use berger::geodesics::{horizontal_geodesic, vertical_geodesic, GreatCircle};
use berger::h2r::{circle_geometry, geodesic_curvature_h2, polyline_length_h2};
use berger::intersect::self_intersection_test;
use berger::linalg::{add4, dist4, dot4, normalize4, scale4, Vec4};
use berger::mesh::{coons_disk, helicoid_mesh, umbrella_mesh, Topology};
use berger::plateau::{
    area_gradient, discrete_area, graphicality, max_residual, mean_curvature_residual, minimize_area, SolveConfig,
};
use berger::polygon::{build_polygon, reflection_across_gamma3, Edge};
use berger::reflect::extend_by_reflection;
use berger::sampling::{random_point, random_tangent, rng};
use berger::surfaces::*;
use rand::Rng;
use std::f64::consts::PI;
use std::time::Instant;

type Outcome = Result<String, String>;
type Criterion = (&'static str, fn() -> Outcome);

fn check(ok: bool, detail: String) -> Outcome {
    if ok {
        Ok(detail)
    } else {
        Err(detail)
    }
}

fn h1_params() -> BergerParams {
    BergerParams::from_mean_curvature(1.0).unwrap()
}

fn closed_form_constants() -> Outcome {
    let mut worst: f64 = 0.0;
    let mut r = rng(1);
    for (k, t) in [(3.0, 1.0), (4.0, 0.5), (1.3, -0.7)] {
        let p = BergerParams::new(k, t).unwrap();
        for _ in 0..20 {
            let q = random_point(&mut r);
            worst = worst.max(dist4(vertical_geodesic(&p, &q, p.vertical_length()).coords(), q.coords()));
            let phi = r.gen_range(0.0..2.0 * PI);
            worst = worst.max(dist4(horizontal_geodesic(&p, &q, phi, p.horizontal_length()).coords(), q.coords()));
        }
    }
    let errs = [
        (k_neck(1.0, 1.0) - 2.0).abs(),
        (t_half(1.0, 1.0) - PI / 3f64.sqrt()).abs(),
        (k_neck(1.0, 0.0) - 1.25).abs(),
        (t_half(1.0, 0.0) - 4.0 * PI / 3.0).abs(),
        (alpha0(1.0, 1.0) - 2.0 * PI / 3.0).abs(),
    ];
    let e = errs.iter().cloned().fold(0.0, f64::max);
    check(worst < 1e-10 && e < 1e-12, format!("closure={worst:.1e} constants={e:.1e}"))
}

fn connection_table_fd() -> Outcome {
    let mut r = rng(2);
    let mut worst: f64 = 0.0;
    for (k, t) in [(3.0, 1.0), (2.0, -0.4)] {
        let p = BergerParams::new(k, t).unwrap();
        let table = connection_table(&p);
        for _ in 0..100 {
            let fd = christoffel_fd(&p, &random_point(&mut r), DEFAULT_FD_STEP);
            for i in 0..3 {
                for j in 0..3 {
                    for l in 0..3 {
                        worst = worst.max((fd[i][j][l] - table[i][j][l]).abs());
                    }
                }
            }
        }
    }
    check(worst < 1e-6, format!("max entry error {worst:.1e}"))
}

fn polygon_identities() -> Outcome {
    let p = h1_params();
    let max = PI / (2.0 * p.kappa().sqrt());
    let (mut g3, mut h2): (f64, f64) = (0.0, 0.0);
    for i in 0..50 {
        let lam = max * i as f64 / 49.0;
        let poly = build_polygon(&p, lam).map_err(|e| e.to_string())?;
        let corner = *poly.eval(Edge::Gamma2, lam).coords();
        let rho = reflection_across_gamma3(&p, lam);
        let (c1, c2) = (poly.h1(), poly.h2());
        let end = poly.domain(Edge::Gamma3).1;
        for s in 0..100 {
            let t = end * s as f64 / 99.0;
            let v0 = vertical_geodesic(&p, &S3Point::identity(), t);
            g3 = g3.max(dist4(&quat_mul_raw(&corner, v0.coords()), poly.eval(Edge::Gamma3, t).coords()));
            let u = p.horizontal_length() * s as f64 / 100.0;
            h2 = h2.max(dist4(rho.apply(&c1.eval(u)).coords(), c2.eval(u).coords()));
        }
    }
    check(g3 < 1e-10 && h2 < 1e-10, format!("gamma3={g3:.1e} h2={h2:.1e}"))
}

fn minimality_certificates() -> Outcome {
    let p = h1_params();
    let spec = FcSpec::new(1.0, 1.0).unwrap().as_helicoid(1.0).unwrap();
    let hel = |n: usize| max_residual(&mean_curvature_residual(&p, &helicoid_mesh(&spec, 2 * n, n)));
    let umb = |n: usize| max_residual(&mean_curvature_residual(&p, &umbrella_mesh(2 * n, n)));
    let (h0, h1) = (hel(32), hel(64));
    let (u0, u1) = (umb(32), umb(64));
    let (oh, ou) = ((h0 / h1).log2(), (u0 / u1).log2());
    check(
        h1 < 1e-3 && u1 < 1e-3 && oh >= 1.8 && ou >= 1.8,
        format!("helicoid {h1:.2e} order {oh:.2} umbrella {u1:.2e} order {ou:.2}"),
    )
}

fn gradient_check() -> Outcome {
    let p = h1_params();
    let spec = HelicoidSpec::new(p, 0.9, 0.4, 1.0).unwrap();
    let mut m = helicoid_mesh(&spec, 16, 8);
    let mut r = rng(3);
    for i in 0..m.vertices.len() {
        let t = random_tangent(&mut r, &m.vertex(i));
        m.vertices[i] = normalize4(&add4(&m.vertices[i], &scale4(0.01, t.vec())));
    }
    let g = area_gradient(&p, &m);
    let mut worst: f64 = 0.0;
    for _ in 0..20 {
        let dirs: Vec<Vec4> = (0..m.vertices.len()).map(|i| *random_tangent(&mut r, &m.vertex(i)).vec()).collect();
        let area_at = |s: f64| {
            let mut mm = m.clone();
            for (v, d) in mm.vertices.iter_mut().zip(&dirs) {
                *v = add4(v, &scale4(s, d));
            }
            discrete_area(&p, &mm)
        };
        let h = 1e-6;
        let fd = (area_at(h) - area_at(-h)) / (2.0 * h);
        let an: f64 = g.grad.iter().zip(&dirs).map(|(a, b)| dot4(a, b)).sum();
        worst = worst.max(((fd - an) / an.abs()).abs());
    }
    check(worst < 1e-6, format!("max relative error {worst:.1e}"))
}

fn embeddedness_dichotomy() -> Outcome {
    let p = BergerParams::new(4.0, 0.5).unwrap();
    let short = HelicoidSpec::new(p, 2.0 * p.tau() * PI / p.kappa(), 1.0, -1.0).unwrap();
    let long = HelicoidSpec::new(p, 6.0 * p.tau() * PI / p.kappa(), 1.0, -1.0).unwrap();
    let a = self_intersection_test(&helicoid_mesh(&short, 96, 24)).pairs.len();
    let b = self_intersection_test(&helicoid_mesh(&long, 96, 48)).pairs.len();
    check(a == 0 && b > 0, format!("short pairs={a} long pairs={b}"))
}

fn fc_grid(c: f64, nx: usize, ny: usize, periods: f64) -> Result<SisterGrid, String> {
    let spec = FcSpec::new(1.0, c).map_err(|e| e.to_string())?;
    let a = spec.axis_x();
    let lat =
        Lattice::spanning((a - 0.8, a + 0.8), (0.0, periods * t_half(1.0, c)), nx, ny).map_err(|e| e.to_string())?;
    let data = surface_data(&spec.params, &|x, y| *fc_raw(&spec, x, y).coords(), &lat).map_err(|e| e.to_string())?;
    let sis = sister_data(1.0, &data).map_err(|e| e.to_string())?;
    reconstruct_sister(&sis, &Seed::at(((nx - 1) / 2, 0))).map_err(|e| e.to_string())
}

fn sister_reconstruction() -> Outcome {
    let mut ok = true;
    let mut parts = Vec::new();
    for c in [1.0, 0.5, 0.0] {
        let want = k_neck(1.0, c);
        let g = fc_grid(c, 65, 129, 2.0)?;
        let axis = g.column((g.lattice.nx - 1) / 2);
        let k = geodesic_curvature_h2(&h2_points(&axis), false).map_err(|e| e.to_string())?;
        let dk = k.iter().map(|v| (v.abs() - want).abs()).fold(0.0, f64::max);
        let r1 = fc_grid(c, 17, 33, 2.0)?.path_residual;
        let r2 = fc_grid(c, 33, 65, 2.0)?.path_residual;
        // c=1 is integrated almost exactly; its residual sits at rounding level
        let order_ok = if c == 1.0 { r2 < 1e-6 } else { r1 / r2 > 12.0 };
        ok &= dk < 1e-3 && order_ok;
        parts.push(format!("c={c}: dk={dk:.1e} path {r1:.1e}->{r2:.1e}"));
    }
    let g = fc_grid(0.0, 9, 513, 2.0)?;
    let axis = h2_points(&g.column((g.lattice.nx - 1) / 2));
    let length = polyline_length_h2(&axis[..axis.len() - 1], true);
    let want = circle_geometry(k_neck(1.0, 0.0)).unwrap().length;
    let dl = (length - want).abs();
    let gap = g.column(4)[0].distance(g.column(4).last().unwrap());
    ok &= dl < 1e-3 && gap < 1e-3;
    parts.push(format!("neck length error {dl:.1e} closure {gap:.1e}"));
    check(ok, parts.join("; "))
}

fn mirror_dictionary() -> Outcome {
    let mut worst: f64 = 0.0;
    let mut vertical = true;
    for c in [1.0, 0.5, 0.0] {
        let g = fc_grid(c, 65, 65, 1.0)?;
        for line in [GridLine::Row(0), GridLine::Row(g.lattice.ny - 1)] {
            let f = fit_mirror(&g, line);
            vertical &= matches!(f.plane, MirrorPlane::Vertical { .. });
            worst = worst.max(f.deviation);
        }
    }
    check(vertical && worst < 1e-4, format!("vertical={vertical} max plane deviation {worst:.1e}"))
}

fn plateau_pipeline() -> Outcome {
    let p = h1_params();
    let lam = PI / (4.0 * 3f64.sqrt());
    let poly = build_polygon(&p, lam).map_err(|e| e.to_string())?;
    let n = 33;
    let cfg = SolveConfig { tol: 1e-5, ..Default::default() };
    let (mesh, rep) = minimize_area(&p, &coons_disk(&poly, n), &cfg);
    let res = max_residual(&mean_curvature_residual(&p, &mesh));
    let graph = graphicality(&p, &mesh).graphical;

    let ext = extend_by_reflection(&mesh, &poly.reflection_across(Edge::Gamma2), 1)
        .and_then(|m| extend_by_reflection(&m, &poly.reflection_across(Edge::Gamma4), 3))
        .and_then(|m| extend_by_reflection(&m, &poly.reflection_across(Edge::Gamma3), 2))
        .map_err(|e| e.to_string())?;
    let (c1, c2) = (poly.h1().great_circle(), poly.h2().great_circle());
    let loops = ext.boundary_loops();
    let on = |l: &Vec<usize>, g: &GreatCircle| l.iter().all(|&i| g.distance(&ext.vertices[i]) < 1e-12);
    let winds = |l: &Vec<usize>, g: &GreatCircle| {
        let total: f64 = (0..l.len())
            .map(|k| {
                let a = g.param_of(&ext.vertices[l[k]]);
                let b = g.param_of(&ext.vertices[l[(k + 1) % l.len()]]);
                (b - a + PI).rem_euclid(2.0 * PI) - PI
            })
            .sum();
        (total.abs() - 2.0 * PI).abs() < 1e-9
    };
    let boundary_ok = ext.topology == Topology::Annulus
        && loops.len() == 2
        && ((on(&loops[0], &c1) && on(&loops[1], &c2)) || (on(&loops[0], &c2) && on(&loops[1], &c1)))
        && loops.iter().all(|l| winds(l, if on(l, &c1) { &c1 } else { &c2 }));

    let lat = Lattice::spanning((0.0, 1.0), (0.0, 1.0), n, n).unwrap();
    let data = surface_data_mesh(&p, &mesh, &lat).map_err(|e| e.to_string())?;
    let sis = sister_data(1.0, &data).map_err(|e| e.to_string())?;
    let g = reconstruct_sister(&sis, &Seed::at((0, 0))).map_err(|e| e.to_string())?;
    let m = g.lattice.nx;
    let d = hypotheses_and_axis(
        &g,
        &BoundarySpec {
            mirrors: vec![GridLine::Row(0), GridLine::Column(0), GridLine::Row(m - 1), GridLine::Column(m - 1)],
            boundary: vec![GridLine::Row(0)],
            period: PeriodSource::Reflections { lines: vec![GridLine::Column(0), GridLine::Column(m - 1)], power: 2 },
            closure_tol: 1e-6,
            check_embedding: false,
        },
    );
    let da = (d.axis.alpha - PI / 2.0).abs();
    check(
        res < 1e-3 && graph && boundary_ok && da < 0.05,
        format!(
            "residual={res:.1e} stop={} graphical={graph} annulus_h1_h2={boundary_ok} alpha={:.4} ({:?})",
            rep.stop.as_str(),
            d.axis.alpha,
            d.axis.class
        ),
    )
}

fn lawson_consistency() -> Outcome {
    let mut r = rng(4);
    let mut worst: f64 = 0.0;
    for _ in 0..10_000 {
        let n = r.gen_range(0.1..4.0);
        let x = r.gen_range(0.0..2.0 * PI);
        let y = r.gen_range(0.0..0.5);
        let spec = lawson_helicoid(n).map_err(|e| e.to_string())?;
        let a = lawson_point(n, x, y);
        let b = helicoid_point(&spec, x, 2.0 * y).map_err(|e| e.to_string())?;
        worst = worst.max(dist4(a.coords(), b.coords()));
    }
    check(worst < 1e-12, format!("max distance {worst:.1e}"))
}

fn tcal_monotone() -> Outcome {
    let vals: Vec<f64> = (0..1000).map(|i| tcal(1.0, i as f64 / 999.0)).collect();
    let decreasing = vals.windows(2).all(|w| w[1] < w[0]);
    let t1 = tcal(1.0, 1.0);
    check(
        decreasing && tcal(1.0, 0.0) == PI && t1 > 0.0 && t1 < PI,
        format!("decreasing={decreasing} T(0)={} T(1)={t1}", tcal(1.0, 0.0)),
    )
}

fn gauss_bonnet() -> Outcome {
    let mut r = rng(5);
    let mut worst: f64 = 0.0;
    for _ in 0..100 {
        let k = 1.0 + r.gen_range(1e-3..50.0);
        let c = circle_geometry(k).map_err(|e| e.to_string())?;
        worst = worst.max((-c.area + c.length * k - 2.0 * PI).abs());
    }
    check(worst < 1e-12, format!("max defect {worst:.1e}"))
}

fn main() {
    let criteria: [Criterion; 12] = [
        ("closed-form constants", closed_form_constants),
        ("connection table", connection_table_fd),
        ("polygon identities", polygon_identities),
        ("minimality certificates", minimality_certificates),
        ("area gradient", gradient_check),
        ("embeddedness dichotomy", embeddedness_dichotomy),
        ("sister reconstruction", sister_reconstruction),
        ("mirror curves", mirror_dictionary),
        ("plateau pipeline", plateau_pipeline),
        ("lawson helicoid", lawson_consistency),
        ("neck period monotonicity", tcal_monotone),
        ("circle gauss-bonnet", gauss_bonnet),
    ];
    let filter: Vec<String> = std::env::args().skip(1).filter(|a| !a.starts_with('-')).collect();
    let mut failed = 0;
    for (i, (name, f)) in criteria.iter().enumerate() {
        if !filter.is_empty() && !filter.iter().any(|s| name.contains(s.as_str())) {
            continue;
        }
        let t0 = Instant::now();
        let out = f();
        let secs = t0.elapsed().as_secs_f64();
        match out {
            Ok(d) => println!("criterion {:2} PASS {name}: {d} [{secs:.1}s]", i + 1),
            Err(d) => {
                failed += 1;
                println!("criterion {:2} FAIL {name}: {d} [{secs:.1}s]", i + 1);
            }
        }
    }
    if failed > 0 {
        std::process::exit(1);
    }
}
