use std::f64::consts::PI;
use std::path::Path;

use berger::checks::identity_suite;
use berger::daniel::*;
use berger::geodesics::HorizontalGeodesic;
use berger::h2r::geodesic_curvature_h2;
use berger::io::fmt17;
use berger::linalg::{add4, dist4, normalize4, scale4};
use berger::mesh::{
    coons_disk, helicoid_mesh, read_s3mesh, umbrella_mesh, write_obj, write_s3mesh, Projection, TriMesh,
};
use berger::plateau::{minimize_area, SolveConfig};
use berger::polygon::{build_polygon, reflection_across_gamma3, Edge, GeodesicPolygon};
use berger::sampling::{random_tangent, rng};
use berger::surfaces::*;
use berger::unduloid::{self, AnnulusFamily, SweepRow};
use berger::{check_isometry, BergerParams};

use crate::config::{ConfigError, RunConfig};
use crate::Failure;

type Run = Result<(), Failure>;

fn bad(msg: impl Into<String>) -> Failure {
    Failure::Config(msg.into())
}

fn params(cfg: &RunConfig) -> Result<BergerParams, Failure> {
    match (cfg.get::<f64>("params.kappa")?, cfg.get::<f64>("params.tau")?) {
        (None, None) => Ok(BergerParams::from_mean_curvature(cfg.get_or("surface.H", 1.0)?)?),
        (Some(k), Some(t)) => Ok(BergerParams::new(k, t)?),
        _ => Err(bad("params.kappa and params.tau must be given together")),
    }
}

/// `H`, checked against `κ = 4H² − 1, τ = H` when the ambient is given too.
fn mean_curvature(cfg: &RunConfig) -> Result<f64, Failure> {
    let h = cfg.get_or("surface.H", 1.0)?;
    if cfg.raw("params.kappa").is_some() || cfg.raw("params.tau").is_some() {
        let p = params(cfg)?;
        let q = BergerParams::from_mean_curvature(h)?;
        if (p.kappa() - q.kappa()).abs() > 1e-12 || (p.tau() - q.tau()).abs() > 1e-12 {
            return Err(bad(format!("kappa={} tau={} do not match H={h}", p.kappa(), p.tau())));
        }
    }
    Ok(h)
}

fn solver_config(cfg: &RunConfig) -> Result<SolveConfig, ConfigError> {
    let d = SolveConfig::default();
    Ok(SolveConfig { tol: cfg.get_or("solver.tol", 1e-5)?, max_iter: cfg.get_or("solver.max_iter", d.max_iter)?, ..d })
}

fn extension(cfg: &RunConfig) -> Option<String> {
    cfg.raw("output.out").and_then(|p| Path::new(p).extension()).map(|e| e.to_string_lossy().to_lowercase())
}

fn emit(cfg: &RunConfig, text: &str) -> Run {
    match cfg.raw("output.out") {
        Some(path) => std::fs::write(path, text).map_err(|e| bad(format!("{path}: {e}"))),
        None => {
            print!("{text}");
            Ok(())
        }
    }
}

fn emit_mesh(cfg: &RunConfig, p: &BergerParams, m: &TriMesh) -> Run {
    let text = match extension(cfg).as_deref() {
        None | Some("s3mesh") => write_s3mesh(m),
        Some("obj") => {
            let proj = match cfg.raw("output.projection").unwrap_or("hopf") {
                "hopf" => Projection::Hopf,
                "stereographic" => Projection::Stereographic,
                other => return Err(bad(format!("unknown projection {other:?}"))),
            };
            write_obj(m, p, proj)
        }
        Some(e) => return Err(bad(format!("meshes are written as .s3mesh or .obj, not .{e}"))),
    };
    emit(cfg, &text)
}

fn helicoid_spec(cfg: &RunConfig, p: BergerParams) -> Result<HelicoidSpec, Failure> {
    let ell = cfg.get_or("surface.ell", 2.0 * p.tau().abs() * PI / p.kappa())?;
    Ok(HelicoidSpec::new(p, ell, cfg.get_or("surface.phi", PI)?, cfg.get_or("surface.sign", -1.0)?)?)
}

pub fn gen_helicoid(cfg: &RunConfig) -> Run {
    let nx = cfg.get_or("mesh.nx", 64)?;
    let ny = cfg.get_or("mesh.ny", 32)?;
    if nx < 2 || ny < 2 {
        return Err(bad("mesh.nx and mesh.ny must be at least 2"));
    }
    let (p, spec) =
        match cfg.raw("surface.kind").unwrap_or(if cfg.raw("surface.c").is_some() { "fc" } else { "helicoid" }) {
            "helicoid" => {
                let p = params(cfg)?;
                (p, helicoid_spec(cfg, p)?)
            }
            "fc" => {
                let h = mean_curvature(cfg)?;
                let c = cfg.get_or("surface.c", 1.0)?;
                let fc = FcSpec::new(h, c)?;
                (fc.params, fc.as_helicoid(2.0 * t_half(h, c))?)
            }
            "lawson" => (BergerParams::round(), lawson_helicoid(cfg.get_or("surface.n", 1.0)?)?),
            other => return Err(bad(format!("unknown surface.kind {other:?}"))),
        };
    emit_mesh(cfg, &p, &helicoid_mesh(&spec, nx, ny))
}

fn polygon_for(cfg: &RunConfig, p: &BergerParams) -> Result<GeodesicPolygon, Failure> {
    let lambda = cfg.get_or("polygon.lambda", PI / (4.0 * p.kappa().sqrt()))?;
    Ok(build_polygon(p, lambda)?)
}

pub fn polygon(cfg: &RunConfig) -> Run {
    let p = params(cfg)?;
    let poly = polygon_for(cfg, &p)?;
    let n: usize = cfg.get_or("mesh.nx", 65)?;
    if n < 2 {
        return Err(bad("mesh.nx must be at least 2"));
    }
    let mut csv = String::from("edge,t,a,b,c,d\n");
    for (name, e) in
        [("gamma1", Edge::Gamma1), ("gamma2", Edge::Gamma2), ("gamma3", Edge::Gamma3), ("gamma4", Edge::Gamma4)]
    {
        let (a, b) = poly.domain(e);
        for k in 0..n {
            let t = a + (b - a) * k as f64 / (n - 1) as f64;
            let q = poly.eval(e, t);
            let row: Vec<String> = std::iter::once(t).chain(q.coords().iter().cloned()).map(fmt17).collect();
            csv.push_str(&format!("{name},{}\n", row.join(",")));
        }
    }
    emit(cfg, &csv)?;

    let rho = reflection_across_gamma3(&p, poly.lambda);
    let accepted = check_isometry(&p, rho.matrix()).is_ok();
    let (h1, h2): (HorizontalGeodesic, HorizontalGeodesic) = (poly.h1(), poly.h2());
    let rho_err = (0..200)
        .map(|k| {
            let u = p.horizontal_length() * k as f64 / 200.0;
            dist4(rho.apply(&h1.eval(u)).coords(), h2.eval(u).coords())
        })
        .fold(0.0, f64::max);
    let closure = poly.closure_defect();
    let ok = accepted && closure < 1e-10 && rho_err < 1e-10;
    eprintln!(
        "lambda={} closure_defect={} rho_isometry={accepted} rho_h1_to_h2={} ok={ok}",
        fmt17(poly.lambda),
        fmt17(closure),
        fmt17(rho_err)
    );
    if ok {
        Ok(())
    } else {
        Err(Failure::Verify("polygon identities".into()))
    }
}

fn perturb(m: &mut TriMesh, amount: f64, seed: u64) {
    if amount == 0.0 {
        return;
    }
    let mut r = rng(seed);
    for i in 0..m.vertices.len() {
        if !m.is_pinned(i) {
            let t = random_tangent(&mut r, &m.vertex(i));
            m.vertices[i] = normalize4(&add4(&m.vertices[i], &scale4(amount, t.vec())));
        }
    }
}

pub fn solve(cfg: &RunConfig) -> Run {
    let p = params(cfg)?;
    let nx = cfg.get_or("mesh.nx", 17)?;
    let ny = cfg.get_or("mesh.ny", nx)?;
    if nx < 3 || ny < 3 {
        return Err(bad("mesh.nx and mesh.ny must be at least 3"));
    }
    let mut seed = match cfg.raw("solver.seed_mesh").unwrap_or("coons") {
        "coons" => coons_disk(&polygon_for(cfg, &p)?, nx),
        "umbrella" => umbrella_mesh(nx, ny),
        "helicoid" => helicoid_mesh(&helicoid_spec(cfg, p)?, nx, ny),
        path => {
            let text = std::fs::read_to_string(path).map_err(|e| bad(format!("{path}: {e}")))?;
            read_s3mesh(&text)?
        }
    };
    perturb(&mut seed, cfg.get_or("solver.noise", 0.0)?, cfg.get_or("solver.rng_seed", 0)?);
    let (mesh, report) = minimize_area(&p, &seed, &solver_config(cfg)?);
    emit_mesh(cfg, &p, &mesh)?;
    eprintln!("{report}");
    if report.converged {
        Ok(())
    } else {
        Err(Failure::NoConvergence(format!("stop={}", report.stop.as_str())))
    }
}

fn emit_sister(cfg: &RunConfig, g: &SisterGrid) -> Run {
    match extension(cfg).as_deref() {
        None | Some("csv") => emit(cfg, &g.to_csv()),
        Some("h2rmesh") => emit(cfg, &g.to_h2rmesh()),
        Some(e) => Err(bad(format!("sisters are written as .csv or .h2rmesh, not .{e}"))),
    }
}

fn diagnostics_line(g: &SisterGrid, d: &Diagnostics) -> String {
    format!(
        "path_residual={} metric_residual={} axis_slope={} axis_class={:?} delta={} shift={} period_residual={} compatible={}",
        fmt17(g.path_residual),
        fmt17(g.metric_residual),
        fmt17(d.axis.alpha),
        d.axis.class,
        fmt17(d.axis.delta),
        fmt17(d.axis.shift),
        fmt17(d.period_residual),
        g.is_compatible()
    )
}

fn finish_sister(g: &SisterGrid, line: String) -> Run {
    eprintln!("{line}");
    if g.is_compatible() {
        Ok(())
    } else {
        Err(Failure::NoConvergence(format!("path residual {} above tolerance", fmt17(g.path_residual))))
    }
}

pub fn sister(cfg: &RunConfig) -> Run {
    let h = mean_curvature(cfg)?;
    match cfg.get::<f64>("surface.c")? {
        Some(c) => sister_fc(cfg, h, c),
        None => sister_polygon(cfg, h),
    }
}

fn sister_fc(cfg: &RunConfig, h: f64, c: f64) -> Run {
    let spec = FcSpec::new(h, c)?;
    let nx: usize = cfg.get_or("mesh.nx", 33)?;
    let ny: usize = cfg.get_or("mesh.ny", 2 * nx - 1)?;
    if nx < 3 || ny < 3 || ny.is_multiple_of(2) {
        return Err(bad("sister needs mesh.nx >= 3 and an odd mesh.ny >= 3"));
    }
    let a = spec.axis_x();
    let w = 0.44 * PI / spec.params.kappa().sqrt();
    let lat = Lattice::spanning((a - w, a + w), (0.0, 2.0 * t_half(h, c)), nx, ny)?;
    let data = surface_data(&spec.params, &|x, y| *fc_raw(&spec, x, y).coords(), &lat)?;
    let g = reconstruct_sister(&sister_data(h, &data)?, &Seed::at(((nx - 1) / 2, 0)))?;
    let (gx, half) = (g.lattice.nx, (g.lattice.ny - 1) / 2);
    let d = hypotheses_and_axis(
        &g,
        &BoundarySpec {
            mirrors: vec![GridLine::Row(0), GridLine::Row(half)],
            boundary: vec![GridLine::Row(0)],
            period: PeriodSource::Shift { di: 0, dj: half },
            closure_tol: 1e-6,
            check_embedding: false,
        },
    );
    let axis = h2_points(&g.column((gx - 1) / 2));
    let ks = geodesic_curvature_h2(&axis, false)?;
    let k_mean = ks.iter().map(|k| k.abs()).sum::<f64>() / ks.len() as f64;
    emit_sister(cfg, &g)?;
    finish_sister(
        &g,
        format!(
            "H={} c={} k_neck={} k_neck_measured={} {}",
            fmt17(h),
            fmt17(c),
            fmt17(k_neck(h, c)),
            fmt17(k_mean),
            diagnostics_line(&g, &d)
        ),
    )
}

fn sister_polygon(cfg: &RunConfig, h: f64) -> Run {
    let p = BergerParams::from_mean_curvature(h)?;
    let poly = polygon_for(cfg, &p)?;
    let n: usize = cfg.get_or("mesh.nx", 33)?;
    if n < 3 {
        return Err(bad("mesh.nx must be at least 3"));
    }
    let (mesh, report) = minimize_area(&p, &coons_disk(&poly, n), &solver_config(cfg)?);
    if !report.converged {
        eprintln!("{report}");
        return Err(Failure::NoConvergence(format!("plateau solve stop={}", report.stop.as_str())));
    }
    let lat = Lattice::spanning((0.0, 1.0), (0.0, 1.0), n, n)?;
    let g = reconstruct_sister(&sister_data(h, &surface_data_mesh(&p, &mesh, &lat)?)?, &Seed::at((0, 0)))?;
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
    emit_sister(cfg, &g)?;
    finish_sister(
        &g,
        format!(
            "H={} lambda={} area={} {}",
            fmt17(h),
            fmt17(poly.lambda),
            fmt17(report.area),
            diagnostics_line(&g, &d)
        ),
    )
}

pub fn tables(cfg: &RunConfig) -> Run {
    let hs = match cfg.list("tables.H")? {
        Some(v) => v,
        None => vec![cfg.get_or("surface.H", 1.0)?],
    };
    let cs = match cfg.list("tables.c")? {
        Some(v) => v,
        None => match cfg.get::<f64>("surface.c")? {
            Some(c) => vec![c],
            None => vec![0.0, 0.25, 0.5, 0.75, 1.0],
        },
    };
    emit(cfg, &tables_csv(&hs, &cs)?)
}

pub fn verify(cfg: &RunConfig) -> Run {
    let checks = identity_suite();
    let mut text = String::new();
    for c in &checks {
        text.push_str(&format!("{} {} {}\n", if c.passed { "PASS" } else { "FAIL" }, c.name, c.detail));
    }
    let failed: Vec<&str> = checks.iter().filter(|c| !c.passed).map(|c| c.name).collect();
    text.push_str(&format!("checks={} failed={}\n", checks.len(), failed.len()));
    emit(cfg, &text)?;
    if failed.is_empty() {
        Ok(())
    } else {
        Err(Failure::Verify(failed.join(",")))
    }
}

pub fn sweep(cfg: &RunConfig) -> Run {
    let h = mean_curvature(cfg)?;
    let family = AnnulusFamily::new(h, cfg.get_or("surface.c", 1.0)?)?;
    let a0 = family.alpha0;
    let alphas = cfg.list("sweep.alpha")?.unwrap_or_else(|| vec![a0 - 0.05, a0, a0 + 0.05]);
    let n: usize = cfg.get_or("mesh.nx", 17)?;
    if n < 3 {
        return Err(bad("mesh.nx must be at least 3"));
    }
    let rows = unduloid::sweep(&family, &alphas, n, &solver_config(cfg)?)?;
    let mut csv = format!("{}\n", SweepRow::CSV_HEADER);
    for r in &rows {
        csv.push_str(&r.csv_line());
        csv.push('\n');
    }
    emit(cfg, &csv)?;
    eprintln!("H={} c={} alpha0={} rows={}", fmt17(h), fmt17(family.c), fmt17(a0), rows.len());
    match rows.iter().find(|r| !r.solve.converged) {
        None => Ok(()),
        Some(r) => Err(Failure::NoConvergence(format!("alpha={} stop={}", fmt17(r.alpha), r.solve.stop.as_str()))),
    }
}
