//! Text formats shared by the tools.

/// A float with 17 significant digits, round-trip exact.
pub fn fmt17(x: f64) -> String {
    format!("{x:.16e}")
}

/// Polyline CSV with columns `t,a,b,c,d`.
pub fn curve_csv(samples: &[(f64, [f64; 4])]) -> String {
    let mut out = String::from("t,a,b,c,d\n");
    for (t, p) in samples {
        out.push_str(&fmt17(*t));
        for v in p {
            out.push(',');
            out.push_str(&fmt17(*v));
        }
        out.push('\n');
    }
    out
}
