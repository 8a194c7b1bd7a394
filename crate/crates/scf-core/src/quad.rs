//! Adaptive Simpson quadrature, used as the independent integration oracle
//! for the closed-form measures and densities.

fn simpson(a: f64, fa: f64, b: f64, fb: f64, fm: f64) -> f64 {
    (b - a) / 6.0 * (fa + 4.0 * fm + fb)
}

#[allow(clippy::too_many_arguments)]
fn recurse(
    f: &impl Fn(f64) -> f64,
    a: f64,
    fa: f64,
    b: f64,
    fb: f64,
    fm: f64,
    whole: f64,
    tol: f64,
    depth: u32,
) -> f64 {
    let m = 0.5 * (a + b);
    let lm = 0.5 * (a + m);
    let rm = 0.5 * (m + b);
    let flm = f(lm);
    let frm = f(rm);
    let left = simpson(a, fa, m, fm, flm);
    let right = simpson(m, fm, b, fb, frm);
    let delta = left + right - whole;
    if depth == 0 || delta.abs() <= 15.0 * tol {
        return left + right + delta / 15.0;
    }
    recurse(f, a, fa, m, fm, flm, left, 0.5 * tol, depth - 1)
        + recurse(f, m, fm, b, fb, frm, right, 0.5 * tol, depth - 1)
}

/// Integrate `f` over `[a, b]` to absolute tolerance `tol`.
pub fn adaptive_simpson(f: impl Fn(f64) -> f64, a: f64, b: f64, tol: f64) -> f64 {
    if a == b {
        return 0.0;
    }
    let fa = f(a);
    let fb = f(b);
    let m = 0.5 * (a + b);
    let fm = f(m);
    let whole = simpson(a, fa, b, fb, fm);
    recurse(&f, a, fa, b, fb, fm, whole, tol, 22)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn polynomials_and_transcendentals() {
        let v = adaptive_simpson(|x| x * x, 0.0, 1.0, 1e-12);
        assert!((v - 1.0 / 3.0).abs() < 1e-12);
        let v = adaptive_simpson(|x| x.sin(), 0.0, std::f64::consts::PI, 1e-12);
        assert!((v - 2.0).abs() < 1e-11);
        let v = adaptive_simpson(|x| 1.0 / (1.0 + x), 0.0, 1.0, 1e-13);
        assert!((v - 2f64.ln()).abs() < 1e-12);
    }
}
