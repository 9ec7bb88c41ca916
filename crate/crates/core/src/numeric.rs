//! Small numerical kernels shared by the closed forms.

/// Below this `|u|` the removable singularities switch to their series.
pub(crate) const SERIES_THRESHOLD: f64 = 1e-4;

/// `sinh(u) / u`, equal to 1 at `u = 0`.
pub(crate) fn sinhc(u: f64) -> f64 {
    if u.abs() < SERIES_THRESHOLD {
        1.0 + u * u / 6.0
    } else {
        u.sinh() / u
    }
}

/// `(cosh(u) - 1) / u`, odd, equal to 0 at `u = 0`.
pub(crate) fn coshm1c(u: f64) -> f64 {
    if u.abs() < SERIES_THRESHOLD {
        u / 2.0 + u * u * u / 24.0
    } else {
        let s = (0.5 * u).sinh();
        2.0 * s * s / u
    }
}

/// `(sinh(u) - u) / u³`, even, equal to 1/6 at `u = 0`.
///
/// The direct quotient cancels badly for small `u`, so the Taylor series
/// `Σ u^{2k} / (2k+3)!` is summed for `|u| < 1`.
pub(crate) fn sinh_minus_id_c3(u: f64) -> f64 {
    if u.abs() < 1.0 {
        let u2 = u * u;
        let mut term: f64 = 1.0 / 6.0;
        let mut sum = term;
        let mut k = 1.0;
        while term.abs() > 1e-18 * sum.abs() {
            term *= u2 / ((2.0 * k + 2.0) * (2.0 * k + 3.0));
            sum += term;
            k += 1.0;
        }
        sum
    } else {
        (u.sinh() - u) / (u * u * u)
    }
}

/// `u · coth(u)`, even, equal to 1 at `u = 0`.
pub(crate) fn u_coth_u(u: f64) -> f64 {
    if u.abs() < SERIES_THRESHOLD {
        1.0 + u * u / 3.0
    } else {
        u / u.tanh()
    }
}

/// Adaptive Simpson quadrature of a vector-valued integrand.
///
/// The error estimate uses the max-norm across components.
pub(crate) fn adaptive_simpson<const N: usize, F>(f: &F, a: f64, b: f64, tol: f64) -> [f64; N]
where
    F: Fn(f64) -> [f64; N],
{
    let fa = f(a);
    let fb = f(b);
    let m = 0.5 * (a + b);
    let fm = f(m);
    let whole = simpson(a, b, &fa, &fm, &fb);
    simpson_step(f, a, b, &fa, &fm, &fb, &whole, tol, 48)
}

fn simpson<const N: usize>(a: f64, b: f64, fa: &[f64; N], fm: &[f64; N], fb: &[f64; N]) -> [f64; N] {
    let h = (b - a) / 6.0;
    std::array::from_fn(|i| h * (fa[i] + 4.0 * fm[i] + fb[i]))
}

#[allow(clippy::too_many_arguments)]
fn simpson_step<const N: usize, F>(
    f: &F,
    a: f64,
    b: f64,
    fa: &[f64; N],
    fm: &[f64; N],
    fb: &[f64; N],
    whole: &[f64; N],
    tol: f64,
    depth: u32,
) -> [f64; N]
where
    F: Fn(f64) -> [f64; N],
{
    let m = 0.5 * (a + b);
    let lm = 0.5 * (a + m);
    let rm = 0.5 * (m + b);
    let flm = f(lm);
    let frm = f(rm);
    let left = simpson(a, m, fa, &flm, fm);
    let right = simpson(m, b, fm, &frm, fb);
    let err = (0..N)
        .map(|i| (left[i] + right[i] - whole[i]).abs())
        .fold(0.0, f64::max);
    if depth == 0 || err <= 15.0 * tol {
        std::array::from_fn(|i| left[i] + right[i] + (left[i] + right[i] - whole[i]) / 15.0)
    } else {
        let l = simpson_step(f, a, m, fa, &flm, fm, &left, 0.5 * tol, depth - 1);
        let r = simpson_step(f, m, b, fm, &frm, fb, &right, 0.5 * tol, depth - 1);
        std::array::from_fn(|i| l[i] + r[i])
    }
}
