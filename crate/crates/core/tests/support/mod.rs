//! Independent reference implementations used as test oracles. Nothing here
//! calls into the crate's numerics.
#![allow(dead_code, clippy::excessive_precision)]

use std::f64::consts::PI;

pub const C: f64 = 299_792_458.0;

// 15-point Kronrod nodes (non-negative half) and weights, with the embedded
// 7-point Gauss weights on the odd-indexed nodes.
const XGK: [f64; 8] = [
    0.991455371120812639206854697526329,
    0.949107912342758524526189684047851,
    0.864864423359769072789712788640926,
    0.741531185599394439863864773280788,
    0.586087235467691130294144845693013,
    0.405845151377397166906606412076961,
    0.207784955007898467600689403773245,
    0.0,
];
const WGK: [f64; 8] = [
    0.022935322010529224963732008058970,
    0.063092092629978553290700663189204,
    0.104790010322250183839876322541518,
    0.140653259715525918745189590510238,
    0.169004726639267902826583426598550,
    0.190350578064785409913256402421014,
    0.204432940075298892414161999234649,
    0.209482141084727828012999174891714,
];
const WG: [f64; 4] = [
    0.129484966168869693270611432679082,
    0.279705391489276667901467771423780,
    0.381830050505118944950369775488975,
    0.417959183673469387755102040816327,
];

fn gk15(f: &impl Fn(f64) -> f64, a: f64, b: f64) -> (f64, f64) {
    let c = 0.5 * (a + b);
    let h = 0.5 * (b - a);
    let fc = f(c);
    let mut k = WGK[7] * fc;
    let mut g = WG[3] * fc;
    for j in 0..7 {
        let x = h * XGK[j];
        let s = f(c - x) + f(c + x);
        k += WGK[j] * s;
        if j % 2 == 1 {
            g += WG[j / 2] * s;
        }
    }
    (k * h, ((k - g) * h).abs())
}

/// Adaptive Gauss–Kronrod quadrature of `f` over `[a, b]` to absolute
/// tolerance `tol`, recursing on intervals whose error estimate is too big.
pub fn integrate(f: &impl Fn(f64) -> f64, a: f64, b: f64, tol: f64) -> f64 {
    fn rec(f: &impl Fn(f64) -> f64, a: f64, b: f64, tol: f64, depth: u32) -> f64 {
        let (v, err) = gk15(f, a, b);
        if err <= tol || depth >= 60 {
            return v;
        }
        let m = 0.5 * (a + b);
        rec(f, a, m, 0.5 * tol, depth + 1) + rec(f, m, b, 0.5 * tol, depth + 1)
    }
    rec(f, a, b, tol, 0)
}

/// Integral over consecutive breakpoints, each piece adaptive.
pub fn integrate_pieces(f: &impl Fn(f64) -> f64, breaks: &[f64], tol: f64) -> f64 {
    let n = (breaks.len() - 1) as f64;
    breaks
        .windows(2)
        .map(|w| integrate(f, w[0], w[1], tol / n))
        .sum()
}

/// Homogeneous line: (α, n−1) for FWHM `gamma` and peak absorption `a0`.
pub fn lorentz(delta: f64, gamma: f64, a0: f64, omega_a: f64) -> (f64, f64) {
    let d = 4.0 * delta * delta + gamma * gamma;
    (
        a0 * gamma * gamma / d,
        -a0 * (C / omega_a) * 2.0 * delta * gamma / d,
    )
}

/// Velocity-averaged homogeneous line: the Lorentzian convolved with the
/// Maxwell distribution exp(−(ν/δ)²)/(√π δ), integrated numerically.
pub fn voigt_by_quadrature(
    delta: f64,
    gamma: f64,
    doppler: f64,
    a0: f64,
    omega_a: f64,
) -> (f64, f64) {
    // substitute ν = δ·t; the Lorentzian is centred at t0 = Δ/δ with half
    // width γ/(2δ), often far narrower than the Gaussian
    let t0 = delta / doppler;
    let hw = 0.5 * gamma / doppler;
    let lim = 12.0_f64.max(t0.abs() + 12.0);
    let mut breaks = vec![-lim, lim];
    for k in [-1000.0, -30.0, -3.0, 0.0, 3.0, 30.0, 1000.0] {
        let t = t0 + k * hw;
        if t > -lim && t < lim {
            breaks.push(t);
        }
    }
    breaks.sort_by(f64::total_cmp);
    let weight = |t: f64| (-t * t).exp() / PI.sqrt();
    let alpha_f = |t: f64| lorentz(delta - doppler * t, gamma, a0, omega_a).0 * weight(t);
    let n_f = |t: f64| lorentz(delta - doppler * t, gamma, a0, omega_a).1 * weight(t);
    let abs_scale = |f: &dyn Fn(f64) -> f64| {
        integrate_pieces(&|t| f(t).abs(), &breaks, 1e-3 * a0.abs().max(1e-300))
    };
    let sa = abs_scale(&alpha_f);
    let sn = abs_scale(&n_f);
    (
        integrate_pieces(&alpha_f, &breaks, 1e-13 * sa),
        integrate_pieces(&n_f, &breaks, 1e-13 * sn),
    )
}

/// Round-trip phase (relative to the nearest comb order at Δ = 0) for the
/// approximate-Doppler line, written out in closed form.
pub fn phase_approx_doppler(delta: f64, lc: f64, a0_la: f64, doppler: f64) -> f64 {
    2.0 * delta * lc / C - 4.0 * a0_la * delta * doppler / (4.0 * delta * delta + doppler * doppler)
}

/// Split central-mode roots ±Δ₀ of the approximate-Doppler phase, rad/s.
pub fn central_roots_closed_form(lc: f64, a0_la: f64, doppler: f64) -> Option<f64> {
    let s = 2.0 * a0_la * doppler * C / lc - doppler * doppler;
    (s > 0.0).then(|| 0.5 * s.sqrt())
}

/// All roots of `f` on `[lo, hi]` found by scanning with `n` cells and
/// bisecting each sign change to full float resolution.
pub fn bisect_roots(f: impl Fn(f64) -> f64, lo: f64, hi: f64, n: usize) -> Vec<f64> {
    let mut roots = Vec::new();
    let h = (hi - lo) / n as f64;
    let mut a = lo;
    let mut fa = f(a);
    for i in 1..=n {
        let b = lo + i as f64 * h;
        let fb = f(b);
        if fa == 0.0 {
            roots.push(a);
        } else if fa * fb < 0.0 {
            let (mut x0, mut x1, mut f0) = (a, b, fa);
            for _ in 0..200 {
                let m = 0.5 * (x0 + x1);
                if m <= x0 || m >= x1 {
                    break;
                }
                let fm = f(m);
                if fm == 0.0 {
                    x0 = m;
                    x1 = m;
                    break;
                }
                if fm * f0 < 0.0 {
                    x1 = m;
                } else {
                    x0 = m;
                    f0 = fm;
                }
            }
            roots.push(0.5 * (x0 + x1));
        }
        a = b;
        fa = fb;
    }
    roots
}

/// Empty-cavity Airy transmission normalized to its resonance peak.
pub fn airy(delta: f64, lc: f64, rho: f64) -> f64 {
    let s = (delta * lc / C).sin();
    let d = (1.0 - rho) * (1.0 - rho);
    d / (d + 4.0 * rho * s * s)
}

/// Rb liquid-phase vapor pressure in pascal.
pub fn rb_vapor_pressure_pa(t: f64) -> f64 {
    let log10_torr = 15.88253 - 4529.635 / t + 5.8663e-4 * t - 2.99138 * t.log10();
    10f64.powf(log10_torr) * 101_325.0 / 760.0
}

/// Thermal Doppler width, rad/s, from first principles.
pub fn thermal_doppler_width(t: f64, mass_amu: f64, lambda: f64) -> f64 {
    let kb = 1.380649e-23;
    let amu = 1.66053906660e-27;
    let u = (2.0 * kb * t / (mass_amu * amu)).sqrt();
    2.0 * PI * u / lambda
}
