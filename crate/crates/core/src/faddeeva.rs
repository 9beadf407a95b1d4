//! Faddeeva function `w(z) = exp(-z²) erfc(-iz)` in the closed upper half plane.
//!
//! Weideman's rational expansion in `Z = (L + iz)/(L - iz)` covers the core
//! region; the Laplace continued fraction takes over for large `|z|`, where
//! `exp(-x²)` is below double precision relative to the Lorentzian tail.

use std::f64::consts::PI;
use std::sync::OnceLock;

use num_complex::Complex64;

const TERMS: usize = 40;
const FRAC_1_SQRT_PI: f64 = 0.564_189_583_547_756_3;

struct Weideman {
    l: f64,
    coeffs: [f64; TERMS],
}

fn weideman() -> &'static Weideman {
    static TABLE: OnceLock<Weideman> = OnceLock::new();
    TABLE.get_or_init(|| {
        let n = TERMS as f64;
        let m = 2 * TERMS;
        let l = (n / 2f64.sqrt()).sqrt();
        // f(t) = exp(-t²)(L² + t²) sampled at t = L tan(θ/2), θ = kπ/M;
        // the coefficients are its cosine transform on the 2M-periodic grid.
        let samples: Vec<(f64, f64)> = (-(m as i64) + 1..m as i64)
            .map(|k| {
                let theta = k as f64 * PI / m as f64;
                let t = l * (theta / 2.0).tan();
                (theta, (-t * t).exp() * (l * l + t * t))
            })
            .collect();
        let mut coeffs = [0.0; TERMS];
        for (j, c) in coeffs.iter_mut().enumerate() {
            let order = (j + 1) as f64;
            let s: f64 = samples.iter().map(|&(th, f)| f * (order * th).cos()).sum();
            *c = s / (2 * m) as f64;
        }
        Weideman { l, coeffs }
    })
}

fn w_rational(z: Complex64) -> Complex64 {
    let tab = weideman();
    let iz = Complex64::new(-z.im, z.re);
    let denom = tab.l - iz;
    let zz = (tab.l + iz) / denom;
    let mut p = Complex64::new(0.0, 0.0);
    for &c in tab.coeffs.iter().rev() {
        p = p * zz + c;
    }
    2.0 * p / (denom * denom) + FRAC_1_SQRT_PI / denom
}

fn w_continued_fraction(z: Complex64) -> Complex64 {
    // w(z) = (i/√π) / (z - (1/2)/(z - 1/(z - (3/2)/(z - ...))))
    let x = z.re.abs();
    let y = z.im;
    let depth = (3.9 + 11.398 / (0.08254 * x + 0.1421 * y + 0.2023)).floor();
    let zs = Complex64::new(x, y);
    let mut acc = zs;
    let mut nu = 0.5 * (depth - 1.0);
    while nu > 0.4 {
        acc = zs - nu / acc;
        nu -= 0.5;
    }
    let w = Complex64::new(0.0, FRAC_1_SQRT_PI) / acc;
    if z.re < 0.0 {
        w.conj()
    } else {
        w
    }
}

/// Faddeeva function for `Im z ≥ 0`.
///
/// Lower half-plane arguments are mapped through `w(z) = 2 exp(-z²) - w(-z)`.
pub fn faddeeva(z: Complex64) -> Complex64 {
    if z.im < 0.0 {
        return 2.0 * (-z * z).exp() - faddeeva(-z);
    }
    let x = z.re.abs();
    let y = z.im;
    if y > 7.0 || (x > 6.0 && (y > 0.1 || (x > 8.0 && y > 1e-10) || x > 28.0)) {
        w_continued_fraction(z)
    } else {
        w_rational(z)
    }
}
