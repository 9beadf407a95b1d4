//! Physical constants (SI, CODATA 2018 exact values where defined).

use std::f64::consts::PI;

/// Speed of light in vacuum, m/s.
pub const C: f64 = 299_792_458.0;
/// Boltzmann constant, J/K.
pub const K_B: f64 = 1.380_649e-23;
/// Atomic mass unit, kg.
pub const AMU: f64 = 1.660_539_066_60e-27;
/// Mass of ⁸⁷Rb in atomic mass units.
pub const RB87_MASS_AMU: f64 = 86.909_180_527;
/// Natural abundance of ⁸⁷Rb.
pub const RB87_ABUNDANCE: f64 = 0.2783;
/// Rb D2 line wavelength used by the bundled presets, m.
pub const RB_D2_WAVELENGTH: f64 = 780e-9;
/// Torr to pascal.
pub const TORR: f64 = 101_325.0 / 760.0;

/// Angular frequency (rad/s) from an ordinary frequency (Hz).
#[inline]
pub fn hz_to_rad(f: f64) -> f64 {
    2.0 * PI * f
}

/// Ordinary frequency (Hz) from an angular frequency (rad/s).
#[inline]
pub fn rad_to_hz(w: f64) -> f64 {
    w / (2.0 * PI)
}

/// Optical angular frequency for a vacuum wavelength.
#[inline]
pub fn angular_frequency(lambda: f64) -> f64 {
    2.0 * PI * C / lambda
}
