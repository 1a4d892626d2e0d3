//! The single conversion boundary between lab units and SI.
//!
//! Everything inside the crate is SI: meters, seconds, kilograms, joules.
//! Magnetic fields are the one exception — they stay in gauss end to end,
//! because only field *ratios* ever enter the formulas. Interfaces (config
//! keys, CSV columns, constructors ending in `_um`/`_ms`/...) speak
//! micrometers, nanometers, milliseconds, microseconds, kHz and G/ms; the
//! functions here are the only place the factors appear.

use std::f64::consts::TAU;

pub fn nm_to_m(x: f64) -> f64 {
    x * 1e-9
}

pub fn m_to_nm(x: f64) -> f64 {
    x * 1e9
}

pub fn um_to_m(x: f64) -> f64 {
    x * 1e-6
}

pub fn m_to_um(x: f64) -> f64 {
    x * 1e6
}

pub fn ms_to_s(t: f64) -> f64 {
    t * 1e-3
}

pub fn s_to_ms(t: f64) -> f64 {
    t * 1e3
}

pub fn us_to_s(t: f64) -> f64 {
    t * 1e-6
}

pub fn s_to_us(t: f64) -> f64 {
    t * 1e6
}

/// Ordinary frequency in kHz -> angular frequency in rad/s.
pub fn khz_to_angular(nu_khz: f64) -> f64 {
    TAU * nu_khz * 1e3
}

pub fn angular_to_khz(omega: f64) -> f64 {
    omega / (TAU * 1e3)
}

/// Sweep rate G/ms -> G/s.
pub fn gauss_per_ms_to_per_s(r: f64) -> f64 {
    r * 1e3
}

pub fn gauss_per_s_to_per_ms(r: f64) -> f64 {
    r * 1e-3
}

/// Wavenumber 1/m -> 1/um.
pub fn per_m_to_per_um(k: f64) -> f64 {
    k * 1e-6
}
