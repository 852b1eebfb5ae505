//! Fiber V-number, refraction, Faraday rotation and the thin isolation shell.

use std::f64::consts::PI;

use thiserror::Error;

/// V-number below which a fiber is taken to carry a single mode.
///
/// Note this is 1.57, not the textbook step-index cutoff of 2.405.
pub const SINGLE_MODE_CUTOFF: f64 = 1.57;

/// "b ≪ r_C" is read as b < THIN_SHELL_RATIO · r_C.
pub const THIN_SHELL_RATIO: f64 = 0.1;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum OpticsError {
    #[error("domain error: {0}")]
    Domain(String),
    #[error("thin-shell assumption violated: b = {b} is not below {ratio} * r_C = {limit}")]
    ThinShell { b: f64, ratio: f64, limit: f64 },
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct FiberSpec {
    pub core_radius_m: f64,
    pub wavelength_m: f64,
    pub n1: f64,
    pub n2: f64,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct FaradayCell {
    pub verdet_rad_per_t_m: f64,
    pub b_field_t: f64,
    pub path_m: f64,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct IsolationShell {
    pub shell_thickness_m: f64,
    pub length_m: f64,
    pub mean_radius_m: f64,
    pub circular_radius_m: f64,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub enum Refraction {
    Refracted(f64),
    TotalInternalReflection,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum IsolationVerdict {
    Isolated,
    NotIsolated,
}

/// Normalised frequency ν = (2πa/λ)·√(n₁² − n₂²).
pub fn v_number(f: &FiberSpec) -> Result<f64, OpticsError> {
    let FiberSpec {
        core_radius_m: a,
        wavelength_m: lambda,
        n1,
        n2,
    } = *f;
    if !(a > 0.0 && lambda > 0.0) {
        return Err(OpticsError::Domain(format!(
            "core radius and wavelength must be positive (a={a}, lambda={lambda})"
        )));
    }
    if !(n1 >= 1.0 && n2 >= 1.0) {
        return Err(OpticsError::Domain(format!("refractive indices must be >= 1 (n1={n1}, n2={n2})")));
    }
    if n1 < n2 {
        return Err(OpticsError::Domain(format!("n1 = {n1} < n2 = {n2}: no guided mode")));
    }
    Ok(2.0 * PI * a / lambda * (n1 * n1 - n2 * n2).sqrt())
}

pub fn is_single_mode(v: f64) -> bool {
    v < SINGLE_MODE_CUTOFF
}

/// Snell's law, sin θ₁·n₁ = sin θ₂·n₂, solved for θ₂.
pub fn snell_refracted_angle(theta1: f64, n1: f64, n2: f64) -> Result<Refraction, OpticsError> {
    if !(n1 > 0.0 && n2 > 0.0) || !theta1.is_finite() {
        return Err(OpticsError::Domain(format!(
            "need finite angle and positive indices (theta1={theta1}, n1={n1}, n2={n2})"
        )));
    }
    let s = theta1.sin() * n1 / n2;
    if s.abs() > 1.0 {
        return Ok(Refraction::TotalInternalReflection);
    }
    Ok(Refraction::Refracted(s.asin()))
}

/// ζ = 𝒱·B·ℓ
pub fn faraday_rotation(c: &FaradayCell) -> Result<f64, OpticsError> {
    if !(c.path_m >= 0.0) {
        return Err(OpticsError::Domain(format!("path length must be >= 0, got {}", c.path_m)));
    }
    Ok(c.verdet_rad_per_t_m * c.b_field_t * c.path_m)
}

/// Surface area and volume of the isolation shell:
/// A = 2πb(b + ℓ), V = 2π⟨r⟩ℓb.
pub fn isolation_geometry(s: &IsolationShell) -> Result<(f64, f64), OpticsError> {
    let b = s.shell_thickness_m;
    let l = s.length_m;
    let r = s.mean_radius_m;
    let rc = s.circular_radius_m;
    if !(b > 0.0 && l > 0.0 && r > 0.0 && rc > 0.0) {
        return Err(OpticsError::Domain(format!(
            "shell dimensions must be positive (b={b}, l={l}, <r>={r}, r_C={rc})"
        )));
    }
    let limit = THIN_SHELL_RATIO * rc;
    if b >= limit {
        return Err(OpticsError::ThinShell {
            b,
            ratio: THIN_SHELL_RATIO,
            limit,
        });
    }
    if r - b / 2.0 <= 0.0 {
        return Err(OpticsError::Domain(format!(
            "inner radius <r> - b/2 = {} must be positive",
            r - b / 2.0
        )));
    }
    let area = 2.0 * PI * b * (b + l);
    let volume = 2.0 * PI * r * l * b;
    Ok((area, volume))
}

/// Residual field at or below tolerance counts as isolated.
pub fn isolation_verdict(residual_b_t: f64, tolerance_t: f64) -> Result<IsolationVerdict, OpticsError> {
    if !(tolerance_t > 0.0) {
        return Err(OpticsError::Domain(format!("tolerance must be positive, got {tolerance_t}")));
    }
    Ok(if residual_b_t.abs() <= tolerance_t {
        IsolationVerdict::Isolated
    } else {
        IsolationVerdict::NotIsolated
    })
}
