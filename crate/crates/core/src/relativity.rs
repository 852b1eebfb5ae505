//! Relativistic timing kernel: time factor, proper-time deltas, stored proper
//! time, polar coordinates and their Jacobian, charge bookkeeping and the Moiré
//! wavelength.

use std::f64::consts::FRAC_PI_4;

use thiserror::Error;

use crate::units::C_KM_PER_S;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum RelError {
    #[error("domain error: {0}")]
    Domain(String),
    #[error("simultaneity radicand 1 - 4*beta^2 is negative for beta = {0}")]
    NegativeRadicand(f64),
    #[error("division by zero in {0}")]
    DivisionByZero(&'static str),
}

/// Speed as a fraction of c.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Velocity {
    beta: f64,
}

impl Velocity {
    pub fn from_beta(beta: f64) -> Result<Self, RelError> {
        if !(0.0..1.0).contains(&beta) {
            return Err(RelError::Domain(format!("beta = v/c must lie in [0, 1), got {beta}")));
        }
        Ok(Self { beta })
    }

    pub fn from_km_per_s(v: f64) -> Result<Self, RelError> {
        Self::from_beta(v / C_KM_PER_S)
    }

    pub fn beta(&self) -> f64 {
        self.beta
    }
}

/// ṫ = 1/√(1 − β²).
pub fn time_factor(v: Velocity) -> f64 {
    1.0 / (1.0 - v.beta * v.beta).sqrt()
}

/// Δτ = Δt·√(1 − (vx² + vy² + vz²)/c²), velocities in km/s.
pub fn proper_time_delta_general(dt_s: f64, vx: f64, vy: f64, vz: f64) -> Result<f64, RelError> {
    let speed2 = vx * vx + vy * vy + vz * vz;
    let c2 = C_KM_PER_S * C_KM_PER_S;
    if !(speed2 < c2) {
        return Err(RelError::Domain(format!(
            "speed {} km/s is not below c = {C_KM_PER_S} km/s",
            speed2.sqrt()
        )));
    }
    Ok(dt_s * (1.0 - speed2 / c2).sqrt())
}

/// Bound form Δt·√(1 − 4β²) for two equal simultaneous velocity terms.
/// Past β = 0.5 the radicand turns negative; that is refused rather than
/// returned as an imaginary time.
pub fn proper_time_delta_simultaneity(dt_s: f64, v: Velocity) -> Result<f64, RelError> {
    let radicand = 1.0 - 4.0 * v.beta * v.beta;
    if radicand < 0.0 {
        return Err(RelError::NegativeRadicand(v.beta));
    }
    Ok(dt_s * radicand.sqrt())
}

/// τ_Σ = |ṫ₀|·cos(π/4).
pub fn stored_proper_time(t_dot_0: f64) -> f64 {
    // cos(π/4) and sin(π/4) agree to the last bit, so either branch gives this.
    debug_assert!((FRAC_PI_4.cos() - FRAC_PI_4.sin()).abs() < 1e-15);
    t_dot_0.abs() * FRAC_PI_4.cos()
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PolarPoint {
    pub r: f64,
    pub phi: f64,
}

/// Polar form of (x, y); φ ∈ (−π, π] and the origin maps to φ = 0.
pub fn polar_from_cartesian(x: f64, y: f64) -> PolarPoint {
    let r = x.hypot(y);
    let phi = if r == 0.0 { 0.0 } else { y.atan2(x) };
    // atan2 returns -π for (negative x, -0.0); fold onto the open end.
    let phi = if phi == -std::f64::consts::PI { std::f64::consts::PI } else { phi };
    PolarPoint { r, phi }
}

pub fn cartesian_from_polar(p: PolarPoint) -> (f64, f64) {
    let (s, c) = p.phi.sin_cos();
    (p.r * c, p.r * s)
}

/// det ∂(x, y)/∂(r, φ), built from the four partial derivatives.
pub fn jacobian_polar(p: PolarPoint) -> f64 {
    let (s, c) = p.phi.sin_cos();
    let dx_dr = c;
    let dx_dphi = -p.r * s;
    let dy_dr = s;
    let dy_dphi = p.r * c;
    dx_dr * dy_dphi - dx_dphi * dy_dr
}

/// Charge at t₁ plus inflow and outflow over the interval.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ChargeLedger {
    pub q_t1: f64,
    pub q_in: f64,
    pub q_out: f64,
}

/// An exactly represented sum of floats, kept as non-overlapping partials
/// (Shewchuk's expansion arithmetic).
#[derive(Debug, Clone, PartialEq, Default)]
pub struct ExactSum {
    partials: Vec<f64>,
}

impl ExactSum {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn add(&mut self, mut x: f64) {
        let mut kept = 0;
        for k in 0..self.partials.len() {
            let mut y = self.partials[k];
            if x.abs() < y.abs() {
                std::mem::swap(&mut x, &mut y);
            }
            let hi = x + y;
            let lo = y - (hi - x);
            if lo != 0.0 {
                self.partials[kept] = lo;
                kept += 1;
            }
            x = hi;
        }
        self.partials.truncate(kept);
        self.partials.push(x);
    }

    /// The sum rounded once, to nearest-even.
    pub fn value(&self) -> f64 {
        let p = &self.partials;
        let Some(mut n) = p.len().checked_sub(1) else {
            return 0.0;
        };
        let mut hi = p[n];
        let mut lo = 0.0;
        while n > 0 {
            let x = hi;
            n -= 1;
            let y = p[n];
            hi = x + y;
            let yr = hi - x;
            lo = y - yr;
            if lo != 0.0 {
                break;
            }
        }
        // Half-way case: the remaining partials decide the rounding direction.
        if n > 0 && ((lo < 0.0 && p[n - 1] < 0.0) || (lo > 0.0 && p[n - 1] > 0.0)) {
            let y = lo * 2.0;
            let x = hi + y;
            if y == x - hi {
                hi = x;
            }
        }
        hi
    }
}

/// Q(t₂) = Q(t₁) + Q_in − Q_out, carried exactly.
///
/// `value()` on the result is the correctly rounded charge; passing the result
/// to [`charge_balance_inverse`] gives back Q(t₁) bit for bit.
pub fn charge_balance(l: &ChargeLedger) -> Result<ExactSum, RelError> {
    if !(l.q_in >= 0.0 && l.q_out >= 0.0) || !l.q_t1.is_finite() || !l.q_in.is_finite() || !l.q_out.is_finite() {
        return Err(RelError::Domain(format!(
            "charge flows must be finite and >= 0 (q1={}, in={}, out={})",
            l.q_t1, l.q_in, l.q_out
        )));
    }
    let mut q = ExactSum::new();
    q.add(l.q_t1);
    q.add(l.q_in);
    q.add(-l.q_out);
    Ok(q)
}

/// Q(t₁) = Q(t₂) − Q_in + Q_out
pub fn charge_balance_inverse(q_t2: &ExactSum, q_in: f64, q_out: f64) -> f64 {
    let mut q = q_t2.clone();
    q.add(-q_in);
    q.add(q_out);
    q.value()
}

/// ρ = Q / (2𝒱)
pub fn charge_density(q_total: f64, volume_m3: f64) -> Result<f64, RelError> {
    if volume_m3 == 0.0 {
        return Err(RelError::DivisionByZero("charge density"));
    }
    if volume_m3 < 0.0 {
        return Err(RelError::Domain(format!("volume must be positive, got {volume_m3}")));
    }
    Ok(q_total / (2.0 * volume_m3))
}

/// λ = x_Δ0 · x_Δ / x_pattern
pub fn moire_wavelength(x_delta0: f64, x_delta: f64, x_pattern: f64) -> Result<f64, RelError> {
    if x_pattern == 0.0 {
        return Err(RelError::DivisionByZero("moire wavelength"));
    }
    Ok(x_delta0 * x_delta / x_pattern)
}

/// λ = p² / (2Δp), the pitch / pitch-mismatch form.
pub fn moire_wavelength_pitch(p: f64, delta_p: f64) -> Result<f64, RelError> {
    if delta_p == 0.0 {
        return Err(RelError::DivisionByZero("moire wavelength (pitch form)"));
    }
    Ok(p * p / (2.0 * delta_p))
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct MoireConsistency {
    pub from_distances: f64,
    pub from_pitch: f64,
    /// Implied fringe order n = λ/p.
    pub order: f64,
    pub agree: bool,
}

/// Evaluates both parameterisations and reports whether they agree within a
/// relative tolerance.
pub fn moire_consistency(
    x_delta0: f64,
    x_delta: f64,
    x_pattern: f64,
    p: f64,
    delta_p: f64,
    rel_tol: f64,
) -> Result<MoireConsistency, RelError> {
    let a = moire_wavelength(x_delta0, x_delta, x_pattern)?;
    let b = moire_wavelength_pitch(p, delta_p)?;
    if p == 0.0 {
        return Err(RelError::DivisionByZero("moire fringe order"));
    }
    let scale = a.abs().max(b.abs());
    Ok(MoireConsistency {
        from_distances: a,
        from_pitch: b,
        order: b / p,
        agree: (a - b).abs() <= rel_tol * scale,
    })
}
