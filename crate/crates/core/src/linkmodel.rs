//! Comlink time-data model.
//!
//! A remote target sits at a fixed distance (km) and a fixed light range (Lm).
//! A "progress" percentage says how far along that range the captured data is
//! brought; from it follow the light-time offset ε, the shifted timestamp, and
//! the two frequency-resolution figures used in the analysis sheet.

use std::f64::consts::TAU;
use std::fmt;
use std::str::FromStr;

use thiserror::Error;

use crate::units::{Quantity, Unit, UnitError, C_KM_PER_S};

#[derive(Debug, Error, Clone, PartialEq)]
pub enum LinkError {
    #[error("domain error: {0}")]
    Domain(String),
    #[error("division by zero in {0}")]
    DivisionByZero(&'static str),
    #[error("timestamp {local} minus {seconds} s rolls back past 00:00:00")]
    Underflow { local: Timestamp, seconds: i64 },
    #[error("invalid timestamp '{0}' (expected HH:MM:SS)")]
    BadTimestamp(String),
    #[error(transparent)]
    Unit(#[from] UnitError),
}

/// A remote comlink target.
///
/// Distance and light range are independent inputs; the worked Sun numbers pair
/// 1.46e8 km with 8.3 Lm even though 8.3 Lm is 1.494e8 km.
#[derive(Debug, Clone, PartialEq)]
pub struct Target {
    pub name: String,
    distance_km: Quantity,
    range_lm: Quantity,
}

impl Target {
    pub fn new(name: impl Into<String>, distance_km: f64, range_lm: f64) -> Result<Self, LinkError> {
        let distance_km = Quantity::km(distance_km)?;
        let range_lm = Quantity::light_minutes(range_lm)?;
        if distance_km.value() <= 0.0 || range_lm.value() <= 0.0 {
            return Err(LinkError::Domain(format!(
                "target distance and range must be positive (got {distance_km}, {range_lm})"
            )));
        }
        Ok(Self {
            name: name.into(),
            distance_km,
            range_lm,
        })
    }

    pub fn distance(&self) -> Quantity {
        self.distance_km
    }

    pub fn range(&self) -> Quantity {
        self.range_lm
    }
}

/// Wall-clock time of day, whole seconds, no date.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct Timestamp {
    hours: u8,
    minutes: u8,
    seconds: u8,
}

impl Timestamp {
    pub fn new(hours: u8, minutes: u8, seconds: u8) -> Result<Self, LinkError> {
        if hours > 23 || minutes > 59 || seconds > 59 {
            return Err(LinkError::BadTimestamp(format!("{hours}:{minutes}:{seconds}")));
        }
        Ok(Self {
            hours,
            minutes,
            seconds,
        })
    }

    pub fn hours(&self) -> u8 {
        self.hours
    }

    pub fn minutes(&self) -> u8 {
        self.minutes
    }

    pub fn seconds(&self) -> u8 {
        self.seconds
    }

    pub fn seconds_of_day(&self) -> i64 {
        self.hours as i64 * 3600 + self.minutes as i64 * 60 + self.seconds as i64
    }

    fn from_seconds_of_day(total: i64) -> Option<Self> {
        if !(0..86_400).contains(&total) {
            return None;
        }
        Some(Self {
            hours: (total / 3600) as u8,
            minutes: (total % 3600 / 60) as u8,
            seconds: (total % 60) as u8,
        })
    }

    /// Moves the timestamp by a signed number of seconds, without wrapping days.
    pub fn offset(&self, seconds: i64) -> Result<Self, LinkError> {
        Self::from_seconds_of_day(self.seconds_of_day() + seconds).ok_or(LinkError::Underflow {
            local: *self,
            seconds: -seconds,
        })
    }
}

impl fmt::Display for Timestamp {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{:02}:{:02}:{:02}", self.hours, self.minutes, self.seconds)
    }
}

impl FromStr for Timestamp {
    type Err = LinkError;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        let bad = || LinkError::BadTimestamp(s.to_string());
        let parts: Vec<&str> = s.trim().split(':').collect();
        if parts.len() != 3 {
            return Err(bad());
        }
        let field = |p: &str| p.parse::<u8>().map_err(|_| bad());
        Timestamp::new(field(parts[0])?, field(parts[1])?, field(parts[2])?).map_err(|_| bad())
    }
}

/// Inner product ⟨ψ|φ⟩ of the before/after states of a time-data jump.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct AmplitudeOverlap {
    pub re: f64,
    pub im: f64,
}

impl AmplitudeOverlap {
    pub fn new(re: f64, im: f64) -> Self {
        Self { re, im }
    }

    /// |⟨ψ|φ⟩|²
    pub fn probability(&self) -> f64 {
        self.re * self.re + self.im * self.im
    }

    fn checked_probability(&self) -> Result<f64, LinkError> {
        let p = self.probability();
        // one ulp of slack so that normalised inputs like (1/√2, 1/√2) pass
        if !p.is_finite() || p > 1.0 + f64::EPSILON {
            return Err(LinkError::Domain(format!("|<psi|phi>|^2 = {p} exceeds 1")));
        }
        Ok(p.min(1.0))
    }
}

/// Outcome of a frequency-resolution evaluation.
///
/// The two non-finite outcomes are signals, not failures: a 0 % progress row in
/// the sheet legitimately carries `DivByZero`, and 100 % progress in the
/// displaced form is the declared divergence limit.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum Resolution {
    Hz(f64),
    DivByZero,
    Divergent,
}

impl Resolution {
    pub fn hz(&self) -> Option<f64> {
        match self {
            Resolution::Hz(v) => Some(*v),
            _ => None,
        }
    }
}

impl fmt::Display for Resolution {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Resolution::Hz(v) => write!(f, "{v} Hz"),
            Resolution::DivByZero => f.write_str("#Div/0!"),
            Resolution::Divergent => f.write_str("divergent (-> inf)"),
        }
    }
}

fn progress_percent(progress: Quantity) -> Result<f64, LinkError> {
    let p = progress.expect(Unit::Percent)?;
    if !(0.0..=100.0).contains(&p) {
        return Err(LinkError::Domain(format!("progress {p}% outside [0, 100]")));
    }
    Ok(p)
}

fn positive(q: Quantity, unit: Unit, what: &str) -> Result<f64, LinkError> {
    let v = q.expect(unit)?;
    if v <= 0.0 {
        return Err(LinkError::Domain(format!("{what} must be positive, got {q}")));
    }
    Ok(v)
}

/// ε = progress/100 × range, in light-minutes.
pub fn epsilon_from_progress(progress: Quantity, range: Quantity) -> Result<Quantity, LinkError> {
    let p = progress_percent(progress)?;
    let r = positive(range, Unit::LightMinute, "range")?;
    let frac = Quantity::percent(p)?.fraction()?;
    Ok(Quantity::light_minutes(frac * r)?)
}

/// Subtracts the light time of `epsilon` from a local timestamp, rounded to the
/// nearest whole second (1.33 Lm is 79.8 s, so 13:35:00 becomes 13:33:40).
pub fn shift_timestamp(local: Timestamp, epsilon: Quantity) -> Result<Timestamp, LinkError> {
    let eps = epsilon.expect(Unit::LightMinute)?;
    if eps < 0.0 {
        return Err(LinkError::Domain(format!("epsilon must be >= 0, got {eps}")));
    }
    let seconds = light_delay_seconds(eps).round() as i64;
    local.offset(-seconds)
}

/// Light-travel time of an ε in light-minutes, in seconds.
pub fn light_delay_seconds(epsilon_lm: f64) -> f64 {
    epsilon_lm * 60.0
}

/// ν_Δω = c / (distance × progress/100).
pub fn frequency_resolution(distance: Quantity, progress: Quantity) -> Result<Resolution, LinkError> {
    let d = positive(distance, Unit::Kilometer, "distance")?;
    let p = progress.expect(Unit::Percent)?;
    if p < 0.0 {
        return Err(LinkError::Domain(format!("progress must be >= 0, got {p}%")));
    }
    if p == 0.0 {
        return Ok(Resolution::DivByZero);
    }
    Ok(Resolution::Hz(C_KM_PER_S * 100.0 / (d * p)))
}

/// Δν_x,Δω = c / (distance × (1 − progress/100)); strictly increasing in
/// progress and divergent at 100 %.
pub fn displaced_frequency_resolution(distance: Quantity, progress: Quantity) -> Result<Resolution, LinkError> {
    let d = positive(distance, Unit::Kilometer, "distance")?;
    let p = progress_percent(progress)?;
    if p == 100.0 {
        return Ok(Resolution::Divergent);
    }
    let remaining = (100.0 - p) / 100.0;
    Ok(Resolution::Hz(C_KM_PER_S / (d * remaining)))
}

/// Time-frequency uncertainty: Δω·Δt ≥ 2π.
pub fn uncertainty_satisfied(delta_omega: f64, delta_t: f64) -> Result<bool, LinkError> {
    if !(delta_omega >= 0.0 && delta_t >= 0.0) {
        return Err(LinkError::Domain(format!(
            "uncertainty inputs must be >= 0 (got {delta_omega}, {delta_t})"
        )));
    }
    Ok(delta_omega * delta_t >= TAU)
}

fn check_nonneg(t: f64, delta: f64) -> Result<(), LinkError> {
    if !(t >= 0.0 && delta >= 0.0) || !t.is_finite() || !delta.is_finite() {
        return Err(LinkError::Domain(format!(
            "time and data size must be finite and >= 0 (got t={t}, delta={delta})"
        )));
    }
    Ok(())
}

/// prob(time.data) = t · δ · |⟨ψ|φ⟩|².
pub fn timedata_probability(t: f64, delta: f64, overlap: AmplitudeOverlap) -> Result<f64, LinkError> {
    check_nonneg(t, delta)?;
    Ok(t * delta * overlap.checked_probability()?)
}

/// The (prob(time), prob(data)) split of a time-data probability:
/// (t·|⟨ψ|φ⟩|², δ·|⟨ψ|φ⟩|²).
pub fn timedata_decomposition(t: f64, delta: f64, overlap: AmplitudeOverlap) -> Result<(f64, f64), LinkError> {
    check_nonneg(t, delta)?;
    let p = overlap.checked_probability()?;
    Ok((t * p, delta * p))
}

/// Value of the bit-frequency product restriction δ / (t·δ·|⟨ψ|φ⟩|²).
///
/// Its unit is written `!Hz` and has no further interpretation here.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct NotHertz(pub f64);

impl fmt::Display for NotHertz {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{} !Hz", self.0)
    }
}

pub fn bit_frequency_product(t: f64, delta: f64, overlap: AmplitudeOverlap) -> Result<NotHertz, LinkError> {
    let denom = timedata_probability(t, delta, overlap)?;
    if denom == 0.0 {
        return Err(LinkError::DivisionByZero("bit-frequency product"));
    }
    Ok(NotHertz(delta / denom))
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    fn pct(v: f64) -> Quantity {
        Quantity::percent(v).unwrap()
    }
    fn lm(v: f64) -> Quantity {
        Quantity::light_minutes(v).unwrap()
    }
    fn km(v: f64) -> Quantity {
        Quantity::km(v).unwrap()
    }
    fn ts(s: &str) -> Timestamp {
        s.parse().unwrap()
    }

    #[test]
    fn epsilon_examples() {
        let e = epsilon_from_progress(pct(16.0), lm(8.3)).unwrap();
        assert!((e.value() - 1.328).abs() < 1e-12);
        assert_eq!(e.unit(), Unit::LightMinute);
        assert_eq!(epsilon_from_progress(pct(0.0), lm(8.3)).unwrap().value(), 0.0);
        let e96 = epsilon_from_progress(pct(96.0), lm(8.3)).unwrap();
        assert!((e96.value() - 7.968).abs() < 1e-12);
    }

    #[test]
    fn epsilon_rejects_bad_progress_and_units() {
        assert!(matches!(
            epsilon_from_progress(pct(101.0), lm(8.3)),
            Err(LinkError::Domain(_))
        ));
        assert!(epsilon_from_progress(pct(-1.0), lm(8.3)).is_err());
        assert!(matches!(
            epsilon_from_progress(pct(16.0), km(8.3)),
            Err(LinkError::Unit(_))
        ));
    }

    #[test]
    fn timestamp_shift_examples() {
        let base = ts("13:35:00");
        assert_eq!(shift_timestamp(base, lm(1.33)).unwrap(), ts("13:33:40"));
        assert_eq!(shift_timestamp(base, lm(0.0)).unwrap(), base);
        assert_eq!(shift_timestamp(base, lm(1.328)).unwrap(), ts("13:33:40"));
    }

    #[test]
    fn timestamp_underflow_is_an_error() {
        let e = shift_timestamp(ts("00:00:30"), lm(1.0)).unwrap_err();
        assert!(matches!(e, LinkError::Underflow { .. }));
        assert!(shift_timestamp(ts("00:01:00"), lm(1.0)).is_ok());
        assert!(shift_timestamp(ts("12:00:00"), lm(-0.5)).is_err());
    }

    #[test]
    fn timestamp_parse_and_display() {
        assert_eq!(ts("07:05:09").to_string(), "07:05:09");
        for bad in ["24:00:00", "12:60:00", "1:2", "aa:bb:cc", "12:00:61"] {
            assert!(bad.parse::<Timestamp>().is_err(), "{bad}");
        }
    }

    #[test]
    fn frequency_resolution_examples() {
        let f = frequency_resolution(km(1.46e8), pct(16.0)).unwrap().hz().unwrap();
        assert!((f - 0.0128425).abs() < 1e-7);
        assert!((f - 0.0128).abs() < 1e-4);
        assert_eq!(frequency_resolution(km(1.46e8), pct(0.0)).unwrap(), Resolution::DivByZero);
        assert_eq!(frequency_resolution(km(3e5), pct(100.0)).unwrap(), Resolution::Hz(1.0));
        assert!(frequency_resolution(km(1.46e8), pct(-3.0)).is_err());
        assert!(frequency_resolution(km(0.0), pct(3.0)).is_err());
    }

    #[test]
    fn displaced_frequency_examples() {
        let f = displaced_frequency_resolution(km(1.46e8), pct(96.0)).unwrap().hz().unwrap();
        assert!((f - 0.0513699).abs() < 1e-7);
        let f0 = displaced_frequency_resolution(km(1.46e8), pct(0.0)).unwrap().hz().unwrap();
        assert!((f0 - 0.0020548).abs() < 1e-7);
        assert_eq!(
            displaced_frequency_resolution(km(1.46e8), pct(100.0)).unwrap(),
            Resolution::Divergent
        );
    }

    #[test]
    fn uncertainty_examples() {
        assert!(uncertainty_satisfied(TAU, 1.0).unwrap());
        assert!(!uncertainty_satisfied(1.0, 1.0).unwrap());
        assert!(uncertainty_satisfied(0.0128425, 500.0).unwrap());
        assert!(uncertainty_satisfied(-1.0, 1.0).is_err());
        assert!(uncertainty_satisfied(1.0, f64::NAN).is_err());
    }

    #[test]
    fn probability_examples() {
        let certain = AmplitudeOverlap::new(1.0, 0.0);
        assert_eq!(timedata_probability(2.0, 3.0, certain).unwrap(), 6.0);
        let orth = AmplitudeOverlap::new(0.0, 0.0);
        assert_eq!(timedata_probability(2.0, 3.0, orth).unwrap(), 0.0);
        let half = AmplitudeOverlap::new(0.5, 0.5);
        assert!((timedata_probability(2.0, 3.0, half).unwrap() - 3.0).abs() < 1e-15);
        let too_big = AmplitudeOverlap::new(1.0, 0.5);
        assert!(timedata_probability(1.0, 1.0, too_big).is_err());
    }

    #[test]
    fn bit_frequency_product_is_inverse_time_over_overlap() {
        let half = AmplitudeOverlap::new(0.5, 0.5);
        let v = bit_frequency_product(2.0, 3.0, half).unwrap();
        assert!((v.0 - 1.0).abs() < 1e-15);
        assert!(bit_frequency_product(2.0, 3.0, AmplitudeOverlap::new(0.0, 0.0)).is_err());
    }

    proptest! {
        #[test]
        fn epsilon_is_linear(p in 0.0f64..=50.0, r in 0.1f64..100.0) {
            let one = epsilon_from_progress(pct(p), lm(r)).unwrap().value();
            let two = epsilon_from_progress(pct(2.0 * p), lm(r)).unwrap().value();
            prop_assert!((two - 2.0 * one).abs() <= 1e-12 * two.abs().max(1.0));
        }

        #[test]
        fn frequency_times_progress_is_constant(d in 1e3f64..1e10, p in 0.01f64..100.0) {
            let f = frequency_resolution(km(d), pct(p)).unwrap().hz().unwrap();
            let k = 100.0 * C_KM_PER_S / d;
            prop_assert!((f * p - k).abs() <= 1e-12 * k);
        }

        #[test]
        fn displaced_is_strictly_increasing(d in 1e3f64..1e10, a in 0.0f64..99.0, gap in 0.01f64..1.0) {
            let lo = displaced_frequency_resolution(km(d), pct(a)).unwrap().hz().unwrap();
            let hi = displaced_frequency_resolution(km(d), pct(a + gap)).unwrap().hz().unwrap();
            prop_assert!(hi > lo);
        }

        #[test]
        fn shift_then_add_back(secs in 600i64..86_399, eps in 0.0f64..10.0) {
            let t = Timestamp::from_seconds_of_day(secs).unwrap();
            let shifted = shift_timestamp(t, lm(eps)).unwrap();
            let restored = shifted.offset(light_delay_seconds(eps).round() as i64).unwrap();
            prop_assert!((restored.seconds_of_day() - t.seconds_of_day()).abs() <= 1);
        }

        #[test]
        fn probability_decomposes(t in 0.0f64..1e3, delta in 0.0f64..1e3, re in -0.7f64..0.7, im in -0.7f64..0.7) {
            let o = AmplitudeOverlap::new(re, im);
            let full = timedata_probability(t, delta, o).unwrap();
            let (pt, pd) = timedata_decomposition(t, delta, o).unwrap();
            prop_assert!((full - pt * delta).abs() <= 1e-12 * full.max(1.0));
            prop_assert!((full - pd * t).abs() <= 1e-12 * full.max(1.0));
        }
    }
}
