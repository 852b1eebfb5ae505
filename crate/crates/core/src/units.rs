//! Unit-tagged scalars.
//!
//! Only the handful of conversions the toolkit needs are supported: light-minutes
//! to kilometres, kilometres to metres, minutes to seconds and percent to a plain
//! fraction. Everything else is a dimension error.

use std::fmt;

use thiserror::Error;

/// Speed of light in km/s. The round value is used on purpose so that the
/// worked comlink numbers reproduce digit for digit.
pub const C_KM_PER_S: f64 = 300_000.0;

/// Kilometres per light-minute (`60 * C_KM_PER_S`).
pub const LM_KM: f64 = 60.0 * C_KM_PER_S;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Unit {
    LightMinute,
    Kilometer,
    Meter,
    Hertz,
    Second,
    Minute,
    Percent,
    Radian,
    Tesla,
    Siemens,
    Volt,
    Ampere,
    Ohm,
    Coulomb,
    Dimensionless,
}

impl Unit {
    pub fn symbol(self) -> &'static str {
        match self {
            Unit::LightMinute => "Lm",
            Unit::Kilometer => "km",
            Unit::Meter => "m",
            Unit::Hertz => "Hz",
            Unit::Second => "s",
            Unit::Minute => "min",
            Unit::Percent => "%",
            Unit::Radian => "rad",
            Unit::Tesla => "T",
            Unit::Siemens => "S",
            Unit::Volt => "V",
            Unit::Ampere => "A",
            Unit::Ohm => "Ohm",
            Unit::Coulomb => "C",
            Unit::Dimensionless => "",
        }
    }

    /// Linear factor taking a value in `self` to `target`, if a path exists.
    fn factor_to(self, target: Unit) -> Option<f64> {
        use Unit::*;
        if self == target {
            return Some(1.0);
        }
        let f = match (self, target) {
            (LightMinute, Kilometer) => LM_KM,
            (Kilometer, LightMinute) => 1.0 / LM_KM,
            (LightMinute, Meter) => LM_KM * 1e3,
            (Meter, LightMinute) => 1.0 / (LM_KM * 1e3),
            (Kilometer, Meter) => 1e3,
            (Meter, Kilometer) => 1e-3,
            (Minute, Second) => 60.0,
            (Second, Minute) => 1.0 / 60.0,
            // The single place where percent becomes a fraction.
            (Percent, Dimensionless) => 0.01,
            (Dimensionless, Percent) => 100.0,
            _ => return None,
        };
        Some(f)
    }
}

#[derive(Debug, Error, Clone, PartialEq)]
pub enum UnitError {
    #[error("non-finite value {0} for unit '{1}'")]
    NonFinite(f64, &'static str),
    #[error("dimension error: cannot use '{from}' where '{to}' is required")]
    Dimension {
        from: &'static str,
        to: &'static str,
    },
}

/// A finite scalar tagged with its unit.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Quantity {
    value: f64,
    unit: Unit,
}

macro_rules! shorthand {
    ($($name:ident => $unit:ident),* $(,)?) => {
        $(
            pub fn $name(value: f64) -> Result<Self, UnitError> {
                Self::new(value, Unit::$unit)
            }
        )*
    };
}

impl Quantity {
    pub fn new(value: f64, unit: Unit) -> Result<Self, UnitError> {
        if !value.is_finite() {
            return Err(UnitError::NonFinite(value, unit.symbol()));
        }
        Ok(Self { value, unit })
    }

    shorthand! {
        light_minutes => LightMinute,
        km => Kilometer,
        meters => Meter,
        hertz => Hertz,
        seconds => Second,
        minutes => Minute,
        percent => Percent,
        radians => Radian,
        dimensionless => Dimensionless,
    }

    pub fn value(&self) -> f64 {
        self.value
    }

    pub fn unit(&self) -> Unit {
        self.unit
    }

    /// Returns the raw value, but only if `self` is already in `unit`.
    ///
    /// Operations use this at their boundary so that a kilometre never slips
    /// in where a light-minute was meant.
    pub fn expect(&self, unit: Unit) -> Result<f64, UnitError> {
        if self.unit != unit {
            return Err(UnitError::Dimension {
                from: self.unit.symbol(),
                to: unit.symbol(),
            });
        }
        Ok(self.value)
    }

    /// Percent as a plain fraction (16 % -> 0.16).
    pub fn fraction(&self) -> Result<f64, UnitError> {
        convert(*self, Unit::Dimensionless).map(|q| q.value)
    }

    pub fn checked_add(self, rhs: Quantity) -> Result<Quantity, UnitError> {
        let v = rhs.expect(self.unit)?;
        Quantity::new(self.value + v, self.unit)
    }

    pub fn checked_sub(self, rhs: Quantity) -> Result<Quantity, UnitError> {
        let v = rhs.expect(self.unit)?;
        Quantity::new(self.value - v, self.unit)
    }

    pub fn scale(self, k: f64) -> Result<Quantity, UnitError> {
        Quantity::new(self.value * k, self.unit)
    }
}

impl fmt::Display for Quantity {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self.unit {
            Unit::Dimensionless => write!(f, "{}", self.value),
            Unit::Percent => write!(f, "{}%", self.value),
            u => write!(f, "{} {}", self.value, u.symbol()),
        }
    }
}

pub fn convert(q: Quantity, target: Unit) -> Result<Quantity, UnitError> {
    let factor = q.unit.factor_to(target).ok_or(UnitError::Dimension {
        from: q.unit.symbol(),
        to: target.symbol(),
    })?;
    Quantity::new(q.value * factor, target)
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    #[test]
    fn light_minute_is_sixty_light_seconds() {
        assert_eq!(LM_KM, 60.0 * C_KM_PER_S);
        let km = convert(Quantity::light_minutes(1.0).unwrap(), Unit::Kilometer).unwrap();
        assert_eq!(km.value(), 1.8e7);
        assert_eq!(km.unit(), Unit::Kilometer);
    }

    #[test]
    fn zero_km_is_zero_lm() {
        let lm = convert(Quantity::km(0.0).unwrap(), Unit::LightMinute).unwrap();
        assert_eq!(lm.value(), 0.0);
    }

    #[test]
    fn sun_range_in_km() {
        let km = convert(Quantity::light_minutes(8.3).unwrap(), Unit::Kilometer).unwrap();
        assert!((km.value() - 1.494e8).abs() <= 1e-12 * 1.494e8);
    }

    #[test]
    fn minutes_and_percent() {
        let s = convert(Quantity::minutes(1.5).unwrap(), Unit::Second).unwrap();
        assert_eq!(s.value(), 90.0);
        assert_eq!(Quantity::percent(16.0).unwrap().fraction().unwrap(), 0.16);
    }

    #[test]
    fn incompatible_units_rejected() {
        let e = convert(Quantity::hertz(1.0).unwrap(), Unit::Second).unwrap_err();
        assert!(matches!(e, UnitError::Dimension { .. }));
        let km = Quantity::km(1.0).unwrap();
        let lm = Quantity::light_minutes(1.0).unwrap();
        assert!(km.checked_add(lm).is_err());
        assert!(lm.expect(Unit::Kilometer).is_err());
    }

    #[test]
    fn non_finite_rejected() {
        assert!(Quantity::km(f64::NAN).is_err());
        assert!(Quantity::hertz(f64::INFINITY).is_err());
        assert!(Quantity::km(f64::MAX).unwrap().scale(10.0).is_err());
    }

    fn convertible_pair() -> impl Strategy<Value = (Unit, Unit)> {
        prop_oneof![
            Just((Unit::LightMinute, Unit::Kilometer)),
            Just((Unit::Kilometer, Unit::LightMinute)),
            Just((Unit::Kilometer, Unit::Meter)),
            Just((Unit::LightMinute, Unit::Meter)),
            Just((Unit::Minute, Unit::Second)),
            Just((Unit::Percent, Unit::Dimensionless)),
        ]
    }

    proptest! {
        #[test]
        fn round_trip_is_tight(v in -1e9f64..1e9, (from, to) in convertible_pair()) {
            let q = Quantity::new(v, from).unwrap();
            let back = convert(convert(q, to).unwrap(), from).unwrap();
            prop_assert_eq!(back.unit(), from);
            prop_assert!((back.value() - v).abs() <= 1e-12 * v.abs());
        }
    }
}
