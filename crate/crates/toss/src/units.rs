//! Physical quantities in scenario files.
//!
//! A quantity is either a bare number, taken as SI, or a string such as
//! `"120 km/h"` or `"30 deg"`. Each kind only accepts its own units, so a
//! length given in degrees is rejected while the file is parsed (and the
//! error carries the line number).

use std::fmt;

use serde::de::{self, Deserializer, Visitor};
use serde::Deserialize;

pub const KMH: f64 = 1.0 / 3.6;
pub const DEG: f64 = std::f64::consts::PI / 180.0;

/// Converts m/s to km/h.
pub fn to_kmh(v: f64) -> f64 {
    v * 3.6
}

/// Converts radians to degrees.
pub fn to_deg(a: f64) -> f64 {
    a / DEG
}

/// Splits `"12.5 km/h"` into the number and the unit text.
fn split(text: &str) -> Option<(f64, &str)> {
    let t = text.trim();
    let end = t
        .char_indices()
        .find(|&(i, c)| {
            !(c.is_ascii_digit()
                || c == '.'
                || c == '_'
                || ((c == '-' || c == '+')
                    && (i == 0 || matches!(t.as_bytes()[i - 1], b'e' | b'E')))
                || ((c == 'e' || c == 'E') && i > 0))
        })
        .map_or(t.len(), |(i, _)| i);
    let value: f64 = t[..end].replace('_', "").parse().ok()?;
    Some((value, t[end..].trim()))
}

/// Parses `text` against a table of `(unit, factor to SI)`. An empty unit
/// means SI.
pub fn parse_with(text: &str, units: &[(&str, f64)]) -> Result<f64, String> {
    let (value, unit) = split(text).ok_or_else(|| format!("cannot read a number from {text:?}"))?;
    if unit.is_empty() {
        return Ok(value);
    }
    units
        .iter()
        .find(|(u, _)| *u == unit)
        .map(|(_, f)| value * f)
        .ok_or_else(|| {
            let known: Vec<&str> = units.iter().map(|(u, _)| *u).collect();
            format!(
                "unknown unit {unit:?} in {text:?} (expected one of {})",
                known.join(", ")
            )
        })
}

macro_rules! quantity {
    ($(#[$doc:meta])* $name:ident, $what:literal, [$($unit:literal => $factor:expr),* $(,)?]) => {
        $(#[$doc])*
        #[derive(Clone, Copy, Debug, Default, PartialEq, PartialOrd)]
        pub struct $name(pub f64);

        impl $name {
            pub const UNITS: &'static [(&'static str, f64)] = &[$(($unit, $factor)),*];

            pub fn si(self) -> f64 {
                self.0
            }

            pub fn parse(text: &str) -> Result<Self, String> {
                parse_with(text, Self::UNITS).map($name)
            }
        }

        impl<'de> Deserialize<'de> for $name {
            fn deserialize<D: Deserializer<'de>>(d: D) -> Result<Self, D::Error> {
                struct V;
                impl<'de> Visitor<'de> for V {
                    type Value = $name;

                    fn expecting(&self, f: &mut fmt::Formatter) -> fmt::Result {
                        write!(f, "a {} (number in SI units or a string with a unit)", $what)
                    }

                    fn visit_f64<E: de::Error>(self, v: f64) -> Result<$name, E> {
                        Ok($name(v))
                    }

                    fn visit_i64<E: de::Error>(self, v: i64) -> Result<$name, E> {
                        Ok($name(v as f64))
                    }

                    fn visit_u64<E: de::Error>(self, v: u64) -> Result<$name, E> {
                        Ok($name(v as f64))
                    }

                    fn visit_str<E: de::Error>(self, v: &str) -> Result<$name, E> {
                        $name::parse(v).map_err(|e| E::custom(format!("{}: {e}", $what)))
                    }
                }
                d.deserialize_any(V)
            }
        }
    };
}

quantity!(Length, "length", ["m" => 1.0, "km" => 1000.0, "cm" => 0.01]);
quantity!(Speed, "speed", ["m/s" => 1.0, "km/h" => KMH, "mph" => 0.44704]);
quantity!(Angle, "angle", ["rad" => 1.0, "deg" => DEG]);
quantity!(Duration, "time", ["s" => 1.0, "ms" => 1e-3]);
quantity!(Accel, "acceleration", ["m/s^2" => 1.0, "m/s2" => 1.0, "g" => toss_core::GRAVITY]);
quantity!(AngleRate, "angular rate", ["rad/s" => 1.0, "deg/s" => DEG]);
quantity!(
    /// Curvature; positive turns left.
    Curvature, "curvature", ["1/m" => 1.0]
);
