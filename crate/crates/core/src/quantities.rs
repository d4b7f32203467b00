//! Dimension-checked physical quantities.
//!
//! Everything is stored in CGS-Gaussian base units (cm, g, s, K). Electric
//! charge is folded into the mechanical base set the Gaussian way, so an esu
//! is g^1/2 cm^3/2 s^-1 and dimension exponents have to be rational.
//!
//! SI is a presentation layer: [`Quantity::convert`] rescales a magnitude into
//! kg/m/s/K without touching its dimension.

use std::cmp::Ordering;
use std::fmt;
use std::ops::{Div, Mul};
use std::str::FromStr;

use num_rational::Ratio;
use serde::{Deserialize, Serialize};
use thiserror::Error;

pub type Exponent = Ratio<i32>;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum UnitError {
    #[error("dimension mismatch: {left} vs {right}")]
    Mismatch { left: Dimension, right: Dimension },
    #[error("unknown constant `{0}`")]
    UnknownConstant(String),
    #[error("unknown unit `{0}`")]
    UnknownUnit(String),
    #[error("`{value}` must be given as a number followed by a unit")]
    MissingUnit { value: String },
    #[error("cannot parse number in `{0}`")]
    BadNumber(String),
    #[error("unit `{unit}` has dimension {found}, expected {expected}")]
    WrongUnit {
        unit: String,
        expected: Dimension,
        found: Dimension,
    },
}

/// Exponents over {length, mass, time, temperature}.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub struct Dimension {
    pub length: Exponent,
    pub mass: Exponent,
    pub time: Exponent,
    pub temperature: Exponent,
}

const fn int(n: i32) -> Exponent {
    Ratio::new_raw(n, 1)
}

impl Dimension {
    pub const fn new(length: i32, mass: i32, time: i32, temperature: i32) -> Self {
        Self {
            length: int(length),
            mass: int(mass),
            time: int(time),
            temperature: int(temperature),
        }
    }

    pub const NONE: Self = Self::new(0, 0, 0, 0);
    pub const LENGTH: Self = Self::new(1, 0, 0, 0);
    pub const MASS: Self = Self::new(0, 1, 0, 0);
    pub const TIME: Self = Self::new(0, 0, 1, 0);
    pub const TEMPERATURE: Self = Self::new(0, 0, 0, 1);
    pub const ENERGY: Self = Self::new(2, 1, -2, 0);
    pub const VELOCITY: Self = Self::new(1, 0, -1, 0);
    pub const FREQUENCY: Self = Self::new(0, 0, -1, 0);
    pub const WAVENUMBER: Self = Self::new(-1, 0, 0, 0);
    pub const AREA_DENSITY: Self = Self::new(-2, 0, 0, 0);
    pub const VOLUME_DENSITY: Self = Self::new(-3, 0, 0, 0);
    pub const ACTION: Self = Self::new(2, 1, -1, 0);
    pub const HEAT_CAPACITY: Self = Self::new(2, 1, -2, -1);
    /// esu·cm = g^1/2 cm^5/2 s^-1
    pub const DIPOLE: Self = Self {
        length: Ratio::new_raw(5, 2),
        mass: Ratio::new_raw(1, 2),
        time: int(-1),
        temperature: int(0),
    };

    pub fn is_dimensionless(&self) -> bool {
        *self == Self::NONE
    }

    pub fn powi(self, n: i32) -> Self {
        let n = int(n);
        Self {
            length: self.length * n,
            mass: self.mass * n,
            time: self.time * n,
            temperature: self.temperature * n,
        }
    }

    pub fn sqrt(self) -> Self {
        let half = Ratio::new(1, 2);
        Self {
            length: self.length * half,
            mass: self.mass * half,
            time: self.time * half,
            temperature: self.temperature * half,
        }
    }

    pub fn recip(self) -> Self {
        self.powi(-1)
    }
}

impl Mul for Dimension {
    type Output = Dimension;
    fn mul(self, rhs: Dimension) -> Dimension {
        Dimension {
            length: self.length + rhs.length,
            mass: self.mass + rhs.mass,
            time: self.time + rhs.time,
            temperature: self.temperature + rhs.temperature,
        }
    }
}

impl Div for Dimension {
    type Output = Dimension;
    fn div(self, rhs: Dimension) -> Dimension {
        Dimension {
            length: self.length - rhs.length,
            mass: self.mass - rhs.mass,
            time: self.time - rhs.time,
            temperature: self.temperature - rhs.temperature,
        }
    }
}

impl fmt::Display for Dimension {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.is_dimensionless() {
            return write!(f, "1");
        }
        let mut first = true;
        for (sym, e) in [
            ("cm", self.length),
            ("g", self.mass),
            ("s", self.time),
            ("K", self.temperature),
        ] {
            if e == int(0) {
                continue;
            }
            if !first {
                write!(f, "·")?;
            }
            first = false;
            if e == int(1) {
                write!(f, "{sym}")?;
            } else {
                write!(f, "{sym}^{e}")?;
            }
        }
        Ok(())
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum UnitSystem {
    #[default]
    Cgs,
    Si,
}

impl FromStr for UnitSystem {
    type Err = UnitError;
    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s.to_ascii_lowercase().as_str() {
            "cgs" => Ok(Self::Cgs),
            "si" => Ok(Self::Si),
            other => Err(UnitError::UnknownUnit(other.to_string())),
        }
    }
}

/// Magnitude of one SI base unit expressed in CGS base units, raised to the
/// dimension's exponents. Multiplying an SI magnitude by this gives CGS.
fn si_to_cgs_factor(dim: Dimension) -> f64 {
    fn pow(base: f64, e: Exponent) -> f64 {
        if e.is_integer() {
            base.powi(*e.numer())
        } else {
            base.powf(*e.numer() as f64 / *e.denom() as f64)
        }
    }
    // 1 m = 100 cm, 1 kg = 1000 g
    pow(100.0, dim.length) * pow(1000.0, dim.mass)
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Quantity {
    value: f64,
    dim: Dimension,
    system: UnitSystem,
}

impl Quantity {
    /// A quantity whose magnitude is already in CGS base units.
    pub const fn cgs(value: f64, dim: Dimension) -> Self {
        Self {
            value,
            dim,
            system: UnitSystem::Cgs,
        }
    }

    pub const fn dimensionless(value: f64) -> Self {
        Self::cgs(value, Dimension::NONE)
    }

    pub fn new(value: f64, dim: Dimension, system: UnitSystem) -> Self {
        Self { value, dim, system }
    }

    pub fn value(&self) -> f64 {
        self.value
    }

    pub fn dimension(&self) -> Dimension {
        self.dim
    }

    pub fn system(&self) -> UnitSystem {
        self.system
    }

    /// Magnitude in CGS base units regardless of how the quantity is presented.
    pub fn cgs_value(&self) -> f64 {
        match self.system {
            UnitSystem::Cgs => self.value,
            UnitSystem::Si => self.value * si_to_cgs_factor(self.dim),
        }
    }

    pub fn convert(&self, target: UnitSystem) -> Quantity {
        let value = match (self.system, target) {
            (a, b) if a == b => self.value,
            (UnitSystem::Cgs, UnitSystem::Si) => self.value / si_to_cgs_factor(self.dim),
            (UnitSystem::Si, UnitSystem::Cgs) => self.value * si_to_cgs_factor(self.dim),
            _ => unreachable!(),
        };
        Quantity {
            value,
            dim: self.dim,
            system: target,
        }
    }

    pub fn to_cgs(&self) -> Quantity {
        self.convert(UnitSystem::Cgs)
    }

    /// Magnitude expressed in `unit`, which must have a matching dimension.
    pub fn in_unit(&self, unit: &Unit) -> Result<f64, UnitError> {
        self.expect(unit.dim)?;
        Ok(self.cgs_value() / unit.to_cgs)
    }

    pub fn expect(&self, dim: Dimension) -> Result<(), UnitError> {
        if self.dim == dim {
            Ok(())
        } else {
            Err(UnitError::Mismatch {
                left: self.dim,
                right: dim,
            })
        }
    }

    pub fn try_add(self, rhs: Quantity) -> Result<Quantity, UnitError> {
        self.expect(rhs.dim)?;
        let rhs = rhs.convert(self.system);
        Ok(Quantity {
            value: self.value + rhs.value,
            ..self
        })
    }

    pub fn try_sub(self, rhs: Quantity) -> Result<Quantity, UnitError> {
        self.try_add(-rhs)
    }

    pub fn try_cmp(&self, rhs: &Quantity) -> Result<Option<Ordering>, UnitError> {
        self.expect(rhs.dim)?;
        Ok(self.cgs_value().partial_cmp(&rhs.cgs_value()))
    }

    pub fn powi(self, n: i32) -> Quantity {
        Quantity::new(self.value.powi(n), self.dim.powi(n), self.system)
    }

    pub fn sqrt(self) -> Quantity {
        Quantity::new(self.value.sqrt(), self.dim.sqrt(), self.system)
    }

    pub fn recip(self) -> Quantity {
        Quantity::new(self.value.recip(), self.dim.recip(), self.system)
    }

    pub fn scale(self, k: f64) -> Quantity {
        Quantity {
            value: self.value * k,
            ..self
        }
    }

    /// Value of a dimensionless quantity.
    pub fn ratio(&self) -> Result<f64, UnitError> {
        self.expect(Dimension::NONE)?;
        Ok(self.value)
    }
}

impl std::ops::Neg for Quantity {
    type Output = Quantity;
    fn neg(self) -> Quantity {
        Quantity {
            value: -self.value,
            ..self
        }
    }
}

impl Mul for Quantity {
    type Output = Quantity;
    fn mul(self, rhs: Quantity) -> Quantity {
        let rhs = rhs.convert(self.system);
        Quantity::new(self.value * rhs.value, self.dim * rhs.dim, self.system)
    }
}

impl Div for Quantity {
    type Output = Quantity;
    fn div(self, rhs: Quantity) -> Quantity {
        let rhs = rhs.convert(self.system);
        Quantity::new(self.value / rhs.value, self.dim / rhs.dim, self.system)
    }
}

impl Mul<f64> for Quantity {
    type Output = Quantity;
    fn mul(self, rhs: f64) -> Quantity {
        self.scale(rhs)
    }
}

impl Div<f64> for Quantity {
    type Output = Quantity;
    fn div(self, rhs: f64) -> Quantity {
        self.scale(rhs.recip())
    }
}

impl fmt::Display for Quantity {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let q = self.to_cgs();
        write!(f, "{:e} {}", q.value, q.dim)
    }
}

/// CODATA 2018 exact/defined values in CGS.
pub const HBAR: f64 = 1.054_571_817_646_156_4e-27; // erg·s, h/2π
pub const PLANCK: f64 = 6.626_070_15e-27; // erg·s
pub const SPEED_OF_LIGHT: f64 = 2.997_924_58e10; // cm/s
pub const BOLTZMANN: f64 = 1.380_649e-16; // erg/K
pub const ELECTRON_VOLT: f64 = 1.602_176_634e-12; // erg

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ConstantId {
    Hbar,
    H,
    C,
    KBoltzmann,
}

impl FromStr for ConstantId {
    type Err = UnitError;
    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s {
            "hbar" => Ok(Self::Hbar),
            "h" => Ok(Self::H),
            "c" => Ok(Self::C),
            "k_boltzmann" | "kB" | "k_B" => Ok(Self::KBoltzmann),
            other => Err(UnitError::UnknownConstant(other.to_string())),
        }
    }
}

pub fn constant(id: ConstantId) -> Quantity {
    match id {
        ConstantId::Hbar => Quantity::cgs(HBAR, Dimension::ACTION),
        ConstantId::H => Quantity::cgs(PLANCK, Dimension::ACTION),
        ConstantId::C => Quantity::cgs(SPEED_OF_LIGHT, Dimension::VELOCITY),
        ConstantId::KBoltzmann => Quantity::cgs(BOLTZMANN, Dimension::HEAT_CAPACITY),
    }
}

/// Look a constant up by its textual name.
pub fn constant_named(name: &str) -> Result<Quantity, UnitError> {
    Ok(constant(name.parse()?))
}

pub fn hbar() -> Quantity {
    constant(ConstantId::Hbar)
}

pub fn planck() -> Quantity {
    constant(ConstantId::H)
}

pub fn c_light() -> Quantity {
    constant(ConstantId::C)
}

pub fn k_boltzmann() -> Quantity {
    constant(ConstantId::KBoltzmann)
}

// Constructors for the handful of units the toolkit speaks.

pub fn ev(x: f64) -> Quantity {
    Quantity::cgs(x * ELECTRON_VOLT, Dimension::ENERGY)
}

pub fn mev(x: f64) -> Quantity {
    ev(x * 1e-3)
}

pub fn kelvin(x: f64) -> Quantity {
    Quantity::cgs(x, Dimension::TEMPERATURE)
}

pub fn grams(x: f64) -> Quantity {
    Quantity::cgs(x, Dimension::MASS)
}

pub fn cm(x: f64) -> Quantity {
    Quantity::cgs(x, Dimension::LENGTH)
}

pub fn seconds(x: f64) -> Quantity {
    Quantity::cgs(x, Dimension::TIME)
}

pub fn per_second(x: f64) -> Quantity {
    Quantity::cgs(x, Dimension::FREQUENCY)
}

pub fn per_cm(x: f64) -> Quantity {
    Quantity::cgs(x, Dimension::WAVENUMBER)
}

pub fn per_cm2(x: f64) -> Quantity {
    Quantity::cgs(x, Dimension::AREA_DENSITY)
}

pub fn per_cm3(x: f64) -> Quantity {
    Quantity::cgs(x, Dimension::VOLUME_DENSITY)
}

pub fn esu_cm(x: f64) -> Quantity {
    Quantity::cgs(x, Dimension::DIPOLE)
}

/// A named unit: its dimension and the size of one unit in CGS base units.
#[derive(Debug, Clone, PartialEq)]
pub struct Unit {
    pub name: String,
    pub dim: Dimension,
    pub to_cgs: f64,
}

impl Unit {
    pub fn lookup(name: &str) -> Result<Unit, UnitError> {
        use Dimension as D;
        let (dim, to_cgs) = match name {
            "eV" => (D::ENERGY, ELECTRON_VOLT),
            "meV" => (D::ENERGY, 1e-3 * ELECTRON_VOLT),
            "ueV" => (D::ENERGY, 1e-6 * ELECTRON_VOLT),
            "erg" => (D::ENERGY, 1.0),
            "J" => (D::ENERGY, 1e7),
            "K" => (D::TEMPERATURE, 1.0),
            "s" => (D::TIME, 1.0),
            "ms" => (D::TIME, 1e-3),
            "us" => (D::TIME, 1e-6),
            "ns" => (D::TIME, 1e-9),
            "ps" => (D::TIME, 1e-12),
            "fs" => (D::TIME, 1e-15),
            "cm" => (D::LENGTH, 1.0),
            "m" => (D::LENGTH, 100.0),
            "mm" => (D::LENGTH, 0.1),
            "um" => (D::LENGTH, 1e-4),
            "nm" => (D::LENGTH, 1e-7),
            "g" => (D::MASS, 1.0),
            "kg" => (D::MASS, 1000.0),
            "cm^-1" | "1/cm" => (D::WAVENUMBER, 1.0),
            "m^-1" | "1/m" => (D::WAVENUMBER, 1e-2),
            "cm^-2" | "1/cm^2" => (D::AREA_DENSITY, 1.0),
            "m^-2" | "1/m^2" => (D::AREA_DENSITY, 1e-4),
            "cm^-3" | "1/cm^3" => (D::VOLUME_DENSITY, 1.0),
            "m^-3" | "1/m^3" => (D::VOLUME_DENSITY, 1e-6),
            "s^-1" | "1/s" | "rad/s" => (D::FREQUENCY, 1.0),
            "esu*cm" | "esu·cm" | "statC*cm" => (D::DIPOLE, 1.0),
            "D" | "debye" => (D::DIPOLE, 1e-18),
            // 1 C = 10 c esu (c in cm/s), 1 m = 100 cm
            "C*m" | "C·m" => (D::DIPOLE, 10.0 * SPEED_OF_LIGHT * 100.0),
            "1" | "" => (D::NONE, 1.0),
            other => return Err(UnitError::UnknownUnit(other.to_string())),
        };
        Ok(Unit {
            name: name.to_string(),
            dim,
            to_cgs,
        })
    }

    pub fn of(&self, x: f64) -> Quantity {
        Quantity::cgs(x * self.to_cgs, self.dim)
    }
}

/// A magnitude with its unit still attached, as parsed from `2.104 eV`.
#[derive(Debug, Clone, PartialEq)]
pub struct Measured {
    pub magnitude: f64,
    pub unit: Unit,
}

impl Measured {
    pub fn quantity(&self) -> Quantity {
        self.unit.of(self.magnitude)
    }
}

impl FromStr for Measured {
    type Err = UnitError;

    /// Parses `<number><ws?><unit>`. Bare numbers are rejected.
    fn from_str(s: &str) -> Result<Self, Self::Err> {
        let s = s.trim();
        let split = s
            .char_indices()
            .find(|&(i, ch)| {
                let numeric = ch.is_ascii_digit() || matches!(ch, '.' | '+' | '-');
                // exponent marker only counts when followed by a sign or digit
                let exp = matches!(ch, 'e' | 'E')
                    && i > 0
                    && s[i + 1..]
                        .chars()
                        .next()
                        .is_some_and(|c| c.is_ascii_digit() || c == '-' || c == '+');
                !(numeric || exp)
            })
            .map(|(i, _)| i)
            .unwrap_or(s.len());
        let (num, unit) = s.split_at(split);
        let unit = unit.trim();
        if unit.is_empty() {
            return Err(UnitError::MissingUnit {
                value: s.to_string(),
            });
        }
        let magnitude: f64 = num
            .trim()
            .parse()
            .map_err(|_| UnitError::BadNumber(s.to_string()))?;
        Ok(Measured {
            magnitude,
            unit: Unit::lookup(unit)?,
        })
    }
}

/// Parse a unit-suffixed value and check it has the expected dimension.
pub fn parse_quantity(s: &str, expected: Dimension) -> Result<Quantity, UnitError> {
    let m: Measured = s.parse()?;
    if m.unit.dim != expected {
        return Err(UnitError::WrongUnit {
            unit: m.unit.name,
            expected,
            found: m.unit.dim,
        });
    }
    Ok(m.quantity())
}
