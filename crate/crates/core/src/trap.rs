//! Gradient-index lens sizing for harmonic polariton confinement.
//!
//! The lens profile n²(r) = n₀²(1 − n′r²) gives the dimensionless focusing
//! potential U_opt(r) = (n²(r) − n₀²)/2n₀², of magnitude n′r²/2. Turning that
//! into an energy needs a scale; we use E_char (by default the transition
//! energy E₀, the energy of the confined paraxial photon), so that
//!
//! ```text
//!     E_char · n′r²/2 = m_eff Ω_eff² r²/2   ⇒   n′ = m_eff Ω_eff² / E_char
//! ```

use serde::Serialize;

use crate::error::{non_negative, positive, Result};
use crate::quantities::{hbar, k_boltzmann, Dimension, Quantity, UnitSystem, ELECTRON_VOLT};
use crate::thermo::BEC_ZETA;

/// r_max as a fraction of the profile's zero-crossing radius 1/√n′.
pub const DEFAULT_R_MAX_FRACTION: f64 = 0.5;

pub const ASSUMPTION_NOTE: &str =
    "n' = m_eff*Omega_eff^2/E_char: the optical potential n'r^2/2 is \
dimensionless and is converted to energy with E_char; Omega_at is echoed as given, no relation to \
Omega_eff is imposed";

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct LensProfile {
    pub n0: f64,
    /// Gradient parameter n′, 1/length².
    pub n_prime: Quantity,
    /// Radius over which the harmonic profile is trusted; `None` for a flat lens.
    pub r_max: Option<Quantity>,
}

impl LensProfile {
    /// n²(r) = n₀²(1 − n′r²)
    pub fn index_squared(&self, r: Quantity) -> Result<f64> {
        r.expect(Dimension::LENGTH)?;
        Ok(self.n0 * self.n0 * (1.0 - (self.n_prime * r * r).ratio()?))
    }

    /// U_opt(r) = n′r²/2, the magnitude of (n²(r) − n₀²)/(2n₀²).
    pub fn optical_potential(&self, r: Quantity) -> Result<f64> {
        r.expect(Dimension::LENGTH)?;
        Ok(0.5 * (self.n_prime * r * r).ratio()?)
    }

    pub fn zero_crossing(&self) -> Option<Quantity> {
        (self.n_prime.cgs_value() > 0.0).then(|| self.n_prime.sqrt().recip())
    }
}

pub fn lens_for_omega(
    omega_eff: Quantity,
    m_eff: Quantity,
    e_char: Quantity,
    n0: f64,
) -> Result<LensProfile> {
    lens_for_omega_with(omega_eff, m_eff, e_char, n0, DEFAULT_R_MAX_FRACTION)
}

pub fn lens_for_omega_with(
    omega_eff: Quantity,
    m_eff: Quantity,
    e_char: Quantity,
    n0: f64,
    r_max_fraction: f64,
) -> Result<LensProfile> {
    omega_eff.expect(Dimension::FREQUENCY)?;
    m_eff.expect(Dimension::MASS)?;
    e_char.expect(Dimension::ENERGY)?;
    non_negative("omega_eff", omega_eff.cgs_value())?;
    positive("m_eff", m_eff.cgs_value())?;
    positive("E_char", e_char.cgs_value())?;
    positive("n0", n0)?;
    positive("r_max_fraction", r_max_fraction)?;
    let n_prime = (m_eff * omega_eff * omega_eff / e_char).to_cgs();
    debug_assert_eq!(n_prime.dimension(), Dimension::AREA_DENSITY);
    let mut lens = LensProfile {
        n0,
        n_prime,
        r_max: None,
    };
    lens.r_max = lens.zero_crossing().map(|r| r * r_max_fraction);
    Ok(lens)
}

/// Ω_eff = √(n′E_char/m_eff)
pub fn omega_for_lens(lens: &LensProfile, m_eff: Quantity, e_char: Quantity) -> Result<Quantity> {
    m_eff.expect(Dimension::MASS)?;
    e_char.expect(Dimension::ENERGY)?;
    non_negative("n_prime", lens.n_prime.cgs_value())?;
    positive("m_eff", m_eff.cgs_value())?;
    Ok((lens.n_prime * e_char / m_eff).sqrt())
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct TrapDesign {
    pub lens: LensProfile,
    pub omega_eff: Quantity,
    pub omega_at: Quantity,
    pub e_char: Quantity,
    /// r_max ≥ d_beam/2, when the beam diameter is known.
    pub beam_fits: Option<bool>,
}

/// Serialized form of a [`TrapDesign`].
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct TrapDesignRecord {
    pub omega_eff_s1: f64,
    pub omega_at_s1: f64,
    pub n_prime_cm2: f64,
    pub n0: f64,
    pub r_max_cm: Option<f64>,
    #[serde(rename = "E_char_eV")]
    pub e_char_ev: f64,
    pub assumption_note: String,
}

/// Same record with SI length units.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct TrapDesignRecordSi {
    pub omega_eff_s1: f64,
    pub omega_at_s1: f64,
    pub n_prime_m2: f64,
    pub n0: f64,
    pub r_max_m: Option<f64>,
    #[serde(rename = "E_char_eV")]
    pub e_char_ev: f64,
    pub assumption_note: String,
}

impl TrapDesign {
    pub fn record(&self) -> TrapDesignRecord {
        TrapDesignRecord {
            omega_eff_s1: self.omega_eff.cgs_value(),
            omega_at_s1: self.omega_at.cgs_value(),
            n_prime_cm2: self.lens.n_prime.cgs_value(),
            n0: self.lens.n0,
            r_max_cm: self.lens.r_max.map(|r| r.cgs_value()),
            e_char_ev: self.e_char.cgs_value() / ELECTRON_VOLT,
            assumption_note: ASSUMPTION_NOTE.to_string(),
        }
    }

    pub fn record_si(&self) -> TrapDesignRecordSi {
        let si = |q: Quantity| q.convert(UnitSystem::Si).value();
        TrapDesignRecordSi {
            omega_eff_s1: si(self.omega_eff),
            omega_at_s1: si(self.omega_at),
            n_prime_m2: si(self.lens.n_prime),
            n0: self.lens.n0,
            r_max_m: self.lens.r_max.map(si),
            e_char_ev: self.e_char.cgs_value() / ELECTRON_VOLT,
            assumption_note: ASSUMPTION_NOTE.to_string(),
        }
    }
}

/// Ω_eff needed for `n` particles to condense at `target_tc`: k_B T_c √(1.645/N)/ħ.
pub fn required_omega(target_tc: Quantity, n: f64) -> Result<Quantity> {
    target_tc.expect(Dimension::TEMPERATURE)?;
    positive("target_Tc", target_tc.cgs_value())?;
    positive("N", n)?;
    Ok(k_boltzmann() * target_tc / hbar() * (BEC_ZETA / n).sqrt())
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct TrapRequest {
    pub target_tc: Quantity,
    pub n_particles: f64,
    pub m_eff: Quantity,
    pub e_char: Quantity,
    pub omega_at: Quantity,
    pub n0: f64,
    pub beam_diameter: Option<Quantity>,
}

pub fn design_trap(req: &TrapRequest) -> Result<TrapDesign> {
    req.omega_at.expect(Dimension::FREQUENCY)?;
    non_negative("omega_at", req.omega_at.cgs_value())?;
    let omega_eff = required_omega(req.target_tc, req.n_particles)?;
    let lens = lens_for_omega(omega_eff, req.m_eff, req.e_char, req.n0)?;
    let beam_fits = match (req.beam_diameter, lens.r_max) {
        (Some(d), Some(r)) => {
            d.expect(Dimension::LENGTH)?;
            Some(r.cgs_value() >= 0.5 * d.cgs_value())
        }
        (Some(_), None) => Some(true),
        (None, _) => None,
    };
    Ok(TrapDesign {
        lens,
        omega_eff,
        omega_at: req.omega_at.to_cgs(),
        e_char: req.e_char.to_cgs(),
        beam_fits,
    })
}
