//! Thermodynamics of the transverse polariton gas.
//!
//! Two conventions differ from the formulas as commonly printed:
//!
//! * λ_T = h/√(2π m k_B T). With this definition n₂λ_T² = T_d/T exactly and
//!   m = 5×10⁻³³ g at 300 K gives 1.84×10⁻⁴ cm. The reduced form
//!   ħ/√(2m k_B T) is smaller by √(4π) and is kept only for reporting
//!   ([`reduced_thermal_wavelength`]).
//! * μ = k_B T ln[1 − exp(−T_d/T)], i.e. the exponent is n₂λ_T² = T_d/T.

use std::f64::consts::PI;

use crate::coupling::CouplingParams;
use crate::error::{non_negative, positive, Error, Result};
use crate::quantities::{c_light, hbar, k_boltzmann, planck, Dimension, Quantity};

/// The 2D trapped-gas constant ζ(2) ≈ 1.645.
pub const BEC_ZETA: f64 = 1.645;

/// |μ| below this many k_B T is flagged as numerically zero.
pub const MU_NEGLIGIBLE: f64 = 1e-13;

/// Saturation guard: 1 ∓ Δ/√(Δ² + 4g²) below this means the mass diverges.
const MASS_SATURATION: f64 = 1e-12;

#[derive(Debug, Clone, Copy, PartialEq)]
pub enum BranchMass {
    Finite(Quantity),
    /// The branch has become flat within 10⁻¹² (mass → ∞).
    Saturated,
}

impl BranchMass {
    pub fn value(&self) -> Option<Quantity> {
        match self {
            BranchMass::Finite(q) => Some(*q),
            BranchMass::Saturated => None,
        }
    }

    pub fn is_saturated(&self) -> bool {
        matches!(self, BranchMass::Saturated)
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PolaritonMasses {
    /// m_ph = ħk⊥/c
    pub m_ph: Quantity,
    pub upper: BranchMass,
    pub lower: BranchMass,
    pub detuning: Quantity,
}

/// m_pol⁽¹,²⁾ = 2m_ph / (1 ∓ Δ/√(Δ² + 4g²)), upper branch with "−".
pub fn effective_masses(coupling: &CouplingParams) -> PolaritonMasses {
    let m_ph = hbar() * coupling.k_perp / c_light();
    let delta = coupling.detuning.cgs_value();
    let g = coupling.g.cgs_value();
    let s = delta.hypot(2.0 * g);
    let r = delta / s;
    // 1 ∓ r without cancellation: 1 − |r| = 4g²/(s(s + |Δ|))
    let small = 4.0 * g * g / (s * (s + delta.abs()));
    let (minus, plus) = if delta >= 0.0 {
        (small, 1.0 + r)
    } else {
        (1.0 - r, small)
    };
    let branch = |denom: f64| {
        if denom < MASS_SATURATION {
            BranchMass::Saturated
        } else {
            BranchMass::Finite(m_ph * (2.0 / denom))
        }
    };
    PolaritonMasses {
        m_ph,
        upper: branch(minus),
        lower: branch(plus),
        detuning: coupling.detuning,
    }
}

fn check(q: Quantity, dim: Dimension, name: &'static str) -> Result<f64> {
    q.expect(dim)?;
    let v = q.cgs_value();
    positive(name, v)?;
    Ok(v)
}

/// ħ²k∥²/(2m)
pub fn transverse_energy(k_par: Quantity, m: Quantity) -> Result<Quantity> {
    k_par.expect(Dimension::WAVENUMBER)?;
    check(m, Dimension::MASS, "m")?;
    let hk = hbar() * k_par;
    Ok(hk * hk / (m * 2.0))
}

/// v_gr = ħk∥/m
pub fn group_velocity(k_par: Quantity, m: Quantity) -> Result<Quantity> {
    k_par.expect(Dimension::WAVENUMBER)?;
    check(m, Dimension::MASS, "m")?;
    Ok(hbar() * k_par / m)
}

/// λ_T = h/√(2π m k_B T)
pub fn thermal_wavelength(m: Quantity, t: Quantity) -> Result<Quantity> {
    check(m, Dimension::MASS, "m")?;
    check(t, Dimension::TEMPERATURE, "T")?;
    Ok(planck() / (m * k_boltzmann() * t * (2.0 * PI)).sqrt())
}

/// ħ/√(2m k_B T), the reduced form; differs from [`thermal_wavelength`] by √(4π).
pub fn reduced_thermal_wavelength(m: Quantity, t: Quantity) -> Result<Quantity> {
    check(m, Dimension::MASS, "m")?;
    check(t, Dimension::TEMPERATURE, "T")?;
    Ok(hbar() / (m * k_boltzmann() * t * 2.0).sqrt())
}

/// T_d = 2πħ²n₂/(m k_B)
pub fn degeneracy_temperature(n2: Quantity, m: Quantity) -> Result<Quantity> {
    check(n2, Dimension::AREA_DENSITY, "n2")?;
    check(m, Dimension::MASS, "m")?;
    let hb = hbar();
    Ok(hb * hb * n2 / (m * k_boltzmann()) * (2.0 * PI))
}

/// T_KT = πħ²n_s/(2m k_B)
pub fn kt_temperature(n_s: Quantity, m: Quantity) -> Result<Quantity> {
    check(n_s, Dimension::AREA_DENSITY, "n_s")?;
    check(m, Dimension::MASS, "m")?;
    let hb = hbar();
    Ok(hb * hb * n_s / (m * k_boltzmann()) * (PI / 2.0))
}

/// Density form of the trapped critical temperature, 2πħ²n₂/(1.645 m k_B).
pub fn trapped_bec_temperature(n2: Quantity, m: Quantity) -> Result<Quantity> {
    Ok(degeneracy_temperature(n2, m)? / BEC_ZETA)
}

/// Particle-number form, T_c = (ħΩ_eff/k_B)√(N/1.645). Ω_eff = 0 gives 0.
pub fn trapped_bec_temperature_from_n(n: f64, omega_eff: Quantity) -> Result<Quantity> {
    positive("N", n)?;
    omega_eff.expect(Dimension::FREQUENCY)?;
    non_negative("omega_eff", omega_eff.cgs_value())?;
    Ok(hbar() * omega_eff / k_boltzmann() * (n / BEC_ZETA).sqrt())
}

/// N₂ = 2πn₂k_BT/(m Ω_eff²)
pub fn trapped_number(n2: Quantity, t: Quantity, omega_eff: Quantity, m: Quantity) -> Result<f64> {
    check(n2, Dimension::AREA_DENSITY, "n2")?;
    check(t, Dimension::TEMPERATURE, "T")?;
    check(m, Dimension::MASS, "m")?;
    omega_eff.expect(Dimension::FREQUENCY)?;
    if omega_eff.cgs_value() == 0.0 {
        return Err(Error::TrapRequired);
    }
    non_negative("omega_eff", omega_eff.cgs_value())?;
    let n = n2 * k_boltzmann() * t / (m * omega_eff * omega_eff) * (2.0 * PI);
    Ok(n.ratio()?)
}

/// N₀/N ≈ 1 − (T/T_c)², clamped at 0 above T_c.
pub fn condensate_fraction(t: Quantity, t_c: Quantity) -> Result<f64> {
    t.expect(Dimension::TEMPERATURE)?;
    non_negative("T", t.cgs_value())?;
    check(t_c, Dimension::TEMPERATURE, "T_c")?;
    let x = t.cgs_value() / t_c.cgs_value();
    Ok((1.0 - x * x).max(0.0))
}

/// Temperature scale with k_B T_eff ≈ g. Informational only.
pub fn effective_temperature(g: Quantity) -> Result<Quantity> {
    g.expect(Dimension::ENERGY)?;
    Ok(g / k_boltzmann())
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct GasState {
    pub n2: Option<Quantity>,
    pub n3: Option<Quantity>,
    /// Superfluid density for the KT estimate; defaults to n₂.
    pub n_s: Option<Quantity>,
    pub temperature: Quantity,
    pub m_eff: Quantity,
}

impl GasState {
    pub fn with_n2(n2: Quantity, temperature: Quantity, m_eff: Quantity) -> Self {
        Self {
            n2: Some(n2),
            n3: None,
            n_s: None,
            temperature,
            m_eff,
        }
    }

    pub fn with_n3(n3: Quantity, temperature: Quantity, m_eff: Quantity) -> Self {
        Self {
            n2: None,
            n3: Some(n3),
            n_s: None,
            temperature,
            m_eff,
        }
    }

    /// n₂, or the estimate λ_T·n₃ when only the 3D density is known.
    /// The flag is true for the estimate.
    pub fn resolved_n2(&self) -> Result<(Quantity, bool)> {
        match (self.n2, self.n3) {
            (Some(n2), _) => {
                check(n2, Dimension::AREA_DENSITY, "n2")?;
                Ok((n2.to_cgs(), false))
            }
            (None, Some(n3)) => {
                check(n3, Dimension::VOLUME_DENSITY, "n3")?;
                let lambda = thermal_wavelength(self.m_eff, self.temperature)?;
                Ok((lambda * n3.to_cgs(), true))
            }
            (None, None) => Err(Error::InvalidParameter {
                name: "n2",
                reason: "either n2 or n3 is required".into(),
            }),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ChemicalPotential {
    pub mu: Quantity,
    /// |μ| < 10⁻¹³ k_B T: indistinguishable from 0⁻.
    pub negligible: bool,
}

/// ln(1 − e^{−x}) for x > 0 without cancellation at either end.
fn ln_one_minus_exp_neg(x: f64) -> f64 {
    if x <= std::f64::consts::LN_2 {
        (-(-x).exp_m1()).ln()
    } else {
        (-(-x).exp()).ln_1p()
    }
}

/// μ = k_B T ln[1 − exp(−T_d/T)]
pub fn chemical_potential(state: &GasState) -> Result<ChemicalPotential> {
    let t = check(state.temperature, Dimension::TEMPERATURE, "T")?;
    let (n2, _) = state.resolved_n2()?;
    let t_d = degeneracy_temperature(n2, state.m_eff)?.cgs_value();
    let reduced = ln_one_minus_exp_neg(t_d / t);
    Ok(ChemicalPotential {
        mu: k_boltzmann() * state.temperature.to_cgs() * reduced,
        negligible: reduced.abs() < MU_NEGLIGIBLE,
    })
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct TrapSpec {
    pub omega_eff: Quantity,
    pub u0: Option<Quantity>,
    pub r0: Option<Quantity>,
}

impl TrapSpec {
    pub fn new(omega_eff: Quantity) -> Result<Self> {
        omega_eff.expect(Dimension::FREQUENCY)?;
        non_negative("omega_eff", omega_eff.cgs_value())?;
        Ok(Self {
            omega_eff: omega_eff.to_cgs(),
            u0: None,
            r0: None,
        })
    }

    /// U(r) = m Ω_eff² r²/2
    pub fn potential(&self, m: Quantity, r: Quantity) -> Result<Quantity> {
        m.expect(Dimension::MASS)?;
        r.expect(Dimension::LENGTH)?;
        Ok(m * self.omega_eff * self.omega_eff * r * r * 0.5)
    }

    /// Relative mismatch between U₀ and m Ω_eff² r₀²/2, when both are given.
    pub fn consistency(&self, m: Quantity) -> Result<Option<f64>> {
        match (self.u0, self.r0) {
            (Some(u0), Some(r0)) => {
                u0.expect(Dimension::ENERGY)?;
                let u = self.potential(m, r0)?;
                Ok(Some(
                    (u.cgs_value() - u0.cgs_value()).abs() / u0.cgs_value().abs(),
                ))
            }
            _ => Ok(None),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct CondensationReport {
    pub temperature: Quantity,
    pub m_eff: Quantity,
    pub n3: Option<Quantity>,
    pub n2: Quantity,
    /// n₂ came from λ_T·n₃ rather than direct input.
    pub n2_estimated: bool,
    pub lambda_t: Quantity,
    /// ħ/√(2m k_B T), reported for comparison only.
    pub lambda_reduced: Quantity,
    pub r_int: Quantity,
    pub t_d: Quantity,
    pub t_kt: Quantity,
    pub mu: ChemicalPotential,
    pub omega_eff: Option<Quantity>,
    pub t_c: Option<Quantity>,
    pub n_trapped: Option<f64>,
    pub condensate_fraction: Option<f64>,
    pub degenerate: bool,
    pub kt_superfluid: bool,
    pub overlap: bool,
}

pub fn condensation_report(
    state: &GasState,
    trap: Option<&TrapSpec>,
) -> Result<CondensationReport> {
    let t = state.temperature.to_cgs();
    let m = state.m_eff.to_cgs();
    let (n2, n2_estimated) = state.resolved_n2()?;
    let lambda_t = thermal_wavelength(m, t)?;
    let r_int = n2.sqrt().recip();
    let t_d = degeneracy_temperature(n2, m)?;
    let t_kt = kt_temperature(state.n_s.unwrap_or(n2), m)?;
    let mu = chemical_potential(state)?;

    let (omega_eff, t_c, n_trapped, fraction) = match trap {
        Some(spec) => {
            let t_c = trapped_bec_temperature(n2, m)?;
            let n_trapped = if spec.omega_eff.cgs_value() > 0.0 {
                Some(trapped_number(n2, t, spec.omega_eff, m)?)
            } else {
                None
            };
            let frac = condensate_fraction(t, t_c)?;
            (Some(spec.omega_eff), Some(t_c), n_trapped, Some(frac))
        }
        None => (None, None, None, None),
    };
    let below = |threshold: Quantity| t.cgs_value() <= threshold.cgs_value();
    Ok(CondensationReport {
        temperature: t,
        m_eff: m,
        n3: state.n3.map(|q| q.to_cgs()),
        n2,
        n2_estimated,
        lambda_t,
        lambda_reduced: reduced_thermal_wavelength(m, t)?,
        r_int,
        t_d,
        t_kt,
        mu,
        omega_eff,
        t_c,
        n_trapped,
        condensate_fraction: fraction,
        degenerate: below(t_d),
        kt_superfluid: below(t_kt),
        overlap: lambda_t.cgs_value() >= r_int.cgs_value(),
    })
}
