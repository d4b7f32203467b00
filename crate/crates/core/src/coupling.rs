//! Strong-coupling check and the (g, k⊥, Δ) parameter set.

use std::f64::consts::PI;

use crate::error::{positive, Error, Result};
use crate::quantities::{c_light, hbar, Dimension, Quantity};

/// Default margin for "ω_c ≫ 1/2τ_coh".
pub const DEFAULT_STRONG_THRESHOLD: f64 = 10.0;

/// The two-level atomic medium.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct MediumParams {
    /// E_at ≡ E₀
    pub transition_energy: Quantity,
    /// Transition dipole moment, esu·cm.
    pub dipole_moment: Quantity,
    /// Atomic number density n₃.
    pub density: Quantity,
    pub coherence_time: Quantity,
}

impl MediumParams {
    pub fn new(
        transition_energy: Quantity,
        dipole_moment: Quantity,
        density: Quantity,
        coherence_time: Quantity,
    ) -> Result<Self> {
        for (name, q, dim) in [
            ("transition_energy", transition_energy, Dimension::ENERGY),
            ("dipole_moment", dipole_moment, Dimension::DIPOLE),
            ("density", density, Dimension::VOLUME_DENSITY),
            ("coherence_time", coherence_time, Dimension::TIME),
        ] {
            q.expect(dim)?;
            positive(name, q.cgs_value())?;
        }
        Ok(Self {
            transition_energy: transition_energy.to_cgs(),
            dipole_moment: dipole_moment.to_cgs(),
            density: density.to_cgs(),
            coherence_time: coherence_time.to_cgs(),
        })
    }

    /// ω₀ = E₀/ħ
    pub fn transition_frequency(&self) -> Quantity {
        self.transition_energy / hbar()
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct CavityParams {
    pub length: Quantity,
    pub mode_index: u32,
    pub beam_diameter: Option<Quantity>,
}

impl CavityParams {
    pub fn new(length: Quantity, mode_index: u32, beam_diameter: Option<Quantity>) -> Result<Self> {
        length.expect(Dimension::LENGTH)?;
        positive("L_cav", length.cgs_value())?;
        if mode_index == 0 {
            return Err(Error::InvalidParameter {
                name: "m",
                reason: "mode index must be at least 1".into(),
            });
        }
        if let Some(d) = beam_diameter {
            d.expect(Dimension::LENGTH)?;
            positive("d_beam", d.cgs_value())?;
        }
        Ok(Self {
            length: length.to_cgs(),
            mode_index,
            beam_diameter: beam_diameter.map(|d| d.to_cgs()),
        })
    }

    /// k⊥ = πm/L_cav
    pub fn k_perp(&self) -> Quantity {
        self.length.recip() * (PI * self.mode_index as f64)
    }

    /// Diffraction-limited divergence φ ≈ d/L_cav, when the beam size is known.
    pub fn diffraction_limit(&self) -> Option<f64> {
        self.beam_diameter
            .map(|d| d.cgs_value() / self.length.cgs_value())
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct CouplingParams {
    pub g: Quantity,
    pub k_perp: Quantity,
    /// Δ = E₀ − ħck⊥, signed.
    pub detuning: Quantity,
    pub cavity: CavityParams,
}

impl CouplingParams {
    /// Photon energy of the selected mode at k∥ = 0.
    pub fn cavity_energy(&self) -> Quantity {
        hbar() * c_light() * self.k_perp
    }
}

/// ω_c = (2π d² ω₀ n / ħ)^{1/2}, Gaussian units.
pub fn cooperative_frequency(medium: &MediumParams) -> Quantity {
    let d = medium.dipole_moment;
    let w = (d * d * medium.transition_frequency() * medium.density / hbar() * (2.0 * PI)).sqrt();
    debug_assert_eq!(w.dimension(), Dimension::FREQUENCY);
    w
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Regime {
    Strong,
    Weak,
}

impl std::fmt::Display for Regime {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(match self {
            Regime::Strong => "Strong",
            Regime::Weak => "Weak",
        })
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct CouplingCheck {
    pub cooperative_frequency: Quantity,
    /// 1/2τ_coh
    pub decoherence_rate: Quantity,
    /// ω_c·2τ_coh
    pub ratio: f64,
    pub threshold: f64,
    pub regime: Regime,
}

pub fn classify(ratio: f64, threshold: f64) -> Regime {
    if ratio > threshold {
        Regime::Strong
    } else {
        Regime::Weak
    }
}

pub fn is_strong_coupling(medium: &MediumParams) -> CouplingCheck {
    is_strong_coupling_with(medium, DEFAULT_STRONG_THRESHOLD)
}

pub fn is_strong_coupling_with(medium: &MediumParams, threshold: f64) -> CouplingCheck {
    let omega_c = cooperative_frequency(medium);
    let rate = medium.coherence_time.recip() * 0.5;
    let ratio = (omega_c / rate)
        .ratio()
        .expect("ω_c·2τ_coh is dimensionless");
    CouplingCheck {
        cooperative_frequency: omega_c,
        decoherence_rate: rate,
        ratio,
        threshold,
        regime: classify(ratio, threshold),
    }
}

pub fn make_coupling(
    medium: &MediumParams,
    cavity: &CavityParams,
    g: Quantity,
) -> Result<CouplingParams> {
    coupling_for_transition(medium.transition_energy, cavity, g)
}

/// [`make_coupling`] when only the transition energy of the medium is known.
pub fn coupling_for_transition(
    e0: Quantity,
    cavity: &CavityParams,
    g: Quantity,
) -> Result<CouplingParams> {
    e0.expect(Dimension::ENERGY)?;
    positive("E0", e0.cgs_value())?;
    g.expect(Dimension::ENERGY)?;
    positive("g", g.cgs_value())?;
    let k_perp = cavity.k_perp();
    let photon = hbar() * c_light() * k_perp;
    let detuning = e0.to_cgs().try_sub(photon)?;
    Ok(CouplingParams {
        g: g.to_cgs(),
        k_perp,
        detuning,
        cavity: *cavity,
    })
}

/// L_cav = πmħc/E₀, the length that makes Δ vanish for mode `m`.
pub fn resonant_cavity_length(medium: &MediumParams, m: u32) -> Result<Quantity> {
    if m == 0 {
        return Err(Error::InvalidParameter {
            name: "m",
            reason: "mode index must be at least 1".into(),
        });
    }
    Ok(hbar() * c_light() / medium.transition_energy * (PI * m as f64))
}

/// Cavity length for mode `m` that yields detuning `delta` (Δ = E₀ − ħck⊥).
pub fn cavity_length_for_detuning(
    medium: &MediumParams,
    m: u32,
    delta: Quantity,
) -> Result<Quantity> {
    length_for_detuning(medium.transition_energy, m, delta)
}

pub fn length_for_detuning(e0: Quantity, m: u32, delta: Quantity) -> Result<Quantity> {
    if m == 0 {
        return Err(Error::InvalidParameter {
            name: "m",
            reason: "mode index must be at least 1".into(),
        });
    }
    delta.expect(Dimension::ENERGY)?;
    e0.expect(Dimension::ENERGY)?;
    let photon = e0.to_cgs().try_sub(delta)?;
    positive("E0 - Delta", photon.cgs_value())?;
    Ok(hbar() * c_light() / photon * (PI * m as f64))
}
