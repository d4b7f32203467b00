//! Polariton branches, Hopfield weights and the lower-branch well.
//!
//! A single cavity mode coupled to the atomic transition is the 2×2 problem
//!
//! ```text
//!     | E_ph   g   |
//!     |  g    E_at |
//! ```
//!
//! whose eigenvalues are the upper/lower branch energies E₁ ≥ E₂. The closed
//! forms live in [`diagonalize_mode`]; [`oracle_diagonalize`] solves the same
//! matrix by a separate route and exists to check it.
//!
//! Weight convention: `mu_sq` is the photon weight of the upper polariton
//! (equivalently the atomic weight of the lower one), `nu_sq = 1 − mu_sq`.
//! For δ = E_at − E_ph → −∞ the upper branch is photon-like and μ² → 1.

use std::fmt::Write as _;

use rayon::prelude::*;

use crate::coupling::CouplingParams;
use crate::error::{positive, Error, Result};
use crate::quantities::{c_light, hbar, Dimension, Quantity, ELECTRON_VOLT};
use crate::thermo::effective_masses;

/// k∥ ≤ 0.2·k⊥ is treated as paraxial.
pub const DEFAULT_PARAXIAL_BOUND: f64 = 0.2;

/// Central-difference step for ∂²E₂/∂k∥², in units of k⊥.
const WELL_DIFF_STEP: f64 = 1e-4;
/// Bisection tolerance on the inflection point, in units of k⊥.
const WELL_ROOT_TOL: f64 = 1e-6;

/// One k-point of the two-mode problem. Energies may be in any common unit.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ModeProblem {
    pub e_at: f64,
    pub e_ph: f64,
    pub g: f64,
}

impl ModeProblem {
    pub fn new(e_at: f64, e_ph: f64, g: f64) -> Result<Self> {
        if !(g >= 0.0 && g.is_finite()) {
            return Err(Error::InvalidParameter {
                name: "g",
                reason: format!("coupling must be non-negative, got {g}"),
            });
        }
        Ok(Self { e_at, e_ph, g })
    }

    /// δ = E_at − E_ph
    pub fn mismatch(&self) -> f64 {
        self.e_at - self.e_ph
    }
}

/// Eigen-decomposition of a [`ModeProblem`], in the problem's energy unit.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ModeSolution {
    pub upper: f64,
    pub lower: f64,
    pub mu_sq: f64,
    pub nu_sq: f64,
    /// E₁ − E₂ as computed by the solver, not by subtracting the branches.
    pub splitting: f64,
}

impl ModeSolution {
    pub fn gap(&self) -> f64 {
        self.splitting
    }
}

/// Closed-form branch energies and Hopfield weights.
///
/// E₁,₂ = ½{E_at + E_ph ± [δ² + 4g²]^{1/2}},
/// μ² = 4g² / (2s(δ + s)), ν² = (δ + s)/(2s), with s = (δ² + 4g²)^{1/2}.
///
/// For δ < 0 the factor δ + s is rewritten as 4g²/(s − δ) so neither weight
/// loses digits far from resonance.
pub fn diagonalize_mode(prob: &ModeProblem) -> ModeSolution {
    let delta = prob.mismatch();
    let four_g2 = 4.0 * prob.g * prob.g;
    let s = delta.hypot(2.0 * prob.g);
    let sum = prob.e_at + prob.e_ph;
    let (mu_sq, nu_sq) = if s == 0.0 {
        (0.5, 0.5)
    } else if delta >= 0.0 {
        (four_g2 / (2.0 * s * (delta + s)), (delta + s) / (2.0 * s))
    } else {
        ((s - delta) / (2.0 * s), four_g2 / (2.0 * s * (s - delta)))
    };
    ModeSolution {
        upper: 0.5 * (sum + s),
        lower: 0.5 * (sum - s),
        mu_sq,
        nu_sq,
        splitting: s,
    }
}

/// Brute-force eigen-solution of `[[E_ph, g], [g, E_at]]`.
///
/// Roots of λ² − tλ + det = 0 via the cancellation-free pair q, det/q; the
/// upper eigenvector comes from the better-conditioned row of (M − λ₁I).
pub fn oracle_diagonalize(prob: &ModeProblem) -> ModeSolution {
    let (a, b, d) = (prob.e_ph, prob.g, prob.e_at);
    let trace = a + d;
    let det = a * d - b * b;
    let half_diff = 0.5 * (a - d);
    let disc = (half_diff * half_diff + b * b).sqrt();
    // larger-magnitude root first, the other from the product of roots
    let (upper, lower) = if trace >= 0.0 {
        let q = 0.5 * trace + disc;
        let other = if q != 0.0 {
            det / q
        } else {
            0.5 * trace - disc
        };
        (q, other)
    } else {
        let q = 0.5 * trace - disc;
        let other = if q != 0.0 {
            det / q
        } else {
            0.5 * trace + disc
        };
        (other, q)
    };
    // null vector of (M − upper·I), from whichever row is larger
    let row1 = (b, upper - a);
    let row2 = (upper - d, b);
    let n1 = row1.0 * row1.0 + row1.1 * row1.1;
    let n2 = row2.0 * row2.0 + row2.1 * row2.1;
    let (photon, atom, norm) = if n1 >= n2 {
        (row1.0, row1.1, n1)
    } else {
        (row2.0, row2.1, n2)
    };
    let (mu_sq, nu_sq) = if norm == 0.0 {
        // fully degenerate, any basis works; pick the symmetric one
        (0.5, 0.5)
    } else {
        (photon * photon / norm, atom * atom / norm)
    };
    ModeSolution {
        upper,
        lower,
        mu_sq,
        nu_sq,
        splitting: 2.0 * disc,
    }
}

/// E_ph(k∥) = ħc[k⊥ + k∥²/(2k⊥)], the paraxial photon dispersion.
pub fn photon_energy_paraxial(k_par: Quantity, coupling: &CouplingParams) -> Result<Quantity> {
    k_par.expect(Dimension::WAVENUMBER)?;
    let kp = coupling.k_perp;
    let k = k_par.to_cgs();
    let shift = (k * k) / (kp * 2.0);
    Ok(hbar() * c_light() * kp.try_add(shift)?)
}

/// Unexpanded E_ph = ħc|k| with |k|² = k⊥² + k∥².
pub fn photon_energy_exact(k_par: Quantity, coupling: &CouplingParams) -> Result<Quantity> {
    k_par.expect(Dimension::WAVENUMBER)?;
    let kp = coupling.k_perp;
    let k = k_par.to_cgs();
    Ok(hbar() * c_light() * (kp * kp).try_add(k * k)?.sqrt())
}

/// Whether `k_par` lies inside the paraxial window `bound·k⊥`.
pub fn is_paraxial(k_par_over_k_perp: f64, bound: f64) -> bool {
    k_par_over_k_perp.abs() <= bound
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct BranchPoint {
    pub k_par: Quantity,
    pub upper: Quantity,
    pub lower: Quantity,
    pub mu_sq: f64,
    pub nu_sq: f64,
    pub photon_paraxial: Quantity,
    pub photon_free: Quantity,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct GridSpec {
    pub samples: usize,
    /// Upper end of the grid in units of k⊥.
    pub k_max: f64,
    pub paraxial_bound: f64,
}

impl GridSpec {
    pub fn new(samples: usize, k_max: f64) -> Self {
        Self {
            samples,
            k_max,
            paraxial_bound: DEFAULT_PARAXIAL_BOUND,
        }
    }

    pub fn points(&self) -> Vec<f64> {
        let last = (self.samples - 1) as f64;
        (0..self.samples)
            .map(|i| self.k_max * i as f64 / last)
            .collect()
    }
}

impl Default for GridSpec {
    fn default() -> Self {
        Self::new(201, DEFAULT_PARAXIAL_BOUND)
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct CurveMeta {
    pub delta_ev: f64,
    pub g_ev: f64,
    pub k_perp_cm1: f64,
    pub samples: usize,
    pub k_max: f64,
}

impl CurveMeta {
    pub fn to_header(&self) -> String {
        format!(
            "# Delta_eV = {}\n# g_eV = {}\n# k_perp_cm1 = {}\n# grid = {} samples over k_par/k_perp in [0, {}]\n",
            fmt_num(self.delta_ev),
            fmt_num(self.g_ev),
            fmt_num(self.k_perp_cm1),
            self.samples,
            fmt_num(self.k_max),
        )
    }

    /// Inverse of [`CurveMeta::to_header`]; unrelated comment lines are skipped.
    pub fn parse_header(text: &str) -> Option<CurveMeta> {
        let mut delta = None;
        let mut g = None;
        let mut kp = None;
        let mut grid = None;
        for line in text.lines() {
            let Some(rest) = line.strip_prefix("# ") else {
                continue;
            };
            let Some((key, val)) = rest.split_once(" = ") else {
                continue;
            };
            match key {
                "Delta_eV" => delta = val.parse().ok(),
                "g_eV" => g = val.parse().ok(),
                "k_perp_cm1" => kp = val.parse().ok(),
                "grid" => {
                    let (n, tail) = val.split_once(" samples over k_par/k_perp in [0, ")?;
                    let kmax = tail.strip_suffix(']')?;
                    grid = Some((n.parse().ok()?, kmax.parse().ok()?));
                }
                _ => {}
            }
        }
        let (samples, k_max) = grid?;
        Some(CurveMeta {
            delta_ev: delta?,
            g_ev: g?,
            k_perp_cm1: kp?,
            samples,
            k_max,
        })
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct DispersionCurve {
    pub points: Vec<BranchPoint>,
    pub meta: CurveMeta,
    /// Non-fatal notes, e.g. grid points outside the paraxial window.
    pub warnings: Vec<String>,
}

pub const DISPERSION_COLUMNS: [&str; 7] = [
    "k_par_over_k_perp",
    "E1_eV",
    "E2_eV",
    "mu_sq",
    "nu_sq",
    "E_ph_paraxial_eV",
    "E_ph_freespace_eV",
];

/// 12 significant digits, exponent form, locale-independent.
pub fn fmt_num(x: f64) -> String {
    format!("{x:.11e}")
}

impl DispersionCurve {
    /// Data rows (no header), in grid order.
    pub fn rows(&self) -> Vec<[f64; 7]> {
        let kp = self.meta.k_perp_cm1;
        self.points
            .iter()
            .map(|p| {
                [
                    p.k_par.cgs_value() / kp,
                    p.upper.cgs_value() / ELECTRON_VOLT,
                    p.lower.cgs_value() / ELECTRON_VOLT,
                    p.mu_sq,
                    p.nu_sq,
                    p.photon_paraxial.cgs_value() / ELECTRON_VOLT,
                    p.photon_free.cgs_value() / ELECTRON_VOLT,
                ]
            })
            .collect()
    }

    pub fn to_csv(&self) -> String {
        let mut out = self.meta.to_header();
        out.push_str(&DISPERSION_COLUMNS.join(","));
        out.push('\n');
        for row in self.rows() {
            let cells: Vec<String> = row.iter().map(|&x| fmt_num(x)).collect();
            let _ = writeln!(out, "{}", cells.join(","));
        }
        out
    }
}

/// Branch energies and weights along a k∥ grid.
///
/// Points may be computed in parallel; the result is always in grid order.
pub fn sample_dispersion(
    coupling: &CouplingParams,
    e_at: Quantity,
    grid: &GridSpec,
) -> Result<DispersionCurve> {
    e_at.expect(Dimension::ENERGY)?;
    if grid.samples < 2 {
        return Err(Error::EmptyGrid(grid.samples));
    }
    positive("k_max", grid.k_max)?;
    let kp = coupling.k_perp.cgs_value();
    let mut warnings = Vec::new();
    if !is_paraxial(grid.k_max, grid.paraxial_bound) {
        warnings.push(format!(
            "grid reaches k_par = {} k_perp, beyond the paraxial bound {}",
            grid.k_max, grid.paraxial_bound
        ));
    }
    let e_at_ev = e_at.cgs_value() / ELECTRON_VOLT;
    let g_ev = coupling.g.cgs_value() / ELECTRON_VOLT;
    let points = grid
        .points()
        .into_par_iter()
        .map(|t| -> Result<BranchPoint> {
            let k = Quantity::cgs(t * kp, Dimension::WAVENUMBER);
            let e_ph = photon_energy_paraxial(k, coupling)?;
            let free = photon_energy_exact(k, coupling)?;
            let prob = ModeProblem::new(e_at_ev, e_ph.cgs_value() / ELECTRON_VOLT, g_ev)?;
            let sol = diagonalize_mode(&prob);
            Ok(BranchPoint {
                k_par: k,
                upper: Quantity::cgs(sol.upper * ELECTRON_VOLT, Dimension::ENERGY),
                lower: Quantity::cgs(sol.lower * ELECTRON_VOLT, Dimension::ENERGY),
                mu_sq: sol.mu_sq,
                nu_sq: sol.nu_sq,
                photon_paraxial: e_ph,
                photon_free: free,
            })
        })
        .collect::<Result<Vec<_>>>()?;
    Ok(DispersionCurve {
        points,
        meta: CurveMeta {
            delta_ev: coupling.detuning.cgs_value() / ELECTRON_VOLT,
            g_ev,
            k_perp_cm1: kp,
            samples: grid.samples,
            k_max: grid.k_max,
        },
        warnings,
    })
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct WellGeometry {
    /// Δk∥ where ∂²E₂/∂k∥² changes sign.
    pub inflection_k: Quantity,
    /// E₂ at the paraxial window edge minus E₂(0).
    pub depth: Quantity,
    /// inflection_k / k⊥, radians.
    pub angular_halfwidth: f64,
    /// φ ≈ d_beam/L_cav, when the beam diameter is known.
    pub diffraction_limit: Option<f64>,
    pub diffraction_ok: Option<bool>,
    /// ħ²Δk∥²/2m_eff with the lower-branch mass.
    pub well_energy: Quantity,
    pub m_eff: Quantity,
}

/// Lower-branch energy measured from ħck⊥, as a function of k∥/k⊥.
/// Working relative to the cavity energy keeps the finite differences clean.
struct LowerBranch {
    /// E_at − ħck⊥
    offset: f64,
    /// ħck⊥
    scale: f64,
    g: f64,
}

impl LowerBranch {
    fn at(&self, t: f64) -> f64 {
        let x = 0.5 * self.scale * t * t;
        let delta = self.offset - x;
        0.5 * (self.offset + x - delta.hypot(2.0 * self.g))
    }

    fn curvature(&self, t: f64, h: f64) -> f64 {
        (self.at(t + h) - 2.0 * self.at(t) + self.at(t - h)) / (h * h)
    }
}

pub fn well_geometry(coupling: &CouplingParams, e_at: Quantity) -> Result<WellGeometry> {
    well_geometry_with(coupling, e_at, DEFAULT_PARAXIAL_BOUND)
}

/// Locates the inflection point of E₂(k∥) by scanning ∂²E₂/∂k∥² (central
/// differences) across the paraxial window and bisecting the first + → −
/// sign change.
pub fn well_geometry_with(
    coupling: &CouplingParams,
    e_at: Quantity,
    paraxial_bound: f64,
) -> Result<WellGeometry> {
    e_at.expect(Dimension::ENERGY)?;
    positive("paraxial_bound", paraxial_bound)?;
    let cavity_e = coupling.cavity_energy();
    let branch = LowerBranch {
        offset: e_at.try_sub(cavity_e)?.cgs_value(),
        scale: cavity_e.cgs_value(),
        g: coupling.g.cgs_value(),
    };
    let h = WELL_DIFF_STEP;
    let steps = (paraxial_bound / h).floor() as usize;
    if branch.curvature(h, h) <= 0.0 {
        return Err(Error::NoWell(
            "lower branch has no resolvable curvature at k_par = 0".into(),
        ));
    }
    let bracket = (1..steps)
        .map(|i| (i as f64 * h, (i + 1) as f64 * h))
        .find(|&(_, b)| branch.curvature(b, h) <= 0.0)
        .ok_or_else(|| {
            Error::NoWell(format!(
                "second derivative keeps its sign up to k_par = {paraxial_bound} k_perp"
            ))
        })?;
    let (mut lo, mut hi) = bracket;
    while hi - lo > WELL_ROOT_TOL {
        let mid = 0.5 * (lo + hi);
        if branch.curvature(mid, h) > 0.0 {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    let t_infl = 0.5 * (lo + hi);
    let kp = coupling.k_perp;
    let inflection_k = kp * t_infl;
    let depth = Quantity::cgs(
        branch.at(paraxial_bound) - branch.at(0.0),
        Dimension::ENERGY,
    );
    let m_eff = effective_masses(coupling)
        .lower
        .value()
        .ok_or_else(|| Error::NoWell("lower-branch mass saturated".into()))?;
    let hb = hbar();
    let well_energy = hb * hb * inflection_k * inflection_k / (m_eff * 2.0);
    let diffraction_limit = coupling.cavity.diffraction_limit();
    Ok(WellGeometry {
        inflection_k,
        depth,
        angular_halfwidth: t_infl,
        diffraction_limit,
        diffraction_ok: diffraction_limit.map(|phi| t_infl > phi),
        well_energy,
        m_eff,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::coupling::{make_coupling, resonant_cavity_length, CavityParams, MediumParams};
    use crate::quantities::{cm, esu_cm, ev, per_cm, per_cm3, seconds};
    use proptest::prelude::*;

    fn rel(a: f64, b: f64) -> f64 {
        ((a - b) / b).abs()
    }

    fn resonant(g_ev: f64) -> (MediumParams, CouplingParams) {
        let med =
            MediumParams::new(ev(2.104), esu_cm(1e-18), per_cm3(3.5e11), seconds(1e-8)).unwrap();
        let l = resonant_cavity_length(&med, 1).unwrap();
        let cav = CavityParams::new(l, 1, Some(cm(1e-7))).unwrap();
        let cp = make_coupling(&med, &cav, ev(g_ev)).unwrap();
        (med, cp)
    }

    fn detuned(g_ev: f64, delta_ev: f64) -> (MediumParams, CouplingParams) {
        let med =
            MediumParams::new(ev(2.104), esu_cm(1e-18), per_cm3(3.5e11), seconds(1e-8)).unwrap();
        let l = crate::coupling::cavity_length_for_detuning(&med, 1, ev(delta_ev)).unwrap();
        let cav = CavityParams::new(l, 1, None).unwrap();
        (med, make_coupling(&med, &cav, ev(g_ev)).unwrap())
    }

    #[test]
    fn paraxial_photon_energy() {
        let (_, cp) = resonant(1e-4);
        let e0 = cp.cavity_energy().value();
        let at0 = photon_energy_paraxial(per_cm(0.0), &cp).unwrap();
        assert!(rel(at0.value(), e0) < 1e-15);
        let k = cp.k_perp * 0.1;
        let e = photon_energy_paraxial(k, &cp).unwrap().value();
        assert!(rel(e, e0 * 1.005) < 1e-14);
        // truncated vs exact: 1.005 / sqrt(1.01) - 1
        let exact = photon_energy_exact(k, &cp).unwrap().value();
        assert!(rel(rel(e, exact), 1.237_616_103_908e-5) < 1e-6);
        assert!(photon_energy_paraxial(cm(1.0), &cp).is_err());
    }

    #[test]
    fn truncation_error_bound_on_grid() {
        let (_, cp) = resonant(1e-4);
        for i in 1..=200 {
            let t = 0.2 * i as f64 / 200.0;
            let k = cp.k_perp * t;
            let e = photon_energy_paraxial(k, &cp).unwrap().value();
            let exact = photon_energy_exact(k, &cp).unwrap().value();
            assert!(rel(e, exact) <= t.powi(4) / 8.0 + 4.0 * f64::EPSILON);
        }
    }

    #[test]
    fn resonance_is_half_and_half() {
        let s = diagonalize_mode(&ModeProblem::new(2.1, 2.1, 0.01).unwrap());
        assert_eq!(s.mu_sq, 0.5);
        assert_eq!(s.nu_sq, 0.5);
        assert!((s.upper - 2.11).abs() < 1e-15 && (s.lower - 2.09).abs() < 1e-15);
    }

    #[test]
    fn golden_ratio_example() {
        // oracle matrix [[1,1],[1,2]]: eigenvalues (3 ± √5)/2
        let p = ModeProblem::new(2.0, 1.0, 1.0).unwrap();
        let s = diagonalize_mode(&p);
        assert!((s.upper - 2.618_033_988_749_895).abs() < 1e-14);
        assert!((s.lower - 0.381_966_011_250_105).abs() < 1e-14);
        assert!((s.upper * s.lower - 1.0).abs() < 1e-14);
        let o = oracle_diagonalize(&p);
        assert!((o.upper - s.upper).abs() < 1e-14 && (o.lower - s.lower).abs() < 1e-14);
    }

    #[test]
    fn detuned_three_g_weights() {
        // normalized upper eigenvector of [[0,1],[1,3]]: (3 + √13)/(2√13)
        let s = diagonalize_mode(&ModeProblem::new(3.0, 0.0, 1.0).unwrap());
        assert!((s.nu_sq - 0.916_025_147_168_922).abs() < 1e-12);
        assert!((s.mu_sq - 0.083_974_852_831_078).abs() < 1e-12);
    }

    #[test]
    fn far_detuned_limits() {
        let s = diagonalize_mode(&ModeProblem::new(0.0, 1e3, 1.0).unwrap());
        assert!(s.mu_sq > 0.999_999);
        let s = diagonalize_mode(&ModeProblem::new(1e3, 0.0, 1.0).unwrap());
        assert!(s.nu_sq > 0.999_999);
        let s = diagonalize_mode(&ModeProblem::new(0.0, 1e12, 1.0).unwrap());
        assert!(s.nu_sq > 0.0 && s.nu_sq < 1e-20);
    }

    #[test]
    fn oracle_uncoupled_and_symmetric() {
        let o = oracle_diagonalize(&ModeProblem::new(2.0, 1.0, 0.0).unwrap());
        assert_eq!((o.upper, o.lower), (2.0, 1.0));
        assert_eq!((o.mu_sq, o.nu_sq), (0.0, 1.0));
        let a = oracle_diagonalize(&ModeProblem::new(2.0, 1.3, 0.4).unwrap());
        let b = oracle_diagonalize(&ModeProblem::new(1.3, 2.0, 0.4).unwrap());
        assert!((a.mu_sq - b.nu_sq).abs() < 1e-15);
        assert!((a.upper - b.upper).abs() < 1e-15);
    }

    #[test]
    fn dispersion_grid_and_gap() {
        let (med, cp) = resonant(1e-3);
        let curve =
            sample_dispersion(&cp, med.transition_energy, &GridSpec::new(101, 0.1)).unwrap();
        assert_eq!(curve.points.len(), 101);
        let p0 = curve.points[0];
        let gap = (p0.upper.value() - p0.lower.value()) / ELECTRON_VOLT;
        assert!(rel(gap, 2e-3) < 1e-9);
        assert!(curve.warnings.is_empty());
        assert!(curve
            .points
            .windows(2)
            .all(|w| w[0].k_par.value() < w[1].k_par.value()));
        assert!(matches!(
            sample_dispersion(&cp, med.transition_energy, &GridSpec::new(1, 0.1)),
            Err(Error::EmptyGrid(1))
        ));
        let wide = sample_dispersion(&cp, med.transition_energy, &GridSpec::new(3, 0.5)).unwrap();
        assert_eq!(wide.warnings.len(), 1);
    }

    #[test]
    fn lower_branch_monotone_for_nonpositive_detuning() {
        for delta in [0.0, -1e-3, -1e-2] {
            let (med, cp) = detuned(1e-3, delta);
            let curve =
                sample_dispersion(&cp, med.transition_energy, &GridSpec::new(4001, 0.2)).unwrap();
            for w in curve.points.windows(2) {
                assert!(w[1].lower.value() >= w[0].lower.value(), "Δ = {delta}");
            }
        }
    }

    #[test]
    fn header_roundtrip() {
        let (med, cp) = detuned(1e-3, 4e-3);
        let curve = sample_dispersion(&cp, med.transition_energy, &GridSpec::new(11, 0.1)).unwrap();
        let csv = curve.to_csv();
        let meta = CurveMeta::parse_header(&csv).unwrap();
        assert_eq!(meta.to_header(), curve.meta.to_header());
        assert!(csv.starts_with(&meta.to_header()));
        assert_eq!(csv.lines().filter(|l| !l.starts_with('#')).count(), 12);
    }

    #[test]
    fn resonant_well() {
        let g = 1e-4;
        let (med, cp) = resonant(g);
        let w = well_geometry(&cp, med.transition_energy).unwrap();
        let depth_ev = w.depth.value() / ELECTRON_VOLT;
        assert!(rel(depth_ev, g) < 0.01, "depth {depth_ev}");
        let ratio = w.well_energy.value() / ELECTRON_VOLT / g;
        assert!((0.2..=5.0).contains(&ratio), "{ratio}");
        // analytic root of ½(1 − u/√(1+u²)) = u/(1+u²)^{3/2} with u = x/2g
        assert!(rel(ratio, 0.3946) < 5e-3, "{ratio}");
        assert_eq!(w.diffraction_ok, Some(true));
        assert!(
            rel(
                w.angular_halfwidth,
                w.inflection_k.value() / cp.k_perp.value()
            ) < 1e-15
        );
    }

    #[test]
    fn depth_limit_at_hundred_g() {
        // E₂(x) − E₂(0) = g − g²/x + O(g⁴/x³): within 1% of g at x = 100 g
        let g: f64 = 1.0;
        let x = 100.0 * g;
        let depth = 0.5 * (x - x.hypot(2.0 * g)) + g;
        assert!(rel(depth, g) < 0.011);
    }

    #[test]
    fn vanishing_coupling_has_no_well() {
        let (med, cp) = resonant(1e-15);
        assert!(matches!(
            well_geometry(&cp, med.transition_energy),
            Err(Error::NoWell(_))
        ));
    }

    proptest! {
        #[test]
        fn branch_invariants(e_at in 0.5f64..3.0, e_ph in 0.5f64..3.0, g in 1e-6f64..0.3) {
            let p = ModeProblem::new(e_at, e_ph, g).unwrap();
            let s = diagonalize_mode(&p);
            prop_assert!((s.mu_sq + s.nu_sq - 1.0).abs() <= 1e-12);
            prop_assert!(s.upper >= s.lower);
            prop_assert!(s.gap() >= 2.0 * g * (1.0 - 1e-12));
            prop_assert!(rel(s.upper + s.lower, e_at + e_ph) <= 1e-10);
            prop_assert!(rel(s.upper * s.lower, e_at * e_ph - g * g) <= 1e-10);
            prop_assert!(rel(s.gap(), (p.mismatch().powi(2) + 4.0 * g * g).sqrt()) <= 1e-10);
        }

        #[test]
        fn oracle_agrees(e_at in 0.5f64..3.0, e_ph in 0.5f64..3.0, g in 1e-6f64..0.3) {
            let p = ModeProblem::new(e_at, e_ph, g).unwrap();
            let s = diagonalize_mode(&p);
            let o = oracle_diagonalize(&p);
            prop_assert!(rel(s.upper, o.upper) <= 1e-10);
            prop_assert!(rel(s.lower, o.lower) <= 1e-10);
            prop_assert!((s.mu_sq - o.mu_sq).abs() <= 1e-10);
            prop_assert!((s.nu_sq - o.nu_sq).abs() <= 1e-10);
        }
    }
}
