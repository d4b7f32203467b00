//! One evaluator per subcommand. Each turns a config into a [`Report`].

use clap::ValueEnum;

use super::config::RunConfig;
use super::table::{column, json_number, value_in, Cell, Table};
use super::CliError;
use crate::coupling::{is_strong_coupling_with, CouplingParams, Regime};
use crate::dispersion::{sample_dispersion, well_geometry_with, GridSpec, DISPERSION_COLUMNS};
use crate::quantities::{hbar, Dimension, Quantity, UnitSystem, ELECTRON_VOLT};
use crate::thermo::{
    condensation_report, effective_masses, effective_temperature, kt_temperature, BranchMass,
};
use crate::trap::{design_trap, TrapRequest, ASSUMPTION_NOTE};
use crate::Error;

pub const EXIT_OK: i32 = 0;
pub const EXIT_USAGE: i32 = 1;
pub const EXIT_REGIME: i32 = 2;

pub const LAMBDA_NOTE: &str = "lambda_T = h/sqrt(2 pi m_eff k_B T); the shorter form \
hbar/sqrt(2 m_eff k_B T) is smaller by 2 sqrt(pi) and is not used";
pub const MU_NOTE: &str =
    "mu = k_B T ln(1 - exp(-T_d/T)), ideal 2D Bose gas; T_d = 2 pi hbar^2 n2/(m_eff k_B)";
pub const N2_ESTIMATE_NOTE: &str = "n2 estimated as n3 * lambda_T (one thermal wavelength of gas)";
pub const PHOTON_NOTE: &str = "E_ph_paraxial = hbar c (k_perp + k_par^2/2k_perp); \
E_ph_freespace = hbar c sqrt(k_perp^2 + k_par^2)";
pub const MASS_NOTE: &str = "m = 2 m_ph/(1 -+ Delta/sqrt(Delta^2 + 4g^2)), upper branch takes -; \
saturated when the denominator falls below 1e-12";

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum Target {
    CheckCoupling,
    Dispersion,
    Hopfield,
    Masses,
    Thresholds,
    Trap,
}

impl Target {
    pub fn name(self) -> &'static str {
        match self {
            Target::CheckCoupling => "check-coupling",
            Target::Dispersion => "dispersion",
            Target::Hopfield => "hopfield",
            Target::Masses => "masses",
            Target::Thresholds => "thresholds",
            Target::Trap => "trap",
        }
    }
}

/// Command-line inputs that are not part of the config file.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Inputs {
    pub samples: usize,
    pub k_max: f64,
    pub target_tc: Option<Quantity>,
    pub n_particles: Option<f64>,
    pub units: UnitSystem,
}

#[derive(Debug, Clone, PartialEq)]
pub struct Report {
    pub table: Table,
    pub code: i32,
    /// Bare JSON document, used by `trap` in place of the table.
    pub record: Option<serde_json::Value>,
}

impl Report {
    fn ok(table: Table) -> Self {
        Report {
            table,
            code: EXIT_OK,
            record: None,
        }
    }
}

fn ev(q: Quantity) -> f64 {
    q.cgs_value() / ELECTRON_VOLT
}

fn mev(q: Quantity) -> f64 {
    1e3 * ev(q)
}

/// Atomic energy as seen by the mode problem: ħck⊥ + Δ.
fn atomic_energy(cp: &CouplingParams) -> Result<Quantity, CliError> {
    Ok(cp
        .cavity_energy()
        .try_add(cp.detuning)
        .map_err(Error::from)?)
}

pub fn evaluate(target: Target, cfg: &RunConfig, inp: &Inputs) -> Result<Report, CliError> {
    match target {
        Target::CheckCoupling => check_coupling(cfg, inp),
        Target::Dispersion => dispersion(cfg, inp),
        Target::Hopfield => hopfield(cfg, inp),
        Target::Masses => masses(cfg, inp),
        Target::Thresholds => thresholds(cfg, inp),
        Target::Trap => trap(cfg, inp),
    }
}

fn check_coupling(cfg: &RunConfig, inp: &Inputs) -> Result<Report, CliError> {
    let medium = cfg.medium()?;
    let check = is_strong_coupling_with(&medium, cfg.strong_threshold());
    let f = |base| column(base, Dimension::FREQUENCY, inp.units);
    let mut t = Table::new([
        f("omega_c"),
        f("decoherence_rate"),
        "ratio".into(),
        "threshold".into(),
        "regime".into(),
    ]);
    t.comments
        .push("omega_c = sqrt(2 pi n d^2 E0/hbar^2); decoherence_rate = 1/(2 tau_coh)".into());
    t.push(vec![
        value_in(check.cooperative_frequency, inp.units).into(),
        value_in(check.decoherence_rate, inp.units).into(),
        check.ratio.into(),
        check.threshold.into(),
        Cell::Text(check.regime.to_string()),
    ]);
    let code = match check.regime {
        Regime::Strong => EXIT_OK,
        Regime::Weak => EXIT_REGIME,
    };
    Ok(Report {
        code,
        ..Report::ok(t)
    })
}

fn grid(cfg: &RunConfig, inp: &Inputs) -> Result<GridSpec, CliError> {
    if inp.samples < 2 {
        return Err(CliError::Usage(format!(
            "--samples must be at least 2, got {}",
            inp.samples
        )));
    }
    if !(inp.k_max.is_finite() && inp.k_max > 0.0) {
        return Err(CliError::Usage(format!(
            "--kmax must be positive, got {}",
            inp.k_max
        )));
    }
    let mut g = GridSpec::new(inp.samples, inp.k_max);
    g.paraxial_bound = cfg.paraxial_bound();
    Ok(g)
}

fn dispersion(cfg: &RunConfig, inp: &Inputs) -> Result<Report, CliError> {
    let cp = cfg.coupling()?;
    let e_at = atomic_energy(&cp)?;
    let curve = sample_dispersion(&cp, e_at, &grid(cfg, inp)?)?;
    let mut t = Table::new(DISPERSION_COLUMNS);
    t.comments.extend(
        curve
            .meta
            .to_header()
            .lines()
            .map(|l| l.trim_start_matches("# ").to_string()),
    );
    t.comments.push(PHOTON_NOTE.into());
    t.comments
        .extend(curve.warnings.iter().map(|w| format!("warning: {w}")));
    let code = match well_geometry_with(&cp, e_at, cfg.paraxial_bound()) {
        Ok(w) => {
            let len = |q: Quantity| value_in(q, inp.units);
            let unit = |b| column(b, Dimension::WAVENUMBER, inp.units);
            t.comments.push(format!(
                "well: {} = {}, angular_halfwidth_rad = {}, depth_meV = {}, well_energy_meV = {}",
                unit("inflection_k"),
                fmt(len(w.inflection_k)),
                fmt(w.angular_halfwidth),
                fmt(mev(w.depth)),
                fmt(mev(w.well_energy)),
            ));
            if let (Some(phi), Some(ok)) = (w.diffraction_limit, w.diffraction_ok) {
                t.comments.push(format!(
                    "well: diffraction_limit_rad = {}, beam fits well = {ok}",
                    fmt(phi)
                ));
            }
            EXIT_OK
        }
        Err(Error::NoWell(why)) => {
            t.comments.push(format!("warning: no well: {why}"));
            EXIT_REGIME
        }
        Err(e) => return Err(e.into()),
    };
    for row in curve.rows() {
        t.push(row.iter().map(|&x| Cell::Num(x)).collect());
    }
    Ok(Report {
        code,
        ..Report::ok(t)
    })
}

fn fmt(x: f64) -> String {
    crate::dispersion::fmt_num(x)
}

fn hopfield(cfg: &RunConfig, inp: &Inputs) -> Result<Report, CliError> {
    let cp = cfg.coupling()?;
    let e_at = atomic_energy(&cp)?;
    let curve = sample_dispersion(&cp, e_at, &grid(cfg, inp)?)?;
    let mut t = Table::new(["k_par_over_k_perp", "delta_meV", "mu_sq", "nu_sq"]);
    t.comments
        .push("mu_sq: photon weight of the upper branch (atomic weight of the lower)".into());
    t.comments
        .push("delta = E_at - E_ph_paraxial(k_par)".into());
    t.comments
        .extend(curve.warnings.iter().map(|w| format!("warning: {w}")));
    let kp = cp.k_perp.cgs_value();
    for p in &curve.points {
        let delta = e_at.try_sub(p.photon_paraxial).map_err(Error::from)?;
        t.push(vec![
            (p.k_par.cgs_value() / kp).into(),
            mev(delta).into(),
            p.mu_sq.into(),
            p.nu_sq.into(),
        ]);
    }
    Ok(Report::ok(t))
}

fn masses(cfg: &RunConfig, inp: &Inputs) -> Result<Report, CliError> {
    let cp = cfg.coupling()?;
    let pm = effective_masses(&cp);
    let mass_col = |b| column(b, Dimension::MASS, inp.units);
    let mut t = Table::new([
        "Delta_meV".to_string(),
        "g_meV".into(),
        mass_col("m_ph"),
        mass_col("m_upper"),
        mass_col("m_lower"),
        "upper_saturated".into(),
        "lower_saturated".into(),
        "T_KT_upper_K".into(),
        "T_KT_lower_K".into(),
        "T_eff_K".into(),
    ]);
    t.comments.push(MASS_NOTE.into());
    let n_s = cfg.get("n_s").or_else(|| cfg.get("n2"));
    match n_s {
        Some(_) => t
            .comments
            .push("T_KT = pi hbar^2 n_s/(2 m k_B) with each branch mass".into()),
        None => t
            .comments
            .push("T_KT columns empty: neither n_s nor n2 is set".into()),
    }
    let t_kt = |m: &BranchMass| -> Result<Cell, CliError> {
        match (m.value(), n_s) {
            (Some(m), Some(n)) => Ok(Cell::Num(kt_temperature(n, m)?.cgs_value())),
            _ => Ok(Cell::Empty),
        }
    };
    let mass = |m: &BranchMass| Cell::from(m.value().map(|q| value_in(q, inp.units)));
    t.push(vec![
        mev(cp.detuning).into(),
        mev(cp.g).into(),
        value_in(pm.m_ph, inp.units).into(),
        mass(&pm.upper),
        mass(&pm.lower),
        pm.upper.is_saturated().into(),
        pm.lower.is_saturated().into(),
        t_kt(&pm.upper)?,
        t_kt(&pm.lower)?,
        effective_temperature(cp.g)?.cgs_value().into(),
    ]);
    Ok(Report::ok(t))
}

pub fn threshold_columns(units: UnitSystem) -> Vec<String> {
    use Dimension as D;
    vec![
        "T_K".into(),
        column("m_eff", D::MASS, units),
        column("n3", D::VOLUME_DENSITY, units),
        column("n2", D::AREA_DENSITY, units),
        column("lambda_T", D::LENGTH, units),
        column("r_int", D::LENGTH, units),
        "T_d_K".into(),
        "T_KT_K".into(),
        "mu_meV".into(),
        column("omega_eff", D::FREQUENCY, units),
        "T_c_K".into(),
        "N2".into(),
        "N0_frac".into(),
        "degenerate".into(),
        "kt_superfluid".into(),
        "overlap".into(),
    ]
}

fn thresholds(cfg: &RunConfig, inp: &Inputs) -> Result<Report, CliError> {
    let (gas, derived_mass) = cfg.gas()?;
    let trap = cfg.trap()?;
    let r = condensation_report(&gas, trap.as_ref())?;
    let mut t = Table::new(threshold_columns(inp.units));
    t.comments.push(LAMBDA_NOTE.into());
    t.comments.push(MU_NOTE.into());
    if r.n2_estimated {
        t.comments.push(N2_ESTIMATE_NOTE.into());
    }
    t.comments.push(if derived_mass {
        "m_eff: lower-branch mass from the cavity config".into()
    } else {
        "m_eff: taken from config".into()
    });
    if r.mu.negligible {
        t.comments
            .push("mu is below 1e-13 k_B T in magnitude (negligible)".into());
    }
    match &trap {
        None => t
            .comments
            .push("no trap: T_c, N2 and N0_frac are empty".into()),
        Some(spec) => {
            t.comments.push(
                "T_c = (hbar Omega_eff/k_B) sqrt(N/1.645), N = N2(T) = 2 pi n2 k_B T/(m_eff Omega_eff^2)"
                    .into(),
            );
            if let Some(mismatch) = spec.consistency(r.m_eff)? {
                t.comments.push(format!(
                    "trap: U0 vs m_eff Omega_eff^2 r0^2/2 relative mismatch = {}",
                    fmt(mismatch)
                ));
            }
        }
    }
    let q = |x: Quantity| Cell::Num(value_in(x, inp.units));
    t.push(vec![
        r.temperature.cgs_value().into(),
        q(r.m_eff),
        r.n3.map_or(Cell::Empty, q),
        q(r.n2),
        q(r.lambda_t),
        q(r.r_int),
        r.t_d.cgs_value().into(),
        r.t_kt.cgs_value().into(),
        mev(r.mu.mu).into(),
        r.omega_eff.map_or(Cell::Empty, q),
        r.t_c.map(|x| x.cgs_value()).into(),
        r.n_trapped.into(),
        r.condensate_fraction.into(),
        r.degenerate.into(),
        r.kt_superfluid.into(),
        r.overlap.into(),
    ]);
    Ok(Report::ok(t))
}

fn trap(cfg: &RunConfig, inp: &Inputs) -> Result<Report, CliError> {
    let target_tc = inp
        .target_tc
        .ok_or_else(|| CliError::Usage("trap needs --target-tc".into()))?;
    let n_particles = inp
        .n_particles
        .ok_or_else(|| CliError::Usage("trap needs --n-particles".into()))?;
    let (m_eff, _) = cfg.effective_mass()?;
    let e0 = cfg.get("E0");
    let e_char = match cfg.get("E_char").or(e0) {
        Some(e) => e,
        None => return Err(super::config::ConfigError::Missing("E0").into()),
    };
    let omega_at = match (cfg.get("omega_at"), e0) {
        (Some(w), _) => w,
        (None, Some(e)) => e / hbar(),
        (None, None) => return Err(super::config::ConfigError::Missing("omega_at").into()),
    };
    let design = design_trap(&TrapRequest {
        target_tc,
        n_particles,
        m_eff,
        e_char,
        omega_at,
        n0: cfg.get("n0").map_or(1.0, |q| q.value()),
        beam_diameter: cfg.get("d_beam"),
    })?;
    let record = match inp.units {
        UnitSystem::Cgs => serde_json::to_value(design.record()),
        UnitSystem::Si => serde_json::to_value(design.record_si()),
    }
    .expect("trap record serializes");
    let record = match record {
        serde_json::Value::Object(map) => serde_json::Value::Object(
            map.into_iter()
                .map(|(k, v)| match v.as_f64() {
                    Some(x) => (k, json_number(x)),
                    None => (k, v),
                })
                .collect(),
        ),
        other => other,
    };
    let obj = record.as_object().expect("trap record is an object");
    let mut t = Table::new(obj.keys().cloned());
    t.comments.push(ASSUMPTION_NOTE.into());
    if let Some(fits) = design.beam_fits {
        t.comments.push(format!("beam fits inside r_max: {fits}"));
    }
    t.push(
        obj.values()
            .map(|v| match v {
                serde_json::Value::Number(n) => Cell::Num(n.as_f64().unwrap_or(f64::NAN)),
                serde_json::Value::String(s) => Cell::Text(s.clone()),
                serde_json::Value::Bool(b) => Cell::Bool(*b),
                _ => Cell::Empty,
            })
            .collect(),
    );
    Ok(Report {
        table: t,
        code: EXIT_OK,
        record: Some(record),
    })
}
