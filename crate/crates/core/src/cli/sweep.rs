//! One-parameter sweeps over a config key.

use rayon::prelude::*;

use super::commands::{evaluate, Inputs, Report, Target};
use super::config::{key_spec, Entry, RunConfig};
use super::table::{Cell, Table};
use super::CliError;

#[derive(Debug, Clone, Copy, PartialEq, Eq, clap::ValueEnum)]
pub enum Scale {
    Linear,
    Log,
}

#[derive(Debug, Clone, PartialEq)]
pub struct SweepSpec {
    pub key: &'static str,
    pub from: Entry,
    pub to: f64,
    pub steps: usize,
    pub scale: Scale,
}

impl SweepSpec {
    /// `from`/`to` are either bare magnitudes in the unit the config already
    /// uses for `key`, or magnitudes with their own unit.
    pub fn parse(
        cfg: &RunConfig,
        key: &str,
        from: &str,
        to: &str,
        steps: usize,
        scale: Scale,
    ) -> Result<SweepSpec, CliError> {
        let spec = key_spec(key).ok_or_else(|| {
            CliError::Usage(format!("cannot sweep `{key}`: not a numeric config key"))
        })?;
        let endpoint = |text: &str| -> Result<Entry, CliError> {
            if let Ok(x) = text.trim().parse::<f64>() {
                return match cfg.entry(spec.name) {
                    Some(base) => Ok(base.with_magnitude(x)),
                    None if spec.bare => Ok(Entry::parse(spec, text)?),
                    None => Err(CliError::Usage(format!(
                        "`{key}` is not in the config; give the sweep endpoints a unit"
                    ))),
                };
            }
            Ok(Entry::parse(spec, text)?)
        };
        let from = endpoint(from)?;
        let to_entry = endpoint(to)?;
        let to = match &from.unit {
            Some(u) => to_entry.quantity.in_unit(u).map_err(crate::Error::from)?,
            None => to_entry.magnitude,
        };
        let a = from.magnitude;
        if steps < 2 {
            return Err(CliError::Usage(format!(
                "--steps must be at least 2, got {steps}"
            )));
        }
        if !(a.is_finite() && to.is_finite()) || a == to {
            return Err(CliError::Usage(format!(
                "sweep endpoints must be finite and distinct, got {a} and {to}"
            )));
        }
        if scale == Scale::Log && (a == 0.0 || to == 0.0 || a.signum() != to.signum()) {
            return Err(CliError::Usage(
                "log sweep needs nonzero endpoints of the same sign".into(),
            ));
        }
        Ok(SweepSpec {
            key: spec.name,
            from,
            to,
            steps,
            scale,
        })
    }

    /// Sweep magnitudes, endpoints exact.
    pub fn values(&self) -> Vec<f64> {
        let (a, b) = (self.from.magnitude, self.to);
        let last = self.steps - 1;
        (0..self.steps)
            .map(|i| {
                if i == 0 {
                    return a;
                }
                if i == last {
                    return b;
                }
                let t = i as f64 / last as f64;
                match self.scale {
                    Scale::Linear => a + (b - a) * t,
                    Scale::Log => a.signum() * (a.abs().ln() * (1.0 - t) + b.abs().ln() * t).exp(),
                }
            })
            .collect()
    }

    pub fn column(&self) -> String {
        match &self.from.unit {
            Some(u) => format!("sweep_{}_{}", self.key, u.name),
            None => format!("sweep_{}", self.key),
        }
    }

    fn config_at(&self, base: &RunConfig, x: f64) -> RunConfig {
        let mut cfg = base.clone();
        match self.key {
            "Delta" => {
                cfg.remove("L_cav");
            }
            "L_cav" => {
                cfg.remove("Delta");
            }
            _ => {}
        }
        cfg.set(self.key, self.from.with_magnitude(x));
        cfg
    }
}

/// Evaluates `target` at every sweep point, in parallel, and stacks the rows
/// in sweep order. The exit code is the largest over all points.
pub fn run_sweep(
    base: &RunConfig,
    spec: &SweepSpec,
    target: Target,
    inp: &Inputs,
) -> Result<Report, CliError> {
    let values = spec.values();
    let reports: Vec<Report> = values
        .par_iter()
        .map(|&x| {
            evaluate(target, &spec.config_at(base, x), inp)
                .map_err(|e| CliError::Usage(format!("at {} = {x}: {e}", spec.key)))
        })
        .collect::<Result<_, _>>()?;
    let first = &reports[0].table;
    let mut table = Table::new(std::iter::once(spec.column()).chain(first.columns.iter().cloned()));
    table.comments = first
        .comments
        .iter()
        .filter(|c| reports.iter().all(|r| r.table.comments.contains(c)))
        .cloned()
        .collect();
    for (x, r) in values.iter().zip(&reports) {
        for row in &r.table.rows {
            let mut full = Vec::with_capacity(row.len() + 1);
            full.push(Cell::Num(*x));
            full.extend(row.iter().cloned());
            table.push(full);
        }
    }
    Ok(Report {
        table,
        code: reports.iter().map(|r| r.code).max().unwrap_or(0),
        record: None,
    })
}
