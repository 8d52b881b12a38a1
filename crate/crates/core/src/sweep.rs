//! Metric sweeps over rotation length and rotation-length optima.
//!
//! Every cell is produced by the same single-point call a library user would
//! make at that τ, so a sweep row can be reproduced exactly.

use std::fmt;
use std::str::FromStr;

use serde::Serialize;
use thiserror::Error;

use crate::error::{Error, Result};
use crate::growth::GrowthScenario;
use crate::io::{format_float, Cell, ScenarioDocument};
use crate::irr::growth_cycle_irr;
use crate::leverage::{leveraged_discount_rate, omega_argmax, rroc_argmax, rroe, rroe_argmax};
use crate::optimize::{maximize, TauGrid};
use crate::valuation::{npv, npv_argmax};

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum Metric {
    MeanRate,
    Irr,
    Rroc,
    Npv,
    Rroe,
    Omega,
}

impl FromStr for Metric {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        Ok(match s.trim().to_ascii_lowercase().as_str() {
            "mean" | "mean_rate" => Metric::MeanRate,
            "irr" => Metric::Irr,
            "rroc" => Metric::Rroc,
            "npv" => Metric::Npv,
            "rroe" => Metric::Rroe,
            "omega" => Metric::Omega,
            other => {
                return Err(Error::InvalidArgument(format!(
                    "unknown metric `{other}` (expected mean, irr, rroc, npv, rroe, omega)"
                )))
            }
        })
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct SweepConfig {
    pub grid: TauGrid,
    pub metrics: Vec<Metric>,
    pub discount_rates: Vec<f64>,
    pub market_rates: Vec<f64>,
    pub leverages: Vec<f64>,
}

impl SweepConfig {
    fn has(&self, m: Metric) -> bool {
        self.metrics.contains(&m)
    }

    fn leverage_pairs(&self) -> impl Iterator<Item = (f64, f64)> + '_ {
        self.leverages
            .iter()
            .flat_map(move |&l| self.market_rates.iter().map(move |&u| (l, u)))
    }

    pub fn columns(&self) -> Vec<String> {
        let mut cols = vec!["tau".to_string()];
        if self.has(Metric::MeanRate) {
            cols.push("mean_rate".into());
        }
        if self.has(Metric::Irr) {
            cols.push("irr".into());
        }
        if self.has(Metric::Rroc) {
            cols.push("rroc".into());
        }
        if self.has(Metric::Npv) {
            cols.extend(self.discount_rates.iter().map(|d| format!("npv@d={}", format_float(*d))));
        }
        if self.has(Metric::Rroe) {
            cols.extend(self.leverage_pairs().map(|(l, u)| format!("rroe@L={};u={}", format_float(l), format_float(u))));
        }
        if self.has(Metric::Omega) {
            cols.extend(self.leverage_pairs().map(|(l, u)| format!("omega@L={};u={}", format_float(l), format_float(u))));
        }
        cols
    }

    fn validate(&self) -> Result<()> {
        if self.has(Metric::Npv) && self.discount_rates.is_empty() {
            return Err(Error::InvalidArgument("npv needs at least one discount rate".into()));
        }
        if (self.has(Metric::Rroe) || self.has(Metric::Omega))
            && (self.leverages.is_empty() || self.market_rates.is_empty())
        {
            return Err(Error::InvalidArgument(
                "rroe/omega need at least one leverage and one market rate".into(),
            ));
        }
        Ok(())
    }
}

/// What a sweep was computed from.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Provenance {
    pub scenario: ScenarioDocument,
    pub config: SweepConfig,
    pub crate_version: &'static str,
}

#[derive(Debug, Clone, PartialEq)]
pub struct SweepResult {
    pub columns: Vec<String>,
    /// One row per τ, ascending.
    pub rows: Vec<Vec<f64>>,
    pub provenance: Provenance,
}

impl SweepResult {
    pub fn to_csv(&self) -> Result<String> {
        let rows: Vec<Vec<Cell>> = self
            .rows
            .iter()
            .map(|r| r.iter().map(|&v| Cell::Num(v)).collect())
            .collect();
        crate::io::write_table(&self.columns, &rows)
    }

    pub fn column(&self, name: &str) -> Option<Vec<f64>> {
        let i = self.columns.iter().position(|c| c == name)?;
        Some(self.rows.iter().map(|r| r[i]).collect())
    }
}

#[derive(Debug, Clone, PartialEq, Error)]
#[error("at tau = {tau}: {source}")]
pub struct SweepError {
    pub tau: f64,
    #[source]
    pub source: Error,
}

/// One sweep row at rotation length `tau`.
pub fn sweep_row(scenario: &GrowthScenario, tau: f64, config: &SweepConfig) -> Result<Vec<f64>> {
    let s = scenario.with_rotation(tau)?;
    let mut row = vec![tau];
    if config.has(Metric::MeanRate) {
        row.push(s.mean_rate()?);
    }
    if config.has(Metric::Irr) {
        row.push(growth_cycle_irr(&s)?);
    }
    let rroc = if config.has(Metric::Rroc) || config.has(Metric::Rroe) {
        Some(s.rroc()?)
    } else {
        None
    };
    if config.has(Metric::Rroc) {
        row.extend(rroc);
    }
    if config.has(Metric::Npv) {
        for &d in &config.discount_rates {
            row.push(npv(&s, d)?);
        }
    }
    if let (true, Some(rroc)) = (config.has(Metric::Rroe), rroc) {
        for (l, u) in config.leverage_pairs() {
            row.push(rroe(rroc, l, u)?);
        }
    }
    if config.has(Metric::Omega) {
        for (l, u) in config.leverage_pairs() {
            row.push(leveraged_discount_rate(&s, l, u)?);
        }
    }
    Ok(row)
}

pub fn sweep(scenario: &GrowthScenario, config: &SweepConfig) -> std::result::Result<SweepResult, SweepError> {
    config.validate().map_err(|source| SweepError {
        tau: config.grid.min,
        source,
    })?;
    let taus = config.grid.points();
    let compute = |&tau: &f64| sweep_row(scenario, tau, config).map_err(|source| SweepError { tau, source });

    #[cfg(feature = "parallel")]
    let rows = {
        use rayon::prelude::*;
        taus.par_iter().map(compute).collect::<std::result::Result<Vec<_>, _>>()?
    };
    #[cfg(not(feature = "parallel"))]
    let rows = taus.iter().map(compute).collect::<std::result::Result<Vec<_>, _>>()?;

    Ok(SweepResult {
        columns: config.columns(),
        rows,
        provenance: Provenance {
            scenario: ScenarioDocument::from_scenario(scenario),
            config: config.clone(),
            crate_version: env!("CARGO_PKG_VERSION"),
        },
    })
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
#[serde(tag = "objective", rename_all = "snake_case")]
pub enum Objective {
    Rroc,
    Irr,
    Npv { discount_rate: f64 },
    Rroe { leverage: f64, market_rate: f64 },
    Omega { leverage: f64, market_rate: f64 },
}

impl fmt::Display for Objective {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Objective::Rroc => write!(f, "rroc"),
            Objective::Irr => write!(f, "irr"),
            Objective::Npv { discount_rate } => write!(f, "npv@d={}", format_float(*discount_rate)),
            Objective::Rroe {
                leverage,
                market_rate,
            } => write!(f, "rroe@L={};u={}", format_float(*leverage), format_float(*market_rate)),
            Objective::Omega {
                leverage,
                market_rate,
            } => write!(f, "omega@L={};u={}", format_float(*leverage), format_float(*market_rate)),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct OptimumReport {
    pub objective: Objective,
    pub tau: f64,
    pub value: f64,
    /// Competing criteria at the optimal τ.
    pub rroc: f64,
    pub irr: Option<f64>,
}

/// Rotation length maximizing `objective` over the grid, refined by
/// golden-section search; ties go to the smaller τ.
pub fn optimize(scenario: &GrowthScenario, objective: Objective, grid: &TauGrid) -> Result<OptimumReport> {
    let points = grid.points();
    let opt = match objective {
        Objective::Rroc => rroc_argmax(scenario, &points)?,
        Objective::Irr => maximize(&points, |tau| growth_cycle_irr(&scenario.with_rotation(tau)?))?,
        Objective::Npv { discount_rate } => npv_argmax(scenario, discount_rate, &points)?,
        Objective::Rroe {
            leverage,
            market_rate,
        } => rroe_argmax(scenario, leverage, market_rate, &points)?,
        Objective::Omega {
            leverage,
            market_rate,
        } => omega_argmax(scenario, leverage, market_rate, &points)?,
    };
    let at = scenario.with_rotation(opt.tau)?;
    Ok(OptimumReport {
        objective,
        tau: opt.tau,
        value: opt.value,
        rroc: at.rroc()?,
        irr: growth_cycle_irr(&at).ok(),
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::path::ReturnPath;

    fn ansatz() -> GrowthScenario {
        GrowthScenario::new(1.0, 100.0, ReturnPath::ansatz(0.05, 0.5, 100.0).unwrap()).unwrap()
    }

    #[test]
    fn metric_names() {
        assert_eq!("RROC".parse::<Metric>().unwrap(), Metric::Rroc);
        assert!("foo".parse::<Metric>().is_err());
    }

    #[test]
    fn rows_match_single_point_calls() {
        let s = ansatz();
        let cfg = SweepConfig {
            grid: TauGrid::up_to(100.0, 20).unwrap(),
            metrics: vec![Metric::Irr, Metric::Rroc, Metric::Npv, Metric::Rroe],
            discount_rates: vec![0.025, 0.05],
            market_rates: vec![0.0, 0.05],
            leverages: vec![1.0],
        };
        let res = sweep(&s, &cfg).unwrap();
        assert_eq!(res.columns.len(), 1 + 2 + 2 + 2);
        assert_eq!(res.rows.len(), 20);
        assert!(res.rows.windows(2).all(|w| w[1][0] > w[0][0]));
        let row = &res.rows[7];
        let at = s.with_rotation(row[0]).unwrap();
        assert_eq!(row[1], growth_cycle_irr(&at).unwrap());
        assert_eq!(row[2], at.rroc().unwrap());
        assert_eq!(row[3], npv(&at, 0.025).unwrap());
        assert_eq!(row[6], rroe(at.rroc().unwrap(), 1.0, 0.05).unwrap());
        // final row: IRR is the full-cycle mean
        assert!((res.rows[19][1] - 0.05).abs() < 1e-6);
    }

    #[test]
    fn delegate_error_reports_tau() {
        let s = ansatz();
        let cfg = SweepConfig {
            grid: TauGrid::up_to(100.0, 10).unwrap(),
            metrics: vec![Metric::Omega],
            discount_rates: vec![],
            market_rates: vec![0.2],
            leverages: vec![3.0],
        };
        let err = sweep(&s, &cfg).unwrap_err();
        assert!(matches!(err.source, Error::WipedOutEquity { .. }));
        assert!(err.tau > 0.0);
    }

    #[test]
    fn npv_without_rates_rejected() {
        let cfg = SweepConfig {
            grid: TauGrid::up_to(100.0, 10).unwrap(),
            metrics: vec![Metric::Npv],
            discount_rates: vec![],
            market_rates: vec![],
            leverages: vec![],
        };
        assert!(sweep(&ansatz(), &cfg).is_err());
    }

    #[test]
    fn optimum_ordering() {
        let s = ansatz();
        let grid = TauGrid::up_to(100.0, 200).unwrap();
        let a = optimize(&s, Objective::Rroc, &grid).unwrap();
        let b = optimize(&s, Objective::Irr, &grid).unwrap();
        assert!(a.tau < b.tau && b.tau < 100.0);
        assert!(a.value > b.value);
        assert_eq!(a.rroc, a.value);
    }
}
