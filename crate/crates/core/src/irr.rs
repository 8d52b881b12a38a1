//! Internal rates of return under continuous compounding.
//!
//! A growth cycle without intermediate events has the closed-form IRR
//! `o = ⟨r⟩`. General cash-flow schedules are polynomialized with
//! `x = e^{-oΔ}` on a common time step Δ and every root is reported.

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::growth::GrowthScenario;
use crate::roots::{eval_real, DurandKerner};

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct CashFlow {
    pub time: f64,
    pub amount: f64,
}

/// Dated cash events, times nondecreasing, with both signs present.
#[derive(Debug, Clone, PartialEq)]
pub struct CashFlowSchedule {
    events: Vec<CashFlow>,
}

impl CashFlowSchedule {
    pub fn new(events: Vec<CashFlow>) -> Result<Self> {
        if events.len() < 2 {
            return Err(Error::InvalidArgument(
                "a cash-flow schedule needs at least two events".into(),
            ));
        }
        if events
            .iter()
            .any(|e| !e.time.is_finite() || !e.amount.is_finite() || e.time < 0.0)
        {
            return Err(Error::InvalidArgument(
                "cash-flow times must be finite and >= 0, amounts finite".into(),
            ));
        }
        if events.windows(2).any(|w| w[1].time < w[0].time) {
            return Err(Error::InvalidArgument(
                "cash-flow times must be nondecreasing".into(),
            ));
        }
        let pos = events.iter().any(|e| e.amount > 0.0);
        let neg = events.iter().any(|e| e.amount < 0.0);
        if !(pos && neg) {
            return Err(Error::NoRoot);
        }
        Ok(CashFlowSchedule { events })
    }

    /// Cash view of a scenario: K(0) paid in, investments paid in,
    /// divestments received, K(τ) received at the end.
    pub fn from_scenario(scenario: &GrowthScenario) -> Result<Self> {
        let mut events = vec![CashFlow {
            time: 0.0,
            amount: -scenario.initial_capital(),
        }];
        events.extend(scenario.investments().events().iter().map(|e| CashFlow {
            time: e.time,
            amount: -e.amount,
        }));
        let tau = scenario.rotation_length();
        events.push(CashFlow {
            time: tau,
            amount: scenario.capital_at(tau)?,
        });
        CashFlowSchedule::new(events)
    }

    pub fn events(&self) -> &[CashFlow] {
        &self.events
    }

    /// Σ C_k e^{-rate t_k}.
    pub fn present_value(&self, rate: f64) -> f64 {
        self.events
            .iter()
            .map(|e| e.amount * (-rate * e.time).exp())
            .sum()
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct IrrResult {
    /// Real root with the smallest |o|, ties toward positive.
    pub principal_root: Option<f64>,
    /// Real rates, ascending, with multiplicity.
    pub all_real_roots: Vec<f64>,
    /// Polynomial roots without a real rate (complex or negative x).
    pub complex_root_count: usize,
    /// |Σ C_k e^{-o t_k}| for each entry of `all_real_roots`.
    pub residuals: Vec<f64>,
    pub base_step: f64,
    pub degree: usize,
    pub polynomial_roots: Vec<Complex64>,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct IrrSettings {
    /// Every event time must sit within this many years of the grid.
    pub grid_tolerance: f64,
    pub max_degree: usize,
    /// Residual bound relative to Σ|C_k|.
    pub residual_tolerance: f64,
    pub solver: DurandKerner,
}

impl Default for IrrSettings {
    fn default() -> Self {
        IrrSettings {
            grid_tolerance: 1e-9,
            max_degree: 1024,
            residual_tolerance: 1e-8,
            solver: DurandKerner::default(),
        }
    }
}

/// IRR of an investment-free growth cycle: the time average of r over [0, τ].
pub fn growth_cycle_irr(scenario: &GrowthScenario) -> Result<f64> {
    if !scenario.is_investment_free() {
        return Err(Error::UnsupportedSchedule);
    }
    scenario.mean_rate()
}

pub fn general_irr(schedule: &CashFlowSchedule) -> Result<IrrResult> {
    general_irr_with(schedule, &IrrSettings::default())
}

pub fn general_irr_with(schedule: &CashFlowSchedule, settings: &IrrSettings) -> Result<IrrResult> {
    let events = schedule.events();
    let t0 = events[0].time;
    let offsets: Vec<f64> = events.iter().map(|e| e.time - t0).collect();
    let step = common_step(&offsets, settings.grid_tolerance).ok_or_else(|| {
        Error::Discretization("all events fall on the same date".into())
    })?;

    let powers: Vec<usize> = offsets.iter().map(|d| (d / step).round() as usize).collect();
    let top = *powers.iter().max().unwrap_or(&0);
    if top > settings.max_degree {
        return Err(Error::Discretization(format!(
            "common step {step:e} gives degree {top} > {}",
            settings.max_degree
        )));
    }
    let mut coeffs = vec![0.0; top + 1];
    for (p, e) in powers.iter().zip(events) {
        coeffs[*p] += e.amount;
    }
    // drop x^k factors and vanishing top terms
    while coeffs.last() == Some(&0.0) {
        coeffs.pop();
    }
    let low = coeffs.iter().position(|&c| c != 0.0).unwrap_or(coeffs.len());
    coeffs.drain(..low);
    if coeffs.len() < 2 {
        return Err(Error::NoRoot);
    }
    let degree = coeffs.len() - 1;

    let polynomial_roots = settings.solver.solve(&coeffs)?;

    let abs_sum: f64 = events.iter().map(|e| e.amount.abs()).sum();
    let mut real = Vec::new();
    for z in &polynomial_roots {
        if z.re <= 0.0 || z.im.abs() > 1e-7 * z.norm() {
            continue;
        }
        let x = polish(&coeffs, z.re);
        let rate = -x.ln() / step;
        let rate = if rate == 0.0 { 0.0 } else { rate };
        let residual = schedule.present_value(rate).abs();
        // scaled by the largest growth factor e^{-o t}
        let scale = events
            .iter()
            .map(|e| (-rate * e.time).exp())
            .fold(1.0, f64::max);
        if residual >= settings.residual_tolerance * abs_sum * scale {
            return Err(Error::NoConvergence {
                iterations: settings.solver.max_iterations,
                residual,
            });
        }
        real.push((rate, residual));
    }
    real.sort_by(|a, b| a.0.total_cmp(&b.0));

    let principal_root = real
        .iter()
        .map(|&(o, _)| o)
        .min_by(|a, b| a.abs().total_cmp(&b.abs()).then(b.total_cmp(a)));

    Ok(IrrResult {
        principal_root,
        complex_root_count: degree - real.len(),
        all_real_roots: real.iter().map(|r| r.0).collect(),
        residuals: real.iter().map(|r| r.1).collect(),
        base_step: step,
        degree,
        polynomial_roots,
    })
}

/// Newton refinement of a real root; keeps the start if Newton wanders.
fn polish(coeffs: &[f64], start: f64) -> f64 {
    let mut x = start;
    let mut best = (eval_real(coeffs, x).0.abs(), x);
    for _ in 0..50 {
        let (p, dp) = eval_real(coeffs, x);
        if dp == 0.0 {
            break;
        }
        let next = x - p / dp;
        if !(next > 0.0) {
            break;
        }
        let r = eval_real(coeffs, next).0.abs();
        if r < best.0 {
            best = (r, next);
        }
        if (next - x).abs() <= 1e-16 * x.abs() {
            break;
        }
        x = next;
    }
    best.1
}

/// Largest Δ with every offset an integer multiple of Δ within `tol`.
fn common_step(offsets: &[f64], tol: f64) -> Option<f64> {
    let mut g = 0.0;
    for &d in offsets.iter().filter(|&&d| d > tol) {
        g = real_gcd(g, d, tol);
    }
    if g <= tol {
        return None;
    }
    let on_grid = offsets
        .iter()
        .all(|&d| (d - (d / g).round() * g).abs() <= tol);
    on_grid.then_some(g)
}

fn real_gcd(a: f64, b: f64, tol: f64) -> f64 {
    let (mut a, mut b) = (a.max(b), a.min(b));
    while b > tol {
        let mut r = a % b;
        if b - r <= tol {
            r = 0.0;
        }
        a = b;
        b = r;
    }
    a
}
