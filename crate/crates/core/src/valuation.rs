//! Net present value of a perpetual sequence of identical rotations, with and
//! without leverage.
//!
//! All forms are written with `exp_m1` so that the `⟨r⟩ ≈ d` and `u ≈ d`
//! regions keep full relative precision.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::growth::GrowthScenario;
use crate::leverage::check_leverage;
use crate::optimize::{maximize, Optimum};

/// Unleveraged NPVs below this (relative to K(0)) make ratios indeterminate.
pub const SINGULAR_TOLERANCE: f64 = 1e-10;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ValuationSpec {
    pub discount_rate: f64,
    #[serde(default)]
    pub market_rate: f64,
    #[serde(default)]
    pub leverage: f64,
}

fn check_discount(d: f64) -> Result<()> {
    if d.is_finite() && d > 0.0 {
        Ok(())
    } else {
        Err(Error::InvalidDiscount(d))
    }
}

fn mean_rate(scenario: &GrowthScenario) -> Result<f64> {
    if !scenario.is_investment_free() {
        return Err(Error::UnsupportedSchedule);
    }
    scenario.mean_rate()
}

/// `K0 (e^{τ(r−d)} − 1) / (1 − e^{−dτ})` for a known time-average rate.
pub fn npv_from_mean(initial_capital: f64, tau: f64, mean_rate: f64, d: f64) -> Result<f64> {
    check_discount(d)?;
    Ok(initial_capital * (tau * (mean_rate - d)).exp_m1() / -(-d * tau).exp_m1())
}

/// Faustmann-style NPV of the rotation repeated forever.
pub fn npv(scenario: &GrowthScenario, d: f64) -> Result<f64> {
    npv_from_mean(
        scenario.initial_capital(),
        scenario.rotation_length(),
        mean_rate(scenario)?,
        d,
    )
}

/// Leveraged NPV with the loan and its compound interest repaid at the end
/// of each rotation.
pub fn leveraged_npv_from_mean(
    initial_capital: f64,
    tau: f64,
    mean_rate: f64,
    d: f64,
    u: f64,
    leverage: f64,
) -> Result<f64> {
    check_discount(d)?;
    check_leverage(leverage)?;
    // [(1+L)e^{τr} − L e^{τu}] e^{−τd} − 1, rearranged
    let numerator = (1.0 + leverage) * (tau * (mean_rate - d)).exp_m1()
        - leverage * (tau * (u - d)).exp_m1();
    Ok(initial_capital * numerator / -(-d * tau).exp_m1())
}

pub fn leveraged_npv(scenario: &GrowthScenario, d: f64, u: f64, leverage: f64) -> Result<f64> {
    leveraged_npv_from_mean(
        scenario.initial_capital(),
        scenario.rotation_length(),
        mean_rate(scenario)?,
        d,
        u,
        leverage,
    )
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct LeverageRatio {
    /// leveraged_npv / npv.
    pub ratio: f64,
    /// `1 + L (e^{τr} − e^{τu}) / (e^{τr} − e^{τd})`.
    pub closed_form: f64,
}

pub fn leverage_ratio_from_mean(tau: f64, mean_rate: f64, d: f64, u: f64, leverage: f64) -> Result<LeverageRatio> {
    check_discount(d)?;
    check_leverage(leverage)?;
    let base = (tau * (mean_rate - d)).exp_m1();
    if base.abs() <= SINGULAR_TOLERANCE {
        return Err(Error::IndeterminateRatio);
    }
    let unlevered = npv_from_mean(1.0, tau, mean_rate, d)?;
    let levered = leveraged_npv_from_mean(1.0, tau, mean_rate, d, u, leverage)?;
    let ratio = levered / unlevered;
    // divide numerator and denominator of the closed form by e^{τd}
    let closed_form = 1.0 + leverage * (base - (tau * (u - d)).exp_m1()) / base;
    if (ratio - closed_form).abs() > 1e-9 * closed_form.abs().max(1.0) {
        return Err(Error::Inconsistent {
            what: "leverage NPV ratio",
            a: ratio,
            b: closed_form,
        });
    }
    Ok(LeverageRatio { ratio, closed_form })
}

/// NPV(L) / NPV(0), checked against the closed-form expansion.
pub fn leverage_npv_ratio(
    scenario: &GrowthScenario,
    d: f64,
    u: f64,
    leverage: f64,
) -> Result<LeverageRatio> {
    leverage_ratio_from_mean(scenario.rotation_length(), mean_rate(scenario)?, d, u, leverage)
}

/// Rotation length maximizing the NPV over `grid`.
pub fn npv_argmax(scenario: &GrowthScenario, d: f64, grid: &[f64]) -> Result<Optimum> {
    check_discount(d)?;
    maximize(grid, |tau| npv(&scenario.with_rotation(tau)?, d))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::path::ReturnPath;

    fn constant(rate: f64, tau: f64) -> GrowthScenario {
        GrowthScenario::new(1.0, tau, ReturnPath::constant(rate).unwrap()).unwrap()
    }

    fn perpetuity(k0: f64, tau: f64, r: f64, d: f64, terms: usize) -> f64 {
        let per_rotation = k0 * ((r - d) * tau).exp() - k0;
        (0..terms).map(|k| per_rotation * (-(k as f64) * d * tau).exp()).sum()
    }

    #[test]
    fn npv_reference_value() {
        let v = npv(&constant(0.05, 10.0), 0.03).unwrap();
        let oracle = perpetuity(1.0, 10.0, 0.05, 0.03, 400);
        assert!((v - oracle).abs() < 1e-12);
        assert!((v - 0.854_237_357).abs() < 1e-9);
    }

    #[test]
    fn npv_zero_at_break_even_and_negative_above() {
        assert_eq!(npv(&constant(0.05, 10.0), 0.05).unwrap(), 0.0);
        assert!(npv(&constant(0.05, 10.0), 0.5).unwrap() < 0.0);
    }

    #[test]
    fn npv_rejects_bad_discount() {
        assert_eq!(npv(&constant(0.05, 10.0), 0.0), Err(Error::InvalidDiscount(0.0)));
        assert!(npv(&constant(0.05, 10.0), -0.01).is_err());
    }

    #[test]
    fn leveraged_collapses_at_zero_leverage() {
        let s = constant(0.05, 10.0);
        let a = npv(&s, 0.03).unwrap();
        let b = leveraged_npv(&s, 0.03, 0.07, 0.0).unwrap();
        assert!((a - b).abs() < 1e-12);
    }

    #[test]
    fn lending_everything_at_discount_rate_is_worthless() {
        let s = constant(0.05, 10.0);
        assert!(leveraged_npv(&s, 0.03, 0.03, -1.0).unwrap().abs() < 1e-15);
        assert!(leveraged_npv(&s, 0.03, 0.03, -1.5).is_err());
    }

    #[test]
    fn ratio_examples() {
        let s = constant(0.05, 10.0);
        let r = leverage_npv_ratio(&s, 0.03, 0.03, 2.0).unwrap();
        assert!((r.ratio - 3.0).abs() < 1e-12);
        let r = leverage_npv_ratio(&s, 0.03, 0.05, 2.0).unwrap();
        assert!((r.ratio - 1.0).abs() < 1e-12);
        let a = leverage_npv_ratio(&s, 0.02, 0.02, 1.5).unwrap();
        let b = leverage_npv_ratio(&s, 0.04, 0.04, 1.5).unwrap();
        assert!((a.ratio - b.ratio).abs() < 1e-12);
    }

    #[test]
    fn ratio_singular_at_break_even() {
        let s = constant(0.05, 10.0);
        assert_eq!(leverage_npv_ratio(&s, 0.05, 0.03, 1.0), Err(Error::IndeterminateRatio));
    }

    #[test]
    fn unsupported_with_investments() {
        use crate::growth::{Investment, InvestmentSchedule};
        let s = constant(0.05, 10.0)
            .with_investments(InvestmentSchedule::new(vec![Investment { time: 1.0, amount: 1.0 }]).unwrap())
            .unwrap();
        assert_eq!(npv(&s, 0.03), Err(Error::UnsupportedSchedule));
    }
}
