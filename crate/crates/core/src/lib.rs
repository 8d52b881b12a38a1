//! Return on capital in periodic growth processes.
//!
//! Computes, for a spot return-rate path r(t) over a rotation of length τ:
//! the expected rate of return on capital (⟨s⟩, RROC), the internal rate of
//! return, perpetual-rotation NPV, and leveraged variants (RROE, Ω, NPV(L)),
//! plus estate-level aggregation over a site-age density.

#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod error;
pub mod estate;
pub mod growth;
pub mod io;
pub mod irr;
pub mod leverage;
pub mod optimize;
pub mod path;
pub mod quadrature;
pub mod roots;
pub mod sweep;
pub mod valuation;

pub use error::{Error, Result};
pub use estate::{AgeDensity, EstateSpec};
pub use growth::{ExpectedValues, GrowthScenario, Investment, InvestmentSchedule};
pub use irr::{general_irr, growth_cycle_irr, CashFlow, CashFlowSchedule, IrrResult};
pub use leverage::{leveraged_discount_rate, rroe, LeverageSpec};
pub use optimize::{Optimum, TauGrid};
pub use path::ReturnPath;
pub use quadrature::Quadrature;
pub use sweep::{optimize, sweep, Metric, Objective, OptimumReport, SweepConfig, SweepResult};
pub use valuation::{leverage_npv_ratio, leveraged_npv, npv, ValuationSpec};
