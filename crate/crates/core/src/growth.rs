//! Capital trajectories and expected values over one rotation.
//!
//! Between investment events capital follows `K(t) = K(t_k) exp(R(t) - R(t_k))`;
//! each event adds its amount to K. Expected values use the uniform density
//! 1/τ over the rotation.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::path::ReturnPath;
use crate::quadrature::{half_panels, Quadrature};

/// An impulse investment (positive) or divestment (negative) at `time`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Investment {
    pub time: f64,
    pub amount: f64,
}

/// Investment events, strictly increasing in time.
#[derive(Debug, Clone, Default, PartialEq)]
pub struct InvestmentSchedule {
    events: Vec<Investment>,
}

impl InvestmentSchedule {
    pub fn new(events: Vec<Investment>) -> Result<Self> {
        if events
            .iter()
            .any(|e| !e.time.is_finite() || !e.amount.is_finite())
        {
            return Err(Error::InvalidArgument("investment events must be finite".into()));
        }
        if events.windows(2).any(|w| w[1].time <= w[0].time) {
            return Err(Error::InvalidArgument(
                "investment times must be strictly increasing".into(),
            ));
        }
        Ok(InvestmentSchedule { events })
    }

    pub fn events(&self) -> &[Investment] {
        &self.events
    }

    pub fn is_empty(&self) -> bool {
        self.events.is_empty()
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct GrowthScenario {
    initial_capital: f64,
    rotation_length: f64,
    path: ReturnPath,
    investments: InvestmentSchedule,
    quadrature: Quadrature,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ExpectedValues {
    /// ⟨dκ/dt⟩, currency per year.
    pub profit_rate: f64,
    /// ⟨K⟩.
    pub capitalization: f64,
    /// ⟨s⟩ = profit_rate / capitalization.
    pub rroc: f64,
}

/// Weighted integrals over the rotation: ∫w, ∫K w, ∫K r w, ∫r w.
#[derive(Debug, Clone, Copy, Default, PartialEq)]
pub(crate) struct Moments {
    pub weight: f64,
    pub capital: f64,
    pub profit: f64,
    pub rate: f64,
}

impl GrowthScenario {
    pub fn new(initial_capital: f64, rotation_length: f64, path: ReturnPath) -> Result<Self> {
        let s = GrowthScenario {
            initial_capital,
            rotation_length,
            path,
            investments: InvestmentSchedule::default(),
            quadrature: Quadrature::default(),
        };
        s.validate()?;
        Ok(s)
    }

    pub fn with_investments(mut self, investments: InvestmentSchedule) -> Result<Self> {
        self.investments = investments;
        self.validate()?;
        Ok(self)
    }

    pub fn with_quadrature(mut self, quadrature: Quadrature) -> Self {
        self.quadrature = quadrature;
        self
    }

    /// Same site dynamics with a different rotation length.
    pub fn with_rotation(&self, rotation_length: f64) -> Result<Self> {
        let s = GrowthScenario {
            rotation_length,
            ..self.clone()
        };
        s.validate()?;
        Ok(s)
    }

    fn validate(&self) -> Result<()> {
        if !(self.initial_capital.is_finite() && self.initial_capital > 0.0) {
            return Err(Error::InvalidArgument(format!(
                "initial capital must be > 0, got {}",
                self.initial_capital
            )));
        }
        let tau = self.rotation_length;
        if !(tau.is_finite() && tau > 0.0) {
            return Err(Error::InvalidArgument(format!(
                "rotation length must be > 0, got {tau}"
            )));
        }
        self.path.validate()?;
        self.path.check_interval(0.0, tau)?;
        if let Some(e) = self
            .investments
            .events()
            .iter()
            .find(|e| !(e.time > 0.0 && e.time < tau))
        {
            return Err(Error::InvalidArgument(format!(
                "investment at t = {} is not strictly inside (0, {tau})",
                e.time
            )));
        }
        Ok(())
    }

    pub fn initial_capital(&self) -> f64 {
        self.initial_capital
    }

    pub fn rotation_length(&self) -> f64 {
        self.rotation_length
    }

    pub fn path(&self) -> &ReturnPath {
        &self.path
    }

    pub fn investments(&self) -> &InvestmentSchedule {
        &self.investments
    }

    pub fn quadrature(&self) -> &Quadrature {
        &self.quadrature
    }

    pub fn is_investment_free(&self) -> bool {
        self.investments.is_empty()
    }

    /// ⟨r⟩ over this rotation.
    pub fn mean_rate(&self) -> Result<f64> {
        self.path
            .time_average_rate_with(self.rotation_length, &self.quadrature)
    }

    /// K(t). Events at time `t` itself are already applied.
    pub fn capital_at(&self, t: f64) -> Result<f64> {
        let tau = self.rotation_length;
        if t.is_nan() || t < 0.0 || t > tau {
            return Err(Error::Domain { t, lo: 0.0, hi: tau });
        }
        let breaks = self.path.breakpoints();
        let grow = |from: f64, to: f64| {
            self.quadrature
                .integrate(from, to, &breaks, |s| self.path.rate(s))
                .exp()
        };
        let mut capital = self.initial_capital;
        let mut from = 0.0;
        for e in self.investments.events().iter().take_while(|e| e.time <= t) {
            capital = capital * grow(from, e.time) + e.amount;
            if capital <= 0.0 {
                return Err(Error::DegenerateCapital {
                    t: e.time,
                    capital,
                });
            }
            from = e.time;
        }
        Ok(capital * grow(from, t))
    }

    /// One pass over the rotation accumulating weighted moments.
    pub(crate) fn moments<W>(&self, extra_breaks: &[f64], weight: W) -> Result<Moments>
    where
        W: Fn(f64) -> f64,
    {
        let tau = self.rotation_length;
        let events = self.investments.events();
        let mut breaks = self.path.breakpoints();
        breaks.extend(events.iter().map(|e| e.time));
        breaks.extend_from_slice(extra_breaks);
        let nodes = self.quadrature.nodes(0.0, tau, &breaks);

        let r = |t: f64| self.path.rate(t);
        let mut acc = Moments::default();
        let mut next_event = 0;
        let mut cum = 0.0f64; // R at the panel start
        let mut base_capital = self.initial_capital;
        let mut base_cum = 0.0;
        let mut r_a = r(0.0);

        for w in nodes.windows(2) {
            let (a, b) = (w[0], w[1]);
            while next_event < events.len() && events[next_event].time <= a {
                let before = base_capital * (cum - base_cum).exp();
                base_capital = before + events[next_event].amount;
                base_cum = cum;
                if base_capital <= 0.0 {
                    return Err(Error::DegenerateCapital {
                        t: events[next_event].time,
                        capital: base_capital,
                    });
                }
                next_event += 1;
            }
            let m = 0.5 * (a + b);
            let (r_q1, r_m, r_q3, r_b) = (r(0.25 * (3.0 * a + b)), r(m), r(0.25 * (a + 3.0 * b)), r(b));
            let (to_mid, to_end) = half_panels(a, m, b, r_a, r_q1, r_m, r_q3, r_b);
            let k = |c: f64| base_capital * (c - base_cum).exp();
            let (k_a, k_m, k_b) = (k(cum), k(cum + to_mid), k(cum + to_end));
            let (w_a, w_m, w_b) = (weight(a), weight(m), weight(b));
            let h6 = (b - a) / 6.0;
            acc.weight += h6 * (w_a + 4.0 * w_m + w_b);
            acc.capital += h6 * (k_a * w_a + 4.0 * k_m * w_m + k_b * w_b);
            acc.profit += h6 * (k_a * r_a * w_a + 4.0 * k_m * r_m * w_m + k_b * r_b * w_b);
            acc.rate += h6 * (r_a * w_a + 4.0 * r_m * w_m + r_b * w_b);
            cum += to_end;
            r_a = r_b;
        }
        Ok(acc)
    }

    /// ⟨dκ/dt⟩, ⟨K⟩ and ⟨s⟩ from a single pass.
    pub fn expected_values(&self) -> Result<ExpectedValues> {
        let tau = self.rotation_length;
        let m = self.moments(&[], |_| 1.0)?;
        let profit_rate = m.profit / tau;
        let capitalization = m.capital / tau;
        if !(capitalization > 0.0) {
            return Err(Error::DegenerateCapital {
                t: tau,
                capital: capitalization,
            });
        }
        Ok(ExpectedValues {
            profit_rate,
            capitalization,
            rroc: profit_rate / capitalization,
        })
    }

    /// (1/τ) ∫₀^τ K r dt by quadrature, on accrual basis.
    pub fn expected_profit_rate(&self) -> Result<f64> {
        Ok(self.expected_values()?.profit_rate)
    }

    /// (1/τ) ∫₀^τ K dt.
    pub fn expected_capitalization(&self) -> Result<f64> {
        Ok(self.expected_values()?.capitalization)
    }

    /// Expected rate of return on capital ⟨s⟩.
    pub fn rroc(&self) -> Result<f64> {
        Ok(self.expected_values()?.rroc)
    }

    /// K(0) (e^{τ⟨r⟩} − 1) / τ; only valid without intermediate events.
    pub fn closed_form_profit_rate(&self) -> Result<f64> {
        if !self.is_investment_free() {
            return Err(Error::UnsupportedSchedule);
        }
        let tau = self.rotation_length;
        Ok(self.initial_capital * (tau * self.mean_rate()?).exp_m1() / tau)
    }
}
