//! Estate-level aggregation over sites at different ages.
//!
//! Every site follows the same scenario; ages are distributed with a
//! stationary density p(a) on [0, τ].

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::growth::GrowthScenario;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case", deny_unknown_fields)]
pub enum AgeDensity {
    Uniform,
    /// Piecewise-linear `(age, density)` knots, zero outside. Renormalized
    /// to unit mass.
    Tabulated { knots: Vec<(f64, f64)> },
}

#[derive(Debug, Clone, PartialEq)]
pub struct EstateSpec {
    site: GrowthScenario,
    ages: AgeDensity,
    /// Multiplier applied to tabulated densities to reach unit mass.
    normalization: f64,
}

impl EstateSpec {
    pub fn new(site: GrowthScenario, ages: AgeDensity) -> Result<Self> {
        let tau = site.rotation_length();
        let normalization = match &ages {
            AgeDensity::Uniform => 1.0,
            AgeDensity::Tabulated { knots } => {
                if knots.len() < 2 {
                    return Err(Error::InvalidArgument(
                        "age density needs at least two knots".into(),
                    ));
                }
                if knots
                    .iter()
                    .any(|&(a, p)| !(a.is_finite() && p.is_finite()) || p < 0.0)
                {
                    return Err(Error::InvalidArgument(
                        "age density knots must be finite with density >= 0".into(),
                    ));
                }
                if knots.windows(2).any(|w| w[1].0 <= w[0].0) {
                    return Err(Error::InvalidArgument(
                        "age density knots must be strictly increasing".into(),
                    ));
                }
                if knots[0].0 < 0.0 || knots[knots.len() - 1].0 > tau {
                    return Err(Error::InvalidArgument(format!(
                        "age density support must lie within [0, {tau}]"
                    )));
                }
                let mass: f64 = knots
                    .windows(2)
                    .map(|w| 0.5 * (w[1].0 - w[0].0) * (w[0].1 + w[1].1))
                    .sum();
                if !(mass > 0.0) {
                    return Err(Error::InvalidArgument("age density has zero mass".into()));
                }
                1.0 / mass
            }
        };
        Ok(EstateSpec {
            site,
            ages,
            normalization,
        })
    }

    pub fn site(&self) -> &GrowthScenario {
        &self.site
    }

    pub fn ages(&self) -> &AgeDensity {
        &self.ages
    }

    pub fn normalization_factor(&self) -> f64 {
        self.normalization
    }

    /// Normalized p(a).
    pub fn density(&self, age: f64) -> f64 {
        match &self.ages {
            AgeDensity::Uniform => 1.0 / self.site.rotation_length(),
            AgeDensity::Tabulated { knots } => {
                let i = knots.partition_point(|k| k.0 <= age);
                if i == 0 || i == knots.len() {
                    // outside the support, except the last knot itself
                    return if i == knots.len() && age == knots[i - 1].0 {
                        knots[i - 1].1 * self.normalization
                    } else {
                        0.0
                    };
                }
                let (a0, p0) = knots[i - 1];
                let (a1, p1) = knots[i];
                (p0 + (p1 - p0) * (age - a0) / (a1 - a0)) * self.normalization
            }
        }
    }

    fn breakpoints(&self) -> Vec<f64> {
        match &self.ages {
            AgeDensity::Uniform => Vec::new(),
            AgeDensity::Tabulated { knots } => knots.iter().map(|k| k.0).collect(),
        }
    }

    fn moments(&self) -> Result<EstateMoments> {
        let m = self.site.moments(&self.breakpoints(), |a| self.density(a))?;
        Ok(EstateMoments {
            mass: m.weight,
            capital: m.capital,
            profit: m.profit,
            rate: m.rate,
        })
    }

    /// ∫ K(a) p(a) da.
    pub fn capitalization(&self) -> Result<f64> {
        Ok(self.moments()?.capital)
    }

    /// Capital-weighted return ∫ K r p da / ∫ K p da.
    pub fn rroc(&self) -> Result<f64> {
        let m = self.moments()?;
        if !(m.capital > 0.0) {
            return Err(Error::DegenerateCapital {
                t: self.site.rotation_length(),
                capital: m.capital,
            });
        }
        Ok(m.profit / m.capital)
    }

    /// Unweighted ∫ r(a) p(a) da.
    pub fn area_average_rate(&self) -> Result<f64> {
        Ok(self.moments()?.rate)
    }

    /// ∫ p(a) da by the same quadrature; 1 up to rounding.
    pub fn density_mass(&self) -> Result<f64> {
        Ok(self.moments()?.mass)
    }
}

struct EstateMoments {
    mass: f64,
    capital: f64,
    profit: f64,
    rate: f64,
}
