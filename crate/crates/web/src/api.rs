//! JSON-in, JSON-out operations behind the browser demo.

use capreturn::estate::{AgeDensity, EstateSpec};
use capreturn::io::read_cash_flows;
use capreturn::leverage::leveraged_discount_rate;
use capreturn::{
    general_irr, growth_cycle_irr, npv, optimize, rroe, GrowthScenario, Objective, Quadrature,
    ReturnPath, TauGrid,
};
use serde::{Deserialize, Serialize};

/// Interactive quality: fewer panels than the library default.
const DEMO_INTERVALS: usize = 1024;

#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct CycleParams {
    pub mean_rate: f64,
    pub shape: f64,
    pub full_cycle: f64,
    #[serde(default = "default_steps")]
    pub steps: usize,
    /// Discount rates as multiples of `mean_rate`.
    #[serde(default)]
    pub discount_multiples: Vec<f64>,
    #[serde(default)]
    pub leverage: f64,
    /// Market rate as a multiple of `mean_rate`.
    #[serde(default)]
    pub market_multiple: f64,
}

fn default_steps() -> usize {
    200
}

#[derive(Debug, Serialize)]
pub struct Series {
    pub label: String,
    pub values: Vec<Option<f64>>,
}

#[derive(Debug, Serialize)]
pub struct Peak {
    pub label: String,
    pub tau: f64,
    pub value: f64,
}

#[derive(Debug, Serialize)]
pub struct Curves {
    pub tau: Vec<f64>,
    pub spot_rate: Vec<f64>,
    pub rates: Vec<Series>,
    pub npv: Vec<Series>,
    pub peaks: Vec<Peak>,
}

fn site(mean_rate: f64, shape: f64, full_cycle: f64) -> Result<GrowthScenario, String> {
    let path = ReturnPath::ansatz(mean_rate, shape, full_cycle).map_err(|e| e.to_string())?;
    Ok(GrowthScenario::new(1.0, full_cycle, path)
        .map_err(|e| e.to_string())?
        .with_quadrature(Quadrature::new(DEMO_INTERVALS).map_err(|e| e.to_string())?))
}

/// Spot rate, ⟨r⟩ (= IRR), RROC, RROE, Ω and NPV against rotation length.
pub fn cycle_curves(params: &CycleParams) -> Result<Curves, String> {
    let base = site(params.mean_rate, params.shape, params.full_cycle)?;
    let grid = TauGrid::up_to(params.full_cycle, params.steps.clamp(2, 2000)).map_err(|e| e.to_string())?;
    let taus = grid.points();
    let m = params.mean_rate;
    let (l, u) = (params.leverage, params.market_multiple * m);

    let mut irr = Vec::with_capacity(taus.len());
    let mut rroc = Vec::with_capacity(taus.len());
    let mut lev = Vec::with_capacity(taus.len());
    let mut omega = Vec::with_capacity(taus.len());
    let mut npvs: Vec<Vec<Option<f64>>> = vec![Vec::new(); params.discount_multiples.len()];
    let mut spot = Vec::with_capacity(taus.len());
    for &tau in &taus {
        let s = base.with_rotation(tau).map_err(|e| e.to_string())?;
        spot.push(base.path().evaluate(tau).map_err(|e| e.to_string())?);
        irr.push(growth_cycle_irr(&s).ok());
        let r = s.rroc().ok();
        rroc.push(r);
        lev.push(r.and_then(|r| rroe(r, l, u).ok()));
        omega.push(leveraged_discount_rate(&s, l, u).ok());
        for (col, k) in npvs.iter_mut().zip(&params.discount_multiples) {
            col.push(npv(&s, k * m).ok());
        }
    }

    let mut peaks = Vec::new();
    let mut objectives = vec![
        ("RROC".to_string(), Objective::Rroc),
        ("IRR".to_string(), Objective::Irr),
    ];
    if l > -1.0 {
        objectives.push((
            "RROE".into(),
            Objective::Rroe {
                leverage: l,
                market_rate: u,
            },
        ));
    }
    objectives.push((
        "Ω".into(),
        Objective::Omega {
            leverage: l,
            market_rate: u,
        },
    ));
    for &k in &params.discount_multiples {
        objectives.push((format!("NPV d={k}m"), Objective::Npv { discount_rate: k * m }));
    }
    for (label, obj) in objectives {
        if let Ok(rep) = optimize(&base, obj, &grid) {
            peaks.push(Peak {
                label,
                tau: rep.tau,
                value: rep.value,
            });
        }
    }

    Ok(Curves {
        tau: taus,
        spot_rate: spot,
        rates: vec![
            Series { label: "IRR = ⟨r⟩".into(), values: irr },
            Series { label: "RROC".into(), values: rroc },
            Series { label: format!("RROE L={l} u={}m", params.market_multiple), values: lev },
            Series { label: format!("Ω L={l} u={}m", params.market_multiple), values: omega },
        ],
        npv: params
            .discount_multiples
            .iter()
            .zip(npvs)
            .map(|(k, values)| Series { label: format!("d={k}m"), values })
            .collect(),
        peaks,
    })
}

#[derive(Debug, Serialize)]
pub struct Roots {
    pub degree: usize,
    pub base_step: f64,
    pub real_roots: Vec<f64>,
    pub residuals: Vec<f64>,
    pub principal_root: Option<f64>,
    pub complex_root_count: usize,
    /// Polynomial roots in x = e^{-o Δ} as `[re, im]`.
    pub polynomial_roots: Vec<[f64; 2]>,
}

/// All IRRs of a `time,amount` CSV.
pub fn irr_roots(csv: &str) -> Result<Roots, String> {
    let schedule = read_cash_flows(csv).map_err(|e| e.to_string())?;
    let res = general_irr(&schedule).map_err(|e| e.to_string())?;
    Ok(Roots {
        degree: res.degree,
        base_step: res.base_step,
        real_roots: res.all_real_roots,
        residuals: res.residuals,
        principal_root: res.principal_root,
        complex_root_count: res.complex_root_count,
        polynomial_roots: res.polynomial_roots.iter().map(|z| [z.re, z.im]).collect(),
    })
}

#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct EstateParams {
    pub mean_rate: f64,
    pub shape: f64,
    pub full_cycle: f64,
    /// Linear age-density tilt in [-1, 1]: p(a) ∝ 1 + tilt (2a/Γ − 1).
    #[serde(default)]
    pub tilt: f64,
}

#[derive(Debug, Serialize)]
pub struct EstateReport {
    pub ages: Vec<f64>,
    pub density: Vec<f64>,
    pub capital: Vec<f64>,
    pub capitalization: f64,
    pub rroc: f64,
    pub area_average_rate: f64,
    pub full_cycle_irr: f64,
}

/// Estate of sites spread over ages with a linear density.
pub fn estate_report(params: &EstateParams) -> Result<EstateReport, String> {
    if !(-1.0..=1.0).contains(&params.tilt) {
        return Err(format!("tilt must lie in [-1, 1], got {}", params.tilt));
    }
    let g = params.full_cycle;
    let s = site(params.mean_rate, params.shape, g)?;
    let ages = if params.tilt == 0.0 {
        AgeDensity::Uniform
    } else {
        AgeDensity::Tabulated {
            knots: vec![(0.0, 1.0 - params.tilt), (g, 1.0 + params.tilt)],
        }
    };
    let estate = EstateSpec::new(s.clone(), ages).map_err(|e| e.to_string())?;
    let n = 100;
    let grid: Vec<f64> = (0..=n).map(|i| g * i as f64 / n as f64).collect();
    let capital = grid
        .iter()
        .map(|&a| s.capital_at(a))
        .collect::<Result<Vec<_>, _>>()
        .map_err(|e| e.to_string())?;
    Ok(EstateReport {
        density: grid.iter().map(|&a| estate.density(a)).collect(),
        ages: grid,
        capital,
        capitalization: estate.capitalization().map_err(|e| e.to_string())?,
        rroc: estate.rroc().map_err(|e| e.to_string())?,
        area_average_rate: estate.area_average_rate().map_err(|e| e.to_string())?,
        full_cycle_irr: growth_cycle_irr(&s).map_err(|e| e.to_string())?,
    })
}

/// Parses `params`, runs `op`, and serializes the result.
pub fn json_call<P, R>(params: &str, op: impl FnOnce(&P) -> Result<R, String>) -> Result<String, String>
where
    P: for<'de> Deserialize<'de>,
    R: Serialize,
{
    let p: P = serde_json::from_str(params).map_err(|e| format!("bad parameters: {e}"))?;
    let out = op(&p)?;
    serde_json::to_string(&out).map_err(|e| e.to_string())
}
