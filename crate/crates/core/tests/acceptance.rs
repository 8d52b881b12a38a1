//! Acceptance suite. Run with `cargo test -p capreturn --test acceptance`.
//! Prints one PASS/FAIL line per criterion and exits non-zero on failure.

#![allow(clippy::neg_cmp_op_on_partial_ord)]

use std::panic::{catch_unwind, AssertUnwindSafe};
use std::process::ExitCode;
use std::time::Instant;

use capreturn::estate::{AgeDensity, EstateSpec};
use capreturn::io::{parse_scenario, serialize_scenario, EstateSection, ScenarioDocument};
use capreturn::leverage::{
    leveraged_discount_rate_from_mean, rroc_argmax, rroe_argmax,
};
use capreturn::optimize::{maximize, TauGrid};
use capreturn::valuation::{leverage_ratio_from_mean, npv_argmax, ValuationSpec};
use capreturn::{
    general_irr, growth_cycle_irr, sweep, CashFlow, CashFlowSchedule, GrowthScenario, Investment,
    LeverageSpec, Metric, ReturnPath, SweepConfig,
};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

const MEAN: f64 = 0.05;
const SHAPE: f64 = 0.5;
const CYCLE: f64 = 100.0;

fn ansatz_site(tau: f64) -> GrowthScenario {
    GrowthScenario::new(1.0, tau, ReturnPath::ansatz(MEAN, SHAPE, CYCLE).unwrap()).unwrap()
}

/// Γ/400 grid over (0, Γ].
fn fine_grid() -> Vec<f64> {
    TauGrid::up_to(CYCLE, 400).unwrap().points()
}

fn rel(a: f64, b: f64) -> f64 {
    (a - b).abs() / b.abs().max(f64::MIN_POSITIVE)
}

type Outcome = Result<String, String>;
type Criterion = (&'static str, &'static str, fn() -> Outcome);

macro_rules! ensure {
    ($cond:expr, $($fmt:tt)+) => {
        if !$cond {
            return Err(format!($($fmt)+));
        }
    };
}

fn ac1_constant_collapse() -> Outcome {
    let mut worst = 0.0f64;
    for r in [0.01, 0.05, 0.2] {
        for tau in [1.0, 10.0, 100.0] {
            let s = GrowthScenario::new(1.0, tau, ReturnPath::constant(r).unwrap()).unwrap();
            let rroc = s.rroc().map_err(|e| e.to_string())?;
            let irr = growth_cycle_irr(&s).map_err(|e| e.to_string())?;
            let general = general_irr(&CashFlowSchedule::from_scenario(&s).unwrap())
                .map_err(|e| e.to_string())?
                .principal_root
                .ok_or("no principal root")?;
            for v in [rroc, irr, general] {
                worst = worst.max((v - r).abs());
            }
        }
    }
    ensure!(worst < 1e-9, "max |metric - r| = {worst:e}");
    Ok(format!("max deviation {worst:.1e} over 9 (r, tau) pairs"))
}

fn ac2_profit_path_independence() -> Outcome {
    let forward = ansatz_site(CYCLE);
    let path = ReturnPath::ansatz(MEAN, SHAPE, CYCLE)
        .unwrap()
        .reversed(60.0)
        .unwrap();
    // τ = 60 window: forward vs reversed
    let fwd = GrowthScenario::new(1.0, 60.0, ReturnPath::ansatz(MEAN, SHAPE, CYCLE).unwrap()).unwrap();
    let rev = GrowthScenario::new(1.0, 60.0, path).unwrap();
    let a = fwd.expected_values().map_err(|e| e.to_string())?;
    let b = rev.expected_values().map_err(|e| e.to_string())?;
    ensure!(
        rel(a.profit_rate, b.profit_rate) < 1e-8,
        "profit rates {} vs {}",
        a.profit_rate,
        b.profit_rate
    );
    ensure!(
        rel(a.capitalization, b.capitalization) > 1e-3,
        "capitalizations {} vs {} too close",
        a.capitalization,
        b.capitalization
    );

    // τ = Γ: profit only
    let full_rev = GrowthScenario::new(
        1.0,
        CYCLE,
        forward.path().reversed(CYCLE).unwrap(),
    )
    .unwrap();
    let p = forward.expected_profit_rate().unwrap();
    let q = full_rev.expected_profit_rate().unwrap();
    ensure!(rel(p, q) < 1e-8, "full-cycle profit {p} vs {q}");
    Ok(format!(
        "profit rel diff {:.1e}; capitalization rel diff {:.3}",
        rel(a.profit_rate, b.profit_rate),
        rel(a.capitalization, b.capitalization)
    ))
}

fn ac3_figure_orderings() -> Outcome {
    let full = ansatz_site(CYCLE);
    let grid = fine_grid();
    let irr_full = growth_cycle_irr(&full).unwrap();
    ensure!((irr_full - MEAN).abs() < 1e-6, "IRR(Γ) = {irr_full}");
    let rroc_full = full.rroc().unwrap();
    ensure!(rroc_full < MEAN, "RROC(Γ) = {rroc_full} not below {MEAN}");
    let best_rroc = rroc_argmax(&full, &grid).map_err(|e| e.to_string())?;
    let best_irr = maximize(&grid, |tau| growth_cycle_irr(&full.with_rotation(tau)?))
        .map_err(|e| e.to_string())?;
    ensure!(
        best_rroc.value > best_irr.value,
        "max RROC {} <= max IRR {}",
        best_rroc.value,
        best_irr.value
    );
    ensure!(
        best_rroc.grid_index < best_irr.grid_index,
        "argmax RROC {} not before argmax IRR {}",
        best_rroc.tau,
        best_irr.tau
    );
    Ok(format!(
        "RROC(Γ)={rroc_full:.6}; max RROC {:.6} at τ={:.2}; max IRR {:.6} at τ={:.2}",
        best_rroc.value, best_rroc.tau, best_irr.value, best_irr.tau
    ))
}

fn random_path(rng: &mut ChaCha8Rng) -> ReturnPath {
    match rng.gen_range(0..3) {
        0 => ReturnPath::constant(rng.gen_range(-0.05..0.2)).unwrap(),
        1 => ReturnPath::ansatz(
            rng.gen_range(0.01..0.15),
            rng.gen_range(-0.5..1.5),
            rng.gen_range(20.0..200.0),
        )
        .unwrap(),
        _ => {
            let mut t = 0.0;
            let knots = (0..6)
                .map(|_| {
                    let k = (t, rng.gen_range(-0.02..0.2));
                    t += rng.gen_range(5.0..40.0);
                    k
                })
                .collect();
            ReturnPath::tabulated(knots).unwrap()
        }
    }
}

fn ac4_closed_form_vs_quadrature() -> Outcome {
    let mut rng = ChaCha8Rng::seed_from_u64(4);
    let mut worst = 0.0f64;
    for _ in 0..20 {
        let path = random_path(&mut rng);
        let hi = path.domain().1.min(150.0);
        let tau = rng.gen_range(0.05..1.0) * hi;
        let k0 = rng.gen_range(0.1..10.0);
        let s = GrowthScenario::new(k0, tau, path).unwrap();
        let closed = s.closed_form_profit_rate().map_err(|e| e.to_string())?;
        let quad = s.expected_profit_rate().map_err(|e| e.to_string())?;
        worst = worst.max(rel(quad, closed));
    }
    ensure!(worst < 1e-8, "worst relative error {worst:e}");
    Ok(format!("20 scenarios, worst relative error {worst:.1e}"))
}

fn ac5_irr_consistency() -> Outcome {
    let mut worst = 0.0f64;
    for tau in [10.0, 37.5, 62.25, 100.0] {
        let s = ansatz_site(tau);
        let expected = growth_cycle_irr(&s).unwrap();
        let schedule = CashFlowSchedule::new(vec![
            CashFlow { time: 0.0, amount: -1.0 },
            CashFlow { time: tau, amount: s.capital_at(tau).unwrap() },
        ])
        .unwrap();
        let got = general_irr(&schedule)
            .map_err(|e| e.to_string())?
            .principal_root
            .ok_or("no root")?;
        worst = worst.max((got - expected).abs());
    }
    ensure!(worst < 1e-6, "two-event IRR off by {worst:e}");

    let two = CashFlowSchedule::new(vec![
        CashFlow { time: 0.0, amount: -1.0 },
        CashFlow { time: 1.0, amount: 2.3 },
        CashFlow { time: 2.0, amount: -1.32 },
    ])
    .unwrap();
    let res = general_irr(&two).map_err(|e| e.to_string())?;
    ensure!(res.all_real_roots.len() == 2, "roots {:?}", res.all_real_roots);
    // quadratic formula on -1 + 2.3x - 1.32x² with x = e^{-o}
    let disc = (2.3f64 * 2.3 - 4.0 * 1.32).sqrt();
    let mut oracle: Vec<f64> = [(2.3 - disc) / 2.64, (2.3 + disc) / 2.64]
        .iter()
        .map(|x| -x.ln())
        .collect();
    oracle.sort_by(f64::total_cmp);
    for (got, want) in res.all_real_roots.iter().zip(&oracle) {
        ensure!((got - want).abs() < 1e-9, "root {got} vs {want}");
    }
    ensure!(
        (oracle[0] - 1.1f64.ln()).abs() < 1e-12 && (oracle[1] - 1.2f64.ln()).abs() < 1e-12,
        "oracle {:?}",
        oracle
    );
    Ok(format!(
        "two-event max error {worst:.1e}; roots {:.12}, {:.12}",
        res.all_real_roots[0], res.all_real_roots[1]
    ))
}

fn ac6_leverage_ratio() -> Outcome {
    let tau = 40.0;
    let mean = ansatz_site(tau).mean_rate().unwrap();
    let mut worst = 0.0f64;
    for l in [-0.5, 0.0, 1.0, 3.0] {
        let mut ratios = Vec::new();
        for d in [0.03, 0.08] {
            let r = leverage_ratio_from_mean(tau, mean, d, d, l).map_err(|e| e.to_string())?;
            worst = worst.max((r.ratio - (1.0 + l)).abs());
            ratios.push(r.ratio);
        }
        ensure!(
            (ratios[0] - ratios[1]).abs() < 1e-9,
            "L={l}: ratio depends on d: {ratios:?}"
        );
    }
    ensure!(worst < 1e-9, "max |ratio - (1+L)| = {worst:e}");
    Ok(format!("max |ratio - (1+L)| = {worst:.1e}"))
}

fn ac7_omega() -> Outcome {
    let mut rng = ChaCha8Rng::seed_from_u64(7);
    let mut worst_limit = 0.0f64;
    for _ in 0..20 {
        let tau = rng.gen_range(1.0..100.0);
        let mean = ansatz_site(tau).mean_rate().unwrap();
        let l = rng.gen_range(-0.9..4.0);
        let u = rng.gen_range(0.0..0.1);
        let zero = leveraged_discount_rate_from_mean(tau, mean, 0.0, u).map_err(|e| e.to_string())?;
        let same = leveraged_discount_rate_from_mean(tau, mean, l, mean).map_err(|e| e.to_string())?;
        worst_limit = worst_limit.max((zero - mean).abs()).max((same - mean).abs());
    }
    ensure!(worst_limit < 1e-12, "limit deviation {worst_limit:e}");

    let mut worst_residual = 0.0f64;
    let mut checked = 0;
    while checked < 20 {
        let tau = rng.gen_range(1.0..100.0);
        let mean = ansatz_site(tau).mean_rate().unwrap();
        let l = rng.gen_range(-0.9..4.0);
        let u = rng.gen_range(0.0..0.1);
        let omega = match leveraged_discount_rate_from_mean(tau, mean, l, u) {
            Ok(o) => o,
            Err(capreturn::Error::WipedOutEquity { .. }) => continue,
            Err(e) => return Err(e.to_string()),
        };
        let residual = ((1.0 + l) * (mean * tau).exp() - l * (u * tau).exp())
            * (-omega * tau).exp()
            - 1.0;
        worst_residual = worst_residual.max(residual.abs());
        checked += 1;
    }
    ensure!(worst_residual < 1e-9, "residual {worst_residual:e}");
    Ok(format!(
        "limits within {worst_limit:.1e}; residual {worst_residual:.1e} at 20 points"
    ))
}

fn ac8_rroe_invariance() -> Outcome {
    let site = ansatz_site(CYCLE);
    let grid = fine_grid();
    let base = rroc_argmax(&site, &grid).map_err(|e| e.to_string())?;
    for k in [0.0, 0.5, 1.0, 2.0] {
        let opt = rroe_argmax(&site, 1.0, k * MEAN, &grid).map_err(|e| e.to_string())?;
        ensure!(
            opt.grid_index == base.grid_index,
            "u={}: argmax τ {} vs RROC argmax {}",
            k * MEAN,
            opt.tau,
            base.tau
        );
    }
    Ok(format!("argmax τ = {:.2} for all four u", grid[base.grid_index]))
}

fn ac9_npv_sensitivity() -> Outcome {
    let site = ansatz_site(CYCLE);
    let grid = fine_grid();
    let mut idx = Vec::new();
    for k in [0.5, 1.0, 1.5] {
        let opt = npv_argmax(&site, k * MEAN, &grid).map_err(|e| e.to_string())?;
        idx.push((k, opt.grid_index, grid[opt.grid_index]));
    }
    let spread = idx.iter().map(|x| x.1).max().unwrap() - idx.iter().map(|x| x.1).min().unwrap();
    ensure!(spread > 1, "argmax indices {idx:?}");
    let desc: Vec<String> = idx.iter().map(|(k, _, t)| format!("d={k}m: τ={t:.2}")).collect();
    Ok(desc.join(", "))
}

fn ac10_estate() -> Outcome {
    let estate = EstateSpec::new(ansatz_site(CYCLE), AgeDensity::Uniform).unwrap();
    let area = estate.area_average_rate().map_err(|e| e.to_string())?;
    let rroc = estate.rroc().map_err(|e| e.to_string())?;
    let irr = growth_cycle_irr(estate.site()).unwrap();
    ensure!((area - rroc).abs() > 1e-3, "area {area} vs rroc {rroc}");
    ensure!((area - irr).abs() < 1e-6, "area {area} vs IRR(Γ) {irr}");
    Ok(format!("area average {area:.6}, estate RROC {rroc:.6}"))
}

fn documents() -> Vec<ScenarioDocument> {
    let ans = ReturnPath::ansatz(MEAN, SHAPE, CYCLE).unwrap();
    let mut docs = vec![
        ScenarioDocument::new(1.0, 10.0, ReturnPath::constant(0.05).unwrap()),
        ScenarioDocument::new(2.5, 100.0, ans.clone()),
        ScenarioDocument::new(1.0, 60.0, ans.reversed(80.0).unwrap()),
        ScenarioDocument::new(
            1.0,
            30.0,
            ReturnPath::tabulated(vec![(0.0, 0.1), (12.5, 0.04), (30.0, 0.0123456789)]).unwrap(),
        ),
    ];
    let mut d = ScenarioDocument::new(1.0, 10.0, ReturnPath::constant(0.05).unwrap());
    d.investments = vec![
        Investment { time: 2.0, amount: 0.25 },
        Investment { time: 5.0, amount: -0.1 },
    ];
    docs.push(d);
    let mut d = ScenarioDocument::new(1.0, 70.0, ans.clone());
    d.valuation = Some(ValuationSpec { discount_rate: 0.025, market_rate: 0.03, leverage: 1.0 });
    docs.push(d);
    let mut d = ScenarioDocument::new(1.0, 70.0, ans.clone());
    d.leverage = Some(LeverageSpec::new(1.0, 0.025).unwrap());
    docs.push(d);
    let mut d = ScenarioDocument::new(2.0, 70.0, ans.clone());
    d.leverage = Some(LeverageSpec::new(1.0, 0.025).unwrap().with_equity(2.0, 1.0).unwrap());
    docs.push(d);
    let mut d = ScenarioDocument::new(1.0, CYCLE, ans.clone());
    d.estate = Some(EstateSection { ages: AgeDensity::Uniform });
    docs.push(d);
    let mut d = ScenarioDocument::new(1.0, CYCLE, ans);
    d.quadrature_intervals = 1000;
    d.estate = Some(EstateSection {
        ages: AgeDensity::Tabulated { knots: vec![(0.0, 1.0), (50.0, 2.0), (100.0, 0.5)] },
    });
    docs.push(d);
    docs
}

fn ac11_io_determinism() -> Outcome {
    let docs = documents();
    for (i, doc) in docs.iter().enumerate() {
        ensure!(doc.violations().is_empty(), "doc {i} invalid: {:?}", doc.violations());
        let text = serialize_scenario(doc);
        let back = parse_scenario(&text).map_err(|e| format!("doc {i}: {e}"))?;
        ensure!(&back == doc, "doc {i} changed on round trip");
        ensure!(serialize_scenario(&back) == text, "doc {i} text not stable");
    }
    let site = ansatz_site(CYCLE);
    let config = SweepConfig {
        grid: TauGrid::up_to(CYCLE, 100).unwrap(),
        metrics: vec![
            Metric::MeanRate,
            Metric::Irr,
            Metric::Rroc,
            Metric::Npv,
            Metric::Rroe,
            Metric::Omega,
        ],
        discount_rates: vec![0.025, 0.05],
        market_rates: vec![0.0, 0.025],
        leverages: vec![1.0],
    };
    let first = sweep(&site, &config).map_err(|e| e.to_string())?.to_csv().unwrap();
    for _ in 0..3 {
        let again = sweep(&site, &config).map_err(|e| e.to_string())?.to_csv().unwrap();
        ensure!(again == first, "sweep CSV differs between runs");
    }
    Ok(format!("{} documents; {} byte CSV stable over 4 runs", docs.len(), first.len()))
}

fn main() -> ExitCode {
    let criteria: [Criterion; 11] = [
        ("AC1", "constant-path collapse", ac1_constant_collapse),
        ("AC2", "profit path independence", ac2_profit_path_independence),
        ("AC3", "RROC vs IRR orderings", ac3_figure_orderings),
        ("AC4", "closed form vs quadrature", ac4_closed_form_vs_quadrature),
        ("AC5", "IRR consistency", ac5_irr_consistency),
        ("AC6", "leveraged NPV ratio", ac6_leverage_ratio),
        ("AC7", "leveraged discount rate", ac7_omega),
        ("AC8", "RROE argmax invariance", ac8_rroe_invariance),
        ("AC9", "NPV argmax sensitivity", ac9_npv_sensitivity),
        ("AC10", "estate averages", ac10_estate),
        ("AC11", "IO determinism", ac11_io_determinism),
    ];
    let mut failed = 0;
    for (id, name, run) in criteria {
        let start = Instant::now();
        let outcome = catch_unwind(AssertUnwindSafe(run))
            .unwrap_or_else(|_| Err("panicked".to_string()));
        let secs = start.elapsed().as_secs_f64();
        match outcome {
            Ok(detail) => println!("PASS {id} {name} ({secs:.2}s): {detail}"),
            Err(why) => {
                failed += 1;
                println!("FAIL {id} {name} ({secs:.2}s): {why}");
            }
        }
    }
    println!("{} passed, {failed} failed", 11 - failed);
    if failed == 0 {
        ExitCode::SUCCESS
    } else {
        ExitCode::FAILURE
    }
}
