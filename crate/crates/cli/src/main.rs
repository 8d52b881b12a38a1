//! `capreturn`: sweeps, optima and single-point evaluations of capital-return
//! measures for periodic growth scenarios.

use std::fs;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use anyhow::{bail, Context, Result};
use capreturn::io::{parse_scenario, read_cash_flows, write_table, Cell, ScenarioDocument};
use capreturn::{
    general_irr, growth_cycle_irr, leverage_npv_ratio, leveraged_discount_rate, leveraged_npv, npv, optimize,
    rroe, sweep, GrowthScenario, Metric, Objective, SweepConfig, TauGrid,
};
use clap::{Args, Parser, Subcommand, ValueEnum};

#[derive(Parser)]
#[command(name = "capreturn", version)]
#[command(about = "Expected return on capital, IRR, NPV and leverage for periodic growth processes")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Tabulate metrics over a grid of rotation lengths (CSV)
    Sweep {
        #[command(flatten)]
        scenario: ScenarioArg,
        #[command(flatten)]
        grid: GridArgs,
        /// Comma-separated metrics: mean, irr, rroc, npv, rroe, omega
        #[arg(long, value_delimiter = ',', default_value = "mean,irr,rroc")]
        metrics: Vec<Metric>,
        #[command(flatten)]
        rates: RateArgs,
        /// Write CSV here (plus a .provenance.json sidecar) instead of stdout
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Find the rotation length maximizing an objective (CSV report)
    Optimize {
        #[command(flatten)]
        scenario: ScenarioArg,
        #[arg(long, value_enum)]
        objective: ObjectiveKind,
        #[command(flatten)]
        grid: GridArgs,
        #[command(flatten)]
        rates: RateArgs,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// All real and complex IRRs of a `time,amount` cash-flow CSV
    Irr {
        /// Cash-flow CSV with a `time,amount` header
        cashflows: PathBuf,
    },
    /// Every metric at the scenario's own rotation length
    Eval {
        #[command(flatten)]
        scenario: ScenarioArg,
        #[command(flatten)]
        rates: RateArgs,
    },
}

#[derive(Args)]
struct ScenarioArg {
    /// Scenario document (.json)
    #[arg(long)]
    scenario: PathBuf,
}

#[derive(Args)]
struct GridArgs {
    /// Smallest rotation length [default: tau-max / tau-steps]
    #[arg(long)]
    tau_min: Option<f64>,
    /// Largest rotation length [default: the scenario's tau]
    #[arg(long)]
    tau_max: Option<f64>,
    /// Number of grid points
    #[arg(long, default_value_t = 200)]
    tau_steps: usize,
}

/// Rates are per year; a trailing `x` means a multiple of the path's
/// reference rate (the ansatz mean, or the constant rate), e.g. `0.5x`.
#[derive(Args)]
struct RateArgs {
    /// Discount rates d; `0.5x` means half the path's reference rate [default: valuation.discount_rate]
    #[arg(long = "d", value_delimiter = ',', allow_hyphen_values = true)]
    discount: Vec<String>,
    /// Market interest rates u; accepts `x` multiples like --d [default: leverage.market_rate]
    #[arg(long = "u", value_delimiter = ',', allow_hyphen_values = true)]
    market: Vec<String>,
    /// Leverage ratios L = K/E - 1 [default: leverage.leverage]
    #[arg(long = "L", value_delimiter = ',', allow_hyphen_values = true)]
    leverage: Vec<f64>,
}

#[derive(Clone, Copy, ValueEnum)]
enum ObjectiveKind {
    Rroc,
    Irr,
    Npv,
    Rroe,
    Omega,
}

struct Loaded {
    doc: ScenarioDocument,
    scenario: GrowthScenario,
}

fn load(path: &Path) -> Result<Loaded> {
    let text = fs::read_to_string(path).with_context(|| format!("reading {}", path.display()))?;
    let doc = parse_scenario(&text).with_context(|| format!("in {}", path.display()))?;
    let scenario = doc.scenario()?;
    Ok(Loaded { doc, scenario })
}

struct Rates {
    discount: Vec<f64>,
    market: Vec<f64>,
    leverage: Vec<f64>,
}

fn parse_rate(s: &str, reference: f64) -> Result<f64> {
    let s = s.trim();
    match s.strip_suffix(['x', 'X']) {
        Some(m) => Ok(m.trim().parse::<f64>().with_context(|| format!("bad rate `{s}`"))? * reference),
        None => s.parse::<f64>().with_context(|| format!("bad rate `{s}`")),
    }
}

impl RateArgs {
    fn resolve(&self, l: &Loaded) -> Result<Rates> {
        let reference = match l.scenario.path().reference_rate() {
            Some(r) => r,
            None => l.scenario.mean_rate()?,
        };
        let parse = |v: &[String]| v.iter().map(|s| parse_rate(s, reference)).collect::<Result<Vec<_>>>();
        let mut discount = parse(&self.discount)?;
        let mut market = parse(&self.market)?;
        let mut leverage = self.leverage.clone();
        if discount.is_empty() {
            discount.extend(l.doc.valuation.map(|v| v.discount_rate));
        }
        if market.is_empty() {
            market.extend(
                l.doc
                    .leverage
                    .map(|s| s.market_rate)
                    .or(l.doc.valuation.map(|v| v.market_rate)),
            );
        }
        if leverage.is_empty() {
            leverage.extend(l.doc.leverage.map(|s| s.leverage).or(l.doc.valuation.map(|v| v.leverage)));
        }
        Ok(Rates {
            discount,
            market,
            leverage,
        })
    }
}

impl GridArgs {
    fn resolve(&self, l: &Loaded) -> Result<TauGrid> {
        let max = self.tau_max.unwrap_or(l.doc.tau);
        let min = self.tau_min.unwrap_or(max / self.tau_steps.max(1) as f64);
        Ok(TauGrid::new(min, max, self.tau_steps)?)
    }
}

fn emit(text: &str, out: Option<&Path>) -> Result<()> {
    match out {
        Some(p) => fs::write(p, text).with_context(|| format!("writing {}", p.display())),
        None => {
            print!("{text}");
            Ok(())
        }
    }
}

fn cmd_sweep(
    scenario: &ScenarioArg,
    grid: &GridArgs,
    metrics: &[Metric],
    rates: &RateArgs,
    out: Option<&Path>,
) -> Result<()> {
    let l = load(&scenario.scenario)?;
    let r = rates.resolve(&l)?;
    let mut metrics = metrics.to_vec();
    metrics.sort();
    metrics.dedup();
    let config = SweepConfig {
        grid: grid.resolve(&l)?,
        metrics,
        discount_rates: r.discount,
        market_rates: r.market,
        leverages: r.leverage,
    };
    let result = sweep(&l.scenario, &config)?;
    emit(&result.to_csv()?, out)?;
    if let Some(p) = out {
        let side = p.with_extension("provenance.json");
        fs::write(&side, serde_json::to_string_pretty(&result.provenance)?)
            .with_context(|| format!("writing {}", side.display()))?;
    }
    Ok(())
}

fn cmd_optimize(
    scenario: &ScenarioArg,
    kind: ObjectiveKind,
    grid: &GridArgs,
    rates: &RateArgs,
    out: Option<&Path>,
) -> Result<()> {
    let l = load(&scenario.scenario)?;
    let r = rates.resolve(&l)?;
    let grid = grid.resolve(&l)?;
    let pairs = || {
        r.leverage
            .iter()
            .flat_map(|&lev| r.market.iter().map(move |&u| (lev, u)))
            .collect::<Vec<_>>()
    };
    let objectives: Vec<Objective> = match kind {
        ObjectiveKind::Rroc => vec![Objective::Rroc],
        ObjectiveKind::Irr => vec![Objective::Irr],
        ObjectiveKind::Npv => r
            .discount
            .iter()
            .map(|&d| Objective::Npv { discount_rate: d })
            .collect(),
        ObjectiveKind::Rroe => pairs()
            .into_iter()
            .map(|(leverage, market_rate)| Objective::Rroe {
                leverage,
                market_rate,
            })
            .collect(),
        ObjectiveKind::Omega => pairs()
            .into_iter()
            .map(|(leverage, market_rate)| Objective::Omega {
                leverage,
                market_rate,
            })
            .collect(),
    };
    if objectives.is_empty() {
        bail!("objective needs rate parameters: pass --d for npv, --L and --u for rroe/omega");
    }
    let columns: Vec<String> = ["objective", "tau_opt", "value", "rroc", "irr"]
        .iter()
        .map(|s| s.to_string())
        .collect();
    let mut rows = Vec::new();
    for obj in objectives {
        let rep = optimize(&l.scenario, obj, &grid).with_context(|| format!("optimizing {obj}"))?;
        rows.push(vec![
            Cell::Text(obj.to_string()),
            rep.tau.into(),
            rep.value.into(),
            rep.rroc.into(),
            rep.irr.map_or(Cell::Text(String::new()), Cell::Num),
        ]);
    }
    emit(&write_table(&columns, &rows)?, out)
}

fn cmd_irr(path: &Path) -> Result<()> {
    let text = fs::read_to_string(path).with_context(|| format!("reading {}", path.display()))?;
    let schedule = read_cash_flows(&text).with_context(|| format!("in {}", path.display()))?;
    let res = general_irr(&schedule)?;
    println!("base step: {}", res.base_step);
    println!("polynomial degree: {}", res.degree);
    println!("real roots: {}", res.all_real_roots.len());
    for (o, resid) in res.all_real_roots.iter().zip(&res.residuals) {
        println!("  o = {o:.12}  residual {resid:.3e}");
    }
    match res.principal_root {
        Some(o) => println!("principal root: {o:.12}"),
        None => println!("principal root: none"),
    }
    println!("complex roots: {}", res.complex_root_count);
    Ok(())
}

fn cmd_eval(scenario: &ScenarioArg, rates: &RateArgs) -> Result<()> {
    let l = load(&scenario.scenario)?;
    let r = rates.resolve(&l)?;
    let s = &l.scenario;
    let ev = s.expected_values()?;
    println!("tau: {}", s.rotation_length());
    println!("mean_rate: {:.12}", s.mean_rate()?);
    println!("profit_rate: {:.12}", ev.profit_rate);
    println!("capitalization: {:.12}", ev.capitalization);
    println!("rroc: {:.12}", ev.rroc);
    if s.is_investment_free() {
        println!("irr: {:.12}", growth_cycle_irr(s)?);
        for &d in &r.discount {
            println!("npv@d={d}: {:.12}", npv(s, d)?);
        }
    } else {
        let sched = capreturn::CashFlowSchedule::from_scenario(s)?;
        match general_irr(&sched)?.principal_root {
            Some(o) => println!("irr (cash basis): {o:.12}"),
            None => println!("irr (cash basis): none"),
        }
    }
    for &lev in &r.leverage {
        for &u in &r.market {
            println!("rroe@L={lev};u={u}: {:.12}", rroe(ev.rroc, lev, u)?);
            if s.is_investment_free() {
                match leveraged_discount_rate(s, lev, u) {
                    Ok(o) => println!("omega@L={lev};u={u}: {o:.12}"),
                    Err(e) => println!("omega@L={lev};u={u}: {e}"),
                }
                for &d in &r.discount {
                    println!("npv@d={d};L={lev};u={u}: {:.12}", leveraged_npv(s, d, u, lev)?);
                    if let Ok(ratio) = leverage_npv_ratio(s, d, u, lev) {
                        println!("npv_ratio@d={d};L={lev};u={u}: {:.12}", ratio.ratio);
                    }
                }
            }
        }
    }
    if let Some(estate) = l.doc.estate_spec()? {
        println!("estate_capitalization: {:.12}", estate.capitalization()?);
        println!("estate_rroc: {:.12}", estate.rroc()?);
        println!("estate_area_average_rate: {:.12}", estate.area_average_rate()?);
    }
    Ok(())
}

fn run(cli: Cli) -> Result<()> {
    match cli.command {
        Command::Sweep {
            scenario,
            grid,
            metrics,
            rates,
            out,
        } => cmd_sweep(&scenario, &grid, &metrics, &rates, out.as_deref()),
        Command::Optimize {
            scenario,
            objective,
            grid,
            rates,
            out,
        } => cmd_optimize(&scenario, objective, &grid, &rates, out.as_deref()),
        Command::Irr { cashflows } => cmd_irr(&cashflows),
        Command::Eval { scenario, rates } => cmd_eval(&scenario, &rates),
    }
}

fn main() -> ExitCode {
    match run(Cli::parse()) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e:#}");
            ExitCode::FAILURE
        }
    }
}
