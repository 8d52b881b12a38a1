//! Scenario documents (JSON) and tabular output (CSV).
//!
//! A scenario document mirrors [`GrowthScenario`] plus optional valuation,
//! leverage and estate sections. Unknown keys are rejected at parse time;
//! every remaining invariant violation is collected with its key path.

use std::fmt;

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::error::Error;
use crate::estate::{AgeDensity, EstateSpec};
use crate::growth::{GrowthScenario, Investment, InvestmentSchedule};
use crate::irr::{CashFlow, CashFlowSchedule};
use crate::leverage::LeverageSpec;
use crate::path::ReturnPath;
use crate::quadrature::{Quadrature, DEFAULT_INTERVALS};
use crate::valuation::ValuationSpec;

pub const SCHEMA_VERSION: u32 = 1;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ScenarioDocument {
    #[serde(default = "default_version")]
    pub version: u32,
    pub initial_capital: f64,
    /// Rotation length in years.
    pub tau: f64,
    pub path: ReturnPath,
    #[serde(default)]
    pub investments: Vec<Investment>,
    #[serde(default = "default_intervals")]
    pub quadrature_intervals: usize,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub valuation: Option<ValuationSpec>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub leverage: Option<LeverageSpec>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub estate: Option<EstateSection>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct EstateSection {
    pub ages: AgeDensity,
}

fn default_version() -> u32 {
    SCHEMA_VERSION
}

fn default_intervals() -> usize {
    DEFAULT_INTERVALS
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Violation {
    pub key: String,
    pub message: String,
}

impl fmt::Display for Violation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}: {}", self.key, self.message)
    }
}

#[derive(Debug, Error)]
pub enum DocumentError {
    #[error("parse error at line {line}, column {column}: {message}")]
    Parse {
        line: usize,
        column: usize,
        message: String,
    },
    #[error("invalid document: {}", join(.0))]
    Validation(Vec<Violation>),
    #[error(transparent)]
    Model(#[from] Error),
}

fn join(v: &[Violation]) -> String {
    v.iter().map(|x| x.to_string()).collect::<Vec<_>>().join("; ")
}

impl DocumentError {
    pub fn violations(&self) -> &[Violation] {
        match self {
            DocumentError::Validation(v) => v,
            _ => &[],
        }
    }
}

/// Parses and validates a scenario document.
pub fn parse_scenario(text: &str) -> Result<ScenarioDocument, DocumentError> {
    let doc: ScenarioDocument = serde_json::from_str(text).map_err(|e| DocumentError::Parse {
        line: e.line(),
        column: e.column(),
        message: e.to_string(),
    })?;
    let violations = doc.violations();
    if violations.is_empty() {
        Ok(doc)
    } else {
        Err(DocumentError::Validation(violations))
    }
}

pub fn serialize_scenario(doc: &ScenarioDocument) -> String {
    serde_json::to_string_pretty(doc).expect("scenario documents serialize")
}

struct Checker {
    out: Vec<Violation>,
}

impl Checker {
    fn fail(&mut self, key: impl Into<String>, message: impl Into<String>) {
        self.out.push(Violation {
            key: key.into(),
            message: message.into(),
        });
    }

    fn positive(&mut self, key: &str, v: f64) {
        if !(v.is_finite() && v > 0.0) {
            self.fail(key, format!("must be > 0, got {v}"));
        }
    }

    fn finite(&mut self, key: &str, v: f64) {
        if !v.is_finite() {
            self.fail(key, format!("must be finite, got {v}"));
        }
    }

    fn path(&mut self, key: &str, path: &ReturnPath) {
        match path {
            ReturnPath::Constant { rate } => self.finite(&format!("{key}.rate"), *rate),
            ReturnPath::Ansatz {
                mean_rate,
                shape,
                full_cycle,
            } => {
                self.finite(&format!("{key}.mean_rate"), *mean_rate);
                self.finite(&format!("{key}.shape"), *shape);
                self.positive(&format!("{key}.full_cycle"), *full_cycle);
            }
            ReturnPath::Tabulated { knots } => {
                let k = format!("{key}.knots");
                if knots.len() < 2 {
                    self.fail(&k, "needs at least two knots");
                }
                if knots.iter().any(|(t, r)| !t.is_finite() || !r.is_finite()) {
                    self.fail(&k, "knots must be finite");
                }
                if let Some(i) = knots.windows(2).position(|w| w[1].0 <= w[0].0) {
                    self.fail(format!("{k}[{}]", i + 1), "knot times must be strictly increasing");
                }
            }
            ReturnPath::Reversed { inner, horizon } => {
                let before = self.out.len();
                self.positive(&format!("{key}.horizon"), *horizon);
                self.path(&format!("{key}.inner"), inner);
                if self.out.len() == before {
                    if let Err(e) = path.validate() {
                        self.fail(format!("{key}.horizon"), e.to_string());
                    }
                }
            }
        }
    }
}

impl ScenarioDocument {
    /// Minimal document with every default filled.
    pub fn new(initial_capital: f64, tau: f64, path: ReturnPath) -> Self {
        ScenarioDocument {
            version: SCHEMA_VERSION,
            initial_capital,
            tau,
            path,
            investments: Vec::new(),
            quadrature_intervals: DEFAULT_INTERVALS,
            valuation: None,
            leverage: None,
            estate: None,
        }
    }

    /// Document describing an existing scenario (no optional sections).
    pub fn from_scenario(scenario: &GrowthScenario) -> Self {
        ScenarioDocument {
            investments: scenario.investments().events().to_vec(),
            quadrature_intervals: scenario.quadrature().intervals,
            ..ScenarioDocument::new(
                scenario.initial_capital(),
                scenario.rotation_length(),
                scenario.path().clone(),
            )
        }
    }

    /// Every violated invariant, keyed by its path in the document.
    pub fn violations(&self) -> Vec<Violation> {
        let mut c = Checker { out: Vec::new() };
        if self.version != SCHEMA_VERSION {
            c.fail(
                "version",
                format!("unsupported schema version {} (expected {SCHEMA_VERSION})", self.version),
            );
        }
        c.positive("initial_capital", self.initial_capital);
        c.positive("tau", self.tau);
        let before = c.out.len();
        c.path("path", &self.path);
        if c.out.len() == before && self.tau.is_finite() && self.tau > 0.0 {
            let (lo, hi) = self.path.domain();
            if lo > 0.0 || self.tau > hi {
                c.fail("tau", format!("rotation [0, {}] leaves the path domain [{lo}, {hi}]", self.tau));
            }
        }
        for (i, e) in self.investments.iter().enumerate() {
            if !(e.time > 0.0 && e.time < self.tau) {
                c.fail(
                    format!("investments[{i}].time"),
                    format!("must lie strictly inside (0, tau), got {}", e.time),
                );
            }
            c.finite(&format!("investments[{i}].amount"), e.amount);
            if i > 0 && e.time <= self.investments[i - 1].time {
                c.fail(format!("investments[{i}].time"), "times must be strictly increasing");
            }
        }
        if self.quadrature_intervals == 0 {
            c.fail("quadrature_intervals", "must be >= 1");
        }
        if let Some(v) = &self.valuation {
            c.positive("valuation.discount_rate", v.discount_rate);
            c.finite("valuation.market_rate", v.market_rate);
            if !(v.leverage >= -1.0 && v.leverage.is_finite()) {
                c.fail("valuation.leverage", format!("must be >= -1, got {}", v.leverage));
            }
        }
        if let Some(l) = &self.leverage {
            if !(l.leverage >= -1.0 && l.leverage.is_finite()) {
                c.fail("leverage.leverage", format!("must be >= -1, got {}", l.leverage));
            }
            c.finite("leverage.market_rate", l.market_rate);
            if let Some(eq) = l.equity {
                if !(eq.is_finite() && eq > 0.0) {
                    c.fail("leverage.equity", format!("must be > 0, got {eq}"));
                } else if (self.initial_capital / eq - (l.leverage + 1.0)).abs() >= 1e-9 {
                    c.fail(
                        "leverage.equity",
                        format!(
                            "violates the leverage identity L + 1 = K / E: {} + 1 != {} / {eq}",
                            l.leverage, self.initial_capital
                        ),
                    );
                }
            }
        }
        if c.out.is_empty() {
            if let Some(es) = &self.estate {
                match self.scenario() {
                    Ok(site) => {
                        if let Err(e) = EstateSpec::new(site, es.ages.clone()) {
                            c.fail("estate.ages", e.to_string());
                        }
                    }
                    Err(e) => c.fail("estate", e.to_string()),
                }
            }
        }
        c.out
    }

    pub fn scenario(&self) -> Result<GrowthScenario, Error> {
        GrowthScenario::new(self.initial_capital, self.tau, self.path.clone())?
            .with_quadrature(Quadrature::new(self.quadrature_intervals)?)
            .with_investments(InvestmentSchedule::new(self.investments.clone())?)
    }

    pub fn estate_spec(&self) -> Result<Option<EstateSpec>, Error> {
        self.estate
            .as_ref()
            .map(|es| EstateSpec::new(self.scenario()?, es.ages.clone()))
            .transpose()
    }
}

/// A table cell.
#[derive(Debug, Clone, PartialEq)]
pub enum Cell {
    Num(f64),
    Text(String),
}

impl From<f64> for Cell {
    fn from(v: f64) -> Self {
        Cell::Num(v)
    }
}

impl From<&str> for Cell {
    fn from(v: &str) -> Self {
        Cell::Text(v.to_string())
    }
}

impl From<String> for Cell {
    fn from(v: String) -> Self {
        Cell::Text(v)
    }
}

impl fmt::Display for Cell {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Cell::Num(v) => f.write_str(&format_float(*v)),
            Cell::Text(s) => f.write_str(s),
        }
    }
}

/// `%.9g`-style formatting: 9 significant digits, trailing zeros trimmed.
pub fn format_float(x: f64) -> String {
    if x.is_nan() {
        return "NaN".into();
    }
    if x.is_infinite() {
        return if x > 0.0 { "inf".into() } else { "-inf".into() };
    }
    if x == 0.0 {
        return "0".into();
    }
    let sci = format!("{x:.8e}");
    let (mantissa, exp) = sci.split_once('e').expect("exponent form");
    let exp: i32 = exp.parse().expect("integer exponent");
    if !(-5..9).contains(&exp) {
        let mantissa = trim_zeros(mantissa);
        let sign = if exp < 0 { '-' } else { '+' };
        format!("{mantissa}e{sign}{:02}", exp.abs())
    } else {
        trim_zeros(&format!("{x:.*}", (8 - exp) as usize)).to_string()
    }
}

fn trim_zeros(s: &str) -> &str {
    if s.contains('.') {
        s.trim_end_matches('0').trim_end_matches('.')
    } else {
        s
    }
}

/// RFC 4180 CSV with a header row and `\n` line ends.
pub fn write_table(columns: &[String], rows: &[Vec<Cell>]) -> Result<String, Error> {
    if let Some(i) = rows.iter().position(|r| r.len() != columns.len()) {
        return Err(Error::InvalidArgument(format!(
            "row {i} has {} cells, header has {}",
            rows[i].len(),
            columns.len()
        )));
    }
    let mut w = csv::WriterBuilder::new()
        .terminator(csv::Terminator::Any(b'\n'))
        .from_writer(Vec::new());
    let io = |e: csv::Error| Error::InvalidArgument(e.to_string());
    w.write_record(columns).map_err(io)?;
    for row in rows {
        w.write_record(row.iter().map(|c| c.to_string())).map_err(io)?;
    }
    let bytes = w.into_inner().map_err(|e| Error::InvalidArgument(e.to_string()))?;
    Ok(String::from_utf8(bytes).expect("csv output is utf-8"))
}

/// Reads a `time,amount` CSV into a validated schedule.
pub fn read_cash_flows(text: &str) -> Result<CashFlowSchedule, DocumentError> {
    let mut rdr = csv::ReaderBuilder::new()
        .trim(csv::Trim::All)
        .comment(Some(b'#'))
        .from_reader(text.as_bytes());
    let parse_err = |line: usize, message: String| DocumentError::Parse {
        line,
        column: 0,
        message,
    };
    let headers = rdr
        .headers()
        .map_err(|e| parse_err(1, e.to_string()))?
        .clone();
    let find = |name: &str| {
        headers
            .iter()
            .position(|h| h.eq_ignore_ascii_case(name))
            .ok_or_else(|| parse_err(1, format!("missing column `{name}`")))
    };
    let (ti, ai) = (find("time")?, find("amount")?);
    let mut events = Vec::new();
    for rec in rdr.records() {
        let rec = rec.map_err(|e| {
            let line = e.position().map_or(0, |p| p.line() as usize);
            parse_err(line, e.to_string())
        })?;
        let line = rec.position().map_or(0, |p| p.line() as usize);
        let num = |i: usize, name: &str| -> Result<f64, DocumentError> {
            rec.get(i)
                .ok_or_else(|| parse_err(line, format!("missing `{name}`")))?
                .parse::<f64>()
                .map_err(|e| parse_err(line, format!("`{name}`: {e}")))
        };
        events.push(CashFlow {
            time: num(ti, "time")?,
            amount: num(ai, "amount")?,
        });
    }
    Ok(CashFlowSchedule::new(events)?)
}

#[cfg(test)]
mod tests {
    use super::*;

    const MINIMAL: &str = r#"{"initial_capital": 1.0, "tau": 10, "path": {"kind": "constant", "rate": 0.05}}"#;

    #[test]
    fn minimal_document_gets_defaults() {
        let doc = parse_scenario(MINIMAL).unwrap();
        assert_eq!(doc.version, 1);
        assert_eq!(doc.quadrature_intervals, 4096);
        assert!(doc.investments.is_empty());
        assert_eq!(doc, ScenarioDocument::new(1.0, 10.0, ReturnPath::Constant { rate: 0.05 }));
        assert!((doc.scenario().unwrap().rroc().unwrap() - 0.05).abs() < 1e-12);
    }

    #[test]
    fn negative_tau_names_key() {
        let text = MINIMAL.replace("\"tau\": 10", "\"tau\": -1");
        let err = parse_scenario(&text).unwrap_err();
        assert!(err.violations().iter().any(|v| v.key == "tau"), "{err}");
    }

    #[test]
    fn all_violations_reported() {
        let text = r#"{"initial_capital": 0, "tau": -1,
            "path": {"kind": "ansatz", "mean_rate": 0.05, "shape": 0.5, "full_cycle": 0},
            "investments": [{"time": 20, "amount": 1}]}"#;
        let err = parse_scenario(text).unwrap_err();
        let keys: Vec<_> = err.violations().iter().map(|v| v.key.as_str()).collect();
        for k in ["initial_capital", "tau", "path.full_cycle", "investments[0].time"] {
            assert!(keys.contains(&k), "missing {k} in {keys:?}");
        }
    }

    #[test]
    fn leverage_identity_checked() {
        // K = 2, L = 1 → E must be 1
        let ok = r#"{"initial_capital": 2, "tau": 10, "path": {"kind": "constant", "rate": 0.05},
            "leverage": {"leverage": 1, "market_rate": 0.03, "equity": 1}}"#;
        assert!(parse_scenario(ok).is_ok());
        let bad = ok.replace("\"equity\": 1", "\"equity\": 1.5");
        let err = parse_scenario(&bad).unwrap_err();
        let v = &err.violations()[0];
        assert_eq!(v.key, "leverage.equity");
        assert!(v.message.contains("L + 1 = K / E"));
    }

    #[test]
    fn syntax_and_unknown_keys_are_parse_errors() {
        match parse_scenario("{\n  \"tau\": ,\n}") {
            Err(DocumentError::Parse { line, .. }) => assert_eq!(line, 2),
            other => panic!("{other:?}"),
        }
        let text = MINIMAL.replace("\"tau\"", "\"extra\": 1, \"tau\"");
        assert!(matches!(parse_scenario(&text), Err(DocumentError::Parse { .. })));
    }

    #[test]
    fn tau_outside_path_domain() {
        let text = r#"{"initial_capital": 1, "tau": 120,
            "path": {"kind": "ansatz", "mean_rate": 0.05, "shape": 0.5, "full_cycle": 100}}"#;
        let err = parse_scenario(text).unwrap_err();
        assert_eq!(err.violations()[0].key, "tau");
    }

    #[test]
    fn estate_section_validated() {
        let text = r#"{"initial_capital": 1, "tau": 10, "path": {"kind": "constant", "rate": 0.05},
            "estate": {"ages": {"kind": "tabulated", "knots": [[0, 1], [12, 1]]}}}"#;
        let err = parse_scenario(text).unwrap_err();
        assert_eq!(err.violations()[0].key, "estate.ages");
        let ok = text.replace("[12, 1]", "[10, 1]");
        let doc = parse_scenario(&ok).unwrap();
        assert!(doc.estate_spec().unwrap().is_some());
    }

    #[test]
    fn float_formatting() {
        assert_eq!(format_float(0.0), "0");
        assert_eq!(format_float(1.0), "1");
        assert_eq!(format_float(0.1), "0.1");
        assert_eq!(format_float(1.0 / 3.0), "0.333333333");
        assert_eq!(format_float(-2.0 / 3.0), "-0.666666667");
        assert_eq!(format_float(123_456_789.0), "123456789");
        assert_eq!(format_float(1_234_567_890.0), "1.23456789e+09");
        assert_eq!(format_float(1.5e-7), "1.5e-07");
        assert_eq!(format_float(0.000_123), "0.000123");
        assert_eq!(format_float(9.999_999_999_9), "10");
    }

    #[test]
    fn table_shapes() {
        let cols = vec!["a".to_string(), "b".to_string()];
        let t = write_table(&cols, &[vec![1.0.into(), 0.5.into()]]).unwrap();
        assert_eq!(t, "a,b\n1,0.5\n");
        let cols3: Vec<String> = ["x", "y", "z"].iter().map(|s| s.to_string()).collect();
        assert_eq!(write_table(&cols3, &[]).unwrap(), "x,y,z\n");
        assert!(write_table(&cols, &[vec![1.0.into()]]).is_err());
        let quoted = write_table(&["p,q".to_string()], &[vec!["say \"hi\"".into()]]).unwrap();
        assert_eq!(quoted, "\"p,q\"\n\"say \"\"hi\"\"\"\n");
    }

    #[test]
    fn table_is_deterministic() {
        let cols = vec!["t".to_string(), "v".to_string()];
        let rows: Vec<Vec<Cell>> = (0..50).map(|i| vec![(i as f64).into(), (1.0 / (i as f64 + 1.0)).into()]).collect();
        assert_eq!(write_table(&cols, &rows).unwrap(), write_table(&cols, &rows).unwrap());
    }

    #[test]
    fn cash_flow_csv() {
        let s = read_cash_flows("time,amount\n0,-1\n# comment\n1, 2.3\n2,-1.32\n").unwrap();
        assert_eq!(s.events().len(), 3);
        assert!(matches!(read_cash_flows("time,amount\n0,1\n1,2\n"), Err(DocumentError::Model(Error::NoRoot))));
        match read_cash_flows("time,amount\n0,-1\n1,abc\n") {
            Err(DocumentError::Parse { line, .. }) => assert_eq!(line, 3),
            other => panic!("{other:?}"),
        }
        assert!(read_cash_flows("when,amount\n0,-1\n1,2\n").is_err());
    }
}
