//! Command-line front end.

mod parse;

use std::collections::BTreeMap;
use std::ffi::OsString;
use std::fs;
use std::io::Write;
use std::path::PathBuf;

use clap::{Parser, Subcommand, ValueEnum};
use num::traits::Zero;
use num::BigRational;
use serde_json::{json, Map, Value};

use crate::bridge::{boson_image, position_sector, verify_theorem, ConvergenceReport};
use crate::error::{Error, Result};
use crate::exact::{decimal_string, format_gaussian, format_rational, parse_rational};
use crate::moments::limit_moment;
use crate::spin::{
    dense_oracle_trace, normalized_trace_with, Arithmetic, SpinPolynomial, TraceOptions, TraceResult, TraceValue,
    DEFAULT_ORACLE_CAP,
};
use crate::thermal::{thermal_expect, ThermalState};
use crate::xy::{sweep, sweep_csv, validity_check, SweepPlan, XYParams, DEFAULT_PRECISION};

pub use parse::{parse_list, parse_polynomial, position_coefficients};

pub const DEFAULT_DIGITS: usize = 12;
pub const DEFAULT_MAX_L: u32 = 5;
/// Used by `xy` when no `--expr` is given.
pub const DEFAULT_XY_EXPR: &str = "S+*S- + S-*S+";

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum, Default)]
pub enum Format {
    #[default]
    Text,
    Json,
    Csv,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Subcommand)]
pub enum Command {
    /// 2^-N tr of a spin polynomial; each letter is divided by √N.
    Trace,
    /// Limit moments E[η^{2ℓ}] of the scaled collective spin.
    Moments,
    /// Spin traces against the thermal oscillator image.
    Verify,
    /// XY model: validity, partition function, effective temperature, expectations.
    Xy,
    /// Normal-ordered oscillator image of a S+/S- polynomial.
    NormalOrder,
    /// Irrep engine against the dense product-basis trace.
    Oracle,
}

impl Command {
    fn name(self) -> &'static str {
        match self {
            Command::Trace => "trace",
            Command::Moments => "moments",
            Command::Verify => "verify",
            Command::Xy => "xy",
            Command::NormalOrder => "normal-order",
            Command::Oracle => "oracle",
        }
    }
}

#[derive(Debug, Parser)]
#[command(name = "spinboson", version, about = "Collective spin traces and their oscillator counterparts")]
struct Args {
    #[command(subcommand)]
    command: Command,

    /// Polynomial in S+, S-, Sz, Sx, Sy, i with + - * / ^ and rational literals
    #[arg(long, global = true, allow_hyphen_values = true)]
    expr: Option<String>,
    /// Number of spin-1/2 sites
    #[arg(long, global = true)]
    n: Option<u32>,
    /// Comma-separated ascending site counts
    #[arg(long = "n-list", global = true)]
    n_list: Option<String>,
    /// XY coupling γ; comma-separated values sweep
    #[arg(long, global = true, allow_hyphen_values = true)]
    gamma: Option<String>,
    /// XY temperature kT; comma-separated values sweep
    #[arg(long, global = true, allow_hyphen_values = true)]
    kt: Option<String>,
    /// Largest ℓ in the moment table [default: 5]
    #[arg(long = "max-l", global = true)]
    max_l: Option<u32>,
    /// Decimal places in printed values [default: 12]
    #[arg(long, global = true)]
    digits: Option<usize>,
    /// Output format [default: text]
    #[arg(long, global = true, value_enum)]
    format: Option<Format>,
    /// Write output to this file instead of standard output
    #[arg(long, global = true)]
    out: Option<PathBuf>,
    /// Largest N accepted by the dense oracle [default: 14]
    #[arg(long = "oracle-cap", global = true)]
    oracle_cap: Option<u32>,
    /// Binary64 traces with compensated summation instead of exact arithmetic
    #[arg(long, global = true)]
    float: bool,
    /// Significant digits of the XY Boltzmann factors [default: 50]
    #[arg(long, global = true)]
    precision: Option<usize>,
    /// File of key=value lines using the flag names; flags take precedence
    #[arg(long, global = true)]
    config: Option<PathBuf>,
}

#[derive(Clone, Debug, PartialEq)]
pub struct RunConfig {
    pub command: Command,
    pub expr: Option<String>,
    pub n_values: Vec<u32>,
    pub gammas: Vec<BigRational>,
    pub kts: Vec<BigRational>,
    pub max_l: u32,
    pub digits: usize,
    pub format: Format,
    pub out: Option<PathBuf>,
    pub oracle_cap: u32,
    pub float: bool,
    pub precision: usize,
}

const CONFIG_KEYS: &[&str] = &[
    "expr",
    "n",
    "n-list",
    "gamma",
    "kt",
    "max-l",
    "digits",
    "format",
    "out",
    "oracle-cap",
    "float",
    "precision",
];

fn read_config(path: &PathBuf) -> Result<BTreeMap<String, String>> {
    let text = fs::read_to_string(path)
        .map_err(|e| Error::Domain(format!("cannot read config {}: {e}", path.display())))?;
    let mut map = BTreeMap::new();
    for (lineno, line) in text.lines().enumerate() {
        let line = line.trim();
        if line.is_empty() || line.starts_with('#') {
            continue;
        }
        let Some((k, v)) = line.split_once('=') else {
            return Err(Error::Domain(format!("config line {}: expected key=value", lineno + 1)));
        };
        let key = k.trim().replace('_', "-").to_lowercase();
        if !CONFIG_KEYS.contains(&key.as_str()) {
            return Err(Error::Domain(format!("config line {}: unknown key '{}'", lineno + 1, k.trim())));
        }
        map.insert(key, v.trim().to_string());
    }
    Ok(map)
}

fn parse_usize(key: &str, s: &str) -> Result<usize> {
    s.parse().map_err(|_| Error::Domain(format!("{key}: '{s}' is not a nonnegative integer")))
}

fn parse_bool(s: &str) -> Result<bool> {
    match s.to_lowercase().as_str() {
        "true" | "1" | "yes" | "on" => Ok(true),
        "false" | "0" | "no" | "off" => Ok(false),
        _ => Err(Error::Domain(format!("'{s}' is not a boolean"))),
    }
}

impl RunConfig {
    fn from_args(args: Args) -> Result<Self> {
        let file = match &args.config {
            Some(p) => read_config(p)?,
            None => BTreeMap::new(),
        };
        let pick = |flag: Option<String>, key: &str| flag.or_else(|| file.get(key).cloned());
        let expr = pick(args.expr, "expr");
        let n = pick(args.n.map(|v| v.to_string()), "n");
        let n_list = pick(args.n_list, "n-list");
        let n_values = match (n_list, n) {
            (Some(list), _) => parse_list(&list, parse::parse_count)?,
            (None, Some(n)) => vec![parse::parse_count(&n)?],
            (None, None) => Vec::new(),
        };
        let rationals = |s: Option<String>| -> Result<Vec<BigRational>> {
            s.map_or(Ok(Vec::new()), |s| parse_list(&s, parse_rational))
        };
        let gammas = rationals(pick(args.gamma, "gamma"))?;
        let kts = rationals(pick(args.kt, "kt"))?;
        let max_l = match pick(args.max_l.map(|v| v.to_string()), "max-l") {
            Some(s) => parse::parse_count(&s)?,
            None => DEFAULT_MAX_L,
        };
        let digits = match pick(args.digits.map(|v| v.to_string()), "digits") {
            Some(s) => parse_usize("digits", &s)?,
            None => DEFAULT_DIGITS,
        };
        let format = match (args.format, file.get("format")) {
            (Some(f), _) => f,
            (None, Some(s)) => Format::from_str(s, true).map_err(|_| Error::Domain(format!("unknown format '{s}'")))?,
            (None, None) => Format::Text,
        };
        let out = args.out.or_else(|| file.get("out").map(PathBuf::from));
        let oracle_cap = match pick(args.oracle_cap.map(|v| v.to_string()), "oracle-cap") {
            Some(s) => parse::parse_count(&s)?,
            None => DEFAULT_ORACLE_CAP,
        };
        let float = args.float || file.get("float").map(|s| parse_bool(s)).transpose()?.unwrap_or(false);
        let precision = match pick(args.precision.map(|v| v.to_string()), "precision") {
            Some(s) => parse_usize("precision", &s)?,
            None => DEFAULT_PRECISION,
        };
        if n_values.contains(&0) {
            return Err(Error::Domain("N must be at least 1".into()));
        }
        Ok(RunConfig {
            command: args.command,
            expr,
            n_values,
            gammas,
            kts,
            max_l,
            digits,
            format,
            out,
            oracle_cap,
            float,
            precision,
        })
    }

    fn polynomial(&self) -> Result<SpinPolynomial> {
        match &self.expr {
            Some(e) => parse_polynomial(e),
            None => Err(Error::Domain(format!("{} needs --expr", self.command.name()))),
        }
    }

    fn require_n(&self) -> Result<&[u32]> {
        if self.n_values.is_empty() {
            Err(Error::Domain(format!("{} needs --n or --n-list", self.command.name())))
        } else {
            Ok(&self.n_values)
        }
    }

    fn trace_options(&self) -> TraceOptions {
        TraceOptions {
            arithmetic: if self.float { Arithmetic::Float } else { Arithmetic::Exact },
            ..TraceOptions::default()
        }
    }

    fn inputs(&self) -> Value {
        let mut m = Map::new();
        if let Some(e) = &self.expr {
            m.insert("expr".into(), json!(e));
        }
        if !self.n_values.is_empty() {
            m.insert("n".into(), json!(self.n_values));
        }
        if !self.gammas.is_empty() {
            m.insert("gamma".into(), json!(self.gammas.iter().map(format_rational).collect::<Vec<_>>()));
        }
        if !self.kts.is_empty() {
            m.insert("kT".into(), json!(self.kts.iter().map(format_rational).collect::<Vec<_>>()));
        }
        m.insert("digits".into(), json!(self.digits));
        match self.command {
            Command::Moments => {
                m.insert("max_l".into(), json!(self.max_l));
            }
            Command::Oracle => {
                m.insert("oracle_cap".into(), json!(self.oracle_cap));
            }
            Command::Xy => {
                m.insert("precision".into(), json!(self.precision));
            }
            _ => {}
        }
        if self.float {
            m.insert("float".into(), json!(true));
        }
        Value::Object(m)
    }
}

/// Rows of named cells, rendered as text, JSON or CSV.
#[derive(Clone, Debug, Default)]
pub struct Table {
    pub columns: Vec<String>,
    pub rows: Vec<Vec<Value>>,
    /// Extra lines for text output and a `summary` object in JSON.
    pub summary: Vec<(String, Value)>,
    /// Replaces the generated CSV when a module has its own layout.
    pub csv: Option<String>,
}

fn cell_text(v: &Value) -> String {
    match v {
        Value::String(s) => s.clone(),
        Value::Null => String::new(),
        other => other.to_string(),
    }
}

impl Table {
    fn new(columns: &[&str]) -> Self {
        Table {
            columns: columns.iter().map(|c| c.to_string()).collect(),
            ..Table::default()
        }
    }

    fn render(&self, command: Command, inputs: Value, format: Format) -> String {
        match format {
            Format::Json => {
                let results: Vec<Value> = self
                    .rows
                    .iter()
                    .map(|r| {
                        let obj: Map<String, Value> = self.columns.iter().cloned().zip(r.iter().cloned()).collect();
                        Value::Object(obj)
                    })
                    .collect();
                let mut top = Map::new();
                top.insert("command".into(), json!(command.name()));
                top.insert("inputs".into(), inputs);
                top.insert("results".into(), Value::Array(results));
                if !self.summary.is_empty() {
                    top.insert("summary".into(), Value::Object(self.summary.iter().cloned().collect()));
                }
                let mut s = serde_json::to_string_pretty(&Value::Object(top)).expect("json");
                s.push('\n');
                s
            }
            Format::Csv => {
                if let Some(csv) = &self.csv {
                    return csv.clone();
                }
                let mut w = csv::Writer::from_writer(Vec::new());
                w.write_record(&self.columns).unwrap();
                for r in &self.rows {
                    w.write_record(r.iter().map(cell_text)).unwrap();
                }
                String::from_utf8(w.into_inner().unwrap()).unwrap()
            }
            Format::Text => {
                let cells: Vec<Vec<String>> = self.rows.iter().map(|r| r.iter().map(cell_text).collect()).collect();
                let widths: Vec<usize> = (0..self.columns.len())
                    .map(|i| {
                        cells
                            .iter()
                            .map(|r| r[i].chars().count())
                            .chain([self.columns[i].chars().count()])
                            .max()
                            .unwrap_or(0)
                    })
                    .collect();
                let line = |items: &[String]| {
                    let parts: Vec<String> = items
                        .iter()
                        .zip(&widths)
                        .map(|(s, w)| format!("{s:<w$}"))
                        .collect();
                    parts.join("  ").trim_end().to_string()
                };
                let mut out = String::new();
                if !self.columns.is_empty() {
                    out.push_str(&line(&self.columns));
                    out.push('\n');
                    for r in &cells {
                        out.push_str(&line(r));
                        out.push('\n');
                    }
                }
                for (k, v) in &self.summary {
                    out.push_str(&format!("{k}: {}\n", cell_text(v)));
                }
                out
            }
        }
    }
}

fn exact_text(t: &TraceResult) -> Value {
    match &t.value {
        TraceValue::Exact { rational, inv_sqrt_n } if inv_sqrt_n.is_zero() => json!(format_gaussian(rational)),
        TraceValue::Exact { rational, inv_sqrt_n } => json!(format!(
            "{} + ({})/sqrt({})",
            format_gaussian(rational),
            format_gaussian(inv_sqrt_n),
            t.n
        )),
        TraceValue::Float(_) => Value::Null,
    }
}

fn run_trace(cfg: &RunConfig) -> Result<Table> {
    let poly = cfg.polynomial()?;
    let opts = cfg.trace_options();
    let mut table = Table::new(&["N", "value", "exact"]);
    for &n in cfg.require_n()? {
        let t = normalized_trace_with(n, &poly, &opts)?;
        table.rows.push(vec![json!(n), json!(t.decimal(cfg.digits)), exact_text(&t)]);
    }
    Ok(table)
}

fn run_moments(cfg: &RunConfig) -> Result<Table> {
    let mut table = Table::new(&["l", "moment", "value"]);
    for l in 0..=cfg.max_l {
        let m = limit_moment(l);
        table
            .rows
            .push(vec![json!(l), json!(format_rational(&m)), json!(decimal_string(&m, cfg.digits))]);
    }
    Ok(table)
}

fn report_table(r: &ConvergenceReport) -> Table {
    let mut table = Table::new(&["N", "spin_value", "boson_value", "abs_error"]);
    for ((n, s), e) in r.n_values.iter().zip(&r.spin_values).zip(&r.abs_errors) {
        table
            .rows
            .push(vec![json!(n), json!(s), json!(r.boson_value), json!(format!("{e:e}"))]);
    }
    table.summary.push(("boson_exact".into(), json!(format_gaussian(&r.boson_exact))));
    table.summary.push((
        "fitted_rate".into(),
        r.fitted_rate.map_or(Value::Null, |v| json!(format!("{v:.4}"))),
    ));
    table.csv = Some(r.to_csv());
    table
}

fn run_verify(cfg: &RunConfig) -> Result<Table> {
    let poly = cfg.polynomial()?;
    let opts = cfg.trace_options();
    let ns = cfg.require_n()?;
    let report = match position_coefficients(&poly) {
        Some(coeffs) if poly.contains_letter(crate::spin::SpinLetter::Z) => {
            position_sector(&coeffs, ns, &opts, cfg.digits)?
        }
        _ => verify_theorem(&poly, ns, &opts, cfg.digits)?,
    };
    Ok(report_table(&report))
}

fn run_normal_order(cfg: &RunConfig) -> Result<Table> {
    let poly = cfg.polynomial()?;
    let form = boson_image(&poly)?;
    let mut table = Table::new(&["m", "n", "coefficient"]);
    for (&(m, n), c) in form.terms() {
        table.rows.push(vec![json!(m), json!(n), json!(format_gaussian(c))]);
    }
    table.summary.push(("normal_form".into(), json!(form.render())));
    let value = thermal_expect(&ThermalState::bosonization(), &form);
    table.summary.push(("thermal_expectation".into(), json!(format_gaussian(&value))));
    Ok(table)
}

fn run_oracle(cfg: &RunConfig) -> Result<Table> {
    let poly = cfg.polynomial()?;
    let opts = TraceOptions::default();
    let mut table = Table::new(&["N", "engine", "oracle", "match"]);
    let mut all = true;
    for &n in cfg.require_n()? {
        let engine = normalized_trace_with(n, &poly, &opts)?;
        let oracle = dense_oracle_trace(n, &poly, cfg.oracle_cap)?;
        let same = engine == oracle;
        all &= same;
        table.rows.push(vec![json!(n), exact_text(&engine), exact_text(&oracle), json!(same)]);
    }
    table.summary.push(("all_match".into(), json!(all)));
    Ok(table)
}

fn run_xy(cfg: &RunConfig) -> Result<Table> {
    if cfg.gammas.is_empty() || cfg.kts.is_empty() {
        return Err(Error::Domain("xy needs --gamma and --kt".into()));
    }
    let expr = cfg.expr.clone().unwrap_or_else(|| DEFAULT_XY_EXPR.to_string());
    let poly = parse_polynomial(&expr)?;
    let plan = SweepPlan {
        gammas: &cfg.gammas,
        kts: &cfg.kts,
        n_values: &cfg.n_values,
        poly: &poly,
        precision: cfg.precision,
        digits: cfg.digits,
    };
    let rows = sweep(&plan, &TraceOptions::default())?;
    let mut columns: Vec<String> = ["gamma", "kT", "g", "valid", "violations", "Z", "T_eff"]
        .iter()
        .map(|s| s.to_string())
        .collect();
    columns.extend(cfg.n_values.iter().map(|n| format!("expectation_spin({n})")));
    columns.push("expectation_boson".into());
    let mut table = Table {
        columns,
        csv: Some(sweep_csv(&rows)),
        ..Table::default()
    };
    let fmt = |v: Option<f64>| v.map_or(Value::Null, |x| json!(format!("{x:.prec$}", prec = cfg.digits)));
    for (row, (gamma, kt)) in rows
        .iter()
        .zip(cfg.gammas.iter().flat_map(|g| cfg.kts.iter().map(move |k| (g, k))))
    {
        let params = XYParams::new(gamma.clone(), kt.clone())?;
        let verdict = validity_check(&params);
        let mut cells = vec![
            json!(row.gamma),
            json!(row.kt),
            json!(row.g),
            json!(if row.valid { "pass" } else { "fail" }),
            json!(verdict.violations().join("; ")),
            fmt(row.z),
            fmt(row.t_eff),
        ];
        cells.extend(row.spin.iter().map(|(_, v)| v.clone().map_or(Value::Null, Value::String)));
        cells.push(row.boson.clone().map_or(Value::Null, Value::String));
        table.rows.push(cells);
    }
    Ok(table)
}

/// Runs a command and returns its rendered output.
pub fn execute(cfg: &RunConfig) -> Result<String> {
    let table = match cfg.command {
        Command::Trace => run_trace(cfg)?,
        Command::Moments => run_moments(cfg)?,
        Command::Verify => run_verify(cfg)?,
        Command::Xy => run_xy(cfg)?,
        Command::NormalOrder => run_normal_order(cfg)?,
        Command::Oracle => run_oracle(cfg)?,
    };
    Ok(table.render(cfg.command, cfg.inputs(), cfg.format))
}

pub fn parse_args<I, T>(args: I) -> std::result::Result<RunConfig, String>
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let args = Args::try_parse_from(args).map_err(|e| e.to_string())?;
    RunConfig::from_args(args).map_err(|e| e.to_string())
}

/// Writes output and returns the process exit code.
pub fn dispatch(cfg: &RunConfig) -> i32 {
    let result = execute(cfg).and_then(|text| match &cfg.out {
        Some(path) => fs::write(path, text)
            .map_err(|e| Error::Domain(format!("cannot write {}: {e}", path.display()))),
        None => std::io::stdout()
            .write_all(text.as_bytes())
            .map_err(|e| Error::Domain(format!("cannot write output: {e}"))),
    });
    match result {
        Ok(()) => 0,
        Err(e) => {
            eprintln!("error: {e}");
            e.exit_code()
        }
    }
}

/// Entry point shared by the binary: parse, run, report.
pub fn main_with_args<I, T>(args: I) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    match Args::try_parse_from(args) {
        Ok(args) => match RunConfig::from_args(args) {
            Ok(cfg) => dispatch(&cfg),
            Err(e) => {
                eprintln!("error: {e}");
                e.exit_code()
            }
        },
        Err(e) => {
            use clap::error::ErrorKind;
            if matches!(e.kind(), ErrorKind::DisplayHelp | ErrorKind::DisplayVersion) {
                print!("{e}");
                0
            } else {
                let text = e.to_string();
                eprintln!("{}", text.lines().next().unwrap_or("invalid arguments"));
                1
            }
        }
    }
}
