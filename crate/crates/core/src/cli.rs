//! Command-line front end.
//!
//! Every subcommand emits one [`OutputRecord`] as JSON (sorted keys, 17
//! significant digits) or as CSV. Exit codes: 0 success, 1 invalid input,
//! 2 numerical non-convergence, 3 invariant violation.

use std::collections::BTreeMap;
use std::io::Write;
use std::path::PathBuf;
use std::time::Instant;

use clap::{Parser, Subcommand, ValueEnum};
use serde::Serialize;
use serde_json::{Number, Value};

use crate::asymptotics::{verify_constant_relations_with, AsymptoticConfig};
use crate::error::Error;
use crate::fmt::sig17;
use crate::interpolation::{half_index_delta, half_index_values, HalfIndexRoute};
use crate::products::{log_product, parse_decimal, product, ProductKind, ProductParams};
use crate::quadrature::{
    beta_integral, beta_integral_with, BetaIntegral, GeneralBetaSpec, Route, TanhSinhConfig,
};
use crate::verify;
use crate::wallis::{converge, general_ratio_partial, ProductSource};

pub const EXIT_OK: i32 = 0;
pub const EXIT_VALIDATION: i32 = 1;
pub const EXIT_CONVERGENCE: i32 = 2;
pub const EXIT_INVARIANT: i32 = 3;

#[derive(Debug, Parser)]
#[command(
    name = "stepprod",
    version,
    about = "Stepped products, half-index interpolation and Euler-Maclaurin constants"
)]
struct Cli {
    /// Output format.
    #[arg(long, value_enum, default_value_t = Format::Json, global = true)]
    format: Format,

    /// Replaces the default tolerance of every residual check.
    #[arg(long, global = true)]
    tolerance: Option<f64>,

    /// Seed for randomized verification grids; 0 keeps the fixed grid.
    #[arg(long, default_value_t = 0, global = true)]
    seed: u64,

    /// Record wall-clock time in `elapsed_ms` (otherwise 0, keeping output reproducible).
    #[arg(long, global = true)]
    timing: bool,

    #[command(subcommand)]
    command: Command,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
enum Format {
    Json,
    Csv,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
enum Form {
    Gamma,
    Delta,
    Theta,
}

impl From<Form> for ProductKind {
    fn from(f: Form) -> Self {
        match f {
            Form::Gamma => ProductKind::Gamma,
            Form::Delta => ProductKind::Delta,
            Form::Theta => ProductKind::Theta,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
enum InterpRoute {
    Quad,
    Oracle,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
enum QuadRoute {
    Transformed,
    Closed,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
enum InfiniteProduct {
    Wallis,
    Kk,
}

#[derive(Debug, Subcommand)]
enum Command {
    /// Finite stepped product.
    Product {
        #[arg(long, value_enum)]
        form: Form,
        #[arg(long)]
        a: String,
        #[arg(long)]
        b: String,
        #[arg(long)]
        n: u64,
        /// Report the natural log instead of the product.
        #[arg(long)]
        log: bool,
    },
    /// Half-index values k, Θ:½ and Γ:½.
    Interpolate {
        #[arg(long)]
        a: String,
        #[arg(long)]
        b: String,
        #[arg(long, value_enum, default_value_t = InterpRoute::Quad)]
        route: InterpRoute,
    },
    /// Convergence of the Wallis-type product (or the k² product).
    Wallis {
        #[arg(long)]
        a: String,
        #[arg(long)]
        b: String,
        #[arg(long, value_delimiter = ',', required = true)]
        schedule: Vec<u64>,
        #[arg(long, value_enum, default_value_t = InfiniteProduct::Wallis)]
        product: InfiniteProduct,
    },
    /// Four-parameter product against its quadrature ratio.
    GeneralProduct {
        #[arg(long)]
        p: String,
        #[arg(long)]
        q: String,
        #[arg(long)]
        m: String,
        #[arg(long)]
        n: String,
        #[arg(long)]
        terms: u64,
    },
    /// Beta-type integral of x^(p-1) (1-x^n)^(m/n-1) over [0, 1].
    Quadrature {
        #[arg(long)]
        p: String,
        #[arg(long)]
        m: String,
        #[arg(long)]
        n: String,
        #[arg(long, value_enum, default_value_t = QuadRoute::Transformed)]
        route: QuadRoute,
        /// Evaluation budget of the transformed route.
        #[arg(long, default_value_t = 1 << 13)]
        budget: u64,
    },
    /// Constants A, B, C and their relations.
    Constants {
        #[arg(long)]
        a: String,
        #[arg(long)]
        b: String,
        #[arg(long, default_value_t = crate::asymptotics::DEFAULT_ORDER)]
        order: usize,
        #[arg(long, default_value_t = crate::asymptotics::DEFAULT_X_REF)]
        xref: u64,
    },
    /// Full invariant suite over a grid of (a, b).
    Verify {
        /// `default` or a file of `a,b` lines.
        #[arg(long, default_value = "default")]
        grid: String,
    },
}

/// One run of one subcommand.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct OutputRecord {
    pub command: String,
    pub elapsed_ms: u64,
    pub inputs: BTreeMap<String, Value>,
    pub outputs: BTreeMap<String, Value>,
    pub residuals: BTreeMap<String, Value>,
    /// Replaces the generic CSV rendering when set.
    #[serde(skip)]
    csv_table: Option<String>,
}

impl OutputRecord {
    fn new(command: &str) -> Self {
        Self {
            command: command.to_string(),
            elapsed_ms: 0,
            inputs: BTreeMap::new(),
            outputs: BTreeMap::new(),
            residuals: BTreeMap::new(),
            csv_table: None,
        }
    }

    fn input(&mut self, key: &str, value: impl Serialize) -> &mut Self {
        self.inputs.insert(key.to_string(), to_value(value));
        self
    }

    fn output(&mut self, key: &str, value: impl Serialize) -> &mut Self {
        self.outputs.insert(key.to_string(), to_value(value));
        self
    }

    fn residual(&mut self, key: &str, value: f64) -> &mut Self {
        self.residuals.insert(key.to_string(), to_value(value));
        self
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(&to_value(self)).expect("records always serialize")
    }

    /// `section,key,value` rows; nested keys are joined with `.`.
    pub fn to_csv(&self) -> String {
        let mut rows = vec!["section,key,value".to_string()];
        rows.push(format!("command,command,{}", self.command));
        rows.push(format!("elapsed_ms,elapsed_ms,{}", self.elapsed_ms));
        for (section, map) in [
            ("inputs", &self.inputs),
            ("outputs", &self.outputs),
            ("residuals", &self.residuals),
        ] {
            for (key, value) in map {
                flatten(section, key, value, &mut rows);
            }
        }
        rows.join("\n") + "\n"
    }
}

fn flatten(section: &str, key: &str, value: &Value, rows: &mut Vec<String>) {
    match value {
        Value::Object(map) => {
            for (k, v) in map {
                flatten(section, &format!("{key}.{k}"), v, rows);
            }
        }
        Value::Array(items) => {
            for (i, v) in items.iter().enumerate() {
                flatten(section, &format!("{key}.{i}"), v, rows);
            }
        }
        Value::String(s) => rows.push(format!("{section},{key},{s}")),
        other => rows.push(format!("{section},{key},{other}")),
    }
}

/// Serializes and rewrites every float with 17 significant digits.
fn to_value(value: impl Serialize) -> Value {
    fn fix(v: Value) -> Value {
        match v {
            Value::Number(n) if n.is_f64() => {
                let x = n.as_f64().expect("checked is_f64");
                serde_json::from_str::<Number>(&sig17(x))
                    .map(Value::Number)
                    .unwrap_or(Value::Null)
            }
            Value::Array(items) => Value::Array(items.into_iter().map(fix).collect()),
            Value::Object(map) => Value::Object(map.into_iter().map(|(k, v)| (k, fix(v))).collect()),
            other => other,
        }
    }
    fix(serde_json::to_value(value).unwrap_or(Value::Null))
}

#[derive(Debug)]
enum Failure {
    Library(Error),
    Invariant(Box<OutputRecord>),
}

impl From<Error> for Failure {
    fn from(e: Error) -> Self {
        Failure::Library(e)
    }
}

fn exit_code(e: &Error) -> i32 {
    match e {
        Error::Validation(_) | Error::Domain(_) | Error::Range(_) => EXIT_VALIDATION,
        Error::Convergence { .. } => EXIT_CONVERGENCE,
        Error::Integrity { .. } => EXIT_INVARIANT,
    }
}

fn params(a: &str, b: &str) -> Result<ProductParams, Error> {
    ProductParams::parse(a, b)
}

fn execute(cli: &Cli) -> Result<OutputRecord, Failure> {
    match &cli.command {
        Command::Product { form, a, b, n, log } => {
            let p = params(a, b)?;
            let kind = ProductKind::from(*form);
            let mut rec = OutputRecord::new("product");
            rec.input("form", kind)
                .input("a", p.a())
                .input("b", p.b())
                .input("n", n)
                .input("log", log);
            if *log {
                rec.output("log_value", log_product(kind, p, *n)?.log_value);
            } else {
                rec.output("value", product(kind, p, *n)?);
            }
            Ok(rec)
        }
        Command::Interpolate { a, b, route } => {
            let p = params(a, b)?;
            let route = match route {
                InterpRoute::Quad => HalfIndexRoute::QuadratureRatio,
                InterpRoute::Oracle => HalfIndexRoute::GammaOracle,
            };
            let v = half_index_values(p, route)?;
            let other = match route {
                HalfIndexRoute::QuadratureRatio => HalfIndexRoute::GammaOracle,
                HalfIndexRoute::GammaOracle => HalfIndexRoute::QuadratureRatio,
            };
            let k_other = half_index_delta(p, other)?;
            let mut rec = OutputRecord::new("interpolate");
            rec.input("a", p.a()).input("b", p.b()).input("route", route);
            rec.output("k", v.k)
                .output("theta_half", v.theta_half)
                .output("gamma_half", v.gamma_half);
            rec.residual("k_theta_half_minus_a", (v.k * v.theta_half - p.a()).abs() / p.a());
            rec.residual("k_route_gap", (v.k - k_other).abs() / v.k);
            Ok(rec)
        }
        Command::Wallis {
            a,
            b,
            schedule,
            product,
        } => {
            let p = params(a, b)?;
            let source = match product {
                InfiniteProduct::Wallis => ProductSource::Wallis(p),
                InfiniteProduct::Kk => ProductSource::Kk(p),
            };
            let report = converge(source, schedule)?;
            let mut rec = OutputRecord::new("wallis");
            rec.input("a", p.a())
                .input("b", p.b())
                .input("schedule", schedule);
            rec.input(
                "product",
                if *product == InfiniteProduct::Wallis {
                    "wallis"
                } else {
                    "kk"
                },
            );
            rec.residual("envelope_constant", report.envelope_constant);
            if let Some(rate) = report.fitted_rate {
                rec.residual("fitted_rate", rate);
            }
            rec.output("report", &report);
            rec.csv_table = Some(report.to_csv());
            Ok(rec)
        }
        Command::GeneralProduct { p, q, m, n, terms } => {
            let spec = GeneralBetaSpec::new(
                parse_decimal(p)?,
                parse_decimal(q)?,
                parse_decimal(m)?,
                parse_decimal(n)?,
            )?;
            let partial = general_ratio_partial(&spec, *terms)?;
            let num = beta_integral(&spec.numerator(), Route::Transformed)?;
            let den = beta_integral(&spec.denominator(), Route::Transformed)?;
            let reference = num.value / den.value;
            let mut rec = OutputRecord::new("general-product");
            rec.input("p", spec.p)
                .input("q", spec.q)
                .input("m", spec.m)
                .input("n", spec.n)
                .input("terms", terms);
            rec.output("partial", partial).output("reference", reference);
            rec.residual("abs_error", (partial - reference).abs());
            Ok(rec)
        }
        Command::Quadrature {
            p,
            m,
            n,
            route,
            budget,
        } => {
            let integral = BetaIntegral::new(parse_decimal(p)?, parse_decimal(m)?, parse_decimal(n)?)?;
            let config = TanhSinhConfig {
                max_evaluations: *budget,
                ..TanhSinhConfig::default()
            };
            let (route, other) = match route {
                QuadRoute::Transformed => (Route::Transformed, Route::ClosedForm),
                QuadRoute::Closed => (Route::ClosedForm, Route::Transformed),
            };
            let result = beta_integral_with(&integral, route, &config)?;
            let check = beta_integral_with(&integral, other, &config)?;
            let mut rec = OutputRecord::new("quadrature");
            rec.input("p", integral.p())
                .input("m", integral.m())
                .input("n", integral.n())
                .input("route", route);
            rec.output("value", result.value)
                .output("error_estimate", result.error_estimate)
                .output("evaluations", result.evaluations)
                .output("route", result.route);
            rec.residual(
                "route_gap",
                (result.value - check.value).abs() / check.value.abs(),
            );
            Ok(rec)
        }
        Command::Constants { a, b, order, xref } => {
            let p = params(a, b)?;
            let mut config = AsymptoticConfig {
                order: *order,
                x_ref: *xref,
                ..AsymptoticConfig::default()
            };
            if let Some(t) = cli.tolerance {
                config.relation_tolerance = t;
                config.provenance_tolerance = t;
            }
            let c = verify_constant_relations_with(p, &config)?;
            let mut rec = OutputRecord::new("constants");
            rec.input("a", p.a())
                .input("b", p.b())
                .input("order", order)
                .input("xref", xref);
            rec.output("A", c.a)
                .output("B", c.b)
                .output("C", c.c)
                .output("k", c.k);
            rec.output("closed_form", c.closed_form);
            for (name, r) in c.residuals.named() {
                rec.residual(name, r);
            }
            rec.residual("provenance_gap", c.provenance_gap);
            Ok(rec)
        }
        Command::Verify { grid } => {
            let points = if grid == "default" {
                if cli.seed == 0 {
                    verify::default_grid()
                } else {
                    verify::random_grid(cli.seed)
                }
            } else {
                verify::load_grid(&PathBuf::from(grid))?
            };
            let criteria = verify::run_all(&points, cli.tolerance)?;
            let mut rec = OutputRecord::new("verify");
            rec.input("grid", grid)
                .input("seed", cli.seed)
                .input("points", points.len());
            if let Some(t) = cli.tolerance {
                rec.input("tolerance", t);
            }
            let all_passed = criteria.iter().all(|c| c.passed);
            for c in &criteria {
                rec.residual(
                    &format!("{:02}_{}", c.id, c.name.replace(' ', "_")),
                    c.max_residual,
                );
            }
            rec.output("criteria", &criteria).output("passed", all_passed);
            if all_passed {
                Ok(rec)
            } else {
                Err(Failure::Invariant(Box::new(rec)))
            }
        }
    }
}

fn render(rec: &OutputRecord, format: Format) -> String {
    match format {
        Format::Csv => rec.csv_table.clone().unwrap_or_else(|| rec.to_csv()),
        Format::Json => rec.to_json() + "\n",
    }
}

/// Parses `args` (including the program name), runs the subcommand and writes
/// the record to `out` and diagnostics to `err`. Returns the exit code.
pub fn run<I, T>(args: I, out: &mut dyn Write, err: &mut dyn Write) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<std::ffi::OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(cli) => cli,
        Err(e) => {
            use clap::error::ErrorKind;
            return match e.kind() {
                ErrorKind::DisplayHelp | ErrorKind::DisplayVersion => {
                    let _ = write!(out, "{e}");
                    EXIT_OK
                }
                _ => {
                    let _ = write!(err, "{e}");
                    EXIT_VALIDATION
                }
            };
        }
    };

    let start = Instant::now();
    let stamp = |mut rec: OutputRecord| {
        if cli.timing {
            rec.elapsed_ms = start.elapsed().as_millis() as u64;
        }
        rec
    };
    match execute(&cli) {
        Ok(rec) => {
            let _ = out.write_all(render(&stamp(rec), cli.format).as_bytes());
            EXIT_OK
        }
        Err(Failure::Invariant(rec)) => {
            let _ = out.write_all(render(&stamp(*rec), cli.format).as_bytes());
            let _ = writeln!(err, "invariant violation: at least one criterion failed");
            EXIT_INVARIANT
        }
        Err(Failure::Library(e)) => {
            let _ = writeln!(err, "error: {e}");
            exit_code(&e)
        }
    }
}
