//! Command-line front end.

use std::fs::File;
use std::io::{self, BufWriter, Write};
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Parser, Subcommand, ValueEnum};

use crate::diagonalize::{
    approximate_radius, count_caterpillar_eigenvalues, count_eigenvalues, default_radius_bracket,
    iterations_for_target, RadiusEstimate,
};
use crate::error::Error;
use crate::limits::{laplacian_closed_form, margin_f, s_star, tau0};
use crate::properties::{sweep_shared, summarize, default_tolerance, PropertyId, TreeSource};
use crate::recurrence::{classify_orbit, RecurrenceParams};
use crate::scalar::{PrecisionContext, Scalar, DEFAULT_DIGITS, DIGITS_ENV};
use crate::shearer::{
    convergence_report, epsilon_k, generate_auto, ReportRow, RunSpec, SChoice,
};
use crate::tree::{Caterpillar, Tree};

/// Working precision used by `reproduce lam2025` when none is given.
pub const LAM2025_DIGITS: u32 = 250;
/// Counts shown before and after the `..` marker in abbreviated cells.
const COUNTS_HEAD: usize = 6;
const COUNTS_TAIL: usize = 3;

#[derive(Debug, thiserror::Error)]
pub enum CliError {
    #[error(transparent)]
    Lib(#[from] Error),
    #[error("{0}")]
    Usage(String),
    #[error("{0} check(s) outside tolerance")]
    Tolerance(usize),
    #[error(transparent)]
    Json(#[from] serde_json::Error),
}

impl From<io::Error> for CliError {
    fn from(e: io::Error) -> Self {
        CliError::Lib(Error::Io(e))
    }
}

impl From<csv::Error> for CliError {
    fn from(e: csv::Error) -> Self {
        CliError::Lib(Error::Csv(e))
    }
}

impl CliError {
    pub fn exit_code(&self) -> u8 {
        match self {
            CliError::Tolerance(_) => 1,
            CliError::Usage(_) => 2,
            CliError::Json(_) => 1,
            CliError::Lib(e) => match e {
                Error::Precision { .. } => 3,
                Error::Parse(_)
                | Error::Domain(_)
                | Error::InvalidBracket(_)
                | Error::NotAdapted { .. }
                | Error::Pole(_)
                | Error::Degenerate(_)
                | Error::TooLarge { .. }
                | Error::InvalidRun(_)
                | Error::NullSet { .. } => 2,
                _ => 1,
            },
        }
    }
}

type CliResult<T> = std::result::Result<T, CliError>;

#[derive(Debug, Parser)]
#[command(name = "dlap", version, about = "Spectral radii and limit points of deformed Laplacians of trees")]
pub struct Cli {
    /// Working precision in significant decimal digits.
    #[arg(long, global = true, env = DIGITS_ENV)]
    digits: Option<u32>,

    /// Significant digits printed for each value.
    #[arg(long, global = true, default_value_t = 15)]
    print_digits: usize,

    /// Emit CSV, to FILE when given, otherwise (or with `-`) to stdout.
    /// Without a file, put the flag after the subcommand's arguments.
    #[arg(long, global = true, num_args = 0..=1, value_name = "FILE")]
    csv: Option<Option<PathBuf>>,

    /// Emit JSON to stdout.
    #[arg(long, global = true, conflicts_with = "csv")]
    json: bool,

    #[command(subcommand)]
    command: Command,
}

#[derive(Debug, Subcommand)]
enum Command {
    /// Bracket the spectral radius of a caterpillar or tree by bisection.
    Rho {
        #[command(flatten)]
        target: TargetArgs,
        /// Deformation parameter.
        #[arg(long, allow_hyphen_values = true)]
        s: String,
        /// Lower end A of the starting bracket.
        #[arg(long, allow_hyphen_values = true)]
        lo: Option<String>,
        /// Upper end B of the starting bracket.
        #[arg(long, allow_hyphen_values = true)]
        hi: Option<String>,
        /// Decimal places of absolute accuracy.
        #[arg(long, default_value_t = 30, conflicts_with = "iterations")]
        target_digits: u32,
        /// Exact number of bisection steps.
        #[arg(long)]
        iterations: Option<u32>,
    },
    /// Count eigenvalues above, below and at a point.
    Locate {
        #[command(flatten)]
        target: TargetArgs,
        /// Deformation parameter.
        #[arg(long, allow_hyphen_values = true)]
        s: String,
        /// Point compared against the eigenvalues.
        #[arg(long, allow_hyphen_values = true)]
        point: String,
    },
    /// Recurrence parameters and an optional orbit.
    Recurrence {
        /// Deformation parameter.
        #[arg(long, allow_hyphen_values = true)]
        s: String,
        /// Target value lambda.
        #[arg(long)]
        lambda: String,
        /// Starting value of the orbit.
        #[arg(long, allow_hyphen_values = true)]
        orbit: Option<String>,
        /// Orbit length.
        #[arg(long, default_value_t = 50)]
        steps: usize,
    },
    /// Generate a Shearer caterpillar and optionally a convergence report.
    Shearer {
        /// Target limit point, greater than 1.
        #[arg(long)]
        lambda: String,
        /// A value, `auto` (s*/2), `star` (s*) or `star/N`.
        #[arg(long, allow_hyphen_values = true)]
        s: String,
        /// Number of spine vertices.
        #[arg(long)]
        k: usize,
        /// Comma-separated k values for a convergence table.
        #[arg(long, value_delimiter = ',')]
        report: Option<Vec<usize>>,
        /// Significant digits of the error resolved in reports.
        #[arg(long, default_value_t = 15)]
        target_digits: u32,
        /// Also bracket lambda - rho by the nested roots epsilon_j.
        #[arg(long)]
        epsilon: bool,
        /// Write every count of every row to FILE.
        #[arg(long, value_name = "FILE")]
        counts_file: Option<PathBuf>,
    },
    /// Limit of the spectral radius of T_{1,n,n}.
    Tau0 {
        /// Deformation parameter.
        #[arg(long, allow_hyphen_values = true)]
        s: String,
    },
    /// Largest s for which every value at least lambda is a limit point.
    Sstar {
        /// Target value, greater than 1.
        #[arg(long)]
        lambda: String,
    },
    /// tau0 over a list of s values.
    LimitsTable {
        /// Comma-separated s values.
        #[arg(long, default_value = TAU0_S_LIST)]
        s_list: String,
    },
    /// Check spectral properties over generated trees.
    Verify {
        /// `all` or a comma-separated list of property names.
        #[arg(long, default_value = "all")]
        props: String,
        /// Exhaustive enumeration up to this many vertices.
        #[arg(long, default_value_t = 8)]
        max_n: usize,
        /// Comma-separated s values checked on every tree.
        #[arg(long, default_value = "-1.5,-1,-0.9,-0.3,0.3,0.9,1,1.5", allow_hyphen_values = true)]
        s_grid: String,
        /// Additional random trees.
        #[arg(long, default_value_t = 0)]
        random: usize,
        /// Largest random tree.
        #[arg(long, default_value_t = 12)]
        random_max_n: usize,
        /// Seed for the random trees.
        #[arg(long, default_value_t = 1)]
        seed: u64,
        /// Print every report, not only violations and the summary.
        #[arg(long)]
        all: bool,
    },
    /// Reproduce a published table and check it against its printed values.
    Reproduce {
        /// Table to reproduce.
        table: TableId,
        /// Significant digits of each error.
        #[arg(long, default_value_t = 15)]
        target_digits: u32,
        /// Write every count of every row to FILE.
        #[arg(long, value_name = "FILE")]
        counts_file: Option<PathBuf>,
    },
}

#[derive(Debug, clap::Args)]
#[group(required = true, multiple = false)]
struct TargetArgs {
    /// Caterpillar counts, e.g. "[3,1,4]".
    #[arg(long)]
    caterpillar: Option<String>,
    /// Tree file with `edge u v` lines.
    #[arg(long)]
    tree: Option<PathBuf>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum TableId {
    /// tau0 over the standard s values
    #[value(name = "tau0_table")]
    Tau0Table,
    /// lambda = 1.5, s = s*/2
    #[value(name = "lam1_5_half")]
    Lam1_5Half,
    /// lambda = 1.5, s = s*
    #[value(name = "lam1_5_star")]
    Lam1_5Star,
    /// lambda = 5.4, s = s*/2
    #[value(name = "lam5_4_half")]
    Lam5_4Half,
    /// lambda = 5.4, k = 150, s near 1
    #[value(name = "lam5_4_near1")]
    Lam5_4Near1,
    /// lambda = 2025, s = s*/2, k = 150
    #[value(name = "lam2025")]
    Lam2025,
}

pub const TAU0_S_LIST: &str = "0.001,0.01,0.1,0.2,0.3,0.4,0.5,0.6,0.7,0.8,0.9,1.0,5,10";

/// Published `tau0` values.
pub const TAU0_TABLE: [(&str, &str); 14] = [
    ("0.001", "1.002059342"),
    ("0.01", "1.020698941"),
    ("0.1", "1.217675873"),
    ("0.2", "1.459682287"),
    ("0.3", "1.726955383"),
    ("0.4", "2.020441181"),
    ("0.5", "2.341081806"),
    ("0.6", "2.689803637"),
    ("0.7", "3.067507378"),
    ("0.8", "3.475060020"),
    ("0.9", "3.913288615"),
    ("1.0", "4.382975768"),
    ("5", "53.36963067"),
    ("10", "203.4647577"),
];

/// `5e-9`, or half a unit in the last printed place when the value is
/// printed with fewer than nine decimals.
pub fn tau0_tolerance(ctx: &PrecisionContext, printed: &str) -> crate::Result<Scalar> {
    let decimals = printed.split_once('.').map_or(0, |(_, frac)| frac.len()) as i32;
    let half_ulp = ctx.pow10(-decimals) / 2i64;
    let floor = ctx.parse(TAU0_ABS_TOL)?;
    Ok(half_ulp.max(&floor).clone())
}

/// A published convergence table.
pub struct PublishedTable {
    pub lambda: &'static str,
    pub s: SChoice,
    pub rows: Vec<(usize, &'static str)>,
    pub counts_k5: Option<[u64; 5]>,
}

fn published(id: TableId) -> PublishedTable {
    match id {
        TableId::Lam1_5Half => PublishedTable {
            lambda: "1.5",
            s: SChoice::StarOver(2),
            rows: vec![(5, "1.72831041e-7"), (10, "7.65e-13"), (20, "2.68e-23"), (30, "2.33e-34"), (50, "7.26e-55")],
            counts_k5: Some([20, 4, 0, 2, 9]),
        },
        TableId::Lam1_5Star => PublishedTable {
            lambda: "1.5",
            s: SChoice::StarOver(1),
            rows: vec![(5, "1.459e-3"), (10, "1.332e-4"), (20, "4.035e-7"), (50, "7.013e-17"), (80, "1.704e-26")],
            counts_k5: Some([4, 1, 0, 1, 2]),
        },
        TableId::Lam5_4Half => PublishedTable {
            lambda: "5.4",
            s: SChoice::StarOver(2),
            rows: vec![(5, "2.18e-7"), (10, "5.05e-14"), (20, "4.10e-24"), (50, "2.18e-57"), (80, "2.43e-75")],
            counts_k5: Some([31, 23, 9, 17, 23]),
        },
        _ => unreachable!("only convergence tables are listed"),
    }
}

/// Published errors at `lambda = 5.4`, `k = 150` for `s` near 1.
pub const NEAR1_ROWS: [(&str, &str); 4] = [
    ("0.9", "4.99e-42"),
    ("0.99", "1.04e-29"),
    ("0.999", "3.43e-2"),
    ("0.9999", "2.83e-2"),
];

/// Relative tolerance on published errors.
pub const ERROR_REL_TOL: &str = "0.02";
pub const TAU0_ABS_TOL: &str = "5e-9";
pub const LAM1_5_HALF_K10_PREFIX: [u64; 10] = [20, 4, 0, 2, 9, 4, 1, 7, 11, 8];
pub const LAM1_5_HALF_RHO5: &str = "1.499999827168959";
pub const LAM2025_VERTICES: u64 = 1_211_693;
pub const LAM2025_FIRST_SIX: [u64; 6] = [8108, 7431, 8095, 8086, 8102, 8093];

/// Rows of strings with a header, rendered as aligned text, CSV or JSON.
pub struct Table {
    pub headers: Vec<String>,
    pub rows: Vec<Vec<String>>,
}

impl Table {
    pub fn new(headers: &[&str]) -> Table {
        Table {
            headers: headers.iter().map(|h| h.to_string()).collect(),
            rows: Vec::new(),
        }
    }

    pub fn push(&mut self, row: Vec<String>) {
        self.rows.push(row);
    }

    fn write_text<W: Write>(&self, mut out: W) -> io::Result<()> {
        let mut widths: Vec<usize> = self.headers.iter().map(|h| h.len()).collect();
        for row in &self.rows {
            for (w, cell) in widths.iter_mut().zip(row) {
                *w = (*w).max(cell.len());
            }
        }
        let line = |cells: &[String]| {
            cells
                .iter()
                .zip(&widths)
                .map(|(c, w)| format!("{c:<w$}"))
                .collect::<Vec<_>>()
                .join("  ")
                .trim_end()
                .to_string()
        };
        writeln!(out, "{}", line(&self.headers))?;
        for row in &self.rows {
            writeln!(out, "{}", line(row))?;
        }
        Ok(())
    }

    fn write_csv<W: Write>(&self, out: W) -> csv::Result<()> {
        let mut w = csv::Writer::from_writer(out);
        w.write_record(&self.headers)?;
        for row in &self.rows {
            w.write_record(row)?;
        }
        w.flush()?;
        Ok(())
    }

    fn to_json(&self) -> serde_json::Value {
        let rows = self
            .rows
            .iter()
            .map(|row| {
                let obj = self
                    .headers
                    .iter()
                    .cloned()
                    .zip(row.iter().map(|c| serde_json::Value::String(c.clone())))
                    .collect();
                serde_json::Value::Object(obj)
            })
            .collect();
        serde_json::Value::Array(rows)
    }
}

/// `[a b c d e f .. x y z]` for long runs, `[a b c]` otherwise.
pub fn abbreviate_counts(counts: &[u64]) -> String {
    let join = |xs: &[u64]| xs.iter().map(u64::to_string).collect::<Vec<_>>().join(" ");
    if counts.len() <= COUNTS_HEAD + COUNTS_TAIL {
        format!("[{}]", join(counts))
    } else {
        format!(
            "[{} .. {}]",
            join(&counts[..COUNTS_HEAD]),
            join(&counts[counts.len() - COUNTS_TAIL..])
        )
    }
}

struct Output {
    print_digits: usize,
    csv: Option<Option<PathBuf>>,
    json: bool,
}

impl Output {
    fn fmt(&self, x: &Scalar) -> String {
        x.to_sig_string(self.print_digits)
    }

    fn emit(&self, table: &Table) -> CliResult<()> {
        let stdout = io::stdout();
        if self.json {
            let mut lock = stdout.lock();
            serde_json::to_writer_pretty(&mut lock, &table.to_json())?;
            writeln!(lock)?;
        } else if let Some(target) = &self.csv {
            match target {
                Some(path) if path.as_os_str() != "-" => {
                    table.write_csv(BufWriter::new(File::create(path)?))?
                }
                _ => table.write_csv(stdout.lock())?,
            }
        } else {
            table.write_text(stdout.lock())?;
        }
        Ok(())
    }

    /// Free-form lines shown only in text mode.
    fn note(&self, text: &str) {
        if !self.json && self.csv.is_none() {
            println!("{text}");
        }
    }
}

fn context(digits: Option<u32>) -> CliResult<PrecisionContext> {
    Ok(PrecisionContext::new(digits.unwrap_or(DEFAULT_DIGITS))?)
}

fn read_tree(path: &Path) -> CliResult<Tree> {
    let text = std::fs::read_to_string(path)?;
    Ok(Tree::parse(&text)?)
}

enum Target {
    Tree(Tree),
    Caterpillar(Caterpillar),
}

fn target(args: &TargetArgs) -> CliResult<Target> {
    match (&args.caterpillar, &args.tree) {
        (Some(c), None) => Ok(Target::Caterpillar(Caterpillar::parse(c)?)),
        (None, Some(p)) => Ok(Target::Tree(read_tree(p)?)),
        _ => Err(CliError::Usage("give exactly one of --caterpillar or --tree".into())),
    }
}

fn radius_row(out: &Output, est: &RadiusEstimate) -> Vec<String> {
    vec![
        out.fmt(&est.estimate()),
        out.fmt(&est.low),
        out.fmt(&est.high),
        est.iterations.to_string(),
        est.early_breaks.to_string(),
        est.exact_hits.to_string(),
    ]
}

/// Bracket valid for a caterpillar without building it: every vertex has
/// degree at most the largest back degree.
fn caterpillar_bracket(c: &Caterpillar, s: &Scalar) -> (Scalar, Scalar) {
    let d = c.max_degree() as i64;
    let upper = s.square() * (d - 1).max(0) + s.abs() * d + 2i64;
    (s.int_like(0), upper)
}

fn write_counts_file(path: &Path, rows: &[(String, Vec<u64>)]) -> CliResult<()> {
    let mut w = BufWriter::new(File::create(path)?);
    for (label, counts) in rows {
        write!(w, "{label}:")?;
        for c in counts {
            write!(w, " {c}")?;
        }
        writeln!(w)?;
    }
    w.flush()?;
    Ok(())
}

fn report_table(out: &Output, rows: &[ReportRow], first: &str, labels: &[String]) -> Table {
    let mut table = Table::new(&[first, "counts", "rho", "error"]);
    for (row, label) in rows.iter().zip(labels) {
        table.push(vec![
            label.clone(),
            abbreviate_counts(&row.counts),
            out.fmt(&row.rho),
            out.fmt(&row.error),
        ]);
    }
    table
}

/// Tallies reproduction checks, printing each to stderr.
struct Checks {
    failed: usize,
}

impl Checks {
    fn record(&mut self, ok: bool, what: &str) {
        eprintln!("{} {what}", if ok { "PASS" } else { "FAIL" });
        if !ok {
            self.failed += 1;
        }
    }

    fn finish(self) -> CliResult<()> {
        if self.failed == 0 {
            Ok(())
        } else {
            Err(CliError::Tolerance(self.failed))
        }
    }
}

/// `|got - want| <= rel * |want|`.
pub fn within_relative(got: &Scalar, want: &Scalar, rel: &Scalar) -> bool {
    (got - want).abs() <= rel * want.abs()
}

pub fn run(cli: Cli) -> CliResult<()> {
    let out = Output {
        print_digits: cli.print_digits,
        csv: cli.csv.clone(),
        json: cli.json,
    };
    if cli.print_digits == 0 {
        return Err(CliError::Usage("--print-digits must be positive".into()));
    }
    match cli.command {
        Command::Rho {
            target: t,
            s,
            lo,
            hi,
            target_digits,
            iterations,
        } => {
            let ctx = context(cli.digits)?;
            let s = ctx.parse(&s)?;
            let t = target(&t)?;
            let (a0, b0) = match &t {
                Target::Tree(tree) => default_radius_bracket(tree, &s),
                Target::Caterpillar(c) => caterpillar_bracket(c, &s),
            };
            let a = lo.map(|v| ctx.parse(&v)).transpose()?.unwrap_or(a0);
            let b = hi.map(|v| ctx.parse(&v)).transpose()?.unwrap_or(b0);
            let n = iterations.unwrap_or_else(|| iterations_for_target(&a, &b, target_digits));
            let est = match &t {
                Target::Tree(tree) => approximate_radius(tree, &s, &a, &b, n)?,
                Target::Caterpillar(c) => approximate_radius(c, &s, &a, &b, n)?,
            };
            let mut table = Table::new(&["rho", "low", "high", "iterations", "early_breaks", "exact_hits"]);
            table.push(radius_row(&out, &est));
            out.emit(&table)
        }
        Command::Locate { target: t, s, point } => {
            let ctx = context(cli.digits)?;
            let s = ctx.parse(&s)?;
            let c = ctx.parse(&point)?;
            let counts = match target(&t)? {
                Target::Tree(tree) => count_eigenvalues(&tree, &s, &c),
                Target::Caterpillar(cat) => count_caterpillar_eigenvalues(&cat, &s, &c),
            };
            let mut table = Table::new(&["greater", "smaller", "equal"]);
            table.push(vec![
                counts.greater.to_string(),
                counts.smaller.to_string(),
                counts.equal.to_string(),
            ]);
            out.emit(&table)
        }
        Command::Recurrence { s, lambda, orbit, steps } => {
            let ctx = context(cli.digits)?;
            let s = ctx.parse(&s)?;
            let lambda = ctx.parse(&lambda)?;
            let p = RecurrenceParams::new(&s, &lambda)?;
            let opt = |x: Option<&Scalar>| x.map(|v| out.fmt(v)).unwrap_or_else(|| "-".into());
            let fp = p.fixed_points().ok();
            let mut table = Table::new(&["name", "value"]);
            for (name, value) in [
                ("alpha", out.fmt(&p.alpha)),
                ("gamma", out.fmt(&p.gamma)),
                ("discriminant", out.fmt(&p.discriminant)),
                ("delta", out.fmt(&p.delta)),
                ("adapted", p.is_adapted().to_string()),
                ("theta", opt(fp.map(|f| &f.theta))),
                ("theta_prime", opt(fp.map(|f| &f.theta_prime))),
                ("c1", opt(p.c1.as_ref())),
                ("margin_f", margin_f(&s, &lambda).map(|f| out.fmt(&f)).unwrap_or_else(|_| "-".into())),
            ] {
                table.push(vec![name.to_string(), value]);
            }
            let Some(x1) = orbit else {
                return out.emit(&table);
            };
            out.emit(&table)?;
            let report = classify_orbit(&p, &ctx.parse(&x1)?, steps, ctx.digits().saturating_sub(10))?;
            out.note(&format!("orbit: {}", report.case.describe()));
            if let Some(m) = report.sign_change_step {
                out.note(&format!("first positive value at step {m}"));
            }
            let mut orbit_table = Table::new(&["j", "x"]);
            for (j, x) in report.values.iter().enumerate() {
                orbit_table.push(vec![(j + 1).to_string(), out.fmt(x)]);
            }
            out.emit(&orbit_table)
        }
        Command::Shearer {
            lambda,
            s,
            k,
            report,
            target_digits,
            epsilon,
            counts_file,
        } => {
            let ctx = context(cli.digits)?;
            let spec = RunSpec::new(&lambda, SChoice::parse(&s)?);
            if let Some(ks) = report {
                if ks.iter().any(|&k| k < 2) {
                    return Err(CliError::Usage("report k values must be at least 2".into()));
                }
                let rows = convergence_report(&spec, &ks, target_digits, &ctx)?;
                if let Some(path) = counts_file {
                    let full: Vec<(String, Vec<u64>)> =
                        rows.iter().map(|r| (r.k.to_string(), r.counts.clone())).collect();
                    write_counts_file(&path, &full)?;
                }
                let labels: Vec<String> = rows.iter().map(|r| r.k.to_string()).collect();
                return out.emit(&report_table(&out, &rows, "k", &labels));
            }
            let (run, used) = generate_auto(&spec, k, &ctx)?;
            if let Some(path) = counts_file {
                write_counts_file(&path, &[(k.to_string(), run.counts.clone())])?;
            }
            out.note(&format!("lambda {}", out.fmt(&run.lambda)));
            out.note(&format!("s {}", out.fmt(&run.s)));
            out.note(&format!("counts {}", abbreviate_counts(&run.counts)));
            out.note(&format!("vertices {}", run.vertex_count()));
            out.note(&format!("digits {}", used.digits()));
            if epsilon {
                let bound = epsilon_k(&run, 20)?;
                out.note(&format!(
                    "lambda - rho in ({}, {}) certified {}",
                    out.fmt(&bound.lower),
                    out.fmt(&bound.epsilon),
                    bound.certified
                ));
            }
            let mut table = Table::new(&["j", "r", "b", "beta"]);
            for j in 0..run.k() {
                table.push(vec![
                    (j + 1).to_string(),
                    run.counts[j].to_string(),
                    out.fmt(&run.b_trace[j]),
                    out.fmt(&run.beta_trace[j]),
                ]);
            }
            out.emit(&table)
        }
        Command::Tau0 { s } => {
            let ctx = context(cli.digits)?;
            let mut table = Table::new(&["s", "tau0"]);
            table.push(vec![s.clone(), out.fmt(&tau0(&ctx.parse(&s)?)?)]);
            out.emit(&table)
        }
        Command::Sstar { lambda } => {
            let ctx = context(cli.digits)?;
            let mut table = Table::new(&["lambda", "s_star"]);
            table.push(vec![lambda.clone(), out.fmt(&s_star(&ctx.parse(&lambda)?)?)]);
            out.emit(&table)
        }
        Command::LimitsTable { s_list } => {
            let ctx = context(cli.digits)?;
            let mut table = Table::new(&["s", "tau0"]);
            for s in s_list.split(',').map(str::trim) {
                table.push(vec![s.to_string(), out.fmt(&tau0(&ctx.parse(s)?)?)]);
            }
            out.emit(&table)
        }
        Command::Verify {
            props,
            max_n,
            s_grid,
            random,
            random_max_n,
            seed,
            all,
        } => {
            let ctx = context(cli.digits)?;
            let ids = PropertyId::parse_list(&props)?;
            let grid = s_grid
                .split(',')
                .map(|v| ctx.parse(v.trim()))
                .collect::<crate::Result<Vec<_>>>()?;
            let mut trees = TreeSource::Exhaustive { max_n }.generate()?;
            if random > 0 {
                trees.extend(
                    TreeSource::Random {
                        count: random,
                        max_n: random_max_n,
                        seed,
                    }
                    .generate()?,
                );
            }
            let tol = default_tolerance(&ctx);
            let reports = sweep_shared(&ids, &trees, &grid, &tol)?;
            let violations = reports.iter().filter(|r| r.holds() == Some(false)).count();
            if out.json {
                let shown: Vec<_> = reports.iter().filter(|r| all || r.holds() == Some(false)).collect();
                let value = serde_json::json!({
                    "summary": summarize(&reports, &ids),
                    "reports": shown,
                });
                println!("{}", serde_json::to_string_pretty(&value)?);
            } else {
                let mut table = Table::new(&["property", "vertices", "tree", "s", "status", "detail"]);
                for r in reports.iter().filter(|r| all || r.holds() == Some(false)) {
                    let (status, detail) = match &r.outcome {
                        crate::properties::Outcome::Holds => ("holds", String::new()),
                        crate::properties::Outcome::Violated(w) => (
                            "violated",
                            w.values.iter().map(|(k, v)| format!("{k}={v}")).collect::<Vec<_>>().join(" "),
                        ),
                        crate::properties::Outcome::NotApplicable { reason } => ("n/a", reason.clone()),
                    };
                    table.push(vec![
                        r.property.to_string(),
                        r.vertices.to_string(),
                        r.tree.clone(),
                        r.s.clone(),
                        status.to_string(),
                        detail,
                    ]);
                }
                out.emit(&table)?;
                if out.csv.is_none() {
                    println!();
                    let mut summary = Table::new(&["property", "holds", "violated", "not_applicable"]);
                    for sum in summarize(&reports, &ids) {
                        summary.push(vec![
                            sum.property.map(|p| p.to_string()).unwrap_or_default(),
                            sum.holds.to_string(),
                            sum.violated.to_string(),
                            sum.not_applicable.to_string(),
                        ]);
                    }
                    summary.write_text(io::stdout().lock())?;
                }
            }
            if violations > 0 {
                return Err(CliError::Tolerance(violations));
            }
            Ok(())
        }
        Command::Reproduce {
            table,
            target_digits,
            counts_file,
        } => reproduce(&out, cli.digits, table, target_digits, counts_file.as_deref()),
    }
}

fn reproduce(
    out: &Output,
    digits: Option<u32>,
    id: TableId,
    target_digits: u32,
    counts_file: Option<&Path>,
) -> CliResult<()> {
    let mut checks = Checks { failed: 0 };
    match id {
        TableId::Tau0Table => {
            let ctx = context(digits)?;
            let mut table = Table::new(&["s", "tau0"]);
            for (s, want) in TAU0_TABLE {
                let got = tau0(&ctx.parse(s)?)?;
                let tol = tau0_tolerance(&ctx, want)?;
                let want = ctx.parse(want)?;
                checks.record(
                    (&got - &want).abs() <= tol,
                    &format!("tau0({s}) {} vs {}", got.to_sig_string(12), want.to_sig_string(10)),
                );
                table.push(vec![s.to_string(), out.fmt(&got)]);
            }
            let guo = laplacian_closed_form(&ctx.one());
            let at_one = tau0(&ctx.one())?;
            checks.record((guo - at_one).abs() < ctx.pow10(-9), "tau0(1) equals the Laplacian closed form");
            out.emit(&table)?;
        }
        TableId::Lam1_5Half | TableId::Lam1_5Star | TableId::Lam5_4Half => {
            let ctx = context(digits)?;
            let pubt = published(id);
            let spec = RunSpec::new(pubt.lambda, pubt.s.clone());
            let ks: Vec<usize> = pubt.rows.iter().map(|r| r.0).collect();
            let rows = convergence_report(&spec, &ks, target_digits, &ctx)?;
            let rel = ctx.parse(ERROR_REL_TOL)?;
            for (row, (k, want)) in rows.iter().zip(&pubt.rows) {
                let want = ctx.parse(want)?;
                let got = row.error.clone();
                checks.record(
                    within_relative(&got, &want, &rel),
                    &format!("k={k} error {} vs {}", got.to_sig_string(6), want.to_sig_string(6)),
                );
            }
            if let Some(c5) = pubt.counts_k5 {
                checks.record(rows[0].counts == c5, &format!("k=5 counts {}", abbreviate_counts(&rows[0].counts)));
            }
            if id == TableId::Lam1_5Half {
                let k10 = &rows[1].counts;
                checks.record(k10[..] == LAM1_5_HALF_K10_PREFIX, "k=10 counts");
                let want = ctx.parse(LAM1_5_HALF_RHO5)?;
                checks.record((&rows[0].rho - want).abs() <= ctx.pow10(-12), "rho(T_5)");
            }
            if let Some(path) = counts_file {
                let full: Vec<(String, Vec<u64>)> = rows.iter().map(|r| (r.k.to_string(), r.counts.clone())).collect();
                write_counts_file(path, &full)?;
            }
            let labels: Vec<String> = rows.iter().map(|r| r.k.to_string()).collect();
            out.emit(&report_table(out, &rows, "k", &labels))?;
        }
        TableId::Lam5_4Near1 => {
            let ctx = context(digits)?;
            let rel = ctx.parse(ERROR_REL_TOL)?;
            let mut rows = Vec::new();
            for (s, _) in NEAR1_ROWS {
                let spec = RunSpec::new("5.4", SChoice::Value(s.to_string()));
                rows.push(convergence_report(&spec, &[150], target_digits, &ctx)?.remove(0));
            }
            for (row, (s, want)) in rows.iter().zip(NEAR1_ROWS) {
                let want = ctx.parse(want)?;
                checks.record(
                    within_relative(&row.error, &want, &rel),
                    &format!("s={s} error {} vs {}", row.error.to_sig_string(6), want.to_sig_string(6)),
                );
            }
            if let Some(path) = counts_file {
                let full: Vec<(String, Vec<u64>)> = NEAR1_ROWS
                    .iter()
                    .zip(&rows)
                    .map(|((s, _), r)| (s.to_string(), r.counts.clone()))
                    .collect();
                write_counts_file(path, &full)?;
            }
            let labels: Vec<String> = NEAR1_ROWS.iter().map(|(s, _)| s.to_string()).collect();
            out.emit(&report_table(out, &rows, "s", &labels))?;
        }
        TableId::Lam2025 => {
            let digits = digits.unwrap_or(LAM2025_DIGITS);
            if digits < LAM2025_DIGITS {
                return Err(Error::Precision {
                    needed: LAM2025_DIGITS,
                }
                .into());
            }
            let ctx = PrecisionContext::new(digits)?;
            let spec = RunSpec::new("2025", SChoice::StarOver(2));
            let row = convergence_report(&spec, &[150], target_digits, &ctx)?.remove(0);
            if let Some(path) = counts_file {
                write_counts_file(path, &[("150".to_string(), row.counts.clone())])?;
            }
            checks.record(
                row.vertex_count == LAM2025_VERTICES,
                &format!("vertex count {} vs {LAM2025_VERTICES}", row.vertex_count),
            );
            checks.record(row.counts[..6] == LAM2025_FIRST_SIX, "first six counts");
            let in_window = row.error > ctx.pow10(-195) && row.error < ctx.pow10(-190);
            checks.record(in_window, &format!("error {} in (1e-195, 1e-190)", row.error.to_sig_string(6)));
            let (run, _) = generate_auto(&spec, 150, &ctx)?;
            let fixed = approximate_radius(&run.caterpillar(), &run.s, &ctx.one(), &run.lambda, 650)?;
            eprintln!(
                "note: 650 bisection steps on [1, 2025] leave lambda - A = {} (the step resolution)",
                (&run.lambda - &fixed.low).to_sig_string(7)
            );
            out.emit(&report_table(out, &[row], "k", &["150".to_string()]))?;
        }
    }
    checks.finish()
}

/// Parses `argv`, runs the command and maps errors to exit codes:
/// 0 success, 1 tolerance failure, 2 usage error, 3 precision error.
pub fn main_with_args<I, T>(args: I) -> ExitCode
where
    I: IntoIterator<Item = T>,
    T: Into<std::ffi::OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(cli) => cli,
        Err(e) => {
            let code = if e.use_stderr() { 2 } else { 0 };
            let _ = e.print();
            return ExitCode::from(code);
        }
    };
    match run(cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(e.exit_code())
        }
    }
}
