//! Command-line front end: resolves a run configuration from an optional
//! key=value file and flags, dispatches to a campaign and writes its report.

use std::collections::BTreeMap;
use std::ffi::OsString;
use std::fmt::Write as _;
use std::path::PathBuf;

use clap::{Args, Parser, Subcommand, ValueEnum};
use serde_json::Value;
use splitlab::campaign::{self, Report, Status};
use splitlab::pimodule::FormCase;
use splitlab::Error as CoreError;

pub const EXIT_PASS: i32 = 0;
pub const EXIT_FAIL: i32 = 1;
pub const EXIT_USAGE: i32 = 2;
pub const EXIT_BUDGET: i32 = 3;

#[derive(Debug, thiserror::Error)]
pub enum CliError {
    #[error("usage: {0}")]
    Usage(String),
    #[error("budget exceeded: {0}")]
    Budget(String),
    #[error("{0}")]
    Core(CoreError),
    #[error("i/o: {0}")]
    Io(#[from] std::io::Error),
}

impl From<CoreError> for CliError {
    fn from(e: CoreError) -> CliError {
        match e {
            CoreError::Budget { .. } => CliError::Budget(e.to_string()),
            CoreError::InvalidField { .. }
            | CoreError::CaseMismatch { .. }
            | CoreError::Parity(_)
            | CoreError::Shape(_)
            | CoreError::LabelOutOfRange { .. }
            | CoreError::Precondition(_)
            | CoreError::Parse(_) => CliError::Usage(e.to_string()),
            other => CliError::Core(other),
        }
    }
}

impl CliError {
    pub fn exit_code(&self) -> i32 {
        match self {
            CliError::Usage(_) => EXIT_USAGE,
            CliError::Budget(_) => EXIT_BUDGET,
            CliError::Core(_) | CliError::Io(_) => EXIT_FAIL,
        }
    }
}

type Result<T> = std::result::Result<T, CliError>;

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum Format {
    Json,
    Csv,
    Text,
}

#[derive(Debug, Parser)]
#[command(name = "splitlab", version, about = "Finite-field verification campaigns for splitting models")]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
    #[command(flatten)]
    pub opts: Opts,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Subcommand)]
pub enum Command {
    /// Stratum counts and count degrees.
    Count,
    /// Degeneration witnesses for every comparable pair and a semicontinuity sweep.
    Closure,
    /// Tangent dimensions over a full enumeration.
    Tangent,
    /// Characteristic-2 classification, parity and smooth-locus checks.
    Char2,
    /// Vanishing criterion against the orbit oracle.
    Weights,
    /// Verschiebung data search and nine-stratum poset checks.
    Hasse,
    /// CM index set and its order.
    Cmindex,
    /// Point counts of the chart equations.
    Chart,
}

impl Command {
    pub fn name(self) -> &'static str {
        match self {
            Command::Count => "count",
            Command::Closure => "closure",
            Command::Tangent => "tangent",
            Command::Char2 => "char2",
            Command::Weights => "weights",
            Command::Hasse => "hasse",
            Command::Cmindex => "cmindex",
            Command::Chart => "chart",
        }
    }
}

/// Flags; every one can also be given as `key=value` in a config file.
#[derive(Debug, Clone, Default, Args)]
pub struct Opts {
    /// key=value config file; flags override its entries.
    #[arg(long, global = true)]
    pub config: Option<PathBuf>,
    #[arg(long, global = true)]
    pub a: Option<String>,
    #[arg(long, global = true)]
    pub b: Option<String>,
    /// Characteristic (field order p^f when no q list is given).
    #[arg(long, global = true)]
    pub p: Option<String>,
    #[arg(long, global = true)]
    pub f: Option<String>,
    /// Comma-separated field orders.
    #[arg(long, global = true)]
    pub q: Option<String>,
    /// odd-char, char2-case1 or char2-case2.
    #[arg(long, global = true)]
    pub case: Option<String>,
    /// Signature parameter of the (1,n) campaigns.
    #[arg(long, global = true)]
    pub n: Option<String>,
    /// Truncation order of the families.
    #[arg(long = "N", alias = "order", global = true)]
    pub order: Option<String>,
    #[arg(long, global = true)]
    pub seed: Option<String>,
    #[arg(long, global = true)]
    pub budget: Option<String>,
    #[arg(long, global = true)]
    pub output: Option<String>,
    #[arg(long, global = true)]
    pub format: Option<String>,
    /// Weight entries range over [−range, range].
    #[arg(long, global = true)]
    pub range: Option<String>,
    /// CM legs as a×b pairs, e.g. `1x1,2x3`.
    #[arg(long, global = true)]
    pub legs: Option<String>,
    #[arg(long, global = true)]
    pub shapes: Option<String>,
    #[arg(long, global = true)]
    pub sweep: Option<String>,
    #[arg(long = "max-d", global = true)]
    pub max_d: Option<String>,
    #[arg(long = "min-accepted", global = true)]
    pub min_accepted: Option<String>,
}

const KEYS: &[&str] = &[
    "a", "b", "p", "f", "q", "case", "n", "N", "seed", "budget", "output", "format", "range", "legs", "shapes", "sweep",
    "max-d", "min-accepted",
];

/// Parse `key=value` lines; `#` starts a comment.
pub fn parse_config(text: &str) -> Result<BTreeMap<String, String>> {
    let mut out = BTreeMap::new();
    for (i, raw) in text.lines().enumerate() {
        let line = raw.split('#').next().unwrap_or("").trim();
        if line.is_empty() {
            continue;
        }
        let (k, v) = line
            .split_once('=')
            .ok_or_else(|| CliError::Usage(format!("config line {}: expected key=value", i + 1)))?;
        let k = match k.trim() {
            "order" => "N",
            other => other,
        };
        if !KEYS.contains(&k) {
            return Err(CliError::Usage(format!("config line {}: unknown key `{k}`", i + 1)));
        }
        out.insert(k.to_string(), v.trim().to_string());
    }
    Ok(out)
}

/// Resolved settings: config file entries overridden by flags.
#[derive(Debug, Clone, Default)]
pub struct RunConfig {
    values: BTreeMap<String, String>,
}

impl RunConfig {
    pub fn resolve(opts: &Opts) -> Result<RunConfig> {
        let mut values = match &opts.config {
            Some(path) => {
                let text = std::fs::read_to_string(path)
                    .map_err(|e| CliError::Usage(format!("cannot read {}: {e}", path.display())))?;
                parse_config(&text)?
            }
            None => BTreeMap::new(),
        };
        let flags = [
            ("a", &opts.a),
            ("b", &opts.b),
            ("p", &opts.p),
            ("f", &opts.f),
            ("q", &opts.q),
            ("case", &opts.case),
            ("n", &opts.n),
            ("N", &opts.order),
            ("seed", &opts.seed),
            ("budget", &opts.budget),
            ("output", &opts.output),
            ("format", &opts.format),
            ("range", &opts.range),
            ("legs", &opts.legs),
            ("shapes", &opts.shapes),
            ("sweep", &opts.sweep),
            ("max-d", &opts.max_d),
            ("min-accepted", &opts.min_accepted),
        ];
        for (k, v) in flags {
            if let Some(v) = v {
                values.insert(k.to_string(), v.clone());
            }
        }
        Ok(RunConfig { values })
    }

    pub fn get<T: std::str::FromStr>(&self, key: &str, default: T) -> Result<T> {
        match self.values.get(key) {
            None => Ok(default),
            Some(s) => s.parse().map_err(|_| CliError::Usage(format!("invalid value `{s}` for {key}"))),
        }
    }

    fn bounded(&self, key: &str, default: usize, lo: usize, hi: usize) -> Result<usize> {
        let v = self.get(key, default)?;
        if v < lo || v > hi {
            return Err(CliError::Usage(format!("{key} = {v} outside [{lo}, {hi}]")));
        }
        Ok(v)
    }

    /// Field orders from `q`, else p^f, else the default list.
    fn fields(&self, default: &[u32]) -> Result<Vec<u32>> {
        if let Some(list) = self.values.get("q") {
            let qs = list
                .split(',')
                .map(|s| s.trim().parse::<u32>().map_err(|_| CliError::Usage(format!("invalid field order `{s}`"))))
                .collect::<Result<Vec<_>>>()?;
            if qs.is_empty() {
                return Err(CliError::Usage("empty q list".into()));
            }
            return Ok(qs);
        }
        if let Some(p) = self.values.get("p") {
            let p: u32 = p.parse().map_err(|_| CliError::Usage(format!("invalid p `{p}`")))?;
            let f: u32 = self.get("f", 1)?;
            let q = p.checked_pow(f).ok_or_else(|| CliError::Usage("p^f overflows".into()))?;
            return Ok(vec![q]);
        }
        Ok(default.to_vec())
    }

    fn field(&self, default: u32) -> Result<u32> {
        match self.fields(&[default])?.as_slice() {
            [q] => Ok(*q),
            _ => Err(CliError::Usage("this campaign takes a single field".into())),
        }
    }

    fn case(&self) -> Result<Option<FormCase>> {
        self.values.get("case").map(|s| s.parse::<FormCase>().map_err(CliError::from)).transpose()
    }

    fn signature(&self, da: usize, db: usize) -> Result<(usize, usize)> {
        let a = self.bounded("a", da, 1, 6)?;
        let b = self.bounded("b", db, 1, 8)?;
        if a > b {
            return Err(CliError::Usage(format!("expected a ≤ b, got a={a}, b={b}")));
        }
        Ok((a, b))
    }

    fn legs(&self) -> Result<Vec<(usize, usize)>> {
        let Some(s) = self.values.get("legs") else { return Ok(Vec::new()) };
        s.split(',')
            .map(|leg| {
                let (a, b) = leg
                    .trim()
                    .split_once(['x', 'X'])
                    .ok_or_else(|| CliError::Usage(format!("leg `{leg}` is not of the form axb")))?;
                let parse = |t: &str| t.trim().parse::<usize>().map_err(|_| CliError::Usage(format!("invalid leg `{leg}`")));
                Ok((parse(a)?, parse(b)?))
            })
            .collect()
    }

    pub fn format(&self) -> Result<Format> {
        match self.values.get("format") {
            None => Ok(Format::Json),
            Some(s) => Format::from_str(s, true).map_err(|_| CliError::Usage(format!("unknown format `{s}`"))),
        }
    }

    pub fn output(&self) -> Option<String> {
        self.values.get("output").cloned()
    }

    pub fn seed(&self) -> Result<u64> {
        self.get("seed", 0)
    }
}

/// Build the campaign parameters and run it.
pub fn run_campaign(cmd: Command, cfg: &RunConfig, progress: campaign::Progress) -> Result<Report> {
    let seed = cfg.seed()?;
    let report = match cmd {
        Command::Count => {
            let (a, b) = cfg.signature(1, 1)?;
            let p = campaign::CountParams { a, b, qs: cfg.fields(&[3, 5, 7])?, case: cfg.case()?, budget: cfg.get("budget", 100_000_000)? };
            campaign::count(&p, progress)?
        }
        Command::Closure => {
            let (a, b) = cfg.signature(2, 2)?;
            let p = campaign::ClosureParams {
                a,
                b,
                q: cfg.field(3)?,
                order: cfg.bounded("N", 6, 2, 16)?,
                budget: cfg.get("budget", 200)?,
                sweep: cfg.get("sweep", 10_000)?,
                seed,
            };
            campaign::closure(&p, progress)?
        }
        Command::Tangent => {
            let (a, b) = cfg.signature(1, 1)?;
            let p = campaign::TangentParams { a, b, q: cfg.field(3)?, case: cfg.case()?, budget: cfg.get("budget", 10_000_000)? };
            campaign::tangent(&p, progress)?
        }
        Command::Char2 => {
            let (a, b) = cfg.signature(1, 1)?;
            let p = campaign::Char2Params {
                a,
                b,
                q: cfg.field(2)?,
                max_d: cfg.bounded("max-d", 4, 1, 6)?,
                budget: cfg.get("budget", 10_000_000)?,
            };
            campaign::char2(&p, progress)?
        }
        Command::Weights => {
            let (a, b) = cfg.signature(1, 2)?;
            let range: i64 = cfg.get("range", 2)?;
            if !(0..=4).contains(&range) {
                return Err(CliError::Usage(format!("range = {range} outside [0, 4]")));
            }
            campaign::weights(&campaign::WeightsParams { a, b, range }, progress)?
        }
        Command::Hasse => {
            let p = campaign::HasseParams {
                n: cfg.bounded("n", 1, 1, 3)?,
                q: cfg.field(4)?,
                budget: cfg.get("budget", 1200)?,
                seed,
                min_accepted: cfg.get("min-accepted", 1000)?,
            };
            campaign::hasse(&p, progress)?
        }
        Command::Cmindex => {
            let p = campaign::CmParams {
                legs: cfg.legs()?,
                shapes: cfg.bounded("shapes", 20, 1, 1000)?,
                max_size: cfg.get("budget", 500)?,
                seed,
            };
            campaign::cm(&p, progress)?
        }
        Command::Chart => {
            let (a, b) = cfg.signature(1, 1)?;
            let p = campaign::ChartParams { a, b, qs: cfg.fields(&[3, 5, 7])?, budget: cfg.get("budget", 1 << 24)? };
            campaign::chart(&p, progress)?
        }
    };
    let mut report = report;
    if let Value::Object(m) = &mut report.config {
        m.entry("seed").or_insert(Value::from(seed));
    }
    Ok(report)
}

/// CSV of the report table.
pub fn render_csv(report: &Report) -> Result<String> {
    let mut w = csv::Writer::from_writer(Vec::new());
    w.write_record(&report.table.columns).map_err(|e| CliError::Io(e.into()))?;
    for row in &report.table.rows {
        w.write_record(row).map_err(|e| CliError::Io(e.into()))?;
    }
    let bytes = w.into_inner().map_err(|e| CliError::Io(e.into_error()))?;
    Ok(String::from_utf8(bytes).expect("csv is utf-8"))
}

pub fn render_text(report: &Report) -> String {
    let mut s = String::new();
    let _ = writeln!(s, "{} {} · {}", report.tool, report.version, report.campaign);
    for c in &report.checks {
        let tag = match c.status {
            Status::Pass => "PASS",
            Status::Fail => "FAIL",
            Status::Inconclusive => "INCONCLUSIVE",
        };
        let _ = writeln!(s, "{tag:<12} {:<24} {}", c.id, c.detail);
    }
    if !report.table.rows.is_empty() {
        let cols = report.table.columns.len();
        let width: Vec<usize> = (0..cols)
            .map(|i| {
                report.table.rows.iter().map(|r| r[i].chars().count()).chain([report.table.columns[i].chars().count()]).max().unwrap()
            })
            .collect();
        let line = |cells: &[String]| {
            cells.iter().zip(&width).map(|(c, w)| format!("{c:>w$}")).collect::<Vec<_>>().join("  ")
        };
        let _ = writeln!(s);
        let _ = writeln!(s, "{}", line(&report.table.columns));
        for r in &report.table.rows {
            let _ = writeln!(s, "{}", line(r));
        }
    }
    s
}

pub fn render(report: &Report, format: Format) -> Result<String> {
    match format {
        Format::Json => Ok(report.to_json()),
        Format::Csv => render_csv(report),
        Format::Text => Ok(render_text(report)),
    }
}

fn execute(cli: &Cli) -> Result<i32> {
    let cfg = RunConfig::resolve(&cli.opts)?;
    let format = cfg.format()?;
    let progress = |msg: &str| eprintln!("[splitlab] {msg}");
    let report = run_campaign(cli.command, &cfg, &progress)?;
    let body = render(&report, format)?;
    match cfg.output() {
        Some(path) => std::fs::write(path, body)?,
        None => print!("{body}"),
    }
    if report.passed() {
        Ok(EXIT_PASS)
    } else {
        let failures: Vec<Value> = report
            .failures()
            .iter()
            .map(|c| serde_json::json!({ "id": c.id, "status": c.status, "detail": c.detail }))
            .collect();
        eprintln!("{}", serde_json::json!({ "failures": failures }));
        Ok(EXIT_FAIL)
    }
}

/// Entry point; returns the process exit status.
pub fn run<I, T>(args: I) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(c) => c,
        Err(e) => {
            let code = if e.use_stderr() { EXIT_USAGE } else { EXIT_PASS };
            let _ = e.print();
            return code;
        }
    };
    match execute(&cli) {
        Ok(code) => code,
        Err(e) => {
            eprintln!("splitlab {}: {e}", cli.command.name());
            e.exit_code()
        }
    }
}
