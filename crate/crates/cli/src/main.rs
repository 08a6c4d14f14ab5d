//! `entire-ops`: batch front end over JSON files.
//!
//! Exit codes: 0 success/pass, 1 fail verdict, 2 input error, 3 certificate
//! error, 4 inconclusive.

use std::fs;
use std::io::Write;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};
use entire_ops::builtin::{
    dilation_symbol, polar_grid, schrodinger_check_with, schrodinger_propagator, translation_symbol,
    SchrodingerSettings, DEFAULT_COEFF_TRUNC, DEFAULT_MAX_ORDER, DEFAULT_SERIES_ORDER,
};
use entire_ops::extraction::extract_symbol_report;
use entire_ops::growth::{check_condition, default_b_grid, default_eps_grid, norm_bracket};
use entire_ops::json::{operator_from_json, poly_from_json, table_from_json, to_json_string};
use entire_ops::operator::apply;
use entire_ops::{BigRational, ClassVerdict, Complex64, Condition, Error, GrowthParams, Mode, Status};
use serde::Deserialize;
use serde_json::{Map, Value};

const EXIT_FAIL: u8 = 1;
const EXIT_INPUT: u8 = 2;
const EXIT_CERT: u8 = 3;
const EXIT_INCONCLUSIVE: u8 = 4;

#[derive(Parser)]
#[command(name = "entire-ops", version, about = "Infinite-order differential operators on entire functions")]
struct Cli {
    /// JSON object of defaults; explicit flags win.
    #[arg(long, global = true)]
    config: Option<PathBuf>,

    #[command(subcommand)]
    cmd: Cmd,
}

#[derive(Subcommand)]
enum Cmd {
    /// Apply an operator to a function.
    Apply(ApplyArgs),
    /// Recover an operator from a table of monomial values.
    Extract(ExtractArgs),
    /// Test a growth condition.
    Classify(ClassifyArgs),
    /// Bracket the (p, tau)-norm of a function.
    Norm(NormArgs),
    /// Cross-check the factored propagator against the direct series.
    Schrodinger(SchrodingerArgs),
    /// Write a named operator.
    Builtin(BuiltinArgs),
}

#[derive(Args)]
struct ApplyArgs {
    #[arg(long)]
    operator: Option<PathBuf>,
    #[arg(long)]
    function: Option<PathBuf>,
    #[arg(long)]
    p: Option<f64>,
    #[arg(long)]
    tau: Option<f64>,
    /// ClassVerdict JSON of a passing classification.
    #[arg(long)]
    certificate: Option<PathBuf>,
    /// Result polynomial; stdout when absent.
    #[arg(long)]
    out: Option<PathBuf>,
    /// Apply report; stdout when absent.
    #[arg(long)]
    report: Option<PathBuf>,
}

#[derive(Args)]
struct ExtractArgs {
    #[arg(long)]
    blackbox: Option<PathBuf>,
    #[arg(long)]
    max_order: Option<usize>,
    #[arg(long)]
    coeff_trunc: Option<usize>,
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Clone, Copy, ValueEnum)]
enum ModeArg {
    Normal,
    Minimal,
}

#[derive(Args)]
struct ClassifyArgs {
    #[arg(long)]
    operator: Option<PathBuf>,
    #[arg(long)]
    p: Option<f64>,
    #[arg(long, value_enum)]
    mode: Option<ModeArg>,
    /// I, II, III or IV (default IV).
    #[arg(long)]
    condition: Option<String>,
    /// Comma-separated positive values.
    #[arg(long)]
    eps_grid: Option<String>,
    /// Comma-separated ascending positive values.
    #[arg(long)]
    b_grid: Option<String>,
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Args)]
struct NormArgs {
    #[arg(long)]
    function: Option<PathBuf>,
    #[arg(long)]
    p: Option<f64>,
    #[arg(long)]
    tau: Option<f64>,
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Args)]
struct SchrodingerArgs {
    #[arg(long)]
    t: Option<f64>,
    #[arg(long)]
    phi: Option<PathBuf>,
    /// `polar:R:NR:NA`, NR radii up to R times NA angles.
    #[arg(long)]
    grid: Option<String>,
    #[arg(long = "K")]
    k: Option<usize>,
    #[arg(long)]
    tol: Option<f64>,
    #[arg(long)]
    max_order: Option<usize>,
    #[arg(long)]
    coeff_trunc: Option<usize>,
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Clone, Copy, ValueEnum)]
enum BuiltinName {
    Translation,
    Dilation,
    Schrodinger,
}

#[derive(Args)]
struct BuiltinArgs {
    #[arg(value_enum)]
    name: BuiltinName,
    /// Parameter JSON, inline or `@file`.
    #[arg(long)]
    params: Option<String>,
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Debug)]
struct Failure {
    code: u8,
    msg: String,
}

impl Failure {
    fn input(msg: impl Into<String>) -> Self {
        Failure {
            code: EXIT_INPUT,
            msg: msg.into(),
        }
    }
}

impl From<Error> for Failure {
    fn from(e: Error) -> Self {
        let code = match e {
            Error::CertificateTooWeak { .. } | Error::CertificateNotPass => EXIT_CERT,
            _ => EXIT_INPUT,
        };
        Failure {
            code,
            msg: e.to_string(),
        }
    }
}

type CliResult<T> = Result<T, Failure>;

/// Flag value, else config value, else error naming the flag.
struct Config(Map<String, Value>);

impl Config {
    fn load(path: Option<&Path>) -> CliResult<Self> {
        let Some(path) = path else {
            return Ok(Config(Map::new()));
        };
        let text = read(path)?;
        match serde_json::from_str::<Value>(&text) {
            Ok(Value::Object(m)) => Ok(Config(m)),
            Ok(_) => Err(Failure::input(format!("{}: config must be a JSON object", path.display()))),
            Err(e) => Err(Failure::input(format!("{}: {e}", path.display()))),
        }
    }

    fn get<T: for<'de> Deserialize<'de>>(&self, key: &str, flag: Option<T>) -> CliResult<Option<T>> {
        if flag.is_some() {
            return Ok(flag);
        }
        match self.0.get(key) {
            None => Ok(None),
            Some(v) => serde_json::from_value(v.clone())
                .map(Some)
                .map_err(|e| Failure::input(format!("config key {key:?}: {e}"))),
        }
    }

    fn need<T: for<'de> Deserialize<'de>>(&self, key: &str, flag: Option<T>) -> CliResult<T> {
        self.get(key, flag)?
            .ok_or_else(|| Failure::input(format!("missing --{}", key.replace('_', "-"))))
    }
}

fn read(path: &Path) -> CliResult<String> {
    fs::read_to_string(path).map_err(|e| Failure::input(format!("{}: {e}", path.display())))
}

fn with_path<T>(path: &Path, r: entire_ops::Result<T>) -> CliResult<T> {
    r.map_err(|e| {
        let mut f = Failure::from(e);
        f.msg = format!("{}: {}", path.display(), f.msg);
        f
    })
}

/// Temp file in the target directory, then rename.
fn write_atomic(path: &Path, text: &str) -> CliResult<()> {
    let dir = match path.parent() {
        Some(d) if !d.as_os_str().is_empty() => d,
        _ => Path::new("."),
    };
    let io = |e: std::io::Error| Failure::input(format!("{}: {e}", path.display()));
    let mut tmp = tempfile::NamedTempFile::new_in(dir).map_err(io)?;
    tmp.write_all(text.as_bytes()).map_err(io)?;
    tmp.persist(path).map_err(|e| io(e.error))?;
    Ok(())
}

fn emit(out: Option<&Path>, text: &str) -> CliResult<()> {
    match out {
        Some(p) => write_atomic(p, text),
        None => {
            print!("{text}");
            Ok(())
        }
    }
}

fn json<T: serde::Serialize + ?Sized>(v: &T) -> CliResult<String> {
    Ok(to_json_string(v)?)
}

fn params(p: f64, tau: f64) -> CliResult<GrowthParams> {
    Ok(GrowthParams::new(p, tau)?)
}

fn cmd_apply(a: ApplyArgs, cfg: &Config) -> CliResult<u8> {
    let op_path: PathBuf = cfg.need("operator", a.operator)?;
    let f_path: PathBuf = cfg.need("function", a.function)?;
    let gp = params(cfg.need("p", a.p)?, cfg.need("tau", a.tau)?)?;
    let op = with_path(&op_path, operator_from_json::<f64>(&read(&op_path)?))?;
    let f = with_path(&f_path, poly_from_json::<f64>(&read(&f_path)?))?;
    let cert = match cfg.get::<PathBuf>("certificate", a.certificate)? {
        Some(p) => {
            let text = read(&p)?;
            let v: ClassVerdict = serde_json::from_str(&text)
                .map_err(|e| Failure::input(format!("{}: {e}", p.display())))?;
            Some(v)
        }
        None => None,
    };
    let report = apply(&op, &f, &gp, cert.as_ref())?;
    let out: Option<PathBuf> = cfg.get("out", a.out)?;
    let rep: Option<PathBuf> = cfg.get("report", a.report)?;
    match (&out, &rep) {
        (Some(o), _) => write_atomic(o, &json(&report.result)?)?,
        (None, Some(_)) => emit(None, &json(&report.result)?)?,
        (None, None) => {}
    }
    emit(rep.as_deref(), &json(&report)?)?;
    Ok(0)
}

fn cmd_extract(a: ExtractArgs, cfg: &Config) -> CliResult<u8> {
    let path: PathBuf = cfg.need("blackbox", a.blackbox)?;
    let n: usize = cfg.need("max_order", a.max_order)?;
    let nc: Option<usize> = cfg.get("coeff_trunc", a.coeff_trunc)?;
    // f64 inputs are exact rationals; assemble exactly, round once on output
    let table = with_path(&path, table_from_json::<BigRational>(&read(&path)?))?;
    let missing = table.missing(n);
    if !missing.is_empty() {
        return Err(Error::MissingMonomials(missing).into());
    }
    let r = extract_symbol_report(&table, n, nc)?;
    if r.dropped_terms > 0 {
        eprintln!(
            "note: {} terms above coeff_trunc {} dropped",
            r.dropped_terms, r.coeff_trunc
        );
    }
    emit(cfg.get::<PathBuf>("out", a.out)?.as_deref(), &json(&r.symbol)?)?;
    Ok(0)
}

fn parse_grid(name: &str, s: &str) -> CliResult<Vec<f64>> {
    s.split(',')
        .map(|x| {
            x.trim()
                .parse::<f64>()
                .map_err(|e| Failure::input(format!("--{name}: {x:?}: {e}")))
        })
        .collect()
}

fn cmd_classify(a: ClassifyArgs, cfg: &Config) -> CliResult<u8> {
    let path: PathBuf = cfg.need("operator", a.operator)?;
    let p: f64 = cfg.need("p", a.p)?;
    let mode = match a.mode {
        Some(ModeArg::Normal) => Mode::Normal,
        Some(ModeArg::Minimal) => Mode::Minimal,
        None => cfg.get::<Mode>("mode", None)?.unwrap_or(Mode::Normal),
    };
    let which: Condition = match cfg.get::<String>("condition", a.condition)? {
        Some(c) => c.parse()?,
        None => Condition::IV,
    };
    let eps = match cfg.get::<String>("eps_grid", a.eps_grid)? {
        Some(s) => parse_grid("eps-grid", &s)?,
        None => default_eps_grid(),
    };
    let bs = match cfg.get::<String>("b_grid", a.b_grid)? {
        Some(s) => parse_grid("b-grid", &s)?,
        None => default_b_grid(),
    };
    let op = with_path(&path, operator_from_json::<f64>(&read(&path)?))?;
    let v = check_condition(&op, p, mode, which, &eps, &bs)?;
    emit(cfg.get::<PathBuf>("out", a.out)?.as_deref(), &json(&v)?)?;
    Ok(match v.status {
        Status::Pass => 0,
        Status::Fail => EXIT_FAIL,
        Status::Inconclusive => EXIT_INCONCLUSIVE,
    })
}

fn cmd_norm(a: NormArgs, cfg: &Config) -> CliResult<u8> {
    let path: PathBuf = cfg.need("function", a.function)?;
    let gp = params(cfg.need("p", a.p)?, cfg.need("tau", a.tau)?)?;
    let f = with_path(&path, poly_from_json::<f64>(&read(&path)?))?;
    emit(cfg.get::<PathBuf>("out", a.out)?.as_deref(), &json(&norm_bracket(&f, &gp))?)?;
    Ok(0)
}

fn parse_polar(spec: &str) -> CliResult<Vec<Complex64>> {
    let bad = || Failure::input(format!("--grid {spec:?}: expected polar:R:NR:NA"));
    let parts: Vec<&str> = spec.split(':').collect();
    if parts.len() != 4 || parts[0] != "polar" {
        return Err(bad());
    }
    let r: f64 = parts[1].parse().map_err(|_| bad())?;
    let nr: usize = parts[2].parse().map_err(|_| bad())?;
    let na: usize = parts[3].parse().map_err(|_| bad())?;
    if r.is_nan() || r <= 0.0 || nr == 0 || na == 0 {
        return Err(bad());
    }
    Ok(polar_grid(r, nr, na))
}

fn cmd_schrodinger(a: SchrodingerArgs, cfg: &Config) -> CliResult<u8> {
    let t: f64 = cfg.need("t", a.t)?;
    let path: PathBuf = cfg.need("phi", a.phi)?;
    let grid = cfg.get::<String>("grid", a.grid)?.unwrap_or_else(|| "polar:2:5:5".into());
    let k: usize = cfg.get("K", a.k)?.unwrap_or(DEFAULT_SERIES_ORDER);
    let tol: f64 = cfg.get("tol", a.tol)?.unwrap_or(1e-6);
    let settings = SchrodingerSettings {
        max_order: cfg.get("max_order", a.max_order)?.unwrap_or(DEFAULT_MAX_ORDER),
        coeff_trunc: cfg.get("coeff_trunc", a.coeff_trunc)?.unwrap_or(DEFAULT_COEFF_TRUNC),
        ..SchrodingerSettings::default()
    };
    let phi = with_path(&path, poly_from_json::<f64>(&read(&path)?))?;
    let pts = parse_polar(&grid)?;
    let r = schrodinger_check_with(&phi, t, &pts, k, tol, &settings)?;
    emit(cfg.get::<PathBuf>("out", a.out)?.as_deref(), &json(&r)?)?;
    Ok(if r.pass { 0 } else { EXIT_FAIL })
}

/// A complex number given as `x`, `[re, im]` or `{"re", "im"}`.
#[derive(Deserialize)]
#[serde(untagged)]
enum ComplexIn {
    Real(f64),
    Pair([f64; 2]),
    Obj {
        re: f64,
        #[serde(default)]
        im: f64,
    },
}

impl From<ComplexIn> for Complex64 {
    fn from(c: ComplexIn) -> Self {
        match c {
            ComplexIn::Real(x) => Complex64::new(x, 0.0),
            ComplexIn::Pair([re, im]) => Complex64::new(re, im),
            ComplexIn::Obj { re, im } => Complex64::new(re, im),
        }
    }
}

#[derive(Deserialize)]
#[serde(deny_unknown_fields)]
struct BuiltinParams {
    a: Option<Vec<ComplexIn>>,
    sigma: Option<ComplexIn>,
    dim: Option<usize>,
    t: Option<f64>,
    max_order: Option<usize>,
    coeff_trunc: Option<usize>,
}

fn cmd_builtin(a: BuiltinArgs, cfg: &Config) -> CliResult<u8> {
    let raw = cfg.get::<Value>("params", a.params.map(Value::String))?;
    let text = match raw {
        None => "{}".to_string(),
        Some(Value::String(s)) => match s.strip_prefix('@') {
            Some(p) => read(Path::new(p))?,
            None => s,
        },
        Some(v) => v.to_string(),
    };
    let bp: BuiltinParams =
        serde_json::from_str(&text).map_err(|e| Failure::input(format!("--params: {e}")))?;
    let max_order = bp.max_order.unwrap_or(DEFAULT_MAX_ORDER);
    let coeff_trunc = bp.coeff_trunc.unwrap_or(DEFAULT_COEFF_TRUNC);
    let sym = match a.name {
        BuiltinName::Translation => {
            let shift: Vec<Complex64> = bp
                .a
                .ok_or_else(|| Failure::input("translation needs \"a\""))?
                .into_iter()
                .map(Into::into)
                .collect();
            if shift.is_empty() {
                return Err(Failure::input("\"a\" must be non-empty"));
            }
            translation_symbol(&shift, max_order, coeff_trunc)
        }
        BuiltinName::Dilation => {
            let sigma = bp.sigma.ok_or_else(|| Failure::input("dilation needs \"sigma\""))?;
            dilation_symbol(sigma.into(), bp.dim.unwrap_or(1), max_order, coeff_trunc)
        }
        BuiltinName::Schrodinger => {
            let t = bp.t.ok_or_else(|| Failure::input("schrodinger needs \"t\""))?;
            schrodinger_propagator(t, max_order, coeff_trunc)
        }
    };
    emit(cfg.get::<PathBuf>("out", a.out)?.as_deref(), &json(&sym)?)?;
    Ok(0)
}

fn run(cli: Cli) -> CliResult<u8> {
    let cfg = Config::load(cli.config.as_deref())?;
    match cli.cmd {
        Cmd::Apply(a) => cmd_apply(a, &cfg),
        Cmd::Extract(a) => cmd_extract(a, &cfg),
        Cmd::Classify(a) => cmd_classify(a, &cfg),
        Cmd::Norm(a) => cmd_norm(a, &cfg),
        Cmd::Schrodinger(a) => cmd_schrodinger(a, &cfg),
        Cmd::Builtin(a) => cmd_builtin(a, &cfg),
    }
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(c) => c,
        Err(e) => {
            let code = if e.use_stderr() { EXIT_INPUT } else { 0 };
            let _ = e.print();
            return ExitCode::from(code);
        }
    };
    match run(cli) {
        Ok(code) => ExitCode::from(code),
        Err(f) => {
            eprintln!("error: {}", f.msg);
            ExitCode::from(f.code)
        }
    }
}
