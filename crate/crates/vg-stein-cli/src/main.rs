//! `vg-stein`: command-line front end.
//!
//! Every run prints `{version, config, records}` (JSON) or a `#`-prefixed config line
//! followed by flat CSV rows. Exit codes: 0 success, 1 failing certification or
//! computation error, 2 usage error.

use anyhow::{bail, Context, Result};
use clap::{Args, Parser, Subcommand, ValueEnum};
use serde::{Deserialize, Serialize};
use serde_json::{json, Map, Value};
use std::path::{Path, PathBuf};
use std::process::ExitCode;
use vg_stein::certify::{run_full_certification, CertConfig, Suite, BUNDLE_VERSION};
use vg_stein::distances::{d_k_between, d_k_empirical, d_w_between, d_w_empirical};
use vg_stein::exec::THREADS_ENV;
use vg_stein::moment_bounds::{c1_c2, kolmogorov_bound, wasserstein_bound, BoundForm, SixMomentInput};
use vg_stein::stein_factors::{const_a, const_b, const_c, const_d, const_m_n};
use vg_stein::stein_solver::{SteinSolver, TestFunction};
use vg_stein::vg_dist::{self, cumulants_centered, CumulantVector, VGParams};

#[derive(Parser, Debug)]
#[command(name = "vg-stein", version, about = "Variance-gamma distribution, Stein solutions and bound certification")]
struct Cli {
    /// Output format
    #[arg(long, value_enum, default_value_t = Format::Json, global = true)]
    format: Format,
    /// TOML or JSON file with grids, tolerances and `threads`
    #[arg(long, global = true)]
    config: Option<PathBuf>,
    #[command(subcommand)]
    cmd: Command,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum, Serialize)]
#[serde(rename_all = "lowercase")]
enum Format {
    Json,
    Csv,
}

#[derive(Args, Debug, Clone, Copy, Serialize)]
struct Vg {
    #[arg(long, allow_negative_numbers = true)]
    r: f64,
    #[arg(long, default_value_t = 0.0, allow_negative_numbers = true)]
    theta: f64,
    #[arg(long, default_value_t = 1.0, allow_negative_numbers = true)]
    sigma: f64,
    #[arg(long, default_value_t = 0.0, allow_negative_numbers = true)]
    mu: f64,
}

impl Vg {
    fn params(self) -> Result<VGParams> {
        VGParams::new(self.r, self.theta, self.sigma, self.mu).map_err(|e| usage(format!("--r/--theta/--sigma/--mu: {e}")))
    }
}

#[derive(Subcommand, Debug, Serialize)]
#[serde(tag = "subcommand", rename_all = "kebab-case")]
enum Command {
    /// Density at the given points
    Pdf(PointArgs),
    /// Distribution function at the given points
    Cdf(PointArgs),
    Mode(VgOnly),
    /// Cumulants κ1..κ6
    Cumulants(VgOnly),
    /// Seeded draws
    Sample {
        #[command(flatten)]
        #[serde(flatten)]
        vg: Vg,
        #[arg(long)]
        n: usize,
        #[arg(long, default_value_t = 0)]
        seed: u64,
    },
    /// Stein-equation solution and derivatives
    Solve {
        #[command(flatten)]
        #[serde(flatten)]
        vg: Vg,
        /// indicator:z | sine:a | identity
        #[arg(long)]
        h: String,
        #[arg(long, required = true, allow_hyphen_values = true, value_delimiter = ',')]
        x: Vec<f64>,
        #[arg(long, default_value_t = 0, value_parser = clap::value_parser!(u8).range(0..=3))]
        derivs: u8,
    },
    /// Stein factors and moment-bound constants
    Constants {
        #[command(flatten)]
        #[serde(flatten)]
        vg: Vg,
        #[arg(long, value_enum, ignore_case = true)]
        which: Which,
    },
    /// Six-moment Wasserstein/Kolmogorov bound from a cumulant file
    SixMoment {
        #[arg(long)]
        cumulants: PathBuf,
        #[arg(long, default_value = "tilde")]
        form: String,
        #[arg(long, value_enum, default_value_t = Metric::W)]
        metric: Metric,
    },
    /// Distances between two laws, or between a sample and a law
    Distance {
        /// r,theta,sigma,mu (one or two)
        #[arg(long, num_args = 1..=2, required = true, allow_negative_numbers = true)]
        between: Vec<String>,
        /// CSV sample, one value per line, optional header
        #[arg(long)]
        empirical: Option<PathBuf>,
    },
    /// Certification sweeps
    Certify {
        #[arg(long, value_enum, ignore_case = true, default_value_t = SuiteArg::All)]
        suite: SuiteArg,
    },
}

#[derive(Args, Debug, Serialize)]
struct PointArgs {
    #[command(flatten)]
    #[serde(flatten)]
    vg: Vg,
    #[arg(long, required = true, allow_hyphen_values = true, value_delimiter = ',')]
    x: Vec<f64>,
}

#[derive(Args, Debug, Serialize)]
struct VgOnly {
    #[command(flatten)]
    #[serde(flatten)]
    vg: Vg,
}

#[derive(Clone, Copy, Debug, ValueEnum, Serialize)]
enum Which {
    A,
    B,
    C,
    D,
    M,
    N,
    #[value(name = "C1C2")]
    C1c2,
}

#[derive(Clone, Copy, Debug, ValueEnum, Serialize)]
#[serde(rename_all = "lowercase")]
enum Metric {
    W,
    K,
}

#[derive(Clone, Copy, Debug, ValueEnum, Serialize)]
#[serde(rename_all = "lowercase")]
enum SuiteArg {
    All,
    Thm31,
    #[value(name = "appA")]
    AppA,
    #[value(name = "appB")]
    AppB,
    Jump,
    Blowup,
}

impl From<SuiteArg> for Suite {
    fn from(s: SuiteArg) -> Self {
        match s {
            SuiteArg::All => Suite::All,
            SuiteArg::Thm31 => Suite::Thm31,
            SuiteArg::AppA => Suite::AppA,
            SuiteArg::AppB => Suite::AppB,
            SuiteArg::Jump => Suite::Jump,
            SuiteArg::Blowup => Suite::Blowup,
        }
    }
}

/// Error that maps to exit code 2.
#[derive(Debug)]
struct Usage(String);

impl std::fmt::Display for Usage {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(&self.0)
    }
}

impl std::error::Error for Usage {}

fn usage(msg: impl Into<String>) -> anyhow::Error {
    Usage(msg.into()).into()
}

/// Options read from `--config`; certification grids live under `certify`.
#[derive(Debug, Default, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
struct FileConfig {
    threads: Option<usize>,
    certify: Option<CertConfig>,
}

fn read_structured<T: for<'de> Deserialize<'de>>(path: &Path) -> Result<T> {
    let text = std::fs::read_to_string(path).map_err(|e| usage(format!("--config {}: {e}", path.display())))?;
    let toml_ext = path.extension().is_some_and(|e| e.eq_ignore_ascii_case("toml"));
    let parsed = if toml_ext {
        toml::from_str(&text).map_err(|e| usage(format!("{}: {e}", path.display())))?
    } else {
        serde_json::from_str(&text).map_err(|e| usage(format!("{}: {e}", path.display())))?
    };
    Ok(parsed)
}

fn parse_tf(spec: &str) -> Result<TestFunction> {
    let (kind, arg) = spec.split_once(':').unwrap_or((spec, ""));
    let num = || arg.parse::<f64>().map_err(|_| usage(format!("--h {spec}: expected a number after ':'")));
    Ok(match kind {
        "indicator" => TestFunction::Indicator(num()?),
        "sine" => {
            let a = num()?;
            if !(a > 0.0) {
                bail!(usage(format!("--h {spec}: frequency must be positive")));
            }
            TestFunction::ScaledSine(a)
        }
        "identity" if arg.is_empty() => TestFunction::Identity,
        _ => bail!(usage(format!("--h {spec}: expected indicator:z, sine:a or identity"))),
    })
}

fn parse_params(s: &str) -> Result<VGParams> {
    let v: Vec<f64> = s
        .split(',')
        .map(|t| t.trim().parse::<f64>())
        .collect::<std::result::Result<_, _>>()
        .map_err(|_| usage(format!("--between {s}: expected r,theta,sigma[,mu]")))?;
    match v[..] {
        [r, t, sg] => VGParams::new(r, t, sg, 0.0),
        [r, t, sg, m] => VGParams::new(r, t, sg, m),
        _ => return Err(usage(format!("--between {s}: expected r,theta,sigma[,mu]"))),
    }
    .map_err(|e| usage(format!("--between {s}: {e}")))
}

fn read_sample(path: &Path) -> Result<Vec<f64>> {
    let mut rdr = csv::ReaderBuilder::new()
        .has_headers(false)
        .flexible(true)
        .from_path(path)
        .map_err(|e| usage(format!("--empirical {}: {e}", path.display())))?;
    let mut out = vec![];
    for (i, rec) in rdr.records().enumerate() {
        let rec = rec.with_context(|| format!("reading {}", path.display()))?;
        let field = rec.get(0).unwrap_or("").trim();
        match field.parse::<f64>() {
            Ok(v) => out.push(v),
            Err(_) if i == 0 => {} // header
            Err(_) => bail!(usage(format!("--empirical {}: line {} is not a number", path.display(), i + 1))),
        }
    }
    Ok(out)
}

#[derive(Deserialize)]
#[serde(untagged)]
enum CumulantSpec {
    List([f64; 6]),
    Named(CumulantVector),
}

#[derive(Deserialize)]
struct SixMomentFile {
    r: f64,
    theta: f64,
    sigma: f64,
    cumulants: CumulantSpec,
}

fn rec(v: impl Serialize) -> Result<Value> {
    Ok(serde_json::to_value(v)?)
}

/// Returns (records, all certifications passed).
fn run(cmd: &Command, file: &FileConfig) -> Result<(Vec<Value>, bool)> {
    let mut ok = true;
    let records = match cmd {
        Command::Pdf(a) | Command::Cdf(a) => {
            let law = vg_dist::VgLaw::new(a.vg.params()?)?;
            let is_pdf = matches!(cmd, Command::Pdf(_));
            a.x.iter()
                .map(|&x| {
                    let v = if is_pdf { law.pdf(x)? } else { law.cdf(x)? };
                    Ok(if is_pdf { json!({"x": x, "pdf": v}) } else { json!({"x": x, "cdf": v}) })
                })
                .collect::<Result<_>>()?
        }
        Command::Mode(a) => vec![json!({"mode": vg_dist::mode(&a.vg.params()?)?})],
        Command::Cumulants(a) => {
            let p = a.vg.params()?;
            let mut k = cumulants_centered(&p);
            k.kappa1 = vg_dist::mean_variance(&p).0;
            vec![rec(k)?]
        }
        Command::Sample { vg, n, seed } => {
            vg_dist::sample(&vg.params()?, *n, *seed)?.into_iter().map(|v| json!({"value": v})).collect()
        }
        Command::Solve { vg, h, x, derivs } => {
            let s = SteinSolver::new(vg.params()?, parse_tf(h)?)?;
            x.iter()
                .map(|&x| {
                    let e = match derivs {
                        0 => s.solve(x)?,
                        1 => s.solve_derivative(x)?,
                        2 => s.solve_second(x)?,
                        _ => s.solve_third(x)?,
                    };
                    rec(e)
                })
                .collect::<Result<_>>()?
        }
        Command::Constants { vg, which } => {
            let p = vg.params()?;
            let re = p.reparam();
            let one = |name: &str, v: f64| json!({"name": name, "value": v});
            match which {
                Which::A => vec![one("A", const_a(&p))],
                Which::B => vec![one("B", const_b(&p))],
                Which::C => vec![one("C", const_c(&p))],
                Which::D => vec![one("D", const_d(&p)?)],
                Which::M => vec![one("M", const_m_n(re.nu, re.gamma)?.0)],
                Which::N => vec![one("N", const_m_n(re.nu, re.gamma)?.1)],
                Which::C1c2 => {
                    let (c1, c2) = c1_c2(&p)?;
                    vec![one("C1", c1), one("C2", c2)]
                }
            }
        }
        Command::SixMoment { cumulants, form, metric } => {
            let f: SixMomentFile = read_structured(cumulants)?;
            let form: BoundForm = form.parse().map_err(|e| usage(format!("--form {form}: {e}")))?;
            let k = match f.cumulants {
                CumulantSpec::List(a) => CumulantVector::from_array(a),
                CumulantSpec::Named(k) => k,
            };
            let input = SixMomentInput::new(f.r, f.theta, f.sigma, k)?;
            match metric {
                Metric::W => vec![rec(wasserstein_bound(&input, form)?)?],
                Metric::K => vec![json!({"form": form, "kolmogorov_bound": kolmogorov_bound(&input, form)?})],
            }
        }
        Command::Distance { between, empirical } => {
            let ps = between.iter().map(|s| parse_params(s)).collect::<Result<Vec<_>>>()?;
            let row = |metric: &str, d: vg_stein::distances::DistanceResult| -> Result<Value> {
                let mut v = rec(d)?;
                v["metric"] = json!(metric);
                Ok(v)
            };
            match (empirical, &ps[..]) {
                (Some(path), [p]) => {
                    let xs = read_sample(path)?;
                    vec![row("kolmogorov", d_k_empirical(&xs, p)?)?, row("wasserstein", d_w_empirical(&xs, p)?)?]
                }
                (None, [a, b]) => vec![row("kolmogorov", d_k_between(a, b)?)?, row("wasserstein", d_w_between(a, b)?)?],
                (Some(_), _) => bail!(usage("--between takes exactly one parameter set with --empirical")),
                (None, _) => bail!(usage("--between takes two parameter sets")),
            }
        }
        Command::Certify { suite } => {
            let mut cfg = file.certify.clone().unwrap_or_default();
            cfg.suite = (*suite).into();
            let bundle = run_full_certification(&cfg);
            ok = bundle.all_pass();
            return Ok((bundle.records.iter().map(rec).collect::<Result<_>>()?, ok));
        }
    };
    Ok((records, ok))
}

fn flatten(prefix: &str, v: &Value, out: &mut Vec<(String, Value)>) {
    match v {
        Value::Object(m) => {
            for (k, v) in m {
                let key = if prefix.is_empty() { k.clone() } else { format!("{prefix}.{k}") };
                flatten(&key, v, out);
            }
        }
        _ => out.push((prefix.to_string(), v.clone())),
    }
}

/// 17 significant digits, round-trip safe.
fn cell(v: &Value) -> String {
    match v {
        Value::Null => String::new(),
        Value::Number(n) if n.is_f64() => format!("{:.16e}", n.as_f64().unwrap()),
        Value::String(s) => s.clone(),
        other => other.to_string(),
    }
}

fn write_csv(config: &Value, records: &[Value]) -> Result<String> {
    let rows: Vec<Vec<(String, Value)>> = records
        .iter()
        .map(|r| {
            let mut out = vec![];
            flatten("", r, &mut out);
            out
        })
        .collect();
    let mut cols: Vec<String> = vec![];
    for row in &rows {
        for (k, _) in row {
            if !cols.contains(k) {
                cols.push(k.clone());
            }
        }
    }
    let mut w = csv::Writer::from_writer(vec![]);
    w.write_record(&cols)?;
    for row in &rows {
        let m: Map<String, Value> = row.iter().cloned().collect();
        w.write_record(cols.iter().map(|c| m.get(c).map(cell).unwrap_or_default()))?;
    }
    let body = String::from_utf8(w.into_inner()?)?;
    Ok(format!("# version={BUNDLE_VERSION} config={}\n{body}", serde_json::to_string(config)?))
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(c) => c,
        Err(e) => {
            let _ = e.print();
            return ExitCode::from(if e.use_stderr() { 2 } else { 0 });
        }
    };
    match execute(&cli) {
        Ok(true) => ExitCode::SUCCESS,
        Ok(false) => ExitCode::from(1),
        Err(e) => {
            eprintln!("error: {e:#}");
            if e.downcast_ref::<Usage>().is_some() {
                ExitCode::from(2)
            } else {
                ExitCode::from(1)
            }
        }
    }
}

fn execute(cli: &Cli) -> Result<bool> {
    let file: FileConfig = match &cli.config {
        Some(p) => read_structured(p)?,
        None => FileConfig::default(),
    };
    if let Some(n) = file.threads {
        // read once when the worker pool is first built
        std::env::set_var(THREADS_ENV, n.to_string());
    }
    let (records, ok) = run(&cli.cmd, &file)?;
    let mut config = json!({"format": cli.format, "command": cli.cmd});
    if let Some(p) = &cli.config {
        config["config_file"] = json!(p.display().to_string());
        config["file"] = serde_json::to_value(&file)?;
    }
    if matches!(cli.cmd, Command::Certify { .. }) {
        let mut cfg = file.certify.clone().unwrap_or_default();
        if let Command::Certify { suite } = cli.cmd {
            cfg.suite = suite.into();
        }
        config["certify"] = serde_json::to_value(cfg)?;
    }
    let text = match cli.format {
        Format::Json => {
            let mut s = serde_json::to_string_pretty(&json!({"version": BUNDLE_VERSION, "config": config, "records": records}))?;
            s.push('\n');
            s
        }
        Format::Csv => write_csv(&config, &records)?,
    };
    print!("{text}");
    Ok(ok)
}
