//! `tds`: command-line front end for tdyn.
//!
//! Exit codes: 0 when every requested check passes, 1 when a requested
//! property fails, an expectation is not met or an implication is violated,
//! and 2 on input or budget errors.

mod report;

use clap::{Args, Parser, Subcommand, ValueEnum};
use std::collections::BTreeMap;
use std::path::PathBuf;
use std::process::ExitCode;
use std::sync::mpsc;
use std::time::Duration;
use tdyn::catalog;
use tdyn::instance::Instance;
use tdyn::miner::{scan, ScanOptions};
use tdyn::props::{Property, ScaleConfig};
use tdyn::Error;

#[derive(Parser, Debug)]
#[command(name = "tds", version, about = "Property checks for semi-decompositions and semigroup actions")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Evaluate an instance and check the requested properties or expectations.
    Check(CheckArgs),
    /// Evaluate every property of an instance.
    Profile(CheckArgs),
    /// Scan every finite instance up to a number of points.
    Mine(MineArgs),
    /// List, build or emit catalog entries.
    Catalog(CatalogArgs),
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
enum Format {
    Json,
    Csv,
    Human,
}

#[derive(Args, Debug)]
struct Source {
    /// Instance file (JSON).
    #[arg(long, conflicts_with = "catalog")]
    instance: Option<PathBuf>,
    /// Catalog entry name.
    #[arg(long)]
    catalog: Option<String>,
    /// Catalog parameter override, `key=value`.
    #[arg(long = "param", value_name = "KEY=VALUE")]
    params: Vec<String>,
}

#[derive(Args, Debug)]
struct CheckArgs {
    #[command(flatten)]
    source: Source,
    /// Comma-separated properties to report and require.
    #[arg(long, value_delimiter = ',')]
    properties: Vec<String>,
    /// Compare against the expected profile (catalog entry or the instance's `expected` field).
    #[arg(long)]
    expect: bool,
    #[arg(long, value_enum, default_value = "json")]
    format: Format,
    /// Replacement scale ladder, strictly decreasing.
    #[arg(long, value_delimiter = ',')]
    scales: Vec<f64>,
    /// Replacement word depth for metric actions.
    #[arg(long)]
    depth: Option<usize>,
    #[arg(long)]
    inflation: Option<f64>,
    /// Proximality tolerance for the distal check.
    #[arg(long)]
    tau: Option<f64>,
    /// Smallest power counted as a return.
    #[arg(long)]
    burn: Option<usize>,
    /// Lower bound on the verdict window.
    #[arg(long)]
    floor: Option<f64>,
    /// Write the report here instead of standard output.
    #[arg(long)]
    out: Option<PathBuf>,
    /// Directory for modulus curves as `<name>.csv` with columns `delta,value`.
    #[arg(long)]
    curves_dir: Option<PathBuf>,
}

#[derive(Args, Debug)]
struct MineArgs {
    #[arg(long, default_value_t = 3)]
    max_points: usize,
    /// Allow the five-point scan.
    #[arg(long)]
    big: bool,
    #[arg(long, value_enum, default_value = "json")]
    format: Format,
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Args, Debug)]
struct CatalogArgs {
    #[arg(long)]
    list: bool,
    #[arg(long, required_unless_present = "list")]
    name: Option<String>,
    #[arg(long = "param", value_name = "KEY=VALUE")]
    params: Vec<String>,
    /// Write the instance document here instead of standard output.
    #[arg(long)]
    emit: Option<PathBuf>,
    /// Attach the expected profile to the emitted document.
    #[arg(long)]
    expect: bool,
}

/// Result of a command: text for standard output and the exit code.
struct Outcome {
    text: String,
    code: u8,
}

fn parse_params(raw: &[String]) -> Result<BTreeMap<String, f64>, Error> {
    let mut out = BTreeMap::new();
    for p in raw {
        let (k, v) = p
            .split_once('=')
            .ok_or_else(|| Error::BadParameter(format!("expected key=value, got '{p}'")))?;
        let v: f64 = v
            .trim()
            .parse()
            .map_err(|_| Error::BadParameter(format!("{k}: '{v}' is not a number")))?;
        out.insert(k.trim().to_string(), v);
    }
    Ok(out)
}

fn parse_properties(raw: &[String]) -> Result<Vec<Property>, Error> {
    raw.iter()
        .filter(|s| !s.trim().is_empty())
        .map(|s| Property::parse(s.trim()).ok_or_else(|| Error::BadParameter(format!("unknown property '{s}'"))))
        .collect()
}

fn read(path: &PathBuf) -> Result<String, Error> {
    std::fs::read_to_string(path).map_err(|e| Error::Parse(format!("{}: {e}", path.display())))
}

fn write(path: &PathBuf, text: &str) -> Result<(), Error> {
    std::fs::write(path, text).map_err(|e| Error::Parse(format!("{}: {e}", path.display())))
}

/// The instance document, its scale configuration and its expected profile.
fn load(args: &CheckArgs) -> Result<(serde_json::Value, ScaleConfig, Option<BTreeMap<Property, bool>>), Error> {
    let s = &args.source;
    let (mut doc, mut cfg, expected) = match (&s.instance, &s.catalog) {
        (Some(path), None) => {
            if !s.params.is_empty() {
                return Err(Error::BadParameter("--param applies to catalog entries".into()));
            }
            let doc: serde_json::Value =
                serde_json::from_str(&read(path)?).map_err(|e| Error::Parse(format!("document: {e}")))?;
            let expected = match doc.get("expected") {
                Some(e) => Some(report::parse_expected(e)?),
                None => None,
            };
            let cfg = match doc.get("config") {
                Some(c) => report::parse_config(c)?,
                None => ScaleConfig::default(),
            };
            (doc, cfg, expected)
        }
        (None, Some(name)) => {
            let built = catalog::build(name, &parse_params(&s.params)?)?;
            let entry = catalog::lookup(name)?;
            let expected = entry.expected.iter().copied().collect();
            (built.instance.to_json()?, built.config, Some(expected))
        }
        _ => return Err(Error::BadParameter("give exactly one of --instance or --catalog".into())),
    };
    if !args.scales.is_empty() {
        let space = doc.get_mut("space").and_then(|v| v.as_object_mut());
        match space {
            Some(sp) if sp.get("kind").and_then(|k| k.as_str()) == Some("metric") => {
                sp.insert("scales".into(), serde_json::json!(args.scales));
            }
            _ => return Err(Error::BadParameter("--scales applies to metric instances".into())),
        }
    }
    if let Some(d) = args.depth {
        let st = doc.get_mut("structure").and_then(|v| v.as_object_mut());
        match st {
            Some(st) if st.contains_key("depth") => {
                st.insert("depth".into(), serde_json::json!(d));
            }
            _ => return Err(Error::BadParameter("--depth applies to metric actions".into())),
        }
    }
    if let Some(v) = args.inflation {
        cfg.inflation = v;
    }
    if args.tau.is_some() {
        cfg.tau = args.tau;
    }
    if let Some(v) = args.burn {
        cfg.burn = v;
    }
    if let Some(v) = args.floor {
        cfg.floor = v;
    }
    Ok((doc, cfg, expected))
}

fn cmd_check(args: &CheckArgs, strict: bool) -> Result<Outcome, Error> {
    let selected = parse_properties(&args.properties)?;
    let (doc, cfg, expected) = load(args)?;
    let inst = Instance::from_json(&doc)?;
    let profile = inst.profile(&cfg)?;
    let expected = if args.expect {
        Some(expected.ok_or_else(|| Error::BadParameter("no expected profile for this instance".into()))?)
    } else {
        None
    };
    let rep = report::Report::build(&inst, profile, &cfg, &selected, expected.as_ref());
    if let Some(dir) = &args.curves_dir {
        std::fs::create_dir_all(dir).map_err(|e| Error::Parse(format!("{}: {e}", dir.display())))?;
        for c in &rep.curves {
            write(&dir.join(format!("{}.csv", c.name)), &c.to_csv())?;
        }
    }
    let text = match args.format {
        Format::Json => rep.to_json(),
        Format::Csv => rep.to_csv(),
        Format::Human => rep.to_human(),
    };
    let failed = rep.violations() > 0
        || rep.mismatches() > 0
        || (strict && selected.iter().any(|p| rep.profile.value(*p) == Some(false)));
    let code = if failed { 1 } else { 0 };
    match &args.out {
        Some(p) => {
            write(p, &text)?;
            Ok(Outcome { text: String::new(), code })
        }
        None => Ok(Outcome { text, code }),
    }
}

fn budget() -> Result<Option<Duration>, Error> {
    match std::env::var("TDS_BUDGET_MS") {
        Ok(v) => v
            .trim()
            .parse::<u64>()
            .map(|ms| Some(Duration::from_millis(ms)))
            .map_err(|_| Error::BadParameter(format!("TDS_BUDGET_MS: '{v}' is not a whole number"))),
        Err(_) => Ok(None),
    }
}

fn cmd_mine(args: &MineArgs) -> Result<Outcome, Error> {
    let mut opts = ScanOptions::new(args.max_points);
    opts.big = args.big;
    opts.budget = budget()?;
    let r = scan(&opts)?;
    let text = match args.format {
        Format::Json => serde_json::to_string_pretty(&serde_json::to_value(&r).unwrap_or_default())
            .unwrap_or_default(),
        Format::Csv => report::counts_csv(&r),
        Format::Human => report::mine_human(&r),
    };
    let code = if r.is_clean() { 0 } else { 1 };
    match &args.out {
        Some(p) => {
            write(p, &text)?;
            let summary = format!(
                "{} pairs, {} violations, report written to {}",
                r.pairs,
                r.violations.len(),
                p.display()
            );
            Ok(Outcome { text: summary, code })
        }
        None => Ok(Outcome { text, code }),
    }
}

fn cmd_catalog(args: &CatalogArgs) -> Result<Outcome, Error> {
    if args.list {
        let mut text = String::new();
        for e in catalog::ENTRIES {
            let params: Vec<String> = e.params.iter().map(|(k, v)| format!("{k}={v}")).collect();
            text.push_str(&format!("{:28} {}  [{}]\n", e.name, e.summary, params.join(" ")));
        }
        return Ok(Outcome { text, code: 0 });
    }
    let name = args.name.as_deref().unwrap_or_default();
    let built = catalog::build(name, &parse_params(&args.params)?)?;
    let mut doc = built.instance.to_json()?;
    doc["config"] = report::config_json(&built.config);
    if args.expect {
        let entry = catalog::lookup(name)?;
        let exp: BTreeMap<String, bool> = entry.expected.iter().map(|(p, v)| (p.name().to_string(), *v)).collect();
        doc["expected"] = serde_json::json!(exp);
    }
    let text = serde_json::to_string_pretty(&doc).unwrap_or_default();
    match &args.emit {
        Some(p) => {
            write(p, &text)?;
            Ok(Outcome {
                text: format!("{} points written to {}", built.instance.len(), p.display()),
                code: 0,
            })
        }
        None => Ok(Outcome { text, code: 0 }),
    }
}

fn run(cli: Cli) -> Result<Outcome, Error> {
    match &cli.command {
        Command::Check(a) => cmd_check(a, true),
        Command::Profile(a) => cmd_check(a, false),
        Command::Mine(a) => cmd_mine(a),
        Command::Catalog(a) => cmd_catalog(a),
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let limit = match budget() {
        Ok(b) => b,
        Err(e) => {
            eprintln!("error: {e}");
            return ExitCode::from(2);
        }
    };
    std::panic::set_hook(Box::new(|_| {}));
    let (tx, rx) = mpsc::channel();
    std::thread::spawn(move || {
        let r = std::panic::catch_unwind(|| run(cli));
        let _ = tx.send(r);
    });
    let got = match limit {
        Some(d) => rx.recv_timeout(d).map_err(|_| ()),
        None => rx.recv().map_err(|_| ()),
    };
    match got {
        Ok(Ok(Ok(out))) => {
            if !out.text.is_empty() {
                println!("{}", out.text.trim_end());
            }
            ExitCode::from(out.code)
        }
        Ok(Ok(Err(e))) => {
            eprintln!("error: {e}");
            ExitCode::from(2)
        }
        Ok(Err(_)) => {
            eprintln!("error: internal failure while evaluating the instance");
            ExitCode::from(2)
        }
        Err(()) => {
            eprintln!(
                "error: {}",
                Error::BudgetExceeded(format!("TDS_BUDGET_MS = {} ms", limit.unwrap_or_default().as_millis()))
            );
            ExitCode::from(2)
        }
    }
}
