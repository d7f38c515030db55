//! `cointegrate`: unit-root, lag-selection, Johansen, VECM and impulse
//! response pipeline over a pinned data snapshot.

mod commands;
mod config;
mod data;
mod render;

use std::io::Write;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{CommandFactory, Parser, Subcommand};
use serde_json::{json, Value};

use config::{ConfigError, Format, PipelineConfig};

const FLAGS: &str = "\
Flags:
  --config FILE            JSON config merged over the defaults
  --<section.key> VALUE    set any config value, e.g. --johansen.lag_diff 3
  --snapshot DIR           snapshot directory (data.snapshot_dir)
  --input FILE|-           frame CSV instead of the snapshot (data.input)
  --source snapshot|fred   data source (data.source)
  --out DIR                output directory (simulate: file, fetch: snapshot)
  --format json|csv|markdown
  --series A,B  --regression none|constant|constant_trend
  --p-max N  --lag-diff N  --rank N  --det none|restricted_constant|unrestricted_constant
  --horizon N  --n-boot N  --level X  --seed N  --ordering A,B,..  --from-model FILE

Exit status: 0 success, 1 computation error, 2 configuration or input error.";

#[derive(Parser)]
#[command(
    name = "cointegrate",
    version,
    about = "Cointegration analysis pipeline",
    after_help = FLAGS,
    mut_subcommands = |c| c.after_help(FLAGS)
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

/// Every command accepts `--config FILE` and `--<dotted.path> VALUE`
/// overrides, plus the short aliases listed in the README.
#[derive(Subcommand)]
enum Command {
    /// Descriptive statistics of every dataset series
    Describe(Rest),
    /// Augmented Dickey-Fuller tests
    Adf(Rest),
    /// VAR lag order selection by AIC, SIC and HQIC
    Lagselect(Rest),
    /// Johansen trace test
    Johansen(Rest),
    /// Fit the vector error-correction model and save it
    Vecm(Rest),
    /// Orthogonalized impulse responses with bootstrap bands
    Irf(Rest),
    /// Every stage, written as one markdown report and a JSON bundle
    Report(Rest),
    /// Simulate a cointegrated system and write it as a frame CSV
    Simulate(Rest),
    /// Download the dataset from FRED into a snapshot directory
    Fetch(Rest),
}

#[derive(clap::Args)]
struct Rest {
    #[arg(trailing_var_arg = true, allow_hyphen_values = true, num_args = 0.., value_name = "--FLAG VALUE")]
    args: Vec<String>,
}

impl Command {
    fn parts(&self) -> (&'static str, &[String]) {
        match self {
            Command::Describe(r) => ("describe", &r.args),
            Command::Adf(r) => ("adf", &r.args),
            Command::Lagselect(r) => ("lagselect", &r.args),
            Command::Johansen(r) => ("johansen", &r.args),
            Command::Vecm(r) => ("vecm", &r.args),
            Command::Irf(r) => ("irf", &r.args),
            Command::Report(r) => ("report", &r.args),
            Command::Simulate(r) => ("simulate", &r.args),
            Command::Fetch(r) => ("fetch", &r.args),
        }
    }
}

#[derive(Debug)]
pub enum Failure {
    Config(ConfigError),
    Compute(cointegrate::Error),
}

impl From<cointegrate::Error> for Failure {
    fn from(e: cointegrate::Error) -> Self {
        Failure::Compute(e)
    }
}

impl From<ConfigError> for Failure {
    fn from(e: ConfigError) -> Self {
        Failure::Config(e)
    }
}

impl From<std::io::Error> for Failure {
    fn from(e: std::io::Error) -> Self {
        Failure::Compute(e.into())
    }
}

impl From<serde_json::Error> for Failure {
    fn from(e: serde_json::Error) -> Self {
        Failure::Compute(e.into())
    }
}

fn error_kind(e: &cointegrate::Error) -> &'static str {
    use cointegrate::Error::*;
    match e {
        EmptyOverlap | InternalGap { .. } | InvalidPeriod(_) | InvalidSeries { .. } => "data",
        MissingFile(_) | Parse { .. } | Manifest(_) | Io(_) | Json(_) => "input",
        Network(_) | Auth(_) | UnknownSeries(_) => "fetch",
        _ => "computation",
    }
}

/// One JSON object on stderr per failure.
fn report_failure(f: &Failure) -> ExitCode {
    let (code, diag) = match f {
        Failure::Config(e) => (
            2,
            json!({"status": "error", "kind": "config", "path": e.path, "message": e.message}),
        ),
        Failure::Compute(e) => (1, json!({"status": "error", "kind": error_kind(e), "message": e.to_string()})),
    };
    eprintln!("{diag}");
    ExitCode::from(code)
}

type Flags = (Option<String>, Vec<(String, String)>);

/// Splits `--key value` / `--key=value` pairs into the config file and
/// dotted-path overrides.
fn parse_flags(command: &str, args: &[String]) -> Result<Flags, ConfigError> {
    let mut file = None;
    let mut overrides = Vec::new();
    let mut it = args.iter();
    while let Some(a) = it.next() {
        let Some(flag) = a.strip_prefix("--") else {
            return Err(ConfigError::new("", format!("unexpected argument `{a}`")));
        };
        let (key, value) = match flag.split_once('=') {
            Some((k, v)) => (k.to_string(), v.to_string()),
            None => {
                let v = it
                    .next()
                    .ok_or_else(|| ConfigError::new(flag, "missing value"))?;
                (flag.to_string(), v.clone())
            }
        };
        if key == "config" {
            file = Some(value);
        } else if let Some(path) = config::alias(command, &key) {
            overrides.push((path.to_string(), value));
        } else if key.contains('.') {
            overrides.push((key, value));
        } else {
            return Err(ConfigError::new(key.clone(), format!("unknown flag `--{key}`")));
        }
    }
    Ok((file, overrides))
}

fn write_file(path: &Path, bytes: &[u8]) -> Result<(), Failure> {
    if let Some(dir) = path.parent() {
        std::fs::create_dir_all(dir)?;
    }
    std::fs::write(path, bytes)?;
    Ok(())
}

fn json_bytes(v: &Value) -> Vec<u8> {
    let mut s = serde_json::to_string_pretty(v).expect("JSON values serialize");
    s.push('\n');
    s.into_bytes()
}

/// JSON always, plus the requested rendering.
fn emit(dir: &Path, stem: &str, doc: &Value, format: Format) -> Result<(), Failure> {
    write_file(&dir.join(format!("{stem}.json")), &json_bytes(doc))?;
    match format {
        Format::Json => {}
        Format::Markdown => write_file(&dir.join(format!("{stem}.md")), render::markdown(doc).as_bytes())?,
        Format::Csv => {
            for t in render::tables(doc) {
                write_file(&dir.join(format!("{}.csv", t.stem)), &render::table_csv(&t))?;
            }
        }
    }
    Ok(())
}

fn irf_plot_csv(doc: &Value) -> Vec<u8> {
    render::tables(doc).first().map(render::table_csv).unwrap_or_default()
}

fn print(doc: &Value) -> Result<(), Failure> {
    std::io::stdout().write_all(&json_bytes(doc))?;
    Ok(())
}

/// The configuration as recorded in a bundle: where outputs go and where
/// the snapshot lives do not affect results and are left out.
fn recorded_config(config: &PipelineConfig) -> Value {
    let mut v = serde_json::to_value(config).expect("config serializes");
    if let Value::Object(m) = &mut v {
        m.remove("output");
        m.remove("simulate");
    }
    v["data"]["snapshot_dir"] = Value::Null;
    v
}

fn report(config: &PipelineConfig, data: &data::Data) -> Result<PathBuf, Failure> {
    let dir = config.output.directory.clone();
    let partial = PathBuf::from(format!("{}.partial-{}", dir.display(), std::process::id()));
    let result = build_report(config, data, &partial);
    if let Err(e) = result {
        let _ = std::fs::remove_dir_all(&partial);
        return Err(e);
    }
    if dir.exists() {
        for entry in std::fs::read_dir(&partial)? {
            let entry = entry?;
            std::fs::rename(entry.path(), dir.join(entry.file_name()))?;
        }
        std::fs::remove_dir(&partial)?;
    } else {
        std::fs::rename(&partial, &dir)?;
    }
    Ok(dir)
}

fn build_report(config: &PipelineConfig, data: &data::Data, dir: &Path) -> Result<(), Failure> {
    std::fs::create_dir_all(dir)?;
    let describe = commands::describe(config, data);
    let adf = commands::adf_doc(config, data)?;
    let lagselect = commands::lagselect_doc(config, data)?;
    let johansen = commands::johansen_doc(config, data)?;
    let fitted = commands::fit(config, data)?;
    let vecm = commands::vecm_doc(config, data, &fitted)?;
    let irf = commands::irf_fitted(config, data, &fitted)?;

    let bundle = json!({
        "schema_version": commands::SCHEMA_VERSION,
        "kind": "report",
        "software": {"name": "cointegrate", "version": env!("CARGO_PKG_VERSION")},
        "config": recorded_config(config),
        "data": data.provenance(),
        "describe": describe,
        "adf": adf,
        "lagselect": lagselect,
        "johansen": johansen,
        "vecm": vecm,
        "irf": irf,
    });

    let mut md = String::from("# Cointegration analysis report\n\n");
    let p = data.provenance();
    md += &format!("Software: cointegrate {}\n\n", env!("CARGO_PKG_VERSION"));
    md += &format!("Data source: {}", p.kind);
    if let Some(v) = &p.vintage {
        md += &format!(", vintage {v}");
    }
    if let Some(h) = p.manifest_sha256.as_ref().or(p.input_sha256.as_ref()) {
        md += &format!(", sha256 {h}");
    }
    md += "\n\n";
    let sections = [
        ("Descriptive statistics", &describe),
        ("Unit-root tests", &adf),
        ("Lag order selection", &lagselect),
        ("Cointegration rank", &johansen),
        ("Vector error-correction model", &vecm),
        ("Impulse responses", &irf),
    ];
    for (title, doc) in sections {
        md += &format!("## {title}\n\n");
        if doc["kind"] == "irf" {
            md += "Plot data: `irf.csv` (one row per horizon, impulse and response).\n\n";
        }
        md += &render::markdown(doc);
        md.push('\n');
    }
    write_file(&dir.join("report.md"), md.as_bytes())?;
    write_file(&dir.join("bundle.json"), &json_bytes(&bundle))?;
    write_file(&dir.join("model.json"), &json_bytes(&serde_json::to_value(&fitted.model)?))?;
    write_file(&dir.join("irf.csv"), &irf_plot_csv(&irf))?;
    Ok(())
}

fn run(command: &str, args: &[String]) -> Result<(), Failure> {
    let (file, overrides) = parse_flags(command, args)?;
    let config = config::load(file.as_deref(), &overrides)?;
    let out = config.output.directory.clone();
    let format = config.output.format;
    match command {
        "simulate" => {
            let csv = commands::simulate_csv(&config)?;
            match &config.simulate.output {
                Some(path) => write_file(path, &csv)?,
                None => std::io::stdout().write_all(&csv)?,
            }
            return Ok(());
        }
        "fetch" => return print(&commands::fetch(&config)?),
        _ => {}
    }
    let data = data::load(&config)?;
    commands::validate_with_data(&config, &data)?;
    match command {
        "describe" => {
            let doc = commands::describe(&config, &data);
            emit(&out, "describe", &doc, format)?;
            print(&doc)
        }
        "adf" => {
            let doc = commands::adf_doc(&config, &data)?;
            emit(&out, "adf", &doc, format)?;
            print(&doc)
        }
        "lagselect" => {
            let doc = commands::lagselect_doc(&config, &data)?;
            emit(&out, "lagselect", &doc, format)?;
            print(&doc)
        }
        "johansen" => {
            let doc = commands::johansen_doc(&config, &data)?;
            emit(&out, "johansen", &doc, format)?;
            print(&doc)
        }
        "vecm" => {
            let fitted = commands::fit(&config, &data)?;
            let doc = commands::vecm_doc(&config, &data, &fitted)?;
            emit(&out, "vecm", &doc, format)?;
            write_file(&out.join("model.json"), &json_bytes(&serde_json::to_value(&fitted.model)?))?;
            print(&doc)
        }
        "irf" => {
            let doc = match &config.irf.from_model {
                Some(path) => commands::irf_from_model(&config, &data, path)?,
                None => commands::irf_fitted(&config, &data, &commands::fit(&config, &data)?)?,
            };
            emit(&out, "irf", &doc, format)?;
            write_file(&out.join("irf.csv"), &irf_plot_csv(&doc))?;
            print(&doc)
        }
        "report" => {
            let dir = report(&config, &data)?;
            println!("{}", dir.join("report.md").display());
            println!("{}", dir.join("bundle.json").display());
            Ok(())
        }
        _ => unreachable!("clap restricts commands"),
    }
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(c) => c,
        Err(e) => {
            let code = if e.use_stderr() { 2 } else { 0 };
            let _ = e.print();
            return ExitCode::from(code);
        }
    };
    let (name, args) = cli.command.parts();
    if args.iter().any(|a| a == "--help" || a == "-h") {
        let mut cmd = Cli::command();
        let sub = cmd.find_subcommand_mut(name).expect("known subcommand");
        let _ = sub.print_help();
        return ExitCode::SUCCESS;
    }
    match run(name, args) {
        Ok(()) => ExitCode::SUCCESS,
        Err(f) => report_failure(&f),
    }
}
