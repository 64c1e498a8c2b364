//! Command-line front end for the `simres` binary.
//!
//! Settings come from flags, then from an optional `key = value` config
//! file, then from built-in defaults, in that order of precedence.

use std::collections::BTreeMap;
use std::ffi::OsString;
use std::fs;
use std::io::{self, Write};
use std::path::PathBuf;

use clap::{Args, Parser, Subcommand, ValueEnum};
use num_traits::{Signed, Zero};

use crate::error::{Error, Result};
use crate::graph::{self, build_network, DEFAULT_MAX_NODES};
use crate::indices::{self, IndexReport};
use crate::oracle::{ExactOracle, FloatOracle, NumericMode, FLOAT_TOLERANCE};
use crate::parallel::Execution;
use crate::recursion::RecursiveResistance;
use crate::scalar::{from_biguint, relative_gap, render, render_sig, to_f64};
use crate::verify::{self, ClosedForms, VerifyScope};

pub const EXIT_OK: i32 = 0;
pub const EXIT_VERIFY_FAILED: i32 = 1;
pub const EXIT_USAGE: i32 = 2;
pub const EXIT_SIZE: i32 = 3;

/// Default size bound for brute-force index sums in `indices`.
pub const DEFAULT_BRUTE_MAX: usize = 100;

#[derive(Debug, Parser)]
#[command(
    name = "simres",
    version,
    about = "Resistance distances and Kirchhoff indices of simplicial networks"
)]
struct Cli {
    #[command(subcommand)]
    command: CommandKind,
    #[command(flatten)]
    flags: Flags,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Subcommand)]
pub enum CommandKind {
    /// Build a network and export it.
    Generate,
    /// Resistance between two nodes by recursion and by oracle.
    Resist,
    /// Index table, one row per level.
    Indices,
    /// Run the check suite.
    Verify,
    /// Mean resistance against its limit over a (q, t) grid.
    Sweep,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum Mode {
    Exact,
    Float,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum OutputFormat {
    Csv,
    Edges,
    Dot,
    Json,
}

#[derive(Debug, Default, Args)]
struct Flags {
    #[arg(long, global = true)]
    q: Option<u32>,
    #[arg(long = "q-max", global = true)]
    q_max: Option<u32>,
    #[arg(long, global = true)]
    t: Option<u32>,
    #[arg(long = "t-max", global = true)]
    t_max: Option<u32>,
    #[arg(long, value_enum, global = true)]
    mode: Option<Mode>,
    #[arg(long = "max-nodes", global = true)]
    max_nodes: Option<u64>,
    #[arg(long, num_args = 2, value_names = ["I", "J"], global = true)]
    pair: Option<Vec<usize>>,
    #[arg(long, global = true)]
    out: Option<PathBuf>,
    #[arg(long, value_enum, global = true)]
    format: Option<OutputFormat>,
    /// Comma-separated check families, or `all`.
    #[arg(long, global = true)]
    checks: Option<String>,
    /// Largest network for brute-force index sums.
    #[arg(long = "brute-max", global = true)]
    brute_max: Option<usize>,
    #[arg(long, global = true)]
    config: Option<PathBuf>,
    /// Run data-parallel loops sequentially.
    #[arg(long, global = true)]
    sequential: bool,
    #[arg(long = "inject-fault", hide = true, global = true)]
    inject_fault: bool,
}

/// Fully resolved settings for one invocation.
#[derive(Debug, Clone, PartialEq)]
pub struct RunConfig {
    pub command: CommandKind,
    pub q: Option<u32>,
    pub q_max: Option<u32>,
    pub t: Option<u32>,
    pub t_max: Option<u32>,
    pub mode: Mode,
    pub max_nodes: u64,
    pub pair: Option<(usize, usize)>,
    pub out: Option<PathBuf>,
    pub format: OutputFormat,
    pub checks: Vec<verify::CheckFamily>,
    pub brute_max: usize,
    pub exec: Execution,
    pub inject_fault: bool,
}

impl RunConfig {
    fn q_range(&self, default: (u32, u32)) -> Result<Vec<u32>> {
        let lo = self.q.unwrap_or(default.0);
        let hi = self.q_max.unwrap_or(if self.q.is_some() {
            lo
        } else {
            default.1.max(lo)
        });
        inclusive("q", lo, hi, 1)
    }

    fn t_range(&self, default: (u32, u32)) -> Result<Vec<u32>> {
        let lo = self.t.unwrap_or(default.0);
        let hi = self.t_max.unwrap_or(if self.t.is_some() {
            lo
        } else {
            default.1.max(lo)
        });
        inclusive("t", lo, hi, 0)
    }

    fn single(&self) -> Result<(u32, u32)> {
        let q = self.q.unwrap_or(1);
        if q == 0 {
            return Err(Error::Parameter("q must be at least 1".into()));
        }
        Ok((q, self.t.unwrap_or(0)))
    }

    pub fn numeric_mode(&self) -> NumericMode {
        match self.mode {
            Mode::Exact => NumericMode::Exact,
            Mode::Float => NumericMode::Float,
        }
    }
}

fn inclusive(name: &str, lo: u32, hi: u32, min: u32) -> Result<Vec<u32>> {
    if lo < min {
        return Err(Error::Parameter(format!("{name} must be at least {min}")));
    }
    if hi < lo {
        return Err(Error::Parameter(format!(
            "{name} range {lo}..={hi} is empty"
        )));
    }
    Ok((lo..=hi).collect())
}

/// Parses a flat `key = value` file; `#` starts a comment.
pub fn parse_config_text(text: &str) -> Result<BTreeMap<String, String>> {
    let mut out = BTreeMap::new();
    for (n, raw) in text.lines().enumerate() {
        let line = raw.split('#').next().unwrap_or("").trim();
        if line.is_empty() {
            continue;
        }
        let (key, value) = line.split_once('=').ok_or_else(|| {
            Error::Parameter(format!("config line {}: expected key = value", n + 1))
        })?;
        let key = key.trim().replace('-', "_");
        const KNOWN: [&str; 11] = [
            "q",
            "q_max",
            "t",
            "t_max",
            "mode",
            "max_nodes",
            "pair",
            "out",
            "format",
            "checks",
            "brute_max",
        ];
        if !KNOWN.contains(&key.as_str()) {
            return Err(Error::Parameter(format!(
                "config line {}: unknown key '{key}'",
                n + 1
            )));
        }
        out.insert(key, value.trim().to_string());
    }
    Ok(out)
}

fn parse_value<T: std::str::FromStr>(key: &str, value: &str) -> Result<T> {
    value
        .parse()
        .map_err(|_| Error::Parameter(format!("config value for {key} is invalid: '{value}'")))
}

fn parse_enum<T: ValueEnum>(key: &str, value: &str) -> Result<T> {
    T::from_str(value, true)
        .map_err(|_| Error::Parameter(format!("config value for {key} is invalid: '{value}'")))
}

fn resolve(command: CommandKind, flags: Flags) -> Result<RunConfig> {
    let file = match &flags.config {
        Some(path) => parse_config_text(&fs::read_to_string(path)?)?,
        None => BTreeMap::new(),
    };
    let get = |k: &str| file.get(k).map(String::as_str);
    let num = |k: &str| -> Result<Option<u32>> { get(k).map(|v| parse_value(k, v)).transpose() };

    let pair = match flags.pair {
        Some(p) => Some((p[0], p[1])),
        None => match get("pair") {
            Some(v) => {
                let parts: Vec<&str> = v
                    .split(|c: char| c == ',' || c.is_whitespace())
                    .filter(|s| !s.is_empty())
                    .collect();
                if parts.len() != 2 {
                    return Err(Error::Parameter(format!(
                        "config value for pair is invalid: '{v}'"
                    )));
                }
                Some((
                    parse_value("pair", parts[0])?,
                    parse_value("pair", parts[1])?,
                ))
            }
            None => None,
        },
    };
    let checks = match flags.checks.as_deref().or(get("checks")) {
        Some(list) => verify::parse_families(list)?,
        None => verify::CheckFamily::ALL.to_vec(),
    };

    Ok(RunConfig {
        command,
        q: flags.q.or(num("q")?),
        q_max: flags.q_max.or(num("q_max")?),
        t: flags.t.or(num("t")?),
        t_max: flags.t_max.or(num("t_max")?),
        mode: match flags.mode {
            Some(m) => m,
            None => get("mode")
                .map(|v| parse_enum("mode", v))
                .transpose()?
                .unwrap_or(Mode::Exact),
        },
        max_nodes: match flags.max_nodes {
            Some(m) => m,
            None => get("max_nodes")
                .map(|v| parse_value("max_nodes", v))
                .transpose()?
                .unwrap_or(DEFAULT_MAX_NODES),
        },
        pair,
        out: flags.out.or_else(|| get("out").map(PathBuf::from)),
        format: match flags.format {
            Some(f) => f,
            None => get("format")
                .map(|v| parse_enum("format", v))
                .transpose()?
                .unwrap_or(OutputFormat::Csv),
        },
        checks,
        brute_max: match flags.brute_max {
            Some(b) => b,
            None => get("brute_max")
                .map(|v| parse_value("brute_max", v))
                .transpose()?
                .unwrap_or(DEFAULT_BRUTE_MAX),
        },
        exec: if flags.sequential {
            Execution::Sequential
        } else {
            Execution::Parallel
        },
        inject_fault: flags.inject_fault,
    })
}

/// Parses `args` (program name first) into a [`RunConfig`].
pub fn parse_args<I, T>(args: I) -> std::result::Result<Result<RunConfig>, clap::Error>
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = Cli::try_parse_from(args)?;
    Ok(resolve(cli.command, cli.flags))
}

fn exit_code(e: &Error) -> i32 {
    match e {
        Error::SizeLimit { .. } => EXIT_SIZE,
        Error::Parameter(_)
        | Error::UnknownNode(_)
        | Error::Genealogy { .. }
        | Error::SamePair(_) => EXIT_USAGE,
        _ => EXIT_VERIFY_FAILED,
    }
}

/// Runs one invocation and returns the process exit code.
pub fn run<I, T>(args: I, stdout: &mut dyn Write, stderr: &mut dyn Write) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let config = match parse_args(args) {
        Ok(Ok(c)) => c,
        Ok(Err(e)) => {
            let _ = writeln!(stderr, "error: {e}");
            return exit_code(&e);
        }
        Err(e) => {
            let code = if e.use_stderr() { EXIT_USAGE } else { EXIT_OK };
            let rendered = e.render().to_string();
            let _ = if e.use_stderr() {
                write!(stderr, "{rendered}")
            } else {
                write!(stdout, "{rendered}")
            };
            return code;
        }
    };
    match execute(&config, stdout, stderr) {
        Ok(code) => code,
        Err(e) => {
            let _ = writeln!(stderr, "error: {e}");
            exit_code(&e)
        }
    }
}

/// Runs a resolved configuration.
pub fn execute(config: &RunConfig, stdout: &mut dyn Write, stderr: &mut dyn Write) -> Result<i32> {
    let mut file;
    let out: &mut dyn Write = match &config.out {
        Some(path) => {
            file = io::BufWriter::new(fs::File::create(path)?);
            &mut file
        }
        None => stdout,
    };
    let code = match config.command {
        CommandKind::Generate => cmd_generate(config, out)?,
        CommandKind::Resist => cmd_resist(config, out)?,
        CommandKind::Indices => cmd_indices(config, out)?,
        CommandKind::Verify => cmd_verify(config, out, stderr)?,
        CommandKind::Sweep => cmd_sweep(config, out, stderr)?,
    };
    out.flush()?;
    Ok(code)
}

fn cmd_generate(config: &RunConfig, out: &mut dyn Write) -> Result<i32> {
    let (q, t) = config.single()?;
    let network = build_network(q, t, config.max_nodes)?;
    let text = match config.format {
        OutputFormat::Csv => network.to_node_table(),
        OutputFormat::Edges => network.to_edge_list(),
        OutputFormat::Dot => network.to_dot(),
        OutputFormat::Json => serde_json::to_string_pretty(&network.metadata())? + "\n",
    };
    out.write_all(text.as_bytes())?;
    Ok(EXIT_OK)
}

fn cmd_resist(config: &RunConfig, out: &mut dyn Write) -> Result<i32> {
    let (q, t) = config.single()?;
    let (i, j) = config
        .pair
        .ok_or_else(|| Error::Parameter("resist needs --pair I J".into()))?;
    let network = build_network(q, t, config.max_nodes)?;
    network.node(i)?;
    network.node(j)?;
    if i == j {
        writeln!(out, "0")?;
        return Ok(EXIT_OK);
    }
    let recursive = RecursiveResistance::new(&network).resistance(i, j)?;
    writeln!(out, "recursion: {}", render(&recursive))?;
    let matched = match config.mode {
        Mode::Exact => {
            let oracle = ExactOracle::with_ground(&network, 0, config.exec)?;
            let value = oracle.resistance(i, j)?;
            writeln!(out, "oracle: {}", render(&value))?;
            value == recursive
        }
        Mode::Float => {
            let value = FloatOracle::new(&network)?.resistance(i, j);
            let expected = to_f64(&recursive);
            writeln!(out, "oracle: {}", render_sig(&float_exact(value), 12))?;
            ((value - expected) / expected).abs() < FLOAT_TOLERANCE
        }
    };
    writeln!(out, "float: {}", render_sig(&recursive, 12))?;
    let verdict = if matched { "MATCH" } else { "MISMATCH" };
    writeln!(out, "{} {verdict}", render(&recursive))?;
    Ok(if matched { EXIT_OK } else { EXIT_VERIFY_FAILED })
}

fn float_exact(v: f64) -> crate::Exact {
    num_rational::BigRational::from_float(v).unwrap_or_else(crate::Exact::zero)
}

fn cmd_indices(config: &RunConfig, out: &mut dyn Write) -> Result<i32> {
    let (q, _) = config.single()?;
    writeln!(out, "{}", IndexReport::CSV_HEADER)?;
    for t in config.t_range((0, 0))? {
        let nodes = graph::node_count(q, t);
        if nodes > config.max_nodes.into() {
            return Err(Error::SizeLimit {
                nodes,
                limit: config.max_nodes,
            });
        }
        let mut report = IndexReport::closed_form(q, t);
        report.merge(&indices::indices_by_recursion(q, t))?;
        let mut provenance = report.provenance();
        if nodes <= config.brute_max.into() {
            let network = build_network(q, t, config.max_nodes)?;
            match config.mode {
                Mode::Exact => {
                    let oracle = ExactOracle::with_ground(&network, 0, config.exec)?;
                    report.merge(&indices::brute_force_with(&network, &oracle, config.exec))?;
                    provenance = report.provenance();
                }
                Mode::Float => {
                    let oracle = FloatOracle::new(&network)?;
                    let brute = indices::brute_force_float(&network, &oracle, config.exec);
                    let pairs = [
                        ("Kirchhoff index", brute.kirchhoff, &report.kirchhoff.value),
                        (
                            "additive degree-Kirchhoff index",
                            brute.additive,
                            &report.additive.value,
                        ),
                        (
                            "multiplicative degree-Kirchhoff index",
                            brute.multiplicative,
                            &report.multiplicative.value,
                        ),
                    ];
                    for (quantity, float, exact) in pairs {
                        let e = to_f64(exact);
                        if ((float - e) / e).abs() >= FLOAT_TOLERANCE {
                            return Err(Error::ProvenanceMismatch {
                                quantity,
                                left: render(exact),
                                right: format!("{float} (brute-force-float)"),
                            });
                        }
                    }
                    provenance.push_str("+brute-force-float");
                }
            }
        }
        let row = report.csv_row();
        let (head, _) = row.rsplit_once(',').expect("row has a provenance column");
        writeln!(out, "{head},{provenance}")?;
    }
    Ok(EXIT_OK)
}

fn cmd_verify(config: &RunConfig, out: &mut dyn Write, stderr: &mut dyn Write) -> Result<i32> {
    let scope = VerifyScope {
        qs: config.q_range((1, 3))?,
        ts: config.t_range((0, 2))?,
        families: config.checks.clone(),
        max_nodes: config.max_nodes,
        exec: config.exec,
        closed_forms: if config.inject_fault {
            ClosedForms::with_corrupted_kirchhoff()
        } else {
            ClosedForms::default()
        },
        ..VerifyScope::default()
    };
    let mut write_error = None;
    let report = verify::run_checks(&scope, &mut |o| {
        if let Err(e) = writeln!(out, "{o}") {
            write_error.get_or_insert(e);
        }
    })?;
    if let Some(e) = write_error {
        return Err(e.into());
    }
    writeln!(out, "{}", report.summary())?;
    if report.passed() {
        Ok(EXIT_OK)
    } else {
        for o in report.failures() {
            writeln!(stderr, "failed: {o}")?;
        }
        Ok(EXIT_VERIFY_FAILED)
    }
}

pub const SWEEP_HEADER: &str = "q,t,N,avg,avg_f,limit,limit_f,rel_gap_f,side,converging";

fn cmd_sweep(config: &RunConfig, out: &mut dyn Write, stderr: &mut dyn Write) -> Result<i32> {
    writeln!(out, "{SWEEP_HEADER}")?;
    let mut above = 0usize;
    let mut stalled = 0usize;
    for q in config.q_range((1, 1))? {
        let limit = indices::avg_resistance_limit(q);
        let mut previous: Option<crate::Exact> = None;
        for t in config.t_range((0, 0))? {
            let avg = indices::avg_resistance(q, t);
            let gap = relative_gap(&avg, &limit);
            let side = if avg > limit {
                above += 1;
                "above"
            } else if avg < limit {
                "below"
            } else {
                "equal"
            };
            let distance = (&avg - &limit).abs();
            let converging = match &previous {
                None => "-",
                Some(p) if &distance < p => "yes",
                Some(_) => {
                    stalled += 1;
                    "no"
                }
            };
            previous = Some(distance);
            writeln!(
                out,
                "{q},{t},{},{},{},{},{},{},{side},{converging}",
                from_biguint(&graph::node_count(q, t)),
                render(&avg),
                render_sig(&avg, 12),
                render(&limit),
                render_sig(&limit, 12),
                render_sig(&gap, 12),
            )?;
        }
    }
    if stalled > 0 {
        writeln!(
            stderr,
            "warning: {stalled} rows did not move closer to the limit"
        )?;
    }
    if above > 0 {
        writeln!(stderr, "note: {above} rows lie above the limit")?;
    }
    Ok(EXIT_OK)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn run_str(args: &[&str]) -> (i32, String, String) {
        let mut out = Vec::new();
        let mut err = Vec::new();
        let code = run(
            std::iter::once("simres").chain(args.iter().copied()),
            &mut out,
            &mut err,
        );
        (
            code,
            String::from_utf8(out).unwrap(),
            String::from_utf8(err).unwrap(),
        )
    }

    #[test]
    fn config_text_parsing() {
        let m =
            parse_config_text("# comment\nq = 2\nt-max=3 # trailing\n\nmode = float\n").unwrap();
        assert_eq!(m["q"], "2");
        assert_eq!(m["t_max"], "3");
        assert_eq!(m["mode"], "float");
        assert!(parse_config_text("q 2").is_err());
        assert!(parse_config_text("colour = red").is_err());
    }

    #[test]
    fn ranges_are_validated() {
        assert_eq!(
            run_str(&["sweep", "--t", "3", "--t-max", "1"]).0,
            EXIT_USAGE
        );
        assert_eq!(run_str(&["generate", "--q", "0"]).0, EXIT_USAGE);
        assert_eq!(run_str(&["indices", "--q", "0"]).0, EXIT_USAGE);
        assert_eq!(run_str(&["bogus"]).0, EXIT_USAGE);
    }

    #[test]
    fn resist_small() {
        let (code, out, _) = run_str(&["resist", "--q", "1", "--t", "1", "--pair", "0", "1"]);
        assert_eq!(code, 0);
        assert_eq!(out.lines().last(), Some("4/9 MATCH"));
        let (code, out, _) = run_str(&["resist", "--q", "1", "--t", "1", "--pair", "3", "3"]);
        assert_eq!((code, out.as_str()), (0, "0\n"));
        let (code, out, _) =
            run_str(&["resist", "--t", "1", "--pair", "0", "4", "--mode", "float"]);
        assert_eq!(code, 0);
        assert_eq!(out.lines().last(), Some("11/18 MATCH"));
        assert_eq!(
            run_str(&["resist", "--q", "1", "--t", "1", "--pair", "0", "9"]).0,
            EXIT_USAGE
        );
        assert_eq!(run_str(&["resist", "--q", "1", "--t", "1"]).0, EXIT_USAGE);
    }

    #[test]
    fn sweep_rows() {
        let (code, out, err) = run_str(&["sweep", "--q", "2", "--t", "0"]);
        assert_eq!(code, 0);
        let row: Vec<&str> = out.lines().nth(1).unwrap().split(',').collect();
        assert_eq!(&row[..4], &["2", "0", "4", "1/2"]);
        assert_eq!(row[5], "39/44");
        assert_eq!(row[8], "below");
        assert!(err.is_empty());
    }
}
