//! Command-line surface: flag/config/environment resolution, subcommand
//! drivers for enumeration, verification suites, coefficient tables, Monte
//! Carlo comparisons, moment tables and bijection round-trip demos, and
//! report emission with a reproducible parameter hash.
//!
//! Exit codes are a stable contract: 0 all checks passed, 1 a verification
//! failed, 2 usage or parameter error.

use std::collections::BTreeMap;
use std::path::PathBuf;
use std::str::FromStr;

use clap::{Parser, Subcommand, ValueEnum};
use num::{BigInt, One, Zero};
use serde_json::{json, Value};
use sha2::{Digest, Sha256};

use crate::bare::{
    generating_coefficient_bruteforce, generating_coefficients, verify_inverse_factorial_ode,
    verify_master_ode, verify_master_ode_with_weights, BareWeights,
};
use crate::bijections::{
    dyck_to_involution, dyck_to_plane_tree, edge_crossing_times, enumerate_dyck_paths,
    involution_to_dyck, plane_tree_to_dyck, verify_special_bare,
};
use crate::error::{Error, Result};
use crate::rational::{
    exact_int_div, factorial, format_rat, parse_rat, rat_to_string_pair, Rat,
};
use crate::report::{Mismatch, VerificationReport};
use crate::series::{Polynomial, SeriesSpec};
use crate::trees::{
    alpha_count, elementary_differential, enumerate_rooted_shapes, kappa_count, omega_weight,
    plane_trees, shape_of, symmetry_factor, tree_factorial, PlaneTree, RootedTreeShape, TreeLike,
    DEFAULT_MAX_N,
};
use crate::triangular::{dh_moment, verify_dk8_closed_form, verify_dk8_inversion};
use crate::wigner::{compare_sim_limit, verify_fond_lemma, CovarianceSpec, DiagonalLaw};

pub const EXIT_OK: i32 = 0;
pub const EXIT_VERIFY_FAILED: i32 = 1;
pub const EXIT_USAGE: i32 = 2;

const VERSION: &str = env!("CARGO_PKG_VERSION");
const CAP_ENV_VAR: &str = "BSF_MAX_N";

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum OutputFormat {
    Json,
    Csv,
    Text,
}

impl OutputFormat {
    fn name(self) -> &'static str {
        match self {
            OutputFormat::Json => "json",
            OutputFormat::Csv => "csv",
            OutputFormat::Text => "text",
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum TreeKind {
    Plane,
    Shapes,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum Suite {
    Identities,
    MasterOde,
    Inversion,
    SpecialBare,
    FondLemma,
    Dk8,
}

impl Suite {
    fn name(self) -> &'static str {
        match self {
            Suite::Identities => "identities",
            Suite::MasterOde => "master-ode",
            Suite::Inversion => "inversion",
            Suite::SpecialBare => "special-bare",
            Suite::FondLemma => "fond-lemma",
            Suite::Dk8 => "dk8",
        }
    }
}

/// Exact workbench for weighted tree sums, Wigner-type trace limits, and
/// triangular-operator moments.
#[derive(Debug, Parser)]
#[command(name = "bsf", version, about)]
pub struct Cli {
    /// Flat key=value config file; explicit flags override it.
    #[arg(long, global = true)]
    pub config: Option<PathBuf>,
    /// Hard cap on enumerated tree sizes (BSF_MAX_N overrides the config).
    #[arg(long, global = true)]
    pub cap: Option<usize>,
    /// Report format.
    #[arg(long, global = true, value_enum)]
    pub format: Option<OutputFormat>,
    /// Write the report to this file instead of stdout.
    #[arg(long, global = true)]
    pub output: Option<PathBuf>,
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// List all trees of a given size with their statistics.
    Enumerate {
        /// plane (ordered) trees or rooted unordered shapes
        #[arg(long, value_enum)]
        kind: Option<TreeKind>,
        /// number of nodes
        #[arg(long)]
        n: Option<usize>,
        /// degree function for the delta column
        #[arg(long)]
        psi: Option<String>,
    },
    /// Run a verification suite; exit 0 only if every statement is exact.
    Verify {
        #[arg(value_enum)]
        suite: Suite,
        /// largest tree size the suite touches
        #[arg(long)]
        max_n: Option<usize>,
        /// series truncation order
        #[arg(long)]
        order: Option<usize>,
        /// covariance kind: constant-one | inverse-linear | geometric:RHO | table:R0,R1,...
        #[arg(long)]
        cov: Option<String>,
        /// variance scale beta^2
        #[arg(long)]
        beta2: Option<String>,
        /// diagonal law: delta1 | discrete:V:P,V:P,...
        #[arg(long)]
        law: Option<String>,
        /// negative control: add 1 to the single weight B_k before verifying
        #[arg(long)]
        perturb_bk: Option<usize>,
    },
    /// Print generating coefficients, fast recursion vs brute-force sum.
    Series {
        /// weight family: ones | master:C0,C1,... | inverse-power:L | geometric:RHO | explicit:B1,B2,...
        #[arg(long)]
        weights: Option<String>,
        /// degree function: geometric | exponential | poly:C0,C1,... | coeffs:C0,C1,...
        #[arg(long)]
        psi: Option<String>,
        /// number of coefficients
        #[arg(long)]
        order: Option<usize>,
    },
    /// Compare Monte Carlo word traces with their exact limits.
    Wigner {
        /// word length
        #[arg(long)]
        k: Option<usize>,
        /// matrix dimension
        #[arg(long = "N")]
        n_dim: Option<usize>,
        #[arg(long)]
        trials: Option<usize>,
        #[arg(long)]
        seed: Option<u64>,
        /// covariance kind: constant-one | inverse-linear | geometric:RHO | table:R0,R1,...
        #[arg(long)]
        cov: Option<String>,
        /// variance scale beta^2
        #[arg(long)]
        beta2: Option<String>,
        /// diagonal law: delta1 | discrete:V:P,V:P,...
        #[arg(long)]
        law: Option<String>,
        /// additive slack C in the even-k acceptance band 3*stderr + C/N
        #[arg(long)]
        slack_c: Option<f64>,
        /// run every word length 1..=k
        #[arg(long)]
        sweep_k: bool,
        /// comma-separated list of dimensions to sweep at fixed k
        #[arg(long = "sweep-N")]
        sweep_n: Option<String>,
    },
    /// Moment table of the triangular operator with closed-form check.
    Triangular {
        /// largest moment index
        #[arg(long)]
        n_max: Option<usize>,
    },
    /// Bijection demo: trees, lattice paths and pair involutions.
    Dyck {
        /// half-length of the paths to enumerate
        #[arg(long)]
        k: Option<usize>,
        /// a single tree (balanced parentheses) to walk instead
        #[arg(long)]
        tree: Option<String>,
    },
}

/// Entry point used by the binary: parse, execute, print, map to exit code.
pub fn run() -> i32 {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(err) => {
            let _ = err.print();
            return if err.use_stderr() { EXIT_USAGE } else { EXIT_OK };
        }
    };
    let env_cap = std::env::var(CAP_ENV_VAR).ok();
    match execute(cli, env_cap.as_deref()) {
        Ok(outcome) => {
            if let Some(path) = &outcome.output_path {
                if let Err(err) = std::fs::write(path, &outcome.rendered) {
                    eprintln!("error: cannot write {}: {err}", path.display());
                    return EXIT_USAGE;
                }
            } else {
                print!("{}", outcome.rendered);
            }
            outcome.exit_code
        }
        Err(err) => {
            eprintln!("error: {err}");
            EXIT_USAGE
        }
    }
}

#[derive(Debug)]
pub struct Outcome {
    pub rendered: String,
    pub exit_code: i32,
    pub output_path: Option<PathBuf>,
}

/// Everything a report needs besides the payload itself.
struct Envelope {
    command: String,
    config: BTreeMap<String, String>,
    seed: Option<(u64, String)>,
    payload: Value,
    table: Table,
    all_pass: bool,
}

struct Table {
    columns: Vec<&'static str>,
    rows: Vec<Vec<String>>,
}

/// Merges defaults, config-file entries, the environment cap and explicit
/// flags (in that precedence order) and records every resolved value so the
/// report can round-trip the full configuration.
struct Resolver {
    file: BTreeMap<String, String>,
    resolved: BTreeMap<String, String>,
}

const KNOWN_KEYS: &[&str] = &[
    "beta2", "cap", "cov", "format", "k", "kind", "law", "max-n", "n", "N", "n-max", "order",
    "perturb-bk", "psi", "seed", "slack-c", "sweep-k", "sweep-N", "trials", "weights",
];

impl Resolver {
    fn from_file(path: Option<&PathBuf>) -> Result<Self> {
        let mut file = BTreeMap::new();
        if let Some(path) = path {
            let text = std::fs::read_to_string(path)?;
            file = parse_config_text(&text)?;
        }
        Ok(Resolver {
            file,
            resolved: BTreeMap::new(),
        })
    }

    fn record(&mut self, key: &str, value: String) {
        self.resolved.insert(key.to_string(), value);
    }

    fn lookup<T: FromStr>(&self, key: &str) -> Result<Option<T>> {
        match self.file.get(key) {
            None => Ok(None),
            Some(raw) => raw.parse().map(Some).map_err(|_| {
                Error::Parse(format!("config key {key}: cannot parse value {raw:?}"))
            }),
        }
    }

    /// flag > config > default.
    fn take<T: FromStr + ToString>(&mut self, key: &str, flag: Option<T>, default: T) -> Result<T> {
        let value = match flag {
            Some(v) => v,
            None => self.lookup(key)?.unwrap_or(default),
        };
        self.record(key, value.to_string());
        Ok(value)
    }

    /// Required value: flag > config, else a usage error.
    fn take_required<T: FromStr + ToString>(&mut self, key: &str, flag: Option<T>) -> Result<T> {
        let value = match flag {
            Some(v) => Some(v),
            None => self.lookup(key)?,
        };
        match value {
            Some(v) => {
                self.record(key, v.to_string());
                Ok(v)
            }
            None => Err(Error::Parse(format!("missing required parameter --{key}"))),
        }
    }

    /// Optional value with no default at all.
    fn take_opt<T: FromStr + ToString>(&mut self, key: &str, flag: Option<T>) -> Result<Option<T>> {
        let value = match flag {
            Some(v) => Some(v),
            None => self.lookup(key)?,
        };
        if let Some(v) = &value {
            self.record(key, v.to_string());
        }
        Ok(value)
    }

    /// The enumeration cap: flag > BSF_MAX_N > config > built-in default.
    fn take_cap(&mut self, flag: Option<usize>, env: Option<&str>) -> Result<usize> {
        let from_env = match env {
            None => None,
            Some(raw) => Some(raw.parse::<usize>().map_err(|_| {
                Error::Parse(format!("{CAP_ENV_VAR}: cannot parse value {raw:?}"))
            })?),
        };
        let value = flag
            .or(from_env)
            .or(self.lookup("cap")?)
            .unwrap_or(DEFAULT_MAX_N);
        self.record("cap", value.to_string());
        Ok(value)
    }
}

fn parse_config_text(text: &str) -> Result<BTreeMap<String, String>> {
    let mut map = BTreeMap::new();
    for (idx, raw) in text.lines().enumerate() {
        let line = raw.trim();
        if line.is_empty() || line.starts_with('#') || line.starts_with(';') {
            continue;
        }
        let (key, value) = line.split_once('=').ok_or_else(|| {
            Error::Parse(format!("config line {}: expected key = value", idx + 1))
        })?;
        let key = key.trim().to_string();
        if !KNOWN_KEYS.contains(&key.as_str()) {
            return Err(Error::Parse(format!(
                "config line {}: unknown key {key:?}",
                idx + 1
            )));
        }
        map.insert(key, value.trim().to_string());
    }
    Ok(map)
}

pub fn execute(cli: Cli, env_cap: Option<&str>) -> Result<Outcome> {
    let mut resolver = Resolver::from_file(cli.config.as_ref())?;
    let cap = resolver.take_cap(cli.cap, env_cap)?;
    let format = match cli.format {
        Some(f) => f,
        None => match resolver.file.get("format").map(String::as_str) {
            None => OutputFormat::Json,
            Some("json") => OutputFormat::Json,
            Some("csv") => OutputFormat::Csv,
            Some("text") => OutputFormat::Text,
            Some(other) => {
                return Err(Error::Parse(format!("config key format: unknown value {other:?}")))
            }
        },
    };
    resolver.record("format", format.name().to_string());

    let envelope = match cli.command {
        Command::Enumerate { kind, n, psi } => cmd_enumerate(&mut resolver, cap, kind, n, psi)?,
        Command::Verify {
            suite,
            max_n,
            order,
            cov,
            beta2,
            law,
            perturb_bk,
        } => cmd_verify(&mut resolver, cap, suite, max_n, order, cov, beta2, law, perturb_bk)?,
        Command::Series { weights, psi, order } => cmd_series(&mut resolver, cap, weights, psi, order)?,
        Command::Wigner {
            k,
            n_dim,
            trials,
            seed,
            cov,
            beta2,
            law,
            slack_c,
            sweep_k,
            sweep_n,
        } => cmd_wigner(
            &mut resolver, cap, k, n_dim, trials, seed, cov, beta2, law, slack_c, sweep_k, sweep_n,
        )?,
        Command::Triangular { n_max } => cmd_triangular(&mut resolver, cap, n_max)?,
        Command::Dyck { k, tree } => cmd_dyck(&mut resolver, cap, k, tree)?,
    };

    let rendered = render(&envelope, format);
    Ok(Outcome {
        rendered,
        exit_code: if envelope.all_pass { EXIT_OK } else { EXIT_VERIFY_FAILED },
        output_path: cli.output,
    })
}

fn param_hash(command: &str, config: &BTreeMap<String, String>) -> String {
    let mut hasher = Sha256::new();
    hasher.update(command.as_bytes());
    hasher.update(b"\n");
    for (key, value) in config {
        hasher.update(key.as_bytes());
        hasher.update(b"=");
        hasher.update(value.as_bytes());
        hasher.update(b"\n");
    }
    hasher
        .finalize()
        .iter()
        .map(|b| format!("{b:02x}"))
        .collect()
}

fn render(envelope: &Envelope, format: OutputFormat) -> String {
    let hash = param_hash(&envelope.command, &envelope.config);
    match format {
        OutputFormat::Json => {
            let mut top = serde_json::Map::new();
            top.insert("version".into(), json!(VERSION));
            top.insert("command".into(), json!(envelope.command));
            top.insert("config".into(), json!(envelope.config));
            top.insert("param_hash".into(), json!(hash));
            if let Some((seed, generator)) = &envelope.seed {
                top.insert("seed".into(), json!(seed));
                top.insert("generator".into(), json!(generator));
            }
            top.insert("all_pass".into(), json!(envelope.all_pass));
            top.insert("payload".into(), envelope.payload.clone());
            let mut out = serde_json::to_string_pretty(&Value::Object(top))
                .expect("report serialization cannot fail");
            out.push('\n');
            out
        }
        OutputFormat::Csv => {
            let mut out = String::new();
            out.push_str(&format!("# version = {VERSION}\n"));
            out.push_str(&format!("# command = {}\n", envelope.command));
            for (key, value) in &envelope.config {
                out.push_str(&format!("# {key} = {value}\n"));
            }
            out.push_str(&format!("# param_hash = {hash}\n"));
            if let Some((seed, generator)) = &envelope.seed {
                out.push_str(&format!("# seed = {seed}\n# generator = {generator}\n"));
            }
            out.push_str(&format!("# all_pass = {}\n", envelope.all_pass));
            out.push_str(&envelope.table.columns.join(","));
            out.push('\n');
            for row in &envelope.table.rows {
                out.push_str(&row.join(","));
                out.push('\n');
            }
            out
        }
        OutputFormat::Text => {
            let mut out = String::new();
            out.push_str(&format!("bsf {VERSION} — {}\n", envelope.command));
            for (key, value) in &envelope.config {
                out.push_str(&format!("  {key} = {value}\n"));
            }
            out.push_str(&format!("  param_hash = {hash}\n"));
            let table = &envelope.table;
            let mut widths: Vec<usize> = table.columns.iter().map(|c| c.len()).collect();
            for row in &table.rows {
                for (i, cell) in row.iter().enumerate() {
                    widths[i] = widths[i].max(cell.len());
                }
            }
            let fmt_row = |cells: Vec<String>| -> String {
                cells
                    .iter()
                    .zip(&widths)
                    .map(|(c, w)| format!("{c:<w$}"))
                    .collect::<Vec<_>>()
                    .join("  ")
                    .trim_end()
                    .to_string()
            };
            out.push('\n');
            out.push_str(&fmt_row(
                table.columns.iter().map(|c| c.to_string()).collect(),
            ));
            out.push('\n');
            for row in &table.rows {
                out.push_str(&fmt_row(row.clone()));
                out.push('\n');
            }
            out.push_str(&format!(
                "\n{}\n",
                if envelope.all_pass { "all checks passed" } else { "FAILED" }
            ));
            out
        }
    }
}

// ---------------------------------------------------------------------------
// parameter-string parsers

fn parse_rat_list(s: &str) -> Result<Vec<Rat>> {
    s.split(',').map(|p| parse_rat(p.trim())).collect()
}

/// geometric | exponential | poly:C0,C1,... | coeffs:C0,C1,...
pub fn parse_psi_spec(s: &str) -> Result<SeriesSpec> {
    match s.split_once(':') {
        None => match s {
            "geometric" => Ok(SeriesSpec::Geometric),
            "exponential" => Ok(SeriesSpec::Exponential),
            _ => Err(Error::Parse(format!("unknown degree function {s:?}"))),
        },
        Some(("poly", list)) => SeriesSpec::polynomial(parse_rat_list(list)?),
        Some(("coeffs", list)) => SeriesSpec::explicit(parse_rat_list(list)?),
        Some((kind, _)) => Err(Error::Parse(format!("unknown degree function kind {kind:?}"))),
    }
}

/// ones | master:C0,C1,... | inverse-power:L | geometric:RHO | explicit:B1,B2,...
pub fn parse_weight_spec(s: &str, k_max: usize) -> Result<BareWeights> {
    match s.split_once(':') {
        None => match s {
            "ones" => Ok(BareWeights::ones(k_max)),
            _ => Err(Error::Parse(format!("unknown weight family {s:?}"))),
        },
        Some(("master", list)) => {
            let poly = Polynomial::new(parse_rat_list(list)?);
            Ok(BareWeights::master(&poly, k_max))
        }
        Some(("inverse-power", l)) => {
            let l: u32 = l
                .parse()
                .map_err(|_| Error::Parse(format!("inverse-power needs an integer, got {l:?}")))?;
            Ok(BareWeights::inverse_factorial_power(l, k_max))
        }
        Some(("geometric", rho)) => Ok(BareWeights::geometric(&parse_rat(rho)?, k_max)),
        Some(("explicit", list)) => Ok(BareWeights::explicit(parse_rat_list(list)?)),
        Some((kind, _)) => Err(Error::Parse(format!("unknown weight family kind {kind:?}"))),
    }
}

/// constant-one | inverse-linear | geometric:RHO | table:R0,R1,...
pub fn parse_cov_spec(kind: &str, beta2: &str) -> Result<CovarianceSpec> {
    let beta_sq = parse_rat(beta2)?;
    match kind.split_once(':') {
        None => match kind {
            "constant-one" => CovarianceSpec::constant_one(beta_sq),
            "inverse-linear" => CovarianceSpec::inverse_linear(beta_sq),
            _ => Err(Error::Parse(format!("unknown covariance kind {kind:?}"))),
        },
        Some(("geometric", rho)) => CovarianceSpec::geometric(beta_sq, parse_rat(rho)?),
        Some(("table", list)) => CovarianceSpec::table(beta_sq, parse_rat_list(list)?),
        Some((k, _)) => Err(Error::Parse(format!("unknown covariance kind {k:?}"))),
    }
}

/// delta1 | discrete:V:P,V:P,...
pub fn parse_law_spec(s: &str) -> Result<DiagonalLaw> {
    match s.split_once(':') {
        None => match s {
            "delta1" => Ok(DiagonalLaw::delta_one()),
            _ => Err(Error::Parse(format!("unknown diagonal law {s:?}"))),
        },
        Some(("discrete", list)) => {
            let atoms = list
                .split(',')
                .map(|pair| {
                    let (v, p) = pair.split_once(':').ok_or_else(|| {
                        Error::Parse(format!("discrete law atom {pair:?}: expected VALUE:PROB"))
                    })?;
                    Ok((parse_rat(v.trim())?, parse_rat(p.trim())?))
                })
                .collect::<Result<Vec<_>>>()?;
            DiagonalLaw::new(atoms)
        }
        Some((kind, _)) => Err(Error::Parse(format!("unknown diagonal law kind {kind:?}"))),
    }
}

// ---------------------------------------------------------------------------
// subcommands

fn cmd_enumerate(
    r: &mut Resolver,
    cap: usize,
    kind: Option<TreeKind>,
    n: Option<usize>,
    psi: Option<String>,
) -> Result<Envelope> {
    let kind_str = match kind {
        Some(TreeKind::Plane) => "plane".to_string(),
        Some(TreeKind::Shapes) => "shapes".to_string(),
        None => r
            .lookup::<String>("kind")?
            .unwrap_or_else(|| "plane".to_string()),
    };
    r.record("kind", kind_str.clone());
    let n = r.take_required("n", n)?;
    let psi_str = r.take("psi", psi, "geometric".to_string())?;
    let psi = parse_psi_spec(&psi_str)?;

    let shapes: Vec<RootedTreeShape> = match kind_str.as_str() {
        "plane" => plane_trees(n, cap)?.map(|t| shape_of(&t)).collect(),
        "shapes" => enumerate_rooted_shapes(n, cap)?,
        other => return Err(Error::Parse(format!("unknown tree kind {other:?}"))),
    };
    // for kind = plane each row keeps its own embedding encoding
    let encodings: Vec<String> = match kind_str.as_str() {
        "plane" => plane_trees(n, cap)?.map(|t| t.encode()).collect(),
        _ => shapes.iter().map(|s| s.encode()).collect(),
    };

    let mut rows = Vec::new();
    let mut payload_rows = Vec::new();
    for (shape, encoding) in shapes.iter().zip(&encodings) {
        let tf = tree_factorial(shape);
        let sigma = symmetry_factor(shape);
        let alpha = alpha_count(shape)?;
        let kappa = kappa_count(shape);
        let delta = elementary_differential(shape, &psi);
        rows.push(vec![
            encoding.clone(),
            tf.to_string(),
            sigma.to_string(),
            alpha.to_string(),
            kappa.to_string(),
            format_rat(&delta),
        ]);
        payload_rows.push(json!({
            "encoding": encoding,
            "tree_factorial": tf.to_string(),
            "sigma": sigma.to_string(),
            "alpha": alpha.to_string(),
            "kappa": kappa.to_string(),
            "delta": rat_to_string_pair(&delta),
        }));
    }

    Ok(Envelope {
        command: "enumerate".into(),
        config: r.resolved.clone(),
        seed: None,
        payload: json!({ "count": rows.len(), "trees": payload_rows }),
        table: Table {
            columns: vec!["encoding", "tree_factorial", "sigma", "alpha", "kappa", "delta"],
            rows,
        },
        all_pass: true,
    })
}

#[allow(clippy::too_many_arguments)]
fn cmd_verify(
    r: &mut Resolver,
    cap: usize,
    suite: Suite,
    max_n: Option<usize>,
    order: Option<usize>,
    cov: Option<String>,
    beta2: Option<String>,
    law: Option<String>,
    perturb_bk: Option<usize>,
) -> Result<Envelope> {
    r.record("suite", suite.name().to_string());
    let reports: Vec<VerificationReport> = match suite {
        Suite::Identities => {
            let max_n = r.take("max-n", max_n, 8)?;
            verify_identities_suite(max_n, cap)?
        }
        Suite::MasterOde => {
            let order = r.take("order", order, 10)?;
            let perturb = r.take_opt("perturb-bk", perturb_bk)?;
            master_ode_suite(order, perturb)?
        }
        Suite::Inversion => {
            let order = r.take("order", order, 10)?;
            let mut reports = Vec::new();
            for l in 0..=2 {
                for psi in [SeriesSpec::Geometric, SeriesSpec::Exponential] {
                    reports.push(verify_inverse_factorial_ode(l, &psi, order)?);
                }
            }
            reports
        }
        Suite::SpecialBare => {
            let max_n = r.take("max-n", max_n, 8)?;
            let cov_str = r.take("cov", cov, "inverse-linear".to_string())?;
            let beta2_str = r.take("beta2", beta2, "2".to_string())?;
            let cov = parse_cov_spec(&cov_str, &beta2_str)?;
            vec![verify_special_bare(max_n, &cov, cap)?]
        }
        Suite::FondLemma => {
            let order = r.take("order", order, 8)?;
            match r.take_opt("cov", cov)? {
                Some(cov_str) => {
                    let beta2_str = r.take("beta2", beta2, "1".to_string())?;
                    let law_str = r.take("law", law, "delta1".to_string())?;
                    let cov = parse_cov_spec(&cov_str, &beta2_str)?;
                    let law = parse_law_spec(&law_str)?;
                    vec![verify_fond_lemma(&cov, &law, order, cap)?]
                }
                None => {
                    let pairs = default_fond_lemma_pairs()?;
                    pairs
                        .iter()
                        .map(|(cov, law)| verify_fond_lemma(cov, law, order, cap))
                        .collect::<Result<Vec<_>>>()?
                }
            }
        }
        Suite::Dk8 => {
            let max_n = r.take("max-n", max_n, 7)?;
            let order = r.take("order", order, 10)?;
            vec![
                verify_dk8_closed_form(max_n, cap)?,
                verify_dk8_inversion(order, cap)?,
            ]
        }
    };

    let all_pass = reports.iter().all(VerificationReport::is_exact);
    let rows = reports
        .iter()
        .map(|rep| {
            let (n, lhs, rhs) = match &rep.first_mismatch {
                Some(m) => (m.n.to_string(), m.lhs.clone(), m.rhs.clone()),
                None => (String::new(), String::new(), String::new()),
            };
            vec![
                rep.statement.clone(),
                params_oneline(&rep.parameters),
                if rep.is_exact() { "exact".into() } else { "FAIL".into() },
                n,
                lhs,
                rhs,
            ]
        })
        .collect();

    Ok(Envelope {
        command: format!("verify {}", suite.name()),
        config: r.resolved.clone(),
        seed: None,
        payload: json!({ "suite": suite.name(), "reports": reports }),
        table: Table {
            columns: vec!["statement", "parameters", "status", "mismatch_n", "lhs", "rhs"],
            rows,
        },
        all_pass,
    })
}

/// Compact single-cell rendering of a parameter object for csv/text tables.
fn params_oneline(params: &Value) -> String {
    match params.as_object() {
        None => params.to_string().replace(',', ";"),
        Some(map) => map
            .iter()
            .map(|(k, v)| {
                let v = match v {
                    Value::String(s) => s.clone(),
                    other => other.to_string(),
                };
                format!("{k}={}", v.replace(',', ";"))
            })
            .collect::<Vec<_>>()
            .join("; "),
    }
}

fn cmd_series(
    r: &mut Resolver,
    cap: usize,
    weights: Option<String>,
    psi: Option<String>,
    order: Option<usize>,
) -> Result<Envelope> {
    let order = r.take("order", order, 8)?;
    let weights_str = r.take("weights", weights, "ones".to_string())?;
    let psi_str = r.take("psi", psi, "geometric".to_string())?;
    let weights = parse_weight_spec(&weights_str, order)?;
    let psi = parse_psi_spec(&psi_str)?;

    let fast = generating_coefficients(&weights, &psi, order)?;
    let mut rows = Vec::new();
    let mut payload_rows = Vec::new();
    let mut all_pass = true;
    for n in 1..=order {
        let brute = generating_coefficient_bruteforce(&weights, &psi, n, cap)?;
        let agree = fast.coeff(n)? == &brute;
        all_pass &= agree;
        rows.push(vec![
            n.to_string(),
            format_rat(fast.coeff(n)?),
            format_rat(&brute),
            agree.to_string(),
        ]);
        payload_rows.push(json!({
            "n": n,
            "fast": rat_to_string_pair(fast.coeff(n)?),
            "bruteforce": rat_to_string_pair(&brute),
            "agree": agree,
        }));
    }

    Ok(Envelope {
        command: "series".into(),
        config: r.resolved.clone(),
        seed: None,
        payload: json!({ "coefficients": payload_rows }),
        table: Table {
            columns: vec!["n", "fast", "bruteforce", "agree"],
            rows,
        },
        all_pass,
    })
}

#[allow(clippy::too_many_arguments)]
fn cmd_wigner(
    r: &mut Resolver,
    cap: usize,
    k: Option<usize>,
    n_dim: Option<usize>,
    trials: Option<usize>,
    seed: Option<u64>,
    cov: Option<String>,
    beta2: Option<String>,
    law: Option<String>,
    slack_c: Option<f64>,
    sweep_k: bool,
    sweep_n: Option<String>,
) -> Result<Envelope> {
    let k = r.take("k", k, 4)?;
    let n_dim = r.take("N", n_dim, 200)?;
    let trials = r.take("trials", trials, 400)?;
    let seed = r.take("seed", seed, 7)?;
    let cov_str = r.take("cov", cov, "inverse-linear".to_string())?;
    let beta2_str = r.take("beta2", beta2, "2".to_string())?;
    let law_str = r.take("law", law, "delta1".to_string())?;
    let slack_c = r.take("slack-c", slack_c, 8.0)?;
    let sweep_k = if sweep_k {
        r.record("sweep-k", "true".to_string());
        true
    } else {
        r.lookup::<bool>("sweep-k")?.unwrap_or(false)
    };
    let sweep_n = r.take_opt("sweep-N", sweep_n)?;

    let cov = parse_cov_spec(&cov_str, &beta2_str)?;
    let law = parse_law_spec(&law_str)?;
    let ks: Vec<usize> = if sweep_k { (1..=k).collect() } else { vec![k] };
    let ns: Vec<usize> = match &sweep_n {
        None => vec![n_dim],
        Some(list) => list
            .split(',')
            .map(|p| {
                p.trim()
                    .parse()
                    .map_err(|_| Error::Parse(format!("sweep-N: cannot parse {p:?}")))
            })
            .collect::<Result<Vec<_>>>()?,
    };

    let mut rows = Vec::new();
    let mut payload_rows = Vec::new();
    let mut all_pass = true;
    for &n in &ns {
        for &kk in &ks {
            let report = compare_sim_limit(kk, &cov, &law, n, trials, seed, slack_c, cap)?;
            all_pass &= report.pass;
            rows.push(vec![
                kk.to_string(),
                n.to_string(),
                trials.to_string(),
                format!("{:.6}", report.mean),
                format!("{:.6}", report.stderr),
                format!("{:.6}", report.exact_limit),
                format!("{:.3}", report.z),
                report.pass.to_string(),
            ]);
            payload_rows.push(serde_json::to_value(&report).expect("report serializes"));
        }
    }

    Ok(Envelope {
        command: "wigner".into(),
        config: r.resolved.clone(),
        seed: Some((seed, "chacha8".to_string())),
        payload: json!({ "rows": payload_rows }),
        table: Table {
            columns: vec!["k", "N", "trials", "mean", "stderr", "exact_limit", "z", "pass"],
            rows,
        },
        all_pass,
    })
}

fn cmd_triangular(r: &mut Resolver, cap: usize, n_max: Option<usize>) -> Result<Envelope> {
    let n_max = r.take("n-max", n_max, 7)?;
    let mut rows = Vec::new();
    let mut payload_rows = Vec::new();
    let mut all_pass = true;
    for n in 1..=n_max {
        let moment = dh_moment(n, cap)?;
        let closed = Rat::new(BigInt::from(n).pow(n as u32), factorial(n + 1));
        let matches = moment == closed;
        all_pass &= matches;
        let (num, den) = rat_to_string_pair(&moment);
        rows.push(vec![
            n.to_string(),
            num.clone(),
            den.clone(),
            matches.to_string(),
        ]);
        payload_rows.push(json!({
            "n": n,
            "moment": [num, den],
            "closed_form_match": matches,
        }));
    }

    Ok(Envelope {
        command: "triangular".into(),
        config: r.resolved.clone(),
        seed: None,
        payload: json!({ "moments": payload_rows }),
        table: Table {
            columns: vec!["n", "numerator", "denominator", "closed_form_match"],
            rows,
        },
        all_pass,
    })
}

fn cmd_dyck(
    r: &mut Resolver,
    cap: usize,
    k: Option<usize>,
    tree: Option<String>,
) -> Result<Envelope> {
    let tree = r.take_opt("tree", tree)?;
    if let Some(encoding) = tree {
        let t = PlaneTree::decode(&encoding)?;
        if t.size() > cap {
            return Err(Error::SizeRange { n: t.size(), max: cap });
        }
        let path = plane_tree_to_dyck(&t);
        let sigma = dyck_to_involution(&path);
        let round_trip = dyck_to_plane_tree(&path) == t && involution_to_dyck(&sigma)? == path;
        let crossings = edge_crossing_times(&t);
        let rows = crossings
            .iter()
            .map(|c| {
                vec![
                    c.subtree_size.to_string(),
                    c.s_v.to_string(),
                    c.s_w.to_string(),
                ]
            })
            .collect();
        return Ok(Envelope {
            command: "dyck".into(),
            config: r.resolved.clone(),
            seed: None,
            payload: json!({
                "tree": t.encode(),
                "path": path.to_updown(),
                "involution": sigma.to_json(),
                "edge_times": crossings.iter().map(|c| json!({
                    "subtree_size": c.subtree_size,
                    "s_v": c.s_v,
                    "s_w": c.s_w,
                })).collect::<Vec<_>>(),
                "round_trip": round_trip,
            }),
            table: Table {
                columns: vec!["subtree_size", "s_v", "s_w"],
                rows,
            },
            all_pass: round_trip,
        });
    }

    let k = r.take("k", k, 4)?;
    if k + 1 > cap {
        return Err(Error::SizeRange { n: k + 1, max: cap });
    }
    let mut rows = Vec::new();
    let mut payload_rows = Vec::new();
    let mut all_pass = true;
    for path in enumerate_dyck_paths(k) {
        let t = dyck_to_plane_tree(&path);
        let sigma = dyck_to_involution(&path);
        let round_trip = plane_tree_to_dyck(&t) == path && involution_to_dyck(&sigma)? == path;
        all_pass &= round_trip;
        let pairs = sigma
            .crossings()
            .iter()
            .map(|(i, j)| format!("{i}-{j}"))
            .collect::<Vec<_>>()
            .join(" ");
        rows.push(vec![
            path.to_updown(),
            t.encode(),
            pairs,
            round_trip.to_string(),
        ]);
        payload_rows.push(json!({
            "path": path.to_updown(),
            "tree": t.encode(),
            "involution": sigma.to_json(),
            "round_trip": round_trip,
        }));
    }

    Ok(Envelope {
        command: "dyck".into(),
        config: r.resolved.clone(),
        seed: None,
        payload: json!({ "count": payload_rows.len(), "paths": payload_rows }),
        table: Table {
            columns: vec!["path", "tree", "involution", "round_trip"],
            rows,
        },
        all_pass,
    })
}

// ---------------------------------------------------------------------------
// verification suites assembled from the library checks

/// The two per-shape product identities and the moment-sum normalization,
/// each over every rooted shape with at most max_n nodes.
pub fn verify_identities_suite(max_n: usize, cap: usize) -> Result<Vec<VerificationReport>> {
    Ok(vec![
        check_alpha_sigma(max_n, cap)?,
        check_alpha_tree_factorial(max_n, cap)?,
        check_moment_sum(max_n, cap)?,
    ])
}

fn check_alpha_sigma(max_n: usize, cap: usize) -> Result<VerificationReport> {
    let statement = "alpha(t) sigma(t) = n!/t!";
    let params = json!({ "max_n": max_n });
    for n in 1..=max_n {
        for shape in enumerate_rooted_shapes(n, cap)? {
            let lhs = alpha_count(&shape)? * symmetry_factor(&shape);
            let rhs = exact_int_div(&factorial(n), &tree_factorial(&shape))?;
            if lhs != rhs {
                return Ok(VerificationReport::fail(
                    statement,
                    params,
                    max_n,
                    Mismatch::new(n, &Rat::from_integer(lhs), &Rat::from_integer(rhs)),
                ));
            }
        }
    }
    Ok(VerificationReport::exact(statement, params, max_n))
}

fn check_alpha_tree_factorial(max_n: usize, cap: usize) -> Result<VerificationReport> {
    let statement = "alpha(t) t! = n! omega_exp(t) kappa(t)";
    let params = json!({ "max_n": max_n });
    for n in 1..=max_n {
        for shape in enumerate_rooted_shapes(n, cap)? {
            let lhs = Rat::from_integer(alpha_count(&shape)? * tree_factorial(&shape));
            let rhs = Rat::from_integer(factorial(n) * kappa_count(&shape))
                * omega_weight(&shape, &SeriesSpec::Exponential);
            if lhs != rhs {
                return Ok(VerificationReport::fail(
                    statement,
                    params,
                    max_n,
                    Mismatch::new(n, &lhs, &rhs),
                ));
            }
        }
    }
    Ok(VerificationReport::exact(statement, params, max_n))
}

fn check_moment_sum(max_n: usize, cap: usize) -> Result<VerificationReport> {
    let statement = "sum over shapes of alpha(t)/t! = (n-1)!/2^(n-1)";
    let params = json!({ "max_n": max_n });
    for n in 1..=max_n {
        let mut lhs = Rat::zero();
        for shape in enumerate_rooted_shapes(n, cap)? {
            lhs += Rat::new(alpha_count(&shape)?, tree_factorial(&shape));
        }
        let rhs = Rat::new(factorial(n - 1), BigInt::one() << (n - 1));
        if lhs != rhs {
            return Ok(VerificationReport::fail(
                statement,
                params,
                max_n,
                Mismatch::new(n, &lhs, &rhs),
            ));
        }
    }
    Ok(VerificationReport::exact(statement, params, max_n))
}

/// The 3×3 matrix of scaling polynomials and degree functions for the
/// first-order equation, optionally with one weight perturbed as a negative
/// control.
pub fn master_ode_suite(order: usize, perturb: Option<usize>) -> Result<Vec<VerificationReport>> {
    let ls = [
        Polynomial::x(),
        Polynomial::constant(Rat::one()),
        Polynomial::x_pow(2),
    ];
    let psis = [
        SeriesSpec::Geometric,
        SeriesSpec::Exponential,
        SeriesSpec::polynomial(vec![Rat::one(), Rat::one(), Rat::one()])?,
    ];
    let mut reports = Vec::new();
    for l in &ls {
        for psi in &psis {
            let report = match perturb {
                None => verify_master_ode(l, psi, order)?,
                Some(k) => {
                    let mut weights = BareWeights::master(l, order);
                    weights.perturb(k)?;
                    verify_master_ode_with_weights(l, &weights, psi, order)?
                }
            };
            reports.push(report);
        }
    }
    Ok(reports)
}

/// Built-in covariance/law pairs exercised by the fond-lemma suite: the
/// tree-factorial family, the constant family, and a geometric correlation
/// with a genuinely two-atom diagonal law (mean 1, so the induced degree
/// function has unit constant term).
pub fn default_fond_lemma_pairs() -> Result<Vec<(CovarianceSpec, DiagonalLaw)>> {
    Ok(vec![
        (
            CovarianceSpec::inverse_linear(Rat::from_integer(2.into()))?,
            DiagonalLaw::delta_one(),
        ),
        (
            CovarianceSpec::constant_one(Rat::one())?,
            DiagonalLaw::delta_one(),
        ),
        (
            CovarianceSpec::geometric(Rat::one(), Rat::new(1.into(), 2.into()))?,
            DiagonalLaw::new(vec![
                (Rat::new(1.into(), 2.into()), Rat::new(1.into(), 2.into())),
                (Rat::new(3.into(), 2.into()), Rat::new(1.into(), 2.into())),
            ])?,
        ),
    ])
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::rational::rat;

    fn run_args(args: &[&str], env_cap: Option<&str>) -> Result<Outcome> {
        let cli = Cli::try_parse_from(args).expect("test arguments parse");
        execute(cli, env_cap)
    }

    #[test]
    fn config_file_parsing_accepts_known_keys_and_comments() {
        let text = "# comment\n; another\n\nmax-n = 6\norder=4\n";
        let map = parse_config_text(text).unwrap();
        assert_eq!(map.get("max-n").map(String::as_str), Some("6"));
        assert_eq!(map.get("order").map(String::as_str), Some("4"));
        assert!(parse_config_text("mystery = 1").is_err());
        assert!(parse_config_text("just a line").is_err());
    }

    #[test]
    fn precedence_is_default_config_env_flag() {
        let mut r = Resolver {
            file: BTreeMap::from([("cap".to_string(), "9".to_string())]),
            resolved: BTreeMap::new(),
        };
        assert_eq!(r.take_cap(None, None).unwrap(), 9);
        assert_eq!(r.take_cap(None, Some("11")).unwrap(), 11);
        assert_eq!(r.take_cap(Some(12), Some("11")).unwrap(), 12);
        let mut fresh = Resolver {
            file: BTreeMap::new(),
            resolved: BTreeMap::new(),
        };
        assert_eq!(fresh.take_cap(None, None).unwrap(), DEFAULT_MAX_N);
        assert!(fresh.take_cap(None, Some("not-a-number")).is_err());
    }

    #[test]
    fn spec_parsers_cover_the_grammar() {
        assert!(matches!(parse_psi_spec("geometric"), Ok(SeriesSpec::Geometric)));
        assert!(matches!(parse_psi_spec("exponential"), Ok(SeriesSpec::Exponential)));
        assert!(parse_psi_spec("poly:1,1,1").is_ok());
        assert!(parse_psi_spec("poly:2,1").is_err()); // constant term must be 1
        assert!(parse_psi_spec("nope").is_err());

        assert_eq!(parse_weight_spec("ones", 3).unwrap(), BareWeights::ones(3));
        let master = parse_weight_spec("master:0,1", 4).unwrap();
        assert_eq!(master.weight(3).unwrap(), &Rat::one());
        let geo = parse_weight_spec("geometric:1/2", 3).unwrap();
        assert_eq!(geo.weight(2).unwrap(), &rat(1, 4));
        assert!(parse_weight_spec("inverse-power:x", 3).is_err());

        let cov = parse_cov_spec("inverse-linear", "2").unwrap();
        assert_eq!(cov.describe(), "inverse-linear,beta2=2");
        assert!(parse_cov_spec("table:1,1/2,1/3", "1").is_ok());
        assert!(parse_cov_spec("table:1,3/2", "1").is_err()); // |r| > 1
        assert!(parse_cov_spec("inverse-linear", "0").is_err());

        assert_eq!(parse_law_spec("delta1").unwrap().describe(), "delta1");
        let two = parse_law_spec("discrete:1/2:1/2,3/2:1/2").unwrap();
        assert_eq!(two.moment(1), Rat::one());
        assert!(parse_law_spec("discrete:1:1/2").is_err()); // probabilities must sum to 1
    }

    #[test]
    fn identities_suite_is_exact_and_enumerate_counts_rows() {
        let reports = verify_identities_suite(6, DEFAULT_MAX_N).unwrap();
        assert_eq!(reports.len(), 3);
        assert!(reports.iter().all(VerificationReport::is_exact));

        let out = run_args(&["bsf", "enumerate", "--kind", "plane", "--n", "4"], None).unwrap();
        assert_eq!(out.exit_code, EXIT_OK);
        let report: Value = serde_json::from_str(&out.rendered).unwrap();
        assert_eq!(report["payload"]["count"], json!(5));

        let out = run_args(&["bsf", "enumerate", "--kind", "shapes", "--n", "4"], None).unwrap();
        let report: Value = serde_json::from_str(&out.rendered).unwrap();
        assert_eq!(report["payload"]["count"], json!(4));
    }

    #[test]
    fn enumerate_rejects_n_zero_and_missing_n() {
        assert!(run_args(&["bsf", "enumerate", "--n", "0"], None).is_err());
        assert!(run_args(&["bsf", "enumerate"], None).is_err());
    }

    #[test]
    fn verify_suites_pass_and_negative_control_fails() {
        let out = run_args(&["bsf", "verify", "identities", "--max-n", "6"], None).unwrap();
        assert_eq!(out.exit_code, EXIT_OK);

        let out = run_args(
            &["bsf", "verify", "master-ode", "--order", "6", "--perturb-bk", "2"],
            None,
        )
        .unwrap();
        assert_eq!(out.exit_code, EXIT_VERIFY_FAILED);
        let report: Value = serde_json::from_str(&out.rendered).unwrap();
        assert_eq!(report["all_pass"], json!(false));
        assert_eq!(
            report["payload"]["reports"][0]["first_mismatch"]["n"],
            json!(2)
        );
    }

    #[test]
    fn series_table_agrees_for_catalan_and_inverse_power() {
        let out = run_args(&["bsf", "series", "--order", "6"], None).unwrap();
        assert_eq!(out.exit_code, EXIT_OK);
        let report: Value = serde_json::from_str(&out.rendered).unwrap();
        let rows = report["payload"]["coefficients"].as_array().unwrap();
        assert_eq!(rows[4]["fast"], json!(["14", "1"]));

        let out = run_args(
            &[
                "bsf", "series", "--weights", "inverse-power:1", "--psi", "exponential",
                "--order", "5",
            ],
            None,
        )
        .unwrap();
        let report: Value = serde_json::from_str(&out.rendered).unwrap();
        let rows = report["payload"]["coefficients"].as_array().unwrap();
        // 1/(n·2^(n−1)) at n = 4 is 1/32
        assert_eq!(rows[3]["fast"], json!(["1", "32"]));
        assert_eq!(report["all_pass"], json!(true));
    }

    #[test]
    fn triangular_table_matches_closed_form() {
        let out = run_args(
            &["bsf", "triangular", "--n-max", "4", "--format", "csv"],
            None,
        )
        .unwrap();
        assert_eq!(out.exit_code, EXIT_OK);
        assert!(out.rendered.contains("n,numerator,denominator,closed_form_match"));
        assert!(out.rendered.contains("2,2,3,true"));
        assert!(out.rendered.contains("3,9,8,true"));
    }

    #[test]
    fn dyck_demo_round_trips_and_reports_the_edge_times() {
        let out = run_args(&["bsf", "dyck", "--k", "3"], None).unwrap();
        assert_eq!(out.exit_code, EXIT_OK);
        let report: Value = serde_json::from_str(&out.rendered).unwrap();
        assert_eq!(report["payload"]["count"], json!(5));

        let out = run_args(&["bsf", "dyck", "--tree", "((()))"], None).unwrap();
        let report: Value = serde_json::from_str(&out.rendered).unwrap();
        assert_eq!(report["payload"]["round_trip"], json!(true));
        assert_eq!(report["payload"]["path"], json!("UUDD"));
    }

    #[test]
    fn env_cap_blocks_large_enumerations() {
        let err = run_args(&["bsf", "enumerate", "--n", "9"], Some("8")).unwrap_err();
        assert!(matches!(err, Error::SizeRange { n: 9, max: 8 }));
    }

    #[test]
    fn reports_embed_version_config_and_hash() {
        let out = run_args(&["bsf", "triangular", "--n-max", "2"], None).unwrap();
        let report: Value = serde_json::from_str(&out.rendered).unwrap();
        assert_eq!(report["version"], json!(VERSION));
        assert_eq!(report["config"]["n-max"], json!("2"));
        assert_eq!(report["config"]["cap"], json!(DEFAULT_MAX_N.to_string()));
        assert_eq!(report["param_hash"].as_str().unwrap().len(), 64);

        // the hash tracks the resolved configuration, not the flag spelling
        let again = run_args(&["bsf", "triangular"], None).unwrap();
        let report2: Value = serde_json::from_str(&again.rendered).unwrap();
        assert_ne!(report["param_hash"], report2["param_hash"]);
    }

    #[test]
    fn wigner_report_embeds_seed_and_is_deterministic() {
        let args = &[
            "bsf", "wigner", "--k", "2", "--N", "40", "--trials", "24", "--seed", "11",
        ];
        let first = run_args(args, None).unwrap();
        let second = run_args(args, None).unwrap();
        assert_eq!(first.rendered, second.rendered);
        let report: Value = serde_json::from_str(&first.rendered).unwrap();
        assert_eq!(report["seed"], json!(11));
        assert_eq!(report["generator"], json!("chacha8"));
    }
}
