//! `fqh`: command-line front end of `fqh-core`.
//!
//! Every subcommand writes one artifact, CSV (with a leading `# ...` line
//! carrying the seed and parameters) or JSON (with a `seed` field), to
//! `--out` or standard output. Exit codes: 0 on success, 2 when an input
//! is rejected, 1 when a numerical step fails.

#![allow(clippy::neg_cmp_op_on_partial_ord)]

mod output;
mod verify;

use std::io::Write;
use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};
use fqh_core::bounds::*;
use fqh_core::correlations::*;
use fqh_core::hamiltonian::{Boundary, ModelParams};
use fqh_core::spectra::*;
use fqh_core::tiling::{count_roots, enumerate_roots, expand_root, max_particle_number, particle_content, RootTiling};
use serde_json::json;

use output::{fmt_f64, open_sink, parse_int_range, parse_range, write_json, Table};

/// Failure classes of a run, each with its own exit code.
#[derive(Debug)]
pub enum CliError {
    /// Rejected input; exit code 2.
    Validation(String),
    /// Numerical failure or violated check; exit code 1.
    Numeric(String),
    /// Writing the artifact failed; exit code 1.
    Io(String),
}

impl CliError {
    fn exit_code(&self) -> u8 {
        match self {
            CliError::Validation(_) => 2,
            CliError::Numeric(_) | CliError::Io(_) => 1,
        }
    }
}

impl std::fmt::Display for CliError {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            CliError::Validation(m) => write!(f, "invalid input: {m}"),
            CliError::Numeric(m) => write!(f, "numerical failure: {m}"),
            CliError::Io(m) => write!(f, "output error: {m}"),
        }
    }
}

impl From<fqh_core::Error> for CliError {
    fn from(e: fqh_core::Error) -> Self {
        if e.is_validation() {
            CliError::Validation(e.to_string())
        } else {
            CliError::Numeric(e.to_string())
        }
    }
}

impl From<std::io::Error> for CliError {
    fn from(e: std::io::Error) -> Self {
        CliError::Io(e.to_string())
    }
}

#[derive(Parser)]
#[command(name = "fqh", version, about = "Ground states, spectra, gap bounds and correlations of the truncated 1/3 FQH chain")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
enum Format {
    Csv,
    Json,
}

#[derive(Args, Clone)]
struct Common {
    /// Output file; standard output when absent.
    #[arg(long)]
    out: Option<PathBuf>,
    /// Artifact format.
    #[arg(long, value_enum, default_value = "csv")]
    format: Format,
    /// Seed of the iterative eigensolver start vectors.
    #[arg(long, default_value_t = DEFAULT_SEED)]
    seed: u64,
}

#[derive(Subcommand)]
enum Command {
    /// Root tilings: counts, listings and expansions.
    Tilings {
        #[arg(long)]
        length: usize,
        #[arg(long, value_enum, default_value = "count")]
        emit: TilingEmit,
        /// Root tiling to expand, e.g. "dl m m v".
        #[arg(long)]
        root: Option<String>,
        #[command(flatten)]
        common: Common,
    },
    /// Low spectrum of one chain.
    Spectrum {
        #[arg(long)]
        length: usize,
        #[arg(long)]
        lambda: f64,
        /// A number or `physical`.
        #[arg(long, default_value = "1")]
        kappa: String,
        #[arg(long, default_value = "open")]
        bc: String,
        /// Number of eigenvalues above the kernel.
        #[arg(long, default_value_t = SWEEP_LEVELS)]
        levels: usize,
        /// Restrict to one particle-number sector.
        #[arg(long)]
        sector: Option<usize>,
        #[command(flatten)]
        common: Common,
    },
    /// Gap and low levels along a λ grid.
    Sweep {
        #[arg(long)]
        length: usize,
        #[arg(long, default_value = "open")]
        bc: String,
        /// Grid `a:b:step` or a single value.
        #[arg(long)]
        lambda: String,
        /// A number or `physical`.
        #[arg(long, default_value = "physical")]
        kappa: String,
        #[command(flatten)]
        common: Common,
    },
    /// The gap-bound pipeline at one λ.
    Bounds {
        #[arg(long)]
        lambda: f64,
        /// κ of the numerical gaps: a number or `physical`.
        #[arg(long, default_value = "physical")]
        kappa: String,
        /// Optional grid of r = |λ|² values for the f curve.
        #[arg(long)]
        f_grid: Option<String>,
        /// Truncation of the supremum defining f.
        #[arg(long, default_value_t = F_CERT_NMAX)]
        nmax: usize,
        /// Index n of the periodic finite-size criterion.
        #[arg(long, default_value_t = 2)]
        knabe_n: usize,
        /// Chain length of the martingale norm.
        #[arg(long, default_value_t = 11)]
        martingale_length: usize,
        #[command(flatten)]
        common: Common,
    },
    /// Expectations in a VMD state.
    Correlations {
        #[arg(long)]
        length: usize,
        #[arg(long)]
        lambda: f64,
        /// Root tiling; the pure monomer root of the given length when absent.
        #[arg(long)]
        root: Option<String>,
        #[arg(long, value_enum, default_value = "truncated")]
        emit: CorrelationEmit,
        /// First site of the density pairs.
        #[arg(long, default_value_t = 1)]
        x: usize,
        /// Second sites, `a:b:step`.
        #[arg(long)]
        y: Option<String>,
        /// String order cells `k:l`.
        #[arg(long)]
        string: Option<String>,
        #[command(flatten)]
        common: Common,
    },
    /// Dislocation states and their smeared mixtures.
    Dislocation {
        /// r = λ².
        #[arg(long)]
        r: f64,
        /// Position 3k of the void.
        #[arg(long, default_value_t = 0)]
        k: i64,
        /// Cells j, `a:b:step`.
        #[arg(long, default_value = "2:40:1")]
        j: String,
        /// Smear with weights ∝ 1/k up to this cutoff.
        #[arg(long)]
        smeared: Option<usize>,
        /// Also evaluate the recursion on a chain of this many monomers.
        #[arg(long)]
        check_n: Option<usize>,
        #[command(flatten)]
        common: Common,
    },
    /// Runs the invariant checks of one module or all of them.
    Verify {
        #[arg(value_enum, default_value = "all")]
        suite: verify::Suite,
        #[command(flatten)]
        common: Common,
    },
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
enum TilingEmit {
    Count,
    Roots,
    Expand,
    MaxFilling,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
enum CorrelationEmit {
    Density,
    Truncated,
    Fit,
    String,
}

fn parse_kappa(text: &str) -> Result<KappaRule, CliError> {
    if text == "physical" {
        return Ok(KappaRule::Physical);
    }
    let k: f64 = text
        .parse()
        .map_err(|_| CliError::Validation(format!("kappa must be a number or 'physical', got '{text}'")))?;
    Ok(KappaRule::Fixed(k))
}

fn parse_bc(text: &str) -> Result<Boundary, CliError> {
    Ok(text.parse::<Boundary>()?)
}

fn parse_root(text: Option<&str>, length: usize) -> Result<RootTiling, CliError> {
    let root = match text {
        Some(t) => t.parse::<RootTiling>()?,
        None => RootTiling::pure_monomer(length)?,
    };
    if root.interval_length() != length {
        return Err(CliError::Validation(format!(
            "root covers {} sites but --length is {length}",
            root.interval_length()
        )));
    }
    Ok(root)
}

fn lanczos(seed: u64) -> LanczosOptions {
    LanczosOptions { seed, ..LanczosOptions::default() }
}

/// Writes a table in the requested format.
fn emit_table(common: &Common, meta: &str, table: &Table, extra: serde_json::Value) -> Result<(), CliError> {
    let mut sink = open_sink(common.out.as_deref())?;
    match common.format {
        Format::Csv => table.write_csv(&mut *sink, &format!("seed={} {meta}", common.seed)),
        Format::Json => {
            let mut obj = extra;
            obj["seed"] = json!(common.seed);
            obj["rows"] = table.to_json();
            write_json(&mut *sink, obj)
        }
    }
}

fn tilings(length: usize, emit: TilingEmit, root: Option<&str>, common: &Common) -> Result<(), CliError> {
    match emit {
        TilingEmit::Count => {
            let count = count_roots(length);
            let mut sink = open_sink(common.out.as_deref())?;
            match common.format {
                Format::Csv => writeln!(sink, "{count}")?,
                Format::Json => {
                    write_json(&mut *sink, json!({"seed": common.seed, "L": length, "count": count.to_string()}))?
                }
            }
            sink.flush()?;
            Ok(())
        }
        TilingEmit::Roots => {
            if length > 30 {
                return Err(CliError::Validation(format!("listing roots needs L <= 30, got {length}")));
            }
            let mut table = Table::new(["root", "particles", "voids"]);
            for r in enumerate_roots(length) {
                table.push(vec![r.to_string(), r.particle_number().to_string(), r.voids().len().to_string()]);
            }
            emit_table(common, &format!("L={length}"), &table, json!({"L": length}))
        }
        TilingEmit::Expand => {
            let root = parse_root(root, length)?;
            let mut table = Table::new(["configuration", "dimers"]);
            for t in expand_root(&root) {
                table.push(vec![particle_content(&t).to_string(), t.dimer_count().to_string()]);
            }
            emit_table(common, &format!("root={root}"), &table, json!({"root": root.to_string()}))
        }
        TilingEmit::MaxFilling => {
            let (n, root) = max_particle_number(length)?;
            let mut table = Table::new(["L", "max_particles", "root"]);
            table.push(vec![length.to_string(), n.to_string(), root.to_string()]);
            emit_table(common, &format!("L={length}"), &table, json!({}))
        }
    }
}

#[allow(clippy::too_many_arguments)]
fn spectrum(
    length: usize,
    lambda: f64,
    kappa: &str,
    bc: &str,
    levels: usize,
    sector: Option<usize>,
    common: &Common,
) -> Result<(), CliError> {
    let bc = parse_bc(bc)?;
    let kappa = parse_kappa(kappa)?.kappa(lambda)?;
    let p = ModelParams::new(lambda, kappa)?;
    let opts = lanczos(common.seed);
    // Kernel eigenvalues are listed as exact zeros in both cases.
    let (kernel_dim, excitations, method) = match sector {
        Some(n) => {
            let s = sector_spectrum(length, n, &p, bc, levels, &opts)?;
            (s.kernel_dim, s.excitations, s.method)
        }
        None => {
            let s = low_spectrum(length, &p, bc, levels, &opts)?;
            (s.kernel_dim, s.eigenvalues[s.kernel_dim..].to_vec(), s.method)
        }
    };
    let gap = excitations.first().copied().unwrap_or(0.0);
    let mut table = Table::new(["index", "eigenvalue"]);
    let values = std::iter::repeat_n(0.0, kernel_dim).chain(excitations.iter().copied().take(levels));
    for (i, e) in values.enumerate() {
        table.push(vec![i.to_string(), fmt_f64(e)]);
    }
    let meta = format!(
        "L={length} lambda={} kappa={} bc={} kernel_dim={} gap={} method={:?}",
        fmt_f64(lambda),
        fmt_f64(kappa),
        bc.name(),
        kernel_dim,
        fmt_f64(gap),
        method
    );
    let extra = json!({
        "L": length, "lambda": lambda, "kappa": kappa, "bc": bc.name(), "sector": sector,
        "kernel_dim": kernel_dim, "gap": gap, "method": format!("{method:?}").to_lowercase(),
    });
    emit_table(common, &meta, &table, extra)
}

fn sweep(length: usize, bc: &str, lambda: &str, kappa: &str, common: &Common) -> Result<(), CliError> {
    let bc = parse_bc(bc)?;
    let grid = parse_range(lambda)?;
    let rule = parse_kappa(kappa)?;
    if let KappaRule::Fixed(k) = rule {
        ModelParams::new(0.0, k)?;
    }
    let rows = gap_sweep_with(length, bc, &grid, rule, &lanczos(common.seed));
    let mut header: Vec<String> = ["lambda", "kappa", "L", "bc", "kernel_dim", "gap"].map(String::from).to_vec();
    header.extend((0..SWEEP_LEVELS).map(|i| format!("e{i}")));
    let mut table = Table::new(header);
    for (row, &lambda) in rows.into_iter().zip(&grid) {
        match row {
            Ok(r) => {
                let mut cells = vec![
                    fmt_f64(r.lambda),
                    fmt_f64(r.kappa),
                    length.to_string(),
                    bc.name().to_string(),
                    r.kernel_dim.to_string(),
                    fmt_f64(r.gap),
                ];
                cells.extend((0..SWEEP_LEVELS).map(|i| r.levels.get(i).map_or("NaN".into(), |&e| fmt_f64(e))));
                table.push(cells);
            }
            // Grid points outside the model's domain (physical κ at λ = 0)
            // keep their row so that row i always belongs to grid point i.
            Err(e) if e.is_validation() => {
                let mut cells = vec![fmt_f64(lambda), "NaN".into(), length.to_string(), bc.name().to_string()];
                cells.extend(std::iter::repeat_n("NaN".to_string(), 2 + SWEEP_LEVELS));
                table.push(cells);
            }
            Err(e) => return Err(CliError::Numeric(format!("λ = {lambda}: {e}"))),
        }
    }
    let meta = format!("L={length} bc={} lambda={lambda} kappa={kappa}", bc.name());
    emit_table(common, &meta, &table, json!({"L": length, "bc": bc.name(), "kappa": kappa}))
}

#[allow(clippy::too_many_arguments)]
fn bounds(
    lambda: f64,
    kappa: &str,
    f_grid: Option<&str>,
    nmax: usize,
    knabe_n: usize,
    martingale_length: usize,
    common: &Common,
) -> Result<(), CliError> {
    let kappa = parse_kappa(kappa)?.kappa(lambda)?;
    let p = ModelParams::new(lambda, kappa)?;
    let r = lambda * lambda;
    let fa = f_approx(r, nmax)?;
    let gaps = small_gaps(&p)?;
    let obc = match fa.certified {
        Some(_) if nmax >= F_CERT_NMAX => Some(obc_gap_bound(lambda, &gaps)?),
        _ => None,
    };
    let k = knabe_inputs(&p, knabe_n)?;
    let pbc = periodic_gap_bound(&k);
    let martingale = if lambda > 0.0 {
        let m = martingale_epsilon(martingale_length, lambda)?;
        json!({"L": m.l, "epsilon_sq": m.epsilon_sq, "reduced_sq": m.reduced_sq})
    } else {
        serde_json::Value::Null
    };
    let mut value = json!({
        "seed": common.seed,
        "lambda": lambda,
        "kappa": kappa,
        "r": r,
        "n_max": nmax,
        "f_value": fa.value,
        "f_certified": fa.certified,
        "threshold_ok": obc.map(|b| b.threshold_ok).unwrap_or(false),
        "small_gaps": gaps,
        "obc_bound": obc.map(|b| b.value),
        "knabe": {
            "n": k.n, "gamma": k.gamma, "Gamma": k.big_gamma, "g_n": k.g_n,
            "criterion_ok": pbc.criterion_ok, "pbc_bound": pbc.value,
        },
        "martingale": martingale,
    });
    if let Some(text) = f_grid {
        let grid = parse_range(text)?;
        let curve: Vec<serde_json::Value> = grid
            .iter()
            .map(|&r| {
                let a = f_approx(r, nmax)?;
                Ok(json!({
                    "r": r, "f": a.value, "f_certified": a.certified,
                    "threshold_ok": a.certified.is_some_and(|c| 3.0 * c < 1.0),
                }))
            })
            .collect::<Result<_, CliError>>()?;
        value["f_curve"] = serde_json::Value::Array(curve);
    }
    let mut sink = open_sink(common.out.as_deref())?;
    write_json(&mut *sink, value)
}

#[allow(clippy::too_many_arguments)]
fn correlations(
    length: usize,
    lambda: f64,
    root: Option<&str>,
    emit: CorrelationEmit,
    x: usize,
    y: Option<&str>,
    string: Option<&str>,
    common: &Common,
) -> Result<(), CliError> {
    let label = root.map_or_else(|| "monomers".to_string(), str::to_string);
    let root = parse_root(root, length)?;
    let meta = format!("root={label} L={length} lambda={}", fmt_f64(lambda));
    let extra = json!({"root": label, "L": length, "lambda": lambda});
    match emit {
        CorrelationEmit::Density => {
            let mut table = Table::new(["x", "density"]);
            for site in 1..=length {
                let v = diag_expectation(&root, lambda, &DiagonalObservable::density(site))?;
                table.push(vec![site.to_string(), fmt_f64(v)]);
            }
            emit_table(common, &meta, &table, extra)
        }
        CorrelationEmit::Truncated => {
            let ys = match y {
                Some(text) => parse_int_range(text)?,
                None => ((x + 1) as i64..=length as i64).collect(),
            };
            let nx = diag_expectation(&root, lambda, &DiagonalObservable::density(x))?;
            let mut table = Table::new(["x", "y", "truncated", "clustering_bound"]);
            for y in ys {
                let y = usize::try_from(y).map_err(|_| CliError::Validation(format!("site {y} out of range")))?;
                let ny = diag_expectation(&root, lambda, &DiagonalObservable::density(y))?;
                let pair = diag_expectation(&root, lambda, &DiagonalObservable::pair(x, y))?;
                let d = x.abs_diff(y);
                let bound = if lambda > 0.0 && d >= 20 { fmt_f64(clustering_bound(lambda, d)?) } else { "NaN".into() };
                table.push(vec![x.to_string(), y.to_string(), fmt_f64(pair - nx * ny), bound]);
            }
            emit_table(common, &meta, &table, extra)
        }
        CorrelationEmit::Fit => {
            let pairs = default_fit_pairs(length)?;
            let fit = fit_decay(&root, lambda, &pairs)?;
            let c = decay_rate(lambda)?;
            let mut table = Table::new(["lambda", "L", "rate", "c", "points"]);
            table.push(vec![fmt_f64(lambda), length.to_string(), fmt_f64(fit.rate), fmt_f64(c), fit.points.to_string()]);
            emit_table(common, &meta, &table, extra)
        }
        CorrelationEmit::String => {
            let text = string.ok_or_else(|| CliError::Validation("--emit string needs --string k:l".into()))?;
            let (k, l) = text
                .split_once(':')
                .and_then(|(a, b)| Some((a.trim().parse::<usize>().ok()?, b.trim().parse::<usize>().ok()?)))
                .ok_or_else(|| CliError::Validation(format!("malformed --string '{text}', expected k:l")))?;
            let (oz, bare) = string_order(&root, k, l, lambda)?;
            let (oz_lim, bare_lim) = string_order_limits(lambda * lambda)?;
            let mut table = Table::new(["k", "l", "string_order", "string", "string_order_limit", "string_limit"]);
            table.push(vec![k.to_string(), l.to_string(), fmt_f64(oz), fmt_f64(bare), fmt_f64(oz_lim), fmt_f64(bare_lim)]);
            emit_table(common, &meta, &table, extra)
        }
    }
}

fn dislocation(
    r: f64,
    k: i64,
    j: &str,
    smeared: Option<usize>,
    check_n: Option<usize>,
    common: &Common,
) -> Result<(), CliError> {
    let js = parse_int_range(j)?;
    let meta = format!("r={} k={k}", fmt_f64(r));
    let extra = json!({"r": r, "k": k});
    if let Some(cutoff) = smeared {
        let w = DislocationWeights::inverse_k(cutoff)?;
        let mut table = Table::new(["j", "smeared"]);
        for j in js {
            table.push(vec![j.to_string(), fmt_f64(smeared_correlation(&w, j, r)?)]);
        }
        return emit_table(common, &format!("{meta} cutoff={cutoff}"), &table, extra);
    }
    let mut header = vec!["j", "expectation", "pair", "truncated"];
    if check_n.is_some() {
        header.extend(["expectation_dp", "pair_dp"]);
    }
    let mut table = Table::new(header);
    let at_zero = dislocation_expectation(k, 0, r)?;
    for j in js {
        let e = dislocation_expectation(k, j, r)?;
        let pair = if j > 1 { Some(dislocation_pair(k, j, r)?) } else { None };
        let mut row = vec![
            j.to_string(),
            fmt_f64(e),
            pair.map_or("NaN".into(), fmt_f64),
            pair.map_or("NaN".into(), |p| fmt_f64(p - at_zero * e)),
        ];
        if let Some(n) = check_n {
            row.push(fmt_f64(dislocation_dp(n, k, r.sqrt(), &[3 * j])?));
            row.push(if j > 1 { fmt_f64(dislocation_dp(n, k, r.sqrt(), &[0, 3 * j])?) } else { "NaN".into() });
        }
        table.push(row);
    }
    emit_table(common, &meta, &table, extra)
}

fn configure_threads() -> Result<(), CliError> {
    if let Ok(text) = std::env::var("THREADS") {
        let n: usize = text
            .parse()
            .ok()
            .filter(|&n| n > 0)
            .ok_or_else(|| CliError::Validation(format!("THREADS must be a positive integer, got '{text}'")))?;
        rayon::ThreadPoolBuilder::new()
            .num_threads(n)
            .build_global()
            .map_err(|e| CliError::Numeric(e.to_string()))?;
    }
    Ok(())
}

fn run(cli: Cli) -> Result<(), CliError> {
    configure_threads()?;
    match cli.command {
        Command::Tilings { length, emit, root, common } => tilings(length, emit, root.as_deref(), &common),
        Command::Spectrum { length, lambda, kappa, bc, levels, sector, common } => {
            spectrum(length, lambda, &kappa, &bc, levels, sector, &common)
        }
        Command::Sweep { length, bc, lambda, kappa, common } => sweep(length, &bc, &lambda, &kappa, &common),
        Command::Bounds { lambda, kappa, f_grid, nmax, knabe_n, martingale_length, common } => {
            bounds(lambda, &kappa, f_grid.as_deref(), nmax, knabe_n, martingale_length, &common)
        }
        Command::Correlations { length, lambda, root, emit, x, y, string, common } => {
            correlations(length, lambda, root.as_deref(), emit, x, y.as_deref(), string.as_deref(), &common)
        }
        Command::Dislocation { r, k, j, smeared, check_n, common } => {
            dislocation(r, k, &j, smeared, check_n, &common)
        }
        Command::Verify { suite, common } => verify::run(suite, &common),
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("fqh: {e}");
            ExitCode::from(e.exit_code())
        }
    }
}
