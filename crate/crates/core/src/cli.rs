//! Command-line front end: CSV tables for dimensions, bounds, counts and
//! local-recovery simulations, plus batch regeneration of both figures.
//!
//! Every file written with `--out` gets a sibling `*.manifest.json` holding
//! the command, its parameters, the seed and the crate version, which is
//! enough to rerun it bit for bit.

use std::collections::BTreeMap;
use std::fs;
use std::io::{self, Write};
use std::path::{Path, PathBuf};

use anyhow::{bail, Context};
use clap::{Args, Parser, Subcommand};
use serde::Serialize;
use serde_json::{json, Value};

use crate::code::{build_code, write_matrix_csv, CodeSpec, Family};
use crate::counting::{
    bounds_S_star, closed_form_S0, enumerate_S_star, initial_level, recurse_state, StateVector,
    deduct_q, initial_state,
};
use crate::recovery::{lrs_failure_closed_form, simulate_failure, tau_grid, SimConfig};

/// Seed used when `--seed` is not given.
pub const DEFAULT_SEED: u64 = 20_210_521;

pub const DEFAULT_TRIALS: u64 = 100_000;

/// Series of the local-recovery figure: (family, dimension, r) at q = 8.
pub const FIG2_SERIES: [(Family, usize, u32); 4] = [
    (Family::Lrs, 10, 4),
    (Family::QcLrs, 10, 3),
    (Family::Lrs, 6, 5),
    (Family::QcLrs, 6, 4),
];

#[derive(Debug, Parser)]
#[command(name = "qclrs", version, about = "Quadratic-curve-lifted Reed-Solomon codes")]
pub struct Cli {
    /// Worker threads for simulations (default: all cores).
    #[arg(long, global = true)]
    pub threads: Option<usize>,

    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Dimension and rate per redundancy: r,k,rate.
    Dim(DimArgs),
    /// Exact rate and its bounds for r in [r-min, r-max]: r,rate,rate_ub,rate_lb.
    Bounds(BoundsArgs),
    /// Bad-monomial counts |S_0|, |S_1|, |S_2|, |S*| with recursion and closed forms.
    Count(CountArgs),
    /// Remove q from 2i + j by clearing bits of i and j.
    #[command(name = "deduct-q")]
    DeductQ(DeductArgs),
    /// Monte-Carlo local-recovery failure rate over a grid of erasure probabilities.
    Simulate(SimulateArgs),
    /// Write fig1_q32.csv and fig2_q8.csv with manifests.
    Figures(FiguresArgs),
    /// Generator matrix of a code as CSV.
    Generator(GeneratorArgs),
}

#[derive(Debug, Args)]
pub struct DegreeArgs {
    /// Local redundancy r = q - d (comma separated where lists are accepted).
    #[arg(long, value_delimiter = ',', conflicts_with = "d")]
    pub r: Vec<u32>,
    /// Degree bound d.
    #[arg(long, value_delimiter = ',')]
    pub d: Vec<u32>,
}

impl DegreeArgs {
    fn redundancies(&self, ell: u32) -> anyhow::Result<Vec<u32>> {
        let q = 1u32 << ell.min(16);
        let rs: Vec<u32> = if !self.r.is_empty() {
            self.r.clone()
        } else if !self.d.is_empty() {
            self.d
                .iter()
                .map(|&d| {
                    if d == 0 || d >= q {
                        bail!("degree bound d={d} outside [1, {}]", q - 1)
                    }
                    Ok(q - d)
                })
                .collect::<anyhow::Result<_>>()?
        } else {
            bail!("one of --r or --d is required")
        };
        Ok(rs)
    }

    fn single(&self, ell: u32) -> anyhow::Result<u32> {
        match self.redundancies(ell)?.as_slice() {
            [r] => Ok(*r),
            _ => bail!("exactly one value of --r or --d is expected"),
        }
    }
}

#[derive(Debug, Args)]
pub struct OutArgs {
    /// Output file (CSV); stdout when omitted.
    #[arg(long)]
    pub out: Option<PathBuf>,
}

#[derive(Debug, Args)]
pub struct DimArgs {
    #[arg(long, default_value = "qclrs")]
    pub family: Family,
    #[arg(long)]
    pub ell: u32,
    #[command(flatten)]
    pub degree: DegreeArgs,
    #[command(flatten)]
    pub out: OutArgs,
}

#[derive(Debug, Args)]
pub struct BoundsArgs {
    #[arg(long)]
    pub ell: u32,
    #[arg(long, default_value_t = 1)]
    pub r_min: u32,
    /// Defaults to q/4.
    #[arg(long)]
    pub r_max: Option<u32>,
    #[command(flatten)]
    pub out: OutArgs,
}

#[derive(Debug, Args)]
pub struct CountArgs {
    #[arg(long)]
    pub ell: u32,
    #[arg(long, value_delimiter = ',', required = true)]
    pub r: Vec<u32>,
    #[command(flatten)]
    pub out: OutArgs,
}

#[derive(Debug, Args)]
pub struct DeductArgs {
    #[arg(long)]
    pub ell: u32,
    #[arg(long)]
    pub i: u32,
    #[arg(long)]
    pub j: u32,
}

#[derive(Debug, Args)]
pub struct SimulateArgs {
    #[arg(long, default_value = "qclrs")]
    pub family: Family,
    #[arg(long, default_value_t = 3)]
    pub ell: u32,
    #[command(flatten)]
    pub degree: DegreeArgs,
    #[arg(long, default_value_t = 0.3)]
    pub tau_min: f64,
    #[arg(long, default_value_t = 1.0)]
    pub tau_max: f64,
    #[arg(long, default_value_t = 0.02)]
    pub tau_step: f64,
    #[arg(long, default_value_t = DEFAULT_TRIALS)]
    pub trials: u64,
    #[arg(long, default_value_t = DEFAULT_SEED)]
    pub seed: u64,
    #[command(flatten)]
    pub out: OutArgs,
}

#[derive(Debug, Args)]
pub struct FiguresArgs {
    /// Output directory.
    #[arg(long)]
    pub out: PathBuf,
    #[arg(long, default_value_t = DEFAULT_SEED)]
    pub seed: u64,
    #[arg(long, default_value_t = DEFAULT_TRIALS)]
    pub trials: u64,
}

#[derive(Debug, Args)]
pub struct GeneratorArgs {
    #[arg(long, default_value = "qclrs")]
    pub family: Family,
    #[arg(long)]
    pub ell: u32,
    #[command(flatten)]
    pub degree: DegreeArgs,
    #[command(flatten)]
    pub out: OutArgs,
}

/// A CSV table with a header row.
#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct Table {
    pub header: Vec<String>,
    pub rows: Vec<Vec<String>>,
}

impl Table {
    fn new(header: &[&str]) -> Self {
        Table {
            header: header.iter().map(|s| s.to_string()).collect(),
            rows: Vec::new(),
        }
    }

    fn push(&mut self, row: Vec<String>) {
        debug_assert_eq!(row.len(), self.header.len());
        self.rows.push(row);
    }

    /// Column by header name.
    pub fn column(&self, name: &str) -> Option<Vec<&str>> {
        let idx = self.header.iter().position(|h| h == name)?;
        Some(self.rows.iter().map(|r| r[idx].as_str()).collect())
    }

    pub fn write_csv<W: Write>(&self, out: W) -> anyhow::Result<()> {
        let mut w = csv::WriterBuilder::new()
            .terminator(csv::Terminator::Any(b'\n'))
            .from_writer(out);
        w.write_record(&self.header)?;
        for row in &self.rows {
            w.write_record(row)?;
        }
        w.flush()?;
        Ok(())
    }

    pub fn to_csv_string(&self) -> String {
        let mut buf = Vec::new();
        self.write_csv(&mut buf).expect("writing to memory cannot fail");
        String::from_utf8(buf).expect("csv output is UTF-8")
    }
}

/// Parameters and provenance recorded next to every output file.
#[derive(Clone, Debug, Serialize)]
pub struct RunManifest {
    pub command: String,
    pub parameters: BTreeMap<String, Value>,
    pub seed: Option<u64>,
    pub version: String,
    pub output: String,
}

impl RunManifest {
    fn new(command: &str, parameters: Value, seed: Option<u64>, output: &str) -> Self {
        let parameters = match parameters {
            Value::Object(map) => map.into_iter().collect(),
            other => BTreeMap::from([("value".to_string(), other)]),
        };
        RunManifest {
            command: command.to_string(),
            parameters,
            seed,
            version: env!("CARGO_PKG_VERSION").to_string(),
            output: output.to_string(),
        }
    }
}

/// `path` with its extension replaced by `manifest.json`.
pub fn manifest_path(path: &Path) -> PathBuf {
    path.with_extension("manifest.json")
}

fn write_output(table: &Table, out: &OutArgs, manifest: RunManifest) -> anyhow::Result<()> {
    match &out.out {
        None => {
            let stdout = io::stdout();
            table.write_csv(stdout.lock())
        }
        Some(path) => write_with_manifest(table, path, &manifest),
    }
}

fn write_with_manifest(table: &Table, path: &Path, manifest: &RunManifest) -> anyhow::Result<()> {
    let file = fs::File::create(path).with_context(|| format!("creating {}", path.display()))?;
    table
        .write_csv(io::BufWriter::new(file))
        .with_context(|| format!("writing {}", path.display()))?;
    let mpath = manifest_path(path);
    let mut text = serde_json::to_string_pretty(manifest)?;
    text.push('\n');
    fs::write(&mpath, text).with_context(|| format!("writing {}", mpath.display()))?;
    Ok(())
}

/// Finite decimal rendering; `{}` on f64 is locale independent and round-trips.
fn num(v: f64) -> String {
    format!("{v}")
}

/// Mixes a base seed with indices (splitmix64 finalizer) so that every grid
/// point draws from its own generator.
pub fn derive_seed(seed: u64, indices: &[u64]) -> u64 {
    indices.iter().fold(seed, |acc, &i| {
        let mut z = acc ^ i.wrapping_add(0x9e37_79b9_7f4a_7c15).wrapping_mul(0xbf58_476d_1ce4_e5b9);
        z = (z ^ (z >> 30)).wrapping_mul(0xbf58_476d_1ce4_e5b9);
        z = (z ^ (z >> 27)).wrapping_mul(0x94d0_49bb_1331_11eb);
        z ^ (z >> 31)
    })
}

/// Rows `r,k,rate` with `rate = k / q^2`.
pub fn dim_table(family: Family, ell: u32, rs: &[u32]) -> crate::Result<Table> {
    let mut t = Table::new(&["r", "k", "rate"]);
    for &r in rs {
        let spec = CodeSpec::with_redundancy(family, ell, r)?;
        let k = spec.good_monomials().len();
        t.push(vec![r.to_string(), k.to_string(), num(k as f64 / spec.n() as f64)]);
    }
    Ok(t)
}

/// Rows `r,rate,rate_ub,rate_lb`: the exact rate from enumeration of the bad
/// monomials and the band implied by the closed-form bounds.
pub fn bounds_table(ell: u32, r_min: u32, r_max: u32) -> crate::Result<Table> {
    if r_min < 1 || r_min > r_max {
        return Err(crate::Error::Parameter(format!(
            "empty redundancy range [{r_min}, {r_max}]"
        )));
    }
    let mut t = Table::new(&["r", "rate", "rate_ub", "rate_lb"]);
    let n = 4f64.powi(ell as i32);
    for r in r_min..=r_max {
        let bounds = bounds_S_star(ell, r)?;
        let bad = enumerate_S_star(ell, r)?.len() as f64;
        let (lb, ub) = bounds.rate_band(ell);
        t.push(vec![r.to_string(), num(1.0 - bad / n), num(ub), num(lb)]);
    }
    Ok(t)
}

/// Enumerated `|S_0|, |S_1|, |S_2|, |S*|` alongside the recursion and the
/// closed form where they apply (blank otherwise).
pub fn count_table(ell: u32, rs: &[u32]) -> crate::Result<Table> {
    let mut t = Table::new(&[
        "ell", "r", "s0", "s1", "s2", "s_star", "s0_recursion", "s0_closed_form",
    ]);
    for &r in rs {
        let enumerated = StateVector::enumerate(ell, r)?;
        let star = enumerate_S_star(ell, r)?.len();
        let recursion = match initial_level(r) {
            Ok(ell0) if ell0 <= ell => {
                let init = initial_state(r)?;
                recurse_state(init, ell)?.s0.to_string()
            }
            _ => String::new(),
        };
        let closed = closed_form_S0(ell, r).map(num).unwrap_or_default();
        t.push(vec![
            ell.to_string(),
            r.to_string(),
            enumerated.s0.to_string(),
            enumerated.s1.to_string(),
            enumerated.s2.to_string(),
            star.to_string(),
            recursion,
            closed,
        ]);
    }
    Ok(t)
}

/// Rows `tau,fail_rate,half_width,trials,closed_form`; the closed-form column
/// is filled for the line-lifted family only.
pub fn simulate_table(spec: CodeSpec, taus: &[f64], trials: u64, seed: u64) -> crate::Result<Table> {
    let mut t = Table::new(&["tau", "fail_rate", "half_width", "trials", "closed_form"]);
    for (idx, &tau) in taus.iter().enumerate() {
        let row = simulation_row(spec, tau, trials, derive_seed(seed, &[idx as u64]))?;
        t.push(row);
    }
    Ok(t)
}

fn simulation_row(spec: CodeSpec, tau: f64, trials: u64, seed: u64) -> crate::Result<Vec<String>> {
    let est = simulate_failure(&SimConfig {
        spec,
        tau,
        trials,
        seed,
    })?;
    let closed = match spec.family {
        Family::Lrs => num(lrs_failure_closed_form(spec.q(), spec.r(), tau)?),
        Family::QcLrs => String::new(),
    };
    Ok(vec![
        num(tau),
        num(est.failure_rate),
        num(est.half_width),
        est.trials.to_string(),
        closed,
    ])
}

/// Rate and bounds at q = 32 for r = 1..8.
pub fn figure1() -> crate::Result<Table> {
    bounds_table(5, 1, 8)
}

/// The four local-recovery series at q = 8 over tau = 0.30, 0.32, ..., 1.00.
pub fn figure2(trials: u64, seed: u64) -> crate::Result<Table> {
    let taus = tau_grid(0.3, 1.0, 0.02)?;
    let mut t = Table::new(&[
        "family", "q", "dim", "r", "tau", "fail_rate", "half_width", "trials", "closed_form",
    ]);
    for (s, &(family, dim, r)) in FIG2_SERIES.iter().enumerate() {
        let spec = CodeSpec::with_redundancy(family, 3, r)?;
        let k = build_code(spec)?.k();
        if k != dim {
            return Err(crate::Error::Algorithm(format!(
                "{family} with r={r} has dimension {k}, expected {dim}"
            )));
        }
        for (idx, &tau) in taus.iter().enumerate() {
            let mut row = vec![
                family.to_string(),
                spec.q().to_string(),
                dim.to_string(),
                r.to_string(),
            ];
            row.extend(simulation_row(spec, tau, trials, derive_seed(seed, &[s as u64, idx as u64]))?);
            t.push(row);
        }
    }
    Ok(t)
}

/// Writes both figure tables into `dir`; returns the CSV paths.
pub fn write_figures(dir: &Path, seed: u64, trials: u64) -> anyhow::Result<Vec<PathBuf>> {
    fs::create_dir_all(dir).with_context(|| format!("creating {}", dir.display()))?;
    let fig1 = dir.join("fig1_q32.csv");
    write_with_manifest(
        &figure1()?,
        &fig1,
        &RunManifest::new(
            "figures",
            json!({"figure": 1, "ell": 5, "r_min": 1, "r_max": 8}),
            None,
            "fig1_q32.csv",
        ),
    )?;
    let fig2 = dir.join("fig2_q8.csv");
    write_with_manifest(
        &figure2(trials, seed)?,
        &fig2,
        &RunManifest::new(
            "figures",
            json!({
                "figure": 2,
                "ell": 3,
                "tau_min": 0.3,
                "tau_max": 1.0,
                "tau_step": 0.02,
                "trials": trials,
                "series": FIG2_SERIES
                    .iter()
                    .map(|(f, dim, r)| json!({"family": f.name(), "dim": dim, "r": r}))
                    .collect::<Vec<_>>(),
            }),
            Some(seed),
            "fig2_q8.csv",
        ),
    )?;
    Ok(vec![fig1, fig2])
}

fn out_name(out: &OutArgs) -> String {
    out.out
        .as_ref()
        .map_or_else(|| "-".to_string(), |p| p.display().to_string())
}

pub fn run(cli: Cli) -> anyhow::Result<()> {
    if let Some(n) = cli.threads {
        rayon::ThreadPoolBuilder::new()
            .num_threads(n)
            .build_global()
            .context("configuring the worker pool")?;
    }
    match cli.command {
        Command::Dim(a) => {
            let rs = a.degree.redundancies(a.ell)?;
            let table = dim_table(a.family, a.ell, &rs)?;
            let m = RunManifest::new(
                "dim",
                json!({"family": a.family.name(), "ell": a.ell, "r": rs}),
                None,
                &out_name(&a.out),
            );
            write_output(&table, &a.out, m)
        }
        Command::Bounds(a) => {
            let r_max = a.r_max.unwrap_or(1u32 << a.ell.clamp(2, 16) >> 2);
            let table = bounds_table(a.ell, a.r_min, r_max)?;
            let m = RunManifest::new(
                "bounds",
                json!({"ell": a.ell, "r_min": a.r_min, "r_max": r_max}),
                None,
                &out_name(&a.out),
            );
            write_output(&table, &a.out, m)
        }
        Command::Count(a) => {
            let table = count_table(a.ell, &a.r)?;
            let m = RunManifest::new("count", json!({"ell": a.ell, "r": a.r}), None, &out_name(&a.out));
            write_output(&table, &a.out, m)
        }
        Command::DeductQ(a) => {
            let (i, j) = deduct_q(a.i, a.j, a.ell)?;
            let mut t = Table::new(&["ell", "i", "j", "i_out", "j_out"]);
            t.push(vec![
                a.ell.to_string(),
                a.i.to_string(),
                a.j.to_string(),
                i.to_string(),
                j.to_string(),
            ]);
            t.write_csv(io::stdout().lock())
        }
        Command::Simulate(a) => {
            let r = a.degree.single(a.ell)?;
            let spec = CodeSpec::with_redundancy(a.family, a.ell, r)?;
            let taus = tau_grid(a.tau_min, a.tau_max, a.tau_step)?;
            let table = simulate_table(spec, &taus, a.trials, a.seed)?;
            let m = RunManifest::new(
                "simulate",
                json!({
                    "family": a.family.name(),
                    "ell": a.ell,
                    "r": r,
                    "tau_min": a.tau_min,
                    "tau_max": a.tau_max,
                    "tau_step": a.tau_step,
                    "trials": a.trials,
                }),
                Some(a.seed),
                &out_name(&a.out),
            );
            write_output(&table, &a.out, m)
        }
        Command::Figures(a) => {
            for path in write_figures(&a.out, a.seed, a.trials)? {
                eprintln!("wrote {}", path.display());
            }
            Ok(())
        }
        Command::Generator(a) => {
            let r = a.degree.single(a.ell)?;
            let inst = build_code(CodeSpec::with_redundancy(a.family, a.ell, r)?)?;
            let mut buf = Vec::new();
            write_matrix_csv(&inst.spec(), inst.generator(), &mut buf)?;
            match &a.out.out {
                None => io::stdout().write_all(&buf)?,
                Some(p) => {
                    fs::write(p, &buf).with_context(|| format!("writing {}", p.display()))?;
                    let m = RunManifest::new(
                        "generator",
                        json!({"family": a.family.name(), "ell": a.ell, "r": r}),
                        None,
                        &out_name(&a.out),
                    );
                    let mut text = serde_json::to_string_pretty(&m)?;
                    text.push('\n');
                    let mp = manifest_path(p);
                    fs::write(&mp, text).with_context(|| format!("writing {}", mp.display()))?;
                }
            }
            Ok(())
        }
    }
}
