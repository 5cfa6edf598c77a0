//! `rsb`: minimal and biharmonic isotropy orbits from restricted root data.

mod output;

use std::path::PathBuf;
use std::process::ExitCode;

use anyhow::{anyhow, bail, Context, Result};
use clap::{Args, Parser, Subcommand};
use serde::{Deserialize, Serialize};

use output::{emit, num, sci, vector, Format, Rows};
use rsb_core::catalog::{self, Params};
use rsb_core::chamber::Cell;
use rsb_core::orbitgeom;
use rsb_core::products::{verify_product_theorem, ProductReport};
use rsb_core::rootsys::from_family_spec;
use rsb_core::solver::{classify_cells, SolvedPoint};
use rsb_core::{
    cells, CellPoint64, OrbitReport64, Realized64, RootSystem, SolveStatus, SolverOptions,
};

const EXIT_USAGE: u8 = 1;
const EXIT_NUMERICAL: u8 = 2;

#[derive(Parser)]
#[command(
    name = "rsb",
    version,
    about = "Minimal and biharmonic isotropy orbits of symmetric spaces"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// List the catalog of symmetric spaces
    List(ListArgs),
    /// Solve for minimal and biharmonic orbits cell by cell
    Classify(ClassifyArgs),
    /// Check the two-factor product construction end to end
    Product(ProductArgs),
    /// Evaluate the orbit through a given point H
    Verify(VerifyArgs),
}

#[derive(Args)]
struct OutputArgs {
    #[arg(long, value_enum, default_value_t = Format::Table)]
    format: Format,
    /// Write to this file instead of stdout
    #[arg(long, short)]
    output: Option<PathBuf>,
}

#[derive(Args)]
#[group(required = true, multiple = false)]
struct SourceKind {
    /// Catalog entry, e.g. "SU(n)/SO(n)" with --param n=3, or "SU(3)/SO(3)"
    #[arg(long)]
    catalog: Option<String>,
    /// Root-system file
    #[arg(long)]
    custom: Option<PathBuf>,
    /// Family spec such as A2, BC3 or A1xA1
    #[arg(long)]
    family: Option<String>,
}

#[derive(Args)]
struct Source {
    #[command(flatten)]
    kind: SourceKind,
    /// Catalog parameter, repeatable
    #[arg(long = "param", value_name = "NAME=VALUE", value_parser = parse_param)]
    params: Vec<(String, u32)>,
    /// Multiplicities for --family, one per length class per factor
    #[arg(long, value_delimiter = ',')]
    mult: Vec<u32>,
}

#[derive(Args)]
struct SolverArgs {
    /// Residual tolerance
    #[arg(long, allow_negative_numbers = true, default_value_t = SolverOptions::default().tol)]
    tol: f64,
    /// Multi-start seeds per cell
    #[arg(long, default_value_t = SolverOptions::default().seeds)]
    seeds: usize,
    /// Worker threads (default: available parallelism)
    #[arg(long)]
    parallel: Option<usize>,
}

#[derive(Args)]
struct ListArgs {
    #[command(flatten)]
    out: OutputArgs,
}

#[derive(Args)]
struct ClassifyArgs {
    #[command(flatten)]
    source: Source,
    /// `all`, `full` or 1-based simple roots such as `1,3`
    #[arg(long, default_value = "all")]
    cell: String,
    #[command(flatten)]
    solver: SolverArgs,
    #[command(flatten)]
    out: OutputArgs,
}

#[derive(Args)]
struct ProductArgs {
    /// First factor as FAMILY[:m1,m2,..], e.g. A2:1
    #[arg(long)]
    left: String,
    /// Second factor, e.g. A1:4
    #[arg(long)]
    right: String,
    #[arg(long, default_value = "full")]
    left_cell: String,
    #[arg(long, default_value = "full")]
    right_cell: String,
    #[command(flatten)]
    solver: SolverArgs,
    #[command(flatten)]
    out: OutputArgs,
}

#[derive(Args)]
struct VerifyArgs {
    #[command(flatten)]
    source: Source,
    /// Ambient coordinates of H, comma separated; normalized before use
    #[arg(
        long,
        value_delimiter = ',',
        allow_hyphen_values = true,
        required = true
    )]
    h: Vec<f64>,
    #[command(flatten)]
    out: OutputArgs,
}

fn parse_param(s: &str) -> Result<(String, u32), String> {
    let (k, v) = s
        .split_once('=')
        .ok_or_else(|| format!("expected NAME=VALUE, got '{s}'"))?;
    let v = v.trim().parse::<u32>().map_err(|e| format!("'{v}': {e}"))?;
    Ok((k.trim().to_string(), v))
}

fn default_mults(spec: &str) -> Result<Vec<u32>> {
    let mut out = Vec::new();
    for part in spec.split(['x', 'X', '+']) {
        let (family, _) = rsb_core::rootsys::parse_family_rank(part)?;
        out.extend(family.length_classes().iter().map(|_| 1));
    }
    Ok(out)
}

fn family_system(spec: &str, mult: &[u32]) -> Result<RootSystem> {
    let mult = if mult.is_empty() {
        default_mults(spec)?
    } else {
        mult.to_vec()
    };
    Ok(from_family_spec(spec, &mult)?)
}

impl Source {
    fn load(&self) -> Result<RootSystem> {
        let k = &self.kind;
        if !self.params.is_empty() && k.catalog.is_none() {
            bail!("--param only applies to --catalog");
        }
        if !self.mult.is_empty() && k.family.is_none() {
            bail!("--mult only applies to --family");
        }
        if let Some(name) = &k.catalog {
            let params: Params = self.params.iter().cloned().collect();
            Ok(catalog::lookup(name, &params)?)
        } else if let Some(path) = &k.custom {
            catalog::load_custom(path).with_context(|| format!("cannot load {}", path.display()))
        } else if let Some(spec) = &k.family {
            family_system(spec, &self.mult)
        } else {
            bail!("no root-system source given")
        }
    }
}

fn solver_options(args: &SolverArgs) -> Result<SolverOptions> {
    if !(args.tol > 0.0 && args.tol.is_finite()) {
        bail!("--tol must be positive, got {}", args.tol);
    }
    if args.seeds == 0 {
        bail!("--seeds must be at least 1");
    }
    let seed_shift = match std::env::var("RSB_SEED") {
        Ok(v) => Some(
            v.trim()
                .parse::<u64>()
                .map_err(|e| anyhow!("RSB_SEED='{v}': {e}"))?,
        ),
        Err(_) => None,
    };
    Ok(SolverOptions {
        tol: args.tol,
        seeds: args.seeds,
        seed_shift,
        ..SolverOptions::default()
    })
}

fn with_threads<R: Send>(parallel: Option<usize>, f: impl FnOnce() -> R + Send) -> Result<R> {
    match parallel {
        None => Ok(f()),
        Some(0) => bail!("--parallel must be at least 1"),
        Some(k) => Ok(rayon::ThreadPoolBuilder::new()
            .num_threads(k)
            .build()?
            .install(f)),
    }
}

fn cmd_list(args: &ListArgs) -> Result<u8> {
    #[derive(Serialize)]
    struct Entry {
        name: &'static str,
        example: String,
        family: &'static str,
        rank: &'static str,
        multiplicities: &'static str,
        dim_m: &'static str,
        params: &'static [&'static str],
    }
    let mut rows = Rows::new(vec![
        "name",
        "example",
        "family",
        "rank",
        "multiplicities",
        "dim_m",
        "params",
    ]);
    let mut entries = Vec::new();
    for e in catalog::entries() {
        let example = catalog::render_name(e.name, &e.example_params());
        rows.push(vec![
            e.name.into(),
            example.clone(),
            e.family.into(),
            e.rank_rule.into(),
            e.multiplicities.into(),
            e.dim_formula.into(),
            e.params.join(","),
        ]);
        entries.push(Entry {
            name: e.name,
            example,
            family: e.family,
            rank: e.rank_rule,
            multiplicities: e.multiplicities,
            dim_m: e.dim_formula,
            params: e.params,
        });
    }
    emit(args.out.format, args.out.output.as_deref(), &rows, &entries)?;
    Ok(0)
}

#[derive(Serialize, Deserialize)]
pub struct CellOutput {
    pub cell: String,
    pub minimal_status: SolveStatus,
    pub biharmonic_status: SolveStatus,
    pub seeds_tried: usize,
    pub boundary_escapes: usize,
    pub solutions: Vec<SolvedPoint<f64>>,
}

#[derive(Serialize, Deserialize)]
pub struct ClassifyOutput {
    pub system: String,
    pub rank: usize,
    pub ambient_dim: usize,
    pub cells: Vec<CellOutput>,
}

fn cmd_classify(args: &ClassifyArgs) -> Result<u8> {
    let opts = solver_options(&args.solver)?;
    let system = args.source.load()?;
    let rs: Realized64 = system.realize();
    let selected = if args.cell.trim().eq_ignore_ascii_case("all") {
        cells(rs.rank())
    } else {
        vec![Cell::parse(&args.cell, rs.rank())?]
    };
    let results = with_threads(args.solver.parallel, || {
        classify_cells(&rs, &selected, &opts)
    })??;

    let f = args.out.format;
    let mut rows = Rows::new(vec![
        "cell",
        "x",
        "H",
        "n",
        "tension",
        "bitension",
        "class",
        "factor_weights",
    ]);
    let mut out = ClassifyOutput {
        system: rs.label().into(),
        rank: rs.rank(),
        ambient_dim: rs.ambient_dim(),
        cells: Vec::new(),
    };
    let mut failed = Vec::new();
    for c in results {
        if c.minimal.status != SolveStatus::Converged {
            failed.push(c.cell.to_string());
        }
        if c.biharmonic.points.is_empty() {
            let dash = || "-".to_string();
            rows.push(vec![
                c.cell.to_string(),
                dash(),
                dash(),
                dash(),
                dash(),
                dash(),
                "none".into(),
                dash(),
            ]);
        }
        for p in &c.biharmonic.points {
            let r = &p.report;
            rows.push(vec![
                c.cell.to_string(),
                vector(&r.point.dual_coordinates(&rs), f),
                vector(&r.point.h, f),
                r.dim.to_string(),
                sci(r.tension_norm, f),
                sci(r.bitension_norm, f),
                r.classification.to_string(),
                vector(&r.factor_weights, f),
            ]);
        }
        out.cells.push(CellOutput {
            cell: c.cell.to_string(),
            minimal_status: c.minimal.status,
            biharmonic_status: c.biharmonic.status,
            seeds_tried: c.biharmonic.seeds_tried,
            boundary_escapes: c.biharmonic.boundary_escapes,
            solutions: c.biharmonic.points,
        });
    }
    emit(f, args.out.output.as_deref(), &rows, &out)?;
    if !failed.is_empty() {
        eprintln!(
            "error: minimal solve found no solution on cell(s) {}",
            failed.join(" ")
        );
        return Ok(EXIT_NUMERICAL);
    }
    Ok(0)
}

fn factor_arg(s: &str) -> Result<RootSystem> {
    let (spec, mult) = match s.split_once(':') {
        Some((spec, m)) => {
            let mult = m
                .split(',')
                .map(|t| {
                    t.trim()
                        .parse::<u32>()
                        .map_err(|e| anyhow!("multiplicity '{t}': {e}"))
                })
                .collect::<Result<Vec<_>>>()?;
            (spec, mult)
        }
        None => (s, Vec::new()),
    };
    family_system(spec.trim(), &mult)
}

fn cmd_product(args: &ProductArgs) -> Result<u8> {
    let opts = solver_options(&args.solver)?;
    let left = factor_arg(&args.left).context("--left")?;
    let right = factor_arg(&args.right).context("--right")?;
    let lc = Cell::parse(&args.left_cell, left.rank())?;
    let rc = Cell::parse(&args.right_cell, right.rank())?;
    let report: ProductReport = with_threads(args.solver.parallel, || {
        verify_product_theorem(&left, &lc, &right, &rc, &opts)
    })??;

    let f = args.out.format;
    let mut rows = Rows::new(vec![
        "cos2",
        "theta",
        "n1",
        "n2",
        "tension",
        "bitension",
        "class",
        "expected",
        "radii",
        "ok",
    ]);
    for c in &report.candidates {
        rows.push(vec![
            c.cos2.to_string(),
            num(c.theta, f),
            report.angles.n1.to_string(),
            report.angles.n2.to_string(),
            sci(c.report.tension_norm, f),
            sci(c.report.bitension_norm, f),
            c.report.classification.to_string(),
            c.expected.to_string(),
            vector(&c.factor_radii, f),
            c.ok.to_string(),
        ]);
    }
    emit(f, args.out.output.as_deref(), &rows, &report)?;
    if f == Format::Table {
        println!(
            "verdict: {} ({})",
            report.verdict(),
            if report.pass { "pass" } else { "FAIL" }
        );
    }
    if !report.pass {
        eprintln!("error: residuals do not match the expected classification");
        return Ok(EXIT_NUMERICAL);
    }
    Ok(0)
}

#[derive(Serialize, Deserialize)]
pub struct VerifyOutput {
    pub system: String,
    pub dual_coordinates: Vec<f64>,
    /// Positive roots vanishing on H.
    pub vanishing_roots: Vec<Vec<f64>>,
    pub biheqn_residual_norm: f64,
    /// `<(τ_H)_H, H>` and `<(τ_{2,H})_H, H>`; both vanish.
    pub orthogonality: [f64; 2],
    pub report: OrbitReport64,
}

fn cmd_verify(args: &VerifyArgs) -> Result<u8> {
    let system = args.source.load()?;
    let rs: Realized64 = system.realize();
    let p = CellPoint64::from_vector(&rs, &args.h)?;
    let report = OrbitReport64::evaluate(&rs, &p)?;
    let dot = |a: &[f64], b: &[f64]| a.iter().zip(b).map(|(x, y)| x * y).sum::<f64>();
    let out = VerifyOutput {
        system: rs.label().into(),
        dual_coordinates: p.dual_coordinates(&rs),
        vanishing_roots: p.vanishing.iter().map(|&i| rs.roots()[i].clone()).collect(),
        biheqn_residual_norm: orbitgeom::biharmonic_residuals(&rs, &p)?.0,
        orthogonality: [dot(&report.tau_tangent, &p.h), dot(&report.bitension, &p.h)],
        report,
    };

    let f = args.out.format;
    let r = &out.report;
    let mut rows = Rows::new(vec!["field", "value"]);
    let mut add = |k: &'static str, v: String| rows.push(vec![k.into(), v]);
    add("system", out.system.clone());
    add("H", vector(&r.point.h, f));
    add("cell", r.point.cell.to_string());
    add("x", vector(&out.dual_coordinates, f));
    add(
        "vanishing",
        out.vanishing_roots
            .iter()
            .map(|v| vector(v, f))
            .collect::<Vec<_>>()
            .join(" "),
    );
    add("n", r.dim.to_string());
    add("tau_tilde", vector(&r.tau_tilde, f));
    add("tension", vector(&r.tau_tangent, f));
    add("bitension", vector(&r.bitension, f));
    add("tension_norm", sci(r.tension_norm, f));
    add("bitension_norm", sci(r.bitension_norm, f));
    add("biheqn_residual_norm", sci(out.biheqn_residual_norm, f));
    add("tension_dot_h", sci(out.orthogonality[0], f));
    add("bitension_dot_h", sci(out.orthogonality[1], f));
    add(
        "shape_spectrum",
        r.shape_spectrum
            .iter()
            .map(|e| format!("{}x{}", e.multiplicity, sci(e.eigenvalue, f)))
            .collect::<Vec<_>>()
            .join(" "),
    );
    add("factor_weights", vector(&r.factor_weights, f));
    add("classification", r.classification.to_string());
    emit(f, args.out.output.as_deref(), &rows, &out)?;
    Ok(0)
}

fn is_broken_pipe(err: &anyhow::Error) -> bool {
    err.chain().any(|e| {
        e.downcast_ref::<std::io::Error>().is_some_and(|io| io.kind() == std::io::ErrorKind::BrokenPipe)
            || e.downcast_ref::<rsb_core::Error>()
                .is_some_and(|c| matches!(c, rsb_core::Error::Io(io) if io.kind() == std::io::ErrorKind::BrokenPipe))
    })
}

fn exit_code(err: &anyhow::Error) -> u8 {
    match err.downcast_ref::<rsb_core::Error>() {
        Some(rsb_core::Error::SolveFailed { .. }) => EXIT_NUMERICAL,
        _ => EXIT_USAGE,
    }
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(c) => c,
        Err(e) => {
            let code = if e.use_stderr() { EXIT_USAGE } else { 0 };
            let _ = e.print();
            return ExitCode::from(code);
        }
    };
    let result = match &cli.command {
        Command::List(a) => cmd_list(a),
        Command::Classify(a) => cmd_classify(a),
        Command::Product(a) => cmd_product(a),
        Command::Verify(a) => cmd_verify(a),
    };
    match result {
        Ok(code) => ExitCode::from(code),
        Err(e) if is_broken_pipe(&e) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e:#}");
            ExitCode::from(exit_code(&e))
        }
    }
}
