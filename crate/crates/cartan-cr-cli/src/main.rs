//! `cartan-cr`: evaluate Cartan CR invariants, scan model charts for
//! CR-umbilical points, cross-check the two engines, list the model gallery,
//! and test plurisubharmonicity of potentials.
//!
//! Exit codes: 0 success, 1 usage error, 2 domain/math error.

use std::collections::HashMap;
use std::fs::File;
use std::io::Write;
use std::process::ExitCode;

use clap::error::ErrorKind;
use clap::{Args, Parser, Subcommand};

use cartan_cr::{
    build_model, cartan_invariant, cartan_locus_iw, catalog, cross_check, eval_chart_point,
    psh_check, scan_grid, write_csv, write_summary_json, ChartSurface, Complex64, EngineSel, Expr,
    GraphHypersurface, GraphOptions, ImplicitHypersurface, ImplicitOptions, ModelEntry, RangeSpec,
    ScanConfig,
};

#[derive(Parser)]
#[command(name = "cartan-cr", version, about = "Cartan CR curvature calculator and umbilical-point scanner")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Evaluate the invariant of a gallery model at one chart point.
    Eval(EvalArgs),
    /// Evaluate the invariant of a user-supplied expression at one point.
    EvalExpr(EvalExprArgs),
    /// Scan a grid over a model chart for umbilical candidates.
    Scan(ScanArgs),
    /// Cross-check the zero-locus classification of the two engines.
    Check(CheckArgs),
    /// List the model gallery.
    Models,
    /// Levi matrix and minimum eigenvalue of a potential.
    Psh(PshArgs),
}

#[derive(Args)]
struct EvalArgs {
    #[arg(long)]
    model: String,
    #[arg(long = "param", value_parser = parse_param)]
    params: Vec<(String, f64)>,
    #[arg(long)]
    chart: String,
    /// Comma-separated chart coordinates.
    #[arg(long)]
    point: String,
    #[arg(long, default_value = "graph", value_parser = parse_engine)]
    engine: EngineSel,
}

#[derive(Args)]
struct EvalExprArgs {
    /// Graphing function phi(x, y, u); the point is x,y,u.
    #[arg(long, conflicts_with = "implicit")]
    graph: Option<String>,
    /// Implicit defining function F(z, w, zb, wb); the point is
    /// Re z, Im z, Re w, Im w.
    #[arg(long)]
    implicit: Option<String>,
    #[arg(long = "param", value_parser = parse_param)]
    params: Vec<(String, f64)>,
    #[arg(long)]
    point: String,
}

#[derive(Args)]
struct ScanArgs {
    #[arg(long)]
    model: String,
    #[arg(long = "param", value_parser = parse_param)]
    params: Vec<(String, f64)>,
    #[arg(long)]
    chart: String,
    /// Ranges var=lo:hi:n (grid) or var=value (fixed).
    #[arg(long = "range", value_parser = parse_range)]
    ranges: Vec<(String, RangeSpec)>,
    #[arg(long, default_value = "graph", value_parser = parse_engine)]
    engine: EngineSel,
    #[arg(long, default_value_t = 1e-7)]
    threshold: f64,
    #[arg(long)]
    refine: bool,
    /// CSV output path.
    #[arg(long)]
    out: Option<String>,
    /// JSON summary path.
    #[arg(long)]
    summary: Option<String>,
}

#[derive(Args)]
struct CheckArgs {
    #[arg(long)]
    model: String,
    #[arg(long = "param", value_parser = parse_param)]
    params: Vec<(String, f64)>,
    #[arg(long, default_value_t = 100)]
    samples: usize,
    #[arg(long, default_value_t = 0)]
    seed: u64,
    #[arg(long, default_value_t = 1e-7)]
    threshold: f64,
}

#[derive(Args)]
struct PshArgs {
    /// Potential over {x,y,u,v} or {z,w,zb,wb}.
    #[arg(long)]
    expr: String,
    #[arg(long = "param", value_parser = parse_param)]
    params: Vec<(String, f64)>,
    /// Comma-separated x,y,u,v.
    #[arg(long)]
    point: String,
}

fn parse_param(s: &str) -> Result<(String, f64), String> {
    let (name, value) = s
        .split_once('=')
        .ok_or_else(|| format!("expected k=v, got `{s}`"))?;
    let value: f64 = value
        .parse()
        .map_err(|_| format!("parameter value `{value}` is not a number"))?;
    Ok((name.to_string(), value))
}

fn parse_engine(s: &str) -> Result<EngineSel, String> {
    match s {
        "graph" => Ok(EngineSel::Graph),
        "implicit" => Ok(EngineSel::Implicit),
        "both" => Ok(EngineSel::Both),
        other => Err(format!("unknown engine `{other}` (graph|implicit|both)")),
    }
}

fn parse_range(s: &str) -> Result<(String, RangeSpec), String> {
    let (name, rest) = s
        .split_once('=')
        .ok_or_else(|| format!("expected var=lo:hi:n or var=value, got `{s}`"))?;
    let parts: Vec<&str> = rest.split(':').collect();
    let spec = match parts.as_slice() {
        [v] => RangeSpec::Fixed(v.parse().map_err(|_| format!("bad value `{v}`"))?),
        [lo, hi, n] => RangeSpec::Linspace {
            lo: lo.parse().map_err(|_| format!("bad bound `{lo}`"))?,
            hi: hi.parse().map_err(|_| format!("bad bound `{hi}`"))?,
            n: n.parse().map_err(|_| format!("bad count `{n}`"))?,
        },
        _ => return Err(format!("expected var=lo:hi:n or var=value, got `{s}`")),
    };
    Ok((name.to_string(), spec))
}

fn parse_point(s: &str, expected: usize) -> Result<Vec<f64>, CliError> {
    let coords: Result<Vec<f64>, _> = s.split(',').map(|p| p.trim().parse::<f64>()).collect();
    let coords = coords.map_err(|_| CliError::Usage(format!("bad --point `{s}`")))?;
    if coords.len() != expected {
        return Err(CliError::Usage(format!(
            "--point needs {expected} comma-separated coordinates, got {}",
            coords.len()
        )));
    }
    Ok(coords)
}

enum CliError {
    Usage(String),
    Math(String),
}

impl CliError {
    fn code(&self) -> u8 {
        match self {
            CliError::Usage(_) => 1,
            CliError::Math(_) => 2,
        }
    }
    fn message(&self) -> &str {
        match self {
            CliError::Usage(m) | CliError::Math(m) => m,
        }
    }
}

fn usage(e: impl ToString) -> CliError {
    CliError::Usage(e.to_string())
}

fn math(e: impl ToString) -> CliError {
    CliError::Math(e.to_string())
}

fn params_map(pairs: &[(String, f64)]) -> HashMap<String, f64> {
    pairs.iter().cloned().collect()
}

fn load_model(id: &str, pairs: &[(String, f64)]) -> Result<ModelEntry, CliError> {
    build_model(id, &params_map(pairs)).map_err(usage)
}

fn print_invariant(inv: Complex64, levi_or_fw: f64, normalized: f64) {
    println!("inv_re = {}", inv.re);
    println!("inv_im = {}", inv.im);
    println!("inv_abs = {}", inv.norm());
    println!("levi_or_fw_abs = {levi_or_fw}");
    println!("normalized = {normalized}");
}

fn run_eval(args: &EvalArgs) -> Result<(), CliError> {
    let entry = load_model(&args.model, &args.params)?;
    let named = entry
        .chart(&args.chart)
        .ok_or_else(|| usage(format!("chart `{}` not found in `{}`", args.chart, args.model)))?;
    let chart = match args.engine {
        EngineSel::Graph if !named.is_graph() => entry
            .graph_chart()
            .filter(|c| c.coords == named.coords)
            .ok_or_else(|| usage("model has no graph chart on these coordinates"))?,
        EngineSel::Implicit if named.is_graph() => entry
            .implicit_chart()
            .filter(|c| c.coords == named.coords)
            .ok_or_else(|| usage("model has no implicit chart on these coordinates"))?,
        EngineSel::Both => return Err(usage("eval expects --engine graph or implicit")),
        _ => named,
    };
    let coords = parse_point(&args.point, chart.coords.len())?;
    if !chart.admissible(&coords).map_err(math)? {
        return Err(math(format!(
            "point {coords:?} is outside the chart domain"
        )));
    }
    let eval = eval_chart_point(chart, &coords).map_err(math)?;
    print_invariant(eval.inv, eval.levi_or_fw_abs, eval.normalized);
    Ok(())
}

fn run_eval_expr(args: &EvalExprArgs) -> Result<(), CliError> {
    let params = params_map(&args.params);
    match (&args.graph, &args.implicit) {
        (Some(phi), None) => {
            let expr = Expr::parse(phi, &["x", "y", "u"]).map_err(usage)?;
            for p in expr.params() {
                if !params.contains_key(&p) {
                    return Err(usage(format!("unbound parameter `{p}` (use --param {p}=...)")));
                }
            }
            let coords = parse_point(&args.point, 3)?;
            let surface = GraphHypersurface::new(expr).with_params(params);
            let r = cartan_invariant(
                &surface,
                [coords[0], coords[1], coords[2]],
                &GraphOptions::default(),
            )
            .map_err(math)?;
            let scale = 1.0f64.max(r.pbar_value.norm().powi(3));
            print_invariant(r.j_star, r.levi_factor, r.j_star.norm() / scale);
            Ok(())
        }
        (None, Some(f)) => {
            let expr = Expr::parse(f, &["z", "w", "zb", "wb"]).map_err(usage)?;
            for p in expr.params() {
                if !params.contains_key(&p) {
                    return Err(usage(format!("unbound parameter `{p}` (use --param {p}=...)")));
                }
            }
            let coords = parse_point(&args.point, 4)?;
            let surface = ImplicitHypersurface::new(expr).with_params(params);
            let z = Complex64::new(coords[0], coords[1]);
            let w = Complex64::new(coords[2], coords[3]);
            surface
                .reality_residual(&[(z, w)])
                .map_err(math)
                .and_then(|res| {
                    if res > 1e-9 {
                        Err(math(format!(
                            "defining function is not real on the conjugate locus (residue {res:.3e})"
                        )))
                    } else {
                        Ok(())
                    }
                })?;
            let r = cartan_locus_iw(&surface, z, w, &ImplicitOptions::default()).map_err(math)?;
            print_invariant(r.i_w, r.f_w.norm(), r.normalized_magnitude());
            Ok(())
        }
        _ => Err(usage("eval-expr needs exactly one of --graph or --implicit")),
    }
}

fn run_scan(args: &ScanArgs) -> Result<(), CliError> {
    let entry = load_model(&args.model, &args.params)?;
    let cfg = ScanConfig {
        chart: args.chart.clone(),
        ranges: args.ranges.clone(),
        engine: args.engine,
        zero_threshold: args.threshold,
        refine: args.refine,
    };
    let out = scan_grid(&entry, &cfg).map_err(|e| match e {
        cartan_cr::ScanError::ChartNotFound(..)
        | cartan_cr::ScanError::UnknownCoordinate(..)
        | cartan_cr::ScanError::GridTooSmall(..)
        | cartan_cr::ScanError::EngineUnavailable(..) => usage(e),
        other => math(other),
    })?;
    if let Some(path) = &args.out {
        let mut file = File::create(path).map_err(math)?;
        write_csv(&mut file, &out).map_err(math)?;
    }
    if let Some(path) = &args.summary {
        let mut file = File::create(path).map_err(math)?;
        write_summary_json(&mut file, &out).map_err(math)?;
    }
    for s in &out.summaries {
        println!(
            "engine {}: {} ok, {} skipped, min |inv| = {}, candidates: {}",
            s.engine,
            s.n_ok,
            s.n_skipped,
            s.min_abs.map_or("n/a".to_string(), |m| m.to_string()),
            s.candidates.len()
        );
        if let Some(argmin) = &s.argmin {
            let mut pairs: Vec<_> = argmin.iter().collect();
            pairs.sort_by(|a, b| a.0.cmp(b.0));
            let formatted: Vec<String> =
                pairs.iter().map(|(k, v)| format!("{k} = {v}")).collect();
            println!("  argmin: {}", formatted.join(", "));
        }
        for c in &s.candidates {
            println!(
                "  candidate at {:?}: |inv| = {:.6e} (normalized {:.3e}){}",
                c.coords,
                c.inv_abs,
                c.normalized,
                c.refined_abs
                    .map_or(String::new(), |r| format!(", refined to {r:.6e}"))
            );
        }
    }
    Ok(())
}

fn run_check(args: &CheckArgs) -> Result<(), CliError> {
    let entry = load_model(&args.model, &args.params)?;
    let report = cross_check(&entry, args.samples, args.seed, args.threshold).map_err(math)?;
    print!("{report}");
    if report.agreement_rate() < 1.0 {
        return Err(math("engines disagree on the zero-locus classification"));
    }
    Ok(())
}

fn run_models() -> Result<(), CliError> {
    for d in catalog() {
        println!("{} ({:?})", d.id, d.kind);
        println!("  {}", d.summary);
        if !d.params.is_empty() {
            for (name, default, desc) in d.params {
                if default.is_nan() {
                    println!("  param {name}: {desc}");
                } else {
                    println!("  param {name} (default {default}): {desc}");
                }
            }
        }
        let entry = build_model(d.id, &HashMap::new()).map_err(math)?;
        println!("  level convention: {}", entry.level.describe());
        for chart in &entry.charts {
            let kind = if chart.is_graph() { "graph" } else { "implicit" };
            println!("  chart `{}` [{kind}] over ({})", chart.name, chart.coords.join(", "));
            match &chart.surface {
                ChartSurface::Graph(g) => println!("    v = {}", g.phi),
                ChartSurface::Implicit { surface, .. } => println!("    F = {}", surface.f),
            }
            if !chart.notes.is_empty() {
                println!("    note: {}", chart.notes);
            }
        }
        if !entry.notes.is_empty() {
            println!("  note: {}", entry.notes);
        }
        println!();
    }
    Ok(())
}

fn run_psh(args: &PshArgs) -> Result<(), CliError> {
    // accept either variable family; parse against the union and let psh_check
    // classify
    let expr = Expr::parse(&args.expr, &["x", "y", "u", "v", "z", "w", "zb", "wb"])
        .map_err(usage)?;
    let coords = parse_point(&args.point, 4)?;
    let result = psh_check(
        &expr,
        [coords[0], coords[1], coords[2], coords[3]],
        &params_map(&args.params),
    )
    .map_err(math)?;
    let m = &result.levi_matrix;
    println!("levi_matrix = [[{} + {}i, {} + {}i],", m[0][0].re, m[0][0].im, m[0][1].re, m[0][1].im);
    println!("               [{} + {}i, {} + {}i]]", m[1][0].re, m[1][0].im, m[1][1].re, m[1][1].im);
    println!("eigenvalues = {}, {}", result.eigenvalues[0], result.eigenvalues[1]);
    println!("min_eigenvalue = {}", result.min_eigenvalue);
    Ok(())
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            let code = match e.kind() {
                ErrorKind::DisplayHelp | ErrorKind::DisplayVersion => 0,
                _ => 1,
            };
            let _ = e.print();
            return ExitCode::from(code);
        }
    };
    let result = match &cli.command {
        Command::Eval(args) => run_eval(args),
        Command::EvalExpr(args) => run_eval_expr(args),
        Command::Scan(args) => run_scan(args),
        Command::Check(args) => run_check(args),
        Command::Models => run_models(),
        Command::Psh(args) => run_psh(args),
    };
    match result {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            let _ = writeln!(std::io::stderr(), "error: {}", e.message());
            ExitCode::from(e.code())
        }
    }
}
