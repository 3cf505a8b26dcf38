//! `simderiv`: approximate gradients, Hessians, selected Hessian entries,
//! Hessian-vector products, and higher-order derivative tensors of a scalar
//! function from function evaluations only.
//!
//! Subcommands: `approx` (run an estimator), `count` (evaluation counts),
//! `points` (emit a scheme's deduplicated sample plan), `order` (radius
//! sweep with empirical convergence order), and `bounds` (measured error
//! against the theoretical ceilings).

mod output;
mod schemes;
mod table;

use std::path::{Path, PathBuf};

use anyhow::{bail, Context, Result};
use clap::{Args, Parser, Subcommand};
use serde_json::json;

use output::{emit, matrix_block, sci17, sig6, Format};
use schemes::{resolve, SchemeParams, DEMO_X0};
use simderiv_core::directions::default_step;
use simderiv_core::estimators::{cshd, estimate, gcsh};
use simderiv_core::harness::{
    convergence_order, default_radii, lookup, measure, verify_bound, TestFunction,
};
use simderiv_core::sampling::{enumerate, EvalCache, SamplePlan};
use simderiv_core::DerivTensor;

#[derive(Parser)]
#[command(
    name = "simderiv",
    version,
    about = "Derivative approximation from function evaluations: simplex \
             gradients, full and partial Hessians, Hessian-vector products, \
             and order-P derivative tensors"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Approximate a derivative object of a registry function or a CSV
    /// evaluation table
    Approx(ApproxArgs),
    /// Print a scheme's distinct-evaluation count and its formula
    Count(CountArgs),
    /// Emit a scheme's deduplicated sample plan
    Points(PointsArgs),
    /// Radius sweep: measured error per radius and fitted convergence order
    Order(SweepArgs),
    /// Check measured errors against the theoretical ceilings (exit 1 on
    /// any violation)
    Bounds(SweepArgs),
}

#[derive(Args)]
struct ApproxArgs {
    /// Registry function name (see `order --help`) or path to a CSV table
    /// with header x1,...,xn,f
    target: String,
    /// Scheme name
    #[arg(long)]
    scheme: String,
    /// Point of interest, comma-separated (demo schemes default to 2,-2,5)
    #[arg(long)]
    x0: Option<String>,
    /// Step length; defaults to 1e-3 * max(1, ||x0||)
    #[arg(long)]
    h: Option<f64>,
    /// Product vector for the hvp schemes, comma-separated
    #[arg(long)]
    v: Option<String>,
    /// 1-based row index for the row schemes
    #[arg(long, visible_alias = "i")]
    row: Option<usize>,
    /// 1-based diagonal indices for diag/cshd, comma-separated
    #[arg(long)]
    subset: Option<String>,
    #[arg(long, value_enum, default_value_t = Format::Table)]
    format: Format,
    /// Output file; relative paths resolve under SIMDERIV_OUT_DIR
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Args)]
struct CountArgs {
    /// Scheme name
    scheme: String,
    #[arg(long)]
    n: usize,
    /// 1-based diagonal indices for diag/cshd
    #[arg(long)]
    subset: Option<String>,
    #[arg(long, value_enum, default_value_t = Format::Table)]
    format: Format,
}

#[derive(Args)]
struct PointsArgs {
    /// Scheme name
    scheme: String,
    #[arg(long)]
    n: usize,
    /// Center point (defaults to the origin)
    #[arg(long)]
    x0: Option<String>,
    /// Step length; defaults to 1e-3 * max(1, ||x0||)
    #[arg(long)]
    h: Option<f64>,
    /// Product vector for the hvp schemes
    #[arg(long)]
    v: Option<String>,
    /// 1-based row index for the row schemes
    #[arg(long, visible_alias = "i")]
    row: Option<usize>,
    /// 1-based diagonal indices for diag/cshd
    #[arg(long)]
    subset: Option<String>,
    #[arg(long, value_enum, default_value_t = Format::Csv)]
    format: Format,
    /// Output file; relative paths resolve under SIMDERIV_OUT_DIR
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Args)]
struct SweepArgs {
    /// Registry function name
    function: String,
    /// Point of interest, comma-separated
    #[arg(long)]
    x0: String,
    /// Scheme name
    #[arg(long)]
    scheme: String,
    /// Step sequence, comma-separated and strictly decreasing
    #[arg(long)]
    radii: Option<String>,
    /// Product vector for the hvp schemes
    #[arg(long)]
    v: Option<String>,
    /// 1-based row index for the row schemes
    #[arg(long, visible_alias = "i")]
    row: Option<usize>,
    #[arg(long, value_enum, default_value_t = Format::Table)]
    format: Format,
    /// Output file; relative paths resolve under SIMDERIV_OUT_DIR
    #[arg(long)]
    out: Option<PathBuf>,
}

fn main() -> Result<()> {
    match Cli::parse().command {
        Command::Approx(args) => cmd_approx(args),
        Command::Count(args) => cmd_count(args),
        Command::Points(args) => cmd_points(args),
        Command::Order(args) => cmd_order(args),
        Command::Bounds(args) => cmd_bounds(args),
    }
}

fn parse_floats(s: &str) -> Result<Vec<f64>> {
    s.split(',')
        .map(|t| {
            t.trim()
                .parse::<f64>()
                .with_context(|| format!("invalid number {t:?}"))
        })
        .collect()
}

/// 1-based CLI indices to 0-based.
fn parse_indices(s: &str) -> Result<Vec<usize>> {
    s.split(',')
        .map(|t| {
            let i: usize = t
                .trim()
                .parse()
                .with_context(|| format!("invalid index {t:?}"))?;
            if i == 0 {
                bail!("indices are 1-based");
            }
            Ok(i - 1)
        })
        .collect()
}

fn scheme_params(
    n: usize,
    h: f64,
    row: Option<usize>,
    v: &Option<String>,
    subset: &Option<String>,
) -> Result<SchemeParams> {
    Ok(SchemeParams {
        n,
        h,
        row: match row {
            Some(0) => bail!("--row is 1-based"),
            Some(r) => Some(r - 1),
            None => None,
        },
        v: v.as_deref().map(parse_floats).transpose()?,
        subset: subset.as_deref().map(parse_indices).transpose()?,
    })
}

enum Objective {
    Named(TestFunction),
    Table(table::EvalTable),
}

impl Objective {
    fn load(target: &str) -> Result<Objective> {
        if let Some(f) = lookup(target) {
            return Ok(Objective::Named(f));
        }
        let path = Path::new(target);
        if path.exists() {
            return Ok(Objective::Table(table::load_table(path)?));
        }
        let names: Vec<&str> = simderiv_core::harness::registry()
            .iter()
            .map(|(n, _)| *n)
            .collect();
        bail!(
            "{target} is neither a registry function ({}) nor an existing file",
            names.join(", ")
        )
    }

    fn dim(&self) -> usize {
        match self {
            Objective::Named(f) => f.dim(),
            Objective::Table(t) => t.n,
        }
    }

    fn cache(&self, plan: &SamplePlan) -> Result<EvalCache> {
        match self {
            Objective::Named(f) => {
                let mut cache = EvalCache::new();
                cache.evaluate(|x: &[f64]| f.eval(x), plan)?;
                Ok(cache)
            }
            Objective::Table(t) => table::cache_for_plan(t, plan),
        }
    }
}

fn tensor_json(t: &DerivTensor) -> serde_json::Value {
    json!({ "dims": t.dims(), "data": t.data() })
}

fn tensor_csv(t: &DerivTensor) -> String {
    let mut s = String::new();
    let cols = *t.dims().last().unwrap();
    for row in t.data().chunks(cols) {
        s.push_str(
            &row.iter()
                .map(|x| sci17(*x))
                .collect::<Vec<_>>()
                .join(","),
        );
        s.push('\n');
    }
    s
}

fn cmd_approx(args: ApproxArgs) -> Result<()> {
    let objective = Objective::load(&args.target)?;
    let demo_scheme = args.scheme.starts_with("gcsh-example");
    let x0 = match &args.x0 {
        Some(s) => parse_floats(s)?,
        None if demo_scheme => DEMO_X0.to_vec(),
        None => bail!("approx needs --x0"),
    };
    if x0.len() != objective.dim() {
        bail!(
            "x0 has {} coordinates but the objective expects {}",
            x0.len(),
            objective.dim()
        );
    }
    if demo_scheme && args.h.is_some() {
        eprintln!("note: demonstration schemes carry fixed directions; --h is ignored");
    }
    let h = args.h.unwrap_or_else(|| default_step(&x0));
    let params = scheme_params(x0.len(), h, args.row, &args.v, &args.subset)?;
    let resolved = resolve(&args.scheme, &params)?;

    let (s, family) = resolved.spec.directions()?;
    let plan = enumerate(&x0, &s, &family, resolved.spec.centered());
    let cache = objective.cache(&plan)?;

    // Bound ceiling when the target is a registry polynomial and the scheme
    // maps onto a sweep configuration.
    let ceiling = match (&objective, &resolved.sweep) {
        (Objective::Named(f), Some(sweep)) if f.polynomial().is_some() => {
            measure(sweep, f, &x0, h)?.bound
        }
        _ => None,
    };

    let mut human = String::new();
    human.push_str(&format!("target: {}\n", args.target));
    human.push_str(&format!("scheme: {}\n", resolved.name));
    human.push_str(&format!(
        "x0: {}\n",
        x0.iter().map(|v| sig6(*v)).collect::<Vec<_>>().join(", ")
    ));
    human.push_str(&format!("distinct evaluations: {}\n", plan.count()));

    let mut payload = json!({
        "command": "approx",
        "target": args.target,
        "scheme": resolved.name,
        "x0": x0,
        "h": h,
        "eval_count": plan.count(),
    });

    let primary: DerivTensor;
    if resolved.demo {
        let g = gcsh(&cache, &x0, &s, &family)?;
        let d = cshd(&cache, &x0, &s)?;
        human.push_str(&format!(
            "centered Hessian estimate ({0}x{0}):\n{1}",
            g.nrows(),
            matrix_block(g.nrows(), g.ncols(), g.data())
        ));
        human.push_str(&format!(
            "centered diagonal estimate:\n  {}\n",
            d.iter().map(|v| sig6(*v)).collect::<Vec<_>>().join("  ")
        ));
        payload["cshd"] = json!(d);
        primary = DerivTensor::from_matrix(&g);
    } else if resolved.use_cshd {
        let d = cshd(&cache, &x0, &s)?;
        human.push_str(&format!(
            "centered diagonal estimate:\n  {}\n",
            d.iter().map(|v| sig6(*v)).collect::<Vec<_>>().join("  ")
        ));
        primary = DerivTensor::from_vector(d);
    } else {
        let t = estimate(&cache, &resolved.spec, &x0)?;
        match t.order() {
            1 => human.push_str(&format!(
                "estimate:\n  {}\n",
                t.data().iter().map(|v| sig6(*v)).collect::<Vec<_>>().join("  ")
            )),
            2 => {
                let dims = (t.dims()[0], t.dims()[1]);
                human.push_str(&format!(
                    "estimate ({}x{}):\n{}",
                    dims.0,
                    dims.1,
                    matrix_block(dims.0, dims.1, t.data())
                ));
                if resolved.name == "diag" {
                    let diag: Vec<f64> = (0..dims.0.min(dims.1))
                        .map(|i| t.data()[i * dims.1 + i])
                        .collect();
                    human.push_str(&format!(
                        "diagonal: {}\n",
                        diag.iter().map(|v| sig6(*v)).collect::<Vec<_>>().join(", ")
                    ));
                    payload["diagonal"] = json!(diag);
                }
            }
            _ => unreachable!("approx estimates are vectors or matrices"),
        }
        primary = t;
    }
    payload["estimate"] = tensor_json(&primary);
    if let Some(b) = ceiling {
        human.push_str(&format!("bound ceiling: {}\n", sig6(b)));
        payload["bound"] = json!(b);
    }

    match args.format {
        Format::Table => emit(args.out.as_deref(), &human),
        Format::Json => emit(
            args.out.as_deref(),
            &format!("{}\n", serde_json::to_string_pretty(&payload)?),
        ),
        Format::Csv => emit(args.out.as_deref(), &tensor_csv(&primary)),
    }
}

fn cmd_count(args: CountArgs) -> Result<()> {
    // Counts do not depend on the step, the row index, or the direction of
    // the product vector, so fill generic values for schemes that need them.
    let mut params = scheme_params(args.n, 0.1, Some(1), &None, &args.subset)?;
    params.v = Some((0..args.n).map(|i| 1.0 / (i + 1) as f64).collect());
    let resolved = resolve(&args.scheme, &params)?;
    let (count, formula) = match resolved.spec.closed_form_count() {
        Some((c, f)) => (c, f),
        None => {
            let (s, family) = resolved.spec.directions()?;
            let x0 = vec![0.0; s.dim()];
            let plan = enumerate(&x0, &s, &family, resolved.spec.centered());
            (plan.count(), "enumerated")
        }
    };
    let note = if resolved.name == "row-gcsh" && args.n <= 3 {
        let full = args.n * args.n + args.n + 1;
        Some(format!(
            "gcsh-minimal also costs {full} at n={} and yields the full Hessian",
            args.n
        ))
    } else {
        None
    };
    match args.format {
        Format::Json => {
            let payload = json!({
                "command": "count",
                "scheme": resolved.name,
                "n": args.n,
                "count": count,
                "formula": formula,
                "note": note,
            });
            println!("{}", serde_json::to_string_pretty(&payload)?);
        }
        _ => {
            println!("count: {count}");
            println!("formula: {formula}");
            if let Some(n) = note {
                println!("note: {n}");
            }
        }
    }
    Ok(())
}

fn cmd_points(args: PointsArgs) -> Result<()> {
    let x0 = match &args.x0 {
        Some(s) => parse_floats(s)?,
        None => vec![0.0; args.n],
    };
    if x0.len() != args.n {
        bail!("x0 has {} coordinates, expected {}", x0.len(), args.n);
    }
    let h = args.h.unwrap_or_else(|| default_step(&x0));
    let params = scheme_params(args.n, h, args.row, &args.v, &args.subset)?;
    let resolved = resolve(&args.scheme, &params)?;
    let (s, family) = resolved.spec.directions()?;
    let plan = enumerate(&x0, &s, &family, resolved.spec.centered());

    match args.format {
        Format::Json => {
            let coords: Vec<&[f64]> = plan.iter().map(|p| p.coords.as_slice()).collect();
            let payload = json!({
                "command": "points",
                "scheme": resolved.name,
                "n": args.n,
                "count": plan.count(),
                "points": coords,
            });
            emit(
                args.out.as_deref(),
                &format!("{}\n", serde_json::to_string_pretty(&payload)?),
            )
        }
        _ => {
            let mut csv = (1..=args.n)
                .map(|i| format!("x{i}"))
                .collect::<Vec<_>>()
                .join(",");
            csv.push('\n');
            for p in plan.iter() {
                csv.push_str(
                    &p.coords
                        .iter()
                        .map(|x| sci17(*x))
                        .collect::<Vec<_>>()
                        .join(","),
                );
                csv.push('\n');
            }
            emit(args.out.as_deref(), &csv)
        }
    }
}

struct SweepSetup {
    f: TestFunction,
    x0: Vec<f64>,
    sweep: simderiv_core::harness::SweepScheme,
    name: String,
    steps: Vec<f64>,
}

fn sweep_setup(args: &SweepArgs, default_steps: Vec<f64>) -> Result<SweepSetup> {
    let f = lookup(&args.function)
        .with_context(|| format!("unknown registry function {}", args.function))?;
    let x0 = parse_floats(&args.x0)?;
    if x0.len() != f.dim() {
        bail!("x0 has {} coordinates but {} expects {}", x0.len(), args.function, f.dim());
    }
    let steps = match &args.radii {
        Some(s) => parse_floats(s)?,
        None => default_steps,
    };
    let params = scheme_params(x0.len(), steps[0], args.row, &args.v, &None)?;
    let resolved = resolve(&args.scheme, &params)?;
    let sweep = resolved
        .sweep
        .with_context(|| format!("{} does not support sweeps", resolved.name))?;
    Ok(SweepSetup {
        f,
        x0,
        sweep,
        name: resolved.name,
        steps,
    })
}

fn cmd_order(args: SweepArgs) -> Result<()> {
    let setup = sweep_setup(&args, default_radii())?;
    let report = convergence_order(&setup.sweep, &setup.f, &setup.x0, &setup.steps)?;

    let slope_line = match (report.exact, report.slope) {
        (true, _) => "exact (all errors at round-off level)".to_string(),
        (false, Some(s)) => format!("slope: {}", sig6(s)),
        (false, None) => "slope: undetermined".to_string(),
    };
    match args.format {
        Format::Json => {
            let payload = json!({
                "command": "order",
                "function": args.function,
                "scheme": setup.name,
                "x0": setup.x0,
                "radii": report.radii,
                "errors": report.errors,
                "bounds": report.bounds,
                "eval_counts": report.eval_counts,
                "slope": report.slope,
                "exact": report.exact,
            });
            emit(
                args.out.as_deref(),
                &format!("{}\n", serde_json::to_string_pretty(&payload)?),
            )
        }
        Format::Csv => {
            let mut csv = String::from("radius,error,bound,evals\n");
            for i in 0..report.radii.len() {
                csv.push_str(&format!(
                    "{},{},{},{}\n",
                    sci17(report.radii[i]),
                    sci17(report.errors[i]),
                    report.bounds[i].map(sci17).unwrap_or_default(),
                    report.eval_counts[i]
                ));
            }
            csv.push_str(&format!("# {slope_line}\n"));
            emit(args.out.as_deref(), &csv)
        }
        Format::Table => {
            let mut s = format!(
                "function: {}\nscheme: {}\n{:>12} {:>14} {:>14} {:>7}\n",
                args.function, setup.name, "radius", "error", "ceiling", "evals"
            );
            for i in 0..report.radii.len() {
                s.push_str(&format!(
                    "{:>12} {:>14} {:>14} {:>7}\n",
                    sig6(report.radii[i]),
                    sig6(report.errors[i]),
                    report.bounds[i].map(sig6).unwrap_or_else(|| "-".into()),
                    report.eval_counts[i]
                ));
            }
            s.push_str(&format!("{slope_line}\n"));
            emit(args.out.as_deref(), &s)
        }
    }
}

fn cmd_bounds(args: SweepArgs) -> Result<()> {
    let default_steps: Vec<f64> = (0..7).map(|k| 0.1 * 0.5f64.powi(k)).collect();
    let setup = sweep_setup(&args, default_steps)?;
    let p = setup
        .f
        .polynomial()
        .context("bounds needs a polynomial registry function (analytic Lipschitz constants)")?
        .clone();
    let table = verify_bound(&setup.sweep, &p, &setup.x0, &setup.steps)?;

    match args.format {
        Format::Json => {
            let rows: Vec<serde_json::Value> = table
                .rows
                .iter()
                .map(|r| {
                    json!({
                        "radius": r.delta_u,
                        "measured": r.measured,
                        "bound": r.bound,
                        "pass": r.pass,
                    })
                })
                .collect();
            let payload = json!({
                "command": "bounds",
                "function": args.function,
                "scheme": setup.name,
                "x0": setup.x0,
                "rows": rows,
                "all_pass": table.all_pass,
            });
            emit(
                args.out.as_deref(),
                &format!("{}\n", serde_json::to_string_pretty(&payload)?),
            )?;
        }
        Format::Csv => {
            let mut csv = String::from("radius,measured,bound,pass\n");
            for r in &table.rows {
                csv.push_str(&format!(
                    "{},{},{},{}\n",
                    sci17(r.delta_u),
                    sci17(r.measured),
                    sci17(r.bound),
                    r.pass
                ));
            }
            emit(args.out.as_deref(), &csv)?;
        }
        Format::Table => {
            let mut s = format!(
                "function: {}\nscheme: {}\n{:>12} {:>14} {:>14}  {}\n",
                args.function, setup.name, "radius", "measured", "ceiling", "check"
            );
            for r in &table.rows {
                s.push_str(&format!(
                    "{:>12} {:>14} {:>14}  {}\n",
                    sig6(r.delta_u),
                    sig6(r.measured),
                    sig6(r.bound),
                    if r.pass { "pass" } else { "FAIL" }
                ));
            }
            s.push_str(if table.all_pass {
                "all checks pass\n"
            } else {
                "BOUND VIOLATION\n"
            });
            emit(args.out.as_deref(), &s)?;
        }
    }
    if !table.all_pass {
        std::process::exit(1);
    }
    Ok(())
}
