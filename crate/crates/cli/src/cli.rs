use std::path::{Path, PathBuf};

use clap::{Args, Parser, Subcommand, ValueEnum};
use num_bigint::BigInt;
use serde::Serialize;
use serde_json::json;
use squeeze_core::folding::{compose_plan, wall_volume_closed_form};
use squeeze_core::markov::{build_triangle, enumerate_tree, find_fitting_triple, FitResult, MarkovTriple, Q};
use squeeze_core::measure::{
    cube, defect_volume, disk_neighborhood_box, lipschitz_estimate, neighborhood_curve, symplecticity_scan,
    theorem31_check, wall_volume_in_cube, JacobianMode,
};
use squeeze_core::model::{lagrangian_disk_distance, ou_check, triangle_torus_containment};

use crate::checks;
use crate::config::{config_hash, parse_alpha, RunConfig, DEFAULT_OUT_DIR, OUT_DIR_ENV};
use crate::error::CliError;
use crate::report;

const AFTER_HELP: &str = "\
Every command writes a JSON report {schema: \"v1\", kind, config_hash, seed, data, timestamp}
to the output directory and prints a one-line summary.

CSV files:
  markov_tree.csv        a,b,c                      (one Markov triple per row, sorted)
  mink_curve.csv         t,volume,std_error         (Vol(N_t) estimates, t decreasing)
  mink_check_thm31.csv   t,volume,std_error,bound,ratio
                         (bound = pi^2 (R^2 - r^2) t^2, ratio = volume / bound)

Exit codes: 0 ok, 1 usage, 2 domain error, 3 failed check (with --assert), 4 internal error.";

#[derive(Debug, Parser)]
#[command(name = "squeeze", version, about = "Markov triangles, folding embeddings and their numerical certification", after_help = AFTER_HELP)]
pub struct Cli {
    /// Seed for every Monte Carlo estimate [default: the config's, else 0].
    #[arg(long, global = true)]
    pub seed: Option<u64>,
    /// Output directory for reports.
    #[arg(long, global = true, env = OUT_DIR_ENV)]
    pub out_dir: Option<PathBuf>,
    /// JSON run configuration (used by `report all`).
    #[arg(long, global = true)]
    pub config: Option<PathBuf>,
    /// Exit with code 3 when a check fails.
    #[arg(long, global = true)]
    pub assert: bool,
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Exact Markov-triple engine.
    #[command(subcommand)]
    Markov(MarkovCmd),
    /// Folding embedding of the cube into the cylinder.
    #[command(subcommand)]
    Fold(FoldCmd),
    /// Oakley–Usher and toric model maps.
    #[command(subcommand)]
    Model(ModelCmd),
    /// Tube volumes and Minkowski fits.
    #[command(subcommand)]
    Mink(MinkCmd),
    /// Acceptance reports.
    #[command(subcommand)]
    Report(ReportCmd),
}

#[derive(Debug, Subcommand)]
pub enum MarkovCmd {
    /// All Markov triples with largest entry <= MAX.
    Tree(TreeArgs),
    /// Smallest branch triple whose triangle fits the half-strip.
    Fit(AlphaArgs),
    /// Exact data of one Markov triangle.
    Triangle(TriangleArgs),
}

#[derive(Debug, Subcommand)]
pub enum FoldCmd {
    /// Build and dump a folding plan.
    Build(PlanArgs),
    /// Scan the symplecticity residual of a plan.
    Verify(VerifyArgs),
    /// Estimate the volume defect of a plan.
    Defect(DefectArgs),
    /// Estimate the Lipschitz constant of a plan.
    Lipschitz(SampledPlanArgs),
}

#[derive(Debug, Subcommand)]
pub enum ModelCmd {
    /// Identity, Fermat, equivariance and pullback checks of the Oakley–Usher map.
    OuCheck(OuArgs),
    /// Sample the torus fibres over a fitted triangle.
    ToricContain(ToricArgs),
}

#[derive(Debug, Subcommand)]
pub enum MinkCmd {
    /// Tube-volume curve and Minkowski fit for the Lagrangian disk.
    Curve(CurveArgs),
    /// Check the tube-volume lower bound for the Lagrangian disk.
    CheckThm31(ObstructionArgs),
}

#[derive(Debug, Subcommand)]
pub enum ReportCmd {
    /// Run every acceptance criterion and write report_all.json.
    All(AllArgs),
}

#[derive(Debug, Args, Serialize)]
pub struct TreeArgs {
    /// Largest entry, as a decimal integer.
    #[arg(long, default_value = "10000")]
    pub max: String,
}

#[derive(Debug, Args, Serialize)]
pub struct AlphaArgs {
    /// Size of the triangle as an exact rational "p/q".
    #[arg(long)]
    pub alpha: String,
}

#[derive(Debug, Args, Serialize)]
pub struct TriangleArgs {
    /// Markov triple "a,b,c".
    #[arg(long)]
    pub triple: String,
    #[arg(long)]
    pub alpha: String,
}

#[derive(Debug, Args, Serialize)]
pub struct PlanArgs {
    /// Cube half-width.
    #[arg(long = "R", default_value_t = 1.0)]
    pub big_r: f64,
    /// Target Lipschitz scale.
    #[arg(long = "L", default_value_t = 8.0)]
    pub lipschitz: f64,
}

#[derive(Debug, Args, Serialize)]
pub struct SampledPlanArgs {
    #[command(flatten)]
    pub plan: PlanArgs,
    #[arg(long, default_value_t = 100_000)]
    pub samples: usize,
}

#[derive(Debug, Clone, Copy, ValueEnum, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum ModeArg {
    Analytic,
    FiniteDifference,
    Both,
}

#[derive(Debug, Args, Serialize)]
pub struct VerifyArgs {
    #[command(flatten)]
    pub plan: PlanArgs,
    #[arg(long, default_value_t = 10_000)]
    pub samples: usize,
    #[arg(long, value_enum, default_value_t = ModeArg::Both)]
    pub mode: ModeArg,
    #[arg(long, default_value_t = 1e-9)]
    pub tol_analytic: f64,
    #[arg(long, default_value_t = 1e-4)]
    pub tol_fd: f64,
}

#[derive(Debug, Args, Serialize)]
pub struct DefectArgs {
    #[command(flatten)]
    pub plan: PlanArgs,
    /// Cylinder radius.
    #[arg(long = "r", default_value_t = 1.0)]
    pub small_r: f64,
    #[arg(long, default_value_t = 1_000_000)]
    pub samples: usize,
}

#[derive(Debug, Args, Serialize)]
pub struct OuArgs {
    #[arg(long, default_value_t = 1000)]
    pub samples: usize,
    #[arg(long, default_value_t = 100)]
    pub rotations: usize,
    /// Finite-difference step of the pullback check.
    #[arg(long, default_value_t = 1e-5)]
    pub h: f64,
}

#[derive(Debug, Args, Serialize)]
pub struct ToricArgs {
    #[arg(long)]
    pub alpha: String,
    #[arg(long, default_value_t = 100_000)]
    pub samples: usize,
}

#[derive(Debug, Args, Serialize)]
pub struct CurveArgs {
    /// Disk radius.
    #[arg(long, default_value_t = std::f64::consts::SQRT_2)]
    pub radius: f64,
    /// Comma-separated t-values.
    #[arg(long, value_delimiter = ',', default_values_t = [0.1, 0.05, 0.02, 0.01])]
    pub t: Vec<f64>,
    #[arg(long, default_value_t = 1_000_000)]
    pub samples: usize,
}

#[derive(Debug, Args, Serialize)]
pub struct ObstructionArgs {
    /// Ball radius; the removed disk has the same radius.
    #[arg(long = "R", default_value_t = std::f64::consts::SQRT_2)]
    pub big_r: f64,
    /// Cylinder radius.
    #[arg(long = "r", default_value_t = 1.0)]
    pub small_r: f64,
    #[arg(long, value_delimiter = ',', default_values_t = [0.05, 0.02, 0.01])]
    pub t: Vec<f64>,
    #[arg(long, default_value_t = 1_000_000)]
    pub samples: usize,
}

#[derive(Debug, Args, Serialize)]
pub struct AllArgs {
    /// Use the full acceptance sample counts instead of the desk-scale ones.
    #[arg(long)]
    pub full: bool,
}

struct Ctx {
    seed: u64,
    out_dir: PathBuf,
    assert: bool,
}

impl Ctx {
    fn emit<A: Serialize, T: Serialize>(&self, kind: &str, args: &A, data: T) -> Result<String, CliError> {
        let hash = config_hash(&json!({ "command": kind, "args": args, "seed": self.seed }));
        let text = report::to_json(kind, &hash, Some(self.seed), data)?;
        report::write(&self.out_dir, &format!("{}.json", kind.replace([' ', '-'], "_")), &text)?;
        Ok(hash)
    }

    fn csv(&self, name: &str, text: &str) -> Result<(), CliError> {
        report::write(&self.out_dir, name, text).map(|_| ())
    }

    /// Exit code for a check outcome.
    fn verdict(&self, ok: bool, what: &str) -> Result<i32, CliError> {
        if self.assert && !ok {
            Err(CliError::AssertionFailed(format!("check failed: {what}")))
        } else {
            Ok(0)
        }
    }
}

fn out_dir(cli: &Cli, cfg: Option<&RunConfig>) -> PathBuf {
    cli.out_dir.clone().or_else(|| cfg.map(|c| c.out_dir.clone())).unwrap_or_else(|| PathBuf::from(DEFAULT_OUT_DIR))
}

/// Execute the parsed command line; returns the process exit code.
pub fn run(cli: &Cli) -> Result<i32, CliError> {
    let loaded = cli.config.as_deref().map(RunConfig::load).transpose()?;
    let ctx = Ctx {
        seed: cli.seed.or(loaded.as_ref().map(|c| c.seed)).unwrap_or(0),
        out_dir: out_dir(cli, loaded.as_ref()),
        assert: cli.assert,
    };
    match &cli.command {
        Command::Markov(cmd) => markov(&ctx, cmd),
        Command::Fold(cmd) => fold(&ctx, cmd),
        Command::Model(cmd) => model(&ctx, cmd),
        Command::Mink(cmd) => mink(&ctx, cmd),
        Command::Report(ReportCmd::All(args)) => {
            let mut cfg = match loaded {
                Some(c) => c,
                None if args.full => RunConfig::full(ctx.seed),
                None => RunConfig::desk(ctx.seed),
            };
            cfg.seed = ctx.seed;
            cfg.out_dir = ctx.out_dir.clone();
            cfg.validate()?;
            report_all(&ctx, &cfg)
        }
    }
}

fn markov(ctx: &Ctx, cmd: &MarkovCmd) -> Result<i32, CliError> {
    match cmd {
        MarkovCmd::Tree(args) => {
            let max: BigInt = args.max.trim().parse().map_err(|e| CliError::Domain(format!("bad --max {:?}: {e}", args.max)))?;
            let tree = enumerate_tree(&max)?;
            let mut csv = String::from("a,b,c\n");
            for t in &tree {
                let [a, b, c] = t.entries();
                csv.push_str(&format!("{a},{b},{c}\n"));
            }
            ctx.emit("markov tree", args, json!({ "max": args.max, "count": tree.len(), "triples": tree }))?;
            ctx.csv("markov_tree.csv", &csv)?;
            println!("markov tree: {} triples with largest entry <= {max}", tree.len());
            Ok(0)
        }
        MarkovCmd::Fit(args) => {
            let alpha = parse_alpha(&args.alpha)?;
            let result = find_fitting_triple(&alpha)?;
            ctx.emit("markov fit", args, &result)?;
            match &result {
                FitResult::Fit { triangle, fit, .. } => println!("markov fit: alpha = {alpha} fits via {} with height {}", triangle.triple, fit.height),
                FitResult::NoFit { certificate } => println!("markov fit: alpha = {alpha} has no fit (certificate valid: {})", certificate.is_valid()),
            }
            Ok(0)
        }
        MarkovCmd::Triangle(args) => {
            let alpha = parse_alpha(&args.alpha)?;
            let parts: Vec<BigInt> = args
                .triple
                .split(',')
                .map(|s| s.trim().parse::<BigInt>().map_err(|e| CliError::Domain(format!("bad --triple {:?}: {e}", args.triple))))
                .collect::<Result<_, _>>()?;
            let [a, b, c]: [BigInt; 3] = parts.try_into().map_err(|_| CliError::Domain("--triple needs three entries".into()))?;
            let triple = MarkovTriple::new(a, b, c)?;
            let tri = build_triangle(&triple, &alpha)?;
            let r = &tri.realization;
            let lengths: Vec<String> = r.edge_affine_lengths().iter().map(Q::to_string).collect();
            let data = json!({
                "triangle": tri,
                "area": r.area().to_string(),
                "affine_perimeter": r.affine_perimeter().to_string(),
                "edge_affine_lengths": lengths,
                "lambda": tri.lambda().to_string(),
            });
            ctx.emit("markov triangle", args, data)?;
            println!("markov triangle: {triple} at alpha = {alpha}: area {}, affine perimeter {}", r.area(), r.affine_perimeter());
            Ok(0)
        }
    }
}

fn fold(ctx: &Ctx, cmd: &FoldCmd) -> Result<i32, CliError> {
    match cmd {
        FoldCmd::Build(args) => {
            let plan = compose_plan(args.big_r, args.lipschitz)?;
            let data = json!({
                "plan": plan,
                "stretch_constant": plan.stretch.c,
                "sup_f_prime": plan.stretch.sup_f_prime(),
                "wall_volume": wall_volume_closed_form(args.big_r, args.lipschitz)?,
            });
            ctx.emit("fold build", args, data)?;
            let names: Vec<&str> = plan.stack.iter().map(|m| m.name()).collect();
            println!("fold build: R = {}, L = {}, {} cells per factor, stack [{}]", args.big_r, args.lipschitz, plan.cells, names.join(", "));
            Ok(0)
        }
        FoldCmd::Verify(args) => {
            let plan = compose_plan(args.plan.big_r, args.plan.lipschitz)?;
            let region = cube(args.plan.big_r);
            let modes: &[(JacobianMode, f64)] = match args.mode {
                ModeArg::Analytic => &[(JacobianMode::Analytic, args.tol_analytic)],
                ModeArg::FiniteDifference => &[(JacobianMode::FiniteDifference, args.tol_fd)],
                ModeArg::Both => &[(JacobianMode::Analytic, args.tol_analytic), (JacobianMode::FiniteDifference, args.tol_fd)],
            };
            let mut reports = Vec::new();
            let mut ok = true;
            let mut line = Vec::new();
            for &(mode, tol) in modes {
                let rep = symplecticity_scan(&plan, &region, args.samples, ctx.seed, mode)?;
                ok &= rep.max <= tol;
                line.push(format!("{:?} max {:.3e} (tol {tol:.0e})", mode, rep.max));
                reports.push(json!({ "report": rep, "tolerance": tol, "passes": rep.max <= tol }));
            }
            ctx.emit("fold verify", args, json!({ "scans": reports }))?;
            println!("fold verify: R = {}, L = {}: {}", args.plan.big_r, args.plan.lipschitz, line.join(", "));
            ctx.verdict(ok, "symplecticity residual above tolerance")
        }
        FoldCmd::Defect(args) => {
            let plan = compose_plan(args.plan.big_r, args.plan.lipschitz)?;
            let est = defect_volume(&plan, args.small_r, args.samples, ctx.seed)?;
            let wall = wall_volume_in_cube(args.plan.big_r, args.plan.lipschitz)?;
            let ok = est.value <= wall + 3.0 * est.std_error;
            ctx.emit("fold defect", args, json!({ "estimate": est, "wall_bound": wall, "below_wall_bound": ok }))?;
            println!("fold defect: R = {}, L = {}, r = {}: {:.6} ± {:.6} (wall bound {wall:.6})", args.plan.big_r, args.plan.lipschitz, args.small_r, est.value, est.std_error);
            ctx.verdict(ok, "defect above the wall-volume bound")
        }
        FoldCmd::Lipschitz(args) => {
            let plan = compose_plan(args.plan.big_r, args.plan.lipschitz)?;
            let rep = lipschitz_estimate(&plan, &cube(args.plan.big_r), args.samples, ctx.seed)?;
            let ratio = rep.max / args.plan.lipschitz;
            println!("fold lipschitz: R = {}, L = {}: max spectral norm {:.4}, Lip/L {ratio:.4}, max secant {:.4}", args.plan.big_r, args.plan.lipschitz, rep.max, rep.max_secant);
            ctx.emit("fold lipschitz", args, json!({ "report": rep, "lip_over_L": ratio }))?;
            Ok(0)
        }
    }
}

fn model(ctx: &Ctx, cmd: &ModelCmd) -> Result<i32, CliError> {
    match cmd {
        ModelCmd::OuCheck(args) => {
            let rep = ou_check(args.samples, args.rotations, args.h, ctx.seed)?;
            ctx.emit("model ou-check", args, &rep)?;
            println!(
                "model ou-check: identity {:.1e}, Fermat {:.1e}, equivariance {:.1e}, pullback {:.1e}",
                rep.identity_error, rep.fermat_residual, rep.equivariance_error, rep.pullback_residual
            );
            ctx.verdict(rep.passes(), "Oakley-Usher check above tolerance")
        }
        ModelCmd::ToricContain(args) => {
            let alpha = parse_alpha(&args.alpha)?;
            let FitResult::Fit { fit, .. } = find_fitting_triple(&alpha)? else {
                return Err(CliError::Domain(format!("alpha = {alpha} has no half-strip fit")));
            };
            let rep = triangle_torus_containment(&fit, args.samples, ctx.seed)?;
            let ok = rep.matches_height();
            ctx.emit("model toric-contain", args, json!({ "report": rep, "sampling_slack": rep.sampling_slack(), "matches_height": ok }))?;
            println!(
                "model toric-contain: alpha = {alpha}: max pi|z2|^2 = {:.6}, height {} (all inside: {})",
                rep.max_second_action.unwrap_or(f64::NAN),
                rep.height,
                rep.all_inside
            );
            ctx.verdict(ok, "torus fibres do not match the triangle height")
        }
    }
}

fn mink(ctx: &Ctx, cmd: &MinkCmd) -> Result<i32, CliError> {
    match cmd {
        MinkCmd::Curve(args) => {
            let r = args.radius;
            let (est, curve) = neighborhood_curve(|p| lagrangian_disk_distance(*p, r), |t| disk_neighborhood_box(r, t), &args.t, args.samples, ctx.seed)?;
            ctx.emit("mink curve", args, json!({ "estimates": est, "curve": curve }))?;
            ctx.csv("mink_curve.csv", &curve.to_csv())?;
            println!(
                "mink curve: dimension {:.4}, content {} at t = {}{}",
                curve.fitted_dimension,
                curve.content_at_2.map_or("n/a".into(), |c| format!("{c:.5}")),
                curve.content_t.map_or("n/a".into(), |t| t.to_string()),
                if curve.flags.is_empty() { String::new() } else { format!(" [{}]", curve.flags.join("; ")) }
            );
            Ok(0)
        }
        MinkCmd::CheckThm31(args) => {
            let r = args.big_r;
            let rep = theorem31_check(|p| lagrangian_disk_distance(*p, r), |t| disk_neighborhood_box(r, t), r, args.small_r, &args.t, args.samples, ctx.seed)?;
            let mut csv = String::from("t,volume,std_error,bound,ratio\n");
            for row in &rep.rows {
                csv.push_str(&format!("{},{},{},{},{}\n", row.t, row.volume, row.std_error, row.bound, row.ratio));
            }
            ctx.emit("mink check-thm31", args, &rep)?;
            ctx.csv("mink_check_thm31.csv", &csv)?;
            let ratios: Vec<String> = rep.rows.iter().map(|row| format!("{:.3}", row.ratio)).collect();
            println!("mink check-thm31: ratios [{}] (need >= {}), all pass: {}", ratios.join(", "), 1.0 - rep.slack, rep.all_pass);
            ctx.verdict(rep.all_pass, "tube volume below the obstruction bound")
        }
    }
}

fn report_all(ctx: &Ctx, cfg: &RunConfig) -> Result<i32, CliError> {
    let mut results = Vec::new();
    for (id, _) in checks::ALL {
        let c = checks::run(id, cfg)?;
        println!("{}", c.line());
        results.push(c);
    }
    let passed = results.iter().filter(|c| c.passed).count();
    let mut shown = cfg.clone();
    shown.out_dir = PathBuf::new();
    let data = json!({ "config": shown, "passed": passed, "total": results.len(), "criteria": results });
    let text = report::to_json("report all", &cfg.hash(), Some(cfg.seed), data)?;
    report::write(&ctx.out_dir, "report_all.json", &text)?;
    println!("report all: {passed}/{} criteria pass; written to {}", results.len(), Path::new(&ctx.out_dir).join("report_all.json").display());
    ctx.verdict(passed == results.len(), "not every criterion passes")
}
