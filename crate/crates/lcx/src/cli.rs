use std::ffi::OsString;
use std::path::{Path, PathBuf};

use clap::{Args, Parser, Subcommand};
use serde_json::{json, Value};

use crate::conjugate::{affine_maximal_minorant, legendre_fenchel};
use crate::ekeland::{density_scan, ekeland_refine, MinorantInput};
use crate::envelope::{lc_convexity_test, lipschitz_lower_envelope, lipschitz_modulus,
    lipschitz_upper_envelope};
use crate::error::{Error, Result};
use crate::extremum::{calculus_domination_check, calculus_scaling_check, calculus_sum_check,
    global_max_certificate, global_min_certificate};
use crate::gallery::{GalleryFunction, PointFunction};
use crate::grid::{Grid, NodeIndex, Norm, Point};
use crate::jsonio::{function_spec_to_json, grid_from_json, grid_to_json, parse_function_arg,
    parse_grid_shorthand, sampled_from_json, sampled_to_json, write_csv, FunctionSpec};
use crate::maximal::{default_lipschitz_budget, default_tol_feas, maximal_minorant, MaximalOptions};
use crate::minorant::{ConeFunction, GridMinorant};
use crate::randfn::{random_piecewise_linear, rng_for};
use crate::sampled::SampledFunction;
use crate::subdiff::{check_subgradient, check_supergradient, cone_subgradient,
    cone_supergradient, subdifferentiability_oracle, superdifferentiability_oracle,
    EitherCandidate, SubgradientCandidate};

#[derive(Parser)]
#[command(name = "lcx", version, about = "Lipschitz-concave support calculus on grids")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Args, Clone, Default)]
struct CommonArgs {
    /// Function: gallery:<id>[:params], a JSON file path, or inline JSON.
    #[arg(long = "fn")]
    function: Option<String>,
    /// Grid shorthand lo:hi:n (2-D: lo1:hi1:n1,lo2:hi2:n2) or a JSON file.
    #[arg(long, allow_hyphen_values = true)]
    grid: Option<String>,
    /// Norm: 1, 2 or inf.
    #[arg(long, default_value = "2")]
    norm: String,
    /// Feasibility tolerance (default 1e-9*(1+sup|f|); env LCX_TOL_FEAS overrides).
    #[arg(long = "tol-feas")]
    tol_feas: Option<f64>,
    /// Relative LP optimality tolerance (default 1e-7).
    #[arg(long = "tol-lp")]
    tol_lp: Option<f64>,
    /// JSON output path (stdout when omitted).
    #[arg(long)]
    out: Option<PathBuf>,
    /// CSV output path for plot-ready columns.
    #[arg(long)]
    csv: Option<PathBuf>,
    /// Line-delimited JSON output for batch runs (one object per item).
    #[arg(long)]
    ndjson: Option<PathBuf>,
    /// Root seed for randomized subcommands.
    #[arg(long, default_value_t = 0)]
    seed: u64,
    /// Re-validate a previously emitted JSON certificate instead of producing.
    #[arg(long)]
    verify: Option<PathBuf>,
}

#[derive(Subcommand)]
enum Command {
    /// Lipschitz lower/upper envelopes of f for a slope bound k.
    Envelope {
        #[command(flatten)]
        common: CommonArgs,
        #[arg(long)]
        k: Option<f64>,
    },
    /// Grid Lipschitz modulus of f.
    Modulus {
        #[command(flatten)]
        common: CommonArgs,
    },
    /// Convexity evidence: Lipschitz lower-bound witness + semicontinuity probes.
    Lctest {
        #[command(flatten)]
        common: CommonArgs,
        /// Comma-separated increasing slope schedule.
        #[arg(long, default_value = "1,2,4,8")]
        k: String,
        /// Probe points, ';'-separated (2-D coordinates ','-separated).
        #[arg(long, allow_hyphen_values = true)]
        at: Option<String>,
        /// Probe refinement levels.
        #[arg(long, default_value_t = 4)]
        levels: usize,
    },
    /// Maximal-lifting LP from a seed minorant.
    Maximal {
        #[command(flatten)]
        common: CommonArgs,
        /// Lipschitz class budget K (default 2 * modulus for finite f).
        #[arg(long = "K")]
        cap_k: Option<f64>,
        /// Seed minorant function spec (default: the constant min of f).
        #[arg(long = "seed-fn", allow_hyphen_values = true)]
        seed_fn: Option<String>,
        /// Pin the output to touch f at this point.
        #[arg(long, allow_hyphen_values = true)]
        pin: Option<String>,
    },
    /// Discrete Legendre-Fenchel transform onto a slope grid.
    Lft {
        #[command(flatten)]
        common: CommonArgs,
        /// Slope grid shorthand lo:hi:n.
        #[arg(long, allow_hyphen_values = true)]
        slopes: Option<String>,
        /// Also emit the affine maximal minorant for this slope.
        #[arg(long, allow_negative_numbers = true)]
        s: Option<f64>,
    },
    /// Calmness-based subdifferentiability oracle under grid refinement.
    Calm {
        #[command(flatten)]
        common: CommonArgs,
        #[arg(long, allow_hyphen_values = true)]
        at: Option<String>,
        #[arg(long, default_value_t = 5)]
        levels: usize,
        /// Modulus cap for the verdict.
        #[arg(long = "K", default_value_t = 100.0)]
        k_cap: f64,
        /// sub (default) or super.
        #[arg(long, default_value = "sub")]
        side: String,
    },
    /// Cone subgradient (or supergradient) from the calmness modulus.
    Subgrad {
        #[command(flatten)]
        common: CommonArgs,
        #[arg(long, allow_hyphen_values = true)]
        at: Option<String>,
        #[arg(long, default_value = "sub")]
        side: String,
    },
    /// Subgradient membership + LP maximality certificate for a candidate.
    Maxcheck {
        #[command(flatten)]
        common: CommonArgs,
        #[arg(long, allow_hyphen_values = true)]
        at: Option<String>,
        /// Candidate: cone:<slope> or affine:<s> (1-D).
        #[arg(long, allow_hyphen_values = true)]
        cand: Option<String>,
        #[arg(long = "K")]
        cap_k: Option<f64>,
    },
    /// Constructive support-point refinement from an eps-approximate minorant.
    Ekeland {
        #[command(flatten)]
        common: CommonArgs,
        #[arg(long, allow_hyphen_values = true)]
        at: Option<String>,
        #[arg(long)]
        eps: Option<f64>,
        #[arg(long)]
        delta: Option<f64>,
        /// Explicit cone minorant apex:slope:level (2-D apex: x,y:slope:level).
        #[arg(long, allow_hyphen_values = true)]
        cone: Option<String>,
        /// Or: use the k-Lipschitz lower envelope as the minorant.
        #[arg(long)]
        k: Option<f64>,
    },
    /// Sweep the effective domain with the refinement; report covering radius.
    Density {
        #[command(flatten)]
        common: CommonArgs,
        #[arg(long)]
        eps: Option<f64>,
        #[arg(long)]
        delta: Option<f64>,
        #[arg(long)]
        k: Option<f64>,
        #[arg(long, default_value_t = 10)]
        stride: usize,
    },
    /// Global extremum certificate at a node.
    Extremum {
        #[command(flatten)]
        common: CommonArgs,
        #[arg(long, allow_hyphen_values = true)]
        at: Option<String>,
        /// min (default) or max.
        #[arg(long, default_value = "min")]
        kind: String,
    },
    /// Randomized calculus-rule trials (sum, scaling, domination).
    Calculus {
        #[command(flatten)]
        common: CommonArgs,
        /// sum, scaling or domination.
        #[arg(long)]
        rule: Option<String>,
        #[arg(long, default_value_t = 200)]
        trials: usize,
    },
    /// Gallery access: list ids or sample one onto a grid.
    Gallery {
        #[command(flatten)]
        common: CommonArgs,
        #[arg(long)]
        list: bool,
        #[arg(long)]
        id: Option<String>,
    },
}

/// Entry point: parses argv, runs, maps errors to exit codes
/// (0 ok, 2 usage/domain/precondition, 1 internal).
pub fn run<I, T>(argv: I) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(argv) {
        Ok(c) => c,
        Err(e) => {
            let _ = e.print();
            return if e.use_stderr() { 2 } else { 0 };
        }
    };
    match dispatch(cli) {
        Ok(()) => 0,
        Err(e) => {
            eprintln!("error: {e}");
            if e.is_rejection() {
                2
            } else {
                1
            }
        }
    }
}

fn dispatch(cli: Cli) -> Result<()> {
    match cli.command {
        Command::Envelope { common, k } => cmd_envelope(&common, k),
        Command::Modulus { common } => cmd_modulus(&common),
        Command::Lctest { common, k, at, levels } => cmd_lctest(&common, &k, at.as_deref(), levels),
        Command::Maximal { common, cap_k, seed_fn, pin } => {
            cmd_maximal(&common, cap_k, seed_fn.as_deref(), pin.as_deref())
        }
        Command::Lft { common, slopes, s } => cmd_lft(&common, slopes.as_deref(), s),
        Command::Calm { common, at, levels, k_cap, side } => {
            cmd_calm(&common, at.as_deref(), levels, k_cap, &side)
        }
        Command::Subgrad { common, at, side } => cmd_subgrad(&common, at.as_deref(), &side),
        Command::Maxcheck { common, at, cand, cap_k } => {
            cmd_maxcheck(&common, at.as_deref(), cand.as_deref(), cap_k)
        }
        Command::Ekeland { common, at, eps, delta, cone, k } => {
            cmd_ekeland(&common, at.as_deref(), eps, delta, cone.as_deref(), k)
        }
        Command::Density { common, eps, delta, k, stride } => {
            cmd_density(&common, eps, delta, k, stride)
        }
        Command::Extremum { common, at, kind } => cmd_extremum(&common, at.as_deref(), &kind),
        Command::Calculus { common, rule, trials } => {
            cmd_calculus(&common, rule.as_deref(), trials)
        }
        Command::Gallery { common, list, id } => cmd_gallery(&common, list, id.as_deref()),
    }
}

// ---------------------------------------------------------------------------
// argument helpers

impl CommonArgs {
    fn norm(&self) -> Result<Norm> {
        Norm::parse(&self.norm)
    }

    fn grid(&self) -> Result<Option<Grid>> {
        let Some(s) = &self.grid else { return Ok(None) };
        if s.trim_start().starts_with('{') {
            let v: Value = serde_json::from_str(s)?;
            return Ok(Some(grid_from_json(&v)?));
        }
        if Path::new(s).extension().map(|e| e == "json").unwrap_or(false) {
            let text = std::fs::read_to_string(s)?;
            let v: Value = serde_json::from_str(&text)?;
            return Ok(Some(grid_from_json(&v)?));
        }
        Ok(Some(parse_grid_shorthand(s, self.norm()?)?))
    }

    fn function_spec(&self) -> Result<FunctionSpec> {
        let s = self
            .function
            .as_deref()
            .ok_or_else(|| Error::usage("--fn is required for this subcommand"))?;
        parse_function_arg(s)
    }

    /// Materialized samples: gallery functions need --grid, sample inputs
    /// carry their own.
    fn sampled(&self) -> Result<(FunctionSpec, SampledFunction)> {
        let spec = self.function_spec()?;
        let grid = self.grid()?;
        let f = spec.to_sampled(grid.as_ref())?;
        Ok((spec, f))
    }

    fn tol_feas_for(&self, f: &SampledFunction) -> f64 {
        if let Some(t) = self.tol_feas {
            return t;
        }
        if let Ok(s) = std::env::var("LCX_TOL_FEAS") {
            if let Ok(t) = s.parse::<f64>() {
                if t > 0.0 {
                    return t;
                }
            }
        }
        default_tol_feas(f)
    }
}


fn required<'a, T>(v: Option<&'a T>, flag: &str) -> Result<&'a T>
where
    T: ?Sized,
{
    v.ok_or_else(|| Error::usage(format!("--{flag} is required")))
}

fn parse_point(s: &str) -> Result<Point> {
    let coords: Vec<f64> = s
        .split(',')
        .map(|p| p.trim().parse::<f64>().map_err(|_| Error::usage(format!("bad point {s:?}"))))
        .collect::<Result<_>>()?;
    Point::from_slice(&coords)
}

fn parse_points(s: &str) -> Result<Vec<Point>> {
    s.split(';').map(parse_point).collect()
}

fn node_of(grid: &Grid, p: &Point) -> Result<NodeIndex> {
    grid.node_at(p)
        .ok_or_else(|| Error::usage(format!("point {p} is not a node of the grid")))
}

fn emit(doc: &Value, out: Option<&PathBuf>) -> Result<()> {
    let text = serde_json::to_string_pretty(doc)?;
    match out {
        Some(path) => std::fs::write(path, text + "\n")?,
        None => println!("{text}"),
    }
    Ok(())
}

fn to_value<T: serde::Serialize>(v: &T) -> Result<Value> {
    Ok(serde_json::to_value(v)?)
}

fn context(spec: &FunctionSpec, grid: Option<&Grid>, params: Value) -> Value {
    let mut ctx = json!({ "function": function_spec_to_json(spec) });
    if let Some(g) = grid {
        ctx["grid"] = grid_to_json(g);
    }
    ctx["params"] = params;
    ctx
}

fn load_cert(path: &Path, expect_kind: &str) -> Result<Value> {
    let text = std::fs::read_to_string(path)?;
    let v: Value = serde_json::from_str(&text)?;
    let kind = v["kind"].as_str().unwrap_or("");
    if kind != expect_kind {
        return Err(Error::usage(format!(
            "certificate kind {kind:?} does not match this subcommand ({expect_kind})"
        )));
    }
    Ok(v)
}

fn verify_ok(kind: &str, detail: Value) -> Result<()> {
    emit(&json!({"verify": "ok", "kind": kind, "detail": detail}), None)
}

fn verify_fail(msg: impl Into<String>) -> Error {
    Error::precondition(format!("verification failed: {}", msg.into()))
}

fn cert_function(v: &Value) -> Result<SampledFunction> {
    let spec = crate::jsonio::function_spec_from_json(&v["context"]["function"])?;
    let grid = if v["context"]["grid"].is_object() {
        Some(grid_from_json(&v["context"]["grid"])?)
    } else {
        None
    };
    spec.to_sampled(grid.as_ref())
}

// ---------------------------------------------------------------------------
// subcommands

fn cmd_envelope(common: &CommonArgs, k: Option<f64>) -> Result<()> {
    if let Some(path) = &common.verify {
        return verify_envelope(path);
    }
    let (spec, f) = common.sampled()?;
    let k = k.ok_or_else(|| Error::usage("envelope: --k is required"))?;
    let lower = lipschitz_lower_envelope(&f, k)?;
    let upper = lipschitz_upper_envelope(&f, k)?;
    if let Some(csv) = &common.csv {
        write_csv(
            csv,
            f.grid(),
            &[
                ("f", f.values_f64()),
                ("E_minus", lower.values_f64()),
                ("E_plus", upper.values_f64()),
            ],
        )?;
    }
    let doc = json!({
        "kind": "envelope",
        "context": context(&spec, Some(f.grid()), json!({"k": k})),
        "lower": sampled_to_json(&lower),
        "upper": sampled_to_json(&upper),
    });
    emit(&doc, common.out.as_ref())
}

fn verify_envelope(path: &Path) -> Result<()> {
    let v = load_cert(path, "envelope")?;
    let f = cert_function(&v)?;
    let k = v["context"]["params"]["k"].as_f64().ok_or_else(|| verify_fail("missing k"))?;
    let lower = sampled_from_json(&v["lower"])?;
    let upper = sampled_from_json(&v["upper"])?;
    let tol = default_tol_feas(&f);
    let g = f.grid();
    let fv = f.values_f64();
    // sandwich on the effective domain; at +inf nodes both envelopes are
    // legitimately finite
    for i in 0..g.node_count() {
        if !fv[i].is_finite() {
            continue;
        }
        let (lo, up) = (lower.value(i).to_f64(), upper.value(i).to_f64());
        if lo > fv[i] + tol || up < fv[i] - tol {
            return Err(verify_fail(format!("sandwich violated at node {i}")));
        }
    }
    // k-Lipschitz of both envelopes, pairwise
    for env in [&lower, &upper] {
        let ev = env.values_f64();
        for i in 0..g.node_count() {
            for j in (i + 1)..g.node_count() {
                let d = g.node_dist(i, j);
                if (ev[i] - ev[j]).abs() > k * d + tol {
                    return Err(verify_fail(format!("envelope not {k}-Lipschitz at ({i},{j})")));
                }
            }
        }
    }
    verify_ok("envelope", json!({"nodes": g.node_count(), "k": k}))
}

fn cmd_modulus(common: &CommonArgs) -> Result<()> {
    let (spec, f) = common.sampled()?;
    let m = lipschitz_modulus(&f);
    let doc = json!({
        "kind": "modulus",
        "context": context(&spec, Some(f.grid()), json!({})),
        "modulus": m,
    });
    emit(&doc, common.out.as_ref())
}

fn cmd_lctest(common: &CommonArgs, k_arg: &str, at: Option<&str>, levels: usize) -> Result<()> {
    if let Some(path) = &common.verify {
        return verify_lctest(path);
    }
    let spec = common.function_spec()?;
    let gallery = spec
        .as_gallery()
        .ok_or_else(|| Error::usage("lctest probes off-grid points and needs a gallery function"))?;
    let grid = common
        .grid()?
        .ok_or_else(|| Error::usage("lctest: --grid is required"))?;
    let schedule: Vec<f64> = k_arg
        .split(',')
        .map(|s| s.trim().parse::<f64>().map_err(|_| Error::usage("bad --k schedule")))
        .collect::<Result<_>>()?;
    let probe_points = match at {
        Some(s) => parse_points(s)?,
        None => {
            // default probe: the box center
            let c: Vec<f64> = (0..grid.dim())
                .map(|a| 0.5 * (grid.lower()[a] + grid.upper()[a]))
                .collect();
            vec![Point::from_slice(&c)?]
        }
    };
    let f_sampled = spec.to_sampled(Some(&grid))?;
    let tol = common.tol_feas_for(&f_sampled);
    let report = lc_convexity_test(gallery, &grid, &schedule, &probe_points, levels, tol)?;
    let doc = json!({
        "kind": "lctest",
        "context": context(&spec, Some(&grid), json!({
            "k_schedule": schedule,
            "levels": levels,
            "probe_points": probe_points.iter().map(|p| p.coords().to_vec()).collect::<Vec<_>>(),
            "tol": tol,
        })),
        "report": to_value(&report)?,
        "witness": report.witness.as_ref().map(sampled_to_json),
    });
    emit(&doc, common.out.as_ref())
}

fn verify_lctest(path: &Path) -> Result<()> {
    let v = load_cert(path, "lctest")?;
    let f = cert_function(&v)?;
    let tol = v["context"]["params"]["tol"].as_f64().unwrap_or_else(|| default_tol_feas(&f));
    let report = &v["report"];
    let Some(k) = report["witness_k"].as_f64() else {
        return verify_ok("lctest", json!({"note": "no witness claimed"}));
    };
    let witness = sampled_from_json(&v["witness"])?;
    let g = f.grid();
    let wv = witness.values_f64();
    let fv = f.values_f64();
    for i in 0..g.node_count() {
        if !wv[i].is_finite() {
            return Err(verify_fail(format!("witness not finite at node {i}")));
        }
        if wv[i] > fv[i] + tol {
            return Err(verify_fail(format!("witness exceeds f at node {i}")));
        }
    }
    for i in 0..g.node_count() {
        for j in (i + 1)..g.node_count() {
            if (wv[i] - wv[j]).abs() > k * g.node_dist(i, j) + tol {
                return Err(verify_fail(format!("witness not {k}-Lipschitz at ({i},{j})")));
            }
        }
    }
    verify_ok("lctest", json!({"witness_k": k}))
}

fn parse_seed_minorant(spec: &str, f: &SampledFunction, k: f64) -> Result<GridMinorant> {
    let seed_spec = parse_function_arg(spec)?;
    let seed_f = seed_spec.to_sampled(Some(f.grid()))?;
    let values: Vec<f64> = seed_f
        .values()
        .iter()
        .map(|v| v.as_finite().ok_or_else(|| Error::precondition("seed minorant must be finite")))
        .collect::<Result<_>>()?;
    GridMinorant::new(f.grid().clone(), values, k)
}

fn cmd_maximal(
    common: &CommonArgs,
    cap_k: Option<f64>,
    seed_fn: Option<&str>,
    pin: Option<&str>,
) -> Result<()> {
    if let Some(path) = &common.verify {
        return verify_maximality(path, "maximality");
    }
    let (spec, f) = common.sampled()?;
    let k = match cap_k {
        Some(k) => k,
        None => {
            if f.values().iter().any(|v| !v.is_finite()) {
                return Err(Error::usage(
                    "maximal: --K is required when f takes infinite values",
                ));
            }
            default_lipschitz_budget(&f)
        }
    };
    let seed = match seed_fn {
        Some(s) => parse_seed_minorant(s, &f, k)?,
        None => {
            let m = f
                .values()
                .iter()
                .filter_map(|v| v.as_finite())
                .fold(f64::INFINITY, f64::min);
            GridMinorant::constant(f.grid().clone(), m, k)?
        }
    };
    let pin_node = match pin {
        Some(p) => Some(node_of(f.grid(), &parse_point(p)?)?),
        None => None,
    };
    let opts = MaximalOptions {
        pin: pin_node,
        weights: None,
        tol_feas: Some(common.tol_feas_for(&f)),
        tol_lp: common.tol_lp,
    };
    let (out, cert) = maximal_minorant(&f, &seed, k, &opts)?;
    if let Some(csv) = &common.csv {
        write_csv(
            csv,
            f.grid(),
            &[
                ("f", f.values_f64()),
                ("seed", seed.values().to_vec()),
                ("optimizer", out.values().to_vec()),
            ],
        )?;
    }
    let doc = json!({
        "kind": "maximality",
        "context": context(&spec, Some(f.grid()), json!({
            "K": k,
            "pin": pin_node,
        })),
        "certificate": to_value(&cert)?,
        "seed": seed.values(),
        "optimizer": out.values(),
    });
    emit(&doc, common.out.as_ref())
}

/// Independent re-validation of a maximality document: feasibility of the
/// optimizer, domination over the seed, gap recomputation and status
/// consistency. Never re-runs the LP.
fn verify_maximality(path: &Path, kind: &str) -> Result<()> {
    let v = load_cert(path, kind)?;
    let f = cert_function(&v)?;
    let cert = &v["certificate"];
    let k = cert["lipschitz_budget"].as_f64().ok_or_else(|| verify_fail("missing budget"))?;
    let tol_feas = cert["tol_feas"].as_f64().ok_or_else(|| verify_fail("missing tol_feas"))?;
    let tol_lp = cert["tol_lp"].as_f64().ok_or_else(|| verify_fail("missing tol_lp"))?;
    let seed: Vec<f64> = serde_json::from_value(v["seed"].clone())?;
    let optimizer: Vec<f64> = serde_json::from_value(v["optimizer"].clone())?;
    let opt = GridMinorant::new(f.grid().clone(), optimizer.clone(), k)?;
    let check = opt.check_against(&f, tol_feas);
    if !check.ok() {
        return Err(verify_fail(format!("optimizer infeasible: {}", check.describe())));
    }
    let mut gap = 0.0;
    let mut max_impr = f64::NEG_INFINITY;
    for (o, s) in optimizer.iter().zip(&seed) {
        if o < &(s - tol_feas) {
            return Err(verify_fail("optimizer does not dominate the seed"));
        }
        gap += o - s;
        max_impr = max_impr.max(o - s);
    }
    let claimed_gap = cert["lp_objective_gap"].as_f64().unwrap_or(f64::NAN);
    if (gap.max(0.0) - claimed_gap).abs() > 1e-6 * (1.0 + claimed_gap.abs()) {
        return Err(verify_fail(format!(
            "recomputed gap {gap} does not match claimed {claimed_gap}"
        )));
    }
    let status = cert["status"].as_str().unwrap_or("");
    let expect = if claimed_gap <= tol_lp { "Maximal" } else { "Improvable" };
    if status != expect {
        return Err(verify_fail(format!("status {status} inconsistent with gap {claimed_gap}")));
    }
    if status == "Improvable" && max_impr <= 0.0 {
        return Err(verify_fail("improvable status without a strict improvement"));
    }
    if let Some(pin) = cert["pinned_node"].as_u64() {
        let i = pin as usize;
        let fv = f.value(i).to_f64();
        if (optimizer[i] - fv).abs() > tol_feas {
            return Err(verify_fail("pinned node does not touch f"));
        }
    }
    verify_ok(kind, json!({"status": status, "gap": claimed_gap}))
}

fn cmd_lft(common: &CommonArgs, slopes: Option<&str>, s: Option<f64>) -> Result<()> {
    if let Some(path) = &common.verify {
        return verify_lft(path);
    }
    let (spec, f) = common.sampled()?;
    let slopes = slopes.ok_or_else(|| Error::usage("lft: --slopes lo:hi:n is required"))?;
    let slope_grid = parse_grid_shorthand(slopes, Norm::L2)?;
    let conj = legendre_fenchel(&f, &slope_grid)?;
    if let Some(csv) = &common.csv {
        write_csv(csv, &slope_grid, &[("f_star", conj.values.values_f64())])?;
    }
    let tol = common.tol_feas_for(&f);
    let minorant = match s {
        Some(s) => {
            let m = affine_maximal_minorant(&f, s, tol)?;
            Some(json!({"slope": s, "values": m.values()}))
        }
        None => None,
    };
    let doc = json!({
        "kind": "lft",
        "context": context(&spec, Some(f.grid()), json!({
            "slopes": grid_to_json(&slope_grid),
            "tol": tol,
        })),
        "conjugate": sampled_to_json(&conj.values),
        "boundary_attained": conj.boundary_attained,
        "affine_minorant": minorant,
    });
    emit(&doc, common.out.as_ref())
}

fn verify_lft(path: &Path) -> Result<()> {
    let v = load_cert(path, "lft")?;
    let f = cert_function(&v)?;
    let conj = sampled_from_json(&v["conjugate"])?;
    let tol = v["context"]["params"]["tol"].as_f64().unwrap_or(1e-9);
    // conjugates are convex: discrete second differences >= -tol
    let cv = conj.values_f64();
    for j in 1..cv.len() - 1 {
        if cv[j - 1] - 2.0 * cv[j] + cv[j + 1] < -tol {
            return Err(verify_fail(format!("conjugate not convex at slope node {j}")));
        }
    }
    // Fenchel-Young: f*(s) >= s*x - f(x) for every pair
    let g = f.grid();
    let fv = f.values_f64();
    for (j, s) in (0..cv.len()).map(|j| (j, conj.grid().node_coord(j).x())) {
        for i in 0..g.node_count() {
            if fv[i].is_finite() && cv[j] < s * g.node_coord(i).x() - fv[i] - tol {
                return Err(verify_fail(format!(
                    "Fenchel-Young violated at slope {j}, node {i}"
                )));
            }
        }
    }
    verify_ok("lft", json!({"slopes": cv.len()}))
}

fn default_oracle_grid(dim: usize, norm: Norm) -> Result<Grid> {
    match dim {
        1 => Grid::new_1d(-1.0, 1.0, 201, norm),
        _ => Grid::new_2d([-1.0, -1.0], [1.0, 1.0], [41, 41], norm),
    }
}

fn cmd_calm(
    common: &CommonArgs,
    at: Option<&str>,
    levels: usize,
    k_cap: f64,
    side: &str,
) -> Result<()> {
    if let Some(path) = &common.verify {
        return verify_calm(path);
    }
    let at = required(at, "at")?;
    let spec = common.function_spec()?;
    let gallery = spec
        .as_gallery()
        .ok_or_else(|| Error::usage("calm refines grids and needs a gallery function"))?;
    let grid = match common.grid()? {
        Some(g) => g,
        None => default_oracle_grid(gallery.dim(), common.norm()?)?,
    };
    let x_bar = parse_point(at)?;
    let cert = match side {
        "sub" => subdifferentiability_oracle(gallery, &grid, &x_bar, levels, k_cap)?,
        "super" => superdifferentiability_oracle(gallery, &grid, &x_bar, levels, k_cap)?,
        _ => return Err(Error::usage("--side must be sub or super")),
    };
    let doc = json!({
        "kind": "calmness",
        "context": context(&spec, Some(&grid), json!({
            "at": x_bar.coords().to_vec(),
            "levels": levels,
            "k_cap": k_cap,
            "side": side,
        })),
        "certificate": to_value(&cert)?,
    });
    emit(&doc, common.out.as_ref())
}

fn verify_calm(path: &Path) -> Result<()> {
    let v = load_cert(path, "calmness")?;
    let cert = &v["certificate"];
    let seq: Vec<f64> = crate::serde_util::ext_f64_vec::deserialize(&cert["modulus_sequence"])
        .map_err(|e: serde_json::Error| verify_fail(e.to_string()))?;
    if seq.len() < 2 {
        return Err(verify_fail("modulus sequence too short"));
    }
    // refinement monotonicity: node supersets can only grow the modulus
    for w in seq.windows(2) {
        if w[1] < w[0] - 1e-9 * (1.0 + w[0].abs()) {
            return Err(verify_fail("modulus sequence decreases under refinement"));
        }
    }
    let k_cap = cert["tolerances"]["k_cap"]
        .as_f64()
        .ok_or_else(|| verify_fail("missing k_cap"))?;
    let last = seq[seq.len() - 1];
    let prev = seq[seq.len() - 2];
    let stabilized = (last - prev).abs() <= 0.1 * prev.max(1e-12);
    let within = seq.iter().all(|&k| k <= k_cap);
    let verdict = cert["verdict"].as_str().unwrap_or("");
    let expected = if seq.iter().any(|k| !k.is_finite()) {
        "Diverging"
    } else if within && stabilized {
        "Subdifferentiable"
    } else if seq.windows(2).all(|w| w[1] > w[0]) && (!stabilized || !within) {
        "Diverging"
    } else {
        "Inconclusive"
    };
    if verdict != expected {
        return Err(verify_fail(format!(
            "verdict {verdict} inconsistent with the stored sequence (expected {expected})"
        )));
    }
    // when subdifferentiable is claimed, the cone with slope k_hat must
    // support the function on the finest stored grid
    if verdict == "Subdifferentiable" {
        let k_hat = cert["k_hat"].as_f64().ok_or_else(|| verify_fail("missing k_hat"))?;
        let spec = crate::jsonio::function_spec_from_json(&v["context"]["function"])?;
        let gallery =
            spec.as_gallery().ok_or_else(|| verify_fail("calm context must be a gallery"))?;
        let mut grid = grid_from_json(&v["context"]["grid"])?;
        let levels = cert["level_nodes"].as_array().map(|a| a.len()).unwrap_or(1);
        for _ in 1..levels {
            grid = grid.refined();
        }
        let side = v["context"]["params"]["side"].as_str().unwrap_or("sub");
        let f = match side {
            "super" => crate::sampled::sample(gallery, &grid, None)?.negated(),
            _ => crate::sampled::sample(gallery, &grid, None)?,
        };
        let coords: Vec<f64> = serde_json::from_value(cert["x_bar"].clone())?;
        let x_bar = Point::from_slice(&coords)?;
        let node = grid.node_at(&x_bar).ok_or_else(|| verify_fail("x_bar not a node"))?;
        let anchor = f.value(node).to_f64();
        let cand = SubgradientCandidate::cone(k_hat, node, anchor)?;
        let check = check_subgradient(&f, &cand, default_tol_feas(&f))?;
        if !check.passes {
            return Err(verify_fail("claimed cone slope does not support f on the finest grid"));
        }
    }
    verify_ok("calmness", json!({"verdict": verdict}))
}

fn cmd_subgrad(common: &CommonArgs, at: Option<&str>, side: &str) -> Result<()> {
    if let Some(path) = &common.verify {
        return verify_subgrad(path);
    }
    let at = required(at, "at")?;
    let (spec, f) = common.sampled()?;
    let x_bar = node_of(f.grid(), &parse_point(at)?)?;
    let tol = common.tol_feas_for(&f);
    let (cand_json, check) = match side {
        "sub" => {
            let cand = cone_subgradient(&f, x_bar)?;
            let check = check_subgradient(&f, &cand, tol)?;
            (to_value(&cand)?, check)
        }
        "super" => {
            let cand = cone_supergradient(&f, x_bar)?;
            let check = check_supergradient(&f, &cand, tol)?;
            (to_value(&cand)?, check)
        }
        _ => return Err(Error::usage("--side must be sub or super")),
    };
    let doc = json!({
        "kind": "subgradient",
        "context": context(&spec, Some(f.grid()), json!({
            "at": f.grid().node_coord(x_bar).coords().to_vec(),
            "side": side,
            "tol": tol,
        })),
        "candidate": cand_json,
        "check": to_value(&check)?,
    });
    emit(&doc, common.out.as_ref())
}

fn verify_subgrad(path: &Path) -> Result<()> {
    let v = load_cert(path, "subgradient")?;
    let f = cert_function(&v)?;
    let side = v["context"]["params"]["side"].as_str().unwrap_or("sub");
    let tol = v["context"]["params"]["tol"].as_f64().unwrap_or_else(|| default_tol_feas(&f));
    let passes = match side {
        "super" => {
            let cand: crate::subdiff::SupergradientCandidate =
                serde_json::from_value(v["candidate"].clone())?;
            check_supergradient(&f, &cand, tol)?.passes
        }
        _ => {
            let cand: SubgradientCandidate = serde_json::from_value(v["candidate"].clone())?;
            check_subgradient(&f, &cand, tol)?.passes
        }
    };
    let claimed = v["check"]["passes"].as_bool().unwrap_or(false);
    if passes != claimed {
        return Err(verify_fail("membership re-check disagrees with the stored verdict"));
    }
    verify_ok("subgradient", json!({"passes": passes}))
}

fn parse_candidate(s: &str, base: NodeIndex, anchor: f64) -> Result<SubgradientCandidate> {
    let parts: Vec<&str> = s.split(':').collect();
    match parts.as_slice() {
        ["cone", k] => {
            let k: f64 = k.parse().map_err(|_| Error::usage("cone:<slope> needs a number"))?;
            SubgradientCandidate::cone(k, base, anchor)
        }
        ["affine", rest @ ..] if !rest.is_empty() && rest.len() <= 2 => {
            let slope: Vec<f64> = rest
                .iter()
                .map(|x| x.parse::<f64>().map_err(|_| Error::usage("affine:<s> needs numbers")))
                .collect::<Result<_>>()?;
            SubgradientCandidate::affine(slope, base, anchor)
        }
        _ => Err(Error::usage(format!("bad candidate spec {s:?}; use cone:<k> or affine:<s>"))),
    }
}

fn cmd_maxcheck(
    common: &CommonArgs,
    at: Option<&str>,
    cand: Option<&str>,
    cap_k: Option<f64>,
) -> Result<()> {
    if let Some(path) = &common.verify {
        return verify_maximality(path, "maxcheck");
    }
    let at = required(at, "at")?;
    let cand = required(cand, "cand")?;
    let (spec, f) = common.sampled()?;
    let x_bar = node_of(f.grid(), &parse_point(at)?)?;
    let anchor = f
        .value(x_bar)
        .as_finite()
        .ok_or_else(|| Error::domain("maxcheck: f not finite at --at"))?;
    let candidate = parse_candidate(cand, x_bar, anchor)?;
    let tol = common.tol_feas_for(&f);
    let k = cap_k.unwrap_or_else(|| default_lipschitz_budget(&f));
    let cert = crate::subdiff::check_maximality(&f, &candidate, k, Some(tol), common.tol_lp)?;
    let seed_values = candidate.support_values(f.grid());
    let optimizer = cert
        .improvement
        .as_ref()
        .map(|m| m.values().to_vec())
        .unwrap_or_else(|| seed_values.clone());
    let doc = json!({
        "kind": "maxcheck",
        "context": context(&spec, Some(f.grid()), json!({
            "at": f.grid().node_coord(x_bar).coords().to_vec(),
            "cand": cand,
            "K": k,
        })),
        "certificate": to_value(&cert)?,
        "seed": seed_values,
        "optimizer": optimizer,
    });
    emit(&doc, common.out.as_ref())
}

fn parse_cone_spec(s: &str) -> Result<(Point, f64, f64)> {
    let parts: Vec<&str> = s.split(':').collect();
    if parts.len() != 3 {
        return Err(Error::usage("cone spec must be apex:slope:level"));
    }
    let apex = parse_point(parts[0])?;
    let slope: f64 = parts[1].parse().map_err(|_| Error::usage("bad cone slope"))?;
    let level: f64 = parts[2].parse().map_err(|_| Error::usage("bad cone level"))?;
    Ok((apex, slope, level))
}

fn cmd_ekeland(
    common: &CommonArgs,
    at: Option<&str>,
    eps: Option<f64>,
    delta: Option<f64>,
    cone: Option<&str>,
    k: Option<f64>,
) -> Result<()> {
    if let Some(path) = &common.verify {
        return verify_ekeland(path);
    }
    let at = required(at, "at")?;
    let (spec, f) = common.sampled()?;
    let x_bar = node_of(f.grid(), &parse_point(at)?)?;
    let tol = common.tol_feas_for(&f);

    let (h_values, h_lip, minorant_desc): (Vec<f64>, f64, Value) = match (cone, k) {
        (Some(c), None) => {
            let (apex, slope, level) = parse_cone_spec(c)?;
            let cone = ConeFunction::new(&apex, slope, level)?;
            (cone.sample(f.grid()), slope, json!({"cone": c}))
        }
        (None, Some(k)) => {
            let env = lipschitz_lower_envelope(&f, k)?;
            (env.values_f64(), k, json!({"envelope_k": k}))
        }
        _ => {
            return Err(Error::usage(
                "ekeland: supply exactly one minorant source: --cone apex:slope:level or --k",
            ))
        }
    };
    let h = GridMinorant::new(f.grid().clone(), h_values.clone(), h_lip)?;

    // defaults: eps = exact gap at x_bar, delta = sqrt(eps)
    let gap = f.value(x_bar).to_f64() - h.value(x_bar);
    let eps = eps.unwrap_or_else(|| gap.max(f64::EPSILON));
    let delta = delta.unwrap_or_else(|| eps.sqrt());

    let r = ekeland_refine(&f, MinorantInput::Grid(&h), x_bar, eps, delta, tol)?;
    let doc = json!({
        "kind": "ekeland",
        "context": context(&spec, Some(f.grid()), json!({
            "at": f.grid().node_coord(x_bar).coords().to_vec(),
            "eps": eps,
            "delta": delta,
            "minorant": minorant_desc,
            "minorant_values": h_values,
            "minorant_lipschitz": h_lip,
            "tol": tol,
        })),
        "result": to_value(&r)?,
        "support": json!({
            "values": r.support.values(),
            "lipschitz_budget": r.support.lipschitz_budget(),
        }),
    });
    emit(&doc, common.out.as_ref())
}

fn verify_ekeland(path: &Path) -> Result<()> {
    let v = load_cert(path, "ekeland")?;
    let f = cert_function(&v)?;
    let params = &v["context"]["params"];
    let eps = params["eps"].as_f64().ok_or_else(|| verify_fail("missing eps"))?;
    let delta = params["delta"].as_f64().ok_or_else(|| verify_fail("missing delta"))?;
    let tol = params["tol"].as_f64().unwrap_or_else(|| default_tol_feas(&f));
    let h_values: Vec<f64> = serde_json::from_value(params["minorant_values"].clone())?;
    let support: Vec<f64> = serde_json::from_value(v["support"]["values"].clone())?;
    let at: Vec<f64> = serde_json::from_value(params["at"].clone())?;
    let g = f.grid();
    let x_bar = g
        .node_at(&Point::from_slice(&at)?)
        .ok_or_else(|| verify_fail("x_bar not a node"))?;
    let x_delta =
        v["result"]["x_delta"].as_u64().ok_or_else(|| verify_fail("missing x_delta"))? as usize;
    let fv = f.values_f64();
    let pen = eps / delta;
    let gv: Vec<f64> = (0..g.node_count())
        .map(|i| if fv[i].is_finite() { fv[i] - h_values[i] } else { f64::INFINITY })
        .collect();
    // (i) descent, (ii) distance, (iii) perturbed minimality, support props
    let dist = g.node_dist(x_delta, x_bar);
    if gv[x_delta] + pen * dist > gv[x_bar] + tol {
        return Err(verify_fail("descent inequality (i) fails"));
    }
    if dist > delta + tol {
        return Err(verify_fail("distance bound (ii) fails"));
    }
    for x in 0..g.node_count() {
        if gv[x].is_finite() && gv[x_delta] > gv[x] + pen * g.node_dist(x, x_delta) + tol {
            return Err(verify_fail(format!("perturbed minimality (iii) fails at node {x}")));
        }
        if fv[x].is_finite() && support[x] > fv[x] + tol {
            return Err(verify_fail(format!("support exceeds f at node {x}")));
        }
    }
    if (support[x_delta] - fv[x_delta]).abs() > tol {
        return Err(verify_fail("support does not touch f at x_delta"));
    }
    verify_ok("ekeland", json!({"x_delta": x_delta, "distance": dist}))
}

fn cmd_density(
    common: &CommonArgs,
    eps: Option<f64>,
    delta: Option<f64>,
    k: Option<f64>,
    stride: usize,
) -> Result<()> {
    if let Some(path) = &common.verify {
        return verify_density(path);
    }
    let eps = *required(eps.as_ref(), "eps")?;
    let delta = *required(delta.as_ref(), "delta")?;
    let k = *required(k.as_ref(), "k")?;
    let (spec, f) = common.sampled()?;
    let tol = common.tol_feas_for(&f);
    let scan = density_scan(&f, eps, delta, k, stride, tol)?;
    if let Some(path) = &common.ndjson {
        let mut text = String::new();
        for p in &scan.points {
            text.push_str(&serde_json::to_string(&to_value(p)?)?);
            text.push('\n');
        }
        std::fs::write(path, text)?;
    }
    if let Some(csv) = &common.csv {
        use std::io::Write;
        let mut text = String::from("anchor,x_delta,distance,invariants_ok\n");
        for p in &scan.points {
            text.push_str(&format!(
                "{},{},{},{}\n",
                p.anchor, p.x_delta, p.distance, p.invariants_ok
            ));
        }
        let mut file = std::fs::File::create(csv)?;
        file.write_all(text.as_bytes())?;
    }
    let doc = json!({
        "kind": "density",
        "context": context(&spec, Some(f.grid()), json!({
            "eps": eps, "delta": delta, "k": k, "stride": stride, "tol": tol,
        })),
        "scan": to_value(&scan)?,
    });
    emit(&doc, common.out.as_ref())
}

fn verify_density(path: &Path) -> Result<()> {
    let v = load_cert(path, "density")?;
    let f = cert_function(&v)?;
    let scan = &v["scan"];
    let certified: Vec<usize> = serde_json::from_value(scan["certified_nodes"].clone())?;
    if certified.is_empty() {
        return Err(verify_fail("no certified nodes"));
    }
    let claimed = scan["covering_radius"].as_f64().ok_or_else(|| verify_fail("missing radius"))?;
    let g = f.grid();
    let radius = f
        .effective_domain()
        .iter()
        .map(|&i| {
            certified
                .iter()
                .map(|&c| g.node_dist(i, c))
                .fold(f64::INFINITY, f64::min)
        })
        .fold(0.0f64, f64::max);
    if (radius - claimed).abs() > 1e-9 * (1.0 + claimed) {
        return Err(verify_fail(format!(
            "recomputed covering radius {radius} does not match claimed {claimed}"
        )));
    }
    let all_ok = scan["points"]
        .as_array()
        .map(|pts| pts.iter().all(|p| p["invariants_ok"].as_bool() == Some(true)))
        .unwrap_or(false);
    if !all_ok {
        return Err(verify_fail("some scan points failed their invariants"));
    }
    verify_ok("density", json!({"covering_radius": radius}))
}

fn cmd_extremum(common: &CommonArgs, at: Option<&str>, kind: &str) -> Result<()> {
    if let Some(path) = &common.verify {
        return verify_extremum(path);
    }
    let at = required(at, "at")?;
    let (spec, f) = common.sampled()?;
    let x_bar = node_of(f.grid(), &parse_point(at)?)?;
    let cert = match kind {
        "min" => global_min_certificate(&f, x_bar)?,
        "max" => global_max_certificate(&f, x_bar)?,
        _ => return Err(Error::usage("--kind must be min or max")),
    };
    let doc = json!({
        "kind": "extremum",
        "context": context(&spec, Some(f.grid()), json!({
            "at": f.grid().node_coord(x_bar).coords().to_vec(),
            "side": kind,
        })),
        "certificate": to_value(&cert)?,
    });
    emit(&doc, common.out.as_ref())
}

fn verify_extremum(path: &Path) -> Result<()> {
    let v = load_cert(path, "extremum")?;
    let f = cert_function(&v)?;
    let at: Vec<f64> = serde_json::from_value(v["context"]["params"]["at"].clone())?;
    let x_bar = f
        .grid()
        .node_at(&Point::from_slice(&at)?)
        .ok_or_else(|| verify_fail("x_bar not a node"))?;
    let side = v["context"]["params"]["side"].as_str().unwrap_or("min");
    let cert = match side {
        "max" => global_max_certificate(&f, x_bar)?,
        _ => global_min_certificate(&f, x_bar)?,
    };
    let claimed = v["certificate"]["holds"].as_bool().unwrap_or(false);
    if cert.holds != claimed {
        return Err(verify_fail("holds re-check disagrees with the stored verdict"));
    }
    if !cert.consistent {
        return Err(verify_fail("the two verdict routes disagree"));
    }
    verify_ok("extremum", json!({"holds": cert.holds}))
}

// ---------------------------------------------------------------------------
// randomized calculus trials

pub struct TrialRow {
    pub trial: usize,
    pub verdict: bool,
    pub worst_slack: f64,
}

fn trial_seed(root: u64, t: usize) -> u64 {
    root ^ (t as u64).wrapping_mul(0x9E37_79B9_7F4A_7C15)
}

/// Sum-rule trial: cone subgradients of two random walks must sum to a
/// subgradient of the sum.
pub fn sum_trial(grid: &Grid, root: u64, t: usize) -> Result<TrialRow> {
    let mut rng = rng_for(trial_seed(root, t));
    let f1 = random_piecewise_linear(grid, &mut rng, 2.0, (-1.0, 1.0))?;
    let f2 = random_piecewise_linear(grid, &mut rng, 3.0, (-1.0, 1.0))?;
    let x_bar = rand::Rng::gen_range(&mut rng, 0..grid.node_count());
    let c1 = cone_subgradient(&f1, x_bar)?;
    let c2 = cone_subgradient(&f2, x_bar)?;
    let tol = default_tol_feas(&f1).max(default_tol_feas(&f2));
    let verdict = calculus_sum_check(&f1, &f2, x_bar, &c1, &c2, tol)?;
    let sum = f1.try_add(&f2)?;
    let sum_cand = crate::subdiff::candidate_sum(&c1, &c2, grid)?;
    let slack = check_subgradient(&sum, &sum_cand, 2.0 * tol)?.worst_slack;
    Ok(TrialRow { trial: t, verdict, worst_slack: slack })
}

/// Scaling-rule trial with the involution: scale by lambda, then by 1/lambda.
pub fn scaling_trial(grid: &Grid, root: u64, t: usize) -> Result<TrialRow> {
    let mut rng = rng_for(trial_seed(root, t));
    let f = random_piecewise_linear(grid, &mut rng, 2.0, (-1.0, 1.0))?;
    let x_bar = rand::Rng::gen_range(&mut rng, 0..grid.node_count());
    let lambda = rand::Rng::gen_range(&mut rng, 0.25..4.0);
    let c = cone_subgradient(&f, x_bar)?;
    let tol = default_tol_feas(&f);
    let forward = calculus_scaling_check(&f, lambda, &EitherCandidate::Sub(c.clone()), tol)?;
    let scaled_f = f.scaled(lambda);
    let scaled_c = c.scaled(lambda)?;
    let back =
        calculus_scaling_check(&scaled_f, 1.0 / lambda, &EitherCandidate::Sub(scaled_c), tol)?;
    let slack = check_subgradient(&f, &c, tol)?.worst_slack;
    Ok(TrialRow { trial: t, verdict: forward && back, worst_slack: slack })
}

/// Domination trial: f1 = f2 - beta*d(., x_bar) <= f2; the cone subgradient
/// of f1 must be dominated by a maximal subgradient of f2 from the LP.
pub fn domination_trial(grid: &Grid, root: u64, t: usize) -> Result<TrialRow> {
    let mut rng = rng_for(trial_seed(root, t));
    let f2 = random_piecewise_linear(grid, &mut rng, 2.0, (-1.0, 1.0))?;
    let x_bar = rand::Rng::gen_range(&mut rng, 0..grid.node_count());
    let beta = rand::Rng::gen_range(&mut rng, 0.0..2.0);
    let pb = grid.node_coord(x_bar);
    let f1 = SampledFunction::from_finite(
        grid.clone(),
        (0..grid.node_count())
            .map(|i| f2.value(i).to_f64() - beta * grid.dist(&grid.node_coord(i), &pb))
            .collect(),
        None,
    )?;
    let l1 = cone_subgradient(&f1, x_bar)?;
    let slope = match l1.form {
        crate::subdiff::CandidateForm::Cone { slope } => slope,
        _ => unreachable!(),
    };
    let k = default_lipschitz_budget(&f2).max(slope);
    let out = calculus_domination_check(&f1, &f2, x_bar, &l1, k, None)?;
    let seed = l1.support_values(grid);
    let slack = (0..grid.node_count())
        .map(|i| out.minorant.value(i) - seed[i])
        .fold(f64::INFINITY, f64::min);
    let feasible = out.minorant.check_against(&f2, out.certificate.tol_feas).ok();
    Ok(TrialRow { trial: t, verdict: out.dominates && feasible, worst_slack: slack })
}

fn cmd_calculus(common: &CommonArgs, rule: Option<&str>, trials: usize) -> Result<()> {
    let rule = required(rule, "rule")?;
    let grid = match common.grid()? {
        Some(g) => g,
        None => Grid::new_1d(-2.0, 2.0, 65, common.norm()?)?,
    };
    if grid.dim() != 1 {
        return Err(Error::usage("calculus trials run on 1-D grids"));
    }
    let mut rows = Vec::with_capacity(trials);
    for t in 0..trials {
        let row = match rule {
            "sum" => sum_trial(&grid, common.seed, t)?,
            "scaling" => scaling_trial(&grid, common.seed, t)?,
            "domination" => domination_trial(&grid, common.seed, t)?,
            _ => return Err(Error::usage("--rule must be sum, scaling or domination")),
        };
        rows.push(row);
    }
    let failures: Vec<usize> = rows.iter().filter(|r| !r.verdict).map(|r| r.trial).collect();
    if let Some(path) = &common.ndjson {
        let mut text = String::new();
        for r in &rows {
            text.push_str(&serde_json::to_string(&json!({
                "trial": r.trial, "verdict": r.verdict, "worst_slack": r.worst_slack,
            }))?);
            text.push('\n');
        }
        std::fs::write(path, text)?;
    }
    if let Some(csv) = &common.csv {
        use std::io::Write;
        let mut text = String::from("trial,verdict,worst_slack\n");
        for r in &rows {
            text.push_str(&format!("{},{},{}\n", r.trial, r.verdict, r.worst_slack));
        }
        let mut file = std::fs::File::create(csv)?;
        file.write_all(text.as_bytes())?;
    }
    let doc = json!({
        "kind": "calculus",
        "context": json!({
            "grid": grid_to_json(&grid),
            "params": {"rule": rule, "trials": trials, "seed": common.seed},
        }),
        "trials": trials,
        "failures": failures,
        "worst_slack": rows.iter().map(|r| r.worst_slack).fold(f64::INFINITY, f64::min),
    });
    emit(&doc, common.out.as_ref())
}

fn cmd_gallery(common: &CommonArgs, list: bool, id: Option<&str>) -> Result<()> {
    if list {
        for id in GalleryFunction::IDS {
            println!("{id}");
        }
        return Ok(());
    }
    let id = id.ok_or_else(|| Error::usage("gallery: use --list or --id <id>"))?;
    let f = GalleryFunction::by_id(id)?;
    let grid = common
        .grid()?
        .ok_or_else(|| Error::usage("gallery --id needs --grid to sample"))?;
    let sampled = crate::sampled::sample(&f, &grid, Some(id.to_string()))?;
    if let Some(csv) = &common.csv {
        write_csv(csv, &grid, &[("f", sampled.values_f64())])?;
    }
    emit(&sampled_to_json(&sampled), common.out.as_ref())
}
