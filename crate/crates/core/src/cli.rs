//! Command-line surface: config ingestion, command orchestration, and
//! machine-readable reports.
//!
//! Configs are TOML with every exact coefficient written as a rational string
//! (`"1/3"`, never `0.333`), because the analysis backend certifies with
//! rational arithmetic and a rounded input silently degrades every exactness
//! claim downstream. Reports are JSON with a `schema_version` field and no
//! timestamps or environment echoes: a report is a pure function of its
//! config (and, for `solve`, the documented solver options).
//!
//! Exit codes: 0 success, 2 validation (config, disc file, or a failed
//! verification), 3 singular or degenerate symbol, 4 no convergence,
//! 5 internal inconsistency.

use std::fs;
use std::path::{Path, PathBuf};

use anyhow::{anyhow, bail, Context, Result};
use clap::{Parser, Subcommand};
use num_complex::Complex64;
use serde::Deserialize;
use serde_json::{json, Value};

use crate::expr::{CPoly, NVARS, W1, WT1, Z1};
use crate::indices::{fredholm_report, full_report, middle_report, IndexError, IndexMethod};
use crate::laurent::LaurentPoly;
use crate::lift::{certify_stationary, initial_lift, Disc};
use crate::model::{conormal_system, HomogPoly, Model, ModelError, Perturbation};
use crate::rh_solver::{component_weights, solve, SolveError, SolveOptions};
use crate::scalar::{parse_rational, Coeff, GRat};
use crate::symbol::{linearize, SymbolError};
use crate::winding::WindingError;

pub const SCHEMA_VERSION: u32 = 1;

#[derive(Parser)]
#[command(
    name = "stationary-discs",
    version,
    about = "Stationary discs for decoupled submanifolds: symbols, indices, and the nonlinear solver"
)]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Subcommand)]
pub enum Command {
    /// Linearize the boundary system; report reduced data, partial indices,
    /// Maslov index, solvability verdicts, and the kernel dimension.
    Analyze {
        #[arg(long)]
        config: PathBuf,
        /// Write the JSON report here instead of stdout.
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Check a disc file against the (possibly perturbed) boundary equations.
    Verify {
        #[arg(long)]
        config: PathBuf,
        #[arg(long)]
        disc: PathBuf,
        /// Residual and reality tolerance for the float certificate.
        #[arg(long, default_value_t = 1e-8)]
        tol: f64,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Continue the certified disc to the perturbed system and write the
    /// solution disc next to the report.
    Solve {
        #[arg(long)]
        config: PathBuf,
        /// Recorded in the report for provenance; the solver is deterministic.
        #[arg(long)]
        seed: Option<u64>,
        #[arg(long)]
        out: Option<PathBuf>,
        /// Write the solution disc here (defaults to embedding it in the report).
        #[arg(long)]
        disc_out: Option<PathBuf>,
    },
    /// Write the certified unperturbed disc as a disc file.
    ExportInitial {
        #[arg(long)]
        config: PathBuf,
        #[arg(long)]
        out: Option<PathBuf>,
    },
}

// ---------------------------------------------------------------- config --

#[derive(Deserialize)]
#[serde(deny_unknown_fields)]
pub struct RunConfig {
    pub model: ModelConfig,
    pub lift: LiftConfig,
    #[serde(default)]
    pub perturbation: PerturbationConfig,
    #[serde(default)]
    pub solver: SolverConfig,
    #[serde(default)]
    pub output: OutputConfig,
}

#[derive(Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ModelConfig {
    pub d: [u32; 2],
    pub k: [u32; 2],
    /// Upper coefficient band of each polynomial: `(j, re, im)` with rational
    /// strings; the lower band follows by Hermitian symmetry.
    pub p1: Vec<(u32, String, String)>,
    pub p2: Vec<(u32, String, String)>,
}

#[derive(Deserialize)]
#[serde(deny_unknown_fields)]
pub struct LiftConfig {
    /// The two real conormal scales, as rational strings.
    pub c: [String; 2],
}

#[derive(Deserialize, Default)]
#[serde(deny_unknown_fields)]
pub struct PerturbationConfig {
    /// Target perturbation size; the solver chooses its own ramp toward it.
    #[serde(default)]
    pub eps: f64,
    #[serde(default, rename = "term")]
    pub terms: Vec<TermConfig>,
}

/// One ambient monomial of a perturbation: which defining equation it lands
/// in, its coefficient, and the powers of `z_m`, `conj z_m`, `w_m`,
/// `conj w_m`. The stored perturbation is the real part of the sum.
#[derive(Deserialize)]
#[serde(deny_unknown_fields)]
pub struct TermConfig {
    pub equation: usize,
    pub re: String,
    pub im: String,
    #[serde(default)]
    pub z: [u8; 2],
    #[serde(default)]
    pub zbar: [u8; 2],
    #[serde(default)]
    pub w: [u8; 2],
    #[serde(default)]
    pub wbar: [u8; 2],
}

#[derive(Deserialize, Default)]
#[serde(deny_unknown_fields)]
pub struct SolverConfig {
    pub n_modes: Option<usize>,
    pub tol: Option<f64>,
    pub max_newton: Option<usize>,
}

#[derive(Deserialize, Default)]
#[serde(deny_unknown_fields)]
pub struct OutputConfig {
    pub report: Option<PathBuf>,
    pub disc: Option<PathBuf>,
    #[serde(default)]
    pub verbose: bool,
}

pub fn load_config(path: &Path) -> Result<RunConfig> {
    let text = fs::read_to_string(path).with_context(|| format!("reading {}", path.display()))?;
    toml::from_str(&text).with_context(|| format!("parsing {}", path.display()))
}

fn grat(re: &str, im: &str, at: &str) -> Result<GRat> {
    let re = parse_rational(re).map_err(|e| anyhow!("{at}: {e}"))?;
    let im = parse_rational(im).map_err(|e| anyhow!("{at}: {e}"))?;
    Ok(GRat::new(re, im))
}

pub fn build_model(cfg: &RunConfig) -> Result<Model<GRat>> {
    let mut polys = vec![];
    for (l, band) in [&cfg.model.p1, &cfg.model.p2].into_iter().enumerate() {
        let mut upper = vec![];
        for (i, (j, re, im)) in band.iter().enumerate() {
            upper.push((*j, grat(re, im, &format!("model.p{}[{}]", l + 1, i))?));
        }
        polys.push(
            HomogPoly::new(cfg.model.d[l], cfg.model.k[l], upper)
                .with_context(|| format!("model.p{}", l + 1))?,
        );
    }
    let p2 = polys.pop().unwrap();
    let p1 = polys.pop().unwrap();
    let c: [GRat; 2] = [
        grat(&cfg.lift.c[0], "0", "lift.c[0]")?,
        grat(&cfg.lift.c[1], "0", "lift.c[1]")?,
    ];
    Model::new(p1, p2, c).context("lift.c")
}

pub fn build_perturbation(cfg: &RunConfig, model: &Model<GRat>) -> Result<Perturbation<GRat>> {
    if cfg.perturbation.terms.is_empty() {
        return Ok(Perturbation::none());
    }
    let mut raw = [CPoly::zero(), CPoly::zero()];
    for (i, t) in cfg.perturbation.terms.iter().enumerate() {
        let at = format!("perturbation.term[{i}]");
        if t.equation != 1 && t.equation != 2 {
            bail!("{at}.equation must be 1 or 2, got {}", t.equation);
        }
        let mut mono = CPoly::scalar(grat(&t.re, &t.im, &at)?);
        for m in 0..2 {
            mono = mono.mul(&CPoly::var_power(Z1 + m, t.z[m], t.zbar[m]));
            mono = mono.mul(&CPoly::var_power(W1 + m, t.w[m], t.wbar[m]));
        }
        raw[t.equation - 1] = raw[t.equation - 1].add(&mono);
    }
    Perturbation::from_raw(raw, model.degrees()).context("perturbation")
}

// ----------------------------------------------------------- disc files --

#[derive(Deserialize)]
#[serde(deny_unknown_fields)]
struct DiscFile {
    schema_version: u32,
    /// Eight components, each a list of `(exponent, re, im)` triples.
    components: Vec<Vec<(i64, f64, f64)>>,
}

pub fn read_disc(path: &Path) -> Result<Disc<Complex64>> {
    let text = fs::read_to_string(path).with_context(|| format!("reading {}", path.display()))?;
    let df: DiscFile =
        serde_json::from_str(&text).with_context(|| format!("parsing {}", path.display()))?;
    if df.schema_version != SCHEMA_VERSION {
        bail!("disc file schema_version {} (expected {SCHEMA_VERSION})", df.schema_version);
    }
    if df.components.len() != NVARS {
        bail!("disc file has {} components (expected {NVARS})", df.components.len());
    }
    let mut comps: [LaurentPoly<Complex64>; NVARS] = std::array::from_fn(|_| LaurentPoly::zero());
    for (i, terms) in df.components.iter().enumerate() {
        comps[i] =
            LaurentPoly::from_terms(terms.iter().map(|&(e, re, im)| (e, Complex64::new(re, im))));
    }
    Ok(Disc { comps })
}

pub fn disc_json(disc: &Disc<Complex64>) -> Value {
    json!({
        "schema_version": SCHEMA_VERSION,
        "components": disc
            .comps
            .iter()
            .map(|p| Value::Array(p.iter().map(|(e, c)| json!([e, c.re, c.im])).collect()))
            .collect::<Vec<_>>(),
    })
}

fn poly_terms_exact(p: &LaurentPoly<GRat>) -> Value {
    Value::Array(
        p.iter()
            .map(|(e, c)| json!([e, c.re.to_string(), c.im.to_string()]))
            .collect(),
    )
}

// ------------------------------------------------------------- commands --

fn method_name(m: &IndexMethod) -> &'static str {
    match m {
        IndexMethod::ExactKernelSweep => "exact-kernel-sweep",
        IndexMethod::Structural => "structural",
        IndexMethod::FloatKernelSweep => "float-kernel-sweep",
    }
}

pub fn cmd_analyze(cfg: &RunConfig) -> Result<Value> {
    let model = build_model(cfg)?;
    let lin = linearize(&model);
    let sys = conormal_system(&model, &Perturbation::none(), &GRat::zero());

    let degenerate_hint = "reducing the boundary symbol failed; a degenerate reduced datum \
                           usually means the model violates the trace nondegeneracy hypothesis";
    let (mid, qs) = middle_report(&model).context(degenerate_hint)?;
    let fred = fredholm_report(&model).context(degenerate_hint)?;
    let full = full_report(&model).context(degenerate_hint)?;

    let k0 = model.k0();
    let index_formula =
        2 * fred.per_component[0].q_winding + 2 * fred.per_component[1].q_winding + 4 * k0 as i64;

    Ok(json!({
        "schema_version": SCHEMA_VERSION,
        "command": "analyze",
        "model": {
            "d": model.degrees(),
            "k": [model.p[0].k, model.p[1].k],
            "k0": k0,
            "c": [model.c[0].to_string(), model.c[1].to_string()],
        },
        "equations": {
            "count": 8,
            "terms": sys.eqs.iter().map(|e| e.num_terms()).collect::<Vec<_>>(),
            "max_total_degree": sys.eqs.iter().map(|e| e.max_total_degree()).max(),
            "block_upper": lin.is_block_upper(),
            "diagonal_blocks_canonical": lin.diagonal_blocks_canonical(),
        },
        "reduced_data": {
            "q": [poly_terms_exact(&qs.q[0]), poly_terms_exact(&qs.q[1])],
            "s": [poly_terms_exact(&qs.s[0]), poly_terms_exact(&qs.s[1])],
            "q_windings": [fred.per_component[0].q_winding, fred.per_component[1].q_winding],
            "structure_certified": true,
        },
        "partial_indices": {
            "middle": mid.indices,
            "middle_method": method_name(&mid.method),
            "full": full.indices,
            "full_method": method_name(&full.method),
        },
        "det_winding": mid.det_winding,
        "maslov_index": fred.maslov,
        "index_formula": {
            "value": index_formula,
            "matches_maslov": index_formula == fred.maslov,
        },
        "kernel_dimension": fred.kernel_dim,
        "solvability": {
            "surjective": fred.per_component.iter().all(|v| v.surjective),
            "theta_bounds_ok": fred.per_component.iter().all(|v| v.theta_bound_ok),
            "per_component": fred.per_component.iter().map(|v| json!({
                "q_winding": v.q_winding,
                "surjectivity_threshold": v.surjectivity_threshold,
                "surjective": v.surjective,
                "theta_threshold": v.theta_threshold,
                "theta_bound_ok": v.theta_bound_ok,
            })).collect::<Vec<_>>(),
        },
    }))
}

pub fn cmd_verify(cfg: &RunConfig, disc_path: &Path, tol: f64) -> Result<(Value, bool)> {
    let model = build_model(cfg)?;
    let pert = build_perturbation(cfg, &model)?;
    let eps = cfg.perturbation.eps;
    let disc = read_disc(disc_path)?;

    let sys = conormal_system(&model.to_float(), &pert.to_float(), &Complex64::new(eps, 0.0));
    let cert = certify_stationary(&disc, &sys);
    let orders = disc.orders_at_one();
    let required = component_weights(&model);

    let mut failures: Vec<String> = vec![];
    for (j, r) in cert.per_equation.iter().enumerate() {
        if *r > tol {
            failures.push(format!("equation {} residual {:.3e} exceeds {tol:.1e}", j + 1, r));
        }
    }
    for i in 0..NVARS {
        let got = orders[i];
        if got.unwrap_or(u32::MAX) < required[i] {
            failures.push(format!(
                "component {i} vanishing order {} at Z = 1, structure requires {}",
                got.unwrap_or(0),
                required[i]
            ));
        }
    }

    // fiber scales read back from the disc: c_l = 2 * [Z^k0] wt_l, which must
    // be real and bounded away from zero for the lift to be conormal
    let k0 = model.k0() as i64;
    let recovered: Vec<Complex64> =
        (0..2).map(|l| disc.comps[WT1 + l].coeff(k0) * 2.0).collect();
    for (l, c) in recovered.iter().enumerate() {
        if c.im.abs() > tol {
            failures.push(format!("recovered scale c_{} has imaginary part {:.3e}", l + 1, c.im));
        }
        if c.norm() <= tol {
            failures.push(format!("recovered scale c_{} vanishes", l + 1));
        }
    }

    let pass = failures.is_empty();
    let report = json!({
        "schema_version": SCHEMA_VERSION,
        "command": "verify",
        "eps": eps,
        "pass": pass,
        "residual_linf": cert.residual_linf,
        "per_equation": cert.per_equation.to_vec(),
        "orders_at_one": orders.iter().map(|o| json!(o)).collect::<Vec<_>>(),
        "required_orders": required.to_vec(),
        "recovered_c": recovered.iter().map(|c| json!([c.re, c.im])).collect::<Vec<_>>(),
        "nondegeneracy_margin": recovered.iter().map(|c| c.norm()).fold(f64::INFINITY, f64::min),
        "failures": failures,
    });
    Ok((report, pass))
}

pub fn cmd_solve(cfg: &RunConfig, seed: Option<u64>) -> Result<(Value, Disc<Complex64>)> {
    let model = build_model(cfg)?;
    let pert = build_perturbation(cfg, &model)?;
    let eps = cfg.perturbation.eps;

    // precondition: the unperturbed analysis must grant solvability
    let fred = fredholm_report(&model).context(
        "the solvability analysis failed; run `analyze` on this config for the full verdict",
    )?;
    if !fred.per_component.iter().all(|v| v.surjective) {
        bail!(
            "the linearized system is not surjective (windings {:?}, thresholds {:?}); \
             the continuation has no solvable linear stage",
            fred.per_component.iter().map(|v| v.q_winding).collect::<Vec<_>>(),
            fred.per_component.iter().map(|v| v.surjectivity_threshold).collect::<Vec<_>>(),
        );
    }

    let mut opts = SolveOptions::for_model(&model);
    if let Some(n) = cfg.solver.n_modes {
        opts.n_modes = n;
    }
    if let Some(t) = cfg.solver.tol {
        opts.tol = t;
    }
    if let Some(m) = cfg.solver.max_newton {
        opts.max_newton = m;
    }

    if cfg.output.verbose {
        eprintln!(
            "solving at eps = {eps:.3e} with {} modes, tol {:.1e}",
            opts.n_modes, opts.tol
        );
    }
    let sol = solve(&model, &pert, eps, &opts)?;
    if cfg.output.verbose {
        eprintln!(
            "converged in {} stage(s), {} Newton steps, refined residual {:.3e}",
            sol.trace.len(),
            sol.newton_iters,
            sol.residual_sup
        );
    }

    // independent certificate against the perturbed equations
    let sys = conormal_system(&model.to_float(), &pert.to_float(), &Complex64::new(eps, 0.0));
    let cert = certify_stationary(&sol.disc, &sys);

    let report = json!({
        "schema_version": SCHEMA_VERSION,
        "command": "solve",
        "eps": eps,
        "identity_continuation": eps == 0.0,
        "seed": seed,
        "trace": sol.trace.iter().map(|s| json!({
            "eps": s.eps,
            "newton_iters": s.newton_iters,
            "kernel_dim": s.kernel_dim,
        })).collect::<Vec<_>>(),
        "newton_iters": sol.newton_iters,
        "n_modes": sol.n_modes,
        "grid": sol.grid,
        "residual_sup_refined": sol.residual_sup,
        "distance_from_initial": sol.distance,
        "certificate": {
            "residual_linf": cert.residual_linf,
            "per_equation": cert.per_equation.to_vec(),
        },
        "kernel_dimension_predicted": fred.kernel_dim,
        "kernel_dimension_at_solution": sol.kernel_dim,
    });
    Ok((report, sol.disc))
}

pub fn cmd_export_initial(cfg: &RunConfig) -> Result<Value> {
    let model = build_model(cfg)?;
    Ok(disc_json(&initial_lift(&model).to_float()))
}

// ------------------------------------------------------------- plumbing --

fn emit(doc: &Value, dest: Option<&Path>) -> Result<()> {
    let text = serde_json::to_string_pretty(doc).expect("report serialization cannot fail");
    match dest {
        Some(path) => fs::write(path, text + "\n")
            .with_context(|| format!("writing {}", path.display()))?,
        None => println!("{text}"),
    }
    Ok(())
}

fn exit_code_for(err: &anyhow::Error) -> i32 {
    for cause in err.chain() {
        if let Some(e) = cause.downcast_ref::<IndexError>() {
            return match e {
                IndexError::NonConvergent(_) => 4,
                IndexError::FactorizationRejected(_) => 5,
                _ => 3,
            };
        }
        if let Some(e) = cause.downcast_ref::<SolveError>() {
            return match e {
                SolveError::ModeBudget { .. } => 2,
                SolveError::Stalled { .. } | SolveError::ContinuationExhausted { .. } => 4,
                SolveError::Linear(_) => 5,
            };
        }
        if cause.downcast_ref::<SymbolError>().is_some()
            || cause.downcast_ref::<WindingError>().is_some()
        {
            return 3;
        }
        if cause.downcast_ref::<ModelError>().is_some() {
            return 2;
        }
    }
    2
}

/// Runs one parsed command to completion; returns the process exit code.
pub fn run(cli: Cli) -> i32 {
    let outcome = (|| -> Result<i32> {
        match &cli.command {
            Command::Analyze { config, out } => {
                let cfg = load_config(config)?;
                let doc = cmd_analyze(&cfg)?;
                emit(&doc, out.as_deref().or(cfg.output.report.as_deref()))?;
                Ok(0)
            }
            Command::Verify { config, disc, tol, out } => {
                let cfg = load_config(config)?;
                let (doc, pass) = cmd_verify(&cfg, disc, *tol)?;
                emit(&doc, out.as_deref().or(cfg.output.report.as_deref()))?;
                Ok(if pass { 0 } else { 2 })
            }
            Command::Solve { config, seed, out, disc_out } => {
                let cfg = load_config(config)?;
                let (mut doc, disc) = cmd_solve(&cfg, *seed)?;
                match disc_out.as_deref().or(cfg.output.disc.as_deref()) {
                    Some(path) => {
                        emit(&disc_json(&disc), Some(path))?;
                        doc["disc_file"] = json!(path.display().to_string());
                    }
                    None => {
                        doc["disc"] = disc_json(&disc);
                    }
                }
                emit(&doc, out.as_deref().or(cfg.output.report.as_deref()))?;
                Ok(0)
            }
            Command::ExportInitial { config, out } => {
                let cfg = load_config(config)?;
                let doc = cmd_export_initial(&cfg)?;
                emit(&doc, out.as_deref().or(cfg.output.disc.as_deref()))?;
                Ok(0)
            }
        }
    })();
    match outcome {
        Ok(code) => code,
        Err(e) => {
            eprintln!("error: {e:#}");
            exit_code_for(&e)
        }
    }
}
