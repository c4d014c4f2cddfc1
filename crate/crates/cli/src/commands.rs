//! Command implementations. Each returns a report and, when a bound or
//! property check failed, the message explaining why.

use std::f64::consts::FRAC_PI_2;
use std::io::Write as _;
use std::path::Path;

use bilocal_core::correlations::{correlation_tensor, gram_eigs, horodecki_m, max_chsh};
use bilocal_core::monogamy::{
    marginal_tradeoff_sum, monogamy_report_with_tol, w_state, Assignment, FourPartyNetwork,
    WStateParams, BOUND_TOL,
};
use bilocal_core::network::{
    b_closed_form, behavior, bilocal_report, BilocalScenario, BlochVector, NetworkSettings,
    ProjectiveSetting, SeparableSetting,
};
use bilocal_core::optimize::{maximize_chsh, maximize_free, maximize_shared, OptimizerConfig};
use bilocal_core::qalg::{
    density_from_ket, derive_seed, random_density, random_pure_state, random_unit_vector,
    rng_from_seed,
};
use serde_json::{json, Value};

use crate::error::{CliError, CliResult};
use crate::report::{round15, sha256_hex, InputDigest};
use crate::state::{LoadedState, StateFile, RANDOM_RANK};

/// Slack allowed on bounds checked through the optimizer.
pub const OPTIMIZER_SLACK: f64 = 1e-6;

/// Default `μ₀` of the sweep, where the W-state network saturates the bound
/// for every `μ₁`.
pub const SWEEP_MU0: f64 = FRAC_PI_2;

#[derive(Debug, Clone)]
pub struct Outcome {
    pub inputs: Vec<InputDigest>,
    pub results: Value,
    pub violation: Option<String>,
}

fn digest(s: &LoadedState) -> InputDigest {
    InputDigest {
        source: s.source.clone(),
        sha256: s.sha256.clone(),
    }
}

fn optimizer(seed: u64, restarts: usize) -> CliResult<OptimizerConfig> {
    let cfg = OptimizerConfig {
        restarts,
        ..OptimizerConfig::with_seed(seed)
    };
    cfg.validate()?;
    Ok(cfg)
}

/// Writes `contents` next to `path` and renames it into place.
pub fn write_atomic(path: &Path, contents: &[u8]) -> CliResult<()> {
    let io = |e: std::io::Error| CliError::Io(format!("cannot write {}: {e}", path.display()));
    let dir = match path.parent() {
        Some(p) if !p.as_os_str().is_empty() => p,
        _ => Path::new("."),
    };
    let mut tmp = tempfile::NamedTempFile::new_in(dir).map_err(io)?;
    tmp.write_all(contents).map_err(io)?;
    tmp.as_file().sync_all().map_err(io)?;
    tmp.persist(path).map_err(|e| io(e.error))?;
    Ok(())
}

pub fn tensor(state: &LoadedState) -> CliResult<Outcome> {
    if state.rho.num_qubits() != 2 {
        return Err(CliError::Parse(format!(
            "tensor needs a two-qubit state, got {} qubits",
            state.rho.num_qubits()
        )));
    }
    let t = correlation_tensor(&state.rho)?;
    let results = json!({
        "label": state.label,
        "t": t.entries(),
        "gram_eigenvalues": gram_eigs(&t)?.values(),
        "horodecki_m": horodecki_m(&t)?,
        "max_chsh": max_chsh(&t)?,
    });
    Ok(Outcome {
        inputs: vec![digest(state)],
        results,
        violation: None,
    })
}

pub struct MonogamyArgs {
    pub assign_1: Assignment,
    pub assign_2: Assignment,
    pub optimize: bool,
    pub restarts: usize,
    pub seed: u64,
    pub tol: Option<f64>,
}

pub fn monogamy(abc: &LoadedState, bcd: &LoadedState, args: &MonogamyArgs) -> CliResult<Outcome> {
    let tol = args.tol.unwrap_or(BOUND_TOL);
    let net = FourPartyNetwork::new(abc.rho.clone(), bcd.rho.clone(), args.assign_1, args.assign_2)?;
    let r = monogamy_report_with_tol(&net, tol)?;
    let exclusion = r.exclusion_holds(tol);
    let mut problems = Vec::new();
    if !r.satisfied {
        problems.push(format!("tradeoff_lhs {} exceeds 2", r.tradeoff_lhs));
    }
    if !r.chain_holds(tol) {
        problems.push("tradeoff_lhs <= amgm_bound <= 2 broken".to_string());
    }
    if !exclusion {
        problems.push("both reduced networks exceed 1".to_string());
    }

    let mut results = json!({
        "assignment_1": args.assign_1.to_string(),
        "assignment_2": args.assign_2.to_string(),
        "tolerance": tol,
        "lambda_b": r.lambda_b,
        "lambda_c": r.lambda_c,
        "iota_b": r.iota_b,
        "iota_c": r.iota_c,
        "bmaxsq_b": r.bmaxsq_b,
        "bmaxsq_c": r.bmaxsq_c,
        "tradeoff_lhs": r.tradeoff_lhs,
        "amgm_bound": r.amgm_bound,
        "satisfied": r.satisfied,
        "exclusion_holds": exclusion,
        "optimizer": null,
    });

    if args.optimize {
        let cfg = optimizer(args.seed, args.restarts)?;
        let shared = maximize_shared(&net, &cfg)?;
        let free = maximize_free(&net, &cfg)?;
        let residuals = json!({
            "shared_minus_free": shared.value - free.lhs,
            "free_minus_tradeoff": free.lhs - r.tradeoff_lhs,
            "tradeoff_minus_amgm": r.tradeoff_lhs - r.amgm_bound,
            "amgm_minus_two": r.amgm_bound - 2.0,
            "free_minus_amgm": free.lhs - r.amgm_bound,
        });
        if shared.value > free.lhs + OPTIMIZER_SLACK {
            problems.push(format!("shared optimum {} exceeds free optimum {}", shared.value, free.lhs));
        }
        if free.lhs > r.amgm_bound + OPTIMIZER_SLACK {
            problems.push(format!("free optimum {} exceeds amgm_bound {}", free.lhs, r.amgm_bound));
        }
        results["optimizer"] = json!({
            "restarts": args.restarts,
            "slack": OPTIMIZER_SLACK,
            "shared": shared.value,
            "shared_gap_to_tradeoff": r.tradeoff_lhs - shared.value,
            "free": free.lhs,
            "free_b": free.per_network,
            "free_exceeds_tradeoff": free.lhs > r.tradeoff_lhs + OPTIMIZER_SLACK,
            "exhausted_restarts": shared.exhausted_restarts + free.nb.exhausted_restarts + free.nc.exhausted_restarts,
            "residuals": residuals,
        });
    }

    Ok(Outcome {
        inputs: vec![digest(abc), digest(bcd)],
        results,
        violation: (!problems.is_empty()).then(|| problems.join("; ")),
    })
}

pub struct SweepArgs<'a> {
    pub from: f64,
    pub to: f64,
    pub steps: usize,
    pub out: &'a Path,
    pub mu0: f64,
    pub assign_2: Assignment,
    pub shared_opt: bool,
    pub restarts: usize,
    pub seed: u64,
    pub tol: Option<f64>,
}

fn cell(x: f64) -> String {
    Value::from(round15(x)).to_string()
}

pub fn sweep(args: &SweepArgs) -> CliResult<Outcome> {
    if args.steps < 2 {
        return Err(CliError::Parse(format!("--steps must be at least 2, got {}", args.steps)));
    }
    let tol = args.tol.unwrap_or(BOUND_TOL);
    let cfg = args
        .shared_opt
        .then(|| optimizer(args.seed, args.restarts))
        .transpose()?;
    let mut csv = String::from("mu1,bmaxsq_B,bmaxsq_C,tradeoff_lhs");
    if args.shared_opt {
        csv.push_str(",shared_opt");
    }
    csv.push('\n');
    let mut worst = 0.0f64;
    let mut max_lhs = f64::NEG_INFINITY;
    for k in 0..args.steps {
        let mu1 = args.from + (args.to - args.from) * k as f64 / (args.steps - 1) as f64;
        let rho = density_from_ket(&w_state(WStateParams::new(args.mu0, mu1)?))?;
        let net = FourPartyNetwork::new(rho.clone(), rho, Assignment::abc(), args.assign_2)?;
        let r = monogamy_report_with_tol(&net, tol)?;
        worst = worst.max((r.tradeoff_lhs - 2.0).abs());
        max_lhs = max_lhs.max(r.tradeoff_lhs);
        let mut row = vec![cell(mu1), cell(r.bmaxsq_b), cell(r.bmaxsq_c), cell(r.tradeoff_lhs)];
        if let Some(cfg) = &cfg {
            row.push(cell(maximize_shared(&net, cfg)?.value));
        }
        csv.push_str(&row.join(","));
        csv.push('\n');
    }
    write_atomic(args.out, csv.as_bytes())?;
    let results = json!({
        "param": "mu1",
        "mu0": args.mu0,
        "from": args.from,
        "to": args.to,
        "steps": args.steps,
        "assignment_2": args.assign_2.to_string(),
        "out": args.out.display().to_string(),
        "out_sha256": sha256_hex(csv.as_bytes()),
        "max_tradeoff_lhs": max_lhs,
        "max_abs_tradeoff_minus_two": worst,
    });
    Ok(Outcome {
        inputs: Vec::new(),
        results,
        violation: (max_lhs > 2.0 + tol).then(|| format!("tradeoff_lhs {max_lhs} exceeds 2")),
    })
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, clap::ValueEnum)]
pub enum Suite {
    Lemma,
    Marginal,
    Monogamy,
    Equivalence,
    Horodecki,
}

impl Suite {
    pub fn default_tolerance(self) -> f64 {
        match self {
            Suite::Lemma | Suite::Marginal | Suite::Monogamy => 1e-9,
            Suite::Equivalence => 1e-10,
            Suite::Horodecki => 1e-3,
        }
    }

    fn name(self) -> &'static str {
        match self {
            Suite::Lemma => "lemma",
            Suite::Marginal => "marginal",
            Suite::Monogamy => "monogamy",
            Suite::Equivalence => "equivalence",
            Suite::Horodecki => "horodecki",
        }
    }
}

/// One instance: the checked value, its distance past the bound (or its
/// error, for the equality suites) and whether it passed.
struct Check {
    value: f64,
    residual: f64,
    ok: bool,
}

impl Check {
    fn bounded(value: f64, residual: f64, tol: f64) -> Self {
        Self {
            value,
            residual,
            ok: residual <= tol,
        }
    }
}

fn random_settings(seed: u64) -> NetworkSettings {
    let mut rng = rng_from_seed(seed);
    let mut v = || BlochVector::new(random_unit_vector(&mut rng)).expect("sampled unit vector");
    NetworkSettings {
        left: ProjectiveSetting::new(v(), v()),
        middle: SeparableSetting::new([v(), v()], [v(), v()]),
        right: ProjectiveSetting::new(v(), v()),
    }
}

fn run_instance(suite: Suite, index: usize, seed: u64, tol: f64, restarts: usize) -> CliResult<Check> {
    let s0 = derive_seed(seed, 0);
    let s1 = derive_seed(seed, 1);
    let cycled_rank = 1 + index % 4;
    Ok(match suite {
        Suite::Lemma => {
            let l = correlation_tensor(&random_density(2, RANDOM_RANK, s0)?)?;
            let r = correlation_tensor(&random_density(2, RANDOM_RANK, s1)?)?;
            let b = bilocal_core::correlations::bmax(&l, &r)?;
            Check::bounded(b, b - std::f64::consts::SQRT_2, tol)
        }
        Suite::Marginal => {
            let rho = random_density(3, RANDOM_RANK, s0)?;
            let mut worst = f64::NEG_INFINITY;
            for pivot in 0..3 {
                worst = worst.max(marginal_tradeoff_sum(&rho, pivot)?);
            }
            Check::bounded(worst, worst - 2.0, tol)
        }
        Suite::Monogamy => {
            let net = FourPartyNetwork::natural(
                random_density(3, RANDOM_RANK, s0)?,
                random_density(3, RANDOM_RANK, s1)?,
            )?;
            let r = monogamy_report_with_tol(&net, tol)?;
            let residual = (r.tradeoff_lhs - 2.0)
                .max(r.tradeoff_lhs - r.amgm_bound)
                .max(r.amgm_bound - 2.0);
            let mut c = Check::bounded(r.tradeoff_lhs, residual, tol);
            c.ok &= r.exclusion_holds(tol);
            c
        }
        Suite::Equivalence => {
            let l = random_density(2, cycled_rank, s0)?;
            let r = random_density(2, cycled_rank, s1)?;
            let settings = random_settings(derive_seed(seed, 2));
            let tl = correlation_tensor(&l)?;
            let tr = correlation_tensor(&r)?;
            let beh = behavior(&BilocalScenario::new(l, r, settings)?)?;
            let gap = (b_closed_form(&tl, &tr, &settings) - bilocal_report(&beh).b).abs();
            let residual = beh.residuals().worst();
            Check::bounded(gap, gap.max(residual), tol)
        }
        Suite::Horodecki => {
            let rho = random_density(2, cycled_rank, s0)?;
            let m = horodecki_m(&correlation_tensor(&rho)?)?;
            let opt = maximize_chsh(&rho, &optimizer(s1, restarts)?)?;
            let gap = (opt.value - 2.0 * m.sqrt()).abs();
            Check::bounded(gap, gap, tol)
        }
    })
}

pub fn verify(suite: Suite, count: usize, seed: u64, tol: Option<f64>, restarts: usize) -> CliResult<Outcome> {
    if count == 0 {
        return Err(CliError::Parse("--count must be positive".into()));
    }
    let tol = tol.unwrap_or(suite.default_tolerance());
    let mut worst_value = f64::NEG_INFINITY;
    let mut worst_residual = f64::NEG_INFINITY;
    let mut failures = 0usize;
    let mut first_failure = Value::Null;
    for i in 0..count {
        let instance_seed = derive_seed(seed, i as u64);
        let c = run_instance(suite, i, instance_seed, tol, restarts)?;
        worst_value = worst_value.max(c.value);
        worst_residual = worst_residual.max(c.residual);
        if !c.ok {
            failures += 1;
            if first_failure.is_null() {
                first_failure = json!({"index": i, "seed": instance_seed, "value": c.value});
            }
        }
    }
    let results = json!({
        "suite": suite.name(),
        "count": count,
        "tolerance": tol,
        "worst_value": worst_value,
        "worst_residual": worst_residual,
        "failures": failures,
        "first_failure": first_failure,
        "passed": failures == 0,
    });
    Ok(Outcome {
        inputs: Vec::new(),
        results,
        violation: (failures > 0).then(|| {
            format!("{failures} of {count} {} instances failed", suite.name())
        }),
    })
}

pub fn random(qubits: usize, rank: usize, seed: u64, out: &Path) -> CliResult<Outcome> {
    let label = Some(format!("random seed {seed} rank {rank}"));
    let file = if rank == 1 {
        StateFile::from_ket(&random_pure_state(qubits, seed)?, label)
    } else {
        StateFile::from_density(&random_density(qubits, rank, seed)?, label)
    };
    let text = file.to_json();
    write_atomic(out, text.as_bytes())?;
    Ok(Outcome {
        inputs: Vec::new(),
        results: json!({
            "out": out.display().to_string(),
            "qubits": qubits,
            "rank": rank,
            "kind": if rank == 1 { "ket" } else { "density" },
            "sha256": sha256_hex(text.as_bytes()),
        }),
        violation: None,
    })
}
