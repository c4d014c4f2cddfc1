//! Derivative-free maximization over measurement directions.
//!
//! Every direction is parameterized by a pair of spherical angles, so the
//! search space is unconstrained. Each restart draws its starting directions
//! uniformly on the sphere from its own ChaCha8 stream (the configured seed,
//! stream number = restart index), runs Nelder–Mead, then re-seeds the
//! simplex around the incumbent until it stops improving or the iteration
//! budget is spent. The reported optimum is the best restart, ties going to
//! the lowest restart index, so results do not depend on whether restarts
//! run in parallel.

mod nelder_mead;

use rand::Rng;
use rand_chacha::ChaCha8Rng;
use rand::SeedableRng;
use rayon::prelude::*;

pub use nelder_mead::{minimize, LocalResult};

use crate::correlations::{chsh_value, correlation_tensor, CorrelationTensor};
use crate::error::{Error, Result};
use crate::monogamy::{reduced_tensors, FourPartyNetwork, ReducedNetwork};
use crate::network::{
    b_closed_form, BlochVector, NetworkSettings, ProjectiveSetting, SeparableSetting,
};
use crate::qalg::DensityMatrix;

const INITIAL_STEP: f64 = 0.6;
const POLISH_STEP: f64 = 0.05;
const POLISH_GAIN: f64 = 1e-13;

#[derive(Debug, Clone, PartialEq)]
pub struct OptimizerConfig {
    pub restarts: usize,
    pub seed: u64,
    pub max_iterations: usize,
    /// Simplex diameter, in radians, at which a local search stops.
    pub convergence_tol: f64,
    pub parallel: bool,
    /// Keep the best value of every restart in [`Optimum::traces`].
    pub verbose: bool,
}

impl Default for OptimizerConfig {
    fn default() -> Self {
        Self {
            restarts: 32,
            seed: 0,
            max_iterations: 2000,
            convergence_tol: 1e-9,
            parallel: true,
            verbose: false,
        }
    }
}

impl OptimizerConfig {
    pub fn with_seed(seed: u64) -> Self {
        Self {
            seed,
            ..Self::default()
        }
    }

    pub fn validate(&self) -> Result<()> {
        if self.restarts == 0 {
            return Err(Error::BadParameter("restarts must be at least 1".into()));
        }
        if self.max_iterations == 0 {
            return Err(Error::BadParameter("max_iterations must be at least 1".into()));
        }
        if self.convergence_tol.is_nan() || self.convergence_tol <= 0.0 {
            return Err(Error::BadParameter("convergence_tol must be positive".into()));
        }
        Ok(())
    }
}

/// Flat list of `(θ, φ)` pairs, one per Bloch direction.
#[derive(Debug, Clone, PartialEq)]
pub struct SettingsVector {
    angles: Vec<f64>,
}

impl SettingsVector {
    pub fn from_angles(angles: Vec<f64>) -> Result<Self> {
        if !angles.len().is_multiple_of(2) {
            return Err(Error::BadParameter(format!(
                "odd number of angles ({})",
                angles.len()
            )));
        }
        Ok(Self { angles })
    }

    /// Canonical angles (`θ ∈ [0, π]`, `φ ∈ [0, 2π)`) of the given directions.
    pub fn from_vectors(vectors: &[BlochVector]) -> Self {
        let angles = vectors
            .iter()
            .flat_map(|v| {
                let (t, p) = v.angles();
                [t, p]
            })
            .collect();
        Self { angles }
    }

    pub fn angles(&self) -> &[f64] {
        &self.angles
    }

    pub fn len(&self) -> usize {
        self.angles.len() / 2
    }

    pub fn is_empty(&self) -> bool {
        self.angles.is_empty()
    }

    pub fn vectors(&self) -> Vec<BlochVector> {
        decode(&self.angles)
    }
}

fn decode(angles: &[f64]) -> Vec<BlochVector> {
    angles
        .chunks_exact(2)
        .map(|pair| BlochVector::from_angles(pair[0], pair[1]))
        .collect()
}

/// Result of a multi-restart search.
#[derive(Debug, Clone, PartialEq)]
pub struct Optimum {
    pub value: f64,
    pub settings: SettingsVector,
    pub best_restart: usize,
    /// Restarts that hit the iteration cap before their simplex converged.
    pub exhausted_restarts: usize,
    /// Best value of each restart, in restart order (verbose mode only).
    pub traces: Option<Vec<f64>>,
}

struct RestartOutcome {
    value: f64,
    angles: Vec<f64>,
    exhausted: bool,
}

fn restart_rng(seed: u64, restart: usize) -> ChaCha8Rng {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(restart as u64);
    rng
}

fn random_start(rng: &mut ChaCha8Rng, num_vectors: usize) -> Vec<f64> {
    let mut angles = Vec::with_capacity(2 * num_vectors);
    for _ in 0..num_vectors {
        let u: f64 = rng.random();
        let v: f64 = rng.random();
        angles.push((1.0 - 2.0 * u).clamp(-1.0, 1.0).acos());
        angles.push(std::f64::consts::TAU * v);
    }
    angles
}

fn run_restart<F>(objective: &F, num_vectors: usize, cfg: &OptimizerConfig, restart: usize) -> RestartOutcome
where
    F: Fn(&[BlochVector]) -> f64 + Sync,
{
    let mut rng = restart_rng(cfg.seed, restart);
    let start = random_start(&mut rng, num_vectors);
    let neg = |x: &[f64]| -objective(&decode(x));

    let mut budget = cfg.max_iterations;
    let mut local = minimize(&neg, &start, INITIAL_STEP, budget, cfg.convergence_tol);
    budget -= local.iterations.min(budget);
    let mut converged = local.converged;
    while budget > 0 {
        let next = minimize(&neg, &local.x, POLISH_STEP, budget, cfg.convergence_tol);
        budget -= next.iterations.min(budget);
        converged = next.converged;
        let gain = local.value - next.value;
        if next.value < local.value {
            local = next;
        }
        if gain <= POLISH_GAIN {
            break;
        }
    }
    RestartOutcome {
        value: -local.value,
        angles: local.x,
        exhausted: !converged,
    }
}

/// Maximizes `objective` over `num_vectors` Bloch directions.
pub fn maximize<F>(objective: F, num_vectors: usize, cfg: &OptimizerConfig) -> Result<Optimum>
where
    F: Fn(&[BlochVector]) -> f64 + Sync,
{
    cfg.validate()?;
    if num_vectors == 0 {
        return Err(Error::BadParameter("nothing to optimize".into()));
    }
    let outcomes: Vec<RestartOutcome> = if cfg.parallel {
        (0..cfg.restarts)
            .into_par_iter()
            .map(|r| run_restart(&objective, num_vectors, cfg, r))
            .collect()
    } else {
        (0..cfg.restarts)
            .map(|r| run_restart(&objective, num_vectors, cfg, r))
            .collect()
    };

    let mut best = 0;
    for (i, o) in outcomes.iter().enumerate() {
        if o.value > outcomes[best].value {
            best = i;
        }
    }
    let exhausted_restarts = outcomes.iter().filter(|o| o.exhausted).count();
    let traces = cfg
        .verbose
        .then(|| outcomes.iter().map(|o| o.value).collect());
    let winner = &outcomes[best];
    Ok(Optimum {
        value: winner.value,
        settings: SettingsVector::from_vectors(&decode(&winner.angles)),
        best_restart: best,
        exhausted_restarts,
        traces,
    })
}

/// Decodes the eight-direction layout used by [`maximize_b`]:
/// `α₀, α₁, β₀ᴸ, β₀ᴿ, β₁ᴸ, β₁ᴿ, γ₀, γ₁`.
pub fn bilocal_settings(v: &[BlochVector]) -> NetworkSettings {
    assert_eq!(v.len(), 8, "bilocal layout has eight directions");
    NetworkSettings {
        left: ProjectiveSetting::new(v[0], v[1]),
        middle: SeparableSetting::new([v[2], v[3]], [v[4], v[5]]),
        right: ProjectiveSetting::new(v[6], v[7]),
    }
}

/// Decodes the twelve-direction layout used by [`maximize_shared`]:
/// `α₀, α₁, β₀ᴬ, β₀ᴰ, β₁ᴬ, β₁ᴰ, γ₀ᴬ, γ₀ᴰ, γ₁ᴬ, γ₁ᴰ, δ₀, δ₁`. Returns the
/// settings of `N_B` and `N_C`, which share Alice's and Dick's directions.
pub fn shared_settings(v: &[BlochVector]) -> (NetworkSettings, NetworkSettings) {
    assert_eq!(v.len(), 12, "shared layout has twelve directions");
    let alice = ProjectiveSetting::new(v[0], v[1]);
    let dick = ProjectiveSetting::new(v[10], v[11]);
    let nb = NetworkSettings {
        left: alice,
        middle: SeparableSetting::new([v[2], v[3]], [v[4], v[5]]),
        right: dick,
    };
    let nc = NetworkSettings {
        left: alice,
        middle: SeparableSetting::new([v[6], v[7]], [v[8], v[9]]),
        right: dick,
    };
    (nb, nc)
}

fn two_qubit_tensor(rho: &DensityMatrix) -> Result<CorrelationTensor> {
    correlation_tensor(rho)
}

/// Largest bilocality parameter over all projective extreme settings and
/// separable middle settings, using the tensor closed form.
pub fn maximize_b(
    rho_left: &DensityMatrix,
    rho_right: &DensityMatrix,
    cfg: &OptimizerConfig,
) -> Result<Optimum> {
    let tl = two_qubit_tensor(rho_left)?;
    let tr = two_qubit_tensor(rho_right)?;
    maximize_b_tensors(&tl, &tr, cfg)
}

pub fn maximize_b_tensors(
    t_left: &CorrelationTensor,
    t_right: &CorrelationTensor,
    cfg: &OptimizerConfig,
) -> Result<Optimum> {
    maximize(
        |v| b_closed_form(t_left, t_right, &bilocal_settings(v)),
        8,
        cfg,
    )
}

/// Largest CHSH value over four measurement directions `a₀, a₁, b₀, b₁`.
pub fn maximize_chsh(rho: &DensityMatrix, cfg: &OptimizerConfig) -> Result<Optimum> {
    let t = two_qubit_tensor(rho)?;
    maximize(|v| chsh_value(&t, [v[0].components(), v[1].components()], [v[2].components(), v[3].components()]), 4, cfg)
}

/// Largest `(B_B)² + (B_C)²` when Alice and Dick use the same directions in
/// both reduced networks.
pub fn maximize_shared(net: &FourPartyNetwork, cfg: &OptimizerConfig) -> Result<Optimum> {
    let nb = reduced_tensors(net, ReducedNetwork::NB)?;
    let nc = reduced_tensors(net, ReducedNetwork::NC)?;
    maximize(
        |v| {
            let (sb, sc) = shared_settings(v);
            let bb = b_closed_form(&nb.t_near, &nb.t_far, &sb);
            let bc = b_closed_form(&nc.t_near, &nc.t_far, &sc);
            bb * bb + bc * bc
        },
        12,
        cfg,
    )
}

/// Independent optimization of each reduced network.
#[derive(Debug, Clone, PartialEq)]
pub struct FreeOptimum {
    /// `(B_B*)² + (B_C*)²`.
    pub lhs: f64,
    /// Optimal `B` of `N_B` and `N_C`.
    pub per_network: [f64; 2],
    pub nb: Optimum,
    pub nc: Optimum,
}

pub fn maximize_free(net: &FourPartyNetwork, cfg: &OptimizerConfig) -> Result<FreeOptimum> {
    let tb = reduced_tensors(net, ReducedNetwork::NB)?;
    let tc = reduced_tensors(net, ReducedNetwork::NC)?;
    let nb = maximize_b_tensors(&tb.t_near, &tb.t_far, cfg)?;
    let nc = maximize_b_tensors(&tc.t_near, &tc.t_far, cfg)?;
    Ok(FreeOptimum {
        lhs: nb.value * nb.value + nc.value * nc.value,
        per_network: [nb.value, nc.value],
        nb,
        nc,
    })
}
