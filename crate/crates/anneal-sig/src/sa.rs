//! Classical thermalization: the exact single-spin-flip master equation over
//! all `2^n` populations, stochastic Monte Carlo annealing, and the reduced
//! four-level rate model for the degenerate ground space.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::ising::{ground_space, GroundSpace, IsingModel};

/// A probability vector over all `2^n` spin configurations.
#[derive(Debug, Clone, PartialEq)]
pub struct Distribution {
    /// Probability per configuration index.
    pub p: Vec<f64>,
}

impl Distribution {
    /// The uniform (infinite-temperature) distribution.
    pub fn uniform(n_states: usize) -> Self {
        Distribution {
            p: vec![1.0 / n_states as f64; n_states],
        }
    }

    /// A point mass on configuration `k`.
    pub fn point(n_states: usize, k: usize) -> Self {
        let mut p = vec![0.0; n_states];
        p[k] = 1.0;
        Distribution { p }
    }

    /// Checks non-negativity and normalization to 1e−12.
    pub fn validate(&self) -> Result<()> {
        if self.p.iter().any(|&x| x < -1e-12) {
            return Err(Error::Numerical("negative probability".into()));
        }
        let s: f64 = self.p.iter().sum();
        if (s - 1.0).abs() > 1e-12 {
            return Err(Error::Numerical(format!("probabilities sum to {s}")));
        }
        Ok(())
    }

    /// Total-variation distance to another distribution.
    pub fn total_variation(&self, other: &Distribution) -> f64 {
        0.5 * self
            .p
            .iter()
            .zip(&other.p)
            .map(|(a, b)| (a - b).abs())
            .sum::<f64>()
    }
}

/// The Gibbs distribution of `model` at inverse temperature `beta`.
pub fn gibbs(model: &IsingModel, beta: f64) -> Distribution {
    let energies = model.all_energies();
    let e_min = energies.iter().cloned().fold(f64::INFINITY, f64::min);
    let w: Vec<f64> = energies.iter().map(|&e| (-beta * (e - e_min)).exp()).collect();
    let z: f64 = w.iter().sum();
    Distribution {
        p: w.into_iter().map(|x| x / z).collect(),
    }
}

/// Closed-form annealing temperature schedules.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum ScheduleKind {
    /// `T(n) = T_i · r^n`, `r = (T_f/T_i)^(1/n_tot)`.
    Exponential,
    /// `T(n) = T_i / (n·r + 1)`, `r = (T_i/T_f − 1)/n_tot`.
    Linear,
    /// `T(n) = T_i / (ln(n+1)·r + 1)`, `r = (T_i/T_f − 1)/ln(n_tot + 1)`.
    Logarithmic,
    /// `T(n) = T_i` for all steps.
    Constant,
}

/// A temperature schedule over `n_tot` discrete steps.
#[derive(Debug, Clone, Copy, Serialize, Deserialize)]
pub struct TemperatureSchedule {
    pub kind: ScheduleKind,
    /// Initial temperature (Ising energy units).
    pub t_i: f64,
    /// Final temperature; `T(n_tot) = t_f` for all non-constant kinds.
    pub t_f: f64,
    /// Total number of steps.
    pub n_tot: usize,
}

impl TemperatureSchedule {
    /// Builds a schedule, validating `T_i ≥ T_f > 0` and `n_tot ≥ 1`.
    pub fn new(kind: ScheduleKind, t_i: f64, t_f: f64, n_tot: usize) -> Result<Self> {
        if !(t_f > 0.0 && t_i >= t_f) {
            return Err(Error::Spec("schedule requires T_i >= T_f > 0".into()));
        }
        if n_tot < 1 {
            return Err(Error::Spec("schedule requires n_tot >= 1".into()));
        }
        Ok(TemperatureSchedule { kind, t_i, t_f, n_tot })
    }

    /// Temperature at step `n ∈ [0, n_tot]`.
    pub fn temperature_at(&self, n: usize) -> Result<f64> {
        if n > self.n_tot {
            return Err(Error::Spec(format!(
                "step {n} out of schedule range 0..={}",
                self.n_tot
            )));
        }
        let nf = n as f64;
        let ntot = self.n_tot as f64;
        Ok(match self.kind {
            ScheduleKind::Exponential => {
                let r = (self.t_f / self.t_i).powf(1.0 / ntot);
                self.t_i * r.powf(nf)
            }
            ScheduleKind::Linear => {
                let r = (self.t_i / self.t_f - 1.0) / ntot;
                self.t_i / (nf * r + 1.0)
            }
            ScheduleKind::Logarithmic => {
                let r = (self.t_i / self.t_f - 1.0) / (ntot + 1.0).ln();
                self.t_i / ((nf + 1.0).ln() * r + 1.0)
            }
            ScheduleKind::Constant => self.t_i,
        })
    }
}

/// Single-spin-flip acceptance rules satisfying detailed balance.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum RuleKind {
    Metropolis,
    Glauber,
}

/// An update rule: acceptance kind plus an attempt-probability prefactor.
#[derive(Debug, Clone, Copy, Serialize, Deserialize)]
pub struct UpdateRule {
    pub kind: RuleKind,
    /// Attempt-probability prefactor in `(0, 1]`.
    pub attempt_scale: f64,
}

impl UpdateRule {
    pub fn new(kind: RuleKind, attempt_scale: f64) -> Result<Self> {
        if !(attempt_scale > 0.0 && attempt_scale <= 1.0) {
            return Err(Error::Spec("attempt_scale must be in (0, 1]".into()));
        }
        Ok(UpdateRule { kind, attempt_scale })
    }

    pub fn metropolis() -> Self {
        UpdateRule { kind: RuleKind::Metropolis, attempt_scale: 1.0 }
    }

    pub fn glauber() -> Self {
        UpdateRule { kind: RuleKind::Glauber, attempt_scale: 1.0 }
    }

    /// Acceptance probability for an energy change `dE`, before the
    /// `1/n_spins` attempt normalization.
    pub fn acceptance(&self, d_e: f64, beta: f64) -> f64 {
        let a = match self.kind {
            RuleKind::Metropolis => (-beta * d_e).exp().min(1.0),
            RuleKind::Glauber => 1.0 / (1.0 + (beta * d_e).exp()),
        };
        self.attempt_scale * a
    }
}

/// Transition weight per unit time for a single-spin flip with energy change
/// `dE`: the rule's acceptance divided by the number of spins.
pub fn transition_weight(rule: &UpdateRule, d_e: f64, beta: f64, n_spins: usize) -> f64 {
    rule.acceptance(d_e, beta) / n_spins as f64
}

/// Precomputed single-flip neighbor structure of a model: for every
/// configuration `k` and spin `j`, the flipped index and energy change.
#[derive(Debug, Clone)]
pub struct MasterEquation {
    pub n_spins: usize,
    pub n_states: usize,
    energies: Vec<f64>,
    /// `neighbor[k * n_spins + j]` = index of `k` with spin `j` flipped.
    neighbor: Vec<usize>,
    /// `d_e[k * n_spins + j]` = `E(neighbor) − E(k)`.
    d_e: Vec<f64>,
}

impl MasterEquation {
    /// Builds the neighbor table by exhaustive enumeration (intended for
    /// n ≤ 24).
    pub fn new(model: &IsingModel) -> Self {
        let n = model.n;
        let n_states = 1usize << n;
        let energies = model.all_energies();
        let mut neighbor = vec![0usize; n_states * n];
        let mut d_e = vec![0.0; n_states * n];
        for k in 0..n_states {
            for j in 0..n {
                let k2 = k ^ (1usize << (n - 1 - j));
                neighbor[k * n + j] = k2;
                d_e[k * n + j] = energies[k2] - energies[k];
            }
        }
        MasterEquation { n_spins: n, n_states, energies, neighbor, d_e }
    }

    /// Energies by configuration index.
    pub fn energies(&self) -> &[f64] {
        &self.energies
    }

    /// Time derivative of the master equation at inverse temperature `beta`:
    /// `ṗ_a = Σ_j [f(E_a − E_{a_j}) p_{a_j} − f(E_{a_j} − E_a) p_a]`.
    pub fn rhs(&self, p: &[f64], rule: &UpdateRule, beta: f64, out: &mut [f64]) {
        let n = self.n_spins;
        let inv_n = 1.0 / n as f64;
        for k in 0..self.n_states {
            let mut acc = 0.0;
            for j in 0..n {
                let k2 = self.neighbor[k * n + j];
                let de = self.d_e[k * n + j];
                acc += rule.acceptance(-de, beta) * p[k2] - rule.acceptance(de, beta) * p[k];
            }
            out[k] = acc * inv_n;
        }
    }

    /// One integration step of length `dt` at fixed `beta`.
    pub fn step(
        &self,
        dist: &Distribution,
        rule: &UpdateRule,
        beta: f64,
        dt: f64,
        method: Integrator,
    ) -> Result<Distribution> {
        let n = self.n_states;
        let p = &dist.p;
        let mut out = vec![0.0; n];
        match method {
            Integrator::Euler => {
                let mut k1 = vec![0.0; n];
                self.rhs(p, rule, beta, &mut k1);
                for i in 0..n {
                    out[i] = p[i] + dt * k1[i];
                }
            }
            Integrator::Rk4 => {
                let mut k1 = vec![0.0; n];
                let mut k2 = vec![0.0; n];
                let mut k3 = vec![0.0; n];
                let mut k4 = vec![0.0; n];
                let mut tmp = vec![0.0; n];
                self.rhs(p, rule, beta, &mut k1);
                for i in 0..n {
                    tmp[i] = p[i] + 0.5 * dt * k1[i];
                }
                self.rhs(&tmp, rule, beta, &mut k2);
                for i in 0..n {
                    tmp[i] = p[i] + 0.5 * dt * k2[i];
                }
                self.rhs(&tmp, rule, beta, &mut k3);
                for i in 0..n {
                    tmp[i] = p[i] + dt * k3[i];
                }
                self.rhs(&tmp, rule, beta, &mut k4);
                for i in 0..n {
                    out[i] = p[i] + dt / 6.0 * (k1[i] + 2.0 * k2[i] + 2.0 * k3[i] + k4[i]);
                }
            }
            Integrator::Discrete => {
                // Exact one-attempt Markov kernel p ← (I + G)p; matches the
                // Monte Carlo chain in distribution, step for step.
                let mut k1 = vec![0.0; n];
                self.rhs(p, rule, beta, &mut k1);
                for i in 0..n {
                    out[i] = p[i] + k1[i];
                }
            }
        }
        if out.iter().any(|&x| x < -1e-12) {
            return Err(Error::Numerical(
                "master-equation step produced a negative probability; reduce dt".into(),
            ));
        }
        Ok(Distribution { p: out })
    }

    /// Dense generator matrix `G` at fixed `beta` with a custom rate function
    /// `f(dE)` (already normalized per attempt): `G[a][b]` is the rate from
    /// `b` into `a`, diagonal entries minus the total outflow.
    pub fn generator_with(&self, f: &dyn Fn(f64) -> f64) -> Vec<Vec<f64>> {
        let n = self.n_spins;
        let m = self.n_states;
        let mut g = vec![vec![0.0; m]; m];
        for b in 0..m {
            for j in 0..n {
                let a = self.neighbor[b * n + j];
                let rate = f(self.energies[a] - self.energies[b]);
                g[a][b] += rate;
                g[b][b] -= rate;
            }
        }
        g
    }

    /// Dense generator for an update rule at inverse temperature `beta`.
    pub fn generator(&self, rule: &UpdateRule, beta: f64) -> Vec<Vec<f64>> {
        let n = self.n_spins as f64;
        self.generator_with(&|de| rule.acceptance(de, beta) / n)
    }
}

/// Time integrator for [`MasterEquation::step`].
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Integrator {
    Euler,
    Rk4,
    /// The one-attempt discrete chain kernel `I + G`.
    Discrete,
}

/// One recorded trajectory point of an annealing run.
#[derive(Debug, Clone, Copy, Serialize)]
pub struct SaSample {
    pub step: usize,
    pub temperature: f64,
    pub p_s: f64,
    pub p_c: f64,
}

/// Result of a master-equation anneal.
#[derive(Debug, Clone)]
pub struct SaRun {
    /// `(step, T, p_s, p_C)` per recorded step; empty when the model has no
    /// unique isolated ground state.
    pub trajectory: Vec<SaSample>,
    /// Final distribution.
    pub dist: Distribution,
}

/// Options for [`anneal_master`].
#[derive(Debug, Clone, Copy)]
pub struct MasterOptions {
    /// Continuous time advanced per schedule step.
    pub dt: f64,
    /// Integration sub-steps per schedule step.
    pub steps_per_temp: usize,
    pub integrator: Integrator,
    /// Initial distribution; `None` means uniform.
    pub start_from: Option<usize>,
}

impl Default for MasterOptions {
    fn default() -> Self {
        MasterOptions { dt: 0.5, steps_per_temp: 1, integrator: Integrator::Rk4, start_from: None }
    }
}

/// Integrates the master equation along a temperature schedule, recording
/// `p_s` and `p_C = (1/16)Σ p_i` when the model has an isolated ground state.
pub fn anneal_master(
    model: &IsingModel,
    rule: &UpdateRule,
    schedule: &TemperatureSchedule,
    opts: &MasterOptions,
) -> Result<SaRun> {
    let me = MasterEquation::new(model);
    let gs = ground_space(model)?;
    let stats = gs.sole_isolated().ok().map(|iso| (iso, gs.cluster.clone()));
    let mut dist = match opts.start_from {
        Some(k) => Distribution::point(me.n_states, k),
        None => Distribution::uniform(me.n_states),
    };
    let mut trajectory = Vec::with_capacity(schedule.n_tot + 1);
    let record =
        |dist: &Distribution, n: usize, t: f64, traj: &mut Vec<SaSample>| {
            if let Some((iso, cluster)) = &stats {
                let p_s = dist.p[*iso];
                let p_c =
                    cluster.iter().map(|&k| dist.p[k]).sum::<f64>() / cluster.len() as f64;
                traj.push(SaSample { step: n, temperature: t, p_s, p_c });
            }
        };
    record(&dist, 0, schedule.temperature_at(0)?, &mut trajectory);
    for n in 0..schedule.n_tot {
        let t = schedule.temperature_at(n)?;
        let beta = 1.0 / t;
        for _ in 0..opts.steps_per_temp {
            dist = me.step(&dist, rule, beta, opts.dt, opts.integrator)?;
        }
        record(&dist, n + 1, t, &mut trajectory);
    }
    Ok(SaRun { trajectory, dist })
}

/// Stochastic single-spin-flip annealing. One schedule step is one attempted
/// flip of a uniformly chosen spin; deterministic under a fixed seed. Reads
/// start from `start` when given, else from uniformly random configurations.
pub fn anneal_mc(
    model: &IsingModel,
    rule: &UpdateRule,
    schedule: &TemperatureSchedule,
    n_reads: usize,
    seed: u64,
    start: Option<usize>,
) -> Result<Distribution> {
    if n_reads < 1 {
        return Err(Error::Spec("n_reads must be >= 1".into()));
    }
    let me = MasterEquation::new(model);
    let n = me.n_spins;
    let mut counts = vec![0usize; me.n_states];
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    // Precompute per-step inverse temperatures once.
    let betas: Vec<f64> = (0..schedule.n_tot)
        .map(|s| schedule.temperature_at(s).map(|t| 1.0 / t))
        .collect::<Result<_>>()?;
    for _ in 0..n_reads {
        let mut k = start.unwrap_or_else(|| rng.gen_range(0..me.n_states));
        for &beta in &betas {
            let j = rng.gen_range(0..n);
            let de = me.d_e[k * n + j];
            if rng.gen::<f64>() < rule.acceptance(de, beta) {
                k = me.neighbor[k * n + j];
            }
        }
        counts[k] += 1;
    }
    Ok(Distribution {
        p: counts.iter().map(|&c| c as f64 / n_reads as f64).collect(),
    })
}

/// `(p_s, p_C)` of a distribution with respect to a ground-space partition.
pub fn cluster_stats(dist: &Distribution, gs: &GroundSpace) -> Result<(f64, f64)> {
    let iso = gs.sole_isolated()?;
    let p_s = dist.p[iso];
    let p_c = gs.cluster.iter().map(|&k| dist.p[k]).sum::<f64>() / gs.cluster.len() as f64;
    Ok((p_s, p_c))
}

/// The four-level reduced rate model: isolated state, per-cluster-state
/// average, the energy −4 plateau, and the energy 0 level.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ReducedState {
    pub p_s: f64,
    pub p_c: f64,
    pub p_e: f64,
    pub p_0: f64,
}

/// Advances the reduced rate equations by `dt` (forward Euler) with rate
/// function `f(dE)`:
/// `ṗ_s = 8 f(−4) p_e − 8 f(4) p_s` and
/// `ṗ_C = 2 (f(−4) p_e − f(4) p_C + f(−8) p_0 − f(8) p_C)`.
/// With `dominant_only` the `p_0` exchange terms are dropped.
pub fn reduced_step(
    state: &ReducedState,
    f: &dyn Fn(f64) -> f64,
    dt: f64,
    dominant_only: bool,
) -> ReducedState {
    let (ds, dc) = reduced_rhs(state, f, dominant_only);
    ReducedState {
        p_s: state.p_s + dt * ds,
        p_c: state.p_c + dt * dc,
        p_e: state.p_e,
        p_0: state.p_0,
    }
}

/// Instantaneous `(ṗ_s, ṗ_C)` of the reduced model.
pub fn reduced_rhs(state: &ReducedState, f: &dyn Fn(f64) -> f64, dominant_only: bool) -> (f64, f64) {
    let ds = 8.0 * f(-4.0) * state.p_e - 8.0 * f(4.0) * state.p_s;
    let mut dc = f(-4.0) * state.p_e - f(4.0) * state.p_c;
    if !dominant_only {
        dc += f(-8.0) * state.p_0 - f(8.0) * state.p_c;
    }
    (ds, 2.0 * dc)
}
