//! Gauge-averaged sweeps with inversion pairing.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::Serialize;

use crate::error::Result;
use crate::harness::stats::{box_stats, BoxStats};
use crate::ising::{flip_index, ground_space, IsingModel};
use crate::sa::Distribution;

/// A spin-inversion gauge, as the sorted list of flipped spins.
#[derive(Debug, Clone, Serialize)]
pub struct Gauge {
    pub flips: Vec<usize>,
}

impl Gauge {
    pub fn identity() -> Self {
        Gauge { flips: Vec::new() }
    }

    /// The complementary gauge (this gauge composed with full inversion).
    pub fn inverted(&self, n: usize) -> Self {
        Gauge { flips: (0..n).filter(|j| !self.flips.contains(j)).collect() }
    }

    /// Maps a computational index of the ungauged model into the gauged one.
    pub fn map_index(&self, k: usize, n: usize) -> usize {
        flip_index(k, n, &self.flips)
    }
}

/// Draws `count` random gauges (each spin flipped with probability ½).
pub fn random_gauges(n: usize, count: usize, seed: u64) -> Vec<Gauge> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    (0..count)
        .map(|_| Gauge { flips: (0..n).filter(|_| rng.gen_bool(0.5)).collect() })
        .collect()
}

/// Result of one gauge (plus inversion partner) evaluation.
#[derive(Debug, Clone, Serialize)]
pub struct GaugeResult {
    pub gauge: Gauge,
    /// `p_s` of the gauge and of its full-inversion partner, mapped back to
    /// the ungauged isolated configuration.
    pub p_s: f64,
    pub p_s_inverted: f64,
    /// Inversion-paired average `(p_s + p_s_inverted) / 2`.
    pub p_s_paired: f64,
    /// Mean cluster probability of the gauged run.
    pub p_c: f64,
}

/// Summary of a gauge-averaged sweep point.
#[derive(Debug, Clone, Serialize)]
pub struct GaugeSweep {
    pub results: Vec<GaugeResult>,
    pub paired_box: BoxStats,
}

/// Runs `engine` on every gauged model and its full-inversion partner, maps
/// the isolated/cluster probabilities back through the gauge, and summarizes
/// the inversion-paired `p_s` over gauges.
///
/// `engine` receives the gauged model and must return the final
/// computational-basis distribution; it must be deterministic for the exact
/// gauge-covariance contracts to hold.
pub fn gauge_averaged_sweep<F>(model: &IsingModel, gauges: &[Gauge], engine: F) -> Result<GaugeSweep>
where
    F: Fn(&IsingModel) -> Result<Distribution> + Sync,
{
    let gs = ground_space(model)?;
    let iso = gs.sole_isolated()?;
    let n = model.n;
    let results: Vec<GaugeResult> = gauges
        .par_iter()
        .map(|gauge| -> Result<GaugeResult> {
            let partner = gauge.inverted(n);
            let d1 = engine(&model.apply_gauge(&gauge.flips)?)?;
            let d2 = engine(&model.apply_gauge(&partner.flips)?)?;
            let p_s = d1.p[gauge.map_index(iso, n)];
            let p_s_inverted = d2.p[partner.map_index(iso, n)];
            let p_c = gs
                .cluster
                .iter()
                .map(|&k| d1.p[gauge.map_index(k, n)])
                .sum::<f64>()
                / gs.cluster.len() as f64;
            Ok(GaugeResult {
                gauge: gauge.clone(),
                p_s,
                p_s_inverted,
                p_s_paired: 0.5 * (p_s + p_s_inverted),
                p_c,
            })
        })
        .collect::<Result<Vec<_>>>()?;
    let paired: Vec<f64> = results.iter().map(|r| r.p_s_paired).collect();
    Ok(GaugeSweep { paired_box: box_stats(&paired)?, results })
}

/// Installs the rayon global thread pool honoring `ANNEAL_SIG_THREADS`.
/// Safe to call more than once; later calls are no-ops.
pub fn init_thread_pool() {
    if let Ok(v) = std::env::var("ANNEAL_SIG_THREADS") {
        if let Ok(k) = v.parse::<usize>() {
            let _ = rayon::ThreadPoolBuilder::new().num_threads(k.max(1)).build_global();
        }
    }
}
