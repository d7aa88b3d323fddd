//! Classical Ising instances: energetics, spectra, ground spaces, gauges,
//! and unit-cell hardware embeddings.
//!
//! The reference instance has four "core" spins on a square with local field
//! +1 and four pendant "ancilla" spins with local field −1, all eight
//! couplings ferromagnetic (+1). Its ground space is 17-fold degenerate: a
//! 16-state cluster (cores up, ancillae free) plus one isolated all-down
//! state reachable from the cluster only by flipping at least four spins.

use std::collections::BTreeMap;
use std::path::Path;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Exhaustive-enumeration bound: `full_spectrum` refuses models with more
/// spins than this unless a custom bound is supplied.
pub const DEFAULT_ENUMERATION_BOUND: usize = 24;

/// An Ising instance: local fields `h` and pairwise couplings `J` on a
/// labeled graph. Energy of a configuration `s ∈ {±1}^n` is
/// `E(s) = −Σ_j h_j s_j − Σ_{(j,k)} J_jk s_j s_k`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct IsingModel {
    /// Number of spins.
    pub n: usize,
    /// Local field per spin.
    pub h: Vec<f64>,
    /// Couplings as `(i, j, J_ij)` with `i < j`, no duplicates.
    pub couplings: Vec<(usize, usize, f64)>,
}

/// A classical spin configuration over `{+1, −1}`, spin-up = +1.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct SpinConfig {
    /// One entry per spin, each `+1` or `−1`.
    pub bits: Vec<i8>,
}

impl SpinConfig {
    /// Builds a configuration, validating entries are ±1.
    pub fn new(bits: Vec<i8>) -> Result<Self> {
        if bits.iter().any(|&b| b != 1 && b != -1) {
            return Err(Error::Dimension("spin values must be +1 or -1".into()));
        }
        Ok(SpinConfig { bits })
    }

    /// Decodes configuration index `k` for an `n`-spin model. Spin `j`
    /// occupies bit `n−1−j`; a cleared bit means spin-up (+1).
    pub fn from_index(k: usize, n: usize) -> Self {
        let bits = (0..n)
            .map(|j| if (k >> (n - 1 - j)) & 1 == 0 { 1 } else { -1 })
            .collect();
        SpinConfig { bits }
    }

    /// Inverse of [`SpinConfig::from_index`].
    pub fn to_index(&self) -> usize {
        let n = self.bits.len();
        self.bits
            .iter()
            .enumerate()
            .filter(|(_, &b)| b == -1)
            .map(|(j, _)| 1usize << (n - 1 - j))
            .sum()
    }

    /// Number of spins on which `self` and `other` differ.
    pub fn hamming(&self, other: &SpinConfig) -> usize {
        self.bits
            .iter()
            .zip(&other.bits)
            .filter(|(a, b)| a != b)
            .count()
    }
}

/// Flips the spins listed in `flips` within configuration index `k`.
pub fn flip_index(k: usize, n: usize, flips: &[usize]) -> usize {
    let mask: usize = flips.iter().map(|&j| 1usize << (n - 1 - j)).sum();
    k ^ mask
}

impl IsingModel {
    /// Builds a model, validating index bounds and coupling uniqueness.
    pub fn new(n: usize, h: Vec<f64>, couplings: Vec<(usize, usize, f64)>) -> Result<Self> {
        if h.len() != n {
            return Err(Error::Dimension(format!(
                "h has length {}, expected {}",
                h.len(),
                n
            )));
        }
        let mut seen = std::collections::HashSet::new();
        for &(i, j, _) in &couplings {
            if i >= j {
                return Err(Error::Spec(format!("coupling ({i},{j}) must have i < j")));
            }
            if j >= n {
                return Err(Error::Dimension(format!("coupling index {j} out of range")));
            }
            if !seen.insert((i, j)) {
                return Err(Error::Spec(format!("duplicate coupling ({i},{j})")));
            }
        }
        Ok(IsingModel { n, h, couplings })
    }

    /// The 8-spin reference instance: core spins 0–3 (h = +1) on a square,
    /// pendant ancillae 4–7 (h = −1), all couplings +1.
    pub fn reference() -> Self {
        let h = vec![1.0, 1.0, 1.0, 1.0, -1.0, -1.0, -1.0, -1.0];
        let couplings = vec![
            (0, 1, 1.0),
            (1, 2, 1.0),
            (2, 3, 1.0),
            (0, 3, 1.0),
            (0, 4, 1.0),
            (1, 5, 1.0),
            (2, 6, 1.0),
            (3, 7, 1.0),
        ];
        IsingModel::new(8, h, couplings).expect("reference model is valid")
    }

    /// Energy of a configuration.
    pub fn energy(&self, config: &SpinConfig) -> Result<f64> {
        if config.bits.len() != self.n {
            return Err(Error::Dimension(format!(
                "config has {} spins, model has {}",
                config.bits.len(),
                self.n
            )));
        }
        let s = &config.bits;
        let mut e = 0.0;
        for (j, &hj) in self.h.iter().enumerate() {
            e -= hj * f64::from(s[j]);
        }
        for &(i, j, v) in &self.couplings {
            e -= v * f64::from(s[i]) * f64::from(s[j]);
        }
        Ok(e)
    }

    /// Energy of the configuration with index `k` (see
    /// [`SpinConfig::from_index`] for the bit convention).
    pub fn energy_of_index(&self, k: usize) -> f64 {
        let spin = |j: usize| -> f64 {
            if (k >> (self.n - 1 - j)) & 1 == 0 {
                1.0
            } else {
                -1.0
            }
        };
        let mut e = 0.0;
        for (j, &hj) in self.h.iter().enumerate() {
            e -= hj * spin(j);
        }
        for &(i, j, v) in &self.couplings {
            e -= v * spin(i) * spin(j);
        }
        e
    }

    /// Energies of all `2^n` configurations, indexed by configuration index.
    pub fn all_energies(&self) -> Vec<f64> {
        (0..1usize << self.n)
            .map(|k| self.energy_of_index(k))
            .collect()
    }

    /// Applies a spin-inversion gauge: `h_j → −h_j` for flipped spins and
    /// `J_jk → −J_jk` when exactly one endpoint is flipped. The spectrum is
    /// preserved; configurations map by flipping the same spins.
    pub fn apply_gauge(&self, flips: &[usize]) -> Result<Self> {
        if let Some(&j) = flips.iter().find(|&&j| j >= self.n) {
            return Err(Error::Dimension(format!("gauge index {j} out of range")));
        }
        let flipped = |j: usize| flips.contains(&j);
        let h = self
            .h
            .iter()
            .enumerate()
            .map(|(j, &hj)| if flipped(j) { -hj } else { hj })
            .collect();
        let couplings = self
            .couplings
            .iter()
            .map(|&(i, j, v)| {
                if flipped(i) != flipped(j) {
                    (i, j, -v)
                } else {
                    (i, j, v)
                }
            })
            .collect();
        IsingModel::new(self.n, h, couplings)
    }

    /// Adds `+delta` to each core local field of the reference instance (or a
    /// gauge of it), raising the isolated-state energy by `4·delta` and
    /// lowering the cluster energy by the same amount.
    pub fn perturb_isolated(&self, delta: f64) -> Result<Self> {
        if self.n != 8 {
            return Err(Error::UnsupportedTopology(
                "perturb_isolated requires the 8-spin reference instance".into(),
            ));
        }
        if delta < 0.0 {
            return Err(Error::Spec("perturbation delta must be >= 0".into()));
        }
        let mut h = self.h.clone();
        for (j, hj) in h.iter_mut().enumerate().take(4) {
            // Preserve gauge direction: the core field keeps its sign, the
            // perturbation strengthens it away from the isolated state.
            *hj += delta * self.h[j].signum();
        }
        IsingModel::new(self.n, h, self.couplings.clone())
    }

    /// Reads a model from the JSON schema `{n, h, couplings: [[i, j, J]]}`.
    pub fn from_json(json: &str) -> Result<Self> {
        let raw: ModelFile = serde_json::from_str(json)?;
        let couplings = raw
            .couplings
            .into_iter()
            .map(|c| (c.0, c.1, c.2))
            .collect();
        IsingModel::new(raw.n, raw.h, couplings)
    }

    /// Reads a model from a JSON file.
    pub fn from_path(path: &Path) -> Result<Self> {
        Self::from_json(&std::fs::read_to_string(path)?)
    }

    /// Serializes to the JSON model schema.
    pub fn to_json(&self) -> String {
        let raw = ModelFile {
            n: self.n,
            h: self.h.clone(),
            couplings: self
                .couplings
                .iter()
                .map(|&(i, j, v)| (i, j, v))
                .collect(),
        };
        serde_json::to_string_pretty(&raw).expect("model serializes")
    }
}

#[derive(Serialize, Deserialize)]
struct ModelFile {
    n: usize,
    h: Vec<f64>,
    couplings: Vec<(usize, usize, f64)>,
}

/// The exact spectrum of a model: energies ascending, with every
/// configuration listed under its energy.
#[derive(Debug, Clone)]
pub struct SpectrumTable {
    /// `(energy, configuration indices)` pairs, energies strictly ascending.
    pub entries: Vec<(f64, Vec<usize>)>,
}

impl SpectrumTable {
    /// `(energy, multiplicity)` rows.
    pub fn histogram(&self) -> Vec<(f64, usize)> {
        self.entries.iter().map(|(e, cs)| (*e, cs.len())).collect()
    }

    /// Total number of configurations across all levels.
    pub fn total(&self) -> usize {
        self.entries.iter().map(|(_, cs)| cs.len()).sum()
    }
}

/// Exhaustively enumerates the spectrum of `model` (all `2^n` configs).
pub fn full_spectrum(model: &IsingModel) -> Result<SpectrumTable> {
    full_spectrum_with_bound(model, DEFAULT_ENUMERATION_BOUND)
}

/// As [`full_spectrum`] with an explicit spin-count bound.
pub fn full_spectrum_with_bound(model: &IsingModel, bound: usize) -> Result<SpectrumTable> {
    if model.n > bound {
        return Err(Error::Capacity(format!(
            "exhaustive enumeration limited to {bound} spins, model has {}",
            model.n
        )));
    }
    // Energies of the reference family are exact in f64 (integers plus small
    // rationals), so grouping by ordered bits is stable.
    let mut groups: BTreeMap<u64, (f64, Vec<usize>)> = BTreeMap::new();
    for k in 0..1usize << model.n {
        let e = model.energy_of_index(k);
        // Total-order key for f64 (all energies are finite).
        let bits = e.to_bits();
        let key = if e >= 0.0 { bits ^ (1 << 63) } else { !bits };
        groups.entry(key).or_insert_with(|| (e, Vec::new())).1.push(k);
    }
    Ok(SpectrumTable {
        entries: groups.into_values().collect(),
    })
}

/// Ground space of a model, partitioned into single-flip-connected clusters
/// and isolated states.
#[derive(Debug, Clone)]
pub struct GroundSpace {
    /// The minimum energy.
    pub energy: f64,
    /// All ground configuration indices, ascending.
    pub states: Vec<usize>,
    /// Ground states whose single-flip component within the ground set has
    /// size 1.
    pub isolated: Vec<usize>,
    /// The remaining ground states.
    pub cluster: Vec<usize>,
}

impl GroundSpace {
    /// The unique isolated state, if there is exactly one.
    pub fn sole_isolated(&self) -> Result<usize> {
        match self.isolated.as_slice() {
            [k] => Ok(*k),
            other => Err(Error::UndefinedIsolated(format!(
                "expected exactly one isolated ground state, found {}",
                other.len()
            ))),
        }
    }
}

/// Computes the ground space and its single-flip partition.
pub fn ground_space(model: &IsingModel) -> Result<GroundSpace> {
    let spectrum = full_spectrum(model)?;
    let (energy, states) = spectrum.entries[0].clone();
    let in_ground: std::collections::HashSet<usize> = states.iter().copied().collect();

    // Union-find over ground states under single spin-flips.
    let index_of: std::collections::HashMap<usize, usize> =
        states.iter().enumerate().map(|(i, &k)| (k, i)).collect();
    let mut parent: Vec<usize> = (0..states.len()).collect();
    fn find(parent: &mut Vec<usize>, i: usize) -> usize {
        if parent[i] != i {
            let r = find(parent, parent[i]);
            parent[i] = r;
        }
        parent[i]
    }
    for (i, &k) in states.iter().enumerate() {
        for j in 0..model.n {
            let k2 = flip_index(k, model.n, &[j]);
            if in_ground.contains(&k2) {
                let i2 = index_of[&k2];
                let (ri, ri2) = (find(&mut parent, i), find(&mut parent, i2));
                parent[ri] = ri2;
            }
        }
    }
    let mut comp_size: std::collections::HashMap<usize, usize> = std::collections::HashMap::new();
    for i in 0..states.len() {
        *comp_size.entry(find(&mut parent, i)).or_insert(0) += 1;
    }
    let mut isolated = Vec::new();
    let mut cluster = Vec::new();
    for (i, &k) in states.iter().enumerate() {
        if comp_size[&find(&mut parent, i)] == 1 {
            isolated.push(k);
        } else {
            cluster.push(k);
        }
    }
    Ok(GroundSpace {
        energy,
        states,
        isolated,
        cluster,
    })
}

/// Deterministic non-increasing descent to a ground state.
///
/// For 8-spin instances this follows the constructive order that proves the
/// reference landscape has no local minima: flip each ancilla down when that
/// does not raise the energy, then move core spins toward the core majority
/// (ties toward all-down) one non-raising flip at a time. Other models fall
/// back to steepest single-flip descent.
pub fn greedy_descent(model: &IsingModel, start: &SpinConfig) -> Result<SpinConfig> {
    let mut s = start.clone();
    let mut e = model.energy(&s)?;
    if model.n == 8 {
        // Phase 1: ancillae down first.
        for j in 4..8 {
            if s.bits[j] == 1 {
                s.bits[j] = -1;
                let e2 = model.energy(&s)?;
                if e2 <= e {
                    e = e2;
                } else {
                    s.bits[j] = 1;
                }
            }
        }
        // Phase 2: core majority vote, ties toward all-down, realized as
        // non-raising single flips until stable.
        let ups = s.bits[..4].iter().filter(|&&b| b == 1).count();
        let target: i8 = if ups > 2 { 1 } else { -1 };
        loop {
            let mut changed = false;
            for j in 0..4 {
                if s.bits[j] != target {
                    s.bits[j] = target;
                    let e2 = model.energy(&s)?;
                    if e2 <= e {
                        e = e2;
                        changed = true;
                    } else {
                        s.bits[j] = -target;
                    }
                }
            }
            if !changed {
                break;
            }
        }
        return Ok(s);
    }
    // Generic steepest descent for other models.
    loop {
        let mut best: Option<(usize, f64)> = None;
        for j in 0..model.n {
            s.bits[j] = -s.bits[j];
            let e2 = model.energy(&s)?;
            s.bits[j] = -s.bits[j];
            if e2 < e - 1e-12 && best.map_or(true, |(_, be)| e2 < be) {
                best = Some((j, e2));
            }
        }
        match best {
            Some((j, e2)) => {
                s.bits[j] = -s.bits[j];
                e = e2;
            }
            None => return Ok(s),
        }
    }
}

/// An embedding of the 8 logical spins onto the `K4,4` unit-cell vertices.
///
/// `assignment[logical] = vertex`, vertices 0–3 one partition side, 4–7 the
/// other. Embeddings are counted up to the hardware configuration they
/// induce: two vertex bijections that program identical fields and couplings
/// onto the cell are the same embedding.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct Embedding {
    /// Vertex assigned to each logical spin.
    pub assignment: Vec<usize>,
}

/// Result of [`enumerate_embeddings`]: canonical embeddings plus the raw
/// count of vertex bijections before hardware-configuration deduplication.
#[derive(Debug, Clone)]
pub struct EmbeddingSet {
    /// One canonical representative per induced hardware configuration.
    pub embeddings: Vec<Embedding>,
    /// Number of valid vertex bijections (each embedding admits several).
    pub raw_assignments: usize,
}

/// Edges of the `K4,4` unit cell (partition sides {0..3} and {4..7}).
pub fn k44_edges() -> Vec<(usize, usize)> {
    let mut edges = Vec::with_capacity(16);
    for a in 0..4 {
        for b in 4..8 {
            edges.push((a, b));
        }
    }
    edges
}

/// Enumerates all embeddings of an 8-spin model into the `K4,4` unit cell.
///
/// Every logical coupling must map onto a cell edge; embeddings are
/// deduplicated by the induced hardware `(h, J)` configuration. The
/// reference instance yields exactly 144.
pub fn enumerate_embeddings(model: &IsingModel) -> Result<EmbeddingSet> {
    if model.n != 8 {
        return Err(Error::UnsupportedTopology(format!(
            "K4,4 unit-cell embedding requires 8 spins, model has {}",
            model.n
        )));
    }
    let opposite_sides = |u: usize, v: usize| (u < 4) != (v < 4);
    let mut raw = 0usize;
    let mut by_config: BTreeMap<String, Embedding> = BTreeMap::new();

    let mut perm: Vec<usize> = (0..8).collect();
    permute_all(&mut perm, 0, &mut |perm| {
        if model
            .couplings
            .iter()
            .all(|&(i, j, _)| opposite_sides(perm[i], perm[j]))
        {
            raw += 1;
            // Hardware configuration: field per vertex, coupling per edge.
            let mut hv = [0.0f64; 8];
            for (logical, &vertex) in perm.iter().enumerate() {
                hv[vertex] = model.h[logical];
            }
            let mut jv: BTreeMap<(usize, usize), f64> = BTreeMap::new();
            for &(i, j, v) in &model.couplings {
                let (a, b) = (perm[i].min(perm[j]), perm[i].max(perm[j]));
                jv.insert((a, b), v);
            }
            let key = format!("{hv:?}|{jv:?}");
            by_config.entry(key).or_insert_with(|| Embedding {
                assignment: perm.to_vec(),
            });
        }
    });

    Ok(EmbeddingSet {
        embeddings: by_config.into_values().collect(),
        raw_assignments: raw,
    })
}

/// Visits all permutations of `v[k..]` (Heap-style recursion, lexicographic
/// enough for deterministic canonical picks).
fn permute_all(v: &mut Vec<usize>, k: usize, visit: &mut impl FnMut(&[usize])) {
    if k == v.len() {
        visit(v);
        return;
    }
    for i in k..v.len() {
        v.swap(k, i);
        permute_all(v, k + 1, visit);
        v.swap(k, i);
    }
}
