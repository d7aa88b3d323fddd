//! The adiabatic weak-coupling-limit (WCL) Lindblad master equation.
//!
//! The rotating-wave generator is built in the instantaneous eigenbasis of
//! `H(t)` with Bohr frequencies merged into bins of width `1e−8·‖H‖`: the
//! jump operators are the frequency components `A_α(ω) = Σ P_a A_α P_b`
//! over bin pairs at gap `ω` (Davies form). Binning makes the generator
//! depend only on the spectral projectors, never on the arbitrary choice of
//! eigenvectors inside a degenerate level — the dynamics is well defined
//! and exactly covariant under spin relabelings and inversion gauges.
//!
//! For a non-degenerate spectrum every bin is a single state and the
//! generator is elementwise: populations follow a classical rate matrix
//! with `W[a,b] = Σ_α γ(ω_ab)|⟨a|A_α|b⟩|²` (`ω_ab = E_b − E_a`, so KMS
//! rates give the Gibbs fixed point), and each coherence decays as
//! `ρ̇_ab = (−i·ω_ab − ½(Γ_a + Γ_b) − d_ab)·ρ_ab` with the ω = 0 dephasing
//! block `d_ab = ½γ(0)Σ_α(⟨a|A_α|a⟩ − ⟨b|A_α|b⟩)²`. With degenerate bins
//! the population sector enlarges to the bin-diagonal blocks of ρ
//! (populations plus intra-bin coherences), propagated exactly by a real
//! matrix exponential in Hermitian coordinates; coherences between distinct
//! bins evolve by per-block contraction maps. The ω = 0 cross-gain on a
//! coherence block is kept exactly up to block size 64 and dropped beyond
//! (slight overdamping of those coherences only; populations are exact).
//! Run cost is independent of the total anneal time, which keeps
//! slow-anneal sweeps tractable. The Lamb shift is omitted.

use nalgebra::{DMatrix, DVector};
use num_complex::Complex64;

use crate::error::{Error, Result};
use crate::ising::IsingModel;
use crate::quantum::bath::BathSpec;
use crate::quantum::expm::expm;
use crate::quantum::hamiltonian::{canonicalize_degenerate, sorted_eigh, HamiltonianBuilder};
use crate::quantum::schedule::AnnealScheduleQ;
use crate::quantum::state::DensityMatrix;

/// Per-qubit system-bath coupling operators.
#[derive(Debug, Clone, Copy, PartialEq, Eq, serde::Serialize, serde::Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum WclCoupling {
    /// Independent `σ_j^z` baths (dephasing-type in the computational basis,
    /// relaxational in the instantaneous eigenbasis). This is the default.
    SigmaZPerQubit,
    /// Independent `σ_j^±` baths (the coupling whose `t = T` reduction is the
    /// classical single-spin-flip master equation).
    SigmaPmPerQubit,
}

/// The frozen-`t` WCL generator in the instantaneous eigenbasis.
#[derive(Debug, Clone)]
pub struct WclGenerator {
    /// Instantaneous eigenvalues, ascending, rad/ns.
    pub energies: DVector<f64>,
    /// Eigenbasis columns (computational → eigen).
    pub basis: DMatrix<f64>,
    /// `rates[(a,b)]` = population transition rate `b → a`, zero diagonal.
    pub rates: DMatrix<f64>,
    /// Total escape rate `Γ_b = Σ_a rates[(a,b)]`.
    pub escape: DVector<f64>,
    /// Extra coherence decay from the ω = 0 dephasing channels.
    pub dephasing: DMatrix<f64>,
}

impl WclGenerator {
    /// Builds the generator from an instantaneous eigensystem.
    pub fn from_spectrum(
        energies: DVector<f64>,
        basis: DMatrix<f64>,
        bath: &BathSpec,
        coupling: WclCoupling,
        n_qubits: usize,
    ) -> Self {
        let dim = energies.len();
        let mut rates = DMatrix::zeros(dim, dim);
        let mut dephasing = DMatrix::zeros(dim, dim);
        let gamma0 = bath.gamma(0.0);

        // γ(ω_ab) lookup for the elementwise products below.
        let mut gam = DMatrix::zeros(dim, dim);
        for a in 0..dim {
            for b in 0..dim {
                gam[(a, b)] = bath.gamma(energies[b] - energies[a]);
            }
        }

        for abar in channel_abars(&basis, coupling, n_qubits) {
            for a in 0..dim {
                for b in 0..dim {
                    if a != b {
                        rates[(a, b)] += gam[(a, b)] * abar[(a, b)] * abar[(a, b)];
                    }
                }
            }
            for a in 0..dim {
                for b in 0..dim {
                    let d = abar[(a, a)] - abar[(b, b)];
                    dephasing[(a, b)] += 0.5 * gamma0 * d * d;
                }
            }
        }

        let escape = DVector::from_iterator(dim, (0..dim).map(|b| rates.column(b).sum()));
        WclGenerator { energies, basis, rates, escape, dephasing }
    }

    /// The classical population sub-generator `G = rates − diag(Γ)` (columns
    /// sum to zero).
    pub fn population_generator(&self) -> DMatrix<f64> {
        let mut g = self.rates.clone();
        for b in 0..g.ncols() {
            g[(b, b)] -= self.escape[b];
        }
        g
    }

    /// Largest total population transition rate; zero means the closed limit.
    pub fn max_rate(&self) -> f64 {
        self.escape.amax()
    }
}

/// Eigenbasis representations `Ā_α = VᵀA_αV` of the per-qubit coupling
/// operators.
fn channel_abars(
    basis: &DMatrix<f64>,
    coupling: WclCoupling,
    n_qubits: usize,
) -> Vec<DMatrix<f64>> {
    let dim = basis.nrows();
    let mut abars = Vec::new();
    match coupling {
        WclCoupling::SigmaZPerQubit => {
            for j in 0..n_qubits {
                // Ā = Vᵀ·diag(z_j)·V via row scaling.
                let mut x = basis.clone();
                for k in 0..dim {
                    if (k >> (n_qubits - 1 - j)) & 1 == 1 {
                        for c in 0..dim {
                            x[(k, c)] = -x[(k, c)];
                        }
                    }
                }
                abars.push(basis.tr_mul(&x));
            }
        }
        WclCoupling::SigmaPmPerQubit => {
            for j in 0..n_qubits {
                // Raising operator: sends spin j down → up, i.e. maps the
                // basis index with bit set to the index with bit clear.
                let bit = 1usize << (n_qubits - 1 - j);
                let mut x = DMatrix::zeros(dim, dim);
                for b in 0..dim {
                    if b & bit != 0 {
                        for c in 0..dim {
                            x[(b ^ bit, c)] = basis[(b, c)];
                        }
                    }
                }
                let raise = basis.tr_mul(&x);
                let lower = raise.transpose();
                abars.push(raise);
                abars.push(lower);
            }
        }
    }
    abars
}

/// Consecutive eigenvalues within `1e−8·max(1, ‖E‖_∞)` merged into
/// `(start, len)` bins.
fn energy_bins(energies: &DVector<f64>) -> Vec<(usize, usize)> {
    let d = energies.len();
    let scale = energies.iter().fold(1.0_f64, |m, &e| m.max(e.abs()));
    let tol = 1e-8 * scale;
    let mut bins = Vec::new();
    let mut start = 0;
    while start < d {
        let mut end = start + 1;
        while end < d && energies[end] - energies[end - 1] <= tol {
            end += 1;
        }
        bins.push((start, end - start));
        start = end;
    }
    bins
}

/// Builds the WCL generator of `H(t)` for a model, schedule, bath, and
/// coupling choice.
pub fn build_wcl_generator(
    model: &IsingModel,
    sched: &AnnealScheduleQ,
    bath: &BathSpec,
    t: f64,
    coupling: WclCoupling,
) -> Result<WclGenerator> {
    let builder = HamiltonianBuilder::new(model);
    let (energies, mut basis) = sorted_eigh(&builder.at(sched, t)?);
    canonicalize_degenerate(&energies, &mut basis);
    Ok(WclGenerator::from_spectrum(energies, basis, bath, coupling, model.n))
}

/// Largest coherence block (`m_i·m_j`) for which the ω = 0 cross-gain is
/// kept exactly; larger blocks fall back to one-sided contraction, which
/// only overdamps those coherences (populations are unaffected).
const CROSS_GAIN_CAP: usize = 64;

/// Coherence-block contraction over one refresh interval for a bin pair.
enum CoherenceMap {
    /// `exp(rate·dt)` for a 1×1 block (both bins non-degenerate).
    Scalar(f64),
    /// `expm(M·dt)` acting on the column-stacked block.
    Kron(DMatrix<f64>),
    /// `E_i X E_j` one-sided contraction (cross-gain dropped).
    OneSided(DMatrix<f64>, DMatrix<f64>),
}

/// Exact dissipative propagators for one refresh interval of the
/// frequency-binned (Davies) WCL dynamics at a frozen eigensystem. The
/// construction uses only the spectral projectors of the binned Hamiltonian,
/// so it is independent of the eigenvector choice inside degenerate bins.
struct BinnedInterval {
    bins: Vec<(usize, usize)>,
    /// Global `(r, c)` (`r ≤ c`) coordinates of the bin-diagonal sector.
    sym_coords: Vec<(usize, usize)>,
    asym_coords: Vec<(usize, usize)>,
    /// `exp(L·dt)` on the symmetric / antisymmetric Hermitian coordinates.
    p_sym: DMatrix<f64>,
    p_asym: DMatrix<f64>,
    /// Per bin pair `(i, j)` with `i < j`, in iteration order.
    coh: Vec<CoherenceMap>,
    /// All channel rates vanish (decoupled bath): skip dissipation.
    decoupled: bool,
}

impl BinnedInterval {
    fn new(
        energies: &DVector<f64>,
        abars: &[DMatrix<f64>],
        bath: &BathSpec,
        dt: f64,
    ) -> BinnedInterval {
        let bins = energy_bins(energies);
        let nb = bins.len();
        let ebin: Vec<f64> = bins
            .iter()
            .map(|&(s0, m)| (0..m).map(|k| energies[s0 + k]).sum::<f64>() / m as f64)
            .collect();
        // gam[(a, b)]: rate scale of the bin-b → bin-a transfer.
        let mut gam = DMatrix::zeros(nb, nb);
        for a in 0..nb {
            for b in 0..nb {
                gam[(a, b)] = bath.gamma(ebin[b] - ebin[a]);
            }
        }
        let decoupled = gam.iter().all(|&g| g == 0.0);
        let gamma0 = bath.gamma(0.0);

        // ½K_b = ½ Σ_a Σ_α γ_ab (Ā_α^{ab})ᵀ Ā_α^{ab} per bin.
        let mut kh: Vec<DMatrix<f64>> = bins.iter().map(|&(_, m)| DMatrix::zeros(m, m)).collect();
        if !decoupled {
            for (b, &(sb, mb)) in bins.iter().enumerate() {
                for (a, &(sa, ma)) in bins.iter().enumerate() {
                    let g = gam[(a, b)];
                    if g == 0.0 {
                        continue;
                    }
                    for ab in abars {
                        for x in 0..mb {
                            for y in 0..=x {
                                let mut s = 0.0;
                                for z in 0..ma {
                                    s += ab[(sa + z, sb + x)] * ab[(sa + z, sb + y)];
                                }
                                kh[b][(x, y)] += 0.5 * g * s;
                                if y != x {
                                    kh[b][(y, x)] += 0.5 * g * s;
                                }
                            }
                        }
                    }
                }
            }
        }

        // Hermitian coordinates of the bin-diagonal sector and their offsets.
        let mut sym_coords = Vec::new();
        let mut asym_coords = Vec::new();
        let mut sym_off = Vec::with_capacity(nb);
        let mut asym_off = Vec::with_capacity(nb);
        for &(s0, m) in &bins {
            sym_off.push(sym_coords.len());
            asym_off.push(asym_coords.len());
            for r in 0..m {
                for c in r..m {
                    sym_coords.push((s0 + r, s0 + c));
                }
            }
            for r in 0..m {
                for c in r + 1..m {
                    asym_coords.push((s0 + r, s0 + c));
                }
            }
        }
        let sym_local = |m: usize, r: usize, c: usize| r * m - r * (r + 1) / 2 + c;
        let asym_local = |m: usize, r: usize, c: usize| r * m - (r + 1) * (r + 2) / 2 + c;

        let d_sym = sym_coords.len();
        let d_asym = asym_coords.len();
        let mut l_sym = DMatrix::zeros(d_sym, d_sym);
        let mut l_asym = DMatrix::zeros(d_asym, d_asym);

        if !decoupled {
            for (bi, &(sb, mb)) in bins.iter().enumerate() {
                // Dense local basis elements for multi-state bins.
                for r in 0..mb {
                    for c in r..mb {
                        let col = sym_off[bi] + sym_local(mb, r, c);
                        let (gr, gc) = (sb + r, sb + c);
                        // Gains into every bin (a = bi is the ω = 0 channel).
                        for (ai, &(sa, ma)) in bins.iter().enumerate() {
                            let g = gam[(ai, bi)];
                            if g == 0.0 {
                                continue;
                            }
                            for ab in abars {
                                for x in 0..ma {
                                    let ux = ab[(sa + x, gr)];
                                    let vx = ab[(sa + x, gc)];
                                    for y in x..ma {
                                        let uy = ab[(sa + y, gr)];
                                        let vy = ab[(sa + y, gc)];
                                        let val = if r == c {
                                            g * ux * uy
                                        } else {
                                            g * (ux * vy + vx * uy)
                                        };
                                        l_sym[(sym_off[ai] + sym_local(ma, x, y), col)] += val;
                                    }
                                }
                            }
                        }
                        // Loss −(½K E + E ½K) stays inside bin bi.
                        let k = &kh[bi];
                        for x in 0..mb {
                            // Image entry (x, y) for y ≥ x.
                            for y in x..mb {
                                let mut val = 0.0;
                                if y == c {
                                    val -= k[(x, r)];
                                }
                                if y == r {
                                    val -= k[(x, c)];
                                }
                                if x == r {
                                    val -= k[(c, y)];
                                }
                                if x == c {
                                    val -= k[(r, y)];
                                }
                                if r == c {
                                    // E = e_r e_rᵀ counts each side once.
                                    val = 0.0;
                                    if y == r {
                                        val -= k[(x, r)];
                                    }
                                    if x == r {
                                        val -= k[(r, y)];
                                    }
                                }
                                if val != 0.0 {
                                    l_sym[(sym_off[bi] + sym_local(mb, x, y), col)] += val;
                                }
                            }
                        }
                    }
                }
                for r in 0..mb {
                    for c in r + 1..mb {
                        let col = asym_off[bi] + asym_local(mb, r, c);
                        let (gr, gc) = (sb + r, sb + c);
                        // Gains preserve antisymmetry; singleton targets get 0.
                        for (ai, &(sa, ma)) in bins.iter().enumerate() {
                            if ma < 2 {
                                continue;
                            }
                            let g = gam[(ai, bi)];
                            if g == 0.0 {
                                continue;
                            }
                            for ab in abars {
                                for x in 0..ma {
                                    let ux = ab[(sa + x, gr)];
                                    let vx = ab[(sa + x, gc)];
                                    for y in x + 1..ma {
                                        let uy = ab[(sa + y, gr)];
                                        let vy = ab[(sa + y, gc)];
                                        l_asym[(asym_off[ai] + asym_local(ma, x, y), col)] +=
                                            g * (ux * vy - vx * uy);
                                    }
                                }
                            }
                        }
                        let k = &kh[bi];
                        for x in 0..mb {
                            for y in x + 1..mb {
                                let mut val = 0.0;
                                if y == c {
                                    val -= k[(x, r)];
                                }
                                if y == r {
                                    val += k[(x, c)];
                                }
                                if x == r {
                                    val -= k[(c, y)];
                                }
                                if x == c {
                                    val += k[(r, y)];
                                }
                                if val != 0.0 {
                                    l_asym[(asym_off[bi] + asym_local(mb, x, y), col)] += val;
                                }
                            }
                        }
                    }
                }
            }
        }

        let p_sym = if decoupled { DMatrix::identity(d_sym, d_sym) } else { expm(&(l_sym * dt)) };
        let p_asym = if decoupled || d_asym == 0 {
            DMatrix::identity(d_asym, d_asym)
        } else {
            expm(&(l_asym * dt))
        };

        // Coherence contractions per bin pair (i < j).
        let mut coh = Vec::new();
        if !decoupled {
            for i in 0..nb {
                for j in i + 1..nb {
                    let (si, mi) = bins[i];
                    let (sj, mj) = bins[j];
                    if mi == 1 && mj == 1 {
                        let mut rate = -(kh[i][(0, 0)] + kh[j][(0, 0)]);
                        for ab in abars {
                            rate += gamma0 * ab[(si, si)] * ab[(sj, sj)];
                        }
                        coh.push(CoherenceMap::Scalar((rate * dt).exp()));
                    } else if mi * mj <= CROSS_GAIN_CAP {
                        let eye_i = DMatrix::<f64>::identity(mi, mi);
                        let eye_j = DMatrix::<f64>::identity(mj, mj);
                        let mut m = -eye_j.kronecker(&kh[i]) - kh[j].kronecker(&eye_i);
                        for ab in abars {
                            let aii = ab.view((si, si), (mi, mi)).into_owned();
                            let ajj = ab.view((sj, sj), (mj, mj)).into_owned();
                            m += gamma0 * ajj.kronecker(&aii);
                        }
                        coh.push(CoherenceMap::Kron(expm(&(m * dt))));
                    } else {
                        coh.push(CoherenceMap::OneSided(
                            expm(&(-&kh[i] * dt)),
                            expm(&(-&kh[j] * dt)),
                        ));
                    }
                }
            }
        }

        BinnedInterval { bins, sym_coords, asym_coords, p_sym, p_asym, coh, decoupled }
    }

    /// Applies the dissipative interval maps to ρ (eigenbasis, in place).
    /// Returns an error on a positivity violation beyond −1e−6.
    fn apply(&self, rho: &mut DMatrix<Complex64>) -> Result<()> {
        if self.decoupled {
            return Ok(());
        }
        let skip_block = std::env::var("ANNEAL_SIG_WCL_SKIP_BLOCK").is_ok();
        let skip_coh = std::env::var("ANNEAL_SIG_WCL_SKIP_COH").is_ok();
        // Bin-diagonal sector: exact propagation in Hermitian coordinates.
        let mut x_sym = DVector::zeros(self.sym_coords.len());
        for (k, &(r, c)) in self.sym_coords.iter().enumerate() {
            x_sym[k] = rho[(r, c)].re;
        }
        let mut x_asym = DVector::zeros(self.asym_coords.len());
        for (k, &(r, c)) in self.asym_coords.iter().enumerate() {
            x_asym[k] = rho[(r, c)].im;
        }
        let mass: f64 =
            self.sym_coords.iter().enumerate().filter(|(_, &(r, c))| r == c).map(|(k, _)| x_sym[k]).sum();
        x_sym = &self.p_sym * x_sym;
        x_asym = &self.p_asym * x_asym;
        // Clip rounding-level negative populations and absorb the drift that
        // large `‖L·dt‖` exponentials accumulate.
        let mut new_mass = 0.0;
        let mut min_pop = f64::INFINITY;
        for (k, &(r, c)) in self.sym_coords.iter().enumerate() {
            if r == c {
                min_pop = min_pop.min(x_sym[k]);
                x_sym[k] = x_sym[k].max(0.0);
                new_mass += x_sym[k];
            }
        }
        if min_pop < -1e-6 {
            return Err(Error::Numerical(format!("population {min_pop:.3e} below -1e-6")));
        }
        if new_mass <= 0.0 {
            return Err(Error::Numerical("population mass vanished".into()));
        }
        let scale = mass / new_mass;
        let mut ks = 0;
        let mut ka = 0;
        for &(s0, m) in &self.bins {
            for r in 0..m {
                for c in r..m {
                    let re = x_sym[ks];
                    ks += 1;
                    if r == c {
                        rho[(s0 + r, s0 + r)] = Complex64::new(re * scale, 0.0);
                    } else {
                        let im = x_asym[ka];
                        ka += 1;
                        rho[(s0 + r, s0 + c)] = Complex64::new(re, im);
                        rho[(s0 + c, s0 + r)] = Complex64::new(re, -im);
                    }
                }
            }
        }

        // Off-block coherences: per bin-pair contraction.
        let mut idx = 0;
        for i in 0..self.bins.len() {
            for j in i + 1..self.bins.len() {
                let (si, mi) = self.bins[i];
                let (sj, mj) = self.bins[j];
                match &self.coh[idx] {
                    CoherenceMap::Scalar(f) => {
                        let v = rho[(si, sj)] * *f;
                        rho[(si, sj)] = v;
                        rho[(sj, si)] = v.conj();
                    }
                    CoherenceMap::Kron(p) => {
                        let mut vre = DVector::zeros(mi * mj);
                        let mut vim = DVector::zeros(mi * mj);
                        for c in 0..mj {
                            for r in 0..mi {
                                let z = rho[(si + r, sj + c)];
                                vre[c * mi + r] = z.re;
                                vim[c * mi + r] = z.im;
                            }
                        }
                        vre = p * vre;
                        vim = p * vim;
                        for c in 0..mj {
                            for r in 0..mi {
                                let z = Complex64::new(vre[c * mi + r], vim[c * mi + r]);
                                rho[(si + r, sj + c)] = z;
                                rho[(sj + c, si + r)] = z.conj();
                            }
                        }
                    }
                    CoherenceMap::OneSided(ei, ej) => {
                        let mut bre = DMatrix::zeros(mi, mj);
                        let mut bim = DMatrix::zeros(mi, mj);
                        for r in 0..mi {
                            for c in 0..mj {
                                let z = rho[(si + r, sj + c)];
                                bre[(r, c)] = z.re;
                                bim[(r, c)] = z.im;
                            }
                        }
                        bre = ei * bre * ej;
                        bim = ei * bim * ej;
                        for r in 0..mi {
                            for c in 0..mj {
                                let z = Complex64::new(bre[(r, c)], bim[(r, c)]);
                                rho[(si + r, sj + c)] = z;
                                rho[(sj + c, si + r)] = z.conj();
                            }
                        }
                    }
                }
                idx += 1;
            }
        }
        Ok(())
    }
}

/// Options for [`evolve_wcl`].
#[derive(Debug, Clone)]
pub struct WclOptions {
    pub coupling: WclCoupling,
    /// Number of generator-refresh intervals across the anneal.
    pub n_refresh: usize,
    /// Add extra refresh density over the last 5% of the anneal, where the
    /// eigenbasis rotates fastest.
    pub end_refine: bool,
    /// Anneal fractions at which to emit the full density matrix
    /// (computational basis).
    pub sample_fractions: Vec<f64>,
}

impl Default for WclOptions {
    fn default() -> Self {
        WclOptions {
            coupling: WclCoupling::SigmaZPerQubit,
            n_refresh: 300,
            end_refine: true,
            sample_fractions: Vec::new(),
        }
    }
}

/// A sampled density matrix along the run.
#[derive(Debug, Clone)]
pub struct WclSample {
    /// Anneal fraction `t/T`.
    pub s: f64,
    pub rho: DensityMatrix,
}

/// Result of [`evolve_wcl`].
#[derive(Debug, Clone)]
pub struct WclRun {
    pub samples: Vec<WclSample>,
    /// Final density matrix in the computational basis.
    pub final_rho: DensityMatrix,
}

/// Integrates the WCL master equation from the ground-state projector of
/// `H(0)`, rebuilding the generator in the instantaneous eigenbasis on a
/// refresh grid and propagating each interval exactly.
pub fn evolve_wcl(
    model: &IsingModel,
    sched: &AnnealScheduleQ,
    bath: &BathSpec,
    opts: &WclOptions,
) -> Result<WclRun> {
    if opts.n_refresh < 2 {
        return Err(Error::Spec("n_refresh must be >= 2".into()));
    }
    let builder = HamiltonianBuilder::new(model);
    let dim = builder.dim;
    let total = sched.total_time_ns;

    // Refresh grid over the anneal fraction.
    let grid = refresh_grid(opts.n_refresh, opts.end_refine);

    // Initial state: ground projector of H(0) is a point mass in the
    // eigenbasis representation.
    let (e0, mut v0) = sorted_eigh(&builder.at(sched, 0.0)?);
    canonicalize_degenerate(&e0, &mut v0);
    let mut basis = v0;
    let mut rho: DMatrix<Complex64> = DMatrix::zeros(dim, dim);
    rho[(0, 0)] = Complex64::new(1.0, 0.0);

    let mut fractions = opts.sample_fractions.clone();
    fractions.sort_by(f64::total_cmp);
    let mut next_sample = 0usize;
    let mut samples = Vec::new();

    for m in 0..grid.len() - 1 {
        let (s0, s1) = (grid[m], grid[m + 1]);
        let s_mid = 0.5 * (s0 + s1);
        let dt = (s1 - s0) * total;
        let (energies, mut v2) = sorted_eigh(&builder.at(sched, s_mid * total)?);
        canonicalize_degenerate(&energies, &mut v2);

        // Hop into the new eigenbasis: ρ ← SρSᵀ with S = V₂ᵀV₁.
        let hop = v2.tr_mul(&basis);
        rho = real_left_mul(&hop, &real_right_mul_t(&rho, &hop));
        basis = v2;

        // Dissipation: exact frequency-binned interval maps.
        let abars = channel_abars(&basis, opts.coupling, model.n);
        let interval = BinnedInterval::new(&energies, &abars, bath, dt);
        if std::env::var("ANNEAL_SIG_WCL_DEBUG").is_ok() {
            let sig: Vec<String> = interval
                .bins
                .iter()
                .filter(|&&(_, m)| m > 1)
                .map(|&(s0, m)| format!("{s0}:{m}"))
                .collect();
            eprintln!("step {m} s_mid {s_mid:.8} bins [{}]", sig.join(","));
        }
        let dump = std::env::var("ANNEAL_SIG_WCL_DEBUG_STEP")
            .ok()
            .and_then(|v| v.parse::<usize>().ok())
            == Some(m);
        let dump_rho = |tag: &str, basis: &DMatrix<f64>, rho: &DMatrix<Complex64>| {
            let comp = to_computational(basis, rho);
            let mut out = String::new();
            for r in 0..dim {
                for c in 0..dim {
                    let z = comp.rho[(r, c)];
                    out.push_str(&format!("{:.15e} {:.15e} ", z.re, z.im));
                }
            }
            eprintln!("RHO {tag} {out}");
        };
        if dump {
            dump_rho("hop", &basis, &rho);
        }
        interval.apply(&mut rho)?;
        if dump {
            dump_rho("apply", &basis, &rho);
        }
        if std::env::var("ANNEAL_SIG_WCL_DEBUG").is_ok() {
            let comp = to_computational(&basis, &rho);
            let diag: Vec<String> =
                (0..dim).map(|k| format!("{:.12e}", comp.rho[(k, k)].re)).collect();
            eprintln!("diag {m} {}", diag.join(" "));
        }

        // Hamiltonian phases, exact per matrix element.
        for a in 0..dim {
            for b in 0..dim {
                if a != b {
                    let omega = energies[a] - energies[b];
                    rho[(a, b)] *= Complex64::from_polar(1.0, -omega * dt);
                }
            }
        }
        if dump {
            dump_rho("phase", &basis, &rho);
        }

        while next_sample < fractions.len() && fractions[next_sample] <= s1 + 1e-12 {
            samples.push(WclSample {
                s: fractions[next_sample],
                rho: to_computational(&basis, &rho),
            });
            next_sample += 1;
        }
    }

    let final_rho = to_computational(&basis, &rho);
    final_rho.validate()?;
    Ok(WclRun { samples, final_rho })
}

/// The refresh grid over `s = t/T`, optionally refined near the end.
fn refresh_grid(n_refresh: usize, end_refine: bool) -> Vec<f64> {
    if !end_refine {
        return (0..=n_refresh).map(|i| i as f64 / n_refresh as f64).collect();
    }
    let n_coarse = (n_refresh * 3) / 5;
    let n_fine = n_refresh - n_coarse;
    let mut grid: Vec<f64> = (0..=n_coarse).map(|i| 0.95 * i as f64 / n_coarse as f64).collect();
    grid.extend((1..=n_fine).map(|i| 0.95 + 0.05 * i as f64 / n_fine as f64));
    grid
}

/// ρ in the computational basis: `V ρ Vᵀ`.
fn to_computational(basis: &DMatrix<f64>, rho_eig: &DMatrix<Complex64>) -> DensityMatrix {
    let tmp = real_left_mul(basis, &real_right_mul_t(rho_eig, basis));
    DensityMatrix { rho: tmp }
}

/// `M·ρ` for real `M`, complex `ρ`, via two real products.
fn real_left_mul(m: &DMatrix<f64>, rho: &DMatrix<Complex64>) -> DMatrix<Complex64> {
    let (r, c) = rho.shape();
    let re = DMatrix::from_fn(r, c, |i, j| rho[(i, j)].re);
    let im = DMatrix::from_fn(r, c, |i, j| rho[(i, j)].im);
    let re2 = m * re;
    let im2 = m * im;
    DMatrix::from_fn(r, c, |i, j| Complex64::new(re2[(i, j)], im2[(i, j)]))
}

/// `ρ·Mᵀ` for real `M`, complex `ρ`.
fn real_right_mul_t(rho: &DMatrix<Complex64>, m: &DMatrix<f64>) -> DMatrix<Complex64> {
    let (r, c) = rho.shape();
    let re = DMatrix::from_fn(r, c, |i, j| rho[(i, j)].re);
    let im = DMatrix::from_fn(r, c, |i, j| rho[(i, j)].im);
    let mt = m.transpose();
    let re2 = re * &mt;
    let im2 = im * &mt;
    DMatrix::from_fn(r, c, |i, j| Complex64::new(re2[(i, j)], im2[(i, j)]))
}
