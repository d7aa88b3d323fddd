//! Scratch diagnostic: compare WCL generators of a model and a gauged copy.

use anneal_sig::ising::{flip_index, IsingModel};
use anneal_sig::quantum::bath::BathSpec;
use anneal_sig::quantum::wcl::{build_wcl_generator, evolve_wcl, WclCoupling, WclOptions};
use anneal_sig::quantum::AnnealScheduleQ;

fn main() {
    let model = IsingModel::reference();
    let flips = vec![0usize, 2, 6];
    let gauged = model.apply_gauge(&flips).unwrap();
    let sched = AnnealScheduleQ::linear(1e9);
    let bath = BathSpec::default_bath();
    let n = model.n;
    let dim = 1usize << n;

    for frac in [0.2, 0.5, 0.8, 0.95, 0.99] {
        let t = frac * 1e9;
        let g1 = build_wcl_generator(&model, &sched, &bath, t, WclCoupling::SigmaZPerQubit)
            .unwrap();
        let g2 = build_wcl_generator(&gauged, &sched, &bath, t, WclCoupling::SigmaZPerQubit)
            .unwrap();
        // Energies should agree exactly.
        let de = (0..dim)
            .map(|k| (g1.energies[k] - g2.energies[k]).abs())
            .fold(0.0_f64, f64::max);
        // Check eigenvector correspondence: |v2_a| should equal permuted |v1_a|.
        let mut dv = 0.0_f64;
        for a in 0..dim {
            for k in 0..dim {
                let k2 = flip_index(k, n, &flips);
                dv = dv.max((g1.basis[(k, a)].abs() - g2.basis[(k2, a)].abs()).abs());
            }
        }
        // Rates in the eigenbasis should agree elementwise if eigenvectors map.
        let mut dr = 0.0_f64;
        let mut rmax = 0.0_f64;
        for a in 0..dim {
            for b in 0..dim {
                dr = dr.max((g1.rates[(a, b)] - g2.rates[(a, b)]).abs());
                rmax = rmax.max(g1.rates[(a, b)].abs());
            }
        }
        println!(
            "frac {frac}: max|dE| {de:.3e}  max|d|v|| {dv:.3e}  max|dRates| {dr:.3e} (scale {rmax:.3e})"
        );
    }

    // Full runs.
    let opts = WclOptions {
        coupling: WclCoupling::SigmaZPerQubit,
        n_refresh: 60,
        end_refine: true,
        sample_fractions: vec![1.0],
    };
    let r1 = evolve_wcl(&model, &sched, &bath, &opts).unwrap();
    let r2 = evolve_wcl(&gauged, &sched, &bath, &opts).unwrap();
    let p1 = r1.final_rho.populations().unwrap();
    let p2 = r2.final_rho.populations().unwrap();
    let iso = 255usize;
    let iso2 = flip_index(iso, n, &flips);
    println!("p_s ref {:.6e}  gauged {:.6e}", p1.p[iso], p2.p[iso2]);
    let mut dmax = 0.0_f64;
    let mut kworst = 0;
    for k in 0..dim {
        let d = (p1.p[k] - p2.p[flip_index(k, n, &flips)]).abs();
        if d > dmax {
            dmax = d;
            kworst = k;
        }
    }
    println!("max pop drift {dmax:.3e} at k={kworst}");
}
