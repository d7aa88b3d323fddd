//! Scratch: gauge covariance of the frozen-H WCL dynamics.

use anneal_sig::ising::{flip_index, IsingModel};
use anneal_sig::quantum::bath::BathSpec;
use anneal_sig::quantum::wcl::{evolve_wcl, WclCoupling, WclOptions};
use anneal_sig::quantum::AnnealScheduleQ;

fn main() {
    let model = IsingModel::reference();
    let flips = vec![0usize, 2, 6];
    let gauged = model.apply_gauge(&flips).unwrap();
    let n = model.n;
    // Frozen mid-anneal Hamiltonian: constant A, B at their s = 0.5 values.
    let sched = |_: ()| {
        AnnealScheduleQ::tabulated(1e5, vec![(0.0, 5.0, 0.0), (1e-6, 5.0, 2.65), (1.0 - 1e-6, 5.0, 2.65), (1.0, 0.0, 2.65)]).unwrap()
    };
    let bath = BathSpec::default_bath();
    let opts = WclOptions {
        coupling: WclCoupling::SigmaZPerQubit,
        n_refresh: 4,
        end_refine: false,
        sample_fractions: vec![],
    };
    let r1 = evolve_wcl(&model, &sched(()), &bath, &opts).unwrap();
    let r2 = evolve_wcl(&gauged, &sched(()), &bath, &opts).unwrap();
    let p1 = r1.final_rho.populations().unwrap();
    let p2 = r2.final_rho.populations().unwrap();
    let mut dmax = 0.0_f64;
    for k in 0..1 << n {
        dmax = dmax.max((p1.p[k] - p2.p[flip_index(k, n, &flips)]).abs());
    }
    println!("frozen-H max pop drift {dmax:.3e}");

    // Same along the real anneal but with very few refreshes, to see where
    // non-covariance enters.
    for (n_refresh, refine) in [(32usize, false), (60, false), (120, false), (300, false), (32, true), (60, true), (120, true), (300, true)] {
        let sched = AnnealScheduleQ::linear(1e9);
        let o = WclOptions { n_refresh, end_refine: refine, ..opts.clone() };
        let r1 = evolve_wcl(&model, &sched, &bath, &o).unwrap();
        let r2 = evolve_wcl(&gauged, &sched, &bath, &o).unwrap();
        let p1 = r1.final_rho.populations().unwrap();
        let p2 = r2.final_rho.populations().unwrap();
        let mut dmax = 0.0_f64;
        for k in 0..1 << n {
            dmax = dmax.max((p1.p[k] - p2.p[flip_index(k, n, &flips)]).abs());
        }
        println!("anneal n_refresh {n_refresh} refine {refine}: max pop drift {dmax:.3e}");
    }
}
