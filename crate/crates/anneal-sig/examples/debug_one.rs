//! Scratch: single bad config, dump bin structure for ref and gauged model.

use anneal_sig::ising::IsingModel;
use anneal_sig::quantum::bath::BathSpec;
use anneal_sig::quantum::wcl::{evolve_wcl, WclCoupling, WclOptions};
use anneal_sig::quantum::AnnealScheduleQ;

fn main() {
    let which: usize = std::env::args().nth(1).unwrap().parse().unwrap();
    let model = IsingModel::reference();
    let flips = vec![0usize, 2, 6];
    let m = if which == 0 { model } else { model.apply_gauge(&flips).unwrap() };
    let sched = AnnealScheduleQ::linear(1e9);
    let bath = BathSpec::default_bath();
    let opts = WclOptions {
        coupling: WclCoupling::SigmaZPerQubit,
        n_refresh: 60,
        end_refine: false,
        sample_fractions: vec![],
    };
    evolve_wcl(&m, &sched, &bath, &opts).unwrap();
}
