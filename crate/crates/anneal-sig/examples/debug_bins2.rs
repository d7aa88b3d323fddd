//! Scratch: bin statistics and minimal gaps at selected anneal fractions.

use anneal_sig::ising::IsingModel;
use anneal_sig::quantum::hamiltonian::{hamiltonian_at, sorted_eigh};
use anneal_sig::quantum::AnnealScheduleQ;

fn main() {
    let model = IsingModel::reference();
    let sched = AnnealScheduleQ::linear(1e9);
    for frac in [0.05, 0.2, 0.5, 0.8, 0.95, 0.99, 0.9996] {
        let h = hamiltonian_at(&model, &sched, frac * 1e9).unwrap();
        let (e, _) = sorted_eigh(&h);
        let scale = e.iter().fold(1.0_f64, |a, &x| a.max(x.abs()));
        let tol = 1e-8 * scale;
        let mut multis = 0;
        let mut max_bin = 1;
        let mut min_gap = f64::INFINITY;
        let mut start = 0;
        while start < e.len() {
            let mut end = start + 1;
            while end < e.len() && e[end] - e[end - 1] <= tol {
                end += 1;
            }
            if end - start > 1 {
                multis += 1;
                max_bin = max_bin.max(end - start);
            }
            if end < e.len() {
                min_gap = min_gap.min(e[end] - e[end - 1]);
            }
            start = end;
        }
        println!(
            "frac {frac}: multis {multis} max_bin {max_bin} tol {tol:.2e} min inter-bin gap {min_gap:.2e}"
        );
    }
}
