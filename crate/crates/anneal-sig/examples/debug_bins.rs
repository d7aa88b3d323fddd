//! Scratch diagnostic: degenerate-bin structure along the refresh grid.

use anneal_sig::ising::IsingModel;
use anneal_sig::quantum::hamiltonian::{hamiltonian_at, sorted_eigh};
use anneal_sig::quantum::AnnealScheduleQ;

fn main() {
    let model = IsingModel::reference();
    let sched = AnnealScheduleQ::linear(1e9);
    let mut worst_d = 0usize;
    let mut worst_m = 0usize;
    let mut worst_s = 0.0;
    // Mimic the refresh grid midpoints with end refinement at n_refresh = 300.
    let n_coarse = 180;
    let n_fine = 120;
    let mut grid: Vec<f64> = (0..=n_coarse).map(|i| 0.95 * i as f64 / n_coarse as f64).collect();
    grid.extend((1..=n_fine).map(|i| 0.95 + 0.05 * i as f64 / n_fine as f64));
    for m in 0..grid.len() - 1 {
        let s = 0.5 * (grid[m] + grid[m + 1]);
        let h = hamiltonian_at(&model, &sched, s * 1e9).unwrap();
        let (e, _) = sorted_eigh(&h);
        let scale = e.iter().fold(1.0_f64, |a, &x| a.max(x.abs()));
        let tol = 1e-8 * scale;
        let mut d_sum = 0usize;
        let mut m_max = 0usize;
        let mut start = 0;
        while start < e.len() {
            let mut end = start + 1;
            while end < e.len() && e[end] - e[end - 1] <= tol {
                end += 1;
            }
            let mm = end - start;
            d_sum += mm * mm;
            m_max = m_max.max(mm);
            start = end;
        }
        if d_sum > worst_d {
            worst_d = d_sum;
            worst_m = m_max;
            worst_s = s;
        }
    }
    println!("worst sum m^2 = {worst_d} (max bin {worst_m}) at s = {worst_s:.6}");
}
