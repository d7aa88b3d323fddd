//! Reproducibility harness: runnable JSON specs, gauge sweeps, box
//! statistics, and CSV/SVG export shared by the library and the CLI.

pub mod plot;
pub mod runner;
pub mod stats;
pub mod sweep;

pub use plot::{render_boxes, render_lines, write_csv, write_svg, AxisScale, Series};
pub use runner::{
    run_concurrence, run_embeddings, run_level_diagram, run_perturb, run_qa, run_sa, run_spectrum,
    run_sweep, ConcurrenceSpec, QaEngine, QaRunSpec, RunBundle, SaRunSpec, SweepSpec,
};
pub use stats::{box_stats, BoxStats};
pub use sweep::{gauge_averaged_sweep, init_thread_pool, random_gauges, Gauge, GaugeSweep};
