//! Annealing envelopes `A(t)`, `B(t)` of the interpolating Hamiltonian
//! `H(t) = A(t)·H_trans + B(t)·H_Ising`.
//!
//! Inputs are in GHz; the dynamics modules convert to angular units
//! (rad/ns) via [`crate::quantum::GHZ_TO_ANGULAR`].

use std::path::Path;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Default initial transverse energy scale, GHz.
pub const DEFAULT_A0_GHZ: f64 = 10.0;
/// Default final Ising energy scale, GHz.
pub const DEFAULT_B0_GHZ: f64 = 5.3;

/// Envelope representation.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub enum ScheduleForm {
    /// `A(t) = A₀(1 − t/T)`, `B(t) = B₀·t/T`.
    Linear { a0_ghz: f64, b0_ghz: f64 },
    /// Piecewise-linear interpolation of `(t/T, A, B)` rows.
    Tabulated { rows: Vec<(f64, f64, f64)> },
}

/// A quantum annealing schedule over total time `T` (ns).
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct AnnealScheduleQ {
    /// Total annealing time, ns.
    pub total_time_ns: f64,
    pub form: ScheduleForm,
}

impl AnnealScheduleQ {
    /// The linear default schedule: `A` from `A₀` to 0, `B` from 0 to `B₀`.
    pub fn linear(total_time_ns: f64) -> Self {
        AnnealScheduleQ {
            total_time_ns,
            form: ScheduleForm::Linear { a0_ghz: DEFAULT_A0_GHZ, b0_ghz: DEFAULT_B0_GHZ },
        }
    }

    /// Linear schedule with explicit endpoint scales.
    pub fn linear_with(total_time_ns: f64, a0_ghz: f64, b0_ghz: f64) -> Result<Self> {
        let s = AnnealScheduleQ {
            total_time_ns,
            form: ScheduleForm::Linear { a0_ghz, b0_ghz },
        };
        s.validate()?;
        Ok(s)
    }

    /// Builds a tabulated schedule from `(t_fraction, A_GHz, B_GHz)` rows.
    pub fn tabulated(total_time_ns: f64, rows: Vec<(f64, f64, f64)>) -> Result<Self> {
        let s = AnnealScheduleQ { total_time_ns, form: ScheduleForm::Tabulated { rows } };
        s.validate()?;
        Ok(s)
    }

    /// Reads a tabulated schedule from CSV columns `t_fraction,A_GHz,B_GHz`
    /// (header optional, `t_fraction` strictly increasing over `[0, 1]`).
    pub fn from_csv(total_time_ns: f64, path: &Path) -> Result<Self> {
        let text = std::fs::read_to_string(path)?;
        let mut rows = Vec::new();
        for (i, line) in text.lines().enumerate() {
            let line = line.trim();
            if line.is_empty() {
                continue;
            }
            let cols: Vec<&str> = line.split(',').map(str::trim).collect();
            if cols.len() != 3 {
                return Err(Error::Spec(format!("schedule CSV line {}: need 3 columns", i + 1)));
            }
            if i == 0 && cols[0].parse::<f64>().is_err() {
                continue; // header row
            }
            let parse = |s: &str| -> Result<f64> {
                s.parse().map_err(|_| Error::Spec(format!("schedule CSV line {}: bad number {s}", i + 1)))
            };
            rows.push((parse(cols[0])?, parse(cols[1])?, parse(cols[2])?));
        }
        Self::tabulated(total_time_ns, rows)
    }

    /// Checks the envelope invariants `A(0) > 0, B(0) = 0, A(T) = 0, B(T) > 0`
    /// plus total-time positivity and table monotonicity.
    pub fn validate(&self) -> Result<()> {
        if !(self.total_time_ns > 0.0) {
            return Err(Error::Spec("total annealing time must be > 0".into()));
        }
        if let ScheduleForm::Tabulated { rows } = &self.form {
            if rows.len() < 2 {
                return Err(Error::Spec("tabulated schedule needs at least 2 rows".into()));
            }
            if rows[0].0 != 0.0 || rows[rows.len() - 1].0 != 1.0 {
                return Err(Error::Spec("tabulated schedule must span t_fraction 0..1".into()));
            }
            if rows.windows(2).any(|w| w[1].0 <= w[0].0) {
                return Err(Error::Spec("t_fraction must be strictly increasing".into()));
            }
        }
        let t = self.total_time_ns;
        let ok = self.a_ghz(0.0) > 0.0
            && self.b_ghz(0.0) == 0.0
            && self.a_ghz(t) == 0.0
            && self.b_ghz(t) > 0.0;
        if !ok {
            return Err(Error::Spec(
                "schedule must satisfy A(0) > 0, B(0) = 0, A(T) = 0, B(T) > 0".into(),
            ));
        }
        Ok(())
    }

    /// Transverse envelope at time `t` (ns), in GHz.
    pub fn a_ghz(&self, t: f64) -> f64 {
        let s = t / self.total_time_ns;
        match &self.form {
            ScheduleForm::Linear { a0_ghz, .. } => a0_ghz * (1.0 - s),
            ScheduleForm::Tabulated { rows } => interpolate(rows, s, |r| r.1),
        }
    }

    /// Ising envelope at time `t` (ns), in GHz.
    pub fn b_ghz(&self, t: f64) -> f64 {
        let s = t / self.total_time_ns;
        match &self.form {
            ScheduleForm::Linear { b0_ghz, .. } => b0_ghz * s,
            ScheduleForm::Tabulated { rows } => interpolate(rows, s, |r| r.2),
        }
    }
}

fn interpolate(rows: &[(f64, f64, f64)], s: f64, pick: impl Fn(&(f64, f64, f64)) -> f64) -> f64 {
    let s = s.clamp(0.0, 1.0);
    let hi = rows.partition_point(|r| r.0 < s).min(rows.len() - 1).max(1);
    let (lo, hi) = (&rows[hi - 1], &rows[hi]);
    let w = (s - lo.0) / (hi.0 - lo.0);
    pick(lo) * (1.0 - w) + pick(hi) * w
}
