//! Implicit time stepping with per-step diagnostics.

use crate::error::SolverError;
use crate::operators::DiscreteField;
use crate::scheme::functionals::{dissipation, energy, mass, penalization_term, split_masses};
use crate::scheme::Scheme;
use crate::solver::{newton_step_solve, LinearSolver, NewtonStats};

/// Relative per-step mass drift tolerated before a violation is recorded.
pub const MASS_TOL: f64 = 1e-11;
/// Slack of the discrete energy inequality, relative to `1 + |𝔼^n|`.
pub const ENERGY_SLACK: f64 = 1e-9;

#[derive(Debug, Clone, PartialEq)]
pub struct StateRecord {
    pub step: usize,
    pub t: f64,
    /// `⟦u, 1⟧`
    pub mass: f64,
    pub primal_mass: f64,
    pub dual_mass: f64,
    pub energy: f64,
    /// `𝕀`; `NaN` when some entry is zero (the initial state).
    pub dissipation: f64,
    /// `Î`; `NaN` when some entry is zero.
    pub dissipation_hat: f64,
    /// `⟦𝒫g, g⟧`; `NaN` when some entry is zero.
    pub penalization: f64,
    /// Minimum over the cells that carry measure.
    pub min_u: f64,
    /// Minimum over all unknowns, boundary cells included.
    pub min_all: f64,
    pub newton: NewtonStats,
}

#[derive(Debug, Clone, Default)]
pub struct RunReport {
    pub records: Vec<StateRecord>,
    /// Invariant violations (mass drift, energy inequality, positivity).
    pub violations: Vec<String>,
    pub dt: f64,
    /// `Δt / h`, recorded for information only.
    pub cfl_ratio: f64,
}

impl RunReport {
    pub fn newton_max(&self) -> usize {
        self.records.iter().skip(1).map(|r| r.newton.iterations).max().unwrap_or(0)
    }

    pub fn newton_mean(&self) -> f64 {
        let n = self.records.len().saturating_sub(1);
        if n == 0 {
            return 0.0;
        }
        self.records.iter().skip(1).map(|r| r.newton.iterations as f64).sum::<f64>() / n as f64
    }

    pub fn floor_activated(&self) -> bool {
        self.records.iter().any(|r| r.newton.floor_activated)
    }

    pub fn min_u(&self) -> f64 {
        self.records.iter().skip(1).map(|r| r.min_u).fold(f64::INFINITY, f64::min)
    }

    pub fn max_relative_mass_drift(&self) -> f64 {
        let m0 = match self.records.first() {
            Some(r) => r.mass,
            None => return 0.0,
        };
        self.records
            .iter()
            .map(|r| (r.mass - m0).abs() / m0.abs().max(f64::MIN_POSITIVE))
            .fold(0.0, f64::max)
    }
}

/// A failed run: the records produced before the failure and its cause.
#[derive(Debug)]
pub struct RunFailure {
    pub report: RunReport,
    pub error: SolverError,
}

impl std::fmt::Display for RunFailure {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        write!(f, "step {}: {}", self.report.records.len(), self.error)
    }
}

impl std::error::Error for RunFailure {}

impl<'m> Scheme<'m> {
    /// Initial Newton iterate for step `n → n+1`: `u^n`, except that boundary
    /// cells without a positive value (only the projected initial state,
    /// where `u_∂𝔐 = 0`) start from the value of their interior neighbour.
    pub fn initial_guess(&self, u: &DiscreteField) -> Vec<f64> {
        let mut g = u.as_slice().to_vec();
        for d in self.mesh().diamonds().iter().filter(|d| d.is_boundary()) {
            let [k, l, _, _] = d.nodes;
            if !(g[l] > 0.0) {
                g[l] = g[k];
            }
        }
        g
    }

    /// One implicit step from `u_prev`.
    pub fn step(&self, u_prev: &DiscreteField, linear: &mut LinearSolver) -> Result<(DiscreteField, NewtonStats), SolverError> {
        let prev = u_prev.as_slice();
        let init = self.initial_guess(u_prev);
        let (u, stats) = newton_step_solve(
            |u| Ok(self.weak_residual(prev, u)?),
            |u| Ok(self.jacobian(u)?),
            &init,
            &self.params().newton,
            linear,
        )?;
        Ok((DiscreteField::from_vec(u_prev.layout(), u), stats))
    }

    pub fn record(&self, step: usize, u: &DiscreteField, newton: NewtonStats) -> StateRecord {
        let (primal_mass, dual_mass) = split_masses(self.mesh(), u);
        let (dissipation, dissipation_hat) = dissipation(self, u).unwrap_or((f64::NAN, f64::NAN));
        StateRecord {
            step,
            t: step as f64 * self.dt(),
            mass: mass(self.mesh(), u),
            primal_mass,
            dual_mass,
            energy: energy(self.mesh(), u, self.potential()),
            dissipation,
            dissipation_hat,
            penalization: penalization_term(self, u).unwrap_or(f64::NAN),
            min_u: u.min_measured(),
            min_all: u.min(),
            newton,
        }
    }

    /// Runs `N_T` steps from `u0`, calling `observe(n, t^n, u^n)` for every
    /// state including the initial one.
    pub fn run(
        &self,
        u0: &DiscreteField,
        mut observe: impl FnMut(usize, f64, &DiscreteField),
    ) -> Result<RunReport, RunFailure> {
        let dt = self.dt();
        let mut report = RunReport {
            dt,
            cfl_ratio: dt / self.mesh().size(),
            ..Default::default()
        };
        let mut linear = LinearSolver::new();
        let mut u = u0.clone();
        report.records.push(self.record(0, &u, NewtonStats::default()));
        observe(0, 0.0, &u);
        for n in 1..=self.params().n_steps() {
            let (next, stats) = match self.step(&u, &mut linear) {
                Ok(s) => s,
                Err(error) => return Err(RunFailure { report, error }),
            };
            let rec = self.record(n, &next, stats);
            let prev = report.records.last().unwrap();
            check_invariants(prev, &rec, dt, self.params().kappa, &mut report.violations);
            observe(n, rec.t, &next);
            report.records.push(rec);
            u = next;
        }
        Ok(report)
    }
}

fn check_invariants(prev: &StateRecord, rec: &StateRecord, dt: f64, kappa: f64, out: &mut Vec<String>) {
    let n = rec.step;
    let drift = (rec.mass - prev.mass).abs() / prev.mass.abs().max(f64::MIN_POSITIVE);
    if drift > MASS_TOL {
        out.push(format!("step {n}: relative mass drift {drift:e}"));
    }
    let lhs = rec.energy - prev.energy + dt * (rec.dissipation + kappa * rec.penalization);
    if !(lhs <= ENERGY_SLACK * (1.0 + prev.energy.abs())) {
        out.push(format!("step {n}: energy inequality violated by {lhs:e}"));
    }
    if !(rec.min_all > 0.0) {
        out.push(format!("step {n}: non-positive value {:e}", rec.min_all));
    }
}
