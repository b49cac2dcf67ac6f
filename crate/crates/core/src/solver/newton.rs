use crate::error::SolverError;
use crate::solver::{CscMatrix, LinearSolver};

#[derive(Debug, Clone, PartialEq)]
pub struct NewtonConfig {
    /// Stop once the ℓ¹ norm of the residual drops below this value.
    pub tol: f64,
    pub max_iter: usize,
    /// Initial iterate is `max(u_init, floor)`.
    pub floor: f64,
    /// Fraction of the Newton update applied before positivity backtracking.
    pub damping: f64,
    pub max_backtracks: usize,
}

impl Default for NewtonConfig {
    fn default() -> Self {
        Self {
            tol: 1e-10,
            max_iter: 50,
            floor: 1e-12,
            damping: 1.0,
            max_backtracks: 30,
        }
    }
}

impl NewtonConfig {
    pub fn validate(&self) -> Result<(), String> {
        if !(self.tol > 0.0) {
            return Err(format!("Newton tolerance {} must be positive", self.tol));
        }
        if self.max_iter < 1 {
            return Err("Newton max_iter must be at least 1".into());
        }
        if !(self.damping > 0.0 && self.damping <= 1.0) {
            return Err(format!("Newton damping {} must lie in (0,1]", self.damping));
        }
        if !(self.floor > 0.0) {
            return Err(format!("positivity floor {} must be positive", self.floor));
        }
        Ok(())
    }
}

#[derive(Debug, Clone, Default, PartialEq)]
pub struct NewtonStats {
    pub iterations: usize,
    pub residual: f64,
    pub backtracks: usize,
    /// Whether the positivity floor changed any entry of the initial iterate.
    pub floor_activated: bool,
    /// ℓ¹ residual before each iteration and at the returned state.
    pub history: Vec<f64>,
}

pub fn l1(v: &[f64]) -> f64 {
    v.iter().map(|x| x.abs()).sum()
}

/// Newton's method for `F(u) = 0` on strictly positive states.
///
/// The full update is tried first (scaled by `damping`) and halved until
/// every entry stays positive.
pub fn newton_step_solve<R, J>(
    mut residual_fn: R,
    mut jacobian_fn: J,
    u_init: &[f64],
    config: &NewtonConfig,
    linear: &mut LinearSolver,
) -> Result<(Vec<f64>, NewtonStats), SolverError>
where
    R: FnMut(&[f64]) -> Result<Vec<f64>, SolverError>,
    J: FnMut(&[f64]) -> Result<CscMatrix, SolverError>,
{
    let mut stats = NewtonStats::default();
    let mut u: Vec<f64> = u_init
        .iter()
        .map(|&x| {
            if x < config.floor {
                stats.floor_activated = true;
                config.floor
            } else {
                x
            }
        })
        .collect();
    let mut f = residual_fn(&u)?;
    let mut r = l1(&f);
    stats.history.push(r);
    loop {
        if !r.is_finite() {
            return Err(SolverError::NoConvergence {
                iterations: stats.iterations,
                residual: r,
            });
        }
        if r < config.tol {
            stats.residual = r;
            return Ok((u, stats));
        }
        if stats.iterations >= config.max_iter {
            return Err(SolverError::NoConvergence {
                iterations: stats.iterations,
                residual: r,
            });
        }
        let jac = jacobian_fn(&u)?;
        let rhs: Vec<f64> = f.iter().map(|x| -x).collect();
        let du = linear.solve(&jac, &rhs)?;
        let mut lambda = config.damping;
        let mut halvings = 0;
        let next = loop {
            let cand: Vec<f64> = u.iter().zip(&du).map(|(u, d)| u + lambda * d).collect();
            if cand.iter().all(|&x| x > 0.0) {
                break cand;
            }
            halvings += 1;
            if halvings > config.max_backtracks {
                return Err(SolverError::PositivityBacktrackExhausted(halvings - 1));
            }
            lambda *= 0.5;
        };
        stats.backtracks += halvings;
        stats.iterations += 1;
        u = next;
        f = residual_fn(&u)?;
        r = l1(&f);
        stats.history.push(r);
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    // F(u) = (u0² − 4, u0 u1 − 6) with root (2, 3)
    fn f(u: &[f64]) -> Result<Vec<f64>, SolverError> {
        Ok(vec![u[0] * u[0] - 4.0, u[0] * u[1] - 6.0])
    }
    fn j(u: &[f64]) -> Result<CscMatrix, SolverError> {
        Ok(CscMatrix::from_dense(&[vec![2.0 * u[0], 0.0], vec![u[1], u[0]]]))
    }

    #[test]
    fn converges_quadratically() {
        let (u, s) = newton_step_solve(f, j, &[1.0, 1.0], &NewtonConfig::default(), &mut LinearSolver::new()).unwrap();
        assert!((u[0] - 2.0).abs() < 1e-12 && (u[1] - 3.0).abs() < 1e-12);
        assert!(s.iterations <= 8 && !s.floor_activated);
        let h = &s.history;
        let n = h.len();
        assert!(h[n - 2] < 1e-3);
        assert!(h[n - 1] <= 10.0 * h[n - 2] * h[n - 2]);
    }

    #[test]
    fn exact_root_takes_no_iteration() {
        let (_, s) = newton_step_solve(f, j, &[2.0, 3.0], &NewtonConfig::default(), &mut LinearSolver::new()).unwrap();
        assert_eq!(s.iterations, 0);
    }

    #[test]
    fn floor_and_backtracking() {
        let sq = |u: &[f64]| Ok(vec![u[0] * u[0] - 4.0]);
        let dsq = |u: &[f64]| Ok(CscMatrix::from_dense(&[vec![2.0 * u[0]]]));
        let (u, s) = newton_step_solve(sq, dsq, &[0.0], &NewtonConfig::default(), &mut LinearSolver::new()).unwrap();
        assert!(s.floor_activated);
        assert!((u[0] - 2.0).abs() < 1e-12);
        // log u = log 2 from u = 10: the first full step lands at u < 0
        let lg = |u: &[f64]| Ok(vec![(u[0] / 2.0).ln()]);
        let dlg = |u: &[f64]| Ok(CscMatrix::from_dense(&[vec![1.0 / u[0]]]));
        let (u, s) = newton_step_solve(lg, dlg, &[10.0], &NewtonConfig::default(), &mut LinearSolver::new()).unwrap();
        assert!(s.backtracks >= 1 && !s.floor_activated);
        assert!((u[0] - 2.0).abs() < 1e-10);
        // a root at negative values cannot be reached while staying positive
        let g = |u: &[f64]| Ok(vec![u[0] + 1.0]);
        let jg = |_: &[f64]| Ok(CscMatrix::identity(1));
        let cfg = NewtonConfig {
            max_backtracks: 5,
            ..Default::default()
        };
        assert!(matches!(
            newton_step_solve(g, jg, &[1.0], &cfg, &mut LinearSolver::new()),
            Err(SolverError::PositivityBacktrackExhausted(5))
        ));
    }

    #[test]
    fn max_iter_reported() {
        let cfg = NewtonConfig {
            max_iter: 1,
            ..Default::default()
        };
        assert!(matches!(
            newton_step_solve(f, j, &[1.0, 1.0], &cfg, &mut LinearSolver::new()),
            Err(SolverError::NoConvergence { iterations: 1, .. })
        ));
        assert!(NewtonConfig { damping: 0.0, ..Default::default() }.validate().is_err());
    }
}
