//! Long-time decay of the relative energy towards the discrete equilibrium.

use std::fmt::Write as _;

use crate::error::Error;
use crate::harness::cases::TestCase;
use crate::harness::study::sci;
use crate::mesh::DdfvMesh;
use crate::scheme::{relative_energy, split_masses, stationary_state, stationary_state_split, RunReport, Scheme};
use crate::solver::NewtonConfig;

/// Relative energies at or below this level are treated as converged.
pub const SATURATION: f64 = 1e-12;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ExpFit {
    /// Least-squares slope of `log(𝔼^n − 𝔼^∞)` against `t^n`.
    pub slope: f64,
    pub intercept: f64,
    pub r_squared: f64,
    /// Number of samples in the fit.
    pub points: usize,
}

impl ExpFit {
    /// Decay rate `−slope`.
    pub fn rate(&self) -> f64 {
        -self.slope
    }
}

#[derive(Debug, Clone)]
pub struct LongTimeResult {
    /// `(n, t^n, 𝔼^n − 𝔼^∞)`
    pub series: Vec<(usize, f64, f64)>,
    /// Index one past the last sample above [`SATURATION`] in the leading run.
    pub pre_saturation: usize,
    /// `None` when fewer than three samples lie above the cutoff.
    pub fit: Option<ExpFit>,
    pub report: RunReport,
}

impl LongTimeResult {
    pub fn saturated(&self) -> bool {
        self.fit.is_none()
    }

    /// `𝔼^{n+1} − 𝔼^∞ ≤ 𝔼^n − 𝔼^∞ + slack` over the whole series.
    pub fn nonincreasing(&self, slack: f64) -> bool {
        self.series.windows(2).all(|w| w[1].2 <= w[0].2 + slack)
    }

    /// Strict decrease over the pre-saturation range.
    pub fn strictly_decreasing(&self) -> bool {
        self.series[..self.pre_saturation].windows(2).all(|w| w[1].2 < w[0].2)
    }

    pub fn to_csv(&self) -> String {
        let mut s = String::from("n,t,relative_energy\n");
        for (n, t, e) in &self.series {
            let _ = writeln!(s, "{n},{},{}", sci(*t), sci(*e));
        }
        s
    }

    pub fn summary(&self) -> String {
        match &self.fit {
            Some(f) => format!(
                "rate {}  slope {}  R^2 {:.6}  points {}",
                sci(f.rate()),
                sci(f.slope),
                f.r_squared,
                f.points
            ),
            None => "saturated".into(),
        }
    }
}

/// Leading run of samples above `cutoff`.
pub fn pre_saturation_len(values: &[f64], cutoff: f64) -> usize {
    values.iter().position(|&e| !(e > cutoff)).unwrap_or(values.len())
}

/// Least-squares line through `(t, log e)` for the leading samples above `cutoff`.
pub fn fit_exponential(t: &[f64], e: &[f64], cutoff: f64) -> Option<ExpFit> {
    let m = pre_saturation_len(e, cutoff);
    if m < 3 {
        return None;
    }
    let x = &t[..m];
    let y: Vec<f64> = e[..m].iter().map(|v| v.ln()).collect();
    let mf = m as f64;
    let (mx, my) = (x.iter().sum::<f64>() / mf, y.iter().sum::<f64>() / mf);
    let sxx: f64 = x.iter().map(|a| (a - mx).powi(2)).sum();
    let sxy: f64 = x.iter().zip(&y).map(|(a, b)| (a - mx) * (b - my)).sum();
    let syy: f64 = y.iter().map(|b| (b - my).powi(2)).sum();
    if sxx == 0.0 {
        return None;
    }
    let slope = sxy / sxx;
    let r_squared = if syy == 0.0 { 1.0 } else { sxy * sxy / (sxx * syy) };
    Some(ExpFit {
        slope,
        intercept: my - slope * mx,
        r_squared,
        points: m,
    })
}

/// Runs `case` on `mesh` for `n_steps` steps of size `dt` and records the
/// relative energy against the equilibrium with the same masses: separate
/// primal and dual masses when `κ = 0` (both are conserved), the total mass
/// otherwise.
pub fn longtime_study(
    case: &TestCase,
    mesh: &DdfvMesh,
    dt: f64,
    n_steps: usize,
    kappa: f64,
    newton: NewtonConfig,
) -> Result<LongTimeResult, Error> {
    let params = case.params(dt, dt * n_steps as f64, kappa, 1.0, newton);
    let scheme = Scheme::new(mesh, params)?;
    let u0 = case.initial_state(mesh)?;
    let u_inf = if kappa == 0.0 {
        let (p, d) = split_masses(mesh, &u0);
        stationary_state_split(mesh, scheme.potential(), p, d)
    } else {
        let total = crate::scheme::mass(mesh, &u0);
        stationary_state(mesh, scheme.potential(), total)
    };
    let mut series = Vec::with_capacity(n_steps + 1);
    let report = scheme
        .run(&u0, |n, t, u| series.push((n, t, relative_energy(mesh, u, &u_inf))))
        .map_err(|f| f.error)?;
    let t: Vec<f64> = series.iter().map(|s| s.1).collect();
    let e: Vec<f64> = series.iter().map(|s| s.2).collect();
    Ok(LongTimeResult {
        pre_saturation: pre_saturation_len(&e, SATURATION),
        fit: fit_exponential(&t, &e, SATURATION),
        series,
        report,
    })
}
