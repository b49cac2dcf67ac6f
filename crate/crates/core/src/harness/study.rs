//! Mesh-refinement convergence studies.

use std::fmt::Write as _;

use crate::error::Error;
use crate::harness::cases::TestCase;
use crate::harness::errors::ErrorAccumulator;
use crate::mesh::{DdfvMesh, MeshFamily};
use crate::scheme::Scheme;
use crate::solver::NewtonConfig;

pub const CSV_HEADER: &str = "level,h,dt,erru,ordu,errgu,ordgu,normU,ordU,newton_max,newton_mean,min_u";

#[derive(Debug, Clone)]
pub struct StudyConfig {
    pub family: MeshFamily,
    /// Mesh parameter `n` of each level, coarsest first.
    pub levels: Vec<usize>,
    /// Time step of the first level; divided by 4 per level.
    pub dt0: f64,
    /// Final time; the case's own when `None`.
    pub t_final: Option<f64>,
    pub kappa: f64,
    pub beta: f64,
    pub newton: NewtonConfig,
    /// Run the levels on separate threads.
    pub parallel: bool,
}

impl StudyConfig {
    pub fn new(family: MeshFamily, levels: Vec<usize>, dt0: f64) -> Self {
        Self {
            family,
            levels,
            dt0,
            t_final: None,
            kappa: 0.0,
            beta: 1.0,
            newton: NewtonConfig::default(),
            parallel: true,
        }
    }

    pub fn level_dt(&self, i: usize) -> f64 {
        self.dt0 / 4f64.powi(i as i32)
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct ConvergenceRow {
    /// 1-based level index.
    pub level: usize,
    pub n: usize,
    pub h: f64,
    /// Effective time step `T / N_T`.
    pub dt: f64,
    pub erru: f64,
    pub ordu: Option<f64>,
    pub errgu: f64,
    pub ordgu: Option<f64>,
    pub norm_u: f64,
    pub ord_u: Option<f64>,
    pub newton_max: usize,
    pub newton_mean: f64,
    pub min_u: f64,
    pub floor_activated: bool,
    /// Largest relative mass drift from the initial state.
    pub mass_drift: f64,
    pub violations: Vec<String>,
    pub failure: Option<String>,
}

impl ConvergenceRow {
    fn failed(level: usize, n: usize, h: f64, dt: f64, msg: String) -> Self {
        Self {
            level,
            n,
            h,
            dt,
            erru: f64::NAN,
            ordu: None,
            errgu: f64::NAN,
            ordgu: None,
            norm_u: f64::NAN,
            ord_u: None,
            newton_max: 0,
            newton_mean: f64::NAN,
            min_u: f64::NAN,
            floor_activated: false,
            mass_drift: f64::NAN,
            violations: Vec::new(),
            failure: Some(msg),
        }
    }
}

#[derive(Debug, Clone)]
pub struct ConvergenceTable {
    pub case: String,
    pub family: MeshFamily,
    pub kappa: f64,
    pub rows: Vec<ConvergenceRow>,
}

/// `log(e_i/e_{i+1}) / log(h_i/h_{i+1})`; `None` for the first entry.
pub fn orders(h: &[f64], e: &[f64]) -> Vec<Option<f64>> {
    assert_eq!(h.len(), e.len());
    (0..e.len())
        .map(|i| (i > 0).then(|| (e[i - 1] / e[i]).ln() / (h[i - 1] / h[i]).ln()))
        .collect()
}

/// Scientific notation with six significant digits.
pub fn sci(x: f64) -> String {
    format!("{x:.5e}")
}

fn opt_sci(x: Option<f64>) -> String {
    x.map(sci).unwrap_or_default()
}

impl ConvergenceTable {
    fn fill_orders(&mut self) {
        let h: Vec<f64> = self.rows.iter().map(|r| r.h).collect();
        let col = |f: fn(&ConvergenceRow) -> f64| orders(&h, &self.rows.iter().map(f).collect::<Vec<_>>());
        let (ou, og, on) = (col(|r| r.erru), col(|r| r.errgu), col(|r| r.norm_u));
        for (i, r) in self.rows.iter_mut().enumerate() {
            r.ordu = ou[i];
            r.ordgu = og[i];
            r.ord_u = on[i];
        }
    }

    pub fn to_csv(&self) -> String {
        let mut s = String::from(CSV_HEADER);
        s.push('\n');
        for r in &self.rows {
            let _ = writeln!(
                s,
                "{},{},{},{},{},{},{},{},{},{},{},{}",
                r.level,
                sci(r.h),
                sci(r.dt),
                sci(r.erru),
                opt_sci(r.ordu),
                sci(r.errgu),
                opt_sci(r.ordgu),
                sci(r.norm_u),
                opt_sci(r.ord_u),
                r.newton_max,
                sci(r.newton_mean),
                sci(r.min_u)
            );
        }
        s
    }

    /// Column-aligned table with the same columns as the CSV, followed by
    /// one line per failed level or invariant violation.
    pub fn to_text(&self) -> String {
        let header: Vec<&str> = CSV_HEADER.split(',').collect();
        let mut cells: Vec<Vec<String>> = vec![header.iter().map(|s| s.to_string()).collect()];
        for r in &self.rows {
            let ord = |o: Option<f64>| o.map(|x| format!("{x:.3}")).unwrap_or_else(|| "---".into());
            cells.push(vec![
                r.level.to_string(),
                sci(r.h),
                sci(r.dt),
                sci(r.erru),
                ord(r.ordu),
                sci(r.errgu),
                ord(r.ordgu),
                sci(r.norm_u),
                ord(r.ord_u),
                r.newton_max.to_string(),
                format!("{:.2}", r.newton_mean),
                sci(r.min_u),
            ]);
        }
        let widths: Vec<usize> = (0..header.len())
            .map(|c| cells.iter().map(|row| row[c].len()).max().unwrap_or(0))
            .collect();
        let mut s = format!("case {}  family {}  kappa {}\n", self.case, self.family.name(), self.kappa);
        for row in &cells {
            let line: Vec<String> = row.iter().zip(&widths).map(|(c, w)| format!("{c:>w$}")).collect();
            s.push_str(line.join("  ").trim_end());
            s.push('\n');
        }
        for r in &self.rows {
            if let Some(f) = &r.failure {
                let _ = writeln!(s, "level {} failed: {f}", r.level);
            }
            for v in &r.violations {
                let _ = writeln!(s, "level {}: {v}", r.level);
            }
        }
        s
    }
}

/// Runs one level: mesh `n` of `family`, time step `dt`.
pub fn run_level(case: &TestCase, cfg: &StudyConfig, level: usize) -> Result<ConvergenceRow, Error> {
    let n = cfg.levels[level];
    let mesh = DdfvMesh::build(cfg.family.generate(n)?)?;
    let t_final = cfg.t_final.unwrap_or(case.t_final);
    let params = case.params(cfg.level_dt(level), t_final, cfg.kappa, cfg.beta, cfg.newton.clone());
    let dt = params.effective_dt();
    let scheme = Scheme::new(&mesh, params)?;
    let u0 = case.initial_state(&mesh)?;
    let mut acc = ErrorAccumulator::new();
    let exact = case.exact.as_ref();
    let result = scheme.run(&u0, |k, t, u| acc.push(&mesh, k, t, dt, u, exact));
    let report = match result {
        Ok(r) => r,
        Err(f) => return Ok(ConvergenceRow::failed(level + 1, n, mesh.size(), dt, f.to_string())),
    };
    let (erru, errgu) = if exact.is_some() { (acc.erru(), acc.errgu()) } else { (f64::NAN, f64::NAN) };
    Ok(ConvergenceRow {
        level: level + 1,
        n,
        h: mesh.size(),
        dt,
        erru,
        ordu: None,
        errgu,
        ordgu: None,
        norm_u: acc.norm_gap(),
        ord_u: None,
        newton_max: report.newton_max(),
        newton_mean: report.newton_mean(),
        min_u: report.min_u(),
        floor_activated: report.floor_activated(),
        mass_drift: report.max_relative_mass_drift(),
        violations: report.violations,
        failure: None,
    })
}

/// Runs every level of `cfg` on `case` and fills in the observed orders.
/// Mesh and parameter errors abort the study; solver failures are recorded
/// in the row of the level concerned.
pub fn convergence_study(case: &TestCase, cfg: &StudyConfig) -> Result<ConvergenceTable, Error> {
    if cfg.levels.len() < 2 {
        return Err(Error::Config("a convergence study needs at least two levels".into()));
    }
    let rows: Vec<Result<ConvergenceRow, Error>> = if cfg.parallel {
        std::thread::scope(|s| {
            let handles: Vec<_> = (0..cfg.levels.len()).map(|i| s.spawn(move || run_level(case, cfg, i))).collect();
            handles.into_iter().map(|h| h.join().expect("study level panicked")).collect()
        })
    } else {
        (0..cfg.levels.len()).map(|i| run_level(case, cfg, i)).collect()
    };
    let mut table = ConvergenceTable {
        case: case.name.clone(),
        family: cfg.family,
        kappa: cfg.kappa,
        rows: rows.into_iter().collect::<Result<_, _>>()?,
    };
    table.fill_orders();
    Ok(table)
}
