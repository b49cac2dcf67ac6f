use std::fmt::Write as _;
use std::path::{Path, PathBuf};

use ddfv::harness::{convergence_study, longtime_study, run_property_suite, StudyConfig};
use ddfv::mesh::io::format_mesh;
use ddfv::mesh::{quality, read_mesh, write_mesh, DdfvMesh, MeshFamily};
use ddfv::scheme::{RunReport, Scheme, StateRecord};
use ddfv::TensorSpec;

use crate::config::RunConfig;
use crate::CliError;

pub fn mesh_gen(family: &str, n: usize, param: Option<f64>, out: Option<PathBuf>) -> Result<(), CliError> {
    let fam = MeshFamily::parse(family, param)
        .ok_or_else(|| CliError::config(format!("unknown mesh family `{family}` (expected uniform, quad or kershaw)")))?;
    let primal = fam.generate(n)?;
    let mesh = DdfvMesh::build(primal.clone())?;
    let path = out.unwrap_or_else(|| PathBuf::from(format!("mesh_{}_{n}.txt", fam.name())));
    if let Some(dir) = path.parent().filter(|d| !d.as_os_str().is_empty()) {
        std::fs::create_dir_all(dir)?;
    }
    write_mesh(&primal, &path)?;
    println!("wrote {}", path.display());
    print!("{}", quality(&mesh, None).summary());
    Ok(())
}

pub fn mesh_inspect(path: &Path, lambda: Option<&str>) -> Result<(), CliError> {
    let read = read_mesh(path)?;
    for w in &read.warnings {
        println!("warning: {w}");
    }
    let mesh = DdfvMesh::build(read.mesh)?;
    let tensor = match lambda {
        Some(s) => Some(TensorSpec::parse(s).ok_or_else(|| CliError::config(format!("cannot parse tensor `{s}`")))?),
        None => None,
    };
    let report = quality(&mesh, tensor.as_ref());
    print!("{}", report.summary());
    let defects = mesh.verify(1e-12);
    for d in &defects {
        println!("defect: {d}");
    }
    if !defects.is_empty() {
        return Err(CliError::config(format!("{} geometric defects", defects.len())));
    }
    if report.cond_bound_holds() == Some(false) {
        return Err(CliError::config("condition number bound violated"));
    }
    Ok(())
}

pub fn mesh_convert(input: &Path, output: &Path) -> Result<(), CliError> {
    let read = read_mesh(input)?;
    for w in &read.warnings {
        println!("warning: {w}");
    }
    DdfvMesh::build(read.mesh.clone())?;
    std::fs::write(output, format_mesh(&read.mesh))?;
    println!("wrote {}", output.display());
    Ok(())
}

const TRACE_HEADER: &str = "step,t,mass,primal_mass,dual_mass,energy,dissipation,dissipation_hat,penalization,\
min_u,min_all,newton_iterations,newton_residual,backtracks,floor_activated";

fn trace_line(r: &StateRecord) -> String {
    format!(
        "{},{:e},{:e},{:e},{:e},{:e},{:e},{:e},{:e},{:e},{:e},{},{:e},{},{}",
        r.step,
        r.t,
        r.mass,
        r.primal_mass,
        r.dual_mass,
        r.energy,
        r.dissipation,
        r.dissipation_hat,
        r.penalization,
        r.min_u,
        r.min_all,
        r.newton.iterations,
        r.newton.residual,
        r.newton.backtracks,
        u8::from(r.newton.floor_activated)
    )
}

/// Full-precision per-step trace.
pub fn trace_csv(report: &RunReport) -> String {
    let mut s = String::from(TRACE_HEADER);
    s.push('\n');
    for r in &report.records {
        s.push_str(&trace_line(r));
        s.push('\n');
    }
    s
}

fn run_summary(report: &RunReport) -> String {
    let e0 = report.records.first().map(|r| r.energy).unwrap_or(f64::NAN);
    let e1 = report.records.last().map(|r| r.energy).unwrap_or(f64::NAN);
    let mut s = String::new();
    let _ = writeln!(s, "steps            {}", report.records.len().saturating_sub(1));
    let _ = writeln!(s, "dt               {:e}", report.dt);
    let _ = writeln!(s, "dt/h             {:e}", report.cfl_ratio);
    let _ = writeln!(s, "energy           {e0:e} -> {e1:e}");
    let _ = writeln!(s, "max mass drift   {:e}", report.max_relative_mass_drift());
    let _ = writeln!(s, "newton max/mean  {} / {:.3}", report.newton_max(), report.newton_mean());
    let _ = writeln!(s, "floor activated  {}", report.floor_activated());
    let _ = writeln!(s, "min u            {:e}", report.min_u());
    let _ = writeln!(s, "violations       {}", report.violations.len());
    for v in &report.violations {
        let _ = writeln!(s, "  {v}");
    }
    s
}

pub fn run(cfg: &RunConfig) -> Result<(), CliError> {
    let case = cfg.test_case()?;
    let mesh = cfg.build_mesh()?;
    let params = case.params(cfg.dt, cfg.t_final(&case), cfg.kappa, cfg.beta, cfg.newton());
    let scheme = Scheme::new(&mesh, params)?;
    let u0 = case.initial_state(&mesh)?;
    cfg.write_effective()?;
    let (report, failure) = match scheme.run(&u0, |_, _, _| {}) {
        Ok(r) => (r, None),
        Err(f) => (f.report, Some(f.error)),
    };
    std::fs::write(cfg.out.join("trace.csv"), trace_csv(&report))?;
    let summary = run_summary(&report);
    std::fs::write(cfg.out.join("summary.txt"), &summary)?;
    print!("{summary}");
    if let Some(e) = failure {
        return Err(CliError::solver(format!("step {}: {e}", report.records.len())));
    }
    if !report.violations.is_empty() {
        return Err(CliError::property(format!("{} invariant violations", report.violations.len())));
    }
    Ok(())
}

pub fn converge(cfg: &RunConfig, parallel: bool) -> Result<(), CliError> {
    if cfg.mesh.is_some() {
        return Err(CliError::config("a convergence study needs a mesh family, not a mesh file"));
    }
    let case = cfg.test_case()?;
    let mut study = StudyConfig::new(cfg.mesh_family()?, cfg.levels.clone(), cfg.dt);
    study.t_final = Some(cfg.t_final(&case));
    study.kappa = cfg.kappa;
    study.beta = cfg.beta;
    study.newton = cfg.newton();
    study.parallel = parallel;
    // parameter errors surface before any level runs
    case.params(cfg.dt, cfg.t_final(&case), cfg.kappa, cfg.beta, cfg.newton()).validate()?;
    cfg.write_effective()?;
    let table = convergence_study(&case, &study)?;
    std::fs::write(cfg.out.join("convergence.csv"), table.to_csv())?;
    let text = table.to_text();
    std::fs::write(cfg.out.join("convergence.txt"), &text)?;
    print!("{text}");
    if let Some(r) = table.rows.iter().find(|r| r.failure.is_some()) {
        return Err(CliError::solver(format!("level {} failed", r.level)));
    }
    if table.rows.iter().any(|r| !r.violations.is_empty()) {
        return Err(CliError::property("invariant violations in the study"));
    }
    Ok(())
}

fn plot_script(csv: &str) -> String {
    format!(
        "# gnuplot script for the relative-energy decay\n\
         set datafile separator ','\n\
         set logscale y\n\
         set xlabel 't'\n\
         set ylabel 'E^n - E^inf'\n\
         plot '{csv}' every ::1 using 2:3 with lines title 'relative energy'\n"
    )
}

pub fn longtime(cfg: &RunConfig) -> Result<(), CliError> {
    let case = cfg.test_case()?;
    let mesh = cfg.build_mesh()?;
    let t_final = cfg.t_final(&case);
    let params = case.params(cfg.dt, t_final, cfg.kappa, cfg.beta, cfg.newton());
    params.validate()?;
    let (dt, steps) = (params.effective_dt(), params.n_steps());
    cfg.write_effective()?;
    let result = longtime_study(&case, &mesh, dt, steps, cfg.kappa, cfg.newton())?;
    std::fs::write(cfg.out.join("longtime.csv"), result.to_csv())?;
    std::fs::write(cfg.out.join("plot_energy.gp"), plot_script("longtime.csv"))?;
    let summary = format!(
        "steps {steps}  dt {dt:e}\ninitial relative energy {:e}\nfinal relative energy {:e}\n{}\n",
        result.series.first().map(|s| s.2).unwrap_or(f64::NAN),
        result.series.last().map(|s| s.2).unwrap_or(f64::NAN),
        result.summary()
    );
    std::fs::write(cfg.out.join("longtime.txt"), &summary)?;
    print!("{summary}");
    Ok(())
}

pub fn check(cfg: &RunConfig) -> Result<(), CliError> {
    let report = run_property_suite(cfg.seed);
    let text = report.to_string();
    println!("{text}");
    cfg.write_effective()?;
    std::fs::write(cfg.out.join("check.txt"), format!("{text}\n"))?;
    if !report.passed() {
        return Err(CliError::property("property suite failed"));
    }
    Ok(())
}
