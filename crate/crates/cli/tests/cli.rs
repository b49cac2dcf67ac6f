use std::path::Path;
use std::process::{Command, Output};

fn ddfv(dir: &Path, args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_ddfv"))
        .current_dir(dir)
        .args(args)
        .output()
        .expect("binary runs")
}

fn stdout(o: &Output) -> String {
    String::from_utf8_lossy(&o.stdout).into_owned()
}

fn report_value(text: &str, key: &str) -> f64 {
    text.lines()
        .find_map(|l| l.strip_prefix(key))
        .and_then(|r| r.trim().strip_prefix('=').map(|v| v.trim().parse().unwrap()))
        .unwrap_or_else(|| panic!("`{key}` missing in\n{text}"))
}

fn csv_rows(path: &Path) -> Vec<Vec<String>> {
    std::fs::read_to_string(path)
        .unwrap()
        .lines()
        .skip(1)
        .map(|l| l.split(',').map(str::to_owned).collect())
        .collect()
}

#[test]
fn mesh_gen_and_inspect_uniform() {
    let dir = tempfile::tempdir().unwrap();
    let o = ddfv(dir.path(), &["mesh", "gen", "--family", "uniform", "--n", "4"]);
    assert!(o.status.success(), "{o:?}");
    let file = dir.path().join("mesh_uniform_4.txt");
    let read = ddfv::mesh::read_mesh(&file).unwrap();
    assert_eq!(read.mesh.n_cells(), 16);

    let o = ddfv(dir.path(), &["mesh", "inspect", "mesh_uniform_4.txt", "--lambda", "identity"]);
    assert!(o.status.success(), "{o:?}");
    let text = stdout(&o);
    assert_eq!(report_value(&text, "theta_D interior max"), 1.0);
    assert_eq!(report_value(&text, "min sin(alpha)"), 1.0);
    assert!(text.contains("cells 16"));
}

#[test]
fn kershaw_report_is_distorted() {
    let dir = tempfile::tempdir().unwrap();
    let o = ddfv(dir.path(), &["mesh", "gen", "--family", "kershaw", "--n", "16", "--out", "k.txt"]);
    assert!(o.status.success(), "{o:?}");
    let text = stdout(&o);
    assert!(report_value(&text, "theta*") > 1.0);
    assert!(report_value(&text, "theta_D interior max") > 1.0);
}

#[test]
fn mesh_convert_round_trip() {
    let dir = tempfile::tempdir().unwrap();
    assert!(ddfv(dir.path(), &["mesh", "gen", "--family", "quad", "--n", "6", "--out", "a.txt"]).status.success());
    let o = ddfv(dir.path(), &["mesh", "convert", "a.txt", "b.txt"]);
    assert!(o.status.success(), "{o:?}");
    let a = ddfv::mesh::read_mesh(dir.path().join("a.txt")).unwrap().mesh;
    let b = ddfv::mesh::read_mesh(dir.path().join("b.txt")).unwrap().mesh;
    assert_eq!(a.vertices(), b.vertices());
    assert_eq!(a.cells(), b.cells());
}

#[test]
fn invalid_mesh_file_exits_with_config_code() {
    let dir = tempfile::tempdir().unwrap();
    std::fs::write(dir.path().join("bad.txt"), "this is not a mesh\n").unwrap();
    let o = ddfv(dir.path(), &["mesh", "inspect", "bad.txt"]);
    assert_eq!(o.status.code(), Some(2));
}

#[test]
fn beta_out_of_range_is_a_config_error() {
    let dir = tempfile::tempdir().unwrap();
    let o = ddfv(dir.path(), &["run", "--case", "exact", "--beta", "3", "--out", "o"]);
    assert_eq!(o.status.code(), Some(2));
    assert!(String::from_utf8_lossy(&o.stderr).contains("(0,2)"));
}

#[test]
fn unknown_config_key_is_rejected() {
    let dir = tempfile::tempdir().unwrap();
    std::fs::write(dir.path().join("c.cfg"), "dt = 0.01\nwobble = 3\n").unwrap();
    let o = ddfv(dir.path(), &["run", "--config", "c.cfg"]);
    assert_eq!(o.status.code(), Some(2));
}

#[test]
fn equilibrium_run_keeps_energy_constant() {
    let dir = tempfile::tempdir().unwrap();
    let o = ddfv(
        dir.path(),
        &["run", "--case", "equilibrium", "--family", "quad", "--n", "8", "--dt", "0.01", "--tfinal", "0.1", "--out", "o"],
    );
    assert!(o.status.success(), "{o:?}");
    let rows = csv_rows(&dir.path().join("o/trace.csv"));
    assert_eq!(rows.len(), 11);
    let energy: Vec<f64> = rows.iter().map(|r| r[5].parse().unwrap()).collect();
    assert!(energy.iter().all(|e| (e - energy[0]).abs() < 1e-12), "{energy:?}");
    // Newton iterations stay at most one
    assert!(rows.iter().all(|r| r[11].parse::<usize>().unwrap() <= 1));
}

#[test]
fn exact_run_writes_trace_with_decreasing_energy() {
    let dir = tempfile::tempdir().unwrap();
    let o = ddfv(
        dir.path(),
        &["run", "--case", "exact", "--family", "quad", "--n", "8", "--dt", "0.01", "--tfinal", "0.1", "--kappa", "0.1", "--out", "o"],
    );
    assert!(o.status.success(), "{o:?}");
    let rows = csv_rows(&dir.path().join("o/trace.csv"));
    let energy: Vec<f64> = rows.iter().map(|r| r[5].parse().unwrap()).collect();
    assert!(energy.windows(2).all(|w| w[1] <= w[0] + 1e-12));
    let mass: Vec<f64> = rows.iter().map(|r| r[2].parse().unwrap()).collect();
    assert!(mass.iter().all(|m| (m - mass[0]).abs() <= 1e-11 * mass[0]));
}

#[test]
fn converge_writes_exact_header() {
    let dir = tempfile::tempdir().unwrap();
    let o = ddfv(
        dir.path(),
        &["converge", "--case", "exact", "--family", "uniform", "--levels", "4,8", "--dt", "0.02", "--tfinal", "0.1", "--out", "c"],
    );
    assert!(o.status.success(), "{o:?}");
    let csv = std::fs::read_to_string(dir.path().join("c/convergence.csv")).unwrap();
    let mut lines = csv.lines();
    assert_eq!(
        lines.next().unwrap(),
        "level,h,dt,erru,ordu,errgu,ordgu,normU,ordU,newton_max,newton_mean,min_u"
    );
    let first: Vec<&str> = lines.next().unwrap().split(',').collect();
    assert_eq!(first[0], "1");
    assert_eq!(first[4], "");
    let second: Vec<&str> = lines.next().unwrap().split(',').collect();
    assert_eq!(second[2], "5.00000e-3");
    assert!(second[4].parse::<f64>().unwrap() > 0.5);
    assert!(dir.path().join("c/convergence.txt").exists());
}

#[test]
fn constant_case_has_zero_errors() {
    let dir = tempfile::tempdir().unwrap();
    let o = ddfv(
        dir.path(),
        &["converge", "--case", "constant", "--family", "kershaw", "--levels", "4,8", "--dt", "0.05", "--tfinal", "0.1", "--out", "c"],
    );
    assert!(o.status.success(), "{o:?}");
    for r in csv_rows(&dir.path().join("c/convergence.csv")) {
        for col in [3, 5, 7] {
            assert!(r[col].parse::<f64>().unwrap() < 1e-12, "{r:?}");
        }
    }
}

#[test]
fn check_is_deterministic() {
    let dir = tempfile::tempdir().unwrap();
    let a = ddfv(dir.path(), &["check", "--seed", "42", "--out", "a"]);
    let b = ddfv(dir.path(), &["check", "--seed", "42", "--out", "b"]);
    assert!(a.status.success(), "{a:?}");
    assert_eq!(a.stdout, b.stdout);
    assert!(stdout(&a).contains("all properties hold"));
}

#[test]
fn longtime_from_equilibrium_is_saturated() {
    let dir = tempfile::tempdir().unwrap();
    let o = ddfv(
        dir.path(),
        &["longtime", "--case", "equilibrium", "--family", "uniform", "--n", "8", "--dt", "0.05", "--tfinal", "0.5", "--out", "l"],
    );
    assert!(o.status.success(), "{o:?}");
    assert!(stdout(&o).contains("saturated"));
    assert!(dir.path().join("l/longtime.csv").exists());
    assert!(dir.path().join("l/plot_energy.gp").exists());
}

#[test]
fn longtime_relaxation_reports_a_rate() {
    let dir = tempfile::tempdir().unwrap();
    let o = ddfv(
        dir.path(),
        &["longtime", "--case", "relaxation", "--family", "uniform", "--n", "8", "--dt", "0.01", "--tfinal", "0.5", "--out", "l"],
    );
    assert!(o.status.success(), "{o:?}");
    assert!(stdout(&o).contains("rate"), "{}", stdout(&o));
}

#[test]
fn effective_config_reproduces_the_run() {
    let dir = tempfile::tempdir().unwrap();
    let o = ddfv(
        dir.path(),
        &["run", "--case", "exact", "--family", "kershaw", "--n", "8", "--dt", "0.02", "--tfinal", "0.06", "--lambda", "diag:1,5,0.4", "--out", "first"],
    );
    assert!(o.status.success(), "{o:?}");
    let o = ddfv(dir.path(), &["run", "--config", "first/effective_config", "--out", "second"]);
    assert!(o.status.success(), "{o:?}");
    let a = std::fs::read(dir.path().join("first/trace.csv")).unwrap();
    let b = std::fs::read(dir.path().join("second/trace.csv")).unwrap();
    assert_eq!(a, b);
}

#[test]
fn mesh_file_input() {
    let dir = tempfile::tempdir().unwrap();
    assert!(ddfv(dir.path(), &["mesh", "gen", "--family", "quad", "--n", "6", "--out", "m.txt"]).status.success());
    let o = ddfv(dir.path(), &["run", "--mesh", "m.txt", "--dt", "0.02", "--tfinal", "0.04", "--out", "o"]);
    assert!(o.status.success(), "{o:?}");
    assert_eq!(csv_rows(&dir.path().join("o/trace.csv")).len(), 3);
}
