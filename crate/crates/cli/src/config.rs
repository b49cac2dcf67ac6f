//! Flat `key = value` run configuration.

use std::fmt::Write as _;
use std::path::{Path, PathBuf};

use ddfv::harness::{case_by_name, TestCase, CASE_NAMES};
use ddfv::mesh::{read_mesh, DdfvMesh, MeshFamily};
use ddfv::solver::NewtonConfig;
use ddfv::TensorSpec;

use crate::CliError;

#[derive(Debug, Clone, PartialEq)]
pub struct RunConfig {
    pub case: String,
    pub family: String,
    pub n: usize,
    /// Amplitude (quad) or slope (kershaw); family default when `None`.
    pub family_param: Option<f64>,
    /// Mesh file; overrides `family` and `n` when set.
    pub mesh: Option<PathBuf>,
    pub dt: f64,
    /// Final time; the case's own when `None`.
    pub tfinal: Option<f64>,
    pub kappa: f64,
    pub beta: f64,
    pub lambda: String,
    pub newton_tol: f64,
    pub newton_max_iter: usize,
    pub newton_floor: f64,
    pub newton_max_backtracks: usize,
    pub levels: Vec<usize>,
    pub out: PathBuf,
    pub seed: u64,
}

impl Default for RunConfig {
    fn default() -> Self {
        let nc = NewtonConfig::default();
        Self {
            case: "exact".into(),
            family: "quad".into(),
            n: 8,
            family_param: None,
            mesh: None,
            dt: 4e-3,
            tfinal: None,
            kappa: 0.0,
            beta: 1.0,
            lambda: "identity".into(),
            newton_tol: nc.tol,
            newton_max_iter: nc.max_iter,
            newton_floor: nc.floor,
            newton_max_backtracks: nc.max_backtracks,
            levels: vec![8, 16, 32],
            out: PathBuf::from("out"),
            seed: 42,
        }
    }
}

fn bad(key: &str, value: &str, what: &str) -> CliError {
    CliError::config(format!("{key} = {value}: {what}"))
}

fn num<T: std::str::FromStr>(key: &str, value: &str) -> Result<T, CliError> {
    value.parse().map_err(|_| bad(key, value, "not a valid number"))
}

impl RunConfig {
    /// Sets one key from its textual value.
    pub fn set(&mut self, key: &str, value: &str) -> Result<(), CliError> {
        let v = value.trim();
        match key {
            "case" => self.case = v.to_string(),
            "family" => self.family = v.to_string(),
            "n" => self.n = num(key, v)?,
            "family_param" => self.family_param = if v.is_empty() { None } else { Some(num(key, v)?) },
            "mesh" => self.mesh = if v.is_empty() { None } else { Some(PathBuf::from(v)) },
            "dt" => self.dt = num(key, v)?,
            "tfinal" => self.tfinal = if v.is_empty() { None } else { Some(num(key, v)?) },
            "kappa" => self.kappa = num(key, v)?,
            "beta" => self.beta = num(key, v)?,
            "lambda" => self.lambda = v.to_string(),
            "newton_tol" => self.newton_tol = num(key, v)?,
            "newton_max_iter" => self.newton_max_iter = num(key, v)?,
            "newton_floor" => self.newton_floor = num(key, v)?,
            "newton_max_backtracks" => self.newton_max_backtracks = num(key, v)?,
            "levels" => {
                self.levels = v
                    .split(',')
                    .map(|s| num(key, s.trim()))
                    .collect::<Result<_, _>>()?
            }
            "out" => self.out = PathBuf::from(v),
            "seed" => self.seed = num(key, v)?,
            _ => return Err(CliError::config(format!("unknown configuration key `{key}`"))),
        }
        Ok(())
    }

    /// Applies a configuration file on top of `self`.
    pub fn merge_text(&mut self, text: &str) -> Result<(), CliError> {
        for (i, line) in text.lines().enumerate() {
            let line = line.split('#').next().unwrap_or("").trim();
            if line.is_empty() {
                continue;
            }
            let (k, v) = line
                .split_once('=')
                .ok_or_else(|| CliError::config(format!("line {}: expected `key = value`", i + 1)))?;
            self.set(k.trim(), v)?;
        }
        Ok(())
    }

    pub fn merge_file(&mut self, path: &Path) -> Result<(), CliError> {
        let text = std::fs::read_to_string(path)
            .map_err(|e| CliError::config(format!("cannot read {}: {e}", path.display())))?;
        self.merge_text(&text)
    }

    /// Every key with its value; floats use the shortest representation
    /// that parses back to the same number.
    pub fn render(&self) -> String {
        let opt = |x: Option<f64>| x.map(|v| v.to_string()).unwrap_or_default();
        let mut s = String::new();
        let _ = writeln!(s, "case = {}", self.case);
        let _ = writeln!(s, "family = {}", self.family);
        let _ = writeln!(s, "n = {}", self.n);
        let _ = writeln!(s, "family_param = {}", opt(self.family_param));
        let _ = writeln!(
            s,
            "mesh = {}",
            self.mesh.as_ref().map(|p| p.display().to_string()).unwrap_or_default()
        );
        let _ = writeln!(s, "dt = {}", self.dt);
        let _ = writeln!(s, "tfinal = {}", opt(self.tfinal));
        let _ = writeln!(s, "kappa = {}", self.kappa);
        let _ = writeln!(s, "beta = {}", self.beta);
        let _ = writeln!(s, "lambda = {}", self.lambda);
        let _ = writeln!(s, "newton_tol = {}", self.newton_tol);
        let _ = writeln!(s, "newton_max_iter = {}", self.newton_max_iter);
        let _ = writeln!(s, "newton_floor = {}", self.newton_floor);
        let _ = writeln!(s, "newton_max_backtracks = {}", self.newton_max_backtracks);
        let levels: Vec<String> = self.levels.iter().map(|l| l.to_string()).collect();
        let _ = writeln!(s, "levels = {}", levels.join(","));
        let _ = writeln!(s, "out = {}", self.out.display());
        let _ = writeln!(s, "seed = {}", self.seed);
        s
    }

    pub fn test_case(&self) -> Result<TestCase, CliError> {
        let case = case_by_name(&self.case).ok_or_else(|| {
            CliError::config(format!("unknown case `{}` (expected one of {})", self.case, CASE_NAMES.join(", ")))
        })?;
        let lambda = TensorSpec::parse(&self.lambda).ok_or_else(|| {
            bad("lambda", &self.lambda, "expected identity, diag:l1,l2[,angle] or const:a11,a12,a22")
        })?;
        Ok(case.with_lambda(lambda))
    }

    pub fn mesh_family(&self) -> Result<MeshFamily, CliError> {
        MeshFamily::parse(&self.family, self.family_param)
            .ok_or_else(|| bad("family", &self.family, "expected uniform, quad or kershaw"))
    }

    pub fn build_mesh(&self) -> Result<DdfvMesh, CliError> {
        let primal = match &self.mesh {
            Some(p) => {
                let r = read_mesh(p)?;
                for w in &r.warnings {
                    eprintln!("warning: {w}");
                }
                r.mesh
            }
            None => self.mesh_family()?.generate(self.n)?,
        };
        Ok(DdfvMesh::build(primal)?)
    }

    pub fn newton(&self) -> NewtonConfig {
        NewtonConfig {
            tol: self.newton_tol,
            max_iter: self.newton_max_iter,
            floor: self.newton_floor,
            max_backtracks: self.newton_max_backtracks,
            ..NewtonConfig::default()
        }
    }

    pub fn t_final(&self, case: &TestCase) -> f64 {
        self.tfinal.unwrap_or(case.t_final)
    }

    /// Writes `effective_config` into the output directory.
    pub fn write_effective(&self) -> Result<(), CliError> {
        std::fs::create_dir_all(&self.out)?;
        std::fs::write(self.out.join("effective_config"), self.render())?;
        Ok(())
    }
}
