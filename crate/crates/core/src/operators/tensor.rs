use std::fmt;
use std::sync::Arc;

use nalgebra::Matrix2;

use crate::error::SchemeError;
use crate::geometry::Point;
use crate::mesh::Diamond;

pub type Mat2 = Matrix2<f64>;

/// Anisotropy tensor `Λ`.
#[derive(Clone)]
pub enum TensorSpec {
    Identity,
    Constant(Mat2),
    /// `R(angle) diag(λ1, λ2) R(angle)ᵀ`.
    RotatedDiagonal { l1: f64, l2: f64, angle: f64 },
    /// Space-dependent tensor with user-supplied ellipticity bounds `(λ_m, λ^M)`.
    Field {
        f: Arc<dyn Fn(Point) -> Mat2 + Send + Sync>,
        bounds: (f64, f64),
    },
}

impl fmt::Debug for TensorSpec {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            TensorSpec::Identity => write!(f, "Identity"),
            TensorSpec::Constant(m) => write!(f, "Constant({m:?})"),
            TensorSpec::RotatedDiagonal { l1, l2, angle } => {
                write!(f, "RotatedDiagonal({l1}, {l2}, {angle})")
            }
            TensorSpec::Field { bounds, .. } => write!(f, "Field(bounds {bounds:?})"),
        }
    }
}

impl TensorSpec {
    pub fn rotated(l1: f64, l2: f64, angle: f64) -> Self {
        TensorSpec::RotatedDiagonal { l1, l2, angle }
    }

    /// Parses `identity`, `diag:l1,l2,angle` or `const:a11,a12,a22`.
    pub fn parse(s: &str) -> Option<Self> {
        let s = s.trim();
        if s == "identity" || s == "I" {
            return Some(TensorSpec::Identity);
        }
        let (kind, args) = s.split_once(':')?;
        let xs: Vec<f64> = args
            .split(',')
            .map(|t| t.trim().parse().ok())
            .collect::<Option<_>>()?;
        match (kind, xs.as_slice()) {
            ("diag", &[l1, l2]) => Some(Self::rotated(l1, l2, 0.0)),
            ("diag", &[l1, l2, a]) => Some(Self::rotated(l1, l2, a)),
            ("const", &[a, b, c]) => Some(TensorSpec::Constant(Mat2::new(a, b, b, c))),
            _ => None,
        }
    }

    /// Compact textual form accepted by [`TensorSpec::parse`]; `None` for callables.
    pub fn describe(&self) -> Option<String> {
        match self {
            TensorSpec::Identity => Some("identity".into()),
            TensorSpec::Constant(m) => Some(format!("const:{},{},{}", m[(0, 0)], m[(0, 1)], m[(1, 1)])),
            TensorSpec::RotatedDiagonal { l1, l2, angle } => Some(format!("diag:{l1},{l2},{angle}")),
            TensorSpec::Field { .. } => None,
        }
    }

    pub fn eval(&self, x: Point) -> Mat2 {
        match self {
            TensorSpec::Identity => Mat2::identity(),
            TensorSpec::Constant(m) => *m,
            TensorSpec::RotatedDiagonal { l1, l2, angle } => rotated_diag(*l1, *l2, *angle),
            TensorSpec::Field { f, .. } => f(x),
        }
    }

    /// Mean of `Λ` over the diamond: exact for the constant variants,
    /// one-point barycenter rule for callables.
    pub fn diamond_mean(&self, d: &Diamond) -> Mat2 {
        self.eval(d.barycenter)
    }

    /// Ellipticity bounds `(λ_m, λ^M)`.
    pub fn bounds(&self) -> (f64, f64) {
        match self {
            TensorSpec::Identity => (1.0, 1.0),
            TensorSpec::Constant(m) => {
                let e = m.symmetric_eigenvalues();
                (e.min(), e.max())
            }
            TensorSpec::RotatedDiagonal { l1, l2, .. } => (l1.min(*l2), l1.max(*l2)),
            TensorSpec::Field { bounds, .. } => *bounds,
        }
    }

    pub fn validate(&self) -> Result<(), SchemeError> {
        let check = |m: &Mat2| -> Result<(), SchemeError> {
            if (m[(0, 1)] - m[(1, 0)]).abs() > 1e-14 * m.norm() {
                return Err(SchemeError::NotSpd(format!("not symmetric: {m:?}")));
            }
            if m.symmetric_eigenvalues().min() <= 0.0 {
                return Err(SchemeError::NotSpd(format!("eigenvalue ≤ 0: {m:?}")));
            }
            Ok(())
        };
        match self {
            TensorSpec::Identity => Ok(()),
            TensorSpec::Constant(m) => check(m),
            TensorSpec::RotatedDiagonal { l1, l2, .. } => {
                if *l1 > 0.0 && *l2 > 0.0 {
                    Ok(())
                } else {
                    Err(SchemeError::NotSpd(format!("eigenvalues {l1}, {l2}")))
                }
            }
            TensorSpec::Field { bounds: (lo, hi), .. } => {
                if *lo > 0.0 && hi >= lo {
                    Ok(())
                } else {
                    Err(SchemeError::NotSpd(format!("bounds ({lo}, {hi})")))
                }
            }
        }
    }
}

fn rotated_diag(l1: f64, l2: f64, angle: f64) -> Mat2 {
    let (s, c) = angle.sin_cos();
    let r = Mat2::new(c, -s, s, c);
    r * Mat2::new(l1, 0.0, 0.0, l2) * r.transpose()
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn parse_roundtrip() {
        for s in ["identity", "diag:1,10,0.5", "const:2,0.5,1"] {
            let t = TensorSpec::parse(s).unwrap();
            let again = TensorSpec::parse(&t.describe().unwrap()).unwrap();
            let x = Point::new(0.3, 0.1);
            assert!((t.eval(x) - again.eval(x)).norm() < 1e-15);
        }
        assert!(TensorSpec::parse("diag:1").is_none());
    }

    #[test]
    fn rotated_bounds() {
        let t = TensorSpec::rotated(1.0, 4.0, 0.7);
        let m = t.eval(Point::zeros());
        let e = m.symmetric_eigenvalues();
        assert!((e.min() - 1.0).abs() < 1e-13 && (e.max() - 4.0).abs() < 1e-13);
        assert!(t.validate().is_ok());
        assert!(TensorSpec::Constant(Mat2::new(1.0, 2.0, 2.0, 1.0)).validate().is_err());
    }
}
