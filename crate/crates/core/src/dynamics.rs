//! Autonomous vector fields `dx/dt = f(x)`.

use crate::error::{Error, Result};
use crate::expr::{self, Expr};

/// Right-hand side of an autonomous ODE on `R^d`.
///
/// Values are immutable once built and evaluation is reentrant, so a single
/// field can be shared across worker threads.
#[derive(Debug, Clone, PartialEq)]
pub enum VectorField {
    /// Damped softening Duffing oscillator on `R^2`:
    /// `f(x1, x2) = (x2, -x1 + x1^3 / 3 - x2)`.
    /// Stable focus at the origin, saddles at `(±√3, 0)`.
    SofteningDuffing,
    /// `f(x) = -rate * x` on `R^dim`.
    Linear { rate: f64, dim: usize },
    /// One parsed expression per coordinate.
    Parsed(Vec<Expr>),
}

impl VectorField {
    /// Looks up a built-in system by its configuration id.
    pub fn builtin(id: &str, dim: Option<usize>, rate: Option<f64>) -> Result<Self> {
        match id {
            "paper2d" | "duffing2d" => Ok(VectorField::SofteningDuffing),
            "linear" => {
                let rate = rate.unwrap_or(1.0);
                if !(rate > 0.0 && rate.is_finite()) {
                    return Err(Error::InvalidConfig("linear rate must be positive".into()));
                }
                let dim = dim.unwrap_or(2);
                if dim == 0 {
                    return Err(Error::InvalidConfig("dimension must be positive".into()));
                }
                Ok(VectorField::Linear { rate, dim })
            }
            other => Err(Error::UnknownSystem(other.to_string())),
        }
    }

    /// Parses one expression per coordinate; the dimension is the number of
    /// expressions.
    pub fn parse<S: AsRef<str>>(texts: &[S]) -> Result<Self> {
        let dim = texts.len();
        if dim == 0 {
            return Err(Error::InvalidConfig("at least one expression is required".into()));
        }
        let exprs = texts
            .iter()
            .enumerate()
            .map(|(i, t)| {
                let e = expr::parse(t.as_ref()).map_err(|source| Error::Syntax {
                    component: i + 1,
                    source,
                })?;
                match e.max_var() {
                    Some(v) if v >= dim => Err(Error::Arity {
                        component: i + 1,
                        var: v + 1,
                        dim,
                    }),
                    _ => Ok(e),
                }
            })
            .collect::<Result<Vec<_>>>()?;
        Ok(VectorField::Parsed(exprs))
    }

    pub fn dim(&self) -> usize {
        match self {
            VectorField::SofteningDuffing => 2,
            VectorField::Linear { dim, .. } => *dim,
            VectorField::Parsed(exprs) => exprs.len(),
        }
    }

    /// Writes `f(state)` into `out`. Non-finite output signals divergence.
    ///
    /// Both slices must have length `dim()`.
    pub fn eval_into(&self, state: &[f64], out: &mut [f64]) {
        debug_assert_eq!(state.len(), self.dim());
        debug_assert_eq!(out.len(), self.dim());
        match self {
            VectorField::SofteningDuffing => {
                let (x1, x2) = (state[0], state[1]);
                out[0] = x2;
                out[1] = -x1 + x1 * x1 * x1 / 3.0 - x2;
            }
            VectorField::Linear { rate, .. } => {
                for (o, s) in out.iter_mut().zip(state) {
                    *o = -rate * s;
                }
            }
            VectorField::Parsed(exprs) => {
                for (o, e) in out.iter_mut().zip(exprs) {
                    *o = e.eval(state);
                }
            }
        }
    }

    pub fn eval(&self, state: &[f64]) -> Result<Vec<f64>> {
        if state.len() != self.dim() {
            return Err(Error::Dimension {
                expected: self.dim(),
                got: state.len(),
            });
        }
        let mut out = vec![0.0; state.len()];
        self.eval_into(state, &mut out);
        Ok(out)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    #[test]
    fn duffing_values() {
        let f = VectorField::SofteningDuffing;
        assert_eq!(f.eval(&[0.0, 0.0]).unwrap(), vec![0.0, 0.0]);
        let v = f.eval(&[1.0, 1.0]).unwrap();
        assert_eq!(v[0], 1.0);
        assert!((v[1] + 5.0 / 3.0).abs() < 1e-15);
        for s in [3f64.sqrt(), -(3f64.sqrt())] {
            let v = f.eval(&[s, 0.0]).unwrap();
            assert!(v.iter().map(|c| c * c).sum::<f64>().sqrt() <= 1e-12);
        }
    }

    #[test]
    fn parsed_matches_builtins() {
        let mut rng = ChaCha8Rng::seed_from_u64(11);
        let cases = [
            (
                VectorField::SofteningDuffing,
                VectorField::parse(&["x2", "-x1 + x1^3/3 - x2"]).unwrap(),
            ),
            (
                VectorField::Linear { rate: 1.5, dim: 3 },
                VectorField::parse(&["-1.5*x1", "-1.5*x2", "-1.5*x3"]).unwrap(),
            ),
        ];
        for (builtin, parsed) in &cases {
            let d = builtin.dim();
            assert_eq!(parsed.dim(), d);
            for _ in 0..1000 {
                let x: Vec<f64> = (0..d).map(|_| rng.random_range(-5.0..5.0)).collect();
                let a = builtin.eval(&x).unwrap();
                let b = parsed.eval(&x).unwrap();
                for (u, v) in a.iter().zip(&b) {
                    assert!((u - v).abs() <= 1e-12, "{x:?}: {u} vs {v}");
                }
            }
        }
    }

    #[test]
    fn parse_errors() {
        match VectorField::parse(&["x1 +"]) {
            Err(Error::Syntax { component: 1, source }) => assert_eq!(source.position, 4),
            other => panic!("{other:?}"),
        }
        assert!(matches!(
            VectorField::parse(&["x2"]),
            Err(Error::Arity { var: 2, dim: 1, .. })
        ));
    }

    #[test]
    fn parsed_scalar() {
        let f = VectorField::parse(&["-1*x1"]).unwrap();
        assert_eq!(f.eval(&[0.5]).unwrap(), vec![-0.5]);
    }

    #[test]
    fn builtin_lookup() {
        assert_eq!(
            VectorField::builtin("paper2d", None, None).unwrap(),
            VectorField::SofteningDuffing
        );
        assert!(VectorField::builtin("linear", Some(2), Some(-1.0)).is_err());
        assert!(matches!(
            VectorField::builtin("lorenz", None, None),
            Err(Error::UnknownSystem(_))
        ));
    }

    #[test]
    fn eval_rejects_wrong_length() {
        assert!(VectorField::SofteningDuffing.eval(&[1.0]).is_err());
    }
}
