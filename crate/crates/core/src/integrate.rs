//! Fixed-step RK4 realization of the flow and of sampled trajectories
//! `x_n = phi(n * tau_s, x_0)`.

use serde::{Deserialize, Serialize};

use crate::dynamics::VectorField;
use crate::error::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct IntegratorConfig {
    /// Sampling period.
    pub tau_s: f64,
    /// RK4 steps per sampling period.
    #[serde(default = "default_substeps")]
    pub substeps: u32,
    /// States farther than this from the origin count as diverged.
    #[serde(default = "default_r_max")]
    pub r_max: f64,
}

fn default_substeps() -> u32 {
    10
}

fn default_r_max() -> f64 {
    1e3
}

impl Default for IntegratorConfig {
    fn default() -> Self {
        Self {
            tau_s: 0.5,
            substeps: default_substeps(),
            r_max: default_r_max(),
        }
    }
}

impl IntegratorConfig {
    pub fn step_size(&self) -> f64 {
        self.tau_s / f64::from(self.substeps)
    }

    pub fn validate(&self) -> Result<()> {
        if !(self.tau_s > 0.0 && self.tau_s.is_finite()) {
            return Err(Error::InvalidConfig("tau_s must be positive".into()));
        }
        if self.substeps == 0 {
            return Err(Error::InvalidConfig("substeps must be at least 1".into()));
        }
        if !(self.r_max > 0.0) {
            return Err(Error::InvalidConfig("r_max must be positive".into()));
        }
        Ok(())
    }
}

/// How a sampled trajectory relates to the set it started in.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Verdict {
    /// First return to the set at sampling step `n` (1-based).
    Recurrent(usize),
    /// No return within `k` steps.
    CounterExample,
    /// Left the divergence radius (or became non-finite) at step `n`.
    Diverged(usize),
}

impl Verdict {
    pub fn is_recurrent(self) -> bool {
        matches!(self, Verdict::Recurrent(_))
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct TrajectoryOutcome {
    pub verdict: Verdict,
    /// Sampling steps actually simulated.
    pub states_visited: usize,
}

/// RK4 integrator with reusable scratch buffers.
pub struct Stepper<'f> {
    field: &'f VectorField,
    k1: Vec<f64>,
    k2: Vec<f64>,
    k3: Vec<f64>,
    k4: Vec<f64>,
    tmp: Vec<f64>,
}

impl<'f> Stepper<'f> {
    pub fn new(field: &'f VectorField) -> Self {
        let d = field.dim();
        Self {
            field,
            k1: vec![0.0; d],
            k2: vec![0.0; d],
            k3: vec![0.0; d],
            k4: vec![0.0; d],
            tmp: vec![0.0; d],
        }
    }

    /// One classical RK4 step of size `h`, in place.
    pub fn step(&mut self, state: &mut [f64], h: f64) {
        let f = self.field;
        f.eval_into(state, &mut self.k1);
        for ((t, s), k) in self.tmp.iter_mut().zip(&*state).zip(&self.k1) {
            *t = s + 0.5 * h * k;
        }
        f.eval_into(&self.tmp, &mut self.k2);
        for ((t, s), k) in self.tmp.iter_mut().zip(&*state).zip(&self.k2) {
            *t = s + 0.5 * h * k;
        }
        f.eval_into(&self.tmp, &mut self.k3);
        for ((t, s), k) in self.tmp.iter_mut().zip(&*state).zip(&self.k3) {
            *t = s + h * k;
        }
        f.eval_into(&self.tmp, &mut self.k4);
        for (i, s) in state.iter_mut().enumerate() {
            *s += h / 6.0 * (self.k1[i] + 2.0 * self.k2[i] + 2.0 * self.k3[i] + self.k4[i]);
        }
    }

    /// Advances by one sampling period. Returns false once the state is
    /// non-finite or outside `r_max`.
    pub fn advance_period(&mut self, state: &mut [f64], cfg: &IntegratorConfig) -> bool {
        let h = cfg.step_size();
        for _ in 0..cfg.substeps {
            self.step(state, h);
        }
        let mut sq = 0.0;
        for s in state.iter() {
            if !s.is_finite() {
                return false;
            }
            sq += s * s;
        }
        sq.sqrt() <= cfg.r_max
    }
}

/// A single RK4 step from `state`.
pub fn rk4_step(field: &VectorField, state: &[f64], h: f64) -> Vec<f64> {
    let mut out = state.to_vec();
    Stepper::new(field).step(&mut out, h);
    out
}

/// Simulates `x_1..x_k` from `x0` and stops at the first `x_n` for which
/// `membership` holds. Membership is only tested at sampling instants.
pub fn sample_trajectory<M>(
    field: &VectorField,
    x0: &[f64],
    k: usize,
    cfg: &IntegratorConfig,
    membership: M,
) -> TrajectoryOutcome
where
    M: Fn(&[f64]) -> bool,
{
    let mut stepper = Stepper::new(field);
    let mut state = x0.to_vec();
    for n in 1..=k {
        if !stepper.advance_period(&mut state, cfg) {
            return TrajectoryOutcome {
                verdict: Verdict::Diverged(n),
                states_visited: n,
            };
        }
        if membership(&state) {
            return TrajectoryOutcome {
                verdict: Verdict::Recurrent(n),
                states_visited: n,
            };
        }
    }
    TrajectoryOutcome {
        verdict: Verdict::CounterExample,
        states_visited: k,
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn norm(x: &[f64]) -> f64 {
        x.iter().map(|v| v * v).sum::<f64>().sqrt()
    }

    #[test]
    fn rk4_linear_decay() {
        let f = VectorField::Linear { rate: 1.0, dim: 1 };
        let x = rk4_step(&f, &[1.0], 0.1);
        assert!((x[0] - (-0.1f64).exp()).abs() < 1e-7);
    }

    #[test]
    fn rk4_fixed_points() {
        let zero = VectorField::parse(&["0"]).unwrap();
        assert_eq!(rk4_step(&zero, &[2.5], 0.5), vec![2.5]);
        let f = VectorField::SofteningDuffing;
        assert_eq!(rk4_step(&f, &[0.0, 0.0], 0.5), vec![0.0, 0.0]);
    }

    #[test]
    fn non_finite_propagates() {
        let f = VectorField::parse(&["1/x1"]).unwrap();
        let x = rk4_step(&f, &[0.0], 0.1);
        assert!(!x[0].is_finite());
        let cfg = IntegratorConfig::default();
        let out = sample_trajectory(&f, &[0.0], 5, &cfg, |_| true);
        assert_eq!(out.verdict, Verdict::Diverged(1));
    }

    #[test]
    fn contraction_returns_immediately() {
        let f = VectorField::Linear { rate: 1.0, dim: 2 };
        let cfg = IntegratorConfig::default();
        let x0 = [0.9 / 2f64.sqrt(), 0.9 / 2f64.sqrt()];
        let out = sample_trajectory(&f, &x0, 50, &cfg, |x| norm(x) <= 1.0);
        assert_eq!(out.verdict, Verdict::Recurrent(1));
        assert_eq!(out.states_visited, 1);
    }

    #[test]
    fn outside_basin_never_returns() {
        let f = VectorField::SofteningDuffing;
        let cfg = IntegratorConfig {
            tau_s: 0.5,
            substeps: 10,
            r_max: 100.0,
        };
        let out = sample_trajectory(&f, &[3.0, 0.0], 50, &cfg, |x| norm(x) <= 1.0);
        assert!(matches!(
            out.verdict,
            Verdict::CounterExample | Verdict::Diverged(_)
        ));
    }

    #[test]
    fn never_member_visits_all_k() {
        let f = VectorField::Linear { rate: 1.0, dim: 1 };
        let out = sample_trajectory(&f, &[1.0], 17, &IntegratorConfig::default(), |_| false);
        assert_eq!(out.verdict, Verdict::CounterExample);
        assert_eq!(out.states_visited, 17);
    }

    #[test]
    fn deterministic() {
        let f = VectorField::SofteningDuffing;
        let cfg = IntegratorConfig::default();
        let a = sample_trajectory(&f, &[1.2, -0.7], 50, &cfg, |x| norm(x) <= 0.3);
        let b = sample_trajectory(&f, &[1.2, -0.7], 50, &cfg, |x| norm(x) <= 0.3);
        assert_eq!(a, b);
    }

    #[test]
    fn config_validation() {
        let mut c = IntegratorConfig::default();
        assert!(c.validate().is_ok());
        c.substeps = 0;
        assert!(c.validate().is_err());
        c = IntegratorConfig {
            tau_s: 0.0,
            ..Default::default()
        };
        assert!(c.validate().is_err());
    }
}
