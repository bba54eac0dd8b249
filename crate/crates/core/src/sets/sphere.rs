use rand::Rng;
use rand_distr::StandardNormal;
use serde::{Deserialize, Serialize};

use super::{dist, unit_ball_volume};

/// Closed ball `{x : |x - center| <= radius}`. A negative radius marks a
/// failed (empty) set.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SphereSet {
    pub center: Vec<f64>,
    pub radius: f64,
}

impl SphereSet {
    pub fn new(center: Vec<f64>, radius: f64) -> Self {
        Self { center, radius }
    }

    pub fn dim(&self) -> usize {
        self.center.len()
    }

    pub fn is_failed(&self) -> bool {
        self.radius < 0.0
    }

    pub fn contains(&self, p: &[f64]) -> bool {
        !self.is_failed() && dist(p, &self.center) <= self.radius
    }

    /// Shrinks the radius to `|p - center| - eps`. Returns the new set and
    /// how much the radius decreased.
    pub fn shrink_past(&self, p: &[f64], eps: f64) -> (SphereSet, f64) {
        let radius = dist(p, &self.center) - eps;
        let shrink = self.radius - radius;
        (
            SphereSet {
                center: self.center.clone(),
                radius,
            },
            shrink,
        )
    }

    /// Uniform draw from the ball: Gaussian direction, radius scaled by
    /// `U^(1/d)`.
    pub fn sample<R: Rng + ?Sized>(&self, rng: &mut R) -> Vec<f64> {
        let d = self.dim();
        let mut dir: Vec<f64> = loop {
            let g: Vec<f64> = (0..d).map(|_| rng.sample(StandardNormal)).collect();
            if g.iter().any(|v: &f64| *v != 0.0) {
                break g;
            }
        };
        let n = dir.iter().map(|v| v * v).sum::<f64>().sqrt();
        let u: f64 = rng.random();
        let r = self.radius * u.powf(1.0 / d as f64);
        for (v, c) in dir.iter_mut().zip(&self.center) {
            *v = c + *v / n * r;
        }
        dir
    }

    pub fn volume(&self) -> f64 {
        if self.is_failed() {
            0.0
        } else {
            unit_ball_volume(self.dim()) * self.radius.powi(self.dim() as i32)
        }
    }
}
