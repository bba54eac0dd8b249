use std::sync::Arc;

use rand::Rng;
use serde::{Deserialize, Serialize};

use super::directions::{dot, DirectionNet};
use crate::error::{Error, Result};

/// Ties in the best-aligned direction are detected up to this relative slack.
const TIE_TOL: f64 = 1e-12;

/// `{x : A (x - center) <= offsets}` for a fixed direction net `A`.
/// Any negative offset marks a failed (empty) set.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PolytopeSet {
    pub center: Vec<f64>,
    pub directions: Arc<DirectionNet>,
    pub offsets: Vec<f64>,
}

/// Result of shrinking a polytope past a counter-example.
#[derive(Debug, Clone, PartialEq)]
pub struct PolytopeUpdate {
    pub set: PolytopeSet,
    /// Index of the face that moved.
    pub face: usize,
    pub shrink: f64,
}

impl PolytopeSet {
    /// All offsets start at `c`.
    pub fn new(center: Vec<f64>, directions: Arc<DirectionNet>, c: f64) -> Self {
        let offsets = vec![c; directions.len()];
        Self {
            center,
            directions,
            offsets,
        }
    }

    pub fn dim(&self) -> usize {
        self.center.len()
    }

    pub fn is_failed(&self) -> bool {
        self.offsets.iter().any(|b| *b < 0.0)
    }

    pub fn contains(&self, p: &[f64]) -> bool {
        if self.is_failed() {
            return false;
        }
        let d = self.dim();
        let mut diff = [0.0f64; 8];
        let mut heap;
        let diff: &mut [f64] = if d <= diff.len() {
            &mut diff[..d]
        } else {
            heap = vec![0.0; d];
            &mut heap
        };
        for ((o, x), c) in diff.iter_mut().zip(p).zip(&self.center) {
            *o = x - c;
        }
        self.directions
            .rows()
            .zip(&self.offsets)
            .all(|(a, b)| dot(a, diff) <= *b)
    }

    /// Moves the face best aligned with `p - center` to
    /// `a . (p - center) - eps`, leaving all other faces in place.
    pub fn shrink_past<R: Rng + ?Sized>(
        &self,
        p: &[f64],
        eps: f64,
        rng: &mut R,
    ) -> Result<PolytopeUpdate> {
        let diff: Vec<f64> = p.iter().zip(&self.center).map(|(x, c)| x - c).collect();
        let norm = diff.iter().map(|v| v * v).sum::<f64>().sqrt();
        if norm == 0.0 {
            return Err(Error::DegenerateCounterExample);
        }
        let scores: Vec<f64> = self.directions.rows().map(|a| dot(a, &diff)).collect();
        let best = scores.iter().copied().fold(f64::NEG_INFINITY, f64::max);
        let ties: Vec<usize> = scores
            .iter()
            .enumerate()
            .filter(|(_, s)| best - **s <= TIE_TOL * norm)
            .map(|(l, _)| l)
            .collect();
        let face = if ties.len() == 1 {
            ties[0]
        } else {
            ties[rng.random_range(0..ties.len())]
        };
        let mut offsets = self.offsets.clone();
        offsets[face] = scores[face] - eps;
        let shrink = self.offsets[face] - offsets[face];
        Ok(PolytopeUpdate {
            set: PolytopeSet {
                center: self.center.clone(),
                directions: Arc::clone(&self.directions),
                offsets,
            },
            face,
            shrink,
        })
    }

    /// Radius bound `|x - center| <= 2 max_l b_l`, valid for any member `x`
    /// when the directions pass the covering check.
    pub fn bounding_radius(&self) -> f64 {
        2.0 * self.offsets.iter().copied().fold(0.0, f64::max)
    }

    pub fn offset_mass(&self) -> f64 {
        self.offsets.iter().sum()
    }
}
