//! Exploration directions for polytope sets and the covering check they must
//! pass.

use std::f64::consts::PI;

use rand::Rng;
use rand_distr::StandardNormal;
use serde::{Deserialize, Serialize};

/// Every unit vector must make an angle of at most 60 degrees with some row,
/// i.e. `max_l a_l . v >= 1/2`.
pub const NET_MIN_PROJECTION: f64 = 0.5;

const NET_TOL: f64 = 1e-12;

/// Row-major `n x d` matrix of unit exploration directions.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "Vec<Vec<f64>>", into = "Vec<Vec<f64>>")]
pub struct DirectionNet {
    dim: usize,
    data: Vec<f64>,
}

impl DirectionNet {
    /// Builds a net from rows, normalizing each one.
    pub fn from_rows(rows: Vec<Vec<f64>>) -> Result<Self, String> {
        let dim = rows.first().map(Vec::len).ok_or("direction matrix is empty")?;
        if dim == 0 {
            return Err("directions must have positive dimension".into());
        }
        let mut data = Vec::with_capacity(rows.len() * dim);
        for (i, row) in rows.iter().enumerate() {
            if row.len() != dim {
                return Err(format!("row {i} has length {}, expected {dim}", row.len()));
            }
            let n = row.iter().map(|v| v * v).sum::<f64>().sqrt();
            if !(n > 0.0 && n.is_finite()) {
                return Err(format!("row {i} is not a valid direction"));
            }
            data.extend(row.iter().map(|v| v / n));
        }
        Ok(Self { dim, data })
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn len(&self) -> usize {
        self.data.len() / self.dim
    }

    pub fn is_empty(&self) -> bool {
        self.data.is_empty()
    }

    pub fn row(&self, l: usize) -> &[f64] {
        &self.data[l * self.dim..(l + 1) * self.dim]
    }

    pub fn rows(&self) -> impl Iterator<Item = &[f64]> {
        self.data.chunks_exact(self.dim)
    }

    /// `max_l a_l . v` and the first index attaining it.
    pub fn max_projection(&self, v: &[f64]) -> (usize, f64) {
        let mut best = (0, f64::NEG_INFINITY);
        for (l, a) in self.rows().enumerate() {
            let s = dot(a, v);
            if s > best.1 {
                best = (l, s);
            }
        }
        best
    }
}

impl TryFrom<Vec<Vec<f64>>> for DirectionNet {
    type Error = String;

    fn try_from(rows: Vec<Vec<f64>>) -> Result<Self, String> {
        for (i, row) in rows.iter().enumerate() {
            let n = row.iter().map(|v| v * v).sum::<f64>().sqrt();
            if (n - 1.0).abs() > 1e-12 {
                return Err(format!("direction row {i} is not unit norm"));
            }
        }
        let dim = rows.first().map_or(0, Vec::len);
        if dim == 0 || rows.iter().any(|r| r.len() != dim) {
            return Err("direction rows must be non-empty and of equal length".into());
        }
        Ok(Self {
            dim,
            data: rows.into_iter().flatten().collect(),
        })
    }
}

impl From<DirectionNet> for Vec<Vec<f64>> {
    fn from(net: DirectionNet) -> Self {
        net.rows().map(<[f64]>::to_vec).collect()
    }
}

pub(crate) fn dot(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| x * y).sum()
}

/// `n` directions drawn uniformly on the unit sphere in `R^d`.
pub fn generate_directions<R: Rng + ?Sized>(n: usize, d: usize, rng: &mut R) -> DirectionNet {
    assert!(n > 0 && d > 0, "need at least one direction in positive dimension");
    let mut data = Vec::with_capacity(n * d);
    while data.len() < n * d {
        let g: Vec<f64> = (0..d).map(|_| rng.sample(StandardNormal)).collect();
        let norm = g.iter().map(|v| v * v).sum::<f64>().sqrt();
        if norm > 1e-9 {
            data.extend(g.iter().map(|v| v / norm));
        }
    }
    DirectionNet { dim: d, data }
}

#[derive(Debug, Clone, PartialEq)]
pub enum NetCheck {
    Pass,
    /// A unit direction whose best projection falls below one half.
    Fail(Vec<f64>),
}

impl NetCheck {
    pub fn passed(&self) -> bool {
        matches!(self, NetCheck::Pass)
    }
}

/// Checks that every unit vector projects onto some row with value at least
/// one half. Exact in one and two dimensions; Monte Carlo with `probes`
/// random directions otherwise.
pub fn verify_net<R: Rng + ?Sized>(net: &DirectionNet, probes: usize, rng: &mut R) -> NetCheck {
    match net.dim() {
        1 => {
            let has = |sign: f64| net.rows().any(|a| a[0] * sign >= NET_MIN_PROJECTION);
            if !has(1.0) {
                NetCheck::Fail(vec![1.0])
            } else if !has(-1.0) {
                NetCheck::Fail(vec![-1.0])
            } else {
                NetCheck::Pass
            }
        }
        2 => verify_planar(net),
        d => {
            for _ in 0..probes {
                let v: Vec<f64> = (0..d).map(|_| rng.sample(StandardNormal)).collect();
                let n = v.iter().map(|x| x * x).sum::<f64>().sqrt();
                if n < 1e-9 {
                    continue;
                }
                let v: Vec<f64> = v.iter().map(|x| x / n).collect();
                if net.max_projection(&v).1 < NET_MIN_PROJECTION - NET_TOL {
                    return NetCheck::Fail(v);
                }
            }
            NetCheck::Pass
        }
    }
}

/// Sorted angular gaps: the worst direction is the bisector of the widest gap,
/// and it is covered iff that gap is at most 120 degrees.
fn verify_planar(net: &DirectionNet) -> NetCheck {
    let mut angles: Vec<f64> = net.rows().map(|a| a[1].atan2(a[0])).collect();
    angles.sort_by(f64::total_cmp);
    let mut widest = (0.0, angles[0]);
    for (i, &a) in angles.iter().enumerate() {
        let next = if i + 1 < angles.len() {
            angles[i + 1]
        } else {
            angles[0] + 2.0 * PI
        };
        let gap = next - a;
        if gap > widest.0 {
            widest = (gap, a);
        }
    }
    let (gap, start) = widest;
    if gap <= 2.0 * PI / 3.0 + NET_TOL {
        NetCheck::Pass
    } else {
        let mid = start + gap / 2.0;
        NetCheck::Fail(vec![mid.cos(), mid.sin()])
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    fn fan(k: usize, phase: f64) -> DirectionNet {
        let rows = (0..k)
            .map(|i| {
                let t = phase + 2.0 * PI * i as f64 / k as f64;
                vec![t.cos(), t.sin()]
            })
            .collect();
        DirectionNet::from_rows(rows).unwrap()
    }

    #[test]
    fn generated_rows_are_unit() {
        let mut rng = ChaCha8Rng::seed_from_u64(7);
        let net = generate_directions(200, 2, &mut rng);
        assert_eq!(net.len(), 200);
        for a in net.rows() {
            assert!((dot(a, a).sqrt() - 1.0).abs() <= 1e-12);
        }
        assert!(verify_net(&net, 0, &mut rng).passed());
    }

    #[test]
    fn generation_is_seeded() {
        let a = generate_directions(20, 3, &mut ChaCha8Rng::seed_from_u64(3));
        let b = generate_directions(20, 3, &mut ChaCha8Rng::seed_from_u64(3));
        assert_eq!(a, b);
    }

    #[test]
    fn three_fan_passes_at_boundary() {
        let mut rng = ChaCha8Rng::seed_from_u64(0);
        assert!(verify_net(&fan(3, 0.0), 0, &mut rng).passed());
    }

    #[test]
    fn two_axes_fail_in_third_quadrant() {
        let net = DirectionNet::from_rows(vec![vec![1.0, 0.0], vec![0.0, 1.0]]).unwrap();
        match verify_net(&net, 0, &mut ChaCha8Rng::seed_from_u64(0)) {
            NetCheck::Fail(w) => {
                assert!(w[0] < 0.0 && w[1] < 0.0);
                assert!(net.max_projection(&w).1 < 0.5);
            }
            NetCheck::Pass => panic!("axes do not cover the plane"),
        }
    }

    #[test]
    fn one_dimensional_needs_both_signs() {
        let mut rng = ChaCha8Rng::seed_from_u64(0);
        let pos = DirectionNet::from_rows(vec![vec![1.0]]).unwrap();
        assert_eq!(verify_net(&pos, 0, &mut rng), NetCheck::Fail(vec![-1.0]));
        let both = DirectionNet::from_rows(vec![vec![1.0], vec![-1.0]]).unwrap();
        assert!(verify_net(&both, 0, &mut rng).passed());
    }

    #[test]
    fn higher_dimension_monte_carlo() {
        let mut rng = ChaCha8Rng::seed_from_u64(5);
        let axes = DirectionNet::from_rows(vec![
            vec![1.0, 0.0, 0.0],
            vec![0.0, 1.0, 0.0],
            vec![0.0, 0.0, 1.0],
        ])
        .unwrap();
        assert!(!verify_net(&axes, 10_000, &mut rng).passed());
        let dense = generate_directions(2000, 3, &mut rng);
        assert!(verify_net(&dense, 10_000, &mut rng).passed());
    }

    #[test]
    fn deserialization_rejects_non_unit_rows() {
        let bad: Result<DirectionNet, _> = DirectionNet::try_from(vec![vec![2.0, 0.0]]);
        assert!(bad.is_err());
    }
}
