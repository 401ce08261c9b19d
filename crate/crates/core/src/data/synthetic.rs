use std::f64::consts::PI;
use std::fmt;
use std::str::FromStr;

use rand::Rng as _;
use rand_distr::{Distribution, Normal};
use serde::{Deserialize, Serialize};

use super::Dataset;
use crate::error::{Error, Result};
use crate::seed;

/// Two-class 2-D generators.
///
/// All shapes live on unit-scale arcs; `noise` is the standard deviation of
/// the isotropic Gaussian perturbation added to every point.
///
/// * `banana`: class 0 on the unit arc `(sin a, cos a)`, `a ∈ [π/8, 11π/8]`;
///   class 1 on `(sin b, cos b) + (0.75, -0.75)`, `b ∈ [-7π/8, 3π/8]`.
/// * `lithuanian`: class 0 on the upper unit half-circle; class 1 on the
///   upper half-circle of radius 1.5 centred at `(0, -0.3)`. The arcs never
///   meet; the gap is narrowest (0.2) at the top.
/// * `moons`: the usual interleaved half-moons, class 0 on `(cos t, sin t)`,
///   class 1 on `(1 - cos t, 0.5 - sin t)`, `t ∈ [0, π]`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum SyntheticKind {
    Banana,
    Lithuanian,
    Moons,
}

impl SyntheticKind {
    pub fn as_str(&self) -> &'static str {
        match self {
            SyntheticKind::Banana => "banana",
            SyntheticKind::Lithuanian => "lithuanian",
            SyntheticKind::Moons => "moons",
        }
    }

    /// Noise-free point for `class` at arc parameter `u ∈ [0, 1]`.
    pub fn arc_point(&self, class: usize, u: f64) -> [f64; 2] {
        match (self, class) {
            (SyntheticKind::Banana, 0) => {
                let a = PI / 8.0 + u * 1.25 * PI;
                [a.sin(), a.cos()]
            }
            (SyntheticKind::Banana, _) => {
                let b = 3.0 * PI / 8.0 - u * 1.25 * PI;
                [b.sin() + 0.75, b.cos() - 0.75]
            }
            (SyntheticKind::Lithuanian, 0) => {
                let t = u * PI;
                [t.cos(), t.sin()]
            }
            (SyntheticKind::Lithuanian, _) => {
                let t = u * PI;
                [1.5 * t.cos(), 1.5 * t.sin() - 0.3]
            }
            (SyntheticKind::Moons, 0) => {
                let t = u * PI;
                [t.cos(), t.sin()]
            }
            (SyntheticKind::Moons, _) => {
                let t = u * PI;
                [1.0 - t.cos(), 0.5 - t.sin()]
            }
        }
    }
}

impl FromStr for SyntheticKind {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s.to_ascii_lowercase().as_str() {
            "banana" => Ok(SyntheticKind::Banana),
            "lithuanian" => Ok(SyntheticKind::Lithuanian),
            "moons" | "two-moons" => Ok(SyntheticKind::Moons),
            _ => Err(Error::Unknown {
                what: "synthetic kind",
                name: s.to_string(),
            }),
        }
    }
}

impl fmt::Display for SyntheticKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

/// Generates `n` points, `n / 2` per class, alternating labels 0, 1, 0, ...
pub fn generate_synthetic(
    kind: SyntheticKind,
    n: usize,
    noise: f64,
    seed_value: u64,
) -> Result<Dataset> {
    if n < 4 || !n.is_multiple_of(2) {
        return Err(Error::InvalidDataset(format!(
            "n must be even and at least 4, got {n}"
        )));
    }
    if !noise.is_finite() || noise < 0.0 {
        return Err(Error::InvalidDataset(format!(
            "noise must be non-negative, got {noise}"
        )));
    }
    let mut rng = seed::rng(seed::derive(seed_value, seed::stream_of(kind.as_str())));
    let normal = Normal::new(0.0, 1.0).expect("unit normal");
    let mut features = Vec::with_capacity(2 * n);
    let mut labels = Vec::with_capacity(n);
    for i in 0..n {
        let class = i % 2;
        let u: f64 = rng.random();
        let [x, y] = kind.arc_point(class, u);
        let dx: f64 = normal.sample(&mut rng);
        let dy: f64 = normal.sample(&mut rng);
        features.push(x + noise * dx);
        features.push(y + noise * dy);
        labels.push(class);
    }
    Dataset::from_flat(kind.as_str(), 2, features, labels, 2)
}
