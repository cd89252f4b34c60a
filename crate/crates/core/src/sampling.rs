//! Deterministic sampling plans.
//!
//! Random draws are a pure function of `(seed, index, lane)`: the SplitMix64
//! output at stream position `index * LANES + lane` for a seed-derived key.
//! Any draw can be recomputed without replaying earlier ones, so results do
//! not depend on evaluation order.

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::means::PositivePair;

const GOLDEN: u64 = 0x9E37_79B9_7F4A_7C15;
const LANES: u64 = 4;

fn mix(mut z: u64) -> u64 {
    z = (z ^ (z >> 30)).wrapping_mul(0xBF58_476D_1CE4_E5B9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94D0_49BB_1331_11EB);
    z ^ (z >> 31)
}

/// A uniform draw in [0, 1) keyed by `(seed, index, lane)`.
pub fn unit_draw(seed: u64, index: u64, lane: u64) -> f64 {
    let counter = index.wrapping_mul(LANES).wrapping_add(lane % LANES);
    let bits = mix(mix(seed).wrapping_add(counter.wrapping_add(1).wrapping_mul(GOLDEN)));
    (bits >> 11) as f64 * (1.0 / (1u64 << 53) as f64)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Sampling {
    LogUniform,
    Uniform,
}

#[derive(Debug, Clone, PartialEq, Error)]
pub enum IntervalError {
    #[error("interval must satisfy 0 < lo < hi < inf, got [{lo}, {hi}]")]
    Bounds { lo: f64, hi: f64 },
    #[error("at least 2 samples are required, got {0}")]
    Samples(usize),
}

/// A sub-interval of (0, inf) with a sampling plan.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct IntervalSpec {
    pub lo: f64,
    pub hi: f64,
    pub samples: usize,
    pub sampling: Sampling,
    pub seed: u64,
}

impl IntervalSpec {
    pub fn new(lo: f64, hi: f64, samples: usize, seed: u64) -> Result<Self, IntervalError> {
        Self::with_sampling(lo, hi, samples, Sampling::LogUniform, seed)
    }

    pub fn with_sampling(
        lo: f64,
        hi: f64,
        samples: usize,
        sampling: Sampling,
        seed: u64,
    ) -> Result<Self, IntervalError> {
        if !(lo > 0.0 && lo < hi && hi.is_finite()) {
            return Err(IntervalError::Bounds { lo, hi });
        }
        if samples < 2 {
            return Err(IntervalError::Samples(samples));
        }
        Ok(Self {
            lo,
            hi,
            samples,
            sampling,
            seed,
        })
    }

    /// Maps `u` in [0, 1] onto the interval.
    pub fn point(&self, u: f64) -> f64 {
        let v = match self.sampling {
            Sampling::LogUniform => self.lo * (self.hi / self.lo).powf(u),
            Sampling::Uniform => self.lo + (self.hi - self.lo) * u,
        };
        v.clamp(self.lo, self.hi)
    }

    /// `samples` increasing points from `lo` to `hi` inclusive.
    pub fn grid(&self) -> Vec<f64> {
        let n = self.samples - 1;
        (0..=n).map(|i| self.point(i as f64 / n as f64)).collect()
    }

    /// `samples` seeded random pairs.
    pub fn random_pairs(&self) -> Vec<PositivePair> {
        (0..self.samples as u64)
            .map(|i| {
                let x = self.point(unit_draw(self.seed, i, 0));
                let y = self.point(unit_draw(self.seed, i, 1));
                PositivePair::new(x, y).expect("interval points are positive")
            })
            .collect()
    }

    /// Near-diagonal pairs `(m, m(1 + 10^-k))`, k = 2..=8, at eight anchors
    /// spread over the interval, plus the extreme pair `(1.01 lo, 0.99 hi)`.
    pub fn structured_pairs(&self) -> Vec<PositivePair> {
        let mut out = Vec::new();
        let top = self.hi / 1.01;
        if top > self.lo {
            let anchors = IntervalSpec { hi: top, samples: 8, ..*self };
            for m in anchors.grid() {
                for k in 2..=8 {
                    let other = m * (1.0 + 10f64.powi(-k));
                    out.push(PositivePair::new(m, other).expect("positive"));
                }
            }
        }
        let (a, b) = (self.lo * 1.01, self.hi * 0.99);
        if a < b {
            out.push(PositivePair::new(a, b).expect("positive"));
        }
        out
    }

    /// Random pairs followed by the structured ones.
    pub fn pairs(&self) -> Vec<PositivePair> {
        let mut v = self.random_pairs();
        v.extend(self.structured_pairs());
        v
    }

    pub fn with_samples(&self, samples: usize) -> Self {
        Self {
            samples: samples.max(2),
            ..*self
        }
    }
}
