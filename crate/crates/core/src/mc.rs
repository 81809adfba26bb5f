//! Monte Carlo accumulation: merging mean / standard-error estimates.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::rng::{run_blocks, RngStream};

/// Result of a Monte Carlo average.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct McEstimate {
    pub mean: f64,
    /// Sample standard deviation divided by sqrt(n_samples).
    pub std_error: f64,
    pub n_samples: u64,
}

impl McEstimate {
    /// Two-sided z-score of `target` against this estimate; infinite when the
    /// std error underflows to zero and the means differ.
    pub fn z_score(&self, target: f64) -> f64 {
        if self.std_error == 0.0 {
            if self.mean == target {
                0.0
            } else {
                f64::INFINITY
            }
        } else {
            (self.mean - target).abs() / self.std_error
        }
    }
}

/// Streaming mean and second central moment (Welford), mergeable across
/// disjoint sample sets (Chan et al.). The merge computes the pooled mean
/// `(n_a * m_a + n_b * m_b) / (n_a + n_b)` in the usual weighted form, so
/// merging reproduces it exactly.
#[derive(Debug, Clone, Copy, Default)]
pub struct MeanAccumulator {
    n: u64,
    mean: f64,
    m2: f64,
}

impl MeanAccumulator {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn push(&mut self, x: f64) {
        self.n += 1;
        let delta = x - self.mean;
        self.mean += delta / self.n as f64;
        self.m2 += delta * (x - self.mean);
    }

    pub fn merge(self, other: Self) -> Self {
        if self.n == 0 {
            return other;
        }
        if other.n == 0 {
            return self;
        }
        let n = self.n + other.n;
        let (na, nb) = (self.n as f64, other.n as f64);
        let delta = other.mean - self.mean;
        let mean = (na * self.mean + nb * other.mean) / (na + nb);
        let m2 = self.m2 + other.m2 + delta * delta * na * nb / (na + nb);
        MeanAccumulator { n, mean, m2 }
    }

    pub fn n(&self) -> u64 {
        self.n
    }

    pub fn mean(&self) -> f64 {
        self.mean
    }

    /// Sample variance (n - 1 in the denominator).
    pub fn variance(&self) -> f64 {
        if self.n < 2 {
            return 0.0;
        }
        // Rounding can leave a tiny negative m2 on constant streams.
        (self.m2 / (self.n - 1) as f64).max(0.0)
    }

    pub fn estimate(&self) -> Result<McEstimate> {
        if self.n < 2 {
            return Err(Error::TooFewSamples {
                needed: 2,
                got: self.n,
            });
        }
        Ok(McEstimate {
            mean: self.mean,
            std_error: (self.variance() / self.n as f64).sqrt(),
            n_samples: self.n,
        })
    }
}

/// Mean and standard error of a stream of values.
pub fn mc_mean(values: impl IntoIterator<Item = f64>) -> Result<McEstimate> {
    let mut acc = MeanAccumulator::new();
    for v in values {
        acc.push(v);
    }
    acc.estimate()
}

/// Parallel Monte Carlo mean of `sample(rng)` over `n_samples` draws,
/// blocked by substream; bit-reproducible for any worker count.
pub fn mc_sample_mean<F>(n_samples: u64, stream: RngStream, sample: F) -> Result<McEstimate>
where
    F: Fn(&mut rand_chacha::ChaCha12Rng) -> f64 + Sync,
{
    if n_samples < 2 {
        return Err(Error::TooFewSamples {
            needed: 2,
            got: n_samples,
        });
    }
    let acc = run_blocks(
        n_samples,
        stream,
        |rng, len| {
            let mut acc = MeanAccumulator::new();
            for _ in 0..len {
                acc.push(sample(rng));
            }
            acc
        },
        MeanAccumulator::merge,
    )
    .expect("n_samples >= 2 yields at least one block");
    acc.estimate()
}

/// Streaming means plus the full matrix of second central cross-moments for a
/// fixed-width vector of outputs per sample. Used wherever a standard error
/// of a *function* of several means is needed (delta method) or where matrix
/// entries are estimated from one shared sample set.
#[derive(Debug, Clone)]
pub struct VectorAccumulator {
    n: u64,
    mean: Vec<f64>,
    /// Central co-moment matrix, row-major `dim x dim`.
    comoment: Vec<f64>,
}

impl VectorAccumulator {
    pub fn new(dim: usize) -> Self {
        VectorAccumulator {
            n: 0,
            mean: vec![0.0; dim],
            comoment: vec![0.0; dim * dim],
        }
    }

    pub fn dim(&self) -> usize {
        self.mean.len()
    }

    pub fn push(&mut self, x: &[f64]) {
        let d = self.dim();
        assert_eq!(x.len(), d);
        self.n += 1;
        let inv_n = 1.0 / self.n as f64;
        let deltas: Vec<f64> = (0..d).map(|i| x[i] - self.mean[i]).collect();
        for i in 0..d {
            self.mean[i] += deltas[i] * inv_n;
        }
        for i in 0..d {
            // delta uses the old mean, the second factor the updated one.
            let post_i = x[i] - self.mean[i];
            for j in 0..d {
                self.comoment[i * d + j] += deltas[j] * post_i;
            }
        }
    }

    pub fn merge(mut self, other: Self) -> Self {
        assert_eq!(self.dim(), other.dim());
        if self.n == 0 {
            return other;
        }
        if other.n == 0 {
            return self;
        }
        let d = self.dim();
        let (na, nb) = (self.n as f64, other.n as f64);
        let w = na * nb / (na + nb);
        for i in 0..d {
            for j in 0..d {
                self.comoment[i * d + j] += other.comoment[i * d + j]
                    + w * (other.mean[i] - self.mean[i]) * (other.mean[j] - self.mean[j]);
            }
        }
        for i in 0..d {
            self.mean[i] = (na * self.mean[i] + nb * other.mean[i]) / (na + nb);
        }
        self.n += other.n;
        self
    }

    pub fn n(&self) -> u64 {
        self.n
    }

    pub fn mean(&self, i: usize) -> f64 {
        self.mean[i]
    }

    /// Sample covariance of components `i` and `j`.
    pub fn covariance(&self, i: usize, j: usize) -> f64 {
        if self.n < 2 {
            return 0.0;
        }
        self.comoment[i * self.dim() + j] / (self.n - 1) as f64
    }

    pub fn component(&self, i: usize) -> Result<McEstimate> {
        if self.n < 2 {
            return Err(Error::TooFewSamples {
                needed: 2,
                got: self.n,
            });
        }
        Ok(McEstimate {
            mean: self.mean[i],
            std_error: (self.covariance(i, i).max(0.0) / self.n as f64).sqrt(),
            n_samples: self.n,
        })
    }

    /// Standard error of `sum_i grad[i] * mean[i]` by the delta method.
    pub fn linear_form_std_error(&self, grad: &[f64]) -> f64 {
        assert_eq!(grad.len(), self.dim());
        let mut var = 0.0;
        for i in 0..self.dim() {
            for j in 0..self.dim() {
                var += grad[i] * grad[j] * self.covariance(i, j);
            }
        }
        (var.max(0.0) / self.n as f64).sqrt()
    }
}

/// Parallel vector-valued Monte Carlo: `fill(rng, out)` writes one sample of
/// all components; returns the merged accumulator.
pub fn mc_vector_mean<F>(
    dim: usize,
    n_samples: u64,
    stream: RngStream,
    fill: F,
) -> Result<VectorAccumulator>
where
    F: Fn(&mut rand_chacha::ChaCha12Rng, &mut [f64]) + Sync,
{
    if n_samples < 2 {
        return Err(Error::TooFewSamples {
            needed: 2,
            got: n_samples,
        });
    }
    Ok(run_blocks(
        n_samples,
        stream,
        |rng, len| {
            let mut acc = VectorAccumulator::new(dim);
            let mut buf = vec![0.0; dim];
            for _ in 0..len {
                fill(rng, &mut buf);
                acc.push(&buf);
            }
            acc
        },
        VectorAccumulator::merge,
    )
    .expect("n_samples >= 2 yields at least one block"))
}
