//! Reproducible Brownian increments on a fine grid, with exact aggregation to
//! coarser grids.
//!
//! Every path is keyed by `(master_seed, path_index)`: the key selects a ChaCha8
//! stream (seed from `master_seed`, stream id `path_index`), so paths can be
//! generated in any order on any number of threads. Standard normals come from
//! the Box-Muller transform applied to consecutive pairs of 53-bit uniforms in
//! `(0, 1]`; both outputs of each pair are used.
//!
//! Sampled increments are rounded to multiples of [`INCREMENT_QUANTUM`]. Sums of
//! such values are exact in `f64` as long as they stay below `2^21` in magnitude,
//! which makes coarsening associative: aggregating `n_ref -> n -> m` gives the
//! same bits as `n_ref -> m`, and a coarse path compares against the fine path
//! without summation-order noise.

use rand_chacha::ChaCha8Rng;
use rand_core::{RngCore, SeedableRng};

use crate::error::{invalid, Error, Result};

/// Grid on which sampled increments live (`2^-32`).
pub const INCREMENT_QUANTUM: f64 = 1.0 / 4_294_967_296.0;

/// Fine-resolution Gaussian increments of a `d`-dimensional Brownian path on `[0, T]`.
#[derive(Debug, Clone, PartialEq)]
pub struct BrownianFabric {
    horizon: f64,
    fine_steps: usize,
    dimension: usize,
    /// Row-major, `fine_steps x dimension`.
    increments: Vec<f64>,
    seed: Option<(u64, u64)>,
}

fn quantize(x: f64) -> f64 {
    (x / INCREMENT_QUANTUM).round() * INCREMENT_QUANTUM
}

struct NormalStream {
    rng: ChaCha8Rng,
    spare: Option<f64>,
}

impl NormalStream {
    fn new(master_seed: u64, path_index: u64) -> Self {
        let mut rng = ChaCha8Rng::seed_from_u64(master_seed);
        rng.set_stream(path_index);
        Self { rng, spare: None }
    }

    fn uniform_open_closed(&mut self) -> f64 {
        ((self.rng.next_u64() >> 11) + 1) as f64 * (1.0 / (1u64 << 53) as f64)
    }

    fn next(&mut self) -> f64 {
        if let Some(z) = self.spare.take() {
            return z;
        }
        let u1 = self.uniform_open_closed();
        let u2 = self.uniform_open_closed();
        let radius = (-2.0 * u1.ln()).sqrt();
        let angle = std::f64::consts::TAU * u2;
        self.spare = Some(radius * angle.sin());
        radius * angle.cos()
    }
}

impl BrownianFabric {
    /// Samples `fine_steps` i.i.d. `N(0, T / fine_steps I_d)` increments for path
    /// `path_index` of the run keyed by `master_seed`.
    pub fn sample(
        master_seed: u64,
        path_index: u64,
        horizon: f64,
        fine_steps: usize,
        dimension: usize,
    ) -> Result<Self> {
        validate_shape(horizon, fine_steps, dimension)?;
        let scale = (horizon / fine_steps as f64).sqrt();
        let mut stream = NormalStream::new(master_seed, path_index);
        let increments = (0..fine_steps * dimension)
            .map(|_| quantize(scale * stream.next()))
            .collect();
        Ok(Self {
            horizon,
            fine_steps,
            dimension,
            increments,
            seed: Some((master_seed, path_index)),
        })
    }

    /// Wraps explicit increments (row-major, `len / dimension` steps).
    pub fn from_increments(horizon: f64, dimension: usize, increments: Vec<f64>) -> Result<Self> {
        if dimension == 0 || increments.len() % dimension != 0 {
            return Err(invalid(format!(
                "{} increments do not split into rows of dimension {dimension}",
                increments.len()
            )));
        }
        let fine_steps = increments.len() / dimension;
        validate_shape(horizon, fine_steps, dimension)?;
        Ok(Self {
            horizon,
            fine_steps,
            dimension,
            increments,
            seed: None,
        })
    }

    pub fn horizon(&self) -> f64 {
        self.horizon
    }

    pub fn fine_steps(&self) -> usize {
        self.fine_steps
    }

    pub fn dimension(&self) -> usize {
        self.dimension
    }

    /// `(master_seed, path_index)` for sampled fabrics.
    pub fn seed(&self) -> Option<(u64, u64)> {
        self.seed
    }

    pub fn increments(&self) -> &[f64] {
        &self.increments
    }

    pub fn increment(&self, k: usize) -> &[f64] {
        &self.increments[k * self.dimension..(k + 1) * self.dimension]
    }

    /// Aggregates to `coarse_steps` increments (row-major). Each coarse increment
    /// is the ascending-order sum of its block of fine increments.
    pub fn coarsen(&self, coarse_steps: usize) -> Result<Vec<f64>> {
        if coarse_steps == 0 || self.fine_steps % coarse_steps != 0 {
            return Err(Error::Config(format!(
                "{coarse_steps} steps do not divide the fabric's {} fine steps",
                self.fine_steps
            )));
        }
        let block = self.fine_steps / coarse_steps;
        if block == 1 {
            return Ok(self.increments.clone());
        }
        let d = self.dimension;
        let mut out = vec![0.0; coarse_steps * d];
        for (j, row) in out.chunks_exact_mut(d).enumerate() {
            for k in j * block..(j + 1) * block {
                for (acc, dw) in row.iter_mut().zip(self.increment(k)) {
                    *acc += dw;
                }
            }
        }
        Ok(out)
    }

    /// [`coarsen`](Self::coarsen) reinterpreted as a fabric on the coarse grid.
    pub fn coarsened(&self, coarse_steps: usize) -> Result<BrownianFabric> {
        let increments = self.coarsen(coarse_steps)?;
        Ok(Self {
            horizon: self.horizon,
            fine_steps: coarse_steps,
            dimension: self.dimension,
            increments,
            seed: self.seed,
        })
    }
}

fn validate_shape(horizon: f64, fine_steps: usize, dimension: usize) -> Result<()> {
    if !(horizon > 0.0) || !horizon.is_finite() {
        return Err(invalid(format!(
            "horizon must be positive and finite, got {horizon}"
        )));
    }
    if fine_steps == 0 {
        return Err(invalid("fabric needs at least one step"));
    }
    if dimension == 0 {
        return Err(invalid("dimension must be at least 1"));
    }
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    fn mean_and_variance(xs: &[f64]) -> (f64, f64) {
        let n = xs.len() as f64;
        let mean = xs.iter().sum::<f64>() / n;
        let var = xs.iter().map(|x| (x - mean).powi(2)).sum::<f64>() / (n - 1.0);
        (mean, var)
    }

    #[test]
    fn same_key_reproduces_bits() {
        let a = BrownianFabric::sample(7, 3, 1.0, 1024, 2).unwrap();
        let b = BrownianFabric::sample(7, 3, 1.0, 1024, 2).unwrap();
        assert_eq!(a.increments(), b.increments());
        assert_eq!(a.seed(), Some((7, 3)));
    }

    #[test]
    fn neighbouring_paths_differ() {
        let a = BrownianFabric::sample(7, 3, 1.0, 1024, 1).unwrap();
        let b = BrownianFabric::sample(7, 4, 1.0, 1024, 1).unwrap();
        let c = BrownianFabric::sample(8, 3, 1.0, 1024, 1).unwrap();
        assert_ne!(a.increments(), b.increments());
        assert_ne!(a.increments(), c.increments());
    }

    #[test]
    fn single_fabric_variance() {
        let n = 1 << 16;
        let f = BrownianFabric::sample(11, 0, 1.0, n, 1).unwrap();
        let (_, var) = mean_and_variance(f.increments());
        let target = 1.0 / n as f64;
        assert!(
            var > 0.9 * target && var < 1.1 * target,
            "variance {var} vs {target}"
        );
    }

    #[test]
    fn distributional_sanity() {
        let n = 100_000;
        let horizon = 2.0;
        let f = BrownianFabric::sample(2024, 17, horizon, n, 1).unwrap();
        let (mean, var) = mean_and_variance(f.increments());
        let sigma = (horizon / n as f64).sqrt();
        assert!(mean.abs() <= 4.0 * sigma / (n as f64).sqrt(), "mean {mean}");
        assert!(
            (var / (sigma * sigma) - 1.0).abs() <= 0.05,
            "variance {var}"
        );
    }

    #[test]
    fn coarsen_examples() {
        let f = BrownianFabric::from_increments(1.0, 1, vec![0.1, -0.2, 0.3, 0.4]).unwrap();
        assert_eq!(f.coarsen(2).unwrap(), vec![0.1 + -0.2, 0.3 + 0.4]);
        assert!((f.coarsen(2).unwrap()[0] + 0.1).abs() < 1e-15);
        assert!((f.coarsen(2).unwrap()[1] - 0.7).abs() < 1e-15);
        assert_eq!(f.coarsen(4).unwrap(), f.increments());
        assert_eq!(f.coarsen(1).unwrap(), vec![((0.1 + -0.2) + 0.3) + 0.4]);
        assert!(f.coarsen(3).is_err());
        assert!(f.coarsen(0).is_err());
    }

    #[test]
    fn coarsen_two_dimensional_rows() {
        let f = BrownianFabric::from_increments(1.0, 2, vec![1.0, 10.0, 2.0, 20.0]).unwrap();
        assert_eq!(f.coarsen(1).unwrap(), vec![3.0, 30.0]);
    }

    #[test]
    fn rejects_bad_shapes() {
        assert!(BrownianFabric::sample(0, 0, 1.0, 0, 1).is_err());
        assert!(BrownianFabric::sample(0, 0, 0.0, 4, 1).is_err());
        assert!(BrownianFabric::sample(0, 0, 1.0, 4, 0).is_err());
        assert!(BrownianFabric::from_increments(1.0, 2, vec![1.0, 2.0, 3.0]).is_err());
    }

    proptest! {
        #![proptest_config(ProptestConfig::with_cases(64))]

        #[test]
        fn coarsening_chains_are_bit_exact(seed in any::<u64>(), path in any::<u64>(), a in 0u32..4, b in 0u32..4) {
            let fine = 1usize << 10;
            let (m_exp, n_exp) = (a.min(b), a.max(b) + 4);
            let (m, n) = (1usize << m_exp, 1usize << n_exp);
            let f = BrownianFabric::sample(seed, path, 1.0, fine, 2).unwrap();
            let direct = f.coarsen(m).unwrap();
            let chained = f.coarsened(n).unwrap().coarsen(m).unwrap();
            prop_assert_eq!(&direct, &chained);
            // Full-horizon sums agree bit for bit.
            let total_fine: f64 = f.increments().iter().step_by(2).sum();
            let total_coarse: f64 = f.coarsen(n).unwrap().iter().step_by(2).sum();
            prop_assert_eq!(total_fine, total_coarse);
        }
    }
}
