//! Seeded i.i.d. sampling from finite distributions.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::sample::{FiniteDistribution, Triple, TripleSample};

const GOLDEN_GAMMA: u64 = 0x9e37_79b9_7f4a_7c15;

/// The SplitMix64 output function.
pub fn splitmix64(z: u64) -> u64 {
    let z = (z ^ (z >> 30)).wrapping_mul(0xbf58_476d_1ce4_e5b9);
    let z = (z ^ (z >> 27)).wrapping_mul(0x94d0_49bb_1331_11eb);
    z ^ (z >> 31)
}

/// Seed of trial `t`: the `(t+1)`-th output of a SplitMix64 stream started at
/// `master`. Trials can therefore run in any order on any thread.
pub fn trial_seed(master: u64, trial: u64) -> u64 {
    splitmix64(master.wrapping_add(trial.wrapping_add(1).wrapping_mul(GOLDEN_GAMMA)))
}

pub fn rng_for(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

/// Inverse-CDF sampler over a distribution's support, in table order.
#[derive(Debug, Clone)]
pub struct Sampler {
    triples: Vec<Triple>,
    cdf: Vec<f64>,
    last_positive: usize,
}

impl Sampler {
    pub fn new(dist: &FiniteDistribution) -> Self {
        let mut acc = 0.0;
        let cdf = dist
            .support()
            .iter()
            .map(|&(_, p)| {
                acc += p;
                acc
            })
            .collect();
        let last_positive = dist.support().iter().rposition(|&(_, p)| p > 0.0).unwrap_or(0);
        Sampler {
            triples: dist.support().iter().map(|&(t, _)| t).collect(),
            cdf,
            last_positive,
        }
    }

    pub fn draw<R: Rng + ?Sized>(&self, rng: &mut R) -> Triple {
        let u: f64 = rng.gen();
        // Entries with zero mass share their predecessor's CDF value and are skipped.
        let i = self.cdf.partition_point(|&c| c <= u);
        self.triples[i.min(self.last_positive)]
    }

    pub fn draw_sample<R: Rng + ?Sized>(&self, m: usize, rng: &mut R) -> TripleSample {
        (0..m).map(|_| self.draw(rng)).collect()
    }
}

/// `m` i.i.d. draws from `dist`, determined by `seed`.
pub fn sample(dist: &FiniteDistribution, m: usize, seed: u64) -> TripleSample {
    Sampler::new(dist).draw_sample(m, &mut rng_for(seed))
}
