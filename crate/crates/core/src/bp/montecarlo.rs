//! Sampling estimators for the quantities the solver computes by exact
//! enumeration. They draw every random variable of the message system
//! directly (no Poisson splitting), so they share nothing with the solver
//! beyond the input laws.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, Poisson};
use rayon::prelude::*;

use super::law::MessageLaw;
use super::solver::BPSolution;
use crate::mix::mix64;
use crate::params::ModelParams;

const CHUNK: u64 = 1 << 16;

/// Sample mean with its standard error.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Estimate {
    pub mean: f64,
    pub std_err: f64,
    pub samples: u64,
}

impl Estimate {
    /// Whether `value` lies within `z` standard errors of the mean. A floor of
    /// 1e-12 covers estimators whose variance is numerically zero.
    pub fn agrees_with(&self, value: f64, z: f64) -> bool {
        (self.mean - value).abs() <= z * self.std_err + 1e-12
    }
}

/// Inverse-CDF sampler for a finite [`MessageLaw`].
#[derive(Debug, Clone)]
pub struct LawSampler {
    support_min: u32,
    cdf: Vec<f64>,
}

impl LawSampler {
    pub fn new(law: &MessageLaw) -> Self {
        let mut acc = 0.0;
        let cdf = law
            .probs
            .iter()
            .map(|p| {
                acc += p;
                acc
            })
            .collect();
        LawSampler { support_min: law.support_min, cdf }
    }

    #[inline]
    pub fn sample<R: Rng + ?Sized>(&self, rng: &mut R) -> u32 {
        let u: f64 = rng.random::<f64>() * self.cdf.last().copied().unwrap_or(1.0);
        let idx = self.cdf.partition_point(|&c| c <= u).min(self.cdf.len() - 1);
        self.support_min + idx as u32
    }
}

#[inline]
fn poisson_draw<R: Rng + ?Sized>(dist: &Option<Poisson<f64>>, rng: &mut R) -> i64 {
    match dist {
        Some(d) => d.sample(rng) as i64,
        None => 0,
    }
}

fn poisson(rate: f64) -> Option<Poisson<f64>> {
    (rate > 0.0).then(|| Poisson::new(rate).expect("finite positive Poisson rate"))
}

/// Runs `per_sample` over `samples` draws split into fixed chunks with their
/// own derived seeds, so the result does not depend on the thread count.
fn estimate<F>(samples: u64, seed: u64, per_sample: F) -> Estimate
where
    F: Fn(&mut ChaCha8Rng) -> f64 + Sync,
{
    let chunks = samples.div_ceil(CHUNK);
    let (sum, sum_sq) = (0..chunks)
        .into_par_iter()
        .map(|c| {
            let mut rng = ChaCha8Rng::seed_from_u64(mix64(seed, c));
            let n = CHUNK.min(samples - c * CHUNK);
            let mut s = 0.0;
            let mut s2 = 0.0;
            for _ in 0..n {
                let v = per_sample(&mut rng);
                s += v;
                s2 += v * v;
            }
            (s, s2)
        })
        .reduce(|| (0.0, 0.0), |a, b| (a.0 + b.0, a.1 + b.1));
    let n = samples as f64;
    let mean = sum / n;
    let var = (sum_sq / n - mean * mean).max(0.0) * n / (n - 1.0).max(1.0);
    Estimate { mean, std_err: (var / n).sqrt(), samples }
}

/// Estimates `q = Pr[I_ow = 1]` by drawing `k - 1` independent copies of
/// `I_wo = [ℓ - I_dw - I_dw' - Y]_0^1`, `Y ~ Po(λ)`, and checking they are all 0.
pub fn estimate_q(sol: &BPSolution, params: ModelParams, samples: u64, seed: u64) -> Estimate {
    let dw = LawSampler::new(&sol.law_dw);
    let y = poisson(sol.lambda);
    let ell = params.ell() as i64;
    let k = params.k();
    estimate(samples, seed, |rng| {
        let all_zero = (0..k - 1).all(|_| {
            let d = dw.sample(rng) as i64 + dw.sample(rng) as i64;
            ell - d - poisson_draw(&y, rng) <= 0
        });
        if all_zero { 1.0 } else { 0.0 }
    })
}

/// Estimates `F(I_dw, I_wd, I_ow, I_wo, c)` by sampling the full expression:
/// two copies of `I_wd`, `k` copies of `I_wo`, `X ~ Po(kc)` copies of `I_ow`
/// and two copies of `I_dw`, all independent.
pub fn estimate_f(sol: &BPSolution, params: ModelParams, samples: u64, seed: u64) -> Estimate {
    let wd = LawSampler::new(&sol.law_wd);
    let dw = LawSampler::new(&sol.law_dw);
    let ell = params.ell() as i64;
    let k = params.k();
    let c = sol.c_lambda;
    let x_dist = poisson(params.k() as f64 * c);
    let (p_wo, q) = (sol.p_wo, sol.q);
    estimate(samples, seed, move |rng| {
        let a = wd.sample(rng) as i64 + wd.sample(rng) as i64;
        let helper = a.clamp(0, ell - 1) as f64;

        let wo_sum: i64 = (0..k).map(|_| rng.random_bool(p_wo) as i64).sum();
        let ordinary = c * wo_sum.clamp(0, 1) as f64;

        let x = poisson_draw(&x_dist, rng);
        let ow: Vec<i64> = (0..x).map(|_| rng.random_bool(q) as i64).collect();
        let s: i64 = ow.iter().sum();
        let d1 = dw.sample(rng) as i64;
        let d2 = dw.sample(rng) as i64;
        let mut v = ell - (ell - d1 - s).max(0) - (ell - d2 - s).max(0);
        for &o in &ow {
            v -= (ell - d1 - d2 - (s - o)).max(0);
        }
        helper + ordinary + v.max(0) as f64
    })
}
