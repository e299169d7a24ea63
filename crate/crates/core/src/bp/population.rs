//! Population dynamics for the message fixed point at a given load `c`.
//!
//! Each of the four message variables is represented by a large population
//! of samples. A round first refreshes the messages leaving helper and
//! ordinary edges from the current vertex messages, then refreshes the
//! vertex messages from the new ones. Updating both sides at once instead
//! would turn the antitone message map into a period-two oscillation.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, Poisson};
use rayon::prelude::*;

use super::law::MessageLaw;
use crate::mix::mix64;
use crate::params::ModelParams;

const CHUNK: usize = 1 << 14;

/// Starting configuration of the populations.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum PopulationInit {
    /// All vertex messages 0 (the usual starting point of message passing).
    Zero,
    /// Exactly the trivial fixed point.
    Trivial,
    /// Independent uniform values.
    Uniform,
}

/// Empirical message laws after the final round.
#[derive(Debug, Clone, PartialEq)]
pub struct PopulationResult {
    pub law_dw: MessageLaw,
    pub law_ow: MessageLaw,
    pub law_wd: MessageLaw,
    pub law_wo: MessageLaw,
}

impl PopulationResult {
    /// Empirical `Pr[I_ow = 1]`.
    pub fn q(&self) -> f64 {
        self.law_ow.prob(1)
    }

    /// Empirical `Pr[I_wo = 1]`.
    pub fn p_wo(&self) -> f64 {
        self.law_wo.prob(1)
    }

    /// Whether the populations sit on the trivial fixed point up to `tv`.
    pub fn is_trivial(&self, ell: u32, tv: f64) -> bool {
        self.law_wd.total_variation(&MessageLaw::point(ell - 1, ell as usize)) <= tv
            && self.q() <= tv
    }
}

/// Runs `rounds` rounds of population dynamics at load `c`, starting from
/// all-zero vertex messages.
///
/// # Panics
///
/// If `pop_size < 100_000`, `rounds < 50` or `c` is not positive.
pub fn population_dynamics(
    params: ModelParams,
    c: f64,
    pop_size: usize,
    rounds: usize,
    seed: u64,
) -> PopulationResult {
    assert!(pop_size >= 100_000, "population must have at least 10^5 members");
    assert!(rounds >= 50, "at least 50 rounds are required");
    run(params, c, pop_size, rounds, seed, PopulationInit::Zero)
}

/// As [`population_dynamics`] with an explicit start and no size limits.
pub fn population_dynamics_from(
    params: ModelParams,
    c: f64,
    pop_size: usize,
    rounds: usize,
    seed: u64,
    init: PopulationInit,
) -> PopulationResult {
    run(params, c, pop_size, rounds, seed, init)
}

fn fill<F>(out: &mut [u8], seed: u64, f: F)
where
    F: Fn(&mut ChaCha8Rng) -> u8 + Sync,
{
    out.par_chunks_mut(CHUNK).enumerate().for_each(|(ci, chunk)| {
        let mut rng = ChaCha8Rng::seed_from_u64(mix64(seed, ci as u64));
        for slot in chunk.iter_mut() {
            *slot = f(&mut rng);
        }
    });
}

fn run(
    params: ModelParams,
    c: f64,
    n: usize,
    rounds: usize,
    seed: u64,
    init: PopulationInit,
) -> PopulationResult {
    assert!(c > 0.0 && c.is_finite(), "load must be positive");
    let ell = params.ell() as i64;
    let k = params.k();
    let top = (ell - 1) as u8;
    let x_dist = Poisson::new(params.k() as f64 * c).expect("positive rate");

    let (mut dw, mut ow, mut wd, mut wo) = (vec![0u8; n], vec![0u8; n], vec![0u8; n], vec![0u8; n]);
    match init {
        PopulationInit::Zero => {}
        PopulationInit::Trivial => {
            wd.fill(top);
            wo.fill(1);
        }
        PopulationInit::Uniform => {
            fill(&mut wd, mix64(seed, u64::MAX), |rng| rng.random_range(0..=top));
            fill(&mut wo, mix64(seed, u64::MAX - 1), |rng| rng.random_range(0..=1));
            fill(&mut dw, mix64(seed, u64::MAX - 2), |rng| rng.random_range(0..=top));
            fill(&mut ow, mix64(seed, u64::MAX - 3), |rng| rng.random_range(0..=1));
        }
    }
    let pick = |pop: &[u8], rng: &mut ChaCha8Rng| pop[rng.random_range(0..pop.len())];

    for round in 0..rounds as u64 {
        let base = mix64(seed, round);
        {
            let (wd, wo) = (&wd, &wo);
            // I_dw = ℓ - 1 - I_wd
            fill(&mut dw, mix64(base, 0), |rng| top - pick(wd, rng));
            // I_ow = [1 - Σ_{k-1} I_wo]_0
            fill(&mut ow, mix64(base, 1), |rng| (0..k - 1).all(|_| pick(wo, rng) == 0) as u8);
        }
        let (dw_ref, ow_ref) = (&dw, &ow);
        let incoming = |rng: &mut ChaCha8Rng| -> i64 {
            let x = x_dist.sample(rng) as u64;
            (0..x).map(|_| pick(ow_ref, rng) as i64).sum()
        };
        // I_wd = [ℓ - I_dw - Σ_X I_ow]_0^{ℓ-1}
        fill(&mut wd, mix64(base, 2), |rng| {
            let d = pick(dw_ref, rng) as i64;
            (ell - d - incoming(rng)).clamp(0, ell - 1) as u8
        });
        // I_wo = [ℓ - I_dw - I_dw' - Σ_X I_ow]_0^1
        fill(&mut wo, mix64(base, 3), |rng| {
            let d = pick(dw_ref, rng) as i64 + pick(dw_ref, rng) as i64;
            (ell - d - incoming(rng)).clamp(0, 1) as u8
        });
    }

    let len = ell as usize;
    PopulationResult {
        law_dw: MessageLaw::empirical(&dw, len),
        law_ow: MessageLaw::empirical(&ow, 2),
        law_wd: MessageLaw::empirical(&wd, len),
        law_wo: MessageLaw::empirical(&wo, 2),
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn trivial_start_stays_trivial() {
        let p = ModelParams::new(2, 2).unwrap();
        for &c in &[0.3, 0.97, 1.5] {
            let r = population_dynamics_from(p, c, 20_000, 10, 1, PopulationInit::Trivial);
            assert_eq!(r.law_wd, MessageLaw::point(1, 2));
            assert_eq!(r.law_dw, MessageLaw::point(0, 2));
            assert_eq!(r.q(), 0.0);
            assert_eq!(r.p_wo(), 1.0);
        }
    }

    #[test]
    fn low_load_collapses_to_trivial() {
        let p = ModelParams::new(2, 2).unwrap();
        let r = population_dynamics_from(p, 0.5, 50_000, 60, 9, PopulationInit::Zero);
        assert!(r.is_trivial(2, 0.01), "{r:?}");
    }

    #[test]
    fn seeded_runs_are_reproducible() {
        let p = ModelParams::new(3, 2).unwrap();
        let a = population_dynamics_from(p, 0.99, 30_000, 5, 4, PopulationInit::Uniform);
        let b = population_dynamics_from(p, 0.99, 30_000, 5, 4, PopulationInit::Uniform);
        assert_eq!(a, b);
    }

    #[test]
    #[should_panic]
    fn small_population_rejected() {
        population_dynamics(ModelParams::new(2, 2).unwrap(), 0.9, 1000, 100, 0);
    }
}
