//! Quick cross-checks of every component against an independent oracle.
//! Output is deterministic for a given seed.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use wincuckoo::bp::montecarlo::{estimate_f, estimate_q};
use wincuckoo::bp::population::population_dynamics;
use wincuckoo::bp::{complete_solution, evaluate_f, MessageLaw};
use wincuckoo::mix::mix64;
use wincuckoo::models::{
    brute_force_max_allocation, brute_force_orientation, translate_down, translate_up, Instance, InstanceSpec,
    Scheme, WeightedHypergraph,
};
use wincuckoo::orient::max_allocation;
use wincuckoo::ModelParams;

use crate::Failure;

const SMALL_INSTANCES: usize = 150;

struct Suite {
    name: &'static str,
    passed: bool,
    detail: String,
}

fn random_small_instance(rng: &mut ChaCha8Rng, seed: u64) -> Result<Instance, Failure> {
    let ell = rng.random_range(2..=3);
    let n = rng.random_range(2 * ell as usize..=8);
    let m = rng.random_range(1..=n + 1);
    let k = rng.random_range(2..=3);
    let spec = InstanceSpec::new(Scheme::Windows, n, m, k, ell, seed)?;
    Ok(Instance::generate(spec)?)
}

/// Flow engine versus exhaustive search. The injected fault gives the flow
/// engine one extra unit of capacity per vertex.
fn flow_vs_brute(seed: u64, inject: bool) -> Result<Suite, Failure> {
    let mut rng = ChaCha8Rng::seed_from_u64(mix64(seed, 1));
    let mut mismatches = 0;
    for i in 0..SMALL_INSTANCES {
        let inst = random_small_instance(&mut rng, mix64(seed, 100 + i as u64))?;
        let pair = inst.windows()?;
        let mut graph: WeightedHypergraph = pair.w_hat.clone();
        if inject {
            graph.vertex_weight += 1;
        }
        let flow = max_allocation(&graph)?;
        let brute = brute_force_max_allocation(&pair.w_hat)?;
        if flow != brute {
            mismatches += 1;
        }
    }
    Ok(Suite {
        name: "flow engine vs exhaustive search",
        passed: mismatches == 0,
        detail: format!("{} of {SMALL_INSTANCES} instances agree", SMALL_INSTANCES - mismatches),
    })
}

/// Text format and orientation translations round trip.
fn round_trips(seed: u64) -> Result<Suite, Failure> {
    let mut rng = ChaCha8Rng::seed_from_u64(mix64(seed, 2));
    let (mut text_ok, mut translated, mut failures) = (0, 0, 0);
    for i in 0..SMALL_INSTANCES {
        let inst = random_small_instance(&mut rng, mix64(seed, 1000 + i as u64))?;
        if Instance::from_text(&inst.to_text()).as_ref() == Ok(&inst) {
            text_ok += 1;
        }
        let pair = inst.windows()?;
        if let Some(mu) = brute_force_orientation(&pair.w)? {
            translated += 1;
            let ok = translate_up(&pair, &mu)
                .and_then(|mu_hat| translate_down(&pair, &mu_hat))
                .and_then(|back| back.check(&pair.w));
            if ok.is_err() {
                failures += 1;
            }
        }
    }
    Ok(Suite {
        name: "instance text and orientation translations",
        passed: text_ok == SMALL_INSTANCES && failures == 0,
        detail: format!(
            "{text_ok}/{SMALL_INSTANCES} text round trips; {}/{translated} orientations survive up and down",
            translated - failures
        ),
    })
}

/// Sampling estimates of F and q against exact enumeration.
fn monte_carlo(seed: u64) -> Result<Suite, Failure> {
    let mut notes = Vec::new();
    let mut passed = true;
    for (i, &(k, ell, lambda)) in [(2, 2, 1.7447), (3, 2, 2.5), (2, 3, 3.0)].iter().enumerate() {
        let p = ModelParams::new(k, ell)?;
        let sol = complete_solution(lambda, p)?;
        let f = estimate_f(&sol, p, 400_000, mix64(seed, 10 + i as u64));
        let q = estimate_q(&sol, p, 400_000, mix64(seed, 20 + i as u64));
        let exact_f = evaluate_f(&sol, p);
        let ok = f.agrees_with(exact_f, 4.0) && q.agrees_with(sol.q, 4.0);
        passed &= ok;
        notes.push(format!("{p} λ={lambda}: F {:.5}±{:.5} vs {:.5}", f.mean, f.std_err, exact_f));
    }
    Ok(Suite { name: "sampled F and q vs enumeration", passed, detail: notes.join("; ") })
}

/// Population dynamics well below and well above the threshold.
fn population(seed: u64) -> Result<Suite, Failure> {
    let p = ModelParams::new(2, 2)?;
    let low = population_dynamics(p, 0.5, 100_000, 60, mix64(seed, 30));
    let trivial = MessageLaw::point(1, 2);
    let low_tv = low.law_wd.total_variation(&trivial);

    let lambda = 3.0;
    let sol = complete_solution(lambda, p)?;
    let high = population_dynamics(p, sol.c_lambda, 100_000, 80, mix64(seed, 31));
    let high_tv = high.law_wd.total_variation(&sol.law_wd);
    Ok(Suite {
        name: "population dynamics vs analytic fixed points",
        passed: low_tv <= 0.01 && high_tv <= 0.02,
        detail: format!(
            "c=0.5: TV {low_tv:.4} to trivial; c={:.4}: TV {high_tv:.4} to λ={lambda}",
            sol.c_lambda
        ),
    })
}

pub fn run(seed: u64, inject: bool) -> Result<(), Failure> {
    let suites = [flow_vs_brute(seed, inject)?, round_trips(seed)?, monte_carlo(seed)?, population(seed)?];
    let mut failed = 0;
    for s in &suites {
        println!("{} {}: {}", if s.passed { "PASS" } else { "FAIL" }, s.name, s.detail);
        failed += usize::from(!s.passed);
    }
    if failed == 0 {
        println!("selftest: all {} suites passed", suites.len());
        Ok(())
    } else {
        Err(Failure::selftest(format!("{failed} of {} suites failed", suites.len())))
    }
}
