use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use super::state::AllocationState;
use crate::error::{Error, Result};
use crate::mix::mix64;
use crate::models::{Instance, InstanceSpec, Scheme};
use crate::report::fmt12;

pub const CURVE_POINTS: usize = 512;

/// Outcome of one breakdown run: `m_star` is the edge count at which the
/// first insertion failed.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct BreakdownRecord {
    pub scheme: Scheme,
    pub n: usize,
    pub k: u32,
    pub ell: u32,
    pub seed: u64,
    pub m_star: u64,
    pub load_star: f64,
}

impl BreakdownRecord {
    pub const CSV_HEADER: &'static str = "n,k,ell,seed,m_star,load_star";

    pub fn csv_row(&self) -> String {
        format!("{},{},{},{},{},{}", self.n, self.k, self.ell, self.seed, self.m_star, fmt12(self.load_star))
    }

    /// The instance with the first `m` edges of this run's stream.
    pub fn instance(&self, m: usize) -> Result<Instance> {
        Instance::generate(InstanceSpec::new(self.scheme, self.n, m, self.k, self.ell, self.seed)?)
    }
}

/// Inserts edges from the seeded stream until one cannot be assigned.
pub fn breakdown_load(scheme: Scheme, n: usize, k: u32, ell: u32, seed: u64) -> Result<BreakdownRecord> {
    let spec = InstanceSpec::new(scheme, n, 0, k, ell, seed)?;
    let graph = Instance::generate(spec)?.flow_graph()?;
    let mut state = AllocationState::init_state(&graph)?;
    let mut stream = spec.edge_stream();
    let mut edge = Vec::with_capacity(k as usize);
    let mut m = 0u64;
    loop {
        stream.next_into(&mut edge);
        m += 1;
        if !state.add_edge(&edge) {
            break;
        }
    }
    Ok(BreakdownRecord { scheme, n, k, ell, seed, m_star: m, load_star: m as f64 / n as f64 })
}

/// Empirical failure probability as a function of the load.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct FailureCurve {
    pub records: Vec<BreakdownRecord>,
    /// `(load, fraction of runs that broke down at a load below it)`.
    pub points: Vec<(f64, f64)>,
}

impl FailureCurve {
    pub const CSV_HEADER: &'static str = "load,fail_fraction";

    /// Evaluates the empirical CDF of the breakdown loads on a uniform grid
    /// reaching one edge beyond the observed range on each side.
    pub fn from_records(records: Vec<BreakdownRecord>) -> Self {
        let mut loads: Vec<f64> = records.iter().map(|r| r.load_star).collect();
        loads.sort_by(f64::total_cmp);
        let points = match (loads.first(), loads.last()) {
            (Some(&lo), Some(&hi)) => {
                let pad = 1.0 / records[0].n as f64;
                let (lo, hi) = (lo - pad, hi + pad);
                (0..CURVE_POINTS)
                    .map(|i| {
                        let c = lo + (hi - lo) * i as f64 / (CURVE_POINTS - 1) as f64;
                        let below = loads.partition_point(|&x| x < c);
                        (c, below as f64 / loads.len() as f64)
                    })
                    .collect()
            }
            _ => Vec::new(),
        };
        FailureCurve { records, points }
    }

    pub fn to_csv(&self) -> String {
        let mut out = format!("{}\n", Self::CSV_HEADER);
        for &(c, f) in &self.points {
            out.push_str(&format!("{},{}\n", fmt12(c), fmt12(f)));
        }
        out
    }

    pub fn records_csv(&self) -> String {
        let mut out = format!("{}\n", BreakdownRecord::CSV_HEADER);
        for r in &self.records {
            out.push_str(&r.csv_row());
            out.push('\n');
        }
        out
    }

    pub fn mean_load(&self) -> f64 {
        self.records.iter().map(|r| r.load_star).sum::<f64>() / self.records.len() as f64
    }

    /// Largest slope between consecutive grid points.
    pub fn max_slope(&self) -> f64 {
        self.points
            .windows(2)
            .map(|w| (w[1].1 - w[0].1) / (w[1].0 - w[0].0))
            .fold(0.0, f64::max)
    }

    /// Width of the load interval between two quantiles of the breakdown loads.
    pub fn quantile_width(&self, lo: f64, hi: f64) -> f64 {
        let mut loads: Vec<f64> = self.records.iter().map(|r| r.load_star).collect();
        loads.sort_by(f64::total_cmp);
        let at = |q: f64| loads[((loads.len() - 1) as f64 * q).round() as usize];
        at(hi) - at(lo)
    }
}

/// Runs `trials` breakdown experiments with seeds `mix64(master_seed, i)`.
pub fn failure_curve(
    scheme: Scheme,
    n: usize,
    k: u32,
    ell: u32,
    trials: usize,
    master_seed: u64,
) -> Result<FailureCurve> {
    if trials == 0 {
        return Err(Error::InvalidParams("need at least one trial".into()));
    }
    let records = (0..trials as u64)
        .into_par_iter()
        .map(|i| breakdown_load(scheme, n, k, ell, mix64(master_seed, i)))
        .collect::<Result<Vec<_>>>()?;
    Ok(FailureCurve::from_records(records))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::orient::is_orientable;

    #[test]
    fn counting_bound() {
        for seed in 0..20 {
            let r = breakdown_load(Scheme::Windows, 4, 2, 2, seed).unwrap();
            assert!(r.m_star >= 1 && r.m_star <= 5);
        }
    }

    #[test]
    fn incremental_matches_batch() {
        for seed in 0..25 {
            for scheme in [Scheme::Windows, Scheme::Blocks] {
                let r = breakdown_load(scheme, 12, 2, 2, seed).unwrap();
                let before = r.instance(r.m_star as usize - 1).unwrap().flow_graph().unwrap();
                let at = r.instance(r.m_star as usize).unwrap().flow_graph().unwrap();
                assert!(is_orientable(&before).unwrap());
                assert!(!is_orientable(&at).unwrap());
            }
        }
    }

    #[test]
    fn deterministic_and_csv() {
        let a = breakdown_load(Scheme::Windows, 200, 2, 3, 11).unwrap();
        assert_eq!(a, breakdown_load(Scheme::Windows, 200, 2, 3, 11).unwrap());
        let row = a.csv_row();
        assert!(row.starts_with("200,2,3,11,"));
    }

    #[test]
    fn curve_is_a_cdf() {
        let curve = failure_curve(Scheme::Windows, 300, 2, 2, 40, 5).unwrap();
        assert_eq!(curve.points.len(), CURVE_POINTS);
        assert_eq!(curve.points[0].1, 0.0);
        assert_eq!(curve.points[CURVE_POINTS - 1].1, 1.0);
        assert!(curve.points.windows(2).all(|w| w[0].1 <= w[1].1 && w[0].0 < w[1].0));
        assert!(curve.to_csv().starts_with("load,fail_fraction\n"));
        let again = failure_curve(Scheme::Windows, 300, 2, 2, 40, 5).unwrap();
        assert_eq!(curve, again);
    }

    #[test]
    fn single_trial_is_one_step() {
        let curve = failure_curve(Scheme::Windows, 100, 2, 2, 1, 9).unwrap();
        let jumps = curve.points.windows(2).filter(|w| w[0].1 != w[1].1).count();
        assert_eq!(jumps, 1);
        assert!(failure_curve(Scheme::Windows, 100, 2, 2, 0, 9).is_err());
    }
}
