use serde::{Deserialize, Serialize};

use super::table::LsaTable;
use crate::error::{Error, Result};
use crate::params::ModelParams;
use crate::report::fmt12;

pub const DEFAULT_BATCH: usize = 10_000;

/// Mean touches of one batch of insertions, at the load reached after it.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct FillPoint {
    pub load: f64,
    pub avg_touches: f64,
}

impl FillPoint {
    pub const CSV_HEADER: &'static str = "load,avg_touches";

    pub fn csv_row(&self) -> String {
        format!("{},{}", fmt12(self.load), fmt12(self.avg_touches))
    }
}

/// Fills a fresh table with keys `0, 1, …` up to `target_load · n` keys and
/// records the mean touches of every full batch.
pub fn bench_fill(n: usize, params: ModelParams, target_load: f64, batch: usize, master_seed: u64) -> Result<Vec<FillPoint>> {
    if !(0.0..1.0).contains(&target_load) {
        return Err(Error::InvalidParams(format!("target load {target_load} must lie in [0, 1)")));
    }
    if batch == 0 {
        return Err(Error::InvalidParams("batch size must be positive".into()));
    }
    let mut table: LsaTable<()> = LsaTable::new(n, params, master_seed)?;
    let target = (target_load * n as f64).floor() as u64;
    let mut points = Vec::with_capacity(target as usize / batch);
    let mut sum = 0u64;
    let mut in_batch = 0usize;
    for key in 0..target {
        let stats = table.insert(key, ())?;
        if !stats.success {
            return Err(Error::InsertionFailed { load: key as f64 / n as f64 });
        }
        sum += stats.touches;
        in_batch += 1;
        if in_batch == batch {
            points.push(FillPoint { load: table.load(), avg_touches: sum as f64 / batch as f64 });
            sum = 0;
            in_batch = 0;
        }
    }
    Ok(points)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn flat_then_rising() {
        let params = ModelParams::new(2, 2).unwrap();
        let points = bench_fill(20_000, params, 0.95, 1000, 3).unwrap();
        assert_eq!(points.len(), 19);
        assert!(points[4].avg_touches < 1.5);
        assert!(points.last().unwrap().avg_touches > points[4].avg_touches);
        assert!(points.windows(2).all(|w| w[0].load < w[1].load));
        assert_eq!(FillPoint::CSV_HEADER, "load,avg_touches");
    }

    #[test]
    fn rejects_bad_arguments() {
        let params = ModelParams::new(2, 2).unwrap();
        assert!(bench_fill(100, params, 1.0, 10, 0).is_err());
        assert!(bench_fill(100, params, 0.5, 0, 0).is_err());
    }

    #[test]
    fn overfull_fill_fails() {
        let params = ModelParams::new(2, 2).unwrap();
        match bench_fill(5000, params, 0.99, 1000, 1) {
            Err(Error::InsertionFailed { load }) => assert!(load > 0.9 && load < 0.99),
            other => panic!("expected failure, got {other:?}"),
        }
    }
}
