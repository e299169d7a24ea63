use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// A probability law on the integers `support_min, support_min + 1, …`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct MessageLaw {
    pub support_min: u32,
    pub probs: Vec<f64>,
}

impl MessageLaw {
    pub fn new(support_min: u32, probs: Vec<f64>) -> Self {
        MessageLaw { support_min, probs }
    }

    /// Point mass at `value`, stored on the support `{0, …, len-1}`.
    pub fn point(value: u32, len: usize) -> Self {
        let mut probs = vec![0.0; len];
        probs[value as usize] = 1.0;
        MessageLaw { support_min: 0, probs }
    }

    /// Empirical law of `values` on `{0, …, len-1}`.
    pub fn empirical(values: &[u8], len: usize) -> Self {
        let mut counts = vec![0u64; len];
        for &v in values {
            counts[v as usize] += 1;
        }
        let total = values.len().max(1) as f64;
        MessageLaw::new(0, counts.into_iter().map(|c| c as f64 / total).collect())
    }

    pub fn len(&self) -> usize {
        self.probs.len()
    }

    pub fn is_empty(&self) -> bool {
        self.probs.is_empty()
    }

    pub fn prob(&self, value: u32) -> f64 {
        value
            .checked_sub(self.support_min)
            .and_then(|i| self.probs.get(i as usize))
            .copied()
            .unwrap_or(0.0)
    }

    pub fn sum(&self) -> f64 {
        self.probs.iter().sum()
    }

    pub fn mean(&self) -> f64 {
        self.probs
            .iter()
            .enumerate()
            .map(|(i, p)| (self.support_min as f64 + i as f64) * p)
            .sum()
    }

    /// The law of `(support_min + len - 1) - X`, i.e. the vector reversed.
    pub fn reversed(&self) -> Self {
        let mut probs = self.probs.clone();
        probs.reverse();
        MessageLaw { support_min: self.support_min, probs }
    }

    pub fn total_variation(&self, other: &MessageLaw) -> f64 {
        let lo = self.support_min.min(other.support_min);
        let hi = (self.support_min as usize + self.len()).max(other.support_min as usize + other.len());
        0.5 * (lo as usize..hi)
            .map(|v| (self.prob(v as u32) - other.prob(v as u32)).abs())
            .sum::<f64>()
    }

    /// Entries in `[0, 1]` summing to 1 within `tol`.
    pub fn validate(&self, tol: f64) -> Result<()> {
        if let Some(p) = self.probs.iter().find(|p| !(0.0..=1.0).contains(*p)) {
            return Err(Error::Numerical(format!("probability {p} outside [0, 1]")));
        }
        let s = self.sum();
        if (s - 1.0).abs() > tol {
            return Err(Error::Numerical(format!("probabilities sum to {s}")));
        }
        Ok(())
    }
}
