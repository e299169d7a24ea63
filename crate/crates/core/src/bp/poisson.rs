use super::law::MessageLaw;

/// `ln(r!)`, exact summation for small `r` and a Stirling series above.
pub(crate) fn ln_factorial(r: u64) -> f64 {
    if r < 64 {
        (2..=r).map(|i| (i as f64).ln()).sum()
    } else {
        let x = r as f64 + 1.0;
        // Stirling series for ln Γ(x), accurate to well below 1e-15 for x ≥ 64.
        (x - 0.5) * x.ln() - x + 0.5 * (2.0 * std::f64::consts::PI).ln() + 1.0 / (12.0 * x)
            - 1.0 / (360.0 * x.powi(3))
            + 1.0 / (1260.0 * x.powi(5))
    }
}

/// `Pr[Po(λ) = r]`, evaluated in log space so large `λ` does not underflow
/// prematurely.
pub(crate) fn pmf_at(lambda: f64, r: u64) -> f64 {
    if lambda == 0.0 {
        return if r == 0 { 1.0 } else { 0.0 };
    }
    (-lambda + r as f64 * lambda.ln() - ln_factorial(r)).exp()
}

/// `Pr[Po(λ) ≥ m]` without cancellation: below the mean it is `1 - cdf`, above
/// the mean a directly summed (geometrically convergent) series.
pub fn poisson_tail(lambda: f64, m: u64) -> f64 {
    if m == 0 {
        return 1.0;
    }
    if lambda == 0.0 {
        return 0.0;
    }
    if lambda > m as f64 {
        let mut term = (-lambda).exp();
        let mut cdf = 0.0;
        for r in 0..m {
            if r > 0 {
                term *= lambda / r as f64;
            }
            cdf += term;
        }
        (1.0 - cdf).max(0.0)
    } else {
        let mut term = pmf_at(lambda, m);
        let mut sum = 0.0;
        let mut r = m;
        while term > 0.0 && term > sum * 1e-17 {
            sum += term;
            r += 1;
            term *= lambda / r as f64;
        }
        sum
    }
}

/// Pmf of `Po(λ)` truncated at the smallest `N` whose tail mass
/// `Pr[Po(λ) > N]` is below `tol`. Entries are raw pmf values (not
/// renormalized); the truncation point is the vector length minus one.
///
/// # Panics
///
/// If `λ` is negative or not finite, or `tol` is outside `(0, 1e-6]`.
pub fn poisson_pmf(lambda: f64, tol: f64) -> MessageLaw {
    assert!(lambda >= 0.0 && lambda.is_finite(), "λ must be finite and nonnegative");
    assert!(tol > 0.0 && tol <= 1e-6, "tolerance must lie in (0, 1e-6]");
    if lambda == 0.0 {
        return MessageLaw::new(0, vec![1.0]);
    }
    // Generate until the terms are negligible against tol, then pick the
    // cut from exact suffix sums.
    let mut probs = Vec::new();
    let mut r = 0u64;
    loop {
        let p = pmf_at(lambda, r);
        probs.push(p);
        if r as f64 > lambda && p < tol * 1e-6 {
            break;
        }
        r += 1;
    }
    let mut suffix = 0.0;
    let mut cut = probs.len() - 1;
    for i in (0..probs.len()).rev() {
        // suffix = Pr[Po(λ) > i]
        if suffix >= tol {
            break;
        }
        cut = i;
        suffix += probs[i];
    }
    probs.truncate(cut + 1);
    MessageLaw::new(0, probs)
}

/// Small cache of pmf and upper-tail values of one Poisson law.
#[derive(Debug, Clone)]
pub struct PoissonTable {
    pub lambda: f64,
    pmf: Vec<f64>,
    tail: Vec<f64>,
}

impl PoissonTable {
    /// Caches `Pr[Y = r]` and `Pr[Y ≥ r]` for `r ≤ upto`.
    pub fn new(lambda: f64, upto: usize) -> Self {
        let pmf = (0..=upto as u64).map(|r| pmf_at(lambda, r)).collect();
        let tail = (0..=upto as u64).map(|r| poisson_tail(lambda, r)).collect();
        PoissonTable { lambda, pmf, tail }
    }

    #[inline]
    pub fn pmf(&self, r: usize) -> f64 {
        match self.pmf.get(r) {
            Some(&p) => p,
            None => pmf_at(self.lambda, r as u64),
        }
    }

    /// `Pr[Y ≥ r]`.
    #[inline]
    pub fn tail(&self, r: usize) -> f64 {
        match self.tail.get(r) {
            Some(&p) => p,
            None => poisson_tail(self.lambda, r as u64),
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn point_mass_at_zero() {
        assert_eq!(poisson_pmf(0.0, 1e-12).probs, vec![1.0]);
    }

    #[test]
    fn unit_rate_matches_definition_and_is_minimal() {
        let law = poisson_pmf(1.0, 1e-12);
        let mut fact = 1.0;
        for (j, p) in law.probs.iter().enumerate() {
            if j > 0 {
                fact *= j as f64;
            }
            let expected = (-1.0f64).exp() / fact;
            assert!((p - expected).abs() <= 1e-13 * expected, "j = {j}");
        }
        // Tail after the last entry is below tol, tail after the one before is not.
        let n = law.len() as u64;
        assert!(poisson_tail(1.0, n) < 1e-12);
        assert!(poisson_tail(1.0, n - 1) >= 1e-12);
    }

    #[test]
    fn mass_covers_all_but_tol() {
        // Oracle: exact rational cumulative sum of 2.5^j/j! scaled by e^{-2.5},
        // accumulated with compensated summation in the reverse order.
        let law = poisson_pmf(2.5, 1e-12);
        let mut terms = Vec::new();
        let mut t = 1.0f64;
        for j in 0..law.len() {
            if j > 0 {
                t *= 2.5 / j as f64;
            }
            terms.push(t);
        }
        let (mut s, mut comp) = (0.0f64, 0.0f64);
        for x in terms.iter().rev() {
            let y = x - comp;
            let u = s + y;
            comp = (u - s) - y;
            s = u;
        }
        let cumulative = s * (-2.5f64).exp();
        assert!(cumulative >= 1.0 - 1e-12);
        assert!((law.sum() - cumulative).abs() < 1e-14);
    }

    #[test]
    fn tail_is_consistent_on_both_sides_of_the_mean() {
        for &lambda in &[0.001, 0.3, 1.0, 4.0, 30.0] {
            for m in 0..12u64 {
                let direct: f64 = (m..400).map(|r| pmf_at(lambda, r)).sum();
                let t = poisson_tail(lambda, m);
                assert!((t - direct).abs() <= 1e-14 + 1e-12 * direct, "λ={lambda} m={m}");
            }
        }
        // Relative accuracy far in the tail.
        let t = poisson_tail(1e-3, 5);
        let lead = 1e-15 / 120.0 * (-1e-3f64).exp();
        assert!((t / lead - 1.0).abs() < 1e-3);
    }

    #[test]
    fn ln_factorial_branches_agree() {
        let exact: f64 = (2..=64u64).map(|i| (i as f64).ln()).sum();
        assert!((ln_factorial(64) - exact).abs() < 1e-10);
    }
}
