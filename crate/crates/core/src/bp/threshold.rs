use serde::{Deserialize, Serialize};

use super::solver::{complete_solution, gap_functional};
use crate::error::{Error, Result};
use crate::params::ModelParams;

/// Outcome of [`compute_threshold`].
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ThresholdResult {
    pub params: ModelParams,
    /// The load threshold γ_{k,ℓ}.
    pub gamma: f64,
    /// Where the infimum is attained (normally the boundary root of `g`).
    pub lambda_star: f64,
    /// λ range outside of which `c_λ > 1`.
    pub bracket: (f64, f64),
    /// `g(lambda_star)`.
    pub residual_g: f64,
    /// Number of `(f, g)` evaluations.
    pub evaluations: usize,
    pub diagnostics: String,
}

const GRID_POINTS: usize = 2000;
const GRID_LO: f64 = 1e-3;
const GRID_HI: f64 = 64.0;
const LAMBDA_TOL: f64 = 1e-12;
const GOLDEN: f64 = 0.618_033_988_749_894_8;

/// `(f(λ), g(λ)) = (c_λ, F(ρ_λ, c_λ) - (ℓ-1) - c_λ)`.
pub fn f_and_g(lambda: f64, params: ModelParams) -> Result<(f64, f64)> {
    let sol = complete_solution(lambda, params)?;
    Ok((sol.c_lambda, gap_functional(&sol, params)))
}

struct Evaluator {
    params: ModelParams,
    count: usize,
}

impl Evaluator {
    /// Underflow of q means λ is so small that c_λ is astronomically large.
    fn eval(&mut self, lambda: f64) -> Result<(f64, f64)> {
        self.count += 1;
        match f_and_g(lambda, self.params) {
            Err(Error::Underflow { .. }) => Ok((f64::INFINITY, f64::NAN)),
            other => other,
        }
    }
}

fn geometric_grid(lo: f64, hi: f64, n: usize) -> Vec<f64> {
    let ratio = hi / lo;
    (0..n).map(|i| lo * ratio.powf(i as f64 / (n - 1) as f64)).collect()
}

/// Computes `γ = inf { c_λ : g(λ) < 0 }`.
///
/// 1. Widen `[10^-3, 64]` until `c_λ > 1` at both ends; only λ with
///    `c_λ ≤ 1` can matter since γ < 1.
/// 2. Sample `(f, g)` on a 2000-point geometric grid and restrict to the
///    bracket of points with `c_λ ≤ 1` (plus one neighbour on each side).
/// 3. Refine each sign change of `g` by bisection to λ-width 1e-12; the
///    value of `f` at the root is a candidate for the infimum.
/// 4. As a guard against a non-monotone `f`, every grid point with `g < 0`
///    is a candidate too, and interior local minima of `f` inside `{g < 0}`
///    are polished by golden-section search.
pub fn compute_threshold(params: ModelParams, tol_gamma: f64) -> Result<ThresholdResult> {
    if !(1e-12..=1e-4).contains(&tol_gamma) {
        return Err(Error::InvalidParams(format!(
            "tolerance {tol_gamma:e} outside [1e-12, 1e-4]"
        )));
    }
    let mut ev = Evaluator { params, count: 0 };

    let (mut lo, mut hi) = (GRID_LO, GRID_HI);
    while ev.eval(lo)?.0 <= 1.0 {
        lo /= 4.0;
        if lo < 1e-12 {
            return Err(Error::Numerical("cannot bracket the relevant λ range from below".into()));
        }
    }
    while ev.eval(hi)?.0 <= 1.0 {
        hi *= 2.0;
        if hi > 700.0 {
            return Err(Error::Numerical("cannot bracket the relevant λ range from above".into()));
        }
    }

    let grid = geometric_grid(lo, hi, GRID_POINTS);
    let values = grid.iter().map(|&l| ev.eval(l)).collect::<Result<Vec<_>>>()?;

    let relevant: Vec<usize> = (0..grid.len()).filter(|&i| values[i].0 <= 1.0).collect();
    let (first, last) = match (relevant.first(), relevant.last()) {
        (Some(&a), Some(&b)) => (a.saturating_sub(1), (b + 1).min(grid.len() - 1)),
        _ => return Err(Error::NoSignChange { lo, hi }),
    };
    let bracket = (grid[first], grid[last]);

    // (c, λ) candidates for the infimum.
    let mut best: Option<(f64, f64)> = None;
    let mut consider = |c: f64, lambda: f64| {
        if best.is_none_or(|(b, _)| c < b) {
            best = Some((c, lambda));
        }
    };

    let mut roots = Vec::new();
    for i in first..last {
        let (ga, gb) = (values[i].1, values[i + 1].1);
        if ga.is_nan() || gb.is_nan() || (ga < 0.0) == (gb < 0.0) {
            continue;
        }
        let (mut a, mut b) = (grid[i], grid[i + 1]);
        let a_negative = ga < 0.0;
        while b - a > LAMBDA_TOL {
            let mid = 0.5 * (a + b);
            let (_, gm) = ev.eval(mid)?;
            if (gm < 0.0) == a_negative {
                a = mid;
            } else {
                b = mid;
            }
        }
        // Approach the root from its g < 0 side.
        let root = if a_negative { a } else { b };
        let (c_root, g_root) = ev.eval(root)?;
        consider(c_root, root);
        roots.push((root, c_root, g_root));
    }
    if roots.is_empty() {
        return Err(Error::NoSignChange { lo: bracket.0, hi: bracket.1 });
    }

    let mut polished = 0;
    for i in first..=last {
        let (c, g) = values[i];
        if g.is_nan() || g >= 0.0 {
            continue;
        }
        consider(c, grid[i]);
        let interior = i > first
            && i < last
            && values[i - 1].1 < 0.0
            && values[i + 1].1 < 0.0
            && c <= values[i - 1].0
            && c <= values[i + 1].0;
        if interior {
            let (lam, c_min) = golden_min(&mut ev, grid[i - 1], grid[i + 1], tol_gamma)?;
            if ev.eval(lam)?.1 < 0.0 {
                consider(c_min, lam);
            }
            polished += 1;
        }
    }

    let (gamma, lambda_star) = best.expect("at least one root was found");
    let residual_g = roots
        .iter()
        .find(|r| r.0 == lambda_star)
        .map(|r| r.2)
        .unwrap_or(ev.eval(lambda_star)?.1);
    let diagnostics = format!(
        "grid {GRID_POINTS} points on [{lo:.3e}, {hi:.3e}]; {} sign change(s) of g at λ ≈ {}; \
         {polished} interior minimum(s) of f polished",
        roots.len(),
        roots.iter().map(|r| format!("{:.9}", r.0)).collect::<Vec<_>>().join(", ")
    );
    Ok(ThresholdResult {
        params,
        gamma,
        lambda_star,
        bracket,
        residual_g,
        evaluations: ev.count,
        diagnostics,
    })
}

/// All λ on the search grid where `c_λ = load`, each refined by bisection.
/// `c_λ` need not be monotone, so there can be several.
pub fn lambdas_for_load(params: ModelParams, load: f64) -> Result<Vec<f64>> {
    if !(load > 0.0 && load.is_finite()) {
        return Err(Error::InvalidParams(format!("load {load} must be positive")));
    }
    let mut ev = Evaluator { params, count: 0 };
    let grid = geometric_grid(GRID_LO, GRID_HI, GRID_POINTS);
    let diff = grid.iter().map(|&l| Ok(ev.eval(l)?.0 - load)).collect::<Result<Vec<_>>>()?;
    let mut out = Vec::new();
    for i in 0..grid.len() - 1 {
        let (da, db) = (diff[i], diff[i + 1]);
        if !da.is_finite() || !db.is_finite() || (da < 0.0) == (db < 0.0) {
            continue;
        }
        let (mut a, mut b) = (grid[i], grid[i + 1]);
        while b - a > LAMBDA_TOL {
            let mid = 0.5 * (a + b);
            if (ev.eval(mid)?.0 - load < 0.0) == (da < 0.0) {
                a = mid;
            } else {
                b = mid;
            }
        }
        out.push(0.5 * (a + b));
    }
    Ok(out)
}

/// Golden-section minimization of `f` on `[a, b]`; returns `(λ, f(λ))`.
fn golden_min(ev: &mut Evaluator, mut a: f64, mut b: f64, tol: f64) -> Result<(f64, f64)> {
    let mut x1 = b - GOLDEN * (b - a);
    let mut x2 = a + GOLDEN * (b - a);
    let mut f1 = ev.eval(x1)?.0;
    let mut f2 = ev.eval(x2)?.0;
    for _ in 0..200 {
        if (b - a) < LAMBDA_TOL || (f1 - f2).abs() < tol * 1e-3 && (b - a) < 1e-8 {
            break;
        }
        if f1 < f2 {
            b = x2;
            x2 = x1;
            f2 = f1;
            x1 = b - GOLDEN * (b - a);
            f1 = ev.eval(x1)?.0;
        } else {
            a = x1;
            x1 = x2;
            f1 = f2;
            x2 = a + GOLDEN * (b - a);
            f2 = ev.eval(x2)?.0;
        }
    }
    Ok(if f1 < f2 { (x1, f1) } else { (x2, f2) })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn load_preimages() {
        let params = ModelParams::new(2, 2).unwrap();
        let roots = lambdas_for_load(params, 0.915).unwrap();
        assert!(roots.len() >= 2, "{roots:?}");
        for &l in &roots {
            assert!((f_and_g(l, params).unwrap().0 - 0.915).abs() < 1e-9);
        }
        assert!(roots.iter().any(|&l| l > 1.5 && l < 1.74));
        assert!(lambdas_for_load(params, 0.5).unwrap().is_empty());
    }

    #[test]
    fn rejects_tolerance_out_of_range() {
        let p = ModelParams::new(2, 2).unwrap();
        assert!(compute_threshold(p, 1e-3).is_err());
        assert!(compute_threshold(p, 1e-13).is_err());
    }

    #[test]
    fn window_two_pair() {
        let p = ModelParams::new(2, 2).unwrap();
        let r = compute_threshold(p, 1e-8).unwrap();
        assert!((r.gamma - 0.964994923).abs() < 1e-7, "{r:?}");
        assert!(r.lambda_star > 1.70 && r.lambda_star < 1.80);
        assert!(r.residual_g.abs() < 1e-9);
        assert!(r.bracket.0 <= r.lambda_star && r.lambda_star <= r.bracket.1);
        assert!(r.gamma > 0.0 && r.gamma < 1.0);
    }

    #[test]
    fn golden_search_finds_parabola_minimum() {
        // f = c_λ for (2,2) has its minimum near λ ≈ 1.1 (f(1) ≈ 0.874 > f(1.2) ≈ 0.854).
        let mut ev = Evaluator { params: ModelParams::new(2, 2).unwrap(), count: 0 };
        let (lam, c) = golden_min(&mut ev, 0.8, 1.6, 1e-10).unwrap();
        let (cl, _) = f_and_g(lam - 1e-4, ev.params).unwrap();
        let (cr, _) = f_and_g(lam + 1e-4, ev.params).unwrap();
        assert!(c <= cl && c <= cr);
    }
}
