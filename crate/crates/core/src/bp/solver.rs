use serde::{Deserialize, Serialize};

use super::law::MessageLaw;
use super::poisson::{pmf_at, PoissonTable};
use crate::error::{Error, Result};
use crate::params::ModelParams;

/// The non-trivial fixed point of the message system with parameter λ,
/// together with the load `c_λ` at which it is a solution.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct BPSolution {
    /// Rate of the Poisson count of ordinary edges sending 1 to a vertex.
    pub lambda: f64,
    /// Law of `I_wd` (vertex → helper), support `{0, …, ℓ-1}`.
    pub law_wd: MessageLaw,
    /// Law of `I_dw` (helper → vertex), the reversal of `law_wd`.
    pub law_dw: MessageLaw,
    /// `Pr[I_wo = 1]` (vertex → ordinary edge).
    pub p_wo: f64,
    /// `Pr[I_wo = 0]`, kept separately because `1 - p_wo` cancels for small λ.
    pub p_wo_zero: f64,
    /// `Pr[I_ow = 1]` (ordinary edge → vertex).
    pub q: f64,
    pub c_lambda: f64,
}

impl BPSolution {
    /// The trivial solution: helpers send 0, vertices send `ℓ-1` to helpers
    /// and 1 to ordinary edges, ordinary edges send 0. It solves the system
    /// for every load `c`.
    pub fn trivial(params: ModelParams, c: f64) -> Self {
        let ell = params.ell() as usize;
        BPSolution {
            lambda: 0.0,
            law_wd: MessageLaw::point(ell as u32 - 1, ell),
            law_dw: MessageLaw::point(0, ell),
            p_wo: 1.0,
            p_wo_zero: 0.0,
            q: 0.0,
            c_lambda: c,
        }
    }

    pub fn is_trivial(&self) -> bool {
        self.lambda == 0.0
    }

    /// Checks every structural invariant; `tol` is the relative tolerance on
    /// the scalar identities.
    pub fn validate(&self, params: ModelParams, tol: f64) -> Result<()> {
        let ell = params.ell() as usize;
        let k = params.k() as i32;
        if self.law_wd.len() != ell || self.law_dw.len() != ell {
            return Err(Error::Numerical("message laws have the wrong support".into()));
        }
        self.law_wd.validate(1e-12)?;
        self.law_dw.validate(1e-12)?;
        if self.law_dw != self.law_wd.reversed() {
            return Err(Error::Numerical("law_dw is not the reversal of law_wd".into()));
        }
        let close = |a: f64, b: f64| (a - b).abs() <= tol * a.abs().max(b.abs()).max(1e-300);
        if !close(self.p_wo + self.p_wo_zero, 1.0) {
            return Err(Error::Numerical("Pr[I_wo = 0] + Pr[I_wo = 1] != 1".into()));
        }
        if !close(self.q, self.p_wo_zero.powi(k - 1)) && !(self.q == 0.0 && self.p_wo_zero == 0.0) {
            return Err(Error::Numerical(format!(
                "q = {} but (1 - p_wo)^(k-1) = {}",
                self.q,
                self.p_wo_zero.powi(k - 1)
            )));
        }
        if !self.is_trivial() {
            if !close(self.lambda, params.k() as f64 * self.c_lambda * self.q) {
                return Err(Error::Numerical("λ != k c_λ q".into()));
            }
            let r = fixed_point_residual(&self.law_wd, self.lambda);
            if r > 1e-12 {
                return Err(Error::Numerical(format!("fixed-point residual {r:e}")));
            }
        }
        Ok(())
    }
}

fn check_lambda(lambda: f64) -> Result<()> {
    if !(lambda > 0.0 && lambda.is_finite()) {
        return Err(Error::InvalidLambda(lambda));
    }
    if lambda > 700.0 {
        return Err(Error::Numerical(format!("λ = {lambda} exceeds the supported range (700)")));
    }
    Ok(())
}

/// Solves `I_wd =d [I_wd + 1 - Y]_0^{ℓ-1}` with `Y ~ Po(λ)` for the law
/// `(p_0, …, p_{ℓ-1})` of `I_wd`.
///
/// The rows of the transition system are used from the bottom up with
/// `p_{ℓ-1} = 1`, then the vector is normalized. Each row is applied in its
/// cumulative form (probability flow across the cut between `{0..i-1}` and
/// `{i..ℓ-1}` balances):
///
/// `p_{i-1} · Pr[Y = 0] = Σ_{j ≥ i} p_j · Pr[Y ≥ j + 2 - i]`,
///
/// which only adds nonnegative terms and so stays accurate for tiny and
/// large λ alike.
pub fn solve_pwd(lambda: f64, ell: u32) -> Result<MessageLaw> {
    check_lambda(lambda)?;
    if ell < 2 {
        return Err(Error::InvalidParams(format!("ℓ must be at least 2, got {ell}")));
    }
    let ell = ell as usize;
    let table = PoissonTable::new(lambda, ell + 1);
    let p0 = table.pmf(0);
    // ratio[m] = Pr[Y ≥ m] / Pr[Y = 0]
    let ratio: Vec<f64> = (0..=ell).map(|m| table.tail(m) / p0).collect();

    let mut p = vec![0.0; ell];
    p[ell - 1] = 1.0;
    for i in (1..ell).rev() {
        let v: f64 = (i..ell).map(|j| p[j] * ratio[j + 2 - i]).sum();
        if !v.is_finite() {
            return Err(Error::Numerical(format!("back-substitution overflow at λ = {lambda}")));
        }
        p[i - 1] = v;
        if v > 1e200 {
            p.iter_mut().for_each(|x| *x /= v);
        }
    }
    let total: f64 = p.iter().sum();
    p.iter_mut().for_each(|x| *x /= total);
    Ok(MessageLaw::new(0, p))
}

/// Largest componentwise deviation between `law` and one application of the
/// transition `i ↦ [i + 1 - Y]_0^{ℓ-1}`.
pub fn fixed_point_residual(law: &MessageLaw, lambda: f64) -> f64 {
    let ell = law.len();
    let table = PoissonTable::new(lambda, ell + 2);
    let mut image = vec![0.0; ell];
    for (j, &pj) in law.probs.iter().enumerate() {
        // From j: target i = j + 1 - Y, clamped.
        for (i, slot) in image.iter_mut().enumerate() {
            let pr = if i == ell - 1 {
                // j + 1 - Y ≥ ℓ - 1  ⇔  Y ≤ j + 2 - ℓ
                if j + 2 >= ell {
                    1.0 - table.tail(j + 3 - ell)
                } else {
                    0.0
                }
            } else if i == 0 {
                table.tail(j + 1)
            } else if j + 1 >= i {
                table.pmf(j + 1 - i)
            } else {
                0.0
            };
            *slot += pj * pr;
        }
    }
    law.probs
        .iter()
        .zip(&image)
        .map(|(a, b)| (a - b).abs())
        .fold(0.0, f64::max)
}

/// Builds the full non-trivial solution for parameter λ: `I_wd` from
/// [`solve_pwd`], `I_dw` by reversal, `Pr[I_wo = 1] = Pr[I_dw + I_dw' + Y ≤ ℓ-1]`,
/// `q = Pr[I_wo = 0]^{k-1}` and `c_λ = λ / (k q)`.
pub fn complete_solution(lambda: f64, params: ModelParams) -> Result<BPSolution> {
    let law_wd = solve_pwd(lambda, params.ell())?;
    let law_dw = law_wd.reversed();
    let ell = params.ell() as usize;
    let table = PoissonTable::new(lambda, 2 * ell);

    let (mut p_wo, mut p_wo_zero) = (0.0, 0.0);
    for (d1, &a) in law_dw.probs.iter().enumerate() {
        for (d2, &b) in law_dw.probs.iter().enumerate() {
            let w = a * b;
            let d = d1 + d2;
            if d >= ell {
                p_wo_zero += w;
            } else {
                // I_wo = 0 iff Y ≥ ℓ - d
                let zero = table.tail(ell - d);
                p_wo_zero += w * zero;
                p_wo += w * (1.0 - zero);
            }
        }
    }
    let q = p_wo_zero.powi(params.k() as i32 - 1);
    if !q.is_normal() {
        return Err(Error::Underflow { lambda });
    }
    let c_lambda = lambda / (params.k() as f64 * q);
    Ok(BPSolution { lambda, law_wd, law_dw, p_wo, p_wo_zero, q, c_lambda })
}

/// `F(sol, c) - (ℓ - 1) - c`, evaluated without forming `F` itself so that a
/// huge `c` does not cancel.
pub(crate) fn gap_functional(sol: &BPSolution, params: ModelParams) -> f64 {
    let ell = params.ell() as usize;
    let k = params.k() as i32;
    let c = sol.c_lambda;
    let wd = &sol.law_wd.probs;
    let dw = &sol.law_dw.probs;

    // E[[I_wd + I_wd']_0^{ℓ-1}]
    let mut helper_term = 0.0;
    for (a, pa) in wd.iter().enumerate() {
        for (b, pb) in wd.iter().enumerate() {
            helper_term += pa * pb * (a + b).min(ell - 1) as f64;
        }
    }

    // c·E[[Σ_k I_wo]_0^1] - c = -c·Pr[I_wo = 0]^k
    let ordinary_deficit = c * sol.p_wo_zero.powi(k);

    // Vertex term. The X ~ Po(kc) ordinary neighbours split into Y ~ Po(λ)
    // that send 1 and an independent Po(kc(1-q)) count that send 0.
    let y_table = PoissonTable::new(sol.lambda, ell + 1);
    let silent_rate = params.k() as f64 * c * (1.0 - sol.q);
    let ell_i = ell as i64;
    let mut vertex_term = 0.0;
    for y in 0..=ell {
        let py = y_table.pmf(y);
        if py == 0.0 {
            continue;
        }
        let yi = y as i64;
        let mut inner = 0.0;
        for (d1, &a) in dw.iter().enumerate() {
            for (d2, &b) in dw.iter().enumerate() {
                let w = a * b;
                if w == 0.0 {
                    continue;
                }
                let (d1, d2) = (d1 as i64, d2 as i64);
                let slack = ell_i - d1 - d2 - yi;
                let base = ell_i
                    - (ell_i - d1 - yi).max(0)
                    - (ell_i - d2 - yi).max(0)
                    - yi * (slack + 1).max(0);
                let e = if slack > 0 {
                    // [base - X0·slack]_0 vanishes once X0 ≥ base / slack.
                    let mut acc = 0.0;
                    let mut x = 0i64;
                    while base - x * slack > 0 {
                        acc += pmf_at(silent_rate, x as u64) * (base - x * slack) as f64;
                        x += 1;
                    }
                    acc
                } else {
                    base.max(0) as f64
                };
                inner += w * e;
            }
        }
        vertex_term += py * inner;
    }
    // For Y ≥ ℓ + 1 every inner clamp is 0 and the term equals ℓ.
    vertex_term += ell as f64 * y_table.tail(ell + 1);

    helper_term + vertex_term - (ell as f64 - 1.0) - ordinary_deficit
}

/// The allocation functional `F(I_dw, I_wd, I_ow, I_wo, c)` at `sol`, with
/// `c = sol.c_lambda`. Exact enumeration; the only truncation is in the
/// Poisson tail bound, far below 1e-10.
pub fn evaluate_f(sol: &BPSolution, params: ModelParams) -> f64 {
    params.ell() as f64 - 1.0 + sol.c_lambda + gap_functional(sol, params)
}

/// `g(λ) = F(ρ_λ, c_λ) - (ℓ - 1) - c_λ`.
pub fn g_value(lambda: f64, params: ModelParams) -> Result<f64> {
    let sol = complete_solution(lambda, params)?;
    Ok(gap_functional(&sol, params))
}
