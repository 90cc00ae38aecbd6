//! Error bounds in terms of `δ_n`, `λ_n`, `μ_n` and their comparison with
//! the empirical error `|L_n f(x) − f(x)|`.
//!
//! - modulus bound: `2ω(f; δ_n(x))`
//! - Hölder bound: `M δ_n(x)^α`
//! - K-functional bound: `2K(f; λ_n(x))`, with `K` bounded above by Steklov
//!   candidates and `λ_n` clamped at 0
//! - second-modulus bound: `C ω₂(f; √μ_n(x)) + ω(f; |Δ1(x)|)`
//!
//! The last two rest on an upper estimate of an infimum and on a
//! configured constant `C`, so they are reported but not relied on.

use crate::error::{Error, Result};
use crate::families::{FamilySpec, StancuParams};
use crate::functions::TestFunction;
use crate::moments::{central_moments, derived_quantities, moment_report_with};
use crate::operator::{apply_weights, weights, TruncationPolicy};
use crate::smoothness::{KCandidates, WindowGrid, DEFAULT_STEP, DEFAULT_T_MAX};

/// Slack allowed when comparing an error with a bound.
pub const DOMINATION_TOL: f64 = 1e-10;

#[derive(Debug, Clone, PartialEq)]
pub struct BoundConfig {
    pub t_max: f64,
    pub step: f64,
    pub c_second: f64,
    pub h_candidates: Vec<f64>,
    pub policy: TruncationPolicy,
}

impl Default for BoundConfig {
    fn default() -> Self {
        Self {
            t_max: DEFAULT_T_MAX,
            step: DEFAULT_STEP,
            c_second: 4.0,
            h_candidates: vec![1.0 / 64.0, 1.0 / 32.0, 1.0 / 16.0, 1.0 / 8.0, 1.0 / 4.0, 1.0 / 2.0],
            policy: TruncationPolicy::default(),
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct BoundReport {
    pub family: String,
    pub f_name: String,
    pub n: u32,
    pub x: f64,
    pub s: StancuParams,
    pub err_emp: f64,
    pub b_modulus: f64,
    pub b_holder: f64,
    pub b_k_functional: f64,
    pub b_second_modulus: f64,
    pub dom_modulus: bool,
    pub dom_holder: bool,
    pub dom_k_functional: bool,
    pub dom_second_modulus: bool,
    pub c_second: f64,
    /// `λ_n < 0` was replaced by 0 for the K-functional bound.
    pub lambda_clamped: bool,
    /// Set when the cell could not be evaluated.
    pub status: Option<String>,
}

fn delta_n(family: &FamilySpec, n: u32, x: f64, s: StancuParams) -> Result<(f64, f64, f64, f64)> {
    let (d1, d2) = central_moments(family, n, x, s)?;
    let (delta, lambda, mu) = derived_quantities(d1, d2)?;
    Ok((d1, delta, lambda, mu))
}

/// `2ω(f; δ_n(x))` with the closed-form modulus on `[0, t_max]`.
pub fn bound_modulus(f: &TestFunction, family: &FamilySpec, n: u32, x: f64, s: StancuParams, t_max: f64) -> Result<f64> {
    let (_, delta, _, _) = delta_n(family, n, x, s)?;
    Ok(2.0 * f.omega(delta, t_max))
}

/// `M δ_n(x)^α`.
pub fn bound_holder(alpha: f64, m: f64, family: &FamilySpec, n: u32, x: f64, s: StancuParams) -> Result<f64> {
    if !(alpha > 0.0 && alpha <= 1.0) {
        return Err(Error::InvalidParameter(format!("alpha must lie in (0, 1], got {alpha}")));
    }
    let (_, delta, _, _) = delta_n(family, n, x, s)?;
    Ok(m * delta.powf(alpha))
}

/// `2K(f; max(λ_n, 0))` from precomputed K-functional candidates; the flag
/// reports whether `λ_n` was clamped.
pub fn bound_k_functional(k: &KCandidates, family: &FamilySpec, n: u32, x: f64, s: StancuParams) -> Result<(f64, bool)> {
    let (_, _, lambda, _) = delta_n(family, n, x, s)?;
    Ok((2.0 * k.value(lambda.max(0.0)), lambda < 0.0))
}

/// `C ω₂(f; √μ_n(x)) + ω(f; |Δ1(x)|)`.
pub fn bound_second_modulus(f: &TestFunction, family: &FamilySpec, n: u32, x: f64, s: StancuParams, c: f64, t_max: f64) -> Result<f64> {
    if !(c > 0.0) {
        return Err(Error::InvalidParameter(format!("C must be > 0, got {c}")));
    }
    let (d1, _, _, mu) = delta_n(family, n, x, s)?;
    Ok(c * f.omega2(mu.sqrt(), t_max) + f.omega(d1.abs(), t_max))
}

/// Runs every `(family, function, ν, n, x)` cell. Per-cell failures are
/// recorded in `status`; the sweep itself never aborts.
pub fn verify(
    families: &[FamilySpec],
    functions: &[&TestFunction],
    n_list: &[u32],
    x_grid: &[f64],
    s_list: &[StancuParams],
    cfg: &BoundConfig,
) -> Result<Vec<BoundReport>> {
    if !(cfg.c_second > 0.0) {
        return Err(Error::InvalidParameter(format!("C must be > 0, got {}", cfg.c_second)));
    }
    let mut kcands = Vec::with_capacity(functions.len());
    for f in functions {
        let grid = WindowGrid::new(f.eval, 0.0, cfg.t_max, cfg.step)?;
        kcands.push(KCandidates::build(&grid, &cfg.h_candidates)?);
    }

    let mut out = Vec::new();
    for family in families {
        for (fi, f) in functions.iter().enumerate() {
            for &s in s_list {
                for &n in n_list {
                    for &x in x_grid {
                        let cell = evaluate_cell(family, f, &kcands[fi], n, x, s, cfg);
                        out.push(cell.unwrap_or_else(|e| BoundReport {
                            family: family.name().to_string(),
                            f_name: f.name.to_string(),
                            n,
                            x,
                            s,
                            err_emp: f64::NAN,
                            b_modulus: f64::NAN,
                            b_holder: f64::NAN,
                            b_k_functional: f64::NAN,
                            b_second_modulus: f64::NAN,
                            dom_modulus: false,
                            dom_holder: false,
                            dom_k_functional: false,
                            dom_second_modulus: false,
                            c_second: cfg.c_second,
                            lambda_clamped: false,
                            status: Some(e.to_string()),
                        }));
                    }
                }
            }
        }
    }
    Ok(out)
}

fn evaluate_cell(
    family: &FamilySpec,
    f: &TestFunction,
    k: &KCandidates,
    n: u32,
    x: f64,
    s: StancuParams,
    cfg: &BoundConfig,
) -> Result<BoundReport> {
    let wv = weights(family, n, x, &cfg.policy)?;
    let value = apply_weights(&wv, f.eval, s)?;
    let err_emp = (value - f.eval(x)).abs();
    let m = moment_report_with(family, &wv, s)?;
    let t_max = cfg.t_max;
    let lip = f.lipschitz(t_max);

    let b22 = 2.0 * f.omega(m.delta_n, t_max);
    let b23 = lip.m * m.delta_n.powf(lip.alpha);
    let b24 = 2.0 * k.value(m.lambda_n.max(0.0));
    let b25 = cfg.c_second * f.omega2(m.mu_n.sqrt(), t_max) + f.omega(m.d1.abs(), t_max);
    let dom = |b: f64| err_emp <= b + DOMINATION_TOL;
    Ok(BoundReport {
        family: family.name().to_string(),
        f_name: f.name.to_string(),
        n,
        x,
        s,
        err_emp,
        b_modulus: b22,
        b_holder: b23,
        b_k_functional: b24,
        b_second_modulus: b25,
        dom_modulus: dom(b22),
        dom_holder: dom(b23),
        dom_k_functional: dom(b24),
        dom_second_modulus: dom(b25),
        c_second: cfg.c_second,
        lambda_clamped: m.lambda_n < 0.0,
        status: None,
    })
}
