//! Truncated weight vectors and application of `L_n^{(ν1,ν2)}`.

use crate::error::{Error, Result};
use crate::families::{FamilyKind, FamilySpec, StancuParams};
use crate::special::poisson_ln_pmf;

/// Stopping rule for the infinite weight sum.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct TruncationPolicy {
    pub eps_tail: f64,
    pub k_hard_cap: usize,
}

impl Default for TruncationPolicy {
    fn default() -> Self {
        Self { eps_tail: 1e-12, k_hard_cap: 10_000 }
    }
}

impl TruncationPolicy {
    pub fn new(eps_tail: f64, k_hard_cap: usize) -> Result<Self> {
        if !(eps_tail > 0.0 && eps_tail < 1e-3) {
            return Err(Error::InvalidParameter(format!("eps_tail must lie in (0, 1e-3), got {eps_tail}")));
        }
        if k_hard_cap < 1 {
            return Err(Error::InvalidParameter("k_hard_cap must be >= 1".into()));
        }
        Ok(Self { eps_tail, k_hard_cap })
    }

    pub fn mass_target(&self) -> f64 {
        1.0 - self.eps_tail
    }
}

/// Rounding noise tolerated below zero before a weight is rejected.
pub const NEGATIVE_WEIGHT_TOL: f64 = 1e-12;

/// Normalized weights `w_k` for `k < k_used`.
#[derive(Debug, Clone, PartialEq)]
pub struct WeightVector {
    pub w: Vec<f64>,
    pub n: u32,
    pub x: f64,
    pub mass: f64,
    pub k_used: usize,
    /// Most negative raw weight seen before clamping (0 when none).
    pub min_raw: f64,
}

/// Which evaluation route produces the weights.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum WeightPath {
    /// Closed form when the family has one, table otherwise.
    Auto,
    /// Explicit log-space formula; errors for families without one.
    ClosedForm,
    /// Scaled evaluation of the coefficient table.
    Table,
}

fn check_point(n: u32, x: f64) -> Result<()> {
    if n < 1 {
        return Err(Error::InvalidParameter("n must be >= 1".into()));
    }
    if !(x >= 0.0) || !x.is_finite() {
        return Err(Error::InvalidParameter(format!("x must be finite and >= 0, got {x}")));
    }
    Ok(())
}

/// Accumulates weights until the mass target is met.
fn accumulate(
    n: u32,
    x: f64,
    policy: &TruncationPolicy,
    cap: usize,
    mut weight: impl FnMut(usize) -> Result<f64>,
) -> Result<WeightVector> {
    let target = policy.mass_target();
    let mut w = Vec::new();
    let mut mass = 0.0;
    let mut min_raw = 0.0f64;
    for k in 0..cap {
        let mut v = weight(k)?;
        if v < 0.0 {
            min_raw = min_raw.min(v);
            if v < -NEGATIVE_WEIGHT_TOL {
                return Err(Error::NegativeWeight { k, value: v });
            }
            v = 0.0;
        }
        w.push(v);
        mass += v;
        if mass >= target {
            return Ok(WeightVector { k_used: w.len(), w, n, x, mass, min_raw });
        }
    }
    Err(Error::MassDeficit { mass, target, k_used: w.len() })
}

/// `w_k = π_k(nx) / (A1(h(1))·A2(nx·h(1)))`, truncated by cumulative mass.
pub fn weights(f: &FamilySpec, n: u32, x: f64, policy: &TruncationPolicy) -> Result<WeightVector> {
    weights_via(f, n, x, policy, WeightPath::Auto)
}

pub fn weights_via(f: &FamilySpec, n: u32, x: f64, policy: &TruncationPolicy, path: WeightPath) -> Result<WeightVector> {
    check_point(n, x)?;
    let use_closed = match path {
        WeightPath::Auto => f.has_closed_form(),
        WeightPath::ClosedForm => {
            if !f.has_closed_form() {
                return Err(Error::InvalidParameter(format!("family `{}` has no closed-form weights", f.name())));
            }
            true
        }
        WeightPath::Table => false,
    };
    if use_closed {
        return accumulate(n, x, policy, policy.k_hard_cap, |k| {
            let v = f.closed_form_weight(k, n, x).expect("closed form checked above");
            Ok(v)
        });
    }

    let y = n as f64 * x;
    let h1 = f.h1();
    let ln_norm = f.a1().ln_value(h1) + f.a2().ln_value(y * h1);
    let norm_sign = f.a1().sign(h1) * f.a2().sign(y * h1);
    if !ln_norm.is_finite() || norm_sign <= 0.0 {
        return Err(Error::Overflow(format!(
            "normalization A1(h(1))·A2(nx·h(1)) is not a finite positive number at n = {n}, x = {x}"
        )));
    }
    let cap = policy.k_hard_cap.min(f.k_max() + 1);
    accumulate(n, x, policy, cap, |k| {
        let v = f.table().ln_pi(k, y)?;
        Ok(if v.sign == 0.0 { 0.0 } else { v.sign * (v.ln_abs - ln_norm).exp() })
    })
}

/// `Σ_k w_k · func((k + ν1)/(n + ν2))` over precomputed weights.
pub fn apply_weights(wv: &WeightVector, func: impl Fn(f64) -> f64, s: StancuParams) -> Result<f64> {
    let mut acc = 0.0;
    for (k, &w) in wv.w.iter().enumerate() {
        let node = s.node(k, wv.n);
        let v = func(node);
        if !v.is_finite() {
            return Err(Error::NonFiniteSample { node, value: v });
        }
        if w != 0.0 {
            acc += w * v;
        }
    }
    Ok(acc)
}

/// `L_n^{(ν1,ν2)}(func; x)`.
pub fn apply(f: &FamilySpec, func: impl Fn(f64) -> f64, n: u32, x: f64, s: StancuParams, policy: &TruncationPolicy) -> Result<f64> {
    let wv = weights(f, n, x, policy)?;
    apply_weights(&wv, func, s)
}

/// Reference Szász operator `e^{-nx} Σ (nx)^k/k! · func(k/n)`.
///
/// Weights come from a two-sided recurrence anchored at the Poisson mode,
/// independent of the family machinery; truncation follows the default
/// policy.
pub fn szasz_apply(func: impl Fn(f64) -> f64, n: u32, x: f64) -> Result<f64> {
    check_point(n, x)?;
    let wv = szasz_reference_weights(n, x, &TruncationPolicy::default())?;
    apply_weights(&wv, func, StancuParams::ZERO)
}

pub fn szasz_reference_weights(n: u32, x: f64, policy: &TruncationPolicy) -> Result<WeightVector> {
    check_point(n, x)?;
    let y = n as f64 * x;
    let mode = y.floor() as usize;
    let cap = policy.k_hard_cap.max(mode + 1);
    let mut p = vec![0.0; cap];
    p[mode] = poisson_ln_pmf(mode as u64, y).exp();
    for k in (0..mode).rev() {
        p[k] = p[k + 1] * (k + 1) as f64 / y;
    }
    for k in mode + 1..cap {
        p[k] = p[k - 1] * y / k as f64;
    }
    accumulate(n, x, policy, cap, |k| Ok(p[k]))
}

/// Jakimovski–Leviatan operator: `apply` with `ν1 = ν2 = 0` on an Appell
/// family.
pub fn jakimovski_leviatan_apply(f: &FamilySpec, func: impl Fn(f64) -> f64, n: u32, x: f64) -> Result<f64> {
    if !matches!(f.kind(), FamilyKind::Appell | FamilyKind::Szasz) {
        return Err(Error::NotAppell(f.name().to_string()));
    }
    apply(f, func, n, x, StancuParams::ZERO, &TruncationPolicy::default())
}
