//! Closed-form power sums, raw and central moments of `L_n^{(ν1,ν2)}`, each
//! paired with a direct summation over the truncated weights.
//!
//! The closed forms are written term by term in the shape they are usually
//! displayed; the recombination `Δ2 = m2 − 2x·m1 + x²` is a test, not the
//! implementation.

use crate::error::{Error, Result};
use crate::families::{FamilySpec, StancuParams};
use crate::operator::{weights, TruncationPolicy, WeightVector};

/// Values of `A1`, `A1′`, `A1″` at `h(1)` and of `A2′/A2`, `A2″/A2` at
/// `nx·h(1)`; every moment formula only needs these.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct FamilyScalars {
    pub a1: f64,
    pub a1p: f64,
    pub a1pp: f64,
    pub a2p_ratio: f64,
    pub a2pp_ratio: f64,
    pub hpp1: f64,
}

impl FamilyScalars {
    pub fn at(f: &FamilySpec, n: u32, x: f64) -> Result<Self> {
        let h1 = f.h1();
        let y = n as f64 * x * h1;
        let s = Self {
            a1: f.a1_at(h1),
            a1p: f.a1p_at(h1),
            a1pp: f.a1pp_at(h1),
            a2p_ratio: f.a2().ratio(y, 1),
            a2pp_ratio: f.a2().ratio(y, 2),
            hpp1: f.hpp1(),
        };
        if [s.a1, s.a1p, s.a1pp, s.a2p_ratio, s.a2pp_ratio].iter().any(|v| !v.is_finite()) || s.a1 == 0.0 {
            return Err(Error::Overflow(format!("family scalars not finite at n = {n}, x = {x}: {s:?}")));
        }
        Ok(s)
    }
}

/// `Σ π_k(nx)`, `Σ k π_k(nx)`, `Σ k² π_k(nx)`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PowerSums {
    pub s0: f64,
    pub s1: f64,
    pub s2: f64,
    pub s0_sum: f64,
    pub s1_sum: f64,
    pub s2_sum: f64,
    /// Largest scaled gap between the two routes, see [`scaled_gap`].
    pub rel_gap: f64,
}

impl PowerSums {
    /// `S1/S0` from the closed forms.
    pub fn mean_index(&self) -> f64 {
        self.s1 / self.s0
    }

    pub fn mean_index_sum(&self) -> f64 {
        self.s1_sum / self.s0_sum
    }
}

/// `|a − b| / max(|a|, 0.01)`: relative above 0.01, absolute·100 below.
pub fn scaled_gap(closed: f64, summed: f64) -> f64 {
    (closed - summed).abs() / closed.abs().max(1e-2)
}

/// Closed-form power sums next to their summation counterparts.
pub fn power_sums(f: &FamilySpec, n: u32, x: f64, policy: &TruncationPolicy) -> Result<PowerSums> {
    let y = n as f64 * x;
    let h1 = f.h1();
    let (a1, a1p, a1pp) = (f.a1_at(h1), f.a1p_at(h1), f.a1pp_at(h1));
    let (a2, a2p, a2pp) = (f.a2_at(y * h1), f.a2p_at(y * h1), f.a2pp_at(y * h1));
    let hpp = f.hpp1();
    let nx = y;

    let s0 = a1 * a2;
    let s1 = a1p * a2 + nx * a1 * a2p;
    let s2 = ((hpp + 1.0) * a1p + a1pp) * a2 + (2.0 * a1p + (hpp + 1.0) * a1) * a2p * nx + a1 * a2pp * nx * nx;
    if ![s0, s1, s2].iter().all(|v| v.is_finite()) {
        return Err(Error::Overflow(format!("power sums overflow at nx = {nx}")));
    }

    let wv = weights(f, n, x, policy)?;
    let (mut t0, mut t1, mut t2) = (0.0, 0.0, 0.0);
    for (k, &w) in wv.w.iter().enumerate() {
        let kf = k as f64;
        t0 += w;
        t1 += w * kf;
        t2 += w * kf * kf;
    }
    let (s0_sum, s1_sum, s2_sum) = (t0 * s0, t1 * s0, t2 * s0);
    let rel_gap = [(s0, s0_sum), (s1, s1_sum), (s2, s2_sum)]
        .iter()
        .map(|&(a, b)| (a - b).abs() / a.abs().max(f64::MIN_POSITIVE))
        .fold(0.0, f64::max);
    Ok(PowerSums { s0, s1, s2, s0_sum, s1_sum, s2_sum, rel_gap })
}

/// `L_n(1; x)`, `L_n(s; x)`, `L_n(s²; x)`.
pub fn raw_moments(f: &FamilySpec, n: u32, x: f64, s: StancuParams) -> Result<(f64, f64, f64)> {
    Ok(raw_from_scalars(&FamilyScalars::at(f, n, x)?, n, x, s))
}

pub fn raw_from_scalars(c: &FamilyScalars, n: u32, x: f64, s: StancuParams) -> (f64, f64, f64) {
    let n = n as f64;
    let (nu1, nu2) = (s.nu1, s.nu2);
    let np = n + nu2;
    let m0 = 1.0;
    let m1 = c.a2p_ratio * n / np * x + (c.a1p / c.a1 + nu1) * (1.0 / np);
    let m2 = c.a2pp_ratio * n * n / (np * np) * x * x
        + ((1.0 + 2.0 * nu1 + c.hpp1) * c.a1 + 2.0 * c.a1p) * c.a2p_ratio * n / (c.a1 * np * np) * x
        + (nu1 * nu1 * c.a1 + (1.0 + 2.0 * nu1 + c.hpp1) * c.a1p + c.a1pp) / (c.a1 * np * np);
    (m0, m1, m2)
}

/// `Δ1 = L_n(s − x; x)`, `Δ2 = L_n((s − x)²; x)`.
pub fn central_moments(f: &FamilySpec, n: u32, x: f64, s: StancuParams) -> Result<(f64, f64)> {
    Ok(central_from_scalars(&FamilyScalars::at(f, n, x)?, n, x, s))
}

pub fn central_from_scalars(c: &FamilyScalars, n: u32, x: f64, s: StancuParams) -> (f64, f64) {
    let n = n as f64;
    let (nu1, nu2) = (s.nu1, s.nu2);
    let np = n + nu2;
    let a1_ratio = c.a1p / c.a1;
    let d1 = (c.a2p_ratio * n / np - 1.0) * x + (a1_ratio + nu1) * (1.0 / np);
    let d2 = (c.a2pp_ratio * n * n / (np * np) - 2.0 * c.a2p_ratio * n / np + 1.0) * x * x
        + ((1.0 + 2.0 * nu1 + c.hpp1) * c.a2p_ratio * n / (np * np) + 2.0 * c.a1p * c.a2p_ratio / (c.a1 * np * np) * n
            - (a1_ratio + nu1) * (2.0 / np))
            * x
        + nu1 * nu1 / (np * np)
        + ((1.0 + 2.0 * nu1 + c.hpp1) * c.a1p + c.a1pp) / (c.a1 * np * np);
    (d1, d2)
}

/// Tolerance below zero accepted for `Δ2` as rounding noise.
pub const VARIANCE_TOL: f64 = 1e-12;

/// `(δ_n, λ_n, μ_n) = (√Δ2, (Δ1 + Δ2)/2, (Δ2 + Δ1²)/8)`.
pub fn derived_quantities(d1: f64, d2: f64) -> Result<(f64, f64, f64)> {
    if d2 < -VARIANCE_TOL {
        return Err(Error::NegativeVariance(d2));
    }
    let d2 = d2.max(0.0);
    Ok((d2.sqrt(), 0.5 * (d1 + d2), (d2 + d1 * d1) / 8.0))
}

#[derive(Debug, Clone, PartialEq)]
pub struct MomentReport {
    pub n: u32,
    pub x: f64,
    pub s: StancuParams,
    pub m0: f64,
    pub m1: f64,
    pub m2: f64,
    pub d1: f64,
    pub d2: f64,
    pub delta_n: f64,
    pub lambda_n: f64,
    pub mu_n: f64,
    pub m0_sum: f64,
    pub m1_sum: f64,
    pub m2_sum: f64,
    pub d1_sum: f64,
    pub d2_sum: f64,
    /// Largest [`scaled_gap`] over `m0, m1, m2, Δ1, Δ2`.
    pub max_rel_gap: f64,
}

/// Closed forms at `(n, x, s)` checked against sums over `wv`.
pub fn moment_report_with(f: &FamilySpec, wv: &WeightVector, s: StancuParams) -> Result<MomentReport> {
    let (n, x) = (wv.n, wv.x);
    let c = FamilyScalars::at(f, n, x)?;
    let (m0, m1, m2) = raw_from_scalars(&c, n, x, s);
    let (d1, d2) = central_from_scalars(&c, n, x, s);
    let (delta_n, lambda_n, mu_n) = derived_quantities(d1, d2)?;

    let mut sums = [0.0; 5];
    for (k, &w) in wv.w.iter().enumerate() {
        let t = s.node(k, n);
        let u = t - x;
        sums[0] += w;
        sums[1] += w * t;
        sums[2] += w * t * t;
        sums[3] += w * u;
        sums[4] += w * u * u;
    }
    let max_rel_gap = [m0, m1, m2, d1, d2]
        .iter()
        .zip(&sums)
        .map(|(&a, &b)| scaled_gap(a, b))
        .fold(0.0, f64::max);
    Ok(MomentReport {
        n,
        x,
        s,
        m0,
        m1,
        m2,
        d1,
        d2,
        delta_n,
        lambda_n,
        mu_n,
        m0_sum: sums[0],
        m1_sum: sums[1],
        m2_sum: sums[2],
        d1_sum: sums[3],
        d2_sum: sums[4],
        max_rel_gap,
    })
}

pub fn moment_report(f: &FamilySpec, n: u32, x: f64, s: StancuParams, policy: &TruncationPolicy) -> Result<MomentReport> {
    let wv = weights(f, n, x, policy)?;
    moment_report_with(f, &wv, s)
}
