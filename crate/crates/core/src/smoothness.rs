//! Grid estimates of moduli of smoothness, Lipschitz constants and an upper
//! bound for the Peetre K-functional.
//!
//! Grid sups are lower estimates of the true sups. The K-functional value is
//! an upper bound: every candidate `ψ` gives `‖f − ψ‖ + λ‖ψ‖_{C²}` above the
//! infimum.

use crate::error::{Error, Result};
use crate::functions::TestFunction;

pub const DEFAULT_T_MAX: f64 = 4.0;
pub const DEFAULT_STEP: f64 = 1.0 / 1024.0;

/// Samples of `f` on `t_min + i·step`, `i = 0..=N`.
#[derive(Debug, Clone, PartialEq)]
pub struct WindowGrid {
    pub t_min: f64,
    pub t_max: f64,
    pub step: f64,
    pub samples: Vec<f64>,
}

impl WindowGrid {
    pub fn new(f: impl Fn(f64) -> f64, t_min: f64, t_max: f64, step: f64) -> Result<Self> {
        if !(step > 0.0) || !(t_max > t_min) {
            return Err(Error::InvalidParameter(format!("window [{t_min}, {t_max}] with step {step}")));
        }
        let count = ((t_max - t_min) / step).round() as usize;
        let samples: Vec<f64> = (0..=count).map(|i| f(t_min + i as f64 * step)).collect();
        if let Some(i) = samples.iter().position(|v| !v.is_finite()) {
            let node = t_min + i as f64 * step;
            return Err(Error::NonFiniteSample { node, value: samples[i] });
        }
        Ok(Self { t_min, t_max, step, samples })
    }

    /// `[0, 4]` with step `2^-10`.
    pub fn with_defaults(f: impl Fn(f64) -> f64) -> Result<Self> {
        Self::new(f, 0.0, DEFAULT_T_MAX, DEFAULT_STEP)
    }

    pub fn len(&self) -> usize {
        self.samples.len()
    }

    pub fn is_empty(&self) -> bool {
        self.samples.is_empty()
    }

    fn span(&self, delta: f64) -> usize {
        ((delta / self.step) * (1.0 + 1e-12)).floor() as usize
    }

    fn check_resolution(&self, delta: f64) -> Result<()> {
        if self.step > delta / 16.0 {
            return Err(Error::GridTooCoarse { step: self.step, delta });
        }
        Ok(())
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum SmoothnessKind {
    Omega1,
    Omega2,
    LipschitzM,
    KFunctional,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Direction {
    LowerEstimate,
    UpperBound,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SmoothnessEstimate {
    pub value: f64,
    pub kind: SmoothnessKind,
    pub delta_or_lambda: f64,
    pub direction: Direction,
}

impl SmoothnessEstimate {
    fn lower(value: f64, kind: SmoothnessKind, arg: f64) -> Self {
        Self { value, kind, delta_or_lambda: arg, direction: Direction::LowerEstimate }
    }

    fn upper(value: f64, kind: SmoothnessKind, arg: f64) -> Self {
        Self { value, kind, delta_or_lambda: arg, direction: Direction::UpperBound }
    }
}

/// `sup |f(t1) − f(t2)|` over grid pairs with `|t1 − t2| ≤ δ`.
pub fn modulus(grid: &WindowGrid, delta: f64) -> Result<SmoothnessEstimate> {
    grid.check_resolution(delta)?;
    let span = grid.span(delta);
    let s = &grid.samples;
    let mut best = 0.0f64;
    for i in 0..s.len() {
        let hi = (i + span).min(s.len() - 1);
        for &v in &s[i + 1..=hi] {
            best = best.max((s[i] - v).abs());
        }
    }
    Ok(SmoothnessEstimate::lower(best, SmoothnessKind::Omega1, delta))
}

/// Closed-form modulus of a registered function on the grid's window.
pub fn modulus_registered(f: &TestFunction, delta: f64, grid: &WindowGrid) -> SmoothnessEstimate {
    SmoothnessEstimate::upper(f.omega(delta, grid.t_max - grid.t_min), SmoothnessKind::Omega1, delta)
}

/// `sup |f(t + 2h) − 2f(t + h) + f(t)|` over grid `t` and `0 < h ≤ δ`.
pub fn second_modulus(grid: &WindowGrid, delta: f64) -> Result<SmoothnessEstimate> {
    grid.check_resolution(delta)?;
    let span = grid.span(delta);
    let s = &grid.samples;
    if 2 * span >= s.len() {
        return Err(Error::WindowTooSmall { t_min: grid.t_min, t_max: grid.t_max, width: 2.0 * delta });
    }
    let mut best = 0.0f64;
    for j in 1..=span {
        for i in 0..s.len() - 2 * j {
            best = best.max((s[i + 2 * j] - 2.0 * s[i + j] + s[i]).abs());
        }
    }
    Ok(SmoothnessEstimate::lower(best, SmoothnessKind::Omega2, delta))
}

pub fn second_modulus_registered(f: &TestFunction, delta: f64, grid: &WindowGrid) -> SmoothnessEstimate {
    SmoothnessEstimate::upper(f.omega2(delta, grid.t_max - grid.t_min), SmoothnessKind::Omega2, delta)
}

/// `max |f(t1) − f(t2)| / |t1 − t2|^α` over all grid pairs.
pub fn lipschitz_constant(grid: &WindowGrid, alpha: f64) -> Result<SmoothnessEstimate> {
    if !(alpha > 0.0 && alpha <= 1.0) {
        return Err(Error::InvalidParameter(format!("alpha must lie in (0, 1], got {alpha}")));
    }
    let s = &grid.samples;
    // |t_i − t_j|^α depends only on j − i
    let denom: Vec<f64> = (0..s.len()).map(|d| (d as f64 * grid.step).powf(alpha)).collect();
    let mut best = 0.0f64;
    for i in 0..s.len() {
        for j in i + 1..s.len() {
            best = best.max((s[i] - s[j]).abs() / denom[j - i]);
        }
    }
    Ok(SmoothnessEstimate::lower(best, SmoothnessKind::LipschitzM, alpha))
}

/// Per-candidate pieces of the K-functional bound: the approximation error
/// `sup|f − ψ|` and the `C²` norm `sup|ψ| + sup|ψ′| + sup|ψ″|`.
#[derive(Debug, Clone, PartialEq)]
pub struct KCandidates {
    /// `(h, residual, c2_norm)`; `h = 0` is the candidate `ψ = f`.
    pub entries: Vec<(f64, f64, f64)>,
}

impl KCandidates {
    /// Evaluates every candidate once; `value` is then cheap for any `λ`.
    pub fn build(grid: &WindowGrid, h_candidates: &[f64]) -> Result<Self> {
        if h_candidates.is_empty() {
            return Err(Error::InvalidParameter("h_candidates must be nonempty".into()));
        }
        let mut entries = vec![(0.0, 0.0, c2_norm(&grid.samples, grid.step))];
        for &h in h_candidates {
            if !(h > 0.0) {
                return Err(Error::InvalidParameter(format!("smoothing width must be > 0, got {h}")));
            }
            let psi = steklov2(grid, h)?;
            let resid = psi.iter().zip(&grid.samples).map(|(p, f)| (p - f).abs()).fold(0.0, f64::max);
            entries.push((h, resid, c2_norm(&psi, grid.step)));
        }
        Ok(Self { entries })
    }

    /// `min_ψ sup|f − ψ| + λ‖ψ‖_{C²}` over the candidates.
    pub fn value(&self, lambda: f64) -> f64 {
        self.entries.iter().map(|&(_, r, c)| r + lambda * c).fold(f64::INFINITY, f64::min)
    }

    /// Value of the `ψ = f` candidate alone.
    pub fn identity_value(&self, lambda: f64) -> f64 {
        let (_, r, c) = self.entries[0];
        r + lambda * c
    }
}

/// Upper bound for `K(f; λ)` using second-order Steklov means of widths
/// `h_candidates` plus `ψ = f`, with derivatives by finite differences.
pub fn k_functional_upper(grid: &WindowGrid, lambda: f64, h_candidates: &[f64]) -> Result<SmoothnessEstimate> {
    if !(lambda >= 0.0) {
        return Err(Error::InvalidParameter(format!("lambda must be >= 0, got {lambda}")));
    }
    let c = KCandidates::build(grid, h_candidates)?;
    Ok(SmoothnessEstimate::upper(c.value(lambda), SmoothnessKind::KFunctional, lambda))
}

/// `ψ_h(t) = h⁻² ∫₀^h ∫₀^h f(t + u + v) du dv` on the grid points whose
/// stencil `[t, t + 2h]` fits in the window.
fn steklov2(grid: &WindowGrid, h: f64) -> Result<Vec<f64>> {
    let j = ((h / grid.step).round() as usize).max(1);
    let n = grid.len();
    if 2 * j + 5 > n {
        return Err(Error::WindowTooSmall { t_min: grid.t_min, t_max: grid.t_max, width: 2.0 * h });
    }
    let once = steklov1(&grid.samples, j);
    Ok(steklov1(&once, j))
}

/// Trapezoidal `(1/h) ∫₀^h g(t + u) du`, `h = j` grid steps.
fn steklov1(g: &[f64], j: usize) -> Vec<f64> {
    let mut prefix = Vec::with_capacity(g.len() + 1);
    prefix.push(0.0);
    for &v in g {
        prefix.push(prefix.last().unwrap() + v);
    }
    (0..g.len() - j)
        .map(|i| {
            let inner = prefix[i + j] - prefix[i + 1];
            (0.5 * (g[i] + g[i + j]) + inner) / j as f64
        })
        .collect()
}

fn c2_norm(v: &[f64], step: f64) -> f64 {
    let sup = |it: &mut dyn Iterator<Item = f64>| it.fold(0.0f64, |a, b| a.max(b.abs()));
    let n = v.len();
    let d1 = sup(&mut (1..n - 1).map(|i| (v[i + 1] - v[i - 1]) / (2.0 * step)));
    let d2 = sup(&mut (1..n - 1).map(|i| (v[i + 1] - 2.0 * v[i] + v[i - 1]) / (step * step)));
    sup(&mut v.iter().copied()) + d1 + d2
}
