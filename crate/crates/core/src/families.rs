//! Generalized Brenke families and their standing hypotheses.
//!
//! A family is a triple `(A1, A2, h)` of power series. Built-in families
//! describe each series analytically ([`SeriesKind`]), which gives exact
//! derivative scalars at the evaluation points; custom families may supply
//! explicit coefficient lists, which are treated as polynomials.

use std::fmt;
use std::sync::Arc;

use crate::error::{Error, Result};
use crate::series::{eval_pi, BrenkeTable, LogCoeff, SeriesCoeffs};
use crate::special::{ln_factorial, ln_gamma, neg_binomial_half_ln_pmf, poisson_ln_pmf};

/// Default truncation order of the coefficient table.
pub const DEFAULT_K_MAX: usize = 256;

/// An analytically described power series.
#[derive(Debug, Clone, PartialEq)]
pub enum SeriesKind {
    /// `e^t`.
    Exp,
    /// `e^{b t^p}`, `p ≥ 1`.
    ExpPower { b: f64, p: u32 },
    /// `(1 - t/2)^{-(m+1)}`.
    NegBinomialHalf { m: f64 },
    /// `1/(1 - t)`.
    Geometric,
    /// `t`.
    Identity,
    /// `Σ c_j t^j` with finitely many terms.
    Explicit(Vec<f64>),
}

fn poly_eval(c: &[f64], t: f64, deriv: u32) -> f64 {
    let mut acc = 0.0;
    for (j, &cj) in c.iter().enumerate().rev() {
        let j = j as u32;
        if j < deriv {
            break;
        }
        let factor = match deriv {
            0 => 1.0,
            1 => j as f64,
            _ => (j * (j - 1)) as f64,
        };
        acc = acc * t + cj * factor;
    }
    // Horner above ran over powers t^{j - deriv}; nothing further to shift.
    acc
}

/// `Σ_j w_j c_j u^{N-j}` with `u = 1/t`, the polynomial divided by `t^N`.
fn poly_eval_reversed(c: &[f64], u: f64, deriv: u32) -> f64 {
    let weight = |j: usize| match deriv {
        0 => 1.0,
        1 => j as f64,
        _ => (j * j.saturating_sub(1)) as f64,
    };
    c.iter().enumerate().fold(0.0, |acc, (j, &cj)| acc * u + cj * weight(j))
}

impl SeriesKind {
    /// Coefficient of `t^j` in log form.
    pub fn ln_coeff(&self, j: usize) -> LogCoeff {
        match self {
            SeriesKind::Exp => LogCoeff::positive(-ln_factorial(j as u64)),
            SeriesKind::ExpPower { b, p } => {
                let p = *p as usize;
                if !j.is_multiple_of(p) {
                    return LogCoeff::ZERO;
                }
                let s = j / p;
                if s == 0 {
                    return LogCoeff::positive(0.0);
                }
                if *b == 0.0 {
                    return LogCoeff::ZERO;
                }
                let sign = if b.is_sign_negative() && s % 2 == 1 { -1.0 } else { 1.0 };
                LogCoeff::signed(s as f64 * b.abs().ln() - ln_factorial(s as u64), sign)
            }
            SeriesKind::NegBinomialHalf { m } => {
                // (m+1)_j / j! · 2^{-j}
                let shape = m + 1.0;
                LogCoeff::positive(neg_binomial_half_ln_pmf(j as u64, shape) + shape * std::f64::consts::LN_2)
            }
            SeriesKind::Geometric => LogCoeff::positive(0.0),
            SeriesKind::Identity => {
                if j == 1 {
                    LogCoeff::positive(0.0)
                } else {
                    LogCoeff::ZERO
                }
            }
            SeriesKind::Explicit(c) => LogCoeff::from_value(c.get(j).copied().unwrap_or(0.0)),
        }
    }

    pub fn coeff(&self, j: usize) -> f64 {
        self.ln_coeff(j).value()
    }

    pub fn series(&self, order: usize) -> Result<SeriesCoeffs> {
        SeriesCoeffs::from_fn(order, |j| self.coeff(j))
    }

    /// Value at `t`.
    pub fn value(&self, t: f64) -> f64 {
        self.derivative(t, 0)
    }

    /// First derivative at `t`.
    pub fn d1(&self, t: f64) -> f64 {
        self.derivative(t, 1)
    }

    /// Second derivative at `t`.
    pub fn d2(&self, t: f64) -> f64 {
        self.derivative(t, 2)
    }

    fn derivative(&self, t: f64, order: u32) -> f64 {
        match self {
            SeriesKind::Exp => t.exp(),
            SeriesKind::ExpPower { .. } => self.ln_value(t).exp() * self.ratio(t, order),
            SeriesKind::NegBinomialHalf { m } => {
                let base = 1.0 - t / 2.0;
                if base <= 0.0 {
                    return f64::NAN;
                }
                let e = -(m + 1.0 + order as f64);
                let pre = match order {
                    0 => 1.0,
                    1 => (m + 1.0) / 2.0,
                    _ => (m + 1.0) * (m + 2.0) / 4.0,
                };
                pre * base.powf(e)
            }
            SeriesKind::Geometric => {
                let base = 1.0 - t;
                match order {
                    0 => 1.0 / base,
                    1 => 1.0 / (base * base),
                    _ => 2.0 / (base * base * base),
                }
            }
            SeriesKind::Identity => match order {
                0 => t,
                1 => 1.0,
                _ => 0.0,
            },
            SeriesKind::Explicit(c) => poly_eval(c, t, order),
        }
    }

    /// `ln |value(t)|`, computed without forming the value when it would
    /// overflow.
    pub fn ln_value(&self, t: f64) -> f64 {
        match self {
            SeriesKind::Exp => t,
            SeriesKind::ExpPower { b, p } => b * t.powi(*p as i32),
            SeriesKind::NegBinomialHalf { m } => {
                let base = 1.0 - t / 2.0;
                if base <= 0.0 {
                    f64::NAN
                } else {
                    -(m + 1.0) * base.ln()
                }
            }
            SeriesKind::Geometric => -(1.0 - t).abs().ln(),
            SeriesKind::Identity => t.abs().ln(),
            SeriesKind::Explicit(c) => {
                if t.abs() <= 1.0 {
                    poly_eval(c, t, 0).abs().ln()
                } else {
                    let n = (c.len() - 1) as f64;
                    n * t.abs().ln() + poly_eval_reversed(c, 1.0 / t, 0).abs().ln()
                }
            }
        }
    }

    /// Sign of `value(t)`.
    pub fn sign(&self, t: f64) -> f64 {
        match self {
            SeriesKind::Exp | SeriesKind::ExpPower { .. } => 1.0,
            SeriesKind::Explicit(c) if t.abs() > 1.0 => {
                let n = c.len() - 1;
                let s = poly_eval_reversed(c, 1.0 / t, 0).signum();
                if t < 0.0 && n % 2 == 1 {
                    -s
                } else {
                    s
                }
            }
            _ => self.value(t).signum(),
        }
    }

    /// `f^{(order)}(t) / f(t)` for `order ∈ {1, 2}`; `1` for `order = 0`.
    pub fn ratio(&self, t: f64, order: u32) -> f64 {
        if order == 0 {
            return 1.0;
        }
        match self {
            SeriesKind::Exp => 1.0,
            SeriesKind::ExpPower { b, p } => {
                let p = *p as f64;
                let g1 = b * p * t.powf(p - 1.0);
                if order == 1 {
                    g1
                } else {
                    let g2 = if p >= 2.0 { b * p * (p - 1.0) * t.powf(p - 2.0) } else { 0.0 };
                    g2 + g1 * g1
                }
            }
            SeriesKind::NegBinomialHalf { m } => {
                let d = 2.0 - t;
                if order == 1 {
                    (m + 1.0) / d
                } else {
                    (m + 1.0) * (m + 2.0) / (d * d)
                }
            }
            SeriesKind::Geometric => {
                let d = 1.0 - t;
                if order == 1 {
                    1.0 / d
                } else {
                    2.0 / (d * d)
                }
            }
            SeriesKind::Identity => {
                if order == 1 {
                    1.0 / t
                } else {
                    0.0
                }
            }
            SeriesKind::Explicit(c) => {
                if t.abs() <= 1.0 {
                    poly_eval(c, t, order) / poly_eval(c, t, 0)
                } else {
                    let u = 1.0 / t;
                    poly_eval_reversed(c, u, order) / poly_eval_reversed(c, u, 0) * u.powi(order as i32)
                }
            }
        }
    }

    /// Radius of convergence when known in closed form; explicit lists are
    /// estimated from their trailing coefficients.
    pub fn radius(&self) -> f64 {
        match self {
            SeriesKind::Exp | SeriesKind::ExpPower { .. } | SeriesKind::Identity => f64::INFINITY,
            SeriesKind::NegBinomialHalf { .. } => 2.0,
            SeriesKind::Geometric => 1.0,
            SeriesKind::Explicit(_) => f64::INFINITY,
        }
    }
}

impl fmt::Display for SeriesKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            SeriesKind::Exp => write!(f, "exp"),
            SeriesKind::ExpPower { b, p } => write!(f, "exp({b}·t^{p})"),
            SeriesKind::NegBinomialHalf { m } => write!(f, "(1-t/2)^-({m}+1)"),
            SeriesKind::Geometric => write!(f, "geometric"),
            SeriesKind::Identity => write!(f, "identity"),
            SeriesKind::Explicit(c) => write!(f, "{c:?}"),
        }
    }
}

/// Stancu node parameters; sample nodes are `(k + ν1)/(n + ν2)`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct StancuParams {
    pub nu1: f64,
    pub nu2: f64,
}

impl StancuParams {
    pub const ZERO: Self = Self { nu1: 0.0, nu2: 0.0 };

    pub fn new(nu1: f64, nu2: f64) -> Result<Self> {
        if !(nu1 >= 0.0 && nu2 >= 0.0) || !nu1.is_finite() || !nu2.is_finite() {
            return Err(Error::InvalidParameter(format!("Stancu parameters must be >= 0, got ({nu1}, {nu2})")));
        }
        Ok(Self { nu1, nu2 })
    }

    /// `(k + ν1)/(n + ν2)`, computed directly for each `k`.
    pub fn node(&self, k: usize, n: u32) -> f64 {
        (k as f64 + self.nu1) / (n as f64 + self.nu2)
    }
}

impl Default for StancuParams {
    fn default() -> Self {
        Self::ZERO
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub enum FamilyKind {
    Szasz,
    Appell,
    GouldHopper { b: f64, d: u32 },
    MillerLee { m: f64 },
    Custom,
}

/// A generalized Brenke family `A1(h(t))·A2(x h(t)) = Σ π_k(x) t^k`.
#[derive(Debug, Clone)]
pub struct FamilySpec {
    name: String,
    kind: FamilyKind,
    a1: SeriesKind,
    a2: SeriesKind,
    h: SeriesKind,
    a1_series: SeriesCoeffs,
    a2_series: SeriesCoeffs,
    h_series: SeriesCoeffs,
    h1: f64,
    hp1: f64,
    hpp1: f64,
    table: Arc<BrenkeTable>,
}

impl FamilySpec {
    /// Assembles a family; checks `a_{1,0} ≠ 0`, `h_0 = 0` and `h_1 ≠ 0`.
    pub fn new(name: impl Into<String>, kind: FamilyKind, a1: SeriesKind, a2: SeriesKind, h: SeriesKind, k_max: usize) -> Result<Self> {
        if a1.coeff(0) == 0.0 {
            return Err(Error::Precondition { what: "a_{1,0} ≠ 0".into(), index: 0 });
        }
        if h.coeff(0) != 0.0 {
            return Err(Error::Precondition { what: "h_0 = 0".into(), index: 0 });
        }
        if h.coeff(1) == 0.0 {
            return Err(Error::Precondition { what: "h_1 ≠ 0".into(), index: 1 });
        }
        let a1_series = a1.series(k_max)?;
        let a2_series = a2.series(k_max)?;
        let h_series = h.series(k_max)?;
        let a2_log = (0..=k_max).map(|j| a2.ln_coeff(j)).collect();
        let table = BrenkeTable::build(&a1_series, a2_log, &h_series, k_max)?;
        let (h1, hp1, hpp1) = (h.value(1.0), h.d1(1.0), h.d2(1.0));
        Ok(Self { name: name.into(), kind, a1, a2, h, a1_series, a2_series, h_series, h1, hp1, hpp1, table: Arc::new(table) })
    }

    /// Rebuilds the coefficient table at a different truncation order.
    pub fn with_k_max(&self, k_max: usize) -> Result<Self> {
        Self::new(self.name.clone(), self.kind, self.a1.clone(), self.a2.clone(), self.h.clone(), k_max)
    }

    pub fn name(&self) -> &str {
        &self.name
    }

    pub fn kind(&self) -> FamilyKind {
        self.kind
    }

    pub fn k_max(&self) -> usize {
        self.table.k_max()
    }

    pub fn a1(&self) -> &SeriesKind {
        &self.a1
    }

    pub fn a2(&self) -> &SeriesKind {
        &self.a2
    }

    pub fn h(&self) -> &SeriesKind {
        &self.h
    }

    pub fn a1_series(&self) -> &SeriesCoeffs {
        &self.a1_series
    }

    pub fn a2_series(&self) -> &SeriesCoeffs {
        &self.a2_series
    }

    pub fn h_series(&self) -> &SeriesCoeffs {
        &self.h_series
    }

    pub fn table(&self) -> &BrenkeTable {
        &self.table
    }

    /// `h(1)`.
    pub fn h1(&self) -> f64 {
        self.h1
    }

    /// `h′(1)`.
    pub fn hp1(&self) -> f64 {
        self.hp1
    }

    /// `h″(1)`.
    pub fn hpp1(&self) -> f64 {
        self.hpp1
    }

    pub fn a1_at(&self, t: f64) -> f64 {
        self.a1.value(t)
    }
    pub fn a1p_at(&self, t: f64) -> f64 {
        self.a1.d1(t)
    }
    pub fn a1pp_at(&self, t: f64) -> f64 {
        self.a1.d2(t)
    }
    pub fn a2_at(&self, y: f64) -> f64 {
        self.a2.value(y)
    }
    pub fn a2p_at(&self, y: f64) -> f64 {
        self.a2.d1(y)
    }
    pub fn a2pp_at(&self, y: f64) -> f64 {
        self.a2.d2(y)
    }

    /// `π_k(y)` from the coefficient table.
    pub fn pi(&self, k: usize, y: f64) -> Result<f64> {
        eval_pi(&self.table, k, y)
    }

    pub fn has_closed_form(&self) -> bool {
        matches!(self.kind, FamilyKind::Szasz | FamilyKind::GouldHopper { .. } | FamilyKind::MillerLee { .. })
    }

    /// Explicit weight `π_k(nx) / (A1(h(1))·A2(nx·h(1)))` for families that
    /// have one, evaluated in log space.
    pub fn closed_form_weight(&self, k: usize, n: u32, x: f64) -> Option<f64> {
        let y = n as f64 * x;
        let k64 = k as u64;
        match self.kind {
            FamilyKind::Szasz => Some(poisson_ln_pmf(k64, y).exp()),
            FamilyKind::GouldHopper { b, d } => {
                // e^{-y-b} g_k(y, b)/k! = Σ_s Pois(s; b) · Pois(k - (d+1)s; y)
                let step = d as usize + 1;
                let mut acc = 0.0;
                for s in 0..=k / step {
                    let ls = poisson_ln_pmf(s as u64, b);
                    if ls == f64::NEG_INFINITY || (ls < -745.0 && s as f64 > b) {
                        break;
                    }
                    acc += (ls + poisson_ln_pmf((k - step * s) as u64, y)).exp();
                }
                Some(acc)
            }
            FamilyKind::MillerLee { m } => {
                // e^{-y} G_k(2y) / 2^{m+k+1} = Σ_r NB(r; m+1, 1/2) · Pois(k - r; y)
                let shape = m + 1.0;
                let mut acc = 0.0;
                for r in 0..=k {
                    let lr = neg_binomial_half_ln_pmf(r as u64, shape);
                    if lr < -745.0 && r as f64 > shape {
                        break;
                    }
                    acc += (lr + poisson_ln_pmf((k - r) as u64, y)).exp();
                }
                Some(acc)
            }
            _ => None,
        }
    }
}

/// Classical Szász–Mirakyan: `A1 = 1`, `A2 = exp`, `h(t) = t`.
pub fn make_szasz() -> FamilySpec {
    FamilySpec::new("szasz", FamilyKind::Szasz, SeriesKind::Explicit(vec![1.0]), SeriesKind::Exp, SeriesKind::Identity, DEFAULT_K_MAX)
        .expect("Szász family is well formed")
}

/// Appell family (`A2 = exp`, `h(t) = t`) generated by `a1`.
pub fn make_appell(a1: SeriesKind) -> Result<FamilySpec> {
    FamilySpec::new("appell", FamilyKind::Appell, a1, SeriesKind::Exp, SeriesKind::Identity, DEFAULT_K_MAX)
}

/// Appell family from an explicit coefficient list, zero-padded past its end.
pub fn make_appell_from_series(a1: &SeriesCoeffs) -> Result<FamilySpec> {
    make_appell(SeriesKind::Explicit(a1.coeffs().to_vec()))
}

/// Gould–Hopper: `A1(t) = e^{b t^{d+1}}`, `A2 = exp`, `h(t) = t`.
pub fn make_gould_hopper(b: f64, d: u32) -> Result<FamilySpec> {
    if !(b >= 0.0) || !b.is_finite() {
        return Err(Error::InvalidParameter(format!("Gould-Hopper requires b >= 0 (b < 0 given: {b})")));
    }
    if d < 1 {
        return Err(Error::InvalidParameter(format!("Gould-Hopper requires d >= 1, got {d}")));
    }
    FamilySpec::new(
        "gould_hopper",
        FamilyKind::GouldHopper { b, d },
        SeriesKind::ExpPower { b, p: d + 1 },
        SeriesKind::Exp,
        SeriesKind::Identity,
        DEFAULT_K_MAX,
    )
}

/// Miller–Lee, encoded as `A1(t) = (1 - t/2)^{-(m+1)}`, `A2 = exp`,
/// `h(t) = t` so that `π_k(x) = G_k^{(m)}(2x)/2^k` and `h′(1) = 1`.
pub fn make_miller_lee(m: f64) -> Result<FamilySpec> {
    if !(m > -1.0) || !m.is_finite() {
        return Err(Error::InvalidParameter(format!("Miller-Lee requires m > -1, got {m}")));
    }
    FamilySpec::new(
        "miller_lee",
        FamilyKind::MillerLee { m },
        SeriesKind::NegBinomialHalf { m },
        SeriesKind::Exp,
        SeriesKind::Identity,
        DEFAULT_K_MAX,
    )
}

/// User-defined family.
pub fn make_custom(a1: SeriesKind, a2: SeriesKind, h: SeriesKind, k_max: usize) -> Result<FamilySpec> {
    FamilySpec::new("custom", FamilyKind::Custom, a1, a2, h, k_max)
}

/// Gould–Hopper polynomial `g_k^{d+1}(x, b)` from its explicit sum.
pub fn gould_hopper_poly(k: u32, d: u32, x: f64, b: f64) -> f64 {
    let step = d + 1;
    (0..=k / step)
        .map(|s| {
            let e = k - step * s;
            let ln_c = ln_factorial(k as u64) - ln_factorial(s as u64) - ln_factorial(e as u64);
            ln_c.exp() * b.powi(s as i32) * x.powi(e as i32)
        })
        .sum()
}

/// Miller–Lee polynomial `G_k^{(m)}(x) = Σ_r (m+1)_r / (r!(k-r)!) x^{k-r}`.
pub fn miller_lee_poly(k: u32, m: f64, x: f64) -> f64 {
    (0..=k)
        .map(|r| {
            let poch = (ln_gamma(m + 1.0 + r as f64) - ln_gamma(m + 1.0)).exp();
            poch / (ln_factorial(r as u64) + ln_factorial((k - r) as u64)).exp() * x.powi((k - r) as i32)
        })
        .sum()
}

/// Result of one hypothesis check.
#[derive(Debug, Clone, PartialEq)]
pub struct CheckResult {
    pub name: &'static str,
    pub passed: bool,
    /// Hard checks decide the overall verdict; soft ones are reported only.
    pub hard: bool,
    pub detail: String,
}

#[derive(Debug, Clone, PartialEq)]
pub struct ValidationReport {
    pub family: String,
    pub checks: Vec<CheckResult>,
    pub warnings: Vec<String>,
}

impl ValidationReport {
    /// True when every hard check passed.
    pub fn passed(&self) -> bool {
        self.checks.iter().filter(|c| c.hard).all(|c| c.passed)
    }

    pub fn check(&self, name: &str) -> Option<&CheckResult> {
        self.checks.iter().find(|c| c.name == name)
    }
}

impl fmt::Display for ValidationReport {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        writeln!(f, "family: {}", self.family)?;
        for c in &self.checks {
            let status = if c.passed { "pass" } else { "FAIL" };
            let tag = if c.hard { "" } else { " (advisory)" };
            writeln!(f, "  [{status}] {}{tag}: {}", c.name, c.detail)?;
        }
        for w in &self.warnings {
            writeln!(f, "  warning: {w}")?;
        }
        write!(f, "verdict: {}", if self.passed() { "pass" } else { "FAIL" })
    }
}

const GRID_POINTS: usize = 65;
const GF_POINTS: [f64; 3] = [0.1, 0.25, 0.5];

/// Checks the standing hypotheses of `f` on a finite grid.
///
/// Positivity of `π_k` is only ever established on the grid; a pass means
/// "empirically nonnegative".
pub fn validate(f: &FamilySpec, k: usize, x_max: f64, n_max: u32) -> ValidationReport {
    let k = k.min(f.k_max());
    let y_max = n_max as f64 * x_max;
    let grid: Vec<f64> = (0..GRID_POINTS).map(|i| y_max * i as f64 / (GRID_POINTS - 1) as f64).collect();
    let mut checks = Vec::new();
    let mut warnings = Vec::new();

    let hp1_err = (f.hp1() - 1.0).abs();
    checks.push(CheckResult {
        name: "h'(1) = 1",
        passed: hp1_err <= 1e-12,
        hard: true,
        detail: format!("h'(1) = {}", f.hp1()),
    });

    let zero_a2 = (0..=k).find(|&m| f.a2().ln_coeff(m).is_zero());
    checks.push(CheckResult {
        name: "a_{2,k} ≠ 0",
        passed: zero_a2.is_none(),
        hard: true,
        detail: match zero_a2 {
            Some(m) => format!("a_{{2,{m}}} = 0"),
            None => format!("nonzero for k <= {k}"),
        },
    });

    // π_k(y) ≥ 0, measured relative to the magnitude of its terms.
    let mut worst = (0.0f64, 0usize, 0.0f64);
    let mut failed_eval = None;
    for &y in &grid {
        for kk in 0..=k {
            match f.table().ln_pi(kk, y) {
                Ok(v) => {
                    let r = v.relative();
                    if r < worst.0 {
                        worst = (r, kk, y);
                    }
                }
                Err(e) => failed_eval = Some(e.to_string()),
            }
        }
    }
    checks.push(CheckResult {
        name: "pi_k >= 0 (empirically nonnegative on grid)",
        passed: worst.0 >= -1e-12 && failed_eval.is_none(),
        hard: true,
        detail: match failed_eval {
            Some(e) => e,
            None if worst.0 < 0.0 => format!("worst relative value {:e} at k = {}, y = {}", worst.0, worst.1, worst.2),
            None => format!("k <= {k}, y in [0, {y_max}]"),
        },
    });

    // A1 is evaluated on [0, h(1)], A2 on the y grid scaled by h(1).
    let h1 = f.h1();
    let a1_bad = (0..GRID_POINTS)
        .map(|i| h1 * i as f64 / (GRID_POINTS - 1) as f64)
        .find(|&t| !(f.a1().sign(t) > 0.0) || f.a1().ln_value(t).is_nan());
    let a2_bad = grid.iter().map(|&y| y * h1).find(|&y| !(f.a2().sign(y) > 0.0) || f.a2().ln_value(y).is_nan());
    checks.push(CheckResult {
        name: "A1, A2 > 0",
        passed: a1_bad.is_none() && a2_bad.is_none(),
        hard: true,
        detail: match (a1_bad, a2_bad) {
            (Some(t), _) => format!("A1({t}) = {} is not positive", f.a1_at(t)),
            (None, Some(y)) => format!("A2({y}) = {} is not positive", f.a2_at(y)),
            _ => "positive on grid".into(),
        },
    });

    let mut limit_worst = (0.0f64, 1e2);
    for y in [1e2, 1e3, 1e4] {
        for order in [1, 2] {
            let dev = (f.a2().ratio(y, order) - 1.0).abs();
            if !(dev <= limit_worst.0) {
                limit_worst = (dev, y);
            }
        }
    }
    checks.push(CheckResult {
        name: "A2'/A2 -> 1 and A2''/A2 -> 1",
        passed: limit_worst.0 < 1e-6,
        hard: false,
        detail: format!("max deviation {:e} at y = {} (checked at y = 1e2, 1e3, 1e4)", limit_worst.0, limit_worst.1),
    });

    let gf = generating_function_residual(f, k, x_max);
    checks.push(CheckResult {
        name: "generating function",
        passed: gf.passed,
        hard: true,
        detail: gf.detail,
    });

    let r = f.a1().radius().min(f.h().radius());
    if h1 >= 0.9 * r {
        warnings.push(format!("h(1) = {h1} is close to the convergence radius {r} of A1"));
    }
    if let SeriesKind::Explicit(c) = f.a1() {
        let est = explicit_radius(c);
        if h1 >= 0.9 * est {
            warnings.push(format!("A1 coefficients suggest divergence near t = {est:.3}; derivative scalars at h(1) = {h1} may be inaccurate"));
        }
    }

    ValidationReport { family: f.name().to_string(), checks, warnings }
}

fn explicit_radius(c: &[f64]) -> f64 {
    // root test over the trailing half of the nonzero coefficients
    let nz: Vec<(usize, f64)> = c.iter().copied().enumerate().filter(|&(j, v)| j > 0 && v != 0.0).collect();
    if nz.len() < 4 {
        return f64::INFINITY;
    }
    let tail = &nz[nz.len() / 2..];
    let root = tail.iter().map(|&(j, v)| v.abs().powf(1.0 / j as f64)).fold(0.0, f64::max);
    if root == 0.0 {
        f64::INFINITY
    } else {
        1.0 / root
    }
}

struct GfResidual {
    passed: bool,
    detail: String,
}

/// `|Σ_{k ≤ K} π_k(x) t^k − A1(h(t))·A2(x h(t))|` against a truncation plus
/// rounding estimate.
fn generating_function_residual(f: &FamilySpec, k_max: usize, x_max: f64) -> GfResidual {
    let xs: Vec<f64> = (0..=8).map(|i| x_max * i as f64 / 8.0).collect();
    let mut worst: Option<(f64, f64, f64)> = None;
    for &x in &xs {
        for &t in &GF_POINTS {
            let ht = f.h().value(t);
            let exact = f.a1_at(ht) * f.a2_at(x * ht);
            let mut sum = 0.0;
            let mut abs_sum = 0.0;
            let mut last = 0.0;
            for k in 0..=k_max {
                let Ok(v) = f.table().ln_pi(k, x) else { continue };
                let term = v.sign * (v.ln_abs + k as f64 * t.ln()).exp();
                sum += term;
                abs_sum += (v.ln_abs_terms + k as f64 * t.ln()).exp();
                last = term.abs();
            }
            let tail = last * t / (1.0 - t) + 64.0 * f64::EPSILON * abs_sum.max(exact.abs());
            let resid = (sum - exact).abs();
            let ratio = if resid == 0.0 { 0.0 } else { resid / tail };
            if !exact.is_finite() || !sum.is_finite() || worst.is_none_or(|w| ratio > w.0) {
                worst = Some((if exact.is_finite() && sum.is_finite() { ratio } else { f64::INFINITY }, x, t));
            }
        }
    }
    let (ratio, x, t) = worst.unwrap_or((0.0, 0.0, 0.0));
    GfResidual {
        passed: ratio <= 10.0,
        detail: format!("worst residual/tail ratio {ratio:.3e} at x = {x}, t = {t}"),
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn szasz_scalars_and_weights() {
        let f = make_szasz();
        assert_eq!((f.h1(), f.hp1(), f.hpp1()), (1.0, 1.0, 0.0));
        assert_eq!(f.closed_form_weight(0, 1, 0.0), Some(1.0));
        let w = f.closed_form_weight(2, 1, 1.0).unwrap();
        assert!((w - (-1.0f64).exp() / 2.0).abs() < 1e-16);
        assert_eq!(f.a1p_at(1.0) / f.a1_at(1.0), 0.0);
    }

    #[test]
    fn appell_trivial_a1_matches_szasz() {
        let f = make_appell(SeriesKind::Explicit(vec![1.0])).unwrap();
        let s = make_szasz();
        for k in 0..30 {
            for y in [0.0, 0.5, 3.0] {
                assert_eq!(f.pi(k, y).unwrap(), s.pi(k, y).unwrap());
            }
        }
        assert!(matches!(make_appell(SeriesKind::Explicit(vec![0.0, 1.0])), Err(Error::Precondition { index: 0, .. })));
    }

    #[test]
    fn appell_exp_polynomials() {
        let f = make_appell(SeriesKind::Exp).unwrap();
        // Σ_{j ≤ k} y^j / (j!(k-j)!) by direct Cauchy product
        for k in 0..12usize {
            for y in [0.0f64, 0.7, 2.0] {
                let mut want = 0.0;
                for j in 0..=k {
                    want += y.powi(j as i32) / ((1..=j).product::<usize>() as f64 * (1..=k - j).product::<usize>() as f64);
                }
                let got = f.pi(k, y).unwrap();
                assert!((got - want).abs() <= 1e-14 * want.max(1.0), "k={k} y={y}");
            }
        }
    }

    #[test]
    fn gould_hopper_scalars() {
        let f = make_gould_hopper(1.0, 1).unwrap();
        assert!((f.a1p_at(1.0) / f.a1_at(1.0) - 2.0).abs() < 1e-15);
        assert!((f.a1().ratio(1.0, 2) - (2.0 + 4.0)).abs() < 1e-15);
        assert!((f.a1pp_at(1.0) / f.a1_at(1.0) - 6.0).abs() < 1e-14);
        assert_eq!(gould_hopper_poly(2, 1, 1.0, 1.0), 3.0);
        assert_eq!(gould_hopper_poly(2, 1, 0.0, 1.0), 2.0);
        assert!((f.pi(2, 3.0).unwrap() - (9.0 + 2.0) / 2.0).abs() < 1e-15);
        assert!(make_gould_hopper(-1.0, 1).unwrap_err().to_string().contains("b < 0"));
    }

    #[test]
    fn gould_hopper_zero_b_is_szasz_exactly() {
        let s = make_szasz();
        for d in 1..=3 {
            let g = make_gould_hopper(0.0, d).unwrap();
            for k in 0..=200 {
                for (n, x) in [(1, 0.0), (4, 1.0), (64, 2.5), (256, 4.0)] {
                    assert_eq!(g.closed_form_weight(k, n, x), s.closed_form_weight(k, n, x));
                }
            }
        }
    }

    #[test]
    fn miller_lee_scalars_and_polys() {
        for m in [0.0, 0.5, 2.0] {
            let f = make_miller_lee(m).unwrap();
            assert_eq!((f.h1(), f.hp1(), f.hpp1()), (1.0, 1.0, 0.0));
            assert!((f.a1_at(1.0) - 2f64.powf(m + 1.0)).abs() < 1e-13);
            assert!((f.a1().ratio(1.0, 1) - (m + 1.0)).abs() < 1e-14);
            assert!((f.a1().ratio(1.0, 2) - (m + 1.0) * (m + 2.0)).abs() < 1e-13);
            let w0 = f.closed_form_weight(0, 3, 0.5).unwrap();
            assert!((w0 - (-1.5f64).exp() / 2f64.powf(m + 1.0)).abs() < 1e-15);
        }
        assert!((miller_lee_poly(1, 0.0, 3.0) - 4.0).abs() < 1e-15);
        assert_eq!(miller_lee_poly(0, 1.7, 3.0), 1.0);
        let f = make_miller_lee(0.0).unwrap();
        assert_eq!(f.table().coeff(1, 0), 0.5);
        assert_eq!(f.table().coeff(1, 1), 1.0);
        assert!(make_miller_lee(-1.0).is_err());
    }

    #[test]
    fn miller_lee_weights_sum_to_one() {
        let f = make_miller_lee(0.0).unwrap();
        let s: f64 = (0..400).map(|k| f.closed_form_weight(k, 1, 1.0).unwrap()).sum();
        assert!((s - 1.0).abs() < 1e-14, "{s}");
    }

    #[test]
    fn miller_lee_closed_form_matches_explicit_sum() {
        // e^{-y} G_k(2y) / 2^{m+k+1} with G_k from its explicit sum
        for m in [0.0, 0.5, 2.0] {
            let f = make_miller_lee(m).unwrap();
            for k in 0..30u32 {
                for y in [0.0f64, 0.5, 5.0] {
                    let want = (-y).exp() * miller_lee_poly(k, m, 2.0 * y) / 2f64.powf(m + k as f64 + 1.0);
                    let got = f.closed_form_weight(k as usize, 1, y).unwrap();
                    assert!((got - want).abs() <= 1e-13 * want.max(1e-300), "m={m} k={k} y={y}");
                }
            }
        }
    }

    #[test]
    fn validation_of_builtins_passes() {
        for f in [make_szasz(), make_gould_hopper(1.0, 1).unwrap(), make_miller_lee(0.5).unwrap(), make_appell(SeriesKind::Exp).unwrap()] {
            let r = validate(&f, 64, 2.0, 16);
            assert!(r.passed(), "{r}");
            assert!(r.checks.iter().all(|c| c.passed), "{r}");
        }
    }

    #[test]
    fn validation_flags_geometric_a2() {
        let f = make_custom(SeriesKind::Explicit(vec![1.0]), SeriesKind::Geometric, SeriesKind::Identity, 64).unwrap();
        let r = validate(&f, 32, 0.5, 1);
        let limit = r.check("A2'/A2 -> 1 and A2''/A2 -> 1").unwrap();
        assert!(!limit.passed);
        assert!(!limit.hard);
    }

    #[test]
    fn validation_flags_bad_h_derivative() {
        let f = make_custom(SeriesKind::Explicit(vec![1.0]), SeriesKind::Exp, SeriesKind::Explicit(vec![0.0, 1.0, 0.5]), 32).unwrap();
        let r = validate(&f, 16, 1.0, 1);
        assert!(!r.check("h'(1) = 1").unwrap().passed);
        assert!(!r.passed());
    }

    #[test]
    fn validation_is_deterministic() {
        let f = make_gould_hopper(0.5, 2).unwrap();
        assert_eq!(validate(&f, 40, 1.0, 8), validate(&f, 40, 1.0, 8));
    }

    #[test]
    fn explicit_series_ratios_at_large_arguments() {
        let p = SeriesKind::Explicit(vec![1.0, 2.0, 3.0]);
        for t in [0.5, 3.0, 1e4] {
            let want1 = (2.0 + 6.0 * t) / (1.0 + 2.0 * t + 3.0 * t * t);
            let want2 = 6.0 / (1.0 + 2.0 * t + 3.0 * t * t);
            assert!((p.ratio(t, 1) - want1).abs() <= 1e-14 * want1.abs());
            assert!((p.ratio(t, 2) - want2).abs() <= 1e-14 * want2.abs());
            assert!((p.ln_value(t) - (1.0 + 2.0 * t + 3.0 * t * t).ln()).abs() < 1e-13);
        }
    }
}
