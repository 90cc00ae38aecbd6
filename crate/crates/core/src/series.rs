//! Truncated power series and the triangular coefficient table of `π_k`.

use crate::error::{Error, Result};

/// Coefficients `c_j` of `Σ c_j t^j`, truncated at order `len - 1`.
///
/// Subnormal entries are flushed to zero on construction.
#[derive(Debug, Clone, PartialEq)]
pub struct SeriesCoeffs(Vec<f64>);

fn flush(v: f64) -> f64 {
    if v.is_subnormal() {
        0.0
    } else {
        v
    }
}

impl SeriesCoeffs {
    pub fn new(coeffs: Vec<f64>) -> Result<Self> {
        if coeffs.is_empty() {
            return Err(Error::EmptySeries);
        }
        if let Some((index, &value)) = coeffs.iter().enumerate().find(|(_, c)| !c.is_finite()) {
            return Err(Error::NonFiniteCoefficient { index, value });
        }
        Ok(Self(coeffs.into_iter().map(flush).collect()))
    }

    /// Builds `Σ_{j ≤ order} f(j) t^j`.
    pub fn from_fn(order: usize, f: impl FnMut(usize) -> f64) -> Result<Self> {
        Self::new((0..=order).map(f).collect())
    }

    /// The series `t`, truncated at `order ≥ 1`.
    pub fn identity(order: usize) -> Self {
        let mut c = vec![0.0; order.max(1) + 1];
        c[1] = 1.0;
        Self(c)
    }

    /// The constant series `1`.
    pub fn one(order: usize) -> Self {
        let mut c = vec![0.0; order + 1];
        c[0] = 1.0;
        Self(c)
    }

    /// Truncation order (highest stored power).
    pub fn order(&self) -> usize {
        self.0.len() - 1
    }

    pub fn coeffs(&self) -> &[f64] {
        &self.0
    }

    /// Coefficient of `t^j`; zero past the stored order.
    pub fn get(&self, j: usize) -> f64 {
        self.0.get(j).copied().unwrap_or(0.0)
    }

    pub fn truncated(&self, order: usize) -> Result<Self> {
        self.check_order(order)?;
        Ok(Self(self.0[..=order].to_vec()))
    }

    /// Zero-pads or truncates to exactly `order`.
    pub fn resized(&self, order: usize) -> Self {
        let mut c = self.0.clone();
        c.resize(order + 1, 0.0);
        Self(c)
    }

    fn check_order(&self, order: usize) -> Result<()> {
        if order > self.order() {
            return Err(Error::OrderTooLarge { requested: order, available: self.order() });
        }
        Ok(())
    }

    fn is_identity(&self) -> bool {
        self.0.iter().enumerate().all(|(j, &c)| if j == 1 { c == 1.0 } else { c == 0.0 })
    }
}

fn mul_into(a: &[f64], b: &[f64], order: usize) -> Vec<f64> {
    let mut out = vec![0.0; order + 1];
    for (j, slot) in out.iter_mut().enumerate() {
        let mut acc = 0.0;
        for i in 0..=j {
            let (x, y) = (a.get(i).copied().unwrap_or(0.0), b.get(j - i).copied().unwrap_or(0.0));
            acc += x * y;
        }
        *slot = flush(acc);
    }
    out
}

/// Cauchy product truncated at `order`.
pub fn series_mul(a: &SeriesCoeffs, b: &SeriesCoeffs, order: usize) -> Result<SeriesCoeffs> {
    a.check_order(order)?;
    b.check_order(order)?;
    SeriesCoeffs::new(mul_into(&a.0, &b.0, order))
}

/// Powers `inner^m` for `m ≤ order`, each truncated at `order`.
///
/// `inner^m` has no terms below `t^m` when `inner[0] = 0`.
pub(crate) fn inner_powers(inner: &SeriesCoeffs, order: usize) -> Vec<Vec<f64>> {
    let mut powers = Vec::with_capacity(order + 1);
    let mut one = vec![0.0; order + 1];
    one[0] = 1.0;
    powers.push(one);
    for m in 1..=order {
        let next = if inner.is_identity() {
            let mut p = vec![0.0; order + 1];
            p[m] = 1.0;
            p
        } else {
            let mut p = mul_into(&powers[m - 1], &inner.0, order);
            // exact zeros below the leading power
            for v in p.iter_mut().take(m) {
                *v = 0.0;
            }
            p
        };
        powers.push(next);
    }
    powers
}

/// `outer(inner(t))` truncated at `order`; requires `inner[0] = 0`.
pub fn series_compose(outer: &SeriesCoeffs, inner: &SeriesCoeffs, order: usize) -> Result<SeriesCoeffs> {
    if inner.0[0] != 0.0 {
        return Err(Error::NonzeroConstantTerm(inner.0[0]));
    }
    outer.check_order(order)?;
    inner.check_order(order.min(inner.order()))?;
    let inner = inner.resized(order);
    if inner.is_identity() {
        return outer.truncated(order);
    }
    let powers = inner_powers(&inner, order);
    Ok(compose_with_powers(outer, &powers, order))
}

fn compose_with_powers(outer: &SeriesCoeffs, powers: &[Vec<f64>], order: usize) -> SeriesCoeffs {
    let mut out = vec![0.0; order + 1];
    for (m, power) in powers.iter().enumerate().take(order + 1) {
        let c = outer.get(m);
        if c == 0.0 {
            continue;
        }
        for j in m..=order {
            out[j] += c * power[j];
        }
    }
    SeriesCoeffs(out.into_iter().map(flush).collect())
}

/// A real number stored as `sign · exp(ln_abs)`, so that coefficients like
/// `1/m!` stay representable far past the `f64` range.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct LogCoeff {
    pub ln_abs: f64,
    pub sign: f64,
    // the value as given, when it came from an f64
    plain: Option<f64>,
}

impl LogCoeff {
    pub const ZERO: Self = Self { ln_abs: f64::NEG_INFINITY, sign: 0.0, plain: Some(0.0) };

    pub fn from_value(v: f64) -> Self {
        if v == 0.0 {
            Self::ZERO
        } else {
            Self { ln_abs: v.abs().ln(), sign: v.signum(), plain: Some(v) }
        }
    }

    pub fn positive(ln_abs: f64) -> Self {
        Self::signed(ln_abs, 1.0)
    }

    pub fn signed(ln_abs: f64, sign: f64) -> Self {
        Self { ln_abs, sign, plain: None }
    }

    pub fn is_zero(&self) -> bool {
        self.sign == 0.0
    }

    pub fn value(&self) -> f64 {
        if let Some(v) = self.plain {
            v
        } else if self.is_zero() {
            0.0
        } else {
            flush(self.sign * self.ln_abs.exp())
        }
    }
}

/// A value carried in log form together with the log of the sum of the
/// absolute values of its terms (the cancellation scale).
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ScaledValue {
    pub ln_abs: f64,
    pub sign: f64,
    pub ln_abs_terms: f64,
}

impl ScaledValue {
    /// `value / Σ|terms|`, in `[-1, 1]`.
    pub fn relative(&self) -> f64 {
        if self.sign == 0.0 {
            0.0
        } else {
            self.sign * (self.ln_abs - self.ln_abs_terms).exp()
        }
    }
}

/// Triangular table `c[k][m]`, `0 ≤ m ≤ k ≤ k_max`, with
/// `π_k(x) = Σ_m c[k][m] x^m`.
///
/// Rows are stored with exactly `k + 1` entries. Alongside the plain
/// coefficients the table keeps the factorization
/// `c[k][m] = a2[m] · [t^k](B(t) H(t)^m)` with `a2[m]` in log form, which is
/// what the scaled evaluator uses.
#[derive(Debug, Clone)]
pub struct BrenkeTable {
    k_max: usize,
    rows: Vec<Vec<f64>>,
    inner: Vec<Vec<f64>>,
    a2_log: Vec<LogCoeff>,
    // rows where a nonzero coefficient underflowed to zero
    lossy: Vec<bool>,
}

/// Builds the table from `A1(h(t))·A2(x h(t)) = Σ π_k(x) t^k`.
pub fn brenke_table(a1: &SeriesCoeffs, a2: &SeriesCoeffs, h: &SeriesCoeffs, k_max: usize) -> Result<BrenkeTable> {
    a2.check_order(k_max)?;
    let a2_log = a2.0[..=k_max].iter().map(|&v| LogCoeff::from_value(v)).collect();
    BrenkeTable::build(a1, a2_log, h, k_max)
}

impl BrenkeTable {
    /// Like [`brenke_table`], with the `A2` coefficients given in log form.
    pub fn build(a1: &SeriesCoeffs, a2_log: Vec<LogCoeff>, h: &SeriesCoeffs, k_max: usize) -> Result<Self> {
        if h.get(0) != 0.0 {
            return Err(Error::Precondition { what: "h_0 = 0".into(), index: 0 });
        }
        if h.get(1) == 0.0 {
            return Err(Error::Precondition { what: "h_1 ≠ 0".into(), index: 1 });
        }
        if a1.get(0) == 0.0 {
            return Err(Error::Precondition { what: "a_{1,0} ≠ 0".into(), index: 0 });
        }
        a1.check_order(k_max)?;
        if a2_log.len() <= k_max {
            return Err(Error::OrderTooLarge { requested: k_max, available: a2_log.len().saturating_sub(1) });
        }
        let h = h.resized(k_max);
        let a1 = a1.truncated(k_max)?;

        let inner: Vec<Vec<f64>> = if h.is_identity() {
            (0..=k_max).map(|k| (0..=k).map(|m| a1.0[k - m]).collect()).collect()
        } else {
            let powers = inner_powers(&h, k_max);
            let b = compose_with_powers(&a1, &powers, k_max);
            let mut rows: Vec<Vec<f64>> = (0..=k_max).map(|k| vec![0.0; k + 1]).collect();
            for (m, hm) in powers.iter().enumerate() {
                let bhm = mul_into(&b.0, hm, k_max);
                for k in m..=k_max {
                    rows[k][m] = bhm[k];
                }
            }
            rows
        };

        let rows: Vec<Vec<f64>> = inner
            .iter()
            .map(|row| row.iter().enumerate().map(|(m, &d)| flush(d * a2_log[m].value())).collect())
            .collect();
        let lossy = rows
            .iter()
            .zip(&inner)
            .map(|(c, d)| c.iter().zip(d).enumerate().any(|(m, (&c, &d))| c == 0.0 && d != 0.0 && !a2_log[m].is_zero()))
            .collect();

        Ok(Self { k_max, rows, inner, a2_log: a2_log[..=k_max].to_vec(), lossy })
    }

    pub fn k_max(&self) -> usize {
        self.k_max
    }

    /// `c[k][m]`; zero above the diagonal.
    pub fn coeff(&self, k: usize, m: usize) -> f64 {
        self.rows.get(k).and_then(|r| r.get(m)).copied().unwrap_or(0.0)
    }

    pub fn row(&self, k: usize) -> &[f64] {
        &self.rows[k]
    }

    fn check_k(&self, k: usize) -> Result<()> {
        if k > self.k_max {
            return Err(Error::OrderTooLarge { requested: k, available: self.k_max });
        }
        Ok(())
    }

    /// `π_k(y)` in log form, each term `c[k][m] y^m` formed in log space.
    pub fn ln_pi(&self, k: usize, y: f64) -> Result<ScaledValue> {
        self.check_k(k)?;
        if !y.is_finite() {
            return Err(Error::InvalidParameter(format!("evaluation point {y}")));
        }
        let ln_y = y.abs().ln();
        let y_neg = y < 0.0;
        let mut terms: Vec<(f64, f64)> = Vec::with_capacity(k + 1);
        for (m, &d) in self.inner[k].iter().enumerate() {
            let a2 = self.a2_log[m];
            if d == 0.0 || a2.is_zero() {
                continue;
            }
            if m > 0 && y == 0.0 {
                break;
            }
            let ln_ym = if m == 0 { 0.0 } else { m as f64 * ln_y };
            let mut sign = d.signum() * a2.sign;
            if y_neg && m % 2 == 1 {
                sign = -sign;
            }
            terms.push((d.abs().ln() + a2.ln_abs + ln_ym, sign));
        }
        let max = terms.iter().map(|t| t.0).fold(f64::NEG_INFINITY, f64::max);
        if max == f64::NEG_INFINITY {
            return Ok(ScaledValue { ln_abs: f64::NEG_INFINITY, sign: 0.0, ln_abs_terms: f64::NEG_INFINITY });
        }
        let (mut signed, mut abs) = (0.0, 0.0);
        for (t, s) in &terms {
            let e = (t - max).exp();
            signed += s * e;
            abs += e;
        }
        let sign = if signed == 0.0 { 0.0 } else { signed.signum() };
        Ok(ScaledValue { ln_abs: max + signed.abs().ln(), sign, ln_abs_terms: max + abs.ln() })
    }
}

/// Horner evaluation of `π_k(y) = Σ_m c[k][m] y^m`.
pub fn eval_pi(table: &BrenkeTable, k: usize, y: f64) -> Result<f64> {
    table.check_k(k)?;
    if !y.is_finite() {
        return Err(Error::InvalidParameter(format!("evaluation point {y}")));
    }
    if table.lossy[k] {
        return Err(Error::Overflow(format!("row {k} has coefficients outside the f64 range; use the scaled weight path")));
    }
    let v = table.rows[k].iter().rev().fold(0.0, |acc, &c| acc * y + c);
    if !v.is_finite() {
        return Err(Error::Overflow(format!("π_{k}({y}) is not representable; use the scaled weight path")));
    }
    Ok(v)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn s(v: &[f64]) -> SeriesCoeffs {
        SeriesCoeffs::new(v.to_vec()).unwrap()
    }

    fn exp_series(order: usize) -> SeriesCoeffs {
        let mut f = 1.0;
        SeriesCoeffs::from_fn(order, |j| {
            if j > 0 {
                f /= j as f64;
            }
            f
        })
        .unwrap()
    }

    #[test]
    fn construction_rejects_bad_input() {
        assert_eq!(SeriesCoeffs::new(vec![]), Err(Error::EmptySeries));
        assert!(matches!(
            SeriesCoeffs::new(vec![1.0, f64::NAN]),
            Err(Error::NonFiniteCoefficient { index: 1, .. })
        ));
        let c = s(&[1.0, 1e-310]);
        assert_eq!(c.coeffs()[1], 0.0);
    }

    #[test]
    fn mul_binomial_square() {
        let a = s(&[1.0, 1.0, 0.0]);
        assert_eq!(series_mul(&a, &a, 2).unwrap().coeffs(), &[1.0, 2.0, 1.0]);
    }

    #[test]
    fn mul_exp_squares_to_exp_2t() {
        let e = exp_series(3);
        let p = series_mul(&e, &e, 3).unwrap();
        // e^{2t}: 2^j / j!
        let want = [1.0, 2.0, 2.0, 4.0 / 3.0];
        for (a, b) in p.coeffs().iter().zip(want) {
            assert!((a - b).abs() < 1e-15);
        }
    }

    #[test]
    fn mul_identity_and_order_check() {
        let a = s(&[3.0, -1.0, 0.5, 2.0]);
        let one = SeriesCoeffs::one(3);
        assert_eq!(series_mul(&a, &one, 3).unwrap(), a);
        assert_eq!(series_mul(&a, &one, 2).unwrap().coeffs(), &[3.0, -1.0, 0.5]);
        assert!(matches!(series_mul(&a, &s(&[1.0]), 2), Err(Error::OrderTooLarge { .. })));
    }

    #[test]
    fn compose_cases() {
        let e = exp_series(3);
        assert_eq!(series_compose(&e, &SeriesCoeffs::identity(3), 3).unwrap(), e);

        let geom = s(&[1.0, 1.0, 1.0, 1.0]);
        let half = s(&[0.0, 0.5, 0.0]);
        assert_eq!(series_compose(&geom, &half, 2).unwrap().coeffs(), &[1.0, 0.5, 0.25]);

        let e4 = exp_series(4);
        let sq = s(&[0.0, 0.0, 1.0, 0.0, 0.0]);
        let r = series_compose(&e4, &sq, 4).unwrap();
        assert_eq!(r.coeffs(), &[1.0, 0.0, 1.0, 0.0, 0.5]);

        assert_eq!(series_compose(&e, &s(&[0.5, 1.0]), 1), Err(Error::NonzeroConstantTerm(0.5)));
    }

    #[test]
    fn szasz_table_is_diagonal() {
        let k_max = 12;
        let t = brenke_table(&SeriesCoeffs::one(k_max), &exp_series(k_max), &SeriesCoeffs::identity(k_max), k_max).unwrap();
        let mut f = 1.0;
        for k in 0..=k_max {
            if k > 0 {
                f /= k as f64;
            }
            assert_eq!(t.row(k).len(), k + 1);
            for m in 0..=k {
                let want = if m == k { f } else { 0.0 };
                assert!((t.coeff(k, m) - want).abs() < 1e-16);
            }
        }
        assert!((eval_pi(&t, 3, 2.0).unwrap() - 8.0 / 6.0).abs() < 1e-15);
    }

    #[test]
    fn gould_hopper_row_two() {
        // a1 = e^{t^2}: 1, 0, 1, 0, 1/2
        let a1 = s(&[1.0, 0.0, 1.0, 0.0, 0.5]);
        let t = brenke_table(&a1, &exp_series(4), &SeriesCoeffs::identity(4), 4).unwrap();
        assert_eq!(t.coeff(2, 0), 1.0);
        assert_eq!(t.coeff(2, 1), 0.0);
        assert_eq!(t.coeff(2, 2), 0.5);
        assert_eq!(eval_pi(&t, 2, 0.0).unwrap(), 1.0);
    }

    #[test]
    fn miller_lee_row_one() {
        // (1 - t/2)^{-1} = Σ 2^{-j} t^j
        let a1 = SeriesCoeffs::from_fn(3, |j| 0.5f64.powi(j as i32)).unwrap();
        let t = brenke_table(&a1, &exp_series(3), &SeriesCoeffs::identity(3), 3).unwrap();
        assert_eq!(t.coeff(1, 0), 0.5);
        assert_eq!(t.coeff(1, 1), 1.0);
    }

    #[test]
    fn pi_zero_is_product_of_constants() {
        let a1 = s(&[2.5, 1.0, 1.0]);
        let a2 = s(&[3.0, 1.0, 1.0]);
        let h = s(&[0.0, 1.0, 0.25]);
        let t = brenke_table(&a1, &a2, &h, 2).unwrap();
        for y in [-3.0, 0.0, 7.0] {
            assert_eq!(eval_pi(&t, 0, y).unwrap(), 7.5);
        }
    }

    #[test]
    fn table_preconditions() {
        let e = exp_series(4);
        let id = SeriesCoeffs::identity(4);
        let err = brenke_table(&s(&[0.0, 1.0, 0.0, 0.0, 0.0]), &e, &id, 4).unwrap_err();
        assert_eq!(err, Error::Precondition { what: "a_{1,0} ≠ 0".into(), index: 0 });
        let err = brenke_table(&e, &e, &s(&[0.0, 0.0, 1.0]), 4).unwrap_err();
        assert!(matches!(err, Error::Precondition { index: 1, .. }));
        let err = brenke_table(&e, &e, &s(&[1.0, 1.0]), 4).unwrap_err();
        assert!(matches!(err, Error::Precondition { index: 0, .. }));
    }

    #[test]
    fn non_identity_h_matches_direct_expansion() {
        // h = t + t^2/4, A1 = 1/(1-t), A2 = e^t: check Σ π_k(x) t^k against
        // the closed form at a small t.
        let k_max = 40;
        let a1 = SeriesCoeffs::from_fn(k_max, |_| 1.0).unwrap();
        let h = s(&[0.0, 1.0, 0.25]);
        let table = brenke_table(&a1, &exp_series(k_max), &h, k_max).unwrap();
        let (x, t) = (0.7, 0.2f64);
        let sum: f64 = (0..=k_max).map(|k| eval_pi(&table, k, x).unwrap() * t.powi(k as i32)).sum();
        let ht = t + 0.25 * t * t;
        let want = 1.0 / (1.0 - ht) * (x * ht).exp();
        assert!((sum - want).abs() < 1e-13, "{sum} {want}");
        for k in 0..=k_max {
            assert_eq!(table.row(k).len(), k + 1);
        }
    }

    #[test]
    fn scaled_evaluation_matches_horner() {
        let a1 = s(&[1.0, 0.0, 1.0, 0.0, 0.5, 0.0, 1.0 / 6.0]);
        let t = brenke_table(&a1, &exp_series(6), &SeriesCoeffs::identity(6), 6).unwrap();
        for k in 0..=6 {
            for y in [0.0, 0.3, 2.0, 11.0] {
                let direct = eval_pi(&t, k, y).unwrap();
                let scaled = t.ln_pi(k, y).unwrap();
                let v = scaled.sign * scaled.ln_abs.exp();
                assert!((v - direct).abs() <= 1e-14 * direct.abs().max(1.0), "k={k} y={y}");
            }
        }
    }

    #[test]
    fn scaled_evaluation_survives_large_orders() {
        // Szász row 400 at y = 400: π = y^k / k! overflows in plain form.
        let k_max = 400;
        let a2_log = (0..=k_max).map(|m| LogCoeff::positive(-crate::special::ln_factorial(m as u64))).collect();
        let t = BrenkeTable::build(&SeriesCoeffs::one(k_max), a2_log, &SeriesCoeffs::identity(k_max), k_max).unwrap();
        let v = t.ln_pi(400, 400.0).unwrap();
        let want = 400.0 * 400f64.ln() - crate::special::ln_factorial(400);
        assert!((v.ln_abs - want).abs() < 1e-12);
        assert!(matches!(eval_pi(&t, 400, 400.0), Err(Error::Overflow(_))));
        assert!(eval_pi(&t, 100, 1.0).is_ok());
    }
}
