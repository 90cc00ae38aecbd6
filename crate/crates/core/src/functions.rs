//! Registered test functions.
//!
//! Each carries closed-form moduli on a window `[0, T]`. These are exact or
//! upper bounds of the true moduli, never grid estimates, so bound checks
//! built on them are sound.

use std::f64::consts::PI;

/// Lipschitz pair `(α, M)` with `|f(a) − f(b)| ≤ M |a − b|^α`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Lipschitz {
    pub alpha: f64,
    pub m: f64,
}

#[derive(Debug, Clone, Copy)]
pub struct TestFunction {
    pub name: &'static str,
    pub eval: fn(f64) -> f64,
    omega: fn(f64, f64) -> f64,
    omega2: fn(f64, f64) -> f64,
    lipschitz: fn(f64) -> Lipschitz,
}

impl TestFunction {
    pub fn eval(&self, t: f64) -> f64 {
        (self.eval)(t)
    }

    /// Modulus of continuity `ω(f; δ)` on `[0, t_max]`.
    pub fn omega(&self, delta: f64, t_max: f64) -> f64 {
        if delta <= 0.0 {
            return 0.0;
        }
        (self.omega)(delta, t_max)
    }

    /// Second modulus `ω₂(f; δ)` on `[0, t_max]`.
    pub fn omega2(&self, delta: f64, t_max: f64) -> f64 {
        if delta <= 0.0 {
            return 0.0;
        }
        (self.omega2)(delta, t_max)
    }

    /// Hölder pair valid on `[0, t_max]` (global unless noted).
    pub fn lipschitz(&self, t_max: f64) -> Lipschitz {
        (self.lipschitz)(t_max)
    }
}

fn zero(_: f64, _: f64) -> f64 {
    0.0
}

const LIP1: fn(f64) -> Lipschitz = |_| Lipschitz { alpha: 1.0, m: 1.0 };

static REGISTRY: [TestFunction; 7] = [
    TestFunction {
        name: "one",
        eval: |_| 1.0,
        omega: zero,
        omega2: zero,
        lipschitz: |_| Lipschitz { alpha: 1.0, m: 0.0 },
    },
    TestFunction { name: "id", eval: |t| t, omega: |d, _| d, omega2: zero, lipschitz: LIP1 },
    TestFunction {
        name: "t2",
        eval: |t| t * t,
        // sup |a² − b²| over |a − b| ≤ δ in [0, T], attained at b = T
        omega: |d, tm| {
            let d = d.min(tm);
            d * (2.0 * tm - d)
        },
        omega2: |d, tm| {
            let d = d.min(tm / 2.0);
            2.0 * d * d
        },
        lipschitz: |tm| Lipschitz { alpha: 1.0, m: 2.0 * tm },
    },
    TestFunction {
        name: "expneg",
        eval: |t| (-t).exp(),
        omega: |d, _| -(-d).exp_m1(),
        omega2: |d, _| {
            let v = -(-d).exp_m1();
            v * v
        },
        lipschitz: LIP1,
    },
    TestFunction {
        name: "sint",
        eval: f64::sin,
        omega: |d, _| 2.0 * (d.min(PI) / 2.0).sin(),
        omega2: |d, _| {
            let s = (d.min(PI) / 2.0).sin();
            4.0 * s * s
        },
        lipschitz: LIP1,
    },
    TestFunction {
        name: "kink",
        eval: |t| (t - 1.0).abs(),
        omega: |d, _| d,
        omega2: |d, _| 2.0 * d.min(1.0),
        lipschitz: LIP1,
    },
    TestFunction {
        name: "sqrtt",
        eval: |t| t.max(0.0).sqrt(),
        omega: |d, _| d.sqrt(),
        omega2: |d, _| (2.0 - std::f64::consts::SQRT_2) * d.sqrt(),
        lipschitz: |_| Lipschitz { alpha: 0.5, m: 1.0 },
    },
];

/// All registered functions, in a fixed order.
pub fn registered() -> &'static [TestFunction] {
    &REGISTRY
}

pub fn lookup(name: &str) -> Option<&'static TestFunction> {
    REGISTRY.iter().find(|f| f.name == name)
}

#[cfg(test)]
mod tests {
    use super::*;

    /// Dense-grid sup of |f(a) − f(b)| over |a − b| ≤ δ on [0, T].
    fn grid_omega(f: &TestFunction, delta: f64, t_max: f64) -> f64 {
        let n = 2000;
        let h = t_max / n as f64;
        let span = (delta / h).round() as usize;
        let mut best = 0.0f64;
        for i in 0..=n {
            for j in i..=(i + span).min(n) {
                best = best.max((f.eval(i as f64 * h) - f.eval(j as f64 * h)).abs());
            }
        }
        best
    }

    fn grid_omega2(f: &TestFunction, delta: f64, t_max: f64) -> f64 {
        let n = 800;
        let h = t_max / n as f64;
        let span = (delta / h).round() as usize;
        let mut best = 0.0f64;
        for j in 1..=span {
            for i in 0..=n {
                if i + 2 * j > n {
                    break;
                }
                let t = i as f64 * h;
                let step = j as f64 * h;
                best = best.max((f.eval(t + 2.0 * step) - 2.0 * f.eval(t + step) + f.eval(t)).abs());
            }
        }
        best
    }

    #[test]
    fn closed_forms_dominate_dense_grids() {
        let t_max = 4.0;
        for f in registered() {
            for delta in [0.01, 0.1, 0.5, 1.3] {
                let g = grid_omega(f, delta, t_max);
                let c = f.omega(delta, t_max);
                assert!(c >= g - 1e-12, "{} omega({delta}): closed {c} < grid {g}", f.name);
                let g2 = grid_omega2(f, delta, t_max);
                let c2 = f.omega2(delta, t_max);
                assert!(c2 >= g2 - 1e-12, "{} omega2({delta}): closed {c2} < grid {g2}", f.name);
            }
        }
    }

    #[test]
    fn closed_forms_are_tight_where_exact() {
        let t_max = 4.0;
        for name in ["id", "t2", "expneg", "kink", "sqrtt"] {
            let f = lookup(name).unwrap();
            for delta in [0.1, 0.5] {
                let g = grid_omega(f, delta, t_max);
                assert!((f.omega(delta, t_max) - g).abs() < 1e-9, "{name} {delta}");
            }
        }
        assert_eq!(lookup("t2").unwrap().omega(0.25, 2.0), 0.9375);
        assert_eq!(lookup("t2").unwrap().omega2(0.3, 4.0), 2.0 * 0.3 * 0.3);
        assert_eq!(lookup("kink").unwrap().omega2(0.25, 2.0), 0.5);
    }

    #[test]
    fn lipschitz_pairs_hold_on_grid() {
        let t_max = 4.0;
        let n = 600;
        for f in registered() {
            let l = f.lipschitz(t_max);
            for i in 0..=n {
                for j in i + 1..=n {
                    let (a, b) = (i as f64 * t_max / n as f64, j as f64 * t_max / n as f64);
                    let lhs = (f.eval(a) - f.eval(b)).abs();
                    assert!(lhs <= l.m * (b - a).powf(l.alpha) + 1e-12, "{} at {a}, {b}", f.name);
                }
            }
        }
    }

    #[test]
    fn registry_names() {
        let names: Vec<_> = registered().iter().map(|f| f.name).collect();
        assert_eq!(names, ["one", "id", "t2", "expneg", "sint", "kink", "sqrtt"]);
        assert!(lookup("nope").is_none());
    }
}
