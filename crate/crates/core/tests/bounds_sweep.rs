use brenke_core::bounds::{verify, BoundConfig, BoundReport};
use brenke_core::families::{make_appell, make_gould_hopper, make_miller_lee, make_szasz, SeriesKind, StancuParams};
use brenke_core::functions::registered;
use brenke_core::moments::central_moments;

fn bounds(r: &BoundReport) -> [f64; 4] {
    [r.b_modulus, r.b_holder, r.b_k_functional, r.b_second_modulus]
}

/// Bounds shrink from n = 4 to n = 256 at fixed x > 0, except where a bound
/// is identically zero (constant f, or `f = t` where ω₂ and Δ1 both vanish).
#[test]
fn bounds_decay_with_n() {
    let fams = [
        make_szasz(),
        make_appell(SeriesKind::Exp).unwrap().with_k_max(1000).unwrap(),
        make_gould_hopper(1.0, 1).unwrap(),
        make_miller_lee(0.5).unwrap(),
    ];
    let funcs: Vec<_> = registered().iter().filter(|f| f.name != "one").collect();
    let s = [StancuParams::ZERO, StancuParams::new(1.0, 2.0).unwrap()];
    let rows = verify(&fams, &funcs, &[4, 256], &[0.5, 1.0, 2.0], &s, &BoundConfig::default()).unwrap();
    assert!(rows.iter().all(|r| r.status.is_none()));
    for small in rows.iter().filter(|r| r.n == 4) {
        let large = rows
            .iter()
            .find(|r| r.n == 256 && r.family == small.family && r.f_name == small.f_name && r.s == small.s && r.x == small.x)
            .unwrap();
        for (i, (a, b)) in bounds(small).iter().zip(bounds(large)).enumerate() {
            if *a <= 1e-12 && b <= 1e-12 {
                continue;
            }
            assert!(b < *a, "{} {} x={} nu={:?} bound {i}: n=4 {a}, n=256 {b}", small.family, small.f_name, small.x, small.s);
        }
    }
}

#[test]
fn delta_shrinks_by_factor_four_in_n() {
    for f in [make_szasz(), make_gould_hopper(1.0, 1).unwrap(), make_miller_lee(2.0).unwrap()] {
        for i in 1..=16 {
            let x = i as f64 * 0.25;
            let mut prev = f64::INFINITY;
            for n in [4u32, 16, 64, 256] {
                let (_, d2) = central_moments(&f, n, x, StancuParams::ZERO).unwrap();
                let delta = d2.sqrt();
                assert!(delta < prev, "{} x={x} n={n}", f.name());
                prev = delta;
            }
        }
    }
}

#[test]
fn constant_rows_are_trivially_dominated() {
    let one: Vec<_> = registered().iter().filter(|f| f.name == "one").collect();
    let rows = verify(&[make_miller_lee(0.0).unwrap()], &one, &[1, 8, 64], &[0.0, 1.0, 3.0], &[StancuParams::ZERO], &BoundConfig::default())
        .unwrap();
    for r in rows {
        assert!(bounds(&r).iter().all(|&b| b >= 0.0));
        assert!(r.dom_modulus && r.dom_holder && r.dom_k_functional && r.dom_second_modulus);
    }
}
