use std::cmp::Ordering;
use std::fmt::Write as _;

use brenke_core::bounds::{verify, BoundConfig, BoundReport};
use brenke_core::families::{validate, FamilySpec, StancuParams};
use brenke_core::functions::lookup;
use brenke_core::moments::moment_report_with;
use brenke_core::operator::{apply_weights, weights, WeightVector};

use crate::config::ExperimentConfig;
use crate::error::CliError;
use crate::output::{fmt_bool, fmt_num, CsvDoc};

pub const MOMENT_COLUMNS: [&str; 18] = [
    "family", "n", "x", "nu1", "nu2", "m0", "m1", "m2", "d1", "d2", "delta_n", "lambda_n", "mu_n", "m0_sum", "m1_sum",
    "m2_sum", "max_rel_gap", "status",
];

pub const CONVERGE_COLUMNS: [&str; 7] = ["family", "f", "nu1", "nu2", "n", "sup_err", "status"];

pub const BOUND_COLUMNS: [&str; 17] = [
    "family", "f", "nu1", "nu2", "n", "x", "err_emp", "b22", "b23", "b24", "b25", "dom22", "dom23", "dom24", "dom25",
    "c_thm25", "status",
];

/// Exit code and human-readable report of `validate`.
#[derive(Debug, Clone)]
pub struct Validation {
    pub code: i32,
    pub text: String,
}

pub fn cmd_validate(cfg: &ExperimentConfig) -> Validation {
    let fam = match cfg.family.build() {
        Ok(f) => f,
        Err(e) => return Validation { code: e.exit_code(), text: format!("family: {}\nerror: {e}\nverdict: FAIL", cfg.family.family) },
    };
    let n_max = *cfg.n_list.last().expect("n list is nonempty");
    let report = validate(&fam, fam.k_max(), cfg.x_max, n_max);
    Validation { code: if report.passed() { 0 } else { 1 }, text: report.to_string() }
}

/// Single-point `L_n f(x)` with the first configured Stancu pair.
pub fn cmd_eval(cfg: &ExperimentConfig, f_name: &str, n: u32, x: f64) -> Result<String, CliError> {
    let func = lookup(f_name).ok_or_else(|| CliError::Usage(format!("unregistered function `{f_name}`")))?;
    let fam = cfg.family.build()?;
    let s = cfg.stancu.first().copied().unwrap_or(StancuParams::ZERO);
    let wv = weights(&fam, n, x, &cfg.policy()?)?;
    let v = apply_weights(&wv, func.eval, s)?;
    Ok(format!("{v:.12}\nk_used = {}\nmass = {}\n", wv.k_used, fmt_num(wv.mass)))
}

type WeightCell = (u32, f64, Result<WeightVector, String>);

fn weight_grid(fam: &FamilySpec, cfg: &ExperimentConfig) -> Result<Vec<WeightCell>, CliError> {
    let policy = cfg.policy()?;
    let mut out = Vec::new();
    for &n in &cfg.n_list {
        for x in cfg.x_grid() {
            out.push((n, x, weights(fam, n, x, &policy).map_err(|e| e.to_string())));
        }
    }
    Ok(out)
}

fn cmp_f(a: f64, b: f64) -> Ordering {
    a.total_cmp(&b)
}

pub fn cmd_moments(cfg: &ExperimentConfig) -> Result<String, CliError> {
    let fam = cfg.family.build()?;
    let grid = weight_grid(&fam, cfg)?;
    let mut rows = Vec::new();
    for s in &cfg.stancu {
        for (n, x, wv) in &grid {
            let report = wv.as_ref().map_err(Clone::clone).and_then(|wv| moment_report_with(&fam, wv, *s).map_err(|e| e.to_string()));
            rows.push((*s, *n, *x, report));
        }
    }
    rows.sort_by(|a, b| {
        cmp_f(a.0.nu1, b.0.nu1).then(cmp_f(a.0.nu2, b.0.nu2)).then(a.1.cmp(&b.1)).then(cmp_f(a.2, b.2))
    });

    let mut doc = CsvDoc::new(&MOMENT_COLUMNS)?;
    for (s, n, x, report) in rows {
        let mut fields = vec![fam.name().to_string(), n.to_string(), fmt_num(x), fmt_num(s.nu1), fmt_num(s.nu2)];
        match report {
            Ok(r) => {
                fields.extend(
                    [r.m0, r.m1, r.m2, r.d1, r.d2, r.delta_n, r.lambda_n, r.mu_n, r.m0_sum, r.m1_sum, r.m2_sum, r.max_rel_gap]
                        .map(fmt_num),
                );
                fields.push("ok".into());
            }
            Err(e) => {
                fields.extend(std::iter::repeat_n("nan".to_string(), 12));
                fields.push(e);
            }
        }
        doc.row(fields)?;
    }
    doc.finish()
}

pub fn cmd_converge(cfg: &ExperimentConfig) -> Result<String, CliError> {
    let fam = cfg.family.build()?;
    let grid = weight_grid(&fam, cfg)?;
    let mut rows = Vec::new();
    for func in cfg.test_functions() {
        for s in &cfg.stancu {
            for &n in &cfg.n_list {
                let mut sup = 0.0f64;
                let mut status = None;
                for (_, x, wv) in grid.iter().filter(|g| g.0 == n) {
                    let err = wv
                        .as_ref()
                        .map_err(Clone::clone)
                        .and_then(|wv| apply_weights(wv, func.eval, *s).map_err(|e| e.to_string()))
                        .map(|v| (v - func.eval(*x)).abs());
                    match err {
                        Ok(e) => sup = sup.max(e),
                        Err(e) => {
                            status.get_or_insert(format!("x = {}: {e}", fmt_num(*x)));
                        }
                    }
                }
                rows.push((func.name, *s, n, if status.is_some() { f64::NAN } else { sup }, status));
            }
        }
    }
    rows.sort_by(|a, b| {
        a.0.cmp(b.0).then(cmp_f(a.1.nu1, b.1.nu1)).then(cmp_f(a.1.nu2, b.1.nu2)).then(a.2.cmp(&b.2))
    });

    let mut doc = CsvDoc::new(&CONVERGE_COLUMNS)?;
    for (f, s, n, sup, status) in rows {
        doc.row([
            fam.name().to_string(),
            f.to_string(),
            fmt_num(s.nu1),
            fmt_num(s.nu2),
            n.to_string(),
            fmt_num(sup),
            status.unwrap_or_else(|| "ok".into()),
        ])?;
    }
    doc.finish()
}

pub fn bound_config(cfg: &ExperimentConfig) -> Result<BoundConfig, CliError> {
    Ok(BoundConfig { t_max: cfg.t_max, step: cfg.step, c_second: cfg.c_thm25, policy: cfg.policy()?, ..BoundConfig::default() })
}

/// Bound sweep, one worker thread per test function.
pub fn bound_reports(cfg: &ExperimentConfig) -> Result<Vec<BoundReport>, CliError> {
    let fam = [cfg.family.build()?];
    let bcfg = bound_config(cfg)?;
    let x_grid = cfg.x_grid();
    let funcs = cfg.test_functions();
    let parts: Vec<_> = std::thread::scope(|scope| {
        let handles: Vec<_> = funcs
            .iter()
            .map(|f| {
                let (fam, bcfg, x_grid) = (&fam, &bcfg, &x_grid);
                scope.spawn(move || verify(fam, &[*f], &cfg.n_list, x_grid, &cfg.stancu, bcfg))
            })
            .collect();
        handles.into_iter().map(|h| h.join().expect("bound worker panicked")).collect()
    });
    let mut rows = Vec::new();
    for p in parts {
        rows.extend(p?);
    }
    rows.sort_by(|a, b| {
        a.family
            .cmp(&b.family)
            .then(a.f_name.cmp(&b.f_name))
            .then(cmp_f(a.s.nu1, b.s.nu1))
            .then(cmp_f(a.s.nu2, b.s.nu2))
            .then(a.n.cmp(&b.n))
            .then(cmp_f(a.x, b.x))
    });
    Ok(rows)
}

pub fn cmd_bounds(cfg: &ExperimentConfig) -> Result<String, CliError> {
    let mut doc = CsvDoc::new(&BOUND_COLUMNS)?;
    for r in bound_reports(cfg)? {
        let mut fields = vec![r.family.clone(), r.f_name.clone(), fmt_num(r.s.nu1), fmt_num(r.s.nu2), r.n.to_string(), fmt_num(r.x)];
        fields.extend([r.err_emp, r.b_modulus, r.b_holder, r.b_k_functional, r.b_second_modulus].map(fmt_num));
        fields.extend([r.dom_modulus, r.dom_holder, r.dom_k_functional, r.dom_second_modulus].map(|b| fmt_bool(b).to_string()));
        fields.push(fmt_num(r.c_second));
        let mut status = r.status.clone().unwrap_or_else(|| "ok".into());
        if r.status.is_none() && r.lambda_clamped {
            status = "ok; lambda_n clamped to 0".into();
        }
        fields.push(status);
        doc.row(fields)?;
    }
    doc.finish()
}

/// Summary appended to stderr by the binary.
pub fn bound_summary(csv: &str) -> String {
    let mut counts = [0usize; 4];
    let mut rows = 0;
    for line in csv.lines().skip(1) {
        rows += 1;
        let cols: Vec<&str> = line.split(',').collect();
        for (i, c) in counts.iter_mut().enumerate() {
            if cols.get(11 + i) == Some(&"true") {
                *c += 1;
            }
        }
    }
    let mut s = String::new();
    let _ = write!(s, "{rows} rows; dominated: b22 {}, b23 {}, b24 {}, b25 {}", counts[0], counts[1], counts[2], counts[3]);
    s
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::config::FamilyBlock;

    fn szasz() -> ExperimentConfig {
        ExperimentConfig::with_family(FamilyBlock::named("szasz"))
    }

    #[test]
    fn eval_examples() {
        let c = szasz();
        let value = |f: &str| cmd_eval(&c, f, 10, 1.0).unwrap().lines().next().unwrap().parse::<f64>().unwrap();
        // truncation leaves up to eps_tail of mass behind
        assert!((value("one") - 1.0).abs() <= 1e-11);
        assert!((value("t2") - 1.1).abs() <= 1e-10);
        let text = cmd_eval(&c, "one", 10, 1.0).unwrap();
        assert!(text.contains("k_used = ") && text.contains("mass = "));
        assert!(matches!(cmd_eval(&c, "cube", 10, 1.0), Err(CliError::Usage(_))));
        assert!(matches!(cmd_eval(&c, "one", 0, 1.0), Err(CliError::Domain(_))));
    }

    #[test]
    fn moment_rows() {
        let mut c = szasz();
        c.n_list = vec![4];
        c.x_max = 1.0;
        c.x_count = 2;
        let csv = cmd_moments(&c).unwrap();
        let lines: Vec<&str> = csv.lines().collect();
        assert_eq!(lines[0], MOMENT_COLUMNS.join(","));
        assert!(lines[1].starts_with("szasz,4,0,0,0,1,0,0,0,0,"));
        let cols: Vec<&str> = lines[2].split(',').collect();
        assert_eq!((cols[5], cols[6], cols[9]), ("1", "1", "0.25"));
        assert_eq!(cols[17], "ok");
    }

    #[test]
    fn converge_szasz_t2() {
        let mut c = szasz();
        c.functions = vec!["t2".into(), "one".into()];
        c.n_list = vec![2, 8];
        let csv = cmd_converge(&c).unwrap();
        let lines: Vec<&str> = csv.lines().collect();
        let one: Vec<&str> = lines[1].split(',').collect();
        assert_eq!((one[1], one[4], one[6]), ("one", "2", "ok"));
        assert!(one[5].parse::<f64>().unwrap() <= 1e-11);
        let t2_8: Vec<&str> = lines[4].split(',').collect();
        assert_eq!((t2_8[1], t2_8[4]), ("t2", "8"));
        assert!((t2_8[5].parse::<f64>().unwrap() - 0.25).abs() < 1e-10);
    }

    #[test]
    fn bounds_rows() {
        let mut c = szasz();
        c.functions = vec!["t2".into(), "id".into()];
        c.n_list = vec![16];
        c.x_count = 3;
        let csv = cmd_bounds(&c).unwrap();
        let lines: Vec<&str> = csv.lines().collect();
        assert_eq!(lines[0], BOUND_COLUMNS.join(","));
        assert_eq!(lines.len(), 7);
        assert!(lines[1].starts_with("szasz,id,"));
        let t2_x1: Vec<&str> = lines[5].split(',').collect();
        assert_eq!((t2_x1[1], t2_x1[5]), ("t2", "1"));
        assert!((t2_x1[6].parse::<f64>().unwrap() - 0.0625).abs() < 1e-11);
        assert!(bound_summary(&csv).starts_with("6 rows"));
    }

    #[test]
    fn validate_exit_codes() {
        assert_eq!(cmd_validate(&szasz()).code, 0);
        let mut gh = FamilyBlock::named("gould_hopper");
        gh.b = Some(-1.0);
        gh.d = Some(1);
        let v = cmd_validate(&ExperimentConfig::with_family(gh));
        assert_eq!(v.code, 1);
        assert!(v.text.contains("b < 0"));
    }
}
