//! Experiment configuration: flat `key = value` text grouped under
//! `[section]` headers. Lists are bracketed and comma separated.
//!
//! ```text
//! [family]
//! family = gould_hopper
//! b = 1
//! d = 1
//!
//! [grid]
//! n = [1, 2, 4, 8]
//! x_min = 0
//! x_max = 2
//! x_count = 9
//! ```

use std::collections::BTreeMap;
use std::fmt::Write as _;
use std::path::{Path, PathBuf};

use brenke_core::families::{
    make_appell, make_custom, make_gould_hopper, make_miller_lee, make_szasz, FamilySpec, SeriesKind, StancuParams,
    DEFAULT_K_MAX,
};
use brenke_core::functions::{lookup, TestFunction};
use brenke_core::smoothness::{DEFAULT_STEP, DEFAULT_T_MAX};
use brenke_core::TruncationPolicy;

use crate::error::CliError;

const FAMILIES: [&str; 5] = ["szasz", "appell", "gould_hopper", "miller_lee", "custom"];

#[derive(Debug, Clone, PartialEq)]
pub struct FamilyBlock {
    pub family: String,
    pub b: Option<f64>,
    pub d: Option<u32>,
    pub m: Option<f64>,
    pub a1: Option<SeriesKind>,
    pub a2: Option<SeriesKind>,
    pub h: Option<SeriesKind>,
    pub k_max: Option<usize>,
}

impl FamilyBlock {
    pub fn named(family: &str) -> Self {
        Self { family: family.to_string(), b: None, d: None, m: None, a1: None, a2: None, h: None, k_max: None }
    }

    /// Builds the family. Parameter errors from the library (such as a
    /// negative `b` or a vanishing `a_{1,0}`) surface as domain errors.
    pub fn build(&self) -> Result<FamilySpec, CliError> {
        let missing = |key: &str| CliError::Config(format!("family `{}` requires `{key}`", self.family));
        let fam = match self.family.as_str() {
            "szasz" => make_szasz(),
            "appell" => make_appell(self.a1.clone().ok_or_else(|| missing("a1"))?)?,
            "gould_hopper" => make_gould_hopper(self.b.ok_or_else(|| missing("b"))?, self.d.ok_or_else(|| missing("d"))?)?,
            "miller_lee" => make_miller_lee(self.m.ok_or_else(|| missing("m"))?)?,
            "custom" => make_custom(
                self.a1.clone().ok_or_else(|| missing("a1"))?,
                self.a2.clone().unwrap_or(SeriesKind::Exp),
                self.h.clone().unwrap_or(SeriesKind::Identity),
                self.k_max.unwrap_or(DEFAULT_K_MAX),
            )?,
            other => return Err(CliError::Config(format!("unknown family `{other}`"))),
        };
        match self.k_max {
            Some(k) if k != fam.k_max() => Ok(fam.with_k_max(k)?),
            _ => Ok(fam),
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct ExperimentConfig {
    pub family: FamilyBlock,
    pub stancu: Vec<StancuParams>,
    pub n_list: Vec<u32>,
    pub x_min: f64,
    pub x_max: f64,
    pub x_count: usize,
    pub functions: Vec<String>,
    pub t_max: f64,
    pub step: f64,
    pub eps_tail: f64,
    pub k_hard_cap: usize,
    pub c_thm25: f64,
    pub output_path: Option<PathBuf>,
}

impl ExperimentConfig {
    pub fn with_family(family: FamilyBlock) -> Self {
        let policy = TruncationPolicy::default();
        Self {
            family,
            stancu: vec![StancuParams::ZERO],
            n_list: vec![1, 2, 4, 8, 16],
            x_min: 0.0,
            x_max: 2.0,
            x_count: 9,
            functions: vec!["one".into(), "id".into(), "t2".into()],
            t_max: DEFAULT_T_MAX,
            step: DEFAULT_STEP,
            eps_tail: policy.eps_tail,
            k_hard_cap: policy.k_hard_cap,
            c_thm25: 4.0,
            output_path: None,
        }
    }

    pub fn load(path: &Path) -> Result<Self, CliError> {
        let text = std::fs::read_to_string(path)
            .map_err(|e| CliError::Config(format!("cannot read {}: {e}", path.display())))?;
        Self::parse(&text)
    }

    pub fn parse(text: &str) -> Result<Self, CliError> {
        let raw = parse_sections(text)?;
        let mut cfg = Self::with_family(FamilyBlock::named("szasz"));
        let mut seen_family = false;
        let mut nu1: Option<Vec<f64>> = None;
        let mut nu2: Option<Vec<f64>> = None;

        for ((section, key), (line, value)) in &raw {
            let at = |msg: String| CliError::Config(format!("line {line}: {msg}"));
            let num = || parse_f64(value).map_err(&at);
            match (section.as_str(), key.as_str()) {
                ("family", "family") => {
                    if !FAMILIES.contains(&value.as_str()) {
                        return Err(at(format!("unknown family `{value}`")));
                    }
                    cfg.family.family = value.clone();
                    seen_family = true;
                }
                ("family", "b") => cfg.family.b = Some(num()?),
                ("family", "d") => cfg.family.d = Some(parse_int(value).map_err(&at)?),
                ("family", "m") => cfg.family.m = Some(num()?),
                ("family", "a1") => cfg.family.a1 = Some(parse_series(value).map_err(&at)?),
                ("family", "a2") => cfg.family.a2 = Some(parse_series(value).map_err(&at)?),
                ("family", "h") => cfg.family.h = Some(parse_series(value).map_err(&at)?),
                ("family", "k_max") => cfg.family.k_max = Some(parse_int(value).map_err(&at)?),
                ("stancu", "nu1") => nu1 = Some(parse_list(value, parse_f64).map_err(&at)?),
                ("stancu", "nu2") => nu2 = Some(parse_list(value, parse_f64).map_err(&at)?),
                ("grid", "n") => cfg.n_list = parse_list(value, parse_int).map_err(&at)?,
                ("grid", "x_min") => cfg.x_min = num()?,
                ("grid", "x_max") => cfg.x_max = num()?,
                ("grid", "x_count") => cfg.x_count = parse_int(value).map_err(&at)?,
                ("functions", "names") => cfg.functions = parse_list(value, |s| Ok(s.to_string())).map_err(&at)?,
                ("window", "t_max") => cfg.t_max = num()?,
                ("window", "step") => cfg.step = num()?,
                ("truncation", "eps_tail") => cfg.eps_tail = num()?,
                ("truncation", "k_hard_cap") => cfg.k_hard_cap = parse_int(value).map_err(&at)?,
                ("bounds", "c_thm25") => cfg.c_thm25 = num()?,
                ("output", "path") => cfg.output_path = Some(PathBuf::from(value)),
                _ => return Err(at(format!("unknown key `{key}` in section [{section}]"))),
            }
        }
        if !seen_family {
            return Err(CliError::Config("missing `family` in section [family]".into()));
        }
        match (nu1, nu2) {
            (None, None) => {}
            (Some(a), Some(b)) if a.len() == b.len() && !a.is_empty() => {
                cfg.stancu = a
                    .iter()
                    .zip(&b)
                    .map(|(&p, &q)| StancuParams::new(p, q).map_err(|e| CliError::Config(e.to_string())))
                    .collect::<Result<_, _>>()?;
            }
            _ => return Err(CliError::Config("[stancu] nu1 and nu2 must be nonempty lists of equal length".into())),
        }
        cfg.check()?;
        Ok(cfg)
    }

    fn check(&self) -> Result<(), CliError> {
        let bad = |m: &str| Err(CliError::Config(m.to_string()));
        if self.n_list.is_empty() || self.n_list[0] < 1 || self.n_list.windows(2).any(|w| w[0] >= w[1]) {
            return bad("n list must be nonempty, >= 1 and strictly ascending");
        }
        if self.x_count < 2 {
            return bad("x_count must be >= 2");
        }
        if !(self.x_min >= 0.0 && self.x_min <= self.x_max && self.x_max.is_finite()) {
            return bad("x grid needs 0 <= x_min <= x_max < inf");
        }
        if let Some(f) = self.functions.iter().find(|f| lookup(f).is_none()) {
            return Err(CliError::Config(format!("unregistered function `{f}`")));
        }
        if !(self.t_max > 0.0 && self.step > 0.0 && self.step < self.t_max) {
            return bad("window needs t_max > step > 0");
        }
        if !(self.c_thm25 > 0.0) {
            return bad("c_thm25 must be > 0");
        }
        self.policy()?;
        Ok(())
    }

    pub fn policy(&self) -> Result<TruncationPolicy, CliError> {
        TruncationPolicy::new(self.eps_tail, self.k_hard_cap).map_err(|e| CliError::Config(e.to_string()))
    }

    pub fn x_grid(&self) -> Vec<f64> {
        let span = self.x_max - self.x_min;
        let last = (self.x_count - 1) as f64;
        (0..self.x_count).map(|i| self.x_min + span * i as f64 / last).collect()
    }

    pub fn test_functions(&self) -> Vec<&'static TestFunction> {
        self.functions.iter().filter_map(|f| lookup(f)).collect()
    }

    /// Canonical text that parses back to an equal config.
    pub fn to_text(&self) -> String {
        let mut s = String::new();
        let fb = &self.family;
        let _ = writeln!(s, "[family]\nfamily = {}", fb.family);
        if let Some(b) = fb.b {
            let _ = writeln!(s, "b = {b}");
        }
        if let Some(d) = fb.d {
            let _ = writeln!(s, "d = {d}");
        }
        if let Some(m) = fb.m {
            let _ = writeln!(s, "m = {m}");
        }
        for (key, v) in [("a1", &fb.a1), ("a2", &fb.a2), ("h", &fb.h)] {
            if let Some(v) = v {
                let _ = writeln!(s, "{key} = {}", series_text(v));
            }
        }
        if let Some(k) = fb.k_max {
            let _ = writeln!(s, "k_max = {k}");
        }
        let nu1: Vec<f64> = self.stancu.iter().map(|p| p.nu1).collect();
        let nu2: Vec<f64> = self.stancu.iter().map(|p| p.nu2).collect();
        let _ = writeln!(s, "\n[stancu]\nnu1 = {}\nnu2 = {}", list_text(&nu1), list_text(&nu2));
        let _ = writeln!(
            s,
            "\n[grid]\nn = {}\nx_min = {}\nx_max = {}\nx_count = {}",
            list_text(&self.n_list),
            self.x_min,
            self.x_max,
            self.x_count
        );
        let _ = writeln!(s, "\n[functions]\nnames = {}", list_text(&self.functions));
        let _ = writeln!(s, "\n[window]\nt_max = {}\nstep = {}", self.t_max, self.step);
        let _ = writeln!(s, "\n[truncation]\neps_tail = {}\nk_hard_cap = {}", self.eps_tail, self.k_hard_cap);
        let _ = writeln!(s, "\n[bounds]\nc_thm25 = {}", self.c_thm25);
        if let Some(p) = &self.output_path {
            let _ = writeln!(s, "\n[output]\npath = {}", p.display());
        }
        s
    }
}

type RawEntries = BTreeMap<(String, String), (usize, String)>;

fn parse_sections(text: &str) -> Result<RawEntries, CliError> {
    let mut out = RawEntries::new();
    let mut section: Option<String> = None;
    for (i, raw) in text.lines().enumerate() {
        let line = i + 1;
        let l = raw.split('#').next().unwrap_or("").trim();
        if l.is_empty() {
            continue;
        }
        if let Some(name) = l.strip_prefix('[').and_then(|r| r.strip_suffix(']')) {
            let name = name.trim();
            if !["family", "stancu", "grid", "functions", "window", "truncation", "bounds", "output"].contains(&name) {
                return Err(CliError::Config(format!("line {line}: unknown section [{name}]")));
            }
            section = Some(name.to_string());
            continue;
        }
        let Some((k, v)) = l.split_once('=') else {
            return Err(CliError::Config(format!("line {line}: expected `key = value`, got `{l}`")));
        };
        let Some(sec) = &section else {
            return Err(CliError::Config(format!("line {line}: key outside of any section")));
        };
        let key = (sec.clone(), k.trim().to_string());
        if out.contains_key(&key) {
            return Err(CliError::Config(format!("line {line}: duplicate key `{}`", key.1)));
        }
        out.insert(key, (line, v.trim().to_string()));
    }
    Ok(out)
}

fn parse_f64(s: &str) -> Result<f64, String> {
    let v: f64 = s.trim().parse().map_err(|_| format!("expected a number, got `{s}`"))?;
    if !v.is_finite() {
        return Err(format!("expected a finite number, got `{s}`"));
    }
    Ok(v)
}

fn parse_int<T: std::str::FromStr>(s: &str) -> Result<T, String> {
    s.trim().parse().map_err(|_| format!("expected a nonnegative integer, got `{s}`"))
}

fn parse_list<T>(s: &str, item: impl Fn(&str) -> Result<T, String>) -> Result<Vec<T>, String> {
    let inner = s
        .trim()
        .strip_prefix('[')
        .and_then(|r| r.strip_suffix(']'))
        .ok_or_else(|| format!("expected a bracketed list, got `{s}`"))?;
    if inner.trim().is_empty() {
        return Ok(Vec::new());
    }
    inner.split(',').map(|p| item(p.trim())).collect()
}

fn parse_series(s: &str) -> Result<SeriesKind, String> {
    match s.trim() {
        "exp" => Ok(SeriesKind::Exp),
        "geometric" => Ok(SeriesKind::Geometric),
        "identity" => Ok(SeriesKind::Identity),
        t if t.starts_with('[') => {
            let c = parse_list(t, parse_f64)?;
            if c.is_empty() {
                return Err("coefficient list is empty".into());
            }
            Ok(SeriesKind::Explicit(c))
        }
        other => Err(format!("expected exp, geometric, identity or a coefficient list, got `{other}`")),
    }
}

fn series_text(s: &SeriesKind) -> String {
    match s {
        SeriesKind::Explicit(c) => list_text(c),
        other => other.to_string(),
    }
}

fn list_text<T: std::fmt::Display>(v: &[T]) -> String {
    let items: Vec<String> = v.iter().map(|x| x.to_string()).collect();
    format!("[{}]", items.join(", "))
}
