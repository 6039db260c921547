//! Catalog files and the check runner behind `squeeze check`.

use std::collections::BTreeSet;
use std::path::{Path, PathBuf};

use serde::{Deserialize, Serialize};
use squeeze_core::gradedlc::{
    colimit_data, local_cohomology, long_exact_sequence_failures, radical_invariance_check,
    torsion_dims,
};
use squeeze_core::kgmod::GroupAlgebra;
use squeeze_core::permgrp::is_p_nilpotent;
use squeeze_core::squeeze::{
    anderson_tate_check, norm_map, LeftTraceRecord, NormVerdict, RightTraceRecord,
};
use squeeze_core::{BettiTable, Exec, GroupSpec, Window};

use crate::cache::Cache;
use crate::commands::{close_group, load_module, Session};
use crate::failure::Failure;

#[derive(Clone, Debug, Deserialize)]
pub struct Catalog {
    pub entries: Vec<CatalogEntry>,
    #[serde(default)]
    pub modules: Vec<ModuleEntry>,
}

#[derive(Clone, Debug, Deserialize)]
pub struct CatalogEntry {
    pub name: String,
    pub group: GroupSpec,
    pub primes: Vec<u32>,
    #[serde(default)]
    pub expected: Vec<Expected>,
}

/// A hard expected result, tagged with where the numbers come from.
#[derive(Clone, Debug, Deserialize)]
#[serde(tag = "kind", rename_all = "kebab-case")]
pub enum Expected {
    Loops {
        prime: u32,
        window: String,
        dims: Vec<usize>,
        source: String,
    },
    Tate {
        prime: u32,
        window: String,
        dims: Vec<usize>,
        source: String,
    },
    TateClassical {
        prime: u32,
        window: String,
        dims: Vec<usize>,
        source: String,
    },
    Norm {
        prime: u32,
        verdict: NormVerdict,
        source: String,
    },
}

impl Expected {
    fn prime(&self) -> u32 {
        match self {
            Expected::Loops { prime, .. }
            | Expected::Tate { prime, .. }
            | Expected::TateClassical { prime, .. }
            | Expected::Norm { prime, .. } => *prime,
        }
    }

    fn kind(&self) -> &'static str {
        match self {
            Expected::Loops { .. } => "loops",
            Expected::Tate { .. } => "tate",
            Expected::TateClassical { .. } => "tate-classical",
            Expected::Norm { .. } => "norm",
        }
    }

    fn table(&self) -> Option<(&str, &[usize])> {
        match self {
            Expected::Loops { window, dims, .. }
            | Expected::Tate { window, dims, .. }
            | Expected::TateClassical { window, dims, .. } => Some((window, dims)),
            Expected::Norm { .. } => None,
        }
    }
}

#[derive(Clone, Debug, Deserialize)]
pub struct ModuleEntry {
    /// Relative to the catalog file.
    pub file: PathBuf,
    pub window: String,
    #[serde(default = "default_max_exponent")]
    pub max_exponent: usize,
    #[serde(default)]
    pub expected: Vec<ExpectedRow>,
}

fn default_max_exponent() -> usize {
    4
}

#[derive(Clone, Debug, Deserialize)]
pub struct ExpectedRow {
    pub index: usize,
    pub dims: Vec<usize>,
    pub source: String,
}

fn parse_window(s: &str, context: &str) -> Result<Window, Failure> {
    s.parse()
        .map_err(|e| Failure::parse(format!("{context}: {e}")))
}

impl Catalog {
    pub fn load(path: &Path) -> Result<Self, Failure> {
        let c: Catalog = crate::commands::read_json(path, "catalog")?;
        c.validate()?;
        Ok(c)
    }

    /// Groups close, windows parse and match their tables, and expected
    /// tables are unique per `(prime, kind, window)`.
    pub fn validate(&self) -> Result<(), Failure> {
        for e in &self.entries {
            let g = close_group(&e.group)?;
            for &p in &e.primes {
                if !squeeze_core::gfmat::is_prime(p) {
                    return Err(Failure::parse(format!("{}: {p} is not prime", e.name)));
                }
                if g.order() % p as usize != 0 {
                    eprintln!(
                        "warning: {}: {p} does not divide the order {}",
                        e.name,
                        g.order()
                    );
                }
            }
            let mut seen = BTreeSet::new();
            for x in &e.expected {
                if !e.primes.contains(&x.prime()) {
                    return Err(Failure::parse(format!(
                        "{}: expected {} table at unlisted prime {}",
                        e.name,
                        x.kind(),
                        x.prime()
                    )));
                }
                let mut key = (x.prime(), x.kind(), String::new());
                if let Some((w, dims)) = x.table() {
                    let window = parse_window(w, &e.name)?;
                    if window.len() != dims.len() {
                        return Err(Failure::parse(format!(
                            "{}: {} table over {window} has {} entries",
                            e.name,
                            x.kind(),
                            dims.len()
                        )));
                    }
                    key.2 = window.to_string();
                }
                if !seen.insert(key.clone()) {
                    return Err(Failure::parse(format!(
                        "{}: duplicate expected table {} p={} {}",
                        e.name, key.1, key.0, key.2
                    )));
                }
            }
        }
        for m in &self.modules {
            let window = parse_window(&m.window, &m.file.display().to_string())?;
            for r in &m.expected {
                if r.dims.len() != window.len() {
                    return Err(Failure::parse(format!(
                        "{}: expected H^{} row has {} entries for window {window}",
                        m.file.display(),
                        r.index,
                        r.dims.len()
                    )));
                }
            }
        }
        Ok(())
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct CheckResult {
    pub name: String,
    pub passed: bool,
    pub detail: String,
}

struct Checks {
    prefix: String,
    out: Vec<CheckResult>,
}

impl Checks {
    fn new(prefix: String) -> Self {
        Checks {
            prefix,
            out: Vec::new(),
        }
    }

    fn record(&mut self, name: &str, outcome: Result<(bool, String), Failure>) {
        let (passed, detail) = outcome.unwrap_or_else(|e| (false, format!("error: {e}")));
        self.out.push(CheckResult {
            name: format!("{}/{name}", self.prefix),
            passed,
            detail,
        });
    }
}

fn is_p_group(order: usize, p: u32) -> bool {
    let mut n = order;
    while n.is_multiple_of(p as usize) {
        n /= p as usize;
    }
    n == 1
}

fn dims_detail(t: &BettiTable) -> String {
    let d: Vec<String> = t.dims.iter().map(usize::to_string).collect();
    format!("dims=[{}]", d.join(","))
}

fn compare(t: &BettiTable, want: &[usize], source: &str) -> (bool, String) {
    if t.dims == want {
        (true, format!("{} source={source}", dims_detail(t)))
    } else {
        (
            false,
            format!("{} expected={want:?} source={source}", dims_detail(t)),
        )
    }
}

fn w(lo: i64, hi: i64) -> Window {
    Window::new(lo, hi).expect("fixed window")
}

fn group_checks(entry: &CatalogEntry, p: u32, seed: u64, cache: &Cache) -> Vec<CheckResult> {
    let mut c = Checks::new(format!("{}/p={p}", entry.name));
    let mut s = match Session::new(entry.group.clone(), p, seed, cache.clone()) {
        Ok(s) => s,
        Err(e) => {
            c.record("setup", Err(e));
            return c.out;
        }
    };
    let nilpotent = is_p_nilpotent(&s.group, p);
    let order = s.group.order();

    let norm = s.algebra().and_then(|a| Ok(norm_map(a)?));
    c.record(
        "norm",
        norm.as_ref()
            .map(|n| {
                (
                    n.consistent(),
                    format!("verdict={} p-nilpotent={}", n.verdict, n.p_nilpotent),
                )
            })
            .map_err(|e| Failure::failed(e.message.clone())),
    );

    c.record(
        "tate-vanishing[-4..4]",
        s.tate(w(-4, 4)).map(|t| {
            (
                t.is_zero() == nilpotent,
                format!("{} p-nilpotent={nilpotent}", dims_detail(&t)),
            )
        }),
    );

    c.record(
        "classical-duality[-6..6]",
        s.classical(w(-7, 6)).map(|t| {
            let ok = (-6..=6).all(|n| t.get(n) == t.get(-1 - n));
            (ok, dims_detail(&t))
        }),
    );

    if is_p_group(order, p) {
        c.record(
            "regularity[0..8]",
            s.loops(w(0, 8)).map(|t| {
                let ok = t.iter().all(|(n, d)| d == if n == 0 { order } else { 0 });
                (ok, dims_detail(&t))
            }),
        );
    }

    c.record(
        "anderson[-3..4]",
        s.algebra()
            .and_then(|a| Ok(anderson_tate_check(a, w(-3, 4))?))
            .map(|r| {
                (
                    r.passed(),
                    format!(
                        "predicted={:?} computed={:?} mismatches={:?}",
                        r.predicted.dims, r.computed.dims, r.mismatches
                    ),
                )
            }),
    );

    c.record(
        "d-squared",
        (|| {
            let left = s.left_trace(6)?.complex();
            let right = s.right_trace(6)?.complex();
            let bad: Vec<i64> = left
                .d_squared_failures()
                .into_iter()
                .chain(right.d_squared_failures())
                .collect();
            let equi = left.is_equivariant() && right.is_equivariant();
            Ok((
                bad.is_empty() && equi,
                format!("failures={bad:?} equivariant={equi}"),
            ))
        })(),
    );

    c.record(
        "trace-round-trip",
        (|| {
            let left = s.left_trace(4)?.to_record(&s.group);
            let text = serde_json::to_string(&left).map_err(|e| Failure::failed(e.to_string()))?;
            let back: LeftTraceRecord =
                serde_json::from_str(&text).map_err(|e| Failure::failed(e.to_string()))?;
            let l_ok = back.validate(s.group.clone())?.to_record(&s.group) == left;
            let right = s.right_trace(4)?.to_record(&s.group);
            let text = serde_json::to_string(&right).map_err(|e| Failure::failed(e.to_string()))?;
            let back: RightTraceRecord =
                serde_json::from_str(&text).map_err(|e| Failure::failed(e.to_string()))?;
            let r_ok = back.validate(s.group.clone())?.to_record(&s.group) == right;
            Ok((l_ok && r_ok, format!("left={l_ok} right={r_ok}")))
        })(),
    );

    c.record(
        "seed-independence",
        (|| {
            let other = GroupAlgebra::new(s.group.clone(), p, seed.wrapping_add(1))?;
            let base = s.algebra()?.simples();
            let mut hit = vec![false; base.simples.len()];
            for t in &other.simples().simples {
                if let Some(i) = base.identify(t)? {
                    hit[i] = true;
                }
            }
            let ok = other.simples().simples.len() == base.simples.len() && hit.iter().all(|&h| h);
            Ok((
                ok,
                format!(
                    "simple dims {:?} vs {:?}",
                    base.dims(),
                    other.simples().dims()
                ),
            ))
        })(),
    );

    for x in entry.expected.iter().filter(|x| x.prime() == p) {
        match x {
            Expected::Norm {
                verdict, source, ..
            } => c.record(
                "expected-norm",
                norm.as_ref()
                    .map(|n| {
                        (
                            n.verdict == *verdict,
                            format!("verdict={} expected={verdict} source={source}", n.verdict),
                        )
                    })
                    .map_err(|e| Failure::failed(e.message.clone())),
            ),
            Expected::Loops {
                window,
                dims,
                source,
                ..
            }
            | Expected::Tate {
                window,
                dims,
                source,
                ..
            }
            | Expected::TateClassical {
                window,
                dims,
                source,
                ..
            } => {
                let win: Window = window.parse().expect("validated");
                let table = match x {
                    Expected::Loops { .. } => s.loops(win),
                    Expected::Tate { .. } => s.tate(win),
                    _ => s.classical(win),
                };
                c.record(
                    &format!("expected-{}[{win}]", x.kind()),
                    table.map(|t| compare(&t, dims, source)),
                );
            }
        }
    }
    c.out
}

fn exponent_vectors(s: usize, max: usize) -> Vec<Vec<usize>> {
    let mut out = vec![vec![]];
    for _ in 0..s {
        out = out
            .into_iter()
            .flat_map(|v| {
                (1..=max).map(move |e| {
                    let mut v = v.clone();
                    v.push(e);
                    v
                })
            })
            .collect();
    }
    out.retain(|v| v.iter().any(|&e| e > 1));
    out
}

fn module_checks(entry: &ModuleEntry, base: &Path) -> Vec<CheckResult> {
    let mut c = Checks::new(format!("module:{}", entry.file.display()));
    let (_, m) = match load_module(&base.join(&entry.file)) {
        Ok(x) => x,
        Err(e) => {
            c.record("load", Err(e));
            return c.out;
        }
    };
    let window: Window = entry.window.parse().expect("validated");
    let s = m.s();

    let data = colimit_data(&m, window, Exec::default());
    c.record(
        "long-exact-sequence",
        data.clone().map_err(Failure::from).map(|d| {
            let bad = long_exact_sequence_failures(&d);
            (bad.is_empty(), format!("failing degrees={bad:?}"))
        }),
    );
    c.record(
        "index-range",
        data.map_err(Failure::from).map(|d| {
            let ok = d
                .iter()
                .all(|x| x.local.len() == s + 1 && x.cech.len() == s);
            (ok, format!("s={s}"))
        }),
    );

    let lc = local_cohomology(&m, window).map_err(Failure::from);
    c.record(
        "torsion-oracle",
        lc.as_ref()
            .map_err(|e| Failure::failed(e.message.clone()))
            .and_then(|lc| {
                let (_, hi) = (m.window().lo, m.window().hi);
                let tmax = m.tau_degrees().iter().copied().max().unwrap_or(1).max(1);
                let power = ((hi - window.hi) / tmax).clamp(0, 32) as usize;
                if power == 0 {
                    return Err(Failure::budget(
                        "module known range too short for the torsion oracle",
                    ));
                }
                let t = torsion_dims(&m, window, power)?;
                Ok((
                    lc.row(0) == t,
                    format!(
                        "H^0 {} torsion {} power={power}",
                        dims_detail(&lc.row(0)),
                        dims_detail(&t)
                    ),
                ))
            }),
    );

    for e in exponent_vectors(s, entry.max_exponent) {
        c.record(
            &format!("radical-invariance{e:?}"),
            radical_invariance_check(&m, &e, window)
                .map_err(Failure::from)
                .map(|r| (r.passed(), format!("mismatches={:?}", r.mismatches))),
        );
    }

    for r in &entry.expected {
        c.record(
            &format!("expected-H{}[{window}]", r.index),
            lc.as_ref()
                .map_err(|e| Failure::failed(e.message.clone()))
                .map(|lc| compare(&lc.row(r.index), &r.dims, &r.source)),
        );
    }
    c.out
}

enum Job<'a> {
    Group(&'a CatalogEntry, u32),
    Module(&'a ModuleEntry),
}

/// Every check for every `(group, prime)` and graded module, fanned out over `exec`.
pub fn run_checks(
    catalog: &Catalog,
    base: &Path,
    seed: u64,
    cache: &Cache,
    exec: Exec,
) -> Vec<CheckResult> {
    let mut jobs = Vec::new();
    for e in &catalog.entries {
        for &p in &e.primes {
            jobs.push(Job::Group(e, p));
        }
    }
    jobs.extend(catalog.modules.iter().map(Job::Module));
    exec.map(jobs.len(), |i| match jobs[i] {
        Job::Group(e, p) => group_checks(e, p, seed, cache),
        Job::Module(m) => module_checks(m, base),
    })
    .into_iter()
    .flatten()
    .collect()
}

pub fn render_report(results: &[CheckResult], json: bool) -> String {
    let failed = results.iter().filter(|r| !r.passed).count();
    if json {
        #[derive(Serialize)]
        struct Report<'a> {
            passed: usize,
            failed: usize,
            checks: &'a [CheckResult],
        }
        let r = Report {
            passed: results.len() - failed,
            failed,
            checks: results,
        };
        return serde_json::to_string_pretty(&r).expect("serializable") + "\n";
    }
    let mut out = String::new();
    for r in results {
        let tag = if r.passed { "PASS" } else { "FAIL" };
        out.push_str(&format!("{tag}\t{}\t{}\n", r.name, r.detail));
    }
    out.push_str(&format!(
        "# {} passed, {failed} failed\n",
        results.len() - failed
    ));
    out
}
