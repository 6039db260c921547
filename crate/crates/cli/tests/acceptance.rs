//! End-to-end acceptance: one PASS/FAIL line per criterion, exact arithmetic.

use std::path::{Path, PathBuf};
use std::process::Command;
use std::sync::Arc;
use std::time::{Duration, Instant};

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use squeeze_core::gradedlc::{
    colimit_data, fixtures, local_cohomology, long_exact_sequence_failures,
    radical_invariance_check, telescope_localization, torsion_dims, unstable_koszul_cohomology,
};
use squeeze_core::kgmod::{dual_module, is_isomorphic, quotient_module, submodule_generated};
use squeeze_core::permgrp::{is_p_nilpotent, named};
use squeeze_core::squeeze::{
    anderson_tate_check, classical_tate_dimensions, left_squeezed_resolution, norm_map,
    right_squeezed_resolution, squeezed_homology, tate_splice, tate_squeezed_homology, NormVerdict,
};
use squeeze_core::{Group, GroupAlgebra, GroupSpec, KgModule, Window};

type Outcome = Result<String, String>;
type Criterion = (&'static str, fn() -> Outcome, Option<Duration>);

fn w(lo: i64, hi: i64) -> Window {
    Window::new(lo, hi).unwrap()
}

fn ensure(cond: bool, msg: impl FnOnce() -> String) -> Result<(), String> {
    if cond {
        Ok(())
    } else {
        Err(msg())
    }
}

fn algebra(g: Group, p: u32) -> GroupAlgebra {
    GroupAlgebra::new(Arc::new(g), p, 0).unwrap()
}

fn catalog_dir() -> PathBuf {
    Path::new(env!("CARGO_MANIFEST_DIR")).join("catalog")
}

/// Every `(group, prime)` in the shipped catalog.
fn catalog_jobs() -> Vec<(String, Group, u32)> {
    let text = std::fs::read_to_string(catalog_dir().join("catalog.json")).unwrap();
    let v: serde_json::Value = serde_json::from_str(&text).unwrap();
    let mut out = Vec::new();
    for e in v["entries"].as_array().unwrap() {
        let spec: GroupSpec = serde_json::from_value(e["group"].clone()).unwrap();
        let g = spec.close().unwrap();
        for p in e["primes"].as_array().unwrap() {
            out.push((spec.name.clone(), g.clone(), p.as_u64().unwrap() as u32));
        }
    }
    out
}

fn loops(alg: &GroupAlgebra, hi: i64) -> Vec<usize> {
    let t = left_squeezed_resolution(alg, &alg.trivial(), (hi + 1) as usize).unwrap();
    squeezed_homology(&t, w(0, hi)).unwrap().dims
}

fn p_group_regularity() -> Outcome {
    for (g, p) in [
        (named::cyclic(2), 2),
        (named::cyclic(4), 2),
        (named::cyclic(3), 3),
    ] {
        let order = g.order();
        let d = loops(&algebra(g, p), 8);
        let want: Vec<usize> = (0..=8).map(|n| if n == 0 { order } else { 0 }).collect();
        ensure(d == want, || format!("C{order} at p={p}: {d:?}"))?;
    }
    Ok("C2, C4 (p=2) and C3 (p=3) regular through degree 8".into())
}

fn s3_loops() -> Outcome {
    let d = loops(&algebra(named::symmetric3(), 3), 10);
    ensure(d == [1, 0, 1, 1, 1, 1, 1, 1, 1, 1, 1], || format!("{d:?}"))?;
    Ok(format!("{d:?}"))
}

fn frobenius_loops() -> Outcome {
    let d = loops(&algebra(named::frobenius20(), 5), 8);
    ensure(d == [1, 0, 0, 0, 0, 0, 1, 1, 0], || format!("{d:?}"))?;
    Ok(format!("{d:?}"))
}

fn norm_dichotomy() -> Outcome {
    let jobs = catalog_jobs();
    for (name, g, p) in &jobs {
        let alg = algebra(g.clone(), *p);
        let n = norm_map(&alg).map_err(|e| e.to_string())?;
        ensure(n.verdict != NormVerdict::Other, || {
            format!("{name} p={p}: other")
        })?;
        let iso = n.verdict == NormVerdict::Iso;
        ensure(iso == is_p_nilpotent(g, *p), || {
            format!("{name} p={p}: verdict {}", n.verdict)
        })?;
    }
    Ok(format!("{} (group, prime) pairs", jobs.len()))
}

fn tate_vanishing() -> Outcome {
    let window = w(-4, 4);
    let jobs = catalog_jobs();
    for (name, g, p) in &jobs {
        let alg = algebra(g.clone(), *p);
        let t = tate_squeezed_homology(&alg, window).map_err(|e| e.to_string())?;
        ensure(t.is_zero() == is_p_nilpotent(g, *p), || {
            format!("{name} p={p}: {:?}", t.dims)
        })?;
    }
    let s3 = tate_squeezed_homology(&algebra(named::symmetric3(), 3), window).unwrap();
    ensure(s3.dims == vec![1; 9], || format!("S3: {:?}", s3.dims))?;
    let module = fixtures::exterior_polynomial(3, 3, 2, 60);
    let tele = telescope_localization(&module, window).map_err(|e| e.to_string())?;
    ensure(tele == s3, || {
        format!("telescope {:?} vs Tate {:?}", tele.dims, s3.dims)
    })?;
    Ok(format!(
        "{} pairs; S3 all ones and equal to the telescope",
        jobs.len()
    ))
}

fn anderson() -> Outcome {
    let mut summary = Vec::new();
    for (name, g, p) in [
        ("S3", named::symmetric3(), 3),
        ("A4", named::alternating4(), 2),
        ("C6", named::cyclic(6), 3),
    ] {
        let r = anderson_tate_check(&algebra(g, p), w(-3, 4)).map_err(|e| e.to_string())?;
        ensure(r.passed(), || {
            format!("{name}: mismatches at {:?}", r.mismatches)
        })?;
        if !r.p_nilpotent {
            let low = r.p_quotient_order + r.loops.get(1).unwrap();
            ensure(
                r.computed.get(0) == Some(low) && r.computed.get(1) == Some(low),
                || {
                    format!(
                        "{name}: π_0, π_1 = {:?}, {:?}, want {low}",
                        r.computed.get(0),
                        r.computed.get(1)
                    )
                },
            )?;
        }
        if name == "A4" {
            ensure(r.computed.dims == vec![2; 8], || {
                format!("A4 baseline changed: {:?}", r.computed.dims)
            })?;
            let h = loops(&algebra(named::alternating4(), 2), 6);
            ensure(h == [1, 1, 2, 2, 2, 2, 2], || {
                format!("A4 H^Ω baseline changed: {h:?}")
            })?;
        }
        summary.push(format!("{name} {:?}", r.computed.dims));
    }
    Ok(summary.join("; "))
}

fn classical_duality() -> Outcome {
    let jobs = catalog_jobs();
    for (name, g, p) in &jobs {
        let t = classical_tate_dimensions(&algebra(g.clone(), *p), w(-7, 6))
            .map_err(|e| e.to_string())?;
        for n in -6..=6 {
            ensure(t.get(n) == t.get(-1 - n), || {
                format!("{name} p={p}: n={n} in {:?}", t.dims)
            })?;
        }
    }
    Ok(format!("{} pairs on [-6, 6]", jobs.len()))
}

fn local_cohomology_oracle() -> Outcome {
    let window = w(-10, 6);
    let modules = [
        ("k[τ]", fixtures::polynomial(3, 2, 80)),
        ("Λ[ξ]⊗k[τ]", fixtures::exterior_polynomial(3, 3, 2, 80)),
        ("k[τ]/τ^3", fixtures::truncated(2, 2, 3, 80)),
        ("k[τ]/τ^5", fixtures::truncated(5, 1, 5, 80)),
        ("k[τ1,τ2]", fixtures::polynomial2(2, 2, 3, 180)),
    ];
    let mut radical_checks = 0;
    for (name, m) in &modules {
        let s = m.s();
        let data =
            colimit_data(m, window, squeeze_core::Exec::default()).map_err(|e| e.to_string())?;
        let les = long_exact_sequence_failures(&data);
        ensure(les.is_empty(), || {
            format!("{name}: exact sequence fails at {les:?}")
        })?;
        let lc = local_cohomology(m, window).map_err(|e| e.to_string())?;
        let torsion = torsion_dims(m, window, 20).map_err(|e| e.to_string())?;
        ensure(lc.row(0) == torsion, || {
            format!(
                "{name}: H^0 {:?} vs torsion {:?}",
                lc.row(0).dims,
                torsion.dims
            )
        })?;
        let koszul =
            unstable_koszul_cohomology(m, &vec![1; s], window).map_err(|e| e.to_string())?;
        ensure(lc.max_index == s && koszul.max_index == s, || {
            format!("{name}: cohomology above index {s}")
        })?;
        ensure(data.iter().all(|d| d.local.len() == s + 1), || {
            format!("{name}: index range")
        })?;
        let mut vectors = vec![vec![]];
        for _ in 0..s {
            vectors = vectors
                .into_iter()
                .flat_map(|v: Vec<usize>| (1..=4).map(move |e| [v.clone(), vec![e]].concat()))
                .collect();
        }
        for e in vectors {
            let r = radical_invariance_check(m, &e, window).map_err(|x| x.to_string())?;
            ensure(r.passed(), || {
                format!("{name}: exponents {e:?} differ at {:?}", r.mismatches)
            })?;
            radical_checks += 1;
        }
    }
    Ok(format!(
        "{} modules, {radical_checks} exponent vectors",
        modules.len()
    ))
}

fn random_module(alg: &GroupAlgebra, rng: &mut ChaCha8Rng) -> KgModule {
    let r = alg.regular();
    let rr = r.direct_sum(&r).unwrap();
    let p = alg.p();
    let vecs: Vec<Vec<u32>> = (0..rng.gen_range(1..3))
        .map(|_| {
            (0..rr.dim())
                .map(|_| {
                    if rng.gen_bool(0.3) {
                        rng.gen_range(0..p)
                    } else {
                        0
                    }
                })
                .collect()
        })
        .collect();
    let sub = submodule_generated(&rr, &vecs);
    if rng.gen_bool(0.5) || sub.dim() == 0 {
        return sub.module;
    }
    let v: Vec<u32> = (0..sub.dim()).map(|_| rng.gen_range(0..p)).collect();
    let inner = submodule_generated(&sub.module, &[v]);
    quotient_module(&sub.module, &inner.basis).unwrap().module
}

fn squeeze_cli(args: &[&str]) -> Vec<u8> {
    let o = Command::new(env!("CARGO_BIN_EXE_squeeze"))
        .env_remove("SQUEEZE_CACHE_DIR")
        .args(args)
        .output()
        .unwrap();
    assert!(
        o.status.success(),
        "squeeze {args:?}: {}",
        String::from_utf8_lossy(&o.stderr)
    );
    o.stdout
}

fn property_suites() -> Outcome {
    let mut rng = ChaCha8Rng::seed_from_u64(0x5eed);
    let mut cases = 0;
    for (name, g, p) in catalog_jobs() {
        let alg = algebra(g.clone(), p);
        for _ in 0..4 {
            let m = random_module(&alg, &mut rng);
            let cover = alg.projective_cover(&m).map_err(|e| e.to_string())?;
            ensure(alg.verify_cover(&m, &cover).unwrap(), || {
                format!("{name} p={p}: cover contract")
            })?;
            let tops = (
                alg.top(&cover.projective).unwrap().module.dim(),
                alg.top(&m).unwrap().module.dim(),
            );
            ensure(tops.0 == tops.1, || format!("{name} p={p}: tops {tops:?}"))?;
            let hull = alg.injective_hull(&m).map_err(|e| e.to_string())?;
            let dual_cover = alg.projective_cover(&dual_module(&m)).unwrap();
            ensure(
                hull.map.is_injective() && hull.map.matrix == dual_cover.map.matrix.transpose(),
                || format!("{name} p={p}: hull is not the dual of the cover"),
            )?;
            let left = left_squeezed_resolution(&alg, &m, 4).unwrap().complex();
            let right = right_squeezed_resolution(&alg, &m, 4).unwrap().complex();
            ensure(
                left.d_squared_failures().is_empty() && right.d_squared_failures().is_empty(),
                || format!("{name} p={p}: d² ≠ 0"),
            )?;
            cases += 1;
        }
        let k = alg.trivial();
        let splice = tate_splice(
            &left_squeezed_resolution(&alg, &k, 5).unwrap(),
            &right_squeezed_resolution(&alg, &k, 5).unwrap(),
        )
        .map_err(|e| e.to_string())?;
        ensure(splice.complex.d_squared_failures().is_empty(), || {
            format!("{name} p={p}: Tate d² ≠ 0")
        })?;
        let other = GroupAlgebra::new(Arc::new(g.clone()), p, 99).unwrap();
        let base = alg.simples();
        ensure(other.simples().simples.len() == base.simples.len(), || {
            format!("{name} p={p}: simple count")
        })?;
        for s in &other.simples().simples {
            let found = base.simples.iter().any(|t| {
                is_isomorphic(s, t, 0)
                    .map(|o| o.is_isomorphic())
                    .unwrap_or(false)
            });
            ensure(found, || {
                format!("{name} p={p}: simple of dim {} has no match", s.dim())
            })?;
        }
    }
    let groups = catalog_dir().join("groups");
    let g = |f: &str| groups.join(format!("{f}.json")).display().to_string();
    let m = catalog_dir()
        .join("modules/exterior_polynomial_p3.json")
        .display()
        .to_string();
    let commands: Vec<Vec<String>> = vec![
        vec!["loops".into(), g("s3"), "-p".into(), "3".into()],
        vec![
            "tate".into(),
            g("a4"),
            "-p".into(),
            "2".into(),
            "--json".into(),
        ],
        vec!["norm".into(), g("c3xs3"), "-p".into(), "3".into()],
        vec!["tate-classical".into(), g("d4"), "-p".into(), "2".into()],
        vec!["localcoh".into(), m, "--cech".into()],
        vec![
            "check".into(),
            catalog_dir().join("catalog.json").display().to_string(),
        ],
    ];
    for args in &commands {
        let a: Vec<&str> = args.iter().map(String::as_str).collect();
        ensure(squeeze_cli(&a) == squeeze_cli(&a), || {
            format!("nondeterministic output: {a:?}")
        })?;
    }
    Ok(format!(
        "{cases} random modules, seed-independent simples, {} CLI commands",
        commands.len()
    ))
}

fn main() {
    let criteria: [Criterion; 9] = [
        (
            "1 p-group regularity",
            p_group_regularity,
            Some(Duration::from_secs(1)),
        ),
        (
            "2 S3 loop homology",
            s3_loops,
            Some(Duration::from_secs(10)),
        ),
        (
            "3 C5:C4 loop homology",
            frobenius_loops,
            Some(Duration::from_secs(60)),
        ),
        (
            "4 norm dichotomy",
            norm_dichotomy,
            Some(Duration::from_secs(30)),
        ),
        ("5 Tate squeezed vanishing", tate_vanishing, None),
        ("6 Anderson Tate formula", anderson, None),
        (
            "7 classical Tate duality",
            classical_duality,
            Some(Duration::from_secs(60)),
        ),
        (
            "8 local cohomology oracle",
            local_cohomology_oracle,
            Some(Duration::from_secs(10)),
        ),
        ("9 property suites", property_suites, None),
    ];
    let mut failed = 0;
    for (name, f, limit) in criteria {
        let start = Instant::now();
        let outcome = f();
        let elapsed = start.elapsed();
        let outcome = match (outcome, limit) {
            (Ok(_), Some(l)) if elapsed > l => Err(format!("took {elapsed:.2?}, limit {l:?}")),
            (o, _) => o,
        };
        match outcome {
            Ok(detail) => println!("PASS criterion {name} ({elapsed:.2?}): {detail}"),
            Err(detail) => {
                failed += 1;
                println!("FAIL criterion {name} ({elapsed:.2?}): {detail}");
            }
        }
    }
    if failed > 0 {
        println!("{failed} acceptance criteria failed");
        std::process::exit(1);
    }
    println!("all 9 acceptance criteria passed");
}
