//! Whole-pipeline checks over the standard small groups.

use std::sync::Arc;

use squeeze_core::kgmod::{find_simples, is_isomorphic, GroupAlgebra};
use squeeze_core::permgrp::{is_p_nilpotent, named, Group};
use squeeze_core::squeeze::{
    anderson_tate_check, classical_tate_dimensions, left_squeezed_resolution, norm_map,
    squeezed_homology, tate_squeezed_homology, NormVerdict, Window,
};

fn catalog() -> Vec<Group> {
    vec![
        named::cyclic(2),
        named::cyclic(3),
        named::cyclic(4),
        named::cyclic(6),
        named::symmetric3(),
        named::dihedral8(),
        named::alternating4(),
        named::frobenius20(),
        named::c3_times_s3(),
    ]
}

fn prime_divisors(n: usize) -> Vec<u32> {
    (2..=n as u32)
        .filter(|&q| n.is_multiple_of(q as usize) && (2..q).all(|r| q % r != 0))
        .collect()
}

fn jobs() -> Vec<(Arc<Group>, u32)> {
    catalog()
        .into_iter()
        .flat_map(|g| {
            let g = Arc::new(g);
            prime_divisors(g.order())
                .into_iter()
                .map(move |p| (g.clone(), p))
        })
        .collect()
}

fn w(lo: i64, hi: i64) -> Window {
    Window::new(lo, hi).unwrap()
}

fn loops(g: Group, p: u32, hi: i64) -> Vec<usize> {
    let alg = GroupAlgebra::new(Arc::new(g), p, 0).unwrap();
    let trace = left_squeezed_resolution(&alg, &alg.trivial(), hi as usize + 1).unwrap();
    squeezed_homology(&trace, w(0, hi)).unwrap().dims
}

#[test]
fn frobenius20_at_5() {
    assert_eq!(
        loops(named::frobenius20(), 5, 8),
        vec![1, 0, 0, 0, 0, 0, 1, 1, 0]
    );
}

#[test]
fn a4_at_2_matches_series() {
    // (1 + t + t² + t³) / (1 − t²)
    assert_eq!(
        loops(named::alternating4(), 2, 6),
        vec![1, 1, 2, 2, 2, 2, 2]
    );
}

#[test]
fn p_groups_are_regular() {
    for (g, p) in [
        (named::cyclic(2), 2),
        (named::cyclic(4), 2),
        (named::cyclic(3), 3),
        (named::dihedral8(), 2),
    ] {
        let order = g.order();
        let mut expected = vec![0; 9];
        expected[0] = order;
        assert_eq!(loops(g, p, 8), expected);
    }
}

#[test]
fn norm_dichotomy_over_catalog() {
    for (g, p) in jobs() {
        let alg = GroupAlgebra::new(g.clone(), p, 0).unwrap();
        let n = norm_map(&alg).unwrap();
        assert_ne!(n.verdict, NormVerdict::Other, "{} p={p}", g.name());
        assert_eq!(
            n.verdict == NormVerdict::Iso,
            is_p_nilpotent(&g, p),
            "{} p={p}",
            g.name()
        );
    }
}

#[test]
fn classical_tate_duality_over_catalog() {
    for (g, p) in jobs() {
        let alg = GroupAlgebra::new(g.clone(), p, 0).unwrap();
        let t = classical_tate_dimensions(&alg, w(-6, 6)).unwrap();
        for n in -6..=5 {
            assert_eq!(t.get(n), t.get(-1 - n), "{} p={p} n={n}", g.name());
        }
        assert!(!t.is_zero());
    }
}

#[test]
fn tate_vanishing_exactly_for_p_nilpotent() {
    for (g, p) in jobs() {
        let alg = GroupAlgebra::new(g.clone(), p, 0).unwrap();
        let t = tate_squeezed_homology(&alg, w(-4, 4)).unwrap();
        assert_eq!(
            t.is_zero(),
            is_p_nilpotent(&g, p),
            "{} p={p}: {:?}",
            g.name(),
            t.dims
        );
    }
}

#[test]
fn anderson_formula_on_small_groups() {
    for (g, p) in [
        (named::symmetric3(), 3),
        (named::alternating4(), 2),
        (named::cyclic(6), 3),
    ] {
        let name = g.name().to_string();
        let alg = GroupAlgebra::new(Arc::new(g), p, 0).unwrap();
        let r = anderson_tate_check(&alg, w(-3, 4)).unwrap();
        assert!(
            r.passed(),
            "{name}: predicted {:?} computed {:?}",
            r.predicted.dims,
            r.computed.dims
        );
    }
}

#[test]
fn simples_do_not_depend_on_seed() {
    for (g, p) in jobs() {
        let a = find_simples(g.clone(), p, 0).unwrap();
        for seed in [1, 7, 12345] {
            let b = find_simples(g.clone(), p, seed).unwrap();
            assert_eq!(a.dims(), b.dims());
            for (x, y) in a.simples.iter().zip(&b.simples) {
                assert!(is_isomorphic(x, y, 0).unwrap().is_isomorphic());
            }
        }
    }
}
