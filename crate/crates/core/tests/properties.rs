//! Randomized structural properties of covers, hulls, Ω and squeezed traces.

use std::sync::Arc;

use proptest::prelude::*;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use squeeze_core::kgmod::{
    dual_module, is_isomorphic, quotient_module, submodule_generated, GroupAlgebra, KgModule,
};
use squeeze_core::permgrp::named;
use squeeze_core::squeeze::{left_squeezed_resolution, right_squeezed_resolution};

fn algebras() -> Vec<GroupAlgebra> {
    [
        (named::symmetric3(), 3),
        (named::alternating4(), 2),
        (named::cyclic(4), 2),
        (named::cyclic(6), 3),
        (named::dihedral8(), 2),
        (named::frobenius20(), 5),
    ]
    .into_iter()
    .map(|(g, p)| GroupAlgebra::new(Arc::new(g), p, 0).unwrap())
    .collect()
}

/// A random subquotient of `kG ⊕ kG`.
fn random_module(alg: &GroupAlgebra, seed: u64) -> KgModule {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let r = alg.regular();
    let rr = r.direct_sum(&r).unwrap();
    let n = rr.dim();
    let p = alg.p();
    let vecs: Vec<Vec<u32>> = (0..rng.gen_range(1..3))
        .map(|_| {
            (0..n)
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
    let inner_vec: Vec<u32> = (0..sub.dim()).map(|_| rng.gen_range(0..p)).collect();
    let inner = submodule_generated(&sub.module, &[inner_vec]);
    quotient_module(&sub.module, &inner.basis).unwrap().module
}

proptest! {
    #![proptest_config(ProptestConfig { cases: 48, failure_persistence: None, ..ProptestConfig::default() })]

    #[test]
    fn cover_contract(which in 0usize..6, seed in any::<u64>()) {
        let alg = &algebras()[which];
        let m = random_module(alg, seed);
        let cover = alg.projective_cover(&m).unwrap();
        prop_assert!(alg.verify_cover(&m, &cover).unwrap());
        let top_p = alg.top(&cover.projective).unwrap().module.dim();
        let top_m = alg.top(&m).unwrap().module.dim();
        prop_assert_eq!(top_p, top_m);
    }

    #[test]
    fn hull_is_dual_of_cover(which in 0usize..6, seed in any::<u64>()) {
        let alg = &algebras()[which];
        let m = random_module(alg, seed);
        let hull = alg.injective_hull(&m).unwrap();
        prop_assert!(hull.map.is_equivariant() && hull.map.is_injective());
        let cover = alg.projective_cover(&dual_module(&m)).unwrap();
        prop_assert_eq!(&hull.map.matrix, &cover.map.matrix.transpose());
        let dd = dual_module(&dual_module(&m));
        prop_assert_eq!(dd.gen_actions(), m.gen_actions());
    }

    #[test]
    fn omega_is_additive(which in 0usize..6, s1 in any::<u64>(), s2 in any::<u64>()) {
        let alg = &algebras()[which];
        let (a, b) = (random_module(alg, s1), random_module(alg, s2));
        let sum = a.direct_sum(&b).unwrap();
        let dim = |m: &KgModule| alg.loops_omega(m).unwrap().1.dim();
        prop_assert_eq!(dim(&sum), dim(&a) + dim(&b));
        let cdim = |m: &KgModule| alg.coloops_omega_inv(m).unwrap().1.module.dim();
        prop_assert_eq!(cdim(&sum), cdim(&a) + cdim(&b));
    }

    #[test]
    fn sigma_submodule_detects_trivial_action(which in 0usize..6, seed in any::<u64>()) {
        let alg = &algebras()[which];
        let m = random_module(alg, seed);
        let acts = m.element_actions();
        let id = squeeze_core::FpMatrix::identity(alg.p(), m.dim());
        let trivial = alg.op_subgroup().members.iter().all(|&g| acts[g] == id);
        prop_assert_eq!(alg.sigma_submodule(&m).dim() == 0, trivial);
        let sub = alg.sigma_submodule(&m);
        let q = quotient_module(&m, &sub.basis).unwrap();
        let qid = squeeze_core::FpMatrix::identity(alg.p(), q.module.dim());
        for &g in &alg.op_subgroup().generators {
            prop_assert_eq!(&q.module.element_actions()[g], &qid);
        }
    }

    #[test]
    fn traces_square_to_zero(which in 0usize..6, seed in any::<u64>()) {
        let alg = &algebras()[which];
        let m = random_module(alg, seed);
        let left = left_squeezed_resolution(alg, &m, 4).unwrap();
        let lc = left.complex();
        prop_assert!(lc.d_squared_failures().is_empty());
        prop_assert!(lc.is_equivariant());
        let right = right_squeezed_resolution(alg, &m, 4).unwrap();
        let rc = right.complex();
        prop_assert!(rc.d_squared_failures().is_empty());
        prop_assert!(rc.is_equivariant());
    }

    #[test]
    fn projectives_cover_themselves(which in 0usize..6, idx in 0usize..4) {
        let alg = &algebras()[which];
        let pim = &alg.pims()[idx % alg.pims().len()];
        let cover = alg.projective_cover(&pim.module).unwrap();
        prop_assert!(cover.map.matrix.is_invertible());
        let hull = alg.injective_hull(&pim.module).unwrap();
        prop_assert!(is_isomorphic(&hull.injective, &pim.module, 0).unwrap().is_isomorphic());
    }
}
