use proptest::prelude::*;

use hermdens::density::local_density;
use hermdens::jordan::{jordan_split, JordanComponent, JordanDecomposition, Tail};
use hermdens::{Ring, TypeProfile};

fn tail_for(odd: bool, kind: u8, param: i64) -> Tail {
    match (odd, kind % 4) {
        (true, 0 | 1) => Tail::H1,
        (true, _) => Tail::A4a { a: param },
        (false, 0) => Tail::None,
        (false, 1) => Tail::Unit { a: 2 * param + 1 },
        (false, 2) => Tail::A12b1 { b: param },
        (false, _) => Tail::A2d2b1 { b: 2 * param + 1 },
    }
}

fn components(
    min_scale: i64,
    parts: &[(i64, u8, i64, usize)],
    delta: i64,
) -> Vec<JordanComponent> {
    let mut out: Vec<JordanComponent> = Vec::new();
    for &(offset, kind, param, h) in parts {
        let scale = min_scale + offset;
        if out.iter().any(|c| c.scale == scale) {
            continue;
        }
        let tail = tail_for(scale.rem_euclid(2) == 1, kind, param);
        let rank = tail.rank() + 2 * h + if tail == Tail::None && h == 0 { 2 } else { 0 };
        out.push(JordanComponent::new(scale, rank, tail, delta).unwrap());
    }
    out
}

fn parts() -> impl Strategy<Value = Vec<(i64, u8, i64, usize)>> {
    proptest::collection::vec((0i64..7, any::<u8>(), 0i64..4, 0usize..2), 1..5)
}

proptest! {
    #[test]
    fn identities_hold(min in -4i64..3, parts in parts(), delta in prop_oneof![Just(1i64), Just(3)], d in 1u32..4) {
        let p = TypeProfile::classify(&components(min, &parts, delta), delta).unwrap();
        let r = local_density(&p, 1 << d).unwrap();
        let x = &r.exponents;
        let u = &r.unipotent;
        prop_assert_eq!(x.n, x.n_h - x.n_m);
        prop_assert_eq!(u.l, u.l_prime + u.dim_g1);
        prop_assert!(u.l >= 0 && u.l_prime >= 0 && u.dim_g1 >= 0);
        prop_assert!(r.beta <= p.entries.iter().filter(|e| e.is_type_i()).count());
        prop_assert!(r.identities.iter().all(|c| c.holds));
    }

    #[test]
    fn shifting_scales_keeps_tags(min in -4i64..3, parts in parts(), delta in prop_oneof![Just(1i64), Just(3)]) {
        let comps = components(min, &parts, delta);
        let p = TypeProfile::classify(&comps, delta).unwrap();
        let moved: Vec<JordanComponent> = comps
            .iter()
            .map(|c| JordanComponent { scale: c.scale + 2, ..*c })
            .collect();
        let q = TypeProfile::classify(&moved, delta).unwrap();
        prop_assert_eq!(q.canonical(), p.shifted(2).unwrap().canonical());
    }

    #[test]
    fn canonical_tails_are_idempotent(kind in any::<u8>(), param in -20i64..20, odd in any::<bool>(), delta in prop_oneof![Just(1i64), Just(3), Just(5), Just(7)]) {
        let t = match tail_for(odd, kind, param) {
            Tail::Unit { a } => Tail::Unit { a: 2 * a + 1 },
            t => t,
        };
        let c = t.canonical(delta);
        prop_assert_eq!(c.canonical(delta), c);
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(48))]

    #[test]
    fn conjugation_preserves_profile_and_density(parts in parts(), seed in any::<u64>(), delta in prop_oneof![Just(1i64), Just(3)]) {
        let comps = components(0, &parts, delta);
        prop_assume!(comps.iter().map(|c| c.rank).sum::<usize>() <= 6);
        let ring = Ring::new(24, delta).unwrap();
        let g = JordanDecomposition::from_components(ring, comps).unwrap().normal_gram();
        let p = TypeProfile::from_decomposition(&jordan_split(&g).unwrap()).unwrap();
        let (h, _) = g.random_isometry_conjugate(seed);
        let q = TypeProfile::from_decomposition(&jordan_split(&h).unwrap()).unwrap();
        prop_assert_eq!(q.canonical(), p.canonical());
        prop_assert_eq!(
            local_density(&q, 2).unwrap().beta_l_value(),
            local_density(&p, 2).unwrap().beta_l_value()
        );
    }
}
