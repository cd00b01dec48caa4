//! Deterministic corpus of lattice files and random type profiles.

use rand::seq::SliceRandom;
use rand::{Rng as _, SeedableRng};
use rand_chacha::ChaCha8Rng;

use hermdens::{JordanComponent, JordanDecomposition, Result, Ring, Tail, TypeProfile};

use crate::format::LatticeFile;

/// Working precision written into generated files.
pub const CORPUS_PRECISION: u32 = 24;

/// Tail kinds that the first entries of every corpus cover.
pub const TAIL_KINDS: [&str; 6] = [
    "unit",
    "a_1_2b_1",
    "a_2delta_2b_1",
    "a_4a_2delta_pi",
    "h1",
    "none",
];

fn random_tail(rng: &mut ChaCha8Rng, kind: &str) -> Tail {
    match kind {
        "unit" => Tail::Unit {
            a: 2 * rng.gen_range(0..4) + 1,
        },
        "a_1_2b_1" => Tail::A12b1 {
            b: rng.gen_range(0..2),
        },
        "a_2delta_2b_1" => Tail::A2d2b1 {
            b: 2 * rng.gen_range(0..2) + 1,
        },
        "a_4a_2delta_pi" => Tail::A4a {
            a: rng.gen_range(0..8),
        },
        "h1" => Tail::H1,
        _ => Tail::None,
    }
}

fn pick_scale(rng: &mut ChaCha8Rng, odd: bool, min: i64, max: i64) -> Option<i64> {
    let options: Vec<i64> = (min..=max).filter(|s| (s.rem_euclid(2) == 1) == odd).collect();
    options.choose(rng).copied()
}

/// Single component carrying the given tail kind, if the bounds allow one.
fn coverage_components(
    rng: &mut ChaCha8Rng,
    kind: &str,
    delta: i64,
    max_rank: usize,
    max_scale: i64,
) -> Option<Vec<JordanComponent>> {
    let tail = random_tail(rng, kind);
    let odd = matches!(tail, Tail::A4a { .. } | Tail::H1);
    let scale = pick_scale(rng, odd, 0, max_scale)?;
    let rank = tail.rank().max(if tail == Tail::None { 2 } else { 1 });
    if rank > max_rank {
        return None;
    }
    JordanComponent::new(scale, rank, tail, delta).ok().map(|c| vec![c])
}

/// Random components with total rank at most `max_rank` and scales in
/// `min_scale..=max_scale`, filling the drawn rank over several scales.
pub fn random_components(
    rng: &mut ChaCha8Rng,
    delta: i64,
    max_rank: usize,
    min_scale: i64,
    max_scale: i64,
) -> Vec<JordanComponent> {
    let mut scales: Vec<i64> = (min_scale..=max_scale).collect();
    scales.shuffle(rng);
    let max_rank = max_rank.max(1);
    let mut budget = if rng.gen_bool(0.5) {
        max_rank
    } else {
        rng.gen_range(1..=max_rank)
    };
    let mut out = Vec::new();
    for s in scales {
        if budget == 0 {
            break;
        }
        let kinds: &[&str] = if s.rem_euclid(2) == 1 {
            &["a_4a_2delta_pi", "h1"]
        } else {
            &["unit", "a_1_2b_1", "a_2delta_2b_1", "none"]
        };
        let kind = kinds.choose(rng).expect("nonempty");
        let tail = random_tail(rng, kind);
        let min_rank = tail.rank().max(if tail == Tail::None { 2 } else { 1 });
        if min_rank > budget {
            continue;
        }
        let room = (budget - min_rank) / 2;
        let h = if room == 0 || rng.gen_bool(0.6) {
            0
        } else {
            rng.gen_range(1..=room)
        };
        let rank = min_rank + 2 * h;
        budget -= rank;
        out.push(JordanComponent::new(s, rank, tail, delta).expect("generated shape is valid"));
    }
    if out.is_empty() {
        let s = pick_scale(rng, false, min_scale, max_scale)
            .unwrap_or(min_scale - min_scale.rem_euclid(2));
        out.push(JordanComponent::new(s, 1, Tail::Unit { a: 1 }, delta).expect("unit"));
    }
    out.sort_by_key(|c| c.scale);
    out
}

/// Deterministic corpus: every tail kind first (when the bounds allow it),
/// then random shapes; odd-indexed entries are randomly conjugated.
pub fn corpus_generate(
    seed: u64,
    count: usize,
    max_rank: usize,
    max_scale: i64,
) -> Result<Vec<LatticeFile>> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let max_rank = max_rank.max(1);
    let max_scale = max_scale.max(0);
    let mut out = Vec::with_capacity(count);
    let mut kinds = TAIL_KINDS.iter();
    for idx in 0..count {
        let delta = if rng.gen_bool(0.5) { 1 } else { 3 };
        let covered = kinds
            .by_ref()
            .find_map(|k| coverage_components(&mut rng, k, delta, max_rank, max_scale));
        let comps = match covered {
            Some(c) => c,
            None => random_components(&mut rng, delta, max_rank, 0, max_scale),
        };
        let ring = Ring::new(CORPUS_PRECISION, delta)?;
        let mut g = JordanDecomposition::from_components(ring, comps)?.normal_gram();
        let conjugated = idx % 2 == 1;
        if conjugated {
            g = g.random_isometry_conjugate(rng.gen()).0;
        }
        let name = format!("s{seed}-{idx:03}{}", if conjugated { "c" } else { "" });
        out.push(LatticeFile::from_gram(Some(name), &g));
    }
    Ok(out)
}

/// Random type profile, allowing negative scales.
pub fn random_profile(
    rng: &mut ChaCha8Rng,
    max_rank: usize,
    min_scale: i64,
    max_scale: i64,
) -> Result<TypeProfile> {
    let delta = if rng.gen_bool(0.5) { 1 } else { 3 };
    let comps = random_components(rng, delta, max_rank, min_scale, max_scale);
    TypeProfile::classify(&comps, delta)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::format::Input;
    use hermdens::jordan_split;

    #[test]
    fn deterministic_per_seed() {
        let a = corpus_generate(5, 14, 3, 3).unwrap();
        let b = corpus_generate(5, 14, 3, 3).unwrap();
        assert_eq!(a, b);
        assert_ne!(a, corpus_generate(6, 14, 3, 3).unwrap());
    }

    #[test]
    fn covers_every_tail_kind() {
        for seed in 0..5 {
            let files = corpus_generate(seed, 12, 2, 3).unwrap();
            let mut seen = std::collections::BTreeSet::new();
            for (idx, f) in files.iter().enumerate() {
                let Input::Gram(g) = f.input().unwrap() else { panic!() };
                let d = jordan_split(&g).unwrap();
                for c in &d.components {
                    let spec = crate::format::ComponentSpec::from_component(c);
                    seen.insert(spec.tail);
                }
                assert_eq!(f.name.as_ref().unwrap().ends_with('c'), idx % 2 == 1);
            }
            for k in TAIL_KINDS {
                assert!(seen.contains(k), "seed {seed}: {k} missing");
            }
        }
    }

    #[test]
    fn random_profiles_respect_bounds() {
        let mut rng = ChaCha8Rng::seed_from_u64(1);
        for _ in 0..200 {
            let p = random_profile(&mut rng, 6, -3, 4).unwrap();
            assert!(p.rank() >= 1 && p.rank() <= 6);
            assert!(p.entries.iter().all(|e| (-3..=4).contains(&e.scale)));
        }
    }
}
