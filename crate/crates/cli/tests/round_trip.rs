use proptest::prelude::*;

use hermdens::jordan::component_template;
use hermdens::{HermitianGram, Ring, Tail};
use hermdens_cli::corpus::corpus_generate;
use hermdens_cli::format::{ComponentSpec, LatticeFile, ProfileSpec, ReportFile, TailParams};
use hermdens_cli::run;

fn tail_strategy() -> impl Strategy<Value = (String, TailParams, usize)> {
    prop_oneof![
        Just(("none".to_string(), TailParams::default(), 0)),
        (0i64..4).prop_map(|a| ("unit".into(), TailParams { a: Some(2 * a + 1), b: None }, 1)),
        (0i64..4).prop_map(|b| ("a_1_2b_1".into(), TailParams { a: None, b: Some(b) }, 2)),
        (0i64..8).prop_map(|a| ("a_4a_2delta_pi".into(), TailParams { a: Some(a), b: None }, 2)),
        Just(("h1".to_string(), TailParams::default(), 2)),
    ]
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn lattice_file_round_trip(seed in 0u64..500, conj in any::<bool>(), delta in prop_oneof![Just(1i64), Just(3), Just(5), Just(7)]) {
        let ring = Ring::new(20, delta).unwrap();
        let mut g = HermitianGram::new(
            component_template(ring, (seed % 3) as i64 * 2, 1, Tail::Unit { a: 3 }).unwrap(),
        )
        .unwrap();
        if conj {
            g = g.random_isometry_conjugate(seed).0;
        }
        let f = LatticeFile::from_gram(Some(format!("p{seed}")), &g);
        let back = LatticeFile::parse(&f.emit()).unwrap();
        prop_assert_eq!(&back, &f);
        let hermdens_cli::format::Input::Gram(h) = back.input().unwrap() else {
            panic!("gram expected")
        };
        prop_assert_eq!(h, g);
    }

    #[test]
    fn profile_file_round_trip(
        parts in proptest::collection::vec((-3i64..4, tail_strategy(), 0usize..2), 1..4),
        f in prop_oneof![Just(None), Just(Some(2u64)), Just(Some(8))],
    ) {
        let mut components = Vec::new();
        let mut used = std::collections::BTreeSet::new();
        for (half, (tail, params, tail_rank), h) in parts {
            let odd = matches!(tail.as_str(), "h1" | "a_4a_2delta_pi");
            let scale = 2 * half + i64::from(odd);
            let rank = tail_rank + 2 * h + if tail == "none" && h == 0 { 2 } else { 0 };
            if used.insert(scale) {
                components.push(ComponentSpec { scale, rank, tail, params });
            }
        }
        let file = LatticeFile {
            format_version: 1,
            name: None,
            delta: 1,
            precision_bits: 16,
            gram: None,
            profile: Some(ProfileSpec { f, components }),
        };
        let back = LatticeFile::parse(&file.emit()).unwrap();
        prop_assert_eq!(&back, &file);
        prop_assert!(back.input().is_ok());
    }
}

#[test]
fn report_file_round_trip() {
    let dir = std::env::temp_dir().join(format!("hermdens-rt-{}", std::process::id()));
    std::fs::create_dir_all(&dir).unwrap();
    for f in corpus_generate(21, 12, 2, 2).unwrap() {
        let path = dir.join(format!("{}.json", f.name.clone().unwrap()));
        std::fs::write(&path, f.emit()).unwrap();
        let p = path.to_str().unwrap();
        for cmd in [
            vec!["jordan", p],
            vec!["density", p],
            vec!["verify", "fiber", p, "--points"],
            vec!["check-all", p, "--kmax", "5"],
        ] {
            let mut args = vec!["hermdens", "--json"];
            args.extend(cmd.iter().copied());
            let (_, out) = run(args);
            let r = ReportFile::parse(&out).unwrap();
            assert_eq!(ReportFile::parse(&r.emit()).unwrap(), r, "{cmd:?}");
            assert_eq!(r.input, f);
        }
    }
}
