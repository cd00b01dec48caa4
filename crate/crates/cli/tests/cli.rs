use std::path::PathBuf;
use std::process::Command;

use hermdens::{HermitianGram, Ring};
use hermdens_cli::corpus::corpus_generate;
use hermdens_cli::format::{Input, LatticeFile, Outcome, ReportFile};
use hermdens_cli::{run, run_report};

fn scratch(name: &str, text: &str) -> PathBuf {
    let dir = std::env::temp_dir().join(format!("hermdens-cli-{}", std::process::id()));
    std::fs::create_dir_all(&dir).unwrap();
    let path = dir.join(name);
    std::fs::write(&path, text).unwrap();
    path
}

const UNIT: &str = r#"{"format_version":1,"delta":1,"precision_bits":16,"gram":[[{"a":1,"b":0}]]}"#;
const H0: &str = r#"{"format_version":1,"delta":1,"precision_bits":16,
    "gram":[[{"a":0,"b":0},{"a":1,"b":0}],[{"a":1,"b":0},{"a":0,"b":0}]]}"#;
const PROFILE: &str = r#"{"format_version":1,"delta":1,"profile":{"components":[
    {"scale":0,"rank":1,"tail":"unit","params":{"a":1}},{"scale":2,"rank":2,"tail":"none"}]}}"#;

fn json(args: &[&str]) -> (i32, ReportFile) {
    let mut full = vec!["hermdens", "--json"];
    full.extend_from_slice(args);
    let (code, out) = run(full);
    (code, ReportFile::parse(&out).unwrap_or_else(|e| panic!("{e}: {out}")))
}

#[test]
fn density_of_rank_one_unit() {
    let p = scratch("unit.json", UNIT);
    let (code, r) = json(&["density", p.to_str().unwrap()]);
    assert_eq!(code, 0);
    let d = r.density.unwrap();
    assert_eq!(d.beta_l, "2");
    assert_eq!(d.fiber_count, "4");
    assert_eq!(d.beta, 1);
}

#[test]
fn check_all_on_hyperbolic_plane() {
    let p = scratch("h0.json", H0);
    let (code, r) = json(&["check-all", p.to_str().unwrap()]);
    assert_eq!(code, 0);
    assert_eq!(r.density.as_ref().unwrap().beta_l, "4");
    assert_eq!(r.density.as_ref().unwrap().fiber_count, "16");
    assert_eq!(r.naive.as_ref().unwrap().value.as_deref(), Some("4"));
    assert_eq!(r.fiber.as_ref().unwrap().enumeration.count, 16);
    assert!(r.checks.iter().all(|c| c.outcome == Outcome::Pass), "{:?}", r.checks);
    assert_eq!(r.checks.len(), 5);
}

#[test]
fn profile_input_refuses_oracles() {
    let p = scratch("profile.json", PROFILE);
    let p = p.to_str().unwrap();
    let (code, r) = json(&["classify", p]);
    assert_eq!(code, 0);
    assert_eq!(r.profile.unwrap().entries.len(), 2);
    let (code, r) = json(&["density", p, "--f", "4"]);
    assert_eq!(code, 0);
    assert_eq!(r.density.unwrap().f, 4);
    for cmd in [vec!["verify", "naive", p], vec!["verify", "fiber", p]] {
        let (code, r) = json(&cmd);
        assert_eq!(code, 4, "{cmd:?}");
        assert!(r.error.unwrap().contains("capability"));
    }
    let (code, r) = json(&["check-all", p]);
    assert_eq!(code, 0);
    assert!(r.checks.iter().any(|c| c.outcome == Outcome::Skipped));
}

#[test]
fn exit_codes() {
    let bad_json = scratch("bad.json", "{");
    let low = scratch(
        "low.json",
        r#"{"format_version":1,"delta":1,"precision_bits":4,"gram":[[{"a":1,"b":0}]]}"#,
    );
    let big = corpus_generate(3, 40, 4, 1)
        .unwrap()
        .into_iter()
        .find(|f| f.gram.as_ref().is_some_and(|g| g.len() == 4))
        .expect("a rank-4 lattice");
    let big = scratch("big.json", &big.emit());
    let unit = scratch("unit2.json", UNIT);
    let s = |p: &PathBuf| p.to_str().unwrap().to_string();
    let cases: Vec<(Vec<String>, i32)> = vec![
        (vec!["density".into(), s(&bad_json)], 2),
        (vec!["density".into(), "/nonexistent/x.json".into()], 2),
        (vec!["density".into(), s(&unit), "--f".into(), "6".into()], 2),
        (vec!["frobnicate".into()], 2),
        (vec!["verify".into(), "naive".into(), s(&low), "--kmax".into(), "8".into()], 3),
        (vec!["verify".into(), "fiber".into(), s(&big)], 4),
        (vec!["verify".into(), "naive".into(), s(&big)], 4),
        (vec!["--help".into()], 0),
    ];
    for (args, want) in cases {
        let mut full = vec!["hermdens".to_string()];
        full.extend(args.clone());
        let (code, out) = run(full);
        assert_eq!(code, want, "{args:?}: {out}");
    }
}

#[test]
fn failing_check_maps_to_mismatch() {
    let file = LatticeFile::parse(UNIT).unwrap();
    let (code, r) = run_report("custom", file, |r, _| {
        r.check("forced", Outcome::Fail, "always fails");
        Ok(())
    });
    assert_eq!(code, 5);
    assert_eq!(r.exit_code, 5);
}

#[test]
fn binary_exit_codes_and_streams() {
    let exe = env!("CARGO_BIN_EXE_hermdens");
    let unit = scratch("unit3.json", UNIT);
    let ok = Command::new(exe).args(["density"]).arg(&unit).output().unwrap();
    assert_eq!(ok.status.code(), Some(0));
    assert!(String::from_utf8_lossy(&ok.stdout).contains("β_L      = 2"));
    let bad = Command::new(exe).args(["density", "/nonexistent.json"]).output().unwrap();
    assert_eq!(bad.status.code(), Some(2));
    assert!(bad.stdout.is_empty());
    assert!(String::from_utf8_lossy(&bad.stderr).starts_with("error:"));
}

#[test]
fn corpus_command_is_deterministic() {
    let args = ["hermdens", "--json", "corpus", "--seed", "11", "--count", "12"];
    let (c1, a) = run(args);
    let (c2, b) = run(args);
    assert_eq!((c1, c2), (0, 0));
    assert_eq!(a, b);
    let files: Vec<LatticeFile> = serde_json::from_str(&a).unwrap();
    assert_eq!(files.len(), 12);
    for f in &files {
        let Input::Gram(g) = f.input().unwrap() else { panic!("gram expected") };
        assert!(g.validate().is_empty());
    }
}

#[test]
fn corpus_out_directory() {
    let dir = std::env::temp_dir().join(format!("hermdens-corpus-{}", std::process::id()));
    let (code, table) = run([
        "hermdens",
        "corpus",
        "--seed",
        "4",
        "--count",
        "13",
        "--max-rank",
        "3",
        "--out",
        dir.to_str().unwrap(),
    ]);
    assert_eq!(code, 0);
    assert_eq!(table.lines().count(), 14);
    let written: Vec<_> = std::fs::read_dir(&dir).unwrap().collect();
    assert_eq!(written.len(), 13);
    for entry in written {
        let path = entry.unwrap().path();
        let (code, r) = json(&["check-all", path.to_str().unwrap()]);
        assert_eq!(code, 0, "{}: {:?}", path.display(), r.checks);
    }
}

#[test]
fn jordan_reports_transform() {
    let ring = Ring::new(16, 3).unwrap();
    let g = HermitianGram::from_pairs(
        ring,
        &[vec![(2, 0), (1, 1)], vec![(1, -1), (4, 0)]],
    )
    .unwrap();
    let p = scratch("conj.json", &LatticeFile::from_gram(None, &g).emit());
    let (code, r) = json(&["jordan", p.to_str().unwrap()]);
    assert_eq!(code, 0);
    let j = r.jordan.unwrap();
    let pairs = |m: &Vec<Vec<hermdens_cli::format::Entry>>| -> Vec<Vec<(i64, i64)>> {
        m.iter().map(|r| r.iter().map(|e| (e.a, e.b)).collect()).collect()
    };
    let u = hermdens::Mat::from_pairs(ring, &pairs(&j.transform)).unwrap();
    let nf = hermdens::Mat::from_pairs(ring, &pairs(&j.normal_form)).unwrap();
    assert_eq!(g.mat().congruence(&u), nf);
}
