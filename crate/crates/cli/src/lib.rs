//! Command dispatch, corpus generation and reports for the `hermdens` binary.

pub mod corpus;
pub mod format;
pub mod render;

use std::ffi::OsString;
use std::path::{Path, PathBuf};

use clap::{Parser, Subcommand};
use rayon::prelude::*;
use serde::Serialize;

use hermdens::fiber::{verify_fiber, FiberLimits, DEFAULT_MAX_CANDIDATES};
use hermdens::naive::{density_estimate, DEFAULT_MAX_STATES};
use hermdens::sublattice::check_sublattices;
use hermdens::{jordan_split, local_density, Error, JordanDecomposition, Result, TypeProfile};

use crate::format::{Input, JordanReport, LatticeFile, Outcome, ReportFile};

/// Largest rank that `check-all` hands to the naive oracle.
pub const NAIVE_CHECK_MAX_RANK: usize = 2;

#[derive(Debug, Parser)]
#[command(name = "hermdens", version, about = "Local densities of dyadic hermitian lattices")]
pub struct Cli {
    /// Machine-readable JSON output.
    #[arg(long, global = true)]
    pub json: bool,
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Jordan splitting: normal form and change of basis.
    Jordan { file: PathBuf },
    /// Type profile of every Jordan component.
    Classify { file: PathBuf },
    /// Closed-form local density.
    Density {
        file: PathBuf,
        /// Residue field size 2^d.
        #[arg(long)]
        f: Option<u64>,
    },
    /// Cross-check the formula against a counting oracle.
    Verify {
        #[command(subcommand)]
        oracle: Oracle,
    },
    /// Emit generated lattice files.
    Corpus {
        #[arg(long, default_value_t = 0)]
        seed: u64,
        #[arg(long, default_value_t = 12)]
        count: usize,
        #[arg(long, default_value_t = 2)]
        max_rank: usize,
        #[arg(long, default_value_t = 3)]
        max_scale: i64,
        /// Directory receiving one <name>.json per lattice.
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Density, both oracles, identities, sublattices and canonicity.
    CheckAll {
        file: PathBuf,
        #[arg(long, default_value_t = 8)]
        kmax: u32,
        #[arg(long, default_value_t = DEFAULT_MAX_STATES)]
        max_states: usize,
        #[arg(long, default_value_t = DEFAULT_MAX_CANDIDATES)]
        max_candidates: u64,
    },
}

#[derive(Debug, Subcommand)]
pub enum Oracle {
    /// Counts of automorphisms modulo 2^k.
    Naive {
        file: PathBuf,
        #[arg(long, default_value_t = 8)]
        kmax: u32,
        #[arg(long, default_value_t = DEFAULT_MAX_STATES)]
        max_states: usize,
    },
    /// Exhaustive count of special fiber points.
    Fiber {
        file: PathBuf,
        #[arg(long, default_value_t = DEFAULT_MAX_CANDIDATES)]
        max_candidates: u64,
        /// Include every point in the report.
        #[arg(long)]
        points: bool,
    },
}

/// Exit code and text of one invocation.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct RunOutput {
    pub code: i32,
    pub text: String,
    /// Plain error message rather than a report.
    pub diagnostic: bool,
}

/// Parses arguments, runs the command and returns (exit code, output).
pub fn run<I, T>(args: I) -> (i32, String)
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let out = execute(args);
    (out.code, out.text)
}

pub fn execute<I, T>(args: I) -> RunOutput
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(c) => c,
        Err(e) => {
            let code = if e.use_stderr() { 2 } else { 0 };
            return RunOutput {
                code,
                text: e.render().to_string(),
                diagnostic: code != 0,
            };
        }
    };
    let json = cli.json;
    match cli.command {
        Command::Corpus {
            seed,
            count,
            max_rank,
            max_scale,
            out,
        } => finish_plain(json, run_corpus(seed, count, max_rank, max_scale, out.as_deref(), json)),
        Command::Jordan { file } => run_file("jordan", &file, json, |r, input| {
            let d = match input {
                Input::Gram(g) => jordan_split(g)?,
                Input::Profile { profile, .. } => {
                    let ring = r.input.ring()?;
                    JordanDecomposition::from_components(ring, profile.components())?
                }
            };
            r.jordan = Some(JordanReport::new(&d));
            r.profile = Some(TypeProfile::from_decomposition(&d)?);
            Ok(())
        }),
        Command::Classify { file } => run_file("classify", &file, json, |r, input| {
            r.profile = Some(profile_of(input)?);
            Ok(())
        }),
        Command::Density { file, f } => run_file("density", &file, json, |r, input| {
            density_stage(r, input, f)
        }),
        Command::Verify {
            oracle:
                Oracle::Naive {
                    file,
                    kmax,
                    max_states,
                },
        } => run_file("verify naive", &file, json, |r, input| {
            let g = input.gram()?;
            density_stage(r, input, Some(2))?;
            naive_stage(r, g, kmax, max_states)
        }),
        Command::Verify {
            oracle:
                Oracle::Fiber {
                    file,
                    max_candidates,
                    points,
                },
        } => run_file("verify fiber", &file, json, |r, input| {
            let d = input.decomposition()?;
            fiber_stage(r, &d, max_candidates, points)
        }),
        Command::CheckAll {
            file,
            kmax,
            max_states,
            max_candidates,
        } => run_file("check-all", &file, json, |r, input| {
            check_all(r, input, kmax, max_states, max_candidates)
        }),
    }
}

fn finish_plain(json: bool, result: Result<String>) -> RunOutput {
    let (code, text, diagnostic) = match result {
        Ok(s) => (0, s, false),
        Err(e) if json => {
            #[derive(Serialize)]
            struct ErrorOut {
                error: String,
                exit_code: i32,
            }
            let out = ErrorOut {
                error: e.to_string(),
                exit_code: e.exit_code(),
            };
            (e.exit_code(), serde_json::to_string_pretty(&out).expect("serializes"), false)
        }
        Err(e) => (e.exit_code(), format!("error: {e}\n"), true),
    };
    RunOutput {
        code,
        text,
        diagnostic,
    }
}

fn read_file(path: &Path) -> Result<LatticeFile> {
    let text = if path.as_os_str() == "-" {
        std::io::read_to_string(std::io::stdin())
    } else {
        std::fs::read_to_string(path)
    }
    .map_err(|e| Error::Parse(format!("{}: {e}", path.display())))?;
    LatticeFile::parse(&text)
}

fn run_file(
    command: &str,
    path: &Path,
    json: bool,
    body: impl FnOnce(&mut ReportFile, &Input) -> Result<()>,
) -> RunOutput {
    let file = match read_file(path) {
        Ok(f) => f,
        Err(e) => return finish_plain(json, Err(e)),
    };
    let (code, report) = run_report(command, file, body);
    let text = if json {
        report.emit()
    } else {
        render::human(&report)
    };
    RunOutput {
        code,
        text,
        diagnostic: false,
    }
}

/// Runs one command body on a parsed file and fills in the exit code.
pub fn run_report(
    command: &str,
    file: LatticeFile,
    body: impl FnOnce(&mut ReportFile, &Input) -> Result<()>,
) -> (i32, ReportFile) {
    let mut report = ReportFile::new(command, file);
    let outcome = report.input.input().and_then(|input| body(&mut report, &input));
    let code = match outcome {
        Ok(()) => report.checks_exit_code(),
        Err(e) => {
            report.error = Some(e.to_string());
            e.exit_code()
        }
    };
    report.exit_code = code;
    (code, report)
}

fn profile_of(input: &Input) -> Result<TypeProfile> {
    match input {
        Input::Gram(g) => TypeProfile::from_decomposition(&jordan_split(g)?),
        Input::Profile { profile, .. } => Ok(profile.clone()),
    }
}

fn density_stage(r: &mut ReportFile, input: &Input, f: Option<u64>) -> Result<()> {
    let profile = profile_of(input)?;
    let file_f = match input {
        Input::Profile { f, .. } => *f,
        Input::Gram(_) => None,
    };
    let f = f.or(file_f).unwrap_or(2);
    let report = local_density(&profile, f)?;
    let failed: Vec<&str> = report
        .identities
        .iter()
        .filter(|c| !c.holds)
        .map(|c| c.name.as_str())
        .collect();
    if failed.is_empty() {
        r.check("identities", Outcome::Pass, format!("{} identities hold", report.identities.len()));
    } else {
        r.check("identities", Outcome::Fail, failed.join("; "));
    }
    r.profile = Some(profile);
    r.density = Some(report);
    Ok(())
}

fn formula_at_two(r: &ReportFile) -> Result<num_rational::BigRational> {
    match &r.density {
        Some(d) if d.f == 2 => Ok(d.beta_l_value()),
        _ => {
            let p = r.profile.as_ref().ok_or_else(|| Error::Invalid("profile missing".into()))?;
            Ok(local_density(p, 2)?.beta_l_value())
        }
    }
}

fn naive_stage(
    r: &mut ReportFile,
    g: &hermdens::HermitianGram,
    kmax: u32,
    max_states: usize,
) -> Result<()> {
    let seq = density_estimate(g, kmax, max_states)?;
    let formula = formula_at_two(r)?;
    let (outcome, detail) = match seq.value_rational() {
        _ if seq.partial => (
            Outcome::Inconclusive,
            format!("state budget reached after {} levels", seq.levels.len()),
        ),
        None => (
            Outcome::Inconclusive,
            format!("ratios not stable by k = {kmax}"),
        ),
        Some(v) if v == formula => (
            Outcome::Pass,
            format!(
                "stabilized at k = {} with {v}",
                seq.stabilized_at.expect("value implies stabilization")
            ),
        ),
        Some(v) => (Outcome::Fail, format!("naive {v} vs formula {formula}")),
    };
    r.check("naive = formula", outcome, detail);
    r.naive = Some(seq);
    Ok(())
}

fn fiber_stage(
    r: &mut ReportFile,
    d: &JordanDecomposition,
    max_candidates: u64,
    points: bool,
) -> Result<()> {
    let limits = FiberLimits {
        max_candidates,
        ..FiberLimits::default()
    };
    let report = verify_fiber(d, limits, points)?;
    let e = &report.enumeration;
    let (outcome, detail) = if e.partial {
        (
            Outcome::Inconclusive,
            format!("searched {} of {} candidates", e.searched, e.candidates),
        )
    } else if report.matches {
        (Outcome::Pass, format!("{} points = #G̃(F₂)", e.count))
    } else {
        (
            Outcome::Fail,
            format!("{} points vs #G̃(F₂) = {}", e.count, report.expected),
        )
    };
    r.check("fiber = formula", outcome, detail);
    r.fiber = Some(report);
    Ok(())
}

fn check_all(
    r: &mut ReportFile,
    input: &Input,
    kmax: u32,
    max_states: usize,
    max_candidates: u64,
) -> Result<()> {
    density_stage(r, input, Some(2))?;
    let Input::Gram(g) = input else {
        for name in ["naive = formula", "fiber = formula", "sublattices", "canonicity"] {
            r.check(name, Outcome::Skipped, "no Gram matrix");
        }
        return Ok(());
    };
    let d = jordan_split(g)?;
    r.jordan = Some(JordanReport::new(&d));
    let n = g.rank();
    if n <= NAIVE_CHECK_MAX_RANK {
        naive_stage(r, g, kmax.min(g.ring().precision()), max_states)?;
    } else {
        r.check(
            "naive = formula",
            Outcome::Skipped,
            format!("rank {n} above {NAIVE_CHECK_MAX_RANK}"),
        );
    }
    if n <= FiberLimits::default().max_rank {
        fiber_stage(r, &d, max_candidates, false)?;
    } else {
        r.check("fiber = formula", Outcome::Skipped, format!("rank {n} above fiber limit"));
    }
    let sub = check_sublattices(&d)?;
    r.check(
        "sublattices",
        if sub.matches { Outcome::Pass } else { Outcome::Fail },
        format!("{} scales compared with closed forms", sub.computed.len()),
    );
    r.sublattices = Some(sub);
    let (outcome, detail) = canonicity(g, r.profile.as_ref().expect("set by density stage"))?;
    r.check("canonicity", outcome, detail);
    Ok(())
}

/// Profile and β_L under conjugation, and the scale shift under π-rescaling.
fn canonicity(g: &hermdens::HermitianGram, p: &TypeProfile) -> Result<(Outcome, String)> {
    let beta = local_density(p, 2)?.beta_l_value();
    for seed in 0..4u64 {
        let (h, _) = g.random_isometry_conjugate(seed);
        let q = TypeProfile::from_decomposition(&jordan_split(&h)?)?;
        if q.canonical() != p.canonical() {
            return Ok((Outcome::Fail, format!("profile changed under conjugation {seed}")));
        }
        if local_density(&q, 2)?.beta_l_value() != beta {
            return Ok((Outcome::Fail, format!("β_L changed under conjugation {seed}")));
        }
    }
    let scaled = TypeProfile::from_decomposition(&jordan_split(&g.rescale_by_pi())?)?;
    if scaled.canonical() != p.shifted(2)?.canonical() {
        return Ok((Outcome::Fail, "π-rescaling does not shift scales by 2".into()));
    }
    Ok((Outcome::Pass, "4 conjugations and one π-rescaling".into()))
}

fn run_corpus(
    seed: u64,
    count: usize,
    max_rank: usize,
    max_scale: i64,
    out: Option<&Path>,
    json: bool,
) -> Result<String> {
    let files = corpus::corpus_generate(seed, count, max_rank, max_scale)?;
    if let Some(dir) = out {
        std::fs::create_dir_all(dir).map_err(|e| Error::Invalid(format!("{}: {e}", dir.display())))?;
        for f in &files {
            let name = f.name.clone().unwrap_or_default();
            let path = dir.join(format!("{name}.json"));
            std::fs::write(&path, f.emit() + "\n")
                .map_err(|e| Error::Invalid(format!("{}: {e}", path.display())))?;
        }
    }
    if json {
        return Ok(serde_json::to_string_pretty(&files).expect("serializes"));
    }
    let rows: Vec<Result<(String, i64, usize, String)>> = files
        .par_iter()
        .map(|f| {
            let Input::Gram(g) = f.input()? else {
                unreachable!("corpus files carry Gram matrices")
            };
            let p = TypeProfile::from_decomposition(&jordan_split(&g)?)?;
            Ok((f.name.clone().unwrap_or_default(), f.delta, g.rank(), p.to_string()))
        })
        .collect();
    let mut s = format!("{:<14} {:>5} {:>4}  profile\n", "name", "delta", "rank");
    for row in rows {
        let (name, delta, rank, p) = row?;
        s.push_str(&format!("{name:<14} {delta:>5} {rank:>4}  {p}\n"));
    }
    Ok(s)
}
