//! Versioned JSON formats for lattice inputs and run reports.

use serde::{Deserialize, Serialize};

use hermdens::density::DensityReport;
use hermdens::dyadic::DEFAULT_PRECISION;
use hermdens::fiber::FiberReport;
use hermdens::naive::CountSequence;
use hermdens::sublattice::SublatticeCheck;
use hermdens::{
    jordan_split, Error, HermitianGram, JordanComponent, JordanDecomposition, Result, Ring, Tail,
    TypeProfile,
};

pub const FORMAT_VERSION: u32 = 1;

/// Gram entry a + bπ.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct Entry {
    pub a: i64,
    pub b: i64,
}

#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct TailParams {
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub a: Option<i64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub b: Option<i64>,
}

/// One component of a profile-only input.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct ComponentSpec {
    pub scale: i64,
    pub rank: usize,
    /// One of none, unit, a_1_2b_1, a_2delta_2b_1, a_4a_2delta_pi, h1.
    pub tail: String,
    #[serde(default)]
    pub params: TailParams,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct ProfileSpec {
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub f: Option<u64>,
    pub components: Vec<ComponentSpec>,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct LatticeFile {
    pub format_version: u32,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub name: Option<String>,
    pub delta: i64,
    #[serde(default = "default_precision")]
    pub precision_bits: u32,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub gram: Option<Vec<Vec<Entry>>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub profile: Option<ProfileSpec>,
}

fn default_precision() -> u32 {
    DEFAULT_PRECISION
}

/// Parsed input: a validated Gram matrix or a bare profile.
#[derive(Clone, Debug)]
pub enum Input {
    Gram(HermitianGram),
    Profile { profile: TypeProfile, f: Option<u64> },
}

impl ComponentSpec {
    pub fn from_component(c: &JordanComponent) -> Self {
        let (tail, params) = match c.exact_tail {
            Tail::None => ("none", TailParams::default()),
            Tail::Unit { a } => ("unit", TailParams { a: Some(a), b: None }),
            Tail::A12b1 { b } => ("a_1_2b_1", TailParams { a: None, b: Some(b) }),
            Tail::A2d2b1 { b } => ("a_2delta_2b_1", TailParams { a: None, b: Some(b) }),
            Tail::A4a { a } => ("a_4a_2delta_pi", TailParams { a: Some(a), b: None }),
            Tail::H1 => ("h1", TailParams::default()),
        };
        Self {
            scale: c.scale,
            rank: c.rank,
            tail: tail.into(),
            params,
        }
    }

    pub fn tail(&self) -> Result<Tail> {
        let need = |v: Option<i64>, name: &str| {
            v.ok_or_else(|| Error::Parse(format!("tail {} needs parameter {name}", self.tail)))
        };
        Ok(match self.tail.as_str() {
            "none" => Tail::None,
            "unit" => Tail::Unit { a: need(self.params.a, "a")? },
            "a_1_2b_1" => Tail::A12b1 { b: need(self.params.b, "b")? },
            "a_2delta_2b_1" => Tail::A2d2b1 { b: need(self.params.b, "b")? },
            "a_4a_2delta_pi" => Tail::A4a { a: need(self.params.a, "a")? },
            "h1" => Tail::H1,
            other => return Err(Error::Parse(format!("unknown tail kind {other:?}"))),
        })
    }

    pub fn component(&self, delta: i64) -> Result<JordanComponent> {
        JordanComponent::new(self.scale, self.rank, self.tail()?, delta)
    }
}

impl LatticeFile {
    pub fn from_gram(name: Option<String>, g: &HermitianGram) -> Self {
        let ring = g.ring();
        let gram = g
            .mat()
            .to_pairs()
            .into_iter()
            .map(|row| row.into_iter().map(|(a, b)| Entry { a, b }).collect())
            .collect();
        Self {
            format_version: FORMAT_VERSION,
            name,
            delta: ring.delta_signed(),
            precision_bits: ring.precision(),
            gram: Some(gram),
            profile: None,
        }
    }

    pub fn from_components(
        name: Option<String>,
        delta: i64,
        f: Option<u64>,
        components: &[JordanComponent],
    ) -> Self {
        Self {
            format_version: FORMAT_VERSION,
            name,
            delta,
            precision_bits: DEFAULT_PRECISION,
            gram: None,
            profile: Some(ProfileSpec {
                f,
                components: components.iter().map(ComponentSpec::from_component).collect(),
            }),
        }
    }

    pub fn parse(text: &str) -> Result<Self> {
        let file: Self =
            serde_json::from_str(text).map_err(|e| Error::Parse(format!("lattice file: {e}")))?;
        if file.format_version != FORMAT_VERSION {
            return Err(Error::Parse(format!(
                "unsupported format_version {} (expected {FORMAT_VERSION})",
                file.format_version
            )));
        }
        Ok(file)
    }

    pub fn emit(&self) -> String {
        serde_json::to_string_pretty(self).expect("lattice file serializes")
    }

    pub fn ring(&self) -> Result<Ring> {
        Ring::new(self.precision_bits, self.delta).map_err(|e| Error::Parse(e.to_string()))
    }

    /// Validates the file and builds the pipeline input.
    pub fn input(&self) -> Result<Input> {
        let ring = self.ring()?;
        match (&self.gram, &self.profile) {
            (Some(rows), None) => {
                let pairs: Vec<Vec<(i64, i64)>> = rows
                    .iter()
                    .map(|r| r.iter().map(|e| (e.a, e.b)).collect())
                    .collect();
                if pairs.iter().any(|r| r.len() != pairs.len()) {
                    return Err(Error::Parse("gram must be a square array".into()));
                }
                let g = HermitianGram::from_pairs(ring, &pairs)
                    .map_err(|e| Error::Parse(e.to_string()))?;
                Ok(Input::Gram(g))
            }
            (None, Some(spec)) => {
                let comps = spec
                    .components
                    .iter()
                    .map(|c| c.component(self.delta))
                    .collect::<Result<Vec<_>>>()
                    .map_err(|e| Error::Parse(e.to_string()))?;
                let profile = TypeProfile::classify(&comps, self.delta)
                    .map_err(|e| Error::Parse(e.to_string()))?;
                Ok(Input::Profile { profile, f: spec.f })
            }
            _ => Err(Error::Parse("exactly one of gram and profile must be present".into())),
        }
    }
}

impl Input {
    pub fn decomposition(&self) -> Result<JordanDecomposition> {
        match self {
            Input::Gram(g) => jordan_split(g),
            Input::Profile { profile, .. } => Err(Error::Capability(format!(
                "no Gram matrix for profile input [{profile}]"
            ))),
        }
    }

    pub fn gram(&self) -> Result<&HermitianGram> {
        match self {
            Input::Gram(g) => Ok(g),
            Input::Profile { .. } => {
                Err(Error::Capability("counting oracles need a Gram matrix".into()))
            }
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct JordanReport {
    pub components: Vec<JordanComponent>,
    pub normal_form: Vec<Vec<Entry>>,
    /// U with σ(ᵗU)·G·U = normal form.
    pub transform: Vec<Vec<Entry>>,
}

impl JordanReport {
    pub fn new(d: &JordanDecomposition) -> Self {
        let entries = |m: &hermdens::Mat| {
            m.to_pairs()
                .into_iter()
                .map(|row| row.into_iter().map(|(a, b)| Entry { a, b }).collect())
                .collect()
        };
        Self {
            components: d.components.clone(),
            normal_form: entries(&d.normal_form),
            transform: entries(&d.transform),
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Outcome {
    Pass,
    Fail,
    Inconclusive,
    Skipped,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct CrossCheck {
    pub name: String,
    pub outcome: Outcome,
    pub detail: String,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct ReportFile {
    pub format_version: u32,
    pub command: String,
    pub input: LatticeFile,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub jordan: Option<JordanReport>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub profile: Option<TypeProfile>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub density: Option<DensityReport>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub naive: Option<CountSequence>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub fiber: Option<FiberReport>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub sublattices: Option<SublatticeCheck>,
    pub checks: Vec<CrossCheck>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub error: Option<String>,
    pub exit_code: i32,
}

impl ReportFile {
    pub fn new(command: &str, input: LatticeFile) -> Self {
        Self {
            format_version: FORMAT_VERSION,
            command: command.into(),
            input,
            jordan: None,
            profile: None,
            density: None,
            naive: None,
            fiber: None,
            sublattices: None,
            checks: Vec::new(),
            error: None,
            exit_code: 0,
        }
    }

    pub fn check(&mut self, name: &str, outcome: Outcome, detail: impl Into<String>) {
        self.checks.push(CrossCheck {
            name: name.into(),
            outcome,
            detail: detail.into(),
        });
    }

    /// Exit code implied by the checks: 0 when none failed or stayed open.
    pub fn checks_exit_code(&self) -> i32 {
        if self.checks.iter().any(|c| c.outcome == Outcome::Fail) {
            5
        } else if self.checks.iter().any(|c| c.outcome == Outcome::Inconclusive) {
            4
        } else {
            0
        }
    }

    pub fn parse(text: &str) -> Result<Self> {
        let r: Self =
            serde_json::from_str(text).map_err(|e| Error::Parse(format!("report file: {e}")))?;
        if r.format_version != FORMAT_VERSION {
            return Err(Error::Parse(format!(
                "unsupported format_version {}",
                r.format_version
            )));
        }
        Ok(r)
    }

    pub fn emit(&self) -> String {
        serde_json::to_string_pretty(self).expect("report serializes")
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn rank_one_unit_parses() {
        let text = r#"{"format_version":1,"delta":1,"precision_bits":16,"gram":[[{"a":1,"b":0}]]}"#;
        let f = LatticeFile::parse(text).unwrap();
        assert!(matches!(f.input().unwrap(), Input::Gram(ref g) if g.rank() == 1));
        assert_eq!(LatticeFile::parse(&f.emit()).unwrap(), f);
    }

    #[test]
    fn profile_parses() {
        let text = r#"{"format_version":1,"delta":3,"profile":{"f":4,"components":[
            {"scale":-1,"rank":2,"tail":"h1"},{"scale":0,"rank":1,"tail":"unit","params":{"a":1}}]}}"#;
        let f = LatticeFile::parse(text).unwrap();
        let Input::Profile { profile, f } = f.input().unwrap() else {
            panic!("profile expected")
        };
        assert_eq!(f, Some(4));
        assert_eq!(profile.entries.len(), 2);
        assert!(profile.entries[0].bound);
    }

    #[test]
    fn rejects_bad_inputs() {
        let cases = [
            r#"{"format_version":2,"delta":1,"gram":[[{"a":1,"b":0}]]}"#,
            r#"{"format_version":1,"delta":1}"#,
            r#"{"format_version":1,"delta":1,"gram":[[{"a":0,"b":1}]]}"#,
            r#"{"format_version":1,"delta":2,"gram":[[{"a":1,"b":0}]]}"#,
            r#"{"format_version":1,"delta":1,"profile":{"components":[{"scale":0,"rank":1,"tail":"odd"}]}}"#,
            r#"{"format_version":1,"delta":1,"gram":[[{"a":1,"b":0},{"a":0,"b":0}]]}"#,
            "not json",
        ];
        for text in cases {
            let err = LatticeFile::parse(text).and_then(|f| f.input().map(|_| ()));
            assert!(matches!(err, Err(Error::Parse(_))), "{text}: {err:?}");
        }
    }
}
