//! Type, subtype and residue data of a Jordan decomposition.

use std::fmt;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::jordan::{JordanComponent, JordanDecomposition, Tail};

/// Type tag of a nonzero Jordan component.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub enum TypeTag {
    #[serde(rename = "I^o")]
    Io,
    #[serde(rename = "I^e")]
    Ie,
    #[serde(rename = "II-even")]
    IIEven,
    #[serde(rename = "I-odd")]
    IOdd,
    #[serde(rename = "II-odd")]
    IIOdd,
}

impl TypeTag {
    pub fn is_type_i(&self) -> bool {
        matches!(self, TypeTag::Io | TypeTag::Ie | TypeTag::IOdd)
    }

    pub fn as_str(&self) -> &'static str {
        match self {
            TypeTag::Io => "I^o",
            TypeTag::Ie => "I^e",
            TypeTag::IIEven => "II-even",
            TypeTag::IOdd => "I-odd",
            TypeTag::IIOdd => "II-odd",
        }
    }
}

impl fmt::Display for TypeTag {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

/// Classified component L_i.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct ProfileEntry {
    pub scale: i64,
    pub rank: usize,
    pub tag: TypeTag,
    pub bound: bool,
    /// Residue b̄_i, recorded for free type II components of even scale.
    pub bbar: Option<u8>,
    /// Reduction γ̄_i of the diagonal parameter of the normal form.
    pub gamma_bar: u8,
    pub hyperbolic_count: usize,
    pub tail: Tail,
}

impl ProfileEntry {
    pub fn is_even(&self) -> bool {
        self.scale.rem_euclid(2) == 0
    }

    pub fn is_type_i(&self) -> bool {
        self.tag.is_type_i()
    }

    /// Odd scale, type I and free.
    pub fn is_odd_free_i(&self) -> bool {
        self.tag == TypeTag::IOdd && !self.bound
    }
}

/// Canonical part of an entry: scale, rank, tag, bound flag, b̄.
pub type CanonicalEntry = (i64, usize, TypeTag, bool, Option<u8>);

/// Type data of every nonzero Jordan component, in increasing scale.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct TypeProfile {
    pub delta: i64,
    pub entries: Vec<ProfileEntry>,
}

impl TypeProfile {
    /// Classifies normal-form components; zero-rank components are dropped.
    pub fn classify(components: &[JordanComponent], delta: i64) -> Result<Self> {
        let mut comps: Vec<JordanComponent> =
            components.iter().copied().filter(|c| c.rank > 0).collect();
        comps.sort_by_key(|c| c.scale);
        if comps.windows(2).any(|w| w[0].scale == w[1].scale) {
            return Err(Error::Invalid("duplicate component scale".into()));
        }
        let find = |i: i64| comps.iter().find(|c| c.scale == i);
        let even_i = |i: i64| find(i).is_some_and(|c| c.is_even_type_i());
        let odd_i = |i: i64| match find(i) {
            Some(c) => {
                even_i(i - 1) || even_i(i + 1) || matches!(c.tail, Tail::A4a { .. })
            }
            None => even_i(i - 1) || even_i(i + 1),
        };
        let type_i = |i: i64| {
            if i.rem_euclid(2) == 0 {
                even_i(i)
            } else {
                odd_i(i)
            }
        };
        let mut entries = Vec::with_capacity(comps.len());
        for c in &comps {
            let i = c.scale;
            let (tag, bound) = if c.is_odd() {
                let bound = even_i(i - 1) || even_i(i + 1);
                let tag = if odd_i(i) { TypeTag::IOdd } else { TypeTag::IIOdd };
                (tag, bound)
            } else if c.is_even_type_i() {
                let tag = if c.rank % 2 == 1 { TypeTag::Io } else { TypeTag::Ie };
                (tag, type_i(i - 2) || type_i(i + 2))
            } else {
                (TypeTag::IIEven, type_i(i - 1) || type_i(i + 1))
            };
            let gamma = match c.tail {
                Tail::Unit { a } => ((a.rem_euclid(8) - 1) / 2 % 2) as u8,
                Tail::A12b1 { b } | Tail::A2d2b1 { b } => b.rem_euclid(2) as u8,
                Tail::A4a { a } if tag == TypeTag::IOdd && !bound => a.rem_euclid(2) as u8,
                _ => 0,
            };
            let bbar = (tag == TypeTag::IIEven && !bound).then_some(gamma);
            entries.push(ProfileEntry {
                scale: i,
                rank: c.rank,
                tag,
                bound,
                bbar,
                gamma_bar: gamma,
                hyperbolic_count: c.hyperbolic_count,
                tail: c.tail,
            });
        }
        Ok(Self { delta, entries })
    }

    pub fn from_decomposition(j: &JordanDecomposition) -> Result<Self> {
        Self::classify(&j.components, j.ring.delta_signed())
    }

    /// Total rank n.
    pub fn rank(&self) -> usize {
        self.entries.iter().map(|e| e.rank).sum()
    }

    pub fn entry(&self, scale: i64) -> Option<&ProfileEntry> {
        self.entries.iter().find(|e| e.scale == scale)
    }

    /// n_i, zero for absent scales.
    pub fn n(&self, scale: i64) -> usize {
        self.entry(scale).map_or(0, |e| e.rank)
    }

    /// Type I test for any scale, using the zero-lattice convention: absent
    /// even components are type II, absent odd ones are type I exactly when
    /// an even neighbour is.
    pub fn is_type_i(&self, scale: i64) -> bool {
        match self.entry(scale) {
            Some(e) => e.is_type_i(),
            None if scale.rem_euclid(2) == 0 => false,
            None => {
                self.entry(scale - 1).is_some_and(|e| e.is_type_i())
                    || self.entry(scale + 1).is_some_and(|e| e.is_type_i())
            }
        }
    }

    /// Bound flag for any scale under the same convention.
    pub fn is_bound(&self, scale: i64) -> bool {
        if let Some(e) = self.entry(scale) {
            return e.bound;
        }
        self.is_type_i(scale - 1) || self.is_type_i(scale + 1)
    }

    pub fn canonical(&self) -> Vec<CanonicalEntry> {
        self.entries
            .iter()
            .map(|e| (e.scale, e.rank, e.tag, e.bound, e.bbar))
            .collect()
    }

    /// Profile of π^k·L for even k: all scales shifted by k.
    pub fn shifted(&self, by: i64) -> Result<Self> {
        if by.rem_euclid(2) != 0 {
            return Err(Error::Invalid("scale shift must be even".into()));
        }
        let mut p = self.clone();
        for e in &mut p.entries {
            e.scale += by;
        }
        Ok(p)
    }

    /// Normal-form components realizing this profile.
    pub fn components(&self) -> Vec<JordanComponent> {
        self.entries
            .iter()
            .map(|e| JordanComponent {
                scale: e.scale,
                rank: e.rank,
                hyperbolic_count: e.hyperbolic_count,
                tail: e.tail,
                exact_tail: e.tail,
            })
            .collect()
    }

    pub fn min_scale(&self) -> Option<i64> {
        self.entries.first().map(|e| e.scale)
    }

    pub fn max_scale(&self) -> Option<i64> {
        self.entries.last().map(|e| e.scale)
    }
}

impl fmt::Display for TypeProfile {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.entries.is_empty() {
            return write!(f, "(empty)");
        }
        let parts: Vec<String> = self
            .entries
            .iter()
            .map(|e| {
                let mut s = format!(
                    "{}: n={} {} {}",
                    e.scale,
                    e.rank,
                    e.tag,
                    if e.bound { "bound" } else { "free" }
                );
                if let Some(b) = e.bbar {
                    s.push_str(&format!(" b̄={b}"));
                }
                s
            })
            .collect();
        write!(f, "{}", parts.join("; "))
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::gram::HermitianGram;
    use crate::jordan::jordan_split;
    use crate::Ring;

    fn comp(scale: i64, rank: usize, tail: Tail) -> JordanComponent {
        JordanComponent::new(scale, rank, tail, 1).unwrap()
    }

    #[test]
    fn rank_one_unit_is_free_io() {
        let p = TypeProfile::classify(&[comp(0, 1, Tail::Unit { a: 1 })], 1).unwrap();
        assert_eq!(p.canonical(), vec![(0, 1, TypeTag::Io, false, None)]);
    }

    #[test]
    fn hyperbolic_sum_is_free_type_ii() {
        let p = TypeProfile::classify(&[comp(0, 2, Tail::None), comp(1, 2, Tail::H1)], 1).unwrap();
        assert_eq!(
            p.canonical(),
            vec![
                (0, 2, TypeTag::IIEven, false, Some(0)),
                (1, 2, TypeTag::IIOdd, false, None)
            ]
        );
    }

    #[test]
    fn unit_plus_h1_is_bound_odd() {
        let p = TypeProfile::classify(
            &[comp(0, 1, Tail::Unit { a: 1 }), comp(1, 2, Tail::H1)],
            1,
        )
        .unwrap();
        assert_eq!(p.entries[1].tag, TypeTag::IOdd);
        assert!(p.entries[1].bound);
        assert!(!p.entries[0].bound);
    }

    #[test]
    fn zero_odd_lattice_binds_even_type_ii() {
        let p = TypeProfile::classify(
            &[comp(0, 2, Tail::None), comp(2, 1, Tail::Unit { a: 1 })],
            1,
        )
        .unwrap();
        assert!(p.is_type_i(1));
        assert!(p.entries[0].bound);
        assert_eq!(p.entries[0].bbar, None);
        assert!(!p.is_type_i(4));
        assert!(!p.is_type_i(5));
    }

    #[test]
    fn even_type_i_bound_by_distance_two() {
        let p = TypeProfile::classify(
            &[comp(0, 1, Tail::Unit { a: 1 }), comp(2, 2, Tail::A12b1 { b: 0 })],
            1,
        )
        .unwrap();
        assert!(p.entries.iter().all(|e| e.bound));
        assert_eq!(p.entries[1].tag, TypeTag::Ie);
    }

    #[test]
    fn classification_from_gram() {
        let r = Ring::new(16, 1).unwrap();
        let g = HermitianGram::from_pairs(
            r,
            &[
                vec![(1, 0), (0, 0), (0, 0)],
                vec![(0, 0), (0, 0), (0, 1)],
                vec![(0, 0), (0, -1), (0, 0)],
            ],
        )
        .unwrap();
        let p = TypeProfile::from_decomposition(&jordan_split(&g).unwrap()).unwrap();
        assert_eq!(
            p.canonical(),
            vec![(0, 1, TypeTag::Io, false, None), (1, 2, TypeTag::IOdd, true, None)]
        );
    }

    #[test]
    fn shift_keeps_tags() {
        let p = TypeProfile::classify(
            &[comp(0, 1, Tail::Unit { a: 3 }), comp(1, 2, Tail::A4a { a: 1 })],
            1,
        )
        .unwrap();
        let q = p.shifted(-4).unwrap();
        assert_eq!(q.entries[0].scale, -4);
        assert_eq!(q.entries[1].tag, p.entries[1].tag);
        assert!(p.shifted(1).is_err());
    }
}
