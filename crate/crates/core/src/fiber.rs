//! Exhaustive count of the F₂-points of the special fiber of the smooth
//! integral model.
//!
//! A point is a tuple of coordinates in κ[π]/(π²), one per free variable of
//! the model. It is lifted to an integral endomorphism m by choosing 0/1
//! representatives and solving the divisibility relations exactly; the point
//! lies on the fiber when m is invertible modulo π and the coordinates of
//! σ(ᵗm)·h·m agree with those of h modulo 2.

use std::collections::HashSet;

use num_traits::ToPrimitive;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::density::{qualifies_for_beta, special_fiber_count};
use crate::dyadic::{RamifiedElem, Ring};
use crate::error::{Error, Result};
use crate::jordan::{JordanDecomposition, Tail};
use crate::matrix::Mat;
use crate::profile::{TypeProfile, TypeTag};

pub const DEFAULT_MAX_RANK: usize = 3;
pub const DEFAULT_MAX_CANDIDATES: u64 = 1 << 20;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct FiberLimits {
    pub max_rank: usize,
    pub max_candidates: u64,
}

impl Default for FiberLimits {
    fn default() -> Self {
        Self {
            max_rank: DEFAULT_MAX_RANK,
            max_candidates: DEFAULT_MAX_CANDIDATES,
        }
    }
}

/// Coordinates of a point, one value c₀ + 2c₁ per variable for c₀ + c₁π.
#[derive(Clone, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct FiberPoint {
    pub coords: Vec<u8>,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct FiberCount {
    pub rank: usize,
    pub variables: Vec<String>,
    pub candidates: u64,
    pub searched: u64,
    pub count: u64,
    pub partial: bool,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub points: Option<Vec<FiberPoint>>,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct FiberReport {
    #[serde(flatten)]
    pub enumeration: FiberCount,
    pub expected: u64,
    pub matches: bool,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct SubgroupCount {
    pub scale: i64,
    pub count: u64,
    pub nontrivial: u64,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
enum Shape {
    Plain,
    Io,
    Ie,
    OddFree,
}

#[derive(Clone, Copy, Debug)]
struct Block {
    scale: i64,
    offset: usize,
    size: usize,
    tag: TypeTag,
    bound: bool,
    shape: Shape,
}

impl Block {
    /// Row picked out by the marker vector of an even type I block.
    fn marker_row(&self) -> usize {
        match self.shape {
            Shape::Ie => self.offset + self.size - 2,
            _ => self.offset + self.size - 1,
        }
    }

    fn last(&self) -> usize {
        self.offset + self.size - 1
    }
}

#[derive(Clone, Debug)]
enum Source {
    Free(usize),
    /// π·var[star] minus the listed free positions.
    Derived { star: usize, minus: Vec<usize> },
}

#[derive(Clone, Debug)]
struct Slot {
    constant: u8,
    pi_exp: u32,
    source: Source,
}

#[derive(Clone, Debug)]
enum VarKind {
    Position(usize),
    Star(usize),
}

#[derive(Clone, Debug)]
struct Var {
    label: String,
    identity: u8,
    kind: VarKind,
}

/// Coordinate model of the special fiber for one normal form.
#[derive(Clone, Debug)]
pub struct FiberModel {
    ring: Ring,
    n: usize,
    blocks: Vec<Block>,
    slots: Vec<Slot>,
    vars: Vec<Var>,
    h: Mat,
    h_coords: Vec<u8>,
    profile: TypeProfile,
}

fn shape_offset(shape: Shape, size: usize, p: usize, q: usize) -> (u8, u32) {
    let l1 = size.wrapping_sub(2);
    let l2 = size.wrapping_sub(1);
    match shape {
        Shape::Plain => (0, 0),
        Shape::Io => match (p == l2, q == l2) {
            (true, true) => (1, 1),
            (false, false) => (0, 0),
            _ => (0, 1),
        },
        Shape::Ie => {
            let r = if p == l2 { 2 } else if p == l1 { 1 } else { 0 };
            let c = if q == l2 { 2 } else if q == l1 { 1 } else { 0 };
            match (r, c) {
                (0, 2) | (1, 0) | (1, 2) => (0, 1),
                (1, 1) | (2, 2) => (1, 1),
                _ => (0, 0),
            }
        }
        Shape::OddFree => {
            let r = if p == l2 { 2 } else if p == l1 { 1 } else { 0 };
            let c = if q == l2 { 2 } else if q == l1 { 1 } else { 0 };
            match (r, c) {
                (0, 1) | (2, 0) | (2, 1) => (0, 1),
                (1, 1) | (2, 2) => (1, 1),
                _ => (0, 0),
            }
        }
    }
}

fn code(x: RamifiedElem) -> u8 {
    let (a, b) = x.residue_pi2();
    a | (b << 1)
}

impl FiberModel {
    pub fn new(decomposition: &JordanDecomposition) -> Result<Self> {
        let profile = TypeProfile::from_decomposition(decomposition)?;
        if profile.min_scale().is_some_and(|s| s < 0) {
            return Err(Error::Capability(
                "fiber enumeration needs nonnegative scales".into(),
            ));
        }
        if let Some(e) = profile
            .entries
            .iter()
            .find(|e| e.tag == TypeTag::IOdd && e.bound && e.tail != Tail::H1)
        {
            return Err(Error::Domain(format!(
                "bound component at scale {} is not in normal form",
                e.scale
            )));
        }
        let max_scale = profile.max_scale().unwrap_or(0).max(0) as u32;
        let ring = Ring::new(24 + 2 * max_scale, decomposition.ring.delta_signed())?;
        let nf = JordanDecomposition::from_components(ring, decomposition.components.clone())?;
        let h = nf.normal_gram().into_mat();
        let n = nf.rank();

        let offsets = nf.offsets();
        let blocks: Vec<Block> = profile
            .entries
            .iter()
            .zip(&offsets)
            .map(|(e, &offset)| {
                let shape = match e.tag {
                    TypeTag::Io => Shape::Io,
                    TypeTag::Ie => Shape::Ie,
                    TypeTag::IOdd if !e.bound => Shape::OddFree,
                    _ => Shape::Plain,
                };
                Block {
                    scale: e.scale,
                    offset,
                    size: e.rank,
                    tag: e.tag,
                    bound: e.bound,
                    shape,
                }
            })
            .collect();

        let block_of = |idx: usize| {
            blocks
                .iter()
                .position(|b| idx >= b.offset && idx < b.offset + b.size)
                .expect("index inside some block")
        };
        let mut slots = Vec::with_capacity(n * n);
        for p in 0..n {
            for q in 0..n {
                let (bi, bj) = (&blocks[block_of(p)], &blocks[block_of(q)]);
                let e0 = (bj.scale - bi.scale).max(0) as u32;
                let (c, e) = if bi.scale == bj.scale {
                    shape_offset(bi.shape, bi.size, p - bi.offset, q - bi.offset)
                } else {
                    (0, 0)
                };
                slots.push(Slot {
                    constant: c,
                    pi_exp: e0 + e,
                    source: Source::Free(usize::MAX),
                });
            }
        }

        let type_i_block = |scale: i64| {
            blocks
                .iter()
                .find(|b| b.scale == scale && b.tag.is_type_i())
                .copied()
        };
        let mut stars: Vec<(String, usize)> = Vec::new();
        let mut derive = |slots: &mut Vec<Slot>, pos: usize, minus: Vec<usize>, label: String| {
            let star = stars.len();
            stars.push((label, pos));
            slots[pos].source = Source::Derived { star, minus };
        };
        for b in &blocks {
            match b.shape {
                Shape::Io | Shape::Ie => {
                    let (zr, zc) = if b.shape == Shape::Io {
                        (b.last(), b.last())
                    } else {
                        (b.last() - 1, b.last())
                    };
                    let minus = [b.scale - 2, b.scale + 2]
                        .iter()
                        .filter_map(|&s| type_i_block(s))
                        .map(|nb| nb.marker_row() * n + b.last())
                        .collect();
                    derive(&mut slots, zr * n + zc, minus, format!("z*[{}]", b.scale));
                }
                _ if b.tag == TypeTag::IOdd && b.bound => {
                    let lo = type_i_block(b.scale - 1);
                    let hi = type_i_block(b.scale + 1);
                    let (first, second) = match (lo, hi) {
                        (Some(l), h) => (l, h),
                        (None, Some(h)) => (h, None),
                        (None, None) => unreachable!("bound odd block has a type I neighbour"),
                    };
                    for q in 0..b.size {
                        let col = b.offset + q;
                        let minus = second.map(|s| s.marker_row() * n + col).into_iter().collect();
                        derive(
                            &mut slots,
                            first.marker_row() * n + col,
                            minus,
                            format!("m*[{}][{q}]", b.scale),
                        );
                    }
                    for q in 0..b.size {
                        let row = b.offset + q;
                        let minus = second.map(|s| row * n + s.last()).into_iter().collect();
                        derive(
                            &mut slots,
                            row * n + first.last(),
                            minus,
                            format!("m**[{}][{q}]", b.scale),
                        );
                    }
                }
                _ => {}
            }
        }

        let mut vars = Vec::with_capacity(n * n);
        for (pos, slot) in slots.iter_mut().enumerate() {
            if let Source::Free(_) = slot.source {
                let (p, q) = (pos / n, pos % n);
                let identity = u8::from(p == q && slot.constant == 0);
                slot.source = Source::Free(vars.len());
                vars.push(Var {
                    label: format!("m[{p},{q}]"),
                    identity,
                    kind: VarKind::Position(pos),
                });
            }
        }
        let first_star = vars.len();
        for (label, pos) in &stars {
            vars.push(Var {
                label: label.clone(),
                identity: 0,
                kind: VarKind::Star(*pos),
            });
        }
        for slot in &mut slots {
            if let Source::Derived { star, .. } = &mut slot.source {
                *star += first_star;
            }
        }
        debug_assert_eq!(vars.len(), n * n);

        let mut model = Self {
            ring,
            n,
            blocks,
            slots,
            vars,
            h_coords: Vec::new(),
            h,
            profile,
        };
        model.h_coords = model.form_coords(&model.h)?;
        Ok(model)
    }

    pub fn rank(&self) -> usize {
        self.n
    }

    pub fn profile(&self) -> &TypeProfile {
        &self.profile
    }

    pub fn variable_labels(&self) -> Vec<String> {
        self.vars.iter().map(|v| v.label.clone()).collect()
    }

    pub fn identity(&self) -> FiberPoint {
        FiberPoint {
            coords: self.vars.iter().map(|v| v.identity).collect(),
        }
    }

    fn lift_coord(&self, c: u8) -> RamifiedElem {
        self.ring.elem(i64::from(c & 1), i64::from(c >> 1))
    }

    /// Integral endomorphism lifting the point.
    pub fn lift(&self, point: &FiberPoint) -> Mat {
        let n = self.n;
        let mut val = vec![self.ring.zero(); n * n];
        for (pos, slot) in self.slots.iter().enumerate() {
            if let Source::Free(v) = slot.source {
                val[pos] = self.lift_coord(point.coords[v]);
            }
        }
        for (pos, slot) in self.slots.iter().enumerate() {
            if let Source::Derived { star, minus } = &slot.source {
                let mut x = self.lift_coord(point.coords[*star]).mul_pi();
                for &mp in minus {
                    x -= val[mp];
                }
                val[pos] = x;
            }
        }
        Mat::from_fn(self.ring, n, n, |p, q| {
            let s = &self.slots[p * n + q];
            self.ring.int(i64::from(s.constant)) + val[p * n + q] * self.ring.pi_pow(s.pi_exp)
        })
    }

    /// Coordinates of an integral endomorphism of the model, reduced mod 2.
    pub fn coordinates(&self, m: &Mat) -> Result<FiberPoint> {
        let n = self.n;
        let mut val = Vec::with_capacity(n * n);
        for (pos, s) in self.slots.iter().enumerate() {
            let x = m[(pos / n, pos % n)] - self.ring.int(i64::from(s.constant));
            val.push(x.div_pi_pow(s.pi_exp).map_err(|_| {
                Error::Domain(format!("entry ({}, {}) violates the model shape", pos / n, pos % n))
            })?);
        }
        let mut coords = Vec::with_capacity(self.vars.len());
        for v in &self.vars {
            let x = match v.kind {
                VarKind::Position(pos) => val[pos],
                VarKind::Star(pos) => {
                    let Source::Derived { minus, .. } = &self.slots[pos].source else {
                        unreachable!("star variable points at a derived slot")
                    };
                    let mut s = val[pos];
                    for &mp in minus {
                        s += val[mp];
                    }
                    s.div_pi().map_err(|_| {
                        Error::Domain(format!("{} is not divisible by π", v.label))
                    })?
                }
            };
            coords.push(code(x));
        }
        Ok(FiberPoint { coords })
    }

    /// Coordinates of a hermitian form in the model of the space of forms,
    /// reduced mod 2.
    fn form_coords(&self, f: &Mat) -> Result<Vec<u8>> {
        let r = self.ring;
        let pi = r.pi();
        let mut out = Vec::new();
        let div = |x: RamifiedElem, e: u32| -> Result<RamifiedElem> {
            x.div_pi_pow(e).map_err(|_| Error::Domain("form leaves the model".into()))
        };
        for (a, bi) in self.blocks.iter().enumerate() {
            for bj in &self.blocks[a + 1..] {
                for p in bi.offset..bi.offset + bi.size {
                    for q in bj.offset..bj.offset + bj.size {
                        out.push(code(div(f[(p, q)], bj.scale as u32)?));
                    }
                }
            }
        }
        for b in &self.blocks {
            let i = b.scale;
            let unit = if i % 2 == 0 {
                r.xi_pow((i / 2) as u32)
            } else {
                r.xi_pow(((i - 1) / 2) as u32) * pi
            };
            let q = |x: usize, y: usize| -> Result<RamifiedElem> {
                f[(b.offset + x, b.offset + y)]
                    .divide_exact(&unit)
                    .map_err(|_| Error::Domain("form leaves the model".into()))
            };
            let odd = i % 2 == 1;
            let core = match b.shape {
                Shape::Plain => b.size,
                Shape::Io => b.size - 1,
                Shape::Ie | Shape::OddFree => b.size - 2,
            };
            for x in 0..core {
                let d = q(x, x)?;
                out.push(if odd { code(div(d, 3)?) } else { ((d.a() >> 1) & 1) as u8 });
                for y in x + 1..core {
                    out.push(code(q(x, y)?));
                }
            }
            let l1 = b.size.wrapping_sub(2);
            let l2 = b.size.wrapping_sub(1);
            match b.shape {
                Shape::Plain => {}
                Shape::Io => {
                    for x in 0..core {
                        out.push(code(div(q(x, l2)?, 1)?));
                    }
                    out.push((q(l2, l2)?.a() & 7) as u8);
                }
                Shape::Ie => {
                    for x in 0..core {
                        out.push(code(q(x, l1)?));
                        out.push(code(div(q(x, l2)?, 1)?));
                    }
                    out.push((q(l1, l1)?.a() & 3) as u8);
                    out.push(code(div(q(l1, l2)? - r.one(), 1)?));
                    out.push((q(l2, l2)?.a() & 7) as u8);
                }
                Shape::OddFree => {
                    for x in 0..core {
                        out.push(code(div(q(x, l1)?, 1)?));
                        out.push(code(q(x, l2)?));
                    }
                    out.push(code(div(q(l1, l1)?, 3)?));
                    out.push(code(div(q(l1, l2)? - r.one(), 1)?));
                    out.push(code(div(q(l2, l2)? - pi, 3)?));
                }
            }
            if b.tag == TypeTag::IOdd && b.bound {
                for col in b.offset..b.offset + b.size {
                    let mut s = r.zero();
                    for nb in [i - 1, i + 1] {
                        if let Some(nb) = self.blocks.iter().find(|x| x.scale == nb && x.tag.is_type_i()) {
                            s += div(f[(nb.last(), col)], nb.scale.max(i) as u32)?;
                        }
                    }
                    out.push(code(div(s, 1)?));
                }
            }
        }
        Ok(out)
    }

    /// Membership test for a candidate point.
    pub fn contains(&self, point: &FiberPoint) -> Result<bool> {
        let m = self.lift(point);
        if !m.is_invertible() {
            return Ok(false);
        }
        let f = self.h.congruence(&m);
        Ok(self.form_coords(&f)? == self.h_coords)
    }

    /// Product of two points computed through their lifts.
    pub fn multiply(&self, x: &FiberPoint, y: &FiberPoint) -> Result<FiberPoint> {
        self.coordinates(&self.lift(x).mul(&self.lift(y)))
    }

    fn decode(&self, mut idx: u64, free: &[usize], base: &FiberPoint) -> FiberPoint {
        let mut p = base.clone();
        for &v in free {
            p.coords[v] = (idx & 3) as u8;
            idx >>= 2;
        }
        p
    }

    fn search(
        &self,
        free: &[usize],
        base: &FiberPoint,
        limit: u64,
    ) -> Result<Vec<FiberPoint>> {
        (0..limit)
            .into_par_iter()
            .filter_map(|idx| {
                let p = self.decode(idx, free, base);
                match self.contains(&p) {
                    Ok(true) => Some(Ok(p)),
                    Ok(false) => None,
                    Err(e) => Some(Err(e)),
                }
            })
            .collect()
    }

    /// Enumerates every point, or the first `max_candidates` candidates.
    pub fn enumerate(&self, limits: FiberLimits, keep_points: bool) -> Result<FiberCount> {
        if self.n > limits.max_rank {
            return Err(Error::Capability(format!(
                "fiber enumeration supports rank ≤ {}, got {}",
                limits.max_rank, self.n
            )));
        }
        let free: Vec<usize> = (0..self.vars.len()).collect();
        let candidates = 1u64 << (2 * free.len());
        let searched = candidates.min(limits.max_candidates);
        let points = self.search(&free, &self.identity(), searched)?;
        Ok(FiberCount {
            rank: self.n,
            variables: self.variable_labels(),
            candidates,
            searched,
            count: points.len() as u64,
            partial: searched < candidates,
            points: keep_points.then_some(points),
        })
    }

    fn var_index(&self, label: &str) -> Option<usize> {
        self.vars.iter().position(|v| v.label == label)
    }

    /// Points of the subgroup supported on the component of the given scale,
    /// all other coordinates held at the identity.
    pub fn subgroup(&self, scale: i64) -> Result<SubgroupCount> {
        let entry = self
            .profile
            .entry(scale)
            .ok_or_else(|| Error::Domain(format!("no component at scale {scale}")))?;
        if !qualifies_for_beta(&self.profile, entry) {
            return Err(Error::Domain(format!(
                "component at scale {scale} does not contribute to β"
            )));
        }
        let b = *self.blocks.iter().find(|b| b.scale == scale).expect("block exists");
        let n = self.n;
        let pos_var = |p: usize, q: usize| {
            let Source::Free(v) = self.slots[p * n + q].source else {
                unreachable!("structured entry is free")
            };
            v
        };
        let star = self
            .var_index(&format!("z*[{scale}]"))
            .unwrap_or(usize::MAX);
        let (free, class_var) = match b.shape {
            Shape::Io => (vec![star], star),
            Shape::Ie => (vec![pos_var(b.last() - 1, b.last() - 1), star], star),
            Shape::OddFree => {
                let z = pos_var(b.last(), b.last() - 1);
                (vec![pos_var(b.last() - 1, b.last() - 1), z], z)
            }
            Shape::Plain => unreachable!("qualifying component has a structured block"),
        };
        let points = self.search(&free, &self.identity(), 1 << (2 * free.len()))?;
        let nontrivial = points.iter().filter(|p| p.coords[class_var] & 1 == 1).count();
        Ok(SubgroupCount {
            scale,
            count: points.len() as u64,
            nontrivial: nontrivial as u64,
        })
    }
}

pub fn enumerate_fiber_points(
    decomposition: &JordanDecomposition,
    limits: FiberLimits,
    keep_points: bool,
) -> Result<FiberCount> {
    FiberModel::new(decomposition)?.enumerate(limits, keep_points)
}

/// Enumeration together with the count predicted by the closed formula.
pub fn verify_fiber(
    decomposition: &JordanDecomposition,
    limits: FiberLimits,
    keep_points: bool,
) -> Result<FiberReport> {
    let model = FiberModel::new(decomposition)?;
    let enumeration = model.enumerate(limits, keep_points)?;
    let expected = special_fiber_count(model.profile(), 2)?
        .to_u64()
        .ok_or_else(|| Error::Capability("fiber count exceeds u64".into()))?;
    let matches = !enumeration.partial && enumeration.count == expected;
    Ok(FiberReport {
        enumeration,
        expected,
        matches,
    })
}

pub fn check_fj_equations(decomposition: &JordanDecomposition, scale: i64) -> Result<SubgroupCount> {
    FiberModel::new(decomposition)?.subgroup(scale)
}

/// Closure of a point set under the model multiplication, on the given
/// index pairs.
pub fn closure_violations(
    model: &FiberModel,
    points: &[FiberPoint],
    pairs: &[(usize, usize)],
) -> Result<usize> {
    let set: HashSet<&FiberPoint> = points.iter().collect();
    let mut bad = 0;
    for &(a, b) in pairs {
        let p = model.multiply(&points[a], &points[b])?;
        if !set.contains(&p) {
            bad += 1;
        }
    }
    Ok(bad)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::jordan::JordanComponent;

    fn decomposition(delta: i64, comps: &[(i64, usize, Tail)]) -> JordanDecomposition {
        let ring = Ring::new(20, delta).unwrap();
        let comps = comps
            .iter()
            .map(|&(s, r, t)| JordanComponent::new(s, r, t, delta).unwrap())
            .collect();
        JordanDecomposition::from_components(ring, comps).unwrap()
    }

    #[test]
    fn rank_one_unit() {
        let d = decomposition(1, &[(0, 1, Tail::Unit { a: 1 })]);
        let r = verify_fiber(&d, FiberLimits::default(), false).unwrap();
        assert_eq!(r.enumeration.count, 4);
        assert!(r.matches);
        let fj = check_fj_equations(&d, 0).unwrap();
        assert_eq!((fj.count, fj.nontrivial), (4, 2));
    }

    #[test]
    fn hyperbolic_plane() {
        let d = decomposition(1, &[(0, 2, Tail::None)]);
        let r = verify_fiber(&d, FiberLimits::default(), false).unwrap();
        assert_eq!(r.enumeration.count, 16);
        assert!(matches!(check_fj_equations(&d, 0), Err(Error::Domain(_))));
    }

    #[test]
    fn unit_plus_h1() {
        let d = decomposition(1, &[(0, 1, Tail::Unit { a: 1 }), (1, 2, Tail::H1)]);
        let r = verify_fiber(&d, FiberLimits::default(), false).unwrap();
        assert_eq!(r.enumeration.count, 768);
        assert!(r.matches);
        let fj = check_fj_equations(&d, 0).unwrap();
        assert_eq!((fj.count, fj.nontrivial), (4, 2));
    }

    #[test]
    fn subgroups_have_two_components() {
        let shapes: [&[(i64, usize, Tail)]; 4] = [
            &[(0, 2, Tail::A12b1 { b: 1 })],
            &[(1, 2, Tail::A4a { a: 1 })],
            &[(0, 3, Tail::Unit { a: 3 })],
            &[(0, 1, Tail::Unit { a: 1 }), (3, 2, Tail::A4a { a: 0 })],
        ];
        for comps in shapes {
            for delta in [1, 3] {
                let d = decomposition(delta, comps);
                let p = TypeProfile::from_decomposition(&d).unwrap();
                for e in &p.entries {
                    let fj = check_fj_equations(&d, e.scale);
                    if qualifies_for_beta(&p, e) {
                        let fj = fj.unwrap();
                        assert_eq!((fj.count, fj.nontrivial), (4, 2), "{comps:?} at {}", e.scale);
                    } else {
                        assert!(fj.is_err());
                    }
                }
            }
        }
    }

    #[test]
    fn rejects_unnormalized_bound_tail() {
        let d = decomposition(1, &[(0, 1, Tail::Unit { a: 1 }), (1, 2, Tail::A4a { a: 1 })]);
        assert!(matches!(FiberModel::new(&d), Err(Error::Domain(_))));
    }

    #[test]
    fn identity_and_closure() {
        let d = decomposition(3, &[(0, 1, Tail::Unit { a: 3 }), (1, 2, Tail::H1)]);
        let model = FiberModel::new(&d).unwrap();
        assert!(model.contains(&model.identity()).unwrap());
        let pts = model.enumerate(FiberLimits::default(), true).unwrap().points.unwrap();
        let pairs: Vec<_> = (0..100).map(|k| ((k * 7) % pts.len(), (k * 13 + 5) % pts.len())).collect();
        assert_eq!(closure_violations(&model, &pts, &pairs).unwrap(), 0);
    }

    #[test]
    fn rank_limit() {
        let d = decomposition(1, &[(0, 2, Tail::None), (2, 2, Tail::None)]);
        let e = enumerate_fiber_points(&d, FiberLimits::default(), false).unwrap_err();
        assert!(matches!(e, Error::Capability(_)));
        let partial = enumerate_fiber_points(
            &d,
            FiberLimits {
                max_rank: 4,
                max_candidates: 1000,
            },
            false,
        )
        .unwrap();
        assert!(partial.partial);
        assert_eq!(partial.searched, 1000);
    }
}
