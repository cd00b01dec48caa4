//! Naive automorphism counts modulo 2^k and brute-force group orders.
//!
//! N_k = #{g ∈ M_n(B/2^k) : σ(ᵗg)·G·g ≡ G, g invertible}. Solutions are
//! built level by level as g₀·(1 + 2Δ₁)·(1 + 4Δ₂)⋯ with Δ_m ∈ M_n(B/2).
//! After level m the form σ(ᵗg)Gg equals G + 2^m·E, and the number of
//! completions depends only on (m, E), which is memoised.

use std::collections::HashMap;

use num_bigint::BigInt;
use num_rational::BigRational;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::density::FactorKind;
use crate::dyadic::Ring;
use crate::error::{Error, Result};
use crate::gram::HermitianGram;
use crate::matrix::{F2Mat, Mat};

/// Default cap on memoised states per level count.
pub const DEFAULT_MAX_STATES: usize = 4_000_000;

/// Largest brute-force search space, as a power of two.
const BRUTE_BITS: u32 = 22;

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct CountLevel {
    pub k: u32,
    pub count: String,
    /// N_k / f^{k·n²}.
    pub ratio: String,
}

/// Brute-force comparison at one shallow level.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct FilterCheck {
    pub k: u32,
    pub lifted: String,
    pub brute_invertible: String,
    pub brute_all: String,
    /// Whether 2k exceeds the π-valuation of det G.
    pub beyond_det: bool,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct CountSequence {
    pub rank: usize,
    pub kmax: u32,
    pub levels: Vec<CountLevel>,
    /// First level from which every computed ratio agrees (at least two levels).
    pub stabilized_at: Option<u32>,
    pub value: Option<String>,
    /// True when the state budget stopped the count early.
    pub partial: bool,
    pub filter_check: Option<FilterCheck>,
}

impl CountSequence {
    pub fn ratios(&self) -> Vec<BigRational> {
        self.levels
            .iter()
            .map(|l| l.ratio.parse().expect("rational written by density_estimate"))
            .collect()
    }

    pub fn value_rational(&self) -> Option<BigRational> {
        self.value.as_ref().map(|v| v.parse().expect("rational"))
    }
}

type Key = Vec<u64>;

struct Lifter {
    ring: Ring,
    k: u32,
    n: usize,
    g: Mat,
    linear: F2Mat,
    kernel: Vec<Vec<bool>>,
    memo: Vec<HashMap<Key, u128>>,
    states: usize,
    max_states: usize,
}

fn delta_mat(ring: Ring, n: usize, bits: &[bool]) -> Mat {
    Mat::from_fn(ring, n, n, |i, j| {
        let t = 2 * (i * n + j);
        ring.elem(bits[t] as i64, bits[t + 1] as i64)
    })
}

/// Indices (i, j, coordinate) of the constrained bits of a hermitian matrix.
fn condition_bits(n: usize) -> Vec<(usize, usize, u8)> {
    let mut out = Vec::new();
    for i in 0..n {
        out.push((i, i, 0));
        for j in i + 1..n {
            out.push((i, j, 0));
            out.push((i, j, 1));
        }
    }
    out
}

fn bit_of(m: &Mat, (i, j, c): (usize, usize, u8), shift: u32) -> bool {
    let x = m[(i, j)];
    let v = if c == 0 { x.a() } else { x.b() };
    (v >> shift) & 1 == 1
}

impl Lifter {
    fn new(g: &HermitianGram, k: u32, max_states: usize) -> Result<Self> {
        let ring = Ring::new(k, g.ring().delta_signed())?;
        let gm = g.mat().reduce(ring);
        let n = gm.rows();
        let rows = condition_bits(n);
        let vars = 2 * n * n;
        let mut lin = F2Mat::zeros(rows.len(), vars);
        for t in 0..vars {
            let mut bits = vec![false; vars];
            bits[t] = true;
            let d = delta_mat(ring, n, &bits);
            let x = gm.mul(&d);
            let l = x.add(&x.conj_transpose());
            for (r, &cb) in rows.iter().enumerate() {
                lin.set(r, t, bit_of(&l, cb, 0));
            }
        }
        let kernel = lin.kernel();
        Ok(Self {
            ring,
            k,
            n,
            g: gm,
            linear: lin,
            kernel,
            memo: (0..=k).map(|_| HashMap::new()).collect(),
            states: 0,
            max_states,
        })
    }

    fn key(&self, diff: &Mat, shift: u32) -> Key {
        condition_bits(self.n)
            .into_iter()
            .map(|(i, j, c)| {
                let x = diff[(i, j)];
                let v = if c == 0 { x.a() } else { x.b() };
                v >> shift
            })
            .collect()
    }

    /// Completions of a partial solution with σ(ᵗg)Gg = f, f ≡ G mod 2^m.
    fn complete(&mut self, m: u32, f: &Mat) -> Option<u128> {
        if m == self.k {
            return Some(1);
        }
        let diff = f.sub(&self.g);
        let key = self.key(&diff, m);
        if let Some(&c) = self.memo[m as usize].get(&key) {
            return Some(c);
        }
        self.states += 1;
        if self.states > self.max_states {
            return None;
        }
        let rhs: Vec<bool> = condition_bits(self.n)
            .into_iter()
            .map(|cb| bit_of(&diff, cb, m))
            .collect();
        let mut total = 0u128;
        if let Some(p) = self.linear.solve(&rhs) {
            let dim = self.kernel.len();
            let lift = self.ring.int(1i64 << m);
            for mask in 0u64..(1u64 << dim) {
                let mut bits = p.clone();
                for (b, v) in self.kernel.iter().enumerate() {
                    if (mask >> b) & 1 == 1 {
                        for (x, y) in bits.iter_mut().zip(v) {
                            *x ^= *y;
                        }
                    }
                }
                let w = Mat::identity(self.ring, self.n).add(&delta_mat(self.ring, self.n, &bits).scale(lift));
                let next = f.congruence(&w);
                total += self.complete(m + 1, &next)?;
            }
        }
        self.memo[m as usize].insert(key, total);
        Some(total)
    }
}

/// Residues mod 2 of n×n matrices over B, as bit vectors of length 2n².
fn level_zero_matrices(ring: Ring, n: usize) -> impl Iterator<Item = Mat> {
    let vars = 2 * n * n;
    (0u64..(1u64 << vars)).map(move |code| {
        let bits: Vec<bool> = (0..vars).map(|t| (code >> t) & 1 == 1).collect();
        delta_mat(ring, n, &bits)
    })
}

fn check_k(g: &HermitianGram, k: u32) -> Result<()> {
    if k == 0 || k > g.ring().precision() {
        return Err(Error::Precision(format!(
            "level k = {k} outside 1..={} (input precision)",
            g.ring().precision()
        )));
    }
    Ok(())
}

/// N_k by memoised lifting; `None` when the state budget is exceeded.
pub fn count_automorphisms_mod(g: &HermitianGram, k: u32, max_states: usize) -> Result<Option<u128>> {
    check_k(g, k)?;
    let n = g.rank();
    if n == 0 {
        return Ok(Some(1));
    }
    if n > 3 {
        return Err(Error::Capability(format!("naive counting supports rank ≤ 3, got {n}")));
    }
    let mut lifter = Lifter::new(g, k, max_states)?;
    let ring = lifter.ring;
    let gm = lifter.g.clone();
    let mut total = 0u128;
    for g0 in level_zero_matrices(ring, n) {
        if !g0.is_invertible() {
            continue;
        }
        let f = gm.congruence(&g0);
        let diff = f.sub(&gm);
        let ok = (0..n).all(|i| (0..n).all(|j| diff[(i, j)].a() & 1 == 0 && diff[(i, j)].b() & 1 == 0));
        if !ok {
            continue;
        }
        match lifter.complete(1, &f) {
            Some(c) => total += c,
            None => return Ok(None),
        }
    }
    Ok(Some(total))
}

/// N_k by exhaustive enumeration of M_n(B/2^k), optionally without the
/// invertibility filter. Capped at 2^22 matrices.
pub fn count_brute(g: &HermitianGram, k: u32, require_invertible: bool) -> Result<u128> {
    check_k(g, k)?;
    let n = g.rank();
    let bits = 2 * k * (n * n) as u32;
    if bits > BRUTE_BITS {
        return Err(Error::Capability(format!(
            "brute count needs 2^{bits} matrices, cap is 2^{BRUTE_BITS}"
        )));
    }
    let ring = Ring::new(k, g.ring().delta_signed())?;
    let gm = g.mat().reduce(ring);
    let mask = (1u64 << k) - 1;
    let count = (0u64..(1u64 << bits))
        .into_par_iter()
        .filter(|&code| {
            let u = Mat::from_fn(ring, n, n, |i, j| {
                let t = 2 * k as usize * (i * n + j);
                let a = (code >> t) & mask;
                let b = (code >> (t + k as usize)) & mask;
                ring.from_raw(a, b)
            });
            (!require_invertible || u.is_invertible()) && gm.congruence(&u) == gm
        })
        .count();
    Ok(count as u128)
}

fn ratio(count: u128, k: u32, n: usize) -> BigRational {
    BigRational::new(
        BigInt::from(count),
        BigInt::from(1u8) << (k as usize * n * n),
    )
}

/// Ratios N_k / 2^{k·n²} for k = 1..=kmax with stabilization detection.
pub fn density_estimate(g: &HermitianGram, kmax: u32, max_states: usize) -> Result<CountSequence> {
    check_k(g, kmax)?;
    let n = g.rank();
    let counts: Vec<Result<Option<u128>>> = (1..=kmax)
        .into_par_iter()
        .map(|k| count_automorphisms_mod(g, k, max_states))
        .collect();
    let mut levels = Vec::new();
    let mut partial = false;
    let mut prev: Option<u128> = None;
    for (k, c) in (1..=kmax).zip(counts) {
        let Some(c) = c? else {
            partial = true;
            break;
        };
        if let Some(p) = prev {
            let bound = p.saturating_mul(1u128 << (2 * n * n).min(126));
            if c > bound {
                return Err(Error::Mismatch(format!(
                    "N_{k} = {c} exceeds 4^(n²)·N_{} = {bound}",
                    k - 1
                )));
            }
        }
        prev = Some(c);
        levels.push(CountLevel {
            k,
            count: c.to_string(),
            ratio: ratio(c, k, n).to_string(),
        });
    }
    let ratios: Vec<BigRational> = levels.iter().map(|l| ratio(l.count.parse().unwrap(), l.k, n)).collect();
    let mut stabilized_at = None;
    if ratios.len() >= 2 {
        let last = ratios.last().unwrap();
        let mut start = ratios.len() - 1;
        while start > 0 && &ratios[start - 1] == last {
            start -= 1;
        }
        if start < ratios.len() - 1 {
            stabilized_at = Some(levels[start].k);
        }
    }
    let value = stabilized_at.map(|_| ratios.last().unwrap().to_string());
    let filter_check = filter_check(g, &levels)?;
    Ok(CountSequence {
        rank: n,
        kmax,
        levels,
        stabilized_at,
        value,
        partial,
        filter_check,
    })
}

fn filter_check(g: &HermitianGram, levels: &[CountLevel]) -> Result<Option<FilterCheck>> {
    let n = g.rank() as u32;
    if n == 0 {
        return Ok(None);
    }
    let Some(level) = levels
        .iter()
        .rev()
        .find(|l| 2 * l.k * n * n <= BRUTE_BITS)
    else {
        return Ok(None);
    };
    let k = level.k;
    let with = count_brute(g, k, true)?;
    let without = count_brute(g, k, false)?;
    if with.to_string() != level.count {
        return Err(Error::Mismatch(format!(
            "lifted count {} differs from brute count {with} at k = {k}",
            level.count
        )));
    }
    let beyond_det = g.mat().det_valuation().is_some_and(|v| 2 * k > v);
    if beyond_det && with != without {
        return Err(Error::Mismatch(format!(
            "invertibility filter changes N_{k} beyond the determinant valuation"
        )));
    }
    Ok(Some(FilterCheck {
        k,
        lifted: level.count.clone(),
        brute_invertible: with.to_string(),
        brute_all: without.to_string(),
        beyond_det,
    }))
}

/// Order of a classical group over F₂ by exhaustive enumeration of GL_d.
pub fn brute_group_order(kind: FactorKind) -> Result<u64> {
    let d = kind.degree();
    if d > 4 {
        return Err(Error::Capability(format!("brute group order supports d ≤ 4, got {d}")));
    }
    if d == 0 {
        return Ok(1);
    }
    let form_ok: Box<dyn Fn(&F2Mat) -> bool + Send + Sync> = match kind {
        FactorKind::Symplectic { .. } => {
            if !d.is_multiple_of(2) {
                return Err(Error::Invalid("symplectic degree must be even".into()));
            }
            let j = F2Mat::from_fn(d, d, |i, k| i / 2 == k / 2 && i != k);
            Box::new(move |g: &F2Mat| g.transpose().mul(&j).mul(g) == j)
        }
        FactorKind::EvenOrthogonal { split, .. } => {
            if !d.is_multiple_of(2) {
                return Err(Error::Invalid("even orthogonal degree must be even".into()));
            }
            let q = move |x: &[bool]| {
                let mut v = false;
                for p in 0..d / 2 {
                    v ^= x[2 * p] & x[2 * p + 1];
                }
                if !split {
                    v ^= x[d - 2] ^ x[d - 1];
                }
                v
            };
            Box::new(move |g: &F2Mat| preserves(g, d, &q))
        }
        FactorKind::OddOrthogonal { .. } => {
            if d % 2 != 1 {
                return Err(Error::Invalid("odd orthogonal degree must be odd".into()));
            }
            let q = move |x: &[bool]| {
                let mut v = x[0];
                for p in 0..(d - 1) / 2 {
                    v ^= x[1 + 2 * p] & x[2 + 2 * p];
                }
                v
            };
            Box::new(move |g: &F2Mat| preserves(g, d, &q))
        }
    };
    let cells = d * d;
    let count = (0u64..(1u64 << cells))
        .into_par_iter()
        .filter(|&code| {
            let g = F2Mat::from_fn(d, d, |i, j| (code >> (i * d + j)) & 1 == 1);
            g.rank() == d && form_ok(&g)
        })
        .count();
    Ok(count as u64)
}

/// q(gx) = q(x) for every x ∈ F₂^d.
fn preserves(g: &F2Mat, d: usize, q: &dyn Fn(&[bool]) -> bool) -> bool {
    (0u32..(1 << d)).all(|code| {
        let x: Vec<bool> = (0..d).map(|i| (code >> i) & 1 == 1).collect();
        let gx: Vec<bool> = (0..d)
            .map(|i| (0..d).fold(false, |acc, j| acc ^ (g.get(i, j) & x[j])))
            .collect();
        q(&gx) == q(&x)
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn unit() -> HermitianGram {
        HermitianGram::diagonal(Ring::new(16, 1).unwrap(), &[1]).unwrap()
    }

    #[test]
    fn rank_one_counts() {
        let g = unit();
        assert_eq!(count_automorphisms_mod(&g, 1, DEFAULT_MAX_STATES).unwrap(), Some(2));
        assert_eq!(count_automorphisms_mod(&g, 3, DEFAULT_MAX_STATES).unwrap(), Some(16));
        assert_eq!(count_automorphisms_mod(&g, 4, DEFAULT_MAX_STATES).unwrap(), Some(32));
    }

    #[test]
    fn rank_one_ratios() {
        let s = density_estimate(&unit(), 5, DEFAULT_MAX_STATES).unwrap();
        let r: Vec<String> = s.levels.iter().map(|l| l.ratio.clone()).collect();
        assert_eq!(r, vec!["1", "1", "2", "2", "2"]);
        assert_eq!(s.stabilized_at, Some(3));
        assert_eq!(s.value.as_deref(), Some("2"));
        assert!(s.filter_check.is_some());
    }

    #[test]
    fn brute_matches_lifting() {
        let r = Ring::new(16, 3).unwrap();
        let g = HermitianGram::from_pairs(r, &[vec![(0, 0), (0, 1)], vec![(0, -1), (0, 0)]]).unwrap();
        for k in 1..=2 {
            assert_eq!(
                count_automorphisms_mod(&g, k, DEFAULT_MAX_STATES).unwrap(),
                Some(count_brute(&g, k, true).unwrap())
            );
        }
    }

    #[test]
    fn level_bounds() {
        assert!(matches!(
            count_automorphisms_mod(&unit(), 0, 10),
            Err(Error::Precision(_))
        ));
        assert!(count_automorphisms_mod(&unit(), 17, 10).is_err());
    }

    #[test]
    fn budget_is_reported() {
        let s = density_estimate(&unit(), 6, 1).unwrap();
        assert!(s.partial);
    }

    #[test]
    fn brute_orders() {
        assert_eq!(brute_group_order(FactorKind::Symplectic { d: 2 }).unwrap(), 6);
        assert_eq!(brute_group_order(FactorKind::EvenOrthogonal { d: 2, split: true }).unwrap(), 2);
        assert_eq!(brute_group_order(FactorKind::EvenOrthogonal { d: 2, split: false }).unwrap(), 6);
        assert_eq!(brute_group_order(FactorKind::OddOrthogonal { d: 1 }).unwrap(), 1);
        assert!(brute_group_order(FactorKind::Symplectic { d: 6 }).is_err());
    }
}
