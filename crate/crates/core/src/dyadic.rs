//! Exact arithmetic in B = A[π]/(π² − 2δ) with A = Z₂ truncated mod 2^K.
//!
//! An element a + bπ stores both coordinates as residues mod 2^K. All
//! arithmetic is performed with wrapping `u64` operations followed by a mask,
//! which is exact because 2^K divides 2^64.

use std::fmt;
use std::ops::{Add, AddAssign, Mul, Neg, Sub, SubAssign};

use serde::{Deserialize, Serialize};

use crate::error::ArithError;

/// Largest supported precision in coordinate bits.
pub const MAX_PRECISION: u32 = 62;

/// Default precision in coordinate bits.
pub const DEFAULT_PRECISION: u32 = 16;

/// Smallest reliable window, in π-valuation units, that operations must keep.
pub const PRECISION_GUARD: u32 = 12;

/// Shared ring parameters: precision K and the odd unit δ with π² = 2δ.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct Ring {
    k: u32,
    delta: u64,
}

impl Ring {
    /// Builds the ring B/2^K B for π² = 2δ.
    pub fn new(k: u32, delta: i64) -> Result<Self, ArithError> {
        if k == 0 || k > MAX_PRECISION {
            return Err(ArithError::Config(format!(
                "precision must be in 1..={MAX_PRECISION}, got {k}"
            )));
        }
        if delta.rem_euclid(2) != 1 {
            return Err(ArithError::Config(format!("delta must be odd, got {delta}")));
        }
        let mask = mask_of(k);
        Ok(Self {
            k,
            delta: (delta as u64) & mask,
        })
    }

    /// Ring with default precision and δ = 1.
    pub fn standard() -> Self {
        Self::new(DEFAULT_PRECISION, 1).expect("default ring parameters are valid")
    }

    pub fn precision(&self) -> u32 {
        self.k
    }

    pub fn delta(&self) -> u64 {
        self.delta
    }

    /// δ as a signed representative in (−2^{K−1}, 2^{K−1}].
    pub fn delta_signed(&self) -> i64 {
        signed(self.delta, self.k)
    }

    pub fn mask(&self) -> u64 {
        mask_of(self.k)
    }

    /// Same δ (as a signed representative), different precision.
    pub fn with_precision(&self, k: u32) -> Result<Self, ArithError> {
        Ring::new(k, self.delta_signed())
    }

    pub fn elem(&self, a: i64, b: i64) -> RamifiedElem {
        RamifiedElem {
            a: (a as u64) & self.mask(),
            b: (b as u64) & self.mask(),
            ring: *self,
        }
    }

    pub fn from_raw(&self, a: u64, b: u64) -> RamifiedElem {
        RamifiedElem {
            a: a & self.mask(),
            b: b & self.mask(),
            ring: *self,
        }
    }

    pub fn int(&self, a: i64) -> RamifiedElem {
        self.elem(a, 0)
    }

    pub fn zero(&self) -> RamifiedElem {
        self.elem(0, 0)
    }

    pub fn one(&self) -> RamifiedElem {
        self.elem(1, 0)
    }

    pub fn pi(&self) -> RamifiedElem {
        self.elem(0, 1)
    }

    /// ξ = π·σ(π) = −2δ.
    pub fn xi(&self) -> RamifiedElem {
        self.pi() * self.pi().conj()
    }

    /// π^e for e ≥ 0.
    pub fn pi_pow(&self, e: u32) -> RamifiedElem {
        let two_delta_pow = pow_mod(2u64.wrapping_mul(self.delta), e / 2, self.mask());
        if e.is_multiple_of(2) {
            self.from_raw(two_delta_pow, 0)
        } else {
            self.from_raw(0, two_delta_pow)
        }
    }

    /// ξ^m for m ≥ 0.
    pub fn xi_pow(&self, m: u32) -> RamifiedElem {
        let p = self.pi_pow(2 * m);
        if m.is_multiple_of(2) {
            p
        } else {
            -p
        }
    }

    /// δ⁻¹ mod 2^K.
    pub fn delta_inv(&self) -> u64 {
        inv_odd(self.delta) & self.mask()
    }
}

impl Default for Ring {
    fn default() -> Self {
        Self::standard()
    }
}

/// Element a + bπ of B/2^K B.
#[derive(Clone, Copy, PartialEq, Eq, Hash)]
pub struct RamifiedElem {
    a: u64,
    b: u64,
    ring: Ring,
}

impl RamifiedElem {
    pub fn a(&self) -> u64 {
        self.a
    }

    pub fn b(&self) -> u64 {
        self.b
    }

    pub fn ring(&self) -> Ring {
        self.ring
    }

    /// Signed representatives of (a, b).
    pub fn signed_coords(&self) -> (i64, i64) {
        (signed(self.a, self.ring.k), signed(self.b, self.ring.k))
    }

    pub fn is_zero(&self) -> bool {
        self.a == 0 && self.b == 0
    }

    /// True when σ fixes the element, i.e. b = 0.
    pub fn is_rational(&self) -> bool {
        self.b == 0
    }

    /// Units are exactly the elements with odd a.
    pub fn is_unit(&self) -> bool {
        self.a & 1 == 1
    }

    /// σ(a + bπ) = a − bπ.
    pub fn conj(&self) -> Self {
        self.ring.from_raw(self.a, self.b.wrapping_neg())
    }

    /// x·σ(x) = a² − 2δb², an element of A.
    pub fn norm(&self) -> Self {
        *self * self.conj()
    }

    /// π-adic valuation, `None` when the element vanishes at working precision.
    pub fn valuation(&self) -> Option<u32> {
        let k = self.ring.k;
        match (v2(self.a, k), v2(self.b, k)) {
            (None, None) => None,
            (Some(x), None) => Some(2 * x),
            (None, Some(y)) => Some(2 * y + 1),
            (Some(x), Some(y)) => Some((2 * x).min(2 * y + 1)),
        }
    }

    fn check_ring(&self, other: &Self) -> Result<(), ArithError> {
        if self.ring != other.ring {
            return Err(ArithError::Config(format!(
                "ring mismatch: (K={}, δ={}) vs (K={}, δ={})",
                self.ring.k, self.ring.delta, other.ring.k, other.ring.delta
            )));
        }
        Ok(())
    }

    pub fn checked_add(&self, other: &Self) -> Result<Self, ArithError> {
        self.check_ring(other)?;
        Ok(self.add_unchecked(other))
    }

    pub fn checked_sub(&self, other: &Self) -> Result<Self, ArithError> {
        self.check_ring(other)?;
        Ok(self.sub_unchecked(other))
    }

    pub fn checked_mul(&self, other: &Self) -> Result<Self, ArithError> {
        self.check_ring(other)?;
        Ok(self.mul_unchecked(other))
    }

    #[inline]
    fn add_unchecked(&self, o: &Self) -> Self {
        self.ring
            .from_raw(self.a.wrapping_add(o.a), self.b.wrapping_add(o.b))
    }

    #[inline]
    fn sub_unchecked(&self, o: &Self) -> Self {
        self.ring
            .from_raw(self.a.wrapping_sub(o.a), self.b.wrapping_sub(o.b))
    }

    #[inline]
    fn mul_unchecked(&self, o: &Self) -> Self {
        let bb = self.b.wrapping_mul(o.b);
        let a = self
            .a
            .wrapping_mul(o.a)
            .wrapping_add(bb.wrapping_mul(self.ring.delta).wrapping_mul(2));
        let b = self.a.wrapping_mul(o.b).wrapping_add(self.b.wrapping_mul(o.a));
        self.ring.from_raw(a, b)
    }

    /// Multiplies by an integer.
    pub fn scale(&self, c: i64) -> Self {
        let c = c as u64;
        self.ring
            .from_raw(self.a.wrapping_mul(c), self.b.wrapping_mul(c))
    }

    /// x·π.
    pub fn mul_pi(&self) -> Self {
        self.ring.from_raw(
            self.b.wrapping_mul(self.ring.delta).wrapping_mul(2),
            self.a,
        )
    }

    /// x/π, defined when a is even. The top bit of the new π-coordinate is
    /// unknown and set to zero.
    pub fn div_pi(&self) -> Result<Self, ArithError> {
        if self.a & 1 == 1 {
            return Err(ArithError::NotDivisible(format!("{self} by π")));
        }
        let half = self.a >> 1;
        Ok(self
            .ring
            .from_raw(self.b, half.wrapping_mul(self.ring.delta_inv())))
    }

    /// x/π^e.
    pub fn div_pi_pow(&self, e: u32) -> Result<Self, ArithError> {
        let mut x = *self;
        for _ in 0..e {
            x = x.div_pi()?;
        }
        Ok(x)
    }

    /// Inverse of a unit.
    pub fn invert_unit(&self) -> Result<Self, ArithError> {
        if !self.is_unit() {
            return Err(ArithError::NotUnit(format!("{self}")));
        }
        let n = self.norm().a;
        let ninv = inv_odd(n);
        Ok(self.conj() * self.ring.from_raw(ninv, 0))
    }

    /// Exact quotient x/y for v(x) ≥ v(y); the result q satisfies q·y = x at
    /// working precision. The top ⌈v(y)/2⌉ coordinate bits of q are arbitrary.
    pub fn divide_exact(&self, y: &Self) -> Result<Self, ArithError> {
        self.divide_exact_tracked(y).map(|(q, _)| q)
    }

    /// As [`divide_exact`](Self::divide_exact), also returning the number of
    /// coordinate bits of the quotient that are not determined.
    pub fn divide_exact_tracked(&self, y: &Self) -> Result<(Self, u32), ArithError> {
        self.check_ring(y)?;
        let vy = y
            .valuation()
            .ok_or_else(|| ArithError::DivisionByZero(format!("{self} / 0")))?;
        let loss = vy.div_ceil(2);
        match self.valuation() {
            None => return Ok((self.ring.zero(), loss)),
            Some(vx) if vx < vy => {
                return Err(ArithError::NotDivisible(format!(
                    "{self} (v={vx}) by {y} (v={vy})"
                )))
            }
            _ => {}
        }
        let xs = self.div_pi_pow(vy)?;
        let u = y.div_pi_pow(vy)?;
        Ok((xs * u.invert_unit()?, loss))
    }

    /// Residue modulo π² as the pair of bits (a mod 2, b mod 2).
    pub fn residue_pi2(&self) -> (u8, u8) {
        ((self.a & 1) as u8, (self.b & 1) as u8)
    }

    /// Reduction to a smaller precision.
    pub fn reduce(&self, ring: Ring) -> Self {
        ring.from_raw(self.a, self.b)
    }
}

impl fmt::Debug for RamifiedElem {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{self}")
    }
}

impl fmt::Display for RamifiedElem {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let (a, b) = self.signed_coords();
        match (a, b) {
            (_, 0) => write!(f, "{a}"),
            (0, 1) => write!(f, "π"),
            (0, -1) => write!(f, "-π"),
            (0, _) => write!(f, "{b}π"),
            (_, 1) => write!(f, "{a}+π"),
            (_, -1) => write!(f, "{a}-π"),
            (_, b) if b < 0 => write!(f, "{a}{b}π"),
            _ => write!(f, "{a}+{b}π"),
        }
    }
}

impl Add for RamifiedElem {
    type Output = Self;
    #[inline]
    fn add(self, o: Self) -> Self {
        debug_assert_eq!(self.ring, o.ring, "ring mismatch");
        self.add_unchecked(&o)
    }
}

impl Sub for RamifiedElem {
    type Output = Self;
    #[inline]
    fn sub(self, o: Self) -> Self {
        debug_assert_eq!(self.ring, o.ring, "ring mismatch");
        self.sub_unchecked(&o)
    }
}

impl Mul for RamifiedElem {
    type Output = Self;
    #[inline]
    fn mul(self, o: Self) -> Self {
        debug_assert_eq!(self.ring, o.ring, "ring mismatch");
        self.mul_unchecked(&o)
    }
}

impl Neg for RamifiedElem {
    type Output = Self;
    fn neg(self) -> Self {
        self.ring.from_raw(self.a.wrapping_neg(), self.b.wrapping_neg())
    }
}

impl AddAssign for RamifiedElem {
    fn add_assign(&mut self, o: Self) {
        *self = *self + o;
    }
}

impl SubAssign for RamifiedElem {
    fn sub_assign(&mut self, o: Self) {
        *self = *self - o;
    }
}

fn mask_of(k: u32) -> u64 {
    if k >= 64 {
        u64::MAX
    } else {
        (1u64 << k) - 1
    }
}

fn signed(x: u64, k: u32) -> i64 {
    let half = 1u64 << (k - 1);
    if x > half {
        x as i64 - (1i64 << k)
    } else {
        x as i64
    }
}

/// 2-adic valuation of x mod 2^k, `None` when x ≡ 0.
pub fn v2(x: u64, k: u32) -> Option<u32> {
    let x = x & mask_of(k);
    if x == 0 {
        None
    } else {
        Some(x.trailing_zeros())
    }
}

/// Inverse of an odd integer mod 2^64.
pub fn inv_odd(x: u64) -> u64 {
    debug_assert!(x & 1 == 1);
    let mut y = x;
    for _ in 0..6 {
        y = y.wrapping_mul(2u64.wrapping_sub(x.wrapping_mul(y)));
    }
    y
}

fn pow_mod(base: u64, mut e: u32, mask: u64) -> u64 {
    let mut r = 1u64;
    let mut b = base;
    while e > 0 {
        if e & 1 == 1 {
            r = r.wrapping_mul(b);
        }
        b = b.wrapping_mul(b);
        e >>= 1;
    }
    r & mask
}
