//! Finite fields GF(2^d) for residue-field computations.

use std::fmt;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Largest supported extension degree.
pub const MAX_DEGREE: u32 = 32;

/// The field F_{2^d}, elements stored as bit-packed polynomials over F₂.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct ResidueField {
    d: u32,
    modulus: u64,
}

impl ResidueField {
    /// F_{2^d} with the lexicographically smallest irreducible modulus.
    pub fn new(d: u32) -> Result<Self> {
        if d == 0 || d > MAX_DEGREE {
            return Err(Error::Invalid(format!(
                "residue degree must be in 1..={MAX_DEGREE}, got {d}"
            )));
        }
        let modulus = if d == 1 {
            0b10
        } else {
            ((1u64 << d) + 1..(1u64 << (d + 1)))
                .step_by(2)
                .find(|&p| is_irreducible(p, d))
                .expect("an irreducible polynomial exists in every degree")
        };
        Ok(Self { d, modulus })
    }

    /// F_f for f a power of two.
    pub fn with_size(f: u64) -> Result<Self> {
        if f < 2 || !f.is_power_of_two() {
            return Err(Error::Invalid(format!("residue size must be 2^d, got {f}")));
        }
        Self::new(f.trailing_zeros())
    }

    pub fn degree(&self) -> u32 {
        self.d
    }

    pub fn size(&self) -> u64 {
        1u64 << self.d
    }

    pub fn modulus(&self) -> u64 {
        self.modulus
    }

    pub fn elem(&self, bits: u64) -> FieldElem {
        FieldElem {
            v: bits & (self.size() - 1),
        }
    }

    pub fn zero(&self) -> FieldElem {
        FieldElem { v: 0 }
    }

    pub fn one(&self) -> FieldElem {
        FieldElem { v: 1 }
    }

    /// Class of x + θ where θ is the image of the polynomial variable.
    pub fn generator(&self) -> FieldElem {
        if self.d == 1 {
            self.one()
        } else {
            self.elem(0b10)
        }
    }

    pub fn elements(&self) -> impl Iterator<Item = FieldElem> + '_ {
        (0..self.size()).map(|v| FieldElem { v })
    }

    pub fn add(&self, x: FieldElem, y: FieldElem) -> FieldElem {
        FieldElem { v: x.v ^ y.v }
    }

    pub fn mul(&self, x: FieldElem, y: FieldElem) -> FieldElem {
        if self.d == 1 {
            return FieldElem { v: x.v & y.v };
        }
        let prod = clmul(x.v, y.v);
        FieldElem {
            v: poly_mod(prod, self.modulus),
        }
    }

    pub fn square(&self, x: FieldElem) -> FieldElem {
        self.mul(x, x)
    }

    pub fn pow(&self, x: FieldElem, mut e: u64) -> FieldElem {
        let mut r = self.one();
        let mut b = x;
        while e > 0 {
            if e & 1 == 1 {
                r = self.mul(r, b);
            }
            b = self.square(b);
            e >>= 1;
        }
        r
    }

    pub fn inv(&self, x: FieldElem) -> Result<FieldElem> {
        if x.v == 0 {
            return Err(Error::Domain("inverse of zero in residue field".into()));
        }
        Ok(self.pow(x, self.size() - 2))
    }

    /// Frobenius x ↦ x².
    pub fn frobenius(&self, x: FieldElem) -> FieldElem {
        self.square(x)
    }

    /// Absolute trace Σ x^{2^i} to F₂.
    pub fn trace(&self, x: FieldElem) -> u8 {
        let mut acc = self.zero();
        let mut t = x;
        for _ in 0..self.d {
            acc = self.add(acc, t);
            t = self.square(t);
        }
        debug_assert!(acc.v <= 1);
        acc.v as u8
    }

    /// Whether z² + z = b has a solution in the field.
    pub fn artin_schreier_solvable(&self, b: FieldElem) -> bool {
        self.trace(b) == 0
    }

    /// Image of a bit of F₂ under the prime-field embedding.
    pub fn from_prime(&self, bit: u8) -> FieldElem {
        FieldElem { v: (bit & 1) as u64 }
    }
}

/// Element of a [`ResidueField`].
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Default, Serialize, Deserialize)]
pub struct FieldElem {
    v: u64,
}

impl FieldElem {
    pub fn bits(&self) -> u64 {
        self.v
    }

    pub fn is_zero(&self) -> bool {
        self.v == 0
    }
}

impl fmt::Display for FieldElem {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{:#b}", self.v)
    }
}

/// Whether z² + z = b̄ is solvable in F_{2^d} for b̄ in the prime field.
pub fn artin_schreier_solvable(field: &ResidueField, bbar: FieldElem) -> bool {
    field.artin_schreier_solvable(bbar)
}

fn clmul(a: u64, b: u64) -> u128 {
    let mut r = 0u128;
    let a = a as u128;
    let mut b = b;
    let mut i = 0;
    while b != 0 {
        if b & 1 == 1 {
            r ^= a << i;
        }
        b >>= 1;
        i += 1;
    }
    r
}

fn degree(p: u128) -> i32 {
    127 - p.leading_zeros() as i32
}

fn poly_mod(mut a: u128, m: u64) -> u64 {
    let m = m as u128;
    let dm = degree(m);
    while a != 0 && degree(a) >= dm {
        a ^= m << (degree(a) - dm);
    }
    a as u64
}

fn poly_mulmod(a: u64, b: u64, m: u64) -> u64 {
    poly_mod(clmul(a, b), m)
}

fn poly_gcd(mut a: u64, mut b: u64) -> u64 {
    while b != 0 {
        let r = poly_mod(a as u128, b);
        a = b;
        b = r;
    }
    a
}

/// x^{2^k} mod p.
fn frob_pow_x(k: u32, p: u64) -> u64 {
    let mut t = poly_mod(0b10, p);
    for _ in 0..k {
        t = poly_mulmod(t, t, p);
    }
    t
}

/// Rabin's irreducibility test for p of degree d over F₂.
fn is_irreducible(p: u64, d: u32) -> bool {
    if frob_pow_x(d, p) != poly_mod(0b10, p) {
        return false;
    }
    let mut n = d;
    let mut primes = Vec::new();
    let mut q = 2;
    while q * q <= n {
        if n.is_multiple_of(q) {
            primes.push(q);
            while n.is_multiple_of(q) {
                n /= q;
            }
        }
        q += 1;
    }
    if n > 1 {
        primes.push(n);
    }
    primes.into_iter().all(|q| {
        let t = frob_pow_x(d / q, p) ^ 0b10;
        poly_gcd(p, t) == 1
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    #[test]
    fn moduli() {
        assert_eq!(ResidueField::new(2).unwrap().modulus(), 0b111);
        assert_eq!(ResidueField::new(3).unwrap().modulus(), 0b1011);
        assert_eq!(ResidueField::new(4).unwrap().modulus(), 0b10011);
        assert_eq!(ResidueField::new(8).unwrap().modulus(), 0b1_0001_1011);
    }

    #[test]
    fn artin_schreier_over_small_fields() {
        let f2 = ResidueField::new(1).unwrap();
        assert!(f2.artin_schreier_solvable(f2.zero()));
        assert!(!f2.artin_schreier_solvable(f2.one()));
        let f4 = ResidueField::new(2).unwrap();
        assert!(!f4.artin_schreier_solvable(f4.generator()));
        assert!(f4.artin_schreier_solvable(f4.one()));
    }

    #[test]
    fn artin_schreier_matches_enumeration() {
        for d in 1..=6 {
            let k = ResidueField::new(d).unwrap();
            for b in k.elements() {
                let brute = k.elements().any(|z| k.add(k.square(z), z) == b);
                assert_eq!(k.artin_schreier_solvable(b), brute, "d={d} b={b}");
            }
        }
    }

    #[test]
    fn prime_field_one_splits_in_even_degree() {
        for d in 1..=8 {
            let k = ResidueField::new(d).unwrap();
            assert_eq!(k.artin_schreier_solvable(k.one()), d % 2 == 0);
        }
    }

    #[test]
    fn size_validation() {
        assert!(ResidueField::with_size(6).is_err());
        assert_eq!(ResidueField::with_size(16).unwrap().degree(), 4);
    }

    proptest! {
        #[test]
        fn field_axioms(d in 1u32..=12, a in any::<u64>(), b in any::<u64>(), c in any::<u64>()) {
            let k = ResidueField::new(d).unwrap();
            let (x, y, z) = (k.elem(a), k.elem(b), k.elem(c));
            prop_assert_eq!(k.mul(k.mul(x, y), z), k.mul(x, k.mul(y, z)));
            prop_assert_eq!(k.mul(x, k.add(y, z)), k.add(k.mul(x, y), k.mul(x, z)));
            if !x.is_zero() {
                prop_assert_eq!(k.mul(x, k.inv(x).unwrap()), k.one());
            }
            prop_assert_eq!(k.pow(x, k.size()), x);
        }

        #[test]
        fn frobenius_is_bijective(d in 1u32..=8) {
            let k = ResidueField::new(d).unwrap();
            let mut seen: Vec<u64> = k.elements().map(|x| k.frobenius(x).bits()).collect();
            seen.sort_unstable();
            seen.dedup();
            prop_assert_eq!(seen.len() as u64, k.size());
        }
    }
}
