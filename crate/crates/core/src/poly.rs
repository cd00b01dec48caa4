//! Laurent polynomials in the residue size f with integer coefficients.

use std::collections::BTreeMap;
use std::fmt;
use std::ops::{Add, Mul, Neg, Sub};

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Signed, Zero};

#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct FPoly {
    terms: BTreeMap<i64, BigInt>,
}

impl FPoly {
    pub fn zero() -> Self {
        Self::default()
    }

    pub fn constant(c: impl Into<BigInt>) -> Self {
        Self::monomial(c, 0)
    }

    /// c·f^e.
    pub fn monomial(c: impl Into<BigInt>, e: i64) -> Self {
        let c = c.into();
        let mut terms = BTreeMap::new();
        if !c.is_zero() {
            terms.insert(e, c);
        }
        Self { terms }
    }

    /// f^e.
    pub fn f_pow(e: i64) -> Self {
        Self::monomial(1, e)
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn coefficient(&self, e: i64) -> BigInt {
        self.terms.get(&e).cloned().unwrap_or_default()
    }

    pub fn eval(&self, f: u64) -> BigRational {
        let f = BigRational::from_integer(BigInt::from(f));
        self.terms.iter().fold(BigRational::zero(), |acc, (&e, c)| {
            acc + BigRational::from_integer(c.clone()) * pow_i(&f, e)
        })
    }

    fn push(&mut self, e: i64, c: BigInt) {
        let slot = self.terms.entry(e).or_default();
        *slot += c;
        if slot.is_zero() {
            self.terms.remove(&e);
        }
    }
}

fn pow_i(x: &BigRational, e: i64) -> BigRational {
    let p = num_traits::pow(x.clone(), e.unsigned_abs() as usize);
    if e < 0 {
        p.recip()
    } else {
        p
    }
}

impl Add for FPoly {
    type Output = FPoly;
    fn add(mut self, rhs: FPoly) -> FPoly {
        for (e, c) in rhs.terms {
            self.push(e, c);
        }
        self
    }
}

impl Neg for FPoly {
    type Output = FPoly;
    fn neg(self) -> FPoly {
        FPoly {
            terms: self.terms.into_iter().map(|(e, c)| (e, -c)).collect(),
        }
    }
}

impl Sub for FPoly {
    type Output = FPoly;
    fn sub(self, rhs: FPoly) -> FPoly {
        self + (-rhs)
    }
}

impl Mul for &FPoly {
    type Output = FPoly;
    fn mul(self, rhs: &FPoly) -> FPoly {
        let mut out = FPoly::zero();
        for (e1, c1) in &self.terms {
            for (e2, c2) in &rhs.terms {
                out.push(e1 + e2, c1 * c2);
            }
        }
        out
    }
}

impl Mul for FPoly {
    type Output = FPoly;
    fn mul(self, rhs: FPoly) -> FPoly {
        &self * &rhs
    }
}

impl fmt::Display for FPoly {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.is_zero() {
            return write!(f, "0");
        }
        for (k, (&e, c)) in self.terms.iter().rev().enumerate() {
            let neg = c.is_negative();
            let mag = c.abs();
            if k == 0 {
                if neg {
                    write!(f, "-")?;
                }
            } else {
                write!(f, " {} ", if neg { "-" } else { "+" })?;
            }
            let unit = mag.is_one();
            match e {
                0 => write!(f, "{mag}")?,
                1 if unit => write!(f, "f")?,
                1 => write!(f, "{mag}f")?,
                _ if unit => write!(f, "f^{e}")?,
                _ => write!(f, "{mag}f^{e}")?,
            }
        }
        Ok(())
    }
}
