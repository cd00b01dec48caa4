//! Closed-form local density from a type profile.

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, ToPrimitive};
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::poly::FPoly;
use crate::profile::{ProfileEntry, TypeProfile, TypeTag};
use crate::residue::ResidueField;

/// Reductive factor of the special fiber.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum FactorKind {
    EvenOrthogonal { d: usize, split: bool },
    OddOrthogonal { d: usize },
    Symplectic { d: usize },
}

impl FactorKind {
    pub fn degree(&self) -> usize {
        match *self {
            FactorKind::EvenOrthogonal { d, .. }
            | FactorKind::OddOrthogonal { d }
            | FactorKind::Symplectic { d } => d,
        }
    }

    /// Dimension as an algebraic group.
    pub fn dim(&self) -> i64 {
        let d = self.degree() as i64;
        match self {
            FactorKind::Symplectic { .. } => d * (d + 1) / 2,
            _ => d * (d - 1) / 2,
        }
    }

    /// Number of κ-points as a polynomial in f.
    pub fn order_poly(&self) -> FPoly {
        let sp = |m: i64| {
            (1..=m).fold(FPoly::f_pow(m * m), |acc, i| {
                acc * (FPoly::f_pow(2 * i) - FPoly::constant(1))
            })
        };
        match *self {
            FactorKind::Symplectic { d } => sp(d as i64 / 2),
            FactorKind::OddOrthogonal { d } => sp((d as i64 - 1) / 2),
            FactorKind::EvenOrthogonal { d: 0, .. } => FPoly::constant(1),
            FactorKind::EvenOrthogonal { d, split } => {
                let m = d as i64 / 2;
                let eps = if split { 1 } else { -1 };
                let base = FPoly::monomial(2, m * (m - 1)) * (FPoly::f_pow(m) - FPoly::constant(eps));
                (1..m).fold(base, |acc, i| {
                    acc * (FPoly::f_pow(2 * i) - FPoly::constant(1))
                })
            }
        }
    }

    pub fn order(&self, f: u64) -> BigInt {
        self.order_poly().eval(f).to_integer()
    }

    pub fn label(&self) -> String {
        match *self {
            FactorKind::EvenOrthogonal { d, split } => {
                format!("O^{}({d})", if split { "+" } else { "-" })
            }
            FactorKind::OddOrthogonal { d } => format!("O({d})"),
            FactorKind::Symplectic { d } => format!("Sp({d})"),
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct ReductiveFactor {
    pub scale: i64,
    #[serde(flatten)]
    pub kind: FactorKind,
}

/// Exponent data N_M, N_H, N, a and the d_i.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct ExponentTerms {
    pub n_m: i64,
    pub n_h: i64,
    /// N = N_H − N_M.
    pub n: i64,
    /// N evaluated from the direct sum formula.
    pub n_direct: i64,
    pub a: i64,
    pub d: Vec<(i64, i64)>,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct UnipotentDims {
    pub l: i64,
    pub dim_g1: i64,
    pub l_prime: i64,
}

/// One checked identity.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct IdentityCheck {
    pub name: String,
    pub holds: bool,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct FactorReport {
    pub scale: i64,
    pub group: String,
    #[serde(flatten)]
    pub kind: FactorKind,
    pub dim: i64,
    pub order: String,
}

/// Full output of [`local_density`].
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct DensityReport {
    pub f: u64,
    pub rank: usize,
    pub exponents: ExponentTerms,
    pub beta: usize,
    pub unipotent: UnipotentDims,
    pub factors: Vec<FactorReport>,
    /// #G̃(κ) as a decimal string.
    pub fiber_count: String,
    /// β_L as an exact rational "p" or "p/q".
    pub beta_l: String,
    /// β_L as a Laurent polynomial in f.
    pub beta_l_symbolic: String,
    pub identities: Vec<IdentityCheck>,
}

impl DensityReport {
    pub fn beta_l_value(&self) -> BigRational {
        self.beta_l.parse().expect("rational written by local_density")
    }

    pub fn fiber_count_value(&self) -> BigInt {
        self.fiber_count.parse().expect("integer written by local_density")
    }
}

fn pairs(p: &TypeProfile) -> impl Iterator<Item = (i64, i64, i64, i64)> + '_ {
    let e = &p.entries;
    (0..e.len()).flat_map(move |x| {
        (x + 1..e.len()).map(move |y| {
            (e[x].scale, e[y].scale, e[x].rank as i64, e[y].rank as i64)
        })
    })
}

fn scale_weight(i: i64) -> i64 {
    if i.rem_euclid(2) == 0 {
        (i + 2) / 2
    } else {
        (i + 3) / 2
    }
}

pub fn exponent_terms(p: &TypeProfile) -> ExponentTerms {
    let a = p.entries.iter().filter(|e| e.is_odd_free_i()).count() as i64;
    let d: Vec<(i64, i64)> = p
        .entries
        .iter()
        .map(|e| {
            let n = e.rank as i64;
            (e.scale, e.scale * n * (n - 1) / 2)
        })
        .collect();
    let sum_d: i64 = d.iter().map(|x| x.1).sum();
    let type_i: i64 = p
        .entries
        .iter()
        .filter(|e| e.is_type_i())
        .map(|e| e.rank as i64)
        .sum();
    let weights: i64 = p
        .entries
        .iter()
        .map(|e| scale_weight(e.scale) * e.rank as i64)
        .sum();
    let n_m = 2 * type_i + pairs(p).map(|(i, j, x, y)| (j - i) * x * y).sum::<i64>() - a;
    let n_h = type_i + pairs(p).map(|(_, j, x, y)| j * x * y).sum::<i64>() + weights + sum_d - a;
    let n_direct =
        pairs(p).map(|(i, _, x, y)| i * x * y).sum::<i64>() + weights + sum_d - type_i;
    ExponentTerms {
        n_m,
        n_h,
        n: n_h - n_m,
        n_direct,
        a,
        d,
    }
}

/// Number of type I components L_j with the required type II neighbours.
pub fn beta_count(p: &TypeProfile) -> usize {
    p.entries.iter().filter(|e| qualifies_for_beta(p, e)).count()
}

/// Type I component whose following neighbours are all type II.
pub fn qualifies_for_beta(p: &TypeProfile, e: &ProfileEntry) -> bool {
    let j = e.scale;
    let need: &[i64] = if e.is_even() { &[2, 3, 4] } else { &[-1, 1, 2, 3] };
    e.is_type_i() && need.iter().all(|&k| !p.is_type_i(j + k))
}

pub fn reductive_factors(p: &TypeProfile, field: &ResidueField) -> Vec<ReductiveFactor> {
    p.entries
        .iter()
        .map(|e| {
            let n = e.rank;
            let kind = match e.tag {
                TypeTag::IIEven if !e.bound => {
                    let bbar = field.from_prime(e.bbar.unwrap_or(0));
                    FactorKind::EvenOrthogonal {
                        d: n,
                        split: field.artin_schreier_solvable(bbar),
                    }
                }
                TypeTag::IIEven => FactorKind::OddOrthogonal { d: n + 1 },
                TypeTag::Io => FactorKind::OddOrthogonal { d: n },
                TypeTag::Ie => FactorKind::OddOrthogonal { d: n - 1 },
                TypeTag::IIOdd => FactorKind::Symplectic { d: n },
                TypeTag::IOdd if e.bound => FactorKind::Symplectic { d: n },
                TypeTag::IOdd => FactorKind::Symplectic { d: n - 2 },
            };
            ReductiveFactor {
                scale: e.scale,
                kind,
            }
        })
        .collect()
}

pub fn unipotent_dims(p: &TypeProfile, factors: &[ReductiveFactor]) -> UnipotentDims {
    let n = p.rank() as i64;
    let l = n * n - factors.iter().map(|f| f.kind.dim()).sum::<i64>();
    let cross: i64 = pairs(p).map(|(_, _, x, y)| x * y).sum();
    let even_i = p.entries.iter().filter(|e| e.is_even() && e.is_type_i());
    let even_i_count = even_i.clone().count() as i64;
    let even_i_next_ii = even_i.filter(|e| !p.is_type_i(e.scale + 2)).count() as i64;
    let odd_free = p.entries.iter().filter(|e| e.is_odd_free_i());
    let odd_free_count = odd_free.clone().count() as i64;
    let own: i64 = p
        .entries
        .iter()
        .map(|e| {
            let m = e.rank as i64;
            if e.is_even() {
                (m * m + m) / 2
            } else {
                (m * m - m) / 2
            }
        })
        .sum();
    let dim_g1 = cross + own + odd_free_count - even_i_count + even_i_next_ii;
    let ie: i64 = p
        .entries
        .iter()
        .filter(|e| e.tag == TypeTag::Ie)
        .map(|e| e.rank as i64 - 1)
        .sum();
    let odd_free_sum: i64 = odd_free.map(|e| 2 * e.rank as i64 - 2).sum();
    let bound_ii: i64 = p
        .entries
        .iter()
        .filter(|e| e.tag == TypeTag::IIEven && e.bound)
        .map(|e| e.rank as i64)
        .sum();
    let l_prime = cross + ie + odd_free_sum - bound_ii + even_i_count - even_i_next_ii;
    UnipotentDims { l, dim_g1, l_prime }
}

/// #G̃(κ) = f^l · 2^β · ∏ orders, as a polynomial in f.
pub fn special_fiber_poly(p: &TypeProfile, field: &ResidueField) -> FPoly {
    let factors = reductive_factors(p, field);
    let dims = unipotent_dims(p, &factors);
    let beta = beta_count(p);
    factors.iter().fold(
        FPoly::monomial(BigInt::one() << beta, dims.l),
        |acc, f| acc * f.kind.order_poly(),
    )
}

pub fn special_fiber_count(p: &TypeProfile, f: u64) -> Result<BigInt> {
    let field = ResidueField::with_size(f)?;
    Ok(special_fiber_poly(p, &field).eval(f).to_integer())
}

/// Identities that must hold for every profile.
pub fn identities(
    p: &TypeProfile,
    e: &ExponentTerms,
    dims: &UnipotentDims,
    beta: usize,
) -> Vec<IdentityCheck> {
    let type_i = p.entries.iter().filter(|x| x.is_type_i()).count();
    let check = |name: &str, holds: bool| IdentityCheck {
        name: name.into(),
        holds,
    };
    vec![
        check("N = N_H - N_M", e.n == e.n_h - e.n_m),
        check("N matches the direct sum", e.n == e.n_direct),
        check("l = l' + dim G1", dims.l == dims.l_prime + dims.dim_g1),
        check(
            "l, l', dim G1 >= 0",
            dims.l >= 0 && dims.l_prime >= 0 && dims.dim_g1 >= 0,
        ),
        check("beta <= #type I components", beta <= type_i),
    ]
}

/// β_L = f^{N − n²} · #G̃(κ).
pub fn local_density(p: &TypeProfile, f: u64) -> Result<DensityReport> {
    let field = ResidueField::with_size(f)?;
    let exponents = exponent_terms(p);
    let factors = reductive_factors(p, &field);
    let unipotent = unipotent_dims(p, &factors);
    let beta = beta_count(p);
    let checks = identities(p, &exponents, &unipotent, beta);
    if let Some(bad) = checks.iter().find(|c| !c.holds) {
        return Err(Error::Mismatch(format!("identity failed: {}", bad.name)));
    }
    let fiber = special_fiber_poly(p, &field);
    let n = p.rank() as i64;
    let symbolic = &FPoly::f_pow(exponents.n - n * n) * &fiber;
    let fiber_count = fiber.eval(f).to_integer();
    let beta_l = symbolic.eval(f);
    let factors = factors
        .iter()
        .map(|x| FactorReport {
            scale: x.scale,
            group: x.kind.label(),
            kind: x.kind,
            dim: x.kind.dim(),
            order: x.kind.order(f).to_string(),
        })
        .collect();
    Ok(DensityReport {
        f,
        rank: p.rank(),
        exponents,
        beta,
        unipotent,
        factors,
        fiber_count: fiber_count.to_string(),
        beta_l: beta_l.to_string(),
        beta_l_symbolic: symbolic.to_string(),
        identities: checks,
    })
}

/// β_L as an f64, for display.
pub fn approximate(r: &BigRational) -> f64 {
    r.to_f64().unwrap_or(f64::NAN)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::jordan::{JordanComponent, Tail};

    fn profile(comps: &[(i64, usize, Tail)]) -> TypeProfile {
        let c: Vec<JordanComponent> = comps
            .iter()
            .map(|&(s, r, t)| JordanComponent::new(s, r, t, 1).unwrap())
            .collect();
        TypeProfile::classify(&c, 1).unwrap()
    }

    fn rat(n: i64) -> BigRational {
        BigRational::from_integer(n.into())
    }

    #[test]
    fn rank_one_unit() {
        let p = profile(&[(0, 1, Tail::Unit { a: 1 })]);
        let r = local_density(&p, 2).unwrap();
        assert_eq!(r.exponents.n, 0);
        assert_eq!(r.beta, 1);
        assert_eq!(
            r.unipotent,
            UnipotentDims {
                l: 1,
                dim_g1: 1,
                l_prime: 0
            }
        );
        assert_eq!(r.fiber_count, "4");
        assert_eq!(r.beta_l_value(), rat(2));
        assert_eq!(r.beta_l_symbolic, "2");
        let field = ResidueField::with_size(4).unwrap();
        assert_eq!(special_fiber_poly(&p, &field).to_string(), "2f");
    }

    #[test]
    fn hyperbolic_plane() {
        let p = profile(&[(0, 2, Tail::None)]);
        let r = local_density(&p, 2).unwrap();
        assert_eq!(r.exponents.n, 2);
        assert_eq!(r.beta, 0);
        assert_eq!((r.unipotent.l, r.unipotent.dim_g1, r.unipotent.l_prime), (3, 3, 0));
        assert_eq!(r.fiber_count, "16");
        assert_eq!(r.beta_l_value(), rat(4));
    }

    #[test]
    fn unit_plus_h1() {
        let p = profile(&[(0, 1, Tail::Unit { a: 1 }), (1, 2, Tail::H1)]);
        let r = local_density(&p, 2).unwrap();
        assert_eq!(r.exponents.n, 3);
        assert_eq!(r.beta, 1);
        assert_eq!((r.unipotent.l, r.unipotent.dim_g1, r.unipotent.l_prime), (6, 4, 2));
        assert_eq!(r.fiber_count, "768");
        let groups: Vec<&str> = r.factors.iter().map(|f| f.group.as_str()).collect();
        assert_eq!(groups, vec!["O(1)", "Sp(2)"]);
    }

    #[test]
    fn group_orders() {
        assert_eq!(FactorKind::Symplectic { d: 2 }.order(2), 6.into());
        assert_eq!(FactorKind::Symplectic { d: 4 }.order(2), 720.into());
        assert_eq!(FactorKind::Symplectic { d: 0 }.order(2), 1.into());
        assert_eq!(FactorKind::EvenOrthogonal { d: 2, split: true }.order(2), 2.into());
        assert_eq!(FactorKind::EvenOrthogonal { d: 2, split: false }.order(2), 6.into());
        assert_eq!(FactorKind::EvenOrthogonal { d: 4, split: true }.order(2), 72.into());
        assert_eq!(FactorKind::EvenOrthogonal { d: 4, split: false }.order(2), 120.into());
        assert_eq!(FactorKind::OddOrthogonal { d: 3 }.order(2), 6.into());
        assert_eq!(FactorKind::OddOrthogonal { d: 1 }.order(2), 1.into());
    }

    #[test]
    fn type_ie_pair_density() {
        let p = profile(&[(0, 2, Tail::A12b1 { b: 0 })]);
        let r = local_density(&p, 2).unwrap();
        assert_eq!(r.beta_l_value(), rat(2));
    }

    #[test]
    fn empty_profile_has_density_one() {
        let p = TypeProfile {
            delta: 1,
            entries: Vec::new(),
        };
        assert_eq!(local_density(&p, 2).unwrap().beta_l_value(), rat(1));
    }

    #[test]
    fn nonsplit_depends_on_residue_degree() {
        let p = profile(&[(0, 2, Tail::A2d2b1 { b: 1 })]);
        let f2 = ResidueField::with_size(2).unwrap();
        let f4 = ResidueField::with_size(4).unwrap();
        assert!(matches!(
            reductive_factors(&p, &f2)[0].kind,
            FactorKind::EvenOrthogonal { split: false, .. }
        ));
        assert!(matches!(
            reductive_factors(&p, &f4)[0].kind,
            FactorKind::EvenOrthogonal { split: true, .. }
        ));
    }
}
