//! Dimensions of the invariant sublattices A_i ⊇ B_i ⊇ W_i ⊇ X_i and of the
//! quotients B_i/Z_i, B_i/Y_i over κ = F₂.

use serde::{Deserialize, Serialize};

use crate::dyadic::RamifiedElem;
use crate::error::{Error, Result};
use crate::gram::HermitianGram;
use crate::jordan::{jordan_split, JordanDecomposition};
use crate::matrix::{F2Mat, Mat};
use crate::profile::{TypeProfile, TypeTag};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct SublatticeDims {
    pub scale: i64,
    pub a_over_b: usize,
    pub w_over_x: usize,
    /// dim B_i/Z_i, even scales only.
    #[serde(skip_serializing_if = "Option::is_none")]
    pub b_over_z: Option<usize>,
    /// dim B_i/Y_i, odd scales only.
    #[serde(skip_serializing_if = "Option::is_none")]
    pub b_over_y: Option<usize>,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct SublatticeCheck {
    pub computed: Vec<SublatticeDims>,
    pub expected: Vec<SublatticeDims>,
    pub matches: bool,
}

fn not_integral(what: &str) -> Error {
    Error::Precision(format!("{what} is not integral at working precision"))
}

fn mod_pi_after(x: RamifiedElem, e: u32) -> Result<bool> {
    Ok(x.div_pi_pow(e).map_err(|_| not_integral("scaled form"))?.a() & 1 == 1)
}

/// Bit of h(x,x)/2^e for an A-valued diagonal entry.
fn half_bit(x: RamifiedElem, e: u32) -> Result<bool> {
    if x.a() & ((1u64 << e) - 1) != 0 {
        return Err(not_integral("norm"));
    }
    Ok((x.a() >> e) & 1 == 1)
}

/// Sublattice dimensions for every nonzero component, from the definitions.
pub fn invariant_sublattices(g: &HermitianGram) -> Result<Vec<SublatticeDims>> {
    sublattice_dims(&jordan_split(g)?)
}

pub fn sublattice_dims(d: &JordanDecomposition) -> Result<Vec<SublatticeDims>> {
    if d.components.iter().any(|c| c.scale < 0) {
        return Err(Error::Capability(
            "sublattices need a Gram matrix with nonnegative scales".into(),
        ));
    }
    let ring = d.ring;
    let n = d.rank();
    let offsets = d.offsets();
    let scale_of: Vec<i64> = d
        .components
        .iter()
        .zip(&offsets)
        .flat_map(|(c, _)| std::iter::repeat_n(c.scale, c.rank))
        .collect();
    let h = &d.normal_form;
    let mut out = Vec::new();
    for comp in &d.components {
        let i = comp.scale;
        let iu = i as u32;
        let m = (i + 1).div_euclid(2) as u32;
        // Basis of A_i.
        let a_basis = Mat::from_fn(ring, n, n, |p, q| {
            if p == q {
                ring.pi_pow((i - scale_of[q]).max(0) as u32)
            } else {
                ring.zero()
            }
        });
        let ga = h.congruence(&a_basis);
        let bil = {
            let mut f = F2Mat::zeros(n, n);
            for p in 0..n {
                for q in 0..n {
                    f.set(p, q, mod_pi_after(ga[(p, q)], iu)?);
                }
            }
            f
        };
        let norms: Vec<bool> = (0..n)
            .map(|p| half_bit(ga[(p, p)], m))
            .collect::<Result<_>>()?;

        let a_over_b = usize::from(norms.iter().any(|&b| b));
        let w_over_x = if i % 2 == 0 {
            bil.solve(&norms)
                .ok_or_else(|| Error::Mismatch(format!("no characteristic vector at scale {i}")))?;
            a_over_b
        } else {
            0
        };

        // B_i/πA_i as F₂ vectors and a lattice basis of B_i.
        let pivot = norms.iter().position(|&b| b);
        let mut s_vecs: Vec<Vec<bool>> = Vec::new();
        let mut b_cols: Vec<Vec<RamifiedElem>> = Vec::new();
        for k in 0..n {
            if Some(k) == pivot {
                continue;
            }
            let mut v = vec![false; n];
            v[k] = true;
            if norms[k] {
                v[pivot.expect("pivot exists when a norm bit is set")] = true;
            }
            b_cols.push(
                (0..n)
                    .map(|p| if v[p] { a_basis[(p, p)] } else { ring.zero() })
                    .collect(),
            );
            s_vecs.push(v);
        }
        if let Some(k0) = pivot {
            b_cols.push(
                (0..n)
                    .map(|p| if p == k0 { a_basis[(p, p)].mul_pi() } else { ring.zero() })
                    .collect(),
            );
        }
        let s = F2Mat::from_fn(n, s_vecs.len(), |p, q| s_vecs[q][p]);
        let restricted = s.transpose().mul(&bil.mul(&s));

        let (b_over_z, b_over_y) = if i % 2 == 0 {
            let vb = Mat::from_cols(ring, n, &b_cols);
            let gb = h.congruence(&vb);
            let mu = iu / 2;
            let mut t = F2Mat::zeros(n, n);
            for p in 0..n {
                for q in 0..n {
                    let a = gb[(p, q)].a();
                    if a & ((1u64 << mu) - 1) != 0 {
                        return Err(not_integral("trace form"));
                    }
                    t.set(p, q, (a >> mu) & 1 == 1);
                }
            }
            let rad = t.kernel();
            let mut q_vals = Vec::with_capacity(rad.len());
            for c in &rad {
                let x: Vec<RamifiedElem> = (0..n)
                    .map(|p| {
                        (0..n)
                            .filter(|&k| c[k])
                            .fold(ring.zero(), |acc, k| acc + vb[(p, k)])
                    })
                    .collect();
                let hx = crate::matrix::form(h, &x, &x);
                q_vals.push(half_bit(hx, mu + 1)?);
            }
            let radical = if q_vals.iter().any(|&b| b) {
                rad.len() - 1
            } else {
                rad.len()
            };
            (Some(n - radical), None)
        } else {
            (None, Some(restricted.rank()))
        };
        out.push(SublatticeDims {
            scale: i,
            a_over_b,
            w_over_x,
            b_over_z,
            b_over_y,
        });
    }
    Ok(out)
}

/// Dimensions predicted from the type data alone.
pub fn closed_form_dims(p: &TypeProfile) -> Vec<SublatticeDims> {
    p.entries
        .iter()
        .map(|e| {
            let n = e.rank;
            let type_i = usize::from(e.is_type_i());
            if e.is_even() {
                let bz = match (e.tag, e.bound) {
                    (TypeTag::Ie, _) => n - 1,
                    (TypeTag::IIEven, true) => n + 1,
                    _ => n,
                };
                SublatticeDims {
                    scale: e.scale,
                    a_over_b: type_i,
                    w_over_x: type_i,
                    b_over_z: Some(bz),
                    b_over_y: None,
                }
            } else {
                let by = if e.is_odd_free_i() { n - 2 } else { n };
                SublatticeDims {
                    scale: e.scale,
                    a_over_b: type_i,
                    w_over_x: 0,
                    b_over_z: None,
                    b_over_y: Some(by),
                }
            }
        })
        .collect()
}

pub fn check_sublattices(d: &JordanDecomposition) -> Result<SublatticeCheck> {
    let computed = sublattice_dims(d)?;
    let expected = closed_form_dims(&TypeProfile::from_decomposition(d)?);
    let matches = computed == expected;
    Ok(SublatticeCheck {
        computed,
        expected,
        matches,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::dyadic::Ring;
    use crate::jordan::{JordanComponent, Tail};

    fn decomposition(delta: i64, comps: &[(i64, usize, Tail)]) -> JordanDecomposition {
        let ring = Ring::new(24, delta).unwrap();
        let comps = comps
            .iter()
            .map(|&(s, r, t)| JordanComponent::new(s, r, t, delta).unwrap())
            .collect();
        JordanDecomposition::from_components(ring, comps).unwrap()
    }

    #[test]
    fn rank_one_unit() {
        let g = HermitianGram::diagonal(Ring::new(16, 1).unwrap(), &[1]).unwrap();
        let dims = invariant_sublattices(&g).unwrap();
        assert_eq!(dims[0].b_over_z, Some(1));
        assert_eq!(dims[0].a_over_b, 1);
        assert_eq!(dims[0].w_over_x, 1);
    }

    #[test]
    fn hyperbolic_plane() {
        let d = decomposition(1, &[(0, 2, Tail::None)]);
        let dims = sublattice_dims(&d).unwrap();
        assert_eq!(dims[0].b_over_z, Some(2));
        assert_eq!(dims[0].a_over_b, 0);
    }

    #[test]
    fn type_ie_loses_one() {
        let d = decomposition(3, &[(0, 2, Tail::A12b1 { b: 1 })]);
        assert_eq!(sublattice_dims(&d).unwrap()[0].b_over_z, Some(1));
    }

    #[test]
    fn closed_forms_hold() {
        let shapes: [&[(i64, usize, Tail)]; 5] = [
            &[(0, 2, Tail::None), (1, 2, Tail::H1), (2, 1, Tail::Unit { a: 3 })],
            &[(0, 1, Tail::Unit { a: 1 }), (1, 2, Tail::H1)],
            &[(1, 2, Tail::A4a { a: 1 }), (2, 2, Tail::A2d2b1 { b: 1 })],
            &[(0, 2, Tail::A2d2b1 { b: 1 }), (2, 1, Tail::Unit { a: 1 })],
            &[(0, 3, Tail::Unit { a: 3 }), (3, 4, Tail::H1)],
        ];
        for comps in shapes {
            for delta in [1, 3] {
                let c = check_sublattices(&decomposition(delta, comps)).unwrap();
                assert!(c.matches, "{comps:?}: {:?} vs {:?}", c.computed, c.expected);
            }
        }
    }
}
