//! σ-hermitian Gram matrices and their basic invariants.

use rand::{Rng as _, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::dyadic::{RamifiedElem, Ring, PRECISION_GUARD};
use crate::error::{Error, Result};
use crate::matrix::Mat;

/// Gram matrix of a hermitian lattice (L, h) with h(x, y) = σ(ᵗx)Gy.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct HermitianGram {
    mat: Mat,
}

/// One violation reported by [`HermitianGram::validate`].
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct Violation {
    pub row: usize,
    pub col: usize,
    pub message: String,
}

/// Scale and norm ideals as π-exponents.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct ScaleNorm {
    pub scale: u32,
    pub norm: u32,
}

impl HermitianGram {
    /// Wraps a matrix without validation.
    pub fn new_unchecked(mat: Mat) -> Self {
        Self { mat }
    }

    /// Wraps a matrix, rejecting it when [`validate`](Self::validate) reports problems.
    pub fn new(mat: Mat) -> Result<Self> {
        let g = Self { mat };
        let issues = g.validate();
        if issues.is_empty() {
            Ok(g)
        } else {
            let msg: Vec<String> = issues
                .iter()
                .map(|v| format!("({}, {}): {}", v.row, v.col, v.message))
                .collect();
            Err(Error::Invalid(msg.join("; ")))
        }
    }

    pub fn from_pairs(ring: Ring, entries: &[Vec<(i64, i64)>]) -> Result<Self> {
        Self::new(Mat::from_pairs(ring, entries)?)
    }

    /// Diagonal Gram matrix with the given integer entries.
    pub fn diagonal(ring: Ring, entries: &[i64]) -> Result<Self> {
        let n = entries.len();
        Self::new(Mat::from_fn(ring, n, n, |i, j| {
            if i == j {
                ring.int(entries[i])
            } else {
                ring.zero()
            }
        }))
    }

    pub fn mat(&self) -> &Mat {
        &self.mat
    }

    pub fn into_mat(self) -> Mat {
        self.mat
    }

    pub fn rank(&self) -> usize {
        self.mat.rows()
    }

    pub fn ring(&self) -> Ring {
        self.mat.ring()
    }

    pub fn entry(&self, i: usize, j: usize) -> RamifiedElem {
        self.mat[(i, j)]
    }

    /// Hermitian symmetry, σ-fixed diagonal and nondegeneracy at precision.
    pub fn validate(&self) -> Vec<Violation> {
        let m = &self.mat;
        let mut out = Vec::new();
        if !m.is_square() {
            out.push(Violation {
                row: m.rows(),
                col: m.cols(),
                message: "matrix is not square".into(),
            });
            return out;
        }
        let n = m.rows();
        for i in 0..n {
            if !m[(i, i)].is_rational() {
                out.push(Violation {
                    row: i,
                    col: i,
                    message: format!("diagonal entry {} is not fixed by σ", m[(i, i)]),
                });
            }
            for j in i + 1..n {
                if m[(j, i)] != m[(i, j)].conj() {
                    out.push(Violation {
                        row: j,
                        col: i,
                        message: format!(
                            "entry {} differs from σ of ({i}, {j}) = {}",
                            m[(j, i)],
                            m[(i, j)].conj()
                        ),
                    });
                }
            }
        }
        if out.is_empty() && n > 0 {
            let limit = 2 * self.ring().precision() - PRECISION_GUARD.min(self.ring().precision());
            match m.det_valuation() {
                None => out.push(Violation {
                    row: 0,
                    col: 0,
                    message: "degenerate at working precision".into(),
                }),
                Some(v) if v >= limit => out.push(Violation {
                    row: 0,
                    col: 0,
                    message: format!("det valuation {v} exceeds the reliable window {limit}"),
                }),
                _ => {}
            }
        }
        out
    }

    /// Scale s = min entry valuation; norm generated by the diagonal and
    /// the traces Tr(g), Tr(π·g) of off-diagonal entries.
    pub fn scale_norm(&self) -> Option<ScaleNorm> {
        let m = &self.mat;
        let n = m.rows();
        let scale = m.min_valuation()?;
        let mut norm: Option<u32> = None;
        let mut push = |v: Option<u32>| {
            if let Some(v) = v {
                norm = Some(norm.map_or(v, |w| w.min(v)));
            }
        };
        for i in 0..n {
            push(m[(i, i)].valuation());
            for j in i + 1..n {
                let g = m[(i, j)];
                let pg = g.mul_pi();
                push((g + g.conj()).valuation());
                push((pg + pg.conj()).valuation());
            }
        }
        Some(ScaleNorm {
            scale,
            norm: norm.unwrap_or(u32::MAX),
        })
    }

    /// σ(ᵗU)·G·U.
    pub fn transform(&self, u: &Mat) -> HermitianGram {
        HermitianGram {
            mat: self.mat.congruence(u),
        }
    }

    /// π·L: every entry multiplied by ξ = π·σ(π).
    pub fn rescale_by_pi(&self) -> HermitianGram {
        HermitianGram {
            mat: self.mat.scale(self.ring().xi()),
        }
    }

    /// Orthogonal sum.
    pub fn direct_sum(&self, other: &HermitianGram) -> HermitianGram {
        let (n, k) = (self.rank(), other.rank());
        let ring = self.ring();
        HermitianGram {
            mat: Mat::from_fn(ring, n + k, n + k, |i, j| {
                if i < n && j < n {
                    self.mat[(i, j)]
                } else if i >= n && j >= n {
                    other.mat[(i - n, j - n)]
                } else {
                    ring.zero()
                }
            }),
        }
    }

    /// Conjugate by a pseudo-random U, invertible over B, chosen from the seed.
    pub fn random_isometry_conjugate(&self, seed: u64) -> (HermitianGram, Mat) {
        let u = random_invertible(self.ring(), self.rank(), seed);
        (self.transform(&u), u)
    }
}

/// Pseudo-random invertible matrix with entries of coordinates in [−3, 3].
pub fn random_invertible(ring: Ring, n: usize, seed: u64) -> Mat {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    loop {
        let u = Mat::from_fn(ring, n, n, |_, _| {
            ring.elem(rng.gen_range(-3..=3), rng.gen_range(-3..=3))
        });
        if u.is_invertible() {
            return u;
        }
    }
}
