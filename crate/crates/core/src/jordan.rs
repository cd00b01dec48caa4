//! Jordan splitting into per-scale normal forms.
//!
//! A component at scale i = 2m (resp. 2m + 1) is written as hyperbolic
//! planes ξ^m·[[0, 1], [1, 0]] (resp. ξ^m·[[0, π], [σ(π), 0]]) followed by
//! one tail:
//!
//! | tail               | Gram / ξ^m                 | scale |
//! |--------------------|----------------------------|-------|
//! | `Unit(a)`          | (a), a odd                 | even  |
//! | `A12b1(b)`         | [[1, 1], [1, 2b]]          | even  |
//! | `A2d2b1(b)`        | [[2δ, 1], [1, 2b]], b odd  | even  |
//! | `A4a(a)`           | [[4a, π], [σ(π), 2δ]]      | odd   |
//! | `H1`               | [[0, π], [σ(π), 0]]        | odd   |
//! | `None`             | empty                      | even  |

use std::collections::BTreeMap;

use serde::{Deserialize, Serialize};

use crate::dyadic::{RamifiedElem, Ring, MAX_PRECISION, PRECISION_GUARD};
use crate::error::{Error, Result};
use crate::gram::HermitianGram;
use crate::matrix::{form, vec_add, vec_axpy, vec_scale, F2Mat, Mat};

type Vector = Vec<RamifiedElem>;

/// Extra coordinate bits used internally while splitting.
const WORK_MARGIN: u32 = 32;

/// Search budget for the representation searches.
const NEWTON_STEPS: usize = 200;

/// Non-hyperbolic remainder of a Jordan component.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum Tail {
    None,
    Unit {
        a: i64,
    },
    #[serde(rename = "a_1_2b_1")]
    A12b1 {
        b: i64,
    },
    #[serde(rename = "a_2delta_2b_1")]
    A2d2b1 {
        b: i64,
    },
    #[serde(rename = "a_4a_2delta_pi")]
    A4a {
        a: i64,
    },
    H1,
}

impl Tail {
    pub fn rank(&self) -> usize {
        match self {
            Tail::None => 0,
            Tail::Unit { .. } => 1,
            _ => 2,
        }
    }

    /// Whether the tail can occur at a scale of the given parity.
    pub fn fits_scale(&self, scale: i64) -> bool {
        let even = scale.rem_euclid(2) == 0;
        match self {
            Tail::None | Tail::Unit { .. } | Tail::A12b1 { .. } | Tail::A2d2b1 { .. } => even,
            Tail::A4a { .. } | Tail::H1 => !even,
        }
    }

    /// Tail with parameters reduced to their canonical representatives.
    pub fn canonical(&self, delta: i64) -> Tail {
        match *self {
            Tail::Unit { a } => Tail::Unit {
                a: canonical_unit(a, delta),
            },
            Tail::A12b1 { b } => Tail::A12b1 { b: b.rem_euclid(2) },
            Tail::A2d2b1 { b } => Tail::A2d2b1 { b: b.rem_euclid(2) },
            Tail::A4a { a } => Tail::A4a { a: a.rem_euclid(8) },
            t => t,
        }
    }

    pub fn label(&self) -> &'static str {
        match self {
            Tail::None => "none",
            Tail::Unit { .. } => "unit",
            Tail::A12b1 { .. } => "A(1,2b,1)",
            Tail::A2d2b1 { .. } => "A(2δ,2b,1)",
            Tail::A4a { .. } => "A(4a,2δ,π)",
            Tail::H1 => "H(1)",
        }
    }
}

/// Smallest positive representative mod 8 of a·N(B^×), the class of an odd
/// unit a up to norms of units.
pub fn canonical_unit(a: i64, delta: i64) -> i64 {
    let a = a.rem_euclid(8);
    let other = (1 - 2 * delta).rem_euclid(8);
    a.min((a * other).rem_euclid(8))
}

/// One Jordan component in normal form.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct JordanComponent {
    pub scale: i64,
    pub rank: usize,
    pub hyperbolic_count: usize,
    /// Tail with canonical parameters.
    pub tail: Tail,
    /// Tail with the exact parameters appearing in the normal form.
    pub exact_tail: Tail,
}

impl JordanComponent {
    /// Component from its shape; validates rank and scale parity.
    pub fn new(scale: i64, rank: usize, tail: Tail, delta: i64) -> Result<Self> {
        if !tail.fits_scale(scale) {
            return Err(Error::Invalid(format!(
                "tail {} does not occur at scale {scale}",
                tail.label()
            )));
        }
        if rank < tail.rank() || !(rank - tail.rank()).is_multiple_of(2) {
            return Err(Error::Invalid(format!(
                "rank {rank} incompatible with tail {}",
                tail.label()
            )));
        }
        if scale.rem_euclid(2) == 1 && tail.rank() == 0 {
            return Err(Error::Invalid("odd scale needs a rank-2 tail".into()));
        }
        if let Tail::Unit { a } = tail {
            if a.rem_euclid(2) != 1 {
                return Err(Error::Invalid(format!("unit tail needs odd a, got {a}")));
            }
        }
        if let Tail::A2d2b1 { b } = tail {
            if b.rem_euclid(2) != 1 {
                return Err(Error::Invalid(format!(
                    "A(2δ,2b,1) tail needs odd b (even b is hyperbolic), got {b}"
                )));
            }
        }
        Ok(Self {
            scale,
            rank,
            hyperbolic_count: (rank - tail.rank()) / 2,
            tail: tail.canonical(delta),
            exact_tail: tail,
        })
    }

    /// Parity type I for even scales.
    pub fn is_even_type_i(&self) -> bool {
        matches!(self.tail, Tail::Unit { .. } | Tail::A12b1 { .. })
    }

    pub fn is_odd(&self) -> bool {
        self.scale.rem_euclid(2) == 1
    }

    /// Normal-form Gram matrix of this component.
    pub fn gram(&self, ring: Ring) -> Result<Mat> {
        component_template(ring, self.scale, self.hyperbolic_count, self.exact_tail)
    }
}

/// Result of [`jordan_split`].
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct JordanDecomposition {
    pub ring: Ring,
    pub components: Vec<JordanComponent>,
    /// σ(ᵗU)·G·U, block diagonal with blocks in increasing scale.
    pub normal_form: Mat,
    /// Change of basis U.
    pub transform: Mat,
}

impl JordanDecomposition {
    /// Decomposition assembled from component shapes, with U = identity.
    pub fn from_components(ring: Ring, mut components: Vec<JordanComponent>) -> Result<Self> {
        components.retain(|c| c.rank > 0);
        components.sort_by_key(|c| c.scale);
        if components.windows(2).any(|w| w[0].scale == w[1].scale) {
            return Err(Error::Invalid("duplicate component scale".into()));
        }
        let n: usize = components.iter().map(|c| c.rank).sum();
        let mut nf = Mat::zeros(ring, n, n);
        let mut o = 0;
        for c in &components {
            let block = c.gram(ring)?;
            for i in 0..c.rank {
                for j in 0..c.rank {
                    nf[(o + i, o + j)] = block[(i, j)];
                }
            }
            o += c.rank;
        }
        Ok(Self {
            ring,
            components,
            normal_form: nf,
            transform: Mat::identity(ring, n),
        })
    }

    pub fn rank(&self) -> usize {
        self.components.iter().map(|c| c.rank).sum()
    }

    pub fn normal_gram(&self) -> HermitianGram {
        HermitianGram::new_unchecked(self.normal_form.clone())
    }

    pub fn component(&self, scale: i64) -> Option<&JordanComponent> {
        self.components.iter().find(|c| c.scale == scale)
    }

    /// Offset of each component inside the normal form.
    pub fn offsets(&self) -> Vec<usize> {
        let mut o = 0;
        self.components
            .iter()
            .map(|c| {
                let r = o;
                o += c.rank;
                r
            })
            .collect()
    }
}

/// Normal-form block for one component.
pub fn component_template(ring: Ring, scale: i64, hyperbolic: usize, tail: Tail) -> Result<Mat> {
    if scale < 0 {
        return Err(Error::Capability(format!(
            "negative scale {scale} has no integral Gram matrix"
        )));
    }
    let m = (scale / 2) as u32;
    let xi = ring.xi_pow(m);
    let odd = scale % 2 == 1;
    let n = 2 * hyperbolic + tail.rank();
    let mut g = Mat::zeros(ring, n, n);
    let off = if odd { xi * ring.pi() } else { xi };
    let put_pair = |g: &mut Mat, o: usize| {
        g[(o, o + 1)] = off;
        g[(o + 1, o)] = off.conj();
    };
    for p in 0..hyperbolic {
        put_pair(&mut g, 2 * p);
    }
    let o = 2 * hyperbolic;
    let two_delta = ring.int(2 * ring.delta_signed());
    match tail {
        Tail::None => {}
        Tail::Unit { a } => g[(o, o)] = xi * ring.int(a),
        Tail::A12b1 { b } => {
            g[(o, o)] = xi;
            g[(o, o + 1)] = xi;
            g[(o + 1, o)] = xi;
            g[(o + 1, o + 1)] = xi * ring.int(2 * b);
        }
        Tail::A2d2b1 { b } => {
            g[(o, o)] = xi * two_delta;
            g[(o, o + 1)] = xi;
            g[(o + 1, o)] = xi;
            g[(o + 1, o + 1)] = xi * ring.int(2 * b);
        }
        Tail::A4a { a } => {
            put_pair(&mut g, o);
            g[(o, o)] = xi * ring.int(4 * a);
            g[(o + 1, o + 1)] = xi * two_delta;
        }
        Tail::H1 => put_pair(&mut g, o),
    }
    Ok(g)
}

/// Splits a Gram matrix into Jordan components in normal form.
pub fn jordan_split(g: &HermitianGram) -> Result<JordanDecomposition> {
    let ring = g.ring();
    let n = g.rank();
    if n == 0 {
        return JordanDecomposition::from_components(ring, Vec::new());
    }
    let issues = g.validate();
    if let Some(v) = issues.first() {
        return Err(if v.message.contains("precision") || v.message.contains("degenerate") {
            Error::Precision(v.message.clone())
        } else {
            Error::Invalid(format!("({}, {}): {}", v.row, v.col, v.message))
        });
    }
    let work = ring.with_precision((ring.precision() + WORK_MARGIN).min(MAX_PRECISION))?;
    let ctx = Ctx {
        ring: work,
        limit: 2 * ring.precision() - PRECISION_GUARD.min(ring.precision()),
    };
    let gw = hermitian_lift(g.mat(), work);

    let pieces = ctx.split_pieces(&gw, unit_vectors(work, n))?;
    let mut by_scale: BTreeMap<u32, Vec<Vector>> = BTreeMap::new();
    for p in pieces {
        by_scale.entry(p.scale).or_default().extend(p.vecs);
    }
    let mut comps: BTreeMap<u32, Comp> = BTreeMap::new();
    for (scale, vecs) in by_scale {
        comps.insert(scale, ctx.normalize_component(&gw, scale, vecs)?);
    }
    ctx.mix_bound_tails(&gw, &mut comps)?;

    let cols: Vec<Vector> = comps.values().flat_map(|c| c.vecs.iter().cloned()).collect();
    let u = Mat::from_cols(work, n, &cols).reduce(ring);
    if !u.is_invertible() {
        return Err(Error::Precision("change of basis lost invertibility".into()));
    }
    let nf = g.mat().congruence(&u);
    let mut components = Vec::new();
    let mut o = 0;
    for c in comps.values() {
        let comp = read_component(&nf, o, c)?;
        o += comp.rank;
        components.push(comp);
    }
    let expect = JordanDecomposition::from_components(ring, components.clone())?;
    if expect.normal_form != nf {
        return Err(Error::Precision(
            "normal form does not reconstruct at working precision".into(),
        ));
    }
    Ok(JordanDecomposition {
        ring,
        components,
        normal_form: nf,
        transform: u,
    })
}

fn read_component(nf: &Mat, o: usize, c: &Comp) -> Result<JordanComponent> {
    let ring = nf.ring();
    let m = c.scale / 2;
    let xi = ring.xi_pow(m);
    let rank = c.vecs.len();
    let t = o + rank - c.tail.rank();
    let div = |x: RamifiedElem, y: RamifiedElem| -> Result<i64> {
        let q = x
            .divide_exact(&y)
            .map_err(|e| Error::Precision(format!("normal form parameter: {e}")))?;
        Ok(q.signed_coords().0)
    };
    let tail = match c.tail {
        Tail::None => Tail::None,
        Tail::H1 => Tail::H1,
        Tail::Unit { .. } => Tail::Unit {
            a: div(nf[(t, t)], xi)?,
        },
        Tail::A12b1 { .. } => Tail::A12b1 {
            b: div(nf[(t + 1, t + 1)], xi * ring.int(2))?,
        },
        Tail::A2d2b1 { .. } => Tail::A2d2b1 {
            b: div(nf[(t + 1, t + 1)], xi * ring.int(2))?,
        },
        Tail::A4a { .. } => Tail::A4a {
            a: div(nf[(t, t)], xi * ring.int(4))?,
        },
    };
    JordanComponent::new(c.scale as i64, rank, tail, ring.delta_signed())
}

fn hermitian_lift(g: &Mat, work: Ring) -> Mat {
    let n = g.rows();
    let mut out = Mat::zeros(work, n, n);
    for i in 0..n {
        let (a, _) = g[(i, i)].signed_coords();
        out[(i, i)] = work.int(a);
        for j in i + 1..n {
            let (a, b) = g[(i, j)].signed_coords();
            out[(i, j)] = work.elem(a, b);
            out[(j, i)] = out[(i, j)].conj();
        }
    }
    out
}

fn unit_vectors(ring: Ring, n: usize) -> Vec<Vector> {
    (0..n)
        .map(|i| {
            (0..n)
                .map(|j| if i == j { ring.one() } else { ring.zero() })
                .collect()
        })
        .collect()
}

fn trace(x: RamifiedElem) -> RamifiedElem {
    x + x.conj()
}

fn to_a(x: RamifiedElem) -> RamifiedElem {
    x.ring().from_raw(x.a(), 0)
}

/// Σ coeffs[k]·basis[k].
fn combine(basis: &[Vector], coeffs: &[RamifiedElem]) -> Vector {
    let ring = coeffs[0].ring();
    let n = basis[0].len();
    let mut out = vec![ring.zero(); n];
    for (b, c) in basis.iter().zip(coeffs) {
        if c.is_zero() {
            continue;
        }
        for (o, x) in out.iter_mut().zip(b) {
            *o += *x * *c;
        }
    }
    out
}

fn independent_mod_pi(vecs: &[&Vector]) -> bool {
    let rows = vecs[0].len();
    let m = F2Mat::from_fn(rows, vecs.len(), |i, j| vecs[j][i].a() & 1 == 1);
    m.rank() == vecs.len()
}

struct Piece {
    scale: u32,
    vecs: Vec<Vector>,
}

struct Comp {
    scale: u32,
    vecs: Vec<Vector>,
    tail: Tail,
}

struct Ctx {
    ring: Ring,
    limit: u32,
}

impl Ctx {
    fn precision_err(&self, what: &str) -> Error {
        Error::Precision(format!("{what} (K = {})", self.ring.precision()))
    }

    /// Repeatedly splits off rank-1 or rank-2 modular pieces of minimal scale.
    fn split_pieces(&self, g: &Mat, mut vecs: Vec<Vector>) -> Result<Vec<Piece>> {
        let mut out = Vec::new();
        while !vecs.is_empty() {
            let k = vecs.len();
            let h = |i: usize, j: usize| form(g, &vecs[i], &vecs[j]);
            let mut gram = vec![vec![self.ring.zero(); k]; k];
            for (i, row) in gram.iter_mut().enumerate() {
                for (j, x) in row.iter_mut().enumerate() {
                    *x = h(i, j);
                }
            }
            let mut best: Option<u32> = None;
            for row in &gram {
                for x in row {
                    if let Some(v) = x.valuation() {
                        best = Some(best.map_or(v, |b| b.min(v)));
                    }
                }
            }
            let v = best.ok_or_else(|| self.precision_err("degenerate block"))?;
            if v >= self.limit {
                return Err(self.precision_err("block scale outside the reliable window"));
            }
            if let Some(p) = (0..k).find(|&i| gram[i][i].valuation() == Some(v)) {
                let d = gram[p][p];
                let e = vecs[p].clone();
                let mut rest = Vec::new();
                for (j, w) in vecs.iter().enumerate() {
                    if j != p {
                        let c = gram[p][j].divide_exact(&d)?;
                        rest.push(vec_axpy(w, &e, c));
                    }
                }
                out.push(Piece {
                    scale: v,
                    vecs: vec![e],
                });
                vecs = rest;
            } else {
                let (p, q) = (0..k)
                    .flat_map(|i| (i + 1..k).map(move |j| (i, j)))
                    .find(|&(i, j)| gram[i][j].valuation() == Some(v))
                    .expect("minimum attained off the diagonal");
                let (a, b, c, d) = (gram[p][p], gram[p][q], gram[q][p], gram[q][q]);
                let det = a * d - b * c;
                let (ep, eq) = (vecs[p].clone(), vecs[q].clone());
                let mut rest = Vec::new();
                for (j, w) in vecs.iter().enumerate() {
                    if j == p || j == q {
                        continue;
                    }
                    let (r0, r1) = (gram[p][j], gram[q][j]);
                    let c0 = (d * r0 - b * r1).divide_exact(&det)?;
                    let c1 = (a * r1 - c * r0).divide_exact(&det)?;
                    rest.push(vec_axpy(&vec_axpy(w, &ep, c0), &eq, c1));
                }
                out.push(Piece {
                    scale: v,
                    vecs: vec![ep, eq],
                });
                vecs = rest;
            }
        }
        Ok(out)
    }

    fn local_gram(&self, g: &Mat, vecs: &[Vector], scale: u32) -> Result<Mat> {
        let xi = self.ring.xi_pow(scale / 2);
        let r = vecs.len();
        let mut out = Mat::zeros(self.ring, r, r);
        for i in 0..r {
            out[(i, i)] = to_a(form(g, &vecs[i], &vecs[i]).divide_exact(&xi)?);
            for j in i + 1..r {
                out[(i, j)] = form(g, &vecs[i], &vecs[j]).divide_exact(&xi)?;
                out[(j, i)] = out[(i, j)].conj();
            }
        }
        Ok(out)
    }

    fn normalize_component(&self, g: &Mat, scale: u32, vecs: Vec<Vector>) -> Result<Comp> {
        let local = self.local_gram(g, &vecs, scale)?;
        let (coeffs, tail) = if scale.is_multiple_of(2) {
            self.normalize_even(&local)?
        } else {
            self.normalize_odd(&local)?
        };
        Ok(Comp {
            scale,
            vecs: coeffs.iter().map(|c| combine(&vecs, c)).collect(),
            tail,
        })
    }

    /// Root t ∈ A of q0 + q1·t + q2·t² by Newton iteration from a small start.
    fn solve_quadratic(
        &self,
        q0: RamifiedElem,
        q1: RamifiedElem,
        q2: RamifiedElem,
    ) -> Result<RamifiedElem> {
        let r = self.ring;
        let (q0, q1, q2) = (to_a(q0), to_a(q1), to_a(q2));
        let g = |t: RamifiedElem| q0 + q1 * t + q2 * t * t;
        let dg = |t: RamifiedElem| q1 + r.int(2) * q2 * t;
        let start = (0..16).map(|s| r.int(s)).find(|&t| {
            let (v, dv) = (g(t).valuation(), dg(t).valuation());
            match (v, dv) {
                (None, _) => true,
                (Some(v), Some(dv)) => v > 2 * dv,
                _ => false,
            }
        });
        let mut t = start.ok_or_else(|| Error::Domain("quadratic has no 2-adic root".into()))?;
        for _ in 0..NEWTON_STEPS {
            let gt = g(t);
            if gt.is_zero() {
                return Ok(t);
            }
            t = to_a(t - gt.divide_exact(&dg(t))?);
        }
        Err(self.precision_err("Newton iteration did not converge"))
    }

    /// x0 + d·(c·t) with h of the result equal to target.
    fn adjust_to(
        &self,
        n: &Mat,
        x0: &Vector,
        d: &Vector,
        c: RamifiedElem,
        target: RamifiedElem,
    ) -> Result<Vector> {
        let dc = vec_scale(d, c);
        let q0 = form(n, x0, x0) - target;
        let q1 = trace(form(n, x0, &dc));
        let q2 = form(n, &dc, &dc);
        let t = self.solve_quadratic(q0, q1, q2)?;
        Ok(vec_add(x0, &vec_scale(&dc, t)))
    }

    /// Primitive vector of the span of `block` with h(x, x) = target, for a
    /// unit target or target 0.
    fn represent(
        &self,
        n: &Mat,
        block: &[Vector],
        target: RamifiedElem,
        mut accept: impl FnMut(&Vector) -> Option<Vector>,
    ) -> Result<(Vector, Vector)> {
        let r = self.ring;
        let k = block.len();
        let total = 16usize.pow(k as u32);
        for code in 0..total {
            let coeffs: Vec<RamifiedElem> = (0..k)
                .map(|i| {
                    let d = (code >> (4 * i)) & 15;
                    r.elem((d & 3) as i64, (d >> 2) as i64)
                })
                .collect();
            if !coeffs.iter().any(|c| c.is_unit()) {
                continue;
            }
            let x0 = combine(block, &coeffs);
            let q = form(n, &x0, &x0) - target;
            if q.a() & 7 != 0 {
                continue;
            }
            let Some(w) = block.iter().find(|w| form(n, &x0, w).is_unit()) else {
                continue;
            };
            let x = self.adjust_to(n, &x0, w, r.one(), target)?;
            if let Some(y) = accept(&x) {
                return Ok((x, y));
            }
        }
        Err(Error::Domain(format!(
            "no primitive vector of norm {target} in a block of rank {k}"
        )))
    }

    /// Hyperbolic pair (x, y) with Gram [[0, 1], [1, 0]] in a unimodular block.
    fn hyperbolic_pair(&self, n: &Mat, block: &[Vector]) -> Result<(Vector, Vector)> {
        let k = block.len();
        self.represent(n, block, self.ring.zero(), |x| {
            for mask in 1usize..(1 << k) {
                let y0 = combine(
                    block,
                    &(0..k)
                        .map(|i| self.ring.int(((mask >> i) & 1) as i64))
                        .collect::<Vec<_>>(),
                );
                let u = form(n, x, &y0);
                if !u.is_unit() || form(n, &y0, &y0).a() & 1 == 1 {
                    continue;
                }
                let y1 = vec_scale(&y0, u.invert_unit().ok()?);
                let t = to_a(form(n, &y1, &y1)).divide_exact(&self.ring.int(2)).ok()?;
                return Some(vec_axpy(&y1, x, t));
            }
            None
        })
    }

    /// Basis of the orthogonal complement of span(x, y) inside span(block).
    fn plane_complement(
        &self,
        n: &Mat,
        block: &[Vector],
        x: &Vector,
        y: &Vector,
    ) -> Result<Vec<Vector>> {
        let (a, b) = (form(n, x, x), form(n, x, y));
        let (c, d) = (form(n, y, x), form(n, y, y));
        let det = a * d - b * c;
        let mut projected = Vec::with_capacity(block.len());
        for w in block {
            let (r0, r1) = (form(n, x, w), form(n, y, w));
            let c0 = (d * r0 - b * r1).divide_exact(&det)?;
            let c1 = (a * r1 - c * r0).divide_exact(&det)?;
            projected.push(vec_axpy(&vec_axpy(w, x, c0), y, c1));
        }
        let k = block.len();
        for i in 0..k {
            for j in i + 1..k {
                let kept: Vec<&Vector> = (0..k)
                    .filter(|&l| l != i && l != j)
                    .map(|l| &projected[l])
                    .collect();
                let mut all = vec![x, y];
                all.extend(kept.iter().copied());
                if independent_mod_pi(&all) {
                    return Ok(kept.into_iter().cloned().collect());
                }
            }
        }
        Err(self.precision_err("plane has no complement basis"))
    }

    fn normalize_even(&self, n: &Mat) -> Result<(Vec<Vector>, Tail)> {
        let r = self.ring;
        let mut out = Vec::new();
        let mut rest = unit_vectors(r, n.rows());
        while rest.len() >= 3 {
            let pieces = self.split_pieces(n, rest)?;
            let mut block = Vec::new();
            let mut others = Vec::new();
            for p in pieces {
                if block.len() < 3 {
                    block.extend(p.vecs);
                } else {
                    others.extend(p.vecs);
                }
            }
            let (x, y) = self.hyperbolic_pair(n, &block)?;
            rest = self.plane_complement(n, &block, &x, &y)?;
            rest.extend(others);
            out.push(x);
            out.push(y);
        }
        let tail = match rest.len() {
            0 => Tail::None,
            1 => {
                let a = form(n, &rest[0], &rest[0]);
                out.push(rest.pop().unwrap());
                Tail::Unit {
                    a: a.signed_coords().0,
                }
            }
            _ => {
                let (h11, h22) = (form(n, &rest[0], &rest[0]), form(n, &rest[1], &rest[1]));
                if h11.is_unit() || h22.is_unit() {
                    let (x, _) = self.represent(n, &rest, r.one(), |_| Some(Vec::new()))?;
                    let eo = if independent_mod_pi(&[&x, &rest[1]]) {
                        &rest[1]
                    } else {
                        &rest[0]
                    };
                    let z = vec_axpy(eo, &x, form(n, &x, eo));
                    let y = vec_add(&x, &z);
                    let b = to_a(form(n, &y, &y)).divide_exact(&r.int(2))?;
                    out.push(x);
                    out.push(y);
                    Tail::A12b1 {
                        b: b.signed_coords().0,
                    }
                } else {
                    let arf = (h11.a() >> 1) & (h22.a() >> 1) & 1;
                    if arf == 0 {
                        let (x, y) = self.hyperbolic_pair(n, &rest)?;
                        out.push(x);
                        out.push(y);
                        Tail::None
                    } else {
                        let two_delta = r.int(2 * r.delta_signed());
                        let (x, _) = self.represent(n, &rest, two_delta, |_| Some(Vec::new()))?;
                        let w = rest
                            .iter()
                            .find(|w| form(n, &x, w).is_unit())
                            .ok_or_else(|| self.precision_err("no partner for 2δ vector"))?;
                        let y = vec_scale(w, form(n, &x, w).invert_unit()?);
                        let b = to_a(form(n, &y, &y)).divide_exact(&r.int(2))?;
                        out.push(x);
                        out.push(y);
                        Tail::A2d2b1 {
                            b: b.signed_coords().0,
                        }
                    }
                }
            }
        };
        Ok((out, tail))
    }

    /// Partner y of an isotropic x with h(x, y) = π and h(y, y) = 0, built
    /// from w with h(x, w) of valuation 1 and h(w, w) ≡ 0 mod 4.
    fn complete_h1(&self, n: &Mat, x: &Vector, w: &Vector) -> Result<Vector> {
        let r = self.ring;
        let y1 = vec_scale(w, r.pi().divide_exact(&form(n, x, w))?);
        let four_delta = r.int(4 * r.delta_signed());
        let s1 = to_a(to_a(form(n, &y1, &y1)).divide_exact(&four_delta)?);
        Ok(vec_add(&y1, &vec_scale(x, s1 * r.pi())))
    }

    /// Normalizes a π-modular rank-2 piece to H(1) (first flag true) or
    /// A(4a, 2δ, π).
    fn normalize_pi_piece(&self, n: &Mat, e1: Vector, e2: Vector) -> Result<(bool, Vector, Vector)> {
        let r = self.ring;
        let pi = r.pi();
        let e2 = vec_scale(&e2, pi.divide_exact(&form(n, &e1, &e2))?);
        let alpha = form(n, &e1, &e1);
        let eps = form(n, &e2, &e2);
        if alpha.a() & 3 == 0 && eps.a() & 3 == 0 {
            let x = self.adjust_to(n, &e1, &e2, pi, r.zero())?;
            let y = self.complete_h1(n, &x, &e2)?;
            return Ok((true, x, y));
        }
        let (mut e1, mut e2) = if eps.a() & 3 == 0 {
            let f2 = vec_scale(&e1, pi.divide_exact(&form(n, &e2, &e1))?);
            (e2, f2)
        } else {
            (e1, e2)
        };
        if form(n, &e1, &e1).a() & 3 != 0 {
            e1 = vec_add(&e1, &e2);
            e2 = vec_scale(&e2, pi.divide_exact(&form(n, &e1, &e2))?);
        }
        let two_delta = r.int(2 * r.delta_signed());
        let y = self.adjust_to(n, &e2, &e1, pi, two_delta)?;
        let x = vec_scale(&e1, to_a(pi.divide_exact(&form(n, &e1, &y))?));
        Ok((false, x, y))
    }

    fn normalize_odd(&self, n: &Mat) -> Result<(Vec<Vector>, Tail)> {
        let pieces = self.split_pieces(n, unit_vectors(self.ring, n.rows()))?;
        let mut queue = Vec::new();
        for p in pieces {
            if p.vecs.len() != 2 || p.scale != 1 {
                return Err(self.precision_err("odd component is not π-modular"));
            }
            let mut it = p.vecs.into_iter();
            queue.push((it.next().unwrap(), it.next().unwrap()));
        }
        let mut hyps: Vec<(Vector, Vector)> = Vec::new();
        let mut tails: Vec<(Vector, Vector)> = Vec::new();
        while let Some((e1, e2)) = queue.pop() {
            let (is_h, x, y) = self.normalize_pi_piece(n, e1, e2)?;
            if is_h {
                hyps.push((x, y));
            } else {
                tails.push((x, y));
            }
            if tails.len() == 2 {
                let (f1, f2) = tails.pop().unwrap();
                let (e1, e2) = tails.pop().unwrap();
                let v0 = vec_add(&e2, &f2);
                let v = self.adjust_to(n, &v0, &e1, self.ring.pi(), self.ring.zero())?;
                let y = self.complete_h1(n, &v, &e1)?;
                let block = [e1, e2, f1, f2];
                let mut comp = self.plane_complement(n, &block, &v, &y)?.into_iter();
                hyps.push((v, y));
                queue.push((comp.next().unwrap(), comp.next().unwrap()));
            }
        }
        let mut out = Vec::new();
        let tail = if let Some((x, y)) = tails.pop() {
            for (a, b) in hyps {
                out.push(a);
                out.push(b);
            }
            let a = to_a(form(n, &x, &x)).divide_exact(&self.ring.int(4))?;
            out.push(x);
            out.push(y);
            Tail::A4a {
                a: a.signed_coords().0,
            }
        } else {
            for (a, b) in hyps {
                out.push(a);
                out.push(b);
            }
            Tail::H1
        };
        Ok((out, tail))
    }

    /// Moves the free type I tail of an odd component with a type I even
    /// neighbour into that neighbour, leaving H(1) behind.
    fn mix_bound_tails(&self, g: &Mat, comps: &mut BTreeMap<u32, Comp>) -> Result<()> {
        let even_type_i = |c: Option<&Comp>| {
            matches!(
                c.map(|c| c.tail),
                Some(Tail::Unit { .. }) | Some(Tail::A12b1 { .. })
            )
        };
        for _ in 0..4 * comps.len() + 4 {
            let target = comps.iter().find_map(|(&i, c)| {
                if !matches!(c.tail, Tail::A4a { .. }) {
                    return None;
                }
                if even_type_i(comps.get(&(i - 1))) {
                    Some((i, i - 1))
                } else if even_type_i(comps.get(&(i + 1))) {
                    Some((i, i + 1))
                } else {
                    None
                }
            });
            let Some((i, j)) = target else {
                return Ok(());
            };
            let mut nb = comps.remove(&j).unwrap();
            let mut odd = comps.remove(&i).unwrap();
            let l = nb.vecs.len();
            let ei = match nb.tail {
                Tail::Unit { .. } => l - 1,
                _ => {
                    nb.vecs[l - 1] = crate::matrix::vec_sub(&nb.vecs[l - 1], &nb.vecs[l - 2]);
                    l - 2
                }
            };
            let e = nb.vecs[ei].clone();
            let lo = odd.vecs.len();
            let f1 = odd.vecs[lo - 2].clone();
            let c = if j < i { self.ring.pi() } else { self.ring.one() };
            let f2 = vec_add(&odd.vecs[lo - 1], &vec_scale(&e, c));
            let (a, b) = (form(g, &f1, &f1), form(g, &f1, &f2));
            let (cc, d) = (form(g, &f2, &f1), form(g, &f2, &f2));
            let det = a * d - b * cc;
            let (r0, r1) = (form(g, &f1, &e), form(g, &f2, &e));
            let c0 = (d * r0 - b * r1).divide_exact(&det)?;
            let c1 = (a * r1 - cc * r0).divide_exact(&det)?;
            nb.vecs[ei] = vec_axpy(&vec_axpy(&e, &f1, c0), &f2, c1);
            odd.vecs[lo - 1] = f2;
            comps.insert(j, self.normalize_component(g, j, nb.vecs)?);
            comps.insert(i, self.normalize_component(g, i, odd.vecs)?);
        }
        Err(self.precision_err("tail mixing did not terminate"))
    }
}
