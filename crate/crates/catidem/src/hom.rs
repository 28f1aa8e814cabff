//! Hom complexes, graded hom spaces of the homotopy category and composition.
//!
//! The hom-complex differential is `δⁿ(f) = d∘f − (−1)ⁿ f∘d`, so degree-0 cycles
//! are chain maps and composition `(g∘f)_i = g_(i+|f|) f_i` is a derivation.

use std::collections::BTreeMap;

use serde::{Deserialize, Serialize};

use crate::complex::{compose as compose_maps, materialize, Complex, GradedMap, Tail};
use crate::error::{Error, Result};
use crate::group::{block_coordinates, expand_block};
use crate::homotopy::{PeriodicSystem, Problem, Unknown, DEFAULT_BUDGET};
use crate::linalg::Matrix;

pub const DEFAULT_PADDING: usize = 4;

struct Comp {
    i: i64,
    unk: Unknown,
    off: usize,
}

struct Space {
    comps: Vec<Comp>,
    dim: usize,
}

impl Space {
    fn comp(&self, i: i64) -> Option<&Comp> {
        self.comps.iter().find(|c| c.i == i)
    }
}

/// Finite model of `Hom•(X, Y)` on a range of degrees.
pub struct HomComplex {
    source: Complex,
    target: Complex,
    n_lo: i64,
    n_hi: i64,
    cut: bool,
    windowed: bool,
    spaces: BTreeMap<i64, Space>,
    deltas: BTreeMap<i64, Matrix>,
}


impl HomComplex {
    /// Degrees `n_lo..=n_hi` are computed (with one extra space on each side).
    /// When both complexes are unbounded on the same side the source is cut
    /// below (or the target above) `padding` steps beyond what the degrees need;
    /// without padding that case is an error.
    pub fn new(x: &Complex, y: &Complex, n_lo: i64, n_hi: i64, padding: Option<usize>) -> Result<HomComplex> {
        let windowed = x.has_truncation() || y.has_truncation();
        if windowed && ((!x.left().is_zero() && !y.left().is_zero()) || (!x.right().is_zero() && !y.right().is_zero())) {
            return Err(Error::RegimeUnsupported);
        }
        if x.algebra() != y.algebra() {
            return Err(Error::AlgebraMismatch);
        }
        let (nl, nh) = (n_lo - 1, n_hi + 1);
        let (lx, ly, rx, ry) = (x.left().is_zero(), y.left().is_zero(), x.right().is_zero(), y.right().is_zero());
        let mut cut = false;
        let (xl, yl) = match (lx, ly) {
            (true, true) => (x.lo(), y.lo()),
            (false, true) => (y.lo() - nh, y.lo()),
            (true, false) => (x.lo(), x.lo() + nl),
            (false, false) => {
                let pad = padding.ok_or(Error::InfiniteRank { degree: n_lo })? as i64;
                cut = true;
                let xl = x.lo().min(y.lo() - nh) - pad;
                (xl, xl + nl)
            }
        };
        let (xh, yh) = match (rx, ry) {
            (true, true) => (x.hi(), y.hi()),
            (false, true) => (y.hi() - nl, y.hi()),
            (true, false) => (x.hi(), x.hi() + nh),
            (false, false) => {
                let pad = padding.ok_or(Error::InfiniteRank { degree: n_hi })? as i64;
                cut = true;
                let yh = y.hi().max(x.hi() + nh) + pad;
                (yh - nl, yh)
            }
        };
        let source = materialize(x, xl, xh.max(xl))?;
        let target = materialize(y, yl, yh.max(yl))?;
        let mut spaces = BTreeMap::new();
        for n in nl..=nh {
            let mut comps = Vec::new();
            let mut off = 0;
            for i in xl.max(yl - n)..=xh.min(yh - n) {
                let unk = Unknown::new(source.term(i), target.term(i + n));
                if unk.len() > 0 {
                    let len = unk.len();
                    comps.push(Comp { i, unk, off });
                    off += len;
                }
            }
            spaces.insert(n, Space { comps, dim: off });
        }
        let mut hc = HomComplex { source, target, n_lo, n_hi, cut, windowed, spaces, deltas: BTreeMap::new() };
        for n in nl..=n_hi {
            let d = hc.build_delta(n)?;
            hc.deltas.insert(n, d);
        }
        Ok(hc)
    }

    fn build_delta(&self, n: i64) -> Result<Matrix> {
        let p = self.source.p();
        let (sp, tp) = (&self.spaces[&n], &self.spaces[&(n + 1)]);
        let mut cols: Vec<Vec<u32>> = Vec::with_capacity(sp.dim);
        for c in &sp.comps {
            let dy = self.target.diff(c.i + n);
            let dx = self.source.diff(c.i - 1);
            for hb in &c.unk.basis {
                let f = expand_block(&c.unk.src, &c.unk.tgt, hb);
                let mut col = vec![0u32; tp.dim];
                if let Some(t) = tp.comp(c.i) {
                    let v = dy.mul(&f);
                    let k = block_coordinates(&t.unk.src, &t.unk.tgt, &t.unk.basis, &v).ok_or(Error::NotIntertwining)?;
                    for (j, x) in k.into_iter().enumerate() {
                        col[t.off + j] = (col[t.off + j] + x) % p;
                    }
                }
                if let Some(t) = tp.comp(c.i - 1) {
                    let v = f.mul(&dx).signed(n + 1);
                    let k = block_coordinates(&t.unk.src, &t.unk.tgt, &t.unk.basis, &v).ok_or(Error::NotIntertwining)?;
                    for (j, x) in k.into_iter().enumerate() {
                        col[t.off + j] = (col[t.off + j] + x) % p;
                    }
                }
                cols.push(col);
            }
        }
        Ok(Matrix::from_columns(p, tp.dim, &cols))
    }

    pub fn source_model(&self) -> &Complex {
        &self.source
    }
    pub fn target_model(&self) -> &Complex {
        &self.target
    }
    pub fn is_cut(&self) -> bool {
        self.cut
    }
    /// An input had truncated tails; the model is read off its known terms.
    pub fn is_windowed(&self) -> bool {
        self.windowed
    }
    pub fn range(&self) -> (i64, i64) {
        (self.n_lo, self.n_hi)
    }

    /// κ-dimension of the degree-`n` space.
    pub fn dim(&self, n: i64) -> usize {
        self.spaces.get(&n).map_or(0, |s| s.dim)
    }

    /// Matrix of `δⁿ` in the block bases.
    pub fn delta(&self, n: i64) -> Option<&Matrix> {
        self.deltas.get(&n)
    }

    /// Coordinates of a graded map `X -> Y` of degree `n` restricted to the model.
    pub fn coordinates(&self, f: &GradedMap) -> Result<Vec<u32>> {
        let n = f.degree();
        let sp = self.spaces.get(&n).ok_or(Error::OutOfValidityRange { degree: n })?;
        let mut v = vec![0u32; sp.dim];
        for c in &sp.comps {
            let k = block_coordinates(&c.unk.src, &c.unk.tgt, &c.unk.basis, &f.component(c.i))
                .ok_or(Error::NotIntertwining)?;
            v[c.off..c.off + k.len()].copy_from_slice(&k);
        }
        Ok(v)
    }

    /// Graded map between the model complexes with the given coordinates.
    pub fn element(&self, n: i64, coords: &[u32]) -> GradedMap {
        self.element_on(&self.source, &self.target, n, coords)
    }

    fn element_on(&self, x: &Complex, y: &Complex, n: i64, coords: &[u32]) -> GradedMap {
        let p = x.p();
        let sp = &self.spaces[&n];
        if sp.comps.is_empty() {
            return GradedMap::zero(x, y, n);
        }
        let lo = sp.comps[0].i;
        let hi = sp.comps.last().unwrap().i;
        let comps = (lo..=hi)
            .map(|i| match sp.comp(i) {
                Some(c) => c.unk.to_matrix(&coords[c.off..c.off + c.unk.len()]),
                None => Matrix::zeros(p, y.dim(i + n), x.dim(i)),
            })
            .collect();
        GradedMap::raw(x, y, n, lo, comps, Tail::Zero, Tail::Zero)
    }

    /// Per-degree homology: (cycle representatives, reducer `[B | R]`, #B columns).
    pub(crate) fn homology_data(&self, n: i64) -> (Matrix, Matrix, usize) {
        let p = self.source.p();
        let dim = self.dim(n);
        let z = match self.deltas.get(&n) {
            Some(d) => d.kernel(),
            None => Matrix::identity(p, dim),
        };
        let b = match self.deltas.get(&(n - 1)) {
            Some(d) => d.clone(),
            None => Matrix::zeros(p, dim, 0),
        };
        let bz = b.hstack(&z);
        let piv = bz.pivot_columns();
        let bc = b.cols();
        let b_ind: Vec<usize> = piv.iter().copied().filter(|&c| c < bc).collect();
        let r_ind: Vec<usize> = piv.iter().copied().filter(|&c| c >= bc).map(|c| c - bc).collect();
        let bsel = b.select_cols(&b_ind);
        let r = z.select_cols(&r_ind);
        let reducer = bsel.hstack(&r);
        (r, reducer, bsel.cols())
    }
}

/// An element of `hom(X, Y[n])` in the basis of a [`GradedHom`].
#[derive(Clone, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct HomClass {
    pub degree: i64,
    pub coords: Vec<u32>,
}

impl HomClass {
    pub fn is_zero(&self) -> bool {
        self.coords.iter().all(|&c| c == 0)
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct HomDegree {
    pub degree: i64,
    pub dim: usize,
    pub reliable: bool,
}

struct DegreeData {
    cycles: Matrix,
    reducer: Matrix,
    bcols: usize,
    reps: Option<Vec<GradedMap>>,
}

/// `hom(X, Y[n])` for a range of `n`, with cycle representatives.
pub struct GradedHom {
    source: Complex,
    target: Complex,
    model: HomComplex,
    degrees: Vec<HomDegree>,
    data: BTreeMap<i64, DegreeData>,
}

/// Graded hom on `[n_lo, n_hi]`. Cut models are recomputed with doubled
/// padding and degrees whose dimension moves are flagged unreliable.
pub fn graded_hom(x: &Complex, y: &Complex, n_lo: i64, n_hi: i64, padding: usize) -> Result<GradedHom> {
    let model = HomComplex::new(x, y, n_lo, n_hi, Some(padding.max(1)))?;
    let check = if model.is_cut() { Some(HomComplex::new(x, y, n_lo, n_hi, Some(2 * padding.max(1)))?) } else { None };
    let mut degrees = Vec::new();
    let mut data = BTreeMap::new();
    for n in n_lo..=n_hi {
        let (cycles, reducer, bcols) = model.homology_data(n);
        let dim = cycles.cols();
        let reliable = match &check {
            Some(c) => c.homology_data(n).0.cols() == dim,
            None => true,
        };
        let reps = if !reliable || model.is_windowed() {
            None
        } else if !model.is_cut() {
            let mut v = Vec::with_capacity(dim);
            for k in 0..dim {
                let f = model.element_on(x, y, n, &cycles.col(k));
                f.check_chain()?;
                v.push(f);
            }
            Some(v)
        } else {
            periodic_reps(&model, x, y, n, &reducer, bcols, dim)?
        };
        degrees.push(HomDegree { degree: n, dim, reliable });
        data.insert(n, DegreeData { cycles, reducer, bcols, reps });
    }
    Ok(GradedHom { source: x.clone(), target: y.clone(), model, degrees, data })
}

/// Exact chain maps `X -> Y[n]` with eventually periodic components, chosen so
/// their classes in the cut model are the basis vectors.
fn periodic_reps(
    model: &HomComplex,
    x: &Complex,
    y: &Complex,
    n: i64,
    reducer: &Matrix,
    bcols: usize,
    dim: usize,
) -> Result<Option<Vec<GradedMap>>> {
    let p = x.p();
    if dim == 0 {
        return Ok(Some(Vec::new()));
    }
    let pb = Problem { x, y, n, f: None };
    for mult in 1..=DEFAULT_BUDGET {
        let ps = PeriodicSystem::build(&pb, mult);
        let k = ps.sys.kernel();
        let mut classes: Vec<Vec<u32>> = Vec::with_capacity(k.cols());
        for c in 0..k.cols() {
            let f = ps.to_map(&pb, &k.col(c));
            let v = model.coordinates(&f)?;
            let s = reducer.solve(&v).map_err(|_| Error::NotChainMap { degree: n })?;
            classes.push(s.x0[bcols..].to_vec());
        }
        let cm = Matrix::from_columns(p, dim, &classes);
        let piv = cm.pivot_columns();
        if piv.len() < dim {
            continue;
        }
        let inv = cm.select_cols(&piv).inverse().ok_or(Error::NoSolution)?;
        let chosen = k.select_cols(&piv).mul(&inv);
        let mut reps = Vec::with_capacity(dim);
        for j in 0..dim {
            let f = ps.to_map(&pb, &chosen.col(j));
            f.check_chain()?;
            reps.push(f);
        }
        return Ok(Some(reps));
    }
    Ok(None)
}

impl GradedHom {
    pub fn source(&self) -> &Complex {
        &self.source
    }
    pub fn target(&self) -> &Complex {
        &self.target
    }
    pub fn model(&self) -> &HomComplex {
        &self.model
    }
    pub fn degrees(&self) -> &[HomDegree] {
        &self.degrees
    }

    /// Dimension in degree `n` if it lies in the validity range.
    pub fn dim(&self, n: i64) -> Option<usize> {
        self.degrees.iter().find(|d| d.degree == n && d.reliable).map(|d| d.dim)
    }

    pub fn is_reliable(&self, n: i64) -> bool {
        self.dim(n).is_some()
    }

    /// Degrees whose dimension is stable under doubling the padding.
    pub fn validity(&self) -> Vec<i64> {
        self.degrees.iter().filter(|d| d.reliable).map(|d| d.degree).collect()
    }

    fn degree_data(&self, n: i64) -> Result<&DegreeData> {
        if !self.is_reliable(n) {
            return Err(Error::OutOfValidityRange { degree: n });
        }
        Ok(&self.data[&n])
    }

    /// Basis representatives in degree `n` (chain maps `X -> Y[n]`).
    pub fn reps(&self, n: i64) -> Result<&[GradedMap]> {
        self.degree_data(n)?.reps.as_deref().ok_or(Error::OutOfValidityRange { degree: n })
    }

    /// Cycle representatives in the model's own coordinates.
    pub fn model_cycles(&self, n: i64) -> Result<&Matrix> {
        Ok(&self.degree_data(n)?.cycles)
    }

    pub fn basis_class(&self, n: i64, k: usize) -> Result<HomClass> {
        let dim = self.dim(n).ok_or(Error::OutOfValidityRange { degree: n })?;
        let mut coords = vec![0; dim];
        coords[k] = 1;
        Ok(HomClass { degree: n, coords })
    }

    /// Chain map representing a class.
    pub fn rep(&self, c: &HomClass) -> Result<GradedMap> {
        let reps = self.reps(c.degree)?;
        let mut out: Option<GradedMap> = None;
        for (r, &a) in reps.iter().zip(&c.coords) {
            if a == 0 {
                continue;
            }
            let t = r.scale(a);
            out = Some(match out {
                None => t,
                Some(o) => o.add(&t),
            });
        }
        Ok(out.unwrap_or_else(|| GradedMap::zero(&self.source, &self.target, c.degree)))
    }

    /// Class of a chain map `X -> Y[n]`.
    pub fn class_of(&self, f: &GradedMap) -> Result<HomClass> {
        let n = f.degree();
        let d = self.degree_data(n)?;
        let v = self.model.coordinates(f)?;
        let s = d.reducer.solve(&v).map_err(|_| Error::NotChainMap { degree: n })?;
        Ok(HomClass { degree: n, coords: s.x0[d.bcols..].to_vec() })
    }
}

/// `a ∘ b` for `a ∈ hom(Y, Z[m])`, `b ∈ hom(X, Y[n])`, expressed in `hom(X, Z)`.
pub fn compose(
    yz: &GradedHom,
    a: &HomClass,
    xy: &GradedHom,
    b: &HomClass,
    xz: &GradedHom,
) -> Result<HomClass> {
    let g = yz.rep(a)?;
    let f = xy.rep(b)?;
    xz.class_of(&compose_maps(&g, &f))
}

/// Multiplication table of `end(X)` on a range of degrees. Basis labels are
/// ordered by degree; `products` holds `(i, j, coords of label_i ∘ label_j)`.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct RingTable {
    pub p: u32,
    pub degrees: Vec<i64>,
    pub unit: Vec<u32>,
    pub products: Vec<(usize, usize, Vec<u32>)>,
}

pub fn ring_table(x: &Complex, n_lo: i64, n_hi: i64, padding: usize) -> Result<RingTable> {
    let gh = graded_hom(x, x, n_lo, n_hi, padding)?;
    ring_table_from(&gh)
}

/// Ring table of an already computed `end(X)`.
pub fn ring_table_from(gh: &GradedHom) -> Result<RingTable> {
    let p = gh.source().p();
    let mut labels: Vec<(i64, usize)> = Vec::new();
    for d in gh.degrees() {
        if d.reliable && gh.reps(d.degree).is_ok() {
            labels.extend((0..d.dim).map(|k| (d.degree, k)));
        }
    }
    let offset = |n: i64| labels.iter().position(|&(m, _)| m == n);
    let embed = |c: &HomClass| -> Vec<u32> {
        let mut v = vec![0; labels.len()];
        if let Some(o) = offset(c.degree) {
            v[o..o + c.coords.len()].copy_from_slice(&c.coords);
        }
        v
    };
    let id = GradedMap::identity(gh.source());
    let unit = embed(&gh.class_of(&id)?);
    let mut products = Vec::new();
    for (i, &(m, k)) in labels.iter().enumerate() {
        for (j, &(n, l)) in labels.iter().enumerate() {
            if offset(m + n).is_none() {
                continue;
            }
            let c = compose(gh, &gh.basis_class(m, k)?, gh, &gh.basis_class(n, l)?, gh)?;
            products.push((i, j, embed(&c)));
        }
    }
    Ok(RingTable { p, degrees: labels.iter().map(|l| l.0).collect(), unit, products })
}

impl RingTable {
    pub fn len(&self) -> usize {
        self.degrees.len()
    }
    pub fn is_empty(&self) -> bool {
        self.degrees.is_empty()
    }

    fn product(&self, i: usize, j: usize) -> Option<&Vec<u32>> {
        self.products.iter().find(|(a, b, _)| *a == i && *b == j).map(|t| &t.2)
    }

    /// Bilinear product of two coordinate vectors; `None` if some needed basis
    /// product lies outside the table.
    pub fn mul(&self, u: &[u32], v: &[u32]) -> Option<Vec<u32>> {
        let p = self.p as u64;
        let mut out = vec![0u64; self.len()];
        for (i, &a) in u.iter().enumerate() {
            if a == 0 {
                continue;
            }
            for (j, &b) in v.iter().enumerate() {
                if b == 0 {
                    continue;
                }
                let c = self.product(i, j)?;
                for (o, &x) in out.iter_mut().zip(c) {
                    *o = (*o + a as u64 * b as u64 % p * x as u64) % p;
                }
            }
        }
        Some(out.into_iter().map(|x| x as u32).collect())
    }

    fn basis(&self, i: usize) -> Vec<u32> {
        let mut v = vec![0; self.len()];
        v[i] = 1;
        v
    }

    /// Unit laws on every label.
    pub fn check_unit(&self) -> bool {
        (0..self.len()).all(|i| {
            let e = self.basis(i);
            self.mul(&self.unit, &e).is_none_or(|r| r == e) && self.mul(&e, &self.unit).is_none_or(|r| r == e)
        })
    }

    /// Associativity on every triple whose products stay in the table.
    pub fn check_associative(&self) -> bool {
        let n = self.len();
        for i in 0..n {
            for j in 0..n {
                for k in 0..n {
                    let (a, b, c) = (self.basis(i), self.basis(j), self.basis(k));
                    let l = self.mul(&a, &b).and_then(|ab| self.mul(&ab, &c));
                    let r = self.mul(&b, &c).and_then(|bc| self.mul(&a, &bc));
                    if let (Some(l), Some(r)) = (l, r) {
                        if l != r {
                            return false;
                        }
                    }
                }
            }
        }
        true
    }

    /// `a∘b = (−1)^(|a||b|) b∘a` on every pair in the table.
    pub fn check_graded_commutative(&self) -> bool {
        let p = self.p;
        self.products.iter().all(|(i, j, c)| match self.product(*j, *i) {
            Some(d) => {
                let odd = (self.degrees[*i] * self.degrees[*j]).rem_euclid(2) == 1;
                c.iter().zip(d).all(|(&x, &y)| if odd { (x + y) % p == 0 } else { x == y })
            }
            None => true,
        })
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string(self).expect("ring table serializes")
    }
}
