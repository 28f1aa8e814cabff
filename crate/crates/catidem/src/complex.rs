//! Cochain complexes of modules (differentials of degree +1) and graded maps.
//!
//! A complex is an explicit core `lo..=hi` plus a tail on each side. A
//! `Periodic(m)` tail is anchored at the core edge: below `lo` the degree `k`
//! carries the data of `k + m * ceil((lo - k) / m)`, above `hi` the data of
//! `k - m * ceil((k - hi) / m)`. `Truncated` tails mark degrees that are not
//! represented at all.

use std::borrow::Cow;
use std::sync::Arc;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::group::{direct_sum_modules, dual_module, tensor_matrix, tensor_module, zero_module, FdModule, GroupAlgebra};
use crate::linalg::Matrix;

/// `"zero"`, `{"periodic": m}` or `{"truncated": note}`.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Tail {
    Zero,
    Periodic(usize),
    Truncated(String),
}

impl Tail {
    pub fn is_zero(&self) -> bool {
        matches!(self, Tail::Zero)
    }
    pub fn is_truncated(&self) -> bool {
        matches!(self, Tail::Truncated(_))
    }
    pub fn period(&self) -> usize {
        match self {
            Tail::Periodic(m) => *m,
            _ => 1,
        }
    }
}

pub fn gcd(a: usize, b: usize) -> usize {
    if b == 0 {
        a
    } else {
        gcd(b, a % b)
    }
}

pub fn lcm(a: usize, b: usize) -> usize {
    a / gcd(a, b) * b
}

/// Period forced by degree-dependent signs.
pub(crate) fn sign_period(p: u32) -> usize {
    if p == 2 {
        1
    } else {
        2
    }
}

fn ceil_div(a: i64, b: i64) -> i64 {
    (a + b - 1).div_euclid(b)
}

/// Where a tail regime starts, as seen in result degrees.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub(crate) enum Reg {
    Zero,
    Per(usize),
    Trunc,
}

#[derive(Clone, Copy, Debug)]
pub(crate) struct Edge {
    pub reg: Reg,
    pub at: i64,
}

impl Edge {
    pub fn shifted(self, by: i64) -> Edge {
        Edge { reg: self.reg, at: self.at + by }
    }
}

/// Left edge of a degreewise sum of the inputs (direct sums, cones, duals).
pub(crate) fn sum_left(edges: &[Edge], extra: usize) -> Edge {
    if let Some(at) = edges.iter().filter(|e| e.reg == Reg::Trunc).map(|e| e.at).max() {
        return Edge { reg: Reg::Trunc, at };
    }
    let m = edges.iter().fold(0usize, |m, e| match e.reg {
        Reg::Per(k) => lcm(m.max(1), k),
        _ => m,
    });
    if m == 0 {
        return Edge { reg: Reg::Zero, at: edges.iter().map(|e| e.at).min().unwrap_or(0) };
    }
    let m = lcm(m, extra);
    let at = edges
        .iter()
        .map(|e| match e.reg {
            Reg::Per(_) => e.at - m as i64,
            _ => e.at,
        })
        .min()
        .unwrap();
    Edge { reg: Reg::Per(m), at }
}

pub(crate) fn sum_right(edges: &[Edge], extra: usize) -> Edge {
    let mirrored: Vec<Edge> = edges.iter().map(|e| Edge { reg: e.reg, at: -e.at }).collect();
    let e = sum_left(&mirrored, extra);
    Edge { reg: e.reg, at: -e.at }
}

/// Left edge of a degreewise product (compositions): a zero factor kills the degree.
pub(crate) fn prod_left(edges: &[Edge], extra: usize) -> Edge {
    let zero = edges.iter().filter(|e| e.reg == Reg::Zero).map(|e| e.at).max();
    let trunc = edges.iter().filter(|e| e.reg == Reg::Trunc).map(|e| e.at).max();
    match (zero, trunc) {
        (Some(z), Some(t)) if z >= t => Edge { reg: Reg::Zero, at: z },
        (Some(z), None) => Edge { reg: Reg::Zero, at: z },
        (_, Some(t)) => Edge { reg: Reg::Trunc, at: t },
        (None, None) => sum_left(edges, extra),
    }
}

pub(crate) fn prod_right(edges: &[Edge], extra: usize) -> Edge {
    let mirrored: Vec<Edge> = edges.iter().map(|e| Edge { reg: e.reg, at: -e.at }).collect();
    let e = prod_left(&mirrored, extra);
    Edge { reg: e.reg, at: -e.at }
}

fn tail_of(reg: Reg, note: &str) -> Tail {
    match reg {
        Reg::Zero => Tail::Zero,
        Reg::Per(m) => Tail::Periodic(m),
        Reg::Trunc => Tail::Truncated(note.to_string()),
    }
}

/// Core range for the given edges, widened so that periodic tails have a full period.
pub(crate) fn core_range(l: Edge, r: Edge) -> (i64, i64) {
    let (mut lo, mut hi) = (l.at, r.at);
    if hi < lo - 1 {
        hi = lo - 1;
    }
    if let Reg::Per(m) = l.reg {
        if hi < lo + m as i64 {
            if r.reg == Reg::Trunc {
                lo = hi - m as i64;
            } else {
                hi = lo + m as i64;
            }
        }
    }
    if let Reg::Per(m) = r.reg {
        if hi < lo + m as i64 {
            if l.reg == Reg::Trunc {
                hi = lo + m as i64;
            } else {
                lo = hi - m as i64;
            }
        }
    }
    (lo, hi)
}

/// A cochain complex of modules over one algebra.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Complex {
    alg: Arc<GroupAlgebra>,
    lo: i64,
    terms: Vec<FdModule>,
    diffs: Vec<Matrix>,
    left: Tail,
    right: Tail,
    zero: FdModule,
    hint: Option<usize>,
}

impl Complex {
    /// Validated constructor: shapes, intertwining, periodic seams and d² = 0.
    pub fn new(
        alg: &Arc<GroupAlgebra>,
        lo: i64,
        terms: Vec<FdModule>,
        diffs: Vec<Matrix>,
        left: Tail,
        right: Tail,
    ) -> Result<Complex> {
        if terms.iter().any(|t| t.algebra() != alg) {
            return Err(Error::AlgebraMismatch);
        }
        if diffs.len() + 1 != terms.len() && !(terms.is_empty() && diffs.is_empty()) {
            return Err(Error::InvalidComplex(format!(
                "{} terms need {} differentials, got {}",
                terms.len(),
                terms.len().saturating_sub(1),
                diffs.len()
            )));
        }
        for (i, d) in diffs.iter().enumerate() {
            let k = lo + i as i64;
            if d.rows() != terms[i + 1].dim() || d.cols() != terms[i].dim() || d.p() != alg.p() {
                return Err(Error::Shape(format!("differential at degree {k} has the wrong shape")));
            }
            if !terms[i].intertwines(&terms[i + 1], d) {
                return Err(Error::InvalidComplex(format!("differential at degree {k} is not a module map")));
            }
        }
        let hi = lo + terms.len() as i64 - 1;
        if let Tail::Periodic(m) = left {
            let m = m as i64;
            if m == 0 || hi < lo + m || terms[0] != terms[m as usize] {
                return Err(Error::InvalidComplex(format!("left periodic tail needs X_lo = X_(lo+{m}) inside the core")));
            }
        }
        if let Tail::Periodic(m) = right {
            let m = m as i64;
            let n = terms.len();
            if m == 0 || hi - m < lo || terms[n - 1] != terms[n - 1 - m as usize] {
                return Err(Error::InvalidComplex(format!("right periodic tail needs X_hi = X_(hi-{m}) inside the core")));
            }
        }
        let c = Complex::raw(alg, lo, terms, diffs, left, right);
        c.check_square_zero()?;
        Ok(c)
    }

    pub(crate) fn raw(
        alg: &Arc<GroupAlgebra>,
        lo: i64,
        terms: Vec<FdModule>,
        diffs: Vec<Matrix>,
        left: Tail,
        right: Tail,
    ) -> Complex {
        Complex { alg: alg.clone(), lo, terms, diffs, left, right, zero: zero_module(alg), hint: None }
    }

    /// Zero complex.
    pub fn zero(alg: &Arc<GroupAlgebra>) -> Complex {
        Complex::raw(alg, 0, vec![], vec![], Tail::Zero, Tail::Zero)
    }

    /// A single module placed in degree `k`.
    pub fn concentrated(m: &FdModule, k: i64) -> Complex {
        Complex::raw(m.algebra(), k, vec![m.clone()], vec![], Tail::Zero, Tail::Zero)
    }

    pub fn algebra(&self) -> &Arc<GroupAlgebra> {
        &self.alg
    }
    pub fn p(&self) -> u32 {
        self.alg.p()
    }
    pub fn lo(&self) -> i64 {
        self.lo
    }
    pub fn hi(&self) -> i64 {
        self.lo + self.terms.len() as i64 - 1
    }
    pub fn left(&self) -> &Tail {
        &self.left
    }
    pub fn right(&self) -> &Tail {
        &self.right
    }
    pub fn core_terms(&self) -> &[FdModule] {
        &self.terms
    }
    pub fn core_diffs(&self) -> &[Matrix] {
        &self.diffs
    }

    pub fn is_bounded(&self) -> bool {
        self.left.is_zero() && self.right.is_zero()
    }

    pub fn has_truncation(&self) -> bool {
        self.left.is_truncated() || self.right.is_truncated()
    }

    /// lcm of the tail periods.
    pub fn period(&self) -> usize {
        lcm(self.left.period(), self.right.period())
    }

    /// Period used for window margins: the tail period, the period recorded when
    /// a truncated complex was built from periodic pieces, or 2 when unknown.
    pub fn window_period(&self) -> usize {
        match self.hint {
            Some(h) => h,
            None if self.has_truncation() => 2,
            None => self.period(),
        }
    }

    pub(crate) fn with_hint(mut self, h: usize) -> Complex {
        self.hint = Some(h);
        self
    }

    /// Whether degree `k` is represented.
    pub fn known(&self, k: i64) -> bool {
        !((k < self.lo && self.left.is_truncated()) || (k > self.hi() && self.right.is_truncated()))
    }

    fn index(&self, k: i64) -> Option<usize> {
        if self.terms.is_empty() {
            return None;
        }
        let (lo, hi) = (self.lo, self.hi());
        if k < lo {
            match self.left {
                Tail::Periodic(m) => {
                    let m = m as i64;
                    Some((k + m * ceil_div(lo - k, m) - lo) as usize)
                }
                _ => None,
            }
        } else if k > hi {
            match self.right {
                Tail::Periodic(m) => {
                    let m = m as i64;
                    Some((k - m * ceil_div(k - hi, m) - lo) as usize)
                }
                _ => None,
            }
        } else {
            Some((k - lo) as usize)
        }
    }

    /// Term in degree `k` (zero outside the support or in unrepresented degrees).
    pub fn term(&self, k: i64) -> &FdModule {
        match self.index(k) {
            Some(i) => &self.terms[i],
            None => &self.zero,
        }
    }

    pub fn dim(&self, k: i64) -> usize {
        self.term(k).dim()
    }

    /// Differential `d_k : X_k -> X_(k+1)`.
    pub fn diff(&self, k: i64) -> Cow<'_, Matrix> {
        let (lo, hi) = (self.lo, self.hi());
        let j = if self.terms.is_empty() {
            None
        } else if k < lo {
            match self.left {
                Tail::Periodic(m) => {
                    let m = m as i64;
                    Some(k + m * ceil_div(lo - k, m))
                }
                _ => None,
            }
        } else if k >= hi {
            match self.right {
                Tail::Periodic(m) => {
                    let m = m as i64;
                    Some(k - m * ceil_div(k - hi + 1, m))
                }
                _ => None,
            }
        } else {
            Some(k)
        };
        match j {
            Some(j) => Cow::Borrowed(&self.diffs[(j - lo) as usize]),
            None => Cow::Owned(Matrix::zeros(self.p(), self.dim(k + 1), self.dim(k))),
        }
    }

    /// Lowest degree of the core if the left tail is zero.
    pub fn bottom(&self) -> Option<i64> {
        self.left.is_zero().then_some(self.lo)
    }
    pub fn top(&self) -> Option<i64> {
        self.right.is_zero().then_some(self.hi())
    }

    pub(crate) fn left_edge(&self) -> Edge {
        let reg = match self.left {
            Tail::Zero => Reg::Zero,
            Tail::Periodic(m) => Reg::Per(m),
            Tail::Truncated(_) => Reg::Trunc,
        };
        Edge { reg, at: self.lo }
    }

    pub(crate) fn right_edge(&self) -> Edge {
        let reg = match self.right {
            Tail::Zero => Reg::Zero,
            Tail::Periodic(m) => Reg::Per(m),
            Tail::Truncated(_) => Reg::Trunc,
        };
        Edge { reg, at: self.hi() }
    }

    /// Degrees where d² is checked: the core plus two periods each side.
    pub fn check_range(&self) -> (i64, i64) {
        let l = 2 * self.left.period() as i64 + 1;
        let r = 2 * self.right.period() as i64 + 1;
        (self.lo - l, self.hi() + r)
    }

    /// Same terms (as matrices of the group action) and differentials on `[a, b]`.
    pub fn agrees_on(&self, o: &Complex, a: i64, b: i64) -> bool {
        let gens = self.alg.group().generators().to_vec();
        (a..=b).all(|k| {
            let (s, t) = (self.term(k), o.term(k));
            s.dim() == t.dim()
                && gens.iter().all(|&g| s.action(g) == t.action(g))
                && (k == b || self.diff(k) == o.diff(k))
        })
    }

    pub fn check_square_zero(&self) -> Result<()> {
        let (a, b) = self.check_range();
        for k in a..=b {
            if !self.known(k) || !self.known(k + 2) {
                continue;
            }
            let d1 = self.diff(k);
            let d2 = self.diff(k + 1);
            if d1.rows() != d2.cols() {
                return Err(Error::Shape(format!("differentials at degrees {k}, {} do not compose", k + 1)));
            }
            if !d2.mul(&d1).is_zero() {
                return Err(Error::SquareNonzero { degree: k });
            }
        }
        Ok(())
    }

    /// Total κ-dimension of the core.
    pub fn core_dim(&self) -> usize {
        self.terms.iter().map(|t| t.dim()).sum()
    }

    /// κ-dimensions of the terms on `[a, b]`.
    pub fn dims(&self, a: i64, b: i64) -> Vec<usize> {
        (a..=b).map(|k| self.dim(k)).collect()
    }

    /// Drop zero terms at sides with a zero tail.
    fn trimmed(mut self) -> Complex {
        if self.left.is_zero() {
            let n = self.terms.iter().take_while(|t| t.dim() == 0).count();
            if n == self.terms.len() && self.right.is_zero() {
                return Complex::zero(&self.alg);
            }
            if n > 0 && n < self.terms.len() {
                self.terms.drain(..n);
                self.diffs.drain(..n);
                self.lo += n as i64;
            }
        }
        if self.right.is_zero() {
            let n = self.terms.iter().rev().take_while(|t| t.dim() == 0).count();
            if n > 0 && n < self.terms.len() {
                let keep = self.terms.len() - n;
                self.terms.truncate(keep);
                self.diffs.truncate(keep - 1);
            }
        }
        self
    }
}

/// Assemble a complex from degreewise formulas on the core given by the edges.
pub(crate) fn assemble(
    alg: &Arc<GroupAlgebra>,
    l: Edge,
    r: Edge,
    note: &str,
    term: &dyn Fn(i64) -> FdModule,
    diff: &dyn Fn(i64, &FdModule, &FdModule) -> Matrix,
) -> Result<Complex> {
    let (lo, hi) = core_range(l, r);
    let terms: Vec<FdModule> = (lo..=hi).map(term).collect();
    let diffs: Vec<Matrix> = (lo..hi).map(|k| diff(k, &terms[(k - lo) as usize], &terms[(k - lo + 1) as usize])).collect();
    let c = Complex::raw(alg, lo, terms, diffs, tail_of(l.reg, note), tail_of(r.reg, note)).trimmed();
    c.check_square_zero()?;
    Ok(c)
}

/// `X[n]_k = X_(k+n)` with differential `(-1)^n d`.
pub fn shift(x: &Complex, n: i64) -> Complex {
    let diffs = x.diffs.iter().map(|d| d.signed(n)).collect();
    Complex { lo: x.lo - n, diffs, ..x.clone() }
}

/// Degreewise direct sum with block-diagonal differential.
pub fn direct_sum(x: &Complex, y: &Complex) -> Result<Complex> {
    direct_sum_many(&[x, y])
}

pub fn direct_sum_many(xs: &[&Complex]) -> Result<Complex> {
    let alg = xs[0].algebra().clone();
    if xs.iter().any(|x| *x.algebra() != alg) {
        return Err(Error::AlgebraMismatch);
    }
    let le: Vec<Edge> = xs.iter().map(|x| x.left_edge()).collect();
    let re: Vec<Edge> = xs.iter().map(|x| x.right_edge()).collect();
    let l = sum_left(&le, 1);
    let r = sum_right(&re, 1);
    let p = alg.p();
    assemble(
        &alg,
        l,
        r,
        "summand truncated",
        &|k| {
            let ts: Vec<&FdModule> = xs.iter().map(|x| x.term(k)).collect();
            direct_sum_modules(&alg, &ts)
        },
        &|k, _, _| {
            let ds: Vec<Cow<Matrix>> = xs.iter().map(|x| x.diff(k)).collect();
            let refs: Vec<&Matrix> = ds.iter().map(|d| d.as_ref()).collect();
            Matrix::block_diag(p, &refs)
        },
    )
    .map(|c| inherit_hint(c, xs))
}

fn inherit_hint(c: Complex, xs: &[&Complex]) -> Complex {
    if c.has_truncation() {
        let h = xs.iter().fold(1, |h, x| lcm(h, x.window_period()));
        c.with_hint(h)
    } else {
        c
    }
}

/// Stupid truncation to `[m, n]` with zero tails (an honest bounded complex).
pub fn materialize(x: &Complex, m: i64, n: i64) -> Result<Complex> {
    for k in m..=n {
        if !x.known(k) {
            return Err(Error::OutOfValidityRange { degree: k });
        }
    }
    let terms: Vec<FdModule> = (m..=n).map(|k| x.term(k).clone()).collect();
    let diffs: Vec<Matrix> = (m..n).map(|k| x.diff(k).into_owned()).collect();
    Ok(Complex::raw(&x.alg, m, terms, diffs, Tail::Zero, Tail::Zero).trimmed())
}

/// Like [`materialize`], but sides where the complex continues are marked truncated.
pub fn window_approx(x: &Complex, m: i64, n: i64) -> Result<Complex> {
    for k in m..=n {
        if !x.known(k) {
            return Err(Error::OutOfValidityRange { degree: k });
        }
    }
    let cut_left = x.bottom().is_none_or(|b| b < m);
    let cut_right = x.top().is_none_or(|t| t > n);
    let a = if cut_left { m } else { m.max(x.lo) };
    let b = if cut_right { n } else { n.min(x.hi()) };
    if a > b {
        return Ok(Complex::zero(&x.alg));
    }
    let terms: Vec<FdModule> = (a..=b).map(|k| x.term(k).clone()).collect();
    let diffs: Vec<Matrix> = (a..b).map(|k| x.diff(k).into_owned()).collect();
    let left = if cut_left { Tail::Truncated(format!("cut below degree {m}")) } else { Tail::Zero };
    let right = if cut_right { Tail::Truncated(format!("cut above degree {n}")) } else { Tail::Zero };
    let hint = x.window_period();
    Ok(Complex::raw(&x.alg, a, terms, diffs, left, right).with_hint(hint))
}

/// Per-degree κ-dimension of homology.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct HomologyDegree {
    pub degree: i64,
    pub dim: usize,
    pub reliable: bool,
}

/// Homology of the underlying κ-complex on `[a, b]`; degrees next to a
/// truncation are flagged unreliable.
pub fn homology(x: &Complex, a: i64, b: i64) -> Vec<HomologyDegree> {
    (a..=b)
        .map(|k| {
            let reliable = x.known(k - 1) && x.known(k) && x.known(k + 1);
            let dk = x.diff(k);
            let dm = x.diff(k - 1);
            let ker = x.dim(k) - dk.rank();
            let im = dm.rank();
            HomologyDegree { degree: k, dim: ker - im, reliable }
        })
        .collect()
}

/// Mode of the tensor product for unbounded operands. Both agree whenever every
/// degree receives finitely many pairs; otherwise an operand must be truncated.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub enum TensorMode {
    Sum,
    Prod,
}

/// Pairs `(i, j)`, `i + j = k`, with both terms nonzero, ordered by `i`.
pub(crate) fn tensor_pairs(x: &Complex, y: &Complex, k: i64) -> Vec<(i64, i64)> {
    let lo_i = match (x.bottom(), y.top()) {
        (Some(a), Some(b)) => a.max(k - b),
        (Some(a), None) => a,
        (None, Some(b)) => k - b,
        (None, None) => panic!("tensor degree with infinitely many pairs"),
    };
    let hi_i = match (x.top(), y.bottom()) {
        (Some(a), Some(b)) => a.min(k - b),
        (Some(a), None) => a,
        (None, Some(b)) => k - b,
        (None, None) => panic!("tensor degree with infinitely many pairs"),
    };
    let mut out = Vec::new();
    let mut i = lo_i;
    while i <= hi_i {
        if x.dim(i) > 0 && y.dim(k - i) > 0 {
            out.push((i, k - i));
        }
        i += 1;
    }
    out
}

/// Bounds of the infinite side(s) after replacing truncated tails by their known range.
struct Extent {
    l_inf: bool,
    r_inf: bool,
}

fn extent(x: &Complex) -> Extent {
    Extent { l_inf: !x.left.is_zero(), r_inf: !x.right.is_zero() }
}

/// Shared shape analysis for `tensor` and `external_tensor`.
fn tensor_edges(x: &Complex, y: &Complex, window: Option<(i64, i64)>) -> Result<(Edge, Edge, String)> {
    let (ex, ey) = (extent(x), extent(y));
    let deg_hint = window.map_or(0, |w| w.0);
    if (ex.l_inf && ey.r_inf) || (ex.r_inf && ey.l_inf) {
        return Err(Error::InfiniteRank { degree: deg_hint });
    }
    let sp = sign_period(x.p());
    // left
    let l = if !ex.l_inf && !ey.l_inf {
        Edge { reg: Reg::Zero, at: x.lo + y.lo }
    } else if ex.l_inf && ey.l_inf {
        let known = [(x, y), (y, x)]
            .iter()
            .filter(|(a, _)| a.left.is_truncated())
            .map(|(a, b)| a.lo + b.hi())
            .max();
        let w = window.ok_or_else(|| {
            Error::WindowRequired("both factors are unbounded below; the tensor product grows degreewise".into())
        })?;
        Edge { reg: Reg::Trunc, at: known.map_or(w.0, |k| k.max(w.0)) }
    } else if ex.l_inf {
        match x.left {
            Tail::Periodic(m) => {
                let m = lcm(m, sp);
                Edge { reg: Reg::Per(m), at: x.lo + y.lo - m as i64 }
            }
            _ => Edge { reg: Reg::Trunc, at: x.lo + y.hi() },
        }
    } else {
        match y.left {
            Tail::Periodic(m) => Edge { reg: Reg::Per(m), at: x.lo + y.lo - m as i64 },
            _ => Edge { reg: Reg::Trunc, at: y.lo + x.hi() },
        }
    };
    let r = if !ex.r_inf && !ey.r_inf {
        Edge { reg: Reg::Zero, at: x.hi() + y.hi() }
    } else if ex.r_inf && ey.r_inf {
        let known = [(x, y), (y, x)]
            .iter()
            .filter(|(a, _)| a.right.is_truncated())
            .map(|(a, b)| a.hi() + b.lo)
            .min();
        let w = window.ok_or_else(|| {
            Error::WindowRequired("both factors are unbounded above; the tensor product grows degreewise".into())
        })?;
        Edge { reg: Reg::Trunc, at: known.map_or(w.1, |k| k.min(w.1)) }
    } else if ex.r_inf {
        match x.right {
            Tail::Periodic(m) => {
                let m = lcm(m, sp);
                Edge { reg: Reg::Per(m), at: x.hi() + y.hi() + m as i64 }
            }
            _ => Edge { reg: Reg::Trunc, at: x.hi() + y.lo },
        }
    } else {
        match y.right {
            Tail::Periodic(m) => Edge { reg: Reg::Per(m), at: x.hi() + y.hi() + m as i64 },
            _ => Edge { reg: Reg::Trunc, at: y.hi() + x.lo },
        }
    };
    // a window cuts a bounded side only when it lies inside the support
    let (mut l, mut r) = (l, r);
    if let Some((m, n)) = window {
        if l.reg == Reg::Trunc && r.reg == Reg::Zero && r.at > n {
            r = Edge { reg: Reg::Trunc, at: n };
        }
        if r.reg == Reg::Trunc && l.reg == Reg::Zero && l.at < m {
            l = Edge { reg: Reg::Trunc, at: m };
        }
    }
    let note = match window {
        Some((m, n)) => format!("tensor materialized on [{m}, {n}]"),
        None => "tensor of a truncated factor".to_string(),
    };
    Ok((l, r, note))
}

fn tensor_generic(
    x: &Complex,
    y: &Complex,
    alg: &Arc<GroupAlgebra>,
    window: Option<(i64, i64)>,
    tm: &dyn Fn(&FdModule, &FdModule) -> Result<FdModule>,
) -> Result<Complex> {
    let (l, r, note) = tensor_edges(x, y, window)?;
    let p = alg.p();
    let module_err = std::cell::RefCell::new(None);
    let c = assemble(
        alg,
        l,
        r,
        &note,
        &|k| {
            let pairs = tensor_pairs(x, y, k);
            let parts: Vec<FdModule> = pairs
                .iter()
                .map(|&(i, j)| match tm(x.term(i), y.term(j)) {
                    Ok(m) => m,
                    Err(e) => {
                        *module_err.borrow_mut() = Some(e);
                        zero_module(alg)
                    }
                })
                .collect();
            let refs: Vec<&FdModule> = parts.iter().collect();
            direct_sum_modules(alg, &refs)
        },
        &|k, src, tgt| {
            let sp = tensor_pairs(x, y, k);
            let tp = tensor_pairs(x, y, k + 1);
            let mut out = Matrix::zeros(p, tgt.dim(), src.dim());
            let toff = offsets(&tp, x, y);
            let mut so = 0;
            for &(i, j) in &sp {
                let sdim = x.dim(i) * y.dim(j);
                if let Some(pos) = tp.iter().position(|&q| q == (i + 1, j)) {
                    let b = tensor_matrix(
                        &x.diff(i),
                        &Matrix::identity(p, y.dim(j)),
                        x.term(i),
                        y.term(j),
                        x.term(i + 1),
                        y.term(j),
                    );
                    out.add_block(toff[pos], so, &b);
                }
                if let Some(pos) = tp.iter().position(|&q| q == (i, j + 1)) {
                    let b = tensor_matrix(
                        &Matrix::identity(p, x.dim(i)),
                        &y.diff(j),
                        x.term(i),
                        y.term(j),
                        x.term(i),
                        y.term(j + 1),
                    );
                    out.add_block(toff[pos], so, &b.signed(i));
                }
                so += sdim;
            }
            out
        },
    )?;
    if let Some(e) = module_err.into_inner() {
        return Err(e);
    }
    let c = if c.has_truncation() { c.with_hint(lcm(x.window_period(), y.window_period())) } else { c };
    Ok(c)
}

fn offsets(pairs: &[(i64, i64)], x: &Complex, y: &Complex) -> Vec<usize> {
    let mut o = 0;
    pairs
        .iter()
        .map(|&(i, j)| {
            let r = o;
            o += x.dim(i) * y.dim(j);
            r
        })
        .collect()
}

/// Tensor product with differential `d ⊗ 1 + (-1)^i 1 ⊗ d` on `X_i ⊗ Y_j`.
///
/// Bounded sides and periodic-against-bounded sides are exact. When both factors
/// are unbounded on the same side the terms grow, and the result is the window
/// `[m, n]` with truncated tails. Factors unbounded on opposite sides give
/// `InfiniteRank`: materialize one of them first.
pub fn tensor(x: &Complex, y: &Complex, _mode: TensorMode, window: Option<(i64, i64)>) -> Result<Complex> {
    if x.alg != y.alg {
        return Err(Error::AlgebraMismatch);
    }
    let alg = x.alg.clone();
    tensor_generic(x, y, &alg, window, &|a, b| tensor_module(a, b))
}

/// External tensor product over the product group algebra.
pub fn external_tensor(x: &Complex, y: &Complex, target: &Arc<GroupAlgebra>, window: Option<(i64, i64)>) -> Result<Complex> {
    tensor_generic(x, y, target, window, &|a, b| crate::group::external_product(a, b, target))
}

/// Dual complex: `(X*)_i = (X_(-i))*`, `d_i = (-1)^(i+1) (d_(-i-1))^T`.
pub fn dual(x: &Complex) -> Result<Complex> {
    let sp = sign_period(x.p());
    let l = x.right_edge();
    let r = x.left_edge();
    let l = sum_left(&[Edge { reg: l.reg, at: -l.at }], sp);
    let r = sum_right(&[Edge { reg: r.reg, at: -r.at }], sp);
    assemble(
        &x.alg,
        l,
        r,
        "dual of a truncated complex",
        &|k| dual_module(x.term(-k)),
        &|k, _, _| x.diff(-k - 1).transpose().signed(k + 1),
    )
    .map(|c| inherit_hint(c, &[x]))
}

/// A graded map of degree `n`: components `f_i : X_i -> Y_(i+n)`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct GradedMap {
    source: Complex,
    target: Complex,
    degree: i64,
    lo: i64,
    comps: Vec<Matrix>,
    left: Tail,
    right: Tail,
}

/// Chain maps are graded maps of degree 0.
pub type ChainMap = GradedMap;

impl GradedMap {
    /// Validated constructor: shapes, intertwining and the chain-map identity
    /// `d_Y f = (-1)^n f d_X`.
    pub fn new(
        source: &Complex,
        target: &Complex,
        degree: i64,
        lo: i64,
        comps: Vec<Matrix>,
        left: Tail,
        right: Tail,
    ) -> Result<GradedMap> {
        let f = GradedMap::raw(source, target, degree, lo, comps, left, right);
        f.check_shapes()?;
        f.check_chain()?;
        Ok(f)
    }

    /// Graded map without the chain condition (homotopies, hom-complex elements).
    pub fn new_graded(
        source: &Complex,
        target: &Complex,
        degree: i64,
        lo: i64,
        comps: Vec<Matrix>,
        left: Tail,
        right: Tail,
    ) -> Result<GradedMap> {
        let f = GradedMap::raw(source, target, degree, lo, comps, left, right);
        f.check_shapes()?;
        Ok(f)
    }

    pub(crate) fn raw(
        source: &Complex,
        target: &Complex,
        degree: i64,
        lo: i64,
        comps: Vec<Matrix>,
        left: Tail,
        right: Tail,
    ) -> GradedMap {
        GradedMap { source: source.clone(), target: target.clone(), degree, lo, comps, left, right }
    }

    pub fn zero(source: &Complex, target: &Complex, degree: i64) -> GradedMap {
        GradedMap::raw(source, target, degree, 0, vec![], Tail::Zero, Tail::Zero)
    }

    pub fn identity(x: &Complex) -> GradedMap {
        let p = x.p();
        let comps = x.terms.iter().map(|t| Matrix::identity(p, t.dim())).collect();
        let mut f = GradedMap::raw(x, x, 0, x.lo, comps, x.left.clone(), x.right.clone());
        if x.terms.is_empty() {
            f.left = Tail::Zero;
            f.right = Tail::Zero;
        }
        f
    }

    /// Build from a component formula on a core given by edges.
    pub(crate) fn assemble(
        source: &Complex,
        target: &Complex,
        degree: i64,
        l: Edge,
        r: Edge,
        comp: &dyn Fn(i64) -> Matrix,
    ) -> GradedMap {
        let (lo, hi) = core_range(l, r);
        let comps = (lo..=hi).map(comp).collect();
        GradedMap::raw(source, target, degree, lo, comps, tail_of(l.reg, "map truncated"), tail_of(r.reg, "map truncated"))
    }

    pub fn source(&self) -> &Complex {
        &self.source
    }
    pub fn target(&self) -> &Complex {
        &self.target
    }
    pub fn degree(&self) -> i64 {
        self.degree
    }
    pub fn lo(&self) -> i64 {
        self.lo
    }
    pub fn hi(&self) -> i64 {
        self.lo + self.comps.len() as i64 - 1
    }
    pub fn left(&self) -> &Tail {
        &self.left
    }
    pub fn right(&self) -> &Tail {
        &self.right
    }
    pub fn core_components(&self) -> &[Matrix] {
        &self.comps
    }

    pub fn known(&self, i: i64) -> bool {
        !((i < self.lo && self.left.is_truncated()) || (i > self.hi() && self.right.is_truncated()))
            && self.source.known(i)
            && self.target.known(i + self.degree)
    }

    /// Component `f_i : X_i -> Y_(i+n)`.
    pub fn component(&self, i: i64) -> Cow<'_, Matrix> {
        let (lo, hi) = (self.lo, self.hi());
        let j = if self.comps.is_empty() {
            None
        } else if i < lo {
            match self.left {
                Tail::Periodic(m) => Some(i + m as i64 * ceil_div(lo - i, m as i64)),
                _ => None,
            }
        } else if i > hi {
            match self.right {
                Tail::Periodic(m) => Some(i - m as i64 * ceil_div(i - hi, m as i64)),
                _ => None,
            }
        } else {
            Some(i)
        };
        match j {
            Some(j) => Cow::Borrowed(&self.comps[(j - lo) as usize]),
            None => Cow::Owned(Matrix::zeros(
                self.source.p(),
                self.target.dim(i + self.degree),
                self.source.dim(i),
            )),
        }
    }

    pub(crate) fn left_edge(&self) -> Edge {
        let reg = match self.left {
            Tail::Zero => Reg::Zero,
            Tail::Periodic(m) => Reg::Per(m),
            Tail::Truncated(_) => Reg::Trunc,
        };
        Edge { reg, at: self.lo }
    }
    pub(crate) fn right_edge(&self) -> Edge {
        let reg = match self.right {
            Tail::Zero => Reg::Zero,
            Tail::Periodic(m) => Reg::Per(m),
            Tail::Truncated(_) => Reg::Trunc,
        };
        Edge { reg, at: self.hi() }
    }

    /// Source degrees covering the cores of the map and both complexes plus
    /// two full common periods on each side.
    pub fn check_range(&self) -> (i64, i64) {
        let per = lcm(lcm(self.source.period(), self.target.period()), lcm(self.left.period(), self.right.period())) as i64;
        let lo = self.lo.min(self.source.lo).min(self.target.lo - self.degree);
        let hi = self.hi().max(self.source.hi()).max(self.target.hi() - self.degree);
        (lo - 2 * per - 2, hi + 2 * per + 2)
    }

    fn check_shapes(&self) -> Result<()> {
        if self.source.alg != self.target.alg {
            return Err(Error::AlgebraMismatch);
        }
        let (a, b) = self.check_range();
        for i in a..=b {
            if !self.known(i) {
                continue;
            }
            let c = self.component(i);
            let (s, t) = (self.source.term(i), self.target.term(i + self.degree));
            if c.rows() != t.dim() || c.cols() != s.dim() {
                return Err(Error::Shape(format!("component at degree {i} has the wrong shape")));
            }
            if !s.intertwines(t, &c) {
                return Err(Error::NotIntertwining);
            }
        }
        Ok(())
    }

    /// `d_Y f - (-1)^n f d_X` at source degree `i` (a map `X_i -> Y_(i+n+1)`).
    pub fn boundary_component(&self, i: i64) -> Matrix {
        let n = self.degree;
        let a = self.target.diff(i + n).mul(&self.component(i));
        let b = self.component(i + 1).mul(&self.source.diff(i));
        a.sub(&b.signed(n))
    }

    pub fn check_chain(&self) -> Result<()> {
        let (a, b) = self.check_range();
        for i in a..=b {
            if !self.known(i) || !self.known(i + 1) || !self.target.known(i + self.degree + 1) {
                continue;
            }
            if !self.boundary_component(i).is_zero() {
                return Err(Error::NotChainMap { degree: i });
            }
        }
        Ok(())
    }

    pub fn is_chain_map(&self) -> bool {
        self.check_chain().is_ok()
    }

    /// View a degree-`n` chain map `X -> Y` as a degree-0 chain map `X -> Y[n]`.
    pub fn as_degree_zero(&self) -> GradedMap {
        let t = shift(&self.target, self.degree);
        GradedMap { source: self.source.clone(), target: t, degree: 0, ..self.clone() }
    }

    /// Regard a degree-0 map into `Y[n]` as a degree-`n` map into `Y`.
    pub fn with_degree(&self, y: &Complex, n: i64) -> GradedMap {
        GradedMap { target: y.clone(), degree: n, ..self.clone() }
    }

    fn combine(&self, o: &GradedMap, f: &dyn Fn(&Matrix, &Matrix) -> Matrix) -> GradedMap {
        let l = sum_left(&[self.left_edge(), o.left_edge()], 1);
        let r = sum_right(&[self.right_edge(), o.right_edge()], 1);
        GradedMap::assemble(&self.source, &self.target, self.degree, l, r, &|i| {
            f(&self.component(i), &o.component(i))
        })
    }

    pub fn add(&self, o: &GradedMap) -> GradedMap {
        assert_eq!(self.degree, o.degree, "degree mismatch in sum of maps");
        self.combine(o, &|a, b| a.add(b))
    }

    pub fn sub(&self, o: &GradedMap) -> GradedMap {
        assert_eq!(self.degree, o.degree, "degree mismatch in difference of maps");
        self.combine(o, &|a, b| a.sub(b))
    }

    pub fn scale(&self, c: u32) -> GradedMap {
        GradedMap { comps: self.comps.iter().map(|m| m.scale(c)).collect(), ..self.clone() }
    }

    pub fn neg(&self) -> GradedMap {
        GradedMap { comps: self.comps.iter().map(|m| m.neg()).collect(), ..self.clone() }
    }

    pub fn signed(&self, n: i64) -> GradedMap {
        if n.rem_euclid(2) == 0 {
            self.clone()
        } else {
            self.neg()
        }
    }

    /// `(g ∘ f)_i = g_(i + |f|) f_i`.
    pub fn then(&self, g: &GradedMap) -> GradedMap {
        compose(g, self)
    }

    /// Is the map zero on every represented degree?
    pub fn is_zero(&self) -> bool {
        let (a, b) = self.check_range();
        (a..=b).all(|i| !self.known(i) || self.component(i).is_zero())
    }

    /// Replace source and target by structurally equal complexes.
    pub fn retarget(&self, source: &Complex, target: &Complex) -> GradedMap {
        GradedMap { source: source.clone(), target: target.clone(), ..self.clone() }
    }

    /// Like [`GradedMap::window`], but a side stays exact when source and
    /// target both vanish beyond it.
    pub fn window_open_sides(&self, a: i64, b: i64) -> GradedMap {
        let mut w = self.window(a, b);
        let n = self.degree;
        if self.source.bottom().is_some_and(|x| x >= a) && self.target.bottom().is_some_and(|y| y >= a + n) {
            w.left = Tail::Zero;
        }
        if self.source.top().is_some_and(|x| x <= b) && self.target.top().is_some_and(|y| y <= b + n) {
            w.right = Tail::Zero;
        }
        w
    }

    /// Restrict to a window `[a, b]` of source degrees, marking the rest unknown.
    pub fn window(&self, a: i64, b: i64) -> GradedMap {
        let comps = (a..=b).map(|i| self.component(i).into_owned()).collect();
        GradedMap {
            lo: a,
            comps,
            left: Tail::Truncated("map window".into()),
            right: Tail::Truncated("map window".into()),
            ..self.clone()
        }
    }
}

/// `(g ∘ f)_i = g_(i + |f|) f_i`; no sign is introduced.
pub fn compose(g: &GradedMap, f: &GradedMap) -> GradedMap {
    let n = f.degree;
    let l = prod_left(&[f.left_edge(), g.left_edge().shifted(-n)], 1);
    let r = prod_right(&[f.right_edge(), g.right_edge().shifted(-n)], 1);
    GradedMap::assemble(&f.source, &g.target, n + g.degree, l, r, &|i| g.component(i + n).mul(&f.component(i)))
}

/// Shift of a map: `f[n]_k = f_(k+n)` between `X[n]` and `Y[n]`.
pub fn shift_map(f: &GradedMap, n: i64) -> GradedMap {
    GradedMap {
        source: shift(&f.source, n),
        target: shift(&f.target, n),
        lo: f.lo - n,
        ..f.clone()
    }
}

/// Degree-0 map between two direct sums given by a block matrix of maps
/// (`blocks[r][c] : X_c -> Y_r`, `None` for zero).
pub fn block_map(
    xs: &[&Complex],
    ys: &[&Complex],
    blocks: &[Vec<Option<&GradedMap>>],
) -> Result<GradedMap> {
    let src = direct_sum_many(xs)?;
    let tgt = direct_sum_many(ys)?;
    let mut le = vec![src.left_edge(), tgt.left_edge()];
    let mut re = vec![src.right_edge(), tgt.right_edge()];
    for row in blocks {
        for b in row.iter().flatten() {
            le.push(b.left_edge());
            re.push(b.right_edge());
        }
    }
    let l = sum_left(&le, 1);
    let r = sum_right(&re, 1);
    let p = src.p();
    let f = GradedMap::assemble(&src, &tgt, 0, l, r, &|i| {
        let mut m = Matrix::zeros(p, tgt.dim(i), src.dim(i));
        let mut ro = 0;
        for (ri, y) in ys.iter().enumerate() {
            let mut co = 0;
            for (ci, x) in xs.iter().enumerate() {
                if let Some(b) = blocks[ri][ci] {
                    m.set_block(ro, co, &b.component(i));
                }
                co += x.dim(i);
            }
            ro += y.dim(i);
        }
        m
    });
    f.check_chain()?;
    Ok(f)
}

/// Mapping cone of a degree-0 chain map `f : A -> B`, with `Cone_k = A_(k+1) ⊕ B_k`
/// and differential `[[-d_A, 0], [f, d_B]]`.
#[derive(Clone, Debug)]
pub struct Cone {
    pub complex: Complex,
    /// `B -> Cone(f)`.
    pub inclusion: GradedMap,
    /// `Cone(f) -> A[1]`.
    pub projection: GradedMap,
}

pub fn cone(f: &GradedMap) -> Result<Cone> {
    if f.degree != 0 {
        return Err(Error::PreconditionFailed("cone needs a degree-0 chain map".into()));
    }
    let (a, b) = (&f.source, &f.target);
    let le = [a.left_edge().shifted(-1), b.left_edge(), f.left_edge().shifted(-1)];
    let re = [a.right_edge().shifted(-1), b.right_edge(), f.right_edge().shifted(-1)];
    let l = sum_left(&le, 1);
    let r = sum_right(&re, 1);
    let alg = a.alg.clone();
    let p = alg.p();
    let c = assemble(
        &alg,
        l,
        r,
        "cone of a truncated map",
        &|k| direct_sum_modules(&alg, &[a.term(k + 1), b.term(k)]),
        &|k, _, _| {
            let (a1, a2, b0, b1) = (a.dim(k + 1), a.dim(k + 2), b.dim(k), b.dim(k + 1));
            let mut m = Matrix::zeros(p, a2 + b1, a1 + b0);
            m.set_block(0, 0, &a.diff(k + 1).neg());
            m.set_block(a2, 0, &f.component(k + 1));
            m.set_block(a2, a1, &b.diff(k));
            m
        },
    )
    .map(|c| inherit_hint(c, &[a, b]))?;
    let a1 = shift(a, 1);
    let cl = c.left_edge();
    let cr = c.right_edge();
    let inclusion = GradedMap::assemble(b, &c, 0, sum_left(&[cl, b.left_edge()], 1), sum_right(&[cr, b.right_edge()], 1), &|k| {
        let mut m = Matrix::zeros(p, c.dim(k), b.dim(k));
        m.set_block(a.dim(k + 1), 0, &Matrix::identity(p, b.dim(k)));
        m
    });
    let projection = GradedMap::assemble(&c, &a1, 0, sum_left(&[cl, a1.left_edge()], 1), sum_right(&[cr, a1.right_edge()], 1), &|k| {
        let mut m = Matrix::zeros(p, a.dim(k + 1), c.dim(k));
        m.set_block(0, 0, &Matrix::identity(p, a.dim(k + 1)));
        m
    });
    Ok(Cone { complex: c, inclusion, projection })
}

/// The map `Cone(f) -> Z` with components `[h_(k+1), g_k]`, where `f : A -> B`,
/// `g : B -> Z` and `h : A -> Z` of degree -1 satisfies `g f = d h + h d`.
pub fn cone_out(cn: &Cone, f: &GradedMap, g: &GradedMap, h: &GradedMap) -> Result<GradedMap> {
    if h.degree != -1 || g.degree != 0 {
        return Err(Error::PreconditionFailed("cone_out needs deg h = -1, deg g = 0".into()));
    }
    let (c, z, a) = (&cn.complex, &g.target, &f.source);
    let p = c.p();
    let l = sum_left(&[c.left_edge(), g.left_edge(), h.left_edge().shifted(-1)], 1);
    let r = sum_right(&[c.right_edge(), g.right_edge(), h.right_edge().shifted(-1)], 1);
    let m = GradedMap::assemble(c, z, 0, l, r, &|k| {
        let mut m = Matrix::zeros(p, z.dim(k), c.dim(k));
        if h.known(k + 1) {
            m.set_block(0, 0, &h.component(k + 1));
        }
        if g.known(k) {
            m.set_block(0, a.dim(k + 1), &g.component(k));
        }
        m
    });
    m.check_chain()?;
    Ok(m)
}

/// Tensor product of graded maps with the Koszul sign `(-1)^(i |g|)` on `X_i ⊗ Y_j`.
/// Source and target are `tensor(X, Y)` and `tensor(X', Y')` with the same window.
pub fn tensor_map(f: &GradedMap, g: &GradedMap, mode: TensorMode, window: Option<(i64, i64)>) -> Result<GradedMap> {
    let src = tensor(&f.source, &g.source, mode, window)?;
    let tgt = tensor(&f.target, &g.target, mode, window)?;
    Ok(tensor_map_between(f, g, &src, &tgt))
}

pub fn external_tensor_map(
    f: &GradedMap,
    g: &GradedMap,
    target: &Arc<GroupAlgebra>,
    window: Option<(i64, i64)>,
) -> Result<GradedMap> {
    let src = external_tensor(&f.source, &g.source, target, window)?;
    let tgt = external_tensor(&f.target, &g.target, target, window)?;
    Ok(tensor_map_between(f, g, &src, &tgt))
}

pub(crate) fn tensor_map_between(f: &GradedMap, g: &GradedMap, src: &Complex, tgt: &Complex) -> GradedMap {
    let (x, y, x2, y2) = (&f.source, &g.source, &f.target, &g.target);
    let (df, dg) = (f.degree, g.degree);
    let p = src.p();
    let deg = df + dg;
    let mut le = vec![src.left_edge(), tgt.left_edge().shifted(-deg)];
    let mut re = vec![src.right_edge(), tgt.right_edge().shifted(-deg)];
    // maps with periodic tails need their period reflected in the result
    for m in [f, g] {
        if let Tail::Periodic(k) = m.left {
            le.push(Edge { reg: Reg::Per(lcm(k, sign_period(p))), at: src.lo });
        }
        if let Tail::Periodic(k) = m.right {
            re.push(Edge { reg: Reg::Per(lcm(k, sign_period(p))), at: src.hi() });
        }
    }
    let l = sum_left(&le, 1);
    let r = sum_right(&re, 1);
    GradedMap::assemble(src, tgt, deg, l, r, &|k| {
        let mut out = Matrix::zeros(p, tgt.dim(k + deg), src.dim(k));
        if !src.known(k) || !tgt.known(k + deg) {
            return out;
        }
        let sp = tensor_pairs(x, y, k);
        let tp = tensor_pairs(x2, y2, k + deg);
        let toff = offsets(&tp, x2, y2);
        let mut so = 0;
        for &(i, j) in &sp {
            if let Some(pos) = tp.iter().position(|&q| q == (i + df, j + dg)) {
                let b = tensor_matrix(
                    &f.component(i),
                    &g.component(j),
                    x.term(i),
                    y.term(j),
                    x2.term(i + df),
                    y2.term(j + dg),
                );
                out.add_block(toff[pos], so, &b.signed(i * dg));
            }
            so += x.dim(i) * y.dim(j);
        }
        out
    })
}

/// Dual of a degree-0 chain map: `(f*)_i = (f_(-i))^T : Y*_i -> X*_i`.
pub fn dual_map(f: &GradedMap) -> Result<GradedMap> {
    if f.degree != 0 {
        return Err(Error::PreconditionFailed("dual_map needs a degree-0 map".into()));
    }
    let xs = dual(&f.source)?;
    let ys = dual(&f.target)?;
    let sp = sign_period(f.source.p());
    let fl = f.right_edge();
    let fr = f.left_edge();
    let l = sum_left(&[ys.left_edge(), xs.left_edge(), Edge { reg: fl.reg, at: -fl.at }], sp);
    let r = sum_right(&[ys.right_edge(), xs.right_edge(), Edge { reg: fr.reg, at: -fr.at }], sp);
    Ok(GradedMap::assemble(&ys, &xs, 0, l, r, &|i| f.component(-i).transpose()))
}

/// Braiding `X ⊗ Y -> Y ⊗ X`: `x ⊗ y -> (-1)^(|x||y|) y ⊗ x`.
pub fn braiding(x: &Complex, y: &Complex, window: Option<(i64, i64)>) -> Result<GradedMap> {
    let src = tensor(x, y, TensorMode::Sum, window)?;
    let tgt = tensor(y, x, TensorMode::Sum, window)?;
    let p = src.p();
    let l = sum_left(&[src.left_edge(), tgt.left_edge()], 1);
    let r = sum_right(&[src.right_edge(), tgt.right_edge()], 1);
    let f = GradedMap::assemble(&src, &tgt, 0, l, r, &|k| {
        let mut out = Matrix::zeros(p, tgt.dim(k), src.dim(k));
        if !src.known(k) || !tgt.known(k) {
            return out;
        }
        let sp = tensor_pairs(x, y, k);
        let tp = tensor_pairs(y, x, k);
        let toff = offsets(&tp, y, x);
        let mut so = 0;
        for &(i, j) in &sp {
            let (mi, nj) = (x.term(i), y.term(j));
            let pos = tp.iter().position(|&q| q == (j, i)).expect("swapped pair present");
            let swap = swap_matrix(mi, nj);
            out.add_block(toff[pos], so, &swap.signed(i * j));
            so += mi.dim() * nj.dim();
        }
        out
    });
    Ok(f)
}

/// Module isomorphism `M ⊗ N -> N ⊗ M`, `m ⊗ n -> n ⊗ m`, in piece-pair-major bases.
pub fn swap_matrix(m: &FdModule, n: &FdModule) -> Matrix {
    let p = m.p();
    let (a, b) = (m.dim(), n.dim());
    let src = crate::group::tensor_positions(m, n);
    let dst = crate::group::tensor_positions(n, m);
    let mut out = Matrix::zeros(p, a * b, a * b);
    for i in 0..a {
        for j in 0..b {
            out.set(dst[j * a + i], src[i * b + j], 1);
        }
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::group::{group_algebra, regular_module, trivial_module, GroupSpec};

    fn c2() -> Arc<GroupAlgebra> {
        group_algebra(2, GroupSpec::Cyclic(2)).unwrap()
    }

    /// P: C in degrees <= 0, d = 1 + x.
    fn p_complex(alg: &Arc<GroupAlgebra>) -> Complex {
        let c = regular_module(alg);
        let d = alg.right_mult(&[1, 1]);
        Complex::new(alg, -1, vec![c.clone(), c], vec![d], Tail::Periodic(1), Tail::Zero).unwrap()
    }

    #[test]
    fn periodic_accessors() {
        let alg = c2();
        let p = p_complex(&alg);
        assert_eq!(p.dims(-5, 2), vec![2, 2, 2, 2, 2, 2, 0, 0]);
        assert!(p.check_square_zero().is_ok());
        let h = homology(&p, -6, 1);
        assert_eq!(h.iter().map(|x| x.dim).collect::<Vec<_>>(), vec![0, 0, 0, 0, 0, 0, 1, 0]);
    }

    #[test]
    fn shift_signs() {
        let alg = group_algebra(3, GroupSpec::Cyclic(3)).unwrap();
        let c = regular_module(&alg);
        let d = alg.right_mult(&[2, 1, 0]);
        let x = Complex::new(&alg, 0, vec![c.clone(), c], vec![d.clone()], Tail::Zero, Tail::Zero).unwrap();
        let s = shift(&x, 1);
        assert_eq!(s.lo(), -1);
        assert_eq!(*s.diff(-1), d.neg());
        assert_eq!(shift(&s, -1), x);
    }

    #[test]
    fn tensor_unit_and_growth() {
        let alg = c2();
        let k = Complex::concentrated(&trivial_module(&alg), 0);
        let p = p_complex(&alg);
        let kp = tensor(&k, &p, TensorMode::Sum, None).unwrap();
        assert_eq!(kp.dims(-4, 1), p.dims(-4, 1));
        assert!(matches!(tensor(&p, &p, TensorMode::Sum, None), Err(Error::WindowRequired(_))));
        let pp = tensor(&p, &p, TensorMode::Sum, Some((-4, 0))).unwrap();
        assert_eq!(pp.dim(-2), 12);
        let pd = dual(&p).unwrap();
        assert!(matches!(tensor(&p, &pd, TensorMode::Sum, None), Err(Error::InfiniteRank { .. })));
    }

    #[test]
    fn cone_of_augmentation_is_acyclic() {
        let alg = c2();
        let p = p_complex(&alg);
        let k = Complex::concentrated(&trivial_module(&alg), 0);
        let eps = GradedMap::new(
            &p,
            &k,
            0,
            0,
            vec![Matrix::from_rows(2, &[vec![1, 1]])],
            Tail::Zero,
            Tail::Zero,
        )
        .unwrap();
        let a = cone(&eps).unwrap();
        assert!(homology(&a.complex, -6, 2).iter().all(|h| h.dim == 0));
        assert!(a.inclusion.is_chain_map());
        assert!(a.projection.is_chain_map());
        assert_eq!(a.complex.dims(-3, 0), vec![2, 2, 2, 1]);
    }
}
