//! Null-homotopies, contractibility and homotopy equivalences.
//!
//! Unknown maps are written in Hom-basis coordinates, so every solution is a
//! module map by construction. Equations are imposed on module generators only.

use serde::{Deserialize, Serialize};

use crate::complex::{cone, homology, lcm, Complex, GradedMap, Tail};
use crate::error::{Error, Result};
use crate::group::{combine_blocks, higman_section, hom_blocks, trace_average, FdModule, HomBlock};
use crate::linalg::Matrix;

/// Default multiplier budget for the periodic ansatz.
pub const DEFAULT_BUDGET: usize = 4;

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub enum Certification {
    Exact,
    WindowInterior { lo: i64, hi: i64 },
}

/// A homotopy `h` (degree `|f| - 1`) with `d h - (-1)^|h| h d = f`.
#[derive(Clone, Debug)]
pub struct Homotopy {
    pub h: GradedMap,
    pub f: GradedMap,
    pub cert: Certification,
}

impl Homotopy {
    /// Re-check the homotopy identity on the certified degrees.
    pub fn verify(&self) -> bool {
        let (a, b) = match self.cert {
            Certification::Exact => {
                let (a1, b1) = self.h.check_range();
                let (a2, b2) = self.f.check_range();
                (a1.min(a2), b1.max(b2))
            }
            Certification::WindowInterior { lo, hi } => (lo, hi),
        };
        (a..=b).all(|i| {
            let exact = matches!(self.cert, Certification::Exact);
            if exact && (!self.h.known(i) || !self.h.known(i + 1) || !self.f.known(i)) {
                return true;
            }
            self.h.boundary_component(i) == *self.f.component(i)
        })
    }
}

/// Outcome of a certified search.
#[derive(Clone, Debug)]
pub enum Search<T> {
    Found(T),
    CertifiedNo(String),
    Inconclusive(String),
}

impl<T> Search<T> {
    pub fn is_found(&self) -> bool {
        matches!(self, Search::Found(_))
    }
    pub fn is_no(&self) -> bool {
        matches!(self, Search::CertifiedNo(_))
    }
    pub fn found(self) -> Option<T> {
        match self {
            Search::Found(t) => Some(t),
            _ => None,
        }
    }
}

/// Unknown module map `src -> tgt` in Hom-basis coordinates.
pub(crate) struct Unknown {
    pub src: FdModule,
    pub tgt: FdModule,
    pub basis: Vec<HomBlock>,
}

impl Unknown {
    pub fn new(src: &FdModule, tgt: &FdModule) -> Unknown {
        Unknown { src: src.clone(), tgt: tgt.clone(), basis: hom_blocks(src, tgt) }
    }
    pub fn len(&self) -> usize {
        self.basis.len()
    }
    pub fn to_matrix(&self, c: &[u32]) -> Matrix {
        combine_blocks(&self.src, &self.tgt, &self.basis, c)
    }
}

/// Generator data of a module: block-diagonal generator matrix and column offsets.
pub(crate) struct Gens {
    pub g: Matrix,
    pub offs: Vec<usize>,
    pub counts: Vec<usize>,
    pub total: usize,
}

impl Gens {
    pub fn of(m: &FdModule) -> Gens {
        let counts = m.generator_counts();
        let mut offs = Vec::with_capacity(counts.len());
        let mut t = 0;
        for &c in &counts {
            offs.push(t);
            t += c;
        }
        Gens { g: m.generator_matrix(), offs, counts, total: t }
    }
}

/// Columns `c -> vec(dy · B(c) · G)` for `B : u.src -> u.tgt`, `dy : u.tgt -> Y'`.
pub(crate) fn left_columns(dy: &Matrix, u: &Unknown, gens: &Gens) -> Matrix {
    let p = u.src.p();
    let rows = dy.rows();
    let mut out = Matrix::zeros(p, rows * gens.total, u.len());
    let mut dy_cache: Vec<Option<Matrix>> = vec![None; u.tgt.pieces().len()];
    let mut g_cache: Vec<Option<Matrix>> = vec![None; u.src.pieces().len()];
    for (col, hb) in u.basis.iter().enumerate() {
        let (a, b) = (hb.a, hb.b);
        if dy_cache[b].is_none() {
            dy_cache[b] = Some(dy.block(0, rows, u.tgt.offsets()[b], u.tgt.pieces()[b].dim()));
        }
        if g_cache[a].is_none() {
            g_cache[a] =
                Some(gens.g.block(u.src.offsets()[a], u.src.pieces()[a].dim(), gens.offs[a], gens.counts[a]));
        }
        let prod = dy_cache[b].as_ref().unwrap().mul(&hb.mat).mul(g_cache[a].as_ref().unwrap());
        for r in 0..rows {
            for c in 0..gens.counts[a] {
                let v = prod.get(r, c);
                if v != 0 {
                    out.set(r * gens.total + gens.offs[a] + c, col, v);
                }
            }
        }
    }
    out
}

/// Columns `c -> vec(B(c) · dxg)` for `B : u.src -> u.tgt`, `dxg = d_X G` with rows
/// indexed by `u.src`.
pub(crate) fn right_columns(u: &Unknown, dxg: &Matrix) -> Matrix {
    let p = u.src.p();
    let w = dxg.cols();
    let mut out = Matrix::zeros(p, u.tgt.dim() * w, u.len());
    let mut cache: Vec<Option<Matrix>> = vec![None; u.src.pieces().len()];
    for (col, hb) in u.basis.iter().enumerate() {
        let a = hb.a;
        if cache[a].is_none() {
            cache[a] = Some(dxg.block(u.src.offsets()[a], u.src.pieces()[a].dim(), 0, w));
        }
        let prod = hb.mat.mul(cache[a].as_ref().unwrap());
        let r0 = u.tgt.offsets()[hb.b];
        for r in 0..prod.rows() {
            for c in 0..w {
                let v = prod.get(r, c);
                if v != 0 {
                    out.set((r0 + r) * w + c, col, v);
                }
            }
        }
    }
    out
}

/// The linear problem `d_Y h_i - s h_(i+1) d_X = f_i` for `h` of degree `n`.
pub(crate) struct Problem<'a> {
    pub x: &'a Complex,
    pub y: &'a Complex,
    pub n: i64,
    pub f: Option<&'a GradedMap>,
}

impl<'a> Problem<'a> {
    pub fn unknown(&self, i: i64) -> Unknown {
        Unknown::new(self.x.term(i), self.y.term(i + self.n))
    }

    /// Coefficient blocks of equation `i`: (on `h_i`, on `h_(i+1)`, rhs).
    pub fn equation(&self, i: i64, ui: &Unknown, ui1: &Unknown) -> (Matrix, Matrix, Vec<u32>) {
        let gens = Gens::of(self.x.term(i));
        let dy = self.y.diff(i + self.n);
        let a = left_columns(&dy, ui, &gens);
        let dxg = self.x.diff(i).mul(&gens.g);
        let b = right_columns(ui1, &dxg).signed(self.n + 1);
        let rhs = match self.f {
            Some(f) => f.component(i).mul(&gens.g).data().to_vec(),
            None => vec![0; a.rows()],
        };
        (a, b, rhs)
    }
}

fn zero_coords(n: usize) -> Vec<u32> {
    vec![0; n]
}

fn add_vec(a: &[u32], b: &[u32], p: u32) -> Vec<u32> {
    a.iter().zip(b).map(|(&x, &y)| (x + y) % p).collect()
}

/// Solve the equations for source degrees `a..=b` with unknowns `h_a..=h_(b+1)`,
/// sweeping from the top and carrying affine solution families. `None` when the
/// (relaxed) system is infeasible.
pub(crate) fn solve_window(pb: &Problem, a: i64, b: i64) -> Option<Vec<Matrix>> {
    let p = pb.x.p();
    struct Step {
        p0: Vec<u32>,
        dirs: Matrix,
        lift_p: Vec<u32>,
        lift_dirs: Matrix,
    }
    let top = pb.unknown(b + 1);
    let nt = top.len();
    let mut fam_p0 = zero_coords(nt);
    let mut fam_dirs = Matrix::identity(p, nt);
    let mut unknowns = vec![top];
    let mut steps: Vec<Step> = Vec::new();
    for i in (a..=b).rev() {
        let ui = pb.unknown(i);
        let ui1 = unknowns.last().unwrap();
        let (ca, cb, rhs) = pb.equation(i, &ui, ui1);
        let bk = cb.mul(&fam_dirs);
        let shifted = cb.mul_vec(&fam_p0);
        let rhs: Vec<u32> = rhs.iter().zip(&shifted).map(|(&r, &s)| (r + p - s) % p).collect();
        let m = ca.hstack(&bk);
        let sol = m.solve(&rhs).ok()?;
        let ni = ui.len();
        let q = bk.cols();
        let kc = sol.kernel.block(0, ni, 0, sol.kernel.cols());
        let kt = sol.kernel.block(ni, q, 0, sol.kernel.cols());
        let piv = kc.pivot_columns();
        let step = Step {
            p0: sol.x0[..ni].to_vec(),
            dirs: kc.select_cols(&piv),
            lift_p: sol.x0[ni..].to_vec(),
            lift_dirs: kt.select_cols(&piv),
        };
        fam_p0 = step.p0.clone();
        fam_dirs = step.dirs.clone();
        steps.push(step);
        unknowns.push(ui);
    }
    // back substitution from degree a upwards
    let mut comps = Vec::new();
    let mut t: Vec<u32> = Vec::new();
    for (idx, step) in steps.iter().rev().enumerate() {
        let coords = if idx == 0 { step.p0.clone() } else { add_vec(&step.p0, &step.dirs.mul_vec(&t), p) };
        let u = &unknowns[unknowns.len() - 1 - idx];
        comps.push(u.to_matrix(&coords));
        t = if idx == 0 { step.lift_p.clone() } else { add_vec(&step.lift_p, &step.lift_dirs.mul_vec(&t), p) };
    }
    // top family: h_(b+1) = t
    comps.push(unknowns[0].to_matrix(if steps.is_empty() { &fam_p0 } else { &t }));
    Some(comps)
}

/// Periodic ansatz: one global system on an aligned core with wrap-around
/// unknowns; period `mult` times the base period on each periodic side.
pub(crate) struct PeriodicSystem {
    pub sys: Matrix,
    pub rhs: Vec<u32>,
    unknowns: Vec<Unknown>,
    offs: Vec<usize>,
    a: i64,
    left: Tail,
    right: Tail,
}

impl PeriodicSystem {
    pub fn build(pb: &Problem, mult: usize) -> PeriodicSystem {
        let (x, y, n) = (pb.x, pb.y, pb.n);
        let fl = pb.f.map_or(1, |f| f.left().period());
        let fr = pb.f.map_or(1, |f| f.right().period());
        let left_per = matches!(x.left(), Tail::Periodic(_)) && matches!(y.left(), Tail::Periodic(_));
        let right_per = matches!(x.right(), Tail::Periodic(_)) && matches!(y.right(), Tail::Periodic(_));
        let ll = mult * lcm(lcm(x.left().period(), y.left().period()), fl);
        let lr = mult * lcm(lcm(x.right().period(), y.right().period()), fr);
        let (flo, fhi) = pb.f.map_or((x.lo(), x.hi()), |f| (f.lo(), f.hi()));
        let a = x.lo().min(y.lo() - n).min(flo) - ll as i64 - 1;
        let mut b = x.hi().max(y.hi() - n).max(fhi) + lr as i64 + 1;
        if b < a + ll.max(lr) as i64 {
            b = a + ll.max(lr) as i64;
        }
        let alias = |i: i64| -> Option<i64> {
            if i < a {
                left_per.then(|| i + ll as i64 * (a - i + ll as i64 - 1).div_euclid(ll as i64))
            } else if i > b {
                right_per.then(|| i - lr as i64 * (i - b + lr as i64 - 1).div_euclid(lr as i64))
            } else {
                Some(i)
            }
        };
        let unknowns: Vec<Unknown> = (a..=b).map(|i| pb.unknown(i)).collect();
        let mut offs = Vec::with_capacity(unknowns.len());
        let mut total = 0;
        for u in &unknowns {
            offs.push(total);
            total += u.len();
        }
        let p = x.p();
        let mut blocks = Vec::new();
        let mut rows = 0;
        for i in (a - 1)..=b {
            let ui_idx = alias(i).map(|j| (j - a) as usize);
            let ui1_idx = alias(i + 1).map(|j| (j - a) as usize);
            let empty_i = Unknown::new(x.term(i), y.term(i + n));
            let empty_i1 = Unknown::new(x.term(i + 1), y.term(i + 1 + n));
            let ui = ui_idx.map_or(&empty_i, |k| &unknowns[k]);
            let ui1 = ui1_idx.map_or(&empty_i1, |k| &unknowns[k]);
            let (ca, cb, rhs) = pb.equation(i, ui, ui1);
            rows += rhs.len();
            blocks.push((ui_idx.map(|k| (offs[k], ca)), ui1_idx.map(|k| (offs[k], cb)), rhs));
        }
        let mut sys = Matrix::zeros(p, rows, total);
        let mut rhs_all = Vec::with_capacity(rows);
        let mut r0 = 0;
        for (la, lb, rhs) in &blocks {
            if let Some((c0, m)) = la {
                sys.add_block(r0, *c0, m);
            }
            if let Some((c0, m)) = lb {
                sys.add_block(r0, *c0, m);
            }
            rhs_all.extend_from_slice(rhs);
            r0 += rhs.len();
        }
        let left = if left_per { Tail::Periodic(ll) } else { Tail::Zero };
        let right = if right_per { Tail::Periodic(lr) } else { Tail::Zero };
        PeriodicSystem { sys, rhs: rhs_all, unknowns, offs, a, left, right }
    }

    pub fn to_map(&self, pb: &Problem, coords: &[u32]) -> GradedMap {
        let comps: Vec<Matrix> = self
            .unknowns
            .iter()
            .enumerate()
            .map(|(k, u)| u.to_matrix(&coords[self.offs[k]..self.offs[k] + u.len()]))
            .collect();
        GradedMap::raw(pb.x, pb.y, pb.n, self.a, comps, self.left.clone(), self.right.clone())
    }
}

pub(crate) fn solve_periodic(pb: &Problem, mult: usize) -> Option<GradedMap> {
    let ps = PeriodicSystem::build(pb, mult);
    let sol = ps.sys.solve(&ps.rhs).ok()?;
    Some(ps.to_map(pb, &sol.x0))
}

/// Degree `i` where `f` is nonzero on homology, if any (checked over its check range).
pub fn homology_obstruction(f: &GradedMap) -> Option<i64> {
    let (x, y, m) = (f.source(), f.target(), f.degree());
    let (a, b) = f.check_range();
    for i in a..=b {
        if !f.known(i) || !x.known(i + 1) || !y.known(i + m - 1) {
            continue;
        }
        let z = x.diff(i).kernel();
        if z.cols() == 0 {
            continue;
        }
        let img = f.component(i).mul(&z);
        if img.is_zero() {
            continue;
        }
        let bd = y.diff(i + m - 1);
        if bd.solve_matrix(&img).is_none() {
            return Some(i);
        }
    }
    None
}

fn any_truncated(f: &GradedMap) -> bool {
    f.source().has_truncation() || f.target().has_truncation() || f.left().is_truncated() || f.right().is_truncated()
}

fn bounded_solve(f: &GradedMap) -> Search<Homotopy> {
    let (x, y) = (f.source(), f.target());
    let n = f.degree() - 1;
    let a = x.lo().min(y.lo() - n - 1).min(f.lo()) - 1;
    let b = x.hi().max(y.hi() - n).max(f.hi()) + 1;
    let pb = Problem { x, y, n, f: Some(f) };
    match solve_window(&pb, a, b) {
        Some(comps) => {
            let h = GradedMap::raw(x, y, n, a, comps, Tail::Zero, Tail::Zero);
            Search::Found(Homotopy { h, f: f.clone(), cert: Certification::Exact })
        }
        None => Search::CertifiedNo("the finite homotopy system has no solution".into()),
    }
}

/// Null-homotopy of a chain map (`d h - (-1)^|h| h d = f`).
///
/// Bounded complexes give a complete decision. Eventually periodic ones are
/// solved with a periodic ansatz of period `k` times the base period, `k <= budget`.
pub fn null_homotopy(f: &GradedMap, budget: usize) -> Result<Search<Homotopy>> {
    if any_truncated(f) {
        return Err(Error::RegimeUnsupported);
    }
    let (x, y) = (f.source(), f.target());
    let n = f.degree() - 1;
    if f.is_zero() {
        let h = GradedMap::zero(x, y, n);
        return Ok(Search::Found(Homotopy { h, f: f.clone(), cert: Certification::Exact }));
    }
    if x.is_bounded() && y.is_bounded() {
        return Ok(bounded_solve(f));
    }
    if let Some(i) = homology_obstruction(f) {
        return Ok(Search::CertifiedNo(format!("nonzero on homology in degree {i}")));
    }
    let pb = Problem { x, y, n, f: Some(f) };
    for mult in 1..=budget.max(1) {
        if let Some(h) = solve_periodic(&pb, mult) {
            let hom = Homotopy { h, f: f.clone(), cert: Certification::Exact };
            if hom.verify() {
                return Ok(Search::Found(hom));
            }
        }
    }
    // the window system is a relaxation: infeasible there means no homotopy at all
    let (a, b) = f.check_range();
    if solve_window(&pb, a + 1, b - 1).is_none() {
        return Ok(Search::CertifiedNo(format!("no homotopy even on the window [{}, {}]", a + 1, b - 1)));
    }
    Ok(Search::Inconclusive(format!("periodic ansatz exhausted up to multiplier {budget}")))
}

/// Null-homotopy valid on the source degrees `[a, b]` only.
pub fn null_homotopy_window(f: &GradedMap, a: i64, b: i64) -> Result<Search<Homotopy>> {
    let (x, y) = (f.source(), f.target());
    let n = f.degree() - 1;
    for i in (a - 1)..=(b + 1) {
        if !x.known(i) || !y.known(i + n) || !y.known(i + n + 1) {
            return Err(Error::OutOfValidityRange { degree: i });
        }
    }
    let pb = Problem { x, y, n, f: Some(f) };
    Ok(match solve_window(&pb, a, b) {
        Some(comps) => {
            let h = GradedMap::raw(x, y, n, a, comps, Tail::Truncated("window".into()), Tail::Truncated("window".into()));
            let hom = Homotopy { h, f: f.clone(), cert: Certification::WindowInterior { lo: a, hi: b } };
            debug_assert!(hom.verify());
            Search::Found(hom)
        }
        None => Search::CertifiedNo(format!("no homotopy on the window [{a}, {b}]")),
    })
}

/// Homology witness: first degree in `[a, b]` with reliable nonzero homology.
pub fn homology_witness(x: &Complex, a: i64, b: i64) -> Option<(i64, usize)> {
    homology(x, a, b).into_iter().find(|h| h.reliable && h.dim > 0).map(|h| (h.degree, h.dim))
}

pub fn is_contractible(x: &Complex, budget: usize) -> Result<Search<Homotopy>> {
    if x.has_truncation() {
        return Err(Error::RegimeUnsupported);
    }
    let (a, b) = x.check_range();
    if let Some((k, d)) = homology_witness(x, a, b) {
        return Ok(Search::CertifiedNo(format!("H^{k} has dimension {d}")));
    }
    null_homotopy(&GradedMap::identity(x), budget)
}

/// Contractibility on the interior window `[a, b]`.
pub fn is_contractible_window(x: &Complex, a: i64, b: i64) -> Result<Search<Homotopy>> {
    if let Some((k, d)) = homology_witness(x, a, b) {
        return Ok(Search::CertifiedNo(format!("H^{k} has dimension {d}")));
    }
    null_homotopy_window(&GradedMap::identity(x), a, b)
}

pub fn is_homotopy_equivalence(f: &GradedMap, budget: usize) -> Result<Search<Homotopy>> {
    is_contractible(&cone(f)?.complex, budget)
}

/// Contraction of a one-sided bounded acyclic complex of projectives, built
/// degree by degree: a κ-linear lift is averaged into a module map with the
/// Higman section. A periodic tail is recognised when the contraction repeats.
pub fn contract_projective_acyclic(x: &Complex, budget: usize) -> Result<Homotopy> {
    if x.right().is_zero() {
        contract_top_down(x, budget)
    } else if x.left().is_zero() {
        contract_bottom_up(x, budget)
    } else {
        Err(Error::PreconditionFailed("complex is bounded neither above nor below".into()))
    }
}

fn section(x: &Complex, k: i64) -> Result<Matrix> {
    higman_section(x.term(k)).ok_or_else(|| Error::PreconditionFailed(format!("term in degree {k} is not projective")))
}

fn finish(x: &Complex, lo: i64, comps: Vec<Matrix>, left: Tail, right: Tail, cert: Certification) -> Result<Homotopy> {
    let h = GradedMap::raw(x, x, -1, lo, comps, left, right);
    let hom = Homotopy { h, f: GradedMap::identity(x), cert };
    if !hom.verify() {
        return Err(Error::PreconditionFailed("contraction failed re-verification".into()));
    }
    Ok(hom)
}

fn contract_top_down(x: &Complex, budget: usize) -> Result<Homotopy> {
    let p = x.p();
    let top = x.hi();
    let margin = 2 * x.window_period() as i64;
    let (stop, per) = match x.left() {
        Tail::Zero => (x.lo(), None),
        Tail::Periodic(m) => (x.lo() - (budget as i64 + 2) * *m as i64 - 2, Some(*m)),
        Tail::Truncated(_) => (x.lo() + 1, None),
    };
    // comps[j] = h_(top - j)
    let mut comps: Vec<Matrix> = Vec::new();
    let mut h_next = Matrix::zeros(p, x.dim(top), x.dim(top + 1));
    let mut k = top;
    while k >= stop {
        let id = Matrix::identity(p, x.dim(k));
        let r = id.sub(&h_next.mul(&x.diff(k)));
        let dm = x.diff(k - 1);
        let hk = if x.dim(k) == 0 {
            Matrix::zeros(p, x.dim(k - 1), 0)
        } else {
            let lift = dm
                .solve_matrix(&r)
                .ok_or_else(|| Error::PreconditionFailed(format!("complex is not acyclic at degree {k}")))?;
            let phi = section(x, k)?;
            trace_average(x.term(k), x.term(k - 1), &lift.mul(&phi))
        };
        comps.push(hk.clone());
        if let Some(m) = per {
            if k + 1 < x.lo() {
                for j in 1..=budget.max(1) {
                    let l = (j * m) as i64;
                    let a = (top - (k + 1)) as usize;
                    let b = (top - (k + 1 + l)) as usize;
                    if k + 1 + l <= top && comps[a] == comps[b] {
                        // h_(k+1) = h_(k+1+L): the sweep repeats from here on
                        let core: Vec<Matrix> = comps[..=a].iter().rev().cloned().collect();
                        return finish(x, k + 1, core, Tail::Periodic(l as usize), Tail::Zero, Certification::Exact);
                    }
                }
            }
        }
        h_next = hk;
        k -= 1;
    }
    let core: Vec<Matrix> = comps.into_iter().rev().collect();
    match x.left() {
        Tail::Zero => finish(x, stop, core, Tail::Zero, Tail::Zero, Certification::Exact),
        Tail::Truncated(_) => {
            let lo = x.lo() + margin;
            finish(x, stop, core, Tail::Truncated("contraction window".into()), Tail::Zero, Certification::WindowInterior { lo, hi: top })
        }
        Tail::Periodic(_) => {
            let lo = stop + margin;
            finish(x, stop, core, Tail::Truncated("contraction window".into()), Tail::Zero, Certification::WindowInterior { lo, hi: top })
        }
    }
}

fn contract_bottom_up(x: &Complex, budget: usize) -> Result<Homotopy> {
    let p = x.p();
    let bot = x.lo();
    let margin = 2 * x.window_period() as i64;
    let (stop, per) = match x.right() {
        Tail::Zero => (x.hi(), None),
        Tail::Periodic(m) => (x.hi() + (budget as i64 + 2) * *m as i64 + 2, Some(*m)),
        Tail::Truncated(_) => (x.hi() - 1, None),
    };
    // comps[j] = h_(bot + j)
    let mut comps: Vec<Matrix> = vec![Matrix::zeros(p, x.dim(bot - 1), x.dim(bot))];
    let mut k = bot;
    while k <= stop {
        let hk = &comps[(k - bot) as usize];
        let r = Matrix::identity(p, x.dim(k)).sub(&x.diff(k - 1).mul(hk));
        let dk = x.diff(k);
        let next = if x.dim(k + 1) == 0 {
            if !r.is_zero() {
                return Err(Error::PreconditionFailed(format!("complex is not acyclic at degree {k}")));
            }
            Matrix::zeros(p, x.dim(k), 0)
        } else {
            let lift = dk
                .solve_left(&r)
                .ok_or_else(|| Error::PreconditionFailed(format!("complex is not acyclic at degree {k}")))?;
            let psi = section(x, k)?;
            trace_average(x.term(k + 1), x.term(k), &psi.mul(&lift))
        };
        comps.push(next);
        let kk = k + 1;
        if let Some(m) = per {
            if kk - 1 > x.hi() {
                for j in 1..=budget.max(1) {
                    let l = (j * m) as i64;
                    if kk - l >= bot && comps[(kk - bot) as usize] == comps[(kk - l - bot) as usize] {
                        comps.truncate((kk - bot + 1) as usize);
                        return finish(x, bot, comps, Tail::Zero, Tail::Periodic(l as usize), Certification::Exact);
                    }
                }
            }
        }
        k += 1;
    }
    let hi = stop + 1;
    match x.right() {
        Tail::Zero => finish(x, bot, comps, Tail::Zero, Tail::Zero, Certification::Exact),
        _ => {
            let top = if x.right().is_truncated() { x.hi() - margin } else { hi - 1 - margin };
            finish(x, bot, comps, Tail::Zero, Tail::Truncated("contraction window".into()), Certification::WindowInterior { lo: bot, hi: top })
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::complex::{materialize, tensor, TensorMode};
    use crate::group::{group_algebra, regular_module, trivial_module, GroupAlgebra, GroupSpec};
    use std::sync::Arc;

    fn c2() -> Arc<GroupAlgebra> {
        group_algebra(2, GroupSpec::Cyclic(2)).unwrap()
    }

    fn p_complex(alg: &Arc<GroupAlgebra>) -> Complex {
        let c = regular_module(alg);
        let d = alg.right_mult(&[1, 1]);
        Complex::new(alg, -1, vec![c.clone(), c], vec![d], Tail::Periodic(1), Tail::Zero).unwrap()
    }

    fn eps(alg: &Arc<GroupAlgebra>) -> GradedMap {
        let p = p_complex(alg);
        let k = Complex::concentrated(&trivial_module(alg), 0);
        GradedMap::new(&p, &k, 0, 0, vec![Matrix::from_rows(2, &[vec![1, 1]])], Tail::Zero, Tail::Zero).unwrap()
    }

    #[test]
    fn split_complex_contracts() {
        let alg = c2();
        let c = regular_module(&alg);
        let x = Complex::new(&alg, 0, vec![c.clone(), c], vec![Matrix::identity(2, 2)], Tail::Zero, Tail::Zero).unwrap();
        let h = is_contractible(&x, 4).unwrap().found().unwrap();
        assert!(h.verify());
        assert!(contract_projective_acyclic(&x, 4).unwrap().verify());
    }

    #[test]
    fn forced_no() {
        let alg = c2();
        let c = regular_module(&alg);
        let x = Complex::concentrated(&c, 0);
        let f = GradedMap::new(&x, &x, 0, 0, vec![alg.right_mult(&[1, 1])], Tail::Zero, Tail::Zero).unwrap();
        assert!(null_homotopy(&f, 4).unwrap().is_no());
    }

    #[test]
    fn resolution_not_contractible() {
        let alg = c2();
        assert!(is_contractible(&p_complex(&alg), 4).unwrap().is_no());
    }

    #[test]
    fn cone_of_identity_on_kappa() {
        let alg = c2();
        let k = Complex::concentrated(&trivial_module(&alg), 0);
        let c = cone(&GradedMap::identity(&k)).unwrap();
        assert!(is_contractible(&c.complex, 4).unwrap().is_found());
    }

    #[test]
    fn periodic_ansatz_on_a_tensor() {
        // A ⊗ σ≥-2 P is acyclic, bounded above, projective and periodic on the left
        let alg = c2();
        let a = cone(&eps(&alg)).unwrap().complex;
        let sp = materialize(&p_complex(&alg), -2, 0).unwrap();
        let t = tensor(&a, &sp, TensorMode::Sum, None).unwrap();
        assert!(matches!(t.left(), Tail::Periodic(_)));
        let h = contract_projective_acyclic(&t, 4).unwrap();
        assert_eq!(h.cert, Certification::Exact);
        let g = is_contractible(&t, 4).unwrap();
        assert!(g.is_found());
    }

    #[test]
    fn window_contraction_of_p_tensor_a() {
        let alg = c2();
        let a = cone(&eps(&alg)).unwrap().complex;
        let p = p_complex(&alg);
        let t = tensor(&p, &a, TensorMode::Sum, Some((-8, 0))).unwrap();
        let h = contract_projective_acyclic(&t, 4).unwrap();
        assert_eq!(h.cert, Certification::WindowInterior { lo: -6, hi: 0 });
        let w = is_contractible_window(&t, -6, 0).unwrap();
        assert!(w.is_found());
    }

    #[test]
    fn kappa_term_rejected() {
        let alg = c2();
        let k = Complex::concentrated(&trivial_module(&alg), 0);
        assert!(matches!(contract_projective_acyclic(&k, 4), Err(Error::PreconditionFailed(_))));
    }
}
