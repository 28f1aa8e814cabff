//! Idempotent triangles `C -> 𝟙 -> U -> C[1]`: minimal resolutions, complements,
//! duals, Tate objects and the Tate cohomology ring.

use std::sync::Arc;

use serde::{Deserialize, Serialize};

use crate::complex::{
    block_map, compose, cone, dual, dual_map, shift, shift_map, Complex, GradedMap, Tail,
};
use crate::error::{Error, Result};
use crate::group::{direct_sum_modules, higman_section, regular_module, submodule, trivial_module, FdModule, GroupAlgebra};
use crate::hom::{graded_hom, ring_table_from, GradedHom, RingTable};
use crate::linalg::Matrix;

/// The monoidal unit: κ in degree 0.
pub fn unit_complex(alg: &Arc<GroupAlgebra>) -> Complex {
    Complex::concentrated(&trivial_module(alg), 0)
}

/// A projective resolution `P -> M` in degrees `<= 0`.
#[derive(Clone, Debug)]
pub struct Resolution {
    pub complex: Complex,
    pub augmentation: GradedMap,
    /// Period of the left tail when the differentials were seen to repeat.
    pub period: Option<usize>,
    /// Degree of the first repeated differential.
    pub seam: Option<i64>,
    /// Whether covers were minimal (local algebra).
    pub minimal: bool,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct PeriodicityCertificate {
    pub period: usize,
    pub seam: i64,
    pub ranks: Vec<usize>,
}

impl Resolution {
    pub fn certificate(&self) -> Option<PeriodicityCertificate> {
        let (period, seam) = (self.period?, self.seam?);
        let ranks = (self.complex.lo()..=0).map(|k| self.complex.dim(k)).collect();
        Some(PeriodicityCertificate { period, seam, ranks })
    }
}

/// Free cover `A^r -> M` on module generators (minimal when the algebra is local).
fn free_cover(m: &FdModule) -> (FdModule, Matrix) {
    let alg = m.algebra();
    let gens = m.generator_matrix();
    let reg = regular_module(alg);
    let r = gens.cols();
    let copies: Vec<&FdModule> = (0..r).map(|_| &reg).collect();
    let f = direct_sum_modules(alg, &copies);
    let order = alg.group().order();
    let mut cols: Vec<Vec<u32>> = Vec::with_capacity(r * order);
    for j in 0..r {
        let v = gens.col(j);
        for c in 0..order {
            cols.push(m.action(c).mul_vec(&v));
        }
    }
    (f, Matrix::from_columns(m.p(), m.dim(), &cols))
}

/// Iterated projective covers of `M`, at most `max_deg` steps. A repeated
/// differential between free terms yields an exact periodic left tail.
pub fn minimal_resolution(alg: &Arc<GroupAlgebra>, m: &FdModule, max_deg: usize) -> Result<Resolution> {
    let mc = Complex::concentrated(m, 0);
    let minimal = alg.is_local();
    if m.is_zero() || higman_section(m).is_some() {
        let p0 = Complex::concentrated(m, 0);
        let aug = GradedMap::new(&p0, &mc, 0, 0, vec![Matrix::identity(m.p(), m.dim())], Tail::Zero, Tail::Zero)?;
        return Ok(Resolution { complex: p0, augmentation: aug, period: None, seam: None, minimal });
    }
    let (f0, eps) = free_cover(m);
    // terms[j] = F_(-j), diffs[j] = d_(-j-1) : F_(-j-1) -> F_(-j)
    let mut terms = vec![f0];
    let mut diffs: Vec<Matrix> = Vec::new();
    let mut prev = eps.clone();
    let mut left = Tail::Truncated(format!("resolution cut below degree -{max_deg}"));
    let mut period = None;
    let mut seam = None;
    for step in 1..=max_deg {
        let ker = prev.kernel();
        if ker.cols() == 0 {
            left = Tail::Zero;
            break;
        }
        let src = terms.last().unwrap().clone();
        let k = submodule(&src, &ker)?;
        if !minimal && higman_section(&k).is_some() {
            terms.push(k);
            diffs.push(ker);
            left = Tail::Zero;
            break;
        }
        let (f, cover) = free_cover(&k);
        let d = ker.mul(&cover);
        terms.push(f);
        diffs.push(d.clone());
        prev = d;
        let j = diffs.len() - 1;
        let found = (1..=j).find(|&mm| diffs[j - mm] == diffs[j] && terms[j + 1 - mm] == terms[j + 1]);
        if let Some(mm) = found {
            period = Some(mm);
            seam = Some(-(step as i64));
            left = Tail::Periodic(mm);
            break;
        }
    }
    let n = terms.len();
    let lo = -(n as i64 - 1);
    let terms_asc: Vec<FdModule> = terms.into_iter().rev().collect();
    let diffs_asc: Vec<Matrix> = diffs.into_iter().rev().collect();
    let complex = Complex::new(alg, lo, terms_asc, diffs_asc, left, Tail::Zero)?;
    let augmentation = GradedMap::new(&complex, &mc, 0, 0, vec![eps], Tail::Zero, Tail::Zero)?;
    Ok(Resolution { complex, augmentation, period, seam, minimal })
}

/// `C -> 𝟙 -> U -> C[1]`; `delta` is a degree-0 map into `C[1]`.
#[derive(Clone, Debug)]
pub struct IdempotentTriangle {
    pub c: Complex,
    pub u: Complex,
    pub one: Complex,
    pub eps: GradedMap,
    pub eta: GradedMap,
    pub delta: GradedMap,
}

pub enum PairInput {
    FromCounital(Complex, GradedMap),
    FromUnital(Complex, GradedMap),
}

/// Complete a counit `C -> 𝟙` or a unit `𝟙 -> U` to an idempotent triangle.
pub fn complement_pair(input: PairInput) -> Result<IdempotentTriangle> {
    match input {
        PairInput::FromCounital(c, eps) => {
            let one = eps.target().clone();
            let cn = cone(&eps)?;
            Ok(IdempotentTriangle {
                c,
                u: cn.complex,
                one,
                eps,
                eta: cn.inclusion,
                delta: cn.projection,
            })
        }
        PairInput::FromUnital(u, eta) => {
            let one = eta.source().clone();
            let cn = cone(&eta)?;
            let c = shift(&cn.complex, -1);
            let eps = shift_map(&cn.projection, -1).retarget(&c, &one);
            let delta = cn.inclusion.retarget(&u, &cn.complex);
            Ok(IdempotentTriangle { c, u, one, eps, eta, delta })
        }
    }
}

/// The pair `(P, A)` from the minimal resolution of κ.
pub fn resolution_pair(alg: &Arc<GroupAlgebra>, max_deg: usize) -> Result<IdempotentTriangle> {
    let r = minimal_resolution(alg, &trivial_module(alg), max_deg)?;
    complement_pair(PairInput::FromCounital(r.complex, r.augmentation))
}

/// Degree-0 map `X -> Y` between complexes with equal terms, `±id` per degree.
fn sign_iso(x: &Complex, y: &Complex, sign: &dyn Fn(i64) -> bool) -> Option<GradedMap> {
    let per = crate::complex::lcm(x.period(), 4);
    let p = x.p();
    let lo = x.lo() - per as i64;
    let hi = x.hi() + per as i64;
    let comps: Vec<Matrix> = (lo..=hi)
        .map(|k| {
            let id = Matrix::identity(p, x.dim(k));
            if sign(k) {
                id.neg()
            } else {
                id
            }
        })
        .collect();
    let lt = if x.left().is_zero() { Tail::Zero } else { Tail::Periodic(per) };
    let rt = if x.right().is_zero() { Tail::Zero } else { Tail::Periodic(per) };
    GradedMap::new(x, y, 0, lo, comps, lt, rt).ok()
}

/// The dual triangle `U* -> 𝟙 -> C* -> U*[1]`.
pub fn dual_pair(t: &IdempotentTriangle) -> Result<IdempotentTriangle> {
    let c2 = dual(&t.u)?;
    let u2 = dual(&t.c)?;
    let eps = dual_map(&t.eta)?.retarget(&c2, &t.one);
    let eta = dual_map(&t.eps)?.retarget(&t.one, &u2);
    // δ* : (C[1])* -> U*, precomposed with the sign isomorphism C*[-1] ≅ (C[1])*
    let dd = dual_map(&t.delta)?;
    let src = shift(&u2, -1);
    let patterns: [&dyn Fn(i64) -> bool; 4] = [
        &|_| false,
        &|k| k.rem_euclid(2) == 1,
        &|k| k.rem_euclid(2) == 0,
        &|k| (k * (k + 1) / 2).rem_euclid(2) == 1,
    ];
    let iso = patterns
        .iter()
        .find_map(|s| sign_iso(&src, dd.source(), *s))
        .ok_or_else(|| Error::PreconditionFailed("no sign isomorphism C*[-1] -> (C[1])*".into()))?;
    let d1 = compose(&dd, &iso);
    let delta = shift_map(&d1, 1).retarget(&u2, &shift(&c2, 1));
    delta.check_chain()?;
    Ok(IdempotentTriangle { c: c2, u: u2, one: t.one.clone(), eps, eta, delta })
}

/// `T = Cone(η₂ ∘ ε₁)` together with `ν : U₁ -> T`, `θ : T -> C₁[1]` and `U₂ -> T`.
#[derive(Clone, Debug)]
pub struct TateObject {
    pub t: Complex,
    pub map: GradedMap,
    pub nu: GradedMap,
    pub theta: GradedMap,
    pub inclusion: GradedMap,
}

pub fn tate_object(pair1: &IdempotentTriangle, pair2: &IdempotentTriangle) -> Result<TateObject> {
    if pair1.one.algebra() != pair2.one.algebra() {
        return Err(Error::AlgebraMismatch);
    }
    let eta2 = pair2.eta.retarget(&pair1.one, &pair2.u);
    let g = compose(&eta2, &pair1.eps);
    let cn = cone(&g)?;
    let c1 = shift(&pair1.c, 1);
    let id = GradedMap::identity(&c1);
    let nu = block_map(&[&c1, &pair1.one], &[&c1, &pair2.u], &[vec![Some(&id), None], vec![None, Some(&eta2)]])?
        .retarget(&pair1.u, &cn.complex);
    nu.check_chain()?;
    Ok(TateObject { t: cn.complex, map: g, nu, theta: cn.projection, inclusion: cn.inclusion })
}

/// Per-degree dimensions of the four descriptions of Tate cohomology.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct TateDims {
    pub degree: i64,
    pub end_t: Option<usize>,
    pub unit_to_t: Option<usize>,
    pub t_to_unit: Option<usize>,
    pub u_to_c: Option<usize>,
}

impl TateDims {
    pub fn agree(&self) -> bool {
        let v = [self.end_t, self.unit_to_t, self.t_to_unit, self.u_to_c];
        v.iter().all(|x| x.is_some() && *x == v[0])
    }
}

pub struct TateRing {
    pub tate: TateObject,
    pub table: RingTable,
    pub dims: Vec<TateDims>,
    /// `θ ∘ id_T ∘ ν` equals the class of `δ` in `hom(U, C[1])`.
    pub unit_is_delta: bool,
    /// Whether `[δ]` is nonzero.
    pub delta_nonzero: bool,
    pub end_t: GradedHom,
}

/// Tate ring of a pair: `end(T)` for `T` built from the pair and its dual, on
/// `[lo, hi]`, with the four-way dimension table and the unit check.
pub fn tate_cohomology_ring(pair: &IdempotentTriangle, lo: i64, hi: i64, padding: usize) -> Result<TateRing> {
    let dp = dual_pair(pair)?;
    let tate = tate_object(pair, &dp)?;
    let t = &tate.t;
    let end_t = graded_hom(t, t, lo, hi, padding)?;
    let table = ring_table_from(&end_t)?;
    let one = &pair.one;
    let unit_t = graded_hom(one, t, lo, hi, padding)?;
    let t_unit = graded_hom(t, one, lo + 1, hi + 1, padding)?;
    let c1 = shift(&pair.c, 1);
    let u_c = graded_hom(&pair.u, &c1, lo, hi, padding)?;
    let dims = (lo..=hi)
        .map(|n| TateDims {
            degree: n,
            end_t: end_t.dim(n),
            unit_to_t: unit_t.dim(n),
            t_to_unit: t_unit.dim(n + 1),
            u_to_c: u_c.dim(n),
        })
        .collect();
    let (unit_is_delta, delta_nonzero) = if lo <= 0 && 0 <= hi && u_c.is_reliable(0) {
        let dcls = u_c.class_of(&pair.delta)?;
        let id = GradedMap::identity(t);
        let phi = compose(&tate.theta, &compose(&id, &tate.nu)).retarget(&pair.u, &c1);
        let pcls = u_c.class_of(&phi)?;
        (pcls == dcls, !dcls.is_zero())
    } else {
        (false, false)
    };
    Ok(TateRing { tate, table, dims, unit_is_delta, delta_nonzero, end_t })
}

/// Transport of a class in `end(T)` of degree `n` to `hom(U, C[1+n])` as a chain map.
pub fn transport(tr: &TateRing, pair: &IdempotentTriangle, f: &GradedMap) -> GradedMap {
    let theta_n = shift_map(&tr.tate.theta, f.degree());
    let g = compose(&f.as_degree_zero(), &tr.tate.nu);
    compose(&theta_n, &g).with_degree(&shift(&pair.c, 1), f.degree())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::group::{group_algebra, GroupSpec};
    use crate::homotopy::is_contractible;

    #[test]
    fn resolution_of_c2() {
        let alg = group_algebra(2, GroupSpec::Cyclic(2)).unwrap();
        let r = minimal_resolution(&alg, &trivial_module(&alg), 12).unwrap();
        assert_eq!(r.period, Some(1));
        let x = &r.complex;
        for k in -12..=0 {
            assert_eq!(x.dim(k), 2);
        }
        for k in -12..0 {
            assert_eq!(*x.diff(k), alg.right_mult(&[1, 1]));
        }
        assert_eq!(x.dim(1), 0);
    }

    #[test]
    fn resolution_of_c3_has_period_two() {
        let alg = group_algebra(3, GroupSpec::Cyclic(3)).unwrap();
        let r = minimal_resolution(&alg, &trivial_module(&alg), 12).unwrap();
        assert_eq!(r.period, Some(2));
        assert!((-10..=0).all(|k| r.complex.dim(k) == 3));
    }

    #[test]
    fn semisimple_resolution_is_trivial() {
        let alg = group_algebra(3, GroupSpec::Cyclic(2)).unwrap();
        let r = minimal_resolution(&alg, &trivial_module(&alg), 12).unwrap();
        assert!(r.complex.is_bounded());
        assert_eq!(r.complex.lo(), 0);
        let t = resolution_pair(&alg, 12).unwrap();
        assert!(is_contractible(&t.u, 4).unwrap().is_found());
    }

    #[test]
    fn pairs_and_duals() {
        let alg = group_algebra(2, GroupSpec::Cyclic(2)).unwrap();
        let t = resolution_pair(&alg, 12).unwrap();
        assert_eq!(t.u.dim(0), 1);
        assert_eq!(t.u.dim(-1), 2);
        let d = dual_pair(&t).unwrap();
        assert_eq!(d.u.dim(3), 2);
        assert_eq!(d.u.dim(-1), 0);
        let one = unit_complex(&alg);
        let triv = complement_pair(PairInput::FromUnital(one.clone(), GradedMap::identity(&one))).unwrap();
        assert!(is_contractible(&triv.c, 4).unwrap().is_found());
        let tate = tate_object(&t, &d).unwrap();
        assert!((-6..=6).all(|k| tate.t.dim(k) == 2));
    }

    #[test]
    fn tate_ring_of_c2() {
        let alg = group_algebra(2, GroupSpec::Cyclic(2)).unwrap();
        let t = resolution_pair(&alg, 12).unwrap();
        let tr = tate_cohomology_ring(&t, -3, 3, 3).unwrap();
        for d in &tr.dims {
            assert!(d.agree(), "{d:?}");
            assert_eq!(d.end_t, Some(1));
        }
        assert!(tr.unit_is_delta && tr.delta_nonzero);
        assert!(tr.table.check_unit() && tr.table.check_associative());
    }
}
