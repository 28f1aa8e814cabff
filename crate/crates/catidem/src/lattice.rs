//! Meets and joins of unital idempotents, canonical maps between them,
//! relative subquotients and the Mayer–Vietoris triangle.

use std::sync::Arc;

use crate::complex::{
    block_map, braiding, cone, cone_out, direct_sum_many, external_tensor_map, homology, materialize,
    shift, tensor_map, Complex, GradedMap, TensorMode,
};
use crate::error::{Error, Result};
use crate::group::GroupAlgebra;
use crate::hom::{graded_hom, HomComplex, DEFAULT_PADDING};
use crate::homotopy::{null_homotopy, null_homotopy_window, Certification, Search};
use crate::idempotent::{complement_pair, unit_complex, IdempotentTriangle, PairInput};
use crate::linalg::Matrix;
use crate::report::{digest_map, Check, Verdict, VerificationReport};
use crate::verify::{check_dims_agree, check_equivalence, interior};

/// Extra degrees carried below a window so that its interior is computed from true terms.
pub const WINDOW_EXTRA: i64 = 12;

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum LatticeOp {
    Meet,
    Join,
}

/// A unital idempotent `𝟙 -> U` (possibly only a window model of one).
#[derive(Clone, Debug)]
pub struct Unital {
    pub u: Complex,
    pub eta: GradedMap,
}

impl Unital {
    pub fn of(t: &IdempotentTriangle) -> Unital {
        Unital { u: t.u.clone(), eta: t.eta.clone() }
    }
    pub fn one(&self) -> &Complex {
        self.eta.source()
    }
}

fn tensor_map_auto(f: &GradedMap, g: &GradedMap, w: (i64, i64)) -> Result<GradedMap> {
    match tensor_map(f, g, TensorMode::Sum, None) {
        Ok(t) => Ok(t),
        Err(Error::WindowRequired(_)) => tensor_map(f, g, TensorMode::Sum, Some(w)),
        Err(e) => Err(e),
    }
}

/// The braiding `U1 ⊗ U2 -> U2 ⊗ U1` is a chain isomorphism on the window.
pub fn commutation(u1: &Complex, u2: &Complex, w: (i64, i64)) -> Check {
    let name = "commutation";
    let b = match braiding(u1, u2, None).or_else(|_| braiding(u1, u2, Some(w))) {
        Ok(b) => b,
        Err(e) => return Check::new(name, Verdict::inconclusive(e.to_string()), "braiding"),
    };
    if let Err(e) = b.check_chain() {
        return Check::new(name, Verdict::fail(e.to_string()), "braiding");
    }
    let (lo, hi) = b.check_range();
    for i in lo..=hi {
        if b.known(i) && b.component(i).inverse().is_none() {
            return Check::new(name, Verdict::fail(format!("braiding not invertible in degree {i}")), "braiding");
        }
    }
    let v = if b.source().has_truncation() { Verdict::PassWindow { lo: w.0, hi: w.1 } } else { Verdict::Pass };
    Check::new(name, v, "braiding isomorphism").with_digest(digest_map(&b))
}

/// `U1 ∧ U2 = U1 ⊗ U2` and `U1 ∨ U2`, the complement of `C1 ⊗ C2`; window
/// models on `w` when the products are not exactly representable.
pub fn meet_join(t1: &IdempotentTriangle, t2: &IdempotentTriangle, op: LatticeOp, w: (i64, i64)) -> Result<Unital> {
    if !commutation(&t1.u, &t2.u, w).verdict.is_pass() {
        return Err(Error::CommutationUnverified);
    }
    let one = &t1.one;
    match op {
        LatticeOp::Meet => {
            let eta = tensor_map_auto(&t1.eta, &t2.eta, w)?;
            let u = eta.target().clone();
            Ok(Unital { eta: eta.retarget(one, &u), u })
        }
        LatticeOp::Join => {
            let eps = tensor_map_auto(&t1.eps, &t2.eps, w)?;
            let c = eps.source().clone();
            let cn = cone(&eps.retarget(&c, one))?;
            Ok(Unital { eta: cn.inclusion.retarget(one, &cn.complex), u: cn.complex })
        }
    }
}

/// A pair over one factor pulled back to `G × H` (or `H × G` when `first` is false)
/// by external product with the unit of the other factor.
pub fn inflate_pair(t: &IdempotentTriangle, other: &Arc<GroupAlgebra>, target: &Arc<GroupAlgebra>, first: bool) -> Result<IdempotentTriangle> {
    let k = unit_complex(other);
    let idk = GradedMap::identity(&k);
    let eps = if first {
        external_tensor_map(&t.eps, &idk, target, None)?
    } else {
        external_tensor_map(&idk, &t.eps, target, None)?
    };
    let one = unit_complex(target);
    let c = eps.source().clone();
    complement_pair(PairInput::FromCounital(c.clone(), eps.retarget(&c, &one)))
}

/// The canonical map `ν : V -> U` with `ν η_V ≃ η_U`.
#[derive(Clone, Debug)]
pub struct CanonicalMap {
    pub nu: GradedMap,
    /// Where existence and uniqueness hold: everywhere, or on a window interior.
    pub cert: Certification,
    pub method: String,
}

fn exact_canonical(v: &Unital, u: &Unital) -> Option<Result<CanonicalMap>> {
    if v.u.has_truncation() || u.u.has_truncation() {
        return None;
    }
    let hv = graded_hom(&v.u, &u.u, 0, 0, DEFAULT_PADDING).ok()?;
    let hk = graded_hom(v.one(), &u.u, 0, 0, DEFAULT_PADDING).ok()?;
    let reps = hv.reps(0).ok()?;
    let p = v.u.p();
    let mut cols = Vec::with_capacity(reps.len());
    for r in reps {
        cols.push(hk.class_of(&crate::complex::compose(r, &v.eta)).ok()?.coords);
    }
    let target = hk.class_of(&u.eta).ok()?.coords;
    let m = Matrix::from_columns(p, target.len(), &cols);
    let sol = match m.solve(&target) {
        Ok(s) => s,
        Err(_) => return Some(Err(Error::NoSolutionOnWindow)),
    };
    if sol.kernel.cols() > 0 {
        return Some(Err(Error::NonUniqueOnWindow));
    }
    let class = crate::hom::HomClass { degree: 0, coords: sol.x0 };
    let nu = hv.rep(&class).ok()?;
    let method = if hv.model().is_cut() { "class equation, stable at two paddings" } else { "class equation" };
    Some(Ok(CanonicalMap { nu, cert: Certification::Exact, method: method.into() }))
}

fn lowest_known(x: &Complex, want: i64) -> i64 {
    if x.left().is_truncated() {
        want.max(x.lo())
    } else {
        want
    }
}

fn highest_known(x: &Complex, want: i64) -> i64 {
    if x.right().is_truncated() {
        want.min(x.hi())
    } else {
        want
    }
}

/// Solve `ν η_V - η_U = δ h` on stupid truncations of `V` and `U`; every
/// further solution must be null-homotopic on the interior `w`.
fn window_canonical(v: &Unital, u: &Unital, w: (i64, i64)) -> Result<CanonicalMap> {
    let (a, b) = w;
    let r0 = lowest_known(&u.u, lowest_known(&v.u, a - WINDOW_EXTRA));
    let r1 = highest_known(&u.u, highest_known(&v.u, b + WINDOW_EXTRA));
    if r0 > a - 2 || r1 < b + 2 {
        return Err(Error::OutOfValidityRange { degree: if r0 > a - 2 { a } else { b } });
    }
    let vm = materialize(&v.u, r0, r1)?;
    let um = materialize(&u.u, r0, r1)?;
    let one = v.one().clone();
    let hv = HomComplex::new(&vm, &um, -1, 0, None)?;
    let hk = HomComplex::new(&one, &um, -1, 0, None)?;
    let p = vm.p();
    let (n0, m1, k0) = (hv.dim(0), hk.dim(-1), hk.dim(0));
    let eta_v = v.eta.retarget(&one, &vm);
    let eta_u = u.eta.retarget(&one, &um);
    // rows: δν = 0, then ν η_V - δh = η_U
    let dv = hv.delta(0).cloned().unwrap_or_else(|| Matrix::zeros(p, hv.dim(1), n0));
    let dk = hk.delta(-1).cloned().unwrap_or_else(|| Matrix::zeros(p, k0, m1));
    let mut sys = Matrix::zeros(p, dv.rows() + k0, n0 + m1);
    sys.set_block(0, 0, &dv);
    for j in 0..n0 {
        let mut e = vec![0u32; n0];
        e[j] = 1;
        let f = crate::complex::compose(&hv.element(0, &e), &eta_v);
        let c = hk.coordinates(&f)?;
        for (r, x) in c.into_iter().enumerate() {
            sys.set(dv.rows() + r, j, x);
        }
    }
    sys.set_block(dv.rows(), n0, &dk.neg());
    let mut rhs = vec![0u32; dv.rows()];
    rhs.extend(hk.coordinates(&eta_u)?);
    let sol = sys.solve(&rhs).map_err(|_| Error::NoSolutionOnWindow)?;
    let nu_m = hv.element(0, &sol.x0[..n0]);
    // kernel modulo model boundaries, then interior null-homotopies
    let bnd = hv.delta(-1).cloned().unwrap_or_else(|| Matrix::zeros(p, n0, 0));
    let kn = sol.kernel.block(0, n0, 0, sol.kernel.cols());
    let base = bnd.rank();
    let mut acc = bnd.clone();
    let (ia, ib) = (a.max(r0 + 2), b.min(r1 - 2));
    for c in 0..kn.cols() {
        let next = acc.hstack(&kn.select_cols(&[c]));
        if next.rank() == acc.rank() {
            continue;
        }
        acc = next;
        let k = hv.element(0, &kn.col(c));
        match null_homotopy_window(&k, ia, ib)? {
            Search::Found(_) => {}
            _ => return Err(Error::NonUniqueOnWindow),
        }
    }
    let extra = acc.rank() - base;
    let (lo, hi) = (ia, ib);
    let nu = nu_m.retarget(&v.u, &u.u).window_open_sides(r0, r1);
    Ok(CanonicalMap {
        nu,
        cert: Certification::WindowInterior { lo, hi },
        method: format!("window solve on [{r0}, {r1}], {extra} spurious classes null-homotopic on [{lo}, {hi}]"),
    })
}

/// `ν : V -> U` for `U ≤ V`: exact class equation when both are exactly
/// representable, otherwise a window solve with a uniqueness certificate.
pub fn canonical_map(v: &Unital, u: &Unital, w: (i64, i64)) -> Result<CanonicalMap> {
    if let Some(r) = exact_canonical(v, u) {
        return r;
    }
    window_canonical(v, u, w)
}

/// `D(V, U) = Cone(ν)[-1]`.
pub fn relative_subquotient(v: &Unital, u: &Unital, w: (i64, i64)) -> Result<(Complex, CanonicalMap)> {
    let nu = canonical_map(v, u, w)?;
    let c = cone(&nu.nu)?;
    Ok((shift(&c.complex, -1), nu))
}

/// `D(V, U) ≃ V ⊗ Uᶜ`, compared through `hom(𝟙, -)` dimensions on the window.
pub fn check_subquotient(v: &Unital, tu: &IdempotentTriangle, w: (i64, i64)) -> Check {
    let name = "D(V,U) = V⊗Uᶜ";
    let (d, _) = match relative_subquotient(v, &Unital::of(tu), w) {
        Ok(x) => x,
        Err(e) => return Check::new(name, Verdict::inconclusive(e.to_string()), "canonical map"),
    };
    let vc = match tensor_map_auto(&GradedMap::identity(&v.u), &tu.eps, (w.0 - 2 * WINDOW_EXTRA, w.1 + 2 * WINDOW_EXTRA)) {
        Ok(m) => m.source().clone(),
        Err(e) => return Check::new(name, Verdict::inconclusive(e.to_string()), "tensor"),
    };
    let one = v.one().clone();
    check_dims_agree(name, (&one, &d), (&one, &vc), w)
}

fn cert_verdict(c: &Certification) -> Verdict {
    match c {
        Certification::Exact => Verdict::Pass,
        Certification::WindowInterior { lo, hi } => Verdict::PassWindow { lo: *lo, hi: *hi },
    }
}

fn canonical_check(name: &str, v: &Unital, u: &Unital, w: (i64, i64)) -> (Check, Option<GradedMap>) {
    match canonical_map(v, u, w) {
        Ok(c) => (Check::new(name, cert_verdict(&c.cert), c.method.clone()).with_digest(digest_map(&c.nu)), Some(c.nu)),
        Err(Error::NoSolutionOnWindow) => (Check::new(name, Verdict::fail("no solution on window"), "window solve"), None),
        Err(Error::NonUniqueOnWindow) => (Check::new(name, Verdict::fail("not unique on window"), "window solve"), None),
        Err(e) => (Check::new(name, Verdict::inconclusive(e.to_string()), "canonical map"), None),
    }
}

/// Homology of two complexes agrees degreewise on `w` (reliable degrees only).
pub fn check_homology_agrees(name: &str, x: &Complex, y: &Complex, w: (i64, i64)) -> Check {
    let (hx, hy) = (homology(x, w.0, w.1), homology(y, w.0, w.1));
    for (a, b) in hx.iter().zip(&hy) {
        if a.reliable && b.reliable && a.dim != b.dim {
            return Check::new(name, Verdict::fail(format!("degree {}: {} vs {}", a.degree, a.dim, b.dim)), "homology");
        }
    }
    let all = hx.iter().chain(&hy).all(|h| h.reliable);
    let v = if !all {
        Verdict::inconclusive("unreliable degrees in window")
    } else if x.has_truncation() || y.has_truncation() {
        Verdict::PassWindow { lo: w.0, hi: w.1 }
    } else {
        Verdict::Pass
    };
    Check::new(name, v, "homology")
}

/// The triangle `U ∨ V -> U ⊕ V -> U ∧ V`: canonical maps, the composite
/// null-homotopy, and `Cone(U ∨ V -> U ⊕ V) ≃ U ∧ V` with an explicit map.
pub fn mayer_vietoris_check(tu: &IdempotentTriangle, tv: &IdempotentTriangle, w: (i64, i64), budget: usize) -> VerificationReport {
    let mut rep = VerificationReport::new("mayer-vietoris", w, budget);
    let ww = (w.0 - 2 * WINDOW_EXTRA, w.1 + 2 * WINDOW_EXTRA);
    let comm = commutation(&tu.u, &tv.u, ww);
    let ok = comm.verdict.is_pass();
    rep.push(comm);
    if !ok {
        return rep;
    }
    let (u, v) = (Unital::of(tu), Unital::of(tv));
    let (meet, join) = match (meet_join(tu, tv, LatticeOp::Meet, ww), meet_join(tu, tv, LatticeOp::Join, ww)) {
        (Ok(m), Ok(j)) => (m, j),
        (Err(e), _) | (_, Err(e)) => {
            rep.push(Check::new("lattice objects", Verdict::inconclusive(e.to_string()), "meet/join"));
            return rep;
        }
    };
    let (c1, nu_u) = canonical_check("canonical U∨V -> U", &join, &u, w);
    let (c2, nu_v) = canonical_check("canonical U∨V -> V", &join, &v, w);
    let (c3, mu_u) = canonical_check("canonical U -> U∧V", &u, &meet, w);
    let (c4, mu_v) = canonical_check("canonical V -> U∧V", &v, &meet, w);
    for c in [c1, c2, c3, c4] {
        rep.push(c);
    }
    let (Some(nu_u), Some(nu_v), Some(mu_u), Some(mu_v)) = (nu_u, nu_v, mu_u, mu_v) else {
        return rep;
    };
    let built = (|| -> Result<(GradedMap, GradedMap)> {
        let f = block_map(&[&join.u], &[&u.u, &v.u], &[vec![Some(&nu_u)], vec![Some(&nu_v)]])?;
        let neg = mu_v.neg();
        let g = block_map(&[&u.u, &v.u], &[&meet.u], &[vec![Some(&mu_u), Some(&neg)]])?;
        let s = direct_sum_many(&[&u.u, &v.u])?;
        Ok((f.retarget(&join.u, &s), g.retarget(&s, &meet.u)))
    })();
    let (f, g) = match built {
        Ok(x) => x,
        Err(e) => {
            rep.push(Check::new("triangle maps", Verdict::inconclusive(e.to_string()), "block maps"));
            return rep;
        }
    };
    let gf = crate::complex::compose(&g, &f);
    let exact = !gf.source().has_truncation() && !gf.target().has_truncation() && !f.left().is_truncated();
    let h = if exact {
        match null_homotopy(&gf, budget) {
            Ok(Search::Found(h)) => Some(h),
            _ => None,
        }
    } else {
        None
    };
    let h = h.or_else(|| {
        let (s, t) = (interior(gf.source()), interior(gf.target()));
        let lo = s.0.max(t.0 + 1).max(w.0 - WINDOW_EXTRA / 2);
        let hi = s.1.min(t.1 + 1).min(w.1 + WINDOW_EXTRA / 2);
        match null_homotopy_window(&gf, lo, hi) {
            Ok(Search::Found(mut h)) => {
                h.h = h.h.window_open_sides(h.h.lo(), h.h.hi());
                Some(h)
            }
            _ => None,
        }
    });
    let Some(h) = h else {
        rep.push(Check::new("composite null-homotopic", Verdict::fail("no homotopy for g∘f"), "window solve"));
        return rep;
    };
    rep.push(Check::new("composite null-homotopic", cert_verdict(&h.cert), "homotopy solve").with_digest(digest_map(&h.h)));
    let cf = match cone(&f) {
        Ok(c) => c,
        Err(e) => {
            rep.push(Check::new("equivalence", Verdict::inconclusive(e.to_string()), "cone"));
            return rep;
        }
    };
    match cone_out(&cf, &f, &g, &h.h) {
        Ok(phi) => {
            let ex = if h.cert == Certification::Exact { Some(&phi) } else { None };
            let wn = if ex.is_none() { Some((&phi, true)) } else { None };
            rep.push(check_equivalence("equivalence Cone(f) -> U∧V", ex, Vec::new(), wn, budget));
        }
        Err(e) => rep.push(Check::new("equivalence Cone(f) -> U∧V", Verdict::inconclusive(e.to_string()), "cone map")),
    }
    rep.push(check_dims_agree("hom(1,-) dims", (&u.one().clone(), &cf.complex), (&u.one().clone(), &meet.u), w));
    rep.push(check_homology_agrees("homology", &cf.complex, &meet.u, w));
    rep
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::group::{group_algebra, product_algebra, GroupSpec};
    use crate::idempotent::resolution_pair;

    fn c2() -> Arc<GroupAlgebra> {
        group_algebra(2, GroupSpec::Cyclic(2)).unwrap()
    }

    fn trivial_unital(alg: &Arc<GroupAlgebra>) -> IdempotentTriangle {
        let one = unit_complex(alg);
        complement_pair(PairInput::FromUnital(one.clone(), GradedMap::identity(&one))).unwrap()
    }

    #[test]
    fn canonical_map_from_unit_is_eta() {
        let alg = c2();
        let t = resolution_pair(&alg, 12).unwrap();
        let one = trivial_unital(&alg);
        let nu = canonical_map(&Unital::of(&one), &Unital::of(&t), (-4, 0)).unwrap();
        assert_eq!(nu.cert, Certification::Exact);
        let d = nu.nu.sub(&t.eta.retarget(nu.nu.source(), nu.nu.target()));
        assert!(matches!(null_homotopy(&d, 4).unwrap(), Search::Found(_)));
    }

    #[test]
    fn canonical_self_map_is_identity() {
        let alg = c2();
        let t = resolution_pair(&alg, 12).unwrap();
        let nu = canonical_map(&Unital::of(&t), &Unital::of(&t), (-4, 0)).unwrap();
        let d = nu.nu.sub(&GradedMap::identity(&t.u));
        assert!(matches!(null_homotopy(&d, 4).unwrap(), Search::Found(_)));
    }

    #[test]
    fn mayer_vietoris_with_unit() {
        let alg = c2();
        let t = resolution_pair(&alg, 12).unwrap();
        let one = trivial_unital(&alg);
        let r = mayer_vietoris_check(&t, &one, (-4, 0), 4);
        println!("{}", r.to_text());
        assert!(r.all_pass(), "{}", r.to_text());
    }

    #[test]
    fn mayer_vietoris_self() {
        let alg = c2();
        let t = resolution_pair(&alg, 12).unwrap();
        let r = mayer_vietoris_check(&t, &t, (-4, 0), 4);
        println!("{}", r.to_text());
        assert!(r.all_pass(), "{}", r.to_text());
    }

    #[test]
    fn mayer_vietoris_square() {
        let a = c2();
        let g = product_algebra(&a, &a).unwrap();
        let t = resolution_pair(&a, 12).unwrap();
        let t1 = inflate_pair(&t, &a, &g, true).unwrap();
        let t2 = inflate_pair(&t, &a, &g, false).unwrap();
        let r = mayer_vietoris_check(&t1, &t2, (-6, 0), 4);
        println!("{}", r.to_text());
        assert!(r.all_pass(), "{}", r.to_text());
    }

    #[test]
    fn subquotients_of_the_resolution_pair() {
        let alg = c2();
        let t = resolution_pair(&alg, 12).unwrap();
        let one = Unital::of(&trivial_unital(&alg));
        let c = check_subquotient(&one, &t, (-6, 2));
        assert!(c.verdict.is_pass(), "{c:?}");
        let (d, _) = relative_subquotient(&one, &Unital::of(&t), (-6, 2)).unwrap();
        let h1 = graded_hom(one.one(), &d, -6, 2, 4).unwrap();
        let h2 = graded_hom(one.one(), &t.c, -6, 2, 4).unwrap();
        assert_eq!(h1.degrees(), h2.degrees());
        let z = Complex::zero(&alg);
        let zero = Unital { eta: GradedMap::zero(one.one(), &z, 0), u: z };
        let (d, nu) = relative_subquotient(&Unital::of(&t), &zero, (-6, 2)).unwrap();
        assert_eq!(nu.cert, Certification::Exact);
        let h1 = graded_hom(one.one(), &d, -6, 2, 4).unwrap();
        let h2 = graded_hom(one.one(), &t.u, -6, 2, 4).unwrap();
        assert_eq!(h1.degrees(), h2.degrees());
    }
}
