//! Tiered certification of vanishing and equivalence statements, and the
//! verification suite for an idempotent triangle.

use crate::complex::{cone, materialize, shift, tensor, tensor_map, window_approx, Complex, GradedMap, TensorMode};
use crate::error::Error;
use crate::hom::{graded_hom, GradedHom, DEFAULT_PADDING};
use crate::homotopy::{
    contract_projective_acyclic, is_contractible, is_contractible_window, null_homotopy, null_homotopy_window,
    Certification, Search,
};
use crate::idempotent::IdempotentTriangle;
use crate::report::{digest_map, Check, Verdict, VerificationReport};

/// Candidate models of one complex, strongest first.
#[derive(Default)]
pub struct Candidates {
    /// The complex itself, when it is exactly representable.
    pub exact: Option<Complex>,
    /// Exact complexes that agree with the target on the given degree range.
    pub truncated: Vec<(Complex, (i64, i64), String)>,
    /// A window model; `sound` when its known terms are those of the target,
    /// so that a window obstruction is a genuine failure.
    pub window: Option<(Complex, bool)>,
}

/// Interior of a window model: `margin` away from truncated sides.
pub fn interior(x: &Complex) -> (i64, i64) {
    let m = 2 * x.window_period() as i64;
    let lo = if x.left().is_truncated() { x.lo() + m } else { x.lo() };
    let hi = if x.right().is_truncated() { x.hi() - m } else { x.hi() };
    (lo, hi)
}

/// Contractibility through the tiers: exact solve or periodic ansatz, then
/// exact truncated-operand models, then window models (projective contraction
/// first, general window solve second).
pub fn tiered_contractible(name: &str, c: Candidates, budget: usize) -> Check {
    let mut notes = Vec::new();
    if let Some(x) = &c.exact {
        match is_contractible(x, budget) {
            Ok(Search::Found(h)) => {
                let how = if x.is_bounded() { "exact solve" } else { "periodic ansatz" };
                return Check::new(name, Verdict::Pass, how).with_digest(digest_map(&h.h));
            }
            Ok(Search::CertifiedNo(w)) => return Check::new(name, Verdict::fail(w), "exact solve"),
            Ok(Search::Inconclusive(r)) => notes.push(r),
            Err(e) => notes.push(e.to_string()),
        }
        match contract_projective_acyclic(x, budget) {
            Ok(h) if h.cert == Certification::Exact => {
                return Check::new(name, Verdict::Pass, "projective contraction").with_digest(digest_map(&h.h))
            }
            Ok(_) => {}
            Err(e) => notes.push(e.to_string()),
        }
    }
    for (x, (lo, hi), how) in &c.truncated {
        match is_contractible(x, budget) {
            Ok(Search::Found(h)) => {
                return Check::new(name, Verdict::PassWindow { lo: *lo, hi: *hi }, format!("periodic ansatz on {how}"))
                    .with_digest(digest_map(&h.h))
            }
            Ok(Search::CertifiedNo(w)) => notes.push(format!("{how}: {w}")),
            Ok(Search::Inconclusive(r)) => notes.push(format!("{how}: {r}")),
            Err(e) => notes.push(e.to_string()),
        }
    }
    if let Some((x, sound)) = &c.window {
        if let Ok(h) = contract_projective_acyclic(x, budget) {
            if let Certification::WindowInterior { lo, hi } = h.cert {
                if lo <= hi {
                    return Check::new(name, Verdict::PassWindow { lo, hi }, "projective contraction on window")
                        .with_digest(digest_map(&h.h));
                }
            }
        }
        let (lo, hi) = interior(x);
        if lo <= hi {
            match is_contractible_window(x, lo, hi) {
                Ok(Search::Found(h)) => {
                    return Check::new(name, Verdict::PassWindow { lo, hi }, "window solve").with_digest(digest_map(&h.h))
                }
                Ok(Search::CertifiedNo(w)) if *sound => return Check::new(name, Verdict::fail(w), "window solve"),
                Ok(Search::CertifiedNo(w)) => notes.push(format!("model only: {w}")),
                Ok(Search::Inconclusive(r)) => notes.push(r),
                Err(e) => notes.push(e.to_string()),
            }
        } else {
            notes.push("window interior is empty".into());
        }
    }
    let mut ch = Check::new(name, Verdict::inconclusive(notes.join("; ")), "all tiers");
    if notes.is_empty() {
        ch.verdict = Verdict::inconclusive("no model available");
    }
    ch
}

/// Range `[lo, hi]` of an operand cut to the window on its infinite sides.
fn cut_range(z: &Complex, a: i64, b: i64) -> (i64, i64) {
    let lo = if z.left().is_zero() { z.lo() } else { a };
    let hi = if z.right().is_zero() { z.hi() } else { b };
    (lo, hi)
}

/// Candidate models of `X ⊗ Y` for the window `[a, b]`.
pub fn tensor_candidates(x: &Complex, y: &Complex, a: i64, b: i64) -> Candidates {
    let mut c = Candidates::default();
    match tensor(x, y, TensorMode::Sum, None) {
        Ok(t) => {
            if t.has_truncation() {
                c.window = Some((t, true));
            } else {
                c.exact = Some(t);
            }
            return c;
        }
        Err(Error::WindowRequired(_)) => {
            // same-side growth: cut one operand, the other stays exact
            for cut_y in [true, false] {
                let z = if cut_y { y } else { x };
                let (lo, hi) = cut_range(z, a, b);
                let Ok(zc) = materialize(z, lo, hi) else { continue };
                let t = if cut_y { tensor(x, &zc, TensorMode::Sum, None) } else { tensor(&zc, y, TensorMode::Sum, None) };
                let Ok(t) = t else { continue };
                let other = if cut_y { x } else { y };
                // degrees where no pair with the cut-away part contributes
                let range = if !z.left().is_zero() {
                    (lo + other.hi() + 1, t.hi())
                } else {
                    (t.lo(), hi + other.lo() - 1)
                };
                if range.0 <= range.1 && !t.has_truncation() {
                    let what = if cut_y { "right operand" } else { "left operand" };
                    c.truncated.push((t, range, format!("{what} cut to [{lo}, {hi}]")));
                }
            }
            if let Ok(t) = tensor(x, y, TensorMode::Sum, Some((a, b))) {
                c.window = Some((t, true));
            }
        }
        Err(Error::InfiniteRank { .. }) => {
            for cut_y in [true, false] {
                let z = if cut_y { y } else { x };
                let (lo, hi) = cut_range(z, a, b);
                let Ok(zc) = materialize(z, lo, hi) else { continue };
                let t = if cut_y { tensor(x, &zc, TensorMode::Sum, None) } else { tensor(&zc, y, TensorMode::Sum, None) };
                let Ok(t) = t else { continue };
                if !t.has_truncation() {
                    let what = if cut_y { "right operand" } else { "left operand" };
                    c.truncated.push((t, (a, b), format!("{what} cut to [{lo}, {hi}]")));
                }
            }
            let xm = cut_range(x, a, b);
            let ym = cut_range(y, a, b);
            if let (Ok(xc), Ok(yc)) = (materialize(x, xm.0, xm.1), materialize(y, ym.0, ym.1)) {
                if let Ok(t) = tensor(&xc, &yc, TensorMode::Sum, None) {
                    if let Ok(w) = window_approx(&t, a, b) {
                        c.window = Some((w, false));
                    }
                }
            }
        }
        Err(_) => {}
    }
    c
}

/// `X ⊗ Y ≃ 0`, certified at the strongest available tier.
pub fn check_tensor_vanishing(name: &str, x: &Complex, y: &Complex, window: (i64, i64), budget: usize) -> Check {
    tiered_contractible(name, tensor_candidates(x, y, window.0, window.1), budget)
}

/// A chain map is an equivalence, certified through its cone.
pub fn check_equivalence(name: &str, exact: Option<&GradedMap>, truncated: Vec<(GradedMap, (i64, i64), String)>, window: Option<(&GradedMap, bool)>, budget: usize) -> Check {
    let mut c = Candidates::default();
    if let Some(f) = exact {
        if let Ok(cn) = cone(f) {
            c.exact = Some(cn.complex);
        }
    }
    for (f, r, how) in truncated {
        if let Ok(cn) = cone(&f) {
            c.truncated.push((cn.complex, r, how));
        }
    }
    if let Some((f, sound)) = window {
        if let Ok(cn) = cone(f) {
            c.window = Some((cn.complex, sound));
        }
    }
    tiered_contractible(name, c, budget)
}

fn hom_or_note(x: &Complex, y: &Complex, a: i64, b: i64) -> Result<GradedHom, String> {
    let pad = DEFAULT_PADDING.max((b - a) as usize / 2);
    graded_hom(x, y, a, b, pad).map_err(|e| e.to_string())
}

/// `hom(X, Y[n]) = 0` for `n` in the window.
pub fn check_hom_vanishing(name: &str, x: &Complex, y: &Complex, window: (i64, i64)) -> Check {
    let (a, b) = window;
    let h = match hom_or_note(x, y, a, b) {
        Ok(h) => h,
        Err(e) => return Check::new(name, Verdict::inconclusive(e), "graded hom"),
    };
    for d in h.degrees() {
        if d.reliable && d.dim > 0 {
            return Check::new(name, Verdict::fail(format!("hom in degree {} has dimension {}", d.degree, d.dim)), "graded hom");
        }
    }
    let unreliable: Vec<i64> = h.degrees().iter().filter(|d| !d.reliable).map(|d| d.degree).collect();
    if !unreliable.is_empty() {
        return Check::new(name, Verdict::inconclusive(format!("unstable degrees {unreliable:?}")), "graded hom");
    }
    let v = if h.model().is_cut() || h.model().is_windowed() { Verdict::PassWindow { lo: a, hi: b } } else { Verdict::Pass };
    Check::new(name, v, "graded hom")
}

/// Per-degree dimensions of two graded homs agree on the window.
pub fn check_dims_agree(name: &str, l: (&Complex, &Complex), r: (&Complex, &Complex), window: (i64, i64)) -> Check {
    let (a, b) = window;
    let (h1, h2) = match (hom_or_note(l.0, l.1, a, b), hom_or_note(r.0, r.1, a, b)) {
        (Ok(x), Ok(y)) => (x, y),
        (Err(e), _) | (_, Err(e)) => return Check::new(name, Verdict::inconclusive(e), "graded hom"),
    };
    let mut compared = 0;
    for n in a..=b {
        if let (Some(x), Some(y)) = (h1.dim(n), h2.dim(n)) {
            compared += 1;
            if x != y {
                return Check::new(name, Verdict::fail(format!("degree {n}: {x} vs {y}")), "graded hom");
            }
        }
    }
    if compared < (b - a + 1) {
        return Check::new(name, Verdict::inconclusive(format!("only {compared} stable degrees")), "graded hom");
    }
    let v = if [&h1, &h2].iter().any(|h| h.model().is_cut() || h.model().is_windowed()) { Verdict::PassWindow { lo: a, hi: b } } else { Verdict::Pass };
    Check::new(name, v, "graded hom")
}

/// `f ≃ 0`: exact solve when representable, else on the window interior.
pub fn check_null_homotopic(name: &str, exact: Option<&GradedMap>, window: Option<&GradedMap>, budget: usize) -> Check {
    if let Some(f) = exact {
        match null_homotopy(f, budget) {
            Ok(Search::Found(h)) => return Check::new(name, Verdict::Pass, "exact solve").with_digest(digest_map(&h.h)),
            Ok(Search::CertifiedNo(w)) => return Check::new(name, Verdict::fail(w), "exact solve"),
            _ => {}
        }
    }
    if let Some(f) = window {
        let (s, t) = (interior(f.source()), interior(f.target()));
        let n = f.degree() - 1;
        let lo = s.0.max(t.0 - n).max(f.source().lo()) + 1;
        let hi = s.1.min(t.1 - n - 1);
        if lo <= hi {
            match null_homotopy_window(f, lo, hi) {
                Ok(Search::Found(h)) => {
                    return Check::new(name, Verdict::PassWindow { lo, hi }, "window solve").with_digest(digest_map(&h.h))
                }
                Ok(Search::CertifiedNo(w)) => return Check::new(name, Verdict::fail(w), "window solve"),
                Ok(Search::Inconclusive(r)) => return Check::new(name, Verdict::inconclusive(r), "window solve"),
                Err(e) => return Check::new(name, Verdict::inconclusive(e.to_string()), "window solve"),
            }
        }
    }
    Check::new(name, Verdict::inconclusive("no usable model"), "all tiers")
}

/// The checks of an idempotent triangle on the window, each with its own verdict:
/// orthogonality, absorption, semi-orthogonality, the end-ring dimension
/// identities and the two units on `U ⊗ U`.
pub fn verify_pair(t: &IdempotentTriangle, window: (i64, i64), budget: usize) -> VerificationReport {
    let (a, b) = window;
    let mut rep = VerificationReport::new("idempotent pair", window, budget);
    rep.push(check_tensor_vanishing("orthogonality C⊗U", &t.c, &t.u, window, budget));
    rep.push(check_tensor_vanishing("orthogonality U⊗C", &t.u, &t.c, window, budget));

    // ε ⊗ id_C : C ⊗ C -> 𝟙 ⊗ C
    let idc = GradedMap::identity(&t.c);
    let exact = tensor_map(&t.eps, &idc, TensorMode::Sum, None).ok();
    let mut truncated = Vec::new();
    if exact.is_none() {
        let (lo, hi) = cut_range(&t.c, a, b);
        if let Ok(cc) = materialize(&t.c, lo, hi) {
            if let Ok(f) = tensor_map(&t.eps, &GradedMap::identity(&cc), TensorMode::Sum, None) {
                let r = if t.c.left().is_zero() { (f.source().lo(), hi + t.c.lo() - 1) } else { (lo + t.c.hi() + 1, f.source().hi()) };
                if r.0 <= r.1 {
                    truncated.push((f, r, format!("right operand cut to [{lo}, {hi}]")));
                }
            }
        }
    }
    let win = tensor_map(&t.eps, &idc, TensorMode::Sum, Some(window)).ok();
    rep.push(check_equivalence("absorption ε⊗C", exact.as_ref(), truncated, win.as_ref().map(|f| (f, true)), budget));

    // id_U ⊗ η : U ⊗ 𝟙 -> U ⊗ U
    let idu = GradedMap::identity(&t.u);
    let exact = tensor_map(&idu, &t.eta, TensorMode::Sum, None).ok();
    let win = tensor_map(&idu, &t.eta, TensorMode::Sum, Some(window)).ok();
    rep.push(check_equivalence("absorption U⊗η", exact.as_ref(), Vec::new(), win.as_ref().map(|f| (f, true)), budget));

    rep.push(check_hom_vanishing("semi-orthogonality hom(C,U)", &t.c, &t.u, window));
    rep.push(check_dims_agree("end(U) = hom(1,U)", (&t.u, &t.u), (&t.one, &t.u), window));
    rep.push(check_dims_agree("end(C) = hom(C,1)", (&t.c, &t.c), (&t.c, &t.one), window));

    // η ⊗ U and U ⊗ η agree as maps U -> U ⊗ U
    let diff = |w: Option<(i64, i64)>| -> Option<GradedMap> {
        let l = tensor_map(&t.eta, &idu, TensorMode::Sum, w).ok()?;
        let r = tensor_map(&idu, &t.eta, TensorMode::Sum, w).ok()?;
        let r = r.retarget(l.source(), l.target());
        Some(l.sub(&r))
    };
    let ex = diff(None);
    let wn = if ex.is_none() { diff(Some(window)) } else { None };
    rep.push(check_null_homotopic("units η⊗U ≃ U⊗η", ex.as_ref(), wn.as_ref(), budget));
    rep
}

/// `hom(U, C[1])` contains the nonzero class of the connecting map.
pub fn check_connecting_class(name: &str, t: &IdempotentTriangle) -> Check {
    let c1 = shift(&t.c, 1);
    let h = match graded_hom(&t.u, &c1, 0, 0, DEFAULT_PADDING) {
        Ok(h) => h,
        Err(e) => return Check::new(name, Verdict::inconclusive(e.to_string()), "graded hom"),
    };
    match h.class_of(&t.delta) {
        Ok(c) if !c.is_zero() => {
            let v = if h.model().is_cut() || h.model().is_windowed() { Verdict::PassWindow { lo: 0, hi: 0 } } else { Verdict::Pass };
            Check::new(name, v, "graded hom")
        }
        Ok(_) => Check::new(name, Verdict::fail("class of δ is zero"), "graded hom"),
        Err(e) => Check::new(name, Verdict::inconclusive(e.to_string()), "graded hom"),
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::group::{group_algebra, GroupSpec};
    use crate::idempotent::{resolution_pair, unit_complex};

    #[test]
    fn resolution_pair_verifies() {
        let alg = group_algebra(2, GroupSpec::Cyclic(2)).unwrap();
        let t = resolution_pair(&alg, 12).unwrap();
        let r = verify_pair(&t, (-8, 0), 4);
        assert!(r.all_pass(), "{}", r.to_text());
        assert!(check_connecting_class("δ", &t).verdict.is_pass());
    }

    #[test]
    fn trivial_pair_passes_exactly() {
        let alg = group_algebra(2, GroupSpec::Cyclic(2)).unwrap();
        let one = unit_complex(&alg);
        let t = crate::idempotent::complement_pair(crate::idempotent::PairInput::FromCounital(
            one.clone(),
            GradedMap::identity(&one),
        ))
        .unwrap();
        let r = verify_pair(&t, (-4, 4), 4);
        assert!(r.checks.iter().all(|c| c.verdict == Verdict::Pass), "{}", r.to_text());
    }

    #[test]
    fn malformed_pair_fails_orthogonality() {
        let alg = group_algebra(2, GroupSpec::Cyclic(2)).unwrap();
        let t = resolution_pair(&alg, 12).unwrap();
        let bad = IdempotentTriangle {
            u: t.c.clone(),
            eta: GradedMap::zero(&t.one, &t.c, 0),
            delta: GradedMap::zero(&t.c, &shift(&t.c, 1), 0),
            ..t
        };
        let r = verify_pair(&bad, (-8, 0), 4);
        assert!(r.get("orthogonality C⊗U").unwrap().verdict.is_fail(), "{}", r.to_text());
        assert!(r.overall().is_fail());
    }

    #[test]
    fn dual_mixed_vanishing() {
        let alg = group_algebra(2, GroupSpec::Cyclic(2)).unwrap();
        let t = resolution_pair(&alg, 12).unwrap();
        let d = crate::idempotent::dual_pair(&t).unwrap();
        for (x, y) in [(&d.c, &t.c), (&t.c, &d.c), (&d.u, &t.u), (&t.u, &d.u)] {
            let c = check_tensor_vanishing("mixed", x, y, (-6, 6), 4);
            assert!(c.verdict.is_pass(), "{:?}", c);
        }
    }
}
