//! File formats: groups, modules, complexes, graded maps, twisted complexes and posets.
//!
//! Matrices are lists of rows with signed integer entries, reduced mod `p` on
//! read. Module actions are keyed by generator (`g0`, `g1`, ...), in the order
//! of [`crate::group::Group::generators`].

use std::collections::BTreeMap;
use std::sync::Arc;

use serde::{Deserialize, Serialize};

use crate::complex::{Complex, GradedMap, Tail};
use crate::error::{Error, Result};
use crate::group::{group_algebra, regular_module, trivial_module, zero_module, FdModule, GroupAlgebra, GroupSpec};
use crate::linalg::Matrix;
use crate::postnikov::{Poset, TwistedComplex};

/// A group written either as `"c2xc2"` or as `{"cyclic": 2}` / `{"product": [...]}`.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(untagged)]
pub enum GroupRef {
    Short(String),
    Spec(GroupSpec),
}

impl GroupRef {
    pub fn spec(&self) -> Result<GroupSpec> {
        match self {
            GroupRef::Short(s) => GroupSpec::parse(s),
            GroupRef::Spec(g) => Ok(g.clone()),
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct ModuleJson {
    pub dim: usize,
    #[serde(default)]
    pub action: BTreeMap<String, Vec<Vec<i64>>>,
}

/// A module given in full, or one of `"zero"`, `"trivial"`, `"regular"`.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(untagged)]
pub enum ModuleRef {
    Named(String),
    Full(ModuleJson),
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct ComplexJson {
    #[serde(rename = "char")]
    pub p: u32,
    pub group: GroupRef,
    pub lo: i64,
    pub hi: i64,
    pub terms: Vec<ModuleRef>,
    #[serde(default)]
    pub diffs: Vec<Vec<Vec<i64>>>,
    #[serde(default = "zero_tail")]
    pub left_tail: Tail,
    #[serde(default = "zero_tail")]
    pub right_tail: Tail,
}

fn zero_tail() -> Tail {
    Tail::Zero
}

/// Components `f_lo, f_(lo+1), ...` of a graded map between known complexes.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct MapJson {
    pub lo: i64,
    pub comps: Vec<Vec<Vec<i64>>>,
    #[serde(default = "zero_tail")]
    pub left_tail: Tail,
    #[serde(default = "zero_tail")]
    pub right_tail: Tail,
}

/// Objects over a shared group; connecting maps keyed `"(i,j)"` for `d_ij : M_j -> M_i`.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct TwistedJson {
    pub objects: Vec<ComplexJson>,
    #[serde(default)]
    pub maps: BTreeMap<String, MapJson>,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct PosetJson {
    pub names: Vec<String>,
    #[serde(default)]
    pub covers: Vec<(usize, usize)>,
}

fn parse_err(what: impl Into<String>) -> Error {
    Error::Parse(what.into())
}

fn matrix(p: u32, rows: &[Vec<i64>], r: usize, c: usize, what: &str) -> Result<Matrix> {
    if rows.is_empty() && (r == 0 || c == 0) {
        return Ok(Matrix::zeros(p, r, c));
    }
    if rows.len() != r || rows.iter().any(|x| x.len() != c) {
        return Err(Error::Shape(format!("{what}: expected a {r}x{c} matrix")));
    }
    Ok(Matrix::from_rows(p, rows))
}

fn rows_of(m: &Matrix) -> Vec<Vec<i64>> {
    m.to_rows().into_iter().map(|r| r.into_iter().map(i64::from).collect()).collect()
}

pub fn module_from_json(alg: &Arc<GroupAlgebra>, m: &ModuleRef) -> Result<FdModule> {
    match m {
        ModuleRef::Named(s) => match s.as_str() {
            "zero" | "0" => Ok(zero_module(alg)),
            "trivial" | "k" => Ok(trivial_module(alg)),
            "regular" | "free" => Ok(regular_module(alg)),
            _ => Err(parse_err(format!("unknown module `{s}`"))),
        },
        ModuleRef::Full(j) => {
            let gens = alg.group().generators();
            let mut mats = Vec::with_capacity(gens.len());
            for i in 0..gens.len() {
                let key = format!("g{i}");
                let rows = j.action.get(&key).ok_or_else(|| parse_err(format!("module is missing the action of `{key}`")))?;
                mats.push(matrix(alg.p(), rows, j.dim, j.dim, &key)?);
            }
            if let Some(k) = j.action.keys().find(|k| !(0..gens.len()).any(|i| **k == format!("g{i}"))) {
                return Err(parse_err(format!("unknown generator `{k}`")));
            }
            FdModule::from_generator_actions(alg, j.dim, &mats)
        }
    }
}

pub fn module_to_json(m: &FdModule) -> ModuleJson {
    let gens = m.algebra().group().generators();
    let action = gens.iter().enumerate().map(|(i, &g)| (format!("g{i}"), rows_of(&m.action(g)))).collect();
    ModuleJson { dim: m.dim(), action }
}

pub fn algebra_of(p: u32, g: &GroupRef) -> Result<Arc<GroupAlgebra>> {
    group_algebra(p, g.spec()?)
}

/// Read a complex; `d² = 0` and intertwining are validated, the former reported with its degree.
pub fn complex_from_json(j: &ComplexJson) -> Result<Complex> {
    let alg = algebra_of(j.p, &j.group)?;
    complex_over(&alg, j)
}

fn complex_over(alg: &Arc<GroupAlgebra>, j: &ComplexJson) -> Result<Complex> {
    if j.terms.is_empty() {
        return Ok(Complex::zero(alg));
    }
    if j.hi - j.lo + 1 != j.terms.len() as i64 {
        return Err(Error::Shape(format!("lo..hi = {}..{} does not match {} terms", j.lo, j.hi, j.terms.len())));
    }
    let terms = j.terms.iter().map(|m| module_from_json(alg, m)).collect::<Result<Vec<_>>>()?;
    if j.diffs.len() + 1 != terms.len() {
        return Err(Error::Shape(format!("{} terms need {} differentials", terms.len(), terms.len() - 1)));
    }
    let diffs = j
        .diffs
        .iter()
        .enumerate()
        .map(|(i, d)| matrix(alg.p(), d, terms[i + 1].dim(), terms[i].dim(), &format!("differential at degree {}", j.lo + i as i64)))
        .collect::<Result<Vec<_>>>()?;
    Complex::new(alg, j.lo, terms, diffs, j.left_tail.clone(), j.right_tail.clone())
}

pub fn complex_to_json(x: &Complex) -> ComplexJson {
    let alg = x.algebra();
    ComplexJson {
        p: alg.p(),
        group: GroupRef::Short(alg.group().spec().short_name()),
        lo: x.lo(),
        hi: x.hi(),
        terms: x.core_terms().iter().map(|m| ModuleRef::Full(module_to_json(m))).collect(),
        diffs: x.core_diffs().iter().map(rows_of).collect(),
        left_tail: x.left().clone(),
        right_tail: x.right().clone(),
    }
}

/// A graded map of the given degree between known complexes; chain-checked when `chain`.
pub fn map_from_json(source: &Complex, target: &Complex, degree: i64, j: &MapJson, chain: bool) -> Result<GradedMap> {
    let p = source.p();
    let comps = j
        .comps
        .iter()
        .enumerate()
        .map(|(i, c)| {
            let k = j.lo + i as i64;
            matrix(p, c, target.dim(k + degree), source.dim(k), &format!("component at degree {k}"))
        })
        .collect::<Result<Vec<_>>>()?;
    let (l, r) = (j.left_tail.clone(), j.right_tail.clone());
    if chain {
        GradedMap::new(source, target, degree, j.lo, comps, l, r)
    } else {
        GradedMap::new_graded(source, target, degree, j.lo, comps, l, r)
    }
}

pub fn map_to_json(f: &GradedMap) -> MapJson {
    MapJson {
        lo: f.lo(),
        comps: f.core_components().iter().map(rows_of).collect(),
        left_tail: f.left().clone(),
        right_tail: f.right().clone(),
    }
}

fn parse_key(k: &str) -> Result<(usize, usize)> {
    let inner = k.trim().strip_prefix('(').and_then(|s| s.strip_suffix(')')).ok_or_else(|| parse_err(format!("bad map key `{k}`")))?;
    let mut it = inner.split(',').map(|s| s.trim().parse::<usize>());
    match (it.next(), it.next(), it.next()) {
        (Some(Ok(i)), Some(Ok(j)), None) => Ok((i, j)),
        _ => Err(parse_err(format!("bad map key `{k}` (expected \"(i,j)\")"))),
    }
}

pub fn twisted_from_json(j: &TwistedJson) -> Result<TwistedComplex> {
    let first = j.objects.first().ok_or_else(|| parse_err("a twisted complex needs at least one object"))?;
    let alg = algebra_of(first.p, &first.group)?;
    let mut objects = Vec::new();
    for o in &j.objects {
        if o.p != first.p || o.group.spec()? != first.group.spec()? {
            return Err(Error::AlgebraMismatch);
        }
        objects.push(complex_over(&alg, o)?);
    }
    let mut maps = Vec::new();
    for (k, m) in &j.maps {
        let (a, b) = parse_key(k)?;
        if a >= objects.len() || b >= a {
            return Err(parse_err(format!("map `{k}` must satisfy j < i < {}", objects.len())));
        }
        maps.push(((a, b), map_from_json(&objects[b], &objects[a], 1, m, false)?));
    }
    TwistedComplex::new(objects, maps)
}

pub fn twisted_to_json(tc: &TwistedComplex) -> TwistedJson {
    TwistedJson {
        objects: tc.objects().iter().map(complex_to_json).collect(),
        maps: tc.maps().iter().map(|(&(i, j), f)| (format!("({i},{j})"), map_to_json(f))).collect(),
    }
}

pub fn poset_from_json(j: &PosetJson) -> Result<Poset> {
    let n = j.names.len();
    if let Some(&(a, b)) = j.covers.iter().find(|&&(a, b)| a >= n || b >= n || a == b) {
        return Err(parse_err(format!("cover ({a},{b}) is out of range")));
    }
    let p = Poset { names: j.names.clone(), covers: j.covers.clone() };
    let le = p.order();
    if (0..n).any(|a| (0..n).any(|b| a != b && le[a][b] && le[b][a])) {
        return Err(parse_err("covers contain a cycle"));
    }
    Ok(p)
}

pub fn from_str<T: for<'de> Deserialize<'de>>(s: &str) -> Result<T> {
    serde_json::from_str(s).map_err(|e| parse_err(e.to_string()))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::idempotent::resolution_pair;
    use crate::postnikov::pair_decomposition;

    #[test]
    fn complex_round_trips() {
        let alg = group_algebra(2, GroupSpec::Cyclic(2)).unwrap();
        let t = resolution_pair(&alg, 4).unwrap();
        for x in [&t.u, &t.c] {
            let j = complex_to_json(x);
            let s = serde_json::to_string(&j).unwrap();
            let y = complex_from_json(&from_str(&s).unwrap()).unwrap();
            assert!(x.agrees_on(&y, x.lo() - 3, x.hi() + 3));
            assert_eq!(x.left(), y.left());
        }
    }

    #[test]
    fn square_nonzero_reports_degree() {
        let s = r#"{"char":2,"group":"c2","lo":-2,"hi":0,"terms":["regular","regular","regular"],
                    "diffs":[[[1,0],[0,1]],[[1,0],[0,1]]]}"#;
        match complex_from_json(&from_str(s).unwrap()) {
            Err(Error::SquareNonzero { degree }) => assert_eq!(degree, -2),
            r => panic!("expected a d² failure, got {r:?}"),
        }
    }

    #[test]
    fn group_forms_agree() {
        let a: GroupRef = from_str(r#""c2xc2""#).unwrap();
        let b: GroupRef = from_str(r#"{"product":[{"cyclic":2},{"cyclic":2}]}"#).unwrap();
        assert_eq!(a.spec().unwrap(), b.spec().unwrap());
    }

    #[test]
    fn twisted_round_trips() {
        let alg = group_algebra(2, GroupSpec::Cyclic(2)).unwrap();
        let tc = pair_decomposition(&resolution_pair(&alg, 4).unwrap()).unwrap();
        let s = serde_json::to_string(&twisted_to_json(&tc)).unwrap();
        let back = twisted_from_json(&from_str(&s).unwrap()).unwrap();
        assert_eq!(back.len(), 2);
        assert_eq!(back.maps().len(), 1);
    }

    #[test]
    fn modules_need_every_generator() {
        let alg = group_algebra(2, GroupSpec::parse("c2xc2").unwrap()).unwrap();
        let m = ModuleRef::Full(ModuleJson { dim: 1, action: [("g0".to_string(), vec![vec![1]])].into() });
        assert!(matches!(module_from_json(&alg, &m), Err(Error::Parse(_))));
    }
}
