//! Finite groups, group algebras over F_p and their finite-dimensional modules.
//!
//! A module is stored as a direct sum of *pieces*. Each piece carries the full
//! action table. Direct sums, tensor products and duals act piecewise, which keeps
//! Hom spaces and projectivity sections cheap: they are computed per pair of
//! pieces and cached by content.

use std::collections::HashMap;
use std::fmt;
use std::hash::{Hash, Hasher};
use std::sync::{Arc, Mutex, OnceLock};

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::linalg::{Matrix, PrimeField};

/// `{"cyclic": n}` or `{"product": [...]}`.
#[derive(Clone, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum GroupSpec {
    Cyclic(u32),
    Product(Vec<GroupSpec>),
}

impl GroupSpec {
    /// Parse the short form: `c2`, `c3`, `c2xc2`, `1` for the trivial group.
    pub fn parse(s: &str) -> Result<GroupSpec> {
        let s = s.trim().to_ascii_lowercase();
        if s == "1" || s == "trivial" {
            return Ok(GroupSpec::Cyclic(1));
        }
        let parts: Vec<&str> = s.split('x').collect();
        let mut out = Vec::new();
        for part in &parts {
            let n = part
                .strip_prefix('c')
                .and_then(|n| n.parse::<u32>().ok())
                .filter(|&n| n > 0)
                .ok_or_else(|| Error::Parse(format!("bad group factor `{part}` (expected e.g. c2, c3, c2xc2)")))?;
            out.push(GroupSpec::Cyclic(n));
        }
        Ok(if out.len() == 1 { out.pop().unwrap() } else { GroupSpec::Product(out) })
    }

    pub fn short_name(&self) -> String {
        match self {
            GroupSpec::Cyclic(n) => format!("c{n}"),
            GroupSpec::Product(v) => v.iter().map(|g| g.short_name()).collect::<Vec<_>>().join("x"),
        }
    }
}

/// A finite group given by its multiplication table. Element 0 is the identity.
#[derive(Clone, Debug)]
pub struct Group {
    spec: GroupSpec,
    order: usize,
    table: Vec<usize>,
    inverse: Vec<usize>,
    generators: Vec<usize>,
}

impl Group {
    pub fn from_spec(spec: &GroupSpec) -> Result<Group> {
        let (order, table, generators) = build_table(spec)?;
        let mut inverse = vec![usize::MAX; order];
        for g in 0..order {
            for h in 0..order {
                if table[g * order + h] == 0 {
                    inverse[g] = h;
                }
            }
        }
        let grp = Group { spec: spec.clone(), order, table, inverse, generators };
        grp.validate()?;
        Ok(grp)
    }

    fn validate(&self) -> Result<()> {
        let n = self.order;
        for g in 0..n {
            if self.mul(0, g) != g || self.mul(g, 0) != g {
                return Err(Error::InvalidGroup("identity law fails".into()));
            }
            if self.inverse[g] == usize::MAX || self.mul(self.inverse[g], g) != 0 {
                return Err(Error::InvalidGroup("missing inverse".into()));
            }
        }
        // associativity: exhaustive for small groups, strided sample otherwise
        let step = if n <= 64 { 1 } else { n / 64 + 1 };
        for a in (0..n).step_by(step) {
            for b in (0..n).step_by(step) {
                for c in (0..n).step_by(step) {
                    if self.mul(self.mul(a, b), c) != self.mul(a, self.mul(b, c)) {
                        return Err(Error::InvalidGroup("associativity fails".into()));
                    }
                }
            }
        }
        Ok(())
    }

    pub fn spec(&self) -> &GroupSpec {
        &self.spec
    }
    pub fn order(&self) -> usize {
        self.order
    }
    pub fn mul(&self, g: usize, h: usize) -> usize {
        self.table[g * self.order + h]
    }
    pub fn inv(&self, g: usize) -> usize {
        self.inverse[g]
    }
    pub fn generators(&self) -> &[usize] {
        &self.generators
    }

    /// True when the order is a power of `p`.
    pub fn is_p_group(&self, p: u32) -> bool {
        let mut n = self.order;
        while n.is_multiple_of(p as usize) {
            n /= p as usize;
        }
        n == 1
    }
}

fn build_table(spec: &GroupSpec) -> Result<(usize, Vec<usize>, Vec<usize>)> {
    match spec {
        GroupSpec::Cyclic(0) => Err(Error::InvalidGroup("cyclic group of order 0".into())),
        GroupSpec::Cyclic(n) => {
            let n = *n as usize;
            let table = (0..n * n).map(|i| (i / n + i % n) % n).collect();
            let gens = if n > 1 { vec![1] } else { vec![] };
            Ok((n, table, gens))
        }
        GroupSpec::Product(list) => {
            let mut acc: (usize, Vec<usize>, Vec<usize>) = (1, vec![0], vec![]);
            for f in list {
                let (m, t2, g2) = build_table(f)?;
                let (n, t1, g1) = acc;
                let order = n * m;
                let mut table = vec![0; order * order];
                for a in 0..order {
                    for b in 0..order {
                        let (a1, a2) = (a / m, a % m);
                        let (b1, b2) = (b / m, b % m);
                        table[a * order + b] = t1[a1 * n + b1] * m + t2[a2 * m + b2];
                    }
                }
                let mut gens: Vec<usize> = g1.iter().map(|&g| g * m).collect();
                gens.extend(g2.iter().copied());
                acc = (order, table, gens);
            }
            Ok(acc)
        }
    }
}

/// The group algebra F_p[G].
#[derive(Debug)]
pub struct GroupAlgebra {
    field: PrimeField,
    group: Group,
}

impl PartialEq for GroupAlgebra {
    fn eq(&self, o: &Self) -> bool {
        self.field == o.field && self.group.spec == o.group.spec
    }
}
impl Eq for GroupAlgebra {}

impl Hash for GroupAlgebra {
    fn hash<H: Hasher>(&self, h: &mut H) {
        self.field.hash(h);
        self.group.spec.hash(h);
    }
}

/// Build F_p[G] with a validated group law.
pub fn group_algebra(p: u32, spec: GroupSpec) -> Result<Arc<GroupAlgebra>> {
    let field = PrimeField::new(p)?;
    let group = Group::from_spec(&spec)?;
    Ok(Arc::new(GroupAlgebra { field, group }))
}

impl GroupAlgebra {
    pub fn field(&self) -> PrimeField {
        self.field
    }
    pub fn p(&self) -> u32 {
        self.field.p()
    }
    pub fn group(&self) -> &Group {
        &self.group
    }
    pub fn dim(&self) -> usize {
        self.group.order
    }
    /// Local as an algebra exactly when G is a p-group.
    pub fn is_local(&self) -> bool {
        self.group.is_p_group(self.p())
    }

    /// Matrix of right multiplication by `a = sum a_g g` on the regular module,
    /// basis indexed by group elements.
    pub fn right_mult(&self, a: &[u32]) -> Matrix {
        let n = self.dim();
        let p = self.p();
        let mut m = Matrix::zeros(p, n, n);
        for h in 0..n {
            for (g, &c) in a.iter().enumerate() {
                if c != 0 {
                    let t = self.group.mul(h, g);
                    m.set(t, h, (m.get(t, h) + c) % p);
                }
            }
        }
        m
    }

    /// The element `sum_g g` (norm element).
    pub fn norm_element(&self) -> Vec<u32> {
        vec![1; self.dim()]
    }
}

/// An indecomposable-by-construction block of a module: the full action table.
#[derive(Clone)]
pub struct Piece {
    alg: Arc<GroupAlgebra>,
    dim: usize,
    action: Vec<Matrix>,
}

impl PartialEq for Piece {
    fn eq(&self, o: &Self) -> bool {
        self.dim == o.dim && self.alg == o.alg && self.action == o.action
    }
}
impl Eq for Piece {}
impl Hash for Piece {
    fn hash<H: Hasher>(&self, h: &mut H) {
        self.alg.hash(h);
        self.dim.hash(h);
        for &g in self.alg.group.generators() {
            self.action[g].hash(h);
        }
    }
}

impl fmt::Debug for Piece {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "Piece(dim {})", self.dim)
    }
}

impl Piece {
    pub fn dim(&self) -> usize {
        self.dim
    }
    pub fn action(&self, g: usize) -> &Matrix {
        &self.action[g]
    }

    fn from_generator_actions(alg: &Arc<GroupAlgebra>, dim: usize, gens: &[Matrix]) -> Result<Piece> {
        let grp = &alg.group;
        let p = alg.p();
        if gens.len() != grp.generators.len() {
            return Err(Error::InvalidModule(format!(
                "expected {} generator actions, got {}",
                grp.generators.len(),
                gens.len()
            )));
        }
        for m in gens {
            if m.rows() != dim || m.cols() != dim || m.p() != p {
                return Err(Error::InvalidModule("action matrix has wrong shape or field".into()));
            }
        }
        let n = grp.order;
        let mut action: Vec<Option<Matrix>> = vec![None; n];
        action[0] = Some(Matrix::identity(p, dim));
        let mut queue = vec![0usize];
        let mut head = 0;
        while head < queue.len() {
            let g = queue[head];
            head += 1;
            for (i, &s) in grp.generators.iter().enumerate() {
                let sg = grp.mul(s, g);
                let m = gens[i].mul(action[g].as_ref().unwrap());
                match &action[sg] {
                    None => {
                        action[sg] = Some(m);
                        queue.push(sg);
                    }
                    Some(prev) => {
                        if *prev != m {
                            return Err(Error::InvalidModule("generator actions violate the group relations".into()));
                        }
                    }
                }
            }
        }
        if action.iter().any(|a| a.is_none()) {
            return Err(Error::InvalidModule("generators do not reach every element".into()));
        }
        Ok(Piece { alg: alg.clone(), dim, action: action.into_iter().map(|a| a.unwrap()).collect() })
    }

    fn tensor(&self, o: &Piece) -> Piece {
        let action = self.action.iter().zip(&o.action).map(|(a, b)| a.kron(b)).collect();
        Piece { alg: self.alg.clone(), dim: self.dim * o.dim, action }
    }

    fn dual(&self) -> Piece {
        let grp = &self.alg.group;
        let action = (0..grp.order).map(|g| self.action[grp.inv(g)].transpose()).collect();
        Piece { alg: self.alg.clone(), dim: self.dim, action }
    }
}

/// A finite-dimensional module, stored as an ordered direct sum of pieces.
#[derive(Clone)]
pub struct FdModule {
    alg: Arc<GroupAlgebra>,
    pieces: Vec<Arc<Piece>>,
    offsets: Vec<usize>,
    dim: usize,
}

impl PartialEq for FdModule {
    fn eq(&self, o: &Self) -> bool {
        self.dim == o.dim
            && self.alg == o.alg
            && self.pieces.len() == o.pieces.len()
            && self.pieces.iter().zip(&o.pieces).all(|(a, b)| Arc::ptr_eq(a, b) || **a == **b)
    }
}
impl Eq for FdModule {}

impl fmt::Debug for FdModule {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "FdModule(dim {}, pieces {:?})", self.dim, self.pieces.iter().map(|p| p.dim).collect::<Vec<_>>())
    }
}

impl FdModule {
    fn from_pieces(alg: &Arc<GroupAlgebra>, pieces: Vec<Arc<Piece>>) -> FdModule {
        let pieces: Vec<Arc<Piece>> = pieces.into_iter().filter(|p| p.dim > 0).collect();
        let mut offsets = Vec::with_capacity(pieces.len());
        let mut dim = 0;
        for p in &pieces {
            offsets.push(dim);
            dim += p.dim;
        }
        FdModule { alg: alg.clone(), pieces, offsets, dim }
    }

    /// Module from the actions of the group generators (`g0`, `g1`, ...).
    pub fn from_generator_actions(alg: &Arc<GroupAlgebra>, dim: usize, gens: &[Matrix]) -> Result<FdModule> {
        if dim == 0 {
            return Ok(zero_module(alg));
        }
        let piece = Piece::from_generator_actions(alg, dim, gens)?;
        Ok(Self::from_pieces(alg, vec![intern(piece)]))
    }

    pub fn algebra(&self) -> &Arc<GroupAlgebra> {
        &self.alg
    }
    pub fn p(&self) -> u32 {
        self.alg.p()
    }
    pub fn dim(&self) -> usize {
        self.dim
    }
    pub fn pieces(&self) -> &[Arc<Piece>] {
        &self.pieces
    }
    pub fn offsets(&self) -> &[usize] {
        &self.offsets
    }
    pub fn is_zero(&self) -> bool {
        self.dim == 0
    }

    /// Full action matrix of group element `g`.
    pub fn action(&self, g: usize) -> Matrix {
        let blocks: Vec<&Matrix> = self.pieces.iter().map(|p| &p.action[g]).collect();
        Matrix::block_diag(self.p(), &blocks)
    }

    /// `f * rho(g)` for `f` with columns indexed by this module.
    pub fn act_right(&self, f: &Matrix, g: usize) -> Matrix {
        assert_eq!(f.cols(), self.dim);
        let mut out = Matrix::zeros(self.p(), f.rows(), self.dim);
        for (k, pc) in self.pieces.iter().enumerate() {
            let o = self.offsets[k];
            let b = f.block(0, f.rows(), o, pc.dim).mul(&pc.action[g]);
            out.set_block(0, o, &b);
        }
        out
    }

    /// `rho(g) * f` for `f` with rows indexed by this module.
    pub fn act_left(&self, g: usize, f: &Matrix) -> Matrix {
        assert_eq!(f.rows(), self.dim);
        let mut out = Matrix::zeros(self.p(), self.dim, f.cols());
        for (k, pc) in self.pieces.iter().enumerate() {
            let o = self.offsets[k];
            let b = pc.action[g].mul(&f.block(o, pc.dim, 0, f.cols()));
            out.set_block(o, 0, &b);
        }
        out
    }

    /// Does `f: self -> target` intertwine the actions?
    pub fn intertwines(&self, target: &FdModule, f: &Matrix) -> bool {
        if f.rows() != target.dim || f.cols() != self.dim {
            return false;
        }
        self.alg.group.generators.iter().all(|&g| self.act_right(f, g) == target.act_left(g, f))
    }

    /// Module generators as columns (block diagonal over pieces).
    pub fn generator_matrix(&self) -> Matrix {
        let gs: Vec<Arc<Matrix>> = self.pieces.iter().map(piece_generators).collect();
        let refs: Vec<&Matrix> = gs.iter().map(|g| g.as_ref()).collect();
        Matrix::block_diag(self.p(), &refs)
    }

    /// Number of generator columns contributed by each piece.
    pub fn generator_counts(&self) -> Vec<usize> {
        self.pieces.iter().map(|p| piece_generators(p).cols()).collect()
    }
}

/// Global cache of interned pieces and per-piece data.
struct Caches {
    pieces: HashMap<Piece, Arc<Piece>>,
    homs: HashMap<(usize, usize), Arc<Vec<Matrix>>>,
    gens: HashMap<usize, Arc<Matrix>>,
    higman: HashMap<usize, Option<Arc<Matrix>>>,
}

fn caches() -> &'static Mutex<Caches> {
    static C: OnceLock<Mutex<Caches>> = OnceLock::new();
    C.get_or_init(|| {
        Mutex::new(Caches { pieces: HashMap::new(), homs: HashMap::new(), gens: HashMap::new(), higman: HashMap::new() })
    })
}

fn intern(p: Piece) -> Arc<Piece> {
    let mut c = caches().lock().unwrap();
    if let Some(a) = c.pieces.get(&p) {
        return a.clone();
    }
    let a = Arc::new(p.clone());
    c.pieces.insert(p, a.clone());
    a
}

fn key(p: &Arc<Piece>) -> usize {
    Arc::as_ptr(p) as usize
}

/// Hom basis between two pieces (matrices `dim b x dim a`).
pub(crate) fn piece_hom(a: &Arc<Piece>, b: &Arc<Piece>) -> Arc<Vec<Matrix>> {
    let k = (key(a), key(b));
    if let Some(h) = caches().lock().unwrap().homs.get(&k) {
        return h.clone();
    }
    let res = Arc::new(compute_piece_hom(a, b));
    caches().lock().unwrap().homs.insert(k, res.clone());
    res
}

fn compute_piece_hom(a: &Piece, b: &Piece) -> Vec<Matrix> {
    let p = a.alg.p();
    let (da, db) = (a.dim, b.dim);
    let n = da * db;
    let gens = a.alg.group.generators();
    if gens.is_empty() {
        return (0..n).map(|i| Matrix::from_fn(p, db, da, |r, c| (r * da + c == i) as u32)).collect();
    }
    // unknown X (db x da), x_{ij} at i*da+j; equations X A - B X = 0
    let mut sys = Matrix::zeros(p, n * gens.len(), n);
    for (t, &g) in gens.iter().enumerate() {
        let am = &a.action[g];
        let bm = &b.action[g];
        for i in 0..db {
            for j in 0..da {
                let row = t * n + i * da + j;
                for k in 0..da {
                    let v = am.get(k, j);
                    if v != 0 {
                        let c = i * da + k;
                        sys.set(row, c, (sys.get(row, c) + v) % p);
                    }
                }
                for k in 0..db {
                    let v = bm.get(i, k);
                    if v != 0 {
                        let c = k * da + j;
                        sys.set(row, c, (sys.get(row, c) + p - v) % p);
                    }
                }
            }
        }
    }
    let ker = sys.kernel();
    (0..ker.cols()).map(|c| Matrix::from_data(p, db, da, ker.col(c))).collect()
}

fn piece_generators(pc: &Arc<Piece>) -> Arc<Matrix> {
    let k = key(pc);
    if let Some(g) = caches().lock().unwrap().gens.get(&k) {
        return g.clone();
    }
    let g = Arc::new(compute_generators(pc));
    caches().lock().unwrap().gens.insert(k, g.clone());
    g
}

fn compute_generators(pc: &Piece) -> Matrix {
    let p = pc.alg.p();
    let d = pc.dim;
    let n = pc.alg.group.order;
    if pc.alg.is_local() {
        // lifts of a basis of M / rad M, rad M = span{(g - 1) m}
        let mut cols = Vec::new();
        for g in 1..n {
            let a = pc.action[g].sub(&Matrix::identity(p, d));
            for c in 0..d {
                cols.push(a.col(c));
            }
        }
        let rad = if cols.is_empty() { Matrix::zeros(p, d, 0) } else { Matrix::from_columns(p, d, &cols) };
        let comp = rad.complement_basis();
        return Matrix::from_fn(p, d, comp.len(), |i, j| (i == comp[j]) as u32);
    }
    // greedy: add basis vectors outside the submodule generated so far
    let mut span = Matrix::zeros(p, d, 0);
    let mut chosen = Vec::new();
    for i in 0..d {
        let e: Vec<u32> = (0..d).map(|r| (r == i) as u32).collect();
        if span.cols() > 0 && span.solve(&e).is_ok() {
            continue;
        }
        chosen.push(i);
        let orbit: Vec<Vec<u32>> = (0..n).map(|g| pc.action[g].col(i)).collect();
        let add = Matrix::from_columns(p, d, &orbit);
        span = span.hstack(&add).column_space();
        if span.cols() == d {
            break;
        }
    }
    Matrix::from_fn(p, d, chosen.len(), |r, j| (r == chosen[j]) as u32)
}

/// Higman section: `phi` with `sum_g rho(g) phi rho(g^-1) = I`, if it exists.
pub(crate) fn piece_higman(pc: &Arc<Piece>) -> Option<Arc<Matrix>> {
    let k = key(pc);
    if let Some(h) = caches().lock().unwrap().higman.get(&k) {
        return h.clone();
    }
    let h = compute_higman(pc).map(Arc::new);
    caches().lock().unwrap().higman.insert(k, h.clone());
    h
}

fn compute_higman(pc: &Piece) -> Option<Matrix> {
    let p = pc.alg.p();
    let d = pc.dim;
    let grp = &pc.alg.group;
    let mut sys = Matrix::zeros(p, d * d, d * d);
    for g in 0..grp.order {
        let a = &pc.action[g];
        let b = &pc.action[grp.inv(g)];
        sys = sys.add(&a.kron(&b.transpose()));
    }
    let id = Matrix::identity(p, d);
    let s = sys.solve(id.data()).ok()?;
    Some(Matrix::from_data(p, d, d, s.x0))
}

pub fn zero_module(alg: &Arc<GroupAlgebra>) -> FdModule {
    FdModule::from_pieces(alg, vec![])
}

/// Regular module: basis indexed by group elements, left translation.
pub fn regular_module(alg: &Arc<GroupAlgebra>) -> FdModule {
    let grp = &alg.group;
    let n = grp.order;
    let p = alg.p();
    let action = (0..n).map(|g| Matrix::from_fn(p, n, n, |r, c| (grp.mul(g, c) == r) as u32)).collect();
    FdModule::from_pieces(alg, vec![intern(Piece { alg: alg.clone(), dim: n, action })])
}

/// The trivial module κ.
pub fn trivial_module(alg: &Arc<GroupAlgebra>) -> FdModule {
    let p = alg.p();
    let action = (0..alg.dim()).map(|_| Matrix::identity(p, 1)).collect();
    FdModule::from_pieces(alg, vec![intern(Piece { alg: alg.clone(), dim: 1, action })])
}

/// Module from the full action table (one matrix per group element).
pub fn module_from_actions(alg: &Arc<GroupAlgebra>, dim: usize, action: Vec<Matrix>) -> Result<FdModule> {
    let grp = &alg.group;
    if action.len() != grp.order {
        return Err(Error::InvalidModule("one matrix per group element expected".into()));
    }
    if action[0] != Matrix::identity(alg.p(), dim) {
        return Err(Error::InvalidModule("identity does not act as I".into()));
    }
    for g in 0..grp.order {
        for h in 0..grp.order {
            if action[g].mul(&action[h]) != action[grp.mul(g, h)] {
                return Err(Error::InvalidModule("action is not multiplicative".into()));
            }
        }
    }
    if dim == 0 {
        return Ok(zero_module(alg));
    }
    Ok(FdModule::from_pieces(alg, vec![intern(Piece { alg: alg.clone(), dim, action })]))
}

pub fn direct_sum_modules(alg: &Arc<GroupAlgebra>, ms: &[&FdModule]) -> FdModule {
    let pieces = ms.iter().flat_map(|m| m.pieces.iter().cloned()).collect();
    FdModule::from_pieces(alg, pieces)
}

/// `M ⊗_κ N` with diagonal action. Basis order is piece-pair-major: for pieces
/// `M_a`, `N_b` (lexicographic in (a, b)) the block `M_a ⊗ N_b` in Kronecker order.
pub fn tensor_module(m: &FdModule, n: &FdModule) -> Result<FdModule> {
    if m.alg != n.alg {
        return Err(Error::AlgebraMismatch);
    }
    let mut pieces = Vec::new();
    for a in &m.pieces {
        for b in &n.pieces {
            pieces.push(intern(a.tensor(b)));
        }
    }
    Ok(FdModule::from_pieces(&m.alg, pieces))
}

/// Linear dual with `rho*(g) = rho(g^-1)^T`.
pub fn dual_module(m: &FdModule) -> FdModule {
    FdModule::from_pieces(&m.alg, m.pieces.iter().map(|p| intern(p.dual())).collect())
}

/// Algebra of the product group `G1 x G2` over the common field.
pub fn product_algebra(a1: &Arc<GroupAlgebra>, a2: &Arc<GroupAlgebra>) -> Result<Arc<GroupAlgebra>> {
    if a1.field != a2.field {
        return Err(Error::FieldMismatch);
    }
    group_algebra(a1.p(), GroupSpec::Product(vec![a1.group.spec.clone(), a2.group.spec.clone()]))
}

/// External product over `G1 x G2`: `(g, h)` acts by `rho_M(g) ⊗ rho_N(h)`.
pub fn external_product(m: &FdModule, n: &FdModule, target: &Arc<GroupAlgebra>) -> Result<FdModule> {
    if m.alg.field != n.alg.field || target.field != m.alg.field {
        return Err(Error::FieldMismatch);
    }
    let n2 = n.alg.group.order;
    if target.group.order != m.alg.group.order * n2 {
        return Err(Error::AlgebraMismatch);
    }
    let mut pieces = Vec::new();
    for a in &m.pieces {
        for b in &n.pieces {
            let action = (0..target.group.order).map(|gh| a.action[gh / n2].kron(&b.action[gh % n2])).collect();
            pieces.push(intern(Piece { alg: target.clone(), dim: a.dim * b.dim, action }));
        }
    }
    Ok(FdModule::from_pieces(target, pieces))
}

/// Position of basis vector `(i, j)` of `M ⊗ N` (global indices) in the
/// piece-pair-major ordering used by [`tensor_module`] and [`external_product`].
pub fn tensor_positions(m: &FdModule, n: &FdModule) -> Vec<usize> {
    let mut pos = vec![0; m.dim * n.dim];
    let mut off = 0;
    for (a, pa) in m.pieces.iter().enumerate() {
        for (b, pb) in n.pieces.iter().enumerate() {
            for i in 0..pa.dim {
                for j in 0..pb.dim {
                    let gi = m.offsets[a] + i;
                    let gj = n.offsets[b] + j;
                    pos[gi * n.dim + gj] = off + i * pb.dim + j;
                }
            }
            off += pa.dim * pb.dim;
        }
    }
    pos
}

/// Matrix of `f ⊗ g : M ⊗ N -> M' ⊗ N'` in piece-pair-major bases.
pub fn tensor_matrix(f: &Matrix, g: &Matrix, m: &FdModule, n: &FdModule, m2: &FdModule, n2: &FdModule) -> Matrix {
    let k = f.kron(g);
    let src = tensor_positions(m, n);
    let dst = tensor_positions(m2, n2);
    k.permute_rows(&dst).permute_cols(&src)
}

/// Module map with validated intertwining.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ModuleMap {
    source: FdModule,
    target: FdModule,
    matrix: Matrix,
}

impl ModuleMap {
    pub fn new(source: FdModule, target: FdModule, matrix: Matrix) -> Result<ModuleMap> {
        if matrix.rows() != target.dim || matrix.cols() != source.dim {
            return Err(Error::Shape(format!(
                "map {}x{} between modules of dims {} -> {}",
                matrix.rows(),
                matrix.cols(),
                source.dim,
                target.dim
            )));
        }
        if !source.intertwines(&target, &matrix) {
            return Err(Error::NotIntertwining);
        }
        Ok(ModuleMap { source, target, matrix })
    }
    pub fn source(&self) -> &FdModule {
        &self.source
    }
    pub fn target(&self) -> &FdModule {
        &self.target
    }
    pub fn matrix(&self) -> &Matrix {
        &self.matrix
    }
}

/// One element of a block-sparse Hom basis: piece `a` of the source to piece `b`
/// of the target, with block matrix `mat`.
#[derive(Clone, Debug)]
pub struct HomBlock {
    pub a: usize,
    pub b: usize,
    pub mat: Matrix,
}

/// κ-basis of Hom_A(M, N) in block form.
pub fn hom_blocks(m: &FdModule, n: &FdModule) -> Vec<HomBlock> {
    let mut out = Vec::new();
    for (a, pa) in m.pieces.iter().enumerate() {
        for (b, pb) in n.pieces.iter().enumerate() {
            for mat in piece_hom(pa, pb).iter() {
                out.push(HomBlock { a, b, mat: mat.clone() });
            }
        }
    }
    out
}

/// Expand a block basis element into a full `dim N x dim M` matrix.
pub fn expand_block(m: &FdModule, n: &FdModule, hb: &HomBlock) -> Matrix {
    let mut out = Matrix::zeros(m.p(), n.dim, m.dim);
    out.set_block(n.offsets[hb.b], m.offsets[hb.a], &hb.mat);
    out
}

/// Combine a coordinate vector over a block basis into a matrix.
pub fn combine_blocks(m: &FdModule, n: &FdModule, basis: &[HomBlock], coords: &[u32]) -> Matrix {
    let p = m.p();
    let mut out = Matrix::zeros(p, n.dim, m.dim);
    for (hb, &c) in basis.iter().zip(coords) {
        if c != 0 {
            out.add_block(n.offsets[hb.b], m.offsets[hb.a], &hb.mat.scale(c));
        }
    }
    out
}

/// Coordinates of a module map in the block basis (`None` if not a module map).
pub fn block_coordinates(m: &FdModule, n: &FdModule, basis: &[HomBlock], f: &Matrix) -> Option<Vec<u32>> {
    let p = m.p();
    let mut coords = vec![0u32; basis.len()];
    // group basis elements by (a, b) and solve blockwise
    let mut idx = 0;
    while idx < basis.len() {
        let (a, b) = (basis[idx].a, basis[idx].b);
        let mut end = idx;
        while end < basis.len() && basis[end].a == a && basis[end].b == b {
            end += 1;
        }
        let blk = f.block(n.offsets[b], n.pieces[b].dim, m.offsets[a], m.pieces[a].dim);
        let cols: Vec<Vec<u32>> = basis[idx..end].iter().map(|h| h.mat.data().to_vec()).collect();
        let sys = Matrix::from_columns(p, blk.rows() * blk.cols(), &cols);
        let s = sys.solve(blk.data()).ok()?;
        coords[idx..end].copy_from_slice(&s.x0);
        idx = end;
    }
    // blocks without basis elements must vanish
    let back = combine_blocks(m, n, basis, &coords);
    (back == *f).then_some(coords)
}

/// κ-basis of Hom_A(M, N).
pub fn hom_basis(m: &FdModule, n: &FdModule) -> Result<Vec<ModuleMap>> {
    if m.alg != n.alg {
        return Err(Error::AlgebraMismatch);
    }
    Ok(hom_blocks(m, n)
        .iter()
        .map(|hb| ModuleMap { source: m.clone(), target: n.clone(), matrix: expand_block(m, n, hb) })
        .collect())
}

/// Higman section of the whole module (block diagonal), if projective.
pub fn higman_section(m: &FdModule) -> Option<Matrix> {
    let mut blocks = Vec::new();
    for pc in &m.pieces {
        blocks.push(piece_higman(pc)?);
    }
    let refs: Vec<&Matrix> = blocks.iter().map(|b| b.as_ref()).collect();
    Some(Matrix::block_diag(m.p(), &refs))
}

/// Projectivity: the action map `A ⊗_κ M -> M` splits as a module map. Over a
/// group algebra this is equivalent to the Higman criterion solved here: some
/// κ-linear `phi` has `sum_g g phi g^-1 = id`; the section is then
/// `m -> sum_g g ⊗ phi(g^-1 m)`.
pub fn is_projective(m: &FdModule) -> bool {
    m.pieces.iter().all(|pc| piece_higman(pc).is_some())
}

/// `sum_g rho_N(g) h rho_M(g^-1)`: averages a κ-linear map `M -> N` into a module map.
pub fn trace_average(m: &FdModule, n: &FdModule, h: &Matrix) -> Matrix {
    let grp = m.alg.group();
    let mut acc = Matrix::zeros(m.p(), n.dim, m.dim);
    for g in 0..grp.order() {
        let t = n.act_left(g, &m.act_right(h, grp.inv(g)));
        acc = acc.add(&t);
    }
    acc
}

/// Verdict of an isomorphism search.
#[derive(Clone, Debug)]
pub enum IsoVerdict {
    Iso(ModuleMap),
    No(String),
    Inconclusive(String),
}

impl IsoVerdict {
    pub fn is_iso(&self) -> bool {
        matches!(self, IsoVerdict::Iso(_))
    }
}

/// Search size for the exhaustive sweep.
pub const ISO_SWEEP_LIMIT: u64 = 10_000;
/// Random trials when the sweep is too large.
pub const ISO_RANDOM_TRIALS: usize = 256;

pub fn is_isomorphic(m: &FdModule, n: &FdModule) -> IsoVerdict {
    is_isomorphic_seeded(m, n, 0)
}

/// Exhaustive sweep over Hom-basis combinations when `p^k <= 10^4` (a miss is a
/// certified No), otherwise seeded random combinations (a miss is Inconclusive).
pub fn is_isomorphic_seeded(m: &FdModule, n: &FdModule, seed: u64) -> IsoVerdict {
    if m.alg != n.alg {
        return IsoVerdict::No("different algebras".into());
    }
    if m.dim != n.dim {
        return IsoVerdict::No(format!("dimension mismatch {} vs {}", m.dim, n.dim));
    }
    if m.dim == 0 {
        return IsoVerdict::Iso(ModuleMap { source: m.clone(), target: n.clone(), matrix: Matrix::zeros(m.p(), 0, 0) });
    }
    if m == n {
        return IsoVerdict::Iso(ModuleMap {
            source: m.clone(),
            target: n.clone(),
            matrix: Matrix::identity(m.p(), m.dim),
        });
    }
    let basis = hom_blocks(m, n);
    let k = basis.len();
    if k == 0 {
        return IsoVerdict::No("Hom(M, N) = 0".into());
    }
    let p = m.p() as u64;
    let try_coords = |c: &[u32]| -> Option<ModuleMap> {
        let f = combine_blocks(m, n, &basis, c);
        f.inverse().map(|_| ModuleMap { source: m.clone(), target: n.clone(), matrix: f })
    };
    let space = (k as u32).checked_mul(64).and_then(|_| p.checked_pow(k as u32));
    if let Some(total) = space.filter(|&t| t <= ISO_SWEEP_LIMIT) {
        let mut c = vec![0u32; k];
        for _ in 1..total {
            // increment in base p
            for x in c.iter_mut() {
                *x += 1;
                if *x as u64 == p {
                    *x = 0;
                } else {
                    break;
                }
            }
            if let Some(f) = try_coords(&c) {
                return IsoVerdict::Iso(f);
            }
        }
        return IsoVerdict::No(format!("exhaustive sweep of {total} intertwiners found none invertible"));
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    for _ in 0..ISO_RANDOM_TRIALS {
        let c: Vec<u32> = (0..k).map(|_| rng.gen_range(0..m.p())).collect();
        if let Some(f) = try_coords(&c) {
            return IsoVerdict::Iso(f);
        }
    }
    IsoVerdict::Inconclusive(format!("{ISO_RANDOM_TRIALS} random intertwiners were all singular"))
}

/// Submodule spanned by the columns of `basis` (assumed independent and stable).
pub fn submodule(m: &FdModule, basis: &Matrix) -> Result<FdModule> {
    let alg = &m.alg;
    let d = basis.cols();
    if d == 0 {
        return Ok(zero_module(alg));
    }
    let mut gens = Vec::new();
    for &g in alg.group.generators() {
        let img = m.act_left(g, basis);
        let x = basis.solve_matrix(&img).ok_or_else(|| Error::InvalidModule("subspace is not a submodule".into()))?;
        gens.push(x);
    }
    FdModule::from_generator_actions(alg, d, &gens)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn c2() -> Arc<GroupAlgebra> {
        group_algebra(2, GroupSpec::Cyclic(2)).unwrap()
    }

    #[test]
    fn algebra_construction() {
        assert_eq!(c2().dim(), 2);
        assert_eq!(group_algebra(3, GroupSpec::Cyclic(3)).unwrap().dim(), 3);
        let v4 = group_algebra(2, GroupSpec::Product(vec![GroupSpec::Cyclic(2), GroupSpec::Cyclic(2)])).unwrap();
        assert_eq!(v4.dim(), 4);
        assert!(matches!(group_algebra(4, GroupSpec::Cyclic(2)), Err(Error::NonPrimeModulus(4))));
    }

    #[test]
    fn parse_short_specs() {
        assert_eq!(GroupSpec::parse("c2").unwrap(), GroupSpec::Cyclic(2));
        assert_eq!(
            GroupSpec::parse("c2xc2").unwrap(),
            GroupSpec::Product(vec![GroupSpec::Cyclic(2), GroupSpec::Cyclic(2)])
        );
        assert!(GroupSpec::parse("d4").is_err());
    }

    #[test]
    fn regular_action_c2() {
        let c = regular_module(&c2());
        assert_eq!(c.action(1), Matrix::from_rows(2, &[vec![0, 1], vec![1, 0]]));
        let t = group_algebra(3, GroupSpec::Cyclic(1)).unwrap();
        assert_eq!(regular_module(&t).dim(), 1);
    }

    #[test]
    fn homs_over_c2() {
        let a = c2();
        let k = trivial_module(&a);
        let c = regular_module(&a);
        assert_eq!(hom_basis(&k, &k).unwrap().len(), 1);
        let kc = hom_basis(&k, &c).unwrap();
        assert_eq!(kc.len(), 1);
        assert_eq!(kc[0].matrix().col(0), vec![1, 1]);
        assert_eq!(hom_basis(&c, &k).unwrap().len(), 1);
    }

    #[test]
    fn projectivity() {
        let a = c2();
        assert!(is_projective(&regular_module(&a)));
        assert!(!is_projective(&trivial_module(&a)));
        let a3 = group_algebra(3, GroupSpec::Cyclic(2)).unwrap();
        assert!(is_projective(&trivial_module(&a3)));
        let cc = tensor_module(&regular_module(&a), &regular_module(&a)).unwrap();
        assert_eq!(cc.dim(), 4);
        assert!(is_projective(&cc));
    }

    #[test]
    fn isomorphism_checks() {
        let a = c2();
        let k = trivial_module(&a);
        let c = regular_module(&a);
        assert!(is_isomorphic(&c, &c).is_iso());
        assert!(matches!(is_isomorphic(&k, &c), IsoVerdict::No(_)));
        assert!(is_isomorphic(&dual_module(&c), &c).is_iso());
        let syz = submodule(&c, &Matrix::from_rows(2, &[vec![1], vec![1]])).unwrap();
        assert!(is_isomorphic(&syz, &k).is_iso());
    }

    #[test]
    fn external_regular() {
        let a = c2();
        let v4 = product_algebra(&a, &a).unwrap();
        let c = regular_module(&a);
        let cc = external_product(&c, &c, &v4).unwrap();
        assert!(is_isomorphic(&cc, &regular_module(&v4)).is_iso());
        let k = trivial_module(&a);
        assert_eq!(external_product(&k, &k, &v4).unwrap(), trivial_module(&v4));
    }

    #[test]
    fn rejects_bad_actions() {
        let a = c2();
        let bad = Matrix::from_rows(2, &[vec![1, 1], vec![1, 0]]);
        assert!(FdModule::from_generator_actions(&a, 2, &[bad]).is_err());
    }
}
