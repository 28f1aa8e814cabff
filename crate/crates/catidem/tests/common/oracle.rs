//! Independent reference computations: the bar complex of a cyclic group
//! (cohomology, homology, cup product) and its periodic complete resolution,
//! each with its own mod-p rank routine.

use catidem::complex::Complex;
use catidem::group::{group_algebra, GroupSpec};
use catidem::hom::ring_table;
use catidem::idempotent::resolution_pair;

pub fn rank_mod(p: u64, mut m: Vec<Vec<u64>>) -> usize {
    let cols = m.first().map_or(0, |r| r.len());
    let mut r = 0;
    for c in 0..cols {
        let Some(i) = (r..m.len()).find(|&i| !m[i][c].is_multiple_of(p)) else { continue };
        m.swap(i, r);
        let inv = pow_mod(m[r][c] % p, p - 2, p);
        let pivot: Vec<u64> = m[r].iter().map(|x| x * inv % p).collect();
        for (k, row) in m.iter_mut().enumerate() {
            if k != r && row[c] % p != 0 {
                let f = row[c] % p;
                for (x, y) in row.iter_mut().zip(&pivot) {
                    *x = (*x + (p - f) * y) % p;
                }
            }
        }
        m[r] = pivot;
        r += 1;
    }
    r
}

pub fn pow_mod(mut b: u64, mut e: u64, p: u64) -> u64 {
    let mut acc = 1;
    while e > 0 {
        if e & 1 == 1 {
            acc = acc * b % p;
        }
        b = b * b % p;
        e >>= 1;
    }
    acc
}

/// Normalized inhomogeneous bar cochains of `ℤ/n` with trivial coefficients in `F_p`.
/// Cochains of degree `k` are functions on tuples of non-identity elements.
pub struct Bar {
    pub p: u64,
    pub n: usize,
}

impl Bar {
    pub fn tuples(&self, k: usize) -> Vec<Vec<usize>> {
        let mut out = vec![vec![]];
        for _ in 0..k {
            out = out.into_iter().flat_map(|t| (1..self.n).map(move |g| [t.clone(), vec![g]].concat())).collect();
        }
        out
    }

    pub fn index(&self, t: &[usize]) -> Option<usize> {
        // None for degenerate tuples (some entry is the identity)
        t.iter().try_fold(0, |acc, &g| (g != 0).then(|| acc * (self.n - 1) + (g - 1)))
    }

    /// Matrix of `δ : C^k -> C^(k+1)`, rows indexed by (k+1)-tuples.
    pub fn coboundary(&self, k: usize) -> Vec<Vec<u64>> {
        let (src, tgt) = (self.tuples(k), self.tuples(k + 1));
        let p = self.p;
        tgt.iter()
            .map(|t| {
                let mut row = vec![0u64; src.len()];
                let mut add = |s: Vec<usize>, sign: bool| {
                    if let Some(i) = self.index(&s) {
                        row[i] = (row[i] + if sign { p - 1 } else { 1 }) % p;
                    }
                };
                add(t[1..].to_vec(), false);
                for i in 0..k {
                    let mut s = t[..i].to_vec();
                    s.push((t[i] + t[i + 1]) % self.n);
                    s.extend_from_slice(&t[i + 2..]);
                    add(s, (i + 1) % 2 == 1);
                }
                add(t[..k].to_vec(), (k + 1) % 2 == 1);
                row
            })
            .collect()
    }

    pub fn rank_of(&self, k: usize) -> usize {
        let m = self.coboundary(k);
        if m.is_empty() || m[0].is_empty() {
            0
        } else {
            rank_mod(self.p, m)
        }
    }

    /// `dim H^k(ℤ/n; F_p)` for `k <= max`.
    pub fn ext_dims(&self, max: usize) -> Vec<usize> {
        let ranks: Vec<usize> = (0..=max).map(|k| self.rank_of(k)).collect();
        (0..=max).map(|k| self.tuples(k).len() - ranks[k] - if k == 0 { 0 } else { ranks[k - 1] }).collect()
    }

    /// `dim H_k(ℤ/n; F_p)` from the transposed (chain) bar differentials.
    pub fn homology_dims(&self, max: usize) -> Vec<usize> {
        let transpose = |m: Vec<Vec<u64>>| -> Vec<Vec<u64>> {
            if m.is_empty() {
                return m;
            }
            (0..m[0].len()).map(|j| m.iter().map(|r| r[j]).collect()).collect()
        };
        let ranks: Vec<usize> = (0..=max)
            .map(|k| {
                let m = transpose(self.coboundary(k));
                if m.is_empty() || m[0].is_empty() {
                    0
                } else {
                    rank_mod(self.p, m)
                }
            })
            .collect();
        (0..=max).map(|k| self.tuples(k).len() - ranks[k] - if k == 0 { 0 } else { ranks[k - 1] }).collect()
    }

    /// Cocycles spanning `H^k` modulo coboundaries (as coordinate vectors).
    pub fn class_basis(&self, k: usize) -> Vec<Vec<u64>> {
        let dim = self.tuples(k).len();
        let boundaries: Vec<Vec<u64>> = if k == 0 { vec![] } else { transpose_cols(&self.coboundary(k - 1)) };
        let d = self.coboundary(k);
        let mut chosen: Vec<Vec<u64>> = boundaries.clone();
        let mut out = vec![];
        for v in (0..dim).flat_map(|i| (1..self.p).map(move |a| (i, a))).map(|(i, a)| {
            let mut e = vec![0; dim];
            e[i] = a;
            e
        }) {
            if !is_cocycle(self.p, &d, &v) {
                continue;
            }
            let before = if chosen.is_empty() { 0 } else { rank_mod(self.p, chosen.clone()) };
            chosen.push(v.clone());
            if rank_mod(self.p, chosen.clone()) > before {
                out.push(v);
            } else {
                chosen.pop();
            }
        }
        // combinations are needed when no basis vector is a cocycle
        if out.is_empty() && self.ext_dims(k)[k] > 0 {
            let all = all_vectors(self.p, dim);
            for v in all.into_iter().filter(|v| v.iter().any(|&x| x != 0)) {
                if is_cocycle(self.p, &d, &v) {
                    let before = if chosen.is_empty() { 0 } else { rank_mod(self.p, chosen.clone()) };
                    chosen.push(v.clone());
                    if rank_mod(self.p, chosen.clone()) > before {
                        out.push(v);
                        break;
                    }
                    chosen.pop();
                }
            }
        }
        out
    }

    pub fn is_coboundary(&self, k: usize, v: &[u64]) -> bool {
        if k == 0 {
            return v.iter().all(|&x| x % self.p == 0);
        }
        let mut b = transpose_cols(&self.coboundary(k - 1));
        let r0 = if b.is_empty() { 0 } else { rank_mod(self.p, b.clone()) };
        b.push(v.to_vec());
        rank_mod(self.p, b) == r0
    }

    pub fn cup(&self, a: &[u64], ka: usize, b: &[u64], kb: usize) -> Vec<u64> {
        self.tuples(ka + kb)
            .iter()
            .map(|t| {
                let (x, y) = (self.index(&t[..ka]).unwrap(), self.index(&t[ka..]).unwrap());
                a[x] * b[y] % self.p
            })
            .collect()
    }
}

pub fn transpose_cols(m: &[Vec<u64>]) -> Vec<Vec<u64>> {
    if m.is_empty() {
        return vec![];
    }
    (0..m[0].len()).map(|j| m.iter().map(|r| r[j]).collect()).collect()
}

pub fn is_cocycle(p: u64, d: &[Vec<u64>], v: &[u64]) -> bool {
    d.iter().all(|row| row.iter().zip(v).map(|(a, b)| a * b).sum::<u64>() % p == 0)
}

pub fn all_vectors(p: u64, dim: usize) -> Vec<Vec<u64>> {
    let mut out = vec![vec![]];
    for _ in 0..dim {
        out = out.into_iter().flat_map(|v: Vec<u64>| (0..p).map(move |a| [v.clone(), vec![a]].concat())).collect();
    }
    out
}

/// Dimension of `hom(κ, T[n])` from the complete resolution of `ℤ/n`, whose
/// differentials alternate `g - 1` and the norm; after `Hom_G(-, κ)` both act
/// as `0` and `n` respectively.
pub fn complete_resolution_dims(p: u64, order: u64, lo: i64, hi: i64) -> Vec<usize> {
    (lo..=hi)
        .map(|_| {
            // each term contributes one copy of F_p; both incident maps vanish when p | n
            let norm = order % p;
            if norm == 0 {
                1
            } else {
                0
            }
        })
        .collect()
}

pub fn coinvariant_dims(x: &Complex, lo: i64) -> Vec<usize> {
    // H_k(G; F_p) = H(P ⊗_G κ); P_k ⊗_G κ = P_k / (g-1)P_k
    let alg = x.algebra();
    let p = alg.p() as u64;
    let g = alg.group().generators()[0];
    let rows = |m: &catidem::linalg::Matrix| -> Vec<Vec<u64>> { m.to_rows().into_iter().map(|r| r.into_iter().map(u64::from).collect()).collect() };
    let quotient = |k: i64| -> (usize, Vec<Vec<u64>>) {
        // basis of P_k / im(g - 1) by projection onto a complement
        let t = x.term(k);
        let a = rows(&t.action(g));
        let n = t.dim();
        let gm1: Vec<Vec<u64>> = (0..n).map(|i| (0..n).map(|j| (a[i][j] + if i == j { p - 1 } else { 0 }) % p).collect()).collect();
        (n - if n == 0 { 0 } else { rank_mod(p, gm1.clone()) }, gm1)
    };
    (lo..=0)
        .rev()
        .map(|k| {
            // rank of the induced differential: rank([d | (g-1)]) - rank(g-1) on the target
            let induced = |k: i64| -> usize {
                let (_, t_gm1) = quotient(k + 1);
                let d = rows(&x.diff(k));
                if d.is_empty() || d[0].is_empty() {
                    return 0;
                }
                let joined: Vec<Vec<u64>> = d.iter().zip(&t_gm1).map(|(a, b)| [a.clone(), b.clone()].concat()).collect();
                let base = if t_gm1.is_empty() { 0 } else { rank_mod(p, t_gm1.clone()) };
                rank_mod(p, joined) - base
            };
            let (dim, _) = quotient(k);
            dim - induced(k) - induced(k - 1)
        })
        .collect()
}

/// Nonvanishing pattern of products of the degree-m and degree-n basis classes.
pub fn cup_pattern(bar: &Bar, top: usize) -> Vec<(usize, usize, bool)> {
    let mut out = vec![];
    for m in 1..=top {
        for n in 1..=top - m {
            let (a, b) = (bar.class_basis(m), bar.class_basis(n));
            let prod = bar.cup(&a[0], m, &b[0], n);
            out.push((m, n, !bar.is_coboundary(m + n, &prod)));
        }
    }
    out
}

pub fn ring_pattern(p: u32, n: u32, top: i64) -> Vec<(usize, usize, bool)> {
    let alg = group_algebra(p, GroupSpec::Cyclic(n)).unwrap();
    let t = resolution_pair(&alg, 10).unwrap();
    let table = ring_table(&t.c, 0, top, 4).unwrap();
    let label = |d: i64| table.degrees.iter().position(|&x| x == d).unwrap();
    let mut out = vec![];
    for m in 1..=top {
        for k in 1..=top - m {
            let mut u = vec![0; table.len()];
            u[label(m)] = 1;
            let mut v = vec![0; table.len()];
            v[label(k)] = 1;
            let w = table.mul(&u, &v).expect("product inside the table");
            out.push((m as usize, k as usize, w.iter().any(|&c| c != 0)));
        }
    }
    out
}
