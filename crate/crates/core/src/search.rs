//! Alternating optimization of a Hermitian form over unit product vectors.
//!
//! With `e` fixed, `⟨e,f|H|e,f⟩` is a Hermitian form in `f` whose extremum is
//! an extreme eigenvector of an `n × n` matrix, and symmetrically for `e`.
//! Alternating the two updates increases (or decreases) the value
//! monotonically.

use rayon::prelude::*;

use crate::linalg::{hermitian_eigh, kron, CMat, CVec};
use crate::rng::{random_unit, stream_rng};

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Extremum {
    Max,
    Min,
}

#[derive(Debug, Clone)]
pub struct ProductOptimum {
    pub value: f64,
    pub e: CVec,
    pub f: CVec,
}

/// `H_e[j, l] = Σ_{a,b} conj(e_a) e_b H[a n + j, b n + l]`.
pub fn induced_second(h: &CMat, e: &CVec, m: usize, n: usize) -> CMat {
    let mut out = CMat::zeros(n, n);
    for a in 0..m {
        for b in 0..m {
            let w = e[a].conj() * e[b];
            if w.norm_sqr() == 0.0 {
                continue;
            }
            for j in 0..n {
                for l in 0..n {
                    out[(j, l)] += w * h[(a * n + j, b * n + l)];
                }
            }
        }
    }
    out
}

/// `H_f[a, b] = Σ_{j,l} conj(f_j) f_l H[a n + j, b n + l]`.
pub fn induced_first(h: &CMat, f: &CVec, m: usize, n: usize) -> CMat {
    let mut out = CMat::zeros(m, m);
    for j in 0..n {
        for l in 0..n {
            let w = f[j].conj() * f[l];
            if w.norm_sqr() == 0.0 {
                continue;
            }
            for a in 0..m {
                for b in 0..m {
                    out[(a, b)] += w * h[(a * n + j, b * n + l)];
                }
            }
        }
    }
    out
}

/// `⟨e,f|H|e,f⟩` for unit `e`, `f`.
pub fn product_value(h: &CMat, e: &CVec, f: &CVec) -> f64 {
    let v = kron(e, f);
    v.dotc(&(h * &v)).re
}

fn extreme_eigvec(mat: &CMat, ext: Extremum) -> CVec {
    let (_, vecs) = hermitian_eigh(mat);
    let k = match ext {
        Extremum::Max => mat.nrows() - 1,
        Extremum::Min => 0,
    };
    vecs.column(k).into_owned()
}

/// Alternating search from the starting vector `e0`.
pub fn alternating_search(
    h: &CMat,
    m: usize,
    n: usize,
    ext: Extremum,
    e0: CVec,
    max_iter: usize,
) -> ProductOptimum {
    let mut e = e0.normalize();
    let mut f = extreme_eigvec(&induced_second(h, &e, m, n), ext);
    let mut value = product_value(h, &e, &f);
    for _ in 0..max_iter {
        e = extreme_eigvec(&induced_first(h, &f, m, n), ext);
        f = extreme_eigvec(&induced_second(h, &e, m, n), ext);
        let next = product_value(h, &e, &f);
        let change = (next - value).abs();
        value = next;
        if change <= 1e-15 * value.abs().max(1.0) {
            break;
        }
    }
    ProductOptimum { value, e, f }
}

/// Multi-start alternating search. Start `k` draws its initial `e` from
/// stream `k` of `seed`, so the result does not depend on thread scheduling.
/// Ties are broken by the lowest start index.
pub fn multi_start_search(
    h: &CMat,
    m: usize,
    n: usize,
    ext: Extremum,
    starts: usize,
    max_iter: usize,
    seed: u64,
) -> ProductOptimum {
    let runs: Vec<ProductOptimum> = (0..starts.max(1) as u64)
        .into_par_iter()
        .map(|k| {
            let e0 = random_unit(&mut stream_rng(seed, k), m);
            alternating_search(h, m, n, ext, e0, max_iter)
        })
        .collect();
    let better = |a: f64, b: f64| match ext {
        Extremum::Max => a > b,
        Extremum::Min => a < b,
    };
    let mut best = runs[0].clone();
    for r in &runs[1..] {
        if better(r.value, best.value) {
            best = r.clone();
        }
    }
    best
}
