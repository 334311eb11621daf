//! e-quadratic algebras: a nonzero central idempotent `e` with
//! `x² ∈ span{e, ex}` for every `x`, the hyperplane
//! `Im_e(A) = {v : v² ∈ ℝe}` complementing `ℝe`, and the functor
//! `G(A) = (A, ℝe, Im_e(A))` into decorated algebras with `m = 1`.
//!
//! All polynomial identities are checked by expanding coefficients from the
//! structure constants, never by random evaluation.

use std::collections::BTreeMap;

use serde::{Deserialize, Serialize};

use crate::algebra::{commutant, left_mult, Algebra};
use crate::decorated::{decorate, DecoratedAlgebra};
use crate::error::{Error, Result};
use crate::matkit::{dot, lstsq, norm, null_space, sym_eigen, unit_vector, Mat};

/// Discarded eigenvalues when factoring a quadratic form, relative to its size.
const FACTOR_TOL: f64 = 1e-8;

/// The central idempotent and a basis of `Im_e(A)`.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct EQuadStructure {
    pub e: Vec<f64>,
    pub im_basis: Mat,
}

fn max_abs_diff(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).fold(0.0, |m, (x, y)| m.max((x - y).abs()))
}

/// Real roots of `c₀ + c₁s + c₂s² + c₃s³`, with near-zero leading
/// coefficients (relative to the largest) dropped.
fn real_roots(coeffs: [f64; 4]) -> Vec<f64> {
    let scale = coeffs.iter().fold(0.0f64, |m, c| m.max(c.abs()));
    if scale == 0.0 {
        return Vec::new();
    }
    let c: Vec<f64> = coeffs.iter().map(|x| x / scale).collect();
    let mut deg = 3;
    while deg > 0 && c[deg].abs() <= 1e-12 {
        deg -= 1;
    }
    let eval = |s: f64| c[..=deg].iter().rev().fold(0.0, |acc, &k| acc * s + k);
    match deg {
        0 => Vec::new(),
        1 => vec![-c[0] / c[1]],
        _ => {
            // Split the line at critical points and bisect each monotone piece.
            let d: Vec<f64> = (1..=deg).map(|k| k as f64 * c[k]).collect();
            let mut crit = real_roots([
                d[0],
                d.get(1).copied().unwrap_or(0.0),
                d.get(2).copied().unwrap_or(0.0),
                0.0,
            ]);
            crit.sort_by(f64::total_cmp);
            let bound = 1.0 + (0..deg).map(|k| (c[k] / c[deg]).abs()).fold(0.0, f64::max);
            let mut knots = vec![-bound];
            knots.extend(crit.iter().copied().filter(|x| x.abs() < bound));
            knots.push(bound);
            let mut roots = Vec::new();
            for w in knots.windows(2) {
                let (mut lo, mut hi) = (w[0], w[1]);
                let (flo, fhi) = (eval(lo), eval(hi));
                if flo == 0.0 {
                    roots.push(lo);
                    continue;
                }
                if flo.signum() == fhi.signum() {
                    continue;
                }
                for _ in 0..200 {
                    let mid = 0.5 * (lo + hi);
                    if eval(mid).signum() == flo.signum() {
                        lo = mid;
                    } else {
                        hi = mid;
                    }
                }
                roots.push(0.5 * (lo + hi));
            }
            if eval(bound) == 0.0 {
                roots.push(bound);
            }
            // Tangential (double) roots sit on critical points.
            for &x in &crit {
                if eval(x).abs() <= 1e-12 {
                    roots.push(x);
                }
            }
            roots.sort_by(f64::total_cmp);
            roots.dedup_by(|a, b| (*a - *b).abs() <= 1e-9 * (1.0 + b.abs()));
            roots
        }
    }
}

/// Nonzero solutions of `z·z = z` inside the commutant of `A`.
///
/// Central here means commuting with every element. The commutant has
/// dimension at most 2 for the algebras this is meant for; larger ones are
/// rejected.
pub fn central_idempotents(alg: &Algebra, tol: f64) -> Result<Vec<Vec<f64>>> {
    let z = commutant(alg, tol);
    let d = z.cols();
    if d > 2 {
        return Err(Error::CenterTooLarge(d));
    }
    let cols = z.to_cols();
    let mut candidates: Vec<Vec<f64>> = Vec::new();
    match d {
        0 => {}
        1 => candidates.push(cols[0].clone()),
        _ => {
            // coordinates of z_a z_b in the commutant basis, symmetrized
            let coords = |a: usize, b: usize| {
                let ab = alg.mul(&cols[a], &cols[b]);
                let ba = alg.mul(&cols[b], &cols[a]);
                let sym: Vec<f64> = ab.iter().zip(&ba).map(|(x, y)| 0.5 * (x + y)).collect();
                lstsq(&z, &sym, 1e-13)
            };
            let (p00, p01, p11) = (coords(0, 0), coords(0, 1), coords(1, 1));
            // u × P(u) = 0 with P(u) = u₀²p00 + 2u₀u₁p01 + u₁²p11
            let cubic = [
                p00[1],
                2.0 * p01[1] - p00[0],
                p11[1] - 2.0 * p01[0],
                -p11[0],
            ];
            for s in real_roots(cubic) {
                let u = [1.0, s];
                candidates.push(z.mul_vec(&u));
            }
            let scale = cubic.iter().fold(0.0f64, |m, c| m.max(c.abs()));
            if cubic[3].abs() <= 1e-12 * scale.max(f64::MIN_POSITIVE) {
                candidates.push(cols[1].clone());
            }
        }
    }
    let mut out: Vec<Vec<f64>> = Vec::new();
    for w in candidates {
        let sq = alg.mul(&w, &w);
        let ww = dot(&w, &w);
        let lambda = dot(&w, &sq) / ww;
        if lambda.abs() <= tol {
            continue;
        }
        let e: Vec<f64> = w.iter().map(|x| x / lambda).collect();
        let resid = max_abs_diff(&alg.mul(&e, &e), &e);
        if resid <= tol.max(1e-12) * 10.0 * (1.0 + norm(&e))
            && !out.iter().any(|f| max_abs_diff(f, &e) <= 1e-9)
        {
            out.push(e);
        }
    }
    out.sort_by(|a, b| {
        b.iter()
            .zip(a)
            .map(|(x, y)| x.total_cmp(y))
            .find(|o| o.is_ne())
            .unwrap_or(std::cmp::Ordering::Equal)
    });
    Ok(out)
}

/// Exact check of `x² ∈ span{e, ex}`: every 3×3 minor of `[e | L_e x | x²]`
/// is a cubic form in `x`; all of its coefficients must vanish.
pub fn is_e_quadratic(alg: &Algebra, e: &[f64], tol: f64) -> Result<bool> {
    let n = alg.dim();
    let resid = max_abs_diff(&alg.mul(e, e), e);
    if resid > tol {
        return Err(Error::NotIdempotent(resid));
    }
    if n < 3 {
        return Ok(true);
    }
    let le = left_mult(alg, e);
    const PERMS: [([usize; 3], f64); 6] = [
        ([0, 1, 2], 1.0),
        ([1, 2, 0], 1.0),
        ([2, 0, 1], 1.0),
        ([0, 2, 1], -1.0),
        ([2, 1, 0], -1.0),
        ([1, 0, 2], -1.0),
    ];
    for r1 in 0..n {
        for r2 in r1 + 1..n {
            for r3 in r2 + 1..n {
                let rows = [r1, r2, r3];
                let mut coef: BTreeMap<[usize; 3], f64> = BTreeMap::new();
                for (p, sgn) in PERMS {
                    let (ra, rb, rc) = (rows[p[0]], rows[p[1]], rows[p[2]]);
                    let ev = sgn * e[ra];
                    if ev == 0.0 {
                        continue;
                    }
                    for a in 0..n {
                        let la = ev * le[(rb, a)];
                        if la == 0.0 {
                            continue;
                        }
                        for b in 0..n {
                            for c in 0..n {
                                let q = alg.coef(b, c, rc);
                                if q == 0.0 {
                                    continue;
                                }
                                let mut key = [a, b, c];
                                key.sort_unstable();
                                *coef.entry(key).or_insert(0.0) += la * q;
                            }
                        }
                    }
                }
                if coef.values().any(|v| v.abs() > tol) {
                    return Ok(false);
                }
            }
        }
    }
    Ok(true)
}

/// Kernel of the linear form `f`, spanned by `e_k − (f_k / f_p) e_p` for
/// `k ≠ p`, where `p` is the pivot of largest `|f_p|`.
fn kernel_basis(f: &[f64]) -> Mat {
    let n = f.len();
    let p = (0..n)
        .max_by(|&a, &b| f[a].abs().total_cmp(&f[b].abs()))
        .unwrap();
    let cols: Vec<Vec<f64>> = (0..n)
        .filter(|&k| k != p)
        .map(|k| {
            let mut v = unit_vector(n, k);
            v[p] = -f[k] / f[p];
            v
        })
        .collect();
    Mat::from_cols(&cols).expect("n ≥ 2")
}

/// Gram–Schmidt complement of `e` in coordinates, dropping the coordinate
/// vector most aligned with `e`.
fn coordinate_complement(e: &[f64]) -> Mat {
    let n = e.len();
    let p = (0..n)
        .max_by(|&a, &b| e[a].abs().total_cmp(&e[b].abs()))
        .unwrap();
    let ee = dot(e, e);
    let mut basis: Vec<Vec<f64>> = Vec::new();
    for k in (0..n).filter(|&k| k != p) {
        let mut v = unit_vector(n, k);
        let c = e[k] / ee;
        for (vi, ei) in v.iter_mut().zip(e) {
            *vi -= c * ei;
        }
        for b in &basis {
            let c = dot(&v, b);
            for (vi, bi) in v.iter_mut().zip(b) {
                *vi -= c * bi;
            }
        }
        let r = norm(&v);
        basis.push(v.iter().map(|x| x / r).collect());
    }
    Mat::from_cols(&basis).expect("n ≥ 2")
}

/// Basis (columns) of the hyperplane `Im_e(A) = {v : v² ∈ ℝe}`.
///
/// Each coordinate of `x²` transverse to `e` is a quadratic form vanishing on
/// the hyperplane, hence a product of two linear forms one of which cuts it
/// out. The largest such form is factored from its eigen-decomposition and
/// each candidate factor is checked on its kernel, polarized pairs included.
pub fn im_e(alg: &Algebra, e: &[f64], tol: f64) -> Result<Mat> {
    let n = alg.dim();
    if n < 2 {
        return Err(Error::UnsupportedDimension(n));
    }
    let w = null_space(&Mat::from_rows(&[e.to_vec()])?, 1e-12);
    let forms: Vec<Mat> = (0..w.cols())
        .map(|r| {
            let wr = w.col(r);
            Mat::from_fn(n, n, |b, c| {
                0.5 * (dot(&wr, alg.basis_product(b, c)) + dot(&wr, alg.basis_product(c, b)))
            })
        })
        .collect();
    let scale = forms.iter().map(Mat::max_abs).fold(0.0, f64::max);
    if scale <= tol {
        return Ok(coordinate_complement(e));
    }
    let q = forms
        .iter()
        .max_by(|a, b| a.frobenius().total_cmp(&b.frobenius()))
        .unwrap();
    let (vals, vecs) = sym_eigen(q);
    let eig_tol = FACTOR_TOL * q.max_abs().max(1.0);
    let (lmin, lmax) = (vals[0], vals[n - 1]);
    if vals[1..n - 1].iter().any(|l| l.abs() > eig_tol) {
        return Err(Error::NoHyperplane);
    }
    let (vmin, vmax) = (vecs.col(0), vecs.col(n - 1));
    let mut candidates: Vec<Vec<f64>> = Vec::new();
    if lmax > eig_tol && lmin < -eig_tol {
        let (a, b) = (lmax.sqrt(), (-lmin).sqrt());
        candidates.push(vmax.iter().zip(&vmin).map(|(x, y)| a * x - b * y).collect());
        candidates.push(vmax.iter().zip(&vmin).map(|(x, y)| a * x + b * y).collect());
    } else if lmax > eig_tol {
        candidates.push(vmax);
    } else if lmin < -eig_tol {
        candidates.push(vmin);
    } else {
        return Err(Error::NoHyperplane);
    }
    let verify_tol = FACTOR_TOL * scale.max(1.0);
    for f in candidates {
        if dot(&f, e).abs() <= tol * norm(&f) * norm(e) {
            continue;
        }
        let k = kernel_basis(&f);
        let kc = k.to_cols();
        let transverse_ok =
            |v: &[f64]| (0..w.cols()).all(|r| dot(&w.col(r), v).abs() <= verify_tol);
        let ok = (0..kc.len()).all(|a| {
            (a..kc.len()).all(|b| {
                let ab = alg.mul(&kc[a], &kc[b]);
                let ba = alg.mul(&kc[b], &kc[a]);
                let sym: Vec<f64> = ab.iter().zip(&ba).map(|(x, y)| x + y).collect();
                transverse_ok(&sym)
            })
        });
        if ok {
            return Ok(k);
        }
    }
    Err(Error::NoHyperplane)
}

/// The idempotent and `Im_e(A)` for an e-quadratic algebra of dimension
/// 4 or 8, where the idempotent is unique.
pub fn structure(alg: &Algebra, tol: f64) -> Result<EQuadStructure> {
    let n = alg.dim();
    if n != 4 && n != 8 {
        return Err(Error::UnsupportedDimension(n));
    }
    let mut qualifying = Vec::new();
    for e in central_idempotents(alg, tol)? {
        if is_e_quadratic(alg, &e, tol)? {
            qualifying.push(e);
        }
    }
    match qualifying.len() {
        0 => Err(Error::NotEQuadratic),
        1 => {
            let e = qualifying.pop().unwrap();
            let im_basis = im_e(alg, &e, tol)?;
            Ok(EQuadStructure { e, im_basis })
        }
        k => Err(Error::NonUniqueIdempotent(k)),
    }
}

/// `G(A) = (A, ℝe, Im_e(A))`.
pub fn functor_g(alg: &Algebra, tol: f64) -> Result<DecoratedAlgebra> {
    let s = structure(alg, tol)?;
    let u = Mat::from_cols(&[s.e])?;
    decorate(alg.clone(), u, s.im_basis)
}
