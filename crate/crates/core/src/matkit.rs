//! Small dense real matrices.
//!
//! Everything here is sized for the operators that show up around real
//! division algebras: 2×2, 4×4 and 8×8 multiplication operators, plus the
//! occasional tall constraint matrix fed to [`null_space`]. Storage is
//! row-major and entries are plain `f64`.

use std::fmt;
use std::ops::{Index, IndexMut, Mul, Neg};

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Deserializer, Serialize, Serializer};

use crate::error::{Error, Result};

/// Default tolerance for sign and SPD predicates.
pub const DEFAULT_TOL: f64 = 1e-9;

#[derive(Clone, PartialEq)]
pub struct Mat {
    rows: usize,
    cols: usize,
    data: Vec<f64>,
}

impl Mat {
    pub fn zeros(rows: usize, cols: usize) -> Self {
        Mat {
            rows,
            cols,
            data: vec![0.0; rows * cols],
        }
    }

    pub fn identity(n: usize) -> Self {
        let mut m = Mat::zeros(n, n);
        for i in 0..n {
            m[(i, i)] = 1.0;
        }
        m
    }

    pub fn diag(d: &[f64]) -> Self {
        let mut m = Mat::zeros(d.len(), d.len());
        for (i, &v) in d.iter().enumerate() {
            m[(i, i)] = v;
        }
        m
    }

    pub fn from_fn(rows: usize, cols: usize, f: impl Fn(usize, usize) -> f64) -> Self {
        let mut data = Vec::with_capacity(rows * cols);
        for i in 0..rows {
            for j in 0..cols {
                data.push(f(i, j));
            }
        }
        Mat { rows, cols, data }
    }

    /// Builds a matrix from row vectors. Rows must be non-empty, equally long and finite.
    pub fn from_rows(rows: &[Vec<f64>]) -> Result<Self> {
        let r = rows.len();
        let c = rows.first().map(Vec::len).unwrap_or(0);
        if r == 0 || c == 0 {
            return Err(Error::InvalidMatrix("empty matrix".into()));
        }
        if rows.iter().any(|row| row.len() != c) {
            return Err(Error::InvalidMatrix("ragged rows".into()));
        }
        let data: Vec<f64> = rows.iter().flatten().copied().collect();
        if data.iter().any(|v| !v.is_finite()) {
            return Err(Error::InvalidMatrix("non-finite entry".into()));
        }
        Ok(Mat {
            rows: r,
            cols: c,
            data,
        })
    }

    /// Builds a matrix whose columns are the given vectors.
    pub fn from_cols(cols: &[Vec<f64>]) -> Result<Self> {
        Mat::from_rows(cols).map(|m| m.transpose())
    }

    pub fn rows(&self) -> usize {
        self.rows
    }

    pub fn cols(&self) -> usize {
        self.cols
    }

    pub fn is_square(&self) -> bool {
        self.rows == self.cols
    }

    pub fn as_slice(&self) -> &[f64] {
        &self.data
    }

    pub fn row(&self, i: usize) -> Vec<f64> {
        self.data[i * self.cols..(i + 1) * self.cols].to_vec()
    }

    pub fn col(&self, j: usize) -> Vec<f64> {
        (0..self.rows).map(|i| self[(i, j)]).collect()
    }

    pub fn to_rows(&self) -> Vec<Vec<f64>> {
        (0..self.rows).map(|i| self.row(i)).collect()
    }

    pub fn to_cols(&self) -> Vec<Vec<f64>> {
        (0..self.cols).map(|j| self.col(j)).collect()
    }

    pub fn transpose(&self) -> Mat {
        Mat::from_fn(self.cols, self.rows, |i, j| self[(j, i)])
    }

    pub fn mul_vec(&self, v: &[f64]) -> Vec<f64> {
        assert_eq!(v.len(), self.cols, "dimension mismatch in mul_vec");
        (0..self.rows)
            .map(|i| {
                self.data[i * self.cols..(i + 1) * self.cols]
                    .iter()
                    .zip(v)
                    .map(|(a, b)| a * b)
                    .sum()
            })
            .collect()
    }

    pub fn add(&self, other: &Mat) -> Mat {
        assert_eq!((self.rows, self.cols), (other.rows, other.cols));
        let data = self
            .data
            .iter()
            .zip(&other.data)
            .map(|(a, b)| a + b)
            .collect();
        Mat {
            rows: self.rows,
            cols: self.cols,
            data,
        }
    }

    pub fn sub(&self, other: &Mat) -> Mat {
        assert_eq!((self.rows, self.cols), (other.rows, other.cols));
        let data = self
            .data
            .iter()
            .zip(&other.data)
            .map(|(a, b)| a - b)
            .collect();
        Mat {
            rows: self.rows,
            cols: self.cols,
            data,
        }
    }

    pub fn scale(&self, s: f64) -> Mat {
        Mat {
            rows: self.rows,
            cols: self.cols,
            data: self.data.iter().map(|v| v * s).collect(),
        }
    }

    pub fn frobenius(&self) -> f64 {
        self.data.iter().map(|v| v * v).sum::<f64>().sqrt()
    }

    pub fn max_abs(&self) -> f64 {
        self.data.iter().fold(0.0, |m, v| m.max(v.abs()))
    }

    /// Largest entrywise difference; `inf` when shapes differ.
    pub fn max_abs_diff(&self, other: &Mat) -> f64 {
        if (self.rows, self.cols) != (other.rows, other.cols) {
            return f64::INFINITY;
        }
        self.data
            .iter()
            .zip(&other.data)
            .fold(0.0, |m, (a, b)| m.max((a - b).abs()))
    }

    pub fn symmetrize(&self) -> Mat {
        self.add(&self.transpose()).scale(0.5)
    }

    pub fn asymmetry(&self) -> f64 {
        self.max_abs_diff(&self.transpose())
    }

    pub fn trace(&self) -> f64 {
        (0..self.rows.min(self.cols)).map(|i| self[(i, i)]).sum()
    }

    /// Horizontal concatenation `[self | other]`.
    pub fn hcat(&self, other: &Mat) -> Mat {
        assert_eq!(self.rows, other.rows);
        Mat::from_fn(self.rows, self.cols + other.cols, |i, j| {
            if j < self.cols {
                self[(i, j)]
            } else {
                other[(i, j - self.cols)]
            }
        })
    }

    pub fn pow(&self, k: u32) -> Mat {
        let mut out = Mat::identity(self.rows);
        for _ in 0..k {
            out = &out * self;
        }
        out
    }

    pub fn det(&self) -> f64 {
        assert!(self.is_square(), "determinant of a non-square matrix");
        match Lu::factor(self) {
            Some(lu) => lu.det(),
            None => 0.0,
        }
    }

    pub fn inverse(&self) -> Result<Mat> {
        if !self.is_square() {
            return Err(Error::InvalidMatrix(
                "inverse of a non-square matrix".into(),
            ));
        }
        let lu = Lu::factor(self).ok_or(Error::SingularInput)?;
        let n = self.rows;
        let mut inv = Mat::zeros(n, n);
        for j in 0..n {
            let mut e = vec![0.0; n];
            e[j] = 1.0;
            let x = lu.solve(&e);
            for i in 0..n {
                inv[(i, j)] = x[i];
            }
        }
        Ok(inv)
    }

    pub fn solve(&self, b: &[f64]) -> Result<Vec<f64>> {
        let lu = Lu::factor(self).ok_or(Error::SingularInput)?;
        Ok(lu.solve(b))
    }
}

impl Index<(usize, usize)> for Mat {
    type Output = f64;
    fn index(&self, (i, j): (usize, usize)) -> &f64 {
        &self.data[i * self.cols + j]
    }
}

impl IndexMut<(usize, usize)> for Mat {
    fn index_mut(&mut self, (i, j): (usize, usize)) -> &mut f64 {
        &mut self.data[i * self.cols + j]
    }
}

impl Mul for &Mat {
    type Output = Mat;
    fn mul(self, rhs: &Mat) -> Mat {
        assert_eq!(self.cols, rhs.rows, "dimension mismatch in matrix product");
        let mut out = Mat::zeros(self.rows, rhs.cols);
        for i in 0..self.rows {
            for k in 0..self.cols {
                let a = self[(i, k)];
                if a == 0.0 {
                    continue;
                }
                for j in 0..rhs.cols {
                    out[(i, j)] += a * rhs[(k, j)];
                }
            }
        }
        out
    }
}

impl Mul for Mat {
    type Output = Mat;
    fn mul(self, rhs: Mat) -> Mat {
        &self * &rhs
    }
}

impl Neg for &Mat {
    type Output = Mat;
    fn neg(self) -> Mat {
        self.scale(-1.0)
    }
}

impl fmt::Debug for Mat {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "Mat{}x{}", self.rows, self.cols)?;
        f.debug_list().entries(self.to_rows()).finish()
    }
}

impl fmt::Display for Mat {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for i in 0..self.rows {
            let row: Vec<String> = self.row(i).iter().map(|v| format!("{v:>12.8}")).collect();
            writeln!(f, "[{}]", row.join(" "))?;
        }
        Ok(())
    }
}

impl Serialize for Mat {
    fn serialize<S: Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        self.to_rows().serialize(s)
    }
}

impl<'de> Deserialize<'de> for Mat {
    fn deserialize<D: Deserializer<'de>>(d: D) -> std::result::Result<Self, D::Error> {
        let rows = Vec::<Vec<f64>>::deserialize(d)?;
        Mat::from_rows(&rows).map_err(serde::de::Error::custom)
    }
}

/// LU factorization with partial pivoting.
struct Lu {
    lu: Mat,
    perm: Vec<usize>,
    parity: f64,
}

impl Lu {
    fn factor(m: &Mat) -> Option<Lu> {
        let n = m.rows;
        let mut lu = m.clone();
        let mut perm: Vec<usize> = (0..n).collect();
        let mut parity = 1.0;
        for k in 0..n {
            let p = (k..n).max_by(|&a, &b| lu[(a, k)].abs().total_cmp(&lu[(b, k)].abs()))?;
            if lu[(p, k)] == 0.0 {
                return None;
            }
            if p != k {
                for j in 0..n {
                    let t = lu[(k, j)];
                    lu[(k, j)] = lu[(p, j)];
                    lu[(p, j)] = t;
                }
                perm.swap(k, p);
                parity = -parity;
            }
            let pivot = lu[(k, k)];
            for i in k + 1..n {
                let f = lu[(i, k)] / pivot;
                lu[(i, k)] = f;
                for j in k + 1..n {
                    lu[(i, j)] -= f * lu[(k, j)];
                }
            }
        }
        Some(Lu { lu, perm, parity })
    }

    fn det(&self) -> f64 {
        (0..self.lu.rows).fold(self.parity, |d, i| d * self.lu[(i, i)])
    }

    fn solve(&self, b: &[f64]) -> Vec<f64> {
        let n = self.lu.rows;
        let mut x: Vec<f64> = self.perm.iter().map(|&p| b[p]).collect();
        for i in 0..n {
            for k in 0..i {
                x[i] -= self.lu[(i, k)] * x[k];
            }
        }
        for i in (0..n).rev() {
            for k in i + 1..n {
                x[i] -= self.lu[(i, k)] * x[k];
            }
            x[i] /= self.lu[(i, i)];
        }
        x
    }
}

/// An element of C₂ = {+1, −1}.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum Sign {
    Plus,
    Minus,
}

impl Sign {
    pub fn of(x: f64) -> Sign {
        if x < 0.0 {
            Sign::Minus
        } else {
            Sign::Plus
        }
    }

    pub fn value(self) -> i32 {
        match self {
            Sign::Plus => 1,
            Sign::Minus => -1,
        }
    }

    pub fn as_f64(self) -> f64 {
        self.value() as f64
    }

    /// `(-1)^k` for `k ∈ {0, 1}`.
    pub fn from_parity(k: u8) -> Sign {
        if k.is_multiple_of(2) {
            Sign::Plus
        } else {
            Sign::Minus
        }
    }

    pub fn from_value(v: i64) -> Option<Sign> {
        match v {
            1 => Some(Sign::Plus),
            -1 => Some(Sign::Minus),
            _ => None,
        }
    }

    pub fn symbol(self) -> char {
        match self {
            Sign::Plus => '+',
            Sign::Minus => '-',
        }
    }
}

impl Mul for Sign {
    type Output = Sign;
    fn mul(self, rhs: Sign) -> Sign {
        if self == rhs {
            Sign::Plus
        } else {
            Sign::Minus
        }
    }
}

impl fmt::Display for Sign {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.symbol())
    }
}

/// Serialized as the integer `1` or `-1`.
impl Serialize for Sign {
    fn serialize<S: Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        s.serialize_i32(self.value())
    }
}

impl<'de> Deserialize<'de> for Sign {
    fn deserialize<D: Deserializer<'de>>(d: D) -> std::result::Result<Self, D::Error> {
        let v = i64::deserialize(d)?;
        Sign::from_value(v)
            .ok_or_else(|| serde::de::Error::custom(format!("sign must be 1 or -1, got {v}")))
    }
}

/// Sign of the determinant; fails when `|det| <= tol`.
pub fn sign_det(m: &Mat, tol: f64) -> Result<Sign> {
    if !m.is_square() {
        return Err(Error::InvalidMatrix(format!(
            "{}x{} is not square",
            m.rows, m.cols
        )));
    }
    let det = m.det();
    if !(det.abs() > tol) {
        return Err(Error::DegenerateSign { det, tol });
    }
    Ok(Sign::of(det))
}

/// Thin singular value decomposition `A = U Σ Vᵀ` of a matrix with at least
/// as many rows as columns. Singular values are sorted in decreasing order.
#[derive(Clone, Debug)]
pub struct Svd {
    pub u: Mat,
    pub s: Vec<f64>,
    pub v: Mat,
}

/// One-sided Jacobi SVD. Wide inputs are padded with zero rows.
pub fn svd(a: &Mat) -> Svd {
    let n = a.cols;
    let m = a.rows.max(n);
    let mut u = Mat::from_fn(m, n, |i, j| if i < a.rows { a[(i, j)] } else { 0.0 });
    let mut v = Mat::identity(n);
    for _sweep in 0..100 {
        let mut rotated = false;
        for p in 0..n {
            for q in p + 1..n {
                let (mut alpha, mut beta, mut gamma) = (0.0, 0.0, 0.0);
                for i in 0..m {
                    alpha += u[(i, p)] * u[(i, p)];
                    beta += u[(i, q)] * u[(i, q)];
                    gamma += u[(i, p)] * u[(i, q)];
                }
                if gamma == 0.0 || gamma.abs() <= 1e-15 * (alpha * beta).sqrt() {
                    continue;
                }
                rotated = true;
                let zeta = (beta - alpha) / (2.0 * gamma);
                let t = zeta.signum() / (zeta.abs() + (1.0 + zeta * zeta).sqrt());
                let c = 1.0 / (1.0 + t * t).sqrt();
                let s = c * t;
                for i in 0..m {
                    let (up, uq) = (u[(i, p)], u[(i, q)]);
                    u[(i, p)] = c * up - s * uq;
                    u[(i, q)] = s * up + c * uq;
                }
                for i in 0..n {
                    let (vp, vq) = (v[(i, p)], v[(i, q)]);
                    v[(i, p)] = c * vp - s * vq;
                    v[(i, q)] = s * vp + c * vq;
                }
            }
        }
        if !rotated {
            break;
        }
    }
    let norms: Vec<f64> = (0..n)
        .map(|j| (0..m).map(|i| u[(i, j)] * u[(i, j)]).sum::<f64>().sqrt())
        .collect();
    let mut order: Vec<usize> = (0..n).collect();
    order.sort_by(|&x, &y| norms[y].total_cmp(&norms[x]));
    let mut us = Mat::zeros(a.rows, n);
    let mut vs = Mat::zeros(n, n);
    let mut s = Vec::with_capacity(n);
    for (k, &j) in order.iter().enumerate() {
        let sigma = norms[j];
        s.push(sigma);
        for i in 0..a.rows {
            us[(i, k)] = if sigma > 0.0 { u[(i, j)] / sigma } else { 0.0 };
        }
        for i in 0..n {
            vs[(i, k)] = v[(i, j)];
        }
    }
    Svd { u: us, s, v: vs }
}

/// Basis (as columns) of the numerical null space of `a`: right singular
/// vectors whose singular value is at most `tol · max(1, σ_max)`.
pub fn null_space(a: &Mat, tol: f64) -> Mat {
    let d = svd(a);
    let scale = d.s.first().copied().unwrap_or(0.0).max(1.0);
    let keep: Vec<usize> = (0..a.cols).filter(|&k| d.s[k] <= tol * scale).collect();
    Mat::from_fn(a.cols, keep.len(), |i, j| d.v[(i, keep[j])])
}

/// Minimum-norm least-squares solution of `a x = b`, discarding singular
/// values below `rcond · σ_max`.
pub fn lstsq(a: &Mat, b: &[f64], rcond: f64) -> Vec<f64> {
    let d = svd(a);
    let smax = d.s.first().copied().unwrap_or(0.0);
    let mut x = vec![0.0; a.cols];
    for k in 0..a.cols {
        let sk = d.s[k];
        if sk <= rcond * smax || sk == 0.0 {
            continue;
        }
        let coef: f64 = (0..a.rows).map(|i| d.u[(i, k)] * b[i]).sum::<f64>() / sk;
        for i in 0..a.cols {
            x[i] += coef * d.v[(i, k)];
        }
    }
    x
}

/// `‖a·x − b‖∞` at the least-squares solution `x`: zero when `b` lies in
/// the column span of `a`.
pub fn lstsq_residual(a: &Mat, b: &[f64]) -> f64 {
    let x = lstsq(a, b, 1e-13);
    a.mul_vec(&x)
        .iter()
        .zip(b)
        .fold(0.0, |m, (p, q)| m.max((p - q).abs()))
}

/// Eigen-decomposition of a symmetric matrix by cyclic Jacobi rotations.
/// Returns eigenvalues in increasing order and the matching unit
/// eigenvectors as columns.
pub fn sym_eigen(a: &Mat) -> (Vec<f64>, Mat) {
    let n = a.rows;
    let mut m = a.symmetrize();
    let mut v = Mat::identity(n);
    for _sweep in 0..100 {
        let off: f64 = (0..n)
            .flat_map(|i| (0..n).filter(move |&j| j != i).map(move |j| (i, j)))
            .map(|(i, j)| m[(i, j)].powi(2))
            .sum();
        if off <= 1e-30 * m.frobenius().powi(2).max(f64::MIN_POSITIVE) {
            break;
        }
        for p in 0..n {
            for q in p + 1..n {
                let apq = m[(p, q)];
                if apq == 0.0 {
                    continue;
                }
                let theta = (m[(q, q)] - m[(p, p)]) / (2.0 * apq);
                let t = theta.signum() / (theta.abs() + (theta * theta + 1.0).sqrt());
                let t = if theta == 0.0 { 1.0 } else { t };
                let c = 1.0 / (t * t + 1.0).sqrt();
                let s = t * c;
                for k in 0..n {
                    let (mkp, mkq) = (m[(k, p)], m[(k, q)]);
                    m[(k, p)] = c * mkp - s * mkq;
                    m[(k, q)] = s * mkp + c * mkq;
                }
                for k in 0..n {
                    let (mpk, mqk) = (m[(p, k)], m[(q, k)]);
                    m[(p, k)] = c * mpk - s * mqk;
                    m[(q, k)] = s * mpk + c * mqk;
                }
                for k in 0..n {
                    let (vkp, vkq) = (v[(k, p)], v[(k, q)]);
                    v[(k, p)] = c * vkp - s * vkq;
                    v[(k, q)] = s * vkp + c * vkq;
                }
            }
        }
    }
    let mut order: Vec<usize> = (0..n).collect();
    order.sort_by(|&x, &y| m[(x, x)].total_cmp(&m[(y, y)]));
    let vals = order.iter().map(|&k| m[(k, k)]).collect();
    let vecs = Mat::from_fn(n, n, |i, j| v[(i, order[j])]);
    (vals, vecs)
}

/// Left polar decomposition `M = P·O` with `P` symmetric positive definite
/// and `O` orthogonal.
pub fn polar_decompose(m: &Mat) -> Result<(Mat, Mat)> {
    if !m.is_square() {
        return Err(Error::InvalidMatrix(
            "polar decomposition of a non-square matrix".into(),
        ));
    }
    let d = svd(m);
    let smax = d.s[0];
    let smin = *d.s.last().unwrap();
    if !(smin > 1e-13 * smax.max(f64::MIN_POSITIVE)) {
        return Err(Error::SingularInput);
    }
    let mut o = &d.u * &d.v.transpose();
    // Newton–Schulz polish of the orthogonal factor.
    let n = m.rows;
    for _ in 0..2 {
        let oto = &o.transpose() * &o;
        let corr = Mat::identity(n).scale(3.0).sub(&oto).scale(0.5);
        o = &o * &corr;
    }
    let p = (m * &o.transpose()).symmetrize();
    Ok((p, o))
}

/// Right polar decomposition `M = O·H`.
pub fn polar_right(m: &Mat) -> Result<(Mat, Mat)> {
    let (p, o) = polar_decompose(m)?;
    let h = (&(&o.transpose() * &p) * &o).symmetrize();
    Ok((o, h))
}

/// Symmetric, positive definite and unimodular, all within `tol`.
pub fn is_spd1(m: &Mat, tol: f64) -> bool {
    if !m.is_square() || m.asymmetry() > tol {
        return false;
    }
    let (vals, _) = sym_eigen(m);
    vals.iter().all(|&l| l > tol) && (m.det() - 1.0).abs() <= tol
}

/// Rescales a positive definite matrix to determinant one.
pub fn normalize_det(m: &Mat) -> Mat {
    let n = m.rows as f64;
    m.scale(m.det().abs().powf(-1.0 / n))
}

/// Deterministic random SPD determinant-one matrix.
pub fn random_spd1(n: usize, seed: u64) -> Mat {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    random_spd1_with(&mut rng, n)
}

pub fn random_spd1_with<R: Rng + ?Sized>(rng: &mut R, n: usize) -> Mat {
    let w = random_matrix_with(rng, n, n, 1.0);
    let mut s = &w * &w.transpose();
    for i in 0..n {
        s[(i, i)] += 0.1;
    }
    let s = s.symmetrize();
    normalize_det(&s)
}

/// Matrix with entries uniform in `[-bound, bound)`.
pub fn random_matrix_with<R: Rng + ?Sized>(
    rng: &mut R,
    rows: usize,
    cols: usize,
    bound: f64,
) -> Mat {
    let data = (0..rows * cols)
        .map(|_| rng.gen_range(-bound..bound))
        .collect();
    Mat { rows, cols, data }
}

/// Counter-clockwise rotation of the plane by `theta`.
pub fn rotation2(theta: f64) -> Mat {
    let (s, c) = theta.sin_cos();
    Mat::from_fn(2, 2, |i, j| match (i, j) {
        (0, 0) | (1, 1) => c,
        (0, 1) => -s,
        _ => s,
    })
}

pub fn dot(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| x * y).sum()
}

pub fn norm(a: &[f64]) -> f64 {
    dot(a, a).sqrt()
}

pub fn unit_vector(n: usize, i: usize) -> Vec<f64> {
    let mut e = vec![0.0; n];
    e[i] = 1.0;
    e
}
