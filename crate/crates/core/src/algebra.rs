//! Finite-dimensional real algebras given by structure constants.
//!
//! The convention is fixed once: `c[i][j][k]` is the `k`-th coordinate of
//! `eᵢ·eⱼ`, left factor first. Everything else in the crate, including the
//! JSON document format, uses this order.

use std::fmt;
use std::str::FromStr;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::matkit::{self, lstsq, norm, null_space, sign_det, unit_vector, Mat, Sign, DEFAULT_TOL};

#[derive(Clone, Debug, PartialEq)]
pub struct Algebra {
    dim: usize,
    c: Vec<f64>,
    name: String,
    labels: Vec<String>,
}

fn default_labels(dim: usize) -> Vec<String> {
    (0..dim).map(|i| format!("e{i}")).collect()
}

impl Algebra {
    /// Builds an algebra from a flat `dim³` tensor in `c[i][j][k]` order.
    pub fn new(dim: usize, c: Vec<f64>) -> Result<Self> {
        if dim == 0 {
            return Err(Error::InvalidInput("dimension must be positive".into()));
        }
        if c.len() != dim * dim * dim {
            return Err(Error::InvalidInput(format!(
                "expected {} structure constants, got {}",
                dim.pow(3),
                c.len()
            )));
        }
        if c.iter().any(|v| !v.is_finite()) {
            return Err(Error::InvalidInput("non-finite structure constant".into()));
        }
        Ok(Algebra {
            dim,
            c,
            name: String::new(),
            labels: default_labels(dim),
        })
    }

    /// Builds the algebra whose product of basis vectors is `prod(i, j)`.
    pub fn from_products(dim: usize, prod: impl Fn(usize, usize) -> Vec<f64>) -> Result<Self> {
        let mut c = Vec::with_capacity(dim.pow(3));
        for i in 0..dim {
            for j in 0..dim {
                let v = prod(i, j);
                debug_assert_eq!(v.len(), dim);
                c.extend(v);
            }
        }
        Algebra::new(dim, c)
    }

    pub fn with_name(mut self, name: impl Into<String>) -> Self {
        self.name = name.into();
        self
    }

    pub fn with_labels(mut self, labels: Vec<String>) -> Result<Self> {
        if labels.len() != self.dim {
            return Err(Error::InvalidInput(format!(
                "{} labels for dimension {}",
                labels.len(),
                self.dim
            )));
        }
        self.labels = labels;
        Ok(self)
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn name(&self) -> &str {
        &self.name
    }

    pub fn labels(&self) -> &[String] {
        &self.labels
    }

    pub fn tensor(&self) -> &[f64] {
        &self.c
    }

    #[inline]
    pub fn coef(&self, i: usize, j: usize, k: usize) -> f64 {
        self.c[(i * self.dim + j) * self.dim + k]
    }

    /// The product `eᵢ·eⱼ` as a coordinate vector.
    pub fn basis_product(&self, i: usize, j: usize) -> &[f64] {
        let start = (i * self.dim + j) * self.dim;
        &self.c[start..start + self.dim]
    }

    pub fn mul(&self, x: &[f64], y: &[f64]) -> Vec<f64> {
        let n = self.dim;
        assert!(
            x.len() == n && y.len() == n,
            "vector length does not match algebra dimension"
        );
        let mut out = vec![0.0; n];
        for i in 0..n {
            if x[i] == 0.0 {
                continue;
            }
            for j in 0..n {
                let s = x[i] * y[j];
                if s == 0.0 {
                    continue;
                }
                for (o, c) in out.iter_mut().zip(self.basis_product(i, j)) {
                    *o += s * c;
                }
            }
        }
        out
    }

    /// Largest entrywise difference between structure tensors.
    pub fn max_tensor_diff(&self, other: &Algebra) -> f64 {
        if self.dim != other.dim {
            return f64::INFINITY;
        }
        self.c
            .iter()
            .zip(&other.c)
            .fold(0.0, |m, (a, b)| m.max((a - b).abs()))
    }
}

/// Matrix of `x ↦ a·x`.
pub fn left_mult(alg: &Algebra, a: &[f64]) -> Mat {
    let n = alg.dim();
    let mut m = Mat::zeros(n, n);
    for i in 0..n {
        if a[i] == 0.0 {
            continue;
        }
        for j in 0..n {
            for (k, c) in alg.basis_product(i, j).iter().enumerate() {
                m[(k, j)] += a[i] * c;
            }
        }
    }
    m
}

/// Matrix of `x ↦ x·a`.
pub fn right_mult(alg: &Algebra, a: &[f64]) -> Mat {
    let n = alg.dim();
    let mut m = Mat::zeros(n, n);
    for j in 0..n {
        if a[j] == 0.0 {
            continue;
        }
        for i in 0..n {
            for (k, c) in alg.basis_product(i, j).iter().enumerate() {
                m[(k, i)] += a[j] * c;
            }
        }
    }
    m
}

/// The double sign `(ℓ, r)`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub struct SignPair {
    pub ell: Sign,
    pub r: Sign,
}

impl SignPair {
    pub const fn new(ell: Sign, r: Sign) -> Self {
        SignPair { ell, r }
    }

    pub fn all() -> [SignPair; 4] {
        use Sign::*;
        [
            SignPair::new(Plus, Plus),
            SignPair::new(Plus, Minus),
            SignPair::new(Minus, Plus),
            SignPair::new(Minus, Minus),
        ]
    }

    pub fn swap(self) -> SignPair {
        SignPair::new(self.r, self.ell)
    }

    /// Componentwise product.
    pub fn times(self, ell: Sign, r: Sign) -> SignPair {
        SignPair::new(self.ell * ell, self.r * r)
    }

    pub fn label(self) -> &'static str {
        match (self.ell, self.r) {
            (Sign::Plus, Sign::Plus) => "++",
            (Sign::Plus, Sign::Minus) => "+-",
            (Sign::Minus, Sign::Plus) => "-+",
            (Sign::Minus, Sign::Minus) => "--",
        }
    }
}

impl fmt::Display for SignPair {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.label())
    }
}

impl FromStr for SignPair {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        SignPair::all()
            .into_iter()
            .find(|p| p.label() == s)
            .ok_or_else(|| Error::InvalidInput(format!("unknown block label {s:?}")))
    }
}

impl Serialize for SignPair {
    fn serialize<S: serde::Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        s.serialize_str(self.label())
    }
}

impl<'de> Deserialize<'de> for SignPair {
    fn deserialize<D: serde::Deserializer<'de>>(d: D) -> std::result::Result<Self, D::Error> {
        let s = String::deserialize(d)?;
        s.parse().map_err(serde::de::Error::custom)
    }
}

/// Seeded sampling parameters shared by the randomized checks.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct Sampling {
    pub samples: usize,
    pub tol: f64,
    pub seed: u64,
}

impl Default for Sampling {
    fn default() -> Self {
        Sampling {
            samples: 1000,
            tol: DEFAULT_TOL,
            seed: 0,
        }
    }
}

impl Sampling {
    pub fn new(samples: usize, tol: f64, seed: u64) -> Self {
        Sampling { samples, tol, seed }
    }
}

/// Uniformly distributed point of the unit sphere in `ℝⁿ`.
pub fn random_unit_vector<R: Rng + ?Sized>(rng: &mut R, n: usize) -> Vec<f64> {
    loop {
        let v: Vec<f64> = (0..n).map(|_| rng.gen_range(-1.0..1.0)).collect();
        let r = norm(&v);
        if r > 1e-3 && r <= 1.0 {
            return v.iter().map(|x| x / r).collect();
        }
    }
}

/// Double sign of `alg`, evaluated at every basis vector and at
/// `samples` random nonzero points. All evaluations must agree.
pub fn sign_pair(alg: &Algebra, opts: Sampling) -> Result<SignPair> {
    let n = alg.dim();
    if n == 1 {
        return Err(Error::DimensionOne);
    }
    let mut rng = ChaCha8Rng::seed_from_u64(opts.seed);
    let mut seen: Option<SignPair> = None;
    let points = (0..n)
        .map(|i| unit_vector(n, i))
        .chain((0..opts.samples).map(|_| random_unit_vector(&mut rng, n)));
    for a in points {
        let here = SignPair::new(
            sign_det(&left_mult(alg, &a), opts.tol)?,
            sign_det(&right_mult(alg, &a), opts.tol)?,
        );
        match seen {
            None => seen = Some(here),
            Some(p) if p.ell != here.ell => return Err(Error::SignInconsistent { side: "left" }),
            Some(p) if p.r != here.r => return Err(Error::SignInconsistent { side: "right" }),
            Some(_) => {}
        }
    }
    Ok(seen.expect("at least one basis vector"))
}

/// Block label of `alg`; same contract as [`sign_pair`].
pub fn block_of(alg: &Algebra, opts: Sampling) -> Result<&'static str> {
    sign_pair(alg, opts).map(SignPair::label)
}

fn require_invertible(m: &Mat, what: &str, n: usize) -> Result<()> {
    if m.rows() != n || !m.is_square() {
        return Err(Error::InvalidMatrix(format!("{what} must be {n}x{n}")));
    }
    sign_det(m, DEFAULT_TOL)
        .map(|_| ())
        .map_err(|_| Error::SingularOperator(what.to_string()))
}

/// Isotope `A_{S,T}` with multiplication `x ∘ y = S(x)·T(y)`.
pub fn isotope(alg: &Algebra, s: &Mat, t: &Mat) -> Result<Algebra> {
    let n = alg.dim();
    require_invertible(s, "left isotopy map", n)?;
    require_invertible(t, "right isotopy map", n)?;
    let s_cols = s.to_cols();
    let t_cols = t.to_cols();
    let out = Algebra::from_products(n, |i, j| alg.mul(&s_cols[i], &t_cols[j]))?;
    Ok(out.with_name(format!("isotope({})", alg.name())))
}

/// Opposite algebra: `c_op[i][j][k] = c[j][i][k]`.
pub fn opposite(alg: &Algebra) -> Algebra {
    let n = alg.dim();
    let out =
        Algebra::from_products(n, |i, j| alg.basis_product(j, i).to_vec()).expect("same shape");
    Algebra {
        name: format!("op({})", alg.name()),
        labels: alg.labels.clone(),
        ..out
    }
}

/// Transport of structure along `F`: the product on the target is
/// `x·y = F(F⁻¹x · F⁻¹y)`, making `F` an isomorphism.
pub fn transport(alg: &Algebra, f: &Mat) -> Result<Algebra> {
    let n = alg.dim();
    require_invertible(f, "transport map", n)?;
    let finv = f
        .inverse()
        .map_err(|_| Error::SingularOperator("transport map".into()))?;
    let cols = finv.to_cols();
    let out = Algebra::from_products(n, |i, j| f.mul_vec(&alg.mul(&cols[i], &cols[j])))?;
    Ok(out.with_name(format!("transport({})", alg.name())))
}

/// `max_{i,j} ‖F(eᵢeⱼ) − F(eᵢ)F(eⱼ)‖∞`.
pub fn morphism_residual(f: &Mat, src: &Algebra, dst: &Algebra) -> f64 {
    let n = src.dim();
    assert!(
        f.cols() == n && f.rows() == dst.dim(),
        "map shape does not match algebras"
    );
    let images = f.to_cols();
    let mut worst: f64 = 0.0;
    for i in 0..n {
        for j in 0..n {
            let lhs = f.mul_vec(src.basis_product(i, j));
            let rhs = dst.mul(&images[i], &images[j]);
            for (a, b) in lhs.iter().zip(&rhs) {
                worst = worst.max((a - b).abs());
            }
        }
    }
    worst
}

/// Whether `F` is an algebra morphism `src → dst` within `tol`.
pub fn is_morphism(f: &Mat, src: &Algebra, dst: &Algebra, tol: f64) -> Result<bool> {
    if f.cols() != src.dim() || f.rows() != dst.dim() {
        return Err(Error::InvalidMatrix(
            "map shape does not match algebras".into(),
        ));
    }
    if f.max_abs() <= tol {
        return Err(Error::ZeroMap);
    }
    Ok(morphism_residual(f, src, dst) <= tol)
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum DivisionMode {
    Exact2d,
    Sampled,
}

impl FromStr for DivisionMode {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        match s {
            "exact2d" | "exact_2d" => Ok(DivisionMode::Exact2d),
            "sampled" => Ok(DivisionMode::Sampled),
            _ => Err(Error::InvalidInput(format!("unknown division mode {s:?}"))),
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum DivisionVerdict {
    Division,
    NotDivision,
    ProbablyDivision,
}

impl fmt::Display for DivisionVerdict {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            DivisionVerdict::Division => "division",
            DivisionVerdict::NotDivision => "not_division",
            DivisionVerdict::ProbablyDivision => "probably_division",
        })
    }
}

/// Coefficient matrix of the binary quadratic form `a ↦ det(a₀P + a₁Q)`.
fn det_form_2d(p: &Mat, q: &Mat) -> Mat {
    let mixed = p[(0, 0)] * q[(1, 1)] + p[(1, 1)] * q[(0, 0)]
        - p[(0, 1)] * q[(1, 0)]
        - p[(1, 0)] * q[(0, 1)];
    Mat::from_fn(2, 2, |i, j| match (i, j) {
        (0, 0) => p.det(),
        (1, 1) => q.det(),
        _ => mixed / 2.0,
    })
}

fn is_definite(form: &Mat, tol: f64) -> bool {
    let (vals, _) = matkit::sym_eigen(form);
    vals.iter().all(|&l| l > tol) || vals.iter().all(|&l| l < -tol)
}

/// Division test. `Exact2d` decides definiteness of the determinant forms
/// of `L_a` and `R_a` (dimension ≤ 2); `Sampled` looks for a near-singular
/// multiplication operator at random unit points.
pub fn is_division(alg: &Algebra, mode: DivisionMode, opts: Sampling) -> Result<DivisionVerdict> {
    let n = alg.dim();
    match mode {
        DivisionMode::Exact2d => {
            if n > 2 {
                return Err(Error::ModeMismatch(n));
            }
            if n == 1 {
                return Ok(if alg.coef(0, 0, 0).abs() > opts.tol {
                    DivisionVerdict::Division
                } else {
                    DivisionVerdict::NotDivision
                });
            }
            let (e0, e1) = (unit_vector(2, 0), unit_vector(2, 1));
            let lf = det_form_2d(&left_mult(alg, &e0), &left_mult(alg, &e1));
            let rf = det_form_2d(&right_mult(alg, &e0), &right_mult(alg, &e1));
            Ok(
                if is_definite(&lf, opts.tol) && is_definite(&rf, opts.tol) {
                    DivisionVerdict::Division
                } else {
                    DivisionVerdict::NotDivision
                },
            )
        }
        DivisionMode::Sampled => {
            let mut rng = ChaCha8Rng::seed_from_u64(opts.seed);
            let points = (0..n)
                .map(|i| unit_vector(n, i))
                .chain((0..opts.samples).map(|_| random_unit_vector(&mut rng, n)));
            for a in points {
                let dl = left_mult(alg, &a).det().abs();
                let dr = right_mult(alg, &a).det().abs();
                if dl.min(dr) <= opts.tol {
                    return Ok(DivisionVerdict::NotDivision);
                }
            }
            Ok(DivisionVerdict::ProbablyDivision)
        }
    }
}

/// Left, right and two-sided unities. Each list is empty or holds the
/// minimum-norm solution of the corresponding linear system.
#[derive(Clone, Debug, Default, PartialEq, Serialize, Deserialize)]
pub struct Unities {
    pub left: Vec<Vec<f64>>,
    pub right: Vec<Vec<f64>>,
    pub two_sided: Vec<Vec<f64>>,
}

/// Rows of the linear system `L_e = I` (left) or `R_e = I` (right) in the
/// unknown `e`, with right-hand side.
fn unity_system(alg: &Algebra, left: bool) -> (Vec<Vec<f64>>, Vec<f64>) {
    let n = alg.dim();
    let mut rows = Vec::with_capacity(n * n);
    let mut rhs = Vec::with_capacity(n * n);
    for j in 0..n {
        for k in 0..n {
            let row = (0..n)
                .map(|i| {
                    if left {
                        alg.coef(i, j, k)
                    } else {
                        alg.coef(j, i, k)
                    }
                })
                .collect();
            rows.push(row);
            rhs.push(if j == k { 1.0 } else { 0.0 });
        }
    }
    (rows, rhs)
}

fn solve_system(rows: &[Vec<f64>], rhs: &[f64], tol: f64) -> Option<Vec<f64>> {
    let m = Mat::from_rows(rows).ok()?;
    let x = lstsq(&m, rhs, 1e-13);
    let resid = m
        .mul_vec(&x)
        .iter()
        .zip(rhs)
        .fold(0.0f64, |a, (p, q)| a.max((p - q).abs()));
    (resid <= tol).then_some(x)
}

pub fn find_unities(alg: &Algebra, tol: f64) -> Unities {
    let (lrows, lrhs) = unity_system(alg, true);
    let (rrows, rrhs) = unity_system(alg, false);
    let left = solve_system(&lrows, &lrhs, tol);
    let right = solve_system(&rrows, &rrhs, tol);
    let both_rows: Vec<Vec<f64>> = lrows.iter().chain(&rrows).cloned().collect();
    let both_rhs: Vec<f64> = lrhs.iter().chain(&rrhs).copied().collect();
    let two = solve_system(&both_rows, &both_rhs, tol);
    Unities {
        left: left.into_iter().collect(),
        right: right.into_iter().collect(),
        two_sided: two.into_iter().collect(),
    }
}

/// Reduced row echelon form of the column span, returned as columns.
/// Gives a deterministic basis for a subspace found numerically.
pub fn canonical_basis(cols: &Mat, tol: f64) -> Mat {
    let mut m = cols.transpose();
    let (r, c) = (m.rows(), m.cols());
    let mut lead = 0;
    for col in 0..c {
        if lead == r {
            break;
        }
        let p = (lead..r)
            .max_by(|&a, &b| m[(a, col)].abs().total_cmp(&m[(b, col)].abs()))
            .unwrap();
        if m[(p, col)].abs() <= tol {
            continue;
        }
        for j in 0..c {
            let t = m[(lead, j)];
            m[(lead, j)] = m[(p, j)];
            m[(p, j)] = t;
        }
        let piv = m[(lead, col)];
        for j in 0..c {
            m[(lead, j)] /= piv;
        }
        for i in 0..r {
            if i != lead {
                let f = m[(i, col)];
                if f != 0.0 {
                    for j in 0..c {
                        m[(i, j)] -= f * m[(lead, j)];
                    }
                }
            }
        }
        lead += 1;
    }
    let mut out = m.transpose();
    for v in 0..out.rows() * out.cols() {
        let (i, j) = (v / out.cols(), v % out.cols());
        if out[(i, j)].abs() <= tol {
            out[(i, j)] = 0.0;
        }
    }
    Mat::from_fn(c, lead, |i, j| out[(i, j)])
}

fn push_constraint(rows: &mut Vec<Vec<f64>>, n: usize, per_basis: impl Fn(usize) -> Vec<f64>) {
    let cols: Vec<Vec<f64>> = (0..n).map(per_basis).collect();
    for k in 0..cols[0].len() {
        rows.push((0..n).map(|i| cols[i][k]).collect());
    }
}

fn solution_space(rows: Vec<Vec<f64>>, n: usize, tol: f64) -> Mat {
    if rows.is_empty() {
        return Mat::identity(n);
    }
    let m = Mat::from_rows(&rows).expect("constraint rows are rectangular");
    let ns = null_space(&m, tol);
    if ns.cols() == 0 {
        return ns;
    }
    canonical_basis(&ns, 1e-12)
}

fn commutator_rows(alg: &Algebra, rows: &mut Vec<Vec<f64>>) {
    let n = alg.dim();
    for j in 0..n {
        push_constraint(rows, n, |i| {
            alg.basis_product(i, j)
                .iter()
                .zip(alg.basis_product(j, i))
                .map(|(a, b)| a - b)
                .collect()
        });
    }
}

/// Basis (columns) of `{a : ax = xa for all x}`.
pub fn commutant(alg: &Algebra, tol: f64) -> Mat {
    let mut rows = Vec::new();
    commutator_rows(alg, &mut rows);
    solution_space(rows, alg.dim(), tol)
}

/// Basis (columns) of the centre: elements that commute with everything
/// and associate in every position.
pub fn center(alg: &Algebra, tol: f64) -> Mat {
    let n = alg.dim();
    let mut rows = Vec::new();
    commutator_rows(alg, &mut rows);
    let e = |i: usize| unit_vector(n, i);
    let assoc = |x: &[f64], y: &[f64], z: &[f64]| -> Vec<f64> {
        let l = alg.mul(&alg.mul(x, y), z);
        let r = alg.mul(x, &alg.mul(y, z));
        l.iter().zip(&r).map(|(a, b)| a - b).collect()
    };
    for p in 0..n {
        for q in 0..n {
            push_constraint(&mut rows, n, |i| assoc(&e(i), &e(p), &e(q)));
            push_constraint(&mut rows, n, |i| assoc(&e(p), &e(i), &e(q)));
            push_constraint(&mut rows, n, |i| assoc(&e(p), &e(q), &e(i)));
        }
    }
    solution_space(rows, n, tol)
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum Classical {
    R,
    C,
    H,
    O,
}

impl FromStr for Classical {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        match s {
            "R" | "r" | "real" => Ok(Classical::R),
            "C" | "c" | "complex" => Ok(Classical::C),
            "H" | "h" | "quaternion" | "quaternions" => Ok(Classical::H),
            "O" | "o" | "octonion" | "octonions" => Ok(Classical::O),
            _ => Err(Error::InvalidInput(format!(
                "unknown classical algebra {s:?}"
            ))),
        }
    }
}

/// Hamilton's table on the basis `1, i, j, k`: `(sign, index)` of `eₐe_b`.
const HAMILTON: [[(f64, usize); 4]; 4] = [
    [(1.0, 0), (1.0, 1), (1.0, 2), (1.0, 3)],
    [(1.0, 1), (-1.0, 0), (1.0, 3), (-1.0, 2)],
    [(1.0, 2), (-1.0, 3), (-1.0, 0), (1.0, 1)],
    [(1.0, 3), (1.0, 2), (-1.0, 1), (-1.0, 0)],
];

fn standard_conjugation(n: usize) -> Mat {
    let mut d = vec![-1.0; n];
    d[0] = 1.0;
    Mat::diag(&d)
}

/// Cayley–Dickson double of an algebra with involution `conj`:
/// `(a, b)(c, d) = (ac − d̄b, da + bc̄)` on `A ⊕ A`.
pub fn cayley_dickson(alg: &Algebra, conj: &Mat) -> Algebra {
    let n = alg.dim();
    let split = |v: &[f64]| (v[..n].to_vec(), v[n..].to_vec());
    Algebra::from_products(2 * n, |i, j| {
        let (a, b) = split(&unit_vector(2 * n, i));
        let (c, d) = split(&unit_vector(2 * n, j));
        let ac = alg.mul(&a, &c);
        let dbar_b = alg.mul(&conj.mul_vec(&d), &b);
        let da = alg.mul(&d, &a);
        let b_cbar = alg.mul(&b, &conj.mul_vec(&c));
        ac.iter()
            .zip(&dbar_b)
            .map(|(x, y)| x - y)
            .chain(da.iter().zip(&b_cbar).map(|(x, y)| x + y))
            .collect()
    })
    .expect("doubled tensor has the right shape")
}

/// The classical real division algebras ℝ, ℂ, ℍ, 𝕆 in their standard bases.
pub fn classical(which: Classical) -> Algebra {
    let labels = |names: &[&str]| names.iter().map(|s| s.to_string()).collect::<Vec<_>>();
    match which {
        Classical::R => Algebra::new(1, vec![1.0])
            .unwrap()
            .with_name("R")
            .with_labels(labels(&["1"]))
            .unwrap(),
        Classical::C => Algebra::from_products(2, |i, j| match (i, j) {
            (0, 0) => vec![1.0, 0.0],
            (0, 1) | (1, 0) => vec![0.0, 1.0],
            _ => vec![-1.0, 0.0],
        })
        .unwrap()
        .with_name("C")
        .with_labels(labels(&["1", "i"]))
        .unwrap(),
        Classical::H => Algebra::from_products(4, |i, j| {
            let (s, k) = HAMILTON[i][j];
            let mut v = vec![0.0; 4];
            v[k] = s;
            v
        })
        .unwrap()
        .with_name("H")
        .with_labels(labels(&["1", "i", "j", "k"]))
        .unwrap(),
        Classical::O => cayley_dickson(&classical(Classical::H), &standard_conjugation(4))
            .with_name("O")
            .with_labels(labels(&["1", "i", "j", "k", "l", "il", "jl", "kl"]))
            .unwrap(),
    }
}

/// JSON document for an algebra.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct AlgebraDoc {
    pub dim: usize,
    #[serde(default)]
    pub labels: Vec<String>,
    pub structure: Vec<Vec<Vec<f64>>>,
    #[serde(default, skip_serializing_if = "String::is_empty")]
    pub name: String,
}

impl From<&Algebra> for AlgebraDoc {
    fn from(a: &Algebra) -> Self {
        let n = a.dim();
        let structure = (0..n)
            .map(|i| (0..n).map(|j| a.basis_product(i, j).to_vec()).collect())
            .collect();
        AlgebraDoc {
            dim: n,
            labels: a.labels.clone(),
            structure,
            name: a.name.clone(),
        }
    }
}

impl TryFrom<AlgebraDoc> for Algebra {
    type Error = Error;
    fn try_from(doc: AlgebraDoc) -> Result<Self> {
        let n = doc.dim;
        if doc.structure.len() != n
            || doc
                .structure
                .iter()
                .any(|r| r.len() != n || r.iter().any(|v| v.len() != n))
        {
            return Err(Error::InvalidInput(format!(
                "structure tensor is not {n}x{n}x{n}"
            )));
        }
        let c: Vec<f64> = doc.structure.into_iter().flatten().flatten().collect();
        let alg = Algebra::new(n, c)?.with_name(doc.name);
        if doc.labels.is_empty() {
            Ok(alg)
        } else {
            alg.with_labels(doc.labels)
        }
    }
}

impl Serialize for Algebra {
    fn serialize<S: serde::Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        AlgebraDoc::from(self).serialize(s)
    }
}

impl<'de> Deserialize<'de> for Algebra {
    fn deserialize<D: serde::Deserializer<'de>>(d: D) -> std::result::Result<Self, D::Error> {
        let doc = AlgebraDoc::deserialize(d)?;
        Algebra::try_from(doc).map_err(serde::de::Error::custom)
    }
}

impl Algebra {
    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("algebra serializes")
    }

    pub fn from_json(text: &str) -> Result<Self> {
        Ok(serde_json::from_str(text)?)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn opts() -> Sampling {
        Sampling::new(100, DEFAULT_TOL, 1)
    }

    fn k2() -> Mat {
        Mat::diag(&[1.0, -1.0])
    }

    #[test]
    fn left_mult_examples() {
        let c = classical(Classical::C);
        let li = left_mult(&c, &[0.0, 1.0]);
        assert_eq!(
            li,
            Mat::from_rows(&[vec![0.0, -1.0], vec![1.0, 0.0]]).unwrap()
        );
        let h = classical(Classical::H);
        assert_eq!(left_mult(&h, &[1.0, 0.0, 0.0, 0.0]), Mat::identity(4));
        // det L_a = |a|⁴ = 16 for a = 1 + i + j + k
        assert!((left_mult(&h, &[1.0; 4]).det() - 16.0).abs() < 1e-12);
        assert!((right_mult(&h, &[1.0; 4]).det() - 16.0).abs() < 1e-12);
    }

    #[test]
    fn hamilton_relations() {
        let h = classical(Classical::H);
        let e = |i| unit_vector(4, i);
        assert_eq!(h.mul(&e(1), &e(2)), e(3));
        assert_eq!(
            h.mul(&e(2), &e(1)),
            e(3).iter().map(|x| -x).collect::<Vec<_>>()
        );
        for i in 1..4 {
            assert_eq!(h.mul(&e(i), &e(i)), vec![-1.0, 0.0, 0.0, 0.0]);
        }
        let c = classical(Classical::C);
        assert_eq!(c.mul(&[0.0, 1.0], &[0.0, 1.0]), vec![-1.0, 0.0]);
    }

    #[test]
    fn cayley_dickson_of_c_is_hamilton() {
        let c = classical(Classical::C);
        let d = cayley_dickson(&c, &standard_conjugation(2));
        assert_eq!(d.max_tensor_diff(&classical(Classical::H)), 0.0);
    }

    #[test]
    fn octonions_are_normed() {
        let o = classical(Classical::O);
        let mut rng = ChaCha8Rng::seed_from_u64(11);
        for _ in 0..1000 {
            let x: Vec<f64> = (0..8).map(|_| rng.gen_range(-1.0..1.0)).collect();
            let y: Vec<f64> = (0..8).map(|_| rng.gen_range(-1.0..1.0)).collect();
            assert!((norm(&o.mul(&x, &y)) - norm(&x) * norm(&y)).abs() < 1e-12);
        }
        let v = is_division(
            &o,
            DivisionMode::Sampled,
            Sampling::new(10_000, DEFAULT_TOL, 4),
        )
        .unwrap();
        assert_eq!(v, DivisionVerdict::ProbablyDivision);
    }

    #[test]
    fn sign_pairs_of_small_examples() {
        let c = classical(Classical::C);
        assert_eq!(block_of(&c, opts()).unwrap(), "++");
        assert_eq!(block_of(&classical(Classical::H), opts()).unwrap(), "++");
        assert_eq!(block_of(&classical(Classical::O), opts()).unwrap(), "++");
        let ckk = isotope(&c, &k2(), &k2()).unwrap();
        assert_eq!(block_of(&ckk, opts()).unwrap(), "--");
        let cik = isotope(&c, &Mat::identity(2), &k2()).unwrap();
        assert_eq!(block_of(&cik, opts()).unwrap(), "-+");
        assert_eq!(block_of(&opposite(&cik), opts()).unwrap(), "+-");
    }

    #[test]
    fn conjugate_product_determinants() {
        // x∘y = x̄ȳ: L_a = conj(a)·K as complex-linear-times-conjugation, det = −|a|².
        let c = classical(Classical::C);
        let ckk = isotope(&c, &k2(), &k2()).unwrap();
        let a = [0.3, -1.2];
        let expected = -(0.3f64 * 0.3 + 1.2 * 1.2);
        assert!((left_mult(&ckk, &a).det() - expected).abs() < 1e-14);
        assert!((right_mult(&ckk, &a).det() - expected).abs() < 1e-14);
        // full tensor of x̄ȳ
        let e = |i| unit_vector(2, i);
        assert_eq!(ckk.mul(&e(0), &e(0)), vec![1.0, 0.0]);
        assert_eq!(ckk.mul(&e(0), &e(1)), vec![0.0, -1.0]);
        assert_eq!(ckk.mul(&e(1), &e(1)), vec![-1.0, 0.0]);
    }

    #[test]
    fn sign_pair_errors() {
        let r = classical(Classical::R);
        assert_eq!(sign_pair(&r, opts()).unwrap_err(), Error::DimensionOne);
        // split algebra: e₁e₁ = e₁, e₂e₂ = e₂
        let split = Algebra::from_products(2, |i, j| {
            if i == j {
                unit_vector(2, i)
            } else {
                vec![0.0, 0.0]
            }
        })
        .unwrap();
        assert!(matches!(
            sign_pair(&split, opts()),
            Err(Error::DegenerateSign { .. })
        ));
        // L_a = a₀I + a₁·diag(2, −2) changes sign between e₀ and e₁.
        let mixed = Algebra::from_products(2, |i, j| match (i, j) {
            (0, _) => unit_vector(2, j),
            (1, 0) => vec![2.0, 0.0],
            _ => vec![0.0, -2.0],
        })
        .unwrap();
        assert!(sign_pair(&mixed, opts()).is_err());
    }

    #[test]
    fn isotope_identity_and_composition() {
        let h = classical(Classical::H);
        assert_eq!(
            isotope(&h, &Mat::identity(4), &Mat::identity(4))
                .unwrap()
                .tensor(),
            h.tensor()
        );
        let mut rng = ChaCha8Rng::seed_from_u64(2);
        let m = |rng: &mut ChaCha8Rng| matkit::random_matrix_with(rng, 4, 4, 1.0);
        let (s, t, s2, t2) = (m(&mut rng), m(&mut rng), m(&mut rng), m(&mut rng));
        let lhs = isotope(&isotope(&h, &s, &t).unwrap(), &s2, &t2).unwrap();
        let rhs = isotope(&h, &(&s * &s2), &(&t * &t2)).unwrap();
        assert!(lhs.max_tensor_diff(&rhs) < 1e-12);
    }

    #[test]
    fn isotope_rejects_singular_maps() {
        let c = classical(Classical::C);
        let sing = Mat::from_rows(&[vec![1.0, 1.0], vec![1.0, 1.0]]).unwrap();
        assert!(matches!(
            isotope(&c, &sing, &Mat::identity(2)),
            Err(Error::SingularOperator(_))
        ));
        assert!(matches!(
            transport(&c, &sing),
            Err(Error::SingularOperator(_))
        ));
    }

    #[test]
    fn opposite_is_involution() {
        let o = classical(Classical::O);
        assert_eq!(opposite(&opposite(&o)).tensor(), o.tensor());
        let c = classical(Classical::C);
        assert_eq!(opposite(&c).tensor(), c.tensor());
    }

    #[test]
    fn morphism_examples() {
        let c = classical(Classical::C);
        assert!(is_morphism(&Mat::identity(2), &c, &c, 1e-12).unwrap());
        assert!(is_morphism(&k2(), &c, &c, 1e-12).unwrap());
        let h = classical(Classical::H);
        let kh = Mat::diag(&[1.0, -1.0, 1.0, 1.0]);
        assert!(!is_morphism(&kh, &h, &h, 1e-9).unwrap());
        assert_eq!(
            is_morphism(&Mat::zeros(2, 2), &c, &c, 1e-9).unwrap_err(),
            Error::ZeroMap
        );
        let f = Mat::from_rows(&[vec![2.0, 1.0], vec![-0.5, 1.5]]).unwrap();
        let b = transport(&c, &f).unwrap();
        assert!(is_morphism(&f, &c, &b, 1e-12).unwrap());
        assert_eq!(
            transport(&c, &Mat::identity(2)).unwrap().tensor(),
            c.tensor()
        );
    }

    #[test]
    fn division_checks() {
        let c = classical(Classical::C);
        assert_eq!(
            is_division(&c, DivisionMode::Exact2d, opts()).unwrap(),
            DivisionVerdict::Division
        );
        let split = Algebra::from_products(2, |i, j| {
            if i == j {
                unit_vector(2, i)
            } else {
                vec![0.0, 0.0]
            }
        })
        .unwrap();
        assert_eq!(
            is_division(&split, DivisionMode::Exact2d, opts()).unwrap(),
            DivisionVerdict::NotDivision
        );
        assert_eq!(
            is_division(&split, DivisionMode::Sampled, opts()).unwrap(),
            DivisionVerdict::NotDivision
        );
        let h = classical(Classical::H);
        assert_eq!(
            is_division(&h, DivisionMode::Exact2d, opts()).unwrap_err(),
            Error::ModeMismatch(4)
        );
        let mut rng = ChaCha8Rng::seed_from_u64(8);
        let s = matkit::random_matrix_with(&mut rng, 4, 4, 1.0);
        let t = matkit::random_matrix_with(&mut rng, 4, 4, 1.0);
        let iso = isotope(&h, &s, &t).unwrap();
        assert_eq!(
            is_division(&iso, DivisionMode::Sampled, opts()).unwrap(),
            DivisionVerdict::ProbablyDivision
        );
    }

    #[test]
    fn unities() {
        let c = classical(Classical::C);
        let u = find_unities(&c, 1e-9);
        assert_eq!(u.two_sided.len(), 1);
        assert!((u.two_sided[0][0] - 1.0).abs() < 1e-12 && u.two_sided[0][1].abs() < 1e-12);

        let ckk = isotope(&c, &k2(), &k2()).unwrap();
        let u = find_unities(&ckk, 1e-9);
        assert!(u.left.is_empty() && u.right.is_empty() && u.two_sided.is_empty());

        // x∘y = x·ȳ: 1∘y = ȳ, x∘1 = x. Only a right unity.
        let cik = isotope(&c, &Mat::identity(2), &k2()).unwrap();
        let u = find_unities(&cik, 1e-9);
        assert!(u.left.is_empty());
        assert_eq!(u.right.len(), 1);
        assert!(u.two_sided.is_empty());
        // x∘y = x̄·y has a left unity and no right unity.
        let cki = isotope(&c, &k2(), &Mat::identity(2)).unwrap();
        let u = find_unities(&cki, 1e-9);
        assert_eq!(u.left.len(), 1);
        assert!(u.right.is_empty());
    }

    #[test]
    fn centres() {
        let h = classical(Classical::H);
        let z = center(&h, 1e-9);
        assert_eq!(z, Mat::from_cols(&[vec![1.0, 0.0, 0.0, 0.0]]).unwrap());
        let c = classical(Classical::C);
        assert_eq!(center(&c, 1e-9), Mat::identity(2));
        let o = classical(Classical::O);
        let z = center(&o, 1e-9);
        assert_eq!(z.cols(), 1);
        assert!((z[(0, 0)] - 1.0).abs() < 1e-12);
        assert!((1..8).all(|i| z[(i, 0)].abs() < 1e-12));
    }

    #[test]
    fn json_round_trip() {
        let o = classical(Classical::O);
        let back = Algebra::from_json(&o.to_json()).unwrap();
        assert_eq!(back, o);
        let bad = r#"{"dim": 2, "labels": [], "structure": [[[1,0]]]}"#;
        assert!(Algebra::from_json(bad).is_err());
    }
}
