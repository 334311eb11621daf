//! Two-dimensional real division algebras.
//!
//! Every such algebra is isomorphic to an isotope `ℂ_{AKⁱ, BKʲ}` (or
//! `ℂ_{KA, KB}` in the `(1, 1)` block) with `A`, `B` symmetric positive
//! definite of determinant one and `K` complex conjugation. Morphisms between
//! these normal forms are exactly the elements of `C₂ = ⟨K⟩`, or of
//! `D₃ = ⟨R, K⟩` in the `(1, 1)` block, that conjugate one pair onto the
//! other.

use std::fmt;

use num_complex::Complex64;
use rand::Rng;
use serde::{Deserialize, Serialize};

use crate::algebra::{
    classical, is_division, isotope, left_mult, morphism_residual, right_mult, Algebra, Classical,
    DivisionMode, DivisionVerdict, Sampling,
};
use crate::error::{Error, Result};
use crate::matkit::{is_spd1, normalize_det, polar_decompose, random_spd1_with, sign_det, Mat};

/// Residual allowed when checking a computed isomorphism, relative to the
/// size of the structure tensors involved.
const VERIFY_TOL: f64 = 1e-8;

/// Complex conjugation `K = diag(1, −1)`.
pub fn k_matrix() -> Mat {
    Mat::diag(&[1.0, -1.0])
}

/// Rotation by `2π/3`.
pub fn r_matrix() -> Mat {
    let h = 3f64.sqrt() / 2.0;
    Mat::from_rows(&[vec![-0.5, -h], vec![h, -0.5]]).unwrap()
}

/// Matrix of `z ↦ cz` on `ℂ = ℝ²`.
fn mult_matrix(c: Complex64) -> Mat {
    Mat::from_rows(&[vec![c.re, -c.im], vec![c.im, c.re]]).unwrap()
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub enum Group2D {
    C2,
    D3,
}

impl Group2D {
    /// The group acting on the block `(i, j)`.
    pub fn for_block(i: u8, j: u8) -> Group2D {
        if i == 1 && j == 1 {
            Group2D::D3
        } else {
            Group2D::C2
        }
    }

    /// All elements: `I, K` for C₂ and `I, R, R², K, RK, R²K` for D₃.
    pub fn elements(self) -> Vec<GroupElement2D> {
        let (k, r) = (k_matrix(), r_matrix());
        let r2 = &r * &r;
        let el = |label: &str, matrix: Mat| GroupElement2D {
            label: label.to_string(),
            matrix,
            group: self,
        };
        match self {
            Group2D::C2 => vec![el("I", Mat::identity(2)), el("K", k)],
            Group2D::D3 => vec![
                el("I", Mat::identity(2)),
                el("R", r.clone()),
                el("R^2", r2.clone()),
                el("K", k.clone()),
                el("RK", &r * &k),
                el("R^2K", &r2 * &k),
            ],
        }
    }
}

impl fmt::Display for Group2D {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Group2D::C2 => "C2",
            Group2D::D3 => "D3",
        })
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct GroupElement2D {
    pub label: String,
    pub matrix: Mat,
    pub group: Group2D,
}

/// `J_ij(A, B)`: exponents of `K` and the SPD determinant-one pair.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct NormalForm2D {
    pub i: u8,
    pub j: u8,
    #[serde(rename = "A")]
    pub a: Mat,
    #[serde(rename = "B")]
    pub b: Mat,
}

impl NormalForm2D {
    pub fn new(i: u8, j: u8, a: Mat, b: Mat) -> Result<Self> {
        let nf = NormalForm2D { i, j, a, b };
        nf.validate()?;
        Ok(nf)
    }

    pub fn validate(&self) -> Result<()> {
        if self.i > 1 || self.j > 1 {
            return Err(Error::InvalidInput(format!(
                "exponents ({}, {}) must be 0 or 1",
                self.i, self.j
            )));
        }
        for (name, m) in [("A", &self.a), ("B", &self.b)] {
            if m.rows() != 2 || !is_spd1(m, 1e-9) {
                return Err(Error::InvalidMatrix(format!(
                    "{name} must be a 2x2 SPD matrix of determinant 1"
                )));
            }
        }
        Ok(())
    }

    pub fn group(&self) -> Group2D {
        Group2D::for_block(self.i, self.j)
    }

    /// The sign pair label `((−1)^j, (−1)^i)`.
    pub fn block(&self) -> &'static str {
        match (self.j, self.i) {
            (0, 0) => "++",
            (0, _) => "+-",
            (_, 0) => "-+",
            _ => "--",
        }
    }
}

/// Random normal form with the given exponents.
pub fn random_normal_form<R: Rng + ?Sized>(rng: &mut R, i: u8, j: u8) -> NormalForm2D {
    NormalForm2D {
        i,
        j,
        a: random_spd1_with(rng, 2),
        b: random_spd1_with(rng, 2),
    }
}

/// The isotope encoded by a normal form.
pub fn build2d(nf: &NormalForm2D) -> Result<Algebra> {
    nf.validate()?;
    let k = k_matrix();
    let c = classical(Classical::C);
    let (s, t) = if nf.i == 1 && nf.j == 1 {
        (&k * &nf.a, &k * &nf.b)
    } else {
        let pow = |e: u8| if e == 1 { k.clone() } else { Mat::identity(2) };
        (&nf.a * &pow(nf.i), &nf.b * &pow(nf.j))
    };
    Ok(isotope(&c, &s, &t)?.with_name(format!("J{}{}", nf.i, nf.j)))
}

/// Elements `g` of the group with `(gAgᵗ, gBgᵗ) = (C, D)` within `tol`.
pub fn groupoid_hom(
    group: Group2D,
    x: (&Mat, &Mat),
    y: (&Mat, &Mat),
    tol: f64,
) -> Vec<GroupElement2D> {
    group
        .elements()
        .into_iter()
        .filter(|g| {
            let gt = g.matrix.transpose();
            let act = |m: &Mat| &(&g.matrix * m) * &gt;
            act(x.0).max_abs_diff(y.0) <= tol && act(x.1).max_abs_diff(y.1) <= tol
        })
        .collect()
}

/// Morphisms `build2d(src) → build2d(dst)`.
pub fn hom2d(src: &NormalForm2D, dst: &NormalForm2D, tol: f64) -> Result<Vec<GroupElement2D>> {
    src.validate()?;
    dst.validate()?;
    if (src.i, src.j) != (dst.i, dst.j) {
        return Err(Error::BlockMismatch {
            src: src.block().into(),
            dst: dst.block().into(),
        });
    }
    Ok(groupoid_hom(
        src.group(),
        (&src.a, &src.b),
        (&dst.a, &dst.b),
        tol,
    ))
}

fn tensor_scale(a: &Algebra, b: &Algebra) -> f64 {
    a.tensor()
        .iter()
        .chain(b.tensor())
        .fold(1.0f64, |m, x| m.max(x.abs()))
}

/// Albert's unitalization `A_{R_a⁻¹, L_a⁻¹}`, whose unity is `a·a`.
pub fn unitalize(alg: &Algebra, a: &[f64]) -> Result<(Algebra, Vec<f64>)> {
    let n = alg.dim();
    let ra = right_mult(alg, a)
        .inverse()
        .map_err(|_| Error::SingularOperator("R_a".into()))?;
    let la = left_mult(alg, a)
        .inverse()
        .map_err(|_| Error::SingularOperator("L_a".into()))?;
    let b = isotope(alg, &ra, &la)?;
    let unity = alg.mul(a, a);
    let id = Mat::identity(n);
    let err = left_mult(&b, &unity)
        .max_abs_diff(&id)
        .max(right_mult(&b, &unity).max_abs_diff(&id));
    if err > VERIFY_TOL * tensor_scale(alg, &b) {
        return Err(Error::NonConvergence(format!(
            "unity check residual {err:e}"
        )));
    }
    Ok((b, unity))
}

/// Isomorphism from a unital 2-dimensional division algebra onto `ℂ`,
/// sending the unity to `1` and an imaginary unit `v` (`v² = −u`) to `i`.
/// Of the two imaginary units, the one with positive second coordinate is
/// used (the first coordinate breaks a tie).
pub fn iso_to_c(b: &Algebra, u: &[f64], tol: f64) -> Result<Mat> {
    if b.dim() != 2 {
        return Err(Error::UnsupportedDimension(b.dim()));
    }
    // the coordinate axis least parallel to u, made orthogonal to it
    let k = if u[0].abs() <= u[1].abs() { 0 } else { 1 };
    let uu = u[0] * u[0] + u[1] * u[1];
    let mut w = [0.0; 2];
    w[k] = 1.0;
    let proj = u[k] / uu;
    let w = [w[0] - proj * u[0], w[1] - proj * u[1]];
    let basis = Mat::from_cols(&[u.to_vec(), w.to_vec()])?;
    // w² = p·u + q·w, so v = w − (q/2)u has v² = (p + q²/4)·u
    let pq = basis
        .solve(&b.mul(&w, &w))
        .map_err(|_| Error::NoImaginaryUnit)?;
    let (p, q) = (pq[0], pq[1]);
    let lambda = -(p + q * q / 4.0);
    if !(lambda > 0.0) {
        return Err(Error::NoImaginaryUnit);
    }
    let s = lambda.sqrt();
    let mut v = [(w[0] - q / 2.0 * u[0]) / s, (w[1] - q / 2.0 * u[1]) / s];
    let flip = if v[1].abs() > tol {
        v[1] < 0.0
    } else {
        v[0] < 0.0
    };
    if flip {
        v = [-v[0], -v[1]];
    }
    let f = Mat::from_cols(&[u.to_vec(), v.to_vec()])?.inverse()?;
    let c = classical(Classical::C);
    let resid = morphism_residual(&f, b, &c);
    if resid > VERIFY_TOL * tensor_scale(b, &c) {
        return Err(Error::NoImaginaryUnit);
    }
    Ok(f)
}

/// `σ = P·R_θ·Kⁱ` with `P` symmetric positive definite; returns
/// `(P / √det P, √det P · e^{iθ}, i)`.
fn split_operator(sigma: &Mat, tol: f64) -> Result<(Mat, Complex64, u8)> {
    let i = if sign_det(sigma, tol)? == crate::Sign::Minus {
        1
    } else {
        0
    };
    let (p, o) = polar_decompose(sigma)?;
    let rot = if i == 1 { &o * &k_matrix() } else { o };
    let theta = rot[(1, 0)].atan2(rot[(0, 0)]);
    let d = p.det().sqrt();
    Ok((p.scale(1.0 / d), Complex64::from_polar(d, theta), i))
}

/// Result of [`normal_form_2d`].
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Classified2D {
    pub normal_form: NormalForm2D,
    /// Isomorphism from the input onto `build2d(normal_form)`.
    pub iso: Mat,
    pub residual: f64,
}

/// Reduces a 2-dimensional division algebra to a normal form.
///
/// With `a = e₁`, unitalization and [`iso_to_c`] give `φ : A ≅ ℂ_{σ,τ}` for
/// `σ = φR_aφ⁻¹`, `τ = φL_aφ⁻¹`. Writing `σ = z_σ·P_σ·Kⁱ` and
/// `τ = z_τ·P_τ·Kʲ` (complex scalar, SPD of determinant one, power of `K`),
/// multiplication by `c` is an isomorphism `ℂ_{σ,τ} → ℂ_{λσL_c⁻¹, μτL_c⁻¹}`
/// whenever `λμ = c`. Taking `λ = c⁽ⁱ⁾/z_σ`, `μ = c⁽ʲ⁾/z_τ` (where `c⁽¹⁾ = c̄`)
/// turns both operators into SPD·Kᵉ, and `λμ = c` becomes `c = z_σz_τ`,
/// `c̄ = z_σz_τ`, or `c̄² = c·z_σz_τ` depending on the block; each has an
/// explicit solution.
pub fn normal_form_2d(alg: &Algebra, tol: f64) -> Result<Classified2D> {
    if alg.dim() != 2 {
        return Err(Error::UnsupportedDimension(alg.dim()));
    }
    if is_division(alg, DivisionMode::Exact2d, Sampling::new(0, tol, 0))?
        != DivisionVerdict::Division
    {
        return Err(Error::NotDivision);
    }
    let a = [1.0, 0.0];
    let (b, u) = unitalize(alg, &a)?;
    let phi = iso_to_c(&b, &u, tol)?;
    let phi_inv = phi.inverse()?;
    let sigma = &(&phi * &right_mult(alg, &a)) * &phi_inv;
    let tau = &(&phi * &left_mult(alg, &a)) * &phi_inv;
    let (ps, zs, i) = split_operator(&sigma, tol)?;
    let (pt, zt, j) = split_operator(&tau, tol)?;
    let z = zs * zt;
    let c = match (i, j) {
        (0, 0) => z,
        (1, 1) => Complex64::from_polar(z.norm(), -z.arg() / 3.0),
        _ => z.conj(),
    };
    let twist = |e: u8| if e == 1 { c.conj() } else { c };
    let lambda = twist(i) / zs;
    let mu = twist(j) / zt;
    // λ·P·e^{iθ}·(c⁽ⁱ⁾)⁻¹ is a positive real times P conjugated by a rotation
    let rotate = |scalar: Complex64, p: &Mat| {
        let r = mult_matrix(scalar / scalar.norm());
        normalize_det(&(&(&r * p) * &r.transpose()).symmetrize())
    };
    let mut na = rotate(lambda, &ps);
    let mut nb = rotate(mu, &pt);
    if i == 1 && j == 1 {
        // σ' = A'K = K(KA'K)
        let k = k_matrix();
        na = (&(&k * &na) * &k).symmetrize();
        nb = (&(&k * &nb) * &k).symmetrize();
    }
    let normal_form = NormalForm2D::new(i, j, na, nb)?;
    let iso = &mult_matrix(c) * &phi;
    let dst = build2d(&normal_form)?;
    let residual = morphism_residual(&iso, alg, &dst);
    if !(residual <= VERIFY_TOL * tensor_scale(alg, &dst)) {
        return Err(Error::NonConvergence(format!(
            "normal form isomorphism residual {residual:e}"
        )));
    }
    Ok(Classified2D {
        normal_form,
        iso,
        residual,
    })
}
