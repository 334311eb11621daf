//! Quaternion isotopes `ℍ_{σ,τ}`: the inner automorphisms `K_s`, the
//! groupoid of objects `([a], [b], (C, D))` acted on by `ℍ*`, the four
//! functors `H_{α,β}` into the blocks of 4-dimensional division algebras,
//! and normal forms for arbitrary isotopes `ℍ_{S,T}`.

use std::fmt;
use std::ops::{Mul, Neg};

use serde::{Deserialize, Serialize};

use crate::algebra::{classical, isotope, morphism_residual, Algebra, Classical};
use crate::decorated::{decorate, kappa};
use crate::error::{Error, Result};
use crate::matkit::{is_spd1, polar_right, sign_det, svd, unit_vector, Mat, Sign};

/// Coordinates below this are treated as zero when fixing the sign of a
/// coset representative.
const REPRESENTATIVE_TOL: f64 = 1e-9;

/// Residual allowed when checking a computed normal form isomorphism,
/// relative to the size of the structure tensors involved.
const VERIFY_TOL: f64 = 1e-8;

/// A quaternion `w + xi + yj + zk`.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
#[serde(transparent)]
pub struct Quat(pub [f64; 4]);

impl Quat {
    pub const ONE: Quat = Quat([1.0, 0.0, 0.0, 0.0]);

    pub fn new(w: f64, x: f64, y: f64, z: f64) -> Self {
        Quat([w, x, y, z])
    }

    pub fn from_slice(v: &[f64]) -> Result<Self> {
        <[f64; 4]>::try_from(v).map(Quat).map_err(|_| {
            Error::InvalidInput(format!("a quaternion has 4 coordinates, got {}", v.len()))
        })
    }

    pub fn as_slice(&self) -> &[f64] {
        &self.0
    }

    pub fn conj(self) -> Quat {
        let [w, x, y, z] = self.0;
        Quat([w, -x, -y, -z])
    }

    pub fn norm_sq(self) -> f64 {
        self.0.iter().map(|c| c * c).sum()
    }

    pub fn norm(self) -> f64 {
        self.norm_sq().sqrt()
    }

    pub fn scale(self, s: f64) -> Quat {
        Quat(self.0.map(|c| c * s))
    }

    pub fn inverse(self) -> Result<Quat> {
        let n2 = self.norm_sq();
        if n2 == 0.0 {
            return Err(Error::ZeroQuaternion);
        }
        Ok(self.conj().scale(1.0 / n2))
    }

    /// The coset representative of `[q] ∈ ℍ*/ℝ*`: unit norm, first
    /// nonzero coordinate positive.
    pub fn representative(self) -> Result<Quat> {
        let n = self.norm();
        if n == 0.0 {
            return Err(Error::ZeroQuaternion);
        }
        let u = self.scale(1.0 / n);
        let lead =
            u.0.iter()
                .copied()
                .find(|c| c.abs() > REPRESENTATIVE_TOL)
                .unwrap_or(1.0);
        let rep = if lead < 0.0 { -u } else { u };
        // drop negative zeros so equal classes print identically
        Ok(Quat(rep.0.map(|c| c + 0.0)))
    }

    /// Matrix of `x ↦ qx`.
    pub fn left_matrix(self) -> Mat {
        Mat::from_cols(
            &(0..4)
                .map(|k| (self * basis(k)).0.to_vec())
                .collect::<Vec<_>>(),
        )
        .unwrap()
    }

    /// Matrix of `x ↦ xq`.
    pub fn right_matrix(self) -> Mat {
        Mat::from_cols(
            &(0..4)
                .map(|k| (basis(k) * self).0.to_vec())
                .collect::<Vec<_>>(),
        )
        .unwrap()
    }

    pub fn max_abs_diff(self, other: Quat) -> f64 {
        self.0
            .iter()
            .zip(&other.0)
            .fold(0.0, |m, (a, b)| m.max((a - b).abs()))
    }
}

fn basis(k: usize) -> Quat {
    let mut v = [0.0; 4];
    v[k] = 1.0;
    Quat(v)
}

impl Mul for Quat {
    type Output = Quat;
    fn mul(self, o: Quat) -> Quat {
        let [a1, b1, c1, d1] = self.0;
        let [a2, b2, c2, d2] = o.0;
        Quat([
            a1 * a2 - b1 * b2 - c1 * c2 - d1 * d2,
            a1 * b2 + b1 * a2 + c1 * d2 - d1 * c2,
            a1 * c2 - b1 * d2 + c1 * a2 + d1 * b2,
            a1 * d2 + b1 * c2 - c1 * b2 + d1 * a2,
        ])
    }
}

impl Neg for Quat {
    type Output = Quat;
    fn neg(self) -> Quat {
        self.scale(-1.0)
    }
}

impl fmt::Display for Quat {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let [w, x, y, z] = self.0;
        write!(f, "{w:.6} {x:+.6}i {y:+.6}j {z:+.6}k")
    }
}

/// Quaternion conjugation, obtained as the involution of the decoration
/// `(ℍ, ℝ1, span{i, j, k})`.
pub fn conjugation() -> Mat {
    let imag = Mat::from_cols(&[unit_vector(4, 1), unit_vector(4, 2), unit_vector(4, 3)]).unwrap();
    let x = decorate(
        classical(Classical::H),
        Mat::from_cols(&[unit_vector(4, 0)]).unwrap(),
        imag,
    )
    .expect("standard split of the quaternions");
    kappa(&x)
}

/// `K_s = L_s R_{s⁻¹}`, the rotation `x ↦ s x s⁻¹`.
pub fn k_map(s: Quat) -> Result<Mat> {
    let inv = s.inverse()?;
    Ok(&s.left_matrix() * &inv.right_matrix())
}

/// An object `([a], [b], (C, D))` of the groupoid acted on by `ℍ*`.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ZObject {
    pub a: Quat,
    pub b: Quat,
    #[serde(rename = "C")]
    pub c: Mat,
    #[serde(rename = "D")]
    pub d: Mat,
}

impl ZObject {
    /// Normalizes `a`, `b` to representatives and checks that `C`, `D` are
    /// 4×4, symmetric positive definite and unimodular.
    pub fn new(a: Quat, b: Quat, c: Mat, d: Mat) -> Result<Self> {
        for (name, m) in [("C", &c), ("D", &d)] {
            if m.rows() != 4 || !is_spd1(m, 1e-9) {
                return Err(Error::InvalidMatrix(format!(
                    "{name} must be a 4x4 SPD matrix of determinant 1"
                )));
            }
        }
        Ok(ZObject {
            a: a.representative()?,
            b: b.representative()?,
            c,
            d,
        })
    }

    /// `([a], [b], (I, I))`, an object of the orthogonal subcategory.
    pub fn orthogonal(a: Quat, b: Quat) -> Result<Self> {
        ZObject::new(a, b, Mat::identity(4), Mat::identity(4))
    }

    pub fn max_abs_diff(&self, other: &ZObject) -> f64 {
        [
            self.a.max_abs_diff(other.a),
            self.b.max_abs_diff(other.b),
            self.c.max_abs_diff(&other.c),
            self.d.max_abs_diff(&other.d),
        ]
        .into_iter()
        .fold(0.0, f64::max)
    }
}

/// `s · ([a], [b], (C, D)) = ([K_s a], [K_s b], (K_s C K_s⁻¹, K_s D K_s⁻¹))`.
pub fn z_action(s: Quat, x: &ZObject) -> Result<ZObject> {
    let k = k_map(s)?;
    let kt = k.transpose();
    let identity = Mat::identity(4);
    let conj = |m: &Mat| {
        if *m == identity {
            identity.clone()
        } else {
            (&(&k * m) * &kt).symmetrize()
        }
    };
    let a = Quat::from_slice(&k.mul_vec(&x.a.0))?.representative()?;
    let b = Quat::from_slice(&k.mul_vec(&x.b.0))?.representative()?;
    Ok(ZObject {
        a,
        b,
        c: conj(&x.c),
        d: conj(&x.d),
    })
}

/// Sign relating `K_s` to the morphism `H_{α,β}(x) → H_{α,β}(s·x)`.
///
/// `K_s a` is already a unit vector, so renormalizing it to a representative
/// can only flip its sign; each flip negates the product of the target.
pub fn action_sign(s: Quat, x: &ZObject) -> Result<f64> {
    let k = k_map(s)?;
    let flip = |q: Quat| -> Result<f64> {
        let img = Quat::from_slice(&k.mul_vec(&q.0))?;
        let rep = img.representative()?;
        Ok(if rep.max_abs_diff(img) <= rep.max_abs_diff(-img) {
            1.0
        } else {
            -1.0
        })
    };
    Ok(flip(x.a)? * flip(x.b)?)
}

/// The image of `s` under `H_{α,β}`: `±K_s`, see [`action_sign`].
pub fn morphism_image(s: Quat, x: &ZObject) -> Result<Mat> {
    Ok(k_map(s)?.scale(action_sign(s, x)?))
}

/// The operator pair `(σ, τ)` of `H_{α,β}(x)`, with `κ` quaternion
/// conjugation:
///
/// | (α, β)   | σ        | τ        |
/// |----------|----------|----------|
/// | (+1, +1) | `L_a C`  | `R_b D`  |
/// | (+1, −1) | `R_a Cκ` | `R_b D`  |
/// | (−1, +1) | `L_a C`  | `L_b Dκ` |
/// | (−1, −1) | `L_a Cκ` | `R_b Dκ` |
pub fn functor_pair(alpha: Sign, beta: Sign, x: &ZObject) -> (Mat, Mat) {
    use Sign::{Minus, Plus};
    let k = conjugation();
    let (la, ra) = (x.a.left_matrix(), x.a.right_matrix());
    let (lb, rb) = (x.b.left_matrix(), x.b.right_matrix());
    let ck = &x.c * &k;
    let dk = &x.d * &k;
    match (alpha, beta) {
        (Plus, Plus) => (&la * &x.c, &rb * &x.d),
        (Plus, Minus) => (&ra * &ck, &rb * &x.d),
        (Minus, Plus) => (&la * &x.c, &lb * &dk),
        (Minus, Minus) => (&la * &ck, &rb * &dk),
    }
}

/// `H_{α,β}(x) = ℍ_{σ,τ}`; its sign pair is `(α, β)`.
pub fn functor_h(alpha: Sign, beta: Sign, x: &ZObject) -> Result<Algebra> {
    let (s, t) = functor_pair(alpha, beta, x);
    isotope(&classical(Classical::H), &s, &t)
}

/// Isoclinic factorization of `O ∈ SO(4)` as `x ↦ a x b` with unit `a`, `b`.
///
/// Writing `O = Σ a_p b_q E_pq` with `E_pq` the matrix of `x ↦ e_p x e_q`
/// (an orthogonal basis of 4×4 matrices, each of squared norm 4), the
/// coefficient matrix `M_pq = ⟨E_pq, O⟩ / 4` is the outer product `a bᵀ`.
/// `a` is taken from its dominant singular vector and normalized to a
/// representative; `b = Mᵀa` then carries the matching sign.
pub fn so4_factor(o: &Mat) -> Result<(Quat, Quat)> {
    if o.rows() != 4 || o.cols() != 4 {
        return Err(Error::InvalidMatrix("expected a 4x4 matrix".into()));
    }
    let det = o.det();
    let defect = (&o.transpose() * o).max_abs_diff(&Mat::identity(4));
    if defect > 1e-9 || (det - 1.0).abs() > 1e-9 {
        return Err(Error::NotSpecialOrthogonal { det, defect });
    }
    let m = Mat::from_fn(4, 4, |p, q| {
        let e = &basis(p).left_matrix() * &basis(q).right_matrix();
        e.as_slice()
            .iter()
            .zip(o.as_slice())
            .map(|(x, y)| x * y)
            .sum::<f64>()
            / 4.0
    });
    let d = svd(&m);
    let a = Quat::from_slice(&d.u.col(0))?.representative()?;
    let b = Quat::from_slice(&m.transpose().mul_vec(&a.0))?;
    let recon = &a.left_matrix() * &b.right_matrix();
    let resid = recon.sub(o).frobenius();
    if resid > 1e-9 {
        return Err(Error::FactorizationFailed(resid));
    }
    Ok((a, b))
}

/// Result of [`quat_normal_form`].
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct QuatNormalForm {
    pub alpha: Sign,
    pub beta: Sign,
    pub object: ZObject,
    /// Isomorphism `ℍ_{S,T} → H_{α,β}(object)`.
    pub iso: Mat,
    pub residual: f64,
}

fn scaled_spd1(m: &Mat, tol: f64) -> Result<(f64, Mat)> {
    let m = m.symmetrize();
    let det = m.det();
    if !(det > 0.0) {
        return Err(Error::NonConvergence(format!(
            "symmetric factor has determinant {det:e}"
        )));
    }
    let mu = det.powf(0.25);
    let unit = m.scale(1.0 / mu);
    if unit.max_abs_diff(&Mat::identity(4)) <= tol {
        return Ok((mu, Mat::identity(4)));
    }
    if !is_spd1(&unit, 1e-9) {
        return Err(Error::NonConvergence(
            "symmetric factor is not positive definite".into(),
        ));
    }
    Ok((mu, unit))
}

/// Reduces `ℍ_{S,T}` to `H_{α,β}(x)` together with a verified isomorphism.
///
/// With right polar decompositions `S = O_S H_S`, `T = O_T H_T`, the
/// orthogonal parts factor as `O_S = L_{g₁}R_{h₁}κ^i` and
/// `O_T = L_{g₂}R_{h₂}κ^j` (`i`, `j` record negative determinants). For
/// unit `q`, `r` the map `F = R_q` satisfies
/// `F(S x · T y) = (R_r S F⁻¹)(Fx) · (L_{r⁻¹} R_q T F⁻¹)(Fy)`,
/// and `q`, `r` are chosen so that the orthogonal parts of the new operators
/// take the shapes of the functor table. Positive scalars are then moved
/// into a final dilation and the coset representatives fixed.
pub fn quat_normal_form(s: &Mat, t: &Mat, tol: f64) -> Result<QuatNormalForm> {
    for (name, m) in [("S", s), ("T", t)] {
        if m.rows() != 4 || m.cols() != 4 {
            return Err(Error::InvalidMatrix(format!("{name} must be 4x4")));
        }
    }
    let h = classical(Classical::H);
    let src = isotope(&h, s, t)?;
    let beta = sign_det(s, tol).map_err(|_| Error::SingularOperator("S".into()))?;
    let alpha = sign_det(t, tol).map_err(|_| Error::SingularOperator("T".into()))?;
    let k = conjugation();
    let orient = |o: &Mat, sign: Sign| {
        if sign == Sign::Minus {
            o * &k
        } else {
            o.clone()
        }
    };
    let (os, _) = polar_right(s)?;
    let (ot, _) = polar_right(t)?;
    let (g1, h1) = so4_factor(&orient(&os, beta))?;
    let (g2, h2) = so4_factor(&orient(&ot, alpha))?;
    let inv = |q: Quat| q.inverse().expect("unit quaternion");
    use Sign::{Minus, Plus};
    let (q, r) = match (alpha, beta) {
        (Plus, Plus) => (h1 * g2, g2),
        (Plus, Minus) => (g1.conj(), g2),
        (Minus, Plus) => (inv(h2), inv(h1) * inv(h2)),
        (Minus, Minus) => (inv(g2) * inv(h1), inv(h1)),
    };
    let f = q.right_matrix();
    let finv = f.transpose();
    let sigma = &(&r.right_matrix() * s) * &finv;
    let tau = &(&(&inv(r).left_matrix() * &q.right_matrix()) * t) * &finv;

    // Read off the table entries. The orthogonal part of σ is L_a, R_aκ or
    // L_aκ, each of which sends 1 to a.
    let (o_sigma, _) = polar_right(&sigma)?;
    let (o_tau, _) = polar_right(&tau)?;
    let a = Quat::from_slice(&o_sigma.col(0))?;
    let b = Quat::from_slice(&o_tau.col(0))?;
    let (a_inv, b_inv) = (a.inverse()?, b.inverse()?);
    let c_raw = match (alpha, beta) {
        (_, Plus) => &a_inv.left_matrix() * &sigma,
        (Plus, Minus) => &(&a_inv.right_matrix() * &sigma) * &k,
        (Minus, Minus) => &(&a_inv.left_matrix() * &sigma) * &k,
    };
    let d_raw = match (alpha, beta) {
        (Plus, _) => &b_inv.right_matrix() * &tau,
        (Minus, Plus) => &(&b_inv.left_matrix() * &tau) * &k,
        (Minus, Minus) => &(&b_inv.right_matrix() * &tau) * &k,
    };
    let (mu_c, c) = scaled_spd1(&c_raw, tol)?;
    let (mu_d, d) = scaled_spd1(&d_raw, tol)?;

    // Dividing σ by μ_C and τ by μ_D is compensated by the dilation μ_C μ_D;
    // replacing a, b by their representatives flips the product sign once
    // per negation.
    let ra = a.representative()?;
    let rb = b.representative()?;
    let flip = |u: Quat, rep: Quat| {
        if rep.max_abs_diff(u) <= rep.max_abs_diff(-u) {
            1.0
        } else {
            -1.0
        }
    };
    let scale = mu_c * mu_d * flip(a, ra) * flip(b, rb);
    let iso = f.scale(scale);
    let object = ZObject { a: ra, b: rb, c, d };
    let dst = functor_h(alpha, beta, &object)?;
    let residual = morphism_residual(&iso, &src, &dst);
    let size = src
        .tensor()
        .iter()
        .chain(dst.tensor())
        .fold(1.0f64, |m, x| m.max(x.abs()));
    if !(residual <= VERIFY_TOL * size) {
        return Err(Error::NonConvergence(format!(
            "normal form isomorphism residual {residual:e}"
        )));
    }
    Ok(QuatNormalForm {
        alpha,
        beta,
        object,
        iso,
        residual,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::algebra::{block_of, left_mult, right_mult, Sampling};
    use crate::gen::{random_invertible, random_special_orthogonal};
    use crate::matkit::{random_spd1_with, DEFAULT_TOL};
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    fn random_quat(rng: &mut ChaCha8Rng) -> Quat {
        Quat::new(
            rng.gen_range(-1.0..1.0),
            rng.gen_range(-1.0..1.0),
            rng.gen_range(-1.0..1.0),
            rng.gen_range(-1.0..1.0),
        )
    }

    fn random_object(rng: &mut ChaCha8Rng) -> ZObject {
        let (a, b) = (random_quat(rng), random_quat(rng));
        let (c, d) = (random_spd1_with(rng, 4), random_spd1_with(rng, 4));
        ZObject::new(a, b, c, d).unwrap()
    }

    #[test]
    fn quaternion_arithmetic_matches_the_table() {
        let h = classical(Classical::H);
        let mut rng = ChaCha8Rng::seed_from_u64(1);
        for _ in 0..20 {
            let (p, q) = (random_quat(&mut rng), random_quat(&mut rng));
            let table = h.mul(&p.0, &q.0);
            assert!(Quat::from_slice(&table).unwrap().max_abs_diff(p * q) < 1e-15);
            assert!(p.left_matrix().max_abs_diff(&left_mult(&h, &p.0)) < 1e-15);
            assert!(p.right_matrix().max_abs_diff(&right_mult(&h, &p.0)) < 1e-15);
        }
        assert_eq!(conjugation(), Mat::diag(&[1.0, -1.0, -1.0, -1.0]));
        assert_eq!(
            Quat::new(0.0, 0.0, 0.0, 0.0).inverse(),
            Err(Error::ZeroQuaternion)
        );
    }

    #[test]
    fn representatives() {
        let q = Quat::new(0.0, -3.0, 0.0, 4.0).representative().unwrap();
        assert!(q.max_abs_diff(Quat::new(0.0, 0.6, 0.0, -0.8)) < 1e-15);
        assert_eq!(
            Quat::new(-2.0, 0.0, 0.0, 0.0).representative().unwrap(),
            Quat::ONE
        );
    }

    #[test]
    fn k_map_examples() {
        assert_eq!(k_map(Quat::ONE).unwrap(), Mat::identity(4));
        let mut rng = ChaCha8Rng::seed_from_u64(2);
        let s = random_quat(&mut rng);
        assert!(
            k_map(s.scale(-3.5))
                .unwrap()
                .max_abs_diff(&k_map(s).unwrap())
                < 1e-14
        );
        // conjugating by (1+i)/√2 turns j into k and k into −j
        let h = 0.5f64.sqrt();
        let k = k_map(Quat::new(h, h, 0.0, 0.0)).unwrap();
        let expected = Mat::from_rows(&[
            vec![1.0, 0.0, 0.0, 0.0],
            vec![0.0, 1.0, 0.0, 0.0],
            vec![0.0, 0.0, 0.0, -1.0],
            vec![0.0, 0.0, 1.0, 0.0],
        ])
        .unwrap();
        assert!(k.max_abs_diff(&expected) < 1e-15);
        assert_eq!(
            k_map(Quat::new(0.0, 0.0, 0.0, 0.0)),
            Err(Error::ZeroQuaternion)
        );
    }

    #[test]
    fn action_laws() {
        let mut rng = ChaCha8Rng::seed_from_u64(3);
        for _ in 0..20 {
            let x = random_object(&mut rng);
            assert!(z_action(Quat::ONE, &x).unwrap().max_abs_diff(&x) < 1e-14);
            let (s, t) = (random_quat(&mut rng), random_quat(&mut rng));
            let lhs = z_action(s, &z_action(t, &x).unwrap()).unwrap();
            let rhs = z_action(s * t, &x).unwrap();
            assert!(lhs.max_abs_diff(&rhs) < 1e-12);
            assert!(
                k_map(s * t)
                    .unwrap()
                    .max_abs_diff(&(&k_map(s).unwrap() * &k_map(t).unwrap()))
                    < 1e-12
            );
            let y = ZObject::orthogonal(x.a, x.b).unwrap();
            let moved = z_action(s, &y).unwrap();
            assert_eq!((moved.c, moved.d), (Mat::identity(4), Mat::identity(4)));
        }
    }

    #[test]
    fn functor_blocks() {
        let one = ZObject::orthogonal(Quat::ONE, Quat::ONE).unwrap();
        assert_eq!(
            functor_h(Sign::Plus, Sign::Plus, &one).unwrap().tensor(),
            classical(Classical::H).tensor()
        );
        let k = conjugation();
        let h_kid = isotope(&classical(Classical::H), &k, &Mat::identity(4)).unwrap();
        assert_eq!(
            functor_h(Sign::Plus, Sign::Minus, &one).unwrap().tensor(),
            h_kid.tensor()
        );
        let mut rng = ChaCha8Rng::seed_from_u64(4);
        for (alpha, beta) in [
            (Sign::Plus, Sign::Plus),
            (Sign::Plus, Sign::Minus),
            (Sign::Minus, Sign::Plus),
            (Sign::Minus, Sign::Minus),
        ] {
            let x = random_object(&mut rng);
            let alg = functor_h(alpha, beta, &x).unwrap();
            let label = block_of(&alg, Sampling::new(50, DEFAULT_TOL, 9)).unwrap();
            assert_eq!(label, format!("{}{}", alpha.symbol(), beta.symbol()));
        }
    }

    #[test]
    fn functoriality_on_morphisms() {
        let mut rng = ChaCha8Rng::seed_from_u64(5);
        for (alpha, beta) in [
            (Sign::Plus, Sign::Plus),
            (Sign::Minus, Sign::Minus),
            (Sign::Plus, Sign::Minus),
            (Sign::Minus, Sign::Plus),
        ] {
            for _ in 0..10 {
                let x = random_object(&mut rng);
                let s = random_quat(&mut rng);
                let src = functor_h(alpha, beta, &x).unwrap();
                let dst = functor_h(alpha, beta, &z_action(s, &x).unwrap()).unwrap();
                let f = morphism_image(s, &x).unwrap();
                assert!(morphism_residual(&f, &src, &dst) < 1e-10);
            }
        }
    }

    #[test]
    fn isoclinic_factorization() {
        let (a, b) = so4_factor(&Mat::identity(4)).unwrap();
        assert_eq!((a, b), (Quat::ONE, Quat::ONE));
        let mut rng = ChaCha8Rng::seed_from_u64(6);
        for _ in 0..50 {
            let a0 = random_quat(&mut rng).scale(1.0);
            let a0 = a0.scale(1.0 / a0.norm());
            let b0 = random_quat(&mut rng);
            let b0 = b0.scale(1.0 / b0.norm());
            let o = &a0.left_matrix() * &b0.right_matrix();
            let (a, b) = so4_factor(&o).unwrap();
            let same = a.max_abs_diff(a0) < 1e-12 && b.max_abs_diff(b0) < 1e-12;
            let flipped = a.max_abs_diff(-a0) < 1e-12 && b.max_abs_diff(-b0) < 1e-12;
            assert!(same || flipped);
            let r = random_special_orthogonal(&mut rng, 4);
            let (a, b) = so4_factor(&r).unwrap();
            assert!((&a.left_matrix() * &b.right_matrix()).sub(&r).frobenius() < 1e-10);
        }
        let s = Quat::new(1.0, 2.0, -1.0, 0.5);
        let (a, b) = so4_factor(&k_map(s).unwrap()).unwrap();
        let rep = s.representative().unwrap();
        assert!(a.max_abs_diff(rep) < 1e-12);
        assert!(b.max_abs_diff(rep.conj()) < 1e-12);
        assert!(matches!(
            so4_factor(&conjugation()),
            Err(Error::NotSpecialOrthogonal { .. })
        ));
    }

    #[test]
    fn normal_form_of_identity_pair() {
        let nf = quat_normal_form(&Mat::identity(4), &Mat::identity(4), DEFAULT_TOL).unwrap();
        assert_eq!((nf.alpha, nf.beta), (Sign::Plus, Sign::Plus));
        assert_eq!(
            nf.object,
            ZObject::orthogonal(Quat::ONE, Quat::ONE).unwrap()
        );
        assert!(nf.iso.max_abs_diff(&Mat::identity(4)) < 1e-15);
    }

    #[test]
    fn normal_form_round_trips() {
        let mut rng = ChaCha8Rng::seed_from_u64(7);
        let h = classical(Classical::H);
        for _ in 0..40 {
            let s = random_invertible(&mut rng, 4);
            let t = random_invertible(&mut rng, 4);
            let nf = quat_normal_form(&s, &t, DEFAULT_TOL).unwrap();
            assert_eq!(nf.beta, Sign::of(s.det()));
            assert_eq!(nf.alpha, Sign::of(t.det()));
            let src = isotope(&h, &s, &t).unwrap();
            let dst = functor_h(nf.alpha, nf.beta, &nf.object).unwrap();
            assert!(morphism_residual(&nf.iso, &src, &dst) < 1e-8);
        }
    }

    #[test]
    fn orthogonal_pairs_give_orthogonal_objects() {
        let mut rng = ChaCha8Rng::seed_from_u64(8);
        for negative in [(false, false), (true, false), (false, true), (true, true)] {
            let mut s = random_special_orthogonal(&mut rng, 4);
            let mut t = random_special_orthogonal(&mut rng, 4);
            if negative.0 {
                s = &s * &conjugation();
            }
            if negative.1 {
                t = &t * &conjugation();
            }
            let nf = quat_normal_form(&s, &t, DEFAULT_TOL).unwrap();
            assert_eq!(nf.object.c, Mat::identity(4));
            assert_eq!(nf.object.d, Mat::identity(4));
        }
    }

    #[test]
    fn json_shape() {
        let x = ZObject::orthogonal(Quat::new(0.0, 1.0, 0.0, 0.0), Quat::ONE).unwrap();
        let v: serde_json::Value = serde_json::to_value(&x).unwrap();
        assert_eq!(v["a"], serde_json::json!([0.0, 1.0, 0.0, 0.0]));
        assert!(v.get("C").is_some());
        let back: ZObject = serde_json::from_value(v).unwrap();
        assert_eq!(back, x);
    }
}
