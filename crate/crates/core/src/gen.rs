//! Seeded generators for test and sample data.

use rand::Rng;

use crate::algebra::{
    classical, is_division, isotope, transport, Algebra, Classical, DivisionMode, DivisionVerdict,
    Sampling,
};
use crate::decorated::{decorate, DecoratedAlgebra};
use crate::matkit::{polar_decompose, random_matrix_with, svd, Mat, DEFAULT_TOL};
use crate::quat::{conjugation, k_map, Quat};

/// Maximum condition number accepted for random invertible maps.
pub const MAX_CONDITION: f64 = 50.0;

/// Maximum condition number of `[U | V]` for random decorations. Rounding in
/// isotopes by `κ` grows with `|κ|²`, and `|κ|` with this condition number.
pub const SPLIT_CONDITION: f64 = 10.0;

/// Random invertible matrix with entries in `[-1, 1)` and condition number
/// below [`MAX_CONDITION`].
pub fn random_invertible<R: Rng + ?Sized>(rng: &mut R, n: usize) -> Mat {
    random_conditioned(rng, n, MAX_CONDITION)
}

/// Random matrix with entries in `[-1, 1)` and condition number below `max_cond`.
pub fn random_conditioned<R: Rng + ?Sized>(rng: &mut R, n: usize, max_cond: f64) -> Mat {
    loop {
        let m = random_matrix_with(rng, n, n, 1.0);
        let s = svd(&m).s;
        if s[n - 1] > 0.0 && s[0] / s[n - 1] < max_cond {
            return m;
        }
    }
}

/// Random invertible matrix whose determinant has the requested sign.
pub fn random_invertible_signed<R: Rng + ?Sized>(rng: &mut R, n: usize, negative: bool) -> Mat {
    let mut m = random_invertible(rng, n);
    if (m.det() < 0.0) != negative {
        for j in 0..n {
            m[(0, j)] = -m[(0, j)];
        }
    }
    m
}

/// Random orthogonal matrix (orthogonal factor of a random matrix).
pub fn random_orthogonal<R: Rng + ?Sized>(rng: &mut R, n: usize) -> Mat {
    let m = random_invertible(rng, n);
    polar_decompose(&m).expect("invertible").1
}

pub fn random_special_orthogonal<R: Rng + ?Sized>(rng: &mut R, n: usize) -> Mat {
    let mut o = random_orthogonal(rng, n);
    if o.det() < 0.0 {
        for i in 0..n {
            o[(i, 0)] = -o[(i, 0)];
        }
    }
    o
}

/// Random 2-dimensional division algebra: structure constants uniform in
/// `[-2, 2]`, rejected until the exact 2-d test passes with some margin.
pub fn random_division_2d<R: Rng + ?Sized>(rng: &mut R) -> Algebra {
    loop {
        let c: Vec<f64> = (0..8).map(|_| rng.gen_range(-2.0..=2.0)).collect();
        let alg = Algebra::new(2, c).expect("eight finite constants");
        if is_division(&alg, DivisionMode::Exact2d, Sampling::new(0, 1e-2, 0))
            == Ok(DivisionVerdict::Division)
        {
            return alg.with_name("random-2d");
        }
    }
}

/// Isotope of ℍ or 𝕆 by random well-conditioned invertible maps.
pub fn random_isotope<R: Rng + ?Sized>(rng: &mut R, base: Classical) -> Algebra {
    let a = classical(base);
    let n = a.dim();
    let s = random_invertible(rng, n);
    let t = random_invertible(rng, n);
    isotope(&a, &s, &t)
        .expect("random maps are invertible")
        .with_name(format!("{}-isotope", a.name()))
}

/// Random division algebra of dimension 2, 4 or 8.
pub fn random_division_algebra<R: Rng + ?Sized>(rng: &mut R, dim: usize) -> Algebra {
    match dim {
        2 => {
            if rng.gen_bool(0.5) {
                random_division_2d(rng)
            } else {
                let c = classical(Classical::C);
                let s = random_invertible(rng, 2);
                let t = random_invertible(rng, 2);
                isotope(&c, &s, &t).expect("invertible")
            }
        }
        4 => random_isotope(rng, Classical::H),
        8 => random_isotope(rng, Classical::O),
        _ => panic!("no real division algebra of dimension {dim} beyond dimension 1"),
    }
}

/// Random decorated algebra over an isotope of ℍ or 𝕆: odd `m < n` and a
/// generic (non-orthogonal) splitting taken from the columns of a random
/// invertible matrix.
pub fn random_decorated<R: Rng + ?Sized>(rng: &mut R, base: Classical) -> DecoratedAlgebra {
    let alg = random_isotope(rng, base);
    let n = alg.dim();
    let m = 2 * rng.gen_range(0..n / 2) + 1;
    let cols = random_conditioned(rng, n, SPLIT_CONDITION).to_cols();
    let u = Mat::from_cols(&cols[..m]).expect("m columns");
    let v = Mat::from_cols(&cols[m..]).expect("n - m columns");
    decorate(alg, u, v).expect("columns of an invertible matrix are complementary")
}

/// Random e-quadratic algebra: `ℍ_{φκⁱ, φκⁱ}` for an inner automorphism
/// `φ = K_s` of ℍ, or `𝕆_{κⁱ, κⁱ}`, carried to generic coordinates by a
/// random transport. `κ` is the standard conjugation.
pub fn random_e_quadratic<R: Rng + ?Sized>(rng: &mut R, base: Classical) -> Algebra {
    let twist = rng.gen_bool(0.5);
    let (alg, map) = match base {
        Classical::H => {
            let s = Quat::new(
                rng.gen_range(-1.0..1.0),
                rng.gen_range(-1.0..1.0),
                rng.gen_range(-1.0..1.0),
                1.0,
            );
            let phi = k_map(s).expect("nonzero quaternion");
            let map = if twist { &phi * &conjugation() } else { phi };
            (classical(Classical::H), map)
        }
        Classical::O => {
            let mut d = vec![-1.0; 8];
            d[0] = 1.0;
            let map = if twist {
                Mat::diag(&d)
            } else {
                Mat::identity(8)
            };
            (classical(Classical::O), map)
        }
        other => panic!("e-quadratic corpus is built from H or O, not {other:?}"),
    };
    let iso = isotope(&alg, &map, &map).expect("automorphism composed with an involution");
    let f = random_invertible(rng, alg.dim());
    transport(&iso, &f)
        .expect("invertible")
        .with_name(format!("{}-equad", alg.name()))
}

/// Tolerance used when checking generated algebras.
pub fn default_sampling(seed: u64) -> Sampling {
    Sampling::new(200, DEFAULT_TOL, seed)
}
