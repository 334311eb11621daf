//! Decorated algebras `(A, U, V)` with `A = U ⊕ V`, `dim U = m` odd and
//! `m < n`, together with the involution `κ` (identity on `U`, minus
//! identity on `V`) and the isotopy functors `I_ij : A ↦ A_{κ^i, κ^j}`.
//!
//! `U` and `V` are kept as explicit column bases. Nothing assumes they are
//! orthogonal complements; `κ` is obtained by solving against `[U | V]`.

use serde::{Deserialize, Serialize};

use crate::algebra::{isotope, transport, Algebra, AlgebraDoc};
use crate::error::{Error, Result};
use crate::matkit::{lstsq_residual, svd, Mat};

#[derive(Clone, Debug, PartialEq)]
pub struct DecoratedAlgebra {
    alg: Algebra,
    u: Mat,
    v: Mat,
}

/// Validates and builds `(A, U, V)`.
pub fn decorate(alg: Algebra, u: Mat, v: Mat) -> Result<DecoratedAlgebra> {
    let n = alg.dim();
    if u.rows() != n || v.rows() != n {
        return Err(Error::BadSplit(format!(
            "subspace bases must have {n} rows"
        )));
    }
    let m = u.cols();
    if m.is_multiple_of(2) {
        return Err(Error::BadSplit(format!("dim U = {m} is even")));
    }
    if m >= n {
        return Err(Error::BadSplit(format!("dim U = {m} is not less than {n}")));
    }
    if m + v.cols() != n {
        return Err(Error::BadSplit(format!(
            "dimensions {m} + {} do not add up to {n}",
            v.cols()
        )));
    }
    let s = svd(&u.hcat(&v)).s;
    if !(s[n - 1] > 1e-10 * s[0]) {
        return Err(Error::BadSplit("U and V are not complementary".into()));
    }
    Ok(DecoratedAlgebra { alg, u, v })
}

impl DecoratedAlgebra {
    pub fn algebra(&self) -> &Algebra {
        &self.alg
    }

    pub fn u(&self) -> &Mat {
        &self.u
    }

    pub fn v(&self) -> &Mat {
        &self.v
    }

    /// `m = dim U`.
    pub fn m(&self) -> usize {
        self.u.cols()
    }

    pub fn n(&self) -> usize {
        self.alg.dim()
    }
}

/// `κ(u + v) = u − v`, as the matrix `B·diag(I_m, −I)·B⁻¹` with `B = [U | V]`.
pub fn kappa(x: &DecoratedAlgebra) -> Mat {
    let b = x.u.hcat(&x.v);
    let m = x.m();
    let d: Vec<f64> = (0..x.n()).map(|i| if i < m { 1.0 } else { -1.0 }).collect();
    let binv = b.inverse().expect("decoration is complementary");
    &(&b * &Mat::diag(&d)) * &binv
}

/// `I_ij(A, U, V) = (A_{κ^i, κ^j}, U, V)`.
pub fn functor_i(i: u8, j: u8, x: &DecoratedAlgebra) -> Result<DecoratedAlgebra> {
    if i > 1 || j > 1 {
        return Err(Error::InvalidInput(format!(
            "I_{i}{j}: exponents must be 0 or 1"
        )));
    }
    let n = x.n();
    let k = kappa(x);
    let pick = |e: u8| if e == 1 { k.clone() } else { Mat::identity(n) };
    let alg = isotope(&x.alg, &pick(i), &pick(j))?;
    Ok(DecoratedAlgebra {
        alg,
        u: x.u.clone(),
        v: x.v.clone(),
    })
}

/// The forgetful functor `(A, U, V) ↦ A`.
pub fn forget(x: &DecoratedAlgebra) -> Algebra {
    x.alg.clone()
}

/// Image of `X` under the isomorphism `F`: `(transport(A, F), F·U, F·V)`.
pub fn transport_decorated(x: &DecoratedAlgebra, f: &Mat) -> Result<DecoratedAlgebra> {
    let alg = transport(&x.alg, f)?;
    decorate(alg, f * &x.u, f * &x.v)
}

/// Whether the column spans of `a` and `b` agree within `tol`.
pub fn same_span(a: &Mat, b: &Mat, tol: f64) -> bool {
    a.cols() == b.cols()
        && b.to_cols().iter().all(|c| lstsq_residual(a, c) <= tol)
        && a.to_cols().iter().all(|c| lstsq_residual(b, c) <= tol)
}

/// Entrywise-equal tensors and equal subspaces.
pub fn same_decorated(x: &DecoratedAlgebra, y: &DecoratedAlgebra, tol: f64) -> bool {
    x.alg.max_tensor_diff(&y.alg) <= tol && same_span(&x.u, &y.u, tol) && same_span(&x.v, &y.v, tol)
}

/// JSON document: the algebra fields plus `U` and `V` as lists of columns.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct DecoratedDoc {
    #[serde(flatten)]
    pub algebra: AlgebraDoc,
    #[serde(rename = "U")]
    pub u: Vec<Vec<f64>>,
    #[serde(rename = "V")]
    pub v: Vec<Vec<f64>>,
}

impl From<&DecoratedAlgebra> for DecoratedDoc {
    fn from(x: &DecoratedAlgebra) -> Self {
        DecoratedDoc {
            algebra: AlgebraDoc::from(&x.alg),
            u: x.u.to_cols(),
            v: x.v.to_cols(),
        }
    }
}

impl TryFrom<DecoratedDoc> for DecoratedAlgebra {
    type Error = Error;
    fn try_from(doc: DecoratedDoc) -> Result<Self> {
        let alg = Algebra::try_from(doc.algebra)?;
        decorate(alg, Mat::from_cols(&doc.u)?, Mat::from_cols(&doc.v)?)
    }
}

impl DecoratedAlgebra {
    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(&DecoratedDoc::from(self))
            .expect("decorated algebra serializes")
    }

    pub fn from_json(text: &str) -> Result<Self> {
        let doc: DecoratedDoc = serde_json::from_str(text)?;
        DecoratedAlgebra::try_from(doc)
    }
}
