//! Symmetric Lyapunov certificates on a subspace.

use nalgebra::DMatrix;

use super::{violates, worst_eigenvalue, Space};
use crate::error::{Error, Result};
use crate::linalg::{definiteness_on, Definiteness};

/// Largest restricted dimension for the Kronecker-product solve.
pub const MAX_LYAPUNOV_DIM: usize = 40;

const SEMI_SHIFT: f64 = 1e-6;

/// Solve `QR + RᵀQ = C` for symmetric `Q` via the vectorized system
/// `(Rᵀ ⊗ I + I ⊗ Rᵀ) vec Q = vec C`.
fn solve_lyapunov(r: &DMatrix<f64>, c: &DMatrix<f64>) -> Option<DMatrix<f64>> {
    let s = r.nrows();
    let id = DMatrix::<f64>::identity(s, s);
    let rt = r.transpose();
    let k = rt.kronecker(&id) + id.kronecker(&rt);
    let rhs = nalgebra::DVector::from_column_slice(c.as_slice());
    let x = k.lu().solve(&rhs)?;
    let q = DMatrix::from_column_slice(s, s, x.as_slice());
    Some((&q + q.transpose()) * 0.5)
}

/// A symmetric `P = BQBᵀ` with `PA + AᵀP` negative definite on `S` (negative
/// semidefinite when `strict` is false), or `None` when `A` is not
/// (semi)stable on `S` or no certificate exists for a semistable `A`.
pub fn lyapunov_certificate(a: &nalgebra::DMatrix<f64>, s: Option<&crate::linalg::Subspace>, strict: bool) -> Result<Option<DMatrix<f64>>> {
    let space = Space::new(a, s)?;
    let sub = space.subspace();
    let dim = space.dim();
    if dim > MAX_LYAPUNOV_DIM {
        return Err(Error::DimensionCap { what: "Lyapunov solve", found: dim, cap: MAX_LYAPUNOV_DIM });
    }
    let b = sub.basis();
    if dim == 0 {
        return Ok(Some(DMatrix::zeros(a.nrows(), a.nrows())));
    }
    let (worst, norm) = worst_eigenvalue(a, &space)?;
    let z = worst.expect("nonempty spectrum");
    let stable = !violates(z.re, norm, true);
    if !stable && (strict || violates(z.re, norm, false)) {
        return Ok(None);
    }
    let r = space.compress(a);
    let minus_i = -DMatrix::<f64>::identity(dim, dim);
    let shifted = if stable { r.clone() } else { &r - DMatrix::<f64>::identity(dim, dim) * (SEMI_SHIFT * r.norm().max(1.0)) };
    let Some(q) = solve_lyapunov(&shifted, &minus_i) else {
        return if stable { Err(Error::Numerical("Lyapunov system is singular".into())) } else { Ok(None) };
    };
    let p = b * &q * b.transpose();
    let h = &p * a + a.transpose() * &p;
    let class = definiteness_on(&h, &sub)?;
    match (class, stable) {
        (Definiteness::NegativeDefinite, _) => Ok(Some(p)),
        (Definiteness::NegativeSemidefinite, false) if !strict => Ok(Some(p)),
        (_, true) => Err(Error::Numerical("Lyapunov certificate failed verification".into())),
        _ => Ok(None),
    }
}
