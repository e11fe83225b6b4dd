//! Common sign vectors of two subspaces.
//!
//! A sign vector `σ ∈ {−1,0,+1}ⁿ` is realized by a subspace `S` when some
//! `v ∈ S` has `sign(v) = σ`. For a fixed support the vectors of `S` vanishing
//! off the support form a subspace `im W`; `σ` is then realized iff the linear
//! program `max t` subject to `σᵢ(Wd)ᵢ ≥ t` on the support, `‖d‖∞ ≤ 1`, has an
//! optimum `t > 10⁻⁹`.

use std::fmt;

use minilp::{ComparisonOp, OptimizationDirection, Problem};
use nalgebra::{DMatrix, DVector};
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use super::{null_space, Subspace};
use crate::error::{Error, Result};

pub const MAX_SIGN_DIM: usize = 12;

const MARGIN_TOL: f64 = 1e-9;

#[derive(Clone, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(transparent)]
pub struct SignVector(pub Vec<i8>);

impl SignVector {
    pub fn is_zero(&self) -> bool {
        self.0.iter().all(|s| *s == 0)
    }

    pub fn negated(&self) -> SignVector {
        SignVector(self.0.iter().map(|s| -s).collect())
    }
}

impl fmt::Display for SignVector {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let parts: Vec<&str> = self
            .0
            .iter()
            .map(|s| match s {
                1 => "+",
                -1 => "-",
                _ => "0",
            })
            .collect();
        write!(f, "({})", parts.join(","))
    }
}

/// Sign of each entry; entries below `1e-9 · max|vᵢ|` count as zero.
pub fn sign_of(v: &[f64]) -> SignVector {
    let scale = v.iter().fold(0.0f64, |m, x| m.max(x.abs()));
    SignVector(
        v.iter()
            .map(|x| {
                if x.abs() <= MARGIN_TOL * scale {
                    0
                } else if *x > 0.0 {
                    1
                } else {
                    -1
                }
            })
            .collect(),
    )
}

/// Vectors `u ∈ S1`, `v ∈ S2` sharing the nonzero sign vector `sign`.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct SignWitness {
    pub sign: SignVector,
    pub u: Vec<f64>,
    pub v: Vec<f64>,
}

/// First nonzero sign vector (in lexicographic order with `− < 0 < +`, among
/// vectors whose first nonzero entry is `+`) realized by both subspaces.
pub fn sign_vectors_intersect(s1: &Subspace, s2: &Subspace) -> Result<Option<SignWitness>> {
    let n = s1.ambient_dim();
    if s2.ambient_dim() != n {
        return Err(Error::DimensionMismatch { expected: n, found: s2.ambient_dim() });
    }
    if n > MAX_SIGN_DIM {
        return Err(Error::DimensionCap { what: "sign-vector enumeration", found: n, cap: MAX_SIGN_DIM });
    }
    if s1.dim() == 0 || s2.dim() == 0 {
        return Ok(None);
    }

    // Support patterns are bitmasks of nonzero positions.
    let supports: Vec<Option<(DMatrix<f64>, DMatrix<f64>)>> = (0..1usize << n)
        .into_par_iter()
        .map(|mask| {
            if mask == 0 {
                return None;
            }
            let w1 = support_basis(s1, mask)?;
            let w2 = support_basis(s2, mask)?;
            Some((w1, w2))
        })
        .collect();

    let total = 3usize.pow(n as u32);
    let found = (0..total).into_par_iter().find_map_first(|code| {
        let sigma = decode(code, n)?;
        let mask = sigma.iter().enumerate().filter(|(_, s)| **s != 0).fold(0usize, |m, (i, _)| m | (1 << i));
        let (w1, w2) = supports[mask].as_ref()?;
        let u = realize(w1, &sigma)?;
        let v = realize(w2, &sigma)?;
        Some(SignWitness { sign: SignVector(sigma), u, v })
    });
    Ok(found)
}

/// Decode a base-3 index (most significant digit first, digits `−1,0,+1`);
/// `None` for the zero vector and for vectors whose first nonzero entry is `−1`.
fn decode(mut code: usize, n: usize) -> Option<Vec<i8>> {
    let mut sigma = vec![0i8; n];
    for i in (0..n).rev() {
        sigma[i] = (code % 3) as i8 - 1;
        code /= 3;
    }
    match sigma.iter().find(|s| **s != 0) {
        Some(1) => Some(sigma),
        _ => None,
    }
}

/// Orthonormal basis of the vectors in `s` vanishing outside `mask`.
fn support_basis(s: &Subspace, mask: usize) -> Option<DMatrix<f64>> {
    let b = s.basis();
    let n = b.nrows();
    let zeros: Vec<usize> = (0..n).filter(|i| mask & (1 << i) == 0).collect();
    let w = if zeros.is_empty() {
        b.clone()
    } else {
        let rows = DMatrix::from_fn(zeros.len(), b.ncols(), |r, c| b[(zeros[r], c)]);
        let k = null_space(&rows);
        if k.ncols() == 0 {
            return None;
        }
        b * k
    };
    Some(w)
}

/// A vector `Wd` with sign exactly `sigma`, if one exists.
fn realize(w: &DMatrix<f64>, sigma: &[i8]) -> Option<Vec<f64>> {
    let support: Vec<usize> = (0..sigma.len()).filter(|&i| sigma[i] != 0).collect();
    let d = if w.ncols() == 1 {
        let col = w.column(0);
        let margin = support.iter().map(|&i| f64::from(sigma[i]) * col[i]).fold(f64::INFINITY, f64::min);
        let flipped = support.iter().map(|&i| -f64::from(sigma[i]) * col[i]).fold(f64::INFINITY, f64::min);
        if margin > MARGIN_TOL {
            DVector::from_element(1, 1.0)
        } else if flipped > MARGIN_TOL {
            DVector::from_element(1, -1.0)
        } else {
            return None;
        }
    } else {
        let mut lp = Problem::new(OptimizationDirection::Maximize);
        let vars: Vec<_> = (0..w.ncols()).map(|_| lp.add_var(0.0, (-1.0, 1.0))).collect();
        let t = lp.add_var(1.0, (-10.0, 10.0));
        for &i in &support {
            let s = f64::from(sigma[i]);
            let mut row: Vec<_> = vars.iter().enumerate().map(|(j, &x)| (x, s * w[(i, j)])).collect();
            row.push((t, -1.0));
            lp.add_constraint(row.as_slice(), ComparisonOp::Ge, 0.0);
        }
        let sol = lp.solve().ok()?;
        if sol.objective() <= MARGIN_TOL {
            return None;
        }
        DVector::from_iterator(vars.len(), vars.iter().map(|&x| sol[x]))
    };
    let mut v: Vec<f64> = (w * d).iter().copied().collect();
    for (i, s) in sigma.iter().enumerate() {
        if *s == 0 {
            v[i] = 0.0;
        }
    }
    Some(v)
}
