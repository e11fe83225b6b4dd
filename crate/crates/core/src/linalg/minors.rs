//! Signed principal minors and the P / P₀⁺ matrix classes.

use nalgebra::DMatrix;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

pub const MAX_MINOR_DIM: usize = 14;

/// Relative threshold below which a minor counts as zero.
pub const MINOR_ZERO_TOL: f64 = 1e-9;

/// `(−1)^|α| det A[α,α]` for one index set `α`.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct PrincipalMinor {
    pub indices: Vec<usize>,
    pub value: f64,
    /// Product of the norms of the rows `A[i,:]`, `i ∈ α`; the zero threshold
    /// scales with it.
    pub scale: f64,
}

impl PrincipalMinor {
    pub fn order(&self) -> usize {
        self.indices.len()
    }

    pub fn is_zero(&self) -> bool {
        self.value.abs() <= MINOR_ZERO_TOL * self.scale
    }

    pub fn is_positive(&self) -> bool {
        self.value > 0.0 && !self.is_zero()
    }

    pub fn is_negative(&self) -> bool {
        self.value < 0.0 && !self.is_zero()
    }
}

/// All `2ⁿ − 1` signed principal minors, ordered by size and then
/// lexicographically by index set.
pub fn signed_principal_minors(a: &DMatrix<f64>) -> Result<Vec<PrincipalMinor>> {
    let n = a.nrows();
    if a.ncols() != n {
        return Err(Error::DimensionMismatch { expected: n, found: a.ncols() });
    }
    if n > MAX_MINOR_DIM {
        return Err(Error::DimensionCap { what: "principal minors", found: n, cap: MAX_MINOR_DIM });
    }
    Ok(signed_minors_up_to(a, n))
}

/// Signed principal minors of order at most `order`, in the same order as
/// [`signed_principal_minors`]. No dimension cap applies.
pub fn signed_minors_up_to(a: &DMatrix<f64>, order: usize) -> Vec<PrincipalMinor> {
    let n = a.nrows();
    let mut sets: Vec<Vec<usize>> = Vec::new();
    let mut current = Vec::new();
    subsets(n, order.min(n), 0, &mut current, &mut sets);
    sets.sort_by(|x, y| x.len().cmp(&y.len()).then_with(|| x.cmp(y)));
    let row_norms: Vec<f64> = a.row_iter().map(|r| r.norm()).collect();
    sets.into_par_iter()
        .map(|idx| {
            let k = idx.len();
            let sub = DMatrix::from_fn(k, k, |r, c| a[(idx[r], idx[c])]);
            let scale: f64 = idx.iter().map(|&i| row_norms[i]).product();
            let sign = if k % 2 == 0 { 1.0 } else { -1.0 };
            PrincipalMinor { value: sign * sub.determinant(), scale, indices: idx }
        })
        .collect()
}

fn subsets(n: usize, max: usize, start: usize, current: &mut Vec<usize>, out: &mut Vec<Vec<usize>>) {
    for i in start..n {
        current.push(i);
        out.push(current.clone());
        if current.len() < max {
            subsets(n, max, i + 1, current, out);
        }
        current.pop();
    }
}

/// Every signed principal minor is positive.
pub fn is_p_matrix(a: &DMatrix<f64>) -> Result<bool> {
    Ok(signed_principal_minors(a)?.iter().all(PrincipalMinor::is_positive))
}

/// Every signed principal minor is non-negative and each order has a positive one.
pub fn is_p0plus_matrix(a: &DMatrix<f64>) -> Result<bool> {
    is_p0plus_to_order(a, a.nrows())
}

/// No signed principal minor is negative, and each order `1..=order` has a
/// positive one.
pub fn is_p0plus_to_order(a: &DMatrix<f64>, order: usize) -> Result<bool> {
    let minors = signed_principal_minors(a)?;
    if minors.iter().any(PrincipalMinor::is_negative) {
        return Ok(false);
    }
    Ok((1..=order).all(|k| minors.iter().any(|m| m.order() == k && m.is_positive())))
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    fn four_cycle(alpha: f64, beta: f64, gamma: f64) -> DMatrix<f64> {
        DMatrix::from_row_slice(3, 3, &[-1., 0., gamma, 1. - alpha, -1., 0., alpha, 1. - beta, -1.])
    }

    #[test]
    fn minus_identity_has_unit_minors() {
        for n in 1..=6 {
            let m = signed_principal_minors(&(-DMatrix::<f64>::identity(n, n))).unwrap();
            assert_eq!(m.len(), (1 << n) - 1);
            assert!(m.iter().all(|m| (m.value - 1.0).abs() < 1e-12));
        }
    }

    #[test]
    fn ordering_is_by_size_then_lexicographic() {
        let m = signed_principal_minors(&DMatrix::<f64>::identity(3, 3)).unwrap();
        let sets: Vec<_> = m.iter().map(|m| m.indices.clone()).collect();
        assert_eq!(sets, vec![vec![0], vec![1], vec![2], vec![0, 1], vec![0, 2], vec![1, 2], vec![0, 1, 2]]);
    }

    #[test]
    fn table_examples() {
        let a = four_cycle(2., -2., 1.);
        assert!(signed_principal_minors(&a).unwrap().iter().any(PrincipalMinor::is_negative));
        assert!(!is_p0plus_matrix(&a).unwrap());
        assert!(is_p0plus_matrix(&four_cycle(0., -2., -3.)).unwrap());
        assert!(is_p_matrix(&four_cycle(0., 0., 0.)).unwrap());
    }

    #[test]
    fn singular_diagonal() {
        let a = DMatrix::from_row_slice(2, 2, &[-1., 0., 0., 0.]);
        let m = signed_principal_minors(&a).unwrap();
        assert_eq!(m[0].value, 1.0);
        assert!(m[1].is_zero());
        assert!(m[2].is_zero());
        assert!(!is_p_matrix(&a).unwrap());
        assert!(!is_p0plus_matrix(&a).unwrap());
        assert!(is_p0plus_to_order(&a, 1).unwrap());
    }

    #[test]
    fn rotation_is_neither() {
        let a = DMatrix::from_row_slice(2, 2, &[0., 1., -1., 0.]);
        assert!(!is_p_matrix(&a).unwrap());
        assert!(!is_p0plus_matrix(&a).unwrap());
    }

    #[test]
    fn dimension_cap() {
        let a = DMatrix::<f64>::identity(15, 15);
        assert!(matches!(signed_principal_minors(&a), Err(Error::DimensionCap { .. })));
    }

    proptest! {
        #[test]
        fn p_implies_p0plus(entries in proptest::collection::vec(-3.0..3.0f64, 9)) {
            let a = DMatrix::from_row_slice(3, 3, &entries);
            if is_p_matrix(&a).unwrap() {
                prop_assert!(is_p0plus_matrix(&a).unwrap());
            }
        }

        #[test]
        fn diagonal_scaling_keeps_signs(entries in proptest::collection::vec(-3.0..3.0f64, 9),
                                        d in proptest::collection::vec(0.1..10.0f64, 3)) {
            let a = DMatrix::from_row_slice(3, 3, &entries);
            let ad = &a * DMatrix::from_diagonal(&nalgebra::DVector::from_vec(d));
            let m1 = signed_principal_minors(&a).unwrap();
            let m2 = signed_principal_minors(&ad).unwrap();
            for (x, y) in m1.iter().zip(&m2) {
                if !x.is_zero() && !y.is_zero() {
                    prop_assert_eq!(x.value > 0.0, y.value > 0.0);
                }
            }
        }
    }
}
