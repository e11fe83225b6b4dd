//! Dense linear algebra on subspaces.
//!
//! A [`Subspace`] of ℝⁿ is stored through an orthonormal basis `B` (n×s).
//! Operators whose image lies in the subspace are studied through the
//! compression `BᵀAB`, whose spectrum is the spectrum of `A` restricted to it.

mod minors;
mod signs;

use nalgebra::{Complex, DMatrix, DVector, Schur, SymmetricEigen, SVD};
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

pub use minors::{
    is_p0plus_matrix, is_p0plus_to_order, is_p_matrix, signed_minors_up_to, signed_principal_minors, PrincipalMinor,
    MAX_MINOR_DIM, MINOR_ZERO_TOL,
};
pub use signs::{sign_of, sign_vectors_intersect, SignVector, SignWitness, MAX_SIGN_DIM};

/// Relative threshold used by stability and definiteness decisions.
pub const TAU: f64 = 1e-9;

/// Singular values below this fraction of the largest count as zero.
pub const RANK_TOL: f64 = 1e-10;

/// Relative residual allowed when checking `im A ⊆ S`.
pub const IMAGE_TOL: f64 = 1e-8;

/// Relative asymmetry allowed for symmetric inputs.
pub const SYMMETRY_TOL: f64 = 1e-10;

/// A linear subspace of ℝⁿ with an orthonormal basis.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(into = "SubspaceRepr", try_from = "SubspaceRepr")]
pub struct Subspace {
    basis: DMatrix<f64>,
}

#[derive(Serialize, Deserialize)]
struct SubspaceRepr {
    ambient_dim: usize,
    /// Basis vectors, one per entry.
    basis: Vec<Vec<f64>>,
}

impl From<Subspace> for SubspaceRepr {
    fn from(s: Subspace) -> Self {
        SubspaceRepr {
            ambient_dim: s.ambient_dim(),
            basis: s.basis.column_iter().map(|c| c.iter().copied().collect()).collect(),
        }
    }
}

impl TryFrom<SubspaceRepr> for Subspace {
    type Error = Error;

    fn try_from(r: SubspaceRepr) -> Result<Self> {
        if let Some(bad) = r.basis.iter().find(|v| v.len() != r.ambient_dim) {
            return Err(Error::DimensionMismatch { expected: r.ambient_dim, found: bad.len() });
        }
        let cols: Vec<DVector<f64>> = r.basis.into_iter().map(DVector::from_vec).collect();
        let basis = if cols.is_empty() { DMatrix::zeros(r.ambient_dim, 0) } else { DMatrix::from_columns(&cols) };
        let gram = basis.transpose() * &basis;
        if (gram - DMatrix::identity(basis.ncols(), basis.ncols())).amax() > 1e-12 {
            return Err(Error::Precondition("subspace basis is not orthonormal".into()));
        }
        Ok(Subspace { basis })
    }
}

impl Subspace {
    /// Column space of `m`.
    pub fn from_spanning(m: &DMatrix<f64>) -> Self {
        let n = m.nrows();
        if m.ncols() == 0 || n == 0 {
            return Self::zero(n);
        }
        let svd = SVD::new(m.clone(), true, false);
        let u = svd.u.expect("requested U");
        let smax = svd.singular_values.max();
        if !(smax > 0.0) {
            return Self::zero(n);
        }
        let cols: Vec<DVector<f64>> = svd
            .singular_values
            .iter()
            .enumerate()
            .filter(|(_, s)| **s > RANK_TOL * smax)
            .map(|(j, _)| u.column(j).into_owned())
            .collect();
        Self::from_orthonormal_columns(n, cols)
    }

    /// Span of a list of vectors of length `n`.
    pub fn from_vectors(n: usize, vectors: &[DVector<f64>]) -> Result<Self> {
        if let Some(v) = vectors.iter().find(|v| v.len() != n) {
            return Err(Error::DimensionMismatch { expected: n, found: v.len() });
        }
        if vectors.is_empty() {
            return Ok(Self::zero(n));
        }
        Ok(Self::from_spanning(&DMatrix::from_columns(vectors)))
    }

    pub fn full(n: usize) -> Self {
        Subspace { basis: DMatrix::identity(n, n) }
    }

    pub fn zero(n: usize) -> Self {
        Subspace { basis: DMatrix::zeros(n, 0) }
    }

    fn from_orthonormal_columns(n: usize, cols: Vec<DVector<f64>>) -> Self {
        if cols.is_empty() {
            Self::zero(n)
        } else {
            Subspace { basis: DMatrix::from_columns(&cols) }
        }
    }

    pub fn dim(&self) -> usize {
        self.basis.ncols()
    }

    pub fn ambient_dim(&self) -> usize {
        self.basis.nrows()
    }

    pub fn is_full(&self) -> bool {
        self.dim() == self.ambient_dim()
    }

    /// Orthonormal basis `B` (n×s).
    pub fn basis(&self) -> &DMatrix<f64> {
        &self.basis
    }

    /// Orthogonal projector `BBᵀ`.
    pub fn projector(&self) -> DMatrix<f64> {
        &self.basis * self.basis.transpose()
    }

    pub fn project(&self, v: &DVector<f64>) -> DVector<f64> {
        &self.basis * (self.basis.transpose() * v)
    }

    /// `‖A − BBᵀA‖_F / ‖A‖_F`, zero for `A = 0`.
    pub fn image_residual(&self, a: &DMatrix<f64>) -> f64 {
        let norm = a.norm();
        if norm == 0.0 {
            return 0.0;
        }
        let r = a - &self.basis * (self.basis.transpose() * a);
        r.norm() / norm
    }

    pub fn contains(&self, v: &DVector<f64>) -> bool {
        let norm = v.norm();
        norm == 0.0 || (v - self.project(v)).norm() <= IMAGE_TOL * norm
    }

    /// `S⊥` with an orthonormal basis.
    pub fn complement(&self) -> Subspace {
        orthogonal_complement(self)
    }

    /// True when both subspaces are the same (to the image tolerance).
    pub fn same_as(&self, other: &Subspace) -> bool {
        self.ambient_dim() == other.ambient_dim()
            && self.dim() == other.dim()
            && other.image_residual(&self.basis) <= IMAGE_TOL
    }
}

/// Orthonormal basis of `ker M` as the columns of a matrix.
pub fn null_space(m: &DMatrix<f64>) -> DMatrix<f64> {
    let (r, c) = m.shape();
    if c == 0 {
        return DMatrix::zeros(0, 0);
    }
    if r == 0 {
        return DMatrix::identity(c, c);
    }
    // Pad with zero rows so the SVD returns a full set of right singular vectors.
    let mut padded = DMatrix::zeros(r.max(c), c);
    padded.view_mut((0, 0), (r, c)).copy_from(m);
    let svd = SVD::new(padded, false, true);
    let vt = svd.v_t.expect("requested Vᵀ");
    let smax = svd.singular_values.max();
    let cols: Vec<DVector<f64>> = svd
        .singular_values
        .iter()
        .enumerate()
        .filter(|(_, s)| !(smax > 0.0) || **s <= RANK_TOL * smax)
        .map(|(j, _)| vt.row(j).transpose())
        .collect();
    if cols.is_empty() {
        DMatrix::zeros(c, 0)
    } else {
        DMatrix::from_columns(&cols)
    }
}

pub fn orthogonal_complement(s: &Subspace) -> Subspace {
    let n = s.ambient_dim();
    if s.dim() == 0 {
        return Subspace::full(n);
    }
    let k = null_space(&s.basis.transpose());
    Subspace::from_orthonormal_columns(n, k.column_iter().map(|c| c.into_owned()).collect())
}

/// Distance between two subspaces: spectral norm of the difference of their
/// projectors, or 1 when the dimensions differ.
pub fn subspace_distance(a: &Subspace, b: &Subspace) -> f64 {
    if a.dim() != b.dim() || a.ambient_dim() != b.ambient_dim() {
        return 1.0;
    }
    let d = a.projector() - b.projector();
    if d.is_empty() {
        return 0.0;
    }
    d.singular_values().max()
}

/// `BᵀAB` after checking `im A ⊆ S`.
pub fn restrict(a: &DMatrix<f64>, s: &Subspace) -> Result<DMatrix<f64>> {
    check_square(a, s.ambient_dim())?;
    let residual = s.image_residual(a);
    if residual > IMAGE_TOL {
        return Err(Error::Precondition(format!(
            "image of the matrix is not contained in the subspace (relative residual {residual:.3e})"
        )));
    }
    Ok(compress(a, s))
}

/// `BᵀMB` without any containment check.
pub fn compress(m: &DMatrix<f64>, s: &Subspace) -> DMatrix<f64> {
    s.basis.transpose() * m * &s.basis
}

pub(crate) fn check_square(a: &DMatrix<f64>, n: usize) -> Result<()> {
    if a.nrows() != a.ncols() {
        return Err(Error::DimensionMismatch { expected: a.nrows(), found: a.ncols() });
    }
    if a.nrows() != n {
        return Err(Error::DimensionMismatch { expected: n, found: a.nrows() });
    }
    Ok(())
}

/// Eigenvalues with multiplicity, sorted by real then imaginary part.
pub fn eigenvalues(m: &DMatrix<f64>) -> Result<Vec<Complex<f64>>> {
    if m.nrows() != m.ncols() {
        return Err(Error::DimensionMismatch { expected: m.nrows(), found: m.ncols() });
    }
    if m.iter().any(|v| !v.is_finite()) {
        return Err(Error::Numerical("matrix has non-finite entries".into()));
    }
    let s = m.nrows();
    if s == 0 {
        return Ok(Vec::new());
    }
    let norm = m.norm();
    if norm == 0.0 {
        return Ok(vec![Complex::new(0.0, 0.0); s]);
    }
    let schur = Schur::try_new(m / norm, f64::EPSILON, 1000 * s)
        .ok_or_else(|| Error::Numerical("eigenvalue iteration did not converge".into()))?;
    let mut eig: Vec<Complex<f64>> = schur.complex_eigenvalues().iter().map(|z| z * norm).collect();
    if eig.iter().any(|z| !z.re.is_finite() || !z.im.is_finite()) {
        return Err(Error::Numerical("eigenvalue iteration produced non-finite values".into()));
    }
    eig.sort_by(|a, b| a.re.total_cmp(&b.re).then(a.im.total_cmp(&b.im)));
    Ok(eig)
}

/// Largest real part of the spectrum; `-∞` for the empty matrix.
pub fn spectral_abscissa(m: &DMatrix<f64>) -> Result<f64> {
    Ok(eigenvalues(m)?.iter().map(|z| z.re).fold(f64::NEG_INFINITY, f64::max))
}

/// Sign class of the quadratic form `x ↦ xᵀHx` on a subspace.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Definiteness {
    NegativeDefinite,
    NegativeSemidefinite,
    IndefiniteOrPositive,
}

impl Definiteness {
    pub fn is_negative_semidefinite(self) -> bool {
        self != Definiteness::IndefiniteOrPositive
    }
}

/// Largest eigenvalue of `BᵀHB` together with `‖H‖_F`.
pub fn max_eigenvalue_on(h: &DMatrix<f64>, s: &Subspace) -> Result<(f64, f64)> {
    check_square(h, s.ambient_dim())?;
    let norm = h.norm();
    let asym = (h - h.transpose()).norm();
    if asym > SYMMETRY_TOL * norm {
        return Err(Error::Precondition(format!("matrix is not symmetric (asymmetry {asym:.3e})")));
    }
    if s.dim() == 0 {
        return Ok((f64::NEG_INFINITY, norm));
    }
    let sym = (h + h.transpose()) * 0.5;
    let c = compress(&sym, s);
    let c = (&c + c.transpose()) * 0.5;
    let lmax = SymmetricEigen::new(c).eigenvalues.max();
    if !lmax.is_finite() {
        return Err(Error::Numerical("non-finite eigenvalue in definiteness test".into()));
    }
    Ok((lmax, norm))
}

pub fn definiteness_on(h: &DMatrix<f64>, s: &Subspace) -> Result<Definiteness> {
    let (lmax, norm) = max_eigenvalue_on(h, s)?;
    Ok(if lmax < -TAU * norm {
        Definiteness::NegativeDefinite
    } else if lmax <= TAU * norm {
        Definiteness::NegativeSemidefinite
    } else {
        Definiteness::IndefiniteOrPositive
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    fn random_matrix(rng: &mut ChaCha8Rng, r: usize, c: usize) -> DMatrix<f64> {
        DMatrix::from_fn(r, c, |_, _| rng.random_range(-1.0..1.0))
    }

    #[test]
    fn subspace_from_spanning_drops_dependent_columns() {
        let m = DMatrix::from_row_slice(3, 3, &[1., 2., 0., 1., 2., 0., 0., 0., 0.]);
        let s = Subspace::from_spanning(&m);
        assert_eq!(s.dim(), 1);
        let b = s.basis();
        assert!(((b.transpose() * b)[(0, 0)] - 1.0).abs() < 1e-12);
        assert_eq!(Subspace::from_spanning(&DMatrix::zeros(3, 2)).dim(), 0);
        assert_eq!(Subspace::from_spanning(&DMatrix::zeros(3, 0)).dim(), 0);
    }

    #[test]
    fn complement_examples() {
        let e1 = Subspace::from_vectors(2, &[DVector::from_vec(vec![1.0, 0.0])]).unwrap();
        let c = e1.complement();
        assert_eq!(c.dim(), 1);
        assert!((c.basis()[(1, 0)].abs() - 1.0).abs() < 1e-12);
        assert!(c.basis()[(0, 0)].abs() < 1e-12);

        let d = Subspace::from_vectors(2, &[DVector::from_vec(vec![1.0, 1.0])]).unwrap().complement();
        let r = 1.0 / 2f64.sqrt();
        let sign = d.basis()[(0, 0)].signum();
        assert!((d.basis()[(0, 0)] * sign - r).abs() < 1e-12);
        assert!((d.basis()[(1, 0)] * sign + r).abs() < 1e-12);

        assert_eq!(Subspace::zero(3).complement().dim(), 3);
        assert_eq!(Subspace::full(3).complement().dim(), 0);
    }

    #[test]
    fn null_space_of_wide_and_tall() {
        let m = DMatrix::from_row_slice(1, 3, &[1., 1., 1.]);
        let k = null_space(&m);
        assert_eq!(k.ncols(), 2);
        assert!((&m * &k).amax() < 1e-12);
        let tall = DMatrix::from_row_slice(3, 2, &[1., 0., 0., 1., 1., 1.]);
        assert_eq!(null_space(&tall).ncols(), 0);
        assert_eq!(null_space(&DMatrix::zeros(2, 2)).ncols(), 2);
    }

    #[test]
    fn restrict_examples() {
        let s = Subspace::full(3);
        let r = restrict(&(-DMatrix::identity(3, 3)), &s).unwrap();
        assert_eq!(r, -DMatrix::<f64>::identity(3, 3));

        let u = DVector::from_vec(vec![0.6, 0.8, 0.0]);
        let v = DVector::from_vec(vec![1.0, -2.0, 5.0]);
        let a = -(&u * v.transpose());
        let s = Subspace::from_vectors(3, &[u.clone()]).unwrap();
        let r = restrict(&a, &s).unwrap();
        assert!((r[(0, 0)] + v.dot(&u)).abs() < 1e-12);

        let bad = DMatrix::identity(3, 3);
        assert!(matches!(restrict(&bad, &s), Err(Error::Precondition(_))));
    }

    #[test]
    fn eigenvalue_examples() {
        let rot = DMatrix::from_row_slice(2, 2, &[0., 1., -1., 0.]);
        let e = eigenvalues(&rot).unwrap();
        assert!(e[0].re.abs() < 1e-12 && (e[0].im + 1.0).abs() < 1e-12);
        assert!(e[1].re.abs() < 1e-12 && (e[1].im - 1.0).abs() < 1e-12);

        let unstable = DMatrix::from_row_slice(3, 3, &[-1., 0., -3., 1., -1., 0., 0., 3., -1.]);
        let e = eigenvalues(&unstable).unwrap();
        assert_eq!(e.iter().filter(|z| z.re > 0.0).count(), 2);
        assert!(spectral_abscissa(&unstable).unwrap() > 0.0);

        let companion = DMatrix::from_row_slice(3, 3, &[0., 1., 0., 0., 0., 1., -6., -11., -6.]);
        let e = eigenvalues(&companion).unwrap();
        for (z, want) in e.iter().zip([-3.0, -2.0, -1.0]) {
            assert!((z.re - want).abs() < 1e-10 && z.im.abs() < 1e-10);
        }
        assert!(eigenvalues(&DMatrix::from_element(1, 1, f64::NAN)).is_err());
    }

    #[test]
    fn definiteness_examples() {
        let s = Subspace::full(2);
        assert_eq!(definiteness_on(&(-DMatrix::identity(2, 2)), &s).unwrap(), Definiteness::NegativeDefinite);
        assert_eq!(definiteness_on(&DMatrix::zeros(2, 2), &s).unwrap(), Definiteness::NegativeSemidefinite);
        let h = DMatrix::from_diagonal(&DVector::from_vec(vec![-1.0, 1.0]));
        let e2 = Subspace::from_vectors(2, &[DVector::from_vec(vec![0.0, 1.0])]).unwrap();
        assert_eq!(definiteness_on(&h, &e2).unwrap(), Definiteness::IndefiniteOrPositive);
        let e1 = Subspace::from_vectors(2, &[DVector::from_vec(vec![1.0, 0.0])]).unwrap();
        assert_eq!(definiteness_on(&h, &e1).unwrap(), Definiteness::NegativeDefinite);
        assert_eq!(definiteness_on(&h, &Subspace::zero(2)).unwrap(), Definiteness::NegativeDefinite);
        let asym = DMatrix::from_row_slice(2, 2, &[0., 1., 0., 0.]);
        assert!(definiteness_on(&asym, &s).is_err());
    }

    #[test]
    fn restrict_preserves_nonzero_spectrum() {
        let mut rng = ChaCha8Rng::seed_from_u64(7);
        for trial in 0..50 {
            let n = 2 + trial % 5;
            let s_dim = 1 + trial % n;
            let s = Subspace::from_spanning(&random_matrix(&mut rng, n, s_dim));
            let a = s.projector() * random_matrix(&mut rng, n, n);
            let r = restrict(&a, &s).unwrap();
            let full = eigenvalues(&a).unwrap();
            let small = eigenvalues(&r).unwrap();
            // drop the n - s smallest-magnitude eigenvalues of A (the forced zeros)
            let mut by_mag = full.clone();
            by_mag.sort_by(|x, y| x.norm().total_cmp(&y.norm()));
            assert!(by_mag[..n - s.dim()].iter().all(|z| z.norm() < 1e-8));
            let mut rest: Vec<_> = by_mag[n - s.dim()..].to_vec();
            rest.sort_by(|a, b| a.re.total_cmp(&b.re).then(a.im.total_cmp(&b.im)));
            for (x, y) in rest.iter().zip(&small) {
                assert!((x - y).norm() < 1e-8, "{rest:?} vs {small:?}");
            }
        }
    }

    #[test]
    fn definiteness_agrees_with_full_eigendecomposition() {
        let mut rng = ChaCha8Rng::seed_from_u64(11);
        for trial in 0..1000 {
            let n = 1 + trial % 6;
            let m = random_matrix(&mut rng, n, n);
            let shift = rng.random_range(-2.0..1.0);
            let h = -(&m * m.transpose()) + DMatrix::identity(n, n) * shift;
            let h = (&h + h.transpose()) * 0.5;
            let lmax = SymmetricEigen::new(h.clone()).eigenvalues.max();
            let want = if lmax < -TAU * h.norm() {
                Definiteness::NegativeDefinite
            } else if lmax <= TAU * h.norm() {
                Definiteness::NegativeSemidefinite
            } else {
                Definiteness::IndefiniteOrPositive
            };
            assert_eq!(definiteness_on(&h, &Subspace::full(n)).unwrap(), want);
        }
    }

    #[test]
    fn subspace_serde_round_trip() {
        let s = Subspace::from_spanning(&DMatrix::from_row_slice(3, 2, &[1., 0., 1., 1., 0., 1.]));
        let json = serde_json::to_string(&s).unwrap();
        let back: Subspace = serde_json::from_str(&json).unwrap();
        assert_eq!(back, s);
    }

    #[test]
    fn distance_between_subspaces() {
        let a = Subspace::from_vectors(2, &[DVector::from_vec(vec![1.0, 1.0])]).unwrap();
        let b = Subspace::from_vectors(2, &[DVector::from_vec(vec![-2.0, -2.0])]).unwrap();
        assert!(subspace_distance(&a, &b) < 1e-12);
        assert!(a.same_as(&b));
        assert_eq!(subspace_distance(&a, &Subspace::full(2)), 1.0);
    }

    proptest! {
        #[test]
        fn complement_is_orthogonal(n in 1usize..7, k in 0usize..7, seed in any::<u64>()) {
            let mut rng = ChaCha8Rng::seed_from_u64(seed);
            let s = Subspace::from_spanning(&random_matrix(&mut rng, n, k.min(n)));
            let c = s.complement();
            prop_assert_eq!(s.dim() + c.dim(), n);
            prop_assert!((s.basis().transpose() * c.basis()).iter().all(|v| v.abs() < 1e-12));
            let g = c.basis().transpose() * c.basis();
            prop_assert!((g - DMatrix::identity(c.dim(), c.dim())).amax() < 1e-12);
        }
    }
}
