//! Network-level conclusions: classification, the certificate for classical
//! networks, uniqueness of complex-balanced equilibria, per-cycle necessary
//! conditions, and the combined report.

mod cycles;
mod report;

use nalgebra::{Complex, DMatrix, DVector};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::dynamics::{construct_rates, is_complex_balanced, jacobian, monomials};
use crate::error::{Error, Result};
use crate::linalg::{
    definiteness_on, eigenvalues, max_eigenvalue_on, orthogonal_complement, restrict, sign_vectors_intersect,
    Definiteness, SignVector, Subspace, TAU,
};
use crate::network::{
    enumerate_cycles, kinetic_subspace, laplacian, stoichiometric_subspace, structural_matrices, weakly_reversible,
    GmasNetwork, RateAssignment,
};
use crate::stability::Eigenvalue;

pub use cycles::{analyze_cycle_network, analyze_weakly_reversible, CycleCheck, CycleNetworkResult, NecessaryConditions};
pub use report::{full_report, render_text, AnalysisReport, ClassicalSample, ClassicalSummary, SectionError};

/// Relative tolerance for `‖Jv‖ ≤ tol·‖J‖·‖v‖` in the non-uniqueness witness.
pub const DEGENERACY_TOL: f64 = 1e-9;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum NetworkClass {
    /// Weakly reversible with `ỹ(i) = y(i)` at every source.
    Classical,
    SingleCycle,
    WeaklyReversible,
    General,
}

impl NetworkClass {
    pub fn name(self) -> &'static str {
        match self {
            NetworkClass::Classical => "classical",
            NetworkClass::SingleCycle => "single_cycle",
            NetworkClass::WeaklyReversible => "weakly_reversible",
            NetworkClass::General => "general",
        }
    }
}

/// Structural properties behind the classification.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct Traits {
    /// `ỹ(i) = y(i)` at every source vertex.
    pub kinetic_equals_stoichiometric: bool,
    pub single_cycle: bool,
    pub weakly_reversible: bool,
}

pub fn traits(net: &GmasNetwork) -> Traits {
    let kinetic_equals_stoichiometric = (0..net.n_vertices())
        .filter(|&i| net.is_source(i))
        .all(|i| net.vertices()[i].complex.kinetic.as_ref() == Some(&net.vertices()[i].complex.stoich));
    let single_cycle = net.n_edges() > 0
        && enumerate_cycles(net).is_ok_and(|c| c.len() == 1 && c[0].len() == net.n_edges());
    Traits { kinetic_equals_stoichiometric, single_cycle, weakly_reversible: weakly_reversible(net) }
}

/// Class with precedence classical, single cycle, weakly reversible, general.
pub fn classify(net: &GmasNetwork) -> NetworkClass {
    let t = traits(net);
    if t.kinetic_equals_stoichiometric && t.weakly_reversible {
        NetworkClass::Classical
    } else if t.single_cycle {
        NetworkClass::SingleCycle
    } else if t.weakly_reversible {
        NetworkClass::WeaklyReversible
    } else {
        NetworkClass::General
    }
}

/// `P = diag(1/x*)·D` and `H = PJD + DJᵀP` for a classical network.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ClassicalCertificate {
    pub p: Vec<f64>,
    pub h: Vec<Vec<f64>>,
    pub definiteness: Definiteness,
    /// Largest eigenvalue of `H` restricted to `S`.
    pub max_eigenvalue: f64,
    pub h_norm: f64,
    /// `‖H − P Y (A_{k*} + A_{k*}ᵀ) Yᵀ P‖_F / ‖H‖_F`.
    pub route_difference: f64,
}

fn rows(m: &DMatrix<f64>) -> Vec<Vec<f64>> {
    m.row_iter().map(|r| r.iter().copied().collect()).collect()
}

/// Certificate at `x*` with the rates from [`construct_rates`].
pub fn classical_certificate(net: &GmasNetwork, x_star: &[f64], d: &[f64]) -> Result<ClassicalCertificate> {
    let cert = construct_rates(net, x_star)?;
    classical_certificate_with_rates(net, &cert.k, x_star, d)
}

/// Certificate for given rates; `x*` must be complex balanced for them.
pub fn classical_certificate_with_rates(
    net: &GmasNetwork,
    k: &RateAssignment,
    x_star: &[f64],
    d: &[f64],
) -> Result<ClassicalCertificate> {
    let t = traits(net);
    if !(t.kinetic_equals_stoichiometric && t.weakly_reversible) {
        return Err(Error::Precondition("network is not weakly reversible with equal kinetic orders".into()));
    }
    let n = net.n_species();
    if d.len() != n {
        return Err(Error::DimensionMismatch { expected: n, found: d.len() });
    }
    if d.iter().any(|v| !(v.is_finite() && *v > 0.0)) {
        return Err(Error::NonPositive { what: "diagonal scaling" });
    }
    let balance = is_complex_balanced(net, k, x_star)?;
    if !balance.balanced {
        return Err(Error::Precondition(format!("x* is not complex balanced (residual {:.3e})", balance.residual)));
    }
    let j = jacobian(net, k, x_star)?;
    let p: Vec<f64> = x_star.iter().zip(d).map(|(x, d)| d / x).collect();
    let pm = DMatrix::from_diagonal(&DVector::from_column_slice(&p));
    let dm = DMatrix::from_diagonal(&DVector::from_column_slice(d));
    let h = &pm * &j * &dm + &dm * j.transpose() * &pm;

    let mono = monomials(net, x_star);
    let k_star: Vec<f64> = net.edges().iter().zip(k.as_slice()).map(|(e, k)| k * mono[e.source]).collect();
    let a_star = laplacian(net, &RateAssignment::new(k_star)?)?;
    let y = structural_matrices(net).y;
    let h2 = &pm * &y * (&a_star + a_star.transpose()) * y.transpose() * &pm;
    let h_norm = h.norm();
    let route_difference = if h_norm > 0.0 { (&h - &h2).norm() / h_norm } else { (&h - &h2).norm() };
    if route_difference > 1e-8 {
        return Err(Error::Internal(format!("Laplacian route disagrees with H (relative {route_difference:.3e})")));
    }
    let s = stoichiometric_subspace(net);
    let h_sym = (&h + h.transpose()) * 0.5;
    let (max_eigenvalue, _) = max_eigenvalue_on(&h_sym, &s)?;
    let definiteness = definiteness_on(&h_sym, &s)?;
    if definiteness != Definiteness::NegativeDefinite {
        return Err(Error::Internal(format!(
            "classical certificate is not negative definite on S (max eigenvalue {max_eigenvalue:.3e})"
        )));
    }
    Ok(ClassicalCertificate { p, h: rows(&h_sym), definiteness, max_eigenvalue, h_norm, route_difference })
}

/// `L(x) = Σ pᵢ xᵢ* [xᵢ(log(xᵢ/xᵢ*) − 1) + xᵢ*]`.
pub fn entropy_lyapunov(p: &[f64], x_star: &[f64], x: &[f64]) -> Result<f64> {
    let n = p.len();
    for v in [x_star, x] {
        if v.len() != n {
            return Err(Error::DimensionMismatch { expected: n, found: v.len() });
        }
    }
    for (v, what) in [(p, "weights"), (x_star, "reference state"), (x, "state")] {
        if v.iter().any(|c| !(c.is_finite() && *c > 0.0)) {
            return Err(Error::NonPositive { what });
        }
    }
    Ok((0..n).map(|i| p[i] * x_star[i] * (x[i] * ((x[i] / x_star[i]).ln() - 1.0) + x_star[i])).sum())
}

/// Evidence that complex-balanced equilibria are not unique: `u ∈ S̃^⊥` and
/// `v ∈ S` with equal signs, the equilibrium `x*` with `u = diag(1/x*)v`, rates
/// `k` making it complex balanced, and `‖Jv‖` for `J` at `x*`.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct NonUniquenessWitness {
    pub sign: SignVector,
    pub u: Vec<f64>,
    pub v: Vec<f64>,
    pub x_star: Vec<f64>,
    pub k: Vec<f64>,
    pub residual: f64,
    pub jv_norm: f64,
    pub j_norm: f64,
    pub v_norm: f64,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct UniquenessResult {
    /// At most one complex-balanced equilibrium in every stoichiometric class,
    /// for all rate constants.
    pub unique: bool,
    pub witness: Option<NonUniquenessWitness>,
}

/// Unique iff no nonzero sign vector is shared by `S̃^⊥` and `S`.
pub fn uniqueness_check(net: &GmasNetwork) -> Result<UniquenessResult> {
    if !weakly_reversible(net) {
        return Err(Error::Precondition("uniqueness check needs a weakly reversible network".into()));
    }
    let s = stoichiometric_subspace(net);
    let st_perp = orthogonal_complement(&kinetic_subspace(net));
    let Some(w) = sign_vectors_intersect(&st_perp, &s)? else {
        return Ok(UniquenessResult { unique: true, witness: None });
    };
    let x_star: Vec<f64> =
        (0..net.n_species()).map(|i| if w.sign.0[i] != 0 { w.v[i] / w.u[i] } else { 1.0 }).collect();
    let cert = construct_rates(net, &x_star)?;
    let j = jacobian(net, &cert.k, &x_star)?;
    let v = DVector::from_column_slice(&w.v);
    let jv_norm = (&j * &v).norm();
    let (j_norm, v_norm) = (j.norm(), v.norm());
    if jv_norm > DEGENERACY_TOL * j_norm * v_norm {
        return Err(Error::Internal(format!(
            "non-uniqueness witness does not annihilate the Jacobian (|Jv| = {jv_norm:.3e})"
        )));
    }
    Ok(UniquenessResult {
        unique: false,
        witness: Some(NonUniquenessWitness {
            sign: w.sign,
            u: w.u,
            v: w.v,
            x_star: cert.x_star,
            k: cert.k.as_slice().to_vec(),
            residual: cert.residual,
            jv_norm,
            j_norm,
            v_norm,
        }),
    })
}

/// A complex-balanced equilibrium that is not linearly stable, with the data
/// needed to reproduce it.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct InstabilityWitness {
    /// Index into the report's cycle list, for weakly reversible networks.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub cycle: Option<usize>,
    /// Diagonal scaling the equilibrium was built from (`x* = 1/d`).
    pub d: Vec<f64>,
    pub x_star: Vec<f64>,
    pub k: Vec<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub epsilon: Option<f64>,
    /// Complex-balance residual of `x*` under `k`.
    pub residual: f64,
    /// Eigenvalue of `J(x*)` restricted to `S` with positive real part.
    pub eigenvalue: Eigenvalue,
    pub jacobian_norm: f64,
}

/// Eigenvalue of `J|_S` with the largest real part, and `‖J‖_F`.
pub(crate) fn restricted_worst(j: &DMatrix<f64>, s: &Subspace) -> Result<(Option<Complex<f64>>, f64)> {
    let r = restrict(j, s)?;
    Ok((eigenvalues(&r)?.last().copied(), j.norm()))
}

/// Certify `x*` under `k` and return a witness if `J(x*)|_S` has an eigenvalue
/// with real part above `τ‖J‖`.
pub(crate) fn certify_witness(
    net: &GmasNetwork,
    k: &RateAssignment,
    x_star: &[f64],
    d: &[f64],
    cycle: Option<usize>,
    epsilon: Option<f64>,
) -> Result<Option<InstabilityWitness>> {
    let balance = is_complex_balanced(net, k, x_star)?;
    if !balance.balanced {
        return Err(Error::Internal(format!("witness equilibrium is not complex balanced (residual {:.3e})", balance.residual)));
    }
    let j = jacobian(net, k, x_star)?;
    let (worst, norm) = restricted_worst(&j, &stoichiometric_subspace(net))?;
    Ok(worst.filter(|z| z.re > TAU * norm).map(|z| InstabilityWitness {
        cycle,
        d: d.to_vec(),
        x_star: x_star.to_vec(),
        k: k.as_slice().to_vec(),
        epsilon,
        residual: balance.residual,
        eigenvalue: z.into(),
        jacobian_norm: norm,
    }))
}

/// Seeded random `(x*, D)` pairs with entries log-uniform in `[0.1, 10]`.
pub(crate) fn random_pairs(n: usize, count: usize, seed: u64) -> Vec<(Vec<f64>, Vec<f64>)> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let draw = |rng: &mut ChaCha8Rng| -> Vec<f64> { (0..n).map(|_| 10f64.powf(rng.random_range(-1.0..1.0))).collect() };
    (0..count).map(|_| (draw(&mut rng), draw(&mut rng))).collect()
}
