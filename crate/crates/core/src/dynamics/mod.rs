//! Generalized mass-action dynamics `dx/dt = Y A_k x^Ỹ`.
//!
//! Monomials `x^{ỹ(i)}` are evaluated as `exp(ỹ(i) · log x)` with `x` clipped
//! to `1e-300`, so negative and fractional kinetic orders behave uniformly.

mod integrate;

use nalgebra::{DMatrix, DVector};
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::linalg::{null_space, subspace_distance, Subspace};
use crate::network::{
    enumerate_cycles, laplacian, laplacian_of_edges, structural_matrices, weakly_reversible, Cycle, GmasNetwork,
    RateAssignment,
};

pub use integrate::{integrate_field, Halt, IntegrateOptions, Trajectory};

/// Relative residual accepted for `A_k x^Ỹ = 0`.
pub const BALANCE_TOL: f64 = 1e-10;

/// `x*` together with rates that make it complex balanced.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct EquilibriumCertificate {
    pub x_star: Vec<f64>,
    pub k: RateAssignment,
    /// `‖A_k (x*)^Ỹ‖_∞`.
    pub residual: f64,
}

/// Outcome of a complex-balance test.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct BalanceCheck {
    pub balanced: bool,
    pub residual: f64,
    /// Largest vertex throughput `Σ_out k·x^{ỹ(i)}`; the tolerance scales with it.
    pub scale: f64,
}

pub(crate) fn check_state(net: &GmasNetwork, x: &[f64]) -> Result<()> {
    if x.len() != net.n_species() {
        return Err(Error::DimensionMismatch { expected: net.n_species(), found: x.len() });
    }
    if x.iter().any(|v| !(v.is_finite() && *v > 0.0)) {
        return Err(Error::NonPositive { what: "concentrations" });
    }
    Ok(())
}

/// `x^{ỹ(i)}` for every vertex.
pub fn monomials(net: &GmasNetwork, x: &[f64]) -> Vec<f64> {
    let logs: Vec<f64> = x.iter().map(|v| v.max(1e-300).ln()).collect();
    (0..net.n_vertices())
        .map(|i| {
            let kin = &net.vertices()[i].complex.kinetic;
            match kin {
                Some(k) => k.iter().zip(&logs).map(|(a, l)| if *a == 0.0 { 0.0 } else { a * l }).sum::<f64>().exp(),
                None => 1.0,
            }
        })
        .collect()
}

/// Right-hand side as the sum over reactions `k x^{ỹ(i)} (y(i') − y(i))`.
pub fn rhs(net: &GmasNetwork, k: &RateAssignment, x: &[f64]) -> Result<Vec<f64>> {
    check_state(net, x)?;
    k.check_for(net)?;
    Ok(rhs_unchecked(net, k, x))
}

fn rhs_unchecked(net: &GmasNetwork, k: &RateAssignment, x: &[f64]) -> Vec<f64> {
    let mono = monomials(net, x);
    let mut out = vec![0.0; net.n_species()];
    for (e, rate) in net.edges().iter().zip(k.as_slice()) {
        let flux = rate * mono[e.source];
        let ys = &net.vertices()[e.source].complex.stoich;
        let yt = &net.vertices()[e.target].complex.stoich;
        for s in 0..out.len() {
            out[s] += flux * (yt[s] - ys[s]);
        }
    }
    out
}

/// Right-hand side in matrix form `Y A_k x^Ỹ`.
pub fn rhs_matrix_form(net: &GmasNetwork, k: &RateAssignment, x: &[f64]) -> Result<Vec<f64>> {
    check_state(net, x)?;
    let sm = structural_matrices(net);
    let a = laplacian(net, k)?;
    let mono = DVector::from_vec(monomials(net, x));
    Ok((&sm.y * (a * mono)).iter().copied().collect())
}

/// `J(x) = Y A_k diag(x^Ỹ) Ỹᵀ diag(1/x)`.
pub fn jacobian(net: &GmasNetwork, k: &RateAssignment, x: &[f64]) -> Result<DMatrix<f64>> {
    check_state(net, x)?;
    let sm = structural_matrices(net);
    let a = laplacian(net, k)?;
    let mono = DVector::from_vec(monomials(net, x));
    let inv_x = DVector::from_iterator(x.len(), x.iter().map(|v| 1.0 / v));
    Ok(&sm.y * a * DMatrix::from_diagonal(&mono) * sm.y_tilde.transpose() * DMatrix::from_diagonal(&inv_x))
}

/// Tests `A_k x^Ỹ = 0` relative to the largest vertex throughput.
pub fn is_complex_balanced(net: &GmasNetwork, k: &RateAssignment, x: &[f64]) -> Result<BalanceCheck> {
    check_state(net, x)?;
    let a = laplacian(net, k)?;
    let mono = monomials(net, x);
    let residual = (&a * DVector::from_column_slice(&mono)).amax();
    let mut throughput = vec![0.0; net.n_vertices()];
    for (e, rate) in net.edges().iter().zip(k.as_slice()) {
        throughput[e.source] += rate * mono[e.source];
    }
    let scale = throughput.iter().copied().fold(0.0, f64::max);
    Ok(BalanceCheck { balanced: residual <= BALANCE_TOL * scale, residual, scale })
}

/// Number of the given cycles through each edge.
fn edge_cycle_counts(net: &GmasNetwork, cycles: &[Cycle]) -> Vec<f64> {
    let mut count = vec![0.0; net.n_edges()];
    for c in cycles {
        for &e in &c.edges {
            count[e] += 1.0;
        }
    }
    count
}

fn require_weakly_reversible(net: &GmasNetwork) -> Result<()> {
    if !weakly_reversible(net) {
        return Err(Error::Precondition("network is not weakly reversible".into()));
    }
    Ok(())
}

fn certify(net: &GmasNetwork, k: RateAssignment, x_star: &[f64]) -> Result<EquilibriumCertificate> {
    let check = is_complex_balanced(net, &k, x_star)?;
    if !check.balanced {
        return Err(Error::Numerical(format!(
            "constructed rates leave a balance residual of {:.3e} (scale {:.3e})",
            check.residual, check.scale
        )));
    }
    Ok(EquilibriumCertificate { x_star: x_star.to_vec(), k, residual: check.residual })
}

/// Rates making `x*` complex balanced: the sum over all simple cycles `C` of
/// the rates `k^C_{i→i'} = 1/(x*)^{ỹ(i)}` on the edges of `C`.
pub fn construct_rates(net: &GmasNetwork, x_star: &[f64]) -> Result<EquilibriumCertificate> {
    check_state(net, x_star)?;
    require_weakly_reversible(net)?;
    let cycles = enumerate_cycles(net)?;
    let count = edge_cycle_counts(net, &cycles);
    let mono = monomials(net, x_star);
    let k: Vec<f64> = net.edges().iter().zip(&count).map(|(e, c)| c / mono[e.source]).collect();
    if net.n_edges() > 0 && k.iter().any(|v| !(*v > 0.0)) {
        return Err(Error::Internal("an edge of a weakly reversible network lies on no cycle".into()));
    }
    certify(net, RateAssignment::new(k)?, x_star)
}

pub(crate) fn check_cycle(net: &GmasNetwork, cycle: &Cycle) -> Result<()> {
    let len = cycle.vertices.len();
    let ok = len >= 2
        && cycle.edges.len() == len
        && cycle.edges.iter().enumerate().all(|(j, &e)| {
            e < net.n_edges() && {
                let edge = net.edges()[e];
                edge.source == cycle.vertices[j] && edge.target == cycle.vertices[(j + 1) % len]
            }
        });
    if ok {
        Ok(())
    } else {
        Err(Error::Precondition("cycle does not belong to the network".into()))
    }
}

/// Rates `k^ε = k^C + ε Σ_{C'≠C} k^{C'}` and the Jacobian at `x*`.
pub fn epsilon_family(
    net: &GmasNetwork,
    cycle: &Cycle,
    x_star: &[f64],
    eps: f64,
) -> Result<(RateAssignment, DMatrix<f64>)> {
    if !(eps > 0.0 && eps.is_finite()) {
        return Err(Error::NonPositive { what: "epsilon" });
    }
    check_state(net, x_star)?;
    check_cycle(net, cycle)?;
    require_weakly_reversible(net)?;
    let cycles = enumerate_cycles(net)?;
    let total = edge_cycle_counts(net, &cycles);
    let mono = monomials(net, x_star);
    let k: Vec<f64> = net
        .edges()
        .iter()
        .enumerate()
        .map(|(j, e)| {
            let own = if cycle.contains_edge(j) { 1.0 } else { 0.0 };
            (own + eps * (total[j] - own)) / mono[e.source]
        })
        .collect();
    let cert = certify(net, RateAssignment::new(k)?, x_star)?;
    let j = jacobian(net, &cert.k, x_star)?;
    Ok((cert.k, j))
}

/// `lim_{ε→0} J^ε = Y A^C_{k=1} Ỹᵀ diag(1/x*)`.
pub fn epsilon_limit(net: &GmasNetwork, cycle: &Cycle, x_star: &[f64]) -> Result<DMatrix<f64>> {
    check_state(net, x_star)?;
    let (a_c, _) = cycle_limit_matrix(net, cycle)?;
    let inv_x = DVector::from_iterator(x_star.len(), x_star.iter().map(|v| 1.0 / v));
    Ok(a_c * DMatrix::from_diagonal(&inv_x))
}

/// `A^C = Y A^C_{k=1} Ỹᵀ` and `S^C = im(Y I_{E(C)})`.
pub fn cycle_limit_matrix(net: &GmasNetwork, cycle: &Cycle) -> Result<(DMatrix<f64>, Subspace)> {
    check_cycle(net, cycle)?;
    let sm = structural_matrices(net);
    let lap = laplacian_of_edges(net.n_vertices(), cycle.edges.iter().map(|&e| (net.edges()[e], 1.0)));
    let a = &sm.y * lap * sm.y_tilde.transpose();
    let inc = DMatrix::from_fn(net.n_vertices(), cycle.len(), |v, j| sm.incidence[(v, cycle.edges[j])]);
    let s = Subspace::from_spanning(&(&sm.y * inc));
    Ok((a, s))
}

/// Checks `ker(A_k diag((x*)^Ỹ)) = ker I_Eᵀ`.
pub fn kernel_lemma_check(net: &GmasNetwork, k: &RateAssignment, x_star: &[f64]) -> Result<bool> {
    let check = is_complex_balanced(net, k, x_star)?;
    if !check.balanced {
        return Err(Error::Precondition(format!(
            "x* is not complex balanced (residual {:.3e})",
            check.residual
        )));
    }
    let sm = structural_matrices(net);
    let mono = DVector::from_vec(monomials(net, x_star));
    let m = laplacian(net, k)? * DMatrix::from_diagonal(&mono);
    let k1 = Subspace::from_spanning(&null_space(&m));
    let k2 = Subspace::from_spanning(&null_space(&sm.incidence.transpose()));
    Ok(subspace_distance(&k1, &k2) <= 1e-8)
}

/// Integrate the mass-action ODE from `x0`.
pub fn integrate(
    net: &GmasNetwork,
    k: &RateAssignment,
    x0: &[f64],
    t_end: f64,
    opts: &IntegrateOptions,
) -> Result<Trajectory> {
    check_state(net, x0)?;
    k.check_for(net)?;
    integrate_field(|x| rhs_unchecked(net, k, x), x0, t_end, opts)
}
