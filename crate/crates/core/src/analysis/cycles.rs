//! Cycle-based conclusions: the exact characterization for networks that are a
//! single cycle, and the per-cycle necessary conditions for weakly reversible
//! networks.

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use super::{certify_witness, rows, InstabilityWitness};
use crate::dynamics::{construct_rates, cycle_limit_matrix, epsilon_family};
use crate::error::{Error, Result};
use crate::network::{enumerate_cycles, weakly_reversible, Cycle, GmasNetwork};
use crate::stability::{
    is_d_semistable_with, is_d_stable_with, is_diagonally_d_stable_on_with, sharpen, Method, Space, StabilityOptions,
    StabilityVerdict, Status,
};

/// Largest number of halvings of `ε` when concretizing a cycle witness.
pub const MAX_HALVINGS: usize = 60;

/// Outcome for a network whose edge set is one directed cycle.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct CycleNetworkResult {
    /// `A = Y A_{k=1} Ỹᵀ`, row by row.
    pub matrix: Vec<Vec<f64>>,
    pub subspace_dim: usize,
    #[serde(rename = "D_stable")]
    pub d_stable: StabilityVerdict,
    #[serde(rename = "diag_D_stable")]
    pub diag_d_stable: StabilityVerdict,
    /// Linear stability of complex-balanced equilibria for all rate constants.
    pub conclusion: String,
    /// Diagonal stability of complex-balanced equilibria for all rate constants.
    pub diagonal_conclusion: String,
    pub witness: Option<InstabilityWitness>,
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    pub notes: Vec<String>,
}

fn single_cycle(net: &GmasNetwork) -> Result<Cycle> {
    let cycles = enumerate_cycles(net)?;
    match cycles.as_slice() {
        [c] if c.len() == net.n_edges() => Ok(c.clone()),
        _ => Err(Error::Precondition("network is not a single cycle".into())),
    }
}

/// For a single cycle all complex-balanced equilibria are linearly stable for
/// all rate constants iff `A = Y A_{k=1} Ỹᵀ` is D-stable on `S`, and diagonally
/// stable for all rate constants iff `A` is diagonally D-stable on `S`. A
/// counterexample `D` becomes the equilibrium `x* = 1/d` with rates from
/// [`construct_rates`], where `J(x*) = AD`.
pub fn analyze_cycle_network(net: &GmasNetwork, opts: &StabilityOptions) -> Result<CycleNetworkResult> {
    let cycle = single_cycle(net)?;
    let (a, s) = cycle_limit_matrix(net, &cycle)?;
    let d_stable = is_d_stable_with(&a, Some(&s), opts)?;
    let diag_d_stable = is_diagonally_d_stable_on_with(&a, &s, false, opts)?;
    let mut notes = Vec::new();

    let conclusion = match d_stable.status {
        Status::Holds => "all complex-balanced equilibria are linearly stable for all rate constants".to_string(),
        Status::Fails => "NOT linearly stable for all rate constants".to_string(),
        Status::Inconclusive => {
            "no counterexample found by sampling; linear stability for all rate constants is not certified".to_string()
        }
    };
    let diagonal_conclusion = match diag_d_stable.status {
        Status::Holds => "diagonally stable for all rate constants".to_string(),
        Status::Fails => "NOT diagonally stable for all rate constants".to_string(),
        Status::Inconclusive => {
            "diagonal certificates found on sampled D only; diagonal stability for all rate constants is not certified"
                .to_string()
        }
    };

    let mut witness = None;
    if let Some(d) = d_stable.counterexample() {
        let space = Space::new(&a, Some(&s))?;
        let d = sharpen(&a, &space, d, true);
        let x_star: Vec<f64> = d.iter().map(|v| 1.0 / v).collect();
        let cert = construct_rates(net, &x_star)?;
        witness = certify_witness(net, &cert.k, &x_star, &d, None, None)?;
        if witness.is_none() {
            notes.push("counterexample D yields an equilibrium with a non-hyperbolic eigenvalue only".into());
        }
    } else if d_stable.fails() {
        notes.push("criterion violated but no explicit counterexample D was found".into());
    }

    Ok(CycleNetworkResult {
        matrix: rows(&a),
        subspace_dim: s.dim(),
        d_stable,
        diag_d_stable,
        conclusion,
        diagonal_conclusion,
        witness,
        notes,
    })
}

/// Necessary condition evaluated on one cycle `C`.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct CycleCheck {
    pub index: usize,
    pub description: String,
    pub vertices: Vec<usize>,
    pub edges: Vec<usize>,
    /// `A^C = Y A^C_{k=1} Ỹᵀ`, row by row.
    pub matrix: Vec<Vec<f64>>,
    /// `dim S^C`.
    pub subspace_dim: usize,
    /// D-semistability of `A^C` on `S^C`.
    #[serde(rename = "D_semistable")]
    pub d_semistable: StabilityVerdict,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct NecessaryConditions {
    pub cycles: Vec<CycleCheck>,
    pub conclusion: String,
    /// True when every cycle verdict is certified.
    pub certified: bool,
    pub witness: Option<InstabilityWitness>,
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    pub notes: Vec<String>,
}

/// If complex-balanced equilibria are linearly stable for all rate constants,
/// then `A^C` is D-semistable on `S^C` for every cycle `C`. A certified
/// failure on `C` is turned into an unstable equilibrium: `x* = 1/d` for the
/// counterexample `d`, with rates `k^ε` concentrated on `C`, halving `ε` from 1
/// until `J^ε` has an eigenvalue on `S` with real part above `τ‖J^ε‖`.
pub fn analyze_weakly_reversible(net: &GmasNetwork, opts: &StabilityOptions) -> Result<NecessaryConditions> {
    if !weakly_reversible(net) {
        return Err(Error::Precondition("network is not weakly reversible".into()));
    }
    let cycles = enumerate_cycles(net)?;
    let checks: Vec<CycleCheck> = cycles
        .par_iter()
        .enumerate()
        .map(|(index, c)| -> Result<CycleCheck> {
            let (a, s) = cycle_limit_matrix(net, c)?;
            let verdict = is_d_semistable_with(&a, Some(&s), opts)?;
            Ok(CycleCheck {
                index,
                description: c.describe(net),
                vertices: c.vertices.clone(),
                edges: c.edges.clone(),
                matrix: rows(&a),
                subspace_dim: s.dim(),
                d_semistable: verdict,
            })
        })
        .collect::<Result<_>>()?;

    let mut notes = Vec::new();
    if checks.iter().any(|c| c.d_semistable.method == Method::CriterionDimS2) {
        notes.push("derived dim-2 semistable criterion used".to_string());
    }
    let certified = checks.iter().all(|c| c.d_semistable.certified);
    let failure = checks.iter().find(|c| c.d_semistable.fails() && c.d_semistable.certified);

    let mut witness = None;
    let conclusion = if let Some(check) = failure {
        if let Some(d) = check.d_semistable.counterexample() {
            let cycle = &cycles[check.index];
            let (a, s) = cycle_limit_matrix(net, cycle)?;
            let d = sharpen(&a, &Space::new(&a, Some(&s))?, d, false);
            witness = epsilon_witness(net, cycle, check.index, &d)?;
            if witness.is_none() {
                notes.push(format!("no unstable k^eps found after {MAX_HALVINGS} halvings of eps"));
            }
        } else {
            notes.push("cycle criterion violated but no explicit counterexample D was found".into());
        }
        format!("NOT linearly stable for all rate constants (cycle {})", check.description)
    } else if checks.iter().all(|c| c.d_semistable.holds()) {
        "necessary conditions satisfied (not sufficient)".to_string()
    } else {
        "necessary conditions not violated on sampled D (not certified; not sufficient)".to_string()
    };
    Ok(NecessaryConditions { cycles: checks, conclusion, certified, witness, notes })
}

fn epsilon_witness(net: &GmasNetwork, cycle: &Cycle, index: usize, d: &[f64]) -> Result<Option<InstabilityWitness>> {
    let x_star: Vec<f64> = d.iter().map(|v| 1.0 / v).collect();
    let mut eps = 1.0;
    for _ in 0..=MAX_HALVINGS {
        let (k, _) = epsilon_family(net, cycle, &x_star, eps)?;
        if let Some(w) = certify_witness(net, &k, &x_star, d, Some(index), Some(eps))? {
            return Ok(Some(w));
        }
        eps *= 0.5;
    }
    Ok(None)
}
