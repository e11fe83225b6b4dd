//! The combined per-network report and its text rendering.

use std::fmt::Write as _;

use serde::{Deserialize, Serialize};

use super::{
    analyze_cycle_network, analyze_weakly_reversible, classical_certificate, classify, random_pairs, traits,
    uniqueness_check, CycleNetworkResult, NecessaryConditions, NetworkClass, Traits, UniquenessResult,
};
use crate::error::{Error, Result};
use crate::network::{stoichiometric_subspace, GmasNetwork};
use crate::stability::{StabilityOptions, StabilityVerdict, Status};

/// Random `(x*, D)` pairs checked in addition to `x* = 1, D = I`.
const CLASSICAL_SAMPLES: usize = 4;

/// A failed report section.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct SectionError {
    pub section: String,
    pub message: String,
}

/// One checked pair of the classical certificate family.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ClassicalSample {
    pub x_star: Vec<f64>,
    pub d: Vec<f64>,
    /// Largest eigenvalue of `H` on `S` divided by `‖H‖_F`.
    pub normalized_max_eigenvalue: f64,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ClassicalSummary {
    pub conclusion: String,
    pub samples: Vec<ClassicalSample>,
}

/// Everything known about a network. Field names are part of the JSON format.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct AnalysisReport {
    pub network_class: NetworkClass,
    pub traits: Traits,
    pub species: Vec<String>,
    /// `dim S`.
    pub subspace_dim: usize,
    pub uniqueness: Option<UniquenessResult>,
    /// Per-cycle necessary conditions (weakly reversible networks).
    pub cycles: Option<NecessaryConditions>,
    /// Exact characterization (single-cycle networks).
    pub global: Option<CycleNetworkResult>,
    pub classical: Option<ClassicalSummary>,
    /// Main conclusions, strongest first.
    pub summary: Vec<String>,
    pub notes: Vec<String>,
    pub errors: Vec<SectionError>,
}

fn section<T>(errors: &mut Vec<SectionError>, name: &str, r: Result<T>) -> Result<Option<T>> {
    match r {
        Ok(v) => Ok(Some(v)),
        Err(Error::Internal(msg)) => Err(Error::Internal(format!("{name}: {msg}"))),
        Err(e) => {
            errors.push(SectionError { section: name.into(), message: e.to_string() });
            Ok(None)
        }
    }
}

/// Run every analysis that applies to the network's class. Failures of
/// individual sections are recorded in `errors`; internal inconsistencies are
/// returned as errors.
pub fn full_report(net: &GmasNetwork, opts: &StabilityOptions) -> Result<AnalysisReport> {
    let class = classify(net);
    let tr = traits(net);
    let mut errors = Vec::new();
    let mut notes = Vec::new();
    let mut summary = Vec::new();

    let (uniqueness, cycles) = if tr.weakly_reversible {
        (
            section(&mut errors, "uniqueness", uniqueness_check(net))?,
            section(&mut errors, "cycles", analyze_weakly_reversible(net, opts))?,
        )
    } else {
        notes.push("network is not weakly reversible: no complex-balanced equilibria, cycle analysis skipped".into());
        (None, None)
    };
    let global = if tr.single_cycle {
        section(&mut errors, "global", analyze_cycle_network(net, opts))?
    } else {
        None
    };
    let classical = if class == NetworkClass::Classical {
        section(&mut errors, "classical", classical_summary(net, opts.seed))?
    } else {
        None
    };

    if let Some(c) = &classical {
        summary.push(c.conclusion.clone());
    }
    if let Some(g) = &global {
        summary.push(format!("{} [{}]", g.conclusion, provenance(&g.d_stable)));
        summary.push(format!("{} [{}]", g.diagonal_conclusion, provenance(&g.diag_d_stable)));
        notes.extend(g.notes.iter().cloned());
    }
    if let Some(c) = &cycles {
        summary.push(format!("cycle conditions: {} [{}]", c.conclusion, if c.certified { "certified" } else { "sampled" }));
        notes.extend(c.notes.iter().cloned());
    }
    if let Some(u) = &uniqueness {
        summary.push(if u.unique {
            "at most one complex-balanced equilibrium per stoichiometric class, for all rate constants".into()
        } else {
            "complex-balanced equilibria are not unique for some rate constants".into()
        });
    }
    for v in global.iter().flat_map(|g| [&g.d_stable, &g.diag_d_stable]) {
        if let Some(n) = &v.note {
            if n.starts_with("derived") && !notes.contains(n) {
                notes.push(n.clone());
            }
        }
    }

    if let (Some(g), Some(u)) = (&global, &uniqueness) {
        if g.d_stable.holds() && g.d_stable.certified && !u.unique {
            return Err(Error::Internal("linear stability for all rate constants certified, but equilibria are not unique".into()));
        }
    }

    Ok(AnalysisReport {
        network_class: class,
        traits: tr,
        species: net.species().to_vec(),
        subspace_dim: stoichiometric_subspace(net).dim(),
        uniqueness,
        cycles,
        global,
        classical,
        summary,
        notes,
        errors,
    })
}

fn provenance(v: &StabilityVerdict) -> String {
    format!("{}, {}", v.method.name(), if v.certified { "certified" } else { "sampled" })
}

fn classical_summary(net: &GmasNetwork, seed: u64) -> Result<ClassicalSummary> {
    let n = net.n_species();
    let mut pairs = vec![(vec![1.0; n], vec![1.0; n])];
    pairs.extend(random_pairs(n, CLASSICAL_SAMPLES, seed));
    let samples = pairs
        .into_iter()
        .map(|(x_star, d)| {
            let c = classical_certificate(net, &x_star, &d)?;
            let normalized_max_eigenvalue = if c.h_norm > 0.0 { c.max_eigenvalue / c.h_norm } else { c.max_eigenvalue };
            Ok(ClassicalSample { x_star, d, normalized_max_eigenvalue })
        })
        .collect::<Result<Vec<_>>>()?;
    Ok(ClassicalSummary {
        conclusion: "diagonally D-stable: P = diag(1/x*) D certifies every complex-balanced equilibrium for all rate constants"
            .into(),
        samples,
    })
}

fn status_word(s: Status) -> &'static str {
    match s {
        Status::Holds => "holds",
        Status::Fails => "fails",
        Status::Inconclusive => "inconclusive",
    }
}

fn fmt_vec(v: &[f64]) -> String {
    let parts: Vec<String> = v.iter().map(|x| format!("{x:.6}")).collect();
    format!("({})", parts.join(", "))
}

fn verdict_line(label: &str, v: &StabilityVerdict) -> String {
    let mut line = format!("  {label}: {} [{}]", status_word(v.status), provenance(v));
    if let Some(d) = v.counterexample() {
        let _ = write!(line, " counterexample D = {}", fmt_vec(d));
    }
    if let Some(p) = v.diagonal_p() {
        let _ = write!(line, " P = {}", fmt_vec(p));
    }
    if let Some(n) = v.samples_survived {
        let _ = write!(line, " ({n} samples survived)");
    }
    line
}

/// Human-readable report. Certified conclusions are marked `[... certified]`,
/// sampling-based ones `[... sampled]`.
pub fn render_text(r: &AnalysisReport) -> String {
    let mut out = String::new();
    let _ = writeln!(out, "network class: {}", r.network_class.name());
    let _ = writeln!(out, "species: {} (dim S = {})", r.species.join(" "), r.subspace_dim);
    if !r.summary.is_empty() {
        let _ = writeln!(out, "summary:");
        for s in &r.summary {
            let _ = writeln!(out, "  - {s}");
        }
    }
    if let Some(u) = &r.uniqueness {
        let _ = writeln!(out, "uniqueness: {}", if u.unique { "unique" } else { "not unique" });
        if let Some(w) = &u.witness {
            let _ = writeln!(out, "  sign vector {} shared by S~perp and S", w.sign);
            let _ = writeln!(out, "  x* = {}, |Jv| = {:.3e}", fmt_vec(&w.x_star), w.jv_norm);
        }
    }
    if let Some(g) = &r.global {
        let _ = writeln!(out, "single cycle (A = Y A_(k=1) Y~^T on S, dim {}):", g.subspace_dim);
        let _ = writeln!(out, "{}", verdict_line("D-stable", &g.d_stable));
        let _ = writeln!(out, "{}", verdict_line("diagonally D-stable", &g.diag_d_stable));
        if let Some(w) = &g.witness {
            let _ = writeln!(
                out,
                "  unstable equilibrium: x* = {}, eigenvalue {:.6} {:+.6}i",
                fmt_vec(&w.x_star),
                w.eigenvalue.re,
                w.eigenvalue.im
            );
        }
    }
    if let Some(c) = &r.cycles {
        let _ = writeln!(out, "cycles ({}):", c.cycles.len());
        for check in &c.cycles {
            let _ = writeln!(out, "{}", verdict_line(&format!("{} D-semistable on S^C", check.description), &check.d_semistable));
        }
        let _ = writeln!(out, "  => {}", c.conclusion);
        if let Some(w) = &c.witness {
            let _ = writeln!(
                out,
                "  unstable equilibrium: x* = {}, eps = {}, eigenvalue {:.6} {:+.6}i",
                fmt_vec(&w.x_star),
                w.epsilon.unwrap_or(0.0),
                w.eigenvalue.re,
                w.eigenvalue.im
            );
        }
    }
    if let Some(c) = &r.classical {
        let worst = c.samples.iter().map(|s| s.normalized_max_eigenvalue).fold(f64::NEG_INFINITY, f64::max);
        let _ = writeln!(out, "classical certificate: {} samples, worst normalized eigenvalue {worst:.3e}", c.samples.len());
    }
    for n in &r.notes {
        let _ = writeln!(out, "note: {n}");
    }
    for e in &r.errors {
        let _ = writeln!(out, "error in {}: {}", e.section, e.message);
    }
    out
}
