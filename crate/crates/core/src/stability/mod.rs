//! Matrix stability notions, plain and restricted to a subspace.
//!
//! For `A` with `im A ⊆ S` and a positive diagonal `D`:
//!
//! | notion | condition |
//! |---|---|
//! | stable / semistable | every eigenvalue of `A|_S` has `Re < 0` / `Re ≤ 0` |
//! | D-(semi)stable | `AD` is (semi)stable on `S` for every `D` |
//! | diagonally (semi)stable | some positive diagonal `P` has `PA + AᵀP ≺ 0` (`⪯ 0`) on `S` |
//! | diagonally D-(semi)stable | for every `D` some `P` has `PAD + DAᵀP ≺ 0` (`⪯ 0`) on `S` |
//!
//! Exact criteria are used where they exist (2×2 and 3×3 matrices on the full
//! space, subspaces of dimension one or two). Everything else goes through a
//! certificate search or a sampling falsifier, and a result that only survived
//! sampling is reported as [`Status::Inconclusive`].

mod criteria;
mod lyapunov;
mod search;

use nalgebra::{Complex, DMatrix};
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::linalg::{check_square, eigenvalues, is_p0plus_to_order, restrict, signed_principal_minors, Subspace, TAU};

pub use lyapunov::lyapunov_certificate;
pub use search::{diagonal_lyapunov_search, find_counterexample, DiagonalSearch};
pub(crate) use search::sharpen;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum Notion {
    #[serde(rename = "stable")]
    Stable,
    #[serde(rename = "semistable")]
    Semistable,
    #[serde(rename = "D_stable")]
    DStable,
    #[serde(rename = "D_semistable")]
    DSemistable,
    #[serde(rename = "diag_stable")]
    DiagStable,
    #[serde(rename = "diag_semistable")]
    DiagSemistable,
    #[serde(rename = "diag_D_stable")]
    DiagDStable,
    #[serde(rename = "diag_D_semistable")]
    DiagDSemistable,
}

impl Notion {
    pub const ALL: [Notion; 8] = [
        Notion::Stable,
        Notion::Semistable,
        Notion::DStable,
        Notion::DSemistable,
        Notion::DiagStable,
        Notion::DiagSemistable,
        Notion::DiagDStable,
        Notion::DiagDSemistable,
    ];

    pub fn name(self) -> &'static str {
        match self {
            Notion::Stable => "stable",
            Notion::Semistable => "semistable",
            Notion::DStable => "D_stable",
            Notion::DSemistable => "D_semistable",
            Notion::DiagStable => "diag_stable",
            Notion::DiagSemistable => "diag_semistable",
            Notion::DiagDStable => "diag_D_stable",
            Notion::DiagDSemistable => "diag_D_semistable",
        }
    }

    pub fn is_strict(self) -> bool {
        matches!(self, Notion::Stable | Notion::DStable | Notion::DiagStable | Notion::DiagDStable)
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Status {
    Holds,
    Fails,
    Inconclusive,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Method {
    Eigenvalue,
    #[serde(rename = "criterion_2x2")]
    Criterion2x2,
    #[serde(rename = "criterion_3x3")]
    Criterion3x3,
    #[serde(rename = "criterion_dimS1")]
    CriterionDimS1,
    #[serde(rename = "criterion_dimS2")]
    CriterionDimS2,
    LyapunovSearch,
    SamplingFalsifier,
}

impl Method {
    pub fn name(self) -> &'static str {
        match self {
            Method::Eigenvalue => "eigenvalue",
            Method::Criterion2x2 => "criterion_2x2",
            Method::Criterion3x3 => "criterion_3x3",
            Method::CriterionDimS1 => "criterion_dimS1",
            Method::CriterionDimS2 => "criterion_dimS2",
            Method::LyapunovSearch => "lyapunov_search",
            Method::SamplingFalsifier => "sampling_falsifier",
        }
    }
}

/// A complex number as `re`/`im` fields.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct Eigenvalue {
    pub re: f64,
    pub im: f64,
}

impl From<Complex<f64>> for Eigenvalue {
    fn from(z: Complex<f64>) -> Self {
        Eigenvalue { re: z.re, im: z.im }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum Certificate {
    /// Positive diagonal `P` (its diagonal entries).
    DiagonalP { p: Vec<f64> },
    /// Symmetric `P`, row by row.
    SymmetricP { p: Vec<Vec<f64>> },
    /// Positive diagonal `D` for which `AD` violates the notion.
    Counterexample { d: Vec<f64>, eigenvalue: Option<Eigenvalue> },
    /// An eigenvalue of `A|_S` violating the notion.
    Eigenvalue { eigenvalue: Eigenvalue },
}

/// One evaluated condition of a criterion.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Clause {
    pub name: String,
    pub value: f64,
    pub holds: bool,
}

impl Clause {
    pub fn new(name: impl Into<String>, value: f64, holds: bool) -> Self {
        Clause { name: name.into(), value, holds }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct StabilityVerdict {
    pub status: Status,
    pub method: Method,
    /// False for conclusions that rest on sampling only.
    pub certified: bool,
    pub notion: Notion,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub on_subspace: Option<Subspace>,
    pub certificate: Option<Certificate>,
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    pub clauses: Vec<Clause>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub samples_survived: Option<usize>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub note: Option<String>,
}

impl StabilityVerdict {
    fn new(notion: Notion, space: &Space, status: Status, method: Method) -> Self {
        StabilityVerdict {
            status,
            method,
            certified: status != Status::Inconclusive,
            notion,
            on_subspace: space.proper_subspace(),
            certificate: None,
            clauses: Vec::new(),
            samples_survived: None,
            note: None,
        }
    }

    fn with_certificate(mut self, c: Option<Certificate>) -> Self {
        self.certificate = c;
        self
    }

    fn with_clauses(mut self, clauses: Vec<Clause>) -> Self {
        self.clauses = clauses;
        self
    }

    fn with_note(mut self, note: impl Into<String>) -> Self {
        self.note = Some(note.into());
        self
    }

    pub fn holds(&self) -> bool {
        self.status == Status::Holds
    }

    pub fn fails(&self) -> bool {
        self.status == Status::Fails
    }

    /// The counterexample `D`, if one is attached.
    pub fn counterexample(&self) -> Option<&[f64]> {
        match &self.certificate {
            Some(Certificate::Counterexample { d, .. }) => Some(d),
            _ => None,
        }
    }

    /// The diagonal Lyapunov certificate, if one is attached.
    pub fn diagonal_p(&self) -> Option<&[f64]> {
        match &self.certificate {
            Some(Certificate::DiagonalP { p }) => Some(p),
            _ => None,
        }
    }
}

/// Sampling and search parameters.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct StabilityOptions {
    /// Random `D` samples drawn by the falsifier.
    pub samples: usize,
    pub seed: u64,
    /// Starting points of the diagonal Lyapunov search.
    pub diag_starts: usize,
    /// Iterations per start of the diagonal Lyapunov search.
    pub diag_iters: usize,
    /// `D` samples swept when testing diagonal D-stability on a proper subspace.
    pub diag_sweep_samples: usize,
}

impl Default for StabilityOptions {
    fn default() -> Self {
        StabilityOptions { samples: 100_000, seed: 0x5EED, diag_starts: 50, diag_iters: 500, diag_sweep_samples: 100 }
    }
}

/// The space a notion is evaluated on, after normalizing `S = ℝⁿ` to the full
/// space.
#[derive(Clone, Debug)]
pub(crate) enum Space {
    Full(usize),
    Sub(Subspace),
}

impl Space {
    pub(crate) fn new(a: &DMatrix<f64>, s: Option<&Subspace>) -> Result<Space> {
        let n = a.nrows();
        match s {
            None => {
                check_square(a, n)?;
                Ok(Space::Full(n))
            }
            Some(s) => {
                restrict(a, s)?;
                if s.is_full() {
                    Ok(Space::Full(n))
                } else {
                    Ok(Space::Sub(s.clone()))
                }
            }
        }
    }

    pub(crate) fn dim(&self) -> usize {
        match self {
            Space::Full(n) => *n,
            Space::Sub(s) => s.dim(),
        }
    }

    pub(crate) fn is_full(&self) -> bool {
        matches!(self, Space::Full(_))
    }

    fn proper_subspace(&self) -> Option<Subspace> {
        match self {
            Space::Full(_) => None,
            Space::Sub(s) => Some(s.clone()),
        }
    }

    /// `BᵀMB`, or `M` on the full space.
    pub(crate) fn compress(&self, m: &DMatrix<f64>) -> DMatrix<f64> {
        match self {
            Space::Full(_) => m.clone(),
            Space::Sub(s) => crate::linalg::compress(m, s),
        }
    }

    pub(crate) fn subspace(&self) -> Subspace {
        match self {
            Space::Full(n) => Subspace::full(*n),
            Space::Sub(s) => s.clone(),
        }
    }
}

/// Eigenvalue of `M|_S` with the largest real part, and `‖M‖_F`.
pub(crate) fn worst_eigenvalue(m: &DMatrix<f64>, space: &Space) -> Result<(Option<Complex<f64>>, f64)> {
    let eig = eigenvalues(&space.compress(m))?;
    Ok((eig.last().copied(), m.norm()))
}

/// Whether an eigenvalue with real part `re` breaks (semi)stability of a
/// matrix of norm `norm`.
pub(crate) fn violates(re: f64, norm: f64, strict: bool) -> bool {
    if strict {
        re >= -TAU * norm
    } else {
        re > TAU * norm
    }
}

fn spectral_verdict(a: &DMatrix<f64>, s: Option<&Subspace>, strict: bool) -> Result<StabilityVerdict> {
    let space = Space::new(a, s)?;
    let notion = if strict { Notion::Stable } else { Notion::Semistable };
    let (worst, norm) = worst_eigenvalue(a, &space)?;
    let Some(z) = worst else {
        return Ok(StabilityVerdict::new(notion, &space, Status::Holds, Method::Eigenvalue)
            .with_note("zero-dimensional subspace"));
    };
    let bad = violates(z.re, norm, strict);
    let status = if bad { Status::Fails } else { Status::Holds };
    let clause = Clause::new("spectral abscissa", z.re, !bad);
    let cert = bad.then(|| Certificate::Eigenvalue { eigenvalue: z.into() });
    Ok(StabilityVerdict::new(notion, &space, status, Method::Eigenvalue).with_clauses(vec![clause]).with_certificate(cert))
}

/// All eigenvalues of `A|_S` have real part below `−τ‖A‖`.
pub fn is_stable(a: &DMatrix<f64>, s: Option<&Subspace>) -> Result<StabilityVerdict> {
    spectral_verdict(a, s, true)
}

/// All eigenvalues of `A|_S` have real part at most `τ‖A‖`.
pub fn is_semistable(a: &DMatrix<f64>, s: Option<&Subspace>) -> Result<StabilityVerdict> {
    spectral_verdict(a, s, false)
}

pub fn is_d_stable(a: &DMatrix<f64>, s: Option<&Subspace>) -> Result<StabilityVerdict> {
    is_d_stable_with(a, s, &StabilityOptions::default())
}

pub fn is_d_semistable(a: &DMatrix<f64>, s: Option<&Subspace>) -> Result<StabilityVerdict> {
    is_d_semistable_with(a, s, &StabilityOptions::default())
}

pub fn is_d_stable_with(a: &DMatrix<f64>, s: Option<&Subspace>, opts: &StabilityOptions) -> Result<StabilityVerdict> {
    d_verdict(a, s, true, opts)
}

pub fn is_d_semistable_with(
    a: &DMatrix<f64>,
    s: Option<&Subspace>,
    opts: &StabilityOptions,
) -> Result<StabilityVerdict> {
    d_verdict(a, s, false, opts)
}

fn d_verdict(a: &DMatrix<f64>, s: Option<&Subspace>, strict: bool, opts: &StabilityOptions) -> Result<StabilityVerdict> {
    let space = Space::new(a, s)?;
    let notion = if strict { Notion::DStable } else { Notion::DSemistable };
    let n = a.nrows();
    if space.dim() == 0 {
        return Ok(StabilityVerdict::new(notion, &space, Status::Holds, Method::Eigenvalue)
            .with_note("zero-dimensional subspace"));
    }
    let exact = match (&space, space.dim()) {
        (Space::Full(_), _) if n == 2 => Some((Method::Criterion2x2, criteria::d_stability_2x2(a, strict)?)),
        (Space::Full(_), _) if n == 3 && strict => Some((Method::Criterion3x3, criteria::d_stability_3x3(a)?)),
        (_, 1) => Some((Method::CriterionDimS1, criteria::d_stability_dim1(a, strict))),
        (_, 2) => Some((Method::CriterionDimS2, criteria::d_stability_dim2(a, strict))),
        _ => None,
    };
    if !strict && n == 3 && matches!(space, Space::Full(_)) {
        let (holds, clauses) = criteria::d_stability_3x3(a)?;
        if holds {
            return Ok(StabilityVerdict::new(notion, &space, Status::Holds, Method::Criterion3x3)
                .with_clauses(clauses)
                .with_note("implied by D-stability"));
        }
    }
    if let Some((method, (holds, clauses))) = exact {
        let mut v = StabilityVerdict::new(notion, &space, if holds { Status::Holds } else { Status::Fails }, method)
            .with_clauses(clauses);
        if method == Method::CriterionDimS2 && !strict {
            v = v.with_note("derived criterion: a_ii <= 0 and M_ij >= 0 for all i, j");
        }
        if !holds {
            match search::falsify(a, &space, strict, opts)? {
                Some((d, z)) => {
                    v.certificate =
                        Some(Certificate::Counterexample { d, eigenvalue: Some(z.into()) });
                }
                None => {
                    v.note = Some("criterion violated; no explicit counterexample D found".into());
                }
            }
        }
        return Ok(v);
    }
    general_d_verdict(a, &space, strict, opts)
}

/// Minor screen, then a diagonal Lyapunov certificate (full space only), then
/// the sampling falsifier.
fn general_d_verdict(a: &DMatrix<f64>, space: &Space, strict: bool, opts: &StabilityOptions) -> Result<StabilityVerdict> {
    let notion = if strict { Notion::DStable } else { Notion::DSemistable };
    let s = space.dim();
    let minors = signed_principal_minors(a)?;
    let screen_ok = if strict {
        is_p0plus_to_order(a, s)?
    } else {
        !minors.iter().any(|m| m.is_negative())
    };
    if !screen_ok {
        let clauses = minors
            .iter()
            .filter(|m| m.is_negative())
            .map(|m| Clause::new(format!("signed minor {:?}", one_based(&m.indices)), m.value, false))
            .collect::<Vec<_>>();
        let clauses = if clauses.is_empty() {
            vec![Clause::new("some order lacks a positive signed minor", 0.0, false)]
        } else {
            clauses
        };
        let mut v = StabilityVerdict::new(notion, space, Status::Fails, Method::SamplingFalsifier)
            .with_clauses(clauses)
            .with_note(if strict { "necessary P0+ condition fails" } else { "necessary P0 condition fails" });
        if let Some((d, z)) = search::falsify(a, space, strict, opts)? {
            v.certificate = Some(Certificate::Counterexample { d, eigenvalue: Some(z.into()) });
        }
        return Ok(v);
    }

    if space.is_full() {
        let found = diagonal_lyapunov_search(a, &space.subspace(), strict, opts)?;
        if let Some(p) = found.p {
            return Ok(StabilityVerdict::new(notion, space, Status::Holds, Method::LyapunovSearch)
                .with_certificate(Some(Certificate::DiagonalP { p }))
                .with_note("diagonal Lyapunov certificate found; diagonal stability implies D-stability"));
        }
    }

    match search::falsify(a, space, strict, opts)? {
        Some((d, z)) => Ok(StabilityVerdict::new(notion, space, Status::Fails, Method::SamplingFalsifier)
            .with_certificate(Some(Certificate::Counterexample { d, eigenvalue: Some(z.into()) }))),
        None => {
            let mut v = StabilityVerdict::new(notion, space, Status::Inconclusive, Method::SamplingFalsifier)
                .with_note("no counterexample found; sampling cannot certify");
            v.samples_survived = Some(opts.samples);
            Ok(v)
        }
    }
}

pub(crate) fn one_based(idx: &[usize]) -> Vec<usize> {
    idx.iter().map(|i| i + 1).collect()
}

pub fn is_diagonally_stable(a: &DMatrix<f64>, s: Option<&Subspace>) -> Result<StabilityVerdict> {
    is_diagonally_stable_with(a, s, &StabilityOptions::default())
}

pub fn is_diagonally_semistable(a: &DMatrix<f64>, s: Option<&Subspace>) -> Result<StabilityVerdict> {
    is_diagonally_semistable_with(a, s, &StabilityOptions::default())
}

pub fn is_diagonally_stable_with(
    a: &DMatrix<f64>,
    s: Option<&Subspace>,
    opts: &StabilityOptions,
) -> Result<StabilityVerdict> {
    diag_verdict(a, &Space::new(a, s)?, true, opts)
}

pub fn is_diagonally_semistable_with(
    a: &DMatrix<f64>,
    s: Option<&Subspace>,
    opts: &StabilityOptions,
) -> Result<StabilityVerdict> {
    diag_verdict(a, &Space::new(a, s)?, false, opts)
}

fn diag_verdict(a: &DMatrix<f64>, space: &Space, strict: bool, opts: &StabilityOptions) -> Result<StabilityVerdict> {
    let notion = if strict { Notion::DiagStable } else { Notion::DiagSemistable };
    let n = a.nrows();
    if space.dim() == 0 {
        return Ok(StabilityVerdict::new(notion, space, Status::Holds, Method::Eigenvalue)
            .with_certificate(Some(Certificate::DiagonalP { p: vec![1.0; n] }))
            .with_note("zero-dimensional subspace"));
    }
    if strict && space.is_full() && (n == 2 || n == 3) {
        let (method, (holds, clauses)) = if n == 2 {
            (Method::Criterion2x2, criteria::diag_stability_2x2(a)?)
        } else {
            (Method::Criterion3x3, criteria::diag_stability_3x3(a)?)
        };
        let status = if holds { Status::Holds } else { Status::Fails };
        let mut v = StabilityVerdict::new(notion, space, status, method).with_clauses(clauses);
        if holds {
            let p = if n == 2 {
                criteria::diag_p_2x2(a)
            } else {
                diagonal_lyapunov_search(a, &space.subspace(), true, opts)?.p
            };
            match p {
                Some(p) => v.certificate = Some(Certificate::DiagonalP { p }),
                None => v.note = Some("criterion satisfied; no explicit P found by search".into()),
            }
        }
        return Ok(v);
    }
    search_diag_verdict(a, space, strict, opts, notion)
}

fn search_diag_verdict(
    a: &DMatrix<f64>,
    space: &Space,
    strict: bool,
    opts: &StabilityOptions,
    notion: Notion,
) -> Result<StabilityVerdict> {
    // Necessary conditions: (semi)stability on S, and on the full space the P (P0) property.
    let (worst, norm) = worst_eigenvalue(a, space)?;
    if let Some(z) = worst {
        if violates(z.re, norm, strict) {
            return Ok(StabilityVerdict::new(notion, space, Status::Fails, Method::Eigenvalue)
                .with_clauses(vec![Clause::new("spectral abscissa", z.re, false)])
                .with_certificate(Some(Certificate::Eigenvalue { eigenvalue: z.into() }))
                .with_note(if strict { "not stable on the subspace" } else { "not semistable on the subspace" }));
        }
    }
    if space.is_full() {
        let minors = signed_principal_minors(a)?;
        let bad: Vec<Clause> = minors
            .iter()
            .filter(|m| if strict { !m.is_positive() } else { m.is_negative() })
            .map(|m| Clause::new(format!("signed minor {:?}", one_based(&m.indices)), m.value, false))
            .collect();
        if !bad.is_empty() {
            return Ok(StabilityVerdict::new(notion, space, Status::Fails, Method::LyapunovSearch)
                .with_clauses(bad)
                .with_note(if strict { "necessary P-matrix condition fails" } else { "necessary P0 condition fails" }));
        }
    }
    let found = diagonal_lyapunov_search(a, &space.subspace(), strict, opts)?;
    match found.p {
        Some(p) => Ok(StabilityVerdict::new(notion, space, Status::Holds, Method::LyapunovSearch)
            .with_certificate(Some(Certificate::DiagonalP { p }))),
        None => Ok(StabilityVerdict::new(notion, space, Status::Inconclusive, Method::LyapunovSearch)
            .with_clauses(vec![Clause::new("best max eigenvalue (normalized)", found.best_value, false)])
            .with_note("no diagonal certificate found")),
    }
}

pub fn is_diagonally_d_stable_on(a: &DMatrix<f64>, s: &Subspace, semi: bool) -> Result<StabilityVerdict> {
    is_diagonally_d_stable_on_with(a, s, semi, &StabilityOptions::default())
}

/// Diagonal D-(semi)stability on `S`.
///
/// On the full space this coincides with diagonal (semi)stability: for a
/// certificate `Q` of `A`, `P = DQ` gives `P(AD) + (AD)ᵀP = D(QA + AᵀQ)D`.
/// On a proper subspace a sweep over sampled `D` is run and survival is
/// reported as inconclusive.
pub fn is_diagonally_d_stable_on_with(
    a: &DMatrix<f64>,
    s: &Subspace,
    semi: bool,
    opts: &StabilityOptions,
) -> Result<StabilityVerdict> {
    let strict = !semi;
    let space = Space::new(a, Some(s))?;
    let notion = if strict { Notion::DiagDStable } else { Notion::DiagDSemistable };
    if space.is_full() || space.dim() == 0 {
        let mut v = diag_verdict(a, &space, strict, opts)?;
        v.notion = notion;
        return Ok(v);
    }
    let d = d_verdict(a, Some(s), strict, opts)?;
    if d.status == Status::Fails {
        let mut v = StabilityVerdict::new(notion, &space, Status::Fails, d.method)
            .with_clauses(d.clauses)
            .with_certificate(d.certificate)
            .with_note("not D-(semi)stable on the subspace, so not diagonally D-(semi)stable");
        v.certified = d.certified;
        return Ok(v);
    }
    let sweep = search::sweep_diagonal(a, s, strict, opts)?;
    if let Some((dvec, reason)) = sweep.certified_failure {
        return Ok(StabilityVerdict::new(notion, &space, Status::Fails, Method::LyapunovSearch)
            .with_certificate(Some(Certificate::Counterexample { d: dvec, eigenvalue: None }))
            .with_note(reason));
    }
    let mut v = StabilityVerdict::new(notion, &space, Status::Inconclusive, Method::LyapunovSearch);
    v.samples_survived = Some(sweep.certified_count);
    v.note = Some(if sweep.certified_count == sweep.total {
        format!("diagonal certificate found for all {} sampled D; sampling cannot certify", sweep.total)
    } else {
        format!("diagonal certificate found for {} of {} sampled D", sweep.certified_count, sweep.total)
    });
    Ok(v)
}

/// All eight notions, checked against the implication lattice.
pub fn notion_lattice_check(a: &DMatrix<f64>, s: Option<&Subspace>) -> Result<Vec<StabilityVerdict>> {
    notion_lattice_check_with(a, s, &StabilityOptions::default())
}

pub fn notion_lattice_check_with(
    a: &DMatrix<f64>,
    s: Option<&Subspace>,
    opts: &StabilityOptions,
) -> Result<Vec<StabilityVerdict>> {
    let space = Space::new(a, s)?;
    let sub = space.subspace();
    let verdicts = vec![
        is_stable(a, s)?,
        is_semistable(a, s)?,
        is_d_stable_with(a, s, opts)?,
        is_d_semistable_with(a, s, opts)?,
        is_diagonally_stable_with(a, s, opts)?,
        is_diagonally_semistable_with(a, s, opts)?,
        is_diagonally_d_stable_on_with(a, &sub, false, opts)?,
        is_diagonally_d_stable_on_with(a, &sub, true, opts)?,
    ];
    check_lattice(&verdicts, space.is_full())?;
    Ok(verdicts)
}

/// Implications `(stronger, weaker)` between notions on a subspace.
const IMPLICATIONS: [(Notion, Notion); 12] = [
    (Notion::Stable, Notion::Semistable),
    (Notion::DStable, Notion::DSemistable),
    (Notion::DStable, Notion::Stable),
    (Notion::DSemistable, Notion::Semistable),
    (Notion::DiagStable, Notion::DiagSemistable),
    (Notion::DiagStable, Notion::Stable),
    (Notion::DiagSemistable, Notion::Semistable),
    (Notion::DiagDStable, Notion::DStable),
    (Notion::DiagDSemistable, Notion::DSemistable),
    (Notion::DiagDStable, Notion::DiagStable),
    (Notion::DiagDSemistable, Notion::DiagSemistable),
    (Notion::DiagDStable, Notion::DiagDSemistable),
];

/// Additional implications that hold on the full space only.
const FULL_SPACE_IMPLICATIONS: [(Notion, Notion); 2] =
    [(Notion::DiagStable, Notion::DStable), (Notion::DiagSemistable, Notion::DSemistable)];

fn check_lattice(verdicts: &[StabilityVerdict], full: bool) -> Result<()> {
    let find = |n: Notion| verdicts.iter().find(|v| v.notion == n);
    let extra: &[(Notion, Notion)] = if full { &FULL_SPACE_IMPLICATIONS } else { &[] };
    for (strong, weak) in IMPLICATIONS.iter().chain(extra) {
        if let (Some(s), Some(w)) = (find(*strong), find(*weak)) {
            if s.holds() && s.certified && w.fails() && w.certified {
                return Err(Error::Internal(format!(
                    "{} holds but {} fails",
                    strong.name(),
                    weak.name()
                )));
            }
        }
    }
    Ok(())
}
