//! Exact criteria for D-stability and diagonal stability in low dimension.
//!
//! Each function returns the verdict together with the evaluated clauses.

use nalgebra::DMatrix;

use super::{one_based, Clause};
use crate::error::Result;
use crate::linalg::{signed_minors_up_to, signed_principal_minors, PrincipalMinor, MINOR_ZERO_TOL};

/// Interval arithmetic tolerance for the quadratic conditions.
const INTERVAL_TOL: f64 = 1e-12;

fn minor_clauses(minors: &[PrincipalMinor], strict_positive: bool) -> Vec<Clause> {
    minors
        .iter()
        .map(|m| {
            let ok = if strict_positive { m.is_positive() } else { !m.is_negative() };
            let rel = if strict_positive { ">" } else { ">=" };
            Clause::new(format!("signed minor {:?} {rel} 0", one_based(&m.indices)), m.value, ok)
        })
        .collect()
}

/// No minor negative, and each order `1..=max_order` has a positive one
/// (only when `need_positive`).
fn order_clauses(minors: &[PrincipalMinor], max_order: usize, need_positive: bool) -> (bool, Vec<Clause>) {
    let mut clauses = minor_clauses(minors, false);
    let mut ok = clauses.iter().all(|c| c.holds);
    if need_positive {
        for k in 1..=max_order {
            let best = minors.iter().filter(|m| m.order() == k).map(|m| m.value).fold(f64::NEG_INFINITY, f64::max);
            let has = minors.iter().any(|m| m.order() == k && m.is_positive());
            clauses.push(Clause::new(format!("some signed minor of order {k} > 0"), best, has));
            ok &= has;
        }
    }
    (ok, clauses)
}

/// 2×2: D-stable iff P₀⁺; D-semistable iff every signed principal minor is
/// non-negative (the characteristic polynomial `λ² + bλ + c` of `AD` has all
/// roots in the closed left half-plane iff `b, c ≥ 0`).
pub(crate) fn d_stability_2x2(a: &DMatrix<f64>, strict: bool) -> Result<(bool, Vec<Clause>)> {
    let minors = signed_principal_minors(a)?;
    Ok(order_clauses(&minors, 2, strict))
}

/// 3×3 D-stability: P₀⁺ and `(√(−a₁₁M₂₃) + √(−a₂₂M₁₃) + √(−a₃₃M₁₂))² ≥ −det A`,
/// where equality requires a pair `(−aᵢᵢ, Mⱼₖ)` with exactly one zero member.
pub(crate) fn d_stability_3x3(a: &DMatrix<f64>) -> Result<(bool, Vec<Clause>)> {
    let minors = signed_principal_minors(a)?;
    let (p0plus, mut clauses) = order_clauses(&minors, 3, true);
    if !p0plus {
        return Ok((false, clauses));
    }
    let find = |idx: &[usize]| minors.iter().find(|m| m.indices == idx).expect("minor present");
    // (−aᵢᵢ, M_jk) with {i, j, k} = {1, 2, 3}
    let pairs = [
        (find(&[0]), find(&[1, 2])),
        (find(&[1]), find(&[0, 2])),
        (find(&[2]), find(&[0, 1])),
    ];
    let lhs: f64 = pairs.iter().map(|(d, m)| (d.value.max(0.0) * m.value.max(0.0)).sqrt()).sum::<f64>().powi(2);
    let det = find(&[0, 1, 2]);
    let rhs = det.value;
    let scale = lhs.abs().max(rhs.abs()).max(det.scale);
    let gap = lhs - rhs;
    let equal = gap.abs() <= MINOR_ZERO_TOL * scale;
    let one_zero = pairs.iter().any(|(d, m)| d.is_zero() != m.is_zero());
    let holds = if equal { one_zero } else { gap > 0.0 };
    clauses.push(Clause::new("(sum of sqrt(-a_ii M_jk))^2 - (-det A)", gap, equal || gap > 0.0));
    if equal {
        clauses.push(Clause::new("equality: some pair has exactly one zero member", 0.0, one_zero));
    }
    Ok((holds, clauses))
}

/// `dim S = 1`: D-semistable on `S` iff `aᵢᵢ ≤ 0` for all `i`; D-stable iff in
/// addition some `aᵢᵢ < 0`.
pub(crate) fn d_stability_dim1(a: &DMatrix<f64>, strict: bool) -> (bool, Vec<Clause>) {
    let minors = signed_minors_up_to(a, 1);
    order_clauses(&minors, 1, strict)
}

/// `dim S = 2`: D-stable on `S` iff `aᵢᵢ ≤ 0` for all `i` with some `aᵢᵢ < 0`, and
/// `Mᵢⱼ ≥ 0` for all `i ≠ j` with some `Mᵢⱼ > 0`. The semistable version drops
/// both strictness requirements.
pub(crate) fn d_stability_dim2(a: &DMatrix<f64>, strict: bool) -> (bool, Vec<Clause>) {
    let minors = signed_minors_up_to(a, 2);
    order_clauses(&minors, 2, strict)
}

/// 2×2 diagonal stability iff P-matrix.
pub(crate) fn diag_stability_2x2(a: &DMatrix<f64>) -> Result<(bool, Vec<Clause>)> {
    let minors = signed_principal_minors(a)?;
    let clauses = minor_clauses(&minors, true);
    Ok((clauses.iter().all(|c| c.holds), clauses))
}

/// Explicit `P = diag(1, t)` for a 2×2 P-matrix.
pub(crate) fn diag_p_2x2(a: &DMatrix<f64>) -> Option<Vec<f64>> {
    let (a11, a12, a21, a22) = (a[(0, 0)], a[(0, 1)], a[(1, 0)], a[(1, 1)]);
    let t = if a12 * a21 < 0.0 {
        -a12 / a21
    } else if a21 == 0.0 {
        a12 * a12 / (a11 * a22) + 1.0
    } else if a12 == 0.0 {
        2.0 * a11 * a22 / (a21 * a21)
    } else {
        a12 / a21
    };
    (t.is_finite() && t > 0.0).then(|| vec![1.0, t])
}

/// 3×3 diagonal stability: P-matrix and some `y` with
/// `(a₁₃y + a₃₁)² − 4a₁₁a₃₃y < 0` and `(b₁y + b₂)² − 4M₁₂M₂₃y < 0`, where
/// `b₁ = a₁₂a₂₃ − a₂₂a₁₃` and `b₂ = a₂₁a₃₂ − a₂₂a₃₁`.
pub(crate) fn diag_stability_3x3(a: &DMatrix<f64>) -> Result<(bool, Vec<Clause>)> {
    let minors = signed_principal_minors(a)?;
    let mut clauses = minor_clauses(&minors, true);
    if !clauses.iter().all(|c| c.holds) {
        return Ok((false, clauses));
    }
    let m = |i: usize, j: usize| a[(i, i)] * a[(j, j)] - a[(i, j)] * a[(j, i)];
    let b1 = a[(0, 1)] * a[(1, 2)] - a[(1, 1)] * a[(0, 2)];
    let b2 = a[(1, 0)] * a[(2, 1)] - a[(1, 1)] * a[(2, 0)];
    let i1 = negative_interval(a[(0, 2)], a[(2, 0)], a[(0, 0)] * a[(2, 2)]);
    let i2 = negative_interval(b1, b2, m(0, 1) * m(1, 2));
    let (ok, width) = match (i1, i2) {
        (Some(x), Some(y)) => {
            let lo = x.0.max(y.0);
            let hi = x.1.min(y.1);
            let width = hi - lo;
            let mag = [1.0, lo.abs(), hi.abs()].into_iter().filter(|v| v.is_finite()).fold(0.0, f64::max);
            (width > INTERVAL_TOL * mag, width)
        }
        _ => (false, f64::NEG_INFINITY),
    };
    clauses.push(Clause::new("first quadratic negative somewhere", i1.map_or(f64::NEG_INFINITY, |i| i.1 - i.0), i1.is_some()));
    clauses.push(Clause::new("second quadratic negative somewhere", i2.map_or(f64::NEG_INFINITY, |i| i.1 - i.0), i2.is_some()));
    clauses.push(Clause::new("common y exists (interval width)", width, ok));
    Ok((ok, clauses))
}

/// Open set where `(p·y + r)² − 4·s·y < 0`, as an interval with possibly
/// infinite ends; `None` if empty.
pub(crate) fn negative_interval(p: f64, r: f64, s: f64) -> Option<(f64, f64)> {
    if p == 0.0 {
        // r² − 4sy < 0
        return if s > 0.0 {
            Some((r * r / (4.0 * s), f64::INFINITY))
        } else if s < 0.0 {
            Some((f64::NEG_INFINITY, r * r / (4.0 * s)))
        } else {
            None
        };
    }
    // p²y² + (2pr − 4s)y + r², discriminant 16 s (s − p r)
    let disc = 16.0 * s * (s - p * r);
    if disc <= 0.0 {
        return None;
    }
    let b = 2.0 * p * r - 4.0 * s;
    let sq = disc.sqrt();
    // numerically stable roots
    let q = -0.5 * (b + b.signum() * sq);
    let (r1, r2) = if q == 0.0 {
        let h = sq / (2.0 * p * p);
        (-h, h)
    } else {
        (q / (p * p), r * r / q)
    };
    Some((r1.min(r2), r1.max(r2)))
}
