//! Searches over positive diagonal matrices: counterexamples `D` for
//! D-(semi)stability and diagonal Lyapunov certificates `P`.

use nalgebra::{Complex, DMatrix, DVector, SymmetricEigen};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;

use super::{violates, worst_eigenvalue, Space, StabilityOptions};
use crate::error::Result;
use crate::linalg::{Subspace, TAU};

const LOG_D_RANGE: (f64, f64) = (-6.907_755_278_982_137, 6.907_755_278_982_137); // ln 1e-3, ln 1e3
const CORNER_EPS: [f64; 3] = [1e-2, 1e-4, 1e-6];
const MAX_CORNER_DIM: usize = 12;
const GRID_POINTS: usize = 25;
const REFINE_STARTS: usize = 5;
const REFINE_ITERS: usize = 300;
const SWEEP_MAX_STARTS: usize = 10;

/// The `index`-th sampled `D`: entries log-uniform in `[1e-3, 1e3]`, drawn from
/// an RNG stream that depends only on `(seed, index)`.
pub(crate) fn sample_d(n: usize, seed: u64, index: u64) -> Vec<f64> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(index);
    (0..n).map(|_| rng.random_range(LOG_D_RANGE.0..LOG_D_RANGE.1).exp()).collect()
}

fn scaled(a: &DMatrix<f64>, d: &[f64]) -> DMatrix<f64> {
    let mut ad = a.clone();
    for (j, dj) in d.iter().enumerate() {
        ad.column_mut(j).scale_mut(*dj);
    }
    ad
}

/// `(max Re λ(AD|_S) / ‖AD‖, worst eigenvalue, violates)`.
fn evaluate(a: &DMatrix<f64>, space: &Space, d: &[f64], strict: bool) -> Option<(f64, Complex<f64>, bool)> {
    let ad = scaled(a, d);
    let (worst, norm) = worst_eigenvalue(&ad, space).ok()?;
    let z = worst?;
    let score = if norm > 0.0 { z.re / norm } else { 0.0 };
    Some((score, z, violates(z.re, norm, strict)))
}

/// A positive diagonal `D` (and the offending eigenvalue) for which `AD` is not
/// (semi)stable on the space, or `None` if none was found.
///
/// Tries `D = I`, corner matrices with one block of entries scaled down, a
/// logarithmic grid for `n ≤ 3`, `opts.samples` random matrices, and finally a
/// Nelder–Mead refinement of the best random candidates.
pub fn find_counterexample(
    a: &DMatrix<f64>,
    s: Option<&Subspace>,
    strict: bool,
    opts: &StabilityOptions,
) -> Result<Option<(Vec<f64>, Complex<f64>)>> {
    falsify(a, &Space::new(a, s)?, strict, opts)
}

pub(crate) fn falsify(
    a: &DMatrix<f64>,
    space: &Space,
    strict: bool,
    opts: &StabilityOptions,
) -> Result<Option<(Vec<f64>, Complex<f64>)>> {
    let space = space.clone();
    let n = a.nrows();
    if space.dim() == 0 || n == 0 {
        return Ok(None);
    }
    let check = |d: Vec<f64>| evaluate(a, &space, &d, strict).filter(|r| r.2).map(|r| (d, r.1));

    if let Some(hit) = check(vec![1.0; n]) {
        return Ok(Some(hit));
    }

    if n <= MAX_CORNER_DIM {
        let corners: Vec<(f64, usize)> =
            CORNER_EPS.iter().flat_map(|&e| (1..(1usize << n) - 1).map(move |m| (e, m))).collect();
        let hit = corners.into_par_iter().find_map_first(|(eps, mask)| {
            check((0..n).map(|i| if mask & (1 << i) != 0 { 1.0 } else { eps }).collect())
        });
        if hit.is_some() {
            return Ok(hit);
        }
    }

    if (2..=3).contains(&n) {
        let axis: Vec<f64> = (0..GRID_POINTS)
            .map(|i| (LOG_D_RANGE.0 + (LOG_D_RANGE.1 - LOG_D_RANGE.0) * i as f64 / (GRID_POINTS - 1) as f64).exp())
            .collect();
        let points: Vec<Vec<f64>> = if n == 2 {
            axis.iter().map(|&x| vec![1.0, x]).collect()
        } else {
            axis.iter().flat_map(|&x| axis.iter().map(move |&y| vec![1.0, x, y])).collect()
        };
        let hit = points.into_par_iter().find_map_first(|d| check(d));
        if hit.is_some() {
            return Ok(hit);
        }
    }

    let scores: Vec<Option<(f64, Complex<f64>, bool)>> = (0..opts.samples as u64)
        .into_par_iter()
        .map(|i| evaluate(a, &space, &sample_d(n, opts.seed, i), strict))
        .collect();
    if let Some(i) = scores.iter().position(|s| s.is_some_and(|s| s.2)) {
        let z = scores[i].expect("checked").1;
        return Ok(Some((sample_d(n, opts.seed, i as u64), z)));
    }

    let mut ranked: Vec<(usize, f64)> =
        scores.iter().enumerate().filter_map(|(i, s)| s.map(|s| (i, s.0))).collect();
    ranked.sort_by(|x, y| y.1.total_cmp(&x.1).then(x.0.cmp(&y.0)));
    let mut starts: Vec<Vec<f64>> = vec![vec![0.0; n]];
    starts.extend(ranked.iter().take(REFINE_STARTS).map(|(i, _)| {
        sample_d(n, opts.seed, *i as u64).iter().map(|v| v.ln()).collect::<Vec<_>>()
    }));
    let objective = |logd: &[f64]| -> f64 {
        let d: Vec<f64> = logd.iter().map(|v| v.clamp(-13.8, 13.8).exp()).collect();
        evaluate(a, &space, &d, strict).map_or(f64::INFINITY, |r| -r.0)
    };
    for start in starts {
        let best = nelder_mead(&objective, &start, REFINE_ITERS);
        let d: Vec<f64> = best.iter().map(|v| v.clamp(-13.8, 13.8).exp()).collect();
        if let Some(hit) = check(d) {
            return Ok(Some(hit));
        }
    }
    Ok(None)
}

/// Move a counterexample `d` towards a larger normalized spectral abscissa of
/// `AD` on the space, so that witnesses built from it are robustly unstable.
/// The result is scaled to `max dᵢ = 1`.
pub(crate) fn sharpen(a: &DMatrix<f64>, space: &Space, d: &[f64], strict: bool) -> Vec<f64> {
    let objective = |logd: &[f64]| -> f64 {
        let d: Vec<f64> = logd.iter().map(|v| v.clamp(LOG_D_RANGE.0, LOG_D_RANGE.1).exp()).collect();
        evaluate(a, space, &d, strict).map_or(f64::INFINITY, |r| -r.0)
    };
    let start: Vec<f64> = d.iter().map(|v| v.ln()).collect();
    let best = nelder_mead(&objective, &start, REFINE_ITERS);
    let chosen = if objective(&best) < objective(&start) { best } else { start };
    let clamped: Vec<f64> = chosen.iter().map(|v| v.clamp(LOG_D_RANGE.0, LOG_D_RANGE.1)).collect();
    let score = |d: &[f64]| evaluate(a, space, d, strict).map_or(f64::NEG_INFINITY, |r| r.0);
    let candidate: Vec<f64> = clamped.iter().map(|v| v.exp()).collect();
    let out = if score(&candidate) >= score(d) { candidate } else { d.to_vec() };
    let top = out.iter().copied().fold(0.0, f64::max);
    out.iter().map(|v| v / top).collect()
}

/// Minimize `f` from `x0` with the Nelder–Mead simplex method.
fn nelder_mead(f: &dyn Fn(&[f64]) -> f64, x0: &[f64], iters: usize) -> Vec<f64> {
    let n = x0.len();
    let mut simplex: Vec<Vec<f64>> = vec![x0.to_vec()];
    for i in 0..n {
        let mut x = x0.to_vec();
        x[i] += 1.0;
        simplex.push(x);
    }
    let mut values: Vec<f64> = simplex.iter().map(|x| f(x)).collect();
    for _ in 0..iters {
        let mut order: Vec<usize> = (0..=n).collect();
        order.sort_by(|&i, &j| values[i].total_cmp(&values[j]));
        simplex = order.iter().map(|&i| simplex[i].clone()).collect();
        values = order.iter().map(|&i| values[i]).collect();
        if (values[n] - values[0]).abs() < 1e-14 {
            break;
        }
        let centroid: Vec<f64> = (0..n).map(|k| simplex[..n].iter().map(|x| x[k]).sum::<f64>() / n as f64).collect();
        let along = |t: f64| -> Vec<f64> { (0..n).map(|k| centroid[k] + t * (simplex[n][k] - centroid[k])).collect() };
        let xr = along(-1.0);
        let fr = f(&xr);
        if fr < values[0] {
            let xe = along(-2.0);
            let fe = f(&xe);
            if fe < fr {
                simplex[n] = xe;
                values[n] = fe;
            } else {
                simplex[n] = xr;
                values[n] = fr;
            }
        } else if fr < values[n - 1] {
            simplex[n] = xr;
            values[n] = fr;
        } else {
            let xc = if fr < values[n] { along(-0.5) } else { along(0.5) };
            let fc = f(&xc);
            if fc < values[n].min(fr) {
                simplex[n] = xc;
                values[n] = fc;
            } else {
                let best = simplex[0].clone();
                for i in 1..=n {
                    simplex[i] = (0..n).map(|k| best[k] + 0.5 * (simplex[i][k] - best[k])).collect();
                    values[i] = f(&simplex[i]);
                }
            }
        }
    }
    let best = (0..=n).min_by(|&i, &j| values[i].total_cmp(&values[j])).unwrap_or(0);
    simplex[best].clone()
}

/// Result of a diagonal Lyapunov search.
#[derive(Clone, Debug, PartialEq)]
pub struct DiagonalSearch {
    /// A certificate, normalized to `max pᵢ = 1`.
    pub p: Option<Vec<f64>>,
    /// Smallest `λ_max(Bᵀ(PA + AᵀP)B) / ‖PA + AᵀP‖_F` reached.
    pub best_value: f64,
}

/// `(λ_max, unit eigenvector, ‖H‖_F)` of `Bᵀ(PA + AᵀP)B`.
fn lyapunov_form(a: &DMatrix<f64>, ab: &DMatrix<f64>, b: &DMatrix<f64>, p: &[f64]) -> (f64, DVector<f64>, f64) {
    let pv = DVector::from_column_slice(p);
    let mut pa = a.clone();
    for (i, pi) in p.iter().enumerate() {
        pa.row_mut(i).scale_mut(*pi);
    }
    let h = &pa + pa.transpose();
    let mut pab = ab.clone();
    for i in 0..pv.len() {
        pab.row_mut(i).scale_mut(pv[i]);
    }
    let c = b.transpose() * &pab;
    let c = &c + c.transpose();
    let eig = SymmetricEigen::new(c);
    let (k, lmax) = eig.eigenvalues.iter().enumerate().fold((0, f64::NEG_INFINITY), |acc, (i, v)| {
        if *v > acc.1 {
            (i, *v)
        } else {
            acc
        }
    });
    (lmax, eig.eigenvectors.column(k).into_owned(), h.norm())
}

fn certified(lmax: f64, norm: f64, strict: bool) -> bool {
    if strict {
        lmax < -TAU * norm
    } else {
        lmax <= TAU * norm
    }
}

/// Search for a positive diagonal `P` with `PA + AᵀP ≺ 0` (`⪯ 0` when not
/// strict) on `S`.
///
/// `λ_max(Bᵀ(PA + AᵀP)B)` is convex and positively homogeneous in `p`; the
/// search runs mirror descent on `log p` with subgradient
/// `∂/∂pᵢ = 2 wᵢ (Aw)ᵢ`, `w = Bu` for a top eigenvector `u`, from
/// `opts.diag_starts` starting points (`p = 1` first, then seeded random ones).
pub fn diagonal_lyapunov_search(
    a: &DMatrix<f64>,
    s: &Subspace,
    strict: bool,
    opts: &StabilityOptions,
) -> Result<DiagonalSearch> {
    search_with_starts(a, s, strict, opts, opts.diag_starts)
}

fn search_with_starts(
    a: &DMatrix<f64>,
    s: &Subspace,
    strict: bool,
    opts: &StabilityOptions,
    starts: usize,
) -> Result<DiagonalSearch> {
    crate::linalg::restrict(a, s)?;
    let n = a.nrows();
    let b = s.basis();
    if s.dim() == 0 {
        return Ok(DiagonalSearch { p: Some(vec![1.0; n]), best_value: f64::NEG_INFINITY });
    }
    let ab = a * b;
    let floor = 1e-8f64.ln();
    let mut best_value = f64::INFINITY;
    for start in 0..starts.max(1) {
        let mut logp: Vec<f64> = if start == 0 {
            vec![0.0; n]
        } else {
            let mut rng = ChaCha8Rng::seed_from_u64(opts.seed ^ 0xD1A6);
            rng.set_stream(start as u64);
            (0..n).map(|_| rng.random_range(LOG_D_RANGE.0..0.0)).collect()
        };
        for it in 0..opts.diag_iters.max(1) {
            let top = logp.iter().copied().fold(f64::NEG_INFINITY, f64::max);
            for v in logp.iter_mut() {
                *v = (*v - top).max(floor);
            }
            let p: Vec<f64> = logp.iter().map(|v| v.exp()).collect();
            let (lmax, u, norm) = lyapunov_form(a, &ab, b, &p);
            if norm > 0.0 {
                best_value = best_value.min(lmax / norm);
            } else {
                best_value = best_value.min(0.0);
            }
            if certified(lmax, norm, strict) {
                return Ok(DiagonalSearch { p: Some(p), best_value });
            }
            let w = b * u;
            let aw = a * &w;
            let grad: Vec<f64> = (0..n).map(|i| 2.0 * w[i] * aw[i] * p[i]).collect();
            let gmax = grad.iter().fold(0.0f64, |m, g| m.max(g.abs()));
            if gmax == 0.0 {
                break;
            }
            let step = 0.5 / ((it + 1) as f64).sqrt() / gmax;
            for (l, g) in logp.iter_mut().zip(&grad) {
                *l -= step * g;
            }
        }
    }
    Ok(DiagonalSearch { p: None, best_value })
}

/// Outcome of sweeping sampled `D` for diagonal D-stability on a subspace.
pub(crate) struct Sweep {
    pub certified_failure: Option<(Vec<f64>, String)>,
    pub certified_count: usize,
    pub total: usize,
}

/// Run the diagonal search on `AD` for `D = I` and `opts.diag_sweep_samples − 1`
/// sampled `D` (at most ten starts per `D`).
pub(crate) fn sweep_diagonal(a: &DMatrix<f64>, s: &Subspace, strict: bool, opts: &StabilityOptions) -> Result<Sweep> {
    let n = a.nrows();
    let total = opts.diag_sweep_samples.max(1);
    let space = Space::Sub(s.clone());
    let results: Vec<Result<(Vec<f64>, Option<String>, bool)>> = (0..total)
        .into_par_iter()
        .map(|i| {
            let d = if i == 0 { vec![1.0; n] } else { sample_d(n, opts.seed, i as u64) };
            let ad = scaled(a, &d);
            let (worst, norm) = worst_eigenvalue(&ad, &space)?;
            if let Some(z) = worst {
                if violates(z.re, norm, strict) {
                    let what = if strict { "stable" } else { "semistable" };
                    return Ok((d, Some(format!("AD is not {what} on the subspace (eigenvalue {z})")), false));
                }
            }
            let found = search_with_starts(&ad, s, strict, opts, opts.diag_starts.min(SWEEP_MAX_STARTS))?;
            Ok((d, None, found.p.is_some()))
        })
        .collect();
    let mut certified_count = 0;
    for r in results {
        let (d, failure, ok) = r?;
        if let Some(reason) = failure {
            return Ok(Sweep { certified_failure: Some((d, reason)), certified_count, total });
        }
        certified_count += usize::from(ok);
    }
    Ok(Sweep { certified_failure: None, certified_count, total })
}
