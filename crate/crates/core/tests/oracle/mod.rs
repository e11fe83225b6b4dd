//! Reference computations written directly from the definitions, sharing no
//! code with the library beyond the network accessors.

#![allow(dead_code)]

use gmas_core::network::{ComplexPair, Edge, GmasNetwork, Vertex};
use nalgebra::{DMatrix, DVector, SymmetricEigen};
use rand::seq::SliceRandom;
use rand::Rng;
use rand_chacha::ChaCha8Rng;

pub fn kinetic(net: &GmasNetwork, v: usize) -> Vec<f64> {
    net.vertices()[v].complex.kinetic.clone().expect("source vertex has a kinetic complex")
}

pub fn stoich(net: &GmasNetwork, v: usize) -> &[f64] {
    &net.vertices()[v].complex.stoich
}

pub fn monomial(orders: &[f64], x: &[f64]) -> f64 {
    orders.iter().zip(x).map(|(a, xi)| xi.powf(*a)).product()
}

/// Rate of every edge at `x`.
pub fn edge_rates(net: &GmasNetwork, k: &[f64], x: &[f64]) -> Vec<f64> {
    net.edges().iter().zip(k).map(|(e, ke)| ke * monomial(&kinetic(net, e.source), x)).collect()
}

/// `dx/dt` as a sum over edges of rate times reaction vector.
pub fn rhs(net: &GmasNetwork, k: &[f64], x: &[f64]) -> Vec<f64> {
    let mut f = vec![0.0; x.len()];
    for (e, r) in net.edges().iter().zip(edge_rates(net, k, x)) {
        let (ys, yt) = (stoich(net, e.source), stoich(net, e.target));
        for i in 0..x.len() {
            f[i] += r * (yt[i] - ys[i]);
        }
    }
    f
}

/// `Σ_e rate_e (y_t − y_s) (ỹ_s / x)ᵀ`.
pub fn jacobian(net: &GmasNetwork, k: &[f64], x: &[f64]) -> DMatrix<f64> {
    let n = x.len();
    let mut j = DMatrix::zeros(n, n);
    for (e, r) in net.edges().iter().zip(edge_rates(net, k, x)) {
        let (ys, yt, ks) = (stoich(net, e.source), stoich(net, e.target), kinetic(net, e.source));
        for a in 0..n {
            for b in 0..n {
                j[(a, b)] += r * (yt[a] - ys[a]) * ks[b] / x[b];
            }
        }
    }
    j
}

/// Central differences with step `1e-5 · x_j`.
pub fn jacobian_fd(net: &GmasNetwork, k: &[f64], x: &[f64]) -> DMatrix<f64> {
    let n = x.len();
    let mut j = DMatrix::zeros(n, n);
    for c in 0..n {
        let h = 1e-5 * x[c];
        let mut xp = x.to_vec();
        let mut xm = x.to_vec();
        xp[c] += h;
        xm[c] -= h;
        let (fp, fm) = (rhs(net, k, &xp), rhs(net, k, &xm));
        for r in 0..n {
            j[(r, c)] = (fp[r] - fm[r]) / (2.0 * h);
        }
    }
    j
}

/// Largest inflow-minus-outflow imbalance over vertices, and the largest rate.
pub fn balance_residual(net: &GmasNetwork, k: &[f64], x: &[f64]) -> (f64, f64) {
    let mut net_flow = vec![0.0; net.n_vertices()];
    let rates = edge_rates(net, k, x);
    for (e, r) in net.edges().iter().zip(&rates) {
        net_flow[e.target] += r;
        net_flow[e.source] -= r;
    }
    let res = net_flow.iter().fold(0.0f64, |m, v| m.max(v.abs()));
    (res, rates.iter().fold(0.0f64, |m, v| m.max(*v)))
}

/// Orthonormal basis of the null space from the eigendecomposition of `MᵀM`.
pub fn null_basis(m: &DMatrix<f64>) -> DMatrix<f64> {
    let g = m.transpose() * m;
    let eig = SymmetricEigen::new(g);
    let top = eig.eigenvalues.iter().fold(0.0f64, |a, v| a.max(v.abs()));
    let cols: Vec<DVector<f64>> = (0..m.ncols())
        .filter(|&i| eig.eigenvalues[i].abs() <= 1e-14 * top)
        .map(|i| eig.eigenvectors.column(i).into_owned())
        .collect();
    if cols.is_empty() {
        DMatrix::zeros(m.ncols(), 0)
    } else {
        DMatrix::from_columns(&cols)
    }
}

/// Orthonormal basis of the column span, by Gram–Schmidt with re-orthogonalization.
pub fn span_basis(vectors: &[DVector<f64>]) -> DMatrix<f64> {
    let n = vectors.first().map_or(0, |v| v.len());
    let scale = vectors.iter().fold(0.0f64, |m, v| m.max(v.norm()));
    let mut q: Vec<DVector<f64>> = Vec::new();
    for v in vectors {
        let mut w = v.clone();
        for _ in 0..2 {
            for b in &q {
                let c = b.dot(&w);
                w -= b * c;
            }
        }
        if w.norm() > 1e-9 * scale.max(1.0) {
            q.push(w.normalize());
        }
    }
    if q.is_empty() {
        DMatrix::zeros(n, 0)
    } else {
        DMatrix::from_columns(&q)
    }
}

/// Orthonormal basis of `S = span{y_t − y_s}`.
pub fn stoichiometric_basis(net: &GmasNetwork) -> DMatrix<f64> {
    let v: Vec<DVector<f64>> = net
        .edges()
        .iter()
        .map(|e| DVector::from_fn(net.n_species(), |i, _| stoich(net, e.target)[i] - stoich(net, e.source)[i]))
        .collect();
    span_basis(&v)
}

/// Vertex-by-edge incidence matrix, column `e` = `e_target − e_source`.
pub fn incidence(net: &GmasNetwork) -> DMatrix<f64> {
    let mut m = DMatrix::zeros(net.n_vertices(), net.n_edges());
    for (j, e) in net.edges().iter().enumerate() {
        m[(e.target, j)] += 1.0;
        m[(e.source, j)] -= 1.0;
    }
    m
}

/// Laplacian `A_k`: column `s` holds the outflow of vertex `s`.
pub fn laplacian(net: &GmasNetwork, k: &[f64]) -> DMatrix<f64> {
    let m = net.n_vertices();
    let mut a = DMatrix::zeros(m, m);
    for (e, ke) in net.edges().iter().zip(k) {
        a[(e.target, e.source)] += ke;
        a[(e.source, e.source)] -= ke;
    }
    a
}

/// Number of weakly connected components of the reaction digraph.
pub fn components(net: &GmasNetwork) -> usize {
    let m = net.n_vertices();
    let mut parent: Vec<usize> = (0..m).collect();
    fn find(p: &mut [usize], i: usize) -> usize {
        let mut r = i;
        while p[r] != r {
            r = p[r];
        }
        p[i] = r;
        r
    }
    for e in net.edges() {
        let (a, b) = (find(&mut parent, e.source), find(&mut parent, e.target));
        parent[a] = b;
    }
    (0..m).filter(|&i| find(&mut parent, i) == i).count()
}

/// `sin` of the largest principal angle between two subspaces of equal dimension.
pub fn subspace_gap(a: &DMatrix<f64>, b: &DMatrix<f64>) -> f64 {
    if a.ncols() != b.ncols() {
        return f64::INFINITY;
    }
    if a.ncols() == 0 {
        return 0.0;
    }
    let r = b - a * (a.transpose() * b);
    r.singular_values().iter().fold(0.0f64, |m, v| m.max(*v))
}

/// Largest eigenvalue of `Qᵀ H Q` for symmetric `H`.
pub fn restricted_max_eigenvalue(h: &DMatrix<f64>, q: &DMatrix<f64>) -> f64 {
    let r = q.transpose() * h * q;
    let r = (&r + r.transpose()) * 0.5;
    SymmetricEigen::new(r).eigenvalues.iter().fold(f64::NEG_INFINITY, |m, v| m.max(*v))
}

fn det(m: &DMatrix<f64>) -> f64 {
    match m.nrows() {
        0 => 1.0,
        1 => m[(0, 0)],
        2 => m[(0, 0)] * m[(1, 1)] - m[(0, 1)] * m[(1, 0)],
        3 => {
            m[(0, 0)] * (m[(1, 1)] * m[(2, 2)] - m[(1, 2)] * m[(2, 1)])
                - m[(0, 1)] * (m[(1, 0)] * m[(2, 2)] - m[(1, 2)] * m[(2, 0)])
                + m[(0, 2)] * (m[(1, 0)] * m[(2, 1)] - m[(1, 1)] * m[(2, 0)])
        }
        _ => panic!("oracle determinant supports n <= 3"),
    }
}

/// Characteristic polynomial `λⁿ + c₁λⁿ⁻¹ + … + cₙ` for n = 2, 3.
fn char_poly(a: &DMatrix<f64>) -> Vec<f64> {
    let tr = a.trace();
    match a.nrows() {
        2 => vec![-tr, det(a)],
        3 => {
            let m2 = (0..3)
                .flat_map(|i| ((i + 1)..3).map(move |j| (i, j)))
                .map(|(i, j)| a[(i, i)] * a[(j, j)] - a[(i, j)] * a[(j, i)])
                .sum();
            vec![-tr, m2, -det(a)]
        }
        _ => panic!("oracle Routh–Hurwitz supports n = 2, 3"),
    }
}

/// Routh–Hurwitz conditions with margins scaled by `‖A‖_F`; positive means
/// strictly satisfied.
pub fn hurwitz_margin(a: &DMatrix<f64>) -> f64 {
    let s = a.norm().max(f64::MIN_POSITIVE);
    let c = char_poly(a);
    match a.nrows() {
        2 => (c[0] / s).min(c[1] / (s * s)),
        3 => (c[0] / s).min(c[2] / s.powi(3)).min((c[0] * c[1] - c[2]) / s.powi(3)),
        _ => unreachable!(),
    }
}

/// Sylvester's test on `−M`, margins scaled by `‖M‖_F`.
pub fn negative_definite_margin(m: &DMatrix<f64>) -> f64 {
    let s = m.norm().max(f64::MIN_POSITIVE);
    let neg = -m;
    (1..=m.nrows()).map(|k| det(&neg.view((0, 0), (k, k)).into_owned()) / s.powi(k as i32)).fold(f64::INFINITY, f64::min)
}

pub fn log_uniform(rng: &mut ChaCha8Rng, lo: f64, hi: f64) -> f64 {
    (rng.random_range(lo.ln()..hi.ln())).exp()
}

/// Random network with `n` species and `min(m, 3ⁿ)` vertices carrying distinct
/// stoichiometric complexes in `{0, 1, 2}ⁿ`. Weakly reversible networks are unions of random
/// cycles on a random vertex partition plus extra edges inside each part;
/// classical networks use `ỹ = y`.
pub fn random_network(rng: &mut ChaCha8Rng, n: usize, m: usize, weakly_reversible: bool, classical: bool) -> GmasNetwork {
    let m = m.min(3usize.pow(n as u32));
    let mut complexes: Vec<Vec<f64>> = Vec::new();
    while complexes.len() < m {
        let c: Vec<f64> = (0..n).map(|_| rng.random_range(0..=2) as f64).collect();
        if !complexes.contains(&c) {
            complexes.push(c);
        }
    }
    let vertices: Vec<Vertex> = complexes
        .into_iter()
        .enumerate()
        .map(|(i, c)| {
            let kin = if classical { c.clone() } else { (0..n).map(|_| rng.random_range(-1.0..2.0)).collect() };
            Vertex { name: format!("v{i}"), complex: ComplexPair { stoich: c, kinetic: Some(kin) } }
        })
        .collect();
    let mut edges: Vec<Edge> = Vec::new();
    let add = |edges: &mut Vec<Edge>, s: usize, t: usize| {
        let e = Edge { source: s, target: t };
        if s != t && !edges.contains(&e) {
            edges.push(e);
        }
    };
    if weakly_reversible {
        let mut order: Vec<usize> = (0..m).collect();
        order.shuffle(rng);
        let parts = rng.random_range(1..=(m / 2).max(1));
        let mut groups: Vec<Vec<usize>> = vec![Vec::new(); parts];
        for (i, v) in order.into_iter().enumerate() {
            groups[if i < 2 * parts { i / 2 } else { rng.random_range(0..parts) }].push(v);
        }
        for g in &groups {
            for i in 0..g.len() {
                add(&mut edges, g[i], g[(i + 1) % g.len()]);
            }
            for &a in g {
                for &b in g {
                    if rng.random_bool(0.25) {
                        add(&mut edges, a, b);
                    }
                }
            }
        }
    } else {
        let count = rng.random_range(1..=(m * (m - 1)).min(8));
        while edges.len() < count {
            let (s, t) = (rng.random_range(0..m), rng.random_range(0..m));
            add(&mut edges, s, t);
        }
    }
    let species = (1..=n).map(|i| format!("X{i}")).collect();
    GmasNetwork::new(species, vertices, edges).expect("generated network is valid")
}
