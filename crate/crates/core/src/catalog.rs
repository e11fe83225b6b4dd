//! Parametric example networks: irreversible three- and four-cycles, reversible
//! chains and S-systems.

use nalgebra::DMatrix;

use crate::error::{Error, Result};
use crate::network::{ComplexPair, Edge, GmasNetwork, RateAssignment, Vertex};

/// The five `(α, β, γ)` rows of the four-cycle table with their classification.
pub const FOUR_CYCLE_TABLE: [(f64, f64, f64, &str); 5] = [
    (0.0, 0.0, 0.0, "diagonally stable"),
    (5.0, 0.0, -3.0, "D-stable, but not diagonally stable"),
    (3.0, 4.0, -4.0, "stable P0+ matrix, but not D-stable"),
    (2.0, -2.0, 1.0, "stable, but not P0+ matrix"),
    (0.0, -2.0, -3.0, "unstable P0+ matrix"),
];

fn vertex(name: impl Into<String>, stoich: Vec<f64>, kinetic: Vec<f64>) -> Vertex {
    Vertex { name: name.into(), complex: ComplexPair { stoich, kinetic: Some(kinetic) } }
}

fn edge(source: usize, target: usize) -> Edge {
    Edge { source, target }
}

fn names(prefix: &str, n: usize) -> Vec<String> {
    (1..=n).map(|i| format!("{prefix}{i}")).collect()
}

/// `0(γZ) → X(X) → Y(αX + Y) → Z(βY + Z) → 0`, whose matrix `Y A_{k=1} Ỹᵀ` is
/// [`four_cycle_matrix`].
pub fn four_cycle(alpha: f64, beta: f64, gamma: f64) -> GmasNetwork {
    let species = vec!["X".to_string(), "Y".to_string(), "Z".to_string()];
    let vertices = vec![
        vertex("v1", vec![0., 0., 0.], vec![0., 0., gamma]),
        vertex("v2", vec![1., 0., 0.], vec![1., 0., 0.]),
        vertex("v3", vec![0., 1., 0.], vec![alpha, 1., 0.]),
        vertex("v4", vec![0., 0., 1.], vec![0., beta, 1.]),
    ];
    let edges = vec![edge(0, 1), edge(1, 2), edge(2, 3), edge(3, 0)];
    GmasNetwork::new(species, vertices, edges).expect("valid four-cycle")
}

/// `[[−1, 0, γ], [1−α, −1, 0], [α, 1−β, −1]]`.
pub fn four_cycle_matrix(alpha: f64, beta: f64, gamma: f64) -> DMatrix<f64> {
    DMatrix::from_row_slice(3, 3, &[-1., 0., gamma, 1. - alpha, -1., 0., alpha, 1. - beta, -1.])
}

/// Irreversible three-cycle `1 → 2 → 3 → 1` in species `X, Y`, with vertex `i`
/// carrying `aᵢX + bᵢY` and kinetic orders `αᵢX + βᵢY`.
pub fn planar_three_cycle(stoich: [[f64; 2]; 3], kinetic: [[f64; 2]; 3]) -> Result<GmasNetwork> {
    let vertices =
        (0..3).map(|i| vertex(format!("v{}", i + 1), stoich[i].to_vec(), kinetic[i].to_vec())).collect();
    GmasNetwork::new(vec!["X".into(), "Y".into()], vertices, vec![edge(0, 1), edge(1, 2), edge(2, 0)])
}

/// Default planar three-cycle `0 → X → Y → 0` with non-classical kinetic orders
/// satisfying the stability conditions.
pub fn planar_three_cycle_default() -> GmasNetwork {
    planar_three_cycle([[0., 0.], [1., 0.], [0., 1.]], [[0.5, 0.], [1., 0.5], [0., 1.]]).expect("valid")
}

/// `X → Y → Z → X` with kinetic orders `ỹ(i) = (αᵢ, βᵢ, γᵢ)`.
pub fn three_species_cycle(kinetic: [[f64; 3]; 3]) -> GmasNetwork {
    let species = vec!["X".to_string(), "Y".to_string(), "Z".to_string()];
    let vertices = (0..3)
        .map(|i| {
            let mut y = vec![0.0; 3];
            y[i] = 1.0;
            vertex(species[i].to_lowercase(), y, kinetic[i].to_vec())
        })
        .collect();
    GmasNetwork::new(species, vertices, vec![edge(0, 1), edge(1, 2), edge(2, 0)]).expect("valid three-cycle")
}

/// Default three-species cycle with `ỹ(1) = (1, 0, ½)`, `ỹ(2) = (½, 1, 0)`,
/// `ỹ(3) = (0, ½, 1)`.
pub fn three_species_cycle_default() -> GmasNetwork {
    three_species_cycle([[1., 0., 0.5], [0.5, 1., 0.], [0., 0.5, 1.]])
}

/// Reversible chain `1 ⇌ 2 ⇌ … ⇌ m` in species `X1..Xn`. Edges are ordered
/// `i → i+1, i+1 → i` for each link.
pub fn reversible_chain(stoich: &[Vec<f64>], kinetic: &[Vec<f64>]) -> Result<GmasNetwork> {
    if stoich.len() != kinetic.len() {
        return Err(Error::DimensionMismatch { expected: stoich.len(), found: kinetic.len() });
    }
    let n = stoich.first().map_or(0, Vec::len);
    let vertices =
        stoich.iter().zip(kinetic).enumerate().map(|(i, (y, k))| vertex(format!("c{}", i + 1), y.clone(), k.clone())).collect();
    let edges = (0..stoich.len().saturating_sub(1)).flat_map(|i| [edge(i, i + 1), edge(i + 1, i)]).collect();
    GmasNetwork::new(names("X", n), vertices, edges)
}

/// Four-vertex chain `0 ⇌ X1 ⇌ X1 + X2 ⇌ 2 X2` with kinetic orders `0`,
/// `κ X1`, `X1 + X2`, `½ X1 + 2 X2`. The link `0 ⇌ X1` satisfies the sign
/// condition iff `κ > 0`.
pub fn reversible_chain_default(kappa: f64) -> GmasNetwork {
    reversible_chain(
        &[vec![0., 0.], vec![1., 0.], vec![1., 1.], vec![0., 2.]],
        &[vec![0., 0.], vec![kappa, 0.], vec![1., 1.], vec![0.5, 2.]],
    )
    .expect("valid chain")
}

/// S-system `ẋᵢ = αᵢ x^{gᵢ} − βᵢ x^{hᵢ}` as the network of reversible pairs
/// `0ᵢ(gᵢ) ⇌ Xᵢ(hᵢ)`, where `gᵢ`, `hᵢ` are the rows of `G`, `H`. Edges are
/// ordered `0ᵢ → Xᵢ, Xᵢ → 0ᵢ`.
pub fn s_system(g: &DMatrix<f64>, h: &DMatrix<f64>) -> Result<GmasNetwork> {
    let n = g.nrows();
    for m in [g, h] {
        if m.nrows() != n || m.ncols() != n {
            return Err(Error::DimensionMismatch { expected: n, found: m.ncols() });
        }
    }
    let mut vertices = Vec::with_capacity(2 * n);
    let mut edges = Vec::with_capacity(2 * n);
    for i in 0..n {
        let mut e = vec![0.0; n];
        e[i] = 1.0;
        vertices.push(vertex(format!("z{}", i + 1), vec![0.0; n], g.row(i).iter().copied().collect()));
        vertices.push(vertex(format!("x{}", i + 1), e, h.row(i).iter().copied().collect()));
        edges.push(edge(2 * i, 2 * i + 1));
        edges.push(edge(2 * i + 1, 2 * i));
    }
    GmasNetwork::new(names("X", n), vertices, edges)
}

/// Rates `(αᵢ, βᵢ)` in the edge order of [`s_system`].
pub fn s_system_rates(alpha: &[f64], beta: &[f64]) -> Result<RateAssignment> {
    if alpha.len() != beta.len() {
        return Err(Error::DimensionMismatch { expected: alpha.len(), found: beta.len() });
    }
    RateAssignment::new(alpha.iter().zip(beta).flat_map(|(a, b)| [*a, *b]).collect())
}

/// Two-dimensional S-system with `G = [[g11, −½], [½, 0]]`, `H = ½ I`.
pub fn s_system_default(g11: f64) -> GmasNetwork {
    let g = DMatrix::from_row_slice(2, 2, &[g11, -0.5, 0.5, 0.]);
    let h = DMatrix::from_row_slice(2, 2, &[0.5, 0., 0., 0.5]);
    s_system(&g, &h).expect("valid S-system")
}

/// `X(X) ⇌ Y(0)`.
pub fn xy_unique() -> GmasNetwork {
    GmasNetwork::new(
        vec!["X".into(), "Y".into()],
        vec![vertex("x", vec![1., 0.], vec![1., 0.]), vertex("y", vec![0., 1.], vec![0., 0.])],
        vec![edge(0, 1), edge(1, 0)],
    )
    .expect("valid")
}

/// `X(X) ⇌ 2X(X)`: equal kinetic orders, so `S̃ = {0}` and complex-balanced
/// equilibria are not unique.
pub fn autocatalytic_pair() -> GmasNetwork {
    GmasNetwork::new(
        vec!["X".into()],
        vec![vertex("a", vec![1.], vec![1.]), vertex("b", vec![2.], vec![1.])],
        vec![edge(0, 1), edge(1, 0)],
    )
    .expect("valid")
}
