//! Effective source-sink conductance via nodal analysis.
//!
//! Both bus bars are merged into super-terminals held at potentials 1 and
//! 0. The reduced graph Laplacian over the internal nodes of the
//! source-sink component is symmetric positive definite, so a
//! Jacobi-preconditioned conjugate gradient solve is enough; the terminal
//! current then equals the effective conductance.

use serde::{Deserialize, Serialize};

use super::network::PercolationNetwork;
use super::ElectromechError;

/// Relative residual target of the iterative solve. Well below the 1e-9
/// accuracy promised for lattices up to 64x64.
const CG_RELATIVE_TOLERANCE: f64 = 1e-13;

/// Result of a network solve. Disconnection is an expected outcome, not an
/// error, and carries no infinities.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub enum EffectiveConductance {
    Connected { conductance_s: f64 },
    Disconnected,
}

impl EffectiveConductance {
    pub fn is_connected(&self) -> bool {
        matches!(self, EffectiveConductance::Connected { .. })
    }

    pub fn conductance(&self) -> Option<f64> {
        match self {
            EffectiveConductance::Connected { conductance_s } => Some(*conductance_s),
            EffectiveConductance::Disconnected => None,
        }
    }
}

struct UnionFind {
    parent: Vec<usize>,
    size: Vec<usize>,
}

impl UnionFind {
    fn new(n: usize) -> Self {
        Self {
            parent: (0..n).collect(),
            size: vec![1; n],
        }
    }

    fn find(&mut self, mut x: usize) -> usize {
        while self.parent[x] != x {
            self.parent[x] = self.parent[self.parent[x]];
            x = self.parent[x];
        }
        x
    }

    fn union(&mut self, a: usize, b: usize) {
        let (mut ra, mut rb) = (self.find(a), self.find(b));
        if ra == rb {
            return;
        }
        if self.size[ra] < self.size[rb] {
            std::mem::swap(&mut ra, &mut rb);
        }
        self.parent[rb] = ra;
        self.size[ra] += self.size[rb];
    }
}

#[derive(Clone, Copy, PartialEq)]
enum NodeClass {
    Source,
    Sink,
    Internal,
}

/// Effective conductance of the network with every occupied bond intact.
pub fn solve_conductance(
    network: &PercolationNetwork,
) -> Result<EffectiveConductance, ElectromechError> {
    solve_conductance_at(network, 0.0)
}

/// Effective conductance at engineering strain `strain`: occupied bonds
/// conduct while `strain < effective_break_strain`.
pub fn solve_conductance_at(
    network: &PercolationNetwork,
    strain: f64,
) -> Result<EffectiveConductance, ElectromechError> {
    network.validate()?;
    if !strain.is_finite() || strain < 0.0 {
        return Err(ElectromechError::InvalidStrain(strain));
    }

    let n = network.node_count();
    let mut class = vec![NodeClass::Internal; n];
    for &s in &network.source_nodes {
        class[s] = NodeClass::Source;
    }
    for &t in &network.sink_nodes {
        class[t] = NodeClass::Sink;
    }

    let g = network.unit_bond_conductance;
    let conducting: Vec<(usize, usize)> = network
        .conducting_bonds(strain)
        .map(|b| (b.node_a, b.node_b))
        .collect();

    // Connectivity on the merged graph: all sources share one super-node,
    // all sinks another.
    let super_source = n;
    let super_sink = n + 1;
    let mut uf = UnionFind::new(n + 2);
    for &s in &network.source_nodes {
        uf.union(super_source, s);
    }
    for &t in &network.sink_nodes {
        uf.union(super_sink, t);
    }
    for &(a, b) in &conducting {
        uf.union(a, b);
    }
    if uf.find(super_source) != uf.find(super_sink) {
        return Ok(EffectiveConductance::Disconnected);
    }

    // Unknowns: internal nodes inside the source-sink component. Floating
    // clusters carry no current and are excluded so the reduced Laplacian
    // stays positive definite.
    let component = uf.find(super_source);
    let mut index = vec![usize::MAX; n];
    let mut unknowns = 0usize;
    for node in 0..n {
        if class[node] == NodeClass::Internal && uf.find(node) == component {
            index[node] = unknowns;
            unknowns += 1;
        }
    }

    let mut diag = vec![0.0f64; unknowns];
    let mut rhs = vec![0.0f64; unknowns];
    let mut adjacency: Vec<Vec<(usize, f64)>> = vec![Vec::new(); unknowns];
    let mut direct_conductance = 0.0f64;
    // Bonds from the source into internal nodes, needed for the terminal
    // current afterwards.
    let mut source_edges: Vec<usize> = Vec::new();

    for &(a, b) in &conducting {
        match (class[a], class[b]) {
            (NodeClass::Internal, NodeClass::Internal) => {
                let (ia, ib) = (index[a], index[b]);
                // Both ends sit in a floating cluster when either does;
                // such bonds carry no current.
                if ia == usize::MAX {
                    continue;
                }
                diag[ia] += g;
                diag[ib] += g;
                adjacency[ia].push((ib, g));
                adjacency[ib].push((ia, g));
            }
            (NodeClass::Source, NodeClass::Internal) | (NodeClass::Internal, NodeClass::Source) => {
                let i = if class[a] == NodeClass::Internal { index[a] } else { index[b] };
                diag[i] += g;
                rhs[i] += g;
                source_edges.push(i);
            }
            (NodeClass::Sink, NodeClass::Internal) | (NodeClass::Internal, NodeClass::Sink) => {
                let i = if class[a] == NodeClass::Internal { index[a] } else { index[b] };
                diag[i] += g;
            }
            (NodeClass::Source, NodeClass::Sink) | (NodeClass::Sink, NodeClass::Source) => {
                direct_conductance += g;
            }
            // Bonds within one bus bar are shorted out.
            (NodeClass::Source, NodeClass::Source) | (NodeClass::Sink, NodeClass::Sink) => {}
        }
    }

    let potentials = conjugate_gradient(&adjacency, &diag, &rhs);

    let mut current = direct_conductance;
    for &i in &source_edges {
        current += g * (1.0 - potentials[i]);
    }
    Ok(EffectiveConductance::Connected {
        conductance_s: current,
    })
}

/// Solve `(D - A) x = b` where `D` is `diag` and `A` the adjacency weights,
/// with Jacobi preconditioning. The matrix is SPD by construction (every
/// unknown connects to the Dirichlet boundary through its component).
fn conjugate_gradient(
    adjacency: &[Vec<(usize, f64)>],
    diag: &[f64],
    rhs: &[f64],
) -> Vec<f64> {
    let n = rhs.len();
    if n == 0 {
        return Vec::new();
    }

    let apply = |x: &[f64], out: &mut Vec<f64>| {
        out.clear();
        out.extend(x.iter().zip(diag).map(|(xi, di)| xi * di));
        for (i, neighbors) in adjacency.iter().enumerate() {
            let mut acc = 0.0;
            for &(j, w) in neighbors {
                acc += w * x[j];
            }
            out[i] -= acc;
        }
    };

    let mut x = vec![0.0f64; n];
    let mut r = rhs.to_vec();
    let rhs_norm = r.iter().map(|v| v * v).sum::<f64>().sqrt();
    if rhs_norm == 0.0 {
        return x;
    }
    let tolerance = CG_RELATIVE_TOLERANCE * rhs_norm;

    let mut z: Vec<f64> = r.iter().zip(diag).map(|(ri, di)| ri / di).collect();
    let mut p = z.clone();
    let mut rz: f64 = r.iter().zip(&z).map(|(a, b)| a * b).sum();
    let mut ap = Vec::with_capacity(n);

    // 4n iterations is far beyond what a 2D Laplacian of this size needs;
    // the cap only guards against stagnation from rounding.
    let max_iterations = 20 + 4 * n;
    for _ in 0..max_iterations {
        apply(&p, &mut ap);
        let pap: f64 = p.iter().zip(&ap).map(|(a, b)| a * b).sum();
        if pap <= 0.0 {
            break;
        }
        let alpha = rz / pap;
        for i in 0..n {
            x[i] += alpha * p[i];
            r[i] -= alpha * ap[i];
        }
        let r_norm = r.iter().map(|v| v * v).sum::<f64>().sqrt();
        if r_norm <= tolerance {
            break;
        }
        for i in 0..n {
            z[i] = r[i] / diag[i];
        }
        let rz_next: f64 = r.iter().zip(&z).map(|(a, b)| a * b).sum();
        let beta = rz_next / rz;
        rz = rz_next;
        for i in 0..n {
            p[i] = z[i] + beta * p[i];
        }
    }
    x
}
