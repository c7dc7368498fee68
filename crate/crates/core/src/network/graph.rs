use nalgebra::{DMatrix, SymmetricEigen};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::error::{Error, Result};

/// Undirected weighted edge between buses `from` and `to` (zero-based).
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Edge {
    pub from: usize,
    pub to: usize,
    pub weight: f64,
}

/// Symmetric weighted-graph Laplacian coupling the generators.
#[derive(Debug, Clone, PartialEq)]
pub struct NetworkSpec {
    laplacian: DMatrix<f64>,
    /// Raw line data carried along for provenance; never used to build `L`.
    pub metadata: Option<String>,
}

impl NetworkSpec {
    pub fn from_laplacian(laplacian: DMatrix<f64>) -> Result<Self> {
        let n = laplacian.nrows();
        if laplacian.ncols() != n {
            return Err(Error::InvalidArgument("Laplacian must be square".into()));
        }
        let scale = laplacian.amax().max(1.0);
        for i in 0..n {
            let row_sum: f64 = laplacian.row(i).sum();
            if row_sum.abs() > 1e-10 * scale {
                return Err(Error::InvalidArgument(format!(
                    "Laplacian row {i} sums to {row_sum:e}, expected 0"
                )));
            }
            for j in 0..n {
                if (laplacian[(i, j)] - laplacian[(j, i)]).abs() > 1e-12 * scale {
                    return Err(Error::InvalidArgument("Laplacian must be symmetric".into()));
                }
                if i != j && laplacian[(i, j)] > 0.0 {
                    return Err(Error::InvalidArgument(
                        "Laplacian off-diagonal entries must be <= 0".into(),
                    ));
                }
            }
        }
        Ok(Self {
            laplacian,
            metadata: None,
        })
    }

    pub fn from_edges(n: usize, edges: &[Edge]) -> Result<Self> {
        let mut l = DMatrix::<f64>::zeros(n, n);
        for e in edges {
            if e.from >= n || e.to >= n {
                return Err(Error::InvalidArgument(format!(
                    "edge ({}, {}) references a bus outside 0..{n}",
                    e.from, e.to
                )));
            }
            if e.from == e.to {
                return Err(Error::InvalidArgument("self-loops are not allowed".into()));
            }
            if !(e.weight > 0.0) {
                return Err(Error::InvalidArgument("edge weight > 0".into()));
            }
            l[(e.from, e.to)] -= e.weight;
            l[(e.to, e.from)] -= e.weight;
            l[(e.from, e.from)] += e.weight;
            l[(e.to, e.to)] += e.weight;
        }
        Self::from_laplacian(l)
    }

    pub fn laplacian(&self) -> &DMatrix<f64> {
        &self.laplacian
    }

    pub fn size(&self) -> usize {
        self.laplacian.nrows()
    }

    /// `alpha L`.
    pub fn scaled(&self, alpha: f64) -> Self {
        Self {
            laplacian: &self.laplacian * alpha,
            metadata: self.metadata.clone(),
        }
    }

    /// Eigenvalues in ascending order.
    pub fn eigenvalues(&self) -> Vec<f64> {
        let mut ev: Vec<f64> = SymmetricEigen::new(self.laplacian.clone())
            .eigenvalues
            .iter()
            .copied()
            .collect();
        ev.sort_by(f64::total_cmp);
        ev
    }

    /// Algebraic connectivity. Zero for a single bus.
    pub fn lambda2(&self) -> f64 {
        self.eigenvalues().get(1).copied().unwrap_or(0.0)
    }

    /// Orthonormal eigenvectors for `lambda_2..lambda_n` as columns, with the
    /// matching eigenvalues.
    pub fn nonzero_modes(&self) -> (DMatrix<f64>, Vec<f64>) {
        let n = self.size();
        let eig = SymmetricEigen::new(self.laplacian.clone());
        let mut order: Vec<usize> = (0..n).collect();
        order.sort_by(|&a, &b| eig.eigenvalues[a].total_cmp(&eig.eigenvalues[b]));
        let keep = &order[1.min(n)..];
        let vectors = DMatrix::from_fn(n, keep.len(), |i, j| eig.eigenvectors[(i, keep[j])]);
        let values = keep.iter().map(|&k| eig.eigenvalues[k]).collect();
        (vectors, values)
    }
}

/// Edges of a connected Erdős–Rényi graph `G(n, p)` with weights drawn
/// uniformly from `[w_lo, w_hi)`. Disconnected draws are discarded and the
/// stream continues, so the result depends only on the arguments.
pub fn random_connected_edges(n: usize, p: f64, w_lo: f64, w_hi: f64, seed: u64) -> Result<Vec<Edge>> {
    if n < 2 || !(0.0..=1.0).contains(&p) || p == 0.0 || !(w_lo > 0.0 && w_hi > w_lo) {
        return Err(Error::InvalidArgument(
            "need n >= 2, 0 < p <= 1 and 0 < w_lo < w_hi".into(),
        ));
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    for _ in 0..10_000 {
        let mut edges = Vec::new();
        for i in 0..n {
            for j in i + 1..n {
                if rng.random::<f64>() < p {
                    let weight = rng.random_range(w_lo..w_hi);
                    edges.push(Edge { from: i, to: j, weight });
                }
            }
        }
        if is_connected(n, &edges) {
            return Ok(edges);
        }
    }
    Err(Error::Numerical("could not draw a connected graph".into()))
}

fn is_connected(n: usize, edges: &[Edge]) -> bool {
    let mut seen = vec![false; n];
    let mut stack = vec![0];
    seen[0] = true;
    while let Some(v) = stack.pop() {
        for e in edges {
            let other = if e.from == v {
                e.to
            } else if e.to == v {
                e.from
            } else {
                continue;
            };
            if !seen[other] {
                seen[other] = true;
                stack.push(other);
            }
        }
    }
    seen.into_iter().all(|s| s)
}
