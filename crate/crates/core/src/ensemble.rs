//! Random matrix ensembles: the sparse subgaussian model `m_ij = xi_ij chi_ij`
//! and Erdős–Rényi adjacency matrices.

use rand_distr::{Distribution, StandardNormal};
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::matrix::SymMatrix;
use crate::rng::{derive_stream_rng, streams, RngState};

/// Mean-zero, unit-variance entry laws.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum EntryDistribution {
    /// Uniform on `{-1, +1}`.
    Rademacher,
    StandardGaussian,
    /// Uniform on `[-sqrt(3), sqrt(3)]`.
    UniformSymmetric,
}

const SQRT3: f64 = 1.732_050_807_568_877_2;

impl EntryDistribution {
    pub fn sample(self, rng: &mut RngState) -> f64 {
        match self {
            EntryDistribution::Rademacher => {
                if rng.uniform() < 0.5 {
                    -1.0
                } else {
                    1.0
                }
            }
            EntryDistribution::StandardGaussian => StandardNormal.sample(rng),
            EntryDistribution::UniformSymmetric => SQRT3 * (2.0 * rng.uniform() - 1.0),
        }
    }

    /// Subgaussian moment `B = inf { t > 0 : E exp(xi^2 / t^2) <= 2 }`.
    pub fn subgaussian_moment(self) -> f64 {
        match self {
            // exp(1/t^2) = 2
            EntryDistribution::Rademacher => 1.0 / std::f64::consts::LN_2.sqrt(),
            // (1 - 2/t^2)^(-1/2) = 2
            EntryDistribution::StandardGaussian => (8.0f64 / 3.0).sqrt(),
            EntryDistribution::UniformSymmetric => uniform_psi2_norm(),
        }
    }

    pub fn name(self) -> &'static str {
        match self {
            EntryDistribution::Rademacher => "rademacher",
            EntryDistribution::StandardGaussian => "gaussian",
            EntryDistribution::UniformSymmetric => "uniform",
        }
    }
}

impl std::str::FromStr for EntryDistribution {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s.to_ascii_lowercase().as_str() {
            "rademacher" => Ok(EntryDistribution::Rademacher),
            "gaussian" | "standard_gaussian" | "normal" => Ok(EntryDistribution::StandardGaussian),
            "uniform" | "uniform_symmetric" => Ok(EntryDistribution::UniformSymmetric),
            other => Err(Error::param("dist", format!("unknown distribution `{other}`"))),
        }
    }
}

/// `E exp(U^2/t^2) = 2` for `U ~ Unif[-sqrt 3, sqrt 3]`, solved by bisection
/// with composite Simpson quadrature.
fn uniform_psi2_norm() -> f64 {
    let mgf = |t: f64| {
        let steps = 2000;
        let h = SQRT3 / steps as f64;
        let f = |u: f64| (u * u / (t * t)).exp();
        let mut s = f(0.0) + f(SQRT3);
        for k in 1..steps {
            let w = if k % 2 == 1 { 4.0 } else { 2.0 };
            s += w * f(k as f64 * h);
        }
        s * h / 3.0 / SQRT3
    };
    let (mut lo, mut hi) = (0.5, 10.0);
    for _ in 0..100 {
        let mid = 0.5 * (lo + hi);
        if mgf(mid) > 2.0 {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    hi
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum EnsembleKind {
    SparseSubgaussian,
    ErdosRenyiAdjacency,
}

/// Parameters of a random matrix or graph ensemble.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct EnsembleSpec {
    pub n: usize,
    pub p: f64,
    pub dist: EntryDistribution,
    pub master_seed: u64,
    pub kind: EnsembleKind,
}

impl EnsembleSpec {
    pub fn sparse(n: usize, p: f64, dist: EntryDistribution, master_seed: u64) -> Self {
        EnsembleSpec {
            n,
            p,
            dist,
            master_seed,
            kind: EnsembleKind::SparseSubgaussian,
        }
    }

    pub fn erdos_renyi(n: usize, p: f64, master_seed: u64) -> Self {
        EnsembleSpec {
            n,
            p,
            dist: EntryDistribution::Rademacher,
            master_seed,
            kind: EnsembleKind::ErdosRenyiAdjacency,
        }
    }

    pub fn with_seed(self, master_seed: u64) -> Self {
        EnsembleSpec { master_seed, ..self }
    }

    /// Checks `n >= 2` and the sparsity range. The sparse model needs
    /// `0 < p <= 1`; adjacency matrices also accept the empty graph `p = 0`.
    pub fn validate(&self) -> Result<()> {
        if self.n < 2 {
            return Err(Error::param("n", format!("need n >= 2, got {}", self.n)));
        }
        let ok = match self.kind {
            EnsembleKind::SparseSubgaussian => self.p > 0.0 && self.p <= 1.0,
            EnsembleKind::ErdosRenyiAdjacency => (0.0..=1.0).contains(&self.p),
        };
        if !ok || !self.p.is_finite() {
            return Err(Error::param("p", format!("p = {} is outside (0, 1]", self.p)));
        }
        Ok(())
    }

    /// Draws a matrix of this ensemble from its own `MATRIX` stream.
    pub fn generate(&self) -> Result<SymMatrix> {
        match self.kind {
            EnsembleKind::SparseSubgaussian => gen_sparse_symmetric(self),
            EnsembleKind::ErdosRenyiAdjacency => gen_er_adjacency(self),
        }
    }
}

/// Sparse symmetric matrix `m_ij = xi_ij chi_ij`, entries independent for
/// `i <= j`, diagonal included.
pub fn gen_sparse_symmetric(spec: &EnsembleSpec) -> Result<SymMatrix> {
    if spec.kind != EnsembleKind::SparseSubgaussian {
        return Err(Error::param("kind", "expected a sparse subgaussian spec"));
    }
    spec.validate()?;
    let mut rng = derive_stream_rng(spec.master_seed, streams::MATRIX);
    Ok(sparse_symmetric_from(spec.n, spec.p, spec.dist, &mut rng))
}

pub fn sparse_symmetric_from(
    n: usize,
    p: f64,
    dist: EntryDistribution,
    rng: &mut RngState,
) -> SymMatrix {
    SymMatrix::from_upper_fn(n, |_, _| {
        if rng.bernoulli(p) {
            dist.sample(rng)
        } else {
            0.0
        }
    })
}

/// Adjacency matrix of `G(n, p)`: zero diagonal, Bernoulli(`p`) off-diagonal.
pub fn gen_er_adjacency(spec: &EnsembleSpec) -> Result<SymMatrix> {
    if spec.kind != EnsembleKind::ErdosRenyiAdjacency {
        return Err(Error::param("kind", "expected an Erdős–Rényi spec"));
    }
    spec.validate()?;
    let mut rng = derive_stream_rng(spec.master_seed, streams::MATRIX);
    Ok(er_adjacency_from(spec.n, spec.p, &mut rng))
}

pub fn er_adjacency_from(n: usize, p: f64, rng: &mut RngState) -> SymMatrix {
    SymMatrix::from_upper_fn(n, |i, j| {
        if i != j && rng.bernoulli(p) {
            1.0
        } else {
            0.0
        }
    })
}

/// Vector with i.i.d. coordinates `xi_j chi_j`.
pub fn sparse_vector(n: usize, p: f64, dist: EntryDistribution, rng: &mut RngState) -> Vec<f64> {
    (0..n)
        .map(|_| if rng.bernoulli(p) { dist.sample(rng) } else { 0.0 })
        .collect()
}

/// `A - p (J - I)`: subtracts the mean of an adjacency matrix.
pub fn center_adjacency(a: &SymMatrix, p: f64) -> Result<SymMatrix> {
    let n = a.n();
    if let Some(i) = (0..n).find(|&i| a.get(i, i) != 0.0) {
        return Err(Error::Contract(format!(
            "adjacency matrix has nonzero diagonal entry {} at {i}",
            a.get(i, i)
        )));
    }
    Ok(SymMatrix::from_upper_fn(n, |i, j| {
        if i == j {
            0.0
        } else {
            a.get(i, j) - p
        }
    }))
}
