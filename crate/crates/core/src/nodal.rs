//! Graphs, union-find, and weak/strong nodal domains of eigenvectors.

use serde::Serialize;

use crate::eigen::eig_sym;
use crate::ensemble::{EnsembleKind, EnsembleSpec};
use crate::error::{Error, Result};
use crate::matrix::SymMatrix;
use crate::trials::run_trials;

/// Simple undirected graph stored as sorted neighbour lists.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Graph {
    adj: Vec<Vec<usize>>,
}

impl Graph {
    /// Edges are the nonzero off-diagonal entries; the diagonal is ignored.
    pub fn from_adjacency(a: &SymMatrix) -> Self {
        let n = a.n();
        let mut adj = vec![Vec::new(); n];
        for i in 0..n {
            for j in (i + 1)..n {
                if a.get(i, j) != 0.0 {
                    adj[i].push(j);
                    adj[j].push(i);
                }
            }
        }
        Graph { adj }
    }

    /// Duplicate edges are merged; self-loops and out-of-range endpoints are
    /// rejected.
    pub fn from_edges(n: usize, edges: &[(usize, usize)]) -> Result<Self> {
        let mut adj = vec![Vec::new(); n];
        for &(u, v) in edges {
            if u >= n || v >= n {
                return Err(Error::IndexOutOfRange { index: u.max(v), len: n });
            }
            if u == v {
                return Err(Error::param("edges", format!("self-loop at vertex {u}")));
            }
            adj[u].push(v);
            adj[v].push(u);
        }
        for list in &mut adj {
            list.sort_unstable();
            list.dedup();
        }
        Ok(Graph { adj })
    }

    /// Parses one `u v` pair (0-indexed) per line. Blank lines and lines
    /// starting with `#` are skipped. Without `n`, the vertex count is one
    /// more than the largest endpoint.
    pub fn parse_edge_list(text: &str, n: Option<usize>) -> Result<Self> {
        let mut edges = Vec::new();
        for (k, line) in text.lines().enumerate() {
            let line = line.trim();
            if line.is_empty() || line.starts_with('#') {
                continue;
            }
            let mut parts = line.split_whitespace();
            let mut endpoint = || -> Result<usize> {
                let tok = parts.next().ok_or_else(|| Error::parse(k + 1, "expected two vertices"))?;
                tok.parse()
                    .map_err(|e| Error::parse(k + 1, format!("bad vertex `{tok}`: {e}")))
            };
            let (u, v) = (endpoint()?, endpoint()?);
            if parts.next().is_some() {
                return Err(Error::parse(k + 1, "expected exactly two vertices"));
            }
            edges.push((u, v));
        }
        let n = n.unwrap_or_else(|| edges.iter().map(|&(u, v)| u.max(v) + 1).max().unwrap_or(0));
        Self::from_edges(n, &edges)
    }

    pub fn n(&self) -> usize {
        self.adj.len()
    }

    pub fn neighbors(&self, i: usize) -> &[usize] {
        &self.adj[i]
    }

    pub fn edge_count(&self) -> usize {
        self.adj.iter().map(Vec::len).sum::<usize>() / 2
    }

    /// 0/1 adjacency matrix.
    pub fn to_adjacency(&self) -> SymMatrix {
        let mut a = SymMatrix::zeros(self.n());
        for (i, list) in self.adj.iter().enumerate() {
            for &j in list {
                a.set(i, j, 1.0);
            }
        }
        a
    }
}

/// Disjoint-set forest with union by size and path halving.
#[derive(Debug, Clone)]
pub struct UnionFind {
    parent: Vec<usize>,
    size: Vec<usize>,
}

impl UnionFind {
    pub fn new(n: usize) -> Self {
        UnionFind {
            parent: (0..n).collect(),
            size: vec![1; n],
        }
    }

    pub fn find(&mut self, mut x: usize) -> usize {
        while self.parent[x] != x {
            self.parent[x] = self.parent[self.parent[x]];
            x = self.parent[x];
        }
        x
    }

    pub fn union(&mut self, a: usize, b: usize) {
        let (mut a, mut b) = (self.find(a), self.find(b));
        if a == b {
            return;
        }
        if self.size[a] < self.size[b] {
            std::mem::swap(&mut a, &mut b);
        }
        self.parent[b] = a;
        self.size[a] += self.size[b];
    }
}

/// Connected components of the subgraph induced by `keep`, each sorted, in
/// order of smallest vertex.
fn induced_components(g: &Graph, keep: impl Fn(usize) -> bool) -> Vec<Vec<usize>> {
    let n = g.n();
    let mut uf = UnionFind::new(n);
    for i in (0..n).filter(|&i| keep(i)) {
        for &j in g.neighbors(i) {
            if j > i && keep(j) {
                uf.union(i, j);
            }
        }
    }
    let mut slot = vec![usize::MAX; n];
    let mut comps: Vec<Vec<usize>> = Vec::new();
    for i in (0..n).filter(|&i| keep(i)) {
        let root = uf.find(i);
        if slot[root] == usize::MAX {
            slot[root] = comps.len();
            comps.push(Vec::new());
        }
        comps[slot[root]].push(i);
    }
    comps
}

fn check_len(g: &Graph, v: &[f64]) -> Result<()> {
    if v.len() != g.n() {
        return Err(Error::param("v", format!("length {} differs from vertex count {}", v.len(), g.n())));
    }
    Ok(())
}

/// Components of `{v_i > zeta}` and of `{v_i < -zeta}`, sorted by smallest
/// vertex.
pub fn strong_nodal_domains(g: &Graph, v: &[f64], zeta: f64) -> Result<Vec<Vec<usize>>> {
    check_len(g, v)?;
    let mut out = induced_components(g, |i| v[i] > zeta);
    out.extend(induced_components(g, |i| v[i] < -zeta));
    out.sort();
    Ok(out)
}

/// Components of `{v_i >= -zeta}` and of `{v_i <= zeta}`; vertices with
/// `|v_i| <= zeta` may appear on both sides. A component made only of such
/// vertices can sit inside a larger component of the other side, so sets
/// contained in another one are dropped, duplicates included.
pub fn weak_nodal_domains(g: &Graph, v: &[f64], zeta: f64) -> Result<Vec<Vec<usize>>> {
    check_len(g, v)?;
    let mut all = induced_components(g, |i| v[i] >= -zeta);
    all.extend(induced_components(g, |i| v[i] <= zeta));
    all.sort();
    all.dedup();
    let n = g.n();
    let mut member = vec![Vec::new(); n];
    for (k, set) in all.iter().enumerate() {
        for &i in set {
            member[i].push(k);
        }
    }
    let keep: Vec<bool> = all
        .iter()
        .enumerate()
        .map(|(k, set)| {
            // a strict superset must contain set[0]
            !member[set[0]]
                .iter()
                .any(|&o| o != k && all[o].len() > set.len() && set.iter().all(|i| member[*i].contains(&o)))
        })
        .collect();
    Ok(all.into_iter().zip(keep).filter_map(|(s, k)| k.then_some(s)).collect())
}

/// `n |v|_inf 2^-40`.
pub fn default_zeta(v: &[f64]) -> f64 {
    ZetaRule::default().resolve(v)
}

/// How the near-zero threshold is chosen for each vector.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
#[serde(rename_all = "snake_case", tag = "rule", content = "value")]
pub enum ZetaRule {
    /// `factor * n * |v|_inf`.
    Relative(f64),
    Absolute(f64),
}

impl Default for ZetaRule {
    fn default() -> Self {
        ZetaRule::Relative(2f64.powi(-40))
    }
}

impl ZetaRule {
    pub fn resolve(self, v: &[f64]) -> f64 {
        match self {
            ZetaRule::Relative(f) => {
                let inf = v.iter().fold(0.0f64, |a, x| a.max(x.abs()));
                f * v.len() as f64 * inf
            }
            ZetaRule::Absolute(z) => z,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct NodalReport {
    pub strong_domains: Vec<Vec<usize>>,
    pub weak_domains: Vec<Vec<usize>>,
    /// Vertices with `|v_i| <= zeta`.
    pub zero_vertices: Vec<usize>,
    pub weak_eq_strong: bool,
    /// Sizes of the strong domains.
    pub domain_sizes: Vec<usize>,
}

pub fn nodal_report(g: &Graph, v: &[f64], zeta: f64) -> Result<NodalReport> {
    let strong_domains = strong_nodal_domains(g, v, zeta)?;
    let weak_domains = weak_nodal_domains(g, v, zeta)?;
    Ok(NodalReport {
        zero_vertices: (0..v.len()).filter(|&i| v[i].abs() <= zeta).collect(),
        weak_eq_strong: weak_domains == strong_domains,
        domain_sizes: strong_domains.iter().map(Vec::len).collect(),
        strong_domains,
        weak_domains,
    })
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct NodalRow {
    pub graph: u64,
    /// Ascending eigenvalue index; `n - 1` is the top eigenvector.
    pub eigen_index: usize,
    pub weak_count: usize,
    pub strong_count: usize,
    pub zero_count: usize,
    pub weak_eq_strong: bool,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct NodalTable {
    pub rows: Vec<NodalRow>,
    pub graphs: usize,
    /// Over all non-top eigenvectors.
    pub weak_eq_strong_freq: f64,
    pub two_domain_freq: f64,
    /// Fraction of graphs whose top eigenvector has one sign throughout.
    pub top_single_domain_freq: f64,
    pub failed: usize,
}

impl NodalTable {
    pub fn rows_csv(&self) -> String {
        let mut out = String::from("graph,eigen_index,weak_count,strong_count,zero_count,weak_eq_strong\n");
        for r in &self.rows {
            out.push_str(&format!(
                "{},{},{},{},{},{}\n",
                r.graph, r.eigen_index, r.weak_count, r.strong_count, r.zero_count, r.weak_eq_strong
            ));
        }
        out
    }

    pub fn summary_csv(&self) -> String {
        format!(
            "graphs,weak_eq_strong_freq,two_domain_freq,top_single_domain_freq,failed\n{},{},{},{},{}\n",
            self.graphs, self.weak_eq_strong_freq, self.two_domain_freq, self.top_single_domain_freq, self.failed
        )
    }
}

/// Nodal domain counts for every eigenvector of `trials` graphs from `G(n, p)`.
pub fn nodal_experiment(spec: &EnsembleSpec, trials: usize, zeta: ZetaRule) -> Result<NodalTable> {
    if spec.kind != EnsembleKind::ErdosRenyiAdjacency {
        return Err(Error::param("kind", "nodal experiments need an Erdős–Rényi spec"));
    }
    spec.validate()?;
    let n = spec.n;
    let batch = run_trials(spec.master_seed, 0, trials, |t, seed| {
        let a = spec.with_seed(seed).generate()?;
        let g = Graph::from_adjacency(&a);
        let eig = eig_sym(&a)?;
        (0..n)
            .map(|i| {
                let v = eig.vector(i);
                let r = nodal_report(&g, v, zeta.resolve(v))?;
                Ok(NodalRow {
                    graph: t,
                    eigen_index: i,
                    weak_count: r.weak_domains.len(),
                    strong_count: r.strong_domains.len(),
                    zero_count: r.zero_vertices.len(),
                    weak_eq_strong: r.weak_eq_strong,
                })
            })
            .collect::<Result<Vec<_>>>()
    });
    batch.require_any()?;
    let rows: Vec<NodalRow> = batch.values().flatten().copied().collect();
    let lower: Vec<&NodalRow> = rows.iter().filter(|r| r.eigen_index + 1 < n).collect();
    let frac = |count: usize, total: usize| count as f64 / total.max(1) as f64;
    let graphs = batch.completed();
    let top_single = rows
        .iter()
        .filter(|r| r.eigen_index + 1 == n && r.strong_count == 1 && r.zero_count == 0)
        .count();
    Ok(NodalTable {
        weak_eq_strong_freq: frac(lower.iter().filter(|r| r.weak_eq_strong).count(), lower.len()),
        two_domain_freq: frac(lower.iter().filter(|r| r.strong_count == 2).count(), lower.len()),
        top_single_domain_freq: frac(top_single, graphs),
        rows,
        graphs,
        failed: batch.failed.len(),
    })
}
