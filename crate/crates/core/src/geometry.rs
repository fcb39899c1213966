//! Decomposition of the unit sphere into compressible, dominated and
//! incompressible vectors, and the block partition of an incompressible
//! vector used by the regularized LCD.
//!
//! Coordinate ranks are 1-based (`rank 1` is the largest magnitude) to match
//! the usual `x_[m1:m2]` notation; indices are 0-based.

use serde::Serialize;

use crate::error::{Error, Result};

const UNIT_TOL: f64 = 1e-12;

/// Constants of the sphere decomposition.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct GeometryParams {
    /// Sparsity cut: the `m` largest coordinates form the head.
    pub m: usize,
    /// Compressibility radius.
    pub rho: f64,
    /// Domination constant in `(0, 1)`.
    pub c_dom: f64,
    /// Block fraction; blocks have `ceil(omega n)` coordinates.
    pub omega: f64,
}

impl GeometryParams {
    /// Defaults for dimension `n` and sparsity `p`: `omega` as given,
    /// `m = ceil(omega n)`, `c_dom = 0.5` and `rho` from [`default_rho`].
    pub fn for_dimension(n: usize, p: f64, omega: f64, cbar: f64) -> Result<Self> {
        let params = GeometryParams {
            m: block_size(n, omega),
            rho: default_rho(n, p, cbar)?,
            c_dom: 0.5,
            omega,
        };
        params.validate(n)?;
        Ok(params)
    }

    pub fn validate(&self, n: usize) -> Result<()> {
        if !(self.rho > 0.0 && self.rho < 1.0) {
            return Err(Error::param("rho", format!("{} is outside (0, 1)", self.rho)));
        }
        if !(self.c_dom > 0.0 && self.c_dom < 1.0) {
            return Err(Error::param("c_dom", format!("{} is outside (0, 1)", self.c_dom)));
        }
        if self.m == 0 || self.m >= n {
            return Err(Error::param("m", format!("need 1 <= m < n = {n}, got {}", self.m)));
        }
        if !(self.omega > 0.0 && self.omega < 1.0) {
            return Err(Error::param("omega", format!("{} is outside (0, 1)", self.omega)));
        }
        Ok(())
    }
}

/// `rho = cbar^(-l0 - 6)` with `l0 = ceil(log(1/(8p)) / log(sqrt(pn)))`.
pub fn default_rho(n: usize, p: f64, cbar: f64) -> Result<f64> {
    let pn = p * n as f64;
    if pn <= 1.0 {
        return Err(Error::param("p", format!("need p n > 1, got {pn}")));
    }
    if cbar <= 1.0 {
        return Err(Error::param("cbar", format!("need cbar > 1, got {cbar}")));
    }
    let l0 = ((1.0 / (8.0 * p)).ln() / pn.sqrt().ln()).ceil();
    Ok(cbar.powf(-l0 - 6.0))
}

/// `ceil(omega n)`, ignoring representation error in `omega`.
pub fn block_size(n: usize, omega: f64) -> usize {
    (omega * n as f64 - 1e-9).ceil().max(0.0) as usize
}

/// The range of `omega` for which the block construction is stated,
/// `n^(-1/7) <= omega <= 1/log n`. Empty for every `n` below about `10^10`.
pub fn asymptotic_omega_range(n: usize) -> Option<(f64, f64)> {
    let nf = n as f64;
    let lo = nf.powf(-1.0 / 7.0);
    let hi = 1.0 / nf.ln();
    (lo <= hi).then_some((lo, hi))
}

/// Whether `1/(2 omega) <= k0 <= 1/omega`.
pub fn k0_bounds_hold(k0: usize, omega: f64) -> bool {
    let k = k0 as f64;
    1.0 / (2.0 * omega) <= k && k <= 1.0 / omega
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum Verdict {
    Compressible,
    Dominated,
    Incompressible,
}

impl Verdict {
    pub fn as_str(self) -> &'static str {
        match self {
            Verdict::Compressible => "compressible",
            Verdict::Dominated => "dominated",
            Verdict::Incompressible => "incompressible",
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct VectorClassification {
    pub verdict: Verdict,
    /// Dyadic level `j >= 1` with `2^(j-1) rho <= tail_norm < 2^j rho`;
    /// only set for incompressible vectors.
    pub level: Option<u32>,
    /// `|x_[m+1:n]|_2`, equal to the distance to `Sparse(m)`.
    pub tail_norm: f64,
    /// `|x_[m+1:n]|_inf`.
    pub tail_inf: f64,
}

/// Block partition `I_0, I_1, ..., I_k0` of `[n]` built from an
/// incompressible vector.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Partition {
    /// `blocks[0]` is `I_0`; every block is sorted ascending.
    pub blocks: Vec<Vec<usize>>,
    pub k0: usize,
    pub block_size: usize,
    pub r: usize,
    pub s: usize,
    pub r_prime: usize,
    pub level: u32,
    pub tau: Vec<usize>,
    pub sigma_hat: Vec<usize>,
    pub sigma_bar: Vec<usize>,
}

impl Partition {
    pub fn block(&self, k: usize) -> &[usize] {
        &self.blocks[k]
    }
}

fn check_unit(x: &[f64]) -> Result<()> {
    let norm = x.iter().map(|v| v * v).sum::<f64>().sqrt();
    if (norm - 1.0).abs() > UNIT_TOL {
        return Err(Error::Contract(format!("expected a unit vector, |x| = {norm}")));
    }
    Ok(())
}

/// Indices ordered by nonincreasing `|x_i|`; equal magnitudes keep index order.
pub fn sorted_perm(x: &[f64]) -> Vec<usize> {
    let mut idx: Vec<usize> = (0..x.len()).collect();
    idx.sort_by(|&a, &b| x[b].abs().total_cmp(&x[a].abs()).then(a.cmp(&b)));
    idx
}

/// `x_[m1:m2]`: `x` restricted to the coordinates ranked `m1..=m2` by
/// magnitude (1-based), zero elsewhere.
pub fn tail_slice(x: &[f64], m1: usize, m2: usize) -> Result<Vec<f64>> {
    let n = x.len();
    if !(1 <= m1 && m1 <= m2 && m2 <= n) {
        return Err(Error::param(
            "range",
            format!("need 1 <= m1 <= m2 <= n = {n}, got [{m1}:{m2}]"),
        ));
    }
    let order = sorted_perm(x);
    let mut out = vec![0.0; n];
    for &i in &order[m1 - 1..m2] {
        out[i] = x[i];
    }
    Ok(out)
}

/// `(|x_[m+1:n]|_2, |x_[m+1:n]|_inf)`.
fn tail_norms(x: &[f64], m: usize) -> (f64, f64) {
    let order = sorted_perm(x);
    let tail = order.get(m..).unwrap_or(&[]);
    let l2 = tail.iter().map(|&i| x[i] * x[i]).sum::<f64>().sqrt();
    let inf = tail.first().map_or(0.0, |&i| x[i].abs());
    (l2, inf)
}

/// Euclidean distance from a unit vector to the `m`-sparse vectors; the best
/// `m`-term approximation keeps the `m` largest magnitudes. Zero for `m >= n`.
pub fn dist_to_sparse(x: &[f64], m: usize) -> Result<f64> {
    check_unit(x)?;
    Ok(tail_norms(x, m).0)
}

/// Compressible when within `rho` of `Sparse(m)`, otherwise dominated when the
/// tail satisfies `|tail|_2 <= c_dom sqrt(m) |tail|_inf`, otherwise
/// incompressible at its dyadic level.
pub fn classify(x: &[f64], params: &GeometryParams) -> Result<VectorClassification> {
    check_unit(x)?;
    let (tail_norm, tail_inf) = tail_norms(x, params.m);
    let verdict = if tail_norm <= params.rho {
        Verdict::Compressible
    } else if tail_norm <= params.c_dom * (params.m as f64).sqrt() * tail_inf {
        Verdict::Dominated
    } else {
        Verdict::Incompressible
    };
    let level = (verdict == Verdict::Incompressible).then(|| dyadic_level(tail_norm, params.rho));
    Ok(VectorClassification {
        verdict,
        level,
        tail_norm,
        tail_inf,
    })
}

/// The `j >= 1` with `2^(j-1) rho <= t < 2^j rho`, for `t > rho`.
fn dyadic_level(t: f64, rho: f64) -> u32 {
    let mut j = 1u32;
    while 2f64.powi(j as i32) * rho <= t {
        j += 1;
    }
    j
}

fn require_incompressible(x: &[f64], params: &GeometryParams) -> Result<(VectorClassification, u32)> {
    let class = classify(x, params)?;
    match class.level {
        Some(j) => Ok((class, j)),
        None => Err(Error::Contract(format!(
            "vector is {}, not incompressible",
            class.verdict.as_str()
        ))),
    }
}

/// Tail coordinates bounded below by `2^(j-1) rho / (2 sqrt n)`, sorted by
/// index. Fails if fewer than `c_dom^2 m / 8` qualify.
pub fn large_coordinate_set(v: &[f64], params: &GeometryParams) -> Result<Vec<usize>> {
    let (_, j) = require_incompressible(v, params)?;
    let n = v.len();
    let threshold = 2f64.powi(j as i32 - 1) * params.rho / (2.0 * (n as f64).sqrt());
    let order = sorted_perm(v);
    let mut sigma: Vec<usize> = order[params.m..]
        .iter()
        .copied()
        .filter(|&i| v[i].abs() >= threshold)
        .collect();
    sigma.sort_unstable();
    let need = params.c_dom * params.c_dom * params.m as f64 / 8.0;
    if (sigma.len() as f64) < need {
        return Err(Error::Contract(format!(
            "large coordinate set has {} elements, fewer than c^2 m / 8 = {need}",
            sigma.len()
        )));
    }
    Ok(sigma)
}

/// Elements `k1..=k2` (1-based) of a sorted index set.
pub fn ordered_range(set: &[usize], k1: usize, k2: usize) -> &[usize] {
    if k2 < k1 || k1 == 0 {
        return &[];
    }
    let lo = (k1 - 1).min(set.len());
    let hi = k2.min(set.len());
    &set[lo..hi]
}

/// Splits `[n]` into `I_0` (the `m` largest coordinates plus leftovers) and
/// `k0` disjoint blocks of `ceil(omega n)` indices each. Each block receives
/// `r = floor(r'/k0)` indices of `sigma_hat`; the `r' mod k0` remaining ones
/// go one apiece to the first blocks. Blocks are then filled in index order
/// from `sigma_bar`.
pub fn partition_indices(v: &[f64], params: &GeometryParams) -> Result<Partition> {
    params.validate(v.len())?;
    let n = v.len();
    let (_, level) = require_incompressible(v, params)?;
    let sigma = large_coordinate_set(v, params)?;

    let block_size = block_size(n, params.omega);
    if block_size == 0 {
        return Err(Error::param("omega", "ceil(omega n) must be positive"));
    }
    let k0 = (n - params.m) / block_size;
    if k0 == 0 {
        return Err(Error::param(
            "omega",
            format!("no block of size {block_size} fits outside the top {} coordinates", params.m),
        ));
    }

    let order = sorted_perm(v);
    let mut tau = order[..params.m].to_vec();
    tau.sort_unstable();

    let r_prime = (params.c_dom * params.c_dom * params.m as f64 / 8.0).ceil() as usize;
    let sigma_hat = sigma[..r_prime].to_vec();
    let mut taken = vec![false; n];
    for &i in tau.iter().chain(&sigma_hat) {
        taken[i] = true;
    }
    let sigma_bar: Vec<usize> = (0..n).filter(|&i| !taken[i]).collect();

    let r = r_prime / k0;
    let extra = r_prime - k0 * r;
    if r + usize::from(extra > 0) > block_size {
        return Err(Error::param("omega", "blocks too small to hold their share of sigma_hat"));
    }
    let s = block_size - r;

    let mut blocks = vec![Vec::new(); k0 + 1];
    let mut bar_cursor = 0;
    for (k, block) in blocks.iter_mut().enumerate().skip(1) {
        block.extend_from_slice(ordered_range(&sigma_hat, 1 + (k - 1) * r, k * r));
        if k <= extra {
            block.push(sigma_hat[k0 * r + k - 1]);
        }
        let fill = block_size - block.len();
        block.extend_from_slice(&sigma_bar[bar_cursor..bar_cursor + fill]);
        bar_cursor += fill;
        block.sort_unstable();
    }
    let mut rest: Vec<usize> = tau.clone();
    rest.extend_from_slice(&sigma_bar[bar_cursor..]);
    rest.sort_unstable();
    blocks[0] = rest;

    Ok(Partition {
        blocks,
        k0,
        block_size,
        r,
        s,
        r_prime,
        level,
        tau,
        sigma_hat,
        sigma_bar,
    })
}

/// Outcome of the two-sided block norm bound.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct BlockNormCheck {
    pub holds: bool,
    /// `c_dom 2^(j-3) rho omega`.
    pub lower: f64,
    /// `2^j rho / c_dom`.
    pub upper: f64,
    pub norms: Vec<f64>,
    /// Block (1-based) with the largest relative violation, if any.
    pub worst_block: Option<usize>,
}

/// Verifies `c 2^(j-3) rho omega <= |v_{I_k}|_2 <= c^-1 2^j rho` for every
/// block `k >= 1`. Both ends are closed.
pub fn level_block_norm_check(v: &[f64], partition: &Partition, params: &GeometryParams) -> BlockNormCheck {
    let j = partition.level as i32;
    let lower = params.c_dom * 2f64.powi(j - 3) * params.rho * params.omega;
    let upper = 2f64.powi(j) * params.rho / params.c_dom;
    let norms: Vec<f64> = partition.blocks[1..]
        .iter()
        .map(|b| b.iter().map(|&i| v[i] * v[i]).sum::<f64>().sqrt())
        .collect();
    let mut worst: Option<(usize, f64)> = None;
    for (k, &norm) in norms.iter().enumerate() {
        let excess = ((lower - norm) / lower).max((norm - upper) / upper);
        if excess > 0.0 && worst.is_none_or(|(_, w)| excess > w) {
            worst = Some((k + 1, excess));
        }
    }
    BlockNormCheck {
        holds: worst.is_none(),
        lower,
        upper,
        norms,
        worst_block: worst.map(|(k, _)| k),
    }
}

/// Number of coordinates with `rho^2 / sqrt(2n) <= |v_i| <= 1/sqrt(m)`;
/// fails if `v` is within `rho` of `Sparse(m)` or the count is below
/// `m rho^2 / 2`.
pub fn incomp_spread_count(v: &[f64], m: usize, rho: f64) -> Result<usize> {
    let dist = dist_to_sparse(v, m)?;
    if dist <= rho {
        return Err(Error::Contract(format!(
            "vector is within {dist} <= rho of Sparse({m})"
        )));
    }
    let n = v.len() as f64;
    let lo = rho * rho / (2.0 * n).sqrt();
    let hi = 1.0 / (m as f64).sqrt();
    let count = v.iter().filter(|x| (lo..=hi).contains(&x.abs())).count();
    let need = m as f64 * rho * rho / 2.0;
    if (count as f64) < need {
        return Err(Error::Contract(format!(
            "only {count} spread coordinates, fewer than m rho^2 / 2 = {need}"
        )));
    }
    Ok(count)
}
