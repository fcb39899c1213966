//! Lévy concentration of empirical samples and small-ball experiments for
//! inner products `w . X` with a sparse random vector `X`.

use serde::Serialize;

use crate::eigen::eig_sym;
use crate::ensemble::{sparse_vector, EnsembleSpec};
use crate::error::{Error, Result};
use crate::lcd::{lcd_approx, LCDParams};
use crate::rng::{derive_stream_rng, streams};
use crate::trials::run_trials;

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct LevyEstimate {
    pub epsilon: f64,
    /// Largest fraction of samples in a closed interval of length `2 epsilon`.
    pub value: f64,
    pub sample_count: usize,
    /// Center of the leftmost maximizing interval.
    pub argmax_center: f64,
}

/// Exact Lévy concentration `sup_u P(|Z - u| <= eps)` of the empirical
/// measure. Some maximizing interval starts at a sample, so a two-pointer
/// sweep over the sorted samples finds it.
pub fn levy_concentration_scalar(samples: &[f64], eps: f64) -> Result<LevyEstimate> {
    if samples.is_empty() {
        return Err(Error::param("samples", "need at least one sample"));
    }
    if !(eps >= 0.0) || !eps.is_finite() {
        return Err(Error::param("eps", format!("{eps} must be finite and nonnegative")));
    }
    if samples.iter().any(|x| !x.is_finite()) {
        return Err(Error::param("samples", "samples must be finite"));
    }
    let mut s = samples.to_vec();
    s.sort_by(f64::total_cmp);
    let width = 2.0 * eps;
    let (mut best, mut best_start) = (0usize, 0usize);
    let mut j = 0;
    for i in 0..s.len() {
        j = j.max(i);
        while j < s.len() && s[j] - s[i] <= width {
            j += 1;
        }
        if j - i > best {
            best = j - i;
            best_start = i;
        }
    }
    Ok(LevyEstimate {
        epsilon: eps,
        value: best as f64 / s.len() as f64,
        sample_count: s.len(),
        argmax_center: s[best_start] + eps,
    })
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct SmallBallRow {
    pub eps: f64,
    /// Empirical `L(w . X, sqrt(p) eps)`.
    pub levy: f64,
    /// `eps + 1 / (sqrt(p) theta_star(w))`.
    pub reference: f64,
    pub ratio: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct SmallBallTable {
    pub rows: Vec<SmallBallRow>,
    pub theta_star: f64,
    pub lcd_capped: bool,
    pub trials: usize,
    pub max_ratio: f64,
}

impl SmallBallTable {
    pub fn to_csv(&self) -> String {
        let mut out = String::from("eps,levy,reference,ratio\n");
        for r in &self.rows {
            out.push_str(&format!("{},{},{},{}\n", r.eps, r.levy, r.reference, r.ratio));
        }
        out
    }
}

/// Draws `trials` vectors `X` with i.i.d. coordinates `xi_j chi_j` (trial `t`
/// uses the vector stream of its trial seed) and tabulates the empirical
/// concentration of `w . X` at radius `sqrt(p) eps` for each `eps`.
pub fn small_ball_experiment(
    w: &[f64],
    spec: &EnsembleSpec,
    eps_grid: &[f64],
    trials: usize,
    lcd: &LCDParams,
) -> Result<SmallBallTable> {
    spec.validate()?;
    if w.len() != spec.n {
        return Err(Error::param("w", format!("length {} differs from n = {}", w.len(), spec.n)));
    }
    let lcd_result = lcd_approx(w, lcd)?;
    let batch = run_trials(spec.master_seed, 0, trials, |_, seed| {
        let mut rng = derive_stream_rng(seed, streams::VECTOR);
        let x = sparse_vector(spec.n, spec.p, spec.dist, &mut rng);
        Ok(w.iter().zip(&x).map(|(a, b)| a * b).sum::<f64>())
    });
    batch.require_any()?;
    let samples: Vec<f64> = batch.values().copied().collect();
    let sqrt_p = spec.p.sqrt();
    let mut rows = Vec::with_capacity(eps_grid.len());
    for &eps in eps_grid {
        let levy = levy_concentration_scalar(&samples, sqrt_p * eps)?.value;
        let reference = eps + 1.0 / (sqrt_p * lcd_result.theta_star);
        rows.push(SmallBallRow {
            eps,
            levy,
            reference,
            ratio: levy / reference,
        });
    }
    let max_ratio = rows.iter().map(|r| r.ratio).fold(0.0, f64::max);
    Ok(SmallBallTable {
        rows,
        theta_star: lcd_result.theta_star,
        lcd_capped: lcd_result.capped,
        trials: samples.len(),
        max_ratio,
    })
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct InnerProductTable {
    pub delta_grid: Vec<f64>,
    /// Empirical `P(|w . X| <= delta sqrt(p))` per grid point.
    pub probability: Vec<f64>,
    pub completed: usize,
    pub failed: usize,
}

impl InnerProductTable {
    pub fn to_csv(&self) -> String {
        let mut out = String::from("delta,probability\n");
        for (d, q) in self.delta_grid.iter().zip(&self.probability) {
            out.push_str(&format!("{d},{q}\n"));
        }
        out
    }
}

/// Per trial: draws `M`, removes a uniformly random row and column, takes
/// eigenvector `eigen_index` (ascending order; default the middle one) of the
/// minor and records `|w . X|` for the removed column `X`.
pub fn eigenvector_inner_product_experiment(
    spec: &EnsembleSpec,
    trials: usize,
    delta_grid: &[f64],
    eigen_index: Option<usize>,
) -> Result<InnerProductTable> {
    spec.validate()?;
    if spec.n < 20 {
        return Err(Error::param("n", format!("need n >= 20, got {}", spec.n)));
    }
    let index = eigen_index.unwrap_or((spec.n - 1) / 2);
    if index >= spec.n - 1 {
        return Err(Error::IndexOutOfRange { index, len: spec.n - 1 });
    }
    let batch = run_trials(spec.master_seed, 0, trials, |_, seed| {
        let m = spec.with_seed(seed).generate()?;
        let drop = derive_stream_rng(seed, streams::INDEX).index(spec.n);
        let split = m.principal_minor(drop)?;
        let eig = eig_sym(&split.minor)?;
        let w = eig.vector(index);
        Ok(w.iter().zip(&split.column).map(|(a, b)| a * b).sum::<f64>().abs())
    });
    batch.require_any()?;
    let values: Vec<f64> = batch.values().copied().collect();
    let scale = spec.p.sqrt();
    let probability = delta_grid
        .iter()
        .map(|&d| values.iter().filter(|&&v| v <= d * scale).count() as f64 / values.len() as f64)
        .collect();
    Ok(InnerProductTable {
        delta_grid: delta_grid.to_vec(),
        probability,
        completed: values.len(),
        failed: batch.failed.len(),
    })
}
