//! Least common denominator of a unit vector, approximated by a bracketed
//! grid scan with bisection refinement, and its regularized form over the
//! blocks of a [`Partition`].

use serde::Serialize;

use crate::error::{Error, Result};
use crate::geometry::Partition;

/// Absolute slack on the strict inequality `dist < threshold`: a point only
/// counts as feasible when `dist + SLACK < threshold`.
pub const FEASIBILITY_SLACK: f64 = 1e-12;

const MAX_GRID_POINTS: f64 = 1e10;

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct LCDParams {
    pub gamma: f64,
    pub p: f64,
    pub theta_max: f64,
    pub coarse_step: f64,
    pub refine_iters: u32,
}

impl LCDParams {
    /// `theta_max = p^(-1/2) e^(1/omega)`, grid step `1e-3`, 40 bisections.
    pub fn new(gamma: f64, p: f64, omega: f64) -> Self {
        LCDParams {
            gamma,
            p,
            theta_max: p.powf(-0.5) * (1.0 / omega).exp(),
            coarse_step: 1e-3,
            refine_iters: 40,
        }
    }

    /// `1/sqrt(gamma p)`, below which the threshold is zero.
    pub fn opening(&self) -> f64 {
        1.0 / (self.gamma * self.p).sqrt()
    }

    pub fn validate(&self) -> Result<()> {
        if !(self.gamma > 0.0 && self.gamma < 1.0) {
            return Err(Error::param("gamma", format!("{} is outside (0, 1)", self.gamma)));
        }
        if !(self.p > 0.0 && self.p <= 1.0) {
            return Err(Error::param("p", format!("{} is outside (0, 1]", self.p)));
        }
        if !(self.coarse_step > 0.0 && self.coarse_step.is_finite()) {
            return Err(Error::param("coarse_step", format!("{} must be positive", self.coarse_step)));
        }
        if !(self.theta_max > self.opening()) || !self.theta_max.is_finite() {
            return Err(Error::param(
                "theta_max",
                format!("{} must be finite and exceed 1/sqrt(gamma p) = {}", self.theta_max, self.opening()),
            ));
        }
        if self.theta_max / self.coarse_step > MAX_GRID_POINTS {
            return Err(Error::param(
                "coarse_step",
                format!("{} gives more than {MAX_GRID_POINTS:e} grid points up to theta_max", self.coarse_step),
            ));
        }
        Ok(())
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct LCDResult {
    /// Feasible `theta`, an upper bracket for the LCD; `theta_max` if capped.
    pub theta_star: f64,
    /// Infeasible point just below `theta_star`.
    pub bracket_low: f64,
    /// `theta_star - bracket_low`.
    pub resolution: f64,
    /// No feasible `theta <= theta_max` was found on the grid.
    pub capped: bool,
}

/// `sqrt(log+(sqrt(gamma p) theta) / (gamma p))`.
pub fn lcd_threshold(theta: f64, params: &LCDParams) -> f64 {
    let gp = params.gamma * params.p;
    let log_plus = (gp.sqrt() * theta).ln().max(0.0);
    (log_plus / gp).sqrt()
}

/// Euclidean distance from `y` to the integer lattice, rounding halves to even.
pub fn dist_to_lattice(y: &[f64]) -> f64 {
    y.iter()
        .map(|&v| {
            let d = v - v.round_ties_even();
            d * d
        })
        .sum::<f64>()
        .sqrt()
}

fn scaled_dist(theta: f64, x: &[f64]) -> f64 {
    x.iter()
        .map(|&v| {
            let t = theta * v;
            let d = t - t.round_ties_even();
            d * d
        })
        .sum::<f64>()
        .sqrt()
}

/// `dist(theta x, Z^n) < threshold(theta)` with the fixed slack.
pub fn is_feasible(theta: f64, x: &[f64], params: &LCDParams) -> bool {
    scaled_dist(theta, x) + FEASIBILITY_SLACK < lcd_threshold(theta, params)
}

fn check_unit(x: &[f64]) -> Result<()> {
    let norm = x.iter().map(|v| v * v).sum::<f64>().sqrt();
    if (norm - 1.0).abs() > 1e-12 {
        return Err(Error::Contract(format!("expected a unit vector, |x| = {norm}")));
    }
    Ok(())
}

/// Scans `theta = k * coarse_step` upward and bisects between the first
/// feasible grid point and its predecessor. Grid points below the threshold
/// opening are skipped since nothing is feasible there.
pub fn lcd_approx(x: &[f64], params: &LCDParams) -> Result<LCDResult> {
    params.validate()?;
    check_unit(x)?;
    let step = params.coarse_step;
    let first = ((params.opening() / step).floor() as u64).max(1);
    let last = (params.theta_max / step).floor() as u64;
    for k in first..=last {
        let theta = k as f64 * step;
        if !is_feasible(theta, x, params) {
            continue;
        }
        let mut lo = (k - 1) as f64 * step;
        let mut hi = theta;
        for _ in 0..params.refine_iters {
            let mid = 0.5 * (lo + hi);
            if mid <= lo || mid >= hi {
                break;
            }
            if is_feasible(mid, x, params) {
                hi = mid;
            } else {
                lo = mid;
            }
        }
        return Ok(LCDResult {
            theta_star: hi,
            bracket_low: lo,
            resolution: hi - lo,
            capped: false,
        });
    }
    let low = last as f64 * step;
    Ok(LCDResult {
        theta_star: params.theta_max,
        bracket_low: low.min(params.theta_max),
        resolution: params.theta_max - low.min(params.theta_max),
        capped: true,
    })
}

/// `1/(2 |x|_inf)`, a lower bound for the LCD of any unit vector.
pub fn lcd_lower_bound(x: &[f64]) -> f64 {
    let inf = x.iter().fold(0.0f64, |a, v| a.max(v.abs()));
    1.0 / (2.0 * inf)
}

/// `c^2 2^-5 sqrt(n) omega^(3/2)`, the guaranteed size of the regularized LCD
/// of an incompressible vector.
pub fn regularized_lcd_lower_bound(n: usize, c_dom: f64, omega: f64) -> f64 {
    c_dom * c_dom * 2f64.powi(-5) * (n as f64).sqrt() * omega.powf(1.5)
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct RegularizedLCD {
    /// Maximum of `theta_star` over blocks `1..=k0`.
    pub value: f64,
    /// Block (1-based) attaining the maximum; the lowest index wins ties.
    pub block: usize,
    /// Result per block; entry `k - 1` belongs to `I_k`.
    pub per_block: Vec<LCDResult>,
    /// `min_k |v_{I_k}| / (2 |v_{I_k}|_inf)` over the blocks.
    pub block_lower_bound: f64,
}

/// Restriction `v_I / |v_I|`, or an error if `v` vanishes on `I`.
pub fn normalized_restriction(v: &[f64], block: &[usize]) -> Result<Vec<f64>> {
    let norm = block.iter().map(|&i| v[i] * v[i]).sum::<f64>().sqrt();
    if norm == 0.0 {
        return Err(Error::Contract("vector vanishes on a partition block".into()));
    }
    Ok(block.iter().map(|&i| v[i] / norm).collect())
}

/// `max_{1 <= k <= k0} D(v_{I_k} / |v_{I_k}|)`. `I_0` is not included.
pub fn regularized_lcd(v: &[f64], partition: &Partition, params: &LCDParams) -> Result<RegularizedLCD> {
    params.validate()?;
    let mut per_block = Vec::with_capacity(partition.k0);
    let mut lower = f64::INFINITY;
    for block in &partition.blocks[1..] {
        let x = normalized_restriction(v, block)?;
        lower = lower.min(lcd_lower_bound(&x));
        per_block.push(lcd_approx(&x, params)?);
    }
    let (mut best, mut value) = (0, f64::NEG_INFINITY);
    for (k, r) in per_block.iter().enumerate() {
        if r.theta_star > value {
            value = r.theta_star;
            best = k;
        }
    }
    Ok(RegularizedLCD {
        value,
        block: best + 1,
        per_block,
        block_lower_bound: lower,
    })
}
