//! Gap statistics and the Monte Carlo experiments built on them.

use serde::{Deserialize, Serialize};

use crate::eigen::{eig_sym, eigvals_sym, gaps, interlacing_from_eigenvalues, spectral_radius, Spectrum};
use crate::ensemble::{EnsembleSpec, EntryDistribution};
use crate::error::{Error, Result};
use crate::rng::{derive_stream_rng, streams, trial_seed};
use crate::trials::{run_trials, TrialBatch};

/// Default relative tolerance below which two eigenvalues count as equal.
pub const DEFAULT_TOL_FACTOR: f64 = 1e-8;

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct GapReport {
    pub gaps: Vec<f64>,
    pub min_gap: f64,
    pub max_gap: f64,
    /// 0-based position of the smallest gap in `gaps`.
    pub min_gap_index: usize,
    /// `sqrt(p / n)`.
    pub scale: f64,
}

pub fn gap_report(spec: &Spectrum, p: f64) -> Result<GapReport> {
    gap_report_from_eigenvalues(spec.eigenvalues(), p)
}

pub fn gap_report_from_eigenvalues(eigenvalues: &[f64], p: f64) -> Result<GapReport> {
    let n = eigenvalues.len();
    if n < 2 {
        return Err(Error::param("n", format!("need at least two eigenvalues, got {n}")));
    }
    let g = gaps(eigenvalues);
    let (mut min_gap, mut min_gap_index, mut max_gap) = (f64::INFINITY, 0, f64::NEG_INFINITY);
    for (i, &d) in g.iter().enumerate() {
        if d < min_gap {
            min_gap = d;
            min_gap_index = i;
        }
        max_gap = max_gap.max(d);
    }
    Ok(GapReport {
        gaps: g,
        min_gap,
        max_gap,
        min_gap_index,
        scale: (p / n as f64).sqrt(),
    })
}

/// Whether every gap exceeds `tol_factor * max(1, op_norm)`.
pub fn simple_spectrum_check(eigenvalues: &[f64], op_norm: f64, tol_factor: f64) -> bool {
    let tol = tol_factor * op_norm.max(1.0);
    gaps(eigenvalues).iter().all(|&d| d > tol)
}

/// One line of the trial log.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TrialRecord {
    pub trial_id: u64,
    pub seed: u64,
    pub n: usize,
    pub p: f64,
    pub min_gap: f64,
    pub op_norm: f64,
    /// Smallest `|v_i|` over all eigenvectors and coordinates.
    pub min_abs_coord: f64,
    pub simple_spectrum: bool,
}

impl TrialRecord {
    pub fn to_json_line(&self) -> String {
        serde_json::to_string(self).expect("trial records always serialize")
    }
}

/// Regenerates trial `trial_id` of `spec` from scratch. The matrix is drawn
/// from the trial's own seed, so any trial can be replayed alone.
pub fn trial_record(spec: &EnsembleSpec, trial_id: u64, tol_factor: f64) -> Result<TrialRecord> {
    let seed = trial_seed(spec.master_seed, trial_id);
    record_for_seed(spec, trial_id, seed, tol_factor)
}

fn record_for_seed(spec: &EnsembleSpec, trial_id: u64, seed: u64, tol_factor: f64) -> Result<TrialRecord> {
    let m = spec.with_seed(seed).generate()?;
    let eig = eig_sym(&m)?;
    let report = gap_report(&eig, spec.p)?;
    let op_norm = spectral_radius(eig.eigenvalues());
    Ok(TrialRecord {
        trial_id,
        seed,
        n: spec.n,
        p: spec.p,
        min_gap: report.min_gap,
        op_norm,
        min_abs_coord: min_abs_coordinate(&eig),
        simple_spectrum: simple_spectrum_check(eig.eigenvalues(), op_norm, tol_factor),
    })
}

pub fn min_abs_coordinate(spec: &Spectrum) -> f64 {
    spec.vectors()
        .flat_map(|v| v.iter().map(|x| x.abs()))
        .fold(f64::INFINITY, f64::min)
}

/// Trial records for trials `0..trials`, in order.
pub fn trial_records(spec: &EnsembleSpec, trials: usize, tol_factor: f64) -> Result<TrialBatch<TrialRecord>> {
    spec.validate()?;
    Ok(run_trials(spec.master_seed, 0, trials, |t, seed| {
        record_for_seed(spec, t, seed, tol_factor)
    }))
}

/// Eigenvalues of the matrix of every trial; failures are kept in the batch.
fn eigenvalue_trials(spec: &EnsembleSpec, id_base: u64, trials: usize) -> TrialBatch<Vec<f64>> {
    run_trials(spec.master_seed, id_base, trials, |_, seed| {
        eigvals_sym(&spec.with_seed(seed).generate()?)
    })
}

/// Type-7 quantile of sorted data.
pub fn quantile(sorted: &[f64], q: f64) -> f64 {
    assert!(!sorted.is_empty(), "quantile of empty data");
    let h = (sorted.len() - 1) as f64 * q.clamp(0.0, 1.0);
    let lo = h.floor() as usize;
    let hi = h.ceil() as usize;
    sorted[lo] + (h - lo as f64) * (sorted[hi] - sorted[lo])
}

pub fn median(values: &[f64]) -> f64 {
    let mut v = values.to_vec();
    v.sort_by(f64::total_cmp);
    quantile(&v, 0.5)
}

/// Least-squares slope of `ln y` against `ln x`.
pub fn log_log_slope(x: &[f64], y: &[f64]) -> f64 {
    let lx: Vec<f64> = x.iter().map(|v| v.ln()).collect();
    let ly: Vec<f64> = y.iter().map(|v| v.ln()).collect();
    let k = lx.len() as f64;
    let mx = lx.iter().sum::<f64>() / k;
    let my = ly.iter().sum::<f64>() / k;
    let sxy: f64 = lx.iter().zip(&ly).map(|(a, b)| (a - mx) * (b - my)).sum();
    let sxx: f64 = lx.iter().map(|a| (a - mx) * (a - mx)).sum();
    sxy / sxx
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct GapTailTable {
    pub delta_grid: Vec<f64>,
    /// Gap indices `i` (1-based, `delta_i = lambda_{i+1} - lambda_i`).
    pub indices: Vec<usize>,
    /// `frequency[a][b]`: fraction of trials with `delta_{indices[a]} <= delta_grid[b] * unit`.
    pub frequency: Vec<Vec<f64>>,
    /// Maximum of `frequency` over the chosen indices.
    pub sup_selected: Vec<f64>,
    /// Maximum over every `1 <= i <= n - 1`.
    pub sup_all: Vec<f64>,
    /// `unit_factor * sqrt(p / n)`.
    pub unit: f64,
    pub completed: usize,
    pub failed: usize,
}

impl GapTailTable {
    pub fn to_csv(&self) -> String {
        let mut out = String::from("delta");
        for i in &self.indices {
            out.push_str(&format!(",i{i}"));
        }
        out.push_str(",sup_selected,sup_all\n");
        for (b, d) in self.delta_grid.iter().enumerate() {
            out.push_str(&d.to_string());
            for row in &self.frequency {
                out.push_str(&format!(",{}", row[b]));
            }
            out.push_str(&format!(",{},{}\n", self.sup_selected[b], self.sup_all[b]));
        }
        out
    }
}

/// Empirical `P(delta_i <= delta sqrt(p/n))` for each chosen `i` and `delta`,
/// plus the supremum over `i`.
pub fn gap_tail_experiment(
    spec: &EnsembleSpec,
    trials: usize,
    delta_grid: &[f64],
    index_set: &[usize],
) -> Result<GapTailTable> {
    gap_tail_experiment_with_unit(spec, trials, delta_grid, index_set, 1.0)
}

/// As [`gap_tail_experiment`], with the gap unit multiplied by `unit_factor`.
pub fn gap_tail_experiment_with_unit(
    spec: &EnsembleSpec,
    trials: usize,
    delta_grid: &[f64],
    index_set: &[usize],
    unit_factor: f64,
) -> Result<GapTailTable> {
    spec.validate()?;
    let n = spec.n;
    if let Some(&bad) = index_set.iter().find(|&&i| i == 0 || i >= n) {
        return Err(Error::IndexOutOfRange { index: bad, len: n });
    }
    let batch = eigenvalue_trials(spec, 0, trials);
    batch.require_any()?;
    let unit = unit_factor * (spec.p / n as f64).sqrt();
    let all_gaps: Vec<Vec<f64>> = batch.values().map(|ev| gaps(ev)).collect();
    let count = all_gaps.len() as f64;
    let freq_of = |i: usize, d: f64| {
        all_gaps.iter().filter(|g| g[i - 1] <= d * unit).count() as f64 / count
    };
    let frequency: Vec<Vec<f64>> = index_set
        .iter()
        .map(|&i| delta_grid.iter().map(|&d| freq_of(i, d)).collect())
        .collect();
    let sup_selected = (0..delta_grid.len())
        .map(|b| frequency.iter().map(|row| row[b]).fold(0.0, f64::max))
        .collect();
    let sup_all = delta_grid
        .iter()
        .map(|&d| (1..n).map(|i| freq_of(i, d)).fold(0.0, f64::max))
        .collect();
    Ok(GapTailTable {
        delta_grid: delta_grid.to_vec(),
        indices: index_set.to_vec(),
        frequency,
        sup_selected,
        sup_all,
        unit,
        completed: batch.completed(),
        failed: batch.failed.len(),
    })
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct MinGapRow {
    pub n: usize,
    pub median_min_gap: f64,
    /// Fraction of trials with `min_gap <= sqrt(p) n^(-3/2)`.
    pub fraction_below: f64,
    pub completed: usize,
    pub failed: usize,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct MinGapScaling {
    pub p: f64,
    pub rows: Vec<MinGapRow>,
    /// Least-squares slope of `ln median` against `ln n`.
    pub slope: f64,
}

impl MinGapScaling {
    pub fn to_csv(&self) -> String {
        let mut out = String::from("n,median_min_gap,fraction_below,completed,failed\n");
        for r in &self.rows {
            out.push_str(&format!(
                "{},{},{},{},{}\n",
                r.n, r.median_min_gap, r.fraction_below, r.completed, r.failed
            ));
        }
        out
    }
}

/// Trial ids of different `n` are kept apart by putting `n` in the high bits.
fn scaling_id_base(n: usize) -> u64 {
    (n as u64) << 32
}

pub fn min_gap_scaling_experiment(
    p: f64,
    n_list: &[usize],
    trials: usize,
    dist: EntryDistribution,
    master_seed: u64,
) -> Result<MinGapScaling> {
    if n_list.len() < 2 {
        return Err(Error::param("n_list", "need at least two dimensions for a slope"));
    }
    let mut rows = Vec::with_capacity(n_list.len());
    for &n in n_list {
        if n < 50 {
            return Err(Error::param("n", format!("every n must be >= 50, got {n}")));
        }
        let spec = EnsembleSpec::sparse(n, p, dist, master_seed);
        spec.validate()?;
        let batch = eigenvalue_trials(&spec, scaling_id_base(n), trials);
        batch.require_any()?;
        let mins: Vec<f64> = batch
            .values()
            .map(|ev| gaps(ev).into_iter().fold(f64::INFINITY, f64::min))
            .collect();
        let bound = p.sqrt() * (n as f64).powf(-1.5);
        rows.push(MinGapRow {
            n,
            median_min_gap: median(&mins),
            fraction_below: mins.iter().filter(|&&g| g <= bound).count() as f64 / mins.len() as f64,
            completed: batch.completed(),
            failed: batch.failed.len(),
        });
    }
    let ns: Vec<f64> = rows.iter().map(|r| r.n as f64).collect();
    let meds: Vec<f64> = rows.iter().map(|r| r.median_min_gap).collect();
    Ok(MinGapScaling {
        p,
        slope: log_log_slope(&ns, &meds),
        rows,
    })
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct OperatorNormTable {
    /// `|M| / sqrt(p n)` per completed trial.
    pub ratios: Vec<f64>,
    pub min: f64,
    pub q25: f64,
    pub median: f64,
    pub q75: f64,
    pub max: f64,
    pub k_norm: f64,
    /// `max <= k_norm`.
    pub holds: bool,
    pub failed: usize,
}

impl OperatorNormTable {
    pub fn to_csv(&self) -> String {
        format!(
            "min,q25,median,q75,max,k_norm,holds\n{},{},{},{},{},{},{}\n",
            self.min, self.q25, self.median, self.q75, self.max, self.k_norm, self.holds
        )
    }
}

pub fn operator_norm_experiment(spec: &EnsembleSpec, trials: usize, k_norm: f64) -> Result<OperatorNormTable> {
    spec.validate()?;
    let batch = eigenvalue_trials(spec, 0, trials);
    batch.require_any()?;
    let unit = (spec.p * spec.n as f64).sqrt();
    let ratios: Vec<f64> = batch.values().map(|ev| spectral_radius(ev) / unit).collect();
    let mut sorted = ratios.clone();
    sorted.sort_by(f64::total_cmp);
    let max = *sorted.last().unwrap();
    Ok(OperatorNormTable {
        min: sorted[0],
        q25: quantile(&sorted, 0.25),
        median: quantile(&sorted, 0.5),
        q75: quantile(&sorted, 0.75),
        max,
        k_norm,
        holds: max <= k_norm,
        ratios,
        failed: batch.failed.len(),
    })
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct NondegenerationTable {
    /// Smallest `|v_i|` over all eigenvectors, per completed trial.
    pub min_abs_coord: Vec<f64>,
    /// `n^(-exponent)`.
    pub threshold: f64,
    pub fraction_below: f64,
    pub failed: usize,
}

impl NondegenerationTable {
    pub fn to_csv(&self) -> String {
        let mut out = String::from("trial,min_abs_coord,below\n");
        for (t, &m) in self.min_abs_coord.iter().enumerate() {
            out.push_str(&format!("{t},{m},{}\n", m < self.threshold));
        }
        out
    }
}

pub fn nondegeneration_experiment(spec: &EnsembleSpec, trials: usize, exponent: f64) -> Result<NondegenerationTable> {
    spec.validate()?;
    let batch = run_trials(spec.master_seed, 0, trials, |_, seed| {
        Ok(min_abs_coordinate(&eig_sym(&spec.with_seed(seed).generate()?)?))
    });
    batch.require_any()?;
    let threshold = (spec.n as f64).powf(-exponent);
    let mins: Vec<f64> = batch.values().copied().collect();
    let below = mins.iter().filter(|&&m| m < threshold).count();
    Ok(NondegenerationTable {
        fraction_below: below as f64 / mins.len() as f64,
        min_abs_coord: mins,
        threshold,
        failed: batch.failed.len(),
    })
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct InterlacingSummary {
    pub trials: usize,
    pub holding: usize,
    pub max_violation: f64,
    pub slack: f64,
    pub failed: usize,
}

/// Interlacing between `M` and the minor with a uniformly random row and
/// column removed, checked with an absolute `slack`.
pub fn interlacing_experiment(spec: &EnsembleSpec, trials: usize, slack: f64) -> Result<InterlacingSummary> {
    spec.validate()?;
    if spec.n < 3 {
        return Err(Error::param("n", "interlacing needs n >= 3"));
    }
    let batch = run_trials(spec.master_seed, 0, trials, |_, seed| {
        let m = spec.with_seed(seed).generate()?;
        let drop = derive_stream_rng(seed, streams::INDEX).index(spec.n);
        let full = eigvals_sym(&m)?;
        let minor = eigvals_sym(&m.principal_minor(drop)?.minor)?;
        Ok(interlacing_from_eigenvalues(&full, &minor, slack))
    });
    batch.require_any()?;
    Ok(InterlacingSummary {
        trials: batch.completed(),
        holding: batch.values().filter(|r| r.holds).count(),
        max_violation: batch.values().map(|r| r.max_violation).fold(0.0, f64::max),
        slack,
        failed: batch.failed.len(),
    })
}
