//! Sweep over eigenvectors of random matrices that classifies each one and,
//! for incompressible vectors, checks the block partition inequalities and
//! computes the regularized LCD.

use serde::Serialize;

use crate::eigen::eig_sym;
use crate::ensemble::EnsembleSpec;
use crate::error::{Error, Result};
use crate::geometry::{
    classify, incomp_spread_count, k0_bounds_hold, large_coordinate_set, level_block_norm_check, partition_indices,
    GeometryParams, Verdict,
};
use crate::lcd::{regularized_lcd, regularized_lcd_lower_bound, LCDParams};
use crate::trials::run_trials;

/// Per-vector outcome. The lemma flags are `None` for vectors that are not
/// incompressible.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct VectorRow {
    pub trial: u64,
    pub eigen_index: usize,
    pub verdict: Verdict,
    pub level: Option<u32>,
    pub tail_norm: f64,
    pub tail_inf: f64,
    pub sigma_size: Option<usize>,
    pub k0: Option<usize>,
    /// `|sigma(v)| >= c^2 m / 8`.
    pub large_set_ok: Option<bool>,
    /// Two-sided bound on every `|v_{I_k}|`.
    pub block_norms_ok: Option<bool>,
    /// `1/(2 omega) <= k0 <= 1/omega`.
    pub k0_bounds_ok: Option<bool>,
    /// Spread coordinate count at least `m rho^2 / 2`.
    pub spread_ok: Option<bool>,
    pub regularized_lcd: Option<f64>,
    /// Regularized LCD at least `c^2 2^-5 sqrt(n) omega^(3/2)`.
    pub regularized_lcd_ok: Option<bool>,
}

impl VectorRow {
    /// Whether every checked inequality held (vacuously true when unchecked).
    pub fn all_hold(&self) -> bool {
        [
            self.large_set_ok,
            self.block_norms_ok,
            self.k0_bounds_ok,
            self.spread_ok,
            self.regularized_lcd_ok,
        ]
        .iter()
        .all(|f| f.unwrap_or(true))
    }

    pub fn csv_header() -> &'static str {
        "vector_id,verdict,level_j,tail_norm,tail_inf,sigma_size,k0"
    }

    /// Classification report row; `level_j`, `sigma_size` and `k0` are 0 for
    /// vectors that are not incompressible.
    pub fn csv_row(&self, vector_id: usize) -> String {
        format!(
            "{vector_id},{},{},{},{},{},{}",
            self.verdict.as_str(),
            self.level.unwrap_or(0),
            self.tail_norm,
            self.tail_inf,
            self.sigma_size.unwrap_or(0),
            self.k0.unwrap_or(0)
        )
    }
}

/// Classifies `v` and runs every check that applies to it.
pub fn analyze_vector(
    v: &[f64],
    geometry: &GeometryParams,
    lcd: Option<&LCDParams>,
    trial: u64,
    eigen_index: usize,
) -> Result<VectorRow> {
    let class = classify(v, geometry)?;
    let mut row = VectorRow {
        trial,
        eigen_index,
        verdict: class.verdict,
        level: class.level,
        tail_norm: class.tail_norm,
        tail_inf: class.tail_inf,
        sigma_size: None,
        k0: None,
        large_set_ok: None,
        block_norms_ok: None,
        k0_bounds_ok: None,
        spread_ok: None,
        regularized_lcd: None,
        regularized_lcd_ok: None,
    };
    if class.verdict != Verdict::Incompressible {
        return Ok(row);
    }
    let contract_ok = |r: Result<usize>| -> Result<(bool, Option<usize>)> {
        match r {
            Ok(k) => Ok((true, Some(k))),
            Err(Error::Contract(_)) => Ok((false, None)),
            Err(e) => Err(e),
        }
    };
    let (large_ok, sigma) = contract_ok(large_coordinate_set(v, geometry).map(|s| s.len()))?;
    row.large_set_ok = Some(large_ok);
    row.sigma_size = sigma;
    row.spread_ok = Some(contract_ok(incomp_spread_count(v, geometry.m, geometry.rho))?.0);
    if !large_ok {
        return Ok(row);
    }
    let partition = partition_indices(v, geometry)?;
    row.k0 = Some(partition.k0);
    row.k0_bounds_ok = Some(k0_bounds_hold(partition.k0, geometry.omega));
    row.block_norms_ok = Some(level_block_norm_check(v, &partition, geometry).holds);
    if let Some(params) = lcd {
        let reg = regularized_lcd(v, &partition, params)?;
        let bound = regularized_lcd_lower_bound(v.len(), geometry.c_dom, geometry.omega);
        row.regularized_lcd_ok = Some(reg.value >= bound);
        row.regularized_lcd = Some(reg.value);
    }
    Ok(row)
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct StructureTable {
    pub rows: Vec<VectorRow>,
    pub incompressible: usize,
    /// Incompressible vectors for which every inequality held.
    pub holding: usize,
    pub failed: usize,
}

impl StructureTable {
    pub fn classification_csv(&self) -> String {
        let mut out = format!("{}\n", VectorRow::csv_header());
        for (k, r) in self.rows.iter().enumerate() {
            out.push_str(&r.csv_row(k));
            out.push('\n');
        }
        out
    }
}

/// Every `stride`-th eigenvector (ascending order) of `trials` matrices.
pub fn eigenvector_structure_experiment(
    spec: &EnsembleSpec,
    trials: usize,
    stride: usize,
    geometry: &GeometryParams,
    lcd: Option<&LCDParams>,
) -> Result<StructureTable> {
    spec.validate()?;
    geometry.validate(spec.n)?;
    if let Some(p) = lcd {
        p.validate()?;
    }
    let stride = stride.max(1);
    let batch = run_trials(spec.master_seed, 0, trials, |t, seed| {
        let eig = eig_sym(&spec.with_seed(seed).generate()?)?;
        (0..spec.n)
            .step_by(stride)
            .map(|i| analyze_vector(eig.vector(i), geometry, lcd, t, i))
            .collect::<Result<Vec<_>>>()
    });
    batch.require_any()?;
    let rows: Vec<VectorRow> = batch.values().flatten().cloned().collect();
    let incompressible = rows.iter().filter(|r| r.verdict == Verdict::Incompressible).count();
    let holding = rows
        .iter()
        .filter(|r| r.verdict == Verdict::Incompressible && r.all_hold())
        .count();
    Ok(StructureTable {
        rows,
        incompressible,
        holding,
        failed: batch.failed.len(),
    })
}
