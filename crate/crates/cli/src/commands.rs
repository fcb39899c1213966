//! One function per subcommand. Each returns a [`Report`] and never writes
//! to disk itself.

use std::path::Path;

use anyhow::{bail, Context, Result};
use gaplab::concentration::small_ball_experiment;
use gaplab::eigen::{eig_sym, spectral_radius};
use gaplab::ensemble::EnsembleKind;
use gaplab::geometry::{partition_indices, GeometryParams, Verdict};
use gaplab::lcd::{lcd_approx, lcd_lower_bound, normalized_restriction, LCDParams};
use gaplab::matrix::SymMatrix;
use gaplab::nodal::{nodal_experiment, nodal_report, Graph};
use gaplab::stats::{gap_report, gap_tail_experiment, simple_spectrum_check, trial_records, TrialRecord};
use gaplab::structure::{analyze_vector, eigenvector_structure_experiment, VectorRow};
use gaplab::trials::{run_trials, TrialBatch};
use serde_json::json;

use crate::config::{EnsembleChoice, Settings};
use crate::output::{Check, Report, TrialLog};

fn read(path: &Path) -> Result<String> {
    std::fs::read_to_string(path).with_context(|| format!("reading {}", path.display()))
}

/// One vector per line, entries separated by whitespace or commas; every
/// vector is scaled to unit length.
pub fn read_vectors(path: &Path) -> Result<Vec<Vec<f64>>> {
    let text = read(path)?;
    let mut out = Vec::new();
    for (k, line) in text.lines().enumerate() {
        let line = line.trim();
        if line.is_empty() || line.starts_with('#') {
            continue;
        }
        let v: Vec<f64> = line
            .split(|c: char| c == ',' || c.is_whitespace())
            .filter(|t| !t.is_empty())
            .map(|t| t.parse::<f64>().with_context(|| format!("{} line {}: bad value `{t}`", path.display(), k + 1)))
            .collect::<Result<_>>()?;
        let norm = v.iter().map(|x| x * x).sum::<f64>().sqrt();
        if !(norm > 0.0 && norm.is_finite()) {
            bail!("{} line {}: vector must be nonzero and finite", path.display(), k + 1);
        }
        out.push(v.into_iter().map(|x| x / norm).collect());
    }
    if out.is_empty() {
        bail!("{} contains no vectors", path.display());
    }
    Ok(out)
}

pub fn dyadic_grid() -> Vec<f64> {
    (-6..=1).map(|k| 2f64.powi(k)).collect()
}

pub fn default_eps_grid() -> Vec<f64> {
    vec![0.01, 0.02, 0.05, 0.1, 0.2, 0.5, 1.0]
}

fn monotone_in_unit_interval(values: &[f64]) -> bool {
    values.iter().all(|v| (0.0..=1.0).contains(v)) && values.windows(2).all(|w| w[0] <= w[1])
}

pub fn gen(s: &Settings) -> Result<Report> {
    let spec = s.spec(100, 0.1, EnsembleChoice::Sparse)?;
    let m = spec.generate()?;
    Ok(Report::new("matrix.txt", m.to_text()).details(json!({ "ensemble": spec })))
}

pub fn spectrum(s: &Settings, input: Option<&Path>) -> Result<Report> {
    let (m, p, source) = match input {
        Some(path) => (SymMatrix::from_text(&read(path)?)?, s.p_or(1.0), json!({ "input": path })),
        None => {
            let spec = s.spec(100, 0.1, EnsembleChoice::Sparse)?;
            (spec.generate()?, spec.p, json!({ "ensemble": spec }))
        }
    };
    let eig = eig_sym(&m)?;
    let op = spectral_radius(eig.eigenvalues());
    let gaps = gap_report(&eig, p)?;
    let simple = simple_spectrum_check(eig.eigenvalues(), op, s.constants.tol_factor);
    let summary = format!(
        "n,min_gap,max_gap,min_gap_index,op_norm,simple_spectrum\n{},{},{},{},{},{}\n",
        eig.n(),
        gaps.min_gap,
        gaps.max_gap,
        gaps.min_gap_index,
        op,
        simple
    );
    Ok(Report::new("spectrum.txt", eig.to_text())
        .file("summary.csv", summary)
        .details(source))
}

/// Gap-tail table in long form (`index,delta,frequency`), the supremum over
/// indices, and a trial log.
pub fn gaps(
    s: &Settings,
    defaults: (usize, f64, usize),
    indices: Option<Vec<usize>>,
    deltas: Option<Vec<f64>>,
) -> Result<Report> {
    let spec = s.spec(defaults.0, defaults.1, EnsembleChoice::Sparse)?;
    let trials = s.trials_or(defaults.2);
    let indices = indices.unwrap_or_else(|| vec![spec.n / 2]);
    let deltas = deltas.unwrap_or_else(dyadic_grid);
    let table = gap_tail_experiment(&spec, trials, &deltas, &indices)?;

    let mut summary = String::from("index,delta,frequency\n");
    for (a, i) in table.indices.iter().enumerate() {
        for (b, d) in deltas.iter().enumerate() {
            summary.push_str(&format!("{i},{d},{}\n", table.frequency[a][b]));
        }
    }
    let mut sup = String::from("delta,sup_selected,sup_all\n");
    for (b, d) in deltas.iter().enumerate() {
        sup.push_str(&format!("{d},{},{}\n", table.sup_selected[b], table.sup_all[b]));
    }
    let monotone = table.frequency.iter().all(|row| monotone_in_unit_interval(row));
    let (log, trial_log, _) = trial_log(&spec, trials, s.constants.tol_factor)?;
    let mut report = Report::new("summary.csv", summary)
        .file("sup.csv", sup)
        .file("trials.jsonl", log)
        .details(json!({
            "ensemble": spec,
            "trials": trials,
            "indices": indices,
            "deltas": deltas,
            "unit": table.unit,
            "completed": table.completed,
            "failed": table.failed,
        }))
        .check(Check::new("frequencies monotone in delta", monotone, ""));
    report.trial_log = Some(trial_log);
    Ok(report)
}

pub fn trial_log(
    spec: &gaplab::ensemble::EnsembleSpec,
    trials: usize,
    tol_factor: f64,
) -> Result<(String, TrialLog, TrialBatch<TrialRecord>)> {
    let batch = trial_records(spec, trials, tol_factor)?;
    let mut out = String::new();
    for record in batch.values() {
        out.push_str(&record.to_json_line());
        out.push('\n');
    }
    for (t, e) in &batch.failed {
        eprintln!("trial {t} (seed {}) failed: {e}", gaplab::rng::trial_seed(spec.master_seed, *t));
    }
    let log = TrialLog {
        file: "trials.jsonl".into(),
        ensemble: *spec,
        tol_factor,
    };
    Ok((out, log, batch))
}

fn lcd_row(id: usize, block: usize, x: &[f64], params: &LCDParams) -> Result<(String, bool)> {
    let r = lcd_approx(x, params)?;
    let bound_ok = r.capped || r.theta_star >= lcd_lower_bound(x);
    Ok((format!("{id},{block},{},{},{}\n", r.theta_star, r.capped, bound_ok), bound_ok))
}

/// Eigenvector `i` for every `stride`-th index, over `trials` matrices, as
/// `(vector_id, trial, index, vector)` in a fixed order.
fn eigenvectors(s: &Settings, spec: &gaplab::ensemble::EnsembleSpec, stride: usize) -> Result<Vec<(usize, u64, usize, Vec<f64>)>> {
    let trials = s.trials_or(1);
    let stride = stride.max(1);
    let batch = run_trials(spec.master_seed, 0, trials, |_, seed| {
        let eig = eig_sym(&spec.with_seed(seed).generate()?)?;
        Ok((0..spec.n).step_by(stride).map(|i| (i, eig.vector(i).to_vec())).collect::<Vec<_>>())
    });
    batch.require_any()?;
    let mut out = Vec::new();
    for (t, vectors) in &batch.ok {
        for (i, v) in vectors {
            out.push((out.len(), *t, *i, v.clone()));
        }
    }
    Ok(out)
}

pub fn lcd(s: &Settings, input: Option<&Path>, stride: usize) -> Result<Report> {
    let mut csv = String::from("vector_id,block,theta_star,capped,lower_bound_check\n");
    let mut all_ok = true;
    let details;
    if let Some(path) = input {
        let p = s.p_or(0.3);
        let params = s.lcd_params(p);
        for (id, x) in read_vectors(path)?.iter().enumerate() {
            let (row, ok) = lcd_row(id, 0, x, &params)?;
            csv.push_str(&row);
            all_ok &= ok;
        }
        details = json!({ "input": path, "lcd": params });
    } else {
        let spec = s.spec(200, 0.3, EnsembleChoice::Sparse)?;
        let params = s.lcd_params(spec.p);
        let geometry = s.geometry(spec.n, spec.p)?;
        for (id, _, _, v) in eigenvectors(s, &spec, stride)? {
            let class = gaplab::geometry::classify(&v, &geometry)?;
            if class.verdict != Verdict::Incompressible {
                continue;
            }
            let partition = partition_indices(&v, &geometry)?;
            for (k, block) in partition.blocks.iter().enumerate().skip(1) {
                let x = normalized_restriction(&v, block)?;
                let (row, ok) = lcd_row(id, k, &x, &params)?;
                csv.push_str(&row);
                all_ok &= ok;
            }
        }
        details = json!({ "ensemble": spec, "trials": s.trials_or(1), "stride": stride, "geometry": geometry, "lcd": params });
    }
    Ok(Report::new("lcd.csv", csv)
        .details(details)
        .check(Check::new("theta_star >= 1/(2 |x|_inf)", all_ok, "")))
}

pub fn classify(s: &Settings, input: Option<&Path>, stride: usize) -> Result<Report> {
    if let Some(path) = input {
        let vectors = read_vectors(path)?;
        let p = s.p_or(0.3);
        let mut csv = format!("{}\n", VectorRow::csv_header());
        let mut params: Option<GeometryParams> = None;
        for (id, v) in vectors.iter().enumerate() {
            let geometry = s.geometry(v.len(), p)?;
            let row = analyze_vector(v, &geometry, None, 0, id)?;
            csv.push_str(&row.csv_row(id));
            csv.push('\n');
            params.get_or_insert(geometry);
        }
        return Ok(Report::new("classification.csv", csv).details(json!({ "input": path, "geometry": params })));
    }
    let spec = s.spec(200, 0.3, EnsembleChoice::Sparse)?;
    let geometry = s.geometry(spec.n, spec.p)?;
    let trials = s.trials_or(1);
    let table = eigenvector_structure_experiment(&spec, trials, stride, &geometry, None)?;
    Ok(Report::new("classification.csv", table.classification_csv())
        .details(json!({
            "ensemble": spec,
            "trials": trials,
            "stride": stride,
            "geometry": geometry,
            "incompressible": table.incompressible,
        }))
        .check(Check::new(
            "partition inequalities",
            table.holding == table.incompressible,
            format!("{} of {} incompressible vectors", table.holding, table.incompressible),
        )))
}

pub fn nodal(s: &Settings, edges: Option<&Path>) -> Result<Report> {
    if let Some(path) = edges {
        let g = Graph::parse_edge_list(&read(path)?, s.n)?;
        let eig = eig_sym(&g.to_adjacency())?;
        let zeta = s.zeta_rule();
        let mut csv = String::from("eigen_index,weak_count,strong_count,zero_count,weak_eq_strong\n");
        for i in 0..g.n() {
            let v = eig.vector(i);
            let r = nodal_report(&g, v, zeta.resolve(v))?;
            csv.push_str(&format!(
                "{i},{},{},{},{}\n",
                r.weak_domains.len(),
                r.strong_domains.len(),
                r.zero_vertices.len(),
                r.weak_eq_strong
            ));
        }
        return Ok(Report::new("nodal.csv", csv)
            .details(json!({ "edges": path, "n": g.n(), "edge_count": g.edge_count(), "zeta": zeta })));
    }
    let spec = s.spec(300, 0.2, EnsembleChoice::Er)?;
    if spec.kind != EnsembleKind::ErdosRenyiAdjacency {
        bail!("invalid parameter `ensemble`: nodal experiments need `er`");
    }
    let trials = s.trials_or(20);
    let zeta = s.zeta_rule();
    let table = nodal_experiment(&spec, trials, zeta)?;
    Ok(Report::new("summary.csv", table.summary_csv())
        .file("nodal.csv", table.rows_csv())
        .details(json!({ "ensemble": spec, "trials": trials, "zeta": zeta }))
        .check(Check::new(
            "weak equals strong",
            table.weak_eq_strong_freq >= 0.95,
            format!("frequency {}", table.weak_eq_strong_freq),
        ))
        .check(Check::new(
            "two strong domains",
            table.two_domain_freq >= 0.95,
            format!("frequency {}", table.two_domain_freq),
        )))
}

pub fn smallball(s: &Settings, vector: &str, eps: Option<Vec<f64>>) -> Result<Report> {
    if s.ensemble == Some(EnsembleChoice::Er) {
        bail!("invalid parameter `ensemble`: small-ball experiments use the sparse model");
    }
    let spec = s.spec(50, 0.3, EnsembleChoice::Sparse)?;
    let n = spec.n;
    let w = match vector {
        "uniform" => vec![1.0 / (n as f64).sqrt(); n],
        "e1" => {
            let mut w = vec![0.0; n];
            w[0] = 1.0;
            w
        }
        path => {
            let v = read_vectors(Path::new(path))?.swap_remove(0);
            if v.len() != n {
                bail!("vector in {path} has length {}, expected n = {n}", v.len());
            }
            v
        }
    };
    let trials = s.trials_or(100_000);
    let eps = eps.unwrap_or_else(default_eps_grid);
    let params = s.lcd_params(spec.p);
    let table = small_ball_experiment(&w, &spec, &eps, trials, &params)?;
    let levy: Vec<f64> = table.rows.iter().map(|r| r.levy).collect();
    Ok(Report::new("smallball.csv", table.to_csv())
        .details(json!({
            "ensemble": spec,
            "trials": trials,
            "vector": vector,
            "theta_star": table.theta_star,
            "lcd_capped": table.lcd_capped,
            "lcd": params,
            "max_ratio": table.max_ratio,
        }))
        .check(Check::new("levy nondecreasing in eps", monotone_in_unit_interval(&levy), ""))
        .check(Check::new(
            "ratio bounded by 20",
            table.max_ratio <= 20.0,
            format!("max ratio {}", table.max_ratio),
        )))
}
