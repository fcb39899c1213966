//! Named experiments with acceptance-scale defaults. `--n`, `--p` and
//! `--trials` override the defaults of every preset.

use anyhow::Result;
use clap::ValueEnum;
use gaplab::ensemble::EntryDistribution;
use gaplab::lcd::{is_feasible, lcd_approx, lcd_lower_bound};
use gaplab::rng::{derive_stream_rng, streams};
use gaplab::stats::{
    interlacing_experiment, min_gap_scaling_experiment, nondegeneration_experiment, operator_norm_experiment,
};
use gaplab::structure::eigenvector_structure_experiment;
use gaplab::trials::run_trials;
use serde_json::json;

use crate::commands;
use crate::config::{EnsembleChoice, Settings};
use crate::output::{Check, Report};

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum Preset {
    /// Eigenvalues of a random principal minor interlace (n=50, p=0.3)
    Interlacing,
    /// Every spectrum is simple (n=400, p=0.1)
    SimpleSpectrum,
    /// Minimum gap against n (p=0.5, n=100,200,400)
    MinGap,
    /// |M| / sqrt(pn) (n=300, p=0.2)
    OperatorNorm,
    /// Gap tail frequencies (n=200, p=0.5)
    GapTail,
    /// Smallest eigenvector coordinate (n=300, p=0.2)
    Nondegeneration,
    /// Nodal domains of G(n, p) (n=300, p=0.2)
    Nodal,
    /// Small-ball probability of the uniform direction (n=50, p=0.3)
    Smallball,
    /// Partition inequalities on eigenvectors (n=200, p=0.3)
    Structure,
    /// LCD soundness on random unit vectors (n=20)
    Lcd,
}

pub fn run(s: &Settings, preset: Preset, ns: Option<Vec<usize>>, deltas: Option<Vec<f64>>, eps: Option<Vec<f64>>) -> Result<Report> {
    match preset {
        Preset::Interlacing => interlacing(s),
        Preset::SimpleSpectrum => simple_spectrum(s),
        Preset::MinGap => min_gap(s, ns),
        Preset::OperatorNorm => operator_norm(s),
        Preset::GapTail => commands::gaps(s, (200, 0.5, 500), None, deltas),
        Preset::Nondegeneration => nondegeneration(s),
        Preset::Nodal => commands::nodal(s, None),
        Preset::Smallball => commands::smallball(s, "uniform", eps),
        Preset::Structure => structure(s),
        Preset::Lcd => lcd_soundness(s),
    }
}

fn interlacing(s: &Settings) -> Result<Report> {
    let spec = s.spec(50, 0.3, EnsembleChoice::Sparse)?;
    let trials = s.trials_or(1000);
    let slack = 1e-9 * (spec.p * spec.n as f64).sqrt();
    let r = interlacing_experiment(&spec, trials, slack)?;
    let summary = format!(
        "trials,holding,max_violation,slack,failed\n{},{},{},{},{}\n",
        r.trials, r.holding, r.max_violation, r.slack, r.failed
    );
    Ok(Report::new("summary.csv", summary)
        .details(json!({ "ensemble": spec, "trials": trials, "slack": slack }))
        .check(Check::new(
            "interlacing holds in every trial",
            r.holding == r.trials && r.failed == 0,
            format!("{} of {}", r.holding, r.trials),
        )))
}

fn simple_spectrum(s: &Settings) -> Result<Report> {
    let spec = s.spec(400, 0.1, EnsembleChoice::Sparse)?;
    let trials = s.trials_or(500);
    let tol = s.constants.tol_factor;
    let (log, trial_log, batch) = commands::trial_log(&spec, trials, tol)?;
    let simple = batch.values().filter(|r| r.simple_spectrum).count();
    let done = batch.completed();
    let summary = format!(
        "trials,simple,fraction_simple,failed\n{done},{simple},{},{}\n",
        simple as f64 / done.max(1) as f64,
        batch.failed.len()
    );
    let mut report = Report::new("summary.csv", summary)
        .file("trials.jsonl", log)
        .details(json!({ "ensemble": spec, "trials": trials, "tol_factor": tol }))
        .check(Check::new(
            "every spectrum simple",
            simple == done && batch.failed.is_empty(),
            format!("{simple} of {done}"),
        ));
    report.trial_log = Some(trial_log);
    Ok(report)
}

fn min_gap(s: &Settings, ns: Option<Vec<usize>>) -> Result<Report> {
    let p = s.p_or(0.5);
    let ns = ns.unwrap_or_else(|| vec![100, 200, 400]);
    let trials = s.trials_or(200);
    let t = min_gap_scaling_experiment(p, &ns, trials, s.dist, s.seed)?;
    let worst = t.rows.iter().map(|r| r.fraction_below).fold(0.0, f64::max);
    let decreasing = t.rows.windows(2).all(|w| w[1].median_min_gap < w[0].median_min_gap);
    Ok(Report::new("summary.csv", t.to_csv())
        .file("fit.csv", format!("p,slope\n{p},{}\n", t.slope))
        .details(json!({ "p": p, "ns": ns, "trials": trials, "dist": s.dist, "slope": t.slope }))
        .check(Check::new(
            "fraction below sqrt(p) n^-3/2 at most 5%",
            worst <= 0.05,
            format!("worst {worst}"),
        ))
        .check(Check::new(
            "slope in [-1.6, -0.6]",
            (-1.6..=-0.6).contains(&t.slope),
            format!("slope {}", t.slope),
        ))
        .check(Check::new("medians decrease in n", decreasing, "")))
}

fn operator_norm(s: &Settings) -> Result<Report> {
    let spec = s.spec(300, 0.2, EnsembleChoice::Sparse)?;
    let trials = s.trials_or(200);
    let k = s.constants.k_norm;
    let t = operator_norm_experiment(&spec, trials, k)?;
    let mut ratios = String::from("trial,ratio\n");
    for (i, r) in t.ratios.iter().enumerate() {
        ratios.push_str(&format!("{i},{r}\n"));
    }
    Ok(Report::new("summary.csv", t.to_csv())
        .file("ratios.csv", ratios)
        .details(json!({ "ensemble": spec, "trials": trials, "k_norm": k }))
        .check(Check::new("max ratio at most k_norm", t.holds, format!("max {}", t.max))))
}

fn nondegeneration(s: &Settings) -> Result<Report> {
    let spec = s.spec(300, 0.2, EnsembleChoice::Sparse)?;
    let trials = s.trials_or(100);
    let c = s.constants.exponent;
    let t = nondegeneration_experiment(&spec, trials, c)?;
    let summary = format!(
        "trials,threshold,fraction_below,failed\n{},{},{},{}\n",
        t.min_abs_coord.len(),
        t.threshold,
        t.fraction_below,
        t.failed
    );
    let bound = 1.0 / (spec.n as f64).sqrt();
    Ok(Report::new("summary.csv", summary)
        .file("min_abs.csv", t.to_csv())
        .details(json!({ "ensemble": spec, "trials": trials, "exponent": c }))
        .check(Check::new(
            "fraction below n^-C at most 5%",
            t.fraction_below <= 0.05,
            format!("fraction {}", t.fraction_below),
        ))
        .check(Check::new(
            "min coordinate at most 1/sqrt(n)",
            t.min_abs_coord.iter().all(|&m| m <= bound),
            "",
        )))
}

fn structure(s: &Settings) -> Result<Report> {
    let spec = s.spec(200, 0.3, EnsembleChoice::Sparse)?;
    let trials = s.trials_or(3);
    let geometry = s.geometry(spec.n, spec.p)?;
    let lcd = s.lcd_params(spec.p);
    let t = eigenvector_structure_experiment(&spec, trials, 1, &geometry, Some(&lcd))?;
    let summary = format!(
        "vectors,incompressible,holding,failed\n{},{},{},{}\n",
        t.rows.len(),
        t.incompressible,
        t.holding,
        t.failed
    );
    Ok(Report::new("summary.csv", summary)
        .file("classification.csv", t.classification_csv())
        .details(json!({ "ensemble": spec, "trials": trials, "geometry": geometry, "lcd": lcd }))
        .check(Check::new(
            "partition and regularized LCD inequalities",
            t.holding == t.incompressible,
            format!("{} of {}", t.holding, t.incompressible),
        )))
}

fn lcd_soundness(s: &Settings) -> Result<Report> {
    let n = s.n_or(20);
    let p = s.p_or(0.3);
    let count = s.trials_or(10_000);
    let params = s.lcd_params(p);
    params.validate()?;
    let batch = run_trials(s.seed, 0, count, |_, seed| {
        let mut rng = derive_stream_rng(seed, streams::VECTOR);
        let mut x: Vec<f64> = (0..n).map(|_| EntryDistribution::StandardGaussian.sample(&mut rng)).collect();
        let norm = x.iter().map(|v| v * v).sum::<f64>().sqrt();
        x.iter_mut().for_each(|v| *v /= norm);
        let r = lcd_approx(&x, &params)?;
        Ok((r.capped, is_feasible(r.theta_star, &x, &params), r.theta_star >= lcd_lower_bound(&x)))
    });
    batch.require_any()?;
    let capped = batch.values().filter(|r| r.0).count();
    let open: Vec<_> = batch.values().filter(|r| !r.0).collect();
    let feasible = open.iter().filter(|r| r.1).count();
    let above = open.iter().filter(|r| r.2).count();
    let summary = format!(
        "vectors,capped,feasible,above_bound,failed\n{},{capped},{feasible},{above},{}\n",
        batch.completed(),
        batch.failed.len()
    );
    Ok(Report::new("summary.csv", summary)
        .details(json!({ "n": n, "p": p, "vectors": count, "lcd": params }))
        .check(Check::new("theta_star feasible", feasible == open.len(), format!("{feasible} of {}", open.len())))
        .check(Check::new(
            "theta_star >= 1/(2 |x|_inf)",
            above == open.len(),
            format!("{above} of {}", open.len()),
        )))
}
