//! End-to-end acceptance suite. Prints one PASS/FAIL line per criterion and
//! exits nonzero if any fails.

use std::process::ExitCode;
use std::time::{Duration, Instant};

use gaplab::concentration::{levy_concentration_scalar, small_ball_experiment};
use gaplab::eigen::{eig_sym, eigvals_sym, spectral_radius};
use gaplab::ensemble::{EnsembleSpec, EntryDistribution};
use gaplab::geometry::{GeometryParams, Verdict};
use gaplab::lcd::{is_feasible, lcd_approx, lcd_lower_bound, LCDParams};
use gaplab::matrix::SymMatrix;
use gaplab::nodal::{nodal_experiment, strong_nodal_domains, weak_nodal_domains, Graph, ZetaRule};
use gaplab::rng::{derive_stream_rng, streams, RngState};
use gaplab::stats::{
    gap_tail_experiment, interlacing_experiment, min_gap_scaling_experiment, nondegeneration_experiment,
    operator_norm_experiment, simple_spectrum_check, trial_records, DEFAULT_TOL_FACTOR,
};
use gaplab::structure::eigenvector_structure_experiment;
use gaplab::trials::{run_trials, with_threads};
use rand_distr::{Distribution, StandardNormal};

use EntryDistribution::Rademacher;

struct Outcome {
    passed: bool,
    detail: String,
}

fn outcome(passed: bool, detail: impl Into<String>) -> Outcome {
    Outcome {
        passed,
        detail: detail.into(),
    }
}

// ---- 1: eigensolver against characteristic polynomial roots ----

/// Coefficients `c[0..=n]` of `det(lambda I - A)`, lowest degree first.
fn char_poly(a: &[f64], n: usize) -> Vec<f64> {
    let mut c = vec![0.0; n + 1];
    c[n] = 1.0;
    let mut m = vec![0.0; n * n];
    for k in 1..=n {
        // M_k = A M_{k-1} + c_{n-k+1} I
        let mut next = vec![0.0; n * n];
        for i in 0..n {
            for j in 0..n {
                next[i * n + j] = (0..n).map(|l| a[i * n + l] * m[l * n + j]).sum::<f64>();
            }
            next[i * n + i] += c[n - k + 1];
        }
        m = next;
        let trace: f64 = (0..n)
            .map(|i| (0..n).map(|l| a[i * n + l] * m[l * n + i]).sum::<f64>())
            .sum();
        c[n - k] = -trace / k as f64;
    }
    c
}

fn horner(c: &[f64], x: f64) -> f64 {
    c.iter().rev().fold(0.0, |acc, &k| acc * x + k)
}

fn derivative(c: &[f64]) -> Vec<f64> {
    (1..c.len()).map(|k| k as f64 * c[k]).collect()
}

fn bisect(c: &[f64], mut lo: f64, mut hi: f64) -> f64 {
    let mut flo = horner(c, lo);
    for _ in 0..400 {
        let mid = 0.5 * (lo + hi);
        if mid <= lo || mid >= hi {
            break;
        }
        let fm = horner(c, mid);
        if fm == 0.0 {
            return mid;
        }
        if (fm > 0.0) == (flo > 0.0) {
            lo = mid;
            flo = fm;
        } else {
            hi = mid;
        }
    }
    0.5 * (lo + hi)
}

/// Real roots of a polynomial with only real roots, ascending, by bisection
/// between consecutive roots of the derivative.
fn real_roots(c: &[f64]) -> Vec<f64> {
    let deg = c.len() - 1;
    if deg == 1 {
        return vec![-c[0] / c[1]];
    }
    let bound = 1.0 + c[..deg].iter().map(|k| (k / c[deg]).abs()).fold(0.0, f64::max);
    let crit = real_roots(&derivative(c));
    let mut knots = vec![-bound];
    knots.extend(crit.iter().copied());
    knots.push(bound);
    let mut roots = Vec::new();
    for w in knots.windows(2) {
        let (fa, fb) = (horner(c, w[0]), horner(c, w[1]));
        if fa == 0.0 {
            roots.push(w[0]);
        } else if (fa > 0.0) != (fb > 0.0) && fb != 0.0 {
            roots.push(bisect(c, w[0], w[1]));
        }
    }
    if horner(c, bound) == 0.0 {
        roots.push(bound);
    }
    // double roots sit on critical points without a sign change
    let mut spare: Vec<f64> = crit.clone();
    spare.sort_by(|a, b| horner(c, *a).abs().total_cmp(&horner(c, *b).abs()));
    for x in spare {
        if roots.len() >= deg {
            break;
        }
        roots.push(x);
    }
    roots.sort_by(f64::total_cmp);
    roots
}

fn random_dense_sym(n: usize, rng: &mut RngState) -> SymMatrix {
    SymMatrix::from_upper_fn(n, |_, _| 2.0 * rng.uniform() - 1.0)
}

fn criterion_1() -> Outcome {
    let mut rng = derive_stream_rng(101, 0);
    let mut worst_root = 0.0f64;
    for t in 0..1000 {
        let n = 1 + t % 4;
        let m = random_dense_sym(n, &mut rng);
        let roots = real_roots(&char_poly(&m.to_dense(), n));
        let eigs = eigvals_sym(&m).expect("small eigensolve");
        for (a, b) in roots.iter().zip(&eigs) {
            worst_root = worst_root.max((a - b).abs());
        }
    }
    let mut worst_ratio = 0.0f64;
    let dists = [Rademacher, EntryDistribution::StandardGaussian, EntryDistribution::UniformSymmetric];
    let ps = [0.05, 0.2, 0.5, 1.0];
    for t in 0..100 {
        let spec = EnsembleSpec::sparse(300, ps[t % 4], dists[t % 3], 202).with_seed(t as u64 + 1);
        let m = spec.generate().expect("valid spec");
        let eig = eig_sym(&m).expect("eigensolve");
        let norm = spectral_radius(eig.eigenvalues());
        let err = eig
            .reconstruct()
            .iter()
            .zip(m.to_dense())
            .fold(0.0f64, |acc, (x, y)| acc.max((x - y).abs()));
        worst_ratio = worst_ratio.max(err / (1e-9 * 300.0 * norm.max(1.0)));
    }
    outcome(
        worst_root <= 1e-10 && worst_ratio <= 1.0,
        format!("max root error {worst_root:.2e}; reconstruction at {worst_ratio:.2e} of its tolerance"),
    )
}

// ---- 2: interlacing ----

fn criterion_2() -> Outcome {
    let spec = EnsembleSpec::sparse(50, 0.3, Rademacher, 2);
    let slack = 1e-9 * (0.3f64 * 50.0).sqrt();
    let r = interlacing_experiment(&spec, 1000, slack).expect("runs");
    outcome(
        r.trials == 1000 && r.holding == 1000 && r.failed == 0,
        format!("{} of {} trials hold, max violation {:.2e}", r.holding, r.trials, r.max_violation),
    )
}

// ---- 3: simple spectrum ----

fn criterion_3() -> Outcome {
    let spec = EnsembleSpec::sparse(400, 0.1, Rademacher, 3);
    let batch = run_trials(spec.master_seed, 0, 500, |_, seed| {
        let eigs = eigvals_sym(&spec.with_seed(seed).generate()?)?;
        Ok(simple_spectrum_check(&eigs, spectral_radius(&eigs), DEFAULT_TOL_FACTOR))
    });
    let simple = batch.values().filter(|&&s| s).count();
    outcome(
        simple == 500 && batch.failed.is_empty(),
        format!("{simple} of 500 spectra simple"),
    )
}

// ---- 4: minimum gap floor and scaling ----

fn criterion_4() -> Outcome {
    let t = min_gap_scaling_experiment(0.5, &[100, 200, 400], 200, Rademacher, 4).expect("runs");
    let worst = t.rows.iter().map(|r| r.fraction_below).fold(0.0, f64::max);
    let complete = t.rows.iter().all(|r| r.completed == 200);
    outcome(
        worst <= 0.05 && (-1.6..=-0.6).contains(&t.slope) && complete,
        format!("worst fraction below floor {worst}, slope {:.3}", t.slope),
    )
}

// ---- 5: operator norm ----

fn criterion_5() -> Outcome {
    let sparse = operator_norm_experiment(&EnsembleSpec::sparse(300, 0.2, Rademacher, 5), 200, 3.5).expect("runs");
    let dense = operator_norm_experiment(&EnsembleSpec::sparse(300, 1.0, Rademacher, 5), 200, 3.5).expect("runs");
    outcome(
        sparse.holds && sparse.ratios.len() == 200 && (1.8..=2.2).contains(&dense.median),
        format!("max ratio {:.4} at p = 0.2; median {:.4} at p = 1", sparse.max, dense.median),
    )
}

// ---- 6: LCD soundness ----

fn gaussian_unit(n: usize, rng: &mut RngState) -> Vec<f64> {
    let v: Vec<f64> = (0..n).map(|_| StandardNormal.sample(rng)).collect();
    let norm = v.iter().map(|x| x * x).sum::<f64>().sqrt();
    v.into_iter().map(|x| x / norm).collect()
}

fn criterion_6() -> Outcome {
    let params = LCDParams::new(0.1, 0.3, 0.1);
    let mut rng = derive_stream_rng(6, 0);
    let (mut open, mut sound) = (0, 0);
    for _ in 0..10_000 {
        let x = gaussian_unit(20, &mut rng);
        let r = lcd_approx(&x, &params).expect("valid params");
        if !r.capped {
            open += 1;
            if is_feasible(r.theta_star, &x, &params) && r.theta_star >= lcd_lower_bound(&x) {
                sound += 1;
            }
        }
    }

    // first feasible point of a 1e-5 grid against the 1e-3 scan
    let fine_step = 1e-5;
    let small = LCDParams {
        theta_max: 100.0,
        ..params
    };
    let mut bracketed = 0;
    let mut compared = 0;
    for k in 0..100 {
        let x = gaussian_unit(2 + k % 4, &mut rng);
        let r = lcd_approx(&x, &small).expect("valid params");
        let last = (small.theta_max / fine_step) as u64;
        let oracle = (1..=last).map(|j| j as f64 * fine_step).find(|&t| is_feasible(t, &x, &small));
        compared += 1;
        let ok = match oracle {
            None => r.capped,
            Some(o) => {
                !r.capped && o <= r.theta_star + fine_step && o >= r.theta_star - small.coarse_step - fine_step
            }
        };
        bracketed += ok as usize;
    }
    outcome(
        sound == open && bracketed == compared,
        format!("{sound} of {open} uncapped vectors sound; {bracketed} of {compared} inside the coarse bracket"),
    )
}

// ---- 7: partition and regularized LCD inequalities ----

fn criterion_7() -> Outcome {
    let spec = EnsembleSpec::sparse(200, 0.3, Rademacher, 7);
    let geometry = GeometryParams::for_dimension(200, 0.3, 0.1, 2.0).expect("valid geometry");
    let lcd = LCDParams::new(0.1, 0.3, 0.1);
    let t = eigenvector_structure_experiment(&spec, 3, 1, &geometry, Some(&lcd)).expect("runs");
    let incomp: Vec<_> = t
        .rows
        .iter()
        .filter(|r| r.verdict == Verdict::Incompressible)
        .take(500)
        .collect();
    let holding = incomp.iter().filter(|r| r.all_hold()).count();
    outcome(
        incomp.len() == 500 && holding == 500,
        format!("{holding} of {} incompressible eigenvectors", incomp.len()),
    )
}

// ---- 8: Levy concentration ----

fn levy_brute(samples: &[f64], eps: f64) -> f64 {
    let best = samples
        .iter()
        .map(|&a| samples.iter().filter(|&&s| s >= a && s <= a + 2.0 * eps).count())
        .max()
        .unwrap_or(0);
    best as f64 / samples.len() as f64
}

fn criterion_8() -> Outcome {
    let mut rng = derive_stream_rng(8, 0);
    let mut exact = 0;
    for k in 0..500 {
        let n = 1 + rng.index(500);
        // every other set is drawn from a small grid so ties and atoms occur
        let samples: Vec<f64> = if k % 2 == 0 {
            (0..n).map(|_| StandardNormal.sample(&mut rng)).collect()
        } else {
            (0..n).map(|_| rng.index(21) as f64 * 0.25 - 2.5).collect()
        };
        let eps = [0.0, 0.125, 0.1, 0.37, 1.0][k % 5];
        let got = levy_concentration_scalar(&samples, eps).expect("nonempty").value;
        exact += (got == levy_brute(&samples, eps)) as usize;
    }

    let n = 50;
    let trials = 100_000;
    let spec = EnsembleSpec::sparse(n, 0.3, Rademacher, 8);
    let mut w = vec![0.0; n];
    w[0] = 1.0;
    let table = small_ball_experiment(&w, &spec, &[0.01, 0.1], trials, &LCDParams::new(0.1, 0.3, 0.1)).expect("runs");
    let sigma = (0.3f64 * 0.7 / trials as f64).sqrt();
    let floor = 1.0 - 0.3 - 4.0 * sigma;
    let atom_ok = table.rows.iter().all(|r| r.levy >= floor);
    outcome(
        exact == 500 && atom_ok,
        format!(
            "{exact} of 500 sets exact; e1 concentration {:.4} against floor {floor:.4}",
            table.rows[0].levy
        ),
    )
}

// ---- 9: nodal domains ----

fn connected(mask: u32, adj: &[u32]) -> bool {
    if mask == 0 {
        return false;
    }
    let start = mask & mask.wrapping_neg();
    let mut seen = start;
    let mut frontier = start;
    while frontier != 0 {
        let i = frontier.trailing_zeros() as usize;
        frontier &= frontier - 1;
        let fresh = adj[i] & mask & !seen;
        seen |= fresh;
        frontier |= fresh;
    }
    seen == mask
}

/// Maximal connected vertex sets contained in one of `sides`, by exhaustive
/// enumeration.
fn maximal_connected(n: usize, adj: &[u32], sides: &[u32]) -> Vec<Vec<usize>> {
    let mut admissible = Vec::new();
    for mask in 1u32..(1 << n) {
        if sides.iter().any(|&s| mask & !s == 0) && connected(mask, adj) {
            admissible.push(mask);
        }
    }
    let mut out: Vec<Vec<usize>> = admissible
        .iter()
        .filter(|&&a| !admissible.iter().any(|&b| b != a && a & !b == 0))
        .map(|&a| (0..n).filter(|i| a >> i & 1 == 1).collect())
        .collect();
    out.sort();
    out
}

fn criterion_9() -> Outcome {
    let spec = EnsembleSpec::erdos_renyi(300, 0.2, 9);
    let t = nodal_experiment(&spec, 20, ZetaRule::default()).expect("runs");

    let mut rng = derive_stream_rng(9, 1);
    let mut agree = 0;
    for k in 0..200 {
        let n = 2 + rng.index(14);
        let p = 0.15 + 0.7 * rng.uniform();
        let mut edges = Vec::new();
        let mut adj = vec![0u32; n];
        for i in 0..n {
            for j in i + 1..n {
                if rng.bernoulli(p) {
                    edges.push((i, j));
                    adj[i] |= 1 << j;
                    adj[j] |= 1 << i;
                }
            }
        }
        let g = Graph::from_edges(n, &edges).expect("valid edges");
        let (v, zeta): (Vec<f64>, f64) = if k % 2 == 0 {
            ((0..n).map(|_| StandardNormal.sample(&mut rng)).collect(), 0.0)
        } else {
            // values on a coarse grid so some coordinates fall inside zeta
            ((0..n).map(|_| rng.index(5) as f64 - 2.0).collect(), 0.5)
        };
        let side = |f: &dyn Fn(f64) -> bool| (0..n).filter(|&i| f(v[i])).fold(0u32, |m, i| m | 1 << i);
        let pos = side(&|x| x > zeta);
        let neg = side(&|x| x < -zeta);
        let weak_pos = side(&|x| x >= -zeta);
        let weak_neg = side(&|x| x <= zeta);
        let mut strong_oracle = maximal_connected(n, &adj, &[pos]);
        strong_oracle.extend(maximal_connected(n, &adj, &[neg]));
        strong_oracle.sort();
        let weak_oracle = maximal_connected(n, &adj, &[weak_pos, weak_neg]);
        let strong = strong_nodal_domains(&g, &v, zeta).expect("valid input");
        let mut weak = weak_nodal_domains(&g, &v, zeta).expect("valid input");
        weak.sort();
        agree += (strong == strong_oracle && weak == weak_oracle) as usize;
    }
    outcome(
        t.weak_eq_strong_freq >= 0.95 && t.two_domain_freq >= 0.95 && t.graphs == 20 && agree == 200,
        format!(
            "weak = strong {:.4}, two domains {:.4}; oracle agrees on {agree} of 200",
            t.weak_eq_strong_freq, t.two_domain_freq
        ),
    )
}

// ---- 10: non-degeneration ----

fn criterion_10() -> Outcome {
    let t = nondegeneration_experiment(&EnsembleSpec::sparse(300, 0.2, Rademacher, 10), 100, 10.0).expect("runs");
    let smallest = t.min_abs_coord.iter().copied().fold(f64::INFINITY, f64::min);
    outcome(
        t.fraction_below <= 0.05 && t.min_abs_coord.len() == 100,
        format!("fraction below n^-10 is {}; smallest coordinate {smallest:.3e}", t.fraction_below),
    )
}

// ---- 11: reproducibility across thread counts ----

/// Every preset's underlying experiment at a small size, serialized.
fn preset_outputs() -> Vec<(&'static str, String)> {
    let json = |v: serde_json::Result<String>| v.expect("serializes");
    let sparse = |n, p, seed| EnsembleSpec::sparse(n, p, Rademacher, seed);
    let lcd = LCDParams::new(0.1, 0.3, 0.1);
    let mut out = Vec::new();
    out.push((
        "interlacing",
        json(serde_json::to_string(&interlacing_experiment(&sparse(30, 0.3, 1), 40, 1e-9).unwrap())),
    ));
    let records = trial_records(&sparse(60, 0.1, 2), 20, DEFAULT_TOL_FACTOR).unwrap();
    let lines: Vec<String> = records.values().map(|r| r.to_json_line()).collect();
    out.push(("simple-spectrum", lines.join("\n")));
    out.push((
        "min-gap",
        min_gap_scaling_experiment(0.5, &[50, 70], 15, Rademacher, 3).unwrap().to_csv(),
    ));
    out.push((
        "operator-norm",
        operator_norm_experiment(&sparse(60, 0.2, 4), 20, 3.5).unwrap().to_csv(),
    ));
    out.push((
        "gap-tail",
        gap_tail_experiment(&sparse(60, 0.5, 5), 20, &[0.25, 0.5, 1.0], &[30]).unwrap().to_csv(),
    ));
    out.push((
        "nondegeneration",
        nondegeneration_experiment(&sparse(60, 0.2, 6), 20, 10.0).unwrap().to_csv(),
    ));
    let nodal = nodal_experiment(&EnsembleSpec::erdos_renyi(60, 0.2, 7), 5, ZetaRule::default()).unwrap();
    out.push(("nodal", nodal.summary_csv() + &nodal.rows_csv()));
    let w = vec![1.0 / 40f64.sqrt(); 40];
    out.push((
        "smallball",
        small_ball_experiment(&w, &sparse(40, 0.3, 8), &[0.1, 0.5], 2000, &lcd).unwrap().to_csv(),
    ));
    let geometry = GeometryParams::for_dimension(80, 0.3, 0.1, 2.0).unwrap();
    out.push((
        "structure",
        eigenvector_structure_experiment(&sparse(80, 0.3, 9), 2, 3, &geometry, Some(&lcd))
            .unwrap()
            .classification_csv(),
    ));
    let batch = run_trials(10, 0, 200, |_, seed| {
        let x = gaussian_unit(20, &mut derive_stream_rng(seed, streams::VECTOR));
        lcd_approx(&x, &lcd)
    });
    out.push(("lcd", json(serde_json::to_string(&batch.values().collect::<Vec<_>>()))));
    out
}

fn criterion_11() -> Outcome {
    let one = with_threads(1, preset_outputs).expect("pool");
    let eight = with_threads(8, preset_outputs).expect("pool");
    let again = with_threads(8, preset_outputs).expect("pool");
    let differing: Vec<&str> = one
        .iter()
        .zip(&eight)
        .zip(&again)
        .filter(|((a, b), c)| a.1 != b.1 || b.1 != c.1)
        .map(|((a, _), _)| a.0)
        .collect();
    outcome(
        differing.is_empty() && one.len() == 10,
        if differing.is_empty() {
            format!("{} presets identical at 1 and 8 threads", one.len())
        } else {
            format!("differing: {}", differing.join(", "))
        },
    )
}

fn main() -> ExitCode {
    let criteria: [(&str, fn() -> Outcome, u64); 11] = [
        ("eigensolver oracle", criterion_1, 120),
        ("interlacing", criterion_2, 60),
        ("simple spectrum", criterion_3, 600),
        ("minimum gap", criterion_4, 900),
        ("operator norm", criterion_5, 600),
        ("lcd soundness", criterion_6, 300),
        ("partition inequalities", criterion_7, 600),
        ("levy concentration", criterion_8, 120),
        ("nodal domains", criterion_9, 900),
        ("non-degeneration", criterion_10, 600),
        ("reproducibility", criterion_11, 600),
    ];
    let filter: Vec<String> = std::env::args().skip(1).filter(|a| !a.starts_with('-')).collect();
    let mut failed = 0;
    for (k, (name, run, budget)) in criteria.iter().enumerate() {
        let id = k + 1;
        if !filter.is_empty() && !filter.iter().any(|f| f == &id.to_string() || name.contains(f.as_str())) {
            continue;
        }
        let start = Instant::now();
        let result = run();
        let elapsed = start.elapsed();
        let in_time = elapsed <= Duration::from_secs(*budget);
        let passed = result.passed && in_time;
        failed += !passed as usize;
        println!(
            "{} criterion {id:>2} {name}: {} [{:.1} s{}]",
            if passed { "PASS" } else { "FAIL" },
            result.detail,
            elapsed.as_secs_f64(),
            if in_time { String::new() } else { format!(", over the {budget} s budget") }
        );
    }
    if failed == 0 {
        ExitCode::SUCCESS
    } else {
        println!("{failed} criteria failed");
        ExitCode::FAILURE
    }
}
