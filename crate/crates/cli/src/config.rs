//! Flags, the key-value config file, and their merge into resolved settings.

use std::path::{Path, PathBuf};

use anyhow::{anyhow, bail, Context, Result};
use clap::{Args, ValueEnum};
use gaplab::ensemble::{EnsembleSpec, EntryDistribution};
use gaplab::geometry::GeometryParams;
use gaplab::lcd::LCDParams;
use gaplab::nodal::ZetaRule;
use serde::Serialize;

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum EnsembleChoice {
    /// Sparse symmetric matrix with entries xi * chi
    Sparse,
    /// Erdős–Rényi adjacency matrix
    Er,
}

/// Options shared by every subcommand. Each can also be set in the config
/// file under the same name; flags win.
#[derive(Debug, Clone, Default, Args)]
pub struct Flags {
    /// Matrix dimension or vertex count
    #[arg(long, global = true)]
    pub n: Option<usize>,
    /// Sparsity (edge probability)
    #[arg(long, global = true)]
    pub p: Option<f64>,
    /// Entry distribution: rademacher, gaussian or uniform
    #[arg(long, global = true)]
    pub dist: Option<String>,
    #[arg(long, global = true, value_enum)]
    pub ensemble: Option<EnsembleChoice>,
    /// Master seed
    #[arg(long, global = true)]
    pub seed: Option<u64>,
    /// Number of trials (matrices, graphs or draws)
    #[arg(long, global = true)]
    pub trials: Option<usize>,
    /// Output directory; without it the main table goes to stdout
    #[arg(long, global = true)]
    pub out: Option<PathBuf>,
    /// Worker threads (0 = all cores)
    #[arg(long, global = true)]
    pub threads: Option<usize>,
    /// Key-value config file
    #[arg(long, global = true)]
    pub config: Option<PathBuf>,
    #[arg(long, global = true)]
    pub gamma: Option<f64>,
    #[arg(long = "c-dom", global = true)]
    pub c_dom: Option<f64>,
    #[arg(long, global = true)]
    pub cbar: Option<f64>,
    #[arg(long, global = true)]
    pub omega: Option<f64>,
    /// Absolute near-zero threshold for nodal domains
    #[arg(long, global = true)]
    pub zeta: Option<f64>,
    #[arg(long = "tol-factor", global = true)]
    pub tol_factor: Option<f64>,
    #[arg(long = "k-norm", global = true)]
    pub k_norm: Option<f64>,
    /// Exponent C of the n^-C non-degeneration threshold
    #[arg(long, global = true)]
    pub exponent: Option<f64>,
    /// LCD grid step
    #[arg(long = "lcd-step", global = true)]
    pub lcd_step: Option<f64>,
    #[arg(long = "theta-max", global = true)]
    pub theta_max: Option<f64>,
}

macro_rules! merge_fields {
    ($a:ident, $b:ident, $($f:ident),*) => {
        Flags { $($f: $a.$f.or($b.$f)),* }
    };
}

impl Flags {
    /// Fields set in `self` take precedence over `other`.
    pub fn or(self, other: Flags) -> Flags {
        let (a, b) = (self, other);
        merge_fields!(
            a, b, n, p, dist, ensemble, seed, trials, out, threads, config, gamma, c_dom, cbar, omega, zeta,
            tol_factor, k_norm, exponent, lcd_step, theta_max
        )
    }

    fn set(&mut self, key: &str, value: &str) -> Result<()> {
        fn num<T: std::str::FromStr>(v: &str) -> Result<T>
        where
            T::Err: std::fmt::Display,
        {
            v.parse().map_err(|e| anyhow!("bad value `{v}`: {e}"))
        }
        match key.replace('_', "-").as_str() {
            "n" => self.n = Some(num(value)?),
            "p" => self.p = Some(num(value)?),
            "dist" => self.dist = Some(value.to_string()),
            "ensemble" => {
                self.ensemble = Some(EnsembleChoice::from_str(value, true).map_err(|e| anyhow!(e))?)
            }
            "seed" => self.seed = Some(num(value)?),
            "trials" => self.trials = Some(num(value)?),
            "out" => self.out = Some(PathBuf::from(value)),
            "threads" => self.threads = Some(num(value)?),
            "gamma" => self.gamma = Some(num(value)?),
            "c-dom" => self.c_dom = Some(num(value)?),
            "cbar" => self.cbar = Some(num(value)?),
            "omega" => self.omega = Some(num(value)?),
            "zeta" => self.zeta = Some(num(value)?),
            "tol-factor" => self.tol_factor = Some(num(value)?),
            "k-norm" => self.k_norm = Some(num(value)?),
            "exponent" => self.exponent = Some(num(value)?),
            "lcd-step" => self.lcd_step = Some(num(value)?),
            "theta-max" => self.theta_max = Some(num(value)?),
            other => bail!("unknown key `{other}`"),
        }
        Ok(())
    }
}

/// Parses `key = value` lines; `#` starts a comment.
pub fn parse_config(text: &str) -> Result<Flags> {
    let mut flags = Flags::default();
    for (k, raw) in text.lines().enumerate() {
        let line = raw.split('#').next().unwrap_or("").trim();
        if line.is_empty() {
            continue;
        }
        let (key, value) = line
            .split_once('=')
            .ok_or_else(|| anyhow!("config line {}: expected `key = value`", k + 1))?;
        flags
            .set(key.trim(), value.trim())
            .with_context(|| format!("config line {}", k + 1))?;
    }
    Ok(flags)
}

pub fn load_config(path: &Path) -> Result<Flags> {
    let text = std::fs::read_to_string(path).with_context(|| format!("reading config {}", path.display()))?;
    parse_config(&text).with_context(|| format!("in {}", path.display()))
}

/// Every tunable constant, echoed into the manifest.
#[derive(Debug, Clone, Copy, Serialize)]
pub struct Constants {
    pub gamma: f64,
    pub c_dom: f64,
    pub cbar: f64,
    pub omega: f64,
    /// `None` selects `n |v|_inf 2^-40` per vector.
    pub zeta: Option<f64>,
    pub zeta_relative_factor: f64,
    pub tol_factor: f64,
    pub k_norm: f64,
    pub exponent: f64,
    pub lcd_step: f64,
    pub lcd_refine_iters: u32,
    /// `None` selects `p^(-1/2) e^(1/omega)`.
    pub theta_max: Option<f64>,
}

#[derive(Debug, Clone, Serialize)]
pub struct Settings {
    pub n: Option<usize>,
    pub p: Option<f64>,
    pub dist: EntryDistribution,
    pub ensemble: Option<EnsembleChoice>,
    pub seed: u64,
    pub trials: Option<usize>,
    #[serde(skip)]
    pub out: Option<PathBuf>,
    pub threads: usize,
    pub constants: Constants,
}

fn check_open(field: &str, v: f64, lo: f64, hi: f64) -> Result<()> {
    if !(v > lo && v < hi) {
        bail!("invalid parameter `{field}`: {v} is outside ({lo}, {hi})");
    }
    Ok(())
}

fn check_positive(field: &str, v: f64) -> Result<()> {
    if !(v > 0.0 && v.is_finite()) {
        bail!("invalid parameter `{field}`: {v} must be positive");
    }
    Ok(())
}

impl Settings {
    pub fn resolve(flags: Flags) -> Result<Settings> {
        let flags = match &flags.config {
            Some(path) => flags.clone().or(load_config(path)?),
            None => flags,
        };
        let dist = match &flags.dist {
            Some(d) => d.parse().map_err(|e: gaplab::error::Error| anyhow!(e))?,
            None => EntryDistribution::Rademacher,
        };
        let constants = Constants {
            gamma: flags.gamma.unwrap_or(0.1),
            c_dom: flags.c_dom.unwrap_or(0.5),
            cbar: flags.cbar.unwrap_or(2.0),
            omega: flags.omega.unwrap_or(0.1),
            zeta: flags.zeta,
            zeta_relative_factor: 2f64.powi(-40),
            tol_factor: flags.tol_factor.unwrap_or(gaplab::stats::DEFAULT_TOL_FACTOR),
            k_norm: flags.k_norm.unwrap_or(3.5),
            exponent: flags.exponent.unwrap_or(10.0),
            lcd_step: flags.lcd_step.unwrap_or(1e-3),
            lcd_refine_iters: 40,
            theta_max: flags.theta_max,
        };
        check_open("gamma", constants.gamma, 0.0, 1.0)?;
        check_open("c_dom", constants.c_dom, 0.0, 1.0)?;
        check_open("omega", constants.omega, 0.0, 1.0)?;
        if !(constants.cbar > 1.0) {
            bail!("invalid parameter `cbar`: {} must exceed 1", constants.cbar);
        }
        if let Some(z) = constants.zeta {
            if !(z >= 0.0) {
                bail!("invalid parameter `zeta`: {z} must be nonnegative");
            }
        }
        check_positive("tol_factor", constants.tol_factor)?;
        check_positive("k_norm", constants.k_norm)?;
        check_positive("exponent", constants.exponent)?;
        check_positive("lcd_step", constants.lcd_step)?;
        if let Some(t) = constants.theta_max {
            check_positive("theta_max", t)?;
        }
        Ok(Settings {
            n: flags.n,
            p: flags.p,
            dist,
            ensemble: flags.ensemble,
            seed: flags.seed.unwrap_or(0),
            trials: flags.trials,
            out: flags.out,
            threads: flags.threads.unwrap_or(0),
            constants,
        })
    }

    pub fn n_or(&self, default: usize) -> usize {
        self.n.unwrap_or(default)
    }

    pub fn p_or(&self, default: f64) -> f64 {
        self.p.unwrap_or(default)
    }

    pub fn trials_or(&self, default: usize) -> usize {
        self.trials.unwrap_or(default)
    }

    /// Ensemble from the settings, falling back to the given defaults.
    pub fn spec(&self, n: usize, p: f64, ensemble: EnsembleChoice) -> Result<EnsembleSpec> {
        let n = self.n_or(n);
        let p = self.p_or(p);
        let spec = match self.ensemble.unwrap_or(ensemble) {
            EnsembleChoice::Sparse => EnsembleSpec::sparse(n, p, self.dist, self.seed),
            EnsembleChoice::Er => EnsembleSpec::erdos_renyi(n, p, self.seed),
        };
        spec.validate()?;
        Ok(spec)
    }

    pub fn lcd_params(&self, p: f64) -> LCDParams {
        let c = &self.constants;
        let mut params = LCDParams::new(c.gamma, p, c.omega);
        params.coarse_step = c.lcd_step;
        params.refine_iters = c.lcd_refine_iters;
        if let Some(t) = c.theta_max {
            params.theta_max = t;
        }
        params
    }

    pub fn geometry(&self, n: usize, p: f64) -> Result<GeometryParams> {
        let c = &self.constants;
        let mut g = GeometryParams::for_dimension(n, p, c.omega, c.cbar)?;
        g.c_dom = c.c_dom;
        Ok(g)
    }

    pub fn zeta_rule(&self) -> ZetaRule {
        match self.constants.zeta {
            Some(z) => ZetaRule::Absolute(z),
            None => ZetaRule::Relative(self.constants.zeta_relative_factor),
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn config_parses_and_flags_win() {
        let file = parse_config("# run\nn = 40\np=0.25\nc_dom = 0.4  # inline\nensemble = er\n").unwrap();
        assert_eq!(file.n, Some(40));
        assert_eq!(file.c_dom, Some(0.4));
        assert_eq!(file.ensemble, Some(EnsembleChoice::Er));
        let flags = Flags {
            n: Some(10),
            ..Flags::default()
        };
        let merged = flags.or(file);
        assert_eq!(merged.n, Some(10));
        assert_eq!(merged.p, Some(0.25));
    }

    #[test]
    fn config_errors_name_the_line() {
        let err = parse_config("n = 3\np = abc\n").unwrap_err();
        assert!(format!("{err:#}").contains("line 2"));
        let err = parse_config("colour = red\n").unwrap_err();
        assert!(format!("{err:#}").contains("unknown key `colour`"));
    }

    #[test]
    fn invalid_constants_are_rejected() {
        let flags = Flags {
            gamma: Some(2.0),
            ..Flags::default()
        };
        let err = Settings::resolve(flags).unwrap_err();
        assert!(err.to_string().contains("gamma"));
    }
}
