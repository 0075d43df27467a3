//! Randomized cross-check of the closed forms against the oracle engines.

use std::f64::consts::PI;
use std::fmt::Write as _;
use std::str::FromStr;

use num_complex::Complex64;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::Serialize;

use crate::analytic;
use crate::error::{Error, Result};
use crate::interferometer::{
    build_transfer, DetectorEfficiency, InterferometerConfig, LossChannel, SeedState, SqueezingParams,
};
use crate::oracle::fock::{self, fock_simulate, FockOptions};
use crate::oracle::gaussian::gaussian_simulate;
use crate::oracle::moment::moment_expectation;
use crate::oracle::relative_deviation;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Engine {
    Moment,
    Fock,
    Gaussian,
    All,
}

impl FromStr for Engine {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "moment" => Ok(Engine::Moment),
            "fock" => Ok(Engine::Fock),
            "gaussian" => Ok(Engine::Gaussian),
            "all" => Ok(Engine::All),
            other => Err(Error::Config(format!(
                "unknown engine `{other}` (expected moment, fock, gaussian or all)"
            ))),
        }
    }
}

pub const MOMENT_TRIALS: usize = 1000;
pub const FOCK_TRIALS: usize = 200;
pub const GAUSSIAN_TRIALS: usize = 200;
pub const MOMENT_TOL: f64 = 1e-10;
pub const FOCK_TOL: f64 = 1e-7;
pub const GAUSSIAN_TOL: f64 = 1e-10;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct VerifyOptions {
    pub engine: Engine,
    /// Trials per engine; `None` uses the engine default.
    pub trials: Option<usize>,
    /// Tolerance for every check; `None` uses the engine default.
    pub rel_tol: Option<f64>,
    pub seed: u64,
}

impl Default for VerifyOptions {
    fn default() -> Self {
        Self {
            engine: Engine::All,
            trials: None,
            rel_tol: None,
            seed: 0x5eed,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct CheckResult {
    pub engine: &'static str,
    pub check: &'static str,
    pub trials: usize,
    pub max_rel_dev: f64,
    pub tolerance: f64,
    /// Trials where an engine returned an error instead of a value.
    pub errors: usize,
}

impl CheckResult {
    pub fn passed(&self) -> bool {
        self.errors == 0 && self.max_rel_dev <= self.tolerance
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct VerifyReport {
    pub checks: Vec<CheckResult>,
}

impl VerifyReport {
    pub fn passed(&self) -> bool {
        self.checks.iter().all(CheckResult::passed)
    }

    pub fn table(&self) -> String {
        let mut out = format!(
            "{:<9} {:<34} {:>7} {:>12} {:>10} {:>6}  status\n",
            "engine", "check", "trials", "max_rel_dev", "tolerance", "errors"
        );
        for c in &self.checks {
            let _ = writeln!(
                out,
                "{:<9} {:<34} {:>7} {:>12.3e} {:>10.1e} {:>6}  {}",
                c.engine,
                c.check,
                c.trials,
                c.max_rel_dev,
                c.tolerance,
                c.errors,
                if c.passed() { "pass" } else { "FAIL" }
            );
        }
        out
    }
}

/// Per-trial deviations for a fixed list of checks; `None` marks an engine error.
type TrialOutcome = Vec<Option<f64>>;

fn collect(engine: &'static str, names: &[&'static str], tol: f64, outcomes: &[TrialOutcome]) -> Vec<CheckResult> {
    names
        .iter()
        .enumerate()
        .map(|(k, &check)| {
            let devs = outcomes.iter().map(|o| o[k]);
            CheckResult {
                engine,
                check,
                trials: outcomes.len(),
                max_rel_dev: devs.clone().flatten().fold(0.0, f64::max),
                tolerance: tol,
                errors: devs.filter(Option::is_none).count(),
            }
        })
        .collect()
}

fn random_config(rng: &mut ChaCha8Rng, max_gain: f64, min_transmission: f64) -> InterferometerConfig {
    let mut unit = || rng.random_range(min_transmission..=1.0);
    let (t1, t2, e1, e2) = (unit(), unit(), unit(), unit());
    InterferometerConfig::new(
        SqueezingParams::new(rng.random_range(0.0..=max_gain), rng.random_range(0.0..2.0 * PI)).unwrap(),
        SqueezingParams::new(rng.random_range(0.0..=max_gain), rng.random_range(0.0..2.0 * PI)).unwrap(),
        LossChannel::new(t1).unwrap(),
        LossChannel::new(t2).unwrap(),
        DetectorEfficiency::new(e1).unwrap(),
        DetectorEfficiency::new(e2).unwrap(),
    )
}

fn random_coherent(rng: &mut ChaCha8Rng, max_mean: f64) -> Complex64 {
    Complex64::from_polar(rng.random_range(0.0..=max_mean).sqrt(), rng.random_range(0.0..2.0 * PI))
}

fn seeded(config: &InterferometerConfig, a1: SeedState, a2: SeedState) -> InterferometerConfig {
    InterferometerConfig {
        seed_a1: a1,
        seed_a2: a2,
        ..*config
    }
}

struct Sample {
    config: InterferometerConfig,
    phi: f64,
    n: u32,
    m: u32,
    mu: Complex64,
}

fn samples(rng: &mut ChaCha8Rng, trials: usize, max_gain: f64, min_t: f64, max_seed: u32, max_mu_sq: f64) -> Vec<Sample> {
    (0..trials)
        .map(|_| Sample {
            config: random_config(rng, max_gain, min_t),
            phi: rng.random_range(0.0..2.0 * PI),
            n: rng.random_range(0..=max_seed.min(20)),
            m: rng.random_range(0..=max_seed),
            mu: random_coherent(rng, max_mu_sq),
        })
        .collect()
}

const MOMENT_CHECKS: [&str; 4] = [
    "mean, number seeds |n>|m>",
    "variance, number seed |m>",
    "mean, coherent seed",
    "variance, coherent seed",
];

fn moment_trial(s: &Sample) -> TrialOutcome {
    let c = s.config.at_phase(s.phi);
    let t = build_transfer(&c);
    let (vac, num_n, num_m, coh) = (
        SeedState::Vacuum,
        SeedState::Number(s.n),
        SeedState::Number(s.m),
        SeedState::Coherent(s.mu),
    );
    let mean_nm = moment_expectation(&t, &num_n, &num_m, 1);
    let mean_m = moment_expectation(&t, &vac, &num_m, 1);
    let var_m = moment_expectation(&t, &vac, &num_m, 2) - mean_m * mean_m;
    let mean_c = moment_expectation(&t, &vac, &coh, 1);
    let var_c = moment_expectation(&t, &vac, &coh, 2) - mean_c * mean_c;
    vec![
        Some(relative_deviation(mean_nm, analytic::mean_n1_number(&c, s.n, s.m, s.phi))),
        Some(relative_deviation(var_m, analytic::var_n1_number(&c, s.m, s.phi))),
        Some(relative_deviation(mean_c, analytic::mean_n1_coherent(&c, s.mu, s.phi))),
        Some(relative_deviation(var_c, analytic::var_n1_coherent(&c, s.mu, s.phi))),
    ]
}

const GAUSSIAN_CHECKS: [&str; 2] = ["mean, coherent seed", "variance, coherent seed"];

fn gaussian_trial(s: &Sample) -> TrialOutcome {
    let c = seeded(&s.config, SeedState::Vacuum, SeedState::Coherent(s.mu));
    match gaussian_simulate(&c, s.phi) {
        Ok(g) => vec![
            Some(relative_deviation(g.mean_n1, analytic::mean_n1_coherent(&c, s.mu, s.phi))),
            Some(relative_deviation(g.var_n1, analytic::var_n1_coherent(&c, s.mu, s.phi))),
        ],
        Err(_) => vec![None; 2],
    }
}

const FOCK_CHECKS: [&str; 5] = [
    "mean, number seeds |n>|m>",
    "variance, number seed |m>",
    "variance |n>|m> vs moment engine",
    "mean, coherent seed",
    "variance, coherent seed",
];

fn fock_trial(s: &Sample) -> TrialOutcome {
    let opts = FockOptions::default();
    let both = seeded(&s.config, SeedState::Number(s.n), SeedState::Number(s.m));
    let only_m = seeded(&s.config, SeedState::Vacuum, SeedState::Number(s.m));
    let coh = seeded(&s.config, SeedState::Vacuum, SeedState::Coherent(s.mu));
    let mut out = vec![None; 5];
    if let Ok(f) = fock_simulate(&both, s.phi, &opts) {
        out[0] = Some(relative_deviation(f.mean_n1, analytic::mean_n1_number(&both, s.n, s.m, s.phi)));
        let t = build_transfer(&both.at_phase(s.phi));
        let (n, m) = (SeedState::Number(s.n), SeedState::Number(s.m));
        let mean = moment_expectation(&t, &n, &m, 1);
        let var = moment_expectation(&t, &n, &m, 2) - mean * mean;
        out[2] = Some(relative_deviation(f.var_n1, var));
    }
    if let Ok(f) = fock_simulate(&only_m, s.phi, &opts) {
        out[1] = Some(relative_deviation(f.var_n1, analytic::var_n1_number(&only_m, s.m, s.phi)));
    }
    if let Ok(f) = fock_simulate(&coh, s.phi, &opts) {
        out[3] = Some(relative_deviation(f.mean_n1, analytic::mean_n1_coherent(&coh, s.mu, s.phi)));
        out[4] = Some(relative_deviation(f.var_n1, analytic::var_n1_coherent(&coh, s.mu, s.phi)));
    }
    out
}

/// Runs the selected engines against the closed forms.
pub fn run_verify(options: &VerifyOptions) -> VerifyReport {
    let mut rng = ChaCha8Rng::seed_from_u64(options.seed);
    let mut checks = Vec::new();
    let wants = |e: Engine| options.engine == e || options.engine == Engine::All;

    if wants(Engine::Moment) {
        let trials = options.trials.unwrap_or(MOMENT_TRIALS);
        let s = samples(&mut rng, trials, 2.0, 0.0, 10_000, 10_000.0);
        let outcomes: Vec<_> = s.par_iter().map(moment_trial).collect();
        checks.extend(collect("moment", &MOMENT_CHECKS, options.rel_tol.unwrap_or(MOMENT_TOL), &outcomes));
    }
    if wants(Engine::Gaussian) {
        let trials = options.trials.unwrap_or(GAUSSIAN_TRIALS);
        let s = samples(&mut rng, trials, 2.0, 0.0, 0, 100.0);
        let outcomes: Vec<_> = s.par_iter().map(gaussian_trial).collect();
        checks.extend(collect("gaussian", &GAUSSIAN_CHECKS, options.rel_tol.unwrap_or(GAUSSIAN_TOL), &outcomes));
    }
    if wants(Engine::Fock) {
        let trials = options.trials.unwrap_or(FOCK_TRIALS);
        let max_seed = fock::MAX_SEED_PHOTONS as u32;
        let s = samples(&mut rng, trials, fock::MAX_GAIN, 0.05, max_seed, fock::MAX_SEED_PHOTONS);
        let outcomes: Vec<_> = s.par_iter().map(fock_trial).collect();
        checks.extend(collect("fock", &FOCK_CHECKS, options.rel_tol.unwrap_or(FOCK_TOL), &outcomes));
    }
    VerifyReport { checks }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn engine_names() {
        assert_eq!("fock".parse::<Engine>().unwrap(), Engine::Fock);
        assert!("fast".parse::<Engine>().is_err());
    }

    #[test]
    fn small_run_passes_and_is_reproducible() {
        let opts = VerifyOptions {
            trials: Some(5),
            ..VerifyOptions::default()
        };
        let a = run_verify(&opts);
        assert!(a.passed(), "{}", a.table());
        assert_eq!(a, run_verify(&opts));
        assert_eq!(a.checks.len(), 11);
    }

    #[test]
    fn failing_tolerance_is_reported() {
        let opts = VerifyOptions {
            engine: Engine::Moment,
            trials: Some(5),
            rel_tol: Some(0.0),
            seed: 3,
        };
        let r = run_verify(&opts);
        assert!(!r.passed());
        assert!(r.table().contains("FAIL"));
    }
}
