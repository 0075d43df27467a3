//! Closed-form observables at detector D1: expected counts, fringe visibility
//! and contrast, photon-number variance, phase sensitivity from error
//! propagation, and signal-to-noise ratio, for number-state and coherent-state
//! seeding of the undetected mode.
//!
//! Seed photon numbers are carried as real "effective" counts internally so the
//! number-state (`m`) and coherent-state (`|mu|^2`) paths share one formula.
//!
//! Decibel figures use the power convention `10 log10(value / reference)`:
//! phase variances and SNRs are already quadratic quantities.

use std::f64::consts::PI;

use num_complex::Complex64;
use serde::Serialize;

use crate::error::{Error, Result};
use crate::interferometer::{coefficient_moduli, fringe_amplitude, InterferometerConfig, SeedState};
use crate::minimize::scan_then_refine;

/// Number of uniform samples in the coarse phase scan of the minimizer.
pub const SCAN_POINTS: usize = 512;
/// Distance of the scan from the divergent endpoints `0` and `pi`.
pub const SCAN_MARGIN: f64 = 1e-6;
/// Final golden-section bracket width in radians.
pub const REFINE_TOL: f64 = 1e-10;

/// `|sin(phi)|` below this is treated as a vanishing fringe slope.
const SIN_FLOOR: f64 = 1e-12;

/// `<N1>` for number seeds `|n>_a1 |m>_a2`, with real-valued photon numbers.
pub fn mean_n1(config: &InterferometerConfig, n: f64, m: f64, phi: f64) -> f64 {
    let c = coefficient_moduli(config, phi);
    n * c.a1_sq + (m + 1.0) * c.alpha1_sq + c.beta1_sq
}

pub fn mean_n1_number(config: &InterferometerConfig, n: u32, m: u32, phi: f64) -> f64 {
    mean_n1(config, n as f64, m as f64, phi)
}

/// `<N1>` for a coherent seed `|mu>_a2` and vacuum in `a1`; depends on `|mu|^2` only.
pub fn mean_n1_coherent(config: &InterferometerConfig, mu: Complex64, phi: f64) -> f64 {
    mean_n1(config, 0.0, mu.norm_sqr(), phi)
}

/// `d<N1>/dphi = -2 eta1 (n + m + 1) sqrt(T1 T2 U_A U_B V_A V_B) sin(phi)`.
pub fn mean_n1_derivative(config: &InterferometerConfig, n: f64, m: f64, phi: f64) -> f64 {
    -2.0 * config.eta1.eta() * (n + m + 1.0) * fringe_amplitude(config) * phi.sin()
}

/// Fringe visibility for number seeds, closed form.
pub fn visibility_number(config: &InterferometerConfig, n: u32, m: u32) -> Result<f64> {
    visibility(config, n as f64, m as f64)
}

/// Fringe visibility with real-valued seed photon numbers (coherent seeds use `|mu|^2`).
pub fn visibility(config: &InterferometerConfig, n: f64, m: f64) -> Result<f64> {
    let (ua, va) = (config.opa_a.big_u(), config.opa_a.big_v());
    let (ub, vb) = (config.opa_b.big_u(), config.opa_b.big_v());
    let (t1, t2) = (config.t1(), config.t2());
    let denom = n * (t1 * ua * ub + t2 * va * vb)
        + (m + 1.0) * (t1 * va * ub + t2 * ua * vb)
        + config.loss2.reflection() * vb;
    if denom <= 0.0 {
        return Err(Error::DarkInterferometer);
    }
    Ok(2.0 * (n + m + 1.0) * fringe_amplitude(config) / denom)
}

/// Visibility from the fringe extremes `(<N1>(0) - <N1>(pi)) / (<N1>(0) + <N1>(pi))`.
pub fn visibility_from_extrema(config: &InterferometerConfig, n: f64, m: f64) -> Result<f64> {
    let max = mean_n1(config, n, m, 0.0);
    let min = mean_n1(config, n, m, PI);
    if max + min <= 0.0 {
        return Err(Error::DarkInterferometer);
    }
    Ok((max - min) / (max + min))
}

/// Balance parameter `gamma = sqrt(T1 V_A U_B / (T2 U_A V_B))` and the
/// visibility `2 gamma / (1 + gamma^2 + R2 / ((m + 1) T2 U_A))` for `n = 0`.
pub fn visibility_gamma_form(config: &InterferometerConfig, m: f64) -> Result<(f64, f64)> {
    let t2 = config.t2();
    if t2 <= 0.0 {
        return Err(Error::Degenerate("gamma undefined for T2 = 0".into()));
    }
    if config.opa_b.gain() <= 0.0 {
        return Err(Error::Degenerate("gamma undefined for G_B = 0".into()));
    }
    let (ua, va) = (config.opa_a.big_u(), config.opa_a.big_v());
    let (ub, vb) = (config.opa_b.big_u(), config.opa_b.big_v());
    let gamma = ((config.t1() * va * ub) / (t2 * ua * vb)).sqrt();
    let loss_term = config.loss2.reflection() / ((m + 1.0) * t2 * ua);
    Ok((gamma, 2.0 * gamma / (1.0 + gamma * gamma + loss_term)))
}

/// Fringe contrast `<N1>max - <N1>min = 4 eta1 (n + m + 1) sqrt(T1 T2 U_A U_B V_A V_B)`.
pub fn contrast(config: &InterferometerConfig, n: f64, m: f64) -> f64 {
    4.0 * config.eta1.eta() * (n + m + 1.0) * fringe_amplitude(config)
}

/// Photon-number variance at D1 for `|m>_a2`, real-valued `m`.
pub fn var_n1(config: &InterferometerConfig, m: f64, phi: f64) -> f64 {
    let c = coefficient_moduli(config, phi);
    let vac = 1.0 - config.eta1.eta();
    c.alpha1_sq * (m + 1.0) * (c.a1_sq + c.b1_sq + vac)
        + c.beta1_sq * (c.a1_sq + m * c.alpha1_sq + c.b1_sq + vac)
}

pub fn var_n1_number(config: &InterferometerConfig, m: u32, phi: f64) -> f64 {
    var_n1(config, m as f64, phi)
}

/// Variance for `|mu>_a2`: the number-state result at `m = |mu|^2` plus the
/// Poissonian excess `|mu|^2 |alpha1|^4`.
pub fn var_n1_coherent(config: &InterferometerConfig, mu: Complex64, phi: f64) -> f64 {
    let mean_seed = mu.norm_sqr();
    let alpha1_sq = coefficient_moduli(config, phi).alpha1_sq;
    var_n1(config, mean_seed, phi) + mean_seed * alpha1_sq * alpha1_sq
}

/// `(mean, variance)` at D1 for a seed in the undetected mode.
fn seeded_moments(config: &InterferometerConfig, seed: &SeedState, phi: f64) -> (f64, f64) {
    match *seed {
        SeedState::Vacuum => (mean_n1(config, 0.0, 0.0, phi), var_n1(config, 0.0, phi)),
        SeedState::Number(m) => {
            let m = m as f64;
            (mean_n1(config, 0.0, m, phi), var_n1(config, m, phi))
        }
        SeedState::Coherent(mu) => (mean_n1_coherent(config, mu, phi), var_n1_coherent(config, mu, phi)),
    }
}

fn require_sensitivity_domain(config: &InterferometerConfig) -> Result<()> {
    for (name, value) in [
        ("G_A", config.opa_a.gain()),
        ("G_B", config.opa_b.gain()),
        ("T1", config.t1()),
        ("T2", config.t2()),
        ("eta1", config.eta1.eta()),
    ] {
        if value <= 0.0 {
            return Err(Error::Degenerate(format!(
                "phase sensitivity requires {name} > 0 (fringe slope vanishes identically)"
            )));
        }
    }
    Ok(())
}

/// Error-propagation phase variance `Var(N1) / (d<N1>/dphi)^2` for a seed in
/// the undetected mode (vacuum, number or coherent).
pub fn phase_variance(config: &InterferometerConfig, seed: &SeedState, phi: f64) -> Result<f64> {
    require_sensitivity_domain(config)?;
    if phi.sin().abs() < SIN_FLOOR {
        return Err(Error::DivergentSensitivity { phi });
    }
    let (_, var) = seeded_moments(config, seed, phi);
    let slope = mean_n1_derivative(config, 0.0, seed.mean_photons(), phi);
    Ok(var / (slope * slope))
}

/// Phase variance of the ideal (lossless, unit-efficiency, gain-balanced)
/// interferometer at its optimum: `1 / (4 (m + 1) sinh^2 G (sinh^2 G + 1))`.
pub fn ql_phase_variance(mean_seed: f64, gain: f64) -> Result<f64> {
    if !(gain > 0.0) || !gain.is_finite() {
        return Err(Error::Degenerate(format!("quantum-limited sensitivity needs gain > 0, got {gain}")));
    }
    if !(mean_seed >= 0.0) || !mean_seed.is_finite() {
        return Err(Error::InvalidParameter {
            name: "mean seed photons",
            value: mean_seed,
            reason: "must be nonnegative",
        });
    }
    let v = gain.sinh().powi(2);
    Ok(1.0 / (4.0 * (mean_seed + 1.0) * v * (v + 1.0)))
}

/// `10 log10(value / reference)`.
pub fn ratio_db(value: f64, reference: f64) -> Result<f64> {
    if !(value > 0.0) || !(reference > 0.0) {
        return Err(Error::Degenerate(format!(
            "dB ratio needs positive inputs, got {value} / {reference}"
        )));
    }
    Ok(10.0 * (value / reference).log10())
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct SensitivityOptimum {
    /// Location of the minimum in `(0, pi)`; the mirror image `2 pi - phi_min` is equivalent.
    pub phi_min: f64,
    /// Minimum phase variance (rad^2).
    pub value: f64,
    /// Quantum-limited variance at the same mean seed photon number.
    pub ql_value: f64,
    /// `value` relative to the unseeded quantum limit, in dB.
    pub ratio_db: f64,
    /// True if the minimum is only approached at the edge of the scan (ideal interferometer).
    pub at_boundary: bool,
}

/// Gain used for the quantum-limit benchmark: the mean of the two OPA gains.
pub fn reference_gain(config: &InterferometerConfig) -> f64 {
    0.5 * (config.opa_a.gain() + config.opa_b.gain())
}

/// Minimum of the phase variance over `phi` in `(0, pi)`.
pub fn minimize_phase_variance(config: &InterferometerConfig, seed: &SeedState) -> Result<SensitivityOptimum> {
    require_sensitivity_domain(config)?;
    let m = scan_then_refine(
        |phi| phase_variance(config, seed, phi),
        SCAN_MARGIN,
        PI - SCAN_MARGIN,
        SCAN_POINTS,
        REFINE_TOL,
    )?;
    let gain = reference_gain(config);
    let ql_value = ql_phase_variance(seed.mean_photons(), gain)?;
    let unseeded = ql_phase_variance(0.0, gain)?;
    Ok(SensitivityOptimum {
        phi_min: m.x,
        value: m.value,
        ql_value,
        ratio_db: ratio_db(m.value, unseeded)?,
        at_boundary: m.at_boundary,
    })
}

/// `<N1>^2 / Var(N1)` for a seed in the undetected mode.
pub fn snr(config: &InterferometerConfig, seed: &SeedState, phi: f64) -> Result<f64> {
    let (mean, var) = seeded_moments(config, seed, phi);
    if !(var > 0.0) {
        return Err(Error::Degenerate("SNR undefined: photon-number variance at D1 is zero".into()));
    }
    Ok(mean * mean / var)
}

/// All D1 observables at one phase.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct ObservableReport {
    pub phi: f64,
    pub mean_n1: f64,
    /// Absent when the detected mode is seeded (no closed form).
    pub var_n1: Option<f64>,
    /// Absent for a dark interferometer.
    pub visibility: Option<f64>,
    pub contrast: f64,
    /// Absent where the fringe slope vanishes or the detected mode is seeded.
    pub delta_phi_sq: Option<f64>,
    pub snr: Option<f64>,
}

/// Evaluates every closed-form observable for the config's seeds at `phi`.
pub fn observe(config: &InterferometerConfig, phi: f64) -> Result<ObservableReport> {
    let n = match config.seed_a1 {
        SeedState::Vacuum => 0.0,
        SeedState::Number(n) => n as f64,
        SeedState::Coherent(_) => {
            return Err(Error::Unsupported(
                "coherent seeding of the detected mode has no closed form here".into(),
            ))
        }
    };
    let seed = config.seed_a2;
    let m = seed.mean_photons();
    let detected_seeded = n > 0.0;

    let (var_n1, delta_phi_sq, snr_value) = if detected_seeded {
        (None, None, None)
    } else {
        let (_, var) = seeded_moments(config, &seed, phi);
        (
            Some(var),
            phase_variance(config, &seed, phi).ok(),
            snr(config, &seed, phi).ok(),
        )
    };
    Ok(ObservableReport {
        phi,
        mean_n1: mean_n1(config, n, m, phi),
        var_n1,
        visibility: visibility(config, n, m).ok(),
        contrast: contrast(config, n, m),
        delta_phi_sq,
        snr: snr_value,
    })
}
