//! Physical parameter model of the seeded, lossy non-degenerate nonlinear
//! interferometer and its overall Heisenberg-picture transfer matrix.
//!
//! Layout (input to output): OPA `A` acts on the input modes `a1, a2`; each arm
//! then passes a loss beam splitter (transmissions `T1`, `T2`, ancillas `l1`,
//! `l2`); OPA `B` acts on both arms; finally each arm meets a detector-efficiency
//! beam splitter (`eta1`, `eta2`, ancillas `d1`, `d2`). The output modes satisfy
//!
//! ```text
//! b1  = A1 a1 + alpha1 a2+ + B1 l1 + beta1 l2+ + sqrt(1-eta1) d1
//! b2+ = alpha2* a1 + A2* a2+ + beta2* l1 + B2* l2+ + sqrt(1-eta2) d2+
//! ```
//!
//! Complex coefficients are stored in rectangular form; phases enter only via
//! `exp(i phi)` factors.

use num_complex::Complex64;

use crate::error::{Error, Result};

/// Upper bound on parametric gains. `cosh` overflows near 355; the model
/// assumes an undepleted pump, far below this.
pub const MAX_GAIN: f64 = 20.0;

fn check_finite(name: &'static str, value: f64) -> Result<()> {
    if value.is_finite() {
        Ok(())
    } else {
        Err(Error::InvalidParameter {
            name,
            value,
            reason: "must be finite",
        })
    }
}

fn check_unit_interval(name: &'static str, value: f64) -> Result<()> {
    check_finite(name, value)?;
    if (0.0..=1.0).contains(&value) {
        Ok(())
    } else {
        Err(Error::InvalidParameter {
            name,
            value,
            reason: "must lie in [0, 1]",
        })
    }
}

/// Two-mode squeezing parameter `xi = G exp(i phase)` of one OPA.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SqueezingParams {
    gain: f64,
    phase: f64,
}

impl SqueezingParams {
    pub fn new(gain: f64, phase: f64) -> Result<Self> {
        check_finite("gain", gain)?;
        check_finite("phase", phase)?;
        if !(0.0..=MAX_GAIN).contains(&gain) {
            return Err(Error::InvalidParameter {
                name: "gain",
                value: gain,
                reason: "must lie in [0, 20]",
            });
        }
        Ok(Self { gain, phase })
    }

    pub fn gain(&self) -> f64 {
        self.gain
    }

    pub fn phase(&self) -> f64 {
        self.phase
    }

    /// `u = cosh G`.
    pub fn u(&self) -> f64 {
        self.gain.cosh()
    }

    /// `v = exp(i phase) sinh G`.
    pub fn v(&self) -> Complex64 {
        Complex64::from_polar(self.gain.sinh(), self.phase)
    }

    /// `U = cosh^2 G`.
    pub fn big_u(&self) -> f64 {
        self.gain.cosh().powi(2)
    }

    /// `V = sinh^2 G`, the mean pair number of an unseeded OPA.
    pub fn big_v(&self) -> f64 {
        self.gain.sinh().powi(2)
    }

    pub(crate) fn with_phase(self, phase: f64) -> Self {
        Self { phase, ..self }
    }
}

/// Internal loss modelled as a beam splitter with transmission `T`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct LossChannel {
    transmission: f64,
}

impl LossChannel {
    pub fn new(transmission: f64) -> Result<Self> {
        check_unit_interval("transmission", transmission)?;
        Ok(Self { transmission })
    }

    pub fn transmission(&self) -> f64 {
        self.transmission
    }

    pub fn reflection(&self) -> f64 {
        1.0 - self.transmission
    }

    /// Amplitude transmission `t = cos(theta)`.
    pub fn t(&self) -> f64 {
        self.transmission.sqrt()
    }

    /// Amplitude reflection `r = sin(theta)`.
    pub fn r(&self) -> f64 {
        self.reflection().sqrt()
    }

    /// Beam-splitter angle with `cos(theta)^2 = T`.
    pub fn theta(&self) -> f64 {
        self.r().atan2(self.t())
    }
}

/// Detector efficiency, modelled as a beam splitter of transmission `eta`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct DetectorEfficiency {
    eta: f64,
}

impl DetectorEfficiency {
    pub fn new(eta: f64) -> Result<Self> {
        check_unit_interval("eta", eta)?;
        Ok(Self { eta })
    }

    pub fn eta(&self) -> f64 {
        self.eta
    }

    /// `sqrt(1 - eta)`, the weight of the vacuum admixed by the detector.
    pub fn inefficiency(&self) -> f64 {
        (1.0 - self.eta).sqrt()
    }

    pub fn as_loss(&self) -> LossChannel {
        LossChannel {
            transmission: self.eta,
        }
    }
}

/// Which interferometer input a seed is injected into.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum SeedMode {
    /// `a1`, the mode read out at D1.
    Detected,
    /// `a2`, the conjugate mode that is never detected.
    Undetected,
}

/// Input state of one interferometer mode.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum SeedState {
    Vacuum,
    Number(u32),
    Coherent(Complex64),
}

impl SeedState {
    pub fn coherent(amplitude: Complex64) -> Result<Self> {
        check_finite("coherent amplitude (re)", amplitude.re)?;
        check_finite("coherent amplitude (im)", amplitude.im)?;
        Ok(SeedState::Coherent(amplitude))
    }

    /// Coherent state with real amplitude `sqrt(mean_photons)`.
    pub fn coherent_with_mean(mean_photons: f64) -> Result<Self> {
        check_finite("mean seed photons", mean_photons)?;
        if mean_photons < 0.0 {
            return Err(Error::InvalidParameter {
                name: "mean seed photons",
                value: mean_photons,
                reason: "must be nonnegative",
            });
        }
        Ok(SeedState::Coherent(Complex64::new(mean_photons.sqrt(), 0.0)))
    }

    pub fn mean_photons(&self) -> f64 {
        match *self {
            SeedState::Vacuum => 0.0,
            SeedState::Number(count) => count as f64,
            SeedState::Coherent(mu) => mu.norm_sqr(),
        }
    }

    pub fn is_vacuum(&self) -> bool {
        match *self {
            SeedState::Vacuum => true,
            SeedState::Number(count) => count == 0,
            SeedState::Coherent(mu) => mu == Complex64::new(0.0, 0.0),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SeedSpec {
    pub mode: SeedMode,
    pub state: SeedState,
}

/// Full physical parameter set of the interferometer.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct InterferometerConfig {
    pub opa_a: SqueezingParams,
    pub opa_b: SqueezingParams,
    /// Internal loss of the detected arm (`T1`).
    pub loss1: LossChannel,
    /// Internal loss of the undetected arm (`T2`).
    pub loss2: LossChannel,
    pub eta1: DetectorEfficiency,
    pub eta2: DetectorEfficiency,
    pub seed_a1: SeedState,
    pub seed_a2: SeedState,
}

impl InterferometerConfig {
    /// Unseeded configuration.
    pub fn new(
        opa_a: SqueezingParams,
        opa_b: SqueezingParams,
        loss1: LossChannel,
        loss2: LossChannel,
        eta1: DetectorEfficiency,
        eta2: DetectorEfficiency,
    ) -> Self {
        Self {
            opa_a,
            opa_b,
            loss1,
            loss2,
            eta1,
            eta2,
            seed_a1: SeedState::Vacuum,
            seed_a2: SeedState::Vacuum,
        }
    }

    /// Gain-balanced configuration with both OPA phases at zero.
    pub fn balanced(gain: f64, t1: f64, t2: f64, eta1: f64, eta2: f64) -> Result<Self> {
        let opa = SqueezingParams::new(gain, 0.0)?;
        Ok(Self::new(
            opa,
            opa,
            LossChannel::new(t1)?,
            LossChannel::new(t2)?,
            DetectorEfficiency::new(eta1)?,
            DetectorEfficiency::new(eta2)?,
        ))
    }

    pub fn with_seed(mut self, seed: SeedSpec) -> Self {
        match seed.mode {
            SeedMode::Detected => self.seed_a1 = seed.state,
            SeedMode::Undetected => self.seed_a2 = seed.state,
        }
        self
    }

    /// Interferometer relative phase `phi = phi_A - phi_B`.
    pub fn relative_phase(&self) -> f64 {
        self.opa_a.phase() - self.opa_b.phase()
    }

    /// Copy with `phi_A` shifted so the relative phase equals `phi`; `phi_B` is kept.
    pub fn at_phase(&self, phi: f64) -> Self {
        Self {
            opa_a: self.opa_a.with_phase(self.opa_b.phase() + phi),
            ..*self
        }
    }

    /// Copy with both OPA phases shifted by `delta` (a global phase).
    pub fn with_global_phase_shift(&self, delta: f64) -> Self {
        Self {
            opa_a: self.opa_a.with_phase(self.opa_a.phase() + delta),
            opa_b: self.opa_b.with_phase(self.opa_b.phase() + delta),
            ..*self
        }
    }

    pub fn t1(&self) -> f64 {
        self.loss1.transmission()
    }

    pub fn t2(&self) -> f64 {
        self.loss2.transmission()
    }
}

/// The eight complex coefficients of the 2x6 transfer matrix plus the
/// detector-inefficiency entries.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct TransferCoefficients {
    pub a1: Complex64,
    pub alpha1: Complex64,
    pub b1: Complex64,
    pub beta1: Complex64,
    pub a2: Complex64,
    pub alpha2: Complex64,
    pub b2: Complex64,
    pub beta2: Complex64,
    /// `sqrt(1 - eta1)`
    pub ineff1: f64,
    /// `sqrt(1 - eta2)`
    pub ineff2: f64,
}

impl TransferCoefficients {
    /// Row of `b1` over `(a1, a2+, l1, l2+, d1, d2+)`.
    pub fn row1(&self) -> [Complex64; 6] {
        [
            self.a1,
            self.alpha1,
            self.b1,
            self.beta1,
            Complex64::new(self.ineff1, 0.0),
            Complex64::new(0.0, 0.0),
        ]
    }

    /// Row of `b2+` over `(a1, a2+, l1, l2+, d1, d2+)`.
    pub fn row2(&self) -> [Complex64; 6] {
        [
            self.alpha2.conj(),
            self.a2.conj(),
            self.beta2.conj(),
            self.b2.conj(),
            Complex64::new(0.0, 0.0),
            Complex64::new(self.ineff2, 0.0),
        ]
    }

    /// `[b1, b1+] - 1`; zero for a valid bosonic output mode.
    pub fn commutator_residual_row1(&self) -> f64 {
        self.a1.norm_sqr() + self.b1.norm_sqr() + self.ineff1 * self.ineff1
            - self.alpha1.norm_sqr()
            - self.beta1.norm_sqr()
            - 1.0
    }

    /// `[b2, b2+] - 1`.
    pub fn commutator_residual_row2(&self) -> f64 {
        self.a2.norm_sqr() + self.b2.norm_sqr() + self.ineff2 * self.ineff2
            - self.alpha2.norm_sqr()
            - self.beta2.norm_sqr()
            - 1.0
    }
}

/// Builds the overall transfer coefficients from the physical parameters.
pub fn build_transfer(config: &InterferometerConfig) -> TransferCoefficients {
    let (ua, va) = (config.opa_a.big_u(), config.opa_a.big_v());
    let (ub, vb) = (config.opa_b.big_u(), config.opa_b.big_v());
    let (t1, t2) = (config.loss1.transmission(), config.loss2.transmission());
    let (r1, r2) = (config.loss1.reflection(), config.loss2.reflection());
    let (eta1, eta2) = (config.eta1.eta(), config.eta2.eta());

    let phi = config.relative_phase();
    let fringe = Complex64::from_polar(1.0, phi);
    let fringe_conj = fringe.conj();
    let phase_b = Complex64::from_polar(1.0, config.opa_b.phase());

    let sq1 = eta1.sqrt();
    let sq2 = eta2.sqrt();
    let re = |x: f64| Complex64::new(x, 0.0);

    TransferCoefficients {
        a1: (re((t1 * ua * ub).sqrt()) + fringe_conj * (t2 * va * vb).sqrt()) * sq1,
        alpha1: (fringe * (t1 * va * ub).sqrt() + re((t2 * ua * vb).sqrt())) * phase_b * sq1,
        b1: re(sq1 * (r1 * ub).sqrt()),
        beta1: phase_b * (sq1 * (r2 * vb).sqrt()),
        a2: (fringe_conj * (t1 * va * vb).sqrt() + re((t2 * ua * ub).sqrt())) * sq2,
        alpha2: (re((t1 * ua * vb).sqrt()) + fringe * (t2 * va * ub).sqrt()) * phase_b * sq2,
        b2: re(sq2 * (r2 * ub).sqrt()),
        beta2: phase_b * (sq2 * (r1 * vb).sqrt()),
        ineff1: config.eta1.inefficiency(),
        ineff2: config.eta2.inefficiency(),
    }
}

/// Squared moduli of the row-1 coefficients as functions of the relative phase.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct CoefficientModuli {
    pub a1_sq: f64,
    pub alpha1_sq: f64,
    pub b1_sq: f64,
    pub beta1_sq: f64,
}

/// `sqrt(T1 T2 U_A U_B V_A V_B)`, the amplitude of the interference term.
pub fn fringe_amplitude(config: &InterferometerConfig) -> f64 {
    let (ua, va) = (config.opa_a.big_u(), config.opa_a.big_v());
    let (ub, vb) = (config.opa_b.big_u(), config.opa_b.big_v());
    (config.t1() * ua * ub).sqrt() * (config.t2() * va * vb).sqrt()
}

/// Closed-form `|A1|^2, |alpha1|^2, |B1|^2, |beta1|^2` at relative phase `phi`.
///
/// `a + b + 2 sqrt(ab) cos(phi)` is evaluated as
/// `(sqrt(a) - sqrt(b))^2 + 4 sqrt(ab) cos^2(phi/2)` so the dark fringe at
/// `phi = pi` keeps full relative precision.
pub fn coefficient_moduli(config: &InterferometerConfig, phi: f64) -> CoefficientModuli {
    let (ua, va) = (config.opa_a.big_u(), config.opa_a.big_v());
    let (ub, vb) = (config.opa_b.big_u(), config.opa_b.big_v());
    let (t1, t2) = (config.t1(), config.t2());
    let eta1 = config.eta1.eta();

    let half_cos_sq = (0.5 * phi).cos().powi(2);
    let interfere = |a: f64, b: f64| (a - b).powi(2) + 4.0 * a * b * half_cos_sq;

    CoefficientModuli {
        a1_sq: eta1 * interfere((t1 * ua * ub).sqrt(), (t2 * va * vb).sqrt()),
        alpha1_sq: eta1 * interfere((t1 * va * ub).sqrt(), (t2 * ua * vb).sqrt()),
        b1_sq: eta1 * config.loss1.reflection() * ub,
        beta1_sq: eta1 * config.loss2.reflection() * vb,
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::f64::consts::PI;

    fn figure_point(phi: f64) -> InterferometerConfig {
        InterferometerConfig::balanced(1e-3, 0.6, 0.4, 0.3, 1.0)
            .unwrap()
            .at_phase(phi)
    }

    #[test]
    fn rejects_out_of_range_parameters() {
        assert!(SqueezingParams::new(-0.1, 0.0).is_err());
        assert!(SqueezingParams::new(20.5, 0.0).is_err());
        assert!(SqueezingParams::new(f64::NAN, 0.0).is_err());
        assert!(SqueezingParams::new(1.0, f64::INFINITY).is_err());
        assert!(LossChannel::new(1.01).is_err());
        assert!(LossChannel::new(-1e-9).is_err());
        assert!(DetectorEfficiency::new(2.0).is_err());
        assert!(SeedState::coherent_with_mean(-1.0).is_err());
        // endpoints are legal
        assert!(LossChannel::new(0.0).is_ok());
        assert!(LossChannel::new(1.0).is_ok());
        assert!(SqueezingParams::new(20.0, 0.0).is_ok());
    }

    #[test]
    fn squeezing_identity_holds_up_to_cap() {
        for g in [0.0, 1e-3, 0.5, 3.0, 10.0, 20.0] {
            let s = SqueezingParams::new(g, 0.7).unwrap();
            assert!(s.u() >= 1.0);
            assert!((s.v().norm() - g.sinh()).abs() <= 1e-15 * s.u());
            let d = s.big_u() - s.big_v() - 1.0;
            assert!(d.abs() <= 1e-12 * s.big_u(), "g={g}: U-V-1 = {d}");
        }
    }

    #[test]
    fn loss_channel_reflection_complements_transmission() {
        for t in [0.0, 0.25, 0.6, 1.0] {
            let l = LossChannel::new(t).unwrap();
            assert_eq!(l.transmission() + l.reflection(), 1.0);
            assert!((l.theta().cos().powi(2) - t).abs() < 1e-15);
        }
    }

    #[test]
    fn seed_mean_photons() {
        assert_eq!(SeedState::Vacuum.mean_photons(), 0.0);
        assert_eq!(SeedState::Number(7).mean_photons(), 7.0);
        let mu = Complex64::from_polar(2.0, PI / 3.0);
        assert!((SeedState::Coherent(mu).mean_photons() - 4.0).abs() < 1e-14);
        assert!(SeedState::Number(0).is_vacuum());
    }

    #[test]
    fn relative_phase_accessors() {
        let c = figure_point(0.0).at_phase(1.25);
        assert!((c.relative_phase() - 1.25).abs() < 1e-15);
        let shifted = c.with_global_phase_shift(0.4);
        assert!((shifted.relative_phase() - 1.25).abs() < 1e-15);
    }

    #[test]
    fn zero_gain_is_identity_on_detected_mode() {
        let c = InterferometerConfig::balanced(0.0, 1.0, 1.0, 1.0, 1.0).unwrap();
        let t = build_transfer(&c);
        assert_eq!(t.a1, Complex64::new(1.0, 0.0));
        assert_eq!(t.alpha1, Complex64::new(0.0, 0.0));
        assert_eq!(t.b1, Complex64::new(0.0, 0.0));
        assert_eq!(t.beta1, Complex64::new(0.0, 0.0));
    }

    #[test]
    fn zero_gain_is_pure_loss() {
        let c = InterferometerConfig::balanced(0.0, 0.6, 0.4, 0.3, 0.8).unwrap();
        let t = build_transfer(&c);
        assert!((t.a1.norm_sqr() - 0.18).abs() < 1e-15);
        assert!((t.b1.norm_sqr() - 0.12).abs() < 1e-15);
        assert_eq!(t.alpha1.norm(), 0.0);
        assert_eq!(t.beta1.norm(), 0.0);
        assert_eq!(t.alpha2.norm(), 0.0);
        assert_eq!(t.beta2.norm(), 0.0);
    }

    #[test]
    fn moduli_match_transfer_coefficients() {
        for &phi in &[0.0, 0.3, PI / 2.0, 2.0, PI, 4.5] {
            let c = InterferometerConfig::new(
                SqueezingParams::new(0.7, phi + 0.2).unwrap(),
                SqueezingParams::new(0.4, 0.2).unwrap(),
                LossChannel::new(0.8).unwrap(),
                LossChannel::new(0.3).unwrap(),
                DetectorEfficiency::new(0.6).unwrap(),
                DetectorEfficiency::new(0.9).unwrap(),
            );
            let t = build_transfer(&c);
            let m = coefficient_moduli(&c, c.relative_phase());
            let close = |a: f64, b: f64| (a - b).abs() <= 1e-13 * a.abs().max(1.0);
            assert!(close(t.a1.norm_sqr(), m.a1_sq));
            assert!(close(t.alpha1.norm_sqr(), m.alpha1_sq));
            assert!(close(t.b1.norm_sqr(), m.b1_sq));
            assert!(close(t.beta1.norm_sqr(), m.beta1_sq));
        }
    }

    #[test]
    fn cross_term_vanishes_at_quarter_turn() {
        let c = figure_point(PI / 2.0);
        let m = coefficient_moduli(&c, PI / 2.0);
        let (u, v) = (1e-3f64.cosh().powi(2), 1e-3f64.sinh().powi(2));
        let expected = 0.3 * (0.6 * u * u + 0.4 * v * v);
        assert!((m.a1_sq - expected).abs() <= 1e-14 * expected);
    }

    #[test]
    fn dark_fringe_value_on_figure_parameters() {
        let m = coefficient_moduli(&figure_point(PI), PI);
        let (u, v) = (1e-3f64.cosh().powi(2), 1e-3f64.sinh().powi(2));
        let expected = 0.3 * (0.6 * u * u + 0.4 * v * v - 2.0 * 0.24f64.sqrt() * u * v);
        assert!((m.a1_sq - expected).abs() <= 1e-12 * expected);
    }

    #[test]
    fn balanced_lossless_bright_fringe() {
        // (U + V)^2 = cosh^2(2G)
        let g = 0.1;
        let c = InterferometerConfig::balanced(g, 1.0, 1.0, 1.0, 1.0).unwrap();
        let m = coefficient_moduli(&c, 0.0);
        let expected = (2.0 * g).cosh().powi(2);
        assert!((m.a1_sq - expected).abs() < 1e-14);
    }

    #[test]
    fn commutators_preserved_at_extremes() {
        for (g, t1, t2, e1) in [(0.0, 0.0, 0.0, 0.0), (3.0, 1.0, 1.0, 1.0), (3.0, 0.0, 1.0, 0.5)] {
            let c = InterferometerConfig::balanced(g, t1, t2, e1, 1.0 - e1).unwrap();
            let t = build_transfer(&c);
            assert!(t.commutator_residual_row1().abs() < 1e-10);
            assert!(t.commutator_residual_row2().abs() < 1e-10);
        }
    }
}
