//! Gaussian-state simulator over the six modes `a1, a2, l1, l2, d1, d2`.
//!
//! Quadratures are `x = (a + a+)/sqrt(2)`, `p = (a - a+)/(i sqrt(2))`, ordered
//! `(x_1, p_1, ..., x_6, p_6)`; the vacuum covariance is `I/2`. The state stores
//! the excess covariance `sigma - I/2` so that weak squeezing is not lost to
//! cancellation against the vacuum term.

use nalgebra::{DMatrix, DVector, Matrix2};
use num_complex::Complex64;

use crate::error::{Error, Result};
use crate::interferometer::{InterferometerConfig, SeedState};

pub const MODES: usize = 6;
const DIM: usize = 2 * MODES;

#[derive(Debug, Clone, PartialEq)]
pub struct GaussianState {
    mean: DVector<f64>,
    excess: DMatrix<f64>,
}

/// Real 4x4 symplectic of the two-mode map `c' = m c + n c+`.
fn bogoliubov_symplectic(m: [[Complex64; 2]; 2], n: [[Complex64; 2]; 2]) -> DMatrix<f64> {
    let mut s = DMatrix::zeros(4, 4);
    for r in 0..2 {
        for c in 0..2 {
            let (plus, minus) = (m[r][c] + n[r][c], m[r][c] - n[r][c]);
            s[(2 * r, 2 * c)] = plus.re;
            s[(2 * r, 2 * c + 1)] = -minus.im;
            s[(2 * r + 1, 2 * c)] = plus.im;
            s[(2 * r + 1, 2 * c + 1)] = minus.re;
        }
    }
    s
}

/// Embeds a two-mode symplectic acting on modes `i, j` into the full space.
fn embed(local: &DMatrix<f64>, i: usize, j: usize) -> DMatrix<f64> {
    let idx = [2 * i, 2 * i + 1, 2 * j, 2 * j + 1];
    let mut s = DMatrix::identity(DIM, DIM);
    for (r, &gr) in idx.iter().enumerate() {
        for (c, &gc) in idx.iter().enumerate() {
            s[(gr, gc)] = local[(r, c)];
        }
    }
    s
}

impl GaussianState {
    pub fn vacuum() -> Self {
        Self {
            mean: DVector::zeros(DIM),
            excess: DMatrix::zeros(DIM, DIM),
        }
    }

    /// Displaces `mode` to coherent amplitude `mu`.
    pub fn displace(&mut self, mode: usize, mu: Complex64) {
        self.mean[2 * mode] += std::f64::consts::SQRT_2 * mu.re;
        self.mean[2 * mode + 1] += std::f64::consts::SQRT_2 * mu.im;
    }

    pub fn mean(&self) -> &DVector<f64> {
        &self.mean
    }

    pub fn covariance(&self) -> DMatrix<f64> {
        &self.excess + DMatrix::identity(DIM, DIM) * 0.5
    }

    fn transform(&mut self, s: &DMatrix<f64>, excess_added: &DMatrix<f64>) {
        self.mean = s * &self.mean;
        self.excess = s * &self.excess * s.transpose() + excess_added;
    }

    /// `c_i' = u c_i + v c_j+`, `c_j' = u c_j + v c_i+`, `v = e^{i phase} sinh(gain)`.
    pub fn apply_squeezer(&mut self, i: usize, j: usize, gain: f64, phase: f64) {
        let (c, s) = (gain.cosh(), gain.sinh());
        let u = Complex64::new(c, 0.0);
        let v = Complex64::from_polar(s, phase);
        let z = Complex64::new(0.0, 0.0);
        let local = bogoliubov_symplectic([[u, z], [z, u]], [[z, v], [v, z]]);
        // S S^T - I written out exactly: 2 s^2 on the diagonal blocks, 2 c s R off it
        let rot = Matrix2::new(phase.cos(), phase.sin(), phase.sin(), -phase.cos());
        let mut added_local = DMatrix::zeros(4, 4);
        for r in 0..2 {
            for k in 0..2 {
                added_local[(r, k)] = if r == k { s * s } else { 0.0 };
                added_local[(r + 2, k + 2)] = added_local[(r, k)];
                added_local[(r, k + 2)] = c * s * rot[(r, k)];
                added_local[(r + 2, k)] = c * s * rot[(r, k)];
            }
        }
        let mut added = DMatrix::zeros(DIM, DIM);
        let idx = [2 * i, 2 * i + 1, 2 * j, 2 * j + 1];
        for (r, &gr) in idx.iter().enumerate() {
            for (k, &gk) in idx.iter().enumerate() {
                added[(gr, gk)] = added_local[(r, k)];
            }
        }
        self.transform(&embed(&local, i, j), &added);
    }

    /// `c_i' = t c_i + r c_j`, `c_j' = -r c_i + t c_j` with `t = cos(theta)`.
    pub fn apply_beam_splitter(&mut self, i: usize, j: usize, theta: f64) {
        let (t, r) = (Complex64::new(theta.cos(), 0.0), Complex64::new(theta.sin(), 0.0));
        let z = Complex64::new(0.0, 0.0);
        let local = bogoliubov_symplectic([[t, r], [-r, t]], [[z, z], [z, z]]);
        self.transform(&embed(&local, i, j), &DMatrix::zeros(DIM, DIM));
    }

    /// `(<n>, Var(n))` of one mode from its first and second quadrature moments.
    pub fn photon_moments(&self, mode: usize) -> (f64, f64) {
        let (ix, ip) = (2 * mode, 2 * mode + 1);
        let (dxx, dpp, dxp) = (self.excess[(ix, ix)], self.excess[(ip, ip)], self.excess[(ix, ip)]);
        let (x, p) = (self.mean[ix], self.mean[ip]);
        let mean = 0.5 * (dxx + dpp) + 0.5 * (x * x + p * p);
        let var = 0.5 * (dxx + dpp)
            + 0.5 * (dxx * dxx + dpp * dpp + 2.0 * dxp * dxp)
            + x * x * (0.5 + dxx)
            + p * p * (0.5 + dpp)
            + 2.0 * x * p * dxp;
        (mean, var)
    }

    /// Symplectic eigenvalues (each listed once, ascending) of the reduced
    /// state of `modes`.
    pub fn symplectic_spectrum(&self, modes: &[usize]) -> Vec<f64> {
        let idx: Vec<usize> = modes.iter().flat_map(|&m| [2 * m, 2 * m + 1]).collect();
        let full = self.covariance();
        let dim = idx.len();
        let sigma = DMatrix::from_fn(dim, dim, |r, c| full[(idx[r], idx[c])]);
        let eig = sigma.clone().symmetric_eigen();
        let root = &eig.eigenvectors
            * DMatrix::from_diagonal(&eig.eigenvalues.map(|l| l.max(0.0).sqrt()))
            * eig.eigenvectors.transpose();
        let mut omega = DMatrix::zeros(dim, dim);
        for k in 0..modes.len() {
            omega[(2 * k, 2 * k + 1)] = 1.0;
            omega[(2 * k + 1, 2 * k)] = -1.0;
        }
        let mut sv: Vec<f64> = (&root * omega * &root).singular_values().iter().copied().collect();
        sv.sort_by(f64::total_cmp);
        sv.chunks(2).map(|pair| 0.5 * (pair[0] + pair[1])).collect()
    }
}

/// Total symplectic of the circuit at the config's own phases.
pub fn circuit_symplectic(config: &InterferometerConfig) -> DMatrix<f64> {
    let c = *config;
    let gates: [&dyn Fn(&mut GaussianState); 6] = [
        &|s| s.apply_squeezer(0, 1, c.opa_a.gain(), c.opa_a.phase()),
        &|s| s.apply_beam_splitter(0, 2, c.loss1.theta()),
        &|s| s.apply_beam_splitter(1, 3, c.loss2.theta()),
        &|s| s.apply_squeezer(0, 1, c.opa_b.gain(), c.opa_b.phase()),
        &|s| s.apply_beam_splitter(0, 4, c.eta1.as_loss().theta()),
        &|s| s.apply_beam_splitter(1, 5, c.eta2.as_loss().theta()),
    ];
    // each gate's symplectic is read off its action on unit mean vectors
    let mut total = DMatrix::identity(DIM, DIM);
    for gate in gates {
        let mut cols = DMatrix::zeros(DIM, DIM);
        for k in 0..DIM {
            let mut unit = GaussianState::vacuum();
            unit.mean[k] = 1.0;
            gate(&mut unit);
            cols.set_column(k, &unit.mean);
        }
        total = cols * total;
    }
    total
}

/// Row of `b1` over `(a1, a2+, l1, l2+, d1, d2+)` read off the circuit symplectic.
pub fn transfer_row1(config: &InterferometerConfig) -> [Complex64; 6] {
    let s = circuit_symplectic(config);
    let m = |j: usize| {
        let (xx, xp, px, pp) = (s[(0, 2 * j)], s[(0, 2 * j + 1)], s[(1, 2 * j)], s[(1, 2 * j + 1)]);
        Complex64::new(0.5 * (xx + pp), 0.5 * (px - xp))
    };
    let n = |j: usize| {
        let (xx, xp, px, pp) = (s[(0, 2 * j)], s[(0, 2 * j + 1)], s[(1, 2 * j)], s[(1, 2 * j + 1)]);
        Complex64::new(0.5 * (xx - pp), 0.5 * (px + xp))
    };
    [m(0), n(1), m(2), n(3), m(4), n(5)]
}

#[derive(Debug, Clone, PartialEq)]
pub struct GaussianMoments {
    pub mean_n1: f64,
    pub var_n1: f64,
    pub mean_n2: f64,
    pub state: GaussianState,
}

fn displacement(seed: &SeedState) -> Result<Complex64> {
    match *seed {
        SeedState::Vacuum => Ok(Complex64::new(0.0, 0.0)),
        SeedState::Number(0) => Ok(Complex64::new(0.0, 0.0)),
        SeedState::Number(count) => Err(Error::NonGaussianSeed { count }),
        SeedState::Coherent(mu) => Ok(mu),
    }
}

/// Propagates the Gaussian input through the circuit at relative phase `phi`.
pub fn gaussian_simulate(config: &InterferometerConfig, phi: f64) -> Result<GaussianMoments> {
    let c = config.at_phase(phi);
    let mut state = GaussianState::vacuum();
    state.displace(0, displacement(&c.seed_a1)?);
    state.displace(1, displacement(&c.seed_a2)?);
    state.apply_squeezer(0, 1, c.opa_a.gain(), c.opa_a.phase());
    state.apply_beam_splitter(0, 2, c.loss1.theta());
    state.apply_beam_splitter(1, 3, c.loss2.theta());
    state.apply_squeezer(0, 1, c.opa_b.gain(), c.opa_b.phase());
    state.apply_beam_splitter(0, 4, c.eta1.as_loss().theta());
    state.apply_beam_splitter(1, 5, c.eta2.as_loss().theta());
    let (mean_n1, var_n1) = state.photon_moments(0);
    let (mean_n2, _) = state.photon_moments(1);
    Ok(GaussianMoments {
        mean_n1,
        var_n1,
        mean_n2,
        state,
    })
}
