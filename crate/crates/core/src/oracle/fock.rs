//! Truncated Fock-space circuit simulator.
//!
//! The joint pure state of `a1, a2, l1, l2` is held as a dense row-major
//! amplitude tensor. Gates are exponentials of their generators restricted to
//! the sectors they conserve: `n_i - n_j` for a squeezer, `n_i + n_j` for a
//! beam splitter. Squeezer sectors are infinite, so each is exponentiated on a
//! padded range and the mass that lands outside the output window is dropped;
//! the accumulated loss is the norm deficit.
//!
//! The detector beam splitters act last and only photon counts are read, so
//! they are applied to the number distributions of `a1` and `a2` instead of
//! enlarging the tensor with `d1, d2`.

use nalgebra::DMatrix;
use num_complex::Complex64;

use crate::error::{Error, Result};
use crate::interferometer::{InterferometerConfig, SeedState};

pub const DEFAULT_BUDGET: f64 = 1e-10;
/// Largest gain accepted by [`fock_simulate`].
pub const MAX_GAIN: f64 = 0.3;
/// Largest mean seed photon number accepted by [`fock_simulate`].
pub const MAX_SEED_PHOTONS: f64 = 5.0;
/// Upper bound on the tensor size before giving up on the budget.
const MAX_AMPLITUDES: usize = 1 << 22;
/// Amplitude decay required across the padding of a squeezer sector.
const PAD_DECAY: f64 = 1e-12;

const ZERO: Complex64 = Complex64 { re: 0.0, im: 0.0 };

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct FockOptions {
    /// Maximum occupations for `(a1, a2, l1, l2, d1, d2)`. `None` selects
    /// windows adaptively from the measured leakage of each gate.
    pub cutoffs: Option<[usize; 6]>,
    /// Allowed norm deficit of the final state.
    pub budget: f64,
}

impl Default for FockOptions {
    fn default() -> Self {
        Self {
            cutoffs: None,
            budget: DEFAULT_BUDGET,
        }
    }
}

impl FockOptions {
    /// Fixed cutoffs: the seed count plus 4 on seeded modes, 4 elsewhere.
    pub fn default_cutoffs(config: &InterferometerConfig, budget: f64) -> [usize; 6] {
        let seeded = |s: &SeedState| seed_levels(s, budget) - 1 + 4;
        [seeded(&config.seed_a1), seeded(&config.seed_a2), 4, 4, 4, 4]
    }
}

/// Dense amplitude tensor over a product of truncated single-mode spaces.
#[derive(Debug, Clone, PartialEq)]
pub struct FockState {
    dims: Vec<usize>,
    amplitudes: Vec<Complex64>,
}

fn strides(dims: &[usize]) -> Vec<usize> {
    let mut s = vec![1; dims.len()];
    for k in (0..dims.len().saturating_sub(1)).rev() {
        s[k] = s[k + 1] * dims[k + 1];
    }
    s
}

/// Flat offsets of every basis state of the modes other than `i` and `j`,
/// with `n_i = n_j = 0`.
fn other_offsets(dims: &[usize], i: usize, j: usize) -> Vec<usize> {
    let st = strides(dims);
    let mut offsets = vec![0];
    for mode in 0..dims.len() {
        if mode == i || mode == j {
            continue;
        }
        let (d, s) = (dims[mode], st[mode]);
        offsets = offsets
            .iter()
            .flat_map(|&o| (0..d).map(move |k| o + k * s))
            .collect();
    }
    offsets
}

/// One conserved sector of a two-mode gate: `matrix[r][c]` maps input basis
/// state `inputs[c]` to output state `outputs[r]`.
struct Sector {
    inputs: Vec<(usize, usize)>,
    outputs: Vec<(usize, usize)>,
    matrix: DMatrix<Complex64>,
}

fn squeezer_pad(gain: f64) -> usize {
    let t = gain.tanh();
    if t <= 0.0 {
        return 4;
    }
    let levels = (PAD_DECAY.ln() / t.ln()).ceil();
    (levels.max(0.0) as usize).min(64) + 4
}

/// Sectors of `exp(xi ci+ cj+ - xi* ci cj)` from window `inp` to window `out`.
fn squeezer_sectors(gain: f64, phase: f64, inp: (usize, usize), out: (usize, usize)) -> Vec<Sector> {
    let pad = squeezer_pad(gain);
    let mut sectors = Vec::new();
    for d in -(inp.1 as i64 - 1)..=(inp.0 as i64 - 1) {
        let (si, sj) = (d.max(0) as usize, (-d).max(0) as usize);
        let n_in = (inp.0 - si).min(inp.1 - sj);
        let n_out = if si < out.0 && sj < out.1 {
            (out.0 - si).min(out.1 - sj)
        } else {
            0
        };
        if n_out == 0 {
            continue;
        }
        let len = n_in.max(n_out) + pad;
        // with the phase factored out, exp(K) = D exp(J) D+, D = diag(e^{ik phase})
        let mut gen = DMatrix::<f64>::zeros(len, len);
        for k in 0..len - 1 {
            let c = gain * (((k + 1 + si) * (k + 1 + sj)) as f64).sqrt();
            gen[(k + 1, k)] = c;
            gen[(k, k + 1)] = -c;
        }
        let e = gen.exp();
        let matrix = DMatrix::from_fn(n_out, n_in, |r, c| {
            Complex64::from_polar(e[(r, c)], (r as f64 - c as f64) * phase)
        });
        sectors.push(Sector {
            inputs: (0..n_in).map(|k| (k + si, k + sj)).collect(),
            outputs: (0..n_out).map(|k| (k + si, k + sj)).collect(),
            matrix,
        });
    }
    sectors
}

/// `exp(theta (ci+ cj - cj+ ci))` on the sector `n_i + n_j = total`, indexed by `n_i`.
fn beam_splitter_block(theta: f64, total: usize) -> DMatrix<f64> {
    let mut gen = DMatrix::<f64>::zeros(total + 1, total + 1);
    for k in 0..total {
        let c = theta * (((k + 1) * (total - k)) as f64).sqrt();
        gen[(k + 1, k)] = c;
        gen[(k, k + 1)] = -c;
    }
    gen.exp()
}

fn beam_splitter_sectors(theta: f64, inp: (usize, usize), out: (usize, usize)) -> Vec<Sector> {
    let mut sectors = Vec::new();
    for total in 0..=(inp.0 + inp.1 - 2) {
        let ins: Vec<usize> = (total.saturating_sub(inp.1 - 1)..=total.min(inp.0 - 1)).collect();
        if total + 2 > out.0 + out.1 {
            break;
        }
        let outs: Vec<usize> = (total.saturating_sub(out.1 - 1)..=total.min(out.0 - 1)).collect();
        let block = beam_splitter_block(theta, total);
        let matrix = DMatrix::from_fn(outs.len(), ins.len(), |r, c| Complex64::new(block[(outs[r], ins[c])], 0.0));
        sectors.push(Sector {
            inputs: ins.iter().map(|&k| (k, total - k)).collect(),
            outputs: outs.iter().map(|&k| (k, total - k)).collect(),
            matrix,
        });
    }
    sectors
}

impl FockState {
    /// Product state from per-mode amplitude vectors.
    pub fn product(factors: &[Vec<Complex64>]) -> Self {
        let mut amplitudes = vec![Complex64::new(1.0, 0.0)];
        for f in factors {
            amplitudes = amplitudes
                .iter()
                .flat_map(|&a| f.iter().map(move |&b| a * b))
                .collect();
        }
        Self {
            dims: factors.iter().map(Vec::len).collect(),
            amplitudes,
        }
    }

    pub fn dims(&self) -> &[usize] {
        &self.dims
    }

    pub fn amplitudes(&self) -> &[Complex64] {
        &self.amplitudes
    }

    pub fn norm_sqr(&self) -> f64 {
        self.amplitudes.iter().map(|a| a.norm_sqr()).sum()
    }

    /// `1 - sum |amplitude|^2`, clamped at zero against round-off.
    pub fn norm_deficit(&self) -> f64 {
        (1.0 - self.norm_sqr()).max(0.0)
    }

    /// Photon-number distribution of one mode.
    pub fn marginal(&self, mode: usize) -> Vec<f64> {
        let (d, s) = (self.dims[mode], strides(&self.dims)[mode]);
        let mut p = vec![0.0; d];
        for (idx, a) in self.amplitudes.iter().enumerate() {
            p[(idx / s) % d] += a.norm_sqr();
        }
        p
    }

    fn apply(&mut self, i: usize, j: usize, out: (usize, usize), sectors: &[Sector]) {
        let mut new_dims = self.dims.clone();
        new_dims[i] = out.0;
        new_dims[j] = out.1;
        let (old_st, new_st) = (strides(&self.dims), strides(&new_dims));
        let old_base = other_offsets(&self.dims, i, j);
        let new_base = other_offsets(&new_dims, i, j);
        let mut next = vec![ZERO; new_dims.iter().product()];
        for sector in sectors {
            let x = DMatrix::from_fn(sector.inputs.len(), old_base.len(), |r, o| {
                let (p, q) = sector.inputs[r];
                self.amplitudes[old_base[o] + p * old_st[i] + q * old_st[j]]
            });
            let y = &sector.matrix * x;
            for (r, &(p, q)) in sector.outputs.iter().enumerate() {
                let off = p * new_st[i] + q * new_st[j];
                for (o, &base) in new_base.iter().enumerate() {
                    next[base + off] = y[(r, o)];
                }
            }
        }
        self.dims = new_dims;
        self.amplitudes = next;
    }

    /// Two-mode squeezer on modes `i, j`, output truncated to `out`.
    pub fn apply_squeezer(&mut self, i: usize, j: usize, gain: f64, phase: f64, out: (usize, usize)) {
        let sectors = squeezer_sectors(gain, phase, (self.dims[i], self.dims[j]), out);
        self.apply(i, j, out, &sectors);
    }

    /// Beam splitter with angle `theta` on modes `i, j`, output truncated to `out`.
    pub fn apply_beam_splitter(&mut self, i: usize, j: usize, theta: f64, out: (usize, usize)) {
        let sectors = beam_splitter_sectors(theta, (self.dims[i], self.dims[j]), out);
        self.apply(i, j, out, &sectors);
    }

    /// Keeps only occupations below `dims` in every mode.
    pub fn truncate(&mut self, dims: &[usize]) {
        let old_st = strides(&self.dims);
        let new_st = strides(dims);
        let mut next = vec![ZERO; dims.iter().product()];
        for (idx, slot) in next.iter_mut().enumerate() {
            let old = (0..dims.len()).map(|m| ((idx / new_st[m]) % dims[m]) * old_st[m]).sum::<usize>();
            *slot = self.amplitudes[old];
        }
        self.dims = dims.to_vec();
        self.amplitudes = next;
    }

    /// Smallest window per mode whose excluded marginal mass, weighted by
    /// `(k + 1)^2` so that second moments stay accurate, is at most `allowance`.
    fn trimmed_dims(&self, allowance: f64) -> Vec<usize> {
        (0..self.dims.len())
            .map(|mode| {
                let p = self.marginal(mode);
                let mut keep = p.len();
                let mut dropped = 0.0;
                while keep > 1 && dropped + p[keep - 1] * (keep * keep) as f64 <= allowance {
                    dropped += p[keep - 1] * (keep * keep) as f64;
                    keep -= 1;
                }
                keep
            })
            .collect()
    }
}

/// Number of levels kept for a seed: exact for number states, Poisson tail
/// below `budget / 100` for coherent states.
fn seed_levels(seed: &SeedState, budget: f64) -> usize {
    match *seed {
        SeedState::Vacuum => 1,
        SeedState::Number(k) => k as usize + 1,
        SeedState::Coherent(mu) => {
            let lambda = mu.norm_sqr();
            let mut p = (-lambda).exp();
            let mut tail = 1.0 - p;
            let mut n = 1;
            while tail > budget / 100.0 && n < 4096 {
                p *= lambda / n as f64;
                tail -= p;
                n += 1;
            }
            n
        }
    }
}

fn seed_amplitudes(seed: &SeedState, levels: usize) -> Vec<Complex64> {
    let mut v = vec![ZERO; levels];
    match *seed {
        SeedState::Vacuum => v[0] = Complex64::new(1.0, 0.0),
        SeedState::Number(k) => {
            if (k as usize) < levels {
                v[k as usize] = Complex64::new(1.0, 0.0);
            }
        }
        SeedState::Coherent(mu) => {
            let mut a = Complex64::new((-0.5 * mu.norm_sqr()).exp(), 0.0);
            for (n, slot) in v.iter_mut().enumerate() {
                if n > 0 {
                    a *= mu / (n as f64).sqrt();
                }
                *slot = a;
            }
        }
    }
    v
}

/// Photon statistics from the oracle, plus the truncation actually used.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct FockMoments {
    pub mean_n1: f64,
    pub var_n1: f64,
    pub mean_n2: f64,
    pub norm_deficit: f64,
    /// Maximum occupations used for `(a1, a2, l1, l2, d1, d2)`.
    pub cutoffs: [usize; 6],
}

fn check_preconditions(config: &InterferometerConfig) -> Result<()> {
    for (name, g) in [("G_A", config.opa_a.gain()), ("G_B", config.opa_b.gain())] {
        if g > MAX_GAIN {
            return Err(Error::PreconditionViolated(format!(
                "Fock oracle needs {name} <= {MAX_GAIN}, got {g}"
            )));
        }
    }
    for (name, s) in [("a1", &config.seed_a1), ("a2", &config.seed_a2)] {
        if s.mean_photons() > MAX_SEED_PHOTONS {
            return Err(Error::PreconditionViolated(format!(
                "Fock oracle needs at most {MAX_SEED_PHOTONS} seed photons in {name}, got {}",
                s.mean_photons()
            )));
        }
    }
    Ok(())
}

/// Photon counts of `a_k` after a vacuum-ancilla beam splitter that keeps at most
/// `ancilla_levels` photons in the ancilla.
fn detect(p: &[f64], theta: f64, ancilla_levels: usize) -> Vec<f64> {
    let mut out = vec![0.0; p.len()];
    for (k, &pk) in p.iter().enumerate() {
        if pk == 0.0 {
            continue;
        }
        let block = beam_splitter_block(theta, k);
        for (j, slot) in out.iter_mut().enumerate().take(k + 1) {
            if k - j < ancilla_levels {
                *slot += pk * block[(j, k)].powi(2);
            }
        }
    }
    out
}

fn moments(p: &[f64]) -> (f64, f64) {
    let mean: f64 = p.iter().enumerate().map(|(k, &q)| k as f64 * q).sum();
    let second: f64 = p.iter().enumerate().map(|(k, &q)| (k * k) as f64 * q).sum();
    (mean, second - mean * mean)
}

fn finish(state: &FockState, config: &InterferometerConfig, det_levels: (usize, usize), cutoffs: [usize; 6]) -> FockMoments {
    let b1 = detect(&state.marginal(0), config.eta1.as_loss().theta(), det_levels.0);
    let b2 = detect(&state.marginal(1), config.eta2.as_loss().theta(), det_levels.1);
    let (mean_n1, var_n1) = moments(&b1);
    let (mean_n2, _) = moments(&b2);
    let kept = b1.iter().sum::<f64>().min(b2.iter().sum::<f64>());
    FockMoments {
        mean_n1,
        var_n1,
        mean_n2,
        norm_deficit: (1.0 - kept).max(0.0),
        cutoffs,
    }
}

fn simulate_fixed(config: &InterferometerConfig, c: [usize; 6]) -> FockMoments {
    let d = c.map(|x| x + 1);
    let mut state = FockState::product(&[
        seed_amplitudes(&config.seed_a1, d[0]),
        seed_amplitudes(&config.seed_a2, d[1]),
        vec![Complex64::new(1.0, 0.0)],
        vec![Complex64::new(1.0, 0.0)],
    ]);
    state.apply_squeezer(0, 1, config.opa_a.gain(), config.opa_a.phase(), (d[0], d[1]));
    state.apply_beam_splitter(0, 2, config.loss1.theta(), (d[0], d[2]));
    state.apply_beam_splitter(1, 3, config.loss2.theta(), (d[1], d[3]));
    state.apply_squeezer(0, 1, config.opa_b.gain(), config.opa_b.phase(), (d[0], d[1]));
    finish(&state, config, (d[4], d[5]), c)
}

/// Squeezer with an output window grown until the leaked mass is within `allowance`.
fn squeeze_adaptive(state: &mut FockState, gain: f64, phase: f64, allowance: f64, budget: f64) -> Result<()> {
    if gain == 0.0 {
        return Ok(());
    }
    let rate = gain.tanh().powi(2);
    let mut extra = ((allowance.ln() / rate.ln()).ceil().max(0.0) as usize).max(4);
    let others: usize = state.dims[2..].iter().product();
    loop {
        let out = (state.dims[0] + extra, state.dims[1] + extra);
        if out.0 * out.1 * others > MAX_AMPLITUDES {
            return Err(Error::TruncationBudgetExceeded {
                deficit: state.norm_deficit().max(allowance),
                budget,
            });
        }
        let before = state.norm_sqr();
        let mut trial = state.clone();
        trial.apply_squeezer(0, 1, gain, phase, out);
        if before - trial.norm_sqr() <= allowance {
            *state = trial;
            return Ok(());
        }
        extra *= 2;
    }
}

fn simulate_adaptive(config: &InterferometerConfig, budget: f64) -> Result<FockMoments> {
    let mut state = FockState::product(&[
        seed_amplitudes(&config.seed_a1, seed_levels(&config.seed_a1, budget)),
        seed_amplitudes(&config.seed_a2, seed_levels(&config.seed_a2, budget)),
        vec![Complex64::new(1.0, 0.0)],
        vec![Complex64::new(1.0, 0.0)],
    ]);
    let trim = |state: &mut FockState| {
        let dims = state.trimmed_dims(budget / 32.0);
        state.truncate(&dims);
    };
    squeeze_adaptive(&mut state, config.opa_a.gain(), config.opa_a.phase(), budget / 4.0, budget)?;
    trim(&mut state);
    // ancilla windows as large as the arm: these beam splitters are exact
    let (n1, n2) = (state.dims[0], state.dims[1]);
    state.apply_beam_splitter(0, 2, config.loss1.theta(), (n1, n1));
    state.apply_beam_splitter(1, 3, config.loss2.theta(), (n2, n2));
    trim(&mut state);
    squeeze_adaptive(&mut state, config.opa_b.gain(), config.opa_b.phase(), budget / 4.0, budget)?;
    trim(&mut state);
    let d = state.dims.clone();
    let cutoffs = [d[0] - 1, d[1] - 1, d[2] - 1, d[3] - 1, d[0] - 1, d[1] - 1];
    Ok(finish(&state, config, (d[0], d[1]), cutoffs))
}

/// Simulates the circuit at relative phase `phi` (with `phi_B` kept) and returns
/// photon statistics at both detectors.
pub fn fock_simulate(config: &InterferometerConfig, phi: f64, options: &FockOptions) -> Result<FockMoments> {
    check_preconditions(config)?;
    let budget = options.budget;
    let config = config.at_phase(phi);
    match options.cutoffs {
        None => {
            let r = simulate_adaptive(&config, budget)?;
            if r.norm_deficit > budget {
                return Err(Error::TruncationBudgetExceeded {
                    deficit: r.norm_deficit,
                    budget,
                });
            }
            Ok(r)
        }
        Some(cutoffs) => {
            let first = simulate_fixed(&config, cutoffs);
            if first.norm_deficit <= budget {
                return Ok(first);
            }
            let doubled = simulate_fixed(&config, cutoffs.map(|c| (2 * c).max(1)));
            if doubled.norm_deficit <= budget {
                Ok(doubled)
            } else {
                Err(Error::TruncationBudgetExceeded {
                    deficit: doubled.norm_deficit,
                    budget,
                })
            }
        }
    }
}
