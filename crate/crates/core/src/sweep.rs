//! Parameter sweeps producing the data behind the reference figures.
//!
//! Rows are evaluated in parallel and emitted in ascending `(m, t)` order, so
//! the output of a sweep depends only on its [`SweepSpec`].

use std::f64::consts::PI;
use std::fmt::Write as _;
use std::str::FromStr;

use rayon::prelude::*;
use serde_json::{Map, Value};

use crate::analytic;
use crate::error::{Error, Result};
use crate::interferometer::{InterferometerConfig, LossChannel, SeedState};

pub const FIGURE_GAIN: f64 = 1e-3;
pub const FIGURE_T1: f64 = 0.6;
pub const FIGURE_T2: f64 = 0.4;
pub const FIGURE_ETA1: f64 = 0.3;
pub const FIGURE_ETA2: f64 = 1.0;
/// Largest seed photon number of the default `m` axis.
pub const FIGURE_M_MAX: u32 = 100;
/// Points per axis of the default transmission grid.
pub const GRID_POINTS: usize = 101;

/// The parameter set shared by all reference figures.
pub fn figure_config() -> InterferometerConfig {
    InterferometerConfig::balanced(FIGURE_GAIN, FIGURE_T1, FIGURE_T2, FIGURE_ETA1, FIGURE_ETA2)
        .expect("figure defaults are valid")
}

/// `0, 1, ..., max`.
pub fn integer_m_values(max: u32) -> Vec<f64> {
    (0..=max).map(f64::from).collect()
}

/// `points` values spaced logarithmically over `(start, stop]`, for extending an integer axis.
pub fn log_extension(start: f64, stop: f64, points: usize) -> Vec<f64> {
    if points == 0 || !(stop > start) || !(start > 0.0) {
        return Vec::new();
    }
    let (a, b) = (start.ln(), stop.ln());
    (1..=points)
        .map(|k| (a + (b - a) * k as f64 / points as f64).exp())
        .collect()
}

/// `0, 1/(points-1), ..., 1`.
pub fn unit_grid(points: usize) -> Vec<f64> {
    let last = points.saturating_sub(1).max(1) as f64;
    (0..points).map(|k| k as f64 / last).collect()
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Figure {
    Fig2,
    Fig3,
    Fig4a,
    Fig4b,
    Fig4c,
    Custom,
}

impl FromStr for Figure {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "fig2" => Ok(Figure::Fig2),
            "fig3" => Ok(Figure::Fig3),
            "fig4a" => Ok(Figure::Fig4a),
            "fig4b" => Ok(Figure::Fig4b),
            "fig4c" => Ok(Figure::Fig4c),
            "custom" => Ok(Figure::Custom),
            other => Err(Error::InvalidSweep(format!("unknown figure `{other}`"))),
        }
    }
}

/// Transmission axis of a visibility grid.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Axis {
    /// `T1 = T2 = t`.
    TBoth,
    /// `T2 = t`, `T1` from the base config.
    T2,
    /// `T1 = t`, `T2` from the base config.
    T1,
}

impl FromStr for Axis {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "t_both" => Ok(Axis::TBoth),
            "t2" => Ok(Axis::T2),
            "t1" => Ok(Axis::T1),
            other => Err(Error::InvalidSweep(format!("unknown axis `{other}` (expected t_both, t2 or t1)"))),
        }
    }
}

impl Axis {
    fn apply(self, base: &InterferometerConfig, t: f64) -> Result<InterferometerConfig> {
        let loss = LossChannel::new(t)?;
        let mut c = *base;
        match self {
            Axis::TBoth => {
                c.loss1 = loss;
                c.loss2 = loss;
            }
            Axis::T2 => c.loss2 = loss,
            Axis::T1 => c.loss1 = loss,
        }
        Ok(c)
    }
}

/// How the undetected mode is seeded with `m` photons on average.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum SeedKind {
    Number,
    Coherent,
}

impl SeedKind {
    fn state(self, m: f64) -> Result<SeedState> {
        match self {
            SeedKind::Number => {
                if m.fract() != 0.0 || m > u32::MAX as f64 {
                    return Err(Error::InvalidSweep(format!(
                        "number-state seeding needs integer m, got {m}"
                    )));
                }
                Ok(SeedState::Number(m as u32))
            }
            SeedKind::Coherent => SeedState::coherent_with_mean(m),
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct SweepSpec {
    pub figure: Figure,
    pub m_values: Vec<f64>,
    pub base_config: InterferometerConfig,
    pub grid: Option<(Axis, Vec<f64>)>,
    pub seed_kind: SeedKind,
}

impl SweepSpec {
    /// Default spec of a figure on the figure parameter set.
    pub fn for_figure(figure: Figure) -> Self {
        let grid = match figure {
            Figure::Fig4a => Some((Axis::TBoth, unit_grid(GRID_POINTS))),
            Figure::Fig4b => Some((Axis::T2, unit_grid(GRID_POINTS))),
            Figure::Fig4c => Some((Axis::T1, unit_grid(GRID_POINTS))),
            _ => None,
        };
        Self {
            figure,
            m_values: integer_m_values(FIGURE_M_MAX),
            base_config: figure_config(),
            grid,
            seed_kind: SeedKind::Number,
        }
    }

    pub fn validate(&self) -> Result<()> {
        if self.m_values.is_empty() {
            return Err(Error::InvalidSweep("m_values is empty".into()));
        }
        if self.m_values.iter().any(|m| !m.is_finite() || *m < 0.0) {
            return Err(Error::InvalidSweep("m_values must be finite and nonnegative".into()));
        }
        if self.m_values.windows(2).any(|w| w[0] >= w[1]) {
            return Err(Error::InvalidSweep("m_values must be strictly ascending".into()));
        }
        if let Some((_, t)) = &self.grid {
            if t.is_empty() || t.iter().any(|x| !(0.0..=1.0).contains(x)) {
                return Err(Error::InvalidSweep("grid values must be non-empty and lie in [0, 1]".into()));
            }
        }
        Ok(())
    }
}

/// One emitted row. `values` is `None` when the point was skipped.
#[derive(Debug, Clone, PartialEq)]
pub struct SweepRow {
    pub m: f64,
    pub t: Option<f64>,
    pub values: Option<Vec<f64>>,
    pub skip_reason: Option<String>,
}

impl SweepRow {
    /// Value of a named column.
    pub fn get(&self, table: &SweepTable, column: &str) -> Option<f64> {
        let k = table.columns.iter().position(|c| *c == column)?;
        self.values.as_ref().map(|v| v[k])
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct SweepTable {
    /// Value columns, excluding the `m` and `t` keys.
    pub columns: Vec<&'static str>,
    pub has_t: bool,
    pub rows: Vec<SweepRow>,
}

fn fmt_value(x: f64) -> String {
    format!("{x:.16e}")
}

impl SweepTable {
    fn any_skipped(&self) -> bool {
        self.rows.iter().any(|r| r.skip_reason.is_some())
    }

    fn header(&self) -> Vec<&str> {
        let mut h = Vec::new();
        if self.has_t {
            h.push("t");
        }
        h.push("m");
        h.extend(self.columns.iter().copied());
        if self.any_skipped() {
            h.push("skip_reason");
        }
        h
    }

    /// Column values of every non-skipped row.
    pub fn column(&self, name: &str) -> Vec<f64> {
        self.rows.iter().filter_map(|r| r.get(self, name)).collect()
    }

    /// CSV with a header row; numbers carry 17 significant digits.
    pub fn to_csv(&self) -> String {
        let skipped = self.any_skipped();
        let mut out = self.header().join(",");
        out.push('\n');
        for r in &self.rows {
            let mut cells = Vec::new();
            if self.has_t {
                cells.push(r.t.map(fmt_value).unwrap_or_default());
            }
            cells.push(fmt_value(r.m));
            match &r.values {
                Some(v) => cells.extend(v.iter().map(|&x| fmt_value(x))),
                None => cells.extend(self.columns.iter().map(|_| String::new())),
            }
            if skipped {
                cells.push(r.skip_reason.clone().unwrap_or_default().replace(',', ";"));
            }
            out.push_str(&cells.join(","));
            out.push('\n');
        }
        out
    }

    /// JSON array of row objects.
    pub fn to_json(&self) -> String {
        let rows: Vec<Value> = self
            .rows
            .iter()
            .map(|r| {
                let mut obj = Map::new();
                if let Some(t) = r.t {
                    obj.insert("t".into(), t.into());
                }
                obj.insert("m".into(), r.m.into());
                if let Some(v) = &r.values {
                    for (name, &x) in self.columns.iter().zip(v) {
                        obj.insert((*name).into(), x.into());
                    }
                }
                if let Some(reason) = &r.skip_reason {
                    obj.insert("skip_reason".into(), reason.clone().into());
                }
                Value::Object(obj)
            })
            .collect();
        serde_json::to_string_pretty(&Value::Array(rows)).expect("rows serialize") + "\n"
    }

    /// Aligned columns for reading in a terminal.
    pub fn to_pretty(&self) -> String {
        let mut out = String::new();
        for h in self.header() {
            let _ = write!(out, "{h:>16}");
        }
        out.push('\n');
        for r in &self.rows {
            if let Some(t) = r.t {
                let _ = write!(out, "{t:>16.4}");
            }
            let _ = write!(out, "{:>16.4}", r.m);
            match &r.values {
                Some(v) => v.iter().for_each(|x| {
                    let _ = write!(out, "{x:>16.6}");
                }),
                None => self.columns.iter().for_each(|_| {
                    let _ = write!(out, "{:>16}", "-");
                }),
            }
            if let Some(reason) = &r.skip_reason {
                let _ = write!(out, "  {reason}");
            }
            out.push('\n');
        }
        out
    }
}

fn row_from(m: f64, t: Option<f64>, result: Result<Vec<f64>>) -> Result<SweepRow> {
    match result {
        Ok(values) if values.iter().all(|v| v.is_finite()) => Ok(SweepRow {
            m,
            t,
            values: Some(values),
            skip_reason: None,
        }),
        Ok(_) => Ok(SweepRow {
            m,
            t,
            values: None,
            skip_reason: Some("non-finite value".into()),
        }),
        Err(e) if e.is_domain() => Ok(SweepRow {
            m,
            t,
            values: None,
            skip_reason: Some(e.to_string()),
        }),
        Err(e) => Err(e),
    }
}

fn require_gains(config: &InterferometerConfig) -> Result<()> {
    if config.opa_a.gain() > 0.0 && config.opa_b.gain() > 0.0 {
        Ok(())
    } else {
        Err(Error::InvalidSweep("figure sweeps need both gains > 0".into()))
    }
}

/// Rows `(m, visibility, contrast_ratio)`; the ratio is relative to `m = 0`.
pub fn run_fig2(base: &InterferometerConfig, m_values: &[f64]) -> Result<SweepTable> {
    run_fig2_with(base, m_values, SeedKind::Number)
}

pub fn run_fig2_with(base: &InterferometerConfig, m_values: &[f64], kind: SeedKind) -> Result<SweepTable> {
    require_gains(base)?;
    let c0 = analytic::contrast(base, 0.0, 0.0);
    let rows = m_values
        .par_iter()
        .map(|&m| {
            let mean_seed = kind.state(m)?.mean_photons();
            let v = analytic::visibility(base, 0.0, mean_seed);
            row_from(m, None, v.map(|v| vec![v, analytic::contrast(base, 0.0, mean_seed) / c0]))
        })
        .collect::<Result<Vec<_>>>()?;
    Ok(SweepTable {
        columns: vec!["visibility", "contrast_ratio"],
        has_t: false,
        rows,
    })
}

/// Rows `(m, phi_min, dphi_min_db, dphi_ql_db, snr_ratio)`.
///
/// `dphi_min_db` is the minimum phase variance relative to the unseeded
/// quantum limit; `snr_ratio` is the SNR at the dark fringe `phi = pi`
/// relative to its unseeded value.
pub fn run_fig3(base: &InterferometerConfig, m_values: &[f64]) -> Result<SweepTable> {
    run_fig3_with(base, m_values, SeedKind::Number)
}

pub fn run_fig3_with(base: &InterferometerConfig, m_values: &[f64], kind: SeedKind) -> Result<SweepTable> {
    require_gains(base)?;
    let snr0 = analytic::snr(base, &kind.state(0.0)?, PI)?;
    let rows = m_values
        .par_iter()
        .map(|&m| {
            let seed = kind.state(m)?;
            let values = analytic::minimize_phase_variance(base, &seed).and_then(|opt| {
                let snr = analytic::snr(base, &seed, PI)?;
                Ok(vec![opt.phi_min, opt.ratio_db, 0.0 - 10.0 * (m + 1.0).log10(), snr / snr0])
            });
            row_from(m, None, values)
        })
        .collect::<Result<Vec<_>>>()?;
    Ok(SweepTable {
        columns: vec!["phi_min", "dphi_min_db", "dphi_ql_db", "snr_ratio"],
        has_t: false,
        rows,
    })
}

/// Visibility grid rows `(t, m, visibility)`, ordered by `m` then `t`.
pub fn run_fig4(base: &InterferometerConfig, axis: Axis, t_values: &[f64], m_values: &[f64]) -> Result<SweepTable> {
    run_fig4_with(base, axis, t_values, m_values, SeedKind::Number)
}

pub fn run_fig4_with(
    base: &InterferometerConfig,
    axis: Axis,
    t_values: &[f64],
    m_values: &[f64],
    kind: SeedKind,
) -> Result<SweepTable> {
    if base.opa_b.gain() <= 0.0 {
        return Err(Error::InvalidSweep("visibility grids need G_B > 0".into()));
    }
    let cells: Vec<(f64, f64)> = m_values
        .iter()
        .flat_map(|&m| t_values.iter().map(move |&t| (m, t)))
        .collect();
    let rows = cells
        .par_iter()
        .map(|&(m, t)| {
            let mean_seed = kind.state(m)?.mean_photons();
            let c = axis.apply(base, t)?;
            row_from(m, Some(t), analytic::visibility(&c, 0.0, mean_seed).map(|v| vec![v]))
        })
        .collect::<Result<Vec<_>>>()?;
    Ok(SweepTable {
        columns: vec!["visibility"],
        has_t: true,
        rows,
    })
}

/// Runs a validated spec.
pub fn run(spec: &SweepSpec) -> Result<SweepTable> {
    spec.validate()?;
    let base = &spec.base_config;
    let kind = spec.seed_kind;
    match (spec.figure, &spec.grid) {
        (Figure::Fig2, None) => run_fig2_with(base, &spec.m_values, kind),
        (Figure::Fig3, None) => run_fig3_with(base, &spec.m_values, kind),
        (Figure::Fig4a | Figure::Fig4b | Figure::Fig4c | Figure::Custom, Some((axis, t))) => {
            run_fig4_with(base, *axis, t, &spec.m_values, kind)
        }
        (Figure::Custom, None) => run_fig2_with(base, &spec.m_values, kind),
        (Figure::Fig2 | Figure::Fig3, Some(_)) => Err(Error::InvalidSweep("fig2 and fig3 take no grid".into())),
        (_, None) => Err(Error::InvalidSweep("fig4 sweeps need a transmission grid".into())),
    }
}
