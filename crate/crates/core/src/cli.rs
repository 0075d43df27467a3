//! Command-line front end. [`run`] is the whole program minus process exit, so
//! it can be driven from tests with in-memory output streams.
//!
//! Exit codes: 0 on success, 1 when the physics rejects the request (dark or
//! degenerate configuration, divergent sensitivity, failed verification), 2 on
//! usage and configuration errors.

use std::ffi::OsString;
use std::fs;
use std::io::Write;
use std::path::{Path, PathBuf};
use std::time::{SystemTime, UNIX_EPOCH};

use clap::{Args, Parser, Subcommand, ValueEnum};
use serde_json::{json, Map, Value};

use crate::analytic;
use crate::config::{ConfigFile, SeedField, SeedJson};
use crate::error::{Error, Result};
use crate::interferometer::{build_transfer, coefficient_moduli, InterferometerConfig, SeedMode, SeedState};
use crate::oracle::verify::{run_verify, Engine, VerifyOptions};
use crate::sweep::{self, Axis, Figure, SeedKind, SweepSpec};

#[derive(Debug, Parser)]
#[command(name = "nli", version, about = "Seeded, lossy SU(1,1) nonlinear interferometer calculator")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Debug, Clone, Default, Args)]
struct ParamArgs {
    /// JSON configuration file; flags take precedence over its values.
    #[arg(long, value_name = "PATH")]
    config: Option<PathBuf>,
    /// Gain of both OPAs.
    #[arg(long, allow_negative_numbers = true, conflicts_with_all = ["gain_a", "gain_b"])]
    gain: Option<f64>,
    #[arg(long, allow_negative_numbers = true)]
    gain_a: Option<f64>,
    #[arg(long, allow_negative_numbers = true)]
    gain_b: Option<f64>,
    #[arg(long, allow_negative_numbers = true)]
    phase_a: Option<f64>,
    #[arg(long, allow_negative_numbers = true)]
    phase_b: Option<f64>,
    /// Internal transmission of the detected arm.
    #[arg(long, allow_negative_numbers = true)]
    t1: Option<f64>,
    /// Internal transmission of the undetected arm.
    #[arg(long, allow_negative_numbers = true)]
    t2: Option<f64>,
    /// Efficiency of detector D1.
    #[arg(long, allow_negative_numbers = true)]
    eta1: Option<f64>,
    /// Efficiency of detector D2 (default 1).
    #[arg(long, allow_negative_numbers = true)]
    eta2: Option<f64>,
    /// Number state |m> in the undetected mode a2.
    #[arg(long, value_name = "M")]
    seed_m: Option<u32>,
    /// Coherent state with |mu|^2 photons (phase 0) in the undetected mode a2.
    #[arg(long, value_name = "MU_SQ", conflicts_with_all = ["seed_m", "seed_n"])]
    seed_mu_sq: Option<f64>,
    /// Number state |n> in the detected mode a1 (mean count and visibility only).
    #[arg(long, value_name = "N")]
    seed_n: Option<u32>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
enum OutputFormat {
    Csv,
    Json,
    Pretty,
}

#[derive(Debug, Clone, Default, Args)]
struct OutputArgs {
    /// Output format (default: pretty, csv for sweeps).
    #[arg(long, value_enum)]
    output: Option<OutputFormat>,
    /// Write the result to a file instead of stdout.
    #[arg(long, value_name = "PATH")]
    out: Option<PathBuf>,
    /// Also write `<out>.meta.json` with the invocation and a timestamp.
    #[arg(long, requires = "out")]
    meta: bool,
}

#[derive(Debug, Clone, Copy, ValueEnum)]
enum FigureArg {
    Fig2,
    Fig3,
    Fig4a,
    Fig4b,
    Fig4c,
    Custom,
}

#[derive(Debug, Clone, Copy, ValueEnum)]
enum AxisArg {
    #[value(name = "t_both")]
    TBoth,
    T2,
    T1,
}

#[derive(Debug, Clone, Copy, ValueEnum)]
enum SeedKindArg {
    Number,
    Coherent,
}

#[derive(Debug, Clone, Copy, ValueEnum)]
enum EngineArg {
    Moment,
    Fock,
    Gaussian,
    All,
}

#[derive(Debug, Subcommand)]
enum Command {
    /// Transfer coefficients of both output modes.
    Coeffs {
        #[command(flatten)]
        params: ParamArgs,
        /// Relative phase phi_A - phi_B (default: from the OPA phases).
        #[arg(long, allow_negative_numbers = true)]
        phi: Option<f64>,
        #[command(flatten)]
        out: OutputArgs,
    },
    /// Every D1 observable at one phase.
    Observe {
        #[command(flatten)]
        params: ParamArgs,
        #[arg(long, allow_negative_numbers = true)]
        phi: Option<f64>,
        #[command(flatten)]
        out: OutputArgs,
    },
    /// Fringe visibility at D1.
    Visibility {
        #[command(flatten)]
        params: ParamArgs,
        #[command(flatten)]
        out: OutputArgs,
    },
    /// Fringe contrast (max - min of the mean count) at D1.
    Contrast {
        #[command(flatten)]
        params: ParamArgs,
        #[command(flatten)]
        out: OutputArgs,
    },
    /// Phase variance at --phi, or its minimum over phi when --phi is absent.
    Sensitivity {
        #[command(flatten)]
        params: ParamArgs,
        #[arg(long, allow_negative_numbers = true)]
        phi: Option<f64>,
        #[command(flatten)]
        out: OutputArgs,
    },
    /// Signal-to-noise ratio <N1>^2 / Var(N1).
    Snr {
        #[command(flatten)]
        params: ParamArgs,
        #[arg(long, allow_negative_numbers = true)]
        phi: Option<f64>,
        #[command(flatten)]
        out: OutputArgs,
    },
    /// Tabulate a figure's data; parameters default to the figure set.
    Sweep {
        #[command(flatten)]
        params: ParamArgs,
        #[arg(long, value_enum)]
        figure: FigureArg,
        /// Transmission axis (fig4 panels fix it; required for custom grids).
        #[arg(long, value_enum)]
        axis: Option<AxisArg>,
        /// Comma-separated seed photon numbers, ascending.
        #[arg(long, value_delimiter = ',', conflicts_with = "m_max")]
        m_values: Option<Vec<f64>>,
        /// Use m = 0, 1, ..., M_MAX.
        #[arg(long)]
        m_max: Option<u32>,
        /// Append log-spaced m values up to STOP, as `STOP:POINTS`.
        #[arg(long, value_name = "STOP:POINTS")]
        m_log_extend: Option<String>,
        /// Comma-separated transmissions for the grid axis.
        #[arg(long, value_delimiter = ',', conflicts_with = "t_points")]
        t_values: Option<Vec<f64>>,
        /// Uniform grid of this many transmissions on [0, 1].
        #[arg(long)]
        t_points: Option<usize>,
        #[arg(long, value_enum, default_value = "number")]
        seed_kind: SeedKindArg,
        #[command(flatten)]
        out: OutputArgs,
    },
    /// Cross-check the closed forms against the oracle engines.
    Verify {
        #[arg(long, value_enum, default_value = "all")]
        engine: EngineArg,
        /// Trials per engine (default: 1000 moment, 200 fock, 200 gaussian).
        #[arg(long)]
        trials: Option<usize>,
        /// Tolerance applied to every check (default: per engine).
        #[arg(long)]
        rel_tol: Option<f64>,
        /// Seed of the random configuration generator.
        #[arg(long, default_value_t = 0x5eed)]
        seed: u64,
        #[command(flatten)]
        out: OutputArgs,
    },
}

/// A labelled scalar; `None` where the quantity is undefined.
struct Field {
    name: &'static str,
    value: Option<f64>,
    unit: &'static str,
}

fn field(name: &'static str, value: f64, unit: &'static str) -> Field {
    Field {
        name,
        value: Some(value),
        unit,
    }
}

fn render_fields(fields: &[Field], format: OutputFormat) -> String {
    match format {
        OutputFormat::Csv => {
            let header: Vec<&str> = fields.iter().map(|f| f.name).collect();
            let row: Vec<String> = fields
                .iter()
                .map(|f| f.value.map(|v| format!("{v:.16e}")).unwrap_or_default())
                .collect();
            format!("{}\n{}\n", header.join(","), row.join(","))
        }
        OutputFormat::Json => {
            let mut obj = Map::new();
            for f in fields {
                obj.insert(f.name.into(), f.value.map_or(Value::Null, Value::from));
            }
            serde_json::to_string_pretty(&Value::Object(obj)).expect("fields serialize") + "\n"
        }
        OutputFormat::Pretty => {
            let width = fields.iter().map(|f| f.name.len()).max().unwrap_or(0);
            fields
                .iter()
                .map(|f| match f.value {
                    Some(v) => format!("{:<width$}  {}{}{}\n", f.name, pretty_number(v), if f.unit.is_empty() { "" } else { " " }, f.unit),
                    None => format!("{:<width$}  undefined\n", f.name),
                })
                .collect()
        }
    }
}

fn pretty_number(v: f64) -> String {
    if v != 0.0 && (v.abs() < 1e-3 || v.abs() >= 1e6) {
        format!("{v:.6e}")
    } else {
        format!("{v:.6}")
    }
}

fn usage(msg: impl Into<String>) -> Error {
    Error::Config(msg.into())
}

impl ParamArgs {
    fn file(&self) -> Result<ConfigFile> {
        match &self.config {
            None => Ok(ConfigFile::default()),
            Some(path) => {
                let text = fs::read_to_string(path)
                    .map_err(|e| usage(format!("cannot read config {}: {e}", path.display())))?;
                ConfigFile::from_json(&text)
            }
        }
    }

    fn flags(&self) -> ConfigFile {
        ConfigFile {
            gain_a: self.gain.or(self.gain_a),
            gain_b: self.gain.or(self.gain_b),
            phase_a: self.phase_a,
            phase_b: self.phase_b,
            t1: self.t1,
            t2: self.t2,
            eta1: self.eta1,
            eta2: self.eta2,
            seed: None,
        }
    }

    fn seed_flags(&self) -> Result<Vec<(SeedMode, SeedState)>> {
        let mut out = Vec::new();
        if let Some(n) = self.seed_n {
            out.push((SeedMode::Detected, SeedState::Number(n)));
        }
        if let Some(m) = self.seed_m {
            out.push((SeedMode::Undetected, SeedState::Number(m)));
        }
        if let Some(mu_sq) = self.seed_mu_sq {
            out.push((SeedMode::Undetected, SeedState::coherent_with_mean(mu_sq)?));
        }
        Ok(out)
    }

    /// File values, then flags, on top of `base`.
    fn resolve(&self, base: ConfigFile) -> Result<InterferometerConfig> {
        let mut merged = base.overlay(&self.file()?).overlay(&self.flags());
        let mut seeds: Vec<SeedJson> = match merged.seed.take() {
            None => Vec::new(),
            Some(SeedField::One(s)) => vec![s],
            Some(SeedField::Many(v)) => v,
        };
        for (mode, state) in self.seed_flags()? {
            let json = SeedJson::from_state(mode, state);
            seeds.retain(|s| s.mode != json.mode);
            seeds.push(json);
        }
        merged.seed = Some(SeedField::Many(seeds));
        let config = merged.to_config()?;
        if !config.seed_a1.is_vacuum() && matches!(config.seed_a2, SeedState::Coherent(_)) {
            return Err(usage("a seeded detected mode cannot be combined with a coherent seed"));
        }
        Ok(config)
    }
}

fn seed_numbers(config: &InterferometerConfig) -> Result<(f64, f64)> {
    let n = match config.seed_a1 {
        SeedState::Vacuum => 0.0,
        SeedState::Number(n) => n as f64,
        SeedState::Coherent(_) => {
            return Err(Error::Unsupported("coherent seeding of the detected mode".into()));
        }
    };
    Ok((n, config.seed_a2.mean_photons()))
}

fn undetected_seed_only(config: &InterferometerConfig, what: &str) -> Result<SeedState> {
    if config.seed_a1.is_vacuum() {
        Ok(config.seed_a2)
    } else {
        Err(Error::Unsupported(format!("{what} with a seeded detected mode")))
    }
}

struct Rendered {
    text: String,
    format: OutputFormat,
}

fn cmd_coeffs(config: &InterferometerConfig, phi: f64) -> Vec<Field> {
    let t = build_transfer(&config.at_phase(phi));
    let m = coefficient_moduli(config, phi);
    let mut f = vec![field("phi", phi, "rad")];
    for (name_re, name_im, c) in [
        ("A1_re", "A1_im", t.a1),
        ("alpha1_re", "alpha1_im", t.alpha1),
        ("B1_re", "B1_im", t.b1),
        ("beta1_re", "beta1_im", t.beta1),
        ("A2_re", "A2_im", t.a2),
        ("alpha2_re", "alpha2_im", t.alpha2),
        ("B2_re", "B2_im", t.b2),
        ("beta2_re", "beta2_im", t.beta2),
    ] {
        f.push(field(name_re, c.re, ""));
        f.push(field(name_im, c.im, ""));
    }
    f.extend([
        field("A1_sq", m.a1_sq, ""),
        field("alpha1_sq", m.alpha1_sq, ""),
        field("B1_sq", m.b1_sq, ""),
        field("beta1_sq", m.beta1_sq, ""),
        field("commutator_residual_b1", t.commutator_residual_row1(), ""),
        field("commutator_residual_b2", t.commutator_residual_row2(), ""),
    ]);
    f
}

fn cmd_observe(config: &InterferometerConfig, phi: f64) -> Result<Vec<Field>> {
    let r = analytic::observe(config, phi)?;
    Ok(vec![
        field("phi", r.phi, "rad"),
        field("mean_n1", r.mean_n1, "photons"),
        Field { name: "var_n1", value: r.var_n1, unit: "photons^2" },
        Field { name: "visibility", value: r.visibility, unit: "" },
        field("contrast", r.contrast, "photons"),
        Field { name: "delta_phi_sq", value: r.delta_phi_sq, unit: "rad^2" },
        Field { name: "snr", value: r.snr, unit: "" },
    ])
}

fn cmd_sensitivity(config: &InterferometerConfig, phi: Option<f64>) -> Result<Vec<Field>> {
    let seed = undetected_seed_only(config, "phase sensitivity")?;
    let gain = analytic::reference_gain(config);
    let ql0 = analytic::ql_phase_variance(0.0, gain)?;
    match phi {
        Some(phi) => {
            let v = analytic::phase_variance(config, &seed, phi)?;
            Ok(vec![
                field("phi", phi, "rad"),
                field("delta_phi_sq", v, "rad^2"),
                field("ratio_db", analytic::ratio_db(v, ql0)?, "dB"),
            ])
        }
        None => {
            let o = analytic::minimize_phase_variance(config, &seed)?;
            Ok(vec![
                field("phi_min", o.phi_min, "rad"),
                field("delta_phi_sq_min", o.value, "rad^2"),
                field("delta_phi_sq_ql", o.ql_value, "rad^2"),
                field("ratio_db", o.ratio_db, "dB"),
                field("ql_ratio_db", analytic::ratio_db(o.ql_value, ql0)?, "dB"),
            ])
        }
    }
}

#[allow(clippy::too_many_arguments)]
fn sweep_spec(
    figure: FigureArg,
    axis: Option<AxisArg>,
    m_values: Option<Vec<f64>>,
    m_max: Option<u32>,
    m_log_extend: Option<String>,
    t_values: Option<Vec<f64>>,
    t_points: Option<usize>,
    seed_kind: SeedKindArg,
    base: InterferometerConfig,
) -> Result<SweepSpec> {
    let figure = match figure {
        FigureArg::Fig2 => Figure::Fig2,
        FigureArg::Fig3 => Figure::Fig3,
        FigureArg::Fig4a => Figure::Fig4a,
        FigureArg::Fig4b => Figure::Fig4b,
        FigureArg::Fig4c => Figure::Fig4c,
        FigureArg::Custom => Figure::Custom,
    };
    let mut spec = SweepSpec::for_figure(figure);
    spec.base_config = base;
    spec.seed_kind = match seed_kind {
        SeedKindArg::Number => SeedKind::Number,
        SeedKindArg::Coherent => SeedKind::Coherent,
    };
    if let Some(v) = m_values {
        spec.m_values = v;
    }
    if let Some(max) = m_max {
        spec.m_values = sweep::integer_m_values(max);
    }
    if let Some(ext) = m_log_extend {
        let (stop, points) = ext
            .split_once(':')
            .and_then(|(s, p)| Some((s.parse::<f64>().ok()?, p.parse::<usize>().ok()?)))
            .ok_or_else(|| usage(format!("--m-log-extend expects STOP:POINTS, got `{ext}`")))?;
        let last = *spec.m_values.last().unwrap_or(&0.0);
        spec.m_values.extend(sweep::log_extension(last.max(1.0), stop, points));
    }
    let axis = axis.map(|a| match a {
        AxisArg::TBoth => Axis::TBoth,
        AxisArg::T2 => Axis::T2,
        AxisArg::T1 => Axis::T1,
    });
    let t_grid = match (t_values, t_points) {
        (Some(v), _) => Some(v),
        (None, Some(n)) => Some(sweep::unit_grid(n)),
        (None, None) => None,
    };
    match (&mut spec.grid, axis, t_grid) {
        (Some(grid), a, t) => {
            if let Some(a) = a {
                if a != grid.0 {
                    return Err(usage("this figure fixes its transmission axis"));
                }
            }
            if let Some(t) = t {
                grid.1 = t;
            }
        }
        (None, Some(a), t) if figure == Figure::Custom => {
            spec.grid = Some((a, t.unwrap_or_else(|| sweep::unit_grid(sweep::GRID_POINTS))));
        }
        (None, None, None) => {}
        (None, _, _) => return Err(usage("--axis and --t-values apply to fig4 and custom grids only")),
    }
    Ok(spec)
}

fn execute(command: Command) -> Result<(Rendered, OutputArgs, bool)> {
    let plain = || ConfigFile::default();
    let with_default = |o: &OutputArgs, d: OutputFormat| o.output.unwrap_or(d);
    match command {
        Command::Coeffs { params, phi, out } => {
            let c = params.resolve(plain())?;
            let phi = phi.unwrap_or(c.relative_phase());
            let fmt = with_default(&out, OutputFormat::Pretty);
            Ok((Rendered { text: render_fields(&cmd_coeffs(&c, phi), fmt), format: fmt }, out, true))
        }
        Command::Observe { params, phi, out } => {
            let c = params.resolve(plain())?;
            let phi = phi.unwrap_or(c.relative_phase());
            let fmt = with_default(&out, OutputFormat::Pretty);
            Ok((Rendered { text: render_fields(&cmd_observe(&c, phi)?, fmt), format: fmt }, out, true))
        }
        Command::Visibility { params, out } => {
            let c = params.resolve(plain())?;
            let (n, m) = seed_numbers(&c)?;
            let v = analytic::visibility(&c, n, m)?;
            let fmt = with_default(&out, OutputFormat::Pretty);
            Ok((Rendered { text: render_fields(&[field("visibility", v, "")], fmt), format: fmt }, out, true))
        }
        Command::Contrast { params, out } => {
            let c = params.resolve(plain())?;
            let (n, m) = seed_numbers(&c)?;
            let v = analytic::contrast(&c, n, m);
            let fmt = with_default(&out, OutputFormat::Pretty);
            Ok((Rendered { text: render_fields(&[field("contrast", v, "photons")], fmt), format: fmt }, out, true))
        }
        Command::Sensitivity { params, phi, out } => {
            let c = params.resolve(plain())?;
            let fmt = with_default(&out, OutputFormat::Pretty);
            Ok((Rendered { text: render_fields(&cmd_sensitivity(&c, phi)?, fmt), format: fmt }, out, true))
        }
        Command::Snr { params, phi, out } => {
            let c = params.resolve(plain())?;
            let phi = phi.unwrap_or(c.relative_phase());
            let seed = undetected_seed_only(&c, "SNR")?;
            let v = analytic::snr(&c, &seed, phi)?;
            let fmt = with_default(&out, OutputFormat::Pretty);
            let fields = [field("phi", phi, "rad"), field("snr", v, "")];
            Ok((Rendered { text: render_fields(&fields, fmt), format: fmt }, out, true))
        }
        Command::Sweep {
            params,
            figure,
            axis,
            m_values,
            m_max,
            m_log_extend,
            t_values,
            t_points,
            seed_kind,
            out,
        } => {
            if params.seed_m.is_some() || params.seed_mu_sq.is_some() || params.seed_n.is_some() {
                return Err(usage("sweeps set the seed from the m axis; seed flags do not apply"));
            }
            let base = params.resolve(ConfigFile::from_config(&sweep::figure_config()))?;
            let spec = sweep_spec(figure, axis, m_values, m_max, m_log_extend, t_values, t_points, seed_kind, base)?;
            let table = sweep::run(&spec)?;
            let fmt = with_default(&out, OutputFormat::Csv);
            let text = match fmt {
                OutputFormat::Csv => table.to_csv(),
                OutputFormat::Json => table.to_json(),
                OutputFormat::Pretty => table.to_pretty(),
            };
            Ok((Rendered { text, format: fmt }, out, true))
        }
        Command::Verify {
            engine,
            trials,
            rel_tol,
            seed,
            out,
        } => {
            let engine = match engine {
                EngineArg::Moment => Engine::Moment,
                EngineArg::Fock => Engine::Fock,
                EngineArg::Gaussian => Engine::Gaussian,
                EngineArg::All => Engine::All,
            };
            if let Some(tol) = rel_tol {
                if !(tol >= 0.0) {
                    return Err(usage(format!("--rel-tol must be nonnegative, got {tol}")));
                }
            }
            let report = run_verify(&VerifyOptions { engine, trials, rel_tol, seed });
            let fmt = with_default(&out, OutputFormat::Pretty);
            let text = match fmt {
                OutputFormat::Pretty => report.table(),
                OutputFormat::Json => serde_json::to_string_pretty(&report).expect("report serializes") + "\n",
                OutputFormat::Csv => {
                    let mut s = String::from("engine,check,trials,max_rel_dev,tolerance,errors,passed\n");
                    for c in &report.checks {
                        s.push_str(&format!(
                            "{},{},{},{:.16e},{:.16e},{},{}\n",
                            c.engine,
                            c.check.replace(',', ";"),
                            c.trials,
                            c.max_rel_dev,
                            c.tolerance,
                            c.errors,
                            c.passed()
                        ));
                    }
                    s
                }
            };
            Ok((Rendered { text, format: fmt }, out, report.passed()))
        }
    }
}

fn write_meta(path: &Path, argv: &[String], format: OutputFormat) -> Result<()> {
    let seconds = SystemTime::now().duration_since(UNIX_EPOCH).map(|d| d.as_secs()).unwrap_or(0);
    let meta = json!({
        "tool": "nli",
        "version": env!("CARGO_PKG_VERSION"),
        "argv": argv,
        "output": path.display().to_string(),
        "format": format!("{format:?}").to_lowercase(),
        "unix_time": seconds,
    });
    let mut name = path.as_os_str().to_owned();
    name.push(".meta.json");
    fs::write(PathBuf::from(name), serde_json::to_string_pretty(&meta).expect("meta serializes") + "\n")
        .map_err(|e| usage(format!("cannot write metadata: {e}")))
}

fn thread_count() -> Result<Option<usize>> {
    match std::env::var("NLI_THREADS") {
        Err(_) => Ok(None),
        Ok(v) => match v.trim().parse::<usize>() {
            Ok(n) if n > 0 => Ok(Some(n)),
            _ => Err(usage(format!("NLI_THREADS must be a positive integer, got `{v}`"))),
        },
    }
}

fn exit_code(e: &Error) -> i32 {
    if e.is_domain() {
        1
    } else {
        2
    }
}

/// Parses `args` (including the program name), runs the command and returns the exit code.
pub fn run<I, T>(args: I, stdout: &mut dyn Write, stderr: &mut dyn Write) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let args: Vec<OsString> = args.into_iter().map(Into::into).collect();
    let argv: Vec<String> = args.iter().map(|a| a.to_string_lossy().into_owned()).collect();
    let cli = match Cli::try_parse_from(&args) {
        Ok(cli) => cli,
        Err(e) => {
            let code = if e.use_stderr() { 2 } else { 0 };
            let text = e.render().to_string();
            let _ = if code == 0 { write!(stdout, "{text}") } else { write!(stderr, "{text}") };
            return code;
        }
    };

    let threads = match thread_count() {
        Ok(t) => t,
        Err(e) => {
            let _ = writeln!(stderr, "nli: {e}");
            return 2;
        }
    };
    let mut builder = rayon::ThreadPoolBuilder::new();
    if let Some(n) = threads {
        builder = builder.num_threads(n);
    }
    let pool = match builder.build() {
        Ok(p) => p,
        Err(e) => {
            let _ = writeln!(stderr, "nli: cannot start worker threads: {e}");
            return 2;
        }
    };

    let result = pool.install(|| execute(cli.command));
    let (rendered, out, ok) = match result {
        Ok(r) => r,
        Err(e) => {
            let _ = writeln!(stderr, "nli: {e}");
            return exit_code(&e);
        }
    };

    match &out.out {
        Some(path) => {
            if let Err(e) = fs::write(path, &rendered.text) {
                let _ = writeln!(stderr, "nli: cannot write {}: {e}", path.display());
                return 2;
            }
            if out.meta {
                if let Err(e) = write_meta(path, &argv, rendered.format) {
                    let _ = writeln!(stderr, "nli: {e}");
                    return 2;
                }
            }
        }
        None => {
            let _ = stdout.write_all(rendered.text.as_bytes());
        }
    }
    if ok {
        0
    } else {
        let _ = writeln!(stderr, "nli: verification failed: at least one check exceeded its tolerance");
        1
    }
}
