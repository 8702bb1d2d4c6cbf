//! Command-line front end.
//!
//! Exit codes: 0 success, 1 configuration or IO error, 2 unstable operating
//! point, 3 numerical failure (including failed self-test checks).

use std::ffi::OsString;
use std::io::Write;
use std::path::{Path, PathBuf};

use clap::{Args, Parser, Subcommand, ValueEnum};

use crate::commands::{self, default_detection_grid, DeltaSpec, Report, Setup, SpectrumSource};
use crate::config::{load_params, preset};
use crate::csv::{fmt_e, CsvDoc};
use crate::error::{Error, Result};
use crate::selftest;
use crate::units::{parse_frequency, GridSpec};

#[derive(Debug, Parser)]
#[command(name = "optomech", version, about = "Spectra, poles and cooling of a radiation-pressure coupled oscillator")]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Lone-oscillator equilibrium; with --delta also the coupled moments.
    Equilibrium {
        #[command(flatten)]
        system: SystemArgs,
        /// Effective detuning (`omega_m` or a frequency).
        #[arg(long, value_parser = parse_delta)]
        delta: Option<DeltaSpec>,
    },
    /// Position and momentum fluctuation spectra as CSV.
    Spectra {
        #[command(flatten)]
        system: SystemArgs,
        #[command(flatten)]
        point: PointArgs,
        /// Frequency grid `min:max:n[:log]`; default is a pole-clustered grid on ±3ω.
        #[arg(long, value_parser = parse_grid)]
        grid: Option<GridSpec>,
        /// Uniform points of the automatic grid.
        #[arg(long, default_value_t = 2001)]
        auto_points: usize,
    },
    /// Zeros of the characteristic polynomial.
    Poles {
        #[command(flatten)]
        system: SystemArgs,
        #[command(flatten)]
        point: PointArgs,
    },
    /// Routh–Hurwitz stability report; exits with 2 when unstable.
    Stability {
        #[command(flatten)]
        system: SystemArgs,
        #[command(flatten)]
        point: PointArgs,
    },
    /// Cooling factor map over detuning and cavity decay.
    CoolingMap {
        #[command(flatten)]
        system: SystemArgs,
        /// Detuning grid `min:max:n[:log]`.
        #[arg(long, value_parser = parse_grid)]
        delta_grid: GridSpec,
        /// Cavity decay grid `min:max:n[:log]`.
        #[arg(long, value_parser = parse_grid)]
        gamma_grid: GridSpec,
    },
    /// Homodyne spectrum at local-oscillator phase θ.
    Homodyne {
        #[command(flatten)]
        system: SystemArgs,
        #[command(flatten)]
        point: PointArgs,
        /// Local-oscillator phase in radians.
        #[arg(long, allow_hyphen_values = true, default_value_t = 0.0)]
        theta: f64,
        /// Offset grid `min:max:n[:log]`; default `0:2ω:2001`.
        #[arg(long, value_parser = parse_grid)]
        grid: Option<GridSpec>,
    },
    /// Heterodyne spectrum against the offset from the laser frequency.
    Heterodyne {
        #[command(flatten)]
        system: SystemArgs,
        #[command(flatten)]
        point: PointArgs,
        /// Offset grid `min:max:n[:log]`; default `0:2ω:2001`.
        #[arg(long, value_parser = parse_grid)]
        grid: Option<GridSpec>,
        /// Detector bandwidth for the elastic lineshape.
        #[arg(long, value_parser = parse_freq)]
        kappa: Option<f64>,
        /// Repeat the computation over a parameter.
        #[arg(long, value_enum, requires = "values")]
        sweep: Option<SweepParam>,
        /// Comma-separated values of the swept parameter.
        #[arg(long, value_delimiter = ',', value_parser = parse_freq, requires = "sweep")]
        values: Vec<f64>,
    },
    /// Cross-method oracle checks.
    Selftest,
}

/// Parameters that `heterodyne --sweep` can vary.
#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum SweepParam {
    #[value(name = "gamma_c")]
    GammaC,
}

#[derive(Debug, Args)]
pub struct SystemArgs {
    /// Parameter file (`key = value` lines).
    #[arg(long, conflicts_with = "preset")]
    pub params: Option<PathBuf>,
    /// Built-in parameter set.
    #[arg(long)]
    pub preset: Option<String>,
    /// Cavity decay rate override (rad/s, or with an `hz` suffix).
    #[arg(long, value_parser = parse_freq)]
    pub gamma_c: Option<f64>,
    /// Bath occupation: `flat`, `flat:N`, `ohmic` or `table:PATH`.
    #[arg(long, default_value = "flat", value_parser = parse_spectrum)]
    pub spectrum: SpectrumSource,
    /// Output file; standard output when absent.
    #[arg(long, short)]
    pub output: Option<PathBuf>,
}

#[derive(Debug, Args)]
pub struct PointArgs {
    /// Effective detuning: `omega_m` or a frequency.
    #[arg(long, default_value = "omega_m", allow_hyphen_values = true, value_parser = parse_delta)]
    pub delta: DeltaSpec,
}

fn parse_freq(s: &str) -> std::result::Result<f64, String> {
    parse_frequency(s).map_err(|e| e.to_string())
}

fn parse_grid(s: &str) -> std::result::Result<GridSpec, String> {
    GridSpec::parse(s).map_err(|e| e.to_string())
}

fn parse_delta(s: &str) -> std::result::Result<DeltaSpec, String> {
    DeltaSpec::parse(s).map_err(|e| e.to_string())
}

fn parse_spectrum(s: &str) -> std::result::Result<SpectrumSource, String> {
    SpectrumSource::parse(s).map_err(|e| e.to_string())
}

impl SystemArgs {
    fn setup(&self) -> Result<Setup> {
        let mut params = match (&self.params, &self.preset) {
            (Some(path), _) => load_params(path)?,
            (None, Some(name)) => preset(name)?,
            (None, None) => return Err(Error::config("one of --params or --preset is required")),
        };
        if let Some(gc) = self.gamma_c {
            params = params.with_cavity_decay(gc).map_err(|e| Error::config(e.to_string()))?;
        }
        Setup::new(params, self.spectrum.clone())
    }
}

/// Output sink: a file or the supplied writer.
struct Sink<'a, W: Write> {
    path: Option<&'a Path>,
    out: &'a mut W,
}

impl<W: Write> Sink<'_, W> {
    fn text(&mut self, s: &str) -> Result<()> {
        match self.path {
            Some(p) => std::fs::write(p, s).map_err(|e| Error::io(p, e)),
            None => self.out.write_all(s.as_bytes()).map_err(|e| Error::io("<stdout>", e)),
        }
    }

    fn csv(&mut self, doc: &CsvDoc) -> Result<()> {
        match self.path {
            Some(p) => doc.save(p),
            None => doc.write_to(&mut *self.out).map_err(|e| Error::io("<stdout>", e)),
        }
    }
}

fn report(setup: &Setup, command: &str, r: &Report) -> String {
    r.render(&setup.header(command))
}

fn sweep_path(base: &Path, index: usize) -> PathBuf {
    let stem = base.file_stem().and_then(|s| s.to_str()).unwrap_or("out");
    let ext = base.extension().and_then(|s| s.to_str()).unwrap_or("csv");
    base.with_file_name(format!("{stem}_{index:02}.{ext}"))
}

/// Runs a parsed command, writing results to `out` unless an output file was
/// requested. Summary lines of file-producing commands also go to `out`.
pub fn execute<W: Write>(cli: &Cli, out: &mut W) -> Result<()> {
    match &cli.command {
        Command::Equilibrium { system, delta } => {
            let setup = system.setup()?;
            let r = commands::equilibrium(&setup, *delta)?;
            Sink { path: system.output.as_deref(), out }.text(&report(&setup, "equilibrium", &r))
        }
        Command::Spectra { system, point, grid, auto_points } => {
            let setup = system.setup()?;
            let doc = commands::spectra(&setup, point.delta, grid.map(|g| g.points()), *auto_points)?;
            Sink { path: system.output.as_deref(), out }.csv(&doc)
        }
        Command::Poles { system, point } => {
            let setup = system.setup()?;
            let r = commands::poles(&setup, point.delta)?;
            Sink { path: system.output.as_deref(), out }.text(&report(&setup, "poles", &r))
        }
        Command::Stability { system, point } => {
            let setup = system.setup()?;
            let (r, err) = commands::stability(&setup, point.delta);
            Sink { path: system.output.as_deref(), out }.text(&report(&setup, "stability", &r))?;
            err.map_or(Ok(()), Err)
        }
        Command::CoolingMap { system, delta_grid, gamma_grid } => {
            let setup = system.setup()?;
            let doc = commands::cooling_map_csv(&setup, &delta_grid.points(), &gamma_grid.points())?;
            Sink { path: system.output.as_deref(), out }.csv(&doc)
        }
        Command::Homodyne { system, point, theta, grid } => {
            let setup = system.setup()?;
            let g = grid.map_or_else(|| default_detection_grid(&setup.params, 2001), |g| g.points());
            let doc = commands::homodyne(&setup, point.delta, *theta, &g)?;
            Sink { path: system.output.as_deref(), out }.csv(&doc)
        }
        Command::Heterodyne { system, point, grid, kappa, sweep, values } => {
            let setup = system.setup()?;
            let g = grid.map_or_else(|| default_detection_grid(&setup.params, 2001), |g| g.points());
            if sweep.is_none() {
                let (doc, _) = commands::heterodyne(&setup, point.delta, &g, *kappa)?;
                return Sink { path: system.output.as_deref(), out }.csv(&doc);
            }
            let base = system.output.as_deref().ok_or_else(|| Error::config("--sweep needs --output as a file name template"))?;
            for (i, &gc) in values.iter().enumerate() {
                let params = setup.params.with_cavity_decay(gc).map_err(|e| Error::config(e.to_string()))?;
                let s = Setup::new(params, setup.source.clone())?;
                let (doc, peaks) = commands::heterodyne(&s, point.delta, &g, *kappa)?;
                let path = sweep_path(base, i);
                doc.save(&path)?;
                writeln!(out, "gamma_c = {} peaks = {} file = {}", fmt_e(gc), peaks, path.display())
                    .map_err(|e| Error::io("<stdout>", e))?;
            }
            Ok(())
        }
        Command::Selftest => {
            let checks = selftest::run();
            for c in &checks {
                writeln!(out, "{}", c.line()).map_err(|e| Error::io("<stdout>", e))?;
            }
            match checks.iter().filter(|c| !c.passed).count() {
                0 => Ok(()),
                n => Err(Error::ChecksFailed(n)),
            }
        }
    }
}

/// Parses `args` and runs the command; returns the process exit code.
/// Diagnostics go to `err`.
pub fn run<I, T, W, E>(args: I, out: &mut W, err: &mut E) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
    W: Write,
    E: Write,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(c) => c,
        Err(e) => {
            let code = if e.use_stderr() { 1 } else { 0 };
            let _ = write!(err, "{}", e.render());
            return code;
        }
    };
    match execute(&cli, out) {
        Ok(()) => 0,
        Err(e) => {
            let _ = writeln!(err, "error: {e}");
            e.exit_code()
        }
    }
}
