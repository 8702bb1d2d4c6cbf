//! Command implementations. Each returns either a key/value [`Report`] or one
//! or more CSV documents; nothing here touches the process environment
//! except the thread cap read by [`crate::sweep`].

use optomech_core::bath_spectrum::{effective_occupation, DampingKernel, OccupationSpectrum};
use optomech_core::detection::{find_peaks, heterodyne_spectrum, homodyne_spectrum};
use optomech_core::energy_cooling::energy_quadrature;
use optomech_core::fluctuation_spectra::{auto_grid, moment_integrals, Spectra, SPECTRUM_COLUMNS};
use optomech_core::optomech_linear::{operating_point, OperatingPoint, StabilityCriterion};
use optomech_core::oscillator_markov::{diffusion_coefficients, equilibrium_moments, mean_mechanical_energy_eq};
use optomech_core::params::{SystemParams, HBAR};
use optomech_core::pole_analysis::{
    critical_cavity_decay, poles_approximate, poles_exact_resonant, poles_numeric, PoleSet, ResonantBranch,
};
use optomech_core::table::linspace;

use crate::config::params_echo;
use crate::csv::{fmt_e, read_occupation_table, CsvDoc};
use crate::error::{Error, Result};
use crate::sweep::{cooling_map, par_map};

/// Where the bath occupation comes from.
#[derive(Debug, Clone, PartialEq)]
pub enum SpectrumSource {
    /// Flat `N` equal to the Planck occupation at `ω`.
    Thermal,
    /// Flat, explicit `N`.
    Flat(f64),
    /// Ohmic-matched spectrum with constant damping kernel `k = γ_m`.
    Ohmic,
    /// Two-column CSV file.
    Table(std::path::PathBuf),
}

impl SpectrumSource {
    /// `flat`, `flat:N`, `ohmic` or `table:PATH`.
    pub fn parse(text: &str) -> Result<Self> {
        let t = text.trim();
        if t == "flat" {
            return Ok(Self::Thermal);
        }
        if t == "ohmic" {
            return Ok(Self::Ohmic);
        }
        if let Some(n) = t.strip_prefix("flat:") {
            let n: f64 = n.trim().parse().map_err(|_| Error::config(format!("invalid occupation `{n}`")))?;
            return Ok(Self::Flat(n));
        }
        if let Some(p) = t.strip_prefix("table:") {
            return Ok(Self::Table(p.into()));
        }
        Err(Error::config(format!("invalid spectrum `{t}` (expected flat, flat:N, ohmic or table:PATH)")))
    }

    pub fn build(&self, params: &SystemParams) -> Result<OccupationSpectrum> {
        let invalid = |e: optomech_core::CoreError| Error::config(e.to_string());
        match self {
            Self::Thermal => OccupationSpectrum::flat(params.thermal_occupation()).map_err(invalid),
            Self::Flat(n) => OccupationSpectrum::flat(*n).map_err(invalid),
            Self::Ohmic => OccupationSpectrum::ohmic_matched(params.mech, DampingKernel::Constant(params.mech.damping()), params.thermal)
                .map_err(invalid),
            Self::Table(p) => read_occupation_table(p),
        }
    }

    pub fn describe(&self, spec: &OccupationSpectrum) -> String {
        match (self, spec.as_flat()) {
            (Self::Table(p), _) => format!("table path={}", p.display()),
            (Self::Ohmic, _) => "ohmic kernel=gamma_m".to_string(),
            (_, Some(n)) => format!("flat N={}", fmt_e(n)),
            (_, None) => "structured".to_string(),
        }
    }
}

/// Effective detuning requested on the command line.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum DeltaSpec {
    /// Exactly the damped mechanical frequency `ω`.
    OmegaM,
    Value(f64),
}

impl DeltaSpec {
    pub fn parse(text: &str) -> Result<Self> {
        match text.trim() {
            "omega_m" => Ok(Self::OmegaM),
            other => crate::units::parse_frequency(other).map(Self::Value),
        }
    }

    pub fn resolve(&self, params: &SystemParams) -> f64 {
        match *self {
            Self::OmegaM => params.mech.damped_frequency(),
            Self::Value(v) => v,
        }
    }

    pub fn label(&self) -> String {
        match *self {
            Self::OmegaM => "omega_m".to_string(),
            Self::Value(v) => fmt_e(v),
        }
    }
}

/// Resolved inputs shared by all commands.
#[derive(Debug, Clone)]
pub struct Setup {
    pub params: SystemParams,
    pub source: SpectrumSource,
    pub spec: OccupationSpectrum,
}

impl Setup {
    pub fn new(params: SystemParams, source: SpectrumSource) -> Result<Self> {
        let spec = source.build(&params)?;
        Ok(Self { params, source, spec })
    }

    /// Standard comment header of every output.
    pub fn header(&self, command: &str) -> Vec<(String, String)> {
        vec![
            ("command".to_string(), command.to_string()),
            ("params".to_string(), params_echo(&self.params)),
            ("spectrum".to_string(), self.source.describe(&self.spec)),
        ]
    }

    fn doc(&self, command: &str, columns: &[&str]) -> CsvDoc {
        let mut d = CsvDoc::new(columns);
        for (k, v) in self.header(command) {
            d.comment(&k, v);
        }
        d
    }

    fn n_eff(&self) -> Result<f64> {
        Ok(match self.spec.as_flat() {
            Some(n) => n,
            None => effective_occupation(&self.params.mech, &self.spec)?,
        })
    }
}

/// Ordered `key = value` lines.
#[derive(Debug, Clone, Default, PartialEq)]
pub struct Report {
    pub lines: Vec<(String, String)>,
}

impl Report {
    pub fn num(&mut self, key: &str, v: f64) {
        self.lines.push((key.to_string(), fmt_e(v)));
    }

    pub fn text(&mut self, key: &str, v: impl Into<String>) {
        self.lines.push((key.to_string(), v.into()));
    }

    pub fn render(&self, header: &[(String, String)]) -> String {
        let mut out = String::new();
        for (k, v) in header {
            out.push_str(&format!("# {k}: {v}\n"));
        }
        for (k, v) in &self.lines {
            out.push_str(&format!("{k} = {v}\n"));
        }
        out
    }
}

fn stable_point(setup: &Setup, delta: f64) -> Result<OperatingPoint> {
    let op = operating_point(&setup.params, delta);
    if op.is_stable() {
        Ok(op)
    } else {
        Err(Error::Unstable(op.stability))
    }
}

fn criterion_name(c: StabilityCriterion) -> &'static str {
    match c {
        StabilityCriterion::RedDetuned => "red_detuned",
        StabilityCriterion::BlueDetuned => "blue_detuned",
        StabilityCriterion::Resonant => "resonant",
    }
}

fn push_operating_point(r: &mut Report, op: &OperatingPoint) {
    r.num("detuning_rad_s", op.detuning);
    r.num("gamma_c_rad_s", op.gamma_c);
    r.num("coupling_rad_s", op.coupling);
    r.num("photon_number", op.cavity_amp.norm_sqr());
    r.num("mean_q_shift_m", op.mean_q_shift);
}

/// Lone-oscillator closed forms and, with a detuning, the coupled moments.
pub fn equilibrium(setup: &Setup, delta: Option<DeltaSpec>) -> Result<Report> {
    let mech = &setup.params.mech;
    let n = setup.n_eff()?;
    let mut r = Report::default();
    r.num("omega_rad_s", mech.damped_frequency());
    let tau = mech.tau();
    r.num("tau_re", tau.re);
    r.num("tau_im", tau.im);
    r.num("n_eff", n);
    let d = diffusion_coefficients(mech, n)?;
    r.num("d_qq", d.d_qq);
    r.num("d_pp", d.d_pp);
    r.num("d_qp", d.d_qp);
    r.num("lindblad_slack", d.lindblad_slack());
    let m = equilibrium_moments(mech, n)?;
    r.num("q2_m2", m.q2);
    r.num("p2_kg2m2_s2", m.p2);
    r.num("qp_sym_js", m.qp_sym);
    r.num("energy_j", mean_mechanical_energy_eq(mech, n)?);
    let Some(delta) = delta else { return Ok(r) };
    let op = stable_point(setup, delta.resolve(&setup.params))?;
    push_operating_point(&mut r, &op);
    let coupled = moment_integrals(&op, &setup.spec)?;
    r.num("coupled_q2_m2", coupled.q2);
    r.num("coupled_p2_kg2m2_s2", coupled.p2);
    r.num("coupled_qp_sym_js", coupled.qp_sym);
    if setup.spec.as_flat().is_some() {
        let sigma = op.steady_covariance(&setup.spec)?;
        let (mass, om) = (mech.mass(), mech.bare_frequency());
        r.num("lyapunov_q2_m2", sigma[0][0] * HBAR / (mass * om));
        r.num("lyapunov_p2_kg2m2_s2", sigma[1][1] * mass * HBAR * om);
        r.num("lyapunov_qp_sym_js", sigma[0][1] * HBAR);
    }
    let e = energy_quadrature(&op, &setup.spec)?;
    r.num("n_rp", e.n_rp);
    r.num("n_th", e.n_th);
    r.num("m_th", e.m_th);
    r.num("cooling_factor", e.cooling_factor);
    r.num("fluct_energy_j", e.fluct_energy);
    Ok(r)
}

/// Fluctuation spectra on a grid (or an automatic pole-clustered grid).
pub fn spectra(setup: &Setup, delta: DeltaSpec, grid: Option<Vec<f64>>, auto_points: usize) -> Result<CsvDoc> {
    let op = stable_point(setup, delta.resolve(&setup.params))?;
    let grid = match grid {
        Some(g) => g,
        None => auto_grid(&op, 3.0 * setup.params.mech.damped_frequency(), auto_points)?,
    };
    let s = Spectra::new(&op, &setup.spec);
    let rows = par_map(&grid, |&nu| [s.sq_rp(nu), s.sq_th(nu), s.sp_th(nu), s.sqp_th(nu), s.sq_total(nu), s.sp_total(nu)])?;
    let mut columns = vec!["nu_rad_s"];
    columns.extend(SPECTRUM_COLUMNS);
    let mut doc = setup.doc("spectra", &columns);
    doc.comment("delta", delta.label());
    for (nu, row) in grid.iter().zip(rows) {
        let mut v = vec![*nu];
        v.extend(row);
        doc.push_numbers(&v);
    }
    Ok(doc)
}

fn push_poles(r: &mut Report, prefix: &str, p: &PoleSet) {
    r.num(&format!("{prefix}gamma_m_eff"), p.gamma_m);
    r.num(&format!("{prefix}gamma_c_eff"), p.gamma_c);
    r.num(&format!("{prefix}omega_eff"), p.omega_eff);
    r.num(&format!("{prefix}delta_eff"), p.delta_eff);
}

/// Pole report: primary method first, then the numeric cross-check.
pub fn poles(setup: &Setup, delta: DeltaSpec) -> Result<Report> {
    let p = &setup.params;
    let op = stable_point(setup, delta.resolve(p))?;
    let cp = op.char_poly();
    let mut r = Report::default();
    push_operating_point(&mut r, &op);
    let numeric = poles_numeric(&cp);
    let primary = match delta {
        DeltaSpec::OmegaM => poles_exact_resonant(&p.mech, op.gamma_c, op.coupling)?,
        DeltaSpec::Value(d) => match poles_approximate(&p.mech, op.gamma_c, d, op.coupling) {
            Ok(a) => {
                r.num("approx_damping_ratio", a.report.damping_ratio);
                r.num("approx_chi", a.report.chi);
                r.num("approx_third", a.report.third);
                a.poles
            }
            Err(e) => {
                r.text("approx_rejected", e.to_string());
                numeric.clone()?
            }
        },
    };
    r.text("method", primary.method.as_str());
    if let Some(b) = primary.branch {
        r.text(
            "branch",
            match b {
                ResonantBranch::DistinctDamping => "distinct_damping",
                ResonantBranch::EqualDamping => "equal_damping",
            },
        );
    }
    push_poles(&mut r, "", &primary);
    r.num("cooperativity", (primary.gamma_m - p.mech.damping()) / p.mech.damping());
    r.num("max_system_residual", primary.system_residuals(&cp).into_iter().fold(0.0, f64::max));
    if let Ok(critical) = critical_cavity_decay(p) {
        r.num("critical_gamma_c", critical);
    }
    match numeric {
        Ok(n) => {
            push_poles(&mut r, "numeric_", &n);
            let (a0, a1) = primary.frequency_pair();
            let (b0, b1) = n.frequency_pair();
            let rel = |a: f64, b: f64| (a - b).abs() / a.abs().max(b.abs());
            let damping = rel(primary.gamma_m.min(primary.gamma_c), n.gamma_m.min(n.gamma_c));
            r.num("numeric_max_rel_diff", damping.max(rel(a0, b0)).max(rel(a1, b1)));
        }
        Err(e) => r.text("numeric_error", e.to_string()),
    }
    Ok(r)
}

/// Routh–Hurwitz report. Unstable points are reported, then surfaced as
/// [`Error::Unstable`] by the caller.
pub fn stability(setup: &Setup, delta: DeltaSpec) -> (Report, Option<Error>) {
    let op = operating_point(&setup.params, delta.resolve(&setup.params));
    let s = op.stability;
    let mut r = Report::default();
    push_operating_point(&mut r, &op);
    r.text("criterion", criterion_name(s.criterion));
    r.text("stable", s.stable.to_string());
    r.num("lhs", s.lhs);
    r.num("rhs", s.rhs);
    r.num("margin", s.margin());
    if let Ok(eig) = op.eigenvalues() {
        let abscissa = eig.iter().map(|z| z.re).fold(f64::NEG_INFINITY, f64::max);
        r.num("spectral_abscissa", abscissa);
    }
    let err = (!s.stable).then_some(Error::Unstable(s));
    (r, err)
}

/// Cooling factor map over `Δ × γ_c`.
pub fn cooling_map_csv(setup: &Setup, deltas: &[f64], gammas: &[f64]) -> Result<CsvDoc> {
    let rows = cooling_map(&setup.params, &setup.spec, deltas, gammas)?;
    let mut doc =
        setup.doc("cooling-map", &["delta_rad_s", "gamma_c_rad_s", "cooling_factor", "n_rp", "n_th", "m_th", "stable", "pole_method"]);
    for row in rows {
        let mut f: Vec<String> =
            [row.delta, row.gamma_c, row.cooling_factor, row.n_rp, row.n_th, row.m_th].iter().map(|&v| fmt_e(v)).collect();
        f.push(if row.stable { "1" } else { "0" }.to_string());
        f.push(row.pole_method.map_or("none", |m| m.as_str()).to_string());
        doc.push_row(f);
    }
    Ok(doc)
}

/// Homodyne spectrum at phase `θ`.
pub fn homodyne(setup: &Setup, delta: DeltaSpec, theta: f64, grid: &[f64]) -> Result<CsvDoc> {
    let op = stable_point(setup, delta.resolve(&setup.params))?;
    let chunks: Vec<&[f64]> = grid.chunks(256).collect();
    let parts = par_map(&chunks, |c| homodyne_spectrum(&op, &setup.spec, theta, c))?;
    let mut doc = setup.doc("homodyne", &["nu_rad_s", "s_th", "s_rp", "s_inel"]);
    doc.comment("delta", delta.label());
    doc.comment("theta_rad", fmt_e(theta));
    doc.comment("elastic_weight_delta_nu", fmt_e(parts.first().map_or(0.0, |p| p.elastic_weight)));
    let mismatch = parts.iter().map(|p| p.assembly_mismatch).fold(0.0, f64::max);
    doc.comment("assembly_mismatch", fmt_e(mismatch));
    for part in &parts {
        for i in 0..part.grid.len() {
            doc.push_numbers(&[part.grid[i], part.s_th[i], part.s_rp[i], part.s_inel[i]]);
        }
    }
    Ok(doc)
}

/// Heterodyne spectrum against the offset `ν = μ − ω₀`, with the number of
/// inelastic peaks (1% prominence rule).
pub fn heterodyne(setup: &Setup, delta: DeltaSpec, grid: &[f64], kappa: Option<f64>) -> Result<(CsvDoc, usize)> {
    let op = stable_point(setup, delta.resolve(&setup.params))?;
    let chunks: Vec<&[f64]> = grid.chunks(256).collect();
    let parts = par_map(&chunks, |c| heterodyne_spectrum(&op, &setup.spec, 0.0, c, kappa))?;
    let mut columns = vec!["nu_rad_s", "sigma_th", "sigma_rp", "sigma_inel"];
    if kappa.is_some() {
        columns.push("sigma_el");
    }
    let mut doc = setup.doc("heterodyne", &columns);
    doc.comment("delta", delta.label());
    doc.comment("omega0_rad_s", fmt_e(setup.params.laser.frequency));
    doc.comment("elastic_weight_delta_nu", fmt_e(parts.first().map_or(0.0, |p| p.elastic_weight)));
    if let Some(k) = kappa {
        doc.comment("kappa_rad_s", fmt_e(k));
    }
    let mismatch = parts.iter().map(|p| p.modulus_form_mismatch).fold(0.0, f64::max);
    doc.comment("modulus_form_mismatch", fmt_e(mismatch));
    let mut inel = Vec::with_capacity(grid.len());
    for part in &parts {
        for i in 0..part.grid.len() {
            let mut v = vec![part.grid[i], part.sigma_th[i], part.sigma_rp[i], part.sigma_inel[i]];
            if let Some(el) = &part.sigma_el {
                v.push(el[i]);
            }
            doc.push_numbers(&v);
            inel.push(part.sigma_inel[i]);
        }
    }
    let peaks = find_peaks(&inel, PEAK_PROMINENCE).len();
    doc.comment("inelastic_peaks", peaks.to_string());
    Ok((doc, peaks))
}

/// Relative prominence used for peak counting.
pub const PEAK_PROMINENCE: f64 = 0.01;

/// Default homodyne and heterodyne grid: `ν ∈ [0, 2ω]`.
pub fn default_detection_grid(params: &SystemParams, n: usize) -> Vec<f64> {
    linspace(0.0, 2.0 * params.mech.damped_frequency(), n)
}
