//! The five report commands. Each computes everything first and only then
//! writes its artifacts, each through a temporary file renamed into place.

use std::fmt::Write as _;
use std::path::{Path, PathBuf};
use std::time::Instant;

use rayon::prelude::*;
use serde::Serialize;

use crate::config::{Format, InitialState, Propagator, ResolvedConfig, TimeGrid};
use crate::dynamics::{self, ContributionTable, ExpFit};
use crate::liouvillian::{self, DarkCluster, SpectrumDiagnostics, SubradiantReport};
use crate::operators::{allowed_j, collective_ops, degeneracy_dj, hamiltonian, Boundary, ModelParams};
use crate::rateq::{self, FrequencyPrediction, StateLabel, UnresolvedBlock};
use crate::symmetry::{build_group, symmetry_report, GroupKind, SymmetryReport};
use crate::{Error, Result};

/// Files written by a command and a short human-readable summary.
#[derive(Debug)]
pub struct Outcome {
    pub files: Vec<PathBuf>,
    pub summary: String,
}

#[derive(Serialize)]
struct Artifact<'a, T: Serialize> {
    config_hash: String,
    config: &'a ResolvedConfig,
    units: &'static str,
    result: T,
}

fn artifact<T: Serialize>(cfg: &ResolvedConfig, result: T) -> Result<Vec<u8>> {
    let a = Artifact { config_hash: cfg.hash(), config: cfg, units: "gamma", result };
    let mut s = serde_json::to_string_pretty(&a)?;
    s.push('\n');
    Ok(s.into_bytes())
}

fn num(x: f64) -> String {
    format!("{x:.11e}")
}

fn csv_bytes(header: &[&str], rows: impl IntoIterator<Item = Vec<String>>) -> Result<Vec<u8>> {
    let mut w = csv::Writer::from_writer(Vec::new());
    let err = |e: csv::Error| Error::Io(std::io::Error::other(e));
    w.write_record(header).map_err(err)?;
    for r in rows {
        w.write_record(&r).map_err(err)?;
    }
    w.into_inner().map_err(|e| Error::Io(std::io::Error::other(e.to_string())))
}

/// Write all files or none of the final names: every file is staged in the
/// output directory first and renamed once all staging succeeded.
fn write_all(dir: &Path, files: Vec<(&str, Vec<u8>)>) -> Result<Vec<PathBuf>> {
    std::fs::create_dir_all(dir)?;
    let mut staged = Vec::new();
    for (name, bytes) in files {
        let mut tmp = tempfile::NamedTempFile::new_in(dir)?;
        std::io::Write::write_all(&mut tmp, &bytes)?;
        tmp.as_file().sync_all()?;
        staged.push((tmp, dir.join(name)));
    }
    let mut out = Vec::new();
    for (tmp, path) in staged {
        tmp.persist(&path).map_err(|e| Error::Io(e.error))?;
        out.push(path);
    }
    Ok(out)
}

fn pair_list(cfg: &ResolvedConfig) -> Vec<(usize, usize)> {
    let n = cfg.config.model.n;
    cfg.config
        .dynamics
        .as_ref()
        .and_then(|d| d.pairs.clone())
        .unwrap_or_else(|| (1..=n).flat_map(|a| (a + 1..=n).map(move |b| (a, b))).collect())
}

/// `sum_j d_j^2`, the default number of eigenvalues kept per sweep point.
pub fn strong_drive_count(n: usize) -> usize {
    allowed_j(n).into_iter().map(|j| degeneracy_dj(n, j).map(|d| (d * d) as usize).unwrap_or(0)).sum()
}

// ---- spectrum ----

#[derive(Serialize)]
pub struct SpectrumResult {
    pub n: usize,
    pub dim: usize,
    pub vectorization: &'static str,
    pub sort_order: &'static str,
    pub eigenvalues: Vec<[f64; 2]>,
    pub residuals: Vec<f64>,
    pub diagnostics: SpectrumDiagnostics,
    pub zero_multiplicity: usize,
    pub subradiant: SubradiantReport,
    pub long_lived: SubradiantReport,
    pub dark_cluster: Option<DarkCluster>,
}

pub fn compute_spectrum(cfg: &ResolvedConfig) -> Result<SpectrumResult> {
    let p = cfg.params();
    let t = &cfg.config.thresholds;
    let l = liouvillian::build_liouvillian(&p)?;
    let spec = liouvillian::spectrum(&l)?;
    let dark_cluster = t.kappa.map(|k| liouvillian::dark_cluster(&p, t.subradiant, k, t.freq_tol)).transpose()?;
    Ok(SpectrumResult {
        n: p.n,
        dim: spec.len(),
        vectorization: liouvillian::VECTORIZATION,
        sort_order: liouvillian::SORT_ORDER,
        eigenvalues: spec.eigenvalues.iter().map(|z| [z.re, z.im]).collect(),
        residuals: spec.residuals.clone(),
        diagnostics: spec.diagnostics.clone(),
        zero_multiplicity: spec.zero_multiplicity(),
        subradiant: liouvillian::classify_subradiant(&spec, t.subradiant, t.freq_tol),
        long_lived: liouvillian::classify_subradiant(&spec, t.long_lived, t.freq_tol),
        dark_cluster,
    })
}

pub fn cmd_spectrum(cfg: &ResolvedConfig) -> Result<Outcome> {
    let r = compute_spectrum(cfg)?;
    let mut files = Vec::new();
    if cfg.wants(Format::Csv) {
        let rows = r
            .eigenvalues
            .iter()
            .zip(&r.residuals)
            .enumerate()
            .map(|(i, (z, res))| vec![i.to_string(), num(z[0]), num(z[1]), num(*res)]);
        files.push(("spectrum.csv", csv_bytes(&["index", "re", "im", "residual"], rows)?));
    }
    let summary = format!(
        "N={} dim={} lambda1=({:.6e}, {:.6e}) subradiant={} (gap ratio {}) frequencies={}",
        r.n,
        r.dim,
        r.subradiant.lambda1[0],
        r.subradiant.lambda1[1],
        r.subradiant.count_inclusive,
        r.subradiant.gap_ratio.map(|g| format!("{g:.3}")).unwrap_or_else(|| "n/a".into()),
        r.long_lived.frequencies.len(),
    );
    files.insert(0, ("spectrum.json", artifact(cfg, &r)?));
    Ok(Outcome { files: write_all(cfg.out_dir(), files)?, summary })
}

// ---- sweep ----

#[derive(Clone, Debug, Serialize)]
pub struct SweepPoint {
    pub omega_drive: f64,
    pub delta_omega: f64,
    pub lambda1: Option<[f64; 2]>,
    pub subradiant_count: Option<usize>,
    pub eigenvalues: Vec<[f64; 2]>,
    pub max_re: Option<f64>,
    pub error: Option<String>,
    #[serde(skip)]
    pub wall_seconds: f64,
}

#[derive(Serialize)]
pub struct SweepResult {
    pub omega_drive: Vec<f64>,
    pub delta_omega: Vec<f64>,
    /// Row-major: `delta_omega` outer, `omega_drive` inner.
    pub ordering: &'static str,
    pub keep: usize,
    pub points: Vec<SweepPoint>,
}

fn sweep_point(cfg: &ResolvedConfig, omega: f64, dw: f64, keep: usize) -> SweepPoint {
    let start = Instant::now();
    let run = || -> Result<(liouvillian::LiouvillianSpectrum, SubradiantReport)> {
        let p = cfg.sweep_params(omega, dw)?;
        let spec = liouvillian::spectrum(&liouvillian::build_liouvillian(&p)?)?;
        let rep = liouvillian::classify_subradiant(&spec, cfg.config.thresholds.subradiant, cfg.config.thresholds.freq_tol);
        Ok((spec, rep))
    };
    let mut pt = SweepPoint {
        omega_drive: omega,
        delta_omega: dw,
        lambda1: None,
        subradiant_count: None,
        eigenvalues: Vec::new(),
        max_re: None,
        error: None,
        wall_seconds: 0.0,
    };
    match run() {
        Ok((spec, rep)) => {
            pt.lambda1 = Some(rep.lambda1);
            pt.subradiant_count = Some(rep.count_inclusive);
            pt.eigenvalues = spec.eigenvalues.iter().take(keep).map(|z| [z.re, z.im]).collect();
            pt.max_re = spec.eigenvalues.iter().map(|z| z.re).reduce(f64::max);
        }
        Err(e) => pt.error = Some(e.to_string()),
    }
    pt.wall_seconds = start.elapsed().as_secs_f64();
    pt
}

pub fn compute_sweep(cfg: &ResolvedConfig) -> Result<SweepResult> {
    let s = cfg
        .config
        .sweep
        .as_ref()
        .ok_or_else(|| Error::Config("sweep requires a [sweep] section".into()))?;
    let omegas = s.omega.points();
    let dws = s.delta_omega.points();
    let keep = s.keep.unwrap_or_else(|| strong_drive_count(cfg.config.model.n));
    let grid: Vec<(f64, f64)> = dws.iter().flat_map(|&d| omegas.iter().map(move |&o| (o, d))).collect();
    let points = grid.par_iter().map(|&(o, d)| sweep_point(cfg, o, d, keep)).collect();
    Ok(SweepResult { omega_drive: omegas, delta_omega: dws, ordering: "delta_omega outer, omega_drive inner", keep, points })
}

pub fn cmd_sweep(cfg: &ResolvedConfig) -> Result<Outcome> {
    let r = compute_sweep(cfg)?;
    let opt = |x: Option<f64>| x.map(num).unwrap_or_default();
    let rows = r.points.iter().map(|p| {
        vec![
            num(p.omega_drive),
            num(p.delta_omega),
            opt(p.lambda1.map(|l| l[0])),
            opt(p.lambda1.map(|l| l[1])),
            p.subradiant_count.map(|c| c.to_string()).unwrap_or_default(),
            p.error.clone().unwrap_or_default(),
        ]
    });
    let header = ["omega_drive", "delta_omega", "re_lambda1", "im_lambda1", "subradiant_count", "errors"];
    let mut files = vec![("sweep.csv", csv_bytes(&header, rows)?)];
    let eig_rows = r.points.iter().flat_map(|p| {
        p.eigenvalues
            .iter()
            .enumerate()
            .map(|(k, z)| vec![num(p.omega_drive), num(p.delta_omega), k.to_string(), num(z[0]), num(z[1])])
    });
    files.push((
        "sweep_eigenvalues.csv",
        csv_bytes(&["omega_drive", "delta_omega", "k", "re", "im"], eig_rows)?,
    ));
    // wall times vary run to run, so they live apart from the deterministic artifacts
    let timing = r
        .points
        .iter()
        .map(|p| vec![num(p.omega_drive), num(p.delta_omega), format!("{:.6}", p.wall_seconds)]);
    files.push(("sweep_timing.csv", csv_bytes(&["omega_drive", "delta_omega", "wall_seconds"], timing)?));
    let failed = r.points.iter().filter(|p| p.error.is_some()).count();
    let best = r
        .points
        .iter()
        .filter_map(|p| p.lambda1.map(|l| (-l[0], p.omega_drive, p.delta_omega)))
        .max_by(|a, b| a.0.total_cmp(&b.0));
    let summary = format!(
        "{} points ({} failed); max -Re lambda1 = {}",
        r.points.len(),
        failed,
        best.map(|b| format!("{:.4} at omega={:.4}, delta_omega={:.4}", b.0, b.1, b.2)).unwrap_or_else(|| "n/a".into())
    );
    if cfg.wants(Format::Json) {
        files.insert(0, ("sweep.json", artifact(cfg, &r)?));
    }
    Ok(Outcome { files: write_all(cfg.out_dir(), files)?, summary })
}

// ---- dynamics ----

#[derive(Serialize)]
pub struct PairFit {
    pub pair: (usize, usize),
    pub fit: Option<ExpFit>,
    pub error: Option<String>,
    /// Nonstationary eigenmode contributing most to this pair.
    pub dominant_mode: Option<usize>,
    pub dominant_rate: Option<f64>,
    /// Fitted rate over the dominant mode's rate.
    pub rate_ratio: Option<f64>,
}

#[derive(Serialize)]
pub struct DynamicsResult {
    pub propagator: &'static str,
    pub fallback_reason: Option<String>,
    pub initial: InitialState,
    pub fits: Vec<PairFit>,
    pub contributions: Option<ContributionTable>,
    #[serde(skip)]
    pub trace: dynamics::TimeTrace,
}

pub fn compute_dynamics(cfg: &ResolvedConfig) -> Result<DynamicsResult> {
    let d = cfg
        .config
        .dynamics
        .as_ref()
        .ok_or_else(|| Error::Config("dynamics requires a [dynamics] section".into()))?;
    let p = cfg.params();
    let pairs = pair_list(cfg);
    let times = match d.grid {
        TimeGrid::Log => dynamics::log_grid(d.t_min, d.t_max, d.samples),
        TimeGrid::Linear => dynamics::linear_grid(d.t_min, d.t_max, d.samples),
    };
    let rho0 = match d.initial {
        InitialState::Ground => dynamics::ground_state(p.n),
        InitialState::Excited => dynamics::excited_state(p.n),
    };
    let l = liouvillian::build_liouvillian(&p)?;
    let mut spec = None;
    let mut fallback_reason = None;
    let mut propagator = "ode";
    let traj = if d.propagator == Propagator::Spectral {
        let attempt = liouvillian::spectrum(&l).and_then(|s| {
            let t = dynamics::propagate_spectral(&s, &rho0, &times)?;
            Ok((s, t))
        });
        match attempt {
            Ok((s, t)) => {
                spec = Some(s);
                propagator = "spectral";
                t
            }
            Err(e) => {
                fallback_reason = Some(e.to_string());
                dynamics::propagate_ode(&l, &rho0, &times)?
            }
        }
    } else {
        dynamics::propagate_ode(&l, &rho0, &times)?
    };
    let trace = dynamics::correlations(&traj, &pairs)?;
    // attribution is restricted to the long-lived modes counted in the strong-drive limit
    let contributions = spec
        .as_ref()
        .map(|s| dynamics::eigenvector_observables(s, &pairs, strong_drive_count(p.n)))
        .transpose()?;
    let fits = pairs
        .iter()
        .enumerate()
        .map(|(k, &pair)| {
            let mut f = PairFit { pair, fit: None, error: None, dominant_mode: None, dominant_rate: None, rate_ratio: None };
            let w = d.fit_window;
            if w.t_min < times[0] || w.t_max > times[times.len() - 1] {
                f.error = Some(format!(
                    "fit window [{}, {}] exceeds trace [{}, {}]",
                    w.t_min,
                    w.t_max,
                    times[0],
                    times[times.len() - 1]
                ));
            }
            match dynamics::fit_exponential(&trace.times, &trace.magnitudes(k), w, d.fit_method, d.envelope) {
                Ok(fit) => f.fit = Some(fit),
                Err(e) => f.error = Some(e.to_string()),
            }
            if let Some(c) = &contributions {
                f.dominant_mode = c.dominant_mode(k);
                f.dominant_rate = f.dominant_mode.map(|i| -c.eigenvalues[i][0]);
                f.rate_ratio = match (&f.fit, f.dominant_rate) {
                    (Some(fit), Some(r)) if r > 0.0 => Some(fit.rate / r),
                    _ => None,
                };
            }
            f
        })
        .collect();
    Ok(DynamicsResult { propagator, fallback_reason, initial: d.initial, fits, contributions, trace })
}

pub fn cmd_dynamics(cfg: &ResolvedConfig) -> Result<Outcome> {
    let r = compute_dynamics(cfg)?;
    let mut summary = format!("propagator: {}\n", r.propagator);
    for f in &r.fits {
        match (&f.fit, &f.error) {
            (Some(fit), _) => {
                let _ = writeln!(summary, "pair {:?}: A={:.4} B={:.4e}", f.pair, fit.amplitude, fit.rate);
            }
            (None, Some(e)) => {
                let _ = writeln!(summary, "pair {:?}: {e}", f.pair);
            }
            _ => {}
        }
    }
    let files = vec![("trace.csv", r.trace.to_csv().into_bytes()), ("fits.json", artifact(cfg, &r)?)];
    Ok(Outcome { files: write_all(cfg.out_dir(), files)?, summary: summary.trim_end().to_string() })
}

// ---- symmetry ----

pub fn cmd_symmetry(cfg: &ResolvedConfig) -> Result<Outcome> {
    let n = cfg.config.model.n;
    let report: SymmetryReport = symmetry_report(n)?;
    let text = report.to_text();
    let mut files = vec![("symmetry.json", artifact(cfg, &report)?)];
    if cfg.wants(Format::Txt) {
        files.push(("symmetry.txt", text.clone().into_bytes()));
    }
    Ok(Outcome { files: write_all(cfg.out_dir(), files)?, summary: text.trim_end().to_string() })
}

// ---- rates ----

#[derive(Serialize)]
pub struct CrossCheck {
    pub threshold: f64,
    pub liouvillian_frequencies: Vec<f64>,
    pub max_relative_mismatch: Option<f64>,
    pub tolerance: f64,
    pub pass: bool,
}

#[derive(Serialize)]
pub struct RatesResult {
    pub n: usize,
    pub null_space_dim: Option<usize>,
    pub null_space_error: Option<String>,
    pub conservation_defect: f64,
    pub conservation_pass: bool,
    pub min_off_diagonal: f64,
    pub unresolved: Vec<UnresolvedBlock>,
    pub labels: Vec<StateLabel>,
    /// Group used for the frequency prediction (disorder-free Hamiltonian).
    pub group: Option<String>,
    pub prediction: Option<FrequencyPrediction>,
    pub prediction_error: Option<String>,
    pub cross_check: Option<CrossCheck>,
}

/// Symmetry group of the disorder-free model for a given geometry.
pub fn model_group_kind(p: &ModelParams) -> GroupKind {
    match p.boundary {
        Boundary::Periodic => GroupKind::D,
        Boundary::Open => GroupKind::Cs,
        Boundary::None => GroupKind::S,
    }
}

pub const CROSS_CHECK_TOL: f64 = 0.1;
/// Largest N for which `rates` also diagonalizes the Liouvillian.
pub const CROSS_CHECK_MAX_N: usize = 4;

pub fn compute_rates(cfg: &ResolvedConfig) -> Result<RatesResult> {
    let p = cfg.params();
    let t = &cfg.config.thresholds;
    let jm = collective_ops(p.n).jminus;
    let rm = rateq::build_rate_matrix(&hamiltonian(&p), &jm, p.gamma, None)?;
    let defect = rm.conservation_defect();
    let (null_space_dim, null_space_error) = match rateq::stationary_count(&rm, t.null_tol) {
        Ok(d) => (Some(d), None),
        Err(e) => (None, Some(e.to_string())),
    };
    let mut out = RatesResult {
        n: p.n,
        null_space_dim,
        null_space_error,
        conservation_defect: defect,
        conservation_pass: defect < 1e-10,
        min_off_diagonal: rm.min_off_diagonal(),
        unresolved: rm.unresolved.clone(),
        labels: rm.labels.clone(),
        group: None,
        prediction: None,
        prediction_error: None,
        cross_check: None,
    };
    if !(2..=5).contains(&p.n) {
        out.prediction_error = Some(format!("no symmetry tables for N={}", p.n));
        return Ok(out);
    }
    let clean = cfg.clean_params();
    let group = build_group(model_group_kind(&clean), p.n)?;
    out.group = Some(group.name());
    let prediction = rateq::build_rate_matrix(&hamiltonian(&clean), &jm, clean.gamma, Some(&group))
        .and_then(|r| rateq::predicted_frequencies(&r, &group, clean.omega, t.freq_tol));
    match prediction {
        Ok(pr) => {
            if p.n <= CROSS_CHECK_MAX_N {
                let spec = liouvillian::spectrum(&liouvillian::build_liouvillian(&clean)?)?;
                let observed = liouvillian::classify_subradiant(&spec, t.long_lived, t.freq_tol).frequencies;
                let mismatch = rateq::max_relative_mismatch(&pr.frequencies, &observed);
                out.cross_check = Some(CrossCheck {
                    threshold: t.long_lived,
                    liouvillian_frequencies: observed,
                    max_relative_mismatch: mismatch,
                    tolerance: CROSS_CHECK_TOL,
                    pass: mismatch.is_some_and(|m| m <= CROSS_CHECK_TOL),
                });
            }
            out.prediction = Some(pr);
        }
        Err(e) => out.prediction_error = Some(e.to_string()),
    }
    Ok(out)
}

pub fn cmd_rates(cfg: &ResolvedConfig) -> Result<Outcome> {
    let r = compute_rates(cfg)?;
    let mut s = String::new();
    let _ = writeln!(
        s,
        "conservation (column sums): {} (max {:.2e})",
        if r.conservation_pass { "PASS" } else { "FAIL" },
        r.conservation_defect
    );
    match (r.null_space_dim, &r.null_space_error) {
        (Some(d), _) => {
            let _ = writeln!(s, "stationary populations: {d}");
        }
        (None, Some(e)) => {
            let _ = writeln!(s, "stationary populations: {e}");
        }
        _ => {}
    }
    for u in &r.unresolved {
        let _ = writeln!(s, "unresolved degeneracy: dim {} at E={:.6}", u.dim, u.energy);
    }
    if let Some(p) = &r.prediction {
        let _ = writeln!(s, "predicted frequencies ({}): {:?}", r.group.as_deref().unwrap_or("-"), p.frequencies);
    }
    if let Some(e) = &r.prediction_error {
        let _ = writeln!(s, "prediction: {e}");
    }
    if let Some(c) = &r.cross_check {
        let _ = writeln!(
            s,
            "cross-check vs Liouvillian {:?}: {}",
            c.liouvillian_frequencies,
            if c.pass { "PASS" } else { "FAIL" }
        );
    }
    let files = vec![("rates.json", artifact(cfg, &r)?)];
    Ok(Outcome { files: write_all(cfg.out_dir(), files)?, summary: s.trim_end().to_string() })
}
